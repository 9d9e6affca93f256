//! The δ-machinery of a symbol: prolonged symbol dimensions, ranks of the
//! alternating maps δ: Λ^s ⊗ g_{ℓ+1} → Λ^{s+1} ⊗ g_ℓ, bigraded cohomology,
//! and the intrinsic acyclicity tests built from them.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::combin::{binom, cmp_jet_monomials, count_of_degree, indices_of_degree};
use crate::diffop::{default_labels, DiffOperator, DiffPolynomial};
use crate::error::JanetError;
use crate::field::matrix::{ScalarMatrix, SparseRow};
use crate::field::poly::Monomial;
use crate::field::scalar::{merge_conditions, GenericityCondition, ParamScalar};
use crate::jets::JetSystem;

/// Monomials of one degree, ordered as inside a degree block of
/// `JetColumns` (most multiplicative class first).
pub fn level_monomials(n: usize, ell: u32) -> Vec<Monomial> {
    let mut v = indices_of_degree(n, ell);
    v.sort_by(|a, b| cmp_jet_monomials(a, b));
    v.into_iter().map(Monomial).collect()
}

fn level_index(mus: &[Monomial]) -> HashMap<Monomial, usize> {
    mus.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect()
}

/// All s-element subsets of {0, …, n−1}, ascending within each subset,
/// enumerated in lexicographic order.
pub fn subsets(n: usize, s: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binom(n, s));
    let mut cur = Vec::with_capacity(s);
    fn rec(out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>, start: usize, n: usize, s: usize) {
        if cur.len() == s {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(out, cur, i + 1, n, s);
            cur.pop();
        }
    }
    rec(&mut out, &mut cur, 0, n, s);
    out
}

struct LevelData {
    equations: ScalarMatrix,
    solutions: ScalarMatrix,
}

/// The family of prolonged symbols g_ℓ anchored at order q: for ℓ ≥ q the
/// equations are all derivative shifts of the anchor equations into degree
/// ℓ; for ℓ < q the space is all of S_ℓ ⊗ E. Levels are computed on demand
/// and cached; genericity conditions met along the way accumulate on the
/// family.
pub struct SymbolFamily {
    n: usize,
    m: usize,
    nparams: usize,
    q: u32,
    anchor: ScalarMatrix,
    cache: RefCell<HashMap<u32, std::rc::Rc<LevelData>>>,
    delta_ranks: RefCell<HashMap<(usize, u32), usize>>,
    conditions: RefCell<Vec<GenericityCondition>>,
}

impl SymbolFamily {
    /// Principal symbol family of a system, anchored at its order.
    pub fn of(sys: &JetSystem) -> SymbolFamily {
        SymbolFamily {
            n: sys.n(),
            m: sys.num_unknowns(),
            nparams: sys.nparams(),
            q: sys.order(),
            anchor: sys.symbol_matrix(),
            cache: RefCell::new(HashMap::new()),
            delta_ranks: RefCell::new(HashMap::new()),
            conditions: RefCell::new(sys.conditions().to_vec()),
        }
    }

    /// The unconstrained family g_ℓ = S_ℓ ⊗ E (no anchor equations).
    pub fn full(n: usize, m: usize, nparams: usize, q: u32) -> SymbolFamily {
        SymbolFamily {
            n,
            m,
            nparams,
            q,
            anchor: ScalarMatrix::new(nparams, count_of_degree(n, q) * m),
            cache: RefCell::new(HashMap::new()),
            delta_ranks: RefCell::new(HashMap::new()),
            conditions: RefCell::new(Vec::new()),
        }
    }

    /// Anchor equations as an operator with homogeneous degree-q entries.
    pub fn to_operator(&self) -> DiffOperator {
        let mus = level_monomials(self.n, self.q);
        let entries: Vec<Vec<DiffPolynomial>> = self
            .anchor
            .rows()
            .iter()
            .map(|row| {
                let mut out = vec![DiffPolynomial::zero(self.n, self.nparams); self.m];
                for (c, v) in row {
                    let mu = &mus[*c as usize / self.m];
                    let k = *c as usize % self.m;
                    out[k] = out[k].add(&DiffPolynomial::from_term(
                        self.n,
                        mu.0.clone(),
                        v.clone(),
                    ));
                }
                out
            })
            .collect();
        let p = entries.len();
        DiffOperator::new(
            self.n,
            self.nparams,
            entries,
            default_labels("v", self.m),
            default_labels("sym", p),
        )
    }

    /// The family in new independent variables x̄ = C x.
    pub fn change_variables(
        &self,
        c: &[Vec<ParamScalar>],
    ) -> Result<SymbolFamily, JanetError> {
        let op = self.to_operator().change_variables(c)?;
        let mus = level_monomials(self.n, self.q);
        let idx = level_index(&mus);
        let mut mat = ScalarMatrix::new(self.nparams, mus.len() * self.m);
        for i in 0..op.num_targets() {
            let mut row: SparseRow = Vec::new();
            for k in 0..self.m {
                for (mu, v) in op.entry(i, k).terms() {
                    debug_assert_eq!(mu.degree(), self.q); // linear change keeps homogeneity
                    row.push(((idx[mu] * self.m + k) as u32, v.clone()));
                }
            }
            row.sort_by_key(|(c, _)| *c);
            mat.push_row(row);
        }
        let r = mat.rref_generic();
        let mut conds = self.conditions.borrow().clone();
        merge_conditions(&mut conds, &r.conditions);
        Ok(SymbolFamily {
            n: self.n,
            m: self.m,
            nparams: self.nparams,
            q: self.q,
            anchor: r.matrix,
            cache: RefCell::new(HashMap::new()),
            delta_ranks: RefCell::new(HashMap::new()),
            conditions: RefCell::new(conds),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_unknowns(&self) -> usize {
        self.m
    }

    pub fn anchor_order(&self) -> u32 {
        self.q
    }

    pub fn anchor(&self) -> &ScalarMatrix {
        &self.anchor
    }

    pub fn conditions(&self) -> Vec<GenericityCondition> {
        self.conditions.borrow().clone()
    }

    fn level(&self, ell: u32) -> std::rc::Rc<LevelData> {
        if let Some(d) = self.cache.borrow().get(&ell) {
            return d.clone();
        }
        let size = count_of_degree(self.n, ell) * self.m;
        let equations = if ell < self.q {
            ScalarMatrix::new(self.nparams, size)
        } else if ell == self.q {
            self.anchor.clone()
        } else {
            let mus_lo = level_monomials(self.n, self.q);
            let mus_hi = level_monomials(self.n, ell);
            let idx_hi = level_index(&mus_hi);
            let shifts = indices_of_degree(self.n, ell - self.q);
            let mut mat = ScalarMatrix::new(self.nparams, size);
            for row in self.anchor.rows() {
                for nu in &shifts {
                    let mut out: SparseRow = Vec::with_capacity(row.len());
                    for (c, v) in row {
                        let mu = &mus_lo[*c as usize / self.m];
                        let k = *c as usize % self.m;
                        let shifted = Monomial(crate::combin::index_add(&mu.0, nu));
                        out.push(((idx_hi[&shifted] * self.m + k) as u32, v.clone()));
                    }
                    out.sort_by_key(|(c, _)| *c);
                    mat.push_row(out);
                }
            }
            let r = mat.rref_generic();
            merge_conditions(&mut self.conditions.borrow_mut(), &r.conditions);
            r.matrix
        };
        let (solutions, conds) = equations.kernel_right();
        merge_conditions(&mut self.conditions.borrow_mut(), &conds);
        let data = std::rc::Rc::new(LevelData {
            equations,
            solutions,
        });
        self.cache.borrow_mut().insert(ell, data.clone());
        data
    }

    /// Reduced equations cutting g_ℓ out of S_ℓ ⊗ E.
    pub fn equations_at(&self, ell: u32) -> ScalarMatrix {
        self.level(ell).equations.clone()
    }

    /// A basis of g_ℓ, one solution per row, in the level coordinates.
    pub fn solutions_at(&self, ell: u32) -> ScalarMatrix {
        self.level(ell).solutions.clone()
    }

    pub fn dim_g(&self, ell: u32) -> usize {
        let size = count_of_degree(self.n, ell) * self.m;
        size - self.level(ell).equations.nrows()
    }

    /// Rank of δ: Λ^s ⊗ g_{ℓ+1} → Λ^{s+1} ⊗ g_ℓ. The image automatically
    /// lies in Λ^{s+1} ⊗ g_ℓ, so the rank is computed over the ambient
    /// codomain Λ^{s+1} ⊗ S_ℓ ⊗ E.
    pub fn delta_rank(&self, s: usize, ell: u32) -> usize {
        if let Some(r) = self.delta_ranks.borrow().get(&(s, ell)) {
            return *r;
        }
        let r = self.delta_matrix(s, ell).rank();
        self.delta_ranks.borrow_mut().insert((s, ell), r);
        r
    }

    /// Matrix of δ: Λ^s ⊗ g_{ℓ+1} → Λ^{s+1} ⊗ S_ℓ ⊗ E, one domain basis
    /// element per row. Basis element ω_I ⊗ w maps to
    /// Σ_{i∉I} (−1)^{pos(i in I∪i)} ω_{I∪i} ⊗ (∂_i ⨼ w).
    pub fn delta_matrix(&self, s: usize, ell: u32) -> ScalarMatrix {
        let n = self.n;
        let m = self.m;
        let lev_size = count_of_degree(n, ell) * m;
        let cod_subsets = subsets(n, s + 1);
        let cod_index: HashMap<Vec<usize>, usize> = cod_subsets
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, j)| (j, i))
            .collect();
        let mut mat = ScalarMatrix::new(self.nparams, cod_subsets.len() * lev_size);
        if s + 1 > n {
            return mat;
        }
        let sols = self.solutions_at(ell + 1);
        let mus_hi = level_monomials(n, ell + 1);
        let mus_lo = level_monomials(n, ell);
        let idx_lo = level_index(&mus_lo);
        for set in subsets(n, s) {
            for w in sols.rows() {
                let mut acc: std::collections::BTreeMap<u32, ParamScalar> =
                    std::collections::BTreeMap::new();
                for i in 0..n {
                    if set.contains(&i) {
                        continue;
                    }
                    let mut j = set.clone();
                    let pos = j.iter().position(|&x| x > i).unwrap_or(j.len());
                    j.insert(pos, i);
                    let jdx = cod_index[&j];
                    for (c, v) in w {
                        let mu = &mus_hi[*c as usize / m];
                        let k = *c as usize % m;
                        if mu.0[i] == 0 {
                            continue;
                        }
                        let mut tgt = mu.0.clone();
                        tgt[i] -= 1;
                        let col = (jdx * lev_size + idx_lo[&Monomial(tgt)] * m + k) as u32;
                        let term = if pos % 2 == 1 { v.neg() } else { v.clone() };
                        let e = acc.entry(col).or_insert_with(|| ParamScalar::zero(self.nparams));
                        *e = e.add(&term);
                    }
                }
                // Zero rows stay: row index i*dim(g)+j must keep naming the
                // domain basis element (subset i, solution j).
                let row: SparseRow = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
                mat.push_row(row);
            }
        }
        mat
    }

    /// dim H^{ℓ,s} of the bigraded δ-cohomology: cycles in Λ^s ⊗ g_ℓ modulo
    /// boundaries from Λ^{s−1} ⊗ g_{ℓ+1}.
    pub fn cohomology_dim(&self, ell: u32, s: usize) -> usize {
        let dom = binom(self.n, s) * self.dim_g(ell);
        let out_rank = if ell == 0 {
            0
        } else {
            self.delta_rank(s, ell - 1)
        };
        let in_rank = if s == 0 { 0 } else { self.delta_rank(s - 1, ell) };
        dom - out_rank - in_rank
    }

    /// Smallest r with g_{q+r} involutive (Cartan's test in δ-regular
    /// coordinates), searching levels up to the cap.
    pub fn involutive_level(&self, attempts: usize) -> Result<u32, JanetError> {
        const CAP: u32 = 20;
        for r in 0..=CAP {
            if self.involutive_at(self.q + r, attempts)? {
                return Ok(r);
            }
        }
        Err(JanetError::CapExceeded {
            what: "symbol prolongations without reaching involution",
            cap: CAP as usize,
        })
    }

    /// Intrinsic involutivity of g_ℓ: δ-regularize, then Cartan's test.
    pub fn involutive_at(&self, ell: u32, attempts: usize) -> Result<bool, JanetError> {
        if self.dim_g(ell) == 0 {
            return Ok(true);
        }
        let reg = super::regularize::regularize_family(self, ell, attempts)?;
        Ok(super::tabular::cartan_test(&reg, ell))
    }

    /// g_q is s-acyclic for all s ≤ smax iff H^{ℓ,s} = 0 for those s at
    /// every level q ≤ ℓ < q + r₀, r₀ the involutive level (an involutive
    /// symbol is acyclic everywhere above it).
    pub fn acyclic_through(&self, smax: usize, attempts: usize) -> Result<bool, JanetError> {
        let r0 = self.involutive_level(attempts)?;
        for ell in self.q..self.q + r0 {
            for s in 2..=smax.min(self.n) {
                if self.cohomology_dim(ell, s) != 0 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn is_2_acyclic(&self, attempts: usize) -> Result<bool, JanetError> {
        self.acyclic_through(2, attempts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::testsys::*;

    #[test]
    fn level_order_agrees_with_jet_columns() {
        let cols = crate::combin::JetColumns::new(3, 2, 2);
        let (s, e) = cols.degree_block(2);
        let mus = level_monomials(3, 2);
        assert_eq!(e - s, mus.len() * 2);
        for (j, col) in cols.cols()[s..e].iter().enumerate() {
            assert_eq!(col.0, j % 2);
            assert_eq!(col.1, mus[j / 2]);
        }
    }

    #[test]
    fn delta_squares_to_zero() {
        // On the unconstrained family the solution bases are the ambient
        // bases, so the matrices compose literally: every image row of
        // δ: S₄ → Λ¹⊗S₃ must be killed by δ: Λ¹⊗S₃ → Λ²⊗S₂.
        let fam = SymbolFamily::full(3, 1, 0, 0);
        let da = fam.delta_matrix(0, 3);
        let db = fam.delta_matrix(1, 2);
        assert_eq!(da.ncols(), db.nrows());
        for r in da.rows() {
            assert!(db.covector_apply(r).is_empty());
        }
    }

    #[test]
    fn symbol_dims_and_cohomology_of_2_19() {
        let fam = SymbolFamily::of(&JetSystem::from_operator(&mac_2_19()));
        assert_eq!(fam.dim_g(2), 4);
        assert_eq!(fam.dim_g(3), 4);
        assert_eq!(fam.dim_g(4), 4);
        // The obstruction to 2-acyclicity sits at level 2.
        assert_eq!(fam.cohomology_dim(2, 2), 1);
        assert!(!fam.is_2_acyclic(5).unwrap());
        // One prolongation repairs it: the symbol of R₃ is involutive.
        let r3 = JetSystem::from_operator(&mac_2_19()).prolong(1);
        let fam3 = SymbolFamily::of(&r3);
        assert_eq!(fam3.involutive_level(5).unwrap(), 0);
        assert!(fam3.is_2_acyclic(5).unwrap());
    }

    #[test]
    fn involutive_levels_of_the_worked_symbols() {
        // 2.17 and 2.18 are involutive at their own order (after a
        // δ-regular change found automatically).
        for op in [mac_2_17(), mac_2_18()] {
            let fam = SymbolFamily::of(&JetSystem::from_operator(&op));
            assert_eq!(fam.involutive_level(40).unwrap(), 0);
        }
        // 2.19's symbol becomes involutive after one prolongation.
        let fam = SymbolFamily::of(&JetSystem::from_operator(&mac_2_19()));
        assert_eq!(fam.involutive_level(40).unwrap(), 1);
    }

    #[test]
    fn finite_type_symbol_2_acyclic_but_never_involutive_below_top() {
        // y₃₃, y₂₃ − y₁₁, y₂₂: g₂ is not 2-acyclic; g₃ (dim 1) is 2-acyclic
        // yet not involutive; g₄ = 0.
        let sys = JetSystem::from_operator(&mac_2_22b());
        let fam = SymbolFamily::of(&sys);
        assert_eq!(fam.dim_g(2), 3);
        assert_eq!(fam.dim_g(3), 1);
        assert_eq!(fam.dim_g(4), 0);
        assert!(!fam.is_2_acyclic(40).unwrap());
        let fam3 = SymbolFamily::of(&sys.prolong(1));
        assert_eq!(fam3.involutive_level(40).unwrap(), 1);
        assert!(fam3.is_2_acyclic(40).unwrap());
    }

    #[test]
    fn full_family_reproduces_binomial_dimensions() {
        let fam = SymbolFamily::full(3, 1, 0, 2);
        assert_eq!(fam.dim_g(2), 6);
        assert_eq!(fam.dim_g(3), 10);
        assert_eq!(fam.dim_g(1), 3);
        // Full symbols: the δ-complex is exact away from the edges.
        assert_eq!(fam.cohomology_dim(2, 2), 0);
        assert_eq!(fam.delta_rank(0, 2), 10);
    }
}
