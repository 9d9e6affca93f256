//! Gröbner bases for row modules of operator matrices.
//!
//! The rows of an operator matrix generate a submodule of the free module
//! K[d]^p. A reduced basis for that submodule decides membership through the
//! division algorithm, and the division certificates collected while running
//! Buchberger's completion assemble into a generating set of syzygies
//! (Schreyer's construction, pulled back through the transformation between
//! the input rows and the basis). None of this touches jet coordinates, so
//! the route is an independent check on the kernel-based compatibility sweep
//! and the workhorse behind the torsion and parametrization tests.
//!
//! Term order: graded reverse lexicographic on the derivative monomials,
//! with position over term across components (lower component index wins).
//! Basis elements are kept monic, so the reduced basis is canonical.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::combin::indices_up_to;
use crate::diffop::{DiffOperator, DiffPolynomial};
use crate::field::poly::Monomial;

/// Graded reverse lexicographic order: higher degree wins; at equal degree
/// the monomial with the smaller last differing exponent is the larger one.
fn cmp_grevlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    if da != db {
        return da.cmp(&db);
    }
    for i in (0..a.len()).rev() {
        if a[i] != b[i] {
            return b[i].cmp(&a[i]);
        }
    }
    Ordering::Equal
}

/// Position-over-term order on module terms (component, monomial).
fn cmp_term(ca: usize, ma: &[u32], cb: usize, mb: &[u32]) -> Ordering {
    cb.cmp(&ca).then_with(|| cmp_grevlex(ma, mb))
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn mono_sub(b: &[u32], a: &[u32]) -> Vec<u32> {
    b.iter().zip(a).map(|(x, y)| x - y).collect()
}

fn mono_lcm(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn row_is_zero(row: &[DiffPolynomial]) -> bool {
    row.iter().all(|p| p.is_zero())
}

/// Largest term of a module row under the position-over-term order.
fn lead_term(row: &[DiffPolynomial]) -> Option<(usize, Monomial)> {
    let mut best: Option<(usize, Monomial)> = None;
    for (comp, p) in row.iter().enumerate() {
        for (m, _) in p.terms() {
            let better = match &best {
                None => true,
                Some((bc, bm)) => cmp_term(comp, &m.0, *bc, &bm.0) == Ordering::Greater,
            };
            if better {
                best = Some((comp, m.clone()));
            }
        }
    }
    best
}

/// All terms of a row, largest first.
fn terms_desc(row: &[DiffPolynomial]) -> Vec<(usize, Monomial)> {
    let mut out = Vec::new();
    for (comp, p) in row.iter().enumerate() {
        for (m, _) in p.terms() {
            out.push((comp, m.clone()));
        }
    }
    out.sort_by(|x, y| cmp_term(y.0, &y.1 .0, x.0, &x.1 .0));
    out
}

struct GbElem {
    row: Vec<DiffPolynomial>,
    /// row = Σ_j cofactor[j] · gens[j]; maintained through every reduction.
    cofactor: Vec<DiffPolynomial>,
    lead_comp: usize,
    lead_mono: Monomial,
}

/// Reduced monic Gröbner basis of the submodule of K[d]^ncomps generated by
/// a list of rows, with cofactors over the original generators.
pub struct ModuleBasis {
    n: usize,
    nparams: usize,
    ncomps: usize,
    gens: Vec<Vec<DiffPolynomial>>,
    basis: Vec<GbElem>,
}

impl ModuleBasis {
    pub fn new(
        n: usize,
        nparams: usize,
        ncomps: usize,
        gens: Vec<Vec<DiffPolynomial>>,
    ) -> ModuleBasis {
        for g in &gens {
            assert_eq!(g.len(), ncomps);
        }
        let mut mb = ModuleBasis { n, nparams, ncomps, gens, basis: Vec::new() };
        mb.buchberger();
        mb.interreduce();
        mb
    }

    /// Basis of the row module of an operator: one generator per matrix row,
    /// living in K[d]^{num_sources}.
    pub fn of_rows(op: &DiffOperator) -> ModuleBasis {
        ModuleBasis::new(op.n(), op.nparams(), op.num_sources(), op.rows().to_vec())
    }

    pub fn ncomps(&self) -> usize {
        self.ncomps
    }

    pub fn num_gens(&self) -> usize {
        self.gens.len()
    }

    pub fn basis(&self) -> Vec<Vec<DiffPolynomial>> {
        self.basis.iter().map(|e| e.row.clone()).collect()
    }

    /// Cofactors of basis element i over the original generators.
    pub fn cofactors(&self, i: usize) -> &[DiffPolynomial] {
        &self.basis[i].cofactor
    }

    fn push_monic(&mut self, mut row: Vec<DiffPolynomial>, mut cofactor: Vec<DiffPolynomial>) {
        let (comp, mono) = lead_term(&row).expect("nonzero element");
        let lc = row[comp].coeff(&mono.0);
        if !lc.is_one() {
            let inv = lc.inv();
            for p in row.iter_mut() {
                *p = p.scale(&inv);
            }
            for p in cofactor.iter_mut() {
                *p = p.scale(&inv);
            }
        }
        self.basis.push(GbElem { row, cofactor, lead_comp: comp, lead_mono: mono });
    }

    /// Full normal form against the current basis; returns the remainder and
    /// the division quotients (row = Σ q_k · basis_k + remainder). Basis
    /// elements are monic, so no coefficient inversions are needed.
    fn reduce_full(
        &self,
        row: &[DiffPolynomial],
        exclude: Option<usize>,
    ) -> (Vec<DiffPolynomial>, Vec<DiffPolynomial>) {
        let mut f = row.to_vec();
        let mut q = vec![DiffPolynomial::zero(self.n, self.nparams); self.basis.len()];
        'outer: loop {
            for (comp, mono) in terms_desc(&f) {
                for (k, b) in self.basis.iter().enumerate() {
                    if exclude == Some(k) {
                        continue;
                    }
                    if b.lead_comp == comp && divides(&b.lead_mono.0, &mono.0) {
                        let c = f[comp].coeff(&mono.0);
                        let factor = DiffPolynomial::from_term(
                            self.n,
                            mono_sub(&mono.0, &b.lead_mono.0),
                            c,
                        );
                        for l in 0..self.ncomps {
                            f[l] = f[l].sub(&factor.mul(&b.row[l]));
                        }
                        q[k] = q[k].add(&factor);
                        continue 'outer;
                    }
                }
            }
            break;
        }
        (f, q)
    }

    fn buchberger(&mut self) {
        for (j, g) in self.gens.clone().into_iter().enumerate() {
            if row_is_zero(&g) {
                continue;
            }
            let mut cof = vec![DiffPolynomial::zero(self.n, self.nparams); self.gens.len()];
            cof[j] = DiffPolynomial::one(self.n, self.nparams);
            self.push_monic(g, cof);
        }
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        let enqueue = |pairs: &mut Vec<(usize, usize)>, basis: &[GbElem], t: usize| {
            for s in 0..t {
                if basis[s].lead_comp == basis[t].lead_comp {
                    pairs.push((s, t));
                }
            }
        };
        for t in 0..self.basis.len() {
            enqueue(&mut pairs, &self.basis, t);
        }
        while !pairs.is_empty() {
            // Normal selection: smallest lcm degree first.
            let deg = |p: &(usize, usize)| -> u32 {
                mono_lcm(&self.basis[p.0].lead_mono.0, &self.basis[p.1].lead_mono.0)
                    .iter()
                    .sum()
            };
            let best = (0..pairs.len()).min_by_key(|&i| deg(&pairs[i])).unwrap();
            let (i, j) = pairs.swap_remove(best);
            let gamma = mono_lcm(&self.basis[i].lead_mono.0, &self.basis[j].lead_mono.0);
            let si = mono_sub(&gamma, &self.basis[i].lead_mono.0);
            let sj = mono_sub(&gamma, &self.basis[j].lead_mono.0);
            let mut s_row = Vec::with_capacity(self.ncomps);
            for l in 0..self.ncomps {
                s_row.push(self.basis[i].row[l].shift(&si).sub(&self.basis[j].row[l].shift(&sj)));
            }
            let (nf, q) = self.reduce_full(&s_row, None);
            if row_is_zero(&nf) {
                continue;
            }
            let mut cof = Vec::with_capacity(self.gens.len());
            for g in 0..self.gens.len() {
                let mut c = self.basis[i].cofactor[g]
                    .shift(&si)
                    .sub(&self.basis[j].cofactor[g].shift(&sj));
                for (k, qk) in q.iter().enumerate() {
                    c = c.sub(&qk.mul(&self.basis[k].cofactor[g]));
                }
                cof.push(c);
            }
            self.push_monic(nf, cof);
            let t = self.basis.len() - 1;
            enqueue(&mut pairs, &self.basis, t);
        }
    }

    /// Drop elements whose lead is divisible by another's, then tail-reduce
    /// the survivors against each other and sort by descending lead.
    fn interreduce(&mut self) {
        let mut keep = vec![true; self.basis.len()];
        for i in 0..self.basis.len() {
            for j in 0..self.basis.len() {
                if i != j
                    && keep[j]
                    && keep[i]
                    && self.basis[j].lead_comp == self.basis[i].lead_comp
                    && divides(&self.basis[j].lead_mono.0, &self.basis[i].lead_mono.0)
                {
                    keep[i] = false;
                    break;
                }
            }
        }
        let mut kept = Vec::new();
        for (i, e) in self.basis.drain(..).enumerate() {
            if keep[i] {
                kept.push(e);
            }
        }
        self.basis = kept;
        loop {
            let mut changed = false;
            for i in 0..self.basis.len() {
                let (nf, q) = self.reduce_full(&self.basis[i].row.clone(), Some(i));
                if nf != self.basis[i].row {
                    changed = true;
                    let mut cof = self.basis[i].cofactor.clone();
                    for (g, c) in cof.iter_mut().enumerate() {
                        for (k, qk) in q.iter().enumerate() {
                            *c = c.sub(&qk.mul(&self.basis[k].cofactor[g]));
                        }
                    }
                    self.basis[i].row = nf;
                    self.basis[i].cofactor = cof;
                }
            }
            if !changed {
                break;
            }
        }
        self.basis.sort_by(|a, b| {
            cmp_term(b.lead_comp, &b.lead_mono.0, a.lead_comp, &a.lead_mono.0)
        });
    }

    /// Unique normal form of a row modulo the module (K-linear in the row).
    pub fn normal_form(&self, row: &[DiffPolynomial]) -> Vec<DiffPolynomial> {
        assert_eq!(row.len(), self.ncomps);
        self.reduce_full(row, None).0
    }

    pub fn contains_row(&self, row: &[DiffPolynomial]) -> bool {
        row_is_zero(&self.normal_form(row))
    }

    pub fn contains_all(&self, rows: &[Vec<DiffPolynomial>]) -> bool {
        rows.iter().all(|r| self.contains_row(r))
    }

    /// Generators of the syzygy module of the original rows, as elements of
    /// K[d]^{num_gens}: Schreyer generators of the basis syzygies pulled back
    /// through the cofactor matrix, plus the rows of I − U·T where U divides
    /// each generator by the basis and T is the cofactor matrix.
    pub fn syzygies(&self) -> Vec<Vec<DiffPolynomial>> {
        let k = self.gens.len();
        let zero = DiffPolynomial::zero(self.n, self.nparams);
        let mut out: Vec<Vec<DiffPolynomial>> = Vec::new();
        // Rows of I − U·T.
        for (i, g) in self.gens.iter().enumerate() {
            let (nf, u) = self.reduce_full(g, None);
            assert!(row_is_zero(&nf), "generator escaped its own module");
            let mut row = vec![zero.clone(); k];
            row[i] = DiffPolynomial::one(self.n, self.nparams);
            for (l, entry) in row.iter_mut().enumerate() {
                for (j, uj) in u.iter().enumerate() {
                    *entry = entry.sub(&uj.mul(&self.basis[j].cofactor[l]));
                }
            }
            if !row_is_zero(&row) {
                out.push(row);
            }
        }
        // Schreyer generators σ of Syz(basis), pushed to σ·T.
        for i in 0..self.basis.len() {
            for j in (i + 1)..self.basis.len() {
                if self.basis[i].lead_comp != self.basis[j].lead_comp {
                    continue;
                }
                let gamma = mono_lcm(&self.basis[i].lead_mono.0, &self.basis[j].lead_mono.0);
                let si = mono_sub(&gamma, &self.basis[i].lead_mono.0);
                let sj = mono_sub(&gamma, &self.basis[j].lead_mono.0);
                let mut s_row = Vec::with_capacity(self.ncomps);
                for l in 0..self.ncomps {
                    s_row.push(
                        self.basis[i].row[l].shift(&si).sub(&self.basis[j].row[l].shift(&sj)),
                    );
                }
                let (nf, q) = self.reduce_full(&s_row, None);
                assert!(row_is_zero(&nf), "basis is not complete");
                // σ = d^{si} e_i − d^{sj} e_j − Σ q_k e_k over the basis.
                let mut sigma = q.iter().map(|p| p.neg()).collect::<Vec<_>>();
                sigma[i] = sigma[i].add(&DiffPolynomial::one(self.n, self.nparams).shift(&si));
                sigma[j] = sigma[j].sub(&DiffPolynomial::one(self.n, self.nparams).shift(&sj));
                let mut row = vec![zero.clone(); k];
                for (l, entry) in row.iter_mut().enumerate() {
                    for (v, sv) in sigma.iter().enumerate() {
                        *entry = entry.add(&sv.mul(&self.basis[v].cofactor[l]));
                    }
                }
                if !row_is_zero(&row) {
                    out.push(row);
                }
            }
        }
        if cfg!(debug_assertions) {
            for s in &out {
                let mut acc = vec![zero.clone(); self.ncomps];
                for (j, sj) in s.iter().enumerate() {
                    for l in 0..self.ncomps {
                        acc[l] = acc[l].add(&sj.mul(&self.gens[j][l]));
                    }
                }
                debug_assert!(row_is_zero(&acc), "syzygy fails to annihilate the generators");
            }
        }
        out
    }

    /// Least-order nonzero P with P·row in the module, searching operator
    /// orders up to max_order; None if no certificate exists within the
    /// bound. The certificate is exact: a kernel vector of the normal-form
    /// matrix gives Σ c_ν NF(d^ν·row) = 0, and K-linearity of the normal
    /// form turns that into NF(P·row) = 0.
    pub fn annihilator(&self, row: &[DiffPolynomial], max_order: u32) -> Option<DiffPolynomial> {
        assert_eq!(row.len(), self.ncomps);
        if self.contains_row(row) {
            return Some(DiffPolynomial::one(self.n, self.nparams));
        }
        let mut nf_cache: BTreeMap<Vec<u32>, Vec<DiffPolynomial>> = BTreeMap::new();
        for cap in 1..=max_order {
            let nus = indices_up_to(self.n, cap);
            for nu in &nus {
                nf_cache.entry(nu.clone()).or_insert_with(|| {
                    let shifted: Vec<DiffPolynomial> =
                        row.iter().map(|p| p.shift(nu)).collect();
                    self.normal_form(&shifted)
                });
            }
            let mut col_index: BTreeMap<(usize, Vec<u32>), u32> = BTreeMap::new();
            for nu in &nus {
                for (comp, p) in nf_cache[nu].iter().enumerate() {
                    for (m, _) in p.terms() {
                        let ncols = col_index.len() as u32;
                        col_index.entry((comp, m.0.clone())).or_insert(ncols);
                    }
                }
            }
            let mut mat =
                crate::field::matrix::ScalarMatrix::new(self.nparams, col_index.len());
            for nu in &nus {
                let mut entries = Vec::new();
                for (comp, p) in nf_cache[nu].iter().enumerate() {
                    for (m, c) in p.terms() {
                        entries.push((col_index[&(comp, m.0.clone())], c.clone()));
                    }
                }
                entries.sort_by_key(|e| e.0);
                mat.push_row(entries);
            }
            let (kernel, _) = mat.kernel_left();
            if kernel.nrows() > 0 {
                let mut p = DiffPolynomial::zero(self.n, self.nparams);
                for (col, c) in kernel.row(0) {
                    p = p.add(&DiffPolynomial::from_term(
                        self.n,
                        nus[*col as usize].clone(),
                        c.clone(),
                    ));
                }
                let (comp, mono) = lead_term(std::slice::from_ref(&p)).expect("nonzero kernel");
                debug_assert_eq!(comp, 0);
                let lc = p.coeff(&mono.0);
                let p = p.scale(&lc.inv());
                debug_assert!({
                    let scaled: Vec<DiffPolynomial> =
                        row.iter().map(|q| q.mul(&p)).collect();
                    self.contains_row(&scaled)
                });
                return Some(p);
            }
        }
        None
    }
}

/// Completed basis of the submodule of K[d]^ncomps the rows generate.
pub fn row_module(
    n: usize,
    nparams: usize,
    ncomps: usize,
    rows: &[Vec<DiffPolynomial>],
) -> ModuleBasis {
    ModuleBasis::new(n, nparams, ncomps, rows.to_vec())
}

/// Mutual membership: the two row lists generate the same submodule of
/// K[d]^ncomps.
pub fn same_row_module(
    n: usize,
    nparams: usize,
    ncomps: usize,
    a: &[Vec<DiffPolynomial>],
    b: &[Vec<DiffPolynomial>],
) -> bool {
    let ba = ModuleBasis::new(n, nparams, ncomps, a.to_vec());
    let bb = ModuleBasis::new(n, nparams, ncomps, b.to_vec());
    ba.contains_all(b) && bb.contains_all(a)
}

/// Indices of rows lying in the module generated by the remaining rows.
pub fn redundant_rows(
    n: usize,
    nparams: usize,
    ncomps: usize,
    rows: &[Vec<DiffPolynomial>],
) -> Vec<usize> {
    let mut out = Vec::new();
    for i in 0..rows.len() {
        let others: Vec<Vec<DiffPolynomial>> = rows
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, r)| r.clone())
            .collect();
        if ModuleBasis::new(n, nparams, ncomps, others).contains_row(&rows[i]) {
            out.push(i);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::testsys::*;
    use crate::sequences::compatibility_operator;

    fn poly(n: usize, terms: &[(&[u32], i64)]) -> DiffPolynomial {
        row(n, terms)
    }

    #[test]
    fn reduced_basis_of_the_coupled_pair_is_the_textbook_triple() {
        let f1 = poly(2, &[(&[2, 0], 1), (&[0, 1], -1)]);
        let f2 = poly(2, &[(&[1, 1], 1), (&[1, 0], -1)]);
        let mb = ModuleBasis::new(2, 0, 1, vec![vec![f1.clone()], vec![f2.clone()]]);
        let expected = vec![
            vec![poly(2, &[(&[2, 0], 1), (&[0, 1], -1)])],
            vec![poly(2, &[(&[1, 1], 1), (&[1, 0], -1)])],
            vec![poly(2, &[(&[0, 2], 1), (&[0, 1], -1)])],
        ];
        assert_eq!(mb.basis(), expected);
        // Cofactor bookkeeping: every basis element expands over the inputs.
        let gens = [vec![f1], vec![f2]];
        for (i, b) in mb.basis().iter().enumerate() {
            let cof = mb.cofactors(i);
            let mut acc = DiffPolynomial::zero(2, 0);
            for (j, g) in gens.iter().enumerate() {
                acc = acc.add(&cof[j].mul(&g[0]));
            }
            assert_eq!(acc, b[0]);
        }
    }

    #[test]
    fn normal_forms_classify_membership_in_the_coupled_pair() {
        let f1 = poly(2, &[(&[2, 0], 1), (&[0, 1], -1)]);
        let f2 = poly(2, &[(&[1, 1], 1), (&[1, 0], -1)]);
        let mb = ModuleBasis::new(2, 0, 1, vec![vec![f1], vec![f2]]);
        // d₂³ − d₂ = (d₂ + 1)(d₂² − d₂) lies in the module.
        assert!(mb.contains_row(&[poly(2, &[(&[0, 3], 1), (&[0, 1], -1)])]));
        // d₁³ reduces to d₁, so neither is a member.
        let nf = mb.normal_form(&[poly(2, &[(&[3, 0], 1)])]);
        assert_eq!(nf, vec![poly(2, &[(&[1, 0], 1)])]);
        assert!(!mb.contains_row(&[poly(2, &[(&[0, 1], 1)])]));
        // The normal form is already fully reduced.
        assert_eq!(mb.normal_form(&nf), nf);
    }

    #[test]
    fn koszul_relations_of_the_mixed_derivative_triple() {
        let gens = vec![
            vec![poly(3, &[(&[1, 1, 0], 1)])],
            vec![poly(3, &[(&[1, 0, 1], 1)])],
            vec![poly(3, &[(&[0, 1, 1], 1)])],
        ];
        let mb = ModuleBasis::new(3, 0, 1, gens.clone());
        let syz = mb.syzygies();
        for s in &syz {
            let mut acc = DiffPolynomial::zero(3, 0);
            for (j, g) in gens.iter().enumerate() {
                acc = acc.add(&s[j].mul(&g[0]));
            }
            assert!(acc.is_zero());
        }
        let zero = DiffPolynomial::zero(3, 0);
        let d1 = DiffPolynomial::d(3, 0, 0);
        let d2 = DiffPolynomial::d(3, 0, 1);
        let d3 = DiffPolynomial::d(3, 0, 2);
        let known = vec![
            vec![d3.clone(), zero.clone(), d1.neg()],
            vec![zero.clone(), d2.clone(), d1.neg()],
        ];
        assert!(same_row_module(3, 0, 3, &syz, &known));
        // A single nonzero generator over a domain has no relations.
        assert!(ModuleBasis::new(3, 0, 1, vec![vec![d1.clone()]]).syzygies().is_empty());
        // A zero generator contributes the unit relation on its slot.
        let syz0 = ModuleBasis::new(3, 0, 1, vec![vec![zero.clone()]]).syzygies();
        assert_eq!(syz0, vec![vec![DiffPolynomial::one(3, 0)]]);
        assert!(redundant_rows(3, 0, 3, &known).is_empty());
    }

    #[test]
    fn kernel_sweep_and_division_certificates_find_the_same_relations() {
        for op in [mac_2_17(), mac_2_18(), mac_2_19(), mac_2_20(), mac_2_22b()] {
            let cc = compatibility_operator(&op, 8, 40).unwrap();
            assert!(cc.saturated);
            let syz = ModuleBasis::of_rows(&op).syzygies();
            assert!(same_row_module(
                op.n(),
                0,
                op.num_targets(),
                cc.operator.rows(),
                &syz
            ));
        }
    }

    #[test]
    fn bounded_annihilators_certify_the_quotient_classes() {
        let mb = ModuleBasis::new(1, 0, 1, vec![vec![poly(1, &[(&[2], 1)])]]);
        let d1 = DiffPolynomial::d(1, 0, 0);
        assert_eq!(mb.annihilator(&[d1.clone()], 4), Some(d1.clone()));
        assert_eq!(
            mb.annihilator(&[DiffPolynomial::one(1, 0)], 4),
            Some(poly(1, &[(&[2], 1)]))
        );
        assert_eq!(
            mb.annihilator(&[poly(1, &[(&[3], 1)])], 4),
            Some(DiffPolynomial::one(1, 0))
        );
        assert_eq!(mb.annihilator(&[d1], 0), None);
        // Across components: (0,1) is not bounded by the row (d₁, 0).
        let zero = DiffPolynomial::zero(2, 0);
        let free = ModuleBasis::new(2, 0, 2, vec![vec![DiffPolynomial::d(2, 0, 0), zero.clone()]]);
        assert_eq!(free.annihilator(&[zero, DiffPolynomial::one(2, 0)], 4), None);
        // (d₂, 0) is bounded: d₁·(d₂, 0) = d₂·(d₁, 0).
        assert_eq!(
            free.annihilator(&[DiffPolynomial::d(2, 0, 1), DiffPolynomial::zero(2, 0)], 3),
            Some(DiffPolynomial::d(2, 0, 0))
        );
    }
}
