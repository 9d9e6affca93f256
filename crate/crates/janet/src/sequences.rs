//! Compatibility conditions and the differential sequences they assemble
//! into.
//!
//! For an involutive system three rows of vector-space dimensions are kept
//! side by side: the Janet row `F₀ … Fₙ` counting the successive
//! compatibility bundles of the operator, the Spencer row `C₀ … Cₙ` built
//! from the solution family of its symbol, and the full-jet row
//! `C₀(E) … Cₙ(E)` of the ambient bundle, which needs no equations at all
//! and has a closed form.  The rows fit in a commutative diagram whose
//! columns are short exact sequences, so the full-jet row must equal the
//! other two added entrywise; [`fundamental_diagram`] checks that identity
//! together with a second, independent rank route to the Janet row and the
//! jet-level exactness defects of the resolution.
//!
//! [`compatibility_operator`] constructs the first syzygy operator `D₁` of
//! an operator `D` — rows spanning all relations `Λ(D u) ≡ 0` — by sweeping
//! the left kernels of the prolongations of `D` order by order.  The
//! stopping rule comes from the completion counters: when the completion of
//! the system needed `r` prolongations and `s` strict projections, every
//! generating relation has order at most `r + s + 1`, so the sweep is
//! complete once a round at or past that bound produces nothing new.

use std::collections::{BTreeMap, BTreeSet};

use crate::combin::{
    binom, count_of_degree, count_up_to, index_add, indices_of_degree, indices_up_to, JetColumns,
};
use crate::diffop::{default_labels, unit_weights, DiffOperator, DiffPolynomial};
use crate::error::JanetError;
use crate::field::matrix::{normalize_row_content, ScalarMatrix, SparseRow};
use crate::field::scalar::{merge_conditions, GenericityCondition, ParamScalar};
use crate::jets::delta::{subsets, SymbolFamily};
use crate::jets::pp::complete;
use crate::jets::regularize::regularize_system;
use crate::jets::tabular::JanetTabular;
use crate::jets::JetSystem;

/// Which chain a [`SequenceReport`] describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SequenceKind {
    /// `0 → Θ → E → F₀ → F₁ → … → Fₙ → 0` over an involutive operator.
    Janet,
    /// Spencer bundles of the solution family of the symbol.
    Spencer,
    /// Spencer bundles of the full jet bundle, no equations imposed.
    Hybrid,
    /// A chain assembled from explicit operators.
    Resolution,
}

/// One dimension chain, the operator orders between consecutive members,
/// and the alternating sum of the dimensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceReport {
    pub kind: SequenceKind,
    pub dims: Vec<usize>,
    pub orders: Vec<u32>,
    pub euler_poincare: i64,
}

/// Alternating sum `±dims[0] ∓ dims[1] ± …`, starting with `+` when
/// `signs_start_positive` holds.  An empty chain sums to zero.
pub fn euler_poincare(dims: &[usize], signs_start_positive: bool) -> i64 {
    let mut sign = if signs_start_positive { 1i64 } else { -1 };
    let mut acc = 0i64;
    for &d in dims {
        acc += sign * d as i64;
        sign = -sign;
    }
    acc
}

/// Differential rank of the operator: unknowns minus the rank of the
/// principal symbol at a generic covector.  Every resolution of the
/// operator has this as its alternating dimension sum.
pub fn differential_rank(op: &DiffOperator) -> usize {
    op.num_sources() - op.generic_chi_rank()
}

/// A compatibility operator `D₁` with `D₁ ∘ D = 0`, together with the
/// bookkeeping of how its generating rows were found.
#[derive(Clone, Debug)]
pub struct CCResult {
    /// One target row per generating relation, acting on the targets of
    /// the analysed operator.
    pub operator: DiffOperator,
    /// Order of each generator, ascending.
    pub generator_orders: Vec<u32>,
    /// Generator count per order.
    pub per_order_counts: BTreeMap<u32, usize>,
    /// First sweep round at or past the completion bound that produced no
    /// fresh generator.
    pub saturation_order: u32,
    /// False when `max_order` ran out before that round was reached; the
    /// generators found so far are then only a partial set.
    pub saturated: bool,
    /// Genericity conditions accumulated by the eliminations.
    pub conditions: Vec<GenericityCondition>,
}

// Sort a remapped row into ascending column order.
fn sorted_row(mut entries: Vec<(u32, ParamScalar)>) -> SparseRow {
    entries.sort_by_key(|e| e.0);
    entries
}

/// Generators of all relations `Λ(D u) ≡ 0` among the targets of `op`,
/// returned as an operator with one target row per generator.  Rounds
/// `1, 2, …` collect the left kernel of the order-`r` prolongation, reduce
/// it modulo all derivative shifts of the generators already found, and
/// keep the reduced complement; the sweep stops at the first empty round
/// at or past the bound derived from the completion counters, or gives up
/// (`saturated = false`) at `max_order`.
pub fn compatibility_operator(
    op: &DiffOperator,
    max_order: u32,
    attempts: usize,
) -> Result<CCResult, JanetError> {
    let n = op.n();
    let np = op.nparams();
    let p = op.num_targets();
    if max_order == 0 {
        return Err(JanetError::InvalidInput(
            "compatibility sweep needs max_order at least one".into(),
        ));
    }
    if p == 0 {
        let empty = DiffOperator::new(n, np, vec![], vec![], vec![]);
        return Ok(CCResult {
            operator: empty,
            generator_orders: vec![],
            per_order_counts: BTreeMap::new(),
            saturation_order: 0,
            saturated: true,
            conditions: vec![],
        });
    }
    if op.is_zero() {
        // Every covector annihilates the zero operator: the identity on its
        // targets generates all relations, in order zero.
        let entries = (0..p)
            .map(|i| {
                (0..p)
                    .map(|j| {
                        if i == j {
                            DiffPolynomial::one(n, np)
                        } else {
                            DiffPolynomial::zero(n, np)
                        }
                    })
                    .collect()
            })
            .collect();
        let cc = DiffOperator::with_weights(
            n,
            np,
            entries,
            op.target_labels().to_vec(),
            default_labels("c", p),
            op.target_weights().to_vec(),
            unit_weights(np, p),
        );
        return Ok(CCResult {
            operator: cc,
            generator_orders: vec![0; p],
            per_order_counts: BTreeMap::from([(0, p)]),
            saturation_order: 0,
            saturated: true,
            conditions: vec![],
        });
    }
    if op.order() == 0 {
        return Err(JanetError::InvalidInput(
            "compatibility sweep expects a differential operator of order at least one".into(),
        ));
    }

    let comp = complete(&JetSystem::from_operator(op), attempts)?;
    let bound = comp.prolongations + comp.projections + 1;
    let mut conditions = comp.conditions.clone();
    // Generators as (discovery round, monic reduced row), the row written
    // over the jet columns of covectors of that order.
    let mut gens: Vec<(u32, SparseRow)> = Vec::new();
    let mut saturated = false;
    let mut saturation_order = bound;

    for r in 1..=max_order {
        let (pmat, _) = op.prolongation_matrix(r);
        let coords = op.prolongation_rows(r);
        let (lk, kc) = pmat.kernel_left();
        merge_conditions(&mut conditions, &kc);
        let gcols = JetColumns::new(n, p, r);
        // Kernel rows live on prolongation row indices (τ, ν); rewrite them
        // over the canonical covector columns of order ≤ r.
        let mut rewritten = ScalarMatrix::new(np, gcols.len());
        for krow in lk.rows() {
            let entries = krow
                .iter()
                .map(|(i, c)| {
                    let (tau, nu) = &coords[*i as usize];
                    (gcols.col_index(*tau, &nu.0) as u32, c.clone())
                })
                .collect();
            rewritten.push_row(sorted_row(entries));
        }
        let rr = rewritten.rref_generic();
        merge_conditions(&mut conditions, &rr.conditions);
        // Span of all derivative shifts of the generators found so far.
        let mut span = ScalarMatrix::new(np, gcols.len());
        for (gr, grow) in &gens {
            let gc = JetColumns::new(n, p, *gr);
            for shift in indices_up_to(n, r - gr) {
                let entries = grow
                    .iter()
                    .map(|(c, coef)| {
                        let (tau, mu) = gc.col(*c as usize);
                        let target = index_add(&mu.0, &shift);
                        (gcols.col_index(*tau, &target) as u32, coef.clone())
                    })
                    .collect();
                span.push_row(sorted_row(entries));
            }
        }
        let sp = span.rref_generic();
        merge_conditions(&mut conditions, &sp.conditions);
        let covered: BTreeSet<u32> = sp.pivot_cols.iter().copied().collect();
        // Shifted generators are themselves relations, so the covered
        // pivots are a subset of the kernel pivots and the reduced
        // complement counts exactly the fresh generators.
        debug_assert!(covered.iter().all(|c| rr.pivot_cols.contains(c)));
        let mut fresh = 0usize;
        for rrow in rr.matrix.rows() {
            if !covered.contains(&rrow[0].0) {
                gens.push((r, normalize_row_content(rrow, np)));
                fresh += 1;
            }
        }
        if fresh == 0 && r >= bound {
            saturated = true;
            saturation_order = r;
            break;
        }
    }

    // Assemble the operator: decode each stored row in the columns of its
    // own discovery round.
    let mut entries: Vec<Vec<DiffPolynomial>> = Vec::new();
    let mut generator_orders: Vec<u32> = Vec::new();
    let mut per_order_counts: BTreeMap<u32, usize> = BTreeMap::new();
    for (gr, grow) in &gens {
        let gc = JetColumns::new(n, p, *gr);
        let mut orow = vec![DiffPolynomial::zero(n, np); p];
        for (c, coef) in grow {
            let (tau, nu) = gc.col(*c as usize);
            orow[*tau] = orow[*tau].add(&DiffPolynomial::from_term(n, nu.0.clone(), coef.clone()));
        }
        let ord = orow.iter().map(|e| e.order()).max().unwrap_or(0);
        generator_orders.push(ord);
        *per_order_counts.entry(ord).or_insert(0) += 1;
        entries.push(orow);
    }
    generator_orders.sort_unstable();
    let k = entries.len();
    let cc = DiffOperator::with_weights(
        n,
        np,
        entries,
        op.target_labels().to_vec(),
        default_labels("c", k),
        op.target_weights().to_vec(),
        unit_weights(np, k),
    );
    assert!(
        cc.compose(op).is_zero(),
        "compatibility rows must annihilate the operator identically"
    );
    Ok(CCResult {
        operator: cc,
        generator_orders,
        per_order_counts,
        saturation_order,
        saturated,
        conditions,
    })
}

/// Iterated compatibility chain `[D₁, D₂, …]` of `op`, at most `length`
/// steps, stopping after the first member with no generators.
pub fn cc_chain(
    op: &DiffOperator,
    length: usize,
    max_order: u32,
    attempts: usize,
) -> Result<Vec<CCResult>, JanetError> {
    if length == 0 {
        return Err(JanetError::InvalidInput(
            "compatibility chain needs length at least one".into(),
        ));
    }
    let mut out: Vec<CCResult> = Vec::new();
    let mut cur = op.clone();
    for _ in 0..length {
        let cc = compatibility_operator(&cur, max_order, attempts)?;
        let next = cc.operator.clone();
        out.push(cc);
        if next.num_targets() == 0 {
            break;
        }
        cur = next;
    }
    Ok(out)
}

/// Dimension chain `sources of D → targets of D → targets of D₁ → …` over
/// an operator and its compatibility chain.
pub fn resolution_report(op: &DiffOperator, chain: &[CCResult]) -> SequenceReport {
    let mut dims = vec![op.num_sources(), op.num_targets()];
    let mut orders = vec![op.order()];
    for cc in chain {
        if cc.operator.num_targets() == 0 {
            break;
        }
        dims.push(cc.operator.num_targets());
        orders.push(cc.operator.order());
    }
    let ep = euler_poincare(&dims, true);
    SequenceReport {
        kind: SequenceKind::Resolution,
        dims,
        orders,
        euler_poincare: ep,
    }
}

// The dimension chains below are only meaningful over an involutive system:
// the symbol must pass the Cartan test at the anchor order and the
// prolongation must project back onto the system itself.
fn require_involutive(sys: &JetSystem, attempts: usize) -> Result<(), JanetError> {
    let fam = SymbolFamily::of(sys);
    if !fam.involutive_at(sys.order(), attempts)? {
        return Err(JanetError::InvalidInput(format!(
            "symbol at order {} fails the Cartan test; complete the system first",
            sys.order()
        )));
    }
    if sys.prolong(1).project(sys.order()).dim() != sys.dim() {
        return Err(JanetError::InvalidInput(
            "prolongation projects onto a strictly smaller system; complete the system first"
                .into(),
        ));
    }
    Ok(())
}

/// Janet row of an involutive system: `[m, F₀, F₁, …]` with trailing zero
/// bundles trimmed, orders `[q, 1, 1, …]`.
pub fn janet_sequence(sys: &JetSystem, attempts: usize) -> Result<SequenceReport, JanetError> {
    require_involutive(sys, attempts)?;
    let (reg, _) = regularize_system(sys, attempts)?;
    let mut dims = vec![sys.num_unknowns()];
    dims.extend(JanetTabular::of(&reg).f_dims());
    while dims.len() > 1 && *dims.last().unwrap() == 0 {
        dims.pop();
    }
    let mut orders = vec![sys.order()];
    orders.extend(std::iter::repeat(1).take(dims.len().saturating_sub(2)));
    let ep = euler_poincare(&dims, true);
    Ok(SequenceReport {
        kind: SequenceKind::Janet,
        dims,
        orders,
        euler_poincare: ep,
    })
}

/// Spencer row `C₀ … Cₙ` of an involutive system:
/// `C_r = binom(n, r)·dim R_q − rank δ(Λ^{r−1} ⊗ g_{q+1})`, all maps of
/// first order.
pub fn spencer_dims(sys: &JetSystem, attempts: usize) -> Result<SequenceReport, JanetError> {
    require_involutive(sys, attempts)?;
    let n = sys.n();
    let q = sys.order();
    let fam = SymbolFamily::of(sys);
    let base = sys.dim();
    let mut dims = vec![base];
    for r in 1..=n {
        dims.push(binom(n, r) * base - fam.delta_rank(r - 1, q));
    }
    let ep = euler_poincare(&dims, true);
    Ok(SequenceReport {
        kind: SequenceKind::Spencer,
        dims,
        orders: vec![1; n],
        euler_poincare: ep,
    })
}

// Rank of δ : Λ^s ⊗ S_{ℓ+1} ⊗ E → Λ^{s+1} ⊗ S_ℓ ⊗ E for the full jet
// bundle, in closed form from the exactness of the full δ-complex.
fn delta_full_rank(n: usize, m: usize, s: usize, ell: u32) -> usize {
    let mut acc = 0i64;
    for j in 0..=s {
        let t = (binom(n, s - j) * count_of_degree(n, ell + 1 + j as u32) * m) as i64;
        acc += if j % 2 == 0 { t } else { -t };
    }
    acc as usize
}

/// Full-jet row `C₀(E) … Cₙ(E)` for `m` unknowns over `n` variables at
/// anchor order `q`, entirely in closed form.  At `q = 0` the row
/// degenerates to the de Rham dimensions `binom(n, r)·m`.
pub fn hybrid_dims(n: usize, m: usize, q: u32) -> SequenceReport {
    let dims: Vec<usize> = if q == 0 {
        (0..=n).map(|r| binom(n, r) * m).collect()
    } else {
        let base = count_up_to(n, q) * m;
        let mut v = vec![base];
        for r in 1..=n {
            v.push(binom(n, r) * base - delta_full_rank(n, m, r - 1, q));
        }
        v
    };
    let ep = euler_poincare(&dims, true);
    SequenceReport {
        kind: SequenceKind::Hybrid,
        dims,
        orders: vec![1; n],
        euler_poincare: ep,
    }
}

/// Janet row by its defining quotient, computed directly as the corank of
/// `Λ^r ⊗ R_q + δ(Λ^{r−1} ⊗ S_{q+1}E)` inside `Λ^r ⊗ J_q`: no Cartan
/// characters, no δ-regular coordinates.  Agrees with the tabular count
/// exactly when the anchor is involutive.
pub fn janet_dims_quotient(sys: &JetSystem) -> Vec<usize> {
    let n = sys.n();
    let m = sys.num_unknowns();
    let q = sys.order();
    let np = sys.nparams();
    let cols = sys.columns();
    let dimj = cols.len();
    let (sol, _) = sys.equations().kernel_right();
    let mut out = Vec::with_capacity(n + 1);
    out.push(dimj - sol.nrows());
    let top = indices_of_degree(n, q + 1);
    for r in 1..=n {
        let isets = subsets(n, r);
        let idx_of: BTreeMap<&[usize], usize> = isets
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_slice(), i))
            .collect();
        let mut mat = ScalarMatrix::new(np, isets.len() * dimj);
        // One copy of the solution space per wedge index set.
        for blk in 0..isets.len() {
            for srow in sol.rows() {
                let shifted: SparseRow = srow
                    .iter()
                    .map(|(c, v)| ((blk * dimj) as u32 + c, v.clone()))
                    .collect();
                mat.push_row(shifted);
            }
        }
        // δ-image rows on the basis (I', k, μ') with |μ'| = q + 1.
        for iprime in subsets(n, r - 1) {
            for k in 0..m {
                for mu in &top {
                    let mut drow: Vec<(u32, ParamScalar)> = Vec::new();
                    for i in 0..n {
                        if mu[i] == 0 || iprime.contains(&i) {
                            continue;
                        }
                        let mut j = iprime.clone();
                        j.push(i);
                        j.sort_unstable();
                        let pos = j.iter().position(|&x| x == i).unwrap();
                        let blk = idx_of[j.as_slice()];
                        let mut lower = mu.clone();
                        lower[i] -= 1;
                        let col = blk * dimj + cols.col_index(k, &lower);
                        let sgn = if pos % 2 == 0 {
                            ParamScalar::one(np)
                        } else {
                            ParamScalar::one(np).neg()
                        };
                        drow.push((col as u32, sgn));
                    }
                    if !drow.is_empty() {
                        mat.push_row(sorted_row(drow));
                    }
                }
            }
        }
        out.push(isets.len() * dimj - mat.rref_generic().rank);
    }
    out
}

// Depth of the jet-level exactness and cokernel ladders in the report.
const INTRO_CAP: u32 = 3;

/// The three dimension rows of an involutive system side by side, with
/// every cross-check the commutative diagram imposes on them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramReport {
    pub unknowns: usize,
    pub order: u32,
    /// Spencer row `C₀ … Cₙ`.
    pub spencer: Vec<usize>,
    /// Full-jet row `C₀(E) … Cₙ(E)`.
    pub hybrid: Vec<usize>,
    /// Janet row `F₀ … Fₙ` by the tabular count, untrimmed.
    pub janet: Vec<usize>,
    /// Janet row by the direct quotient ranks; must equal `janet`.
    pub janet_quotient: Vec<usize>,
    /// Whether `hybrid = spencer + janet` entrywise.
    pub additive: bool,
    /// `dim R_{q+r} − dim J_{q+r} + Σ_k (−1)^k dim J_{r−k}(F_k)` for
    /// `r = 0 … 3`; zero iff the resolution is exact at jet level there.
    pub jet_defects: Vec<i64>,
    /// Cokernel dims `h_1 … h_3` of the prolonged symbol maps written on
    /// the equation bundle.
    pub symbol_cokernel_dims: Vec<usize>,
    /// Cokernel dims `Q_0 … Q_3` of the prolonged jet maps onto the
    /// equation bundle.
    pub jet_cokernel_dims: Vec<usize>,
    /// Alternating sums of the six-term connecting sequences
    /// `0 → g_{q+r+1} → R_{q+r+1} → R_{q+r} → h_{r+1} → Q_{r+1} → Q_r → 0`;
    /// all zero when the two ladders splice exactly.
    pub connecting_defects: Vec<i64>,
}

/// Compute all rows and cross-checks for an involutive system.
pub fn fundamental_diagram(sys: &JetSystem, attempts: usize) -> Result<DiagramReport, JanetError> {
    require_involutive(sys, attempts)?;
    let n = sys.n();
    let m = sys.num_unknowns();
    let q = sys.order();
    let spencer = spencer_dims(sys, attempts)?.dims;
    let hybrid = hybrid_dims(n, m, q).dims;
    let (reg, _) = regularize_system(sys, attempts)?;
    let janet = JanetTabular::of(&reg).f_dims();
    let janet_quotient = janet_dims_quotient(sys);
    let additive = (0..=n).all(|r| hybrid[r] == spencer[r] + janet[r]);

    let fam = SymbolFamily::of(sys);
    let f0 = janet[0];
    // dim R_{q+r} for r = 0 … INTRO_CAP.
    let r_dims: Vec<usize> = (0..=INTRO_CAP)
        .map(|r| if r == 0 { sys.dim() } else { sys.prolong(r).dim() })
        .collect();

    let mut jet_defects = Vec::new();
    for r in 0..=INTRO_CAP {
        let mut acc = r_dims[r as usize] as i64 - (count_up_to(n, q + r) * m) as i64;
        for k in 0..=(r as usize).min(n) {
            let t = (count_up_to(n, r - k as u32) * janet[k]) as i64;
            acc += if k % 2 == 0 { t } else { -t };
        }
        jet_defects.push(acc);
    }

    let mut symbol_cokernel_dims = Vec::new();
    for r in 0..INTRO_CAP {
        let gprime = m * count_of_degree(n, q + r + 1) - fam.dim_g(q + r + 1);
        symbol_cokernel_dims.push(f0 * count_of_degree(n, r + 1) - gprime);
    }
    let mut jet_cokernel_dims = Vec::new();
    for r in 0..=INTRO_CAP {
        let image = count_up_to(n, q + r) * m - r_dims[r as usize];
        jet_cokernel_dims.push(f0 * count_up_to(n, r) - image);
    }
    let mut connecting_defects = Vec::new();
    for r in 0..INTRO_CAP {
        let ru = r as usize;
        connecting_defects.push(
            fam.dim_g(q + r + 1) as i64 - r_dims[ru + 1] as i64 + r_dims[ru] as i64
                - symbol_cokernel_dims[ru] as i64
                + jet_cokernel_dims[ru + 1] as i64
                - jet_cokernel_dims[ru] as i64,
        );
    }

    Ok(DiagramReport {
        unknowns: m,
        order: q,
        spencer,
        hybrid,
        janet,
        janet_quotient,
        additive,
        jet_defects,
        symbol_cokernel_dims,
        jet_cokernel_dims,
        connecting_defects,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combin::{binom, count_up_to};
    use crate::diffop::{default_labels, DiffOperator, DiffPolynomial};
    use crate::error::JanetError;
    use crate::field::poly::Poly;
    use crate::field::scalar::ParamScalar;
    use crate::jets::delta::SymbolFamily;
    use crate::jets::pp::complete;
    use crate::jets::tabular::JanetTabular;
    use crate::jets::testsys::*;
    use crate::jets::JetSystem;
    use num_bigint::BigInt;

    fn endpoint(op: &DiffOperator) -> JetSystem {
        complete(&JetSystem::from_operator(op), 40).unwrap().endpoint
    }

    #[test]
    fn delta_sequence_of_the_harmonic_triple_is_exact() {
        // 0 → g₄ → T*⊗g₃ → Λ²⊗g₂ → Λ³⊗g₁ → 0 with dims 3, 9, 9, 3: the
        // levels are 3-dimensional from order 2 on, and g₁ is all of S₁.
        let fam = SymbolFamily::of(&endpoint(&mac_2_17()));
        assert_eq!(fam.dim_g(2), 3);
        assert_eq!(fam.dim_g(3), 3);
        assert_eq!(fam.dim_g(4), 3);
        // Ranks 3, 6, 3 chain the images to the kernels at every stage:
        // injective on g₄, kernel 9 − 6 = 3 at T*⊗g₃, kernel 9 − 3 = 6 at
        // Λ²⊗g₂, and onto the 3-dimensional Λ³⊗g₁.
        assert_eq!(fam.delta_rank(0, 3), 3);
        assert_eq!(fam.delta_rank(1, 2), 6);
        assert_eq!(fam.delta_rank(2, 1), 3);
    }

    #[test]
    fn two_first_order_conditions_close_the_harmonic_triple() {
        let op = mac_2_17();
        let cc = compatibility_operator(&op, 10, 40).unwrap();
        assert_eq!(cc.generator_orders, vec![1, 1]);
        assert_eq!(cc.per_order_counts.get(&1), Some(&2));
        assert!(cc.saturated);
        assert_eq!(cc.saturation_order, 2);
        // The generator count is the Janet dimension after the equations.
        let rep = janet_sequence(&endpoint(&op), 40).unwrap();
        assert_eq!(rep.dims, vec![1, 3, 2]);
        assert_eq!(rep.orders, vec![2, 1]);
        assert_eq!(rep.euler_poincare, 0);
        assert_eq!(cc.operator.num_targets(), rep.dims[2]);
    }

    #[test]
    fn first_order_syzygies_of_the_mixed_second_derivatives() {
        let cc = compatibility_operator(&mac_2_18(), 10, 40).unwrap();
        assert_eq!(cc.generator_orders, vec![1, 1]);
        assert!(cc.saturated);
        // Reduced complement of the three pairwise relations: d₃ of y₁₂
        // minus d₁ of y₂₃, and d₂ of y₁₃ minus d₁ of y₂₃.
        let expect = vec![
            vec![
                row(3, &[(&[0, 0, 1], 1)]),
                row(3, &[]),
                row(3, &[(&[1, 0, 0], -1)]),
            ],
            vec![
                row(3, &[]),
                row(3, &[(&[0, 1, 0], 1)]),
                row(3, &[(&[1, 0, 0], -1)]),
            ],
        ];
        assert_eq!(cc.operator.rows(), &expect[..]);
    }

    #[test]
    fn second_order_conditions_of_the_unmixed_triple_are_koszul_rows() {
        let cc = compatibility_operator(&mac_2_19(), 10, 40).unwrap();
        assert_eq!(cc.generator_orders, vec![2, 2, 2]);
        assert_eq!(cc.per_order_counts.get(&2), Some(&3));
        assert!(cc.saturated);
        assert_eq!(cc.saturation_order, 3);
        // Monic at their canonical leading covector columns.
        let expect = vec![
            vec![
                row(3, &[(&[0, 2, 0], -1)]),
                row(3, &[(&[0, 0, 2], 1)]),
                row(3, &[]),
            ],
            vec![
                row(3, &[(&[0, 0, 1], -1), (&[1, 0, 0], -1)]),
                row(3, &[]),
                row(3, &[(&[0, 0, 2], 1)]),
            ],
            vec![
                row(3, &[]),
                row(3, &[(&[0, 0, 1], -1), (&[1, 0, 0], -1)]),
                row(3, &[(&[0, 2, 0], 1)]),
            ],
        ];
        assert_eq!(cc.operator.rows(), &expect[..]);
    }

    #[test]
    fn chain_of_the_unmixed_triple_ends_in_one_generator() {
        let chain = cc_chain(&mac_2_19(), 4, 10, 40).unwrap();
        assert_eq!(chain.len(), 3);
        assert_eq!(chain[0].operator.num_targets(), 3);
        assert_eq!(chain[1].operator.num_targets(), 1);
        assert_eq!(chain[2].operator.num_targets(), 0);
        assert_eq!(chain[1].generator_orders, vec![2]);
        let expect_d2 = vec![vec![
            row(3, &[(&[0, 0, 1], 1), (&[1, 0, 0], 1)]),
            row(3, &[(&[0, 2, 0], -1)]),
            row(3, &[(&[0, 0, 2], 1)]),
        ]];
        assert_eq!(chain[1].operator.rows(), &expect_d2[..]);
        assert!(chain[0].operator.compose(&mac_2_19()).is_zero());
        assert!(chain[1].operator.compose(&chain[0].operator).is_zero());
        let rep = resolution_report(&mac_2_19(), &chain);
        assert_eq!(rep.kind, SequenceKind::Resolution);
        assert_eq!(rep.dims, vec![1, 3, 3, 1]);
        assert_eq!(rep.orders, vec![2, 2, 2]);
        assert_eq!(rep.euler_poincare, 0);
        // Second member of the worked pair: same shape, all orders two.
        let chain_b = cc_chain(&mac_2_22b(), 4, 10, 40).unwrap();
        let rep_b = resolution_report(&mac_2_22b(), &chain_b);
        assert_eq!(rep_b.dims, vec![1, 3, 3, 1]);
        assert_eq!(rep_b.orders, vec![2, 2, 2]);
        assert!(chain_b[0].operator.compose(&mac_2_22b()).is_zero());
        assert!(chain_b[1].operator.compose(&chain_b[0].operator).is_zero());
    }

    #[test]
    fn parameter_branch_changes_the_condition_order() {
        let a = ParamScalar::from_poly(Poly::var(1, 0));
        let r1 = DiffPolynomial::from_term(2, vec![0, 2], ParamScalar::one(1));
        let r2 = DiffPolynomial::from_term(2, vec![1, 1], ParamScalar::one(1))
            .add(&DiffPolynomial::from_term(2, vec![1, 0], a.clone()));
        let op = DiffOperator::new(
            2,
            1,
            vec![vec![r1], vec![r2]],
            default_labels("y", 1),
            default_labels("eq", 2),
        );
        let cc = compatibility_operator(&op, 10, 40).unwrap();
        assert_eq!(cc.generator_orders, vec![2]);
        assert!(cc.saturated);
        assert_eq!(cc.saturation_order, 3);
        let expect = vec![vec![
            DiffPolynomial::from_term(2, vec![1, 1], ParamScalar::one(1))
                .add(&DiffPolynomial::from_term(2, vec![1, 0], a))
                .neg(),
            DiffPolynomial::from_term(2, vec![0, 2], ParamScalar::one(1)),
        ]];
        assert_eq!(cc.operator.rows(), &expect[..]);
        // On the branch a = 0 the condition drops to first order.
        let zero = [Some((BigInt::from(0), BigInt::from(1)))];
        let op0 = op.specialize(&zero).unwrap();
        let cc0 = compatibility_operator(&op0, 10, 40).unwrap();
        assert_eq!(cc0.generator_orders, vec![1]);
        assert!(cc0.saturated);
        let np0 = cc0.operator.nparams();
        let expect0 = vec![vec![
            DiffPolynomial::from_term(2, vec![1, 0], ParamScalar::one(np0)).neg(),
            DiffPolynomial::from_term(2, vec![0, 1], ParamScalar::one(np0)),
        ]];
        assert_eq!(cc0.operator.rows(), &expect0[..]);
    }

    #[test]
    fn janet_dimensions_of_the_worked_systems() {
        let cases: Vec<(DiffOperator, Vec<usize>, Vec<u32>)> = vec![
            (mac_2_17(), vec![1, 3, 2], vec![2, 1]),
            (mac_2_19(), vec![1, 16, 33, 24, 6], vec![3, 1, 1, 1]),
            (mac_2_20(), vec![1, 9, 12, 4], vec![5, 1, 1]),
            (mac_2_21(), vec![1, 9, 15, 9, 2], vec![3, 1, 1, 1]),
            (mac_2_22a(), vec![1, 4, 4, 1], vec![2, 1, 1]),
            (mac_2_22b(), vec![1, 27, 60, 46, 12], vec![4, 1, 1, 1]),
        ];
        for (op, dims, orders) in cases {
            let rep = janet_sequence(&endpoint(&op), 40).unwrap();
            assert_eq!(rep.kind, SequenceKind::Janet);
            assert_eq!(rep.dims, dims);
            assert_eq!(rep.orders, orders);
            assert_eq!(rep.euler_poincare, 0);
        }
    }

    #[test]
    fn euler_characteristic_matches_the_differential_rank() {
        assert_eq!(euler_poincare(&[], true), 0);
        assert_eq!(euler_poincare(&[1, 2, 1], true), 0);
        assert_eq!(euler_poincare(&[4, 12, 12, 4], false), 0);
        assert_eq!(euler_poincare(&[3, 1], false), -2);
        // Divergence-type equation: one condition on two unknowns, already
        // involutive, no compatibility conditions, alternating sum 1.
        let div = DiffOperator::new(
            2,
            0,
            vec![vec![DiffPolynomial::d(2, 0, 0), DiffPolynomial::d(2, 0, 1)]],
            default_labels("u", 2),
            default_labels("eq", 1),
        );
        assert_eq!(differential_rank(&div), 1);
        let rep = janet_sequence(&JetSystem::from_operator(&div), 40).unwrap();
        assert_eq!(rep.dims, vec![2, 1]);
        assert_eq!(rep.orders, vec![1]);
        assert_eq!(rep.euler_poincare, 1);
        let cc = compatibility_operator(&div, 10, 40).unwrap();
        assert_eq!(cc.operator.num_targets(), 0);
        assert!(cc.saturated);
    }

    #[test]
    fn non_involutive_input_is_refused() {
        let raw = JetSystem::from_operator(&mac_2_19());
        assert!(matches!(
            janet_sequence(&raw, 40),
            Err(JanetError::InvalidInput(_))
        ));
        assert!(matches!(
            spencer_dims(&raw, 40),
            Err(JanetError::InvalidInput(_))
        ));
        assert!(matches!(
            fundamental_diagram(&raw, 40),
            Err(JanetError::InvalidInput(_))
        ));
        // The twice-projected order-2 system has maximal characters but its
        // next level is too small for the Cartan test: refused as well.
        let anchor = raw.prolong(2).project(2);
        assert!(janet_sequence(&anchor, 40).is_err());
        assert!(fundamental_diagram(&anchor, 40).is_err());
    }

    #[test]
    fn spencer_dimensions_match_the_worked_diagrams() {
        let cases: Vec<(DiffOperator, Vec<usize>)> = vec![
            (mac_2_17(), vec![7, 18, 15, 4]),
            (mac_2_19(), vec![4, 12, 12, 4]),
            (mac_2_20(), vec![12, 23, 11]),
            (mac_2_21(), vec![11, 30, 27, 8]),
            (mac_2_22a(), vec![6, 16, 14, 4]),
            (mac_2_22b(), vec![8, 24, 24, 8]),
        ];
        for (op, dims) in cases {
            let rep = spencer_dims(&endpoint(&op), 40).unwrap();
            assert_eq!(rep.kind, SequenceKind::Spencer);
            assert_eq!(rep.dims, dims);
            assert_eq!(rep.orders, vec![1; rep.dims.len() - 1]);
            assert_eq!(rep.euler_poincare, 0);
        }
        // The middle entry 27 above comes from a δ-rank of 6.
        let fam = SymbolFamily::of(&endpoint(&mac_2_21()));
        assert_eq!(fam.delta_rank(1, 3), 6);
    }

    #[test]
    fn full_jet_rows_from_the_closed_form() {
        assert_eq!(hybrid_dims(3, 1, 2).dims, vec![10, 20, 15, 4]);
        assert_eq!(hybrid_dims(3, 1, 3).dims, vec![20, 45, 36, 10]);
        assert_eq!(hybrid_dims(2, 1, 5).dims, vec![21, 35, 15]);
        assert_eq!(hybrid_dims(3, 1, 4).dims, vec![35, 84, 70, 20]);
        // First entry after the base: (n+1)·dim J_q − dim J_{q+1}.
        assert_eq!(hybrid_dims(2, 1, 5).dims[1], 3 * 21 - 28);
        // Anchor order zero degenerates to the de Rham dims.
        assert_eq!(hybrid_dims(3, 2, 0).dims, vec![2, 6, 6, 2]);
        assert_eq!(hybrid_dims(3, 2, 0).euler_poincare, 0);
        // The alternating sum of a positive-order row is the fibre dim.
        assert_eq!(hybrid_dims(3, 2, 2).euler_poincare, 2);
        assert_eq!(hybrid_dims(3, 1, 4).euler_poincare, 1);
        // Closed form agrees with the numeric δ-ranks of the free family.
        let full = SymbolFamily::full(3, 2, 0, 2);
        let rep = hybrid_dims(3, 2, 2);
        for r in 1..=3usize {
            assert_eq!(
                binom(3, r) * count_up_to(3, 2) * 2 - full.delta_rank(r - 1, 2),
                rep.dims[r]
            );
        }
    }

    #[test]
    fn fundamental_diagram_adds_columnwise() {
        let d = fundamental_diagram(&endpoint(&mac_2_19()), 40).unwrap();
        assert_eq!(d.unknowns, 1);
        assert_eq!(d.order, 3);
        assert_eq!(d.spencer, vec![4, 12, 12, 4]);
        assert_eq!(d.hybrid, vec![20, 45, 36, 10]);
        assert_eq!(d.janet, vec![16, 33, 24, 6]);
        assert_eq!(d.janet_quotient, d.janet);
        assert!(d.additive);
        assert_eq!(d.jet_defects, vec![0; 4]);
        assert_eq!(d.symbol_cokernel_dims, vec![33, 75, 132]);
        assert_eq!(d.jet_cokernel_dims, vec![0, 33, 108, 240]);
        assert_eq!(d.connecting_defects, vec![0; 3]);
    }

    #[test]
    fn diagram_rows_of_the_higher_examples_are_additive() {
        let cases: Vec<(DiffOperator, Vec<usize>)> = vec![
            (mac_2_20(), vec![9, 12, 4]),
            (mac_2_21(), vec![9, 15, 9, 2]),
            (mac_2_22b(), vec![27, 60, 46, 12]),
        ];
        for (op, janet_row) in cases {
            let d = fundamental_diagram(&endpoint(&op), 40).unwrap();
            assert_eq!(d.janet, janet_row);
            assert_eq!(d.janet_quotient, d.janet);
            assert!(d.additive);
            assert!(d.jet_defects.iter().all(|&x| x == 0));
            assert!(d.connecting_defects.iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn quotient_route_detects_the_invalid_anchor() {
        assert_eq!(
            janet_dims_quotient(&endpoint(&mac_2_19())),
            vec![16, 33, 24, 6]
        );
        // Projecting the second prolongation back to order 2 leaves a system
        // whose parametric jet of class 1 never re-enters the span of the
        // solution wedges: the defining quotient and the tabular count split
        // apart, which is exactly the failure the involutivity gate guards.
        let anchor = JetSystem::from_operator(&mac_2_19()).prolong(2).project(2);
        assert_eq!(janet_dims_quotient(&anchor), vec![6, 8, 4, 1]);
        assert_eq!(JanetTabular::of(&anchor).f_dims(), vec![6, 9, 5, 1]);
    }

    #[test]
    fn lowering_preserves_the_resolution_shape() {
        let c = complete(&JetSystem::from_operator(&mac_2_19()), 40).unwrap();
        let low = crate::jets::lower::lower_to_first_order(&c.endpoint).unwrap();
        let rep = janet_sequence(&JetSystem::from_operator(&low.op), 40).unwrap();
        assert_eq!(rep.dims, vec![4, 12, 12, 4]);
        assert_eq!(rep.orders, vec![1, 1, 1]);
        assert_eq!(rep.euler_poincare, 0);
    }
}
