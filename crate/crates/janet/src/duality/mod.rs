//! Double duality: torsion and parametrization tests for operator modules.
//!
//! An operator D with m unknowns presents the module M = K[d]^{1×m} / ⟨rows
//! of D⟩. Dualizing twice tests whether M has torsion: form the formal
//! adjoint, take its compatibility conditions, and dualize those back to get
//! a candidate parametrization P with D∘P = 0. The compatibility conditions
//! of P recover a presentation of the double dual; its rows always contain
//! the rows of D, and the residue classes of the extra rows generate the
//! torsion submodule t(M). The system Dη = 0 is parametrizable (η = Pξ)
//! exactly when no extra rows appear.
//!
//! Each torsion class ships with a certificate when one exists within the
//! search bound: a nonzero scalar operator that multiplies the class back
//! into the row module of D.

pub mod groebner;

use crate::diffop::{default_labels, DiffOperator, DiffPolynomial};
use crate::error::JanetError;
use crate::field::matrix::ScalarMatrix;
use crate::field::scalar::{merge_conditions, GenericityCondition, ParamScalar};
use crate::jets::delta::subsets;
use crate::sequences::{compatibility_operator, CCResult};

use self::groebner::{same_row_module, ModuleBasis};

/// A generator of the torsion submodule, as a residue class of a row
/// covector on the unknowns, with a bounding operator when the search found
/// one: certificate · class lies in the row module of the presenting
/// operator. A missing certificate means none exists up to the search cap,
/// never that the class is free.
#[derive(Clone, Debug)]
pub struct TorsionElement {
    pub class_row: Vec<DiffPolynomial>,
    pub certificate: Option<DiffPolynomial>,
    pub certificate_order: Option<u32>,
}

#[derive(Debug)]
pub struct DualityReport {
    /// The presenting operator the test was run on.
    pub input: DiffOperator,
    /// Formal adjoint of the input.
    pub adjoint: DiffOperator,
    /// Compatibility conditions of the adjoint.
    pub adjoint_cc: CCResult,
    /// Candidate parametrization, the adjoint of those conditions.
    pub parametrization: DiffOperator,
    /// Compatibility conditions of the parametrization: a presentation of
    /// the double dual module.
    pub recovered: CCResult,
    /// Greedy generators of the torsion submodule: rows of the recovered
    /// presentation that escape the row module generated so far.
    pub torsion: Vec<TorsionElement>,
    pub torsion_free: bool,
    /// True when either compatibility sweep ran out of orders before
    /// saturating; the torsion verdict is then inconclusive.
    pub partial: bool,
    pub conditions: Vec<GenericityCondition>,
}

impl DualityReport {
    /// The system admits its candidate parametrization exactly when the
    /// module is torsion-free.
    pub fn parametrizable(&self) -> bool {
        self.torsion_free
    }
}

pub fn double_duality(
    op: &DiffOperator,
    max_order: u32,
    certificate_cap: u32,
    attempts: usize,
) -> Result<DualityReport, JanetError> {
    let n = op.n();
    let np = op.nparams();
    let m = op.num_sources();
    let adjoint = op.adjoint();
    let adjoint_cc = compatibility_operator(&adjoint, max_order, attempts)?;
    let parametrization = adjoint_cc.operator.adjoint();
    debug_assert!(op.compose(&parametrization).is_zero());
    let recovered = compatibility_operator(&parametrization, max_order, attempts)?;
    let mut conditions = adjoint_cc.conditions.clone();
    merge_conditions(&mut conditions, &recovered.conditions);

    let original = ModuleBasis::of_rows(op);
    let mut span = op.rows().to_vec();
    let mut torsion = Vec::new();
    for row in recovered.operator.rows() {
        if ModuleBasis::new(n, np, m, span.clone()).contains_row(row) {
            continue;
        }
        let certificate = original.annihilator(row, certificate_cap);
        let certificate_order = certificate.as_ref().map(|p| p.order());
        torsion.push(TorsionElement {
            class_row: row.clone(),
            certificate,
            certificate_order,
        });
        span.push(row.clone());
    }
    let torsion_free = torsion.is_empty();
    let partial = !adjoint_cc.saturated || !recovered.saturated;
    Ok(DualityReport {
        input: op.clone(),
        adjoint,
        adjoint_cc,
        parametrization,
        recovered,
        torsion,
        torsion_free,
        partial,
        conditions,
    })
}

#[derive(Debug)]
pub struct MinimalParametrization {
    /// Source columns of the candidate kept by the search.
    pub columns: Vec<usize>,
    pub operator: DiffOperator,
    pub conditions: Vec<GenericityCondition>,
}

/// Upper bound on the number of column subsets the search will try.
const SUBSET_CAP: usize = 5000;

/// Cut a parametrization down to as few potentials as its generic rank
/// allows: try column subsets of that size in lexicographic order and keep
/// the first whose compatibility conditions still present the system. The
/// returned operator keeps its shape, with the columns outside the chosen
/// subset zeroed. An explicit subset skips the search (any size is
/// accepted, only the parametrization property is checked).
pub fn minimum_parametrization(
    sys: &DiffOperator,
    param: &DiffOperator,
    subset: Option<&[usize]>,
    max_order: u32,
    attempts: usize,
) -> Result<MinimalParametrization, JanetError> {
    if param.num_targets() != sys.num_sources() || param.n() != sys.n() {
        return Err(JanetError::ShapeMismatch(
            "parametrization targets must match system unknowns".into(),
        ));
    }
    let t = param.num_sources();
    if let Some(cols) = subset {
        if cols.iter().any(|&c| c >= t) || !cols.windows(2).all(|w| w[0] < w[1]) {
            return Err(JanetError::InvalidInput(
                "column subset must be strictly increasing and in range".into(),
            ));
        }
        let restricted = keep_columns(param, cols);
        return match parametrizes(sys, &restricted, max_order, attempts)? {
            Some(conditions) => Ok(MinimalParametrization {
                columns: cols.to_vec(),
                operator: restricted,
                conditions,
            }),
            None => Err(JanetError::InvalidInput(
                "the requested columns do not parametrize the system".into(),
            )),
        };
    }
    let want = param.generic_chi_rank();
    let all = subsets(t, want);
    for (tried, cols) in all.iter().enumerate() {
        if tried >= SUBSET_CAP {
            return Err(JanetError::CapExceeded {
                what: "column subsets tried by the parametrization search",
                cap: SUBSET_CAP,
            });
        }
        let restricted = keep_columns(param, cols);
        if let Some(conditions) = parametrizes(sys, &restricted, max_order, attempts)? {
            return Ok(MinimalParametrization {
                columns: cols.clone(),
                operator: restricted,
                conditions,
            });
        }
    }
    Err(JanetError::InvalidInput(
        "no column subset of generic-rank size parametrizes the system".into(),
    ))
}

/// Zero every source column outside the kept set; labels, weights, and the
/// source count stay as they were.
pub(crate) fn keep_columns(op: &DiffOperator, cols: &[usize]) -> DiffOperator {
    let entries = op
        .rows()
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(c, e)| {
                    if cols.contains(&c) {
                        e.clone()
                    } else {
                        DiffPolynomial::zero(op.n(), op.nparams())
                    }
                })
                .collect()
        })
        .collect();
    DiffOperator::with_weights(
        op.n(),
        op.nparams(),
        entries,
        op.source_labels().to_vec(),
        op.target_labels().to_vec(),
        op.source_weights().to_vec(),
        op.target_weights().to_vec(),
    )
}

/// Some(conditions) when the candidate's compatibility conditions saturate
/// and generate exactly the row module of the system.
fn parametrizes(
    sys: &DiffOperator,
    cand: &DiffOperator,
    max_order: u32,
    attempts: usize,
) -> Result<Option<Vec<GenericityCondition>>, JanetError> {
    if !sys.compose(cand).is_zero() {
        return Ok(None);
    }
    let cc = compatibility_operator(cand, max_order, attempts)?;
    if !cc.saturated {
        return Ok(None);
    }
    let same = same_row_module(
        sys.n(),
        sys.nparams(),
        sys.num_sources(),
        cc.operator.rows(),
        sys.rows(),
    );
    Ok(same.then(|| cc.conditions))
}

/// First-order state-space operator with rows −d·x_i + Σ a_ij x_j +
/// Σ b_ik u_k on one independent variable.
pub fn kalman_operator(
    a: &[Vec<ParamScalar>],
    b: &[Vec<ParamScalar>],
) -> Result<DiffOperator, JanetError> {
    let s = a.len();
    if s == 0
        || a.iter().any(|r| r.len() != s)
        || b.len() != s
        || b.iter().any(|r| r.len() != b[0].len())
    {
        return Err(JanetError::ShapeMismatch(
            "state matrix must be square and input matrix must match it".into(),
        ));
    }
    let mu = b[0].len();
    let np = a[0][0].nvars();
    let d = DiffPolynomial::d(1, np, 0);
    let mut entries = Vec::with_capacity(s);
    for i in 0..s {
        let mut row = Vec::with_capacity(s + mu);
        for j in 0..s {
            let mut e = DiffPolynomial::constant(1, a[i][j].clone());
            if i == j {
                e = e.sub(&d);
            }
            row.push(e);
        }
        for k in 0..mu {
            row.push(DiffPolynomial::constant(1, b[i][k].clone()));
        }
        entries.push(row);
    }
    let mut labels = default_labels("x", s);
    labels.extend(default_labels("u", mu));
    Ok(DiffOperator::new(1, np, entries, labels, default_labels("eq", s)))
}

#[derive(Debug)]
pub struct KalmanReport {
    pub rank: usize,
    pub controllable: bool,
    pub conditions: Vec<GenericityCondition>,
}

/// Classical controllability test: rank of (B | AB | … | A^{s−1}B).
pub fn kalman_test(
    a: &[Vec<ParamScalar>],
    b: &[Vec<ParamScalar>],
) -> Result<KalmanReport, JanetError> {
    let s = a.len();
    if s == 0 || a.iter().any(|r| r.len() != s) || b.len() != s {
        return Err(JanetError::ShapeMismatch(
            "state matrix must be square and input matrix must match it".into(),
        ));
    }
    let mu = b[0].len();
    let np = a[0][0].nvars();
    let mut blocks = vec![b.to_vec()];
    for _ in 1..s {
        let last = blocks.last().unwrap();
        let mut next = vec![vec![ParamScalar::zero(np); mu]; s];
        for (i, row) in next.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                for k in 0..s {
                    *e = e.add(&a[i][k].mul(&last[k][j]));
                }
            }
        }
        blocks.push(next);
    }
    let mut mat = ScalarMatrix::new(np, s * mu);
    for i in 0..s {
        let mut entries = Vec::new();
        for (kb, block) in blocks.iter().enumerate() {
            for j in 0..mu {
                let v = block[i][j].clone();
                if !v.is_zero() {
                    entries.push(((kb * mu + j) as u32, v));
                }
            }
        }
        mat.push_row(entries);
    }
    let rref = mat.rref_generic();
    Ok(KalmanReport {
        rank: rref.rank,
        controllable: rref.rank == s,
        conditions: rref.conditions,
    })
}

/// Module-theoretic controllability test: the state-space module is
/// torsion-free exactly when the pair is controllable. The generic verdicts
/// of the two routes are checked against each other before returning.
pub fn kalman_via_duality(
    a: &[Vec<ParamScalar>],
    b: &[Vec<ParamScalar>],
    certificate_cap: u32,
    attempts: usize,
) -> Result<DualityReport, JanetError> {
    let op = kalman_operator(a, b)?;
    let report = double_duality(&op, 8, certificate_cap, attempts)?;
    let classical = kalman_test(a, b)?;
    assert_eq!(
        classical.controllable, report.torsion_free,
        "rank test and torsion test disagree"
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::differential_rank;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn d(n: usize, i: usize) -> DiffPolynomial {
        DiffPolynomial::d(n, 0, i)
    }

    fn zero(n: usize) -> DiffPolynomial {
        DiffPolynomial::zero(n, 0)
    }

    #[test]
    fn divergence_is_parametrized_by_the_rotation() {
        let div = DiffOperator::new(
            2,
            0,
            vec![vec![d(2, 0), d(2, 1)]],
            default_labels("u", 2),
            default_labels("eq", 1),
        );
        let rep = double_duality(&div, 6, 4, 40).unwrap();
        assert!(rep.torsion_free);
        assert!(rep.parametrizable());
        assert_eq!(rep.adjoint.rows(), &[vec![d(2, 0).neg()], vec![d(2, 1).neg()]]);
        assert_eq!(rep.adjoint_cc.operator.rows(), &[vec![d(2, 1), d(2, 0).neg()]]);
        assert_eq!(rep.parametrization.rows(), &[vec![d(2, 1).neg()], vec![d(2, 0)]]);
        assert_eq!(rep.recovered.operator.rows(), div.rows());
        assert!(div.compose(&rep.parametrization).is_zero());
    }

    #[test]
    fn a_transport_equation_is_pure_torsion() {
        let op = DiffOperator::new(
            2,
            0,
            vec![vec![d(2, 0)]],
            default_labels("u", 1),
            default_labels("eq", 1),
        );
        let rep = double_duality(&op, 6, 4, 40).unwrap();
        assert!(!rep.torsion_free);
        // The adjoint is injective, so the candidate parametrization is the
        // zero map and the double dual is presented by the identity.
        assert_eq!(rep.parametrization.num_sources(), 0);
        assert_eq!(rep.recovered.operator.rows(), &[vec![DiffPolynomial::one(2, 0)]]);
        assert_eq!(rep.torsion.len(), 1);
        assert_eq!(rep.torsion[0].class_row, vec![DiffPolynomial::one(2, 0)]);
        assert_eq!(rep.torsion[0].certificate, Some(d(2, 0)));
    }

    #[test]
    fn a_minimum_parametrization_drops_the_redundant_potential() {
        let div3 = DiffOperator::new(
            3,
            0,
            vec![vec![d(3, 0), d(3, 1), d(3, 2)]],
            default_labels("u", 3),
            default_labels("eq", 1),
        );
        let curl = DiffOperator::new(
            3,
            0,
            vec![
                vec![zero(3), d(3, 2).neg(), d(3, 1)],
                vec![d(3, 2), zero(3), d(3, 0).neg()],
                vec![d(3, 1).neg(), d(3, 0), zero(3)],
            ],
            default_labels("w", 3),
            default_labels("u", 3),
        );
        assert!(div3.compose(&curl).is_zero());
        assert_eq!(differential_rank(&div3), 2);
        assert_eq!(curl.generic_chi_rank(), 2);
        let min = minimum_parametrization(&div3, &curl, None, 6, 40).unwrap();
        assert_eq!(min.columns, vec![0, 1]);
        // The shape survives; the dropped potential's column is zeroed.
        assert_eq!(min.operator.num_sources(), 3);
        assert!(min.operator.rows().iter().all(|r| r[2].is_zero()));
        assert!(div3.compose(&min.operator).is_zero());
        // Any explicitly requested subset is checked, not searched.
        let picked = minimum_parametrization(&div3, &curl, Some(&[0, 2]), 6, 40).unwrap();
        assert_eq!(picked.columns, vec![0, 2]);
        // One column of the curl cannot parametrize the divergence.
        assert!(matches!(
            minimum_parametrization(&div3, &curl, Some(&[0]), 6, 40),
            Err(JanetError::InvalidInput(_))
        ));
    }

    #[test]
    fn controllability_agrees_with_the_torsion_test_on_seeded_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x4a414e);
        let mut seen_controllable = 0usize;
        let mut seen_torsion = 0usize;
        for _ in 0..50 {
            let s = rng.gen_range(2..=3);
            let mu = rng.gen_range(1..=2);
            let a: Vec<Vec<ParamScalar>> = (0..s)
                .map(|_| {
                    (0..s)
                        .map(|_| ParamScalar::from_int(0, rng.gen_range(-2i64..=2)))
                        .collect()
                })
                .collect();
            let b: Vec<Vec<ParamScalar>> = (0..s)
                .map(|_| {
                    (0..mu)
                        .map(|_| ParamScalar::from_int(0, rng.gen_range(-2i64..=2)))
                        .collect()
                })
                .collect();
            let classical = kalman_test(&a, &b).unwrap();
            let dual = kalman_via_duality(&a, &b, 4, 40).unwrap();
            assert_eq!(classical.controllable, dual.torsion_free);
            assert!(!dual.partial);
            if classical.controllable {
                seen_controllable += 1;
            } else {
                seen_torsion += 1;
                // Over one independent variable every torsion class is
                // bounded by a factor of the characteristic polynomial.
                for t in &dual.torsion {
                    assert!(t.certificate.is_some());
                }
            }
        }
        assert!(seen_controllable > 0 && seen_torsion > 0);
    }
}
