//! Registry of named operators: the classical systems of elasticity,
//! relativity, and conformal geometry over constant diagonal metrics, the
//! double-pendulum control system, and the small polynomial systems used as
//! worked examples elsewhere in the crate.
//!
//! Everything downstream of a metric is produced by the engine itself: the
//! curvature operators arise as compatibility conditions of the Killing
//! operator, and the stress parametrizations as their formal adjoints. The
//! only hand-written data is presentational — for the plane and space
//! Euclidean metrics the curvature generators are re-expressed in the
//! classical Saint-Venant basis, so that the adjoint reproduces the Airy and
//! Beltrami matrices literally. The change of basis is solved at run time
//! from the engine output and fails loudly if the generated module ever
//! drifts from the classical one.

use std::collections::BTreeMap;

use crate::diffop::{default_labels, unit_weights, DiffOperator, DiffPolynomial};
use crate::error::JanetError;
use crate::field::{Monomial, ParamScalar, Poly, ScalarMatrix};
use crate::jets::testsys;
use crate::sequences::compatibility_operator;

/// Order cap for the compatibility searches that build curvature operators.
const CC_ORDER_CAP: u32 = 8;
/// Random δ-regularization attempts for those searches.
const REGULARITY_ATTEMPTS: usize = 40;

/// Constant diagonal metric ω = diag(s₁, …, sₙ) with sᵢ = ±1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metric {
    name: String,
    signs: Vec<i64>,
}

impl Metric {
    pub fn euclid(n: usize) -> Metric {
        assert!(n >= 1, "metric needs at least one dimension");
        Metric { name: format!("euclid{}", n), signs: vec![1; n] }
    }

    /// Minkowski space-time with signature (+, +, +, −).
    pub fn minkowski4() -> Metric {
        Metric { name: "mink4".to_string(), signs: vec![1, 1, 1, -1] }
    }

    /// Parse a metric suffix such as `euclid3` or `mink4`.
    pub fn parse(name: &str) -> Option<Metric> {
        if name == "mink4" {
            return Some(Metric::minkowski4());
        }
        let n: usize = name.strip_prefix("euclid")?.parse().ok()?;
        if n == 0 {
            return None;
        }
        Some(Metric::euclid(n))
    }

    pub fn n(&self) -> usize {
        self.signs.len()
    }

    pub fn sign(&self, i: usize) -> i64 {
        self.signs[i]
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

/// Ordered index pairs (i, j) with i ≤ j of S₂T*, lexicographic.
pub fn sym_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            out.push((i, j));
        }
    }
    out
}

fn sym_labels(prefix: &str, n: usize) -> Vec<String> {
    sym_pairs(n).iter().map(|&(i, j)| format!("{}{}{}", prefix, i + 1, j + 1)).collect()
}

/// Pairing weights of S₂ components: 1 on the diagonal, 2 off it.
fn sym_weights(nparams: usize, n: usize) -> Vec<ParamScalar> {
    sym_pairs(n)
        .iter()
        .map(|&(i, j)| ParamScalar::from_int(nparams, if i == j { 1 } else { 2 }))
        .collect()
}

/// Pairing weights of S₂ components induced by ω: the multiplicity times
/// s_i·s_j, so that raising indices is absorbed into the pairing.
fn metric_sym_weights(metric: &Metric) -> Vec<ParamScalar> {
    sym_pairs(metric.n())
        .iter()
        .map(|&(i, j)| {
            let mult = if i == j { 1 } else { 2 };
            ParamScalar::from_int(0, mult * metric.sign(i) * metric.sign(j))
        })
        .collect()
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // pairs (0,0)..(0,n-1) come first, then (1,1)..(1,n-1), ...
    i * n - i * (i + 1) / 2 + j
}

/// Single first-derivative term c·d_i as a parameter-free entry.
fn d1(n: usize, i: usize, c: i64) -> DiffPolynomial {
    let mut mu = vec![0u32; n];
    mu[i] = 1;
    DiffPolynomial::from_term(n, mu, ParamScalar::from_int(0, c))
}

/// Second-derivative term c·d_{ab}.
fn d2(n: usize, a: usize, b: usize, c: &ParamScalar) -> DiffPolynomial {
    let mut mu = vec![0u32; n];
    mu[a] += 1;
    mu[b] += 1;
    DiffPolynomial::from_term(n, mu, c.clone())
}

/// Replace both label vectors, keeping entries and weights.
fn with_labels(op: &DiffOperator, sources: Vec<String>, targets: Vec<String>) -> DiffOperator {
    DiffOperator::with_weights(
        op.n(),
        op.nparams(),
        op.rows().to_vec(),
        sources,
        targets,
        op.source_weights().to_vec(),
        op.target_weights().to_vec(),
    )
}

// ---------------------------------------------------------------------------
// Killing family
// ---------------------------------------------------------------------------

/// Killing operator of ω: (Ωξ)_ij = s_j d_iξ^j + s_i d_jξ^i for i ≤ j.
/// Targets carry the S₂ pairing weights.
pub fn killing(metric: &Metric) -> DiffOperator {
    let n = metric.n();
    let mut entries = Vec::new();
    for (i, j) in sym_pairs(n) {
        let mut row = vec![DiffPolynomial::zero(n, 0); n];
        row[j] = row[j].add(&d1(n, i, metric.sign(j)));
        row[i] = row[i].add(&d1(n, j, metric.sign(i)));
        entries.push(row);
    }
    let sources = (1..=n).map(|k| format!("xi{}", k)).collect();
    DiffOperator::with_weights(
        n,
        0,
        entries,
        sources,
        sym_labels("om", n),
        unit_weights(0, n),
        metric_sym_weights(metric),
    )
}

/// Trace-free part of the Killing operator:
/// Ω̂_ij = Ω_ij − (2/n)·ω_ij·Σ_k d_kξ^k.  The trace of Ω̂ vanishes
/// identically, so the last diagonal component is dropped and
/// n(n+1)/2 − 1 targets remain.
pub fn conformal_killing(metric: &Metric) -> DiffOperator {
    let n = metric.n();
    let mut entries = Vec::new();
    let mut labels = Vec::new();
    let mut weights = Vec::new();
    let pairs = sym_pairs(n);
    for &(i, j) in &pairs {
        if i == n - 1 && j == n - 1 {
            continue;
        }
        let mut row = vec![DiffPolynomial::zero(n, 0); n];
        row[j] = row[j].add(&d1(n, i, metric.sign(j)));
        row[i] = row[i].add(&d1(n, j, metric.sign(i)));
        if i == j {
            let c = ParamScalar::from_rat(0, -2 * metric.sign(i), n as i64);
            for k in 0..n {
                let mut mu = vec![0u32; n];
                mu[k] = 1;
                row[k] = row[k].add(&DiffPolynomial::from_term(n, mu, c.clone()));
            }
        }
        entries.push(row);
        labels.push(format!("cw{}{}", i + 1, j + 1));
        let mult = if i == j { 1 } else { 2 };
        weights.push(ParamScalar::from_int(0, mult * metric.sign(i) * metric.sign(j)));
    }
    let sources = (1..=n).map(|k| format!("xi{}", k)).collect();
    DiffOperator::with_weights(n, 0, entries, sources, labels, unit_weights(0, n), weights)
}

// ---------------------------------------------------------------------------
// Curvature operators (compatibility conditions)
// ---------------------------------------------------------------------------

/// Saint-Venant presentation of the space curvature generators, scaled so
/// the formal adjoint is the classical Beltrami matrix.  Row j lists the
/// coefficients of (Ω₁₁, Ω₁₂, Ω₁₃, Ω₂₂, Ω₂₃, Ω₃₃); e.g. row 0 is the
/// identity d₃₃Ω₂₂ − 2d₂₃Ω₂₃ + d₂₂Ω₃₃.
fn saint_venant_rows() -> Vec<Vec<DiffPolynomial>> {
    let spec: [[(usize, usize, i64); 6]; 6] = [
        [(0, 0, 0), (0, 0, 0), (0, 0, 0), (2, 2, 1), (1, 2, -2), (1, 1, 1)],
        [(0, 0, 0), (2, 2, -2), (1, 2, 2), (0, 0, 0), (0, 2, 2), (0, 1, -2)],
        [(0, 0, 0), (1, 2, 2), (1, 1, -2), (0, 2, -2), (0, 1, 2), (0, 0, 0)],
        [(2, 2, 1), (0, 0, 0), (0, 2, -2), (0, 0, 0), (0, 0, 0), (0, 0, 1)],
        [(1, 2, -2), (0, 2, 2), (0, 1, 2), (0, 0, 0), (0, 0, -2), (0, 0, 0)],
        [(1, 1, 1), (0, 1, -2), (0, 0, 0), (0, 0, 1), (0, 0, 0), (0, 0, 0)],
    ];
    spec.iter()
        .map(|row| {
            row.iter()
                .map(|&(a, b, c)| {
                    if c == 0 {
                        DiffPolynomial::zero(3, 0)
                    } else {
                        d2(3, a, b, &ParamScalar::from_int(0, c))
                    }
                })
                .collect()
        })
        .collect()
}

/// Encode operator rows as sparse rational vectors over (component, monomial)
/// columns, for ℚ-span comparisons at a fixed order.
fn encode_rows(n: usize, rows: &[Vec<Vec<DiffPolynomial>>]) -> Vec<ScalarMatrix> {
    let mut cols: BTreeMap<(usize, Monomial), u32> = BTreeMap::new();
    for block in rows {
        for row in block.iter() {
            for (j, e) in row.iter().enumerate() {
                for (mu, _) in e.terms() {
                    let next = cols.len() as u32;
                    cols.entry((j, mu.clone())).or_insert(next);
                }
            }
        }
    }
    let _ = n;
    let ncols = cols.len();
    rows.iter()
        .map(|block| {
            let mut m = ScalarMatrix::new(0, ncols);
            for row in block.iter() {
                let mut sparse: BTreeMap<u32, ParamScalar> = BTreeMap::new();
                for (j, e) in row.iter().enumerate() {
                    for (mu, c) in e.terms() {
                        sparse.insert(cols[&(j, mu.clone())], c.clone());
                    }
                }
                m.push_row(sparse.into_iter().collect());
            }
            m
        })
        .collect()
}

/// Replace the rows of `op` by `desired`, after verifying that the two sets
/// span the same ℚ-space (hence generate the same row module).  This is a
/// pure change of generating basis: it can rescale, reorder, and mix rows,
/// but never enlarge or shrink the module.
fn reexpress(op: &DiffOperator, desired: Vec<Vec<DiffPolynomial>>) -> Result<DiffOperator, JanetError> {
    if desired.len() != op.num_targets() {
        return Err(JanetError::ShapeMismatch(
            "presentation row count differs from generated compatibility basis".into(),
        ));
    }
    let enc = encode_rows(op.n(), &[op.rows().to_vec(), desired.clone()]);
    let rank_g = enc[0].rank();
    let rank_d = enc[1].rank();
    let rank_both = enc[0].stack(&enc[1]).rank();
    if rank_g != op.num_targets() || rank_d != desired.len() || rank_both != rank_g {
        return Err(JanetError::ShapeMismatch(
            "presentation rows do not span the generated compatibility basis".into(),
        ));
    }
    Ok(DiffOperator::with_weights(
        op.n(),
        op.nparams(),
        desired,
        op.source_labels().to_vec(),
        op.target_labels().to_vec(),
        op.source_weights().to_vec(),
        op.target_weights().to_vec(),
    ))
}

/// Curvature operator: the generating compatibility conditions of `killing`.
/// For `euclid2` and `euclid3` the generators are re-expressed in the
/// Saint-Venant basis, so the formal adjoint is literally the Airy
/// respectively Beltrami matrix.
pub fn riemann(metric: &Metric) -> Result<DiffOperator, JanetError> {
    let cc = compatibility_operator(&killing(metric), CC_ORDER_CAP, REGULARITY_ATTEMPTS)?;
    let op = cc.operator;
    let presented = match metric.name() {
        "euclid2" => reexpress(&op, vec![vec![
            d2(2, 1, 1, &ParamScalar::from_int(0, 1)),
            d2(2, 0, 1, &ParamScalar::from_int(0, -2)),
            d2(2, 0, 0, &ParamScalar::from_int(0, 1)),
        ]])?,
        "euclid3" => reexpress(&op, saint_venant_rows())?,
        _ => op,
    };
    let p = presented.num_targets();
    let targets = if metric.name() == "euclid3" {
        sym_labels("r", 3)
    } else {
        default_labels("r", p)
    };
    Ok(with_labels(&presented, presented.source_labels().to_vec(), targets))
}

/// Contracted second Bianchi identity: the compatibility conditions of
/// `riemann`.
pub fn bianchi(metric: &Metric) -> Result<DiffOperator, JanetError> {
    let r = riemann(metric)?;
    let cc = compatibility_operator(&r, CC_ORDER_CAP, REGULARITY_ATTEMPTS)?;
    let op = cc.operator;
    let p = op.num_targets();
    Ok(with_labels(&op, op.source_labels().to_vec(), default_labels("b", p)))
}

/// Linearized Ricci operator over ω:
/// 2R_ij = Σ_r s_r (d_rrΩ_ij + d_ijΩ_rr − d_riΩ_rj − d_rjΩ_ri).
/// Both sides carry the S₂ pairing weights.
pub fn ricci(metric: &Metric) -> DiffOperator {
    let n = metric.n();
    let pairs = sym_pairs(n);
    let mut entries = Vec::new();
    for &(i, j) in &pairs {
        let mut row = vec![DiffPolynomial::zero(n, 0); pairs.len()];
        for r in 0..n {
            let half = ParamScalar::from_rat(0, metric.sign(r), 2);
            let neg = half.neg();
            row[pair_index(n, i, j)] = row[pair_index(n, i, j)].add(&d2(n, r, r, &half));
            row[pair_index(n, r, r)] = row[pair_index(n, r, r)].add(&d2(n, i, j, &half));
            row[pair_index(n, r, j)] = row[pair_index(n, r, j)].add(&d2(n, r, i, &neg));
            row[pair_index(n, r, i)] = row[pair_index(n, r, i)].add(&d2(n, r, j, &neg));
        }
        entries.push(row);
    }
    DiffOperator::with_weights(
        n,
        0,
        entries,
        sym_labels("om", n),
        sym_labels("rc", n),
        metric_sym_weights(metric),
        metric_sym_weights(metric),
    )
}

/// Linearized Einstein operator E_ij = R_ij − ½ ω_ij ω^{kl}R_kl.
pub fn einstein(metric: &Metric) -> DiffOperator {
    let n = metric.n();
    let ric = ricci(metric);
    let pairs = sym_pairs(n);
    let mut entries = Vec::new();
    for &(i, j) in &pairs {
        let mut row = ric.row(pair_index(n, i, j)).to_vec();
        if i == j {
            // subtract (s_i/2)·Σ_k s_k R_kk
            for k in 0..n {
                let c = ParamScalar::from_rat(0, -metric.sign(i) * metric.sign(k), 2);
                let rk = ric.row(pair_index(n, k, k));
                for (dst, src) in row.iter_mut().zip(rk.iter()) {
                    *dst = dst.add(&src.scale(&c));
                }
            }
        }
        entries.push(row);
    }
    DiffOperator::with_weights(
        n,
        0,
        entries,
        sym_labels("om", n),
        sym_labels("e", n),
        metric_sym_weights(metric),
        metric_sym_weights(metric),
    )
}

// ---------------------------------------------------------------------------
// Stress parametrizations (formal adjoints)
// ---------------------------------------------------------------------------

/// Equilibrium operator: the formal adjoint of `killing`.  For the
/// Euclidean metrics this is −2·(divergence of a symmetric stress tensor).
pub fn cauchy(metric: &Metric) -> DiffOperator {
    let n = metric.n();
    let ad = killing(metric).adjoint();
    with_labels(&ad, sym_labels("sg", n), default_labels("c", n))
}

/// Airy stress parametrization: the adjoint of the plane curvature
/// operator, σ₁₁ = d₂₂φ, σ₁₂ = −d₁₂φ, σ₂₂ = d₁₁φ.
pub fn airy() -> Result<DiffOperator, JanetError> {
    let ad = riemann(&Metric::euclid(2))?.adjoint();
    Ok(with_labels(&ad, vec!["phi".to_string()], sym_labels("sg", 2)))
}

/// Beltrami stress parametrization: the adjoint of the space curvature
/// operator, a 6×6 matrix taking six stress functions φ_ij to a symmetric
/// stress tensor with vanishing divergence.
pub fn beltrami() -> Result<DiffOperator, JanetError> {
    let ad = riemann(&Metric::euclid(3))?.adjoint();
    Ok(with_labels(&ad, sym_labels("phi", 3), sym_labels("sg", 3)))
}

/// Beltrami matrix with the off-diagonal stress rows doubled: a literally
/// symmetric matrix of second-order entries, self-adjoint with unit
/// weights on both sides.
pub fn beltrami_weighted() -> Result<DiffOperator, JanetError> {
    let b = beltrami()?;
    let w = sym_weights(0, 3);
    let entries: Vec<Vec<DiffPolynomial>> = b
        .rows()
        .iter()
        .enumerate()
        .map(|(i, row)| row.iter().map(|e| e.scale(&w[i])).collect())
        .collect();
    Ok(DiffOperator::with_weights(
        3,
        0,
        entries,
        b.source_labels().to_vec(),
        b.target_labels().to_vec(),
        unit_weights(0, 6),
        unit_weights(0, 6),
    ))
}

/// Lanczos potential: the adjoint of the space Bianchi operator; its image
/// is exactly the kernel of the Beltrami matrix.
pub fn lanczos() -> Result<DiffOperator, JanetError> {
    let ad = bianchi(&Metric::euclid(3))?.adjoint();
    let m = ad.num_sources();
    Ok(with_labels(&ad, default_labels("lam", m), sym_labels("phi", 3)))
}

/// Maxwell parametrization: the Beltrami matrix restricted to the three
/// diagonal stress functions φ₁₁, φ₂₂, φ₃₃.
pub fn maxwell_param() -> Result<DiffOperator, JanetError> {
    Ok(crate::duality::keep_columns(&beltrami()?, &[0, 3, 5]))
}

/// Divergence conditions on the Einstein tensor: the compatibility
/// conditions of `einstein`.
pub fn div_sym(metric: &Metric) -> Result<DiffOperator, JanetError> {
    let cc = compatibility_operator(&einstein(metric), CC_ORDER_CAP, REGULARITY_ATTEMPTS)?;
    let op = cc.operator;
    let p = op.num_targets();
    Ok(with_labels(&op, op.source_labels().to_vec(), default_labels("dv", p)))
}

// ---------------------------------------------------------------------------
// Control and worked examples
// ---------------------------------------------------------------------------

fn pvar(np: usize, v: usize) -> ParamScalar {
    ParamScalar::from_poly(Poly::var(np, v))
}

/// Double pendulum on a sliding bar: unknowns (x, θ¹, θ²) of one variable,
/// parameters (l₁, l₂, g), equations d²x + l_i d²θ^i + g θ^i = 0.
pub fn pendulum() -> DiffOperator {
    let one = ParamScalar::from_int(3, 1);
    let g = pvar(3, 2);
    let dd = |c: &ParamScalar| DiffPolynomial::from_term(1, vec![2], c.clone());
    let c0 = |c: &ParamScalar| DiffPolynomial::from_term(1, vec![0], c.clone());
    let rows = vec![
        vec![dd(&one), dd(&pvar(3, 0)).add(&c0(&g)), DiffPolynomial::zero(1, 3)],
        vec![dd(&one), DiffPolynomial::zero(1, 3), dd(&pvar(3, 1)).add(&c0(&g))],
    ];
    DiffOperator::new(
        1,
        3,
        rows,
        vec!["x".into(), "th1".into(), "th2".into()],
        vec!["eq1".into(), "eq2".into()],
    )
}

/// First-order state-space form of the pendulum with the bar acceleration
/// as input: states (x, ẋ, θ¹, θ̇¹, θ², θ̇²), input u = d²x.
pub fn pendulum_state_space() -> (Vec<Vec<ParamScalar>>, Vec<Vec<ParamScalar>>) {
    let np = 3;
    let z = ParamScalar::zero(np);
    let one = ParamScalar::from_int(np, 1);
    let g = pvar(np, 2);
    // −g/l_i and −1/l_i
    let gl = |i: usize| g.neg().mul(&pvar(np, i).inv());
    let il = |i: usize| pvar(np, i).inv().neg();
    let mut a = vec![vec![z.clone(); 6]; 6];
    a[0][1] = one.clone();
    a[2][3] = one.clone();
    a[4][5] = one.clone();
    a[3][2] = gl(0);
    a[5][4] = gl(1);
    let mut b = vec![vec![z.clone(); 1]; 6];
    b[1][0] = one;
    b[3][0] = il(0);
    b[5][0] = il(1);
    (a, b)
}

/// Two-equation scalar system d₂₂ξ = 0, d₁₂ξ + a·d₁ξ = 0 over one
/// parameter: the branch example whose completion, sequences, and dual all
/// change at a = 0.
pub fn example_1_1() -> DiffOperator {
    let one = ParamScalar::from_int(1, 1);
    let a = pvar(1, 0);
    let e1 = DiffPolynomial::from_term(2, vec![0, 2], one.clone());
    let e2 = DiffPolynomial::from_term(2, vec![1, 1], one)
        .add(&DiffPolynomial::from_term(2, vec![1, 0], a));
    DiffOperator::new(
        2,
        1,
        vec![vec![e1], vec![e2]],
        vec!["xi".into()],
        vec!["eq1".into(), "eq2".into()],
    )
}

pub fn macaulay_2_17() -> DiffOperator {
    testsys::mac_2_17()
}

pub fn macaulay_2_18() -> DiffOperator {
    testsys::mac_2_18()
}

pub fn macaulay_2_19() -> DiffOperator {
    testsys::mac_2_19()
}

pub fn macaulay_2_20() -> DiffOperator {
    testsys::mac_2_20()
}

pub fn macaulay_2_21() -> DiffOperator {
    testsys::mac_2_21()
}

pub fn macaulay_2_22a() -> DiffOperator {
    testsys::mac_2_22a()
}

pub fn macaulay_2_22b() -> DiffOperator {
    testsys::mac_2_22b()
}

// ---------------------------------------------------------------------------
// Name dispatch
// ---------------------------------------------------------------------------

/// Metric-independent entry names.
const PLAIN_NAMES: &[&str] = &[
    "example_1_1",
    "macaulay_2_17",
    "macaulay_2_18",
    "macaulay_2_19",
    "macaulay_2_20",
    "macaulay_2_21",
    "macaulay_2_22a",
    "macaulay_2_22b",
    "pendulum",
    "airy",
    "beltrami",
    "beltrami_weighted",
    "lanczos",
    "maxwell_param",
];

/// Metric families and the metrics each is registered over.
const METRIC_FAMILIES: &[(&str, &[&str])] = &[
    ("killing", &["euclid1", "euclid2", "euclid3", "mink4"]),
    ("conformal_killing", &["euclid3", "euclid4", "euclid5"]),
    ("riemann", &["euclid2", "euclid3", "mink4"]),
    ("bianchi", &["euclid3", "mink4"]),
    ("ricci", &["euclid3", "mink4"]),
    ("einstein", &["euclid3", "mink4"]),
    ("cauchy", &["euclid2", "euclid3", "mink4"]),
    ("div", &["mink4"]),
];

/// Every name `make` resolves.
pub fn names() -> Vec<String> {
    let mut out: Vec<String> = PLAIN_NAMES.iter().map(|s| s.to_string()).collect();
    for (family, metrics) in METRIC_FAMILIES {
        for m in *metrics {
            out.push(format!("{}_{}", family, m));
        }
    }
    out
}

/// Parameter names of entries that carry free constants.
pub fn param_names(name: &str) -> &'static [&'static str] {
    match name {
        "example_1_1" => &["a"],
        "pendulum" => &["l1", "l2", "g"],
        _ => &[],
    }
}

/// Build a registry entry by name, e.g. `killing_euclid3`, `einstein_mink4`,
/// `beltrami`, `pendulum`.
pub fn make(name: &str) -> Result<DiffOperator, JanetError> {
    match name {
        "example_1_1" => return Ok(example_1_1()),
        "macaulay_2_17" => return Ok(macaulay_2_17()),
        "macaulay_2_18" => return Ok(macaulay_2_18()),
        "macaulay_2_19" => return Ok(macaulay_2_19()),
        "macaulay_2_20" => return Ok(macaulay_2_20()),
        "macaulay_2_21" => return Ok(macaulay_2_21()),
        "macaulay_2_22a" => return Ok(macaulay_2_22a()),
        "macaulay_2_22b" => return Ok(macaulay_2_22b()),
        "pendulum" => return Ok(pendulum()),
        "airy" => return airy(),
        "beltrami" => return beltrami(),
        "beltrami_weighted" => return beltrami_weighted(),
        "lanczos" => return lanczos(),
        "maxwell_param" => return maxwell_param(),
        _ => {}
    }
    let unknown = || JanetError::UnknownCatalogEntry(name.to_string());
    let (family, metric) = name.rsplit_once('_').ok_or_else(unknown)?;
    let metric = Metric::parse(metric).ok_or_else(unknown)?;
    match family {
        "killing" => Ok(killing(&metric)),
        "conformal_killing" => Ok(conformal_killing(&metric)),
        "riemann" => riemann(&metric),
        "bianchi" => bianchi(&metric),
        "ricci" => Ok(ricci(&metric)),
        "einstein" => Ok(einstein(&metric)),
        "cauchy" => Ok(cauchy(&metric)),
        "div" => div_sym(&metric),
        _ => Err(unknown()),
    }
}

// ---------------------------------------------------------------------------
// Cross-checks
// ---------------------------------------------------------------------------

/// One registry-wide consistency check.
pub struct CrossCheck {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn check(out: &mut Vec<CrossCheck>, name: &'static str, pass: bool, detail: String) {
    out.push(CrossCheck { name, pass, detail });
}

/// Dimension of ĝ_ell for the conformal Killing symbol and δ-cohomology of
/// its first prolongation ĝ₂ (which is all that can be nonzero: ĝ₃ = 0).
fn conformal_symbol(n: usize) -> (usize, Vec<usize>) {
    let sys = crate::jets::JetSystem::from_operator(&conformal_killing(&Metric::euclid(n)));
    let fam = crate::jets::delta::SymbolFamily::of(&sys);
    let g3 = fam.dim_g(3);
    let h2: Vec<usize> = (1..=3).map(|s| fam.cohomology_dim(2, s)).collect();
    (g3, h2)
}

/// Registry-wide consistency battery: adjoint involution, the classical
/// operator identities, curvature compositions, and the conformal symbol
/// closures.  Every check is independent of how the entries were built.
pub fn crosschecks() -> Result<Vec<CrossCheck>, JanetError> {
    let mut out = Vec::new();

    // Formal adjoint is an involution on every entry.
    let mut bad = Vec::new();
    for name in names() {
        let op = make(&name)?;
        if op.adjoint().adjoint() != op {
            bad.push(name);
        }
    }
    check(
        &mut out,
        "adjoint_involution",
        bad.is_empty(),
        if bad.is_empty() { "ad(ad(D)) = D on all entries".into() } else { format!("failed: {:?}", bad) },
    );

    // Equilibrium operators annihilate the stress parametrizations.
    let a = airy()?;
    let b = beltrami()?;
    let c2 = cauchy(&Metric::euclid(2));
    let c3 = cauchy(&Metric::euclid(3));
    check(
        &mut out,
        "stress_parametrizations",
        c2.compose(&a).is_zero() && c3.compose(&b).is_zero(),
        "cauchy ∘ airy = 0 and cauchy ∘ beltrami = 0".into(),
    );

    // Curvature compositions vanish: Bianchi ∘ Riemann and div ∘ Einstein.
    let mut comp = true;
    for m in [Metric::euclid(3), Metric::minkowski4()] {
        comp &= bianchi(&m)?.compose(&riemann(&m)?).is_zero();
    }
    comp &= div_sym(&Metric::minkowski4())?.compose(&einstein(&Metric::minkowski4())).is_zero();
    check(
        &mut out,
        "curvature_compositions",
        comp,
        "bianchi ∘ riemann = 0 (euclid3, mink4); div ∘ einstein = 0 (mink4)".into(),
    );

    // Curvature target counts match the classical dimension ladder.
    let dims = [
        riemann(&Metric::euclid(2))?.num_targets(),
        riemann(&Metric::euclid(3))?.num_targets(),
        riemann(&Metric::minkowski4())?.num_targets(),
        bianchi(&Metric::euclid(3))?.num_targets(),
        bianchi(&Metric::minkowski4())?.num_targets(),
    ];
    check(
        &mut out,
        "curvature_dimensions",
        dims == [1, 6, 20, 3, 20],
        format!("riemann n=2,3,4 and bianchi n=3,4 target counts {:?}", dims),
    );

    // First compatibility of the conformal Killing operator.
    let f1_3 = compatibility_operator(
        &conformal_killing(&Metric::euclid(3)),
        CC_ORDER_CAP,
        REGULARITY_ATTEMPTS,
    )?;
    let f1_4 = compatibility_operator(
        &conformal_killing(&Metric::euclid(4)),
        CC_ORDER_CAP,
        REGULARITY_ATTEMPTS,
    )?;
    check(
        &mut out,
        "conformal_first_compatibility",
        f1_3.operator.num_targets() == 5
            && f1_3.operator.order() == 3
            && f1_4.operator.num_targets() == 10
            && f1_4.operator.order() == 2,
        format!(
            "n=3: {} generators of order {}; n=4: {} generators of order {}",
            f1_3.operator.num_targets(),
            f1_3.operator.order(),
            f1_4.operator.num_targets(),
            f1_4.operator.order()
        ),
    );

    // Conformal symbol closure: ĝ₃ = 0 always; ĝ₂ is 2-acyclic from n = 4
    // and 3-acyclic from n = 5.
    let (g3_3, h_3) = conformal_symbol(3);
    let (g3_4, h_4) = conformal_symbol(4);
    let (g3_5, h_5) = conformal_symbol(5);
    let closure = g3_3 == 0
        && g3_4 == 0
        && g3_5 == 0
        && h_3[1] != 0
        && h_4[1] == 0
        && h_4[2] != 0
        && h_5[1] == 0
        && h_5[2] == 0;
    check(
        &mut out,
        "conformal_symbol_closure",
        closure,
        format!(
            "dim ĝ₃ = ({}, {}, {}); H^{{2,s}}(ĝ) s=1..3: n=3 {:?}, n=4 {:?}, n=5 {:?}",
            g3_3, g3_4, g3_5, h_3, h_4, h_5
        ),
    );

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::duality::groebner::{same_row_module, ModuleBasis};
    use crate::jets::delta::SymbolFamily;
    use crate::jets::tabular::JanetTabular;
    use crate::jets::JetSystem;
    use crate::sequences::janet_sequence;

    fn d(n: usize, mu: &[u32], c: i64) -> DiffPolynomial {
        DiffPolynomial::from_term(n, mu.to_vec(), ParamScalar::from_int(0, c))
    }

    #[test]
    fn the_line_killing_operator_is_twice_the_derivative() {
        let k = killing(&Metric::euclid(1));
        assert_eq!(k.rows(), &[vec![d(1, &[1], 2)]]);
        assert_eq!(k.adjoint().rows(), &[vec![d(1, &[1], -2)]]);
    }

    #[test]
    fn plane_curvature_is_the_saint_venant_identity() {
        let r = riemann(&Metric::euclid(2)).unwrap();
        assert_eq!(
            r.rows(),
            &[vec![d(2, &[0, 2], 1), d(2, &[1, 1], -2), d(2, &[2, 0], 1)]]
        );
        let a = airy().unwrap();
        let cols: Vec<_> = a.rows().iter().map(|row| row[0].clone()).collect();
        assert_eq!(cols, vec![d(2, &[0, 2], 1), d(2, &[1, 1], -1), d(2, &[2, 0], 1)]);
        // The relations among the Airy stresses are the plane equilibrium
        // equations.
        let cc = compatibility_operator(&a, 4, 20).unwrap();
        assert!(same_row_module(2, 0, 3, cc.operator.rows(), cauchy(&Metric::euclid(2)).rows()));
    }

    #[test]
    fn the_beltrami_matrix_matches_the_classical_display() {
        let b = beltrami().unwrap();
        let z = || DiffPolynomial::zero(3, 0);
        let expected = vec![
            vec![z(), z(), z(), d(3, &[0, 0, 2], 1), d(3, &[0, 1, 1], -2), d(3, &[0, 2, 0], 1)],
            vec![z(), d(3, &[0, 0, 2], -1), d(3, &[0, 1, 1], 1), z(), d(3, &[1, 0, 1], 1), d(3, &[1, 1, 0], -1)],
            vec![z(), d(3, &[0, 1, 1], 1), d(3, &[0, 2, 0], -1), d(3, &[1, 0, 1], -1), d(3, &[1, 1, 0], 1), z()],
            vec![d(3, &[0, 0, 2], 1), z(), d(3, &[1, 0, 1], -2), z(), z(), d(3, &[2, 0, 0], 1)],
            vec![d(3, &[0, 1, 1], -1), d(3, &[1, 0, 1], 1), d(3, &[1, 1, 0], 1), z(), d(3, &[2, 0, 0], -1), z()],
            vec![d(3, &[0, 2, 0], 1), d(3, &[1, 1, 0], -2), z(), d(3, &[2, 0, 0], 1), z(), z()],
        ];
        assert_eq!(b.rows(), &expected[..]);
        // The adjoint of the display is the curvature operator again.
        assert_eq!(b.adjoint().rows(), riemann(&Metric::euclid(3)).unwrap().rows());
        // Stresses produced this way are in equilibrium.
        assert!(cauchy(&Metric::euclid(3)).compose(&b).is_zero());
        // Three of the six potentials are redundant.
        assert_eq!(b.generic_chi_rank(), 3);
    }

    #[test]
    fn doubling_offdiagonal_rows_makes_beltrami_self_adjoint() {
        let b = beltrami().unwrap();
        assert!(!b.is_self_adjoint());
        let bw = beltrami_weighted().unwrap();
        assert!(bw.is_self_adjoint());
        // Literal symmetry of the 6×6 matrix.
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(bw.entry(i, j), bw.entry(j, i));
            }
        }
        assert_eq!(bw.generic_chi_rank(), 3);
    }

    #[test]
    fn the_beltrami_system_is_involutive_with_classical_characters() {
        let sys = JetSystem::from_operator(&beltrami().unwrap());
        let fam = SymbolFamily::of(&sys);
        assert!(crate::jets::tabular::cartan_test(&fam, 2));
        let tab = JanetTabular::of(&sys);
        assert_eq!(tab.beta(), &[0, 3, 3]);
        assert_eq!(tab.alpha(), vec![18, 9, 3]);
        // Janet sequence 6 → 6 → 3 with Euler characteristic equal to the
        // differential rank.
        let seq = janet_sequence(&sys, REGULARITY_ATTEMPTS).unwrap();
        assert_eq!(seq.dims, vec![6, 6, 3]);
        assert_eq!(seq.euler_poincare, 3);
    }

    #[test]
    fn lanczos_generates_the_column_relations_of_beltrami() {
        let b = beltrami().unwrap();
        let l = lanczos().unwrap();
        assert_eq!(l.num_sources(), 3);
        assert!(b.compose(&l).is_zero());
        // Column relations of B, computed independently by syzygy.
        let bt: Vec<Vec<DiffPolynomial>> = (0..6)
            .map(|j| (0..6).map(|i| b.entry(i, j).clone()).collect())
            .collect();
        let syz = ModuleBasis::new(3, 0, 6, bt).syzygies();
        let lt: Vec<Vec<DiffPolynomial>> = (0..3)
            .map(|k| (0..6).map(|j| l.entry(j, k).clone()).collect())
            .collect();
        assert!(same_row_module(3, 0, 6, &syz, &lt));
    }

    #[test]
    fn curvature_counts_follow_the_classical_ladder() {
        assert_eq!(killing(&Metric::minkowski4()).num_targets(), 10);
        let r = riemann(&Metric::minkowski4()).unwrap();
        assert_eq!(r.num_targets(), 20);
        assert_eq!(r.order(), 2);
        let bi = bianchi(&Metric::minkowski4()).unwrap();
        assert_eq!(bi.num_targets(), 20);
        assert_eq!(bi.order(), 1);
        assert_eq!(riemann(&Metric::euclid(3)).unwrap().num_targets(), 6);
        assert_eq!(bianchi(&Metric::euclid(3)).unwrap().num_targets(), 3);
    }

    #[test]
    fn einstein_is_self_adjoint_but_ricci_is_not() {
        for m in [Metric::euclid(3), Metric::minkowski4()] {
            assert!(einstein(&m).is_self_adjoint(), "einstein over {}", m.name());
            assert!(!ricci(&m).is_self_adjoint(), "ricci over {}", m.name());
        }
    }

    #[test]
    fn einstein_divergence_conditions_are_first_order() {
        let dv = div_sym(&Metric::minkowski4()).unwrap();
        assert_eq!(dv.num_targets(), 4);
        assert_eq!(dv.order(), 1);
        assert!(dv.compose(&einstein(&Metric::minkowski4())).is_zero());
    }

    #[test]
    fn the_pendulum_is_the_two_mass_bar_system() {
        let p = pendulum();
        assert_eq!(p.n(), 1);
        assert_eq!(p.nparams(), 3);
        assert_eq!(p.num_sources(), 3);
        assert_eq!(p.num_targets(), 2);
        assert_eq!(p.order(), 2);
        // d²x appears in both equations with coefficient one.
        assert_eq!(p.entry(0, 0), p.entry(1, 0));
        let (a, b) = pendulum_state_space();
        assert_eq!(a.len(), 6);
        assert_eq!(b[0].len(), 1);
    }

    #[test]
    fn conformal_killing_drops_one_trace_component() {
        for n in [3, 4, 5] {
            let ck = conformal_killing(&Metric::euclid(n));
            assert_eq!(ck.num_targets(), n * (n + 1) / 2 - 1);
            assert_eq!(ck.num_sources(), n);
        }
    }

    #[test]
    fn every_registered_name_resolves() {
        for name in names() {
            let op = make(&name).unwrap_or_else(|e| panic!("{} failed: {}", name, e));
            assert!(op.num_targets() > 0, "{} has no rows", name);
        }
        assert!(matches!(make("nonsense"), Err(JanetError::UnknownCatalogEntry(_))));
        assert!(matches!(make("killing_heis3"), Err(JanetError::UnknownCatalogEntry(_))));
        assert_eq!(param_names("pendulum"), &["l1", "l2", "g"]);
        assert_eq!(param_names("airy"), &[] as &[&str]);
    }

    #[test]
    fn the_crosscheck_battery_is_green() {
        for c in crosschecks().unwrap() {
            assert!(c.pass, "{}: {}", c.name, c.detail);
        }
    }
}
