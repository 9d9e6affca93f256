//! Matrices of constant-coefficient differential operators.
//!
//! Entries live in the commutative ring K[d₁,…,dₙ] over the parameter field
//! K. An operator carries labels and positive weights on its source and
//! target components; the weights enter the formal adjoint so that operators
//! on symmetrized components (where off-diagonal entries are stored once but
//! counted twice) dualize correctly.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::combin::{index_add, indices_up_to, JetColumns};
use crate::error::JanetError;
use crate::field::poly::{Monomial, Poly};
use crate::field::scalar::ParamScalar;
use crate::field::matrix::{ScalarMatrix, SparseRow};

/// Polynomial in the derivative symbols d₁,…,dₙ with scalar coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DiffPolynomial {
    n: usize,
    nparams: usize,
    terms: BTreeMap<Monomial, ParamScalar>,
}

impl DiffPolynomial {
    pub fn zero(n: usize, nparams: usize) -> Self {
        DiffPolynomial { n, nparams, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: ParamScalar) -> Self {
        let mut p = DiffPolynomial::zero(n, c.nvars());
        p.insert_add(Monomial(vec![0; n]), c);
        p
    }

    pub fn one(n: usize, nparams: usize) -> Self {
        DiffPolynomial::constant(n, ParamScalar::one(nparams))
    }

    /// The single derivative d_i (0-based axis).
    pub fn d(n: usize, nparams: usize, i: usize) -> Self {
        assert!(i < n);
        let mut mu = vec![0u32; n];
        mu[i] = 1;
        DiffPolynomial::from_term(n, mu, ParamScalar::one(nparams))
    }

    pub fn from_term(n: usize, mu: Vec<u32>, c: ParamScalar) -> Self {
        assert_eq!(mu.len(), n);
        let mut p = DiffPolynomial { n, nparams: c.nvars(), terms: BTreeMap::new() };
        p.insert_add(Monomial(mu), c);
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nparams(&self) -> usize {
        self.nparams
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn order(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &ParamScalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, mu: &[u32]) -> ParamScalar {
        self.terms
            .get(&Monomial(mu.to_vec()))
            .cloned()
            .unwrap_or_else(|| ParamScalar::zero(self.nparams))
    }

    fn insert_add(&mut self, mu: Monomial, c: ParamScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mu) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &DiffPolynomial) -> DiffPolynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_add(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &DiffPolynomial) -> DiffPolynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_add(m.clone(), c.neg());
        }
        out
    }

    pub fn neg(&self) -> DiffPolynomial {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn scale(&self, c: &ParamScalar) -> DiffPolynomial {
        if c.is_zero() {
            return DiffPolynomial::zero(self.n, self.nparams);
        }
        let mut out = DiffPolynomial::zero(self.n, self.nparams);
        for (m, v) in &self.terms {
            out.insert_add(m.clone(), v.mul(c));
        }
        out
    }

    pub fn mul(&self, other: &DiffPolynomial) -> DiffPolynomial {
        let mut out = DiffPolynomial::zero(self.n, self.nparams);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.insert_add(Monomial(index_add(&ma.0, &mb.0)), ca.mul(cb));
            }
        }
        out
    }

    /// Multiply by the monomial d^ν.
    pub fn shift(&self, nu: &[u32]) -> DiffPolynomial {
        let mut out = DiffPolynomial::zero(self.n, self.nparams);
        for (m, c) in &self.terms {
            out.insert_add(Monomial(index_add(&m.0, nu)), c.clone());
        }
        out
    }

    /// d_μ ↦ (−1)^{|μ|} d_μ, the sign flip of integration by parts.
    pub fn flip(&self) -> DiffPolynomial {
        let mut out = DiffPolynomial::zero(self.n, self.nparams);
        for (m, c) in &self.terms {
            if m.degree() % 2 == 1 {
                out.insert_add(m.clone(), c.neg());
            } else {
                out.insert_add(m.clone(), c.clone());
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> DiffPolynomial {
        let mut acc = DiffPolynomial::one(self.n, self.nparams);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn specialize(
        &self,
        binding: &[Option<(BigInt, BigInt)>],
    ) -> Result<DiffPolynomial, JanetError> {
        let mut out = DiffPolynomial::zero(self.n, self.nparams);
        for (m, c) in &self.terms {
            out.insert_add(m.clone(), c.specialize(binding)?);
        }
        Ok(out)
    }

    /// Substitute parameter `i` by parameter `j` in every coefficient.
    pub fn identify_params(&self, i: usize, j: usize) -> Result<DiffPolynomial, JanetError> {
        let mut out = DiffPolynomial::zero(self.n, self.nparams);
        for (m, c) in &self.terms {
            out.insert_add(m.clone(), c.identify_params(i, j)?);
        }
        Ok(out)
    }

    /// Substitute dᵢ ↦ χᵢ as fresh variables appended to the parameter list,
    /// yielding a scalar over nparams + n variables.
    pub fn chi_scalar(&self) -> ParamScalar {
        let total = self.nparams + self.n;
        let mut acc = ParamScalar::zero(total);
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; total];
            exps[self.nparams..].copy_from_slice(&m.0);
            let chi = ParamScalar::from_poly(Poly::monomial(total, exps, 1));
            acc = acc.add(&chi.mul(&c.extend_vars(total)));
        }
        acc
    }

    /// DSL-compatible rendering: terms by descending derivative monomial,
    /// monomials as `d[i,j,…]` with 1-based repeated indices.
    pub fn display(&self, param_names: &[&str]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let mono = if m.degree() == 0 {
                String::new()
            } else {
                let mut idx = Vec::new();
                for (axis, &e) in m.0.iter().enumerate() {
                    for _ in 0..e {
                        idx.push((axis + 1).to_string());
                    }
                }
                format!("d[{}]", idx.join(","))
            };
            let cs = c.display(param_names);
            let needs_parens = c.den().is_one() && c.num().num_terms() > 1;
            let term = if mono.is_empty() {
                cs
            } else if c.is_one() {
                mono
            } else if cs == "-1" {
                format!("-{}", mono)
            } else if needs_parens {
                format!("({})*{}", cs, mono)
            } else {
                format!("{}*{}", cs, mono)
            };
            if i == 0 {
                out.push_str(&term);
            } else if let Some(rest) = term.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(&term);
            }
        }
        out
    }
}

/// p×m operator matrix with labeled, weighted source and target components.
#[derive(Clone, PartialEq, Debug)]
pub struct DiffOperator {
    n: usize,
    nparams: usize,
    p: usize,
    m: usize,
    entries: Vec<Vec<DiffPolynomial>>,
    source_labels: Vec<String>,
    target_labels: Vec<String>,
    source_weights: Vec<ParamScalar>,
    target_weights: Vec<ParamScalar>,
}

pub fn default_labels(prefix: &str, k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("{}{}", prefix, i)).collect()
}

pub fn unit_weights(nparams: usize, k: usize) -> Vec<ParamScalar> {
    vec![ParamScalar::one(nparams); k]
}

impl DiffOperator {
    pub fn new(
        n: usize,
        nparams: usize,
        entries: Vec<Vec<DiffPolynomial>>,
        source_labels: Vec<String>,
        target_labels: Vec<String>,
    ) -> Self {
        let sw = unit_weights(nparams, source_labels.len());
        let tw = unit_weights(nparams, target_labels.len());
        DiffOperator::with_weights(n, nparams, entries, source_labels, target_labels, sw, tw)
    }

    pub fn with_weights(
        n: usize,
        nparams: usize,
        entries: Vec<Vec<DiffPolynomial>>,
        source_labels: Vec<String>,
        target_labels: Vec<String>,
        source_weights: Vec<ParamScalar>,
        target_weights: Vec<ParamScalar>,
    ) -> Self {
        let p = target_labels.len();
        let m = source_labels.len();
        assert_eq!(entries.len(), p, "row count must match target labels");
        for row in &entries {
            assert_eq!(row.len(), m, "column count must match source labels");
            for e in row {
                assert_eq!(e.n(), n);
            }
        }
        assert_eq!(source_weights.len(), m);
        assert_eq!(target_weights.len(), p);
        assert!(source_weights.iter().all(|w| !w.is_zero()), "weights must be nonzero");
        assert!(target_weights.iter().all(|w| !w.is_zero()), "weights must be nonzero");
        DiffOperator {
            n,
            nparams,
            p,
            m,
            entries,
            source_labels,
            target_labels,
            source_weights,
            target_weights,
        }
    }

    pub fn identity(n: usize, nparams: usize, labels: Vec<String>) -> Self {
        let m = labels.len();
        let entries = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        if i == j {
                            DiffPolynomial::one(n, nparams)
                        } else {
                            DiffPolynomial::zero(n, nparams)
                        }
                    })
                    .collect()
            })
            .collect();
        DiffOperator::new(n, nparams, entries, labels.clone(), labels)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nparams(&self) -> usize {
        self.nparams
    }

    /// Number of target components (equations).
    pub fn num_targets(&self) -> usize {
        self.p
    }

    /// Number of source components (unknowns).
    pub fn num_sources(&self) -> usize {
        self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> &DiffPolynomial {
        &self.entries[i][j]
    }

    pub fn row(&self, i: usize) -> &[DiffPolynomial] {
        &self.entries[i]
    }

    pub fn rows(&self) -> &[Vec<DiffPolynomial>] {
        &self.entries
    }

    pub fn source_labels(&self) -> &[String] {
        &self.source_labels
    }

    pub fn target_labels(&self) -> &[String] {
        &self.target_labels
    }

    pub fn source_weights(&self) -> &[ParamScalar] {
        &self.source_weights
    }

    pub fn target_weights(&self) -> &[ParamScalar] {
        &self.target_weights
    }

    pub fn order(&self) -> u32 {
        self.entries
            .iter()
            .flatten()
            .map(|e| e.order())
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|e| e.is_zero())
    }

    /// Composition self ∘ other (apply `other` first).
    pub fn compose(&self, other: &DiffOperator) -> DiffOperator {
        assert_eq!(self.m, other.p, "composition: inner dimensions must agree");
        assert_eq!(self.n, other.n);
        let entries = (0..self.p)
            .map(|i| {
                (0..other.m)
                    .map(|k| {
                        let mut acc = DiffPolynomial::zero(self.n, self.nparams);
                        for j in 0..self.m {
                            acc = acc.add(&self.entries[i][j].mul(&other.entries[j][k]));
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        DiffOperator::with_weights(
            self.n,
            self.nparams,
            entries,
            other.source_labels.clone(),
            self.target_labels.clone(),
            other.source_weights.clone(),
            self.target_weights.clone(),
        )
    }

    /// Weighted formal adjoint: entrywise
    /// ad(A)[i,j] = w_tgt[j] / w_src[i] · flip(A[j,i]).
    /// Source and target spaces swap, keeping their weights, so the adjoint
    /// is an involution and reverses composition.
    pub fn adjoint(&self) -> DiffOperator {
        let entries = (0..self.m)
            .map(|i| {
                (0..self.p)
                    .map(|j| {
                        let f = self.target_weights[j].div(&self.source_weights[i]);
                        self.entries[j][i].flip().scale(&f)
                    })
                    .collect()
            })
            .collect();
        DiffOperator::with_weights(
            self.n,
            self.nparams,
            entries,
            self.target_labels.clone(),
            self.source_labels.clone(),
            self.target_weights.clone(),
            self.source_weights.clone(),
        )
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.p == self.m && self.adjoint().entries == self.entries
    }

    /// Stack target components of two operators on the same source space.
    pub fn stack(&self, other: &DiffOperator) -> DiffOperator {
        assert_eq!(self.m, other.m, "stack: source dimensions must agree");
        assert_eq!(self.n, other.n);
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        let mut tl = self.target_labels.clone();
        tl.extend(other.target_labels.iter().cloned());
        let mut tw = self.target_weights.clone();
        tw.extend(other.target_weights.iter().cloned());
        DiffOperator::with_weights(
            self.n,
            self.nparams,
            entries,
            self.source_labels.clone(),
            tl,
            self.source_weights.clone(),
            tw,
        )
    }

    pub fn specialize(
        &self,
        binding: &[Option<(BigInt, BigInt)>],
    ) -> Result<DiffOperator, JanetError> {
        let mut entries = Vec::with_capacity(self.p);
        for row in &self.entries {
            let mut r = Vec::with_capacity(self.m);
            for e in row {
                r.push(e.specialize(binding)?);
            }
            entries.push(r);
        }
        let mut sw = Vec::with_capacity(self.m);
        for w in &self.source_weights {
            sw.push(w.specialize(binding)?);
        }
        let mut tw = Vec::with_capacity(self.p);
        for w in &self.target_weights {
            tw.push(w.specialize(binding)?);
        }
        Ok(DiffOperator::with_weights(
            self.n,
            self.nparams,
            entries,
            self.source_labels.clone(),
            self.target_labels.clone(),
            sw,
            tw,
        ))
    }

    /// Substitute parameter `i` by parameter `j` throughout (coefficients and
    /// weights), e.g. to study the locus where two physical constants agree.
    pub fn identify_params(&self, i: usize, j: usize) -> Result<DiffOperator, JanetError> {
        let mut entries = Vec::with_capacity(self.p);
        for row in &self.entries {
            let mut r = Vec::with_capacity(self.m);
            for e in row {
                r.push(e.identify_params(i, j)?);
            }
            entries.push(r);
        }
        let mut sw = Vec::with_capacity(self.m);
        for w in &self.source_weights {
            let w = w.identify_params(i, j)?;
            if w.is_zero() {
                return Err(JanetError::SpecializationPole);
            }
            sw.push(w);
        }
        let mut tw = Vec::with_capacity(self.p);
        for w in &self.target_weights {
            let w = w.identify_params(i, j)?;
            if w.is_zero() {
                return Err(JanetError::SpecializationPole);
            }
            tw.push(w);
        }
        Ok(DiffOperator::with_weights(
            self.n,
            self.nparams,
            entries,
            self.source_labels.clone(),
            self.target_labels.clone(),
            sw,
            tw,
        ))
    }

    /// Linear change of independent variables x̄ = Cx, rewriting each
    /// dᵢ ↦ Σⱼ C[j][i] d̄ⱼ. Fails on a singular C.
    pub fn change_variables(&self, c: &[Vec<ParamScalar>]) -> Result<DiffOperator, JanetError> {
        assert_eq!(c.len(), self.n);
        for row in c {
            assert_eq!(row.len(), self.n);
        }
        let rows: Vec<SparseRow> = c
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(j, v)| (j as u32, v.clone()))
                    .collect()
            })
            .collect();
        let cm = ScalarMatrix::from_rows(self.nparams, self.n, rows);
        if cm.rref_generic().rank < self.n {
            return Err(JanetError::SingularChange);
        }
        let subs: Vec<DiffPolynomial> = (0..self.n)
            .map(|i| {
                let mut s = DiffPolynomial::zero(self.n, self.nparams);
                for j in 0..self.n {
                    if !c[j][i].is_zero() {
                        s = s.add(&DiffPolynomial::d(self.n, self.nparams, j).scale(&c[j][i]));
                    }
                }
                s
            })
            .collect();
        let entries = self
            .entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| {
                        let mut acc = DiffPolynomial::zero(self.n, self.nparams);
                        for (mu, coef) in e.terms() {
                            let mut t = DiffPolynomial::constant(self.n, coef.clone());
                            for (axis, &k) in mu.0.iter().enumerate() {
                                if k > 0 {
                                    t = t.mul(&subs[axis].pow(k));
                                }
                            }
                            acc = acc.add(&t);
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        Ok(DiffOperator::with_weights(
            self.n,
            self.nparams,
            entries,
            self.source_labels.clone(),
            self.target_labels.clone(),
            self.source_weights.clone(),
            self.target_weights.clone(),
        ))
    }

    /// Row coordinates of the order-r prolongation: (target index τ, ν) with
    /// |ν| ≤ r, τ-major, ν by ascending degree then lex.
    pub fn prolongation_rows(&self, r: u32) -> Vec<(usize, Monomial)> {
        let nus = indices_up_to(self.n, r);
        let mut rows = Vec::with_capacity(self.p * nus.len());
        for tau in 0..self.p {
            for nu in &nus {
                rows.push((tau, Monomial(nu.clone())));
            }
        }
        rows
    }

    /// Matrix of all derivative shifts d_ν · A^τ, |ν| ≤ r, over the jet
    /// columns of order ≤ order(A) + r. Its rank gives the dimension of the
    /// equation space; covectors in its left kernel are integrability
    /// relations at this level.
    pub fn prolongation_matrix(&self, r: u32) -> (ScalarMatrix, JetColumns) {
        let q = self.order() + r;
        let cols = JetColumns::new(self.n, self.m, q);
        let mut mat = ScalarMatrix::new(self.nparams, cols.len());
        for (tau, nu) in self.prolongation_rows(r) {
            let mut row: SparseRow = Vec::new();
            for k in 0..self.m {
                for (mu, c) in self.entries[tau][k].terms() {
                    let col = cols.col_index(k, &index_add(&mu.0, &nu.0));
                    row.push((col as u32, c.clone()));
                }
            }
            row.sort_by_key(|(c, _)| *c);
            mat.push_row(row);
        }
        (mat, cols)
    }

    /// Generic rank of the operator's coefficient matrix after substituting
    /// commuting indeterminates for the derivatives — the rank over the
    /// fraction field of K[χ₁,…,χₙ].
    pub fn generic_chi_rank(&self) -> usize {
        let total = self.nparams + self.n;
        let mut mat = ScalarMatrix::new(total, self.m);
        for row in &self.entries {
            let mut r: SparseRow = Vec::new();
            for (k, e) in row.iter().enumerate() {
                let s = e.chi_scalar();
                if !s.is_zero() {
                    r.push((k as u32, s));
                }
            }
            mat.push_row(r);
        }
        mat.rref_generic().rank
    }

    pub fn display(&self, param_names: &[&str]) -> Vec<String> {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let terms: Vec<String> = row
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| !e.is_zero())
                    .map(|(j, e)| {
                        let es = e.display(param_names);
                        if e.num_terms() > 1 {
                            format!("({}) {}", es, self.source_labels[j])
                        } else {
                            format!("{} {}", es, self.source_labels[j])
                        }
                    })
                    .collect();
                let rhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
                format!("{}: {}", self.target_labels[i], rhs)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc(np: usize, v: i64) -> ParamScalar {
        ParamScalar::from_int(np, v)
    }

    fn dp(n: usize, np: usize, terms: &[(&[u32], i64)]) -> DiffPolynomial {
        let mut acc = DiffPolynomial::zero(n, np);
        for (mu, c) in terms {
            acc = acc.add(&DiffPolynomial::from_term(n, mu.to_vec(), sc(np, *c)));
        }
        acc
    }

    /// 1 unknown, n = 2: rows d₂₂ and d₁₂ + a·d₁ — the branching pair used
    /// throughout.
    fn branching_op() -> DiffOperator {
        let a = ParamScalar::from_poly(Poly::var(1, 0));
        let r1 = dp(2, 1, &[(&[0, 2], 1)]);
        let r2 = dp(2, 1, &[(&[1, 1], 1)]).add(&DiffPolynomial::from_term(2, vec![1, 0], a));
        DiffOperator::new(
            2,
            1,
            vec![vec![r1], vec![r2]],
            default_labels("y", 1),
            default_labels("eq", 2),
        )
    }

    #[test]
    fn adjoint_is_an_involution() {
        let np = 1;
        let a = ParamScalar::from_poly(Poly::var(np, 0));
        let e11 = dp(2, np, &[(&[2, 0], 1)]).add(&DiffPolynomial::from_term(2, vec![1, 0], a));
        let e12 = dp(2, np, &[(&[0, 1], 3)]);
        let op = DiffOperator::with_weights(
            2,
            np,
            vec![vec![e11, e12]],
            default_labels("u", 2),
            default_labels("f", 1),
            vec![sc(np, 1), sc(np, 2)],
            vec![sc(np, 3)],
        );
        assert_eq!(op.adjoint().adjoint(), op);
    }

    #[test]
    fn adjoint_flips_odd_orders_only() {
        let op = branching_op();
        let ad = op.adjoint();
        // d₂₂ is even: unchanged. d₁₂ even, a·d₁ odd: sign flips.
        assert_eq!(ad.entry(0, 0), &dp(2, 1, &[(&[0, 2], 1)]));
        let a = ParamScalar::from_poly(Poly::var(1, 0));
        let expect = dp(2, 1, &[(&[1, 1], 1)])
            .sub(&DiffPolynomial::from_term(2, vec![1, 0], a));
        assert_eq!(ad.entry(0, 1), &expect);
    }

    #[test]
    fn adjoint_reverses_composition() {
        let np = 1;
        let a = ParamScalar::from_poly(Poly::var(np, 0));
        let b_op = DiffOperator::with_weights(
            2,
            np,
            vec![
                vec![dp(2, np, &[(&[1, 0], 1)]), dp(2, np, &[(&[0, 1], 2)])],
                vec![
                    DiffPolynomial::from_term(2, vec![0, 2], a),
                    dp(2, np, &[(&[0, 0], 1)]),
                ],
            ],
            default_labels("u", 2),
            default_labels("v", 2),
            vec![sc(np, 1), sc(np, 3)],
            vec![sc(np, 1), sc(np, 2)],
        );
        let a_op = DiffOperator::with_weights(
            2,
            np,
            vec![vec![dp(2, np, &[(&[1, 1], 1)]), dp(2, np, &[(&[1, 0], 5)])]],
            default_labels("v", 2),
            default_labels("w", 1),
            vec![sc(np, 1), sc(np, 2)],
            vec![sc(np, 4)],
        );
        let lhs = a_op.compose(&b_op).adjoint();
        let rhs = b_op.adjoint().compose(&a_op.adjoint());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn change_of_variables_chains_first_order() {
        // x̄¹ = x¹, x̄² = x¹ + x², x̄³ = x² + x³ sends the gradient rows to
        // (d̄₁+d̄₂, d̄₂+d̄₃, d̄₃).
        let grad = DiffOperator::new(
            3,
            0,
            (0..3).map(|i| vec![DiffPolynomial::d(3, 0, i)]).collect(),
            default_labels("u", 1),
            default_labels("g", 3),
        );
        let c: Vec<Vec<ParamScalar>> = vec![
            vec![sc(0, 1), sc(0, 0), sc(0, 0)],
            vec![sc(0, 1), sc(0, 1), sc(0, 0)],
            vec![sc(0, 0), sc(0, 1), sc(0, 1)],
        ];
        let moved = grad.change_variables(&c).unwrap();
        assert_eq!(moved.entry(0, 0), &dp(3, 0, &[(&[1, 0, 0], 1), (&[0, 1, 0], 1)]));
        assert_eq!(moved.entry(1, 0), &dp(3, 0, &[(&[0, 1, 0], 1), (&[0, 0, 1], 1)]));
        assert_eq!(moved.entry(2, 0), &dp(3, 0, &[(&[0, 0, 1], 1)]));
    }

    #[test]
    fn singular_change_is_rejected() {
        let grad = DiffOperator::new(
            2,
            0,
            (0..2).map(|i| vec![DiffPolynomial::d(2, 0, i)]).collect(),
            default_labels("u", 1),
            default_labels("g", 2),
        );
        let c = vec![vec![sc(0, 1), sc(0, 1)], vec![sc(0, 2), sc(0, 2)]];
        assert_eq!(grad.change_variables(&c), Err(JanetError::SingularChange));
    }

    #[test]
    fn prolongation_rank_branches_at_zero() {
        let op = branching_op();
        let (m0, c0) = op.prolongation_matrix(0);
        assert_eq!((m0.nrows(), m0.ncols()), (2, 6));
        assert_eq!(c0.len(), 6);
        assert_eq!(m0.rref_generic().rank, 2);

        let (m1, c1) = op.prolongation_matrix(1);
        assert_eq!((m1.nrows(), m1.ncols()), (6, 10));
        assert_eq!(c1.len(), 10);
        let r = m1.rref_generic();
        assert_eq!(r.rank, 6);
        assert!(r.conditions.iter().any(|c| c.display(&["a"]) == "a"));
        let z = m1
            .specialize(&[Some((BigInt::from(0), BigInt::from(1)))])
            .unwrap();
        assert_eq!(z.rank(), 5);
    }

    #[test]
    fn chi_rank_sees_through_derivative_entries() {
        // Gradient: one unknown, full rank 1.
        let grad = DiffOperator::new(
            2,
            0,
            (0..2).map(|i| vec![DiffPolynomial::d(2, 0, i)]).collect(),
            default_labels("u", 1),
            default_labels("g", 2),
        );
        assert_eq!(grad.generic_chi_rank(), 1);
        // Cauchy–Riemann-type square system: determinant −χ₁²−χ₂² ≠ 0.
        let cr = DiffOperator::new(
            2,
            0,
            vec![
                vec![DiffPolynomial::d(2, 0, 0), DiffPolynomial::d(2, 0, 1)],
                vec![
                    DiffPolynomial::d(2, 0, 1),
                    DiffPolynomial::d(2, 0, 0).neg(),
                ],
            ],
            default_labels("u", 2),
            default_labels("f", 2),
        );
        assert_eq!(cr.generic_chi_rank(), 2);
    }

    #[test]
    fn display_is_dsl_compatible() {
        let op = branching_op();
        assert_eq!(op.entry(0, 0).display(&["a"]), "d[2,2]");
        assert_eq!(op.entry(1, 0).display(&["a"]), "d[1,2] + a*d[1]");
        let neg = op.entry(1, 0).neg();
        assert_eq!(neg.display(&["a"]), "-d[1,2] - a*d[1]");
    }
}
