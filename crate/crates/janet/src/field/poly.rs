//! Sparse multivariate polynomials over the integers.
//!
//! These are the numerators/denominators of the scalar field: coefficients are
//! arbitrary-precision integers, monomials are exponent vectors over a fixed
//! variable context. The gcd is a primitive pseudo-remainder sequence, which
//! is all the catalog needs (few variables, low degrees).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Exponent vector with graded-lex ordering (total degree first, then lex),
/// so the maximum key of a term map is the leading monomial.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Multivariate polynomial with integer coefficients over `nvars` variables.
/// The derived order is an arbitrary but stable total order used for
/// deterministic tie-breaking.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial(vec![0; nvars]), c);
        }
        Poly { nvars, terms }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, 1)
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(Monomial(exps), BigInt::one());
        Poly { nvars, terms }
    }

    pub fn monomial(nvars: usize, exps: Vec<u32>, c: impl Into<BigInt>) -> Self {
        assert_eq!(exps.len(), nvars);
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial(exps), c);
        }
        Poly { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.leading_monomial().unwrap().degree() == 0)
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && self.constant_term() == BigInt::one()
    }

    /// Coefficient of the degree-zero monomial.
    pub fn constant_term(&self) -> BigInt {
        self.terms
            .get(&Monomial(vec![0; self.nvars]))
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.last_key_value().map(|(m, _)| m)
    }

    pub fn leading_coeff(&self) -> BigInt {
        self.terms
            .last_key_value()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigInt::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.leading_monomial().map(|m| m.degree()).unwrap_or(0)
    }

    pub fn deg_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|m| m.0[v]).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn insert_add(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars, "variable context mismatch");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_add(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars, "variable context mismatch");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_add(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -std::mem::take(c);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars, "variable context mismatch");
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.nvars);
        }
        // Fast path: scalar multiple.
        if self.is_constant() {
            return other.scale(&self.constant_term());
        }
        if other.is_constant() {
            return self.scale(&other.constant_term());
        }
        let mut out = Poly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let exps: Vec<u32> = ma.0.iter().zip(&mb.0).map(|(a, b)| a + b).collect();
                out.insert_add(Monomial(exps), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = &*v * c;
        }
        out
    }

    pub fn mul_var_pow(&self, v: usize, k: u32) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut exps = m.0.clone();
            exps[v] += k;
            out.terms.insert(Monomial(exps), c.clone());
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::one(self.nvars);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn derivative(&self, v: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[v];
            if e > 0 {
                let mut exps = m.0.clone();
                exps[v] = e - 1;
                out.insert_add(Monomial(exps), c * BigInt::from(e));
            }
        }
        out
    }

    /// Integer content (gcd of coefficients), non-negative.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divide by integer content and make the leading coefficient positive.
    pub fn primitive_part(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.content();
        if self.leading_coeff().is_negative() {
            c = -c;
        }
        self.div_int_exact(&c)
    }

    pub fn div_int_exact(&self, c: &BigInt) -> Poly {
        assert!(!c.is_zero());
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            let (q, r) = v.div_rem(c);
            assert!(r.is_zero(), "inexact integer division in polynomial");
            *v = q;
        }
        out
    }

    /// Exact polynomial division; panics if the division is not exact.
    /// Used only on internally produced multiples (gcd cofactors).
    pub fn div_exact(&self, d: &Poly) -> Poly {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Poly::zero(self.nvars);
        }
        if d.is_constant() {
            return self.div_int_exact(&d.constant_term());
        }
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nvars);
        let dlm = d.leading_monomial().unwrap().clone();
        let dlc = d.leading_coeff();
        while !rem.is_zero() {
            let rlm = rem.leading_monomial().unwrap().clone();
            let rlc = rem.leading_coeff();
            let exps: Option<Vec<u32>> = rlm
                .0
                .iter()
                .zip(&dlm.0)
                .map(|(a, b)| a.checked_sub(*b))
                .collect();
            let exps = exps.expect("inexact polynomial division (monomial)");
            let (qc, rr) = rlc.div_rem(&dlc);
            assert!(rr.is_zero(), "inexact polynomial division (coefficient)");
            let t = Poly::monomial(self.nvars, exps, qc);
            rem = rem.sub(&t.mul(d));
            quot = quot.add(&t);
        }
        quot
    }

    /// Coefficient of v^k, as a polynomial with the v-exponent zeroed.
    fn coeff_of_vpow(&self, v: usize, k: u32) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            if m.0[v] == k {
                let mut exps = m.0.clone();
                exps[v] = 0;
                out.terms.insert(Monomial(exps), c.clone());
            }
        }
        out
    }

    fn content_wrt(&self, v: usize) -> Poly {
        let mut g = Poly::zero(self.nvars);
        for k in 0..=self.deg_in(v) {
            let c = self.coeff_of_vpow(v, k);
            if !c.is_zero() {
                g = Poly::gcd(&g, &c);
                if g.is_one() {
                    break;
                }
            }
        }
        g
    }

    /// Pseudo-remainder of self by d with respect to variable v.
    fn prem(&self, d: &Poly, v: usize) -> Poly {
        let dd = d.deg_in(v);
        let dlc = d.coeff_of_vpow(v, dd);
        let mut r = self.clone();
        while !r.is_zero() && r.deg_in(v) >= dd {
            let dr = r.deg_in(v);
            let rlc = r.coeff_of_vpow(v, dr);
            r = dlc.mul(&r).sub(&rlc.mul(&d.mul_var_pow(v, dr - dd)));
        }
        r
    }

    /// Polynomial gcd (primitive pseudo-remainder sequence), normalized to
    /// positive leading coefficient. Includes the integer content gcd.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        // gcd(0, b) = ±b with integer content kept: content computations
        // fold over this case.
        if a.is_zero() {
            return b.positive_leading();
        }
        if b.is_zero() {
            return a.positive_leading();
        }
        assert_eq!(a.nvars, b.nvars, "variable context mismatch");
        if a.is_constant() && b.is_constant() {
            return Poly::constant(a.nvars, a.constant_term().gcd(&b.constant_term()));
        }
        // Main variable: highest index occurring in either operand.
        let v = (0..a.nvars)
            .rev()
            .find(|&v| a.deg_in(v) > 0 || b.deg_in(v) > 0)
            .expect("non-constant polynomial with no variables");
        let ca = a.content_wrt(v);
        let cb = b.content_wrt(v);
        let c = Poly::gcd(&ca, &cb);
        let pa = a.div_exact(&ca);
        let pb = b.div_exact(&cb);
        if pa.deg_in(v) == 0 || pb.deg_in(v) == 0 {
            // A primitive polynomial of degree zero in v is a unit.
            return c.positive_leading();
        }
        let (mut f, mut g) = if pa.deg_in(v) >= pb.deg_in(v) { (pa, pb) } else { (pb, pa) };
        loop {
            let r = f.prem(&g, v);
            if r.is_zero() {
                break;
            }
            f = g;
            g = r.primitive_wrt(v);
        }
        c.mul(&g.primitive_wrt(v)).positive_leading()
    }

    fn primitive_wrt(&self, v: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.content_wrt(v);
        self.div_exact(&c).primitive_sign()
    }

    fn primitive_sign(&self) -> Poly {
        self.primitive_part()
    }

    fn positive_leading(&self) -> Poly {
        if self.leading_coeff().is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Squarefree part: product of distinct irreducible factors, primitive,
    /// positive leading coefficient. Genericity conditions are stored in this
    /// form so that e.g. a² and a collapse to the same condition.
    pub fn squarefree_part(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut p = self.primitive_part();
        for v in 0..self.nvars {
            if p.deg_in(v) > 0 {
                let d = p.derivative(v);
                if !d.is_zero() {
                    let g = Poly::gcd(&p, &d);
                    if !g.is_constant() {
                        p = p.div_exact(&g).primitive_part();
                    }
                }
            }
        }
        p.primitive_part()
    }

    /// Substitute rational values for a subset of the variables.
    /// Returns (numerator polynomial over the same context, positive integer
    /// denominator). Bound variables no longer occur in the numerator.
    pub fn substitute(&self, binding: &[Option<(BigInt, BigInt)>]) -> (Poly, BigInt) {
        assert_eq!(binding.len(), self.nvars);
        // Common denominator: product of den^max_deg per bound variable.
        let mut common = BigInt::one();
        for (v, b) in binding.iter().enumerate() {
            if let Some((_, den)) = b {
                let d = self.deg_in(v);
                for _ in 0..d {
                    common = &common * den;
                }
            }
        }
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            // term contributes c * num^e * den^(deg_v - e) per bound variable;
            // starting from c * common and dividing by den^e keeps it integral.
            let mut coeff = c * &common;
            let mut exps = m.0.clone();
            for (v, b) in binding.iter().enumerate() {
                if let Some((num, den)) = b {
                    let e = exps[v];
                    exps[v] = 0;
                    for _ in 0..e {
                        coeff = &coeff * num;
                    }
                    let mut dive = BigInt::one();
                    for _ in 0..e {
                        dive = &dive * den;
                    }
                    let (q, r) = coeff.div_rem(&dive);
                    debug_assert!(r.is_zero());
                    coeff = q;
                }
            }
            out.insert_add(Monomial(exps), coeff);
        }
        // Normalize sign of denominator and strip common integer factor.
        let mut den = common;
        if den.is_negative() {
            den = -den;
            out = out.neg();
        }
        if !out.is_zero() {
            let g = out.content().gcd(&den);
            if !g.is_one() {
                out = out.div_int_exact(&g);
                den = den / g;
            }
        } else {
            den = BigInt::one();
        }
        (out, den)
    }

    /// Substitute variable `i` by variable `j`, keeping the variable count;
    /// `i` becomes unused in the result.
    pub fn identify_vars(&self, i: usize, j: usize) -> Poly {
        assert!(i < self.nvars && j < self.nvars);
        if i == j {
            return self.clone();
        }
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut exps = m.0.clone();
            exps[j] += exps[i];
            exps[i] = 0;
            out.insert_add(Monomial(exps), c.clone());
        }
        out
    }

    /// Re-embed into a wider variable context (old variables keep indices).
    pub fn extend_vars(&self, nvars: usize) -> Poly {
        assert!(nvars >= self.nvars);
        let mut out = Poly::zero(nvars);
        for (m, c) in &self.terms {
            let mut exps = m.0.clone();
            exps.resize(nvars, 0);
            out.terms.insert(Monomial(exps), c.clone());
        }
        out
    }

    /// Canonical display with the given variable names, leading term first.
    pub fn display(&self, names: &[&str]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.magnitude();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else if neg {
                s.push_str(" - ");
            } else {
                s.push_str(" + ");
            }
            let mut factors: Vec<String> = Vec::new();
            for (v, &e) in m.0.iter().enumerate() {
                if e == 1 {
                    factors.push(names[v].to_string());
                } else if e > 1 {
                    factors.push(format!("{}^{}", names[v], e));
                }
            }
            if factors.is_empty() {
                let _ = write!(s, "{}", abs);
            } else {
                if !abs.is_one() {
                    let _ = write!(s, "{}*", abs);
                }
                s.push_str(&factors.join("*"));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(nvars: usize, terms: &[(&[u32], i64)]) -> Poly {
        let mut out = Poly::zero(nvars);
        for (e, c) in terms {
            out = out.add(&Poly::monomial(nvars, e.to_vec(), *c));
        }
        out
    }

    #[test]
    fn gcd_collapses_shared_factor() {
        // gcd(a^2 - 1, a - 1) = a - 1, so (a^2-1)/(a-1) reduces to a+1.
        let a2m1 = p(1, &[(&[2], 1), (&[0], -1)]);
        let am1 = p(1, &[(&[1], 1), (&[0], -1)]);
        let g = Poly::gcd(&a2m1, &am1);
        assert_eq!(g, am1);
        let q = a2m1.div_exact(&g);
        assert_eq!(q, p(1, &[(&[1], 1), (&[0], 1)]));
    }

    #[test]
    fn gcd_includes_integer_content() {
        // gcd(2a, 4a^2) = 2a
        let two_a = p(1, &[(&[1], 2)]);
        let four_a2 = p(1, &[(&[2], 4)]);
        assert_eq!(Poly::gcd(&two_a, &four_a2), two_a);
    }

    #[test]
    fn gcd_multivariate() {
        // gcd((x+y)*x, (x+y)*y) = x+y
        let xpy = p(2, &[(&[1, 0], 1), (&[0, 1], 1)]);
        let x = p(2, &[(&[1, 0], 1)]);
        let y = p(2, &[(&[0, 1], 1)]);
        assert_eq!(Poly::gcd(&xpy.mul(&x), &xpy.mul(&y)), xpy);
    }

    #[test]
    fn squarefree_strips_multiplicity() {
        let a = p(1, &[(&[1], 1)]);
        let a2 = p(1, &[(&[2], 1)]);
        assert_eq!(a2.squarefree_part(), a);
        // (l1 - l2)^2 -> l1 - l2
        let d = p(2, &[(&[1, 0], 1), (&[0, 1], -1)]);
        assert_eq!(d.mul(&d).squarefree_part(), d);
    }

    #[test]
    fn substitution_with_rationals() {
        // p = a^2 + 3, a := 1/2  ->  13/4
        let poly = p(1, &[(&[2], 1), (&[0], 3)]);
        let (num, den) = poly.substitute(&[Some((BigInt::from(1), BigInt::from(2)))]);
        assert_eq!(num, p(1, &[(&[0], 13)]));
        assert_eq!(den, BigInt::from(4));
    }

    #[test]
    fn display_is_canonical() {
        let poly = p(2, &[(&[1, 1], -2), (&[0, 0], 1), (&[2, 0], 1)]);
        assert_eq!(poly.display(&["a", "b"]), "a^2 - 2*a*b + 1");
    }
}
