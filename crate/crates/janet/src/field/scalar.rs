//! The scalar field K = Q(a₁,…,aₖ): fractions of integer polynomials in the
//! parameters, kept normalized (gcd-reduced, denominator with positive
//! leading coefficient under the graded-lex order).

use num_bigint::BigInt;
use num_traits::Signed;

use super::poly::Poly;
use crate::error::JanetError;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ParamScalar {
    num: Poly,
    den: Poly,
}

impl ParamScalar {
    pub fn zero(nvars: usize) -> Self {
        ParamScalar { num: Poly::zero(nvars), den: Poly::one(nvars) }
    }

    pub fn one(nvars: usize) -> Self {
        ParamScalar { num: Poly::one(nvars), den: Poly::one(nvars) }
    }

    pub fn from_int(nvars: usize, c: impl Into<BigInt>) -> Self {
        ParamScalar { num: Poly::constant(nvars, c), den: Poly::one(nvars) }
    }

    pub fn from_rat(nvars: usize, num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        Self::new(Poly::constant(nvars, num), Poly::constant(nvars, den))
    }

    pub fn from_poly(num: Poly) -> Self {
        let n = num.nvars();
        ParamScalar { num, den: Poly::one(n) }
    }

    /// Build and normalize a fraction. Panics on a zero denominator: within
    /// the engine denominators come from pivots already guarded by emitted
    /// genericity conditions.
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator in scalar construction");
        let mut s = ParamScalar { num, den };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = Poly::one(self.num.nvars());
            return;
        }
        if !self.den.is_one() {
            let g = Poly::gcd(&self.num, &self.den);
            if !g.is_one() {
                self.num = self.num.div_exact(&g);
                self.den = self.den.div_exact(&g);
            }
        }
        if self.den.leading_coeff().is_negative() {
            self.num = self.num.neg();
            self.den = self.den.neg();
        }
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn add(&self, other: &ParamScalar) -> ParamScalar {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return ParamScalar::new(self.num.add(&other.num), self.den.clone());
        }
        ParamScalar::new(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn sub(&self, other: &ParamScalar) -> ParamScalar {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.neg();
        }
        if self.den == other.den {
            return ParamScalar::new(self.num.sub(&other.num), self.den.clone());
        }
        ParamScalar::new(
            self.num.mul(&other.den).sub(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn neg(&self) -> ParamScalar {
        ParamScalar { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, other: &ParamScalar) -> ParamScalar {
        if self.is_zero() || other.is_zero() {
            return ParamScalar::zero(self.nvars());
        }
        ParamScalar::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn div(&self, other: &ParamScalar) -> ParamScalar {
        assert!(!other.is_zero(), "division by zero scalar");
        if self.is_zero() {
            return ParamScalar::zero(self.nvars());
        }
        ParamScalar::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn inv(&self) -> ParamScalar {
        assert!(!self.is_zero(), "inverse of zero scalar");
        ParamScalar::new(self.den.clone(), self.num.clone())
    }

    /// Substitute rational values for a subset of the parameters.
    /// Errors when the denominator vanishes under the binding.
    pub fn specialize(
        &self,
        binding: &[Option<(BigInt, BigInt)>],
    ) -> Result<ParamScalar, JanetError> {
        let (dnum, dden) = self.den.substitute(binding);
        if dnum.is_zero() {
            return Err(JanetError::SpecializationPole);
        }
        let (nnum, nden) = self.num.substitute(binding);
        // value = (nnum/nden) / (dnum/dden) = nnum*dden / (nden*dnum)
        Ok(ParamScalar::new(
            nnum.scale(&dden),
            dnum.scale(&nden),
        ))
    }

    /// Substitute parameter `i` by parameter `j` (e.g. identifying two lengths).
    /// Errors when the denominator vanishes under the identification.
    pub fn identify_params(&self, i: usize, j: usize) -> Result<ParamScalar, JanetError> {
        let den = self.den.identify_vars(i, j);
        if den.is_zero() {
            return Err(JanetError::SpecializationPole);
        }
        Ok(ParamScalar::new(self.num.identify_vars(i, j), den))
    }

    pub fn extend_vars(&self, nvars: usize) -> ParamScalar {
        ParamScalar { num: self.num.extend_vars(nvars), den: self.den.extend_vars(nvars) }
    }

    /// As an exact rational when parameter-free.
    pub fn as_rational(&self) -> Option<(BigInt, BigInt)> {
        if self.is_constant() {
            Some((self.num.constant_term(), self.den.constant_term()))
        } else {
            None
        }
    }

    pub fn display(&self, names: &[&str]) -> String {
        if self.den.is_one() {
            return self.num.display(names);
        }
        let num = if self.num.num_terms() > 1 {
            format!("({})", self.num.display(names))
        } else {
            self.num.display(names)
        };
        let den = if self.den.num_terms() > 1 || !self.den.is_constant() {
            format!("({})", self.den.display(names))
        } else {
            self.den.display(names)
        };
        format!("{}/{}", num, den)
    }
}

/// A parameter polynomial a pivot assumed nonzero: the analysis is valid on
/// the open set where every recorded condition holds. Stored primitive and
/// squarefree with positive leading coefficient, so equivalent assumptions
/// deduplicate.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GenericityCondition {
    poly: Poly,
}

impl GenericityCondition {
    /// Normalize a pivot numerator into a condition; returns None when the
    /// polynomial is a nonzero constant (no assumption needed).
    pub fn from_pivot(p: &Poly) -> Option<GenericityCondition> {
        if p.is_constant() {
            return None;
        }
        Some(GenericityCondition { poly: p.squarefree_part() })
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn display(&self, names: &[&str]) -> String {
        self.poly.display(names)
    }

    /// True when the binding keeps this condition nonzero (unbound parameters
    /// count as generic, i.e. the condition survives as a residual).
    pub fn holds_under(&self, binding: &[Option<(BigInt, BigInt)>]) -> bool {
        let (num, _) = self.poly.substitute(binding);
        !num.is_zero()
    }
}

/// Append conditions, dropping duplicates.
pub fn merge_conditions(dst: &mut Vec<GenericityCondition>, src: &[GenericityCondition]) {
    for c in src {
        if !dst.contains(c) {
            dst.push(c.clone());
        }
    }
}
