//! Class bookkeeping for reduced systems and symbols: leading-term classes,
//! Cartan characters, the Cartan involutivity test, and the multiplicities
//! counting non-multiplicative variables degree by degree.

use crate::combin::{binom, class_of};
use crate::jets::delta::{level_monomials, SymbolFamily};
use crate::jets::JetSystem;

/// One reduced equation, classified by its leading jet coordinate.
#[derive(Clone, Debug)]
pub struct TabularRow {
    pub unknown: usize,
    pub lead: Vec<u32>,
    pub degree: u32,
    /// Smallest differentiation index occurring in the lead (1-based; 0 for
    /// an order-zero lead).
    pub class: usize,
}

impl TabularRow {
    /// Number of non-multiplicative ("dotted") variables: n − class for a
    /// top-order row, all n for a lower-order one.
    pub fn dots(&self, n: usize, q: u32) -> usize {
        if self.degree == q {
            n - self.class
        } else {
            n
        }
    }
}

/// The classified table of a reduced system at one order.
#[derive(Clone, Debug)]
pub struct JanetTabular {
    n: usize,
    m: usize,
    q: u32,
    pub rows: Vec<TabularRow>,
    beta: Vec<usize>,
}

impl JanetTabular {
    pub fn of(sys: &JetSystem) -> JanetTabular {
        let n = sys.n();
        let m = sys.num_unknowns();
        let q = sys.order();
        let mut beta = vec![0usize; n];
        let rows = sys
            .equations()
            .rows()
            .iter()
            .map(|r| {
                let (k, mu) = sys.columns().col(r[0].0 as usize);
                let degree = mu.degree();
                let class = class_of(&mu.0);
                if degree == q && class > 0 {
                    beta[class - 1] += 1;
                }
                TabularRow {
                    unknown: *k,
                    lead: mu.0.clone(),
                    degree,
                    class,
                }
            })
            .collect();
        JanetTabular { n, m, q, rows, beta }
    }

    /// β⁽ⁱ⁾: top-order leading terms of class i, indexed from class 1.
    pub fn beta(&self) -> &[usize] {
        &self.beta
    }

    /// Cartan characters α⁽ⁱ⁾ = m·#\{class-i monomials of degree q\} − β⁽ⁱ⁾.
    pub fn alpha(&self) -> Vec<usize> {
        alpha_from_beta(self.n, self.m, self.q, &self.beta)
    }

    /// Σ i·α⁽ⁱ⁾ — equals dim g_{q+1} exactly when the system is involutive
    /// and the coordinates are δ-regular.
    pub fn cartan_sum(&self) -> usize {
        self.alpha().iter().enumerate().map(|(i, a)| (i + 1) * a).sum()
    }

    /// F_r = Σ_rows C(dots, r) for r = 0..=n — the number of order-(q+r)
    /// compatibility generators a row of the table accounts for.
    pub fn f_dims(&self) -> Vec<usize> {
        (0..=self.n)
            .map(|r| {
                self.rows
                    .iter()
                    .map(|row| binom(row.dots(self.n, self.q), r))
                    .sum()
            })
            .collect()
    }
}

pub fn alpha_from_beta(n: usize, m: usize, q: u32, beta: &[usize]) -> Vec<usize> {
    (1..=n)
        .map(|i| m * binom(q as usize + n - i - 1, n - i) - beta[i - 1])
        .collect()
}

/// Classes of the pivot monomials of the degree-ℓ symbol equations.
pub fn symbol_beta(fam: &SymbolFamily, ell: u32) -> Vec<usize> {
    let m = fam.num_unknowns();
    let mus = level_monomials(fam.n(), ell);
    let mut beta = vec![0usize; fam.n()];
    for r in fam.equations_at(ell).rows() {
        let mu = &mus[r[0].0 as usize / m];
        beta[class_of(&mu.0) - 1] += 1;
    }
    beta
}

/// Cartan's test for g_ℓ in the given coordinates: the prolongation
/// dimension meets the character bound. Valid as an involutivity criterion
/// only in δ-regular coordinates.
pub fn cartan_test(fam: &SymbolFamily, ell: u32) -> bool {
    let beta = symbol_beta(fam, ell);
    let alpha = alpha_from_beta(fam.n(), fam.num_unknowns(), ell, &beta);
    let bound: usize = alpha.iter().enumerate().map(|(i, a)| (i + 1) * a).sum();
    fam.dim_g(ell + 1) == bound
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::testsys::*;
    use crate::jets::JetSystem;

    #[test]
    fn characters_of_an_involutive_symbol_meet_the_cartan_bound() {
        // y₁₂, y₁₃, y₂₃ in coordinates sheared to δ-regular position.
        let sys = JetSystem::from_operator(&mac_2_18());
        let fam = crate::jets::delta::SymbolFamily::of(&sys);
        let reg = crate::jets::regularize::regularize_family(&fam, 2, 40).unwrap();
        let beta = symbol_beta(&reg, 2);
        assert_eq!(beta, vec![0, 2, 1]);
        let alpha = alpha_from_beta(3, 1, 2, &beta);
        assert_eq!(alpha, vec![3, 0, 0]);
        assert!(cartan_test(&reg, 2));
        assert_eq!(reg.dim_g(3), 3);
    }

    #[test]
    fn tabular_of_the_completed_finite_type_system() {
        // The order-3 closure of y₃₃, y₂₂, y₃ + y₁ after two more
        // prolong/project rounds: 16 equations of order ≤ 3.
        let r1_3 = JetSystem::from_operator(&mac_2_19()).prolong(2).project(3);
        let tab = JanetTabular::of(&r1_3);
        assert_eq!(tab.rows.len(), 16);
        let top: Vec<usize> = tab.beta().to_vec();
        assert_eq!(top.iter().sum::<usize>(), 10); // ten third-order leads
        assert_eq!(tab.f_dims(), vec![16, 33, 24, 6]);
        // Zero symbol: every character vanishes.
        assert_eq!(tab.alpha(), vec![0, 0, 0]);
        assert_eq!(tab.cartan_sum(), 0);
    }

    #[test]
    fn lower_order_rows_count_all_variables_as_dotted() {
        let sys = JetSystem::from_operator(&mac_2_22a());
        // After completion: y₃₃, y₂₃, y₂₂, y₁₃ − y₂ — all top order.
        let done = sys
            .prolong(1)
            .project(2)
            .prolong(1)
            .project(2);
        let tab = JanetTabular::of(&done);
        assert_eq!(tab.beta(), &[1, 2, 1]);
        assert_eq!(tab.f_dims(), vec![4, 4, 1, 0]);
        assert_eq!(tab.alpha(), vec![2, 0, 0]);
        assert_eq!(tab.cartan_sum(), 2);
    }
}
