//! Reduction of a finite-type system to an equivalent first-order system:
//! one new unknown per parametric jet coordinate, one equation per unknown
//! and direction, expressing each derivative through the parametric basis
//! of the prolonged system.

use crate::combin::index_add;
use crate::diffop::{DiffOperator, DiffPolynomial};
use crate::error::JanetError;
use crate::field::poly::Monomial;
use crate::jets::JetSystem;

/// The first-order replacement system together with the dictionary from
/// new unknowns back to jet coordinates of the original one.
#[derive(Clone, Debug)]
pub struct Lowered {
    pub op: DiffOperator,
    /// unknowns[a] = (k, μ): the new unknown z_{a+1} stands for the jet
    /// coordinate μ of original unknown k.
    pub unknowns: Vec<(usize, Monomial)>,
}

/// Requires a finite-type system whose prolongation has zero symbol and
/// projects back onto it (e.g. an involutive endpoint of completion).
pub fn lower_to_first_order(sys: &JetSystem) -> Result<Lowered, JanetError> {
    let up = sys.prolong(1);
    if up.symbol_dim() != 0 {
        return Err(JanetError::InvalidInput(
            "first-order reduction needs a zero symbol one order up (finite type)".into(),
        ));
    }
    if up.dim() != sys.dim() {
        return Err(JanetError::InvalidInput(
            "first-order reduction needs the prolongation to project back onto the system".into(),
        ));
    }
    let n = sys.n();
    let nparams = sys.nparams();

    // Parametric coordinates of the system, numbered in ascending order
    // (constant jet first), become the unknowns z_1, z_2, ….
    let pivots: std::collections::BTreeSet<u32> = sys
        .equations()
        .rows()
        .iter()
        .map(|r| r[0].0)
        .collect();
    let mut unknowns: Vec<(usize, Monomial)> = (0..sys.columns().len() as u32)
        .filter(|c| !pivots.contains(c))
        .map(|c| sys.columns().col(c as usize).clone())
        .collect();
    unknowns.reverse();
    let z_index: std::collections::HashMap<(usize, Monomial), usize> = unknowns
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, u)| (u, i))
        .collect();

    // Pivot rows of the prolongation, addressed by pivot column.
    let up_pivot_row: std::collections::HashMap<u32, usize> = up
        .equations()
        .rows()
        .iter()
        .enumerate()
        .map(|(i, r)| (r[0].0, i))
        .collect();

    let nz = unknowns.len();
    let mut entries: Vec<Vec<DiffPolynomial>> = Vec::with_capacity(n * nz);
    // Directions descending, unknowns ascending: groups the equations the
    // way the solved form is usually displayed.
    for i in (0..n).rev() {
        let e_i: Vec<u32> = (0..n).map(|j| if j == i { 1 } else { 0 }).collect();
        for (a, (k, mu)) in unknowns.iter().enumerate() {
            let mut row = vec![DiffPolynomial::zero(n, nparams); nz];
            row[a] = DiffPolynomial::d(n, nparams, i);
            let target = (*k, Monomial(index_add(&mu.0, &e_i)));
            let tcol = up.columns().col_index(target.0, &target.1 .0) as u32;
            if let Some(&ri) = up_pivot_row.get(&tcol) {
                // d_i z_a equals minus the tail of the solved equation; the
                // tail lives on parametric (hence lower-order) columns.
                for (c, v) in up.equations().row(ri).iter().skip(1) {
                    let u = up.columns().col(*c as usize).clone();
                    let b = z_index[&u];
                    row[b] = row[b].add(&DiffPolynomial::constant(n, v.clone()));
                }
            } else {
                let b = z_index[&target];
                row[b] = row[b].sub(&DiffPolynomial::one(n, nparams));
            }
            entries.push(row);
        }
    }
    let labels: Vec<String> = (1..=nz).map(|a| format!("z{a}")).collect();
    let p = entries.len();
    let op = DiffOperator::new(
        n,
        nparams,
        entries,
        labels,
        crate::diffop::default_labels("eq", p),
    );
    Ok(Lowered { op, unknowns })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::scalar::ParamScalar;
    use crate::jets::testsys::*;

    #[test]
    fn finite_type_completion_lowers_to_the_twelve_equation_system() {
        // Endpoint of completing y₃₃, y₂₂, y₃ + y₁: four parametric
        // coordinates y, y₁, y₂, y₁₂ become z¹..z⁴ with twelve solved
        // first-order equations.
        let c = crate::jets::pp::complete(&JetSystem::from_operator(&mac_2_19()), 40).unwrap();
        let low = lower_to_first_order(&c.endpoint).unwrap();
        assert_eq!(low.unknowns.len(), 4);
        assert_eq!(
            low.unknowns,
            vec![
                (0, Monomial(vec![0, 0, 0])),
                (0, Monomial(vec![1, 0, 0])),
                (0, Monomial(vec![0, 1, 0])),
                (0, Monomial(vec![1, 1, 0])),
            ]
        );
        assert_eq!(low.op.num_targets(), 12);
        assert_eq!(low.op.order(), 1);

        // The solved form: z¹₃ = −z², z²₃ = 0, z³₃ = −z⁴, z⁴₃ = 0,
        // z¹₂ = z³, z²₂ = z⁴, z³₂ = 0, z⁴₂ = 0, z¹₁ = z², z²₁ = 0,
        // z³₁ = z⁴, z⁴₁ = 0 — as a solution set.
        let expected = {
            let d = |i: usize| DiffPolynomial::d(3, 0, i);
            let zero = DiffPolynomial::zero(3, 0);
            let mut rows: Vec<Vec<DiffPolynomial>> = Vec::new();
            // (direction, unknown it acts on, z-column of the tail, its sign)
            let table: [(usize, usize, Option<(usize, i64)>); 12] = [
                (2, 0, Some((1, 1))),
                (2, 1, None),
                (2, 2, Some((3, 1))),
                (2, 3, None),
                (1, 0, Some((2, -1))),
                (1, 1, Some((3, -1))),
                (1, 2, None),
                (1, 3, None),
                (0, 0, Some((1, -1))),
                (0, 1, None),
                (0, 2, Some((3, -1))),
                (0, 3, None),
            ];
            for (dir, a, rhs) in table {
                let mut row = vec![zero.clone(); 4];
                row[a] = d(dir);
                if let Some((b, s)) = rhs {
                    row[b] = row[b].add(&DiffPolynomial::constant(3, ParamScalar::from_int(0, s)));
                }
                rows.push(row);
            }
            DiffOperator::new(
                3,
                0,
                rows,
                (1..=4).map(|a| format!("z{a}")).collect(),
                crate::diffop::default_labels("eq", 12),
            )
        };
        assert_eq!(
            JetSystem::from_operator(&low.op),
            JetSystem::from_operator(&expected)
        );
        assert_eq!(JetSystem::from_operator(&low.op).dim(), 4);
    }

    #[test]
    fn refuses_systems_with_a_nonzero_symbol_upstairs() {
        let sys = JetSystem::from_operator(&mac_2_17());
        assert!(lower_to_first_order(&sys).is_err());
    }
}
