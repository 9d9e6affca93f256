//! Completion to an involutive system by alternating prolongation and
//! projection, steered by the intrinsic symbol tests: prolong while the
//! symbol fails 2-acyclicity, absorb integrability conditions surfaced by
//! projecting the prolongation, prolong once more if the (now 2-acyclic)
//! symbol is not yet involutive, and stop at an involutive system whose
//! prolongation projects back onto it.

use crate::error::JanetError;
use crate::field::scalar::{merge_conditions, GenericityCondition};
use crate::jets::delta::SymbolFamily;
use crate::jets::JetSystem;

/// Outcome of the completion: the involutive endpoint in the original
/// coordinates, how many prolongations and strict projections it took, and
/// a human-readable trace.
#[derive(Clone, Debug)]
pub struct Completion {
    pub endpoint: JetSystem,
    pub prolongations: u32,
    pub projections: u32,
    pub log: Vec<String>,
    pub conditions: Vec<GenericityCondition>,
}

impl Completion {
    /// The order at which the system became involutive.
    pub fn involutive_order(&self) -> u32 {
        self.endpoint.order()
    }
}

const CAP: usize = 20;

pub fn complete(sys: &JetSystem, attempts: usize) -> Result<Completion, JanetError> {
    complete_capped(sys, attempts, CAP)
}

/// `complete` with an explicit bound on the prolongation/projection rounds.
pub fn complete_capped(
    sys: &JetSystem,
    attempts: usize,
    cap: usize,
) -> Result<Completion, JanetError> {
    let mut cur = sys.clone();
    let mut prolongations = 0u32;
    let mut projections = 0u32;
    let mut log: Vec<String> = Vec::new();
    let mut conditions = sys.conditions().to_vec();
    for _ in 0..cap {
        let fam = SymbolFamily::of(&cur);
        let r0 = fam.involutive_level(attempts)?;
        let mut two_acyclic = true;
        for ell in cur.order()..cur.order() + r0 {
            if fam.cohomology_dim(ell, 2) != 0 {
                two_acyclic = false;
                break;
            }
        }
        merge_conditions(&mut conditions, &fam.conditions());
        if !two_acyclic {
            log.push(format!(
                "order {}: symbol not 2-acyclic, prolonging",
                cur.order()
            ));
            cur = cur.prolong(1);
            prolongations += 1;
            continue;
        }
        let down = cur.prolong(1).project(cur.order());
        merge_conditions(&mut conditions, down.conditions());
        if down.dim() < cur.dim() {
            log.push(format!(
                "order {}: projection of the prolongation cuts the dimension {} -> {}",
                cur.order(),
                cur.dim(),
                down.dim()
            ));
            cur = down;
            projections += 1;
            continue;
        }
        if r0 > 0 {
            log.push(format!(
                "order {}: symbol 2-acyclic but not involutive, prolonging",
                cur.order()
            ));
            cur = cur.prolong(1);
            prolongations += 1;
            continue;
        }
        log.push(format!(
            "order {}: involutive, prolongation projects back onto the system",
            cur.order()
        ));
        return Ok(Completion {
            endpoint: cur,
            prolongations,
            projections,
            log,
            conditions,
        });
    }
    Err(JanetError::CapExceeded {
        what: "prolongation/projection rounds without reaching involution",
        cap,
    })
}

/// A system is formally integrable when completion never has to absorb an
/// integrability condition by projecting.
pub fn is_formally_integrable(sys: &JetSystem, attempts: usize) -> Result<bool, JanetError> {
    Ok(complete(sys, attempts)?.projections == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::testsys::*;

    fn run(op: &crate::diffop::DiffOperator) -> Completion {
        complete(&JetSystem::from_operator(op), 40).unwrap()
    }

    #[test]
    fn involutive_systems_complete_in_place() {
        for op in [mac_2_17(), mac_2_18()] {
            let c = run(&op);
            assert_eq!((c.prolongations, c.projections), (0, 0));
            assert_eq!(c.involutive_order(), 2);
            assert_eq!(c.endpoint.dim(), 7);
        }
    }

    #[test]
    fn one_prolongation_and_one_projection_for_2_19() {
        let c = run(&mac_2_19());
        assert_eq!((c.prolongations, c.projections), (1, 1));
        assert_eq!(c.involutive_order(), 3);
        assert_eq!(c.endpoint.dim(), 4);
        assert_eq!(c.endpoint.num_equations(), 16);
        assert!(!is_formally_integrable(&JetSystem::from_operator(&mac_2_19()), 40).unwrap());
    }

    #[test]
    fn fourth_order_completion_lands_at_order_five() {
        let c = run(&mac_2_20());
        assert_eq!((c.prolongations, c.projections), (1, 1));
        assert_eq!(c.involutive_order(), 5);
        assert_eq!(c.endpoint.dim(), 12);
        assert_eq!(c.endpoint.num_equations(), 9);
    }

    #[test]
    fn third_order_input_completes_at_order_three() {
        let c = run(&mac_2_21());
        assert_eq!(c.involutive_order(), 3);
        assert_eq!(c.endpoint.dim(), 11);
        assert_eq!(c.endpoint.num_equations(), 9);
        assert!(c.projections > 0);
    }

    #[test]
    fn two_projections_for_the_non_integrable_wave_pair() {
        let c = run(&mac_2_22a());
        assert_eq!((c.prolongations, c.projections), (0, 2));
        assert_eq!(c.involutive_order(), 2);
        assert_eq!(c.endpoint.dim(), 6);
        assert_eq!(c.endpoint.num_equations(), 4);
    }

    #[test]
    fn finite_type_completion_prolongs_twice_without_projecting() {
        let c = run(&mac_2_22b());
        assert_eq!((c.prolongations, c.projections), (2, 0));
        assert_eq!(c.involutive_order(), 4);
        assert_eq!(c.endpoint.dim(), 8);
        assert!(is_formally_integrable(&JetSystem::from_operator(&mac_2_22b()), 40).unwrap());
    }
}
