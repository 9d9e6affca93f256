//! Search for δ-regular coordinates: linear changes of the independent
//! variables that drive the leading-term classes of a symbol to their
//! lexicographic maximum (βⁿ, βⁿ⁻¹, …, β¹). Candidates are unimodular
//! integer matrices — the identity, then all axis permutations, then seeded
//! pseudo-random triangular products — so the search is deterministic and
//! introduces no new genericity conditions of its own.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::JanetError;
use crate::field::scalar::ParamScalar;
use crate::jets::delta::SymbolFamily;
use crate::jets::tabular::symbol_beta;
use crate::jets::JetSystem;

const SEED: u64 = 0x6a61_6e65_74;

static SEED_OVERRIDE: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(SEED);

/// Override the seed behind the pseudo-random candidate changes.  The
/// default is fixed, so library results are reproducible without calling
/// this; the command line exposes it as `--seed`.
pub fn set_seed(seed: u64) {
    SEED_OVERRIDE.store(seed, std::sync::atomic::Ordering::Relaxed);
}

fn current_seed() -> u64 {
    SEED_OVERRIDE.load(std::sync::atomic::Ordering::Relaxed)
}

fn identity_change(n: usize, nparams: usize) -> Vec<Vec<ParamScalar>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        ParamScalar::one(nparams)
                    } else {
                        ParamScalar::zero(nparams)
                    }
                })
                .collect()
        })
        .collect()
}

fn permutation_change(perm: &[usize], nparams: usize) -> Vec<Vec<ParamScalar>> {
    let n = perm.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if perm[i] == j {
                        ParamScalar::one(nparams)
                    } else {
                        ParamScalar::zero(nparams)
                    }
                })
                .collect()
        })
        .collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    fn rec(out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>, n: usize) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !cur.contains(&i) {
                cur.push(i);
                rec(out, cur, n);
                cur.pop();
            }
        }
    }
    rec(&mut out, &mut cur, n);
    out
}

fn matmul_int(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// A unimodular matrix P·L·U with unit triangular factors and small
/// off-diagonal entries.
fn random_unimodular(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<i64>> {
    let mut l = vec![vec![0i64; n]; n];
    let mut u = vec![vec![0i64; n]; n];
    for i in 0..n {
        l[i][i] = 1;
        u[i][i] = 1;
        for j in 0..i {
            l[i][j] = rng.gen_range(-2..=2);
            u[j][i] = rng.gen_range(-2..=2);
        }
    }
    let perms = permutations(n);
    let p = permutation_change_int(&perms[rng.gen_range(0..perms.len())]);
    matmul_int(&p, &matmul_int(&l, &u))
}

fn permutation_change_int(perm: &[usize]) -> Vec<Vec<i64>> {
    let n = perm.len();
    let mut m = vec![vec![0i64; n]; n];
    for i in 0..n {
        m[i][perm[i]] = 1;
    }
    m
}

fn int_change(c: &[Vec<i64>], nparams: usize) -> Vec<Vec<ParamScalar>> {
    c.iter()
        .map(|r| r.iter().map(|&e| ParamScalar::from_int(nparams, e)).collect())
        .collect()
}

/// All candidate changes, in the order they are tried.
fn candidates(n: usize, nparams: usize, attempts: usize) -> Vec<Vec<Vec<ParamScalar>>> {
    let mut out = vec![identity_change(n, nparams)];
    for p in permutations(n).iter().skip(1) {
        out.push(permutation_change(p, nparams));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(current_seed());
    for _ in 0..attempts {
        out.push(int_change(&random_unimodular(n, &mut rng), nparams));
    }
    out
}

fn beta_key(beta: &[usize]) -> Vec<usize> {
    beta.iter().rev().cloned().collect()
}

/// The family in coordinates maximizing the class vector of g_ℓ over the
/// candidate changes; ties go to the earliest candidate.
pub fn regularize_family(
    fam: &SymbolFamily,
    ell: u32,
    attempts: usize,
) -> Result<SymbolFamily, JanetError> {
    let mut best = fam.change_variables(&identity_change(fam.n(), nparams_of(fam)))?;
    let mut best_key = beta_key(&symbol_beta(&best, ell));
    for c in candidates(fam.n(), nparams_of(fam), attempts).into_iter().skip(1) {
        let cand = fam.change_variables(&c)?;
        let key = beta_key(&symbol_beta(&cand, ell));
        if key > best_key {
            best_key = key;
            best = cand;
        }
    }
    Ok(best)
}

fn nparams_of(fam: &SymbolFamily) -> usize {
    fam.anchor().nvars()
}

/// The system in coordinates maximizing the class vector of its principal
/// symbol, together with the change used (rows express the new variables in
/// the old ones).
pub fn regularize_system(
    sys: &JetSystem,
    attempts: usize,
) -> Result<(JetSystem, Vec<Vec<ParamScalar>>), JanetError> {
    let mut best_change = identity_change(sys.n(), sys.nparams());
    let mut best = sys.clone();
    let mut best_key = beta_key(&symbol_beta(&SymbolFamily::of(&best), sys.order()));
    for c in candidates(sys.n(), sys.nparams(), attempts).into_iter().skip(1) {
        let cand = sys.change_variables(&c)?;
        let key = beta_key(&symbol_beta(&SymbolFamily::of(&cand), sys.order()));
        if key > best_key {
            best_key = key;
            best = cand;
            best_change = c;
        }
    }
    Ok((best, best_change))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::testsys::*;

    #[test]
    fn permutation_suffices_for_a_swapped_system() {
        // y₃₃, y₁₃ − y₂ has a δ-irregular symbol as given; exchanging two
        // axes already maximizes the class vector.
        let sys = JetSystem::from_operator(&mac_2_22a());
        let fam = SymbolFamily::of(&sys);
        let reg = regularize_family(&fam, 2, 0).unwrap();
        assert_eq!(beta_key(&symbol_beta(&reg, 2)), vec![1, 1, 0]);
    }

    #[test]
    fn shear_is_required_beyond_permutations() {
        // For y₁₂, y₁₃, y₂₃ every axis permutation leaves the class vector
        // at (0, 2, 1) reversed — only a genuine shear reaches (1, 2, 0).
        let sys = JetSystem::from_operator(&mac_2_18());
        let fam = SymbolFamily::of(&sys);
        let perms_only = regularize_family(&fam, 2, 0).unwrap();
        assert!(beta_key(&symbol_beta(&perms_only, 2)) < vec![1, 2, 0]);
        let reg = regularize_family(&fam, 2, 40).unwrap();
        assert_eq!(beta_key(&symbol_beta(&reg, 2)), vec![1, 2, 0]);
    }

    #[test]
    fn fourth_order_two_variable_symbol_needs_the_random_stage() {
        let sys = JetSystem::from_operator(&mac_2_20());
        let fam = SymbolFamily::of(&sys);
        let reg = regularize_family(&fam, 4, 40).unwrap();
        // One fourth-order lead of class 2 (so none of class 1 remains).
        assert_eq!(beta_key(&symbol_beta(&reg, 4)), vec![1, 0]);
        assert!(crate::jets::tabular::cartan_test(&reg, 4));
    }
}
