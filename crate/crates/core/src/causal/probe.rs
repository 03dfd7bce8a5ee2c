//! Faithfulness probing: does an independence survive generic perturbation of
//! the causal-statistical parameters of its graph?
//!
//! Every conditional distribution in the factorization — response rows and
//! the measurement and ontic priors alike — is redrawn uniformly from the
//! probability simplex each trial, the joint is rebuilt in floating point,
//! and each reference independence is tested at a fixed tolerance. An
//! independence implied by the graph holds identically whatever the
//! parameters; one that is not fails on a non-zero measure of them.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use super::joint::parent_flat_index;
use super::{CausalError, CiStatement, Dag, VariableSpace};
use crate::fabs;
use crate::rational::Rational;

/// Absolute tolerance for floating-point conditional comparisons.
pub const CI_TOLERANCE: f64 = 1e-9;

/// Share of trials an independence may fail before the graph counts as
/// fine-tuned (strictly more than 10% trips the verdict).
const FINE_TUNING_THRESHOLD: f64 = 0.10;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FaithfulnessVerdict {
    Faithful,
    FineTuned,
}

impl core::fmt::Display for FaithfulnessVerdict {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            FaithfulnessVerdict::Faithful => write!(f, "Faithful"),
            FaithfulnessVerdict::FineTuned => write!(f, "FineTuned"),
        }
    }
}

/// Outcome of a probe: the verdict plus per-independence failure counts.
#[derive(Clone, Debug, PartialEq)]
pub struct FaithfulnessReport {
    pub verdict: FaithfulnessVerdict,
    pub trials: u32,
    pub seed: u64,
    pub tolerance: f64,
    pub failures: Vec<(CiStatement, u32)>,
}

impl FaithfulnessReport {
    pub fn failure_rate(&self, stmt: &CiStatement) -> Option<f64> {
        self.failures
            .iter()
            .find(|(s, _)| s == stmt)
            .map(|(_, n)| *n as f64 / self.trials as f64)
    }
}

/// Runs `trials` seeded perturbation rounds of the factorization shaped by
/// `dag` over `space` and tests each statement in `reference`.
///
/// Trials are independent: trial `t` draws its parameters from a generator
/// seeded by `(seed, t)`, so the report does not depend on execution order
/// and trials could run in parallel and be merged by index.
pub fn faithfulness_probe(
    dag: &Dag,
    space: &VariableSpace,
    reference: &[CiStatement],
    trials: u32,
    seed: u64,
) -> Result<FaithfulnessReport, CausalError> {
    if trials == 0 {
        return Err(CausalError::ZeroTrials);
    }
    if dag.node_names() != space.names() {
        return Err(CausalError::BadParameters(
            "DAG nodes must match the variable space".into(),
        ));
    }
    for stmt in reference {
        for v in stmt.variables() {
            if space.index_of(v).is_none() {
                return Err(CausalError::UnknownVariable(v.into()));
            }
        }
    }

    let mut counts = alloc::vec![0u32; reference.len()];
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial);
        let joint = random_float_joint(space, dag, &mut rng);
        for (k, stmt) in reference.iter().enumerate() {
            if !float_check_ci(space, &joint, stmt, CI_TOLERANCE) {
                counts[k] += 1;
            }
        }
    }
    let fine_tuned = counts
        .iter()
        .any(|&c| c as f64 > FINE_TUNING_THRESHOLD * trials as f64);
    Ok(FaithfulnessReport {
        verdict: if fine_tuned {
            FaithfulnessVerdict::FineTuned
        } else {
            FaithfulnessVerdict::Faithful
        },
        trials,
        seed,
        tolerance: CI_TOLERANCE,
        failures: reference.iter().cloned().zip(counts).collect(),
    })
}

fn trial_rng(seed: u64, trial: u32) -> ChaCha12Rng {
    // Distinct stream per trial, stable across runs.
    let mixed = seed ^ (trial as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    ChaCha12Rng::seed_from_u64(mixed)
}

fn unit_f64(rng: &mut ChaCha12Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// A point drawn uniformly from the `k`-simplex: gaps between sorted
/// uniforms.
fn simplex_point(rng: &mut ChaCha12Rng, k: usize) -> Vec<f64> {
    if k == 1 {
        return alloc::vec![1.0];
    }
    let mut cuts: Vec<f64> = (0..k - 1).map(|_| unit_f64(rng)).collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite uniforms"));
    let mut out = Vec::with_capacity(k);
    let mut prev = 0.0;
    for c in &cuts {
        out.push(c - prev);
        prev = *c;
    }
    out.push(1.0 - prev);
    out
}

/// Dense floating-point joint from freshly sampled factorization parameters.
fn random_float_joint(space: &VariableSpace, dag: &Dag, rng: &mut ChaCha12Rng) -> Vec<f64> {
    let n = space.len();
    let mut conditionals: Vec<Vec<Vec<f64>>> = Vec::with_capacity(n);
    for i in 0..n {
        let rows: usize = dag
            .parents(i)
            .iter()
            .map(|&p| space.values(p).len())
            .product();
        conditionals.push(
            (0..rows)
                .map(|_| simplex_point(rng, space.values(i).len()))
                .collect(),
        );
    }
    space
        .assignments()
        .map(|assignment| {
            (0..n)
                .map(|i| {
                    conditionals[i][parent_flat_index(space, dag, i, &assignment)][assignment[i]]
                })
                .product()
        })
        .collect()
}

fn float_marginal(
    space: &VariableSpace,
    joint: &[f64],
    vars: &[usize],
) -> BTreeMap<Vec<usize>, f64> {
    let mut out: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    for (flat, assignment) in space.assignments().enumerate() {
        let key: Vec<usize> = vars.iter().map(|&i| assignment[i]).collect();
        *out.entry(key).or_insert(0.0) += joint[flat];
    }
    out
}

/// Float analogue of the exact CI check: conditionals are formed by division
/// over positive-probability conditioning cells and compared within `tol`.
pub(super) fn float_check_ci(
    space: &VariableSpace,
    joint: &[f64],
    stmt: &CiStatement,
    tol: f64,
) -> bool {
    let var = |name: &str| space.index_of(name).expect("validated upstream");
    let lhs = var(&stmt.lhs);
    let mut rg: Vec<usize> = stmt
        .rhs
        .iter()
        .chain(stmt.given.iter())
        .map(|n| var(n))
        .collect();
    rg.sort_unstable();
    let mut given: Vec<usize> = stmt.given.iter().map(|n| var(n)).collect();
    given.sort_unstable();
    let mut lg = given.clone();
    lg.push(lhs);
    lg.sort_unstable();
    let mut lrg = rg.clone();
    lrg.push(lhs);
    lrg.sort_unstable();

    let m_g = float_marginal(space, joint, &given);
    let m_rg = float_marginal(space, joint, &rg);
    let m_lg = float_marginal(space, joint, &lg);
    let m_lrg = float_marginal(space, joint, &lrg);
    let restrict = |assignment: &[usize], vars: &[usize]| -> Vec<usize> {
        vars.iter().map(|&i| assignment[i]).collect()
    };

    for (rg_key, &p_rg) in &m_rg {
        if p_rg <= 0.0 {
            continue;
        }
        let mut partial = alloc::vec![0usize; space.len()];
        for (slot, &i) in rg.iter().enumerate() {
            partial[i] = rg_key[slot];
        }
        let p_g = if given.is_empty() {
            1.0
        } else {
            *m_g.get(&restrict(&partial, &given)).unwrap_or(&0.0)
        };
        if p_g <= 0.0 {
            continue;
        }
        for v in 0..space.values(lhs).len() {
            partial[lhs] = v;
            let p_lrg = *m_lrg.get(&restrict(&partial, &lrg)).unwrap_or(&0.0);
            let p_lg = *m_lg.get(&restrict(&partial, &lg)).unwrap_or(&0.0);
            if fabs(p_lrg / p_rg - p_lg / p_g) > tol {
                return false;
            }
        }
    }
    true
}

/// Seeded generic rational parameters for the factorization shaped by `dag`:
/// each conditional row gets strictly positive numerators below 1000 over
/// their sum. Used to build exact joints whose independence structure is that
/// of the graph itself (generic parameters satisfy no accidental equalities).
pub fn sample_rational_conditionals(
    space: &VariableSpace,
    dag: &Dag,
    seed: u64,
) -> Result<Vec<Vec<Vec<Rational>>>, CausalError> {
    if dag.node_names() != space.names() {
        return Err(CausalError::BadParameters(
            "DAG nodes must match the variable space".into(),
        ));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(space.len());
    for i in 0..space.len() {
        let rows: usize = dag
            .parents(i)
            .iter()
            .map(|&p| space.values(p).len())
            .product();
        let width = space.values(i).len();
        let mut tables = Vec::with_capacity(rows);
        for _ in 0..rows {
            let numerators: Vec<i64> = (0..width)
                .map(|_| (rng.next_u64() % 999) as i64 + 1)
                .collect();
            let total: i64 = numerators.iter().sum();
            tables.push(
                numerators
                    .into_iter()
                    .map(|n| Rational::new(n, total))
                    .collect::<Vec<Rational>>(),
            );
        }
        out.push(tables);
    }
    Ok(out)
}

/// Convenience: the exact joint of a seeded generic parameterization.
pub fn generic_joint(
    space: &VariableSpace,
    dag: &Dag,
    seed: u64,
) -> Result<super::JointDistribution, CausalError> {
    let conditionals = sample_rational_conditionals(space, dag, seed)?;
    super::JointDistribution::from_factorization(space.clone(), dag, &conditionals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn binary(name: &str) -> (String, Vec<String>) {
        (
            name.to_string(),
            alloc::vec!["0".to_string(), "1".to_string()],
        )
    }

    fn collider() -> (VariableSpace, Dag) {
        let space = VariableSpace::new([binary("C"), binary("L"), binary("Z")]).unwrap();
        let dag = Dag::new(space.names(), [("C", "Z"), ("L", "Z")]).unwrap();
        (space, dag)
    }

    #[test]
    fn implied_independence_never_fails() {
        let (space, dag) = collider();
        let reference = alloc::vec![CiStatement::new("C", ["L"], Vec::<String>::new()).unwrap()];
        let report = faithfulness_probe(&dag, &space, &reference, 50, 7).unwrap();
        assert_eq!(report.verdict, FaithfulnessVerdict::Faithful);
        assert_eq!(report.failures[0].1, 0);
    }

    #[test]
    fn unimplied_independence_fails_generically() {
        let (space, dag) = collider();
        // C ⫫ Z is not implied by C→Z←L and fails for generic parameters.
        let reference = alloc::vec![CiStatement::new("C", ["Z"], Vec::<String>::new()).unwrap()];
        let report = faithfulness_probe(&dag, &space, &reference, 50, 7).unwrap();
        assert_eq!(report.verdict, FaithfulnessVerdict::FineTuned);
        assert!(report.failures[0].1 >= 48, "{:?}", report.failures);
    }

    #[test]
    fn probe_is_deterministic_in_the_seed() {
        let (space, dag) = collider();
        let reference = alloc::vec![CiStatement::new("C", ["Z"], Vec::<String>::new()).unwrap()];
        let a = faithfulness_probe(&dag, &space, &reference, 20, 99).unwrap();
        let b = faithfulness_probe(&dag, &space, &reference, 20, 99).unwrap();
        assert_eq!(a, b);
        let c = faithfulness_probe(&dag, &space, &reference, 20, 100).unwrap();
        assert_eq!(c.verdict, FaithfulnessVerdict::FineTuned);
    }

    #[test]
    fn zero_trials_is_an_error() {
        let (space, dag) = collider();
        assert!(matches!(
            faithfulness_probe(&dag, &space, &[], 0, 1),
            Err(CausalError::ZeroTrials)
        ));
    }

    #[test]
    fn simplex_points_normalize() {
        let mut rng = trial_rng(5, 0);
        for k in 1..6 {
            let p = simplex_point(&mut rng, k);
            assert_eq!(p.len(), k);
            let total: f64 = p.iter().sum();
            assert!(fabs(total - 1.0) < 1e-12);
            assert!(p.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn generic_rational_joint_is_markov_for_its_graph() {
        let (space, dag) = collider();
        let joint = generic_joint(&space, &dag, 11).unwrap();
        // Every graph-implied statement holds in the joint.
        for stmt in dag.markov_implied() {
            assert!(joint.check_ci(&stmt).unwrap(), "{stmt}");
        }
        // And generically nothing else does.
        assert_eq!(joint.ci_report(), dag.markov_implied());
    }
}
