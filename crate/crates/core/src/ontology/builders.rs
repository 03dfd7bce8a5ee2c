//! The six outcome-deterministic built-in models: classical / EPR / PR, each
//! over its non-trivial theory and its trivial twin.
//!
//! States are `L0, L1` (classical, PR) or `L00..L11` for the product states
//! `Λ₁×Λ₂` of the EPR model. Responses are Kronecker-delta point masses:
//!
//! - classical: `X = Λ`, `Y = Λ` everywhere;
//! - PR: `X = Λ`, `Y = Λ` alone but `Y = Λ⊕(A·B)` in context;
//! - EPR: `X = Λ₁`, `Y = Λ₂` alone; in context `Y` picks up the `⊕(A·B)`
//!   twist exactly on the correlated states `Λ₁⊕Λ₂ = 0`, producing the
//!   perfect anticorrelation of the `A·B = 1` setting;
//!
//! and the trivial twins read the same formulas through the outcome index
//! pairs `Z = (Z₁, Z₂)` and measurement index pairs `C = (C₁, C₂)`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::OntologicalModel;
use crate::rational::{Distribution, Rational};
use crate::theory::{
    classical_theory, classical_trivial, epr_theory, epr_trivial, pr_theory, pr_trivial,
    MeasurementId, OperationalTheory, Outcome,
};

fn binary_states() -> Vec<String> {
    vec!["L0".to_string(), "L1".to_string()]
}

fn pair_states() -> Vec<String> {
    (0..2u8)
        .flat_map(|l1| (0..2u8).map(move |l2| format!("L{l1}{l2}")))
        .collect()
}

fn uniform_prior(states: &[String]) -> Distribution<String> {
    Distribution::uniform(states.iter().cloned()).unwrap()
}

/// `p(Λ₁,Λ₂ | P_EPR)`: 1/8 on the anticorrelated states, 3/8 on the rest.
fn epr_prior() -> Distribution<String> {
    Distribution::new([
        ("L00".to_string(), Rational::new(3, 8)),
        ("L01".to_string(), Rational::new(1, 8)),
        ("L10".to_string(), Rational::new(1, 8)),
        ("L11".to_string(), Rational::new(3, 8)),
    ])
    .unwrap()
}

/// Builds a Bell-type model from the per-state outcome assignments:
/// `x(s)` and `y(s)` for the standalone measurements, `y_ctx(s, a, b)` for
/// the B-part inside the context `A_a ∧ B_b`.
fn bell_model(
    name: &str,
    theory: OperationalTheory,
    states: Vec<String>,
    prior: Distribution<String>,
    x: impl Fn(usize) -> u8,
    y: impl Fn(usize) -> u8,
    y_ctx: impl Fn(usize, u8, u8) -> u8,
) -> OntologicalModel {
    let prep = theory.preparations()[0].clone();
    let mut priors = BTreeMap::new();
    priors.insert(prep, prior);
    let mut responses = BTreeMap::new();
    for (s, state) in states.iter().enumerate() {
        for a in 0..2u8 {
            responses.insert(
                (MeasurementId::basic(format!("A{a}")), state.clone()),
                Distribution::point(Outcome::atom(format!("X{}", x(s)))),
            );
        }
        for b in 0..2u8 {
            responses.insert(
                (MeasurementId::basic(format!("B{b}")), state.clone()),
                Distribution::point(Outcome::atom(format!("Y{}", y(s)))),
            );
        }
        for a in 0..2u8 {
            for b in 0..2u8 {
                let m = MeasurementId::conjunction([format!("A{a}"), format!("B{b}")]);
                let point = Outcome::tuple([format!("X{}", x(s)), format!("Y{}", y_ctx(s, a, b))]);
                responses.insert((m, state.clone()), Distribution::point(point));
            }
        }
    }
    OntologicalModel::new(name, theory, states, priors, responses).expect("built-in model is valid")
}

/// Builds a trivial-twin model from the per-state index assignments
/// `z(s, c1, c2) = (z1, z2)`.
fn trivial_model(
    name: &str,
    theory: OperationalTheory,
    states: Vec<String>,
    prior: Distribution<String>,
    z: impl Fn(usize, u8, u8) -> (u8, u8),
) -> OntologicalModel {
    let prep = theory.preparations()[0].clone();
    let mut priors = BTreeMap::new();
    priors.insert(prep, prior);
    let mut responses = BTreeMap::new();
    for (s, state) in states.iter().enumerate() {
        for c1 in 0..2u8 {
            for c2 in 0..2u8 {
                let (z1, z2) = z(s, c1, c2);
                responses.insert(
                    (MeasurementId::basic(format!("C{c1}{c2}")), state.clone()),
                    Distribution::point(Outcome::atom(format!("Z{z1}{z2}"))),
                );
            }
        }
    }
    OntologicalModel::new(name, theory, states, priors, responses).expect("built-in model is valid")
}

/// Splits the EPR state index into `(Λ₁, Λ₂)`.
fn lambda_pair(s: usize) -> (u8, u8) {
    ((s as u8 >> 1) & 1, s as u8 & 1)
}

/// Classical model over the non-trivial theory: both outcomes equal `Λ`.
pub fn classical_nontrivial_model() -> OntologicalModel {
    let states = binary_states();
    let prior = uniform_prior(&states);
    bell_model(
        "classical-model",
        classical_theory(),
        states,
        prior,
        |s| s as u8,
        |s| s as u8,
        |s, _, _| s as u8,
    )
}

/// PR-box model: alone `Y = Λ`, in context `Y = Λ ⊕ (A·B)`.
pub fn pr_nontrivial_model() -> OntologicalModel {
    let states = binary_states();
    let prior = uniform_prior(&states);
    bell_model(
        "pr-model",
        pr_theory(),
        states,
        prior,
        |s| s as u8,
        |s| s as u8,
        |s, a, b| s as u8 ^ (a & b),
    )
}

/// EPR model over the product states: the `⊕(A·B)` twist acts exactly on the
/// correlated states.
pub fn epr_nontrivial_model() -> OntologicalModel {
    bell_model(
        "epr-model",
        epr_theory(),
        pair_states(),
        epr_prior(),
        |s| lambda_pair(s).0,
        |s| lambda_pair(s).1,
        |s, a, b| {
            let (l1, l2) = lambda_pair(s);
            if l1 ^ l2 == 0 {
                l2 ^ (a & b)
            } else {
                l2
            }
        },
    )
}

/// Classical model over the trivial twin: `Z = (Λ, Λ)` whatever is measured.
pub fn classical_trivial_model() -> OntologicalModel {
    let states = binary_states();
    let prior = uniform_prior(&states);
    trivial_model(
        "classical-trivial-model",
        classical_trivial(),
        states,
        prior,
        |s, _, _| (s as u8, s as u8),
    )
}

/// PR model over the trivial twin: `Z = (Λ, Λ ⊕ C₁·C₂)`.
pub fn pr_trivial_model() -> OntologicalModel {
    let states = binary_states();
    let prior = uniform_prior(&states);
    trivial_model(
        "pr-trivial-model",
        pr_trivial(),
        states,
        prior,
        |s, c1, c2| (s as u8, s as u8 ^ (c1 & c2)),
    )
}

/// EPR model over the trivial twin.
pub fn epr_trivial_model() -> OntologicalModel {
    trivial_model(
        "epr-trivial-model",
        epr_trivial(),
        pair_states(),
        epr_prior(),
        |s, c1, c2| {
            let (l1, l2) = lambda_pair(s);
            if l1 ^ l2 == 0 {
                (l1, l2 ^ (c1 & c2))
            } else {
                (l1, l2)
            }
        },
    )
}

/// All six models, paired with a short fixture name.
pub fn builtin_models() -> Vec<(&'static str, OntologicalModel)> {
    vec![
        ("classical", classical_nontrivial_model()),
        ("epr", epr_nontrivial_model()),
        ("pr", pr_nontrivial_model()),
        ("classical-trivial", classical_trivial_model()),
        ("epr-trivial", epr_trivial_model()),
        ("pr-trivial", pr_trivial_model()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: the EPR in-context response evaluated literally as
    /// the delta product
    /// `δ_{X,Λ₁}·(δ_{Y⊕(A·B),Λ₂}·δ_{Λ₁⊕Λ₂,0} + δ_{Y,Λ₂}·δ_{Λ₁⊕Λ₂,1})`,
    /// cell by cell.
    fn epr_joint_oracle(a: u8, b: u8, x: u8, y: u8, l1: u8, l2: u8) -> u8 {
        let d = |p: u8, q: u8| u8::from(p == q);
        d(x, l1) * (d(y ^ (a & b), l2) * d(l1 ^ l2, 0) + d(y, l2) * d(l1 ^ l2, 1))
    }

    /// PR in-context response: `δ_{X,Λ}·δ_{Y⊕(A·B),Λ}`.
    fn pr_joint_oracle(a: u8, b: u8, x: u8, y: u8, l: u8) -> u8 {
        u8::from(x == l) * u8::from((y ^ (a & b)) == l)
    }

    /// Classical trivial response: `δ_{Z₁,Λ}·δ_{Z₂,Λ}`.
    fn classical_trivial_oracle(z1: u8, z2: u8, l: u8) -> u8 {
        u8::from(z1 == l) * u8::from(z2 == l)
    }

    #[test]
    fn epr_joint_responses_match_delta_oracle_on_all_cells() {
        let model = epr_nontrivial_model();
        for a in 0..2u8 {
            for b in 0..2u8 {
                let m = MeasurementId::conjunction([format!("A{a}"), format!("B{b}")]);
                for l1 in 0..2u8 {
                    for l2 in 0..2u8 {
                        let state = format!("L{l1}{l2}");
                        let r = model.response(&m, &state).unwrap();
                        for x in 0..2u8 {
                            for y in 0..2u8 {
                                let cell = Outcome::tuple([format!("X{x}"), format!("Y{y}")]);
                                let expected = Rational::from_integer(epr_joint_oracle(
                                    a, b, x, y, l1, l2,
                                )
                                    as i64);
                                assert_eq!(
                                    r.mass(&cell),
                                    expected,
                                    "A{a}∧B{b} at L{l1}{l2}, cell ({x},{y})"
                                );
                            }
                        }
                    }
                }
            }
        }
        // Frozen oracle values: with A·B = 1 the anticorrelated state (1,0)
        // keeps its outcome (X,Y) = (1,0), while the correlated state (1,1)
        // twists to (1,0) as well.
        let m = MeasurementId::conjunction(["A1", "B1"]);
        let r = model.response(&m, "L10").unwrap();
        assert_eq!(r.mass(&Outcome::tuple(["X1", "Y0"])), Rational::one());
        assert_eq!(r.mass(&Outcome::tuple(["X1", "Y1"])), Rational::zero());
        let r = model.response(&m, "L11").unwrap();
        assert_eq!(r.mass(&Outcome::tuple(["X1", "Y0"])), Rational::one());
    }

    #[test]
    fn pr_responses_match_delta_oracle() {
        let model = pr_nontrivial_model();
        for a in 0..2u8 {
            for b in 0..2u8 {
                let m = MeasurementId::conjunction([format!("A{a}"), format!("B{b}")]);
                for l in 0..2u8 {
                    let r = model.response(&m, &format!("L{l}")).unwrap();
                    for x in 0..2u8 {
                        for y in 0..2u8 {
                            let cell = Outcome::tuple([format!("X{x}"), format!("Y{y}")]);
                            let expected =
                                Rational::from_integer(pr_joint_oracle(a, b, x, y, l) as i64);
                            assert_eq!(r.mass(&cell), expected);
                        }
                    }
                }
            }
        }
        // p(Y=1 | B0, Λ=1) = δ_{Y,Λ} = 1.
        let r = model.response(&MeasurementId::basic("B0"), "L1").unwrap();
        assert_eq!(r.mass(&Outcome::atom("Y1")), Rational::one());
    }

    #[test]
    fn classical_trivial_responses_match_delta_oracle() {
        let model = classical_trivial_model();
        for c1 in 0..2u8 {
            for c2 in 0..2u8 {
                let m = MeasurementId::basic(format!("C{c1}{c2}"));
                for l in 0..2u8 {
                    let r = model.response(&m, &format!("L{l}")).unwrap();
                    for z1 in 0..2u8 {
                        for z2 in 0..2u8 {
                            let cell = Outcome::atom(format!("Z{z1}{z2}"));
                            let expected =
                                Rational::from_integer(classical_trivial_oracle(z1, z2, l) as i64);
                            assert_eq!(r.mass(&cell), expected);
                        }
                    }
                }
            }
        }
        // p(Z = Z11 | C10, Λ=1) = 1.
        let r = model.response(&MeasurementId::basic("C10"), "L1").unwrap();
        assert_eq!(r.mass(&Outcome::atom("Z11")), Rational::one());
    }

    #[test]
    fn all_models_are_outcome_deterministic() {
        for (name, model) in builtin_models() {
            assert!(model.is_outcome_deterministic(), "{name}");
        }
    }

    #[test]
    fn a_coin_response_is_not_deterministic() {
        // Same theory, but every response is uniform over its outcome space.
        let theory = classical_theory();
        let states = binary_states();
        let mut priors = BTreeMap::new();
        priors.insert("P_CL".to_string(), uniform_prior(&states));
        let mut responses = BTreeMap::new();
        for m in theory.members() {
            let space = theory.outcome_space(&m).unwrap();
            for s in &states {
                responses.insert(
                    (m.clone(), s.clone()),
                    Distribution::uniform(space.iter().cloned()).unwrap(),
                );
            }
        }
        let model = OntologicalModel::new("noisy", theory, states, priors, responses).unwrap();
        assert!(!model.is_outcome_deterministic());
    }

    #[test]
    fn all_models_recover_their_theories_exactly() {
        for (name, model) in builtin_models() {
            assert!(model.recovery_is_exact().unwrap(), "{name}");
        }
    }

    #[test]
    fn simultaneous_contextuality_matrix() {
        assert!(classical_nontrivial_model()
            .simultaneous_noncontextuality()
            .unwrap()
            .noncontextual());
        for model in [epr_nontrivial_model(), pr_nontrivial_model()] {
            let report = model.simultaneous_noncontextuality().unwrap();
            assert!(!report.noncontextual());
            // The canonical witness: B1 against A1∧B1.
            let b1 = MeasurementId::basic("B1");
            let a1b1 = MeasurementId::conjunction(["A1", "B1"]);
            assert!(
                report
                    .witnesses
                    .iter()
                    .any(|w| w.left == b1 && w.right == a1b1),
                "{:?}",
                report.witnesses
            );
        }
        // Trivial theories have no conjunctions, so the check is vacuous.
        for model in [
            classical_trivial_model(),
            epr_trivial_model(),
            pr_trivial_model(),
        ] {
            assert!(model
                .simultaneous_noncontextuality()
                .unwrap()
                .noncontextual());
        }
    }

    #[test]
    fn measurement_contextuality_matrix() {
        assert!(classical_nontrivial_model()
            .measurement_noncontextuality()
            .unwrap()
            .noncontextual());
        assert!(classical_trivial_model()
            .measurement_noncontextuality()
            .unwrap()
            .noncontextual());
        for model in [epr_nontrivial_model(), pr_nontrivial_model()] {
            assert!(!model
                .measurement_noncontextuality()
                .unwrap()
                .noncontextual());
        }
        // In the trivial EPR model the second-index marginals of C01 and C11
        // are operationally equivalent yet answer differently on the states
        // the A·B = 1 twist acts on.
        let model = epr_trivial_model();
        let report = model.measurement_noncontextuality().unwrap();
        assert!(!report.noncontextual());
        let theory = model.theory();
        let c01_2 = theory.factor_view("C01", &[1]).unwrap();
        let c11_2 = theory.factor_view("C11", &[1]).unwrap();
        let pair_states: Vec<&str> = report
            .witnesses
            .iter()
            .filter(|w| {
                (w.left == c01_2 && w.right == c11_2) || (w.left == c11_2 && w.right == c01_2)
            })
            .map(|w| w.state.as_str())
            .collect();
        // The C11-only twist bites exactly on the correlated states.
        assert_eq!(pair_states, ["L00", "L11"], "{:?}", report.witnesses);

        assert!(!pr_trivial_model()
            .measurement_noncontextuality()
            .unwrap()
            .noncontextual());
    }

    #[test]
    fn epr_recovery_reproduces_the_three_eighths_split() {
        let model = epr_nontrivial_model();
        let recovered = model.recover_operational().unwrap();
        let m = MeasurementId::conjunction(["A0", "B0"]);
        let d = recovered.distribution(&m, "P_EPR").unwrap();
        assert_eq!(d.mass(&Outcome::tuple(["X0", "Y0"])), Rational::new(3, 8));
        assert_eq!(d.mass(&Outcome::tuple(["X0", "Y1"])), Rational::new(1, 8));
    }
}
