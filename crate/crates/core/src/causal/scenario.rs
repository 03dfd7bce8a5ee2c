//! Turning an ontological model into a joint distribution over
//! measurement-choice, outcome and ontic-state variables.
//!
//! A scenario names one choice variable per party — for the Bell layout,
//! `A` ranging over `{A0, A1}` with outcome variable `X`, and `B` over
//! `{B0, B1}` with outcome `Y` — plus the ontic variable `L`. Choosing one
//! option per party selects the conjunction of the chosen basics (or the
//! single basic itself when there is one party, as in trivial theories), and
//! the joint factors as response × choice priors × ontic prior.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{CausalError, JointDistribution, VariableSpace};
use crate::ontology::OntologicalModel;
use crate::rational::Rational;
use crate::theory::{MeasurementId, OperationalTheory, Outcome};

/// One party's measurement choice: a variable named `name` ranging over the
/// basic measurements `options`, whose result is recorded in the variable
/// `outcome_name`. All options must share one outcome list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceVariable {
    pub name: String,
    pub options: Vec<String>,
    pub outcome_name: String,
}

/// A causal reading of a theory: choice variables plus the ontic variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub choices: Vec<ChoiceVariable>,
    pub ontic_name: String,
}

impl Scenario {
    /// The standard two-party layout `{A, B, X, Y, Λ}`.
    pub fn bell() -> Self {
        Scenario {
            choices: alloc::vec![
                ChoiceVariable {
                    name: "A".into(),
                    options: alloc::vec!["A0".into(), "A1".into()],
                    outcome_name: "X".into(),
                },
                ChoiceVariable {
                    name: "B".into(),
                    options: alloc::vec!["B0".into(), "B1".into()],
                    outcome_name: "Y".into(),
                },
            ],
            ontic_name: "L".into(),
        }
    }

    /// The single-party layout `{C, Z, Λ}` over the given basics.
    pub fn single(options: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Scenario {
            choices: alloc::vec![ChoiceVariable {
                name: "C".into(),
                options: options.into_iter().map(Into::into).collect(),
                outcome_name: "Z".into(),
            }],
            ontic_name: "L".into(),
        }
    }

    /// Reads a scenario off a theory's structure: trivial theories become
    /// single-party scenarios over all basics; theories whose contexts are
    /// exactly the cross pairs of a bipartition of the basics become
    /// two-party scenarios. Anything else is unsupported.
    pub fn infer(theory: &OperationalTheory) -> Result<Self, CausalError> {
        if theory.is_trivial() {
            let labels: Vec<String> = theory.basics().iter().map(|b| b.label.clone()).collect();
            return Ok(Scenario::single(labels));
        }
        let contexts = theory.contexts();
        if contexts.iter().any(|c| c.len() != 2) {
            return Err(CausalError::UnsupportedScenario(
                "contexts must be pairs for the two-party reading".into(),
            ));
        }
        if !theory.lone_basics().is_empty() {
            return Err(CausalError::UnsupportedScenario(
                "theory mixes contexts with lone basics".into(),
            ));
        }
        // Two-color the compatibility graph.
        let labels: Vec<String> = theory.basics().iter().map(|b| b.label.clone()).collect();
        let mut color: BTreeMap<&str, u8> = BTreeMap::new();
        let mut queue: Vec<&str> = Vec::new();
        for start in &labels {
            if color.contains_key(start.as_str()) {
                continue;
            }
            color.insert(start, 0);
            queue.push(start);
            while let Some(v) = queue.pop() {
                let cv = color[v];
                for ctx in &contexts {
                    if !ctx.contains(v) {
                        continue;
                    }
                    for w in ctx {
                        if w == v {
                            continue;
                        }
                        match color.get(w.as_str()) {
                            None => {
                                color.insert(w, 1 - cv);
                                queue.push(w);
                            }
                            Some(&cw) if cw == cv => {
                                return Err(CausalError::UnsupportedScenario(
                                    "compatibility graph is not bipartite".into(),
                                ));
                            }
                            _ => {}
                        }
                    }
                }
            }
        }
        let side = |c: u8| -> Vec<String> {
            labels
                .iter()
                .filter(|l| color[l.as_str()] == c)
                .cloned()
                .collect()
        };
        // The side containing the lexicographically least basic is party A.
        let least = labels.iter().min().expect("non-trivial theory has basics");
        let (a_side, b_side) = if color[least.as_str()] == 0 {
            (side(0), side(1))
        } else {
            (side(1), side(0))
        };
        for a in &a_side {
            for b in &b_side {
                let pair: BTreeSet<String> = [a.clone(), b.clone()].into_iter().collect();
                if !theory.is_member(&MeasurementId::Conjunction(pair)) {
                    return Err(CausalError::UnsupportedScenario(alloc::format!(
                        "missing cross conjunction {a}∧{b}"
                    )));
                }
            }
        }
        Ok(Scenario {
            choices: alloc::vec![
                ChoiceVariable {
                    name: "A".into(),
                    options: a_side,
                    outcome_name: "X".into(),
                },
                ChoiceVariable {
                    name: "B".into(),
                    options: b_side,
                    outcome_name: "Y".into(),
                },
            ],
            ontic_name: "L".into(),
        })
    }

    /// The variable space `[choices…, outcomes…, ontic]` this scenario induces
    /// over a model.
    pub fn variable_space(&self, model: &OntologicalModel) -> Result<VariableSpace, CausalError> {
        let theory = model.theory();
        let mut vars: Vec<(String, Vec<String>)> = Vec::new();
        let mut outcome_vars: Vec<(String, Vec<String>)> = Vec::new();
        for choice in &self.choices {
            if choice.options.is_empty() {
                return Err(CausalError::EmptyDomain(choice.name.clone()));
            }
            let mut shared: Option<Vec<String>> = None;
            for option in &choice.options {
                let b = theory.basic(option).ok_or_else(|| {
                    CausalError::UnsupportedScenario(alloc::format!(
                        "`{option}` is not a basic measurement"
                    ))
                })?;
                match &shared {
                    None => shared = Some(b.outcomes.clone()),
                    Some(s) if *s != b.outcomes => {
                        return Err(CausalError::UnsupportedScenario(alloc::format!(
                            "options of `{}` have different outcome lists",
                            choice.name
                        )));
                    }
                    _ => {}
                }
            }
            vars.push((choice.name.clone(), choice.options.clone()));
            outcome_vars.push((
                choice.outcome_name.clone(),
                shared.expect("non-empty options"),
            ));
        }
        vars.extend(outcome_vars);
        vars.push((self.ontic_name.clone(), model.states().to_vec()));
        VariableSpace::new(vars)
    }

    /// Names of the exogenous variables: the choices plus the ontic variable.
    pub fn exogenous_names(&self) -> Vec<&str> {
        self.choices
            .iter()
            .map(|c| c.name.as_str())
            .chain(core::iter::once(self.ontic_name.as_str()))
            .collect()
    }
}

/// Uniform priors over every choice variable's options.
pub fn uniform_choice_priors(scenario: &Scenario) -> BTreeMap<String, Vec<Rational>> {
    scenario
        .choices
        .iter()
        .map(|c| {
            let n = c.options.len() as i64;
            (
                c.name.clone(),
                c.options.iter().map(|_| Rational::new(1, n)).collect(),
            )
        })
        .collect()
}

/// Builds the exact joint `p(choices, outcomes, Λ)` of a model under the
/// given measurement priors and preparation:
/// `response(outcomes | chosen measurement, Λ) × Π priors(choice) × p(Λ|P)`.
pub fn joint_from_model(
    model: &OntologicalModel,
    scenario: &Scenario,
    choice_priors: &BTreeMap<String, Vec<Rational>>,
    preparation: &str,
) -> Result<JointDistribution, CausalError> {
    let space = scenario.variable_space(model)?;
    let parties = scenario.choices.len();
    for choice in &scenario.choices {
        let prior = choice_priors.get(&choice.name).ok_or_else(|| {
            CausalError::BadParameters(alloc::format!("no prior for choice `{}`", choice.name))
        })?;
        if prior.len() != choice.options.len() {
            return Err(CausalError::BadParameters(alloc::format!(
                "prior width mismatch on `{}`",
                choice.name
            )));
        }
        if prior.iter().any(Rational::is_negative)
            || !prior.iter().cloned().sum::<Rational>().is_one()
        {
            return Err(CausalError::BadParameters(alloc::format!(
                "prior over `{}` is not a distribution",
                choice.name
            )));
        }
    }
    let ontic_prior = model.prior(preparation)?;

    // For each combination of chosen options: the measured member and, for
    // multi-party scenarios, where each party's component sits in its
    // sorted-label outcome tuple.
    let mut mass = Vec::with_capacity(space.cell_count());
    for assignment in space.assignments() {
        let choice_idx = &assignment[..parties];
        let outcome_idx = &assignment[parties..2 * parties];
        let state = &model.states()[assignment[2 * parties]];

        let chosen: Vec<&str> = scenario
            .choices
            .iter()
            .zip(choice_idx)
            .map(|(c, &i)| c.options[i].as_str())
            .collect();
        let measurement = if parties == 1 {
            MeasurementId::basic(chosen[0])
        } else {
            MeasurementId::conjunction(chosen.iter().copied())
        };
        let outcome = if parties == 1 {
            Outcome::atom(space.values(parties)[outcome_idx[0]].clone())
        } else {
            // Conjunction components follow sorted basic-label order.
            let mut order: Vec<usize> = (0..parties).collect();
            order.sort_by_key(|&k| chosen[k]);
            let mut parts = alloc::vec![String::new(); parties];
            for (pos, &party) in order.iter().enumerate() {
                parts[pos] = space.values(parties + party)[outcome_idx[party]].clone();
            }
            Outcome::Tuple(parts)
        };

        let response = model.response(&measurement, state)?;
        let mut cell = response.mass(&outcome);
        for (k, choice) in scenario.choices.iter().enumerate() {
            cell = cell * choice_priors[&choice.name][choice_idx[k]].clone();
        }
        cell = cell * ontic_prior.mass(&state.to_string());
        mass.push(cell);
    }
    JointDistribution::new(space, mass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::causal::CiStatement;
    use crate::ontology::{
        classical_nontrivial_model, classical_trivial_model, epr_nontrivial_model,
        pr_nontrivial_model,
    };
    use crate::theory::{epr_theory, epr_trivial, mini_theory};

    #[test]
    fn classical_cell_is_the_plain_product() {
        let model = classical_nontrivial_model();
        let scenario = Scenario::bell();
        let priors = uniform_choice_priors(&scenario);
        let joint = joint_from_model(&model, &scenario, &priors, "P_CL").unwrap();
        // Response is 1 at (X0,Y0) for Λ=0, and the three priors are 1/2.
        let mass = joint
            .mass_named(&[
                ("A", "A0"),
                ("B", "B0"),
                ("X", "X0"),
                ("Y", "Y0"),
                ("L", "L0"),
            ])
            .unwrap();
        assert_eq!(mass, Rational::new(1, 8));
    }

    #[test]
    fn pr_joint_matches_the_delta_oracle_on_all_cells() {
        // Independent oracle: δ_{X,Λ}·δ_{Y⊕(A·B),Λ} / 8 per cell.
        let model = pr_nontrivial_model();
        let scenario = Scenario::bell();
        let priors = uniform_choice_priors(&scenario);
        let joint = joint_from_model(&model, &scenario, &priors, "P_PR").unwrap();
        for a in 0..2u8 {
            for b in 0..2u8 {
                for x in 0..2u8 {
                    for y in 0..2u8 {
                        for l in 0..2u8 {
                            let expected = if x == l && (y ^ (a & b)) == l {
                                Rational::new(1, 8)
                            } else {
                                Rational::zero()
                            };
                            let mass = joint
                                .mass_named(&[
                                    ("A", &alloc::format!("A{a}")),
                                    ("B", &alloc::format!("B{b}")),
                                    ("X", &alloc::format!("X{x}")),
                                    ("Y", &alloc::format!("Y{y}")),
                                    ("L", &alloc::format!("L{l}")),
                                ])
                                .unwrap();
                            assert_eq!(mass, expected, "cell {a}{b}{x}{y}{l}");
                        }
                    }
                }
            }
        }
        // Frozen spot value: A=B=1, X=Y=0 requires Y⊕1 = Λ = 0, impossible
        // with X = Λ = 0, so the mass vanishes.
        assert_eq!(
            joint
                .mass_named(&[
                    ("A", "A1"),
                    ("B", "B1"),
                    ("X", "X0"),
                    ("Y", "Y0"),
                    ("L", "L0")
                ])
                .unwrap(),
            Rational::zero()
        );
    }

    #[test]
    fn trivial_joint_normalizes() {
        let model = classical_trivial_model();
        let scenario = Scenario::infer(model.theory()).unwrap();
        assert_eq!(scenario.choices.len(), 1);
        let priors = uniform_choice_priors(&scenario);
        // Normalization is checked inside the constructor.
        let joint = joint_from_model(&model, &scenario, &priors, "P_CL").unwrap();
        assert_eq!(joint.space().len(), 3);
    }

    #[test]
    fn ci_pattern_of_the_three_nontrivial_models() {
        let ci = |lhs: &str, rhs: &[&str], given: &[&str]| {
            CiStatement::new(lhs, rhs.iter().copied(), given.iter().copied()).unwrap()
        };
        let ci1 = ci("X", &["B"], &["A"]);
        let ci6 = ci("Y", &["A"], &["B", "L"]);
        let scenario = Scenario::bell();
        let priors = uniform_choice_priors(&scenario);

        let classical =
            joint_from_model(&classical_nontrivial_model(), &scenario, &priors, "P_CL").unwrap();
        assert!(classical.check_ci(&ci1).unwrap());
        assert!(classical.check_ci(&ci6).unwrap());

        let pr = joint_from_model(&pr_nontrivial_model(), &scenario, &priors, "P_PR").unwrap();
        assert!(pr.check_ci(&ci1).unwrap());
        assert!(!pr.check_ci(&ci6).unwrap());

        let epr = joint_from_model(&epr_nontrivial_model(), &scenario, &priors, "P_EPR").unwrap();
        assert!(epr.check_ci(&ci1).unwrap());
        assert!(!epr.check_ci(&ci6).unwrap());
    }

    #[test]
    fn inference_reads_theories_correctly() {
        let bell = Scenario::infer(&epr_theory()).unwrap();
        assert_eq!(bell.choices.len(), 2);
        assert_eq!(bell.choices[0].options, alloc::vec!["A0", "A1"]);
        assert_eq!(bell.choices[1].options, alloc::vec!["B0", "B1"]);

        let single = Scenario::infer(&epr_trivial()).unwrap();
        assert_eq!(single.choices.len(), 1);
        assert_eq!(single.choices[0].options.len(), 4);

        // The mini theory has a three-element context and a lone basic.
        assert!(matches!(
            Scenario::infer(&mini_theory()),
            Err(CausalError::UnsupportedScenario(_))
        ));
    }

    #[test]
    fn priors_are_validated() {
        let model = classical_nontrivial_model();
        let scenario = Scenario::bell();
        let mut priors = uniform_choice_priors(&scenario);
        priors.insert(
            "A".into(),
            alloc::vec![Rational::new(1, 3), Rational::new(1, 3)],
        );
        assert!(matches!(
            joint_from_model(&model, &scenario, &priors, "P_CL"),
            Err(CausalError::BadParameters(_))
        ));
    }
}
