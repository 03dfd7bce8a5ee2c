//! Ontological (hidden-variable) models: a prior over ontic states per
//! preparation and a response function per measurement and ontic state.
//!
//! No-conspiracy and λ-sufficiency hold structurally — priors carry no
//! measurement argument and responses no preparation argument — so the checks
//! here are recovery of the operational tables, outcome determinism, and the
//! two noncontextuality notions:
//!
//! - *simultaneous*: a measurement's response at an ontic state is unchanged
//!   by what it is co-measured with;
//! - *measurement*: operationally equivalent measurements (including
//!   coarse-graining views) share responses at every ontic state.

mod builders;

pub use builders::{
    builtin_models, classical_nontrivial_model, classical_trivial_model, epr_nontrivial_model,
    epr_trivial_model, pr_nontrivial_model, pr_trivial_model,
};

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::rational::{Distribution, Rational};
use crate::theory::{MeasurementId, OperationalTheory, Outcome, TheoryBuilder, TheoryError};

/// An ontological model for a specific operational theory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OntologicalModel {
    name: String,
    theory: OperationalTheory,
    states: Vec<String>,
    priors: BTreeMap<String, Distribution<String>>,
    responses: BTreeMap<(MeasurementId, String), Distribution<Outcome>>,
}

/// Errors from model construction or lookup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelError {
    UnknownState(String),
    MissingPrior(String),
    MissingResponse {
        measurement: String,
        state: String,
    },
    ResponseOffOutcomeSpace {
        measurement: String,
        outcome: String,
    },
    Theory(TheoryError),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::UnknownState(s) => write!(f, "unknown ontic state `{s}`"),
            ModelError::MissingPrior(p) => write!(f, "no ontic-state prior for preparation `{p}`"),
            ModelError::MissingResponse { measurement, state } => {
                write!(
                    f,
                    "no response for `{measurement}` at ontic state `{state}`"
                )
            }
            ModelError::ResponseOffOutcomeSpace {
                measurement,
                outcome,
            } => write!(
                f,
                "response of `{measurement}` puts mass on `{outcome}`, outside its outcome space"
            ),
            ModelError::Theory(e) => write!(f, "{e}"),
        }
    }
}

impl From<TheoryError> for ModelError {
    fn from(e: TheoryError) -> Self {
        ModelError::Theory(e)
    }
}

impl OntologicalModel {
    /// Validates and builds a model: priors for every preparation, responses
    /// for every member measurement at every ontic state, all over the right
    /// spaces.
    pub fn new(
        name: impl Into<String>,
        theory: OperationalTheory,
        states: Vec<String>,
        priors: BTreeMap<String, Distribution<String>>,
        responses: BTreeMap<(MeasurementId, String), Distribution<Outcome>>,
    ) -> Result<Self, ModelError> {
        let state_set: BTreeSet<&String> = states.iter().collect();
        for p in theory.preparations() {
            let prior = priors
                .get(p)
                .ok_or_else(|| ModelError::MissingPrior(p.clone()))?;
            for s in prior.support() {
                if !state_set.contains(s) {
                    return Err(ModelError::UnknownState(s.clone()));
                }
            }
        }
        for m in theory.members() {
            let space: BTreeSet<Outcome> = theory.outcome_space(&m)?.into_iter().collect();
            for s in &states {
                let r = responses.get(&(m.clone(), s.clone())).ok_or_else(|| {
                    ModelError::MissingResponse {
                        measurement: m.to_string(),
                        state: s.clone(),
                    }
                })?;
                for o in r.support() {
                    if !space.contains(o) {
                        return Err(ModelError::ResponseOffOutcomeSpace {
                            measurement: m.to_string(),
                            outcome: o.to_string(),
                        });
                    }
                }
            }
        }
        for (m, s) in responses.keys() {
            if !theory.is_member(m) {
                return Err(ModelError::Theory(TheoryError::UnknownMeasurement(
                    m.to_string(),
                )));
            }
            if !state_set.contains(s) {
                return Err(ModelError::UnknownState(s.clone()));
            }
        }
        Ok(OntologicalModel {
            name: name.into(),
            theory,
            states,
            priors,
            responses,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn theory(&self) -> &OperationalTheory {
        &self.theory
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn prior(&self, preparation: &str) -> Result<&Distribution<String>, ModelError> {
        self.priors
            .get(preparation)
            .ok_or_else(|| ModelError::MissingPrior(preparation.to_owned()))
    }

    pub fn priors(&self) -> impl Iterator<Item = (&String, &Distribution<String>)> {
        self.priors.iter()
    }

    pub fn member_responses(
        &self,
    ) -> impl Iterator<Item = (&MeasurementId, &String, &Distribution<Outcome>)> {
        self.responses.iter().map(|((m, s), d)| (m, s, d))
    }

    /// The response `p(X | m, state)`: stored for members, computed by block
    /// summation for coarse-graining views.
    pub fn response(
        &self,
        m: &MeasurementId,
        state: &str,
    ) -> Result<Distribution<Outcome>, ModelError> {
        match m {
            MeasurementId::CoarseGraining { base, partition } => {
                self.theory.outcome_space(m)?; // validates the partition
                let base_response = self.response(base, state)?;
                let lookup: BTreeMap<&Outcome, &Outcome> = partition
                    .blocks
                    .iter()
                    .flat_map(|(name, members)| members.iter().map(move |o| (o, name)))
                    .collect();
                Ok(base_response.map(|o| (*lookup.get(o).expect("partition covers base")).clone()))
            }
            _ => self
                .responses
                .get(&(m.clone(), state.to_owned()))
                .cloned()
                .ok_or_else(|| ModelError::MissingResponse {
                    measurement: m.to_string(),
                    state: state.to_owned(),
                }),
        }
    }

    /// Recovers the operational theory by total probability:
    /// `p(X|M,P) = Σ_Λ p(X|M,Λ) p(Λ|P)`, exactly.
    pub fn recover_operational(&self) -> Result<OperationalTheory, ModelError> {
        let mut builder = TheoryBuilder::new(format!("{}-recovered", self.name));
        for b in self.theory.basics() {
            builder = match &b.factors {
                Some(f) => builder.factored_basic(&b.label, b.outcomes.clone(), f.clone()),
                None => builder.basic(&b.label, b.outcomes.clone()),
            };
        }
        for set in self.theory.conjunction_sets() {
            builder = builder.conjunction(set.iter().cloned());
        }
        for p in self.theory.preparations() {
            builder = builder.preparation(p.clone());
        }
        for m in self.theory.members() {
            let space = self.theory.outcome_space(&m)?;
            for p in self.theory.preparations() {
                let prior = self.prior(p)?;
                let mut cells: Vec<(Outcome, Rational)> = Vec::with_capacity(space.len());
                for o in &space {
                    let mut total = Rational::zero();
                    for (state, weight) in prior.iter() {
                        let r = self.response(&m, state)?;
                        total = total + r.mass(o) * weight.clone();
                    }
                    cells.push((o.clone(), total));
                }
                let d =
                    Distribution::new(cells).expect("mixture of distributions is a distribution");
                builder = builder.table(m.clone(), p.clone(), d);
            }
        }
        builder.finish().map_err(ModelError::from)
    }

    /// True when every recovered table entry equals the theory's own table.
    pub fn recovery_is_exact(&self) -> Result<bool, ModelError> {
        let recovered = self.recover_operational()?;
        for m in self.theory.members() {
            for p in self.theory.preparations() {
                if recovered.distribution(&m, p)? != self.theory.distribution(&m, p)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Outcome determinism: every member response mass is 0 or 1.
    pub fn is_outcome_deterministic(&self) -> bool {
        self.responses.values().all(Distribution::is_deterministic)
    }

    /// Simultaneous noncontextuality: for every member conjunction, every
    /// sub-member's standalone response equals the conjunction's marginal
    /// response at every ontic state. Vacuously true for trivial theories.
    pub fn simultaneous_noncontextuality(&self) -> Result<ContextualityReport, ModelError> {
        let mut witnesses = Vec::new();
        for set in self.theory.conjunction_sets() {
            for sub in crate::theory::proper_subsets(set) {
                if sub.is_empty() {
                    continue;
                }
                let standalone = if sub.len() == 1 {
                    MeasurementId::basic(sub.iter().next().unwrap())
                } else {
                    MeasurementId::Conjunction(sub.clone())
                };
                let view = self.theory.subset_view(set, &sub)?;
                let space = self.theory.outcome_space(&standalone)?;
                for state in &self.states {
                    let direct = self.response(&standalone, state)?;
                    let marginal = self.response(&view, state)?;
                    // View blocks are named by the sub-outcomes themselves.
                    let same = space.iter().all(|o| direct.mass(o) == marginal.mass(o));
                    if !same {
                        witnesses.push(ContextualityWitness {
                            left: standalone.clone(),
                            right: MeasurementId::Conjunction(set.clone()),
                            state: state.clone(),
                        });
                    }
                }
            }
        }
        Ok(ContextualityReport { witnesses })
    }

    /// Measurement noncontextuality: over all pairs from the theory's
    /// measurement-view universe with equal outcome cardinality, every
    /// operationally equivalent pair (order-based outcome pairing) must have
    /// equal responses at every ontic state.
    pub fn measurement_noncontextuality(&self) -> Result<ContextualityReport, ModelError> {
        let universe = self.theory.measurement_views();
        let mut witnesses = Vec::new();
        for i in 0..universe.len() {
            for j in (i + 1)..universe.len() {
                let (a, b) = (&universe[i], &universe[j]);
                let sa = self.theory.outcome_space(a)?;
                let sb = self.theory.outcome_space(b)?;
                if sa.len() != sb.len() {
                    continue;
                }
                if !self.theory.are_operationally_equivalent(a, b, None)? {
                    continue;
                }
                for state in &self.states {
                    let ra = self.response(a, state)?;
                    let rb = self.response(b, state)?;
                    let same = sa
                        .iter()
                        .zip(sb.iter())
                        .all(|(oa, ob)| ra.mass(oa) == rb.mass(ob));
                    if !same {
                        witnesses.push(ContextualityWitness {
                            left: a.clone(),
                            right: b.clone(),
                            state: state.clone(),
                        });
                    }
                }
            }
        }
        Ok(ContextualityReport { witnesses })
    }
}

/// Verdict of a noncontextuality check, with every violating triple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextualityReport {
    pub witnesses: Vec<ContextualityWitness>,
}

impl ContextualityReport {
    /// True when the model is noncontextual (no witnesses).
    pub fn noncontextual(&self) -> bool {
        self.witnesses.is_empty()
    }
}

/// A pair of measurements (or views) whose responses differ at `state`
/// although they should agree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextualityWitness {
    pub left: MeasurementId,
    pub right: MeasurementId,
    pub state: String,
}

impl fmt::Display for ContextualityWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} vs {} at {}", self.left, self.right, self.state)
    }
}
