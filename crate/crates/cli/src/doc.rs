//! JSON document types and their conversions to and from the core types.
//!
//! Conventions, shared by every document:
//! - probabilities are canonical rational strings (`"3/8"`, `"1"`, `"0"`);
//! - a measurement is either a basic label (string) or a conjunction (array
//!   of its sorted basic labels);
//! - tuple outcomes are comma-joined (`"X0,Y0"`), bare outcomes stay as-is;
//! - maps use lexicographic key order, lists a documented deterministic
//!   order, so emission is byte-stable.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use opthy_core::ontology::OntologicalModel;
use opthy_core::rational::{Distribution, Rational};
use opthy_core::theory::{MeasurementId, OperationalTheory, Outcome, TheoryBuilder};
use opthy_core::trivialize::TrivializationMap;

use crate::DocError;

/// A basic or conjunction measurement reference.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeasurementRef {
    Basic(String),
    Conjunction(Vec<String>),
}

impl MeasurementRef {
    fn from_id(m: &MeasurementId) -> Self {
        match m {
            MeasurementId::Basic(l) => MeasurementRef::Basic(l.clone()),
            MeasurementId::Conjunction(set) => {
                MeasurementRef::Conjunction(set.iter().cloned().collect())
            }
            MeasurementId::CoarseGraining { .. } => {
                unreachable!("views are serialized structurally, not as refs")
            }
        }
    }

    fn to_id(&self) -> MeasurementId {
        match self {
            MeasurementRef::Basic(l) => MeasurementId::basic(l.clone()),
            MeasurementRef::Conjunction(labels) => {
                MeasurementId::conjunction(labels.iter().cloned())
            }
        }
    }

    fn is_conjunction(&self) -> bool {
        matches!(self, MeasurementRef::Conjunction(_))
    }
}

fn outcome_key(o: &Outcome) -> String {
    match o {
        Outcome::Atom(s) => s.clone(),
        Outcome::Tuple(parts) => parts.join(","),
    }
}

fn parse_outcome(key: &str, tuple: bool) -> Outcome {
    if tuple {
        Outcome::tuple(key.split(','))
    } else {
        Outcome::atom(key)
    }
}

fn parse_rational(s: &str) -> Result<Rational, DocError> {
    s.parse().map_err(|_| DocError::BadRational(s.to_string()))
}

fn dist_to_doc(space: &[Outcome], d: &Distribution<Outcome>) -> BTreeMap<String, String> {
    space
        .iter()
        .map(|o| (outcome_key(o), d.mass(o).to_string()))
        .collect()
}

/// One basic-measurement declaration.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BasicDoc {
    pub label: String,
    pub outcomes: Vec<String>,
    /// Component outcome-label lists whose row-major product matches
    /// `outcomes` positionally; present on measurements whose outcomes carry
    /// index structure (the trivial theories' `Z00..Z11`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome_factors: Option<Vec<Vec<String>>>,
}

/// One probability table entry.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableDoc {
    pub measurement: MeasurementRef,
    pub preparation: String,
    pub dist: BTreeMap<String, String>,
}

/// The theory document.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TheoryDoc {
    pub name: String,
    pub basics: Vec<BasicDoc>,
    pub conjunctions: Vec<Vec<String>>,
    pub preparations: Vec<String>,
    pub tables: Vec<TableDoc>,
}

/// Serializes a theory: basics in declaration order, conjunctions sorted,
/// tables dense over each outcome space, sorted by measurement then
/// preparation.
pub fn theory_to_doc(theory: &OperationalTheory) -> TheoryDoc {
    let basics = theory
        .basics()
        .iter()
        .map(|b| BasicDoc {
            label: b.label.clone(),
            outcomes: b.outcomes.clone(),
            outcome_factors: b.factors.clone(),
        })
        .collect();
    let conjunctions: Vec<Vec<String>> = theory
        .conjunction_sets()
        .map(|s| s.iter().cloned().collect())
        .collect();
    let mut tables = Vec::new();
    for m in theory.members() {
        let space = theory.outcome_space(&m).expect("member");
        for p in theory.preparations() {
            let d = theory.distribution(&m, p).expect("complete tables");
            tables.push(TableDoc {
                measurement: MeasurementRef::from_id(&m),
                preparation: p.clone(),
                dist: dist_to_doc(&space, &d),
            });
        }
    }
    tables.sort_by(|a, b| (&a.measurement, &a.preparation).cmp(&(&b.measurement, &b.preparation)));
    TheoryDoc {
        name: theory.name().to_string(),
        basics,
        conjunctions,
        preparations: theory.preparations().to_vec(),
        tables,
    }
}

/// Rebuilds (and fully revalidates) a theory from its document.
pub fn doc_to_theory(doc: &TheoryDoc) -> Result<OperationalTheory, DocError> {
    let mut builder = TheoryBuilder::new(doc.name.clone());
    for b in &doc.basics {
        builder = match &b.outcome_factors {
            Some(f) => builder.factored_basic(&b.label, b.outcomes.clone(), f.clone()),
            None => builder.basic(&b.label, b.outcomes.clone()),
        };
    }
    for c in &doc.conjunctions {
        builder = builder.conjunction(c.iter().cloned());
    }
    for p in &doc.preparations {
        builder = builder.preparation(p.clone());
    }
    for t in &doc.tables {
        let cells: Result<Vec<(Outcome, Rational)>, DocError> = t
            .dist
            .iter()
            .map(|(k, v)| {
                Ok((
                    parse_outcome(k, t.measurement.is_conjunction()),
                    parse_rational(v)?,
                ))
            })
            .collect();
        let d = Distribution::new(cells?)?;
        builder = builder.table(t.measurement.to_id(), t.preparation.clone(), d);
    }
    Ok(builder.finish()?)
}

/// One response-function entry.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResponseDoc {
    pub measurement: MeasurementRef,
    pub state: String,
    pub dist: BTreeMap<String, String>,
}

/// The ontological-model document; the theory it models travels separately.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelDoc {
    pub name: String,
    pub ontic_states: Vec<String>,
    /// preparation → state → probability.
    pub priors: BTreeMap<String, BTreeMap<String, String>>,
    pub responses: Vec<ResponseDoc>,
}

pub fn model_to_doc(model: &OntologicalModel) -> ModelDoc {
    let priors = model
        .priors()
        .map(|(prep, d)| {
            let inner = model
                .states()
                .iter()
                .map(|s| (s.clone(), d.mass(s).to_string()))
                .collect();
            (prep.clone(), inner)
        })
        .collect();
    let mut responses: Vec<ResponseDoc> = model
        .member_responses()
        .map(|(m, s, d)| {
            let space = model.theory().outcome_space(m).expect("member");
            ResponseDoc {
                measurement: MeasurementRef::from_id(m),
                state: s.clone(),
                dist: dist_to_doc(&space, d),
            }
        })
        .collect();
    responses.sort_by(|a, b| (&a.measurement, &a.state).cmp(&(&b.measurement, &b.state)));
    ModelDoc {
        name: model.name().to_string(),
        ontic_states: model.states().to_vec(),
        priors,
        responses,
    }
}

/// Rebuilds (and fully revalidates) a model over the given theory.
pub fn doc_to_model(
    doc: &ModelDoc,
    theory: &OperationalTheory,
) -> Result<OntologicalModel, DocError> {
    let mut priors = BTreeMap::new();
    for (prep, masses) in &doc.priors {
        let cells: Result<Vec<(String, Rational)>, DocError> = masses
            .iter()
            .map(|(s, v)| Ok((s.clone(), parse_rational(v)?)))
            .collect();
        priors.insert(prep.clone(), Distribution::new(cells?)?);
    }
    let mut responses = BTreeMap::new();
    for r in &doc.responses {
        let cells: Result<Vec<(Outcome, Rational)>, DocError> = r
            .dist
            .iter()
            .map(|(k, v)| {
                Ok((
                    parse_outcome(k, r.measurement.is_conjunction()),
                    parse_rational(v)?,
                ))
            })
            .collect();
        let key = (r.measurement.to_id(), r.state.clone());
        if responses.insert(key, Distribution::new(cells?)?).is_some() {
            return Err(DocError::Invalid(format!(
                "two responses for `{}` at state `{}`",
                r.measurement.to_id(),
                r.state
            )));
        }
    }
    Ok(OntologicalModel::new(
        doc.name.clone(),
        theory.clone(),
        doc.ontic_states.clone(),
        priors,
        responses,
    )?)
}

/// A coarse-graining block: name plus member outcomes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockDoc {
    pub name: String,
    pub members: Vec<String>,
}

/// A view in the trivialized theory: a member as-is, or a coarse-graining
/// over one.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ViewDoc {
    Member(MeasurementRef),
    CoarseGraining {
        base: MeasurementRef,
        blocks: Vec<BlockDoc>,
    },
}

fn view_to_doc(view: &MeasurementId) -> ViewDoc {
    match view {
        MeasurementId::CoarseGraining { base, partition } => ViewDoc::CoarseGraining {
            base: MeasurementRef::from_id(base),
            blocks: partition
                .blocks
                .iter()
                .map(|(name, members)| BlockDoc {
                    name: outcome_key(name),
                    members: members.iter().map(outcome_key).collect(),
                })
                .collect(),
        },
        member => ViewDoc::Member(MeasurementRef::from_id(member)),
    }
}

/// One bijection entry of a new basic: tuple outcome ↔ flat label.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BijectionPairDoc {
    pub tuple: Vec<String>,
    pub flat: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NewBasicDoc {
    pub context: Vec<String>,
    pub basic: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ViewsDoc {
    pub measurement: MeasurementRef,
    pub views: Vec<ViewDoc>,
}

/// The trivialization-map document, exported alongside the output theory so
/// the equivalence can be audited offline.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapDoc {
    pub new_basics: Vec<NewBasicDoc>,
    pub outcome_bijections: BTreeMap<String, Vec<BijectionPairDoc>>,
    pub marginal_views: Vec<ViewsDoc>,
    pub carried_basics: Vec<String>,
}

pub fn map_to_doc(map: &TrivializationMap) -> MapDoc {
    let new_basics = map
        .new_basics()
        .map(|(ctx, label)| NewBasicDoc {
            context: ctx.iter().cloned().collect(),
            basic: label.to_string(),
        })
        .collect();
    let outcome_bijections = map
        .new_basics()
        .map(|(_, label)| {
            let pairs = map
                .bijection(label)
                .expect("bijection for every new basic")
                .iter()
                .map(|(tuple, flat)| {
                    let Outcome::Tuple(parts) = tuple else {
                        unreachable!("conjunction outcomes are tuples")
                    };
                    BijectionPairDoc {
                        tuple: parts.clone(),
                        flat: flat.clone(),
                    }
                })
                .collect();
            (label.to_string(), pairs)
        })
        .collect();
    let marginal_views = map
        .views()
        .map(|(old, views)| ViewsDoc {
            measurement: MeasurementRef::from_id(old),
            views: views.iter().map(view_to_doc).collect(),
        })
        .collect();
    MapDoc {
        new_basics,
        outcome_bijections,
        marginal_views,
        carried_basics: map.carried_basics().map(str::to_string).collect(),
    }
}

/// Canonical pretty JSON used by every subcommand: two-space indentation and
/// a trailing newline, byte-stable for identical inputs.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("serializable documents");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use opthy_core::ontology::epr_trivial_model;
    use opthy_core::theory::{epr_theory, epr_trivial, mini_theory};
    use opthy_core::trivialize::trivialize;

    #[test]
    fn theory_round_trip_is_lossless() {
        for theory in [epr_theory(), epr_trivial(), mini_theory()] {
            let doc = theory_to_doc(&theory);
            let json = to_json_string(&doc);
            let parsed: TheoryDoc = serde_json::from_str(&json).unwrap();
            let back = doc_to_theory(&parsed).unwrap();
            assert_eq!(back, theory);
        }
    }

    #[test]
    fn theory_emission_is_byte_stable() {
        let a = to_json_string(&theory_to_doc(&epr_theory()));
        let b = to_json_string(&theory_to_doc(&epr_theory()));
        assert_eq!(a, b);
        assert!(a.contains("\"3/8\""));
        assert!(a.contains("\"A0\""));
    }

    #[test]
    fn model_round_trip_is_lossless() {
        let model = epr_trivial_model();
        let doc = model_to_doc(&model);
        let json = to_json_string(&doc);
        let parsed: ModelDoc = serde_json::from_str(&json).unwrap();
        let back = doc_to_model(&parsed, model.theory()).unwrap();
        assert_eq!(back, model);
    }

    #[test]
    fn malformed_documents_are_rejected() {
        let mut doc = theory_to_doc(&epr_trivial());
        doc.tables[0]
            .dist
            .insert("Z00".to_string(), "2/3".to_string());
        assert!(doc_to_theory(&doc).is_err());

        let mut doc = theory_to_doc(&epr_trivial());
        doc.tables[0]
            .dist
            .insert("Z00".to_string(), "one half".to_string());
        assert!(matches!(doc_to_theory(&doc), Err(DocError::BadRational(_))));

        // Duplicate table and response entries are rejected, not overwritten.
        let mut doc = theory_to_doc(&epr_trivial());
        let dup = doc.tables[0].clone();
        doc.tables.push(dup);
        assert!(doc_to_theory(&doc).is_err());

        let model = epr_trivial_model();
        let mut doc = model_to_doc(&model);
        let dup = doc.responses[0].clone();
        doc.responses.push(dup);
        assert!(doc_to_model(&doc, model.theory()).is_err());
    }

    #[test]
    fn map_serializes_with_bijections_and_views() {
        let (_, map) = trivialize(&mini_theory()).unwrap();
        let doc = map_to_doc(&map);
        assert_eq!(doc.new_basics.len(), 2);
        assert_eq!(doc.carried_basics, vec!["M5"]);
        assert_eq!(doc.outcome_bijections["M123"].len(), 8);
        let json = to_json_string(&doc);
        assert!(json.contains("\"M123\""));
        // M1 has two views, both coarse-grainings.
        let m1 = doc
            .marginal_views
            .iter()
            .find(|v| v.measurement == MeasurementRef::Basic("M1".into()))
            .unwrap();
        assert_eq!(m1.views.len(), 2);
    }
}
