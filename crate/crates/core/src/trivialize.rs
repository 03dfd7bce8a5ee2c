//! Trivialization: replacing each maximal simultaneous measurement with a new
//! stand-alone measurement that is operationally equivalent to it.
//!
//! The new basics get flat outcome labels `Z<i1><i2>…` obtained by flattening
//! the conjunction's tuple outcomes lexicographically (the outcome bijection),
//! and carry an outcome factorization so the old measurements stay reachable
//! as coarse-graining views. Lone basics — those sitting in no context — are
//! carried over unchanged.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::rational::Distribution;
use crate::theory::{
    Context, MeasurementId, NonDisturbanceViolation, OperationalTheory, Outcome, TheoryBuilder,
    TheoryError,
};

/// Bookkeeping produced by [`trivialize`]: which context became which new
/// basic, how tuple outcomes map to flat labels, and where every old
/// measurement can be recovered as a view.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrivializationMap {
    new_basics: BTreeMap<Context, String>,
    outcome_bijections: BTreeMap<String, Vec<(Outcome, String)>>,
    marginal_views: BTreeMap<MeasurementId, Vec<MeasurementId>>,
    carried: Vec<String>,
}

impl TrivializationMap {
    /// `(old context, new basic label)` pairs, in sorted context order.
    pub fn new_basics(&self) -> impl Iterator<Item = (&Context, &str)> {
        self.new_basics.iter().map(|(c, l)| (c, l.as_str()))
    }

    /// Basics of the old theory that were carried over unchanged.
    pub fn carried_basics(&self) -> impl Iterator<Item = &str> {
        self.carried.iter().map(String::as_str)
    }

    /// The outcome bijection of a new basic: `(old tuple outcome, flat
    /// label)` pairs in outcome order.
    pub fn bijection(&self, new_basic: &str) -> Option<&[(Outcome, String)]> {
        self.outcome_bijections.get(new_basic).map(Vec::as_slice)
    }

    /// Every old measurement together with its views in the new theory.
    pub fn views(&self) -> impl Iterator<Item = (&MeasurementId, &[MeasurementId])> {
        self.marginal_views.iter().map(|(m, v)| (m, v.as_slice()))
    }

    /// The views realizing `old` in the new theory. When `old` sat in several
    /// contexts the list holds one view per context (lexicographically first
    /// context first); the views are pairwise operationally equivalent.
    pub fn marginal_view(&self, old: &MeasurementId) -> Result<&[MeasurementId], TrivializeError> {
        self.marginal_views
            .get(old)
            .map(Vec::as_slice)
            .ok_or_else(|| TrivializeError::Uncovered(alloc::vec![old.to_string()]))
    }
}

/// Errors from trivialization and theory-equivalence verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TrivializeError {
    /// The input theory disturbs, so old measurements would not be
    /// recoverable as marginals; carries the first violating triple.
    Disturbing(NonDisturbanceViolation),
    /// A requested context subset entry is not a maximal context.
    NotAContext(String),
    /// The map does not cover these old measurements.
    Uncovered(Vec<String>),
    PreparationMismatch,
    Theory(TheoryError),
}

impl fmt::Display for TrivializeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrivializeError::Disturbing(v) => write!(
                f,
                "theory is disturbing: p({} | {}) differs from the standalone table under {}",
                v.measurement, v.conjunction, v.preparation
            ),
            TrivializeError::NotAContext(c) => write!(f, "`{c}` is not a maximal context"),
            TrivializeError::Uncovered(ms) => {
                write!(f, "map does not cover: {}", ms.join(", "))
            }
            TrivializeError::PreparationMismatch => {
                write!(f, "theories have different preparation sets")
            }
            TrivializeError::Theory(e) => write!(f, "{e}"),
        }
    }
}

impl From<TheoryError> for TrivializeError {
    fn from(e: TheoryError) -> Self {
        TrivializeError::Theory(e)
    }
}

/// Replaces every maximal context with a new operationally equivalent basic
/// measurement, yielding a trivial theory and the bookkeeping map.
pub fn trivialize(
    theory: &OperationalTheory,
) -> Result<(OperationalTheory, TrivializationMap), TrivializeError> {
    let all = theory.contexts();
    trivialize_contexts(theory, &all)
}

/// Partial trivialization: only the `selected` maximal contexts are replaced.
///
/// A member is dropped (and becomes view-only) exactly when every maximal
/// context containing it is selected; this keeps the surviving member set
/// downward closed. With all contexts selected the output is trivial.
pub fn trivialize_contexts(
    theory: &OperationalTheory,
    selected: &[Context],
) -> Result<(OperationalTheory, TrivializationMap), TrivializeError> {
    let report = theory.non_disturbance();
    if let Some(v) = report.violations.first() {
        return Err(TrivializeError::Disturbing(v.clone()));
    }
    let contexts = theory.contexts();
    let selected: BTreeSet<Context> = selected.iter().cloned().collect();
    for c in &selected {
        if !contexts.contains(c) {
            return Err(TrivializeError::NotAContext(
                MeasurementId::Conjunction(c.clone()).to_string(),
            ));
        }
    }

    // A member survives if some unselected maximal context contains it.
    let containing_contexts = |set: &BTreeSet<String>| -> Vec<&Context> {
        contexts.iter().filter(|c| set.is_subset(c)).collect()
    };
    let removed = |set: &BTreeSet<String>| -> bool {
        let containing = containing_contexts(set);
        !containing.is_empty() && containing.iter().all(|c| selected.contains(*c))
    };

    // Name the new basics deterministically.
    let mut taken: BTreeSet<String> = theory.basics().iter().map(|b| b.label.clone()).collect();
    let mut new_basics: BTreeMap<Context, String> = BTreeMap::new();
    for context in &selected {
        let label = new_basic_label(context, &taken);
        taken.insert(label.clone());
        new_basics.insert(context.clone(), label);
    }

    let mut builder = TheoryBuilder::new(format!("{}-trivialized", theory.name()));
    let mut bijections: BTreeMap<String, Vec<(Outcome, String)>> = BTreeMap::new();

    // New basics, in sorted context order.
    for (context, label) in &new_basics {
        let conj = MeasurementId::Conjunction(context.clone());
        let tuples = theory.outcome_space(&conj)?;
        let sizes: Vec<usize> = context
            .iter()
            .map(|l| theory.basic(l).expect("context member").outcomes.len())
            .collect();
        let flats = flat_labels(&sizes);
        let factors: Vec<Vec<String>> = context
            .iter()
            .map(|l| {
                let b = theory.basic(l).expect("context member");
                b.outcomes.iter().map(|o| format!("{l}={o}")).collect()
            })
            .collect();
        builder = builder.factored_basic(label, flats.clone(), factors);
        bijections.insert(
            label.clone(),
            tuples.iter().cloned().zip(flats.iter().cloned()).collect(),
        );
    }
    // Surviving old basics, in declaration order.
    let mut carried = Vec::new();
    for b in theory.basics() {
        let single: BTreeSet<String> = [b.label.clone()].into_iter().collect();
        let lone = containing_contexts(&single).is_empty();
        if lone || !removed(&single) {
            carried.push(b.label.clone());
            builder = match &b.factors {
                Some(f) => builder.factored_basic(&b.label, b.outcomes.clone(), f.clone()),
                None => builder.basic(&b.label, b.outcomes.clone()),
            };
        }
    }
    // Surviving conjunctions.
    for set in theory.conjunction_sets() {
        if !removed(set) {
            builder = builder.conjunction(set.iter().cloned());
        }
    }
    for p in theory.preparations() {
        builder = builder.preparation(p.clone());
    }
    // Tables: transported for new basics, copied for survivors.
    for (context, label) in &new_basics {
        let conj = MeasurementId::Conjunction(context.clone());
        let pairs = &bijections[label];
        for p in theory.preparations() {
            let old = theory.distribution(&conj, p)?;
            let cells: Vec<(Outcome, _)> = pairs
                .iter()
                .map(|(tuple, flat)| (Outcome::atom(flat.clone()), old.mass(tuple)))
                .collect();
            let d = Distribution::new(cells).expect("bijective transport preserves normalization");
            builder = builder.table(MeasurementId::basic(label.clone()), p.clone(), d);
        }
    }
    for b in &carried {
        for p in theory.preparations() {
            let d = theory.distribution(&MeasurementId::basic(b.clone()), p)?;
            builder = builder.table(MeasurementId::basic(b.clone()), p.clone(), d);
        }
    }
    for set in theory.conjunction_sets() {
        if !removed(set) {
            let m = MeasurementId::Conjunction(set.clone());
            for p in theory.preparations() {
                let d = theory.distribution(&m, p)?;
                builder = builder.table(m.clone(), p.clone(), d);
            }
        }
    }
    let output = builder.finish()?;

    // Views: every old member maps to its realizations in the new theory.
    let mut marginal_views: BTreeMap<MeasurementId, Vec<MeasurementId>> = BTreeMap::new();
    for m in theory.members() {
        let set: BTreeSet<String> = match &m {
            MeasurementId::Basic(l) => [l.clone()].into_iter().collect(),
            MeasurementId::Conjunction(s) => s.clone(),
            MeasurementId::CoarseGraining { .. } => unreachable!("members are not views"),
        };
        if !removed(&set) || containing_contexts(&set).is_empty() {
            marginal_views.insert(m.clone(), alloc::vec![m.clone()]);
            continue;
        }
        let mut views = Vec::new();
        for context in containing_contexts(&set) {
            let Some(label) = new_basics.get(context) else {
                continue;
            };
            if set == *context {
                views.push(MeasurementId::basic(label.clone()));
            } else {
                let members: Vec<&String> = context.iter().collect();
                let comps: Vec<usize> = members
                    .iter()
                    .enumerate()
                    .filter(|(_, l)| set.contains(**l))
                    .map(|(i, _)| i)
                    .collect();
                views.push(output.factor_view(label, &comps)?);
            }
        }
        marginal_views.insert(m.clone(), views);
    }

    let map = TrivializationMap {
        new_basics,
        outcome_bijections: bijections,
        marginal_views,
        carried,
    };
    Ok((output, map))
}

/// Names the measurement replacing `context`: shared alphabetic prefix plus
/// the concatenated numeric suffixes when the members look like `M1, M2, …`
/// (giving `M12…`), the letter `C` plus suffixes when prefixes differ (giving
/// `C00` for `{A0, B0}`), and an underscore-joined fallback otherwise or on
/// collision with a taken label.
fn new_basic_label(context: &Context, taken: &BTreeSet<String>) -> String {
    let split: Vec<(&str, &str)> = context
        .iter()
        .map(|l| {
            let digits = l.len() - l.trim_end_matches(|c: char| c.is_ascii_digit()).len();
            l.split_at(l.len() - digits)
        })
        .collect();
    if split.iter().all(|(_, suffix)| !suffix.is_empty()) {
        let first_prefix = split[0].0;
        let suffixes: String = split.iter().map(|(_, s)| *s).collect();
        let candidate = if split.iter().all(|(p, _)| *p == first_prefix) {
            format!("{first_prefix}{suffixes}")
        } else {
            format!("C{suffixes}")
        };
        if !taken.contains(&candidate) {
            return candidate;
        }
    }
    let labels: Vec<&str> = context.iter().map(String::as_str).collect();
    let mut fallback = format!("T_{}", labels.join("_"));
    while taken.contains(&fallback) {
        fallback.push('x');
    }
    fallback
}

/// Flat outcome labels for a product of component outcome lists: `Z` plus the
/// concatenated component indices, row-major (`Z00, Z01, Z10, Z11` for 2×2).
/// Indices are underscore-separated when a component has ten or more
/// outcomes, keeping labels unambiguous.
fn flat_labels(sizes: &[usize]) -> Vec<String> {
    let wide = sizes.iter().any(|&s| s > 10);
    let total: usize = sizes.iter().product();
    (0..total)
        .map(|flat| {
            let digits = crate::theory::mixed_radix_digits(flat, sizes);
            let parts: Vec<String> = digits.iter().map(ToString::to_string).collect();
            if wide {
                format!("Z{}", parts.join("_"))
            } else {
                format!("Z{}", parts.concat())
            }
        })
        .collect()
}

/// One table mismatch found by [`verify_theory_equivalence`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceMismatch {
    pub left: String,
    pub right: String,
    pub preparation: String,
}

/// Result of checking that two theories are operationally equivalent under a
/// trivialization map.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct EquivalenceReport {
    pub mismatches: Vec<EquivalenceMismatch>,
}

impl EquivalenceReport {
    pub fn holds(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Verifies theory-level operational equivalence: every old measurement's
/// table equals its mapped view's table in `new`, for every preparation,
/// under the map's outcome pairing — exact rational comparison throughout.
/// Old measurements realized by several views must also have pairwise
/// equivalent views.
///
/// Errors when the map leaves old measurements uncovered or the preparation
/// sets differ; table disagreements are reported, not errors.
pub fn verify_theory_equivalence(
    old: &OperationalTheory,
    new: &OperationalTheory,
    map: &TrivializationMap,
) -> Result<EquivalenceReport, TrivializeError> {
    let old_preps: BTreeSet<&String> = old.preparations().iter().collect();
    let new_preps: BTreeSet<&String> = new.preparations().iter().collect();
    if old_preps != new_preps {
        return Err(TrivializeError::PreparationMismatch);
    }
    let uncovered: Vec<String> = old
        .members()
        .into_iter()
        .filter(|m| map.marginal_views.get(m).is_none_or(Vec::is_empty))
        .map(|m| m.to_string())
        .collect();
    if !uncovered.is_empty() {
        return Err(TrivializeError::Uncovered(uncovered));
    }

    let mut mismatches = Vec::new();
    for (old_m, views) in map.views() {
        if !old.is_member(old_m) {
            continue; // stale map entry; coverage of `old` is what matters
        }
        let old_space = old.outcome_space(old_m)?;
        for view in views {
            let view_space = new.outcome_space(view)?;
            let comparable = old_space.len() == view_space.len();
            for p in old.preparations() {
                let equal = comparable && {
                    let od = old.distribution(old_m, p)?;
                    let nd = new.distribution(view, p)?;
                    old_space
                        .iter()
                        .zip(view_space.iter())
                        .all(|(a, b)| od.mass(a) == nd.mass(b))
                };
                if !equal {
                    mismatches.push(EquivalenceMismatch {
                        left: old_m.to_string(),
                        right: view.to_string(),
                        preparation: p.clone(),
                    });
                }
            }
        }
        // Multiply realized measurements: all views pairwise equivalent.
        for i in 0..views.len() {
            for j in (i + 1)..views.len() {
                if !new.are_operationally_equivalent(&views[i], &views[j], None)? {
                    for p in old.preparations() {
                        mismatches.push(EquivalenceMismatch {
                            left: views[i].to_string(),
                            right: views[j].to_string(),
                            preparation: p.clone(),
                        });
                    }
                }
            }
        }
    }
    Ok(EquivalenceReport { mismatches })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;
    use crate::theory::{
        classical_theory, epr_theory, epr_trivial, mini_theory, pr_theory, pr_trivial,
    };

    #[test]
    fn mini_trivializes_to_three_basics() {
        let theory = mini_theory();
        let (out, map) = trivialize(&theory).unwrap();
        let labels: Vec<&str> = out.basics().iter().map(|b| b.label.as_str()).collect();
        assert_eq!(labels, vec!["M123", "M14", "M5"]);
        assert!(out.is_trivial());
        assert_eq!(map.carried_basics().collect::<Vec<_>>(), vec!["M5"]);

        // M1 is realized in both contexts; the triple context comes first.
        let m1 = MeasurementId::basic("M1");
        let views = map.marginal_view(&m1).unwrap();
        assert_eq!(views.len(), 2);
        let shown: Vec<String> = views.iter().map(|v| v.to_string()).collect();
        assert!(shown[0].starts_with("M123^"), "{shown:?}");
        assert!(shown[1].starts_with("M14^"), "{shown:?}");

        // M5 maps to itself; M1∧M2 to a two-component view of M123.
        assert_eq!(
            map.marginal_view(&MeasurementId::basic("M5")).unwrap(),
            &[MeasurementId::basic("M5")]
        );
        let pair = MeasurementId::conjunction(["M1", "M2"]);
        let views = map.marginal_view(&pair).unwrap();
        assert_eq!(views.len(), 1);
        assert!(views[0].to_string().starts_with("M123^"));

        let report = verify_theory_equivalence(&theory, &out, &map).unwrap();
        assert!(report.holds(), "{:?}", report.mismatches);
    }

    #[test]
    fn bell_theories_trivialize_to_their_twins() {
        for (theory, twin) in [(epr_theory(), epr_trivial()), (pr_theory(), pr_trivial())] {
            let (out, map) = trivialize(&theory).unwrap();
            let labels: Vec<&str> = out.basics().iter().map(|b| b.label.as_str()).collect();
            assert_eq!(labels, vec!["C00", "C01", "C10", "C11"]);
            // Transported tables equal the hand-written twin's tables.
            for basic in out.basics() {
                let m = MeasurementId::basic(&basic.label);
                for p in out.preparations() {
                    assert_eq!(
                        out.distribution(&m, p).unwrap(),
                        twin.distribution(&m, p).unwrap(),
                        "{} under {p}",
                        basic.label
                    );
                }
            }
            // And the map certifies equivalence against the twin directly.
            let report = verify_theory_equivalence(&theory, &twin, &map).unwrap();
            assert!(report.holds(), "{:?}", report.mismatches);
        }
    }

    #[test]
    fn bell_basic_views() {
        let theory = epr_theory();
        let (out, map) = trivialize(&theory).unwrap();
        let a0 = MeasurementId::basic("A0");
        let views = map.marginal_view(&a0).unwrap();
        assert_eq!(views.len(), 2);
        let shown: Vec<String> = views.iter().map(|v| v.to_string()).collect();
        assert!(shown[0].starts_with("C00^"), "{shown:?}");
        assert!(shown[1].starts_with("C01^"), "{shown:?}");
        // The two realizations are operationally equivalent.
        assert!(out
            .are_operationally_equivalent(&views[0], &views[1], None)
            .unwrap());
    }

    #[test]
    fn wrong_pairing_is_reported_not_hidden() {
        // The classical tables differ from the EPR trivial tables at the
        // A·B = 0 cells, so the classical map does not certify equivalence
        // against the EPR twin.
        let classical = classical_theory();
        let (_, map) = trivialize(&classical).unwrap();
        // Rename the preparation mismatch away by verifying against a twin
        // built over the classical preparation: use pr_trivial's structure...
        // Simpler: verify against the EPR trivial theory fails on preps, so
        // compare through a rebuilt twin with the classical preparation.
        let twin = crate::theory::classical_trivial();
        let ok = verify_theory_equivalence(&classical, &twin, &map).unwrap();
        assert!(ok.holds());

        // Now swap in EPR-like tables under the classical preparation name.
        let bad = {
            use crate::theory::TheoryBuilder;
            let src = epr_trivial();
            let mut b = TheoryBuilder::new("epr-relabelled").preparation("P_CL");
            for basic in src.basics() {
                b = b.factored_basic(
                    &basic.label,
                    basic.outcomes.clone(),
                    basic.factors.clone().unwrap(),
                );
                let m = MeasurementId::basic(&basic.label);
                b = b.table(
                    m,
                    "P_CL",
                    src.distribution(&MeasurementId::basic(&basic.label), "P_EPR")
                        .unwrap(),
                );
            }
            b.finish().unwrap()
        };
        let report = verify_theory_equivalence(&classical, &bad, &map).unwrap();
        assert!(!report.holds());
        assert!(report
            .mismatches
            .iter()
            .any(|m| m.left.contains("A0∧B0") || m.right.contains("C00")));
    }

    #[test]
    fn round_trip_through_bijection() {
        let theory = epr_theory();
        let (out, map) = trivialize(&theory).unwrap();
        for (context, label) in map.new_basics() {
            let conj = MeasurementId::Conjunction(context.clone());
            let pairs = map.bijection(label).unwrap();
            for p in theory.preparations() {
                let old = theory.distribution(&conj, p).unwrap();
                let new = out.distribution(&MeasurementId::basic(label), p).unwrap();
                for (tuple, flat) in pairs {
                    assert_eq!(old.mass(tuple), new.mass(&Outcome::atom(flat.clone())));
                }
            }
        }
    }

    #[test]
    fn already_trivial_theory_is_a_fixed_point() {
        let theory = epr_trivial();
        let (out, map) = trivialize(&theory).unwrap();
        assert_eq!(out.basics(), theory.basics());
        assert!(out.is_trivial());
        assert!(map.new_basics().next().is_none());
        for m in theory.members() {
            assert_eq!(map.marginal_view(&m).unwrap(), core::slice::from_ref(&m));
        }
        let report = verify_theory_equivalence(&theory, &out, &map).unwrap();
        assert!(report.holds());
    }

    #[test]
    fn disturbing_theories_are_rejected_with_a_triple() {
        use crate::rational::dist;
        use crate::theory::TheoryBuilder;
        let half = Rational::new(1, 2);
        let theory = TheoryBuilder::new("disturbing")
            .basic("A", ["H", "T"])
            .basic("B", ["H", "T"])
            .conjunction(["A", "B"])
            .preparation("P")
            .table(
                MeasurementId::basic("A"),
                "P",
                Distribution::point(Outcome::atom("H")),
            )
            .table(
                MeasurementId::basic("B"),
                "P",
                dist([
                    (Outcome::atom("H"), half.clone()),
                    (Outcome::atom("T"), half.clone()),
                ])
                .unwrap(),
            )
            .table(
                MeasurementId::conjunction(["A", "B"]),
                "P",
                dist([
                    (Outcome::tuple(["H", "H"]), half.clone()),
                    (Outcome::tuple(["T", "T"]), half),
                ])
                .unwrap(),
            )
            .finish()
            .unwrap();
        match trivialize(&theory) {
            Err(TrivializeError::Disturbing(v)) => {
                assert_eq!(v.measurement, MeasurementId::basic("A"));
                assert_eq!(v.preparation, "P");
            }
            other => panic!("expected disturbance rejection, got {other:?}"),
        }
    }

    #[test]
    fn partial_trivialization_keeps_unselected_contexts() {
        let theory = mini_theory();
        let triple: Context = ["M1", "M2", "M3"].iter().map(|s| s.to_string()).collect();
        let (out, map) = trivialize_contexts(&theory, core::slice::from_ref(&triple)).unwrap();
        // M123 created; M1 survives (it also sits in the unselected {M1,M4});
        // M2 and M3 become view-only; M1∧M4 persists.
        let labels: Vec<&str> = out.basics().iter().map(|b| b.label.as_str()).collect();
        assert_eq!(labels, vec!["M123", "M1", "M4", "M5"]);
        assert!(!out.is_trivial());
        assert!(out.is_member(&MeasurementId::conjunction(["M1", "M4"])));
        assert!(!out.is_member(&MeasurementId::conjunction(["M1", "M2"])));
        let m2_views = map.marginal_view(&MeasurementId::basic("M2")).unwrap();
        assert_eq!(m2_views.len(), 1);
        assert!(m2_views[0].to_string().starts_with("M123^"));
        let report = verify_theory_equivalence(&theory, &out, &map).unwrap();
        assert!(report.holds(), "{:?}", report.mismatches);

        let bogus: Context = ["M1", "M5"].iter().map(|s| s.to_string()).collect();
        assert!(matches!(
            trivialize_contexts(&theory, &[bogus]),
            Err(TrivializeError::NotAContext(_))
        ));
    }

    #[test]
    fn flat_label_scheme() {
        assert_eq!(flat_labels(&[2, 2]), ["Z00", "Z01", "Z10", "Z11"]);
        assert_eq!(flat_labels(&[2, 3])[5], "Z12");
        // Components with ten or more outcomes switch to separators.
        let wide = flat_labels(&[11, 2]);
        assert_eq!(wide[0], "Z0_0");
        assert_eq!(wide[21], "Z10_1");
    }

    #[test]
    fn label_scheme() {
        let taken = BTreeSet::new();
        let ctx: Context = ["A0", "B0"].iter().map(|s| s.to_string()).collect();
        assert_eq!(new_basic_label(&ctx, &taken), "C00");
        let ctx: Context = ["M1", "M2", "M3"].iter().map(|s| s.to_string()).collect();
        assert_eq!(new_basic_label(&ctx, &taken), "M123");
        // Collision falls back to the joined form.
        let taken: BTreeSet<String> = ["C00".to_string()].into_iter().collect();
        let ctx: Context = ["A0", "B0"].iter().map(|s| s.to_string()).collect();
        assert_eq!(new_basic_label(&ctx, &taken), "T_A0_B0");
        // Suffix-free labels go straight to the fallback.
        let ctx: Context = ["left", "right"].iter().map(|s| s.to_string()).collect();
        assert_eq!(new_basic_label(&ctx, &BTreeSet::new()), "T_left_right");
    }
}
