//! The built-in example theories.
//!
//! Three non-trivial theories share the Bell-type layout — basics
//! `A0, A1` (outcomes `X0, X1`) and `B0, B1` (outcomes `Y0, Y1`), every
//! A-measurement compatible with every B-measurement — and differ only in
//! their single preparation's table:
//!
//! - classical: `p = 1/2` when `X⊕Y = 0`, else 0;
//! - EPR-Bell:  `3/8 / 1/8` split when `A·B = 0`, perfect `1/2 / 0`
//!   correlation when `A·B = 1`;
//! - PR box:    `p = 1/2` when `X⊕Y = A·B`, else 0.
//!
//! Their trivial twins replace the four simultaneous measurements with four
//! stand-alone measurements `C00..C11` over outcomes `Z00..Z11`, with the same
//! numbers read through the index pairs. The mini theory is a five-basic
//! example with one three-measurement context, one two-measurement context and
//! a lone basic.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::{MeasurementId, OperationalTheory, Outcome, TheoryBuilder, TheoryError};
use crate::rational::{Distribution, Rational};

fn coin() -> Distribution<Outcome> {
    Distribution::new([
        (Outcome::atom("X0"), Rational::new(1, 2)),
        (Outcome::atom("X1"), Rational::new(1, 2)),
    ])
    .unwrap()
}

fn coin_y() -> Distribution<Outcome> {
    Distribution::new([
        (Outcome::atom("Y0"), Rational::new(1, 2)),
        (Outcome::atom("Y1"), Rational::new(1, 2)),
    ])
    .unwrap()
}

/// Builds a Bell-type theory from the joint cell weights
/// `mass(a, b, x, y) = p(X=x, Y=y | A_a ∧ B_b)`.
fn bell_type(
    name: &str,
    prep: &str,
    mass: impl Fn(u8, u8, u8, u8) -> Rational,
) -> OperationalTheory {
    let mut builder = TheoryBuilder::new(name)
        .basic("A0", ["X0", "X1"])
        .basic("A1", ["X0", "X1"])
        .basic("B0", ["Y0", "Y1"])
        .basic("B1", ["Y0", "Y1"])
        .preparation(prep);
    for a in 0..2u8 {
        builder = builder.table(MeasurementId::basic(format!("A{a}")), prep, coin());
    }
    for b in 0..2u8 {
        builder = builder.table(MeasurementId::basic(format!("B{b}")), prep, coin_y());
    }
    for a in 0..2u8 {
        for b in 0..2u8 {
            let labels = [format!("A{a}"), format!("B{b}")];
            builder = builder.conjunction(labels.clone());
            let mut cells = Vec::new();
            for x in 0..2u8 {
                for y in 0..2u8 {
                    cells.push((
                        Outcome::tuple([format!("X{x}"), format!("Y{y}")]),
                        mass(a, b, x, y),
                    ));
                }
            }
            builder = builder.table(
                MeasurementId::conjunction(labels),
                prep,
                Distribution::new(cells).unwrap(),
            );
        }
    }
    builder.finish().expect("built-in theory is valid")
}

/// Builds a trivial four-measurement theory from the cell weights
/// `mass(c1, c2, z1, z2) = p(Z_{z1 z2} | C_{c1 c2})`.
fn trivial_type(
    name: &str,
    prep: &str,
    mass: impl Fn(u8, u8, u8, u8) -> Rational,
) -> OperationalTheory {
    let outcomes: Vec<String> = (0..2u8)
        .flat_map(|z1| (0..2u8).map(move |z2| format!("Z{z1}{z2}")))
        .collect();
    let factors = vec![
        vec!["Z1=0".to_string(), "Z1=1".to_string()],
        vec!["Z2=0".to_string(), "Z2=1".to_string()],
    ];
    let mut builder = TheoryBuilder::new(name).preparation(prep);
    for c1 in 0..2u8 {
        for c2 in 0..2u8 {
            let label = format!("C{c1}{c2}");
            builder = builder.factored_basic(&label, outcomes.clone(), factors.clone());
            let mut cells = Vec::new();
            for z1 in 0..2u8 {
                for z2 in 0..2u8 {
                    cells.push((Outcome::atom(format!("Z{z1}{z2}")), mass(c1, c2, z1, z2)));
                }
            }
            builder = builder.table(
                MeasurementId::basic(label),
                prep,
                Distribution::new(cells).unwrap(),
            );
        }
    }
    builder.finish().expect("built-in theory is valid")
}

fn classical_mass(_a: u8, _b: u8, x: u8, y: u8) -> Rational {
    if x ^ y == 0 {
        Rational::new(1, 2)
    } else {
        Rational::zero()
    }
}

// The A·B = 1 pair measures along a common axis, where the singlet
// anticorrelates perfectly; together with the 3/8 / 1/8 split at the other
// settings this is what puts the CHSH value at 5/2.
fn epr_mass(a: u8, b: u8, x: u8, y: u8) -> Rational {
    match (x ^ y, a & b) {
        (0, 0) => Rational::new(3, 8),
        (1, 0) => Rational::new(1, 8),
        (1, _) => Rational::new(1, 2),
        _ => Rational::zero(),
    }
}

fn pr_mass(a: u8, b: u8, x: u8, y: u8) -> Rational {
    if x ^ y == a & b {
        Rational::new(1, 2)
    } else {
        Rational::zero()
    }
}

/// The classical theory: perfectly correlated fair coins in every context.
pub fn classical_theory() -> OperationalTheory {
    bell_type("classical", "P_CL", classical_mass)
}

/// The EPR-Bell theory: singlet statistics at the standard 60° settings.
pub fn epr_theory() -> OperationalTheory {
    bell_type("epr", "P_EPR", epr_mass)
}

/// The Popescu–Rohrlich box: `X ⊕ Y = A·B` with probability one.
pub fn pr_theory() -> OperationalTheory {
    bell_type("pr", "P_PR", pr_mass)
}

/// Trivial twin of the classical theory.
pub fn classical_trivial() -> OperationalTheory {
    trivial_type("classical-trivial", "P_CL", classical_mass)
}

/// Trivial twin of the EPR-Bell theory.
pub fn epr_trivial() -> OperationalTheory {
    trivial_type("epr-trivial", "P_EPR", epr_mass)
}

/// Trivial twin of the PR-box theory.
pub fn pr_trivial() -> OperationalTheory {
    trivial_type("pr-trivial", "P_PR", pr_mass)
}

/// A small five-basic theory with contexts `{M1,M2,M3}` and `{M1,M4}` and the
/// lone basic `M5`. All tables are products of fair coins, so the theory is
/// non-disturbing. The member set is downward closed, so the pairs inside the
/// triple context (`M1∧M2`, `M1∧M3`, `M2∧M3`) are members too.
pub fn mini_theory() -> OperationalTheory {
    let prep = "P";
    let mut builder = TheoryBuilder::new("mini").preparation(prep);
    for i in 1..=5 {
        builder = builder.basic(format!("M{i}"), ["0", "1"]);
    }
    let conjunction_sets: [&[&str]; 5] = [
        &["M1", "M2"],
        &["M1", "M3"],
        &["M2", "M3"],
        &["M1", "M2", "M3"],
        &["M1", "M4"],
    ];
    for i in 1..=5 {
        builder = builder.table(
            MeasurementId::basic(format!("M{i}")),
            prep,
            Distribution::new([
                (Outcome::atom("0"), Rational::new(1, 2)),
                (Outcome::atom("1"), Rational::new(1, 2)),
            ])
            .unwrap(),
        );
    }
    for set in conjunction_sets {
        builder = builder.conjunction(set.iter().copied());
        let k = set.len() as u32;
        let cell = Rational::new(1, 1 << k);
        let mut cells = Vec::new();
        for idx in 0..(1u32 << k) {
            let parts: Vec<String> = (0..k)
                .map(|pos| ((idx >> (k - 1 - pos)) & 1).to_string())
                .collect();
            cells.push((Outcome::Tuple(parts), cell.clone()));
        }
        builder = builder.table(
            MeasurementId::conjunction(set.iter().copied()),
            prep,
            Distribution::new(cells).unwrap(),
        );
    }
    builder.finish().expect("built-in theory is valid")
}

/// Merges two theories over the same preparation set into one, so that
/// measurements from both sides can be compared for operational equivalence.
///
/// Fails when the preparation sets differ or the theories disagree on a
/// shared basic or table entry.
pub fn merge_theories(
    left: &OperationalTheory,
    right: &OperationalTheory,
) -> Result<OperationalTheory, TheoryError> {
    let lp: BTreeSet<&String> = left.preparations().iter().collect();
    let rp: BTreeSet<&String> = right.preparations().iter().collect();
    if lp != rp {
        return Err(TheoryError::MergeConflict(format!(
            "preparation sets differ: {:?} vs {:?}",
            left.preparations(),
            right.preparations()
        )));
    }
    let mut builder = TheoryBuilder::new(format!("{}+{}", left.name(), right.name()));
    for p in left.preparations() {
        builder = builder.preparation(p.clone());
    }
    let mut declared: BTreeSet<String> = BTreeSet::new();
    for theory in [left, right] {
        for b in theory.basics() {
            if declared.contains(&b.label) {
                let other = left.basic(&b.label).expect("declared first in left");
                if other != b {
                    return Err(TheoryError::MergeConflict(format!(
                        "basic `{}` declared differently in the two theories",
                        b.label
                    )));
                }
                continue;
            }
            declared.insert(b.label.clone());
            builder = match &b.factors {
                Some(f) => builder.factored_basic(&b.label, b.outcomes.clone(), f.clone()),
                None => builder.basic(&b.label, b.outcomes.clone()),
            };
        }
    }
    let mut tabled: BTreeSet<(MeasurementId, String)> = BTreeSet::new();
    for theory in [left, right] {
        for set in theory.conjunction_sets() {
            builder = builder.conjunction(set.iter().cloned());
        }
        for m in theory.members() {
            for p in theory.preparations() {
                let d = theory.distribution(&m, p).expect("complete tables");
                if !tabled.insert((m.clone(), p.clone())) {
                    let existing = left.distribution(&m, p);
                    if existing.as_ref() != Ok(&d) {
                        return Err(TheoryError::MergeConflict(format!(
                            "conflicting tables for `{m}` under `{p}`"
                        )));
                    }
                    continue;
                }
                builder = builder.table(m.clone(), p.clone(), d);
            }
        }
    }
    builder.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::Context;

    fn o2(x: u8, y: u8) -> Outcome {
        Outcome::tuple([format!("X{x}"), format!("Y{y}")])
    }

    #[test]
    fn classical_cells() {
        let t = classical_theory();
        let m = MeasurementId::conjunction(["A0", "B1"]);
        assert_eq!(
            t.probability(&o2(1, 1), &m, "P_CL").unwrap(),
            Rational::new(1, 2)
        );
        assert_eq!(
            t.probability(&o2(0, 1), &m, "P_CL").unwrap(),
            Rational::zero()
        );
        assert_eq!(
            t.probability(&Outcome::atom("X0"), &MeasurementId::basic("A0"), "P_CL")
                .unwrap(),
            Rational::new(1, 2)
        );
    }

    #[test]
    fn epr_cells() {
        let t = epr_theory();
        let low = MeasurementId::conjunction(["A0", "B0"]);
        let high = MeasurementId::conjunction(["A1", "B1"]);
        assert_eq!(
            t.probability(&o2(0, 0), &low, "P_EPR").unwrap(),
            Rational::new(3, 8)
        );
        assert_eq!(
            t.probability(&o2(0, 1), &low, "P_EPR").unwrap(),
            Rational::new(1, 8)
        );
        assert_eq!(
            t.probability(&o2(1, 0), &high, "P_EPR").unwrap(),
            Rational::new(1, 2)
        );
        assert_eq!(
            t.probability(&o2(1, 1), &high, "P_EPR").unwrap(),
            Rational::zero()
        );
    }

    #[test]
    fn pr_cells() {
        let t = pr_theory();
        let high = MeasurementId::conjunction(["A1", "B1"]);
        assert_eq!(
            t.probability(&o2(0, 1), &high, "P_PR").unwrap(),
            Rational::new(1, 2)
        );
        assert_eq!(
            t.probability(&o2(0, 0), &high, "P_PR").unwrap(),
            Rational::zero()
        );
    }

    #[test]
    fn trivial_twin_cells() {
        let t = epr_trivial();
        assert_eq!(
            t.probability(&Outcome::atom("Z01"), &MeasurementId::basic("C11"), "P_EPR")
                .unwrap(),
            Rational::new(1, 2)
        );
        assert_eq!(
            t.probability(&Outcome::atom("Z00"), &MeasurementId::basic("C11"), "P_EPR")
                .unwrap(),
            Rational::zero()
        );
        assert_eq!(
            t.probability(&Outcome::atom("Z00"), &MeasurementId::basic("C01"), "P_EPR")
                .unwrap(),
            Rational::new(3, 8)
        );
        let c = classical_trivial();
        assert_eq!(
            c.probability(&Outcome::atom("Z11"), &MeasurementId::basic("C10"), "P_CL")
                .unwrap(),
            Rational::new(1, 2)
        );
        let p = pr_trivial();
        assert_eq!(
            p.probability(&Outcome::atom("Z01"), &MeasurementId::basic("C11"), "P_PR")
                .unwrap(),
            Rational::new(1, 2)
        );
    }

    #[test]
    fn all_builders_are_non_disturbing() {
        for t in [
            classical_theory(),
            epr_theory(),
            pr_theory(),
            classical_trivial(),
            epr_trivial(),
            pr_trivial(),
            mini_theory(),
        ] {
            let report = t.non_disturbance();
            assert!(
                report.holds(),
                "{} disturbs: {:?}",
                t.name(),
                report.violations
            );
        }
    }

    #[test]
    fn bell_contexts() {
        let t = epr_theory();
        let contexts = t.contexts();
        let expected: Vec<Context> = [["A0", "B0"], ["A0", "B1"], ["A1", "B0"], ["A1", "B1"]]
            .iter()
            .map(|pair| pair.iter().map(|s| s.to_string()).collect())
            .collect();
        assert_eq!(contexts.len(), 4);
        for c in expected {
            assert!(contexts.contains(&c));
        }
    }

    #[test]
    fn trivial_theory_has_no_contexts() {
        assert!(epr_trivial().contexts().is_empty());
        assert!(epr_trivial().is_trivial());
        assert_eq!(epr_trivial().lone_basics().len(), 4);
    }

    #[test]
    fn mini_contexts_and_lone_basic() {
        let t = mini_theory();
        let contexts = t.contexts();
        assert_eq!(contexts.len(), 2);
        let triple: Context = ["M1", "M2", "M3"].iter().map(|s| s.to_string()).collect();
        let pair: Context = ["M1", "M4"].iter().map(|s| s.to_string()).collect();
        assert!(contexts.contains(&triple));
        assert!(contexts.contains(&pair));
        assert_eq!(t.lone_basics(), vec!["M5".to_string()]);
    }

    #[test]
    fn epr_basics_are_pairwise_equivalent() {
        // Both A-columns are fair coins, so A0 ~ A1 by direct table comparison.
        let t = epr_theory();
        let a0 = MeasurementId::basic("A0");
        let a1 = MeasurementId::basic("A1");
        assert!(t.are_operationally_equivalent(&a0, &a1, None).unwrap());
    }

    #[test]
    fn merged_theory_relates_conjunctions_to_trivial_basics() {
        let merged = merge_theories(&epr_theory(), &epr_trivial()).unwrap();
        // C00 ~ A0∧B0 under the order-based pairing (X0,Y0) ↔ Z00, ...
        let c00 = MeasurementId::basic("C00");
        let ab = MeasurementId::conjunction(["A0", "B0"]);
        assert!(merged
            .are_operationally_equivalent(&ab, &c00, None)
            .unwrap());
        let c11 = MeasurementId::basic("C11");
        let ab11 = MeasurementId::conjunction(["A1", "B1"]);
        assert!(merged
            .are_operationally_equivalent(&ab11, &c11, None)
            .unwrap());
        // Cross pair differs: A0∧B0 has the 3/8 column, C11 the 1/2 column.
        assert!(!merged
            .are_operationally_equivalent(&ab, &c11, None)
            .unwrap());
    }

    #[test]
    fn merge_rejects_mismatched_preparations() {
        assert!(matches!(
            merge_theories(&epr_theory(), &pr_trivial()),
            Err(TheoryError::MergeConflict(_))
        ));
    }

    #[test]
    fn coarse_graining_view_of_trivial_basic() {
        // (Z₁ = 0 | C00^(1), P_EPR) = p(Z00) + p(Z01) = 3/8 + 1/8 = 1/2.
        let t = epr_trivial();
        let view = t.factor_view("C00", &[0]).unwrap();
        assert_eq!(
            t.probability(&Outcome::atom("Z1=0"), &view, "P_EPR")
                .unwrap(),
            Rational::new(1, 2)
        );
    }
}
