//! Correlators and the CHSH expression, classified exactly.
//!
//! The correlator of a binary×binary joint measurement is
//! `⟨A,B⟩_P = p(X⊕Y=0 | A∧B, P) − p(X⊕Y=1 | A∧B, P)`, the parity taken over
//! outcome positions. The CHSH value `⟨A0,B0⟩+⟨A0,B1⟩+⟨A1,B0⟩−⟨A1,B1⟩` is
//! compared against 2 directly and against the Tsirelson bound `2√2` by
//! squaring, so that no irrational number ever enters the arithmetic.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::rational::Rational;
use crate::theory::{MeasurementId, OperationalTheory, Outcome, TheoryError};

/// Where a CHSH value falls: at or below the classical bound 2, between 2 and
/// the Tsirelson bound 2√2 (inclusive), or beyond it.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ChshClass {
    Classical,
    Quantum,
    SuperQuantum,
}

impl fmt::Display for ChshClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ChshClass::Classical => "Classical",
            ChshClass::Quantum => "Quantum",
            ChshClass::SuperQuantum => "SuperQuantum",
        };
        write!(f, "{s}")
    }
}

/// The four correlators, the CHSH value, and its classification.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChshReport {
    /// `⟨A0,B0⟩, ⟨A0,B1⟩, ⟨A1,B0⟩, ⟨A1,B1⟩` in that order.
    pub correlators: [Rational; 4],
    pub value: Rational,
    pub class: ChshClass,
}

/// Errors from correlator evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BellError {
    /// The theory has no such joint measurement — in particular, CHSH is
    /// undefined on trivial theories.
    MissingConjunction(String),
    /// The joint measurement is not binary×binary.
    NotBinary(String),
    Theory(TheoryError),
}

impl fmt::Display for BellError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BellError::MissingConjunction(m) => {
                write!(
                    f,
                    "theory has no joint measurement `{m}`; CHSH is undefined"
                )
            }
            BellError::NotBinary(m) => write!(f, "`{m}` is not a binary×binary measurement"),
            BellError::Theory(e) => write!(f, "{e}"),
        }
    }
}

impl From<TheoryError> for BellError {
    fn from(e: TheoryError) -> Self {
        BellError::Theory(e)
    }
}

/// `⟨left,right⟩_P`: the parity expectation of the joint measurement
/// `left ∧ right` under `preparation`. Parity compares outcome positions, so
/// the labels themselves carry no meaning.
pub fn correlator(
    theory: &OperationalTheory,
    left: &str,
    right: &str,
    preparation: &str,
) -> Result<Rational, BellError> {
    let m = MeasurementId::conjunction([left, right]);
    if !theory.is_member(&m) {
        return Err(BellError::MissingConjunction(m.to_string()));
    }
    let left_meas = theory
        .basic(left)
        .ok_or_else(|| BellError::Theory(TheoryError::UnknownBasic(left.into())))?;
    let right_meas = theory
        .basic(right)
        .ok_or_else(|| BellError::Theory(TheoryError::UnknownBasic(right.into())))?;
    if left_meas.outcomes.len() != 2 || right_meas.outcomes.len() != 2 {
        return Err(BellError::NotBinary(m.to_string()));
    }
    // Components of the conjunction tuple follow sorted label order.
    let mut sorted: Vec<&str> = alloc::vec![left, right];
    sorted.sort_unstable();
    let left_pos = sorted.iter().position(|l| *l == left).unwrap();
    let right_pos = 1 - left_pos;

    let index_of = |outcomes: &[String], label: &str| -> u8 {
        outcomes.iter().position(|o| o == label).unwrap() as u8
    };
    let d = theory.distribution(&m, preparation)?;
    let mut even = Rational::zero();
    let mut odd = Rational::zero();
    for (outcome, mass) in d.iter() {
        let Outcome::Tuple(parts) = outcome else {
            return Err(BellError::NotBinary(m.to_string()));
        };
        let x = index_of(&left_meas.outcomes, &parts[left_pos]);
        let y = index_of(&right_meas.outcomes, &parts[right_pos]);
        if x ^ y == 0 {
            even = even + mass.clone();
        } else {
            odd = odd + mass.clone();
        }
    }
    Ok(even - odd)
}

/// Classifies an exact CHSH value.
pub fn classify(value: &Rational) -> ChshClass {
    let two = Rational::from_integer(2);
    if value.abs() <= two {
        ChshClass::Classical
    } else if value.square_cmp_integer(8) != Ordering::Greater {
        // |v|² ≤ 8 means |v| ≤ 2√2; the bound itself still counts as quantum.
        ChshClass::Quantum
    } else {
        ChshClass::SuperQuantum
    }
}

/// Evaluates the CHSH expression over the measurement pairs
/// `(a0|a1) × (b0|b1)`, with the minus sign on `⟨a1,b1⟩`.
pub fn chsh_with(
    theory: &OperationalTheory,
    a: [&str; 2],
    b: [&str; 2],
    preparation: &str,
) -> Result<ChshReport, BellError> {
    let c00 = correlator(theory, a[0], b[0], preparation)?;
    let c01 = correlator(theory, a[0], b[1], preparation)?;
    let c10 = correlator(theory, a[1], b[0], preparation)?;
    let c11 = correlator(theory, a[1], b[1], preparation)?;
    let value = c00.clone() + c01.clone() + c10.clone() - c11.clone();
    let class = classify(&value);
    Ok(ChshReport {
        correlators: [c00, c01, c10, c11],
        value,
        class,
    })
}

/// CHSH over the standard labels `A0, A1, B0, B1`.
pub fn chsh(theory: &OperationalTheory, preparation: &str) -> Result<ChshReport, BellError> {
    chsh_with(theory, ["A0", "A1"], ["B0", "B1"], preparation)
}
