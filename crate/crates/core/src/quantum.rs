//! Complex-vector verification that the two-qubit singlet realization
//! reproduces the EPR tables through the Born rule.
//!
//! The four local measurements are rank-1 projector pairs built from three
//! polarization bases at 0°, 60° and 120°, pairwise 60° apart (mod the 180°
//! polarization identification), plus `B1 = A1`. Same-label overlaps
//! `|⟨X^A|Y^B⟩|²` are `cos²60° = 1/4` across the three `A·B = 0` pairings
//! and 1 on the shared `A·B = 1` basis; with the singlet,
//! `p(x,y) = (1 − |⟨x|y⟩|²)/2`, which lands exactly on the 3/8–1/8 split and
//! the perfect anticorrelation of the EPR table.
//!
//! This is the only floating-point module; its output is *compared against*
//! the exact rational tables and never mixed back into them.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::rational::Rational;
use crate::theory::{epr_theory, MeasurementId, Outcome};
use crate::{fabs, fsqrt};

/// Norm slack for state validity and completeness checks.
pub const NORM_TOLERANCE: f64 = 1e-12;
/// Tolerance when comparing Born values against the exact tables.
pub const BORN_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum QuantumError {
    WrongDimension { expected: usize, got: usize },
    NotNormalized { norm_sq: f64 },
}

impl fmt::Display for QuantumError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuantumError::WrongDimension { expected, got } => {
                write!(f, "expected a dimension-{expected} vector, got {got}")
            }
            QuantumError::NotNormalized { norm_sq } => {
                write!(f, "state is not normalized: ‖ψ‖² = {norm_sq}")
            }
        }
    }
}

/// A unit vector in dimension 2 or 4.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    amps: Vec<Complex64>,
}

impl Ket {
    pub fn new(amps: Vec<Complex64>) -> Result<Self, QuantumError> {
        let norm_sq: f64 = amps.iter().map(Complex64::norm_sqr).sum();
        if fabs(norm_sq - 1.0) > NORM_TOLERANCE {
            return Err(QuantumError::NotNormalized { norm_sq });
        }
        Ok(Ket { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// `⟨self | other⟩`.
    pub fn inner(&self, other: &Ket) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self | other⟩|²`.
    pub fn overlap_sq(&self, other: &Ket) -> f64 {
        self.inner(other).norm_sqr()
    }
}

/// One side of a product projector: a rank-1 projector `|u⟩⟨u|` given by its
/// generating vector, or the identity.
#[derive(Clone, Debug)]
pub enum ProjectorSlot {
    Rank1(Ket),
    Identity,
}

/// `⟨Ψ| (P ⊗ Q) |Ψ⟩` for a dimension-4 state and qubit projector slots.
///
/// Rank-1 slots contribute their single vector; identity slots sum over the
/// computational basis. The result is a real number in `[0, 1]` up to
/// rounding.
pub fn born(state: &Ket, left: &ProjectorSlot, right: &ProjectorSlot) -> Result<f64, QuantumError> {
    if state.dim() != 4 {
        return Err(QuantumError::WrongDimension {
            expected: 4,
            got: state.dim(),
        });
    }
    let norm_sq: f64 = state.amps.iter().map(Complex64::norm_sqr).sum();
    if fabs(norm_sq - 1.0) > NORM_TOLERANCE {
        return Err(QuantumError::NotNormalized { norm_sq });
    }
    let basis = || -> Vec<Ket> {
        alloc::vec![
            Ket::new(alloc::vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0)
            ])
            .unwrap(),
            Ket::new(alloc::vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0)
            ])
            .unwrap(),
        ]
    };
    let side = |slot: &ProjectorSlot| -> Result<Vec<Ket>, QuantumError> {
        match slot {
            ProjectorSlot::Rank1(k) => {
                if k.dim() != 2 {
                    return Err(QuantumError::WrongDimension {
                        expected: 2,
                        got: k.dim(),
                    });
                }
                Ok(alloc::vec![k.clone()])
            }
            ProjectorSlot::Identity => Ok(basis()),
        }
    };
    let mut total = 0.0;
    for u in side(left)? {
        for v in side(right)? {
            // ⟨u ⊗ v | Ψ⟩ = Σ_{jk} conj(u_j) conj(v_k) Ψ_{2j+k}.
            let mut amp = Complex64::new(0.0, 0.0);
            for j in 0..2 {
                for k in 0..2 {
                    amp += u.amps[j].conj() * v.amps[k].conj() * state.amps[2 * j + k];
                }
            }
            total += amp.norm_sqr();
        }
    }
    Ok(total)
}

/// The eight measurement vectors: `a[setting][outcome]` for the A side,
/// `b[setting][outcome]` for the B side.
#[derive(Clone, Debug)]
pub struct MeasurementVectors {
    pub a: [[Ket; 2]; 2],
    pub b: [[Ket; 2]; 2],
}

/// The singlet state `(|01⟩ − |10⟩)/√2`.
pub fn singlet() -> Ket {
    let s = 1.0 / fsqrt(2.0);
    Ket::new(alloc::vec![
        Complex64::new(0.0, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(-s, 0.0),
        Complex64::new(0.0, 0.0),
    ])
    .unwrap()
}

/// Builds the eight vectors satisfying the overlap table
/// `|⟨X^A|Y^B⟩|² = 1/4, 3/4, 1, 0` for `(X⊕Y, A·B) = (0,0), (1,0), (0,1),
/// (1,1)` — the table the singlet Born values require.
///
/// Construction: the polarization bases at 0° (`a0`), 60° (`a1` = `b1`) and
/// 120° (`b0`); every pair of distinct axes is 60° apart modulo the 180°
/// identification, so all cross-basis same-label overlaps are `cos²60°`.
pub fn build_measurement_vectors() -> MeasurementVectors {
    let basis = |theta: f64| {
        let (c, s) = (libm::cos(theta), libm::sin(theta));
        [
            Ket::new(alloc::vec![Complex64::new(c, 0.0), Complex64::new(s, 0.0)]).unwrap(),
            Ket::new(alloc::vec![Complex64::new(-s, 0.0), Complex64::new(c, 0.0)]).unwrap(),
        ]
    };
    let deg = core::f64::consts::PI / 180.0;
    let a0 = basis(0.0);
    let a1 = basis(60.0 * deg);
    let b0 = basis(120.0 * deg);
    let b1 = a1.clone();
    MeasurementVectors {
        a: [a0, a1],
        b: [b0, b1],
    }
}

/// One verified value: a Born-rule probability against its exact table entry.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumCell {
    pub label: String,
    pub born: f64,
    pub expected: f64,
}

impl QuantumCell {
    pub fn deviation(&self) -> f64 {
        fabs(self.born - self.expected)
    }
}

/// Result of checking the 16 joint and 8 marginal Born values against the
/// exact EPR tables.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumReport {
    pub cells: Vec<QuantumCell>,
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl QuantumReport {
    pub fn passes(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

fn b_projector(vectors: &MeasurementVectors, b: usize, y: usize) -> ProjectorSlot {
    ProjectorSlot::Rank1(vectors.b[b][y].clone())
}

fn a_projector(vectors: &MeasurementVectors, a: usize, x: usize) -> ProjectorSlot {
    ProjectorSlot::Rank1(vectors.a[a][x].clone())
}

/// Verifies a vector family against the exact EPR theory: all joint cells
/// `⟨Ψ_s|(X^A ⊗ Y^B)Ψ_s⟩` and both one-sided marginals.
pub fn verify_epr_with(vectors: &MeasurementVectors) -> QuantumReport {
    let theory = epr_theory();
    let state = singlet();
    let prep = "P_EPR";
    let mut cells = Vec::with_capacity(24);

    for a in 0..2 {
        for b in 0..2 {
            let m = MeasurementId::conjunction([format!("A{a}"), format!("B{b}")]);
            for x in 0..2 {
                for y in 0..2 {
                    let outcome = Outcome::tuple([format!("X{x}"), format!("Y{y}")]);
                    let expected = theory
                        .probability(&outcome, &m, prep)
                        .expect("built-in table")
                        .to_f64();
                    let born = born(
                        &state,
                        &a_projector(vectors, a, x),
                        &b_projector(vectors, b, y),
                    )
                    .expect("valid projectors");
                    cells.push(QuantumCell {
                        label: format!("p(X{x},Y{y}|A{a}∧B{b})"),
                        born,
                        expected,
                    });
                }
            }
        }
    }
    let half = Rational::new(1, 2).to_f64();
    for a in 0..2 {
        for x in 0..2 {
            let born = born(
                &state,
                &a_projector(vectors, a, x),
                &ProjectorSlot::Identity,
            )
            .expect("valid projectors");
            cells.push(QuantumCell {
                label: format!("p(X{x}|A{a})"),
                born,
                expected: half,
            });
        }
    }
    for b in 0..2 {
        for y in 0..2 {
            let born = born(
                &state,
                &ProjectorSlot::Identity,
                &b_projector(vectors, b, y),
            )
            .expect("valid projectors");
            cells.push(QuantumCell {
                label: format!("p(Y{y}|B{b})"),
                born,
                expected: half,
            });
        }
    }
    let max_deviation = cells.iter().map(QuantumCell::deviation).fold(0.0, f64::max);
    QuantumReport {
        cells,
        max_deviation,
        tolerance: BORN_TOLERANCE,
    }
}

/// Verifies the standard construction.
pub fn verify_epr_realization() -> QuantumReport {
    verify_epr_with(&build_measurement_vectors())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vectors_satisfy_the_overlap_table() {
        let v = build_measurement_vectors();
        for a in 0..2 {
            for b in 0..2 {
                for x in 0..2 {
                    for y in 0..2 {
                        let got = v.a[a][x].overlap_sq(&v.b[b][y]);
                        let expected = match (x ^ y, a & b) {
                            (0, 0) => 0.25,
                            (1, 0) => 0.75,
                            (0, _) => 1.0,
                            _ => 0.0,
                        };
                        assert!(
                            fabs(got - expected) < 1e-9,
                            "overlap²(X{x}^A{a}, Y{y}^B{b}) = {got}, want {expected}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn bases_are_orthonormal() {
        let v = build_measurement_vectors();
        for family in [&v.a, &v.b] {
            for setting in family {
                assert!(fabs(setting[0].overlap_sq(&setting[1])) < 1e-12);
                for k in setting {
                    let norm_sq: f64 = k.amplitudes().iter().map(Complex64::norm_sqr).sum();
                    assert!(fabs(norm_sq - 1.0) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn singlet_marginals_are_half_for_any_projector() {
        let state = singlet();
        let v = build_measurement_vectors();
        for setting in &v.a {
            for k in setting {
                let p = born(
                    &state,
                    &ProjectorSlot::Rank1(k.clone()),
                    &ProjectorSlot::Identity,
                )
                .unwrap();
                assert!(fabs(p - 0.5) < 1e-9);
            }
        }
        // Not special to the measurement family: any rank-1 projector,
        // complex amplitudes included, sees a flat marginal.
        let odd = Ket::new(alloc::vec![
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.8),
        ])
        .unwrap();
        let p = born(&state, &ProjectorSlot::Identity, &ProjectorSlot::Rank1(odd)).unwrap();
        assert!(fabs(p - 0.5) < 1e-9);
    }

    #[test]
    fn born_values_are_real_and_non_negative() {
        let state = singlet();
        let v = build_measurement_vectors();
        for a in 0..2 {
            for b in 0..2 {
                for x in 0..2 {
                    for y in 0..2 {
                        let p =
                            born(&state, &a_projector(&v, a, x), &b_projector(&v, b, y)).unwrap();
                        assert!((-1e-12..=1.0 + 1e-12).contains(&p));
                    }
                }
            }
        }
    }

    #[test]
    fn born_spot_values() {
        let state = singlet();
        let v = build_measurement_vectors();
        // p(X0 | A0) = 1/2.
        let p = born(&state, &a_projector(&v, 0, 0), &ProjectorSlot::Identity).unwrap();
        assert!(fabs(p - 0.5) < 1e-12);
        // p(X0, Y0 | A0∧B0) = 3/8.
        let p = born(&state, &a_projector(&v, 0, 0), &b_projector(&v, 0, 0)).unwrap();
        assert!(fabs(p - 0.375) < 1e-9);
        // p(X0, Y1 | A1∧B1) = 1/2 and p(X0, Y0 | A1∧B1) = 0: perfect
        // anticorrelation on the shared axis.
        let p = born(&state, &a_projector(&v, 1, 0), &b_projector(&v, 1, 1)).unwrap();
        assert!(fabs(p - 0.5) < 1e-9);
        let p = born(&state, &a_projector(&v, 1, 0), &b_projector(&v, 1, 0)).unwrap();
        assert!(fabs(p) < 1e-9);
    }

    #[test]
    fn completeness_sums_to_one() {
        let state = singlet();
        let v = build_measurement_vectors();
        for a in 0..2 {
            for b in 0..2 {
                let mut total = 0.0;
                for x in 0..2 {
                    for y in 0..2 {
                        total +=
                            born(&state, &a_projector(&v, a, x), &b_projector(&v, b, y)).unwrap();
                    }
                }
                assert!(fabs(total - 1.0) < 1e-12, "A{a}∧B{b} sums to {total}");
            }
        }
    }

    #[test]
    fn full_verification_passes() {
        let report = verify_epr_realization();
        assert!(report.passes(), "max deviation {}", report.max_deviation);
        assert_eq!(report.cells.len(), 24);
    }

    #[test]
    fn rotated_b1_breaks_exactly_the_perfect_correlations() {
        let mut v = build_measurement_vectors();
        // Rotate the b1 basis by 0.3 rad in its own plane.
        let (c, s) = (libm::cos(0.3), libm::sin(0.3));
        let old = v.b[1].clone();
        let mix = |p: &Ket, q: &Ket, cp: f64, cq: f64| {
            Ket::new(
                p.amplitudes()
                    .iter()
                    .zip(q.amplitudes())
                    .map(|(x, y)| x * cp + y * cq)
                    .collect(),
            )
            .unwrap()
        };
        v.b[1] = [mix(&old[0], &old[1], c, s), mix(&old[0], &old[1], -s, c)];
        let report = verify_epr_with(&v);
        assert!(!report.passes());
        // The A·B = 1 cells must deviate.
        let broken: Vec<&QuantumCell> = report
            .cells
            .iter()
            .filter(|cell| cell.label.contains("A1∧B1"))
            .collect();
        assert!(broken.iter().any(|cell| cell.deviation() > 1e-3));
        // While the marginals stay flat at 1/2.
        for cell in report.cells.iter().filter(|c| c.label.starts_with("p(Y")) {
            assert!(cell.deviation() < 1e-9, "{}", cell.label);
        }
    }

    #[test]
    fn born_rejects_bad_states() {
        let bad = Ket {
            amps: alloc::vec![Complex64::new(1.0, 0.0); 4],
        };
        assert!(matches!(
            born(&bad, &ProjectorSlot::Identity, &ProjectorSlot::Identity),
            Err(QuantumError::WrongDimension { .. }) | Err(QuantumError::NotNormalized { .. })
        ));
        let three = Ket::new(alloc::vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ])
        .unwrap();
        assert!(matches!(
            born(&three, &ProjectorSlot::Identity, &ProjectorSlot::Identity),
            Err(QuantumError::WrongDimension {
                expected: 4,
                got: 3
            })
        ));
    }
}
