//! Finite operational theories and their ontological models.
//!
//! An operational theory is a finite table of outcome probabilities
//! `p(X | M, P)` over a set of measurements (some of which may be performed
//! simultaneously) and preparations. This crate represents such theories with
//! exact rational arithmetic and checks the properties that distinguish them:
//! operational equivalence, non-disturbance, trivialization, outcome
//! determinism, simultaneous and measurement (non)contextuality, CHSH
//! classification, conditional-independence structure, minimal causal DAGs and
//! fine-tuning versus faithfulness.
//!
//! The crate is `no_std`-compatible (with `alloc`); everything that touches
//! files, JSON or the command line lives in the companion `opthy` crate.
//!
//! Layout:
//!
//! - [`rational`] — exact rationals and finite probability distributions.
//! - [`theory`] — operational theories, equivalence, non-disturbance, and the
//!   built-in example theories.
//! - [`graph`] — compatibility hypergraphs, line graphs, DOT export.
//! - [`trivialize`] — replacing simultaneous measurements by fresh basics.
//! - [`ontology`] — ontic-state models, recovery, determinism and the two
//!   noncontextuality checks.
//! - [`bell`] — correlators and the CHSH expression.
//! - [`causal`] — exact joint distributions, conditional independence,
//!   d-separation, minimal DAG search, faithfulness probing.
//! - [`quantum`] — a small complex-vector check that the two-qubit singlet
//!   realization reproduces the tables.
//!
//! ```
//! use opthy_core::bell::{chsh, ChshClass};
//! use opthy_core::theory::{epr_theory, pr_theory};
//! use opthy_core::trivialize::{trivialize, verify_theory_equivalence};
//!
//! // The PR box reaches the algebraic maximum of the CHSH expression…
//! let report = chsh(&pr_theory(), "P_PR").unwrap();
//! assert_eq!(report.value.to_string(), "4");
//! assert_eq!(report.class, ChshClass::SuperQuantum);
//!
//! // …and trivializing the EPR theory yields an operationally equivalent
//! // theory in which nothing can be measured simultaneously.
//! let theory = epr_theory();
//! let (trivial, map) = trivialize(&theory).unwrap();
//! assert!(trivial.is_trivial());
//! assert!(verify_theory_equivalence(&theory, &trivial, &map).unwrap().holds());
//! ```

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bell;
pub mod causal;
pub mod graph;
pub mod ontology;
pub mod quantum;
pub mod rational;
pub mod theory;
pub mod trivialize;

pub use bell::{ChshClass, ChshReport};
pub use causal::{CiStatement, Dag, JointDistribution, VariableSpace};
pub use graph::{EdgeStyle, Hypergraph};
pub use ontology::OntologicalModel;
pub use rational::{Distribution, Rational};
pub use theory::{MeasurementId, OperationalTheory, Outcome};
pub use trivialize::TrivializationMap;

/// `f64` square root that works without `std`.
pub(crate) fn fsqrt(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.sqrt()
    }
    #[cfg(not(feature = "std"))]
    {
        libm::sqrt(x)
    }
}

/// `f64` absolute value that works without `std`.
pub(crate) fn fabs(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.abs()
    }
    #[cfg(not(feature = "std"))]
    {
        libm::fabs(x)
    }
}
