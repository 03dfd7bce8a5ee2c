//! JSON file formats and fixture lookup for the `opthy` command line.
//!
//! Theories, ontological models and trivialization maps serialize to stable
//! JSON documents (lexicographic key ordering, canonical `num/den` rational
//! strings); the converters here round-trip them through the validating
//! constructors of `opthy-core`.

pub mod doc;
pub mod fixtures;
pub mod render;

use thiserror::Error;

/// Errors surfaced by document loading and conversion.
#[derive(Debug, Error)]
pub enum DocError {
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid probability literal `{0}`")]
    BadRational(String),
    #[error("{0}")]
    Invalid(String),
}

impl From<opthy_core::theory::TheoryError> for DocError {
    fn from(e: opthy_core::theory::TheoryError) -> Self {
        DocError::Invalid(e.to_string())
    }
}

impl From<opthy_core::ontology::ModelError> for DocError {
    fn from(e: opthy_core::ontology::ModelError) -> Self {
        DocError::Invalid(e.to_string())
    }
}

impl From<opthy_core::rational::DistributionError> for DocError {
    fn from(e: opthy_core::rational::DistributionError) -> Self {
        DocError::Invalid(e.to_string())
    }
}
