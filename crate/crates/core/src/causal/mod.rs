//! Exact joint distributions over measurement-choice, outcome and ontic-state
//! variables, conditional-independence testing, d-separation, minimal-DAG
//! search and faithfulness probing.

mod dag;
mod joint;
mod probe;
mod scenario;

pub use dag::{enumerate_dags, minimal_dags, Dag};
pub use joint::JointDistribution;
pub use probe::{
    faithfulness_probe, generic_joint, sample_rational_conditionals, FaithfulnessReport,
    FaithfulnessVerdict, CI_TOLERANCE,
};
pub use scenario::{joint_from_model, uniform_choice_priors, ChoiceVariable, Scenario};

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::ontology::ModelError;
use crate::theory::TheoryError;

/// Errors from the causal layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CausalError {
    DuplicateVariable(String),
    UnknownVariable(String),
    EmptyDomain(String),
    BadStatement(String),
    NotNormalized(String),
    NotAcyclic,
    TooManyVariables(usize),
    RequiredNotObserved(String),
    ZeroTrials,
    BadParameters(String),
    UnsupportedScenario(String),
    Model(ModelError),
    Theory(TheoryError),
}

impl fmt::Display for CausalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use CausalError::*;
        match self {
            DuplicateVariable(v) => write!(f, "variable `{v}` declared twice"),
            UnknownVariable(v) => write!(f, "unknown variable `{v}`"),
            EmptyDomain(v) => write!(f, "variable `{v}` has an empty value list"),
            BadStatement(s) => write!(f, "ill-formed independence statement: {s}"),
            NotNormalized(s) => write!(f, "joint masses sum to {s}, not 1"),
            NotAcyclic => write!(f, "edge set contains a directed cycle"),
            TooManyVariables(n) => {
                write!(f, "DAG enumeration over {n} variables refused (limit 6)")
            }
            RequiredNotObserved(s) => {
                write!(
                    f,
                    "required independence `{s}` is not among the observed ones"
                )
            }
            ZeroTrials => write!(f, "faithfulness probing needs at least one trial"),
            BadParameters(s) => write!(f, "invalid factorization parameters: {s}"),
            UnsupportedScenario(s) => write!(f, "cannot build a causal scenario: {s}"),
            Model(e) => write!(f, "{e}"),
            Theory(e) => write!(f, "{e}"),
        }
    }
}

impl From<ModelError> for CausalError {
    fn from(e: ModelError) -> Self {
        CausalError::Model(e)
    }
}

impl From<TheoryError> for CausalError {
    fn from(e: TheoryError) -> Self {
        CausalError::Theory(e)
    }
}

/// An ordered list of named finite variables; the joint's cells are indexed
/// row-major in this order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableSpace {
    vars: Vec<(String, Vec<String>)>,
}

impl VariableSpace {
    pub fn new(
        vars: impl IntoIterator<Item = (impl Into<String>, Vec<String>)>,
    ) -> Result<Self, CausalError> {
        let vars: Vec<(String, Vec<String>)> =
            vars.into_iter().map(|(n, v)| (n.into(), v)).collect();
        let mut seen = BTreeSet::new();
        for (name, values) in &vars {
            if !seen.insert(name.clone()) {
                return Err(CausalError::DuplicateVariable(name.clone()));
            }
            if values.is_empty() {
                return Err(CausalError::EmptyDomain(name.clone()));
            }
        }
        Ok(VariableSpace { vars })
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn names(&self) -> Vec<&str> {
        self.vars.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.vars[i].0
    }

    pub fn values(&self, i: usize) -> &[String] {
        &self.vars[i].1
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|(n, _)| n == name)
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.vars.iter().map(|(_, v)| v.len()).collect()
    }

    pub fn cell_count(&self) -> usize {
        self.vars.iter().map(|(_, v)| v.len()).product()
    }

    /// Iterates every full assignment as a vector of value indices,
    /// row-major (the last variable varies fastest).
    pub fn assignments(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let sizes = self.sizes();
        let total = self.cell_count();
        (0..total).map(move |flat| crate::theory::mixed_radix_digits(flat, &sizes))
    }

    pub(crate) fn flat_index(&self, assignment: &[usize]) -> usize {
        let mut flat = 0;
        for (i, (_, values)) in self.vars.iter().enumerate() {
            flat = flat * values.len() + assignment[i];
        }
        flat
    }
}

/// A conditional-independence statement `lhs ⫫ rhs | given` over named
/// variables: conditioned on `given`, the single variable `lhs` is jointly
/// independent of the set `rhs`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CiStatement {
    pub lhs: String,
    pub rhs: BTreeSet<String>,
    pub given: BTreeSet<String>,
}

impl CiStatement {
    pub fn new(
        lhs: impl Into<String>,
        rhs: impl IntoIterator<Item = impl Into<String>>,
        given: impl IntoIterator<Item = impl Into<String>>,
    ) -> Result<Self, CausalError> {
        let stmt = CiStatement {
            lhs: lhs.into(),
            rhs: rhs.into_iter().map(Into::into).collect(),
            given: given.into_iter().map(Into::into).collect(),
        };
        if stmt.rhs.is_empty() {
            return Err(CausalError::BadStatement(
                "right-hand side must be non-empty".to_string(),
            ));
        }
        if stmt.rhs.contains(&stmt.lhs)
            || stmt.given.contains(&stmt.lhs)
            || stmt.rhs.intersection(&stmt.given).next().is_some()
        {
            return Err(CausalError::BadStatement(alloc::format!(
                "variable sets of {stmt} are not disjoint"
            )));
        }
        Ok(stmt)
    }

    /// Canonical form: a statement with a single right-hand variable is the
    /// same independence as its mirror, so the lexicographically smaller
    /// variable becomes the left-hand side. Statements with larger right-hand
    /// sides have no expressible mirror and stay as given.
    pub fn canonical(mut self) -> Self {
        if self.rhs.len() == 1 {
            let other = self.rhs.iter().next().unwrap().clone();
            if other < self.lhs {
                self.rhs.clear();
                self.rhs.insert(core::mem::replace(&mut self.lhs, other));
            }
        }
        self
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        core::iter::once(self.lhs.as_str())
            .chain(self.rhs.iter().map(String::as_str))
            .chain(self.given.iter().map(String::as_str))
    }
}

impl fmt::Display for CiStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rhs: Vec<&str> = self.rhs.iter().map(String::as_str).collect();
        write!(f, "{} ⊥⊥ {}", self.lhs, rhs.join(","))?;
        if !self.given.is_empty() {
            let given: Vec<&str> = self.given.iter().map(String::as_str).collect();
            write!(f, " | {}", given.join(","))?;
        }
        Ok(())
    }
}

impl fmt::Debug for CiStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Every canonical statement over the given variable names, sorted. For `n`
/// names this enumerates lhs × non-empty rhs ⊆ rest × given ⊆ rest, then
/// drops the mirror of each single-rhs statement.
pub fn all_canonical_statements(names: &[&str]) -> Vec<CiStatement> {
    let n = names.len();
    let mut out = Vec::new();
    for lhs in 0..n {
        let others: Vec<usize> = (0..n).filter(|&i| i != lhs).collect();
        let m = others.len();
        for rhs_mask in 1u32..(1 << m) {
            let rest: Vec<usize> = (0..m).filter(|i| rhs_mask & (1 << i) == 0).collect();
            for given_bits in 0u32..(1 << rest.len()) {
                let rhs: BTreeSet<String> = (0..m)
                    .filter(|i| rhs_mask & (1 << i) != 0)
                    .map(|i| names[others[i]].to_string())
                    .collect();
                if rhs.len() == 1 && rhs.iter().next().unwrap().as_str() < names[lhs] {
                    continue; // mirror is canonical
                }
                let given: BTreeSet<String> = rest
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| given_bits & (1 << k) != 0)
                    .map(|(_, &i)| names[others[i]].to_string())
                    .collect();
                out.push(CiStatement {
                    lhs: names[lhs].to_string(),
                    rhs,
                    given,
                });
            }
        }
    }
    out.sort();
    out
}

/// The canonical statements expressing full mutual independence of `vars`
/// (conditioning sets drawn from `vars` as well). This is the "exogenous
/// independence family" of a scenario when applied to its choice and ontic
/// variables.
pub fn mutual_independence_family(vars: &[&str]) -> Vec<CiStatement> {
    all_canonical_statements(vars)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_validation() {
        assert!(VariableSpace::new([
            ("A", alloc::vec!["0".to_string(), "1".to_string()]),
            ("A", alloc::vec!["0".to_string()]),
        ])
        .is_err());
        assert!(VariableSpace::new([("A", Vec::<String>::new())]).is_err());
    }

    #[test]
    fn statement_canonicalization() {
        let s = CiStatement::new("X", ["B"], ["A"]).unwrap().canonical();
        assert_eq!(s.lhs, "B");
        assert_eq!(s.rhs.iter().next().unwrap(), "X");
        // Multi-variable right-hand sides stay put.
        let s = CiStatement::new("X", ["A", "B"], Vec::<String>::new())
            .unwrap()
            .canonical();
        assert_eq!(s.lhs, "X");
        assert_eq!(s.to_string(), "X ⊥⊥ A,B");
    }

    #[test]
    fn statement_disjointness() {
        assert!(CiStatement::new("X", ["X"], Vec::<String>::new()).is_err());
        assert!(CiStatement::new("X", ["A"], ["A"]).is_err());
        assert!(CiStatement::new("X", Vec::<String>::new(), ["A"]).is_err());
    }

    #[test]
    fn canonical_statement_counts() {
        // Three variables: 9 canonical statements (see module docs).
        assert_eq!(all_canonical_statements(&["C", "L", "Z"]).len(), 9);
        // Five variables: 5·65 = 325 raw, minus 80 single-rhs mirrors.
        assert_eq!(
            all_canonical_statements(&["A", "B", "L", "X", "Y"]).len(),
            245
        );
    }
}
