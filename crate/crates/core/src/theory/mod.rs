//! Operational theories: measurements, preparations, compatibility structure
//! and exact probability tables, plus the checks for operational equivalence
//! and non-disturbance.
//!
//! A theory stores only its *member* measurements: basic measurements and
//! conjunctions of basics (simultaneous measurements). Coarse-grainings are
//! derived views — a measurement plus a re-binning of its outcomes — and are
//! created on demand by [`OperationalTheory::subset_view`] and
//! [`OperationalTheory::factor_view`]; they never sit in the member set but
//! participate fully in equivalence checks.

mod builders;

pub use builders::{
    classical_theory, classical_trivial, epr_theory, epr_trivial, merge_theories, mini_theory,
    pr_theory, pr_trivial,
};

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::rational::{Distribution, DistributionError, Rational};

/// A set of basic-measurement labels that can be measured simultaneously and
/// is maximal with that property.
pub type Context = BTreeSet<String>;

/// An outcome of a measurement: a bare label for basics and coarse-graining
/// blocks, a tuple of component labels for conjunctions.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    Atom(String),
    Tuple(Vec<String>),
}

impl Outcome {
    pub fn atom(s: impl Into<String>) -> Self {
        Outcome::Atom(s.into())
    }

    pub fn tuple(parts: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Outcome::Tuple(parts.into_iter().map(Into::into).collect())
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Atom(s) => write!(f, "{s}"),
            Outcome::Tuple(parts) => write!(f, "({})", parts.join(",")),
        }
    }
}

impl fmt::Debug for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A named partition of a base measurement's outcome set into blocks.
///
/// Block order is the view's outcome order; the blocks must cover the base
/// outcome set exactly once.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Partition {
    pub blocks: Vec<(Outcome, BTreeSet<Outcome>)>,
}

/// Identifies a measurement: a basic, a conjunction of ≥ 2 basics (canonical
/// because the label set is sorted), or a coarse-graining view of another
/// measurement.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MeasurementId {
    Basic(String),
    Conjunction(BTreeSet<String>),
    CoarseGraining {
        base: Box<MeasurementId>,
        partition: Partition,
    },
}

impl MeasurementId {
    pub fn basic(label: impl Into<String>) -> Self {
        MeasurementId::Basic(label.into())
    }

    pub fn conjunction(labels: impl IntoIterator<Item = impl Into<String>>) -> Self {
        MeasurementId::Conjunction(labels.into_iter().map(Into::into).collect())
    }

    /// True for basics and conjunctions, which are the only kinds a theory
    /// stores as members.
    pub fn is_member_kind(&self) -> bool {
        !matches!(self, MeasurementId::CoarseGraining { .. })
    }
}

impl fmt::Display for MeasurementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasurementId::Basic(l) => write!(f, "{l}"),
            MeasurementId::Conjunction(set) => {
                let labels: Vec<&str> = set.iter().map(String::as_str).collect();
                write!(f, "{}", labels.join("∧"))
            }
            MeasurementId::CoarseGraining { base, partition } => {
                let names: Vec<String> = partition
                    .blocks
                    .iter()
                    .map(|(n, _)| n.to_string())
                    .collect();
                write!(f, "{base}^({})", names.join("|"))
            }
        }
    }
}

impl fmt::Debug for MeasurementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Errors raised while building or querying an operational theory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TheoryError {
    BadLabel(String),
    DuplicateBasic(String),
    DuplicatePreparation(String),
    UnknownBasic(String),
    UnknownPreparation(String),
    UnknownMeasurement(String),
    UnknownOutcome {
        measurement: String,
        outcome: String,
    },
    ConjunctionTooSmall(String),
    /// Downward closure broken: the first conjunction is a member but the
    /// second (a subset of it) is not.
    MissingSubConjunction(String, String),
    MissingTable {
        measurement: String,
        preparation: String,
    },
    DuplicateTable {
        measurement: String,
        preparation: String,
    },
    BadDistribution {
        measurement: String,
        preparation: String,
        error: DistributionError,
    },
    BadFactorization(String),
    BadPartition(String),
    /// Outcome spaces have different sizes and no correspondence was given.
    CardinalityMismatch {
        left: String,
        right: String,
    },
    BadCorrespondence(String),
    MergeConflict(String),
}

impl fmt::Display for TheoryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use TheoryError::*;
        match self {
            BadLabel(l) => write!(f, "label `{l}` is empty or contains a reserved character"),
            DuplicateBasic(l) => write!(f, "basic measurement `{l}` declared twice"),
            DuplicatePreparation(p) => write!(f, "preparation `{p}` declared twice"),
            UnknownBasic(l) => write!(f, "unknown basic measurement `{l}`"),
            UnknownPreparation(p) => write!(f, "unknown preparation `{p}`"),
            UnknownMeasurement(m) => write!(f, "measurement `{m}` is not a member of the theory"),
            UnknownOutcome {
                measurement,
                outcome,
            } => {
                write!(
                    f,
                    "outcome `{outcome}` is not in the outcome space of `{measurement}`"
                )
            }
            ConjunctionTooSmall(m) => {
                write!(f, "conjunction `{m}` needs at least two distinct basics")
            }
            MissingSubConjunction(m, sub) => {
                write!(
                    f,
                    "downward closure violated: `{m}` is a member but `{sub}` is not"
                )
            }
            MissingTable {
                measurement,
                preparation,
            } => {
                write!(f, "no table entry for measurement `{measurement}` under preparation `{preparation}`")
            }
            DuplicateTable {
                measurement,
                preparation,
            } => {
                write!(f, "two table entries for measurement `{measurement}` under preparation `{preparation}`")
            }
            BadDistribution {
                measurement,
                preparation,
                error,
            } => {
                write!(
                    f,
                    "invalid distribution for `{measurement}` under `{preparation}`: {error}"
                )
            }
            BadFactorization(l) => write!(f, "invalid outcome factorization on basic `{l}`"),
            BadPartition(m) => write!(f, "invalid coarse-graining partition over `{m}`"),
            CardinalityMismatch { left, right } => {
                write!(f, "outcome spaces of `{left}` and `{right}` differ in size; supply an outcome correspondence")
            }
            BadCorrespondence(msg) => write!(f, "invalid outcome correspondence: {msg}"),
            MergeConflict(msg) => write!(f, "cannot merge theories: {msg}"),
        }
    }
}

/// A basic measurement declaration: label, ordered outcome labels, and an
/// optional factorization of the outcome set into components (used by trivial
/// theories whose outcomes carry index-pair structure, e.g. Z00..Z11 = 2×2).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BasicMeasurement {
    pub label: String,
    pub outcomes: Vec<String>,
    /// Component outcome-label lists; their Cartesian product (row-major)
    /// matches the flat `outcomes` list positionally.
    pub factors: Option<Vec<Vec<String>>>,
}

/// A finite operational theory: conditional outcome tables `p(X | M, P)` over
/// an explicit, finite set of member measurements and preparations.
///
/// Immutable after construction; all accessors are `&self`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OperationalTheory {
    name: String,
    basics: Vec<BasicMeasurement>,
    conjunctions: BTreeSet<BTreeSet<String>>,
    preparations: Vec<String>,
    tables: BTreeMap<(MeasurementId, String), Distribution<Outcome>>,
}

fn check_label(l: &str) -> Result<(), TheoryError> {
    let reserved = [',', '∧', '^', '|', '{', '}', '(', ')'];
    if l.is_empty()
        || l.chars()
            .any(|c| reserved.contains(&c) || c.is_whitespace())
    {
        return Err(TheoryError::BadLabel(l.to_owned()));
    }
    Ok(())
}

/// Incremental construction of an [`OperationalTheory`]; `finish` validates
/// every invariant (downward closure, table completeness, normalization).
pub struct TheoryBuilder {
    name: String,
    basics: Vec<BasicMeasurement>,
    conjunctions: BTreeSet<BTreeSet<String>>,
    preparations: Vec<String>,
    tables: Vec<(MeasurementId, String, Distribution<Outcome>)>,
}

impl TheoryBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        TheoryBuilder {
            name: name.into(),
            basics: Vec::new(),
            conjunctions: BTreeSet::new(),
            preparations: Vec::new(),
            tables: Vec::new(),
        }
    }

    pub fn basic(
        mut self,
        label: impl Into<String>,
        outcomes: impl IntoIterator<Item = impl Into<String>>,
    ) -> Self {
        self.basics.push(BasicMeasurement {
            label: label.into(),
            outcomes: outcomes.into_iter().map(Into::into).collect(),
            factors: None,
        });
        self
    }

    /// Declares a basic whose flat outcomes are the row-major product of the
    /// given component label lists.
    pub fn factored_basic(
        mut self,
        label: impl Into<String>,
        outcomes: impl IntoIterator<Item = impl Into<String>>,
        factors: Vec<Vec<String>>,
    ) -> Self {
        self.basics.push(BasicMeasurement {
            label: label.into(),
            outcomes: outcomes.into_iter().map(Into::into).collect(),
            factors: Some(factors),
        });
        self
    }

    pub fn conjunction(mut self, labels: impl IntoIterator<Item = impl Into<String>>) -> Self {
        self.conjunctions
            .insert(labels.into_iter().map(Into::into).collect());
        self
    }

    pub fn preparation(mut self, label: impl Into<String>) -> Self {
        self.preparations.push(label.into());
        self
    }

    pub fn table(
        mut self,
        measurement: MeasurementId,
        preparation: impl Into<String>,
        dist: Distribution<Outcome>,
    ) -> Self {
        self.tables.push((measurement, preparation.into(), dist));
        self
    }

    pub fn finish(self) -> Result<OperationalTheory, TheoryError> {
        let mut tables = BTreeMap::new();
        for (m, p, d) in self.tables {
            if tables.insert((m.clone(), p.clone()), d).is_some() {
                return Err(TheoryError::DuplicateTable {
                    measurement: m.to_string(),
                    preparation: p,
                });
            }
        }
        let theory = OperationalTheory {
            name: self.name,
            basics: self.basics,
            conjunctions: self.conjunctions,
            preparations: self.preparations,
            tables,
        };
        theory.validate()?;
        Ok(theory)
    }
}

impl OperationalTheory {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn basics(&self) -> &[BasicMeasurement] {
        &self.basics
    }

    pub fn basic(&self, label: &str) -> Option<&BasicMeasurement> {
        self.basics.iter().find(|b| b.label == label)
    }

    pub fn conjunction_sets(&self) -> impl Iterator<Item = &BTreeSet<String>> {
        self.conjunctions.iter()
    }

    pub fn preparations(&self) -> &[String] {
        &self.preparations
    }

    /// All member measurements: every basic, then every conjunction.
    pub fn members(&self) -> Vec<MeasurementId> {
        let mut out: Vec<MeasurementId> = self
            .basics
            .iter()
            .map(|b| MeasurementId::Basic(b.label.clone()))
            .collect();
        out.extend(
            self.conjunctions
                .iter()
                .map(|s| MeasurementId::Conjunction(s.clone())),
        );
        out
    }

    pub fn is_member(&self, m: &MeasurementId) -> bool {
        match m {
            MeasurementId::Basic(l) => self.basic(l).is_some(),
            MeasurementId::Conjunction(s) => self.conjunctions.contains(s),
            MeasurementId::CoarseGraining { .. } => false,
        }
    }

    /// True when no two measurements can be performed simultaneously.
    pub fn is_trivial(&self) -> bool {
        self.conjunctions.is_empty()
    }

    fn validate(&self) -> Result<(), TheoryError> {
        // Labels and declarations.
        let mut seen = BTreeSet::new();
        for b in &self.basics {
            check_label(&b.label)?;
            if !seen.insert(&b.label) {
                return Err(TheoryError::DuplicateBasic(b.label.clone()));
            }
            if b.outcomes.is_empty() {
                return Err(TheoryError::BadLabel(format!(
                    "{} has no outcomes",
                    b.label
                )));
            }
            let mut outs = BTreeSet::new();
            for o in &b.outcomes {
                check_label(o)?;
                if !outs.insert(o) {
                    return Err(TheoryError::BadLabel(format!(
                        "duplicate outcome `{o}` on `{}`",
                        b.label
                    )));
                }
            }
            if let Some(factors) = &b.factors {
                let size: usize = factors.iter().map(Vec::len).product();
                if factors.len() < 2 || size != b.outcomes.len() {
                    return Err(TheoryError::BadFactorization(b.label.clone()));
                }
                for comp in factors {
                    let mut comp_seen = BTreeSet::new();
                    for l in comp {
                        check_label(l)?;
                        if !comp_seen.insert(l) {
                            return Err(TheoryError::BadFactorization(b.label.clone()));
                        }
                    }
                }
            }
        }
        let mut prep_seen = BTreeSet::new();
        for p in &self.preparations {
            check_label(p)?;
            if !prep_seen.insert(p) {
                return Err(TheoryError::DuplicatePreparation(p.clone()));
            }
        }
        // Conjunctions: known basics, size ≥ 2, downward closure.
        for set in &self.conjunctions {
            if set.len() < 2 {
                return Err(TheoryError::ConjunctionTooSmall(
                    MeasurementId::Conjunction(set.clone()).to_string(),
                ));
            }
            for l in set {
                if self.basic(l).is_none() {
                    return Err(TheoryError::UnknownBasic(l.clone()));
                }
            }
            for sub in proper_subsets(set) {
                if sub.len() >= 2 && !self.conjunctions.contains(&sub) {
                    return Err(TheoryError::MissingSubConjunction(
                        MeasurementId::Conjunction(set.clone()).to_string(),
                        MeasurementId::Conjunction(sub).to_string(),
                    ));
                }
            }
        }
        // Tables: complete and over the right outcome spaces.
        for m in self.members() {
            let space: BTreeSet<Outcome> = self.outcome_space(&m)?.into_iter().collect();
            for p in &self.preparations {
                let d = self.tables.get(&(m.clone(), p.clone())).ok_or_else(|| {
                    TheoryError::MissingTable {
                        measurement: m.to_string(),
                        preparation: p.clone(),
                    }
                })?;
                for o in d.support() {
                    if !space.contains(o) {
                        return Err(TheoryError::UnknownOutcome {
                            measurement: m.to_string(),
                            outcome: o.to_string(),
                        });
                    }
                }
            }
        }
        for (m, p) in self.tables.keys() {
            if !self.is_member(m) {
                return Err(TheoryError::UnknownMeasurement(m.to_string()));
            }
            if !self.preparations.contains(p) {
                return Err(TheoryError::UnknownPreparation(p.clone()));
            }
        }
        Ok(())
    }

    /// Ordered outcome space of a measurement or view.
    ///
    /// Conjunction outcomes are the row-major Cartesian product of the
    /// component outcome lists, components in sorted label order.
    pub fn outcome_space(&self, m: &MeasurementId) -> Result<Vec<Outcome>, TheoryError> {
        match m {
            MeasurementId::Basic(l) => {
                let b = self
                    .basic(l)
                    .ok_or_else(|| TheoryError::UnknownBasic(l.clone()))?;
                Ok(b.outcomes.iter().map(Outcome::atom).collect())
            }
            MeasurementId::Conjunction(set) => {
                let mut component_outcomes = Vec::new();
                for l in set {
                    let b = self
                        .basic(l)
                        .ok_or_else(|| TheoryError::UnknownBasic(l.clone()))?;
                    component_outcomes.push(&b.outcomes);
                }
                Ok(cartesian(&component_outcomes)
                    .into_iter()
                    .map(Outcome::Tuple)
                    .collect())
            }
            MeasurementId::CoarseGraining { base, partition } => {
                let base_space: BTreeSet<Outcome> = self.outcome_space(base)?.into_iter().collect();
                let mut covered = BTreeSet::new();
                let mut names = BTreeSet::new();
                for (name, members) in &partition.blocks {
                    if !names.insert(name.clone()) || members.is_empty() {
                        return Err(TheoryError::BadPartition(m.to_string()));
                    }
                    for o in members {
                        if !base_space.contains(o) || !covered.insert(o.clone()) {
                            return Err(TheoryError::BadPartition(m.to_string()));
                        }
                    }
                }
                if covered.len() != base_space.len() {
                    return Err(TheoryError::BadPartition(m.to_string()));
                }
                Ok(partition.blocks.iter().map(|(n, _)| n.clone()).collect())
            }
        }
    }

    /// The full outcome distribution of `m` under `preparation`.
    ///
    /// Members read their table; coarse-grainings sum the base distribution
    /// over each block.
    pub fn distribution(
        &self,
        m: &MeasurementId,
        preparation: &str,
    ) -> Result<Distribution<Outcome>, TheoryError> {
        match m {
            MeasurementId::CoarseGraining { base, partition } => {
                self.outcome_space(m)?; // validates the partition
                let base_dist = self.distribution(base, preparation)?;
                let lookup: BTreeMap<&Outcome, &Outcome> = partition
                    .blocks
                    .iter()
                    .flat_map(|(name, members)| members.iter().map(move |o| (o, name)))
                    .collect();
                Ok(base_dist.map(|o| (*lookup.get(o).expect("partition covers base")).clone()))
            }
            _ => {
                if !self.is_member(m) {
                    return Err(TheoryError::UnknownMeasurement(m.to_string()));
                }
                if !self.preparations.iter().any(|p| p == preparation) {
                    return Err(TheoryError::UnknownPreparation(preparation.to_owned()));
                }
                Ok(self.tables[&(m.clone(), preparation.to_owned())].clone())
            }
        }
    }

    /// `p(outcome | m, preparation)`, exactly.
    pub fn probability(
        &self,
        outcome: &Outcome,
        m: &MeasurementId,
        preparation: &str,
    ) -> Result<Rational, TheoryError> {
        let space = self.outcome_space(m)?;
        if !space.contains(outcome) {
            return Err(TheoryError::UnknownOutcome {
                measurement: m.to_string(),
                outcome: outcome.to_string(),
            });
        }
        Ok(self.distribution(m, preparation)?.mass(outcome))
    }

    /// The view of a member conjunction restricted to a subset of its
    /// components: outcomes of the view are the sub-tuples (atoms if a single
    /// component survives), each block collecting the full tuples that agree
    /// with it.
    pub fn subset_view(
        &self,
        conjunction: &BTreeSet<String>,
        sub: &BTreeSet<String>,
    ) -> Result<MeasurementId, TheoryError> {
        if !self.conjunctions.contains(conjunction) {
            return Err(TheoryError::UnknownMeasurement(
                MeasurementId::Conjunction(conjunction.clone()).to_string(),
            ));
        }
        if sub.is_empty() || sub == conjunction || !sub.is_subset(conjunction) {
            return Err(TheoryError::BadPartition(format!(
                "{sub:?} is not a proper non-empty subset of {conjunction:?}"
            )));
        }
        let labels: Vec<&String> = conjunction.iter().collect();
        let keep: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, l)| sub.contains(**l))
            .map(|(i, _)| i)
            .collect();
        let base = MeasurementId::Conjunction(conjunction.clone());
        let full = self.outcome_space(&base)?;
        let mut blocks: Vec<(Outcome, BTreeSet<Outcome>)> = Vec::new();
        for o in full {
            let Outcome::Tuple(parts) = &o else {
                unreachable!()
            };
            let sub_parts: Vec<String> = keep.iter().map(|&i| parts[i].clone()).collect();
            let name = if sub_parts.len() == 1 {
                Outcome::Atom(sub_parts[0].clone())
            } else {
                Outcome::Tuple(sub_parts)
            };
            match blocks.iter_mut().find(|(n, _)| *n == name) {
                Some((_, members)) => {
                    members.insert(o);
                }
                None => {
                    let mut members = BTreeSet::new();
                    members.insert(o);
                    blocks.push((name, members));
                }
            }
        }
        Ok(MeasurementId::CoarseGraining {
            base: Box::new(base),
            partition: Partition { blocks },
        })
    }

    /// The view of a factored basic restricted to a subset of its outcome
    /// components (`comps` are 0-based component indices, strictly increasing).
    pub fn factor_view(&self, basic: &str, comps: &[usize]) -> Result<MeasurementId, TheoryError> {
        let b = self
            .basic(basic)
            .ok_or_else(|| TheoryError::UnknownBasic(basic.to_owned()))?;
        let factors = b
            .factors
            .as_ref()
            .ok_or_else(|| TheoryError::BadFactorization(basic.to_owned()))?;
        if comps.is_empty()
            || comps.len() >= factors.len()
            || comps.windows(2).any(|w| w[0] >= w[1])
            || comps.iter().any(|&c| c >= factors.len())
        {
            return Err(TheoryError::BadFactorization(basic.to_owned()));
        }
        let sizes: Vec<usize> = factors.iter().map(Vec::len).collect();
        let mut blocks: Vec<(Outcome, BTreeSet<Outcome>)> = Vec::new();
        for (flat, outcome) in b.outcomes.iter().enumerate() {
            let digits = mixed_radix_digits(flat, &sizes);
            let parts: Vec<String> = comps
                .iter()
                .map(|&c| factors[c][digits[c]].clone())
                .collect();
            let name = if parts.len() == 1 {
                Outcome::Atom(parts[0].clone())
            } else {
                Outcome::Tuple(parts)
            };
            let o = Outcome::atom(outcome);
            match blocks.iter_mut().find(|(n, _)| *n == name) {
                Some((_, members)) => {
                    members.insert(o);
                }
                None => {
                    let mut members = BTreeSet::new();
                    members.insert(o);
                    blocks.push((name, members));
                }
            }
        }
        Ok(MeasurementId::CoarseGraining {
            base: Box::new(MeasurementId::basic(basic)),
            partition: Partition { blocks },
        })
    }

    /// The coarse-graining of `m` whose blocks are single outcomes, in outcome
    /// order. Its distribution reproduces the base distribution exactly.
    pub fn singleton_view(&self, m: &MeasurementId) -> Result<MeasurementId, TheoryError> {
        let space = self.outcome_space(m)?;
        let blocks = space
            .into_iter()
            .map(|o| {
                let mut set = BTreeSet::new();
                set.insert(o.clone());
                (o, set)
            })
            .collect();
        Ok(MeasurementId::CoarseGraining {
            base: Box::new(m.clone()),
            partition: Partition { blocks },
        })
    }

    /// Member measurements plus every structurally derivable coarse-graining
    /// view: component-subset views of each conjunction and factor-component
    /// views of each factored basic. This is the universe over which
    /// measurement-noncontextuality pairs are enumerated.
    pub fn measurement_views(&self) -> Vec<MeasurementId> {
        let mut out = self.members();
        for set in &self.conjunctions {
            for sub in proper_subsets(set) {
                if !sub.is_empty() {
                    out.push(self.subset_view(set, &sub).expect("valid by construction"));
                }
            }
        }
        for b in &self.basics {
            if let Some(factors) = &b.factors {
                let n = factors.len();
                for mask in 1..((1usize << n) - 1) {
                    let comps: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
                    out.push(
                        self.factor_view(&b.label, &comps)
                            .expect("valid by construction"),
                    );
                }
            }
        }
        out
    }

    /// Tests operational equivalence: identical outcome distributions in
    /// every preparation, under the given outcome correspondence (pairs of
    /// left-outcome → right-outcome) or, by default, order-based pairing of
    /// the two outcome spaces.
    pub fn are_operationally_equivalent(
        &self,
        left: &MeasurementId,
        right: &MeasurementId,
        correspondence: Option<&[(Outcome, Outcome)]>,
    ) -> Result<bool, TheoryError> {
        let pairs = self.outcome_pairing(left, right, correspondence)?;
        for p in &self.preparations {
            let dl = self.distribution(left, p)?;
            let dr = self.distribution(right, p)?;
            for (ol, or) in &pairs {
                if dl.mass(ol) != dr.mass(or) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn outcome_pairing(
        &self,
        left: &MeasurementId,
        right: &MeasurementId,
        correspondence: Option<&[(Outcome, Outcome)]>,
    ) -> Result<Vec<(Outcome, Outcome)>, TheoryError> {
        let ls = self.outcome_space(left)?;
        let rs = self.outcome_space(right)?;
        match correspondence {
            None => {
                if ls.len() != rs.len() {
                    return Err(TheoryError::CardinalityMismatch {
                        left: left.to_string(),
                        right: right.to_string(),
                    });
                }
                Ok(ls.into_iter().zip(rs).collect())
            }
            Some(pairs) => {
                let lset: BTreeSet<&Outcome> = pairs.iter().map(|(l, _)| l).collect();
                let rset: BTreeSet<&Outcome> = pairs.iter().map(|(_, r)| r).collect();
                if pairs.len() != ls.len()
                    || lset.len() != pairs.len()
                    || rset.len() != pairs.len()
                    || !ls.iter().all(|o| lset.contains(o))
                    || !rs.iter().all(|o| rset.contains(o))
                {
                    return Err(TheoryError::BadCorrespondence(format!(
                        "not a bijection between the outcome spaces of `{left}` and `{right}`"
                    )));
                }
                Ok(pairs.to_vec())
            }
        }
    }

    /// Checks non-disturbance: for every member conjunction, the marginal on
    /// each sub-member equals the sub-member's standalone distribution, in
    /// every preparation. Violations are `(measurement, conjunction,
    /// preparation)` triples.
    pub fn non_disturbance(&self) -> NonDisturbanceReport {
        let mut violations = Vec::new();
        for set in &self.conjunctions {
            for sub in proper_subsets(set) {
                if sub.is_empty() {
                    continue;
                }
                let standalone = if sub.len() == 1 {
                    MeasurementId::basic(sub.iter().next().unwrap())
                } else {
                    MeasurementId::Conjunction(sub.clone())
                };
                let view = self.subset_view(set, &sub).expect("member conjunction");
                for p in &self.preparations {
                    let marginal = self.distribution(&view, p).expect("valid view");
                    let direct = self.distribution(&standalone, p).expect("member");
                    // View block names are the sub-outcomes themselves, so the
                    // two distributions are directly comparable.
                    let same = self
                        .outcome_space(&standalone)
                        .expect("member")
                        .iter()
                        .all(|o| marginal.mass(o) == direct.mass(o));
                    if !same {
                        violations.push(NonDisturbanceViolation {
                            measurement: standalone.clone(),
                            conjunction: MeasurementId::Conjunction(set.clone()),
                            preparation: p.clone(),
                        });
                    }
                }
            }
        }
        NonDisturbanceReport { violations }
    }

    /// All contexts: the maximal member-conjunction basic-sets. Empty for
    /// trivial theories (no conjunctions at all). A basic sitting in no
    /// conjunction contributes no context here; trivialization carries such
    /// lone basics over unchanged.
    pub fn contexts(&self) -> Vec<Context> {
        let mut out: Vec<Context> = Vec::new();
        for set in &self.conjunctions {
            let maximal = !self
                .conjunctions
                .iter()
                .any(|other| other != set && set.is_subset(other));
            if maximal {
                out.push(set.clone());
            }
        }
        out
    }

    /// Basics that belong to no conjunction.
    pub fn lone_basics(&self) -> Vec<String> {
        self.basics
            .iter()
            .map(|b| b.label.clone())
            .filter(|l| !self.conjunctions.iter().any(|s| s.contains(l)))
            .collect()
    }
}

/// Outcome of a non-disturbance check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonDisturbanceReport {
    pub violations: Vec<NonDisturbanceViolation>,
}

impl NonDisturbanceReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// One broken marginal: measuring `measurement` alone differs from its
/// marginal within `conjunction` under `preparation`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonDisturbanceViolation {
    pub measurement: MeasurementId,
    pub conjunction: MeasurementId,
    pub preparation: String,
}

/// Row-major Cartesian product of outcome-label lists.
pub(crate) fn cartesian(lists: &[&Vec<String>]) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = alloc::vec![Vec::new()];
    for list in lists {
        let mut next = Vec::with_capacity(out.len() * list.len());
        for prefix in &out {
            for item in *list {
                let mut row = prefix.clone();
                row.push(item.clone());
                next.push(row);
            }
        }
        out = next;
    }
    out
}

/// Digits of `flat` in the mixed-radix system given by `sizes` (row-major:
/// the last component varies fastest).
pub(crate) fn mixed_radix_digits(mut flat: usize, sizes: &[usize]) -> Vec<usize> {
    let mut digits = alloc::vec![0usize; sizes.len()];
    for (i, &s) in sizes.iter().enumerate().rev() {
        digits[i] = flat % s;
        flat /= s;
    }
    digits
}

/// All proper subsets of `set` (including the empty set, excluding `set`).
pub(crate) fn proper_subsets(set: &BTreeSet<String>) -> Vec<BTreeSet<String>> {
    let items: Vec<&String> = set.iter().collect();
    let n = items.len();
    (0..((1usize << n) - 1))
        .map(|mask| {
            (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| items[i].clone())
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::dist;
    use alloc::vec;

    fn two_coin_theory() -> OperationalTheory {
        // A and B compatible, independent fair coins.
        let half = Rational::new(1, 2);
        let quarter = Rational::new(1, 4);
        let joint = MeasurementId::conjunction(["A", "B"]);
        TheoryBuilder::new("coins")
            .basic("A", ["H", "T"])
            .basic("B", ["H", "T"])
            .conjunction(["A", "B"])
            .preparation("P")
            .table(
                MeasurementId::basic("A"),
                "P",
                dist(vec![
                    (Outcome::atom("H"), half.clone()),
                    (Outcome::atom("T"), half.clone()),
                ])
                .unwrap(),
            )
            .table(
                MeasurementId::basic("B"),
                "P",
                dist(vec![
                    (Outcome::atom("H"), half.clone()),
                    (Outcome::atom("T"), half.clone()),
                ])
                .unwrap(),
            )
            .table(
                joint,
                "P",
                dist(vec![
                    (Outcome::tuple(["H", "H"]), quarter.clone()),
                    (Outcome::tuple(["H", "T"]), quarter.clone()),
                    (Outcome::tuple(["T", "H"]), quarter.clone()),
                    (Outcome::tuple(["T", "T"]), quarter),
                ])
                .unwrap(),
            )
            .finish()
            .unwrap()
    }

    #[test]
    fn member_and_view_lookup() {
        let t = two_coin_theory();
        let a = MeasurementId::basic("A");
        assert_eq!(
            t.probability(&Outcome::atom("H"), &a, "P").unwrap(),
            Rational::new(1, 2)
        );
        let joint = MeasurementId::conjunction(["A", "B"]);
        assert_eq!(
            t.probability(&Outcome::tuple(["H", "T"]), &joint, "P")
                .unwrap(),
            Rational::new(1, 4)
        );
        // Marginal view of the conjunction onto A.
        let sub: BTreeSet<String> = ["A".to_string()].into_iter().collect();
        let conj: BTreeSet<String> = ["A".to_string(), "B".to_string()].into_iter().collect();
        let view = t.subset_view(&conj, &sub).unwrap();
        assert_eq!(
            t.probability(&Outcome::atom("H"), &view, "P").unwrap(),
            Rational::new(1, 2)
        );
    }

    #[test]
    fn unknown_lookups_error() {
        let t = two_coin_theory();
        let a = MeasurementId::basic("A");
        assert!(matches!(
            t.probability(&Outcome::atom("X"), &a, "P"),
            Err(TheoryError::UnknownOutcome { .. })
        ));
        assert!(matches!(
            t.probability(&Outcome::atom("H"), &a, "Q"),
            Err(TheoryError::UnknownPreparation(_))
        ));
        assert!(matches!(
            t.probability(&Outcome::atom("H"), &MeasurementId::basic("C"), "P"),
            Err(TheoryError::UnknownBasic(_))
        ));
    }

    #[test]
    fn downward_closure_is_enforced() {
        let err = TheoryBuilder::new("bad")
            .basic("A", ["0", "1"])
            .basic("B", ["0", "1"])
            .basic("C", ["0", "1"])
            .conjunction(["A", "B", "C"])
            .preparation("P")
            .finish()
            .unwrap_err();
        assert!(matches!(err, TheoryError::MissingSubConjunction(_, _)));
    }

    #[test]
    fn missing_table_is_reported() {
        let err = TheoryBuilder::new("bad")
            .basic("A", ["0", "1"])
            .preparation("P")
            .finish()
            .unwrap_err();
        assert!(matches!(err, TheoryError::MissingTable { .. }));
    }

    #[test]
    fn equivalence_is_reflexive_and_checks_cardinality() {
        let t = two_coin_theory();
        let a = MeasurementId::basic("A");
        let b = MeasurementId::basic("B");
        let joint = MeasurementId::conjunction(["A", "B"]);
        assert!(t.are_operationally_equivalent(&a, &a, None).unwrap());
        assert!(t.are_operationally_equivalent(&a, &b, None).unwrap());
        assert!(matches!(
            t.are_operationally_equivalent(&a, &joint, None),
            Err(TheoryError::CardinalityMismatch { .. })
        ));
    }

    #[test]
    fn explicit_correspondence_must_be_a_bijection() {
        let t = two_coin_theory();
        let a = MeasurementId::basic("A");
        let b = MeasurementId::basic("B");
        // Swapped pairing is a fine bijection.
        let swap = vec![
            (Outcome::atom("H"), Outcome::atom("T")),
            (Outcome::atom("T"), Outcome::atom("H")),
        ];
        assert!(t.are_operationally_equivalent(&a, &b, Some(&swap)).unwrap());
        let broken = vec![
            (Outcome::atom("H"), Outcome::atom("T")),
            (Outcome::atom("H"), Outcome::atom("H")),
        ];
        assert!(matches!(
            t.are_operationally_equivalent(&a, &b, Some(&broken)),
            Err(TheoryError::BadCorrespondence(_))
        ));
    }

    #[test]
    fn product_tables_are_non_disturbing() {
        let t = two_coin_theory();
        let report = t.non_disturbance();
        assert!(report.holds(), "{:?}", report.violations);
    }

    #[test]
    fn disturbing_counterexample_is_caught() {
        // p(H|A) = 1 standalone, but the A-marginal of A∧B is 1/2.
        let half = Rational::new(1, 2);
        let t = TheoryBuilder::new("disturbing")
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
                dist(vec![
                    (Outcome::atom("H"), half.clone()),
                    (Outcome::atom("T"), half.clone()),
                ])
                .unwrap(),
            )
            .table(
                MeasurementId::conjunction(["A", "B"]),
                "P",
                dist(vec![
                    (Outcome::tuple(["H", "H"]), half.clone()),
                    (Outcome::tuple(["T", "T"]), half),
                ])
                .unwrap(),
            )
            .finish()
            .unwrap();
        let report = t.non_disturbance();
        assert!(!report.holds());
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].measurement, MeasurementId::basic("A"));
    }

    #[test]
    fn singleton_view_reproduces_base() {
        let t = two_coin_theory();
        let joint = MeasurementId::conjunction(["A", "B"]);
        let view = t.singleton_view(&joint).unwrap();
        let base = t.distribution(&joint, "P").unwrap();
        let through = t.distribution(&view, "P").unwrap();
        assert_eq!(base, through);
    }

    #[test]
    fn display_forms() {
        assert_eq!(MeasurementId::basic("A0").to_string(), "A0");
        assert_eq!(
            MeasurementId::conjunction(["B0", "A0"]).to_string(),
            "A0∧B0"
        );
        assert_eq!(Outcome::tuple(["X0", "Y1"]).to_string(), "(X0,Y1)");
    }
}
