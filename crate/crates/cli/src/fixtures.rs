//! Built-in fixture lookup shared by the CLI and its tests.

use opthy_core::graph::{bell_graph, from_theory, ghz_graph, peres_mermin_graph, Hypergraph};
use opthy_core::ontology::{
    classical_nontrivial_model, classical_trivial_model, epr_nontrivial_model, epr_trivial_model,
    pr_nontrivial_model, pr_trivial_model, OntologicalModel,
};
use opthy_core::theory::{
    classical_theory, classical_trivial, epr_theory, epr_trivial, mini_theory, pr_theory,
    pr_trivial, OperationalTheory,
};

pub const THEORY_FIXTURES: [&str; 7] = [
    "classical",
    "epr",
    "pr",
    "classical-trivial",
    "epr-trivial",
    "pr-trivial",
    "mini",
];

pub const GRAPH_FIXTURES: [&str; 9] = [
    "classical",
    "epr",
    "pr",
    "classical-trivial",
    "epr-trivial",
    "pr-trivial",
    "mini",
    "ghz",
    "peres-mermin",
];

pub fn theory(name: &str) -> Option<OperationalTheory> {
    match name {
        "classical" => Some(classical_theory()),
        "epr" => Some(epr_theory()),
        "pr" => Some(pr_theory()),
        "classical-trivial" => Some(classical_trivial()),
        "epr-trivial" => Some(epr_trivial()),
        "pr-trivial" => Some(pr_trivial()),
        "mini" => Some(mini_theory()),
        _ => None,
    }
}

/// The Appendix model paired with a theory fixture, when one exists.
pub fn model(name: &str) -> Option<OntologicalModel> {
    match name {
        "classical" => Some(classical_nontrivial_model()),
        "epr" => Some(epr_nontrivial_model()),
        "pr" => Some(pr_nontrivial_model()),
        "classical-trivial" => Some(classical_trivial_model()),
        "epr-trivial" => Some(epr_trivial_model()),
        "pr-trivial" => Some(pr_trivial_model()),
        _ => None,
    }
}

pub fn graph(name: &str) -> Option<Hypergraph> {
    match name {
        "ghz" => Some(ghz_graph()),
        "peres-mermin" => Some(peres_mermin_graph()),
        "bell" => Some(bell_graph()),
        other => theory(other).map(|t| from_theory(&t)),
    }
}
