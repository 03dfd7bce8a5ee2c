//! Plain-text rendering with optional ANSI color.
//!
//! Color is off unless the environment variable `OPTHY_COLOR=1` is set
//! (`OPTHY_COLOR=0` forces it off), so piped output stays clean by default.

use std::fmt::Write as _;

use opthy_core::bell::ChshReport;
use opthy_core::ontology::ContextualityReport;
use opthy_core::theory::{NonDisturbanceReport, OperationalTheory};

pub fn color_enabled() -> bool {
    matches!(std::env::var("OPTHY_COLOR").as_deref(), Ok("1"))
}

pub fn good(s: &str) -> String {
    if color_enabled() {
        format!("\x1b[32m{s}\x1b[0m")
    } else {
        s.to_string()
    }
}

pub fn bad(s: &str) -> String {
    if color_enabled() {
        format!("\x1b[31m{s}\x1b[0m")
    } else {
        s.to_string()
    }
}

pub fn verdict(ok: bool, yes: &str, no: &str) -> String {
    if ok {
        good(yes)
    } else {
        bad(no)
    }
}

pub fn theory_summary(theory: &OperationalTheory) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "theory: {}", theory.name());
    let basics: Vec<&str> = theory.basics().iter().map(|b| b.label.as_str()).collect();
    let _ = writeln!(out, "basics: {}", basics.join(", "));
    let contexts: Vec<String> = theory
        .contexts()
        .iter()
        .map(|c| {
            let labels: Vec<&str> = c.iter().map(String::as_str).collect();
            format!("{{{}}}", labels.join(","))
        })
        .collect();
    let _ = writeln!(
        out,
        "contexts: {}",
        if contexts.is_empty() {
            "(none — trivial compatibility structure)".to_string()
        } else {
            contexts.join(", ")
        }
    );
    let _ = writeln!(out, "preparations: {}", theory.preparations().join(", "));
    out
}

pub fn tables_text(theory: &OperationalTheory) -> String {
    let mut out = String::new();
    for m in theory.members() {
        let space = theory.outcome_space(&m).expect("member");
        for p in theory.preparations() {
            let d = theory.distribution(&m, p).expect("complete tables");
            let cells: Vec<String> = space
                .iter()
                .map(|o| format!("{o}: {}", d.mass(o)))
                .collect();
            let _ = writeln!(out, "p(·|{m}, {p}) = {{{}}}", cells.join(", "));
        }
    }
    out
}

pub fn non_disturbance_text(report: &NonDisturbanceReport) -> String {
    let mut out = format!("non-disturbing: {}\n", verdict(report.holds(), "yes", "no"));
    for v in &report.violations {
        let _ = writeln!(
            out,
            "  violated by ({}, {}, {})",
            v.measurement, v.conjunction, v.preparation
        );
    }
    out
}

pub fn contextuality_text(kind: &str, report: &ContextualityReport) -> String {
    let mut out = format!(
        "{kind}: {}\n",
        verdict(report.noncontextual(), "noncontextual", "contextual")
    );
    for w in report.witnesses.iter().take(8) {
        let _ = writeln!(out, "  witness: {w}");
    }
    if report.witnesses.len() > 8 {
        let _ = writeln!(out, "  … and {} more", report.witnesses.len() - 8);
    }
    out
}

pub fn chsh_text(report: &ChshReport) -> String {
    let [c00, c01, c10, c11] = &report.correlators;
    format!(
        "⟨A0,B0⟩ = {c00}\n⟨A0,B1⟩ = {c01}\n⟨A1,B0⟩ = {c10}\n⟨A1,B1⟩ = {c11}\nCHSH = {}\nclass = {}\n",
        report.value, report.class
    )
}
