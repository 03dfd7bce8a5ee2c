//! `opthy` — inspect finite operational theories and their ontological
//! models: validation, equivalence and non-disturbance reports, CHSH
//! classification, trivialization, contextuality checks, conditional
//! independence structure, minimal causal DAGs, faithfulness probing, and the
//! singlet Born-rule verification.
//!
//! Exit codes: 0 success/pass, 1 property violation (e.g. an `--expect`ed
//! property fails or a document is semantically invalid), 2 input error
//! (malformed JSON, unknown fixture, bad flags).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use opthy::doc::{
    doc_to_model, doc_to_theory, map_to_doc, model_to_doc, theory_to_doc, to_json_string, ModelDoc,
    TheoryDoc,
};
use opthy::fixtures;
use opthy::render;

use opthy_core::bell::chsh_with;
use opthy_core::causal::{
    faithfulness_probe, joint_from_model, minimal_dags, mutual_independence_family,
    uniform_choice_priors, CiStatement, Dag, FaithfulnessVerdict, Scenario,
};
use opthy_core::graph::{annotated_trivial_graph, Hypergraph};
use opthy_core::ontology::OntologicalModel;
use opthy_core::quantum::verify_epr_realization;
use opthy_core::theory::OperationalTheory;
use opthy_core::trivialize::trivialize;

#[derive(Parser)]
#[command(
    name = "opthy",
    version,
    about = "Operational theories and their ontological models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Dot,
}

#[derive(Args)]
struct TheoryInput {
    /// Built-in fixture: classical, epr, pr, classical-trivial, epr-trivial,
    /// pr-trivial, mini (graph-only fixtures: ghz, peres-mermin)
    #[arg(long, conflicts_with = "theory")]
    builtin: Option<String>,
    /// Theory JSON document
    #[arg(long)]
    theory: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a theory document (and optionally a model document) is
    /// well-formed and satisfies every structural invariant; with
    /// `--format json` the canonical document is echoed back
    Validate {
        #[command(flatten)]
        input: TheoryInput,
        /// Model JSON document to validate against the theory
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Summarize a theory: contexts, non-disturbance, operational
    /// equivalences among measurements and their views
    Report {
        #[command(flatten)]
        input: TheoryInput,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Correlators, the CHSH value and its classification
    Chsh {
        #[command(flatten)]
        input: TheoryInput,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Replace every maximal context with a new equivalent basic measurement
    Trivialize {
        #[command(flatten)]
        input: TheoryInput,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Determinism, noncontextuality and recovery checks for a model
    ModelCheck {
        /// Built-in fixture with its Appendix model (classical, epr, pr,
        /// classical-trivial, epr-trivial, pr-trivial)
        #[arg(long, conflicts_with_all = ["theory", "model"])]
        builtin: Option<String>,
        /// Theory JSON document (with --model)
        #[arg(long, requires = "model")]
        theory: Option<PathBuf>,
        /// Model JSON document (with --theory)
        #[arg(long, requires = "theory")]
        model: Option<PathBuf>,
        /// Properties that must hold; any violation exits with code 1
        #[arg(long, value_enum)]
        expect: Vec<Expectation>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Conditional-independence structure and causal graphs
    Causal {
        #[command(subcommand)]
        command: CausalCommand,
    },
    /// Compatibility hypergraphs, line graphs and DOT export
    Graph {
        #[command(flatten)]
        input: TheoryInput,
        /// Emit the line graph instead of the graph itself
        #[arg(long)]
        line: bool,
        /// Emit the trivialized theory's graph annotated with
        /// shared-marginal edges (non-trivial theories only)
        #[arg(long, conflicts_with = "line")]
        annotated: bool,
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
    },
    /// Verify the two-qubit singlet realization against the exact tables
    QuantumVerify {
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Subcommand)]
enum CausalCommand {
    /// All conditional independences of the model's joint distribution
    /// (uniform measurement priors)
    Cis {
        #[arg(long, conflicts_with_all = ["theory", "model"])]
        builtin: Option<String>,
        #[arg(long, requires = "model")]
        theory: Option<PathBuf>,
        #[arg(long, requires = "theory")]
        model: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Minimal DAGs returning the model's independences: sound
    /// (implied ⊆ observed) and recovering the exogenous independences
    Dags {
        #[arg(long, conflicts_with_all = ["theory", "model"])]
        builtin: Option<String>,
        #[arg(long, requires = "model")]
        theory: Option<PathBuf>,
        #[arg(long, requires = "theory")]
        model: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Perturb the scenario's causal-statistical parameters and measure how
    /// robust the named independences are
    Probe {
        /// Built-in fixture (the probe runs on the fixture's causal graph)
        #[arg(long)]
        builtin: String,
        #[arg(long, default_value = "200")]
        trials: u32,
        #[arg(long, default_value = "1")]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Expectation {
    Deterministic,
    SimultaneousNoncontextual,
    MeasurementNoncontextual,
    /// Both kinds of noncontextuality
    Noncontextual,
    Recovery,
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn violation(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    // Die quietly when the downstream pipe closes, like every other filter.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("opthy: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::input(format!("malformed JSON in {}: {e}", path.display())))
}

impl TheoryInput {
    /// Loads the theory; file-backed documents that parse but fail
    /// validation are property violations (exit 1).
    fn load(&self) -> Result<OperationalTheory, Failure> {
        match (&self.builtin, &self.theory) {
            (Some(name), None) => fixtures::theory(name)
                .ok_or_else(|| Failure::input(format!("unknown fixture `{name}`"))),
            (None, Some(path)) => {
                let doc: TheoryDoc = read_json(path)?;
                doc_to_theory(&doc).map_err(|e| Failure::violation(format!("invalid theory: {e}")))
            }
            _ => Err(Failure::input("pass exactly one of --builtin or --theory")),
        }
    }
}

fn load_model_pair(
    builtin: &Option<String>,
    theory: &Option<PathBuf>,
    model: &Option<PathBuf>,
) -> Result<OntologicalModel, Failure> {
    match (builtin, theory, model) {
        (Some(name), None, None) => fixtures::model(name)
            .ok_or_else(|| Failure::input(format!("no built-in model for fixture `{name}`"))),
        (None, Some(tp), Some(mp)) => {
            let tdoc: TheoryDoc = read_json(tp)?;
            let theory = doc_to_theory(&tdoc)
                .map_err(|e| Failure::violation(format!("invalid theory: {e}")))?;
            let mdoc: ModelDoc = read_json(mp)?;
            doc_to_model(&mdoc, &theory)
                .map_err(|e| Failure::violation(format!("invalid model: {e}")))
        }
        _ => Err(Failure::input(
            "pass --builtin NAME, or both --theory FILE and --model FILE",
        )),
    }
}

fn forbid_dot(format: Format) -> Result<(), Failure> {
    if format == Format::Dot {
        return Err(Failure::input("this subcommand has no DOT form"));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate {
            input,
            model,
            format,
        } => validate(input, model, format),
        Command::Report { input, format } => report(input, format),
        Command::Chsh { input, format } => chsh_cmd(input, format),
        Command::Trivialize { input, format } => trivialize_cmd(input, format),
        Command::ModelCheck {
            builtin,
            theory,
            model,
            expect,
            format,
        } => model_check(builtin, theory, model, expect, format),
        Command::Causal { command } => match command {
            CausalCommand::Cis {
                builtin,
                theory,
                model,
                format,
            } => causal_cis(builtin, theory, model, format),
            CausalCommand::Dags {
                builtin,
                theory,
                model,
                format,
            } => causal_dags(builtin, theory, model, format),
            CausalCommand::Probe {
                builtin,
                trials,
                seed,
                format,
            } => causal_probe(builtin, trials, seed, format),
        },
        Command::Graph {
            input,
            line,
            annotated,
            format,
        } => graph_cmd(input, line, annotated, format),
        Command::QuantumVerify { format } => quantum_verify(format),
    }
}

#[derive(Serialize)]
struct ValidatedDoc {
    theory: TheoryDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<ModelDoc>,
}

fn validate(input: TheoryInput, model: Option<PathBuf>, format: Format) -> Result<(), Failure> {
    forbid_dot(format)?;
    let theory = input.load()?;
    let model = match model {
        Some(path) => {
            let doc: ModelDoc = read_json(&path)?;
            Some(
                doc_to_model(&doc, &theory)
                    .map_err(|e| Failure::violation(format!("invalid model: {e}")))?,
            )
        }
        None => None,
    };
    match format {
        Format::Json => {
            let doc = ValidatedDoc {
                theory: theory_to_doc(&theory),
                model: model.as_ref().map(model_to_doc),
            };
            print!("{}", to_json_string(&doc));
        }
        _ => {
            println!("theory `{}`: valid", theory.name());
            if let Some(m) = &model {
                println!("model `{}`: valid", m.name());
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ReportDoc {
    theory: TheoryDoc,
    trivial: bool,
    contexts: Vec<Vec<String>>,
    non_disturbing: bool,
    violations: Vec<String>,
    /// Groups of operationally equivalent measurements/views (size ≥ 2).
    equivalence_classes: Vec<Vec<String>>,
}

fn equivalence_classes(theory: &OperationalTheory) -> Vec<Vec<String>> {
    let universe = theory.measurement_views();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    'outer: for (i, m) in universe.iter().enumerate() {
        let space = theory.outcome_space(m).expect("valid view").len();
        for class in &mut classes {
            let rep = &universe[class[0]];
            if theory.outcome_space(rep).expect("valid view").len() == space
                && theory
                    .are_operationally_equivalent(rep, m, None)
                    .expect("equal cardinality")
            {
                class.push(i);
                continue 'outer;
            }
        }
        classes.push(vec![i]);
    }
    classes
        .into_iter()
        .filter(|c| c.len() >= 2)
        .map(|c| c.into_iter().map(|i| universe[i].to_string()).collect())
        .collect()
}

fn report(input: TheoryInput, format: Format) -> Result<(), Failure> {
    forbid_dot(format)?;
    let theory = input.load()?;
    let nd = theory.non_disturbance();
    let classes = equivalence_classes(&theory);
    match format {
        Format::Json => {
            let doc = ReportDoc {
                theory: theory_to_doc(&theory),
                trivial: theory.is_trivial(),
                contexts: theory
                    .contexts()
                    .iter()
                    .map(|c| c.iter().cloned().collect())
                    .collect(),
                non_disturbing: nd.holds(),
                violations: nd
                    .violations
                    .iter()
                    .map(|v| format!("({}, {}, {})", v.measurement, v.conjunction, v.preparation))
                    .collect(),
                equivalence_classes: classes,
            };
            print!("{}", to_json_string(&doc));
        }
        _ => {
            print!("{}", render::theory_summary(&theory));
            print!("{}", render::non_disturbance_text(&nd));
            println!("operationally equivalent groups (measurements and views):");
            if classes.is_empty() {
                println!("  (none)");
            }
            for class in classes {
                println!("  {}", class.join(" ~ "));
            }
            print!("{}", render::tables_text(&theory));
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ChshDoc {
    preparation: String,
    correlators: BTreeMap<String, String>,
    value: String,
    class: String,
}

fn chsh_cmd(input: TheoryInput, format: Format) -> Result<(), Failure> {
    forbid_dot(format)?;
    let theory = input.load()?;
    // Standard labels when present; otherwise a two-party reading of the
    // theory with two options per side.
    let (a, b) = if theory.basic("A0").is_some() {
        (
            ["A0".to_string(), "A1".to_string()],
            ["B0".to_string(), "B1".to_string()],
        )
    } else {
        let scenario = Scenario::infer(&theory)
            .map_err(|e| Failure::input(format!("CHSH needs a two-party theory: {e}")))?;
        if scenario.choices.len() != 2 || scenario.choices.iter().any(|c| c.options.len() != 2) {
            return Err(Failure::input("CHSH needs two settings per party"));
        }
        let mut opts = scenario.choices.into_iter().map(|c| c.options);
        let a: Vec<String> = opts.next().unwrap();
        let b: Vec<String> = opts.next().unwrap();
        ([a[0].clone(), a[1].clone()], [b[0].clone(), b[1].clone()])
    };
    let mut docs = Vec::new();
    for prep in theory.preparations() {
        let report = chsh_with(
            &theory,
            [a[0].as_str(), a[1].as_str()],
            [b[0].as_str(), b[1].as_str()],
            prep,
        )
        .map_err(|e| Failure::input(e.to_string()))?;
        match format {
            Format::Json => {
                let [c00, c01, c10, c11] = &report.correlators;
                docs.push(ChshDoc {
                    preparation: prep.clone(),
                    correlators: [
                        (format!("{},{}", a[0], b[0]), c00.to_string()),
                        (format!("{},{}", a[0], b[1]), c01.to_string()),
                        (format!("{},{}", a[1], b[0]), c10.to_string()),
                        (format!("{},{}", a[1], b[1]), c11.to_string()),
                    ]
                    .into_iter()
                    .collect(),
                    value: report.value.to_string(),
                    class: report.class.to_string(),
                });
            }
            _ => {
                println!("preparation {prep}:");
                print!("{}", render::chsh_text(&report));
            }
        }
    }
    if format == Format::Json {
        print!("{}", to_json_string(&docs));
    }
    Ok(())
}

#[derive(Serialize)]
struct TrivializeDoc {
    theory: TheoryDoc,
    map: opthy::doc::MapDoc,
}

fn trivialize_cmd(input: TheoryInput, format: Format) -> Result<(), Failure> {
    forbid_dot(format)?;
    let theory = input.load()?;
    let (out, map) = trivialize(&theory).map_err(|e| Failure::input(e.to_string()))?;
    match format {
        Format::Json => {
            let doc = TrivializeDoc {
                theory: theory_to_doc(&out),
                map: map_to_doc(&map),
            };
            print!("{}", to_json_string(&doc));
        }
        _ => {
            print!("{}", render::theory_summary(&out));
            for (ctx, label) in map.new_basics() {
                let members: Vec<&str> = ctx.iter().map(String::as_str).collect();
                println!("new basic {label} replaces {{{}}}", members.join(","));
            }
            for (old, views) in map.views() {
                let shown: Vec<String> = views.iter().map(|v| v.to_string()).collect();
                println!("{old} ~ {}", shown.join(" ~ "));
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ModelCheckDoc {
    deterministic: bool,
    simultaneous_noncontextual: bool,
    measurement_noncontextual: bool,
    recovery_exact: bool,
    simultaneous_witnesses: Vec<String>,
    measurement_witnesses: Vec<String>,
}

fn model_check(
    builtin: Option<String>,
    theory: Option<PathBuf>,
    model: Option<PathBuf>,
    expect: Vec<Expectation>,
    format: Format,
) -> Result<(), Failure> {
    forbid_dot(format)?;
    let model = load_model_pair(&builtin, &theory, &model)?;
    let deterministic = model.is_outcome_deterministic();
    let sim = model
        .simultaneous_noncontextuality()
        .map_err(|e| Failure::input(e.to_string()))?;
    let meas = model
        .measurement_noncontextuality()
        .map_err(|e| Failure::input(e.to_string()))?;
    let recovery = model
        .recovery_is_exact()
        .map_err(|e| Failure::input(e.to_string()))?;

    match format {
        Format::Json => {
            let doc = ModelCheckDoc {
                deterministic,
                simultaneous_noncontextual: sim.noncontextual(),
                measurement_noncontextual: meas.noncontextual(),
                recovery_exact: recovery,
                simultaneous_witnesses: sim.witnesses.iter().map(|w| w.to_string()).collect(),
                measurement_witnesses: meas.witnesses.iter().map(|w| w.to_string()).collect(),
            };
            print!("{}", to_json_string(&doc));
        }
        _ => {
            println!(
                "outcome-deterministic: {}",
                render::verdict(deterministic, "yes", "no")
            );
            print!("{}", render::contextuality_text("simultaneous", &sim));
            print!("{}", render::contextuality_text("measurement", &meas));
            println!(
                "recovers operational tables exactly: {}",
                render::verdict(recovery, "yes", "no")
            );
        }
    }

    for e in expect {
        let (ok, what) = match e {
            Expectation::Deterministic => (deterministic, "deterministic"),
            Expectation::SimultaneousNoncontextual => {
                (sim.noncontextual(), "simultaneous-noncontextual")
            }
            Expectation::MeasurementNoncontextual => {
                (meas.noncontextual(), "measurement-noncontextual")
            }
            Expectation::Noncontextual => {
                (sim.noncontextual() && meas.noncontextual(), "noncontextual")
            }
            Expectation::Recovery => (recovery, "recovery"),
        };
        if !ok {
            return Err(Failure::violation(format!(
                "expected property `{what}` does not hold"
            )));
        }
    }
    Ok(())
}

/// The model's scenario joint under uniform priors, for its sole
/// preparation.
fn scenario_joint(
    model: &OntologicalModel,
) -> Result<(Scenario, opthy_core::causal::JointDistribution), Failure> {
    let scenario = Scenario::infer(model.theory()).map_err(|e| Failure::input(e.to_string()))?;
    let preps = model.theory().preparations();
    if preps.len() != 1 {
        return Err(Failure::input(
            "causal analysis needs a single-preparation theory",
        ));
    }
    let priors = uniform_choice_priors(&scenario);
    let joint = joint_from_model(model, &scenario, &priors, &preps[0])
        .map_err(|e| Failure::input(e.to_string()))?;
    Ok((scenario, joint))
}

#[derive(Serialize)]
struct CiDoc {
    lhs: String,
    rhs: Vec<String>,
    given: Vec<String>,
}

impl From<&CiStatement> for CiDoc {
    fn from(s: &CiStatement) -> Self {
        CiDoc {
            lhs: s.lhs.clone(),
            rhs: s.rhs.iter().cloned().collect(),
            given: s.given.iter().cloned().collect(),
        }
    }
}

fn causal_cis(
    builtin: Option<String>,
    theory: Option<PathBuf>,
    model: Option<PathBuf>,
    format: Format,
) -> Result<(), Failure> {
    forbid_dot(format)?;
    let model = load_model_pair(&builtin, &theory, &model)?;
    let (_, joint) = scenario_joint(&model)?;
    let report = joint.ci_report();
    match format {
        Format::Json => {
            let docs: Vec<CiDoc> = report.iter().map(CiDoc::from).collect();
            print!("{}", to_json_string(&docs));
        }
        _ => {
            for stmt in &report {
                println!("{stmt}");
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct DagDoc {
    edges: Vec<[String; 2]>,
}

fn causal_dags(
    builtin: Option<String>,
    theory: Option<PathBuf>,
    model: Option<PathBuf>,
    format: Format,
) -> Result<(), Failure> {
    let model = load_model_pair(&builtin, &theory, &model)?;
    let (scenario, joint) = scenario_joint(&model)?;
    let observed = joint.ci_report();
    let required = mutual_independence_family(&scenario.exogenous_names());
    let names = joint.space().names();
    let dags =
        minimal_dags(&observed, &required, &names).map_err(|e| Failure::input(e.to_string()))?;
    match format {
        Format::Json => {
            let docs: Vec<DagDoc> = dags
                .iter()
                .map(|d| DagDoc {
                    edges: d
                        .edges()
                        .map(|(a, b)| [a.to_string(), b.to_string()])
                        .collect(),
                })
                .collect();
            print!("{}", to_json_string(&docs));
        }
        Format::Dot => {
            for (i, dag) in dags.iter().enumerate() {
                print!("{}", dag.to_dot(&format!("minimal{i}")));
            }
        }
        Format::Text => {
            println!("{} minimal DAG(s)", dags.len());
            for dag in &dags {
                let edges: Vec<String> = dag.edges().map(|(a, b)| format!("{a}→{b}")).collect();
                println!("  [{}]", edges.join(", "));
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ProbeDoc {
    graph: Vec<[String; 2]>,
    verdict: String,
    trials: u32,
    seed: u64,
    tolerance: f64,
    failure_rates: BTreeMap<String, f64>,
}

/// The causal graph probed for each fixture: the left Bell graph for the
/// classical theory, the right one (extra A→Y edge) for EPR and PR, and the
/// collider C→Z←Λ for the trivial twins.
fn fixture_graph_and_reference(
    name: &str,
    scenario: &Scenario,
    space: &opthy_core::causal::VariableSpace,
) -> Result<(Dag, Vec<CiStatement>), Failure> {
    let two_party = scenario.choices.len() == 2;
    if two_party {
        let mut edges = vec![("A", "X"), ("L", "X"), ("L", "Y"), ("B", "Y")];
        if name != "classical" {
            edges.push(("A", "Y"));
        }
        let dag = Dag::new(space.names(), edges).map_err(|e| Failure::input(e.to_string()))?;
        let ci = |l: &str, r: &[&str], g: &[&str]| {
            CiStatement::new(l, r.iter().copied(), g.iter().copied())
                .expect("well-formed")
                .canonical()
        };
        let mut reference = vec![
            ci("X", &["B"], &["A"]),
            ci("Y", &["A"], &["B"]),
            ci("X", &["Y"], &["A", "L"]),
            ci("Y", &["X"], &["B", "L"]),
            ci("X", &["B"], &["A", "L"]),
            ci("Y", &["A"], &["B", "L"]),
        ];
        reference.extend(mutual_independence_family(&["A", "B", "L"]));
        Ok((dag, reference))
    } else {
        let dag = Dag::new(space.names(), [("C", "Z"), ("L", "Z")])
            .map_err(|e| Failure::input(e.to_string()))?;
        Ok((dag, mutual_independence_family(&["C", "L"])))
    }
}

fn causal_probe(builtin: String, trials: u32, seed: u64, format: Format) -> Result<(), Failure> {
    forbid_dot(format)?;
    let model = fixtures::model(&builtin)
        .ok_or_else(|| Failure::input(format!("no built-in model for fixture `{builtin}`")))?;
    let scenario = Scenario::infer(model.theory()).map_err(|e| Failure::input(e.to_string()))?;
    let space = scenario
        .variable_space(&model)
        .map_err(|e| Failure::input(e.to_string()))?;
    let (dag, reference) = fixture_graph_and_reference(&builtin, &scenario, &space)?;
    let report = faithfulness_probe(&dag, &space, &reference, trials, seed)
        .map_err(|e| Failure::input(e.to_string()))?;
    match format {
        Format::Json => {
            let doc = ProbeDoc {
                graph: dag
                    .edges()
                    .map(|(a, b)| [a.to_string(), b.to_string()])
                    .collect(),
                verdict: report.verdict.to_string(),
                trials: report.trials,
                seed: report.seed,
                tolerance: report.tolerance,
                failure_rates: report
                    .failures
                    .iter()
                    .map(|(s, n)| (s.to_string(), *n as f64 / report.trials as f64))
                    .collect(),
            };
            print!("{}", to_json_string(&doc));
        }
        _ => {
            let edges: Vec<String> = dag.edges().map(|(a, b)| format!("{a}→{b}")).collect();
            println!("graph: [{}]", edges.join(", "));
            println!("trials: {} (seed {})", report.trials, report.seed);
            for (stmt, count) in &report.failures {
                println!(
                    "{stmt}: failed {count}/{} ({:.1}%)",
                    report.trials,
                    100.0 * *count as f64 / report.trials as f64
                );
            }
            let ok = report.verdict == FaithfulnessVerdict::Faithful;
            println!("verdict: {}", render::verdict(ok, "Faithful", "FineTuned"));
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct GraphDoc {
    vertices: Vec<String>,
    hyperedges: Vec<Vec<String>>,
    style: String,
}

fn graph_cmd(
    input: TheoryInput,
    line: bool,
    annotated: bool,
    format: Format,
) -> Result<(), Failure> {
    let (name, base): (String, Hypergraph) = match (&input.builtin, &input.theory) {
        (Some(name), None) => {
            let g = fixtures::graph(name)
                .ok_or_else(|| Failure::input(format!("unknown fixture `{name}`")))?;
            (name.clone(), g)
        }
        (None, Some(_)) => {
            let theory = input.load()?;
            let g = opthy_core::graph::from_theory(&theory);
            (theory.name().to_string(), g)
        }
        _ => return Err(Failure::input("pass exactly one of --builtin or --theory")),
    };
    let (name, graph) = if annotated {
        let theory = match &input.builtin {
            Some(n) => fixtures::theory(n).ok_or_else(|| {
                Failure::input(format!(
                    "fixture `{n}` has no probability tables to trivialize"
                ))
            })?,
            None => input.load()?,
        };
        let (_, map) = trivialize(&theory).map_err(|e| Failure::input(e.to_string()))?;
        (format!("{name}-annotated"), annotated_trivial_graph(&map))
    } else if line {
        (format!("{name}-line"), base.line_graph())
    } else {
        (name, base)
    };
    match format {
        Format::Dot => print!("{}", graph.to_dot(&name)),
        Format::Json => {
            let doc = GraphDoc {
                vertices: graph.vertices.clone(),
                hyperedges: graph
                    .hyperedges
                    .iter()
                    .map(|e| e.iter().cloned().collect())
                    .collect(),
                style: match graph.edge_style {
                    opthy_core::graph::EdgeStyle::Compatibility => "compatibility".into(),
                    opthy_core::graph::EdgeStyle::SharedMarginal => "shared-marginal".into(),
                },
            };
            print!("{}", to_json_string(&doc));
        }
        Format::Text => {
            println!(
                "graph {name}: {} vertices, {} (hyper)edges",
                graph.vertex_count(),
                graph.edge_count()
            );
            for e in &graph.hyperedges {
                let members: Vec<&str> = e.iter().map(String::as_str).collect();
                println!("  {{{}}}", members.join(","));
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct QuantumDoc {
    passes: bool,
    max_deviation: f64,
    tolerance: f64,
    cells: Vec<QuantumCellDoc>,
}

#[derive(Serialize)]
struct QuantumCellDoc {
    label: String,
    born: f64,
    expected: f64,
}

fn quantum_verify(format: Format) -> Result<(), Failure> {
    forbid_dot(format)?;
    let report = verify_epr_realization();
    match format {
        Format::Json => {
            let doc = QuantumDoc {
                passes: report.passes(),
                max_deviation: report.max_deviation,
                tolerance: report.tolerance,
                cells: report
                    .cells
                    .iter()
                    .map(|c| QuantumCellDoc {
                        label: c.label.clone(),
                        born: c.born,
                        expected: c.expected,
                    })
                    .collect(),
            };
            print!("{}", to_json_string(&doc));
        }
        _ => {
            for cell in &report.cells {
                println!(
                    "{} = {:.12} (expected {:.12})",
                    cell.label, cell.born, cell.expected
                );
            }
            println!("max deviation: {:e}", report.max_deviation);
            println!(
                "verdict: {}",
                render::verdict(report.passes(), "pass", "fail")
            );
        }
    }
    if report.passes() {
        Ok(())
    } else {
        Err(Failure::violation(format!(
            "Born values deviate by {:e} (tolerance {:e})",
            report.max_deviation, report.tolerance
        )))
    }
}
