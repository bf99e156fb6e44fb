use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::Path;

use anyhow::{anyhow, Context};
use rulelens_core::explain::{explain, ExplainError, ExplainOptions, ExplanationKind};
use rulelens_core::fixtures::{list_fixtures, load_fixture};
use rulelens_core::kb::{parse_statement, parse_term, parse_triples_with_warnings, serialize_triples};
use rulelens_core::rules::{format_rule_file, parse_rule_file, RuleSet};
use rulelens_core::{infer_with, Graph, InferenceConfig, InferenceModel, LabelTable, Term};
use rulelens_service::AppState;
use tracing::warn;

use crate::args::{Cli, Command, Dump, FixturesAction, Kind, ModelSource};

pub enum Failure {
    Usage(anyhow::Error),
    Domain(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(err: anyhow::Error) -> Self {
        Failure::Domain(err)
    }
}

fn io(err: std::io::Error) -> Failure {
    Failure::Domain(anyhow!(err).context("writing output"))
}

pub fn run(cli: Cli, out: &mut impl Write) -> Result<(), Failure> {
    let config = InferenceConfig { max_inferred: cli.max_inferred.unwrap_or(rulelens_core::DEFAULT_MAX_INFERRED) };
    match cli.command {
        Command::Reason { source, dump } => reason(&source, dump, config, out),
        Command::Explain { source, kind, statement, against, alt_facts, desired } => {
            let request = ExplainRequest { kind, statement, against, alt_facts: alt_facts.as_deref(), desired };
            explain_command(&source, request, config, out)
        }
        Command::Fixtures { action: FixturesAction::List } => {
            for m in list_fixtures() {
                writeln!(out, "{}\t{}", m.id, m.title).map_err(io)?;
            }
            Ok(())
        }
        Command::Serve { port, host, fixtures_dir } => serve(&host, port, fixtures_dir.as_deref(), config),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display())).map_err(Failure::Domain)
}

fn parse_facts(path: &Path) -> Result<Graph, Failure> {
    let parsed = parse_triples_with_warnings(&read(path)?).with_context(|| path.display().to_string())?;
    for w in &parsed.warnings {
        warn!("{}:{}: {}", path.display(), w.line, w.message);
    }
    Ok(parsed.graph)
}

fn load_source(source: &ModelSource) -> Result<(Graph, RuleSet), Failure> {
    match (&source.fixture, &source.facts, &source.rules) {
        (Some(id), _, _) => {
            let fixture = load_fixture(id).map_err(|e| Failure::Usage(e.into()))?;
            let rules = fixture.rule_set();
            Ok((fixture.graph, rules))
        }
        (None, Some(facts), Some(rules)) => {
            let graph = parse_facts(facts)?;
            let rules = parse_rule_file(&read(rules)?).with_context(|| rules.display().to_string())?;
            Ok((graph, rules))
        }
        _ => Err(Failure::Usage(anyhow!("give --fixture or both --facts and --rules"))),
    }
}

fn run_inference(graph: &Graph, rules: &RuleSet, config: InferenceConfig) -> Result<InferenceModel, Failure> {
    let model = infer_with(graph, &rules.rules, config).context("inference failed")?;
    for d in model.diagnostics() {
        warn!("{d}");
    }
    Ok(model)
}

fn reason(
    source: &ModelSource,
    dump: Option<Dump>,
    config: InferenceConfig,
    out: &mut impl Write,
) -> Result<(), Failure> {
    let (graph, rules) = load_source(source)?;
    let model = run_inference(&graph, &rules, config)?;
    let text = match dump {
        Some(Dump::Base) => serialize_triples(model.base()),
        Some(Dump::Inferred) => serialize_triples(model.inferred()),
        Some(Dump::Rules) => format_rule_file(&rules.prefixes, &rules.rules),
        None => format!(
            "base: {} statements\nrules: {}\ninferred: {} statements\ndiagnostics: {}\n",
            model.base().len(),
            model.rules().len(),
            model.inferred().len(),
            model.diagnostics().len()
        ),
    };
    out.write_all(text.as_bytes()).map_err(io)
}

struct ExplainRequest<'a> {
    kind: Kind,
    statement: String,
    against: Option<String>,
    alt_facts: Option<&'a Path>,
    desired: Option<String>,
}

fn explain_command(
    source: &ModelSource,
    request: ExplainRequest<'_>,
    config: InferenceConfig,
    out: &mut impl Write,
) -> Result<(), Failure> {
    let (graph, rules) = load_source(source)?;
    let model = run_inference(&graph, &rules, config)?;
    let prefixes = model.base().prefixes();

    let statement = parse_statement(&request.statement, prefixes)
        .map_err(|e| Failure::Usage(anyhow!("invalid --statement: {e}")))?;
    let against = match &request.against {
        Some(text) => {
            match parse_term(text, prefixes).map_err(|e| Failure::Usage(anyhow!("invalid --against: {e}")))? {
                Term::Iri(iri) => Some(iri),
                other => return Err(Failure::Usage(anyhow!("--against must name a subject, not {other}"))),
            }
        }
        None => None,
    };
    let alt_model = match request.alt_facts {
        Some(path) => Some(run_inference(&parse_facts(path)?, &rules, config)?),
        None => None,
    };
    let desired = request.desired.as_deref().map(|d| parse_term(d, prefixes).unwrap_or_else(|_| Term::string(d)));

    let kind = match request.kind {
        Kind::Trace => ExplanationKind::Trace,
        Kind::Contextual => ExplanationKind::Contextual,
        Kind::Contrastive => ExplanationKind::Contrastive,
        Kind::Counterfactual => ExplanationKind::Counterfactual,
    };
    let options =
        ExplainOptions { against: against.as_ref(), alt_model: alt_model.as_ref(), desired: desired.as_ref() };
    let labels = LabelTable::for_graph(model.base());
    match explain(&model, &statement, kind, options) {
        Ok(explanation) => writeln!(out, "{}", explanation.render(&labels)).map_err(io),
        Err(ExplainError::MissingOption(option)) => Err(Failure::Usage(anyhow!(
            "{kind} explanations need {}",
            match option {
                "desired" => "--desired",
                _ => "--against or --alt-facts",
            }
        ))),
        Err(ExplainError::ValidationFailed(c)) => {
            writeln!(out, "{}", rulelens_core::explain::render_counterfactual(&c, &labels)).map_err(io)?;
            Err(Failure::Domain(ExplainError::ValidationFailed(c).into()))
        }
        Err(err) => Err(Failure::Domain(err.into())),
    }
}

fn serve(host: &str, port: u16, fixtures_dir: Option<&Path>, config: InferenceConfig) -> Result<(), Failure> {
    let addr: SocketAddr =
        format!("{host}:{port}").parse().map_err(|e| Failure::Usage(anyhow!("invalid address {host}:{port}: {e}")))?;
    let state = match fixtures_dir {
        Some(dir) => AppState::with_fixtures_dir(dir, config),
        None => AppState::with_builtin_fixtures(config),
    }
    .context("loading fixtures")?;
    let runtime = tokio::runtime::Runtime::new().context("starting runtime")?;
    runtime.block_on(rulelens_service::serve(addr, state)).context("server failed")?;
    Ok(())
}
