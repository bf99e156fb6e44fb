use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "rulelens", version, about = "Forward-chaining rule engine with explanations")]
pub struct Cli {
    /// Abort inference after this many inferred statements.
    #[arg(long, global = true, env = "RULELENS_MAX_INFERRED")]
    pub max_inferred: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run inference and print a summary or dump a part of the model.
    Reason {
        #[command(flatten)]
        source: ModelSource,
        /// Print base facts, inferred facts or rules in their file formats.
        #[arg(long, value_enum)]
        dump: Option<Dump>,
    },
    /// Explain one statement of a model.
    Explain {
        #[command(flatten)]
        source: ModelSource,
        #[arg(long = "type", value_enum)]
        kind: Kind,
        /// The statement in facts syntax, e.g. "ex:applicant1 ex:loanEligibility 'Not Eligible'".
        #[arg(long)]
        statement: String,
        /// Contrastive: subject to compare against, e.g. ex:applicant3.
        #[arg(long)]
        against: Option<String>,
        /// Contrastive: facts file for an alternate model run with the same rules.
        #[arg(long)]
        alt_facts: Option<PathBuf>,
        /// Counterfactual: the outcome value wanted.
        #[arg(long)]
        desired: Option<String>,
    },
    /// Inspect the bundled fixtures.
    Fixtures {
        #[command(subcommand)]
        action: FixturesAction,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Load fixtures from this directory instead of the bundled ones.
        #[arg(long)]
        fixtures_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum FixturesAction {
    /// Print `id<TAB>title` per fixture.
    List,
}

/// Where the model comes from: a bundled fixture or a facts/rules pair.
#[derive(Debug, Args)]
pub struct ModelSource {
    #[arg(long, conflicts_with_all = ["facts", "rules"], required_unless_present = "facts")]
    pub fixture: Option<String>,
    #[arg(long, requires = "rules")]
    pub facts: Option<PathBuf>,
    #[arg(long, requires = "facts")]
    pub rules: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Dump {
    Base,
    Inferred,
    Rules,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Trace,
    Contextual,
    Contrastive,
    Counterfactual,
}
