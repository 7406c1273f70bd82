//! The `agency-audit` command line: argument types, config-file layering and
//! one function per subcommand.

mod args;
mod commands;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde::Serialize;
use thiserror::Error;

pub use args::{AuditArgs, BackendCheckArgs, Cli, Command, EvalArgs, KappaArgs, MergeArgs, SplitArgs, SynthArgs};
pub use commands::{cmd_audit, cmd_backend_check, cmd_eval, cmd_kappa, cmd_merge, cmd_split, cmd_synth};

use args::Overlay;

use crate::classify::{ClassifyError, EvalError};
use crate::corpus::CorpusError;
use crate::lacbuild::LacError;
use crate::metrics::MetricsError;
use crate::stats::StatsError;

pub const CACHE_DIR_ENV: &str = "AGENCY_AUDIT_CACHE_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("missing required option {0}")]
    Missing(&'static str),
    #[error("invalid {flag}: {message}")]
    Invalid { flag: &'static str, message: String },
    #[error("config {}: {message}", path.display())]
    Config { path: PathBuf, message: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}:{line}: {message}", path.display())]
    Parse { path: PathBuf, line: usize, message: String },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Lac(#[from] LacError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

impl CliError {
    pub(crate) fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
        move |source| CliError::Io { path: path.to_path_buf(), source }
    }
}

/// The effective settings of one invocation, after flags and config file have
/// been combined. Audit reports carry it in their provenance block.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub config_file: Option<PathBuf>,
    pub inputs: BTreeMap<String, String>,
    pub backend: Option<String>,
    pub group_attrs: Vec<String>,
    pub strata_attrs: Vec<String>,
    pub options: BTreeMap<String, String>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Flattened `key -> value` view. The output location is left out so a
    /// report does not change when written somewhere else.
    pub fn provenance(&self) -> BTreeMap<String, String> {
        let mut p = BTreeMap::from([("subcommand".to_string(), self.subcommand.clone())]);
        if let Some(c) = &self.config_file {
            p.insert("config_file".into(), c.display().to_string());
        }
        if let Some(b) = &self.backend {
            p.insert("backend".into(), b.clone());
        }
        for (k, v) in &self.inputs {
            p.insert(format!("input.{k}"), v.clone());
        }
        for (k, v) in &self.options {
            p.insert(format!("option.{k}"), v.clone());
        }
        p
    }
}

/// What a subcommand prints, and the process exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub lines: Vec<String>,
    pub status: i32,
}

impl Outcome {
    pub(crate) fn ok(lines: Vec<String>) -> Self {
        Outcome { lines, status: 0 }
    }
}

const SECTIONS: [&str; 7] = ["audit", "eval", "synth", "merge", "split", "kappa", "backend-check"];

fn load_section<T: serde::de::DeserializeOwned + Default>(path: Option<&Path>, section: &str) -> Result<T, CliError> {
    let Some(path) = path else { return Ok(T::default()) };
    let config = |message: String| CliError::Config { path: path.to_path_buf(), message };
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| config(e.to_string()))?;
    if let Some(unknown) = table.keys().find(|k| !SECTIONS.contains(&k.as_str())) {
        return Err(config(format!("unknown section [{unknown}]")));
    }
    match table.get(section) {
        None => Ok(T::default()),
        Some(v) => v.clone().try_into().map_err(|e: toml::de::Error| config(format!("[{section}] {e}"))),
    }
}

fn layered<T: serde::de::DeserializeOwned + Default + Overlay>(
    flags: T,
    config: Option<&Path>,
    section: &str,
) -> Result<T, CliError> {
    Ok(flags.overlay(load_section(config, section)?))
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    let config = cli.config.as_deref();
    let name = cli.command.name();
    match cli.command {
        Command::Audit(a) => cmd_audit(&layered(a, config, name)?, config),
        Command::Eval(a) => cmd_eval(&layered(a, config, name)?),
        Command::Synth(a) => cmd_synth(&layered(a, config, name)?),
        Command::Merge(a) => cmd_merge(&layered(a, config, name)?),
        Command::Split(a) => cmd_split(&layered(a, config, name)?),
        Command::Kappa(a) => cmd_kappa(&layered(a, config, name)?),
        Command::BackendCheck(a) => cmd_backend_check(&layered(a, config, name)?),
    }
}

/// Parses `args`, runs the subcommand and prints its output. Returns the
/// process exit status: 0 on success, 1 on any error, 2 on bad usage.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(out) => {
            for l in &out.lines {
                println!("{l}");
            }
            out.status
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
