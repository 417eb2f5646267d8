//! Command-line front end.
//!
//! `decide` runs the whole pipeline and prints a certificate; `census`,
//! `similar` and `embed` expose the model tooling. `check` re-runs a saved
//! certificate.

mod certificate;
mod tools;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use certificate::{cmd_decide, Certificate, Syntax, CERTIFICATE_SCHEMA};
pub use tools::{cmd_census, cmd_embed, cmd_similar, parse_param};

use crate::colouring::ColourError;
use crate::engine::{Backend, DecideOptions, EngineError, Outcome};
use crate::formula::ParseError;
use crate::model::{EmbedError, ModelError};
use crate::stratification::DecorateError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Decorate(#[from] DecorateError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Colour(#[from] ColourError),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Mismatch(String),
}

/// Process exit status.
pub mod exit {
    pub const DECIDED: i32 = 0;
    pub const ERROR: i32 = 1;
    pub const OUTSIDE: i32 = 2;
    pub const INFEASIBLE: i32 = 3;
}

#[derive(Debug, Parser)]
#[command(name = "tst-decide", version, about = "Decide forall-exists sentences of typed set theory and stratified NF")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide a sentence.
    Decide {
        formula: String,
        /// Untyped input, stratified before deciding.
        #[arg(long, conflicts_with = "typed")]
        nf: bool,
        /// Typed input (`x:1`). Detected from the text when neither flag is set.
        #[arg(long)]
        typed: bool,
        /// Atom count for concrete evaluation.
        #[arg(long)]
        atoms: Option<u64>,
        #[arg(long, value_enum, default_value = "both")]
        backend: Backend,
        /// Print the certificate as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Colour census of one level.
    Census {
        #[arg(short = 'm')]
        m: u32,
        #[arg(short = 'l')]
        level: u32,
    },
    /// Compare two models' colourings for J-similarity.
    Similar {
        #[arg(long = "m1")]
        m1: u32,
        #[arg(long = "m2")]
        m2: u32,
        #[arg(short = 'l')]
        level: u32,
        #[arg(short = 'J')]
        j: u64,
    },
    /// Embed a small model into a larger one over fixed parameters.
    Embed {
        #[arg(short = 's')]
        small: u32,
        #[arg(short = 't')]
        big: u32,
        /// `empty:N`, `full:N`, `atom:I`, `rank:N:R` or `set:N:i,j,..`.
        #[arg(long = "param")]
        params: Vec<String>,
        /// Highest level to construct.
        #[arg(short = 'l', default_value_t = 2)]
        level: u32,
    },
    /// Re-run a JSON certificate and compare.
    Check { certificate: PathBuf },
}

/// Rewrites `-m1`/`-m2` to their long forms; clap short flags are one
/// character.
pub fn normalize_args<I: IntoIterator<Item = String>>(args: I) -> Vec<String> {
    args.into_iter()
        .map(|a| match a.as_str() {
            "-m1" => "--m1".to_string(),
            "-m2" => "--m2".to_string(),
            _ => a,
        })
        .collect()
}

fn outcome_code(o: Outcome) -> i32 {
    match o {
        Outcome::ProvableInTSTI | Outcome::RefutableInTSTI => exit::DECIDED,
        Outcome::OutsideFragment => exit::OUTSIDE,
        Outcome::Infeasible => exit::INFEASIBLE,
    }
}

/// Runs one command, returning its output and exit status.
pub fn run(cli: Cli) -> Result<(String, i32), CliError> {
    match cli.command {
        Command::Decide { formula, nf, typed, atoms, backend, json } => {
            let syntax = match (nf, typed) {
                (true, _) => Syntax::Nf,
                (_, true) => Syntax::Typed,
                _ => Syntax::detect(&formula),
            };
            let opts = DecideOptions { backend, atoms, ..DecideOptions::default() };
            let cert = cmd_decide(&formula, syntax, &opts)?;
            let text = if json { cert.to_json() + "\n" } else { cert.render() };
            Ok((text, outcome_code(cert.verdict)))
        }
        Command::Census { m, level } => Ok((cmd_census(m, level)?, exit::DECIDED)),
        Command::Similar { m1, m2, level, j } => Ok((cmd_similar(m1, m2, level, j)?.1, exit::DECIDED)),
        Command::Embed { small, big, params, level } => Ok((cmd_embed(small, big, &params, level)?, exit::DECIDED)),
        Command::Check { certificate } => {
            let cert = Certificate::from_json(&std::fs::read_to_string(certificate)?)?;
            cert.recheck()?;
            Ok((format!("certificate ok: {:?}\n", cert.verdict), outcome_code(cert.verdict)))
        }
    }
}
