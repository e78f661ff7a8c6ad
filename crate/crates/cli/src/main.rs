// SPDX-License-Identifier: Apache-2.0

//! `dedukt`: batch front end for deduction, model checking and satisfiability.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dedukt::Strategy;

/// Exit statuses shared by every command.
pub mod status {
    pub const YES: u8 = 0;
    pub const NO: u8 = 1;
    pub const UNKNOWN: u8 = 2;
    pub const USAGE: u8 = 64;
    pub const INPUT: u8 = 65;
    pub const INTERNAL: u8 = 70;
}

#[derive(Parser, Debug)]
#[command(name = "dedukt", version, about = "Deductive algorithmic knowledge toolkit")]
pub struct Cli {
    /// Emit one JSON document instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide whether a goal term follows from premises and print the deduction.
    Derive(DeriveArgs),
    /// Evaluate a formula at one state of a model.
    Check(CheckArgs),
    /// Validity in a model, or over all structures when no model is given.
    Valid(ValidArgs),
    /// Satisfiability over all structures, or with a fixed deductive system.
    Sat(SatArgs),
    /// List the axiom schemas for a deductive system.
    Axioms(AxiomsArgs),
    /// Negation normal form of a formula.
    Nnf(FormulaArgs),
    /// Translate between formulas and terms.
    Translate(TranslateArgs),
    /// List the bundled deductive systems, or print one.
    Presets(PresetsArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct SystemArgs {
    /// Bundled deductive system.
    #[arg(long, value_name = "NAME", conflicts_with = "system")]
    pub preset: Option<String>,
    /// Deductive system file.
    #[arg(long, value_name = "FILE")]
    pub system: Option<PathBuf>,
    /// Signature file with additional symbols.
    #[arg(long, value_name = "FILE")]
    pub sig: Option<PathBuf>,
    /// Number of agents; guessed from the formula when absent.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    pub agents: Option<u64>,
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse()
}

#[derive(Args, Debug)]
pub struct DeriveArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Comma-separated premise terms.
    #[arg(long, value_name = "TERMS", default_value = "")]
    pub from: String,
    /// Ground goal term.
    #[arg(long, value_name = "TERM")]
    pub goal: String,
    /// `local` or `bounded:N`.
    #[arg(long, value_parser = parse_strategy, default_value = "local")]
    pub strategy: Strategy,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Model file.
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,
    #[arg(long, value_name = "NAME")]
    pub state: String,
    #[arg(long, value_name = "STR")]
    pub formula: String,
    #[arg(long, value_parser = parse_strategy, default_value = "local")]
    pub strategy: Strategy,
}

#[derive(Args, Debug)]
pub struct ValidArgs {
    /// Model file; without one, validity is decided over all structures.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["preset", "system"])]
    pub model: Option<PathBuf>,
    #[arg(long, value_name = "STR")]
    pub formula: String,
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Args, Debug, Clone)]
pub struct SearchArgs {
    #[arg(long, value_parser = parse_strategy, default_value = "local")]
    pub strategy: Strategy,
    /// Largest observation set tried with a fixed system.
    #[arg(long, value_name = "N")]
    pub max_obs: Option<usize>,
    /// Comma-separated candidate observations with a fixed system.
    #[arg(long, value_name = "TERMS")]
    pub pool: Option<String>,
    /// Largest model tried for several agents.
    #[arg(long, value_name = "N", default_value_t = 3)]
    pub max_states: usize,
}

#[derive(Args, Debug)]
pub struct SatArgs {
    #[arg(long, value_name = "STR")]
    pub formula: String,
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Write the model found to this file.
    #[arg(long, value_name = "FILE")]
    pub witness: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AxiomsArgs {
    #[command(flatten)]
    pub system: SystemArgs,
}

#[derive(Args, Debug)]
pub struct FormulaArgs {
    #[arg(long, value_name = "STR")]
    pub formula: String,
    #[command(flatten)]
    pub system: SystemArgs,
}

#[derive(Args, Debug)]
pub struct TranslateArgs {
    /// Formula to encode as a term.
    #[arg(long, value_name = "STR", required_unless_present = "term", conflicts_with = "term")]
    pub formula: Option<String>,
    /// Term to decode as a formula.
    #[arg(long, value_name = "TERM")]
    pub term: Option<String>,
    /// Also print the propositional modal translation of the formula.
    #[arg(long, requires = "formula")]
    pub modal: bool,
    #[command(flatten)]
    pub system: SystemArgs,
}

#[derive(Args, Debug)]
pub struct PresetsArgs {
    /// Print this preset as a system file.
    pub name: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { status::USAGE } else { status::YES };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = report::Output::new(cli.json);
    let code = match commands::run(&cli.command, &out) {
        Ok(code) => code,
        Err(fail) => {
            eprintln!("dedukt: {}", fail.message);
            fail.code
        }
    };
    ExitCode::from(code)
}
