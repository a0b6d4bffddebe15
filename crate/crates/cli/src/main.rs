//! `hurwitz`: command-line front end for hurwitz-core.

mod args;
mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hurwitz_core::braid::DEFAULT_STATE_BUDGET;
use output::{Format, Output};

#[derive(Parser, Debug)]
#[command(name = "hurwitz", version, about = "Component-level combinatorics of Hurwitz spaces")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct Global {
    /// Worker threads for parallel enumeration (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: Option<u64>,
    /// State budget for enumerations and other guarded computations.
    #[arg(long, global = true, env = "HURWITZ_BUDGET", default_value_t = DEFAULT_STATE_BUDGET,
          value_parser = positive)]
    pub budget: usize,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// On domain errors, print `{"error": kind, "message": ...}` to stderr.
    #[arg(long, global = true)]
    pub error_json: bool,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Group summaries.
    #[command(subcommand)]
    Group(commands::GroupCmd),
    /// Rack validation and structure.
    #[command(subcommand)]
    Rack(commands::RackCmd),
    /// Braid-orbit catalogs and stable counts.
    #[command(subcommand)]
    Components(commands::ComponentsCmd),
    /// H_2(G) and H_2(G, c) by Smith normal form.
    H2(commands::H2Args),
    /// Frobenius action on components.
    #[command(subcommand)]
    Frobenius(commands::FrobeniusCmd),
    /// Malle exponents, tuple-count series and stable Picard predictions.
    #[command(subcommand)]
    Malle(commands::MalleCmd),
    /// Cohen-Lenstra-Martinet component comparison.
    #[command(subcommand)]
    Clm(commands::ClmCmd),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.global.workers {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w as usize).build_global();
    }
    let out = Output {
        format: cli.global.format,
        path: cli.global.out.clone(),
    };
    match commands::run(&cli.command, &cli.global, &out) {
        Ok(code) => code,
        Err(e) => {
            if cli.global.error_json {
                let v = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
                eprintln!("{}", serde_json::to_string(&v).expect("serializable"));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(1)
        }
    }
}
