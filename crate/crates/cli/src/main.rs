//! `qtorb`: orbifold invariants of quasitoric models from the command line.
//!
//! Exit codes: 0 success, 1 validation failure, 2 usage error,
//! 3 internal invariant violation.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod render;

use render::Report;

#[derive(Parser, Debug)]
#[command(name = "qtorb", version, about = "Chen-Ruan invariants and blowups of quasitoric orbifolds")]
struct Cli {
    /// Emit a machine-readable JSON report instead of the human table.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the model file and report every violated invariant.
    Validate { model: PathBuf },
    /// Local group orders, orientation signs and the manifold flag.
    Info { model: PathBuf },
    /// Twisted sectors with their ages.
    Sectors { model: PathBuf },
    /// Chen-Ruan Betti table.
    Betti { model: PathBuf },
    /// Euler number, computed from sectors and from vertex orders.
    Euler { model: PathBuf },
    /// Whether every twisted sector has integral age.
    QuasiSl { model: PathBuf },
    /// Blow up along a face; writes the new model to --out or stdout.
    Blowup {
        model: PathBuf,
        /// Comma-separated facet names, e.g. F1,F5.
        #[arg(long)]
        face: String,
        /// Comma-separated integers.
        #[arg(long, allow_hyphen_values = true)]
        lambda0: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Primitive age-one interior box elements of a face.
    CrepantCandidates {
        model: PathBuf,
        #[arg(long)]
        face: String,
    },
    /// Compare Euler numbers and Betti tables before and after a blowup.
    Mckay {
        model: PathBuf,
        #[arg(long)]
        face: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda0: String,
    },
    /// Blow up repeatedly until the model is a manifold.
    Resolve {
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Product skeleton of two sectors, each written FACE:POINT (e.g. F1,F5:1,1,1,1 or P).
    Product {
        model: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        s1: String,
        #[arg(long, allow_hyphen_values = true)]
        s2: String,
    },
    /// Product skeleton for every pair of sectors.
    ProductTable { model: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let report: Report = commands::run(cli.command);
    report.emit(cli.json)
}
