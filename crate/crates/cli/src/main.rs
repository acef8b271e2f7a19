//! `qicsim`: simulate protocols, sweep the AND family, run the seeded
//! property suites and evaluate discrepancy bounds.

mod commands;
mod error;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qic_core::linalg::Config;

use crate::table::Format;

#[derive(Parser, Debug)]
#[command(name = "qicsim", version, about = "Quantum information cost simulator")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

fn non_negative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("{v} is not a finite non-negative number")),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Seed for every random choice; echoed into output headers.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Largest density-matrix side the simulator may form.
    #[arg(long, global = true, default_value_t = 4096)]
    dim_cap: usize,
    #[arg(long, global = true, default_value_t = 1e-9, value_parser = non_negative)]
    tol_norm: f64,
    #[arg(long, global = true, default_value_t = 1e-9, value_parser = non_negative)]
    tol_herm: f64,
    #[arg(long, global = true, default_value_t = 1e-9, value_parser = non_negative)]
    tol_psd: f64,
    #[arg(long, global = true, default_value_t = 1e-9, value_parser = non_negative)]
    tol_iso: f64,
    /// Write here (plus a mirror in the other format) instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

impl Global {
    fn config(&self) -> Config {
        Config {
            tol_norm: self.tol_norm,
            tol_herm: self.tol_herm,
            tol_psd: self.tol_psd,
            tol_iso: self.tol_iso,
            dim_cap: self.dim_cap,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Builtin {
    /// The rotating-qubit AND protocol with `--r` ping-pong pairs.
    And,
    /// `--rounds` rounds of `--dim`-dimensional messages carrying nothing.
    Dummy,
    /// Alice sends her bit, Bob answers with AND.
    ClassicalAnd,
    /// Both parties output `--value` without talking.
    Constant,
    /// Both parties output one shared uniformly random bit.
    RandomBit,
    /// A random protocol on 2x2 inputs drawn from `--seed`.
    Random,
}

#[derive(Args, Debug, Clone)]
struct BuiltinArgs {
    #[arg(long, value_enum)]
    builtin: Option<Builtin>,
    #[arg(long, default_value_t = 1)]
    r: usize,
    #[arg(long, default_value_t = 2)]
    rounds: usize,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    value: usize,
}

#[derive(Args, Debug, Clone)]
struct PriorArgs {
    /// Distribution file `{ "probs": [[..], ..] }`.
    #[arg(long, conflicts_with_all = ["prior", "w"])]
    dist: Option<PathBuf>,
    /// Row-major probabilities; fractions such as `1/3` are accepted.
    #[arg(long, conflicts_with = "w")]
    prior: Option<String>,
    /// The AND prior with mass `w` on (1, 1) and the rest spread evenly.
    #[arg(long)]
    w: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Per-round information cost report for one protocol.
    Run {
        #[command(flatten)]
        source: BuiltinArgs,
        /// Protocol JSON file (instead of --builtin).
        #[arg(long, conflicts_with = "builtin")]
        protocol: Option<PathBuf>,
        #[command(flatten)]
        prior: PriorArgs,
        /// Truth table `{x_size, y_size, values}` of the function to score
        /// the outputs against.
        #[arg(long)]
        task: Option<PathBuf>,
    },
    /// Information and communication cost of the AND protocol across r.
    SweepR {
        #[arg(long, default_value_t = 1)]
        r_min: usize,
        #[arg(long, default_value_t = 8)]
        r_max: usize,
        #[arg(long, default_value_t = 0.0)]
        w: f64,
    },
    /// Cost increase of the AND protocol as mass moves onto (1, 1).
    SweepW {
        #[arg(long, default_value_t = 4)]
        r: usize,
        #[arg(long, value_delimiter = ',', default_value = "0,0.01,0.05,0.1,0.15")]
        w: Vec<f64>,
    },
    /// Seeded property suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Generalized discrepancy bound of a small boolean function.
    Gdm {
        /// Truth table file `{x_size, y_size, values}`.
        #[arg(long, conflicts_with = "function")]
        table: Option<PathBuf>,
        #[arg(long, value_enum)]
        function: Option<Function>,
        #[command(flatten)]
        prior: PriorArgs,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        /// Search the prior over a simplex grid of this step instead.
        #[arg(long, conflicts_with_all = ["dist", "prior", "w"])]
        grid_step: Option<f64>,
    },
    /// Write a built-in protocol as JSON.
    ExportBuiltin {
        #[arg(long, value_enum)]
        name: Builtin,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, default_value_t = 2)]
        rounds: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        value: usize,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Function {
    Xor,
    And,
    Disj1,
    Disj2,
    Disj3,
    Const0,
    Const1,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qicsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
