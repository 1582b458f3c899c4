mod commands;
mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ltlab::spectral::PotentialSpec;
use ltlab::verify::check_names;
use ltlab::Execution;
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_ERROR: u8 = 1;
const EXIT_CHECK_FAILED: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser, Serialize)]
#[command(name = "ltlab", version, about = "Lieb-Thirring constants and bound-state experiments")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,
    /// Run every inner loop on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    /// Recorded in the output; every search in this tool is deterministic.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Tolerance override NAME=VALUE for a verification check (repeatable).
    #[arg(long = "tol", value_parser = parse_tolerance, global = true)]
    pub tolerances: Vec<(String, f64)>,
    #[command(subcommand)]
    pub command: Command,
}

impl Cli {
    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum K3Choice {
    /// Proven lower bound from the improved kinetic inequality.
    Improved,
    /// Semiclassical value; valid only if the conjecture holds.
    Conjectured,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "name")]
pub enum Command {
    /// Classical, one-particle and literature constants for (gamma, d).
    Constants {
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        dim: u32,
    },
    /// Radial ground state of -ΔQ + Q - Q^{2p-1} = 0 by shooting.
    GroundState {
        #[arg(long)]
        dim: u32,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1e-12)]
        rtol: f64,
    },
    /// Evaluate (and optionally improve) the 1D operator-valued functional.
    Rumin {
        /// Use the published reference trial pair.
        #[arg(long, visible_alias = "paper-trial", conflicts_with = "trial", required_unless_present = "trial")]
        reference_trial: bool,
        /// Trial pair JSON file.
        #[arg(long)]
        trial: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        dim: u32,
        #[arg(long, default_value_t = 1e-10)]
        rel_tol: f64,
        /// Simplex search budget (function evaluations); 0 disables the search.
        #[arg(long, default_value_t = 0)]
        optimize: usize,
    },
    /// Negative spectrum of -Δ + V, with Lieb-Thirring ratios for --gamma.
    Spectrum {
        #[arg(long, value_parser = parse_potential)]
        potential: PotentialSpec,
        #[arg(long, value_delimiter = ',')]
        gamma: Vec<f64>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Strong-coupling ratios against the semiclassical constant.
    Weyl {
        #[arg(long, value_parser = parse_potential)]
        potential: PotentialSpec,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, value_delimiter = ',', default_value = "1,10,100,1000,10000")]
        couplings: Vec<f64>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Scaled oscillator Riesz means on an hbar grid, flagging increases.
    Monotonicity {
        #[arg(long, default_value_t = 1)]
        dim: u32,
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 1e-3)]
        hbar_min: f64,
        #[arg(long, default_value_t = 1.0)]
        hbar_max: f64,
        #[arg(long, default_value_t = 1000)]
        points: usize,
    },
    /// Two separated copies of the one-bound-state optimizer.
    TwoBump {
        #[arg(long, default_value_t = 2.0)]
        gamma: f64,
        #[arg(long, value_delimiter = ',', default_value = "4,6,8,10,11,12")]
        separations: Vec<f64>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Constant-potential counts on the sphere and the critical ratio sequence.
    Sphere {
        #[arg(long)]
        dim: u32,
        #[arg(long, default_value_t = 20)]
        l_max: u64,
    },
    /// Stability-of-matter energy bound.
    Stability {
        #[arg(long)]
        electrons: u64,
        #[arg(long)]
        nuclei: u64,
        #[arg(long)]
        charge: f64,
        #[arg(long, value_enum, default_value_t = K3Choice::Improved)]
        k3: K3Choice,
        /// Also check both optimizations of the proof by grid search.
        #[arg(long)]
        chain: bool,
    },
    /// Exponent where the one-particle and classical constants cross.
    GammaC {
        #[arg(long)]
        dim: u32,
    },
    /// Recompute every published number and compare with its tolerance.
    VerifyAll {
        /// Only these criteria (comma separated ids 1-9).
        #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u32).range(1..=9))]
        only: Vec<u32>,
    },
}

/// Grid flags; unset values take the subcommand's defaults.
#[derive(Debug, Clone, Args, Serialize)]
pub struct GridArgs {
    /// Half-width X of the box [-X, X] (radius in radial problems).
    #[arg(long)]
    pub half_width: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Coefficient c of the kinetic term -cΔ.
    #[arg(long)]
    pub kinetic: Option<f64>,
    #[arg(long)]
    pub no_richardson: bool,
    #[arg(long)]
    pub ell_max: Option<u32>,
}

fn parse_potential(text: &str) -> Result<PotentialSpec, String> {
    PotentialSpec::parse(text).map_err(|e| e.to_string())
}

fn parse_tolerance(text: &str) -> Result<(String, f64), String> {
    let (name, value) = text.split_once('=').ok_or("expected NAME=VALUE")?;
    if !check_names().contains(&name) {
        return Err(format!("unknown check '{name}'; known: {}", check_names().join(", ")));
    }
    let v: f64 = value.parse().map_err(|_| format!("'{value}' is not a number"))?;
    if !v.is_finite() {
        return Err("tolerance must be finite".into());
    }
    Ok((name.to_string(), v))
}

fn main() -> ExitCode {
    let mut cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    commands::resolve_defaults(&mut cli);
    match commands::run(&cli) {
        Ok(out) => {
            let text = report::render(&cli, &out);
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).is_err() {
                return ExitCode::from(EXIT_ERROR);
            }
            if out.checks_failed {
                ExitCode::from(EXIT_CHECK_FAILED)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("ltlab: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
