//! `wallwalk`: command-line access to the wall-attracted random walk.
//!
//! Data goes to stdout (or `--output`), diagnostics to stderr. Exit code 2
//! means a flag or domain error, 1 a failed tolerance check or numerical
//! failure, 0 success.

mod commands;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::table::Format;

#[derive(Debug, Parser)]
#[command(
    name = "wallwalk",
    version,
    about = "Wall-attracted random walk toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Model parameter δ (> 1; several commands need δ in (1, 2))
    #[arg(long, allow_negative_numbers = true)]
    delta: f64,
    /// Output format [default: csv for tables, json for reports]
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write output to this file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct NodesArg {
    /// Quadrature nodes per half of [-1, 1]; a power of two in [64, 4096]
    #[arg(long, default_value_t = 512, value_parser = parse_nodes)]
    nodes: usize,
}

fn parse_nodes(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if !(64..=4096).contains(&n) || !n.is_power_of_two() {
        return Err(format!(
            "nodes must be a power of two between 64 and 4096, got {n}"
        ));
    }
    Ok(n)
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact distribution of X_n (or the mean trajectory) by dynamic programming
    Dp {
        #[command(flatten)]
        common: Common,
        /// Starting site
        #[arg(long, default_value_t = 0)]
        x0: usize,
        /// Number of steps
        #[arg(long)]
        n: usize,
        /// Emit E X_k for k = 0..=n instead of the distribution at n
        #[arg(long)]
        means: bool,
    },
    /// Monte Carlo estimate of E X_k, k = 0..=n
    Mc {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        x0: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        paths: u64,
        /// RNG seed (required: runs are reproducible by construction)
        #[arg(long)]
        seed: u64,
        /// Worker threads; the result does not depend on this
        #[arg(long, env = "WALLWALK_THREADS")]
        threads: Option<usize>,
    },
    /// Stationary weights π_y and π_y/π_0
    Stationary {
        #[command(flatten)]
        common: Common,
        /// Largest site to list
        #[arg(long, default_value_t = 100)]
        max_site: usize,
    },
    /// Polynomial family values on a t grid
    Polys {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "q")]
        family: commands::FamilyArg,
        /// Gegenbauer parameter λ [default: δ/2]
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 10)]
        max_degree: usize,
        /// Evaluation points, comma separated [default: 11 points on [-1, 1]]
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        t: Vec<f64>,
    },
    /// Gram matrix of Q under the spectral measure against π_0/π_y
    Ortho {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        nodes: NodesArg,
        #[arg(long, default_value_t = 30)]
        max_degree: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Spectral transition probabilities next to exact DP values
    Transition {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        nodes: NodesArg,
        #[arg(long, default_value_t = 0)]
        x0: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Orthogonality checks for the dual and associated families
    Dette {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 256, value_parser = parse_nodes)]
        nodes: usize,
        #[arg(long, default_value_t = 20)]
        max_degree: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Even and odd generating functions against DP partial sums
    Genfun {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        nodes: NodesArg,
        /// Values of z in [0, 0.999], comma separated
        #[arg(long, value_delimiter = ',', default_value = "0.3")]
        z: Vec<f64>,
        /// Steps in the DP partial sums
        #[arg(long, default_value_t = 400)]
        n_max: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Moment amplitude K_δ with a node-doubling convergence flag
    Kdelta {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        nodes: NodesArg,
    },
    /// E_0 X_n against K_δ n^{1-δ/2}
    Asym {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        nodes: NodesArg,
        /// Even step counts, comma separated [default: 64,128,…,16384]
        #[arg(long, value_delimiter = ',')]
        n_list: Vec<usize>,
    },
    /// g_e(z) against Γ(2-δ/2) K_δ (1-z)^{δ/2-2}
    Asymz {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        nodes: NodesArg,
        /// z values in [0, 0.999], comma separated [default: 13 points, 1-z from 0.1 to 0.001]
        #[arg(long, value_delimiter = ',')]
        z_grid: Vec<f64>,
    },
    /// Every cross-check; exits 1 if any fails
    VerifyAll {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        nodes: NodesArg,
        #[arg(long, hide = true)]
        mutate_b_sign: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("wallwalk: {failure}");
            ExitCode::from(failure.code())
        }
    }
}
