//! `qss`: build resource states, estimate fidelities and witnesses, and run
//! the CQ, QQ, hybrid and verified sharing sessions.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qss_core::noise::NoiseSpec;
use qss_protocols::qq::Plane;
use qss_protocols::{PlayerSet, SecretQubit, Triplet};

#[derive(Parser, Debug)]
#[command(name = "qss", version, about = "Graph-state quantum secret sharing simulator")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Write the JSON report to PATH, or to stdout when no path is given.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "-", value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Write the command's table to PATH as CSV.
    #[arg(long, global = true, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    /// Include the full transcript in session reports.
    #[arg(long, short, global = true)]
    pub verbose: bool,
}

#[derive(Args, Debug, Clone)]
pub struct NoiseArg {
    /// Noise model `kind:param[@targets]`, kind one of white, depol, flip.
    #[arg(long)]
    pub noise: Option<NoiseSpec>,
}

#[derive(Args, Debug, Clone)]
pub struct SessionArgs {
    #[arg(long, default_value_t = 1000)]
    pub rounds: u64,
    #[arg(long, default_value = "1,2,3")]
    pub triplet: Triplet,
    #[command(flatten)]
    pub noise: NoiseArg,
    /// Keep messages for the first N rounds only (counts still cover all rounds).
    #[arg(long, value_name = "N")]
    pub record_rounds: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a graph state (the five-qubit resource unless --graph is given).
    BuildState {
        /// Graph file `{"n": .., "edges": [[u, v], ..], "dealer": ..}`.
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Entanglement witness on the (noisy) resource.
    Witness {
        #[command(flatten)]
        noise: NoiseArg,
        /// Estimate from this many simulated shots per setting instead of exactly.
        #[arg(long)]
        shots: Option<u64>,
    },
    /// Fidelity with the ideal resource from the 31-term Pauli decomposition.
    Fidelity {
        #[command(flatten)]
        noise: NoiseArg,
        #[arg(long)]
        shots: Option<u64>,
    },
    /// Holevo quantities and access classification for all 15 player subsets.
    Access {
        /// Use the noiseless resource (the default when no --noise is given).
        #[arg(long, conflicts_with = "noise")]
        ideal: bool,
        #[command(flatten)]
        noise: NoiseArg,
        /// Classification tolerance in bits (default 1e-6 ideal, 0.05 noisy).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Classical secret (key) sharing session.
    Cq {
        #[command(flatten)]
        session: SessionArgs,
    },
    /// Quantum secret sharing session.
    Qq {
        #[command(flatten)]
        session: SessionArgs,
        #[arg(long, default_value = "1.0471975511965976,0.7853981633974483")]
        secret: SecretQubit,
    },
    /// Quantum secret sharing with a Shamir-shared one-time pad.
    Hybrid {
        #[command(flatten)]
        session: SessionArgs,
        #[arg(long, default_value = "1.0471975511965976,0.7853981633974483")]
        secret: SecretQubit,
    },
    /// Verified quantum secret sharing with randomised stabilizer tests.
    Sqq {
        #[command(flatten)]
        session: SessionArgs,
        #[arg(long, default_value = "1.0471975511965976,0.7853981633974483")]
        secret: SecretQubit,
        /// Probability that a round is a test.
        #[arg(long, default_value_t = 0.5)]
        s: f64,
        /// Keep running after a failed test (statistics mode, not the protocol).
        #[arg(long = "continue")]
        keep_going: bool,
        /// Pauli string applied to every distributed copy, e.g. IZIII.
        #[arg(long)]
        tamper: Option<qss_core::PauliString>,
    },
    /// Pair reduced-state overlaps with reference states around a Bloch great circle.
    Sweep {
        #[arg(long, default_value = "1,2")]
        pair: PlayerSet,
        #[arg(long, default_value = "zy")]
        plane: Plane,
        #[arg(long, default_value_t = 24)]
        steps: usize,
    },
    /// Channel or state tomography.
    Tomo {
        /// Channel from the dealer's secret to this player's qubit.
        #[arg(long, conflicts_with_all = ["triplet", "pair", "counts"])]
        player: Option<usize>,
        /// Channel from the secret to the triplet's designated player, on the (noisy) resource.
        #[arg(long, conflicts_with_all = ["pair", "counts"])]
        triplet: Option<Triplet>,
        /// Sampled state tomography of a pair's reduced state.
        #[arg(long, conflicts_with = "counts")]
        pair: Option<PlayerSet>,
        /// Reconstruct a state from a counts CSV (`setting,outcome_bitstring,count`).
        #[arg(long)]
        counts: Option<PathBuf>,
        #[arg(long, default_value = "1.0471975511965976,0.7853981633974483")]
        secret: SecretQubit,
        #[command(flatten)]
        noise: NoiseArg,
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(&cli) {
        Ok(commands::Status::Done) => ExitCode::SUCCESS,
        Ok(commands::Status::Aborted) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
