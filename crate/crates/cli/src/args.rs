use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::parse::{parse_class, ClassArg};

#[derive(Debug, Parser)]
#[command(name = "spinmix", version, about = "Matrix-norm mixing certificates for Glauber dynamics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the norms, spectral radius and numerical radius of the input.
    Norms {
        #[command(flatten)]
        input: InputArgs,
        /// Analyse the coloring dependency matrix of a graph input.
        #[arg(long)]
        q: Option<usize>,
    },
    /// Print the exact maximum density, a witness and the decomposition norms.
    Density {
        #[command(flatten)]
        input: InputArgs,
        /// Also report the density bound of a graph class.
        #[arg(long, value_parser = parse_class)]
        class: Option<ClassArg>,
    },
    /// Print every mixing-time certificate available for the input.
    Bounds {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        eps: f64,
        /// Slack for the improved scan bound on symmetric zero-diagonal input.
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long, value_parser = parse_class)]
        class: Option<ClassArg>,
    },
    /// Run coupled chains and write the distance series.
    Simulate {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        steps: usize,
        /// Systematic scan in this order; random update when absent.
        #[arg(long)]
        order: Option<String>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Write the CSV series here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the invariants of every module on the input.
    Verify {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, value_parser = parse_class)]
        class: Option<ClassArg>,
        /// Enables the randomized contraction check on small colorings.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Edge list, CSV or JSON matrix, or one of `facilitated`, `example1`.
    pub input: String,
    /// Allow repeated edges in an edge list.
    #[arg(long)]
    pub multigraph: bool,
    /// Size of a built-in input.
    #[arg(long)]
    pub n: Option<usize>,
    /// Blocked-site update probability of the facilitated model.
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}
