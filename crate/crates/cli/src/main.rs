mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Certified bounds for the Fibonacci renormalization fixed point and its
/// wild-attractor trichotomy.
#[derive(Parser, Debug)]
#[command(name = "fibren", version)]
pub struct Cli {
    /// Directory for fixed-point data, endpoint files and shard outputs
    /// (default: `$HOME/Data`).
    #[arg(long, env = "FIBREN_DATA_DIR", global = true)]
    pub data_dir: Option<PathBuf>,
    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Polynomial degree used when evaluating the maps (default: 24, or the
    /// run profile's value for `prove`).
    #[arg(long, global = true)]
    pub eval_degree: Option<usize>,
    /// Map iterated by the `eta` and `zeta` runs: the center of the certified
    /// ball, or the whole ball.
    #[arg(long, value_enum, default_value_t = MapArg::Center, global = true)]
    pub map: MapArg,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RunProfile {
    Desk,
    Overnight,
    Proof,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MapArg {
    Center,
    Enclosure,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Find and certify the fixed point; writes `data_<d>`, `psi_<d>`, `phi_<d>`
    /// and `certificate_<d>`.
    Fixpoint {
        #[arg(long)]
        degree: f64,
        #[arg(long, default_value_t = 100)]
        truncation: usize,
        #[arg(long, default_value_t = 100)]
        basis: usize,
        #[arg(long, default_value_t = 1e-10)]
        delta: f64,
        /// Output directory (default: the data directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Schwarzian sign check and Koebe constant of the stored fixed point.
    Koebe {
        #[arg(long)]
        degree: f64,
        #[arg(long, default_value_t = 64)]
        mesh: usize,
    },
    /// One copy of the `eta` run; writes `output_eta.D.M.n.i`.
    Eta {
        /// Degree of the power map.
        #[arg(short = 'D')]
        degree: f64,
        /// The level is `n = L + 1`.
        #[arg(short = 'L')]
        l: usize,
        /// Number of pieces of `T_1`.
        #[arg(short = 'M')]
        pieces: usize,
        /// Iteration budget.
        #[arg(short = 'N')]
        budget: usize,
        /// Refinement size cutoff, relative to the piece.
        #[arg(short = 'F', default_value_t = 0.25)]
        cutoff: f64,
        /// Total number of copies.
        #[arg(short = 'm', default_value_t = 1)]
        copies: usize,
        /// This copy, `1..=m`.
        #[arg(short = 'i', default_value_t = 1)]
        copy: usize,
    },
    /// One copy of the `zeta` lower-bound run; writes `output_zeta_below.D.M.n.i`.
    ZetaBelow {
        #[arg(short = 'D')]
        degree: f64,
        #[arg(short = 'L')]
        l: usize,
        #[arg(short = 'M')]
        pieces: usize,
        /// First-return budget.
        #[arg(short = 'Z')]
        return_budget: usize,
        /// Full-map budget.
        #[arg(short = 'X')]
        escape_budget: usize,
        /// Refinement cutoff for the first-return stage.
        #[arg(long = "f1", default_value_t = 1.0)]
        f1: f64,
        /// Refinement cutoff for the escape stage.
        #[arg(long = "f2", default_value_t = 1.0)]
        f2: f64,
        #[arg(short = 'm', default_value_t = 1)]
        copies: usize,
        #[arg(short = 'i', default_value_t = 1)]
        copy: usize,
    },
    /// Merges the `m` copies of an `eta` run into a report.
    CollectEta {
        #[arg(short = 'D')]
        degree: f64,
        #[arg(short = 'L')]
        l: usize,
        #[arg(short = 'M')]
        pieces: usize,
        #[arg(short = 'm')]
        copies: usize,
    },
    /// Merges the `m` copies of a `zeta-below` run into a report.
    CollectZetaBelow {
        #[arg(short = 'D')]
        degree: f64,
        #[arg(short = 'L')]
        l: usize,
        #[arg(short = 'M')]
        pieces: usize,
        #[arg(short = 'm')]
        copies: usize,
    },
    /// Preimages of `T_n` under `F` to depth `n`, into endpoint file 0; prints
    /// the first and last index of the deepest level.
    PreimagesZeta {
        #[arg(short = 'd')]
        degree: f64,
        #[arg(short = 'l')]
        l: usize,
        /// Preimage depth.
        #[arg(short = 'n')]
        depth: usize,
    },
    /// Continues the preimage tree below one deepest-level interval of file 0;
    /// copy `i` handles interval `Q + i - 1` and writes endpoint file `i`.
    PreimagesZetaNext {
        #[arg(short = 'D')]
        degree: f64,
        #[arg(short = 'L')]
        l: usize,
        /// First deepest-level index in file 0.
        #[arg(short = 'Q')]
        first: usize,
        /// Last deepest-level index in file 0.
        #[arg(short = 'P')]
        last: usize,
        /// Number of deepest-level intervals.
        #[arg(short = 'M')]
        count: usize,
        /// Additional depth.
        #[arg(short = 'K')]
        depth: usize,
        #[arg(short = 'i')]
        copy: usize,
    },
    /// Union of endpoint files `0..o`, restricted to `T_{n-1} \ (T_n ∪ J_n)` and
    /// rescaled; written as `o` reduced files.
    ReduceIntervals {
        #[arg(short = 'd')]
        degree: f64,
        #[arg(short = 'l')]
        l: usize,
        /// Number of endpoint files.
        #[arg(short = 'o')]
        files: usize,
    },
    /// Pulls reduced file `i` back under the first-return map to depth `K`.
    PreimagesRenZetaNext {
        #[arg(short = 'D')]
        degree: f64,
        #[arg(short = 'L')]
        l: usize,
        /// Number of reduced files.
        #[arg(short = 'M')]
        files: usize,
        /// Pull-back depth.
        #[arg(short = 'K')]
        depth: usize,
        /// Reduced file index, `0..M`.
        #[arg(short = 'i')]
        copy: usize,
    },
    /// Union of the return-stage files and the resulting upper bound on `zeta_n`.
    ComputeZeta {
        #[arg(short = 'd')]
        degree: f64,
        #[arg(short = 'l')]
        l: usize,
        /// Number of return-stage files.
        #[arg(short = 'o')]
        files: usize,
        /// Pull-back depth used, recorded in the report.
        #[arg(short = 'm')]
        depth: usize,
    },
    /// Fixed point, Koebe constant, `eta` and `zeta` bounds and the verdict.
    /// Exits 0 on a certified case, 2 when indeterminate, 1 on failure.
    Prove {
        #[arg(long)]
        degree: f64,
        #[arg(long, value_enum, default_value_t = RunProfile::Desk)]
        profile: RunProfile,
        /// Level `n` (default: 9 below degree 4.5, else 4).
        #[arg(long)]
        level: Option<usize>,
        #[arg(long)]
        pieces: Option<usize>,
        /// Overrides all three iteration budgets.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        preimage_depth: Option<usize>,
        #[arg(long)]
        return_depth: Option<usize>,
        /// Also write the report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
