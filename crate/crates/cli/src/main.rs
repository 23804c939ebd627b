//! `gricci`: batch front-end for the gricci engine.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::config::{parse_count, resolve};
use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "gricci", version, about = "Generalized Ricci flow and propagator integral checks")]
struct Cli {
    /// JSON config whose keys mirror the subcommand's flags; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory for results and the run manifest.
    #[arg(long, global = true, default_value = "gricci-out")]
    out: PathBuf,

    /// Worker threads for Monte Carlo kernels (default: available parallelism).
    #[arg(long, global = true, env = "GRICCI_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

/// Algebra and metric selection shared by most subcommands.
#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct AlgebraArgs {
    /// `abelian:P,Q`, `su2` or `su2_double`.
    #[arg(long)]
    pub preset: Option<String>,
    /// Algebra document `{"dim", "pairing", "structure", "tau"?}`.
    #[arg(long)]
    pub algebra: Option<PathBuf>,
    /// Multiplier of the preset pairing.
    #[arg(long)]
    pub level: Option<f64>,
    /// `canonical` (alias `subalgebra`), `random:seed=N` or `document`.
    #[arg(long)]
    pub metric: Option<String>,
    /// Tolerance for invariant checks.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct TensorArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub alg: AlgebraArgs,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct FlowArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub alg: AlgebraArgs,
    /// Flow interval `START:END` in `s = log ε`.
    #[arg(long)]
    pub s: Option<String>,
    #[arg(long)]
    pub ds: Option<f64>,
    #[arg(long)]
    pub hbar: Option<f64>,
    /// `rkmk4` or `lie_euler`.
    #[arg(long)]
    pub scheme: Option<String>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct CourantArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub alg: AlgebraArgs,
    /// Courant document; without it, constant data from the algebra preset.
    #[arg(long)]
    pub courant: Option<PathBuf>,
    /// Dimension of the base when built from a preset.
    #[arg(long)]
    pub base_dim: Option<usize>,
    /// Base point, comma separated.
    #[arg(long)]
    pub x: Option<String>,
    /// Number of random base points checked by `master-check`.
    #[arg(long, value_parser = parse_count)]
    pub samples: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct McArgs {
    /// Sample count (accepts `1e7`).
    #[arg(long, value_parser = parse_count)]
    pub n: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Wall-time cap in seconds; reports the stderr reached.
    #[arg(long)]
    pub budget: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct LemmaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub mc: McArgs,
    /// Cutoff function `ℓ₁(x, y)`, e.g. `1` or `1 + 0.5*exp(-x^2-y^2)`.
    #[arg(long)]
    pub l1: Option<String>,
    #[arg(long)]
    pub l2: Option<String>,
    /// Test form document for `α`.
    #[arg(long)]
    pub alpha: Option<PathBuf>,
    /// Test form document for `β` (default: `α`).
    #[arg(long)]
    pub beta: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct ScanArgs {
    /// Loop length, 2 to 5.
    #[arg(long)]
    pub vertices: Option<usize>,
    /// Cutoff grid, comma separated and decreasing.
    #[arg(long)]
    pub epsilons: Option<String>,
    /// Samples per shell.
    #[arg(long, value_parser = parse_count)]
    pub n: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON array of test forms, one per vertex.
    #[arg(long)]
    pub forms: Option<PathBuf>,
    /// Edge propagators, comma separated (`p0`, `p0_bar`, `p1`, `p1_op`).
    #[arg(long)]
    pub edges: Option<String>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct DiagramArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub alg: AlgebraArgs,
    /// `eye`, `eye_unsigned`, `theta`, `rho_loop_plus` or `rho_loop_minus`.
    #[arg(long)]
    pub graph_preset: Option<String>,
    /// Graph document.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Also contract the graph against the algebra and metric.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub contract: Option<bool>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generalized Ricci tensor `−T_D`.
    Ricci(TensorArgs),
    /// Beta operator `B = (T_D − T_Dᵀ)/2π` as a matrix on the algebra.
    Beta(TensorArgs),
    /// Integrates the flow and writes a CSV trajectory.
    Flow(FlowArgs),
    /// Generalized Ricci tensor of Courant data at a base point.
    CourantRicci(CourantArgs),
    /// Expands `{C, C}` and checks that it vanishes.
    MasterCheck(CourantArgs),
    /// Monte Carlo estimate of the one-loop scale anomaly integral.
    VerifyLemma(LemmaArgs),
    /// Monte Carlo estimate of the Courant one-loop integral.
    VerifyCourant(LemmaArgs),
    /// Power-law fit of `ε dI/dε` for an `n`-vertex loop.
    ScanConvergence(ScanArgs),
    /// Automorphism counts and tensor factor of a graph.
    Diagram(DiagramArgs),
    /// Checks the algebra axioms and metric invariants.
    Validate(TensorArgs),
}

/// Global settings after parsing.
pub struct Globals {
    pub out: PathBuf,
    pub threads: usize,
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let threads = match cli.threads {
        Some(0) => return Err(CliError::Config("threads must be positive".into())),
        Some(t) => t,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let g = Globals { out: cli.out, threads };
    let cfg = cli.config.as_deref();
    match cli.command {
        Command::Ricci(a) => commands::ricci(&resolve(&a, cfg, "ricci")?, &g),
        Command::Beta(a) => commands::beta(&resolve(&a, cfg, "beta")?, &g),
        Command::Flow(a) => commands::flow(&resolve(&a, cfg, "flow")?, &g),
        Command::CourantRicci(a) => commands::courant_ricci(&resolve(&a, cfg, "courant-ricci")?, &g),
        Command::MasterCheck(a) => commands::master_check(&resolve(&a, cfg, "master-check")?, &g),
        Command::VerifyLemma(a) => commands::verify_lemma(&resolve(&a, cfg, "verify-lemma")?, &g),
        Command::VerifyCourant(a) => commands::verify_courant(&resolve(&a, cfg, "verify-courant")?, &g),
        Command::ScanConvergence(a) => commands::scan(&resolve(&a, cfg, "scan-convergence")?, &g),
        Command::Diagram(a) => commands::diagram(&resolve(&a, cfg, "diagram")?, &g),
        Command::Validate(a) => commands::validate(&resolve(&a, cfg, "validate")?, &g),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let err = CliError::Usage(e.to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
