//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "divflow", version, about = "Divergence-equation solvers and dual norms on grid domains")]
pub struct Cli {
    /// Directory receiving summary.json and the CSV files.
    #[arg(long, global = true, env = "DIVFLOW_OUT", default_value = "divflow-out")]
    pub out: PathBuf,
    /// Seed for every randomized choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Rerun small instances against brute-force oracles and fail on disagreement.
    #[arg(long, global = true)]
    pub check: bool,
    /// Metric scaling: cell units, or lengths scaled by h.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Graph)]
    pub mode: ModeArg,
    /// Solver tolerance for the sup-norm problems.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Graph,
    Mesh,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a domain and export or describe it.
    Domain {
        #[command(subcommand)]
        action: DomainAction,
    },
    /// Least-mass flow with div v = F and its Lipschitz potential.
    SolveL1(SolveArgs),
    /// Least sup-norm flow with div v = f and its cut certificate.
    SolveLinf(SolveArgs),
    /// Lipschitz-free norm of F (imbalance absorbed at the basepoint).
    FreeNorm(SolveArgs),
    /// Strong-charge norm of a mean-zero f.
    SchNorm(SolveArgs),
    /// Path decomposition of the optimal flow of a dipole.
    Pencil(PencilArgs),
    /// Scattered set, ball system and partition of unity.
    Whitney(WhitneyArgs),
    /// Cheeger constant of the domain.
    Cheeger(CheegerArgs),
    /// Bracket on the Poincaré constant for 1 <= p <= m/(m-1).
    Poincare(PoincareArgs),
    /// Weak-L^q profile, verdict and truncation estimates.
    Weaklq(WeakArgs),
    /// Ball-ratio norm and upper-regularity profile of an atomic measure.
    Mz(MzArgs),
    /// Variable-angle Koch curve and its length measure.
    Koch(KochArgs),
    /// Parameter sweeps.
    Experiment {
        #[command(subcommand)]
        which: Experiment,
    },
}

#[derive(Debug, Subcommand)]
pub enum DomainAction {
    /// Write domain.json, mask.pgm (2D) and edges.csv.
    Build(DomainArgs),
    /// Summary plus per-cell boundary distance and component.
    Info(DomainArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DomainArgs {
    /// JSON descriptor or PGM/PBM mask.
    #[arg(long, conflicts_with = "rect")]
    pub domain: Option<PathBuf>,
    /// Rectangle `NXxNY` with its lower-left cell at the origin.
    #[arg(long)]
    pub rect: Option<String>,
    /// Cell size (overrides the descriptor).
    #[arg(long)]
    pub h: Option<f64>,
    /// Neighbor count 4/8 (2D) or 6/26 (3D); overrides the descriptor.
    #[arg(long)]
    pub connectivity: Option<u32>,
    /// Basepoint cell `i,j`; overrides the descriptor.
    #[arg(long)]
    pub basepoint: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// CSV with `index,value` columns.
    #[arg(long, group = "source")]
    pub f: Option<PathBuf>,
    /// Atoms (`x,y,weight` CSV or JSON), summed into the cells containing them.
    #[arg(long, group = "source")]
    pub atoms: Option<PathBuf>,
    /// `i,j:k,l`: +1 at the first cell, -1 at the second.
    #[arg(long, group = "source")]
    pub dipole: Option<String>,
    /// Seeded uniform values on [-1, 1], shifted to mean zero per component.
    #[arg(long, group = "source")]
    pub random: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub domain: DomainArgs,
    #[command(flatten)]
    pub source: SourceArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PencilArgs {
    #[command(flatten)]
    pub domain: DomainArgs,
    /// Cell `a`.
    #[arg(long)]
    pub from: String,
    /// Cell `b`.
    #[arg(long)]
    pub to: String,
    /// Dipole strength.
    #[arg(long, default_value_t = 1.0)]
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanArg {
    Lexicographic,
    Seeded,
}

#[derive(Debug, Clone, Args)]
pub struct WhitneyArgs {
    #[command(flatten)]
    pub domain: DomainArgs,
    #[arg(long, default_value_t = 0.5)]
    pub tau: f64,
    /// Candidates per cell and axis.
    #[arg(long, default_value_t = 2)]
    pub subdivision: usize,
    /// Random sample points for the partition checks.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, value_enum, default_value_t = ScanArg::Seeded)]
    pub scan: ScanArg,
    /// Bump slope (at most 5).
    #[arg(long, default_value_t = 4.5)]
    pub slope: f64,
}

#[derive(Debug, Clone, Args)]
pub struct MethodArgs {
    /// Level-set sweeps instead of exhaustive enumeration.
    #[arg(long)]
    pub heuristic: bool,
    /// Random sources and potentials for the heuristic.
    #[arg(long, default_value_t = 32)]
    pub trials: usize,
}

#[derive(Debug, Clone, Args)]
pub struct CheegerArgs {
    #[command(flatten)]
    pub domain: DomainArgs,
    #[command(flatten)]
    pub method: MethodArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PoincareArgs {
    #[command(flatten)]
    pub domain: DomainArgs,
    #[command(flatten)]
    pub method: MethodArgs,
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProfileArg {
    /// `|x|^(-m/q)`.
    Critical,
    /// `|x|^(-m/q)·(1 + |ln|x||)^(-1/q)`.
    Log,
    /// Indicator of the unit ball.
    Ball,
}

#[derive(Debug, Clone, Args)]
pub struct WeakArgs {
    /// Analytic radial function.
    #[arg(long, value_enum, conflicts_with = "f")]
    pub profile: Option<ProfileArg>,
    /// Grid function (`index,value` CSV) on `--domain`/`--rect`, centered at the origin.
    #[arg(long)]
    pub f: Option<PathBuf>,
    #[command(flatten)]
    pub domain: DomainArgs,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    /// Level grid from 10^lo to 10^hi.
    #[arg(long, default_value_t = -8, allow_hyphen_values = true)]
    pub lo: i32,
    #[arg(long, default_value_t = 8, allow_hyphen_values = true)]
    pub hi: i32,
    #[arg(long, default_value_t = 20)]
    pub per_decade: usize,
    /// Comma-separated truncation indices.
    #[arg(long)]
    pub truncate: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CentersArg {
    Atoms,
    Midpoints,
}

#[derive(Debug, Clone, Args)]
pub struct MzArgs {
    /// Atoms (`x,y,weight` CSV or JSON).
    #[arg(long)]
    pub atoms: PathBuf,
    /// Smallest ball radius.
    #[arg(long)]
    pub r_min: f64,
    #[arg(long, value_enum, default_value_t = CentersArg::Atoms)]
    pub centers: CentersArg,
    /// Profile radii `lo,hi,count`, log-spaced.
    #[arg(long)]
    pub radii: Option<String>,
    /// Domain for the boundary-weighted η rows.
    #[command(flatten)]
    pub domain: DomainArgs,
    /// Comma-separated τ values for η (needs a domain).
    #[arg(long)]
    pub taus: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct KochArgs {
    #[arg(long, default_value_t = 5)]
    pub level: usize,
    /// Constant angle θ (radians).
    #[arg(long, conflicts_with = "decay")]
    pub angle: Option<f64>,
    /// θ_j = scale·j^(-decay).
    #[arg(long)]
    pub decay: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long, default_value = "0,0")]
    pub a: String,
    #[arg(long, default_value = "1,0")]
    pub b: String,
    /// Log-spaced profile radii.
    #[arg(long, default_value_t = 24)]
    pub radii: usize,
}

#[derive(Debug, Subcommand)]
pub enum Experiment {
    /// Poincaré lower bound on two rooms joined by corridors of growing length.
    Nikodym(NikodymArgs),
    /// Free and strong-charge norms of a fixed instance under mesh refinement.
    Refine(RefineArgs),
}

#[derive(Debug, Clone, Args)]
pub struct NikodymArgs {
    /// Longest corridor.
    #[arg(long, default_value_t = 10)]
    pub max_length: usize,
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    #[arg(long, default_value_t = 4)]
    pub connectivity: u32,
    #[arg(long, default_value_t = 32)]
    pub trials: usize,
    /// Worker threads (defaults to the available parallelism).
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct RefineArgs {
    /// Comma-separated grid sizes n (unit square split into n×n cells).
    #[arg(long, default_value = "8,16,32,64")]
    pub sizes: String,
    #[arg(long, default_value_t = 8)]
    pub connectivity: u32,
    #[arg(long)]
    pub jobs: Option<usize>,
}
