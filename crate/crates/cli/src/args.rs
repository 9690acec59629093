use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use quatpoly::Tolerances;

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "quatpoly",
    version,
    about = "Closed polygons in R^5 and their quaternionic models"
)]
pub struct Cli {
    #[command(flatten)]
    pub run: RunArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Seed recorded in every artifact.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Closure residual |sum r_i u_i| accepted as closed; also the |C| target of `normalize`.
    #[arg(long = "tol-closure", global = true, default_value_t = 1e-10)]
    pub tol_closure: f64,

    /// Relative singular-value threshold for numerical rank.
    #[arg(long = "tol-rank", global = true, default_value_t = 1e-8)]
    pub tol_rank: f64,

    /// Residual target of iterative solvers.
    #[arg(long = "tol-solver", global = true, default_value_t = 1e-12)]
    pub tol_solver: f64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl RunArgs {
    pub fn tolerances(&self) -> CliResult<Tolerances> {
        let t = Tolerances {
            closure: self.tol_closure,
            rank: self.tol_rank,
            solver: self.tol_solver,
            ..Tolerances::default()
        };
        t.validate().map_err(CliError::Usage)?;
        Ok(t)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample closed polygons with given side lengths.
    Sample(SampleArgs),
    /// Classify the singularity type of polygons.
    Classify(InputArgs),
    /// Move a configuration on S^4 to zero center of mass.
    Normalize(NormalizeArgs),
    /// Gel'fand-Tsetlin pattern or partial spectra.
    Gt(GtArgs),
    /// Stability of a weighted line configuration in CP^3.
    Stability(StabilityArgs),
    /// Bend a polygon along a diagonal.
    Bend(BendArgs),
    /// Diagonal lengths and classification counts of an ensemble.
    Report(InputArgs),
    /// Run the invariant battery.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Number of sides (implied by an explicit weight list).
    #[arg(long)]
    pub n: Option<usize>,

    /// `equal` or a comma-separated list of side lengths.
    #[arg(long, default_value = "equal")]
    pub weights: String,

    #[arg(long, default_value_t = 1)]
    pub count: usize,

    /// Allow n above the exhaustive nondegeneracy limit.
    #[arg(long)]
    pub allow_large: bool,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Polygon JSON, polygon array, or a `sample` artifact (JSON or CSV).
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "source")]
pub struct NormalizeArgs {
    /// Weighted configuration `{weights, points}` or a polygon.
    #[arg(long, group = "source")]
    pub input: Option<PathBuf>,

    /// Random configuration of this many equally weighted points.
    #[arg(long, group = "source")]
    pub random: Option<usize>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "source")]
pub struct GtArgs {
    /// Quaternionic Hermitian matrix, as rows of `[w, x, y, z]`.
    #[arg(long, group = "source")]
    pub hermitian: Option<PathBuf>,

    /// Grassmann point, as an n x 2 quaternionic matrix.
    #[arg(long, group = "source")]
    pub grassmann: Option<PathBuf>,

    /// Random Hermitian matrix of this size.
    #[arg(long, group = "source")]
    pub random_hermitian: Option<usize>,

    /// Random Grassmann point on the closure level set with this many rows.
    #[arg(long, group = "source")]
    pub random_grassmann: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fixture {
    Generic,
    Concurrent,
    Transversal,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "source")]
pub struct StabilityArgs {
    /// Line configuration `{weights, lines}`.
    #[arg(long, group = "source")]
    pub input: Option<PathBuf>,

    #[arg(long, value_enum, group = "source")]
    pub fixture: Option<Fixture>,
}

#[derive(Debug, Args)]
pub struct BendArgs {
    /// Polygon input, in any form `classify` accepts.
    #[arg(long)]
    pub input: PathBuf,

    /// Polygon to bend when the input holds several.
    #[arg(long, default_value_t = 0)]
    pub index: usize,

    /// Diagonal index, 1..=n-3.
    #[arg(long)]
    pub diagonal: usize,

    /// Seed of the random rotation (defaults to --seed).
    #[arg(long)]
    pub rotation_seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Random cases per check.
    #[arg(long, default_value_t = 100)]
    pub cases: usize,
}
