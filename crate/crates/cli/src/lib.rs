//! `soliton-lab`: generation, diagnosis, entropy, sections, slab analysis
//! and report emission for translating solitons.
//!
//! Every subcommand writes its artifacts atomically and prints a one-line
//! summary. Exit codes: 0 success, 2 validation error (including unknown
//! subcommands), 3 numerical failure. Errors are reported on stderr as a
//! single JSON object.

mod commands;
pub mod config;
pub mod report;
pub mod svg;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use soliton_core::nodal::PlaneSpec;

pub use config::{Config, FloatList};

/// Version of every JSON document written.
pub const SCHEMA: u64 = 1;
pub const THREADS_ENV: &str = "SOLITON_LAB_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or input documents.
    Usage { kind: &'static str, message: String },
    Core(soliton_core::Error),
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Usage {
            kind: "InvalidConfig",
            message: message.into(),
        }
    }

    pub fn schema(message: impl Into<String>) -> Self {
        CliError::Usage {
            kind: "SchemaMismatch",
            message: message.into(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage { kind, .. } => kind,
            CliError::Core(e) => e.kind(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage { .. } => EXIT_VALIDATION,
            CliError::Core(soliton_core::Error::Io(_) | soliton_core::Error::Json(_)) => EXIT_VALIDATION,
            CliError::Core(e) if e.is_validation() => EXIT_VALIDATION,
            CliError::Core(_) => EXIT_NUMERICAL,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        })
        .to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage { message, .. } => f.write_str(message),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<soliton_core::Error> for CliError {
    fn from(e: soliton_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

#[derive(Debug, Parser)]
#[command(name = "soliton-lab", version, about = "Numerical laboratory for translating solitons of mean curvature flow")]
pub struct Cli {
    /// File of `key = value` lines supplying defaults for flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a model surface and write OBJ plus metadata.
    Generate(GenerateArgs),
    /// Curvature diagnostics and translator residuals of a mesh.
    Diagnose(DiagnoseArgs),
    /// Solve for a Δ-wing over a strip by continuation in the boundary level.
    Solve(SolveArgs),
    /// Entropy search on a mesh.
    Entropy(EntropyArgs),
    /// Blow-down values and monotonicity sequences.
    Blowdown(BlowdownArgs),
    /// Intersection with a plane and its nodal structure.
    Section(SectionArgs),
    /// Projection hull classification and boundary growth.
    Slab(SlabArgs),
    /// Markdown and SVG summary of result documents.
    Report(ReportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    VerticalPlane,
    GrimReaper,
    TiltedGrimReaper,
    Bowl,
    Cylinder,
    Sphere,
    Torus,
    Saddle,
    MonkeySaddle,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub kind: ModelKind,
    /// Grid step.
    #[arg(long)]
    pub h: Option<f64>,
    /// Half-length of the meshed piece.
    #[arg(long)]
    pub extent: Option<f64>,
    /// Height cap.
    #[arg(long)]
    pub cap: Option<f64>,
    /// Tilt angle of the tilted grim reaper.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Horizontal shift of the grim reaper strip.
    #[arg(long, allow_hyphen_values = true)]
    pub shift: Option<f64>,
    /// Outer radius of the bowl.
    #[arg(long)]
    pub r_max: Option<f64>,
    /// Radius of cylinder and sphere, tube radius of the torus.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Cylinder height.
    #[arg(long)]
    pub height: Option<f64>,
    #[arg(long)]
    pub major_radius: Option<f64>,
    #[arg(long)]
    pub subdivisions: Option<usize>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    pub input: PathBuf,
    /// JSON summary.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Per-vertex CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Also report the section residual for this plane.
    #[arg(long)]
    pub plane: Option<PlaneSpec>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Strip width b > π.
    #[arg(long)]
    pub width: Option<f64>,
    /// Increasing boundary levels, comma separated.
    #[arg(long)]
    pub schedule: Option<FloatList>,
    #[arg(long)]
    pub h: Option<f64>,
    /// Newton tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Mesh of the final stage.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Solver report.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Final grid values.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub tmax: Option<f64>,
    #[arg(long)]
    pub tmin: Option<f64>,
    /// Grid points per spatial axis.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub t_samples: Option<usize>,
    /// Simplex refinements.
    #[arg(long)]
    pub starts: Option<usize>,
    /// Recorded for reproducibility; the search itself is deterministic.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Include every evaluation in the output.
    #[arg(long)]
    pub trace: bool,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct BlowdownArgs {
    pub input: PathBuf,
    /// Blow-down scales, comma separated.
    #[arg(long)]
    pub taus: Option<FloatList>,
    /// Shifts for the monotonicity sequence at (0 + τe₃, t0 + τ).
    #[arg(long)]
    pub huisken_taus: Option<FloatList>,
    #[arg(long)]
    pub t0: Option<f64>,
    #[arg(long)]
    pub residual_threshold: Option<f64>,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SectionArgs {
    pub input: PathBuf,
    /// `x1=c`, `x2=c` or `x3=c`.
    #[arg(long)]
    pub plane: Option<PlaneSpec>,
    /// Snapping tolerance relative to the mean edge length.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SlabArgs {
    pub input: PathBuf,
    /// Hull tolerance, three grid cells by default.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Boundary point `x1,x2` for the growth profile.
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<FloatList>,
    #[arg(long)]
    pub rho: Option<FloatList>,
    /// Vertical plane for approach sequences.
    #[arg(long)]
    pub plane: Option<PlaneSpec>,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Growth profile CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Result documents written by the other subcommands.
    pub inputs: Vec<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::config(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    // A pool may already exist when called twice in one process.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n.min(available)).build_global();
    Ok(())
}

/// Runs a parsed command and returns the summary line.
pub fn execute(cli: Cli) -> Result<String, CliError> {
    configure_threads()?;
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    match &cli.command {
        Command::Generate(a) => commands::generate(a, &cfg),
        Command::Diagnose(a) => commands::diagnose(a, &cfg),
        Command::Solve(a) => commands::solve(a, &cfg),
        Command::Entropy(a) => commands::entropy(a, &cfg),
        Command::Blowdown(a) => commands::blowdown(a, &cfg),
        Command::Section(a) => commands::section(a, &cfg),
        Command::Slab(a) => commands::slab(a, &cfg),
        Command::Report(a) => report::run(a),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    return EXIT_OK;
                }
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    eprint!("{e}");
                    return EXIT_VALIDATION;
                }
                _ => {}
            }
            let kind = if e.kind() == ErrorKind::InvalidSubcommand {
                "UnknownSubcommand"
            } else {
                "InvalidArguments"
            };
            let err = CliError::Usage {
                kind,
                message: e.to_string().lines().next().unwrap_or_default().trim_start_matches("error: ").to_string(),
            };
            eprintln!("{}", err.to_json());
            return err.exit_code();
        }
    };
    match execute(cli) {
        Ok(summary) => {
            println!("{summary}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}
