//! Command-line surface, run configuration and input resolution.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use netspec_core::forests::ForestError;
use netspec_core::graph::{GraphError, Network};
use netspec_core::laplacian::LaplacianError;
use netspec_core::spectral::SpectralError;
use netspec_core::temperley::TemperleyError;
use netspec_core::ydelta::{AbelError, MoveProgram, YDeltaError};
use netspec_core::zigzag::ZigZagError;
use netspec_core::{fixtures, Exec};
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(name = "netspec", version, about = "Spectral data and Y-Delta dynamics of periodic planar resistor networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Directory receiving JSON reports and CSV/SVG plots.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Residual tolerance for numerical checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Sampling resolution: radial and angular samples for `amoeba`, samples per real
    /// sweep for `divisor`.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Vertex whose cokernel component defines the divisor.
    #[arg(long, global = true, default_value_t = 0)]
    pub v0: usize,
    /// Sign quadrants of (z, w) swept for the divisor, e.g. "++,-+".
    #[arg(long, global = true, default_value = "++,+-,-+,--")]
    pub quadrants: String,
    /// Seed for randomized conductance draws.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest edge count for forest enumeration.
    #[arg(long, global = true, default_value_t = netspec_core::forests::DEFAULT_EDGE_BOUND)]
    pub edge_bound: usize,
    /// Largest vertex count of the superposition graph for dimer enumeration.
    #[arg(long, global = true, default_value_t = netspec_core::temperley::DEFAULT_VERTEX_BOUND)]
    pub vertex_bound: usize,
    /// Run every kernel on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Check the embedding: rotations, faces, Euler characteristic, face closure.
    Validate { input: String },
    /// Exact characteristic polynomial and its node at (1, 1).
    Charpoly { input: String },
    /// Zig-zag strands, their classes and the minimality test.
    Zigzag { input: String },
    /// Newton polygon of the characteristic polynomial against the zig-zag polygon.
    Newton { input: String },
    /// Forest expansion against the determinant, and extremal forests at polygon vertices.
    OcrsfCheck { input: String },
    /// Bijection between dual forest pairs and dimer covers of the superposition graph.
    TemperleyCheck { input: String },
    /// Invariance of the spectral curve under every applicable Y-Delta and Delta-Y move.
    Ydelta {
        input: String,
        /// Extra checks on random positive rational conductances.
        #[arg(long, default_value_t = 0)]
        trials: usize,
    },
    /// Iterate a move program and track the normalized characteristic polynomial.
    Evolve {
        input: String,
        /// Program file, or a bundled program name (hex1_program, tri2_cube).
        #[arg(long)]
        program: String,
        /// Number of iterations, overriding the program's own count.
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Sample the amoeba, count its holes and mark the spectral divisor.
    Amoeba { input: String },
    /// Locate the spectral divisor on the real ovals.
    Divisor { input: String },
    /// Discrete Abel map on a window of lifted vertices and faces.
    Abel {
        input: String,
        /// Half-width of the window, in fundamental domains.
        #[arg(long, default_value_t = 2)]
        radius: i64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Charpoly { .. } => "charpoly",
            Command::Zigzag { .. } => "zigzag",
            Command::Newton { .. } => "newton",
            Command::OcrsfCheck { .. } => "ocrsf-check",
            Command::TemperleyCheck { .. } => "temperley-check",
            Command::Ydelta { .. } => "ydelta",
            Command::Evolve { .. } => "evolve",
            Command::Amoeba { .. } => "amoeba",
            Command::Divisor { .. } => "divisor",
            Command::Abel { .. } => "abel",
        }
    }

    pub fn input(&self) -> &str {
        match self {
            Command::Validate { input }
            | Command::Charpoly { input }
            | Command::Zigzag { input }
            | Command::Newton { input }
            | Command::OcrsfCheck { input }
            | Command::TemperleyCheck { input }
            | Command::Ydelta { input, .. }
            | Command::Evolve { input, .. }
            | Command::Amoeba { input }
            | Command::Divisor { input }
            | Command::Abel { input, .. } => input,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("invalid input {name}: {message}")]
    Input { name: String, message: String },
    #[error(transparent)]
    Laplacian(#[from] LaplacianError),
    #[error(transparent)]
    ZigZag(#[from] ZigZagError),
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error(transparent)]
    Temperley(#[from] TemperleyError),
    #[error(transparent)]
    YDelta(#[from] YDeltaError),
    #[error(transparent)]
    Abel(#[from] AbelError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Input { .. } => 2,
            CliError::Read { .. } | CliError::Write { .. } => 3,
            _ => 1,
        }
    }
}

/// Everything one invocation needs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub options: Options,
    pub quadrants: Vec<[i8; 2]>,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let o = &cli.options;
        if !(o.tol.is_finite() && o.tol > 0.0) {
            return Err(CliError::Usage(format!("--tol must be positive, got {}", o.tol)));
        }
        if o.grid == Some(0) {
            return Err(CliError::Usage("--grid must be positive".into()));
        }
        let quadrants = parse_quadrants(&o.quadrants)?;
        Ok(RunConfig { command: cli.command, options: cli.options, quadrants })
    }

    pub fn exec(&self) -> Exec {
        if self.options.sequential {
            Exec::Sequential
        } else {
            Exec::Parallel
        }
    }

    /// Report file stem: input stem and command name.
    pub fn stem(&self) -> String {
        let input = self.command.input();
        let base = Path::new(input).file_stem().and_then(|s| s.to_str()).unwrap_or(input);
        format!("{base}_{}", self.command.name())
    }
}

pub fn parse_quadrants(s: &str) -> Result<Vec<[i8; 2]>, CliError> {
    let sign = |c: char| match c {
        '+' => Ok(1),
        '-' => Ok(-1),
        _ => Err(CliError::Usage(format!("bad quadrant sign {c:?} in {s:?}"))),
    };
    s.split(',')
        .map(|q| {
            let cs: Vec<char> = q.trim().chars().collect();
            match cs.as_slice() {
                [a, b] => Ok([sign(*a)?, sign(*b)?]),
                _ => Err(CliError::Usage(format!("quadrant {q:?} must be two signs like \"+-\""))),
            }
        })
        .collect()
}

/// Reads `arg` as a file when it exists, else as a bundled name.
fn resolve(arg: &str, bundled: &[(&str, &str)]) -> Result<String, CliError> {
    let path = Path::new(arg);
    if path.exists() {
        return fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source });
    }
    match bundled.iter().find(|(n, _)| *n == arg) {
        Some((_, src)) => Ok(src.to_string()),
        None => Err(CliError::Read { path: path.into(), source: io::Error::from(io::ErrorKind::NotFound) }),
    }
}

pub fn load_network(arg: &str) -> Result<Network, CliError> {
    let src = resolve(arg, &fixtures::NETWORKS)?;
    Network::from_json_str(&src).map_err(|e| CliError::Input { name: arg.into(), message: e.to_string() })
}

pub fn load_program(arg: &str) -> Result<MoveProgram, CliError> {
    let bundled = [("hex1_program", fixtures::HEX1_PROGRAM), ("tri2_cube", fixtures::CUBE_PROGRAM)];
    let src = resolve(arg, &bundled)?;
    MoveProgram::from_json_str(&src).map_err(|e| CliError::Input { name: arg.into(), message: e.to_string() })
}
