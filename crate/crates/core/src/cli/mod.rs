//! Batch front end for the `conic` binary.
//!
//! Every subcommand writes either JSON lines
//! `{"op":…,"inputs":…,"value":…,"diagnostics":…}` or a CSV table with a
//! fixed header. Exit status is 0 on success, 2 for invalid input and 3 for
//! numerical failures (including a failed `trace-check`).

mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::channels::ExtensionBC;
use crate::error::{Error, Result};
use crate::models::ModelSpec;
use commands::Output;
use config::{parse_grid, parse_model, parse_real, BcConfig, Format, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(
    name = "conic",
    version,
    about = "S-matrices, Krein determinants and spectra of conical models"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct CommonArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// `cone:angle=..`, `truncated-cone:angle=..,radius=..`, `torus[:v1x=..,…]`, `sphere[:z1=re;im,…]`.
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// `friedrichs`, `half`, `log`, `hexagon[:theta=..]`, `rotation:P.K=θ,…` or `@file.json`.
    #[arg(long, global = true)]
    pub bc: Option<String>,
    /// Comma-separated λ values.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// `start:end:count[:log]`.
    #[arg(long = "lambda-grid", global = true, allow_hyphen_values = true)]
    pub lambda_grid: Option<String>,
    /// Eigenvalue cutoff for spectral computations.
    #[arg(long, global = true)]
    pub max: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub out: Option<Format>,
    /// Worker threads for grid sweeps and root finding.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Pass tolerance for checks.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Diagonal S-matrix of the infinite cone on a λ grid.
    ConeSmatrix {
        #[arg(long, allow_hyphen_values = true)]
        angle: Option<String>,
    },
    /// Eigenvalues of the extension below --max.
    Spectrum,
    /// Spectral shift ξ and D(λ) on a λ grid.
    Shift,
    /// −D′/D against the eigenvalue sum at each λ.
    TraceCheck,
    /// e^{−Γ}·D*(0) with the asymptotic data.
    DetRatio,
    /// S̃(0) block at the 4π point of the sphere model.
    SphereS0 {
        /// Six points `re;im`; defaults to the regular hexagon.
        #[arg(long = "point", allow_hyphen_values = true)]
        points: Vec<String>,
    },
    /// S₀₀(λ) of the torus with one marked point.
    TorusS00 {
        /// `v1x,v1y,v2x,v2y`.
        #[arg(long, allow_hyphen_values = true)]
        lattice: Option<String>,
    },
    /// Relative zeta function from the two spectra.
    Relzeta {
        /// Extra values of s at which to evaluate ζ(s).
        #[arg(long = "s", value_delimiter = ',', allow_hyphen_values = true)]
        s: Vec<f64>,
        /// CSV spectrum of Δ_L (eigenvalue,multiplicity[,channel]).
        #[arg(long = "spectrum-l", requires = "spectrum_f")]
        spectrum_l: Option<PathBuf>,
        /// CSV spectrum of Δ_F.
        #[arg(long = "spectrum-f", requires = "spectrum_l")]
        spectrum_f: Option<PathBuf>,
    },
}

#[derive(Clone, Debug)]
pub enum BcSource {
    Preset(String),
    Explicit(ExtensionBC),
}

/// Flags merged over the config file over defaults.
#[derive(Clone, Debug)]
pub struct Settings {
    pub model: Option<ModelSpec>,
    pub bc: Option<BcSource>,
    pub lambdas: Vec<f64>,
    pub max: Option<f64>,
    pub format: Format,
    pub jobs: Option<usize>,
    pub tol: f64,
}

impl Settings {
    pub fn resolve(args: &CommonArgs, file: RunConfig) -> Result<Self> {
        let model = match &args.model {
            Some(m) => Some(parse_model(m)?),
            None => file.model,
        };
        let bc = match (&args.bc, file.bc) {
            (Some(b), _) => Some(BcSource::Preset(b.clone())),
            (None, Some(BcConfig::Preset { preset })) => Some(BcSource::Preset(preset)),
            (None, Some(BcConfig::Explicit(bc))) => Some(BcSource::Explicit(bc)),
            (None, None) => None,
        };
        let lam = file.lambda.unwrap_or_default();
        let mut lambdas = Vec::new();
        if args.lambda.is_some() || args.lambda_grid.is_some() {
            if let Some(l) = &args.lambda {
                for v in l.split(',').filter(|v| !v.trim().is_empty()) {
                    lambdas.push(parse_real(v)?);
                }
            }
            if let Some(g) = &args.lambda_grid {
                lambdas.extend(parse_grid(g)?.points()?);
            }
        } else {
            lambdas.extend(lam.values.unwrap_or_default());
            if let Some(g) = lam.grid {
                lambdas.extend(g.points()?);
            }
        }
        let out = file.output.unwrap_or_default();
        let jobs = args.jobs.or(out.jobs);
        if jobs == Some(0) {
            return Err(Error::Config("--jobs must be at least 1".into()));
        }
        Ok(Self {
            model,
            bc,
            lambdas,
            max: args.max.or(lam.max),
            format: args.out.or(out.format).unwrap_or_default(),
            jobs,
            tol: args
                .tol
                .or(file.tolerance.and_then(|t| t.check))
                .unwrap_or(DEFAULT_TOL),
        })
    }
}

/// Runs one parsed invocation and returns the rendered output and exit code.
pub fn execute(cli: &Cli) -> (String, i32) {
    match try_execute(cli) {
        Ok((out, ok)) => (out, if ok { EXIT_OK } else { EXIT_NUMERICAL }),
        Err(e) => {
            let code = if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_NUMERICAL
            };
            (format!("error: {e}\n"), code)
        }
    }
}

fn try_execute(cli: &Cli) -> Result<(String, bool)> {
    let file = match &cli.common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let settings = Settings::resolve(&cli.common, file)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = settings.jobs {
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| dispatch(&cli.command, &settings))
}

fn dispatch(cmd: &Command, s: &Settings) -> Result<(String, bool)> {
    let done = |o: Output| Ok((o.render(), true));
    match cmd {
        Command::ConeSmatrix { angle } => {
            let angle = match (angle, &s.model) {
                (Some(a), _) => parse_real(a)?,
                (None, Some(ModelSpec::Cone { angle })) => *angle,
                _ => return Err(Error::Config("cone-smatrix needs --angle".into())),
            };
            done(commands::cone_smatrix(s, angle)?)
        }
        Command::Spectrum => done(commands::spectrum(s)?),
        Command::Shift => done(commands::shift(s)?),
        Command::TraceCheck => {
            let (o, pass) = commands::trace_check(s)?;
            Ok((o.render(), pass))
        }
        Command::DetRatio => done(commands::det_ratio_cmd(s)?),
        Command::SphereS0 { points } => done(commands::sphere_s0(s, points)?),
        Command::TorusS00 { lattice } => done(commands::torus_s00(s, lattice.as_deref())?),
        Command::Relzeta {
            s: svals,
            spectrum_l,
            spectrum_f,
        } => {
            let files = spectrum_l.as_deref().zip(spectrum_f.as_deref());
            done(commands::relzeta(s, svals, files)?)
        }
    }
}

/// Entry point of the binary: parses `args`, prints, returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            };
        }
    };
    let (text, code) = execute(&cli);
    if text.starts_with("error:") {
        let _ = std::io::stderr().write_all(text.as_bytes());
    } else {
        let _ = std::io::stdout().write_all(text.as_bytes());
    }
    code
}
