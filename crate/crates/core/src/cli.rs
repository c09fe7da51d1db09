//! Command-line front end.
//!
//! Every command prints one report on standard output and maps its verdict to
//! the exit status: 0 for a pass, 1 for a failing verdict, 2 for usage and
//! domain errors.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::classify::{check_pseudo_structure, classify_1d, classify_2d};
use crate::error::Error;
use crate::frame::{check_onb, default_test_suite, parseval_shells, shells_to_csv, OnbOptions};
use crate::ortho::{check_orthogonality_with, OrthoOptions, DEFAULT_QUAD_TOL};
use crate::random;
use crate::sets::{make_2d_theorem, BoxRegion, StripAxis, StructuredSet, TilingAxis};
use crate::stft::{in_zero_set_with, stft_magnitude, stft_nd, stft_quadrature, Window, DEFAULT_INT_TOL};
use crate::tiling::{check_tiling_with, convolution_oracle, estimate_density, UnitCubeIndicator};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "GABOR_CUBE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "gabor-cube", version, about = "Gabor orthonormal bases for the unit-cube window")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Half-width of the query box `[-r, r)^n`; verdicts apply to the box shrunk by 1.
    #[arg(long, global = true, default_value_t = 3.0)]
    pub radius: f64,
    /// Tolerance for deciding that a number is an integer.
    #[arg(long, global = true, default_value_t = DEFAULT_INT_TOL)]
    pub eps_int: f64,
    /// Absolute tolerance for quadrature cross-checks.
    #[arg(long, global = true, default_value_t = DEFAULT_QUAD_TOL)]
    pub quad_tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Shorthand for `--format csv`.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

impl RunConfig {
    fn format(&self) -> Format {
        if self.csv {
            Format::Csv
        } else {
            self.format
        }
    }

    fn ortho(&self) -> OrthoOptions {
        OrthoOptions { eps_int: self.eps_int, quad_tol: self.quad_tol }
    }

    fn query_box(&self, dim: usize) -> Result<BoxRegion, Error> {
        BoxRegion::centered(dim, self.radius)
    }

    fn tiling_box(&self, dim: usize) -> Result<BoxRegion, Error> {
        if !(self.radius >= 2.0) {
            return Err(Error::Domain(format!("--radius must be at least 2 for tiling checks, got {}", self.radius)));
        }
        self.query_box(dim)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WindowKind {
    Cube,
    Secant,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the window's self-transform at one point.
    EvalStft {
        #[arg(long, value_enum, default_value_t = WindowKind::Cube)]
        window: WindowKind,
        /// Time shift, comma separated for d > 1.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        t: Vec<f64>,
        /// Frequency shift, comma separated for d > 1.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        nu: Vec<f64>,
    },
    /// Orthogonality, tiling or basis checks.
    Check {
        #[command(subcommand)]
        what: CheckCommand,
    },
    /// Recognize the structure of a verified basis.
    Classify {
        input: String,
        /// Check the pseudo-standard structure with `m` base coordinates instead.
        #[arg(long)]
        pseudo: Option<usize>,
    },
    /// Validate a set (or the `set` of a classification) and print its canonical form.
    Construct { input: String },
    /// Point counts per unit volume on `[-T, T)^n`.
    Density {
        input: String,
        #[arg(long = "half-width", value_delimiter = ',', default_values_t = [4.0, 8.0])]
        half_width: Vec<f64>,
    },
    /// Seeded random draws from a family, each checked as a basis.
    Sweep {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum CheckCommand {
    Ortho {
        input: String,
        #[arg(long, value_enum, default_value_t = WindowKind::Cube)]
        window: WindowKind,
    },
    Tiling {
        input: String,
        /// Grid spacing of the CSV coverage dump.
        #[arg(long, default_value_t = 0.0625)]
        resolution: f64,
    },
    Onb {
        input: String,
        /// Frequency truncation of the Parseval sums.
        #[arg(long, default_value_t = 64.0)]
        freq_radius: f64,
        /// Test function whose shells are dumped as CSV.
        #[arg(long, default_value = "cube_0.3_0.8")]
        test_function: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Rows,
    Columns,
    Standard1d,
    Horizontal,
    Vertical,
    Pseudo,
}

/// Output of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

impl Outcome {
    fn json<T: Serialize>(value: &T, pass: bool) -> Result<Self, Error> {
        let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Consistency(e.to_string()))?;
        s.push('\n');
        Ok(Outcome { code: if pass { EXIT_PASS } else { EXIT_FAIL }, stdout: s })
    }

    fn text(stdout: String, pass: bool) -> Self {
        Outcome { code: if pass { EXIT_PASS } else { EXIT_FAIL }, stdout }
    }
}

/// Exit code for an error: usage and domain problems are 2, everything else is a failing verdict.
pub fn error_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::UnsupportedWindow(_) => EXIT_USAGE,
        _ => EXIT_FAIL,
    }
}

pub fn error_report(e: &Error) -> String {
    let mut s = serde_json::to_string_pretty(&json!({ "error": e.to_string() })).unwrap_or_default();
    s.push('\n');
    s
}

/// Reads a JSON document from a path, `-` for standard input, or inline text starting with `{`.
pub fn read_input(input: &str) -> Result<(String, Value), Error> {
    let text = if input.trim_start().starts_with('{') {
        input.to_string()
    } else if input == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(|e| Error::Domain(format!("reading stdin: {e}")))?
    } else {
        let path = PathBuf::from(input);
        std::fs::read_to_string(&path).map_err(|e| Error::Domain(format!("reading {}: {e}", path.display())))?
    };
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Error::Domain(format!("malformed JSON at line {}, column {}: {e}", e.line(), e.column())))?;
    Ok((text, value))
}

/// The set in a document: either the document itself or its `set` field.
pub fn parse_set(value: &Value) -> Result<StructuredSet, Error> {
    let inner = match value.get("set") {
        Some(v) if value.get("kind").is_none() => v,
        _ => value,
    };
    let set: StructuredSet =
        serde_json::from_value(inner.clone()).map_err(|e| Error::Domain(format!("not a structured set: {e}")))?;
    set.validate().map_err(|e| Error::Domain(e.to_string()))?;
    Ok(set)
}

fn load_set(input: &str) -> Result<StructuredSet, Error> {
    parse_set(&read_input(input)?.1)
}

fn window_for(kind: WindowKind, dim: usize) -> Result<Window, Error> {
    match kind {
        WindowKind::Cube => Window::unit_cube(dim),
        WindowKind::Secant if dim == 1 => Ok(Window::HyperbolicSecant),
        WindowKind::Secant => Err(Error::Domain("the secant window is one-dimensional".into())),
    }
}

fn tf_dim(set: &StructuredSet) -> Result<usize, Error> {
    if !set.dim().is_multiple_of(2) {
        return Err(Error::Domain(format!("a time-frequency set needs even dimension, got {}", set.dim())));
    }
    Ok(set.dim() / 2)
}

/// Runs a command; errors are turned into an exit code and a JSON error report.
pub fn run(cli: &Cli) -> Outcome {
    match dispatch(cli) {
        Ok(o) => o,
        Err(e) => Outcome { code: error_code(&e), stdout: error_report(&e) },
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome, Error> {
    let cfg = &cli.config;
    for (name, v) in [("--eps-int", cfg.eps_int), ("--quad-tol", cfg.quad_tol)] {
        if !(v > 0.0) {
            return Err(Error::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    match &cli.command {
        Command::EvalStft { window, t, nu } => eval_stft(cfg, *window, t, nu),
        Command::Check { what } => match what {
            CheckCommand::Ortho { input, window } => {
                let set = load_set(input)?;
                let w = window_for(*window, tf_dim(&set)?)?;
                let report = check_orthogonality_with(&set, &w, &cfg.query_box(set.dim())?, cfg.ortho())?;
                Outcome::json(&report, report.verdict)
            }
            CheckCommand::Tiling { input, resolution } => {
                let set = load_set(input)?;
                let bx = cfg.tiling_box(set.dim())?;
                let pts = set.enumerate(&bx)?;
                let report = check_tiling_with(&pts, &bx, cfg.eps_int)?;
                if cfg.format() == Format::Csv {
                    let grid = convolution_oracle(&UnitCubeIndicator { dim: set.dim() }, &pts, &bx, *resolution)?;
                    return Ok(Outcome::text(grid.to_csv()?, report.is_tiling()));
                }
                Outcome::json(&report, report.is_tiling())
            }
            CheckCommand::Onb { input, freq_radius, test_function } => {
                let set = load_set(input)?;
                let d = tf_dim(&set)?;
                let w = Window::unit_cube(d)?;
                let tests = default_test_suite(d)?;
                if cfg.format() == Format::Csv {
                    let f = tests
                        .iter()
                        .find(|f| &f.id == test_function)
                        .ok_or_else(|| Error::Domain(format!("unknown test function {test_function}")))?;
                    let radii: Vec<f64> = (0..=freq_radius.floor() as i64).map(|r| r as f64).collect();
                    let rows = parseval_shells(f, &set, &w, &f.truncation_box(*freq_radius)?, &radii)?;
                    return Ok(Outcome::text(shells_to_csv(&rows), true));
                }
                let opts = OnbOptions { ortho: cfg.ortho(), freq_radius: *freq_radius };
                let v = check_onb(&set, &w, &tests, &cfg.tiling_box(set.dim())?, opts)?;
                Outcome::json(&v, v.verdict)
            }
        },
        Command::Classify { input, pseudo } => {
            let set = load_set(input)?;
            let bx = cfg.tiling_box(set.dim())?;
            if let Some(m) = pseudo {
                let r = check_pseudo_structure(&set, *m, &bx)?;
                return Outcome::json(&r, r.holds);
            }
            match tf_dim(&set)? {
                1 => {
                    let c = classify_1d(&set, &bx)?;
                    let pass = matches!(c, crate::classify::Outcome1D::Standard(_));
                    Outcome::json(&c, pass)
                }
                2 => Outcome::json(&classify_2d(&set, &bx)?, true),
                d => Err(Error::Domain(format!("classification is available for d = 1, 2 (got d = {d})"))),
            }
        }
        Command::Construct { input } => Outcome::json(&load_set(input)?.canonical(), true),
        Command::Density { input, half_width } => {
            let set = load_set(input)?;
            let n = set.dim();
            let mut rows = Vec::new();
            let mut pass = true;
            for &t in half_width {
                let pts = set.enumerate(&BoxRegion::centered(n, t)?)?;
                let density = estimate_density(&pts, t)?;
                let bound = 2.0 * n as f64 / t;
                let ok = (density - 1.0).abs() <= bound;
                pass &= ok;
                rows.push(json!({ "half_width": t, "density": density, "bound": bound, "within_bound": ok }));
            }
            if cfg.format() == Format::Csv {
                let mut s = String::from("radius,value\n");
                for r in &rows {
                    let _ = writeln!(s, "{},{}", r["half_width"], r["density"]);
                }
                return Ok(Outcome::text(s, pass));
            }
            Outcome::json(&json!({ "densities": rows }), pass)
        }
        Command::Sweep { family, count } => sweep(cfg, *family, *count),
    }
}

fn eval_stft(cfg: &RunConfig, kind: WindowKind, t: &[f64], nu: &[f64]) -> Result<Outcome, Error> {
    let w = window_for(kind, t.len())?;
    let magnitude = stft_magnitude(&w, t, nu)?;
    let zero = in_zero_set_with(&w, t, nu, cfg.eps_int)?;
    let quad = stft_quadrature(&w, t, nu, cfg.quad_tol)?;
    let value = match w {
        Window::UnitCube { .. } => {
            let v = stft_nd(t, nu)?;
            json!([v.re, v.im])
        }
        Window::HyperbolicSecant => Value::Null,
    };
    Outcome::json(
        &json!({
            "t": t,
            "nu": nu,
            "value": value,
            "magnitude": magnitude,
            "in_zero_set": zero,
            "quadrature_magnitude": quad.norm(),
        }),
        true,
    )
}

fn sweep(cfg: &RunConfig, family: Family, count: usize) -> Result<Outcome, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut draws = Vec::with_capacity(count);
    let mut pass = true;
    for i in 0..count {
        let set = match family {
            Family::Rows => random::random_cube_tiling(&mut rng, TilingAxis::Rows, 6, false)?,
            Family::Columns => random::random_cube_tiling(&mut rng, TilingAxis::Columns, 6, false)?,
            Family::Standard1d => random::random_standard_1d(&mut rng, 6)?.set,
            Family::Horizontal => make_2d_theorem(random::random_2d_theorem(&mut rng, StripAxis::Horizontal, 4)?)?,
            Family::Vertical => make_2d_theorem(random::random_2d_theorem(&mut rng, StripAxis::Vertical, 4)?)?,
            Family::Pseudo => random::random_pseudo_standard(&mut rng, 4)?,
        };
        let bx = cfg.tiling_box(set.dim())?;
        let (ortho, tiles) = if set.dim() == 2 && matches!(family, Family::Rows | Family::Columns) {
            // square tilings: only the tiling half is expected to hold
            let pts = set.enumerate(&bx)?;
            (None, check_tiling_with(&pts, &bx, cfg.eps_int)?.is_tiling())
        } else {
            let w = Window::unit_cube(set.dim() / 2)?;
            let o = check_orthogonality_with(&set, &w, &bx, cfg.ortho())?.verdict;
            (Some(o), check_tiling_with(&set.enumerate(&bx)?, &bx, cfg.eps_int)?.is_tiling())
        };
        let ok = tiles && ortho.unwrap_or(true);
        pass &= ok;
        draws.push(json!({ "draw": i, "tiling": tiles, "orthogonal": ortho, "pass": ok }));
    }
    Outcome::json(&json!({ "family": format!("{family:?}").to_lowercase(), "seed": cfg.seed, "draws": draws }), pass)
}

/// Applies `GABOR_CUBE_THREADS` to the global thread pool.
pub fn configure_threads() -> Result<(), Error> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::Domain(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    }
    Ok(())
}
