//! Flag parsing and resolution against an optional JSON config file.
//!
//! Precedence, highest first: command-line flags, the `--config` file, the
//! `ELGI_SEED` environment variable (seed only), built-in defaults.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use elgi_core::protocols::MeasurementMode;
use elgi_core::sampling::{ShotConfig, DEFAULT_REPS, DEFAULT_SEED, DEFAULT_SHOTS};
use elgi_core::Spin;
use serde::{Deserialize, Serialize};

use crate::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Probabilities,
    Deficit,
    Sweep,
    Joint3,
    Feasibility,
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    fn from_extension(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(Self::Csv),
            "json" => Some(Self::Json),
            "svg" => Some(Self::Svg),
            _ => None,
        }
    }
}

/// Inclusive, evenly spaced angle grid `start:stop:points`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                if k + 1 == self.points {
                    self.stop
                } else {
                    self.start + step * k as f64
                }
            })
            .collect()
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, points] = parts[..] else {
            return Err(format!("expected start:stop:points, got '{s}'"));
        };
        let points: usize = points
            .trim()
            .parse()
            .map_err(|_| format!("grid point count '{points}' is not a positive integer"))?;
        if points == 0 {
            return Err("grid needs at least one point".into());
        }
        Ok(Self {
            start: parse_angle(start)?,
            stop: parse_angle(stop)?,
            points,
        })
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.points)
    }
}

/// Parses a finite angle in radians. Besides plain numbers, multiples and
/// fractions of pi are accepted: `pi`, `-pi/4`, `3pi/8`, `2*pi`.
pub fn parse_angle(s: &str) -> std::result::Result<f64, String> {
    let text = s.trim().to_ascii_lowercase();
    let value = match text.parse::<f64>() {
        Ok(v) => v,
        Err(_) => {
            let (sign, body) = match text.strip_prefix('-') {
                Some(rest) => (-1.0, rest),
                None => (1.0, text.as_str()),
            };
            let Some((coef, rest)) = body.split_once("pi") else {
                return Err(format!("'{s}' is not an angle"));
            };
            let coef = coef.trim().trim_end_matches('*').trim();
            let coef = if coef.is_empty() {
                1.0
            } else {
                coef.parse::<f64>().map_err(|_| format!("'{s}' is not an angle"))?
            };
            let den = match rest.trim() {
                "" => 1.0,
                r => r
                    .strip_prefix('/')
                    .and_then(|d| d.trim().parse::<f64>().ok())
                    .ok_or_else(|| format!("'{s}' is not an angle"))?,
            };
            sign * coef * PI / den
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("angle '{s}' is not finite"))
    }
}

/// Flags shared by every command. Unset flags fall back to the config file,
/// then to defaults.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Args {
    /// Spin quantum number (0.5, 1, 1.5, ...).
    #[arg(long)]
    pub s: Option<f64>,
    /// Number of measurement times for deficit and sweep.
    #[arg(long)]
    pub n: Option<usize>,
    /// Single rotation angle in radians; accepts forms like pi/4.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_angle, conflicts_with = "theta_grid")]
    pub theta: Option<f64>,
    /// Inclusive angle grid start:stop:points.
    #[arg(long = "theta-grid", allow_hyphen_values = true)]
    pub theta_grid: Option<GridSpec>,
    /// cnot, anticnot, inrm or analytic.
    #[arg(long)]
    pub mode: Option<MeasurementMode>,
    /// Shots per sampled table; enables sampled columns where supported.
    #[arg(long)]
    pub shots: Option<u64>,
    /// Repetitions for sampled estimates.
    #[arg(long)]
    pub reps: Option<usize>,
    /// RNG seed for sampling.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Symmetric readout error probability applied before sampling.
    #[arg(long = "readout-flip")]
    pub readout_flip: Option<f64>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format; inferred from the --out extension, else csv.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON file with defaults for any of the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum AngleValue {
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    s: Option<f64>,
    n: Option<usize>,
    theta: Option<AngleValue>,
    theta_grid: Option<String>,
    mode: Option<MeasurementMode>,
    shots: Option<u64>,
    reps: Option<usize>,
    seed: Option<u64>,
    readout_flip: Option<f64>,
    out: Option<PathBuf>,
    format: Option<Format>,
}

impl FileConfig {
    fn load(path: &Path) -> Result<Self> {
        let err = |msg: String| CliError::Config {
            path: path.to_path_buf(),
            msg,
        };
        let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
        serde_json::from_str(&text).map_err(|e| err(e.to_string()))
    }
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub s: Spin,
    pub n: usize,
    pub theta_grid: Vec<f64>,
    pub mode: MeasurementMode,
    pub shots: Option<u64>,
    pub reps: usize,
    pub seed: u64,
    pub readout_flip: f64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub format: Format,
}

impl RunConfig {
    pub fn resolve(command: CommandKind, args: &Args, env_seed: Option<&str>) -> Result<Self> {
        let file = match &args.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };

        let s = args.s.or(file.s).unwrap_or(0.5);
        let n = args.n.or(file.n).unwrap_or(3);
        let theta_grid = match (args.theta, args.theta_grid) {
            (Some(t), _) => vec![t],
            (None, Some(g)) => g.values(),
            (None, None) => match (&file.theta, &file.theta_grid) {
                (Some(_), Some(_)) => {
                    return Err(CliError::Usage("config sets both theta and theta_grid".into()));
                }
                (Some(AngleValue::Number(t)), None) => vec![check_finite(*t)?],
                (Some(AngleValue::Text(t)), None) => vec![parse_angle(t).map_err(CliError::Usage)?],
                (None, Some(g)) => g.parse::<GridSpec>().map_err(CliError::Usage)?.values(),
                (None, None) => default_grid(command).values(),
            },
        };
        let seed = match args.seed.or(file.seed) {
            Some(seed) => seed,
            None => match env_seed {
                Some(text) => text
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Usage(format!("ELGI_SEED '{text}' is not an unsigned integer")))?,
                None => DEFAULT_SEED,
            },
        };
        let out = args.out.clone().or(file.out);
        let format = args
            .format
            .or(file.format)
            .or_else(|| out.as_deref().and_then(Format::from_extension))
            .unwrap_or(Format::Csv);
        let shots = args.shots.or(file.shots);

        let cfg = Self {
            command,
            s: Spin::new(s)?,
            n,
            theta_grid,
            mode: args.mode.or(file.mode).unwrap_or(MeasurementMode::Analytic),
            shots: if command == CommandKind::Sample {
                Some(shots.unwrap_or(DEFAULT_SHOTS))
            } else {
                shots
            },
            reps: args.reps.or(file.reps).unwrap_or(DEFAULT_REPS),
            seed,
            readout_flip: args.readout_flip.or(file.readout_flip).unwrap_or(0.0),
            out,
            format,
        };
        // validates shots, reps and the flip probability up front
        if cfg.shots.is_some() {
            cfg.shot_config()?;
        }
        Ok(cfg)
    }

    /// Sampling settings, if shots are configured.
    pub fn shot_config(&self) -> Result<Option<ShotConfig>> {
        self.shots
            .map(|shots| ShotConfig::new(shots, self.reps, self.seed, self.readout_flip).map_err(CliError::from))
            .transpose()
    }
}

fn check_finite(t: f64) -> Result<f64> {
    if t.is_finite() {
        Ok(t)
    } else {
        Err(CliError::Usage(format!("angle {t} is not finite")))
    }
}

fn default_grid(command: CommandKind) -> GridSpec {
    let (start, stop, points) = match command {
        CommandKind::Probabilities => (0.0, 2.0 * PI, 101),
        CommandKind::Sweep => (0.0, PI, 201),
        CommandKind::Joint3 | CommandKind::Feasibility => (0.0, FRAC_PI_2, 51),
        CommandKind::Deficit | CommandKind::Sample => (FRAC_PI_4, FRAC_PI_4, 1),
    };
    GridSpec { start, stop, points }
}
