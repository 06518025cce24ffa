use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::equilibrium::DEFAULT_Q_GRID;
use crate::error::{invalid, Result};
use crate::hetero::CostDensity;
use crate::mean_field::{SamplingDistribution, DEFAULT_TOL};
use crate::sim::{DEFAULT_BATCHES, DEFAULT_TAGGED_FRACTION};

/// Seed used when neither `--seed` nor `SUPERMARKET_SEED` is given.
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// A fully resolved command: what `replay` re-runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub command: Command,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum Command {
    Tail(TailParams),
    Nash(NashParams),
    Brfig(BrfigParams),
    Vfig(VfigParams),
    Socopt(SocoptParams),
    Hetero(HeteroParams),
    Simulate(SimulateParams),
    Couple(CoupleParams),
    Externality(ExternalityParams),
    Deviation(DeviationParams),
    Ode(OdeParams),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Tail(_) => "tail",
            Command::Nash(_) => "nash",
            Command::Brfig(_) => "brfig",
            Command::Vfig(_) => "vfig",
            Command::Socopt(_) => "socopt",
            Command::Hetero(_) => "hetero",
            Command::Simulate(_) => "simulate",
            Command::Couple(_) => "couple",
            Command::Externality(_) => "externality",
            Command::Deviation(_) => "deviation",
            Command::Ode(_) => "ode",
        }
    }

    /// Output format when none is requested.
    pub fn default_format(&self) -> OutputFormat {
        match self {
            Command::Tail(_) | Command::Brfig(_) | Command::Vfig(_) | Command::Ode(_) => OutputFormat::Csv,
            _ => OutputFormat::Json,
        }
    }

    /// Whether the result depends on a random seed.
    pub fn is_seeded(&self) -> bool {
        matches!(
            self,
            Command::Simulate(_) | Command::Couple(_) | Command::Externality(_) | Command::Deviation(_)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct TailParams {
    #[arg(long)]
    pub lambda: f64,
    /// Sample count as a real in [1, lmax], or comma-separated masses.
    #[arg(long)]
    pub mu: String,
    #[arg(long)]
    #[serde(default)]
    pub lmax: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct NashParams {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long = "cs-over-c")]
    pub cs_over_c: f64,
    #[arg(long)]
    pub lmax: usize,
    #[arg(long, default_value_t = DEFAULT_Q_GRID)]
    pub q_grid: usize,
    /// Return one equilibrium instead of enumerating all of them.
    #[arg(long)]
    #[serde(default)]
    pub single: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct BrfigParams {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long = "cs-over-c")]
    pub cs_over_c: f64,
    #[arg(long)]
    pub lmax: usize,
    /// Spacing of the opponent strategies on [1, lmax].
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct VfigParams {
    #[arg(long)]
    pub lambda: f64,
    /// Own sample count.
    #[arg(long)]
    pub l: usize,
    /// Opponent strategies `a:b`, reals in [1, lmax].
    #[arg(long = "opponent-range")]
    pub opponent_range: String,
    #[arg(long, default_value_t = 1.0)]
    pub step: f64,
    /// Defaults to the smallest value covering both `l + 1` and the range.
    #[arg(long)]
    #[serde(default)]
    pub lmax: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct SocoptParams {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long = "cs-over-c")]
    pub cs_over_c: f64,
    #[arg(long)]
    pub lmax: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub refine_tol: f64,
}

/// `hetero` flags; resolved into [`HeteroParams`] by reading the density.
#[derive(Debug, Clone, Args)]
pub struct HeteroArgs {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub cs: f64,
    #[arg(long)]
    pub lmax: usize,
    /// JSON density config, e.g. `{"kind":"uniform","c_max":1.0}`.
    #[arg(long, conflicts_with = "uniform", required_unless_present = "uniform")]
    pub density: Option<PathBuf>,
    /// Shorthand for a uniform density on [0, C_MAX].
    #[arg(long)]
    pub uniform: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub damping: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeteroParams {
    pub lambda: f64,
    pub c_s: f64,
    pub l_max: usize,
    pub density: CostDensity,
    pub damping: f64,
    pub max_iter: usize,
}

impl HeteroArgs {
    pub fn resolve(self) -> Result<HeteroParams> {
        let density = match (self.density, self.uniform) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str(&text).map_err(|e| invalid(format!("bad density config: {e}")))?
            }
            (None, Some(c_max)) => CostDensity::uniform(c_max)?,
            (None, None) => return Err(invalid("give --density or --uniform")),
        };
        Ok(HeteroParams {
            lambda: self.lambda,
            c_s: self.cs,
            l_max: self.lmax,
            density,
            damping: self.damping,
            max_iter: self.max_iter,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct SimulateParams {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub mu: String,
    #[arg(long)]
    #[serde(default)]
    pub lmax: Option<usize>,
    #[arg(long)]
    pub horizon: f64,
    #[arg(long)]
    #[serde(default)]
    pub warmup: Option<f64>,
    #[arg(long, env = "SUPERMARKET_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.0)]
    #[serde(default)]
    pub tagged_fraction: f64,
    #[arg(long)]
    #[serde(default)]
    pub tagged_l: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_BATCHES)]
    pub batches: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct CoupleParams {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub lambda: f64,
    /// Strategy of the system that samples less.
    #[arg(long)]
    pub mu1: String,
    #[arg(long)]
    pub mu2: String,
    #[arg(long)]
    #[serde(default)]
    pub lmax: Option<usize>,
    #[arg(long)]
    pub horizon: f64,
    #[arg(long, default_value_t = 0.0)]
    pub warmup: f64,
    #[arg(long, env = "SUPERMARKET_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct ExternalityParams {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 2.0e6)]
    pub horizon: f64,
    #[arg(long, default_value_t = 1000.0)]
    pub warmup: f64,
    #[arg(long, env = "SUPERMARKET_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct DeviationParams {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub lambda: f64,
    /// Population strategy.
    #[arg(long)]
    pub mu: String,
    #[arg(long)]
    #[serde(default)]
    pub lmax: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long)]
    pub cs: f64,
    /// Deviation to evaluate; every `1..=lmax` when absent.
    #[arg(long)]
    #[serde(default)]
    pub tagged_l: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_TAGGED_FRACTION)]
    pub tagged_fraction: f64,
    #[arg(long)]
    pub horizon: f64,
    #[arg(long)]
    #[serde(default)]
    pub warmup: Option<f64>,
    #[arg(long, env = "SUPERMARKET_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_BATCHES)]
    pub batches: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct OdeParams {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub mu: String,
    #[arg(long)]
    #[serde(default)]
    pub lmax: Option<usize>,
    /// `empty`, or comma-separated tail values starting at `r(0) = 1`.
    #[arg(long, default_value = "empty")]
    pub init: String,
    #[arg(long)]
    pub t_end: f64,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    /// Keep every `stride`-th step.
    #[arg(long, default_value_t = 100)]
    pub stride: usize,
    /// Largest `k` written to the CSV.
    #[arg(long, default_value_t = 10)]
    pub max_k: usize,
}

/// Parses a strategy: one real `s` (mass split between `⌊s⌋` and `⌈s⌉`) or
/// a comma-separated mass vector over `1..`.
pub fn parse_mu(text: &str, lmax: Option<usize>) -> Result<SamplingDistribution> {
    let text = text.trim();
    if text.contains(',') {
        let mut mass = text
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|e| invalid(format!("bad mass {p:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(l_max) = lmax {
            if l_max < mass.len() {
                return Err(invalid(format!("{} masses given but lmax is {l_max}", mass.len())));
            }
            mass.resize(l_max, 0.0);
        }
        return SamplingDistribution::new(mass);
    }
    let s: f64 = text
        .parse()
        .map_err(|e| invalid(format!("bad strategy {text:?}: {e}")))?;
    if !(s >= 1.0 && s.is_finite()) {
        return Err(invalid(format!("strategy must be >= 1, got {s}")));
    }
    SamplingDistribution::from_real(s, lmax.unwrap_or(s.ceil() as usize))
}

/// Parses `a:b` into an increasing pair of reals.
pub fn parse_range(text: &str) -> Result<(f64, f64)> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| invalid(format!("range must look like a:b, got {text:?}")))?;
    let parse = |p: &str| {
        p.trim()
            .parse::<f64>()
            .map_err(|e| invalid(format!("bad range end {p:?}: {e}")))
    };
    let (a, b) = (parse(a)?, parse(b)?);
    if !(a <= b) {
        return Err(invalid(format!("empty range {text:?}")));
    }
    Ok((a, b))
}

/// `a, a + step, ...` up to `b` inclusive, computed without accumulation.
pub fn grid(a: f64, b: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(invalid(format!("step must be > 0, got {step}")));
    }
    let count = ((b - a) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| a + i as f64 * step).collect())
}
