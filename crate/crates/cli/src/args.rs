use std::path::PathBuf;

use arcmarkov::ineqlab::FROZEN_SLACK_C;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

/// Default seed of every randomized experiment.
pub const DEFAULT_SEED: u64 = 20_240_611;

#[derive(Parser, Debug)]
#[command(
    name = "arcmarkov",
    version,
    about = "Equilibrium measures, T-sets, fast decreasing polynomials and Markov/Bernstein checks",
    args_override_self = true
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// JSON config file: {"command": ..., "params": {...}, "seed": ..., ...}.
    /// Flags given on the command line override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub tol: Tolerances,
}

/// Tolerance knobs of the built-in assertions.
#[derive(Args, Debug, Clone, Copy, Serialize)]
pub struct Tolerances {
    /// Constant `c` of the envelope `1 + c / sqrt(n)`.
    #[arg(long, global = true, env = "ARCMARKOV_SLACK_C", default_value_t = FROZEN_SLACK_C)]
    pub slack_c: f64,
    /// Absolute tolerance of `--expect-ratio`.
    #[arg(long, global = true, env = "ARCMARKOV_RATIO_TOL", default_value_t = 1e-9)]
    pub ratio_tol: f64,
    /// Relative tolerance between the two endpoint-constant paths and of the
    /// endpoint identity.
    #[arg(long, global = true, env = "ARCMARKOV_OMEGA_TOL", default_value_t = 1e-6)]
    pub omega_tol: f64,
    /// Total mass tolerance of an equilibrium measure.
    #[arg(long, global = true, env = "ARCMARKOV_MASS_TOL", default_value_t = 1e-8)]
    pub mass_tol: f64,
    /// Level-set constancy of the symmetrized polynomial.
    #[arg(long, global = true, env = "ARCMARKOV_LEVEL_TOL", default_value_t = 1e-10)]
    pub level_tol: f64,
    /// Largest admitted sup-norm inflation of the symmetrized polynomial.
    #[arg(long, global = true, env = "ARCMARKOV_INFLATION_MAX", default_value_t = 0.05)]
    pub inflation_max: f64,
    /// Relative tolerance of the Faa di Bruno tool against exact composition.
    #[arg(long, global = true, env = "ARCMARKOV_FAA_TOL", default_value_t = 1e-10)]
    pub faa_tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "command", content = "params", rename_all = "kebab-case")]
pub enum Command {
    /// Solve the equilibrium measure of a union of arcs.
    EqMeasure(EqArgs),
    /// Analyze an admissible U and export its T-set descriptor.
    Tset(TSetCmd),
    /// Build a fast decreasing polynomial and check its properties.
    Fastdecay(FdArgs),
    /// Endpoint Markov checks: sharpness scan or upper-bound suite.
    VerifyMarkov(MarkovArgs),
    /// Interior Bernstein checks on a grid.
    VerifyBernstein(BernsteinArgs),
    /// Symmetrization experiment along a degree ladder.
    Symmetrize(SymArgs),
    /// Faa di Bruno derivatives of P(U(t)) against exact composition.
    Faa(FaaArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::EqMeasure(_) => "eq-measure",
            Self::Tset(_) => "tset",
            Self::Fastdecay(_) => "fastdecay",
            Self::VerifyMarkov(_) => "verify-markov",
            Self::VerifyBernstein(_) => "verify-bernstein",
            Self::Symmetrize(_) => "symmetrize",
            Self::Faa(_) => "faa",
        }
    }

    pub fn default_format(&self) -> Format {
        match self {
            Self::EqMeasure(_) | Self::Tset(_) | Self::Fastdecay(_) => Format::Json,
            _ => Format::Csv,
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EqArgs {
    /// Arc endpoints in radians: a JSON list `[l1, r1, l2, r2, ...]`, a list
    /// of pairs `[[l1, r1], ...]`, or plain comma-separated values.
    #[arg(long, value_parser = parse_arcs, allow_hyphen_values = true)]
    pub arcs: Arcs,
    /// Endpoint at which to evaluate the endpoint constant.
    #[arg(long, allow_hyphen_values = true)]
    pub endpoint: Option<f64>,
    /// Density samples per arc in CSV output.
    #[arg(long, default_value_t = 64)]
    pub per_arc: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Arcs(pub Vec<f64>);

fn parse_arcs(s: &str) -> Result<Arcs, String> {
    let s = s.trim();
    if s.starts_with('[') {
        if let Ok(flat) = serde_json::from_str::<Vec<f64>>(s) {
            return Ok(Arcs(flat));
        }
        return serde_json::from_str::<Vec<[f64; 2]>>(s)
            .map(|pairs| Arcs(pairs.into_iter().flatten().collect()))
            .map_err(|e| format!("arcs: {e}"));
    }
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("arcs: {e}")))
        .collect::<Result<_, _>>()
        .map(Arcs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// `[-theta0, theta0]` with `U` of degree 1.
    Single,
    /// `{c - h <= cos t <= c + h}` with `U` of degree 2.
    Two,
}

/// Selects the T-set: a preset, or a custom `U` through its coefficients.
#[derive(Args, Debug, Clone, Serialize)]
pub struct TSetArgs {
    #[arg(long, value_enum, default_value = "single")]
    pub tset: Preset,
    #[arg(long, default_value_t = 2.0)]
    pub theta0: f64,
    #[arg(long, default_value_t = 0.2, allow_hyphen_values = true)]
    pub c: f64,
    #[arg(long, default_value_t = 0.5)]
    pub h: f64,
    /// Rotation of the preset.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub shift: f64,
    /// Cosine coefficients of a custom `U`; overrides the preset.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub u_cos: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub u_sin: Vec<f64>,
    /// Endpoint `a`; the right end of the last component when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub endpoint: Option<f64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct TSetCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub set: TSetArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct FdArgs {
    /// JSON spec with `"kind": "algebraic"` or `"kind": "trigonometric"`.
    #[arg(long)]
    pub spec: PathBuf,
    /// Rebuild at these degrees and fit the decay rate.
    #[arg(long, value_delimiter = ',')]
    pub ladder: Vec<usize>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MarkovArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub set: TSetArgs,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Extremal family indices `l` of the sharpness scan.
    #[arg(long, value_delimiter = ',')]
    pub l: Vec<usize>,
    /// Run the upper-bound suite on a seeded corpus for orders `1..=k`
    /// instead of the scan.
    #[arg(long)]
    pub suite: bool,
    /// Random polynomials in the suite corpus.
    #[arg(long, default_value_t = 200)]
    pub corpus_size: usize,
    /// Assert every scan ratio equals this value.
    #[arg(long)]
    pub expect_ratio: Option<f64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BernsteinArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub set: TSetArgs,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Test `T_l o U`.
    #[arg(long, default_value_t = 5)]
    pub l: usize,
    /// Test a seeded random polynomial of this degree instead.
    #[arg(long)]
    pub random_degree: Option<usize>,
    /// Interior grid points per component.
    #[arg(long, default_value_t = 25)]
    pub points: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SymArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub set: TSetArgs,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Degrees of the random polynomials `T`.
    #[arg(long, value_delimiter = ',', default_value = "64,128,256")]
    pub n: Vec<usize>,
    /// The peaking factor gets degree `l_factor * floor(sqrt(n))`.
    #[arg(long, default_value_t = 16)]
    pub l_factor: usize,
    /// Zero order of the peaking factor; `2 k^2` when absent.
    #[arg(long)]
    pub order: Option<u32>,
    #[arg(long, default_value_t = 100)]
    pub level_samples: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct FaaArgs {
    /// Coefficients of the outer polynomial `P`, constant term first.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub outer: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub inner_cos: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub inner_sin: Vec<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t: f64,
    /// Derivative orders.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub k: Vec<usize>,
    /// Check this many seeded random pairs (orders 1..=6) instead.
    #[arg(long, default_value_t = 0)]
    pub random: usize,
}
