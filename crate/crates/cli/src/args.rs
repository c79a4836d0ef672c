use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polybundle::problems::MaxCutSense;
use polybundle::solver::{LmaxPolicy, ParamError};
use polybundle::SolverParams;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "polybundle", version, about = "Polyhedral bundle method for semidefinite programs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an SDPA (.dat-s) instance or a generator manifest (.json).
    Solve(SolveArgs),
    /// Write a random instance with a planted solution and its manifest.
    Generate(GenerateArgs),
    /// Solve the Max-Cut relaxation of a Gset graph or a random graph.
    Maxcut(MaxcutArgs),
    /// Recompute the KKT residuals of a given solution.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub opts: SolveOptions,
}

#[derive(Debug, Clone, Args)]
pub struct SolveOptions {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the per-iteration trace here.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = TraceFormat::Jsonl)]
    pub trace_format: TraceFormat,
    /// Parameter set the individual flags are applied on top of; low for
    /// solve, maxcut for maxcut.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long, value_enum, default_value_t = Precision::F64)]
    pub precision: Precision,
    #[command(flatten)]
    pub params: ParamOverrides,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum TraceFormat {
    Jsonl,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Low,
    Medium,
    High,
    Maxcut,
}

impl Preset {
    pub fn params(self) -> SolverParams {
        match self {
            Self::Low => SolverParams::low_condition(),
            Self::Medium => SolverParams::medium_condition(),
            Self::High => SolverParams::high_condition(),
            Self::Maxcut => SolverParams::maxcut(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    F64,
    F32,
}

/// One flag per solver parameter; unset flags keep the preset value.
#[derive(Debug, Clone, Default, Args)]
pub struct ParamOverrides {
    #[arg(long)]
    pub t0: Option<f64>,
    #[arg(long)]
    pub tmin: Option<f64>,
    #[arg(long)]
    pub tmax: Option<f64>,
    #[arg(long)]
    pub beta1: Option<f64>,
    #[arg(long)]
    pub beta2: Option<f64>,
    #[arg(long)]
    pub beta3: Option<f64>,
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub gamma1: Option<f64>,
    #[arg(long)]
    pub gamma2: Option<f64>,
    #[arg(long)]
    pub rank: Option<usize>,
    /// Bundle cap: an integer or half-minus, tri, half, sq-minus, sq,
    /// sq-plus, 2sq, 5sq, inf.
    #[arg(long)]
    pub lmax: Option<LmaxPolicy>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub maxiter: Option<usize>,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    #[arg(long)]
    pub nullmax: Option<usize>,
    #[arg(long)]
    pub predcountmax: Option<usize>,
    /// Turn on rank prediction starting from this rank.
    #[arg(long)]
    pub prior_rank: Option<usize>,
    /// Rank prediction with a prior of n/10 (at least 2) when --prior-rank
    /// is not given.
    #[arg(long)]
    pub predict_rank: bool,
    /// Skip building the primal matrix X.
    #[arg(long)]
    pub no_primal: bool,
}

impl ParamOverrides {
    pub fn to_params(&self, base: SolverParams, n: usize) -> Result<SolverParams, ParamError> {
        let mut p = base;
        macro_rules! set {
            ($($flag:ident => $field:ident),*) => {
                $(if let Some(v) = self.$flag { p.$field = v; })*
            };
        }
        set!(t0 => t0, tmin => t_min, tmax => t_max, beta1 => beta1, beta2 => beta2,
             beta3 => beta3, xi => xi, gamma1 => gamma1, gamma2 => gamma2, lmax => l_max,
             eps => eps, maxiter => maxiter, nullmax => nullmax, predcountmax => predcountmax);
        // The preset step bounds follow t0 down unless given explicitly.
        if self.tmin.is_none() && p.t0 < p.t_min {
            p.t_min = p.t0;
        }
        if self.tmax.is_none() && p.t0 > p.t_max {
            p.t_max = p.t0;
        }
        p.rho = self.rho.or(p.rho);
        p.rank = self.rank.or(p.rank);
        p.time_limit_secs = self.time_limit.or(p.time_limit_secs);
        p.prior_rank = self.prior_rank.or(p.prior_rank);
        if self.predict_rank && p.prior_rank.is_none() {
            p.prior_rank = Some((n / 10).max(2));
        }
        if self.no_primal {
            p.materialize_w = false;
        }
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    /// Rank of the planted X*.
    #[arg(long, short = 'r')]
    pub rank: usize,
    /// Probability that a lower-triangle entry is nonzero.
    #[arg(long)]
    pub sparsity: f64,
    /// Scale controlling the condition numbers.
    #[arg(long, short = 's', default_value_t = 1.0)]
    pub s: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// File stem; defaults to rand-n{n}-m{m}-r{r}-seed{seed}.
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Args)]
pub struct MaxcutArgs {
    /// Gset graph file.
    pub input: Option<PathBuf>,
    /// Use an Erdos-Renyi graph with this many vertices instead of a file.
    #[arg(long, conflicts_with = "input")]
    pub random: Option<usize>,
    /// Edge probability of the random graph.
    #[arg(long, default_value_t = 0.1)]
    pub density: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "paper")]
    pub sense: MaxCutSense,
    #[command(flatten)]
    pub opts: SolveOptions,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// SDPA instance or generator manifest.
    pub instance: PathBuf,
    /// JSON with `y` (or `y_star`) and optionally `x` (or `x_star`) as
    /// lower-triangle `[row, col, value]` triplets.
    pub solution: PathBuf,
    #[arg(long, default_value_t = 1e-4)]
    pub eps: f64,
}
