use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("need 0 < beta3 < beta1 < beta2 < 1 (got {beta3}, {beta1}, {beta2})")]
    Betas { beta1: f64, beta2: f64, beta3: f64 },
    #[error("need 0 < t_min <= t0 <= t_max (got {t_min}, {t0}, {t_max})")]
    StepBounds { t0: f64, t_min: f64, t_max: f64 },
    #[error("{name} must be {requirement} (got {value})")]
    Invalid {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("rank must be at least 1")]
    ZeroRank,
    #[error("prior rank {prior} must exceed 1")]
    PriorRank { prior: usize },
    #[error("unknown bundle cap '{0}'")]
    UnknownLmax(String),
}

/// Rule for the bundle cap `l_max` as a function of the rank `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum LmaxPolicy {
    /// `r(r+1)/2 - r`
    HalfMinus,
    /// `r(r+1)/2`
    Tri,
    /// `r(r+1)/2 + r`
    #[default]
    Half,
    /// `r^2 - r`
    SqMinus,
    /// `r^2`
    Sq,
    /// `r^2 + r`
    SqPlus,
    /// `2 r^2`
    TwoSq,
    /// `5 r^2`
    FiveSq,
    Unbounded,
    Fixed(usize),
}

impl LmaxPolicy {
    /// The cap for rank `r`, never below `r` so a full block always fits.
    pub fn resolve(self, r: usize) -> usize {
        let tri = r * (r + 1) / 2;
        let raw = match self {
            Self::HalfMinus => tri - r,
            Self::Tri => tri,
            Self::Half => tri + r,
            Self::SqMinus => r * r - r,
            Self::Sq => r * r,
            Self::SqPlus => r * r + r,
            Self::TwoSq => 2 * r * r,
            Self::FiveSq => 5 * r * r,
            Self::Unbounded => usize::MAX,
            Self::Fixed(l) => l,
        };
        raw.max(r)
    }
}

impl fmt::Display for LmaxPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::HalfMinus => f.write_str("half-minus"),
            Self::Tri => f.write_str("tri"),
            Self::Half => f.write_str("half"),
            Self::SqMinus => f.write_str("sq-minus"),
            Self::Sq => f.write_str("sq"),
            Self::SqPlus => f.write_str("sq-plus"),
            Self::TwoSq => f.write_str("2sq"),
            Self::FiveSq => f.write_str("5sq"),
            Self::Unbounded => f.write_str("inf"),
            Self::Fixed(l) => write!(f, "{l}"),
        }
    }
}

impl FromStr for LmaxPolicy {
    type Err = ParamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim() {
            "half-minus" => Self::HalfMinus,
            "tri" => Self::Tri,
            "half" => Self::Half,
            "sq-minus" => Self::SqMinus,
            "sq" => Self::Sq,
            "sq-plus" => Self::SqPlus,
            "2sq" => Self::TwoSq,
            "5sq" => Self::FiveSq,
            "inf" => Self::Unbounded,
            other => Self::Fixed(
                other
                    .parse()
                    .map_err(|_| ParamError::UnknownLmax(other.to_string()))?,
            ),
        })
    }
}

impl TryFrom<String> for LmaxPolicy {
    type Error = ParamError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<LmaxPolicy> for String {
    fn from(p: LmaxPolicy) -> Self {
        p.to_string()
    }
}

/// Solver settings. Values are `f64` regardless of the scalar type the
/// problem is solved in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverParams {
    pub t0: f64,
    pub t_min: f64,
    pub t_max: f64,
    /// Descent test `beta1 * pred <= true`.
    pub beta1: f64,
    /// Step doubling `beta2 * pred <= true`.
    pub beta2: f64,
    /// Step halving `beta3 * pred >= true` after `nullmax` null steps.
    pub beta3: f64,
    /// Diagonal regularization of the subproblem Hessian.
    pub xi: f64,
    /// Penalty parameter; `None` means `2 Tr(X*) + 1` from the problem.
    pub rho: Option<f64>,
    pub gamma1: f64,
    pub gamma2: f64,
    /// Eigenvectors added per iteration; `None` means the problem's known rank.
    pub rank: Option<usize>,
    pub l_max: LmaxPolicy,
    pub eps: f64,
    pub maxiter: usize,
    pub time_limit_secs: Option<f64>,
    pub nullmax: usize,
    pub predcountmax: usize,
    /// Enables rank prediction starting from this rank.
    pub prior_rank: Option<usize>,
    /// Keep `W` explicitly so a primal `X` can be returned.
    pub materialize_w: bool,
    pub record_trace: bool,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            t0: 1e-2,
            t_min: 1e-3,
            t_max: 1.0,
            beta1: 0.05,
            beta2: 0.65,
            beta3: 0.001,
            xi: 1e-8,
            rho: None,
            gamma1: 1e-6,
            gamma2: 1e-7,
            rank: None,
            l_max: LmaxPolicy::Half,
            eps: 1e-4,
            maxiter: 500,
            time_limit_secs: None,
            nullmax: 5,
            predcountmax: 10,
            prior_rank: None,
            materialize_w: true,
            record_trace: true,
        }
    }
}

impl SolverParams {
    /// Low condition numbers: the defaults.
    pub fn low_condition() -> Self {
        Self::default()
    }

    /// Medium condition numbers: `t0 = 1e-5`, cap `r^2`. The lower step
    /// bound follows `t0` down.
    pub fn medium_condition() -> Self {
        Self {
            t0: 1e-5,
            t_min: 1e-5,
            l_max: LmaxPolicy::Sq,
            ..Self::default()
        }
    }

    /// High condition numbers: `t0 = 1e-7`, `beta2 = 0.85`, cap `r^2`.
    pub fn high_condition() -> Self {
        Self {
            t0: 1e-7,
            t_min: 1e-7,
            beta2: 0.85,
            l_max: LmaxPolicy::Sq,
            ..Self::default()
        }
    }

    /// Max-Cut: `t0 = 1e-2`, cap `r^2`.
    pub fn maxcut() -> Self {
        Self {
            l_max: LmaxPolicy::Sq,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        let Self {
            t0,
            t_min,
            t_max,
            beta1,
            beta2,
            beta3,
            ..
        } = *self;
        if !(0.0 < beta3 && beta3 < beta1 && beta1 < beta2 && beta2 < 1.0) {
            return Err(ParamError::Betas { beta1, beta2, beta3 });
        }
        if !(0.0 < t_min && t_min <= t0 && t0 <= t_max && t_max.is_finite()) {
            return Err(ParamError::StepBounds { t0, t_min, t_max });
        }
        let check = |name, ok: bool, requirement, value| {
            if ok {
                Ok(())
            } else {
                Err(ParamError::Invalid {
                    name,
                    requirement,
                    value,
                })
            }
        };
        check("xi", self.xi >= 0.0 && self.xi.is_finite(), "finite and >= 0", self.xi)?;
        if let Some(rho) = self.rho {
            check("rho", rho > 0.0 && rho.is_finite(), "positive", rho)?;
        }
        check("gamma1", self.gamma1 >= 0.0, ">= 0", self.gamma1)?;
        check("gamma2", self.gamma2 >= 0.0, ">= 0", self.gamma2)?;
        check("eps", self.eps > 0.0, "positive", self.eps)?;
        check("maxiter", self.maxiter > 0, "positive", self.maxiter as f64)?;
        if let Some(tl) = self.time_limit_secs {
            check("time_limit_secs", tl > 0.0, "positive", tl)?;
        }
        if self.rank == Some(0) {
            return Err(ParamError::ZeroRank);
        }
        if let Some(prior) = self.prior_rank {
            if prior < 2 {
                return Err(ParamError::PriorRank { prior });
            }
        }
        Ok(())
    }
}
