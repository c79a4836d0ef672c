//! The polyhedral bundle method with optional rank prediction.

mod method;
mod params;
mod penalty;
mod rank;

pub use method::{
    recover_primal, solve, solve_from, BundleSolver, IterationRecord, SolveResult, Status,
    StepType, UpdateInfo,
};
pub use params::{LmaxPolicy, ParamError, SolverParams};
pub use penalty::{
    descent_decision, penalty_eval, termination_check, DescentDecision, Deltas, PenaltyEval,
    StepRule,
};
pub use rank::{
    gap_argmax, predict_rank, rank_predict_step, singular_values, Prediction, RankPredictor,
};

use thiserror::Error;

use crate::bundle::BundleError;
use crate::linalg::LinalgError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("no penalty parameter: set rho or give the problem a known trace")]
    MissingRho,
    #[error("no rank: set rank or prior_rank, or give the problem a known rank")]
    MissingRank,
    #[error("rank {rank} exceeds the matrix dimension {n}")]
    RankTooLarge { rank: usize, n: usize },
    #[error("starting point has {found} entries, expected {expected}")]
    StartLength { expected: usize, found: usize },
    #[error("weights have {found} entries, expected {expected}")]
    WeightLength { expected: usize, found: usize },
    #[error("the aggregate W is not materialized")]
    NotMaterialized,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Bundle(#[from] BundleError),
}
