//! Polyhedral bundle method for semidefinite programs.
//!
//! Solves `min <C, X> s.t. A(X) = b, X psd` through the exact penalty
//! `F(y) = -b'y + rho max(lambda_max(A^T y - C), 0)` of its dual. Everything
//! numeric is generic over [`Scalar`] (`f32` or `f64`); the `*64` / `*32`
//! aliases below fix the type.

pub mod bundle;
pub mod linalg;
pub mod problems;
pub mod qp;
mod scalar;
pub mod solver;

pub use problems::{PlantedSolution, ProblemError, SdpProblem};
pub use scalar::Scalar;
pub use solver::{solve, BundleSolver, SolveResult, SolverError, SolverParams, Status};

pub type SdpProblem64 = SdpProblem<f64>;
pub type SdpProblem32 = SdpProblem<f32>;
pub type SolveResult64 = SolveResult<f64>;
pub type SolveResult32 = SolveResult<f32>;
pub type SymMatrix64 = linalg::SymMatrix<f64>;
pub type SymMatrix32 = linalg::SymMatrix<f32>;
pub type BundleSolver64<'p> = BundleSolver<'p, f64>;
pub type PlantedSolution64 = PlantedSolution<f64>;
