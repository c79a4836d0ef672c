//! Symmetric-matrix vectorization, the constraint operator, dense kernels and
//! extreme eigenpairs.

mod dense;
mod eigen;
mod operator;
mod sym;

pub use dense::{Cholesky, Mat};
pub use eigen::{
    dense_extreme, extreme_eigs, extreme_eigs_with, lanczos_extreme, sym_eigen, sym_eigenvalues,
    EigMethod, EigOptions, EigenResult, Which, DENSE_EIG_MAX_N,
};
pub use operator::ConstraintOperator;
pub use sym::{
    dot, norm2, smat, smat_values, svec, svec_coords, svec_dim, svec_index, svec_len, SvecVector,
    SymMatrix,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("length {0} is not a triangular number")]
    NotTriangular(usize),
    #[error("entry ({row}, {col}) out of range for n = {n}")]
    IndexOutOfRange { row: usize, col: usize, n: usize },
    #[error("duplicate entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },
    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("cannot compute {r} eigenpairs of a {n}x{n} matrix")]
    InvalidEigenCount { r: usize, n: usize },
    #[error("eigensolver did not converge (best relative residual {best_residual:e})")]
    EigenNonConvergence { best_residual: f64 },
}
