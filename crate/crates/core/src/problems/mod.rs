//! SDP instances: the standard-form problem type, the planted-solution
//! generator, the Max-Cut relaxation and SDPA / Gset file formats.

mod generator;
mod maxcut;
mod sdpa;

pub use generator::{generate_random_sdp, GeneratorManifest, PlantedSolution};
pub use maxcut::{
    build_maxcut_sdp, load_gset, parse_gset, random_graph, write_gset, GraphInstance, MaxCutSense,
};
pub use sdpa::{load_sdpa, parse_sdpa, write_sdpa, write_sdpa_string};

use thiserror::Error;

use crate::linalg::{
    smat, svec, ConstraintOperator, LinalgError, SvecVector, SymMatrix,
};
use crate::Scalar;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("problem has no constraints")]
    NoConstraints,
    #[error("right-hand side has {found} entries, expected {expected}")]
    RhsLength { expected: usize, found: usize },
    #[error("right-hand side entry {0} is not finite")]
    NonFiniteRhs(usize),
}

/// `min <C, X>  s.t.  <A_i, X> = b_i (i = 1..m),  X psd`.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem<T> {
    pub name: String,
    c: SymMatrix<T>,
    cvec: SvecVector<T>,
    op: ConstraintOperator<T>,
    b: Vec<T>,
    /// `Tr(X*)` when known; sets the default penalty `rho = 2 Tr(X*) + 1`.
    pub known_trace: Option<T>,
    /// Rank of the optimal `X*` when known.
    pub known_rank: Option<usize>,
}

impl<T: Scalar> SdpProblem<T> {
    pub fn new(
        c: SymMatrix<T>,
        constraints: &[SymMatrix<T>],
        b: Vec<T>,
    ) -> Result<Self, ProblemError> {
        let op = ConstraintOperator::from_matrices(c.n(), constraints)?;
        Self::from_operator(c, op, b)
    }

    pub fn from_operator(
        c: SymMatrix<T>,
        op: ConstraintOperator<T>,
        b: Vec<T>,
    ) -> Result<Self, ProblemError> {
        if op.m() == 0 {
            return Err(ProblemError::NoConstraints);
        }
        if op.n() != c.n() {
            return Err(LinalgError::DimensionMismatch {
                expected: c.n(),
                found: op.n(),
            }
            .into());
        }
        if b.len() != op.m() {
            return Err(ProblemError::RhsLength {
                expected: op.m(),
                found: b.len(),
            });
        }
        if let Some(i) = b.iter().position(|v| !v.is_finite()) {
            return Err(ProblemError::NonFiniteRhs(i));
        }
        Ok(Self {
            name: String::new(),
            cvec: svec(&c),
            c,
            op,
            b,
            known_trace: None,
            known_rank: None,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_known_trace(mut self, trace: T) -> Self {
        self.known_trace = Some(trace);
        self
    }

    pub fn with_known_rank(mut self, rank: usize) -> Self {
        self.known_rank = Some(rank);
        self
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.c.n()
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.op.m()
    }

    pub fn c(&self) -> &SymMatrix<T> {
        &self.c
    }

    pub fn cvec(&self) -> &SvecVector<T> {
        &self.cvec
    }

    pub fn op(&self) -> &ConstraintOperator<T> {
        &self.op
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    /// `A_i` (0-based).
    pub fn constraint(&self, i: usize) -> SymMatrix<T> {
        self.op.constraint_matrix(i)
    }

    /// `A^T y - C`, the matrix whose top eigenpairs drive the penalty.
    pub fn penalty_matrix(&self, y: &[T]) -> Result<SymMatrix<T>, LinalgError> {
        let mut v = self.op.adjoint_svec(y)?;
        for (a, &c) in v.values_mut().iter_mut().zip(self.cvec.values()) {
            *a = *a - c;
        }
        Ok(smat(&v))
    }

    /// Dual slack `S = C - A^T y`.
    pub fn slack(&self, y: &[T]) -> Result<SymMatrix<T>, LinalgError> {
        Ok(self.penalty_matrix(y)?.neg())
    }
}
