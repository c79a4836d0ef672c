use serde::{Deserialize, Serialize};

use crate::linalg::{dot, extreme_eigs, norm2, LinalgError, Mat, Which};
use crate::problems::SdpProblem;
use crate::Scalar;

/// `F(y)` together with the spectral data it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyEval<T> {
    pub f: T,
    /// `lambda_max(A^T y - C) = -lambda_min(S)`.
    pub lambda_max: T,
    /// Leading eigenvalues of `A^T y - C`, descending.
    pub values: Vec<T>,
    /// The matching eigenvectors, `n x values.len()`.
    pub vectors: Mat<T>,
}

/// `F(y) = -b'y + rho max(lambda_max(A^T y - C), 0)` with the top `r`
/// eigenpairs of `A^T y - C`.
pub fn penalty_eval<T: Scalar>(
    problem: &SdpProblem<T>,
    y: &[T],
    r: usize,
    rho: T,
) -> Result<PenaltyEval<T>, LinalgError> {
    let m = problem.penalty_matrix(y)?;
    let eig = extreme_eigs(&m, r.min(problem.n()), Which::Largest)?;
    let lambda_max = eig.values[0];
    Ok(PenaltyEval {
        f: -dot(problem.b(), y) + rho * lambda_max.max(T::zero()),
        lambda_max,
        values: eig.values,
        vectors: eig.vectors,
    })
}

/// Outcome of the descent test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentDecision<T> {
    pub accept: bool,
    pub t: T,
    pub nullcount: usize,
}

/// Thresholds used by [`descent_decision`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRule<T> {
    pub beta1: T,
    pub beta2: T,
    pub beta3: T,
    pub t_min: T,
    pub t_max: T,
    pub nullmax: usize,
}

/// Serious/null step test on `pred = F(y) - F_k(z)` and `true = F(y) - F(z)`.
pub fn descent_decision<T: Scalar>(
    f_y: T,
    f_z: T,
    model_z: T,
    t: T,
    nullcount: usize,
    rule: &StepRule<T>,
) -> DescentDecision<T> {
    let pred = f_y - model_z;
    let actual = f_y - f_z;
    if rule.beta1 * pred <= actual {
        let t = if rule.beta2 * pred <= actual {
            (t + t).min(rule.t_max)
        } else {
            t
        };
        return DescentDecision {
            accept: true,
            t,
            nullcount: 0,
        };
    }
    let nullcount = nullcount + 1;
    if rule.beta3 * pred >= actual && nullcount >= rule.nullmax {
        DescentDecision {
            accept: false,
            t: (T::lit(0.5) * t).max(rule.t_min),
            nullcount: 0,
        }
    } else {
        DescentDecision {
            accept: false,
            t,
            nullcount,
        }
    }
}

/// The relative KKT quantities used for termination.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Deltas<T> {
    /// Primal infeasibility `||Bu - b|| / (1 + ||b||)`.
    pub d1: T,
    /// Dual infeasibility `max(-lambda_min(S), 0)`.
    pub d4: T,
    /// Duality gap `|a'u - b'y| / (1 + |a'u| + |b'y|)`.
    pub d5: T,
    /// Model gap `|F(y_k) - F_k(z)| / (1 + |F(y_k)|)`.
    pub d6: T,
}

impl<T: Scalar> Deltas<T> {
    pub fn max(&self) -> T {
        self.d1.max(self.d4).max(self.d5).max(self.d6)
    }

    pub fn to_f64(self) -> Deltas<f64> {
        Deltas {
            d1: self.d1.as_f64(),
            d4: self.d4.as_f64(),
            d5: self.d5.as_f64(),
            d6: self.d6.as_f64(),
        }
    }
}

/// Computes the termination quantities; `done` iff all are `<= eps`.
#[allow(clippy::too_many_arguments)]
pub fn termination_check<T: Scalar>(
    b: &[T],
    u: &[T],
    a: &[T],
    bmat: &Mat<T>,
    y: &[T],
    lambda_min_s: T,
    f_y: T,
    model_z: T,
    eps: T,
) -> (Deltas<T>, bool) {
    let bu = bmat.matvec(u);
    let resid: Vec<T> = bu.iter().zip(b).map(|(&p, &q)| p - q).collect();
    let d1 = norm2(&resid) / (T::one() + norm2(b));
    let d4 = (-lambda_min_s).max(T::zero());
    let au = dot(a, u);
    let by = dot(b, y);
    let d5 = (au - by).abs() / (T::one() + au.abs() + by.abs());
    let d6 = (f_y - model_z).abs() / (T::one() + f_y.abs());
    let d = Deltas { d1, d4, d5, d6 };
    (d, d.max() <= eps)
}
