use crate::linalg::{sym_eigenvalues, LinalgError, Mat};
use crate::Scalar;

/// 1-based position of the largest first difference `s[i] - s[i+1]` over
/// `i = 1..r`; missing entries count as zero and ties go to the lowest
/// position.
pub fn gap_argmax<T: Scalar>(s: &[T], r: usize) -> usize {
    let at = |i: usize| s.get(i).copied().unwrap_or_else(T::zero);
    let mut best = 1;
    let mut best_gap = at(0) - at(1);
    for i in 1..r {
        let g = at(i) - at(i + 1);
        if g > best_gap {
            best_gap = g;
            best = i + 1;
        }
    }
    best
}

/// Singular values of `p`, descending.
pub fn singular_values<T: Scalar>(p: &Mat<T>) -> Result<Vec<T>, LinalgError> {
    if p.cols() == 0 {
        return Ok(Vec::new());
    }
    let mut ev = sym_eigenvalues(&p.gram())?;
    ev.reverse();
    Ok(ev.into_iter().map(|v| v.max(T::zero()).sqrt()).collect())
}

/// `max(rbar, rhat)` from the singular-value gaps of the bundle `p` and the
/// gaps of `eigs` (leading eigenvalues of `A^T z - C`, descending), both
/// over the first `r` differences.
pub fn predict_rank<T: Scalar>(p: &Mat<T>, eigs: &[T], r: usize) -> Result<usize, LinalgError> {
    let sigma = singular_values(p)?;
    Ok(gap_argmax(&sigma, r).max(gap_argmax(eigs, r)))
}

/// Outcome of one prediction step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prediction {
    /// Still collecting; carries the current estimate `r_k`.
    Pending(usize),
    /// The estimate was stable long enough; switch to this rank.
    Finalize(usize),
}

/// Counter state of the rank prediction phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankPredictor {
    pub prior_rank: usize,
    pub predcountmax: usize,
    pub predcount: usize,
    /// `r_{k-1}`, zero before the first step.
    pub last: usize,
}

impl RankPredictor {
    pub fn new(prior_rank: usize, predcountmax: usize) -> Self {
        Self {
            prior_rank,
            predcountmax,
            predcount: 0,
            last: 0,
        }
    }
}

/// One prediction step: while `predcount <= predcountmax` update the
/// estimate and the stability counter, otherwise finalize.
pub fn rank_predict_step<T: Scalar>(
    p: &Mat<T>,
    eigs: &[T],
    state: &mut RankPredictor,
) -> Result<Prediction, LinalgError> {
    if state.predcount > state.predcountmax {
        return Ok(Prediction::Finalize(state.last));
    }
    let rk = predict_rank(p, eigs, state.prior_rank)?;
    if rk == state.last {
        state.predcount += 1;
    } else {
        state.predcount = 0;
    }
    state.last = rk;
    Ok(Prediction::Pending(rk))
}
