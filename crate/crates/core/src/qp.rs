//! The bundle subproblem
//!
//! `min 1/2 u'(t B'B + xi I)u + (a - B'(y + t b))'u  s.t.  u >= 0, 1'u <= rho`
//!
//! solved by a primal active-set method. The candidate point is
//! `z = y + t (b - B u)`.

use thiserror::Error;

use crate::linalg::{dot, Cholesky, Mat};
use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QpError {
    /// The reduced Hessian lost positive definiteness; with `xi = 0` this
    /// happens as soon as `B` has dependent columns.
    #[error("subproblem Hessian is singular on a free set of size {free}")]
    SingularSubproblem { free: usize },
    #[error("active-set method stopped after {iterations} iterations (KKT residual {residual:e})")]
    IterationLimit { iterations: usize, residual: f64 },
    #[error("invalid subproblem data: {0}")]
    InvalidData(String),
}

/// Borrowed data of one subproblem.
#[derive(Debug, Clone, Copy)]
pub struct SubproblemData<'a, T> {
    /// `m x (l+1)`, aggregate column first.
    pub bmat: &'a Mat<T>,
    pub a: &'a [T],
    pub y: &'a [T],
    pub b: &'a [T],
    pub t: T,
    pub xi: T,
    pub rho: T,
}

impl<T: Scalar> SubproblemData<'_, T> {
    fn validate(&self) -> Result<(), QpError> {
        let m = self.y.len();
        if self.bmat.rows() != m || self.b.len() != m {
            return Err(QpError::InvalidData(format!(
                "B is {}x{}, y has {m} entries, b has {}",
                self.bmat.rows(),
                self.bmat.cols(),
                self.b.len()
            )));
        }
        if self.a.len() != self.bmat.cols() {
            return Err(QpError::InvalidData(format!(
                "a has {} entries for {} columns",
                self.a.len(),
                self.bmat.cols()
            )));
        }
        if !(self.t > T::zero()) || self.xi < T::zero() || !(self.rho > T::zero()) {
            return Err(QpError::InvalidData(format!(
                "need t > 0, xi >= 0, rho > 0 (t = {}, xi = {}, rho = {})",
                self.t, self.xi, self.rho
            )));
        }
        Ok(())
    }

    /// Hessian `t B'B + xi I`.
    pub fn hessian(&self) -> Mat<T> {
        let mut h = self.bmat.gram();
        for v in h.as_mut_slice() {
            *v = *v * self.t;
        }
        for i in 0..h.rows() {
            h[(i, i)] = h[(i, i)] + self.xi;
        }
        h
    }

    /// Linear term `a - B'(y + t b)`.
    pub fn linear(&self) -> Vec<T> {
        let w: Vec<T> = self
            .y
            .iter()
            .zip(self.b)
            .map(|(&yi, &bi)| yi + self.t * bi)
            .collect();
        self.bmat
            .tr_matvec(&w)
            .into_iter()
            .zip(self.a)
            .map(|(bw, &ai)| ai - bw)
            .collect()
    }

    /// `z = y + t (b - B u)`.
    pub fn candidate(&self, u: &[T]) -> Vec<T> {
        let bu = self.bmat.matvec(u);
        self.y
            .iter()
            .zip(self.b)
            .zip(bu)
            .map(|((&yi, &bi), bui)| yi + self.t * (bi - bui))
            .collect()
    }

    /// Subproblem objective at `u`.
    pub fn objective(&self, u: &[T]) -> T {
        quad_objective(&self.hessian(), &self.linear(), u)
    }
}

/// Solution of a subproblem.
#[derive(Debug, Clone, PartialEq)]
pub struct QpSolution<T> {
    pub u: Vec<T>,
    pub z: Vec<T>,
    pub objective: T,
    pub kkt_residual: T,
    /// Indices held at their lower bound.
    pub at_bound: Vec<usize>,
    pub sum_active: bool,
    pub iterations: usize,
}

/// `1/2 u'Hu + q'u`.
pub fn quad_objective<T: Scalar>(h: &Mat<T>, q: &[T], u: &[T]) -> T {
    let hu = h.matvec(u);
    T::lit(0.5) * dot(u, &hu) + dot(q, u)
}

/// Tolerance the subproblem solution is held to: `1e-10 (1 + |q|_inf)`.
pub fn qp_tolerance<T: Scalar>(q: &[T]) -> T {
    let qmax = q.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    T::tol(1e-10) * (T::one() + qmax)
}

/// KKT residual of `u` for `min 1/2 u'Hu + q'u, u >= 0, 1'u <= rho`.
///
/// The sum multiplier is recovered by least squares on the positive
/// entries when the sum constraint is (nearly) tight, and zero otherwise.
pub fn kkt_residual_qp<T: Scalar>(h: &Mat<T>, q: &[T], rho: T, u: &[T]) -> T {
    let g: Vec<T> = h.matvec(u).iter().zip(q).map(|(&a, &b)| a + b).collect();
    let sum: T = u.iter().copied().sum();
    let tight = sum >= rho - T::tol(1e-9) * rho.max(T::one());
    let mu = if tight {
        let umax = u.iter().fold(T::zero(), |m, v| m.max(*v));
        let thresh = T::tol(1e-12) * umax.max(T::one());
        let (s, c) = u
            .iter()
            .zip(&g)
            .filter(|(&ui, _)| ui > thresh)
            .fold((T::zero(), 0usize), |(s, c), (_, &gi)| (s + gi, c + 1));
        if c > 0 {
            (-s / T::from_usize_lossy(c)).max(T::zero())
        } else {
            g.iter().fold(T::zero(), |m, &gi| m.max(-gi))
        }
    } else {
        T::zero()
    };
    let mut res = (sum - rho).max(T::zero());
    res = res.max(mu * (rho - sum).abs());
    for (&ui, &gi) in u.iter().zip(&g) {
        res = res.max(ui.min(gi + mu).abs());
        res = res.max((-ui).max(T::zero()));
    }
    res
}

/// KKT residual of `u` for the subproblem `d`.
pub fn kkt_residual<T: Scalar>(d: &SubproblemData<'_, T>, u: &[T]) -> T {
    kkt_residual_qp(&d.hessian(), &d.linear(), d.rho, u)
}

/// Solves the subproblem from a cold start.
pub fn solve_subproblem<T: Scalar>(d: &SubproblemData<'_, T>) -> Result<QpSolution<T>, QpError> {
    solve_subproblem_warm(d, None)
}

/// Solves the subproblem; `free_hint[i] = true` starts index `i` off its
/// bound (typically the support of the previous solution).
pub fn solve_subproblem_warm<T: Scalar>(
    d: &SubproblemData<'_, T>,
    free_hint: Option<&[bool]>,
) -> Result<QpSolution<T>, QpError> {
    d.validate()?;
    let h = d.hessian();
    let q = d.linear();
    let raw = solve_box_simplex_qp(&h, &q, d.rho, free_hint)?;
    let z = d.candidate(&raw.u);
    let objective = quad_objective(&h, &q, &raw.u);
    let kkt = kkt_residual_qp(&h, &q, d.rho, &raw.u);
    let at_bound = (0..raw.u.len()).filter(|&i| !raw.free[i]).collect();
    Ok(QpSolution {
        u: raw.u,
        z,
        objective,
        kkt_residual: kkt,
        at_bound,
        sum_active: raw.sum_active,
        iterations: raw.iterations,
    })
}

/// Raw active-set output.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveSetResult<T> {
    pub u: Vec<T>,
    pub free: Vec<bool>,
    pub sum_active: bool,
    pub iterations: usize,
}

/// Equality-constrained step on the working set: returns the minimizer
/// `u_F` of the quadratic over the free set (with `1'u_F = rho` when the sum
/// constraint is in the working set) and the sum multiplier.
fn eqp<T: Scalar>(
    h: &Mat<T>,
    q: &[T],
    rho: T,
    free_idx: &[usize],
    sum_active: bool,
) -> Result<(Vec<T>, T), QpError> {
    let k = free_idx.len();
    if k == 0 {
        return Ok((Vec::new(), T::zero()));
    }
    let hff = Mat::from_fn(k, k, |i, j| h[(free_idx[i], free_idx[j])]);
    let chol = Cholesky::factor(&hff, T::epsilon() * T::lit(64.0))
        .ok_or(QpError::SingularSubproblem { free: k })?;
    let qf: Vec<T> = free_idx.iter().map(|&i| -q[i]).collect();
    let ones = vec![T::one(); k];
    let hinv1 = if sum_active { chol.solve(&ones) } else { Vec::new() };
    let denom: T = hinv1.iter().copied().sum();

    // Solves [H 1; 1' 0][x; mu] = [r1; r2] (or H x = r1).
    let kkt_solve = |r1: &[T], r2: T| -> (Vec<T>, T) {
        let hr = chol.solve(r1);
        if sum_active {
            let mu = (hr.iter().copied().sum::<T>() - r2) / denom;
            let x = hr.iter().zip(&hinv1).map(|(&a, &b)| a - mu * b).collect();
            (x, mu)
        } else {
            (hr, T::zero())
        }
    };

    let (mut x, mut mu) = kkt_solve(&qf, rho);
    for _ in 0..2 {
        let mut r1 = qf.clone();
        for (i, ri) in r1.iter_mut().enumerate() {
            let mut s = T::zero();
            for (j, &xj) in x.iter().enumerate() {
                s = s + hff[(i, j)] * xj;
            }
            *ri = *ri - s - if sum_active { mu } else { T::zero() };
        }
        let r2 = if sum_active {
            rho - x.iter().copied().sum::<T>()
        } else {
            T::zero()
        };
        let (dx, dmu) = kkt_solve(&r1, r2);
        x.iter_mut().zip(&dx).for_each(|(a, &b)| *a = *a + b);
        mu = mu + dmu;
    }
    Ok((x, mu))
}

/// Primal active-set method for `min 1/2 u'Hu + q'u, u >= 0, 1'u <= rho`.
pub fn solve_box_simplex_qp<T: Scalar>(
    h: &Mat<T>,
    q: &[T],
    rho: T,
    free_hint: Option<&[bool]>,
) -> Result<ActiveSetResult<T>, QpError> {
    let p = q.len();
    if h.rows() != p || h.cols() != p {
        return Err(QpError::InvalidData(format!(
            "Hessian is {}x{} for {p} variables",
            h.rows(),
            h.cols()
        )));
    }
    let mut u = vec![T::zero(); p];
    let mut free = match free_hint {
        Some(hint) if hint.len() == p => hint.to_vec(),
        _ => vec![false; p],
    };
    let mut sum_active = false;
    let qscale = q.iter().fold(T::one(), |m, v| m.max(v.abs()));
    let hscale = h.max_abs().max(T::one());
    let max_iter = 50 * (p + 1);

    for iter in 0..max_iter {
        let free_idx: Vec<usize> = (0..p).filter(|&i| free[i]).collect();
        if free_idx.is_empty() {
            sum_active = false;
        }
        let (target, mu) = eqp(h, q, rho, &free_idx, sum_active)?;
        let step: Vec<T> = free_idx
            .iter()
            .zip(&target)
            .map(|(&i, &t)| t - u[i])
            .collect();
        let umax = u.iter().fold(T::one(), |m, v| m.max(v.abs()));
        let step_max = step.iter().fold(T::zero(), |m, v| m.max(v.abs()));

        if step_max <= T::epsilon() * T::lit(16.0) * umax {
            // Stationary on the working set; check multiplier signs.
            let hu = h.matvec(&u);
            let mut worst = -(T::tol(1e-13) * (qscale + hscale * umax));
            let mut drop: Option<Option<usize>> = None;
            for i in 0..p {
                if !free[i] {
                    let lam = hu[i] + q[i] + mu;
                    if lam < worst {
                        worst = lam;
                        drop = Some(Some(i));
                    }
                }
            }
            if sum_active && mu < worst {
                drop = Some(None);
            }
            match drop {
                None => {
                    for v in u.iter_mut() {
                        *v = v.max(T::zero());
                    }
                    return Ok(ActiveSetResult {
                        u,
                        free,
                        sum_active,
                        iterations: iter + 1,
                    });
                }
                Some(Some(i)) => free[i] = true,
                Some(None) => sum_active = false,
            }
            continue;
        }

        let mut alpha = T::one();
        let mut block: Option<Option<usize>> = None;
        for (&i, &s) in free_idx.iter().zip(&step) {
            if s < T::zero() {
                let a = u[i].max(T::zero()) / -s;
                if a < alpha {
                    alpha = a;
                    block = Some(Some(i));
                }
            }
        }
        if !sum_active {
            let ds: T = step.iter().copied().sum();
            if ds > T::zero() {
                let slack = (rho - u.iter().copied().sum::<T>()).max(T::zero());
                let a = slack / ds;
                if a < alpha {
                    alpha = a;
                    block = Some(None);
                }
            }
        }
        for (&i, &s) in free_idx.iter().zip(&step) {
            u[i] = u[i] + alpha * s;
        }
        match block {
            Some(Some(i)) => {
                u[i] = T::zero();
                free[i] = false;
            }
            Some(None) => sum_active = true,
            None => {
                for (&i, &t) in free_idx.iter().zip(&target) {
                    u[i] = t;
                }
            }
        }
    }
    let residual = kkt_residual_qp(h, q, rho, &u).as_f64();
    Err(QpError::IterationLimit {
        iterations: max_iter,
        residual,
    })
}
