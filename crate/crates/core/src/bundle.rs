//! Polyhedral lower model of the penalty function.
//!
//! The model at iteration `k` is
//! `F_k(y) = -b'y + max { <eta W + P diag(x) P', A'y - C> : eta, x >= 0, eta + 1'x <= rho }`
//! and is carried entirely by the data `a = [<C,W>; <C, p_i p_i'>]` and
//! `B = [A(W), A(p_i p_i')]`. `W` itself is only materialized on request.

use thiserror::Error;

use crate::linalg::{dot, svec_index, svec_len, ConstraintOperator, LinalgError, Mat, SvecVector};
use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BundleError {
    #[error("bundle column {col} has norm {norm}, expected unit norm")]
    NonUnitColumn { col: usize, norm: f64 },
    #[error("bundle size {l} would exceed the cap {l_max}")]
    CapExceeded { l: usize, l_max: usize },
    #[error("weight vector has length {found}, expected {expected}")]
    WeightLength { expected: usize, found: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Constraint data of a block of bundle vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct PvecData<T> {
    /// `svec(p_i p_i')` as columns, `svec_len(n) x l`.
    pub pvec: Mat<T>,
    /// `a_i = <C, p_i p_i'>`.
    pub a: Vec<T>,
    /// Columns `A(p_i p_i')`, `m x l`.
    pub b: Mat<T>,
}

/// Column `svec(p p')`.
pub fn svec_outer<T: Scalar>(p: &[T]) -> Vec<T> {
    let n = p.len();
    let sqrt2 = T::lit(std::f64::consts::SQRT_2);
    let mut out = vec![T::zero(); svec_len(n)];
    for c in 0..n {
        let base = svec_index(n, c, c);
        let pc = p[c];
        out[base] = pc * pc;
        let s = sqrt2 * pc;
        for r in c + 1..n {
            out[base + (r - c)] = s * p[r];
        }
    }
    out
}

/// Builds `Pvec`, `a = Pvec' Cvec` and `B = Avec' Pvec` for the columns of `p`.
///
/// Work is `O(n^2 l)` for `Pvec` plus `O(nnz(Avec) l)` for `B`.
pub fn pvec_generate<T: Scalar>(
    p: &Mat<T>,
    op: &ConstraintOperator<T>,
    cvec: &SvecVector<T>,
) -> Result<PvecData<T>, BundleError> {
    let n = op.n();
    if p.rows() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            found: p.rows(),
        }
        .into());
    }
    if cvec.n() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            found: cvec.n(),
        }
        .into());
    }
    for j in 0..p.cols() {
        let norm = dot(p.col(j), p.col(j)).sqrt();
        if (norm - T::one()).abs() > T::tol(1e-6) {
            return Err(BundleError::NonUnitColumn {
                col: j,
                norm: norm.as_f64(),
            });
        }
    }
    let mut pvec = Mat::zeros(svec_len(n), 0);
    for j in 0..p.cols() {
        pvec.push_col(&svec_outer(p.col(j)));
    }
    let a = pvec.tr_matvec(cvec.values());
    let b = op.apply_cols(&pvec)?;
    Ok(PvecData { pvec, a, b })
}

/// `-b'y + rho * max(max_j (B'y - a)_j, 0)`: the maximum of a linear
/// functional over `{u >= 0, 1'u <= rho}` is attained at a vertex `0` or
/// `rho e_j`.
pub fn model_eval<T: Scalar>(y: &[T], a: &[T], bmat: &Mat<T>, rho: T, b: &[T]) -> T {
    debug_assert_eq!(a.len(), bmat.cols());
    let best = bmat
        .tr_matvec(y)
        .iter()
        .zip(a)
        .fold(T::zero(), |m, (&by, &aj)| m.max(by - aj));
    -dot(b, y) + rho * best
}

/// `u = [eta; x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BundleWeights<T> {
    pub eta: T,
    pub x: Vec<T>,
}

impl<T: Scalar> BundleWeights<T> {
    pub fn from_u(u: &[T]) -> Self {
        assert!(!u.is_empty(), "u holds at least the aggregate weight");
        Self {
            eta: u[0],
            x: u[1..].to_vec(),
        }
    }

    pub fn to_u(&self) -> Vec<T> {
        std::iter::once(self.eta).chain(self.x.iter().copied()).collect()
    }

    pub fn mass(&self) -> T {
        self.eta + self.x.iter().copied().sum::<T>()
    }
}

/// Partition of bundle columns into aggregated (`p_bar`) and kept (`p_hat`)
/// indices, both ascending and 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregationSets {
    pub p_bar: Vec<usize>,
    pub p_hat: Vec<usize>,
}

/// Chooses which columns to fold into the aggregate before appending `r` new
/// ones, keeping the bundle at or below `l_max`.
///
/// With room to spare (`l <= l_max - r`) every column with weight `<= gamma1`
/// is aggregated; otherwise those with weight `<= gamma2` plus the
/// `l - (l_max - r)` smallest-weight columns (ties: lower index first).
pub fn select_aggregation<T: Scalar>(
    x: &[T],
    r: usize,
    l_max: usize,
    gamma1: T,
    gamma2: T,
) -> AggregationSets {
    let l = x.len();
    let room = l_max.saturating_sub(r);
    let mut bar = vec![false; l];
    if l <= room {
        for (i, &xi) in x.iter().enumerate() {
            bar[i] = xi <= gamma1;
        }
    } else {
        for (i, &xi) in x.iter().enumerate() {
            bar[i] = xi <= gamma2;
        }
        let mut order: Vec<usize> = (0..l).collect();
        order.sort_by(|&i, &j| {
            x[i].partial_cmp(&x[j])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(i.cmp(&j))
        });
        for &i in order.iter().take(l - room) {
            bar[i] = true;
        }
    }
    let (p_bar, p_hat) = (0..l).partition(|&i| bar[i]);
    AggregationSets { p_bar, p_hat }
}

/// Bundle vectors, their constraint data and the aggregate.
#[derive(Debug, Clone, PartialEq)]
pub struct BundleState<T> {
    p: Mat<T>,
    a_hat: Vec<T>,
    b_hat: Mat<T>,
    a_bar: T,
    b_bar: Vec<T>,
    w: Option<SvecVector<T>>,
}

impl<T: Scalar> BundleState<T> {
    /// Empty bundle with a zero aggregate.
    pub fn empty(n: usize, m: usize, materialize_w: bool) -> Self {
        Self {
            p: Mat::zeros(n, 0),
            a_hat: Vec::new(),
            b_hat: Mat::zeros(m, 0),
            a_bar: T::zero(),
            b_bar: vec![T::zero(); m],
            w: materialize_w.then(|| SvecVector::zeros(n)),
        }
    }

    /// Bundle holding exactly the columns of `v` and a zero aggregate.
    pub fn seeded(v: &Mat<T>, data: &PvecData<T>, m: usize, materialize_w: bool) -> Self {
        let mut s = Self::empty(v.rows(), m, materialize_w);
        s.p = v.clone();
        s.a_hat = data.a.clone();
        s.b_hat = data.b.clone();
        s
    }

    #[inline]
    pub fn l(&self) -> usize {
        self.p.cols()
    }

    pub fn n(&self) -> usize {
        self.p.rows()
    }

    pub fn m(&self) -> usize {
        self.b_bar.len()
    }

    pub fn p(&self) -> &Mat<T> {
        &self.p
    }

    pub fn a_hat(&self) -> &[T] {
        &self.a_hat
    }

    pub fn b_hat(&self) -> &Mat<T> {
        &self.b_hat
    }

    pub fn a_bar(&self) -> T {
        self.a_bar
    }

    pub fn b_bar(&self) -> &[T] {
        &self.b_bar
    }

    /// `svec(W)` when the aggregate is materialized.
    pub fn w(&self) -> Option<&SvecVector<T>> {
        self.w.as_ref()
    }

    pub fn is_materialized(&self) -> bool {
        self.w.is_some()
    }

    /// `a = [a_bar; a_hat]`.
    pub fn model_a(&self) -> Vec<T> {
        std::iter::once(self.a_bar)
            .chain(self.a_hat.iter().copied())
            .collect()
    }

    /// `B = [B_bar, B_hat]`.
    pub fn model_b(&self) -> Mat<T> {
        let mut b = Mat::from_col_major(self.m(), 1, self.b_bar.clone());
        b.append_cols(&self.b_hat);
        b
    }

    /// `F_k(y)` for this bundle.
    pub fn eval(&self, y: &[T], rho: T, b: &[T]) -> T {
        model_eval(y, &self.model_a(), &self.model_b(), rho, b)
    }

    /// Zeroes the aggregate (`a_bar = 0, B_bar = 0, W = 0`).
    pub fn clear_aggregate(&mut self) {
        self.a_bar = T::zero();
        self.b_bar.iter_mut().for_each(|v| *v = T::zero());
        if let Some(w) = self.w.as_mut() {
            w.values_mut().iter_mut().for_each(|v| *v = T::zero());
        }
    }

    /// `svec(eta W + P diag(x) P')` for weights `u = [eta; x]`.
    pub fn combine_svec(&self, u: &[T]) -> Option<SvecVector<T>> {
        let w = self.w.as_ref()?;
        assert_eq!(u.len(), self.l() + 1);
        let mut out: Vec<T> = w.values().iter().map(|&v| u[0] * v).collect();
        for (j, &xj) in u[1..].iter().enumerate() {
            if xj == T::zero() {
                continue;
            }
            for (o, s) in out.iter_mut().zip(svec_outer(self.p.col(j))) {
                *o = *o + xj * s;
            }
        }
        Some(SvecVector::from_values(out).expect("triangular"))
    }
}

/// Result of [`aggregate_and_append`].
#[derive(Debug, Clone, PartialEq)]
pub struct BundleUpdate<T> {
    pub state: BundleState<T>,
    /// The old weights re-expressed in the new model:
    /// `[eta + 1'x_bar; x_hat; 0]`. Same total mass, same `a'u` and `B u`.
    pub carried: Vec<T>,
}

/// Folds the `p_bar` columns into the aggregate and appends `v_new`.
#[allow(clippy::too_many_arguments)]
pub fn aggregate_and_append<T: Scalar>(
    state: BundleState<T>,
    u: &BundleWeights<T>,
    v_new: &Mat<T>,
    new_data: &PvecData<T>,
    sets: &AggregationSets,
    l_max: usize,
) -> Result<BundleUpdate<T>, BundleError> {
    let l = state.l();
    if u.x.len() != l {
        return Err(BundleError::WeightLength {
            expected: l,
            found: u.x.len(),
        });
    }
    let r = v_new.cols();
    let new_l = sets.p_hat.len() + r;
    if new_l > l_max {
        return Err(BundleError::CapExceeded { l: new_l, l_max });
    }
    let x_bar: Vec<T> = sets.p_bar.iter().map(|&i| u.x[i]).collect();
    let mass = u.eta + x_bar.iter().copied().sum::<T>();

    let BundleState {
        p,
        a_hat,
        b_hat,
        a_bar,
        b_bar,
        w,
    } = state;

    let (new_a_bar, new_b_bar, new_w) = if mass == T::zero() {
        (
            T::zero(),
            vec![T::zero(); b_bar.len()],
            w.map(|w| SvecVector::zeros(w.n())),
        )
    } else {
        let mut na = u.eta * a_bar;
        let mut nb: Vec<T> = b_bar.iter().map(|&v| u.eta * v).collect();
        for (&i, &xi) in sets.p_bar.iter().zip(&x_bar) {
            na = na + xi * a_hat[i];
            for (o, &bv) in nb.iter_mut().zip(b_hat.col(i)) {
                *o = *o + xi * bv;
            }
        }
        let nw = w.map(|w| {
            let mut vals: Vec<T> = w.values().iter().map(|&v| u.eta * v).collect();
            for (&i, &xi) in sets.p_bar.iter().zip(&x_bar) {
                if xi == T::zero() {
                    continue;
                }
                for (o, s) in vals.iter_mut().zip(svec_outer(p.col(i))) {
                    *o = *o + xi * s;
                }
            }
            vals.iter_mut().for_each(|v| *v = *v / mass);
            SvecVector::from_values(vals).expect("triangular")
        });
        nb.iter_mut().for_each(|v| *v = *v / mass);
        (na / mass, nb, nw)
    };

    let mut new_p = p.select_cols(&sets.p_hat);
    new_p.append_cols(v_new);
    let mut new_a_hat: Vec<T> = sets.p_hat.iter().map(|&i| a_hat[i]).collect();
    new_a_hat.extend_from_slice(&new_data.a);
    let mut new_b_hat = b_hat.select_cols(&sets.p_hat);
    new_b_hat.append_cols(&new_data.b);

    let mut carried = Vec::with_capacity(new_l + 1);
    carried.push(mass);
    carried.extend(sets.p_hat.iter().map(|&i| u.x[i]));
    carried.extend(std::iter::repeat_n(T::zero(), r));

    Ok(BundleUpdate {
        state: BundleState {
            p: new_p,
            a_hat: new_a_hat,
            b_hat: new_b_hat,
            a_bar: new_a_bar,
            b_bar: new_b_bar,
            w: new_w,
        },
        carried,
    })
}
