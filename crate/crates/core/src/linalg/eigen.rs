//! Symmetric eigensolvers: a dense Householder-tridiagonal + implicit QL
//! decomposition and a thick-restart Lanczos iteration for extreme
//! eigenpairs of larger sparse matrices.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::sym::{dot, norm2, SymMatrix};
use crate::linalg::{LinalgError, Mat};
use crate::Scalar;

/// Dimension above which [`extreme_eigs`] switches from the dense solver to
/// Lanczos.
pub const DENSE_EIG_MAX_N: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Smallest,
    Largest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigMethod {
    /// Dense for `n <= DENSE_EIG_MAX_N`, Lanczos above.
    Auto,
    Dense,
    Lanczos,
}

#[derive(Debug, Clone, Copy)]
pub struct EigOptions<T> {
    /// Residual tolerance: `||S v - lambda v|| <= tol * (1 + |lambda|)`.
    pub tol: T,
    pub max_restarts: usize,
    /// Krylov subspace dimension; `None` means `min(max(4r, 20), n)`.
    pub krylov_dim: Option<usize>,
    pub method: EigMethod,
}

impl<T: Scalar> Default for EigOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::tol(1e-9),
            max_restarts: 300,
            krylov_dim: None,
            method: EigMethod::Auto,
        }
    }
}

/// `r` extreme eigenpairs. Values ascending for [`Which::Smallest`],
/// descending for [`Which::Largest`]; `vectors` is `n x r` with unit columns.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult<T> {
    pub values: Vec<T>,
    pub vectors: Mat<T>,
}

impl<T: Scalar> EigenResult<T> {
    /// Largest `||S v_i - lambda_i v_i|| / (1 + |lambda_i|)` over the returned pairs.
    pub fn max_rel_residual(&self, s: &SymMatrix<T>) -> T {
        let n = s.n();
        let mut sv = vec![T::zero(); n];
        self.values
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (i, &lam)| {
                let v = self.vectors.col(i);
                s.matvec(v, &mut sv);
                let res: T = sv
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| (a - lam * b) * (a - lam * b))
                    .sum::<T>()
                    .sqrt();
                acc.max(res / (T::one() + lam.abs()))
            })
    }
}

/// Full eigendecomposition of a dense symmetric matrix: eigenvalues ascending,
/// eigenvectors as the columns of the returned matrix.
pub fn sym_eigen<T: Scalar>(a: &Mat<T>) -> Result<(Vec<T>, Mat<T>), LinalgError> {
    let n = a.rows();
    assert_eq!(n, a.cols(), "square matrix expected");
    if n == 0 {
        return Ok((Vec::new(), Mat::zeros(0, 0)));
    }
    let mut v = a.clone();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e)?;
    Ok((d, v))
}

/// Eigenvalues only, ascending.
pub fn sym_eigenvalues<T: Scalar>(a: &Mat<T>) -> Result<Vec<T>, LinalgError> {
    sym_eigen(a).map(|(d, _)| d)
}

// Householder reduction to tridiagonal form (EISPACK tred2 ordering).
fn tred2<T: Scalar>(v: &mut Mat<T>, d: &mut [T], e: &mut [T]) {
    let n = d.len();
    let zero = T::zero();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = zero;
        let mut h = zero;
        for k in 0..i {
            scale = scale + d[k].abs();
        }
        if scale == zero {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = zero;
                v[(j, i)] = zero;
            }
        } else {
            for k in 0..i {
                d[k] = d[k] / scale;
                h = h + d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > zero {
                g = -g;
            }
            e[i] = scale * g;
            h = h - f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = zero;
            }
            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in j + 1..i {
                    g = g + v[(k, j)] * d[k];
                    e[k] = e[k] + v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = zero;
            for j in 0..i {
                e[j] = e[j] / h;
                f = f + e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] = e[j] - hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[(k, j)] = v[(k, j)] - (f * e[k] + g * d[k]);
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = zero;
            }
        }
        d[i] = h;
    }
    for i in 0..n - 1 {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = T::one();
        let h = d[i + 1];
        if h != zero {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = zero;
                for k in 0..=i {
                    g = g + v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    v[(k, j)] = v[(k, j)] - g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = zero;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = zero;
    }
    v[(n - 1, n - 1)] = T::one();
    e[0] = zero;
}

// Implicit QL iterations on the tridiagonal (d, e), accumulating into v.
fn tql2<T: Scalar>(v: &mut Mat<T>, d: &mut [T], e: &mut [T]) -> Result<(), LinalgError> {
    let n = d.len();
    let zero = T::zero();
    let two = T::lit(2.0);
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = zero;
    let mut f = zero;
    let mut tst1 = zero;
    let eps = T::epsilon();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(LinalgError::EigenNonConvergence {
                        best_residual: e[l].abs().as_f64(),
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < zero {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di = *di - h;
                }
                f = f + h;
                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = zero;
                let mut s2 = zero;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    let (lo, hi) = v_cols_mut(v, i, i + 1);
                    for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                        let hk = *b;
                        *b = s * *a + c * hk;
                        *a = c * *a - s * hk;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] = d[l] + f;
        e[l] = zero;
    }
    // Selection sort keeps eigenvector swaps to at most n - 1.
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            let (a, b) = v_cols_mut(v, i, k);
            a.swap_with_slice(b);
        }
    }
    Ok(())
}

fn v_cols_mut<T: Scalar>(v: &mut Mat<T>, i: usize, j: usize) -> (&mut [T], &mut [T]) {
    debug_assert!(i < j);
    let rows = v.rows();
    let (a, b) = v.as_mut_slice().split_at_mut(j * rows);
    (&mut a[i * rows..(i + 1) * rows], &mut b[..rows])
}

/// `r` extreme eigenpairs of `s`.
pub fn extreme_eigs<T: Scalar>(
    s: &SymMatrix<T>,
    r: usize,
    which: Which,
) -> Result<EigenResult<T>, LinalgError> {
    extreme_eigs_with(s, r, which, &EigOptions::default())
}

pub fn extreme_eigs_with<T: Scalar>(
    s: &SymMatrix<T>,
    r: usize,
    which: Which,
    opts: &EigOptions<T>,
) -> Result<EigenResult<T>, LinalgError> {
    let n = s.n();
    if r == 0 || r > n {
        return Err(LinalgError::InvalidEigenCount { r, n });
    }
    let dense = match opts.method {
        EigMethod::Dense => true,
        EigMethod::Lanczos => false,
        EigMethod::Auto => n <= DENSE_EIG_MAX_N,
    };
    if dense {
        dense_extreme(&s.to_dense(), r, which)
    } else {
        lanczos_extreme(n, |x, y| s.matvec(x, y), r, which, opts)
    }
}

/// Extreme eigenpairs of a dense symmetric matrix via the full decomposition.
pub fn dense_extreme<T: Scalar>(
    a: &Mat<T>,
    r: usize,
    which: Which,
) -> Result<EigenResult<T>, LinalgError> {
    let n = a.rows();
    if r == 0 || r > n {
        return Err(LinalgError::InvalidEigenCount { r, n });
    }
    let (d, v) = sym_eigen(a)?;
    let idx: Vec<usize> = match which {
        Which::Smallest => (0..r).collect(),
        Which::Largest => (n - r..n).rev().collect(),
    };
    Ok(EigenResult {
        values: idx.iter().map(|&i| d[i]).collect(),
        vectors: v.select_cols(&idx),
    })
}

/// Thick-restart Lanczos with full reorthogonalization for `r` extreme
/// eigenpairs of the symmetric operator `matvec` (`y = A x`).
pub fn lanczos_extreme<T, F>(
    n: usize,
    matvec: F,
    r: usize,
    which: Which,
    opts: &EigOptions<T>,
) -> Result<EigenResult<T>, LinalgError>
where
    T: Scalar,
    F: Fn(&[T], &mut [T]),
{
    if r == 0 || r > n {
        return Err(LinalgError::InvalidEigenCount { r, n });
    }
    // Work on the smallest end; flip the sign for the largest.
    let sign = match which {
        Which::Smallest => T::one(),
        Which::Largest => -T::one(),
    };
    let apply = |x: &[T], y: &mut [T]| {
        matvec(x, y);
        if sign < T::zero() {
            y.iter_mut().for_each(|v| *v = -*v);
        }
    };
    let kdim = opts.krylov_dim.unwrap_or((4 * r).max(20)).clamp(r + 1, n.max(r + 1)).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a2c_2057);
    let mut random_unit = |basis: &[Vec<T>]| -> Option<Vec<T>> {
        for _ in 0..8 {
            let mut w: Vec<T> = (0..n)
                .map(|_| T::lit(StandardNormal.sample(&mut rng)))
                .collect();
            orthogonalize(&mut w, basis);
            orthogonalize(&mut w, basis);
            let nw = norm2(&w);
            if nw > T::lit(1e-8) {
                w.iter_mut().for_each(|x| *x = *x / nw);
                return Some(w);
            }
        }
        None
    };

    let mut basis: Vec<Vec<T>> = Vec::with_capacity(kdim);
    let mut h = Mat::<T>::zeros(kdim, kdim);
    basis.push(random_unit(&[]).expect("n >= 1"));
    let mut processed = 0usize;
    let mut w = vec![T::zero(); n];
    let mut best = f64::INFINITY;

    for _restart in 0..=opts.max_restarts {
        let mut beta_last = T::zero();
        let mut next: Option<Vec<T>> = None;
        while processed < basis.len() {
            let c = processed;
            apply(&basis[c], &mut w);
            for i in 0..=c {
                let hic = dot(&basis[i], &w);
                h[(i, c)] = hic;
                h[(c, i)] = hic;
            }
            for i in 0..=c {
                let hic = h[(i, c)];
                for (wk, &vk) in w.iter_mut().zip(&basis[i]) {
                    *wk = *wk - hic * vk;
                }
            }
            orthogonalize(&mut w, &basis);
            let beta = norm2(&w);
            processed += 1;
            let scale = h.max_abs().max(T::one());
            let candidate = if beta > T::epsilon().sqrt() * T::lit(1e-4) * scale {
                beta_last = beta;
                Some(w.iter().map(|&x| x / beta).collect::<Vec<T>>())
            } else {
                beta_last = T::zero();
                if basis.len() < n {
                    random_unit(&basis)
                } else {
                    None
                }
            };
            if basis.len() < kdim {
                match candidate {
                    Some(v) => basis.push(v),
                    None => break,
                }
            } else {
                next = candidate;
            }
        }

        let k = basis.len();
        let hk = Mat::from_fn(k, k, |i, j| h[(i, j)]);
        let (theta, svecs) = sym_eigen(&hk)?;
        let want = r.min(k);
        // Residual of Ritz pair i is |beta_last * s_{k-1,i}|.
        let est_ok = (0..want).all(|i| {
            (beta_last * svecs[(k - 1, i)]).abs() <= opts.tol * (T::one() + theta[i].abs()) * T::lit(0.5)
        });
        let ritz = |i: usize| -> Vec<T> {
            let mut y = vec![T::zero(); n];
            for (j, b) in basis.iter().enumerate() {
                let s = svecs[(j, i)];
                for (yk, &bk) in y.iter_mut().zip(b) {
                    *yk = *yk + s * bk;
                }
            }
            let ny = norm2(&y);
            y.iter_mut().for_each(|v| *v = *v / ny);
            y
        };
        if est_ok || k == n {
            let vecs: Vec<Vec<T>> = (0..want).map(ritz).collect();
            let mut worst = T::zero();
            let mut av = vec![T::zero(); n];
            let mut vals = Vec::with_capacity(want);
            for y in &vecs {
                apply(y, &mut av);
                let lam = dot(y, &av);
                let res = av
                    .iter()
                    .zip(y)
                    .map(|(&a, &b)| (a - lam * b) * (a - lam * b))
                    .sum::<T>()
                    .sqrt();
                worst = worst.max(res / (T::one() + lam.abs()));
                vals.push(lam);
            }
            best = best.min(worst.as_f64());
            if worst <= opts.tol && want == r {
                let vectors = Mat::from_columns(n, &vecs);
                let values = vals.into_iter().map(|v| v * sign).collect();
                return Ok(EigenResult { values, vectors });
            }
        } else {
            let worst = (0..want)
                .map(|i| (beta_last * svecs[(k - 1, i)]).abs() / (T::one() + theta[i].abs()))
                .fold(T::zero(), |a, b| a.max(b));
            best = best.min(worst.as_f64());
        }

        // Thick restart: keep the lowest Ritz vectors, continue from the residual.
        let keep = (r + (k - r.min(k)) / 2).min(k.saturating_sub(1)).max(1);
        let kept: Vec<Vec<T>> = (0..keep).map(ritz).collect();
        basis = kept;
        h = Mat::zeros(kdim, kdim);
        for (i, &t) in theta.iter().take(keep).enumerate() {
            h[(i, i)] = t;
        }
        processed = keep;
        let mut f = next.or_else(|| random_unit(&basis));
        if let Some(v) = f.as_mut() {
            orthogonalize(v, &basis);
            let nv = norm2(v);
            if nv > T::lit(1e-8) {
                v.iter_mut().for_each(|x| *x = *x / nv);
            } else {
                f = random_unit(&basis);
            }
        }
        match f {
            Some(v) => basis.push(v),
            None => break,
        }
    }
    Err(LinalgError::EigenNonConvergence {
        best_residual: best,
    })
}

fn orthogonalize<T: Scalar>(w: &mut [T], basis: &[Vec<T>]) {
    for b in basis {
        let c = dot(b, w);
        for (wk, &bk) in w.iter_mut().zip(b) {
            *wk = *wk - c * bk;
        }
    }
}
