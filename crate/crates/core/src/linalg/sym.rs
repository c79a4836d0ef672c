//! Symmetric matrices in lower-triangular coordinate form and their
//! `svec` vectorization.
//!
//! `svec` stacks the lower triangle column by column, scaling off-diagonal
//! entries by `sqrt(2)` so that `svec(A) . svec(B) == <A, B>`.

use std::collections::BTreeMap;

use crate::linalg::{LinalgError, Mat};
use crate::Scalar;

/// Length of `svec` for an `n x n` symmetric matrix.
#[inline]
pub fn svec_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Inverts [`svec_len`]; `None` when `len` is not a triangular number.
pub fn svec_dim(len: usize) -> Option<usize> {
    // n = (-1 + sqrt(1 + 8 len)) / 2, checked exactly in integers.
    let approx = (((8 * len + 1) as f64).sqrt() - 1.0) / 2.0;
    let guess = approx.round() as usize;
    (guess.saturating_sub(1)..=guess + 1).find(|&n| svec_len(n) == len)
}

/// Position of lower-triangle entry `(row, col)`, `row >= col`, in `svec` order.
#[inline]
pub fn svec_index(n: usize, row: usize, col: usize) -> usize {
    debug_assert!(row >= col && row < n);
    col * n - col * col.saturating_sub(1) / 2 + (row - col)
}

/// `(row, col)` pairs in `svec` order.
pub fn svec_coords(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |col| (col..n).map(move |row| (row, col)))
}

/// A real symmetric `n x n` matrix stored as its lower triangle.
///
/// Entries are kept sorted in `svec` order (column-major lower triangle) with
/// no duplicates. Explicit zeros are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<T> {
    n: usize,
    entries: Vec<(usize, usize, T)>,
}

impl<T: Scalar> SymMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, entries: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            entries: (0..n).map(|i| (i, i, T::one())).collect(),
        }
    }

    pub fn diagonal(values: &[T]) -> Self {
        Self {
            n: values.len(),
            entries: values.iter().enumerate().map(|(i, &v)| (i, i, v)).collect(),
        }
    }

    /// Builds from `(row, col, value)` triplets. Upper-triangle entries
    /// (`row < col`) are mirrored into the lower triangle; a position given
    /// twice is an error.
    pub fn from_triplets(
        n: usize,
        triplets: impl IntoIterator<Item = (usize, usize, T)>,
    ) -> Result<Self, LinalgError> {
        let mut map = BTreeMap::new();
        for (i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(LinalgError::IndexOutOfRange { row: i, col: j, n });
            }
            if !v.is_finite() {
                return Err(LinalgError::NonFinite { row: i, col: j });
            }
            let (r, c) = if i >= j { (i, j) } else { (j, i) };
            if map.insert((c, r), v).is_some() {
                return Err(LinalgError::DuplicateEntry { row: r, col: c });
            }
        }
        Ok(Self {
            n,
            entries: map.into_iter().map(|((c, r), v)| (r, c, v)).collect(),
        })
    }

    /// Lower triangle of a dense symmetric matrix; exact zeros are dropped.
    pub fn from_dense(m: &Mat<T>) -> Self {
        assert_eq!(m.rows(), m.cols(), "square matrix expected");
        let n = m.rows();
        let entries = svec_coords(n)
            .filter_map(|(r, c)| {
                let v = m[(r, c)];
                (v != T::zero()).then_some((r, c, v))
            })
            .collect();
        Self { n, entries }
    }

    pub fn to_dense(&self) -> Mat<T> {
        let mut m = Mat::zeros(self.n, self.n);
        for &(r, c, v) in &self.entries {
            m[(r, c)] = v;
            m[(c, r)] = v;
        }
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn entries(&self) -> &[(usize, usize, T)] {
        &self.entries
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        let (r, c) = if row >= col { (row, col) } else { (col, row) };
        self.entries
            .binary_search_by(|&(er, ec, _)| (ec, er).cmp(&(c, r)))
            .map(|k| self.entries[k].2)
            .unwrap_or_else(|_| T::zero())
    }

    pub fn trace(&self) -> T {
        self.entries
            .iter()
            .filter(|e| e.0 == e.1)
            .map(|e| e.2)
            .sum()
    }

    /// Frobenius inner product `<self, other>`.
    pub fn inner(&self, other: &Self) -> T {
        assert_eq!(self.n, other.n);
        let two = T::lit(2.0);
        let (mut i, mut j) = (0, 0);
        let mut acc = T::zero();
        let (a, b) = (&self.entries, &other.entries);
        while i < a.len() && j < b.len() {
            let ka = (a[i].1, a[i].0);
            let kb = (b[j].1, b[j].0);
            match ka.cmp(&kb) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    let w = if a[i].0 == a[i].1 { T::one() } else { two };
                    acc = acc + w * a[i].2 * b[j].2;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    pub fn frobenius_norm(&self) -> T {
        self.inner(self).sqrt()
    }

    /// `y = S x`.
    pub fn matvec(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        y.iter_mut().for_each(|v| *v = T::zero());
        for &(r, c, v) in &self.entries {
            y[r] = y[r] + v * x[c];
            if r != c {
                y[c] = y[c] + v * x[r];
            }
        }
    }

    pub fn scale(&self, alpha: T) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|&(r, c, v)| (r, c, alpha * v)).collect(),
        }
    }

    /// `alpha * self + beta * other`.
    pub fn axpby(&self, alpha: T, other: &Self, beta: T) -> Self {
        assert_eq!(self.n, other.n);
        let mut v = svec(self).into_values();
        let w = svec(other);
        for (vi, &wi) in v.iter_mut().zip(w.values()) {
            *vi = alpha * *vi + beta * wi;
        }
        smat(&SvecVector::from_values(v).expect("triangular length"))
    }

    pub fn neg(&self) -> Self {
        self.scale(-T::one())
    }
}

/// A dense vector in `svec` ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct SvecVector<T> {
    n: usize,
    values: Vec<T>,
}

impl<T: Scalar> SvecVector<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            values: vec![T::zero(); svec_len(n)],
        }
    }

    /// Wraps raw values; the length must be triangular.
    pub fn from_values(values: Vec<T>) -> Result<Self, LinalgError> {
        let n = svec_dim(values.len()).ok_or(LinalgError::NotTriangular(values.len()))?;
        Ok(Self { n, values })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn dot(&self, other: &Self) -> T {
        dot(&self.values, &other.values)
    }
}

/// `svec(M)`.
pub fn svec<T: Scalar>(m: &SymMatrix<T>) -> SvecVector<T> {
    let mut out = SvecVector::zeros(m.n);
    let sqrt2 = T::lit(std::f64::consts::SQRT_2);
    for &(r, c, v) in &m.entries {
        let k = svec_index(m.n, r, c);
        out.values[k] = if r == c { v } else { sqrt2 * v };
    }
    out
}

/// Inverse of [`svec`]. Zero entries are not stored.
pub fn smat<T: Scalar>(v: &SvecVector<T>) -> SymMatrix<T> {
    let sqrt2 = T::lit(std::f64::consts::SQRT_2);
    let entries = svec_coords(v.n)
        .zip(v.values.iter())
        .filter(|(_, &x)| x != T::zero())
        .map(|((r, c), &x)| (r, c, if r == c { x } else { x / sqrt2 }))
        .collect();
    SymMatrix { n: v.n, entries }
}

/// [`smat`] from a raw slice, checking the length.
pub fn smat_values<T: Scalar>(values: &[T]) -> Result<SymMatrix<T>, LinalgError> {
    Ok(smat(&SvecVector::from_values(values.to_vec())?))
}

#[inline]
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub fn norm2<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}
