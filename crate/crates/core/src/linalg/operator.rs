use crate::linalg::sym::{dot, norm2, smat, svec, svec_len, SvecVector, SymMatrix};
use crate::linalg::{LinalgError, Mat};
use crate::Scalar;

/// The linear map `X -> [<A_1, X>, ..., <A_m, X>]`, stored as the sparse
/// `svec_len(n) x m` matrix whose i-th column is `svec(A_i)` (compressed by
/// column).
///
/// Linear independence of the `A_i` is assumed, not checked.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintOperator<T> {
    n: usize,
    col_ptr: Vec<usize>,
    idx: Vec<usize>,
    val: Vec<T>,
}

impl<T: Scalar> ConstraintOperator<T> {
    pub fn from_matrices(n: usize, mats: &[SymMatrix<T>]) -> Result<Self, LinalgError> {
        let mut col_ptr = Vec::with_capacity(mats.len() + 1);
        let mut idx = Vec::new();
        let mut val = Vec::new();
        col_ptr.push(0);
        for a in mats {
            if a.n() != n {
                return Err(LinalgError::DimensionMismatch {
                    expected: n,
                    found: a.n(),
                });
            }
            for (k, &v) in svec(a).values().iter().enumerate() {
                if v != T::zero() {
                    idx.push(k);
                    val.push(v);
                }
            }
            col_ptr.push(idx.len());
        }
        Ok(Self { n, col_ptr, idx, val })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.col_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.val.len()
    }

    /// Sparse column `i`: `(svec indices, svec values)`.
    #[inline]
    pub fn column(&self, i: usize) -> (&[usize], &[T]) {
        let r = self.col_ptr[i]..self.col_ptr[i + 1];
        (&self.idx[r.clone()], &self.val[r])
    }

    /// `A_i` as a symmetric matrix.
    pub fn constraint_matrix(&self, i: usize) -> SymMatrix<T> {
        let mut v = SvecVector::zeros(self.n);
        let (idx, val) = self.column(i);
        for (&k, &x) in idx.iter().zip(val) {
            v.values_mut()[k] = x;
        }
        smat(&v)
    }

    fn check_svec(&self, len: usize) -> Result<(), LinalgError> {
        if len != svec_len(self.n) {
            return Err(LinalgError::DimensionMismatch {
                expected: svec_len(self.n),
                found: len,
            });
        }
        Ok(())
    }

    /// `A(X) = Avec^T svec(X)` for `X` given in `svec` form.
    pub fn apply_svec(&self, x: &[T]) -> Result<Vec<T>, LinalgError> {
        self.check_svec(x.len())?;
        Ok((0..self.m())
            .map(|i| {
                let (idx, val) = self.column(i);
                idx.iter()
                    .zip(val)
                    .fold(T::zero(), |acc, (&k, &a)| acc + a * x[k])
            })
            .collect())
    }

    /// `A(X)`.
    pub fn apply(&self, x: &SymMatrix<T>) -> Result<Vec<T>, LinalgError> {
        if x.n() != self.n {
            return Err(LinalgError::DimensionMismatch {
                expected: self.n,
                found: x.n(),
            });
        }
        self.apply_svec(svec(x).values())
    }

    /// `svec(A^T y) = Avec y`.
    pub fn adjoint_svec(&self, y: &[T]) -> Result<SvecVector<T>, LinalgError> {
        if y.len() != self.m() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.m(),
                found: y.len(),
            });
        }
        let mut out = SvecVector::zeros(self.n);
        let v = out.values_mut();
        for (i, &yi) in y.iter().enumerate() {
            if yi == T::zero() {
                continue;
            }
            let (idx, val) = self.column(i);
            for (&k, &a) in idx.iter().zip(val) {
                v[k] = v[k] + a * yi;
            }
        }
        Ok(out)
    }

    /// `A^T y = sum_i y_i A_i`.
    pub fn adjoint(&self, y: &[T]) -> Result<SymMatrix<T>, LinalgError> {
        Ok(smat(&self.adjoint_svec(y)?))
    }

    /// `Avec^T * cols` for a dense `svec_len(n) x l` matrix.
    pub fn apply_cols(&self, cols: &Mat<T>) -> Result<Mat<T>, LinalgError> {
        self.check_svec(cols.rows())?;
        let m = self.m();
        let mut out = Mat::zeros(m, cols.cols());
        for j in 0..cols.cols() {
            let c = cols.col(j);
            for i in 0..m {
                let (idx, val) = self.column(i);
                out[(i, j)] = idx
                    .iter()
                    .zip(val)
                    .fold(T::zero(), |acc, (&k, &a)| acc + a * c[k]);
            }
        }
        Ok(out)
    }

    /// Estimates `||A^T||_op = sqrt(lambda_max(Avec^T Avec))` by power
    /// iteration on `y -> A(A^T y)`.
    pub fn op_norm_estimate(&self, max_iter: usize, rel_tol: T) -> T {
        let m = self.m();
        if m == 0 {
            return T::zero();
        }
        let mut y: Vec<T> = (0..m)
            .map(|i| T::one() + T::lit(0.01) * T::from_usize_lossy(i % 7))
            .collect();
        let mut est = T::zero();
        for _ in 0..max_iter {
            let ny = norm2(&y);
            if ny == T::zero() {
                return T::zero();
            }
            y.iter_mut().for_each(|v| *v = *v / ny);
            let at = self.adjoint_svec(&y).expect("sized");
            let next = self.apply_svec(at.values()).expect("sized");
            let lam = dot(&y, &next);
            let done = (lam - est).abs() <= rel_tol * lam.abs();
            est = lam;
            y = next;
            if done {
                break;
            }
        }
        est.max(T::zero()).sqrt()
    }
}
