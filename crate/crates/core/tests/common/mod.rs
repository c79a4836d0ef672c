//! Oracles and generators shared by the integration tests.
#![allow(dead_code)]

use polybundle::linalg::{Mat, SymMatrix};
use polybundle::qp::quad_objective;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Gaussian elimination with partial pivoting; `None` when singular.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (rhs[i] - s) / a[i][i];
    }
    Some(x)
}

/// Minimum of the QP over all candidate active sets: every free subset, with
/// and without the sum constraint binding.
pub fn enumerate_qp(h: &Mat<f64>, q: &[f64], rho: f64) -> (Vec<f64>, f64) {
    let p = q.len();
    let mut best = (vec![0.0; p], 0.0);
    for mask in 1u32..(1 << p) {
        let free: Vec<usize> = (0..p).filter(|&i| mask & (1 << i) != 0).collect();
        let k = free.len();
        for sum_bind in [false, true] {
            let dim = k + usize::from(sum_bind);
            let mut a = vec![vec![0.0; dim]; dim];
            let mut rhs = vec![0.0; dim];
            for (r, &i) in free.iter().enumerate() {
                for (c, &j) in free.iter().enumerate() {
                    a[r][c] = h[(i, j)];
                }
                rhs[r] = -q[i];
                if sum_bind {
                    a[r][k] = 1.0;
                    a[k][r] = 1.0;
                }
            }
            if sum_bind {
                rhs[k] = rho;
            }
            let Some(sol) = gauss_solve(a, rhs) else {
                continue;
            };
            let mut u = vec![0.0; p];
            for (r, &i) in free.iter().enumerate() {
                u[i] = sol[r];
            }
            let feasible = u.iter().all(|&v| v >= -1e-12) && u.iter().sum::<f64>() <= rho * (1.0 + 1e-12);
            if !feasible {
                continue;
            }
            u.iter_mut().for_each(|v| *v = v.max(0.0));
            let obj = quad_objective(h, q, &u);
            if obj < best.1 {
                best = (u, obj);
            }
        }
    }
    best
}

pub fn random_sym(n: usize, density: f64, rng: &mut ChaCha8Rng) -> SymMatrix<f64> {
    let mut t = Vec::new();
    for c in 0..n {
        for r in c..n {
            if r == c || rng.random::<f64>() < density {
                t.push((r, c, gaussian(rng)));
            }
        }
    }
    SymMatrix::from_triplets(n, t).unwrap()
}

/// Cyclic Jacobi eigenvalues, ascending.
pub fn jacobi_eigenvalues(a: &Mat<f64>) -> Vec<f64> {
    let n = a.rows();
    let mut a = a.clone();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off.sqrt() < 1e-15 * a.max_abs().max(1.0) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[(p, q)] == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    d.sort_by(f64::total_cmp);
    d
}
