//! Random sparse SDPs with a planted strictly complementary solution.
//!
//! Draw order (all from one `ChaCha8Rng` seeded with `seed`):
//! 1. `G`: for each lower-triangle position in `svec` order, a uniform draw
//!    decides inclusion (`< sparsity`), followed by a standard normal value
//!    for included positions.
//! 2. For each `i = 1..m`, the pattern and values of `A_i` the same way; if no
//!    off-diagonal entry was drawn, one position is picked uniformly among the
//!    off-diagonals and given a normal value.
//! 3. `y*`, `m` standard normals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::linalg::{svec_coords, sym_eigen, Mat, SymMatrix};
use crate::problems::{ProblemError, SdpProblem};
use crate::Scalar;

/// The optimal triple built into a generated instance.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedSolution<T> {
    pub x_star: SymMatrix<T>,
    pub y_star: Vec<T>,
    pub s_star: SymMatrix<T>,
    /// Largest over smallest nonzero eigenvalue of `X*`.
    pub kappa_x: T,
    pub kappa_s: T,
}

/// JSON sidecar written next to a generated instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorManifest {
    pub n: usize,
    pub m: usize,
    pub r: usize,
    pub sparsity: f64,
    pub s: f64,
    pub seed: u64,
    pub kappa_x: f64,
    pub kappa_s: f64,
    /// `<C, X*>`.
    pub planted_objective: f64,
    pub known_trace: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<String>,
    pub y_star: Vec<f64>,
    /// Lower triangle of `X*` as 0-based `(row, col, value)`.
    pub x_star: Vec<(usize, usize, f64)>,
}

impl GeneratorManifest {
    #[allow(clippy::too_many_arguments)]
    pub fn new<T: Scalar>(
        problem: &SdpProblem<T>,
        planted: &PlantedSolution<T>,
        r: usize,
        sparsity: f64,
        s: f64,
        seed: u64,
    ) -> Self {
        Self {
            n: problem.n(),
            m: problem.m(),
            r,
            sparsity,
            s,
            seed,
            kappa_x: planted.kappa_x.as_f64(),
            kappa_s: planted.kappa_s.as_f64(),
            planted_objective: problem.c().inner(&planted.x_star).as_f64(),
            known_trace: planted.x_star.trace().as_f64(),
            instance: None,
            y_star: planted.y_star.iter().map(|v| v.as_f64()).collect(),
            x_star: planted
                .x_star
                .entries()
                .iter()
                .map(|&(r, c, v)| (r, c, v.as_f64()))
                .collect(),
        }
    }
}

fn normal<T: Scalar>(rng: &mut ChaCha8Rng) -> T {
    T::lit(rng.sample::<f64, _>(StandardNormal))
}

fn sparse_symmetric<T: Scalar>(
    rng: &mut ChaCha8Rng,
    n: usize,
    sparsity: f64,
) -> Vec<(usize, usize, T)> {
    let mut out = Vec::new();
    for (r, c) in svec_coords(n) {
        if rng.random::<f64>() < sparsity {
            out.push((r, c, normal(rng)));
        }
    }
    out
}

/// Shifts the diagonal nonzeros so the trace vanishes; the pattern is kept
/// except where a shifted entry lands exactly on zero.
fn make_trace_zero<T: Scalar>(entries: &mut Vec<(usize, usize, T)>) {
    let diag: Vec<usize> = (0..entries.len())
        .filter(|&k| entries[k].0 == entries[k].1)
        .collect();
    if diag.is_empty() {
        return;
    }
    let tr: T = diag.iter().map(|&k| entries[k].2).sum();
    let shift = tr / T::from_usize_lossy(diag.len());
    for &k in &diag {
        entries[k].2 = entries[k].2 - shift;
    }
    // Re-centre once more so the residual trace is at rounding level.
    let tr: T = diag.iter().map(|&k| entries[k].2).sum();
    entries[diag[0]].2 = entries[diag[0]].2 - tr;
    entries.retain(|e| e.2 != T::zero());
}

/// Lower triangle of `U diag(w) U'` over the selected columns.
fn low_rank<T: Scalar>(u: &Mat<T>, w: &[T], cols: &[usize]) -> SymMatrix<T> {
    let n = u.rows();
    let mut m = Mat::zeros(n, n);
    for (&j, &wj) in cols.iter().zip(w) {
        let v = u.col(j);
        for c in 0..n {
            let s = wj * v[c];
            for r in c..n {
                m[(r, c)] = m[(r, c)] + s * v[r];
            }
        }
    }
    let entries = svec_coords(n).map(|(r, c)| (r, c, m[(r, c)]));
    SymMatrix::from_triplets(n, entries).expect("lower triangle is valid")
}

/// Random sparse SDP with a planted optimal triple `(X*, y*, S*)` where
/// `rank X* = r` and `rank S* = n - r`.
///
/// `X = s (G + |lambda_min(G)| I) + I` for sparse normal `G`; its `r`
/// largest eigenpairs form `X*` and the rest `S*`. Each `A_i = s Abar_i`
/// with `tr(Abar_i) = 0`; `C = S* + A^T y*` and `b = A(X*)`.
pub fn generate_random_sdp<T: Scalar>(
    n: usize,
    m: usize,
    r: usize,
    sparsity: f64,
    s: f64,
    seed: u64,
) -> Result<(SdpProblem<T>, PlantedSolution<T>), ProblemError> {
    if n < 2 {
        return Err(ProblemError::InvalidParameter(format!("n = {n} must be at least 2")));
    }
    if r == 0 || r >= n {
        return Err(ProblemError::InvalidParameter(format!(
            "rank {r} must satisfy 1 <= r < n = {n}"
        )));
    }
    if m == 0 {
        return Err(ProblemError::NoConstraints);
    }
    if !(sparsity > 0.0 && sparsity <= 1.0) {
        return Err(ProblemError::InvalidParameter(format!(
            "sparsity {sparsity} must lie in (0, 1]"
        )));
    }
    if !(s > 0.0 && s.is_finite()) {
        return Err(ProblemError::InvalidParameter(format!("scale s = {s} must be positive")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let st = T::lit(s);

    let g = SymMatrix::from_triplets(n, sparse_symmetric::<T>(&mut rng, n, sparsity))?;
    let (g_vals, g_vecs) = sym_eigen(&g.to_dense())?;
    let shift = g_vals[0].abs();
    // Eigenvalues of X, ascending like those of G.
    let x_vals: Vec<T> = g_vals.iter().map(|&l| st * (l + shift) + T::one()).collect();
    let top: Vec<usize> = (n - r..n).collect();
    let rest: Vec<usize> = (0..n - r).collect();
    let x_star = low_rank(&g_vecs, &x_vals[n - r..], &top);
    let s_star = low_rank(&g_vecs, &x_vals[..n - r], &rest);
    let kappa_x = x_vals[n - 1] / x_vals[n - r];
    let kappa_s = x_vals[n - r - 1] / x_vals[0];

    let off_diag = n * (n - 1) / 2;
    let mut constraints = Vec::with_capacity(m);
    for _ in 0..m {
        let mut e = sparse_symmetric::<T>(&mut rng, n, sparsity);
        if e.iter().all(|&(r, c, _)| r == c) {
            let k = rng.random_range(0..off_diag);
            let (r, c) = svec_coords(n)
                .filter(|&(r, c)| r != c)
                .nth(k)
                .expect("k < number of off-diagonals");
            e.push((r, c, normal(&mut rng)));
        }
        make_trace_zero(&mut e);
        for v in e.iter_mut() {
            v.2 = st * v.2;
        }
        constraints.push(SymMatrix::from_triplets(n, e)?);
    }
    let y_star: Vec<T> = (0..m).map(|_| normal(&mut rng)).collect();

    let op = crate::linalg::ConstraintOperator::from_matrices(n, &constraints)?;
    let b = op.apply(&x_star)?;
    let mut c_dense = s_star.to_dense();
    for (yi, a) in y_star.iter().zip(&constraints) {
        for &(r, cc, v) in a.entries() {
            c_dense[(r, cc)] = c_dense[(r, cc)] + *yi * v;
        }
    }
    let c = SymMatrix::from_triplets(n, svec_coords(n).map(|(r, cc)| (r, cc, c_dense[(r, cc)])))?;

    let trace = x_star.trace();
    let problem = SdpProblem::from_operator(c, op, b)?
        .with_name(format!("rand-n{n}-m{m}-r{r}-seed{seed}"))
        .with_known_trace(trace)
        .with_known_rank(r);
    Ok((
        problem,
        PlantedSolution {
            x_star,
            y_star,
            s_star,
            kappa_x,
            kappa_s,
        },
    ))
}
