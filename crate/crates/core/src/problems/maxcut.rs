//! Max-Cut relaxations and the Gset edge-list format.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::SymMatrix;
use crate::problems::{ProblemError, SdpProblem};
use crate::Scalar;

/// Weighted undirected graph with 1-based vertex labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphInstance {
    pub n_vertices: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

impl GraphInstance {
    pub fn new(n_vertices: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self, ProblemError> {
        let mut seen = HashSet::new();
        for (k, &(i, j, w)) in edges.iter().enumerate() {
            let bad = |msg: String| ProblemError::InvalidParameter(format!("edge {}: {msg}", k + 1));
            if i == 0 || j == 0 || i > n_vertices || j > n_vertices {
                return Err(bad(format!("vertex out of range 1..={n_vertices} in ({i}, {j})")));
            }
            if i == j {
                return Err(bad(format!("self-loop at {i}")));
            }
            if !w.is_finite() {
                return Err(bad("non-finite weight".into()));
            }
            if !seen.insert((i.min(j), i.max(j))) {
                return Err(bad(format!("duplicate edge ({i}, {j})")));
            }
        }
        Ok(Self { n_vertices, edges })
    }

    /// Graph Laplacian `diag(W 1) - W`.
    pub fn laplacian<T: Scalar>(&self) -> SymMatrix<T> {
        let n = self.n_vertices;
        let mut deg = vec![0.0f64; n];
        let mut trip = Vec::with_capacity(self.edges.len() + n);
        for &(i, j, w) in &self.edges {
            deg[i - 1] += w;
            deg[j - 1] += w;
            trip.push((i - 1, j - 1, T::lit(-w)));
        }
        trip.extend(deg.iter().enumerate().map(|(i, &d)| (i, i, T::lit(d))));
        SymMatrix::from_triplets(n, trip).expect("validated graph")
    }
}

/// Direction of the Max-Cut relaxation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaxCutSense {
    /// `min 1/4 <L, X>`, the form the method's experiments were stated in.
    #[default]
    Paper,
    /// The classical relaxation `max 1/4 <L, X>`, posed as `min -1/4 <L, X>`.
    Maximize,
}

impl std::str::FromStr for MaxCutSense {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(Self::Paper),
            "maximize" | "max" => Ok(Self::Maximize),
            other => Err(format!("unknown sense '{other}' (expected paper or maximize)")),
        }
    }
}

/// `min +-1/4 <L, X>  s.t.  X_ii = 1, X psd`, with `Tr(X*) = n` recorded.
pub fn build_maxcut_sdp<T: Scalar>(
    g: &GraphInstance,
    sense: MaxCutSense,
) -> Result<SdpProblem<T>, ProblemError> {
    let n = g.n_vertices;
    if n == 0 {
        return Err(ProblemError::InvalidParameter("graph has no vertices".into()));
    }
    let quarter = match sense {
        MaxCutSense::Paper => T::lit(0.25),
        MaxCutSense::Maximize => T::lit(-0.25),
    };
    let c = g.laplacian::<T>().scale(quarter);
    let constraints: Vec<SymMatrix<T>> = (0..n)
        .map(|i| SymMatrix::from_triplets(n, [(i, i, T::one())]).expect("diagonal unit"))
        .collect();
    Ok(SdpProblem::new(c, &constraints, vec![T::one(); n])?
        .with_name(format!("maxcut-n{n}"))
        .with_known_trace(T::from_usize_lossy(n)))
}

/// Parses a Gset file: a header `n_vertices n_edges`, then one `i j w` per
/// edge.
pub fn parse_gset(text: &str) -> Result<GraphInstance, ProblemError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or(ProblemError::Parse {
        line: 1,
        message: "missing header".into(),
    })?;
    let h: Vec<&str> = header.split_whitespace().collect();
    let perr = |line: usize, message: String| ProblemError::Parse { line, message };
    if h.len() != 2 {
        return Err(perr(hline, format!("expected 'n_vertices n_edges', got '{header}'")));
    }
    let n: usize = h[0]
        .parse()
        .map_err(|e| perr(hline, format!("bad vertex count '{}': {e}", h[0])))?;
    let e: usize = h[1]
        .parse()
        .map_err(|e| perr(hline, format!("bad edge count '{}': {e}", h[1])))?;
    let mut edges = Vec::with_capacity(e);
    for (line, l) in lines {
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 3 {
            return Err(perr(line, format!("expected 'i j w', got '{l}'")));
        }
        let i: usize = f[0].parse().map_err(|e| perr(line, format!("bad vertex '{}': {e}", f[0])))?;
        let j: usize = f[1].parse().map_err(|e| perr(line, format!("bad vertex '{}': {e}", f[1])))?;
        let w: f64 = f[2].parse().map_err(|e| perr(line, format!("bad weight '{}': {e}", f[2])))?;
        edges.push((i, j, w));
    }
    if edges.len() != e {
        return Err(ProblemError::InvalidParameter(format!(
            "header declares {e} edges, file has {}",
            edges.len()
        )));
    }
    GraphInstance::new(n, edges)
}

pub fn load_gset(path: impl AsRef<Path>) -> Result<GraphInstance, ProblemError> {
    parse_gset(&std::fs::read_to_string(path)?)
}

pub fn write_gset(g: &GraphInstance, path: impl AsRef<Path>) -> Result<(), ProblemError> {
    let mut s = format!("{} {}\n", g.n_vertices, g.edges.len());
    for &(i, j, w) in &g.edges {
        writeln!(s, "{i} {j} {w}").expect("write to string");
    }
    std::fs::write(path, s)?;
    Ok(())
}

/// Erdos-Renyi graph with unit weights: each pair `i < j` is an edge with
/// probability `p`.
pub fn random_graph(n: usize, p: f64, seed: u64) -> GraphInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            if rng.random::<f64>() < p {
                edges.push((i, j, 1.0));
            }
        }
    }
    GraphInstance { n_vertices: n, edges }
}
