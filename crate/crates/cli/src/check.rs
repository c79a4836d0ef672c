use std::fs;

use polybundle::linalg::{extreme_eigs, norm2, SymMatrix, Which};
use polybundle::problems::load_sdpa;
use polybundle::SdpProblem;
use serde::{Deserialize, Serialize};

use crate::args::CheckArgs;
use crate::input::{is_json, load_manifest};
use crate::Failure;

/// A candidate solution. Run reports and generator manifests both parse.
#[derive(Debug, Deserialize)]
struct Solution {
    #[serde(alias = "y_star")]
    y: Vec<f64>,
    #[serde(default, alias = "x_star")]
    x: Option<Vec<(usize, usize, f64)>>,
}

#[derive(Debug, Serialize)]
struct CheckReport {
    /// `||A(X) - b|| / (1 + ||b||)`; needs `x`.
    delta1: Option<f64>,
    /// `max(-lambda_min(C - A^T y), 0)`.
    delta4: f64,
    /// `|<C, X> - b'y| / (1 + |<C, X>| + |b'y|)`; needs `x`.
    delta5: Option<f64>,
    objective_dual: f64,
    objective_primal: Option<f64>,
    eps: f64,
    pass: bool,
}

pub fn cmd_check(a: &CheckArgs) -> Result<u8, Failure> {
    let p: SdpProblem<f64> = if is_json(&a.instance) {
        let (_, inst) = load_manifest(&a.instance)?;
        load_sdpa(&inst).map_err(|e| Failure(format!("{}: {e}", inst.display())))?
    } else {
        load_sdpa(&a.instance).map_err(|e| Failure(format!("{}: {e}", a.instance.display())))?
    };
    let text = fs::read_to_string(&a.solution)
        .map_err(|e| Failure(format!("{}: {e}", a.solution.display())))?;
    let sol: Solution = serde_json::from_str(&text)
        .map_err(|e| Failure(format!("{}: {e}", a.solution.display())))?;
    if sol.y.len() != p.m() {
        return Err(Failure(format!(
            "solution has {} multipliers, instance has m = {}",
            sol.y.len(),
            p.m()
        )));
    }
    let x = sol
        .x
        .map(|t| SymMatrix::from_triplets(p.n(), t))
        .transpose()
        .map_err(|e| Failure(format!("primal matrix: {e}")))?;

    let slack = p.slack(&sol.y)?;
    let lmin = extreme_eigs(&slack, 1, Which::Smallest)?.values[0];
    let delta4 = (-lmin).max(0.0);
    let by: f64 = polybundle::linalg::dot(p.b(), &sol.y);
    let (mut delta1, mut delta5, mut primal) = (None, None, None);
    if let Some(x) = &x {
        let ax = p.op().apply(x)?;
        let resid: Vec<f64> = ax.iter().zip(p.b()).map(|(u, v)| u - v).collect();
        delta1 = Some(norm2(&resid) / (1.0 + norm2(p.b())));
        let cx = p.c().inner(x);
        delta5 = Some((cx - by).abs() / (1.0 + cx.abs() + by.abs()));
        primal = Some(cx);
    }
    let pass = [Some(delta4), delta1, delta5]
        .into_iter()
        .flatten()
        .all(|d| d <= a.eps);
    let report = CheckReport {
        delta1,
        delta4,
        delta5,
        objective_dual: by,
        objective_primal: primal,
        eps: a.eps,
        pass,
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(if pass { 0 } else { 2 })
}
