use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use polybundle::solver::{Deltas, IterationRecord};
use polybundle::{Scalar, SdpProblem, SolveResult, SolverParams, Status};
use serde::Serialize;

use crate::args::{Precision, TraceFormat};

#[derive(Debug, Serialize)]
pub struct InstanceInfo {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    pub n: usize,
    pub m: usize,
    pub known_trace: Option<f64>,
    pub known_rank: Option<usize>,
    pub precision: Precision,
}

/// Summary of one solve; with the instance file it is enough to rerun it.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub status: Status,
    pub iterations: usize,
    pub wall_secs: f64,
    pub deltas: Deltas<f64>,
    pub objective_primal: f64,
    pub objective_dual: f64,
    pub rho: f64,
    pub rank: usize,
    pub predicted_rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    pub params: SolverParams,
    pub instance: InstanceInfo,
    pub y: Vec<f64>,
    /// Lower triangle of the primal X, when it was built.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<(usize, usize, f64)>>,
}

impl RunReport {
    pub fn new<T: Scalar>(
        p: &SdpProblem<T>,
        path: Option<&Path>,
        precision: Precision,
        params: &SolverParams,
        res: &SolveResult<T>,
    ) -> Self {
        Self {
            status: res.status,
            iterations: res.iterations,
            wall_secs: res.wall_secs,
            deltas: res.deltas.to_f64(),
            objective_primal: res.objective_primal.as_f64(),
            objective_dual: res.objective_dual.as_f64(),
            rho: res.rho.as_f64(),
            rank: res.rank,
            predicted_rank: res.predicted_rank,
            failure: res.failure.clone(),
            params: params.clone(),
            instance: InstanceInfo {
                name: p.name.clone(),
                path: path.map(Path::to_path_buf),
                n: p.n(),
                m: p.m(),
                known_trace: p.known_trace.map(Scalar::as_f64),
                known_rank: p.known_rank,
                precision,
            },
            y: res.y.iter().map(|v| v.as_f64()).collect(),
            x: res.x.as_ref().map(|x| {
                x.entries()
                    .iter()
                    .map(|&(r, c, v)| (r, c, v.as_f64()))
                    .collect()
            }),
        }
    }
}

pub fn write_trace(
    path: &Path,
    format: TraceFormat,
    rows: &[IterationRecord],
) -> Result<(), crate::Failure> {
    let file = File::create(path).map_err(|e| crate::Failure(format!("{}: {e}", path.display())))?;
    match format {
        TraceFormat::Jsonl => {
            let mut w = BufWriter::new(file);
            for r in rows {
                serde_json::to_writer(&mut w, r)?;
                w.write_all(b"\n")?;
            }
            w.flush()?;
        }
        TraceFormat::Csv => {
            let mut w = csv::Writer::from_writer(file);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}
