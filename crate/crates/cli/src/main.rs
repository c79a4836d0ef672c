//! `polybundle`: solve SDPs with the polyhedral bundle method, generate
//! planted instances, run Max-Cut relaxations and check solutions.

mod args;
mod check;
mod input;
mod report;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use polybundle::problems::{
    build_maxcut_sdp, generate_random_sdp, load_gset, random_graph, write_sdpa, GeneratorManifest,
};
use polybundle::{solve, Scalar, SdpProblem, Status};

use args::{Cli, Command, GenerateArgs, MaxcutArgs, Precision, Preset, SolveArgs, SolveOptions};
use report::{write_trace, RunReport};

/// Errors reported with exit code 1.
#[derive(Debug)]
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Self(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Solve(a) => cmd_solve(&a),
        Command::Generate(a) => cmd_generate(&a),
        Command::Maxcut(a) => cmd_maxcut(&a),
        Command::Check(a) => check::cmd_check(&a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn exit_code(status: Status) -> u8 {
    match status {
        Status::Converged => 0,
        Status::IterLimit | Status::TimeLimit => 2,
        Status::SubproblemFailure => 3,
    }
}

fn cmd_solve(a: &SolveArgs) -> Result<u8, Failure> {
    match a.opts.precision {
        Precision::F64 => {
            let p = input::load_instance::<f64>(&a.input)?;
            run(&p, &a.opts, Some(&a.input))
        }
        Precision::F32 => {
            let p = input::load_instance::<f32>(&a.input)?;
            run(&p, &a.opts, Some(&a.input))
        }
    }
}

fn cmd_maxcut(a: &MaxcutArgs) -> Result<u8, Failure> {
    let g = match (&a.input, a.random) {
        (Some(path), None) => load_gset(path)?,
        (None, Some(n)) => random_graph(n, a.density, a.seed),
        _ => return Err(Failure("give either a Gset file or --random N".into())),
    };
    let mut opts = a.opts.clone();
    opts.preset.get_or_insert(Preset::Maxcut);
    let p = &opts.params;
    if p.rank.is_none() && p.prior_rank.is_none() && !p.predict_rank {
        // Barvinok-Pataki: some optimal X has r(r+1)/2 <= n.
        let n = g.n_vertices;
        opts.params.rank = Some(((((8 * n + 1) as f64).sqrt() as usize - 1) / 2).clamp(1, n));
    }
    match opts.precision {
        Precision::F64 => run(&build_maxcut_sdp::<f64>(&g, a.sense)?, &opts, a.input.as_deref()),
        Precision::F32 => run(&build_maxcut_sdp::<f32>(&g, a.sense)?, &opts, a.input.as_deref()),
    }
}

fn run<T: Scalar>(p: &SdpProblem<T>, opts: &SolveOptions, path: Option<&Path>) -> Result<u8, Failure> {
    let base = opts.preset.unwrap_or(Preset::Low).params();
    let params = opts.params.to_params(base, p.n())?;
    let res = solve(p, params.clone())?;
    if let Some(trace) = &opts.trace {
        write_trace(trace, opts.trace_format, &res.trace)?;
    }
    let report = RunReport::new(p, path, opts.precision, &params, &res);
    let json = serde_json::to_string_pretty(&report)?;
    match &opts.out {
        Some(out) => fs::write(out, json + "\n")?,
        None => writeln!(std::io::stdout(), "{json}")?,
    }
    if let Some(msg) = &res.failure {
        eprintln!("subproblem failure: {msg}");
    }
    Ok(exit_code(res.status))
}

fn cmd_generate(a: &GenerateArgs) -> Result<u8, Failure> {
    let (p, planted) = generate_random_sdp::<f64>(a.n, a.m, a.rank, a.sparsity, a.s, a.seed)?;
    fs::create_dir_all(&a.out)?;
    let name = a.name.clone().unwrap_or_else(|| p.name.clone());
    let inst: PathBuf = a.out.join(format!("{name}.dat-s"));
    let manifest_path = a.out.join(format!("{name}.json"));
    write_sdpa(&p, &inst)?;
    let mut mf = GeneratorManifest::new(&p, &planted, a.rank, a.sparsity, a.s, a.seed);
    mf.instance = Some(format!("{name}.dat-s"));
    fs::write(&manifest_path, serde_json::to_string_pretty(&mf)? + "\n")?;
    println!("{}", inst.display());
    println!("{}", manifest_path.display());
    Ok(0)
}
