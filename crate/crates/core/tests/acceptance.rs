//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any failed. All tolerances are pinned below.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use polybundle::bundle::model_eval;
use polybundle::linalg::{
    dot, extreme_eigs, extreme_eigs_with, norm2, smat, svec, EigMethod, EigOptions, Mat,
    SvecVector, SymMatrix, Which,
};
use polybundle::problems::{
    build_maxcut_sdp, generate_random_sdp, load_gset, parse_sdpa, random_graph, write_gset,
    write_sdpa_string, MaxCutSense,
};
use polybundle::qp::{kkt_residual_qp, quad_objective, solve_subproblem, SubproblemData};
use polybundle::solver::{penalty_eval, LmaxPolicy};
use polybundle::{solve, BundleSolver, SdpProblem, SolverParams, Status};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;

use common::{enumerate_qp, gaussian, jacobi_eigenvalues, random_sym};

const CONV_EPS: f64 = 1e-4;
const CONV_MAXITER: usize = 300;
const PLANTED_REL_TOL: f64 = 1e-3;
const MODEL_TOL: f64 = 1e-8;
const MODEL_UPDATES: usize = 50;
const MODEL_SAMPLES: usize = 200;
const QP_CASES: usize = 500;
const QP_OBJ_REL_TOL: f64 = 1e-9;
const QP_KKT_TOL: f64 = 1e-10;
const XI_FAST_MAXITER: usize = 100;
const XI_SLOW_MAXITER: usize = 500;
const PRED_SEEDS: u64 = 10;
const PRED_MIN_HITS: usize = 9;
const PRED_ITER_FACTOR: f64 = 3.0;
const STARVE_MAXITER: usize = 500;
const GEN_SEEDS: u64 = 50;
const GEN_AX_TOL: f64 = 1e-10;
const GEN_C_TOL: f64 = 1e-10;
const GEN_COMPL_TOL: f64 = 1e-9;
const GEN_TRACE_TOL: f64 = 1e-12;
const GEN_RANK_REL: f64 = 1e-8;
const GEN_KAPPA_RATIO: f64 = 10.0;
const LIP_PAIRS: usize = 100;
const LIP_SLACK: f64 = 1e-8;
const MAXCUT_EPS: f64 = 1e-3;
const MAXCUT_MAXITER: usize = 500;
const INNER_REL_TOL: f64 = 1e-12;
const ADJOINT_REL_TOL: f64 = 1e-12;
const EIG_RES_TOL: f64 = 1e-9;
const EIG_ORACLE_TOL: f64 = 1e-8;
const EIG_FLIP_TOL: f64 = 1e-10;

type Outcome = Result<String, String>;

fn main() -> ExitCode {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("1 end-to-end convergence", c1_convergence),
        ("2 planted-optimum agreement", c2_planted),
        ("3 model invariants", c3_model_invariants),
        ("4 QP oracle equivalence", c4_qp_oracle),
        ("5 xi ordering", c5_xi_ordering),
        ("6 rank prediction", c6_rank_prediction),
        ("7 bundle-cap starvation", c7_starvation),
        ("8 generator contract", c8_generator),
        ("9 sampled Lipschitz bound", c9_lipschitz),
        ("10 max-cut smoke", c10_maxcut),
        ("11 unit invariants", c11_unit_invariants),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(f))
            .unwrap_or_else(|e| Err(format!("panicked: {}", panic_message(&e))));
        let secs = start.elapsed().as_secs_f64();
        match out {
            Ok(detail) => println!("criterion {name}: PASS ({secs:.1}s) {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {name}: FAIL ({secs:.1}s) {detail}");
            }
        }
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn panic_message(e: &Box<dyn std::any::Any + Send>) -> String {
    e.downcast_ref::<String>()
        .cloned()
        .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "unknown panic".into())
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + b.abs())
}

// ---------------------------------------------------------------------------
// 1, 2: convergence and planted optimum

struct PlantedRun {
    n: usize,
    status: Status,
    iterations: usize,
    max_delta: f64,
    dual_gap: f64,
    primal_gap: f64,
}

fn planted_runs() -> &'static [PlantedRun] {
    use std::sync::OnceLock;
    static RUNS: OnceLock<Vec<PlantedRun>> = OnceLock::new();
    RUNS.get_or_init(|| {
        [100usize, 200, 300]
            .iter()
            .map(|&n| {
                let (p, planted) = generate_random_sdp::<f64>(n, n, 5, 1e-2, 1.0, 1).unwrap();
                let params = SolverParams {
                    eps: CONV_EPS,
                    maxiter: CONV_MAXITER,
                    ..SolverParams::default()
                };
                let res = solve(&p, params).unwrap();
                let by_star = dot(p.b(), &planted.y_star);
                let cx_star = p.c().inner(&planted.x_star);
                PlantedRun {
                    n,
                    status: res.status,
                    iterations: res.iterations,
                    max_delta: res.deltas.max(),
                    dual_gap: rel(res.objective_dual, by_star),
                    primal_gap: rel(res.objective_primal, cx_star),
                }
            })
            .collect()
    })
}

fn c1_convergence() -> Outcome {
    let mut detail = Vec::new();
    for r in planted_runs() {
        detail.push(format!("n={} {:?} in {} (max delta {:.1e})", r.n, r.status, r.iterations, r.max_delta));
        check(
            r.status == Status::Converged && r.iterations <= CONV_MAXITER && r.max_delta <= CONV_EPS,
            || detail.join("; "),
        )?;
    }
    Ok(detail.join("; "))
}

fn c2_planted() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for r in planted_runs().iter().filter(|r| r.status == Status::Converged) {
        detail.push(format!("n={} b'y {:.1e}, a'u {:.1e}", r.n, r.dual_gap, r.primal_gap));
        ok &= r.dual_gap <= PLANTED_REL_TOL && r.primal_gap <= PLANTED_REL_TOL;
    }
    check(!detail.is_empty(), || "no converged run to compare".into())?;
    check(ok, || detail.join("; "))?;
    Ok(detail.join("; "))
}

// ---------------------------------------------------------------------------
// 3: minorant and subgradient conditions after each model update

fn c3_model_invariants() -> Outcome {
    let (p, _) = generate_random_sdp::<f64>(50, 50, 3, 5e-2, 1.0, 3).unwrap();
    let params = SolverParams {
        maxiter: MODEL_UPDATES,
        eps: 1e-300,
        ..SolverParams::default()
    };
    let mut solver = BundleSolver::new(&p, params).unwrap();
    let rho = solver.rho();
    let b = p.b().to_vec();
    let m = p.m();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let (mut worst1, mut worst2, mut worst3) = (f64::MIN, f64::MIN, f64::MIN);
    let mut updates = 0;
    while updates < MODEL_UPDATES {
        let stopped = solver.step().map_err(|e| e.to_string())?;
        let Some(up) = solver.last_update().cloned() else {
            break;
        };
        if solver.trace().len() == updates {
            break;
        }
        updates += 1;
        let model = solver.bundle();
        let (a_new, b_new) = (model.model_a(), model.model_b());

        // Subgradient of F at z.
        let mut g: Vec<f64> = b.iter().map(|v| -v).collect();
        if up.lambda_max_z > 0.0 {
            let vv = polybundle::bundle::svec_outer(&up.v_top);
            let av = p.op().apply_svec(&vv).unwrap();
            for (gi, ai) in g.iter_mut().zip(av) {
                *gi += rho * ai;
            }
        }
        let s: Vec<f64> = up.y_prev.iter().zip(&up.z).map(|(a, c)| (a - c) / up.t).collect();

        for j in 0..MODEL_SAMPLES {
            let scale = [1e-3, 1e-1, 1.0, 10.0][j % 4];
            let y: Vec<f64> = (0..m).map(|i| up.z[i] + scale * gaussian(&mut rng)).collect();
            let f = penalty_eval(&p, &y, 1, rho).unwrap().f;
            let fm = model_eval(&y, &a_new, &b_new, rho, &b);
            let dy: Vec<f64> = y.iter().zip(&up.z).map(|(a, c)| a - c).collect();
            worst1 = worst1.max(fm - f);
            worst2 = worst2.max(up.f_z + dot(&g, &dy) - fm);
            worst3 = worst3.max(up.model_z + dot(&s, &dy) - fm);
        }
        if stopped.is_some() {
            break;
        }
    }
    let detail = format!(
        "{updates} updates x {MODEL_SAMPLES} points; worst violations: minorant {worst1:.2e}, \
         subgradient {worst2:.2e}, model subgradient {worst3:.2e}"
    );
    check(updates == MODEL_UPDATES, || format!("only {updates} updates; {detail}"))?;
    check(
        worst1 <= MODEL_TOL && worst2 <= MODEL_TOL && worst3 <= MODEL_TOL,
        || detail.clone(),
    )?;
    Ok(detail)
}

// ---------------------------------------------------------------------------
// 4: active-set QP against exhaustive enumeration

fn c4_qp_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let (mut worst_obj, mut worst_kkt) = (0.0f64, 0.0f64);
    for case in 0..QP_CASES {
        let cols = rng.random_range(1..=8usize);
        let m = rng.random_range(cols..=cols + 6);
        let bmat = Mat::from_fn(m, cols, |_, _| gaussian(&mut rng));
        let a: Vec<f64> = (0..cols).map(|_| gaussian(&mut rng)).collect();
        let y: Vec<f64> = (0..m).map(|_| gaussian(&mut rng)).collect();
        let b: Vec<f64> = (0..m).map(|_| gaussian(&mut rng)).collect();
        let t = 10f64.powf(rng.random_range(-3.0..0.0));
        let rho = 10f64.powf(rng.random_range(-1.0..1.5));
        let d = SubproblemData {
            bmat: &bmat,
            a: &a,
            y: &y,
            b: &b,
            t,
            xi: 1e-8,
            rho,
        };
        let sol = solve_subproblem(&d).map_err(|e| format!("case {case}: {e}"))?;
        let (h, q) = (d.hessian(), d.linear());
        let (_, oracle) = enumerate_qp(&h, &q, rho);
        let obj = quad_objective(&h, &q, &sol.u);
        let qinf = q.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let e_obj = (obj - oracle).abs() / (1.0 + oracle.abs());
        let e_kkt = kkt_residual_qp(&h, &q, rho, &sol.u) / (1.0 + qinf);
        worst_obj = worst_obj.max(e_obj);
        worst_kkt = worst_kkt.max(e_kkt);
    }
    let detail = format!(
        "{QP_CASES} cases; worst objective error {worst_obj:.2e}, worst scaled KKT residual {worst_kkt:.2e}"
    );
    check(worst_obj <= QP_OBJ_REL_TOL && worst_kkt <= QP_KKT_TOL, || detail.clone())?;
    Ok(detail)
}

// ---------------------------------------------------------------------------
// 5: xi ordering on a tiny instance

fn c5_xi_ordering() -> Outcome {
    let (p, _) = generate_random_sdp::<f64>(3, 3, 2, 1.0, 1.0, 0).unwrap();
    let run = |xi: f64, maxiter: usize| {
        let params = SolverParams {
            xi,
            maxiter,
            ..SolverParams::default()
        };
        solve(&p, params).unwrap()
    };
    let r10 = run(1e-10, XI_FAST_MAXITER);
    let r8 = run(1e-8, XI_FAST_MAXITER);
    let r4 = run(1e-4, XI_SLOW_MAXITER);
    let detail = format!(
        "xi=1e-10: {:?}/{}, xi=1e-8: {:?}/{}, xi=1e-4: {:?}/{}",
        r10.status, r10.iterations, r8.status, r8.iterations, r4.status, r4.iterations
    );
    let fast_ok = r10.status == Status::Converged && r8.status == Status::Converged;
    let slow_ok = r4.status != Status::Converged || r4.iterations > r8.iterations.max(r10.iterations);
    check(fast_ok && slow_ok, || detail.clone())?;
    Ok(detail)
}

// ---------------------------------------------------------------------------
// 6: rank prediction

fn c6_rank_prediction() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for prior in [10usize, 15] {
        let mut hits = 0;
        let (mut pred_iters, mut known_iters) = (0usize, 0usize);
        let mut found = Vec::new();
        for seed in 0..PRED_SEEDS {
            let (p, _) = generate_random_sdp::<f64>(100, 100, 5, 1e-2, 1.0, seed).unwrap();
            let known = solve(&p, SolverParams::default()).unwrap();
            let params = SolverParams {
                prior_rank: Some(prior),
                ..SolverParams::default()
            };
            let pred = solve(&p, params).unwrap();
            known_iters += known.iterations;
            pred_iters += pred.iterations;
            hits += usize::from(pred.predicted_rank == Some(5));
            found.push(pred.predicted_rank.map_or("-".to_string(), |r| r.to_string()));
        }
        let ratio = pred_iters as f64 / known_iters as f64;
        ok &= hits >= PRED_MIN_HITS && ratio <= PRED_ITER_FACTOR;
        detail.push(format!(
            "prior {prior}: {hits}/{PRED_SEEDS} at rank 5 [{}], iterations {pred_iters} vs {known_iters} known ({ratio:.2}x)",
            found.join(",")
        ));
    }
    check(ok, || detail.join("; "))?;
    Ok(detail.join("; "))
}

// ---------------------------------------------------------------------------
// 7: bundle-cap starvation

fn c7_starvation() -> Outcome {
    let (p, _) = generate_random_sdp::<f64>(100, 100, 5, 1e-2, 1.0, 0).unwrap();
    let run = |policy: LmaxPolicy| {
        let params = SolverParams {
            l_max: policy,
            maxiter: STARVE_MAXITER,
            ..SolverParams::default()
        };
        solve(&p, params).unwrap()
    };
    let small = run(LmaxPolicy::HalfMinus);
    let half = run(LmaxPolicy::Half);
    let detail = format!(
        "half-minus: {:?}/{}, half: {:?}/{}",
        small.status, small.iterations, half.status, half.iterations
    );
    check(
        small.status != Status::Converged && half.status == Status::Converged,
        || detail.clone(),
    )?;
    Ok(detail)
}

// ---------------------------------------------------------------------------
// 8: generator contract

fn numeric_rank(values: &[f64]) -> usize {
    let top = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    values.iter().filter(|v| v.abs() > GEN_RANK_REL * top).count()
}

fn c8_generator() -> Outcome {
    let (n, m, r) = (40usize, 40usize, 4usize);
    let mut worst = [0.0f64; 4];
    let mut min_ratio = f64::INFINITY;
    for seed in 0..GEN_SEEDS {
        let (p, pl) = generate_random_sdp::<f64>(n, m, r, 5e-2, 1.0, seed).unwrap();
        let ax = p.op().apply(&pl.x_star).unwrap();
        let bnorm = p.b().iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let e_ax = ax.iter().zip(p.b()).fold(0.0f64, |a, (x, y)| a.max((x - y).abs())) / (1.0 + bnorm);
        let recon = pl.s_star.axpby(1.0, &p.op().adjoint(&pl.y_star).unwrap(), 1.0);
        let cdense = p.c().to_dense();
        let e_c = recon.to_dense().as_slice().iter().zip(cdense.as_slice())
            .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()))
            / (1.0 + cdense.max_abs());
        let e_compl = pl.x_star.inner(&pl.s_star).abs();
        let e_tr = (0..m).fold(0.0f64, |a, i| a.max(p.constraint(i).trace().abs()));
        worst = [worst[0].max(e_ax), worst[1].max(e_c), worst[2].max(e_compl), worst[3].max(e_tr)];

        let ex = polybundle::linalg::sym_eigenvalues(&pl.x_star.to_dense()).unwrap();
        let es = polybundle::linalg::sym_eigenvalues(&pl.s_star.to_dense()).unwrap();
        let (rx, rs) = (numeric_rank(&ex), numeric_rank(&es));
        check(rx + rs == n && rx == r, || {
            format!("seed {seed}: rank X* = {rx}, rank S* = {rs}, n = {n}")
        })?;

        let (_, pl50) = generate_random_sdp::<f64>(n, m, r, 5e-2, 50.0, seed).unwrap();
        min_ratio = min_ratio.min(pl50.kappa_s / pl.kappa_s);
    }
    let detail = format!(
        "{GEN_SEEDS} seeds; worst A(X*)-b {:.1e}, C-S*-A'y* {:.1e}, <X*,S*> {:.1e}, tr(A_i) {:.1e}; \
         min kappa(S*) ratio s=50/s=1 {min_ratio:.1}",
        worst[0], worst[1], worst[2], worst[3]
    );
    check(
        worst[0] <= GEN_AX_TOL
            && worst[1] <= GEN_C_TOL
            && worst[2] <= GEN_COMPL_TOL
            && worst[3] <= GEN_TRACE_TOL
            && min_ratio >= GEN_KAPPA_RATIO,
        || detail.clone(),
    )?;
    Ok(detail)
}

// ---------------------------------------------------------------------------
// 9: Lipschitz bound of the penalty

fn c9_lipschitz() -> Outcome {
    let (p, _) = generate_random_sdp::<f64>(50, 50, 3, 5e-2, 1.0, 9).unwrap();
    let rho = 2.0 * p.known_trace.unwrap() + 1.0;
    let op_norm = p.op().op_norm_estimate(1000, 1e-13);
    let lip = norm2(p.b()) + rho * op_norm;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst = f64::MIN;
    for k in 0..LIP_PAIRS {
        let scale = [1e-3, 1e-1, 1.0, 10.0][k % 4];
        let x: Vec<f64> = (0..p.m()).map(|_| gaussian(&mut rng)).collect();
        let y: Vec<f64> = x.iter().map(|v| v + scale * gaussian(&mut rng)).collect();
        let fx = penalty_eval(&p, &x, 1, rho).unwrap().f;
        let fy = penalty_eval(&p, &y, 1, rho).unwrap().f;
        let dist = norm2(&x.iter().zip(&y).map(|(a, b)| a - b).collect::<Vec<_>>());
        worst = worst.max((fx - fy).abs() - lip * dist);
    }
    let detail = format!("{LIP_PAIRS} pairs, L = {lip:.3e}; worst |F(x)-F(y)| - L|x-y| = {worst:.3e}");
    check(worst <= LIP_SLACK, || detail.clone())?;
    Ok(detail)
}

// ---------------------------------------------------------------------------
// 10: Max-Cut from a Gset file

fn c10_maxcut() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("g100.txt");
    write_gset(&random_graph(100, 0.1, 2024), &path).map_err(|e| e.to_string())?;
    let g = load_gset(&path).map_err(|e| e.to_string())?;
    let p = build_maxcut_sdp::<f64>(&g, MaxCutSense::Maximize).map_err(|e| e.to_string())?;
    // Barvinok-Pataki bound on the rank of an optimal X.
    let rank = (((8 * p.m() + 1) as f64).sqrt() as usize - 1) / 2;
    let params = SolverParams {
        l_max: LmaxPolicy::Sq,
        t0: 1e-2,
        eps: MAXCUT_EPS,
        maxiter: MAXCUT_MAXITER,
        rank: Some(rank),
        ..SolverParams::default()
    };
    let res = solve(&p, params).map_err(|e| e.to_string())?;
    let detail = format!(
        "{} edges, rank {rank}: {:?} in {} iterations, max delta {:.1e}, cut bound {:.3}",
        g.edges.len(),
        res.status,
        res.iterations,
        res.deltas.max(),
        -res.objective_dual
    );
    check(res.status == Status::Converged, || detail.clone())?;
    Ok(detail)
}

// ---------------------------------------------------------------------------
// 11: linear algebra and I/O invariants

fn c11_unit_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1111);
    let mut failures = Vec::new();
    let mut notes = Vec::new();

    // svec / smat are exact inverses.
    let (mut bad_fwd, mut bad_back) = (0, 0);
    let trials = 1000;
    for _ in 0..trials {
        let a = random_sym(5, 1.0, &mut rng);
        if smat(&svec(&a)) != a {
            bad_fwd += 1;
        }
        let v = SvecVector::from_values((0..15).map(|_| gaussian(&mut rng)).collect()).unwrap();
        if svec(&smat(&v)) != v {
            bad_back += 1;
        }
    }
    notes.push(format!("svec roundtrip mismatches {bad_fwd}/{trials} and {bad_back}/{trials}"));
    if bad_fwd + bad_back > 0 {
        failures.push("svec/smat roundtrip not bit-exact".to_string());
    }

    // <A, B> through svec against a dense double loop.
    let mut worst_inner = 0.0f64;
    for _ in 0..100 {
        let (a, b) = (random_sym(4, 1.0, &mut rng), random_sym(4, 1.0, &mut rng));
        let (da, db) = (a.to_dense(), b.to_dense());
        let direct: f64 = da.as_slice().iter().zip(db.as_slice()).map(|(x, y)| x * y).sum();
        let scale = da.as_slice().iter().zip(db.as_slice()).map(|(x, y)| (x * y).abs()).sum::<f64>();
        worst_inner = worst_inner.max((svec(&a).dot(&svec(&b)) - direct).abs() / scale.max(1e-300));
    }
    notes.push(format!("inner {worst_inner:.1e}"));
    if worst_inner > INNER_REL_TOL {
        failures.push(format!("svec inner product error {worst_inner:.2e}"));
    }

    // Adjoint identity on n = 6, m = 4.
    let mats: Vec<SymMatrix<f64>> = (0..4).map(|_| random_sym(6, 0.5, &mut rng)).collect();
    let p = SdpProblem::new(SymMatrix::identity(6), &mats, vec![1.0; 4]).unwrap();
    let mut worst_adj = 0.0f64;
    for _ in 0..100 {
        let x = random_sym(6, 0.7, &mut rng);
        let y: Vec<f64> = (0..4).map(|_| gaussian(&mut rng)).collect();
        let lhs = dot(&p.op().apply(&x).unwrap(), &y);
        let rhs = x.inner(&p.op().adjoint(&y).unwrap());
        worst_adj = worst_adj.max((lhs - rhs).abs() / (1.0 + lhs.abs()));
    }
    notes.push(format!("adjoint {worst_adj:.1e}"));
    if worst_adj > ADJOINT_REL_TOL {
        failures.push(format!("adjoint identity error {worst_adj:.2e}"));
    }

    // Extreme eigenpairs, dense and Lanczos, against Jacobi.
    let (mut worst_res, mut worst_val, mut worst_flip) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..5 {
        let s = random_sym(50, 0.1, &mut rng);
        let oracle = jacobi_eigenvalues(&s.to_dense());
        for method in [EigMethod::Dense, EigMethod::Lanczos] {
            let opts = EigOptions {
                method,
                ..EigOptions::default()
            };
            for which in [Which::Smallest, Which::Largest] {
                let e = extreme_eigs_with(&s, 3, which, &opts).map_err(|e| e.to_string())?;
                worst_res = worst_res.max(e.max_rel_residual(&s));
                for (k, &lam) in e.values.iter().enumerate() {
                    let want = match which {
                        Which::Smallest => oracle[k],
                        Which::Largest => oracle[oracle.len() - 1 - k],
                    };
                    worst_val = worst_val.max((lam - want).abs());
                }
            }
        }
        let top = extreme_eigs(&s, 1, Which::Largest).map_err(|e| e.to_string())?;
        let bottom = extreme_eigs(&s.neg(), 1, Which::Smallest).map_err(|e| e.to_string())?;
        worst_flip = worst_flip.max((top.values[0] + bottom.values[0]).abs());
    }
    notes.push(format!("eig residual {worst_res:.1e}, vs Jacobi {worst_val:.1e}, flip {worst_flip:.1e}"));
    if worst_res > EIG_RES_TOL || worst_val > EIG_ORACLE_TOL || worst_flip > EIG_FLIP_TOL {
        failures.push("eigensolver tolerance exceeded".to_string());
    }

    // SDPA write/parse/write is bit-for-bit.
    let (p, _) = generate_random_sdp::<f64>(20, 20, 3, 0.1, 1.0, 5).unwrap();
    let text = write_sdpa_string(&p);
    let back = parse_sdpa::<f64>(&text).map_err(|e| e.to_string())?;
    let same = write_sdpa_string(&back) == text
        && back.c() == p.c()
        && back.b() == p.b()
        && (0..p.m()).all(|i| back.constraint(i) == p.constraint(i));
    notes.push(format!("sdpa roundtrip {}", if same { "exact" } else { "differs" }));
    if !same {
        failures.push("SDPA roundtrip not bit-for-bit".to_string());
    }

    let detail = notes.join("; ");
    check(failures.is_empty(), || format!("{}; {detail}", failures.join(", ")))?;
    Ok(detail)
}
