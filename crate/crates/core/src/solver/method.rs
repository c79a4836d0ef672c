use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bundle::{
    aggregate_and_append, model_eval, pvec_generate, select_aggregation, BundleState,
    BundleWeights, PvecData,
};
use crate::linalg::{dot, smat, Mat, SymMatrix};
use crate::problems::SdpProblem;
use crate::qp::{solve_subproblem_warm, SubproblemData};
use crate::solver::penalty::{
    descent_decision, penalty_eval, termination_check, Deltas, PenaltyEval, StepRule,
};
use crate::solver::rank::{rank_predict_step, Prediction, RankPredictor};
use crate::solver::{SolverError, SolverParams};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Converged,
    IterLimit,
    TimeLimit,
    SubproblemFailure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepType {
    Descent,
    Null,
}

/// One row of the iteration trace. `f_y`, `t` and `l` refer to the state
/// before the descent decision of iteration `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub step_type: StepType,
    pub f_y: f64,
    pub f_z: f64,
    pub model_value: f64,
    pub delta_pred: f64,
    pub delta_true: f64,
    pub t: f64,
    pub l: usize,
    pub rank: usize,
    pub delta1: f64,
    pub delta4: f64,
    pub delta5: f64,
    pub delta6: f64,
    pub eig_min_s: f64,
    pub elapsed_secs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult<T> {
    pub status: Status,
    pub iterations: usize,
    pub y: Vec<T>,
    /// `S = C - A^T y`.
    pub s: SymMatrix<T>,
    /// Subproblem weights `[eta; x]` of the last iteration.
    pub u: Vec<T>,
    /// `b'y`.
    pub objective_dual: T,
    /// `a'u`.
    pub objective_primal: T,
    /// `eta W + P diag(x) P'` when the aggregate is materialized.
    pub x: Option<SymMatrix<T>>,
    pub deltas: Deltas<T>,
    pub rho: T,
    /// Rank in use at the end (the predicted one if prediction ran).
    pub rank: usize,
    pub predicted_rank: Option<usize>,
    pub failure: Option<String>,
    pub wall_secs: f64,
    pub trace: Vec<IterationRecord>,
}

/// Snapshot of the most recent model update, for invariant checks.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateInfo<T> {
    pub y_prev: Vec<T>,
    pub z: Vec<T>,
    pub t: T,
    pub u: Vec<T>,
    /// `F_k(z)` under the model before the update.
    pub model_z: T,
    pub f_z: T,
    pub lambda_max_z: T,
    /// Leading eigenvector of `A^T z - C`.
    pub v_top: Vec<T>,
}

/// Last evaluated candidate together with the block it contributed.
#[derive(Debug, Clone)]
struct Candidate<T> {
    z: Vec<T>,
    eval: PenaltyEval<T>,
    v: Mat<T>,
    block: PvecData<T>,
}

/// `X = eta W + P diag(x) P'` for weights `u = [eta; x]`.
pub fn recover_primal<T: Scalar>(
    bundle: &BundleState<T>,
    u: &[T],
) -> Result<SymMatrix<T>, SolverError> {
    if u.len() != bundle.l() + 1 {
        return Err(SolverError::WeightLength {
            expected: bundle.l() + 1,
            found: u.len(),
        });
    }
    bundle
        .combine_svec(u)
        .map(|v| smat(&v))
        .ok_or(SolverError::NotMaterialized)
}

/// The polyhedral bundle method as a steppable state machine.
#[derive(Debug, Clone)]
pub struct BundleSolver<'p, T: Scalar> {
    problem: &'p SdpProblem<T>,
    params: SolverParams,
    rule: StepRule<T>,
    rho: T,
    y: Vec<T>,
    f_y: T,
    lambda_max_y: T,
    t: T,
    nullcount: usize,
    k: usize,
    rank: usize,
    l_max: usize,
    bundle: BundleState<T>,
    warm: Option<Vec<bool>>,
    candidate: Candidate<T>,
    predictor: Option<RankPredictor>,
    predicted_rank: Option<usize>,
    last_update: Option<UpdateInfo<T>>,
    last_u: Vec<T>,
    last_au: T,
    carried: Vec<T>,
    deltas: Deltas<T>,
    trace: Vec<IterationRecord>,
    started: Instant,
    status: Option<Status>,
    failure: Option<String>,
}

impl<'p, T: Scalar> BundleSolver<'p, T> {
    /// Starts from `y = 0`.
    pub fn new(problem: &'p SdpProblem<T>, params: SolverParams) -> Result<Self, SolverError> {
        Self::with_start(problem, params, vec![T::zero(); problem.m()])
    }

    pub fn with_start(
        problem: &'p SdpProblem<T>,
        params: SolverParams,
        y0: Vec<T>,
    ) -> Result<Self, SolverError> {
        params.validate()?;
        let started = Instant::now();
        let n = problem.n();
        if y0.len() != problem.m() {
            return Err(SolverError::StartLength {
                expected: problem.m(),
                found: y0.len(),
            });
        }
        let rho = match (params.rho, problem.known_trace) {
            (Some(r), _) => T::lit(r),
            (None, Some(tr)) => T::lit(2.0) * tr + T::one(),
            (None, None) => return Err(SolverError::MissingRho),
        };
        let predictor = params
            .prior_rank
            .map(|p| RankPredictor::new(p, params.predcountmax));
        let rank = match (params.prior_rank, params.rank, problem.known_rank) {
            (Some(p), _, _) => p,
            (None, Some(r), _) | (None, None, Some(r)) => r,
            (None, None, None) => return Err(SolverError::MissingRank),
        };
        if rank > n {
            return Err(SolverError::RankTooLarge { rank, n });
        }
        let l_max = params.l_max.resolve(rank);
        let rule = StepRule {
            beta1: T::lit(params.beta1),
            beta2: T::lit(params.beta2),
            beta3: T::lit(params.beta3),
            t_min: T::lit(params.t_min),
            t_max: T::lit(params.t_max),
            nullmax: params.nullmax,
        };

        let n_eigs = eig_count(rank, predictor.is_some(), n);
        let eval = penalty_eval(problem, &y0, n_eigs, rho)?;
        let v = leading_cols(&eval.vectors, rank);
        let block = pvec_generate(&v, problem.op(), problem.cvec())?;
        let bundle = BundleState::seeded(&v, &block, problem.m(), params.materialize_w);

        Ok(Self {
            problem,
            rule,
            rho,
            f_y: eval.f,
            lambda_max_y: eval.lambda_max,
            t: T::lit(params.t0),
            nullcount: 0,
            k: 0,
            rank,
            l_max,
            bundle,
            warm: None,
            candidate: Candidate {
                z: y0.clone(),
                eval,
                v,
                block,
            },
            y: y0,
            predictor,
            predicted_rank: None,
            last_update: None,
            last_u: Vec::new(),
            last_au: T::zero(),
            carried: Vec::new(),
            deltas: Deltas {
                d1: T::infinity(),
                d4: T::infinity(),
                d5: T::infinity(),
                d6: T::infinity(),
            },
            trace: Vec::new(),
            started,
            status: None,
            failure: None,
            params,
        })
    }

    pub fn y(&self) -> &[T] {
        &self.y
    }

    pub fn f_y(&self) -> T {
        self.f_y
    }

    pub fn t(&self) -> T {
        self.t
    }

    pub fn rho(&self) -> T {
        self.rho
    }

    pub fn iteration(&self) -> usize {
        self.k
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn bundle(&self) -> &BundleState<T> {
        &self.bundle
    }

    pub fn predicting(&self) -> bool {
        self.predictor.is_some()
    }

    pub fn predicted_rank(&self) -> Option<usize> {
        self.predicted_rank
    }

    pub fn last_update(&self) -> Option<&UpdateInfo<T>> {
        self.last_update.as_ref()
    }

    /// Weights of the last subproblem re-expressed in the current bundle.
    pub fn carried_weights(&self) -> &[T] {
        &self.carried
    }

    pub fn deltas(&self) -> &Deltas<T> {
        &self.deltas
    }

    pub fn trace(&self) -> &[IterationRecord] {
        &self.trace
    }

    pub fn status(&self) -> Option<Status> {
        self.status
    }

    fn finish_with(&mut self, status: Status) -> Option<Status> {
        self.status = Some(status);
        self.status
    }

    fn finalize_prediction(&mut self, r: usize) -> Result<(), SolverError> {
        self.t = (T::lit(0.5) * self.t).max(self.rule.t_min);
        self.y = self.candidate.z.clone();
        self.f_y = self.candidate.eval.f;
        self.lambda_max_y = self.candidate.eval.lambda_max;
        self.bundle = BundleState::seeded(
            &self.candidate.v,
            &self.candidate.block,
            self.problem.m(),
            self.params.materialize_w,
        );
        self.rank = r;
        self.l_max = self.params.l_max.resolve(r);
        self.predicted_rank = Some(r);
        self.predictor = None;
        self.warm = None;
        Ok(())
    }

    /// Runs one iteration. Returns the final status once the run has
    /// stopped; further calls are no-ops.
    pub fn step(&mut self) -> Result<Option<Status>, SolverError> {
        if self.status.is_some() {
            return Ok(self.status);
        }
        if self.k >= self.params.maxiter {
            return Ok(self.finish_with(Status::IterLimit));
        }
        if let Some(limit) = self.params.time_limit_secs {
            if self.started.elapsed().as_secs_f64() >= limit {
                return Ok(self.finish_with(Status::TimeLimit));
            }
        }
        self.k += 1;

        if let Some(pred) = self.predictor.as_mut() {
            let out = rank_predict_step(self.bundle.p(), &self.candidate.eval.values, pred)?;
            if let Prediction::Finalize(r) = out {
                self.finalize_prediction(r)?;
            }
        }

        let problem = self.problem;
        let a = self.bundle.model_a();
        let bmat = self.bundle.model_b();
        let d = SubproblemData {
            bmat: &bmat,
            a: &a,
            y: &self.y,
            b: problem.b(),
            t: self.t,
            xi: T::lit(self.params.xi),
            rho: self.rho,
        };
        let sol = match solve_subproblem_warm(&d, self.warm.as_deref()) {
            Ok(s) => s,
            Err(e) => {
                self.failure = Some(format!("iteration {}: {e}", self.k));
                return Ok(self.finish_with(Status::SubproblemFailure));
            }
        };

        let z = sol.z;
        let n_eigs = eig_count(self.rank, self.predictor.is_some(), problem.n());
        let eval_z = penalty_eval(problem, &z, n_eigs, self.rho)?;
        let model_z = model_eval(&z, &a, &bmat, self.rho, problem.b());
        let v_new = leading_cols(&eval_z.vectors, self.rank);
        let block = pvec_generate(&v_new, problem.op(), problem.cvec())?;

        let weights = BundleWeights::from_u(&sol.u);
        let sets = select_aggregation(
            &weights.x,
            self.rank,
            self.l_max,
            T::lit(self.params.gamma1),
            T::lit(self.params.gamma2),
        );
        let bundle = std::mem::replace(&mut self.bundle, BundleState::empty(0, 0, false));
        let update = aggregate_and_append(bundle, &weights, &v_new, &block, &sets, self.l_max)?;
        self.bundle = update.state;
        self.warm = Some(update.carried.iter().map(|&v| v > T::zero()).collect());
        self.carried = update.carried;

        let t_used = self.t;
        let f_y_prev = self.f_y;
        let dec = descent_decision(self.f_y, eval_z.f, model_z, self.t, self.nullcount, &self.rule);
        let y_prev = if dec.accept {
            self.f_y = eval_z.f;
            self.lambda_max_y = eval_z.lambda_max;
            std::mem::replace(&mut self.y, z.clone())
        } else {
            self.y.clone()
        };
        self.t = dec.t;
        self.nullcount = dec.nullcount;

        let (deltas, done) = termination_check(
            problem.b(),
            &sol.u,
            &a,
            &bmat,
            &self.y,
            -self.lambda_max_y,
            f_y_prev,
            model_z,
            T::lit(self.params.eps),
        );
        self.deltas = deltas;
        self.last_au = dot(&a, &sol.u);

        if self.params.record_trace {
            self.trace.push(IterationRecord {
                k: self.k,
                step_type: if dec.accept {
                    StepType::Descent
                } else {
                    StepType::Null
                },
                f_y: f_y_prev.as_f64(),
                f_z: eval_z.f.as_f64(),
                model_value: model_z.as_f64(),
                delta_pred: (f_y_prev - model_z).as_f64(),
                delta_true: (f_y_prev - eval_z.f).as_f64(),
                t: t_used.as_f64(),
                l: self.bundle.l(),
                rank: self.rank,
                delta1: deltas.d1.as_f64(),
                delta4: deltas.d4.as_f64(),
                delta5: deltas.d5.as_f64(),
                delta6: deltas.d6.as_f64(),
                eig_min_s: (-self.lambda_max_y).as_f64(),
                elapsed_secs: self.started.elapsed().as_secs_f64(),
            });
        }

        self.last_update = Some(UpdateInfo {
            y_prev,
            z: z.clone(),
            t: t_used,
            u: sol.u.clone(),
            model_z,
            f_z: eval_z.f,
            lambda_max_z: eval_z.lambda_max,
            v_top: eval_z.vectors.col(0).to_vec(),
        });
        self.last_u = sol.u;
        self.candidate = Candidate {
            z,
            eval: eval_z,
            v: v_new,
            block,
        };

        if done {
            return Ok(self.finish_with(Status::Converged));
        }
        Ok(None)
    }

    /// Steps until the run stops.
    pub fn run(&mut self) -> Result<Status, SolverError> {
        loop {
            if let Some(s) = self.step()? {
                return Ok(s);
            }
        }
    }

    pub fn into_result(self) -> Result<SolveResult<T>, SolverError> {
        let s = self.problem.slack(&self.y)?;
        let x = if self.bundle.is_materialized() && !self.carried.is_empty() {
            Some(recover_primal(&self.bundle, &self.carried)?)
        } else {
            None
        };
        Ok(SolveResult {
            status: self.status.unwrap_or(Status::IterLimit),
            iterations: self.k,
            objective_dual: dot(self.problem.b(), &self.y),
            objective_primal: self.last_au,
            y: self.y,
            s,
            u: self.last_u,
            x,
            deltas: self.deltas,
            rho: self.rho,
            rank: self.rank,
            predicted_rank: self.predicted_rank,
            failure: self.failure,
            wall_secs: self.started.elapsed().as_secs_f64(),
            trace: self.trace,
        })
    }
}

fn eig_count(rank: usize, predicting: bool, n: usize) -> usize {
    (rank + usize::from(predicting)).min(n)
}

fn leading_cols<T: Scalar>(v: &Mat<T>, r: usize) -> Mat<T> {
    let idx: Vec<usize> = (0..r.min(v.cols())).collect();
    v.select_cols(&idx)
}

/// Runs the bundle method from `y = 0`.
pub fn solve<T: Scalar>(
    problem: &SdpProblem<T>,
    params: SolverParams,
) -> Result<SolveResult<T>, SolverError> {
    let mut s = BundleSolver::new(problem, params)?;
    s.run()?;
    s.into_result()
}

/// Runs the bundle method from `y0`.
pub fn solve_from<T: Scalar>(
    problem: &SdpProblem<T>,
    params: SolverParams,
    y0: Vec<T>,
) -> Result<SolveResult<T>, SolverError> {
    let mut s = BundleSolver::with_start(problem, params, y0)?;
    s.run()?;
    s.into_result()
}
