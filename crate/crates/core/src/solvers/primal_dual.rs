use std::time::Instant;

use super::{check_eps, primal_learner, round_limit, settle_exhausted, threshold::regret_threshold};
use super::{Outcome, PrimalLearner, Solution, SolveOptions, TraceRecord, TraceSink};
use crate::error::Result;
use crate::linalg::Vector;
use crate::online::{Mw, OnlineLearner, RegretBound, Sense};
use crate::problem::{game_value_grad, Problem};

/// Both players learn: the primal player on the domain, multiplicative
/// weights on the constraints. Each player's regret budget is `eps/2`.
///
/// After the threshold the average point is returned if it is
/// `eps`-feasible; otherwise the average distribution certifies that the
/// game value exceeds `-eps`.
pub fn primal_dual_game_opt(
    problem: &Problem,
    eps: f64,
    learner: PrimalLearner,
    opts: &SolveOptions,
    sink: &mut dyn TraceSink,
) -> Result<Solution> {
    check_eps(eps)?;
    let start = Instant::now();
    let m = problem.m();
    let mut primal = primal_learner(problem, learner)?;
    let primal_bound = primal.regret_bound();
    let g_inf = problem.params().omega;
    let dual_bound = RegretBound::Mw { g_inf, n: m };
    let threshold = match (regret_threshold(&primal_bound, eps / 2.0), regret_threshold(&dual_bound, eps / 2.0)) {
        (Ok(a), Ok(b)) => Ok(a.max(b)),
        (Err(e), _) | (_, Err(e)) => Err(e),
    };
    let (threshold, limit) = round_limit(threshold, opts)?;
    let mut dual = Mw::for_horizon(m, threshold.unwrap_or(limit), g_inf, Sense::Maximize)?;

    let mut x_sum = Vector::zeros(problem.n());
    let mut p_sum = Vector::zeros(m);
    let mut payoff = 0.0;
    for t in 1..=limit {
        let x = primal.point().clone();
        let p = dual.point().clone();
        let vals = problem.values(&x)?;
        let (loss, grad) = game_value_grad(problem, &x, &p)?;
        primal.step(&grad)?;
        dual.step(&vals)?;
        x_sum += &x;
        p_sum += &p;
        payoff += loss;
        let (j, v) = vals.argmax();
        sink.record(TraceRecord {
            iter: t,
            violated_index: Some(j),
            violation: v,
            game_loss: loss,
            regret_bound: primal_bound.eval(t) + dual_bound.eval(t),
            elapsed_ns: start.elapsed().as_nanos() as u64,
        });
    }

    let total = limit as f64;
    let x_bar = x_sum / total;
    let p_bar = p_sum / total;
    let value_estimate = Some(payoff / total);
    let outcome = if Some(limit) == threshold {
        let residuals = problem.values(&x_bar)?;
        if residuals.max() <= eps {
            Outcome::Feasible { x: x_bar, residuals }
        } else {
            Outcome::EpsilonInfeasible { p_bar }
        }
    } else {
        settle_exhausted(problem, &[x_bar, primal.point().clone()], eps)?
    };
    Ok(Solution { outcome, iterations: limit, threshold, guarantee: eps, value_estimate })
}
