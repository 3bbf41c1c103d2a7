use std::time::Instant;

use super::{
    check_eps, primal_learner, round_limit, settle_exhausted, threshold::regret_threshold, Outcome, PrimalLearner,
    Solution, SolveOptions, TraceRecord, TraceSink,
};
use crate::error::Result;
use crate::linalg::Vector;
use crate::problem::{separation_oracle, Problem, ViolationReport};

/// Learner plays points, the separation oracle answers with a violated
/// constraint whose gradient is the round's feedback.
///
/// Returns the first point the oracle cannot reject. If every round finds a
/// violation, the empirical distribution of violated indices is a dual
/// certificate of infeasibility.
pub fn primal_game_opt(
    problem: &Problem,
    eps: f64,
    learner: PrimalLearner,
    opts: &SolveOptions,
    sink: &mut dyn TraceSink,
) -> Result<Solution> {
    check_eps(eps)?;
    let start = Instant::now();
    let mut player = primal_learner(problem, learner)?;
    let bound = player.regret_bound();
    let (threshold, limit) = round_limit(regret_threshold(&bound, eps), opts)?;

    let m = problem.m();
    let mut counts = vec![0u64; m];
    let mut x_sum = Vector::zeros(problem.n());
    for t in 1..=limit {
        let x = player.point().clone();
        match separation_oracle(problem, &x, eps)? {
            ViolationReport::Fail => {
                sink.record(TraceRecord {
                    iter: t,
                    violated_index: None,
                    violation: 0.0,
                    game_loss: 0.0,
                    regret_bound: bound.eval(t),
                    elapsed_ns: start.elapsed().as_nanos() as u64,
                });
                let residuals = problem.values(&x)?;
                return Ok(Solution {
                    outcome: Outcome::Feasible { x, residuals },
                    iterations: t,
                    threshold,
                    guarantee: eps,
                    value_estimate: None,
                });
            }
            ViolationReport::Violated { index, value } => {
                counts[index] += 1;
                x_sum += &x;
                let grad = problem.constraints()[index].gradient(&x)?;
                player.step(&grad)?;
                sink.record(TraceRecord {
                    iter: t,
                    violated_index: Some(index),
                    violation: value,
                    game_loss: value,
                    regret_bound: bound.eval(t),
                    elapsed_ns: start.elapsed().as_nanos() as u64,
                });
            }
        }
    }

    let outcome = if Some(limit) == threshold {
        let total = limit as f64;
        Outcome::Infeasible { p_bar: Vector::from_iterator(m, counts.iter().map(|&c| c as f64 / total)) }
    } else {
        let x_bar = x_sum / limit as f64;
        settle_exhausted(problem, &[player.point().clone(), x_bar], eps)?
    };
    Ok(Solution { outcome, iterations: limit, threshold, guarantee: eps, value_estimate: None })
}
