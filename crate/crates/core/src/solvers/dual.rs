use std::time::Instant;

use super::{check_eps, round_limit, settle_exhausted, threshold::regret_threshold, Outcome, Solution, SolveOptions};
use super::{TraceRecord, TraceSink};
use crate::error::Result;
use crate::linalg::Vector;
use crate::online::{Mw, OnlineLearner, RegretBound, Sense};
use crate::problem::{optimization_oracle, OracleResult, Problem};

/// Multiplicative weights over the constraints plays distributions; the
/// optimization oracle answers with a point minimizing the weighted sum.
///
/// The oracle runs at tolerance `eps/2`. A FAIL certifies infeasibility
/// through the current distribution. Otherwise the average point satisfies
/// every constraint up to `eps` plus the largest weighted value the oracle
/// accepted, which is what `Solution::guarantee` reports.
pub fn dual_game_opt(problem: &Problem, eps: f64, opts: &SolveOptions, sink: &mut dyn TraceSink) -> Result<Solution> {
    check_eps(eps)?;
    let start = Instant::now();
    let m = problem.m();
    let g_inf = problem.params().omega;
    let bound = RegretBound::Mw { g_inf, n: m };
    let (threshold, limit) = round_limit(regret_threshold(&bound, eps), opts)?;
    let mut player = Mw::for_horizon(m, threshold.unwrap_or(limit), g_inf, Sense::Maximize)?;
    let tol = eps / 2.0;

    let mut x_sum = Vector::zeros(problem.n());
    let mut last_x = problem.domain().initial_point();
    let mut max_accepted = f64::NEG_INFINITY;
    for t in 1..=limit {
        let p = player.point().clone();
        match optimization_oracle(problem, &p, tol)? {
            OracleResult::Fail { lower_bound } => {
                sink.record(TraceRecord {
                    iter: t,
                    violated_index: None,
                    violation: 0.0,
                    game_loss: lower_bound,
                    regret_bound: bound.eval(t),
                    elapsed_ns: start.elapsed().as_nanos() as u64,
                });
                return Ok(Solution {
                    outcome: Outcome::Infeasible { p_bar: p },
                    iterations: t,
                    threshold,
                    guarantee: eps,
                    value_estimate: None,
                });
            }
            OracleResult::Point { x, value } => {
                let vals = problem.values(&x)?;
                let (j, v) = vals.argmax();
                player.step(&vals)?;
                x_sum += &x;
                max_accepted = max_accepted.max(value);
                sink.record(TraceRecord {
                    iter: t,
                    violated_index: Some(j),
                    violation: v,
                    game_loss: value,
                    regret_bound: bound.eval(t),
                    elapsed_ns: start.elapsed().as_nanos() as u64,
                });
                last_x = x;
            }
        }
    }

    let x_bar = x_sum / limit as f64;
    let guarantee = eps + max_accepted.max(0.0);
    let outcome = if Some(limit) == threshold {
        let residuals = problem.values(&x_bar)?;
        if residuals.max() <= guarantee {
            Outcome::Feasible { x: x_bar, residuals }
        } else {
            // Only reachable if the width bound was wrong and the dual
            // player had to rescale.
            settle_exhausted(problem, &[x_bar, last_x], guarantee)?
        }
    } else {
        settle_exhausted(problem, &[x_bar, last_x], guarantee)?
    };
    Ok(Solution { outcome, iterations: limit, threshold, guarantee, value_estimate: None })
}
