use super::Outcome;
use crate::error::Result;
use crate::grid::grid_game_min;
use crate::linalg::{lambda_max, Vector};
use crate::minimize::{minimize, MinimizeOptions};
use crate::problem::{check_distribution, game_loss, game_value_grad, Problem};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VerifyMethod {
    /// Grid search with Lipschitz slack; needs `n <= 3`.
    Grid { resolution: f64 },
    /// Duality-gap lower bound from the convex minimizer.
    Convex { tol: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub valid: bool,
    /// For dual certificates: the certified lower bound on `min_x g(x, p_bar)`.
    /// For points: the largest residual.
    pub value: f64,
    pub violating_index: Option<usize>,
    pub report: String,
}

/// Rechecks an outcome from the problem alone.
///
/// Points must satisfy every constraint within `eps`. `Infeasible` needs a
/// certified `min_x g(x, p_bar) > 0`, `EpsilonInfeasible` needs `> -eps`.
/// `Exhausted` carries no certificate and never verifies.
pub fn verify_certificate(
    problem: &Problem,
    outcome: &Outcome,
    eps: f64,
    method: VerifyMethod,
) -> Result<Verification> {
    match outcome {
        Outcome::Feasible { x, .. } => {
            if !problem.domain().contains(x, 1e-9) {
                return Ok(Verification {
                    valid: false,
                    value: f64::INFINITY,
                    violating_index: None,
                    report: "point lies outside the domain".into(),
                });
            }
            let (j, v) = problem.max_violation(x)?;
            let valid = v <= eps;
            Ok(Verification {
                valid,
                value: v,
                violating_index: (!valid).then_some(j),
                report: if valid {
                    format!("max residual {v:.3e} <= eps {eps:.3e}")
                } else {
                    format!("constraint {j} has residual {v:.3e} > eps {eps:.3e}")
                },
            })
        }
        Outcome::Infeasible { p_bar } => dual_check(problem, p_bar, 0.0, method),
        Outcome::EpsilonInfeasible { p_bar } => dual_check(problem, p_bar, -eps, method),
        Outcome::Exhausted { best_violation, .. } => Ok(Verification {
            valid: false,
            value: *best_violation,
            violating_index: None,
            report: "iteration cap reached; no certificate".into(),
        }),
    }
}

fn dual_check(problem: &Problem, p: &Vector, threshold: f64, method: VerifyMethod) -> Result<Verification> {
    check_distribution(p, problem.m())?;
    let (lower, how) = match method {
        VerifyMethod::Grid { resolution } => {
            let g = grid_game_min(problem, p, resolution)?;
            (g.lower(), format!("grid min {:.6} with slack {:.2e} over {} points", g.value, g.slack, g.points))
        }
        VerifyMethod::Convex { tol } => {
            let lower = certified_game_min(problem, p, tol, threshold)?;
            (lower, format!("duality-gap lower bound {lower:.6}"))
        }
    };
    let valid = lower > threshold;
    Ok(Verification {
        valid,
        value: lower,
        violating_index: None,
        report: format!("{how}; need > {threshold}: {}", if valid { "certified" } else { "not certified" }),
    })
}

/// Lower bound on `min_x g(x, p)`, refined until it clears `target` or the
/// gap closes to `tol`.
pub(crate) fn certified_game_min(problem: &Problem, p: &Vector, tol: f64, target: f64) -> Result<f64> {
    let quad = {
        let n = problem.n();
        let mut acc = Some((crate::linalg::Matrix::zeros(n, n), Vector::zeros(n), 0.0));
        for (j, f) in problem.constraints().iter().enumerate() {
            if p[j] == 0.0 {
                continue;
            }
            acc = match (acc, f.as_quadratic()) {
                (Some(mut s), Some((a, b, c))) => {
                    s.0 += a * p[j];
                    s.1.axpy(p[j], &b, 1.0);
                    s.2 += p[j] * c;
                    Some(s)
                }
                _ => None,
            };
        }
        acc
    };
    let opts = MinimizeOptions { gap_tol: tol, stop_lower_above: Some(target), ..Default::default() };
    let x0 = problem.domain().initial_point();
    let res = match quad {
        Some((a, b, c)) => {
            let opts = MinimizeOptions { lipschitz: Some((2.0 * lambda_max(&a)).max(1e-12)), ..opts };
            minimize(|x| Ok((x.dot(&(&a * x)) + b.dot(x) + c, &a * x * 2.0 + &b)), problem.domain(), &x0, &opts)?
        }
        None => minimize(|x| game_value_grad(problem, x, p), problem.domain(), &x0, &opts)?,
    };
    Ok(res.lower_bound)
}

/// Weak duality check between a point and a dual certificate: a point at
/// which `g(x, p_bar)` falls below the certified lower bound exposes an
/// implementation error.
pub fn certificate_conflict(problem: &Problem, x: &Vector, p_bar: &Vector, certified_lower: f64) -> Result<bool> {
    Ok(game_loss(problem, x, p_bar)? < certified_lower - 1e-9)
}
