//! The three meta-solvers: a learner plays against an oracle (primal,
//! dual), or two learners play against each other (primal-dual).

mod dual;
mod primal;
mod primal_dual;
pub mod threshold;
mod trace;
pub(crate) mod verify;

pub use dual::dual_game_opt;
pub use primal::primal_game_opt;
pub use primal_dual::primal_dual_game_opt;
pub use threshold::{regret_threshold, stopping_threshold};
pub use trace::{NullSink, TraceRecord, TraceSink};
pub use verify::{certificate_conflict, verify_certificate, Verification, VerifyMethod};

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::online::{Ogd, OnlineLearner, Ons, Sense};
use crate::problem::Problem;

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Feasible {
        x: Vector,
        residuals: Vector,
    },
    /// `min_x g(x, p_bar) > 0`.
    Infeasible {
        p_bar: Vector,
    },
    /// `min_x g(x, p_bar) > -eps`.
    EpsilonInfeasible {
        p_bar: Vector,
    },
    /// The iteration cap ran out before the stopping threshold.
    Exhausted {
        best_x: Vector,
        best_violation: f64,
    },
}

impl Outcome {
    pub fn kind(&self) -> &'static str {
        match self {
            Outcome::Feasible { .. } => "feasible",
            Outcome::Infeasible { .. } => "infeasible",
            Outcome::EpsilonInfeasible { .. } => "epsilon_infeasible",
            Outcome::Exhausted { .. } => "exhausted",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub outcome: Outcome,
    /// Rounds actually played.
    pub iterations: u64,
    /// Theoretical stopping round; `None` when it overflows.
    pub threshold: Option<u64>,
    /// Accuracy the outcome is certified at: residual bound for feasible
    /// points, `eps` for dual certificates.
    pub guarantee: f64,
    /// Average payoff of the played rounds (primal-dual only).
    pub value_estimate: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SolveOptions {
    /// Hard cap on rounds; runs stopped by it return `Exhausted` unless a
    /// point already meets `eps`.
    pub max_iters: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimalLearner {
    Ogd,
    Ons,
}

pub(crate) fn primal_learner(problem: &Problem, kind: PrimalLearner) -> Result<Box<dyn OnlineLearner>> {
    let p = problem.params();
    let domain = problem.domain().clone();
    Ok(match kind {
        PrimalLearner::Ogd => {
            if p.h <= 0.0 {
                return Err(Error::LearnerMismatch("gradient descent needs H > 0; strictify the problem first".into()));
            }
            Box::new(Ogd::new(domain, p.h, p.g)?)
        }
        PrimalLearner::Ons => {
            if p.alpha <= 0.0 {
                return Err(Error::LearnerMismatch(
                    "online Newton step needs alpha > 0; log-transform affine constraints first".into(),
                ));
            }
            Box::new(Ons::new(domain, p.g, p.d, p.alpha, Sense::Minimize)?)
        }
    })
}

/// Round limit from the threshold and the optional cap.
pub(crate) fn round_limit(threshold: Result<u64>, opts: &SolveOptions) -> Result<(Option<u64>, u64)> {
    match (threshold, opts.max_iters) {
        (Ok(t), Some(cap)) => Ok((Some(t), t.min(cap.max(1)))),
        (Ok(t), None) => Ok((Some(t), t)),
        (Err(Error::ThresholdOverflow), Some(cap)) => Ok((None, cap.max(1))),
        (Err(e), _) => Err(e),
    }
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("eps must be > 0, got {eps}")))
    }
}

/// Feasible if the better of `candidates` meets `eps`, else Exhausted.
pub(crate) fn settle_exhausted(problem: &Problem, candidates: &[Vector], eps: f64) -> Result<Outcome> {
    let mut best: Option<(Vector, Vector, f64)> = None;
    for x in candidates {
        let vals = problem.values(x)?;
        let worst = vals.max();
        if best.as_ref().is_none_or(|b| worst < b.2) {
            best = Some((x.clone(), vals, worst));
        }
    }
    let (x, residuals, worst) = best.expect("at least one candidate");
    Ok(if worst <= eps {
        Outcome::Feasible { x, residuals }
    } else {
        Outcome::Exhausted { best_x: x, best_violation: worst }
    })
}
