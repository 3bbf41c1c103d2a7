//! Solver dispatch and problem transforms shared by the CLI and the
//! experiments.

use std::fmt;

use gameopt_core::reductions::{approx_translate, log_eps_for, log_transform, strictify};
use gameopt_core::solvers::{dual_game_opt, primal_dual_game_opt, primal_game_opt, TraceSink};
use gameopt_core::{PrimalLearner, Problem, Solution, SolveOptions};
use serde::{Deserialize, Serialize};

use crate::file::ProblemFile;
use crate::outcome::{OutcomeDocument, TransformSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    Primal,
    Dual,
    PrimalDual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Learner {
    Ogd,
    Ons,
    Mw,
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algo::Primal => "primal",
            Algo::Dual => "dual",
            Algo::PrimalDual => "primal-dual",
        })
    }
}

impl fmt::Display for Learner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Learner::Ogd => "ogd",
            Learner::Ons => "ons",
            Learner::Mw => "mw",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] gameopt_core::Error),
}

/// The dual solver always plays multiplicative weights; the others need a
/// learner on the primal domain.
pub fn check_pairing(algo: Algo, learner: Learner) -> Result<(), RunError> {
    match (algo, learner) {
        (Algo::Dual, Learner::Mw) => Ok(()),
        (Algo::Dual, l) => Err(RunError::Usage(format!("the dual solver plays mw over the constraints, not {l}"))),
        (_, Learner::Mw) => Err(RunError::Usage(format!("{algo} needs a primal learner (ogd or ons), not mw"))),
        _ => Ok(()),
    }
}

pub fn solve(
    problem: &Problem,
    algo: Algo,
    learner: Learner,
    eps: f64,
    opts: &SolveOptions,
    sink: &mut dyn TraceSink,
) -> Result<Solution, RunError> {
    check_pairing(algo, learner)?;
    let primal = if learner == Learner::Ons { PrimalLearner::Ons } else { PrimalLearner::Ogd };
    Ok(match algo {
        Algo::Primal => primal_game_opt(problem, eps, primal, opts, sink)?,
        Algo::Dual => dual_game_opt(problem, eps, opts, sink)?,
        Algo::PrimalDual => primal_dual_game_opt(problem, eps, primal, opts, sink)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strictify {
    /// `δ = eps`, which doubles the accuracy on the original problem.
    Auto,
    Delta(f64),
}

impl std::str::FromStr for Strictify {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Strictify::Auto);
        }
        match s.parse::<f64>() {
            Ok(d) if d >= 0.0 && d.is_finite() => Ok(Strictify::Delta(d)),
            _ => Err(format!("expected 'auto' or a delta >= 0, got '{s}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Transform {
    pub strictify: Option<Strictify>,
    pub log_transform: bool,
    /// Width for the log transform; the estimate when absent.
    pub omega: Option<f64>,
}

/// A problem ready for the solver, with the bookkeeping needed to state
/// the result on the user's problem.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub solved: Problem,
    pub eps: f64,
    pub spec: Option<TransformSpec>,
    kind: Prep,
}

#[derive(Debug, Clone, Copy)]
enum Prep {
    Plain,
    Strict(f64),
    Log(f64),
}

impl Prepared {
    /// Residual bound on the original problem for a solver guarantee `g`
    /// on the solved one.
    pub fn original_guarantee(&self, g: f64) -> f64 {
        match self.kind {
            Prep::Plain => g,
            // f <= f' + δ on the simplex.
            Prep::Strict(delta) => g + delta,
            Prep::Log(omega) => approx_translate(g, omega),
        }
    }
}

pub fn prepare(problem: &Problem, t: &Transform, eps: f64) -> Result<Prepared, RunError> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(RunError::Usage(format!("eps must be > 0, got {eps}")));
    }
    match (t.strictify, t.log_transform) {
        (Some(_), true) => Err(RunError::Usage("--strictify and --log-transform cannot be combined".into())),
        (Some(s), false) => {
            let delta = match s {
                Strictify::Auto => eps,
                Strictify::Delta(d) => d,
            };
            Ok(Prepared {
                solved: strictify(problem, delta)?,
                eps,
                spec: Some(TransformSpec { strictify_delta: Some(delta), log_transform_omega: None }),
                kind: Prep::Strict(delta),
            })
        }
        (None, true) => {
            let solved = log_transform(problem, t.omega)?;
            let omega = t.omega.unwrap_or(problem.params().omega);
            Ok(Prepared {
                solved,
                eps: log_eps_for(eps, omega),
                spec: Some(TransformSpec { strictify_delta: None, log_transform_omega: Some(omega) }),
                kind: Prep::Log(omega),
            })
        }
        (None, false) => Ok(Prepared { solved: problem.clone(), eps, spec: None, kind: Prep::Plain }),
    }
}

/// Transforms, solves and packages the result as an outcome document.
pub fn solve_to_document(
    problem: &Problem,
    algo: Algo,
    learner: Learner,
    eps: f64,
    transform: &Transform,
    opts: &SolveOptions,
    sink: &mut dyn TraceSink,
) -> Result<(Solution, OutcomeDocument), RunError> {
    check_pairing(algo, learner)?;
    let prep = prepare(problem, transform, eps)?;
    let sol = solve(&prep.solved, algo, learner, prep.eps, opts, sink)?;
    let mut doc = OutcomeDocument::new(&algo.to_string(), &learner.to_string(), prep.eps, &prep.solved, &sol);
    if prep.spec.is_some() {
        doc.original = Some(ProblemFile::from_problem(problem));
        doc.original_guarantee = Some(prep.original_guarantee(sol.guarantee));
        doc.transform = prep.spec.clone();
    }
    Ok((sol, doc))
}
