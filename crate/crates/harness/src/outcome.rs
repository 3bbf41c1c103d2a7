//! Self-contained outcome documents: the solved problem travels with the
//! answer so a certificate can be rechecked from the document alone.

use gameopt_core::linalg::Vector;
use gameopt_core::solvers::{verify_certificate, VerifyMethod};
use gameopt_core::{Outcome, Problem, Solution};
use serde::{Deserialize, Serialize};

use crate::file::{FileError, ProblemFile};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OutcomeSpec {
    Feasible { x: Vec<f64>, residuals: Vec<f64> },
    Infeasible { p_bar: Vec<f64> },
    EpsilonInfeasible { p_bar: Vec<f64> },
    Exhausted { best_x: Vec<f64>, best_violation: f64 },
}

fn to_vec(v: &Vector) -> Vec<f64> {
    v.iter().copied().collect()
}

impl OutcomeSpec {
    pub fn from_outcome(o: &Outcome) -> Self {
        match o {
            Outcome::Feasible { x, residuals } => OutcomeSpec::Feasible { x: to_vec(x), residuals: to_vec(residuals) },
            Outcome::Infeasible { p_bar } => OutcomeSpec::Infeasible { p_bar: to_vec(p_bar) },
            Outcome::EpsilonInfeasible { p_bar } => OutcomeSpec::EpsilonInfeasible { p_bar: to_vec(p_bar) },
            Outcome::Exhausted { best_x, best_violation } => {
                OutcomeSpec::Exhausted { best_x: to_vec(best_x), best_violation: *best_violation }
            }
        }
    }

    pub fn to_outcome(&self) -> Outcome {
        let v = |x: &[f64]| Vector::from_column_slice(x);
        match self {
            OutcomeSpec::Feasible { x, residuals } => Outcome::Feasible { x: v(x), residuals: v(residuals) },
            OutcomeSpec::Infeasible { p_bar } => Outcome::Infeasible { p_bar: v(p_bar) },
            OutcomeSpec::EpsilonInfeasible { p_bar } => Outcome::EpsilonInfeasible { p_bar: v(p_bar) },
            OutcomeSpec::Exhausted { best_x, best_violation } => {
                Outcome::Exhausted { best_x: v(best_x), best_violation: *best_violation }
            }
        }
    }
}

/// How the user's problem was rewritten before solving.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strictify_delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_transform_omega: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeDocument {
    pub algo: String,
    pub learner: String,
    /// Accuracy requested from the solver on `problem`.
    pub eps: f64,
    /// Residual bound certified for a feasible point of `problem`.
    pub guarantee: f64,
    pub iterations: u64,
    pub threshold: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_estimate: Option<f64>,
    pub outcome: OutcomeSpec,
    /// The problem the solver actually ran on.
    pub problem: ProblemFile,
    /// The user's problem, present when a transform was applied.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub original: Option<ProblemFile>,
    /// Residual bound a feasible point satisfies on `original`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub original_guarantee: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<TransformSpec>,
}

/// Verdict of a standalone recheck.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentCheck {
    pub valid: bool,
    pub lines: Vec<String>,
}

impl OutcomeDocument {
    pub fn new(algo: &str, learner: &str, eps: f64, solved: &Problem, solution: &Solution) -> Self {
        OutcomeDocument {
            algo: algo.into(),
            learner: learner.into(),
            eps,
            guarantee: solution.guarantee,
            iterations: solution.iterations,
            threshold: solution.threshold,
            value_estimate: solution.value_estimate,
            outcome: OutcomeSpec::from_outcome(&solution.outcome),
            problem: ProblemFile::from_problem(solved),
            original: None,
            original_guarantee: None,
            transform: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("outcome documents serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, FileError> {
        serde_json::from_str(text).map_err(|e| FileError::Syntax {
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        })
    }

    /// Reruns the certificate check. Points are checked against the solved
    /// problem at `guarantee` and, after a transform, against the original
    /// at `original_guarantee`; distributions are checked on the solved
    /// problem.
    pub fn verify(&self, method: Option<VerifyMethod>) -> Result<DocumentCheck, FileError> {
        let problem = self.problem.to_problem()?;
        let method = method.unwrap_or_else(|| default_method(&problem));
        let outcome = self.outcome.to_outcome();
        let tol = match outcome {
            Outcome::Feasible { .. } => self.guarantee,
            _ => self.eps,
        };
        let main = verify_certificate(&problem, &outcome, tol, method)?;
        let mut lines = vec![format!("solved problem: {}", main.report)];
        let mut valid = main.valid;
        if let (Outcome::Feasible { x, .. }, Some(orig)) = (&outcome, &self.original) {
            let orig = orig.to_problem()?;
            let bound = self.original_guarantee.unwrap_or(self.guarantee);
            let (j, v) = orig.max_violation(x)?;
            let ok = v <= bound;
            lines.push(format!(
                "original problem: max residual {v:.3e} at constraint {j} {} {bound:.3e}",
                if ok { "<=" } else { ">" }
            ));
            valid &= ok;
        }
        Ok(DocumentCheck { valid, lines })
    }
}

/// Grid search for `n <= 3`, the convex lower bound otherwise.
pub fn default_method(problem: &Problem) -> VerifyMethod {
    match problem.n() {
        0..=2 => VerifyMethod::Grid { resolution: 1e-3 },
        3 => VerifyMethod::Grid { resolution: 5e-3 },
        _ => VerifyMethod::Convex { tol: 1e-9 },
    }
}
