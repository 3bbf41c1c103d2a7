//! The feasibility program `f_j(x) <= 0, x in domain`, its associated game
//! `g(x, p) = Σ p_j f_j(x)` and the two oracles the meta-solvers call.

use crate::constraint::ConstraintFn;
use crate::domain::Domain;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{lambda_max, Matrix, Vector};
use crate::minimize::{minimize, MinimizeOptions};
pub use crate::params::ProblemParams;

/// Iteration cap of the inner minimizer behind the optimization oracle.
pub const ORACLE_MAX_ITERS: usize = 100_000;

/// Values at or below this count as non-positive.
pub const ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    constraints: Vec<ConstraintFn>,
    domain: Domain,
    params: ProblemParams,
}

impl Problem {
    /// Builds a problem with parameters from [`estimate_parameters`].
    pub fn new(constraints: Vec<ConstraintFn>, domain: Domain) -> Result<Self> {
        validate_shape(&constraints, &domain)?;
        let params = crate::params::estimate_for(&constraints, &domain)?;
        Ok(Problem { constraints, domain, params })
    }

    /// Builds a problem with caller-supplied parameters.
    pub fn with_params(constraints: Vec<ConstraintFn>, domain: Domain, params: ProblemParams) -> Result<Self> {
        validate_shape(&constraints, &domain)?;
        params.validate()?;
        Ok(Problem { constraints, domain, params })
    }

    pub fn constraints(&self) -> &[ConstraintFn] {
        &self.constraints
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn params(&self) -> &ProblemParams {
        &self.params
    }

    pub fn m(&self) -> usize {
        self.constraints.len()
    }

    pub fn n(&self) -> usize {
        self.domain.dim()
    }

    /// `(f_1(x), …, f_m(x))`.
    pub fn values(&self, x: &Vector) -> Result<Vector> {
        let mut out = Vector::zeros(self.m());
        for (j, f) in self.constraints.iter().enumerate() {
            out[j] = f.evaluate(x)?;
        }
        Ok(out)
    }

    /// Index and value of the largest constraint value (lowest index on ties).
    pub fn max_violation(&self, x: &Vector) -> Result<(usize, f64)> {
        let vals = self.values(x)?;
        let mut best = 0;
        for j in 1..vals.len() {
            if vals[j] > vals[best] {
                best = j;
            }
        }
        Ok((best, vals[best]))
    }
}

fn validate_shape(constraints: &[ConstraintFn], domain: &Domain) -> Result<()> {
    if constraints.is_empty() {
        return Err(Error::InvalidArgument("a problem needs at least one constraint".into()));
    }
    for f in constraints {
        check_dim("constraint vs domain", domain.dim(), f.dim())?;
    }
    Ok(())
}

pub fn estimate_parameters(problem: &Problem) -> Result<ProblemParams> {
    crate::params::estimate_for(&problem.constraints, &problem.domain)
}

/// Checks that `p` is a distribution over `m` items within 1e-9.
pub fn check_distribution(p: &Vector, m: usize) -> Result<()> {
    check_dim("dual distribution", m, p.len())?;
    if p.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidDistribution("entries must be finite and nonnegative".into()));
    }
    let s = p.sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!("entries sum to {s}")));
    }
    Ok(())
}

/// `g(x, p) = Σ_j p_j f_j(x)`; constraints with zero weight are skipped.
pub fn game_loss(problem: &Problem, x: &Vector, p: &Vector) -> Result<f64> {
    check_distribution(p, problem.m())?;
    check_dim("game point", problem.n(), x.len())?;
    let mut s = 0.0;
    for (j, f) in problem.constraints.iter().enumerate() {
        if p[j] != 0.0 {
            s += p[j] * f.evaluate(x)?;
        }
    }
    Ok(s)
}

/// Value and gradient of `g(·, p)` at `x`, without the distribution check.
pub(crate) fn game_value_grad(problem: &Problem, x: &Vector, p: &Vector) -> Result<(f64, Vector)> {
    let mut v = 0.0;
    let mut g = Vector::zeros(x.len());
    for (j, f) in problem.constraints.iter().enumerate() {
        if p[j] != 0.0 {
            let (fv, fg) = f.value_and_gradient(x)?;
            v += p[j] * fv;
            g.axpy(p[j], &fg, 1.0);
        }
    }
    Ok((v, g))
}

#[derive(Debug, Clone, PartialEq)]
pub enum ViolationReport {
    /// Zero-based index of the first constraint with `f_j(x) > eps`.
    Violated {
        index: usize,
        value: f64,
    },
    Fail,
}

pub fn separation_oracle(problem: &Problem, x: &Vector, eps: f64) -> Result<ViolationReport> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be >= 0, got {eps}")));
    }
    check_dim("oracle point", problem.n(), x.len())?;
    for (j, f) in problem.constraints.iter().enumerate() {
        let v = f.evaluate(x)?;
        if v > eps {
            return Ok(ViolationReport::Violated { index: j, value: v });
        }
    }
    Ok(ViolationReport::Fail)
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleResult {
    /// A domain point with `g(x, p) <= tol`.
    Point { x: Vector, value: f64 },
    /// `min_x g(x, p) >= lower_bound > 0`.
    Fail { lower_bound: f64 },
}

/// Aggregates `Σ p_j f_j` into one quadratic when every family allows it.
fn aggregate_quadratic(problem: &Problem, p: &Vector) -> Option<(Matrix, Vector, f64)> {
    let n = problem.n();
    let mut acc = (Matrix::zeros(n, n), Vector::zeros(n), 0.0);
    for (j, f) in problem.constraints.iter().enumerate() {
        if p[j] == 0.0 {
            continue;
        }
        let (a, b, c) = f.as_quadratic()?;
        acc.0 += a * p[j];
        acc.1.axpy(p[j], &b, 1.0);
        acc.2 += p[j] * c;
    }
    Some(acc)
}

fn aggregate_affine(problem: &Problem, p: &Vector) -> Option<(Vector, f64)> {
    let mut a = Vector::zeros(problem.n());
    let mut b = 0.0;
    for (j, f) in problem.constraints.iter().enumerate() {
        if p[j] == 0.0 {
            continue;
        }
        let (fa, fb) = f.as_affine()?;
        a.axpy(p[j], &fa, 1.0);
        b += p[j] * fb;
    }
    Some((a, b))
}

/// Minimizes `g(·, p)` over the domain until its sign is decided.
///
/// All-affine problems are solved exactly by the domain's linear minimizer.
/// Otherwise a projected gradient method runs until it either finds a point
/// with `g <= 0`, certifies `min g > 0` through its duality gap, or closes
/// the gap to `tol / 2`; in the last case the point is returned when
/// `g <= tol`.
pub fn optimization_oracle(problem: &Problem, p: &Vector, tol: f64) -> Result<OracleResult> {
    check_distribution(p, problem.m())?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("oracle tolerance must be > 0, got {tol}")));
    }
    let domain = &problem.domain;
    if let Some((a, b)) = aggregate_affine(problem, p) {
        let x = domain.linear_minimizer(&a);
        let value = a.dot(&x) + b;
        return Ok(if value <= ZERO_TOL {
            OracleResult::Point { x, value }
        } else {
            OracleResult::Fail { lower_bound: value }
        });
    }
    let opts = MinimizeOptions {
        max_iters: ORACLE_MAX_ITERS,
        gap_tol: tol / 2.0,
        lipschitz: None,
        stop_below: Some(0.0),
        stop_lower_above: Some(0.0),
    };
    let x0 = domain.initial_point();
    let res = if let Some((qa, qb, qc)) = aggregate_quadratic(problem, p) {
        let opts = MinimizeOptions { lipschitz: Some((2.0 * lambda_max(&qa)).max(1e-12)), ..opts };
        minimize(
            |x| {
                let ax = &qa * x;
                Ok((x.dot(&ax) + qb.dot(x) + qc, ax * 2.0 + &qb))
            },
            domain,
            &x0,
            &opts,
        )?
    } else {
        minimize(|x| game_value_grad(problem, x, p), domain, &x0, &opts)?
    };
    if res.value <= tol {
        Ok(OracleResult::Point { x: res.x, value: res.value })
    } else if res.lower_bound > 0.0 {
        Ok(OracleResult::Fail { lower_bound: res.lower_bound })
    } else {
        Err(Error::NonConvergence { what: "optimization oracle", iterations: res.iterations })
    }
}
