//! Transformations that give the constraints the curvature a learner needs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::constraint::ConstraintFn;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::linalg::{basis, Matrix};
use crate::params::{ProblemParams, MIN_PARAM};
use crate::problem::Problem;

/// Random points used to validate a user-supplied width.
const WIDTH_SAMPLES: usize = 2000;

/// Replaces each `f_j` by `f_j + δ‖x‖² - δ` on the simplex.
///
/// Feasible points stay feasible (`‖x‖² <= 1`), the Hessian gains `2δI`,
/// and gradients grow by at most `2δ`.
pub fn strictify(problem: &Problem, delta: f64) -> Result<Problem> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!("delta must be >= 0, got {delta}")));
    }
    let Domain::Simplex { n } = *problem.domain() else {
        return Err(Error::InvalidArgument("strictify needs a simplex domain".into()));
    };
    if delta == 0.0 {
        return Ok(problem.clone());
    }
    let reg =
        || ConstraintFn::Quadratic { a: Matrix::identity(n, n) * delta, b: crate::linalg::Vector::zeros(n), c: -delta };
    let constraints = problem
        .constraints()
        .iter()
        .map(|f| match f {
            ConstraintFn::Affine { a, b } => {
                ConstraintFn::Quadratic { a: Matrix::identity(n, n) * delta, b: a.clone(), c: b - delta }
            }
            ConstraintFn::Quadratic { a, b, c } => {
                ConstraintFn::Quadratic { a: a + Matrix::identity(n, n) * delta, b: b.clone(), c: c - delta }
            }
            other => ConstraintFn::Sum(vec![other.clone(), reg()]),
        })
        .collect();
    let p = problem.params();
    let g = p.g + 2.0 * delta;
    let h = p.h + 2.0 * delta;
    let omega = p.omega + delta;
    let params = ProblemParams { g, h, omega, d: p.d, g_inf: omega, alpha: p.alpha.max(h / (g * g)) };
    Problem::with_params(constraints, problem.domain().clone(), params)
}

/// `(δ, guarantee)`: with `δ = eps`, an `eps`-solution of the strictified
/// program is a `2·eps`-solution of the original.
pub fn strictify_guarantee(eps: f64) -> (f64, f64) {
    (eps, 2.0 * eps)
}

/// Rewrites `f_j <= 0` as `1 - log(e - f_j/ω) <= 0`.
///
/// This is the minimization form of `log(e + h_j/ω) >= 1` with
/// `h_j = -f_j`. The new constraints have gradients at most `G/ω`, and for
/// affine `f_j` they are 1-exp-concave. Without `omega` the estimated width
/// is used; a supplied value is checked against vertices and random points.
pub fn log_transform(problem: &Problem, omega: Option<f64>) -> Result<Problem> {
    let p = problem.params();
    let omega = match omega {
        None => p.omega,
        Some(w) => {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidArgument(format!("omega must be > 0, got {w}")));
            }
            let observed = observed_width(problem)?;
            if observed > w {
                return Err(Error::WidthTooSmall { omega: w, observed });
            }
            w
        }
    };
    let mut all_affine = true;
    let mut constraints = Vec::with_capacity(problem.m());
    for f in problem.constraints() {
        all_affine &= f.as_affine().is_some();
        let concave = ConstraintFn::scaled(f.clone(), -1.0, 0.0)?;
        let log = ConstraintFn::log_affine_composite(concave, omega)?;
        constraints.push(ConstraintFn::scaled(log, -1.0, 1.0)?);
    }
    let e = std::f64::consts::E;
    // |f/ω| <= 1 keeps the value in [1 - ln(e+1), 1 - ln(e-1)].
    let width = (1.0 - (e - 1.0).ln()).max((e + 1.0).ln() - 1.0);
    let alpha = if all_affine { 1.0 } else { 0.0 };
    let params = ProblemParams { g: (p.g / omega).max(MIN_PARAM), h: 0.0, omega: width, d: p.d, g_inf: width, alpha };
    Problem::with_params(constraints, problem.domain().clone(), params)
}

fn observed_width(problem: &Problem) -> Result<f64> {
    let d = problem.domain();
    let mut pts = vec![d.initial_point()];
    if let Domain::Simplex { n } = d {
        pts.extend((0..*n).map(|i| basis(*n, i)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    pts.extend((0..WIDTH_SAMPLES).map(|_| d.sample(&mut rng)));
    let mut worst: f64 = 0.0;
    for x in &pts {
        for f in problem.constraints() {
            match f.evaluate(x) {
                Ok(v) => worst = worst.max(v.abs()),
                Err(Error::Domain(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(worst)
}

/// Original-scale accuracy of an `eps_log`-solution of the log program.
pub fn approx_translate(eps_log: f64, omega: f64) -> f64 {
    3.0 * omega * eps_log
}

/// Accuracy to request from the log program for original accuracy `eps`.
pub fn log_eps_for(eps: f64, omega: f64) -> f64 {
    eps / (3.0 * omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Vector;

    fn v(x: &[f64]) -> Vector {
        Vector::from_vec(x.to_vec())
    }

    #[test]
    fn strictify_examples() {
        let d = Domain::simplex(2).unwrap();
        let pr = Problem::new(vec![ConstraintFn::constant(2, 0.0)], d).unwrap();
        assert_eq!(strictify(&pr, 0.0).unwrap(), pr);
        let s = strictify(&pr, 0.1).unwrap();
        let val = s.constraints()[0].evaluate(&v(&[0.5, 0.5])).unwrap();
        assert!((val + 0.05).abs() < 1e-15);
        assert!((s.params().h - (pr.params().h + 0.2)).abs() < 1e-15);
        assert!((s.params().g - (pr.params().g + 0.2)).abs() < 1e-15);
        assert_eq!(strictify_guarantee(0.05), (0.05, 0.1));
    }

    #[test]
    fn strictify_needs_simplex() {
        let pr = Problem::new(vec![ConstraintFn::constant(2, 0.0)], Domain::unit_ball(2).unwrap()).unwrap();
        assert!(strictify(&pr, 0.1).is_err());
    }

    #[test]
    fn log_transform_values() {
        let d = Domain::simplex(2).unwrap();
        let pr = Problem::new(vec![ConstraintFn::affine(v(&[1.0, -1.0]), 0.0).unwrap()], d).unwrap();
        let t = log_transform(&pr, Some(2.0)).unwrap();
        // f = 0 at the uniform point maps to 1 - log e = 0.
        assert!(t.constraints()[0].evaluate(&v(&[0.5, 0.5])).unwrap().abs() < 1e-15);
        assert_eq!(t.params().g, pr.params().g / 2.0);
        assert_eq!(t.params().alpha, 1.0);
        assert!(matches!(log_transform(&pr, Some(0.5)), Err(Error::WidthTooSmall { .. })));
    }

    #[test]
    fn translation() {
        assert!((approx_translate(0.01, 1.0) - 0.03).abs() < 1e-15);
        assert!((log_eps_for(0.3, 1.0) - 0.1).abs() < 1e-15);
        assert_eq!(approx_translate(0.0, 5.0), 0.0);
    }
}
