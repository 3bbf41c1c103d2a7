use super::{check_grad, OnlineLearner, RegretBound, Sense};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::linalg::{inverse_deviation, spd_inverse, Matrix, Vector};
use crate::projections::{generalized_project, PsdMatrix};

/// How often the inverse pair is checked for drift.
const DRIFT_CHECK_EVERY: u64 = 64;
const DRIFT_TOL: f64 = 1e-6;
const PROJECTION_TOL: f64 = 1e-10;

/// Online Newton step.
///
/// Each round moves along `A⁻¹∇/β` and projects in the norm of the current
/// `A`, then adds `∇∇ᵀ` to `A` and updates the inverse by Sherman-Morrison.
#[derive(Debug, Clone)]
pub struct Ons {
    x: Vector,
    t: u64,
    beta: f64,
    a: Matrix,
    a_inv: Matrix,
    g: f64,
    d: f64,
    alpha: f64,
    domain: Domain,
    sense: Sense,
    rebuilds: u64,
}

impl Ons {
    /// `β = ½ min{α, 1/(4GD)}` and `A₀ = I/(D²β²)`.
    pub fn new(domain: Domain, g: f64, d: f64, alpha: f64, sense: Sense) -> Result<Self> {
        for (name, v) in [("G", g), ("D", d)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::LearnerMismatch(format!(
                "online Newton step needs exp-concave losses (alpha > 0), got alpha = {alpha}"
            )));
        }
        let beta = 0.5 * alpha.min(1.0 / (4.0 * g * d));
        let n = domain.dim();
        let s = d * d * beta * beta;
        Ok(Ons {
            x: domain.initial_point(),
            t: 1,
            beta,
            a: Matrix::identity(n, n) / s,
            a_inv: Matrix::identity(n, n) * s,
            g,
            d,
            alpha,
            domain,
            sense,
            rebuilds: 0,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn inverse(&self) -> &Matrix {
        &self.a_inv
    }

    /// Number of times the inverse was recomputed from scratch.
    pub fn rebuilds(&self) -> u64 {
        self.rebuilds
    }

    /// Rank-one update `A += ∇∇ᵀ` with the matching inverse update.
    pub fn rank_one_update(&mut self, grad: &Vector) {
        let u = &self.a_inv * grad;
        let denom = 1.0 + grad.dot(&u);
        self.a.ger(1.0, grad, grad, 1.0);
        self.a_inv.ger(-1.0 / denom, &u, &u, 1.0);
        self.t += 1;
        if self.t.is_multiple_of(DRIFT_CHECK_EVERY) && inverse_deviation(&self.a, &self.a_inv) > DRIFT_TOL {
            if let Some(inv) = spd_inverse(&self.a) {
                self.a_inv = inv;
                self.rebuilds += 1;
            }
        }
    }
}

impl OnlineLearner for Ons {
    fn point(&self) -> &Vector {
        &self.x
    }

    fn step(&mut self, grad: &Vector) -> Result<()> {
        check_grad(self.x.len(), grad)?;
        let dir = &self.a_inv * grad / self.beta;
        let y = match self.sense {
            Sense::Maximize => &self.x + dir,
            Sense::Minimize => &self.x - dir,
        };
        if !self.domain.contains(&y, 0.0) {
            // Scaling A leaves the minimizer unchanged and keeps the
            // inner solver's tolerance meaningful as A grows.
            let n = self.a.nrows() as f64;
            let scaled = &self.a * (n / self.a.trace());
            let m = PsdMatrix::new((&scaled + scaled.transpose()) * 0.5)?;
            self.x = generalized_project(&y, &m, &self.domain, PROJECTION_TOL)?;
        } else {
            self.x = y;
        }
        self.rank_one_update(grad);
        Ok(())
    }

    fn regret_bound(&self) -> RegretBound {
        RegretBound::Ons { alpha: self.alpha, g: self.g, d: self.d, n: self.x.len() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initialization_matches_formulas() {
        let o = Ons::new(Domain::simplex(3).unwrap(), 1.0, 1.0, 1.0, Sense::Maximize).unwrap();
        assert_eq!(o.beta(), 0.125);
        assert_eq!(o.matrix(), &(Matrix::identity(3, 3) * 64.0));
        assert_eq!(o.inverse(), &(Matrix::identity(3, 3) / 64.0));
    }

    #[test]
    fn one_dimensional_sherman_morrison() {
        let d = Domain::cube(Vector::from_vec(vec![-1.0]), Vector::from_vec(vec![1.0])).unwrap();
        let mut o = Ons::new(d, 1.0, 1.0, 1.0, Sense::Minimize).unwrap();
        o.a = Matrix::from_element(1, 1, 1.0);
        o.a_inv = Matrix::from_element(1, 1, 1.0);
        o.rank_one_update(&Vector::from_vec(vec![1.0]));
        assert_eq!(o.a[(0, 0)], 2.0);
        assert_eq!(o.a_inv[(0, 0)], 0.5);
    }

    #[test]
    fn stays_on_simplex_both_senses() {
        for sense in [Sense::Minimize, Sense::Maximize] {
            let mut o = Ons::new(Domain::simplex(4).unwrap(), 1.0, 2f64.sqrt(), 1.0, sense).unwrap();
            for k in 0..50 {
                let g = Vector::from_fn(4, |i, _| ((i * 7 + k * 3) % 5) as f64 / 5.0 - 0.4);
                o.step(&g).unwrap();
                assert!(o.domain.contains(o.point(), 1e-9));
            }
        }
    }

    #[test]
    fn rejects_zero_alpha() {
        assert!(matches!(
            Ons::new(Domain::simplex(2).unwrap(), 1.0, 1.0, 0.0, Sense::Minimize),
            Err(Error::LearnerMismatch(_))
        ));
    }
}
