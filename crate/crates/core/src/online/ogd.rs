use super::{check_grad, OnlineLearner, RegretBound};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::linalg::Vector;

/// Projected gradient descent with step `1/(H t)` for `H`-strongly convex
/// losses.
#[derive(Debug, Clone)]
pub struct Ogd {
    x: Vector,
    t: u64,
    h: f64,
    g: f64,
    domain: Domain,
}

impl Ogd {
    /// Starts at the domain's initial point with `t = 1`. `g` only enters
    /// the regret bound.
    pub fn new(domain: Domain, h: f64, g: f64) -> Result<Self> {
        let x = domain.initial_point();
        Self::with_state(domain, x, 1, h, g)
    }

    pub fn with_state(domain: Domain, x: Vector, t: u64, h: f64, g: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::LearnerMismatch(format!(
                "gradient descent needs strongly convex losses (H > 0), got H = {h}"
            )));
        }
        if t == 0 {
            return Err(Error::InvalidArgument("step counter starts at 1".into()));
        }
        if !domain.contains(&x, 1e-9) {
            return Err(Error::InvalidArgument("initial point outside the domain".into()));
        }
        Ok(Ogd { x, t, h, g, domain })
    }

    pub fn t(&self) -> u64 {
        self.t
    }
}

impl OnlineLearner for Ogd {
    fn point(&self) -> &Vector {
        &self.x
    }

    fn step(&mut self, grad: &Vector) -> Result<()> {
        check_grad(self.x.len(), grad)?;
        let y = &self.x - grad / (self.h * self.t as f64);
        self.x = self.domain.project(&y);
        self.t += 1;
        Ok(())
    }

    fn regret_bound(&self) -> RegretBound {
        RegretBound::Ogd { g: self.g, h: self.h }
    }
}
