use super::{check_grad, OnlineLearner, RegretBound, Sense};
use crate::error::{Error, Result};
use crate::linalg::Vector;

/// Multiplicative weights on the simplex.
///
/// Minimizing players scale weight `i` by `1 - η ∇_i / G∞`, maximizing ones
/// by `1 + η ∇_i / G∞`. Weights are kept as logarithms so long runs neither
/// underflow nor overflow.
#[derive(Debug, Clone)]
pub struct Mw {
    log_w: Vector,
    x: Vector,
    eta: f64,
    g_inf: f64,
    sense: Sense,
    rescales: u64,
}

impl Mw {
    pub fn new(n: usize, eta: f64, g_inf: f64, sense: Sense) -> Result<Self> {
        Self::with_weights(Vector::from_element(n, 1.0), eta, g_inf, sense)
    }

    /// Learning rate `√(ln n / T)` for horizon `T`, capped at ½.
    pub fn for_horizon(n: usize, horizon: u64, g_inf: f64, sense: Sense) -> Result<Self> {
        Self::new(n, Self::horizon_eta(n, horizon), g_inf, sense)
    }

    pub fn horizon_eta(n: usize, horizon: u64) -> f64 {
        ((n as f64).ln() / horizon.max(1) as f64).sqrt().min(0.5)
    }

    pub fn with_weights(w: Vector, eta: f64, g_inf: f64, sense: Sense) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::InvalidArgument("weights need n >= 1".into()));
        }
        if w.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument("weights must be positive".into()));
        }
        if !(0.0..=0.5).contains(&eta) {
            return Err(Error::InvalidArgument(format!("learning rate must lie in [0, 1/2], got {eta}")));
        }
        if !(g_inf > 0.0 && g_inf.is_finite()) {
            return Err(Error::InvalidArgument(format!("G_inf must be > 0, got {g_inf}")));
        }
        let mut mw = Mw { log_w: w.map(f64::ln), x: w.clone(), eta, g_inf, sense, rescales: 0 };
        mw.refresh();
        Ok(mw)
    }

    fn refresh(&mut self) {
        let top = self.log_w.max();
        self.log_w.add_scalar_mut(-top);
        let w = self.log_w.map(f64::exp);
        self.x = &w / w.sum();
    }

    /// Weights scaled so the largest equals one.
    pub fn weights(&self) -> Vector {
        self.log_w.map(f64::exp)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn g_inf(&self) -> f64 {
        self.g_inf
    }

    /// How many times a gradient exceeded `G∞` and the scale was raised.
    pub fn rescales(&self) -> u64 {
        self.rescales
    }
}

impl OnlineLearner for Mw {
    fn point(&self) -> &Vector {
        &self.x
    }

    fn step(&mut self, grad: &Vector) -> Result<()> {
        check_grad(self.x.len(), grad)?;
        let gmax = grad.amax();
        if gmax > self.g_inf {
            self.g_inf = gmax;
            self.rescales += 1;
        }
        let s = match self.sense {
            Sense::Minimize => -1.0,
            Sense::Maximize => 1.0,
        };
        let k = s * self.eta / self.g_inf;
        for i in 0..grad.len() {
            self.log_w[i] += (k * grad[i]).ln_1p();
        }
        self.refresh();
        Ok(())
    }

    fn regret_bound(&self) -> RegretBound {
        RegretBound::Mw { g_inf: self.g_inf, n: self.x.len() }
    }
}
