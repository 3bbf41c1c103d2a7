//! Online convex optimization players.

mod mw;
mod ogd;
mod ons;
mod regret;

pub use mw::Mw;
pub use ogd::Ogd;
pub use ons::Ons;
pub use regret::{measured_regret, RegretBound};

use crate::error::Result;
use crate::linalg::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// A player that commits to a point, then observes the gradient of the
/// round's payoff at that point.
pub trait OnlineLearner {
    fn point(&self) -> &Vector;
    fn step(&mut self, grad: &Vector) -> Result<()>;
    fn regret_bound(&self) -> RegretBound;
}

pub(crate) fn check_grad(expected: usize, grad: &Vector) -> Result<()> {
    crate::error::check_dim("learner gradient", expected, grad.len())?;
    if !crate::linalg::all_finite(grad) {
        return Err(crate::error::Error::InvalidArgument("gradient must be finite".into()));
    }
    Ok(())
}
