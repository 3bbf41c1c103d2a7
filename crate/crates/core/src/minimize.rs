//! Projected first-order minimization of a smooth convex function over a
//! [`Domain`], with a Frank-Wolfe duality gap as the stopping certificate.
//!
//! For convex `f` and any iterate `x`, `f(x) - max_s <∇f(x), x - s>` is a
//! lower bound on `min f` over the domain. The best such bound seen so far
//! is carried along, so callers can stop as soon as the sign of the minimum
//! is decided.

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::linalg::Vector;

#[derive(Debug, Clone)]
pub struct MinimizeOptions {
    pub max_iters: usize,
    /// Stop once the duality gap is at most this.
    pub gap_tol: f64,
    /// Initial Lipschitz constant of the gradient; backtracking adapts it.
    pub lipschitz: Option<f64>,
    /// Stop as soon as `f(x) <= stop_below`.
    pub stop_below: Option<f64>,
    /// Stop as soon as the certified lower bound exceeds this.
    pub stop_lower_above: Option<f64>,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            max_iters: 100_000,
            gap_tol: 1e-10,
            lipschitz: None,
            stop_below: None,
            stop_lower_above: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vector,
    pub value: f64,
    /// Certified lower bound on the minimum (valid for convex objectives).
    pub lower_bound: f64,
    pub gap: f64,
    pub iterations: usize,
}

/// Minimizes `f` (returning value and gradient) starting from `x0`.
pub fn minimize<F>(mut f: F, domain: &Domain, x0: &Vector, opts: &MinimizeOptions) -> Result<Minimum>
where
    F: FnMut(&Vector) -> Result<(f64, Vector)>,
{
    let mut x = domain.project(x0);
    let (mut fx, mut gx) = f(&x)?;
    let mut x_prev = x.clone();
    let mut t = 1.0_f64;
    let mut lip = opts.lipschitz.filter(|l| *l > 0.0 && l.is_finite()).unwrap_or(1.0);
    let mut lower = f64::NEG_INFINITY;

    for k in 0..=opts.max_iters {
        let gap = domain.fw_gap(&gx, &x);
        lower = lower.max(fx - gap);

        let done = opts.stop_below.is_some_and(|v| fx <= v)
            || opts.stop_lower_above.is_some_and(|v| lower > v)
            || gap <= opts.gap_tol;
        if done {
            return Ok(Minimum { x, value: fx, lower_bound: lower, gap, iterations: k });
        }
        if k == opts.max_iters {
            break;
        }

        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        let momentum = if beta > 0.0 {
            let y = domain.project(&(&x + (&x - &x_prev) * beta));
            match f(&y) {
                Ok((fy, gy)) => Some((y, fy, gy)),
                Err(Error::Domain(_)) => None,
                Err(e) => return Err(e),
            }
        } else {
            None
        };
        let used_momentum = momentum.is_some();
        let (y, fy, gy) = momentum.unwrap_or_else(|| (x.clone(), fx, gx.clone()));

        // Backtracking on the quadratic upper model at y.
        let (x_new, f_new, g_new) = loop {
            let cand = domain.project(&(&y - &gy / lip));
            // Points outside a barrier's domain count as +inf: shrink the step.
            match f(&cand) {
                Ok((fc, gc)) => {
                    let d = &cand - &y;
                    let model = fy + gy.dot(&d) + 0.5 * lip * d.norm_squared();
                    if fc <= model + 1e-12 * (1.0 + fy.abs()) {
                        break (cand, fc, gc);
                    }
                }
                Err(Error::Domain(_)) => {}
                Err(e) => return Err(e),
            }
            lip *= 2.0;
            if !lip.is_finite() {
                return Err(Error::NonConvergence { what: "backtracking line search", iterations: k });
            }
        };

        // A plain projected step (no momentum) is always kept: near the
        // optimum its decrease drowns in rounding while the gap still shrinks.
        if f_new <= fx || !used_momentum {
            x_prev = std::mem::replace(&mut x, x_new);
            fx = f_new;
            gx = g_new;
            t = t_next;
        } else {
            // Momentum overshot: restart from the current iterate.
            x_prev = x.clone();
            t = 1.0;
        }
        lip *= 0.9;
    }
    Err(Error::NonConvergence { what: "projected gradient minimizer", iterations: opts.max_iters })
}
