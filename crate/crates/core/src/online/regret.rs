use crate::constraint::ConstraintFn;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::linalg::{lambda_max, Matrix, Vector};
use crate::minimize::{minimize, MinimizeOptions};

/// Regret bounds with fixed leading constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegretBound {
    /// `(G²/H) ln(T+1)`
    Ogd { g: f64, h: f64 },
    /// `5 (1/α + G D) n ln(T+1)`
    Ons { alpha: f64, g: f64, d: f64, n: usize },
    /// `2 G∞ √(T ln n)`
    Mw { g_inf: f64, n: usize },
}

impl RegretBound {
    pub fn eval(&self, t: u64) -> f64 {
        let t = t as f64;
        match *self {
            RegretBound::Ogd { g, h } => g * g / h * (t + 1.0).ln(),
            RegretBound::Ons { alpha, g, d, n } => 5.0 * (1.0 / alpha + g * d) * n as f64 * (t + 1.0).ln(),
            RegretBound::Mw { g_inf, n } => 2.0 * g_inf * (t * (n as f64).ln()).sqrt(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RegretBound::Ogd { .. } => "ogd",
            RegretBound::Ons { .. } => "ons",
            RegretBound::Mw { .. } => "mw",
        }
    }
}

/// `Σ f_t(x_t) - min_x Σ f_t(x)`.
///
/// The hindsight minimum is exact for linear costs and otherwise computed to
/// a duality gap of 1e-9 per round.
pub fn measured_regret(costs: &[ConstraintFn], plays: &[Vector], domain: &Domain) -> Result<f64> {
    if costs.len() != plays.len() {
        return Err(Error::DimensionMismatch {
            context: "regret histories",
            expected: costs.len(),
            found: plays.len(),
        });
    }
    if costs.is_empty() {
        return Ok(0.0);
    }
    let mut online = 0.0;
    for (f, x) in costs.iter().zip(plays) {
        online += f.evaluate(x)?;
    }
    Ok(online - hindsight_min(costs, domain)?)
}

fn hindsight_min(costs: &[ConstraintFn], domain: &Domain) -> Result<f64> {
    let n = domain.dim();
    let mut quad = Some((Matrix::zeros(n, n), Vector::zeros(n), 0.0));
    for f in costs {
        quad = match (quad, f.as_quadratic()) {
            (Some(mut acc), Some((a, b, c))) => {
                acc.0 += a;
                acc.1 += b;
                acc.2 += c;
                Some(acc)
            }
            _ => None,
        };
    }
    // The summed objective grows with the horizon, so the gap does too.
    let opts = MinimizeOptions { gap_tol: 1e-9 * costs.len().max(1) as f64, ..Default::default() };
    let x0 = domain.initial_point();
    let res = match quad {
        Some((a, b, c)) if a.amax() == 0.0 => {
            let s = domain.linear_minimizer(&b);
            return Ok(b.dot(&s) + c);
        }
        Some((a, b, c)) => {
            let opts = MinimizeOptions { lipschitz: Some(2.0 * lambda_max(&a)), ..opts };
            minimize(|x| Ok((x.dot(&(&a * x)) + b.dot(x) + c, &a * x * 2.0 + &b)), domain, &x0, &opts)?
        }
        None => minimize(
            |x| {
                let mut v = 0.0;
                let mut g = Vector::zeros(n);
                for f in costs {
                    let (fv, fg) = f.value_and_gradient(x)?;
                    v += fv;
                    g += fg;
                }
                Ok((v, g))
            },
            domain,
            &x0,
            &opts,
        )?,
    };
    Ok(res.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_values() {
        assert!((RegretBound::Ogd { g: 1.0, h: 1.0 }.eval(1) - 2f64.ln()).abs() < 1e-15);
        let mw = RegretBound::Mw { g_inf: 1.0, n: 2 }.eval(100);
        assert!((mw - 16.651_092_223_153_956).abs() < 1e-9);
        let ons = RegretBound::Ons { alpha: 1.0, g: 1.0, d: 1.0, n: 2 };
        assert!((ons.eval(1) - 20.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn single_round_regret() {
        let d = Domain::simplex(2).unwrap();
        let f = ConstraintFn::norm_dist_sq(Vector::zeros(2), 0.0).unwrap();
        let r = measured_regret(&[f], &[Vector::from_vec(vec![1.0, 0.0])], &d).unwrap();
        assert!((r - 0.5).abs() < 1e-9);
    }

    #[test]
    fn playing_the_optimum_has_zero_regret() {
        let d = Domain::simplex(3).unwrap();
        let f = ConstraintFn::affine(Vector::from_vec(vec![0.3, -0.2, 0.1]), 0.0).unwrap();
        let plays = vec![Vector::from_vec(vec![0.0, 1.0, 0.0]); 5];
        assert_eq!(measured_regret(&vec![f; 5], &plays, &d).unwrap(), 0.0);
        assert_eq!(measured_regret(&[], &[], &d).unwrap(), 0.0);
    }
}
