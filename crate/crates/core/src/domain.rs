//! The simple convex bodies the learners play on.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{uniform, Vector};
use crate::projections::{project_ball, project_box, project_simplex};

#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// `{x : x >= 0, sum x = 1}` in `n` dimensions.
    Simplex { n: usize },
    /// Euclidean ball `‖x - center‖ <= radius`.
    Ball { radius: f64, center: Vector },
    /// Axis-aligned box `lo <= x <= hi`.
    Box { lo: Vector, hi: Vector },
}

impl Domain {
    pub fn simplex(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("simplex dimension must be >= 1".into()));
        }
        Ok(Domain::Simplex { n })
    }

    pub fn ball(radius: f64, center: Vector) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::InvalidArgument("ball dimension must be >= 1".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("ball radius must be > 0, got {radius}")));
        }
        if !crate::linalg::all_finite(&center) {
            return Err(Error::InvalidArgument("ball center must be finite".into()));
        }
        Ok(Domain::Ball { radius, center })
    }

    pub fn unit_ball(n: usize) -> Result<Self> {
        Self::ball(1.0, Vector::zeros(n))
    }

    pub fn cube(lo: Vector, hi: Vector) -> Result<Self> {
        check_dim("box bounds", lo.len(), hi.len())?;
        if lo.is_empty() {
            return Err(Error::InvalidArgument("box dimension must be >= 1".into()));
        }
        for i in 0..lo.len() {
            if !(lo[i].is_finite() && hi[i].is_finite()) || lo[i] > hi[i] {
                return Err(Error::InvalidArgument(format!(
                    "box bounds must satisfy lo <= hi, violated at coordinate {i}"
                )));
            }
        }
        Ok(Domain::Box { lo, hi })
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Simplex { n } => *n,
            Domain::Ball { center, .. } => center.len(),
            Domain::Box { lo, .. } => lo.len(),
        }
    }

    pub fn is_simplex(&self) -> bool {
        matches!(self, Domain::Simplex { .. })
    }

    /// Starting point of every learner: uniform, center, or midpoint.
    pub fn initial_point(&self) -> Vector {
        match self {
            Domain::Simplex { n } => uniform(*n),
            Domain::Ball { center, .. } => center.clone(),
            Domain::Box { lo, hi } => (lo + hi) * 0.5,
        }
    }

    pub fn project(&self, y: &Vector) -> Vector {
        match self {
            Domain::Simplex { .. } => project_simplex(y),
            Domain::Ball { radius, center } => project_ball(y, *radius, center),
            Domain::Box { lo, hi } => project_box(y, lo, hi),
        }
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        if x.len() != self.dim() || !crate::linalg::all_finite(x) {
            return false;
        }
        match self {
            Domain::Simplex { .. } => x.iter().all(|&v| v >= -tol) && (x.sum() - 1.0).abs() <= tol,
            Domain::Ball { radius, center } => (x - center).norm() <= radius + tol,
            Domain::Box { lo, hi } => (0..x.len()).all(|i| x[i] >= lo[i] - tol && x[i] <= hi[i] + tol),
        }
    }

    /// Euclidean diameter.
    pub fn diameter(&self) -> f64 {
        match self {
            Domain::Simplex { n } => {
                if *n == 1 {
                    0.0
                } else {
                    std::f64::consts::SQRT_2
                }
            }
            Domain::Ball { radius, .. } => 2.0 * radius,
            Domain::Box { lo, hi } => (hi - lo).norm(),
        }
    }

    pub fn bounding_box(&self) -> (Vector, Vector) {
        match self {
            Domain::Simplex { n } => (Vector::zeros(*n), Vector::from_element(*n, 1.0)),
            Domain::Ball { radius, center } => (center.add_scalar(-radius), center.add_scalar(*radius)),
            Domain::Box { lo, hi } => (lo.clone(), hi.clone()),
        }
    }

    /// `max ‖x - c‖` over the domain for an arbitrary point `c`.
    pub fn max_distance_from(&self, c: &Vector) -> f64 {
        match self {
            Domain::Simplex { n } => (0..*n)
                .map(|i| {
                    let mut d2 = c.norm_squared();
                    d2 += 1.0 - 2.0 * c[i];
                    d2.max(0.0).sqrt()
                })
                .fold(0.0, f64::max),
            Domain::Ball { radius, center } => (center - c).norm() + radius,
            Domain::Box { lo, hi } => (0..lo.len())
                .map(|i| {
                    let d = (lo[i] - c[i]).abs().max((hi[i] - c[i]).abs());
                    d * d
                })
                .sum::<f64>()
                .sqrt(),
        }
    }

    /// `argmin_{s in domain} <g, s>`; ties go to the lowest index.
    pub fn linear_minimizer(&self, g: &Vector) -> Vector {
        match self {
            Domain::Simplex { n } => {
                let i = argmin(g);
                crate::linalg::basis(*n, i)
            }
            Domain::Ball { radius, center } => {
                let norm = g.norm();
                if norm == 0.0 {
                    center.clone()
                } else {
                    center - g * (radius / norm)
                }
            }
            Domain::Box { lo, hi } => Vector::from_fn(lo.len(), |i, _| if g[i] > 0.0 { lo[i] } else { hi[i] }),
        }
    }

    /// Frank-Wolfe gap `max_s <g, x - s>`, summed in a cancellation-free
    /// form where the domain allows it.
    pub fn fw_gap(&self, g: &Vector, x: &Vector) -> f64 {
        let gap = match self {
            Domain::Simplex { .. } => {
                let gmin = g.min();
                x.iter().zip(g.iter()).map(|(xi, gi)| xi.max(0.0) * (gi - gmin)).sum()
            }
            Domain::Ball { .. } => g.dot(&(x - self.linear_minimizer(g))),
            Domain::Box { lo, hi } => {
                (0..x.len()).map(|i| if g[i] > 0.0 { g[i] * (x[i] - lo[i]) } else { g[i] * (x[i] - hi[i]) }).sum()
            }
        };
        gap.max(0.0)
    }

    /// Exact range of `a·x + b` over the domain.
    pub fn affine_range(&self, a: &Vector, b: f64) -> (f64, f64) {
        match self {
            Domain::Simplex { .. } => (a.min() + b, a.max() + b),
            Domain::Ball { radius, center } => {
                let mid = a.dot(center) + b;
                let half = radius * a.norm();
                (mid - half, mid + half)
            }
            Domain::Box { lo, hi } => {
                let mut low = b;
                let mut high = b;
                for i in 0..a.len() {
                    let (p, q) = (a[i] * lo[i], a[i] * hi[i]);
                    low += p.min(q);
                    high += p.max(q);
                }
                (low, high)
            }
        }
    }

    /// Random point of the domain (uniform for simplex and box, and for the
    /// ball up to the radial law `r u^(1/n)`).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vector {
        match self {
            Domain::Simplex { n } => {
                let e: Vec<f64> = (0..*n).map(|_| Exp1.sample(rng)).collect();
                let s: f64 = e.iter().sum();
                Vector::from_iterator(*n, e.into_iter().map(|v| v / s))
            }
            Domain::Ball { radius, center } => {
                let n = center.len();
                let g = Vector::from_fn(n, |_, _| StandardNormal.sample(rng));
                let norm = g.norm().max(f64::MIN_POSITIVE);
                let r = radius * rng.random::<f64>().powf(1.0 / n as f64);
                center + g * (r / norm)
            }
            Domain::Box { lo, hi } => Vector::from_fn(lo.len(), |i, _| lo[i] + (hi[i] - lo[i]) * rng.random::<f64>()),
        }
    }
}

pub(crate) fn argmin(v: &Vector) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i] < v[best] {
            best = i;
        }
    }
    best
}
