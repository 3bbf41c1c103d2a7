//! Brute-force grid oracles for domains of dimension at most three.

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::problem::{check_distribution, Problem};

/// Refuses grids larger than this many points.
pub const MAX_GRID_POINTS: usize = 50_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct GridMin {
    pub value: f64,
    pub argmin: Vector,
    /// `spacing·√n · (largest gradient norm seen)`: the true minimum over
    /// the domain is at least `value - slack` for Lipschitz objectives.
    pub slack: f64,
    pub points: usize,
}

impl GridMin {
    pub fn lower(&self) -> f64 {
        self.value - self.slack
    }
}

/// Calls `visit` on every grid point of the domain with spacing
/// `resolution` (on the simplex, `1/resolution` is rounded to the nearest
/// integer number of steps).
pub fn for_each_grid_point<F: FnMut(&Vector) -> Result<()>>(
    domain: &Domain,
    resolution: f64,
    mut visit: F,
) -> Result<usize> {
    let n = domain.dim();
    if n > 3 {
        return Err(Error::GridTooLarge(n));
    }
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::InvalidArgument(format!("grid resolution must be > 0, got {resolution}")));
    }
    let mut count = 0usize;
    match domain {
        Domain::Simplex { .. } => {
            let k = (1.0 / resolution).round().max(1.0) as usize;
            let total = match n {
                1 => 1,
                2 => k + 1,
                _ => (k + 1) * (k + 2) / 2,
            };
            if total > MAX_GRID_POINTS {
                return Err(Error::InvalidArgument(format!("grid of {total} points is too large")));
            }
            let kf = k as f64;
            let mut x = Vector::zeros(n);
            match n {
                1 => {
                    x[0] = 1.0;
                    visit(&x)?;
                    count = 1;
                }
                2 => {
                    for i in 0..=k {
                        x[0] = i as f64 / kf;
                        x[1] = (k - i) as f64 / kf;
                        visit(&x)?;
                        count += 1;
                    }
                }
                _ => {
                    for i in 0..=k {
                        for j in 0..=(k - i) {
                            x[0] = i as f64 / kf;
                            x[1] = j as f64 / kf;
                            x[2] = (k - i - j) as f64 / kf;
                            visit(&x)?;
                            count += 1;
                        }
                    }
                }
            }
        }
        _ => {
            let (lo, hi) = domain.bounding_box();
            let steps: Vec<usize> = (0..n).map(|i| ((hi[i] - lo[i]) / resolution).ceil().max(0.0) as usize).collect();
            let total: usize = steps.iter().map(|s| s + 1).product();
            if total > MAX_GRID_POINTS {
                return Err(Error::InvalidArgument(format!("grid of {total} points is too large")));
            }
            let coord = |i: usize, k: usize| {
                if steps[i] == 0 {
                    lo[i]
                } else {
                    lo[i] + (hi[i] - lo[i]) * k as f64 / steps[i] as f64
                }
            };
            let mut idx = vec![0usize; n];
            let mut x = Vector::zeros(n);
            loop {
                for i in 0..n {
                    x[i] = coord(i, idx[i]);
                }
                if domain.contains(&x, 0.0) {
                    visit(&x)?;
                    count += 1;
                }
                let mut d = 0;
                loop {
                    if d == n {
                        return Ok(count);
                    }
                    idx[d] += 1;
                    if idx[d] <= steps[d] {
                        break;
                    }
                    idx[d] = 0;
                    d += 1;
                }
            }
        }
    }
    Ok(count)
}

/// Spacing actually used by [`for_each_grid_point`].
fn spacing(domain: &Domain, resolution: f64) -> f64 {
    match domain {
        Domain::Simplex { .. } => 1.0 / (1.0 / resolution).round().max(1.0),
        _ => {
            let (lo, hi) = domain.bounding_box();
            (0..lo.len())
                .map(|i| {
                    let steps = ((hi[i] - lo[i]) / resolution).ceil().max(1.0);
                    (hi[i] - lo[i]) / steps
                })
                .fold(0.0, f64::max)
        }
    }
}

/// Minimizes `f` over the grid; `f` returns a value and a local gradient
/// norm. Points where `f` reports a domain error count as `+inf`.
pub fn grid_minimize<F: FnMut(&Vector) -> Result<(f64, f64)>>(
    domain: &Domain,
    resolution: f64,
    mut f: F,
) -> Result<GridMin> {
    let mut best = f64::INFINITY;
    let mut arg = domain.initial_point();
    let mut max_grad: f64 = 0.0;
    let points = for_each_grid_point(domain, resolution, |x| {
        match f(x) {
            Ok((v, gn)) => {
                max_grad = max_grad.max(gn);
                if v < best {
                    best = v;
                    arg.copy_from(x);
                }
            }
            Err(Error::Domain(_)) => {}
            Err(e) => return Err(e),
        }
        Ok(())
    })?;
    let n = domain.dim() as f64;
    Ok(GridMin { value: best, argmin: arg, slack: spacing(domain, resolution) * n.sqrt() * max_grad, points })
}

/// `λ* = min_x max_j f_j(x)` over the grid.
pub fn brute_force_lambda_star(problem: &Problem, resolution: f64) -> Result<GridMin> {
    grid_minimize(problem.domain(), resolution, |x| {
        let mut worst = f64::NEG_INFINITY;
        let mut gn: f64 = 0.0;
        for f in problem.constraints() {
            let (v, g) = f.value_and_gradient(x)?;
            worst = worst.max(v);
            gn = gn.max(g.norm());
        }
        Ok((worst, gn))
    })
}

/// `min_x g(x, p)` over the grid.
pub fn grid_game_min(problem: &Problem, p: &Vector, resolution: f64) -> Result<GridMin> {
    check_distribution(p, problem.m())?;
    grid_minimize(problem.domain(), resolution, |x| {
        let (v, g) = crate::problem::game_value_grad(problem, x, p)?;
        Ok((v, g.norm()))
    })
}
