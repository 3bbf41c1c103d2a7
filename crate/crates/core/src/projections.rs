//! Euclidean projections onto the simplex, ball and box, and projections in
//! the norm induced by a PSD matrix.

use crate::domain::Domain;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{lambda_max, sym_eigenvalues, Matrix, Vector};
use crate::minimize::{minimize, MinimizeOptions};

/// Threshold `a` with `sum_i max(y_i - a, 0) = 1`.
///
/// Sort descending and scan prefix sums: the support of the projection is
/// the longest prefix whose entries all stay above the running threshold.
pub fn simplex_threshold(y: &Vector) -> f64 {
    let mut sorted: Vec<f64> = y.iter().copied().collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut threshold = sorted[0] - 1.0;
    for (k, &v) in sorted.iter().enumerate() {
        cum += v;
        let t = (cum - 1.0) / (k + 1) as f64;
        if v > t {
            threshold = t;
        } else {
            break;
        }
    }
    threshold
}

pub fn project_simplex(y: &Vector) -> Vector {
    let a = simplex_threshold(y);
    y.map(|v| (v - a).max(0.0))
}

pub fn project_ball(y: &Vector, radius: f64, center: &Vector) -> Vector {
    let d = y - center;
    let norm = d.norm();
    if norm <= radius {
        y.clone()
    } else {
        center + d * (radius / norm)
    }
}

pub fn project_box(y: &Vector, lo: &Vector, hi: &Vector) -> Vector {
    Vector::from_fn(y.len(), |i, _| y[i].clamp(lo[i], hi[i]))
}

/// Symmetric positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdMatrix(Matrix);

impl PsdMatrix {
    pub fn new(a: Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::InvalidArgument("PSD matrix must be square".into()));
        }
        if !crate::linalg::is_symmetric(&a, 1e-12) {
            return Err(Error::InvalidArgument("PSD matrix must be symmetric".into()));
        }
        let lo = sym_eigenvalues(&a).first().copied().unwrap_or(0.0);
        if lo < -1e-10 * a.amax().max(1.0) {
            return Err(Error::InvalidArgument(format!("matrix is not positive semidefinite (eigenvalue {lo})")));
        }
        Ok(PsdMatrix(a))
    }

    pub fn identity(n: usize) -> Self {
        PsdMatrix(Matrix::identity(n, n))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_inner(self) -> Matrix {
        self.0
    }
}

/// `argmin_{x in domain} (x - y)^T A (x - y)` to within `tol` in objective.
///
/// When `A` is singular the minimizer need not be unique; any minimizer is
/// returned.
pub fn generalized_project(y: &Vector, a: &PsdMatrix, domain: &Domain, tol: f64) -> Result<Vector> {
    check_dim("generalized projection", domain.dim(), y.len())?;
    check_dim("generalized projection matrix", y.len(), a.0.nrows())?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("projection tolerance must be > 0".into()));
    }
    let start = domain.project(y);
    let lmax = lambda_max(&a.0);
    if lmax <= 0.0 {
        return Ok(start);
    }
    let m = &a.0;
    let opts = MinimizeOptions { gap_tol: tol, lipschitz: Some(2.0 * lmax), ..Default::default() };
    let res = minimize(
        |x| {
            let d = x - y;
            let ad = m * &d;
            Ok((d.dot(&ad), ad * 2.0))
        },
        domain,
        &start,
        &opts,
    )?;
    Ok(res.x)
}
