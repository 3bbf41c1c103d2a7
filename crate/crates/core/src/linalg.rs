//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Largest absolute asymmetry `|a_ij - a_ji|`.
pub fn asymmetry(a: &Matrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}

pub fn is_symmetric(a: &Matrix, tol: f64) -> bool {
    a.is_square() && asymmetry(a) <= tol * a.amax().max(1.0)
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn sym_eigenvalues(a: &Matrix) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(a.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn lambda_min(a: &Matrix) -> f64 {
    sym_eigenvalues(a).first().copied().unwrap_or(0.0)
}

pub fn lambda_max(a: &Matrix) -> f64 {
    sym_eigenvalues(a).last().copied().unwrap_or(0.0)
}

/// Spectral norm of a symmetric matrix.
pub fn sym_op_norm(a: &Matrix) -> f64 {
    let ev = sym_eigenvalues(a);
    match (ev.first(), ev.last()) {
        (Some(lo), Some(hi)) => lo.abs().max(hi.abs()),
        _ => 0.0,
    }
}

pub fn uniform(n: usize) -> Vector {
    Vector::from_element(n, 1.0 / n as f64)
}

pub fn basis(n: usize, i: usize) -> Vector {
    let mut e = Vector::zeros(n);
    e[i] = 1.0;
    e
}

pub fn all_finite(v: &Vector) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Inverse of a symmetric positive definite matrix via Cholesky, falling
/// back to LU when the factorization fails numerically.
pub fn spd_inverse(a: &Matrix) -> Option<Matrix> {
    match a.clone().cholesky() {
        Some(ch) => Some(ch.inverse()),
        None => a.clone().try_inverse(),
    }
}

/// `max_ij |(A B - I)_ij|`.
pub fn inverse_deviation(a: &Matrix, b: &Matrix) -> f64 {
    let n = a.nrows();
    (a * b - Matrix::identity(n, n)).amax()
}

/// Least-squares slope and RMS residual of `y` against `x`.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let r = b - (intercept + slope * a);
            r * r
        })
        .sum();
    (slope, intercept, (rss / k).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_sorted() {
        let a = Matrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let ev = sym_eigenvalues(&a);
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12);
        assert!((sym_op_norm(&a) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn line_fit_exact() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let (s, b, r) = fit_line(&x, &y);
        assert!((s - 2.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12 && r < 1e-12);
    }

    #[test]
    fn asymmetry_detects() {
        let a = Matrix::from_row_slice(2, 2, &[1.0, 0.5, 0.501, 1.0]);
        assert!(!is_symmetric(&a, 1e-12));
        assert!((asymmetry(&a) - 0.001).abs() < 1e-12);
    }
}
