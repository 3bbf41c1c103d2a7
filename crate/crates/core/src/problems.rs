//! Seeded instance generators. The same arguments always give bit-identical
//! problems.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::constraint::ConstraintFn;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::minimize::{minimize, MinimizeOptions};
use crate::problem::Problem;

/// Witness slack of feasible strict QPs.
pub const QP_WITNESS_SLACK: f64 = 0.1;
/// Certified game value of infeasible strict QPs.
pub const QP_INFEASIBLE_MARGIN: f64 = 0.25;
/// Slack of the uniform portfolio in portfolio instances.
pub const PORTFOLIO_SLACK: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedProblem {
    pub problem: Problem,
    /// A point satisfying every constraint, when one was planted.
    pub witness: Option<Vector>,
    /// A distribution certifying infeasibility, when one was planted.
    pub dual_hint: Option<Vector>,
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn check_sizes(n: usize, m: usize) -> Result<()> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument(format!("need n, m >= 1, got n = {n}, m = {m}")));
    }
    Ok(())
}

/// Haar-like orthogonal matrix from the QR factorization of a Gaussian one.
fn random_orthogonal<R: Rng>(n: usize, rng: &mut R) -> Matrix {
    let g = Matrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// `Q diag(spectrum) Qᵀ`, symmetrized exactly.
fn with_spectrum<R: Rng>(spectrum: &[f64], rng: &mut R) -> Matrix {
    let n = spectrum.len();
    let q = random_orthogonal(n, rng);
    let d = Matrix::from_diagonal(&Vector::from_column_slice(spectrum));
    let a = &q * d * q.transpose();
    (&a + a.transpose()) * 0.5
}

fn uniform_vec<R: Rng>(n: usize, lo: f64, hi: f64, rng: &mut R) -> Vector {
    Vector::from_fn(n, |_, _| rng.random_range(lo..hi))
}

fn quad_value(a: &Matrix, b: &Vector, c: f64, x: &Vector) -> f64 {
    x.dot(&(a * x)) + b.dot(x) + c
}

/// `m` quadratics `xᵀA_jx + b_jᵀx + c_j` on `Simplex(n)` with the spectrum
/// of each `A_j` drawn from `[h, 3h]`.
///
/// Feasible instances plant a witness with every `f_j <= -0.1`. Infeasible
/// ones shift all constants so that `min_x g(x, p̂) >= 0.25` for a planted
/// distribution `p̂`.
pub fn make_strict_qp(n: usize, m: usize, h: f64, feasible: bool, seed: u64) -> Result<GeneratedProblem> {
    check_sizes(n, m)?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("curvature must be > 0, got {h}")));
    }
    let mut rng = rng(seed);
    let domain = Domain::simplex(n)?;
    let mut parts: Vec<(Matrix, Vector, f64)> = (0..m)
        .map(|_| {
            let spectrum: Vec<f64> = (0..n).map(|_| rng.random_range(h..=3.0 * h)).collect();
            let a = with_spectrum(&spectrum, &mut rng);
            let b = uniform_vec(n, -1.0, 1.0, &mut rng);
            (a, b, 0.0)
        })
        .collect();
    let (witness, dual_hint) = if feasible {
        let x = domain.sample(&mut rng);
        for (a, b, c) in parts.iter_mut() {
            let extra: f64 = rng.random_range(0.0..0.5);
            *c = -quad_value(a, b, 0.0, &x) - QP_WITNESS_SLACK - extra;
        }
        (Some(x), None)
    } else {
        for part in parts.iter_mut() {
            part.2 = rng.random_range(-0.5..0.5);
        }
        let p = Domain::simplex(m)?.sample(&mut rng);
        let mut qa = Matrix::zeros(n, n);
        let mut qb = Vector::zeros(n);
        let mut qc = 0.0;
        for (j, (a, b, c)) in parts.iter().enumerate() {
            qa += a * p[j];
            qb += b * p[j];
            qc += p[j] * c;
        }
        let lip = 2.0 * crate::linalg::lambda_max(&qa);
        let res = minimize(
            |x| Ok((quad_value(&qa, &qb, qc, x), &qa * x * 2.0 + &qb)),
            &domain,
            &domain.initial_point(),
            &MinimizeOptions { gap_tol: 1e-9, lipschitz: Some(lip), ..Default::default() },
        )?;
        let shift = QP_INFEASIBLE_MARGIN - res.lower_bound;
        for part in parts.iter_mut() {
            part.2 += shift;
        }
        (None, Some(p))
    };
    let constraints =
        parts.into_iter().map(|(a, b, c)| ConstraintFn::quadratic(a, b, c)).collect::<Result<Vec<_>>>()?;
    Ok(GeneratedProblem { problem: Problem::new(constraints, domain)?, witness, dual_hint })
}

fn unit_row<R: Rng>(n: usize, rng: &mut R) -> Vector {
    loop {
        let v = Vector::from_fn(n, |_, _| StandardNormal.sample(rng));
        let norm = v.norm();
        if norm > 1e-8 {
            return v / norm;
        }
    }
}

/// Perceptron-format LP `A_j·x >= 0` on `Simplex(n)` with unit rows, stored
/// as `-A_j·x <= 0`.
///
/// Feasible instances plant `x*` with `A_j·x* >= margin`: rows that miss
/// the margin are tilted toward `x*` by doubling `τ` in
/// `normalize(a + τx*)`, which approaches `x*/‖x*‖`, so the margin must be
/// below `‖x*‖`. Infeasible instances alternate `-d` and `+d` for a fixed
/// positive direction `d`.
pub fn make_perceptron_lp(n: usize, m: usize, margin: f64, feasible: bool, seed: u64) -> Result<GeneratedProblem> {
    check_sizes(n, m)?;
    let mut rng = rng(seed);
    let domain = Domain::simplex(n)?;
    let mut rows = Vec::with_capacity(m);
    let (witness, dual_hint) = if feasible {
        if !(margin >= 0.0 && margin.is_finite()) {
            return Err(Error::InvalidArgument(format!("margin must be >= 0, got {margin}")));
        }
        let x = domain.sample(&mut rng);
        if margin >= x.norm() {
            return Err(Error::InvalidArgument(format!(
                "margin {margin} cannot be planted: the witness has norm {}",
                x.norm()
            )));
        }
        for _ in 0..m {
            let a = unit_row(n, &mut rng);
            let mut row = a.clone();
            let mut tau = 1.0;
            while row.dot(&x) < margin {
                row = &a + &x * tau;
                row /= row.norm();
                tau *= 2.0;
            }
            rows.push(row);
        }
        (Some(x), None)
    } else {
        let d = uniform_vec(n, 0.5, 1.0, &mut rng);
        let d = &d / d.norm();
        for j in 0..m {
            rows.push(if j % 2 == 0 { -&d } else { d.clone() });
        }
        let hint = Vector::from_fn(m, |j, _| if j == 0 { 1.0 } else { 0.0 });
        (None, Some(hint))
    };
    let constraints = rows.into_iter().map(|r| ConstraintFn::affine(-r, 0.0)).collect::<Result<Vec<_>>>()?;
    Ok(GeneratedProblem { problem: Problem::new(constraints, domain)?, witness, dual_hint })
}

/// Loss-risk portfolio constraints `α + β xᵀΣ_jx - p_jᵀx <= 0` with
/// `β = 1`, covariance spectra in `[0.1, 1]` and returns in `[0.5, 1.5]`.
/// `α` leaves the uniform portfolio a slack of 0.05.
pub fn make_portfolio_risk(n: usize, m: usize, seed: u64) -> Result<GeneratedProblem> {
    check_sizes(n, m)?;
    let mut rng = rng(seed);
    let domain = Domain::simplex(n)?;
    let beta = 1.0;
    let scenarios: Vec<(Matrix, Vector)> = (0..m)
        .map(|_| {
            let spectrum: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..=1.0)).collect();
            let sigma = with_spectrum(&spectrum, &mut rng);
            let p = uniform_vec(n, 0.5, 1.5, &mut rng);
            (sigma, p)
        })
        .collect();
    let u = domain.initial_point();
    let alpha = scenarios.iter().map(|(s, p)| p.dot(&u) - beta * u.dot(&(s * &u))).fold(f64::INFINITY, f64::min)
        - PORTFOLIO_SLACK;
    let constraints =
        scenarios.into_iter().map(|(s, p)| ConstraintFn::quadratic(s * beta, -p, alpha)).collect::<Result<Vec<_>>>()?;
    Ok(GeneratedProblem { problem: Problem::new(constraints, domain)?, witness: Some(u), dual_hint: None })
}

/// Negative entropy at level `τ` plus `m` ellipsoids `‖A_i(p - p̃)‖² <= c`
/// around a random `p̃`. Each `A_i` is symmetric with singular values in
/// `[0.5, 1.5]`. `τ` defaults to the midpoint of `H(p̃)` and `-ln n`.
pub fn make_entropy_problem(n: usize, m: usize, c: f64, tau: Option<f64>, seed: u64) -> Result<GeneratedProblem> {
    check_sizes(n, m)?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!("c must be > 0, got {c}")));
    }
    let mut rng = rng(seed);
    let domain = Domain::simplex(n)?;
    let center = domain.sample(&mut rng);
    let negent = ConstraintFn::neg_entropy(n)?;
    let tau = match tau {
        Some(t) => t,
        None => 0.5 * (negent.evaluate(&center)? - (n as f64).ln()),
    };
    let mut constraints = vec![ConstraintFn::scaled(negent, 1.0, -tau)?];
    for _ in 0..m {
        let spectrum: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..=1.5)).collect();
        let a = with_spectrum(&spectrum, &mut rng);
        let ata = a.transpose() * &a;
        let ata = (&ata + ata.transpose()) * 0.5;
        let b = &ata * &center * -2.0;
        let c0 = center.dot(&(&ata * &center)) - c;
        constraints.push(ConstraintFn::quadratic(ata, b, c0)?);
    }
    Ok(GeneratedProblem { problem: Problem::new(constraints, domain)?, witness: None, dual_hint: None })
}

/// Constant-rebalanced-portfolio level set
/// `τ - Σ_t log(pᵀr_t) - Σ_i log p_i <= 0` with `‖p - p̃‖² <= c`.
/// Price relatives are drawn from `[0.9, 1.1]`; `τ` defaults to the
/// objective at `p̃`, which makes `p̃` a boundary witness.
pub fn make_crp_problem(n: usize, t_days: usize, c: f64, tau: Option<f64>, seed: u64) -> Result<GeneratedProblem> {
    if n < 2 || t_days == 0 {
        return Err(Error::InvalidArgument(format!("need n >= 2 and T >= 1, got n = {n}, T = {t_days}")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!("c must be > 0, got {c}")));
    }
    let mut rng = rng(seed);
    let domain = Domain::simplex(n)?;
    let mut rows: Vec<(Vector, f64)> = (0..t_days).map(|_| (uniform_vec(n, 0.9, 1.1, &mut rng), 0.0)).collect();
    rows.extend((0..n).map(|i| (crate::linalg::basis(n, i), 0.0)));
    let center = domain.sample(&mut rng);
    let barrier = ConstraintFn::log_barrier(rows)?;
    let tau = match tau {
        Some(t) => t,
        None => -barrier.evaluate(&center)?,
    };
    let constraints = vec![ConstraintFn::scaled(barrier, 1.0, tau)?, ConstraintFn::norm_dist_sq(center.clone(), c)?];
    Ok(GeneratedProblem { problem: Problem::new(constraints, domain)?, witness: Some(center), dual_hint: None })
}
