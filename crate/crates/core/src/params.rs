//! Conservative instance parameters: gradient bounds, curvature, width.

use crate::constraint::ConstraintFn;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::linalg::{sym_eigenvalues, sym_op_norm, Matrix, Vector};

/// Smallest argument that barrier-type families (negative entropy, log
/// barrier, log composite) are assumed to see on a domain that touches
/// their boundary. Gradient bounds for those families scale with its
/// inverse.
pub const BARRIER_FLOOR: f64 = 1e-12;

/// Floor applied to the positive parameters so that degenerate instances
/// (constant constraints, one-point domains) stay well defined.
pub const MIN_PARAM: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParams {
    /// ℓ2 bound on constraint gradients.
    pub g: f64,
    /// Lower bound on the smallest Hessian eigenvalue of every constraint.
    pub h: f64,
    /// Width: bound on `|f_j|` over the domain.
    pub omega: f64,
    /// Euclidean diameter of the domain.
    pub d: f64,
    /// ℓ∞ bound on the dual player's payoff gradients.
    pub g_inf: f64,
    /// Exp-concavity modulus; zero when none is known.
    pub alpha: f64,
}

impl ProblemParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [("G", self.g), ("omega", self.omega), ("D", self.d), ("G_inf", self.g_inf)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("parameter {name} must be > 0, got {v}")));
            }
        }
        if !(self.h >= 0.0 && self.h.is_finite()) {
            return Err(Error::InvalidArgument(format!("parameter H must be >= 0, got {}", self.h)));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!("parameter alpha must be >= 0, got {}", self.alpha)));
        }
        Ok(())
    }
}

/// Bounds for one constraint over a domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyBounds {
    pub lo: f64,
    pub hi: f64,
    pub g: f64,
    pub h: f64,
    pub alpha: f64,
}

impl FamilyBounds {
    pub fn width(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }
}

/// Center and radius of a ball containing the domain.
fn enclosing_ball(domain: &Domain) -> (Vector, f64) {
    match domain {
        Domain::Simplex { n } => {
            let c = crate::linalg::uniform(*n);
            let r = (1.0 - 1.0 / *n as f64).max(0.0).sqrt();
            (c, r)
        }
        Domain::Ball { radius, center } => (center.clone(), *radius),
        Domain::Box { lo, hi } => ((lo + hi) * 0.5, 0.5 * (hi - lo).norm()),
    }
}

pub fn constraint_bounds(f: &ConstraintFn, domain: &Domain) -> Result<FamilyBounds> {
    crate::error::check_dim("constraint vs domain", domain.dim(), f.dim())?;
    let mut b = raw_bounds(f, domain)?;
    b.alpha = alpha_of(f, &b);
    if ![b.lo, b.hi, b.g, b.h].iter().all(|v| v.is_finite()) {
        return Err(Error::Unbounded(format!("{} constraint over this domain", f.family())));
    }
    Ok(b)
}

fn raw_bounds(f: &ConstraintFn, domain: &Domain) -> Result<FamilyBounds> {
    let n = domain.dim();
    Ok(match f {
        ConstraintFn::Affine { a, b } => {
            let (lo, hi) = domain.affine_range(a, *b);
            FamilyBounds { lo, hi, g: a.norm(), h: 0.0, alpha: 0.0 }
        }
        ConstraintFn::Quadratic { a, b, c } => quadratic_bounds(a, b, *c, domain),
        ConstraintFn::NormDistSq { center, c } => {
            let far = domain.max_distance_from(center);
            let near = (domain.project(center) - center).norm();
            FamilyBounds { lo: near * near - c, hi: far * far - c, g: 2.0 * far, h: 2.0, alpha: 0.0 }
        }
        ConstraintFn::NegEntropy { .. } => {
            let (blo, bhi) = domain.bounding_box();
            let mut lo = 0.0;
            let mut hi = 0.0;
            let mut g2 = 0.0;
            let mut max_u: f64 = 0.0;
            for i in 0..n {
                let u = bhi[i];
                if u <= 0.0 {
                    return Err(Error::Unbounded("negative entropy on a domain without positive points".into()));
                }
                let l = blo[i].max(BARRIER_FLOOR).min(u);
                let phi = |x: f64| x * x.ln();
                let inv_e = (-1.0f64).exp();
                lo += if l <= inv_e && inv_e <= u { -inv_e } else { phi(l).min(phi(u)) };
                hi += phi(l).max(phi(u));
                let gi = (l.ln() + 1.0).abs().max((u.ln() + 1.0).abs());
                g2 += gi * gi;
                max_u = max_u.max(u);
            }
            if domain.is_simplex() {
                lo = -(n as f64).ln();
                hi = 0.0;
            }
            FamilyBounds { lo, hi, g: g2.sqrt(), h: 1.0 / max_u, alpha: 0.0 }
        }
        ConstraintFn::LogBarrier { rows } => {
            let mut lo = 0.0;
            let mut hi = 0.0;
            let mut g = 0.0;
            let mut hess = Matrix::zeros(n, n);
            for (a, b) in rows {
                let (l, u) = domain.affine_range(a, *b);
                if u <= 0.0 {
                    return Err(Error::Unbounded("log barrier argument is never positive".into()));
                }
                let l = l.max(BARRIER_FLOOR).min(u);
                lo -= u.ln();
                hi -= l.ln();
                g += a.norm() / l;
                hess.ger(1.0 / (u * u), a, a, 1.0);
            }
            let h = sym_eigenvalues(&hess).first().copied().unwrap_or(0.0).max(0.0);
            FamilyBounds { lo, hi, g, h, alpha: 0.0 }
        }
        ConstraintFn::LogAffineComposite { inner, omega } => {
            let ib = raw_bounds(inner, domain)?;
            let e = std::f64::consts::E;
            let arg_hi = e + ib.hi / omega;
            if arg_hi <= 0.0 {
                return Err(Error::Unbounded("log composite argument is never positive".into()));
            }
            let arg_lo = (e + ib.lo / omega).max(BARRIER_FLOOR).min(arg_hi);
            FamilyBounds { lo: arg_lo.ln(), hi: arg_hi.ln(), g: ib.g / (omega * arg_lo), h: 0.0, alpha: 0.0 }
        }
        ConstraintFn::Scaled { inner, scale, offset } => {
            let ib = raw_bounds(inner, domain)?;
            let (p, q) = (scale * ib.lo + offset, scale * ib.hi + offset);
            FamilyBounds {
                lo: p.min(q),
                hi: p.max(q),
                g: scale.abs() * ib.g,
                h: if *scale >= 0.0 { scale * ib.h } else { 0.0 },
                alpha: 0.0,
            }
        }
        ConstraintFn::Sum(parts) => {
            let mut acc = FamilyBounds { lo: 0.0, hi: 0.0, g: 0.0, h: 0.0, alpha: 0.0 };
            for p in parts {
                let b = raw_bounds(p, domain)?;
                acc.lo += b.lo;
                acc.hi += b.hi;
                acc.g += b.g;
                acc.h += b.h;
            }
            acc
        }
    })
}

fn quadratic_bounds(a: &Matrix, b: &Vector, c: f64, domain: &Domain) -> FamilyBounds {
    let n = b.len();
    let ev = sym_eigenvalues(a);
    let lmin = ev.first().copied().unwrap_or(0.0);
    let lmax = ev.last().copied().unwrap_or(0.0);
    let convex = lmin >= -1e-12;
    let f = |x: &Vector| x.dot(&(a * x)) + b.dot(x) + c;

    let (c0, r) = enclosing_ball(domain);
    let v0 = f(&c0);
    let gn = (a * &c0 * 2.0 + b).norm();
    let mut hi = v0 + gn * r + lmax.max(0.0) * r * r;
    let mut lo = v0 - gn * r + lmin.min(0.0) * r * r;
    let g;
    if let Domain::Simplex { .. } = domain {
        // ‖2Ax + b‖ and (for PSD A) f are convex, so both peak at a vertex.
        g = (0..n).map(|i| (a.column(i) * 2.0 + b).norm()).fold(0.0, f64::max);
        if convex {
            hi = (0..n).map(|i| a[(i, i)] + b[i] + c).fold(f64::NEG_INFINITY, f64::max);
        }
    } else {
        g = gn + 2.0 * sym_op_norm(a) * r;
    }
    if lmin > 0.0 {
        if let Some(inv) = crate::linalg::spd_inverse(a) {
            lo = lo.max(c - 0.25 * b.dot(&(inv * b)));
        }
    }
    FamilyBounds { lo, hi, g, h: (2.0 * lmin).max(0.0), alpha: 0.0 }
}

/// Exp-concavity modulus: `H/G²` for strongly convex constraints, and
/// `1/|s|` for `s·log(e + affine/ω) + o` with `s < 0`, whose exponential is
/// a positive affine function raised to a power at most one.
fn alpha_of(f: &ConstraintFn, b: &FamilyBounds) -> f64 {
    if let ConstraintFn::Scaled { inner, scale, .. } = f {
        if *scale < 0.0 {
            if let ConstraintFn::LogAffineComposite { inner: aff, .. } = inner.as_ref() {
                if aff.as_affine().is_some() {
                    return 1.0 / scale.abs();
                }
            }
        }
    }
    if b.h > 0.0 && b.g > 0.0 {
        b.h / (b.g * b.g)
    } else {
        0.0
    }
}

pub fn estimate_for(constraints: &[ConstraintFn], domain: &Domain) -> Result<ProblemParams> {
    if constraints.is_empty() {
        return Err(Error::InvalidArgument("a problem needs at least one constraint".into()));
    }
    let mut g: f64 = 0.0;
    let mut h = f64::INFINITY;
    let mut omega: f64 = 0.0;
    let mut alpha = f64::INFINITY;
    for f in constraints {
        let b = constraint_bounds(f, domain)?;
        g = g.max(b.g);
        h = h.min(b.h);
        omega = omega.max(b.width());
        alpha = alpha.min(b.alpha);
    }
    let omega = omega.max(MIN_PARAM);
    Ok(ProblemParams { g: g.max(MIN_PARAM), h, omega, d: domain.diameter().max(MIN_PARAM), g_inf: omega, alpha })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector {
        Vector::from_vec(x.to_vec())
    }

    #[test]
    fn affine_norm_and_simplex_diameter() {
        let d = Domain::simplex(2).unwrap();
        let p = estimate_for(&[ConstraintFn::affine(v(&[3.0, 4.0]), 0.0).unwrap()], &d).unwrap();
        assert_eq!(p.g, 5.0);
        assert_eq!(p.d, std::f64::consts::SQRT_2);
        assert_eq!(p.omega, 4.0);
        assert_eq!(p.h, 0.0);
        assert_eq!(p.alpha, 0.0);
    }

    #[test]
    fn identity_quadratic_has_h_two() {
        let d = Domain::simplex(2).unwrap();
        let q = ConstraintFn::quadratic(Matrix::identity(2, 2), Vector::zeros(2), 0.0).unwrap();
        let p = estimate_for(&[q], &d).unwrap();
        assert!((p.h - 2.0).abs() < 1e-12);
        assert!((p.g - 2.0).abs() < 1e-12);
        assert!((p.omega - 1.0).abs() < 1e-12);
        assert!((p.alpha - 0.5).abs() < 1e-12);
    }

    #[test]
    fn log_composite_of_affine_is_exp_concave() {
        let d = Domain::simplex(2).unwrap();
        let aff = ConstraintFn::affine(v(&[-1.0, 1.0]), 0.0).unwrap();
        let lc = ConstraintFn::log_affine_composite(aff, 1.0).unwrap();
        let f = ConstraintFn::scaled(lc, -1.0, 1.0).unwrap();
        let b = constraint_bounds(&f, &d).unwrap();
        assert_eq!(b.alpha, 1.0);
        assert!(b.g <= std::f64::consts::SQRT_2 / (std::f64::consts::E - 1.0) + 1e-12);
    }

    #[test]
    fn barrier_never_positive_is_unbounded() {
        let d = Domain::simplex(2).unwrap();
        let f = ConstraintFn::log_barrier(vec![(v(&[-1.0, -1.0]), 0.0)]).unwrap();
        assert!(matches!(estimate_for(&[f], &d), Err(Error::Unbounded(_))));
    }

    #[test]
    fn entropy_on_simplex() {
        let d = Domain::simplex(4).unwrap();
        let b = constraint_bounds(&ConstraintFn::neg_entropy(4).unwrap(), &d).unwrap();
        assert!((b.lo + 4f64.ln()).abs() < 1e-15 && b.hi == 0.0);
        assert_eq!(b.h, 1.0);
    }
}
