//! Constraint families with exact values and analytic gradients.
//!
//! Every constraint is stored in minimization form `f(x) <= 0`.

use crate::error::{check_dim, Error, Result};
use crate::linalg::{is_symmetric, Matrix, Vector};

#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintFn {
    /// `a·x + b`
    Affine { a: Vector, b: f64 },
    /// `xᵀAx + b·x + c` with `A` symmetric.
    Quadratic { a: Matrix, b: Vector, c: f64 },
    /// `log(e + inner(x) / omega)`
    LogAffineComposite { inner: Box<ConstraintFn>, omega: f64 },
    /// `Σ x_i log x_i`, defined for strictly positive `x`.
    NegEntropy { n: usize },
    /// `‖x - center‖² - c`
    NormDistSq { center: Vector, c: f64 },
    /// `scale · inner(x) + offset`
    Scaled { inner: Box<ConstraintFn>, scale: f64, offset: f64 },
    /// Sum of the parts.
    Sum(Vec<ConstraintFn>),
    /// `-Σ_k log(a_k·x + b_k)`
    LogBarrier { rows: Vec<(Vector, f64)> },
}

impl ConstraintFn {
    pub fn affine(a: Vector, b: f64) -> Result<Self> {
        finite_vec("affine coefficients", &a)?;
        finite_scalar("affine offset", b)?;
        Ok(ConstraintFn::Affine { a, b })
    }

    /// The constant function `c` on `n`-dimensional inputs.
    pub fn constant(n: usize, c: f64) -> Self {
        ConstraintFn::Affine { a: Vector::zeros(n), b: c }
    }

    pub fn quadratic(a: Matrix, b: Vector, c: f64) -> Result<Self> {
        check_dim("quadratic matrix rows", b.len(), a.nrows())?;
        check_dim("quadratic matrix cols", b.len(), a.ncols())?;
        if !is_symmetric(&a, 1e-12) {
            return Err(Error::InvalidArgument("quadratic matrix must be symmetric".into()));
        }
        finite_vec("quadratic linear term", &b)?;
        finite_scalar("quadratic constant", c)?;
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("quadratic matrix must be finite".into()));
        }
        Ok(ConstraintFn::Quadratic { a, b, c })
    }

    pub fn log_affine_composite(inner: ConstraintFn, omega: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidArgument(format!("omega must be > 0, got {omega}")));
        }
        Ok(ConstraintFn::LogAffineComposite { inner: Box::new(inner), omega })
    }

    pub fn neg_entropy(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("negative entropy needs n >= 1".into()));
        }
        Ok(ConstraintFn::NegEntropy { n })
    }

    pub fn norm_dist_sq(center: Vector, c: f64) -> Result<Self> {
        finite_vec("ball center", &center)?;
        finite_scalar("ball radius term", c)?;
        Ok(ConstraintFn::NormDistSq { center, c })
    }

    pub fn scaled(inner: ConstraintFn, scale: f64, offset: f64) -> Result<Self> {
        finite_scalar("scale", scale)?;
        finite_scalar("offset", offset)?;
        Ok(ConstraintFn::Scaled { inner: Box::new(inner), scale, offset })
    }

    pub fn sum(parts: Vec<ConstraintFn>) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::InvalidArgument("sum needs at least one part".into()))?;
        let n = first.dim();
        for p in &parts {
            check_dim("sum part", n, p.dim())?;
        }
        Ok(ConstraintFn::Sum(parts))
    }

    pub fn log_barrier(rows: Vec<(Vector, f64)>) -> Result<Self> {
        let n = rows
            .first()
            .map(|r| r.0.len())
            .ok_or_else(|| Error::InvalidArgument("log barrier needs at least one row".into()))?;
        for (a, b) in &rows {
            check_dim("log barrier row", n, a.len())?;
            finite_vec("log barrier row", a)?;
            finite_scalar("log barrier offset", *b)?;
        }
        Ok(ConstraintFn::LogBarrier { rows })
    }

    pub fn dim(&self) -> usize {
        match self {
            ConstraintFn::Affine { a, .. } => a.len(),
            ConstraintFn::Quadratic { b, .. } => b.len(),
            ConstraintFn::LogAffineComposite { inner, .. } => inner.dim(),
            ConstraintFn::NegEntropy { n } => *n,
            ConstraintFn::NormDistSq { center, .. } => center.len(),
            ConstraintFn::Scaled { inner, .. } => inner.dim(),
            ConstraintFn::Sum(parts) => parts[0].dim(),
            ConstraintFn::LogBarrier { rows } => rows[0].0.len(),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            ConstraintFn::Affine { .. } => "affine",
            ConstraintFn::Quadratic { .. } => "quadratic",
            ConstraintFn::LogAffineComposite { .. } => "log_affine_composite",
            ConstraintFn::NegEntropy { .. } => "neg_entropy",
            ConstraintFn::NormDistSq { .. } => "norm_dist_sq",
            ConstraintFn::Scaled { .. } => "scaled",
            ConstraintFn::Sum(_) => "sum",
            ConstraintFn::LogBarrier { .. } => "log_barrier",
        }
    }

    pub fn evaluate(&self, x: &Vector) -> Result<f64> {
        check_dim("constraint input", self.dim(), x.len())?;
        self.eval_unchecked(x)
    }

    pub fn gradient(&self, x: &Vector) -> Result<Vector> {
        check_dim("constraint input", self.dim(), x.len())?;
        Ok(self.value_grad_unchecked(x)?.1)
    }

    pub fn value_and_gradient(&self, x: &Vector) -> Result<(f64, Vector)> {
        check_dim("constraint input", self.dim(), x.len())?;
        self.value_grad_unchecked(x)
    }

    fn eval_unchecked(&self, x: &Vector) -> Result<f64> {
        Ok(match self {
            ConstraintFn::Affine { a, b } => a.dot(x) + b,
            ConstraintFn::Quadratic { a, b, c } => x.dot(&(a * x)) + b.dot(x) + c,
            ConstraintFn::LogAffineComposite { inner, omega } => {
                log_arg(std::f64::consts::E + inner.eval_unchecked(x)? / omega)?.ln()
            }
            ConstraintFn::NegEntropy { .. } => {
                let mut s = 0.0;
                for (i, &v) in x.iter().enumerate() {
                    if !(v > 0.0) {
                        return Err(Error::Domain(format!("negative entropy needs x_i > 0, got x[{i}] = {v}")));
                    }
                    s += v * v.ln();
                }
                s
            }
            ConstraintFn::NormDistSq { center, c } => (x - center).norm_squared() - c,
            ConstraintFn::Scaled { inner, scale, offset } => scale * inner.eval_unchecked(x)? + offset,
            ConstraintFn::Sum(parts) => {
                let mut s = 0.0;
                for p in parts {
                    s += p.eval_unchecked(x)?;
                }
                s
            }
            ConstraintFn::LogBarrier { rows } => {
                let mut s = 0.0;
                for (a, b) in rows {
                    s -= log_arg(a.dot(x) + b)?.ln();
                }
                s
            }
        })
    }

    fn value_grad_unchecked(&self, x: &Vector) -> Result<(f64, Vector)> {
        Ok(match self {
            ConstraintFn::Affine { a, b } => (a.dot(x) + b, a.clone()),
            ConstraintFn::Quadratic { a, b, c } => {
                let ax = a * x;
                (x.dot(&ax) + b.dot(x) + c, ax * 2.0 + b)
            }
            ConstraintFn::LogAffineComposite { inner, omega } => {
                let (v, g) = inner.value_grad_unchecked(x)?;
                let arg = log_arg(std::f64::consts::E + v / omega)?;
                (arg.ln(), g / (omega * arg))
            }
            ConstraintFn::NegEntropy { .. } => {
                let v = self.eval_unchecked(x)?;
                (v, x.map(|xi| xi.ln() + 1.0))
            }
            ConstraintFn::NormDistSq { center, c } => {
                let d = x - center;
                (d.norm_squared() - c, d * 2.0)
            }
            ConstraintFn::Scaled { inner, scale, offset } => {
                let (v, g) = inner.value_grad_unchecked(x)?;
                (scale * v + offset, g * *scale)
            }
            ConstraintFn::Sum(parts) => {
                let mut v = 0.0;
                let mut g = Vector::zeros(x.len());
                for p in parts {
                    let (pv, pg) = p.value_grad_unchecked(x)?;
                    v += pv;
                    g += pg;
                }
                (v, g)
            }
            ConstraintFn::LogBarrier { rows } => {
                let mut v = 0.0;
                let mut g = Vector::zeros(x.len());
                for (a, b) in rows {
                    let arg = log_arg(a.dot(x) + b)?;
                    v -= arg.ln();
                    g.axpy(-1.0 / arg, a, 1.0);
                }
                (v, g)
            }
        })
    }

    /// `(a, b)` when the function is affine.
    pub fn as_affine(&self) -> Option<(Vector, f64)> {
        match self {
            ConstraintFn::Affine { a, b } => Some((a.clone(), *b)),
            ConstraintFn::Scaled { inner, scale, offset } => {
                inner.as_affine().map(|(a, b)| (a * *scale, scale * b + offset))
            }
            ConstraintFn::Sum(parts) => {
                let mut acc_a = Vector::zeros(self.dim());
                let mut acc_b = 0.0;
                for p in parts {
                    let (a, b) = p.as_affine()?;
                    acc_a += a;
                    acc_b += b;
                }
                Some((acc_a, acc_b))
            }
            _ => None,
        }
    }

    /// `(A, b, c)` when the function is a polynomial of degree at most two.
    pub fn as_quadratic(&self) -> Option<(Matrix, Vector, f64)> {
        let n = self.dim();
        match self {
            ConstraintFn::Affine { a, b } => Some((Matrix::zeros(n, n), a.clone(), *b)),
            ConstraintFn::Quadratic { a, b, c } => Some((a.clone(), b.clone(), *c)),
            ConstraintFn::NormDistSq { center, c } => {
                Some((Matrix::identity(n, n), center * -2.0, center.norm_squared() - c))
            }
            ConstraintFn::Scaled { inner, scale, offset } => {
                inner.as_quadratic().map(|(a, b, c)| (a * *scale, b * *scale, scale * c + offset))
            }
            ConstraintFn::Sum(parts) => {
                let mut acc = (Matrix::zeros(n, n), Vector::zeros(n), 0.0);
                for p in parts {
                    let (a, b, c) = p.as_quadratic()?;
                    acc.0 += a;
                    acc.1 += b;
                    acc.2 += c;
                }
                Some(acc)
            }
            _ => None,
        }
    }
}

fn log_arg(v: f64) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Domain(format!("logarithm of non-positive argument {v}")))
    }
}

fn finite_vec(what: &str, v: &Vector) -> Result<()> {
    if crate::linalg::all_finite(v) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{what} must be finite")))
    }
}

fn finite_scalar(what: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{what} must be finite")))
    }
}

/// Central finite-difference gradient with step `h`.
pub fn finite_difference(f: &ConstraintFn, x: &Vector, h: f64) -> Result<Vector> {
    let mut g = Vector::zeros(x.len());
    let mut xp = x.clone();
    for i in 0..x.len() {
        let orig = xp[i];
        xp[i] = orig + h;
        let fp = f.evaluate(&xp)?;
        xp[i] = orig - h;
        let fm = f.evaluate(&xp)?;
        xp[i] = orig;
        g[i] = (fp - fm) / (2.0 * h);
    }
    Ok(g)
}
