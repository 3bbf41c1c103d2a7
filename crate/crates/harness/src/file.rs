//! JSON problem files.
//!
//! A file holds either explicit constraints with a domain, or a generator
//! spec. Unknown fields are rejected everywhere.

use gameopt_core::linalg::{asymmetry, Matrix, Vector};
use gameopt_core::problems::{
    make_crp_problem, make_entropy_problem, make_perceptron_lp, make_portfolio_risk, make_strict_qp, GeneratedProblem,
};
use gameopt_core::{estimate_parameters, ConstraintFn, Domain, Problem, ProblemParams};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const FILE_VERSION: u32 = 1;

/// Largest entry-wise asymmetry accepted in a quadratic matrix.
pub const SYMMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("syntax error at line {line}, column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },
    #[error("{field}: {msg}")]
    Invalid { field: String, msg: String },
    #[error("{0}")]
    Problem(#[from] gameopt_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

fn invalid(field: impl Into<String>, msg: impl Into<String>) -> FileError {
    FileError::Invalid { field: field.into(), msg: msg.into() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraints: Option<Vec<ConstraintSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Simplex { n: usize },
    Ball { radius: f64, center: Vec<f64> },
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConstraintSpec {
    Affine {
        a: Vec<f64>,
        b: f64,
    },
    /// `a` is row-major.
    Quadratic {
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
        c: f64,
    },
    LogAffineComposite {
        inner: Box<ConstraintSpec>,
        omega: f64,
    },
    NegEntropy {
        n: usize,
    },
    NormDistSq {
        center: Vec<f64>,
        c: f64,
    },
    Scaled {
        inner: Box<ConstraintSpec>,
        scale: f64,
        offset: f64,
    },
    Sum {
        parts: Vec<ConstraintSpec>,
    },
    LogBarrier {
        rows: Vec<BarrierRow>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarrierRow {
    pub a: Vec<f64>,
    pub b: f64,
}

/// Overrides for the estimated parameters; missing fields keep the estimate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_inf: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

impl ParamsSpec {
    pub fn full(p: &ProblemParams) -> Self {
        ParamsSpec {
            g: Some(p.g),
            h: Some(p.h),
            omega: Some(p.omega),
            d: Some(p.d),
            g_inf: Some(p.g_inf),
            alpha: Some(p.alpha),
        }
    }

    pub fn apply(&self, p: ProblemParams) -> ProblemParams {
        ProblemParams {
            g: self.g.unwrap_or(p.g),
            h: self.h.unwrap_or(p.h),
            omega: self.omega.unwrap_or(p.omega),
            d: self.d.unwrap_or(p.d),
            g_inf: self.g_inf.unwrap_or(p.g_inf),
            alpha: self.alpha.unwrap_or(p.alpha),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    Qp {
        n: usize,
        m: usize,
        h: f64,
        feasible: bool,
        seed: u64,
    },
    Lp {
        n: usize,
        m: usize,
        margin: f64,
        feasible: bool,
        seed: u64,
    },
    Portfolio {
        n: usize,
        m: usize,
        seed: u64,
    },
    Entropy {
        n: usize,
        m: usize,
        c: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tau: Option<f64>,
        seed: u64,
    },
    Crp {
        n: usize,
        t_days: usize,
        c: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tau: Option<f64>,
        seed: u64,
    },
}

impl GeneratorSpec {
    pub fn generate(&self) -> gameopt_core::Result<GeneratedProblem> {
        match *self {
            GeneratorSpec::Qp { n, m, h, feasible, seed } => make_strict_qp(n, m, h, feasible, seed),
            GeneratorSpec::Lp { n, m, margin, feasible, seed } => make_perceptron_lp(n, m, margin, feasible, seed),
            GeneratorSpec::Portfolio { n, m, seed } => make_portfolio_risk(n, m, seed),
            GeneratorSpec::Entropy { n, m, c, tau, seed } => make_entropy_problem(n, m, c, tau, seed),
            GeneratorSpec::Crp { n, t_days, c, tau, seed } => make_crp_problem(n, t_days, c, tau, seed),
        }
    }

    pub fn seed_mut(&mut self) -> &mut u64 {
        match self {
            GeneratorSpec::Qp { seed, .. }
            | GeneratorSpec::Lp { seed, .. }
            | GeneratorSpec::Portfolio { seed, .. }
            | GeneratorSpec::Entropy { seed, .. }
            | GeneratorSpec::Crp { seed, .. } => seed,
        }
    }
}

fn vector(field: &str, v: &[f64], n: usize) -> Result<Vector, FileError> {
    if v.len() != n {
        return Err(invalid(field, format!("expected length {n}, found {}", v.len())));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(invalid(field, "entries must be finite"));
    }
    Ok(Vector::from_column_slice(v))
}

fn domain_from_spec(spec: &DomainSpec) -> Result<Domain, FileError> {
    let wrap = |e: gameopt_core::Error| invalid("domain", e.to_string());
    match spec {
        DomainSpec::Simplex { n } => Domain::simplex(*n).map_err(wrap),
        DomainSpec::Ball { radius, center } => {
            Domain::ball(*radius, vector("domain.center", center, center.len())?).map_err(wrap)
        }
        DomainSpec::Box { lo, hi } => {
            let lo_v = vector("domain.lo", lo, lo.len())?;
            let hi_v = vector("domain.hi", hi, lo.len())?;
            Domain::cube(lo_v, hi_v).map_err(wrap)
        }
    }
}

pub fn domain_to_spec(d: &Domain) -> DomainSpec {
    match d {
        Domain::Simplex { n } => DomainSpec::Simplex { n: *n },
        Domain::Ball { radius, center } => {
            DomainSpec::Ball { radius: *radius, center: center.iter().copied().collect() }
        }
        Domain::Box { lo, hi } => {
            DomainSpec::Box { lo: lo.iter().copied().collect(), hi: hi.iter().copied().collect() }
        }
    }
}

fn constraint_from_spec(field: &str, spec: &ConstraintSpec, n: usize) -> Result<ConstraintFn, FileError> {
    let wrap = |e: gameopt_core::Error| invalid(field, e.to_string());
    match spec {
        ConstraintSpec::Affine { a, b } => ConstraintFn::affine(vector(&format!("{field}.a"), a, n)?, *b).map_err(wrap),
        ConstraintSpec::Quadratic { a, b, c } => {
            let af = format!("{field}.a");
            if a.len() != n {
                return Err(invalid(&af, format!("expected {n} rows, found {}", a.len())));
            }
            for (i, row) in a.iter().enumerate() {
                vector(&format!("{af}[{i}]"), row, n)?;
            }
            let m = Matrix::from_fn(n, n, |i, j| a[i][j]);
            let asym = asymmetry(&m);
            if asym > SYMMETRY_TOL {
                return Err(invalid(&af, format!("matrix is not symmetric (max |A - Aᵀ| = {asym:.3e})")));
            }
            ConstraintFn::quadratic(m, vector(&format!("{field}.b"), b, n)?, *c).map_err(wrap)
        }
        ConstraintSpec::LogAffineComposite { inner, omega } => {
            let inner = constraint_from_spec(&format!("{field}.inner"), inner, n)?;
            ConstraintFn::log_affine_composite(inner, *omega).map_err(wrap)
        }
        ConstraintSpec::NegEntropy { n: k } => {
            if *k != n {
                return Err(invalid(format!("{field}.n"), format!("expected {n}, found {k}")));
            }
            ConstraintFn::neg_entropy(n).map_err(wrap)
        }
        ConstraintSpec::NormDistSq { center, c } => {
            ConstraintFn::norm_dist_sq(vector(&format!("{field}.center"), center, n)?, *c).map_err(wrap)
        }
        ConstraintSpec::Scaled { inner, scale, offset } => {
            let inner = constraint_from_spec(&format!("{field}.inner"), inner, n)?;
            ConstraintFn::scaled(inner, *scale, *offset).map_err(wrap)
        }
        ConstraintSpec::Sum { parts } => {
            let parts = parts
                .iter()
                .enumerate()
                .map(|(i, p)| constraint_from_spec(&format!("{field}.parts[{i}]"), p, n))
                .collect::<Result<Vec<_>, _>>()?;
            ConstraintFn::sum(parts).map_err(wrap)
        }
        ConstraintSpec::LogBarrier { rows } => {
            let rows = rows
                .iter()
                .enumerate()
                .map(|(i, r)| Ok((vector(&format!("{field}.rows[{i}].a"), &r.a, n)?, r.b)))
                .collect::<Result<Vec<_>, FileError>>()?;
            ConstraintFn::log_barrier(rows).map_err(wrap)
        }
    }
}

pub fn constraint_to_spec(f: &ConstraintFn) -> ConstraintSpec {
    let vec = |v: &Vector| v.iter().copied().collect::<Vec<f64>>();
    match f {
        ConstraintFn::Affine { a, b } => ConstraintSpec::Affine { a: vec(a), b: *b },
        ConstraintFn::Quadratic { a, b, c } => ConstraintSpec::Quadratic {
            a: (0..a.nrows()).map(|i| a.row(i).iter().copied().collect()).collect(),
            b: vec(b),
            c: *c,
        },
        ConstraintFn::LogAffineComposite { inner, omega } => {
            ConstraintSpec::LogAffineComposite { inner: Box::new(constraint_to_spec(inner)), omega: *omega }
        }
        ConstraintFn::NegEntropy { n } => ConstraintSpec::NegEntropy { n: *n },
        ConstraintFn::NormDistSq { center, c } => ConstraintSpec::NormDistSq { center: vec(center), c: *c },
        ConstraintFn::Scaled { inner, scale, offset } => {
            ConstraintSpec::Scaled { inner: Box::new(constraint_to_spec(inner)), scale: *scale, offset: *offset }
        }
        ConstraintFn::Sum(parts) => ConstraintSpec::Sum { parts: parts.iter().map(constraint_to_spec).collect() },
        ConstraintFn::LogBarrier { rows } => {
            ConstraintSpec::LogBarrier { rows: rows.iter().map(|(a, b)| BarrierRow { a: vec(a), b: *b }).collect() }
        }
    }
}

impl ProblemFile {
    /// Explicit form of a problem with every parameter written out.
    pub fn from_problem(problem: &Problem) -> Self {
        ProblemFile {
            version: FILE_VERSION,
            domain: Some(domain_to_spec(problem.domain())),
            constraints: Some(problem.constraints().iter().map(constraint_to_spec).collect()),
            params: Some(ParamsSpec::full(problem.params())),
            generator: None,
        }
    }

    pub fn from_generator(spec: GeneratorSpec) -> Self {
        ProblemFile { version: FILE_VERSION, domain: None, constraints: None, params: None, generator: Some(spec) }
    }

    pub fn to_problem(&self) -> Result<Problem, FileError> {
        if self.version != FILE_VERSION {
            return Err(invalid("version", format!("unsupported version {}, expected {FILE_VERSION}", self.version)));
        }
        let base = match (&self.constraints, &self.generator) {
            (Some(_), Some(_)) => return Err(invalid("constraints", "give either constraints or generator, not both")),
            (None, None) => return Err(invalid("constraints", "either constraints or generator is required")),
            (None, Some(g)) => {
                let generated = g.generate().map_err(|e| invalid("generator", e.to_string()))?.problem;
                if let Some(d) = &self.domain {
                    if domain_from_spec(d)? != *generated.domain() {
                        return Err(invalid("domain", "does not match the generated problem"));
                    }
                }
                generated
            }
            (Some(cs), None) => {
                let domain = domain_from_spec(self.domain.as_ref().ok_or_else(|| invalid("domain", "missing"))?)?;
                if cs.is_empty() {
                    return Err(invalid("constraints", "need at least one constraint"));
                }
                let n = domain.dim();
                let constraints = cs
                    .iter()
                    .enumerate()
                    .map(|(j, c)| constraint_from_spec(&format!("constraints[{j}]"), c, n))
                    .collect::<Result<Vec<_>, _>>()?;
                Problem::new(constraints, domain)?
            }
        };
        match &self.params {
            None => Ok(base),
            Some(spec) => {
                let params = spec.apply(estimate_parameters(&base)?);
                params.validate().map_err(|e| invalid("params", e.to_string()))?;
                Ok(Problem::with_params(base.constraints().to_vec(), base.domain().clone(), params)?)
            }
        }
    }
}

pub fn parse_problem_file(text: &str) -> Result<Problem, FileError> {
    parse_document(text)?.to_problem()
}

pub fn parse_document(text: &str) -> Result<ProblemFile, FileError> {
    serde_json::from_str(text).map_err(|e| FileError::Syntax { line: e.line(), column: e.column(), msg: e.to_string() })
}

/// Canonical text of a problem: explicit constraints, full parameters,
/// fixed field order.
pub fn emit_problem(problem: &Problem) -> String {
    let mut s = serde_json::to_string_pretty(&ProblemFile::from_problem(problem)).expect("problem files serialize");
    s.push('\n');
    s
}

pub fn read_problem(path: &std::path::Path) -> Result<Problem, FileError> {
    parse_problem_file(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "version": 1,
        "domain": {"type": "simplex", "n": 2},
        "constraints": [{"family": "affine", "a": [1.0, -1.0], "b": 0.0}]
    }"#;

    #[test]
    fn minimal_file() {
        let p = parse_problem_file(MINIMAL).unwrap();
        assert_eq!(p.m(), 1);
        assert_eq!(p.n(), 2);
    }

    #[test]
    fn unknown_field_is_rejected() {
        let text = MINIMAL.replace("\"version\": 1,", "\"version\": 1, \"colour\": 3,");
        assert!(matches!(parse_problem_file(&text), Err(FileError::Syntax { .. })));
    }

    #[test]
    fn params_override_single_field() {
        let text = MINIMAL.replace("\"version\": 1,", "\"version\": 1, \"params\": {\"h\": 0.5},");
        let p = parse_problem_file(&text).unwrap();
        assert_eq!(p.params().h, 0.5);
        assert_eq!(p.params().g, 2f64.sqrt());
    }
}
