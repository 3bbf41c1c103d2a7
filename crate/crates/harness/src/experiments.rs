//! Regret and iteration-scaling experiments. Runs fan out over rayon
//! workers; each worker owns its learner or solver.

use std::time::Instant;

use gameopt_core::linalg::{fit_line, Vector};
use gameopt_core::online::{measured_regret, Mw, Ogd, OnlineLearner, Ons, RegretBound, Sense};
use gameopt_core::solvers::NullSink;
use gameopt_core::{ConstraintFn, Domain, Outcome, SolveOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::file::GeneratorSpec;
use crate::run::{solve_to_document, Algo, Learner, RunError, Transform};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Adversary {
    /// `f_t(x) = r_t (x_1 - x_2)` on `Simplex(2)` with fair random signs.
    Sign,
    /// `f_t(x) = ½‖x - r_t‖²` on `[-1, 1]^n` with random sign vectors `r_t`.
    Quadratic,
    /// `f_t(x) = -ln(r_t·x)` on `Simplex(n)` with `r_t` uniform in `[0.5, 1.5]^n`.
    LogLoss,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretConfig {
    pub learner: Learner,
    pub adversary: Adversary,
    pub n: usize,
    pub horizons: Vec<u64>,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretReport {
    pub learner: Learner,
    pub adversary: Adversary,
    pub n: usize,
    pub horizons: Vec<u64>,
    pub seeds: usize,
    pub mean_regret: Vec<f64>,
    pub max_regret: Vec<f64>,
    /// Theoretical bound at each horizon.
    pub bound: Vec<f64>,
    /// Slope of `ln(mean regret)` against `ln T`.
    pub exponent: f64,
    pub fit_residual: f64,
    pub wall_ms: f64,
}

struct Stream {
    domain: Domain,
    /// Parameters for the learner: `(G, H, α, G∞)`.
    g: f64,
    h: f64,
    alpha: f64,
    g_inf: f64,
}

impl Adversary {
    fn stream(self, n: usize) -> Result<Stream, RunError> {
        Ok(match self {
            Adversary::Sign => Stream { domain: Domain::simplex(2)?, g: 2f64.sqrt(), h: 0.0, alpha: 0.0, g_inf: 1.0 },
            Adversary::Quadratic => {
                let g = 2.0 * (n as f64).sqrt();
                Stream {
                    domain: Domain::cube(Vector::from_element(n, -1.0), Vector::from_element(n, 1.0))?,
                    g,
                    h: 1.0,
                    // ½‖x - r‖² is (H/G²)-exp-concave.
                    alpha: 1.0 / (g * g),
                    g_inf: 2.0,
                }
            }
            Adversary::LogLoss => {
                Stream { domain: Domain::simplex(n)?, g: 3.0 * (n as f64).sqrt(), h: 0.0, alpha: 1.0, g_inf: 3.0 }
            }
        })
    }

    fn cost(self, n: usize, rng: &mut ChaCha8Rng) -> Result<ConstraintFn, RunError> {
        Ok(match self {
            Adversary::Sign => {
                let r = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                ConstraintFn::affine(Vector::from_vec(vec![r, -r]), 0.0)?
            }
            Adversary::Quadratic => {
                let r = Vector::from_fn(n, |_, _| if rng.random_bool(0.5) { 1.0 } else { -1.0 });
                ConstraintFn::scaled(ConstraintFn::norm_dist_sq(r, 0.0)?, 0.5, 0.0)?
            }
            Adversary::LogLoss => {
                let r = Vector::from_fn(n, |_, _| rng.random_range(0.5..1.5));
                ConstraintFn::log_barrier(vec![(r, 0.0)])?
            }
        })
    }
}

fn learner_for(learner: Learner, s: &Stream, horizon: u64) -> Result<Box<dyn OnlineLearner>, RunError> {
    let d = s.domain.clone();
    Ok(match learner {
        Learner::Ogd => Box::new(Ogd::new(d, s.h, s.g)?),
        Learner::Ons => {
            let diam = d.diameter();
            Box::new(Ons::new(d, s.g, diam, s.alpha, Sense::Minimize)?)
        }
        Learner::Mw => {
            if !d.is_simplex() {
                return Err(RunError::Usage("mw plays on a simplex; use the sign or log-loss adversary".into()));
            }
            Box::new(Mw::for_horizon(d.dim(), horizon, s.g_inf, Sense::Minimize)?)
        }
    })
}

/// Regret of one run of length `horizon` and the learner's bound.
pub fn regret_run(
    learner: Learner,
    adversary: Adversary,
    n: usize,
    horizon: u64,
    seed: u64,
) -> Result<(f64, RegretBound), RunError> {
    let s = adversary.stream(n)?;
    let mut player = learner_for(learner, &s, horizon)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut costs = Vec::with_capacity(horizon as usize);
    let mut plays = Vec::with_capacity(horizon as usize);
    for _ in 0..horizon {
        let f = adversary.cost(s.domain.dim(), &mut rng)?;
        let x = player.point().clone();
        player.step(&f.gradient(&x)?)?;
        plays.push(x);
        costs.push(f);
    }
    Ok((measured_regret(&costs, &plays, &s.domain)?, player.regret_bound()))
}

pub fn regret_experiment(cfg: &RegretConfig) -> Result<RegretReport, RunError> {
    if cfg.horizons.is_empty() || cfg.seeds.is_empty() {
        return Err(RunError::Usage("need at least one horizon and one seed".into()));
    }
    let start = Instant::now();
    let jobs: Vec<(usize, u64)> =
        (0..cfg.horizons.len()).flat_map(|i| cfg.seeds.iter().map(move |&s| (i, s))).collect();
    let results = jobs
        .par_iter()
        .map(|&(i, seed)| regret_run(cfg.learner, cfg.adversary, cfg.n, cfg.horizons[i], seed).map(|r| (i, r)))
        .collect::<Result<Vec<_>, _>>()?;
    let k = cfg.horizons.len();
    let mut sum = vec![0.0; k];
    let mut max = vec![f64::NEG_INFINITY; k];
    let mut bound = vec![0.0; k];
    for (i, (r, b)) in results {
        sum[i] += r;
        max[i] = max[i].max(r);
        bound[i] = b.eval(cfg.horizons[i]);
    }
    let mean: Vec<f64> = sum.iter().map(|s| s / cfg.seeds.len() as f64).collect();
    let xs: Vec<f64> = cfg.horizons.iter().map(|&t| (t as f64).ln()).collect();
    let ys: Vec<f64> = mean.iter().map(|m| m.max(1e-12).ln()).collect();
    let (exponent, _, fit_residual) = fit_line(&xs, &ys);
    Ok(RegretReport {
        learner: cfg.learner,
        adversary: cfg.adversary,
        n: cfg.n,
        horizons: cfg.horizons.clone(),
        seeds: cfg.seeds.len(),
        mean_regret: mean,
        max_regret: max,
        bound,
        exponent,
        fit_residual,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingConfig {
    pub generator: GeneratorSpec,
    pub algo: Algo,
    pub learner: Learner,
    /// At least three values, each half the previous one.
    pub eps: Vec<f64>,
    #[serde(default)]
    pub log_transform: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strictify: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub algo: Algo,
    pub learner: Learner,
    pub eps: Vec<f64>,
    pub iterations: Vec<u64>,
    pub thresholds: Vec<Option<u64>>,
    pub outcomes: Vec<String>,
    pub wall_ms: Vec<f64>,
    /// Slope of `ln(iterations)` against `ln(1/eps)`.
    pub exponent: f64,
    pub fit_residual: f64,
    /// Set when some run hit the iteration cap.
    pub incomplete: bool,
}

pub fn check_ladder(eps: &[f64]) -> Result<(), RunError> {
    if eps.len() < 3 {
        return Err(RunError::Usage(format!("need at least 3 eps values, got {}", eps.len())));
    }
    for w in eps.windows(2) {
        if (w[1] - w[0] / 2.0).abs() > 1e-12 * w[0] {
            return Err(RunError::Usage(format!("eps ladder must halve: {} does not follow {}", w[1], w[0])));
        }
    }
    if eps.iter().any(|e| !(*e > 0.0)) {
        return Err(RunError::Usage("eps values must be > 0".into()));
    }
    Ok(())
}

pub fn scaling_experiment(cfg: &ScalingConfig, opts: &SolveOptions) -> Result<ScalingReport, RunError> {
    check_ladder(&cfg.eps)?;
    let problem = cfg.generator.generate()?.problem;
    let transform = Transform {
        strictify: cfg.strictify.map(crate::run::Strictify::Delta),
        log_transform: cfg.log_transform,
        omega: None,
    };
    let runs = cfg
        .eps
        .par_iter()
        .map(|&eps| {
            let start = Instant::now();
            let (sol, _) = solve_to_document(&problem, cfg.algo, cfg.learner, eps, &transform, opts, &mut NullSink)?;
            Ok((sol, start.elapsed().as_secs_f64() * 1e3))
        })
        .collect::<Result<Vec<_>, RunError>>()?;
    let iterations: Vec<u64> = runs.iter().map(|(s, _)| s.iterations).collect();
    let xs: Vec<f64> = cfg.eps.iter().map(|e| (1.0 / e).ln()).collect();
    let ys: Vec<f64> = iterations.iter().map(|&i| (i as f64).ln()).collect();
    let (exponent, _, fit_residual) = fit_line(&xs, &ys);
    Ok(ScalingReport {
        algo: cfg.algo,
        learner: cfg.learner,
        eps: cfg.eps.clone(),
        thresholds: runs.iter().map(|(s, _)| s.threshold).collect(),
        outcomes: runs.iter().map(|(s, _)| s.outcome.kind().to_string()).collect(),
        incomplete: runs.iter().any(|(s, _)| matches!(s.outcome, Outcome::Exhausted { .. })),
        wall_ms: runs.iter().map(|(_, w)| *w).collect(),
        iterations,
        exponent,
        fit_residual,
    })
}

/// Mean of `|Σ r_t|` over random ±1 sequences of length `t`, which is the
/// expected advantage of the best expert in hindsight on the sign stream.
pub fn sign_walk_advantage(t: u64, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    for _ in 0..samples {
        let mut s: i64 = 0;
        for _ in 0..t {
            s += if rng.random_bool(0.5) { 1 } else { -1 };
        }
        total += s.unsigned_abs() as f64;
    }
    total / samples as f64
}
