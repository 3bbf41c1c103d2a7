//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! fails if any criterion does.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use gameopt_core::constraint::finite_difference;
use gameopt_core::grid::{brute_force_lambda_star, grid_minimize};
use gameopt_core::linalg::{inverse_deviation, uniform, Matrix, Vector};
use gameopt_core::online::{Ons, Sense};
use gameopt_core::problems::{make_perceptron_lp, make_strict_qp};
use gameopt_core::projections::project_simplex;
use gameopt_core::reductions::{log_transform, strictify, strictify_guarantee};
use gameopt_core::solvers::{
    certificate_conflict, primal_dual_game_opt, primal_game_opt, verify_certificate, NullSink, VerifyMethod,
};
use gameopt_core::{ConstraintFn, Domain, Outcome, PrimalLearner, Problem, SolveOptions};
use gameopt_harness::experiments::{regret_experiment, scaling_experiment, Adversary, RegretConfig, ScalingConfig};
use gameopt_harness::file::GeneratorSpec;
use gameopt_harness::run::{Algo, Learner};
use gameopt_harness::OutcomeDocument;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rvec(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vector {
    Vector::from_fn(n, |_, _| rng.random_range(lo..hi))
}

/// Exact Euclidean projection onto the simplex by trying every support.
fn project_by_supports(y: &Vector) -> Vector {
    let n = y.len();
    let mut best = (f64::INFINITY, Vector::zeros(n));
    for mask in 1u32..(1 << n) {
        let k = mask.count_ones() as f64;
        let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| y[i]).sum();
        let shift = (s - 1.0) / k;
        let x = Vector::from_fn(n, |i, _| if mask >> i & 1 == 1 { y[i] - shift } else { 0.0 });
        if x.iter().all(|v| *v >= 0.0) {
            let d = (&x - y).norm_squared();
            if d < best.0 {
                best = (d, x);
            }
        }
    }
    best.1
}

fn c1_projection() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let ys: Vec<Vector> = (0..1000)
        .map(|_| {
            let n = rng.random_range(2..=6);
            rvec(&mut rng, n, -2.0, 2.0)
        })
        .collect();
    let start = Instant::now();
    let proj: Vec<Vector> = ys.iter().map(project_simplex).collect();
    let secs = start.elapsed().as_secs_f64();
    let worst = ys
        .par_iter()
        .zip(&proj)
        .map(|(y, x)| {
            let obj = (x - y).norm_squared();
            if y.len() <= 3 {
                let d = Domain::simplex(y.len()).unwrap();
                let g = grid_minimize(&d, 1e-3, |z| Ok(((z - y).norm_squared(), 2.0 * (z - y).norm()))).unwrap();
                // Must beat every grid point and sit within the slack of the grid minimum.
                if obj > g.value + 1e-12 || obj < g.lower() {
                    return f64::INFINITY;
                }
                g.value - obj
            } else {
                (obj - (project_by_supports(y) - y).norm_squared()).abs()
            }
        })
        .reduce(|| 0.0, f64::max);
    ensure(worst.is_finite() && worst < 1e-2 && secs < 1.0, format!("worst gap {worst:.2e}, {:.1} ms", secs * 1e3))
}

fn families(rng: &mut ChaCha8Rng, n: usize) -> Vec<ConstraintFn> {
    let b = Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let sym = &b * b.transpose() + Matrix::identity(n, n) * 0.1;
    let affine = ConstraintFn::affine(rvec(rng, n, -1.0, 1.0), rng.random_range(-1.0..1.0)).unwrap();
    let quad = ConstraintFn::quadratic(sym, rvec(rng, n, -1.0, 1.0), 0.3).unwrap();
    let rows = (0..3).map(|_| (rvec(rng, n, 0.5, 1.5), 0.0)).collect();
    vec![
        affine.clone(),
        quad.clone(),
        ConstraintFn::log_affine_composite(ConstraintFn::scaled(affine.clone(), -1.0, 0.0).unwrap(), 3.0).unwrap(),
        ConstraintFn::neg_entropy(n).unwrap(),
        ConstraintFn::norm_dist_sq(rvec(rng, n, 0.0, 1.0), 0.2).unwrap(),
        ConstraintFn::scaled(quad.clone(), 0.7, -0.1).unwrap(),
        ConstraintFn::sum(vec![affine, quad]).unwrap(),
        ConstraintFn::log_barrier(rows).unwrap(),
    ]
}

fn c2_gradients() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.random_range(2..=6);
        let x = (Domain::simplex(n).unwrap().sample(&mut rng) + uniform(n)) * 0.5;
        for f in families(&mut rng, n) {
            let g = f.gradient(&x).unwrap();
            let fd = finite_difference(&f, &x, 1e-6).unwrap();
            worst = worst.max((&g - &fd).norm() / (1.0 + g.norm()));
        }
    }
    ensure(worst <= 1e-5, format!("1000 points x 8 families, worst rel err {worst:.2e}"))
}

fn c3_ogd_regret() -> Check {
    let n = 2;
    let r = regret_experiment(&RegretConfig {
        learner: Learner::Ogd,
        adversary: Adversary::Quadratic,
        n,
        horizons: vec![100, 1000, 10_000, 100_000],
        seeds: (0..5).collect(),
    })
    .map_err(|e| e.to_string())?;
    let g = 2.0 * (n as f64).sqrt();
    let cap = 10.0 * g * g;
    let ratio = r.horizons.iter().zip(&r.max_regret).map(|(t, m)| m / (*t as f64).ln()).fold(0.0, f64::max);
    ensure(
        ratio <= cap && r.exponent < 0.3,
        format!("max regret/ln T {ratio:.2} <= {cap:.1}, exponent {:.3}", r.exponent),
    )
}

fn c4_mw_regret() -> Check {
    let upper = regret_experiment(&RegretConfig {
        learner: Learner::Mw,
        adversary: Adversary::Sign,
        n: 2,
        horizons: vec![100, 1000, 10_000, 100_000],
        seeds: (0..20).collect(),
    })
    .map_err(|e| e.to_string())?;
    let within = upper.horizons.iter().zip(&upper.max_regret).all(|(t, m)| *m <= 2.0 * (*t as f64 * 2f64.ln()).sqrt());
    let lower = regret_experiment(&RegretConfig {
        learner: Learner::Mw,
        adversary: Adversary::Sign,
        n: 2,
        horizons: vec![10_000],
        seeds: (100..200).collect(),
    })
    .map_err(|e| e.to_string())?;
    let mean = lower.mean_regret[0];
    ensure(within && mean >= 30.0, format!("upper bound held: {within}; mean regret at 10^4 = {mean:.1} >= 30"))
}

const LADDER: [f64; 3] = [0.1, 0.05, 0.025];

fn scaling(generator: GeneratorSpec, algo: Algo, learner: Learner, band: (f64, f64)) -> Check {
    let start = Instant::now();
    let cfg = ScalingConfig { generator, algo, learner, eps: LADDER.to_vec(), log_transform: false, strictify: None };
    let r = scaling_experiment(&cfg, &SolveOptions::default()).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    ensure(
        (band.0..=band.1).contains(&r.exponent) && secs < 60.0 && !r.incomplete,
        format!("iterations {:?}, exponent {:.3}, {secs:.1} s", r.iterations, r.exponent),
    )
}

fn c5_primal_scaling() -> Check {
    scaling(
        GeneratorSpec::Qp { n: 10, m: 20, h: 1.0, feasible: false, seed: 5 },
        Algo::Primal,
        Learner::Ogd,
        (0.8, 1.3),
    )
}

fn c6_dual_scaling() -> Check {
    let lp = GeneratorSpec::Lp { n: 10, m: 20, margin: 0.1, feasible: true, seed: 6 };
    scaling(lp, Algo::Dual, Learner::Mw, (1.7, 2.3))
}

fn c7_certificates() -> Check {
    const GRID: VerifyMethod = VerifyMethod::Grid { resolution: 1e-3 };
    let eps = 0.1;
    let mut checked = 0;
    let mut conflicts = 0;
    let mut failures = Vec::new();
    for k in 0..50u64 {
        let feasible = k % 2 == 0;
        let n = 2 + (k % 4 >= 2) as usize;
        let g = make_strict_qp(n, 4, 1.0, feasible, 700 + k).map_err(|e| e.to_string())?;
        let pr = &g.problem;
        let mut points: Vec<Vector> = g.witness.iter().cloned().collect();
        let mut duals = Vec::new();
        let runs = [
            primal_game_opt(pr, eps, PrimalLearner::Ogd, &SolveOptions::default(), &mut NullSink),
            primal_dual_game_opt(pr, eps, PrimalLearner::Ogd, &SolveOptions::default(), &mut NullSink),
        ];
        for sol in runs {
            let sol = sol.map_err(|e| e.to_string())?;
            let v = verify_certificate(pr, &sol.outcome, sol.guarantee, GRID).map_err(|e| e.to_string())?;
            checked += 1;
            if !v.valid {
                failures.push(format!("instance {k}: {}", v.report));
            }
            match sol.outcome {
                Outcome::Feasible { x, .. } => points.push(x),
                Outcome::Infeasible { p_bar } => duals.push((p_bar, v.value)),
                _ => {}
            }
        }
        for x in &points {
            for (p, lower) in &duals {
                conflicts += certificate_conflict(pr, x, p, *lower).map_err(|e| e.to_string())? as usize;
            }
        }
    }
    ensure(
        failures.is_empty() && conflicts == 0,
        format!(
            "{checked} certificates on 50 instances, {} failed, {conflicts} conflicts {failures:?}",
            failures.len()
        ),
    )
}

fn c8_strictify() -> Check {
    let eps = 0.05;
    let (delta, guarantee) = strictify_guarantee(eps);
    let mut worst = f64::NEG_INFINITY;
    for seed in 0..20 {
        let g = make_perceptron_lp(3, 6, 0.05, true, 800 + seed).map_err(|e| e.to_string())?;
        let s = strictify(&g.problem, delta).map_err(|e| e.to_string())?;
        let sol = primal_game_opt(&s, eps, PrimalLearner::Ogd, &SolveOptions::default(), &mut NullSink)
            .map_err(|e| e.to_string())?;
        let Outcome::Feasible { x, .. } = &sol.outcome else {
            return Err(format!("seed {seed}: {}", sol.outcome.kind()));
        };
        worst = worst.max(g.problem.values(x).unwrap().max());
    }
    ensure(worst <= guarantee, format!("worst original residual {worst:.4} <= {guarantee}"))
}

fn random_affine(n: usize, m: usize, seed: u64) -> Problem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cs = (0..m)
        .map(|_| ConstraintFn::affine(rvec(&mut rng, n, -1.0, 1.0), rng.random_range(-0.5..0.5)).unwrap())
        .collect();
    Problem::new(cs, Domain::simplex(n).unwrap()).unwrap()
}

fn c9_log_transform() -> Check {
    let e = std::f64::consts::E;
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let pr = random_affine(2, 2, 900 + seed);
        let omega = pr.params().omega;
        let tr = log_transform(&pr, None).map_err(|e| e.to_string())?;
        let rho = brute_force_lambda_star(&pr, 1e-4).map_err(|e| e.to_string())?;
        let lam = brute_force_lambda_star(&tr, 1e-4).map_err(|e| e.to_string())?;
        let expect = 1.0 - (e - rho.value / omega).ln();
        let slack = lam.slack + rho.slack / (omega * (e - 1.0));
        worst = worst.max((lam.value - expect).abs() - slack);
    }
    ensure(worst <= 1e-12, format!("20 instances, worst excess over slack {worst:.2e}"))
}

fn c10_saddle() -> Check {
    let d = Domain::simplex(2).unwrap();
    let game = Problem::new(
        vec![
            ConstraintFn::affine(Vector::from_vec(vec![1.0, -1.0]), 0.0).unwrap(),
            ConstraintFn::affine(Vector::from_vec(vec![-1.0, 1.0]), 0.0).unwrap(),
        ],
        d,
    )
    .unwrap();
    let t = log_transform(&game, None).map_err(|e| e.to_string())?;
    let sol = primal_dual_game_opt(&t, 0.05, PrimalLearner::Ons, &SolveOptions::default(), &mut NullSink)
        .map_err(|e| e.to_string())?;
    let value = sol.value_estimate.unwrap_or(f64::NAN);
    ensure(value.abs() <= 0.05, format!("value estimate {value:.4} after {} rounds", sol.iterations))
}

fn c11_ons() -> Check {
    let n = 10;
    let mut ons = Ons::new(Domain::simplex(n).unwrap(), 1.0, 1.0, 1.0, Sense::Minimize).map_err(|e| e.to_string())?;
    let beta_ok = ons.beta() == 0.125;
    let a0_ok = *ons.matrix() == Matrix::identity(n, n) * 64.0;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10_000 {
        let g = rvec(&mut rng, n, -1.0, 1.0);
        ons.rank_one_update(&g);
    }
    let dev = inverse_deviation(ons.matrix(), ons.inverse());
    ensure(beta_ok && a0_ok && dev <= 1e-6, format!("beta {}, A0 = 64I: {a0_ok}, deviation {dev:.2e}", ons.beta()))
}

fn c12_cli() -> Check {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("testdata");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cases: [(&str, &[&str], i32); 3] = [
        ("feasible", &["--eps", "0.1"], 0),
        ("infeasible", &["--eps", "0.1"], 2),
        ("hard", &["--eps", "0.01", "--max-iters", "1"], 3),
    ];
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, extra, want) in cases {
        let out = dir.path().join(format!("{name}.out.json"));
        let problem = data.join(format!("{name}.json"));
        let output = Command::new(env!("CARGO_BIN_EXE_gameopt"))
            .args(["solve", "--problem", problem.to_str().unwrap(), "--algo", "primal"])
            .args(extra)
            .args(["--out", out.to_str().unwrap()])
            .output()
            .map_err(|e| e.to_string())?;
        let code = output.status.code().unwrap_or(-1);
        let text = std::fs::read_to_string(&out).map_err(|e| e.to_string())?;
        let doc = OutcomeDocument::from_json(&text).map_err(|e| e.to_string())?;
        let valid = doc.verify(None).map_err(|e| e.to_string())?.valid;
        // Capped runs carry no certificate, so only the other two must re-verify.
        ok &= code == want && valid == (want != 3);
        lines.push(format!("{name}: exit {code}, re-verified {valid}"));
    }
    ensure(ok, lines.join("; "))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 12] = [
        ("simplex projection matches brute force", c1_projection),
        ("gradients match finite differences", c2_gradients),
        ("gradient descent regret is logarithmic", c3_ogd_regret),
        ("multiplicative weights regret is order root T", c4_mw_regret),
        ("primal iterations scale as 1/eps", c5_primal_scaling),
        ("dual iterations scale as 1/eps^2", c6_dual_scaling),
        ("certificates verify without conflicts", c7_certificates),
        ("strictified solutions meet 2 eps", c8_strictify),
        ("log transform maps the game value", c9_log_transform),
        ("primal-dual recovers the saddle value", c10_saddle),
        ("newton step stays numerically stable", c11_ons),
        ("command line exit codes and re-verification", c12_cli),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = run();
        let secs = start.elapsed().as_secs_f64();
        match &res {
            Ok(d) => println!("PASS [{:>2}] {name}: {d} ({secs:.2} s)", i + 1),
            Err(d) => {
                println!("FAIL [{:>2}] {name}: {d} ({secs:.2} s)", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
