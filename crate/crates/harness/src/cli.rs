use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gameopt_core::solvers::{TraceRecord, VerifyMethod};
use gameopt_core::{Outcome, SolveOptions};

use crate::experiments::{regret_experiment, scaling_experiment, Adversary, RegretConfig, ScalingConfig};
use crate::file::{emit_problem, parse_document, GeneratorSpec, ProblemFile};
use crate::outcome::OutcomeDocument;
use crate::run::{solve_to_document, Algo, Learner, Strictify, Transform};
use crate::trace::write_trace;

pub const EXIT_FEASIBLE: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_INFEASIBLE: u8 = 2;
pub const EXIT_EXHAUSTED: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "gameopt", version, about = "Convex feasibility through online-learning games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a problem file. Exit code 0: feasible, 2: infeasible, 3: iteration cap.
    Solve(SolveArgs),
    /// Write a generated problem file.
    Gen(GenArgs),
    /// Run a regret or scaling experiment and print its report.
    Experiment(ExperimentArgs),
    /// Recheck an outcome document. Exit code 0: certified, 2: not certified.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub problem: PathBuf,
    #[arg(long, value_enum)]
    pub algo: Algo,
    /// Defaults to mw for the dual solver and ogd otherwise.
    #[arg(long, value_enum)]
    pub learner: Option<Learner>,
    #[arg(long)]
    pub eps: f64,
    /// Add `δ‖x‖² - δ` to every constraint; `auto` uses `δ = eps`.
    #[arg(long, value_name = "DELTA|auto")]
    pub strictify: Option<Strictify>,
    /// Solve `1 - log(e - f/ω) <= 0` at `eps/(3ω)` instead.
    #[arg(long)]
    pub log_transform: bool,
    /// Width for --log-transform; checked against sampled values.
    #[arg(long, requires = "log_transform")]
    pub omega: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<u64>,
    /// CSV trace destination.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Replaces the seed of a generator-based problem file.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Outcome document destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Qp,
    Lp,
    Portfolio,
    Entropy,
    Crp,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Number of constraints (qp, lp, portfolio, entropy).
    #[arg(long, default_value_t = 5)]
    pub m: usize,
    /// Curvature floor for qp.
    #[arg(long, default_value_t = 1.0)]
    pub h: f64,
    /// Planted margin for lp.
    #[arg(long, default_value_t = 0.1)]
    pub margin: f64,
    /// Radius parameter for entropy and crp.
    #[arg(long, default_value_t = 0.1)]
    pub c: f64,
    /// Objective level for entropy and crp.
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<f64>,
    /// Days of price relatives for crp.
    #[arg(long, default_value_t = 30)]
    pub t_days: usize,
    /// Generate an infeasible qp or lp.
    #[arg(long)]
    pub infeasible: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the generator spec instead of explicit constraints.
    #[arg(long)]
    pub spec_only: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl GenArgs {
    pub fn spec(&self) -> GeneratorSpec {
        let (n, m, seed) = (self.n, self.m, self.seed);
        match self.family {
            Family::Qp => GeneratorSpec::Qp { n, m, h: self.h, feasible: !self.infeasible, seed },
            Family::Lp => GeneratorSpec::Lp { n, m, margin: self.margin, feasible: !self.infeasible, seed },
            Family::Portfolio => GeneratorSpec::Portfolio { n, m, seed },
            Family::Entropy => GeneratorSpec::Entropy { n, m, c: self.c, tau: self.tau, seed },
            Family::Crp => GeneratorSpec::Crp { n, t_days: self.t_days, c: self.c, tau: self.tau, seed },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentKind {
    Regret,
    Scaling,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long, value_enum)]
    pub kind: ExperimentKind,
    #[arg(long, value_enum, default_value_t = Learner::Mw)]
    pub learner: Learner,
    /// Regret: the cost stream.
    #[arg(long, value_enum, default_value_t = Adversary::Sign)]
    pub adversary: Adversary,
    /// Regret: dimension of the stream (the sign stream is always 2-d).
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Regret: horizons.
    #[arg(long, value_delimiter = ',', default_values_t = [100u64, 1000, 10000])]
    pub horizons: Vec<u64>,
    /// Regret: number of seeds, starting at --seed.
    #[arg(long, default_value_t = 20)]
    pub runs: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Scaling: problem file holding a generator spec.
    #[arg(long)]
    pub generator: Option<PathBuf>,
    /// Scaling: solver.
    #[arg(long, value_enum, default_value_t = Algo::Dual)]
    pub algo: Algo,
    /// Scaling: halving eps ladder.
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.05, 0.025])]
    pub eps: Vec<f64>,
    #[arg(long)]
    pub strictify: Option<f64>,
    #[arg(long)]
    pub log_transform: bool,
    #[arg(long)]
    pub max_iters: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Auto,
    Grid,
    Convex,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub outcome: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 1e-3)]
    pub resolution: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

fn write_output(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn load_problem_file(path: &Path, seed: Option<u64>) -> anyhow::Result<ProblemFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut doc = parse_document(&text).with_context(|| format!("parsing {}", path.display()))?;
    if let Some(s) = seed {
        match doc.generator.as_mut() {
            Some(g) => *g.seed_mut() = s,
            None => eprintln!("note: --seed has no effect on a file with explicit constraints"),
        }
    }
    Ok(doc)
}

fn solve_cmd(args: &SolveArgs) -> anyhow::Result<u8> {
    let problem = load_problem_file(&args.problem, args.seed)?
        .to_problem()
        .with_context(|| format!("loading {}", args.problem.display()))?;
    let learner = args.learner.unwrap_or(if args.algo == Algo::Dual { Learner::Mw } else { Learner::Ogd });
    let transform = Transform { strictify: args.strictify, log_transform: args.log_transform, omega: args.omega };
    let opts = SolveOptions { max_iters: args.max_iters };
    let mut trace: Vec<TraceRecord> = Vec::new();
    let (sol, doc) = solve_to_document(&problem, args.algo, learner, args.eps, &transform, &opts, &mut trace)?;
    if let Some(path) = &args.trace {
        let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_trace(BufWriter::new(f), &trace)?;
    }
    write_output(args.out.as_deref(), &doc.to_json())?;
    eprintln!("{} after {} iterations (threshold {:?})", sol.outcome.kind(), sol.iterations, sol.threshold);
    Ok(match sol.outcome {
        Outcome::Feasible { .. } => EXIT_FEASIBLE,
        Outcome::Infeasible { .. } | Outcome::EpsilonInfeasible { .. } => EXIT_INFEASIBLE,
        Outcome::Exhausted { .. } => EXIT_EXHAUSTED,
    })
}

fn gen_cmd(args: &GenArgs) -> anyhow::Result<u8> {
    let spec = args.spec();
    let text = if args.spec_only {
        let file = ProblemFile::from_generator(spec);
        // Fail here rather than at solve time.
        file.to_problem()?;
        let mut s = serde_json::to_string_pretty(&file)?;
        s.push('\n');
        s
    } else {
        emit_problem(&spec.generate()?.problem)
    };
    write_output(args.out.as_deref(), &text)?;
    Ok(EXIT_FEASIBLE)
}

fn experiment_cmd(args: &ExperimentArgs) -> anyhow::Result<u8> {
    let text = match args.kind {
        ExperimentKind::Regret => {
            let cfg = RegretConfig {
                learner: args.learner,
                adversary: args.adversary,
                n: args.dim,
                horizons: args.horizons.clone(),
                seeds: (args.seed..args.seed + args.runs).collect(),
            };
            serde_json::to_string_pretty(&regret_experiment(&cfg)?)?
        }
        ExperimentKind::Scaling => {
            let Some(path) = &args.generator else { bail!("scaling experiments need --generator FILE") };
            let file = load_problem_file(path, None)?;
            let Some(generator) = file.generator else { bail!("{} has no generator spec", path.display()) };
            let cfg = ScalingConfig {
                generator,
                algo: args.algo,
                learner: args.learner,
                eps: args.eps.clone(),
                log_transform: args.log_transform,
                strictify: args.strictify,
            };
            serde_json::to_string_pretty(&scaling_experiment(&cfg, &SolveOptions { max_iters: args.max_iters })?)?
        }
    };
    write_output(args.out.as_deref(), &(text + "\n"))?;
    Ok(EXIT_FEASIBLE)
}

fn verify_cmd(args: &VerifyArgs) -> anyhow::Result<u8> {
    let text = std::fs::read_to_string(&args.outcome).with_context(|| format!("reading {}", args.outcome.display()))?;
    let doc = OutcomeDocument::from_json(&text)?;
    let method = match args.method {
        MethodArg::Auto => None,
        MethodArg::Grid => Some(VerifyMethod::Grid { resolution: args.resolution }),
        MethodArg::Convex => Some(VerifyMethod::Convex { tol: args.tol }),
    };
    let check = doc.verify(method)?;
    for line in &check.lines {
        println!("{line}");
    }
    println!("{}", if check.valid { "certified" } else { "not certified" });
    Ok(if check.valid { EXIT_FEASIBLE } else { EXIT_INFEASIBLE })
}

pub fn run(cli: &Cli) -> u8 {
    let res = match &cli.command {
        Command::Solve(a) => solve_cmd(a),
        Command::Gen(a) => gen_cmd(a),
        Command::Experiment(a) => experiment_cmd(a),
        Command::Verify(a) => verify_cmd(a),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}
