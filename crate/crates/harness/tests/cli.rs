use std::path::{Path, PathBuf};
use std::process::Command;

use gameopt_core::online::RegretBound;
use gameopt_harness::trace::{read_trace, TRACE_HEADER};
use gameopt_harness::{parse_problem_file, OutcomeDocument};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gameopt"))
}

fn toy(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("testdata").join(format!("{name}.json"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn solve(problem: &Path, extra: &[&str], dir: &Path) -> (i32, OutcomeDocument, String) {
    let out = dir.join("out.json");
    let mut args = vec!["solve", "--problem", problem.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let (code, _, err) = run(&args);
    let doc = std::fs::read_to_string(&out).map(|t| OutcomeDocument::from_json(&t).unwrap());
    match doc {
        Ok(d) => (code, d, err),
        Err(_) => panic!("no outcome written (exit {code}): {err}"),
    }
}

#[test]
fn feasible_toy_exits_zero_with_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let (code, doc, _) = solve(&toy("feasible"), &["--algo", "primal", "--learner", "ogd", "--eps", "0.1"], dir.path());
    assert_eq!(code, 0);
    let gameopt_harness::outcome::OutcomeSpec::Feasible { residuals, .. } = &doc.outcome else { panic!() };
    assert_eq!(residuals.len(), 2);
    assert!(residuals.iter().all(|r| *r <= 0.1));
    assert!(doc.verify(None).unwrap().valid);
}

#[test]
fn infeasible_toy_exits_two_with_certificate() {
    let dir = tempfile::tempdir().unwrap();
    for algo in ["primal", "dual", "primal-dual"] {
        let (code, doc, _) = solve(&toy("infeasible"), &["--algo", algo, "--eps", "0.1"], dir.path());
        assert_eq!(code, 2, "{algo}");
        let outcome = doc.outcome.to_outcome();
        let p = match &outcome {
            gameopt_core::Outcome::Infeasible { p_bar } | gameopt_core::Outcome::EpsilonInfeasible { p_bar } => p_bar,
            other => panic!("{algo}: {other:?}"),
        };
        assert!((p[0] - 1.0).abs() < 1e-12);
        assert!(doc.verify(None).unwrap().valid, "{algo}");
    }
}

#[test]
fn iteration_cap_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let (code, doc, _) = solve(&toy("hard"), &["--algo", "primal", "--eps", "0.01", "--max-iters", "1"], dir.path());
    assert_eq!(code, 3);
    assert!(matches!(doc.outcome, gameopt_harness::outcome::OutcomeSpec::Exhausted { .. }));
    assert_eq!(doc.iterations, 1);
    // Without the cap the same instance is solved.
    let (code, _, _) = solve(&toy("hard"), &["--algo", "primal", "--eps", "0.01"], dir.path());
    assert_eq!(code, 0);
}

#[test]
fn documents_verify_standalone() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&str, &[&str], i32); 4] = [
        ("feasible", &["--algo", "primal-dual", "--eps", "0.1"], 0),
        ("infeasible", &["--algo", "primal", "--eps", "0.1"], 0),
        ("hard", &["--algo", "primal", "--eps", "0.05", "--strictify", "auto"], 0),
        ("hard", &["--algo", "primal", "--eps", "0.01", "--max-iters", "1"], 2),
    ];
    for (i, (name, args, want)) in cases.iter().enumerate() {
        let out = dir.path().join(format!("doc{i}.json"));
        let mut full = vec!["solve", "--problem"];
        let p = toy(name);
        full.push(p.to_str().unwrap());
        full.extend_from_slice(args);
        full.extend_from_slice(&["--out", out.to_str().unwrap()]);
        run(&full);
        let (code, stdout, _) = run(&["verify", "--outcome", out.to_str().unwrap()]);
        assert_eq!(code, *want, "{name} {args:?}: {stdout}");
    }
}

#[test]
fn tampered_certificate_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let (_, mut doc, _) = solve(&toy("feasible"), &["--algo", "primal", "--eps", "0.1"], dir.path());
    if let gameopt_harness::outcome::OutcomeSpec::Feasible { x, .. } = &mut doc.outcome {
        *x = vec![1.0, 0.0];
    }
    let path = dir.path().join("bad.json");
    std::fs::write(&path, doc.to_json()).unwrap();
    let (code, stdout, _) = run(&["verify", "--outcome", path.to_str().unwrap()]);
    assert_eq!(code, 2, "{stdout}");
}

#[test]
fn trace_file_matches_bound_formula() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let (code, doc, _) = solve(
        &toy("infeasible"),
        &["--algo", "primal", "--eps", "0.1", "--trace", trace.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(code, 2);
    let text = std::fs::read_to_string(&trace).unwrap();
    assert_eq!(text.lines().next().unwrap(), TRACE_HEADER);
    let rows = read_trace(text.as_bytes()).unwrap();
    assert_eq!(rows.len() as u64, doc.iterations);
    assert!(rows.windows(2).all(|w| w[0].iter < w[1].iter));
    let p = parse_problem_file(&std::fs::read_to_string(toy("infeasible")).unwrap()).unwrap();
    let bound = RegretBound::Ogd { g: p.params().g, h: p.params().h };
    for r in &rows {
        assert_eq!(r.regret_bound.to_bits(), bound.eval(r.iter).to_bits());
        assert_eq!(r.violated_index, Some(0));
    }
}

#[test]
fn flag_conflicts_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.json");
    let o = out.to_str().unwrap();
    let hard = toy("hard");
    let h = hard.to_str().unwrap();
    let lp = dir.path().join("lp.json");
    let (code, _, err) = run(&["gen", "--family", "lp", "--n", "3", "--m", "4", "--out", lp.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let l = lp.to_str().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        // Affine constraints have no curvature.
        vec!["solve", "--problem", l, "--algo", "primal", "--learner", "ogd", "--eps", "0.1", "--out", o],
        vec!["solve", "--problem", l, "--algo", "primal", "--learner", "ons", "--eps", "0.1", "--out", o],
        vec!["solve", "--problem", h, "--algo", "dual", "--learner", "ogd", "--eps", "0.1", "--out", o],
        vec!["solve", "--problem", h, "--algo", "primal", "--learner", "mw", "--eps", "0.1", "--out", o],
        vec!["solve", "--problem", h, "--algo", "primal", "--eps", "0.1", "--strictify", "auto", "--log-transform"],
        vec!["solve", "--problem", h, "--algo", "primal", "--eps", "-1"],
        vec!["solve", "--problem", h, "--algo", "simplex", "--eps", "0.1"],
        vec!["solve", "--problem", "/nonexistent.json", "--algo", "primal", "--eps", "0.1"],
    ];
    for args in cases {
        let (code, _, err) = run(&args);
        assert_eq!(code, 1, "{args:?}: {err}");
        assert!(!err.is_empty());
    }
    // The fixes the messages point at do work.
    let (code, _, err) =
        run(&["solve", "--problem", l, "--algo", "primal", "--eps", "0.1", "--strictify", "auto", "--out", o]);
    assert_eq!(code, 0, "{err}");
    let (code, _, err) = run(&[
        "solve",
        "--problem",
        l,
        "--algo",
        "primal",
        "--learner",
        "ons",
        "--log-transform",
        "--eps",
        "0.1",
        "--out",
        o,
    ]);
    assert_eq!(code, 0, "{err}");
    let doc = OutcomeDocument::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(doc.transform.as_ref().unwrap().log_transform_omega.is_some());
    assert!(doc.verify(None).unwrap().valid);
}

#[test]
fn generator_files_and_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("qp.json");
    let (code, _, err) = run(&[
        "gen",
        "--family",
        "qp",
        "--n",
        "3",
        "--m",
        "4",
        "--infeasible",
        "--spec-only",
        "--out",
        spec.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let (a, da, _) = solve(&spec, &["--algo", "primal", "--eps", "0.1", "--seed", "3"], dir.path());
    let (b, db, _) = solve(&spec, &["--algo", "primal", "--eps", "0.1", "--seed", "3"], dir.path());
    assert_eq!((a, b), (2, 2));
    assert_eq!(da, db);
    let (_, dc, _) = solve(&spec, &["--algo", "primal", "--eps", "0.1", "--seed", "4"], dir.path());
    assert_ne!(da.problem, dc.problem);

    for family in ["qp", "lp", "portfolio", "entropy", "crp"] {
        let path = dir.path().join(format!("{family}.json"));
        let (code, _, err) =
            run(&["gen", "--family", family, "--n", "3", "--seed", "1", "--out", path.to_str().unwrap()]);
        assert_eq!(code, 0, "{family}: {err}");
        parse_problem_file(&std::fs::read_to_string(&path).unwrap()).unwrap();
    }
}

#[test]
fn experiments_print_reports() {
    let (code, out, err) = run(&[
        "experiment",
        "--kind",
        "regret",
        "--learner",
        "mw",
        "--adversary",
        "sign",
        "--horizons",
        "100,1000",
        "--runs",
        "4",
    ]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["mean_regret"].as_array().unwrap().len(), 2);

    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("lp.json");
    run(&["gen", "--family", "lp", "--n", "4", "--m", "6", "--spec-only", "--out", spec.to_str().unwrap()]);
    let (code, out, err) = run(&[
        "experiment",
        "--kind",
        "scaling",
        "--generator",
        spec.to_str().unwrap(),
        "--algo",
        "dual",
        "--learner",
        "mw",
    ]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let iters: Vec<u64> = v["iterations"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
    assert!(iters.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(v["incomplete"], false);
}
