use gameopt_core::problems::*;
use gameopt_core::reductions::{log_transform, strictify};
use gameopt_core::Problem;
use gameopt_harness::file::{parse_document, GeneratorSpec, ProblemFile};
use gameopt_harness::{emit_problem, parse_problem_file, FileError};

fn samples() -> Vec<Problem> {
    let lp = make_perceptron_lp(4, 6, 0.1, true, 1).unwrap().problem;
    vec![
        make_strict_qp(3, 4, 1.0, true, 1).unwrap().problem,
        make_strict_qp(3, 4, 1.0, false, 2).unwrap().problem,
        strictify(&lp, 0.05).unwrap(),
        log_transform(&lp, None).unwrap(),
        lp,
        make_portfolio_risk(4, 3, 1).unwrap().problem,
        make_entropy_problem(3, 2, 0.2, None, 1).unwrap().problem,
        make_crp_problem(3, 8, 0.1, None, 1).unwrap().problem,
    ]
}

#[test]
fn emit_then_parse_is_identity() {
    for p in samples() {
        let text = emit_problem(&p);
        let back = parse_problem_file(&text).unwrap();
        assert_eq!(back, p);
        assert_eq!(emit_problem(&back), text, "canonical text is byte-stable");
    }
}

#[test]
fn asymmetric_matrix_is_rejected_with_field() {
    let text = r#"{
        "version": 1,
        "domain": {"type": "simplex", "n": 2},
        "constraints": [
            {"family": "affine", "a": [1.0, 0.0], "b": 0.0},
            {"family": "quadratic", "a": [[1.0, 0.001], [0.0, 1.0]], "b": [0.0, 0.0], "c": 0.0}
        ]
    }"#;
    match parse_problem_file(text) {
        Err(FileError::Invalid { field, msg }) => {
            assert_eq!(field, "constraints[1].a");
            assert!(msg.contains("symmetric"), "{msg}");
        }
        other => panic!("expected a field error, got {other:?}"),
    }
}

#[test]
fn structural_errors_name_their_field() {
    let cases = [
        (
            r#"{"version": 1, "domain": {"type": "simplex", "n": 3}, "constraints": [{"family": "affine", "a": [1.0], "b": 0.0}]}"#,
            "constraints[0].a",
        ),
        (r#"{"version": 1, "domain": {"type": "simplex", "n": 2}}"#, "constraints"),
        (
            r#"{"version": 1, "domain": {"type": "simplex", "n": 2}, "constraints": [{"family": "neg_entropy", "n": 2}], "generator": {"family": "portfolio", "n": 2, "m": 1, "seed": 0}}"#,
            "constraints",
        ),
        (
            r#"{"version": 2, "domain": {"type": "simplex", "n": 2}, "constraints": [{"family": "neg_entropy", "n": 2}]}"#,
            "version",
        ),
        (r#"{"version": 1, "constraints": [{"family": "neg_entropy", "n": 2}]}"#, "domain"),
        (
            r#"{"version": 1, "domain": {"type": "simplex", "n": 2}, "constraints": [{"family": "scaled", "scale": 2.0, "offset": 0.0, "inner": {"family": "norm_dist_sq", "center": [1.0], "c": 0.1}}]}"#,
            "constraints[0].inner.center",
        ),
        (
            r#"{"version": 1, "domain": {"type": "simplex", "n": 2}, "constraints": [{"family": "neg_entropy", "n": 2}], "params": {"g": -1.0}}"#,
            "params",
        ),
    ];
    for (text, want) in cases {
        match parse_problem_file(text) {
            Err(FileError::Invalid { field, .. }) => assert_eq!(field, want, "{text}"),
            other => panic!("{text}: expected a field error, got {other:?}"),
        }
    }
}

#[test]
fn syntax_errors_carry_position() {
    let text = "{\n  \"version\": 1,\n  \"domain\": {\"type\": \"simplex\", \"n\": 2},\n  \"constraints\": [oops]\n}";
    match parse_problem_file(text) {
        Err(FileError::Syntax { line, .. }) => assert_eq!(line, 4),
        other => panic!("expected a syntax error, got {other:?}"),
    }
    let unknown = r#"{"version": 1, "domain": {"type": "simplex", "n": 2, "radius": 1.0}, "constraints": []}"#;
    assert!(matches!(parse_problem_file(unknown), Err(FileError::Syntax { .. })));
    let family = r#"{"version": 1, "domain": {"type": "simplex", "n": 2}, "constraints": [{"family": "cubic"}]}"#;
    assert!(matches!(parse_problem_file(family), Err(FileError::Syntax { .. })));
}

#[test]
fn generator_files_expand_deterministically() {
    let spec = GeneratorSpec::Qp { n: 3, m: 4, h: 1.0, feasible: false, seed: 7 };
    let file = ProblemFile::from_generator(spec.clone());
    let text = serde_json::to_string(&file).unwrap();
    assert_eq!(parse_document(&text).unwrap(), file);
    let p = parse_problem_file(&text).unwrap();
    assert_eq!(p, make_strict_qp(3, 4, 1.0, false, 7).unwrap().problem);

    let with_domain = text.replace("\"version\":1", "\"version\":1,\"domain\":{\"type\":\"simplex\",\"n\":4}");
    assert!(matches!(parse_problem_file(&with_domain), Err(FileError::Invalid { .. })));
}

#[test]
fn ball_and_box_domains_round_trip() {
    let text = r#"{
        "version": 1,
        "domain": {"type": "ball", "radius": 2.0, "center": [0.0, 1.0]},
        "constraints": [{"family": "log_barrier", "rows": [{"a": [1.0, 0.0], "b": 3.0}]}]
    }"#;
    let p = parse_problem_file(text).unwrap();
    assert_eq!(parse_problem_file(&emit_problem(&p)).unwrap(), p);
    let text = r#"{
        "version": 1,
        "domain": {"type": "box", "lo": [0.0, 0.0], "hi": [1.0, 2.0]},
        "constraints": [{"family": "sum", "parts": [
            {"family": "affine", "a": [1.0, 1.0], "b": -1.0},
            {"family": "log_affine_composite", "omega": 4.0, "inner": {"family": "affine", "a": [0.5, 0.5], "b": 1.0}}
        ]}]
    }"#;
    let p = parse_problem_file(text).unwrap();
    assert_eq!(parse_problem_file(&emit_problem(&p)).unwrap(), p);
}
