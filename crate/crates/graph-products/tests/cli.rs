//! End-to-end checks of the `gpcalc` binary: frozen text outputs for each
//! subcommand over one mixed presentation, exit codes, JSON shapes, and
//! byte-for-byte determinism of repeated invocations.

use std::io::Write;
use std::process::{Command, Output};

use tempfile::NamedTempFile;

/// Z/3 * Z * Z along the path a - c - b.
const MIXED_PATH: &str = "vertex a Z/3\nvertex c Z\nvertex b Z\nedge a c\nedge c b\n";

fn spec_file() -> NamedTempFile {
    let mut f = NamedTempFile::new().expect("temp file");
    f.write_all(MIXED_PATH.as_bytes()).expect("write spec");
    f
}

fn gpcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gpcalc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn with_spec(spec: &NamedTempFile, args: &[&str]) -> Vec<String> {
    let mut full = vec![
        "--spec".to_string(),
        spec.path().to_str().expect("utf8 path").to_string(),
    ];
    full.extend(args.iter().map(|s| s.to_string()));
    full
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

#[track_caller]
fn assert_golden(spec: &NamedTempFile, args: &[&str], want_stdout: &str, want_code: i32) {
    let full = with_spec(spec, args);
    let refs: Vec<&str> = full.iter().map(String::as_str).collect();
    let out = gpcalc(&refs);
    assert_eq!(
        out.status.code(),
        Some(want_code),
        "exit code for {args:?}; stderr: {}",
        stderr_of(&out)
    );
    assert_eq!(stdout_of(&out), want_stdout, "stdout for {args:?}");
}

#[test]
fn word_commands_have_frozen_outputs() {
    let spec = spec_file();
    assert_golden(&spec, &["nf", "c*a*c^-1"], "a^1\n", 0);
    assert_golden(&spec, &["nf", "a^5"], "a^2\n", 0);
    assert_golden(&spec, &["mul", "a^2", "a"], "1\n", 0);
    assert_golden(&spec, &["inv", "a*b"], "b^-1*a^2\n", 0);
    assert_golden(&spec, &["order", "a^2"], "3\n", 0);
    assert_golden(&spec, &["order", "a*b"], "infinite\n", 0);
    assert_golden(&spec, &["supp", "a*c^2*b"], "{a, c, b}\n", 0);
    assert_golden(&spec, &["fv", "a*c^2*b"], "{a, c}\n", 0);
    assert_golden(&spec, &["lv", "a*c^2*b"], "{c, b}\n", 0);
    assert_golden(&spec, &["retract", "a*c^2*b", "a,b"], "a^1*b^1\n", 0);
}

#[test]
fn eq_exit_code_reflects_the_answer() {
    let spec = spec_file();
    assert_golden(&spec, &["eq", "c*a*c^-1", "a"], "true\n", 0);
    assert_golden(&spec, &["eq", "a", "b"], "false\n", 1);
}

#[test]
fn parabolic_commands_have_frozen_outputs() {
    let spec = spec_file();
    assert_golden(
        &spec,
        &["pc", "c*a*c^-1"],
        "conjugator: 1\nbase: {a}\nexact: true\n",
        0,
    );
    assert_golden(
        &spec,
        &["pc", "b*a*b^-1", "b*a^2*b^-1"],
        "conjugator: b^1\nbase: {a}\nexact: true\n",
        0,
    );
    assert_golden(
        &spec,
        &["esupp", "b*a*b^-1", "b^2"],
        "{a, b}\nexact: true\n",
        0,
    );
    assert_golden(&spec, &["pnorm", "1", "a"], "conjugator: 1\nbase: {a, c}\n", 0);
    assert_golden(
        &spec,
        &["pint", "c", "a", "1", "a,c"],
        "conjugator: 1\nbase: {a}\n",
        0,
    );
    assert_golden(&spec, &["pmember", "c", "a", "a^2"], "true\n", 0);
    assert_golden(&spec, &["pmember", "b", "a", "a"], "false\n", 1);
}

#[test]
fn kernel_census_and_projection_are_frozen() {
    let spec = spec_file();
    // The kernel of the retraction onto a: the commuting neighbour c gives
    // one copy, the non-neighbour b one copy per power of a.
    assert_golden(
        &spec,
        &["kernel", "a", "b*a*b^-1*a^-1"],
        "axis: a\n\
         kernel vertices: 4\n\
         kernel edges: 3\n\
         realized: complete\n\
         \x20 vertex c Z\n\
         \x20 vertex b@0 Z\n\
         \x20 vertex b@1 Z\n\
         \x20 vertex b@2 Z\n\
         \x20 edge c b@0\n\
         \x20 edge c b@1\n\
         \x20 edge c b@2\n\
         projection: b@0^1*b@1^-1\n",
        0,
    );
}

#[test]
fn tree_actions_are_frozen_and_degenerate_splits_fail() {
    let spec = spec_file();
    assert_golden(
        &spec,
        &["tree", "a", "a*b", "b*a*b^-1"],
        "apex: a\n\
         side A: {c, b}\n\
         side B: {a, c}\n\
         edge: {c}\n\
         a*b: hyperbolic, translation length 2\n\
         b*a*b^-1: elliptic (side B), conjugator b^1\n",
        0,
    );
    // c is adjacent to everything else, so there is no splitting over its
    // link.
    let full = with_spec(&spec, &["tree", "c"]);
    let refs: Vec<&str> = full.iter().map(String::as_str).collect();
    let out = gpcalc(&refs);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout_of(&out).is_empty());
    assert!(stderr_of(&out).contains("degenerate"));
}

#[test]
fn compress_reports_its_steps() {
    let spec = spec_file();
    assert_golden(
        &spec,
        &["compress", "c*a*c^-1"],
        "steps: 1\n\
         \x20 project conjugator: 1 kept: {a}\n\
         presentation:\n\
         \x20 vertex a Z/3\n\
         family:\n\
         \x20 a^1\n\
         exact: true\n",
        0,
    );
}

#[test]
fn classify_outputs_are_frozen() {
    let spec = spec_file();
    assert_golden(
        &spec,
        &["classify", "a*c", "b*c"],
        "verdict: contains a free group of rank 2 (witness survived a bounded search)\n\
         witness: a^1*c^1, c^1*b^1\n\
         budget-limited: false\n",
        0,
    );
    assert_golden(
        &spec,
        &["classify", "c", "c^2"],
        "verdict: infinite cyclic\nbudget-limited: false\n",
        0,
    );
}

#[test]
fn json_outputs_parse_and_carry_the_expected_fields() {
    let spec = spec_file();
    let cases: &[(&[&str], &[&str])] = &[
        (&["--json", "nf", "c*a*c^-1"], &["word"]),
        (&["--json", "pc", "b*a*b^-1"], &["conjugator", "base", "exact"]),
        (&["--json", "esupp", "b^2"], &["vertices", "exact"]),
        (
            &["--json", "kernel", "a"],
            &["axis", "kernel_vertices", "kernel_edges", "complete", "realized"],
        ),
        (
            &["--json", "tree", "a", "a*b"],
            &["apex", "side_a", "side_b", "edge", "actions"],
        ),
        (
            &["--json", "classify", "a*c", "b*c"],
            &["verdict", "kind", "witness", "certified", "budget_limited"],
        ),
        (
            &["--json", "compress", "c*a*c^-1"],
            &["steps", "presentation", "family", "exact"],
        ),
    ];
    for (args, fields) in cases {
        let full = with_spec(&spec, args);
        let refs: Vec<&str> = full.iter().map(String::as_str).collect();
        let out = gpcalc(&refs);
        assert_eq!(out.status.code(), Some(0), "exit for {args:?}");
        let v: serde_json::Value =
            serde_json::from_str(&stdout_of(&out)).expect("stdout is JSON");
        let obj = v.as_object().expect("top level is an object");
        for field in *fields {
            assert!(obj.contains_key(*field), "{args:?} output misses {field}");
        }
    }
    // Spot-check values in one report.
    let full = with_spec(&spec, &["--json", "tree", "a", "a*b"]);
    let refs: Vec<&str> = full.iter().map(String::as_str).collect();
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&gpcalc(&refs))).unwrap();
    assert_eq!(v["actions"][0]["action"], "hyperbolic");
    assert_eq!(v["actions"][0]["translation_length"], 2);
}

#[test]
fn repeated_invocations_are_byte_identical() {
    let spec = spec_file();
    for args in [
        vec!["classify", "a*c", "b*c"],
        vec!["--json", "compress", "b*a*b^-1", "b^2"],
    ] {
        let full = with_spec(&spec, &args);
        let refs: Vec<&str> = full.iter().map(String::as_str).collect();
        let first = gpcalc(&refs);
        let second = gpcalc(&refs);
        assert_eq!(first.stdout, second.stdout, "nondeterministic stdout for {args:?}");
        assert_eq!(first.status.code(), second.status.code());
    }
    // The randomized suites are seeded, so their reports are stable too.
    let args = ["selftest", "normal-forms", "--cases", "5"];
    let first = gpcalc(&args);
    let second = gpcalc(&args);
    assert_eq!(first.status.code(), Some(0), "stderr: {}", stderr_of(&first));
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(
        stdout_of(&first),
        "check suites, seed 42\n  normal-forms: ok (cases=5 checks=5)\noverall: ok (1 suites, 0 failures)\n"
    );
}

#[test]
fn errors_go_to_stderr_with_exit_code_two() {
    let spec = spec_file();
    // (args without --spec, expected stderr fragment)
    let bare: &[(&[&str], &str)] = &[(&["nf", "a"], "needs a group file")];
    for (args, needle) in bare {
        let out = gpcalc(args);
        assert_eq!(out.status.code(), Some(2), "exit for {args:?}");
        assert!(stdout_of(&out).is_empty());
        assert!(
            stderr_of(&out).contains(needle),
            "stderr for {args:?}: {}",
            stderr_of(&out)
        );
    }
    let with: &[(&[&str], &str)] = &[
        (&["nf", "a^"], "expected an integer exponent"),
        (&["nf", "z"], "unknown generator"),
        (&["kernel", "z"], "unknown vertex"),
        (&["retract", "a", "a,z"], "unknown vertex"),
    ];
    for (args, needle) in with {
        let full = with_spec(&spec, args);
        let refs: Vec<&str> = full.iter().map(String::as_str).collect();
        let out = gpcalc(&refs);
        assert_eq!(out.status.code(), Some(2), "exit for {args:?}");
        assert!(stdout_of(&out).is_empty());
        assert!(
            stderr_of(&out).contains(needle),
            "stderr for {args:?}: {}",
            stderr_of(&out)
        );
    }
    // Malformed group files report the file and line.
    let mut bad = NamedTempFile::new().unwrap();
    bad.write_all(b"vertex a Z/1\n").unwrap();
    let full = with_spec(&bad, &["nf", "a"]);
    let refs: Vec<&str> = full.iter().map(String::as_str).collect();
    let out = gpcalc(&refs);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("orders start at 2"));
}
