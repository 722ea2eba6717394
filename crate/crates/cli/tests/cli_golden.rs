//! End-to-end tests of the `qmzv` binary: golden byte-identical outputs,
//! format round trips, exit codes, and the config precedence chain.

use std::process::{Command, Output};

use qmzv_core::bimould::mould_rational_to_json;
use qmzv_core::eisenstein::{BetaTable, EisensteinContext, EisensteinParams};
use qmzv_core::qseries::parse_qseries;
use qmzv_core::quasishuffle::{engine, ProductId};
use qmzv_core::words::{parse_lincomb, parse_word};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_qmzv"));
    // Tests control the environment explicitly.
    c.env_remove("QMZV_ORDER");
    c.current_dir(env!("CARGO_TARGET_TMPDIR"));
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn golden_text_outputs() {
    assert_eq!(
        stdout_of(&["zq", "2", "--order", "4"]),
        "-1/24 + q + 3q^2 + 4q^3 + 7q^4\n"
    );
    assert_eq!(stdout_of(&["tau", "b2 b1"]), "b1 b1 b0\n");
    assert_eq!(
        stdout_of(&["mul", "--product", "balanced", "b1", "b1"]),
        "2*b1 b1 + b2\n"
    );
    assert_eq!(
        stdout_of(&["limit", "b1 b0 b3"]),
        "zeta_sh(x0 x1) * zeta_st(y3)\n"
    );
    assert_eq!(stdout_of(&["limit", "b2 b0 b2"]), "0\n");
    assert_eq!(stdout_of(&["phi", "--dir", "fwd", "y(2|0) y(1|1)"]), "b2 b1 b0\n");
}

#[test]
fn golden_json_outputs() {
    assert_eq!(
        stdout_of(&["mul", "--product", "balanced", "b1", "b1", "--format", "json"]),
        "{\"b1 b1\":\"2\",\"b2\":\"1\"}\n"
    );
    assert_eq!(
        stdout_of(&["zq", "2", "--order", "4", "--format", "json"]),
        "[\"-1/24\",\"1\",\"3\",\"4\",\"7\"]\n"
    );
    assert_eq!(
        stdout_of(&["limit", "b1 b3", "--format", "json"]),
        "{\"formal\":[{\"x\":\"1\",\"y\":\"y1 y3\"},{\"x\":\"x1\",\"y\":\"y3\"}]}\n"
    );
}

#[test]
fn printed_values_reparse() {
    let text = stdout_of(&["mul", "--product", "balanced", "b2", "b1 b0"]);
    let parsed = parse_lincomb(text.trim()).unwrap();
    let expected = engine()
        .product(
            ProductId::Balanced,
            &parse_word("b2").unwrap(),
            &parse_word("b1 b0").unwrap(),
        )
        .unwrap();
    assert_eq!(parsed, expected);

    let text = stdout_of(&["zq", "2,3", "--order", "8"]);
    let reparsed = parse_qseries(text.trim(), 8).unwrap();
    let ctx =
        EisensteinContext::build(EisensteinParams::new(2, 5, 8)).unwrap();
    assert_eq!(reparsed, ctx.zeta_q(&[2, 3]).unwrap());
}

#[test]
fn index_sugar_forms_agree() {
    let a = stdout_of(&["zq", "2,0,3", "--order", "6"]);
    let b = stdout_of(&["zq", "z(2,0,3)", "--order", "6"]);
    let c = stdout_of(&["zq", "b2 b0 b3", "--order", "6"]);
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn qexp_expressions() {
    // The nested-sum oracle with weight t matches the construction output
    // except for the constant term.
    let oracle = stdout_of(&["qexp", "zq(2;t)", "--order", "4"]);
    assert_eq!(oracle, "q + 3q^2 + 4q^3 + 7q^4\n");
    let closed = stdout_of(&["qexp", "balanced(2,0)", "--order", "4"]);
    assert_eq!(closed, "-1/24 + q + 3q^2 + 4q^3 + 7q^4\n");
    let bracket = stdout_of(&["qexp", "bracket(0,1)", "--order", "4"]);
    assert_eq!(bracket, "q + 3q^2 + 4q^3 + 7q^4\n");
    let delta = stdout_of(&["qexp", "delta", "--order", "3"]);
    assert_eq!(delta, "q - 24q^2 + 252q^3\n");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["nope"]).status.code(), Some(2));
    // Divergent leading index.
    assert_eq!(run(&["zq", "0,1", "--order", "4"]).status.code(), Some(2));
    // Depth three is beyond the construction.
    assert_eq!(run(&["zq", "2,2,2", "--order", "4"]).status.code(), Some(2));
    // Numeric limit without a target.
    assert_eq!(run(&["limit", "b2", "--numeric"]).status.code(), Some(2));
    // Malformed expression.
    assert_eq!(run(&["qexp", "zq(2)"]).status.code(), Some(2));
}

#[test]
fn verify_suite_passes_and_reports() {
    let out = run(&["verify", "--suite", "all", "--maxwt", "4", "--order", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 7, "{text}");
    assert!(lines.iter().all(|l| l.starts_with("[PASS] ")), "{text}");
}

#[test]
fn relations_find_the_weight_two_relation() {
    let out = stdout_of(&[
        "relations", "--weight", "2", "--order", "12", "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["weight"], 2);
    assert_eq!(v["verified_order"], 24); // confirmed at doubled order
    assert_eq!(v["basis"], serde_json::json!(["b2", "b1 b0", "b1 b1"]));
    assert_eq!(
        v["relations"],
        serde_json::json!([{"b2": "1", "b1 b0": "-1"}])
    );
}

#[test]
fn check_accepts_the_seed_mould_and_rejects_a_tampered_one() {
    let ctx = EisensteinContext::build(EisensteinParams::new(2, 8, 1)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("seed.json");
    std::fs::write(&good, mould_rational_to_json(&ctx.seed).to_string()).unwrap();
    for predicate in ["symmetril", "swap"] {
        let out = bin()
            .args(["check", "--predicate", predicate])
            .arg(&good)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{predicate}");
    }

    let mut v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&good).unwrap()).unwrap();
    // Corrupt one depth-two coefficient.
    let (key, _) = v["2"].as_object().unwrap().iter().next().unwrap();
    let key = key.clone();
    v["2"][&key] = serde_json::json!("999");
    let bad = dir.path().join("tampered.json");
    std::fs::write(&bad, v.to_string()).unwrap();
    let out = bin()
        .args(["check", "--predicate", "symmetril"])
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("[FAIL]"), "{text}");
}

#[test]
fn beta_injection_matches_the_builtin_solve() {
    let table = BetaTable::solve(5).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("beta.json");
    std::fs::write(&path, table.to_json().to_string()).unwrap();
    let injected = bin()
        .args(["zq", "2,3", "--order", "6", "--beta"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(injected.status.success());
    let builtin = stdout_of(&["zq", "2,3", "--order", "6"]);
    assert_eq!(String::from_utf8(injected.stdout).unwrap(), builtin);
}

#[test]
fn config_file_and_env_precedence() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("qmzv.toml"), "default_order = 3\n").unwrap();
    let run_in = |envs: &[(&str, &str)], args: &[&str]| -> String {
        let mut c = Command::new(env!("CARGO_BIN_EXE_qmzv"));
        c.env_remove("QMZV_ORDER");
        c.current_dir(dir.path());
        for (k, v) in envs {
            c.env(k, v);
        }
        let out = c.args(args).output().unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        String::from_utf8(out.stdout).unwrap()
    };
    // Config file order.
    assert_eq!(run_in(&[], &["zq", "2"]), "-1/24 + q + 3q^2 + 4q^3\n");
    // Environment beats the file.
    assert_eq!(
        run_in(&[("QMZV_ORDER", "5")], &["zq", "2"]),
        "-1/24 + q + 3q^2 + 4q^3 + 7q^4 + 6q^5\n"
    );
    // Flag beats both.
    assert_eq!(
        run_in(&[("QMZV_ORDER", "5")], &["zq", "2", "--order", "2"]),
        "-1/24 + q + 3q^2\n"
    );
    // Unknown keys are usage errors.
    std::fs::write(dir.path().join("bad.toml"), "mystery = true\n").unwrap();
    let mut c = Command::new(env!("CARGO_BIN_EXE_qmzv"));
    c.env_remove("QMZV_ORDER");
    c.current_dir(dir.path());
    let out = c
        .args(["zq", "2", "--config", "bad.toml"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numeric_limit_is_advisory() {
    // A wildly wrong target still exits zero: the numeric check never gates.
    let out = run(&[
        "limit", "b2", "--numeric", "--target", "100.0", "--order", "30",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("outside tolerance"), "{text}");

    let out = run(&[
        "limit", "b2", "--numeric", "--target", "1.6449340668", "--order", "40",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("within tolerance"), "{text}");
    assert!(text.contains("zeta_st(y2)"), "{text}");
}
