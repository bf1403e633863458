//! End-to-end tests against the built binary.

use std::io::Write;
use std::process::{Command, Output};

fn krelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_krelab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_csv(dir: &std::path::Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    path.to_str().unwrap().to_string()
}

fn tempdir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("krelab-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn eval_self_difference_is_empty() {
    let dir = tempdir("selfdiff");
    let r = write_csv(&dir, "r.csv", "a,@k\n1,2\n2,3\n");
    let out = krelab(&[
        "eval",
        "--instance",
        "nat",
        "--query",
        "R - R",
        "--rel",
        &format!("R={r}"),
    ]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "");
}

#[test]
fn eval_security_monus_keeps_less_secure_annotation() {
    let dir = tempdir("security");
    let r = write_csv(&dir, "r.csv", "t,@k\n0,S\n");
    let s = write_csv(&dir, "s.csv", "t,@k\n0,T\n");
    let out = krelab(&[
        "eval",
        "--instance",
        "security",
        "--diff",
        "monus",
        "--query",
        "R - S",
        "--rel",
        &format!("R={r}"),
        "--rel",
        &format!("S={s}"),
    ]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "(t=0) : S\n");
}

#[test]
fn eval_ring_subtraction_keeps_negative_annotations() {
    let dir = tempdir("ring");
    let r = write_csv(&dir, "r.csv", "t,@k\n0,2\n");
    let s = write_csv(&dir, "s.csv", "t,@k\n0,5\n");
    let out = krelab(&[
        "eval",
        "--instance",
        "int",
        "--diff",
        "ring",
        "--query",
        "R - S",
        "--rel",
        &format!("R={r}"),
        "--rel",
        &format!("S={s}"),
    ]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "(t=0) : -3\n");
}

#[test]
fn eval_join_project_select_pipeline() {
    let dir = tempdir("pipeline");
    let r = write_csv(&dir, "r.csv", "a,b,@k\n1,x,2\n2,y,3\n");
    let s = write_csv(&dir, "s.csv", "b,c,@k\n x,7,5\n");
    let out = krelab(&[
        "eval",
        "--instance",
        "nat",
        "--query",
        "PROJECT[c] SELECT[a=1] (R JOIN S)",
        "--rel",
        &format!("R={r}"),
        "--rel",
        &format!("S={s}"),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "(c=7) : 10\n");
}

#[test]
fn eval_csv_output_round_trips() {
    let dir = tempdir("roundtrip");
    let r = write_csv(&dir, "r.csv", "a,@k\n1,\"{C,S}\"\n2,{T}\n");
    let out = krelab(&[
        "eval",
        "--instance",
        "sprime",
        "--query",
        "R",
        "--rel",
        &format!("R={r}"),
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    // feed the output back in and render it again: must be identical
    let r2 = write_csv(&dir, "r2.csv", &text);
    let out2 = krelab(&[
        "eval",
        "--instance",
        "sprime",
        "--query",
        "R",
        "--rel",
        &format!("R={r2}"),
        "--format",
        "csv",
    ]);
    assert!(out2.status.success());
    assert_eq!(text, String::from_utf8_lossy(&out2.stdout));
}

#[test]
fn eval_diagnoses_bad_inputs_with_exit_one() {
    let dir = tempdir("diagnostics");
    let r = write_csv(&dir, "r.csv", "a,@k\n1,1\n");
    // parse error with a position
    let out = krelab(&[
        "eval",
        "--instance",
        "nat",
        "--query",
        "R -",
        "--rel",
        &format!("R={r}"),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1:4"));
    // unbound relation
    let out = krelab(&[
        "eval",
        "--instance",
        "nat",
        "--query",
        "R JOIN S",
        "--rel",
        &format!("R={r}"),
    ]);
    assert_eq!(out.status.code(), Some(1));
    // unsupported difference semantics for the instance
    let out = krelab(&[
        "eval",
        "--instance",
        "security",
        "--diff",
        "ring",
        "--query",
        "R - R",
        "--rel",
        &format!("R={r}"),
    ]);
    assert_eq!(out.status.code(), Some(1));
    // usage error from clap
    let out = krelab(&["eval", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn check_expected_failure_exits_zero() {
    let out = krelab(&["check", "--instance", "security", "--axiom", "A13"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("fails"));
}

#[test]
fn check_all_axioms_on_sprime() {
    let out = krelab(&[
        "check",
        "--instance",
        "sprime",
        "--all-axioms",
        "--format",
        "records",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().count(), 13);
    assert!(text
        .lines()
        .all(|l| l.contains("verdict=holds-exhaustive")));
}

#[test]
fn check_identity_and_galois_selectors() {
    let out = krelab(&[
        "check",
        "--instance",
        "nat",
        "--identity",
        "I11",
        "--galois",
        "--trials",
        "500",
        "--format",
        "records",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("subject=I11"));
    assert!(text.contains("subject=galois"));
    // bad selector is a usage error
    let out = krelab(&["check", "--instance", "nat", "--axiom", "A99"]);
    assert_eq!(out.status.code(), Some(1));
    // no target at all
    let out = krelab(&["check", "--instance", "nat"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn check_ring_semantics_reports_expected_failures() {
    let out = krelab(&[
        "check",
        "--instance",
        "int",
        "--diff",
        "ring",
        "--all-axioms",
        "--format",
        "records",
        "--trials",
        "2000",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    let line = |ax: &str| {
        text.lines()
            .find(|l| l.contains(&format!("subject={ax} ")))
            .unwrap()
            .to_string()
    };
    assert!(line("A9").contains("holds-sampled"));
    assert!(line("A10").contains("fails"));
    assert!(line("A11").contains("fails"));
    assert!(line("A12").contains("holds-sampled"));
    assert!(line("A13").contains("holds-sampled"));
}

#[test]
fn starved_sampling_yields_an_unexpected_verdict_and_exit_two() {
    // one trial on the three-element chain misses the A13 witness, so the
    // check reports holds-sampled where a failure is expected
    let out = krelab(&[
        "check", "--instance", "tvl", "--axiom", "A13", "--trials", "1", "--seed", "1",
        "--format", "records",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("UNEXPECTED"), "{text}");
}

#[test]
fn table3_has_verdict_line_per_instance_and_exits_zero() {
    let out = krelab(&["table3", "--format", "records"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().count(), 14);
    for name in [
        "bool", "nat", "rplus", "trop", "fuzz", "tvl", "security", "sprime", "natpoly",
        "boolpoly", "posbool", "boolexpr", "why", "trio",
    ] {
        assert!(
            text.lines()
                .any(|l| l.contains(&format!("instance={name} "))),
            "missing verdict line for {name}"
        );
    }
    for adjudicated in ["natpoly", "boolpoly", "why", "trio"] {
        let line = text
            .lines()
            .find(|l| l.contains(&format!("instance={adjudicated} ")))
            .unwrap();
        assert!(line.contains("agree=no"));
        assert!(line.contains("adjudicated=yes"));
    }
    // `table3` is an alias for `check --table3`
    let alias = krelab(&["check", "--table3", "--format", "records"]);
    assert_eq!(alias.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&alias.stdout), text);
}

#[test]
fn enumerate_prints_census_and_enforces_bounds() {
    let out = krelab(&["enumerate", "2", "--dump"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("order 2: 2 commutative semirings"));
    assert!(text.contains("monus"));

    let out = krelab(&["enumerate", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("order 3: 6 commutative semirings"));
    assert!(text.contains("naturally ordered: 4"));
    assert!(text.contains("satisfying A13: 1"));

    let out = krelab(&["enumerate", "9"]);
    assert_eq!(out.status.code(), Some(1));
    let out = krelab(&["enumerate", "4"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn embed_security_prints_the_map() {
    let out = krelab(&["embed-security"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("1s -> {1s,C,S,T}"));
    assert!(text.contains("0s -> {}"));
    assert!(text.contains("verified"));
    assert!(text.contains("monus preservation"));
}

#[test]
fn quoted_string_constants_select() {
    let dir = tempdir("strings");
    let r = write_csv(&dir, "r.csv", "a,b,@k\n1,foo,2\n2,bar,3\n");
    let out = krelab(&[
        "eval",
        "--instance",
        "nat",
        "--query",
        "SELECT[b=\"foo\"] R",
        "--rel",
        &format!("R={r}"),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "(a=1, b=foo) : 2\n");
}
