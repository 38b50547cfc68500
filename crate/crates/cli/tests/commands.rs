use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn qrewrite(args: &[&str], stdin: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qrewrite"));
    cmd.args(args).env_remove("QREWRITE_MAX_STEPS");
    run(cmd, stdin)
}

fn run(mut cmd: Command, stdin: Option<&str>) -> Output {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = cmd.stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn path(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_reports_sort() {
    let o = qrewrite(&["check", path(&fixture("table1_row1.term"))], None);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "vector[a]"));
}

#[test]
fn check_reports_sort_error_with_span() {
    let o = qrewrite(&["check"], Some("ip(V:x@a, V:y@b)"));
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("sort error at 0..16"), "{}", stderr(&o));
    assert!(stderr(&o).contains("^^^"));
}

#[test]
fn check_rejects_empty_input() {
    let o = qrewrite(&["check", "-"], Some(""));
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("parse error"));
}

#[test]
fn normalize_teleportation_matches_reference_state() {
    let a = qrewrite(&["normalize", path(&fixture("teleport.term"))], None);
    let b = qrewrite(&["normalize", path(&fixture("teleport_final.term"))], None);
    assert_eq!((code(&a), code(&b)), (0, 0));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stderr(&a).trim().starts_with("steps: "));
}

#[test]
fn normalize_leaves_canonical_input_alone() {
    let o = qrewrite(&["normalize"], Some("timesV(ip(V:phi@a, V:alpha@a), V:phi@a)"));
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "timesV(ip(V:phi@a, V:alpha@a), V:phi@a)");
    assert_eq!(stderr(&o).trim(), "steps: 0");
}

#[test]
fn step_limit_exits_with_resource_code() {
    let t = fixture("teleport.term");
    let o = qrewrite(&["normalize", "--max-steps", "1", path(&t)], None);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("step limit"));

    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qrewrite"));
    cmd.args(["normalize", path(&t)]).env("QREWRITE_MAX_STEPS", "1");
    assert_eq!(code(&run(cmd, None)), 3);
}

#[test]
fn dumped_derivation_replays() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("teleport.deriv");
    let o = qrewrite(&["normalize", path(&fixture("teleport.term")), "--dump-derivation", path(&dump)], None);
    assert_eq!(code(&o), 0);
    let r = qrewrite(&["replay", path(&dump)], None);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    assert!(stdout(&r).starts_with("verified"));
    assert!(stdout(&r).ends_with(&stdout(&o)));
}

#[test]
fn replay_table1() {
    let o = qrewrite(&["replay", path(&fixture("table1.deriv"))], None);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).starts_with("verified: 8 steps"));
}

#[test]
fn replay_reports_tampered_step() {
    let text = std::fs::read_to_string(fixture("table1.deriv")).unwrap();
    let tampered = text.replace("step: multiplyRightApply fwd 2.2\n", "step: multiplyRightApply fwd 2.1\n");
    assert_ne!(text, tampered);
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.deriv");
    std::fs::write(&file, tampered).unwrap();
    let o = qrewrite(&["replay", path(&file)], None);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("step 3 (multiplyRightApply fwd 2.1)"), "{}", stderr(&o));
}

#[test]
fn replay_without_expect_prints_final_term() {
    let text = std::fs::read_to_string(fixture("table1.deriv")).unwrap();
    let open: String = text.lines().filter(|l| !l.starts_with("expect:")).map(|l| format!("{l}\n")).collect();
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("open.deriv");
    std::fs::write(&file, open).unwrap();
    let o = qrewrite(&["replay", path(&file)], None);
    assert_eq!(code(&o), 0);
    let expected = text.lines().find_map(|l| l.strip_prefix("expect:")).unwrap().trim();
    assert_eq!(stdout(&o).lines().last().unwrap(), expected);
}

#[test]
fn replay_rejects_malformed_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("junk.deriv");
    std::fs::write(&file, "not a derivation\n").unwrap();
    assert_eq!(code(&qrewrite(&["replay", path(&file)], None)), 2);
}

#[test]
fn soundness_default_run_passes() {
    let o = qrewrite(&["soundness"], None);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("41 rules, 100 trials each, seed 0: 0 unsound"));
}

#[test]
fn soundness_catches_mutations() {
    for id in ["multiplyLeftIP", "applyProjector"] {
        let o = qrewrite(&["soundness", "--trials", "100", "--mutate", id], None);
        assert_eq!(code(&o), 1);
        let out = stdout(&o);
        let line = out.lines().find(|l| l.contains(id)).unwrap();
        assert!(line.starts_with("UNSOUND"), "{line}");
        assert!(out.contains(": 1 unsound"));
    }
    assert_eq!(code(&qrewrite(&["soundness", "--mutate", "commuteV"], None)), 2);
}

#[test]
fn soundness_is_deterministic_for_a_seed() {
    let args = ["soundness", "--trials", "10", "--seed", "42", "--json"];
    let (a, b) = (qrewrite(&args, None), qrewrite(&args, None));
    assert_eq!(stdout(&a), stdout(&b));
    let report: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(report["seed"], 42);
    assert_eq!(report["rules"].as_array().unwrap().len(), 41);
}

#[test]
fn extra_rule_files_extend_the_registry() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("x.rules");
    std::fs::write(&file, "rule x.flip0: apply(O:x@$s, V:0@$s) -> V:1@$s\n").unwrap();
    let o = qrewrite(&["normalize", "--rules", path(&file)], Some("apply(O:x@q, V:0@q)"));
    assert_eq!(stdout(&o).trim(), "V:1@q");
    let listed = qrewrite(&["rules", "--rules", path(&file)], None);
    assert!(stdout(&listed).contains("rule x.flip0:"));

    std::fs::write(&file, "rule broken apply(\n").unwrap();
    assert_eq!(code(&qrewrite(&["rules", "--rules", path(&file)], None)), 2);
}

#[test]
fn optional_rules_can_be_enabled() {
    let t = "plusS(conjugate(ip(V:x@a, V:y@a)), timesS(-1, ip(V:y@a, V:x@a)))";
    let plain = qrewrite(&["normalize"], Some(t));
    assert_ne!(stdout(&plain).trim(), "0");
    let o = qrewrite(&["normalize", "--optional", "ip.conjugateSymmetry"], Some(t));
    assert_eq!(stdout(&o).trim(), "0");
    assert_eq!(code(&qrewrite(&["normalize", "--optional", "nope"], Some(t))), 2);
}

#[test]
fn dirac_format() {
    let o = qrewrite(&["normalize", "--format", "dirac"], Some("tensorV(V:y@b, V:x@a)"));
    assert_eq!(stdout(&o).trim(), "|x⟩_a ⊗ |y⟩_b");
}

#[test]
fn rules_reference_is_current() {
    let o = qrewrite(&["rules", "--markdown"], None);
    let doc = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../RULES.md")).unwrap();
    assert!(doc == stdout(&o), "RULES.md is stale; regenerate with `qrewrite rules --markdown > RULES.md`");
}
