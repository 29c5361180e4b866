use std::fs;
use std::path::PathBuf;

use assert_cmd::Command;
use tempfile::tempdir;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

fn cmd() -> Command {
    let mut c = Command::cargo_bin("deploy-htn").unwrap();
    c.env_remove("DEPLOY_TIME_BUDGET");
    c
}

fn stdout(out: &std::process::Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &std::process::Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn plan_wordpress() {
    let out = cmd()
        .args(["plan", "-p"])
        .arg(fixture("wordpress.pddl"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let expected = fs::read_to_string(fixture("wordpress_plan.txt")).unwrap();
    assert_eq!(stdout(&out), expected);
    assert!(stderr(&out).contains("expansions="));
}

#[test]
fn plan_output_is_reproducible() {
    let dir = tempdir().unwrap();
    let mut files = Vec::new();
    for n in 0..2 {
        let path = dir.path().join(format!("plan{n}.txt"));
        cmd()
            .args(["plan", "-p"])
            .arg(fixture("wordpress.pddl"))
            .arg("-o")
            .arg(&path)
            .assert()
            .success()
            .stdout("");
        files.push(fs::read(&path).unwrap());
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn plan_numeric_ids() {
    let out = cmd()
        .args(["plan", "--numeric-ids", "-p"])
        .arg(fixture("wordpress.pddl"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("1.  (createInstance wordpress i0)\n"));
}

#[test]
fn validate_corrected_plan() {
    cmd()
        .args(["validate", "-p"])
        .arg(fixture("wordpress.pddl"))
        .arg("-l")
        .arg(fixture("wordpress_plan.txt"))
        .assert()
        .code(0)
        .stdout("valid (10 steps)\n");
}

#[test]
fn validate_swapped_plan_names_step_3() {
    let out = cmd()
        .args(["validate", "-p"])
        .arg(fixture("wordpress.pddl"))
        .arg("-l")
        .arg(fixture("wordpress_plan_swapped.txt"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stdout(&out).starts_with("invalid: step 3:"),
        "{}",
        stdout(&out)
    );
}

#[test]
fn no_plan_within_bounds() {
    let dir = tempdir().unwrap();
    let problem = dir.path().join("dead.pddl");
    fs::write(
        &problem,
        "(define (problem dead) (:domain deployment)
         (:objects a - component q - port)
         (:init (installed-require a q) (= (instance-number) 0))
         (:htn :tasks (install a) :ordering () :constraints ()))",
    )
    .unwrap();
    let out = cmd().args(["plan", "-p"]).arg(&problem).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("no plan"));
    assert_eq!(stdout(&out), "");
}

#[test]
fn parse_errors_exit_2() {
    let dir = tempdir().unwrap();
    let problem = dir.path().join("bad.pddl");
    fs::write(
        &problem,
        "(define (problem bad) (:domain deployment)\n  (:init (frobnicate a)))",
    )
    .unwrap();
    let out = cmd().args(["show", "-p"]).arg(&problem).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bad.pddl:2:"), "{}", stderr(&out));

    let plan = dir.path().join("plan.txt");
    fs::write(&plan, "1. (launch a1)\n").unwrap();
    let out = cmd()
        .args(["validate", "-p"])
        .arg(fixture("wordpress.pddl"))
        .arg("-l")
        .arg(&plan)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown action"));

    cmd()
        .args(["show", "-p", "/nonexistent/problem.pddl"])
        .assert()
        .code(2);
}

#[test]
fn usage_errors_exit_2() {
    let out = cmd().args(["plan", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("Usage"));
    cmd().arg("validate").assert().code(2);
    cmd()
        .args([
            "generate",
            "--components",
            "3",
            "--ports",
            "3",
            "--seed",
            "1",
            "--difficulty",
            "brutal",
        ])
        .assert()
        .code(2);
}

#[test]
fn invalid_limits_exit_2() {
    cmd()
        .args(["plan", "--max-depth", "0", "-p"])
        .arg(fixture("wordpress.pddl"))
        .assert()
        .code(2);
    cmd()
        .env("DEPLOY_TIME_BUDGET", "soon")
        .args(["plan", "-p"])
        .arg(fixture("wordpress.pddl"))
        .assert()
        .code(2);
}

#[test]
fn time_budget_from_environment() {
    cmd()
        .env("DEPLOY_TIME_BUDGET", "5")
        .args(["plan", "-p"])
        .arg(fixture("wordpress.pddl"))
        .assert()
        .success();
}

#[test]
fn generate_show_and_plan() {
    let dir = tempdir().unwrap();
    let a = dir.path().join("a.pddl");
    let b = dir.path().join("b.pddl");
    for path in [&a, &b] {
        cmd()
            .args([
                "generate",
                "--components",
                "3",
                "--ports",
                "3",
                "--seed",
                "42",
                "--difficulty",
                "easy",
                "-o",
            ])
            .arg(path)
            .assert()
            .success();
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert!(text.starts_with("(define (problem generated-42)"));

    cmd()
        .args(["show", "-p"])
        .arg(&a)
        .assert()
        .success()
        .stdout(text);

    let plan = dir.path().join("plan.txt");
    cmd()
        .args(["plan", "-p"])
        .arg(&a)
        .arg("-o")
        .arg(&plan)
        .assert()
        .success();
    cmd()
        .args(["validate", "-p"])
        .arg(&a)
        .arg("-l")
        .arg(&plan)
        .assert()
        .success();
}

#[test]
fn shared_initials_fall_back_to_numeric_ids() {
    let dir = tempdir().unwrap();
    let problem = dir.path().join("amb.pddl");
    fs::write(
        &problem,
        "(define (problem amb) (:domain deployment)
         (:objects mysql mongo - component)
         (:init (= (instance-number) 0))
         (:htn :tasks (and (install mysql) (install mongo)) :ordering () :constraints ()))",
    )
    .unwrap();
    let out = cmd().args(["plan", "-p"]).arg(&problem).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("warning"));
    let text = stdout(&out);
    assert!(text.contains("(createInstance mysql i0)"), "{text}");
    assert!(text.contains("(createInstance mongo i1)"), "{text}");
}
