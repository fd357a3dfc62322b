//! CLI acceptance: report determinism under parallelism, plus exit-code
//! contracts.

use std::process::{Command, Output};

fn lcak(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcak"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn criterion_8_parallel_runs_are_byte_identical() {
    let run = |jobs: &str| {
        lcak(&[
            "verify",
            "paper-example",
            "--seed",
            "7",
            "--points",
            "10",
            "--format",
            "json",
            "--jobs",
            jobs,
        ])
    };
    let a = run("1");
    let b = run("8");
    let ok = a.status.code() == Some(0)
        && b.status.code() == Some(0)
        && a.stdout == b.stdout
        && !a.stdout.is_empty();
    println!(
        "criterion 8 (byte-identical JSON for --jobs 1 vs --jobs 8): {}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert_eq!(a.status.code(), Some(0), "jobs=1 run failed");
    assert_eq!(b.status.code(), Some(0), "jobs=8 run failed");
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout, "reports differ between --jobs 1 and 8");
}

#[test]
fn failing_manifold_exits_2() {
    let out = lcak(&[
        "verify",
        "control-broken",
        "--checks",
        "lcak",
        "--points",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unresolvable_manifold_exits_3() {
    let out = lcak(&["verify", "no-such-manifold"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn foliation_suite_is_skipped_where_lee_vanishes() {
    let out = lcak(&[
        "verify",
        "flat-kahler",
        "--checks",
        "foliation",
        "--points",
        "2",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "skips are not failures");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"status\":\"skipped\""));
    assert!(text.contains("ω = 0"));
}

#[test]
fn eval_lee_form_respects_convention_flag() {
    let canonical = lcak(&["eval", "paper-example", "lee-form", "--at", "1,2,0,0"]);
    assert_eq!(canonical.status.code(), Some(0));
    let text = String::from_utf8(canonical.stdout).unwrap();
    // dx2 component 2/x2 = 1 at x2 = 2
    assert!(text.contains("\"dx2\":1.00000000"), "{text}");

    let halved = lcak(&[
        "eval",
        "paper-example",
        "lee-form",
        "--at",
        "1,2,0,0",
        "--lee-convention",
        "paper-example-halved",
    ]);
    let text = String::from_utf8(halved.stdout).unwrap();
    assert!(text.contains("\"dx2\":5.00000000"), "{text}");
}

#[test]
fn manifold_files_are_accepted_by_path() {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../core/manifolds/paper-example.lcak"
    );
    let out = lcak(&["describe", path]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("dim: 4"));
}
