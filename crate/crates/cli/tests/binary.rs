//! Exit codes and output of the `murmur` executable.

use std::process::{Command, Output};

use murmur_lab::parse_csv;

fn murmur(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_murmur"))
        .args(args)
        .env_remove("MURMUR_THREADS")
        .output()
        .expect("murmur runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn list_names_every_figure() {
    let o = murmur(&["list"]);
    assert!(o.status.success());
    let s = stdout(&o);
    for name in ["fig1_top", "fig1_bottom", "fig2", "fig3_sharp", "fig4", "fig5", "fig6", "fig7", "fig8", "validate_all"] {
        assert!(s.contains(name), "{name}");
    }
    assert!(s.contains("Figure 8"));
}

#[test]
fn unknown_experiment_exits_2_with_known_names() {
    let o = murmur(&["fig42"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("fig1_top") && err.contains("fig8"), "{err}");
}

#[test]
fn config_errors_exit_2() {
    for args in [
        &["fig1_top", "--y-step", "0"][..],
        &["fig1_top", "--delta", "0.5"],
        &["fig1_top", "--c", "2", "--delta", "0.5"],
        &["fig2", "--weight", "gauss:1,2"],
        &["fig2", "--y-min", "0"],
        &["fig4", "--y-max", "1"],
        &["fig1_top", "--mode", "empirical"],
        &["fig1_top", "--threads", "0"],
        &["fig1_top", "--bogus"],
    ] {
        let o = murmur(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn fig1_top_defaults_emit_501_rows() {
    let o = murmur(&["fig1_top"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "# experiment=fig1_top"));
    let r = parse_csv(&text).unwrap();
    assert_eq!(r.rows.len(), 501);
    assert!(r.has_overlay);
    assert_eq!(r.rows[500].x, 10.0);
}

#[test]
fn out_flag_writes_the_same_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig7.csv");
    let o = murmur(&["fig7", "--parity=-", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let file = std::fs::read_to_string(&path).unwrap();
    assert_eq!(file, stdout(&murmur(&["fig7", "--parity", "-"])));
    let r = parse_csv(&file).unwrap();
    assert_eq!(r.meta("parity"), Some("-"));
}

#[test]
fn unwritable_output_is_reported_with_its_path() {
    let o = murmur(&["fig7", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent-dir/x.csv"));
}

#[test]
fn overlay_columns_follow_the_experiment() {
    let header = |args: &[&str]| {
        let text = stdout(&murmur(args));
        text.lines().find(|l| !l.starts_with('#')).unwrap().to_string()
    };
    let five = "x,value_re,value_im,overlay_re,overlay_im";
    let three = "x,value_re,value_im";
    assert_eq!(header(&["fig1_bottom"]), five);
    assert_eq!(header(&["fig6", "--x", "64"]), five);
    assert_eq!(header(&["fig2", "--x", "4096", "--y-step", "0.5"]), five);
    assert_eq!(header(&["fig2", "--mode", "analytic", "--y-step", "0.5"]), three);
    assert_eq!(header(&["fig5", "--x", "32"]), three);
    assert_eq!(header(&["fig4", "--x", "64"]), three);
}

#[test]
fn thread_env_override_keeps_bytes() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_murmur"))
            .args(["fig8", "--x", "4096", "--y-step", "0.25"])
            .env("MURMUR_THREADS", threads)
            .output()
            .unwrap()
    };
    let (a, b) = (run("1"), run("8"));
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(run("many").status.code(), Some(2));
}

#[test]
fn quick_validation_passes() {
    let o = murmur(&["validate", "--quick"]);
    let s = stdout(&o);
    assert_eq!(s.lines().filter(|l| l.starts_with("[PASS]")).count(), 15, "{s}");
    assert!(o.status.success());
    assert!(s.contains("acceptance: 15 of 15 checks passed"));
}
