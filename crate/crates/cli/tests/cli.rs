use std::fs;
use std::process::{Command, Output};

fn cfsm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfsm"))
        .args(args)
        .env("CFSM_COLOR", "0")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn deadlock_check_is_definitive() {
    let o = cfsm(&["check", "deadlock", "--fixture", "flowctl2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("summary definitive, 59 states"), "{s}");
    assert!(s.contains("verdict holds"));
}

#[test]
fn budget_gives_unknown_not_refuted() {
    let o = cfsm(&["check", "deadlock", "--fixture", "flowctl2", "--max-states", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("verdict unknown"));
}

#[test]
fn deadlock_witness_is_printed() {
    let o = cfsm(&["check", "deadlock", "--fixture", "access"]);
    assert_eq!(o.status.code(), Some(1));
    let s = stdout(&o);
    assert!(s.lines().filter(|l| l.starts_with("witness ")).count() >= 2, "{s}");
}

#[test]
fn proof_files_are_accepted() {
    for (fx, proof) in [
        ("altbit-turns", "fig8_7.proof"),
        ("flowctl2", "fig8_3.proof"),
        ("altbit-demons", "fig2_6.proof"),
    ] {
        let o = cfsm(&["proof", "check", "--fixture", fx, "--proof", proof]);
        assert_eq!(o.status.code(), Some(0), "{fx}: {}", stdout(&o));
        assert!(stdout(&o).contains("consistent yes"));
    }
    let s = stdout(&cfsm(&["proof", "check", "--fixture", "altbit-turns", "--proof", "fig8_7.proof"]));
    assert!(s.contains("deadlock-free certified"), "{s}");
    let s = stdout(&cfsm(&["proof", "check", "--fixture", "flowctl2", "--proof", "fig8_3.proof"]));
    assert!(s.contains("no-arrival node 0 state 02"), "{s}");
}

#[test]
fn broken_proof_is_refuted_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let text = cfsm::gen::fixture_file("fig8_3.proof").unwrap();
    let broken: String = text.lines().filter(|l| !l.starts_with("R 04,13")).map(|l| format!("{l}\n")).collect();
    let path = dir.path().join("broken.proof");
    fs::write(&path, broken).unwrap();
    let o = cfsm(&["proof", "check", "--fixture", "flowctl2", "--proof", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let s = stdout(&o);
    assert!(s.contains("consistent no") && s.contains("witness "), "{s}");
}

#[test]
fn extension_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("full.proof");
    let o = cfsm(&[
        "proof",
        "extend",
        "--fixture",
        "altbit-demons",
        "--proof",
        "fig2_6.proof",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("R ")).count(), 256);
    let o = cfsm(&["proof", "check", "--fixture", "altbit-demons", "--proof", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn arrival_and_stability() {
    let o = cfsm(&["check", "arrival", "02", "D_b@b", "--fixture", "flowctl2"]);
    assert_eq!(o.status.code(), Some(1));
    let o = cfsm(&["check", "arrival", "03", "D_b@b", "--fixture", "flowctl2"]);
    assert_eq!(o.status.code(), Some(0));
    let o = cfsm(&["check", "stable", "(03,11)", "--fixture", "flowctl2"]);
    assert_eq!(o.status.code(), Some(0));
    let o = cfsm(&["check", "stable", "(03,13)", "--fixture", "flowctl2"]);
    assert_eq!(o.status.code(), Some(1));
    let o = cfsm(&["check", "arrival", "02", "D_b@nowhere", "--fixture", "flowctl2"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn flow_control_keeps_deadlock_verdict() {
    for flow in ["cyclic:a", "chain:0,1"] {
        let o = cfsm(&["check", "deadlock", "--fixture", "flowctl2", "--flow", flow]);
        assert_eq!(o.status.code(), Some(0), "{flow}: {}", stdout(&o));
    }
    let o = cfsm(&["check", "deadlock", "--fixture", "flowctl2", "--flow", "bogus:1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn explore_writes_dot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.dot");
    let o = cfsm(&["explore", "--fixture", "flowctl2", "--max-total", "4", "--dot", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let dot = fs::read_to_string(&out).unwrap();
    assert!(dot.starts_with("digraph"));
    let o = cfsm(&["dot", "--fixture", "flowctl2"]);
    assert_eq!(stdout(&o), dot);
}

#[test]
fn reports_are_deterministic_across_thread_counts() {
    let a = cfsm(&["proof", "check", "--fixture", "altbit-turns", "--proof", "fig8_7.proof", "--threads", "1"]);
    let b = cfsm(&["proof", "check", "--fixture", "altbit-turns", "--proof", "fig8_7.proof", "--threads", "4"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, cfsm(&["proof", "check", "--fixture", "altbit-turns", "--proof", "fig8_7.proof"]).stdout);
}

#[test]
fn generators_write_loadable_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = cfsm(&["gen", "fixture", "flowctl2", "--dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let proto = dir.path().join("flowctl2.cfsm");
    assert!(dir.path().join("fig8_3.proof").exists());
    let o = cfsm(&["validate", proto.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));

    let tag = dir.path().join("t.tag");
    fs::write(&tag, "tag\nprod a bb\nprod b a\nstart aaa\n").unwrap();
    let out = dir.path().join("t.cfsm");
    let o = cfsm(&["gen", "tag", tag.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = cfsm(&["sr", "affine", out.to_str().unwrap(), "--max-channel", "8"]);
    assert!(matches!(o.status.code(), Some(0..=2)), "{}", stdout(&o));
    assert!(stdout(&o).contains("deadlock-free no"), "{}", stdout(&o));
}

#[test]
fn input_errors_exit_3() {
    assert_eq!(cfsm(&["validate", "/nonexistent/file"]).status.code(), Some(3));
    assert_eq!(cfsm(&["validate", "--fixture", "nope"]).status.code(), Some(3));
    assert_eq!(cfsm(&["sr", "affine", "--fixture", "flowctl2"]).status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.proof");
    fs::write(&bad, "proof recognizable\nR 00,99 = (eps, eps)\n").unwrap();
    let o = cfsm(&["proof", "check", "--fixture", "flowctl2", "--proof", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}
