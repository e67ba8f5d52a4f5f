//! End-to-end checks of the compiled binary: recipe configs, detector
//! output, lift export + re-import, and repro determinism across
//! processes.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hyperdyn"))
}

fn write_config(dir: &std::path::Path, name: &str, contents: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).expect("write config");
    path
}

#[test]
fn validate_and_orbit_on_recipe() {
    let dir = tempfile::tempdir().expect("tempdir");
    let cfg = write_config(
        dir.path(),
        "odo.json",
        r#"{"recipe":{"kind":"odometer","trunc":3}}"#,
    );
    let out = bin()
        .args(["validate", "--config"])
        .arg(&cfg)
        .output()
        .expect("run validate");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"points\":8"), "{text}");

    let out = bin()
        .args(["orbit", "--config"])
        .arg(&cfg)
        .args(["--point", "000", "--horizon", "2"])
        .output()
        .expect("run orbit");
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    // φ adds with carry to the right: 000 → 100 → 010
    assert_eq!(text, "n,point\n0,000\n1,100\n2,010\n");
}

#[test]
fn check_emits_verdict_record() {
    let dir = tempfile::tempdir().expect("tempdir");
    let cfg = write_config(
        dir.path(),
        "shift.json",
        r#"{"recipe":{"kind":"full_shift","alphabet":2,"trunc":3}}"#,
    );
    let out = bin()
        .args(["check", "--config"])
        .arg(&cfg)
        .args(["--property", "transitive"])
        .output()
        .expect("run check");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let record: serde_json::Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert_eq!(record["property"], "transitive");
    assert_eq!(record["status"], "Holds");
    assert_eq!(record["exact"], true);
    assert!(record["wall_time_ms"].is_u64());
}

#[test]
fn lift_export_reimports_as_valid_system() {
    let dir = tempfile::tempdir().expect("tempdir");
    let cfg = write_config(
        dir.path(),
        "rot.json",
        r#"{"recipe":{"kind":"permutation","size":4}}"#,
    );
    let lifted_path = dir.path().join("lifted.json");
    let out = bin()
        .args(["lift", "--config"])
        .arg(&cfg)
        .args(["--target", "lifted:2", "--out"])
        .arg(&lifted_path)
        .output()
        .expect("run lift");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    // the exported hyperspace system file must validate on re-import
    let reimport_cfg = write_config(
        dir.path(),
        "reimport.json",
        r#"{"file":"lifted.json"}"#,
    );
    let out = bin()
        .args(["validate", "--config"])
        .arg(&reimport_cfg)
        .output()
        .expect("run validate on reimport");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    // 4 singletons + 6 pairs
    assert!(text.contains("\"points\":10"), "{text}");
}

#[test]
fn repro_is_deterministic_across_processes_and_flags_failures() {
    let run = || {
        bin()
            .args(["repro", "--suite", "example-1"])
            .output()
            .expect("run repro")
    };
    let a = run();
    let b = run();
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout, "repro output must be byte-identical");
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("proposition,instance,"));
    assert!(text.contains("example-1"));

    let unknown = bin()
        .args(["repro", "--suite", "no-such-suite"])
        .output()
        .expect("run repro");
    assert_eq!(unknown.status.code(), Some(1), "input errors exit 1");
}

#[test]
fn entropy_log_base_two() {
    let dir = tempfile::tempdir().expect("tempdir");
    let cfg = write_config(
        dir.path(),
        "shift.json",
        r#"{"recipe":{"kind":"full_shift","alphabet":2,"trunc":6}}"#,
    );
    let out = bin()
        .args(["entropy", "--config"])
        .arg(&cfg)
        .args(["--kmax", "3", "--log-base", "2"])
        .output()
        .expect("run entropy");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value =
        serde_json::from_str(String::from_utf8(out.stdout).unwrap().lines().last().unwrap())
            .unwrap();
    assert_eq!(v["log_base"], "2");
    assert!(v["terms"].as_array().unwrap().len() == 3);
}
