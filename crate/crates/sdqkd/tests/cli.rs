//! End-to-end tests of the binary: exit codes, config-file semantics,
//! output shapes, and the self-check failure hook.

use std::io::Write;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sdqkd"))
}

fn temp_path(name: &str) -> std::path::PathBuf {
    let mut dir = std::env::temp_dir();
    dir.push(format!("sdqkd-test-{}-{name}", std::process::id()));
    dir
}

#[test]
fn fig3_default_csv_shape_and_branch_flip() {
    let out = bin()
        .args(["fig3", "--steps", "401", "--stop", "0.8"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "s,f0,f1,p_opt_interior,p_opt_boundary,p_opt,branch"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 401);
    // the branch column flips from interior to boundary near s = 0.6538
    let flip = rows
        .iter()
        .position(|r| r.ends_with(",boundary"))
        .expect("boundary branch appears");
    let s_at_flip: f64 = rows[flip].split(',').next().unwrap().parse().unwrap();
    assert!(
        (s_at_flip - 0.6538).abs() < 3e-3,
        "branch flips at {s_at_flip}"
    );
    // s = 0 row: p_opt = 1 − eta_ab = 0.5
    let first: Vec<&str> = rows[0].split(',').collect();
    assert_eq!(first[0].parse::<f64>().unwrap(), 0.0);
    assert!((first[5].parse::<f64>().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn fig3_audit_adds_column() {
    let out = bin()
        .args(["fig3", "--steps", "21", "--stop", "0.8", "--audit"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().next().unwrap().ends_with(",p_brute"));
}

#[test]
fn config_file_merges_and_flags_override() {
    let cfg_path = temp_path("fig3.cfg");
    std::fs::File::create(&cfg_path)
        .unwrap()
        .write_all(b"# recipe\nq0 = 0.45\nsteps = 11\nstop = 0.7\n")
        .unwrap();
    let from_cfg = bin()
        .args(["fig3", "--config", cfg_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(from_cfg.status.success());
    let text = String::from_utf8(from_cfg.stdout).unwrap();
    assert_eq!(text.lines().count(), 12); // header + 11 rows

    // the flag wins over the file
    let overridden = bin()
        .args(["fig3", "--config", cfg_path.to_str().unwrap(), "--steps", "5"])
        .output()
        .unwrap();
    let text = String::from_utf8(overridden.stdout).unwrap();
    assert_eq!(text.lines().count(), 6);
    std::fs::remove_file(&cfg_path).ok();
}

#[test]
fn unknown_config_key_is_rejected() {
    let cfg_path = temp_path("bad.cfg");
    std::fs::File::create(&cfg_path)
        .unwrap()
        .write_all(b"qq0 = 0.4\n")
        .unwrap();
    let out = bin()
        .args(["fig3", "--config", cfg_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("unknown config key"), "stderr: {err}");
    std::fs::remove_file(&cfg_path).ok();
}

#[test]
fn validation_errors_exit_one() {
    let out = bin().args(["fig3", "--q0", "1.4"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin().args(["fig3", "--steps", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin()
        .args(["sweep", "--var", "d", "--steps", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "d sweep without --noise");
    let out = bin()
        .args(["point", "--s", "2.0", "--eta-ab", "-1.0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains('s') && err.contains("eta-ab"), "stderr lists offenders: {err}");
}

#[test]
fn io_errors_exit_three() {
    let out = bin()
        .args(["fig5", "--steps", "3", "--out", "/nonexistent-dir/x.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn point_emits_versioned_json_with_equivalence_fields() {
    let out = bin()
        .args(["point", "--q0", "0.5", "--s", "0.5", "--eta-ab", "0.5"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let record: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(record["schema_version"], 1);
    let p_s = record["success_probability"]["closed_form"].as_f64().unwrap();
    assert!((p_s - 1.0 / 6.0).abs() < 1e-12);
    let diff = record["success_probability"]["structure_difference"]
        .as_f64()
        .unwrap();
    assert!(diff < 1e-12);
    let table_diff = record["distributions"]["structure_table_difference"]
        .as_f64()
        .unwrap();
    assert!(table_diff < 1e-12);
    assert!(record["branch"]["branch"] == "interior");
}

#[test]
fn point_with_full_channel_reports_unit_key_rate() {
    let out = bin()
        .args(["point", "--eta-ab", "1.0", "--s", "0.5"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let record: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(record["success_probability"]["optimal"], 0.0);
    assert_eq!(record["key_rate"], 1.0);
    assert!(record["entropies"]["h_e"].is_null());
}

#[test]
fn point_optics_section_appears_on_request() {
    let out = bin()
        .args(["point", "--noise", "colored", "--eta-det", "0.8", "--d0", "0.1", "--de", "0.4", "--eta-ent", "0.5"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let record: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(record["optics"]["noise"]["kind"], "colored");
    assert!(record["optics"]["p_s"].as_f64().unwrap() > 0.0);
}

#[test]
fn selfcheck_exit_codes() {
    let ok = bin().arg("selfcheck").output().unwrap();
    assert!(ok.status.success());
    let text = String::from_utf8(ok.stdout).unwrap();
    assert!(text.contains("self-check:"));
    assert!(!text.contains("FAIL"));

    let injected = bin()
        .args(["selfcheck", "--inject-failure"])
        .output()
        .unwrap();
    assert_eq!(injected.status.code(), Some(2));
    let text = String::from_utf8(injected.stdout).unwrap();
    assert!(text.contains("FAIL injected failure (test hook)"));
}

#[test]
fn sweep_writes_csv_files() {
    let out_path = temp_path("sweep.csv");
    let out = bin()
        .args([
            "sweep", "--var", "eta-ab", "--steps", "5", "--s", "0.4",
            "--out", out_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(text.lines().next().unwrap(), "eta_ab,p_s,k");
    assert_eq!(text.lines().count(), 6);
    // higher channel efficiency leaves the eavesdropper less room
    let first: f64 = text.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    let last: f64 = text.lines().last().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!(first > last);
    std::fs::remove_file(&out_path).ok();
}

#[test]
fn fig5_series_ordering_at_small_overlap() {
    let out = bin()
        .args(["fig5", "--start", "0.3", "--stop", "0.3001", "--steps", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    // at fixed small s, larger eta_ab gives a larger key rate
    let ks: Vec<f64> = text
        .lines()
        .skip(1)
        .step_by(2)
        .map(|row| row.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(ks.len(), 4);
    assert!(ks.windows(2).all(|w| w[0] > w[1]), "series not ordered: {ks:?}");
}
