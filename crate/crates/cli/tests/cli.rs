use std::fs;
use std::path::Path;

use inelastic_lab::manifest::RunManifest;
use inelastic_lab::{run, shipped_config};

fn lab(args: &[&str]) -> i32 {
    run(std::iter::once("inelastic-lab").chain(args.iter().copied()))
}

fn write_cfg(dir: &Path, text: &str) -> String {
    let p = dir.join("run.cfg");
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn read_manifest(dir: &Path) -> RunManifest {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn missing_config_is_a_configuration_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    assert_eq!(lab(&["maxwell", "--config", "/nonexistent/x.cfg", "--out", out.to_str().unwrap()]), 2);
    assert_eq!(lab(&["maxwell", "--out", out.to_str().unwrap()]), 2);
    assert_eq!(lab(&["frobnicate"]), 2);
}

#[test]
fn physics_keys_have_no_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "[physics]\ngamma = 0\nc = 0.25\nL = 40\n");
    let out = tmp.path().join("o");
    assert_eq!(lab(&["maxwell", "--config", &cfg, "--out", out.to_str().unwrap()]), 2);
}

#[test]
fn maxwell_run_on_shipped_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = shipped_config("k25.cfg");
    assert_eq!(lab(&["maxwell", "--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]), 0);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("report.json")).unwrap()).unwrap();
    let rate = report["fitted_rate"].as_f64().unwrap();
    assert!(rate >= 0.9 * 0.0214466, "{rate}");
    let decay = fs::read_to_string(tmp.path().join("decay.csv")).unwrap();
    assert!(decay.lines().count() > 100);
    let m = read_manifest(tmp.path());
    let files: Vec<&str> = m.outputs.iter().map(|o| o.file.as_str()).collect();
    assert_eq!(files, ["decay.csv", "report.json"]);
}

#[test]
fn maxwell_refuses_other_c() {
    let tmp = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(shipped_config("k25.cfg")).unwrap().replace("c = 0.25", "c = 0.3");
    let cfg = write_cfg(tmp.path(), &text);
    assert_eq!(lab(&["maxwell", "--config", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]), 2);
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "[physics]\ngamma = 0\nc = 0.25\nL = 5\nN = 128\n[linearize]\na = 2.5\nprobes = 8\n",
    );
    let dirs = [tmp.path().join("a"), tmp.path().join("b")];
    for d in &dirs {
        assert_eq!(lab(&["linearize", "--config", &cfg, "--out", d.to_str().unwrap(), "--seed", "5"]), 0);
    }
    let (ma, mb) = (read_manifest(&dirs[0]), read_manifest(&dirs[1]));
    assert_eq!(ma.outputs, mb.outputs);
    assert_eq!(ma.config_hash, mb.config_hash);
    for o in &ma.outputs {
        assert_eq!(fs::read(dirs[0].join(&o.file)).unwrap(), fs::read(dirs[1].join(&o.file)).unwrap());
    }
    // another seed moves the probe estimate
    let c = tmp.path().join("c");
    assert_eq!(lab(&["linearize", "--config", &cfg, "--out", c.to_str().unwrap(), "--seed", "6"]), 0);
    assert_ne!(fs::read(dirs[0].join("linearize.json")).unwrap(), fs::read(c.join("linearize.json")).unwrap());
}

#[test]
fn format_flag_selects_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "[physics]\ngamma = 0\nc = 0.25\nL = 5\nN = 128\n[linearize]\nprobes = 4\n");
    let out = tmp.path().join("o");
    assert_eq!(lab(&["linearize", "--config", &cfg, "--out", out.to_str().unwrap(), "--format", "csv"]), 0);
    assert!(out.join("near_kernel.csv").exists());
    assert!(!out.join("linearize.json").exists());
    assert_eq!(lab(&["linearize", "--config", &cfg, "--format", "yaml"]), 2);
}

#[test]
fn steady_reports_non_convergence() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "[physics]\ngamma = 0.2\nc = 0.25\nL = 20\nN = 128\n[solver]\nmax_time = 0.5\ninit = gaussian{E=1}\n",
    );
    let out = tmp.path().join("o");
    assert_eq!(lab(&["steady", "--config", &cfg, "--out", out.to_str().unwrap()]), 3);
    assert!(out.join("profile.csv").exists());
    assert!(out.join("manifest.json").exists());
}

#[test]
fn steady_requires_an_initial_condition() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "[physics]\ngamma = 0.2\nc = 0.25\nL = 20\nN = 128\n");
    assert_eq!(lab(&["steady", "--config", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]), 2);
}
