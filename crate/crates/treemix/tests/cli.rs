use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn treemix(args: &[&str], out: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_treemix"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("TREEMIX_SEED")
        .output()
        .unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn beta_zero_sw_mixes_in_one_step() {
    let dir = tempfile::tempdir().unwrap();
    let o = treemix(&["exact", "gap", "--chain", "sw", "--d", "2", "--h", "1", "--q", "2", "--beta", "0"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let g = json(&dir.path().join("gap.json"));
    assert!((g["gap"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let m = json(&dir.path().join("manifest.json"));
    assert_eq!(m["complete"], true);
    assert_eq!(m["config"]["beta"], 0.0);
    assert_eq!(m["artifacts"][0], "gap.json");
}

#[test]
fn product_law_has_zero_gvm() {
    let dir = tempfile::tempdir().unwrap();
    let rho = dir.path().join("rho.json");
    std::fs::write(&rho, r#"{"rho": [[0.06, 0.14], [0.24, 0.56]]}"#).unwrap();
    let o = treemix(&["check", "gvm", "--rho", rho.to_str().unwrap()], &dir.path().join("out"));
    assert!(o.status.success());
    let c = json(&dir.path().join("out/certificate.json"));
    assert!(c["certificate"]["epsilon"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["simulate", "--chain", "sw", "--h", "3", "--steps", "50", "--start", "random", "--seed", "4"];
    treemix(&args, &dir.path().join("a"));
    treemix(&args, &dir.path().join("b"));
    for f in ["manifest.json", "trace.csv"] {
        let a = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f} differs");
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"h": 2, "beta": 0.3, "seed": 5}"#).unwrap();
    let o = treemix(&["--config", cfg.to_str().unwrap(), "check", "vm", "--h", "1"], &dir.path().join("o"));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = json(&dir.path().join("o/manifest.json"));
    assert_eq!(m["config"]["h"], 1);
    assert_eq!(m["config"]["beta"], 0.3);
    assert_eq!(m["seeds"][0], 5);
}

#[test]
fn env_sets_only_the_default_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |extra: &[&str], sub: &str| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_treemix"));
        c.arg("--out").arg(dir.path().join(sub)).args(["simulate", "--steps", "2"]).args(extra);
        c.env("TREEMIX_SEED", "77").output().unwrap();
        json(&dir.path().join(sub).join("manifest.json"))["seeds"][0].as_u64().unwrap()
    };
    assert_eq!(run(&[], "a"), 77);
    assert_eq!(run(&["--seed", "3"], "b"), 3);
}

#[test]
fn matrix_export_has_header() {
    let dir = tempfile::tempdir().unwrap();
    let o = treemix(&["exact", "matrix", "--chain", "glauber", "--h", "1", "--q", "3"], dir.path());
    assert!(o.status.success());
    let h = json(&dir.path().join("matrix.json"));
    assert_eq!(h["rows"], 27);
    assert_eq!(h["order"], "row-major");
    let bytes = std::fs::read(dir.path().join("matrix.bin")).unwrap();
    assert_eq!(bytes.len(), 27 * 27 * 8);
    let row0: f64 = (0..27)
        .map(|j| f64::from_le_bytes(bytes[j * 8..j * 8 + 8].try_into().unwrap()))
        .sum();
    assert!((row0 - 1.0).abs() < 1e-12);
}

#[test]
fn errors_name_the_parameter() {
    let dir = tempfile::tempdir().unwrap();
    let o = treemix(&["exact", "gap", "--q", "0"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("`q`"));
    let o = treemix(&["slowmix", "embed", "--graph", "cycle:9", "--h", "3", "--ell", "1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"hh": 1}"#).unwrap();
    let o = treemix(&["--config", cfg.to_str().unwrap(), "tree-info"], dir.path());
    assert!(String::from_utf8_lossy(&o.stderr).contains("hh"));
}

#[test]
fn tree_info_prints_decomposition() {
    let dir = tempfile::tempdir().unwrap();
    let o = treemix(&["tree-info", "--d", "3", "--h", "2", "--ell", "1"], dir.path());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["n"], 13);
    assert_eq!(v["boundary_slots"], 27);
}
