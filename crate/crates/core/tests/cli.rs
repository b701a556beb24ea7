use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn warpfield(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_warpfield"))
        .current_dir(dir)
        .args(args)
        .env_remove("WARPFIELD_THREADS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

fn json(dir: &Path, name: &str) -> serde_json::Value {
    serde_json::from_str(&read(dir, name)).unwrap()
}

fn write_flat(dir: &Path, name: &str, r_max: f64) {
    let mut s = String::from("r,f,d1,d2\n");
    for i in 0..=100 {
        let r = r_max * i as f64 / 100.0;
        s.push_str(&format!("{r:?},{r:?},1.0,0.0\n"));
    }
    std::fs::write(dir.join(name), s).unwrap();
}

#[test]
fn torpedo_neck_curvature_reaches_oracle() {
    let d = TempDir::new().unwrap();
    let o = warpfield(d.path(), &["torpedo", "--delta", "0.1", "--b", "0.5", "--n", "3", "--out", "p.csv", "--cert", "c.json", "--svg", "f.svg"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let c = json(d.path(), "c.json");
    // (n−1)(n−2)/δ² = 200; 0.1² is inexact in binary, hence the relative slack
    let r_min = c["R_min"].as_f64().unwrap();
    assert!(r_min >= 200.0 * (1.0 - 1e-12), "R_min {r_min}");
    assert_eq!(c["pass"], true);
    assert!(read(d.path(), "p.csv").starts_with("r,f,d1,d2\n"));
    assert!(read(d.path(), "f.svg").starts_with("<svg"));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let d = TempDir::new().unwrap();
    let args = |k: &str| {
        vec![
            "bend".to_string(),
            "--delta".into(),
            "0.05".into(),
            "--steps".into(),
            "16".into(),
            "--out".into(),
            format!("c{k}.csv"),
            "--path".into(),
            format!("p{k}.csv"),
            "--cert".into(),
            format!("j{k}.json"),
            "--svg".into(),
            format!("s{k}.svg"),
        ]
    };
    for k in ["a", "b"] {
        let a = args(k);
        let a: Vec<&str> = a.iter().map(String::as_str).collect();
        assert_eq!(code(&warpfield(d.path(), &a)), 0);
    }
    for (x, y) in [("ca.csv", "cb.csv"), ("pa.csv", "pb.csv"), ("ja.json", "jb.json"), ("sa.svg", "sb.svg")] {
        assert_eq!(read(d.path(), x), read(d.path(), y), "{x} vs {y}");
    }
    assert!(read(d.path(), "ca.csv").starts_with("seg,t,r\n"));
    assert!(read(d.path(), "pa.csv").starts_with("s,arc,f,R\n"));
}

#[test]
fn thread_count_does_not_change_output() {
    let d = TempDir::new().unwrap();
    write_flat(d.path(), "flat.csv", 1.0);
    for (t, out) in [("1", "a.json"), ("3", "b.json")] {
        let o = Command::new(env!("CARGO_BIN_EXE_warpfield"))
            .current_dir(d.path())
            .args(["isotopy", "--input", "flat.csv", "--steps", "16", "--cert", out])
            .env("WARPFIELD_THREADS", t)
            .output()
            .unwrap();
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(read(d.path(), "a.json"), read(d.path(), "b.json"));
}

#[test]
fn missing_flag_is_usage_error() {
    let d = TempDir::new().unwrap();
    let o = warpfield(d.path(), &["torpedo", "--n", "3"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(code(&warpfield(d.path(), &["frobnicate"])), 2);
    assert_eq!(code(&warpfield(d.path(), &["--help"])), 0);
}

#[test]
fn plumbing_failures_exit_two() {
    let d = TempDir::new().unwrap();
    assert_eq!(code(&warpfield(d.path(), &["isotopy", "--input", "missing.csv"])), 2);
    std::fs::write(d.path().join("bad.csv"), "r,f,d1,d2\n0,zero,1,0\n").unwrap();
    assert_eq!(code(&warpfield(d.path(), &["isotopy", "--input", "bad.csv"])), 2);
    std::fs::write(d.path().join("bad.json"), "{\"side\": \"X\"").unwrap();
    assert_eq!(code(&warpfield(d.path(), &["surgery", "--input", "bad.json", "--direction", "fwd"])), 2);
    std::fs::write(d.path().join("cfg.json"), "{\"steps\": 3}").unwrap();
    assert_eq!(code(&warpfield(d.path(), &["--config", "cfg.json", "torpedo", "--delta", "0.1"])), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_warpfield"))
        .current_dir(d.path())
        .args(["torpedo", "--delta", "0.1"])
        .env("WARPFIELD_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn certificate_failures_exit_one() {
    let d = TempDir::new().unwrap();
    // a margin no metric can meet
    std::fs::write(d.path().join("cfg.json"), "{\"margin\": 1e9}").unwrap();
    let o = warpfield(d.path(), &["--config", "cfg.json", "torpedo", "--delta", "0.1", "--cert", "c.json"]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(d.path(), "c.json")["pass"], false);

    // strictly convex w is not almost-standard
    let mut s = String::from("r,f,d1,d2\n");
    for i in 0..=100 {
        let r = i as f64 / 100.0;
        s.push_str(&format!("{r:?},{:?},{:?},{:?}\n", r + r * r * r, 1.0 + 3.0 * r * r, 6.0 * r));
    }
    std::fs::write(d.path().join("convex.csv"), s).unwrap();
    assert_eq!(code(&warpfield(d.path(), &["retract", "--input", "convex.csv"])), 1);
}

#[test]
fn retract_writes_classification_and_path() {
    let d = TempDir::new().unwrap();
    write_flat(d.path(), "lin.csv", 0.5);
    let o = warpfield(
        d.path(),
        &["retract", "--input", "lin.csv", "--rho-std", "0.5", "--q", "2", "--out", "r.csv", "--classify-json", "k.json", "--cert", "c.json", "--svg", "w.svg"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(d.path(), "k.json")["case_id"], 4);
    assert!(read(d.path(), "r.csv").starts_with("s,arc,f,R\n"));
    assert!(read(d.path(), "w.svg").contains("rho_std"));
}

#[test]
fn surgery_round_trip_through_files() {
    let d = TempDir::new().unwrap();
    let x = r#"{"side":"X","p":2,"q":3,"rho_bar":0.5,"rho":0.15707963267948966,"delta":0.1,
               "exterior":{"tag":"E","collar_profile_csv":"collar.csv"}}"#;
    std::fs::write(d.path().join("x.json"), x).unwrap();
    assert_eq!(code(&warpfield(d.path(), &["surgery", "--input", "x.json", "--direction", "fwd", "--out", "y.json", "--cert", "h.json"])), 0);
    assert_eq!(json(d.path(), "y.json")["side"], "Y");
    assert_eq!(json(d.path(), "h.json")["pass"], true);
    assert_eq!(code(&warpfield(d.path(), &["surgery", "--input", "y.json", "--direction", "inv", "--out", "x2.json"])), 0);
    let a: serde_json::Value = serde_json::from_str(x).unwrap();
    assert_eq!(a, json(d.path(), "x2.json"));
    // wrong direction for the side
    assert_eq!(code(&warpfield(d.path(), &["surgery", "--input", "x.json", "--direction", "inv"])), 2);
}

#[test]
fn verify_single_check_prints_table() {
    let d = TempDir::new().unwrap();
    let o = warpfield(d.path(), &["verify", "--seed", "42", "--only", "6"]);
    assert_eq!(code(&o), 0);
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("[PASS] 6."), "{out}");
    assert!(out.contains("1/1 checks passed"));
}
