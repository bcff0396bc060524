//! End-to-end runs of the `softlayer` binary.

use std::path::Path;
use std::process::{Command, Output};

const CONE: &str = "cap_cone:1,1.5707963267948966";

fn softlayer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_softlayer")).args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn certify_cone_writes_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    let o = softlayer(&["certify", "--surface", CONE, "--potential", "delta:-2", "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert!(report["result"]["witness"]["n"].as_f64().unwrap() <= 300.0);
    assert_eq!(report["config_hash"].as_str().unwrap().len(), 64);
    assert!(dir.path().join("certify.csv").exists());
    assert!(dir.path().join("plot/certify.dat").exists());
}

#[test]
fn validation_failures_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = softlayer(&["certify", "--surface", CONE, "--potential", "square_well:1,3", "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Ass.local violated: a ≥ a_max"), "{}", stderr(&o));
    let o = softlayer(&["certify", "--surface", "plane", "--potential", "delta:-2", "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("𝒦 > 0 required"), "{}", stderr(&o));
    let o = softlayer(&["certify", "--surface", "torus:1", "--potential", "delta:-2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn inconclusive_certificate_exits_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"schema_version": 1,
            "surface": {"kind": "cap_cone", "radius": 1.0, "theta": 1.5707963267948966},
            "potential": {"kind": "delta", "alpha": -2.0},
            "certify": {"schedule": [10.0, 30.0]}}"#,
    )
    .unwrap();
    let o = softlayer(&["certify", "--config", path(&cfg), "--out", path(&dir.path().join("out"))]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(dir.path().join("out/report.json").exists());
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"schema_version": 1, "surface": {"kind": "plane"}, "potential": {"kind": "delta", "alpha": -2}, "extra": 1}"#)
        .unwrap();
    let o = softlayer(&["geometry", "--config", path(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("extra"));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &str| {
        vec!["spectrum", "--surface", CONE, "--potential", "delta:-2", "--S", "4", "--T", "3", "--hs", "0.1", "--ht", "0.1", "--k", "2", "--out"]
            .into_iter()
            .map(String::from)
            .chain(std::iter::once(out.to_string()))
            .collect::<Vec<_>>()
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let argv = args(path(d));
        let o = softlayer(&argv.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for f in ["report.json", "spectrum.csv", "plot/spectrum.dat"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let csv = std::fs::read_to_string(a.join("spectrum.csv")).unwrap();
    assert!(csv.starts_with("k,lambda,residual\n"));
}

#[test]
fn report_merges_runs() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let o = softlayer(&["report", "--out", path(root)]);
    assert_eq!(o.status.code(), Some(2), "empty directory");

    let o = softlayer(&["certify", "--surface", CONE, "--potential", "delta:-2", "--out", path(&root.join("cert"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = softlayer(&[
        "sweep", "--surface", "plane", "--potential", "delta:-2", "--S", "3,6", "--T", "3", "--hs", "0.1", "--ht", "0.1", "--k", "1",
        "--out", path(&root.join("sweep")),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let sweep = std::fs::read_to_string(root.join("sweep/sweep.csv")).unwrap();
    assert!(sweep.starts_with("S,count_below_E1,lambda1"));

    let o = softlayer(&["report", "--out", path(root)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let summary = std::fs::read_to_string(root.join("summary.csv")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines.len(), 3, "{summary}");
    assert!(lines[1].starts_with("cert,certify,cap_cone,delta"));
    assert!(lines[2].contains("3:0;6:0"));
    assert!(root.join("plot/summary.dat").exists());

    let bad = root.join("cert/report.json");
    let text = std::fs::read_to_string(&bad).unwrap().replace("\"schema_version\":1", "\"schema_version\":2");
    std::fs::write(&bad, text).unwrap();
    let o = softlayer(&["report", "--out", path(root)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("schema version mismatch"), "{}", stderr(&o));
}
