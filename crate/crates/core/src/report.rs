//! Consolidation of the `report.json` files below a directory.

use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::config::SCHEMA_VERSION;
use crate::error::{Error, Result};
use crate::io::{fmt_f64, write_file};

/// One line of the summary table.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub run: String,
    pub task: String,
    pub surface: String,
    pub potential: String,
    pub e1: Option<f64>,
    pub total_curvature: Option<f64>,
    pub cert_n: Option<f64>,
    pub cert_epsilon: Option<f64>,
    pub cert_q: Option<f64>,
    /// `(S, count)` pairs.
    pub counts: Vec<(f64, u64)>,
}

fn find_reports(dir: &Path, found: &mut Vec<PathBuf>) -> Result<()> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    entries.sort();
    for p in entries {
        if p.is_dir() {
            find_reports(&p, found)?;
        } else if p.file_name().is_some_and(|n| n == "report.json") {
            found.push(p);
        }
    }
    Ok(())
}

fn f(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

fn parse_row(dir: &Path, path: &Path, v: &Value) -> std::result::Result<SummaryRow, String> {
    let version = v.get("schema_version").and_then(Value::as_u64).ok_or("no schema_version")?;
    if version != SCHEMA_VERSION as u64 {
        return Err(format!("schema version mismatch: {version} (expected {SCHEMA_VERSION})"));
    }
    let task = v.get("task").and_then(Value::as_str).ok_or("no task")?.to_string();
    let cfg = v.get("config").ok_or("no config")?;
    let kind = |k: &str| cfg.get(k).and_then(|x| x.get("kind")).and_then(Value::as_str).unwrap_or("?").to_string();
    let s = v.get("summary").ok_or("no summary")?;
    let cert = s.get("certificate").filter(|c| !c.is_null());
    let counts = s
        .get("counts")
        .and_then(Value::as_array)
        .map(|a| a.iter().filter_map(|p| Some((f(p.get(0)?)?, p.get(1)?.as_u64()?))).collect())
        .unwrap_or_default();
    let run = path.parent().unwrap_or(dir).strip_prefix(dir).unwrap_or(Path::new("")).display().to_string();
    Ok(SummaryRow {
        run: if run.is_empty() { ".".into() } else { run },
        task,
        surface: kind("surface"),
        potential: kind("potential"),
        e1: s.get("e1").and_then(f),
        total_curvature: s.get("total_curvature").and_then(f),
        cert_n: cert.and_then(|c| c.get("n")).and_then(f),
        cert_epsilon: cert.and_then(|c| c.get("epsilon")).and_then(f),
        cert_q: cert.and_then(|c| c.get("total")).and_then(f),
        counts,
    })
}

/// Reads every `report.json` below `dir`; any missing field, parse failure
/// or version mismatch is an error that lists the offending files.
pub fn collect(dir: &Path) -> Result<Vec<SummaryRow>> {
    let mut paths = Vec::new();
    find_reports(dir, &mut paths)?;
    if paths.is_empty() {
        return Err(Error::invalid(format!("no report.json below {}", dir.display())));
    }
    let mut rows = Vec::new();
    let mut bad = Vec::new();
    let mut version_clash = false;
    for p in &paths {
        let parsed = std::fs::read_to_string(p)
            .map_err(|e| e.to_string())
            .and_then(|t| serde_json::from_str::<Value>(&t).map_err(|e| e.to_string()))
            .and_then(|v| parse_row(dir, p, &v));
        match parsed {
            Ok(r) => rows.push(r),
            Err(e) => {
                version_clash |= e.starts_with("schema version");
                bad.push(format!("{}: {e}", p.display()));
            }
        }
    }
    if !bad.is_empty() {
        let msg = bad.join("; ");
        return Err(if version_clash { Error::Schema(msg) } else { Error::invalid(format!("corrupt reports: {msg}")) });
    }
    Ok(rows)
}

fn cell(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".into(), fmt_f64)
}

fn counts_cell(c: &[(f64, u64)]) -> String {
    if c.is_empty() {
        "-".into()
    } else {
        c.iter().map(|(s, n)| format!("{s}:{n}")).collect::<Vec<_>>().join(";")
    }
}

const HEADER: [&str; 10] = ["run", "task", "surface", "potential", "e1", "total_curvature", "cert_n", "cert_epsilon", "cert_q", "counts"];

fn cells(r: &SummaryRow) -> [String; 10] {
    [
        r.run.clone(),
        r.task.clone(),
        r.surface.clone(),
        r.potential.clone(),
        cell(r.e1),
        cell(r.total_curvature),
        cell(r.cert_n),
        cell(r.cert_epsilon),
        cell(r.cert_q),
        counts_cell(&r.counts),
    ]
}

/// Writes `summary.csv` and `plot/summary.dat` into `dir`.
pub fn merge(dir: &Path) -> Result<Vec<SummaryRow>> {
    let rows = collect(dir)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(HEADER).map_err(io)?;
    for r in &rows {
        w.write_record(cells(r)).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    write_file(&dir.join("summary.csv"), &bytes)?;
    let mut dat = format!("# {}\n", HEADER.join(" "));
    for r in &rows {
        let c: Vec<String> = cells(r).into_iter().map(|s| s.replace(char::is_whitespace, "_")).collect();
        dat.push_str(&c.join(" "));
        dat.push('\n');
    }
    write_file(&dir.join("plot").join("summary.dat"), dat.as_bytes())?;
    Ok(rows)
}
