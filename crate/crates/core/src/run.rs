//! Task execution: every task writes `report.json`, its CSV tables and
//! whitespace-separated copies under `plot/`.

use std::path::Path;

use serde_json::{json, Value};

use crate::config::{RunConfig, Task, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::geometry::{a_max, curvature_table, geometry_report};
use crate::io::{num, to_json_string, write_csv, write_dat, write_file};
use crate::profiles::ProfileCurve;
use crate::spectral::{assemble_pencil, build_grid, domain_sweep, lowest_eigenpairs, SolverOptions, SpectrumResult};
use crate::transverse::{attractivity_precheck, ground_state, Attractivity, TransverseGroundState, TransverseProfile};
use crate::variational::{certify, CertReport, TrialRecord};

fn log(msg: impl AsRef<str>) {
    eprintln!("[softlayer] {}", msg.as_ref());
}

fn table(out: &Path, stem: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    write_csv(&out.join(format!("{stem}.csv")), header, rows)?;
    write_dat(&out.join("plot").join(format!("{stem}.dat")), header, rows)
}

fn write_report(out: &Path, task: Task, cfg: &RunConfig, result: Value, summary: Value) -> Result<()> {
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "task": task.name(),
        "config_hash": cfg.hash(),
        "config": cfg.canonical(),
        "result": result,
        "summary": summary,
    });
    write_file(&out.join("report.json"), to_json_string(&report).as_bytes())
}

/// `a < a_max` on `[0, s_end]`, the locality hypothesis.
pub fn check_locality(curve: &ProfileCurve, profile: &TransverseProfile, s_end: f64) -> Result<f64> {
    let amax = a_max(curve, s_end)?;
    let a = profile.support();
    if a >= amax {
        return Err(Error::Hypothesis { label: "Ass.local violated", detail: format!("a ≥ a_max ({a} ≥ {amax})") });
    }
    Ok(amax)
}

fn transverse_state(cfg: &RunConfig, profile: &TransverseProfile) -> Result<TransverseGroundState> {
    ground_state(profile, cfg.transverse.half_width, cfg.transverse.h)
}

/// Executes one task of `cfg`; relative input paths resolve against `base`.
pub fn run(task: Task, cfg: &RunConfig, base: &Path, out: &Path) -> Result<()> {
    let curve = cfg.surface.build(base)?;
    let profile = cfg.potential.build(base)?;
    log(format!("{} on {} with {} -> {}", task.name(), curve.name(), profile.name(), out.display()));
    match task {
        Task::Geometry => geometry_task(cfg, &curve, out),
        Task::Transverse => transverse_task(cfg, &profile, out),
        Task::Certify => certify_task(cfg, &curve, &profile, out),
        Task::Spectrum => spectrum_task(cfg, &curve, &profile, out),
        Task::Sweep => sweep_task(cfg, &curve, &profile, out),
        Task::Report => crate::report::merge(out).map(|_| ()),
    }
}

fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

fn geometry_task(cfg: &RunConfig, curve: &ProfileCurve, out: &Path) -> Result<()> {
    let s_end = cfg.geometry.s_end;
    let g = geometry_report(curve, s_end)?;
    let rows: Vec<Vec<f64>> = curvature_table(curve, s_end, cfg.geometry.samples)?.into_iter().map(|r| r.to_vec()).collect();
    table(out, "geometry", &["s", "k1", "k2", "K", "M", "c_plus"], &rows)?;
    let result = json!({
        "surface": curve.name(),
        "s_end": num(g.s_end),
        "c_sigma": num(g.c_sigma),
        "max_r_over_s": num(g.max_r_over_s),
        "total_curvature_quadrature": num(g.total_k_quadrature),
        "total_curvature_boundary": num(g.total_k_boundary),
        "slope": g.slope.map_or(Value::Null, |b| json!({"delta": num(b.delta), "s0": num(b.s0)})),
        "a_max": num(g.a_max),
        "decay_exponent": opt(g.decay_exponent),
        "notes": g.notes,
    });
    write_report(out, Task::Geometry, cfg, result, json!({"total_curvature": num(g.total_k_quadrature)}))
}

fn transverse_json(gs: &TransverseGroundState) -> Value {
    json!({
        "profile": gs.profile.name(),
        "e1": num(gs.e1),
        "kappa": num(gs.kappa()),
        "n_plus": num(gs.n_plus),
        "n_minus": num(gs.n_minus),
        "c_moment": num(gs.c_moment),
        "tail_fit_residual": num(gs.tail_fit_residual),
    })
}

fn transverse_task(cfg: &RunConfig, profile: &TransverseProfile, out: &Path) -> Result<()> {
    let pre = attractivity_precheck(profile);
    let gs = transverse_state(cfg, profile)?;
    let reach = profile.support() + 12.0 / gs.kappa();
    let n = 2000;
    let rows: Vec<Vec<f64>> = (0..=n)
        .map(|i| {
            let t = -reach + 2.0 * reach * i as f64 / n as f64;
            let (xi, dxi) = gs.eval(t);
            vec![t, xi, dxi]
        })
        .collect();
    table(out, "transverse", &["t", "xi", "xi_prime"], &rows)?;
    let mut result = transverse_json(&gs);
    result["attractivity"] = json!(match pre {
        Attractivity::Sufficient => "sufficient",
        Attractivity::Unknown => "unknown",
    });
    write_report(out, Task::Transverse, cfg, result, json!({"e1": num(gs.e1)}))
}

fn record_row(r: &TrialRecord) -> Vec<f64> {
    let f = &r.form;
    vec![
        f.n,
        f.epsilon,
        r.constants.delta,
        r.constants.c_sigma,
        f.q1,
        f.q2_eps0,
        f.q2_eps1,
        f.q2_eps2,
        f.total,
        f.norm_sq,
        f.analytic_bound,
        f.quad_error,
        f.cutoff_shift,
        if r.certified { 1.0 } else { 0.0 },
    ]
}

const RECORD_HEADER: [&str; 14] = [
    "n",
    "epsilon",
    "delta",
    "c_sigma",
    "q1",
    "q2_eps0",
    "q2_eps1",
    "q2_eps2",
    "total",
    "norm_sq",
    "analytic_bound",
    "quad_error",
    "cutoff_shift",
    "certified",
];

fn record_json(r: &TrialRecord) -> Value {
    let mut m = serde_json::Map::new();
    for (k, v) in RECORD_HEADER.iter().zip(record_row(r)) {
        m.insert((*k).to_string(), num(v));
    }
    m.insert("certified".into(), json!(r.certified));
    Value::Object(m)
}

fn certify_json(rep: &CertReport, gs: &TransverseGroundState) -> Value {
    json!({
        "transverse": transverse_json(gs),
        "records": rep.records.iter().map(record_json).collect::<Vec<_>>(),
        "witness": rep.witness.map_or(Value::Null, |i| record_json(&rep.records[i])),
        "line_search": rep.line_search.iter().map(|&(e, t)| json!([num(e), num(t)])).collect::<Vec<_>>(),
        "disjoint_pairs": rep.disjoint_pairs.iter().map(|&(a, b)| json!([num(a), num(b)])).collect::<Vec<_>>(),
        "a_max": num(rep.a_max),
    })
}

fn certify_task(cfg: &RunConfig, curve: &ProfileCurve, profile: &TransverseProfile, out: &Path) -> Result<()> {
    let gs = transverse_state(cfg, profile)?;
    let rep = certify(curve, &gs, &cfg.certify.options())?;
    table(out, "certify", &RECORD_HEADER, &rep.records.iter().map(record_row).collect::<Vec<_>>())?;
    let ls: Vec<Vec<f64>> = rep.line_search.iter().map(|&(e, t)| vec![e, t]).collect();
    table(out, "line_search", &["epsilon", "total"], &ls)?;
    let cert = rep.witness.map_or(Value::Null, |i| {
        let f = &rep.records[i].form;
        json!({"n": num(f.n), "epsilon": num(f.epsilon), "total": num(f.total)})
    });
    write_report(out, Task::Certify, cfg, certify_json(&rep, &gs), json!({"e1": num(gs.e1), "certificate": cert}))?;
    let w = rep.witness()?;
    log(format!("certified at n = {} with Q = {:e}", w.form.n, w.form.total));
    Ok(())
}

fn solver_options(cfg: &RunConfig, g: &crate::config::GridSpec) -> SolverOptions {
    SolverOptions { k: g.k, tol: g.tol, max_iter: g.max_iter, seed: cfg.seed }
}

fn spectrum_json(r: &SpectrumResult) -> Value {
    serde_json::to_value(r).expect("spectrum result serializes")
}

fn spectrum_task(cfg: &RunConfig, curve: &ProfileCurve, profile: &TransverseProfile, out: &Path) -> Result<()> {
    let spec = &cfg.spectrum;
    check_locality(curve, profile, spec.s_end)?;
    let gs = transverse_state(cfg, profile)?;
    let g = &spec.grid;
    let grid = build_grid(curve, profile.support(), spec.s_end, g.t_half, g.h_s, g.h_t, g.grid_options())?;
    let pencil = assemble_pencil(&grid, g.m, profile)?;
    log(format!("{} unknowns, {} clipped columns", pencil.dofs(), grid.clipped_columns()));
    let r = lowest_eigenpairs(&pencil, gs.e1, &solver_options(cfg, g))?;
    let rows: Vec<Vec<f64>> =
        r.eigenvalues.iter().zip(&r.residuals).enumerate().map(|(i, (l, res))| vec![(i + 1) as f64, *l, *res]).collect();
    table(out, "spectrum", &["k", "lambda", "residual"], &rows)?;
    let summary = json!({"e1": num(gs.e1), "counts": [[num(spec.s_end), r.count_below_e1]]});
    write_report(out, Task::Spectrum, cfg, spectrum_json(&r), summary)
}

fn sweep_task(cfg: &RunConfig, curve: &ProfileCurve, profile: &TransverseProfile, out: &Path) -> Result<()> {
    let spec = &cfg.sweep;
    let s_top = spec.s_list.iter().cloned().fold(0.0, f64::max);
    check_locality(curve, profile, s_top)?;
    let gs = transverse_state(cfg, profile)?;
    let g = &spec.grid;
    let sw = domain_sweep(curve, &gs, g.m, &spec.s_list, g.t_half, g.h_s, g.h_t, g.grid_options(), &solver_options(cfg, g))?;
    let width = sw.results.iter().map(|r| r.eigenvalues.len()).max().unwrap_or(0);
    let mut header: Vec<String> = vec!["S".into(), "count_below_E1".into()];
    header.extend((1..=width).map(|k| format!("lambda{k}")));
    let rows: Vec<Vec<f64>> = sw
        .results
        .iter()
        .map(|r| {
            let mut row = vec![r.domain.s_end, r.count_below_e1 as f64];
            row.extend((0..width).map(|k| r.eigenvalues.get(k).copied().unwrap_or(f64::NAN)));
            row
        })
        .collect();
    let hdr: Vec<&str> = header.iter().map(String::as_str).collect();
    table(out, "sweep", &hdr, &rows)?;
    let counts: Vec<Value> = sw.results.iter().map(|r| json!([num(r.domain.s_end), r.count_below_e1])).collect();
    let result = json!({
        "results": sw.results.iter().map(spectrum_json).collect::<Vec<_>>(),
        "violations": sw.violations.iter().map(|&(s, k, d)| json!({"S": num(s), "index": k, "increase": num(d)})).collect::<Vec<_>>(),
        "counts": counts,
    });
    write_report(out, Task::Sweep, cfg, result, json!({"e1": num(gs.e1), "counts": counts}))?;
    if !sw.violations.is_empty() {
        log(format!("Dirichlet monotonicity violated: {:?}", sw.violations));
    }
    Ok(())
}
