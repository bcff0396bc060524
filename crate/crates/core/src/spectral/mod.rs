//! Low spectrum of the layer Hamiltonian, one angular mode at a time, on
//! truncated `(s, t)` domains.

pub mod grid;
pub mod lobpcg;
pub mod multigrid;
pub mod pencil;
pub mod sparse;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::profiles::ProfileCurve;
use crate::quadrature::compensated_sum;
use crate::transverse::{discrete_ground_state, tridiagonal_lowest, TransverseGroundState, TransverseProfile};
use crate::variational::phi_n;

pub use grid::{build_grid, ClipEdge, GridOptions, LayerGrid};
pub use lobpcg::{lobpcg, Eigenpairs, LobpcgOptions};
pub use multigrid::Multigrid;
pub use pencil::{assemble_pencil, SymmetricPencil};
pub use sparse::Csr;

/// Residual bound on reported eigenpairs.
pub const EIG_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub k: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { k: 4, tol: EIG_TOL, max_iter: 500, seed: 0x5eed }
    }
}

/// Truncation and steps of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Domain {
    pub s_end: f64,
    pub t_half: f64,
    pub h_s: f64,
    pub h_t: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumResult {
    pub m: u32,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub e1: f64,
    pub count_below_e1: usize,
    /// Every computed eigenvalue lies below `E₁`; the true count may be larger.
    pub saturated: bool,
    pub domain: Domain,
    pub dofs: usize,
    pub shift: f64,
    pub iterations: usize,
    #[serde(skip)]
    pub vectors: Vec<Vec<f64>>,
}

/// Lower bound of the spectrum: the `s`-coupling is positive semidefinite,
/// so the smallest eigenvalue over the column blocks bounds the pencil.
pub fn column_lower_bound(p: &SymmetricPencil) -> Result<f64> {
    let g = &p.grid;
    let mut lb = f64::INFINITY;
    for i in 0..g.n_s() {
        let k0 = g.offsets[i];
        let len = g.top[i];
        let d: Vec<f64> = (k0..k0 + len).map(|k| p.column_diag[k] / p.b[k]).collect();
        let e: Vec<f64> = (k0..k0 + len - 1).map(|k| p.a.get(k, k + 1) / (p.b[k] * p.b[k + 1]).sqrt()).collect();
        lb = lb.min(tridiagonal_lowest(&d, &e)?.0);
    }
    Ok(lb)
}

fn shifted(a: &Csr, b: &[f64], sigma: f64) -> Csr {
    let mut s = a.clone();
    for i in 0..s.nrows {
        for k in s.indptr[i]..s.indptr[i + 1] {
            if s.indices[k] as usize == i {
                s.data[k] -= sigma * b[i];
            }
        }
    }
    s
}

/// The `k` lowest eigenpairs, counted against the threshold `e1`.
///
/// Iterates with LOBPCG preconditioned by a multigrid V-cycle for
/// `A − σB`, with `σ` just below the column bound so the shifted matrix is
/// positive definite.
pub fn lowest_eigenpairs(pencil: &SymmetricPencil, e1: f64, opts: &SolverOptions) -> Result<SpectrumResult> {
    let lb = column_lower_bound(pencil)?;
    let mut margin = 1e-3 * lb.abs().max(1.0);
    let mut attempt = 0;
    let (mg, sigma) = loop {
        let sigma = lb - margin;
        let a = shifted(&pencil.a, &pencil.b, sigma);
        match Multigrid::new(a, pencil.grid.offsets.clone(), pencil.grid.top.clone()) {
            Ok(mg) => break (mg, sigma),
            Err(Error::Factorization(msg)) if attempt < 3 => {
                let _ = msg;
                attempt += 1;
                margin *= 10.0;
            }
            Err(e) => return Err(e),
        }
    };
    let k = opts.k.min(pencil.dofs());
    let lo = LobpcgOptions { tol: opts.tol, max_iter: opts.max_iter, seed: opts.seed, guard: 2 };
    let ep = lobpcg(&pencil.a, &pencil.b, |r, z| mg.apply(r, z), k, &lo)?;
    let g = &pencil.grid;
    let h_s = (0..=g.n_s()).map(|i| g.hs_mid(i)).fold(0.0, f64::max);
    let count = ep.values.iter().filter(|&&v| v < e1 - opts.tol).count();
    Ok(SpectrumResult {
        m: pencil.m,
        saturated: count == ep.values.len(),
        eigenvalues: ep.values,
        residuals: ep.residuals,
        e1,
        count_below_e1: count,
        domain: Domain { s_end: g.s_hi, t_half: g.t_half, h_s, h_t: g.h_t },
        dofs: pencil.dofs(),
        shift: sigma,
        iterations: ep.iterations,
        vectors: ep.vectors,
    })
}

/// Results of a sweep over the truncation `S`.
#[derive(Debug, Clone, Serialize)]
pub struct Sweep {
    pub results: Vec<SpectrumResult>,
    /// `(S, index, increase)` for every `λ_k` that grew with `S` by more
    /// than the tolerance.
    pub violations: Vec<(f64, usize, f64)>,
}

impl Sweep {
    pub fn counts(&self) -> Vec<usize> {
        self.results.iter().map(|r| r.count_below_e1).collect()
    }
}

/// Upper limit on eigenpairs requested while counting.
pub const K_MAX: usize = 32;

/// Runs the pipeline for each `S`, widening the block until the count is
/// not saturated, and checks that every `λ_k` is nonincreasing in `S`.
#[allow(clippy::too_many_arguments)]
pub fn domain_sweep(
    curve: &ProfileCurve,
    gs: &TransverseGroundState,
    m: u32,
    s_list: &[f64],
    t_half: f64,
    h_s: f64,
    h_t: f64,
    grid_opts: GridOptions,
    opts: &SolverOptions,
) -> Result<Sweep> {
    if s_list.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("S values must be strictly ascending"));
    }
    let mut results: Vec<SpectrumResult> = Vec::new();
    let mut violations = Vec::new();
    let mut k = opts.k;
    for &s_end in s_list {
        let g = build_grid(curve, gs.profile.support(), s_end, t_half, h_s, h_t, grid_opts)?;
        let p = assemble_pencil(&g, m, &gs.profile)?;
        let mut res = lowest_eigenpairs(&p, gs.e1, &SolverOptions { k, ..*opts })?;
        while res.saturated && k < K_MAX {
            k = (2 * k).min(K_MAX);
            res = lowest_eigenpairs(&p, gs.e1, &SolverOptions { k, ..*opts })?;
        }
        if let Some(prev) = results.last() {
            for (i, (a, b)) in prev.eigenvalues.iter().zip(&res.eigenvalues).enumerate() {
                if b - a > opts.tol {
                    violations.push((s_end, i, b - a));
                }
            }
        }
        results.push(res);
    }
    Ok(Sweep { results, violations })
}

/// Shifted Rayleigh quotient `vᵀ(A − E B)v / vᵀBv`, with the numerator summed
/// as row sums plus edge differences so large balanced terms cancel early.
pub fn shifted_rayleigh(p: &SymmetricPencil, v: &[f64], e: f64) -> (f64, f64) {
    let mut terms = Vec::with_capacity(3 * v.len());
    for i in 0..p.a.nrows {
        let (cols, vals) = p.a.row(i);
        let rowsum = compensated_sum(vals.iter().copied());
        terms.push((rowsum - e * p.b[i]) * v[i] * v[i]);
        for (&j, &a) in cols.iter().zip(vals) {
            let j = j as usize;
            if j > i {
                let d = v[i] - v[j];
                terms.push(-a * d * d);
            }
        }
    }
    let den = compensated_sum(v.iter().zip(&p.b).map(|(x, b)| b * x * x));
    (compensated_sum(terms), den)
}

/// Rayleigh quotient of the trial function `φ_n ξ + ε (φ_n/s) t ξ` sampled on
/// a geometric `s` grid over its support, against the threshold of the same
/// discretization in `t`. Columns clipped below `T` keep only their active
/// nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialQuotient {
    pub n: f64,
    pub epsilon: f64,
    pub e1_discrete: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub quotient: f64,
    pub columns: usize,
    pub dofs: usize,
}

pub fn trial_quotient(
    curve: &ProfileCurve,
    profile: &TransverseProfile,
    n: f64,
    epsilon: f64,
    t_half: f64,
    h_t: f64,
    columns: usize,
) -> Result<TrialQuotient> {
    if !(n > 1.0) || columns < 4 {
        return Err(Error::invalid("trial quotient needs n > 1 and at least 4 columns"));
    }
    let (lo, hi) = (n, n * n * n);
    let ratio = (hi / lo).ln() / (columns + 1) as f64;
    let s: Vec<f64> = (1..=columns).map(|i| lo * (ratio * i as f64).exp()).collect();
    let g = LayerGrid::with_s_nodes(curve, lo, hi, &s, t_half, h_t, GridOptions::default())?;
    g.check_resolution(profile.support())?;
    let p = assemble_pencil(&g, 0, profile)?;
    let (e1h, xi) = discrete_ground_state(profile, t_half, h_t)?;
    let mut v = vec![0.0; g.dofs()];
    for i in 0..g.n_s() {
        let si = g.s(i);
        let phi = phi_n(n, si);
        for j in 0..g.top[i] {
            v[g.index(i, j)] = phi * xi[j] * (1.0 + epsilon * g.t[j] / si);
        }
    }
    let (num, den) = shifted_rayleigh(&p, &v, e1h);
    Ok(TrialQuotient {
        n,
        epsilon,
        e1_discrete: e1h,
        numerator: num,
        denominator: den,
        quotient: num / den,
        columns,
        dofs: g.dofs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transverse::delta_ground_state;

    #[test]
    fn column_bound_is_transverse_threshold_on_the_plane() {
        let g = build_grid(&ProfileCurve::plane(), 0.0, 4.0, 4.0, 0.1, 0.1, GridOptions::default()).unwrap();
        let p = assemble_pencil(&g, 0, &TransverseProfile::delta(-2.0)).unwrap();
        let lb = column_lower_bound(&p).unwrap();
        let (e1h, _) = discrete_ground_state(&TransverseProfile::delta(-2.0), 4.0, 0.1).unwrap();
        assert!((lb - e1h).abs() < 1e-12, "{lb} {e1h}");
    }

    #[test]
    fn plane_ground_state_separates() {
        // Separable: λ₁ = E₁ʰ + lowest radial eigenvalue of the same grid.
        let (s_end, t_half, h) = (6.0, 4.0, 0.1);
        let g = build_grid(&ProfileCurve::plane(), 0.0, s_end, t_half, h, h, GridOptions::default()).unwrap();
        let p = assemble_pencil(&g, 0, &TransverseProfile::delta(-2.0)).unwrap();
        let r = lowest_eigenpairs(&p, -1.0, &SolverOptions { k: 2, ..Default::default() }).unwrap();
        let (e1h, _) = discrete_ground_state(&TransverseProfile::delta(-2.0), t_half, h).unwrap();
        // Radial part: weights s at midpoints, mass s at nodes, natural at 0.
        let ns = g.n_s();
        let d: Vec<f64> = (0..ns)
            .map(|i| {
                let si = (i + 1) as f64 * h;
                let left = if i == 0 { 0.0 } else { si - 0.5 * h };
                (left + si + 0.5 * h) / (h * h * si)
            })
            .collect();
        let e: Vec<f64> = (0..ns - 1)
            .map(|i| {
                let si = (i + 1) as f64 * h;
                -(si + 0.5 * h) / (h * h * (si * (si + h)).sqrt())
            })
            .collect();
        let (radial, _) = tridiagonal_lowest(&d, &e).unwrap();
        assert!((r.eigenvalues[0] - (e1h + radial)).abs() < 1e-9, "{} {}", r.eigenvalues[0], e1h + radial);
        assert_eq!(r.count_below_e1, 0);
        assert!(r.residuals.iter().all(|&x| x <= EIG_TOL));
    }

    #[test]
    fn modes_are_ordered() {
        let c = ProfileCurve::cap_cone(1.0, std::f64::consts::FRAC_PI_2).unwrap();
        let g = build_grid(&c, 0.0, 5.0, 3.0, 0.1, 0.1, GridOptions::default()).unwrap();
        let gs = delta_ground_state(-2.0).unwrap();
        let o = SolverOptions { k: 1, ..Default::default() };
        let l: Vec<f64> = (0..3)
            .map(|m| lowest_eigenpairs(&assemble_pencil(&g, m, &gs.profile).unwrap(), gs.e1, &o).unwrap().eigenvalues[0])
            .collect();
        assert!(l[0] <= l[1] + 1e-9 && l[1] <= l[2] + 1e-9, "{l:?}");
    }
}
