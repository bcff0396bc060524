//! Locally optimal block preconditioned conjugate gradients for the lowest
//! eigenpairs of `A v = λ B v` with `B` diagonal and positive.

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::sparse::Csr;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LobpcgOptions {
    /// Bound on `‖Av − λBv‖ / ‖Bv‖` for every wanted pair.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Extra block vectors beyond the wanted count.
    pub guard: usize,
}

impl Default for LobpcgOptions {
    fn default() -> Self {
        LobpcgOptions { tol: 1e-8, max_iter: 500, seed: 0x5eed, guard: 2 }
    }
}

#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    /// `B`-orthonormal eigenvectors.
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

type Block = Vec<Vec<f64>>;

fn dot_w(x: &[f64], y: &[f64], w: Option<&[f64]>) -> f64 {
    match w {
        Some(w) => x.iter().zip(y).zip(w).map(|((a, b), c)| a * b * c).sum(),
        None => x.iter().zip(y).map(|(a, b)| a * b).sum(),
    }
}

fn gram(u: &[&Vec<f64>], v: &[&Vec<f64>], w: Option<&[f64]>) -> DMatrix<f64> {
    DMatrix::from_fn(u.len(), v.len(), |i, j| dot_w(u[i], v[j], w))
}

fn refs<'a>(blocks: &[&'a Block]) -> Vec<&'a Vec<f64>> {
    blocks.iter().flat_map(|b| b.iter()).collect()
}

/// Columns of `basis · coeffs`.
fn combine(basis: &[&Vec<f64>], coeffs: &DMatrix<f64>, skip: usize) -> Block {
    let n = basis.first().map_or(0, |v| v.len());
    (0..coeffs.ncols())
        .map(|c| {
            let mut out = vec![0.0; n];
            for (r, v) in basis.iter().enumerate().skip(skip) {
                let a = coeffs[(r, c)];
                if a != 0.0 {
                    out.iter_mut().zip(v.iter()).for_each(|(o, x)| *o += a * x);
                }
            }
            out
        })
        .collect()
}

fn sorted_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let e = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..e.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| e.eigenvalues[i].total_cmp(&e.eigenvalues[j]));
    let vals = order.iter().map(|&i| e.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(e.eigenvectors.nrows(), order.len(), |r, c| e.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// `B`-orthonormalizes a block, dropping directions that are numerically
/// dependent.
fn svqb(y: Block, b: &[f64]) -> Block {
    if y.is_empty() {
        return y;
    }
    let r: Vec<&Vec<f64>> = y.iter().collect();
    let g = gram(&r, &r, Some(b));
    let d: Vec<f64> = (0..g.nrows()).map(|i| if g[(i, i)] > 0.0 { 1.0 / g[(i, i)].sqrt() } else { 0.0 }).collect();
    let gs = DMatrix::from_fn(g.nrows(), g.ncols(), |i, j| d[i] * g[(i, j)] * d[j]);
    let (vals, vecs) = sorted_eigen(gs);
    let top = vals.last().copied().unwrap_or(0.0);
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > 1e-12 * top && top > 0.0).collect();
    let coeffs = DMatrix::from_fn(y.len(), keep.len(), |i, c| d[i] * vecs[(i, keep[c])] / vals[keep[c]].sqrt());
    combine(&r, &coeffs, 0)
}

/// `Y ← Y − X (Xᵀ B Y)` for a `B`-orthonormal `X`.
fn project_out(y: &mut Block, x: &[&Vec<f64>], b: &[f64]) {
    for yi in y.iter_mut() {
        for xj in x {
            let c = dot_w(xj, yi, Some(b));
            yi.iter_mut().zip(xj.iter()).for_each(|(a, v)| *a -= c * v);
        }
    }
}

/// Rayleigh–Ritz on the span of `s`; returns the leading `want` Ritz values
/// and coefficient columns.
fn rayleigh_ritz(s: &[&Vec<f64>], as_: &[&Vec<f64>], b: &[f64], want: usize) -> Option<(Vec<f64>, DMatrix<f64>)> {
    let mut g = gram(s, s, Some(b));
    let mut h = gram(s, as_, None);
    g = (&g + g.transpose()) * 0.5;
    h = (&h + h.transpose()) * 0.5;
    let l = Cholesky::new(g)?.l();
    let li_h = l.solve_lower_triangular(&h)?;
    let m = l.solve_lower_triangular(&li_h.transpose())?;
    let m = (&m + m.transpose()) * 0.5;
    let (vals, vecs) = sorted_eigen(m);
    let lt = l.transpose();
    let c = lt.solve_upper_triangular(&vecs.columns(0, want).into_owned())?;
    Some((vals[..want].to_vec(), c))
}

fn apply_a(a: &Csr, x: &Block) -> Block {
    x.iter().map(|v| a.mul_vec(v)).collect()
}

fn residuals(x: &Block, ax: &Block, theta: &[f64], b: &[f64]) -> (Block, Vec<f64>) {
    let mut rs = Vec::with_capacity(x.len());
    let mut norms = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let mut num = 0.0;
        let mut den = 0.0;
        let r: Vec<f64> = (0..b.len())
            .map(|k| {
                let bx = b[k] * x[i][k];
                let ri = ax[i][k] - theta[i] * bx;
                num += ri * ri;
                den += bx * bx;
                ri
            })
            .collect();
        rs.push(r);
        norms.push((num / den).sqrt());
    }
    (rs, norms)
}

/// Lowest `k` eigenpairs. `precond` approximates `(A − σB)⁻¹` for some `σ`
/// below the spectrum and must be symmetric positive definite.
pub fn lobpcg<P>(a: &Csr, b: &[f64], precond: P, k: usize, opts: &LobpcgOptions) -> Result<Eigenpairs>
where
    P: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("cannot compute {k} eigenpairs of a pencil of size {n}")));
    }
    let bs = (k + opts.guard).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let x0: Block = (0..bs).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let x0 = svqb(x0, b);
    if x0.len() < bs {
        return Err(Error::NoConvergence("starting block is rank deficient".into()));
    }
    let ax0 = apply_a(a, &x0);
    let (mut theta, c) = rayleigh_ritz(&x0.iter().collect::<Vec<_>>(), &ax0.iter().collect::<Vec<_>>(), b, bs)
        .ok_or_else(|| Error::NoConvergence("initial Rayleigh–Ritz failed".into()))?;
    let mut x = combine(&x0.iter().collect::<Vec<_>>(), &c, 0);
    let mut ax = apply_a(a, &x);
    let mut p: Block = Vec::new();
    let mut fresh = true;

    for it in 1..=opts.max_iter {
        let (r, res) = residuals(&x, &ax, &theta, b);
        if res[..k].iter().all(|&v| v <= opts.tol) {
            if fresh {
                return Ok(Eigenpairs { values: theta[..k].to_vec(), vectors: x[..k].to_vec(), residuals: res[..k].to_vec(), iterations: it - 1 });
            }
            ax = apply_a(a, &x);
            fresh = true;
            continue;
        }
        let active: Vec<usize> = (0..bs).filter(|&i| res[i] > opts.tol).collect();
        let mut w: Block = active
            .iter()
            .map(|&i| {
                let mut z = vec![0.0; n];
                precond(&r[i], &mut z);
                z
            })
            .collect();
        let xr: Vec<&Vec<f64>> = x.iter().collect();
        project_out(&mut w, &xr, b);
        project_out(&mut w, &xr, b);
        let w = svqb(w, b);
        if !p.is_empty() {
            let wr: Vec<&Vec<f64>> = w.iter().collect();
            for _ in 0..2 {
                project_out(&mut p, &xr, b);
                project_out(&mut p, &wr, b);
            }
            p = svqb(p, b);
        }
        let aw = apply_a(a, &w);
        let ap = apply_a(a, &p);

        let attempt = |with_p: bool| {
            let s = if with_p { refs(&[&x, &w, &p]) } else { refs(&[&x, &w]) };
            let as_ = if with_p { refs(&[&ax, &aw, &ap]) } else { refs(&[&ax, &aw]) };
            rayleigh_ritz(&s, &as_, b, bs).map(|(t, c)| (t, c, s, as_))
        };
        let (t_new, c, s, as_) = match attempt(true) {
            Some(v) => v,
            None => attempt(false).ok_or_else(|| Error::NoConvergence(format!("Rayleigh–Ritz broke down at iteration {it}")))?,
        };
        let new_x = combine(&s, &c, 0);
        let new_ax = combine(&as_, &c, 0);
        let act = DMatrix::from_fn(c.nrows(), active.len(), |r, j| c[(r, active[j])]);
        let new_p = combine(&s, &act, bs);
        theta = t_new;
        x = new_x;
        ax = new_ax;
        p = new_p;
        fresh = false;
        if it % 20 == 0 {
            ax = apply_a(a, &x);
            fresh = true;
        }
    }
    let (_, res) = residuals(&x, &apply_a(a, &x), &theta, b);
    Err(Error::NoConvergence(format!(
        "LOBPCG stopped after {} iterations with residuals {:?}",
        opts.max_iter,
        &res[..k]
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplace_1d(n: usize) -> Csr {
        let mut tr = Vec::new();
        for i in 0..n {
            tr.push((i, i, 2.0));
            if i > 0 {
                tr.push((i, i - 1, -1.0));
            }
            if i + 1 < n {
                tr.push((i, i + 1, -1.0));
            }
        }
        Csr::from_triplets(n, n, &tr).unwrap()
    }

    #[test]
    fn identity_pencil_has_unit_spectrum() {
        let a = Csr::identity(50);
        let b = vec![1.0; 50];
        let e = lobpcg(&a, &b, |r, z| z.copy_from_slice(r), 3, &LobpcgOptions::default()).unwrap();
        assert!(e.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn laplacian_with_mass() {
        let n = 200;
        let a = laplace_1d(n);
        let b: Vec<f64> = vec![0.5; n];
        let e = lobpcg(&a, &b, |r, z| z.copy_from_slice(r), 3, &LobpcgOptions { max_iter: 3000, ..Default::default() })
            .unwrap();
        for (j, v) in e.values.iter().enumerate() {
            let th = (j + 1) as f64 * std::f64::consts::PI / (2.0 * (n + 1) as f64);
            let exact = 4.0 * th.sin().powi(2) / 0.5;
            assert!((v - exact).abs() < 1e-9 * exact.max(1.0), "{v} vs {exact}");
        }
        assert!(e.residuals.iter().all(|&r| r <= 1e-8));
    }

    #[test]
    fn same_seed_same_bits() {
        let a = laplace_1d(60);
        let b = vec![1.0; 60];
        let o = LobpcgOptions { max_iter: 2000, ..Default::default() };
        let e1 = lobpcg(&a, &b, |r, z| z.copy_from_slice(r), 2, &o).unwrap();
        let e2 = lobpcg(&a, &b, |r, z| z.copy_from_slice(r), 2, &o).unwrap();
        assert_eq!(e1.values, e2.values);
    }
}
