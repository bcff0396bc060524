//! Geometric multigrid for pencils on column-structured grids.
//!
//! Columns are halved in `s` at every level (semi-coarsening) while the `t`
//! direction is kept whole and smoothed by exact column solves, which copes
//! with the strong anisotropy of thin, stretched cells.

use crate::error::{Error, Result};

use super::sparse::{Csr, CsrBuilder};

/// `LDLᵀ` factors of the tridiagonal blocks of all columns.
struct ColumnFactors {
    pivot: Vec<f64>,
    lower: Vec<f64>,
}

struct Level {
    a: Csr,
    offsets: Vec<usize>,
    lens: Vec<usize>,
    factors: ColumnFactors,
    /// Prolongation from the next coarser level, and its transpose.
    p: Option<(Csr, Csr)>,
}

/// Symmetric V-cycle preconditioner for a symmetric positive definite matrix.
pub struct Multigrid {
    levels: Vec<Level>,
}

fn factor_columns(a: &Csr, offsets: &[usize], lens: &[usize]) -> Result<ColumnFactors> {
    let n = a.nrows;
    let mut pivot = vec![0.0; n];
    let mut lower = vec![0.0; n];
    for (c, &len) in lens.iter().enumerate() {
        let k0 = offsets[c];
        for j in 0..len {
            let k = k0 + j;
            let d = a.get(k, k);
            let p = if j == 0 {
                d
            } else {
                let e = a.get(k, k - 1);
                let l = e / pivot[k - 1];
                lower[k] = l;
                d - l * e
            };
            if !(p > 0.0) || !p.is_finite() {
                return Err(Error::Factorization(format!("column {c} lost positive definiteness at row {j} (pivot {p})")));
            }
            pivot[k] = p;
        }
    }
    Ok(ColumnFactors { pivot, lower })
}

impl ColumnFactors {
    /// Solves the block of column `[k0, k0 + len)` in place.
    fn solve(&self, k0: usize, len: usize, x: &mut [f64]) {
        for k in k0 + 1..k0 + len {
            x[k] -= self.lower[k] * x[k - 1];
        }
        for k in k0..k0 + len {
            x[k] /= self.pivot[k];
        }
        for k in (k0..k0 + len - 1).rev() {
            x[k] -= self.lower[k + 1] * x[k + 1];
        }
    }
}

/// Linear interpolation from coarse column `c` onto fine columns `2c`,
/// `2c + 1`, `2c + 2`.
fn prolongation(offsets: &[usize], lens: &[usize]) -> (Csr, Vec<usize>, Vec<usize>) {
    let nf = lens.len();
    let nc = nf / 2;
    let clens: Vec<usize> = (0..nc).map(|c| lens[2 * c + 1]).collect();
    let mut coffsets = vec![0];
    for &l in &clens {
        coffsets.push(coffsets.last().unwrap() + l);
    }
    let n = *offsets.last().unwrap();
    let mut b = CsrBuilder::new(n, *coffsets.last().unwrap(), 2 * n);
    for f in 0..nf {
        for j in 0..lens[f] {
            if f % 2 == 1 {
                let c = f / 2;
                if j < clens[c] {
                    b.push(coffsets[c] + j, 1.0);
                }
            } else {
                if f >= 2 && j < clens[f / 2 - 1] {
                    b.push(coffsets[f / 2 - 1] + j, 0.5);
                }
                if f / 2 < nc && j < clens[f / 2] {
                    b.push(coffsets[f / 2] + j, 0.5);
                }
            }
            b.end_row();
        }
    }
    (b.finish(), coffsets, clens)
}

impl Multigrid {
    pub fn new(a: Csr, offsets: Vec<usize>, lens: Vec<usize>) -> Result<Self> {
        let mut levels = Vec::new();
        let mut a = a;
        let mut offsets = offsets;
        let mut lens = lens;
        loop {
            let factors = factor_columns(&a, &offsets, &lens)?;
            if lens.len() == 1 {
                levels.push(Level { a, offsets, lens, factors, p: None });
                break;
            }
            let (p, coffsets, clens) = prolongation(&offsets, &lens);
            let pt = p.transpose();
            let coarse = pt.matmul(&a.matmul(&p)?)?;
            levels.push(Level { a, offsets, lens, factors, p: Some((p, pt)) });
            a = coarse;
            offsets = coffsets;
            lens = clens;
        }
        Ok(Multigrid { levels })
    }

    pub fn levels(&self) -> usize {
        self.levels.len()
    }

    /// `z ≈ A⁻¹ r` by one V-cycle from a zero initial guess.
    pub fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.iter_mut().for_each(|v| *v = 0.0);
        self.vcycle(0, r, z);
    }

    fn vcycle(&self, l: usize, b: &[f64], x: &mut [f64]) {
        let lv = &self.levels[l];
        match &lv.p {
            None => {
                x.copy_from_slice(b);
                lv.factors.solve(0, lv.lens[0], x);
            }
            Some((p, pt)) => {
                line_sweep(lv, b, x, false);
                let mut res = lv.a.mul_vec(x);
                for (ri, bi) in res.iter_mut().zip(b) {
                    *ri = bi - *ri;
                }
                let bc = pt.mul_vec(&res);
                let mut xc = vec![0.0; bc.len()];
                self.vcycle(l + 1, &bc, &mut xc);
                let corr = p.mul_vec(&xc);
                for (xi, ci) in x.iter_mut().zip(corr) {
                    *xi += ci;
                }
                line_sweep(lv, b, x, true);
            }
        }
    }
}

/// Block Gauss–Seidel over columns, forward or backward.
fn line_sweep(lv: &Level, b: &[f64], x: &mut [f64], backward: bool) {
    let nc = lv.lens.len();
    let mut rhs: Vec<f64> = Vec::new();
    for step in 0..nc {
        let c = if backward { nc - 1 - step } else { step };
        let k0 = lv.offsets[c];
        let len = lv.lens[c];
        let k1 = k0 + len;
        rhs.clear();
        for k in k0..k1 {
            let (cols, vals) = lv.a.row(k);
            let mut acc = b[k];
            for (&j, &v) in cols.iter().zip(vals) {
                let j = j as usize;
                if j < k0 || j >= k1 {
                    acc -= v * x[j];
                }
            }
            rhs.push(acc);
        }
        x[k0..k1].copy_from_slice(&rhs);
        lv.factors.solve(k0, len, x);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Anisotropic 2D Laplacian plus identity on a `ns × nt` grid.
    fn model(ns: usize, nt: usize) -> Csr {
        let idx = |i: usize, j: usize| i * nt + j;
        let mut tr = Vec::new();
        for i in 0..ns {
            for j in 0..nt {
                let k = idx(i, j);
                tr.push((k, k, 2.0 + 200.0 + 0.01));
                if i > 0 {
                    tr.push((k, idx(i - 1, j), -1.0));
                }
                if i + 1 < ns {
                    tr.push((k, idx(i + 1, j), -1.0));
                }
                if j > 0 {
                    tr.push((k, k - 1, -100.0));
                }
                if j + 1 < nt {
                    tr.push((k, k + 1, -100.0));
                }
            }
        }
        Csr::from_triplets(ns * nt, ns * nt, &tr).unwrap()
    }

    #[test]
    fn vcycle_contracts_fast() {
        let (ns, nt) = (63, 20);
        let a = model(ns, nt);
        let offsets: Vec<usize> = (0..=ns).map(|i| i * nt).collect();
        let mg = Multigrid::new(a.clone(), offsets, vec![nt; ns]).unwrap();
        assert_eq!(mg.levels(), 6);
        let n = ns * nt;
        let b: Vec<f64> = (0..n).map(|k| ((k * 7919) % 13) as f64 - 6.0).collect();
        let mut x = vec![0.0; n];
        let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut rnorm = bnorm;
        for _ in 0..8 {
            let ax = a.mul_vec(&x);
            let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
            rnorm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            let mut z = vec![0.0; n];
            mg.apply(&r, &mut z);
            x.iter_mut().zip(z).for_each(|(xi, zi)| *xi += zi);
        }
        assert!(rnorm < 1e-5 * bnorm, "{rnorm}");
    }

    #[test]
    fn indefinite_column_is_reported() {
        let a = Csr::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 1.0)]).unwrap();
        assert!(matches!(Multigrid::new(a, vec![0, 2], vec![2]), Err(Error::Factorization(_))));
    }
}
