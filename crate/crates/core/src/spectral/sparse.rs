//! Compressed sparse row storage with the few kernels the solver needs.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    pub nrows: usize,
    pub ncols: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<u32>,
    pub data: Vec<f64>,
}

impl Csr {
    /// Builds from triplets; duplicates are summed and columns sorted per row.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut counts = vec![0usize; nrows + 1];
        for &(i, j, _) in triplets {
            if i >= nrows || j >= ncols {
                return Err(Error::invalid(format!("triplet ({i}, {j}) outside {nrows}x{ncols}")));
            }
            counts[i + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut cols = vec![0u32; triplets.len()];
        let mut vals = vec![0.0; triplets.len()];
        for &(i, j, v) in triplets {
            cols[next[i]] = j as u32;
            vals[next[i]] = v;
            next[i] += 1;
        }
        let mut b = CsrBuilder::new(nrows, ncols, triplets.len());
        let mut row: Vec<(u32, f64)> = Vec::new();
        for i in 0..nrows {
            row.clear();
            row.extend((counts[i]..counts[i + 1]).map(|k| (cols[k], vals[k])));
            row.sort_by_key(|e| e.0);
            let mut k = 0;
            while k < row.len() {
                let (c, mut v) = row[k];
                k += 1;
                while k < row.len() && row[k].0 == c {
                    v += row[k].1;
                    k += 1;
                }
                b.push(c as usize, v);
            }
            b.end_row();
        }
        Ok(b.finish())
    }

    pub fn identity(n: usize) -> Self {
        Csr {
            nrows: n,
            ncols: n,
            indptr: (0..=n).collect(),
            indices: (0..n as u32).collect(),
            data: vec![1.0; n],
        }
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let r = self.indptr[i]..self.indptr[i + 1];
        (&self.indices[r.clone()], &self.data[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (c, v) = self.row(i);
        match c.binary_search(&(j as u32)) {
            Ok(k) => v[k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.indptr[i]..self.indptr[i + 1] {
                acc += self.data[k] * x[self.indices[k] as usize];
            }
            *yi = acc;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.matvec(x, &mut y);
        y
    }

    pub fn transpose(&self) -> Csr {
        let mut counts = vec![0usize; self.ncols + 1];
        for &j in &self.indices {
            counts[j as usize + 1] += 1;
        }
        for j in 0..self.ncols {
            counts[j + 1] += counts[j];
        }
        let mut next = counts.clone();
        let mut indices = vec![0u32; self.nnz()];
        let mut data = vec![0.0; self.nnz()];
        for i in 0..self.nrows {
            for k in self.indptr[i]..self.indptr[i + 1] {
                let j = self.indices[k] as usize;
                indices[next[j]] = i as u32;
                data[next[j]] = self.data[k];
                next[j] += 1;
            }
        }
        Csr { nrows: self.ncols, ncols: self.nrows, indptr: counts, indices, data }
    }

    /// Sparse product `self · other` (row-by-row accumulation).
    pub fn matmul(&self, other: &Csr) -> Result<Csr> {
        if self.ncols != other.nrows {
            return Err(Error::invalid("sparse product dimensions disagree"));
        }
        let mut acc = vec![0.0; other.ncols];
        let mut mark = vec![usize::MAX; other.ncols];
        let mut touched: Vec<usize> = Vec::new();
        let mut b = CsrBuilder::new(self.nrows, other.ncols, self.nnz());
        for i in 0..self.nrows {
            touched.clear();
            for k in self.indptr[i]..self.indptr[i + 1] {
                let a = self.data[k];
                let r = self.indices[k] as usize;
                for l in other.indptr[r]..other.indptr[r + 1] {
                    let j = other.indices[l] as usize;
                    if mark[j] != i {
                        mark[j] = i;
                        acc[j] = 0.0;
                        touched.push(j);
                    }
                    acc[j] += a * other.data[l];
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                b.push(j, acc[j]);
            }
            b.end_row();
        }
        Ok(b.finish())
    }

    /// Exact structural and numerical symmetry.
    pub fn is_symmetric(&self) -> bool {
        self.nrows == self.ncols && *self == self.transpose()
    }
}

/// Row-major incremental construction; columns must be pushed in ascending
/// order within a row.
pub struct CsrBuilder {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    data: Vec<f64>,
}

impl CsrBuilder {
    pub fn new(nrows: usize, ncols: usize, capacity: usize) -> Self {
        let mut indptr = Vec::with_capacity(nrows + 1);
        indptr.push(0);
        CsrBuilder { nrows, ncols, indptr, indices: Vec::with_capacity(capacity), data: Vec::with_capacity(capacity) }
    }

    pub fn push(&mut self, col: usize, value: f64) {
        debug_assert!(col < self.ncols);
        self.indices.push(col as u32);
        self.data.push(value);
    }

    pub fn end_row(&mut self) {
        self.indptr.push(self.indices.len());
    }

    pub fn finish(self) -> Csr {
        assert_eq!(self.indptr.len(), self.nrows + 1, "row count mismatch");
        Csr { nrows: self.nrows, ncols: self.ncols, indptr: self.indptr, indices: self.indices, data: self.data }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Csr {
        Csr::from_triplets(3, 3, &[(0, 0, 2.0), (0, 2, -1.0), (1, 1, 3.0), (2, 0, -1.0), (2, 2, 4.0), (2, 2, 1.0)])
            .unwrap()
    }

    #[test]
    fn duplicates_are_summed() {
        let a = sample();
        assert_eq!(a.get(2, 2), 5.0);
        assert_eq!(a.nnz(), 5);
        assert!(a.is_symmetric());
    }

    #[test]
    fn product_matches_dense() {
        let a = sample();
        let p = Csr::from_triplets(3, 2, &[(0, 0, 1.0), (1, 0, 0.5), (1, 1, 0.5), (2, 1, 1.0)]).unwrap();
        let rap = p.transpose().matmul(&a.matmul(&p).unwrap()).unwrap();
        assert_eq!(rap.nrows, 2);
        assert!((rap.get(0, 0) - 2.75).abs() < 1e-15);
        assert!((rap.get(0, 1) - (-1.0 + 0.75)).abs() < 1e-15);
        assert!((rap.get(1, 1) - 5.75).abs() < 1e-15);
        assert!(rap.is_symmetric());
    }

    #[test]
    fn matvec_and_identity() {
        let a = sample();
        assert_eq!(a.mul_vec(&[1.0, 1.0, 1.0]), vec![1.0, 3.0, 4.0]);
        let i = Csr::identity(3);
        assert_eq!(a.matmul(&i).unwrap(), a);
    }
}
