//! Finite-difference pencil `(A, B)` of the layer form for one angular mode.

use crate::error::{Error, Result};
use crate::transverse::TransverseProfile;

use super::grid::{ClipEdge, LayerGrid, Station};
use super::sparse::{Csr, CsrBuilder};

/// Stiffness plus potential `A`, lumped mass `B` and the grid they live on.
#[derive(Debug, Clone)]
pub struct SymmetricPencil {
    pub a: Csr,
    pub b: Vec<f64>,
    pub m: u32,
    pub grid: LayerGrid,
    /// Diagonal of `A` without the `s`-coupling, i.e. the part of each column
    /// block that stands alone.
    pub column_diag: Vec<f64>,
}

impl SymmetricPencil {
    pub fn dofs(&self) -> usize {
        self.b.len()
    }

    /// `‖Av − λBv‖ / ‖Bv‖`.
    pub fn residual(&self, lambda: f64, v: &[f64]) -> f64 {
        let av = self.a.mul_vec(v);
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 0..v.len() {
            let bv = self.b[k] * v[k];
            num += (av[k] - lambda * bv).powi(2);
            den += bv * bv;
        }
        (num / den).sqrt()
    }
}

/// `r(1 − k₂t)/(1 − k₁t)`.
fn w_ss(st: &Station, t: f64) -> f64 {
    st.r * (1.0 - st.k2 * t) / (1.0 - st.k1 * t)
}

/// `r(1 − k₁t)(1 − k₂t)`.
fn w_tt(st: &Station, t: f64) -> f64 {
    st.r * st.jacobian(t)
}

/// `(1 − k₁t)/(r(1 − k₂t))`, multiplied by `m²` in the form.
fn w_mm(st: &Station, t: f64) -> f64 {
    (1.0 - st.k1 * t) / (st.r * (1.0 - st.k2 * t))
}

fn finite(w: f64, what: &str, s: f64, t: f64) -> Result<f64> {
    if w.is_finite() && w >= 0.0 {
        Ok(w)
    } else {
        Err(Error::invalid(format!("singular {what} weight {w} at s = {s}, t = {t}")))
    }
}

/// Discretizes the form of mode `m` on `grid`:
/// `∫∫ (w_ss |∂_s u|² + w_tt |∂_t u|² + m² w_mm |u|² + W w_tt |u|²) ds dt`,
/// plus `α ∫ r |u(s, 0)|² ds` for the δ-interaction, against the mass `w_tt`.
pub fn assemble_pencil(grid: &LayerGrid, m: u32, profile: &TransverseProfile) -> Result<SymmetricPencil> {
    let n = grid.dofs();
    let ns = grid.n_s();
    let nt = grid.n_t();
    let ht = grid.h_t;
    let m2 = (m as f64) * (m as f64);
    let j_min = grid.options.j_min;
    let clip_dirichlet = m > 0 || grid.options.clip_edge == ClipEdge::Dirichlet;
    let zero_row = grid.zero_row();
    if matches!(profile, TransverseProfile::Delta { .. }) && zero_row.is_none() {
        return Err(Error::invalid("t = 0 must be a grid node for the δ-interaction"));
    }

    let mut diag = vec![0.0; n];
    let mut column_diag = vec![0.0; n];
    let mut mass = vec![0.0; n];
    let mut t_up = vec![0.0; n];
    let mut s_right = vec![0.0; n];

    for i in 0..ns {
        let st = &grid.nodes[i];
        let ds = grid.ds(i);
        let top = grid.top[i];
        for j in 0..top {
            let t = grid.t[j];
            let k = grid.index(i, j);
            let b = finite(w_tt(st, t), "mass", st.s, t)? * ds * ht;
            mass[k] = b;
            let mut d = m2 * finite(w_mm(st, t), "azimuthal", st.s, t)? * ds * ht;
            match profile {
                TransverseProfile::Delta { alpha } => {
                    if Some(j) == zero_row {
                        d += alpha * st.r * ds;
                    }
                }
                TransverseProfile::Bounded(w) => d += w.cell_average(t, ht) * b,
            }
            if j == 0 {
                let tm = 0.5 * (-grid.t_half + t);
                d += finite(w_tt(st, tm), "t-edge", st.s, tm)? * ds / ht;
            }
            if j + 1 < top {
                let tm = 0.5 * (t + grid.t[j + 1]);
                let w = finite(w_tt(st, tm), "t-edge", st.s, tm)? * ds / ht;
                t_up[k] = w;
                d += w;
                // The neighbour above receives its share on its own pass.
            } else if top == nt {
                let tm = 0.5 * (t + grid.t_half);
                d += finite(w_tt(st, tm), "t-edge", st.s, tm)? * ds / ht;
            } else if clip_dirichlet {
                let tm = 0.5 * (t + grid.t[j + 1]);
                d += (st.r * st.jacobian(tm).max(0.0)) * ds / ht;
            }
            if j > 0 {
                d += t_up[k - 1];
            }
            column_diag[k] = d;
            diag[k] = d;
        }
    }

    // s-edges, including the two boundary edges of every row.
    for e in 0..=ns {
        let mid = &grid.mids[e];
        let h = grid.hs_mid(e);
        let left = e.checked_sub(1);
        let right = (e < ns).then_some(e);
        let top_l = left.map_or(0, |i| grid.top[i]);
        let top_r = right.map_or(0, |i| grid.top[i]);
        for j in 0..top_l.max(top_r) {
            let t = grid.t[j];
            let on_l = j < top_l;
            let on_r = j < top_r;
            let weight = |st: &Station| -> Result<f64> {
                let at = if mid.jacobian(t) >= j_min { mid } else { st };
                Ok(finite(w_ss(at, t), "s-edge", at.s, t)? * ht / h)
            };
            match (left, right) {
                (Some(l), Some(r)) if on_l && on_r => {
                    let w = weight(mid)?;
                    s_right[grid.index(l, j)] = w;
                    diag[grid.index(l, j)] += w;
                    diag[grid.index(r, j)] += w;
                }
                (Some(l), Some(_)) if on_l => {
                    if clip_dirichlet {
                        diag[grid.index(l, j)] += weight(&grid.nodes[l])?;
                    }
                }
                (Some(_), Some(r)) if on_r => {
                    if clip_dirichlet {
                        diag[grid.index(r, j)] += weight(&grid.nodes[r])?;
                    }
                }
                (None, Some(r)) => {
                    if !grid.axis() || m > 0 {
                        diag[grid.index(r, j)] += weight(&grid.nodes[r])?;
                    }
                }
                (Some(l), None) => diag[grid.index(l, j)] += weight(&grid.nodes[l])?,
                _ => {}
            }
        }
    }

    let mut builder = CsrBuilder::new(n, n, 5 * n);
    for i in 0..ns {
        for j in 0..grid.top[i] {
            let k = grid.index(i, j);
            if i > 0 && j < grid.top[i - 1] {
                let kl = grid.index(i - 1, j);
                builder.push(kl, -s_right[kl]);
            }
            if j > 0 {
                builder.push(k - 1, -t_up[k - 1]);
            }
            builder.push(k, diag[k]);
            if j + 1 < grid.top[i] {
                builder.push(k + 1, -t_up[k]);
            }
            if i + 1 < ns && j < grid.top[i + 1] {
                builder.push(grid.index(i + 1, j), -s_right[k]);
            }
            builder.end_row();
        }
    }
    Ok(SymmetricPencil { a: builder.finish(), b: mass, m, grid: grid.clone(), column_diag })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::ProfileCurve;
    use crate::spectral::grid::{build_grid, GridOptions};
    use crate::transverse::BoundedPotential;

    fn cone_grid() -> LayerGrid {
        let c = ProfileCurve::cap_cone(1.0, std::f64::consts::FRAC_PI_2).unwrap();
        build_grid(&c, 0.0, 3.0, 2.0, 0.1, 0.1, GridOptions::default()).unwrap()
    }

    #[test]
    fn symmetric_with_positive_mass() {
        let p = assemble_pencil(&cone_grid(), 0, &TransverseProfile::delta(-2.0)).unwrap();
        assert!(p.a.is_symmetric());
        assert!(p.b.iter().all(|&b| b > 0.0));
    }

    #[test]
    fn free_operator_is_positive_semidefinite() {
        let w = BoundedPotential::square_well(0.0, 0.5).unwrap();
        let p = assemble_pencil(&cone_grid(), 0, &TransverseProfile::Bounded(w)).unwrap();
        // Weak diagonal dominance with nonpositive off-diagonals.
        for i in 0..p.dofs() {
            let (c, v) = p.a.row(i);
            let off: f64 = c.iter().zip(v).filter(|(&j, _)| j as usize != i).map(|(_, x)| x.abs()).sum();
            assert!(p.a.get(i, i) >= off * (1.0 - 1e-14));
            assert!(c.iter().zip(v).all(|(&j, &x)| j as usize == i || x <= 0.0));
        }
    }

    #[test]
    fn azimuthal_term_is_a_nonnegative_diagonal() {
        let g = cone_grid();
        let p0 = assemble_pencil(&g, 0, &TransverseProfile::delta(-2.0)).unwrap();
        let p1 = assemble_pencil(&g, 1, &TransverseProfile::delta(-2.0)).unwrap();
        for i in 0..p0.dofs() {
            let (c0, v0) = p0.a.row(i);
            let (c1, v1) = p1.a.row(i);
            assert_eq!(c0, c1);
            for k in 0..c0.len() {
                if c0[k] as usize == i {
                    assert!(v1[k] >= v0[k]);
                } else {
                    assert_eq!(v1[k], v0[k]);
                }
            }
        }
    }
}
