//! Truncated tubular-coordinate grid over the layer.

use crate::error::{Error, Result};
use crate::geometry::{c_plus_at, curvatures_at, jacobian};
use crate::profiles::ProfileCurve;

/// Default cut margin below the focal distance.
pub const ETA: f64 = 0.98;
/// Smallest Jacobian admitted on an active node.
pub const J_MIN: f64 = 1e-6;

/// Condition on the clipped edge `t = η c₊(s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClipEdge {
    /// Same as the axis: free for `m = 0`, Dirichlet for `m ≥ 1`.
    #[default]
    AxisLike,
    Dirichlet,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptions {
    pub eta: f64,
    pub j_min: f64,
    pub clip_edge: ClipEdge,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions { eta: ETA, j_min: J_MIN, clip_edge: ClipEdge::AxisLike }
    }
}

/// Meridian data at one arclength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Station {
    pub s: f64,
    pub r: f64,
    pub k1: f64,
    pub k2: f64,
}

impl Station {
    fn at(curve: &ProfileCurve, s: f64) -> Result<(Self, f64)> {
        let p = curve.eval(s)?;
        let k = curvatures_at(&p);
        Ok((Station { s, r: p.r, k1: k.k1, k2: k.k2 }, c_plus_at(&p)))
    }

    pub fn jacobian(&self, t: f64) -> f64 {
        jacobian(self.k1, self.k2, t)
    }
}

/// Tensor grid in `(s, t)` with each column clipped from above.
///
/// Unknowns sit at `s` nodes strictly between `s_lo` and `s_hi` and at
/// `t_j = -T + (j + 1) h_t`. Column `i` holds the nodes `j < top[i]` and is
/// stored contiguously from `offsets[i]`. `s_lo = 0` is the axis of
/// revolution; a positive `s_lo`, `s = s_hi` and `t = ±T` are Dirichlet.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrid {
    pub s_lo: f64,
    pub s_hi: f64,
    pub nodes: Vec<Station>,
    /// `mids[i]` lies between node `i - 1` and node `i`; the ends pair with the
    /// boundaries.
    pub mids: Vec<Station>,
    pub t_half: f64,
    pub h_t: f64,
    pub t: Vec<f64>,
    pub top: Vec<usize>,
    pub offsets: Vec<usize>,
    pub options: GridOptions,
}

impl LayerGrid {
    /// Uniform grid `s_i = i h_s`, `i = 1 .. S/h_s − 1`, starting at the axis.
    pub fn uniform(curve: &ProfileCurve, s_end: f64, t_half: f64, h_s: f64, h_t: f64, options: GridOptions) -> Result<Self> {
        if !(h_s > 0.0 && s_end > 0.0) {
            return Err(Error::invalid("S and h_s must be positive"));
        }
        let n = (s_end / h_s).round() as usize;
        if n < 2 || ((n as f64) * h_s - s_end).abs() > 1e-9 * s_end {
            return Err(Error::invalid(format!("S = {s_end} is not a multiple of h_s = {h_s}")));
        }
        let s: Vec<f64> = (1..n).map(|i| i as f64 * h_s).collect();
        Self::with_s_nodes(curve, 0.0, s_end, &s, t_half, h_t, options)
    }

    /// Grid on arbitrary interior `s` nodes.
    pub fn with_s_nodes(
        curve: &ProfileCurve,
        s_lo: f64,
        s_hi: f64,
        s: &[f64],
        t_half: f64,
        h_t: f64,
        options: GridOptions,
    ) -> Result<Self> {
        if !(options.eta > 0.0 && options.eta < 1.0) {
            return Err(Error::invalid(format!("eta must lie in (0, 1), got {}", options.eta)));
        }
        if !(options.j_min > 0.0) {
            return Err(Error::invalid("j_min must be positive"));
        }
        if s.is_empty() || !(s_lo >= 0.0) {
            return Err(Error::invalid("at least one interior s node is required and s_lo ≥ 0"));
        }
        let mut prev = s_lo;
        for &x in s.iter().chain(std::iter::once(&s_hi)) {
            if !(x > prev) {
                return Err(Error::invalid("s nodes must increase strictly inside (s_lo, s_hi)"));
            }
            prev = x;
        }
        if s_hi > curve.s_max() {
            return Err(Error::domain(format!("S = {s_hi} exceeds curve extent {}", curve.s_max())));
        }
        if !(h_t > 0.0 && t_half > 0.0) {
            return Err(Error::invalid("T and h_t must be positive"));
        }
        let n_t = (2.0 * t_half / h_t).round() as usize;
        if n_t < 4 || ((n_t as f64) * h_t - 2.0 * t_half).abs() > 1e-9 * t_half {
            return Err(Error::invalid(format!("2T = {} is not a multiple of h_t = {h_t}", 2.0 * t_half)));
        }
        let t: Vec<f64> = (1..n_t).map(|j| -t_half + j as f64 * h_t).collect();

        let mut nodes = Vec::with_capacity(s.len());
        let mut top = Vec::with_capacity(s.len());
        for &si in s {
            let (st, cp) = Station::at(curve, si)?;
            let limit = options.eta * cp;
            let mut k = 0;
            while k < t.len() && t[k] < limit && st.jacobian(t[k]) >= options.j_min {
                k += 1;
            }
            if k < t.len() && t[k] <= 0.0 {
                return Err(Error::domain(format!("column at s = {si} is clipped below t = 0")));
            }
            if st.jacobian(t[0]) < options.j_min {
                return Err(Error::domain(format!("Jacobian vanishes at s = {si}, t = {}", t[0])));
            }
            nodes.push(st);
            top.push(k);
        }
        let mut mids = Vec::with_capacity(s.len() + 1);
        let mut left = s_lo;
        for &x in s.iter().chain(std::iter::once(&s_hi)) {
            mids.push(Station::at(curve, 0.5 * (left + x))?.0);
            left = x;
        }
        let mut offsets = Vec::with_capacity(s.len() + 1);
        offsets.push(0);
        for &k in &top {
            offsets.push(offsets.last().unwrap() + k);
        }
        Ok(LayerGrid { s_lo, s_hi, nodes, mids, t_half, h_t, t, top, offsets, options })
    }

    pub fn n_s(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_t(&self) -> usize {
        self.t.len()
    }

    pub fn dofs(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        self.offsets[i] + j
    }

    pub fn axis(&self) -> bool {
        self.s_lo == 0.0
    }

    pub fn s(&self, i: usize) -> f64 {
        self.nodes[i].s
    }

    fn s_or_boundary(&self, i: isize) -> f64 {
        if i < 0 {
            self.s_lo
        } else if i as usize >= self.nodes.len() {
            self.s_hi
        } else {
            self.nodes[i as usize].s
        }
    }

    /// Dual cell width of node `i`.
    pub fn ds(&self, i: usize) -> f64 {
        0.5 * (self.s_or_boundary(i as isize + 1) - self.s_or_boundary(i as isize - 1))
    }

    /// Spacing across mid station `i`.
    pub fn hs_mid(&self, i: usize) -> f64 {
        self.s_or_boundary(i as isize) - self.s_or_boundary(i as isize - 1)
    }

    pub fn clipped_columns(&self) -> usize {
        self.top.iter().filter(|&&k| k < self.t.len()).count()
    }

    /// Index of the `t = 0` row, if it is a node.
    pub fn zero_row(&self) -> Option<usize> {
        let n = self.t.len() + 1;
        n.is_multiple_of(2).then_some(n / 2 - 1)
    }

    /// Checks the node count across the support `[-a, a]` of the potential.
    pub fn check_resolution(&self, a: f64) -> Result<()> {
        if a > 0.0 {
            let across = self.t.iter().filter(|&&t| t.abs() <= a).count();
            if across < 10 {
                return Err(Error::GridTooCoarse(format!("{across} nodes across [-{a}, {a}], need at least 10")));
            }
        }
        Ok(())
    }
}

/// Grid with uniform steps; `a` is the support half-width of the potential.
pub fn build_grid(
    curve: &ProfileCurve,
    a: f64,
    s_end: f64,
    t_half: f64,
    h_s: f64,
    h_t: f64,
    options: GridOptions,
) -> Result<LayerGrid> {
    let g = LayerGrid::uniform(curve, s_end, t_half, h_s, h_t, options)?;
    g.check_resolution(a)?;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_is_rectangular() {
        let g = build_grid(&ProfileCurve::plane(), 0.0, 10.0, 5.0, 0.5, 0.5, GridOptions::default()).unwrap();
        assert_eq!(g.n_s(), 19);
        assert_eq!(g.n_t(), 19);
        assert_eq!(g.clipped_columns(), 0);
        assert_eq!(g.dofs(), 19 * 19);
        assert_eq!(g.zero_row(), Some(9));
        assert!(g.t[9].abs() < 1e-15);
    }

    #[test]
    fn cap_cone_columns_are_clipped() {
        let c = ProfileCurve::cap_cone(1.0, std::f64::consts::FRAC_PI_2).unwrap();
        let g = build_grid(&c, 0.0, 4.0, 2.0, 0.1, 0.1, GridOptions::default()).unwrap();
        assert!(g.clipped_columns() > 0);
        for (i, st) in g.nodes.iter().enumerate() {
            let k = g.top[i];
            let cp = crate::geometry::c_plus(&c, st.s).unwrap();
            assert!(g.t[k - 1] < 0.98 * cp);
            assert!(st.jacobian(g.t[k - 1]) >= J_MIN);
        }
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let r = build_grid(&ProfileCurve::plane(), 0.2, 4.0, 2.0, 0.1, 0.1, GridOptions::default());
        assert!(matches!(r, Err(Error::GridTooCoarse(_))));
    }

    #[test]
    fn dual_widths_tile_the_interval() {
        let g = build_grid(&ProfileCurve::plane(), 0.0, 3.0, 1.0, 0.25, 0.25, GridOptions::default()).unwrap();
        let total: f64 = (0..g.n_s()).map(|i| g.ds(i)).sum();
        assert!((total - 2.75).abs() < 1e-12);
    }
}
