//! One-dimensional transverse operator `-d²/dt² + W(t)` and its ground state.
//!
//! The δ-interaction has a closed form. Bounded wells are discretized by
//! second-order differences on `[-L, L]` with Dirichlet ends; the lowest
//! eigenvalue is isolated by Sturm bisection and the vector by inverse
//! iteration below it.

use std::path::Path;

use crate::error::{Error, Result};
use crate::quadrature::compensated_sum;
use crate::spline::{solve_tridiagonal, CubicSpline};

/// Bounded potential supported in `[-a, a]`.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundedPotential {
    /// `-depth` on `|t| < a`, zero outside.
    SquareWell { depth: f64, a: f64 },
    /// Piecewise-linear samples, zero outside the sampled range.
    Sampled { t: Vec<f64>, w: Vec<f64> },
}

impl BoundedPotential {
    pub fn square_well(depth: f64, a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite() && depth.is_finite()) {
            return Err(Error::domain(format!("square well needs a > 0 and finite depth (a={a}, depth={depth})")));
        }
        Ok(BoundedPotential::SquareWell { depth, a })
    }

    pub fn sampled(t: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        if t.len() < 2 || t.len() != w.len() {
            return Err(Error::invalid("potential needs at least two (t, W) samples of equal length"));
        }
        if t.windows(2).any(|p| !(p[1] > p[0])) {
            return Err(Error::invalid("potential abscissae must be strictly increasing"));
        }
        if w.iter().chain(&t).any(|v| !v.is_finite()) {
            return Err(Error::invalid("potential contains non-finite values"));
        }
        Ok(BoundedPotential::Sampled { t, w })
    }

    pub fn from_csv(path: &Path) -> Result<Self> {
        let cols = crate::io::read_columns(path, &["t", "W"])?;
        let mut it = cols.into_iter();
        Self::sampled(it.next().unwrap(), it.next().unwrap())
    }

    /// Half-width of the support.
    pub fn support(&self) -> f64 {
        match self {
            BoundedPotential::SquareWell { a, .. } => *a,
            BoundedPotential::Sampled { t, .. } => t[0].abs().max(t[t.len() - 1].abs()),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            BoundedPotential::SquareWell { depth, a } => {
                if x.abs() < *a {
                    -depth
                } else {
                    0.0
                }
            }
            BoundedPotential::Sampled { t, w } => {
                if x < t[0] || x > t[t.len() - 1] {
                    return 0.0;
                }
                let i = t.partition_point(|&v| v <= x).clamp(1, t.len() - 1) - 1;
                let u = (x - t[i]) / (t[i + 1] - t[i]);
                w[i] + u * (w[i + 1] - w[i])
            }
        }
    }

    /// Mean of `W` over `[x - h/2, x + h/2]`; exact for the square well.
    pub fn cell_average(&self, x: f64, h: f64) -> f64 {
        match self {
            BoundedPotential::SquareWell { depth, a } => {
                let lo = (x - 0.5 * h).max(-a);
                let hi = (x + 0.5 * h).min(*a);
                -depth * (hi - lo).max(0.0) / h
            }
            BoundedPotential::Sampled { .. } => {
                const G: [(f64, f64); 3] = [(-0.774_596_669_241_483_4, 5.0 / 18.0), (0.0, 8.0 / 18.0), (0.774_596_669_241_483_4, 5.0 / 18.0)];
                G.iter().map(|&(g, wt)| wt * self.eval(x + 0.5 * h * g)).sum()
            }
        }
    }

    pub fn sup_norm(&self) -> f64 {
        match self {
            BoundedPotential::SquareWell { depth, .. } => depth.abs(),
            BoundedPotential::Sampled { w, .. } => w.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        }
    }

    pub fn integral(&self) -> f64 {
        match self {
            BoundedPotential::SquareWell { depth, a } => -2.0 * a * depth,
            BoundedPotential::Sampled { t, w } => {
                compensated_sum(t.windows(2).zip(w.windows(2)).map(|(tt, ww)| 0.5 * (tt[1] - tt[0]) * (ww[0] + ww[1])))
            }
        }
    }

    /// Points where `W` is not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            BoundedPotential::SquareWell { a, .. } => vec![-a, *a],
            BoundedPotential::Sampled { t, .. } => t.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TransverseProfile {
    /// `α δ(t)` with `α < 0` for a bound state.
    Delta { alpha: f64 },
    Bounded(BoundedPotential),
}

impl TransverseProfile {
    pub fn delta(alpha: f64) -> Self {
        TransverseProfile::Delta { alpha }
    }

    /// Half-width of the support (zero for the δ-interaction).
    pub fn support(&self) -> f64 {
        match self {
            TransverseProfile::Delta { .. } => 0.0,
            TransverseProfile::Bounded(w) => w.support(),
        }
    }

    /// Smooth part of the potential (zero for the δ-interaction).
    pub fn w(&self, t: f64) -> f64 {
        match self {
            TransverseProfile::Delta { .. } => 0.0,
            TransverseProfile::Bounded(w) => w.eval(t),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TransverseProfile::Delta { .. } => "delta",
            TransverseProfile::Bounded(BoundedPotential::SquareWell { .. }) => "square_well",
            TransverseProfile::Bounded(BoundedPotential::Sampled { .. }) => "sampled",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Attractivity {
    /// A sufficient condition for a transverse bound state holds.
    Sufficient,
    Unknown,
}

/// Cheap test: a δ-interaction with `α < 0`, or `∫ W < 0`.
pub fn attractivity_precheck(profile: &TransverseProfile) -> Attractivity {
    let ok = match profile {
        TransverseProfile::Delta { alpha } => *alpha < 0.0,
        TransverseProfile::Bounded(w) => w.integral() < 0.0,
    };
    if ok { Attractivity::Sufficient } else { Attractivity::Unknown }
}

#[derive(Debug, Clone)]
enum Shape {
    Delta { kappa: f64, norm: f64 },
    Grid { spline: CubicSpline, half: f64 },
}

/// Normalized, positive ground state of the transverse operator.
#[derive(Debug, Clone)]
pub struct TransverseGroundState {
    pub profile: TransverseProfile,
    pub e1: f64,
    pub n_plus: f64,
    pub n_minus: f64,
    /// Second moment `∫ t² ξ₁² dt`.
    pub c_moment: f64,
    /// Largest relative deviation of `ξ₁ e^{κ|t|}` from the fitted constant.
    pub tail_fit_residual: f64,
    /// Grid samples `(t, ξ₁)`; empty for the closed form.
    pub samples: Vec<(f64, f64)>,
    shape: Shape,
}

impl TransverseGroundState {
    pub fn kappa(&self) -> f64 {
        (-self.e1).sqrt()
    }

    /// `ξ₁(t)` and `ξ₁'(t)`. At `t = 0` the δ profile returns the mean of the
    /// one-sided slopes.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        match &self.shape {
            Shape::Delta { kappa, norm } => {
                let v = norm * (-kappa * t.abs()).exp();
                let d = if t > 0.0 {
                    -kappa * v
                } else if t < 0.0 {
                    kappa * v
                } else {
                    0.0
                };
                (v, d)
            }
            Shape::Grid { spline, half } => {
                let k = self.kappa();
                if t > *half {
                    let v = self.n_plus * (-k * t).exp();
                    (v, -k * v)
                } else if t < -half {
                    let v = self.n_minus * (k * t).exp();
                    (v, k * v)
                } else {
                    let (v, d, _) = spline.eval3(t);
                    (v, d)
                }
            }
        }
    }

    pub fn xi(&self, t: f64) -> f64 {
        self.eval(t).0
    }

    /// Panel edges on `[lo, hi]` between which `ξ₁` and `W` are smooth
    /// (polynomial on spline intervals), spaced at most `step` apart.
    pub fn panel_edges(&self, lo: f64, hi: f64, step: f64) -> Vec<f64> {
        let mut fixed: Vec<f64> = vec![lo, hi, 0.0];
        if let TransverseProfile::Bounded(w) = &self.profile {
            fixed.extend(w.kinks());
        }
        if let Shape::Grid { half, .. } = &self.shape {
            fixed.push(-half);
            fixed.push(*half);
            fixed.extend(self.samples.iter().map(|p| p.0).filter(|t| t.abs() <= *half));
        }
        let mut fixed: Vec<f64> = fixed.into_iter().filter(|&t| t >= lo && t <= hi).collect();
        fixed.sort_by(f64::total_cmp);
        fixed.dedup();
        let mut edges = Vec::with_capacity(fixed.len());
        for w in fixed.windows(2) {
            let k = ((w[1] - w[0]) / step).ceil().max(1.0) as usize;
            for i in 0..k {
                edges.push(w[0] + (w[1] - w[0]) * i as f64 / k as f64);
            }
        }
        edges.push(hi);
        edges
    }
}

/// Closed-form ground state of `-d²/dt² + α δ`.
pub fn delta_ground_state(alpha: f64) -> Result<TransverseGroundState> {
    if !(alpha < 0.0 && alpha.is_finite()) {
        return Err(Error::domain(format!("δ-interaction needs α < 0 for a bound state, got {alpha}")));
    }
    let kappa = -0.5 * alpha;
    let norm = kappa.sqrt();
    Ok(TransverseGroundState {
        profile: TransverseProfile::Delta { alpha },
        e1: -kappa * kappa,
        n_plus: norm,
        n_minus: norm,
        c_moment: 1.0 / (2.0 * kappa * kappa),
        tail_fit_residual: 0.0,
        samples: Vec::new(),
        shape: Shape::Delta { kappa, norm },
    })
}

/// Number of eigenvalues of the symmetric tridiagonal matrix below `x`.
fn sturm_count(d: &[f64], e2: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = d[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..d.len() {
        let prev = if q == 0.0 { f64::MIN_POSITIVE } else { q };
        q = d[i] - x - e2[i - 1] / prev;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Lowest eigenpair of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e`. The vector has unit Euclidean norm and positive sum.
pub fn tridiagonal_lowest(d: &[f64], e: &[f64]) -> Result<(f64, Vec<f64>)> {
    let n = d.len();
    if n == 0 || e.len() + 1 != n {
        return Err(Error::invalid("tridiagonal dimensions are inconsistent"));
    }
    let e2: Vec<f64> = e.iter().map(|v| v * v).collect();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let rad = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i + 1 < n { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - rad);
        hi = hi.max(d[i] + rad);
    }
    let scale = lo.abs().max(hi.abs()).max(1.0);
    while hi - lo > 4.0 * f64::EPSILON * scale {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(d, &e2, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // Inverse iteration just below the eigenvalue: the shifted matrix is
    // positive definite, so the unpivoted solve is stable.
    let shift = lo - 64.0 * f64::EPSILON * scale;
    let sub: Vec<f64> = std::iter::once(0.0).chain(e.iter().copied()).collect();
    let mut sup: Vec<f64> = e.to_vec();
    sup.push(0.0);
    let dia: Vec<f64> = d.iter().map(|v| v - shift).collect();
    let mut v = vec![1.0; n];
    for _ in 0..4 {
        let y = solve_tridiagonal(&sub, &dia, &sup, &v)?;
        let nrm = y.iter().map(|x| x * x).sum::<f64>().sqrt();
        v = y.into_iter().map(|x| x / nrm).collect();
    }
    if v.iter().sum::<f64>() < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    // Rayleigh quotient of the converged vector.
    let mut num = Vec::with_capacity(n);
    for i in 0..n {
        let mut tv = d[i] * v[i];
        if i > 0 {
            tv += e[i - 1] * v[i - 1];
        }
        if i + 1 < n {
            tv += e[i] * v[i + 1];
        }
        num.push(v[i] * tv);
    }
    Ok((compensated_sum(num), v))
}

/// Discrete ground state on the uniform interior nodes `t_j = -L + j h`,
/// `j = 1..N-1`, with Dirichlet ends. The δ-interaction is lumped as `α/h` on
/// the node at `t = 0`, which must be a grid node.
///
/// Returns the eigenvalue and the nodal values normalized by `h Σ ξ² = 1`.
pub fn discrete_ground_state(profile: &TransverseProfile, half_width: f64, h: f64) -> Result<(f64, Vec<f64>)> {
    let n_int = (2.0 * half_width / h).round() as usize;
    if n_int < 3 || ((n_int as f64) * h - 2.0 * half_width).abs() > 1e-9 * half_width {
        return Err(Error::invalid(format!("box [-{half_width}, {half_width}] is not a multiple of h = {h}")));
    }
    let m = n_int - 1;
    let inv_h2 = 1.0 / (h * h);
    let mut d = vec![2.0 * inv_h2; m];
    let e = vec![-inv_h2; m - 1];
    match profile {
        TransverseProfile::Delta { alpha } => {
            if !n_int.is_multiple_of(2) {
                return Err(Error::invalid("t = 0 must be a grid node for the δ-interaction"));
            }
            d[n_int / 2 - 1] += alpha / h;
        }
        TransverseProfile::Bounded(w) => {
            for (j, dj) in d.iter_mut().enumerate() {
                let t = -half_width + (j + 1) as f64 * h;
                *dj += w.cell_average(t, h);
            }
        }
    }
    let (ev, mut v) = tridiagonal_lowest(&d, &e)?;
    let s = (1.0 / h).sqrt();
    v.iter_mut().for_each(|x| *x *= s);
    Ok((ev, v))
}

/// Relative shift of `E₁` tolerated when the box is doubled.
pub const BOX_TOL: f64 = 1e-8;
/// Relative misfit of the exponential tails beyond which the fit is rejected.
pub const TAIL_FIT_REJECT: f64 = 1e-2;

/// Finite-difference ground state of a bounded well in the box `[-L, L]`.
///
/// Requires `L > 3a` and `h ≤ a/20`. The box is accepted when doubling it
/// moves `E₁` by less than [`BOX_TOL`] relative.
pub fn solve_ground_state(w: &BoundedPotential, half_width: f64, h: f64) -> Result<TransverseGroundState> {
    let a = w.support();
    if !(h > 0.0 && h <= a / 20.0 * (1.0 + 1e-12)) {
        return Err(Error::invalid(format!("grid step h = {h} must satisfy 0 < h ≤ a/20 = {}", a / 20.0)));
    }
    if !(half_width > 3.0 * a) {
        return Err(Error::invalid(format!("box half-width L = {half_width} must exceed 3a = {}", 3.0 * a)));
    }
    let profile = TransverseProfile::Bounded(w.clone());
    let (e1, xi) = discrete_ground_state(&profile, half_width, h)?;
    if e1 >= 0.0 {
        return Err(Error::NoBoundState);
    }
    let (e1_big, _) = discrete_ground_state(&profile, 2.0 * half_width, h)?;
    if (e1 - e1_big).abs() > BOX_TOL * e1.abs() {
        return Err(Error::BoxTooSmall(format!(
            "E₁ moves from {e1} to {e1_big} when L doubles from {half_width}"
        )));
    }

    let kappa = (-e1).sqrt();
    let mut t = Vec::with_capacity(xi.len() + 2);
    let mut v = Vec::with_capacity(xi.len() + 2);
    t.push(-half_width);
    v.push(0.0);
    for (j, &x) in xi.iter().enumerate() {
        t.push(-half_width + (j + 1) as f64 * h);
        v.push(x);
    }
    t.push(half_width);
    v.push(0.0);

    let moment = compensated_sum(t.iter().zip(&v).map(|(tt, x)| h * tt * tt * x * x));

    let window = |sign: f64| -> Result<(f64, f64)> {
        let vals: Vec<f64> = t
            .iter()
            .zip(&v)
            .filter(|(tt, _)| sign * **tt > a && sign * **tt <= 0.5 * half_width)
            .map(|(tt, x)| x * (kappa * tt.abs()).exp())
            .collect();
        if vals.len() < 2 {
            return Err(Error::Fit("tail window (a, L/2] holds fewer than two nodes".into()));
        }
        let n = vals.iter().sum::<f64>() / vals.len() as f64;
        let res = vals.iter().fold(0.0f64, |m, x| m.max((x - n).abs() / n));
        Ok((n, res))
    };
    let (n_plus, r_plus) = window(1.0)?;
    let (n_minus, r_minus) = window(-1.0)?;
    let residual = r_plus.max(r_minus);
    if residual > TAIL_FIT_REJECT {
        return Err(Error::Fit(format!("exponential tail misfit {residual:.3e}")));
    }

    let half = 0.5 * half_width;
    let lo = t.partition_point(|&x| x < -half - 2.0 * h);
    let hi = t.partition_point(|&x| x <= half + 2.0 * h);
    let spline = CubicSpline::not_a_knot(&t[lo..hi], &v[lo..hi])?;
    Ok(TransverseGroundState {
        profile,
        e1,
        n_plus,
        n_minus,
        c_moment: moment,
        tail_fit_residual: residual,
        samples: t.into_iter().zip(v).collect(),
        shape: Shape::Grid { spline, half },
    })
}

/// Ground state for either kind of profile. Grid parameters are ignored for
/// the δ-interaction.
pub fn ground_state(profile: &TransverseProfile, half_width: f64, h: f64) -> Result<TransverseGroundState> {
    match profile {
        TransverseProfile::Delta { alpha } => delta_ground_state(*alpha),
        TransverseProfile::Bounded(w) => solve_ground_state(w, half_width, h),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_closed_form() {
        let g = delta_ground_state(-3.0).unwrap();
        assert_eq!(g.e1, -2.25);
        assert!((g.c_moment - 2.0 / 9.0).abs() < 1e-15);
        assert!((g.xi(0.4) - 1.5f64.sqrt() * (-0.6f64).exp()).abs() < 1e-15);
        assert!(matches!(delta_ground_state(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn tridiagonal_lowest_matches_dense() {
        let n = 12;
        let d: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64).sin()).collect();
        let e: Vec<f64> = (0..n - 1).map(|i| -0.3 - 0.01 * i as f64).collect();
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                d[i]
            } else if i + 1 == j {
                e[i]
            } else if j + 1 == i {
                e[j]
            } else {
                0.0
            }
        });
        let ev = m.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
        let (lam, v) = tridiagonal_lowest(&d, &e).unwrap();
        assert!((lam - ev).abs() < 1e-13);
        assert!(v.iter().all(|x| *x > 0.0));
    }

    #[test]
    fn zero_potential_has_no_bound_state() {
        let w = BoundedPotential::square_well(0.0, 1.0).unwrap();
        assert!(matches!(solve_ground_state(&w, 10.0, 0.01), Err(Error::NoBoundState)));
    }

    #[test]
    fn shallow_well_in_small_box_is_rejected() {
        let w = BoundedPotential::square_well(0.3, 1.0).unwrap();
        let r = solve_ground_state(&w, 8.0, 0.01);
        assert!(matches!(r, Err(Error::BoxTooSmall(_))), "{r:?}");
    }

    #[test]
    fn preconditions() {
        let w = BoundedPotential::square_well(1.0, 1.0).unwrap();
        assert!(matches!(solve_ground_state(&w, 2.5, 0.01), Err(Error::Invalid(_))));
        assert!(matches!(solve_ground_state(&w, 10.0, 0.1), Err(Error::Invalid(_))));
    }

    #[test]
    fn precheck() {
        assert_eq!(attractivity_precheck(&TransverseProfile::delta(-1.0)), Attractivity::Sufficient);
        assert_eq!(attractivity_precheck(&TransverseProfile::delta(1.0)), Attractivity::Unknown);
        let w = BoundedPotential::sampled(vec![-1.0, 0.0, 1.0], vec![1.0, -3.0, 1.0]).unwrap();
        assert_eq!(w.integral(), -2.0);
        assert_eq!(attractivity_precheck(&TransverseProfile::Bounded(w)), Attractivity::Sufficient);
    }

    #[test]
    fn square_well_cell_average_straddles_edge() {
        let w = BoundedPotential::square_well(2.0, 1.0).unwrap();
        assert!((w.cell_average(1.0, 0.1) + 1.0).abs() < 1e-14);
        assert!((w.cell_average(0.5, 0.1) + 2.0).abs() < 1e-14);
        assert_eq!(w.cell_average(1.5, 0.1), 0.0);
    }
}
