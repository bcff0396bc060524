//! Curvature of the surface of revolution generated by a meridian, and the
//! global constants the bound-state argument needs.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::profiles::{CurvePoint, ProfileCurve, Side};
use crate::quadrature::{integrate, QuadOptions};

/// Principal, Gauss and mean curvature at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Curvatures {
    pub k1: f64,
    pub k2: f64,
    pub gauss: f64,
    pub mean: f64,
}

pub fn curvatures_at(p: &CurvePoint) -> Curvatures {
    let k1 = p.dr * p.ddz - p.ddr * p.dz;
    // On the axis z'/r is 0/0; its limit is z''/r'.
    let k2 = if p.r > 0.0 { p.dz / p.r } else { p.ddz / p.dr };
    Curvatures { k1, k2, gauss: k1 * k2, mean: 0.5 * (k1 + k2) }
}

pub fn curvatures(curve: &ProfileCurve, s: f64) -> Result<Curvatures> {
    Ok(curvatures_at(&curve.eval(s)?))
}

/// Focal distance along the normal on the side the parallels curve towards.
pub fn c_plus_at(p: &CurvePoint) -> f64 {
    let k2 = curvatures_at(p).k2;
    if k2 > 0.0 {
        if p.r > 0.0 { p.r / p.dz } else { 1.0 / k2 }
    } else {
        f64::INFINITY
    }
}

pub fn c_plus(curve: &ProfileCurve, s: f64) -> Result<f64> {
    Ok(c_plus_at(&curve.eval(s)?))
}

/// The opposite side never reaches a focal point for the curves considered.
pub fn c_minus(_curve: &ProfileCurve, _s: f64) -> f64 {
    f64::INFINITY
}

/// `r'' + K r`; vanishes identically for a consistent meridian.
pub fn jacobi_residual(curve: &ProfileCurve, s: f64) -> Result<f64> {
    let p = curve.eval(s)?;
    Ok(p.ddr + curvatures_at(&p).gauss * p.r)
}

/// Volume factor of tubular coordinates.
pub fn jacobian(k1: f64, k2: f64, t: f64) -> f64 {
    (1.0 - k1 * t) * (1.0 - k2 * t)
}

fn check_extent(curve: &ProfileCurve, s_end: f64) -> Result<()> {
    if !(s_end > 0.0 && s_end.is_finite()) {
        return Err(Error::domain(format!("arclength bound must be positive and finite, got {s_end}")));
    }
    if s_end > curve.s_max() {
        return Err(Error::domain(format!("arclength bound {s_end} exceeds curve extent {}", curve.s_max())));
    }
    Ok(())
}

fn breakpoints(curve: &ProfileCurve, s_end: f64) -> Vec<f64> {
    curve.junctions().into_iter().filter(|&j| j > 0.0 && j < s_end).collect()
}

/// Two independent estimates of the total curvature `∫ K dΣ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TotalCurvature {
    pub quadrature: f64,
    pub quadrature_error: f64,
    pub boundary: f64,
}

/// Quadrature of `2π ∫ K r ds` against the boundary form `2π (1 - r'(S))`.
pub fn total_gauss_curvature(curve: &ProfileCurve, s_end: f64) -> Result<TotalCurvature> {
    check_extent(curve, s_end)?;
    // K r = k1 z', which avoids the 0/0 of k2 on the axis.
    let f = |s: f64| {
        let p = curve.point(s, Side::Right);
        2.0 * PI * curvatures_at(&p).k1 * p.dz
    };
    let (q, err) = integrate(f, 0.0, s_end, &breakpoints(curve, s_end), QuadOptions::abs(1e-10))?;
    let p = curve.point(s_end, Side::Left);
    Ok(TotalCurvature { quadrature: q, quadrature_error: err, boundary: 2.0 * PI * (1.0 - p.dr) })
}

/// Radial growth constant `C_Σ = 1 + ∫ |K| r ds` with a grid check of `r ≤ C_Σ s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthConstant {
    pub c_sigma: f64,
    pub max_r_over_s: f64,
    pub holds_on_grid: bool,
}

pub fn c_sigma(curve: &ProfileCurve, s_end: f64) -> Result<GrowthConstant> {
    check_extent(curve, s_end)?;
    let f = |s: f64| {
        let p = curve.point(s, Side::Right);
        (curvatures_at(&p).k1 * p.dz).abs()
    };
    let (q, _) = integrate(f, 0.0, s_end, &breakpoints(curve, s_end), QuadOptions::abs(1e-10))?;
    let c = 1.0 + q;
    let mut max_ratio: f64 = 0.0;
    let n = 4000;
    for i in 1..=n {
        let s = s_end * i as f64 / n as f64;
        max_ratio = max_ratio.max(curve.point(s, Side::Right).r / s);
    }
    Ok(GrowthConstant { c_sigma: c, max_r_over_s: max_ratio, holds_on_grid: max_ratio <= c * (1.0 + 1e-12) })
}

/// Lower bound `δ ≤ |z'|` valid past `s0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeBound {
    pub delta: f64,
    pub s0: f64,
}

const SCAN_POINTS: usize = 4001;

/// Takes `δ = min |z'|` over `[s_lo, s_hi]`, then moves `s0` left along a grid
/// as far as `|z'| ≥ δ` keeps holding. Fails unless the total curvature up to
/// `s_hi` is positive.
pub fn slope_bound_params(curve: &ProfileCurve, s_lo: f64, s_hi: f64) -> Result<SlopeBound> {
    check_extent(curve, s_hi)?;
    if !(s_lo >= 0.0 && s_lo < s_hi) {
        return Err(Error::domain(format!("slope window [{s_lo}, {s_hi}] is empty")));
    }
    let total = total_gauss_curvature(curve, s_hi)?;
    if total.quadrature <= 1e-10 {
        return Err(Error::Hypothesis {
            label: "𝒦 > 0 required",
            detail: format!("total curvature not positive ({:.3e})", total.quadrature),
        });
    }
    let dz = |s: f64| curve.point(s, Side::Right).dz.abs();
    let mut delta = f64::INFINITY;
    for i in 0..SCAN_POINTS {
        let s = s_lo + (s_hi - s_lo) * i as f64 / (SCAN_POINTS - 1) as f64;
        delta = delta.min(dz(s));
    }
    let mut s0 = s_lo;
    if s_lo > 0.0 {
        for i in (0..SCAN_POINTS - 1).rev() {
            let s = s_lo * i as f64 / (SCAN_POINTS - 1) as f64;
            if dz(s) < delta {
                break;
            }
            s0 = s;
        }
    }
    Ok(SlopeBound { delta, s0 })
}

/// Largest admissible half-width `1 / sup max(|k1|, |k2|)` over `[0, S]`.
pub fn a_max(curve: &ProfileCurve, s_end: f64) -> Result<f64> {
    check_extent(curve, s_end)?;
    let mut kmax: f64 = 0.0;
    let mut probe = |p: CurvePoint| {
        let c = curvatures_at(&p);
        kmax = kmax.max(c.k1.abs()).max(c.k2.abs());
    };
    for i in 0..=SCAN_POINTS {
        probe(curve.point(s_end * i as f64 / SCAN_POINTS as f64, Side::Right));
    }
    for j in breakpoints(curve, s_end) {
        probe(curve.point(j, Side::Left));
        probe(curve.point(j, Side::Right));
    }
    Ok(if kmax > 0.0 { 1.0 / kmax } else { f64::INFINITY })
}

/// Exponent of the power law `c₊(s) ~ s^ε`, fitted in log-log coordinates
/// over `[S/10, S]`.
pub fn decay_exponent(curve: &ProfileCurve, s_end: f64) -> Result<f64> {
    check_extent(curve, s_end)?;
    let n = 200;
    let (lo, hi) = ((0.1 * s_end).ln(), s_end.ln());
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for i in 0..n {
        let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let c = c_plus_at(&curve.point(x.exp(), Side::Right));
        if !c.is_finite() {
            return Err(Error::Fit(format!("c₊ is infinite at s = {}; no decay to fit", x.exp())));
        }
        xs.push(x);
        ys.push(c.ln());
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// Summary of the geometric constants of a curve truncated at `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryReport {
    pub s_end: f64,
    pub c_sigma: f64,
    pub max_r_over_s: f64,
    pub total_k_quadrature: f64,
    pub total_k_boundary: f64,
    pub slope: Option<SlopeBound>,
    pub a_max: f64,
    pub decay_exponent: Option<f64>,
    pub notes: Vec<String>,
}

pub fn geometry_report(curve: &ProfileCurve, s_end: f64) -> Result<GeometryReport> {
    let total = total_gauss_curvature(curve, s_end)?;
    let growth = c_sigma(curve, s_end)?;
    let mut notes = Vec::new();
    let slope = match slope_bound_params(curve, 0.1 * s_end, s_end) {
        Ok(b) => Some(b),
        Err(e) => {
            notes.push(e.to_string());
            None
        }
    };
    let decay = match decay_exponent(curve, s_end) {
        Ok(e) => Some(e),
        Err(e) => {
            notes.push(e.to_string());
            None
        }
    };
    if !growth.holds_on_grid {
        notes.push(format!("r ≤ C_Σ s fails on the grid (max r/s = {})", growth.max_r_over_s));
    }
    Ok(GeometryReport {
        s_end,
        c_sigma: growth.c_sigma,
        max_r_over_s: growth.max_r_over_s,
        total_k_quadrature: total.quadrature,
        total_k_boundary: total.boundary,
        slope,
        a_max: a_max(curve, s_end)?,
        decay_exponent: decay,
        notes,
    })
}

/// Rows `s, k1, k2, K, M, c_plus` on a uniform grid of `n` intervals.
pub fn curvature_table(curve: &ProfileCurve, s_end: f64, n: usize) -> Result<Vec<[f64; 6]>> {
    check_extent(curve, s_end)?;
    let n = n.max(1);
    Ok((0..=n)
        .map(|i| {
            let s = s_end * i as f64 / n as f64;
            let p = curve.point(s, Side::Right);
            let c = curvatures_at(&p);
            [s, c.k1, c.k2, c.gauss, c.mean, c_plus_at(&p)]
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_cap_curvatures() {
        let c = ProfileCurve::cap_cone(2.0, 2.0).unwrap();
        let k = curvatures(&c, 0.5).unwrap();
        assert!((k.k1 - 0.5).abs() < 1e-15 && (k.k2 - 0.5).abs() < 1e-15);
        assert!((c_plus(&c, 0.5).unwrap() - 2.0).abs() < 1e-14);
        let k0 = curvatures(&c, 0.0).unwrap();
        assert!((k0.k2 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cone_branch_is_flat() {
        let c = ProfileCurve::cap_cone(1.0, 1.0).unwrap();
        let k = curvatures(&c, 5.0).unwrap();
        assert_eq!(k.k1, 0.0);
        assert_eq!(k.gauss, 0.0);
        let p = c.eval(5.0).unwrap();
        assert!((k.k2 - p.dz / p.r).abs() < 1e-16);
    }

    #[test]
    fn plane_has_no_focal_point() {
        let p = ProfileCurve::plane();
        assert!(c_plus(&p, 3.0).unwrap().is_infinite());
        assert!(a_max(&p, 10.0).unwrap().is_infinite());
        assert!(matches!(decay_exponent(&p, 10.0), Err(Error::Fit(_))));
        assert!(matches!(slope_bound_params(&p, 1.0, 10.0), Err(Error::Hypothesis { .. })));
    }

    #[test]
    fn paraboloid_closed_form_curvatures() {
        let c = 1.5;
        let p = ProfileCurve::paraboloid(c).unwrap();
        for &s in &[0.2, 3.0, 40.0] {
            let pt = p.eval(s).unwrap();
            let rho = pt.r;
            let q2 = 1.0 + c * c * rho * rho;
            let k = curvatures_at(&pt);
            assert!((k.k1 - c / q2.powf(1.5)).abs() < 1e-13);
            assert!((k.k2 - c / q2.sqrt()).abs() < 1e-13);
        }
    }

    #[test]
    fn slope_bound_on_cone_is_exact() {
        let c = ProfileCurve::cap_cone(1.0, std::f64::consts::FRAC_PI_2).unwrap();
        let b = slope_bound_params(&c, 8.0, 80.0).unwrap();
        assert_eq!(b.delta, std::f64::consts::FRAC_PI_4.sin());
        assert!(b.s0 >= std::f64::consts::FRAC_PI_4 && b.s0 < 0.81, "{}", b.s0);
    }

    #[test]
    fn decay_exponents() {
        let cone = ProfileCurve::cap_cone(1.0, 1.2).unwrap();
        assert!((decay_exponent(&cone, 1e4).unwrap() - 1.0).abs() < 1e-2);
        let par = ProfileCurve::paraboloid(1.0).unwrap();
        assert!((decay_exponent(&par, 1e4).unwrap() - 0.5).abs() < 2e-2);
    }

    #[test]
    fn jacobian_vanishes_at_focal_distance() {
        assert_eq!(jacobian(0.5, 0.25, 2.0), 0.0);
        assert_eq!(jacobian(0.0, 0.0, 7.0), 1.0);
    }
}
