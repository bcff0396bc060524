//! Arclength-parametrized meridian curves `s ↦ (r(s), z(s))`.
//!
//! Every curve starts on the axis, `r(0) = 0`, `z(0) = 0`, leaves it
//! horizontally (`r'(0) = 1`) and moves at unit speed. Closed forms are exact;
//! tabulated curves go through a not-a-knot cubic spline.

use std::path::Path;

use crate::error::{Error, Result};
use crate::spline::CubicSpline;

/// Position and first two derivatives of the meridian at one arclength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub r: f64,
    pub z: f64,
    pub dr: f64,
    pub dz: f64,
    pub ddr: f64,
    pub ddz: f64,
}

impl CurvePoint {
    pub fn speed_defect(&self) -> f64 {
        (self.dr * self.dr + self.dz * self.dz - 1.0).abs()
    }
}

/// Which one-sided limit to take at a curvature jump.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

pub const UNIT_SPEED_TOL_CLOSED: f64 = 1e-9;
pub const UNIT_SPEED_TOL_TABULATED: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct TabulatedCurve {
    r: CubicSpline,
    z: CubicSpline,
    s_max: f64,
}

#[derive(Debug, Clone)]
pub enum ProfileCurve {
    Plane,
    /// Spherical cap of radius `radius` glued to a cone of opening angle `theta`.
    CapCone { radius: f64, theta: f64 },
    /// `z = c ρ² / 2`.
    Paraboloid { c: f64 },
    Tabulated(TabulatedCurve),
}

impl ProfileCurve {
    pub fn plane() -> Self {
        ProfileCurve::Plane
    }

    pub fn cap_cone(radius: f64, theta: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::domain(format!("cap radius must be positive, got {radius}")));
        }
        if !(theta > 0.0 && theta < std::f64::consts::PI) {
            return Err(Error::domain(format!("cone opening angle must lie in (0, π), got {theta}")));
        }
        Ok(ProfileCurve::CapCone { radius, theta })
    }

    pub fn paraboloid(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::domain(format!("paraboloid coefficient must be positive, got {c}")));
        }
        Ok(ProfileCurve::Paraboloid { c })
    }

    /// Builds a spline curve from samples and validates it.
    pub fn tabulated(s: &[f64], r: &[f64], z: &[f64]) -> Result<Self> {
        if s.len() < 4 {
            return Err(Error::invalid(format!("tabulated curve needs at least 4 samples, got {}", s.len())));
        }
        if s.len() != r.len() || s.len() != z.len() {
            return Err(Error::invalid("columns s, r, z differ in length"));
        }
        if s.iter().chain(r).chain(z).any(|v| !v.is_finite()) {
            return Err(Error::invalid("tabulated curve contains non-finite values"));
        }
        if s[0].abs() > 1e-12 || r[0].abs() > 1e-9 || z[0].abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "curve must start on the axis at s = 0 (got s={}, r={}, z={})",
                s[0], r[0], z[0]
            )));
        }
        let curve = TabulatedCurve {
            r: CubicSpline::not_a_knot(s, r)?,
            z: CubicSpline::not_a_knot(s, z)?,
            s_max: *s.last().unwrap(),
        };
        let c = ProfileCurve::Tabulated(curve);
        c.validate()?;
        Ok(c)
    }

    /// Reads a CSV with header `s,r,z`.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let cols = crate::io::read_columns(path, &["s", "r", "z"])?;
        Self::tabulated(&cols[0], &cols[1], &cols[2])
    }

    /// Upper end of the parameter interval (infinite for closed forms).
    pub fn s_max(&self) -> f64 {
        match self {
            ProfileCurve::Tabulated(t) => t.s_max,
            _ => f64::INFINITY,
        }
    }

    /// Arclengths where the curvature jumps.
    pub fn junctions(&self) -> Vec<f64> {
        match self {
            ProfileCurve::CapCone { radius, theta } => vec![0.5 * theta * radius],
            _ => Vec::new(),
        }
    }

    pub fn unit_speed_tol(&self) -> f64 {
        match self {
            ProfileCurve::Tabulated(_) => UNIT_SPEED_TOL_TABULATED,
            _ => UNIT_SPEED_TOL_CLOSED,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProfileCurve::Plane => "plane",
            ProfileCurve::CapCone { .. } => "cap_cone",
            ProfileCurve::Paraboloid { .. } => "paraboloid",
            ProfileCurve::Tabulated(_) => "tabulated",
        }
    }

    /// Evaluates the curve; at a junction the right-hand limit is returned.
    pub fn eval(&self, s: f64) -> Result<CurvePoint> {
        self.eval_side(s, Side::Right)
    }

    pub fn eval_side(&self, s: f64, side: Side) -> Result<CurvePoint> {
        if !(s >= 0.0 && s <= self.s_max()) {
            return Err(Error::domain(format!("s = {s} outside [0, {}]", self.s_max())));
        }
        Ok(self.point(s, side))
    }

    /// Unchecked evaluation for hot loops; `s` must lie in `[0, s_max]`.
    pub fn point(&self, s: f64, side: Side) -> CurvePoint {
        match self {
            ProfileCurve::Plane => CurvePoint { r: s, z: 0.0, dr: 1.0, dz: 0.0, ddr: 0.0, ddz: 0.0 },
            ProfileCurve::CapCone { radius, theta } => cap_cone_point(*radius, *theta, s, side),
            ProfileCurve::Paraboloid { c } => paraboloid_point(*c, s),
            ProfileCurve::Tabulated(t) => {
                let (r, dr, ddr) = t.r.eval3(s);
                let (z, dz, ddz) = t.z.eval3(s);
                CurvePoint { r, z, dr, dz, ddr, ddz }
            }
        }
    }

    /// Checks unit speed and the axis conditions; reports the first offending
    /// arclength.
    pub fn validate(&self) -> Result<()> {
        let tol = self.unit_speed_tol();
        let p0 = self.point(0.0, Side::Right);
        if p0.r.abs() > tol || p0.z.abs() > tol || (p0.dr - 1.0).abs() > tol.sqrt() {
            return Err(Error::invalid(format!(
                "curve must leave the axis horizontally: r(0)={}, z(0)={}, r'(0)={}",
                p0.r, p0.z, p0.dr
            )));
        }
        let probes: Vec<f64> = match self {
            ProfileCurve::Tabulated(t) => {
                let k = t.r.knots();
                let mut v = Vec::with_capacity(2 * k.len());
                for w in k.windows(2) {
                    v.push(w[0]);
                    v.push(0.5 * (w[0] + w[1]));
                }
                v.push(t.s_max);
                v
            }
            _ => (0..=1000).map(|i| i as f64 * 0.02).collect(),
        };
        for s in probes {
            let p = self.point(s, Side::Right);
            let d = p.speed_defect();
            if !(d <= tol) {
                return Err(Error::NotUnitSpeed { s, residual: d });
            }
        }
        Ok(())
    }
}

fn cap_cone_point(radius: f64, theta: f64, s: f64, side: Side) -> CurvePoint {
    let sj = 0.5 * theta * radius;
    let on_cap = s < sj || (s == sj && side == Side::Left);
    if on_cap {
        let (sn, cs) = (s / radius).sin_cos();
        CurvePoint {
            r: radius * sn,
            z: radius * (1.0 - cs),
            dr: cs,
            dz: sn,
            ddr: -sn / radius,
            ddz: cs / radius,
        }
    } else {
        let (sn, cs) = (0.5 * theta).sin_cos();
        let u = s - sj;
        CurvePoint {
            r: u * cs + radius * sn,
            z: u * sn + radius * (1.0 - cs),
            dr: cs,
            dz: sn,
            ddr: 0.0,
            ddz: 0.0,
        }
    }
}

/// Arclength from the vertex to the point at radius `rho` on `z = c ρ²/2`.
pub fn paraboloid_arclength(c: f64, rho: f64) -> f64 {
    let q = (1.0 + c * c * rho * rho).sqrt();
    0.5 * (rho * q + (c * rho).asinh() / c)
}

/// Inverts [`paraboloid_arclength`] by Newton's method. The map is convex, so
/// iterating from an upper bound decreases monotonically onto the root.
pub fn paraboloid_radius(c: f64, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let mut rho = s.min((2.0 * s / c).sqrt());
    for _ in 0..100 {
        let f = paraboloid_arclength(c, rho) - s;
        let step = f / (1.0 + c * c * rho * rho).sqrt();
        let next = rho - step;
        if !(next < rho) || step.abs() <= 1e-16 * rho {
            return next.min(rho);
        }
        rho = next;
    }
    rho
}

fn paraboloid_point(c: f64, s: f64) -> CurvePoint {
    let rho = paraboloid_radius(c, s);
    let q2 = 1.0 + c * c * rho * rho;
    let q = q2.sqrt();
    CurvePoint {
        r: rho,
        z: 0.5 * c * rho * rho,
        dr: 1.0 / q,
        dz: c * rho / q,
        ddr: -c * c * rho / (q2 * q2),
        ddz: c / (q2 * q2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn cap_cone_is_continuous_at_junction() {
        let c = ProfileCurve::cap_cone(1.3, PI / 2.0).unwrap();
        let sj = c.junctions()[0];
        let l = c.eval_side(sj, Side::Left).unwrap();
        let r = c.eval_side(sj, Side::Right).unwrap();
        assert!((l.r - r.r).abs() < 1e-15 && (l.z - r.z).abs() < 1e-15);
        assert!((l.dr - r.dr).abs() < 1e-15 && (l.dz - r.dz).abs() < 1e-15);
        assert!((l.ddz - (PI / 4.0).cos() / 1.3).abs() < 1e-15 && r.ddz == 0.0);
    }

    #[test]
    fn paraboloid_matches_graph() {
        let c = 0.7;
        let p = ProfileCurve::paraboloid(c).unwrap();
        for &s in &[1e-6, 0.3, 2.0, 55.0, 1e4, 3e7] {
            let q = p.eval(s).unwrap();
            assert!((q.z - 0.5 * c * q.r * q.r).abs() <= 1e-12 * q.z.max(1.0));
            assert!((paraboloid_arclength(c, q.r) - s).abs() <= 1e-12 * s.max(1.0));
            assert!(q.speed_defect() < 1e-14);
        }
    }

    #[test]
    fn paraboloid_second_derivative_by_differences() {
        let p = ProfileCurve::paraboloid(1.0).unwrap();
        let s = 1.7;
        let h = 1e-4;
        let (a, b, m) = (p.eval(s - h).unwrap(), p.eval(s + h).unwrap(), p.eval(s).unwrap());
        assert!(((b.dr - a.dr) / (2.0 * h) - m.ddr).abs() < 1e-7);
        assert!(((b.dz - a.dz) / (2.0 * h) - m.ddz).abs() < 1e-7);
        assert!(((b.r - a.r) / (2.0 * h) - m.dr).abs() < 1e-7);
    }

    #[test]
    fn tabulated_circle_arc_validates() {
        let n = 200;
        let s: Vec<f64> = (0..n).map(|i| i as f64 * 0.01).collect();
        let r: Vec<f64> = s.iter().map(|x| x.sin()).collect();
        let z: Vec<f64> = s.iter().map(|x| 1.0 - x.cos()).collect();
        let c = ProfileCurve::tabulated(&s, &r, &z).unwrap();
        let p = c.eval(1.234).unwrap();
        assert!((p.r - 1.234f64.sin()).abs() < 1e-9);
        assert!((p.ddz - 1.234f64.cos()).abs() < 1e-4);
    }

    #[test]
    fn tabulated_rejects_stretched_samples() {
        let s: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let r: Vec<f64> = s.iter().map(|x| 1.1 * x).collect();
        let z = vec![0.0; 20];
        match ProfileCurve::tabulated(&s, &r, &z) {
            Err(Error::Invalid(_)) | Err(Error::NotUnitSpeed { .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tabulated_reports_first_offending_s() {
        let s: Vec<f64> = (0..40).map(|i| i as f64 * 0.1).collect();
        let r: Vec<f64> = s.iter().map(|&x| if x < 2.0 { x } else { 2.0 + 1.5 * (x - 2.0) }).collect();
        let z = vec![0.0; 40];
        match ProfileCurve::tabulated(&s, &r, &z) {
            Err(Error::NotUnitSpeed { s, residual }) => {
                // Spline ringing from the kink at s = 2 reaches a few knots back.
                assert!(s > 0.5 && s <= 2.1, "{s}");
                assert!(residual > UNIT_SPEED_TOL_TABULATED);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn domain_checks() {
        assert!(ProfileCurve::cap_cone(0.0, 1.0).is_err());
        assert!(ProfileCurve::cap_cone(1.0, PI).is_err());
        assert!(ProfileCurve::paraboloid(-1.0).is_err());
        assert!(ProfileCurve::plane().eval(-1.0).is_err());
    }
}
