//! Not-a-knot cubic interpolation.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    /// Builds the not-a-knot interpolant. Needs at least four strictly
    /// increasing abscissae.
    pub fn not_a_knot(x: &[f64], y: &[f64]) -> Result<Self> {
        let n = x.len();
        if n != y.len() {
            return Err(Error::invalid("spline abscissae and ordinates differ in length"));
        }
        if n < 4 {
            return Err(Error::invalid(format!("spline needs at least 4 samples, got {n}")));
        }
        if let Some(w) = x.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::invalid(format!("abscissae not strictly increasing at {}", w[1])));
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let d: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();

        // Unknowns m[1..n-1]; the end values follow from third-derivative continuity.
        let k = n - 2;
        let mut sub = vec![0.0; k];
        let mut dia = vec![0.0; k];
        let mut sup = vec![0.0; k];
        let mut rhs = vec![0.0; k];
        for r in 0..k {
            let i = r + 1;
            sub[r] = h[i - 1];
            dia[r] = 2.0 * (h[i - 1] + h[i]);
            sup[r] = h[i];
            rhs[r] = 6.0 * (d[i] - d[i - 1]);
        }
        let (h0, h1) = (h[0], h[1]);
        dia[0] += h0 + h0 * h0 / h1;
        sup[0] -= h0 * h0 / h1;
        let (ha, hb) = (h[n - 3], h[n - 2]);
        dia[k - 1] += hb + hb * hb / ha;
        sub[k - 1] -= hb * hb / ha;
        let inner = solve_tridiagonal(&sub, &dia, &sup, &rhs)?;
        let mut m = vec![0.0; n];
        m[1..n - 1].copy_from_slice(&inner);
        m[0] = m[1] + h0 * (m[1] - m[2]) / h1;
        m[n - 1] = m[n - 2] + hb * (m[n - 2] - m[n - 3]) / ha;
        Ok(CubicSpline { x: x.to_vec(), y: y.to_vec(), m })
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    fn interval(&self, t: f64) -> usize {
        let n = self.x.len();
        let i = self.x.partition_point(|&v| v <= t);
        i.clamp(1, n - 1) - 1
    }

    /// Value, first and second derivative at `t`.
    pub fn eval3(&self, t: f64) -> (f64, f64, f64) {
        let i = self.interval(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let v = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let dv = (y1 - y0) / h + (-(3.0 * a * a - 1.0) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0;
        let ddv = a * m0 + b * m1;
        (v, dv, ddv)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval3(t).0
    }
}

/// Thomas algorithm. `sub[0]` and `sup[n-1]` are ignored.
pub fn solve_tridiagonal(sub: &[f64], dia: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = dia.len();
    let mut c = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut piv = dia[0];
    if piv == 0.0 {
        return Err(Error::Factorization("zero pivot in tridiagonal solve".into()));
    }
    c[0] = sup[0] / piv;
    x[0] = rhs[0] / piv;
    for i in 1..n {
        piv = dia[i] - sub[i] * c[i - 1];
        if piv == 0.0 || !piv.is_finite() {
            return Err(Error::Factorization("zero pivot in tridiagonal solve".into()));
        }
        c[i] = if i + 1 < n { sup[i] / piv } else { 0.0 };
        x[i] = (rhs[i] - sub[i] * x[i - 1]) / piv;
    }
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubics() {
        let x = [0.0, 0.3, 1.0, 1.7, 2.0, 3.1];
        let f = |t: f64| 2.0 * t * t * t - t * t + 0.5 * t - 1.0;
        let y: Vec<f64> = x.iter().map(|&t| f(t)).collect();
        let s = CubicSpline::not_a_knot(&x, &y).unwrap();
        for &t in &[0.1, 0.77, 1.5, 2.9] {
            let (v, d, dd) = s.eval3(t);
            assert!((v - f(t)).abs() < 1e-12);
            assert!((d - (6.0 * t * t - 2.0 * t + 0.5)).abs() < 1e-11);
            assert!((dd - (12.0 * t - 2.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn four_points_single_cubic() {
        let x = [0.0, 1.0, 2.5, 3.0];
        let f = |t: f64| t * t * t - 4.0 * t;
        let y: Vec<f64> = x.iter().map(|&t| f(t)).collect();
        let s = CubicSpline::not_a_knot(&x, &y).unwrap();
        assert!((s.eval(1.7) - f(1.7)).abs() < 1e-12);
    }

    #[test]
    fn rejects_short_or_unsorted() {
        assert!(CubicSpline::not_a_knot(&[0.0, 1.0, 2.0], &[0.0; 3]).is_err());
        assert!(CubicSpline::not_a_knot(&[0.0, 1.0, 1.0, 2.0], &[0.0; 4]).is_err());
    }
}
