//! Adaptive Gauss–Kronrod (7/15) quadrature with user breakpoints.
//!
//! The integrand may be vector valued so several moments that share the same
//! expensive evaluation are integrated on one adaptive mesh.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Stopping rule and subdivision budget.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { abs_tol: 1e-10, rel_tol: 0.0, max_intervals: 4000 }
    }
}

impl QuadOptions {
    pub fn abs(tol: f64) -> Self {
        QuadOptions { abs_tol: tol, ..Default::default() }
    }

    pub fn rel(tol: f64) -> Self {
        QuadOptions { abs_tol: 0.0, rel_tol: tol, ..Default::default() }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quad<const N: usize> {
    pub value: [f64; N],
    /// Largest component error estimate.
    pub error: f64,
    pub errors: [f64; N],
    pub intervals: usize,
}

struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: [f64; N],
    priority: f64,
}

impl<const N: usize> PartialEq for Panel<N> {
    fn eq(&self, other: &Self) -> bool {
        self.priority == other.priority
    }
}
impl<const N: usize> Eq for Panel<N> {}
impl<const N: usize> PartialOrd for Panel<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Panel<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority.total_cmp(&other.priority)
    }
}

fn kronrod<const N: usize, F: FnMut(f64) -> [f64; N]>(f: &mut F, a: f64, b: f64) -> ([f64; N], [f64; N]) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = [0.0; N];
    let mut g = [0.0; N];
    let fc = f(c);
    for n in 0..N {
        k[n] = WGK[7] * fc[n];
        g[n] = WG[3] * fc[n];
    }
    for i in 0..7 {
        let dx = h * XGK[i];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        for n in 0..N {
            let s = f1[n] + f2[n];
            k[n] += WGK[i] * s;
            if i % 2 == 1 {
                g[n] += WG[i / 2] * s;
            }
        }
    }
    let mut err = [0.0; N];
    for n in 0..N {
        k[n] *= h;
        g[n] *= h;
        err[n] = (k[n] - g[n]).abs();
    }
    (k, err)
}

fn tolerances<const N: usize>(opts: &QuadOptions, total: &[f64; N]) -> [f64; N] {
    let mut tol = [0.0; N];
    for n in 0..N {
        tol[n] = opts.abs_tol.max(opts.rel_tol * total[n].abs()).max(f64::MIN_POSITIVE);
    }
    tol
}

fn priority<const N: usize>(err: &[f64; N], tol: &[f64; N]) -> f64 {
    (0..N).fold(0.0f64, |m, n| m.max(err[n] / tol[n]))
}

/// Integrates a vector-valued `f` over `[a, b]`, splitting first at the
/// breakpoints that fall strictly inside the interval.
///
/// Each component must meet `max(abs_tol, rel_tol·|value|)` on its own, so
/// components of very different size can share one mesh.
pub fn integrate_vec<const N: usize, F>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    opts: QuadOptions,
) -> Result<Quad<N>>
where
    F: FnMut(f64) -> [f64; N],
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("integration limits must be finite"));
    }
    if a == b {
        return Ok(Quad { value: [0.0; N], error: 0.0, errors: [0.0; N], intervals: 0 });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts = vec![lo];
    let mut bp: Vec<f64> = breakpoints.iter().copied().filter(|&x| x > lo && x < hi).collect();
    bp.sort_by(f64::total_cmp);
    bp.dedup();
    cuts.extend(bp);
    cuts.push(hi);

    let mut raw = Vec::with_capacity(cuts.len());
    let mut total = [0.0; N];
    let mut err = [0.0; N];
    for w in cuts.windows(2) {
        let (v, e) = kronrod(&mut f, w[0], w[1]);
        for n in 0..N {
            total[n] += v[n];
            err[n] += e[n];
        }
        raw.push((w[0], w[1], v, e));
    }
    let tol = tolerances(&opts, &total);
    let mut heap: BinaryHeap<Panel<N>> = raw
        .into_iter()
        .map(|(a, b, value, error)| Panel { a, b, value, error, priority: priority(&error, &tol) })
        .collect();

    loop {
        let tol = tolerances(&opts, &total);
        if (0..N).all(|n| err[n] <= tol[n]) {
            break;
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::Quadrature { estimate: err.iter().cloned().fold(0.0, f64::max) });
        }
        let worst = heap.pop().expect("heap is never empty");
        let m = 0.5 * (worst.a + worst.b);
        if worst.priority == 0.0 {
            return Err(Error::Quadrature { estimate: err.iter().cloned().fold(0.0, f64::max) });
        }
        if m <= worst.a || m >= worst.b {
            // Panel collapsed to adjacent floats; keep its contribution and stop refining it.
            for n in 0..N {
                err[n] -= worst.error[n];
            }
            heap.push(Panel { error: [0.0; N], priority: 0.0, ..worst });
            continue;
        }
        let (v1, e1) = kronrod(&mut f, worst.a, m);
        let (v2, e2) = kronrod(&mut f, m, worst.b);
        for n in 0..N {
            total[n] += v1[n] + v2[n] - worst.value[n];
            err[n] += e1[n] + e2[n] - worst.error[n];
        }
        heap.push(Panel { a: worst.a, b: m, value: v1, error: e1, priority: priority(&e1, &tol) });
        heap.push(Panel { a: m, b: worst.b, value: v2, error: e2, priority: priority(&e2, &tol) });
    }

    // Re-sum from panels to shed the drift of incremental updates.
    let mut value = [0.0; N];
    let mut error = [0.0f64; N];
    let intervals = heap.len();
    for p in heap {
        for n in 0..N {
            value[n] += p.value[n];
            error[n] += p.error[n];
        }
    }
    for v in value.iter_mut() {
        *v *= sign;
    }
    Ok(Quad { value, error: error.iter().cloned().fold(0.0, f64::max), errors: error, intervals })
}

/// Scalar convenience wrapper around [`integrate_vec`].
pub fn integrate<F>(mut f: F, a: f64, b: f64, breakpoints: &[f64], opts: QuadOptions) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let q = integrate_vec(|x| [f(x)], a, b, breakpoints, opts)?;
    Ok((q.value[0], q.error))
}

/// Sum with Neumaier compensation.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for x in it {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let (v, _) = integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, &[], QuadOptions::abs(1e-14)).unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0);
        assert!((v - exact).abs() < 1e-13);
    }

    #[test]
    fn kink_with_breakpoint() {
        let (v, _) = integrate(|x: f64| x.abs().sqrt(), -1.0, 4.0, &[0.0], QuadOptions::abs(1e-11)).unwrap();
        let exact = 2.0 / 3.0 + 2.0 / 3.0 * 8.0;
        assert!((v - exact).abs() < 1e-10, "{v}");
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let (v, _) = integrate(f64::exp, 1.0, 0.0, &[], QuadOptions::abs(1e-13)).unwrap();
        assert!((v + (std::f64::consts::E - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn vector_moments() {
        let q = integrate_vec(|x: f64| [x.sin(), x.cos()], 0.0, std::f64::consts::PI, &[], QuadOptions::abs(1e-13))
            .unwrap();
        assert!((q.value[0] - 2.0).abs() < 1e-12);
        assert!(q.value[1].abs() < 1e-12);
    }

    #[test]
    fn budget_exhaustion_reports_estimate() {
        let opts = QuadOptions { abs_tol: 1e-15, rel_tol: 0.0, max_intervals: 3 };
        let r = integrate(|x: f64| 1.0 / x.sqrt(), 1e-12, 1.0, &[], opts);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn compensation_beats_naive() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(xs), 2.0);
    }
}
