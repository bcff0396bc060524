//! Variational certificates for a bound state below the transverse threshold.
//!
//! The trial functions are `ψ = φ_n ξ₁ + ε (φ_n/s) t ξ₁`, with `φ_n` the
//! logarithmic cut-off supported on `[n, n³]`. A negative value of the shifted
//! form `Q[ψ] = h[ψ] - E₁‖ψ‖²` proves that the spectrum reaches below `E₁`.
//!
//! The flat part of the transverse energy integrates to a known value for an
//! exact eigenpair (zero, zero and `‖ξ₁‖²` for the three ε-orders), while the
//! norm of the trial function grows like `n⁶`. Those flat parts are therefore
//! taken in closed form and only the curvature corrections and the tails cut
//! off by the focal distance are integrated numerically. Summing the flat
//! part by quadrature would leave round-off of order `1e-16·‖ψ‖²`, which is
//! larger than the form itself.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{a_max, c_plus_at, c_sigma, curvatures_at, slope_bound_params};
use crate::profiles::{ProfileCurve, Side};
use crate::quadrature::{integrate, integrate_vec, QuadOptions};
use crate::transverse::{TransverseGroundState, TransverseProfile};

/// Logarithmic cut-off: rises from 0 at `n` to 1 at `n²`, falls to 0 at `n³`.
pub fn phi_n(n: f64, s: f64) -> f64 {
    let l = n.ln();
    let u = s.ln();
    if s <= n || s >= n * n * n {
        0.0
    } else if s < n * n {
        (u - l) / l
    } else {
        (3.0 * l - u) / l
    }
}

pub fn phi_n_prime(n: f64, s: f64) -> f64 {
    if s <= n || s >= n * n * n {
        0.0
    } else if s < n * n {
        1.0 / (s * n.ln())
    } else {
        -1.0 / (s * n.ln())
    }
}

/// `∫ φ_n(s)² / s ds`, by quadrature.
pub fn log_integral(n: f64) -> Result<f64> {
    if !(n > 1.0 && n.is_finite()) {
        return Err(Error::domain(format!("cut-off parameter must exceed 1, got {n}")));
    }
    let f = |s: f64| {
        let p = phi_n(n, s);
        p * p / s
    };
    let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-13, max_intervals: 4000 };
    let (v, _) = integrate(f, n, n * n * n, &[n * n], opts)?;
    Ok(v)
}

/// Geometric constants entering the analytic bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertConstants {
    pub delta: f64,
    pub c_sigma: f64,
}

impl CertConstants {
    pub fn c1(&self) -> f64 {
        2.0 / 3.0 * PI * self.delta
    }

    pub fn c2(&self) -> f64 {
        4.0 / 3.0 * PI * self.c_sigma
    }

    /// `(-2 ε c₁ + ε² c₂) log n`.
    pub fn analytic_bound(&self, n: f64, eps: f64) -> f64 {
        (-2.0 * eps * self.c1() + eps * eps * self.c2()) * n.ln()
    }
}

/// The shifted form split by origin. `q2_eps1` carries the factor `2ε` and
/// `q2_eps2` the factor `ε²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormBreakdown {
    pub n: f64,
    pub epsilon: f64,
    pub q1: f64,
    pub q2_eps0: f64,
    pub q2_eps1: f64,
    pub q2_eps2: f64,
    pub total: f64,
    pub norm_sq: f64,
    pub analytic_bound: f64,
    /// Largest quadrature error estimate among the form terms.
    pub quad_error: f64,
    /// Change of the total when the transverse cut-off is doubled.
    pub cutoff_shift: f64,
}

impl FormBreakdown {
    /// Magnitude of the terms that are summed into `total`.
    pub fn scale(&self) -> f64 {
        self.q1.abs() + self.q2_eps0.abs() + self.q2_eps1.abs() + self.q2_eps2.abs()
    }
}

/// Transverse cut-off `max(3a, 12/√(-E₁))`.
pub fn transverse_cutoff(gs: &TransverseGroundState) -> f64 {
    (3.0 * gs.profile.support()).max(12.0 / gs.kappa())
}

fn transverse_breaks(gs: &TransverseGroundState) -> Vec<f64> {
    match &gs.profile {
        TransverseProfile::Delta { .. } => vec![0.0],
        TransverseProfile::Bounded(w) => {
            let mut v = w.kinks();
            v.push(0.0);
            v
        }
    }
}

const GL5: [(f64, f64); 5] = [
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.0, 0.568_888_888_888_888_9),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

/// Left moments `t^p d_ab` (p = 1, 2) and `t^p u_a u_b` (p = 0, 1, 2), then
/// the flat densities `d_ab` for the right tail. `u₀ = ξ₁`, `u₁ = t ξ₁` and
/// `d_ab = u_a' u_b' + (W - E₁) u_a u_b`.
fn moment_integrand(gs: &TransverseGroundState, t: f64) -> ([f64; 15], [f64; 3]) {
    let (x, dx) = gs.eval(t);
    let v = gs.profile.w(t) - gs.e1;
    let (u0, u1, d0, d1) = (x, t * x, dx, x + t * dx);
    let d = [d0 * d0 + v * u0 * u0, d0 * d1 + v * u0 * u1, d1 * d1 + v * u1 * u1];
    let p = [u0 * u0, u0 * u1, u1 * u1];
    let t2 = t * t;
    (
        [
            t * d[0], t * d[1], t * d[2],
            t2 * d[0], t2 * d[1], t2 * d[2],
            p[0], p[1], p[2],
            t * p[0], t * p[1], t * p[2],
            t2 * p[0], t2 * p[1], t2 * p[2],
        ],
        d,
    )
}

fn panel(gs: &TransverseGroundState, a: f64, b: f64) -> ([f64; 15], [f64; 3]) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut l = [0.0; 15];
    let mut r = [0.0; 3];
    if h == 0.0 {
        return (l, r);
    }
    for &(x, w) in &GL5 {
        let (fl, fr) = moment_integrand(gs, c + h * x);
        for i in 0..15 {
            l[i] += w * h * fl[i];
        }
        for i in 0..3 {
            r[i] += w * h * fr[i];
        }
    }
    (l, r)
}

#[derive(Clone, Copy)]
struct Kahan<const N: usize> {
    sum: [f64; N],
    c: [f64; N],
}

impl<const N: usize> Kahan<N> {
    fn new() -> Self {
        Kahan { sum: [0.0; N], c: [0.0; N] }
    }
    fn add(&mut self, x: &[f64; N]) {
        for i in 0..N {
            let t = self.sum[i] + x[i];
            if self.sum[i].abs() >= x[i].abs() {
                self.c[i] += (self.sum[i] - t) + x[i];
            } else {
                self.c[i] += (x[i] - t) + self.sum[i];
            }
            self.sum[i] = t;
        }
    }
    fn value(&self) -> [f64; N] {
        let mut v = [0.0; N];
        for i in 0..N {
            v[i] = self.sum[i] + self.c[i];
        }
        v
    }
}

/// Cumulative transverse moments on panels where the integrand is smooth,
/// integrated by 5-point Gauss–Legendre (exact on spline intervals).
struct MomentTable<'a> {
    gs: &'a TransverseGroundState,
    edges: Vec<f64>,
    /// `∫_{lo}^{edge_j}` of the left moments.
    left: Vec<[f64; 15]>,
    /// `∫_{edge_j}^{hi}` of the flat densities.
    right: Vec<[f64; 3]>,
}

impl<'a> MomentTable<'a> {
    fn new(gs: &'a TransverseGroundState, lo: f64, hi: f64) -> Self {
        let edges = gs.panel_edges(lo, hi, 0.02);
        let m = edges.len();
        let panels: Vec<([f64; 15], [f64; 3])> = edges.windows(2).map(|w| panel(gs, w[0], w[1])).collect();
        let mut left = Vec::with_capacity(m);
        let mut acc = Kahan::<15>::new();
        left.push(acc.value());
        for p in &panels {
            acc.add(&p.0);
            left.push(acc.value());
        }
        let mut right = vec![[0.0; 3]; m];
        let mut acc = Kahan::<3>::new();
        for j in (0..m - 1).rev() {
            acc.add(&panels[j].1);
            right[j] = acc.value();
        }
        MomentTable { gs, edges, left, right }
    }

    /// Left moments over `[lo, c]` and flat densities over `[c, hi]`.
    fn at(&self, c: f64) -> ([f64; 15], [f64; 3]) {
        let m = self.edges.len();
        if c >= self.edges[m - 1] {
            return (self.left[m - 1], [0.0; 3]);
        }
        if c <= self.edges[0] {
            return ([0.0; 15], self.right[0]);
        }
        let j = self.edges.partition_point(|&e| e <= c) - 1;
        let (pl, _) = panel(self.gs, self.edges[j], c);
        let (_, pr) = panel(self.gs, c, self.edges[j + 1]);
        let mut l = self.left[j];
        let mut r = self.right[j + 1];
        for i in 0..15 {
            l[i] += pl[i];
        }
        for i in 0..3 {
            r[i] += pr[i];
        }
        (l, r)
    }
}

struct Slice {
    /// `∫ u_a u_b (1-k₂t)/(1-k₁t) dt`
    a: [f64; 3],
    /// Full transverse energy moments, δ-term included.
    e: [f64; 3],
    /// `∫ u_a u_b J dt`
    m: [f64; 3],
}

fn transverse_slice(table: &MomentTable, k1: f64, k2: f64, cp: f64, cutoff: f64) -> Result<Slice> {
    let (l, r) = table.at(cp);
    let ksum = k1 + k2;
    let kprod = k1 * k2;
    // Flat energies over the whole line for an exact eigenpair.
    let flat_line = [0.0, 0.0, 1.0];
    let mut e = [0.0; 3];
    let mut m = [0.0; 3];
    let mut a = [0.0; 3];
    for i in 0..3 {
        e[i] = flat_line[i] - r[i] - ksum * l[i] + kprod * l[3 + i];
        m[i] = l[6 + i] - ksum * l[9 + i] + kprod * l[12 + i];
        // (1-k₂t)/(1-k₁t) = 1 - (k₂-k₁) t / (1-k₁t)
        a[i] = l[6 + i] - (k2 - k1) * l[9 + i];
    }
    if k1 != 0.0 && k1 != k2 {
        // Remaining part of the ratio: -(k₂-k₁) k₁ t² / (1-k₁t).
        let gs = table.gs;
        let hi = cp.min(table.edges[table.edges.len() - 1]);
        let f = |t: f64| {
            let x = gs.xi(t);
            let g = -(k2 - k1) * k1 * t * t / (1.0 - k1 * t);
            [g * x * x, g * t * x * x, g * t * t * x * x]
        };
        let opts = QuadOptions { abs_tol: 1e-14, rel_tol: 1e-10, max_intervals: 4000 };
        let q = integrate_vec(f, -cutoff, hi, &transverse_breaks(gs), opts)?;
        for i in 0..3 {
            a[i] += q.value[i];
        }
    }
    Ok(Slice { a, e, m })
}

fn assemble_with_cutoff(
    curve: &ProfileCurve,
    gs: &TransverseGroundState,
    n: f64,
    eps: f64,
    cutoff: f64,
) -> Result<([f64; 5], f64)> {
    let far = cutoff + 40.0 / gs.kappa() + 2.0 * gs.profile.support();
    let table = MomentTable::new(gs, -cutoff, far);
    let mut failure: Option<Error> = None;
    let mut outer = |u: f64| -> [f64; 5] {
        let s = u.exp();
        let p = curve.point(s, Side::Right);
        let c = curvatures_at(&p);
        let cp = c_plus_at(&p);
        let sl = match transverse_slice(&table, c.k1, c.k2, cp, cutoff) {
            Ok(sl) => sl,
            Err(e) => {
                failure.get_or_insert(e);
                return [0.0; 5];
            }
        };
        let ph = phi_n(n, s);
        let dph = phi_n_prime(n, s);
        let vp = ph / s;
        let dvp = dph / s - ph / (s * s);
        let w = 2.0 * PI * p.r * s;
        [
            w * (dph * dph * sl.a[0] + 2.0 * eps * dph * dvp * sl.a[1] + eps * eps * dvp * dvp * sl.a[2]),
            w * ph * ph * sl.e[0],
            w * 2.0 * eps * ph * vp * sl.e[1],
            w * eps * eps * vp * vp * sl.e[2],
            w * (ph * ph * sl.m[0] + 2.0 * eps * ph * vp * sl.m[1] + eps * eps * vp * vp * sl.m[2]),
        ]
    };
    let l = n.ln();
    let mut breaks = vec![2.0 * l];
    breaks.extend(curve.junctions().into_iter().filter(|&j| j > n && j < n * n * n).map(f64::ln));
    let opts = QuadOptions { abs_tol: 1e-10, rel_tol: 1e-10, max_intervals: 4000 };
    let q = integrate_vec(&mut outer, l, 3.0 * l, &breaks, opts)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((q.value, q.errors[..4].iter().cloned().fold(0.0, f64::max)))
}

/// Evaluates the shifted form on the trial function `ψ_{n,ε}`.
pub fn assemble_q(
    curve: &ProfileCurve,
    gs: &TransverseGroundState,
    n: f64,
    eps: f64,
    consts: &CertConstants,
) -> Result<FormBreakdown> {
    if !(n > 1.0 && n.is_finite()) {
        return Err(Error::domain(format!("cut-off parameter must exceed 1, got {n}")));
    }
    if n * n * n > curve.s_max() {
        return Err(Error::domain(format!("support [n, n³] = [{n}, {}] exceeds the curve extent", n * n * n)));
    }
    let cutoff = transverse_cutoff(gs);
    let (v, err) = assemble_with_cutoff(curve, gs, n, eps, cutoff)?;
    let (v2, _) = assemble_with_cutoff(curve, gs, n, eps, 2.0 * cutoff)?;
    let total = v[0] + v[1] + v[2] + v[3];
    let total2 = v2[0] + v2[1] + v2[2] + v2[3];
    Ok(FormBreakdown {
        n,
        epsilon: eps,
        q1: v[0],
        q2_eps0: v[1],
        q2_eps1: v[2],
        q2_eps2: v[3],
        total,
        norm_sq: v[4],
        analytic_bound: consts.analytic_bound(n, eps),
        quad_error: err,
        cutoff_shift: (total2 - total).abs(),
    })
}

/// Tunables of [`certify`].
#[derive(Debug, Clone)]
pub struct CertOptions {
    pub schedule: Vec<f64>,
    /// Required negativity relative to the magnitude of the summed terms.
    pub cert_margin: f64,
    /// Also scan ε over a geometric 5-point stencil around the default.
    pub line_search: bool,
}

impl Default for CertOptions {
    fn default() -> Self {
        CertOptions { schedule: vec![10.0, 30.0, 100.0, 300.0], cert_margin: 1e-6, line_search: true }
    }
}

/// One evaluated trial function with the constants that produced its ε.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    pub form: FormBreakdown,
    pub constants: CertConstants,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertReport {
    pub records: Vec<TrialRecord>,
    /// Index into `records` of the first certified trial.
    pub witness: Option<usize>,
    /// `(ε, total)` around the witness.
    pub line_search: Vec<(f64, f64)>,
    /// Certified pairs with disjoint supports, `n³ < n'`.
    pub disjoint_pairs: Vec<(f64, f64)>,
    pub a_max: f64,
}

impl CertReport {
    pub fn witness(&self) -> Result<&TrialRecord> {
        match self.witness {
            Some(i) => Ok(&self.records[i]),
            None => Err(Error::CertificateNotFound(format!(
                "no n in the schedule gave Q < 0 (last total {:?})",
                self.records.last().map(|r| r.form.total)
            ))),
        }
    }
}

/// Constants `δ` on `[n, n³]` and `C_Σ` up to `n³`.
pub fn constants_for(curve: &ProfileCurve, n: f64) -> Result<CertConstants> {
    let hi = n * n * n;
    let slope = slope_bound_params(curve, n, hi)?;
    let growth = c_sigma(curve, hi)?;
    Ok(CertConstants { delta: slope.delta, c_sigma: growth.c_sigma })
}

/// Checks the hypotheses on the window `[n_min, n_max³]`.
fn check_hypotheses(curve: &ProfileCurve, gs: &TransverseGroundState, lo: f64, hi: f64) -> Result<f64> {
    let amax = a_max(curve, hi)?;
    let a = gs.profile.support();
    if a >= amax {
        return Err(Error::Hypothesis { label: "Ass.local violated", detail: format!("a ≥ a_max ({a} ≥ {amax})") });
    }
    if !(gs.e1 < 0.0) {
        return Err(Error::Hypothesis { label: "Ass.attr violated", detail: format!("E₁ = {} is not negative", gs.e1) });
    }
    // Positive total curvature first: it is the hypothesis the flat case fails.
    slope_bound_params(curve, lo, lo * lo * lo)?;
    let m = 2000;
    for i in 0..=m {
        let s = lo * (hi / lo).powf(i as f64 / m as f64);
        let c = curvatures_at(&curve.point(s, Side::Right));
        if !(c.k2 > 0.0 && c.k1 >= -1e-14 && c.k1 <= c.k2 * (1.0 + 1e-12)) {
            return Err(Error::Hypothesis {
                label: "Lemma-3 ordering violated",
                detail: format!("need 0 ≤ k1 ≤ k2, k2 > 0 at s = {s} (k1 = {}, k2 = {})", c.k1, c.k2),
            });
        }
    }
    Ok(amax)
}

/// Scans the schedule for the first `n` whose trial function has `Q < 0`
/// with `ε = δ/(2 C_Σ)`.
pub fn certify(curve: &ProfileCurve, gs: &TransverseGroundState, opts: &CertOptions) -> Result<CertReport> {
    if opts.schedule.is_empty() {
        return Err(Error::invalid("empty n schedule"));
    }
    let lo = opts.schedule.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = opts.schedule.iter().cloned().fold(0.0, f64::max);
    if !(lo > 1.0) {
        return Err(Error::domain("schedule entries must exceed 1"));
    }
    let amax = check_hypotheses(curve, gs, lo, hi * hi * hi)?;

    let mut records = Vec::with_capacity(opts.schedule.len());
    let mut witness = None;
    for &n in &opts.schedule {
        let constants = constants_for(curve, n)?;
        let eps = constants.delta / (2.0 * constants.c_sigma);
        let form = assemble_q(curve, gs, n, eps, &constants)?;
        let noise = form.quad_error + form.cutoff_shift;
        let certified = form.total < -opts.cert_margin * form.scale() && form.total + noise < 0.0;
        if certified && witness.is_none() {
            witness = Some(records.len());
        }
        records.push(TrialRecord { form, constants, certified });
    }

    let mut line_search = Vec::new();
    if let (Some(i), true) = (witness, opts.line_search) {
        let rec = records[i];
        for k in -2i32..=2 {
            let eps = rec.form.epsilon * 2f64.powi(k);
            let f = assemble_q(curve, gs, rec.form.n, eps, &rec.constants)?;
            line_search.push((eps, f.total));
        }
    }

    let good: Vec<f64> = records.iter().filter(|r| r.certified).map(|r| r.form.n).collect();
    let mut disjoint_pairs = Vec::new();
    for (i, &a) in good.iter().enumerate() {
        for &b in &good[i + 1..] {
            let (x, y) = if a < b { (a, b) } else { (b, a) };
            if x * x * x < y {
                disjoint_pairs.push((x, y));
            }
        }
    }
    Ok(CertReport { records, witness, line_search, disjoint_pairs, a_max: amax })
}

/// Lower bound on the essential spectrum from the geometry beyond `R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdBound {
    pub radius: f64,
    pub bound: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    /// The δ-interaction has no `‖W‖∞`; its term is dropped.
    pub approximate: bool,
}

/// `sup_{s ≥ R} |k_i(s)|` on a logarithmic grid reaching `10⁶ R` (or the end
/// of a tabulated curve).
fn tail_sup(curve: &ProfileCurve, radius: f64) -> (f64, f64) {
    let end = (1e6 * radius).min(curve.s_max());
    let m = 4000;
    let mut k1: f64 = 0.0;
    let mut k2: f64 = 0.0;
    for i in 0..=m {
        let s = if end > radius { radius * (end / radius).powf(i as f64 / m as f64) } else { radius };
        let c = curvatures_at(&curve.point(s, Side::Right));
        k1 = k1.max(c.k1.abs());
        k2 = k2.max(c.k2.abs());
    }
    for j in curve.junctions().into_iter().filter(|&j| j >= radius && j <= end) {
        let c = curvatures_at(&curve.point(j, Side::Left));
        k1 = k1.max(c.k1.abs());
        k2 = k2.max(c.k2.abs());
    }
    (k1, k2)
}

/// `(c⁻/c⁺) E₁ - ((c⁺ - c⁻)/c⁻) ‖W‖∞` with `c^± = (1 ± a‖k₁‖_R)(1 ± a‖k₂‖_R)`.
pub fn essential_threshold_bound(curve: &ProfileCurve, gs: &TransverseGroundState, radius: f64) -> Result<ThresholdBound> {
    if !(radius >= 0.0 && radius < curve.s_max()) {
        return Err(Error::domain(format!("radius {radius} outside the curve")));
    }
    let (k1, k2) = tail_sup(curve, radius);
    let a = gs.profile.support();
    let cp = (1.0 + a * k1) * (1.0 + a * k2);
    let cm = (1.0 - a * k1) * (1.0 - a * k2);
    if !(cm > 0.0) || a * k1 >= 1.0 || a * k2 >= 1.0 {
        return Err(Error::domain(format!("c⁻ = {cm} is not positive; the layer overlaps its focal set beyond R = {radius}")));
    }
    let (w_inf, approximate) = match &gs.profile {
        TransverseProfile::Delta { .. } => (0.0, true),
        TransverseProfile::Bounded(w) => (w.sup_norm(), false),
    };
    Ok(ThresholdBound {
        radius,
        bound: cm / cp * gs.e1 - (cp - cm) / cm * w_inf,
        c_plus: cp,
        c_minus: cm,
        approximate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transverse::{delta_ground_state, solve_ground_state, BoundedPotential};

    #[test]
    fn cutoff_shape() {
        let n = 5.0;
        assert_eq!(phi_n(n, 5.0), 0.0);
        assert!((phi_n(n, 25.0) - 1.0).abs() < 1e-15);
        assert_eq!(phi_n(n, 125.0), 0.0);
        assert!((phi_n(n, 5.0f64.powf(1.5)) - 0.5).abs() < 1e-14);
        let h = 1e-6;
        let s = 40.0;
        assert!(((phi_n(n, s + h) - phi_n(n, s - h)) / (2.0 * h) - phi_n_prime(n, s)).abs() < 1e-9);
    }

    #[test]
    fn log_integral_small_n() {
        let v = log_integral(3.0).unwrap();
        assert!((v - 2.0 / 3.0 * 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn plane_form_is_pure_kinetic() {
        // No curvature: only the longitudinal kinetic energy survives.
        let curve = ProfileCurve::plane();
        let gs = delta_ground_state(-2.0).unwrap();
        let c = CertConstants { delta: 0.0, c_sigma: 1.0 };
        let f = assemble_q(&curve, &gs, 10.0, 0.0, &c).unwrap();
        assert!(f.q2_eps0.abs() < 1e-8, "{}", f.q2_eps0);
        // Q1 = 2π ∫ φ'² s ds = 2π · 2/ln n.
        let expect = 4.0 * PI / 10f64.ln();
        assert!((f.q1 - expect).abs() < 1e-8 * expect, "{} vs {expect}", f.q1);
        assert!(f.total > 0.0);
    }

    #[test]
    fn plane_eps2_term_matches_log_integral() {
        // Flat case: ε² ∫ φ²/s² · ‖ξ‖² · r ds = ε² (2/3) ln n · 2π.
        let curve = ProfileCurve::plane();
        let gs = delta_ground_state(-2.0).unwrap();
        let c = CertConstants { delta: 0.0, c_sigma: 1.0 };
        let eps = 0.3;
        let f = assemble_q(&curve, &gs, 10.0, eps, &c).unwrap();
        let expect = eps * eps * 2.0 * PI * 2.0 / 3.0 * 10f64.ln();
        assert!((f.q2_eps2 - expect).abs() < 1e-8, "{} vs {expect}", f.q2_eps2);
        assert!(f.q2_eps1.abs() < 1e-8);
    }

    #[test]
    fn threshold_bound_rejects_thick_layers() {
        let curve = ProfileCurve::cap_cone(1.0, 1.0).unwrap();
        let w = BoundedPotential::square_well(1.0, 2.0).unwrap();
        let gs = solve_ground_state(&w, 40.0, 0.05).unwrap();
        assert!(matches!(essential_threshold_bound(&curve, &gs, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn certify_rejects_plane() {
        let gs = delta_ground_state(-2.0).unwrap();
        let r = certify(&ProfileCurve::plane(), &gs, &CertOptions::default());
        assert!(matches!(r, Err(Error::Hypothesis { .. })), "{r:?}");
    }
}
