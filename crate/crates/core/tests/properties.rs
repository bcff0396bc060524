//! Randomized invariants.

use proptest::prelude::*;

use softlayer::geometry::{curvatures, jacobi_residual, jacobian};
use softlayer::profiles::ProfileCurve;
use softlayer::spectral::sparse::Csr;
use softlayer::spectral::{assemble_pencil, build_grid, lowest_eigenpairs, GridOptions, SolverOptions};
use softlayer::spline::CubicSpline;
use softlayer::transverse::{delta_ground_state, discrete_ground_state, tridiagonal_lowest, TransverseProfile};
use softlayer::variational::{phi_n, phi_n_prime};

fn curve(kind: u8, p: f64) -> ProfileCurve {
    match kind % 3 {
        0 => ProfileCurve::cap_cone(0.5 + p, 0.2 + 2.5 * p / 3.0).unwrap(),
        1 => ProfileCurve::paraboloid(0.1 + p).unwrap(),
        _ => ProfileCurve::plane(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn closed_forms_are_unit_speed(kind in 0u8..3, p in 0.0f64..3.0, s in 0.0f64..200.0) {
        let c = curve(kind, p);
        prop_assert!(c.eval(s).unwrap().speed_defect() <= 1e-9);
    }

    #[test]
    fn jacobi_equation_holds(kind in 0u8..3, p in 0.0f64..3.0, s in 0.01f64..200.0) {
        let c = curve(kind, p);
        prop_assume!(c.junctions().iter().all(|&j| (s - j).abs() > 1e-6));
        prop_assert!(jacobi_residual(&c, s).unwrap().abs() <= 1e-8);
    }

    #[test]
    fn gauss_curvature_is_product(kind in 0u8..3, p in 0.0f64..3.0, s in 0.0f64..200.0) {
        let k = curvatures(&curve(kind, p), s).unwrap();
        prop_assert!((k.gauss - k.k1 * k.k2).abs() <= 1e-15 * (1.0 + k.gauss.abs()));
        prop_assert!((jacobian(k.k1, k.k2, 0.0) - 1.0).abs() == 0.0);
    }

    #[test]
    fn spline_reproduces_cubics(c in prop::array::uniform4(-2.0f64..2.0), x in 0.0f64..3.0) {
        let f = |t: f64| c[0] + t * (c[1] + t * (c[2] + t * c[3]));
        let xs: Vec<f64> = (0..12).map(|i| 3.0 * (i as f64 / 11.0).powf(1.3)).collect();
        let ys: Vec<f64> = xs.iter().map(|&t| f(t)).collect();
        let sp = CubicSpline::not_a_knot(&xs, &ys).unwrap();
        prop_assert!((sp.eval(x) - f(x)).abs() <= 1e-11);
    }

    #[test]
    fn tridiagonal_lowest_is_below_every_rayleigh_quotient(
        d in prop::collection::vec(-3.0f64..3.0, 6),
        e in prop::collection::vec(-1.0f64..1.0, 5),
        v in prop::collection::vec(-1.0f64..1.0, 6),
    ) {
        let (lam, x) = tridiagonal_lowest(&d, &e).unwrap();
        let q = |v: &[f64]| {
            let mut num = 0.0;
            for i in 0..6 {
                num += d[i] * v[i] * v[i];
                if i < 5 {
                    num += 2.0 * e[i] * v[i] * v[i + 1];
                }
            }
            num / v.iter().map(|a| a * a).sum::<f64>()
        };
        prop_assume!(v.iter().any(|a| a.abs() > 1e-3));
        prop_assert!(lam <= q(&v) + 1e-12);
        prop_assert!((q(&x) - lam).abs() <= 1e-12);
    }

    #[test]
    fn sparse_product_matches_dense(
        a in prop::collection::vec((0usize..5, 0usize..4, -1.0f64..1.0), 0..15),
        b in prop::collection::vec((0usize..4, 0usize..3, -1.0f64..1.0), 0..10),
    ) {
        let sa = Csr::from_triplets(5, 4, &a).unwrap();
        let sb = Csr::from_triplets(4, 3, &b).unwrap();
        let p = sa.matmul(&sb).unwrap();
        for i in 0..5 {
            for j in 0..3 {
                let dense: f64 = (0..4).map(|k| sa.get(i, k) * sb.get(k, j)).sum();
                prop_assert!((p.get(i, j) - dense).abs() <= 1e-14);
            }
        }
        prop_assert_eq!(p.transpose().transpose(), p);
    }

    #[test]
    fn trial_cutoff_is_continuous(n in 2.0f64..50.0, u in 0.0f64..1.0) {
        let s = n * (n * n).powf(u);
        let h = 1e-7 * s;
        let fd = (phi_n(n, s + h) - phi_n(n, s - h)) / (2.0 * h);
        prop_assume!(((s / (n * n)).ln()).abs() > 1e-5);
        prop_assert!((fd - phi_n_prime(n, s)).abs() <= 1e-5 * phi_n_prime(n, s).abs().max(1e-12));
        prop_assert!((0.0..=1.0).contains(&phi_n(n, s)));
    }

    #[test]
    fn discrete_delta_threshold_sits_above_continuum(alpha in -4.0f64..-0.5, k in 2usize..6) {
        let h = 1.0 / (10 * k) as f64;
        let (e, xi) = discrete_ground_state(&TransverseProfile::delta(alpha), 12.0, h).unwrap();
        let exact = delta_ground_state(alpha).unwrap().e1;
        prop_assert!(e > exact);
        prop_assert!(e - exact < 0.02 * exact.abs());
        prop_assert!((h * xi.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn pencils_are_symmetric_and_dirichlet_monotone(theta in 0.3f64..2.8, m in 0u32..3) {
        let c = ProfileCurve::cap_cone(1.0, theta).unwrap();
        let prof = TransverseProfile::delta(-2.0);
        let o = SolverOptions { k: 1, ..Default::default() };
        let mut last = f64::INFINITY;
        for s_end in [3.0, 6.0] {
            let g = build_grid(&c, 0.0, s_end, 3.0, 0.1, 0.1, GridOptions::default()).unwrap();
            let p = assemble_pencil(&g, m, &prof).unwrap();
            prop_assert!(p.a.is_symmetric());
            let l = lowest_eigenpairs(&p, -1.0, &o).unwrap().eigenvalues[0];
            prop_assert!(l <= last + 1e-8);
            last = l;
        }
    }
}
