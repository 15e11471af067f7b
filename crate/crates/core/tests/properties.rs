use proptest::prelude::*;
use pssts::closedform::{PhasePoint, Pssts};
use pssts::grid::GridSpec;
use pssts::polylib::{double_derivative_gaussian, factorial, legendre, legendre_scaled};
use pssts::states::{derive, derive_evolved, ChannelParams, StateParams};

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

fn state() -> impl Strategy<Value = StateParams> {
    (0.0f64..3.0, 0.0f64..1.5, 0u32..6)
        .prop_filter_map("vacuum cannot lose photons", |(n, r, m)| {
            StateParams::new(n, r, m).ok()
        })
}

fn point() -> impl Strategy<Value = PhasePoint> {
    (-4.0f64..4.0, -4.0f64..4.0).prop_map(|(q, p)| PhasePoint::from_qp(q, p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn derived_coefficients_are_consistent(n in 0.0f64..3.0, r in 0.0f64..1.5) {
        let c = derive(&StateParams::new(n, r, 0).unwrap());
        let w = 2.0 * n + 1.0;
        prop_assert_eq!(2.0 * c.tau1_sq, w * (2.0 * r).exp() + 1.0);
        prop_assert_eq!(2.0 * c.tau2_sq, w * (-2.0 * r).exp() + 1.0);
        prop_assert!(close(c.tau_product(), n * n + w * r.cosh().powi(2), 1e-12));
        if r > 0.0 {
            prop_assert!(c.pair_weight > 0.0 && c.cross_weight > 0.0);
        }
        let (b2, a2) = (c.cross_weight.powi(2), 4.0 * c.pair_weight.powi(2));
        prop_assert!((c.discriminant - (b2 - a2)).abs() <= 1e-12 * b2.max(a2).max(1e-300));
        let (b2, a2) = (c.pnd_cross.powi(2), 4.0 * c.pnd_pair.powi(2));
        prop_assert!((c.pnd_discriminant - (b2 - a2)).abs() <= 1e-12 * b2.max(a2).max(1e-300));
        prop_assert!(close(c.pnd_discriminant, c.discriminant / c.tau_product(), 1e-12) || c.discriminant == 0.0);
        prop_assert!(c.pnd_discriminant > -1.0 && c.pnd_discriminant <= 1.0);
        if c.pnd_discriminant > 0.0 {
            prop_assert!(c.pnd_cross / c.pnd_discriminant.sqrt() >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn discriminant_sign_boundary(n in 0.0f64..3.0, r in 0.0f64..1.5) {
        let c = derive(&StateParams::new(n, r, 0).unwrap());
        let margin = n * n - (2.0 * n + 1.0) * r.sinh().powi(2);
        if margin.abs() > 1e-9 {
            prop_assert_eq!(c.discriminant > 0.0, margin > 0.0);
        }
    }

    #[test]
    fn scaled_legendre_matches_classical(m in 0usize..=15, b in -3.0f64..3.0, d in 0.05f64..4.0) {
        let want = d.powf(m as f64 / 2.0) * legendre(m, b / d.sqrt());
        prop_assert!((legendre_scaled(m, b, d) - want).abs() <= 1e-10 * want.abs().max(1.0));
    }

    #[test]
    fn derivative_expansion_maps_to_scaled_legendre(n in 0.0f64..3.0, r in 0.0f64..1.5, m in 0usize..=12) {
        let c = derive(&StateParams::new(n, r, 0).unwrap());
        let lhs = double_derivative_gaussian(m, c.overlap_pair, c.overlap_cross);
        let rhs = factorial(m) * legendre_scaled(m, c.overlap_cross, c.overlap_discriminant);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1e-300), "{} vs {}", lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn husimi_is_non_negative(p in state(), pt in point()) {
        prop_assert!(Pssts::new(p).q_function(pt) >= -1e-15);
    }

    #[test]
    fn fidelity_lies_in_unit_interval(p in state()) {
        let f = Pssts::new(p).fidelity();
        prop_assert!(f > 0.0 && f <= 1.0 + 1e-12, "{}", f);
    }

    #[test]
    fn single_subtraction_origin_sign(n in 0.0f64..3.0, r in 0.0f64..1.5) {
        prop_assume!(n > 0.0 || r > 0.0);
        let p = StateParams::new(n, r, 1).unwrap();
        let s = Pssts::new(p);
        let w0 = s.wigner(PhasePoint::origin());
        let excess = n - r.sinh().powi(2);
        if excess.abs() > 1e-9 {
            prop_assert_eq!(w0 > 0.0, excess > 0.0);
        }
        prop_assert!(close(w0, s.wigner_single_subtracted(PhasePoint::origin()).unwrap(), 1e-9) || w0.abs() < 1e-12);
    }

    #[test]
    fn mandel_q_bounded_below(p in state()) {
        prop_assert!(Pssts::new(p).mandel_q() >= -1.0 - 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn photon_distribution_sums_and_mean(n in 0.0f64..1.0, r in 0.0f64..0.8, m in 0u32..4) {
        prop_assume!(n > 0.0 || r > 0.0 || m == 0);
        let s = Pssts::new(StateParams::new(n, r, m).unwrap());
        let table = s.pnd_table(400);
        prop_assert!(table.iter().all(|&v| v >= -1e-15));
        let total: f64 = table.iter().sum();
        let mean: f64 = table.iter().enumerate().map(|(k, v)| k as f64 * v).sum();
        prop_assert!((total - 1.0).abs() < 1e-9, "total {}", total);
        prop_assert!(close(mean, s.mean_photon(), 1e-9) || mean < 1e-12, "{} vs {}", mean, s.mean_photon());
    }

    #[test]
    fn evolved_coefficients_hit_both_limits(n in 0.0f64..2.0, r in 0.0f64..1.0, nth in 0.0f64..1.0) {
        let p = StateParams::new(n, r, 0).unwrap();
        let c = derive(&p);
        let early = derive_evolved(&p, &ChannelParams::new(1e-7, nth).unwrap()).unwrap();
        prop_assert!(early.gauss_det > 0.0);
        prop_assert!((early.envelope_norm - 1.0).abs() < 1e-5);
        prop_assert!((early.radial - 2.0 * c.wigner_diag).abs() < 1e-4 * c.wigner_diag);
        prop_assert!((early.cross - c.wigner_cross).abs() < 1e-5);
        prop_assert!((early.pair - c.wigner_pair / 4.0).abs() < 1e-5);
        let late = derive_evolved(&p, &ChannelParams::new(50.0, nth).unwrap()).unwrap();
        let ch2 = (2.0 * r).cosh();
        prop_assert!((late.cross - (n * ch2 + r.sinh().powi(2))).abs() < 1e-12 * ch2.max(1.0) * (n + 1.0));
        prop_assert!((late.pair - (2.0 * n + 1.0) * (2.0 * r).sinh() / 4.0).abs() < 1e-12 * (n + 1.0) * ch2);
        prop_assert!(late.omega_scale < 1e-20);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn wide_quadrature_is_half_and_husimi_one(n in 0.0f64..1.0, r in 0.0f64..0.8, m in 0u32..4) {
        prop_assume!(n > 0.0 || r > 0.0 || m == 0);
        let s = Pssts::new(StateParams::new(n, r, m).unwrap());
        let grid = GridSpec::square(20.0, 561).unwrap();
        let w = grid.evaluate(|pt| s.wigner(pt)).integral();
        let q = grid.evaluate(|pt| s.q_function(pt)).integral();
        prop_assert!((w - 0.5).abs() < 1e-6, "wigner {}", w);
        prop_assert!((q - 1.0).abs() < 1e-6, "husimi {}", q);
    }
}
