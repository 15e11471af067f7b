use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use pssts::closedform::{PhasePoint, Pssts};
use pssts::compare::{compare_evolved, compare_state, CompareOptions, Tolerance};
use pssts::fockoracle::{
    build_pssts, build_pssts_at, build_thermal, evolve_master, fidelity_oracle,
    gaussian_convolution_wf, observable_moments, trace_distance, wigner_displaced_parity,
    FockDensityMatrix, TruncationPolicy,
};
use pssts::grid::GridSpec;
use pssts::{ChannelParams, Error, StateParams};

fn params(n: f64, r: f64, m: u32) -> StateParams {
    StateParams::new(n, r, m).unwrap()
}

fn origin() -> C64 {
    C64::new(0.0, 0.0)
}

#[test]
fn thermal_tails() {
    let t = build_thermal(1.0, 64);
    assert_eq!(&t.diagonal()[..3], &[0.5, 0.25, 0.125]);
    assert!(t.trace_deficit < 1e-18);
    let short = build_thermal(2.0, 8);
    assert!((short.trace_deficit - (2.0f64 / 3.0).powi(8)).abs() < 1e-15);
}

#[test]
fn subtracted_distribution_matches_closed_form() {
    let p = params(0.5, 0.8, 2);
    let oracle = build_pssts(&p, &TruncationPolicy::default()).unwrap();
    let moments = observable_moments(&oracle.state);
    let closed = Pssts::new(p);
    for (n, got) in moments.pnd.iter().enumerate().take(60) {
        assert!((got - closed.pnd(n)).abs() < 1e-8, "n = {n}");
    }
}

#[test]
fn parity_readout_reference_values() {
    let vac = FockDensityMatrix::vacuum(16);
    assert!((wigner_displaced_parity(&vac, origin()).unwrap() - 1.0 / PI).abs() < 1e-14);
    let thermal = build_thermal(1.0, 80);
    assert!(
        (wigner_displaced_parity(&thermal, origin()).unwrap() - 1.0 / (3.0 * PI)).abs() < 1e-12
    );

    let p = params(0.1, 0.5, 1);
    let oracle = build_pssts(&p, &TruncationPolicy::default()).unwrap();
    let w = wigner_displaced_parity(&oracle.state, origin()).unwrap();
    assert!(w < 0.0);
    assert!((w - Pssts::new(p).wigner(PhasePoint::origin())).abs() < 1e-7 * w.abs());
}

#[test]
fn fidelity_against_matrices() {
    let (n, r) = (0.3f64, 0.6f64);
    let one = build_pssts(&params(n, r, 1), &TruncationPolicy::default()).unwrap();
    let want = n * (n + 1.0) * (2.0 * r).cosh()
        / ((2.0 * n + 1.0) * (r.sinh().powi(2) + n * (2.0 * r).cosh()));
    assert!((fidelity_oracle(&one).unwrap() - want).abs() < 1e-8);

    let p = params(0.2, 0.5, 3);
    let three = build_pssts(&p, &TruncationPolicy::default()).unwrap();
    let f = Pssts::new(p).fidelity();
    assert!((fidelity_oracle(&three).unwrap() - f).abs() < 1e-7 * f);
}

#[test]
fn doubling_the_dim_changes_nothing() {
    for p in [
        params(0.5, 0.5, 2),
        params(1.0, 0.3, 1),
        params(0.1, 0.0, 3),
    ] {
        let base = build_pssts(&p, &TruncationPolicy::default()).unwrap();
        let wide = build_pssts_at(&p, (2 * base.dim()).min(512)).unwrap();
        let (a, b) = (
            observable_moments(&base.state),
            observable_moments(&wide.state),
        );
        assert!((a.mean - b.mean).abs() < 1e-9);
        assert!((a.second_factorial - b.second_factorial).abs() < 1e-9);
        assert!((base.cm_estimate - wide.cm_estimate).abs() < 1e-9 * base.cm_estimate);
        for (x, y) in a.pnd.iter().zip(&b.pnd) {
            assert!((x - y).abs() < 1e-9);
        }
        let wa = wigner_displaced_parity(&base.state, C64::new(0.3, -0.2)).unwrap();
        let wb = wigner_displaced_parity(&wide.state, C64::new(0.3, -0.2)).unwrap();
        assert!((wa - wb).abs() < 1e-9);
    }
}

#[test]
fn constructed_states_are_physical() {
    for p in [
        params(0.0, 0.8, 3),
        params(2.0, 0.3, 2),
        params(1.0, 0.8, 1),
    ] {
        let o = build_pssts(&p, &TruncationPolicy::default()).unwrap();
        o.state.check_invariants().unwrap();
        o.squeezed_thermal.check_invariants().unwrap();
        assert!(o.state.purity() <= 1.0 + 1e-10);
    }
}

#[test]
fn hotter_states_agree_with_closed_form() {
    let opts = CompareOptions::default();
    for r in [0.0, 0.3] {
        for m in [0, 1, 2] {
            let report = compare_state(&params(2.0, r, m), &opts).unwrap();
            assert!(report.passed(), "{report:#?}");
        }
    }
    assert!(compare_state(&params(0.5, 0.5, 2), &opts).unwrap().passed());
}

#[test]
fn tiny_max_dim_is_reported() {
    let opts = CompareOptions {
        policy: TruncationPolicy {
            initial_dim: 8,
            max_dim: 16,
            ..Default::default()
        },
        ..Default::default()
    };
    match compare_state(&params(1.0, 0.8, 3), &opts) {
        Err(Error::MaxDimExceeded { trace }) => assert!(trace.iter().all(|(d, _)| *d <= 16)),
        other => panic!("expected MaxDimExceeded, got {other:?}"),
    }
}

#[test]
fn loss_channel_empties_and_hot_bath_thermalizes() {
    let o = build_pssts(&params(0.05, 0.3, 1), &TruncationPolicy::default()).unwrap();
    let cold = evolve_master(&o.state, 0.0, 50.0, None).unwrap();
    let vac = FockDensityMatrix::vacuum(cold.state.dim());
    assert!(trace_distance(&cold.state, &vac) < 1e-6);

    let hot = evolve_master(&o.state, 0.5, 20.0, None).unwrap();
    let bath = build_thermal(0.5, hot.state.dim());
    for (got, want) in hot.state.diagonal().iter().zip(bath.diagonal()) {
        assert!((got - want).abs() < 1e-6);
    }
    assert!((observable_moments(&hot.state).mean - 0.5).abs() < 1e-6);
}

#[test]
fn evolved_values_from_three_routes() {
    let p = params(0.05, 0.3, 1);
    let oracle = build_pssts(&p, &TruncationPolicy::default()).unwrap();
    let channel = ChannelParams::new(0.1, 0.0).unwrap();
    let probes = [
        PhasePoint::origin(),
        PhasePoint::from_qp(0.5, -0.7).unwrap(),
    ];
    let check = compare_evolved(&p, &channel, &probes, &oracle, Tolerance::ORACLE).unwrap();
    assert!(check.passed, "{check:?}");

    let closed = Pssts::new(p);
    let initial = GridSpec::square(8.0, 281)
        .unwrap()
        .evaluate(|pt| closed.wigner(pt));
    let conv = gaussian_convolution_wf(&initial, &channel, PhasePoint::origin()).unwrap();
    let formula = closed
        .wigner_evolved(&channel, PhasePoint::origin())
        .unwrap();
    assert!(formula < 0.0);
    assert!((conv - formula).abs() < 1e-4);
}

#[test]
fn narrow_grid_is_rejected_for_convolution() {
    let closed = Pssts::new(params(0.5, 0.5, 2));
    let initial = GridSpec::square(1.5, 41)
        .unwrap()
        .evaluate(|pt| closed.wigner(pt));
    let channel = ChannelParams::new(0.3, 0.0).unwrap();
    assert!(matches!(
        gaussian_convolution_wf(&initial, &channel, PhasePoint::origin()),
        Err(Error::GridTooSmall { .. })
    ));
}
