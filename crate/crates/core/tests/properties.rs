use std::f64::consts::PI;

use nalgebra::{Matrix3, SymmetricEigen};
use proptest::prelude::*;
use rustfft::{num_complex::Complex64, FftPlanner};

use rabi_core::analytic::{
    eigenvalue_gaps, rabi_exact, slope, solve, stark_shift, verify_cubic_identity,
};
use rabi_core::dynamics::{evolve, Propagator, two_level_amplitude, uniform_times, StateVector, TimeSeries};
use rabi_core::fitting::{
    fit_omega_squared, group_by_detuning, params_grid, slope_vs_detuning, synth_dataset,
};
use rabi_core::fluxonium::{solve_spectrum, FluxoniumParams, SolverGrid};
use rabi_core::gate::{evaluate_gate, gate_config, sweep_anharmonicity, wrap_phase, Correction};
use rabi_core::{build_hamiltonian, ThreeLevelParams};

fn alpha_strategy() -> impl Strategy<Value = f64> {
    (0.2f64..2.0, any::<bool>()).prop_map(|(a, neg)| if neg { -a } else { a })
}

/// Parameters with `|g/alpha|` and `|delta/alpha|` up to `ratio`.
fn params_strategy(ratio: f64) -> impl Strategy<Value = ThreeLevelParams> {
    (alpha_strategy(), 0.0..ratio, -ratio..ratio, 0.0f64..3.0).prop_map(|(alpha, gr, dr, k)| {
        ThreeLevelParams::new(gr * alpha.abs(), dr * alpha.abs(), alpha, k).unwrap()
    })
}

fn oracle_gaps(p: &ThreeLevelParams) -> [f64; 3] {
    let ThreeLevelParams { g, delta, alpha, k } = *p;
    #[rustfmt::skip]
    let m = Matrix3::new(
        0.0,     g / 2.0,     0.0,
        g / 2.0, -delta,      k * g / 2.0,
        0.0,     k * g / 2.0, alpha - 2.0 * delta,
    );
    let mut e: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    let mut gaps = [e[1] - e[0], e[2] - e[1], e[2] - e[0]];
    gaps.sort_by(f64::total_cmp);
    gaps
}

fn sorted(mut v: [f64; 3]) -> [f64; 3] {
    v.sort_by(f64::total_cmp);
    v
}

proptest! {
    #[test]
    fn hamiltonian_structure(p in params_strategy(0.5)) {
        let h = build_hamiltonian(&p).unwrap();
        prop_assert!(h.is_hermitian());
        prop_assert!((h.trace() - (-3.0 * p.delta + p.alpha)).abs() <= 1e-12 * (1.0 + p.alpha.abs()));
        prop_assert_eq!(h.entry(0, 2).norm(), 0.0);
        for i in 0..3 {
            for j in 0..3 {
                prop_assert_eq!(h.entry(i, j).im, 0.0);
            }
        }
    }

    #[test]
    fn gaps_are_consistent(p in params_strategy(0.2)) {
        let gaps = sorted(eigenvalue_gaps(&p).unwrap());
        prop_assert!(gaps[0] >= 0.0);
        prop_assert!((gaps[2] - gaps[0] - gaps[1]).abs() <= 1e-12 * gaps[2].max(1e-300));
        let oracle = oracle_gaps(&p);
        for i in 0..3 {
            prop_assert!((gaps[i] - oracle[i]).abs() <= 1e-9 * p.alpha.abs().max(1.0));
            prop_assert!(verify_cubic_identity(&p, gaps[i]).unwrap() < 1e-8);
        }
    }

    #[test]
    fn exact_root_is_a_gap(p in params_strategy(0.2)) {
        let sol = solve(&p).unwrap();
        prop_assert!(sol.omega_gaps.iter().any(|g| (g - sol.omega_exact).abs() < 1e-9));
    }

    #[test]
    fn exact_root_tracks_dressed_pair(p in params_strategy(0.2)) {
        let exact = rabi_exact(&p).unwrap();
        prop_assume!(exact.branch_valid);
        let dressed = Propagator::new(&p).unwrap().dressed_01_gap();
        prop_assert!((exact.omega - dressed).abs() <= 1e-9 * p.alpha.abs().max(1.0));
    }

    #[test]
    fn weak_drive_error_bound(p in params_strategy(0.05)) {
        let sol = solve(&p).unwrap();
        prop_assume!(sol.branch_valid);
        let ThreeLevelParams { g, delta, alpha, k } = p;
        let err = (sol.omega_exact.powi(2) - sol.omega_approx.powi(2)).abs();
        let bound = (1.0 + k * k).powi(2) * g * g * (g * g + delta * delta) / (alpha * alpha);
        prop_assert!(err <= bound + 1e-15, "err {err:e} bound {bound:e}");
    }

    #[test]
    fn small_drive_slope(
        alpha in alpha_strategy(),
        dr in -0.05f64..0.05,
        k in 0.0f64..3.0,
    ) {
        let delta = dr * alpha.abs();
        let g = 1e-4 * alpha.abs();
        let p = ThreeLevelParams::new(g, delta, alpha, k).unwrap();
        let fd = (rabi_exact(&p).unwrap().omega.powi(2) - delta * delta) / (g * g);
        let limit = 1.0 + k * k * delta / (2.0 * (alpha - delta));
        prop_assert!((fd - limit).abs() < 1e-6, "fd {fd} limit {limit}");
        let r = delta / alpha;
        let second_order = 0.5 * k * k * r * r / (1.0 - r);
        prop_assert!((fd - slope(&p).unwrap()).abs() <= second_order * 1.01 + 1e-6);
    }

    #[test]
    fn stark_identity(p in params_strategy(0.2)) {
        let lhs = 0.5 * p.k * p.k * (p.delta / p.alpha) * p.g * p.g;
        let rhs = 2.0 * p.delta * stark_shift(&p).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-14 * lhs.abs().max(1e-300));
    }

    #[test]
    fn evolution_is_unitary(p in params_strategy(0.2)) {
        let omega = rabi_exact(&p).unwrap().omega;
        prop_assume!(omega > 1e-4);
        let t = 1e4 / omega;
        let s = evolve(&p, &StateVector::basis(0), &[0.0, t]).unwrap();
        prop_assert!((s.values()[1].norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn two_level_limit(
        g in 0.001f64..0.05,
        delta in -0.05f64..0.05,
        alpha in alpha_strategy(),
        t in 0.0f64..500.0,
    ) {
        let p = ThreeLevelParams::new(g, delta, alpha, 0.0).unwrap();
        let s = evolve(&p, &StateVector::basis(0), &[t]).unwrap();
        let a0 = two_level_amplitude(delta, delta.hypot(g), t).unwrap();
        prop_assert!((s.values()[0].amplitude(0).norm() - a0.norm()).abs() < 1e-10);
    }

    #[test]
    fn gate_closure(delta in 1e-4f64..0.05, alpha in alpha_strategy(), k in 0.0f64..3.0) {
        for (k, mode) in [(k, Correction::None), (0.0, Correction::Approx), (0.0, Correction::Exact)] {
            let r = evaluate_gate(&gate_config(delta, alpha, k).unwrap(), mode).unwrap();
            prop_assert!(r.leakage_max < 1e-12);
            prop_assert!(wrap_phase(r.conditional_phase - PI).abs() < 1e-9);
        }
    }

    #[test]
    fn gate_sign_symmetry(delta in 1e-3f64..0.05, mult in 20.0f64..100.0, k in 0.5f64..3.0) {
        let alpha = mult * delta;
        let lead = |a: f64| {
            let r = evaluate_gate(&gate_config(delta, a, k).unwrap(), Correction::Approx).unwrap();
            wrap_phase(r.conditional_phase - PI)
        };
        prop_assert!(lead(alpha) * lead(-alpha) < 0.0);
    }

    #[test]
    fn synthesis_is_deterministic(seed in any::<u64>(), noise in 0.0f64..0.05) {
        let grid = params_grid(&[0.004, 0.008, 0.012], &[-0.01, 0.0, 0.01], 1.335, 2.44).unwrap();
        let a = synth_dataset(&grid, noise, seed).unwrap();
        let b = synth_dataset(&grid, noise, seed).unwrap();
        prop_assert_eq!(&a, &b);
        let fa = slope_vs_detuning(&group_by_detuning(&a)).unwrap();
        let fb = slope_vs_detuning(&group_by_detuning(&b)).unwrap();
        prop_assert_eq!(fa, fb);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn fluxonium_flux_symmetries(
        flux in -1.0f64..1.0,
        ec in 0.8f64..1.3,
        el in 0.5f64..1.5,
        ej in 2.0f64..5.0,
    ) {
        let grid = SolverGrid::default();
        let base = solve_spectrum(&FluxoniumParams::new(ec, el, ej, flux).unwrap(), &grid, 4).unwrap();
        let shifted = solve_spectrum(&FluxoniumParams::new(ec, el, ej, flux + 1.0).unwrap(), &grid, 4).unwrap();
        let mirrored = solve_spectrum(&FluxoniumParams::new(ec, el, ej, -flux).unwrap(), &grid, 4).unwrap();
        for i in 0..4 {
            prop_assert!((base.levels[i] - shifted.levels[i]).abs() < 1e-10);
            prop_assert!((base.levels[i] - mirrored.levels[i]).abs() < 1e-10);
        }
    }
}

/// Every local spectral maximum of `P1(t)` above 5% of the largest sits on
/// an eigenvalue gap.
#[test]
fn population_spectrum_matches_gaps() {
    let cases = [
        (0.02, 0.01, -0.3, 1.3),
        (0.05, -0.02, 0.4, 2.0),
        (0.03, 0.0, -0.25, 2.5),
    ];
    for (g, delta, alpha, k) in cases {
        let p = ThreeLevelParams::new(g, delta, alpha, k).unwrap();
        let gaps = eigenvalue_gaps(&p).unwrap();
        let fmax = gaps.iter().copied().fold(0.0, f64::max);
        let dt = 1.0 / (8.0 * fmax);
        let n = 1 << 16;
        let series = evolve(&p, &StateVector::basis(0), &uniform_times(0.0, dt, n))
            .unwrap()
            .populations(1);
        let mean = series.values().iter().sum::<f64>() / n as f64;
        let mut buf: Vec<Complex64> = series
            .values()
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let w = 0.5 - 0.5 * (2.0 * PI * i as f64 / (n - 1) as f64).cos();
                Complex64::new((v - mean) * w, 0.0)
            })
            .collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let mags: Vec<f64> = buf[..n / 2].iter().map(|c| c.norm()).collect();
        let top = mags[3..].iter().copied().fold(0.0, f64::max);
        let resolution = 2.0 / (n as f64 * dt);
        let mut peaks = 0;
        for i in 3..mags.len() - 1 {
            if mags[i] > mags[i - 1] && mags[i] >= mags[i + 1] && mags[i] > 0.05 * top {
                let f = i as f64 / (n as f64 * dt);
                assert!(
                    gaps.iter().any(|gap| (gap - f).abs() <= resolution),
                    "peak at {f} GHz not on a gap {gaps:?}"
                );
                peaks += 1;
            }
        }
        assert!(peaks >= 1);
    }
}

#[test]
fn estimator_consistency() {
    let (alpha, k) = (1.335, 2.44);
    let amplitudes: Vec<f64> = (1..=10).map(|i| 0.002 * i as f64).collect();
    let detunings: Vec<f64> = (-3..=3).map(|i| 0.01 * i as f64).collect();
    let grid = params_grid(&amplitudes, &detunings, alpha, k).unwrap();
    let theory = 0.5 * k * k / alpha;
    let seeds = 100;
    let mut slope_sum = 0.0;
    let mut var_sum = 0.0;
    let mut covered = 0;
    for seed in 0..seeds as u64 {
        let set = synth_dataset(&grid, 0.01, seed).unwrap();
        let fit = slope_vs_detuning(&group_by_detuning(&set)).unwrap().gradient;
        slope_sum += fit.slope;
        var_sum += fit.slope_stderr.powi(2);
        if (fit.slope - theory).abs() <= fit.slope_stderr {
            covered += 1;
        }
    }
    let mean = slope_sum / seeds as f64;
    let combined_stderr = (var_sum / seeds as f64).sqrt();
    assert!(
        (mean - theory).abs() <= combined_stderr,
        "mean {mean} theory {theory} stderr {combined_stderr}"
    );
    // One-sigma intervals should cover the truth about 68% of the time.
    assert!((55..=80).contains(&covered), "coverage {covered}/100");
}

#[test]
fn stage_one_intercept_identity() {
    let amplitudes: Vec<f64> = (1..=10).map(|i| 0.002 * i as f64).collect();
    let gmax: f64 = 0.02;
    for (alpha, k) in [(1.335, 2.44), (-0.403, 1.35), (-0.55, 1.29)] {
        for delta in [-0.03, -0.01, 0.0, 0.02, 0.03] {
            let grid = params_grid(&amplitudes, &[delta], alpha, k).unwrap();
            let fit = fit_omega_squared(&synth_dataset(&grid, 0.0, 0).unwrap()).unwrap();
            let bound = (1.0 + k * k).powi(2) * gmax.powi(2) * (gmax.powi(2) + delta * delta)
                / (alpha * alpha);
            assert!(
                (fit.intercept - delta * delta).abs() <= bound,
                "alpha {alpha} delta {delta}: {} vs {}",
                fit.intercept,
                delta * delta
            );
        }
    }
}

#[test]
fn sweep_is_monotone_beyond_threshold() {
    for sign in [-1.0, 1.0] {
        let alphas: Vec<f64> = (0..50).map(|i| sign * (0.3 + 0.05 * i as f64)).collect();
        let pts = sweep_anharmonicity(0.014, 1.29, &alphas, Correction::Approx).unwrap();
        for w in pts.windows(2) {
            assert!(w[1].phase_error < w[0].phase_error, "{w:?}");
        }
    }
}

#[test]
fn time_series_requires_uniform_grid() {
    assert!(TimeSeries::new(vec![0.0, 1.0, 3.0], vec![0.0; 3]).is_err());
    assert!(TimeSeries::new(vec![0.0, 1.0, 2.0], vec![0.0; 3]).is_ok());
}
