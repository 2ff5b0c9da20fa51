//! Shared inputs for the benchmarks.

use rabi_core::fluxonium::FluxoniumParams;
use rabi_core::ThreeLevelParams;

/// Gate-relevant operating point of the driven coupler.
pub fn gate_point() -> ThreeLevelParams {
    ThreeLevelParams::new(0.018074, -0.014, -0.55, 1.29).expect("valid parameters")
}

/// Deterministic spread of points inside the weak-drive regime.
pub fn regime_grid(n: usize) -> Vec<ThreeLevelParams> {
    (0..n)
        .map(|i| {
            let t = i as f64 / n.max(1) as f64;
            let alpha = if i % 2 == 0 { 0.3 + 1.5 * t } else { -0.3 - 1.5 * t };
            let g = 0.15 * alpha.abs() * (0.1 + 0.9 * ((7 * i) % n.max(1)) as f64 / n.max(1) as f64);
            let delta = 0.15 * alpha.abs() * (2.0 * ((11 * i) % n.max(1)) as f64 / n.max(1) as f64 - 1.0);
            ThreeLevelParams::new(g, delta, alpha, 0.5 + 2.5 * t).expect("valid parameters")
        })
        .collect()
}

/// Low-frequency device at half flux.
pub fn device_a() -> FluxoniumParams {
    FluxoniumParams::new(0.49, 1.74, 3.56, 0.5).expect("valid parameters")
}

/// High-frequency device at zero flux.
pub fn device_b() -> FluxoniumParams {
    FluxoniumParams::new(0.5, 2.11, 4.29, 0.0).expect("valid parameters")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_stays_in_regime() {
        let grid = regime_grid(64);
        assert_eq!(grid.len(), 64);
        assert!(grid.iter().all(|p| p.in_validated_regime()));
    }
}
