//! Linear-fit analysis of Rabi frequency data.
//!
//! Stage 1 fits `Ω²` against `g²` for each detuning; its slope is the
//! effective coupling scale `s(Δ)`. Stage 2 fits those slopes against `Δ`,
//! giving the gradient `k²/(2α)` in ns.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::analytic::rabi_exact;
use crate::error::{require_finite, Error, Result};
use crate::hamiltonian::ThreeLevelParams;

pub const MAX_NOISE_REL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RabiSample {
    /// GHz.
    pub g: f64,
    /// GHz.
    pub delta: f64,
    /// GHz.
    pub omega: f64,
    /// One-sigma uncertainty of `omega`, GHz.
    pub sigma_omega: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RabiDataset {
    pub rows: Vec<RabiSample>,
}

impl RabiDataset {
    pub fn new(rows: Vec<RabiSample>) -> Result<Self> {
        for row in &rows {
            require_finite("g", row.g)?;
            require_finite("delta", row.delta)?;
            require_finite("omega", row.omega)?;
            require_finite("sigma_omega", row.sigma_omega)?;
            if row.g < 0.0 {
                return Err(Error::InvalidParameter {
                    name: "g",
                    value: row.g,
                    reason: "must be non-negative",
                });
            }
            if row.sigma_omega < 0.0 {
                return Err(Error::InvalidParameter {
                    name: "sigma_omega",
                    value: row.sigma_omega,
                    reason: "must be non-negative",
                });
            }
        }
        Ok(Self { rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub intercept_stderr: f64,
    pub residual_rms: f64,
}

/// Exact Rabi frequencies with multiplicative Gaussian noise.
///
/// Each `omega` is `rabi_exact · (1 + ε)` with `ε ~ N(0, noise_rel)` drawn
/// from a ChaCha8 stream seeded by `seed`, and `sigma_omega = noise_rel · omega`.
pub fn synth_dataset(
    params_grid: &[ThreeLevelParams],
    noise_rel: f64,
    seed: u64,
) -> Result<RabiDataset> {
    require_finite("noise_rel", noise_rel)?;
    if !(0.0..=MAX_NOISE_REL).contains(&noise_rel) {
        return Err(Error::InvalidParameter {
            name: "noise_rel",
            value: noise_rel,
            reason: "must lie in [0, 0.05]",
        });
    }
    let normal = Normal::new(0.0, noise_rel).expect("finite non-negative deviation");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(params_grid.len());
    for params in params_grid {
        let exact = rabi_exact(params)?.omega;
        let omega = exact * (1.0 + normal.sample(&mut rng));
        rows.push(RabiSample {
            g: params.g,
            delta: params.delta,
            omega,
            sigma_omega: noise_rel * omega,
        });
    }
    Ok(RabiDataset { rows })
}

/// Straight-line least squares minimizing `Σ((y - a x - b)/σ)²`.
///
/// With all `sigma_y` zero the fit is unweighted and the standard errors are
/// scaled by the residual variance. With all `sigma_y` positive they are
/// taken as absolute uncertainties.
pub fn fit_linear(x: &[f64], y: &[f64], sigma_y: &[f64]) -> Result<FitResult> {
    let n = x.len();
    if y.len() != n || sigma_y.len() != n {
        return Err(Error::InsufficientData(format!(
            "length mismatch: {} x, {} y, {} sigma",
            n,
            y.len(),
            sigma_y.len()
        )));
    }
    if n < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 points, got {n}"
        )));
    }
    for i in 0..n {
        require_finite("x", x[i])?;
        require_finite("y", y[i])?;
        require_finite("sigma_y", sigma_y[i])?;
    }
    let weighted = if sigma_y.iter().all(|&s| s == 0.0) {
        false
    } else if sigma_y.iter().all(|&s| s > 0.0) {
        true
    } else {
        return Err(Error::InvalidParameter {
            name: "sigma_y",
            value: sigma_y.iter().copied().fold(f64::INFINITY, f64::min),
            reason: "must be all positive or all zero",
        });
    };
    let w: Vec<f64> = if weighted {
        sigma_y.iter().map(|s| 1.0 / (s * s)).collect()
    } else {
        vec![1.0; n]
    };

    let sw: f64 = w.iter().sum();
    let xm = w.iter().zip(x).map(|(w, x)| w * x).sum::<f64>() / sw;
    let ym = w.iter().zip(y).map(|(w, y)| w * y).sum::<f64>() / sw;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut sx2 = 0.0;
    for i in 0..n {
        let dx = x[i] - xm;
        sxx += w[i] * dx * dx;
        sxy += w[i] * dx * (y[i] - ym);
        sx2 += w[i] * x[i] * x[i];
    }
    if !(sxx > 1e-24 * sx2) || sxx == 0.0 {
        return Err(Error::SingularFit(
            "x values have zero variance".to_string(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;

    let residuals: Vec<f64> = (0..n).map(|i| y[i] - slope * x[i] - intercept).collect();
    let residual_rms = (residuals.iter().map(|r| r * r).sum::<f64>() / n as f64).sqrt();
    let scale = if weighted {
        1.0
    } else {
        residuals.iter().map(|r| r * r).sum::<f64>() / (n - 2) as f64
    };
    Ok(FitResult {
        slope,
        intercept,
        slope_stderr: (scale / sxx).sqrt(),
        intercept_stderr: (scale * (1.0 / sw + xm * xm / sxx)).sqrt(),
        residual_rms,
    })
}

/// Splits a dataset by exact detuning value, in order of first appearance.
pub fn group_by_detuning(dataset: &RabiDataset) -> Vec<(f64, RabiDataset)> {
    let mut groups: Vec<(f64, RabiDataset)> = Vec::new();
    for row in &dataset.rows {
        match groups.iter_mut().find(|(d, _)| d.to_bits() == row.delta.to_bits()) {
            Some((_, set)) => set.rows.push(*row),
            None => groups.push((row.delta, RabiDataset { rows: vec![*row] })),
        }
    }
    groups
}

/// Stage-1 `Ω²` vs `g²` fit for one detuning.
pub fn fit_omega_squared(dataset: &RabiDataset) -> Result<FitResult> {
    let x: Vec<f64> = dataset.rows.iter().map(|r| r.g * r.g).collect();
    let y: Vec<f64> = dataset.rows.iter().map(|r| r.omega * r.omega).collect();
    let sigma: Vec<f64> = dataset
        .rows
        .iter()
        .map(|r| 2.0 * r.omega.abs() * r.sigma_omega)
        .collect();
    fit_linear(&x, &y, &sigma)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetuningFit {
    /// GHz.
    pub delta: f64,
    pub fit: FitResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeAnalysis {
    pub per_detuning: Vec<DetuningFit>,
    /// Slope in ns estimates `k²/(2α)`; intercept estimates 1.
    pub gradient: FitResult,
}

pub fn slope_vs_detuning(datasets: &[(f64, RabiDataset)]) -> Result<SlopeAnalysis> {
    let mut distinct: Vec<f64> = datasets.iter().map(|(d, _)| *d).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() != datasets.len() {
        return Err(Error::InsufficientData(
            "detunings must be distinct".to_string(),
        ));
    }
    if datasets.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 detunings, got {}",
            datasets.len()
        )));
    }
    let mut per_detuning = Vec::with_capacity(datasets.len());
    for (delta, set) in datasets {
        require_finite("delta", *delta)?;
        if set.len() < 3 {
            return Err(Error::InsufficientData(format!(
                "detuning {delta} has {} amplitudes, need at least 3",
                set.len()
            )));
        }
        per_detuning.push(DetuningFit {
            delta: *delta,
            fit: fit_omega_squared(set)?,
        });
    }
    let weighted = datasets
        .iter()
        .all(|(_, set)| set.rows.iter().all(|r| r.sigma_omega > 0.0));
    let x: Vec<f64> = per_detuning.iter().map(|p| p.delta).collect();
    let y: Vec<f64> = per_detuning.iter().map(|p| p.fit.slope).collect();
    let sigma: Vec<f64> = if weighted {
        per_detuning.iter().map(|p| p.fit.slope_stderr).collect()
    } else {
        vec![0.0; x.len()]
    };
    let gradient = fit_linear(&x, &y, &sigma)?;
    Ok(SlopeAnalysis {
        per_detuning,
        gradient,
    })
}

/// Parameter grid over amplitudes and detunings at fixed `alpha` and `k`.
pub fn params_grid(
    amplitudes: &[f64],
    detunings: &[f64],
    alpha: f64,
    k: f64,
) -> Result<Vec<ThreeLevelParams>> {
    let mut grid = Vec::with_capacity(amplitudes.len() * detunings.len());
    for &delta in detunings {
        for &g in amplitudes {
            grid.push(ThreeLevelParams::new(g, delta, alpha, k)?);
        }
    }
    Ok(grid)
}
