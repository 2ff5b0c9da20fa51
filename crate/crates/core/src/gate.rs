//! Coherent-error model of the microwave-activated CZ gate.
//!
//! The coupler 0-1 transition is shifted by the state of the two qubits. The
//! drive sits midway between the `00` line and the (degenerate) single
//! excitation lines, so the four computational states see the detunings
//! `+Δ, -Δ, -Δ, -3Δ`. With `g = sqrt(5/3) Δ` and `τ = sqrt(3/2) / (2Δ)` the
//! two-level Rabi rotations are `2π` for `00/01/10` and `4π` for `11`, which
//! is an exact CZ. Third-level coupling shifts the Rabi frequencies and
//! leaves residual leakage and conditional-phase error.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::{rabi_approx, rabi_exact};
use crate::dynamics::{two_level_amplitude, Propagator};
use crate::error::{require_finite, Error, Result};
use crate::hamiltonian::ThreeLevelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ComputationalState {
    #[serde(rename = "00")]
    S00,
    #[serde(rename = "01")]
    S01,
    #[serde(rename = "10")]
    S10,
    #[serde(rename = "11")]
    S11,
}

impl ComputationalState {
    pub const ALL: [Self; 4] = [Self::S00, Self::S01, Self::S10, Self::S11];

    pub fn label(self) -> &'static str {
        match self {
            Self::S00 => "00",
            Self::S01 => "01",
            Self::S10 => "10",
            Self::S11 => "11",
        }
    }

    /// Coupler detuning seen by this state, in units of the base detuning.
    fn detuning_multiple(self) -> f64 {
        match self {
            Self::S00 => 1.0,
            Self::S01 | Self::S10 => -1.0,
            Self::S11 => -3.0,
        }
    }
}

/// How each state's Rabi frequency is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Correction {
    /// Two-level `sqrt(Δ² + g²)`, the ideal-gate baseline.
    None,
    /// Weak-drive formula including the third-level slope correction.
    Approx,
    /// Exact root of the three-level cubic. Where the radical root lands on
    /// another gap (large `|Δ/α|` for the `11` state) the 0-1 gap is picked
    /// from the eigenvectors instead.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateConfig {
    /// Base detuning, GHz.
    pub delta: f64,
    /// Coupler anharmonicity, GHz.
    pub alpha: f64,
    pub k: f64,
    /// Drive amplitude `sqrt(5/3) Δ`, GHz.
    pub g: f64,
    /// Gate duration `sqrt(3/2) / (2Δ)`, ns.
    pub tau: f64,
    pub detunings: [(ComputationalState, f64); 4],
}

pub fn gate_config(delta: f64, alpha: f64, k: f64) -> Result<GateConfig> {
    require_finite("delta", delta)?;
    if !(delta > 0.0) {
        return Err(Error::Domain(format!(
            "gate detuning must be positive, got {delta}"
        )));
    }
    // Reuse the qutrit validation for alpha and k.
    ThreeLevelParams::new(0.0, delta, alpha, k)?;
    Ok(GateConfig {
        delta,
        alpha,
        k,
        g: (5.0f64 / 3.0).sqrt() * delta,
        tau: 1.5f64.sqrt() / (2.0 * delta),
        detunings: ComputationalState::ALL.map(|s| (s, s.detuning_multiple() * delta)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateOutcome {
    pub state: ComputationalState,
    /// GHz.
    pub detuning: f64,
    /// GHz.
    pub rabi: f64,
    /// `|a0|^2`.
    pub ground_population: f64,
    /// `arg(a0)`, rad.
    pub phase: f64,
}

impl StateOutcome {
    pub fn leakage(&self) -> f64 {
        1.0 - self.ground_population
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateErrorReport {
    pub per_state: Vec<StateOutcome>,
    pub leakage_avg: f64,
    pub leakage_max: f64,
    /// Wrapped into `(-π, π]`.
    pub conditional_phase: f64,
    /// `|wrap(conditional_phase - π)|`.
    pub phase_error: f64,
}

impl GateErrorReport {
    pub fn state(&self, state: ComputationalState) -> &StateOutcome {
        self.per_state
            .iter()
            .find(|o| o.state == state)
            .expect("report covers every computational state")
    }
}

/// Maps an angle into `(-π, π]`.
pub fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

fn rabi_frequency(config: &GateConfig, detuning: f64, correction: Correction) -> Result<f64> {
    let params = ThreeLevelParams::new(config.g, detuning, config.alpha, config.k)?;
    match correction {
        Correction::None => Ok(detuning.hypot(config.g)),
        Correction::Approx => rabi_approx(&params),
        Correction::Exact => {
            let exact = rabi_exact(&params)?;
            let dressed = Propagator::new(&params)?.dressed_01_gap();
            if exact.branch_valid && (exact.omega - dressed).abs() <= 1e-6 * dressed {
                Ok(exact.omega)
            } else {
                Ok(dressed)
            }
        }
    }
}

pub fn evaluate_gate(config: &GateConfig, correction: Correction) -> Result<GateErrorReport> {
    let mut per_state = Vec::with_capacity(4);
    let mut amps = [Complex64::new(0.0, 0.0); 4];
    for (slot, &(state, detuning)) in amps.iter_mut().zip(&config.detunings) {
        let rabi = rabi_frequency(config, detuning, correction)?;
        let a0 = two_level_amplitude(detuning, rabi, config.tau)?;
        *slot = a0;
        per_state.push(StateOutcome {
            state,
            detuning,
            rabi,
            ground_population: a0.norm_sqr(),
            phase: a0.arg(),
        });
    }
    let [a00, a01, a10, a11] = amps;
    let conditional_phase = wrap_phase(a11.arg() - a10.arg() - a01.arg() + a00.arg());
    let leakages: Vec<f64> = per_state.iter().map(StateOutcome::leakage).collect();
    Ok(GateErrorReport {
        leakage_avg: leakages.iter().sum::<f64>() / 4.0,
        leakage_max: leakages.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        phase_error: wrap_phase(conditional_phase - PI).abs(),
        conditional_phase,
        per_state,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub alpha: f64,
    pub leakage_avg: f64,
    pub leakage_max: f64,
    pub phase_error: f64,
}

/// One gate evaluation per anharmonicity, `delta` and `k` held fixed.
pub fn sweep_anharmonicity(
    delta: f64,
    k: f64,
    alphas: &[f64],
    correction: Correction,
) -> Result<Vec<SweepPoint>> {
    alphas
        .iter()
        .map(|&alpha| {
            let report = evaluate_gate(&gate_config(delta, alpha, k)?, correction)?;
            Ok(SweepPoint {
                alpha,
                leakage_avg: report.leakage_avg,
                leakage_max: report.leakage_max,
                phase_error: report.phase_error,
            })
        })
        .collect()
}
