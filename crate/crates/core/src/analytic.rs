//! Closed-form spectrum of the driven qutrit.
//!
//! The characteristic cubic of the trace-shifted Hamiltonian
//! `H - tr(H)/3` is `mu^3 - (I1/3) mu - I2/27 = 0`. Everything here is built
//! on the two invariants `I1` and `I2`: the trigonometric gap formula (the
//! numerically stable path), the radical form of the 0-1 Rabi frequency
//! (casus irreducibilis, evaluated in complex arithmetic), and the
//! weak-drive expansion with its slope coefficient and Stark shift.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::ThreeLevelParams;

/// Slack allowed on the `arcsin`/`arccos` argument before it counts as a
/// broken invariant instead of rounding.
const TRIG_ARG_SLACK: f64 = 1e-12;

/// Tolerance on the imaginary residue of the radical root, relative to `I1`.
const IMAG_RESIDUE_TOL: f64 = 1e-9;

/// Phase offsets of the three gaps.
const GAP_PHASES: [f64; 3] = [FRAC_PI_2, FRAC_PI_6, -FRAC_PI_6];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicInvariants {
    /// GHz².
    pub i1: f64,
    /// GHz³.
    pub i2: f64,
    /// GHz⁶, intermediate of the radical root,
    /// `-I1³ + I2²/2 + (I2/2) sqrt(I2² - 4 I1³)`.
    pub i0: Complex64,
    /// `4 I1³ - I2²`, GHz⁶.
    pub discriminant: f64,
}

impl CubicInvariants {
    /// `I2 / (2 I1^{3/2})`, clamped to [-1, 1] when it is off by rounding only.
    fn normalized_i2(&self) -> Result<f64> {
        let x = self.i2 / (2.0 * self.i1.powf(1.5));
        if !x.is_finite() || x.abs() > 1.0 + TRIG_ARG_SLACK {
            return Err(Error::InternalConsistency(format!(
                "I2/(2 I1^1.5) = {x} lies outside [-1, 1]"
            )));
        }
        Ok(x.clamp(-1.0, 1.0))
    }
}

pub fn cubic_invariants(params: &ThreeLevelParams) -> Result<CubicInvariants> {
    params.validate()?;
    let ThreeLevelParams { g, delta: d, alpha: a, k } = *params;
    let g2 = g * g;
    let k2 = k * k;

    let i1 = 0.75 * g2 * (1.0 + k2) + a * a - 3.0 * a * d + 3.0 * d * d;
    let i2 = -4.5 * g2 * a + 2.25 * g2 * k2 * a + 2.0 * a * a * a + 6.75 * g2 * d
        - 6.75 * g2 * k2 * d
        - 9.0 * a * a * d
        + 9.0 * a * d * d;
    if !(i1 > 0.0) {
        return Err(Error::InternalConsistency(format!(
            "I1 = {i1} must be positive"
        )));
    }

    // 4 I1^3 - I2^2 expanded in powers of g^2, so the leading powers of
    // alpha cancel symbolically. It is non-negative for a real spectrum.
    let (a2, d2) = (a * a, d * d);
    let k4 = k2 * k2;
    let c0 = 27.0 * d2 * (d - a).powi(2) * (2.0 * d - a).powi(2);
    let c1 = 13.5
        * (2.0 * d - a)
        * (3.0 * d2 * d * (k2 + 1.0) - 9.0 * d2 * a - d * a2 * k2 + 8.0 * d * a2 - 2.0 * a2 * a);
    let c2 = -27.0 / 16.0
        * (d2 * (15.0 * k4 - 78.0 * k2 + 15.0) - d * a * (6.0 * k4 - 78.0 * k2 + 24.0)
            - a2 * (k4 + 20.0 * k2 - 8.0));
    let c3 = 27.0 / 16.0 * (k2 + 1.0).powi(3);
    let discriminant = (c0 + g2 * (c1 + g2 * (c2 + g2 * c3))).max(0.0);

    let i0 = Complex64::new(
        i1 * i1 * i1 - 0.5 * discriminant,
        0.5 * i2 * discriminant.sqrt(),
    );
    Ok(CubicInvariants {
        i1,
        i2,
        i0,
        discriminant,
    })
}

/// The three pairwise eigenvalue gaps `|lambda_i - lambda_j|` in GHz, ordered
/// by the phase offsets `pi/2, pi/6, -pi/6`.
pub fn eigenvalue_gaps(params: &ThreeLevelParams) -> Result<[f64; 3]> {
    let inv = cubic_invariants(params)?;
    let x = inv.normalized_i2()?;
    let scale = 2.0 * (inv.i1 / 3.0).sqrt();
    let third = x.asin() / 3.0;
    Ok(GAP_PHASES.map(|phi| scale * (phi - third).sin().abs()))
}

/// Eigenvalues of the trace-free matrix `H - tr(H)/3` (GHz), via the
/// `arccos` form of the depressed cubic, for `r = 0, 1, 2`.
///
/// The amplitude is `(2/3) sqrt(I1)`: with the cubic written in terms of
/// `I1` and `I2` this is the scale whose pairwise differences reproduce the
/// gap formula of [`eigenvalue_gaps`].
pub fn shifted_eigenvalues(params: &ThreeLevelParams) -> Result<[f64; 3]> {
    let inv = cubic_invariants(params)?;
    let x = inv.normalized_i2()?;
    let amp = 2.0 * inv.i1.sqrt() / 3.0;
    let theta = x.acos() / 3.0;
    Ok([0.0, 1.0, 2.0].map(|r| amp * (theta - 2.0 * PI * r / 3.0).cos()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactRabi {
    /// GHz.
    pub omega: f64,
    /// `|alpha - 1.5 delta| > sqrt(delta^2 + g^2)`: the root belongs to the
    /// 0-1 dressed pair.
    pub branch_valid: bool,
}

/// 0-1 Rabi frequency from the radical root of the cubic in `Omega^2`.
///
/// `|I0| = I1^3` identically, so with the principal cube root
/// `I0^{1/3} + I1^2 / I0^{1/3} = 2 I1 cos(arg(I0)/3)` and the radical is real
/// up to rounding; the residue is still checked. The value returned is the
/// same root written as `(4/3) I1 sin^2(arg(I0)/6)`, which keeps full
/// relative precision when `Omega^2 << I1`.
pub fn rabi_exact(params: &ThreeLevelParams) -> Result<ExactRabi> {
    let inv = cubic_invariants(params)?;
    let cube_root = inv.i0.cbrt();
    let radical = Complex64::new(2.0 * inv.i1 / 3.0, 0.0)
        - (cube_root + inv.i1 * inv.i1 / cube_root) / 3.0;
    if radical.im.abs() > IMAG_RESIDUE_TOL * inv.i1.max(1.0) {
        return Err(Error::InternalConsistency(format!(
            "radical root has imaginary residue {}",
            radical.im
        )));
    }
    let half_angle = (inv.i0.arg() / 6.0).sin();
    let omega_sq = 4.0 / 3.0 * inv.i1 * half_angle * half_angle;
    let ThreeLevelParams { g, delta, alpha, .. } = *params;
    Ok(ExactRabi {
        omega: omega_sq.sqrt(),
        branch_valid: (alpha - 1.5 * delta).abs() > delta.hypot(g),
    })
}

/// Weak-drive approximation `sqrt(delta^2 + g^2 s)`.
pub fn rabi_approx(params: &ThreeLevelParams) -> Result<f64> {
    let s = slope(params)?;
    let radicand = params.delta * params.delta + params.g * params.g * s;
    if radicand < 0.0 {
        return Err(Error::Domain(format!(
            "negative radicand {radicand} in the weak-drive Rabi frequency"
        )));
    }
    Ok(radicand.sqrt())
}

/// Slope `s = 1 + (k^2/2)(delta/alpha)` of `Omega^2` against `g^2`.
pub fn slope(params: &ThreeLevelParams) -> Result<f64> {
    params.validate()?;
    Ok(1.0 + 0.5 * params.k * params.k * params.delta / params.alpha)
}

/// `ds/d(delta) = k^2 / (2 alpha)`, in ns when `alpha` is in GHz.
pub fn slope_gradient(k: f64, alpha: f64) -> Result<f64> {
    ThreeLevelParams::new(0.0, 0.0, alpha, k)?;
    Ok(0.5 * k * k / alpha)
}

/// Drive-induced shift of the 0-1 transition, `(k^2/4) g^2 / alpha`, GHz.
pub fn stark_shift(params: &ThreeLevelParams) -> Result<f64> {
    params.validate()?;
    Ok(0.25 * params.k * params.k * params.g * params.g / params.alpha)
}

/// Relative residual of `4 I1^3 - I2^2 = 27 Omega^2 (I1 - Omega^2)^2`.
///
/// Zero (to rounding) for each of the three eigenvalue gaps.
pub fn verify_cubic_identity(params: &ThreeLevelParams, omega: f64) -> Result<f64> {
    let CubicInvariants { i1, i2, .. } = cubic_invariants(params)?;
    let w2 = omega * omega;
    let lhs = 4.0 * i1 * i1 * i1 - i2 * i2;
    let rhs = 27.0 * w2 * (i1 - w2) * (i1 - w2);
    Ok((lhs - rhs).abs() / (4.0 * i1 * i1 * i1 + i2 * i2 + 1e-300))
}

/// Everything the closed forms give for one parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RabiSolution {
    pub omega_gaps: [f64; 3],
    pub omega_exact: f64,
    pub omega_approx: f64,
    pub slope: f64,
    pub stark: f64,
    pub branch_valid: bool,
    pub in_regime: bool,
}

pub fn solve(params: &ThreeLevelParams) -> Result<RabiSolution> {
    let exact = rabi_exact(params)?;
    Ok(RabiSolution {
        omega_gaps: eigenvalue_gaps(params)?,
        omega_exact: exact.omega,
        omega_approx: rabi_approx(params)?,
        slope: slope(params)?,
        stark: stark_shift(params)?,
        branch_valid: exact.branch_valid,
        in_regime: params.in_validated_regime(),
    })
}
