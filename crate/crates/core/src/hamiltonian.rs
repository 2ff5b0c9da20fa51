//! Three-level drive-frame Hamiltonian and its parameters.
//!
//! All frequencies are linear frequencies in GHz and all times are in ns, so a
//! level with energy `E` picks up the phase `exp(-i 2π E t)`. The drive phase
//! is fixed to zero, which makes the matrix real symmetric; complex storage is
//! kept so the same type serves the time-evolution code.

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{require_finite, Error, Result};

/// Boundary of the weak-drive regime in units of `|alpha|`.
pub const REGIME_LIMIT: f64 = 0.2;

/// Drive and qutrit parameters shared by every closed-form result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeLevelParams {
    /// Drive amplitude, GHz.
    pub g: f64,
    /// Drive detuning `nu_d - nu_01`, GHz.
    pub delta: f64,
    /// Anharmonicity `nu_12 - nu_01`, GHz (signed).
    pub alpha: f64,
    /// Matrix-element ratio `m_12 / m_01`.
    pub k: f64,
}

impl ThreeLevelParams {
    pub fn new(g: f64, delta: f64, alpha: f64, k: f64) -> Result<Self> {
        let params = Self { g, delta, alpha, k };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        require_finite("g", self.g)?;
        require_finite("delta", self.delta)?;
        require_finite("alpha", self.alpha)?;
        require_finite("k", self.k)?;
        if self.alpha == 0.0 {
            return Err(Error::DegenerateParameter(
                "anharmonicity alpha must be nonzero".into(),
            ));
        }
        if self.g < 0.0 {
            return Err(Error::InvalidParameter {
                name: "g",
                value: self.g,
                reason: "drive amplitude must be non-negative",
            });
        }
        if self.k < 0.0 {
            return Err(Error::InvalidParameter {
                name: "k",
                value: self.k,
                reason: "matrix-element ratio must be non-negative",
            });
        }
        Ok(())
    }

    /// Both `|g/alpha|` and `|delta/alpha|` are within [`REGIME_LIMIT`].
    ///
    /// Outside this domain results are still computed; callers surface this
    /// flag as a warning.
    pub fn in_validated_regime(&self) -> bool {
        (self.g / self.alpha).abs() <= REGIME_LIMIT
            && (self.delta / self.alpha).abs() <= REGIME_LIMIT
    }

    pub fn with_g(self, g: f64) -> Self {
        Self { g, ..self }
    }

    pub fn with_delta(self, delta: f64) -> Self {
        Self { delta, ..self }
    }
}

/// 3×3 Hermitian Hamiltonian in GHz, basis `|0>, |1>, |2>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianMatrix(Matrix3<Complex64>);

impl HamiltonianMatrix {
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn as_matrix(&self) -> &Matrix3<Complex64> {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn is_hermitian(&self) -> bool {
        (0..3).all(|i| (0..3).all(|j| self.0[(i, j)] == self.0[(j, i)].conj()))
    }
}

/// Builds the rotating-frame Hamiltonian
///
/// ```text
/// [ 0      g/2     0          ]
/// [ g/2    -Δ      k g/2      ]
/// [ 0      k g/2   -2Δ + α    ]
/// ```
///
/// The `0-2` element is zero: that transition is parity forbidden at the
/// sweet spots the model targets.
pub fn build_hamiltonian(params: &ThreeLevelParams) -> Result<HamiltonianMatrix> {
    params.validate()?;
    let ThreeLevelParams { g, delta, alpha, k } = *params;
    let c = |x: f64| Complex64::new(x, 0.0);
    let half_g = 0.5 * g;
    #[rustfmt::skip]
    let m = Matrix3::new(
        c(0.0),    c(half_g),      c(0.0),
        c(half_g), c(-delta),      c(k * half_g),
        c(0.0),    c(k * half_g),  c(alpha - 2.0 * delta),
    );
    Ok(HamiltonianMatrix(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_drive_is_diagonal() {
        let h = build_hamiltonian(&ThreeLevelParams::new(0.0, 0.01, 0.5, 1.0).unwrap()).unwrap();
        let diag: Vec<f64> = (0..3).map(|i| h.entry(i, i).re).collect();
        assert_eq!(diag, vec![0.0, -0.01, 0.48]);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(h.entry(i, j), Complex64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn resonant_drive_entries() {
        let h = build_hamiltonian(&ThreeLevelParams::new(0.02, 0.0, 0.5, 2.0).unwrap()).unwrap();
        assert_eq!(h.entry(0, 1).re, 0.01);
        assert_eq!(h.entry(1, 0).re, 0.01);
        assert_eq!(h.entry(1, 2).re, 0.02);
        assert_eq!(h.entry(2, 1).re, 0.02);
        assert_eq!(h.entry(0, 0).re, 0.0);
        assert_eq!(h.entry(1, 1).re, 0.0);
        assert_eq!(h.entry(2, 2).re, 0.5);
        assert!(h.is_hermitian());
        assert_eq!(h.entry(0, 2), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn rejects_zero_anharmonicity() {
        let err = ThreeLevelParams::new(0.01, 0.0, 0.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::DegenerateParameter(_)));
        let raw = ThreeLevelParams { g: 0.01, delta: 0.0, alpha: 0.0, k: 1.0 };
        assert!(build_hamiltonian(&raw).is_err());
    }

    #[test]
    fn rejects_negative_drive_and_ratio() {
        assert!(ThreeLevelParams::new(-0.01, 0.0, 0.5, 1.0).is_err());
        assert!(ThreeLevelParams::new(0.01, 0.0, 0.5, -1.0).is_err());
        assert!(ThreeLevelParams::new(f64::NAN, 0.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn regime_flag() {
        let p = ThreeLevelParams::new(0.1, 0.1, 0.5, 1.0).unwrap();
        assert!(p.in_validated_regime());
        assert!(!p.with_g(0.2).in_validated_regime());
        assert!(!p.with_delta(-0.11).in_validated_regime());
    }
}
