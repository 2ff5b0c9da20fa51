//! Fluxonium spectrum on a uniform phase grid.
//!
//! `H/h = 4 E_C n^2 + (E_L/2) phi^2 - E_J cos(phi - 2π Φ_e/Φ_0)` with
//! `n = -i d/dphi`. The kinetic term uses the fourth-order five-point stencil
//! and the wavefunction vanishes outside `[-phi_max, phi_max]`, which gives a
//! pentadiagonal matrix solved by [`crate::banded`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::banded::SymmetricBanded;
use crate::error::{require_finite, Error, Result};

/// Grid refinement changing `nu01` by more than this is an error, GHz.
pub const CONVERGENCE_LIMIT: f64 = 1e-4;
/// Target convergence of `nu01` under grid doubling, GHz.
pub const CONVERGENCE_TARGET: f64 = 1e-6;
/// Probability in the outer `π` of the box above which the box is too small.
pub const TAIL_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxoniumParams {
    /// Charging energy `E_C/h`, GHz.
    pub ec: f64,
    /// Inductive energy `E_L/h`, GHz.
    pub el: f64,
    /// Josephson energy `E_J/h`, GHz.
    pub ej: f64,
    /// External flux in units of the flux quantum; taken modulo 1.
    pub flux: f64,
}

impl FluxoniumParams {
    pub fn new(ec: f64, el: f64, ej: f64, flux: f64) -> Result<Self> {
        let params = Self { ec, el, ej, flux };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        require_finite("ec", self.ec)?;
        require_finite("el", self.el)?;
        require_finite("ej", self.ej)?;
        require_finite("flux", self.flux)?;
        let positive = |name, value: f64| {
            if value > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be positive",
                })
            }
        };
        positive("ec", self.ec)?;
        positive("el", self.el)?;
        if self.ej < 0.0 {
            return Err(Error::InvalidParameter {
                name: "ej",
                value: self.ej,
                reason: "must be non-negative",
            });
        }
        Ok(())
    }

    pub fn with_flux(self, flux: f64) -> Self {
        Self { flux, ..self }
    }

    fn potential(&self, phi: f64) -> f64 {
        let offset = 2.0 * PI * self.flux.rem_euclid(1.0);
        0.5 * self.el * phi * phi - self.ej * (phi - offset).cos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverGrid {
    /// Half-width of the phase box, radians.
    pub phi_max: f64,
    /// Number of grid points, odd so that `phi = 0` is a grid point.
    pub n_points: usize,
}

impl Default for SolverGrid {
    fn default() -> Self {
        Self {
            phi_max: 6.0 * PI,
            n_points: 2001,
        }
    }
}

impl SolverGrid {
    pub fn new(phi_max: f64, n_points: usize) -> Result<Self> {
        let grid = Self { phi_max, n_points };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.phi_max >= 4.0 * PI) || !self.phi_max.is_finite() {
            return Err(Error::InvalidParameter {
                name: "phi_max",
                value: self.phi_max,
                reason: "phase box half-width must be at least 4π",
            });
        }
        if self.n_points < 501 || self.n_points % 2 == 0 {
            return Err(Error::InvalidParameter {
                name: "n_points",
                value: self.n_points as f64,
                reason: "grid size must be odd and at least 501",
            });
        }
        Ok(())
    }

    /// Same box at half the spacing.
    pub fn refined(&self) -> Self {
        Self {
            phi_max: self.phi_max,
            n_points: 2 * self.n_points - 1,
        }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.phi_max / (self.n_points - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.n_points)
            .map(|i| -self.phi_max + h * i as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriveChannel {
    Charge,
    Flux,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverDiagnostics {
    pub n_points: usize,
    pub phi_max: f64,
    /// `|nu01(refined) - nu01|`, GHz.
    pub refinement_shift: f64,
    /// Largest probability in the outer `π` of the box over reported levels.
    pub tail_mass: f64,
}

impl SolverDiagnostics {
    pub fn converged(&self) -> bool {
        self.refinement_shift < CONVERGENCE_TARGET
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluxoniumSpectrum {
    /// Lowest eigenenergies, ascending, GHz.
    pub levels: Vec<f64>,
    pub nu01: f64,
    pub nu12: f64,
    pub alpha: f64,
    /// `|<i|n|j>|`.
    pub n_elems: Vec<Vec<f64>>,
    /// `|<i|phi|j>|`.
    pub phi_elems: Vec<Vec<f64>>,
    pub diagnostics: SolverDiagnostics,
}

impl FluxoniumSpectrum {
    pub fn elements(&self, channel: DriveChannel) -> &[Vec<f64>] {
        match channel {
            DriveChannel::Charge => &self.n_elems,
            DriveChannel::Flux => &self.phi_elems,
        }
    }
}

fn hamiltonian(params: &FluxoniumParams, grid: &SolverGrid) -> SymmetricBanded {
    let n = grid.n_points;
    let h = grid.spacing();
    let kinetic = 4.0 * params.ec / (h * h);
    let mut m = SymmetricBanded::zeros(n, 2);
    for (i, phi) in grid.points().into_iter().enumerate() {
        m.set(i, i, kinetic * 2.5 + params.potential(phi));
        if i >= 1 {
            m.set(i, i - 1, -kinetic * 4.0 / 3.0);
        }
        if i >= 2 {
            m.set(i, i - 2, kinetic / 12.0);
        }
    }
    m
}

/// Fourth-order central first derivative with zero boundary values.
fn derivative(v: &[f64], h: f64) -> Vec<f64> {
    let at = |i: isize| -> f64 {
        if i < 0 || i as usize >= v.len() {
            0.0
        } else {
            v[i as usize]
        }
    };
    (0..v.len() as isize)
        .map(|i| (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) / (12.0 * h))
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lowest `n_levels` eigenpairs with matrix elements and convergence checks.
pub fn solve_spectrum(
    params: &FluxoniumParams,
    grid: &SolverGrid,
    n_levels: usize,
) -> Result<FluxoniumSpectrum> {
    params.validate()?;
    grid.validate()?;
    if n_levels < 3 || n_levels > grid.n_points {
        return Err(Error::InvalidParameter {
            name: "n_levels",
            value: n_levels as f64,
            reason: "need at least 3 levels and no more than the grid size",
        });
    }

    let (levels, vectors) = hamiltonian(params, grid).lowest_eigenpairs(n_levels)?;
    let nu01 = levels[1] - levels[0];
    let nu12 = levels[2] - levels[1];

    let points = grid.points();
    let edge = grid.phi_max - PI;
    let tail_mass = vectors
        .iter()
        .map(|v| {
            v.iter()
                .zip(&points)
                .filter(|(_, phi)| phi.abs() > edge)
                .map(|(x, _)| x * x)
                .sum::<f64>()
        })
        .fold(0.0, f64::max);
    if tail_mass > TAIL_LIMIT {
        return Err(Error::BoxTooSmall(format!(
            "tail mass {tail_mass:.3e} near the box edge"
        )));
    }

    let fine = hamiltonian(params, &grid.refined());
    let refinement_shift = ((fine.eigenvalue(1)? - fine.eigenvalue(0)?) - nu01).abs();
    if refinement_shift > CONVERGENCE_LIMIT {
        return Err(Error::Resolution(format!(
            "doubling the grid moves nu01 by {refinement_shift:.3e} GHz"
        )));
    }

    // Vectors have unit Euclidean norm, so grid sums are already quadratures.
    let h = grid.spacing();
    let derivs: Vec<Vec<f64>> = vectors.iter().map(|v| derivative(v, h)).collect();
    let weighted: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| v.iter().zip(&points).map(|(x, phi)| x * phi).collect())
        .collect();
    let table = |f: &dyn Fn(usize, usize) -> f64| -> Vec<Vec<f64>> {
        (0..n_levels)
            .map(|i| (0..n_levels).map(|j| f(i, j).abs()).collect())
            .collect()
    };
    let n_elems = table(&|i, j| dot(&vectors[i], &derivs[j]));
    let phi_elems = table(&|i, j| dot(&vectors[i], &weighted[j]));

    Ok(FluxoniumSpectrum {
        alpha: nu12 - nu01,
        levels,
        nu01,
        nu12,
        n_elems,
        phi_elems,
        diagnostics: SolverDiagnostics {
            n_points: grid.n_points,
            phi_max: grid.phi_max,
            refinement_shift,
            tail_mass,
        },
    })
}

/// Matrix-element ratio `k = |m12| / |m01|` for the chosen drive line.
pub fn drive_ratio(spectrum: &FluxoniumSpectrum, channel: DriveChannel) -> Result<f64> {
    let m = spectrum.elements(channel);
    if m.len() < 3 {
        return Err(Error::InsufficientData("need at least 3 levels".into()));
    }
    if m[0][1] < 1e-12 {
        return Err(Error::DegenerateCoupling(format!(
            "|m01| = {:.3e} on the {channel:?} line",
            m[0][1]
        )));
    }
    Ok(m[1][2] / m[0][1])
}

/// Relative deviation from `n12/n01 = (nu12/nu01) (phi12/phi01)`.
///
/// For a kinetic term quadratic in `n`, `[H, phi] ∝ n`, so
/// `<i|n|j> ∝ (E_i - E_j) <i|phi|j>` and the relation is exact up to
/// discretization error.
pub fn conjugate_ratio_check(spectrum: &FluxoniumSpectrum) -> Result<f64> {
    let k_charge = drive_ratio(spectrum, DriveChannel::Charge)?;
    let k_flux = drive_ratio(spectrum, DriveChannel::Flux)?;
    Ok((k_charge / ((spectrum.nu12 / spectrum.nu01) * k_flux) - 1.0).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic() -> FluxoniumParams {
        FluxoniumParams::new(0.5, 2.0, 0.0, 0.13).unwrap()
    }

    #[test]
    fn harmonic_limit() {
        let s = solve_spectrum(&harmonic(), &SolverGrid::default(), 6).unwrap();
        let expected = (8.0f64 * 0.5 * 2.0).sqrt();
        assert!((s.nu01 - expected).abs() < 1e-6, "{}", s.nu01);
        assert!((s.nu12 - expected).abs() < 1e-6);
        assert!(s.alpha.abs() < 1e-6);
        let k = drive_ratio(&s, DriveChannel::Flux).unwrap();
        assert!((k - 2f64.sqrt()).abs() < 1e-6, "{k}");
        assert!(conjugate_ratio_check(&s).unwrap() < 1e-10);
    }

    #[test]
    fn levels_sorted_and_alpha_by_construction() {
        let p = FluxoniumParams::new(0.49, 1.74, 3.56, 0.5).unwrap();
        let s = solve_spectrum(&p, &SolverGrid::default(), 6).unwrap();
        assert!(s.levels.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(s.alpha, s.nu12 - s.nu01);
        assert!(s.diagnostics.converged());
        assert!(s.diagnostics.tail_mass < 1e-10);
    }

    #[test]
    fn parity_selection_at_sweet_spots() {
        for (p, flux) in [((0.49, 1.74, 3.56), 0.5), ((0.5, 2.11, 4.29), 0.0)] {
            let params = FluxoniumParams::new(p.0, p.1, p.2, flux).unwrap();
            let s = solve_spectrum(&params, &SolverGrid::default(), 6).unwrap();
            for m in [&s.n_elems, &s.phi_elems] {
                let scale = s.n_elems[0][1];
                assert!(m[0][2] < 1e-6 * scale, "0-2 element {}", m[0][2]);
                assert!(m[1][3] < 1e-6 * scale, "1-3 element {}", m[1][3]);
            }
        }
    }

    #[test]
    fn grid_validation() {
        assert!(SolverGrid::new(3.0 * PI, 1001).is_err());
        assert!(SolverGrid::new(6.0 * PI, 1000).is_err());
        assert!(SolverGrid::new(6.0 * PI, 401).is_err());
        assert_eq!(SolverGrid::default().refined().n_points, 4001);
    }

    #[test]
    fn param_validation() {
        assert!(FluxoniumParams::new(0.0, 1.0, 1.0, 0.0).is_err());
        assert!(FluxoniumParams::new(0.5, -1.0, 1.0, 0.0).is_err());
        assert!(FluxoniumParams::new(0.5, 1.0, -1.0, 0.0).is_err());
        let err = solve_spectrum(&harmonic(), &SolverGrid::default(), 2).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { name: "n_levels", .. }));
    }

    #[test]
    fn coarse_grid_is_rejected() {
        // A single deep well narrower than the spacing of a 501-point, ±100π box.
        let params = FluxoniumParams::new(0.2, 5.0, 200.0, 0.0).unwrap();
        let grid = SolverGrid::new(100.0 * PI, 501).unwrap();
        let err = solve_spectrum(&params, &grid, 3).unwrap_err();
        assert!(matches!(err, Error::Resolution(_)), "{err:?}");
    }

    #[test]
    fn small_box_is_rejected() {
        // Very weak inductance spreads the low levels across many wells.
        let params = FluxoniumParams::new(1.0, 0.01, 0.2, 0.0).unwrap();
        let grid = SolverGrid::new(4.0 * PI, 1001).unwrap();
        let err = solve_spectrum(&params, &grid, 3).unwrap_err();
        assert!(matches!(err, Error::BoxTooSmall(_)), "{err:?}");
    }

    #[test]
    fn degenerate_coupling() {
        let mut s = solve_spectrum(&harmonic(), &SolverGrid::default(), 3).unwrap();
        s.n_elems[0][1] = 0.0;
        assert!(matches!(
            drive_ratio(&s, DriveChannel::Charge),
            Err(Error::DegenerateCoupling(_))
        ));
    }
}
