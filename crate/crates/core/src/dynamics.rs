//! Brute-force time evolution of the driven qutrit.
//!
//! The drive-frame Hamiltonian is time independent, so evolution goes through
//! its eigendecomposition: `psi(t) = sum_j c_j exp(-i 2π E_j t) v_j`. This is
//! the oracle the closed forms are checked against.

use std::f64::consts::PI;

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::hamiltonian::{build_hamiltonian, ThreeLevelParams};

const NORM_TOL: f64 = 1e-12;
const SPACING_TOL: f64 = 1e-12;

/// Zero padding factor applied before the FFT.
const PAD_FACTOR: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector([Complex64; 3]);

impl StateVector {
    pub fn new(amplitudes: [Complex64; 3]) -> Result<Self> {
        let state = Self(amplitudes);
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Domain(format!(
                "state is not normalized: |psi|^2 = {norm}"
            )));
        }
        Ok(state)
    }

    /// Bare level `|level>`, `level < 3`.
    pub fn basis(level: usize) -> Self {
        assert!(level < 3, "qutrit level {level} out of range");
        let mut amps = [Complex64::new(0.0, 0.0); 3];
        amps[level] = Complex64::new(1.0, 0.0);
        Self(amps)
    }

    pub fn amplitude(&self, level: usize) -> Complex64 {
        self.0[level]
    }

    pub fn population(&self, level: usize) -> f64 {
        self.0[level].norm_sqr()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn amplitudes(&self) -> &[Complex64; 3] {
        &self.0
    }
}

/// Samples on a uniform time grid (ns).
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<T> {
    times: Vec<f64>,
    values: Vec<T>,
}

impl<T> TimeSeries<T> {
    pub fn new(times: Vec<f64>, values: Vec<T>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::Domain(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        check_uniform(&times)?;
        Ok(Self { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Sample spacing, ns. `None` for fewer than two samples.
    pub fn step(&self) -> Option<f64> {
        (self.times.len() >= 2).then(|| self.times[1] - self.times[0])
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> TimeSeries<U> {
        TimeSeries {
            times: self.times.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }
}

impl TimeSeries<StateVector> {
    pub fn populations(&self, level: usize) -> TimeSeries<f64> {
        self.map(|s| s.population(level))
    }
}

/// `len` times starting at `start`, spaced by `step` ns.
pub fn uniform_times(start: f64, step: f64, len: usize) -> Vec<f64> {
    (0..len).map(|i| start + step * i as f64).collect()
}

fn check_uniform(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::Domain("non-finite time".into()));
    }
    if times.len() < 2 {
        return Ok(());
    }
    let n = times.len();
    let (first, last) = (times[0], times[n - 1]);
    let step = (last - first) / (n - 1) as f64;
    if !(step > 0.0) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("times must be strictly increasing".into()));
    }
    let scale = first.abs().max(last.abs()).max(step);
    for (i, &t) in times.iter().enumerate() {
        if (t - (first + step * i as f64)).abs() > SPACING_TOL * scale {
            return Err(Error::Domain(format!("time {i} breaks uniform spacing")));
        }
    }
    Ok(())
}

/// Eigendecomposition of the qutrit Hamiltonian, reusable across times.
#[derive(Debug, Clone)]
pub struct Propagator {
    energies: Vector3<f64>,
    vectors: Matrix3<Complex64>,
}

impl Propagator {
    pub fn new(params: &ThreeLevelParams) -> Result<Self> {
        let h = build_hamiltonian(params)?;
        let eig = SymmetricEigen::new(*h.as_matrix());
        Ok(Self {
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    /// Dressed energies, GHz, in solver order.
    pub fn energies(&self) -> [f64; 3] {
        [self.energies[0], self.energies[1], self.energies[2]]
    }

    pub fn state_at(&self, initial: &StateVector, t: f64) -> StateVector {
        let psi0 = Vector3::from_column_slice(initial.amplitudes());
        let coeffs = self.vectors.adjoint() * psi0;
        let mut psi = Vector3::zeros();
        for j in 0..3 {
            let phase = Complex64::from_polar(1.0, -2.0 * PI * self.energies[j] * t);
            psi += self.vectors.column(j) * (coeffs[j] * phase);
        }
        StateVector([psi[0], psi[1], psi[2]])
    }

    /// Gap between the two dressed states that are not mostly `|2>`.
    ///
    /// This identifies the 0-1 Rabi frequency by eigenvector overlap, which
    /// stays well defined at the edge of the closed form's branch condition.
    pub fn dressed_01_gap(&self) -> f64 {
        let weight2 = |j: usize| self.vectors[(2, j)].norm_sqr();
        let upper = (0..3)
            .max_by(|&a, &b| weight2(a).total_cmp(&weight2(b)))
            .expect("three eigenvectors");
        let rest: Vec<f64> = (0..3)
            .filter(|&j| j != upper)
            .map(|j| self.energies[j])
            .collect();
        (rest[0] - rest[1]).abs()
    }
}

/// Evolves `initial` under the drive-frame Hamiltonian on a uniform grid.
pub fn evolve(
    params: &ThreeLevelParams,
    initial: &StateVector,
    times: &[f64],
) -> Result<TimeSeries<StateVector>> {
    StateVector::new(*initial.amplitudes())?;
    let propagator = Propagator::new(params)?;
    let states = times
        .iter()
        .map(|&t| propagator.state_at(initial, t))
        .collect();
    TimeSeries::new(times.to_vec(), states)
}

/// Dominant nonzero oscillation frequency of a real series, GHz.
///
/// The mean is removed, a Hann window applied and the record zero padded
/// before the FFT; the peak bin is refined by a three-point parabola through
/// the log magnitudes. Accurate to better than 0.1% for records spanning at
/// least ten periods with at least sixteen samples per period.
pub fn extract_frequency(series: &TimeSeries<f64>) -> Result<f64> {
    let n = series.len();
    let dt = match series.step() {
        Some(dt) if n >= 8 => dt,
        _ => {
            return Err(Error::InsufficientData(format!(
                "{n} samples, need at least 8"
            )))
        }
    };
    let mean = series.values().iter().sum::<f64>() / n as f64;
    let padded = (PAD_FACTOR * n).next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); padded];
    for (i, (slot, &v)) in buf.iter_mut().zip(series.values()).enumerate() {
        let w = 0.5 - 0.5 * (2.0 * PI * i as f64 / (n - 1) as f64).cos();
        *slot = Complex64::new((v - mean) * w, 0.0);
    }
    FftPlanner::new().plan_fft_forward(padded).process(&mut buf);

    let half = padded / 2;
    let mags: Vec<f64> = buf[..=half].iter().map(|c| c.norm()).collect();
    // Skip the Hann main lobe around DC.
    let first = 2 * padded / n + 1;
    if first + 1 >= half {
        return Err(Error::InsufficientData("record too short".into()));
    }
    let peak = (first..half)
        .max_by(|&a, &b| mags[a].total_cmp(&mags[b]))
        .expect("non-empty search range");

    let mut sorted = mags[1..=half].to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    if !(mags[peak] > 3.0 * median) || mags[peak] == 0.0 {
        return Err(Error::NoOscillation(format!(
            "peak {:.3e} not above 3x spectral median {:.3e}",
            mags[peak], median
        )));
    }

    let (l, c, r) = (mags[peak - 1].ln(), mags[peak].ln(), mags[peak + 1].ln());
    let denom = l - 2.0 * c + r;
    let offset = if denom.abs() > 0.0 && denom.is_finite() {
        0.5 * (l - r) / denom
    } else {
        0.0
    };
    Ok((peak as f64 + offset) / (padded as f64 * dt))
}

/// Ground amplitude of a detuned two-level Rabi rotation,
/// `cos(π Ω t) + i (Δ/Ω) sin(π Ω t)`.
///
/// `detuning` and `omega` are linear frequencies in GHz and `duration` is in
/// ns, so a full rotation happens at `Ω t = 1`. `|a0| <= 1` only holds for
/// consistent pairs with `Ω² >= Δ²`.
pub fn two_level_amplitude(detuning: f64, omega: f64, duration: f64) -> Result<Complex64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!(
            "Rabi frequency must be positive, got {omega}"
        )));
    }
    let theta = PI * omega * duration;
    Ok(Complex64::new(theta.cos(), detuning / omega * theta.sin()))
}
