pub mod analytic;
pub mod banded;
pub mod dynamics;
pub mod error;
pub mod fitting;
pub mod fluxonium;
pub mod gate;
pub mod hamiltonian;

pub use error::{Error, Result};
pub use hamiltonian::{build_hamiltonian, HamiltonianMatrix, ThreeLevelParams};
pub use analytic::{rabi_approx, rabi_exact, solve, RabiSolution};
pub use dynamics::{StateVector, TimeSeries};
pub use fitting::{FitResult, RabiDataset, RabiSample};
pub use fluxonium::{DriveChannel, FluxoniumParams, FluxoniumSpectrum, SolverGrid};
pub use gate::{Correction, GateConfig, GateErrorReport};
