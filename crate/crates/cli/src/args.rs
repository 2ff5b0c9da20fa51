use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "rabi", version, about = "Driven-qutrit Rabi frequencies, fluxonium spectra and CZ gate errors")]
pub struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact and weak-drive Rabi frequency at one parameter point.
    Rabi(RabiArgs),
    /// Rabi frequencies over a grid of amplitudes and detunings.
    Sweep(SweepArgs),
    /// Fluxonium levels, anharmonicity and drive matrix-element ratios.
    Fluxonium(FluxoniumArgs),
    /// Leakage and conditional-phase error of the CZ gate.
    Gate(GateArgs),
    /// Two-stage slope analysis of a sweep CSV or of synthetic data.
    Fit(FitArgs),
}

#[derive(Debug, Args)]
pub struct RabiArgs {
    /// Drive amplitude, GHz.
    #[arg(long, allow_hyphen_values = true)]
    pub g: f64,
    /// Drive detuning, GHz.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: f64,
    /// Anharmonicity, GHz.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    /// 1-2 to 0-1 matrix-element ratio.
    #[arg(long, allow_hyphen_values = true)]
    pub k: f64,
}

#[derive(Debug, Args)]
pub struct AmplitudeRange {
    /// Smallest drive amplitude, GHz.
    #[arg(long, allow_hyphen_values = true)]
    pub g_min: f64,
    /// Largest drive amplitude, GHz (inclusive).
    #[arg(long, allow_hyphen_values = true)]
    pub g_max: f64,
    /// Amplitude step, GHz.
    #[arg(long)]
    pub g_step: f64,
    /// Comma-separated detunings, GHz.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub deltas: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub range: AmplitudeRange,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub k: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Channel {
    Charge,
    Flux,
}

#[derive(Debug, Args)]
pub struct FluxoniumArgs {
    /// Charging energy, GHz.
    #[arg(long)]
    pub ec: f64,
    /// Inductive energy, GHz.
    #[arg(long)]
    pub el: f64,
    /// Josephson energy, GHz.
    #[arg(long)]
    pub ej: f64,
    /// External flux in flux quanta.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub flux: f64,
    /// Half width of the phase grid, rad.
    #[arg(long)]
    pub phi_max: Option<f64>,
    /// Odd number of grid points.
    #[arg(long)]
    pub n_points: Option<usize>,
    #[arg(long, default_value_t = 6)]
    pub levels: usize,
    /// Drive line used for the reported `k`.
    #[arg(long, value_enum, default_value_t = Channel::Charge)]
    pub channel: Channel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CorrectionArg {
    None,
    Approx,
    Exact,
}

/// `START:STOP:COUNT`, endpoints inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaSweep {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl AlphaSweep {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| self.start + step * i as f64)
            .collect()
    }
}

impl FromStr for AlphaSweep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, count] = parts[..] else {
            return Err(format!("expected START:STOP:COUNT, got `{s}`"));
        };
        let number = |x: &str| {
            x.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("`{x}` is not a finite number"))
        };
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| format!("`{count}` is not a point count"))?;
        if count == 0 {
            return Err("sweep needs at least one point".into());
        }
        Ok(Self {
            start: number(start)?,
            stop: number(stop)?,
            count,
        })
    }
}

#[derive(Debug, Args)]
pub struct GateArgs {
    /// Base detuning, GHz.
    #[arg(long)]
    pub delta: f64,
    /// Coupler anharmonicity, GHz.
    #[arg(long, allow_hyphen_values = true, required_unless_present = "alpha_sweep")]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub k: f64,
    #[arg(long, value_enum, default_value_t = CorrectionArg::Approx)]
    pub correction: CorrectionArg,
    /// Anharmonicity sweep `START:STOP:COUNT`, GHz.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "alpha")]
    pub alpha_sweep: Option<AlphaSweep>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Sweep CSV to analyse.
    #[arg(long, conflicts_with_all = ["alpha", "k", "noise", "seed", "g_min", "g_max", "g_step", "deltas"])]
    pub input: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true, required_unless_present = "input")]
    pub alpha: Option<f64>,
    #[arg(long, required_unless_present = "input")]
    pub k: Option<f64>,
    /// Relative noise on each synthetic Rabi frequency.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.002)]
    pub g_min: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.02)]
    pub g_max: f64,
    #[arg(long, default_value_t = 0.002)]
    pub g_step: f64,
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "-0.03,-0.02,-0.01,0,0.01,0.02,0.03"
    )]
    pub deltas: Vec<f64>,
}
