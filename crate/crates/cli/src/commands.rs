use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use rabi_core::analytic::{rabi_approx, rabi_exact, slope_gradient, solve};
use rabi_core::fitting::{
    group_by_detuning, params_grid, slope_vs_detuning, synth_dataset, FitResult, RabiDataset,
    RabiSample, SlopeAnalysis,
};
use rabi_core::fluxonium::{
    conjugate_ratio_check, drive_ratio, solve_spectrum, DriveChannel, FluxoniumParams, SolverGrid,
};
use rabi_core::gate::{evaluate_gate, gate_config, sweep_anharmonicity, ComputationalState, Correction};
use rabi_core::{RabiSolution, ThreeLevelParams};

use crate::args::{
    AmplitudeRange, Channel, CorrectionArg, FitArgs, FluxoniumArgs, Format, GateArgs, RabiArgs,
    SweepArgs,
};
use crate::error::{CliError, Result};
use crate::output::{write_csv, write_json};

pub const SWEEP_HEADER: [&str; 6] = [
    "g_ghz",
    "delta_ghz",
    "omega_exact_ghz",
    "omega_approx_ghz",
    "omega_sq_exact",
    "omega_sq_approx",
];

pub const GATE_SWEEP_HEADER: [&str; 4] = ["alpha_ghz", "leakage_avg", "leakage_max", "phase_error_rad"];

fn warn(message: &str) {
    eprintln!("warning: {message}");
}

fn json_only(format: Option<Format>, command: &str) -> Result<()> {
    match format {
        Some(Format::Csv) => Err(CliError::Usage(format!(
            "`{command}` only writes json"
        ))),
        _ => Ok(()),
    }
}

#[derive(Serialize)]
struct RabiReport {
    #[serde(flatten)]
    params: ThreeLevelParams,
    #[serde(flatten)]
    solution: RabiSolution,
}

pub fn rabi(args: &RabiArgs, format: Option<Format>, out: &mut dyn Write) -> Result<()> {
    json_only(format, "rabi")?;
    let params = ThreeLevelParams::new(args.g, args.delta, args.alpha, args.k)?;
    let solution = solve(&params)?;
    if !solution.in_regime {
        warn("|g/alpha| or |delta/alpha| exceeds 0.2; the weak-drive formula is outside its validated range");
    }
    if !solution.branch_valid {
        warn("|alpha - 1.5 delta| <= sqrt(delta^2 + g^2); omega_exact may belong to another transition");
    }
    write_json(out, &RabiReport { params, solution })
}

/// `g_min, g_min + g_step, ...` up to `g_max` inclusive.
pub fn amplitude_grid(g_min: f64, g_max: f64, g_step: f64) -> Result<Vec<f64>> {
    if ![g_min, g_max, g_step].iter().all(|x| x.is_finite()) {
        return Err(CliError::Usage("amplitude range must be finite".into()));
    }
    if g_min < 0.0 {
        return Err(CliError::Usage(format!("--g-min must be non-negative, got {g_min}")));
    }
    if !(g_step > 0.0) {
        return Err(CliError::Usage(format!("--g-step must be positive, got {g_step}")));
    }
    if g_max < g_min {
        return Err(CliError::Usage(format!(
            "empty amplitude range: --g-max {g_max} is below --g-min {g_min}"
        )));
    }
    let count = ((g_max - g_min) / g_step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| g_min + g_step * i as f64).collect())
}

fn detunings(range: &AmplitudeRange) -> Result<&[f64]> {
    if range.deltas.is_empty() {
        return Err(CliError::Usage("--deltas needs at least one value".into()));
    }
    Ok(&range.deltas)
}

#[derive(Serialize)]
struct SweepRow {
    g_ghz: f64,
    delta_ghz: f64,
    omega_exact_ghz: f64,
    omega_approx_ghz: f64,
    omega_sq_exact: f64,
    omega_sq_approx: f64,
}

pub fn sweep(args: &SweepArgs, format: Option<Format>, out: &mut dyn Write) -> Result<()> {
    let amplitudes = amplitude_grid(args.range.g_min, args.range.g_max, args.range.g_step)?;
    let grid = params_grid(&amplitudes, detunings(&args.range)?, args.alpha, args.k)?;
    let mut rows = Vec::with_capacity(grid.len());
    let mut off_branch = 0;
    for p in &grid {
        let exact = rabi_exact(p)?;
        let approx = rabi_approx(p)?;
        off_branch += usize::from(!exact.branch_valid);
        rows.push(SweepRow {
            g_ghz: p.g,
            delta_ghz: p.delta,
            omega_exact_ghz: exact.omega,
            omega_approx_ghz: approx,
            omega_sq_exact: exact.omega * exact.omega,
            omega_sq_approx: approx * approx,
        });
    }
    if off_branch > 0 {
        warn(&format!("{off_branch} rows lie outside the 0-1 branch condition"));
    }
    match format.unwrap_or(Format::Csv) {
        Format::Json => write_json(out, &rows),
        Format::Csv => {
            let table: Vec<Vec<f64>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.g_ghz,
                        r.delta_ghz,
                        r.omega_exact_ghz,
                        r.omega_approx_ghz,
                        r.omega_sq_exact,
                        r.omega_sq_approx,
                    ]
                })
                .collect();
            write_csv(out, &SWEEP_HEADER, &table)
        }
    }
}

#[derive(Serialize)]
struct FluxoniumReport {
    ec: f64,
    el: f64,
    ej: f64,
    flux: f64,
    levels: Vec<f64>,
    nu01: f64,
    nu12: f64,
    alpha: f64,
    channel: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k_charge: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k_flux: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    conjugate_ratio_deviation: Option<f64>,
    n_points: usize,
    phi_max: f64,
    refinement_shift: f64,
    tail_mass: f64,
    converged: bool,
}

pub fn fluxonium(args: &FluxoniumArgs, format: Option<Format>, out: &mut dyn Write) -> Result<()> {
    json_only(format, "fluxonium")?;
    let params = FluxoniumParams::new(args.ec, args.el, args.ej, args.flux)?;
    let default = SolverGrid::default();
    let grid = SolverGrid::new(
        args.phi_max.unwrap_or(default.phi_max),
        args.n_points.unwrap_or(default.n_points),
    )?;
    let spectrum = solve_spectrum(&params, &grid, args.levels)?;
    let k_charge = drive_ratio(&spectrum, DriveChannel::Charge).ok();
    let k_flux = drive_ratio(&spectrum, DriveChannel::Flux).ok();
    let (channel, k) = match args.channel {
        Channel::Charge => ("charge", k_charge),
        Channel::Flux => ("flux", k_flux),
    };
    if k.is_none() {
        warn(&format!("0-1 matrix element vanishes on the {channel} line; k is undefined"));
    }
    let d = spectrum.diagnostics;
    if !d.converged() {
        warn(&format!(
            "grid refinement moves nu01 by {:.2e} GHz; consider more points",
            d.refinement_shift
        ));
    }
    write_json(
        out,
        &FluxoniumReport {
            ec: params.ec,
            el: params.el,
            ej: params.ej,
            flux: params.flux,
            conjugate_ratio_deviation: conjugate_ratio_check(&spectrum).ok(),
            levels: spectrum.levels,
            nu01: spectrum.nu01,
            nu12: spectrum.nu12,
            alpha: spectrum.alpha,
            channel,
            k,
            k_charge,
            k_flux,
            n_points: d.n_points,
            phi_max: d.phi_max,
            refinement_shift: d.refinement_shift,
            tail_mass: d.tail_mass,
            converged: d.converged(),
        },
    )
}

fn correction(arg: CorrectionArg) -> Correction {
    match arg {
        CorrectionArg::None => Correction::None,
        CorrectionArg::Approx => Correction::Approx,
        CorrectionArg::Exact => Correction::Exact,
    }
}

#[derive(Serialize)]
struct GateReport {
    delta: f64,
    alpha: f64,
    k: f64,
    g: f64,
    tau: f64,
    correction: Correction,
    leakage_avg: f64,
    leakage_max: f64,
    conditional_phase: f64,
    phase_error: f64,
    leakage_00: f64,
    leakage_01: f64,
    leakage_10: f64,
    leakage_11: f64,
    rabi_00: f64,
    rabi_01: f64,
    rabi_10: f64,
    rabi_11: f64,
}

#[derive(Serialize)]
struct GateSweepRow {
    alpha_ghz: f64,
    leakage_avg: f64,
    leakage_max: f64,
    phase_error_rad: f64,
}

pub fn gate(args: &GateArgs, format: Option<Format>, out: &mut dyn Write) -> Result<()> {
    let mode = correction(args.correction);
    if let Some(sweep) = args.alpha_sweep {
        let points = sweep_anharmonicity(args.delta, args.k, &sweep.values(), mode)?;
        let rows: Vec<GateSweepRow> = points
            .iter()
            .map(|p| GateSweepRow {
                alpha_ghz: p.alpha,
                leakage_avg: p.leakage_avg,
                leakage_max: p.leakage_max,
                phase_error_rad: p.phase_error,
            })
            .collect();
        return match format.unwrap_or(Format::Csv) {
            Format::Json => write_json(out, &rows),
            Format::Csv => {
                let table: Vec<Vec<f64>> = rows
                    .iter()
                    .map(|r| vec![r.alpha_ghz, r.leakage_avg, r.leakage_max, r.phase_error_rad])
                    .collect();
                write_csv(out, &GATE_SWEEP_HEADER, &table)
            }
        };
    }

    json_only(format, "gate")?;
    let alpha = args
        .alpha
        .ok_or_else(|| CliError::Usage("--alpha or --alpha-sweep is required".into()))?;
    let config = gate_config(args.delta, alpha, args.k)?;
    let r = evaluate_gate(&config, mode)?;
    let leak = |s| r.state(s).leakage();
    let rabi = |s| r.state(s).rabi;
    use ComputationalState::*;
    write_json(
        out,
        &GateReport {
            delta: config.delta,
            alpha: config.alpha,
            k: config.k,
            g: config.g,
            tau: config.tau,
            correction: mode,
            leakage_avg: r.leakage_avg,
            leakage_max: r.leakage_max,
            conditional_phase: r.conditional_phase,
            phase_error: r.phase_error,
            leakage_00: leak(S00),
            leakage_01: leak(S01),
            leakage_10: leak(S10),
            leakage_11: leak(S11),
            rabi_00: rabi(S00),
            rabi_01: rabi(S01),
            rabi_10: rabi(S10),
            rabi_11: rabi(S11),
        },
    )
}

fn input_error(path: &Path, message: String) -> CliError {
    CliError::Input {
        path: path.to_path_buf(),
        message,
    }
}

/// Reads a sweep CSV; `omega_exact_ghz` is taken as the measured frequency
/// with no uncertainty.
pub fn read_sweep_csv(path: &Path) -> Result<RabiDataset> {
    let file = File::open(path).map_err(|e| input_error(path, e.to_string()))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(file);
    let mut records = reader.records();
    let expected = SWEEP_HEADER.join(",");
    match records.next() {
        None => return Err(input_error(path, format!("line 1: empty file, expected header `{expected}`"))),
        Some(Err(e)) => return Err(input_error(path, format!("line 1: {e}"))),
        Some(Ok(header)) => {
            let found: Vec<&str> = header.iter().collect();
            if found != SWEEP_HEADER {
                return Err(input_error(
                    path,
                    format!("line 1: expected header `{expected}`, found `{}`", found.join(",")),
                ));
            }
        }
    }
    let mut rows = Vec::new();
    for record in records {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            input_error(path, format!("line {line}: {e}"))
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| -> Result<f64> {
            let raw = record.get(i).unwrap_or("");
            raw.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    input_error(
                        path,
                        format!("line {line}: field `{}` is not a finite number: `{raw}`", SWEEP_HEADER[i]),
                    )
                })
        };
        rows.push(RabiSample {
            g: field(0)?,
            delta: field(1)?,
            omega: field(2)?,
            sigma_omega: 0.0,
        });
    }
    Ok(RabiDataset::new(rows)?)
}

#[derive(Serialize)]
struct StageFit {
    delta: f64,
    #[serde(flatten)]
    fit: FitResult,
}

#[derive(Serialize)]
struct FitReport {
    source: &'static str,
    #[serde(flatten)]
    gradient: FitResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected_slope: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    noise: Option<f64>,
    stages: Vec<StageFit>,
}

pub fn fit(args: &FitArgs, format: Option<Format>, out: &mut dyn Write) -> Result<()> {
    json_only(format, "fit")?;
    let (source, dataset, expected, seed, noise) = match &args.input {
        Some(path) => ("csv", read_sweep_csv(path)?, None, None, None),
        None => {
            let (alpha, k) = match (args.alpha, args.k) {
                (Some(a), Some(k)) => (a, k),
                _ => return Err(CliError::Usage("synthetic fits need --alpha and --k".into())),
            };
            if args.deltas.is_empty() {
                return Err(CliError::Usage("--deltas needs at least one value".into()));
            }
            let amplitudes = amplitude_grid(args.g_min, args.g_max, args.g_step)?;
            let grid = params_grid(&amplitudes, &args.deltas, alpha, k)?;
            let set = synth_dataset(&grid, args.noise, args.seed)?;
            (
                "synthetic",
                set,
                Some(slope_gradient(k, alpha)?),
                Some(args.seed),
                Some(args.noise),
            )
        }
    };
    let SlopeAnalysis {
        per_detuning,
        gradient,
    } = slope_vs_detuning(&group_by_detuning(&dataset))?;
    write_json(
        out,
        &FitReport {
            source,
            gradient,
            expected_slope: expected,
            seed,
            noise,
            stages: per_detuning
                .into_iter()
                .map(|d| StageFit {
                    delta: d.delta,
                    fit: d.fit,
                })
                .collect(),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amplitude_grid_is_inclusive() {
        let g = amplitude_grid(0.002, 0.02, 0.002).unwrap();
        assert_eq!(g.len(), 10);
        assert!((g[9] - 0.02).abs() < 1e-15);
        assert_eq!(amplitude_grid(0.01, 0.01, 0.5).unwrap(), vec![0.01]);
        assert!(amplitude_grid(0.02, 0.01, 0.001).is_err());
        assert!(amplitude_grid(0.0, 0.01, 0.0).is_err());
        assert!(amplitude_grid(-0.01, 0.01, 0.001).is_err());
    }
}
