//! Turns a [`RunConfig`] into a validated scenario, executes it, and writes
//! the plot-ready artifacts:
//!
//! * `snapshot_NNN.csv` — all four fields (polariton, probe, spin coherence,
//!   bright state) on the grid at each snapshot time;
//! * `timeseries.csv` — control angle, Rabi frequency, transport
//!   coefficients, and pulse statistics at each snapshot time;
//! * `summary.txt` — the resolved configuration (re-loadable as a config),
//!   regime checks, detuning bounds, and the diagnostics report;
//! * `analytic_reference.csv` (on request) — the closed-form expected output.
//!
//! Exit codes: 0 for a clean run, 2 for config or validation failures,
//! 3 when a numerical guard trips or the stored information comes out
//! destroyed (distortion above the destruction threshold).

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use polariton_core::model::{ControlProfile, ModelError, PhysicalParams, ProfileShape, SpatialGrid};
use polariton_core::{
    analyze, check_adiabatic, check_high_density, coefficients_reduced, detuning_limits,
    predict_output, AdiabaticCheck, ComplexField, DetuningLimits, DiagnosticsReport, EvolveError,
    EvolveOptions, HighDensityCheck, PredictMode, Scenario, Trajectory, DISTORTION_DESTROYED,
};
use thiserror::Error;

use crate::config::{ParseError, RunConfig};
use crate::presets;

/// Anything that stops a run before physics gets a say.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Invalid(#[from] ModelError),
    #[error("unknown preset `{0}` (run `polariton presets` for the catalog)")]
    UnknownPreset(String),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Process exit code: 2 for config/validation/usage errors, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            _ => 2,
        }
    }
}

/// A config resolved against the preset catalog, ready to execute.
pub struct ResolvedRun {
    pub scenario: Scenario,
    pub options: EvolveOptions,
    pub emit_reference: bool,
    /// Every field populated; the summary echoes this verbatim.
    pub resolved: RunConfig,
}

/// Resolve `cfg` on top of its preset (or the catalog base when no preset
/// is named) and validate the result.
pub fn resolve(cfg: &RunConfig) -> Result<ResolvedRun, CliError> {
    let mut merged = match &cfg.preset {
        Some(name) => presets::find(name)
            .ok_or_else(|| CliError::UnknownPreset(name.clone()))?
            .config(),
        None => presets::base_config(),
    };
    merged.apply(cfg);

    let get = |value: Option<f64>| value.expect("base config populates every field");
    let params = PhysicalParams {
        g: get(merged.g),
        n_atoms: get(merged.n_atoms),
        gamma_ba: get(merged.gamma_ba),
        gamma_bc: get(merged.gamma_bc),
        delta: get(merged.delta),
        delta_p: get(merged.delta_p),
        c_light: get(merged.c_light),
        cell_length: get(merged.cell_length),
    };
    let profile = ControlProfile {
        // A fixed angle, when given, replaces the switching schedule.
        shape: match merged.constant_theta {
            Some(theta) => ProfileShape::ConstantTheta { theta },
            None => ProfileShape::TanhSwitch {
                u_scale: get(merged.u_scale),
                switch_rate: get(merged.switch_rate),
                t_off: get(merged.t_off),
                t_on: get(merged.t_on),
            },
        },
        omega_floor: get(merged.omega_floor),
    };
    let grid = SpatialGrid {
        z_min: get(merged.z_min),
        z_max: get(merged.z_max),
        n_points: merged.grid_points.expect("base config populates every field"),
    };
    grid.validate()?;
    let input_pulse = Scenario::gaussian_pulse(
        grid,
        get(merged.pulse_amplitude),
        get(merged.pulse_width),
        get(merged.pulse_center),
    );
    let scenario = Scenario {
        params,
        profile,
        grid,
        input_pulse,
        t_end: get(merged.t_end),
        dt: get(merged.dt),
        snapshot_every: get(merged.snapshot_every),
    };
    scenario.validate()?;

    Ok(ResolvedRun {
        options: EvolveOptions {
            spectral_filter: merged.spectral_filter.unwrap_or(false),
        },
        emit_reference: merged.emit_analytic_reference.unwrap_or(false),
        scenario,
        resolved: merged,
    })
}

/// Regime checks and detuning bounds for a resolved run, computed without
/// simulating.
pub struct RegimeReport {
    pub density: HighDensityCheck,
    pub adiabatic: AdiabaticCheck,
    pub limits: DetuningLimits,
    /// Spatial pulse length fed to the checks (m): the input pulse width.
    pub pulse_length: f64,
    /// Control ramp duration fed to the checks (s): 1/switch_rate.
    pub switch_time: f64,
    /// Hold duration fed to the detuning bounds (s): switch-off to
    /// switch-on, or the whole run for a fixed angle.
    pub storage_time: f64,
    /// Group velocity at t = 0 (m/s).
    pub vg0: f64,
}

pub fn regime_report(run: &ResolvedRun) -> RegimeReport {
    let scenario = &run.scenario;
    let pulse_length = run
        .resolved
        .pulse_width
        .expect("base config populates every field");
    let (switch_time, storage_time) = match scenario.profile.shape {
        ProfileShape::TanhSwitch {
            switch_rate,
            t_off,
            t_on,
            ..
        } => (1.0 / switch_rate, t_on - t_off),
        _ => (scenario.t_end, scenario.t_end),
    };
    let state = scenario.profile.state_at(&scenario.params, 0.0);
    let vg0 = coefficients_reduced(&scenario.params, state.theta, state.theta_dot).v_g;
    RegimeReport {
        density: check_high_density(&scenario.params),
        adiabatic: check_adiabatic(&scenario.params, pulse_length, switch_time, vg0),
        limits: detuning_limits(&scenario.params, pulse_length, storage_time),
        pulse_length,
        switch_time,
        storage_time,
        vg0,
    }
}

/// The regime section shared by `summary.txt` and the `limits` subcommand.
pub fn regime_lines(report: &RegimeReport) -> String {
    let mut out = String::new();
    let adiabatic = &report.adiabatic;
    push_kv(&mut out, "out_high_density_ok", report.density.ok);
    push_kv_e(&mut out, "out_high_density_ratio", report.density.ratio);
    push_kv(&mut out, "out_adiabatic_ok", adiabatic.ok);
    push_kv_e(&mut out, "out_pulse_length_m", report.pulse_length);
    push_kv_e(&mut out, "out_pulse_length_min_m", adiabatic.pulse_length_min);
    push_kv_e(&mut out, "out_pulse_margin", adiabatic.pulse_margin);
    push_kv_e(&mut out, "out_switch_time_s", report.switch_time);
    push_kv_e(&mut out, "out_switch_time_min_s", adiabatic.switch_time_min);
    push_kv_e(&mut out, "out_switch_margin", adiabatic.switch_margin);
    push_kv_e(&mut out, "out_vg_initial_m_s", report.vg0);
    push_kv_e(&mut out, "out_storage_time_s", report.storage_time);
    push_kv_e(&mut out, "out_delta_p_max_rad_s", report.limits.delta_p_max);
    push_kv_e(&mut out, "out_delta_max_rad_s", report.limits.delta_max);
    push_kv_e(&mut out, "out_bw_diff_max_rad_s", report.limits.bw_diff_max);
    push_kv_e(&mut out, "out_bw_max_rad_s", report.limits.bw_max);
    out
}

/// What the guard (if any) reported; folded into the summary.
enum Outcome {
    Clean,
    Guard { kind: &'static str, detail: String },
}

/// Execute a resolved run and write all artifacts into `out_dir`.
/// Returns the process exit code (0 or 3); hard failures are `Err`.
pub fn run_scenario(run: &ResolvedRun, out_dir: &Path) -> Result<i32, CliError> {
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;

    let (trajectory, outcome) = match polariton_core::evolve_with(&run.scenario, run.options) {
        Ok(trajectory) => (trajectory, Outcome::Clean),
        Err(EvolveError::Invalid(err)) => return Err(err.into()),
        Err(err @ EvolveError::Wraparound { .. }) => {
            let detail = err.to_string();
            let EvolveError::Wraparound { partial, .. } = err else {
                unreachable!()
            };
            (
                *partial,
                Outcome::Guard {
                    kind: "wraparound",
                    detail,
                },
            )
        }
        Err(err @ EvolveError::Overflow { .. }) => {
            let detail = err.to_string();
            let EvolveError::Overflow { partial, .. } = err else {
                unreachable!()
            };
            (
                *partial,
                Outcome::Guard {
                    kind: "overflow",
                    detail,
                },
            )
        }
    };

    write_snapshots(out_dir, &trajectory)?;
    write_timeseries(out_dir, &trajectory)?;

    let report = analyze(&trajectory);
    let reference = if run.emit_reference {
        Some(predict_output(
            &run.scenario.input_pulse,
            &run.scenario.params,
            &run.scenario.profile,
            run.scenario.t_end,
            PredictMode::IntegratedDecay,
        ))
    } else {
        None
    };
    write_summary(out_dir, run, &trajectory, &outcome, &report, &reference)?;
    if let Some(Ok(expected)) = &reference {
        write_reference(out_dir, expected)?;
    }

    let destroyed = report
        .as_ref()
        .map(|r| r.distortion > DISTORTION_DESTROYED)
        .unwrap_or(false);
    match &outcome {
        Outcome::Clean if destroyed => {
            let distortion = report.as_ref().map(|r| r.distortion).unwrap_or(f64::NAN);
            eprintln!(
                "stored information destroyed: distortion {distortion:.3e} exceeds {DISTORTION_DESTROYED}"
            );
            Ok(3)
        }
        Outcome::Clean => {
            println!(
                "wrote {} snapshots to {}",
                trajectory.snapshots.len(),
                out_dir.display()
            );
            Ok(0)
        }
        Outcome::Guard { kind, detail } => {
            eprintln!("{kind} guard tripped: {detail}");
            eprintln!(
                "wrote {} partial snapshots to {}",
                trajectory.snapshots.len(),
                out_dir.display()
            );
            Ok(3)
        }
    }
}

fn write_file(
    path: &Path,
    fill: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>,
) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut writer = BufWriter::new(file);
    fill(&mut writer)
        .and_then(|()| writer.flush())
        .map_err(|e| CliError::io(path, e))
}

fn write_snapshots(dir: &Path, trajectory: &Trajectory) -> Result<(), CliError> {
    for (index, snapshot) in trajectory.snapshots.iter().enumerate() {
        let path = dir.join(format!("snapshot_{index:03}.csv"));
        write_file(&path, |w| {
            writeln!(
                w,
                "z_m,re_psi,im_psi,re_e,im_e,re_sigma_bc,im_sigma_bc,re_phi,im_phi"
            )?;
            let grid = &snapshot.psi.grid;
            for i in 0..grid.n_points {
                let psi = snapshot.psi.values[i];
                let e = snapshot.e_field.values[i];
                let sigma = snapshot.sigma_bc.values[i];
                let phi = snapshot.phi.values[i];
                writeln!(
                    w,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    grid.z_at(i),
                    psi.re,
                    psi.im,
                    e.re,
                    e.im,
                    sigma.re,
                    sigma.im,
                    phi.re,
                    phi.im,
                )?;
            }
            Ok(())
        })?;
    }
    Ok(())
}

fn write_timeseries(dir: &Path, trajectory: &Trajectory) -> Result<(), CliError> {
    let scenario = &trajectory.scenario;
    write_file(&dir.join("timeseries.csv"), |w| {
        writeln!(
            w,
            "t_s,theta_rad,omega_rad_s,alpha1,alpha2,beta,vg_m_s,psi_peak,psi_l2"
        )?;
        for snapshot in &trajectory.snapshots {
            let state = scenario.profile.state_at(&scenario.params, snapshot.t);
            let set = coefficients_reduced(&scenario.params, state.theta, state.theta_dot);
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                snapshot.t,
                state.theta,
                scenario.profile.omega(&scenario.params, snapshot.t),
                set.alpha1,
                set.alpha2,
                set.beta,
                set.v_g,
                snapshot.psi.peak_abs(),
                snapshot.psi.l2_norm(),
            )?;
        }
        Ok(())
    })
}

fn write_reference(dir: &Path, expected: &ComplexField) -> Result<(), CliError> {
    write_file(&dir.join("analytic_reference.csv"), |w| {
        writeln!(w, "z_m,re_psi_ref,im_psi_ref")?;
        for (i, value) in expected.values.iter().enumerate() {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e}",
                expected.grid.z_at(i),
                value.re,
                value.im
            )?;
        }
        Ok(())
    })
}

fn push_kv(out: &mut String, key: &str, value: impl std::fmt::Display) {
    out.push_str(key);
    out.push_str(" = ");
    out.push_str(&value.to_string());
    out.push('\n');
}

fn push_kv_e(out: &mut String, key: &str, value: f64) {
    push_kv(out, key, format_args!("{value:.16e}"));
}

fn write_summary(
    dir: &Path,
    run: &ResolvedRun,
    trajectory: &Trajectory,
    outcome: &Outcome,
    report: &Result<DiagnosticsReport, polariton_core::DiagnosticsError>,
    reference: &Option<Result<ComplexField, polariton_core::CoeffError>>,
) -> Result<(), CliError> {
    let mut body = String::new();

    body.push_str("# scenario (re-loadable as a config file)\n");
    body.push_str(&run.resolved.to_canonical_string());

    body.push_str("\n# regime checks and admissible-detuning bounds\n");
    body.push_str(&regime_lines(&regime_report(run)));

    body.push_str("\n# run\n");
    push_kv(&mut body, "out_snapshots", trajectory.snapshots.len());
    match outcome {
        Outcome::Clean => push_kv(&mut body, "out_guard", "none"),
        Outcome::Guard { kind, detail } => {
            push_kv(&mut body, "out_guard", kind);
            push_kv(&mut body, "out_guard_detail", detail);
        }
    }
    for (i, warning) in trajectory.warnings.iter().enumerate() {
        push_kv(&mut body, &format!("out_warning_{i}"), warning);
    }
    if let (Some(first), Some(last)) = (trajectory.snapshots.first(), trajectory.snapshots.last())
    {
        let ratio = last.psi.l2_norm() / first.psi.l2_norm();
        push_kv_e(&mut body, "out_l2_ratio", ratio);
        push_kv(&mut body, "out_norm_conserved", (ratio - 1.0).abs() <= 1e-8);
    }

    body.push_str("\n# diagnostics\n");
    match report {
        Ok(report) => {
            push_kv_e(&mut body, "out_window_start_s", report.window.0);
            push_kv_e(&mut body, "out_window_end_s", report.window.1);
            push_kv_e(&mut body, "out_decay_rate_fit_1_s", report.alpha1_fit.rate);
            push_kv_e(&mut body, "out_decay_rate_l2_1_s", report.alpha1_fit.rate_l2);
            push_kv_e(&mut body, "out_decay_fit_residual", report.alpha1_fit.residual);
            push_kv_e(&mut body, "out_distortion", report.distortion);
            push_kv_e(&mut body, "out_fidelity", report.fidelity);
            push_kv(
                &mut body,
                "out_destroyed",
                report.distortion > DISTORTION_DESTROYED,
            );
            for row in &report.analytic_comparison {
                push_kv_e(&mut body, &format!("out_{}_measured", row.name), row.measured);
                push_kv_e(
                    &mut body,
                    &format!("out_{}_predicted", row.name),
                    row.predicted,
                );
                push_kv_e(&mut body, &format!("out_{}_rel_err", row.name), row.rel_err);
            }
            for (i, (t, vg)) in report.vg_series.iter().enumerate() {
                push_kv(
                    &mut body,
                    &format!("out_vg_measured_{i:03}"),
                    format_args!("{t:.16e} {vg:.16e}"),
                );
            }
        }
        Err(err) => push_kv(&mut body, "out_diagnostics_error", err),
    }
    if let Some(Err(err)) = reference {
        push_kv(&mut body, "out_analytic_reference_error", err);
    }

    write_file(&dir.join("summary.txt"), |w| w.write_all(body.as_bytes()))
}
