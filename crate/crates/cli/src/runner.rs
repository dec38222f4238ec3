//! Run orchestration: envelope resolution, forward/spectrum/inverse
//! execution, sweep fan-out, and persisted manifests.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use photon_shaper_core as core;
use photon_shaper_core::{
    efficiency_curve, io, render_pulse, round_trip, solve_ode_with, spectrum, wavepacket,
    DesignTarget, Envelope, SolveOptions, SystemParams,
};

use crate::config::{ConfigError, EnvelopeSource, InverseSpec, Mode, Plan, ResolvedRun};

/// Anything that can abort a run, tagged for the process exit code.
#[derive(Debug)]
pub enum RunError {
    Config(String),
    Numeric(String),
    Capacity(String),
}

fn config_run_error(e: ConfigError) -> RunError {
    if e.capacity {
        RunError::Capacity(e.to_string())
    } else {
        RunError::Config(e.to_string())
    }
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numeric(_) => 3,
            RunError::Capacity(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            RunError::Config(_) => "config",
            RunError::Numeric(_) => "numeric",
            RunError::Capacity(_) => "capacity",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            RunError::Config(m) | RunError::Numeric(m) | RunError::Capacity(m) => m,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} error: {}", self.kind(), self.message())
    }
}

impl From<core::Error> for RunError {
    fn from(e: core::Error) -> Self {
        match e {
            core::Error::Capacity(m) => RunError::Capacity(m),
            core::Error::Parameter(m) | core::Error::Refinement(m) | core::Error::Format(m) => {
                RunError::Config(m)
            }
            core::Error::Io(io_err) => RunError::Numeric(format!("io: {io_err}")),
            core::Error::Domain(m)
            | core::Error::Coverage(m)
            | core::Error::SingularCoupling(m)
            | core::Error::UnphysicalTarget(m)
            | core::Error::DesignInfeasible(m)
            | core::Error::UndefinedShape(m) => RunError::Numeric(m),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub mode: String,
    /// canonical configuration text; re-running it reproduces the outputs
    pub config: String,
    pub wall_time_s: f64,
    pub summary: Summary,
    pub outputs: Vec<String>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
pub struct Summary {
    pub eta_t: f64,
    pub peak_abs_phi: f64,
}

#[derive(Debug, Serialize)]
struct DesignReport {
    params: ParamsJson,
    target_spec: String,
    eta_target: f64,
    achieved_eta: f64,
    l2_error: f64,
    phase_max: f64,
}

#[derive(Debug, Serialize)]
struct ParamsJson {
    rabi_r: f64,
    delta_k: f64,
    delta_p: f64,
    gamma_rad_ratio: f64,
    gamma_total: f64,
}

impl From<&SystemParams> for ParamsJson {
    fn from(p: &SystemParams) -> Self {
        Self {
            rabi_r: p.rabi_r,
            delta_k: p.delta_k,
            delta_p: p.delta_p,
            gamma_rad_ratio: p.gamma_rad_ratio,
            gamma_total: p.gamma_total,
        }
    }
}

fn resolve_envelope(source: &EnvelopeSource, grid: &core::TimeGrid) -> Result<Envelope, RunError> {
    match source {
        EnvelopeSource::Spec(spec) => Ok(render_pulse(spec, grid)?),
        EnvelopeSource::Csv(path) => Ok(io::read_envelope_csv(path)?),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), RunError> {
    let text =
        serde_json::to_string_pretty(value).map_err(|e| RunError::Numeric(format!("json: {e}")))?;
    io::write_atomic(path, &(text + "\n"))?;
    Ok(())
}

/// Executes one resolved run into `dir`, returning its summary.
pub fn execute_single(
    run: &ResolvedRun,
    mode: Mode,
    dir: &Path,
    force_coarse: bool,
) -> Result<Summary, RunError> {
    fs::create_dir_all(dir).map_err(|e| RunError::Numeric(format!("mkdir: {e}")))?;
    let started = Instant::now();
    let opts = SolveOptions {
        allow_coarse: force_coarse,
        ..Default::default()
    };
    let coupling = resolve_envelope(&run.coupling, &run.grid)?;
    let mut outputs = Vec::new();
    let mut summary = Summary::default();

    match (&run.inverse, mode) {
        // design pipeline
        (Some(inverse), _) => {
            let InverseSpec { target, eta_target } = inverse;
            let design_target = DesignTarget::from_profile(target, &run.grid, *eta_target)?;
            let report = round_trip(&design_target, &run.params, &coupling)?;

            let traj = solve_ode_with(&run.params, &report.pump, &coupling, &run.grid, &opts)?;
            io::write_trajectory_csv(&dir.join("trajectory.csv"), &traj)?;
            outputs.push("trajectory.csv".into());
            io::write_wavepacket_csv(&dir.join("wavepacket.csv"), &report.achieved)?;
            outputs.push("wavepacket.csv".into());
            io::write_envelope_csv(&dir.join("pump.csv"), &report.pump)?;
            outputs.push("pump.csv".into());
            io::write_envelope_csv(&dir.join("coupling.csv"), &coupling)?;
            outputs.push("coupling.csv".into());

            let json = DesignReport {
                params: (&run.params).into(),
                target_spec: target.to_string(),
                eta_target: *eta_target,
                achieved_eta: report.achieved_eta,
                l2_error: report.l2_error,
                phase_max: report.phase_max,
            };
            write_json(&dir.join("design_report.json"), &json)?;
            outputs.push("design_report.json".into());

            summary.eta_t = report.achieved_eta;
            summary.peak_abs_phi = report.achieved.abs_phi().into_iter().fold(0.0, f64::max);
        }
        // forward / spectrum pipeline
        (None, _) => {
            let pump_source = run
                .pump
                .as_ref()
                .ok_or_else(|| RunError::Config("forward run without a pump".into()))?;
            let pump = resolve_envelope(pump_source, &run.grid)?;
            let traj = solve_ode_with(&run.params, &pump, &coupling, &run.grid, &opts)?;

            io::write_trajectory_csv(&dir.join("trajectory.csv"), &traj)?;
            outputs.push("trajectory.csv".into());
            io::write_envelope_csv(&dir.join("pump.csv"), &pump)?;
            outputs.push("pump.csv".into());
            io::write_envelope_csv(&dir.join("coupling.csv"), &coupling)?;
            outputs.push("coupling.csv".into());

            let eta = efficiency_curve(&traj, &run.params);
            summary.eta_t = eta[eta.len() - 1];
            if summary.eta_t > 0.0 {
                let wp = wavepacket(&traj, &run.params, &coupling, run.grid.t_end())?;
                io::write_wavepacket_csv(&dir.join("wavepacket.csv"), &wp)?;
                outputs.push("wavepacket.csv".into());
                summary.peak_abs_phi = wp.abs_phi().into_iter().fold(0.0, f64::max);
            }

            if mode == Mode::Spectrum {
                let m = run.spectrum_points;
                let span = run.spectrum_span;
                let delta: Vec<f64> = (0..m)
                    .map(|k| run.params.delta_k - span + 2.0 * span * k as f64 / (m - 1) as f64)
                    .collect();
                let sd = spectrum(&traj, &run.params, &coupling, run.grid.t_end(), &delta)?;
                io::write_spectrum_csv(&dir.join("spectrum.csv"), &sd)?;
                outputs.push("spectrum.csv".into());
            }
        }
    }

    let manifest = Manifest {
        version: core::VERSION.to_string(),
        mode: mode.name().to_string(),
        config: run.canonical.clone(),
        wall_time_s: started.elapsed().as_secs_f64(),
        summary: Summary {
            eta_t: summary.eta_t,
            peak_abs_phi: summary.peak_abs_phi,
        },
        outputs: outputs.clone(),
    };
    write_json(&dir.join("manifest.json"), &manifest)?;
    Ok(summary)
}

/// One row of a sweep/figure aggregate.
struct SweepRow {
    values: Vec<(String, String)>,
    status: String,
    eta_t: f64,
    runtime_s: f64,
}

/// Executes a plan. Forward/spectrum/inverse run once into the output
/// directory; sweep and figure modes fan out over the expanded combinations
/// into numbered subdirectories plus an aggregate CSV.
pub fn execute(
    plan: &Plan,
    out_override: Option<&Path>,
    force_coarse: bool,
) -> Result<(), RunError> {
    let base = plan.resolve(&[]).map_err(config_run_error)?;
    let out_dir: PathBuf = out_override
        .map(Path::to_path_buf)
        .unwrap_or_else(|| base.out_dir.clone());

    match plan.mode {
        Mode::Forward | Mode::Inverse | Mode::Spectrum => {
            let summary = execute_single(&base, plan.mode, &out_dir, force_coarse)?;
            println!(
                "{}: eta_T = {}, peak |phi| = {}",
                plan.mode.name(),
                summary.eta_t,
                summary.peak_abs_phi
            );
            Ok(())
        }
        Mode::Sweep | Mode::Figure => {
            let combos = plan.expand();
            if combos.is_empty() {
                return Err(RunError::Config("sweep expanded to no runs".into()));
            }
            fs::create_dir_all(&out_dir).map_err(|e| RunError::Numeric(format!("mkdir: {e}")))?;

            let threads = std::env::var("PHOTON_SHAPER_THREADS")
                .ok()
                .and_then(|v| v.parse::<usize>().ok())
                .filter(|n| *n > 0);
            let pool = {
                let mut builder = rayon::ThreadPoolBuilder::new();
                if let Some(n) = threads {
                    builder = builder.num_threads(n);
                }
                builder
                    .build()
                    .map_err(|e| RunError::Numeric(format!("thread pool: {e}")))?
            };

            let rows: Vec<SweepRow> = pool.install(|| {
                combos
                    .par_iter()
                    .enumerate()
                    .map(|(idx, overrides)| {
                        let dir = out_dir.join(format!("run_{idx:03}"));
                        let started = Instant::now();
                        let result =
                            plan.resolve(overrides)
                                .map_err(config_run_error)
                                .and_then(|run| {
                                    // every figure panel carries its packet; the
                                    // underlying run type decides the rest
                                    let single_mode = if run.inverse.is_some() {
                                        Mode::Inverse
                                    } else if plan.mode == Mode::Spectrum {
                                        Mode::Spectrum
                                    } else {
                                        Mode::Forward
                                    };
                                    execute_single(&run, single_mode, &dir, force_coarse)
                                });
                        let runtime_s = started.elapsed().as_secs_f64();
                        match result {
                            Ok(summary) => SweepRow {
                                values: overrides.clone(),
                                status: "ok".into(),
                                eta_t: summary.eta_t,
                                runtime_s,
                            },
                            Err(e) => SweepRow {
                                values: overrides.clone(),
                                status: format!("error:{}", e.kind()),
                                eta_t: f64::NAN,
                                runtime_s,
                            },
                        }
                    })
                    .collect()
            });

            // aggregate CSV: swept values in axis order, then eta, status,
            // and wall time (the one column excluded from byte-level
            // reproducibility)
            let axis_names: Vec<String> = plan.sweep.iter().map(|(k, _)| k.clone()).collect();
            let mut csv = String::from("# ");
            for name in &axis_names {
                csv.push_str(name);
                csv.push(',');
            }
            csv.push_str("eta_T,status,runtime_s\n");
            for row in &rows {
                for (_, v) in &row.values {
                    csv.push_str(v);
                    csv.push(',');
                }
                csv.push_str(&format!("{},{},{}\n", row.eta_t, row.status, row.runtime_s));
            }
            let aggregate_name = if plan.mode == Mode::Figure {
                "summary.csv"
            } else {
                "sweep.csv"
            };
            io::write_atomic(&out_dir.join(aggregate_name), &csv)?;

            let manifest = Manifest {
                version: core::VERSION.to_string(),
                mode: plan.mode.name().to_string(),
                config: base.canonical.clone(),
                wall_time_s: rows.iter().map(|r| r.runtime_s).sum(),
                summary: Summary::default(),
                outputs: (0..rows.len())
                    .map(|i| format!("run_{i:03}"))
                    .chain([aggregate_name.to_string()])
                    .collect(),
            };
            write_json(&out_dir.join("manifest.json"), &manifest)?;

            let failed = rows.iter().filter(|r| r.status != "ok").count();
            println!(
                "{}: {} runs, {} failed, aggregate in {}",
                plan.mode.name(),
                rows.len(),
                failed,
                out_dir.join(aggregate_name).display()
            );
            if failed > 0 {
                return Err(RunError::Numeric(format!(
                    "{failed} of {} sweep runs failed (see {aggregate_name})",
                    rows.len()
                )));
            }
            Ok(())
        }
    }
}
