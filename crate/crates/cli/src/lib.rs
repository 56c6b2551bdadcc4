//! Library half of the command-line tool: configuration assembly, the solve
//! and sweep drivers, and the stable output writers. The binary in
//! `main.rs` is a thin argument-parsing shell over [`run_solve`] and
//! [`run_sweep`].

pub mod config;
pub mod output;
pub mod pipeline;
pub mod plot;

use std::path::Path;

use nsexpander_core::params::validate_solve;
use nsexpander_core::params::ValidationThresholds;

use config::{RunSpec, Settings, SweepSpec};
use output::{profile_csv, summary_json, write_atomic, SummaryInputs};
use pipeline::solve_and_verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Environment variable capping sweep parallelism.
pub const THREADS_ENV: &str = "NSEXPANDER_THREADS";

fn io_fail(what: &str, path: &Path, err: std::io::Error) -> i32 {
    eprintln!("error: cannot write {what} {}: {err}", path.display());
    EXIT_IO
}

/// Execute one solve with outputs; returns the process exit code.
pub fn run_solve(spec: &RunSpec) -> i32 {
    let report = validate_solve(
        &spec.params,
        &spec.boundary,
        &spec.config,
        &ValidationThresholds::default(),
    );
    if !report.passed() {
        for check in report.failures() {
            eprintln!("validation failed: {} ({})", check.name, check.detail);
        }
        return EXIT_VALIDATION;
    }
    let outcome = match solve_and_verify(spec) {
        Ok(outcome) => outcome,
        Err(err) => {
            eprintln!("solver failed: {err}");
            return EXIT_NO_CONVERGENCE;
        }
    };
    if let Some(path) = &spec.out {
        let csv = profile_csv(&outcome.profile);
        if let Err(err) = write_atomic(path, csv.as_bytes()) {
            return io_fail("profile", path, err);
        }
    }
    if let Some(path) = &spec.summary {
        let json = summary_json(&SummaryInputs {
            params: &spec.params,
            boundary: &spec.boundary,
            config: &spec.config,
            trace: &outcome.trace,
            residuals: &outcome.residuals,
            bootstrap: &outcome.bootstrap,
            bounds: &outcome.bounds,
            asymptotics: &outcome.asymptotics,
            comparison: &outcome.comparison,
        });
        if let Err(err) = write_atomic(path, json.as_bytes()) {
            return io_fail("summary", path, err);
        }
    }
    if let Some(dir) = &spec.plots {
        if let Err(err) = plot::emit_plots_svg(
            &outcome.profile,
            &outcome.asymptotics,
            spec.params.d,
            dir,
        ) {
            return io_fail("plots", dir, err);
        }
    }
    eprintln!(
        "converged in {} sweeps; U_inf = {:.6e}, Theta_inf = {:.6e}, P_inf = {:.6e}, max Z = {:.3}",
        outcome.trace.iterations(),
        outcome.asymptotics.u_inf,
        outcome.asymptotics.theta_inf,
        outcome.asymptotics.p_inf,
        outcome.bootstrap.max,
    );
    EXIT_OK
}

enum RowStatus {
    Ok,
    Invalid,
    Failed,
}

struct SweepRow {
    value: f64,
    status: RowStatus,
    fields: Option<[f64; 10]>,
}

fn sweep_worker(base: &Settings, key: &str, value: f64) -> SweepRow {
    let mut settings = base.clone();
    settings.set(key, format!("{value:.17e}"));
    let spec = match RunSpec::from_settings(&settings) {
        Ok(spec) => spec,
        Err(_) => return SweepRow { value, status: RowStatus::Invalid, fields: None },
    };
    let report = validate_solve(
        &spec.params,
        &spec.boundary,
        &spec.config,
        &ValidationThresholds::default(),
    );
    if !report.passed() {
        return SweepRow { value, status: RowStatus::Invalid, fields: None };
    }
    match solve_and_verify(&spec) {
        Ok(o) => SweepRow {
            value,
            status: RowStatus::Ok,
            fields: Some([
                o.trace.iterations() as f64,
                o.asymptotics.p_inf,
                o.asymptotics.u_inf,
                o.asymptotics.theta_inf,
                o.comparison.u_inf_rel_dev,
                o.comparison.theta_inf_rel_dev,
                o.bootstrap.max,
                o.residuals.sup[0],
                o.residuals.sup[1],
                o.residuals.sup[2],
            ]),
        },
        Err(_) => SweepRow { value, status: RowStatus::Failed, fields: None },
    }
}

/// Execute a parameter sweep: one solve per value, parallel up to the
/// `NSEXPANDER_THREADS` cap, rows emitted in input order. Infeasible points
/// are recorded, not fatal; the exit code reports the worst row.
pub fn run_sweep(base: &Settings, sweep: &SweepSpec) -> i32 {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
        })
        .min(sweep.values.len().max(1));

    let mut rows: Vec<Option<SweepRow>> = Vec::new();
    rows.resize_with(sweep.values.len(), || None);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let rows_mutex = std::sync::Mutex::new(&mut rows);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= sweep.values.len() {
                    break;
                }
                let row = sweep_worker(base, &sweep.key, sweep.values[i]);
                rows_mutex.lock().unwrap()[i] = Some(row);
            });
        }
    });

    let mut text = format!(
        "{},status,iterations,P_inf,U_inf,Theta_inf,U_inf_rel_dev,Theta_inf_rel_dev,bootstrap_max_Z,residual_mass,residual_momentum,residual_energy\n",
        sweep.key
    );
    let mut worst = EXIT_OK;
    for row in rows.into_iter().map(Option::unwrap) {
        let status = match row.status {
            RowStatus::Ok => "ok",
            RowStatus::Invalid => {
                worst = worst.max(EXIT_VALIDATION);
                "invalid"
            }
            RowStatus::Failed => {
                worst = worst.max(EXIT_NO_CONVERGENCE);
                "no-convergence"
            }
        };
        match row.fields {
            Some(f) => {
                text.push_str(&format!(
                    "{:.16e},{status},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                    row.value, f[0] as usize, f[1], f[2], f[3], f[4], f[5], f[6], f[7], f[8], f[9]
                ));
            }
            None => {
                text.push_str(&format!("{:.16e},{status},,,,,,,,,,\n", row.value));
            }
        }
    }

    let out_path = base.get("summary").map(std::path::PathBuf::from);
    match out_path {
        Some(path) => {
            if let Err(err) = write_atomic(&path, text.as_bytes()) {
                return io_fail("sweep summary", &path, err);
            }
        }
        None => print!("{text}"),
    }
    worst
}
