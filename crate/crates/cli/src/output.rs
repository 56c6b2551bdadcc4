//! Stable output formats: full-precision profile CSV, the versioned JSON
//! summary, and atomic file writes (temp file + rename) so readers never see
//! a partial file.
//!
//! Data files carry no timestamps or machine identifiers: identical inputs
//! produce byte-identical outputs.

use std::fs;
use std::io::Write;
use std::path::Path;

use nsexpander_core::asymptotics::{AsymptoticSummary, ComparisonReport};
use nsexpander_core::grid::{GridFunction, RadialGrid};
use nsexpander_core::params::{BoundaryData, PhysicalParams, SolveConfig};
use nsexpander_core::profile::{Case, IterationTrace, Profile};
use nsexpander_core::verify::{BootstrapReport, BoundReport, ResidualReport};

/// Atomically write `contents` to `path` via a sibling temp file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let tmp = path.with_extension("tmp-partial");
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(contents)?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    if let Some(dir) = dir {
        // Best effort: persist the rename itself.
        let _ = fs::File::open(dir).and_then(|d| d.sync_all());
    }
    Ok(())
}

/// Render the profile as CSV with header `r,P,U,Theta,dU,dTheta`, one row
/// per node, 17 significant digits, LF line endings.
pub fn profile_csv(profile: &Profile<f64>) -> String {
    let mut out = String::with_capacity(profile.grid.len() * 96);
    out.push_str("r,P,U,Theta,dU,dTheta\n");
    for (i, &r) in profile.grid.nodes().iter().enumerate() {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            r,
            profile.p.values()[i],
            profile.u.values()[i],
            profile.theta.values()[i],
            profile.du.values()[i],
            profile.dtheta.values()[i],
        ));
    }
    out
}

/// Parse a profile CSV produced by [`profile_csv`] back into a `Profile`.
/// The grid kind is inferred from the first radius.
pub fn parse_profile_csv(
    text: &str,
    case: Case,
    boundary: BoundaryData<f64>,
) -> Result<Profile<f64>, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty file")?;
    if header != "r,P,U,Theta,dU,dTheta" {
        return Err(format!("unexpected header: {header}"));
    }
    let mut cols: [Vec<f64>; 6] = Default::default();
    for (n, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut it = line.split(',');
        for col in cols.iter_mut() {
            let field = it.next().ok_or_else(|| format!("row {n}: too few fields"))?;
            col.push(field.parse::<f64>().map_err(|e| format!("row {n}: {e}"))?);
        }
    }
    let [r, p, u, theta, du, dtheta] = cols;
    let grid = RadialGrid::from_nodes(r).map_err(|e| e.to_string())?;
    let gf = |vals: Vec<f64>| GridFunction::new(grid.clone(), vals).map_err(|e| e.to_string());
    Ok(Profile {
        p: gf(p)?,
        u: gf(u)?,
        theta: gf(theta)?,
        du: gf(du)?,
        dtheta: gf(dtheta)?,
        case,
        boundary,
        grid,
    })
}

/// Everything the JSON summary serializes.
pub struct SummaryInputs<'a> {
    pub params: &'a PhysicalParams<f64>,
    pub boundary: &'a BoundaryData<f64>,
    pub config: &'a SolveConfig<f64>,
    pub trace: &'a IterationTrace<f64>,
    pub residuals: &'a ResidualReport<f64>,
    pub bootstrap: &'a BootstrapReport<f64>,
    pub bounds: &'a BoundReport<f64>,
    pub asymptotics: &'a AsymptoticSummary<f64>,
    pub comparison: &'a ComparisonReport<f64>,
}

/// Render the single-object JSON summary (`schema: 1`).
pub fn summary_json(inputs: &SummaryInputs) -> String {
    use serde_json::json;
    let (case, boundary_json, r_min) = match inputs.boundary {
        BoundaryData::Smooth(b) => (
            "smooth",
            json!({ "p0": b.p0, "theta0": b.theta0 }),
            serde_json::Value::Null,
        ),
        BoundaryData::Cavitating(b) => (
            "cavitating",
            json!({
                "p_delta": b.p_delta,
                "delta": b.delta,
                "theta0": b.theta0,
                "alpha": b.alpha,
            }),
            json!(inputs.config.effective_r_min(b.delta)),
        ),
    };
    let bound_constants: serde_json::Map<String, serde_json::Value> = inputs
        .bounds
        .bounds
        .iter()
        .map(|fb| (fb.name.to_string(), json!(fb.constant)))
        .chain([
            ("degeneracy_margin".to_string(), json!(inputs.bounds.degeneracy_margin)),
            ("density_bracket_ok".to_string(), json!(inputs.bounds.density_bracket_ok)),
        ])
        .collect();
    let value = json!({
        "schema": 1,
        "case": case,
        "params": {
            "d": inputs.params.d,
            "mu": inputs.params.mu,
            "lambda": inputs.params.lambda,
            "c_v": inputs.params.c_v,
            "kappa": inputs.params.kappa,
            "r_gas": inputs.params.r_gas,
        },
        "boundary": boundary_json,
        "grid": {
            "kind": if r_min.is_null() { "from_zero" } else { "from_rmin" },
            "r_max": inputs.config.r_max,
            "cells": inputs.config.n_cells,
            "grading": inputs.config.grading,
            "r_min": r_min,
        },
        "iterations": inputs.trace.iterations(),
        "contraction_ratios": inputs.trace.contraction_ratios(),
        "residual_norms": {
            "mass": inputs.residuals.sup[0],
            "momentum": inputs.residuals.sup[1],
            "energy": inputs.residuals.sup[2],
        },
        "bootstrap_max_Z": inputs.bootstrap.max,
        "asymptotics": {
            "P_inf": inputs.asymptotics.p_inf,
            "U_inf": inputs.asymptotics.u_inf,
            "Theta_inf": inputs.asymptotics.theta_inf,
            "p_increment": inputs.asymptotics.p_increment,
            "leading_order_deviation": {
                "P_inf": inputs.comparison.p_inf_rel_dev,
                "U_inf": inputs.comparison.u_inf_rel_dev,
                "Theta_inf": inputs.comparison.theta_inf_rel_dev,
            },
        },
        "bound_constants": bound_constants,
    });
    let mut text = serde_json::to_string_pretty(&value).expect("serializable");
    text.push('\n');
    text
}
