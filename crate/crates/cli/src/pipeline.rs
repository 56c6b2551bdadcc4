//! One solve plus the full verification suite, shared by the solve and
//! sweep entry points.

use nsexpander_core::asymptotics::{check_leading_order, fit_tail, AsymptoticSummary, ComparisonReport};
use nsexpander_core::cavitating::solve_cavitating;
use nsexpander_core::params::BoundaryData;
use nsexpander_core::profile::{Case, IterationTrace, Profile};
use nsexpander_core::smooth::solve_smooth;
use nsexpander_core::verify::{
    bootstrap_norm, bound_suite, ode_residual, BootstrapConstants, BootstrapReport, BoundReport,
    ResidualReport,
};
use nsexpander_core::Error;

use crate::config::RunSpec;

/// Amplification factor of the standard bootstrap constant choices.
pub const BOOTSTRAP_AMPLIFICATION: f64 = 10.0;

pub struct SolveOutcome {
    pub profile: Profile<f64>,
    pub trace: IterationTrace<f64>,
    pub residuals: ResidualReport<f64>,
    pub bootstrap: BootstrapReport<f64>,
    pub bounds: BoundReport<f64>,
    pub asymptotics: AsymptoticSummary<f64>,
    pub comparison: ComparisonReport<f64>,
}

/// Standard bootstrap constants for a boundary anchor.
pub fn standard_constants(boundary: &BoundaryData<f64>) -> BootstrapConstants<f64> {
    match boundary {
        BoundaryData::Smooth(b) => {
            BootstrapConstants::smooth_choice(b.theta0, BOOTSTRAP_AMPLIFICATION)
        }
        BoundaryData::Cavitating(b) => {
            BootstrapConstants::cavitating_choice(b.alpha, b.p_delta, BOOTSTRAP_AMPLIFICATION)
        }
    }
}

/// Solve the configured case and run every a posteriori check on the result.
pub fn solve_and_verify(spec: &RunSpec) -> Result<SolveOutcome, Error> {
    let (profile, trace) = match (&spec.boundary, spec.case) {
        (BoundaryData::Smooth(b), Case::Smooth) => solve_smooth(&spec.params, b, &spec.config)?,
        (BoundaryData::Cavitating(b), Case::Cavitating) => {
            solve_cavitating(&spec.params, b, &spec.config)?
        }
        _ => return Err(Error::InvalidInput("case/boundary mismatch".into())),
    };
    let residuals = ode_residual(&profile, &spec.params)?;
    let bootstrap = bootstrap_norm(&profile, &standard_constants(&spec.boundary), &spec.params)?;
    let bounds = bound_suite(&profile, &spec.params)?;
    let asymptotics = fit_tail(&profile)?;
    let comparison = check_leading_order(&asymptotics, &spec.params, &spec.boundary);
    Ok(SolveOutcome {
        profile,
        trace,
        residuals,
        bootstrap,
        bounds,
        asymptotics,
        comparison,
    })
}
