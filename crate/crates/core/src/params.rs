//! Fluid constants, per-case boundary anchors, solve configuration and the
//! feasibility checks guarding a solve.
//!
//! Validation is report-based rather than abort-based so that parameter
//! sweeps can record infeasible points instead of dying on them.

use crate::{Error, Scalar};

/// Constants of the gas: ideal-gas constant, Lame viscosities, heat capacity,
/// thermal conductivity and the spatial dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams<S> {
    pub r_gas: S,
    pub mu: S,
    pub lambda: S,
    pub c_v: S,
    pub kappa: S,
    pub d: u32,
}

impl<S: Scalar> PhysicalParams<S> {
    /// `2*mu + lambda`, the viscous denominator used throughout the momentum
    /// equation. Positive whenever the Lame admissibility condition
    /// `mu > 0, 2*mu + d*lambda >= 0` holds with `d >= 1`.
    pub fn viscosity_sum(&self) -> S {
        S::lit(2.0) * self.mu + self.lambda
    }

    /// Spatial dimension as a scalar.
    pub fn dim(&self) -> S {
        S::of_usize(self.d as usize)
    }
}

/// Boundary anchor for the smooth regime: center density and temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothBoundaryData<S> {
    pub p0: S,
    pub theta0: S,
}

/// Boundary anchor for the cavitating regime. The density is prescribed at
/// the anchor radius `delta` (the value at the origin is zero and carries no
/// information); `alpha` is the center velocity slope, constrained to
/// `(0, 1/2)` by the characteristic non-degeneracy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavitatingBoundaryData<S> {
    pub p_delta: S,
    pub delta: S,
    pub theta0: S,
    pub alpha: S,
}

impl<S: Scalar> CavitatingBoundaryData<S> {
    /// The vacuum emergence exponent `2*d*alpha / (1 - 2*alpha)`: the density
    /// grows like `P_delta * (r/delta)^exponent` out of the origin.
    pub fn vacuum_exponent(&self, d: u32) -> S {
        let two = S::lit(2.0);
        two * S::of_usize(d as usize) * self.alpha / (S::one() - two * self.alpha)
    }

    /// Seven-term smallness functional gating the cavitating construction:
    /// `P_delta + delta + Theta0 + alpha + P_delta*Theta0/alpha
    ///  + alpha^2/(P_delta*Theta0) + alpha*ln(1/(P_delta*delta^2))`.
    pub fn smallness(&self) -> S {
        let b = self;
        b.p_delta
            + b.delta
            + b.theta0
            + b.alpha
            + b.p_delta * b.theta0 / b.alpha
            + b.alpha * b.alpha / (b.p_delta * b.theta0)
            + b.alpha * (S::one() / (b.p_delta * b.delta * b.delta)).ln()
    }
}

/// Either boundary anchor; carried by solved profiles as a snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryData<S> {
    Smooth(SmoothBoundaryData<S>),
    Cavitating(CavitatingBoundaryData<S>),
}

/// Discretization and stopping parameters for a solve.
///
/// `r_min` only applies to the cavitating case (the mesh cannot reach the
/// origin where the density transport exponent diverges); when `None` it
/// defaults to `delta * 1e-3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveConfig<S> {
    pub r_max: S,
    pub n_cells: usize,
    pub grading: S,
    pub picard_tol: S,
    pub max_iter: usize,
    pub r_min: Option<S>,
    pub damping: S,
}

impl<S: Scalar> SolveConfig<S> {
    /// Defaults for the smooth regime. The truncation radius 30 is far into
    /// the Gaussian-weighted tail for order-one center densities, so the
    /// Volterra structure makes the restriction to `[0, r_max]` exact.
    pub fn smooth_default() -> Self {
        SolveConfig {
            r_max: S::lit(30.0),
            n_cells: 4000,
            grading: S::lit(2.0),
            picard_tol: S::lit(1e-12),
            max_iter: 200,
            r_min: None,
            damping: S::one(),
        }
    }

    /// Defaults for the cavitating regime. Small anchor densities push the
    /// far-field transition out to `r ~ 1/sqrt(P_delta)`, so the default
    /// truncation radius is larger than in the smooth case.
    pub fn cavitating_default() -> Self {
        SolveConfig {
            r_max: S::lit(150.0),
            n_cells: 4000,
            grading: S::lit(2.0),
            picard_tol: S::lit(1e-12),
            max_iter: 200,
            r_min: None,
            damping: S::one(),
        }
    }

    /// Effective inner seeding radius for a cavitating solve.
    pub fn effective_r_min(&self, delta: S) -> S {
        self.r_min.unwrap_or(delta * S::lit(1e-3))
    }

    fn check(&self, boundary: &BoundaryData<S>, report: &mut ValidationReport<S>) {
        report.push(
            "picard_tol > 0",
            self.picard_tol > S::zero(),
            format!("picard_tol = {}", self.picard_tol),
        );
        report.push(
            "0 < damping <= 1",
            self.damping > S::zero() && self.damping <= S::one(),
            format!("damping = {}", self.damping),
        );
        report.push("max_iter >= 1", self.max_iter >= 1, format!("max_iter = {}", self.max_iter));
        report.push(
            "n_cells >= 32",
            self.n_cells >= 32,
            format!("n_cells = {}", self.n_cells),
        );
        match boundary {
            BoundaryData::Smooth(_) => {
                report.push("r_max > 0", self.r_max > S::zero(), format!("r_max = {}", self.r_max));
            }
            BoundaryData::Cavitating(b) => {
                report.push(
                    "r_max > delta",
                    self.r_max > b.delta,
                    format!("r_max = {}, delta = {}", self.r_max, b.delta),
                );
                let r_min = self.effective_r_min(b.delta);
                report.push(
                    "0 < r_min < delta",
                    r_min > S::zero() && r_min < b.delta,
                    format!("r_min = {}, delta = {}", r_min, b.delta),
                );
            }
        }
    }
}

/// Feasibility thresholds. The theory only asserts existence of sufficiently
/// small thresholds without quantifying them; these defaults are empirical
/// and deliberately exposed as configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationThresholds<S> {
    /// Upper bound on the smooth center temperature `Theta0`.
    pub eps_smooth: S,
    /// Upper bound on the cavitating smallness functional.
    pub eps_cav: S,
}

impl<S: Scalar> Default for ValidationThresholds<S> {
    fn default() -> Self {
        ValidationThresholds {
            eps_smooth: S::lit(0.1),
            eps_cav: S::lit(0.5),
        }
    }
}

/// Outcome of one feasibility check.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Pass/fail per invariant, plus the evaluated smallness functional for the
/// cavitating case. Never aborts: sweeps record infeasible points.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport<S> {
    pub checks: Vec<ConstraintCheck>,
    pub smallness: Option<S>,
}

impl<S: Scalar> ValidationReport<S> {
    fn new() -> Self {
        ValidationReport {
            checks: Vec::new(),
            smallness: None,
        }
    }

    fn push(&mut self, name: &'static str, passed: bool, detail: String) {
        self.checks.push(ConstraintCheck { name, passed, detail });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConstraintCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Convert to a hard error listing every violated constraint.
    pub fn into_result(self) -> Result<Self, Error> {
        if self.passed() {
            Ok(self)
        } else {
            let names: Vec<&str> = self.failures().map(|c| c.name).collect();
            Err(Error::InvalidInput(format!(
                "validation failed: {}",
                names.join("; ")
            )))
        }
    }
}

fn check_physical<S: Scalar>(p: &PhysicalParams<S>, report: &mut ValidationReport<S>) {
    report.push("mu > 0", p.mu > S::zero(), format!("mu = {}", p.mu));
    let lame = S::lit(2.0) * p.mu + S::of_usize(p.d as usize) * p.lambda;
    report.push(
        "2*mu + d*lambda >= 0",
        lame >= S::zero(),
        format!("2*mu + d*lambda = {}", lame),
    );
    report.push("kappa > 0", p.kappa > S::zero(), format!("kappa = {}", p.kappa));
    report.push("c_v > 0", p.c_v > S::zero(), format!("c_v = {}", p.c_v));
    report.push("r_gas > 0", p.r_gas > S::zero(), format!("r_gas = {}", p.r_gas));
    report.push("d >= 3", p.d >= 3, format!("d = {}", p.d));
}

/// Check the fluid constants and a boundary anchor against their invariants
/// and the configured feasibility thresholds. Pure: equal inputs give equal
/// reports.
pub fn validate_params<S: Scalar>(
    p: &PhysicalParams<S>,
    boundary: &BoundaryData<S>,
) -> ValidationReport<S> {
    validate_params_with(p, boundary, &ValidationThresholds::default())
}

/// [`validate_params`] with explicit thresholds.
pub fn validate_params_with<S: Scalar>(
    p: &PhysicalParams<S>,
    boundary: &BoundaryData<S>,
    thresholds: &ValidationThresholds<S>,
) -> ValidationReport<S> {
    let mut report = ValidationReport::new();
    check_physical(p, &mut report);
    match boundary {
        BoundaryData::Smooth(b) => {
            report.push("p0 > 0", b.p0 > S::zero(), format!("p0 = {}", b.p0));
            report.push("theta0 > 0", b.theta0 > S::zero(), format!("theta0 = {}", b.theta0));
            report.push(
                "theta0 < eps_smooth",
                b.theta0 < thresholds.eps_smooth,
                format!("theta0 = {}, eps_smooth = {}", b.theta0, thresholds.eps_smooth),
            );
        }
        BoundaryData::Cavitating(b) => {
            report.push("p_delta > 0", b.p_delta > S::zero(), format!("p_delta = {}", b.p_delta));
            report.push("delta > 0", b.delta > S::zero(), format!("delta = {}", b.delta));
            report.push("theta0 > 0", b.theta0 > S::zero(), format!("theta0 = {}", b.theta0));
            report.push(
                "0 < alpha < 1/2",
                b.alpha > S::zero() && b.alpha < S::lit(0.5),
                format!("alpha = {}", b.alpha),
            );
            // Only evaluate the functional on an admissible anchor; its ratio
            // terms are meaningless otherwise.
            let prereqs_ok = report.passed();
            if prereqs_ok {
                let s = b.smallness();
                report.push(
                    "smallness finite",
                    s.is_finite(),
                    format!("S = {}", s),
                );
                report.push(
                    "smallness < eps_cav",
                    s < thresholds.eps_cav,
                    format!("S = {}, eps_cav = {}", s, thresholds.eps_cav),
                );
                report.smallness = Some(s);
            }
        }
    }
    report
}

/// Validate constants, boundary anchor and solve configuration together.
pub fn validate_solve<S: Scalar>(
    p: &PhysicalParams<S>,
    boundary: &BoundaryData<S>,
    config: &SolveConfig<S>,
    thresholds: &ValidationThresholds<S>,
) -> ValidationReport<S> {
    let mut report = validate_params_with(p, boundary, thresholds);
    config.check(boundary, &mut report);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn reference_params() -> PhysicalParams<f64> {
        PhysicalParams {
            r_gas: 1.0,
            mu: 1.0,
            lambda: 0.0,
            c_v: 1.0,
            kappa: 1.0,
            d: 3,
        }
    }

    #[test]
    fn smooth_reference_passes() {
        let b = BoundaryData::Smooth(SmoothBoundaryData { p0: 1.0, theta0: 1e-3 });
        let report = validate_params(&reference_params(), &b);
        assert!(report.passed(), "{:?}", report.failures().collect::<Vec<_>>());
    }

    #[test]
    fn lame_condition_fails_for_negative_lambda() {
        let mut p = reference_params();
        p.lambda = -1.0; // 2*1 + 3*(-1) = -1 < 0
        let b = BoundaryData::Smooth(SmoothBoundaryData { p0: 1.0, theta0: 1e-3 });
        let report = validate_params(&p, &b);
        assert!(!report.passed());
        let failed: Vec<&str> = report.failures().map(|c| c.name).collect();
        assert_eq!(failed, vec!["2*mu + d*lambda >= 0"]);
    }

    #[test]
    fn cavitating_smallness_matches_hand_sum() {
        // Seven-term sum evaluated independently (30-digit arithmetic):
        // 1e-2 + 1e-1 + 1e-2 + 1e-3 + 1e-1 + 1e-2 + 1e-3*ln(1e4)
        let b = CavitatingBoundaryData {
            p_delta: 1e-2,
            delta: 1e-1,
            theta0: 1e-2,
            alpha: 1e-3,
        };
        assert_relative_eq!(b.smallness(), 0.24021034037197618, max_relative = 1e-14);
        let report = validate_params(&reference_params(), &BoundaryData::Cavitating(b));
        assert!(report.passed());
        assert_relative_eq!(report.smallness.unwrap(), 0.24021034037197618, max_relative = 1e-14);
    }

    #[test]
    fn alpha_range_enforced() {
        let b = CavitatingBoundaryData {
            p_delta: 1e-2,
            delta: 1e-1,
            theta0: 1e-2,
            alpha: 0.6,
        };
        let report = validate_params(&reference_params(), &BoundaryData::Cavitating(b));
        assert!(!report.passed());
        assert!(report.failures().any(|c| c.name == "0 < alpha < 1/2"));
        // Ratio terms are not evaluated on an inadmissible anchor.
        assert!(report.smallness.is_none());
    }

    #[test]
    fn vacuum_exponent_value() {
        let b = CavitatingBoundaryData {
            p_delta: 1e-2,
            delta: 1e-1,
            theta0: 1e-2,
            alpha: 1e-3,
        };
        assert_relative_eq!(b.vacuum_exponent(3), 6e-3 / 0.998, max_relative = 1e-15);
    }

    #[test]
    fn validation_is_pure() {
        let b = BoundaryData::Cavitating(CavitatingBoundaryData {
            p_delta: 1e-2,
            delta: 1e-1,
            theta0: 1e-2,
            alpha: 1e-3,
        });
        let p = reference_params();
        assert_eq!(validate_params(&p, &b), validate_params(&p, &b));
    }

    proptest! {
        // Monotonicity of the smallness functional along a coordinate where
        // every term is individually non-decreasing (the decreasing ratio
        // terms are filtered out by the stated domination conditions).
        #[test]
        fn smallness_monotone_in_theta0_when_dominated(
            p_delta in 1e-4f64..1e-1,
            delta in 1e-3f64..0.5,
            theta0 in 1e-4f64..1e-1,
            alpha in 1e-5f64..1e-2,
            bump in 1.01f64..2.0,
        ) {
            // d(S)/d(theta0) = 1 + p_delta/alpha - alpha^2/(p_delta*theta0^2);
            // require the decreasing term dominated at the segment start.
            prop_assume!(alpha * alpha / (p_delta * theta0 * theta0) <= 1.0);
            let lo = CavitatingBoundaryData { p_delta, delta, theta0, alpha };
            let hi = CavitatingBoundaryData { theta0: theta0 * bump, ..lo };
            prop_assert!(hi.smallness() >= lo.smallness());
        }

        #[test]
        fn smallness_monotone_in_delta_when_dominated(
            p_delta in 1e-4f64..1e-1,
            delta in 1e-3f64..0.5,
            theta0 in 1e-4f64..1e-1,
            alpha in 1e-5f64..1e-2,
            bump in 1.01f64..2.0,
        ) {
            // d(S)/d(delta) = 1 - 2*alpha/delta >= 0 iff delta >= 2*alpha.
            prop_assume!(delta >= 2.0 * alpha);
            let lo = CavitatingBoundaryData { p_delta, delta, theta0, alpha };
            let hi = CavitatingBoundaryData { delta: delta * bump, ..lo };
            prop_assert!(hi.smallness() >= lo.smallness());
        }

        #[test]
        fn smallness_monotone_in_p_delta_when_dominated(
            p_delta in 1e-4f64..1e-1,
            delta in 1e-3f64..0.5,
            theta0 in 1e-4f64..1e-1,
            alpha in 1e-5f64..1e-2,
            bump in 1.01f64..2.0,
        ) {
            // d(S)/d(p_delta) = 1 + theta0/alpha - alpha^2/(p_delta^2*theta0)
            //                   - alpha/p_delta.
            prop_assume!(alpha * alpha / (p_delta * p_delta * theta0) + alpha / p_delta <= 1.0);
            let lo = CavitatingBoundaryData { p_delta, delta, theta0, alpha };
            let hi = CavitatingBoundaryData { p_delta: p_delta * bump, ..lo };
            prop_assert!(hi.smallness() >= lo.smallness());
        }
    }
}
