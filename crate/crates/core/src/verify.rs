//! Independent a posteriori checks of a converged profile: raw ODE residuals
//! evaluated with finite differences, the weighted bootstrap sup norms, and
//! smallest-constant fits of every global bound.
//!
//! The residual check deliberately uses the differential form of the system,
//! not the integral form the solver iterates on, so any sign or factor slip
//! in the right-hand-side algebra shows up here instead of cancelling.

use crate::grid::GridFunction;
use crate::params::{BoundaryData, PhysicalParams};
use crate::profile::{Case, Profile};
use crate::{Error, Scalar};

/// Residual fields and norms of the three governing equations
/// (mass, momentum, energy), momentum scaled by `1/(2mu+lambda)` and energy
/// by `1/kappa` so all three are comparable.
#[derive(Debug, Clone)]
pub struct ResidualReport<S> {
    pub mass: GridFunction<S>,
    pub momentum: GridFunction<S>,
    pub energy: GridFunction<S>,
    /// Weighted sup norms over the evaluated interior range.
    pub sup: [S; 3],
    /// Root-mean-square norms over the evaluated interior range.
    pub rms: [S; 3],
    /// First and last node index the residuals were evaluated on.
    pub evaluated: (usize, usize),
    pub max_spacing: S,
}

impl<S: Scalar> ResidualReport<S> {
    pub fn max_sup(&self) -> S {
        self.sup.iter().fold(S::zero(), |a, &x| a.max(x))
    }
}

/// Per-equation convergence order between two reports from a grid doubling:
/// `log2(coarse_sup / fine_sup)`.
pub fn estimated_orders<S: Scalar>(
    coarse: &ResidualReport<S>,
    fine: &ResidualReport<S>,
) -> [S; 3] {
    let mut out = [S::zero(); 3];
    for k in 0..3 {
        out[k] = (coarse.sup[k] / fine.sup[k]).ln() / S::lit(2.0).ln();
    }
    out
}

/// Centered first derivative on a non-uniform grid, in difference form so a
/// constant field differentiates to exactly zero.
fn centered_derivative<S: Scalar>(r: &[S], f: &[S], i: usize) -> S {
    let h1 = r[i] - r[i - 1];
    let h2 = r[i + 1] - r[i];
    let a = -h2 / (h1 * (h1 + h2));
    let b = h1 / (h2 * (h1 + h2));
    a * (f[i - 1] - f[i]) + b * (f[i + 1] - f[i])
}

/// Evaluate the three ODE residuals of a profile at interior nodes.
///
/// First derivatives of `U` and `Theta` are the analytically carried fields;
/// only `P'`, `U''` and `Theta''` use finite differences (`U''` and
/// `Theta''` differentiate the carried slopes). Evaluation starts at the
/// third interior node: the `1/r^2` terms amplify stencil error right at the
/// axis.
pub fn ode_residual<S: Scalar>(
    profile: &Profile<S>,
    params: &PhysicalParams<S>,
) -> Result<ResidualReport<S>, Error> {
    let n = profile.grid.len();
    if n < 7 {
        return Err(Error::TooFewNodes(n));
    }
    let r = profile.grid.nodes();
    let p = profile.p.values();
    let u = profile.u.values();
    let th = profile.theta.values();
    let du = profile.du.values();
    let dth = profile.dtheta.values();

    let half = S::lit(0.5);
    let two = S::lit(2.0);
    let dm1 = params.dim() - S::one();
    let visc = params.viscosity_sum();

    let first = 3;
    let last = n - 2;
    let mut mass = vec![S::zero(); n];
    let mut mom = vec![S::zero(); n];
    let mut ener = vec![S::zero(); n];
    for i in first..=last {
        let dp = centered_derivative(r, p, i);
        let ddu = centered_derivative(r, du, i);
        let ddth = centered_derivative(r, dth, i);
        let (ri, pi, ui, ti, dui, dti) = (r[i], p[i], u[i], th[i], du[i], dth[i]);

        mass[i] = -half * ri * dp + dp * ui + pi * (dui + dm1 * ui / ri);

        let viscous_u = ddu + dm1 / ri * dui - dm1 / (ri * ri) * ui;
        mom[i] = (-half * pi * ui - half * ri * (dp * ui + pi * dui)
            + (dp * ui * ui + two * pi * ui * dui)
            + dm1 / ri * pi * ui * ui
            + params.r_gas * (dp * ti + pi * dti)
            - visc * viscous_u)
            / visc;

        let e = half * ui * ui + params.c_v * ti;
        let de = ui * dui + params.c_v * dti;
        let g = ui * pi * (e + params.r_gas * ti);
        let dg = (dui * pi + ui * dp) * (e + params.r_gas * ti)
            + ui * pi * (de + params.r_gas * dti);
        let dissipation = two * params.mu * (dui * dui + dm1 / (ri * ri) * ui * ui)
            + params.lambda * (dui + dm1 / ri * ui) * (dui + dm1 / ri * ui)
            + visc * viscous_u * ui;
        ener[i] = (-pi * e - half * ri * (dp * e + pi * de) + dg + dm1 / ri * g
            - params.kappa * (ddth + dm1 / ri * dti)
            - dissipation)
            / params.kappa;
    }

    let norms = |v: &[S]| {
        let mut sup = S::zero();
        let mut sq = S::zero();
        for &x in &v[first..=last] {
            sup = sup.max(x.abs());
            sq = sq + x * x;
        }
        (sup, (sq / S::of_usize(last - first + 1)).sqrt())
    };
    let (s1, r1) = norms(&mass);
    let (s2, r2) = norms(&mom);
    let (s3, r3) = norms(&ener);

    Ok(ResidualReport {
        mass: GridFunction::new(profile.grid.clone(), mass)?,
        momentum: GridFunction::new(profile.grid.clone(), mom)?,
        energy: GridFunction::new(profile.grid.clone(), ener)?,
        sup: [s1, s2, s3],
        rms: [r1, r2, r3],
        evaluated: (first, last),
        max_spacing: profile.grid.max_spacing(),
    })
}

/// Scaling constants of the weighted bootstrap norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapConstants<S> {
    /// Scale of the velocity term (`M1`).
    pub u_scale: S,
    /// Scale of the combined gradient term (`M1'`, cavitating only).
    pub gradient_scale: Option<S>,
    /// Scale of the temperature terms (`M2`).
    pub theta_scale: S,
}

impl<S: Scalar> BootstrapConstants<S> {
    /// Smooth-case choice `M2 = A Theta0`, `M1 = A^2 Theta0`.
    pub fn smooth_choice(theta0: S, amplification: S) -> Self {
        BootstrapConstants {
            u_scale: amplification * amplification * theta0,
            gradient_scale: None,
            theta_scale: amplification * theta0,
        }
    }

    /// Cavitating-case choice `M1 = L alpha`, `M1' = L^2 alpha`,
    /// `M2 = alpha / P_delta`.
    pub fn cavitating_choice(alpha: S, p_delta: S, amplification: S) -> Self {
        BootstrapConstants {
            u_scale: amplification * alpha,
            gradient_scale: Some(amplification * amplification * alpha),
            theta_scale: alpha / p_delta,
        }
    }

    /// Bound on the transport exponent implied by the velocity scale:
    /// `d M1 / (1 - 2 M1)`.
    pub fn transport_bound(&self, d: u32) -> S {
        let m1 = self.u_scale;
        S::of_usize(d as usize) * m1 / (S::one() - S::lit(2.0) * m1)
    }

    fn check(&self, case: Case) -> Result<(), Error> {
        if !(self.u_scale > S::zero()) || !(self.theta_scale > S::zero()) {
            return Err(Error::InvalidConstants("bootstrap scales must be positive"));
        }
        match (case, self.gradient_scale) {
            (Case::Cavitating, Some(g)) if g > self.u_scale => Ok(()),
            (Case::Cavitating, _) => Err(Error::InvalidConstants(
                "cavitating bootstrap needs gradient_scale > u_scale",
            )),
            (Case::Smooth, _) => Ok(()),
        }
    }
}

/// Nodewise samples and maximum of the weighted bootstrap norm `Z(s)`.
#[derive(Debug, Clone)]
pub struct BootstrapReport<S> {
    pub case: Case,
    pub constants: BootstrapConstants<S>,
    /// `d M1 / (1 - 2 M1)`, the induced bound on the transport exponent.
    pub transport_bound: S,
    /// Running sup of the weighted terms up to each node.
    pub samples: GridFunction<S>,
    pub max: S,
}

/// Evaluate the case-specific bootstrap norm of a profile.
///
/// Smooth weights:
/// `(1/M1) r^-2 (1+r)^3 |U| + (1/M1) r^-1 (1+r)^3 |U' + (d-1)U/r|
///  + (1/M2) (1+r)^2 |Theta| + (1/M2) r^-1 (1+r)^2 |Theta'|`.
///
/// Cavitating weights (with `x = sqrt(P_delta) r`):
/// `(1/M1) r^-1 (1+x)^2 |U| + (1/M1') (1+x)^2 |U' + (d-1)U/r|
///  + (1/M2) (1+x)^2 |Theta| + (1/M2) (P_delta r)^-1 (1+x)^2 |Theta'|`.
pub fn bootstrap_norm<S: Scalar>(
    profile: &Profile<S>,
    constants: &BootstrapConstants<S>,
    params: &PhysicalParams<S>,
) -> Result<BootstrapReport<S>, Error> {
    constants.check(profile.case)?;
    let r = profile.grid.nodes();
    let u = profile.u.values();
    let du = profile.du.values();
    let th = profile.theta.values();
    let dth = profile.dtheta.values();
    let dm1 = params.dim() - S::one();
    let m1 = constants.u_scale;
    let m2 = constants.theta_scale;

    let p_delta = match (&profile.boundary, profile.case) {
        (BoundaryData::Cavitating(b), Case::Cavitating) => Some(b.p_delta),
        (BoundaryData::Smooth(_), Case::Smooth) => None,
        _ => return Err(Error::InvalidInput("profile case does not match its boundary".into())),
    };

    let mut running = S::zero();
    let mut samples = Vec::with_capacity(r.len());
    for i in 0..r.len() {
        let term = if r[i] == S::zero() {
            // Axis values are pinned; only the temperature term survives the
            // r -> 0 limits.
            (S::one() / m2) * th[i].abs()
        } else {
            let ri = r[i];
            let grad = (du[i] + dm1 * u[i] / ri).abs();
            match p_delta {
                None => {
                    let w3 = (S::one() + ri).powi(3);
                    let w2 = (S::one() + ri).powi(2);
                    u[i].abs() * w3 / (m1 * ri * ri)
                        + grad * w3 / (m1 * ri)
                        + th[i].abs() * w2 / m2
                        + dth[i].abs() * w2 / (m2 * ri)
                }
                Some(pd) => {
                    let m1p = constants.gradient_scale.expect("checked above");
                    let w2 = (S::one() + pd.sqrt() * ri).powi(2);
                    u[i].abs() * w2 / (m1 * ri)
                        + grad * w2 / m1p
                        + th[i].abs() * w2 / m2
                        + dth[i].abs() * w2 / (m2 * pd * ri)
                }
            }
        };
        running = running.max(term);
        samples.push(running);
    }
    let max = running;
    Ok(BootstrapReport {
        case: profile.case,
        constants: *constants,
        transport_bound: constants.transport_bound(params.d),
        samples: GridFunction::new(profile.grid.clone(), samples)?,
        max,
    })
}

/// One fitted global bound: the smallest constant making the bound hold
/// nodewise, flagged when it exceeds the ceiling.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedBound<S> {
    /// Short field key (`"U"`, `"dU"`, `"Theta"`, `"dTheta"`).
    pub name: &'static str,
    /// The envelope the constant was fitted against.
    pub shape: &'static str,
    pub constant: S,
    pub within_ceiling: bool,
}

/// Smallest-constant fits of the global profile bounds, the density
/// bracketing, and the characteristic margin.
#[derive(Debug, Clone)]
pub struct BoundReport<S> {
    pub case: Case,
    pub bounds: Vec<FittedBound<S>>,
    pub ceiling: S,
    /// Density bracket check (exponent bracket on `[r_min, delta]` for the
    /// cavitating case, `e^{+-M0}`-bracket for the smooth case).
    pub density_bracket_ok: bool,
    pub density_bracket_detail: String,
    /// Minimum over positive-radius nodes of `(r/2 - U)/r`.
    pub degeneracy_margin: S,
    /// `(min, max)` of `P/P_delta` beyond the anchor radius (cavitating).
    pub far_field_density: Option<(S, S)>,
}

impl<S: Scalar> BoundReport<S> {
    pub fn bound(&self, name: &str) -> Option<&FittedBound<S>> {
        self.bounds.iter().find(|b| b.name == name)
    }
}

/// Default ceiling for fitted bound constants.
pub fn default_bound_ceiling<S: Scalar>() -> S {
    S::lit(100.0)
}

/// Fit the smallest constants for every global bound of the relevant
/// theorem-shaped envelope and run the density bracketing and degeneracy
/// checks. Reporting only; never errors on a violated bound.
pub fn bound_suite<S: Scalar>(
    profile: &Profile<S>,
    params: &PhysicalParams<S>,
) -> Result<BoundReport<S>, Error> {
    bound_suite_with_ceiling(profile, params, default_bound_ceiling())
}

/// [`bound_suite`] with an explicit constant ceiling.
pub fn bound_suite_with_ceiling<S: Scalar>(
    profile: &Profile<S>,
    params: &PhysicalParams<S>,
    ceiling: S,
) -> Result<BoundReport<S>, Error> {
    let r = profile.grid.nodes();
    let u = profile.u.values();
    let du = profile.du.values();
    let th = profile.theta.values();
    let dth = profile.dtheta.values();
    let p = profile.p.values();
    let one = S::one();
    let half = S::lit(0.5);

    let mut degeneracy_margin = S::infinity();
    for (i, &ri) in r.iter().enumerate() {
        if ri > S::zero() {
            degeneracy_margin = degeneracy_margin.min((half * ri - u[i]) / ri);
        }
    }

    let fit = |name: &'static str, shape: &'static str, sup: S| FittedBound {
        name,
        shape,
        constant: sup,
        within_ceiling: sup <= ceiling,
    };

    match (&profile.boundary, profile.case) {
        (BoundaryData::Smooth(b), Case::Smooth) => {
            let mut cu = S::zero();
            let mut cdu = S::zero();
            let mut cth = S::zero();
            let mut cdth = S::zero();
            for (i, &ri) in r.iter().enumerate() {
                let w3 = (one + ri).powi(3);
                let w2 = (one + ri).powi(2);
                cth = cth.max(th[i].abs() * w2 / b.theta0);
                if ri > S::zero() {
                    cu = cu.max(u[i].abs() * w3 / (b.theta0 * ri * ri));
                    cdu = cdu.max(du[i].abs() * w3 / (b.theta0 * ri));
                    cdth = cdth.max(dth[i].abs() * w2 / (b.theta0 * ri));
                }
            }
            // Density bracket implied by the standard constant choice.
            let constants = BootstrapConstants::smooth_choice(b.theta0, S::lit(10.0));
            let m0 = constants.transport_bound(params.d);
            let (lo, hi) = ((-m0).exp() * b.p0, m0.exp() * b.p0);
            let ok = p.iter().all(|&x| x >= lo && x <= hi);
            Ok(BoundReport {
                case: Case::Smooth,
                bounds: vec![
                    fit("U", "|U| <= C Theta0 r^2/(1+r)^3", cu),
                    fit("dU", "|U'| <= C Theta0 r/(1+r)^3", cdu),
                    fit("Theta", "|Theta| <= C Theta0/(1+r)^2", cth),
                    fit("dTheta", "|Theta'| <= C Theta0 r/(1+r)^2", cdth),
                ],
                ceiling,
                density_bracket_ok: ok,
                density_bracket_detail: format!(
                    "exp(+-M0) bracket with M0 = {}: P in [{}, {}]",
                    m0, lo, hi
                ),
                degeneracy_margin,
                far_field_density: None,
            })
        }
        (BoundaryData::Cavitating(b), Case::Cavitating) => {
            let sqrt_pd = b.p_delta.sqrt();
            let mut cu = S::zero();
            let mut cdu = S::zero();
            let mut cth = S::zero();
            let mut cdth = S::zero();
            for (i, &ri) in r.iter().enumerate() {
                let w2 = (one + sqrt_pd * ri).powi(2);
                cu = cu.max(u[i].abs() * w2 / (b.alpha * ri));
                cdu = cdu.max(du[i].abs() * w2 / b.alpha);
                cth = cth.max(th[i].abs() * w2);
                cdth = cdth.max(dth[i].abs() * w2 / (sqrt_pd * ri));
            }
            // Exponent bracket on [r_min, delta]:
            // (r/delta)^{4 d alpha} P_delta <= P <= (r/delta)^{d alpha} P_delta.
            let d_alpha = params.dim() * b.alpha;
            let mut bracket_ok = true;
            let mut worst = S::zero();
            for (i, &ri) in r.iter().enumerate() {
                if ri <= b.delta {
                    let lo = (ri / b.delta).powf(S::lit(4.0) * d_alpha) * b.p_delta;
                    let hi = (ri / b.delta).powf(d_alpha) * b.p_delta;
                    if !(p[i] >= lo && p[i] <= hi) {
                        bracket_ok = false;
                        worst = worst.max((p[i] - hi).max(lo - p[i]) / b.p_delta);
                    }
                }
            }
            let mut ff_min = S::infinity();
            let mut ff_max = S::zero();
            for (i, &ri) in r.iter().enumerate() {
                if ri >= b.delta {
                    ff_min = ff_min.min(p[i] / b.p_delta);
                    ff_max = ff_max.max(p[i] / b.p_delta);
                }
            }
            Ok(BoundReport {
                case: Case::Cavitating,
                bounds: vec![
                    fit("U", "|U| <= C alpha r/(1+sqrt(P_delta) r)^2", cu),
                    fit("dU", "|U'| <= C alpha/(1+sqrt(P_delta) r)^2", cdu),
                    fit("Theta", "|Theta| <= C/(1+sqrt(P_delta) r)^2", cth),
                    fit("dTheta", "|Theta'| <= C sqrt(P_delta) r/(1+sqrt(P_delta) r)^2", cdth),
                ],
                ceiling,
                density_bracket_ok: bracket_ok,
                density_bracket_detail: if bracket_ok {
                    "exponent bracket holds on [r_min, delta]".to_string()
                } else {
                    format!("exponent bracket violated, worst relative excess {}", worst)
                },
                degeneracy_margin,
                far_field_density: Some((ff_min, ff_max)),
            })
        }
        _ => Err(Error::InvalidInput("profile case does not match its boundary".into())),
    }
}
