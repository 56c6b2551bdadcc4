//! The sampled profile triple, iteration diagnostics and the weighted
//! stopping distances used by both fixed-point solvers.

use std::sync::Arc;

use crate::grid::{GridFunction, RadialGrid};
use crate::params::BoundaryData;
use crate::{Error, Scalar};

/// Which construction a profile came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    Smooth,
    Cavitating,
}

/// Sampled `(P, U, Theta)` together with the analytically carried first
/// derivatives of `U` and `Theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile<S> {
    pub grid: Arc<RadialGrid<S>>,
    pub p: GridFunction<S>,
    pub u: GridFunction<S>,
    pub theta: GridFunction<S>,
    pub du: GridFunction<S>,
    pub dtheta: GridFunction<S>,
    pub case: Case,
    pub boundary: BoundaryData<S>,
}

impl<S: Scalar> Profile<S> {
    /// Structural invariants: everything finite, density positive away from
    /// the origin, and the characteristic margin `r/2 - U > 0` for `r > 0`.
    pub fn validate(&self) -> Result<(), Error> {
        self.p.check_finite("P")?;
        self.u.check_finite("U")?;
        self.theta.check_finite("Theta")?;
        self.du.check_finite("dU")?;
        self.dtheta.check_finite("dTheta")?;
        let half = S::lit(0.5);
        for (i, (&r, (&p, &u))) in self
            .grid
            .nodes()
            .iter()
            .zip(self.p.values().iter().zip(self.u.values()))
            .enumerate()
        {
            if r > S::zero() {
                if !(p > S::zero()) {
                    return Err(Error::InvalidInput(format!(
                        "density not positive at node {} (r = {:e}, P = {:e})",
                        i,
                        r.to_f64().unwrap_or(f64::NAN),
                        p.to_f64().unwrap_or(f64::NAN),
                    )));
                }
                if !(half * r - u > S::zero()) {
                    return Err(Error::CharacteristicDegeneracy {
                        node: i,
                        radius: r.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }
        Ok(())
    }

    /// Weighted sup distance to another iterate on the same grid; dispatches
    /// on the case tag.
    ///
    /// Smooth: `sup rho^-2 |dU| + rho^-1 |dU'| + |dTheta| + rho^-1 |dTheta'|`;
    /// cavitating replaces the velocity weights by `rho^-1 |dU| + |dU'|`.
    /// The weight radius is capped at one (`rho = min(r, 1)`) so the far
    /// field is not over-weighted; the theory's norm only lives near the
    /// origin.
    pub fn weighted_distance(&self, other: &Profile<S>) -> S {
        let one = S::one();
        let mut sup = S::zero();
        for (i, &r) in self.grid.nodes().iter().enumerate() {
            if r == S::zero() {
                // Boundary values are pinned at the axis; nothing to measure.
                continue;
            }
            let rho = r.min(one);
            let du = (self.u.values()[i] - other.u.values()[i]).abs();
            let ddu = (self.du.values()[i] - other.du.values()[i]).abs();
            let dth = (self.theta.values()[i] - other.theta.values()[i]).abs();
            let ddth = (self.dtheta.values()[i] - other.dtheta.values()[i]).abs();
            let term = match self.case {
                Case::Smooth => du / (rho * rho) + ddu / rho + dth + ddth / rho,
                Case::Cavitating => du / rho + ddu + dth + ddth / rho,
            };
            sup = sup.max(term);
        }
        sup
    }

    /// Linear blend `(1 - damping) * self + damping * next` of the iterate
    /// fields. `damping = 1` returns `next` unchanged.
    pub fn blend(&self, next: &Profile<S>, damping: S) -> Profile<S> {
        if damping == S::one() {
            return next.clone();
        }
        let keep = S::one() - damping;
        let mix = |a: &GridFunction<S>, b: &GridFunction<S>| {
            let vals = a
                .values()
                .iter()
                .zip(b.values())
                .map(|(&x, &y)| keep * x + damping * y)
                .collect();
            GridFunction::new(self.grid.clone(), vals).expect("same grid")
        };
        Profile {
            grid: self.grid.clone(),
            p: next.p.clone(),
            u: mix(&self.u, &next.u),
            theta: mix(&self.theta, &next.theta),
            du: mix(&self.du, &next.du),
            dtheta: mix(&self.dtheta, &next.dtheta),
            case: self.case,
            boundary: self.boundary,
        }
    }
}

/// Per-sweep convergence diagnostics of a fixed-point solve.
#[derive(Debug, Clone)]
pub struct IterationTrace<S> {
    /// Weighted sup distance between successive iterates, one per sweep.
    pub distances: Vec<S>,
    /// Wall time per sweep in seconds (diagnostic only; never serialized
    /// into data files).
    pub sweep_seconds: Vec<f64>,
}

impl<S> Default for IterationTrace<S> {
    fn default() -> Self {
        IterationTrace {
            distances: Vec::new(),
            sweep_seconds: Vec::new(),
        }
    }
}

impl<S: Scalar> IterationTrace<S> {
    pub fn iterations(&self) -> usize {
        self.distances.len()
    }

    /// Successive distance ratios `D_{k+1} / D_k`.
    pub fn contraction_ratios(&self) -> Vec<S> {
        self.distances
            .windows(2)
            .map(|w| if w[0] > S::zero() { w[1] / w[0] } else { S::zero() })
            .collect()
    }
}
