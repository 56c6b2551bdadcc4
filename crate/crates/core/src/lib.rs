//! Self-similar expander profiles for a radially symmetric compressible,
//! viscous, heat-conducting ideal gas.
//!
//! The profile triple `(P, U, Theta)` — density, radial velocity and
//! temperature as functions of the similarity variable `r` — is computed by
//! Picard iteration on a Volterra integral-equation reformulation of the
//! governing ODE system. Two regimes are covered:
//!
//! * the smooth regime, anchored at a positive center density `P(0) = P0`,
//! * the cavitating regime, where the density vanishes at the origin with a
//!   power-law emergence `P ~ (r/delta)^(2*d*alpha/(1-2*alpha))` and is
//!   anchored at `P(delta) = P_delta` instead.
//!
//! All numerics are generic over the scalar type through [`Scalar`]
//! (`f64` for production runs, `f32` works for quick smoke tests); concrete
//! `f64` aliases live at the crate root.
//!
//! The crate is organized around the solve pipeline:
//!
//! * [`params`] — fluid constants, boundary anchors, solve configuration,
//!   feasibility checks;
//! * [`grid`] — graded radial meshes and the stable quadrature primitives
//!   (cumulative integrals and exponentially weighted kernel integrals);
//! * [`aux`] — the auxiliary exponents and forcing functionals entering the
//!   integral equations;
//! * [`smooth`] / [`cavitating`] — the fixed-point maps and their iteration;
//! * [`verify`] — independent a posteriori checks (ODE residuals, weighted
//!   bootstrap norms, global bound fitting);
//! * [`asymptotics`] — far-field constant extraction and leading-order
//!   comparisons.

pub mod asymptotics;
pub mod aux;
pub mod cavitating;
mod error;
pub mod grid;
pub mod params;
pub mod profile;
pub mod smooth;
pub mod verify;

pub use error::Error;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar the whole crate is generic over.
///
/// Blanket-implemented for anything float-like; in practice `f32` and `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
    /// Shorthand for lossy conversion of an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// Shorthand for converting a count.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }
}

impl<T> Scalar for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + std::fmt::Debug
        + std::fmt::Display
        + Send
        + Sync
        + 'static
{
}

/// `f64` aliases for the main domain types.
pub type PhysicalParams64 = params::PhysicalParams<f64>;
pub type SmoothBoundary64 = params::SmoothBoundaryData<f64>;
pub type CavitatingBoundary64 = params::CavitatingBoundaryData<f64>;
pub type SolveConfig64 = params::SolveConfig<f64>;
pub type RadialGrid64 = grid::RadialGrid<f64>;
pub type GridFunction64 = grid::GridFunction<f64>;
pub type Profile64 = profile::Profile<f64>;
pub type IterationTrace64 = profile::IterationTrace<f64>;
pub type AsymptoticSummary64 = asymptotics::AsymptoticSummary<f64>;
