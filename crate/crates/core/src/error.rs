use thiserror::Error;

/// Errors surfaced by grid construction, quadrature and the solvers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite sample in `{field}` at node {node}")]
    NonFinite { field: &'static str, node: usize },

    #[error("grid functions live on different grids")]
    GridMismatch,

    #[error("characteristic degeneracy at node {node} (r = {radius:e}): r/2 - U <= 0")]
    CharacteristicDegeneracy { node: usize, radius: f64 },

    #[error("kernel exponent decreases at node {node}; density field is corrupted")]
    DecreasingExponent { node: usize },

    #[error("no convergence after {sweeps} sweeps (last distance {last_distance:e}, last ratio {last_ratio})")]
    NoConvergence {
        sweeps: usize,
        last_distance: f64,
        last_ratio: f64,
    },

    #[error("density anchor mismatch: |P(delta) - P_delta|/P_delta = {relative:e}")]
    AnchorMismatch { relative: f64 },

    #[error("tail fit window holds only {nodes} nodes (need at least {needed})")]
    FitWindow { nodes: usize, needed: usize },

    #[error("ill-conditioned tail fit: {0}")]
    IllConditionedFit(&'static str),

    #[error("invalid constants: {0}")]
    InvalidConstants(&'static str),

    #[error("profile has too few nodes: {0}")]
    TooFewNodes(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
