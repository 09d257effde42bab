//! Time scales: exact structural descriptions, finite samplings, and the
//! delta/nabla calculus on them.
//!
//! A time scale is a nonempty closed subset of the reals. This module keeps
//! two views of one: [`TimeScaleSpec`] is the exact description (a union of
//! closed intervals and isolated points), and [`SampledTimeScale`] is a finite
//! grid drawn from it. Density classification (right/left dense or scattered)
//! is always derived from the spec, never from grid spacing, so refining the
//! grid cannot change the structure of the scale.

mod calculus;
mod grid;
mod spec;

pub use grid::{GridFunction, SampledTimeScale};
pub use spec::{Component, TimeScaleSpec};

use thiserror::Error;

/// Minimum separation between two grid points. Sampling rejects anything
/// closer; point insertion snaps instead of creating a near-duplicate.
pub const MIN_POINT_GAP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TimeScaleError {
    #[error("time scale has no components")]
    EmptySpec,
    #[error("component {index} is out of order or overlaps its predecessor")]
    ComponentOrder { index: usize },
    #[error("component {index} has a non-finite bound")]
    NonFiniteBound { index: usize },
    #[error("interval component {index} is degenerate (hi <= lo)")]
    DegenerateInterval { index: usize },
    #[error("smallest point of the scale is {found}, expected 0")]
    MinNotZero { found: f64 },
    #[error("resolution must be positive and finite, got {value}")]
    BadResolution { value: f64 },
    #[error("grid points {t0} and {t1} are closer than the minimum gap")]
    PointsTooClose { t0: f64, t1: f64 },
    #[error("{t} is not a member of the time scale")]
    PointNotInScale { t: f64 },
    #[error("{t} is not a grid point")]
    PointNotOnGrid { t: f64 },
    #[error("integral bounds out of order: a = {a} > b = {b}")]
    BoundsOutOfOrder { a: f64, b: f64 },
    #[error("operation needs a grid with at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("value at grid index {index} is not finite")]
    NonFiniteValue { index: usize },
    #[error("grid functions are defined on different grids")]
    GridMismatch,
    #[error("values length {got} does not match grid size {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("scale text, term {term}: {message}")]
    ScaleSyntax { term: usize, message: String },
}
