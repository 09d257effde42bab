//! Calculus on time scales and a fixed-point solver for the quasilinear
//! p-Laplacian boundary-value problem
//!
//! ```text
//! -(phi_p(u^Δ(t)))^∇ = f(u(t)) + h(t),   t in (0, T) of a time scale 𝕋,
//! ```
//!
//! posed through its equivalent integral equation and solved by damped
//! Picard iteration. Alongside the solver there are checkers for the
//! existence / multiplicity / infinite-solvability conditions expressed in
//! the constants `alpha`, `A`, and `B`, an expression parser for
//! user-supplied `f(u)` and `h(t)`, and a brute-force oracle kit for
//! differential testing.
//!
//! Quick start: the exactly solvable constant case.
//!
//! ```
//! use tsbvp::expr::parse;
//! use tsbvp::phi::PExponent;
//! use tsbvp::solver::{picard_solve, ProblemSpec, SolverConfig};
//! use tsbvp::timescale::TimeScaleSpec;
//!
//! let problem = ProblemSpec::new(
//!     PExponent::new(2.0).unwrap(),
//!     1.0,                          // horizon T
//!     0.5,                          // eta
//!     parse("1").unwrap(),          // f(u)
//!     parse("0").unwrap(),          // h(t)
//!     TimeScaleSpec::interval(1.0).unwrap(),
//!     0.001,
//! )
//! .unwrap();
//! let report = picard_solve(&problem, &SolverConfig::default()).unwrap();
//! assert!(report.converged && report.in_cone);
//! assert!((report.norm - 1.0).abs() < 2e-3); // exact solution peaks at 1
//! ```

// validation uses `!(x > 0.0)`-style comparisons so NaN inputs fail closed
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conditions;
pub mod expr;
pub mod oracle;
pub mod phi;
pub mod solver;
pub mod timescale;

pub use conditions::{CheckReport, ConditionConstants, InfiniteScan, MultiplicityScan};
pub use expr::Expr;
pub use phi::PExponent;
pub use solver::{ProblemSpec, SolveReport, SolverConfig};
pub use timescale::{GridFunction, SampledTimeScale, TimeScaleSpec};
