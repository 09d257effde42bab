//! The fixed-point operator of the boundary-value problem and a damped
//! Picard iteration to locate its fixed points.
//!
//! The problem
//!
//! ```text
//! -(phi_p(u^Δ(t)))^∇ = f(u(t)) + h(t)   on (0, T)
//! ```
//!
//! is solved through the equivalent integral equation
//!
//! ```text
//! u(t) = phi_q( ∫_η^T (f(u)+h) ∇r ) + ∫_0^t phi_q( ∫_s^T (f(u)+h) ∇r ) Δs,
//! ```
//!
//! whose right-hand side is the operator [`apply_f_operator`]. A solution
//! of the integral equation satisfies `u^Δ(T) = 0` and
//! `u(0) = phi_q(∫_η^T (f(u)+h) ∇r)`; those two identities are what
//! [`residual`] reports as the boundary pair. (The differential form with
//! positive data cannot satisfy `u(T) = u(η)`, so the integral equation is
//! taken as the normative formulation.)

use std::sync::Arc;

use thiserror::Error;

use crate::expr::{EvalError, Expr};
use crate::phi::{PExponent, PhiError};
use crate::timescale::{GridFunction, SampledTimeScale, TimeScaleError, TimeScaleSpec};

/// Values this close to zero from below still count as nonnegative for
/// cone membership.
pub const CONE_NONNEG_TOL: f64 = 1e-12;
/// Relative slack for the nonincreasing-slope test of cone membership.
pub const CONE_SLOPE_SLACK: f64 = 1e-9;
/// Converged solutions closer than `DEDUP_FACTOR * tolerance` in sup-norm
/// are considered the same fixed point.
pub const DEDUP_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    TimeScale(#[from] TimeScaleError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Phi(#[from] PhiError),
    #[error("f must be a function of u alone, but it references t")]
    FDependsOnT,
    #[error("h must be a function of t alone, but it references u")]
    HDependsOnU,
    #[error("eta = {eta} must satisfy 0 < eta < T = {horizon}")]
    EtaOutOfRange { eta: f64, horizon: f64 },
    #[error("declared horizon T = {horizon} does not match the scale horizon {scale_horizon}")]
    HorizonMismatch { horizon: f64, scale_horizon: f64 },
    #[error("invalid solver configuration: {0}")]
    BadConfig(String),
    #[error("iterate became non-finite at iteration {iteration}")]
    NumericalBreakdown { iteration: usize },
}

/// The full problem instance: exponent, horizon, interior point `eta`,
/// nonlinearity `f(u)`, forcing `h(t)`, and the sampled scale that every
/// grid function of the problem lives on. `eta` is guaranteed to be a grid
/// node.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    exponent: PExponent,
    horizon: f64,
    eta: f64,
    f: Expr,
    h: Expr,
    scale: TimeScaleSpec,
    resolution: f64,
    grid: Arc<SampledTimeScale>,
    eta_index: usize,
}

impl ProblemSpec {
    pub fn new(
        exponent: PExponent,
        horizon: f64,
        eta: f64,
        f: Expr,
        h: Expr,
        scale: TimeScaleSpec,
        resolution: f64,
    ) -> Result<Self, SolveError> {
        let (_, f_uses_t) = f.variables();
        if f_uses_t {
            return Err(SolveError::FDependsOnT);
        }
        let (h_uses_u, _) = h.variables();
        if h_uses_u {
            return Err(SolveError::HDependsOnU);
        }
        if !(eta > 0.0 && eta < horizon) {
            return Err(SolveError::EtaOutOfRange { eta, horizon });
        }
        if horizon != scale.horizon() {
            return Err(SolveError::HorizonMismatch {
                horizon,
                scale_horizon: scale.horizon(),
            });
        }
        let grid = SampledTimeScale::sample_with_points(&scale, resolution, &[eta])?;
        let eta_index = grid.index_near(eta)?;
        Ok(ProblemSpec {
            exponent,
            horizon,
            eta,
            f,
            h,
            scale,
            resolution,
            grid: Arc::new(grid),
            eta_index,
        })
    }

    pub fn exponent(&self) -> PExponent {
        self.exponent
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn eta_index(&self) -> usize {
        self.eta_index
    }

    pub fn f(&self) -> &Expr {
        &self.f
    }

    pub fn h(&self) -> &Expr {
        &self.h
    }

    pub fn scale(&self) -> &TimeScaleSpec {
        &self.scale
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn grid(&self) -> &Arc<SampledTimeScale> {
        &self.grid
    }

    /// `f(max(u_i, 0)) + h(t_i)` for every node. Iterates may dip a hair
    /// below zero in floating point; clamping keeps `f` on its intended
    /// domain without masking genuinely negative solutions (those are
    /// rejected by the cone check on the final iterate).
    pub fn source_values(&self, u: &GridFunction) -> Result<Vec<f64>, SolveError> {
        self.grid
            .points()
            .iter()
            .zip(u.values())
            .map(|(&t, &ui)| {
                let fu = self.f.eval(Some(ui.max(0.0)), None)?;
                let ht = self.h.eval(None, Some(t))?;
                Ok(fu + ht)
            })
            .collect()
    }
}

/// `∫_s^T (f(u(r)) + h(r)) ∇r` for a grid node `s`.
pub fn inner_integral(p: &ProblemSpec, u: &GridFunction, s: f64) -> Result<f64, SolveError> {
    let i = p.grid().index_of(s)?;
    let g = p.source_values(u)?;
    let t = p.grid().points();
    let mut sum = 0.0;
    for j in i + 1..t.len() {
        sum += g[j] * (t[j] - t[j - 1]);
    }
    Ok(sum)
}

/// One application of the integral operator. The nested integrals are
/// computed from a single backward cumulative sum, O(N) total; the brute
/// force reference lives in the oracle module.
pub fn apply_f_operator(p: &ProblemSpec, u: &GridFunction) -> Result<GridFunction, SolveError> {
    let g = p.source_values(u)?;
    let t = p.grid().points();
    let n = t.len();
    let pe = p.exponent();

    // inner[i] = ∫_{t_i}^T g ∇r, right-endpoint rule accumulated backwards
    let mut inner = vec![0.0; n];
    for i in (0..n - 1).rev() {
        inner[i] = inner[i + 1] + g[i + 1] * (t[i + 1] - t[i]);
    }

    let mut out = Vec::with_capacity(n);
    out.push(pe.phi_inv(inner[p.eta_index()]));
    for k in 1..n {
        let prev = out[k - 1];
        out.push(prev + pe.phi_inv(inner[k - 1]) * (t[k] - t[k - 1]));
    }
    Ok(GridFunction::new(u.grid().clone(), out)?)
}

/// Pointwise residual of the differential form plus the two boundary
/// identities of the integral equation.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    /// `-(phi_p(u^Δ))^∇ - f(u) - h` per node; entries outside
    /// [`genuine`](Self::genuine) are zero placeholders where a derivative
    /// extension would contaminate the value.
    pub interior: GridFunction,
    /// Max magnitude over the genuine range.
    pub interior_max: f64,
    /// `(u^Δ(T) defect, u(0) defect)`: the slope identity
    /// `u^Δ = phi_q(∫_.^T)` at the last genuine node (which enforces
    /// `u^Δ(T) = 0`), and `u(0) - phi_q(∫_η^T (f(u)+h) ∇r)`.
    pub boundary: (f64, f64),
    /// Index range where the interior residual is genuine.
    pub genuine: std::ops::Range<usize>,
}

pub fn residual(p: &ProblemSpec, u: &GridFunction) -> Result<ResidualReport, SolveError> {
    let n = u.len();
    if n < 2 {
        return Err(TimeScaleError::TooFewPoints { needed: 2, got: n }.into());
    }
    let pe = p.exponent();
    let g = p.source_values(u)?;
    let t = p.grid().points();

    let slope = u.delta_derivative()?;
    let flux = GridFunction::new(
        u.grid().clone(),
        slope.values().iter().map(|&w| pe.phi(w)).collect(),
    )?;
    let flux_rate = flux.nabla_derivative()?;

    // genuine where both the delta slope (i <= N-1) and its nabla rate
    // (i >= 1) avoid the copied endpoint values
    let genuine = 1..n - 1;
    let mut values = vec![0.0; n];
    let mut interior_max: f64 = 0.0;
    for i in genuine.clone() {
        let r = -flux_rate.value(i) - g[i];
        values[i] = r;
        interior_max = interior_max.max(r.abs());
    }
    let interior = GridFunction::new(u.grid().clone(), values)?;

    let tail = g[n - 1] * (t[n - 1] - t[n - 2]);
    let b1 = slope.value(n - 2) - pe.phi_inv(tail);
    let mut eta_integral = 0.0;
    for j in p.eta_index() + 1..n {
        eta_integral += g[j] * (t[j] - t[j - 1]);
    }
    let b2 = u.value(0) - pe.phi_inv(eta_integral);

    Ok(ResidualReport {
        interior,
        interior_max,
        boundary: (b1, b2),
        genuine,
    })
}

/// Membership in the cone of nonnegative functions with nonincreasing delta
/// slope (discrete concavity). Slack scales with the slope magnitude.
pub fn in_cone(u: &GridFunction) -> bool {
    if u.values().iter().any(|&v| v < -CONE_NONNEG_TOL) {
        return false;
    }
    let slope = match u.delta_derivative() {
        Ok(s) => s,
        Err(_) => return true, // single-point grid: nothing to violate
    };
    let w = slope.values();
    let slack = CONE_SLOPE_SLACK * (1.0 + slope.sup_norm());
    // last genuine slope index is n-2; w[n-1] is a copy of it
    w.windows(2)
        .take(u.len().saturating_sub(2))
        .all(|pair| pair[1] <= pair[0] + slack)
}

/// Starting point for the Picard iteration.
#[derive(Debug, Clone)]
pub enum InitialGuess {
    Constant(f64),
    Grid(GridFunction),
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Sup-norm of the damped step below which the iteration stops.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Damping `lambda` in `(0, 1]`: `u <- (1-lambda) u + lambda F(u)`.
    pub damping: f64,
    pub initial_guess: InitialGuess,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tolerance: 1e-10,
            max_iterations: 500,
            damping: 1.0,
            initial_guess: InitialGuess::Constant(1.0),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: GridFunction,
    pub converged: bool,
    pub iterations: usize,
    pub final_step_norm: f64,
    pub residual_interior_max: f64,
    pub residual_boundary: (f64, f64),
    /// `‖u‖`, the sup-norm of the solution.
    pub norm: f64,
    pub in_cone: bool,
}

/// Damped Picard iteration on the integral operator.
///
/// The iteration is seeded with `F(initial_guess)` so that it starts inside
/// the operator's range (the cone); the seed application is not counted as
/// an iteration. Non-convergence is reported in the result, not as an
/// error; a non-finite iterate is.
pub fn picard_solve(p: &ProblemSpec, config: &SolverConfig) -> Result<SolveReport, SolveError> {
    if !(config.tolerance > 0.0) {
        return Err(SolveError::BadConfig(format!(
            "tolerance must be positive, got {}",
            config.tolerance
        )));
    }
    if !(config.damping > 0.0 && config.damping <= 1.0) {
        return Err(SolveError::BadConfig(format!(
            "damping must lie in (0, 1], got {}",
            config.damping
        )));
    }
    let start = match &config.initial_guess {
        InitialGuess::Constant(c) => {
            GridFunction::constant(p.grid().clone(), *c).map_err(SolveError::from)?
        }
        InitialGuess::Grid(u) => {
            if u.grid().as_ref() != p.grid().as_ref() {
                return Err(SolveError::BadConfig(
                    "initial guess grid does not match the problem grid".into(),
                ));
            }
            u.clone()
        }
    };

    let breakdown = |e: SolveError, iteration: usize| match e {
        SolveError::TimeScale(TimeScaleError::NonFiniteValue { .. }) => {
            SolveError::NumericalBreakdown { iteration }
        }
        other => other,
    };

    let mut u = apply_f_operator(p, &start).map_err(|e| breakdown(e, 0))?;
    let mut converged = false;
    let mut iterations = 0;
    let mut step = f64::INFINITY;
    for k in 1..=config.max_iterations {
        let image = apply_f_operator(p, &u).map_err(|e| breakdown(e, k))?;
        let next = u
            .linear_combination(1.0 - config.damping, &image, config.damping)
            .map_err(|e| breakdown(e.into(), k))?;
        step = next.distance(&u)?;
        if !step.is_finite() {
            return Err(SolveError::NumericalBreakdown { iteration: k });
        }
        u = next;
        iterations = k;
        if step <= config.tolerance {
            converged = true;
            break;
        }
    }

    let res = residual(p, &u)?;
    Ok(SolveReport {
        norm: u.sup_norm(),
        in_cone: in_cone(&u),
        converged,
        iterations,
        final_step_norm: step,
        residual_interior_max: res.interior_max,
        residual_boundary: res.boundary,
        solution: u,
    })
}

/// One converged, deduplicated solution from a multi-start sweep, tagged
/// with the index of the norm shell containing it, when any does.
#[derive(Debug, Clone)]
pub struct MultiStartOutcome {
    pub report: SolveReport,
    pub shell: Option<usize>,
    pub start: f64,
}

/// Runs Picard from three constant guesses per shell (midpoint and the two
/// quartile points), drops failures, deduplicates converged solutions
/// closer than `DEDUP_FACTOR * tolerance`, and returns the survivors sorted
/// by norm. With no shells a single start at `u ≡ 1` is used.
pub fn multi_start_solve(
    p: &ProblemSpec,
    shells: &[(f64, f64)],
    config: &SolverConfig,
) -> Vec<MultiStartOutcome> {
    let mut starts = Vec::new();
    if shells.is_empty() {
        starts.push(1.0);
    } else {
        for &(lo, hi) in shells {
            for frac in [0.25, 0.5, 0.75] {
                starts.push(lo + frac * (hi - lo));
            }
        }
    }

    let mut converged = Vec::new();
    for start in starts {
        let mut cfg = config.clone();
        cfg.initial_guess = InitialGuess::Constant(start);
        match picard_solve(p, &cfg) {
            Ok(report) if report.converged => converged.push((start, report)),
            _ => {}
        }
    }
    converged.sort_by(|a, b| a.1.norm.partial_cmp(&b.1.norm).unwrap());

    let mut outcomes: Vec<MultiStartOutcome> = Vec::new();
    for (start, report) in converged {
        let duplicate = outcomes.iter().any(|kept| {
            kept.report
                .solution
                .distance(&report.solution)
                .map(|d| d <= DEDUP_FACTOR * config.tolerance)
                .unwrap_or(false)
        });
        if duplicate {
            continue;
        }
        let shell = shells
            .iter()
            .position(|&(lo, hi)| lo < report.norm && report.norm < hi);
        outcomes.push(MultiStartOutcome {
            report,
            shell,
            start,
        });
    }
    outcomes
}
