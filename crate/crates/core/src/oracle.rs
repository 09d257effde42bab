//! Independent reference implementations used to validate the optimized
//! paths by differential testing.
//!
//! Nothing in this module shares quadrature or operator code with the
//! solver: [`naive_apply_f`] recomputes every inner integral from scratch
//! with literal loops, the closed form is an antiderivative worked out by
//! hand, and the constant recomputations below spell out the formulas with
//! raw `powf` chains instead of the `phi` helpers. When the two sides
//! disagree, trust this side.

use crate::expr::Expr;
use crate::phi::PExponent;
use crate::solver::{ProblemSpec, SolveError};
use crate::timescale::{GridFunction, SampledTimeScale, TimeScaleError, TimeScaleSpec};
use std::sync::Arc;

/// Brute-force operator application: for every target node the inner
/// integral is re-summed from scratch, O(N^2), no shared cumulative sums.
pub fn naive_apply_f(p: &ProblemSpec, u: &GridFunction) -> Result<GridFunction, SolveError> {
    let t = p.grid().points();
    let n = t.len();
    let q = p.exponent().q();

    let phi_q = |s: f64| -> f64 {
        if s == 0.0 {
            0.0
        } else {
            s.abs().powf(q - 2.0) * s
        }
    };
    let source = |i: usize| -> Result<f64, SolveError> {
        let fu = p.f().eval(Some(u.value(i).max(0.0)), None)?;
        let ht = p.h().eval(None, Some(t[i]))?;
        Ok(fu + ht)
    };
    let inner = |start: usize| -> Result<f64, SolveError> {
        let mut sum = 0.0;
        for j in start + 1..n {
            sum += source(j)? * (t[j] - t[j - 1]);
        }
        Ok(sum)
    };

    let head = phi_q(inner(p.eta_index())?);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut tail = 0.0;
        for s in 0..k {
            tail += phi_q(inner(s)?) * (t[s + 1] - t[s]);
        }
        out.push(head + tail);
    }
    Ok(GridFunction::new(u.grid().clone(), out)?)
}

/// The exactly solvable configuration: `p = 2`, constant `f ≡ c`, `h ≡ 0`
/// on the continuum `[0, T]`. Its solution is
/// `u*(t) = c (T - eta) + c (T t - t^2 / 2)`, which satisfies
/// `u*'(T) = 0` and `u*(0) = u*'(eta)` identically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormCase {
    pub c: f64,
    pub horizon: f64,
    pub eta: f64,
}

impl ClosedFormCase {
    pub fn new(c: f64, horizon: f64, eta: f64) -> Result<Self, SolveError> {
        if !(c > 0.0) || !(eta > 0.0 && eta < horizon) {
            return Err(SolveError::BadConfig(format!(
                "closed form needs c > 0 and 0 < eta < T, got c = {c}, eta = {eta}, T = {horizon}"
            )));
        }
        Ok(ClosedFormCase { c, horizon, eta })
    }

    /// `u*(t)`.
    pub fn exact(&self, t: f64) -> f64 {
        self.c * (self.horizon - self.eta) + self.c * (self.horizon * t - t * t / 2.0)
    }

    /// `u*'(t) = c (T - t)`; zero at the horizon.
    pub fn exact_slope(&self, t: f64) -> f64 {
        self.c * (self.horizon - t)
    }

    /// The matching problem instance on `[0, T]` at the given resolution.
    pub fn problem(&self, resolution: f64) -> Result<ProblemSpec, SolveError> {
        ProblemSpec::new(
            PExponent::new(2.0).expect("p = 2 is valid"),
            self.horizon,
            self.eta,
            Expr::Number(self.c),
            Expr::Number(0.0),
            TimeScaleSpec::interval(self.horizon)?,
            resolution,
        )
    }

    /// Error allowance for a discrete fixed point against the closed form;
    /// the left-rule defect is `c * t * resolution / 2`, doubled for slack.
    pub fn tolerance(&self, resolution: f64) -> f64 {
        self.c * self.horizon * resolution
    }
}

/// Max deviation of the discrete delta derivative from a supplied analytic
/// derivative over the right-dense nodes (the scattered ones are exact by
/// definition and the horizon node is an extension).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeErrorReport {
    pub max_error: f64,
    pub at: f64,
    pub dense_nodes: usize,
}

pub fn finite_difference_check(
    u: impl Fn(f64) -> f64,
    du: impl Fn(f64) -> f64,
    spec: &TimeScaleSpec,
    resolution: f64,
) -> Result<DerivativeErrorReport, TimeScaleError> {
    let grid = Arc::new(SampledTimeScale::sample(spec, resolution)?);
    let values = GridFunction::from_fn(grid.clone(), &u)?;
    let slope = values.delta_derivative()?;
    let mut max_error: f64 = 0.0;
    let mut at = 0.0;
    let mut dense_nodes = 0;
    for i in 0..grid.len() - 1 {
        if grid.is_right_dense(i) {
            dense_nodes += 1;
            let err = (slope.value(i) - du(grid.point(i))).abs();
            if err > max_error {
                max_error = err;
                at = grid.point(i);
            }
        }
    }
    Ok(DerivativeErrorReport {
        max_error,
        at,
        dense_nodes,
    })
}

/// `alpha` spelled out with raw powers: `(2^{p-2})^{q-1} * T^{q-1} * (T+1)`.
pub fn alpha_direct(p: f64, horizon: f64) -> f64 {
    let q = p / (p - 1.0);
    2f64.powf(p - 2.0).powf(q - 1.0) * horizon.powf(q - 1.0) * (horizon + 1.0)
}

/// `A` spelled out directly.
pub fn capital_a_direct(a: f64, p: f64, horizon: f64, h_sup: f64) -> f64 {
    let al = alpha_direct(p, horizon);
    (a - al * h_sup.powf(1.0 / (p - 1.0))) / (al * a)
}

/// `B = (T - eta)^{p-1}`.
pub fn capital_b_direct(p: f64, horizon: f64, eta: f64) -> f64 {
    (horizon - eta).powf(p - 1.0)
}

/// `phi_p` spelled out directly for threshold recomputation.
pub fn phi_direct(p: f64, s: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        s.signum() * s.abs().powf(p - 1.0)
    }
}

/// Deterministic generator for differential-test instances. A fixed,
/// hand-rolled stream (SplitMix64) rather than a RNG crate so that a
/// recorded seed replays the exact same instance forever, independent of
/// any library's stream evolution.
#[derive(Debug, Clone)]
pub struct ScenarioGen {
    state: u64,
}

impl ScenarioGen {
    pub fn new(seed: u64) -> Self {
        ScenarioGen { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    pub fn index(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    /// A random mixed interval/point scale starting at 0 with a handful of
    /// components, plus a sampling resolution that keeps the grid at or
    /// under `max_points` nodes.
    pub fn scale(&mut self, max_points: usize) -> (TimeScaleSpec, f64) {
        use crate::timescale::Component;
        let mut components = Vec::new();
        let mut cursor = 0.0;
        let n_components = 1 + self.index(4);
        for i in 0..n_components {
            let start = if i == 0 {
                0.0
            } else {
                cursor + self.range(0.05, 0.4)
            };
            if self.unit() < 0.55 {
                let len = self.range(0.1, 0.8);
                components.push(Component::ClosedInterval {
                    lo: start,
                    hi: start + len,
                });
                cursor = start + len;
            } else {
                components.push(Component::IsolatedPoint { x: start });
                cursor = start;
            }
        }
        if cursor == 0.0 {
            components.push(Component::IsolatedPoint { x: 0.5 });
        }
        let spec = TimeScaleSpec::new(components).expect("generated scale is valid");
        let dense_span: f64 = spec.components().iter().map(|c| c.max() - c.min()).sum();
        let budget = max_points
            .saturating_sub(spec.components().len() * 2)
            .max(8);
        let resolution = (dense_span / budget as f64).max(1e-3);
        (spec, resolution)
    }

    /// A positive nonlinearity drawn from a small pool, rendered through
    /// the expression parser like user input would be.
    pub fn positive_f(&mut self) -> Expr {
        let c1 = self.range(0.1, 2.0);
        let c2 = self.range(0.05, 1.0);
        let text = match self.index(5) {
            0 => format!("{c1}"),
            1 => format!("{c1} + {c2}*u"),
            2 => format!("{c1} + {c2}*u^2"),
            3 => format!("{c1} + {c2}*exp(-u)"),
            _ => format!("{c1} + {c2}*max(u - 1, 0)"),
        };
        crate::expr::parse(&text).expect("generated f parses")
    }

    /// A nonnegative forcing term over `t`.
    pub fn positive_h(&mut self) -> Expr {
        let c1 = self.range(0.0, 0.8);
        let text = match self.index(4) {
            0 => "0".to_string(),
            1 => format!("{c1}"),
            2 => format!("{c1}*t"),
            _ => format!("{c1}*(1 + cos(t))"),
        };
        crate::expr::parse(&text).expect("generated h parses")
    }
}
