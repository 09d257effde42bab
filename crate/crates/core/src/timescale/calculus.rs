//! Delta/nabla derivatives and integrals on a sampled time scale.
//!
//! At a right-scattered node the delta derivative is the exact jump quotient
//! `(u(sigma(t)) - u(t)) / (sigma(t) - t)`; at a right-dense node the same
//! forward quotient is a first-order approximation. The nabla derivative
//! mirrors this backwards. Integrals are the left-endpoint (delta) and
//! right-endpoint (nabla) Riemann sums, which are the exact time-scale
//! definitions on discrete parts.

use super::grid::GridFunction;
use super::TimeScaleError;

impl GridFunction {
    /// Delta derivative. The value at `t_N` is a copy of the one at
    /// `t_{N-1}` (the theory leaves it undefined there); consumers that care
    /// should skip the last index, see [`delta_genuine_range`](Self::delta_genuine_range).
    pub fn delta_derivative(&self) -> Result<GridFunction, TimeScaleError> {
        let n = self.len();
        if n < 2 {
            return Err(TimeScaleError::TooFewPoints { needed: 2, got: n });
        }
        let g = self.grid();
        let t = g.points();
        let v = self.values();
        let mut out = Vec::with_capacity(n);
        for i in 0..n - 1 {
            out.push((v[i + 1] - v[i]) / (t[i + 1] - t[i]));
        }
        out.push(out[n - 2]);
        GridFunction::new(self.grid().clone(), out)
    }

    /// Nabla derivative; the value at `t_0` copies the one at `t_1`.
    pub fn nabla_derivative(&self) -> Result<GridFunction, TimeScaleError> {
        let n = self.len();
        if n < 2 {
            return Err(TimeScaleError::TooFewPoints { needed: 2, got: n });
        }
        let t = self.grid().points();
        let v = self.values();
        let mut out = Vec::with_capacity(n);
        out.push((v[1] - v[0]) / (t[1] - t[0]));
        for i in 1..n {
            out.push((v[i] - v[i - 1]) / (t[i] - t[i - 1]));
        }
        GridFunction::new(self.grid().clone(), out)
    }

    /// Index range where the delta derivative is genuine (not the endpoint
    /// extension): `0..N`.
    pub fn delta_genuine_range(&self) -> std::ops::Range<usize> {
        0..self.len().saturating_sub(1)
    }

    /// Index range where the nabla derivative is genuine: `1..=N`.
    pub fn nabla_genuine_range(&self) -> std::ops::Range<usize> {
        1..self.len()
    }

    /// `∫_a^b u Δt` as the left-endpoint sum over nodes in `[a, b)`,
    /// weighted by the forward gaps. `a` and `b` must be grid nodes.
    pub fn delta_integral(&self, a: f64, b: f64) -> Result<f64, TimeScaleError> {
        let ia = self.grid().index_of(a)?;
        let ib = self.grid().index_of(b)?;
        if ia > ib {
            return Err(TimeScaleError::BoundsOutOfOrder { a, b });
        }
        Ok(self.delta_integral_indexed(ia, ib))
    }

    /// `∫_a^b u ∇t` as the right-endpoint sum over nodes in `(a, b]`,
    /// weighted by the backward gaps.
    pub fn nabla_integral(&self, a: f64, b: f64) -> Result<f64, TimeScaleError> {
        let ia = self.grid().index_of(a)?;
        let ib = self.grid().index_of(b)?;
        if ia > ib {
            return Err(TimeScaleError::BoundsOutOfOrder { a, b });
        }
        Ok(self.nabla_integral_indexed(ia, ib))
    }

    /// Index-based delta integral over `[t_ia, t_ib)`; summation is fixed
    /// left-to-right.
    pub(crate) fn delta_integral_indexed(&self, ia: usize, ib: usize) -> f64 {
        let t = self.grid().points();
        let v = self.values();
        let mut sum = 0.0;
        for i in ia..ib {
            sum += v[i] * (t[i + 1] - t[i]);
        }
        sum
    }

    /// Index-based nabla integral over `(t_ia, t_ib]`.
    pub(crate) fn nabla_integral_indexed(&self, ia: usize, ib: usize) -> f64 {
        let t = self.grid().points();
        let v = self.values();
        let mut sum = 0.0;
        for i in ia + 1..=ib {
            sum += v[i] * (t[i] - t[i - 1]);
        }
        sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timescale::{SampledTimeScale, TimeScaleSpec};
    use std::sync::Arc;

    fn grid(text: &str, res: f64) -> Arc<SampledTimeScale> {
        let spec = TimeScaleSpec::parse(text).unwrap();
        Arc::new(SampledTimeScale::sample(&spec, res).unwrap())
    }

    #[test]
    fn delta_derivative_is_forward_difference_on_integers() {
        let g = grid("{0},{1},{2},{3}", 1.0);
        let u = GridFunction::from_fn(g, |t| t * t).unwrap();
        let d = u.delta_derivative().unwrap();
        // (t+1)^2 - t^2 = 2t + 1
        assert_eq!(d.values()[..3], [1.0, 3.0, 5.0]);
        assert_eq!(d.value(3), d.value(2)); // endpoint extension
    }

    #[test]
    fn delta_derivative_exact_for_linear() {
        let g = grid("[0,1]", 0.037);
        let u = GridFunction::from_fn(g, |t| t).unwrap();
        let d = u.delta_derivative().unwrap();
        for &v in d.values() {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn delta_derivative_first_order_on_continuum() {
        let g = grid("[0,1]", 0.001);
        let u = GridFunction::from_fn(g.clone(), |t| t * t).unwrap();
        let d = u.delta_derivative().unwrap();
        let i = g.index_of(0.5).unwrap();
        assert!((d.value(i) - 1.0).abs() <= 0.001 * 1.01);
    }

    #[test]
    fn nabla_derivative_is_backward_difference_on_integers() {
        let g = grid("{0},{1},{2},{3}", 1.0);
        let u = GridFunction::from_fn(g.clone(), |t| t * t).unwrap();
        let d = u.nabla_derivative().unwrap();
        let i = g.index_of(2.0).unwrap();
        assert_eq!(d.value(i), 3.0); // 4 - 1
    }

    #[test]
    fn nabla_derivative_of_constant_is_zero() {
        let g = grid("[0,1]", 0.2);
        let u = GridFunction::constant(g, 4.2).unwrap();
        let d = u.nabla_derivative().unwrap();
        assert!(d.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn nabla_derivative_first_order_against_analytic() {
        let g = grid("[0,1]", 0.001);
        let u = GridFunction::from_fn(g.clone(), |t| t * t * t).unwrap();
        let d = u.nabla_derivative().unwrap();
        let i = g.index_of(0.5).unwrap();
        assert!((d.value(i) - 0.75).abs() <= 0.002);
    }

    #[test]
    fn derivative_needs_two_points() {
        let spec = TimeScaleSpec::new(vec![crate::timescale::Component::IsolatedPoint { x: 0.0 }])
            .unwrap();
        let g = Arc::new(SampledTimeScale::sample(&spec, 1.0).unwrap());
        let u = GridFunction::constant(g, 1.0).unwrap();
        assert!(matches!(
            u.delta_derivative(),
            Err(TimeScaleError::TooFewPoints { .. })
        ));
        assert!(matches!(
            u.nabla_derivative(),
            Err(TimeScaleError::TooFewPoints { .. })
        ));
    }

    #[test]
    fn delta_integral_on_integers() {
        let g = grid("{0},{1},{2},{3}", 1.0);
        let u = GridFunction::from_fn(g, |t| t).unwrap();
        assert_eq!(u.delta_integral(0.0, 3.0).unwrap(), 3.0);
        assert_eq!(u.delta_integral(1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn nabla_integral_on_integers() {
        let g = grid("{0},{1},{2},{3}", 1.0);
        let u = GridFunction::from_fn(g.clone(), |t| t).unwrap();
        assert_eq!(u.nabla_integral(0.0, 3.0).unwrap(), 6.0);
        let one = GridFunction::constant(grid("{0},{1},{2}", 1.0), 1.0).unwrap();
        assert_eq!(one.nabla_integral(1.0, 2.0).unwrap(), 1.0);
    }

    #[test]
    fn continuum_integrals_first_order() {
        let g = grid("[0,1]", 0.001);
        let u = GridFunction::from_fn(g.clone(), |t| t).unwrap();
        assert!((u.delta_integral(0.0, 1.0).unwrap() - 0.5).abs() <= 1e-3);
        let u2 = GridFunction::from_fn(g, |t| t * t).unwrap();
        assert!((u2.nabla_integral(0.0, 1.0).unwrap() - 1.0 / 3.0).abs() <= 2e-3);
    }

    #[test]
    fn integral_bound_errors() {
        let g = grid("{0},{1},{2}", 1.0);
        let u = GridFunction::constant(g, 1.0).unwrap();
        assert!(matches!(
            u.delta_integral(0.5, 1.0),
            Err(TimeScaleError::PointNotOnGrid { .. })
        ));
        assert!(matches!(
            u.delta_integral(2.0, 1.0),
            Err(TimeScaleError::BoundsOutOfOrder { .. })
        ));
    }

    #[test]
    fn fundamental_theorem_telescopes_on_discrete_scales() {
        let g = grid("{0},{1},{2},{4},{8},{8.5}", 1.0);
        let u = GridFunction::from_fn(g, |t| (t * 0.7).sin() + t).unwrap();
        let d = u.delta_derivative().unwrap();
        let total = d.delta_integral(0.0, 8.5).unwrap();
        // gaps are powers of two, so the quotient-times-gap products are exact
        assert_eq!(total, u.value(5) - u.value(0));
    }

    #[test]
    fn integral_error_halves_with_resolution() {
        let exact = 1.0 / 3.0;
        let mut errs = Vec::new();
        for res in [0.002, 0.001] {
            let g = grid("[0,1]", res);
            let u = GridFunction::from_fn(g, |t| t * t).unwrap();
            errs.push((u.delta_integral(0.0, 1.0).unwrap() - exact).abs());
        }
        let ratio = errs[0] / errs[1];
        assert!((1.9..=2.1).contains(&ratio), "ratio {ratio}");
    }
}
