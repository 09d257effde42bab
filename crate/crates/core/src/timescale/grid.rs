use std::sync::Arc;

use super::spec::{Component, TimeScaleSpec};
use super::{TimeScaleError, MIN_POINT_GAP};

/// A finite grid drawn from a [`TimeScaleSpec`]: strictly increasing points
/// `t_0 = 0 < t_1 < ... < t_N = T` with per-point density flags taken from
/// the spec. Every isolated point and interval endpoint of the spec appears
/// among the points.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledTimeScale {
    spec: TimeScaleSpec,
    points: Vec<f64>,
    right_dense: Vec<bool>,
    left_dense: Vec<bool>,
}

impl SampledTimeScale {
    /// Samples the spec: each interval `[lo, hi]` is cut into
    /// `ceil((hi-lo)/resolution)` equal steps; isolated points and interval
    /// endpoints are kept exactly.
    pub fn sample(spec: &TimeScaleSpec, resolution: f64) -> Result<Self, TimeScaleError> {
        if !(resolution > 0.0) || !resolution.is_finite() {
            return Err(TimeScaleError::BadResolution { value: resolution });
        }
        let mut points = Vec::new();
        for c in spec.components() {
            match *c {
                Component::IsolatedPoint { x } => points.push(x),
                Component::ClosedInterval { lo, hi } => {
                    let n = ((hi - lo) / resolution).ceil().max(1.0) as usize;
                    for k in 0..n {
                        points.push(lo + (hi - lo) * (k as f64) / (n as f64));
                    }
                    points.push(hi);
                }
            }
        }
        for w in points.windows(2) {
            if w[1] - w[0] <= MIN_POINT_GAP {
                return Err(TimeScaleError::PointsTooClose { t0: w[0], t1: w[1] });
            }
        }
        let right_dense = points.iter().map(|&t| spec.is_right_dense(t)).collect();
        let left_dense = points.iter().map(|&t| spec.is_left_dense(t)).collect();
        Ok(SampledTimeScale {
            spec: spec.clone(),
            points,
            right_dense,
            left_dense,
        })
    }

    /// Like [`sample`](Self::sample), but guarantees that each requested
    /// point is a grid node: values within [`MIN_POINT_GAP`] of an existing
    /// node snap to it, anything else is inserted if it belongs to the scale.
    pub fn sample_with_points(
        spec: &TimeScaleSpec,
        resolution: f64,
        required: &[f64],
    ) -> Result<Self, TimeScaleError> {
        let mut grid = Self::sample(spec, resolution)?;
        for &t in required {
            grid.ensure_point(t)?;
        }
        Ok(grid)
    }

    fn ensure_point(&mut self, t: f64) -> Result<usize, TimeScaleError> {
        let pos = self.points.partition_point(|&p| p < t);
        for i in [pos.wrapping_sub(1), pos] {
            if let Some(&p) = self.points.get(i) {
                if (p - t).abs() <= MIN_POINT_GAP {
                    return Ok(i);
                }
            }
        }
        if !self.spec.contains(t) {
            return Err(TimeScaleError::PointNotInScale { t });
        }
        // Strictly between two nodes of the same interval, so dense on both sides.
        self.points.insert(pos, t);
        self.right_dense.insert(pos, self.spec.is_right_dense(t));
        self.left_dense.insert(pos, self.spec.is_left_dense(t));
        Ok(pos)
    }

    pub fn spec(&self) -> &TimeScaleSpec {
        &self.spec
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Number of grid points (N + 1).
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> f64 {
        self.points[i]
    }

    pub fn horizon(&self) -> f64 {
        *self.points.last().unwrap()
    }

    pub fn is_right_dense(&self, i: usize) -> bool {
        self.right_dense[i]
    }

    pub fn is_left_dense(&self, i: usize) -> bool {
        self.left_dense[i]
    }

    /// Forward jump `sigma(t_i)`: `t_i` itself at a right-dense point, the
    /// next grid node at a right-scattered one. `sigma(T) = T` by the
    /// inf-of-empty-set convention.
    pub fn sigma(&self, i: usize) -> f64 {
        if self.right_dense[i] || i + 1 == self.points.len() {
            self.points[i]
        } else {
            self.points[i + 1]
        }
    }

    /// Backward jump `rho(t_i)`, mirror of [`sigma`](Self::sigma); `rho(0) = 0`.
    pub fn rho(&self, i: usize) -> f64 {
        if self.left_dense[i] || i == 0 {
            self.points[i]
        } else {
            self.points[i - 1]
        }
    }

    /// Exact index of a grid point, or an error if `t` is not a node.
    pub fn index_of(&self, t: f64) -> Result<usize, TimeScaleError> {
        let pos = self.points.partition_point(|&p| p < t);
        if self.points.get(pos) == Some(&t) {
            Ok(pos)
        } else {
            Err(TimeScaleError::PointNotOnGrid { t })
        }
    }

    /// Index of the node nearest to `t` within [`MIN_POINT_GAP`].
    pub fn index_near(&self, t: f64) -> Result<usize, TimeScaleError> {
        let pos = self.points.partition_point(|&p| p < t);
        for i in [pos.wrapping_sub(1), pos] {
            if let Some(&p) = self.points.get(i) {
                if (p - t).abs() <= MIN_POINT_GAP {
                    return Ok(i);
                }
            }
        }
        Err(TimeScaleError::PointNotOnGrid { t })
    }
}

/// Real values aligned to a sampled time scale: `values[i] = u(t_i)`.
/// All values are finite; constructors reject NaN and infinities.
///
/// A finite grid cannot witness ld-continuity of the underlying function;
/// that regularity is assumed of the input.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Arc<SampledTimeScale>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Arc<SampledTimeScale>, values: Vec<f64>) -> Result<Self, TimeScaleError> {
        if values.len() != grid.len() {
            return Err(TimeScaleError::LengthMismatch {
                got: values.len(),
                expected: grid.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(TimeScaleError::NonFiniteValue { index });
        }
        Ok(GridFunction { grid, values })
    }

    /// Tabulates `f(t_i)` over the grid.
    pub fn from_fn(
        grid: Arc<SampledTimeScale>,
        f: impl FnMut(f64) -> f64,
    ) -> Result<Self, TimeScaleError> {
        let values = grid.points().iter().copied().map(f).collect();
        GridFunction::new(grid, values)
    }

    pub fn constant(grid: Arc<SampledTimeScale>, c: f64) -> Result<Self, TimeScaleError> {
        let n = grid.len();
        GridFunction::new(grid, vec![c; n])
    }

    pub fn grid(&self) -> &Arc<SampledTimeScale> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Maximum norm `‖u‖ = max |u(t_i)|`.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Pointwise linear combination `alpha*self + beta*other` on a shared grid.
    pub fn linear_combination(
        &self,
        alpha: f64,
        other: &GridFunction,
        beta: f64,
    ) -> Result<GridFunction, TimeScaleError> {
        if !Arc::ptr_eq(&self.grid, &other.grid) && self.grid != other.grid {
            return Err(TimeScaleError::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        GridFunction::new(self.grid.clone(), values)
    }

    /// Sup-norm distance `‖self - other‖`.
    pub fn distance(&self, other: &GridFunction) -> Result<f64, TimeScaleError> {
        if !Arc::ptr_eq(&self.grid, &other.grid) && self.grid != other.grid {
            return Err(TimeScaleError::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }
}
