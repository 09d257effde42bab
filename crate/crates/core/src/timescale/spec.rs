use super::TimeScaleError;

/// One piece of a time scale: a closed interval `[lo, hi]` with `lo < hi`,
/// or a single isolated point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Component {
    ClosedInterval { lo: f64, hi: f64 },
    IsolatedPoint { x: f64 },
}

impl Component {
    pub fn min(&self) -> f64 {
        match *self {
            Component::ClosedInterval { lo, .. } => lo,
            Component::IsolatedPoint { x } => x,
        }
    }

    pub fn max(&self) -> f64 {
        match *self {
            Component::ClosedInterval { hi, .. } => hi,
            Component::IsolatedPoint { x } => x,
        }
    }
}

/// Exact description of a time scale as an ordered, pairwise disjoint union
/// of closed intervals and isolated points. The smallest point must be 0;
/// the largest point is the horizon `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeScaleSpec {
    components: Vec<Component>,
    horizon: f64,
}

impl TimeScaleSpec {
    /// Validates ordering, disjointness, and the `0 ∈ 𝕋` convention, then
    /// derives the horizon from the last component.
    pub fn new(components: Vec<Component>) -> Result<Self, TimeScaleError> {
        if components.is_empty() {
            return Err(TimeScaleError::EmptySpec);
        }
        for (index, c) in components.iter().enumerate() {
            if !c.min().is_finite() || !c.max().is_finite() {
                return Err(TimeScaleError::NonFiniteBound { index });
            }
            if let Component::ClosedInterval { lo, hi } = *c {
                if hi <= lo {
                    return Err(TimeScaleError::DegenerateInterval { index });
                }
            }
        }
        for index in 1..components.len() {
            if components[index].min() <= components[index - 1].max() {
                return Err(TimeScaleError::ComponentOrder { index });
            }
        }
        let first = components[0].min();
        if first != 0.0 {
            return Err(TimeScaleError::MinNotZero { found: first });
        }
        let horizon = components.last().unwrap().max();
        Ok(TimeScaleSpec {
            components,
            horizon,
        })
    }

    /// The interval `[0, T]` as a single-component scale.
    pub fn interval(horizon: f64) -> Result<Self, TimeScaleError> {
        TimeScaleSpec::new(vec![Component::ClosedInterval {
            lo: 0.0,
            hi: horizon,
        }])
    }

    /// The integer scale `{0, 1, ..., n}`.
    pub fn integers(n: u32) -> Result<Self, TimeScaleError> {
        TimeScaleSpec::new(
            (0..=n)
                .map(|k| Component::IsolatedPoint { x: f64::from(k) })
                .collect(),
        )
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// Largest point of the scale.
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Set membership in the exact scale.
    pub fn contains(&self, t: f64) -> bool {
        self.components.iter().any(|c| match *c {
            Component::ClosedInterval { lo, hi } => lo <= t && t <= hi,
            Component::IsolatedPoint { x } => x == t,
        })
    }

    /// True when `t` belongs to `[lo, hi)` of some interval: the forward jump
    /// satisfies `sigma(t) = t`.
    pub fn is_right_dense(&self, t: f64) -> bool {
        self.components.iter().any(|c| match *c {
            Component::ClosedInterval { lo, hi } => lo <= t && t < hi,
            Component::IsolatedPoint { .. } => false,
        })
    }

    /// True when `t` belongs to `(lo, hi]` of some interval: `rho(t) = t`.
    pub fn is_left_dense(&self, t: f64) -> bool {
        self.components.iter().any(|c| match *c {
            Component::ClosedInterval { lo, hi } => lo < t && t <= hi,
            Component::IsolatedPoint { .. } => false,
        })
    }

    /// True when every component is an isolated point. On such scales the
    /// delta/nabla quadrature rules are exact, not approximations.
    pub fn is_discrete(&self) -> bool {
        self.components
            .iter()
            .all(|c| matches!(c, Component::IsolatedPoint { .. }))
    }

    /// Parses the textual scale syntax: comma-separated terms, each
    /// `[lo,hi]` or `{x}`. Whitespace is ignored. Errors carry the 1-based
    /// term index.
    pub fn parse(text: &str) -> Result<Self, TimeScaleError> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(TimeScaleError::ScaleSyntax {
                term: 1,
                message: "empty scale description".into(),
            });
        }
        let mut components = Vec::new();
        let mut rest = compact.as_str();
        let mut term = 0usize;
        while !rest.is_empty() {
            term += 1;
            let syntax = |message: &str| TimeScaleError::ScaleSyntax {
                term,
                message: message.into(),
            };
            let (close, is_interval) = match rest.as_bytes()[0] {
                b'[' => (']', true),
                b'{' => ('}', false),
                _ => return Err(syntax("expected '[' or '{'")),
            };
            let end = rest.find(close).ok_or_else(|| syntax("unclosed term"))?;
            let body = &rest[1..end];
            if is_interval {
                let (lo, hi) = body
                    .split_once(',')
                    .ok_or_else(|| syntax("expected 'lo,hi'"))?;
                let lo: f64 = lo.parse().map_err(|_| syntax("bad lower bound"))?;
                let hi: f64 = hi.parse().map_err(|_| syntax("bad upper bound"))?;
                components.push(Component::ClosedInterval { lo, hi });
            } else {
                let x: f64 = body.parse().map_err(|_| syntax("bad point"))?;
                components.push(Component::IsolatedPoint { x });
            }
            rest = &rest[end + 1..];
            if let Some(tail) = rest.strip_prefix(',') {
                if tail.is_empty() {
                    return Err(TimeScaleError::ScaleSyntax {
                        term: term + 1,
                        message: "trailing comma".into(),
                    });
                }
                rest = tail;
            } else if !rest.is_empty() {
                return Err(syntax("expected ',' between terms"));
            }
        }
        TimeScaleSpec::new(components)
    }

    /// Canonical rendering that `parse` accepts back.
    pub fn to_text(&self) -> String {
        let terms: Vec<String> = self
            .components
            .iter()
            .map(|c| match *c {
                Component::ClosedInterval { lo, hi } => format!("[{lo},{hi}]"),
                Component::IsolatedPoint { x } => format!("{{{x}}}"),
            })
            .collect();
        terms.join(",")
    }
}
