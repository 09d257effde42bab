//! The sectioned key-value config format.
//!
//! ```text
//! # comment
//! [problem]
//! p = 2            # exponent, > 1
//! T = 1            # horizon
//! eta = 0.5        # interior point, 0 < eta < T
//! f = 1            # expression over u
//! h = 0            # expression over t
//! [timescale]
//! kind = interval  # interval | integer | union
//! spec = [0,0.5],{0.75},{1}   # only with kind = union
//! resolution = 0.01
//! [solver]
//! tol = 0.0000000001
//! max_iter = 500
//! damping = 1
//! init = 1
//! [check]
//! a = 4
//! b = 0.5
//! levels = 1,4,40
//! a0 = 1
//! ratio = 0.5
//! k_max = 8
//! samples = 10001
//! ```
//!
//! Parsing is strict: unknown sections or keys, duplicates, and
//! constraint violations are all errors. [`print_canonical`] emits a
//! normal form that re-parses to an identical [`RunConfig`].

use thiserror::Error;

use tsbvp::expr::{parse as parse_expr, Expr};
use tsbvp::phi::PExponent;
use tsbvp::solver::{InitialGuess, ProblemSpec, SolveError, SolverConfig};
use tsbvp::timescale::TimeScaleSpec;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing required key `{key}` in section [{section}]")]
    MissingKey {
        section: &'static str,
        key: &'static str,
    },
    #[error("{message}")]
    Constraint { message: String },
    #[error(transparent)]
    Problem(#[from] SolveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleKind {
    Interval,
    Integer,
    Union,
}

impl ScaleKind {
    fn name(&self) -> &'static str {
        match self {
            ScaleKind::Interval => "interval",
            ScaleKind::Integer => "integer",
            ScaleKind::Union => "union",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckParams {
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub levels: Option<Vec<f64>>,
    pub a0: f64,
    pub ratio: f64,
    pub k_max: usize,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub p: f64,
    pub horizon: f64,
    pub eta: f64,
    pub f: Expr,
    pub h: Expr,
    pub kind: ScaleKind,
    pub union_scale: Option<TimeScaleSpec>,
    pub resolution: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub damping: f64,
    pub init: f64,
    pub check: CheckParams,
}

impl RunConfig {
    /// The time scale selected by `kind`.
    pub fn scale(&self) -> Result<TimeScaleSpec, ConfigError> {
        match self.kind {
            ScaleKind::Interval => {
                Ok(TimeScaleSpec::interval(self.horizon).map_err(SolveError::from)?)
            }
            ScaleKind::Integer => {
                Ok(TimeScaleSpec::integers(self.horizon as u32).map_err(SolveError::from)?)
            }
            ScaleKind::Union => Ok(self.union_scale.clone().expect("validated at parse time")),
        }
    }

    pub fn build_problem(&self) -> Result<ProblemSpec, ConfigError> {
        let exponent = PExponent::new(self.p).map_err(SolveError::from)?;
        Ok(ProblemSpec::new(
            exponent,
            self.horizon,
            self.eta,
            self.f.clone(),
            self.h.clone(),
            self.scale()?,
            self.resolution,
        )?)
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            tolerance: self.tol,
            max_iterations: self.max_iter,
            damping: self.damping,
            initial_guess: InitialGuess::Constant(self.init),
        }
    }
}

#[derive(Default)]
struct Partial {
    p: Option<f64>,
    horizon: Option<f64>,
    eta: Option<f64>,
    f: Option<Expr>,
    h: Option<Expr>,
    kind: Option<ScaleKind>,
    union_scale: Option<TimeScaleSpec>,
    resolution: Option<f64>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    damping: Option<f64>,
    init: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
    levels: Option<Vec<f64>>,
    a0: Option<f64>,
    ratio: Option<f64>,
    k_max: Option<usize>,
    samples: Option<usize>,
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut part = Partial::default();
    let mut section: Option<&'static str> = None;
    let mut seen: Vec<(String, String)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |message: String| ConfigError::Syntax { line, message };

        if let Some(name) = content.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| syntax("unterminated section header".into()))?;
            section = Some(match name {
                "problem" => "problem",
                "timescale" => "timescale",
                "solver" => "solver",
                "check" => "check",
                other => return Err(syntax(format!("unknown section [{other}]"))),
            });
            continue;
        }

        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| syntax("expected `key = value`".into()))?;
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(syntax(format!("key `{key}` has an empty value")));
        }
        let sect = section.ok_or_else(|| syntax(format!("key `{key}` before any section")))?;
        if seen.iter().any(|(s, k)| s == sect && k == key) {
            return Err(syntax(format!("duplicate key `{key}` in section [{sect}]")));
        }
        seen.push((sect.to_string(), key.to_string()));

        let num = |value: &str| -> Result<f64, ConfigError> {
            value
                .parse::<f64>()
                .map_err(|_| syntax(format!("key `{key}`: `{value}` is not a number")))
        };
        let count = |value: &str| -> Result<usize, ConfigError> {
            value
                .parse::<usize>()
                .map_err(|_| syntax(format!("key `{key}`: `{value}` is not a count")))
        };
        let expr = |value: &str| -> Result<Expr, ConfigError> {
            parse_expr(value).map_err(|e| syntax(format!("key `{key}`: {e}")))
        };

        match (sect, key) {
            ("problem", "p") => part.p = Some(num(value)?),
            ("problem", "T") => part.horizon = Some(num(value)?),
            ("problem", "eta") => part.eta = Some(num(value)?),
            ("problem", "f") => part.f = Some(expr(value)?),
            ("problem", "h") => part.h = Some(expr(value)?),
            ("timescale", "kind") => {
                part.kind = Some(match value {
                    "interval" => ScaleKind::Interval,
                    "integer" => ScaleKind::Integer,
                    "union" => ScaleKind::Union,
                    other => {
                        return Err(syntax(format!(
                            "kind must be interval, integer, or union, got `{other}`"
                        )))
                    }
                })
            }
            ("timescale", "spec") => {
                part.union_scale = Some(
                    TimeScaleSpec::parse(value).map_err(|e| syntax(format!("key `spec`: {e}")))?,
                )
            }
            ("timescale", "resolution") => part.resolution = Some(num(value)?),
            ("solver", "tol") => part.tol = Some(num(value)?),
            ("solver", "max_iter") => part.max_iter = Some(count(value)?),
            ("solver", "damping") => part.damping = Some(num(value)?),
            ("solver", "init") => part.init = Some(num(value)?),
            ("check", "a") => part.a = Some(num(value)?),
            ("check", "b") => part.b = Some(num(value)?),
            ("check", "levels") => {
                let levels = value
                    .split(',')
                    .map(|piece| {
                        piece
                            .trim()
                            .parse::<f64>()
                            .map_err(|_| ConfigError::Syntax {
                                line,
                                message: format!("levels entry `{}` is not a number", piece.trim()),
                            })
                    })
                    .collect::<Result<Vec<f64>, _>>()?;
                part.levels = Some(levels);
            }
            ("check", "a0") => part.a0 = Some(num(value)?),
            ("check", "ratio") => part.ratio = Some(num(value)?),
            ("check", "k_max") => part.k_max = Some(count(value)?),
            ("check", "samples") => part.samples = Some(count(value)?),
            (sect, key) => return Err(syntax(format!("unknown key `{key}` in section [{sect}]"))),
        }
    }

    assemble(part)
}

fn assemble(part: Partial) -> Result<RunConfig, ConfigError> {
    let require =
        |section: &'static str, key: &'static str| ConfigError::MissingKey { section, key };
    let constraint = |message: String| ConfigError::Constraint { message };

    let config = RunConfig {
        p: part.p.ok_or_else(|| require("problem", "p"))?,
        horizon: part.horizon.ok_or_else(|| require("problem", "T"))?,
        eta: part.eta.ok_or_else(|| require("problem", "eta"))?,
        f: part.f.ok_or_else(|| require("problem", "f"))?,
        h: part.h.ok_or_else(|| require("problem", "h"))?,
        kind: part.kind.unwrap_or(ScaleKind::Interval),
        union_scale: part.union_scale,
        resolution: part.resolution.unwrap_or(0.01),
        tol: part.tol.unwrap_or(1e-10),
        max_iter: part.max_iter.unwrap_or(500),
        damping: part.damping.unwrap_or(1.0),
        init: part.init.unwrap_or(1.0),
        check: CheckParams {
            a: part.a,
            b: part.b,
            levels: part.levels,
            a0: part.a0.unwrap_or(1.0),
            ratio: part.ratio.unwrap_or(0.5),
            k_max: part.k_max.unwrap_or(8),
            samples: part.samples.unwrap_or(10001),
        },
    };

    if !(config.p > 1.0) {
        return Err(constraint(format!(
            "key `p`: must be > 1, got {}",
            config.p
        )));
    }
    if !(config.horizon > 0.0) {
        return Err(constraint(format!(
            "key `T`: must be > 0, got {}",
            config.horizon
        )));
    }
    if !(config.eta > 0.0 && config.eta < config.horizon) {
        return Err(constraint(format!(
            "keys `eta`, `T`: need 0 < eta < T, got eta = {} and T = {}",
            config.eta, config.horizon
        )));
    }
    if !(config.resolution > 0.0) {
        return Err(constraint(format!(
            "key `resolution`: must be > 0, got {}",
            config.resolution
        )));
    }
    if !(config.tol > 0.0) {
        return Err(constraint(format!(
            "key `tol`: must be > 0, got {}",
            config.tol
        )));
    }
    if !(config.damping > 0.0 && config.damping <= 1.0) {
        return Err(constraint(format!(
            "key `damping`: must lie in (0, 1], got {}",
            config.damping
        )));
    }
    if config.check.samples < 2 {
        return Err(constraint(format!(
            "key `samples`: need at least 2, got {}",
            config.check.samples
        )));
    }
    match config.kind {
        ScaleKind::Union => {
            let scale = config.union_scale.as_ref().ok_or(ConfigError::MissingKey {
                section: "timescale",
                key: "spec",
            })?;
            if scale.horizon() != config.horizon {
                return Err(constraint(format!(
                    "keys `T`, `spec`: scale ends at {} but T = {}",
                    scale.horizon(),
                    config.horizon
                )));
            }
        }
        _ => {
            if config.union_scale.is_some() {
                return Err(constraint(format!(
                    "key `spec` is only valid with kind = union (kind is {})",
                    config.kind.name()
                )));
            }
            if config.kind == ScaleKind::Integer
                && (config.horizon.fract() != 0.0 || config.horizon < 1.0)
            {
                return Err(constraint(format!(
                    "keys `kind`, `T`: integer scale needs a positive integer T, got {}",
                    config.horizon
                )));
            }
        }
    }
    Ok(config)
}

/// Canonical rendering: fixed section and key order, `Display` floats
/// (shortest round-trip form), optional check keys only when set.
pub fn print_canonical(config: &RunConfig) -> String {
    let mut out = String::new();
    let mut push = |line: String| {
        out.push_str(&line);
        out.push('\n');
    };
    push("[problem]".into());
    push(format!("p = {}", config.p));
    push(format!("T = {}", config.horizon));
    push(format!("eta = {}", config.eta));
    push(format!("f = {}", config.f));
    push(format!("h = {}", config.h));
    push("[timescale]".into());
    push(format!("kind = {}", config.kind.name()));
    if let Some(scale) = &config.union_scale {
        push(format!("spec = {}", scale.to_text()));
    }
    push(format!("resolution = {}", config.resolution));
    push("[solver]".into());
    push(format!("tol = {}", config.tol));
    push(format!("max_iter = {}", config.max_iter));
    push(format!("damping = {}", config.damping));
    push(format!("init = {}", config.init));
    push("[check]".into());
    if let Some(a) = config.check.a {
        push(format!("a = {a}"));
    }
    if let Some(b) = config.check.b {
        push(format!("b = {b}"));
    }
    if let Some(levels) = &config.check.levels {
        let rendered: Vec<String> = levels.iter().map(|l| format!("{l}")).collect();
        push(format!("levels = {}", rendered.join(",")));
    }
    push(format!("a0 = {}", config.check.a0));
    push(format!("ratio = {}", config.check.ratio));
    push(format!("k_max = {}", config.check.k_max));
    push(format!("samples = {}", config.check.samples));
    out
}
