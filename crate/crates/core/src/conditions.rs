//! Constants and hypothesis checks for the existence, multiplicity, and
//! infinite-solvability criteria.
//!
//! The two inequalities being tested at a level `L` are
//!
//! ```text
//! (i)   max_{0<=u<=L} f(u) <= phi_p(L * A(L)),   A(L) = (L - alpha*‖h‖^{1/(p-1)}) / (alpha*L)
//! (ii)  min_{0<=u<=L} f(u) >= phi_p(L * B),      B = phi_p(T - eta)
//! ```
//!
//! with `alpha = phi_q(2^{p-2}) phi_q(T) (T+1)`. Extrema of `f` are taken
//! by dense equispaced sampling; the reports carry the sample count and the
//! location of the extremum so callers can refine. Sampled maxima are lower
//! bounds on the true maximum (and sampled minima upper bounds on the true
//! minimum), so a PASS of (i) or (ii) is a sampling-level statement, not a
//! proof.

use thiserror::Error;

use crate::expr::{EvalError, Expr};
use crate::phi::{PExponent, PhiError};
use crate::solver::ProblemSpec;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConditionError {
    #[error(transparent)]
    Phi(#[from] PhiError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("levels must satisfy 0 < b < a, got a = {a}, b = {b}")]
    BadPair { a: f64, b: f64 },
    #[error("need at least two strictly increasing positive levels: {0}")]
    BadLevels(String),
    #[error("eta = {eta} must lie strictly inside (0, {horizon})")]
    BadEta { eta: f64, horizon: f64 },
    #[error("invalid scan parameters: {0}")]
    BadScan(String),
    #[error("level must be positive, got {0}")]
    BadLevel(f64),
}

/// `alpha = phi_q(2^{p-2}) phi_q(T) (T+1)`.
pub fn alpha(p: f64, horizon: f64) -> Result<f64, PhiError> {
    let pe = PExponent::new(p)?;
    Ok(pe.phi_inv(2f64.powf(p - 2.0)) * pe.phi_inv(horizon) * (horizon + 1.0))
}

/// `A = (a - alpha * h_sup^{1/(p-1)}) / (alpha * a)`.
///
/// The exponent is read as `1/(p-1)`, the only reading consistent with the
/// `phi_q`/`phi_p` scaling of the surrounding estimates. May legitimately
/// be non-positive when `h` is large relative to `a`; condition (i) is then
/// unsatisfiable and the check reports a diagnostic.
pub fn capital_a(a: f64, p: f64, horizon: f64, h_sup: f64) -> Result<f64, ConditionError> {
    if !(a > 0.0) {
        return Err(ConditionError::BadLevel(a));
    }
    let al = alpha(p, horizon)?;
    Ok((a - al * h_sup.powf(1.0 / (p - 1.0))) / (al * a))
}

/// `B = phi_p(T - eta)`.
pub fn capital_b(p: f64, horizon: f64, eta: f64) -> Result<f64, ConditionError> {
    if !(eta > 0.0 && eta < horizon) {
        return Err(ConditionError::BadEta { eta, horizon });
    }
    Ok(PExponent::new(p)?.phi(horizon - eta))
}

/// `‖h‖_∞` by equispaced sampling of `[0, T]`.
pub fn h_sup_norm(h: &Expr, horizon: f64, samples: usize) -> Result<f64, EvalError> {
    assert!(samples >= 2, "need at least two samples");
    let mut sup: f64 = 0.0;
    for k in 0..samples {
        let t = horizon * (k as f64) / ((samples - 1) as f64);
        sup = sup.max(h.eval(None, Some(t))?.abs());
    }
    Ok(sup)
}

/// One checked inequality, with enough context to audit it.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub passed: bool,
    pub samples: usize,
    /// Location in `[0, level]` where the sampled extremum of `f` was found.
    pub extremum_at: f64,
    pub diagnostic: Option<String>,
}

fn sampled_extremum(
    f: &Expr,
    hi: f64,
    samples: usize,
    want_max: bool,
) -> Result<(f64, f64), EvalError> {
    let mut best = if want_max {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    };
    let mut at = 0.0;
    for k in 0..samples {
        let u = hi * (k as f64) / ((samples - 1) as f64);
        let v = f.eval(Some(u), None)?;
        if (want_max && v > best) || (!want_max && v < best) {
            best = v;
            at = u;
        }
    }
    Ok((best, at))
}

fn condition_i(
    problem: &ProblemSpec,
    level: f64,
    h_sup: f64,
    samples: usize,
) -> Result<CheckReport, ConditionError> {
    let p = problem.exponent().p();
    let a_of_level = capital_a(level, p, problem.horizon(), h_sup)?;
    let rhs = problem.exponent().phi(level * a_of_level);
    let (lhs, at) = sampled_extremum(problem.f(), level, samples, true)?;
    let diagnostic = (a_of_level <= 0.0)
        .then(|| format!("h too large for this a: A({level}) = {a_of_level} <= 0"));
    Ok(CheckReport {
        id: format!("(i) a={level}"),
        lhs,
        rhs,
        passed: lhs <= rhs,
        samples,
        extremum_at: at,
        diagnostic,
    })
}

fn condition_ii(
    problem: &ProblemSpec,
    level: f64,
    samples: usize,
) -> Result<CheckReport, ConditionError> {
    let p = problem.exponent().p();
    let b = capital_b(p, problem.horizon(), problem.eta())?;
    let rhs = problem.exponent().phi(level * b);
    let (lhs, at) = sampled_extremum(problem.f(), level, samples, false)?;
    Ok(CheckReport {
        id: format!("(ii) b={level}"),
        lhs,
        rhs,
        passed: lhs >= rhs,
        samples,
        extremum_at: at,
        diagnostic: None,
    })
}

/// The existence pair at levels `b < a`: condition (i) at `a`, condition
/// (ii) at `b`. Both passing predicts a positive solution with
/// `b < ‖u‖ < a`.
pub fn check_existence_pair(
    a: f64,
    b: f64,
    problem: &ProblemSpec,
    samples: usize,
) -> Result<(CheckReport, CheckReport), ConditionError> {
    if !(a > 0.0 && b > 0.0 && b < a) {
        return Err(ConditionError::BadPair { a, b });
    }
    let h_sup = h_sup_norm(problem.h(), problem.horizon(), samples)?;
    Ok((
        condition_i(problem, a, h_sup, samples)?,
        condition_ii(problem, b, samples)?,
    ))
}

/// Result of checking `k+1` interleaved levels.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicityScan {
    pub reports: Vec<CheckReport>,
    /// The `k` predicted norm shells `(a_i, a_{i+1})`, present only when
    /// every check passed.
    pub shells: Option<Vec<(f64, f64)>>,
}

/// Checks condition (i) at odd-indexed levels and (ii) at even-indexed
/// levels (1-based, so `a_1` gets (i)); all levels strictly increasing and
/// positive. With all checks passing, `k = levels.len() - 1` solutions are
/// predicted, one per adjacent shell.
pub fn scan_multiplicity(
    levels: &[f64],
    problem: &ProblemSpec,
    samples: usize,
) -> Result<MultiplicityScan, ConditionError> {
    if levels.len() < 2 {
        return Err(ConditionError::BadLevels(format!(
            "got {} level(s)",
            levels.len()
        )));
    }
    if levels[0] <= 0.0 || levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ConditionError::BadLevels(format!("{levels:?}")));
    }
    let h_sup = h_sup_norm(problem.h(), problem.horizon(), samples)?;
    let mut reports = Vec::with_capacity(levels.len());
    for (idx, &level) in levels.iter().enumerate() {
        let report = if (idx + 1) % 2 == 1 {
            condition_i(problem, level, h_sup, samples)?
        } else {
            condition_ii(problem, level, samples)?
        };
        reports.push(report);
    }
    let shells = reports
        .iter()
        .all(|r| r.passed)
        .then(|| levels.windows(2).map(|w| (w[0], w[1])).collect());
    Ok(MultiplicityScan { reports, shells })
}

/// One `(a_k, b_k)` rung of the shrinking-scale scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalePair {
    pub a_level: f64,
    pub b_level: f64,
    pub max_check: CheckReport,
    pub min_check: CheckReport,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfiniteScan {
    pub pairs: Vec<ScalePair>,
    /// Length of the longest run of consecutive passing pairs.
    pub longest_run: usize,
    /// Index of the first pair of that run (0 when no pair passes).
    pub longest_run_start: usize,
}

/// Finite surrogate for the shrinking-scale conditions: geometric levels
/// `a_k = a0 * ratio^{2k}`, `b_k = a0 * ratio^{2k+1}` for `k = 0..k_max`,
/// interleaved as `a_0 > b_0 > a_1 > b_1 > ...`, each pair checked with
/// (i) at `a_k` (with `A` evaluated at that scale) and (ii) at `b_k`.
///
/// Condition (ii) uses the minimum of `f`; the corresponding statement of
/// the source theorem prints a maximum, but its proof consumes the minimum
/// form, which is what a solver can actually exploit.
pub fn scan_infinite(
    problem: &ProblemSpec,
    a0: f64,
    ratio: f64,
    k_max: usize,
    samples: usize,
) -> Result<InfiniteScan, ConditionError> {
    if !(a0 > 0.0) {
        return Err(ConditionError::BadScan(format!("a0 = {a0} must be > 0")));
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(ConditionError::BadScan(format!(
            "ratio = {ratio} must lie in (0, 1)"
        )));
    }
    if k_max == 0 {
        return Err(ConditionError::BadScan("k_max must be >= 1".into()));
    }
    let h_sup = h_sup_norm(problem.h(), problem.horizon(), samples)?;
    let mut pairs = Vec::with_capacity(k_max);
    for k in 0..k_max {
        let a_level = a0 * ratio.powi(2 * k as i32);
        let b_level = a0 * ratio.powi(2 * k as i32 + 1);
        let max_check = condition_i(problem, a_level, h_sup, samples)?;
        let min_check = condition_ii(problem, b_level, samples)?;
        let passed = max_check.passed && min_check.passed;
        pairs.push(ScalePair {
            a_level,
            b_level,
            max_check,
            min_check,
            passed,
        });
    }
    let mut longest_run = 0;
    let mut longest_run_start = 0;
    let mut run = 0;
    let mut run_start = 0;
    for (k, pair) in pairs.iter().enumerate() {
        if pair.passed {
            if run == 0 {
                run_start = k;
            }
            run += 1;
            if run > longest_run {
                longest_run = run;
                longest_run_start = run_start;
            }
        } else {
            run = 0;
        }
    }
    Ok(InfiniteScan {
        pairs,
        longest_run,
        longest_run_start,
    })
}

/// The `(alpha, B)` constants of a problem, bundled for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionConstants {
    pub alpha: f64,
    pub capital_b: f64,
    pub h_sup: f64,
    h_sup_pow: f64,
}

impl ConditionConstants {
    pub fn compute(problem: &ProblemSpec, samples: usize) -> Result<Self, ConditionError> {
        let p = problem.exponent().p();
        let h_sup = h_sup_norm(problem.h(), problem.horizon(), samples)?;
        Ok(ConditionConstants {
            alpha: alpha(p, problem.horizon())?,
            capital_b: capital_b(p, problem.horizon(), problem.eta())?,
            h_sup,
            h_sup_pow: h_sup.powf(1.0 / (p - 1.0)),
        })
    }

    /// `A` at the scale `a`.
    pub fn capital_a(&self, a: f64) -> f64 {
        (a - self.alpha * self.h_sup_pow) / (self.alpha * a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::phi::PExponent;
    use crate::timescale::TimeScaleSpec;

    fn problem(p: f64, eta: f64, f: &str, h: &str) -> ProblemSpec {
        let scale = TimeScaleSpec::parse("[0,1]").unwrap();
        ProblemSpec::new(
            PExponent::new(p).unwrap(),
            1.0,
            eta,
            parse(f).unwrap(),
            parse(h).unwrap(),
            scale,
            0.05,
        )
        .unwrap()
    }

    #[test]
    fn alpha_by_direct_substitution() {
        assert!((alpha(2.0, 1.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((alpha(2.0, 2.0).unwrap() - 6.0).abs() < 1e-15);
        let expected = 2.0 * 2f64.sqrt();
        assert!((alpha(3.0, 1.0).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn capital_a_values() {
        // with h == 0 the numerator reduces to a, so A = 1/alpha
        assert!((capital_a(4.0, 2.0, 1.0, 0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((capital_a(7.0, 2.0, 1.0, 0.0).unwrap() - 0.5).abs() < 1e-15);
        // (1 - 2*0.1) / (2*1)
        assert!((capital_a(1.0, 2.0, 1.0, 0.1).unwrap() - 0.4).abs() < 1e-15);
        assert!(matches!(
            capital_a(0.0, 2.0, 1.0, 0.0),
            Err(ConditionError::BadLevel(_))
        ));
    }

    #[test]
    fn capital_b_values() {
        assert!((capital_b(2.0, 1.0, 0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!((capital_b(3.0, 2.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(capital_b(2.0, 1.0, 1.0 - 1e-6).unwrap() < 2e-6);
        assert!(matches!(
            capital_b(2.0, 1.0, 1.5),
            Err(ConditionError::BadEta { .. })
        ));
    }

    #[test]
    fn h_sup_norm_by_sampling() {
        assert_eq!(h_sup_norm(&parse("0").unwrap(), 1.0, 100).unwrap(), 0.0);
        let v = h_sup_norm(&parse("0.1*t").unwrap(), 1.0, 1000).unwrap();
        assert!((v - 0.1).abs() <= 1e-4);
        let v = h_sup_norm(&parse("sin(t)").unwrap(), 3.2, 10000).unwrap();
        assert!((v - 1.0).abs() <= 1e-4);
    }

    #[test]
    fn existence_pair_passes_on_reference_instance() {
        let p = problem(2.0, 0.5, "1", "0");
        let (ci, cii) = check_existence_pair(4.0, 0.5, &p, 1001).unwrap();
        assert!(ci.passed && cii.passed);
        assert_eq!(ci.lhs, 1.0);
        assert!((ci.rhs - 2.0).abs() < 1e-12);
        assert_eq!(cii.lhs, 1.0);
        assert!((cii.rhs - 0.25).abs() < 1e-12);
    }

    #[test]
    fn existence_pair_fails_when_a_too_small() {
        let p = problem(2.0, 0.5, "1", "0");
        let (ci, _) = check_existence_pair(1.0, 0.5, &p, 1001).unwrap();
        assert!(!ci.passed);
        assert!((ci.rhs - 0.5).abs() < 1e-12);
    }

    #[test]
    fn existence_pair_min_at_zero_fails_for_vanishing_f() {
        let p = problem(2.0, 0.5, "u", "0");
        let (_, cii) = check_existence_pair(1.0, 0.01, &p, 1001).unwrap();
        assert!(!cii.passed);
        assert_eq!(cii.lhs, 0.0);
        assert_eq!(cii.extremum_at, 0.0);
    }

    #[test]
    fn existence_pair_rejects_bad_levels() {
        let p = problem(2.0, 0.5, "1", "0");
        assert!(matches!(
            check_existence_pair(0.5, 4.0, &p, 100),
            Err(ConditionError::BadPair { .. })
        ));
        assert!(matches!(
            check_existence_pair(-1.0, -2.0, &p, 100),
            Err(ConditionError::BadPair { .. })
        ));
    }

    #[test]
    fn large_h_triggers_diagnostic() {
        let p = problem(2.0, 0.5, "1", "5");
        let (ci, _) = check_existence_pair(1.0, 0.5, &p, 101).unwrap();
        assert!(!ci.passed);
        assert!(ci.diagnostic.as_deref().unwrap().contains("h too large"));
    }

    #[test]
    fn two_level_scan_matches_existence_pair_reports() {
        let p = problem(2.0, 0.5, "0.3 + u/10", "0");
        let scan = scan_multiplicity(&[0.5, 4.0], &p, 1001).unwrap();
        // identical computation paths: (i) at the first level, (ii) at the second
        let (ci, _) = check_existence_pair(0.5, 0.25, &p, 1001).unwrap();
        let (_, cii) = check_existence_pair(8.0, 4.0, &p, 1001).unwrap();
        assert_eq!(scan.reports, vec![ci, cii]);
    }

    #[test]
    fn scan_multiplicity_rejects_unordered_levels() {
        let p = problem(2.0, 0.5, "1", "0");
        assert!(scan_multiplicity(&[1.0], &p, 100).is_err());
        assert!(scan_multiplicity(&[2.0, 1.0], &p, 100).is_err());
        assert!(scan_multiplicity(&[0.0, 1.0], &p, 100).is_err());
    }

    #[test]
    fn constant_f_scan_is_two_thresholds() {
        // f == 0.2: (i) at level a passes iff 0.2 <= phi_2(a/2) = a/2, i.e. a >= 0.4
        //           (ii) at level b passes iff 0.2 >= b*B = b/2, i.e. b <= 0.4
        let p = problem(2.0, 0.5, "0.2", "0");
        let scan = scan_multiplicity(&[0.3, 0.39, 0.5], &p, 2001).unwrap();
        assert!(!scan.reports[0].passed); // (i) at 0.3 < 0.4
        assert!(scan.reports[1].passed); // (ii) at 0.39 <= 0.4
        assert!(scan.reports[2].passed); // (i) at 0.5 >= 0.4
        assert!(scan.shells.is_none());
        let scan = scan_multiplicity(&[0.45, 0.39, 0.5], &p, 2001);
        assert!(scan.is_err()); // not increasing
    }

    #[test]
    fn condition_i_is_monotone_in_a_once_the_max_saturates() {
        // with h == 0, a*A(a) = a/alpha grows with a, so once (i) holds at
        // some a and the max of f stops growing, it holds at every larger a
        let p = problem(2.0, 0.5, "min(u, 1)", "0");
        let (at2, _) = check_existence_pair(2.0, 0.5, &p, 4001).unwrap();
        let (at5, _) = check_existence_pair(5.0, 0.5, &p, 4001).unwrap();
        assert!(at2.passed);
        assert_eq!(at2.lhs, at5.lhs); // max saturated at 1
        assert!(at5.passed);
        assert!(at5.rhs > at2.rhs);
    }

    #[test]
    fn infinite_scan_of_constant_f_has_no_passing_pairs() {
        let p = problem(2.0, 0.5, "1", "0");
        let scan = scan_infinite(&p, 1.0, 0.5, 6, 1001).unwrap();
        assert_eq!(scan.longest_run, 0);
        assert!(scan.pairs.iter().all(|pair| !pair.max_check.passed));
        assert!(scan.pairs.iter().all(|pair| pair.min_check.passed));
        // single immediately-failing pair: empty passing run
        let scan = scan_infinite(&p, 1.0, 0.5, 1, 101).unwrap();
        assert_eq!(scan.pairs.len(), 1);
        assert_eq!(scan.longest_run, 0);
    }

    #[test]
    fn infinite_scan_validates_parameters() {
        let p = problem(2.0, 0.5, "1", "0");
        assert!(scan_infinite(&p, -1.0, 0.5, 3, 100).is_err());
        assert!(scan_infinite(&p, 1.0, 1.5, 3, 100).is_err());
        assert!(scan_infinite(&p, 1.0, 0.5, 0, 100).is_err());
    }

    #[test]
    fn infinite_scan_levels_interleave() {
        let p = problem(2.0, 0.5, "1", "0");
        let scan = scan_infinite(&p, 1.0, 0.5, 3, 101).unwrap();
        let mut levels = Vec::new();
        for pair in &scan.pairs {
            levels.push(pair.a_level);
            levels.push(pair.b_level);
        }
        assert_eq!(levels, vec![1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125]);
    }
}
