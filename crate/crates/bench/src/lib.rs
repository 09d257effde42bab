//! Shared instance builders for the benchmarks.

use tsbvp::expr::parse;
use tsbvp::phi::PExponent;
use tsbvp::solver::ProblemSpec;
use tsbvp::timescale::TimeScaleSpec;

/// Mixed interval/point scale problem with a mildly nonlinear f.
pub fn mixed_problem(resolution: f64) -> ProblemSpec {
    let scale = TimeScaleSpec::parse("[0,0.5],{0.75},{1}").unwrap();
    ProblemSpec::new(
        PExponent::new(1.5).unwrap(),
        1.0,
        0.5,
        parse("0.4 + u^2/8").unwrap(),
        parse("0.2*t").unwrap(),
        scale,
        resolution,
    )
    .unwrap()
}

/// Continuum problem with contractive f, sized by resolution.
pub fn continuum_problem(resolution: f64) -> ProblemSpec {
    ProblemSpec::new(
        PExponent::new(2.0).unwrap(),
        1.0,
        0.5,
        parse("0.3 + u/4").unwrap(),
        parse("0.1").unwrap(),
        TimeScaleSpec::interval(1.0).unwrap(),
        resolution,
    )
    .unwrap()
}
