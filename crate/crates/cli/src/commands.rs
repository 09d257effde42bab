//! Command implementations: solve/residual/check/scan dispatch, CSV and
//! text-report emission, exit-code mapping.
//!
//! Exit codes: 0 success, 1 solver non-convergence or numerical breakdown,
//! 2 configuration or input error, 3 failed condition check under
//! `--strict` (the `check` command only). Output files are written
//! atomically (temp file in the target directory, then rename).

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use tsbvp::conditions::{
    check_existence_pair, scan_infinite, scan_multiplicity, CheckReport, ConditionConstants,
    ConditionError,
};
use tsbvp::expr::{check_positivity, Var};
use tsbvp::solver::{
    multi_start_solve, picard_solve, residual, ProblemSpec, ResidualReport, SolveError, SolveReport,
};
use tsbvp::timescale::GridFunction;

use crate::config::{ConfigError, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO_CONVERGENCE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Solve(SolveError),
    Condition(ConditionError),
    Io(io::Error),
    Usage(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "config error: {e}"),
            CliError::Solve(e) => write!(f, "solver error: {e}"),
            CliError::Condition(e) => write!(f, "condition error: {e}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
            CliError::Usage(m) => write!(f, "{m}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        CliError::Solve(e)
    }
}

impl From<ConditionError> for CliError {
    fn from(e: ConditionError) -> Self {
        CliError::Condition(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solve(SolveError::NumericalBreakdown { .. }) => EXIT_NO_CONVERGENCE,
            _ => EXIT_CONFIG,
        }
    }
}

pub struct Outputs {
    pub csv: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub strict: bool,
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(crate::config::parse_config(&text)?)
}

fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}

/// 17 significant digits, enough to reproduce the exact f64.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn hypothesis_lines(config: &RunConfig) -> Result<Vec<String>, CliError> {
    let samples = config.check.samples;
    let mut lines = Vec::new();
    let f_report = check_positivity(&config.f, Var::U, 0.0, config.horizon, samples)
        .map_err(SolveError::from)?;
    let h_report = check_positivity(&config.h, Var::T, 0.0, config.horizon, samples)
        .map_err(SolveError::from)?;
    for (name, var, rep) in [("f", "u", f_report), ("h", "t", h_report)] {
        if rep.positive {
            lines.push(format!(
                "{name} positivity: min {} at {var} = {} over [0, {}] ({} samples) -> ok",
                rep.min_value, rep.min_at, config.horizon, rep.samples
            ));
        } else {
            lines.push(format!(
                "{name} positivity: min {} at {var} = {} over [0, {}] ({} samples) -> WARNING: \
                 not strictly positive, theorem guarantees void",
                rep.min_value, rep.min_at, config.horizon, rep.samples
            ));
        }
    }
    Ok(lines)
}

fn solution_csv(problem: &ProblemSpec, u: &GridFunction, res: &ResidualReport) -> String {
    let slope = u.delta_derivative().expect("problem grids have >= 2 nodes");
    let mut out = String::from("t,u,u_delta,residual_interior\n");
    for (i, &t) in problem.grid().points().iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_f64(t),
            fmt_f64(u.value(i)),
            fmt_f64(slope.value(i)),
            fmt_f64(res.interior.value(i)),
        );
    }
    out
}

fn solve_report_text(config: &RunConfig, report: &SolveReport) -> Result<String, CliError> {
    let mut out = String::new();
    let _ = writeln!(out, "converged: {}", report.converged);
    let _ = writeln!(out, "iterations: {}", report.iterations);
    let _ = writeln!(out, "final_step_norm: {}", fmt_f64(report.final_step_norm));
    let _ = writeln!(out, "norm: {}", fmt_f64(report.norm));
    let _ = writeln!(out, "in_cone: {}", report.in_cone);
    let _ = writeln!(
        out,
        "residual_interior_max: {}",
        fmt_f64(report.residual_interior_max)
    );
    let _ = writeln!(
        out,
        "residual_boundary_slope: {}",
        fmt_f64(report.residual_boundary.0)
    );
    let _ = writeln!(
        out,
        "residual_boundary_value: {}",
        fmt_f64(report.residual_boundary.1)
    );
    for line in hypothesis_lines(config)? {
        let _ = writeln!(out, "{line}");
    }
    Ok(out)
}

pub fn run_solve(config: &RunConfig, outputs: &Outputs) -> Result<i32, CliError> {
    let problem = config.build_problem()?;
    let report = match picard_solve(&problem, &config.solver_config()) {
        Ok(report) => report,
        Err(SolveError::NumericalBreakdown { iteration }) => {
            // still leave a partial report behind before exiting 1
            let text = format!(
                "converged: false\nerror: iterate became non-finite at iteration {iteration}\n"
            );
            if let Some(path) = &outputs.report {
                write_atomic(path, &text)?;
            }
            eprintln!("iterate became non-finite at iteration {iteration}");
            return Ok(EXIT_NO_CONVERGENCE);
        }
        Err(other) => return Err(other.into()),
    };
    let res = residual(&problem, &report.solution)?;

    if let Some(path) = &outputs.csv {
        write_atomic(path, &solution_csv(&problem, &report.solution, &res))?;
    }
    let text = solve_report_text(config, &report)?;
    if let Some(path) = &outputs.report {
        write_atomic(path, &text)?;
    }
    print!("{text}");
    if report.converged {
        Ok(EXIT_OK)
    } else {
        eprintln!(
            "did not converge within {} iterations (last step {})",
            report.iterations, report.final_step_norm
        );
        Ok(EXIT_NO_CONVERGENCE)
    }
}

pub fn run_residual(config: &RunConfig, outputs: &Outputs) -> Result<i32, CliError> {
    let problem = config.build_problem()?;
    let candidate =
        GridFunction::constant(problem.grid().clone(), config.init).map_err(SolveError::from)?;
    let res = residual(&problem, &candidate)?;

    if let Some(path) = &outputs.csv {
        write_atomic(path, &solution_csv(&problem, &candidate, &res))?;
    }
    let mut text = String::new();
    let _ = writeln!(text, "candidate: u == {}", config.init);
    let _ = writeln!(text, "residual_interior_max: {}", fmt_f64(res.interior_max));
    let _ = writeln!(text, "residual_boundary_slope: {}", fmt_f64(res.boundary.0));
    let _ = writeln!(text, "residual_boundary_value: {}", fmt_f64(res.boundary.1));
    if let Some(path) = &outputs.report {
        write_atomic(path, &text)?;
    }
    print!("{text}");
    Ok(EXIT_OK)
}

fn check_line(report: &CheckReport) -> String {
    let relation = if report.id.starts_with("(i)") {
        "<="
    } else {
        ">="
    };
    let verdict = if report.passed { "PASS" } else { "FAIL" };
    let mut line = format!(
        "{}: {} {} {} -> {} (extremum at u = {}, {} samples)",
        report.id, report.lhs, relation, report.rhs, verdict, report.extremum_at, report.samples
    );
    if let Some(diag) = &report.diagnostic {
        let _ = write!(line, " [{diag}]");
    }
    line
}

pub fn run_check(config: &RunConfig, outputs: &Outputs) -> Result<i32, CliError> {
    let a = config
        .check
        .a
        .ok_or_else(|| CliError::Usage("`check` needs key `a` in [check]".into()))?;
    let b = config
        .check
        .b
        .ok_or_else(|| CliError::Usage("`check` needs key `b` in [check]".into()))?;
    let problem = config.build_problem()?;
    let constants = ConditionConstants::compute(&problem, config.check.samples)?;
    let (ci, cii) = check_existence_pair(a, b, &problem, config.check.samples)?;

    let mut text = String::new();
    let _ = writeln!(
        text,
        "alpha = {}, A(a) = {}, B = {}, h_sup = {}",
        constants.alpha,
        constants.capital_a(a),
        constants.capital_b,
        constants.h_sup
    );
    let _ = writeln!(text, "{}", check_line(&ci));
    let _ = writeln!(text, "{}", check_line(&cii));
    let both = ci.passed && cii.passed;
    if both {
        let _ = writeln!(
            text,
            "prediction: a positive solution with {b} < norm < {a}"
        );
    } else {
        let _ = writeln!(text, "prediction: none (conditions not satisfied)");
    }
    if let Some(path) = &outputs.report {
        write_atomic(path, &text)?;
    }
    print!("{text}");
    if !both && outputs.strict {
        return Ok(EXIT_CHECK_FAILED);
    }
    Ok(EXIT_OK)
}

pub fn run_scan_multiplicity(config: &RunConfig, outputs: &Outputs) -> Result<i32, CliError> {
    let levels = config.check.levels.as_ref().ok_or_else(|| {
        CliError::Usage("`scan-multiplicity` needs key `levels` in [check]".into())
    })?;
    let problem = config.build_problem()?;
    let scan = scan_multiplicity(levels, &problem, config.check.samples)?;

    let mut text = String::new();
    for report in &scan.reports {
        let _ = writeln!(text, "{}", check_line(report));
    }
    match &scan.shells {
        Some(shells) => {
            let _ = writeln!(text, "all conditions pass; predicted shells:");
            for (i, (lo, hi)) in shells.iter().enumerate() {
                let _ = writeln!(text, "  shell {}: ({lo}, {hi})", i + 1);
            }
            let outcomes = multi_start_solve(&problem, shells, &config.solver_config());
            let _ = writeln!(
                text,
                "multi-start found {} distinct solution(s):",
                outcomes.len()
            );
            for o in &outcomes {
                let shell = match o.shell {
                    Some(s) => format!("shell {}", s + 1),
                    None => "no shell".to_string(),
                };
                let _ = writeln!(
                    text,
                    "  norm = {} ({}), start = {}, interior residual = {}",
                    fmt_f64(o.report.norm),
                    shell,
                    o.start,
                    fmt_f64(o.report.residual_interior_max)
                );
            }
        }
        None => {
            let _ = writeln!(text, "conditions not satisfied; no shells predicted");
        }
    }
    if let Some(path) = &outputs.report {
        write_atomic(path, &text)?;
    }
    print!("{text}");
    Ok(EXIT_OK)
}

pub fn run_scan_infinite(config: &RunConfig, outputs: &Outputs) -> Result<i32, CliError> {
    let problem = config.build_problem()?;
    let scan = scan_infinite(
        &problem,
        config.check.a0,
        config.check.ratio,
        config.check.k_max,
        config.check.samples,
    )?;

    let mut text = String::new();
    for (k, pair) in scan.pairs.iter().enumerate() {
        let verdict = if pair.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(
            text,
            "pair {k}: a = {}, b = {} -> {verdict}",
            pair.a_level, pair.b_level
        );
        let _ = writeln!(text, "  {}", check_line(&pair.max_check));
        let _ = writeln!(text, "  {}", check_line(&pair.min_check));
    }
    let _ = writeln!(
        text,
        "longest consecutive passing run: {} (starting at pair {})",
        scan.longest_run, scan.longest_run_start
    );
    if let Some(path) = &outputs.report {
        write_atomic(path, &text)?;
    }
    print!("{text}");
    Ok(EXIT_OK)
}

pub fn run_sample_timescale(config: &RunConfig, outputs: &Outputs) -> Result<i32, CliError> {
    let problem = config.build_problem()?;
    let grid = problem.grid();
    let mut out = String::from("t,sigma,rho,right_dense,left_dense\n");
    for i in 0..grid.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(grid.point(i)),
            fmt_f64(grid.sigma(i)),
            fmt_f64(grid.rho(i)),
            u8::from(grid.is_right_dense(i)),
            u8::from(grid.is_left_dense(i)),
        );
    }
    match &outputs.csv {
        Some(path) => write_atomic(path, &out)?,
        None => print!("{out}"),
    }
    Ok(EXIT_OK)
}

pub fn run_print_config(config: &RunConfig, outputs: &Outputs) -> Result<i32, CliError> {
    let canonical = crate::config::print_canonical(config);
    match &outputs.csv {
        Some(path) => write_atomic(path, &canonical)?,
        None => print!("{canonical}"),
    }
    Ok(EXIT_OK)
}
