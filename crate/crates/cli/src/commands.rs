//! The five subcommands. Each returns the process exit code.

use std::io::Write;
use std::path::{Path, PathBuf};

use majorant_core::dual::{kkt_report, random_feasible_start, solve_dual_from, SolverConfig};
use majorant_core::primal::{cross_validate_report, solve_primal, MajorantMode};
use majorant_core::spectral::{norm_even, norm_p_estimate, norm_p_on_grid, power_product};
use majorant_core::sumset::{is_bj_set, DEFAULT_ENUMERATION_LIMIT};
use majorant_core::verify::{
    check_dual_norm_inequality, factorability_check, verify_conjugate, Factorability,
    VerificationReport, REPORT_TOL,
};
use majorant_core::{
    CoefficientSequence, ExponentPair, FrequencySet, MajorantError, QuadratureConfig,
};
use serde::Serialize;

use crate::report::{
    to_canonical_json, ConfigEcho, Diagnostics, DualDiagnostics, InputEcho, Norms,
    PrimalDiagnostics, ReportFile, Status, Tool,
};
use crate::schema::{load, parse, read_text, records_of, ProblemFile, VerifyFile};
use crate::{CliError, EXIT_FAIL, EXIT_NONCONVERGENCE, EXIT_PASS};

/// Tolerance of the KKT residuals in solve reports.
const KKT_TOL: f64 = 1e-5;
/// Tolerance of `‖F‖_p·K = 1`.
const DUALITY_TOL: f64 = 1e-6;
/// Allowed excess of `‖F‖_p` over `‖f‖_p`.
const NORM_BOUND_TOL: f64 = 1e-8;
/// Relative agreement of `K` between the two dual starts.
const RESTART_TOL: f64 = 1e-7;
/// Coefficientwise tolerance of the own-majorant check.
const FIXED_POINT_TOL: f64 = 1e-5;

pub const DEFAULT_POINTS: usize = 1024;

/// Flags shared by `solve` and `verify`; `None` defers to the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub j: Option<u32>,
    pub mode: Option<MajorantMode>,
    pub strict: bool,
    pub tol_gap: Option<f64>,
    pub grid: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

fn env_seed() -> Result<Option<u64>, CliError> {
    match std::env::var("MAJORANT_SEED") {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| {
            CliError::Schema(format!("MAJORANT_SEED: not an unsigned integer: {v:?}"))
        }),
        Err(_) => Ok(None),
    }
}

/// Flag > MAJORANT_SEED > file > default for the seed; flag > file > default
/// otherwise.
fn resolve_configs(
    solver: Option<SolverConfig>,
    quad: Option<QuadratureConfig>,
    flags: &Overrides,
) -> Result<(SolverConfig, QuadratureConfig), CliError> {
    let mut solver = solver.unwrap_or_default();
    let mut quad = quad.unwrap_or_default();
    if let Some(t) = flags.tol_gap {
        solver.tol_gap = t;
    }
    if let Some(seed) = flags.seed.or(env_seed()?) {
        solver.seed = seed;
    }
    if let Some(g) = flags.grid {
        quad.solver_grid = g;
    }
    solver
        .validate()
        .map_err(|e| CliError::Schema(format!("solver: {e}")))?;
    quad.validate()
        .map_err(|e| CliError::Schema(format!("quadrature: {e}")))?;
    Ok((solver, quad))
}

fn resolve_out(flag: &Option<PathBuf>, file: &Option<String>) -> Option<PathBuf> {
    flag.clone().or_else(|| file.as_ref().map(PathBuf::from))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

/// Solver failures end the run: exit 3 under `--strict` when the failure is
/// a convergence problem, a verification failure otherwise.
fn solver_failure(e: MajorantError, strict: bool) -> Result<i32, CliError> {
    let convergence = matches!(
        e,
        MajorantError::NonConvergence { .. }
            | MajorantError::ScalingMismatch { .. }
            | MajorantError::BudgetExceeded(_)
    );
    eprintln!("error: {e}");
    Ok(if strict && convergence {
        EXIT_NONCONVERGENCE
    } else {
        EXIT_FAIL
    })
}

/// `‖f‖_p`, falling back to the last quadrature estimate with a note.
fn norm_with_note(
    f: &CoefficientSequence,
    p: f64,
    quad: &QuadratureConfig,
    notes: &mut Vec<String>,
) -> Result<f64, MajorantError> {
    let est = norm_p_estimate(f, p, quad)?;
    if !est.converged {
        notes.push(format!(
            "quadrature of ||f||_p stopped at grid {} with change {:e}",
            est.grid, est.change
        ));
    }
    Ok(est.value)
}

fn factorability_note(f: &CoefficientSequence, j: u32, quad: &QuadratureConfig) -> String {
    if !f.is_real(1e-12) {
        return "skipped: complex coefficients".into();
    }
    match factorability_check(f, j, None, quad, REPORT_TOL) {
        Ok(Factorability::Factorable { .. }) => "factorable".into(),
        Ok(Factorability::NotFactorable { reason }) => format!("not_factorable: {reason}"),
        Ok(Factorability::Inconclusive { reason }) => format!("inconclusive: {reason}"),
        Err(e) => format!("inconclusive: {e}"),
    }
}

fn finish(report: &ReportFile, out: Option<&Path>) -> Result<i32, CliError> {
    emit(&to_canonical_json(report), out)?;
    Ok(match report.status {
        Status::Pass => EXIT_PASS,
        Status::Fail => EXIT_FAIL,
        Status::Nonconvergence => EXIT_NONCONVERGENCE,
    })
}

fn status_of(checks: &VerificationReport, converged: bool, strict: bool) -> Status {
    if strict && !converged {
        Status::Nonconvergence
    } else if checks.all_passed() {
        Status::Pass
    } else {
        Status::Fail
    }
}

pub fn cmd_solve(input: &Path, flags: &Overrides) -> Result<i32, CliError> {
    let problem: ProblemFile = load(input)?;
    let f = problem.sequence()?;
    let j = problem.order(flags.j)?;
    let (solver, quad) = resolve_configs(problem.solver, problem.quadrature, flags)?;
    let mode = flags.mode.or(problem.mode).unwrap_or(MajorantMode::Full);
    let strict = flags.strict || problem.strict.unwrap_or(false);
    let out = resolve_out(&flags.out, &problem.out);
    let p = ExponentPair::special(j)
        .map_err(|e| CliError::Schema(format!("j: {e}")))?
        .p();

    let cross = match cross_validate_report(&f, j, &solver, &quad) {
        Ok(c) => c,
        Err(e) => return solver_failure(e, strict),
    };
    let restart = match random_feasible_start(&f, solver.seed)
        .and_then(|start| solve_dual_from(&f, j, &solver, &start))
    {
        Ok(r) => r,
        Err(e) => return solver_failure(e, strict),
    };
    let mut notes = Vec::new();
    let norm_f = match norm_with_note(&f, p, &quad, &mut notes) {
        Ok(v) => v,
        Err(e) => return solver_failure(e, strict),
    };
    let conj = &cross.conjugate;
    let k = cross.dual.k;

    let mut checks = VerificationReport::new();
    checks.extend_prefixed(
        "conjugate",
        verify_conjugate(&f, &conj.g, j, REPORT_TOL).map_err(CliError::Solver)?,
    );
    let kkt = kkt_report(&f, conj);
    let kkt_violation = (-kkt.nonnegativity)
        .max(-kkt.majorization)
        .max(kkt.slackness)
        .max(kkt.support_leakage)
        .max(0.0);
    checks.push(
        "kkt",
        kkt.passes(KKT_TOL),
        kkt_violation,
        "optimality residuals of the dual solution are within tolerance",
    );
    checks.push(
        "cross_validation",
        cross.agree,
        cross.max_discrepancy,
        "dual, partial primal and full primal majorants agree coefficientwise",
    );
    let duality = (conj.norm_f_p * k - 1.0).abs();
    checks.push(
        "norm_duality",
        duality <= DUALITY_TOL,
        duality,
        "the minimal majorant norm times K equals one",
    );
    let excess = conj.norm_f_p - norm_f;
    checks.push(
        "norm_bound",
        excess <= NORM_BOUND_TOL,
        excess,
        "the minimal majorant norm does not exceed the norm of f",
    );
    let restart_gap = (restart.k - k).abs() / k;
    checks.push(
        "dual_restart",
        restart_gap <= RESTART_TOL,
        restart_gap,
        "a seeded random start of the dual program reaches the same K",
    );

    let primal = match mode {
        MajorantMode::Partial => &cross.partial,
        MajorantMode::Full => &cross.full,
    };
    let converged = cross.dual.converged && primal.converged && restart.converged;
    if !converged {
        notes.push("a solver stopped before reaching its tolerance".into());
    }
    let primal_diag = |sol: &majorant_core::primal::PrimalSolution, m| PrimalDiagnostics {
        mode: m,
        iterations: sol.iterations,
        stationarity: sol.stationarity,
        converged: sol.converged,
        norm_p: sol.norm_p,
        active_set: sol.active_set.iter().collect(),
        f_major: records_of(&sol.f_major),
    };
    let report = ReportFile {
        tool: Tool::current(),
        command: "solve".into(),
        status: status_of(&checks, converged, strict),
        input: InputEcho {
            j,
            f: records_of(&f),
            h: None,
            f_major: None,
        },
        config: ConfigEcho {
            mode: Some(mode),
            strict,
            tol: None,
            solver,
            quadrature: quad,
        },
        k_p: Some(k),
        g: records_of(&conj.g),
        f_major: records_of(&conj.f_major),
        norms: Norms {
            f_p: norm_f,
            f_major_p: conj.norm_f_p,
            g_2j: conj.norm_g_2j,
        },
        checks: checks.checks,
        diagnostics: Diagnostics {
            dual: Some(DualDiagnostics {
                iterations: cross.dual.iterations,
                gap: cross.dual.gap,
                converged: cross.dual.converged,
                restart_k: restart.k,
                restart_iterations: restart.iterations,
            }),
            primal: vec![primal_diag(primal, mode)],
            max_discrepancy: Some(cross.max_discrepancy),
            kkt: Some(kkt.to_map()),
            factorability: Some(factorability_note(&f, j, &quad)),
            notes,
        },
    };
    finish(&report, out.as_deref())
}

pub fn cmd_verify(input: &Path, flags: &Overrides) -> Result<i32, CliError> {
    let file: VerifyFile = load(input)?;
    let f = crate::schema::sequence_of(&file.f, "f")?;
    let h = crate::schema::sequence_of(&file.h, "H")?;
    let claimed = match &file.f_major {
        Some(r) => Some(crate::schema::sequence_of(r, "F")?),
        None => None,
    };
    let j = file.order(flags.j)?;
    let (solver, quad) = resolve_configs(file.solver, file.quadrature, flags)?;
    let strict = flags.strict || file.strict.unwrap_or(false);
    let tol = file.tol.unwrap_or(REPORT_TOL);
    if !(tol > 0.0) {
        return Err(CliError::Schema("tol: must be positive".into()));
    }
    let out = resolve_out(&flags.out, &file.out);
    let p = ExponentPair::special(j)
        .map_err(|e| CliError::Schema(format!("j: {e}")))?
        .p();

    let mut notes = Vec::new();
    let mut checks = VerificationReport::new();
    checks.extend_prefixed(
        "conjugate",
        verify_conjugate(&f, &h, j, tol).map_err(CliError::Solver)?,
    );
    let generated = power_product(&h, j).map_err(CliError::Solver)?;
    if let Some(claimed) = &claimed {
        let diff = claimed.max_abs_diff(&generated);
        checks.push(
            "F_generated_by_H",
            diff <= tol * generated.max_abs().max(1.0),
            diff,
            "F equals conj(H)^(j-1) H^j",
        );
    }
    match check_dual_norm_inequality(&h, &f, j, &quad) {
        Ok(r) => checks.push(
            "norm_inequality",
            r.holds,
            -r.margin,
            "the norm of f is at least the norm of the majorant generated by H",
        ),
        Err(MajorantError::PreconditionViolated(why)) => {
            notes.push(format!("norm inequality not applicable: {why}"))
        }
        Err(e) => return solver_failure(e, strict),
    }

    let mut converged = true;
    let h_nonneg = h.iter().all(|(_, v)| v.re >= -tol && v.im.abs() <= tol);
    if h_nonneg {
        match solve_primal(&generated, j, MajorantMode::Full, &solver, &quad) {
            Ok(sol) => {
                converged = sol.converged;
                let diff = sol.f_major.max_abs_diff(&generated);
                checks.push(
                    "own_majorant",
                    diff <= FIXED_POINT_TOL,
                    diff,
                    "the majorant generated by a nonnegative H is its own minimal majorant",
                );
            }
            Err(e) => return solver_failure(e, strict),
        }
    } else {
        notes.push("own-majorant check skipped: H has negative coefficients".into());
    }

    let g_2j = norm_even(&h, j).map_err(CliError::Solver)?;
    let norm_f = match norm_with_note(&f, p, &quad, &mut notes) {
        Ok(v) => v,
        Err(e) => return solver_failure(e, strict),
    };
    let report = ReportFile {
        tool: Tool::current(),
        command: "verify".into(),
        status: status_of(&checks, converged, strict),
        input: InputEcho {
            j,
            f: records_of(&f),
            h: Some(records_of(&h)),
            f_major: claimed.as_ref().map(records_of),
        },
        config: ConfigEcho {
            mode: None,
            strict,
            tol: Some(tol),
            solver,
            quadrature: quad,
        },
        k_p: None,
        g: records_of(&h),
        f_major: records_of(&generated),
        norms: Norms {
            f_p: norm_f,
            // |conj(H)^(j-1) H^j| = |H|^(2j-1)
            f_major_p: g_2j.powi(2 * j as i32 - 1),
            g_2j,
        },
        checks: checks.checks,
        diagnostics: Diagnostics {
            dual: None,
            primal: Vec::new(),
            max_discrepancy: None,
            kkt: None,
            factorability: Some(factorability_note(&generated, j, &quad)),
            notes,
        },
    };
    finish(&report, out.as_deref())
}

/// Parses `"0,1,3"` (whitespace allowed) into a set.
pub fn parse_set(text: &str) -> Result<FrequencySet, CliError> {
    let mut set = FrequencySet::new();
    for (i, part) in text.split(',').enumerate() {
        let part = part.trim();
        let n: i64 = part
            .parse()
            .map_err(|_| CliError::Schema(format!("set element {i}: not an integer: {part:?}")))?;
        if !set.insert(n) {
            return Err(CliError::Schema(format!("set element {i}: duplicate {n}")));
        }
    }
    Ok(set)
}

pub fn cmd_sidon(text: &str, j: u32) -> Result<i32, CliError> {
    let set = parse_set(text)?;
    if j == 0 {
        return Err(CliError::Schema("j: must be at least 1".into()));
    }
    let verdict = is_bj_set(&set, j, DEFAULT_ENUMERATION_LIMIT)
        .map_err(|e| CliError::Schema(e.to_string()))?;
    let text = match verdict.witness {
        None => "true\n".to_string(),
        Some(w) => format!("false\n{w}\n"),
    };
    emit(&text, None)?;
    Ok(EXIT_PASS)
}

/// Coefficients to sample: `F` of a report, or the coefficients of a
/// problem file.
fn sampled_sequence(
    text: &str,
    what: &str,
) -> Result<(CoefficientSequence, Option<usize>), CliError> {
    let value: serde_json::Value = parse(text, what)?;
    if value.get("tool").is_some() && value.get("F").is_some() {
        let report: ReportFile = parse(text, what)?;
        Ok((crate::schema::sequence_of(&report.f_major, "F")?, None))
    } else {
        let problem: ProblemFile = parse(text, what)?;
        Ok((problem.sequence()?, problem.points))
    }
}

pub fn cmd_sample(
    input: &Path,
    points: Option<usize>,
    out: Option<&Path>,
) -> Result<i32, CliError> {
    let text = read_text(input)?;
    let (seq, file_points) = sampled_sequence(&text, &input.display().to_string())?;
    let n = points.or(file_points).unwrap_or(DEFAULT_POINTS);
    if n == 0 {
        return Err(CliError::Schema("points: must be positive".into()));
    }
    let mut csv = String::from("theta,re,im,abs\n");
    for k in 0..n {
        let theta = -std::f64::consts::PI + std::f64::consts::TAU * k as f64 / n as f64;
        let v = seq.eval(theta);
        csv.push_str(&format!(
            "{theta:.16e},{:.16e},{:.16e},{:.16e}\n",
            v.re,
            v.im,
            v.norm()
        ));
    }
    emit(&csv, out)?;
    Ok(EXIT_PASS)
}

#[derive(Debug, Serialize)]
struct NormReport {
    tool: Tool,
    p: f64,
    value: f64,
    /// `parseval` (exact even norm) or `trapezoid`.
    method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<usize>,
    converged: bool,
}

pub struct NormArgs {
    pub p: Option<f64>,
    pub even: Option<u32>,
    pub j: Option<u32>,
    pub grid: Option<usize>,
}

pub fn cmd_norm(input: &Path, args: &NormArgs, out: Option<&Path>) -> Result<i32, CliError> {
    let problem: ProblemFile = load(input)?;
    let f = problem.sequence()?;
    let quad = problem.quadrature.unwrap_or_default();
    quad.validate()
        .map_err(|e| CliError::Schema(format!("quadrature: {e}")))?;
    let report = if let Some(m) = args.even {
        if m == 0 {
            return Err(CliError::Schema("even: must be at least 1".into()));
        }
        NormReport {
            tool: Tool::current(),
            p: 2.0 * m as f64,
            value: norm_even(&f, m).map_err(CliError::Solver)?,
            method: "parseval".into(),
            grid: None,
            converged: true,
        }
    } else {
        let p = match args.p {
            Some(p) => p,
            None => ExponentPair::special(problem.order(args.j)?)
                .map_err(|e| CliError::Schema(format!("j: {e}")))?
                .p(),
        };
        if !(p >= 1.0) || !p.is_finite() {
            return Err(CliError::Schema(format!(
                "p: must be a finite number >= 1, got {p}"
            )));
        }
        match args.grid {
            Some(0) => return Err(CliError::Schema("grid: must be positive".into())),
            Some(n) => NormReport {
                tool: Tool::current(),
                p,
                value: norm_p_on_grid(&f, p, n),
                method: "trapezoid".into(),
                grid: Some(n),
                converged: true,
            },
            None => {
                let est = norm_p_estimate(&f, p, &quad).map_err(CliError::Solver)?;
                NormReport {
                    tool: Tool::current(),
                    p,
                    value: est.value,
                    method: "trapezoid".into(),
                    grid: Some(est.grid),
                    converged: est.converged,
                }
            }
        }
    };
    emit(&to_canonical_json(&report), out)?;
    Ok(EXIT_PASS)
}
