//! Checks of the structural properties of minimal majorants, plus a slow
//! independent solver used as a cross-check.
//!
//! Every check records its residual, so a failure can be judged against the
//! tolerance it was held to.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{MajorantError, Result};
use crate::spectral::{
    dual_function_coeffs, exact_majorant, norm_even, norm_p_estimate, power_product,
    CoefficientSequence, ExponentPair, QuadratureConfig,
};
use crate::sumset::{is_bj_set, majorant_window, FrequencySet, DEFAULT_ENUMERATION_LIMIT};

/// Default tolerance for report checks.
pub const REPORT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    /// The property being checked, in words.
    pub property: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a check. Names must be unique and residuals finite.
    pub fn push(&mut self, name: &str, passed: bool, residual: f64, property: &str) {
        assert!(
            self.checks.iter().all(|c| c.name != name),
            "duplicate check name {name}"
        );
        let residual = if residual.is_finite() {
            residual + 0.0 // no negative zero in reports
        } else {
            f64::MAX
        };
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            residual,
            property: property.to_string(),
        });
    }

    /// Appends every check of `other` with `prefix.` in front of its name.
    pub fn extend_prefixed(&mut self, prefix: &str, other: VerificationReport) {
        for c in other.checks {
            self.push(
                &format!("{prefix}.{}", c.name),
                c.passed,
                c.residual,
                &c.property,
            );
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Checks that `H` is a p-conjugate of `f`: `Ĥ >= 0`, `J = H̄^{j−1}H^j`
/// majorizes `f`, `Ĥ` vanishes where `Ĵ > |f̂|`, and `Ĥ` vanishes off the
/// support of `f̂`.
pub fn verify_conjugate(
    f: &CoefficientSequence,
    h: &CoefficientSequence,
    j: u32,
    tol: f64,
) -> Result<VerificationReport> {
    ExponentPair::special(j)?;
    let jj = power_product(h, j)?;
    let support = f.support();
    let mut report = VerificationReport::new();

    let min_h = h.iter().map(|(_, v)| v.re).fold(0.0, f64::min);
    let imag_h = h.iter().map(|(_, v)| v.im.abs()).fold(0.0, f64::max);
    let nonneg = min_h.min(-imag_h);
    report.push(
        "nonnegative",
        nonneg >= -tol,
        nonneg,
        "coefficients of H are nonnegative",
    );

    let on_support = f
        .iter()
        .map(|(n, v)| jj.re(n) - v.norm())
        .fold(f64::INFINITY, f64::min);
    let off_support = jj
        .iter()
        .filter(|(n, _)| !support.contains(*n))
        .map(|(_, v)| v.re)
        .fold(f64::INFINITY, f64::min);
    let majorize = on_support.min(off_support).min(0.0);
    report.push(
        "majorizes",
        majorize >= -tol,
        majorize,
        "J = conj(H)^(j-1) H^j majorizes f",
    );

    let slack = h
        .iter()
        .filter(|(n, _)| jj.re(*n) > f.get(*n).norm() + tol)
        .map(|(_, v)| v.re)
        .fold(0.0, f64::max);
    report.push(
        "slackness",
        slack <= tol,
        slack,
        "coefficients of H vanish where J is strictly above |f|",
    );

    let leak = h
        .iter()
        .filter(|(n, _)| !support.contains(*n))
        .map(|(_, v)| v.norm())
        .fold(0.0, f64::max);
    let support_ok = leak <= tol;
    report.push(
        "support",
        support_ok,
        leak,
        "coefficients of H vanish off the support of f",
    );

    // the support condition is implied by the other three
    let first_three = report.checks[..3].iter().all(|c| c.passed);
    report.push(
        "support_consistency",
        !(first_three && !support_ok),
        if first_three && !support_ok {
            leak
        } else {
            0.0
        },
        "support condition holds whenever the first three do",
    );
    Ok(report)
}

/// Outcome of [`check_dual_norm_inequality`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormInequality {
    pub holds: bool,
    /// `‖f‖_p − ‖F‖_p` with `F = Ḡ^{j−1}G^j`.
    pub margin: f64,
    pub norm_f: f64,
    pub norm_major: f64,
}

/// Allowed negative margin in [`check_dual_norm_inequality`].
pub const NORM_MARGIN_TOL: f64 = 1e-8;

/// For `Ĝ >= 0` and `|f̂| >= F̂` on the support of `Ĝ`, checks
/// `‖f‖_p >= ‖F‖_p` where `F = Ḡ^{j−1}G^j` and `p = 2j/(2j−1)`.
///
/// `‖F‖_p` is taken as `‖G‖_{2j}^{2j−1}` (exact); `‖f‖_p` comes from the
/// trapezoid rule.
pub fn check_dual_norm_inequality(
    g: &CoefficientSequence,
    f: &CoefficientSequence,
    j: u32,
    quad: &QuadratureConfig,
) -> Result<NormInequality> {
    let pair = ExponentPair::special(j)?;
    let tol = 1e-12;
    if let Some((n, v)) = g.iter().find(|(_, v)| v.re < -tol || v.im.abs() > tol) {
        return Err(MajorantError::PreconditionViolated(format!(
            "coefficient {n} of G is {v}, not nonnegative"
        )));
    }
    let major = power_product(g, j)?;
    for (n, _) in g.iter() {
        let (fv, mv) = (f.get(n).norm(), major.re(n));
        if fv < mv - tol * mv.max(1.0) {
            return Err(MajorantError::PreconditionViolated(format!(
                "|f({n})| = {fv} is below F({n}) = {mv} on the support of G"
            )));
        }
    }
    let norm_major = norm_even(g, j)?.powi(2 * j as i32 - 1);
    let norm_f = norm_p_estimate(f, pair.p(), quad)?.value;
    let margin = norm_f - norm_major;
    Ok(NormInequality {
        holds: margin >= -NORM_MARGIN_TOL,
        margin,
        norm_f,
        norm_major,
    })
}

/// `f = k̄^{j−1}k^j` and `F = Ē^{j−1}E^j` built from `k` and its exact
/// majorant `E`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualityCase {
    pub k: CoefficientSequence,
    pub e_k: CoefficientSequence,
    pub f: CoefficientSequence,
    pub f_major: CoefficientSequence,
    pub j: u32,
}

impl EqualityCase {
    pub fn new(k: &CoefficientSequence, j: u32) -> Result<Self> {
        if k.is_empty() {
            return Err(MajorantError::EmptyInput);
        }
        ExponentPair::special(j)?;
        let e_k = exact_majorant(k);
        Ok(Self {
            f: power_product(k, j)?,
            f_major: power_product(&e_k, j)?,
            k: k.clone(),
            e_k,
            j,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualityCaseReport {
    pub case: EqualityCase,
    pub norm_k: f64,
    pub norm_e_k: f64,
    /// `‖k‖_{2j} = ‖E_k‖_{2j}` to relative 1e-12.
    pub norms_equal: bool,
    pub support_is_bj: bool,
    pub norm_f_p: f64,
    pub norm_major_p: f64,
    pub report: VerificationReport,
}

/// Relative tolerance for "exact" Parseval equality of `2j`-norms.
pub const PARSEVAL_EQ_TOL: f64 = 1e-12;

/// Tolerance for `‖F‖_p = ‖f‖_p` in the equality cases.
pub const EQUALITY_NORM_TOL: f64 = 1e-8;

/// Compares `k` with its exact majorant and the products they generate.
///
/// For a single `k` a B_j support forces `‖k‖_{2j} = ‖E_k‖_{2j}`, and that
/// equality forces `‖f‖_p = ‖F‖_p`. The converse of the first implication
/// only holds over all sign patterns on the support; see
/// [`equality_biconditional`].
pub fn equality_case_report(
    k: &CoefficientSequence,
    j: u32,
    quad: &QuadratureConfig,
) -> Result<EqualityCaseReport> {
    let pair = ExponentPair::special(j)?;
    let case = EqualityCase::new(k, j)?;
    let norm_k = norm_even(k, j)?;
    let norm_e_k = norm_even(&case.e_k, j)?;
    let norms_equal = (norm_e_k - norm_k).abs() <= PARSEVAL_EQ_TOL * norm_e_k;
    let support_is_bj = is_bj_set(&k.support(), j, DEFAULT_ENUMERATION_LIMIT)?.is_bj;
    let norm_f_p = norm_p_estimate(&case.f, pair.p(), quad)?.value;
    let norm_major_p = norm_p_estimate(&case.f_major, pair.p(), quad)?.value;

    let mut report = VerificationReport::new();
    report.push(
        "upper_majorant",
        norm_e_k >= norm_k * (1.0 - PARSEVAL_EQ_TOL),
        norm_e_k - norm_k,
        "the exact majorant has no smaller 2j-norm",
    );
    report.push(
        "bj_implies_equal_norms",
        !support_is_bj || norms_equal,
        if support_is_bj {
            (norm_e_k - norm_k).abs()
        } else {
            0.0
        },
        "a B_j support gives equal 2j-norms for k and its exact majorant",
    );
    let p_gap = (norm_major_p - norm_f_p).abs();
    report.push(
        "equal_norms_imply_equal_p_norms",
        !norms_equal || p_gap <= EQUALITY_NORM_TOL * norm_f_p.max(1.0),
        if norms_equal { p_gap } else { 0.0 },
        "equal 2j-norms give equal p-norms of f and F",
    );
    let majorize = case
        .f
        .support()
        .union(&case.f_major.support())
        .iter()
        .map(|n| case.f_major.re(n) - case.f.get(n).norm())
        .fold(0.0, f64::min);
    report.push(
        "majorizes",
        majorize >= -REPORT_TOL,
        majorize,
        "F majorizes f",
    );
    Ok(EqualityCaseReport {
        case,
        norm_k,
        norm_e_k,
        norms_equal,
        support_is_bj,
        norm_f_p,
        norm_major_p,
        report,
    })
}

/// Result of running every sign pattern on a support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiconditionalOutcome {
    pub support_is_bj: bool,
    /// `‖k‖_{2j} = ‖E_k‖_{2j}` for every sign pattern tried.
    pub equal_for_all_signs: bool,
    pub patterns: usize,
    /// True when the two flags agree.
    pub consistent: bool,
    /// Largest `|‖F‖_p − ‖f‖_p|` over the patterns with equal 2j-norms.
    pub worst_equality_gap: f64,
}

/// Runs [`equality_case_report`] on every sign pattern `±magnitudes` over
/// `support` (the first sign fixed, since `k` and `−k` share all norms).
/// A B_j support gives equal norms for every pattern; otherwise some
/// pattern produces cancellation and a strict inequality.
pub fn equality_biconditional(
    support: &[i64],
    magnitudes: &[f64],
    j: u32,
    quad: &QuadratureConfig,
) -> Result<BiconditionalOutcome> {
    if support.is_empty() || support.len() != magnitudes.len() {
        return Err(MajorantError::PreconditionViolated(
            "support and magnitudes must be nonempty and of equal length".into(),
        ));
    }
    if support.len() > 16 {
        return Err(MajorantError::BudgetExceeded(
            "at most 16 frequencies".into(),
        ));
    }
    let patterns = 1usize << (support.len() - 1);
    let mut equal_for_all_signs = true;
    let mut worst_equality_gap: f64 = 0.0;
    let mut support_is_bj = false;
    for mask in 0..patterns {
        let k = CoefficientSequence::from_real(support.iter().zip(magnitudes).enumerate().map(
            |(i, (&n, &m))| {
                let negative = i > 0 && (mask >> (i - 1)) & 1 == 1;
                (n, if negative { -m } else { m })
            },
        ));
        let r = equality_case_report(&k, j, quad)?;
        support_is_bj = r.support_is_bj;
        if r.norms_equal {
            worst_equality_gap = worst_equality_gap.max((r.norm_major_p - r.norm_f_p).abs());
        } else {
            equal_for_all_signs = false;
        }
    }
    Ok(BiconditionalOutcome {
        support_is_bj,
        equal_for_all_signs,
        patterns,
        consistent: support_is_bj == equal_for_all_signs,
        worst_equality_gap,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Factorability {
    /// `F = H̄^{j−1}H^j` with the recovered `H >= 0`.
    Factorable {
        h: CoefficientSequence,
    },
    NotFactorable {
        reason: String,
    },
    Inconclusive {
        reason: String,
    },
}

/// Decides whether `F` factors as `H̄^{j−1}H^j` with `Ĥ >= 0`, i.e. whether
/// the coefficients of `|F|^{1/(2j−1)} sgn(F)` are nonnegative.
///
/// Polynomials with exactly two or three terms never factor when `j >= 2`.
/// Otherwise the candidate `H` is computed by quadrature on `window`
/// (default: the hull of `supp F̂` widened by twice its span on each side)
/// and accepted when it is nonnegative and reproduces `F`. A truncated `H`
/// can fail to reproduce `F` even when `F` factors through a non-polynomial
/// `H`, hence the inconclusive verdict.
pub fn factorability_check(
    f_major: &CoefficientSequence,
    j: u32,
    window: Option<&FrequencySet>,
    quad: &QuadratureConfig,
    tol: f64,
) -> Result<Factorability> {
    let pair = ExponentPair::special(j)?;
    if f_major.is_empty() {
        return Err(MajorantError::EmptyInput);
    }
    if !f_major.is_real(tol) {
        return Err(MajorantError::PreconditionViolated(
            "F must have real coefficients".into(),
        ));
    }
    if matches!(f_major.len(), 2 | 3) {
        return Ok(Factorability::NotFactorable {
            reason: format!("{} nonzero coefficients", f_major.len()),
        });
    }
    let default_window;
    let window = match window {
        Some(w) => w,
        None => {
            let (lo, hi) = (
                f_major.min_frequency().unwrap(),
                f_major.max_frequency().unwrap(),
            );
            let span = hi - lo;
            default_window = FrequencySet::from_iter(lo - 2 * span..=hi + 2 * span);
            &default_window
        }
    };
    let h = dual_function_coeffs(f_major, pair.p(), window, quad)?;
    let scale = f_major.max_abs().max(1.0);
    if let Some((n, v)) = h.iter().find(|(_, v)| v.re < -10.0 * tol * scale) {
        return Ok(Factorability::NotFactorable {
            reason: format!("coefficient {n} of the candidate factor is {}", v.re),
        });
    }
    let truncated = CoefficientSequence::from_real(
        h.iter()
            .filter(|(_, v)| v.re > tol * scale)
            .map(|(n, v)| (n, v.re)),
    );
    let rebuilt = power_product(&truncated, j)?;
    let err = rebuilt.max_abs_diff(f_major);
    if err <= tol * scale {
        Ok(Factorability::Factorable { h: truncated })
    } else {
        Ok(Factorability::Inconclusive {
            reason: format!("truncated factor reproduces F only to {err:e}"),
        })
    }
}

/// Largest window the brute-force oracle accepts.
pub const ORACLE_MAX_WINDOW: usize = 6;

/// Settings for [`brute_oracle`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Stop when a full sweep moves no coefficient by more than this.
    pub resolution: f64,
    pub max_sweeps: usize,
    /// Fixed trapezoid grid for the objective.
    pub grid: usize,
    /// Seeds the coordinate order of each sweep.
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            resolution: 1e-7,
            max_sweeps: 200_000,
            grid: 4096,
            seed: 0,
        }
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimization of a unimodal `obj` on `[lo, hi]`.
fn golden_section(obj: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = obj(x1);
    let mut f2 = obj(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = obj(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = obj(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Samples of `F_y` on the grid, updated one coordinate at a time.
struct OracleState {
    cos: Vec<Vec<f64>>,
    sin: Vec<Vec<f64>>,
    re: Vec<f64>,
    im: Vec<f64>,
    half_p: f64,
}

impl OracleState {
    fn new(window: &[i64], y: &[f64], grid: usize, p: f64) -> Self {
        let theta =
            |k: usize| -std::f64::consts::PI + std::f64::consts::TAU * k as f64 / grid as f64;
        let cos: Vec<Vec<f64>> = window
            .iter()
            .map(|&n| (0..grid).map(|k| (n as f64 * theta(k)).cos()).collect())
            .collect();
        let sin: Vec<Vec<f64>> = window
            .iter()
            .map(|&n| (0..grid).map(|k| (n as f64 * theta(k)).sin()).collect())
            .collect();
        let mut state = Self {
            cos,
            sin,
            re: vec![0.0; grid],
            im: vec![0.0; grid],
            half_p: 0.5 * p,
        };
        let start = state.direction(y);
        state.shift_by(&start, 1.0);
        state
    }

    /// Samples of the trigonometric polynomial with coefficients `d`.
    fn direction(&self, d: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut re = vec![0.0; self.re.len()];
        let mut im = vec![0.0; self.re.len()];
        for (i, &di) in d.iter().enumerate() {
            for k in 0..re.len() {
                re[k] += di * self.cos[i][k];
                im[k] += di * self.sin[i][k];
            }
        }
        (re, im)
    }

    fn shift_by(&mut self, dir: &(Vec<f64>, Vec<f64>), t: f64) {
        for k in 0..self.re.len() {
            self.re[k] += t * dir.0[k];
            self.im[k] += t * dir.1[k];
        }
    }

    /// Objective after adding `t` times the samples `(c, s)`.
    fn value_along(&self, c: &[f64], s: &[f64], t: f64) -> f64 {
        let total: f64 = (0..self.re.len())
            .map(|k| {
                let a = self.re[k] + t * c[k];
                let b = self.im[k] + t * s[k];
                (a * a + b * b).powf(self.half_p)
            })
            .sum();
        total / self.re.len() as f64
    }
}

/// Minimizes `obj` over `[floor, ceil]` near `x`, starting from the bracket
/// `[x − r, x + r]` and widening it while the minimum sits on a free edge.
fn bracketed_search(
    obj: &dyn Fn(f64) -> f64,
    x: f64,
    (floor, ceil): (f64, f64),
    mut r: f64,
    tol: f64,
) -> f64 {
    let cap = 1e6 * r.max(1.0);
    let best = loop {
        let lo = (x - r).max(floor);
        let hi = (x + r).min(ceil);
        if hi - lo <= tol {
            break x;
        }
        let t = golden_section(obj, lo, hi, tol);
        let near_lo = t - lo < 0.05 * (hi - lo) && lo > floor;
        let near_hi = hi - t < 0.05 * (hi - lo) && hi < ceil;
        if (near_lo || near_hi) && r < cap {
            r *= 4.0;
            continue;
        }
        // golden section never evaluates the endpoints
        break [lo, hi, t]
            .into_iter()
            .min_by(|a, b| obj(*a).total_cmp(&obj(*b)))
            .unwrap();
    };
    if obj(best) < obj(x) {
        best
    } else {
        x
    }
}

/// Line search from `y` along `d` (with grid samples `dir`) inside the box
/// `y >= lower`; applies the best move and returns its length.
fn line_move(
    state: &mut OracleState,
    y: &mut [f64],
    lower: &[f64],
    d: &[f64],
    dir: &(Vec<f64>, Vec<f64>),
    radius: f64,
    tol: f64,
) -> f64 {
    let (mut t_lo, mut t_hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for (di, (yi, lo)) in d.iter().zip(y.iter().zip(lower)) {
        if *di > 0.0 {
            t_lo = t_lo.max(-(yi - lo) / di);
        } else if *di < 0.0 {
            t_hi = t_hi.min((yi - lo) / -di);
        }
    }
    let t = bracketed_search(
        &|t: f64| state.value_along(&dir.0, &dir.1, t),
        0.0,
        (t_lo, t_hi),
        radius,
        tol,
    );
    if t != 0.0 {
        state.shift_by(dir, t);
        for (yi, (di, lo)) in y.iter_mut().zip(d.iter().zip(lower)) {
            *yi = (*yi + t * di).max(*lo);
        }
    }
    t
}

/// Minimal full majorant by coordinate descent with golden-section line
/// searches, for windows of at most [`ORACLE_MAX_WINDOW`] frequencies.
///
/// The objective is the mean of `|F|^p` on a fixed trapezoid grid. Only
/// function values are used. A sweep searches along every coordinate and
/// every diagonal `e_i ± e_k` in seeded random order, then along the net
/// displacement of the sweep. The minimizer has a high-order zero on the
/// circle, and single-coordinate moves alone stall next to it.
pub fn brute_oracle(
    f: &CoefficientSequence,
    j: u32,
    cfg: &OracleConfig,
) -> Result<CoefficientSequence> {
    let pair = ExponentPair::special(j)?;
    if f.is_empty() {
        return Err(MajorantError::EmptyInput);
    }
    if !(cfg.resolution > 0.0) || cfg.grid == 0 {
        return Err(MajorantError::InvalidConfig(
            "resolution and grid must be positive".into(),
        ));
    }
    let window: Vec<i64> = majorant_window(&f.support(), j)?.iter().collect();
    if window.len() > ORACLE_MAX_WINDOW {
        return Err(MajorantError::PreconditionViolated(format!(
            "window has {} frequencies, oracle handles at most {ORACLE_MAX_WINDOW}",
            window.len()
        )));
    }
    let lower: Vec<f64> = window.iter().map(|&n| f.get(n).norm()).collect();
    let grid = cfg
        .grid
        .max(4 * (window.last().unwrap() - window[0]) as usize + 4);
    let mut y = lower.clone();
    let mut state = OracleState::new(&window, &y, grid, pair.p());

    // coordinate directions, then the diagonals e_i ± e_k
    let dim = window.len();
    let mut directions: Vec<Vec<f64>> = (0..dim)
        .map(|i| (0..dim).map(|k| if k == i { 1.0 } else { 0.0 }).collect())
        .collect();
    for i in 0..dim {
        for k in i + 1..dim {
            for sign in [1.0, -1.0] {
                let mut d = vec![0.0; dim];
                d[i] = 1.0;
                d[k] = sign;
                directions.push(d);
            }
        }
    }
    let samples: Vec<_> = directions.iter().map(|d| state.direction(d)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..directions.len()).collect();
    let scale = lower.iter().cloned().fold(0.0, f64::max);
    let mut radius = vec![scale; directions.len()];
    let line_tol = cfg.resolution * 1e-2;

    for _ in 0..cfg.max_sweeps {
        order.shuffle(&mut rng);
        let before = y.clone();
        for &i in &order {
            let t = line_move(
                &mut state,
                &mut y,
                &lower,
                &directions[i],
                &samples[i],
                radius[i],
                line_tol,
            );
            radius[i] = (4.0 * t.abs()).max(10.0 * cfg.resolution);
        }

        // pattern move along the net displacement of the sweep
        let d: Vec<f64> = y.iter().zip(&before).map(|(a, b)| a - b).collect();
        let swept = d.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let t = if swept > 0.0 {
            let dir = state.direction(&d);
            line_move(&mut state, &mut y, &lower, &d, &dir, 1.0, line_tol)
        } else {
            0.0
        };
        if swept.max(swept * t.abs()) < cfg.resolution {
            return Ok(CoefficientSequence::from_real(
                window.iter().copied().zip(y),
            ));
        }
    }
    Err(MajorantError::BudgetExceeded(format!(
        "coordinate descent did not settle within {} sweeps",
        cfg.max_sweeps
    )))
}
