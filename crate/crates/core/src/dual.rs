//! The dual program: minimize `‖g‖_{2j}^{2j}` over nonnegative spectra on
//! `S = supp f̂` subject to `Σ |f̂(n)| ĝ(n) = 1`, then rescale the minimizer
//! into the p-conjugate `G` and the minimal majorant `F = Ḡ^{j−1}G^j`.
//!
//! The feasible set is a weighted simplex. Iterates stay exactly feasible:
//! every step is projected back with a finite sorting algorithm, and the
//! Frank–Wolfe gap over the simplex vertices `e_n / w_n` certifies optimality
//! (`gap >= Φ(x) − Φ*`).

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{MajorantError, Result};
use crate::spectral::{
    convolution_power, norm_even, norm_p, power_product, CoefficientSequence, ExponentPair,
    QuadratureConfig,
};
use crate::sumset::FrequencySet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepRule {
    Fixed,
    Backtracking,
}

/// Iteration budget, step policy and tolerances shared by both solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub step_rule: StepRule,
    /// Dual termination: Frank–Wolfe gap, in objective units.
    pub tol_gap: f64,
    /// Primal termination: sup-norm of the projected gradient step.
    pub tol_stationarity: f64,
    pub tol_feas: f64,
    /// Step length for [`StepRule::Fixed`].
    pub fixed_step: f64,
    pub armijo: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 20_000,
            step_rule: StepRule::Backtracking,
            tol_gap: 1e-10,
            tol_stationarity: 1e-9,
            tol_feas: 1e-8,
            fixed_step: 0.05,
            armijo: 1e-4,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tol_gap", self.tol_gap),
            ("tol_stationarity", self.tol_stationarity),
            ("tol_feas", self.tol_feas),
            ("fixed_step", self.fixed_step),
            ("armijo", self.armijo),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(MajorantError::InvalidConfig(format!("{name} must be > 0")));
            }
        }
        if self.armijo >= 1.0 {
            return Err(MajorantError::InvalidConfig("armijo must be < 1".into()));
        }
        Ok(())
    }
}

/// Minimizer `h` of the dual program and `K = ‖h‖_{2j}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualSolution {
    pub h: CoefficientSequence,
    pub k: f64,
    pub iterations: usize,
    /// Frank–Wolfe gap of the program with weights scaled to max 1.
    pub gap: f64,
    pub converged: bool,
}

/// The p-conjugate, the majorant it generates, and the slackness data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugateResult {
    pub g: CoefficientSequence,
    pub f_major: CoefficientSequence,
    pub norm_f_p: f64,
    pub norm_g_2j: f64,
    /// Frequencies of `S` where `F̂(n) = |f̂(n)|` (to 1e-6 relative).
    pub slackness_active: FrequencySet,
    /// `F̂(n) − |f̂(n)|` for every `n ∈ S`.
    pub slackness_residuals: BTreeMap<i64, f64>,
}

/// Frequencies with nonzero coefficients and their weights `|f̂(n)|`.
fn weighted_support(f: &CoefficientSequence) -> Result<(Vec<i64>, Vec<f64>)> {
    if f.is_empty() {
        return Err(MajorantError::EmptyInput);
    }
    Ok(f.iter().map(|(n, v)| (n, v.norm())).unzip())
}

/// Euclidean projection onto `{x >= 0, Σ w_n x_n = 1}` (all `w_n > 0`).
///
/// The solution is `x_n = max(0, y_n − λ w_n)`; sorting the breakpoints
/// `y_n / w_n` finds `λ` exactly.
pub fn project_weighted_simplex(y: &[f64], w: &[f64]) -> Vec<f64> {
    assert_eq!(y.len(), w.len());
    let mut order: Vec<usize> = (0..y.len()).collect();
    order.sort_by(|&a, &b| (y[b] / w[b]).total_cmp(&(y[a] / w[a])));

    let mut wy = 0.0;
    let mut ww = 0.0;
    let mut lambda = 0.0;
    for (rank, &i) in order.iter().enumerate() {
        wy += w[i] * y[i];
        ww += w[i] * w[i];
        let candidate = (wy - 1.0) / ww;
        let next_break = order.get(rank + 1).map(|&k| y[k] / w[k]);
        lambda = candidate;
        if next_break.map_or(true, |b| b <= candidate) {
            break;
        }
    }
    y.iter()
        .zip(w)
        .map(|(&yi, &wi)| (yi - lambda * wi).max(0.0))
        .collect()
}

fn to_sequence(support: &[i64], x: &[f64]) -> CoefficientSequence {
    CoefficientSequence::from_real(support.iter().copied().zip(x.iter().copied()))
}

/// `Φ(x) = ‖x‖_{2j}^{2j}`, evaluated exactly by Parseval.
pub fn dual_objective(support: &[i64], x: &[f64], j: u32) -> f64 {
    let xj = convolution_power(&to_sequence(support, x), j).expect("j >= 1");
    xj.iter().map(|(_, v)| v.norm_sqr()).sum()
}

/// `∇Φ(x)(n) = 2j · (Ḡ^{j−1}G^j)^(n)` with `Ĝ = x`.
pub fn dual_gradient(support: &[i64], x: &[f64], j: u32) -> Vec<f64> {
    let pp = power_product(&to_sequence(support, x), j).expect("j >= 1");
    support.iter().map(|&n| 2.0 * j as f64 * pp.re(n)).collect()
}

/// Gradient with its component along `w` removed. Steps and gaps are
/// invariant under that shift on the simplex, and dropping it avoids
/// cancellation in directional derivatives near the optimum.
fn reduced_gradient(support: &[i64], x: &[f64], j: u32, w: &[f64]) -> Vec<f64> {
    let grad = dual_gradient(support, x, j);
    // multiplier from the face containing x, so that the reduced gradient is
    // orthogonal to w there
    let (gw, ww) = grad
        .iter()
        .zip(w)
        .zip(x)
        .filter(|(_, xi)| **xi > 0.0)
        .fold((0.0, 0.0), |(a, b), ((g, wi), _)| (a + g * wi, b + wi * wi));
    let lambda = gw / ww;
    grad.iter().zip(w).map(|(g, wi)| g - lambda * wi).collect()
}

/// Armijo test for a convex objective. Near the optimum the decrease drops
/// below the rounding of the objective itself, so the test also accepts the
/// convexity bound `Φ(x⁺) − Φ(x) <= ⟨∇Φ(x⁺), x⁺ − x⟩`, which only needs
/// gradients.
pub(crate) fn sufficient_decrease(
    value: f64,
    cand_value: f64,
    grad: &[f64],
    cand_grad: &[f64],
    x: &[f64],
    cand: &[f64],
    armijo: f64,
) -> bool {
    let mut descent = 0.0;
    let mut upper = 0.0;
    for i in 0..x.len() {
        let d = cand[i] - x[i];
        descent += grad[i] * d;
        upper += cand_grad[i] * d;
    }
    if descent >= 0.0 {
        return false;
    }
    cand_value - value <= armijo * descent || upper <= armijo * descent
}

fn frank_wolfe_gap(x: &[f64], grad: &[f64], w: &[f64]) -> f64 {
    let inner: f64 = x.iter().zip(grad).map(|(a, b)| a * b).sum();
    let best_vertex = grad
        .iter()
        .zip(w)
        .map(|(g, wi)| g / wi)
        .fold(f64::INFINITY, f64::min);
    inner - best_vertex
}

/// A random point of the weighted simplex, reproducible from `seed`.
pub fn random_feasible_start(f: &CoefficientSequence, seed: u64) -> Result<Vec<f64>> {
    let (_, w) = weighted_support(f)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = w.iter().map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().zip(&w).map(|(a, b)| a * b).sum();
    Ok(raw.iter().map(|r| r / total).collect())
}

/// Solves the dual program from the point with equal weights.
pub fn solve_dual(f: &CoefficientSequence, j: u32, cfg: &SolverConfig) -> Result<DualSolution> {
    let (_, w) = weighted_support(f)?;
    let total: f64 = w.iter().sum();
    let start = vec![1.0 / total; w.len()];
    solve_dual_from(f, j, cfg, &start)
}

/// Solves the dual program by projected gradient from `start` (projected
/// onto the feasible set first). `start` is indexed like the support of `f`.
pub fn solve_dual_from(
    f: &CoefficientSequence,
    j: u32,
    cfg: &SolverConfig,
    start: &[f64],
) -> Result<DualSolution> {
    ExponentPair::special(j)?;
    cfg.validate()?;
    let (support, w) = weighted_support(f)?;
    if start.len() != support.len() {
        return Err(MajorantError::InvalidConfig(format!(
            "start has {} entries, support has {}",
            start.len(),
            support.len()
        )));
    }

    // work with weights normalized to max 1, so the gap tolerance means the
    // same thing for f and any multiple of f
    let sigma = w.iter().cloned().fold(0.0, f64::max);
    let w: Vec<f64> = w.iter().map(|v| v / sigma).collect();
    let start: Vec<f64> = start.iter().map(|v| v * sigma).collect();

    let mut x = project_weighted_simplex(&start, &w);
    let mut phi = dual_objective(&support, &x, j);
    let mut grad = reduced_gradient(&support, &x, j, &w);
    let mut gap = frank_wolfe_gap(&x, &grad, &w);
    // initial step ~ 1/curvature of Φ at the current scale
    let mut step = cfg.fixed_step;
    if cfg.step_rule == StepRule::Backtracking {
        let scale: f64 = x.iter().map(|v| v * v).sum::<f64>().max(f64::MIN_POSITIVE);
        step = scale / phi.max(f64::MIN_POSITIVE);
    }

    let mut iterations = 0;
    while gap >= cfg.tol_gap && iterations < cfg.max_iters {
        iterations += 1;
        let trial_point = |s: f64| -> Vec<f64> {
            let y: Vec<f64> = x.iter().zip(&grad).map(|(xi, gi)| xi - s * gi).collect();
            project_weighted_simplex(&y, &w)
        };
        let (next, next_phi) = match cfg.step_rule {
            StepRule::Fixed => {
                let next = trial_point(step);
                let v = dual_objective(&support, &next, j);
                (next, v)
            }
            StepRule::Backtracking => {
                let mut s = step * 2.0;
                let mut accepted = None;
                for _ in 0..60 {
                    let cand = trial_point(s);
                    let v = dual_objective(&support, &cand, j);
                    let cand_grad = reduced_gradient(&support, &cand, j, &w);
                    if sufficient_decrease(phi, v, &grad, &cand_grad, &x, &cand, cfg.armijo) {
                        accepted = Some((cand, v));
                        break;
                    }
                    s *= 0.5;
                }
                match accepted {
                    Some(a) => {
                        step = s;
                        a
                    }
                    // no representable decrease left
                    None => break,
                }
            }
        };
        if next == x {
            break;
        }
        x = next;
        phi = next_phi;
        grad = reduced_gradient(&support, &x, j, &w);
        gap = frank_wolfe_gap(&x, &grad, &w);
    }

    let x: Vec<f64> = x.iter().map(|v| v / sigma).collect();
    let h = to_sequence(&support, &x);
    let k = norm_even(&h, j)?;
    Ok(DualSolution {
        h,
        k,
        iterations,
        gap,
        converged: gap < cfg.tol_gap,
    })
}

/// Builds `G = t·h`, `F = Ḡ^{j−1}G^j` and the slackness data for an
/// arbitrary scaling `t`, without validating it.
pub fn conjugate_with_scaling(
    h: &CoefficientSequence,
    f: &CoefficientSequence,
    j: u32,
    t: f64,
) -> Result<ConjugateResult> {
    let pair = ExponentPair::special(j)?;
    let g = h.scale_real(t);
    let f_major = power_product(&g, j)?;
    let norm_g_2j = norm_even(&g, j)?;
    // |F|^p = |G|^{2j} is a trigonometric polynomial, so the trapezoid
    // rule is exact once the grid resolves it
    let norm_f_p = norm_p(&f_major, pair.p(), &QuadratureConfig::default())?;

    let mut slackness_residuals = BTreeMap::new();
    let mut slackness_active = FrequencySet::new();
    for (n, v) in f.iter() {
        let target = v.norm();
        let r = f_major.re(n) - target;
        slackness_residuals.insert(n, r);
        if r.abs() <= 1e-6 * target.max(1.0) {
            slackness_active.insert(n);
        }
    }
    Ok(ConjugateResult {
        g,
        f_major,
        norm_f_p,
        norm_g_2j,
        slackness_active,
        slackness_residuals,
    })
}

/// Relative tolerance of the slackness identity checked by
/// [`rescale_to_conjugate`].
pub const SCALING_TOL: f64 = 1e-6;

/// Rescales the dual minimizer by `t = K^{−p}` into the p-conjugate.
///
/// The scaling is validated through `Σ |f̂(n)| Ĝ(n) = ‖G‖_{2j}^{2j}`, which
/// holds exactly when `F̂ = |f̂|` on the support of `Ĝ`.
pub fn rescale_to_conjugate(
    sol: &DualSolution,
    f: &CoefficientSequence,
    j: u32,
) -> Result<ConjugateResult> {
    let pair = ExponentPair::special(j)?;
    if !(sol.k > 0.0) {
        return Err(MajorantError::PreconditionViolated(
            "K must be positive".into(),
        ));
    }
    let t = sol.k.powf(-pair.p());
    let result = conjugate_with_scaling(&sol.h, f, j, t)?;

    let lhs: f64 = result.g.iter().map(|(n, v)| f.get(n).norm() * v.re).sum();
    let rhs = result.norm_g_2j.powi(2 * j as i32);
    if (lhs - rhs).abs() > SCALING_TOL * rhs.abs().max(lhs.abs()) {
        return Err(MajorantError::ScalingMismatch { lhs, rhs });
    }
    Ok(result)
}

/// Named optimality residuals of a conjugate result against `f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KktReport {
    /// `min_n Ĝ(n)`; should be `>= −tol`.
    pub nonnegativity: f64,
    /// `min_{n∈S} (F̂(n) − |f̂(n)|)`; should be `>= −tol`.
    pub majorization: f64,
    /// `max_n min(Ĝ(n), F̂(n) − |f̂(n)|)`; should be `<= tol`.
    pub slackness: f64,
    /// `max_{n∉S} |Ĝ(n)|`; should be `<= tol`.
    pub support_leakage: f64,
}

impl KktReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.nonnegativity >= -tol
            && self.majorization >= -tol
            && self.slackness <= tol
            && self.support_leakage <= tol
    }

    pub fn to_map(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([
            ("nonnegativity".to_string(), self.nonnegativity),
            ("majorization".to_string(), self.majorization),
            ("slackness".to_string(), self.slackness),
            ("support_leakage".to_string(), self.support_leakage),
        ])
    }
}

pub fn kkt_report(f: &CoefficientSequence, result: &ConjugateResult) -> KktReport {
    kkt_residuals(f, &result.g, &result.f_major)
}

/// KKT residuals for any pair `(G, F)` against `f`.
pub fn kkt_residuals(
    f: &CoefficientSequence,
    g: &CoefficientSequence,
    f_major: &CoefficientSequence,
) -> KktReport {
    let support = f.support();
    let nonnegativity = g.iter().map(|(_, v)| v.re).fold(0.0, f64::min);
    let majorization = f
        .iter()
        .map(|(n, v)| f_major.re(n) - v.norm())
        .fold(f64::INFINITY, f64::min);
    let slackness = g
        .support()
        .union(&support)
        .iter()
        .map(|n| g.re(n).min(f_major.re(n) - f.get(n).norm()))
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    let support_leakage = g
        .iter()
        .filter(|(n, _)| !support.contains(*n))
        .map(|(_, v)| v.norm())
        .fold(0.0, f64::max);
    KktReport {
        nonnegativity,
        majorization: if majorization.is_finite() {
            majorization
        } else {
            0.0
        },
        slackness,
        support_leakage,
    }
}

/// Dual solve followed by rescaling.
pub fn dual_pipeline(
    f: &CoefficientSequence,
    j: u32,
    cfg: &SolverConfig,
) -> Result<(DualSolution, ConjugateResult)> {
    let sol = solve_dual(f, j, cfg)?;
    let result = rescale_to_conjugate(&sol, f, j)?;
    Ok((sol, result))
}
