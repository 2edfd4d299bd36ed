//! The primal route: minimize `‖F‖_p^p` directly over real coefficient
//! vectors on the window `T = jS + (j−1)(−S)`, subject to `F̂(n) >= |f̂(n)|`
//! on `S` and, for full majorants, `F̂ >= 0` on the rest of `T`.
//!
//! The objective is a trapezoid sum on a fixed grid, and its gradient at `n`
//! is `p·Ĝ(n)` with `G = |F|^{p−1} sgn(F)`. Iterates are projected onto the
//! box of lower bounds after every step.

use serde::{Deserialize, Serialize};

use crate::dual::{
    dual_pipeline, sufficient_decrease, ConjugateResult, DualSolution, SolverConfig, StepRule,
};
use crate::error::{MajorantError, Result};
use crate::spectral::{
    dual_function_samples, norm_p, CoefficientSequence, ExponentPair, PeriodicGrid,
    QuadratureConfig,
};
use crate::sumset::{majorant_window, FrequencySet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MajorantMode {
    /// Lower bounds only on the support of `f̂`.
    Partial,
    /// Additionally `F̂ >= 0` on the rest of the window.
    Full,
}

impl std::str::FromStr for MajorantMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "partial" => Ok(Self::Partial),
            "full" => Ok(Self::Full),
            other => Err(format!("unknown mode {other:?} (expected partial or full)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimalSolution {
    pub f_major: CoefficientSequence,
    pub norm_p: f64,
    /// Frequencies where the lower bound is attained.
    pub active_set: FrequencySet,
    pub iterations: usize,
    /// Sup-norm of the last projected-gradient step.
    pub stationarity: f64,
    pub converged: bool,
}

/// The discretized primal problem on a fixed grid.
pub struct PrimalProblem {
    window: Vec<i64>,
    lower: Vec<f64>,
    p: f64,
    n_grid: usize,
    /// `e^{inθ_k}` for each window frequency, row-major.
    basis: Vec<num_complex::Complex64>,
}

impl PrimalProblem {
    pub fn new(
        f: &CoefficientSequence,
        j: u32,
        mode: MajorantMode,
        quad: &QuadratureConfig,
    ) -> Result<Self> {
        let pair = ExponentPair::special(j)?;
        quad.validate()?;
        if f.is_empty() {
            return Err(MajorantError::EmptyInput);
        }
        let window: Vec<i64> = majorant_window(&f.support(), j)?.iter().collect();
        let lower = window
            .iter()
            .map(|&n| {
                let c = f.get(n).norm();
                match (c > 0.0, mode) {
                    (true, _) => c,
                    (false, MajorantMode::Full) => 0.0,
                    (false, MajorantMode::Partial) => f64::NEG_INFINITY,
                }
            })
            .collect();
        let span = window.last().unwrap() - window[0];
        // the gradient integrand spans twice the window
        let n_grid = quad.fixed_grid(2 * span);
        // symmetric inputs put high-order zeros of the minimizer at 0 or π;
        // the half-step shift keeps nodes off them, since rounding at a node
        // on such a zero is amplified by the power 1/(2j−1) in the gradient
        let grid = PeriodicGrid::with_shift(n_grid, 0.5);
        let mut basis = Vec::with_capacity(window.len() * n_grid);
        for &n in &window {
            basis.extend(grid.evaluate(&CoefficientSequence::monomial(n, 1.0.into())));
        }
        Ok(Self {
            window,
            lower,
            p: pair.p(),
            n_grid,
            basis,
        })
    }

    pub fn window(&self) -> &[i64] {
        &self.window
    }

    pub fn lower_bounds(&self) -> &[f64] {
        &self.lower
    }

    pub fn grid_size(&self) -> usize {
        self.n_grid
    }

    fn values(&self, y: &[f64]) -> Vec<num_complex::Complex64> {
        let mut out = vec![num_complex::Complex64::new(0.0, 0.0); self.n_grid];
        for (i, &yi) in y.iter().enumerate() {
            if yi == 0.0 {
                continue;
            }
            let row = &self.basis[i * self.n_grid..(i + 1) * self.n_grid];
            for (o, e) in out.iter_mut().zip(row) {
                *o += e * yi;
            }
        }
        out
    }

    /// `ψ(y) = mean_k |F_y(θ_k)|^p`.
    pub fn objective(&self, y: &[f64]) -> f64 {
        let vals = self.values(y);
        vals.iter().map(|v| v.norm().powf(self.p)).sum::<f64>() / self.n_grid as f64
    }

    /// `∇ψ(y)_n = p·Re Ĝ_y(n)`.
    pub fn gradient(&self, y: &[f64]) -> Vec<f64> {
        let samples = dual_function_samples(&self.values(y), self.p);
        (0..self.window.len())
            .map(|i| {
                let row = &self.basis[i * self.n_grid..(i + 1) * self.n_grid];
                let s: f64 = samples
                    .iter()
                    .zip(row)
                    .map(|(g, e)| (g * e.conj()).re)
                    .sum();
                self.p * s / self.n_grid as f64
            })
            .collect()
    }

    pub fn project(&self, y: &mut [f64]) {
        for (v, &b) in y.iter_mut().zip(&self.lower) {
            if *v < b {
                *v = b;
            }
        }
    }

    /// The exact majorant of `f`, padded with zeros on the window.
    pub fn default_start(&self) -> Vec<f64> {
        self.lower.iter().map(|&b| b.max(0.0)).collect()
    }

    pub fn to_sequence(&self, y: &[f64]) -> CoefficientSequence {
        CoefficientSequence::from_real(self.window.iter().copied().zip(y.iter().copied()))
    }
}

fn projected_step(problem: &PrimalProblem, y: &[f64], grad: &[f64], s: f64) -> Vec<f64> {
    let mut next: Vec<f64> = y.iter().zip(grad).map(|(a, g)| a - s * g).collect();
    problem.project(&mut next);
    next
}

fn stationarity(problem: &PrimalProblem, y: &[f64], grad: &[f64]) -> f64 {
    projected_step(problem, y, grad, 1.0)
        .iter()
        .zip(y)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Minimal majorant by the primal route, started from the exact majorant.
pub fn solve_primal(
    f: &CoefficientSequence,
    j: u32,
    mode: MajorantMode,
    cfg: &SolverConfig,
    quad: &QuadratureConfig,
) -> Result<PrimalSolution> {
    let problem = PrimalProblem::new(f, j, mode, quad)?;
    let start = problem.default_start();
    solve_primal_problem(&problem, cfg, quad, &start)
}

/// Limited-memory curvature pairs, applied on the free coordinates only.
struct CurvatureMemory {
    pairs: Vec<(Vec<f64>, Vec<f64>)>,
    capacity: usize,
}

impl CurvatureMemory {
    fn new(capacity: usize) -> Self {
        Self {
            pairs: Vec::new(),
            capacity,
        }
    }

    fn clear(&mut self) {
        self.pairs.clear();
    }

    fn push(&mut self, ds: Vec<f64>, dg: Vec<f64>, free: &[bool]) {
        let sy = masked_dot(&ds, &dg, free);
        let ss = masked_dot(&ds, &ds, free);
        let yy = masked_dot(&dg, &dg, free);
        if sy > 1e-12 * (ss * yy).sqrt() && sy > 0.0 {
            if self.pairs.len() == self.capacity {
                self.pairs.remove(0);
            }
            self.pairs.push((ds, dg));
        }
    }

    /// Two-loop recursion: approximates `H·grad` on the free coordinates.
    fn apply(&self, grad: &[f64], free: &[bool], fallback_scale: f64) -> Vec<f64> {
        let mut q: Vec<f64> = grad
            .iter()
            .zip(free)
            .map(|(g, &f)| if f { *g } else { 0.0 })
            .collect();
        // pairs recorded on another free set may lack curvature on this one
        let pairs: Vec<&(Vec<f64>, Vec<f64>)> = self
            .pairs
            .iter()
            .filter(|(ds, dg)| {
                let sy = masked_dot(ds, dg, free);
                sy > 1e-12 * (masked_dot(ds, ds, free) * masked_dot(dg, dg, free)).sqrt()
            })
            .collect();
        let mut alphas = Vec::with_capacity(pairs.len());
        for (ds, dg) in pairs.iter().rev() {
            let rho = 1.0 / masked_dot(ds, dg, free);
            let a = rho * masked_dot(ds, &q, free);
            for i in 0..q.len() {
                if free[i] {
                    q[i] -= a * dg[i];
                }
            }
            alphas.push((a, rho));
        }
        let gamma = match pairs.last() {
            Some((ds, dg)) => masked_dot(ds, dg, free) / masked_dot(dg, dg, free),
            None => fallback_scale,
        };
        for v in q.iter_mut() {
            *v *= gamma;
        }
        for ((ds, dg), (a, rho)) in pairs.iter().zip(alphas.into_iter().rev()) {
            let b = rho * masked_dot(dg, &q, free);
            for i in 0..q.len() {
                if free[i] {
                    q[i] += (a - b) * ds[i];
                }
            }
        }
        q
    }
}

fn masked_dot(a: &[f64], b: &[f64], mask: &[bool]) -> f64 {
    a.iter()
        .zip(b)
        .zip(mask)
        .filter(|(_, &m)| m)
        .map(|((x, y), _)| x * y)
        .sum()
}

const MEMORY: usize = 8;

/// Runs the projected solver on a prepared problem from `start` (indexed like
/// [`PrimalProblem::window`]).
///
/// With [`StepRule::Backtracking`] the step direction is a limited-memory
/// quasi-Newton direction on the coordinates that are not pinned at their
/// lower bound, followed by a projected backtracking search. The minimizer
/// has a zero of high order on the circle, which makes plain gradient
/// steps converge sublinearly. [`StepRule::Fixed`] takes plain projected
/// gradient steps of length `fixed_step`.
pub fn solve_primal_problem(
    problem: &PrimalProblem,
    cfg: &SolverConfig,
    quad: &QuadratureConfig,
    start: &[f64],
) -> Result<PrimalSolution> {
    cfg.validate()?;
    if start.len() != problem.window.len() {
        return Err(MajorantError::InvalidConfig(format!(
            "start has {} entries, window has {}",
            start.len(),
            problem.window.len()
        )));
    }
    let dim = problem.window.len();
    let mut y = start.to_vec();
    problem.project(&mut y);
    let mut psi = problem.objective(&y);
    let mut grad = problem.gradient(&y);
    let mut stat = stationarity(problem, &y, &grad);
    let mut memory = CurvatureMemory::new(MEMORY);
    let mut free_prev: Vec<bool> = Vec::new();
    let mut scale = 1.0 / grad.iter().fold(1e-12_f64, |m, g| m.max(g.abs()));
    let mut iterations = 0;

    while stat >= cfg.tol_stationarity && iterations < cfg.max_iters {
        iterations += 1;
        let (next, next_psi, next_grad) = match cfg.step_rule {
            StepRule::Fixed => {
                let next = projected_step(problem, &y, &grad, cfg.fixed_step);
                let v = problem.objective(&next);
                let g = problem.gradient(&next);
                (next, v, g)
            }
            StepRule::Backtracking => {
                // coordinates within eps of their bound and pushed against it
                let eps = stat.min(1e-3);
                let free: Vec<bool> = (0..dim)
                    .map(|i| !(y[i] <= problem.lower[i] + eps && grad[i] > 0.0))
                    .collect();
                free_prev = free.clone();
                let mut dir: Vec<f64> = memory
                    .apply(&grad, &free, scale)
                    .iter()
                    .zip(&grad)
                    .zip(&free)
                    .map(|((hg, g), &f)| if f { -hg } else { -scale * g })
                    .collect();
                if masked_dot(&dir, &grad, &free) >= 0.0 {
                    memory.clear();
                    dir = grad.iter().map(|g| -scale * g).collect();
                }

                let mut s = 1.0;
                let mut accepted = None;
                for _ in 0..60 {
                    let mut cand: Vec<f64> = y.iter().zip(&dir).map(|(a, d)| a + s * d).collect();
                    problem.project(&mut cand);
                    let v = problem.objective(&cand);
                    let cand_grad = problem.gradient(&cand);
                    if sufficient_decrease(psi, v, &grad, &cand_grad, &y, &cand, cfg.armijo) {
                        accepted = Some((cand, v, cand_grad));
                        break;
                    }
                    s *= 0.5;
                }
                match accepted {
                    Some(a) => a,
                    None if !memory.pairs.is_empty() => {
                        // retry from a plain gradient direction
                        memory.clear();
                        continue;
                    }
                    None => break,
                }
            }
        };
        if next == y {
            break;
        }
        if cfg.step_rule == StepRule::Backtracking {
            let ds: Vec<f64> = next.iter().zip(&y).map(|(a, b)| a - b).collect();
            let dg: Vec<f64> = next_grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
            let all = vec![true; dim];
            let sy = masked_dot(&ds, &dg, &all);
            if sy > 0.0 {
                scale = sy / masked_dot(&dg, &dg, &all);
            }
            memory.push(ds, dg, &free_prev);
        }
        y = next;
        psi = next_psi;
        grad = next_grad;
        stat = stationarity(problem, &y, &grad);
    }

    let f_major = problem.to_sequence(&y);
    let active_set = problem
        .window
        .iter()
        .zip(y.iter().zip(&problem.lower))
        .filter(|(_, (v, b))| b.is_finite() && **v - **b <= cfg.tol_feas)
        .map(|(&n, _)| n)
        .collect();
    let norm = match norm_p(&f_major, problem.p, quad) {
        Ok(v) => v,
        Err(MajorantError::NonConvergence { estimate, .. }) => estimate,
        Err(e) => return Err(e),
    };
    Ok(PrimalSolution {
        f_major,
        norm_p: norm,
        active_set,
        iterations,
        stationarity: stat,
        converged: stat < cfg.tol_stationarity,
    })
}

/// Coefficientwise tolerance for three-way agreement.
pub const CROSS_TOL: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValidation {
    pub dual: DualSolution,
    pub conjugate: ConjugateResult,
    pub partial: PrimalSolution,
    pub full: PrimalSolution,
    /// Largest coefficient gap among the three majorants.
    pub max_discrepancy: f64,
    /// Gap between the partial and full primal optima.
    pub partial_full_gap: f64,
    pub agree: bool,
}

/// Solves by all three routes and records how far apart they land.
pub fn cross_validate_report(
    f: &CoefficientSequence,
    j: u32,
    cfg: &SolverConfig,
    quad: &QuadratureConfig,
) -> Result<CrossValidation> {
    let (dual, conjugate) = dual_pipeline(f, j, cfg)?;
    let partial = solve_primal(f, j, MajorantMode::Partial, cfg, quad)?;
    let full = solve_primal(f, j, MajorantMode::Full, cfg, quad)?;
    let partial_full_gap = partial.f_major.max_abs_diff(&full.f_major);
    let max_discrepancy = conjugate
        .f_major
        .max_abs_diff(&full.f_major)
        .max(conjugate.f_major.max_abs_diff(&partial.f_major))
        .max(partial_full_gap);
    Ok(CrossValidation {
        dual,
        conjugate,
        partial,
        full,
        max_discrepancy,
        partial_full_gap,
        agree: max_discrepancy <= CROSS_TOL,
    })
}

/// As [`cross_validate_report`], failing when the routes disagree by more
/// than [`CROSS_TOL`].
pub fn cross_validate(
    f: &CoefficientSequence,
    j: u32,
    cfg: &SolverConfig,
    quad: &QuadratureConfig,
) -> Result<CrossValidation> {
    let report = cross_validate_report(f, j, cfg, quad)?;
    if !report.agree {
        return Err(MajorantError::Mismatch {
            max_discrepancy: report.max_discrepancy,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn real(pairs: &[(i64, f64)]) -> CoefficientSequence {
        CoefficientSequence::from_real(pairs.iter().copied())
    }

    #[test]
    fn single_exponential_primal() {
        let f = CoefficientSequence::monomial(-2, Complex64::new(1.0, -1.0));
        let sol = solve_primal(
            &f,
            3,
            MajorantMode::Full,
            &SolverConfig::default(),
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert!(sol.converged);
        assert_eq!(sol.f_major.len(), 1);
        assert!((sol.f_major.re(-2) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn flagship_primal_matches_closed_form() {
        let f = real(&[(0, 1.0), (1, 1.0)]);
        let expected = real(&[(-1, 1.0 / 3.0), (0, 1.0), (1, 1.0), (2, 1.0 / 3.0)]);
        for mode in [MajorantMode::Full, MajorantMode::Partial] {
            let sol = solve_primal(
                &f,
                2,
                mode,
                &SolverConfig::default(),
                &QuadratureConfig::default(),
            )
            .unwrap();
            assert!(
                sol.f_major.max_abs_diff(&expected) < 1e-5,
                "{mode:?}: {:?} after {} iterations, stat {}",
                sol.f_major,
                sol.iterations,
                sol.stationarity
            );
        }
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("full".parse::<MajorantMode>().unwrap(), MajorantMode::Full);
        assert_eq!(
            "partial".parse::<MajorantMode>().unwrap(),
            MajorantMode::Partial
        );
        assert!("other".parse::<MajorantMode>().is_err());
    }

    #[test]
    fn primal_rejects_bad_inputs() {
        let cfg = SolverConfig::default();
        let quad = QuadratureConfig::default();
        assert!(matches!(
            solve_primal(
                &CoefficientSequence::new(),
                2,
                MajorantMode::Full,
                &cfg,
                &quad
            ),
            Err(MajorantError::EmptyInput)
        ));
        assert!(solve_primal(&real(&[(0, 1.0)]), 1, MajorantMode::Full, &cfg, &quad).is_err());
    }
}
