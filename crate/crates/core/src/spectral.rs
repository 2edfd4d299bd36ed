//! Sparse algebra on coefficient sequences of trigonometric polynomials.
//!
//! A [`CoefficientSequence`] maps integer frequencies to complex values and
//! stands for the polynomial `F(θ) = Σ F̂(n) e^{inθ}`. Norms use the
//! normalized measure `dθ/2π`, so every unimodular exponential has norm 1.
//!
//! Two norm engines live here: [`norm_even`] is exact for even exponents
//! (Parseval applied to a convolution power) and [`norm_p`] is a periodic
//! trapezoid rule with grid doubling for arbitrary `p >= 1`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{MajorantError, Result};
use crate::sumset::FrequencySet;

/// Absolute threshold below which coefficients are dropped after arithmetic.
pub const PRUNE_EPS: f64 = 1e-14;

/// Finitely supported map from frequencies to complex coefficients.
///
/// Entries with modulus below [`PRUNE_EPS`] are never stored, so an absent
/// frequency reads as exactly zero.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSequence {
    entries: BTreeMap<i64, Complex64>,
}

impl CoefficientSequence {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a sequence from `(frequency, value)` pairs, summing repeats.
    pub fn from_pairs<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (i64, Complex64)>,
    {
        let mut entries: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (n, v) in pairs {
            *entries.entry(n).or_default() += v;
        }
        let mut out = Self { entries };
        out.prune();
        out
    }

    pub fn from_real<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (i64, f64)>,
    {
        Self::from_pairs(pairs.into_iter().map(|(n, v)| (n, Complex64::new(v, 0.0))))
    }

    /// The single exponential `c·e^{inθ}`.
    pub fn monomial(n: i64, c: Complex64) -> Self {
        Self::from_pairs([(n, c)])
    }

    pub fn get(&self, n: i64) -> Complex64 {
        self.entries.get(&n).copied().unwrap_or_default()
    }

    /// Real part of the coefficient at `n`.
    pub fn re(&self, n: i64) -> f64 {
        self.get(n).re
    }

    pub fn set(&mut self, n: i64, v: Complex64) {
        if v.norm() < PRUNE_EPS {
            self.entries.remove(&n);
        } else {
            self.entries.insert(n, v);
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.entries.iter().map(|(&n, &v)| (n, v))
    }

    pub fn support(&self) -> FrequencySet {
        FrequencySet::from_iter(self.entries.keys().copied())
    }

    pub fn min_frequency(&self) -> Option<i64> {
        self.entries.keys().next().copied()
    }

    pub fn max_frequency(&self) -> Option<i64> {
        self.entries.keys().next_back().copied()
    }

    /// `max − min` over the support; zero for empty or singleton supports.
    pub fn span(&self) -> i64 {
        match (self.min_frequency(), self.max_frequency()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0,
        }
    }

    /// Largest `|F̂(n)|`.
    pub fn max_abs(&self) -> f64 {
        self.entries.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// True when every imaginary part is at most `tol` in modulus.
    pub fn is_real(&self, tol: f64) -> bool {
        self.entries.values().all(|v| v.im.abs() <= tol)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_pairs(self.iter().map(|(n, v)| (n, v * s)))
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_pairs(self.iter().chain(other.iter()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_pairs(self.iter().chain(other.iter().map(|(n, v)| (n, -v))))
    }

    /// `max_n |a(n) − b(n)|` over the union of supports.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let keys: FrequencySet = self.support().union(&other.support());
        keys.iter()
            .map(|n| (self.get(n) - other.get(n)).norm())
            .fold(0.0, f64::max)
    }

    /// Keeps only the frequencies in `set`.
    pub fn restrict(&self, set: &FrequencySet) -> Self {
        Self::from_pairs(self.iter().filter(|(n, _)| set.contains(*n)))
    }

    /// Drops every coefficient with modulus at most `threshold`.
    pub fn truncate(&self, threshold: f64) -> Self {
        Self::from_pairs(self.iter().filter(|(_, v)| v.norm() > threshold))
    }

    /// Evaluates `Σ F̂(n) e^{inθ}`.
    pub fn eval(&self, theta: f64) -> Complex64 {
        self.iter()
            .map(|(n, v)| v * Complex64::from_polar(1.0, n as f64 * theta))
            .sum()
    }

    fn prune(&mut self) {
        self.entries.retain(|_, v| v.norm() >= PRUNE_EPS);
    }
}

impl FromIterator<(i64, Complex64)> for CoefficientSequence {
    fn from_iter<I: IntoIterator<Item = (i64, Complex64)>>(iter: I) -> Self {
        Self::from_pairs(iter)
    }
}

/// Integer order `j` with `p = 2j/(2j−1)` and conjugate `p′ = 2j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentPair {
    j: u32,
}

impl ExponentPair {
    /// Admits any `j >= 1`; `j = 1` is the self-dual case `p = p′ = 2`.
    pub fn new(j: u32) -> Result<Self> {
        if j == 0 {
            return Err(MajorantError::InvalidOrder { j, min: 1 });
        }
        Ok(Self { j })
    }

    /// Special exponents only (`j >= 2`), as needed by the majorant solvers.
    pub fn special(j: u32) -> Result<Self> {
        if j < 2 {
            return Err(MajorantError::InvalidOrder { j, min: 2 });
        }
        Ok(Self { j })
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    pub fn p(&self) -> f64 {
        let two_j = 2.0 * self.j as f64;
        two_j / (two_j - 1.0)
    }

    pub fn p_conj(&self) -> u32 {
        2 * self.j
    }
}

/// Grid policy for the periodic trapezoid rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    /// Points on `[−π, π)` before any doubling. Raised automatically to
    /// `4·span + 4` when the integrand needs more.
    pub base_grid: usize,
    pub max_refinements: u32,
    pub rel_tol: f64,
    /// Fixed grid used inside optimization loops, where the objective must
    /// stay the same function between iterations. Raised to resolve the
    /// integrand at the optimum; larger grids only add nodes close to the
    /// zeros of the minimizer.
    pub solver_grid: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            base_grid: 64,
            max_refinements: 16,
            rel_tol: 1e-9,
            solver_grid: 256,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(MajorantError::InvalidConfig("rel_tol must be > 0".into()));
        }
        if self.base_grid == 0 || self.solver_grid == 0 {
            return Err(MajorantError::InvalidConfig(
                "grid sizes must be > 0".into(),
            ));
        }
        Ok(())
    }

    /// Starting grid for an integrand whose frequencies span `span`.
    pub fn start_grid(&self, span: i64) -> usize {
        self.base_grid.max(min_grid_for_span(span))
    }

    /// Fixed grid for optimization loops over polynomials spanning `span`.
    pub fn fixed_grid(&self, span: i64) -> usize {
        self.solver_grid
            .max(min_grid_for_span(span))
            .next_power_of_two()
    }
}

fn min_grid_for_span(span: i64) -> usize {
    4 * span.max(0) as usize + 4
}

/// Uniform periodic grid `θ_k = −π + 2π(k + shift)/N` with a table of the
/// roots of unity, so that `e^{inθ_k}` is an exact table lookup times a
/// per-frequency phase.
pub struct PeriodicGrid {
    n: usize,
    shift: f64,
    roots: Vec<Complex64>,
}

impl PeriodicGrid {
    pub fn new(n: usize) -> Self {
        Self::with_shift(n, 0.0)
    }

    /// Grid offset by `shift` cells; `shift = 0.5` gives the midpoints.
    pub fn with_shift(n: usize, shift: f64) -> Self {
        assert!(n > 0, "grid needs at least one point");
        let step = 2.0 * PI / n as f64;
        let roots = (0..n)
            .map(|k| Complex64::from_polar(1.0, step * k as f64))
            .collect();
        Self { n, shift, roots }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn theta(&self, k: usize) -> f64 {
        -PI + 2.0 * PI * (k as f64 + self.shift) / self.n as f64
    }

    fn phase(&self, freq: i64) -> Complex64 {
        // e^{in(−π + 2π·shift/N)}, with e^{−inπ} = ±1 exactly
        let sign = if freq.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let offset = 2.0 * PI * self.shift / self.n as f64;
        Complex64::from_polar(sign, freq as f64 * offset)
    }

    /// `e^{i·freq·θ_k}` for all k, via the root table.
    fn exponential(&self, freq: i64) -> impl Iterator<Item = Complex64> + '_ {
        let ph = self.phase(freq);
        let step = freq.rem_euclid(self.n as i64) as usize;
        (0..self.n).map(move |k| ph * self.roots[(step * k) % self.n])
    }

    /// Values of the polynomial at every grid point.
    pub fn evaluate(&self, seq: &CoefficientSequence) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.n];
        for (freq, c) in seq.iter() {
            for (slot, e) in out.iter_mut().zip(self.exponential(freq)) {
                *slot += c * e;
            }
        }
        out
    }

    /// Raw trapezoid sum `Σ_k v_k e^{−imθ_k}` (not divided by N).
    pub fn coefficient_sum(&self, values: &[Complex64], m: i64) -> Complex64 {
        values
            .iter()
            .zip(self.exponential(m))
            .map(|(v, e)| v * e.conj())
            .sum()
    }

    /// Trapezoid estimate of the `m`-th Fourier coefficient of the samples.
    pub fn coefficient(&self, values: &[Complex64], m: i64) -> Complex64 {
        self.coefficient_sum(values, m) / self.n as f64
    }
}

/// Discrete convolution `(a ⊛ b)(n) = Σ_m a(m) b(n − m)`.
pub fn convolve(a: &CoefficientSequence, b: &CoefficientSequence) -> CoefficientSequence {
    let mut acc: BTreeMap<i64, Complex64> = BTreeMap::new();
    for (m, x) in a.iter() {
        for (k, y) in b.iter() {
            *acc.entry(m + k).or_default() += x * y;
        }
    }
    CoefficientSequence::from_pairs(acc)
}

/// Coefficients of `conj(F(θ))`: `n ↦ conj(F̂(−n))`.
pub fn reflect_conjugate(a: &CoefficientSequence) -> CoefficientSequence {
    CoefficientSequence::from_pairs(a.iter().map(|(n, v)| (-n, v.conj())))
}

/// `j`-fold convolution power `a ⊛ … ⊛ a`.
pub fn convolution_power(a: &CoefficientSequence, j: u32) -> Result<CoefficientSequence> {
    if j == 0 {
        return Err(MajorantError::InvalidOrder { j, min: 1 });
    }
    let mut out = a.clone();
    for _ in 1..j {
        out = convolve(&out, a);
    }
    Ok(out)
}

/// Coefficients of `Ḡ^{j−1} G^j`.
pub fn power_product(g: &CoefficientSequence, j: u32) -> Result<CoefficientSequence> {
    let mut out = convolution_power(g, j)?;
    let reflected = reflect_conjugate(g);
    for _ in 1..j {
        out = convolve(&out, &reflected);
    }
    Ok(out)
}

/// Coefficients `|F̂(n)|` of the exact majorant.
pub fn exact_majorant(a: &CoefficientSequence) -> CoefficientSequence {
    CoefficientSequence::from_real(a.iter().map(|(n, v)| (n, v.norm())))
}

/// Exact `‖g‖_{2j}` through Parseval: `(Σ |ĝ^{⊛j}(n)|²)^{1/(2j)}`.
pub fn norm_even(g: &CoefficientSequence, j: u32) -> Result<f64> {
    let gj = convolution_power(g, j)?;
    let sum_sq: f64 = gj.iter().map(|(_, v)| v.norm_sqr()).sum();
    Ok(sum_sq.powf(1.0 / (2.0 * j as f64)))
}

/// Result of an adaptive quadrature together with its convergence state.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadEstimate<T> {
    pub value: T,
    /// Size of the finest grid used.
    pub grid: usize,
    /// Last relative change between successive grids.
    pub change: f64,
    pub converged: bool,
}

/// Mean of `|F|^p` over a fixed grid.
pub fn mean_abs_pow_on_grid(f: &CoefficientSequence, p: f64, grid: &PeriodicGrid) -> f64 {
    let sum: f64 = grid.evaluate(f).iter().map(|v| v.norm().powf(p)).sum();
    sum / grid.len() as f64
}

/// `‖F‖_p` on a fixed grid of `n` points, no refinement.
pub fn norm_p_on_grid(f: &CoefficientSequence, p: f64, n: usize) -> f64 {
    mean_abs_pow_on_grid(f, p, &PeriodicGrid::new(n)).powf(1.0 / p)
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(MajorantError::InvalidExponent { p });
    }
    Ok(())
}

/// Trapezoid estimate of `‖F‖_p` with grid doubling, reporting the
/// convergence flag instead of failing.
///
/// Each doubling reuses the previous sum and only evaluates the midpoints.
/// Convergence is algebraic rather than spectral when `F` has zeros on the
/// circle and `p` is not an even integer.
pub fn norm_p_estimate(
    f: &CoefficientSequence,
    p: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadEstimate<f64>> {
    check_p(p)?;
    cfg.validate()?;
    if f.is_empty() {
        return Ok(QuadEstimate {
            value: 0.0,
            grid: 0,
            change: 0.0,
            converged: true,
        });
    }
    let mut n = cfg.start_grid(f.span());
    let abs_pow_sum =
        |grid: &PeriodicGrid| -> f64 { grid.evaluate(f).iter().map(|v| v.norm().powf(p)).sum() };
    let mut sum = abs_pow_sum(&PeriodicGrid::new(n));
    let mut value = (sum / n as f64).powf(1.0 / p);
    let mut change = f64::INFINITY;
    for _ in 0..cfg.max_refinements {
        sum += abs_pow_sum(&PeriodicGrid::with_shift(n, 0.5));
        n *= 2;
        let next = (sum / n as f64).powf(1.0 / p);
        change = if next == 0.0 {
            0.0
        } else {
            (next - value).abs() / next
        };
        value = next;
        if change < cfg.rel_tol {
            return Ok(QuadEstimate {
                value,
                grid: n,
                change,
                converged: true,
            });
        }
    }
    Ok(QuadEstimate {
        value,
        grid: n,
        change,
        converged: false,
    })
}

/// `((1/2π)∫|F|^p dθ)^{1/p}` by the periodic trapezoid rule.
pub fn norm_p(f: &CoefficientSequence, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let est = norm_p_estimate(f, p, cfg)?;
    if est.converged {
        Ok(est.value)
    } else {
        Err(MajorantError::NonConvergence {
            grid: est.grid,
            change: est.change,
            estimate: est.value,
        })
    }
}

/// Samples of `|F|^{p−1} sgn(F) = F·|F|^{p−2}` (zero where `F` vanishes).
pub fn dual_function_samples(values: &[Complex64], p: f64) -> Vec<Complex64> {
    values
        .iter()
        .map(|&v| {
            let r = v.norm();
            if r == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                v * r.powf(p - 2.0)
            }
        })
        .collect()
}

/// Coefficients of `|F|^{p−1} sgn(F)` at the frequencies of `window`, on
/// a fixed grid of `n` points.
pub fn dual_function_on_grid(
    f: &CoefficientSequence,
    p: f64,
    window: &FrequencySet,
    grid: &PeriodicGrid,
) -> CoefficientSequence {
    let samples = dual_function_samples(&grid.evaluate(f), p);
    window
        .iter()
        .map(|m| (m, grid.coefficient(&samples, m)))
        .collect()
}

/// Adaptive version of [`dual_function_coeffs`] reporting its convergence.
pub fn dual_function_estimate(
    f: &CoefficientSequence,
    p: f64,
    window: &FrequencySet,
    cfg: &QuadratureConfig,
) -> Result<QuadEstimate<CoefficientSequence>> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(MajorantError::InvalidExponent { p });
    }
    cfg.validate()?;
    let freqs: Vec<i64> = window.iter().collect();
    if f.is_empty() || freqs.is_empty() {
        return Ok(QuadEstimate {
            value: CoefficientSequence::new(),
            grid: 0,
            change: 0.0,
            converged: true,
        });
    }
    let lo = f.min_frequency().unwrap().min(freqs[0]);
    let hi = f.max_frequency().unwrap().max(*freqs.last().unwrap());
    let mut n = cfg.start_grid(hi - lo);

    let partial_sums = |grid: &PeriodicGrid| -> Vec<Complex64> {
        let samples = dual_function_samples(&grid.evaluate(f), p);
        freqs
            .iter()
            .map(|&m| grid.coefficient_sum(&samples, m))
            .collect()
    };
    let mut sums = partial_sums(&PeriodicGrid::new(n));
    let mut current: Vec<Complex64> = sums.iter().map(|s| s / n as f64).collect();
    let mut change = f64::INFINITY;
    let mut converged = false;
    for _ in 0..cfg.max_refinements {
        for (s, t) in sums
            .iter_mut()
            .zip(partial_sums(&PeriodicGrid::with_shift(n, 0.5)))
        {
            *s += t;
        }
        n *= 2;
        let next: Vec<Complex64> = sums.iter().map(|s| s / n as f64).collect();
        let scale = next.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let diff = next
            .iter()
            .zip(&current)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        change = if scale == 0.0 { 0.0 } else { diff / scale };
        current = next;
        if change < cfg.rel_tol {
            converged = true;
            break;
        }
    }
    Ok(QuadEstimate {
        value: freqs.into_iter().zip(current).collect(),
        grid: n,
        change,
        converged,
    })
}

/// Coefficients of `G = |F|^{p−1} sgn(F)` restricted to `window`.
pub fn dual_function_coeffs(
    f: &CoefficientSequence,
    p: f64,
    window: &FrequencySet,
    cfg: &QuadratureConfig,
) -> Result<CoefficientSequence> {
    let est = dual_function_estimate(f, p, window, cfg)?;
    if est.converged {
        Ok(est.value)
    } else {
        Err(MajorantError::NonConvergence {
            grid: est.grid,
            change: est.change,
            estimate: est.value.max_abs(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real(pairs: &[(i64, f64)]) -> CoefficientSequence {
        CoefficientSequence::from_real(pairs.iter().copied())
    }

    #[test]
    fn convolve_binomial() {
        let a = real(&[(0, 1.0), (1, 1.0)]);
        assert_eq!(convolve(&a, &a), real(&[(0, 1.0), (1, 2.0), (2, 1.0)]));
    }

    #[test]
    fn convolve_with_empty_is_empty() {
        let a = CoefficientSequence::monomial(5, c(2.0, -1.0));
        assert!(convolve(&a, &CoefficientSequence::new()).is_empty());
    }

    #[test]
    fn convolve_difference_with_square() {
        let a = real(&[(0, 1.0), (1, -1.0)]);
        let b = real(&[(0, 1.0), (1, 2.0), (2, 1.0)]);
        assert_eq!(
            convolve(&a, &b),
            real(&[(0, 1.0), (1, 1.0), (2, -1.0), (3, -1.0)])
        );
    }

    #[test]
    fn cancellation_is_pruned() {
        // (1 + z)(1 − z) = 1 − z², the z term cancels exactly
        let a = real(&[(0, 1.0), (1, 1.0)]);
        let b = real(&[(0, 1.0), (1, -1.0)]);
        let prod = convolve(&a, &b);
        assert_eq!(prod.len(), 2);
        assert_eq!(prod.get(1), c(0.0, 0.0));
    }

    #[test]
    fn reflect_examples() {
        let a = CoefficientSequence::monomial(1, c(0.0, 1.0));
        assert_eq!(
            reflect_conjugate(&a),
            CoefficientSequence::monomial(-1, c(0.0, -1.0))
        );
        let b = real(&[(0, 3.0)]);
        assert_eq!(reflect_conjugate(&b), b);
        let d = CoefficientSequence::from_pairs([(2, c(1.0, 2.0)), (-3, c(0.5, -4.0))]);
        assert_eq!(reflect_conjugate(&reflect_conjugate(&d)), d);
    }

    #[test]
    fn power_product_constants_and_monomials() {
        let t = c(0.5, 1.5);
        let g = CoefficientSequence::monomial(0, t);
        let pp = power_product(&g, 2).unwrap();
        assert!((pp.get(0) - t * t.norm_sqr()).norm() < 1e-15);

        for j in 1..5 {
            let g = CoefficientSequence::monomial(3, c(1.3, 0.0));
            let pp = power_product(&g, j).unwrap();
            assert_eq!(pp.len(), 1);
            assert!((pp.re(3) - 1.3f64.powi(2 * j as i32 - 1)).abs() < 1e-12);
        }
    }

    #[test]
    fn power_product_one_plus_z() {
        let g = real(&[(0, 1.0), (1, 1.0)]);
        assert_eq!(
            power_product(&g, 2).unwrap(),
            real(&[(-1, 1.0), (0, 3.0), (1, 3.0), (2, 1.0)])
        );
        assert_eq!(power_product(&g, 1).unwrap(), g);
    }

    #[test]
    fn power_product_rejects_zero_order() {
        let g = real(&[(0, 1.0)]);
        assert!(matches!(
            power_product(&g, 0),
            Err(MajorantError::InvalidOrder { j: 0, .. })
        ));
        assert!(norm_even(&g, 0).is_err());
    }

    #[test]
    fn exact_majorant_examples() {
        assert_eq!(
            exact_majorant(&real(&[(0, 1.0), (1, -1.0)])),
            real(&[(0, 1.0), (1, 1.0)])
        );
        assert_eq!(
            exact_majorant(&CoefficientSequence::monomial(2, c(0.0, 3.0))),
            real(&[(2, 3.0)])
        );
        let nonneg = real(&[(0, 2.0), (4, 0.5)]);
        assert_eq!(exact_majorant(&nonneg), nonneg);
    }

    #[test]
    fn norm_even_examples() {
        for j in 1..5 {
            let g = CoefficientSequence::monomial(-7, c(0.6, 0.8));
            assert!((norm_even(&g, j).unwrap() - 1.0).abs() < 1e-15);
        }
        let g = real(&[(0, 1.0), (1, 1.0)]);
        assert!((norm_even(&g, 2).unwrap() - 6f64.powf(0.25)).abs() < 1e-14);
        let k = CoefficientSequence::monomial(0, c(-2.0, 1.5));
        assert!((norm_even(&k, 3).unwrap() - 2.5).abs() < 1e-14);
    }

    #[test]
    fn exponent_pair_relations() {
        for j in 1..8 {
            let e = ExponentPair::new(j).unwrap();
            let (p, q) = (e.p(), e.p_conj() as f64);
            assert!((p * q - (p + q)).abs() < 1e-12);
            assert_eq!(e.p_conj() % 2, 0);
        }
        assert!(ExponentPair::new(0).is_err());
        assert!(ExponentPair::special(1).is_err());
        assert_eq!(ExponentPair::new(1).unwrap().p(), 2.0);
    }

    #[test]
    fn norm_p_constant_and_parseval() {
        let cfg = QuadratureConfig::default();
        let k = CoefficientSequence::monomial(0, c(3.0, -4.0));
        for p in [1.0, 4.0 / 3.0, 2.0, 3.5] {
            assert!((norm_p(&k, p, &cfg).unwrap() - 5.0).abs() < 1e-12);
        }
        let g = real(&[(0, 1.0), (1, 1.0)]);
        let v = norm_p(&g, 4.0, &cfg).unwrap();
        assert!((v - 6f64.powf(0.25)).abs() < 1e-12);
    }

    #[test]
    fn norm_p_rejects_bad_exponent() {
        let g = real(&[(0, 1.0)]);
        let cfg = QuadratureConfig::default();
        assert!(norm_p(&g, 0.5, &cfg).is_err());
        assert!(norm_p(&g, f64::NAN, &cfg).is_err());
    }

    #[test]
    fn norm_p_reports_nonconvergence() {
        let g = real(&[(0, 1.0), (1, 1.0)]);
        let cfg = QuadratureConfig {
            max_refinements: 1,
            rel_tol: 1e-14,
            ..Default::default()
        };
        match norm_p(&g, 4.0 / 3.0, &cfg) {
            Err(MajorantError::NonConvergence { estimate, .. }) => {
                assert!((estimate - 1.329).abs() < 1e-2)
            }
            other => panic!("expected NonConvergence, got {other:?}"),
        }
    }

    #[test]
    fn dual_function_constant_and_unimodular() {
        let cfg = QuadratureConfig::default();
        let p = 4.0 / 3.0;
        let f = real(&[(0, 2.0)]);
        let g = dual_function_coeffs(&f, p, &FrequencySet::from_iter([0]), &cfg).unwrap();
        assert!((g.re(0) - 2f64.powf(p - 1.0)).abs() < 1e-13);

        let f = real(&[(4, 1.0)]);
        let g = dual_function_coeffs(&f, p, &FrequencySet::from_iter([4]), &cfg).unwrap();
        assert!((g.get(4) - c(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn dual_function_recovers_cube_root_factor() {
        let cfg = QuadratureConfig::default();
        let f = real(&[(-1, 1.0), (0, 3.0), (1, 3.0), (2, 1.0)]);
        let window = FrequencySet::from_iter(-2..=3);
        let h = dual_function_coeffs(&f, 4.0 / 3.0, &window, &cfg).unwrap();
        assert!((h.get(0) - c(1.0, 0.0)).norm() < 1e-9);
        assert!((h.get(1) - c(1.0, 0.0)).norm() < 1e-9);
        for m in [-2, -1, 2, 3] {
            assert!(h.get(m).norm() < 1e-9, "coefficient {m} = {}", h.get(m));
        }
    }

    #[test]
    fn grid_coefficients_invert_evaluation() {
        let f = CoefficientSequence::from_pairs([
            (-3, c(1.0, 2.0)),
            (0, c(0.5, 0.0)),
            (5, c(-1.0, 0.25)),
        ]);
        for shift in [0.0, 0.5] {
            let grid = PeriodicGrid::with_shift(32, shift);
            let vals = grid.evaluate(&f);
            for k in [0, 7, 31] {
                assert!((vals[k] - f.eval(grid.theta(k))).norm() < 1e-13);
            }
            for m in -6..=6 {
                assert!((grid.coefficient(&vals, m) - f.get(m)).norm() < 1e-13);
            }
        }
    }
}
