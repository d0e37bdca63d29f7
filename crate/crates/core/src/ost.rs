//! Noisy sparse recovery by one-step thresholding, the guarantee checks
//! that go with it, and an empirical weak-isometry tester.
//!
//! Noise is circular complex Gaussian: real and imaginary parts are
//! independent `N(0, σ²/2)`, so `E|e_i|² = σ²`. Logarithms are natural.

use std::collections::BTreeSet;
use std::f64::consts::{SQRT_2, TAU};

use num_complex::Complex64;
use rand::seq::{index, SliceRandom};

use crate::error::{FrameError, Result};
use crate::frame::{Frame, ScalarField};
use crate::linalg::{least_squares, Matrix};
use crate::rng::{self, Normal};

/// `c₁ = 37e`.
pub fn c1() -> f64 {
    37.0 * std::f64::consts::E
}

/// `c₂ = 2 / (1 − e^(−1/2))`.
pub fn c2() -> f64 {
    2.0 / (1.0 - (-0.5f64).exp())
}

/// `c₃ = 1 + e^(−1/2) / (1 − e^(−1/2))`.
pub fn c3() -> f64 {
    let q = (-0.5f64).exp();
    1.0 + q / (1.0 - q)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal {
    values: Vec<Complex64>,
    support: Vec<usize>,
}

impl SparseSignal {
    /// Builds a signal from a dense vector; the support is its nonzero set.
    pub fn from_dense(values: Vec<Complex64>) -> Self {
        let support = values
            .iter()
            .enumerate()
            .filter(|(_, z)| **z != Complex64::new(0.0, 0.0))
            .map(|(i, _)| i)
            .collect();
        SparseSignal { values, support }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    /// Ascending indices of the nonzero entries.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Magnitudes given to the `K` nonzero entries; phases are random.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AmplitudeLaw {
    /// Every nonzero entry has modulus `alpha`.
    Flat { alpha: f64 },
    /// `⌈K/2⌉` entries at `high`, the rest at `low`.
    TwoTier { high: f64, low: f64 },
}

impl AmplitudeLaw {
    fn magnitude(&self, rank: usize, k: usize) -> f64 {
        match *self {
            AmplitudeLaw::Flat { alpha } => alpha,
            AmplitudeLaw::TwoTier { high, low } => {
                if rank < k.div_ceil(2) {
                    high
                } else {
                    low
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub sigma2: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(sigma2: f64, seed: u64) -> Result<Self> {
        if !(sigma2 >= 0.0) || !sigma2.is_finite() {
            return Err(FrameError::invalid("sigma2", "must be a finite nonnegative number"));
        }
        Ok(NoiseModel { sigma2, seed })
    }

    pub fn sample(&self, len: usize) -> Vec<Complex64> {
        let mut normal = Normal::new(rng::stream(self.seed, 0));
        let s = (self.sigma2 / 2.0).sqrt();
        (0..len)
            .map(|_| Complex64::new(s * normal.sample(), s * normal.sample()))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub signal: SparseSignal,
    pub measurement: Vec<Complex64>,
    pub noise: Vec<Complex64>,
}

/// `‖x‖² / E‖e‖² = ‖x‖² / (M σ²)`.
pub fn snr(signal: &SparseSignal, rows: usize, sigma2: f64) -> f64 {
    let e = signal.norm().powi(2);
    e / (rows as f64 * sigma2)
}

/// Draws a uniformly random `K`-subset support with the given magnitudes,
/// then `y = F x + e`. Phases are random signs for real frames and uniform
/// on the circle for complex ones.
pub fn generate_problem(
    frame: &Frame,
    k: usize,
    law: AmplitudeLaw,
    noise: &NoiseModel,
    seed: u64,
) -> Result<Problem> {
    let n = frame.cols();
    if k > n {
        return Err(FrameError::invalid("K", format!("{k} exceeds N = {n}")));
    }
    let mut rng = rng::stream(seed, 0);
    let mut support = index::sample(&mut rng, n, k).into_vec();
    support.sort_unstable();
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    for (rank, &i) in support.iter().enumerate() {
        let mag = law.magnitude(rank, k);
        values[i] = match frame.field() {
            ScalarField::Real => {
                if rng::uniform(&mut rng) < 0.5 {
                    Complex64::new(mag, 0.0)
                } else {
                    Complex64::new(-mag, 0.0)
                }
            }
            ScalarField::Complex => Complex64::from_polar(mag, TAU * rng::uniform(&mut rng)),
        };
    }
    let signal = SparseSignal {
        values,
        support,
    };
    let e = noise.sample(frame.rows());
    let mut y = frame.apply(signal.values())?;
    for (yi, ei) in y.iter_mut().zip(&e) {
        *yi += ei;
    }
    Ok(Problem {
        signal,
        measurement: y,
        noise: e,
    })
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t < 1.0 {
        Ok(())
    } else {
        Err(FrameError::invalid("t", format!("must lie in (0, 1), got {t}")))
    }
}

/// Inputs to the recovery threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdParams {
    pub mu: f64,
    pub rows: usize,
    pub snr: f64,
    pub sigma2: f64,
    pub cols: usize,
    pub t: f64,
}

/// `λ = √(2σ² ln N) · max{(10/t) μ √(M·snr), √2/(1−t)}`.
pub fn ost_threshold(p: &ThresholdParams) -> Result<f64> {
    check_t(p.t)?;
    if !(p.sigma2 > 0.0) {
        return Err(FrameError::invalid("sigma2", "must be positive"));
    }
    if !(p.snr >= 0.0) {
        return Err(FrameError::invalid("snr", "must be nonnegative"));
    }
    let interference = 10.0 / p.t * p.mu * (p.rows as f64 * p.snr).sqrt();
    let noise = SQRT_2 / (1.0 - p.t);
    Ok((2.0 * p.sigma2 * (p.cols as f64).ln()).sqrt() * interference.max(noise))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult {
    /// Ascending indices with proxy magnitude above the threshold.
    pub support_estimate: Vec<usize>,
    pub signal_estimate: Vec<Complex64>,
    pub lambda: f64,
    /// The selected columns were numerically rank deficient; the estimate
    /// is the minimum-norm least-squares solution.
    pub rank_deficient: bool,
}

/// One-step thresholding: `z = Fᴴy`, keep `{n : |z_n| > λ}`, then least
/// squares on the kept columns.
pub fn ost_recover(frame: &Frame, y: &[Complex64], lambda: f64) -> Result<RecoveryResult> {
    if !(lambda > 0.0) {
        return Err(FrameError::invalid("lambda", "must be positive"));
    }
    let proxy = frame.adjoint_apply(y)?;
    let support: Vec<usize> = proxy
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > lambda)
        .map(|(i, _)| i)
        .collect();
    let mut estimate = vec![Complex64::new(0.0, 0.0); frame.cols()];
    let mut rank_deficient = false;
    if !support.is_empty() {
        let sub = frame.select_columns(&support)?;
        let a = Matrix::from_columns(frame.rows(), support.len(), sub.to_complex_data());
        let ls = least_squares(&a, y);
        if ls.rank_deficient() {
            rank_deficient = true;
            log::warn!(
                "ost: {} selected columns have numerical rank {}; using minimum-norm solution",
                support.len(),
                ls.rank
            );
        }
        for (&i, v) in support.iter().zip(ls.solution) {
            estimate[i] = v;
        }
    }
    Ok(RecoveryResult {
        support_estimate: support,
        signal_estimate: estimate,
        lambda,
        rank_deficient,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FloorSets {
    /// Entries above the noise floor.
    pub noise: Vec<usize>,
    /// Entries above the self-interference floor.
    pub interference: Vec<usize>,
}

impl FloorSets {
    pub fn intersection(&self) -> Vec<usize> {
        let b: BTreeSet<_> = self.interference.iter().collect();
        self.noise.iter().filter(|i| b.contains(i)).copied().collect()
    }
}

/// `(2√2/(1−t)) √(2σ² ln N)`.
pub fn noise_floor(sigma2: f64, n: usize, t: f64) -> f64 {
    2.0 * SQRT_2 / (1.0 - t) * (2.0 * sigma2 * (n as f64).ln()).sqrt()
}

/// `(20/t) μ ‖x‖ √(2 ln N)`.
pub fn interference_floor(mu: f64, signal_norm: f64, n: usize, t: f64) -> f64 {
    20.0 / t * mu * signal_norm * (2.0 * (n as f64).ln()).sqrt()
}

pub fn floor_sets(x: &SparseSignal, sigma2: f64, mu: f64, t: f64) -> Result<FloorSets> {
    check_t(t)?;
    let n = x.len();
    let nf = noise_floor(sigma2, n, t);
    let inf = interference_floor(mu, x.norm(), n, t);
    let above = |thr: f64| {
        x.values()
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > thr)
            .map(|(i, _)| i)
            .collect()
    };
    Ok(FloorSets {
        noise: above(nf),
        interference: above(inf),
    })
}

/// Frame-level quantities the recovery guarantee refers to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryContext {
    pub sigma2: f64,
    pub mu: f64,
    pub spectral_norm: f64,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RspReport {
    pub l2_error: f64,
    pub floors: FloorSets,
    /// `c₂ √(σ² |K̂| ln N) + c₃ ‖x_{K∖K̂}‖`.
    pub bound_rhs: f64,
    /// `c₂ √(σ² K ln N) + c₃ ‖x − x_T‖`, with `x_T` the best `T`-term
    /// approximation and `T = |T_σ ∩ T_μ|`.
    pub bound_rhs_t: f64,
    /// `T_σ ∩ T_μ ⊆ K̂ ⊆ K`.
    pub support_ok: bool,
    pub error_bound_ok: bool,
    pub error_bound_t_ok: bool,
    /// `K ≤ N / (c₁² ‖F‖₂² ln N)`.
    pub sparsity_regime_ok: bool,
}

impl RspReport {
    /// Support containment together with the main error bound.
    pub fn joint_ok(&self) -> bool {
        self.support_ok && self.error_bound_ok
    }
}

/// `K ≤ N / (c₁² ‖F‖₂² ln N)`.
pub fn sparsity_limit(n: usize, spectral_norm: f64) -> f64 {
    n as f64 / (c1().powi(2) * spectral_norm.powi(2) * (n as f64).ln())
}

pub fn check_rsp_bounds(
    result: &RecoveryResult,
    x: &SparseSignal,
    ctx: &RecoveryContext,
) -> Result<RspReport> {
    let n = x.len();
    if result.signal_estimate.len() != n {
        return Err(FrameError::DimensionMismatch {
            expected: n,
            actual: result.signal_estimate.len(),
        });
    }
    let ln_n = (n as f64).ln();
    let floors = floor_sets(x, ctx.sigma2, ctx.mu, ctx.t)?;
    let l2_error = x
        .values()
        .iter()
        .zip(&result.signal_estimate)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();

    let chosen: BTreeSet<usize> = result.support_estimate.iter().copied().collect();
    let truth: BTreeSet<usize> = x.support().iter().copied().collect();
    let core = floors.intersection();
    let support_ok = core.iter().all(|i| chosen.contains(i)) && chosen.is_subset(&truth);

    let missed = x
        .support()
        .iter()
        .filter(|i| !chosen.contains(i))
        .map(|&i| x.values()[i].norm_sqr())
        .sum::<f64>()
        .sqrt();
    let bound_rhs = c2() * (ctx.sigma2 * chosen.len() as f64 * ln_n).sqrt() + c3() * missed;

    let mut mags: Vec<f64> = x.values().iter().map(|z| z.norm_sqr()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    let tail = mags[core.len().min(mags.len())..].iter().sum::<f64>().sqrt();
    let bound_rhs_t =
        c2() * (ctx.sigma2 * x.sparsity() as f64 * ln_n).sqrt() + c3() * tail;

    Ok(RspReport {
        l2_error,
        bound_rhs,
        bound_rhs_t,
        support_ok,
        error_bound_ok: l2_error <= bound_rhs,
        error_bound_t_ok: l2_error <= bound_rhs_t,
        sparsity_regime_ok: x.sparsity() as f64 <= sparsity_limit(n, ctx.spectral_norm),
        floors,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakRipEstimate {
    pub trials: usize,
    pub violations: usize,
}

impl WeakRipEstimate {
    pub fn rate(&self) -> f64 {
        self.violations as f64 / self.trials as f64
    }
}

/// Conditions under which the weak isometry holds with failure probability
/// `4K/N²`: SCP, `N ≥ 128` and `2K ln N ≤ min{δ²/(100μ²), M}`.
pub fn weak_rip_hypotheses(rows: usize, cols: usize, k: usize, delta: f64, mu: f64) -> bool {
    let lhs = 2.0 * k as f64 * (cols as f64).ln();
    let coherence_cap = if mu == 0.0 {
        f64::INFINITY
    } else {
        delta * delta / (100.0 * mu * mu)
    };
    cols >= 128 && lhs <= coherence_cap.min(rows as f64)
}

/// Fraction of uniformly random permutations `y` of `x` that violate
/// `(1−δ)‖y‖² ≤ ‖Fy‖² ≤ (1+δ)‖y‖²`.
pub fn weak_rip_estimate(
    frame: &Frame,
    x: &SparseSignal,
    delta: f64,
    trials: usize,
    seed: u64,
) -> Result<WeakRipEstimate> {
    if trials == 0 {
        return Err(FrameError::invalid("trials", "must be at least 1"));
    }
    if x.len() != frame.cols() {
        return Err(FrameError::DimensionMismatch {
            expected: frame.cols(),
            actual: x.len(),
        });
    }
    let n = frame.cols();
    let m = frame.rows();
    let energy: f64 = x.values().iter().map(|z| z.norm_sqr()).sum();
    let nonzero: Vec<Complex64> = x.support().iter().map(|&i| x.values()[i]).collect();
    let mut rng = rng::stream(seed, 0);
    let mut violations = 0;
    let mut fy = vec![Complex64::new(0.0, 0.0); m];
    for _ in 0..trials {
        // Where the nonzero entries land under a uniform permutation.
        let mut slots = index::sample(&mut rng, n, nonzero.len()).into_vec();
        slots.shuffle(&mut rng);
        fy.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        for (&slot, &v) in slots.iter().zip(&nonzero) {
            for (r, acc) in fy.iter_mut().enumerate() {
                *acc += frame.get(r, slot) * v;
            }
        }
        let e: f64 = fy.iter().map(|z| z.norm_sqr()).sum();
        if e < (1.0 - delta) * energy || e > (1.0 + delta) * energy {
            violations += 1;
        }
    }
    Ok(WeakRipEstimate { trials, violations })
}

/// Real-valued flat test signal with random signs at uniformly random positions.
pub fn random_flat_signal(n: usize, k: usize, alpha: f64, seed: u64) -> Result<SparseSignal> {
    if k > n {
        return Err(FrameError::invalid("K", format!("{k} exceeds N = {n}")));
    }
    let mut rng = rng::stream(seed, 0);
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    for i in index::sample(&mut rng, n, k) {
        let s = if rng::uniform(&mut rng) < 0.5 { 1.0 } else { -1.0 };
        values[i] = Complex64::new(s * alpha, 0.0);
    }
    Ok(SparseSignal::from_dense(values))
}
