//! Normalized Gaussian, random harmonic and GF(2^m) code-based frames.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{FrameError, Result};
use crate::frame::Frame;
use crate::gf2m::Gf2m;
use crate::rng::{self, Normal};
use crate::scalar::{dot_conj, norm_sqr};

/// Largest number of columns a code-based frame may have.
pub const CODE_FRAME_MAX_COLUMNS: u64 = 1 << 24;

const GAUSSIAN_DEGENERATE_NORM: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Normalized Gaussian frames

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GaussianFrameSpec {
    pub rows: usize,
    pub cols: usize,
    pub seed: u64,
}

/// High-probability upper bounds on the geometry of a normalized Gaussian frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBounds {
    pub mu: f64,
    pub nu: f64,
    pub spectral_norm: f64,
    /// `1 − 11/N`.
    pub probability: f64,
}

impl GaussianFrameSpec {
    pub fn new(rows: usize, cols: usize, seed: u64) -> Result<Self> {
        if rows < 1 {
            return Err(FrameError::invalid("M", "must be at least 1"));
        }
        if cols < 2 {
            return Err(FrameError::invalid("N", "must be at least 2"));
        }
        Ok(GaussianFrameSpec { rows, cols, seed })
    }

    /// Whether `60 ln N ≤ M ≤ (N − 1)/(4 ln N)`.
    pub fn in_guaranteed_regime(&self) -> bool {
        let (m, n) = (self.rows as f64, self.cols as f64);
        let ln = n.ln();
        60.0 * ln <= m && m <= (n - 1.0) / (4.0 * ln)
    }

    pub fn bounds(&self) -> GaussianBounds {
        let (m, n) = (self.rows as f64, self.cols as f64);
        let ln = n.ln();
        GaussianBounds {
            mu: (15.0 * ln).sqrt() / (m.sqrt() - (12.0 * ln).sqrt()),
            nu: (15.0 * ln).sqrt() / (m - (12.0 * m * ln).sqrt()),
            spectral_norm: (m.sqrt() + n.sqrt() + (2.0 * ln).sqrt())
                / (m - (8.0 * m * ln).sqrt()).sqrt(),
            probability: 1.0 - 11.0 / n,
        }
    }
}

/// I.i.d. standard normal entries, each column then scaled to unit norm.
/// Column `n` draws from its own ChaCha stream, so the result does not
/// depend on how columns are scheduled across threads.
pub fn build_gaussian(spec: &GaussianFrameSpec) -> Result<Frame> {
    let spec = GaussianFrameSpec::new(spec.rows, spec.cols, spec.seed)?;
    let m = spec.rows;
    let mut data = vec![0.0f64; m * spec.cols];
    data.par_chunks_mut(m).enumerate().for_each(|(n, col)| {
        let mut normal = Normal::new(rng::stream(spec.seed, n as u64));
        loop {
            for x in col.iter_mut() {
                *x = normal.sample();
            }
            if norm_sqr(col).sqrt() >= GAUSSIAN_DEGENERATE_NORM {
                break;
            }
            log::warn!("gaussian frame: column {n} had near-zero norm, resampled");
        }
    });
    Frame::from_real(m, spec.cols, data)
}

// ---------------------------------------------------------------------------
// Random harmonic frames

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HarmonicFrameSpec {
    /// DFT size.
    pub n: usize,
    /// Expected number of rows kept.
    pub m: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicFrame {
    pub frame: Frame,
    /// DFT row indices kept, ascending.
    pub selected_rows: Vec<usize>,
    /// How many times the row selection came back empty and was redrawn.
    pub resamples: u32,
}

impl HarmonicFrameSpec {
    pub fn new(n: usize, m: usize, seed: u64) -> Result<Self> {
        if n < 1 {
            return Err(FrameError::invalid("N", "must be at least 1"));
        }
        if m < 1 || m > n {
            return Err(FrameError::invalid("M", format!("must be in 1..={n}, got {m}")));
        }
        Ok(HarmonicFrameSpec { n, m, seed })
    }

    /// Whether `16 ln N ≤ M ≤ N/3`.
    pub fn in_guaranteed_regime(&self) -> bool {
        let (m, n) = (self.m as f64, self.n as f64);
        16.0 * n.ln() <= m && m <= n / 3.0
    }

    /// `√(118 (N − M) ln N / (M N))`.
    pub fn mu_bound(&self) -> f64 {
        let (m, n) = (self.m as f64, self.n as f64);
        (118.0 * (n - m) * n.ln() / (m * n)).sqrt()
    }

    /// `1 − 4/N − 1/N²`.
    pub fn probability(&self) -> f64 {
        let n = self.n as f64;
        1.0 - 4.0 / n - 1.0 / (n * n)
    }
}

fn select_rows(n: usize, p: f64, seed: u64) -> Vec<usize> {
    let mut rng = rng::stream(seed, 0);
    (0..n).filter(|_| rng::uniform(&mut rng) < p).collect()
}

/// Keeps each row of the `N × N` DFT independently with probability `M/N`
/// and normalizes the columns of what is left.
pub fn build_harmonic(spec: &HarmonicFrameSpec) -> Result<HarmonicFrame> {
    let spec = HarmonicFrameSpec::new(spec.n, spec.m, spec.seed)?;
    let n = spec.n;
    let p = spec.m as f64 / n as f64;
    let mut seed = spec.seed;
    let mut resamples = 0;
    let rows = loop {
        let rows = select_rows(n, p, seed);
        if !rows.is_empty() {
            break rows;
        }
        resamples += 1;
        seed = seed.wrapping_add(1);
        log::warn!("harmonic frame: empty row selection, redrawing with seed {seed}");
    };
    let k = rows.len();
    let amp = 1.0 / (k as f64).sqrt();
    let mut data = vec![Complex64::new(0.0, 0.0); k * n];
    data.par_chunks_mut(k).enumerate().for_each(|(l, col)| {
        for (entry, &row) in col.iter_mut().zip(&rows) {
            // Reduce k·ℓ mod N first so the phase is exact for large N.
            let phase = TAU * ((row * l) % n) as f64 / n as f64;
            *entry = Complex64::from_polar(amp, phase);
        }
    });
    Ok(HarmonicFrame {
        frame: Frame::from_complex(k, n, data)?,
        selected_rows: rows,
        resamples,
    })
}

// ---------------------------------------------------------------------------
// Code-based frames

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeFrameSpec {
    /// Field exponent: rows are indexed by GF(2^m).
    pub m: u32,
    /// Number of Gold-exponent terms.
    pub t: u32,
    /// Modulus override; `None` uses the built-in table.
    pub irreducible_poly: Option<u32>,
}

impl CodeFrameSpec {
    pub fn new(m: u32, t: u32) -> Self {
        CodeFrameSpec {
            m,
            t,
            irreducible_poly: None,
        }
    }

    pub fn field(&self) -> Result<Gf2m> {
        match self.irreducible_poly {
            Some(p) => Gf2m::with_polynomial(self.m, p),
            None => Gf2m::new(self.m),
        }
    }

    pub fn rows(&self) -> usize {
        1 << self.m
    }

    /// `2^((t+1)m)`, or `None` on overflow.
    pub fn column_count(&self) -> Option<u64> {
        let exp = (self.t as u64 + 1).checked_mul(self.m as u64)?;
        if exp >= 64 {
            None
        } else {
            Some(1u64 << exp)
        }
    }

    fn validate(&self) -> Result<(Gf2m, usize)> {
        if self.t < 1 {
            return Err(FrameError::invalid("t", "must be at least 1"));
        }
        let field = self.field()?;
        let cols = self.column_count().unwrap_or(u64::MAX);
        if cols > CODE_FRAME_MAX_COLUMNS {
            return Err(FrameError::GuardExceeded {
                what: "code-based frame columns",
                required: cols,
                allowed: CODE_FRAME_MAX_COLUMNS,
            });
        }
        Ok((field, cols as usize))
    }

    /// `‖F‖₂² = 2^(tm)`.
    pub fn tight_norm_sq(&self) -> f64 {
        2f64.powi((self.t * self.m) as i32)
    }

    /// `1/√(2^(m − 2t − 1))`.
    pub fn mu_bound(&self) -> f64 {
        2f64.powf(-(self.m as f64 - 2.0 * self.t as f64 - 1.0) / 2.0)
    }

    /// `μ/√(2^m)` for a given measured `μ`.
    pub fn nu_bound(&self, mu: f64) -> f64 {
        mu / (self.rows() as f64).sqrt()
    }
}

/// `F[x, α] = 2^(−m/2) · (−1)^Tr(α₀x + Σᵢ αᵢ x^(2^i + 1))`.
///
/// Column index `c` encodes `α` as `Σ αᵢ 2^(im)` (α₀ varies fastest).
pub fn build_code_frame(spec: &CodeFrameSpec) -> Result<Frame> {
    let (field, cols) = spec.validate()?;
    let m = spec.m;
    let q = field.order() as usize;
    let terms = spec.t as usize + 1;
    let digit_mask = (q - 1) as u64;

    // Tr(a·p) is linear in a: it equals the parity of a & mask(p), where
    // bit j of mask(p) is Tr(x^j · p).
    let trace_mask = |p: u32| -> u32 {
        (0..m).fold(0, |acc, j| acc | (field.trace(field.mul(1 << j, p)) << j))
    };
    // masks[x * terms + i] = mask(x^(2^i + 1)), with the i = 0 term being x.
    let masks: Vec<u32> = (0..q as u32)
        .flat_map(|x| {
            (0..terms as u32).map(move |i| if i == 0 { x } else { field.gold_power(x, i) })
        })
        .map(trace_mask)
        .collect();

    let amp = (1.0 / q as f64).sqrt();
    let mut data = vec![0.0f64; q * cols];
    data.par_chunks_mut(q).enumerate().for_each(|(c, col)| {
        let alpha: Vec<u32> = (0..terms)
            .map(|i| ((c as u64 >> (i as u32 * m)) & digit_mask) as u32)
            .collect();
        for (x, entry) in col.iter_mut().enumerate() {
            let row_masks = &masks[x * terms..(x + 1) * terms];
            let bits = alpha
                .iter()
                .zip(row_masks)
                .fold(0u32, |acc, (&a, &mk)| acc ^ (a & mk));
            *entry = if bits.count_ones() & 1 == 0 { amp } else { -amp };
        }
    });
    Frame::from_real(q, cols, data)
}

/// `μ` and `ν` of a frame whose Gram entries depend only on a group
/// difference of the column indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructuredCoherence {
    pub mu: f64,
    pub nu: f64,
}

/// Coherence of a code-based frame via its translation structure.
///
/// `⟨f_α, f_β⟩` depends only on `α ⊕ β` because the exponent in the sign
/// is additive in `α`. So the Gram matrix is determined by its first row
/// `c(d) = ⟨f_0, f_d⟩`, which gives `μ = max_{d≠0} |c(d)|` and
/// `ν = |Σ_{d≠0} c(d)| / (N − 1)` in `O(MN)` work.
pub fn code_frame_coherence(frame: &Frame) -> Result<StructuredCoherence> {
    let data = frame
        .as_real()
        .ok_or_else(|| FrameError::invalid("frame", "code-based frames are real"))?;
    let rows = frame.rows();
    let cols = frame.cols();
    if cols < 2 {
        return Err(FrameError::SingleVector);
    }
    let first = &data[..rows];
    let row0: Vec<f64> = data.par_chunks_exact(rows).map(|c| dot_conj(first, c)).collect();
    let mu = row0[1..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let nu = row0[1..].iter().sum::<f64>().abs() / (cols - 1) as f64;
    Ok(StructuredCoherence { mu, nu })
}

/// Checks `⟨f_α, f_β⟩ = c(α ⊕ β)` for every `β` and each listed `α`,
/// computing the Gram rows directly. Returns the largest deviation.
pub fn translation_structure_deviation(frame: &Frame, alphas: &[usize]) -> Result<f64> {
    let data = frame
        .as_real()
        .ok_or_else(|| FrameError::invalid("frame", "code-based frames are real"))?;
    let rows = frame.rows();
    let cols = frame.cols();
    if !cols.is_power_of_two() {
        return Err(FrameError::invalid("frame", "column count is not a power of two"));
    }
    let col = |i: usize| &data[i * rows..(i + 1) * rows];
    let row0: Vec<f64> = (0..cols).into_par_iter().map(|d| dot_conj(col(0), col(d))).collect();
    let mut worst = 0.0f64;
    for &a in alphas {
        if a >= cols {
            return Err(FrameError::invalid("alphas", format!("{a} out of range")));
        }
        let dev = (0..cols)
            .into_par_iter()
            .map(|b| (dot_conj(col(a), col(b)) - row0[a ^ b]).abs())
            .reduce(|| 0.0, f64::max);
        worst = worst.max(dev);
    }
    Ok(worst)
}

/// Coherence of a harmonic frame from its cyclic structure:
/// `⟨f_l, f_l'⟩ = (1/|𝓜|) Σ_{k∈𝓜} e^(2πi k (l' − l)/N)` depends only on
/// `l' − l mod N`.
pub fn harmonic_coherence(h: &HarmonicFrame) -> Result<StructuredCoherence> {
    let n = h.frame.cols();
    if n < 2 {
        return Err(FrameError::SingleVector);
    }
    let k = h.selected_rows.len() as f64;
    let c: Vec<Complex64> = (1..n)
        .into_par_iter()
        .map(|d| {
            h.selected_rows
                .iter()
                .map(|&r| Complex64::from_polar(1.0, TAU * ((r * d) % n) as f64 / n as f64))
                .sum::<Complex64>()
                / k
        })
        .collect();
    let mu = c.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let nu = c.iter().sum::<Complex64>().norm() / (n - 1) as f64;
    Ok(StructuredCoherence { mu, nu })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{average_coherence, spectral_norm, worst_case_coherence, NORM_TOLERANCE};

    #[test]
    fn gaussian_is_deterministic_and_unit_norm() {
        let spec = GaussianFrameSpec::new(4, 8, 11).unwrap();
        let a = build_gaussian(&spec).unwrap();
        let b = build_gaussian(&spec).unwrap();
        assert_eq!(a, b);
        for n in a.column_norms() {
            assert!((n - 1.0).abs() <= NORM_TOLERANCE);
        }
        let c = build_gaussian(&GaussianFrameSpec { seed: 12, ..spec }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn gaussian_spec_validation_and_regime() {
        assert!(GaussianFrameSpec::new(0, 8, 0).is_err());
        assert!(GaussianFrameSpec::new(4, 1, 0).is_err());
        assert!(!GaussianFrameSpec::new(64, 2048, 0).unwrap().in_guaranteed_regime());
        assert!(!GaussianFrameSpec::new(512, 2048, 0).unwrap().in_guaranteed_regime());
        // 60 ln N ≤ M ≤ (N−1)/(4 ln N) needs N in the hundreds of thousands.
        assert!(GaussianFrameSpec::new(1000, 1 << 20, 0).unwrap().in_guaranteed_regime());
    }

    #[test]
    fn gaussian_parallel_matches_serial() {
        let spec = GaussianFrameSpec::new(16, 300, 5).unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| build_gaussian(&spec).unwrap());
        let b = four.install(|| build_gaussian(&spec).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn harmonic_is_tight() {
        for seed in 0..5 {
            let h = build_harmonic(&HarmonicFrameSpec::new(64, 12, seed).unwrap()).unwrap();
            let k = h.selected_rows.len();
            assert_eq!(h.frame.rows(), k);
            assert_eq!(h.frame.cols(), 64);
            let s = spectral_norm(&h.frame, 1e-13).unwrap();
            assert!((s * s - 64.0 / k as f64).abs() <= 1e-9, "seed {seed}");
            for z in h.frame.as_complex().unwrap() {
                assert!((z.norm() - 1.0 / (k as f64).sqrt()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn harmonic_structured_route_matches_generic() {
        for seed in 0..4 {
            let h = build_harmonic(&HarmonicFrameSpec::new(96, 20, seed).unwrap()).unwrap();
            let s = harmonic_coherence(&h).unwrap();
            assert!((s.mu - worst_case_coherence(&h.frame).unwrap()).abs() < 1e-12);
            assert!((s.nu - average_coherence(&h.frame).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn harmonic_all_rows_is_orthogonal() {
        let h = build_harmonic(&HarmonicFrameSpec::new(32, 32, 9).unwrap()).unwrap();
        assert_eq!(h.selected_rows, (0..32).collect::<Vec<_>>());
        assert!(worst_case_coherence(&h.frame).unwrap() < 1e-12);
    }

    #[test]
    fn harmonic_empty_selection_is_redrawn() {
        // p = 1/1000 over 1000 rows: an empty draw has probability ≈ 1/e.
        let mut saw_resample = false;
        for seed in 0..20 {
            let h = build_harmonic(&HarmonicFrameSpec::new(1000, 1, seed).unwrap()).unwrap();
            assert!(!h.selected_rows.is_empty());
            saw_resample |= h.resamples > 0;
        }
        assert!(saw_resample);
    }

    #[test]
    fn harmonic_spec_validation() {
        assert!(HarmonicFrameSpec::new(10, 0, 0).is_err());
        assert!(HarmonicFrameSpec::new(10, 11, 0).is_err());
        assert!(!HarmonicFrameSpec::new(1024, 64, 0).unwrap().in_guaranteed_regime());
        // 16 ln N ≈ 111 for N = 1024, so M = 200 is in range.
        assert!(HarmonicFrameSpec::new(1024, 200, 0).unwrap().in_guaranteed_regime());
    }

    #[test]
    fn code_frame_entries_are_exact_signs() {
        for (m, t) in [(3, 1), (4, 1), (5, 1)] {
            let spec = CodeFrameSpec::new(m, t);
            let f = build_code_frame(&spec).unwrap();
            let amp = (1.0 / (1u64 << m) as f64).sqrt();
            assert_eq!(f.rows(), 1 << m);
            assert_eq!(f.cols(), 1 << ((t + 1) * m));
            assert!(f.as_real().unwrap().iter().all(|&v| v == amp || v == -amp));
        }
    }

    #[test]
    fn code_frame_first_columns_are_walsh_functions() {
        // α = (α₀, 0): entries (−1)^Tr(α₀x), an orthonormal Walsh basis.
        let f = build_code_frame(&CodeFrameSpec::new(4, 1)).unwrap();
        let field = Gf2m::new(4).unwrap();
        for a in 0..16usize {
            for x in 0..16usize {
                let sign = if field.trace(field.mul(a as u32, x as u32)) == 0 { 1.0 } else { -1.0 };
                assert_eq!(f.get(x, a).re, sign * 0.25);
            }
        }
        let walsh = f.select_columns(&(0..16).collect::<Vec<_>>()).unwrap();
        assert!(worst_case_coherence(&walsh).unwrap() < 1e-15);
    }

    #[test]
    fn code_frame_structured_route_matches_generic() {
        for (m, t) in [(3, 1), (4, 1), (5, 1)] {
            let f = build_code_frame(&CodeFrameSpec::new(m, t)).unwrap();
            let fast = code_frame_coherence(&f).unwrap();
            let mu = worst_case_coherence(&f).unwrap();
            let nu = average_coherence(&f).unwrap();
            assert!((fast.mu - mu).abs() < 1e-12, "({m},{t})");
            assert!((fast.nu - nu).abs() < 1e-12, "({m},{t})");
            let dev = translation_structure_deviation(&f, &[0, 1, 7, f.cols() - 1]).unwrap();
            assert!(dev < 1e-12);
        }
    }

    #[test]
    fn code_frame_m4_t1_geometry() {
        // Exhaustive check against μ ≤ 1/√(2^(m−2t−1)), ν ≤ μ/√(2^m), ‖F‖² = 2^(tm).
        let spec = CodeFrameSpec::new(4, 1);
        let f = build_code_frame(&spec).unwrap();
        let mu = worst_case_coherence(&f).unwrap();
        let nu = average_coherence(&f).unwrap();
        let s = spectral_norm(&f, 1e-13).unwrap();
        assert!(mu <= spec.mu_bound());
        assert!(nu <= spec.nu_bound(mu));
        assert!((s * s - spec.tight_norm_sq()).abs() <= 1e-9);
        assert!((mu - 0.5).abs() < 1e-12);
        assert!((nu - 15.0 / 255.0).abs() < 1e-12);
    }

    #[test]
    fn code_frame_guard_and_validation() {
        let err = build_code_frame(&CodeFrameSpec::new(13, 1)).unwrap_err();
        assert!(matches!(
            err,
            FrameError::GuardExceeded { required, allowed, .. }
                if required == 1 << 26 && allowed == 1 << 24
        ));
        assert!(build_code_frame(&CodeFrameSpec::new(4, 0)).is_err());
        let bad = CodeFrameSpec {
            irreducible_poly: Some(0b10101),
            ..CodeFrameSpec::new(4, 1)
        };
        assert!(matches!(
            build_code_frame(&bad),
            Err(FrameError::ReduciblePolynomial { .. })
        ));
    }

    #[test]
    fn code_frame_geometry_is_modulus_independent() {
        // x^4 + x^3 + 1 is the other primitive quartic.
        let alt = CodeFrameSpec {
            irreducible_poly: Some(0b11001),
            ..CodeFrameSpec::new(4, 1)
        };
        let a = code_frame_coherence(&build_code_frame(&alt).unwrap()).unwrap();
        let b = code_frame_coherence(&build_code_frame(&CodeFrameSpec::new(4, 1)).unwrap()).unwrap();
        assert!((a.mu - b.mu).abs() < 1e-12);
        assert!((a.nu - b.nu).abs() < 1e-12);
    }
}
