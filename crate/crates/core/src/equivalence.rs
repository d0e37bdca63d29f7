//! Wiggling and flipping equivalence, greedy linear-time flipping, and an
//! exhaustive search over flipping patterns.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{FrameError, Result};
use crate::frame::{average_coherence, gram, Frame, FrameData};
use crate::scalar::{dot_conj, Scalar};

/// Largest `N` the exhaustive search accepts.
pub const EXHAUSTIVE_MAX_COLS: usize = 24;

/// Patterns per Gray-code sweep before the running sums are recomputed
/// from scratch, which keeps rounding drift bounded.
const SWEEP_BITS: usize = 12;

/// Diagonal of ±1 signs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FlipPattern {
    signs: Vec<i8>,
}

impl FlipPattern {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if let Some(bad) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(FrameError::invalid("signs", format!("entry {bad} is not ±1")));
        }
        Ok(FlipPattern { signs })
    }

    pub fn identity(n: usize) -> Self {
        FlipPattern { signs: vec![1; n] }
    }

    /// Bit `j` set iff sign `j` is −1.
    pub fn from_index(index: u64, n: usize) -> Self {
        FlipPattern {
            signs: (0..n).map(|j| if index >> j & 1 == 1 { -1 } else { 1 }).collect(),
        }
    }

    pub fn index(&self) -> u64 {
        self.signs
            .iter()
            .enumerate()
            .filter(|(_, &s)| s < 0)
            .fold(0, |acc, (j, _)| acc | 1 << j)
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn to_wiggle(&self) -> WigglePattern {
        WigglePattern {
            phases: self.signs.iter().map(|&s| Complex64::new(s as f64, 0.0)).collect(),
        }
    }
}

impl fmt::Display for FlipPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.signs {
            f.write_str(if s > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl FromStr for FlipPattern {
    type Err = FrameError;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(FrameError::invalid(
                    "pattern",
                    format!("unexpected character `{other}`"),
                )),
            })
            .collect::<Result<Vec<_>>>()
            .map(|signs| FlipPattern { signs })
    }
}

/// Diagonal of unimodular phases.
#[derive(Debug, Clone, PartialEq)]
pub struct WigglePattern {
    phases: Vec<Complex64>,
}

impl WigglePattern {
    pub fn new(phases: Vec<Complex64>) -> Result<Self> {
        if let Some((n, z)) = phases
            .iter()
            .enumerate()
            .find(|(_, z)| (z.norm() - 1.0).abs() > 1e-12)
        {
            return Err(FrameError::invalid(
                "phases",
                format!("entry {n} has modulus {}", z.norm()),
            ));
        }
        Ok(WigglePattern { phases })
    }

    /// Phases `e^{iθ_n}`.
    pub fn from_angles(angles: &[f64]) -> Self {
        WigglePattern {
            phases: angles.iter().map(|&a| Complex64::from_polar(1.0, a)).collect(),
        }
    }

    pub fn phases(&self) -> &[Complex64] {
        &self.phases
    }

    fn is_real(&self) -> bool {
        self.phases.iter().all(|z| z.im == 0.0)
    }
}

fn check_len(frame: &Frame, len: usize) -> Result<()> {
    if len != frame.cols() {
        Err(FrameError::DimensionMismatch {
            expected: frame.cols(),
            actual: len,
        })
    } else {
        Ok(())
    }
}

fn scale_columns<T: Scalar>(rows: usize, data: &[T], factors: impl Fn(usize) -> T) -> Vec<T> {
    data.chunks_exact(rows)
        .enumerate()
        .flat_map(|(n, col)| {
            let d = factors(n);
            col.iter().map(move |&x| x * d)
        })
        .collect()
}

/// `G = F D` for a diagonal of phases. Real frames stay real when every
/// phase is real.
pub fn apply_wiggle(frame: &Frame, pattern: &WigglePattern) -> Result<Frame> {
    check_len(frame, pattern.phases.len())?;
    let rows = frame.rows();
    let data = match frame.data() {
        FrameData::Real(d) if pattern.is_real() => {
            FrameData::Real(scale_columns(rows, d, |n| pattern.phases[n].re))
        }
        FrameData::Real(d) => {
            let promoted: Vec<Complex64> = d.iter().map(|&x| x.into()).collect();
            FrameData::Complex(scale_columns(rows, &promoted, |n| pattern.phases[n]))
        }
        FrameData::Complex(d) => FrameData::Complex(scale_columns(rows, d, |n| pattern.phases[n])),
    };
    Ok(Frame::from_parts_unchecked(rows, frame.cols(), data))
}

/// `G = F D` for a diagonal of signs. Exact: only sign bits change.
pub fn apply_flip(frame: &Frame, pattern: &FlipPattern) -> Result<Frame> {
    check_len(frame, pattern.len())?;
    let rows = frame.rows();
    let data = match frame.data() {
        FrameData::Real(d) => FrameData::Real(scale_columns(rows, d, |n| pattern.signs[n] as f64)),
        FrameData::Complex(d) => FrameData::Complex(scale_columns(rows, d, |n| {
            Complex64::new(pattern.signs[n] as f64, 0.0)
        })),
    };
    Ok(Frame::from_parts_unchecked(rows, frame.cols(), data))
}

fn greedy_signs<T: Scalar>(rows: usize, data: &[T]) -> Vec<i8> {
    let mut sum = vec![T::ZERO; rows];
    let mut signs = Vec::with_capacity(data.len() / rows);
    for col in data.chunks_exact(rows) {
        // ‖S + f‖² − ‖S − f‖² = 4 Re⟨S, f⟩. Testing the inner product keeps
        // exact ties exact; ties keep the element, so the first column
        // (S = 0) is always kept.
        let keep = dot_conj(&sum, col).to_complex().re <= 0.0;
        for (s, &f) in sum.iter_mut().zip(col) {
            if keep {
                *s += f;
            } else {
                *s = *s - f;
            }
        }
        signs.push(if keep { 1 } else { -1 });
    }
    signs
}

/// Greedy sign choice: keep `f_n` when it shortens the running sum at
/// least as much as `−f_n` does. One pass, `O(MN)`.
pub fn linear_time_flip(frame: &Frame) -> Result<(Frame, FlipPattern)> {
    let signs = match frame.data() {
        FrameData::Real(d) => greedy_signs(frame.rows(), d),
        FrameData::Complex(d) => greedy_signs(frame.rows(), d),
    };
    let pattern = FlipPattern { signs };
    Ok((apply_flip(frame, &pattern)?, pattern))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub frame: Frame,
    pub pattern: FlipPattern,
    pub min_nu: f64,
}

/// ν of the flipped frame given `h_i = Σ_j s_j G_ij`:
/// `Σ_{j≠i} ⟨g_i, g_j⟩ = s_i h_i − G_ii`.
fn nu_from_sums(signs: &[f64], sums: &[Complex64], diag: &[f64]) -> f64 {
    signs
        .iter()
        .zip(sums)
        .zip(diag)
        .map(|((&s, &h), &d)| (h * s - d).norm_sqr())
        .fold(0.0, f64::max)
}

/// Minimizes ν over the flipping class by enumeration. The first sign is
/// pinned to `+` (a global sign change leaves ν unchanged), so `2^(N−1)`
/// patterns are scanned. Ties go to the lowest pattern index.
pub fn exhaustive_flip_oracle(frame: &Frame) -> Result<OracleResult> {
    let n = frame.cols();
    if n > EXHAUSTIVE_MAX_COLS {
        return Err(FrameError::GuardExceeded {
            what: "exhaustive flip search columns",
            required: n as u64,
            allowed: EXHAUSTIVE_MAX_COLS as u64,
        });
    }
    if n < 2 {
        return Err(FrameError::SingleVector);
    }
    let g = gram(frame);
    let diag: Vec<f64> = (0..n).map(|i| g.get(i, i).re).collect();
    let free = n - 1;
    let low = free.min(SWEEP_BITS);
    let high = free - low;

    // Free bit b corresponds to column b + 1; pattern index bit j ↔ column j.
    let (best_sq, best_index) = (0u64..1 << high)
        .into_par_iter()
        .map(|block| {
            let base = block << (low + 1);
            let mut signs: Vec<f64> = (0..n)
                .map(|j| if base >> j & 1 == 1 { -1.0 } else { 1.0 })
                .collect();
            let mut sums: Vec<Complex64> = (0..n)
                .map(|i| (0..n).map(|j| g.get(i, j) * signs[j]).sum())
                .collect();
            let mut best = (nu_from_sums(&signs, &sums, &diag), base);
            let mut gray = 0u64;
            for step in 1u64..1 << low {
                let bit = step.trailing_zeros() as usize;
                gray ^= 1 << bit;
                let col = bit + 1;
                // Flipping s_col changes every h_i by −2 s_col G_{i,col}.
                let delta = -2.0 * signs[col];
                for (i, h) in sums.iter_mut().enumerate() {
                    *h += g.get(i, col) * delta;
                }
                signs[col] = -signs[col];
                let nu = nu_from_sums(&signs, &sums, &diag);
                let index = base | gray << 1;
                if nu < best.0 || (nu == best.0 && index < best.1) {
                    best = (nu, index);
                }
            }
            best
        })
        .reduce(
            || (f64::INFINITY, u64::MAX),
            |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );
    debug_assert!(best_sq.is_finite());

    let pattern = FlipPattern::from_index(best_index, n);
    let flipped = apply_flip(frame, &pattern)?;
    let min_nu = average_coherence(&flipped)?;
    Ok(OracleResult {
        frame: flipped,
        pattern,
        min_nu,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_gaussian, GaussianFrameSpec};
    use crate::frame::{spectral_norm, worst_case_coherence};

    #[test]
    fn pattern_string_round_trip() {
        let p: FlipPattern = "+-+--++-++".parse().unwrap();
        assert_eq!(p.to_string(), "+-+--++-++");
        assert_eq!(p.len(), 10);
        assert_eq!(FlipPattern::from_index(p.index(), 10), p);
        assert!("+x".parse::<FlipPattern>().is_err());
        assert!(FlipPattern::new(vec![1, 0]).is_err());
    }

    #[test]
    fn wiggle_rejects_non_unimodular() {
        assert!(WigglePattern::new(vec![Complex64::new(0.5, 0.0)]).is_err());
        assert!(WigglePattern::new(vec![Complex64::new(0.6, 0.8)]).is_ok());
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let f = Frame::identity(3);
        assert!(apply_flip(&f, &FlipPattern::identity(2)).is_err());
        assert!(apply_wiggle(&f, &WigglePattern::from_angles(&[0.0; 4])).is_err());
    }

    #[test]
    fn identity_wiggle_is_a_no_op() {
        let f = build_gaussian(&GaussianFrameSpec::new(3, 6, 1).unwrap()).unwrap();
        let g = apply_wiggle(&f, &WigglePattern::from_angles(&[0.0; 6])).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn orthonormal_basis_keeps_everything() {
        let f = Frame::identity(6);
        let (g, p) = linear_time_flip(&f).unwrap();
        assert_eq!(p, FlipPattern::identity(6));
        assert_eq!(f, g);
    }

    #[test]
    fn global_sign_changes_nothing() {
        for seed in 0..5 {
            let f = build_gaussian(&GaussianFrameSpec::new(5, 12, seed).unwrap()).unwrap();
            let g = apply_flip(&f, &FlipPattern::new(vec![-1; 12]).unwrap()).unwrap();
            let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
            assert!(close(worst_case_coherence(&f).unwrap(), worst_case_coherence(&g).unwrap()));
            assert!(close(average_coherence(&f).unwrap(), average_coherence(&g).unwrap()));
            assert!(close(spectral_norm(&f, 1e-13).unwrap(), spectral_norm(&g, 1e-13).unwrap()));
        }
    }

    #[test]
    fn wiggling_can_change_average_coherence() {
        // ν is not a wiggle invariant: unit vectors at 0°, 45°, 90° have
        // ν = 1/√2, and flipping the last one halves it.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let f = Frame::from_real(2, 3, vec![1.0, 0.0, h, h, 0.0, 1.0]).unwrap();
        let g = apply_flip(&f, &"++-".parse().unwrap()).unwrap();
        assert!((average_coherence(&f).unwrap() - h).abs() < 1e-12);
        assert!((average_coherence(&g).unwrap() - h / 2.0).abs() < 1e-12);
    }

    #[test]
    fn oracle_guard() {
        let f = build_gaussian(&GaussianFrameSpec::new(2, 25, 0).unwrap()).unwrap();
        assert!(matches!(
            exhaustive_flip_oracle(&f),
            Err(FrameError::GuardExceeded { required: 25, allowed: 24, .. })
        ));
    }

    #[test]
    fn oracle_beats_greedy_on_small_frames() {
        for seed in 0..10 {
            let f = build_gaussian(&GaussianFrameSpec::new(3, 9, seed).unwrap()).unwrap();
            let (g, _) = linear_time_flip(&f).unwrap();
            let o = exhaustive_flip_oracle(&f).unwrap();
            assert!(o.min_nu <= average_coherence(&g).unwrap() + 1e-12);
            assert_eq!(o.pattern.signs()[0], 1);
        }
    }

    #[test]
    fn oracle_sweeps_across_blocks() {
        // N − 1 > SWEEP_BITS exercises the block split.
        let f = build_gaussian(&GaussianFrameSpec::new(3, 15, 4).unwrap()).unwrap();
        let o = exhaustive_flip_oracle(&f).unwrap();
        let direct = (0u64..1 << 14)
            .map(|b| {
                let p = FlipPattern::from_index(b << 1, 15);
                average_coherence(&apply_flip(&f, &p).unwrap()).unwrap()
            })
            .fold(f64::INFINITY, f64::min);
        assert!((o.min_nu - direct).abs() < 1e-12);
    }
}
