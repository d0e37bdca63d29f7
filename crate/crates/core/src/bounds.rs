//! Lower bounds on the worst-case coherence of unit-norm frames.
//!
//! Vacuous values (≤ 0) are returned as computed, never clamped.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{FrameError, Result};
use crate::fmt::sig12;

/// `√((N − M) / (M (N − 1)))`, valid for every unit-norm frame.
pub fn welch_bound(m: usize, n: usize) -> Result<f64> {
    if m < 1 {
        return Err(FrameError::invalid("M", "must be at least 1"));
    }
    if n < 2 {
        return Err(FrameError::invalid("N", "must be at least 2"));
    }
    let (m, n) = (m as f64, n as f64);
    let ratio = (n - m) / (m * (n - 1.0));
    // N < M makes the radicand negative; report the signed root.
    Ok(ratio.signum() * ratio.abs().sqrt())
}

/// `1 − 2 N^(−1/(M−1))`, valid for every unit-norm frame.
pub fn complex_bound(m: usize, n: usize) -> Result<f64> {
    if m < 2 {
        return Err(FrameError::BoundUndefined(format!(
            "complex bound needs M ≥ 2, got M = {m}"
        )));
    }
    if n < 1 {
        return Err(FrameError::invalid("N", "must be positive"));
    }
    Ok(1.0 - 2.0 * (n as f64).powf(-1.0 / (m as f64 - 1.0)))
}

/// `Γ(k/2)` for a positive integer `k`, from `Γ(1/2) = √π`, `Γ(1) = 1`
/// and `Γ(z + 1) = z Γ(z)`.
pub fn gamma_half_integer(k: u32) -> f64 {
    assert!(k >= 1, "Γ(0) is a pole");
    let (mut z, mut g) = if k.is_multiple_of(2) { (1.0, 1.0) } else { (0.5, PI.sqrt()) };
    let target = k as f64 / 2.0;
    while z < target {
        g *= z;
        z += 1.0;
    }
    g
}

/// `Γ((M − 1)/2) / Γ(M/2)` via `R(M + 2) = R(M) (M − 1)/M`, which stays
/// finite where the individual Gamma values overflow.
pub fn gamma_ratio(m: usize) -> f64 {
    assert!(m >= 2);
    let (mut k, mut r) = if m.is_multiple_of(2) {
        (2usize, PI.sqrt())
    } else {
        (3usize, 2.0 / PI.sqrt())
    };
    while k < m {
        r *= (k as f64 - 1.0) / k as f64;
        k += 2;
    }
    r
}

/// `cos[π ((M − 1)/(N √π) · Γ((M−1)/2)/Γ(M/2))^(1/(M−1))]`, valid for
/// real unit-norm frames.
pub fn real_bound(m: usize, n: usize) -> Result<f64> {
    if m < 2 {
        return Err(FrameError::BoundUndefined(format!(
            "real bound needs M ≥ 2, got M = {m}"
        )));
    }
    if n < 1 {
        return Err(FrameError::invalid("N", "must be positive"));
    }
    let mf = m as f64;
    let inner = (mf - 1.0) / (n as f64 * PI.sqrt()) * gamma_ratio(m);
    Ok((PI * inner.powf(1.0 / (mf - 1.0))).cos())
}

/// `1 − 4/N + 2/N²`, valid for real `3 × N` unit-norm frames.
pub fn bound_3d(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(FrameError::invalid("N", "must be at least 2"));
    }
    let n = n as f64;
    Ok(1.0 - 4.0 / n + 2.0 / (n * n))
}

/// Largest lower bound that applies to a frame of the given shape.
pub fn best_lower_bound(m: usize, n: usize, real: bool) -> f64 {
    let mut best = f64::NEG_INFINITY;
    if let Ok(w) = welch_bound(m, n) {
        best = best.max(w);
    }
    if let Ok(c) = complex_bound(m, n) {
        best = best.max(c);
    }
    if real {
        if let Ok(r) = real_bound(m, n) {
            best = best.max(r);
        }
        if m == 3 {
            if let Ok(t) = bound_3d(n) {
                best = best.max(t);
            }
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRow {
    pub n: usize,
    pub welch: f64,
    pub complex: Option<f64>,
    pub real: Option<f64>,
    pub three_d: Option<f64>,
}

impl BoundRow {
    /// Pointwise max of the bounds that hold for real frames other than
    /// the complex one.
    pub fn real_frame_max(&self) -> f64 {
        [Some(self.welch), self.real, self.three_d]
            .into_iter()
            .flatten()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundTable {
    pub m: usize,
    pub rows: Vec<BoundRow>,
}

pub const BOUND_CSV_HEADER: &str = "N,welch,complex,real,three_d";

/// Evaluates every applicable bound at each `N` in the range.
pub fn bound_table(m: usize, ns: impl IntoIterator<Item = usize>) -> Result<BoundTable> {
    let rows = ns
        .into_iter()
        .map(|n| {
            Ok(BoundRow {
                n,
                welch: welch_bound(m, n)?,
                complex: complex_bound(m, n).ok(),
                real: real_bound(m, n).ok(),
                three_d: if m == 3 { Some(bound_3d(n)?) } else { None },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if rows.is_empty() {
        return Err(FrameError::invalid("N range", "must be nonempty"));
    }
    Ok(BoundTable { m, rows })
}

impl BoundTable {
    /// CSV with 12 significant digits; inapplicable bounds are empty fields.
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(sig12).unwrap_or_default();
        let mut out = String::from(BOUND_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.n,
                sig12(r.welch),
                opt(r.complex),
                opt(r.real),
                opt(r.three_d)
            );
        }
        out
    }

    /// Aligned text table; vacuous (≤ 0) bounds carry a `*`.
    pub fn to_text(&self) -> String {
        let cell = |v: Option<f64>| match v {
            None => format!("{:>16}", "-"),
            Some(x) if x <= 0.0 => format!("{:>15.9}*", x),
            Some(x) => format!("{:>15.9} ", x),
        };
        let mut out = format!(
            "M = {}\n{:>5} {:>16} {:>16} {:>16} {:>16}\n",
            self.m, "N", "welch", "complex", "real", "three_d"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:>5} {} {} {} {}",
                r.n,
                cell(Some(r.welch)),
                cell(r.complex),
                cell(r.real),
                cell(r.three_d)
            );
        }
        out.push_str("(* = vacuous bound)\n");
        out
    }

    /// N values where the complex bound is not strictly below the max of
    /// the other bounds.
    pub fn ordering_violations(&self) -> Vec<usize> {
        self.rows
            .iter()
            .filter(|r| r.complex.is_some_and(|c| r.real_frame_max() <= c))
            .map(|r| r.n)
            .collect()
    }
}
