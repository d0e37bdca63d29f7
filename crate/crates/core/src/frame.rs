//! Unit-norm frames and their coherence geometry.
//!
//! A frame is an `M × N` matrix stored column-major whose columns (the
//! frame elements) have unit Euclidean norm. Real frames keep `f64`
//! storage; complex frames keep [`Complex64`].

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{FrameError, Result};
use crate::kernels::Gemm;
use crate::rng;
use crate::scalar::{dot_conj, norm_sqr, Scalar};

/// Tolerance on column norms after construction.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Default relative tolerance for [`spectral_norm`].
pub const SPECTRAL_TOLERANCE: f64 = 1e-12;

/// Columns whose norm is this close to 1 are left bit-for-bit untouched.
const RENORMALIZE_SLACK: f64 = 4.0 * f64::EPSILON;

/// Number of Gram rows computed per block in the coherence kernels.
const GRAM_BLOCK: usize = 128;

const POWER_SEED: u64 = 0x5eed_f00d;
const POWER_MAX_ITERS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalarField {
    Real,
    Complex,
}

impl ScalarField {
    pub fn as_str(self) -> &'static str {
        match self {
            ScalarField::Real => "real",
            ScalarField::Complex => "complex",
        }
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ScalarField {
    type Err = FrameError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(ScalarField::Real),
            "complex" => Ok(ScalarField::Complex),
            other => Err(FrameError::invalid(
                "scalar_field",
                format!("expected `real` or `complex`, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FrameData {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

/// An `M × N` unit-norm frame. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    rows: usize,
    cols: usize,
    data: FrameData,
}

fn normalize_columns<T: Scalar>(rows: usize, data: &mut [T]) -> Result<()> {
    for (n, col) in data.chunks_exact_mut(rows).enumerate() {
        let norm = norm_sqr(col).sqrt();
        if norm == 0.0 {
            return Err(FrameError::ZeroColumn(n));
        }
        if (norm - 1.0).abs() > RENORMALIZE_SLACK {
            let inv = 1.0 / norm;
            for x in col.iter_mut() {
                *x = x.scale(inv);
            }
        }
    }
    Ok(())
}

fn check_shape(rows: usize, cols: usize, len: usize) -> Result<()> {
    if rows == 0 {
        return Err(FrameError::invalid("rows", "must be positive"));
    }
    if cols == 0 {
        return Err(FrameError::invalid("cols", "must be positive"));
    }
    let expected = rows
        .checked_mul(cols)
        .ok_or_else(|| FrameError::invalid("cols", "rows × cols overflows"))?;
    if len != expected {
        return Err(FrameError::DimensionMismatch {
            expected,
            actual: len,
        });
    }
    Ok(())
}

impl Frame {
    /// Builds a real frame from column-major data, normalizing every column.
    pub fn from_real(rows: usize, cols: usize, mut data: Vec<f64>) -> Result<Self> {
        check_shape(rows, cols, data.len())?;
        normalize_columns(rows, &mut data)?;
        Ok(Frame {
            rows,
            cols,
            data: FrameData::Real(data),
        })
    }

    /// Builds a complex frame from column-major data, normalizing every column.
    pub fn from_complex(rows: usize, cols: usize, mut data: Vec<Complex64>) -> Result<Self> {
        check_shape(rows, cols, data.len())?;
        normalize_columns(rows, &mut data)?;
        Ok(Frame {
            rows,
            cols,
            data: FrameData::Complex(data),
        })
    }

    pub fn from_data(rows: usize, cols: usize, data: FrameData) -> Result<Self> {
        match data {
            FrameData::Real(d) => Frame::from_real(rows, cols, d),
            FrameData::Complex(d) => Frame::from_complex(rows, cols, d),
        }
    }

    /// The `n × n` identity, an orthonormal basis.
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Frame {
            rows: n,
            cols: n,
            data: FrameData::Real(data),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> ScalarField {
        match self.data {
            FrameData::Real(_) => ScalarField::Real,
            FrameData::Complex(_) => ScalarField::Complex,
        }
    }

    pub fn data(&self) -> &FrameData {
        &self.data
    }

    pub fn into_data(self) -> FrameData {
        self.data
    }

    pub fn as_real(&self) -> Option<&[f64]> {
        match &self.data {
            FrameData::Real(d) => Some(d),
            FrameData::Complex(_) => None,
        }
    }

    pub fn as_complex(&self) -> Option<&[Complex64]> {
        match &self.data {
            FrameData::Real(_) => None,
            FrameData::Complex(d) => Some(d),
        }
    }

    /// Entry `(row, col)` promoted to complex.
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        let idx = col * self.rows + row;
        match &self.data {
            FrameData::Real(d) => Complex64::new(d[idx], 0.0),
            FrameData::Complex(d) => d[idx],
        }
    }

    pub fn column(&self, col: usize) -> Vec<Complex64> {
        let range = col * self.rows..(col + 1) * self.rows;
        match &self.data {
            FrameData::Real(d) => d[range].iter().map(|&x| x.into()).collect(),
            FrameData::Complex(d) => d[range].to_vec(),
        }
    }

    /// Whole matrix promoted to complex, column-major.
    pub fn to_complex_data(&self) -> Vec<Complex64> {
        match &self.data {
            FrameData::Real(d) => d.iter().map(|&x| x.into()).collect(),
            FrameData::Complex(d) => d.clone(),
        }
    }

    pub fn column_norms(&self) -> Vec<f64> {
        match &self.data {
            FrameData::Real(d) => column_norms(self.rows, d),
            FrameData::Complex(d) => column_norms(self.rows, d),
        }
    }

    /// `Fᴴ y` for a length-`M` vector.
    pub fn adjoint_apply(&self, y: &[Complex64]) -> Result<Vec<Complex64>> {
        if y.len() != self.rows {
            return Err(FrameError::DimensionMismatch {
                expected: self.rows,
                actual: y.len(),
            });
        }
        let m = self.rows;
        Ok(match &self.data {
            FrameData::Real(d) => d
                .chunks_exact(m)
                .map(|c| c.iter().zip(y).map(|(&a, &b)| b * a).sum())
                .collect(),
            FrameData::Complex(d) => d.chunks_exact(m).map(|c| dot_conj(c, y)).collect(),
        })
    }

    /// `F x` for a length-`N` vector.
    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.cols {
            return Err(FrameError::DimensionMismatch {
                expected: self.cols,
                actual: x.len(),
            });
        }
        let m = self.rows;
        let mut out = vec![Complex64::new(0.0, 0.0); m];
        for (n, &xn) in x.iter().enumerate() {
            if xn == Complex64::new(0.0, 0.0) {
                continue;
            }
            match &self.data {
                FrameData::Real(d) => {
                    for (o, &a) in out.iter_mut().zip(&d[n * m..(n + 1) * m]) {
                        *o += xn * a;
                    }
                }
                FrameData::Complex(d) => {
                    for (o, &a) in out.iter_mut().zip(&d[n * m..(n + 1) * m]) {
                        *o += xn * a;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Subframe made of the listed columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Frame> {
        let m = self.rows;
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.cols) {
            return Err(FrameError::invalid(
                "columns",
                format!("index {bad} out of range for {} columns", self.cols),
            ));
        }
        let data = match &self.data {
            FrameData::Real(d) => {
                FrameData::Real(cols.iter().flat_map(|&c| d[c * m..(c + 1) * m].iter().copied()).collect())
            }
            FrameData::Complex(d) => FrameData::Complex(
                cols.iter().flat_map(|&c| d[c * m..(c + 1) * m].iter().copied()).collect(),
            ),
        };
        Ok(Frame {
            rows: m,
            cols: cols.len(),
            data,
        })
    }

    pub(crate) fn from_parts_unchecked(rows: usize, cols: usize, data: FrameData) -> Self {
        Frame { rows, cols, data }
    }
}

fn column_norms<T: Scalar>(rows: usize, data: &[T]) -> Vec<f64> {
    data.chunks_exact(rows).map(|c| norm_sqr(c).sqrt()).collect()
}

/// Dense `N × N` Gram matrix, row-major. Entry `(i, j)` is `f_iᴴ f_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gram {
    n: usize,
    entries: Vec<Complex64>,
}

impl Gram {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }
}

fn gram_generic<T: Gemm>(rows: usize, cols: usize, data: &[T]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); cols * cols];
    // Upper triangle by blocks of rows, then mirrored so the result is
    // exactly Hermitian.
    let blocks: Vec<(usize, Vec<T>)> = (0..cols)
        .step_by(GRAM_BLOCK)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|i0| {
            let i1 = (i0 + GRAM_BLOCK).min(cols);
            let width = cols - i0;
            let mut block = vec![T::ZERO; (i1 - i0) * width];
            T::adjoint_product(
                rows,
                &data[i0 * rows..i1 * rows],
                i1 - i0,
                &data[i0 * rows..],
                width,
                &mut block,
            );
            (i0, block)
        })
        .collect();
    for (i0, block) in blocks {
        let width = cols - i0;
        for (bi, row) in block.chunks_exact(width).enumerate() {
            let i = i0 + bi;
            for (bj, &v) in row.iter().enumerate().skip(bi) {
                let j = i0 + bj;
                let z = v.to_complex();
                out[i * cols + j] = z;
                out[j * cols + i] = z.conj();
            }
        }
    }
    out
}

/// All pairwise inner products of the frame elements.
pub fn gram(frame: &Frame) -> Gram {
    let entries = match &frame.data {
        FrameData::Real(d) => gram_generic(frame.rows, frame.cols, d),
        FrameData::Complex(d) => gram_generic(frame.rows, frame.cols, d),
    };
    Gram {
        n: frame.cols,
        entries,
    }
}

fn require_pair(frame: &Frame) -> Result<()> {
    if frame.cols < 2 {
        Err(FrameError::SingleVector)
    } else {
        Ok(())
    }
}

fn worst_case_generic<T: Gemm>(rows: usize, cols: usize, data: &[T]) -> f64 {
    (0..cols)
        .step_by(GRAM_BLOCK)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|i0| {
            let i1 = (i0 + GRAM_BLOCK).min(cols);
            let width = cols - i0;
            let mut block = vec![T::ZERO; (i1 - i0) * width];
            T::adjoint_product(
                rows,
                &data[i0 * rows..i1 * rows],
                i1 - i0,
                &data[i0 * rows..],
                width,
                &mut block,
            );
            let mut best = 0.0f64;
            for (bi, row) in block.chunks_exact(width).enumerate() {
                for &v in &row[bi + 1..] {
                    best = best.max(v.norm_sqr());
                }
            }
            best
        })
        .reduce(|| 0.0, f64::max)
        .sqrt()
}

/// `μ = max_{i≠j} |⟨f_i, f_j⟩|`.
pub fn worst_case_coherence(frame: &Frame) -> Result<f64> {
    require_pair(frame)?;
    Ok(match &frame.data {
        FrameData::Real(d) => worst_case_generic(frame.rows, frame.cols, d),
        FrameData::Complex(d) => worst_case_generic(frame.rows, frame.cols, d),
    })
}

fn average_generic<T: Scalar>(rows: usize, cols: usize, data: &[T]) -> f64 {
    // Σ_{j≠i} ⟨f_i, f_j⟩ = f_iᴴ s − ‖f_i‖², with s the sum of all columns.
    let mut sum = vec![T::ZERO; rows];
    for col in data.chunks_exact(rows) {
        for (s, &x) in sum.iter_mut().zip(col) {
            *s += x;
        }
    }
    let worst = data
        .par_chunks_exact(rows)
        .map(|col| {
            let inner = dot_conj(col, &sum).to_complex() - norm_sqr(col);
            inner.norm()
        })
        .reduce(|| 0.0, f64::max);
    worst / (cols - 1) as f64
}

/// `ν = max_i |Σ_{j≠i} ⟨f_i, f_j⟩| / (N − 1)`.
pub fn average_coherence(frame: &Frame) -> Result<f64> {
    require_pair(frame)?;
    Ok(match &frame.data {
        FrameData::Real(d) => average_generic(frame.rows, frame.cols, d),
        FrameData::Complex(d) => average_generic(frame.rows, frame.cols, d),
    })
}

/// Hermitian PSD matrix, the smaller of `F Fᴴ` and `Fᴴ F`, row-major.
fn small_gram<T: Gemm>(rows: usize, cols: usize, data: &[T]) -> (usize, Vec<T>) {
    if cols <= rows {
        let mut g = vec![T::ZERO; cols * cols];
        T::adjoint_product(rows, data, cols, data, cols, &mut g);
        (cols, g)
    } else {
        // F Fᴴ = (Fᴴ)ᴴ Fᴴ; Fᴴ is needed column-major, i.e. rows of F conjugated.
        let mut adj = vec![T::ZERO; rows * cols];
        for (c, col) in data.chunks_exact(rows).enumerate() {
            for (r, &x) in col.iter().enumerate() {
                adj[r * cols + c] = x.conj();
            }
        }
        let mut g = vec![T::ZERO; rows * rows];
        T::adjoint_product(cols, &adj, rows, &adj, rows, &mut g);
        (rows, g)
    }
}

fn hermitian_apply<T: Scalar>(dim: usize, g: &[T], v: &[T], out: &mut [T]) {
    for (o, row) in out.iter_mut().zip(g.chunks_exact(dim)) {
        let mut acc = T::ZERO;
        for (&a, &x) in row.iter().zip(v) {
            acc += a * x;
        }
        *o = acc;
    }
}

fn largest_eigenvalue<T: Scalar>(dim: usize, g: &[T], tol: f64, start: impl Fn(usize) -> T) -> f64 {
    let mut v: Vec<T> = (0..dim).map(start).collect();
    let nv = norm_sqr(&v).sqrt();
    for x in v.iter_mut() {
        *x = x.scale(1.0 / nv);
    }
    let mut w = vec![T::ZERO; dim];
    let mut rho_prev = f64::NEG_INFINITY;
    let mut delta_prev = f64::INFINITY;
    let mut rho = 0.0;
    for _ in 0..POWER_MAX_ITERS {
        hermitian_apply(dim, g, &v, &mut w);
        rho = dot_conj(&v, &w).to_complex().re;
        let nw = norm_sqr(&w).sqrt();
        if nw == 0.0 {
            return 0.0;
        }
        for (x, &y) in v.iter_mut().zip(&w) {
            *x = y.scale(1.0 / nw);
        }
        let delta = rho - rho_prev;
        // Rayleigh quotients of a PSD power iteration are nondecreasing;
        // with geometric convergence ratio q the remaining error is about
        // delta·q/(1−q).
        if delta <= 8.0 * f64::EPSILON * rho.abs() {
            break;
        }
        let q = delta / delta_prev;
        if q.is_finite() && q > 0.0 && q < 1.0 && delta * q / (1.0 - q) <= tol * rho {
            break;
        }
        rho_prev = rho;
        delta_prev = delta;
    }
    rho.max(0.0)
}

fn spectral_generic<T: Gemm>(rows: usize, cols: usize, data: &[T], tol: f64, lift: fn(f64, f64) -> T) -> f64 {
    let (dim, g) = small_gram(rows, cols, data);
    let mut rng = rng::Normal::new(rng::stream(POWER_SEED, dim as u64));
    let start: Vec<T> = (0..dim).map(|_| lift(rng.sample(), rng.sample())).collect();
    largest_eigenvalue(dim, &g, tol, |i| start[i]).sqrt()
}

/// Largest singular value `‖F‖₂`, by power iteration on the smaller Gram
/// operator from a fixed-seed random start.
pub fn spectral_norm(frame: &Frame, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(FrameError::invalid("tol", "must be positive"));
    }
    Ok(match &frame.data {
        FrameData::Real(d) => spectral_generic(frame.rows, frame.cols, d, tol, |a, _| a),
        FrameData::Complex(d) => {
            spectral_generic(frame.rows, frame.cols, d, tol, Complex64::new)
        }
    })
}

/// The three coherence parameters with the Strong Coherence Property verdicts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceReport {
    pub mu: f64,
    pub nu: f64,
    pub spectral_norm: f64,
    /// `μ ≤ 1 / (164 ln N)`.
    pub scp1: bool,
    /// `ν ≤ μ / √M`.
    pub scp2: bool,
}

impl CoherenceReport {
    /// Fills in the verdicts from already-measured parameters.
    pub fn from_parts(rows: usize, cols: usize, mu: f64, nu: f64, spectral_norm: f64) -> Self {
        CoherenceReport {
            mu,
            nu,
            spectral_norm,
            scp1: mu <= scp1_threshold(cols),
            scp2: nu <= mu / (rows as f64).sqrt(),
        }
    }

    pub fn scp(&self) -> bool {
        self.scp1 && self.scp2
    }

    pub const CSV_HEADER: &'static str = "mu,nu,spectral_norm,scp1,scp2";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            crate::fmt::sig12(self.mu),
            crate::fmt::sig12(self.nu),
            crate::fmt::sig12(self.spectral_norm),
            self.scp1,
            self.scp2
        )
    }
}

/// Right-hand side of SCP-1, `1 / (164 ln N)` (natural log).
pub fn scp1_threshold(cols: usize) -> f64 {
    1.0 / (164.0 * (cols as f64).ln())
}

pub fn scp_check(frame: &Frame) -> Result<CoherenceReport> {
    let mu = worst_case_coherence(frame)?;
    let nu = average_coherence(frame)?;
    let norm = spectral_norm(frame, SPECTRAL_TOLERANCE)?;
    Ok(CoherenceReport::from_parts(frame.rows, frame.cols, mu, nu, norm))
}

impl fmt::Display for CoherenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = |b: bool| if b { "pass" } else { "fail" };
        writeln!(f, "mu            = {:.12}", self.mu)?;
        writeln!(f, "nu            = {:.12}", self.nu)?;
        writeln!(f, "spectral_norm = {:.12}", self.spectral_norm)?;
        writeln!(f, "norm_sq       = {:.12}", self.spectral_norm * self.spectral_norm)?;
        writeln!(f, "SCP-1 (mu <= 1/(164 ln N)) : {}", verdict(self.scp1))?;
        write!(f, "SCP-2 (nu <= mu/sqrt(M))   : {}", verdict(self.scp2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx_eq::close;

    mod approx_eq {
        pub fn close(a: f64, b: f64, tol: f64) -> bool {
            (a - b).abs() <= tol
        }
    }

    pub(crate) fn mercedes_benz() -> Frame {
        let angles = [90.0f64, 210.0, 330.0];
        let data = angles
            .iter()
            .flat_map(|a| {
                let r = a.to_radians();
                [r.cos(), r.sin()]
            })
            .collect();
        Frame::from_real(2, 3, data).unwrap()
    }

    #[test]
    fn identity_gram_is_identity() {
        let g = gram(&Frame::identity(3));
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_eq!(g.get(i, j), Complex64::new(want, 0.0));
            }
        }
    }

    #[test]
    fn mercedes_benz_geometry() {
        let f = mercedes_benz();
        let g = gram(&f);
        for i in 0..3 {
            assert!(close(g.get(i, i).re, 1.0, 1e-12));
            for j in 0..3 {
                if i != j {
                    assert!(close(g.get(i, j).re, -0.5, 1e-12));
                }
            }
        }
        assert!(close(worst_case_coherence(&f).unwrap(), 0.5, 1e-12));
        assert!(close(average_coherence(&f).unwrap(), 0.5, 1e-12));
        let s = spectral_norm(&f, 1e-12).unwrap();
        assert!(close(s, 1.5f64.sqrt(), 1e-9), "{s}");
    }

    #[test]
    fn orthonormal_basis_is_incoherent() {
        let f = Frame::identity(5);
        let r = scp_check(&f).unwrap();
        assert_eq!(r.mu, 0.0);
        assert_eq!(r.nu, 0.0);
        assert!(close(r.spectral_norm, 1.0, 1e-12));
        assert!(r.scp1 && r.scp2);
    }

    #[test]
    fn single_vector_is_rejected() {
        let f = Frame::from_real(3, 1, vec![1.0, 2.0, 2.0]).unwrap();
        assert!(matches!(worst_case_coherence(&f), Err(FrameError::SingleVector)));
        assert!(matches!(average_coherence(&f), Err(FrameError::SingleVector)));
        assert!(scp_check(&f).is_err());
        assert_eq!(
            FrameError::SingleVector.to_string(),
            "coherence undefined for a single vector"
        );
    }

    #[test]
    fn constructors_normalize_and_reject_zero_columns() {
        let f = Frame::from_real(2, 2, vec![3.0, 4.0, 0.0, -2.0]).unwrap();
        for (a, b) in f.as_real().unwrap().iter().zip([0.6, 0.8, 0.0, -1.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(matches!(
            Frame::from_real(2, 2, vec![1.0, 0.0, 0.0, 0.0]),
            Err(FrameError::ZeroColumn(1))
        ));
        assert!(matches!(
            Frame::from_real(2, 2, vec![1.0; 3]),
            Err(FrameError::DimensionMismatch { expected: 4, actual: 3 })
        ));
    }

    #[test]
    fn unit_columns_are_left_untouched() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let data = vec![h, h, h, -h];
        let f = Frame::from_real(2, 2, data.clone()).unwrap();
        assert_eq!(f.as_real().unwrap(), data.as_slice());
    }

    #[test]
    fn full_dft_is_tight_and_incoherent() {
        let n = 8;
        let data: Vec<Complex64> = (0..n)
            .flat_map(|l| {
                (0..n).map(move |k| {
                    Complex64::from_polar(1.0, std::f64::consts::TAU * ((k * l) % n) as f64 / n as f64)
                })
            })
            .collect();
        let f = Frame::from_complex(n, n, data).unwrap();
        assert!(worst_case_coherence(&f).unwrap() < 1e-12);
        assert!(close(spectral_norm(&f, 1e-12).unwrap(), 1.0, 1e-9));
    }

    #[test]
    fn bad_tolerance_is_rejected() {
        assert!(spectral_norm(&Frame::identity(2), 0.0).is_err());
        assert!(spectral_norm(&Frame::identity(2), f64::NAN).is_err());
    }

    #[test]
    fn apply_and_adjoint_are_consistent() {
        let f = mercedes_benz();
        let x = vec![
            Complex64::new(1.0, 0.5),
            Complex64::new(-2.0, 0.0),
            Complex64::new(0.0, 1.0),
        ];
        let y = vec![Complex64::new(0.3, -1.0), Complex64::new(2.0, 0.25)];
        let fx = f.apply(&x).unwrap();
        let fhy = f.adjoint_apply(&y).unwrap();
        // ⟨Fx, y⟩ = ⟨x, Fᴴy⟩ with ⟨a, b⟩ = bᴴa
        let lhs: Complex64 = fx.iter().zip(&y).map(|(a, b)| a * b.conj()).sum();
        let rhs: Complex64 = x.iter().zip(&fhy).map(|(a, b)| a * b.conj()).sum();
        assert!((lhs - rhs).norm() < 1e-12);
    }
}
