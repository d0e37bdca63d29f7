//! C interface to `framecoh`.
//!
//! Frames cross the boundary as opaque `FcFrame` handles owned by the
//! caller and released with [`fc_frame_free`]. Every fallible function
//! returns an [`FcStatus`]; on failure the message is available from
//! [`fc_last_error`] on the same thread. Complex data is passed as
//! interleaved `(re, im)` doubles, column-major.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use num_complex::Complex64;

use framecoh::bounds;
use framecoh::constructions::{
    build_code_frame, build_gaussian, build_harmonic, CodeFrameSpec, GaussianFrameSpec,
    HarmonicFrameSpec,
};
use framecoh::equivalence::{exhaustive_flip_oracle, linear_time_flip};
use framecoh::frame::scp_check;
use framecoh::io::{read_frame, write_frame, Encoding};
use framecoh::ost::{ost_recover, ost_threshold, ThresholdParams};
use framecoh::{Frame, FrameError};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    Parse = 4,
    Io = 5,
    GuardExceeded = 6,
    Undefined = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

/// Opaque frame handle.
pub struct FcFrame {
    inner: Frame,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FcCoherence {
    pub mu: f64,
    pub nu: f64,
    pub spectral_norm: f64,
    pub scp1: bool,
    pub scp2: bool,
}

/// Inputs to [`fc_ost_threshold`]; `t` must lie in (0, 1).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FcThresholdParams {
    pub mu: f64,
    pub rows: usize,
    pub snr: f64,
    pub sigma2: f64,
    pub cols: usize,
    pub t: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &FrameError) -> FcStatus {
    match e {
        FrameError::SingleVector | FrameError::ZeroColumn(_) | FrameError::InvalidParameter { .. } => {
            FcStatus::InvalidArgument
        }
        FrameError::ReduciblePolynomial { .. } | FrameError::Config(_) => FcStatus::InvalidArgument,
        FrameError::DimensionMismatch { .. } => FcStatus::DimensionMismatch,
        FrameError::BoundUndefined(_) => FcStatus::Undefined,
        FrameError::GuardExceeded { .. } => FcStatus::GuardExceeded,
        FrameError::Parse { .. } => FcStatus::Parse,
        FrameError::Io { .. } => FcStatus::Io,
    }
}

struct Fail(FcStatus, String);

impl From<FrameError> for Fail {
    fn from(e: FrameError) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(FcStatus::NullPointer, format!("`{what}` is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> FcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FcStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            FcStatus::Panic
        }
    }
}

unsafe fn frame_ref<'a>(frame: *const FcFrame) -> Result<&'a Frame, Fail> {
    frame.as_ref().map(|f| &f.inner).ok_or_else(|| null("frame"))
}

unsafe fn out_ref<'a, T>(out: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    out.as_mut().ok_or_else(|| null(what))
}

fn into_handle(frame: Frame) -> *mut FcFrame {
    Box::into_raw(Box::new(FcFrame { inner: frame }))
}

unsafe fn path_arg(path: *const c_char) -> Result<String, Fail> {
    if path.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(path)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| Fail(FcStatus::InvalidArgument, "path is not valid UTF-8".into()))
}

unsafe fn complex_slice(data: *const f64, len: usize, what: &str) -> Result<Vec<Complex64>, Fail> {
    if data.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(data, 2 * len)
        .chunks_exact(2)
        .map(|p| Complex64::new(p[0], p[1]))
        .collect())
}

/// Message for the most recent failure on this thread, or null. The
/// pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn fc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

// ---------------------------------------------------------------------------
// Frame handles

/// Builds a real frame from `rows * cols` column-major doubles. Columns
/// are normalized.
///
/// # Safety
/// `data` must point to `rows * cols` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_frame_new_real(
    rows: usize,
    cols: usize,
    data: *const f64,
    out: *mut *mut FcFrame,
) -> FcStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        if data.is_null() {
            return Err(null("data"));
        }
        let len = rows
            .checked_mul(cols)
            .ok_or_else(|| Fail(FcStatus::InvalidArgument, "rows * cols overflows".into()))?;
        let v = slice::from_raw_parts(data, len).to_vec();
        *out = into_handle(Frame::from_real(rows, cols, v)?);
        Ok(())
    })
}

/// Builds a complex frame from `rows * cols` interleaved `(re, im)` pairs.
///
/// # Safety
/// `data` must point to `2 * rows * cols` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_frame_new_complex(
    rows: usize,
    cols: usize,
    data: *const f64,
    out: *mut *mut FcFrame,
) -> FcStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let len = rows
            .checked_mul(cols)
            .ok_or_else(|| Fail(FcStatus::InvalidArgument, "rows * cols overflows".into()))?;
        let v = complex_slice(data, len, "data")?;
        *out = into_handle(Frame::from_complex(rows, cols, v)?);
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_frame_read(path: *const c_char, out: *mut *mut FcFrame) -> FcStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = into_handle(read_frame(path_arg(path)?)?);
        Ok(())
    })
}

/// # Safety
/// `frame` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn fc_frame_write(
    frame: *const FcFrame,
    path: *const c_char,
    binary: bool,
) -> FcStatus {
    guard(|| {
        let f = frame_ref(frame)?;
        let encoding = if binary { Encoding::Binary } else { Encoding::Text };
        write_frame(path_arg(path)?, f, encoding)?;
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `frame` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fc_frame_free(frame: *mut FcFrame) {
    if !frame.is_null() {
        drop(Box::from_raw(frame));
    }
}

/// Row count, or 0 for a null handle.
///
/// # Safety
/// `frame` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_frame_rows(frame: *const FcFrame) -> usize {
    frame.as_ref().map_or(0, |f| f.inner.rows())
}

/// Column count, or 0 for a null handle.
///
/// # Safety
/// `frame` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_frame_cols(frame: *const FcFrame) -> usize {
    frame.as_ref().map_or(0, |f| f.inner.cols())
}

/// # Safety
/// `frame` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_frame_is_complex(frame: *const FcFrame) -> bool {
    frame
        .as_ref()
        .is_some_and(|f| f.inner.as_complex().is_some())
}

/// Copies the entries as interleaved `(re, im)` pairs, column-major.
/// `len` is the capacity of `out` in doubles and must be at least
/// `2 * rows * cols`.
///
/// # Safety
/// `frame` must be a live handle and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fc_frame_copy_data(frame: *const FcFrame, out: *mut f64, len: usize) -> FcStatus {
    guard(|| {
        let f = frame_ref(frame)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let data = f.to_complex_data();
        if len < 2 * data.len() {
            return Err(Fail(
                FcStatus::BufferTooSmall,
                format!("need {} doubles, got {len}", 2 * data.len()),
            ));
        }
        let dst = slice::from_raw_parts_mut(out, 2 * data.len());
        for (pair, z) in dst.chunks_exact_mut(2).zip(data) {
            pair[0] = z.re;
            pair[1] = z.im;
        }
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Constructions

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_build_gaussian(rows: usize, cols: usize, seed: u64, out: *mut *mut FcFrame) -> FcStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = into_handle(build_gaussian(&GaussianFrameSpec::new(rows, cols, seed)?)?);
        Ok(())
    })
}

/// Random harmonic frame from an `n`-point DFT with `m` expected rows.
/// The realized row count is written to `selected_rows` when non-null.
///
/// # Safety
/// `out` must be writable; `selected_rows` may be null.
#[no_mangle]
pub unsafe extern "C" fn fc_build_harmonic(
    n: usize,
    m: usize,
    seed: u64,
    out: *mut *mut FcFrame,
    selected_rows: *mut usize,
) -> FcStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let h = build_harmonic(&HarmonicFrameSpec::new(n, m, seed)?)?;
        if let Some(k) = selected_rows.as_mut() {
            *k = h.selected_rows.len();
        }
        *out = into_handle(h.frame);
        Ok(())
    })
}

/// Code-based frame over GF(2^m) with `t` Gold terms. `poly` of 0 selects
/// the built-in modulus.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_build_code(m: u32, t: u32, poly: u32, out: *mut *mut FcFrame) -> FcStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let mut spec = CodeFrameSpec::new(m, t);
        if poly != 0 {
            spec.irreducible_poly = Some(poly);
        }
        *out = into_handle(build_code_frame(&spec)?);
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Analysis

/// # Safety
/// `frame` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fc_frame_coherence(frame: *const FcFrame, out: *mut FcCoherence) -> FcStatus {
    guard(|| {
        let f = frame_ref(frame)?;
        let out = out_ref(out, "out")?;
        let r = scp_check(f)?;
        *out = FcCoherence {
            mu: r.mu,
            nu: r.nu,
            spectral_norm: r.spectral_norm,
            scp1: r.scp1,
            scp2: r.scp2,
        };
        Ok(())
    })
}

unsafe fn bound_into(out: *mut f64, value: framecoh::Result<f64>) -> FcStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = value?;
        Ok(())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_welch_bound(m: usize, n: usize, out: *mut f64) -> FcStatus {
    bound_into(out, bounds::welch_bound(m, n))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_complex_bound(m: usize, n: usize, out: *mut f64) -> FcStatus {
    bound_into(out, bounds::complex_bound(m, n))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_real_bound(m: usize, n: usize, out: *mut f64) -> FcStatus {
    bound_into(out, bounds::real_bound(m, n))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_bound_3d(n: usize, out: *mut f64) -> FcStatus {
    bound_into(out, bounds::bound_3d(n))
}

// ---------------------------------------------------------------------------
// Flipping

unsafe fn write_signs(signs: &[i8], out: *mut i8, len: usize) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("signs"));
    }
    if len < signs.len() {
        return Err(Fail(
            FcStatus::BufferTooSmall,
            format!("need {} signs, got {len}", signs.len()),
        ));
    }
    slice::from_raw_parts_mut(out, signs.len()).copy_from_slice(signs);
    Ok(())
}

/// Greedy flip. Writes the flipped frame to `out` and the `±1` pattern to
/// `signs`, which must hold at least `cols` entries.
///
/// # Safety
/// `frame` must be a live handle, `out` writable and `signs` hold `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn fc_linear_time_flip(
    frame: *const FcFrame,
    out: *mut *mut FcFrame,
    signs: *mut i8,
    len: usize,
) -> FcStatus {
    guard(|| {
        let f = frame_ref(frame)?;
        let out = out_ref(out, "out")?;
        let (g, pattern) = linear_time_flip(f)?;
        write_signs(pattern.signs(), signs, len)?;
        *out = into_handle(g);
        Ok(())
    })
}

/// Exhaustive minimization of ν over sign patterns (at most 24 columns).
///
/// # Safety
/// As for [`fc_linear_time_flip`]; `min_nu` may be null.
#[no_mangle]
pub unsafe extern "C" fn fc_exhaustive_flip(
    frame: *const FcFrame,
    out: *mut *mut FcFrame,
    signs: *mut i8,
    len: usize,
    min_nu: *mut f64,
) -> FcStatus {
    guard(|| {
        let f = frame_ref(frame)?;
        let out = out_ref(out, "out")?;
        let r = exhaustive_flip_oracle(f)?;
        write_signs(r.pattern.signs(), signs, len)?;
        if let Some(nu) = min_nu.as_mut() {
            *nu = r.min_nu;
        }
        *out = into_handle(r.frame);
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// One-step thresholding

/// # Safety
/// `params` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fc_ost_threshold(params: *const FcThresholdParams, out: *mut f64) -> FcStatus {
    guard(|| {
        let p = params.as_ref().ok_or_else(|| null("params"))?;
        let out = out_ref(out, "out")?;
        *out = ost_threshold(&ThresholdParams {
            mu: p.mu,
            rows: p.rows,
            snr: p.snr,
            sigma2: p.sigma2,
            cols: p.cols,
            t: p.t,
        })?;
        Ok(())
    })
}

/// Recovers a sparse signal from `y` (`rows` interleaved complex values).
/// `estimate` receives `cols` interleaved complex values; `support`
/// receives the selected indices in ascending order and must hold `cols`
/// entries. The number selected goes to `support_len`.
///
/// # Safety
/// `frame` must be a live handle, `y` must hold `2 * rows` doubles,
/// `estimate` `2 * cols` doubles and `support` `cols` entries.
#[no_mangle]
pub unsafe extern "C" fn fc_ost_recover(
    frame: *const FcFrame,
    y: *const f64,
    lambda: f64,
    estimate: *mut f64,
    support: *mut usize,
    support_len: *mut usize,
) -> FcStatus {
    guard(|| {
        let f = frame_ref(frame)?;
        let y = complex_slice(y, f.rows(), "y")?;
        if estimate.is_null() {
            return Err(null("estimate"));
        }
        if support.is_null() {
            return Err(null("support"));
        }
        let count = out_ref(support_len, "support_len")?;
        let r = ost_recover(f, &y, lambda)?;
        let est = slice::from_raw_parts_mut(estimate, 2 * f.cols());
        for (pair, z) in est.chunks_exact_mut(2).zip(&r.signal_estimate) {
            pair[0] = z.re;
            pair[1] = z.im;
        }
        slice::from_raw_parts_mut(support, r.support_estimate.len()).copy_from_slice(&r.support_estimate);
        *count = r.support_estimate.len();
        Ok(())
    })
}
