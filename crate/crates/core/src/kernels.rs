//! Dense products behind the Gram computations.
//!
//! Everything here is single-threaded and deterministic; callers
//! parallelize over independent output blocks.

use num_complex::Complex64;

use crate::scalar::Scalar;

pub(crate) trait Gemm: Scalar {
    /// `out[i * n + j] = a_iᴴ b_j`, where `a` holds `m` columns and `b`
    /// holds `n` columns, each of length `k`, column-major.
    fn adjoint_product(k: usize, a: &[Self], m: usize, b: &[Self], n: usize, out: &mut [Self]);
}

impl Gemm for f64 {
    fn adjoint_product(k: usize, a: &[f64], m: usize, b: &[f64], n: usize, out: &mut [f64]) {
        assert!(a.len() >= k * m && b.len() >= k * n && out.len() >= m * n);
        if m == 0 || n == 0 {
            return;
        }
        // SAFETY: the asserted lengths cover every stride below.
        unsafe {
            matrixmultiply::dgemm(
                m,
                k,
                n,
                1.0,
                a.as_ptr(),
                k as isize,
                1,
                b.as_ptr(),
                1,
                k as isize,
                0.0,
                out.as_mut_ptr(),
                n as isize,
                1,
            );
        }
    }
}

impl Gemm for Complex64 {
    fn adjoint_product(
        k: usize,
        a: &[Complex64],
        m: usize,
        b: &[Complex64],
        n: usize,
        out: &mut [Complex64],
    ) {
        assert!(a.len() >= k * m && b.len() >= k * n && out.len() >= m * n);
        if m == 0 || n == 0 {
            return;
        }
        let conj_a: Vec<[f64; 2]> = a[..k * m].iter().map(|z| [z.re, -z.im]).collect();
        // SAFETY: Complex64 is repr(C) { re, im }, layout-identical to [f64; 2];
        // the asserted lengths cover every stride below.
        unsafe {
            matrixmultiply::zgemm(
                matrixmultiply::CGemmOption::Standard,
                matrixmultiply::CGemmOption::Standard,
                m,
                k,
                n,
                [1.0, 0.0],
                conj_a.as_ptr(),
                k as isize,
                1,
                b.as_ptr() as *const [f64; 2],
                1,
                k as isize,
                [0.0, 0.0],
                out.as_mut_ptr() as *mut [f64; 2],
                n as isize,
                1,
            );
        }
    }
}
