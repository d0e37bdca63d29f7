use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

/// Element type of frame storage. Real frames use `f64` so that the hot
/// loops skip the imaginary arithmetic entirely.
pub trait Scalar:
    Copy
    + Send
    + Sync
    + PartialEq
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + 'static
{
    const ZERO: Self;
    const ONE: Self;

    fn conj(self) -> Self;
    fn norm_sqr(self) -> f64;
    fn modulus(self) -> f64;
    fn scale(self, s: f64) -> Self;
    fn to_complex(self) -> Complex64;
}

impl Scalar for f64 {
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;

    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn norm_sqr(self) -> f64 {
        self * self
    }
    #[inline]
    fn modulus(self) -> f64 {
        self.abs()
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        self * s
    }
    #[inline]
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Scalar for Complex64 {
    const ZERO: Self = Complex64::new(0.0, 0.0);
    const ONE: Self = Complex64::new(1.0, 0.0);

    #[inline]
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    #[inline]
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
    #[inline]
    fn modulus(self) -> f64 {
        self.norm()
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        self * s
    }
    #[inline]
    fn to_complex(self) -> Complex64 {
        self
    }
}

/// `aᴴ b` for two equal-length slices.
#[inline]
pub fn dot_conj<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = T::ZERO;
    for (&x, &y) in a.iter().zip(b) {
        acc += x.conj() * y;
    }
    acc
}

#[inline]
pub fn norm_sqr<T: Scalar>(a: &[T]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}
