//! Field abstraction shared by real and complex dictionaries.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Sub};

use faer::traits::ComplexField;
use num_complex::Complex64;

/// Element type of a lifted vector.
///
/// Real dictionaries run in `f64`; the exponential trigonometric basis runs
/// in `Complex64`. Everything in the encoding pipeline is generic over this.
pub trait Scalar:
    ComplexField<Real = f64>
    + Copy
    + Send
    + Sync
    + Debug
    + Default
    + PartialEq
    + Add<Output = Self>
    + AddAssign
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Mul<f64, Output = Self>
    + 'static
{
    const IS_REAL_FIELD: bool;

    fn from_re(re: f64) -> Self;
    fn from_c64(z: Complex64) -> Self;
    fn to_c64(self) -> Complex64;
    fn re(self) -> f64;
    fn im(self) -> f64;
    fn conjugate(self) -> Self;
    fn abs_sq(self) -> f64;

    fn modulus(self) -> f64 {
        self.abs_sq().sqrt()
    }

    fn finite(self) -> bool {
        self.re().is_finite() && self.im().is_finite()
    }
}

impl Scalar for f64 {
    const IS_REAL_FIELD: bool = true;

    #[inline]
    fn from_re(re: f64) -> Self {
        re
    }
    #[inline]
    fn from_c64(z: Complex64) -> Self {
        z.re
    }
    #[inline]
    fn to_c64(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    #[inline]
    fn re(self) -> f64 {
        self
    }
    #[inline]
    fn im(self) -> f64 {
        0.0
    }
    #[inline]
    fn conjugate(self) -> Self {
        self
    }
    #[inline]
    fn abs_sq(self) -> f64 {
        self * self
    }
}

impl Scalar for Complex64 {
    const IS_REAL_FIELD: bool = false;

    #[inline]
    fn from_re(re: f64) -> Self {
        Complex64::new(re, 0.0)
    }
    #[inline]
    fn from_c64(z: Complex64) -> Self {
        z
    }
    #[inline]
    fn to_c64(self) -> Complex64 {
        self
    }
    #[inline]
    fn re(self) -> f64 {
        self.re
    }
    #[inline]
    fn im(self) -> f64 {
        self.im
    }
    #[inline]
    fn conjugate(self) -> Self {
        self.conj()
    }
    #[inline]
    fn abs_sq(self) -> f64 {
        self.norm_sqr()
    }
}
