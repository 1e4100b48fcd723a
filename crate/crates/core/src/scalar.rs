//! Scalar types a [`FieldSet`](crate::grid::FieldSet) can hold.
//!
//! Real fields drive ordinary time-domain runs; complex fields are needed
//! for Bloch-periodic boundaries with a nonzero phase shift.

use num_complex::Complex64;
use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

pub trait FieldScalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Default
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + Mul<f64, Output = Self>
    + MulAssign<f64>
    + 'static
{
    const IS_COMPLEX: bool;

    fn zero() -> Self {
        Self::default()
    }

    fn from_real(v: f64) -> Self;

    fn to_complex(self) -> Complex64;

    /// Narrow a complex value. Real scalars keep only the real part.
    fn from_complex(v: Complex64) -> Self;

    /// Multiply by a complex phase factor. For real scalars the factor must
    /// be real; callers validate this before building a real-valued solver.
    fn mul_phase(self, phase: Complex64) -> Self;

    fn norm_sqr(self) -> f64;

    /// `Re(conj(self) * other)`, the real part of the Hermitian product.
    fn dot_re(self, other: Self) -> f64;

    fn is_finite(self) -> bool;
}

impl FieldScalar for f64 {
    const IS_COMPLEX: bool = false;

    #[inline]
    fn from_real(v: f64) -> Self {
        v
    }

    #[inline]
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }

    #[inline]
    fn from_complex(v: Complex64) -> Self {
        v.re
    }

    #[inline]
    fn mul_phase(self, phase: Complex64) -> Self {
        self * phase.re
    }

    #[inline]
    fn norm_sqr(self) -> f64 {
        self * self
    }

    #[inline]
    fn dot_re(self, other: Self) -> f64 {
        self * other
    }

    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl FieldScalar for Complex64 {
    const IS_COMPLEX: bool = true;

    #[inline]
    fn from_real(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }

    #[inline]
    fn to_complex(self) -> Complex64 {
        self
    }

    #[inline]
    fn from_complex(v: Complex64) -> Self {
        v
    }

    #[inline]
    fn mul_phase(self, phase: Complex64) -> Self {
        self * phase
    }

    #[inline]
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }

    #[inline]
    fn dot_re(self, other: Self) -> f64 {
        self.re * other.re + self.im * other.im
    }

    #[inline]
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}
