use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::rational::BigRational;
use num::traits::ToPrimitive;
use num::Zero;

/// Arithmetic the solvers need, implemented by `f64` (fast path) and
/// [`BigRational`] (exact certification path).
///
/// `pivot_tol` is the threshold below which a value is treated as zero
/// during pivoting; it is exactly zero for rationals.
pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn pivot_tol() -> Self;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn is_negligible(&self) -> bool {
        self.abs() <= Self::pivot_tol()
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn pivot_tol() -> Self {
        1e-11
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        num::One::one()
    }
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite float")
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).expect("rational fits in f64 range")
    }
    fn pivot_tol() -> Self {
        Zero::zero()
    }
}
