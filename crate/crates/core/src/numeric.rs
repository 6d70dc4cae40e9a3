//! Scalar abstraction shared by the simplex solver and the exact oracles.
//!
//! `f64` compares against a fixed tolerance; `BigRational` is exact.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub const F64_TOLERANCE: f64 = 1e-10;

pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    /// Exact conversion for rationals (the binary value of the float).
    fn from_f64(value: f64) -> Self;
    fn from_ratio(num: u64, den: u64) -> Self;
    fn from_rational(value: &BigRational) -> Self;
    fn as_f64(&self) -> f64;
    /// Exact textual form (`p/q` for rationals).
    fn exact_string(&self) -> String;
    /// Strictly positive beyond the tolerance of the type.
    fn is_pos(&self) -> bool;
    /// Strictly negative beyond the tolerance of the type.
    fn is_neg(&self) -> bool;

    fn is_negligible(&self) -> bool {
        !self.is_pos() && !self.is_neg()
    }

    fn abs_val(&self) -> Self {
        if self.is_neg() || *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn pow_u(&self, exp: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(value: f64) -> Self {
        value
    }
    fn from_ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }
    fn from_rational(value: &BigRational) -> Self {
        ToPrimitive::to_f64(value).unwrap_or(f64::NAN)
    }
    fn as_f64(&self) -> f64 {
        *self
    }
    fn exact_string(&self) -> String {
        self.to_string()
    }
    fn is_pos(&self) -> bool {
        *self > F64_TOLERANCE
    }
    fn is_neg(&self) -> bool {
        *self < -F64_TOLERANCE
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_f64(value: f64) -> Self {
        BigRational::from_float(value).expect("finite float")
    }
    fn from_ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn from_rational(value: &BigRational) -> Self {
        value.clone()
    }
    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn exact_string(&self) -> String {
        self.to_string()
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
}

/// `ln(n!)` via a running sum; exact enough for sample-size formulas.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Binomial coefficient as u64; panics on overflow (only used for n <= 64).
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial overflow")
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}
