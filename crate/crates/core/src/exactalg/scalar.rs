//! The scalar abstraction shared by every algebraic layer.
//!
//! A [`Scalar`] is an element of a commutative *local* ring: exact rationals and doubles are
//! fields, while jets and truncated multivariate series are local rings whose units are the
//! elements with an invertible constant term. All linear algebra in this crate pivots on units,
//! so the same elimination code works over every backend.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rat = BigRational;

/// Pivot tolerance of the float backend.
pub const FLOAT_PIVOT_TOL: f64 = 1e-10;
/// Zero test tolerance of the float backend.
pub const FLOAT_ZERO_TOL: f64 = 1e-9;

pub trait Scalar:
    Clone
    + fmt::Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rat(r: &Rat) -> Self;

    fn from_i64(v: i64) -> Self {
        Self::from_rat(&Rat::from_integer(BigInt::from(v)))
    }

    /// Exact zero for exact backends; tolerance-based for floats.
    fn is_zero(&self) -> bool;

    /// Invertible in the ring.
    fn is_unit(&self) -> bool;

    fn inv(&self) -> Option<Self>;

    /// Principal `k`-th root of a unit. Exact backends return `None` when the root of the
    /// base value is irrational.
    fn root(&self, k: u32) -> Option<Self>;

    /// Value at the base point, as a double (used for pivot scoring and sign decisions).
    fn base_f64(&self) -> f64;

    /// Sign of the base value: -1, 0 or 1.
    fn base_sign(&self) -> i32 {
        if !self.is_unit() {
            0
        } else if self.base_f64() < 0.0 {
            -1
        } else {
            1
        }
    }

    fn div(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|r| self.clone() * r)
    }

    fn scale_rat(&self, r: &Rat) -> Self {
        self.clone() * Self::from_rat(r)
    }
}

/// Exact `k`-th root of a rational, if it exists.
pub fn rat_root(r: &Rat, k: u32) -> Option<Rat> {
    if k == 0 {
        return None;
    }
    if Zero::is_zero(r) {
        return Some(<Rat as Zero>::zero());
    }
    if r.is_negative() && k % 2 == 0 {
        return None;
    }
    let root_int = |x: &BigInt| -> Option<BigInt> {
        let neg = x.is_negative();
        let a = x.abs();
        let c = a.nth_root(k);
        if num_traits::pow(c.clone(), k as usize) == a {
            Some(if neg { -c } else { c })
        } else {
            None
        }
    };
    Some(Rat::new(root_int(r.numer())?, root_int(r.denom())?))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // very large numerator/denominator: scale both down first
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
            let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

impl Scalar for Rat {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        !Zero::is_zero(self)
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn root(&self, k: u32) -> Option<Self> {
        rat_root(self, k)
    }
    fn base_f64(&self) -> f64 {
        rat_to_f64(self)
    }
    fn base_sign(&self) -> i32 {
        if Zero::is_zero(self) {
            0
        } else if self.is_negative() {
            -1
        } else {
            1
        }
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_rat(r: &Rat) -> Self {
        rat_to_f64(r)
    }
    fn is_zero(&self) -> bool {
        self.abs() <= FLOAT_ZERO_TOL
    }
    fn is_unit(&self) -> bool {
        self.abs() > FLOAT_PIVOT_TOL
    }
    fn inv(&self) -> Option<Self> {
        if self.is_unit() {
            Some(1.0 / self)
        } else {
            None
        }
    }
    fn root(&self, k: u32) -> Option<Self> {
        if *self < 0.0 {
            if k % 2 == 0 {
                None
            } else {
                Some(-(-self).powf(1.0 / k as f64))
            }
        } else {
            Some(self.powf(1.0 / k as f64))
        }
    }
    fn base_f64(&self) -> f64 {
        *self
    }
}

/// `n!` as a rational.
pub fn factorial(n: usize) -> Rat {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    Rat::from_integer(acc)
}

/// Binomial coefficient as a rational.
pub fn binomial(n: usize, k: usize) -> Rat {
    if k > n {
        return <Rat as Zero>::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_roots() {
        assert_eq!(rat_root(&rat(16, 81), 4), Some(rat(2, 3)));
        assert_eq!(rat_root(&rat(-8, 27), 3), Some(rat(-2, 3)));
        assert_eq!(rat_root(&rat(2, 1), 2), None);
        assert_eq!(rat_root(&rat(-4, 1), 2), None);
    }

    #[test]
    fn rat_is_reduced() {
        let r = rat(6, -4);
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(rat(0, 5), <Rat as Zero>::zero());
        assert_eq!(rat(0, 5).denom(), &BigInt::from(1));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), rat_int(10));
        assert_eq!(binomial(3, 4), rat_int(0));
    }
}
