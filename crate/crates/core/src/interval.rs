//! Closed intervals with rational endpoints.
//!
//! Every operation returns an interval containing all values the exact
//! operation could produce from points of the operands. No floating point is
//! involved, so the enclosures are certified by construction.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, bit_size};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CertifiedInterval {
    lo: BigRational,
    hi: BigRational,
}

impl CertifiedInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidArgument(format!("interval endpoints out of order: [{lo}, {hi}]")));
        }
        Ok(CertifiedInterval { lo, hi })
    }

    pub fn point(x: BigRational) -> Self {
        CertifiedInterval { lo: x.clone(), hi: x }
    }

    /// Smallest interval containing both endpoints, in either order.
    pub fn hull(a: BigRational, b: BigRational) -> Self {
        if a <= b {
            CertifiedInterval { lo: a, hi: b }
        } else {
            CertifiedInterval { lo: b, hi: a }
        }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &Self) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Certainly `self < other` for every pair of represented values.
    pub fn certainly_lt(&self, other: &Self) -> bool {
        self.hi < other.lo
    }

    pub fn certainly_gt(&self, other: &Self) -> bool {
        other.certainly_lt(self)
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        (lo <= hi).then_some(CertifiedInterval { lo, hi })
    }

    pub fn join(&self, other: &Self) -> Self {
        CertifiedInterval { lo: (&self.lo).min(&other.lo).clone(), hi: (&self.hi).max(&other.hi).clone() }
    }

    pub fn recip(&self) -> Result<Self> {
        if self.contains_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(CertifiedInterval { lo: self.hi.recip(), hi: self.lo.recip() })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.recip()?)
    }

    pub fn square(&self) -> Self {
        let a = &self.lo * &self.lo;
        let b = &self.hi * &self.hi;
        if self.contains_zero() {
            CertifiedInterval { lo: BigRational::zero(), hi: a.max(b) }
        } else {
            Self::hull(a, b)
        }
    }

    pub fn add_scalar(&self, x: &BigRational) -> Self {
        CertifiedInterval { lo: &self.lo + x, hi: &self.hi + x }
    }

    pub fn scale(&self, x: &BigRational) -> Self {
        Self::hull(&self.lo * x, &self.hi * x)
    }

    /// Distance bound `max |v - x|` over the interval.
    pub fn max_distance(&self, x: &BigRational) -> BigRational {
        (&self.lo - x).abs().max((&self.hi - x).abs())
    }

    /// Widens the endpoints to multiples of `2^-bits` when they have grown
    /// larger than that, keeping numerators bounded in long computations.
    pub fn round_outward(&self, bits: u32) -> Self {
        if bit_size(&self.lo).max(bit_size(&self.hi)) <= 2 * bits as u64 {
            return self.clone();
        }
        CertifiedInterval { lo: rational::floor_to_bits(&self.lo, bits), hi: rational::ceil_to_bits(&self.hi, bits) }
    }

    /// Both endpoints with `digits` fractional decimals, rounded outward.
    pub fn to_decimal(&self, digits: u32) -> (String, String) {
        (rational::to_decimal_directed(&self.lo, digits, false), rational::to_decimal_directed(&self.hi, digits, true))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (rational::to_f64(&self.lo), rational::to_f64(&self.hi))
    }

    pub fn unit() -> Self {
        Self::point(BigRational::one())
    }
}

impl From<BigRational> for CertifiedInterval {
    fn from(x: BigRational) -> Self {
        Self::point(x)
    }
}

impl Add for &CertifiedInterval {
    type Output = CertifiedInterval;
    fn add(self, rhs: Self) -> CertifiedInterval {
        CertifiedInterval { lo: &self.lo + &rhs.lo, hi: &self.hi + &rhs.hi }
    }
}

impl Sub for &CertifiedInterval {
    type Output = CertifiedInterval;
    fn sub(self, rhs: Self) -> CertifiedInterval {
        CertifiedInterval { lo: &self.lo - &rhs.hi, hi: &self.hi - &rhs.lo }
    }
}

impl Mul for &CertifiedInterval {
    type Output = CertifiedInterval;
    fn mul(self, rhs: Self) -> CertifiedInterval {
        if !self.lo.is_negative() && !rhs.lo.is_negative() {
            return CertifiedInterval { lo: &self.lo * &rhs.lo, hi: &self.hi * &rhs.hi };
        }
        let c = [&self.lo * &rhs.lo, &self.lo * &rhs.hi, &self.hi * &rhs.lo, &self.hi * &rhs.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        CertifiedInterval { lo, hi }
    }
}

impl Neg for &CertifiedInterval {
    type Output = CertifiedInterval;
    fn neg(self) -> CertifiedInterval {
        CertifiedInterval { lo: -&self.hi, hi: -&self.lo }
    }
}

impl fmt::Display for CertifiedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.to_decimal(12);
        write!(f, "[{lo}, {hi}]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use proptest::prelude::*;

    fn iv(a: i64, b: i64, q: i64) -> CertifiedInterval {
        CertifiedInterval::new(ratio(a, q), ratio(b, q)).unwrap()
    }

    #[test]
    fn rejects_reversed_endpoints() {
        assert!(CertifiedInterval::new(ratio(1, 2), ratio(1, 3)).is_err());
    }

    #[test]
    fn division_by_interval_containing_zero_fails() {
        assert_eq!(iv(1, 2, 1).div(&iv(-1, 1, 1)), Err(Error::DivisionByZero));
    }

    #[test]
    fn square_of_straddling_interval() {
        let s = iv(-2, 3, 1).square();
        assert_eq!(s, iv(0, 9, 1));
    }

    #[test]
    fn outward_rounding_contains_original() {
        let x = CertifiedInterval::new(ratio(1, 3), ratio(2, 3)).unwrap();
        let r = x.round_outward(1);
        assert!(r.contains_interval(&x));
    }

    proptest! {
        #[test]
        fn ops_enclose_pointwise(a in -50i64..50, b in 0i64..50, c in -50i64..50, d in 0i64..50,
                                 t in 0i64..=10, u in 0i64..=10) {
            let x = iv(a, a + b, 7);
            let y = iv(c, c + d, 5);
            let px = ratio(a * 10 + b * t, 70);
            let py = ratio(c * 10 + d * u, 50);
            prop_assert!((&x + &y).contains(&(&px + &py)));
            prop_assert!((&x - &y).contains(&(&px - &py)));
            prop_assert!((&x * &y).contains(&(&px * &py)));
            if !y.contains_zero() {
                prop_assert!(x.div(&y).unwrap().contains(&(&px / &py)));
            }
        }
    }
}
