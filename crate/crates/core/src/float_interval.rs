//! `f64` intervals with outward rounding.
//!
//! Each operation rounds to nearest and then steps the endpoints one ulp
//! outward, which covers the half-ulp rounding error. This is the fast
//! certified substrate for scans over millions of gaps or grid cells.

use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;

use crate::interval::CertifiedInterval;
use crate::rational;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FloatInterval {
    pub lo: f64,
    pub hi: f64,
}

#[inline]
fn down(x: f64) -> f64 {
    x.next_down()
}

#[inline]
fn up(x: f64) -> f64 {
    x.next_up()
}

impl FloatInterval {
    /// An exactly representable point.
    pub const fn exact(x: f64) -> Self {
        FloatInterval { lo: x, hi: x }
    }

    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "[{lo}, {hi}]");
        FloatInterval { lo, hi }
    }

    /// Outer `f64` enclosure of a rational interval.
    pub fn from_certified(x: &CertifiedInterval) -> Self {
        let mut lo = rational::to_f64(x.lo());
        let mut hi = rational::to_f64(x.hi());
        // Conversion may be off by an ulp or two; step out generously.
        for _ in 0..4 {
            lo = down(lo);
            hi = up(hi);
        }
        FloatInterval { lo, hi }
    }

    pub fn from_rational(x: &BigRational) -> Self {
        Self::from_certified(&CertifiedInterval::point(x.clone()))
    }

    pub fn to_certified(self) -> CertifiedInterval {
        CertifiedInterval::new(rational::from_f64(self.lo), rational::from_f64(self.hi)).expect("ordered")
    }

    pub fn width(self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains_zero(self) -> bool {
        self.lo <= 0.0 && self.hi >= 0.0
    }

    pub fn is_positive(self) -> bool {
        self.lo > 0.0
    }

    pub fn is_negative(self) -> bool {
        self.hi < 0.0
    }

    pub fn recip(self) -> Option<Self> {
        if self.contains_zero() {
            return None;
        }
        Some(FloatInterval { lo: down(1.0 / self.hi), hi: up(1.0 / self.lo) })
    }

    pub fn checked_div(self, other: Self) -> Option<Self> {
        if other.contains_zero() {
            return None;
        }
        let c = [self.lo / other.lo, self.lo / other.hi, self.hi / other.lo, self.hi / other.hi];
        Some(FloatInterval { lo: down(min4(c)), hi: up(max4(c)) })
    }

    pub fn square(self) -> Self {
        let a = self.lo * self.lo;
        let b = self.hi * self.hi;
        if self.contains_zero() {
            FloatInterval { lo: 0.0, hi: up(a.max(b)) }
        } else {
            FloatInterval { lo: down(a.min(b)), hi: up(a.max(b)) }
        }
    }

    pub fn abs(self) -> Self {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            -self
        } else {
            FloatInterval { lo: 0.0, hi: (-self.lo).max(self.hi) }
        }
    }

    pub fn min(self, other: Self) -> Self {
        FloatInterval { lo: self.lo.min(other.lo), hi: self.hi.min(other.hi) }
    }

    pub fn max(self, other: Self) -> Self {
        FloatInterval { lo: self.lo.max(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn join(self, other: Self) -> Self {
        FloatInterval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn certainly_lt(self, other: Self) -> bool {
        self.hi < other.lo
    }
}

fn min4(c: [f64; 4]) -> f64 {
    c[0].min(c[1]).min(c[2].min(c[3]))
}

fn max4(c: [f64; 4]) -> f64 {
    c[0].max(c[1]).max(c[2].max(c[3]))
}

impl Add for FloatInterval {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        FloatInterval { lo: down(self.lo + rhs.lo), hi: up(self.hi + rhs.hi) }
    }
}

impl Sub for FloatInterval {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        FloatInterval { lo: down(self.lo - rhs.hi), hi: up(self.hi - rhs.lo) }
    }
}

impl Mul for FloatInterval {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        if self.lo >= 0.0 && rhs.lo >= 0.0 {
            return FloatInterval { lo: down(self.lo * rhs.lo), hi: up(self.hi * rhs.hi) };
        }
        let c = [self.lo * rhs.lo, self.lo * rhs.hi, self.hi * rhs.lo, self.hi * rhs.hi];
        FloatInterval { lo: down(min4(c)), hi: up(max4(c)) }
    }
}

impl Neg for FloatInterval {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        FloatInterval { lo: -self.hi, hi: -self.lo }
    }
}
