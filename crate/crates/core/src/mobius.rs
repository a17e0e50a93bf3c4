//! Integer Möbius maps `x ↦ (a x + b) / (c x + d)` and their interval images.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::ExactNumber;
use crate::interval::CertifiedInterval;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mobius {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl Mobius {
    pub fn identity() -> Self {
        Mobius { a: BigInt::one(), b: BigInt::zero(), c: BigInt::zero(), d: BigInt::one() }
    }

    /// `x ↦ q + 1/x`: one step of a continued fraction read forward.
    pub fn digit(q: &BigInt) -> Self {
        Mobius { a: q.clone(), b: BigInt::one(), c: BigInt::one(), d: BigInt::zero() }
    }

    /// `s ↦ 1/(q + s)`: one step of a `[0; ...]` expansion with a tail in (0, 1).
    pub fn inv_digit(q: u64) -> Self {
        Mobius { a: BigInt::zero(), b: BigInt::one(), c: BigInt::one(), d: BigInt::from(q) }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Mobius) -> Mobius {
        Mobius {
            a: &self.a * &other.a + &self.b * &other.c,
            b: &self.a * &other.b + &self.b * &other.d,
            c: &self.c * &other.a + &self.d * &other.c,
            d: &self.c * &other.b + &self.d * &other.d,
        }
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn apply(&self, x: &BigRational) -> Result<BigRational> {
        let den = BigRational::from_integer(self.c.clone()) * x + BigRational::from_integer(self.d.clone());
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok((BigRational::from_integer(self.a.clone()) * x + BigRational::from_integer(self.b.clone())) / den)
    }

    /// Value at `+∞`.
    pub fn at_infinity(&self) -> Result<BigRational> {
        if self.c.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(BigRational::new(self.a.clone(), self.c.clone()))
    }

    pub fn apply_exact(&self, x: &ExactNumber) -> Result<ExactNumber> {
        let num = x
            .mul(&ExactNumber::Rational(BigRational::from_integer(self.a.clone())))?
            .add_rational(&BigRational::from_integer(self.b.clone()));
        let den = x
            .mul(&ExactNumber::Rational(BigRational::from_integer(self.c.clone())))?
            .add_rational(&BigRational::from_integer(self.d.clone()));
        num.div(&den)
    }

    /// Image of `[lo, hi]` (with `hi = None` meaning `+∞`). The pole must lie
    /// outside the interval; the map is then monotone on it.
    pub fn image(&self, lo: &BigRational, hi: Option<&BigRational>) -> Result<CertifiedInterval> {
        let den_at = |x: &BigRational| BigRational::from_integer(self.c.clone()) * x + BigRational::from_integer(self.d.clone());
        let s_lo = den_at(lo);
        let (s_hi_sign, y_hi) = match hi {
            Some(h) => (den_at(h).signum(), self.apply(h)),
            None => (BigRational::from_integer(self.c.signum()), self.at_infinity()),
        };
        if s_lo.is_zero() || s_hi_sign.is_zero() || s_lo.signum() != s_hi_sign {
            return Err(Error::Domain("Möbius pole inside interval".into()));
        }
        Ok(CertifiedInterval::hull(self.apply(lo)?, y_hi?))
    }

    /// Image of a certified interval that avoids the pole.
    pub fn image_interval(&self, x: &CertifiedInterval) -> Result<CertifiedInterval> {
        self.image(x.lo(), Some(x.hi()))
    }
}
