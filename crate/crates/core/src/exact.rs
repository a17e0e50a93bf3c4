//! Exact scalars: reduced rationals and quadratic surds `(p + s√d) / r`.
//!
//! Surds are kept in a canonical form (squarefree `d > 1`, `r > 0`,
//! `gcd(p, s, r) = 1`, `s != 0`) so that structural equality is value
//! equality. Arithmetic is closed over a single radicand; mixing `√2` with
//! `√5` is rejected rather than silently leaving the field.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::interval::CertifiedInterval;
use crate::rational::{self, pow10, pow2};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    p: BigInt,
    s: BigInt,
    d: BigInt,
    r: BigInt,
}

impl Surd {
    pub fn p(&self) -> &BigInt {
        &self.p
    }
    pub fn s(&self) -> &BigInt {
        &self.s
    }
    pub fn d(&self) -> &BigInt {
        &self.d
    }
    pub fn r(&self) -> &BigInt {
        &self.r
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExactNumber {
    Rational(BigRational),
    Surd(Surd),
}

/// Splits `d` into `f^2 * k` with `k` squarefree.
fn square_part(d: &BigInt) -> (BigInt, BigInt) {
    let mut rem = d.clone();
    let mut f = BigInt::one();
    let mut k = BigInt::one();
    let mut i = BigInt::from(2u32);
    while &i * &i * &i <= rem {
        let mut e = 0u32;
        while (&rem % &i).is_zero() {
            rem /= &i;
            e += 1;
        }
        if e > 0 {
            f *= num_traits::pow(i.clone(), (e / 2) as usize);
            if e % 2 == 1 {
                k *= &i;
            }
        }
        i += if i == BigInt::from(2u32) { 1u32 } else { 2u32 };
    }
    // `rem` now has at most two prime factors, both above the cube root.
    let root = rem.sqrt();
    if &root * &root == rem && rem > BigInt::one() {
        f *= root;
    } else {
        k *= rem;
    }
    (f, k)
}

impl ExactNumber {
    pub fn from_int(n: i64) -> Self {
        ExactNumber::Rational(rational::int(n))
    }

    pub fn from_ratio(p: i64, q: i64) -> Self {
        ExactNumber::Rational(rational::ratio(p, q))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    /// Builds `(p + s√d) / r`, canonicalizing. Square radicands collapse to
    /// rationals.
    pub fn surd(p: BigInt, s: BigInt, d: BigInt, r: BigInt) -> Result<Self> {
        if r.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if !d.is_positive() {
            return Err(Error::Domain(format!("radicand must be positive, got {d}")));
        }
        let (f, k) = square_part(&d);
        let s = s * f;
        if s.is_zero() {
            return Ok(ExactNumber::Rational(BigRational::new(p, r)));
        }
        if k.is_one() {
            return Ok(ExactNumber::Rational(BigRational::new(p + s, r)));
        }
        let g = p.gcd(&s).gcd(&r);
        let (mut p, mut s, mut r) = (p / &g, s / &g, r / &g);
        if r.is_negative() {
            p = -p;
            s = -s;
            r = -r;
        }
        Ok(ExactNumber::Surd(Surd { p, s, d: k, r }))
    }

    /// `a + b√d` from rational coordinates.
    fn from_parts(a: BigRational, b: BigRational, d: Option<&BigInt>) -> Self {
        match d {
            Some(d) if !b.is_zero() => {
                let r = a.denom().lcm(b.denom());
                let p = a.numer() * (&r / a.denom());
                let s = b.numer() * (&r / b.denom());
                let g = p.gcd(&s).gcd(&r);
                ExactNumber::Surd(Surd { p: p / &g, s: s / &g, d: d.clone(), r: r / &g })
            }
            _ => ExactNumber::Rational(a),
        }
    }

    /// Coordinates `(a, b, d)` with value `a + b√d`.
    fn parts(&self) -> (BigRational, BigRational, Option<&BigInt>) {
        match self {
            ExactNumber::Rational(q) => (q.clone(), BigRational::zero(), None),
            ExactNumber::Surd(s) => {
                (BigRational::new(s.p.clone(), s.r.clone()), BigRational::new(s.s.clone(), s.r.clone()), Some(&s.d))
            }
        }
    }

    pub fn radicand(&self) -> Option<&BigInt> {
        match self {
            ExactNumber::Rational(_) => None,
            ExactNumber::Surd(s) => Some(&s.d),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ExactNumber::Rational(q) => Some(q),
            ExactNumber::Surd(_) => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, ExactNumber::Rational(_))
    }

    fn common_radicand<'a>(&'a self, other: &'a Self) -> Result<Option<&'a BigInt>> {
        match (self.radicand(), other.radicand()) {
            (Some(a), Some(b)) if a != b => Err(Error::MixedRadicand(a.to_string(), b.to_string())),
            (Some(a), _) => Ok(Some(a)),
            (None, b) => Ok(b),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let d = self.common_radicand(other)?;
        let (a1, b1, _) = self.parts();
        let (a2, b2, _) = other.parts();
        Ok(Self::from_parts(a1 + a2, b1 + b2, d))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let d = self.common_radicand(other)?;
        let (a1, b1, _) = self.parts();
        let (a2, b2, _) = other.parts();
        let dd = d.map(|d| BigRational::from_integer(d.clone())).unwrap_or_else(BigRational::zero);
        let a = &a1 * &a2 + &b1 * &b2 * dd;
        let b = a1 * b2 + a2 * b1;
        Ok(Self::from_parts(a, b, d))
    }

    pub fn recip(&self) -> Result<Self> {
        let (a, b, d) = self.parts();
        let dd = d.map(|d| BigRational::from_integer(d.clone())).unwrap_or_else(BigRational::zero);
        let norm = &a * &a - &b * &b * dd;
        if norm.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::from_parts(a / &norm, -b / norm, d))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.recip()?)
    }

    pub fn neg(&self) -> Self {
        match self {
            ExactNumber::Rational(q) => ExactNumber::Rational(-q),
            ExactNumber::Surd(s) => ExactNumber::Surd(Surd { p: -&s.p, s: -&s.s, d: s.d.clone(), r: s.r.clone() }),
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            ExactNumber::Rational(_) => self.clone(),
            ExactNumber::Surd(s) => ExactNumber::Surd(Surd { p: s.p.clone(), s: -&s.s, d: s.d.clone(), r: s.r.clone() }),
        }
    }

    pub fn add_rational(&self, q: &BigRational) -> Self {
        let (a, b, d) = self.parts();
        Self::from_parts(a + q, b, d)
    }

    pub fn mul_rational(&self, q: &BigRational) -> Self {
        let (a, b, d) = self.parts();
        Self::from_parts(a * q, b * q, d)
    }

    pub fn signum(&self) -> Sign {
        let (a, b, d) = self.parts();
        let Some(d) = d else {
            return a.numer().sign();
        };
        let sa = a.numer().sign();
        let sb = b.numer().sign();
        if sa == sb || sa == Sign::NoSign {
            return sb;
        }
        // a and b have opposite signs: compare a^2 with b^2 d.
        let lhs = &a * &a;
        let rhs = &b * &b * BigRational::from_integer(d.clone());
        if lhs > rhs {
            sa
        } else {
            sb
        }
    }

    /// Exact floor.
    pub fn floor(&self) -> BigInt {
        match self {
            ExactNumber::Rational(q) => q.floor().to_integer(),
            ExactNumber::Surd(s) => {
                // floor((p + s√d)/r) with √(s²d) irrational.
                let n = &s.s * &s.s * &s.d;
                let root = n.sqrt();
                let top = if s.s.is_positive() { &s.p + root } else { &s.p - root - 1 };
                top.div_floor(&s.r)
            }
        }
    }

    pub fn ceil(&self) -> BigInt {
        match self {
            ExactNumber::Rational(q) => q.ceil().to_integer(),
            ExactNumber::Surd(_) => self.floor() + 1,
        }
    }

    /// Rational enclosure of width at most `2^-bits` (degenerate for rationals).
    pub fn enclose(&self, bits: u32) -> CertifiedInterval {
        let (a, b, d) = self.parts();
        let Some(d) = d else {
            return CertifiedInterval::point(a);
        };
        let extra = (b.numer().bits() + 1) as u32;
        let k = bits + extra + 1;
        let root = (d * num_traits::pow(pow2(k), 2)).sqrt();
        let lo = BigRational::new(root.clone(), pow2(k));
        let hi = BigRational::new(root + 1, pow2(k));
        let (l, h) = if b.is_positive() { (&b * lo, &b * hi) } else { (&b * hi, &b * lo) };
        CertifiedInterval::new(&a + l, a + h).expect("ordered")
    }

    pub fn to_f64(&self) -> f64 {
        let (a, b, d) = self.parts();
        match d {
            None => rational::to_f64(&a),
            Some(d) => rational::to_f64(&a) + rational::to_f64(&b) * d.to_f64().unwrap_or(f64::NAN).sqrt(),
        }
    }

    /// `digits` fractional decimals, truncated toward zero.
    pub fn to_decimal(&self, digits: u32) -> String {
        let scaled = self.mul_rational(&BigRational::from_integer(pow10(digits)));
        let negative = self.signum() == Sign::Minus;
        let t = if negative { scaled.ceil() } else { scaled.floor() };
        rational::format_scaled(&t, digits, negative)
    }
}

impl PartialOrd for ExactNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.sub(other) {
            Ok(diff) => match diff.signum() {
                Sign::Minus => Ordering::Less,
                Sign::NoSign => Ordering::Equal,
                Sign::Plus => Ordering::Greater,
            },
            // Different quadratic fields never share an irrational value,
            // so refining enclosures always separates them.
            Err(_) => {
                let mut bits = 64;
                loop {
                    let a = self.enclose(bits);
                    let b = other.enclose(bits);
                    if a.hi() < b.lo() {
                        return Ordering::Less;
                    }
                    if b.hi() < a.lo() {
                        return Ordering::Greater;
                    }
                    bits *= 2;
                }
            }
        }
    }
}

impl From<BigRational> for ExactNumber {
    fn from(q: BigRational) -> Self {
        ExactNumber::Rational(q)
    }
}

impl fmt::Display for ExactNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactNumber::Rational(q) => write!(f, "{q}"),
            ExactNumber::Surd(s) => {
                let sign = if s.s.is_negative() { "-" } else { "+" };
                let coeff = s.s.abs();
                let surd = if coeff.is_one() { format!("√{}", s.d) } else { format!("{coeff}√{}", s.d) };
                if s.r.is_one() {
                    write!(f, "{} {sign} {surd}", s.p)
                } else {
                    write!(f, "({} {sign} {surd})/{}", s.p, s.r)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn canonical_form_is_unique() {
        let x = ExactNumber::surd(b(-5), b(1), b(45), b(10)).unwrap();
        let y = ExactNumber::surd(b(-10), b(6), b(5), b(20)).unwrap();
        assert_eq!(x, y);
        assert_eq!(x.radicand(), Some(&b(5)));
        let z = ExactNumber::surd(b(1), b(-1), b(2), b(-1)).unwrap();
        assert_eq!(z, ExactNumber::surd(b(-1), b(1), b(2), b(1)).unwrap());
    }

    #[test]
    fn square_radicand_collapses() {
        let x = ExactNumber::surd(b(1), b(1), b(9), b(2)).unwrap();
        assert_eq!(x, ExactNumber::from_int(2));
    }

    #[test]
    fn field_arithmetic() {
        let r5 = ExactNumber::surd(b(0), b(1), b(5), b(1)).unwrap();
        let sq = r5.mul(&r5).unwrap();
        assert_eq!(sq, ExactNumber::from_int(5));
        let golden = ExactNumber::surd(b(1), b(1), b(5), b(2)).unwrap();
        // phi^2 = phi + 1
        assert_eq!(golden.mul(&golden).unwrap(), golden.add(&ExactNumber::from_int(1)).unwrap());
        // 1/phi = phi - 1
        assert_eq!(golden.recip().unwrap(), golden.sub(&ExactNumber::from_int(1)).unwrap());
        let r2 = ExactNumber::surd(b(0), b(1), b(2), b(1)).unwrap();
        assert!(matches!(r5.add(&r2), Err(Error::MixedRadicand(..))));
        assert!(ExactNumber::zero().recip().is_err());
    }

    #[test]
    fn sign_and_order() {
        let x = ExactNumber::surd(b(-2), b(1), b(5), b(1)).unwrap(); // 0.236
        assert_eq!(x.signum(), Sign::Plus);
        assert_eq!(x.neg().signum(), Sign::Minus);
        let y = ExactNumber::surd(b(-3), b(1), b(5), b(1)).unwrap(); // -0.76
        assert!(y < x);
        let r2 = ExactNumber::surd(b(0), b(1), b(2), b(1)).unwrap();
        let r3 = ExactNumber::surd(b(0), b(1), b(3), b(1)).unwrap();
        assert!(r2 < r3);
    }

    #[test]
    fn floor_and_decimal() {
        let a = ExactNumber::surd(b(-5), b(1), b(45), b(10)).unwrap();
        assert_eq!(a.floor(), b(0));
        assert_eq!(a.to_decimal(6), "0.170820");
        let neg = a.neg();
        assert_eq!(neg.floor(), b(-1));
        assert_eq!(neg.to_decimal(4), "-0.1708");
        assert_eq!(ExactNumber::from_ratio(-1, 3).to_decimal(3), "-0.333");
    }

    #[test]
    fn enclosure_contains_value() {
        let a = ExactNumber::surd(b(-5), b(1), b(45), b(10)).unwrap();
        let e = a.enclose(100);
        assert!(e.width() <= BigRational::new(b(1), pow2(100)));
        let f = e.midpoint();
        assert!((rational::to_f64(&f) - 0.170_820_393_249_936_9).abs() < 1e-15);
    }
}
