//! Continued fraction expansions `[a0; a1, a2, ...]`.
//!
//! An expansion is backed by a finite digit list (a rational), an eventually
//! periodic list (a quadratic irrational), a known prefix of an irrational
//! whose continuation is not known, or a replayable digit generator.
//!
//! Tails `α_ν = [a_ν; a_{ν+1}, ...]` are enclosed by composing the digit maps
//! exactly and substituting `a_k < α_k < a_k + 1` at a cutoff depth, which is
//! doubled until the requested width is reached.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::ExactNumber;
use crate::interval::CertifiedInterval;
use crate::mobius::Mobius;

pub type Digit = u64;

/// Digit source for generator-backed expansions; index `i >= 1`.
pub type DigitFn = Arc<dyn Fn(usize) -> Digit + Send + Sync>;

/// Refinement cap for tail enclosures, counted in partial quotients.
pub const DEFAULT_MAX_DEPTH: usize = 1000;

#[derive(Clone)]
pub enum Digits {
    Finite(Vec<Digit>),
    Periodic {
        pre: Vec<Digit>,
        period: Vec<Digit>,
    },
    /// Known prefix of an irrational; later quotients are unknown.
    Prefix(Vec<Digit>),
    Generator(DigitFn),
}

#[derive(Clone)]
pub struct CfExpansion {
    a0: BigInt,
    digits: Digits,
}

fn check_digits(digits: &[Digit], offset: usize) -> Result<()> {
    match digits.iter().position(|&d| d == 0) {
        Some(i) => Err(Error::NonPositiveDigit { position: offset + i + 1, value: "0".into() }),
        None => Ok(()),
    }
}

impl CfExpansion {
    pub fn finite(a0: impl Into<BigInt>, digits: Vec<Digit>) -> Result<Self> {
        check_digits(&digits, 0)?;
        Ok(CfExpansion { a0: a0.into(), digits: Digits::Finite(digits) })
    }

    pub fn periodic(a0: impl Into<BigInt>, pre: Vec<Digit>, period: Vec<Digit>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        check_digits(&pre, 0)?;
        check_digits(&period, pre.len())?;
        Ok(CfExpansion { a0: a0.into(), digits: Digits::Periodic { pre, period } })
    }

    pub fn prefix(a0: impl Into<BigInt>, digits: Vec<Digit>) -> Result<Self> {
        check_digits(&digits, 0)?;
        Ok(CfExpansion { a0: a0.into(), digits: Digits::Prefix(digits) })
    }

    /// Generator-backed expansion. `f(i)` must be `>= 1` for every `i >= 1`
    /// and must return the same value on every call.
    pub fn from_fn(a0: impl Into<BigInt>, f: impl Fn(usize) -> Digit + Send + Sync + 'static) -> Self {
        CfExpansion { a0: a0.into(), digits: Digits::Generator(Arc::new(f)) }
    }

    pub fn a0(&self) -> &BigInt {
        &self.a0
    }

    pub fn digits(&self) -> &Digits {
        &self.digits
    }

    /// Partial quotient `a_i` for `i >= 1`, if known.
    pub fn digit(&self, i: usize) -> Option<Digit> {
        if i == 0 {
            return None;
        }
        match &self.digits {
            Digits::Finite(d) | Digits::Prefix(d) => d.get(i - 1).copied(),
            Digits::Periodic { pre, period } => {
                Some(if i <= pre.len() { pre[i - 1] } else { period[(i - 1 - pre.len()) % period.len()] })
            }
            Digits::Generator(f) => Some(f(i)),
        }
    }

    /// `a_i` including `a_0`.
    pub fn term(&self, i: usize) -> Result<Option<BigInt>> {
        if i == 0 {
            return Ok(Some(self.a0.clone()));
        }
        match self.digit(i) {
            Some(0) => Err(Error::NonPositiveDigit { position: i, value: "0".into() }),
            Some(d) => Ok(Some(BigInt::from(d))),
            None => Ok(None),
        }
    }

    /// Number of known partial quotients after `a0`; `None` if unbounded.
    pub fn known_len(&self) -> Option<usize> {
        match &self.digits {
            Digits::Finite(d) | Digits::Prefix(d) => Some(d.len()),
            _ => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.digits, Digits::Finite(_))
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.digits, Digits::Periodic { .. })
    }

    pub fn is_truncated(&self) -> bool {
        matches!(self.digits, Digits::Prefix(_))
    }

    /// The expansion of `α_k = [a_k; a_{k+1}, ...]` for `k >= 1`.
    pub fn shifted(&self, k: usize) -> Result<CfExpansion> {
        if k == 0 {
            return Ok(self.clone());
        }
        let a = self.term(k)?.ok_or(Error::Exhausted(k))?;
        let digits = match &self.digits {
            Digits::Finite(d) => Digits::Finite(d[k..].to_vec()),
            Digits::Prefix(d) => Digits::Prefix(d[k..].to_vec()),
            Digits::Periodic { pre, period } => {
                if k <= pre.len() {
                    Digits::Periodic { pre: pre[k..].to_vec(), period: period.clone() }
                } else {
                    let off = (k - pre.len()) % period.len();
                    let mut rot = period[off..].to_vec();
                    rot.extend_from_slice(&period[..off]);
                    Digits::Periodic { pre: Vec::new(), period: rot }
                }
            }
            Digits::Generator(f) => {
                let f = Arc::clone(f);
                Digits::Generator(Arc::new(move |j| f(k + j)))
            }
        };
        Ok(CfExpansion { a0: a, digits })
    }
}

impl fmt::Debug for CfExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CfExpansion({self})")
    }
}

// ---------------------------------------------------------------------------
// Literal grammar: "[a0; d1, d2, ...]" with an optional final "(p1, ..., pk)"
// period block, or a final "..." marking a truncated prefix.

const GENERATOR_PREVIEW: usize = 32;

impl fmt::Display for CfExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |d: &[Digit]| d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match &self.digits {
            Digits::Finite(d) if d.is_empty() => write!(f, "[{}]", self.a0),
            Digits::Finite(d) => write!(f, "[{};{}]", self.a0, join(d)),
            Digits::Prefix(d) if d.is_empty() => write!(f, "[{};...]", self.a0),
            Digits::Prefix(d) => write!(f, "[{};{},...]", self.a0, join(d)),
            Digits::Periodic { pre, period } if pre.is_empty() => write!(f, "[{};({})]", self.a0, join(period)),
            Digits::Periodic { pre, period } => write!(f, "[{};{},({})]", self.a0, join(pre), join(period)),
            Digits::Generator(_) => {
                let d: Vec<Digit> = (1..=GENERATOR_PREVIEW).filter_map(|i| self.digit(i)).collect();
                write!(f, "[{};{},...]", self.a0, join(&d))
            }
        }
    }
}

fn parse_digit_list(text: &str, offset: usize) -> Result<Vec<Digit>> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .enumerate()
        .map(|(i, tok)| {
            let v: BigInt = tok.parse().map_err(|_| Error::Parse(format!("bad partial quotient {tok:?}")))?;
            if !v.is_positive() {
                return Err(Error::NonPositiveDigit { position: offset + i + 1, value: v.to_string() });
            }
            v.to_u64().ok_or_else(|| Error::Parse(format!("partial quotient {v} too large")))
        })
        .collect()
}

/// Parses a continued fraction literal (whitespace insensitive).
pub fn cf_parse(text: &str) -> Result<CfExpansion> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let inner = s
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected [a0; ...], got {text:?}")))?;
    let (head, body) = inner.split_once(';').unwrap_or((inner, ""));
    let a0: BigInt = head.parse().map_err(|_| Error::Parse(format!("bad a0 {head:?}")))?;

    if let Some(open) = body.find('(') {
        let close = body.rfind(')').ok_or_else(|| Error::Parse("unclosed period block".into()))?;
        if close != body.len() - 1 || close < open {
            return Err(Error::Parse("period block must close the literal".into()));
        }
        let pre_text = &body[..open];
        let pre_text = match pre_text.strip_suffix(',') {
            Some(p) => p,
            None if pre_text.is_empty() => pre_text,
            None => return Err(Error::Parse("missing comma before period block".into())),
        };
        let pre = parse_digit_list(pre_text, 0)?;
        let period_text = &body[open + 1..close];
        if period_text.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        let period = parse_digit_list(period_text, pre.len())?;
        return CfExpansion::periodic(a0, pre, period);
    }
    if body.contains(')') {
        return Err(Error::Parse("unmatched ')'".into()));
    }
    if let Some(rest) = body.strip_suffix("...") {
        let rest = rest.strip_suffix(',').unwrap_or(rest);
        return CfExpansion::prefix(a0, parse_digit_list(rest, 0)?);
    }
    CfExpansion::finite(a0, parse_digit_list(body, 0)?)
}

pub fn cf_format(cf: &CfExpansion) -> String {
    cf.to_string()
}

impl FromStr for CfExpansion {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        cf_parse(s)
    }
}

// ---------------------------------------------------------------------------
// Convergents

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergentRow {
    pub a: BigInt,
    pub p: BigInt,
    pub q: BigInt,
}

/// Rows `ν = 0..=ν_max` of `(a_ν, p_ν, q_ν)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConvergentTable {
    rows: Vec<ConvergentRow>,
}

impl ConvergentTable {
    pub fn rows(&self) -> &[ConvergentRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn p(&self, nu: usize) -> &BigInt {
        &self.rows[nu].p
    }

    pub fn q(&self, nu: usize) -> &BigInt {
        &self.rows[nu].q
    }

    /// `q_{ν-1}` with the convention `q_{-1} = 0`.
    pub fn q_prev(&self, nu: usize) -> BigInt {
        if nu == 0 {
            BigInt::zero()
        } else {
            self.rows[nu - 1].q.clone()
        }
    }

    pub fn p_prev(&self, nu: usize) -> BigInt {
        if nu == 0 {
            BigInt::one()
        } else {
            self.rows[nu - 1].p.clone()
        }
    }

    /// `p_ν q_{ν-1} - p_{ν-1} q_ν`.
    pub fn determinant(&self, nu: usize) -> BigInt {
        self.p(nu) * self.q_prev(nu) - self.p_prev(nu) * self.q(nu)
    }

    /// Extends the table through row `upto`.
    pub fn extend_to(&mut self, cf: &CfExpansion, upto: usize) -> Result<()> {
        while self.rows.len() <= upto {
            let nu = self.rows.len();
            let a = cf.term(nu)?.ok_or(Error::Exhausted(nu))?;
            let (p2, q2) = if nu >= 2 {
                (self.rows[nu - 2].p.clone(), self.rows[nu - 2].q.clone())
            } else if nu == 1 {
                (BigInt::one(), BigInt::zero())
            } else {
                (BigInt::zero(), BigInt::one())
            };
            let (p1, q1) = if nu >= 1 {
                (self.rows[nu - 1].p.clone(), self.rows[nu - 1].q.clone())
            } else {
                (BigInt::one(), BigInt::zero())
            };
            let p = &a * &p1 + p2;
            let q = &a * &q1 + q2;
            self.rows.push(ConvergentRow { a, p, q });
        }
        Ok(())
    }
}

pub fn convergents(cf: &CfExpansion, upto: usize) -> Result<ConvergentTable> {
    let mut t = ConvergentTable::default();
    t.extend_to(cf, upto)?;
    Ok(t)
}

// ---------------------------------------------------------------------------
// Tails

/// Enclosure of `α_ν` using partial quotients `ν .. ν+depth`. The flag is
/// true when no further refinement is possible (known digits ran out).
pub(crate) fn tail_at_depth(cf: &CfExpansion, nu: usize, depth: usize) -> Result<(CertifiedInterval, bool)> {
    let mut m = Mobius::identity();
    for k in nu..nu + depth {
        match cf.term(k)? {
            Some(a) => m = m.compose(&Mobius::digit(&a)),
            None => return end_of_digits(cf, nu, k, &m),
        }
    }
    let k = nu + depth;
    match cf.term(k)? {
        Some(a) => {
            let lo = BigRational::from_integer(a);
            let hi = &lo + BigRational::one();
            Ok((m.image(&lo, Some(&hi))?, false))
        }
        None => end_of_digits(cf, nu, k, &m),
    }
}

fn end_of_digits(cf: &CfExpansion, nu: usize, k: usize, m: &Mobius) -> Result<(CertifiedInterval, bool)> {
    if k == nu {
        return Err(Error::Exhausted(nu));
    }
    match cf.digits {
        // α_ν = [a_ν; ..., a_N] exactly.
        Digits::Finite(_) => Ok((CertifiedInterval::point(m.at_infinity()?), true)),
        // α_{N+1} ∈ [1, ∞) for an unknown continuation.
        Digits::Prefix(_) => Ok((m.image(&BigRational::one(), None)?, true)),
        _ => unreachable!("infinite expansions never run out"),
    }
}

/// Enclosure of `α_ν` of width at most `width`.
pub fn tail_value(cf: &CfExpansion, nu: usize, width: &BigRational) -> Result<CertifiedInterval> {
    tail_value_with(cf, nu, width, DEFAULT_MAX_DEPTH)
}

pub fn tail_value_with(cf: &CfExpansion, nu: usize, width: &BigRational, max_depth: usize) -> Result<CertifiedInterval> {
    if !width.is_positive() {
        return Err(Error::InvalidArgument("width must be positive".into()));
    }
    let mut depth = 8usize.min(max_depth.max(1));
    loop {
        let (enc, exhausted) = tail_at_depth(cf, nu, depth)?;
        if &enc.width() <= width || (exhausted && enc.is_point()) {
            return Ok(enc);
        }
        if exhausted || depth >= max_depth {
            return Err(Error::PrecisionExhausted {
                index: nu,
                detail: format!("tail enclosure width {} after {depth} quotients", enc.width()),
            });
        }
        depth = (depth * 2).min(max_depth);
    }
}

/// Enclosure of `α` itself.
pub fn value_enclosure(cf: &CfExpansion, width: &BigRational) -> Result<CertifiedInterval> {
    tail_value(cf, 0, width)
}

/// `α*_ν = [0; a_ν, a_{ν-1}, ..., a_1] = q_{ν-1} / q_ν`.
pub fn reversed_tail(cf: &CfExpansion, nu: usize) -> Result<BigRational> {
    let t = convergents(cf, nu)?;
    reversed_tail_from(&t, nu)
}

pub fn reversed_tail_from(table: &ConvergentTable, nu: usize) -> Result<BigRational> {
    if nu == 0 {
        return Err(Error::InvalidArgument("reversed tail needs ν >= 1".into()));
    }
    if nu >= table.len() {
        return Err(Error::Exhausted(nu));
    }
    Ok(BigRational::new(table.q_prev(nu), table.q(nu).clone()))
}

// ---------------------------------------------------------------------------
// Periodic expansions as exact surds

/// Exact value of an eventually periodic expansion.
pub fn surd_of_periodic(cf: &CfExpansion) -> Result<ExactNumber> {
    let Digits::Periodic { pre, period } = &cf.digits else {
        return Err(Error::NotPeriodic);
    };
    // y = [p1; p2, ..., pL, y] solves c y² + (d - a) y - b = 0 with y > 1.
    let m = period.iter().fold(Mobius::identity(), |m, &p| m.compose(&Mobius::digit(&BigInt::from(p))));
    let two_c = BigInt::from(2) * &m.c;
    let disc = (&m.a - &m.d) * (&m.a - &m.d) + BigInt::from(4) * &m.b * &m.c;
    let y = ExactNumber::surd(&m.a - &m.d, BigInt::one(), disc, two_c)?;
    let outer = std::iter::once(cf.a0.clone())
        .chain(pre.iter().map(|&d| BigInt::from(d)))
        .fold(Mobius::identity(), |m, a| m.compose(&Mobius::digit(&a)));
    outer.apply_exact(&y)
}

/// `a0` and the first `count` partial quotients of an exact number (fewer if
/// it is rational and the expansion terminates).
pub fn digits_of(x: &ExactNumber, count: usize) -> Result<(BigInt, Vec<Digit>)> {
    let a0 = x.floor();
    let mut frac = x.add_rational(&BigRational::from_integer(-a0.clone()));
    let mut out = Vec::with_capacity(count);
    while out.len() < count && frac != ExactNumber::zero() {
        let inv = frac.recip()?;
        let d = inv.floor();
        out.push(d.to_u64().ok_or_else(|| Error::Domain(format!("partial quotient {d} too large")))?);
        frac = inv.add_rational(&BigRational::from_integer(-d));
    }
    Ok((a0, out))
}
