//! The subsequence of convergent denominators satisfying Legendre's condition
//! `|α - p/q| < 1/(2q²)`, and the classification of consecutive pairs.
//!
//! The test uses `q_ν |q_ν α - p_ν| = 1 / (α_{ν+1} + α*_ν)`, which turns the
//! condition into the certified comparison `α_{ν+1} + α*_ν > 2`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use crate::cf::{self, CfExpansion, ConvergentTable, DEFAULT_MAX_DEPTH};
use crate::error::{Error, Result};
use crate::exact::ExactNumber;
use crate::rational;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LegendreSequence {
    indices: Vec<usize>,
    denominators: Vec<BigInt>,
}

impl LegendreSequence {
    /// Selected convergent indices `ν_0 < ν_1 < ...`.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// `Q_n = q_{ν_n}`.
    pub fn denominators(&self) -> &[BigInt] {
        &self.denominators
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    fn push(&mut self, nu: usize, q: BigInt) -> Result<()> {
        if let Some(&last) = self.indices.last() {
            if nu - last > 2 {
                return Err(Error::MalformedSequence(format!(
                    "convergents {} and {} both fail the Legendre condition",
                    last + 1,
                    nu - 1
                )));
            }
        } else if nu > 2 {
            return Err(Error::MalformedSequence("convergents 1 and 2 both fail the Legendre condition".into()));
        }
        self.indices.push(nu);
        self.denominators.push(q);
        Ok(())
    }
}

/// How `(Q_n, Q_{n+1})` sits among the convergents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairClass {
    /// `(Q_n, Q_{n+1}) = (q_ν, q_{ν+1})`.
    Consecutive(usize),
    /// `(Q_n, Q_{n+1}) = (q_{ν-1}, q_{ν+1})`.
    Skip(usize),
}

impl PairClass {
    pub fn nu(self) -> usize {
        match self {
            PairClass::Consecutive(nu) | PairClass::Skip(nu) => nu,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PairClass::Consecutive(_) => "consecutive",
            PairClass::Skip(_) => "skip",
        }
    }
}

pub fn legendre_test(cf: &CfExpansion, nu: usize) -> Result<bool> {
    let table = cf::convergents(cf, nu)?;
    legendre_test_with(cf, &table, nu, DEFAULT_MAX_DEPTH)
}

/// Legendre test at `ν` with a precomputed convergent table covering `ν`.
pub fn legendre_test_with(cf: &CfExpansion, table: &ConvergentTable, nu: usize, max_depth: usize) -> Result<bool> {
    if nu == 0 {
        return Err(Error::InvalidArgument("the Legendre test starts at ν = 1".into()));
    }
    if cf.is_rational() {
        return Err(Error::Domain("the Legendre test needs an irrational expansion".into()));
    }
    let threshold = rational::int(2) - cf::reversed_tail_from(table, nu)?;
    let exhausted_at = |detail: String| Error::PrecisionExhausted { index: nu, detail };
    let mut depth = 4usize;
    loop {
        let (enc, exhausted) = match cf::tail_at_depth(cf, nu + 1, depth) {
            Ok(r) => r,
            Err(Error::Exhausted(_)) => return Err(exhausted_at("no partial quotients after ν".into())),
            Err(e) => return Err(e),
        };
        if enc.lo() > &threshold {
            return Ok(true);
        }
        if enc.hi() <= &threshold {
            return Ok(false);
        }
        if cf.is_periodic() {
            let tail = cf::surd_of_periodic(&cf.shifted(nu + 1)?)?;
            return Ok(tail > ExactNumber::Rational(threshold));
        }
        if exhausted || depth >= max_depth {
            return Err(exhausted_at(format!("α_(ν+1) + α*_ν straddles 2 after {depth} quotients")));
        }
        depth = (depth * 2).min(max_depth);
    }
}

/// Selected indices `1 <= ν <= ν_max`.
pub fn legendre_sequence(cf: &CfExpansion, nu_max: usize) -> Result<LegendreSequence> {
    if nu_max < 2 {
        return Err(Error::InvalidArgument("ν_max must be at least 2".into()));
    }
    let (seq, err) = legendre_prefix(cf, nu_max, DEFAULT_MAX_DEPTH)?;
    match err {
        Some(e) => Err(e),
        None => Ok(seq),
    }
}

/// Like [`legendre_sequence`], but stops at the first undecidable index and
/// returns what was certified so far together with the error.
pub fn legendre_prefix(cf: &CfExpansion, nu_max: usize, max_depth: usize) -> Result<(LegendreSequence, Option<Error>)> {
    let mut table = ConvergentTable::default();
    let mut seq = LegendreSequence::default();
    for nu in 1..=nu_max {
        if let Err(e) = table.extend_to(cf, nu) {
            return Ok((seq, Some(e)));
        }
        match legendre_test_with(cf, &table, nu, max_depth) {
            Ok(true) => seq.push(nu, table.q(nu).clone())?,
            Ok(false) => {}
            Err(e @ Error::PrecisionExhausted { .. }) => return Ok((seq, Some(e))),
            Err(e) => return Err(e),
        }
    }
    Ok((seq, None))
}

pub fn classify_pairs(seq: &LegendreSequence) -> Result<Vec<PairClass>> {
    if seq.len() < 2 {
        return Err(Error::InvalidArgument("need at least two selected convergents".into()));
    }
    seq.indices
        .windows(2)
        .map(|w| match w[1] - w[0] {
            1 => Ok(PairClass::Consecutive(w[0])),
            2 => Ok(PairClass::Skip(w[0] + 1)),
            g => Err(Error::MalformedSequence(format!("index gap {g} between {} and {}", w[0], w[1]))),
        })
        .collect()
}

/// Indices `ν < ν_max` where both `ν` and `ν + 1` fail the Legendre test.
/// Vahlen's theorem says there are none.
pub fn vahlen_violations(cf: &CfExpansion, nu_max: usize) -> Result<Vec<usize>> {
    let table = cf::convergents(cf, nu_max)?;
    let passes = (1..=nu_max).map(|nu| legendre_test_with(cf, &table, nu, DEFAULT_MAX_DEPTH)).collect::<Result<Vec<bool>>>()?;
    Ok((1..nu_max).filter(|&nu| !passes[nu - 1] && !passes[nu]).collect())
}

/// Direct check of `|α q - p| < 1/(2q)` from an enclosure of `α` itself.
/// Independent of the tail identity; returns `None` when undecided.
pub fn legendre_direct(cf: &CfExpansion, table: &ConvergentTable, nu: usize, width: &BigRational) -> Result<Option<bool>> {
    let alpha = cf::value_enclosure(cf, width)?;
    let q = BigRational::from_integer(table.q(nu).clone());
    let p = BigRational::from_integer(table.p(nu).clone());
    let err = alpha.scale(&q).add_scalar(&-p);
    let bound = (rational::int(2) * q).recip();
    let lo = if err.contains_zero() { rational::int(0) } else { err.lo().abs().min(err.hi().abs()) };
    let hi = err.lo().abs().max(err.hi().abs());
    Ok(if hi < bound {
        Some(true)
    } else if lo >= bound {
        Some(false)
    } else {
        None
    })
}
