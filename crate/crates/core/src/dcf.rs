//! Minkowski's diagonal continued fraction layer.
//!
//! `μ_α` interpolates `t ↦ ‖Q_n α‖` linearly between consecutive Legendre
//! denominators. The per-pair quantity is
//!
//! ```text
//! m_n(α) = G(α*_ν,     1/α_{ν+2})   if (Q_n, Q_{n+1}) = (q_{ν-1}, q_{ν+1})
//!          F(α*_{ν+1}, 1/α_{ν+2})   if (Q_n, Q_{n+1}) = (q_ν, q_{ν+1})
//!
//! G(x, y) = (x + y + 1) / 4
//! F(x, y) = (1 - xy)² / (4 (1 + xy)(1 - x)(1 - y))
//! ```
//!
//! and `limsup`/`liminf` of `m_n` are estimated over a tail window.

use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::cf::{self, CfExpansion, ConvergentTable, DEFAULT_MAX_DEPTH};
use crate::error::{Error, Result};
use crate::interval::CertifiedInterval;
use crate::legendre::{self, LegendreSequence, PairClass};
use crate::rational::{int, ratio};

// ---------------------------------------------------------------------------
// Kernels

pub fn kernel_g(x: &CertifiedInterval, y: &CertifiedInterval) -> Result<CertifiedInterval> {
    let unit = CertifiedInterval::new(int(0), int(1))?;
    if !unit.contains_interval(x) || !unit.contains_interval(y) {
        return Err(Error::Domain(format!("G expects arguments in [0, 1], got {x} and {y}")));
    }
    Ok((x + y).add_scalar(&int(1)).scale(&ratio(1, 4)))
}

/// `F` at a rational point.
pub fn f_point(x: &BigRational, y: &BigRational) -> Result<BigRational> {
    let one = BigRational::one();
    let xy = x * y;
    let den = int(4) * (&one + &xy) * (&one - x) * (&one - y);
    if den.is_zero() {
        return Err(Error::Domain("F is singular at x = 1 or y = 1".into()));
    }
    let num = (&one - &xy) * (&one - &xy);
    Ok(num / den)
}

/// Numerator of `∂F/∂y` up to a positive factor: `1 - 3x + 3xy - x²y`.
/// `∂F/∂x` is the same with the arguments swapped.
pub fn dfdy_sign_factor(x: &CertifiedInterval, y: &CertifiedInterval) -> CertifiedInterval {
    let xy = x * y;
    let x2y = &x.square() * y;
    let t = &(&xy.scale(&int(3)) - &x.scale(&int(3))) - &x2y;
    t.add_scalar(&int(1))
}

fn sign_of(x: &CertifiedInterval) -> Option<bool> {
    if x.lo().is_positive() {
        Some(true)
    } else if x.hi().is_negative() {
        Some(false)
    } else {
        None
    }
}

fn natural_f(x: &CertifiedInterval, y: &CertifiedInterval) -> Result<CertifiedInterval> {
    let one = CertifiedInterval::unit();
    let xy = x * y;
    let num = (&one - &xy).square();
    let den = &(&(&one + &xy) * &(&one - x)) * &(&one - y);
    num.div(&den.scale(&int(4)))
}

const F_SPLIT_DEPTH: u32 = 6;

fn kernel_f_box(x: &CertifiedInterval, y: &CertifiedInterval, depth: u32) -> Result<CertifiedInterval> {
    let inc_x = sign_of(&dfdy_sign_factor(y, x));
    let inc_y = sign_of(&dfdy_sign_factor(x, y));
    if let (Some(sx), Some(sy)) = (inc_x, inc_y) {
        let pick = |iv: &CertifiedInterval, up: bool| if up { iv.hi().clone() } else { iv.lo().clone() };
        let lo = f_point(&pick(x, !sx), &pick(y, !sy))?;
        let hi = f_point(&pick(x, sx), &pick(y, sy))?;
        return CertifiedInterval::new(lo, hi);
    }
    if depth == 0 {
        return natural_f(x, y);
    }
    let split = |iv: &CertifiedInterval| {
        let m = iv.midpoint();
        (CertifiedInterval::new(iv.lo().clone(), m.clone()).unwrap(), CertifiedInterval::new(m, iv.hi().clone()).unwrap())
    };
    let (a, b) = if x.width() >= y.width() {
        let (x1, x2) = split(x);
        (kernel_f_box(&x1, y, depth - 1)?, kernel_f_box(&x2, y, depth - 1)?)
    } else {
        let (y1, y2) = split(y);
        (kernel_f_box(x, &y1, depth - 1)?, kernel_f_box(x, &y2, depth - 1)?)
    };
    Ok(a.join(&b))
}

/// Certified image of `F` over the box `x × y ⊂ [0, 1)²`.
///
/// Where the signs of both partial derivatives are certified on the box the
/// image is read off the corners exactly; elsewhere the box is bisected a few
/// times and the natural interval extension is used on the pieces.
pub fn kernel_f(x: &CertifiedInterval, y: &CertifiedInterval) -> Result<CertifiedInterval> {
    for v in [x, y] {
        if v.lo().is_negative() || v.hi() >= &BigRational::one() {
            return Err(Error::Domain(format!("F expects arguments in [0, 1), got {v}")));
        }
    }
    kernel_f_box(x, y, F_SPLIT_DEPTH)
}

// ---------------------------------------------------------------------------
// m_n(α)

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MnValue {
    pub n: usize,
    pub class: PairClass,
    pub value: CertifiedInterval,
}

/// Convergents, the Legendre sequence and the pair classes of one expansion.
#[derive(Clone, Debug)]
pub struct DiagonalSequence {
    table: ConvergentTable,
    seq: LegendreSequence,
    classes: Vec<PairClass>,
}

impl DiagonalSequence {
    /// Everything needed for `m_0 .. m_{pairs-1}`.
    pub fn compute(cf: &CfExpansion, pairs: usize) -> Result<Self> {
        let nu_max = 2 * pairs + 4;
        let seq = legendre::legendre_sequence(cf, nu_max)?;
        Self::from_sequence(cf, seq)
    }

    /// As many pairs as can be certified from `cf` with convergents up to
    /// `nu_max`; the error that stopped the scan, if any, is returned.
    pub fn compute_available(cf: &CfExpansion, nu_max: usize) -> Result<(Self, Option<Error>)> {
        let (seq, err) = legendre::legendre_prefix(cf, nu_max, DEFAULT_MAX_DEPTH)?;
        if seq.len() < 2 {
            return Err(err.unwrap_or_else(|| Error::InvalidArgument("fewer than two Legendre convergents".into())));
        }
        Ok((Self::from_sequence(cf, seq)?, err))
    }

    fn from_sequence(cf: &CfExpansion, seq: LegendreSequence) -> Result<Self> {
        let classes = legendre::classify_pairs(&seq)?;
        let last = *seq.indices().last().expect("non-empty");
        let table = cf::convergents(cf, last)?;
        Ok(DiagonalSequence { table, seq, classes })
    }

    pub fn classes(&self) -> &[PairClass] {
        &self.classes
    }

    pub fn sequence(&self) -> &LegendreSequence {
        &self.seq
    }

    pub fn table(&self) -> &ConvergentTable {
        &self.table
    }

    pub fn pairs(&self) -> usize {
        self.classes.len()
    }

    /// `m_n` with an enclosure of width at most `width`.
    pub fn value(&self, cf: &CfExpansion, n: usize, width: &BigRational) -> Result<MnValue> {
        let class = *self.classes.get(n).ok_or_else(|| Error::InvalidArgument(format!("pair {n} not computed")))?;
        let (x, nu_tail) = match class {
            PairClass::Consecutive(nu) => (cf::reversed_tail_from(&self.table, nu + 1)?, nu + 2),
            PairClass::Skip(nu) => (cf::reversed_tail_from(&self.table, nu)?, nu + 2),
        };
        let x = CertifiedInterval::point(x);
        let mut tail_width = width.clone();
        for _ in 0..64 {
            let tail = cf::tail_value(cf, nu_tail, &tail_width)?;
            let y = tail.recip()?;
            let value = match class {
                PairClass::Consecutive(_) => kernel_f(&x, &y),
                PairClass::Skip(_) => kernel_g(&x, &y),
            };
            let value = match value {
                Ok(v) => v,
                Err(Error::Domain(d)) if cf.is_truncated() => {
                    return Err(Error::PrecisionExhausted { index: nu_tail, detail: d })
                }
                Err(e) => return Err(e),
            };
            if &value.width() <= width {
                return Ok(MnValue { n, class, value });
            }
            tail_width /= int(16);
        }
        Err(Error::PrecisionExhausted { index: nu_tail, detail: format!("m_{n} enclosure did not reach width {width}") })
    }

    pub fn values(&self, cf: &CfExpansion, range: RangeInclusive<usize>, width: &BigRational) -> Result<Vec<MnValue>> {
        range.map(|n| self.value(cf, n, width)).collect()
    }

    /// `‖Q_n α‖ = 1 / (q_ν α_{ν+1} + q_{ν-1})` for `Q_n = q_ν`.
    pub fn distance(&self, cf: &CfExpansion, n: usize, width: &BigRational) -> Result<CertifiedInterval> {
        let nu = self.seq.indices()[n];
        let q = BigRational::from_integer(self.table.q(nu).clone());
        let qp = BigRational::from_integer(self.table.q_prev(nu));
        let mut tail_width = width.clone();
        for _ in 0..64 {
            let tail = cf::tail_value(cf, nu + 1, &tail_width)?;
            let d = tail.scale(&q).add_scalar(&qp).recip()?;
            if &d.width() <= width {
                return Ok(d);
            }
            tail_width /= int(16);
        }
        Err(Error::PrecisionExhausted { index: nu, detail: "‖Qα‖ enclosure did not converge".into() })
    }
}

/// `m_n(α)` as an enclosure of width at most `width`.
pub fn mn_value(cf: &CfExpansion, n: usize, width: &BigRational) -> Result<MnValue> {
    DiagonalSequence::compute(cf, n + 1)?.value(cf, n, width)
}

pub fn mn_values(cf: &CfExpansion, range: RangeInclusive<usize>, width: &BigRational) -> Result<Vec<MnValue>> {
    DiagonalSequence::compute(cf, range.end() + 1)?.values(cf, range, width)
}

// ---------------------------------------------------------------------------
// μ_α

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MuFunction {
    nodes: Vec<(BigInt, CertifiedInterval)>,
}

impl MuFunction {
    pub fn new(nodes: Vec<(BigInt, CertifiedInterval)>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidArgument("μ needs at least two nodes".into()));
        }
        for w in nodes.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::InvalidArgument("μ nodes must have increasing Q".into()));
            }
        }
        if nodes.iter().any(|(_, e)| !e.lo().is_positive()) {
            return Err(Error::InvalidArgument("‖Qα‖ must be certified positive".into()));
        }
        Ok(MuFunction { nodes })
    }

    pub fn nodes(&self) -> &[(BigInt, CertifiedInterval)] {
        &self.nodes
    }

    pub fn segments(&self) -> usize {
        self.nodes.len() - 1
    }
}

/// Nodes `(Q_n, ‖Q_n α‖)` for `n < count`.
pub fn mu_function(cf: &CfExpansion, count: usize, width: &BigRational) -> Result<MuFunction> {
    let ds = DiagonalSequence::compute(cf, count)?;
    let nodes =
        (0..count).map(|n| Ok((ds.seq.denominators()[n].clone(), ds.distance(cf, n, width)?))).collect::<Result<Vec<_>>>()?;
    MuFunction::new(nodes)
}

pub fn mu_eval(mu: &MuFunction, t: &BigRational) -> Result<CertifiedInterval> {
    let q = |i: usize| BigRational::from_integer(mu.nodes[i].0.clone());
    let last = mu.nodes.len() - 1;
    if t < &q(0) || t > &q(last) {
        return Err(Error::InvalidArgument(format!("t = {t} outside [Q_0, Q_{last}]")));
    }
    let n = (0..last).find(|&i| t <= &q(i + 1)).expect("bracketed");
    let (q0, q1) = (q(n), q(n + 1));
    let span = &q1 - &q0;
    let w0 = (&q1 - t) / &span;
    let w1 = (t - &q0) / &span;
    Ok(&mu.nodes[n].1.scale(&w0) + &mu.nodes[n + 1].1.scale(&w1))
}

/// Exact maximum of `t μ(t)` on `[q0, q1]` for rational node values.
fn tmu_max_exact(q0: &BigRational, q1: &BigRational, e0: &BigRational, e1: &BigRational) -> BigRational {
    let slope = (e1 - e0) / (q1 - q0);
    let f = |t: &BigRational| t * (e0 + &slope * (t - q0));
    let mut best = f(q0).max(f(q1));
    if slope.is_negative() {
        // t μ(t) = slope t² + (e0 - slope q0) t
        let lin = e0 - &slope * q0;
        let vertex = -&lin / (int(2) * &slope);
        if &vertex > q0 && &vertex < q1 {
            best = best.max(f(&vertex));
        }
    }
    best
}

/// `max_{Q_n <= t <= Q_{n+1}} t μ(t)`. `t μ(t)` is increasing in both node
/// values, so the enclosure comes from the lower and upper node endpoints.
pub fn tmu_segment_max(mu: &MuFunction, n: usize) -> Result<CertifiedInterval> {
    if n + 1 >= mu.nodes.len() {
        return Err(Error::InvalidArgument(format!("segment {n} not available")));
    }
    let q0 = BigRational::from_integer(mu.nodes[n].0.clone());
    let q1 = BigRational::from_integer(mu.nodes[n + 1].0.clone());
    let (e0, e1) = (&mu.nodes[n].1, &mu.nodes[n + 1].1);
    let lo = tmu_max_exact(&q0, &q1, e0.lo(), e1.lo());
    let hi = tmu_max_exact(&q0, &q1, e0.hi(), e1.hi());
    CertifiedInterval::new(lo, hi)
}

// ---------------------------------------------------------------------------
// limsup / liminf over a tail window

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extreme {
    Min,
    Max,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowEstimate {
    pub value: CertifiedInterval,
    pub window: (usize, usize),
    /// Index attaining the extreme (by enclosure midpoint).
    pub at: usize,
    /// The two half-windows agree within twice the target width.
    pub stabilized: bool,
}

fn extreme_of<'a>(values: impl Iterator<Item = &'a MnValue> + Clone, which: Extreme) -> Option<(CertifiedInterval, usize)> {
    let first = values.clone().next()?;
    let mut lo = first.value.lo().clone();
    let mut hi = first.value.hi().clone();
    let mut at = first.n;
    let mut best_mid = first.value.midpoint();
    for v in values.skip(1) {
        let mid = v.value.midpoint();
        match which {
            Extreme::Min => {
                lo = lo.min(v.value.lo().clone());
                hi = hi.min(v.value.hi().clone());
                if mid < best_mid {
                    best_mid = mid;
                    at = v.n;
                }
            }
            Extreme::Max => {
                lo = lo.max(v.value.lo().clone());
                hi = hi.max(v.value.hi().clone());
                if mid > best_mid {
                    best_mid = mid;
                    at = v.n;
                }
            }
        }
    }
    Some((CertifiedInterval::new(lo, hi).expect("ordered"), at))
}

/// Extreme of precomputed values over `n ∈ [n_max/2, n_max]`.
pub fn window_estimate(values: &[MnValue], n_max: usize, which: Extreme, width: &BigRational) -> Result<WindowEstimate> {
    let start = n_max / 2;
    let in_window = |lo: usize, hi: usize| values.iter().filter(move |v| v.n >= lo && v.n <= hi);
    let (value, at) = extreme_of(in_window(start, n_max), which)
        .ok_or_else(|| Error::InvalidArgument(format!("no values in window [{start}, {n_max}]")))?;
    let mid = (start + n_max) / 2;
    let stabilized = match (extreme_of(in_window(start, mid), which), extreme_of(in_window(mid + 1, n_max), which)) {
        (Some((a, _)), Some((b, _))) => (a.midpoint() - b.midpoint()).abs() <= int(2) * width,
        _ => false,
    };
    Ok(WindowEstimate { value, window: (start, n_max), at, stabilized })
}

fn estimate(cf: &CfExpansion, n_max: usize, width: &BigRational, which: Extreme) -> Result<WindowEstimate> {
    if n_max < 10 {
        return Err(Error::InvalidArgument("n_max must be at least 10".into()));
    }
    let values = mn_values(cf, n_max / 2..=n_max, width)?;
    window_estimate(&values, n_max, which, width)
}

/// Running minimum of `m_n` over `[n_max/2, n_max]`.
pub fn liminf_estimate(cf: &CfExpansion, n_max: usize, width: &BigRational) -> Result<WindowEstimate> {
    estimate(cf, n_max, width, Extreme::Min)
}

/// Running maximum of `m_n` over `[n_max/2, n_max]`.
pub fn limsup_estimate(cf: &CfExpansion, n_max: usize, width: &BigRational) -> Result<WindowEstimate> {
    estimate(cf, n_max, width, Extreme::Max)
}
