//! The maps `H_{R₁,R₂}(x, y) = F(1/(R₁ + x), 1/(R₂ + y))` on `F₅ × F₅`, the
//! slope-ratio bound that makes their image a full segment, and the chain
//! of segments `J_{R₁,R₂}` covering `(1/4, ω₀]`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::dcf;
use crate::error::{Error, Result};
use crate::exact::ExactNumber;
use crate::float_interval::FloatInterval;
use crate::interval::CertifiedInterval;
use crate::rational::{self, int, ratio};

use super::cantor::f5_endpoints;

/// Smallest `R` for which the construction is set up.
pub const MIN_R: u64 = 6;

/// `φ(x, y) = (1 - 3x + 3xy - x²y)(1 - x)`, so that
/// `(∂F/∂y) / (∂F/∂x) = φ(x, y) / φ(y, x)`.
pub fn phi(x: &CertifiedInterval, y: &CertifiedInterval) -> Result<CertifiedInterval> {
    for v in [x, y] {
        if v.lo() <= &int(0) || v.hi() >= &int(1) {
            return Err(Error::Domain(format!("φ expects arguments in (0, 1), got {v}")));
        }
    }
    let one = CertifiedInterval::unit();
    Ok(&dcf::dfdy_sign_factor(x, y) * &(&one - x))
}

pub fn phi_point(x: f64, y: f64) -> f64 {
    (1.0 - 3.0 * x + 3.0 * x * y - x * x * y) * (1.0 - x)
}

fn phi_float(x: FloatInterval, y: FloatInterval) -> FloatInterval {
    let one = FloatInterval::exact(1.0);
    let three = FloatInterval::exact(3.0);
    let xy = x * y;
    (one - three * x + three * xy - xy * x) * (one - x)
}

fn check_r(r1: u64, r2: u64) -> Result<()> {
    if r1 == 0 || r2 == 0 {
        return Err(Error::Domain("H needs R₁, R₂ >= 1".into()));
    }
    Ok(())
}

fn shifted_recip(r: u64, x: &CertifiedInterval) -> Result<CertifiedInterval> {
    x.add_scalar(&int(r as i64)).recip()
}

/// Certified image of `H_{R₁,R₂}` over `x × y ⊂ [0, 1]²`. On the boxes used
/// here `H` is decreasing in both variables and the image is
/// `[H(x_hi, y_hi), H(x_lo, y_lo)]`; [`dcf::kernel_f`] certifies that.
pub fn h_map(r1: u64, r2: u64, x: &CertifiedInterval, y: &CertifiedInterval) -> Result<CertifiedInterval> {
    check_r(r1, r2)?;
    let unit = CertifiedInterval::new(int(0), int(1))?;
    if !unit.contains_interval(x) || !unit.contains_interval(y) {
        return Err(Error::Domain(format!("H expects arguments in [0, 1], got {x} and {y}")));
    }
    dcf::kernel_f(&shifted_recip(r1, x)?, &shifted_recip(r2, y)?)
}

/// `H_{R₁,R₂}` at rational points.
pub fn h_point(r1: u64, r2: u64, x: &BigRational, y: &BigRational) -> Result<BigRational> {
    check_r(r1, r2)?;
    let u = (x + int(r1 as i64)).recip();
    let v = (y + int(r2 as i64)).recip();
    dcf::f_point(&u, &v)
}

/// `H_{R₁,R₂}` at exact quadratic arguments from one field.
pub fn h_exact(r1: u64, r2: u64, x: &ExactNumber, y: &ExactNumber) -> Result<ExactNumber> {
    check_r(r1, r2)?;
    let one = ExactNumber::from_int(1);
    let u = x.add_rational(&int(r1 as i64)).recip()?;
    let v = y.add_rational(&int(r2 as i64)).recip()?;
    let uv = u.mul(&v)?;
    let num = one.sub(&uv)?;
    let num = num.mul(&num)?;
    let den = one.add(&uv)?.mul(&one.sub(&u)?)?.mul(&one.sub(&v)?)?.mul_rational(&int(4));
    num.div(&den)
}

/// `ω₀ = H_{R₀,R₀}(A, A)`.
pub fn omega0(r0: u64) -> Result<ExactNumber> {
    let (a, _) = f5_endpoints();
    h_exact(r0, r0, &a, &a)
}

// ---------------------------------------------------------------------------
// Slope ratio

/// `max(|H_x/H_y|, |H_y/H_x|)` evaluated on an `f64` box. With
/// `u = 1/(R₁ + x)`, `v = 1/(R₂ + y)` the ratio `H_y/H_x` is
/// `φ(u, v)/φ(v, u) · ((R₁ + x)/(R₂ + y))²`.
fn slope_ratio_box(r1: f64, r2: f64, x: FloatInterval, y: FloatInterval) -> Option<FloatInterval> {
    let sx = FloatInterval::exact(r1) + x;
    let sy = FloatInterval::exact(r2) + y;
    let u = sx.recip()?;
    let v = sy.recip()?;
    let r = phi_float(u, v).checked_div(phi_float(v, u))? * sx.checked_div(sy)?.square();
    if !r.is_positive() {
        return None;
    }
    Some(r.max(r.recip()?))
}

/// `H_y/H_x` at the corner `(x, y) = (B, A)`, the closed form of the
/// slope-ratio maximum over `[A, B]²` for `R₁ = R₂`.
pub fn corner_ratio(r1: u64, r2: u64) -> Result<CertifiedInterval> {
    check_r(r1, r2)?;
    let (a, b) = f5_endpoints();
    let x = b.enclose(160);
    let y = a.enclose(160);
    let sx = x.add_scalar(&int(r1 as i64));
    let sy = y.add_scalar(&int(r2 as i64));
    let (u, v) = (sx.recip()?, sy.recip()?);
    phi(&u, &v)?.div(&phi(&v, &u)?).map(|q| &q * &sx.div(&sy).unwrap().square())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma2Analysis {
    pub r1: u64,
    pub r2: u64,
    /// Closed-form value at the `(B, A)` corner.
    pub corner: CertifiedInterval,
    /// Certified enclosure of the maximum over `[A, B]²`.
    pub bound: CertifiedInterval,
    /// Approximate location of the maximum.
    pub argmax: (f64, f64),
    /// The corner value attains the maximum within [`LEMMA2_TOLERANCE`].
    pub corner_is_max: bool,
    pub boxes: usize,
}

pub const LEMMA2_TOLERANCE: f64 = 1e-6;
const GRID: usize = 64;
const BNB_GAP: f64 = 1e-9;
const BNB_MAX_BOXES: usize = 2_000_000;

#[derive(Clone, Copy)]
struct Cell {
    hi: f64,
    x: FloatInterval,
    y: FloatInterval,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.hi.total_cmp(&other.hi) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.hi.total_cmp(&other.hi)
    }
}

/// Both sides of the slope-ratio bound: the corner closed form and a
/// branch-and-bound maximum over a `64 × 64` grid of `[A, B]²` with interval
/// remainder.
pub fn lemma2_analysis(r1: u64, r2: u64) -> Result<Lemma2Analysis> {
    if r1 < MIN_R || !(r2 == r1 || r2 == r1 + 1) {
        return Err(Error::InvalidArgument(format!(
            "slope bound needs (R, R) or (R, R + 1) with R >= {MIN_R}, got ({r1}, {r2})"
        )));
    }
    let corner = corner_ratio(r1, r2)?;
    let (a, b) = f5_endpoints();
    let fa = FloatInterval::from_certified(&a.enclose(80));
    let fb = FloatInterval::from_certified(&b.enclose(80));
    let (rf1, rf2) = (r1 as f64, r2 as f64);
    let eval = |x: FloatInterval, y: FloatInterval| {
        slope_ratio_box(rf1, rf2, x, y).ok_or_else(|| Error::Domain("slope ratio undefined on box".into()))
    };
    // The grid covers the outer enclosure of [A, B]; the end nodes are exact.
    let node = |k: usize| if k == GRID { fb.hi } else { fa.lo + (fb.hi - fa.lo) * (k as f64) / (GRID as f64) };
    let mut heap = BinaryHeap::new();
    let mut best_lo = f64::NEG_INFINITY;
    let mut argmax = (0.0, 0.0);
    let mut boxes = 0usize;
    let probe = |x: f64, y: f64, best_lo: &mut f64, argmax: &mut (f64, f64)| -> Result<()> {
        // Only points of [A, B]² give valid lower bounds.
        let px = FloatInterval::exact(x.clamp(fa.hi, fb.lo));
        let py = FloatInterval::exact(y.clamp(fa.hi, fb.lo));
        let v = eval(px, py)?;
        if v.lo > *best_lo {
            *best_lo = v.lo;
            *argmax = (px.lo, py.lo);
        }
        Ok(())
    };
    for i in 0..GRID {
        for k in 0..GRID {
            let x = FloatInterval::new(node(i), node(i + 1));
            let y = FloatInterval::new(node(k), node(k + 1));
            let v = eval(x, y)?;
            boxes += 1;
            for (px, py) in [(x.lo, y.lo), (x.lo, y.hi), (x.hi, y.lo), (x.hi, y.hi), (x.mid(), y.mid())] {
                probe(px, py, &mut best_lo, &mut argmax)?;
            }
            heap.push(Cell { hi: v.hi, x, y });
        }
    }
    let upper = loop {
        let top = heap.pop().expect("non-empty");
        if top.hi - best_lo <= BNB_GAP || boxes >= BNB_MAX_BOXES {
            break top.hi;
        }
        let (xm, ym) = (top.x.mid(), top.y.mid());
        for x in [FloatInterval::new(top.x.lo, xm), FloatInterval::new(xm, top.x.hi)] {
            for y in [FloatInterval::new(top.y.lo, ym), FloatInterval::new(ym, top.y.hi)] {
                let v = eval(x, y)?;
                boxes += 1;
                for (px, py) in [(x.lo, y.lo), (x.lo, y.hi), (x.hi, y.lo), (x.hi, y.hi)] {
                    probe(px, py, &mut best_lo, &mut argmax)?;
                }
                heap.push(Cell { hi: v.hi, x, y });
            }
        }
    };
    let bound = CertifiedInterval::new(rational::from_f64(best_lo), rational::from_f64(upper))?;
    let tol = rational::from_f64(LEMMA2_TOLERANCE);
    let corner_is_max = corner.lo() <= bound.hi() && bound.hi() <= &(corner.hi() + &tol);
    Ok(Lemma2Analysis { r1, r2, corner, bound, argmax, corner_is_max, boxes })
}

/// Certified maximum over `[A, B]²` of `max(|H_x/H_y|, |H_y/H_x|)`. Fails
/// when the grid bound and the corner closed form disagree.
pub fn lemma2_ratio_bound(r1: u64, r2: u64) -> Result<CertifiedInterval> {
    let an = lemma2_analysis(r1, r2)?;
    if !an.corner_is_max {
        return Err(Error::CornerMaximality {
            corner: an.corner.to_string(),
            grid: format!("{} near ({:.6}, {:.6})", an.bound, an.argmax.0, an.argmax.1),
        });
    }
    Ok(an.bound)
}

// ---------------------------------------------------------------------------
// Segments J and the covering chain

/// `J_{R₁,R₂} = [H(B, B), H(A, A)]`, the image of `F₅ × F₅` under `H_{R₁,R₂}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegmentJ {
    pub r1: u64,
    pub r2: u64,
    pub lo: ExactNumber,
    pub hi: ExactNumber,
}

impl SegmentJ {
    pub fn contains(&self, m: &BigRational) -> bool {
        let m = ExactNumber::Rational(m.clone());
        self.lo <= m && m <= self.hi
    }

    pub fn enclosure(&self, bits: u32) -> CertifiedInterval {
        CertifiedInterval::new(self.lo.enclose(bits).lo().clone(), self.hi.enclose(bits).hi().clone()).expect("ordered")
    }
}

pub fn segment_j(r1: u64, r2: u64) -> Result<SegmentJ> {
    let (a, b) = f5_endpoints();
    let lo = h_exact(r1, r2, &b, &b)?;
    let hi = h_exact(r1, r2, &a, &a)?;
    if lo >= hi {
        return Err(Error::Anomaly(format!("J_({r1},{r2}) is empty")));
    }
    Ok(SegmentJ { r1, r2, lo, hi })
}

/// The `k`-th segment of the chain `J_{R₀,R₀}, J_{R₀,R₀+1}, J_{R₀+1,R₀+1}, ...`.
pub fn chain_segment(r0: u64, k: u64) -> Result<SegmentJ> {
    let r = r0 + k / 2;
    segment_j(r, r + k % 2)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoveringFailure {
    pub r: u64,
    pub condition: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoveringReport {
    pub r0: u64,
    pub r_max: u64,
    pub omega0: ExactNumber,
    pub ok: bool,
    pub failures: Vec<CoveringFailure>,
}

/// Checks that consecutive segments of the chain overlap for
/// `R₀ <= R < R_max`, and that `J_{R,R}` moves down toward `1/4`.
pub fn covering_check(r0: u64, r_max: u64) -> Result<CoveringReport> {
    if r0 < MIN_R || r_max < r0 {
        return Err(Error::InvalidArgument(format!("covering needs {MIN_R} <= R0 <= R_max, got {r0}, {r_max}")));
    }
    let quarter = ExactNumber::Rational(ratio(1, 4));
    let per_r: Vec<Vec<CoveringFailure>> = (r0..=r_max)
        .into_par_iter()
        .map(|r| {
            let fail = |condition: String| CoveringFailure { r, condition };
            let mut out = Vec::new();
            let rr = segment_j(r, r)?;
            if rr.lo <= quarter {
                out.push(fail(format!("H_({r},{r})(B,B) <= 1/4")));
            }
            if r < r_max {
                let rs = segment_j(r, r + 1)?;
                let ss = segment_j(r + 1, r + 1)?;
                if rr.lo >= rs.hi {
                    out.push(fail(format!("H_({r},{r})(B,B) < H_({r},{})(A,A)", r + 1)));
                }
                if rs.lo >= ss.hi {
                    out.push(fail(format!("H_({r},{})(B,B) < H_({},{})(A,A)", r + 1, r + 1, r + 1)));
                }
                if ss.lo >= rr.lo || ss.hi >= rr.hi {
                    out.push(fail(format!("J_({},{}) is not below J_({r},{r})", r + 1, r + 1)));
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let failures: Vec<CoveringFailure> = per_r.into_iter().flatten().collect();
    Ok(CoveringReport { r0, r_max, omega0: omega0(r0)?, ok: failures.is_empty(), failures })
}

/// `R` beyond which `J_{R,R}` lies entirely below `m`; `H(R, R, B, B) ≈ 1/4 + 1/(2R)`.
pub fn r_estimate(m: &BigRational) -> Option<u64> {
    let excess = rational::to_f64(&(m - ratio(1, 4)));
    if excess <= 0.0 {
        return None;
    }
    (1.0 / (2.0 * excess)).ceil().to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_rational;

    #[test]
    fn phi_examples() {
        let half = CertifiedInterval::point(ratio(1, 2));
        assert_eq!(phi(&half, &half).unwrap(), CertifiedInterval::point(ratio(1, 16)));
        let tiny = CertifiedInterval::point(ratio(1, 1_000_000));
        assert!((rational::to_f64(phi(&tiny, &half).unwrap().lo()) - 1.0).abs() < 1e-5);
        assert!(phi(&CertifiedInterval::point(int(0)), &half).is_err());
    }

    #[test]
    fn omega0_value() {
        let w = omega0(6).unwrap();
        assert_eq!(w.to_decimal(10), "0.3289531020");
        assert!(w
            .enclose(60)
            .intersect(&h_map(6, 6, &f5_endpoints().0.enclose(100), &f5_endpoints().0.enclose(100)).unwrap())
            .is_some());
    }

    #[test]
    fn h_box_matches_samples() {
        let x = CertifiedInterval::new(ratio(1, 5), ratio(1, 2)).unwrap();
        let y = CertifiedInterval::new(ratio(3, 10), ratio(4, 5)).unwrap();
        let img = h_map(6, 7, &x, &y).unwrap();
        assert_eq!(img.lo(), &h_point(6, 7, x.hi(), y.hi()).unwrap());
        assert_eq!(img.hi(), &h_point(6, 7, x.lo(), y.lo()).unwrap());
        for i in 0..=8 {
            for k in 0..=8 {
                let px = ratio(1, 5) + ratio(3 * i, 80);
                let py = ratio(3, 10) + ratio(5 * k, 80);
                assert!(img.contains(&h_point(6, 7, &px, &py).unwrap()));
            }
        }
    }

    #[test]
    fn h_tends_to_quarter() {
        let z = CertifiedInterval::point(int(0));
        let mut prev = h_map(6, 6, &z, &z).unwrap();
        for r in [10, 100, 1000, 10_000] {
            let v = h_map(r, r, &z, &z).unwrap();
            assert!(v.hi() < prev.lo() && v.lo() > &ratio(1, 4));
            prev = v;
        }
        assert!(prev.hi() < &parse_rational("0.2501").unwrap());
    }

    #[test]
    fn corner_bound_for_equal_r() {
        let b = lemma2_ratio_bound(6, 6).unwrap();
        assert!(b.lo() >= &parse_rational("1.363").unwrap() && b.hi() < &parse_rational("1.364").unwrap());
        let b60 = lemma2_ratio_bound(60, 60).unwrap();
        assert!(b60.hi() < b.lo() && b60.lo() > &int(1));
        assert!(lemma2_ratio_bound(5, 5).is_err());
        assert!(lemma2_ratio_bound(6, 8).is_err());
    }

    #[test]
    fn corner_is_not_the_maximum_off_diagonal() {
        // For R₂ = R₁ + 1 the maximum sits at (A, B) through the reciprocal ratio.
        let an = lemma2_analysis(7, 8).unwrap();
        assert!(!an.corner_is_max);
        assert!(an.bound.lo() > &parse_rational("1.772").unwrap() && an.bound.hi() < &parse_rational("1.7721").unwrap());
        assert!(matches!(lemma2_ratio_bound(7, 8), Err(Error::CornerMaximality { .. })));
    }

    #[test]
    fn segment_chain_overlaps() {
        let j = segment_j(6, 6).unwrap();
        assert_eq!(j.lo.as_rational(), Some(&ratio(9, 28)));
        assert!(j.contains(&parse_rational("0.325").unwrap()));
        let report = covering_check(6, 40).unwrap();
        assert!(report.ok, "{:?}", report.failures);
        assert_eq!(chain_segment(6, 3).unwrap().r1, 7);
        assert_eq!(chain_segment(6, 3).unwrap().r2, 8);
    }
}
