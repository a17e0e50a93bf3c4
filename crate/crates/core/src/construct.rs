//! Construction of an `α` with `liminf m_n(α) = m` for a target
//! `m ∈ (1/4, ω₀]`.
//!
//! 1. Pick `(R₁, R₂)` with `m ∈ J_{R₁,R₂}`.
//! 2. Solve `F(1/(R₁ + γ), 1/(R₂ + β)) = m` with `β = [0; b₁, b₂, ...]` and
//!    `γ = [0; c₁, c₂, ...]` in `F₅` by nested cylinder refinement.
//! 3. Concatenate the blocks `c_ν, ..., c₁, R₁, R₂, b₁, ..., b_ν`. At the
//!    position `n_ν` of `R₁` the reversed prefix tends to `1/(R₁ + γ)` and
//!    the forward tail after it to `R₂ + β`, so `m_n` along those indices
//!    tends to `m`; all other `m_n` stay above `ω₀`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::cf::{self, CfExpansion, Digit};
use crate::dcf::{self, DiagonalSequence, Extreme, MnValue, WindowEstimate};
use crate::error::{Error, Result};
use crate::exact::ExactNumber;
use crate::hall::{self, BoundedCantor};
use crate::interval::CertifiedInterval;
use crate::legendre::PairClass;
use crate::mobius::Mobius;
use crate::rational::{self, ratio};

pub const DEFAULT_R0: u64 = 6;
pub const DEFAULT_R_MAX: u64 = 10_000;
/// Slack used when asking whether the window liminf brackets `m`.
pub const LIMINF_SLACK: f64 = 1e-6;
/// Required closeness of the last subsequence value to `m`.
pub const SUBSEQ_TOLERANCE: f64 = 1e-6;

fn out_of_range(m: &BigRational, r0: u64) -> Result<Error> {
    Ok(Error::OutOfRange { m: rational::to_decimal(m, 12), omega0: hall::omega0(r0)?.to_decimal(12) })
}

/// The pair `(R, R)` or `(R, R + 1)` with smallest `R` (and `(R, R)` first)
/// whose segment `J` contains `m`.
pub fn select_pair(m: &BigRational, r0: u64, r_max: u64) -> Result<(u64, u64)> {
    if r0 < hall::hmap::MIN_R || r_max < r0 {
        return Err(Error::InvalidArgument(format!("need {} <= R0 <= R_max, got {r0}, {r_max}", hall::hmap::MIN_R)));
    }
    let em = ExactNumber::Rational(m.clone());
    if m <= &ratio(1, 4) || em > hall::omega0(r0)? {
        return Err(out_of_range(m, r0)?);
    }
    // Lower ends decrease along the chain J_{R0,R0}, J_{R0,R0+1}, J_{R0+1,R0+1}, ...
    let last = 2 * (r_max - r0);
    if hall::chain_segment(r0, last)?.lo > em {
        return Err(Error::InvalidArgument(format!(
            "R_max = {r_max} is too small for m = {}; roughly R >= {} is needed",
            rational::to_decimal(m, 12),
            hall::hmap::r_estimate(m).unwrap_or(u64::MAX)
        )));
    }
    let (mut lo, mut hi) = (0u64, last);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if hall::chain_segment(r0, mid)?.lo <= em {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let seg = hall::chain_segment(r0, lo)?;
    if !seg.contains(m) {
        return Err(Error::Anomaly(format!("m falls between J_({},{}) and its predecessor", seg.r1, seg.r2)));
    }
    Ok((seg.r1, seg.r2))
}

/// Cylinders `β ∈ [b]`, `γ ∈ [c]` with `m ∈ H_{R₁,R₂}([c] × [b])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HallSolution {
    pub m: BigRational,
    pub r1: u64,
    pub r2: u64,
    /// Digits of `β`, the second argument.
    pub b_digits: Vec<u8>,
    /// Digits of `γ`, the first argument.
    pub c_digits: Vec<u8>,
    pub image: CertifiedInterval,
    pub backtracks: usize,
}

impl HallSolution {
    /// Refines further until both words have at least `len` digits.
    pub fn extend(&self, len: usize) -> Result<HallSolution> {
        let eps = self.image.width();
        let mut search = Search::new(&self.m, self.r1, self.r2, &eps, len)?;
        search.seed(self.b_digits.clone(), self.c_digits.clone())?;
        search.run()
    }

    pub fn depth(&self) -> usize {
        self.b_digits.len() + self.c_digits.len()
    }
}

/// Words `(b, c)` and their image.
type Child = (Vec<u8>, Vec<u8>, CertifiedInterval);

struct Frame {
    b: Vec<u8>,
    c: Vec<u8>,
    image: CertifiedInterval,
    /// Remaining siblings to try, best first.
    alternatives: Vec<(Vec<u8>, Vec<u8>, CertifiedInterval)>,
}

struct Search {
    m: BigRational,
    r1: u64,
    r2: u64,
    eps: BigRational,
    min_len: usize,
    ends: CertifiedInterval,
    stack: Vec<Frame>,
    backtracks: usize,
    max_depth: usize,
}

impl Search {
    fn new(m: &BigRational, r1: u64, r2: u64, eps: &BigRational, min_len: usize) -> Result<Self> {
        if !eps.is_positive() {
            return Err(Error::InvalidArgument("eps must be positive".into()));
        }
        let eps_bits = rational::bit_size(&eps.recip()) as u32;
        let bits = 64 + 3 * eps_bits;
        let (a, b) = hall::f5_endpoints();
        let ends = CertifiedInterval::new(a.enclose(bits).lo().clone(), b.enclose(bits).hi().clone())?;
        Ok(Search { m: m.clone(), r1, r2, eps: eps.clone(), min_len, ends, stack: Vec::new(), backtracks: 0, max_depth: 0 })
    }

    fn cylinder(&self, word: &[u8]) -> Result<CertifiedInterval> {
        let map = word.iter().fold(Mobius::identity(), |m, &d| m.compose(&Mobius::inv_digit(d as u64)));
        map.image_interval(&self.ends)
    }

    fn image(&self, b: &[u8], c: &[u8]) -> Result<CertifiedInterval> {
        hall::h_map(self.r1, self.r2, &self.cylinder(c)?, &self.cylinder(b)?)
    }

    fn seed(&mut self, b: Vec<u8>, c: Vec<u8>) -> Result<()> {
        let image = self.image(&b, &c)?;
        if !image.contains(&self.m) {
            return Err(Error::InvalidArgument("m is not in the image of the starting cylinders".into()));
        }
        self.stack.push(Frame { b, c, image, alternatives: Vec::new() });
        Ok(())
    }

    fn done(&self, f: &Frame) -> bool {
        f.image.width() <= self.eps && f.b.len() >= self.min_len && f.c.len() >= self.min_len
    }

    /// Refine `c` (the first argument) when it contributes at least as much
    /// image width as `b`, unless a word is still short of `min_len` after
    /// the width target is met.
    fn refine_c(&self, f: &Frame) -> Result<bool> {
        if f.image.width() <= self.eps {
            return Ok(f.c.len() < self.min_len && (f.c.len() <= f.b.len() || f.b.len() >= self.min_len));
        }
        let x = self.cylinder(&f.c)?;
        let y = self.cylinder(&f.b)?;
        let top = hall::h_point(self.r1, self.r2, x.lo(), y.lo())?;
        let wx = &top - hall::h_point(self.r1, self.r2, x.hi(), y.lo())?;
        let wy = &top - hall::h_point(self.r1, self.r2, x.lo(), y.hi())?;
        Ok(wx >= wy)
    }

    fn children(&self, f: &Frame) -> Result<Vec<Child>> {
        let on_c = self.refine_c(f)?;
        let mut out = Vec::new();
        for d in 1..=BoundedCantor::f5().bound() {
            let (mut b, mut c) = (f.b.clone(), f.c.clone());
            if on_c {
                c.push(d);
            } else {
                b.push(d);
            }
            let image = self.image(&b, &c)?;
            if image.contains(&self.m) {
                out.push((b, c, image));
            }
        }
        // Deepest containment first; stable sort keeps digit order on ties.
        let depth = |iv: &CertifiedInterval| (&self.m - iv.lo()).min(iv.hi() - &self.m);
        out.sort_by_key(|p| std::cmp::Reverse(depth(&p.2)));
        Ok(out)
    }

    fn run(mut self) -> Result<HallSolution> {
        loop {
            let Some(top) = self.stack.last() else {
                return Err(Error::Anomaly(format!(
                    "no cylinder pair has m = {} in its image",
                    rational::to_decimal(&self.m, 15)
                )));
            };
            if self.done(top) {
                let f = self.stack.pop().expect("non-empty");
                return Ok(HallSolution {
                    m: self.m,
                    r1: self.r1,
                    r2: self.r2,
                    b_digits: f.b,
                    c_digits: f.c,
                    image: f.image,
                    backtracks: self.backtracks,
                });
            }
            let mut kids = self.children(top)?;
            if kids.is_empty() {
                // Dead end: fall back to the best remaining sibling.
                self.backtracks += 1;
                if self.backtracks > 5 * self.max_depth.max(1) {
                    return Err(Error::Anomaly(format!(
                        "backtracking budget exceeded after {} backtracks at depth {}",
                        self.backtracks, self.max_depth
                    )));
                }
                loop {
                    let Some(mut f) = self.stack.pop() else {
                        return Err(Error::Anomaly("search exhausted".into()));
                    };
                    if let Some((b, c, image)) = (!f.alternatives.is_empty()).then(|| f.alternatives.remove(0)) {
                        let alternatives = std::mem::take(&mut f.alternatives);
                        self.stack.push(Frame { b, c, image, alternatives });
                        break;
                    }
                }
                continue;
            }
            let (b, c, image) = kids.remove(0);
            self.max_depth = self.max_depth.max(b.len() + c.len());
            self.stack.push(Frame { b, c, image, alternatives: kids });
        }
    }
}

/// Cylinders of `F₅ × F₅` whose `H_{R₁,R₂}` image contains `m` and has
/// width at most `eps`.
pub fn hall_solve(m: &BigRational, r1: u64, r2: u64, eps: &BigRational) -> Result<HallSolution> {
    hall_solve_to(m, r1, r2, eps, 0)
}

/// [`hall_solve`] with both digit words at least `min_len` long.
pub fn hall_solve_to(m: &BigRational, r1: u64, r2: u64, eps: &BigRational, min_len: usize) -> Result<HallSolution> {
    let seg = hall::segment_j(r1, r2)?;
    if !seg.contains(m) {
        return Err(Error::InvalidArgument(format!("m = {} is not in J_({r1},{r2})", rational::to_decimal(m, 12))));
    }
    let mut search = Search::new(m, r1, r2, eps, min_len)?;
    search.seed(Vec::new(), Vec::new())?;
    let sol = search.run()?;
    debug_assert!(sol.image.contains(m) && &sol.image.width() <= eps);
    Ok(sol)
}

/// Digit position (1-based) of `R₁` in block `ν` (1-based).
pub fn block_position(nu: usize) -> usize {
    (nu - 1) * (nu + 2) + nu + 1
}

/// The blocks `ν = 1..=blocks` as a truncated expansion `[0; ...]`, and the
/// positions `n_ν` of `R₁`.
pub fn build_alpha(sol: &HallSolution, blocks: usize) -> Result<(CfExpansion, Vec<usize>)> {
    if blocks == 0 {
        return Err(Error::InvalidArgument("need at least one block".into()));
    }
    if sol.b_digits.len() < blocks || sol.c_digits.len() < blocks {
        return Err(Error::InvalidArgument(format!(
            "{blocks} blocks need {blocks} digits of β and γ, have {} and {}",
            sol.b_digits.len(),
            sol.c_digits.len()
        )));
    }
    let mut digits: Vec<Digit> = Vec::new();
    let mut positions = Vec::with_capacity(blocks);
    for nu in 1..=blocks {
        digits.extend(sol.c_digits[..nu].iter().rev().map(|&d| d as Digit));
        digits.push(sol.r1);
        positions.push(digits.len());
        digits.push(sol.r2);
        digits.extend(sol.b_digits[..nu].iter().map(|&d| d as Digit));
    }
    debug_assert!(positions.iter().enumerate().all(|(i, &p)| p == block_position(i + 1)));
    Ok((CfExpansion::prefix(0, digits)?, positions))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubsequenceEntry {
    pub nu: usize,
    /// Digit position `n_ν` of `R₁`.
    pub position: usize,
    /// Pair index whose class is `Consecutive(n_ν - 1)`, if any.
    pub pair: Option<usize>,
    pub value: Option<MnValue>,
    /// Upper bound on `|m_{n_ν} - m|`.
    pub distance: Option<f64>,
    /// Distances of `α*_{n_ν}` from `1/(R₁ + [c])` and of `1/α_{n_ν+1}` from
    /// `1/(R₂ + [b])`, with `[b]`, `[c]` the solution's cylinders.
    pub prefix_error: f64,
    pub tail_error: f64,
}

#[derive(Clone, Debug)]
pub struct ConstructionReport {
    pub m: BigRational,
    pub r0: u64,
    pub omega0: ExactNumber,
    pub alpha: CfExpansion,
    pub block_positions: Vec<usize>,
    pub subsequence: Vec<SubsequenceEntry>,
    /// Blocks whose `n_ν` pair is not of the consecutive class.
    pub branch_violations: Vec<usize>,
    /// `|m_{n_ν} - m|` is non-increasing along the blocks. Informational:
    /// once the distance reaches the solution's resolution it fluctuates.
    pub converging: bool,
    pub offseq_min: Option<MnValue>,
    pub offseq_count: usize,
    pub offseq_above_omega0: bool,
    /// Smallest value over pairs of the skip class.
    pub skip_min: Option<MnValue>,
    pub skip_above_omega0: bool,
    /// Smallest `R₀` whose `ω₀` lies in `[m, offseq_min)`.
    pub min_passing_r0: Option<u64>,
    pub liminf: Option<WindowEstimate>,
    /// The window liminf, widened by [`LIMINF_SLACK`], contains `m`.
    pub liminf_brackets_m: bool,
    /// Pairs computed, and the error that stopped the scan early, if any.
    pub pairs: usize,
    pub stopped_by: Option<String>,
}

impl ConstructionReport {
    /// Distance of the last subsequence value from `m`.
    pub fn final_distance(&self) -> Option<f64> {
        self.subsequence.last().and_then(|e| e.distance)
    }

    /// Every block has a consecutive-class value, the last one is within
    /// [`SUBSEQ_TOLERANCE`] of `m`, the other values stay above `ω₀`, and the
    /// window liminf brackets `m`.
    pub fn invariants_hold(&self) -> bool {
        self.branch_violations.is_empty()
            && self.subsequence.iter().all(|e| e.value.is_some())
            && self.final_distance().is_some_and(|d| d <= SUBSEQ_TOLERANCE)
            && self.offseq_above_omega0
            && self.liminf_brackets_m
    }
}

const MN_WIDTH_EXP: u32 = 18;

/// `{1/(R + x) : x ∈ cylinder(word)}` as an `f64` range.
fn shifted_cylinder(r: u64, word: &[u8]) -> Result<(f64, f64)> {
    let cyl = hall::Cylinder::new(&BoundedCantor::f5(), word)?;
    Ok((1.0 / (r as f64 + cyl.hi().to_f64()), 1.0 / (r as f64 + cyl.lo().to_f64())))
}

fn distance_to(x: f64, (lo, hi): (f64, f64)) -> f64 {
    (lo - x).max(x - hi).max(0.0)
}

/// Checks a truncated expansion against the target `m`. `positions` are the
/// digit positions `n_ν` of the subsequence; `coords` gives the ranges of
/// `1/(R₁ + γ)` and `1/(R₂ + β)` for the coordinate convergence check.
pub fn verify_expansion(
    alpha: &CfExpansion,
    m: &BigRational,
    positions: &[usize],
    coords: Option<((f64, f64), (f64, f64))>,
    r0: u64,
) -> Result<ConstructionReport> {
    let omega0 = hall::omega0(r0)?;
    let nu_max = positions.last().map_or(60, |&p| p + 3);
    let (ds, stopped) = DiagonalSequence::compute_available(alpha, nu_max)?;
    let width = BigRational::new(BigInt::one(), rational::pow10(MN_WIDTH_EXP));
    let mut values: Vec<MnValue> = Vec::new();
    let mut stopped_by = stopped.map(|e| e.to_string());
    'pairs: for n in 0..ds.pairs() {
        // Near the end of a truncated expansion the tails are looser.
        for exp in [MN_WIDTH_EXP, 12, 9] {
            let w = BigRational::new(BigInt::one(), rational::pow10(exp));
            match ds.value(alpha, n, &w) {
                Ok(v) => {
                    values.push(v);
                    continue 'pairs;
                }
                Err(e @ Error::PrecisionExhausted { .. }) => {
                    if exp == 9 {
                        stopped_by.get_or_insert(e.to_string());
                        break 'pairs;
                    }
                }
                Err(e) => return Err(e),
            }
        }
    }
    let value_of = |n: usize| values.get(n).cloned();
    let table = ds.table();

    let mut subsequence = Vec::new();
    let mut branch_violations = Vec::new();
    let mut on_subsequence = vec![false; values.len()];
    for (i, &pos) in positions.iter().enumerate() {
        let nu = i + 1;
        let pair = ds.classes().iter().position(|c| *c == PairClass::Consecutive(pos - 1));
        if pair.is_none() {
            branch_violations.push(nu);
        }
        let value = pair.and_then(value_of);
        if let Some(p) = pair.filter(|&p| p < on_subsequence.len()) {
            on_subsequence[p] = true;
        }
        let distance = value.as_ref().map(|v| v.value.max_distance(m)).map(|d| rational::to_f64(&d));
        let (prefix_error, tail_error) = match coords {
            Some((first, second)) if pos + 1 < table.len() => {
                let star = rational::to_f64(&cf::reversed_tail_from(table, pos)?);
                let tail = cf::tail_value(alpha, pos + 1, &width).map(|t| 1.0 / rational::to_f64(&t.midpoint()));
                (distance_to(star, first), tail.map_or(f64::NAN, |t| distance_to(t, second)))
            }
            _ => (f64::NAN, f64::NAN),
        };
        subsequence.push(SubsequenceEntry { nu, position: pos, pair, value, distance, prefix_error, tail_error });
    }
    let distances: Vec<f64> = subsequence.iter().filter_map(|e| e.distance).collect();
    let converging = distances.windows(2).all(|w| w[1] <= w[0]);

    // Off-subsequence pairs, up to the last subsequence pair.
    let last_pair = subsequence.iter().filter_map(|e| e.pair).max().unwrap_or(values.len().saturating_sub(1));
    let off: Vec<&MnValue> = values.iter().filter(|v| v.n <= last_pair && !on_subsequence[v.n]).collect();
    let min_by_lo = |vs: &mut dyn Iterator<Item = &MnValue>| vs.min_by(|a, b| a.value.lo().cmp(b.value.lo())).cloned();
    let offseq_min = min_by_lo(&mut off.iter().copied());
    let above = |v: &Option<MnValue>| v.as_ref().is_none_or(|v| ExactNumber::Rational(v.value.lo().clone()) > omega0);
    let offseq_above_omega0 = above(&offseq_min);
    let skip_min = min_by_lo(&mut values.iter().filter(|v| matches!(v.class, PairClass::Skip(_))));
    let skip_above_omega0 = above(&skip_min);

    let min_passing_r0 = match &offseq_min {
        Some(v) => {
            let mut r = hall::hmap::MIN_R;
            loop {
                let w = hall::omega0(r)?;
                if ExactNumber::Rational(v.value.lo().clone()) > w {
                    break (w >= ExactNumber::Rational(m.clone())).then_some(r);
                }
                if r > 100_000 {
                    break None;
                }
                r += 1;
            }
        }
        None => Some(r0),
    };

    let (liminf, liminf_brackets_m) = if last_pair >= 10 && last_pair < values.len() {
        let est = dcf::window_estimate(&values[..=last_pair], last_pair, Extreme::Min, &width)?;
        let slack = rational::from_f64(LIMINF_SLACK);
        let hit = est.value.lo() - &slack <= *m && *m <= est.value.hi() + &slack;
        (Some(est), hit)
    } else {
        (None, false)
    };

    Ok(ConstructionReport {
        m: m.clone(),
        r0,
        omega0,
        alpha: alpha.clone(),
        block_positions: positions.to_vec(),
        subsequence,
        branch_violations,
        converging,
        offseq_min,
        offseq_count: off.len(),
        offseq_above_omega0,
        skip_min,
        skip_above_omega0,
        min_passing_r0,
        liminf,
        liminf_brackets_m,
        pairs: values.len(),
        stopped_by,
    })
}

/// Report on the expansion produced by [`build_alpha`]. `alpha` should carry
/// a couple of blocks beyond `blocks` so that the last tails are tight.
pub fn verify_construction(
    alpha: &CfExpansion,
    m: &BigRational,
    sol: &HallSolution,
    blocks: usize,
    r0: u64,
) -> Result<ConstructionReport> {
    if blocks < 3 {
        return Err(Error::InvalidArgument("verification needs at least 3 blocks".into()));
    }
    let positions: Vec<usize> = (1..=blocks).map(block_position).collect();
    let coords = (shifted_cylinder(sol.r1, &sol.c_digits)?, shifted_cylinder(sol.r2, &sol.b_digits)?);
    verify_expansion(alpha, m, &positions, Some(coords), r0)
}

#[derive(Clone, Debug)]
pub struct Construction {
    pub solution: HallSolution,
    pub alpha: CfExpansion,
    pub report: ConstructionReport,
    /// Slope-ratio maximum of `H_{R₁,R₂}` over `[A, B]²`.
    pub slope_bound: CertifiedInterval,
    /// The slope bound is below the τ constant `1.788` of `F₅`.
    pub slope_condition_holds: bool,
}

/// `select_pair → hall_solve → build_alpha → verify_construction`.
pub fn construct(m: &BigRational, eps: &BigRational, blocks: usize, r0: u64, r_max: u64) -> Result<Construction> {
    let (r1, r2) = select_pair(m, r0, r_max)?;
    let solution = hall_solve_to(m, r1, r2, eps, blocks + 2)?;
    let (alpha, _) = build_alpha(&solution, blocks + 2)?;
    let report = verify_construction(&alpha, m, &solution, blocks, r0)?;
    let slope_bound = hall::lemma2_analysis(r1, r2)?.bound;
    let slope_condition_holds = slope_bound.hi() < &rational::parse_rational("1.788")?;
    Ok(Construction { solution, alpha, report, slope_bound, slope_condition_holds })
}
