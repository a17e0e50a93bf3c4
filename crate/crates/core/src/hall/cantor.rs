//! Cantor sets `F_N` of continued fractions `[0; b₁, b₂, ...]` with
//! `1 <= b_i <= N`, their cylinders, the gaps between cylinders, and the
//! τ-set check on the gap sequence.
//!
//! A cylinder with prefix `w` is `M_w([A, B])` where
//! `M_w = (s ↦ 1/(b₁ + s)) ∘ ... ∘ (s ↦ 1/(b_k + s))` and `A = min F_N`,
//! `B = max F_N`. In local coordinates `s` the children of a cylinder are
//! `[1/(j + B), 1/(j + A)]`, so the gap between children `j` and `j + 1` is
//! `(1/(j + 1 + A), 1/(j + B))`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::exact::ExactNumber;
use crate::float_interval::FloatInterval;
use crate::interval::CertifiedInterval;
use crate::mobius::Mobius;

/// Largest gap count the exact replay will materialize.
pub const EXACT_GAP_LIMIT: usize = 400_000;
/// Deepest level the streaming scan accepts.
pub const SCAN_DEPTH_LIMIT: usize = 12;

const ENCLOSURE_BITS: u32 = 96;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BoundedCantor {
    n: u8,
}

impl BoundedCantor {
    pub fn new(n: u8) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("F_N needs N >= 2, got {n}")));
        }
        Ok(BoundedCantor { n })
    }

    pub fn f5() -> Self {
        BoundedCantor { n: 5 }
    }

    pub fn bound(&self) -> u8 {
        self.n
    }

    /// `A = [0; (N, 1)] = (√(N² + 4N) - N) / (2N)`.
    pub fn a(&self) -> ExactNumber {
        let n = BigInt::from(self.n);
        ExactNumber::surd(-n.clone(), 1.into(), &n * &n + 4 * &n, 2 * n).expect("irrational")
    }

    /// `B = [0; (1, N)] = N A`.
    pub fn b(&self) -> ExactNumber {
        let n = BigInt::from(self.n);
        ExactNumber::surd(-n.clone(), 1.into(), &n * &n + 4 * &n, 2.into()).expect("irrational")
    }

    pub fn check_word(&self, word: &[u8]) -> Result<()> {
        match word.iter().position(|&d| d == 0 || d > self.n) {
            Some(i) => Err(Error::InvalidArgument(format!("digit {} at position {} outside 1..={}", word[i], i + 1, self.n))),
            None => Ok(()),
        }
    }
}

/// `(A, B)` for `F₅`: `(√45 - 5)/10` and `(√45 - 5)/2`.
pub fn f5_endpoints() -> (ExactNumber, ExactNumber) {
    let c = BoundedCantor::f5();
    (c.a(), c.b())
}

fn word_map(word: &[u8]) -> Mobius {
    word.iter().fold(Mobius::identity(), |m, &d| m.compose(&Mobius::inv_digit(d as u64)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cylinder {
    prefix: Vec<u8>,
    map: Mobius,
    lo: ExactNumber,
    hi: ExactNumber,
}

impl Cylinder {
    pub fn root(cantor: &BoundedCantor) -> Self {
        Cylinder { prefix: Vec::new(), map: Mobius::identity(), lo: cantor.a(), hi: cantor.b() }
    }

    pub fn new(cantor: &BoundedCantor, prefix: &[u8]) -> Result<Self> {
        cantor.check_word(prefix)?;
        Self::from_map(cantor, prefix.to_vec(), word_map(prefix))
    }

    fn from_map(cantor: &BoundedCantor, prefix: Vec<u8>, map: Mobius) -> Result<Self> {
        let x = map.apply_exact(&cantor.a())?;
        let y = map.apply_exact(&cantor.b())?;
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        Ok(Cylinder { prefix, map, lo, hi })
    }

    pub fn child(&self, cantor: &BoundedCantor, digit: u8) -> Result<Self> {
        cantor.check_word(&[digit])?;
        let mut prefix = self.prefix.clone();
        prefix.push(digit);
        Self::from_map(cantor, prefix, self.map.compose(&Mobius::inv_digit(digit as u64)))
    }

    pub fn children(&self, cantor: &BoundedCantor) -> Vec<Cylinder> {
        (1..=cantor.bound()).map(|d| self.child(cantor, d).expect("valid digit")).collect()
    }

    pub fn prefix(&self) -> &[u8] {
        &self.prefix
    }

    pub fn depth(&self) -> usize {
        self.prefix.len()
    }

    pub fn map(&self) -> &Mobius {
        &self.map
    }

    pub fn lo(&self) -> &ExactNumber {
        &self.lo
    }

    pub fn hi(&self) -> &ExactNumber {
        &self.hi
    }

    pub fn length(&self) -> ExactNumber {
        self.hi.sub(&self.lo).expect("same field")
    }

    /// Outer rational enclosure of the cylinder, slack at most `2^-bits` per end.
    pub fn enclosure(&self, bits: u32) -> CertifiedInterval {
        CertifiedInterval::new(self.lo.enclose(bits).lo().clone(), self.hi.enclose(bits).hi().clone()).expect("ordered")
    }
}

/// The gap between children `j` and `j + 1` of the cylinder `word`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GapId {
    pub word: Vec<u8>,
    pub j: u8,
}

impl GapId {
    pub fn depth(&self) -> usize {
        self.word.len() + 1
    }
}

impl fmt::Display for GapId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<String> = self.word.iter().map(|d| d.to_string()).collect();
        write!(f, "[{}]:{}|{}", w.join(","), self.j, self.j + 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gap {
    pub id: GapId,
    pub lo: ExactNumber,
    pub hi: ExactNumber,
    pub len: ExactNumber,
}

/// Exact endpoints of one gap.
pub fn gap_exact(cantor: &BoundedCantor, id: &GapId) -> Result<Gap> {
    cantor.check_word(&id.word)?;
    if id.j == 0 || id.j >= cantor.bound() {
        return Err(Error::InvalidArgument(format!("gap index {} outside 1..{}", id.j, cantor.bound())));
    }
    let m = word_map(&id.word);
    let s_left = cantor.a().add_rational(&BigRational::from_integer((id.j + 1).into())).recip()?;
    let s_right = cantor.b().add_rational(&BigRational::from_integer(id.j.into())).recip()?;
    let x = m.apply_exact(&s_left)?;
    let y = m.apply_exact(&s_right)?;
    let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
    let len = hi.sub(&lo)?;
    Ok(Gap { id: id.clone(), lo, hi, len })
}

/// The segment `[A, B]` with all gaps down to a fixed depth, in removal order.
#[derive(Clone, Debug)]
pub struct TauSetSystem {
    cantor: BoundedCantor,
    depth: usize,
    gaps: Vec<Gap>,
}

impl TauSetSystem {
    pub fn cantor(&self) -> &BoundedCantor {
        &self.cantor
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Gaps by decreasing length, ties by left endpoint.
    pub fn gaps(&self) -> &[Gap] {
        &self.gaps
    }
}

fn gap_count(n: u8, depth: usize) -> Option<usize> {
    (n as usize).checked_pow(depth as u32).map(|p| p - 1)
}

fn check_depth(depth: usize, limit: usize) -> Result<()> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    if depth > limit {
        return Err(Error::DepthTooLarge { depth, limit });
    }
    Ok(())
}

fn exact_depth_limit(cantor: &BoundedCantor) -> usize {
    (1..).take_while(|&d| gap_count(cantor.bound(), d).is_some_and(|c| c <= EXACT_GAP_LIMIT)).last().unwrap_or(0)
}

pub fn enumerate_gaps(depth: usize) -> Result<TauSetSystem> {
    enumerate_gaps_for(&BoundedCantor::f5(), depth)
}

pub fn enumerate_gaps_for(cantor: &BoundedCantor, depth: usize) -> Result<TauSetSystem> {
    check_depth(depth, exact_depth_limit(cantor))?;
    let mut ids = Vec::with_capacity(gap_count(cantor.bound(), depth).unwrap_or(0));
    let mut stack = vec![Vec::<u8>::new()];
    while let Some(word) = stack.pop() {
        if word.len() >= depth {
            continue;
        }
        for j in 1..cantor.bound() {
            ids.push(GapId { word: word.clone(), j });
        }
        for d in 1..=cantor.bound() {
            let mut w = word.clone();
            w.push(d);
            stack.push(w);
        }
    }
    let mut keyed: Vec<(FloatInterval, Gap)> = ids
        .iter()
        .map(|id| {
            let g = gap_exact(cantor, id)?;
            Ok((FloatInterval::from_certified(&g.len.enclose(ENCLOSURE_BITS)), g))
        })
        .collect::<Result<_>>()?;
    keyed.sort_by(|(fa, a), (fb, b)| {
        let by_len = if fb.certainly_lt(*fa) {
            Ordering::Less
        } else if fa.certainly_lt(*fb) {
            Ordering::Greater
        } else {
            b.len.cmp(&a.len)
        };
        by_len.then_with(|| a.lo.cmp(&b.lo))
    });
    Ok(TauSetSystem { cantor: *cantor, depth, gaps: keyed.into_iter().map(|(_, g)| g).collect() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TauReport {
    pub depth: usize,
    pub gaps: usize,
    /// Enclosure of `min_t min(|N¹|, |N²|) / |Δ_t|`.
    pub min_ratio: CertifiedInterval,
    pub witness: GapId,
    /// `min_ratio >= τ` certified.
    pub passed: bool,
}

/// An exact value with an `f64` enclosure that settles most comparisons.
#[derive(Clone, Debug)]
struct Keyed {
    approx: FloatInterval,
    value: ExactNumber,
}

impl Keyed {
    fn new(value: ExactNumber) -> Self {
        Keyed { approx: FloatInterval::from_certified(&value.enclose(64)), value }
    }

    fn sub(&self, other: &Keyed) -> Result<Keyed> {
        Ok(Keyed { approx: self.approx - other.approx, value: self.value.sub(&other.value)? })
    }

    fn div(&self, other: &Keyed) -> Result<Keyed> {
        let approx = self.approx.checked_div(other.approx).ok_or(Error::DivisionByZero)?;
        Ok(Keyed { approx, value: self.value.div(&other.value)? })
    }
}

impl PartialEq for Keyed {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Keyed {}
impl PartialOrd for Keyed {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Keyed {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.approx.hi < other.approx.lo {
            Ordering::Less
        } else if other.approx.hi < self.approx.lo {
            Ordering::Greater
        } else {
            self.value.cmp(&other.value)
        }
    }
}

/// Replays the removals of `system` in order on an explicit partition of
/// `[A, B]` and returns the smallest flank-to-gap ratio, exactly.
pub fn tau_verify(system: &TauSetSystem, tau: &BigRational) -> Result<TauReport> {
    let cantor = system.cantor;
    // left endpoint -> right endpoint of each current segment
    let mut segments: BTreeMap<Keyed, Keyed> = BTreeMap::new();
    segments.insert(Keyed::new(cantor.a()), Keyed::new(cantor.b()));
    let mut best: Option<(Keyed, &GapId)> = None;
    for gap in &system.gaps {
        let lo = Keyed::new(gap.lo.clone());
        let hi = Keyed::new(gap.hi.clone());
        let len = Keyed::new(gap.len.clone());
        let (seg_lo, seg_hi) = match segments.range(..=lo.clone()).next_back() {
            Some((l, h)) => (l.clone(), h.clone()),
            None => return Err(Error::Ordering(format!("gap {} lies left of every segment", gap.id))),
        };
        if hi > seg_hi || lo <= seg_lo {
            return Err(Error::Ordering(format!("gap {} is not inside a current segment", gap.id)));
        }
        let n1 = lo.sub(&seg_lo)?;
        let n2 = seg_hi.sub(&hi)?;
        let ratio = n1.min(n2).div(&len)?;
        if best.as_ref().is_none_or(|(r, _)| &ratio < r) {
            best = Some((ratio, &gap.id));
        }
        segments.insert(seg_lo, lo);
        segments.insert(hi, seg_hi);
    }
    let (ratio, witness) = best.ok_or_else(|| Error::InvalidArgument("no gaps".into()))?;
    Ok(TauReport {
        depth: system.depth,
        gaps: system.gaps.len(),
        passed: ExactNumber::Rational(tau.clone()) <= ratio.value,
        min_ratio: ratio.value.enclose(ENCLOSURE_BITS),
        witness: witness.clone(),
    })
}

// ---------------------------------------------------------------------------
// Streaming scan
//
// In removal order, the segment containing a gap is bounded by the nearest
// gap to its left of at least its length and the nearest gap to its right of
// strictly greater length (or by A, B). One left-to-right pass with a
// monotone stack finds both. Distances between gap endpoints are computed in
// the coordinates of the deepest cylinder containing both points, where the
// two points lie in different children and the difference is well
// conditioned.

const MAX_WORD: usize = SCAN_DEPTH_LIMIT + 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum End {
    A,
    B,
}

/// The point `M_word(A)` or `M_word(B)`.
#[derive(Clone, Copy, Debug)]
struct Pt {
    word: [u8; MAX_WORD],
    len: usize,
    end: End,
}

impl Pt {
    fn new(word: &[u8], end: End) -> Self {
        let mut w = [0u8; MAX_WORD];
        w[..word.len()].copy_from_slice(word);
        Pt { word: w, len: word.len(), end }
    }

    /// Digit `i` of the infinite expansion; `A = [0; N, 1, N, ...]` and
    /// `B = [0; 1, N, 1, ...]` continue the finite word.
    fn digit(&self, i: usize, n: u8) -> u8 {
        if i < self.len {
            return self.word[i];
        }
        let first_is_n = (self.end == End::A) == (i - self.len).is_multiple_of(2);
        if first_is_n {
            n
        } else {
            1
        }
    }

    /// Tail value `[0; digit(i), digit(i+1), ...]`.
    fn tail(&self, i: usize, ends: &Ends) -> FloatInterval {
        if i >= self.len {
            return if self.digit(i, ends.n) == ends.n { ends.a } else { ends.b };
        }
        let mut v = match self.end {
            End::A => ends.a,
            End::B => ends.b,
        };
        for k in (i..self.len).rev() {
            v = (FloatInterval::exact(self.word[k] as f64) + v).recip().expect("positive");
        }
        v
    }
}

struct Ends {
    n: u8,
    a: FloatInterval,
    b: FloatInterval,
}

fn distance(p: &Pt, q: &Pt, ends: &Ends) -> FloatInterval {
    let horizon = p.len.max(q.len) + 2;
    let Some(split) = (0..horizon).find(|&i| p.digit(i, ends.n) != q.digit(i, ends.n)) else {
        return FloatInterval::exact(0.0);
    };
    // Denominator row of M_v for the common prefix v.
    let (mut c, mut d) = (0u64, 1u64);
    for i in 0..split {
        // (c, d) <- (d, b_i d + c)
        let nd = p.digit(i, ends.n) as u64 * d + c;
        c = d;
        d = nd;
    }
    let (cf, df) = (FloatInterval::exact(c as f64), FloatInterval::exact(d as f64));
    let s1 = p.tail(split, ends);
    let s2 = q.tail(split, ends);
    let den = (cf * s1 + df) * (cf * s2 + df);
    (s1 - s2).abs().checked_div(den).expect("positive denominator")
}

struct Pending {
    id: GapId,
    hi: Pt,
    len: FloatInterval,
    n1: FloatInterval,
}

struct Scan<'a> {
    cantor: &'a BoundedCantor,
    ends: Ends,
    stack: Vec<Pending>,
    min_lo: f64,
    min_hi: f64,
    witness: Option<GapId>,
    gaps: usize,
}

impl Scan<'_> {
    fn longer(&self, a: &Pending, b_len: FloatInterval, b_id: &GapId) -> Result<bool> {
        // true iff |b| > |a| strictly
        if a.len.certainly_lt(b_len) {
            return Ok(true);
        }
        if b_len.certainly_lt(a.len) || a.len == b_len && a.id == *b_id {
            return Ok(false);
        }
        let la = gap_exact(self.cantor, &a.id)?.len;
        let lb = gap_exact(self.cantor, b_id)?.len;
        Ok(lb > la)
    }

    fn finish(&mut self, g: Pending, n2: FloatInterval) {
        let ratio = g.n1.min(n2).checked_div(g.len).expect("positive gap length");
        if ratio.lo < self.min_lo {
            self.min_lo = ratio.lo;
            self.witness = Some(g.id);
        }
        self.min_hi = self.min_hi.min(ratio.hi);
    }

    fn push(&mut self, word: &[u8], j: u8) -> Result<()> {
        let left = Pt::new(&[word, &[j + 1]].concat(), End::A);
        let right = Pt::new(&[word, &[j]].concat(), End::B);
        // M_word reverses orientation on odd depth.
        let (lo, hi) = if word.len().is_multiple_of(2) { (left, right) } else { (right, left) };
        let len = distance(&lo, &hi, &self.ends);
        let id = GapId { word: word.to_vec(), j };
        while let Some(top) = self.stack.last() {
            if !self.longer(top, len, &id)? {
                break;
            }
            let top = self.stack.pop().expect("non-empty");
            let n2 = distance(&top.hi, &lo, &self.ends);
            self.finish(top, n2);
        }
        let left_end = match self.stack.last() {
            Some(t) => t.hi,
            None => Pt::new(&[], End::A),
        };
        let n1 = distance(&left_end, &lo, &self.ends);
        self.stack.push(Pending { id, hi, len, n1 });
        self.gaps += 1;
        Ok(())
    }

    fn walk(&mut self, word: &mut Vec<u8>, depth: usize) -> Result<()> {
        if word.len() >= depth {
            return Ok(());
        }
        let n = self.cantor.bound();
        // Increasing local coordinate: child N, gap N-1, ..., gap 1, child 1.
        let mut order: Vec<(u8, bool)> = Vec::with_capacity(2 * n as usize);
        for d in (1..=n).rev() {
            order.push((d, true));
            if d > 1 {
                order.push((d - 1, false));
            }
        }
        if word.len() % 2 == 1 {
            order.reverse();
        }
        for (k, is_child) in order {
            if is_child {
                word.push(k);
                self.walk(word, depth)?;
                word.pop();
            } else {
                self.push(word, k)?;
            }
        }
        Ok(())
    }
}

/// The τ check by a single streaming pass with `f64` interval arithmetic.
/// Length comparisons that the enclosures cannot decide fall back to exact
/// arithmetic, so the neighbor structure matches [`tau_verify`].
pub fn tau_scan(cantor: &BoundedCantor, depth: usize, tau: &BigRational) -> Result<TauReport> {
    check_depth(depth, SCAN_DEPTH_LIMIT)?;
    let enc = |x: ExactNumber| FloatInterval::from_certified(&x.enclose(ENCLOSURE_BITS));
    let ends = Ends { n: cantor.bound(), a: enc(cantor.a()), b: enc(cantor.b()) };
    let mut scan = Scan { cantor, ends, stack: Vec::new(), min_lo: f64::INFINITY, min_hi: f64::INFINITY, witness: None, gaps: 0 };
    scan.walk(&mut Vec::with_capacity(depth), depth)?;
    let right_end = Pt::new(&[], End::B);
    while let Some(top) = scan.stack.pop() {
        let n2 = distance(&top.hi, &right_end, &scan.ends);
        scan.finish(top, n2);
    }
    let min_ratio = FloatInterval::new(scan.min_lo, scan.min_hi).to_certified();
    Ok(TauReport {
        depth,
        gaps: scan.gaps,
        passed: min_ratio.lo() >= tau,
        min_ratio,
        witness: scan.witness.expect("at least one gap"),
    })
}

/// [`tau_scan`] at every depth `1..=depth`.
pub fn tau_profile(cantor: &BoundedCantor, depth: usize, tau: &BigRational) -> Result<Vec<TauReport>> {
    (1..=depth).map(|d| tau_scan(cantor, d, tau)).collect()
}
