use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use proptest::prelude::*;

use mdcf::cf::{self, CfExpansion, Digit};
use mdcf::dcf::{self, DiagonalSequence};
use mdcf::hall::{self, BoundedCantor, Cylinder};
use mdcf::legendre::{legendre_direct, legendre_prefix, legendre_test_with};
use mdcf::rational::{int, pow10, ratio};
use mdcf::{CertifiedInterval, ExactNumber};

fn width(exp: u32) -> BigRational {
    BigRational::new(1.into(), pow10(exp))
}

fn periodic_cf() -> impl Strategy<Value = CfExpansion> {
    (0i64..3, prop::collection::vec(1u64..=9, 0..6), prop::collection::vec(1u64..=9, 1..4))
        .prop_map(|(a0, pre, period)| CfExpansion::periodic(a0, pre, period).unwrap())
}

fn digit_list(cf: &CfExpansion, n: usize) -> Vec<Digit> {
    (1..=n).map(|i| cf.digit(i).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn determinant_identity(cf in periodic_cf()) {
        let t = cf::convergents(&cf, 30).unwrap();
        for nu in 0..=30 {
            let expected = if nu % 2 == 0 { -1 } else { 1 };
            prop_assert_eq!(t.determinant(nu), BigInt::from(expected));
        }
    }

    #[test]
    fn tail_identity_encloses_value(cf in periodic_cf(), nu in 1usize..20) {
        let t = cf::convergents(&cf, nu).unwrap();
        let tail = cf::tail_value(&cf, nu + 1, &width(30)).unwrap();
        let p = |k: usize| BigRational::from_integer(t.p(k).clone());
        let q = |k: usize| BigRational::from_integer(t.q(k).clone());
        let num = tail.scale(&p(nu)).add_scalar(&BigRational::from_integer(t.p_prev(nu)));
        let den = tail.scale(&q(nu)).add_scalar(&BigRational::from_integer(t.q_prev(nu)));
        let via_tail = num.div(&den).unwrap();
        let direct = cf::value_enclosure(&cf, &width(30)).unwrap();
        prop_assert!(via_tail.intersect(&direct).is_some());
    }

    #[test]
    fn surd_reexpands_to_its_digits(cf in periodic_cf()) {
        let x = cf::surd_of_periodic(&cf).unwrap();
        let (a0, digits) = cf::digits_of(&x, 50).unwrap();
        prop_assert_eq!(&a0, cf.a0());
        prop_assert_eq!(digits, digit_list(&cf, 50));
    }

    #[test]
    fn refinement_is_nested(cf in periodic_cf(), nu in 1usize..10, exp in 4u32..20) {
        let coarse = cf::tail_value(&cf, nu, &width(exp)).unwrap();
        let fine = cf::tail_value(&cf, nu, &width(exp + 6)).unwrap();
        prop_assert!(coarse.contains_interval(&fine));
    }

    #[test]
    fn tail_test_agrees_with_direct_comparison(cf in periodic_cf()) {
        let t = cf::convergents(&cf, 25).unwrap();
        for nu in 1..=25 {
            let tail = legendre_test_with(&cf, &t, nu, cf::DEFAULT_MAX_DEPTH).unwrap();
            if let Some(direct) = legendre_direct(&cf, &t, nu, &width(60)).unwrap() {
                prop_assert_eq!(tail, direct, "ν = {}", nu);
            }
        }
    }

    #[test]
    fn selection_ignores_depth_schedule(cf in periodic_cf()) {
        let (deep, e1) = legendre_prefix(&cf, 30, cf::DEFAULT_MAX_DEPTH).unwrap();
        let (shallow, e2) = legendre_prefix(&cf, 30, 64).unwrap();
        prop_assert!(e1.is_none() && e2.is_none());
        prop_assert_eq!(deep, shallow);
    }

    #[test]
    fn vahlen_on_random_digits(pre in prop::collection::vec(1u64..=5, 50)) {
        let cf = CfExpansion::periodic(0, pre, vec![1]).unwrap();
        prop_assert!(mdcf::vahlen_violations(&cf, 50).unwrap().is_empty());
    }

    #[test]
    fn every_pair_is_classified_and_valued(cf in periodic_cf()) {
        let seq = DiagonalSequence::compute(&cf, 15).unwrap();
        prop_assert_eq!(seq.classes().len(), seq.pairs());
        let values = seq.values(&cf, 0..=seq.pairs() - 1, &width(12)).unwrap();
        prop_assert_eq!(values.len(), seq.pairs());
        for (n, v) in values.iter().enumerate() {
            prop_assert_eq!(v.n, n);
            prop_assert_eq!(v.class, seq.classes()[n]);
            prop_assert!(v.value.lo() >= &ratio(1, 4));
        }
    }

    /// Values at pairs whose convergent indices differ by a multiple of the
    /// period agree once `α*_ν` has converged.
    #[test]
    fn periodic_values_repeat(period in prop::collection::vec(1u64..=5, 1..4)) {
        let cf = CfExpansion::periodic(0, vec![], period.clone()).unwrap();
        let len = period.len();
        let seq = DiagonalSequence::compute(&cf, 60).unwrap();
        let values = seq.values(&cf, 30..=59, &width(14)).unwrap();
        let mut matched = 0;
        for a in &values {
            for b in &values {
                let same_kind = a.class.label() == b.class.label();
                if same_kind && b.class.nu() == a.class.nu() + len {
                    let gap = (a.value.midpoint() - b.value.midpoint()).abs();
                    prop_assert!(gap < ratio(1, 10_000_000_000), "n = {} vs {}", a.n, b.n);
                    matched += 1;
                }
            }
        }
        prop_assert!(matched > 0);
    }

    #[test]
    fn h_box_image_contains_samples(
        r1 in 6u64..12,
        dr in 0u64..2,
        xs in (0u32..1000, 1u32..200),
        ys in (0u32..1000, 1u32..200),
        t in (0u32..=16, 0u32..=16),
    ) {
        let r2 = r1 + dr;
        let lerp = |lo: u32, w: u32, k: u32| {
            let a = ratio(17, 100) + ratio(lo as i64, 1000) * ratio(68, 100);
            let b = &a + ratio(w as i64, 1000) * ratio(68, 100);
            let pt = &a + (&b - &a) * ratio(k as i64, 16);
            (CertifiedInterval::hull(a, b), pt)
        };
        let (x, px) = lerp(xs.0, xs.1, t.0);
        let (y, py) = lerp(ys.0, ys.1, t.1);
        let image = hall::h_map(r1, r2, &x, &y).unwrap();
        prop_assert!(image.contains(&hall::h_point(r1, r2, &px, &py).unwrap()));
    }

    #[test]
    fn hall_solve_is_self_certifying(k in 0u32..1000) {
        let omega0 = hall::omega0(6).unwrap().enclose(80);
        let lo = ratio(2501, 10000);
        let m = &lo + (omega0.lo() - &lo) * ratio(k as i64, 1000);
        let (r1, r2) = mdcf::select_pair(&m, 6, 10_000).unwrap();
        let eps = width(8);
        let s = mdcf::hall_solve(&m, r1, r2, &eps).unwrap();
        prop_assert!(s.image.contains(&m));
        prop_assert!(s.image.width() <= eps);
        prop_assert_eq!(mdcf::hall_solve(&m, r1, r2, &eps).unwrap(), s);
    }
}

#[test]
fn kernels_are_at_least_a_quarter_on_a_grid() {
    let quarter = ratio(1, 4);
    let step = ratio(99, 100 * 60);
    for i in 0..=60 {
        for j in 0..=60 {
            let x = &step * int(i);
            let y = &step * int(j);
            assert!(dcf::f_point(&x, &y).unwrap() >= quarter, "F at ({x}, {y})");
            let g = dcf::kernel_g(&CertifiedInterval::point(x.clone()), &CertifiedInterval::point(y.clone())).unwrap();
            assert!(g.lo() >= &quarter);
        }
    }
}

#[test]
fn kernel_f_boxes_stay_above_a_quarter() {
    let n = 40;
    let step = ratio(99, 100 * n);
    for i in 0..n {
        for j in 0..n {
            let bx = CertifiedInterval::hull(&step * int(i), &step * int(i + 1));
            let by = CertifiedInterval::hull(&step * int(j), &step * int(j + 1));
            assert!(dcf::kernel_f(&bx, &by).unwrap().lo() >= &ratio(1, 4));
        }
    }
}

fn phi_at(x: &BigRational, y: &BigRational) -> CertifiedInterval {
    hall::phi(&CertifiedInterval::point(x.clone()), &CertifiedInterval::point(y.clone())).unwrap()
}

/// `∂φ/∂x = -4 + 6x + y(3 - 8x + 3x²)` is negative for `x < 2/3` and every
/// `y`; the arguments that occur in `H` are at most `1/6`.
#[test]
fn phi_decreases_in_x_below_two_thirds_and_increases_in_y() {
    let n = 40i64;
    let at = |k: i64| ratio(5, 100) + ratio(85, 100) * ratio(k, n);
    for i in 0..n {
        for j in 0..n {
            let (x0, x1, y0, y1) = (at(i), at(i + 1), at(j), at(j + 1));
            if x1 <= ratio(2, 3) {
                assert!(phi_at(&x1, &y0).certainly_lt(&phi_at(&x0, &y0)), "x step at ({x0}, {y0})");
            }
            assert!(phi_at(&x0, &y1).certainly_gt(&phi_at(&x0, &y0)), "y step at ({x0}, {y0})");
        }
    }
}

/// Monotonicity in `x` over all of `(0, 1)` fails near `y = 0`.
#[test]
fn phi_increases_in_x_past_two_thirds_for_small_y() {
    let y = ratio(5, 100);
    assert!(phi_at(&ratio(80, 100), &y).certainly_gt(&phi_at(&ratio(75, 100), &y)));
}

/// Word order with alternating direction: `[w]` lies left of `[w']` when the
/// first differing digit is larger at an even position.
fn cylinder_order(a: &[u8], b: &[u8]) -> std::cmp::Ordering {
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        if x != y {
            return if i % 2 == 0 { y.cmp(x) } else { x.cmp(y) };
        }
    }
    std::cmp::Ordering::Equal
}

#[test]
fn cylinders_and_gaps_tile_the_root() {
    let c = BoundedCantor::f5();
    let root = Cylinder::root(&c);
    for depth in 1..=4 {
        let mut level = vec![root.clone()];
        for _ in 0..depth {
            level = level.iter().flat_map(|cyl| cyl.children(&c)).collect();
        }
        assert_eq!(level.len(), 5usize.pow(depth as u32));
        level.sort_by(|a, b| a.lo().cmp(b.lo()));
        for w in level.windows(2) {
            assert!(w[0].hi() < w[1].lo());
            assert_eq!(cylinder_order(w[0].prefix(), w[1].prefix()), std::cmp::Ordering::Less);
        }
        let gaps = hall::enumerate_gaps(depth).unwrap();
        let mut total = ExactNumber::zero();
        for cyl in &level {
            total = total.add(&cyl.length()).unwrap();
        }
        for g in gaps.gaps() {
            total = total.add(&g.len).unwrap();
        }
        assert_eq!(total, root.length());
        assert_eq!(gaps.gaps().len(), level.len() - 1);
    }
}

#[test]
fn tau_profile_never_increases() {
    let tau = ratio(1788, 1000);
    let profile = hall::tau_profile(&BoundedCantor::f5(), 7, &tau).unwrap();
    for w in profile.windows(2) {
        assert!(w[1].min_ratio.lo() <= w[0].min_ratio.hi());
    }
}
