//! Property tests for exact and truncated scalar arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use padicmandel::{PadicScalar, Valuation};
use proptest::prelude::*;

/// Test-side valuation oracle for a nonzero fraction num/den: exponent of
/// p in num minus exponent of p in den (independent of reduction).
fn oracle_val(mut num: i64, mut den: i64, p: u64) -> i64 {
    assert!(num != 0 && den != 0);
    let p = p as i64;
    let mut v = 0;
    while num % p == 0 {
        num /= p;
        v += 1;
    }
    while den % p == 0 {
        den /= p;
        v -= 1;
    }
    v
}

fn scalar(p: u64, num: i64, den: i64) -> PadicScalar {
    PadicScalar::exact(p, BigRational::new(BigInt::from(num), BigInt::from(den)))
}

fn prime() -> impl Strategy<Value = u64> {
    prop_oneof![Just(2u64), Just(3), Just(5), Just(7)]
}

fn nonzero_fraction() -> impl Strategy<Value = (i64, i64)> {
    (
        (-1_000_000i64..=1_000_000).prop_filter("nonzero", |n| *n != 0),
        1i64..=10_000,
    )
}

proptest! {
    #[test]
    fn valuation_is_additive_under_multiplication(
        p in prime(),
        (an, ad) in nonzero_fraction(),
        (bn, bd) in nonzero_fraction(),
    ) {
        let a = scalar(p, an, ad);
        let b = scalar(p, bn, bd);
        let product = a.mul(&b).unwrap();
        let want = oracle_val(an, ad, p) + oracle_val(bn, bd, p);
        prop_assert_eq!(product.val(), Valuation::Finite(want));
    }

    #[test]
    fn ultrametric_inequality_holds(
        p in prime(),
        (an, ad) in nonzero_fraction(),
        (bn, bd) in nonzero_fraction(),
    ) {
        let a = scalar(p, an, ad);
        let b = scalar(p, bn, bd);
        let va = oracle_val(an, ad, p);
        let vb = oracle_val(bn, bd, p);
        let sum = a.add(&b).unwrap();
        match sum.val() {
            Valuation::Infinite => prop_assert_eq!(va, vb, "cancellation needs equal valuations"),
            Valuation::Finite(v) => {
                prop_assert!(v >= va.min(vb));
                if va != vb {
                    prop_assert_eq!(v, va.min(vb), "strict triangle must be an equality");
                }
            }
            Valuation::AtLeast(_) => prop_assert!(false, "exact sum must have exact valuation"),
        }
    }

    #[test]
    fn division_inverts_multiplication(
        p in prime(),
        (an, ad) in nonzero_fraction(),
        (bn, bd) in nonzero_fraction(),
    ) {
        let a = scalar(p, an, ad);
        let b = scalar(p, bn, bd);
        let back = a.div(&b).unwrap().mul(&b).unwrap();
        prop_assert!(back.sub(&a).unwrap().is_exact_zero());
    }

    #[test]
    fn display_parse_roundtrip_for_exact_values(
        p in prime(),
        (an, ad) in nonzero_fraction(),
    ) {
        let a = scalar(p, an, ad);
        let again = PadicScalar::parse(&a.to_string(), p).unwrap();
        prop_assert_eq!(again.as_exact(), a.as_exact());
    }

    #[test]
    fn truncation_agrees_to_the_kept_digits(
        p in prime(),
        (an, ad) in nonzero_fraction(),
        prec in 1u32..=40,
    ) {
        let a = scalar(p, an, ad);
        let t = a.truncate(prec).unwrap();
        let v = oracle_val(an, ad, p);
        // the discarded part starts at least prec digits above the unit
        let diff = a.sub(&t).unwrap();
        prop_assert!(
            diff.val().lower_bound().map_or(true, |l| l >= v + prec as i64),
            "difference valuation {:?} too small (v = {v}, prec = {prec})",
            diff.val()
        );
    }

    #[test]
    fn reduction_mod_power_leaves_high_tail(
        p in prime(),
        (an, ad) in nonzero_fraction(),
        abs in -6i64..=12,
    ) {
        let a = scalar(p, an, ad);
        let r = a.reduce_mod(abs);
        let diff = a.sub(&r).unwrap();
        prop_assert!(
            diff.val().lower_bound().map_or(true, |l| l >= abs),
            "v(x - reduce_mod(x, {abs})) = {:?}",
            diff.val()
        );
    }

    #[test]
    fn canonical_representative_is_close_and_canonical(
        p in prime(),
        (an, ad) in nonzero_fraction(),
        prec in 5u32..=30,
        abs in 0i64..=4,
    ) {
        let a = scalar(p, an, ad);
        let v = oracle_val(an, ad, p);
        let t = a.truncate(prec).unwrap();
        // representative is only defined where digits are actually stored
        prop_assume!(v + prec as i64 >= abs);
        let r = t.canonical_representative(abs).unwrap();
        prop_assert!(r.is_exact());
        let diff = a.sub(&r).unwrap();
        prop_assert!(
            diff.val().lower_bound().map_or(true, |l| l >= abs),
            "representative differs below p^{abs}: {:?}",
            diff.val()
        );
    }
}

#[test]
fn truncated_arithmetic_tracks_precision_loss() {
    // (1 + O(2^8)) * 2^3 has valuation 3 and eight significant digits;
    // subtracting two such values can only lose precision, never invent it.
    let a = PadicScalar::truncated(2, 3, 1u32.into(), 8).unwrap();
    let b = PadicScalar::truncated(2, 3, 1u32.into(), 8).unwrap();
    let diff = a.sub(&b).unwrap();
    match diff.val() {
        Valuation::AtLeast(l) => assert_eq!(l, 11),
        Valuation::Infinite => {}
        Valuation::Finite(v) => panic!("exact valuation {v} from inexact cancellation"),
    }
}
