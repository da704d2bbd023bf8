//! Property tests for Newton polygons against polynomials with known
//! roots.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use padicmandel::{shift_compare, MonicPolynomial, NewtonPolygon, PadicScalar, Rational};
use proptest::prelude::*;

fn power(p: u64, v: i64) -> BigRational {
    if v >= 0 {
        BigRational::from_integer(BigInt::from(p).pow(v as u32))
    } else {
        BigRational::new(BigInt::one(), BigInt::from(p).pow((-v) as u32))
    }
}

/// Monic product of (z - r) over the roots, low-to-high coefficients.
fn expand(roots: &[BigRational]) -> Vec<BigRational> {
    let mut coeffs = vec![BigRational::one()];
    for r in roots {
        let mut next = vec![BigRational::zero(); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i + 1] = &next[i + 1] + c;
            next[i] = &next[i] - &(c * r);
        }
        coeffs = next;
    }
    coeffs
}

#[derive(Debug, Clone)]
struct Split {
    p: u64,
    zero_mult: usize,
    /// (valuation, unit) pairs for the nonzero roots u * p^v.
    parts: Vec<(i64, i64)>,
}

fn unit_for(p: u64) -> impl Strategy<Value = i64> {
    (-9i64..=9).prop_filter("nonzero unit", move |u| *u != 0 && u.unsigned_abs() % p != 0)
}

fn split_poly() -> impl Strategy<Value = Split> {
    prop_oneof![Just(2u64), Just(3), Just(5), Just(7), Just(11), Just(13)].prop_flat_map(|p| {
        (0usize..=2, 1usize..=5).prop_flat_map(move |(zero_mult, nonzero)| {
            proptest::collection::vec((-3i64..=3, unit_for(p)), nonzero)
                .prop_map(move |parts| Split { p, zero_mult, parts })
        })
    })
}

fn polygon_of(split: &Split) -> (NewtonPolygon, Vec<PadicScalar>) {
    let mut roots = vec![BigRational::zero(); split.zero_mult];
    for &(v, u) in &split.parts {
        roots.push(BigRational::from_integer(BigInt::from(u)) * power(split.p, v));
    }
    let coeffs: Vec<PadicScalar> = expand(&roots)
        .into_iter()
        .map(|q| PadicScalar::exact(split.p, q))
        .collect();
    (NewtonPolygon::from_coeffs(split.p, &coeffs).unwrap(), coeffs)
}

proptest! {
    #[test]
    fn root_valuations_match_the_construction(split in split_poly()) {
        let (polygon, _) = polygon_of(&split);
        let mut expected: Vec<Option<Rational>> = vec![None; split.zero_mult];
        let mut vals: Vec<i64> = split.parts.iter().map(|&(v, _)| v).collect();
        vals.sort_unstable_by(|a, b| b.cmp(a));
        expected.extend(vals.into_iter().map(|v| Some(Rational::from_integer(v))));
        prop_assert_eq!(polygon.zero_root_count(), split.zero_mult as u64);
        prop_assert_eq!(polygon.root_valuations(), expected);
    }

    #[test]
    fn disk_counts_are_monotone_and_exhaustive(split in split_poly()) {
        let (polygon, _) = polygon_of(&split);
        let mut last = polygon.count_roots_in_disk(Rational::from_integer(-10));
        for s in -9i64..=10 {
            let count = polygon.count_roots_in_disk(Rational::from_integer(s));
            prop_assert!(count >= last, "count dropped between s = {} and {s}", s - 1);
            last = count;
        }
        // every root has valuation >= -10 here, so the big disk holds all
        prop_assert_eq!(last, polygon.root_count());
        prop_assert_eq!(last, (split.zero_mult + split.parts.len()) as u64);
    }

    #[test]
    fn scaling_by_a_power_shifts_vertices_only(split in split_poly(), shift in -3i64..=3) {
        let (polygon, coeffs) = polygon_of(&split);
        let factor = PadicScalar::exact(split.p, power(split.p, shift));
        let scaled: Vec<PadicScalar> =
            coeffs.iter().map(|c| c.mul(&factor).unwrap()).collect();
        let scaled_polygon = NewtonPolygon::from_coeffs(split.p, &scaled).unwrap();
        prop_assert_eq!(polygon.segments(), scaled_polygon.segments());
        for (&(i, v), &(j, w)) in polygon.vertices().iter().zip(scaled_polygon.vertices()) {
            prop_assert_eq!(i, j);
            prop_assert_eq!(v + shift, w);
        }
    }

    #[test]
    fn derivative_polygon_is_a_unit_shift_for_large_primes(
        zero_mult in 1usize..=2,
        parts in proptest::collection::vec((-3i64..=3, unit_for(13)), 1usize..=5),
    ) {
        // p = 13 exceeds every degree produced here (at most 7)
        let split = Split { p: 13, zero_mult, parts };
        let (_, coeffs) = polygon_of(&split);
        let degree = coeffs.len() - 1;
        let inner = coeffs[1..degree].to_vec();
        let f = MonicPolynomial::new(13, inner);
        prop_assert!(shift_compare(&f).unwrap().translated_equal);
    }
}
