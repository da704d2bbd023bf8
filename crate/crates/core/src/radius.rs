//! What is known about the critical radius r(d, p): exact values where a
//! proof exists, a claimed value for one family, and certified lower bounds
//! elsewhere — together with a symbolic witness construction that realizes
//! each lower bound by an explicit post-critically finite polynomial.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::newton::format_rational;
use crate::qring::QuotientRing;
use crate::scalar::Rational;

/// Simple deterministic primality test; inputs here are tiny.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut f = 2u64;
    while f * f <= n {
        if n % f == 0 {
            return false;
        }
        f += 1;
    }
    true
}

/// The base-p shape of a degree: d = a·p^k + b with p^k < d ≤ p^{k+1},
/// 1 ≤ a < p, 1 ≤ b < p^k, and ℓ the exact power of p dividing d.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decomposition {
    pub k: u32,
    pub ell: u32,
    pub a: u64,
    pub b: u64,
}

fn p_power_below(d: u64, p: u64) -> (u32, u64) {
    // largest k with p^k < d, together with p^k
    let mut k = 0u32;
    let mut pk = 1u64;
    while pk.saturating_mul(p) < d {
        pk *= p;
        k += 1;
    }
    (k, pk)
}

fn exact_p_power_in(d: u64, p: u64) -> u32 {
    let mut ell = 0u32;
    let mut m = d;
    while m % p == 0 {
        m /= p;
        ell += 1;
    }
    ell
}

fn validate_pair(d: u64, p: u64) -> Result<(u32, u64)> {
    if p < 2 || d < 2 {
        return Err(Error::Domain(format!("degree {d} and prime {p} must both be at least 2")));
    }
    if p >= d {
        return Err(Error::Domain(format!("decomposition requires p < d, got d={d}, p={p}")));
    }
    let (k, pk) = p_power_below(d, p);
    if pk * p == d {
        return Err(Error::Domain(format!("decomposition requires d not a power of p, got {d} = {p}^{}", k + 1)));
    }
    Ok((k, pk))
}

/// Decompose d = a·p^k + b. Errors when p ≥ d, d is a power of p, or the
/// remainder b would be zero (no (a, b) in the admissible range).
pub fn decompose(d: u64, p: u64) -> Result<Decomposition> {
    let (k, pk) = validate_pair(d, p)?;
    let a = d / pk;
    let b = d % pk;
    if b == 0 {
        return Err(Error::Domain(format!("no admissible remainder: {p}^{k} divides {d}")));
    }
    debug_assert!(a >= 1 && a < p);
    debug_assert!(b >= 1 && b < pk);
    Ok(Decomposition { k, ell: exact_p_power_in(d, p), a, b })
}

/// Certified lower bound a(k−ℓ)p^k/(d−1) for r(d, p). Degenerates to 0
/// when p^k | d (then k = ℓ and no witness with negative valuation exists).
pub fn lower_bound(d: u64, p: u64) -> Result<Rational> {
    let (_, pk) = validate_pair(d, p)?;
    if d % pk == 0 {
        return Ok(Rational::zero());
    }
    let dec = decompose(d, p)?;
    let num = dec.a as i64 * (dec.k as i64 - dec.ell as i64) * pk as i64;
    Ok(Rational::new(num, d as i64 - 1))
}

/// How much is known about r(d, p).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RadiusKind {
    /// Proven exact value; `source` names the case that applies.
    Exact { value: Rational, source: &'static str },
    /// Asserted value with no accompanying proof.
    Claimed { value: Rational, note: &'static str },
    /// Only a certified lower bound; no finite upper bound is known.
    Bounds { lower: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadiusAnswer {
    pub d: u64,
    pub p: u64,
    pub kind: RadiusKind,
}

impl RadiusAnswer {
    /// Compact cell text for tables: exact values plain, claimed values
    /// with a trailing '?', bounds as '>=x'.
    pub fn cell(&self) -> String {
        match &self.kind {
            RadiusKind::Exact { value, .. } => format_rational(*value),
            RadiusKind::Claimed { value, .. } => format!("{}?", format_rational(*value)),
            RadiusKind::Bounds { lower } => format!(">={}", format_rational(*lower)),
        }
    }

    pub fn tag(&self) -> &'static str {
        match &self.kind {
            RadiusKind::Exact { source, .. } => source,
            RadiusKind::Claimed { .. } => "claimed",
            RadiusKind::Bounds { .. } => "lower bound",
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match &self.kind {
            RadiusKind::Exact { value, source } => json!({
                "d": self.d,
                "p": self.p,
                "kind": "exact",
                "value": format_rational(*value),
                "source": source,
            }),
            RadiusKind::Claimed { value, note } => json!({
                "d": self.d,
                "p": self.p,
                "kind": "claimed",
                "value": format_rational(*value),
                "note": note,
            }),
            RadiusKind::Bounds { lower } => json!({
                "d": self.d,
                "p": self.p,
                "kind": "bounds",
                "lower": format_rational(*lower),
                "upper": "unknown",
            }),
        }
    }
}

impl std::fmt::Display for RadiusAnswer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            RadiusKind::Exact { value, source } => {
                write!(f, "Exact {} ({})", format_rational(*value), source)
            }
            RadiusKind::Claimed { value, note } => {
                write!(f, "Claimed {} ({})", format_rational(*value), note)
            }
            RadiusKind::Bounds { lower } => {
                write!(f, "Bounds [{}, unknown)", format_rational(*lower))
            }
        }
    }
}

/// The best current answer for r(d, p). Categories are checked in a fixed
/// order so overlapping cases (e.g. d = 4, p = 2 is both d = p^k and
/// d = 2p) always report the same tag.
pub fn known_radius(d: u64, p: u64) -> RadiusAnswer {
    assert!(d >= 2 && p >= 2, "known_radius requires d >= 2 and p >= 2");
    let exact = |value: Rational, source: &'static str| RadiusAnswer {
        d,
        p,
        kind: RadiusKind::Exact { value, source },
    };
    if p > d {
        return exact(Rational::zero(), "p>d");
    }
    // d a power of p (includes d = p itself)
    let mut m = d;
    while m % p == 0 {
        m /= p;
    }
    if m == 1 {
        return exact(Rational::zero(), "d=p^k");
    }
    if d == 2 * p {
        return exact(Rational::zero(), "d=2p");
    }
    if 2 * p > d && p < d {
        return exact(Rational::new(p as i64, d as i64 - 1), "d/2<p<d");
    }
    // The d = 3p assertion only makes sense where the certified lower
    // bound degenerates to 0 (3 < p, so p itself is the largest power of p
    // below d). For p = 2 the witness construction certifies
    // r(6, 2) >= 4/5, so the assertion cannot apply there.
    if d == 3 * p && p > 3 {
        return RadiusAnswer {
            d,
            p,
            kind: RadiusKind::Claimed { value: Rational::zero(), note: "stated without proof" },
        };
    }
    let lower = lower_bound(d, p).unwrap_or_else(|_| Rational::zero());
    RadiusAnswer { d, p, kind: RadiusKind::Bounds { lower } }
}

/// A post-critically finite polynomial z^b (z − α)^{a p^k} realizing the
/// lower bound, with α a root of α^{d−1} = c for an explicit rational c.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PcfWitness {
    pub d: u64,
    pub p: u64,
    pub decomposition: Decomposition,
    /// Multiplicity b of the critical point 0.
    pub inner_multiplicity: u64,
    /// Multiplicity a·p^k of the critical point α.
    pub outer_multiplicity: u64,
    /// The constant with α^{d−1} = c.
    pub c: BigRational,
    /// Valuation of α, equal to v_p(c)/(d−1).
    pub v_alpha: Rational,
    pub shape: String,
}

impl PcfWitness {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "d": self.d,
            "p": self.p,
            "k": self.decomposition.k,
            "ell": self.decomposition.ell,
            "a": self.decomposition.a,
            "b": self.decomposition.b,
            "c": self.c.to_string(),
            "v_alpha": format_rational(self.v_alpha),
            "shape": self.shape,
        })
    }
}

fn int_val(n: &BigInt, p: u64) -> i64 {
    assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut v = 0i64;
    let mut m = n.abs();
    loop {
        let (q, r) = num_integer::Integer::div_rem(&m, &p);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

fn rational_val(q: &BigRational, p: u64) -> i64 {
    int_val(q.numer(), p) - int_val(q.denom(), p)
}

/// Construct the witness data for (d, p). The identity
/// v_p(c) = −a(k−ℓ)p^k is checked and a mismatch is an internal error.
pub fn pcf_witness(d: u64, p: u64) -> Result<PcfWitness> {
    let dec = decompose(d, p)?;
    let pk = p.pow(dec.k);
    let n = dec.a * pk; // outer multiplicity
    let b = dec.b;
    let num = BigInt::from(d).pow(d as u32);
    let den = BigInt::from(-(n as i64)).pow(n as u32) * BigInt::from(b).pow(b as u32);
    let c = BigRational::new(num, den);
    let vc = rational_val(&c, p);
    let expected = -((dec.a as i64) * (dec.k as i64 - dec.ell as i64) * pk as i64);
    if vc != expected {
        return Err(Error::Domain(format!(
            "witness consistency check failed for (d={d}, p={p}): v_p(c) = {vc}, expected {expected}"
        )));
    }
    let v_alpha = Rational::new(vc, d as i64 - 1);
    Ok(PcfWitness {
        d,
        p,
        decomposition: dec,
        inner_multiplicity: b,
        outer_multiplicity: n,
        c,
        v_alpha,
        shape: format!("z^{b} (z - alpha)^{n}"),
    })
}

/// Results of the three symbolic identities behind the witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WitnessChecks {
    /// f(α) = 0.
    pub f_of_alpha_is_zero: bool,
    /// f((b/d)α) = α after reduction by α^{d−1} = c.
    pub f_of_inner_critical_is_alpha: bool,
    /// f'(z) = d·z^{b−1}(z−α)^{ap^k−1}(z − (b/d)α) as polynomials.
    pub critical_set_correct: bool,
}

impl WitnessChecks {
    pub fn all(&self) -> bool {
        self.f_of_alpha_is_zero && self.f_of_inner_critical_is_alpha && self.critical_set_correct
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "f_of_alpha_is_zero": self.f_of_alpha_is_zero,
            "f_of_inner_critical_is_alpha": self.f_of_inner_critical_is_alpha,
            "critical_set_correct": self.critical_set_correct,
        })
    }
}

/// Verify the witness identities in the quotient ring ℚ[α]/(α^{d−1} − c),
/// entirely in exact rational arithmetic.
pub fn verify_pcf_witness(d: u64, p: u64) -> Result<WitnessChecks> {
    let w = pcf_witness(d, p)?;
    let ring = QuotientRing::new(d as usize - 1, w.c.clone());
    let alpha = ring.alpha();
    let b = w.inner_multiplicity as usize;
    let n = w.outer_multiplicity as usize;

    // (z - alpha)^n, coefficients in the ring
    let lin = vec![ring.sub(&ring.zero(), &alpha), ring.one()];
    let mut shifted = vec![ring.one()];
    for _ in 0..n {
        shifted = ring.poly_mul(&shifted, &lin);
    }
    // f(z) = z^b (z - alpha)^n
    let mut zb = vec![ring.zero(); b];
    zb.push(ring.one());
    let f = ring.poly_mul(&zb, &shifted);

    let f_of_alpha_is_zero = ring.poly_eval(&f, &alpha).is_zero();

    let b_over_d = BigRational::new(BigInt::from(w.inner_multiplicity), BigInt::from(d));
    let inner = ring.scale(&alpha, &b_over_d);
    let f_of_inner_critical_is_alpha = ring.poly_eval(&f, &inner) == alpha;

    // expected derivative d·z^{b-1}(z-alpha)^{n-1}(z - (b/d) alpha)
    let deriv = ring.poly_derivative(&f);
    let mut zb1 = vec![ring.zero(); b - 1];
    zb1.push(ring.one());
    let mut shifted1 = vec![ring.one()];
    for _ in 0..n - 1 {
        shifted1 = ring.poly_mul(&shifted1, &lin);
    }
    let last = vec![ring.sub(&ring.zero(), &inner), ring.one()];
    let mut expected = ring.poly_mul(&zb1, &shifted1);
    expected = ring.poly_mul(&expected, &last);
    let d_rat = BigRational::from_integer(BigInt::from(d));
    let expected: Vec<_> = expected.iter().map(|e| ring.scale(e, &d_rat)).collect();
    let critical_set_correct = deriv == expected;

    Ok(WitnessChecks { f_of_alpha_is_zero, f_of_inner_critical_is_alpha, critical_set_correct })
}

fn factorial_valuation(n: u64, p: u64) -> i64 {
    let mut total = 0i64;
    let mut q = p;
    loop {
        total += (n / q) as i64;
        match q.checked_mul(p) {
            Some(next) if next <= n => q = next,
            _ => break,
        }
    }
    total
}

fn binomial_valuation(n: u64, j: u64, p: u64) -> i64 {
    factorial_valuation(n, p) - factorial_valuation(j, p) - factorial_valuation(n - j, p)
}

/// Escape radius of the witness polynomial computed from coefficient
/// valuations alone: the coefficient of z^{d−j} is binom(n, j)(−α)^j, so
/// its valuation is v_p(binom(n, j)) + j·v(α).
pub fn witness_escape_radius(d: u64, p: u64) -> Result<Rational> {
    let w = pcf_witness(d, p)?;
    let n = w.outer_multiplicity;
    let mut r = Rational::zero();
    for j in 1..=n {
        let vj = Rational::from_integer(binomial_valuation(n, j, p)) + w.v_alpha * Rational::from_integer(j as i64);
        let cand = -vj / Rational::from_integer(j as i64);
        if cand > r {
            r = cand;
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(decompose(3, 2).unwrap(), Decomposition { k: 1, ell: 0, a: 1, b: 1 });
        assert_eq!(decompose(5, 2).unwrap(), Decomposition { k: 2, ell: 0, a: 1, b: 1 });
        assert_eq!(decompose(12, 2).unwrap(), Decomposition { k: 3, ell: 2, a: 1, b: 4 });
        assert_eq!(decompose(7, 5).unwrap(), Decomposition { k: 1, ell: 0, a: 1, b: 2 });
    }

    #[test]
    fn decompose_domain_errors() {
        assert!(decompose(3, 5).is_err()); // p > d
        assert!(decompose(3, 3).is_err()); // p = d
        assert!(decompose(4, 2).is_err()); // power of p
        assert!(decompose(6, 3).is_err()); // remainder zero
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(lower_bound(3, 2).unwrap(), rat(1, 1));
        assert_eq!(lower_bound(5, 2).unwrap(), rat(2, 1));
        assert_eq!(lower_bound(6, 3).unwrap(), Rational::zero());
        assert_eq!(lower_bound(12, 2).unwrap(), rat(8, 11));
    }

    #[test]
    fn known_radius_exact_cases() {
        let r32 = known_radius(3, 2);
        assert_eq!(r32.kind, RadiusKind::Exact { value: rat(1, 1), source: "d/2<p<d" });
        let r53 = known_radius(5, 3);
        assert_eq!(r53.kind, RadiusKind::Exact { value: rat(3, 4), source: "d/2<p<d" });
        for (d, p, tag) in [(4u64, 2u64, "d=p^k"), (8, 2, "d=p^k"), (10, 5, "d=2p"), (6, 3, "d=2p")] {
            match known_radius(d, p).kind {
                RadiusKind::Exact { value, source } => {
                    assert_eq!(value, Rational::zero(), "r({d},{p})");
                    assert_eq!(source, tag, "tag for ({d},{p})");
                }
                other => panic!("expected exact for ({d},{p}), got {other:?}"),
            }
        }
        for d in 2..=10u64 {
            for p in [2u64, 3, 5, 7, 11, 13].into_iter().filter(|&p| p > d) {
                assert_eq!(
                    known_radius(d, p).kind,
                    RadiusKind::Exact { value: Rational::zero(), source: "p>d" }
                );
            }
        }
    }

    #[test]
    fn known_radius_claimed_and_bounds() {
        match known_radius(15, 5).kind {
            RadiusKind::Claimed { value, .. } => assert_eq!(value, Rational::zero()),
            other => panic!("expected claimed, got {other:?}"),
        }
        match known_radius(5, 2).kind {
            RadiusKind::Bounds { lower } => assert_eq!(lower, rat(2, 1)),
            other => panic!("expected bounds, got {other:?}"),
        }
        // d = 3p does not fall in the degenerate case when p = 2: the
        // witness certifies a positive lower bound, so no zero is claimed.
        match known_radius(6, 2).kind {
            RadiusKind::Bounds { lower } => assert_eq!(lower, rat(4, 5)),
            other => panic!("expected bounds for (6,2), got {other:?}"),
        }
        assert_eq!(known_radius(5, 2).to_string(), "Bounds [2, unknown)");
        assert_eq!(known_radius(3, 2).to_string(), "Exact 1 (d/2<p<d)");
    }

    #[test]
    fn exact_values_never_below_lower_bound() {
        for d in 3..=20u64 {
            for p in [2u64, 3, 5, 7, 11, 13, 17, 19] {
                let Ok(lb) = lower_bound(d, p) else { continue };
                match known_radius(d, p).kind {
                    RadiusKind::Exact { value, .. } => {
                        assert!(value >= lb, "r({d},{p}) = {value} below bound {lb}")
                    }
                    RadiusKind::Claimed { value, .. } => {
                        assert!(value >= lb, "claimed r({d},{p}) = {value} below bound {lb}")
                    }
                    RadiusKind::Bounds { lower } => assert_eq!(lower, lb),
                }
            }
        }
    }

    #[test]
    fn upper_half_range_matches_exact_formula() {
        for d in 3..=40u64 {
            for p in 2..d {
                if !is_prime(p) || 2 * p <= d {
                    continue;
                }
                assert_eq!(lower_bound(d, p).unwrap(), rat(p as i64, d as i64 - 1));
            }
        }
    }

    #[test]
    fn witness_examples() {
        let w = pcf_witness(3, 2).unwrap();
        assert_eq!(w.c, BigRational::new(BigInt::from(27), BigInt::from(4)));
        assert_eq!(w.v_alpha, rat(-1, 1));
        assert_eq!(w.shape, "z^1 (z - alpha)^2");

        let w = pcf_witness(5, 2).unwrap();
        assert_eq!(w.c, BigRational::new(BigInt::from(3125), BigInt::from(256)));
        assert_eq!(w.v_alpha, rat(-2, 1));

        let w = pcf_witness(6, 5).unwrap();
        assert_eq!(w.c, BigRational::new(BigInt::from(-46656), BigInt::from(3125)));
        assert_eq!(w.v_alpha, rat(-1, 1));
        // the witness realizes the exact value of r(6, 5)
        assert_eq!(-w.v_alpha, rat(5, 5));
    }

    #[test]
    fn witness_verifies_symbolically() {
        for (d, p) in [(3u64, 2u64), (5, 2), (7, 5), (12, 2), (13, 3)] {
            let checks = verify_pcf_witness(d, p).unwrap();
            assert!(checks.all(), "witness identities failed for ({d},{p}): {checks:?}");
        }
    }

    #[test]
    fn witness_sweep_small_degrees() {
        for d in 3..=16u64 {
            for p in 2..d {
                if !is_prime(p) || decompose(d, p).is_err() {
                    continue;
                }
                assert!(verify_pcf_witness(d, p).unwrap().all(), "({d},{p})");
            }
        }
    }

    #[test]
    fn witness_escape_radius_matches_alpha_size() {
        assert_eq!(witness_escape_radius(3, 2).unwrap(), rat(1, 1));
        for d in 3..=24u64 {
            for p in 2..d {
                if !is_prime(p) || 2 * p <= d {
                    continue;
                }
                let Ok(w) = pcf_witness(d, p) else { continue };
                if w.v_alpha < Rational::zero() {
                    assert_eq!(witness_escape_radius(d, p).unwrap(), -w.v_alpha, "({d},{p})");
                }
            }
        }
    }
}
