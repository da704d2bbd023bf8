//! Scalars of `Q_p`: exact rationals and precision-tracked truncated values.
//!
//! A scalar is one of
//!   * an exact rational (always stored in lowest terms),
//!   * a truncated value `p^v * u + O(p^{v+N})` with unit `u` coprime to `p`
//!     and `N >= 1` significant digits,
//!   * a "zero to precision" value `O(p^k)`, meaning only `|x| <= p^{-k}`
//!     is known.
//!
//! Exact zero is the exact rational `0` and is the only scalar with
//! valuation `+inf`. Any operation with a truncated operand produces a
//! truncated result; additive cancellation can degrade a result to a
//! zero-to-precision value.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// p-adic valuation of a scalar, as far as it is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    /// Exactly known valuation.
    Finite(i64),
    /// Exact zero.
    Infinite,
    /// Only a lower bound is known (zero to precision k).
    AtLeast(i64),
}

impl Valuation {
    /// The valuation as an exact integer; errors when only a bound is known.
    pub fn exact(&self) -> Result<Option<i64>> {
        match self {
            Valuation::Finite(v) => Ok(Some(*v)),
            Valuation::Infinite => Ok(None),
            Valuation::AtLeast(_) => Err(Error::AmbiguousValuation),
        }
    }

    /// True when the valuation is provably `>= bound`.
    pub fn is_at_least(&self, bound: Rational) -> bool {
        match self {
            Valuation::Finite(v) => Rational::from_integer(*v) >= bound,
            Valuation::Infinite => true,
            Valuation::AtLeast(k) => Rational::from_integer(*k) >= bound,
        }
    }

    /// Best known lower bound on the valuation, if any is finite.
    pub fn lower_bound(&self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(*v),
            Valuation::Infinite => None,
            Valuation::AtLeast(k) => Some(*k),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "+inf"),
            Valuation::AtLeast(k) => write!(f, ">={k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Repr {
    Exact(BigRational),
    Truncated { val: i64, unit: BigUint, prec: u32 },
    ZeroToPrec(i64),
}

/// An element of `Q_p` with exact or precision-tracked representation.
///
/// Equality is representational: two scalars compare equal when they carry
/// the same knowledge, not merely when they could denote the same number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicScalar {
    prime: u64,
    repr: Repr,
}

pub(crate) fn int_valuation(n: &BigInt, p: u64) -> Option<(i64, BigInt)> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0i64;
    let mut rest = n.clone();
    loop {
        let (q, r) = num_integer::Integer::div_rem(&rest, &p);
        if r.is_zero() {
            v += 1;
            rest = q;
        } else {
            return Some((v, rest));
        }
    }
}

/// Valuation of a nonzero rational, with the unit cofactor `a/b` (both
/// coprime to p, b > 0).
fn rational_valuation(q: &BigRational, p: u64) -> Option<(i64, BigInt, BigInt)> {
    let (vn, a) = int_valuation(q.numer(), p)?;
    let (vd, b) = int_valuation(q.denom(), p).expect("denominator is nonzero");
    Some((vn - vd, a, b))
}

fn pow_big(p: u64, e: u32) -> BigUint {
    BigUint::from(p).pow(e)
}

/// `a * b^{-1} mod p^m` for `a`, `b` coprime to `p`.
fn unit_rep_mod(a: &BigInt, b: &BigInt, p: u64, m: u32) -> BigUint {
    let modulus = BigInt::from(pow_big(p, m));
    let inv = b.modinv(&modulus).expect("b is coprime to p");
    let rep = num_integer::Integer::mod_floor(&(a * inv), &modulus);
    rep.to_biguint().expect("mod_floor is non-negative")
}

impl PadicScalar {
    pub fn exact(prime: u64, value: BigRational) -> Self {
        assert!(prime >= 2, "prime must be at least 2");
        PadicScalar { prime, repr: Repr::Exact(value) }
    }

    pub fn from_integer(prime: u64, n: i64) -> Self {
        Self::exact(prime, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(prime: u64, num: i64, den: i64) -> Self {
        assert!(den != 0, "denominator must be nonzero");
        Self::exact(prime, BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn zero(prime: u64) -> Self {
        Self::from_integer(prime, 0)
    }

    pub fn one(prime: u64) -> Self {
        Self::from_integer(prime, 1)
    }

    /// A truncated scalar `p^val * unit + O(p^{val+prec})`.
    pub fn truncated(prime: u64, val: i64, unit: BigUint, prec: u32) -> Result<Self> {
        assert!(prime >= 2);
        if prec == 0 {
            return Err(Error::PrecisionExhausted);
        }
        if unit.is_zero() || (&unit % prime).is_zero() || unit >= pow_big(prime, prec) {
            return Err(Error::Parse(format!(
                "unit must lie in [1, {prime}^{prec}) and be coprime to {prime}"
            )));
        }
        Ok(PadicScalar { prime, repr: Repr::Truncated { val, unit, prec } })
    }

    /// A value known only to satisfy `|x| <= p^{-k}`.
    pub fn zero_to_precision(prime: u64, k: i64) -> Self {
        assert!(prime >= 2);
        PadicScalar { prime, repr: Repr::ZeroToPrec(k) }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.repr, Repr::Exact(_))
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(&self.repr, Repr::Exact(q) if q.is_zero())
    }

    /// True when the scalar is provably nonzero at its stored precision.
    pub fn is_provably_nonzero(&self) -> bool {
        match &self.repr {
            Repr::Exact(q) => !q.is_zero(),
            Repr::Truncated { .. } => true,
            Repr::ZeroToPrec(_) => false,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match &self.repr {
            Repr::Exact(q) => Some(q),
            _ => None,
        }
    }

    /// The p-adic valuation, as far as the representation knows it.
    pub fn val(&self) -> Valuation {
        match &self.repr {
            Repr::Exact(q) => match rational_valuation(q, self.prime) {
                Some((v, _, _)) => Valuation::Finite(v),
                None => Valuation::Infinite,
            },
            Repr::Truncated { val, .. } => Valuation::Finite(*val),
            Repr::ZeroToPrec(k) => Valuation::AtLeast(*k),
        }
    }

    /// Rough size of the stored representation in bits; used to decide when
    /// exact orbit iteration should fall back to truncated arithmetic.
    pub fn repr_bits(&self) -> u64 {
        match &self.repr {
            Repr::Exact(q) => q.numer().bits() + q.denom().bits(),
            Repr::Truncated { unit, .. } => unit.bits(),
            Repr::ZeroToPrec(_) => 1,
        }
    }

    fn check_prime(&self, other: &Self) {
        assert_eq!(self.prime, other.prime, "operands must share a prime");
    }

    /// Absolute precision `v + N` of a truncated operand, `None` for exact.
    fn abs_precision(&self) -> Option<i64> {
        match &self.repr {
            Repr::Exact(_) => None,
            Repr::Truncated { val, prec, .. } => Some(val.saturating_add(*prec as i64)),
            Repr::ZeroToPrec(k) => Some(*k),
        }
    }

    /// Integer digit string of the value in the window `[from, to)`,
    /// i.e. the canonical representative of `x / p^from mod p^{to-from}`.
    /// Requires `val(x) >= from` and every digit in the window to be known.
    fn digits_in_window(&self, from: i64, to: i64) -> BigUint {
        let m = u32::try_from(to - from).expect("window fits in u32");
        match &self.repr {
            Repr::Exact(q) => match rational_valuation(q, self.prime) {
                None => BigUint::zero(),
                Some((v, a, b)) => {
                    debug_assert!(v >= from);
                    let shift = u32::try_from(v - from).unwrap();
                    if shift >= m {
                        return BigUint::zero();
                    }
                    let rep = unit_rep_mod(&a, &b, self.prime, m - shift);
                    rep * pow_big(self.prime, shift)
                }
            },
            Repr::Truncated { val, unit, .. } => {
                debug_assert!(*val >= from);
                let shift = u32::try_from(*val - from).unwrap();
                if shift >= m {
                    return BigUint::zero();
                }
                (unit % pow_big(self.prime, m - shift)) * pow_big(self.prime, shift)
            }
            Repr::ZeroToPrec(_) => BigUint::zero(),
        }
    }

    /// Build a scalar from a digit string `S * p^base` known modulo
    /// `p^{abs}`: normalizes to truncated or zero-to-precision form.
    fn from_digits(prime: u64, base: i64, digits: BigUint, abs: i64) -> Self {
        if digits.is_zero() {
            return Self::zero_to_precision(prime, abs);
        }
        let (j, unit) = int_valuation(&BigInt::from(digits), prime).expect("digits nonzero");
        let val = base + j;
        debug_assert!(val < abs);
        let prec = u32::try_from(abs - val).unwrap();
        let unit = unit.to_biguint().unwrap() % pow_big(prime, prec);
        PadicScalar { prime, repr: Repr::Truncated { val, unit, prec } }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_prime(other);
        match (&self.repr, &other.repr) {
            (Repr::Exact(a), Repr::Exact(b)) => Ok(Self::exact(self.prime, a + b)),
            _ => {
                if self.is_exact_zero() {
                    return Ok(other.clone());
                }
                if other.is_exact_zero() {
                    return Ok(self.clone());
                }
                let abs = match (self.abs_precision(), other.abs_precision()) {
                    (Some(a), Some(b)) => a.min(b),
                    (Some(a), None) => a,
                    (None, Some(b)) => b,
                    (None, None) => unreachable!("both exact handled above"),
                };
                let vmin = self
                    .val()
                    .lower_bound()
                    .into_iter()
                    .chain(other.val().lower_bound())
                    .min()
                    .expect("neither operand is exact zero");
                if abs <= vmin {
                    return Ok(Self::zero_to_precision(self.prime, vmin));
                }
                let window = abs
                    .checked_sub(vmin)
                    .and_then(|w| u32::try_from(w).ok())
                    .ok_or(Error::PrecisionExhausted)?;
                let m = pow_big(self.prime, window);
                let digits = (self.digits_in_window(vmin, abs)
                    + other.digits_in_window(vmin, abs))
                    % &m;
                Ok(Self::from_digits(self.prime, vmin, digits, abs))
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let repr = match &self.repr {
            Repr::Exact(q) => Repr::Exact(-q),
            Repr::Truncated { val, unit, prec } => Repr::Truncated {
                val: *val,
                unit: pow_big(self.prime, *prec) - unit,
                prec: *prec,
            },
            Repr::ZeroToPrec(k) => Repr::ZeroToPrec(*k),
        };
        PadicScalar { prime: self.prime, repr }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_prime(other);
        if self.is_exact_zero() || other.is_exact_zero() {
            return Ok(Self::zero(self.prime));
        }
        match (&self.repr, &other.repr) {
            (Repr::Exact(a), Repr::Exact(b)) => Ok(Self::exact(self.prime, a * b)),
            // Saturating bound arithmetic: a saturated exponent only ever
            // weakens the claimed precision, so it stays sound.
            (Repr::ZeroToPrec(k), _) => match other.val() {
                Valuation::Finite(w) => Ok(Self::zero_to_precision(self.prime, k.saturating_add(w))),
                Valuation::AtLeast(j) => Ok(Self::zero_to_precision(self.prime, k.saturating_add(j))),
                Valuation::Infinite => unreachable!("exact zero handled above"),
            },
            (_, Repr::ZeroToPrec(_)) => other.mul(self),
            _ => {
                let prec = self.joint_precision(other);
                let (va, ua) = self.unit_form(prec);
                let (vb, ub) = other.unit_form(prec);
                let val = va.checked_add(vb).ok_or(Error::PrecisionExhausted)?;
                let unit = (ua * ub) % pow_big(self.prime, prec);
                Ok(PadicScalar {
                    prime: self.prime,
                    repr: Repr::Truncated { val, unit, prec },
                })
            }
        }
    }

    /// Relative precision of a product or quotient: the minimum over the
    /// truncated operands. At least one operand is truncated here.
    fn joint_precision(&self, other: &Self) -> u32 {
        let p = |s: &Self| match &s.repr {
            Repr::Truncated { prec, .. } => Some(*prec),
            _ => None,
        };
        p(self)
            .into_iter()
            .chain(p(other))
            .min()
            .expect("at least one truncated operand")
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_prime(other);
        match &other.repr {
            Repr::Exact(q) if q.is_zero() => return Err(Error::DivisionByZero),
            // The divisor's valuation is not exactly known; refuse to guess.
            Repr::ZeroToPrec(_) => return Err(Error::PrecisionExhausted),
            _ => {}
        }
        if self.is_exact_zero() {
            return Ok(Self::zero(self.prime));
        }
        match (&self.repr, &other.repr) {
            (Repr::Exact(a), Repr::Exact(b)) => Ok(Self::exact(self.prime, a / b)),
            (Repr::ZeroToPrec(k), _) => {
                let w = match other.val() {
                    Valuation::Finite(w) => w,
                    _ => unreachable!("divisor has exact valuation"),
                };
                Ok(Self::zero_to_precision(self.prime, k.saturating_sub(w)))
            }
            _ => {
                let prec = self.joint_precision(other);
                let (va, ua) = self.unit_form(prec);
                let (vb, ub) = other.unit_form(prec);
                let val = va.checked_sub(vb).ok_or(Error::PrecisionExhausted)?;
                let modulus = pow_big(self.prime, prec);
                let inv = BigInt::from(ub)
                    .modinv(&BigInt::from(modulus.clone()))
                    .expect("unit is coprime to p");
                let unit = num_integer::Integer::mod_floor(
                    &(BigInt::from(ua) * inv),
                    &BigInt::from(modulus),
                )
                .to_biguint()
                .unwrap();
                Ok(PadicScalar {
                    prime: self.prime,
                    repr: Repr::Truncated { val, unit, prec },
                })
            }
        }
    }

    /// Nonzero scalar as `(valuation, unit mod p^prec)`.
    fn unit_form(&self, prec: u32) -> (i64, BigUint) {
        match &self.repr {
            Repr::Exact(q) => {
                let (v, a, b) = rational_valuation(q, self.prime).expect("nonzero");
                (v, unit_rep_mod(&a, &b, self.prime, prec))
            }
            Repr::Truncated { val, unit, prec: own } => {
                debug_assert!(*own >= prec);
                (*val, unit % pow_big(self.prime, prec))
            }
            Repr::ZeroToPrec(_) => unreachable!("callers handle zero-to-precision"),
        }
    }

    pub fn pow(&self, mut e: u64) -> Result<Self> {
        let mut base = self.clone();
        let mut acc = Self::one(self.prime);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Truncate to at most `prec` significant digits. Exact zeros and
    /// zero-to-precision values are returned unchanged.
    pub fn truncate(&self, prec: u32) -> Result<Self> {
        if prec == 0 {
            return Err(Error::PrecisionExhausted);
        }
        match &self.repr {
            Repr::Exact(q) => match rational_valuation(q, self.prime) {
                None => Ok(self.clone()),
                Some((v, a, b)) => Ok(PadicScalar {
                    prime: self.prime,
                    repr: Repr::Truncated {
                        val: v,
                        unit: unit_rep_mod(&a, &b, self.prime, prec),
                        prec,
                    },
                }),
            },
            Repr::Truncated { val, unit, prec: old } => {
                if *old <= prec {
                    Ok(self.clone())
                } else {
                    Ok(PadicScalar {
                        prime: self.prime,
                        repr: Repr::Truncated {
                            val: *val,
                            unit: unit % pow_big(self.prime, prec),
                            prec,
                        },
                    })
                }
            }
            Repr::ZeroToPrec(_) => Ok(self.clone()),
        }
    }

    /// Canonical small exact representative `r` with `val(x - r) >= abs`.
    /// Only meaningful for exact scalars; others are returned unchanged
    /// (their stored size is already bounded by their precision).
    pub fn reduce_mod(&self, abs: i64) -> Self {
        match &self.repr {
            Repr::Exact(q) => match rational_valuation(q, self.prime) {
                None => self.clone(),
                Some((v, a, b)) => {
                    if v >= abs {
                        return Self::zero(self.prime);
                    }
                    let m = u32::try_from(abs - v).unwrap();
                    let rep = BigInt::from(unit_rep_mod(&a, &b, self.prime, m));
                    let value = if v >= 0 {
                        BigRational::from_integer(rep * BigInt::from(self.prime).pow(v as u32))
                    } else {
                        BigRational::new(rep, BigInt::from(self.prime).pow((-v) as u32))
                    };
                    Self::exact(self.prime, value)
                }
            },
            _ => self.clone(),
        }
    }

    /// Exact canonical representative `r` with `val(x - r) >= abs`, taken
    /// from digits that are actually stored; errs when the representation
    /// does not determine the value to that depth.
    pub fn canonical_representative(&self, abs: i64) -> Result<Self> {
        match &self.repr {
            Repr::Exact(_) => Ok(self.reduce_mod(abs)),
            Repr::Truncated { val, prec, .. } => {
                if val.saturating_add(*prec as i64) < abs {
                    return Err(Error::PrecisionExhausted);
                }
                if *val >= abs {
                    return Ok(Self::zero(self.prime));
                }
                let digits = BigInt::from(self.digits_in_window(*val, abs));
                let value = if *val >= 0 {
                    BigRational::from_integer(digits * BigInt::from(self.prime).pow(*val as u32))
                } else {
                    BigRational::new(digits, BigInt::from(self.prime).pow((-*val) as u32))
                };
                Ok(Self::exact(self.prime, value))
            }
            Repr::ZeroToPrec(k) => {
                if *k >= abs {
                    Ok(Self::zero(self.prime))
                } else {
                    Err(Error::PrecisionExhausted)
                }
            }
        }
    }

    pub fn parse(input: &str, prime: u64) -> Result<Self> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty scalar literal".into()));
        }
        if let Some(rest) = s.strip_prefix("O(") {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(format!("unterminated O(...) in {input:?}")))?;
            let (p, k) = parse_prime_power(inner)?;
            check_embedded_prime(p, prime)?;
            return Ok(Self::zero_to_precision(prime, k));
        }
        if let Some((head, tail)) = s.split_once("+O(") {
            let inner = tail
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(format!("unterminated O(...) in {input:?}")))?;
            let (p, e) = parse_prime_power(inner)?;
            check_embedded_prime(p, prime)?;
            if let Some((pv, unit)) = head.split_once('*') {
                // canonical form p^v * u + O(p^{v+N})
                let (p2, v) = parse_prime_power(pv)?;
                check_embedded_prime(p2, prime)?;
                let unit: BigUint = unit
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad unit in {input:?}")))?;
                let prec_i = e - v;
                if prec_i < 1 {
                    return Err(Error::PrecisionExhausted);
                }
                return Self::truncated(prime, v, unit, u32::try_from(prec_i).unwrap());
            }
            // convenience form c + O(p^e) with integer c
            let c: BigInt = head
                .parse()
                .map_err(|_| Error::Parse(format!("bad integer in {input:?}")))?;
            if e <= 0 {
                return Err(Error::Parse(format!(
                    "absolute precision must be positive in {input:?}"
                )));
            }
            let modulus = BigInt::from(pow_big(prime, u32::try_from(e).unwrap()));
            let c = num_integer::Integer::mod_floor(&c, &modulus);
            if c.is_zero() {
                return Ok(Self::zero_to_precision(prime, e));
            }
            let (v, unit) = int_valuation(&c, prime).expect("nonzero");
            let prec = u32::try_from(e - v).unwrap();
            let unit = unit.to_biguint().unwrap() % pow_big(prime, prec);
            return Self::truncated(prime, v, unit, prec);
        }
        if let Some((num, den)) = s.split_once('/') {
            let n: BigInt = num
                .parse()
                .map_err(|_| Error::Parse(format!("bad numerator in {input:?}")))?;
            let d: BigInt = den
                .parse()
                .map_err(|_| Error::Parse(format!("bad denominator in {input:?}")))?;
            if d.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            return Ok(Self::exact(prime, BigRational::new(n, d)));
        }
        let n: BigInt = s
            .parse()
            .map_err(|_| Error::Parse(format!("bad scalar literal {input:?}")))?;
        Ok(Self::exact(prime, BigRational::from_integer(n)))
    }
}

fn check_embedded_prime(p: u64, prime: u64) -> Result<()> {
    if p != prime {
        return Err(Error::Parse(format!(
            "literal mentions prime {p} but context expects {prime}"
        )));
    }
    Ok(())
}

/// Parse `p^e` (also bare `p`, meaning exponent 1).
fn parse_prime_power(s: &str) -> Result<(u64, i64)> {
    let (base, exp) = match s.split_once('^') {
        Some((b, e)) => (b, e),
        None => (s, "1"),
    };
    let p: u64 = base
        .parse()
        .map_err(|_| Error::Parse(format!("bad prime in {s:?}")))?;
    let e: i64 = exp
        .parse()
        .map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
    Ok((p, e))
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Exact(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Repr::Truncated { val, unit, prec } => {
                let p = self.prime;
                write!(f, "{p}^{val} * {unit} + O({p}^{})", val + *prec as i64)
            }
            Repr::ZeroToPrec(k) => write!(f, "O({}^{k})", self.prime),
        }
    }
}

impl Serialize for PadicScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(prime: u64, num: i64, den: i64) -> PadicScalar {
        PadicScalar::from_ratio(prime, num, den)
    }

    /// Trial-division valuation oracle, independent of the library path.
    fn val_oracle(mut num: i64, mut den: i64, p: i64) -> i64 {
        assert!(num != 0 && den != 0);
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

    #[test]
    fn valuation_of_three_halves() {
        assert_eq!(q(2, 3, 2).val(), Valuation::Finite(-1));
        assert_eq!(val_oracle(3, 2, 2), -1);
    }

    #[test]
    fn valuation_of_zero_is_infinite() {
        assert_eq!(PadicScalar::zero(2).val(), Valuation::Infinite);
    }

    #[test]
    fn valuation_of_minus_4912_over_2() {
        // 2456 = 2^3 * 307
        let x = q(2, -4912, 2);
        assert_eq!(x.val(), Valuation::Finite(3));
        assert_eq!(val_oracle(-4912, 2, 2), 3);
    }

    #[test]
    fn exact_addition() {
        let s = q(2, 3, 2).add(&q(2, 1, 2)).unwrap();
        assert_eq!(s, PadicScalar::from_integer(2, 2));
        assert_eq!(s.val(), Valuation::Finite(1));
    }

    #[test]
    fn truncated_cancellation() {
        // (1 + 2^4 u) - 1 is known only to valuation >= 4.
        let x = PadicScalar::truncated(2, 0, BigUint::from(1u32 + 16 * 3), 6).unwrap();
        let d = x.sub(&PadicScalar::one(2)).unwrap();
        // absolute precision of x is 6; the difference keeps digits 4..6
        assert_eq!(d.val(), Valuation::Finite(4));
        let y = PadicScalar::truncated(2, 0, BigUint::from(1u32), 4).unwrap();
        let d2 = y.sub(&PadicScalar::one(2)).unwrap();
        assert_eq!(d2, PadicScalar::zero_to_precision(2, 4));
        assert_eq!(d2.val(), Valuation::AtLeast(4));
    }

    #[test]
    fn fixed_point_of_cubic() {
        // (-1/2)^3 - (3/2) * (-1/2)^2 = -1/2
        let z = q(2, -1, 2);
        let z3 = z.pow(3).unwrap();
        let z2 = z.pow(2).unwrap();
        let res = z3.sub(&q(2, 3, 2).mul(&z2).unwrap()).unwrap();
        assert_eq!(res, q(2, -1, 2));
    }

    #[test]
    fn promotion_to_truncated() {
        let t = PadicScalar::truncated(2, 1, BigUint::from(5u32), 8).unwrap();
        let s = t.mul(&q(2, 3, 1)).unwrap();
        assert_eq!(s.val(), Valuation::Finite(1));
        assert!(!s.is_exact());
        // 5 * 3 = 15 mod 2^8
        assert_eq!(s, PadicScalar::truncated(2, 1, BigUint::from(15u32), 8).unwrap());
    }

    #[test]
    fn truncated_agrees_with_exact_window() {
        let a = q(3, 7, 5);
        let b = q(3, 22, 9);
        let ta = a.truncate(10).unwrap();
        let tb = b.truncate(10).unwrap();
        for (exact, trunc) in [
            (a.add(&b).unwrap(), ta.add(&tb).unwrap()),
            (a.mul(&b).unwrap(), ta.mul(&tb).unwrap()),
            (a.div(&b).unwrap(), ta.div(&tb).unwrap()),
            (a.sub(&b).unwrap(), ta.sub(&tb).unwrap()),
        ] {
            let diff = exact.sub(&trunc).unwrap();
            let abs = trunc.abs_precision().unwrap();
            assert!(diff.val().is_at_least(Rational::from_integer(abs)));
        }
    }

    #[test]
    fn division_errors() {
        assert_eq!(
            q(2, 1, 1).div(&PadicScalar::zero(2)),
            Err(Error::DivisionByZero)
        );
        assert_eq!(
            q(2, 1, 1).div(&PadicScalar::zero_to_precision(2, 9)),
            Err(Error::PrecisionExhausted)
        );
    }

    #[test]
    fn display_parse_roundtrip() {
        let xs = [
            q(2, -7, 8),
            PadicScalar::from_integer(2, 42),
            PadicScalar::zero(2),
            PadicScalar::truncated(2, -1, BigUint::from(3u32), 4).unwrap(),
            PadicScalar::zero_to_precision(2, 5),
        ];
        for x in xs {
            let shown = x.to_string();
            let back = PadicScalar::parse(&shown, 2).unwrap();
            assert_eq!(back, x, "roundtrip failed for {shown}");
        }
    }

    #[test]
    fn parse_convenience_truncated_form() {
        // 17 + O(2^5) => 2^0 * 17 + O(2^5)
        let x = PadicScalar::parse("17 + O(2^5)", 2).unwrap();
        assert_eq!(x, PadicScalar::truncated(2, 0, BigUint::from(17u32), 5).unwrap());
        let y = PadicScalar::parse("32 + O(2^5)", 2).unwrap();
        assert_eq!(y, PadicScalar::zero_to_precision(2, 5));
        assert!(PadicScalar::parse("1 + O(3^4)", 2).is_err());
    }

    #[test]
    fn reduce_mod_keeps_ball_identity() {
        let x = q(2, 12345677, 3);
        let r = x.reduce_mod(6);
        let d = x.sub(&r).unwrap();
        assert!(d.val().is_at_least(Rational::from_integer(6)));
        assert!(r.repr_bits() <= 16);
    }
}
