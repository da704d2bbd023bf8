//! Monic polynomials fixing the origin: `f(z) = z^d + a_{d-1} z^{d-1} +
//! ... + a_1 z` with `d >= 2`.
//!
//! Every polynomial of degree `d >= 2` is affinely conjugate to one of
//! this shape, so the dynamics code works exclusively with it. The stored
//! coefficient vector is `a_1 .. a_{d-1}`, low-to-high.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::newton::NewtonPolygon;
use crate::scalar::PadicScalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonicPolynomial {
    prime: u64,
    coeffs: Vec<PadicScalar>,
}

impl MonicPolynomial {
    /// Build from the inner coefficients `a_1 .. a_{d-1}` (low-to-high);
    /// the leading 1 and the zero constant term are implicit.
    pub fn new(prime: u64, coeffs: Vec<PadicScalar>) -> Self {
        assert!(!coeffs.is_empty(), "degree must be at least 2");
        for c in &coeffs {
            assert_eq!(c.prime(), prime, "coefficients must share the prime");
        }
        MonicPolynomial { prime, coeffs }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn degree(&self) -> u64 {
        self.coeffs.len() as u64 + 1
    }

    /// Coefficient `a_i` for `0 <= i <= d`.
    pub fn coefficient(&self, i: u64) -> PadicScalar {
        let d = self.degree();
        assert!(i <= d, "index out of range");
        if i == 0 {
            PadicScalar::zero(self.prime)
        } else if i == d {
            PadicScalar::one(self.prime)
        } else {
            self.coeffs[(i - 1) as usize].clone()
        }
    }

    /// The inner coefficients `a_1 .. a_{d-1}`.
    pub fn inner_coeffs(&self) -> &[PadicScalar] {
        &self.coeffs
    }

    /// Full coefficient vector `a_0 .. a_d`, low-to-high.
    pub fn full_coeffs(&self) -> Vec<PadicScalar> {
        let mut full = Vec::with_capacity(self.coeffs.len() + 2);
        full.push(PadicScalar::zero(self.prime));
        full.extend(self.coeffs.iter().cloned());
        full.push(PadicScalar::one(self.prime));
        full
    }

    pub fn eval(&self, z: &PadicScalar) -> Result<PadicScalar> {
        // Horner from the leading coefficient down; the final multiply by
        // z absorbs the zero constant term.
        let mut acc = PadicScalar::one(self.prime);
        for a in self.coeffs.iter().rev() {
            acc = acc.mul(z)?.add(a)?;
        }
        acc.mul(z)
    }

    /// Coefficients of `f'`, low-to-high (length `d`, leading entry `d`).
    pub fn derivative_coeffs(&self) -> Vec<PadicScalar> {
        let d = self.degree();
        (1..=d)
            .map(|i| {
                let ai = self.coefficient(i);
                ai.mul(&PadicScalar::from_integer(self.prime, i as i64))
                    .expect("scaling by an exact integer cannot fail")
            })
            .collect()
    }

    pub fn eval_derivative(&self, z: &PadicScalar) -> Result<PadicScalar> {
        let coeffs = self.derivative_coeffs();
        let mut acc = PadicScalar::zero(self.prime);
        for c in coeffs.iter().rev() {
            acc = acc.mul(z)?.add(c)?;
        }
        Ok(acc)
    }

    /// Coefficients `b_0 .. b_d` of `f(a + w)` as a polynomial in `w`,
    /// via repeated synthetic division (`O(d^2)` scalar operations).
    pub fn taylor_shift(&self, a: &PadicScalar) -> Result<Vec<PadicScalar>> {
        let d = self.coeffs.len() + 1;
        let mut c = self.full_coeffs();
        for j in 0..d {
            for i in (j..d).rev() {
                c[i] = c[i].add(&c[i + 1].mul(a)?)?;
            }
        }
        Ok(c)
    }

    /// Newton polygon of `f` itself.
    pub fn newton_polygon(&self) -> Result<NewtonPolygon> {
        NewtonPolygon::from_coeffs(self.prime, &self.full_coeffs())
    }

    /// The unique normal-form polynomial whose critical points are the
    /// given `d - 1` values (with multiplicity): integrates
    /// `f' = d * prod (z - c_j)` term by term.
    pub fn from_critical_points(prime: u64, critical: &[PadicScalar]) -> Result<Self> {
        assert!(!critical.is_empty(), "need at least one critical point");
        let d = critical.len() + 1;
        // expand prod (z - c_j), low-to-high
        let mut prod: Vec<PadicScalar> = vec![PadicScalar::one(prime)];
        for c in critical {
            assert_eq!(c.prime(), prime, "critical points must share the prime");
            let mut next = vec![PadicScalar::zero(prime); prod.len() + 1];
            for (i, q) in prod.iter().enumerate() {
                next[i + 1] = next[i + 1].add(q)?;
                next[i] = next[i].sub(&q.mul(c)?)?;
            }
            prod = next;
        }
        let dd = PadicScalar::from_integer(prime, d as i64);
        let mut coeffs = Vec::with_capacity(d - 1);
        for i in 0..d - 1 {
            // a_{i+1} = d * prod[i] / (i + 1)
            let num = dd.mul(&prod[i])?;
            coeffs.push(num.div(&PadicScalar::from_integer(prime, (i + 1) as i64))?);
        }
        Ok(MonicPolynomial::new(prime, coeffs))
    }

    /// Parse a comma-separated list of the inner coefficients
    /// `a_1, ..., a_{d-1}` in the scalar text format.
    pub fn parse(input: &str, prime: u64) -> Result<Self> {
        let coeffs: Vec<PadicScalar> = input
            .split(',')
            .map(|part| PadicScalar::parse(part, prime))
            .collect::<Result<_>>()?;
        if coeffs.is_empty() {
            return Err(Error::Parse("expected at least one coefficient".into()));
        }
        Ok(MonicPolynomial::new(prime, coeffs))
    }

    /// Truncate all coefficients to `prec` significant digits.
    pub fn truncate(&self, prec: u32) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.truncate(prec))
            .collect::<Result<Vec<_>>>()?;
        Ok(MonicPolynomial { prime: self.prime, coeffs })
    }

    /// Are all coefficients exact rationals?
    pub fn is_exact(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_exact())
    }
}

impl fmt::Display for MonicPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// Exact big-rational evaluation helper for contexts that never leave Q.
pub fn eval_rational(coeffs: &[BigRational], z: &BigRational) -> BigRational {
    let mut acc = BigRational::from_integer(BigInt::from(0));
    for c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Valuation;

    fn s(num: i64, den: i64) -> PadicScalar {
        PadicScalar::from_ratio(2, num, den)
    }

    fn cubic_half() -> MonicPolynomial {
        // z^3 - (3/2) z^2
        MonicPolynomial::new(2, vec![s(0, 1), s(-3, 2)])
    }

    #[test]
    fn evaluation_matches_direct_formula() {
        let f = cubic_half();
        assert_eq!(f.degree(), 3);
        assert_eq!(f.eval(&s(-1, 2)).unwrap(), s(-1, 2));
        assert_eq!(f.eval(&s(2, 1)).unwrap(), s(2, 1));
        assert_eq!(f.eval(&PadicScalar::zero(2)).unwrap(), PadicScalar::zero(2));
        // f(3) = 27 - 13.5 = 13.5
        assert_eq!(f.eval(&s(3, 1)).unwrap(), s(27, 2));
    }

    #[test]
    fn taylor_shift_of_cubic() {
        // f(1 + w) = -1/2 + 0*w + (3/2) w^2 + w^3
        let f = cubic_half();
        let b = f.taylor_shift(&s(1, 1)).unwrap();
        assert_eq!(b.len(), 4);
        assert_eq!(b[0], s(-1, 2));
        assert_eq!(b[1], s(0, 1));
        assert_eq!(b[2], s(3, 2));
        assert_eq!(b[3], s(1, 1));
        // b_0 must equal f at the shift point
        assert_eq!(b[0], f.eval(&s(1, 1)).unwrap());
    }

    #[test]
    fn derivative_and_critical_points() {
        let f = cubic_half();
        // f' = 3z^2 - 3z, critical points 0 and 1 ... here t = 1
        assert_eq!(f.eval_derivative(&s(0, 1)).unwrap(), PadicScalar::zero(2));
        assert_eq!(f.eval_derivative(&s(1, 1)).unwrap(), PadicScalar::zero(2));
        assert!(f.eval_derivative(&s(2, 1)).unwrap().is_provably_nonzero());
    }

    #[test]
    fn reconstruction_from_critical_points() {
        // critical points {0, t} give z^3 - (3/2) t z^2
        let t = s(5, 1);
        let f = MonicPolynomial::from_critical_points(2, &[s(0, 1), t.clone()]).unwrap();
        assert_eq!(f.coefficient(1), s(0, 1));
        assert_eq!(f.coefficient(2), s(-15, 2));
        // critical points {1, 1} give z^3 - 3z^2 + 3z
        let g = MonicPolynomial::from_critical_points(2, &[s(1, 1), s(1, 1)]).unwrap();
        assert_eq!(g.coefficient(1), s(3, 1));
        assert_eq!(g.coefficient(2), s(-3, 1));
        for c in [s(1, 1)] {
            assert_eq!(g.eval_derivative(&c).unwrap(), PadicScalar::zero(2));
        }
    }

    #[test]
    fn polygon_of_the_polynomial() {
        let poly = cubic_half().newton_polygon().unwrap();
        assert_eq!(poly.zero_root_count(), 2);
        assert_eq!(poly.segments().len(), 1);
        assert_eq!(poly.segments()[0].slope, crate::Rational::from_integer(1));
    }

    #[test]
    fn parse_display_roundtrip() {
        let f = MonicPolynomial::parse("0, -3/2", 2).unwrap();
        assert_eq!(f, cubic_half());
        let again = MonicPolynomial::parse(&f.to_string(), 2).unwrap();
        assert_eq!(again, f);
    }

    #[test]
    fn truncated_coefficients_propagate() {
        let f = cubic_half().truncate(16).unwrap();
        assert!(!f.is_exact());
        let v = f.eval(&s(-1, 2)).unwrap();
        assert_eq!(v.val(), Valuation::Finite(-1));
    }
}
