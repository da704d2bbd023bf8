//! The quotient ring `Q[alpha]/(alpha^m - c)`: just enough exact symbolic
//! algebra to verify identities about elements of a degree-`m` extension
//! without ever constructing the extension analytically.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// An element, stored as coefficients `c_0 + c_1 alpha + ... +
/// c_{m-1} alpha^{m-1}`; reduction by `alpha^m = c` is always applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientRingElement {
    coeffs: Vec<BigRational>,
}

impl QuotientRingElement {
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

/// The ring `Q[alpha]/(alpha^m - c)` with `m >= 1`.
#[derive(Debug, Clone)]
pub struct QuotientRing {
    m: usize,
    c: BigRational,
}

impl QuotientRing {
    pub fn new(m: usize, c: BigRational) -> Self {
        assert!(m >= 1, "modulus degree must be at least 1");
        QuotientRing { m, c }
    }

    pub fn modulus_degree(&self) -> usize {
        self.m
    }

    pub fn modulus_constant(&self) -> &BigRational {
        &self.c
    }

    pub fn zero(&self) -> QuotientRingElement {
        QuotientRingElement { coeffs: vec![BigRational::zero(); self.m] }
    }

    pub fn from_rational(&self, q: BigRational) -> QuotientRingElement {
        let mut e = self.zero();
        e.coeffs[0] = q;
        e
    }

    pub fn one(&self) -> QuotientRingElement {
        self.from_rational(BigRational::one())
    }

    pub fn alpha(&self) -> QuotientRingElement {
        if self.m == 1 {
            // alpha = c in the degenerate ring Q[alpha]/(alpha - c)
            return self.from_rational(self.c.clone());
        }
        let mut e = self.zero();
        e.coeffs[1] = BigRational::one();
        e
    }

    pub fn add(&self, x: &QuotientRingElement, y: &QuotientRingElement) -> QuotientRingElement {
        let coeffs = x
            .coeffs
            .iter()
            .zip(&y.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        QuotientRingElement { coeffs }
    }

    pub fn sub(&self, x: &QuotientRingElement, y: &QuotientRingElement) -> QuotientRingElement {
        let coeffs = x
            .coeffs
            .iter()
            .zip(&y.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        QuotientRingElement { coeffs }
    }

    pub fn scale(&self, x: &QuotientRingElement, q: &BigRational) -> QuotientRingElement {
        QuotientRingElement { coeffs: x.coeffs.iter().map(|a| a * q).collect() }
    }

    pub fn mul(&self, x: &QuotientRingElement, y: &QuotientRingElement) -> QuotientRingElement {
        let mut raw = vec![BigRational::zero(); 2 * self.m - 1];
        for (i, a) in x.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                raw[i + j] += a * b;
            }
        }
        // fold alpha^{m+t} = c * alpha^t
        for idx in (self.m..raw.len()).rev() {
            let carry = std::mem::replace(&mut raw[idx], BigRational::zero());
            if !carry.is_zero() {
                let target = idx - self.m;
                raw[target] += carry * &self.c;
            }
        }
        raw.truncate(self.m);
        QuotientRingElement { coeffs: raw }
    }

    pub fn pow(&self, x: &QuotientRingElement, e: u64) -> QuotientRingElement {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, x);
        }
        acc
    }

    /// Multiply two polynomials (in an outer variable) with coefficients
    /// in this ring.
    pub fn poly_mul(
        &self,
        xs: &[QuotientRingElement],
        ys: &[QuotientRingElement],
    ) -> Vec<QuotientRingElement> {
        let mut out = vec![self.zero(); xs.len() + ys.len() - 1];
        for (i, a) in xs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in ys.iter().enumerate() {
                let prod = self.mul(a, b);
                out[i + j] = self.add(&out[i + j], &prod);
            }
        }
        out
    }

    /// Formal derivative of a polynomial with coefficients in this ring.
    pub fn poly_derivative(&self, xs: &[QuotientRingElement]) -> Vec<QuotientRingElement> {
        xs.iter()
            .enumerate()
            .skip(1)
            .map(|(i, a)| self.scale(a, &BigRational::from_integer(BigInt::from(i))))
            .collect()
    }

    /// Evaluate a polynomial with ring coefficients at a ring point.
    pub fn poly_eval(
        &self,
        xs: &[QuotientRingElement],
        at: &QuotientRingElement,
    ) -> QuotientRingElement {
        let mut acc = self.zero();
        for a in xs.iter().rev() {
            acc = self.add(&self.mul(&acc, at), a);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn alpha_cubed_reduces() {
        // Q[alpha]/(alpha^2 - 27/4): alpha^3 = (27/4) alpha
        let ring = QuotientRing::new(2, q(27, 4));
        let a = ring.alpha();
        let a3 = ring.pow(&a, 3);
        let expected = ring.scale(&a, &q(27, 4));
        assert_eq!(a3, expected);
    }

    #[test]
    fn arithmetic_in_degree_four() {
        let ring = QuotientRing::new(4, q(5, 1));
        let a = ring.alpha();
        // (alpha^2 + 1)(alpha^2 - 1) = alpha^4 - 1 = 5 - 1 = 4
        let a2 = ring.mul(&a, &a);
        let one = ring.one();
        let left = ring.mul(&ring.add(&a2, &one), &ring.sub(&a2, &one));
        assert_eq!(left, ring.from_rational(q(4, 1)));
    }

    #[test]
    fn polynomial_helpers() {
        let ring = QuotientRing::new(2, q(2, 1));
        // (z - alpha)^2 = z^2 - 2 alpha z + alpha^2, and alpha^2 = 2
        let lin = vec![ring.sub(&ring.zero(), &ring.alpha()), ring.one()];
        let sq = ring.poly_mul(&lin, &lin);
        assert_eq!(sq.len(), 3);
        assert_eq!(sq[0], ring.from_rational(q(2, 1)));
        assert_eq!(sq[1], ring.scale(&ring.alpha(), &q(-2, 1)));
        assert_eq!(sq[2], ring.one());
        // derivative: 2z - 2 alpha
        let der = ring.poly_derivative(&sq);
        assert_eq!(der[1], ring.from_rational(q(2, 1)));
        // evaluating at alpha gives zero
        assert!(ring.poly_eval(&sq, &ring.alpha()).is_zero());
    }
}
