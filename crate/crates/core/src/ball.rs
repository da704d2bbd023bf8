//! Closed ultrametric balls `D(c, p^s)` with exact rational radius
//! exponents, and interval-style arithmetic on them.
//!
//! The radius is stored as the exponent `s` with `|x - c| <= p^s`; a
//! radius of `MinusInfinity` denotes the degenerate single-point ball.
//! All operations return a ball that provably contains the set-image of
//! the operands, and are monotone: enlarging an input never shrinks the
//! output. That monotonicity is what makes inclusion certificates built
//! from ball arithmetic sound.

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{PadicScalar, Rational, Valuation};

/// Radius exponent of a closed ball, `-inf` for a single point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BallRadius {
    MinusInfinity,
    Exp(Rational),
}

impl BallRadius {
    pub fn exp(num: i64, den: i64) -> Self {
        BallRadius::Exp(Rational::new(num, den))
    }

    pub fn integer(e: i64) -> Self {
        BallRadius::Exp(Rational::from_integer(e))
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    fn add(self, other: Self) -> Self {
        match (self, other) {
            (BallRadius::Exp(a), BallRadius::Exp(b)) => BallRadius::Exp(a + b),
            _ => BallRadius::MinusInfinity,
        }
    }

    fn shift(self, by: Rational) -> Self {
        match self {
            BallRadius::Exp(a) => BallRadius::Exp(a + by),
            BallRadius::MinusInfinity => BallRadius::MinusInfinity,
        }
    }
}

impl fmt::Display for BallRadius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BallRadius::MinusInfinity => write!(f, "-inf"),
            BallRadius::Exp(r) => write!(f, "{r}"),
        }
    }
}

/// A closed ball in `Q_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicBall {
    center: PadicScalar,
    radius: BallRadius,
}

impl PadicBall {
    pub fn new(center: PadicScalar, radius: BallRadius) -> Self {
        PadicBall { center, radius }
    }

    pub fn point(center: PadicScalar) -> Self {
        PadicBall { center, radius: BallRadius::MinusInfinity }
    }

    pub fn center(&self) -> &PadicScalar {
        &self.center
    }

    pub fn radius(&self) -> BallRadius {
        self.radius
    }

    pub fn prime(&self) -> u64 {
        self.center.prime()
    }

    pub fn is_point(&self) -> bool {
        self.radius == BallRadius::MinusInfinity
    }

    /// Provable lower bound on `-val(x)` over elements `x` of the ball
    /// being at most `bound`... in exponent terms: an upper bound on the
    /// sup of `-val`, i.e. `sup_{x in B} -val(x) <= result`.
    ///
    /// For a ball `D(c, p^s)`: when `-val(c) > s` every element shares the
    /// center's valuation, otherwise elements cannot exceed the radius.
    pub fn sup_neg_val(&self) -> Option<Rational> {
        let s = match self.radius {
            BallRadius::Exp(s) => s,
            BallRadius::MinusInfinity => {
                return match self.center.val() {
                    Valuation::Finite(v) => Some(Rational::from_integer(-v)),
                    Valuation::Infinite => None,
                    Valuation::AtLeast(k) => Some(Rational::from_integer(-k)),
                };
            }
        };
        match self.center.val() {
            Valuation::Finite(v) => Some(s.max(Rational::from_integer(-v))),
            // center is 0 or indistinguishable from 0 beyond the radius
            Valuation::Infinite => Some(s),
            Valuation::AtLeast(k) => Some(s.max(Rational::from_integer(-k))),
        }
    }

    /// Provable lower bound on `val(x)` over all `x` in the ball, i.e.
    /// `inf_{x in B} val(x) >= result`. `None` when the center's valuation
    /// is unknown below the radius.
    pub fn inf_val(&self) -> Option<Rational> {
        match self.sup_neg_val() {
            Some(m) => Some(-m),
            None => None,
        }
    }

    /// True when every element of the ball is provably of valuation
    /// `> bound` is not needed; we provide the dual: `-val(x) > bound`
    /// for all `x`, which holds exactly when the center is that large and
    /// the radius stays below it.
    pub fn all_neg_val_exceed(&self, bound: Rational) -> bool {
        let neg_v_center = match self.center.val() {
            Valuation::Finite(v) => Rational::from_integer(-v),
            // An (approximately) zero center can never push the whole
            // ball beyond a positive size bound.
            Valuation::Infinite | Valuation::AtLeast(_) => return false,
        };
        let radius_below_center = match self.radius {
            BallRadius::MinusInfinity => true,
            BallRadius::Exp(s) => s < neg_v_center,
        };
        // radius below the center's size => all elements share |c|
        radius_below_center && neg_v_center > bound
    }

    fn check_compat(&self, other: &Self) {
        assert_eq!(self.prime(), other.prime(), "balls must share a prime");
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compat(other);
        Ok(PadicBall {
            center: self.center.add(&other.center)?,
            radius: self.radius.max(other.radius),
        })
    }

    pub fn neg(&self) -> Self {
        PadicBall { center: self.center.neg(), radius: self.radius }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Product ball: for `x = c_A + e_A`, `y = c_B + e_B`,
    /// `xy = c_A c_B + c_A e_B + c_B e_A + e_A e_B`, so the radius exponent
    /// is bounded by `max(-val(c_A) + s_B, -val(c_B) + s_A, s_A + s_B)`.
    /// When a center's valuation is only known as `>= k`, the bound `-k`
    /// on its size is used.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compat(other);
        let center = self.center.mul(&other.center)?;
        let cross = |c: &PadicScalar, s: BallRadius| -> BallRadius {
            match (c.val(), s) {
                (_, BallRadius::MinusInfinity) => BallRadius::MinusInfinity,
                (Valuation::Finite(v), r) => r.shift(Rational::from_integer(-v)),
                (Valuation::AtLeast(k), r) => r.shift(Rational::from_integer(-k)),
                (Valuation::Infinite, _) => BallRadius::MinusInfinity,
            }
        };
        let radius = cross(&self.center, other.radius)
            .max(cross(&other.center, self.radius))
            .max(self.radius.add(other.radius));
        Ok(PadicBall { center, radius })
    }

    /// Scale by a scalar: radius shifts by `-val(a)`.
    pub fn mul_scalar(&self, a: &PadicScalar) -> Result<Self> {
        let center = self.center.mul(a)?;
        let radius = match (a.val(), self.radius) {
            (_, BallRadius::MinusInfinity) => BallRadius::MinusInfinity,
            (Valuation::Infinite, _) => BallRadius::MinusInfinity,
            (Valuation::Finite(v), r) => r.shift(Rational::from_integer(-v)),
            (Valuation::AtLeast(k), r) => r.shift(Rational::from_integer(-k)),
        };
        Ok(PadicBall { center, radius })
    }

    pub fn pow(&self, e: u64) -> Result<Self> {
        let mut acc = PadicBall::point(PadicScalar::one(self.prime()));
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Does the ball contain the scalar? Errors with `Undecidable` when
    /// the stored precision cannot settle the question.
    pub fn contains(&self, x: &PadicScalar) -> Result<bool> {
        let d = x.sub(&self.center)?;
        let s = match self.radius {
            BallRadius::Exp(s) => s,
            BallRadius::MinusInfinity => {
                // point ball: containment is equality
                return match d.val() {
                    Valuation::Infinite => Ok(true),
                    Valuation::Finite(_) => Ok(false),
                    Valuation::AtLeast(_) => Err(Error::Undecidable),
                };
            }
        };
        // |x - c| <= p^s  <=>  val(x - c) >= -s
        match d.val() {
            Valuation::Infinite => Ok(true),
            Valuation::Finite(v) => Ok(Rational::from_integer(v) >= -s),
            Valuation::AtLeast(k) => {
                if Rational::from_integer(k) >= -s {
                    Ok(true)
                } else {
                    Err(Error::Undecidable)
                }
            }
        }
    }

    /// Is `self` contained in `other`? By the ultrametric inequality this
    /// holds iff the radius does not exceed `other`'s and the center lies
    /// in `other`.
    pub fn subset_of(&self, other: &Self) -> Result<bool> {
        self.check_compat(other);
        if self.radius > other.radius {
            return Ok(false);
        }
        other.contains(&self.center)
    }

    /// Provable equality of the two balls as sets: mutual inclusion.
    pub fn same_ball(&self, other: &Self) -> Result<bool> {
        Ok(self.subset_of(other)? && other.subset_of(self)?)
    }

    /// Replace the center by a small representative defining the same
    /// ball. Any center shift of valuation `>= -s` leaves the ball
    /// unchanged, so an exact center may be reduced modulo
    /// `p^{ceil(-s)}`; this keeps iterated centers from growing.
    pub fn reduce_center(&self) -> Self {
        let s = match self.radius {
            BallRadius::Exp(s) => s,
            BallRadius::MinusInfinity => return self.clone(),
        };
        let cutoff = (-s).ceil().to_integer();
        PadicBall {
            center: self.center.reduce_mod(cutoff),
            radius: self.radius,
        }
    }
}

impl fmt::Display for PadicBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.radius {
            BallRadius::MinusInfinity => write!(f, "{{{}}}", self.center),
            BallRadius::Exp(r) => {
                if r.denom() == &1 && !r.numer().is_zero() {
                    write!(f, "D({}, {}^{})", self.center, self.prime(), r.numer())
                } else if r.is_zero() {
                    write!(f, "D({}, 1)", self.center)
                } else {
                    write!(f, "D({}, {}^({}))", self.center, self.prime(), r)
                }
            }
        }
    }
}
