//! One-parameter families of normal-form polynomials and rigorous
//! whole-disk parameter classification.
//!
//! A family assigns to each parameter t a monic polynomial f_t fixing 0,
//! together with its critical points, all given by polynomial expressions
//! in t. For a parameter disk D(c, p^{-n}) we substitute t = c + p^n·h
//! with h ranging over the p-adic integers and iterate the critical orbits
//! as truncated polynomials in h. Tracking exact coefficient valuations
//! (plus a tail bound for degrees beyond a cap) lets us certify that every
//! parameter in the disk escapes, or that every parameter stays bounded —
//! the couplings between iterate and parameter that independent ball
//! arithmetic throws away are kept exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::ball::{BallRadius, PadicBall};
use crate::dynamics::{invariant_system, is_pcb, ClassifyOptions, PcbAnswer};
use crate::error::{Error, Result};
use crate::newton::format_rational;
use crate::poly::MonicPolynomial;
use crate::scalar::{PadicScalar, Rational, Valuation};

/// Polynomial in the parameter variable t with exact rational coefficients,
/// stored low-to-high with no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn constant(q: BigRational) -> Self {
        Self::new(vec![q])
    }

    pub fn constant_i64(n: i64, d: i64) -> Self {
        Self::constant(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    /// The polynomial t itself.
    pub fn variable() -> Self {
        RatPoly { coeffs: vec![BigRational::zero(), BigRational::one()] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![BigRational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        Self::new(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * q).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(BigRational::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Evaluate at an exact rational point.
    pub fn eval_rational(&self, t: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    /// Evaluate at a p-adic scalar.
    pub fn eval_scalar(&self, prime: u64, t: &PadicScalar) -> Result<PadicScalar> {
        let mut acc = PadicScalar::zero(prime);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(t)?.add(&PadicScalar::exact(prime, c.clone()))?;
        }
        Ok(acc)
    }
}

impl std::fmt::Display for RatPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit_coeff = mag.is_one() && i > 0;
            if !unit_coeff {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "{}t", if unit_coeff { "" } else { "*" })?,
                _ => write!(f, "{}t^{i}", if unit_coeff { "" } else { "*" })?,
            }
        }
        Ok(())
    }
}

/// A one-parameter family f_t(z) = z^d + a_{d-1}(t) z^{d-1} + ... + a_1(t) z
/// with critical points given by polynomial expressions c_j(t).
#[derive(Debug, Clone)]
pub struct PolynomialFamily {
    name: String,
    prime: u64,
    degree: u64,
    coeffs: Vec<RatPoly>,
    critical: Vec<RatPoly>,
}

impl PolynomialFamily {
    /// Build a family, checking symbolically that every critical expression
    /// satisfies f_t'(c_j(t)) = 0 identically in t.
    pub fn new(
        name: &str,
        prime: u64,
        degree: u64,
        coeffs: Vec<RatPoly>,
        critical: Vec<RatPoly>,
    ) -> Result<Self> {
        if prime < 2 || degree < 2 {
            return Err(Error::Domain("family needs prime >= 2 and degree >= 2".into()));
        }
        if coeffs.len() != degree as usize - 1 {
            return Err(Error::Domain(format!(
                "degree {degree} family needs {} coefficient expressions, got {}",
                degree - 1,
                coeffs.len()
            )));
        }
        if critical.is_empty() {
            return Err(Error::Domain("family needs at least one critical expression".into()));
        }
        for (j, c) in critical.iter().enumerate() {
            // f_t'(z) = d z^{d-1} + sum_i i a_i(t) z^{i-1} at z = c(t)
            let mut deriv = c.pow(degree as u32 - 1).scale(&BigRational::from_integer(BigInt::from(degree)));
            for (idx, a) in coeffs.iter().enumerate() {
                let i = idx + 1;
                let term = a
                    .mul(&c.pow(i as u32 - 1))
                    .scale(&BigRational::from_integer(BigInt::from(i)));
                deriv = deriv.add(&term);
            }
            if !deriv.is_zero() {
                return Err(Error::NotACriticalPoint(format!(
                    "critical expression #{j} does not annihilate the derivative identically"
                )));
            }
        }
        Ok(PolynomialFamily { name: name.to_string(), prime, degree, coeffs, critical })
    }

    /// The built-in cubic family over the 2-adics:
    /// f_t(z) = z^3 - (3/2) t z^2, critical points 0 and t.
    pub fn cubic2() -> Self {
        Self::new(
            "cubic2",
            2,
            3,
            vec![RatPoly::zero(), RatPoly::variable().scale(&BigRational::new(BigInt::from(-3), BigInt::from(2)))],
            vec![RatPoly::zero(), RatPoly::variable()],
        )
        .expect("built-in family is valid")
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "cubic2" => Some(Self::cubic2()),
            _ => None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn coefficient_exprs(&self) -> &[RatPoly] {
        &self.coeffs
    }

    pub fn critical_exprs(&self) -> &[RatPoly] {
        &self.critical
    }

    /// The member polynomial and its critical points at a specific t.
    pub fn instantiate(&self, t: &PadicScalar) -> Result<(MonicPolynomial, Vec<PadicScalar>)> {
        if t.prime() != self.prime {
            return Err(Error::Domain("parameter prime does not match family".into()));
        }
        let coeffs: Vec<PadicScalar> = self
            .coeffs
            .iter()
            .map(|a| a.eval_scalar(self.prime, t))
            .collect::<Result<_>>()?;
        let crits: Vec<PadicScalar> = self
            .critical
            .iter()
            .map(|c| c.eval_scalar(self.prime, t))
            .collect::<Result<_>>()?;
        Ok((MonicPolynomial::new(self.prime, coeffs), crits))
    }
}

/// Classify a single parameter: instantiate the member map and test whether
/// every critical orbit is bounded.
pub fn classify_parameter(
    family: &PolynomialFamily,
    t: &PadicScalar,
    opts: &ClassifyOptions,
) -> Result<PcbAnswer> {
    let (f, crits) = family.instantiate(t)?;
    is_pcb(&f, &crits, opts)
}

// minimum of optional bounds where `None` stands for +infinity
fn omin(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

// sum of optional bounds where `None` stands for +infinity
fn osum(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.saturating_add(y)),
        _ => None,
    }
}

/// Truncated polynomial model of a quantity depending on an integral
/// parameter h: explicit coefficients β_0..β_cap plus a valuation lower
/// bound for everything of higher degree. Since |h| ≤ 1, the valuation of
/// any evaluation is bounded below by the minimum coefficient bound, and
/// when β_0 strictly dominates, every evaluation has valuation exactly
/// v(β_0).
#[derive(Debug, Clone)]
pub struct ParamPoly {
    prime: u64,
    coeffs: Vec<PadicScalar>,
    /// Lower bound on the valuation of every coefficient beyond `cap`;
    /// `None` means there are none (the model is exact).
    tail: Option<i64>,
    cap: usize,
}

impl ParamPoly {
    pub fn constant(prime: u64, value: PadicScalar, cap: usize) -> Self {
        ParamPoly { prime, coeffs: vec![value], tail: None, cap }
    }

    /// Substitute t = c + p^n·h into a rational polynomial in t.
    pub fn substitute_linear(
        rp: &RatPoly,
        prime: u64,
        c: &BigRational,
        n: i64,
        cap: usize,
    ) -> Result<Self> {
        let step = {
            let num = BigInt::from(prime);
            let q = if n >= 0 {
                BigRational::from_integer(num.pow(n as u32))
            } else {
                BigRational::new(BigInt::one(), num.pow((-n) as u32))
            };
            ParamPoly {
                prime,
                coeffs: vec![
                    PadicScalar::exact(prime, c.clone()),
                    PadicScalar::exact(prime, q),
                ],
                tail: None,
                cap,
            }
        };
        let mut acc = ParamPoly::constant(prime, PadicScalar::zero(prime), cap);
        for q in rp.coeffs().iter().rev() {
            let k = ParamPoly::constant(prime, PadicScalar::exact(prime, q.clone()), cap);
            acc = acc.mul(&step)?.add(&k)?;
        }
        Ok(acc)
    }

    fn trim(mut self) -> Self {
        while self.coeffs.len() > 1 && self.coeffs.last().map_or(false, |c| c.is_exact_zero()) {
            self.coeffs.pop();
        }
        self
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        let zero = PadicScalar::zero(self.prime);
        for i in 0..n {
            let a = self.coeffs.get(i).unwrap_or(&zero);
            let b = other.coeffs.get(i).unwrap_or(&zero);
            out.push(a.add(b)?);
        }
        Ok(ParamPoly {
            prime: self.prime,
            coeffs: out,
            tail: omin(self.tail, other.tail),
            cap: self.cap.min(other.cap),
        }
        .trim())
    }

    pub fn neg(&self) -> Self {
        ParamPoly {
            prime: self.prime,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
            tail: self.tail,
            cap: self.cap,
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    // lowest valuation bound among explicit coefficients (None = all zero)
    fn explicit_floor(&self) -> Option<i64> {
        let mut best = None;
        for c in &self.coeffs {
            best = omin(best, c.val().lower_bound());
        }
        best
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let cap = self.cap.min(other.cap);
        let mut out = vec![PadicScalar::zero(self.prime); cap + 1];
        let mut overflow: Option<i64> = None;
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_exact_zero() {
                    continue;
                }
                if i + j <= cap {
                    out[i + j] = out[i + j].add(&a.mul(b)?)?;
                } else {
                    overflow = omin(
                        overflow,
                        osum(a.val().lower_bound(), b.val().lower_bound()),
                    );
                }
            }
        }
        let tail = [
            overflow,
            osum(self.tail, other.explicit_floor()),
            osum(other.tail, self.explicit_floor()),
            osum(self.tail, other.tail),
        ]
        .into_iter()
        .fold(None, omin);
        Ok(ParamPoly { prime: self.prime, coeffs: out, tail, cap }.trim())
    }

    /// Lower bound on the valuation of every coefficient, i.e. on the
    /// valuation of any evaluation at integral h. `None` = identically 0.
    pub fn lambda(&self) -> Option<i64> {
        omin(self.explicit_floor(), self.tail)
    }

    pub fn constant_term(&self) -> &PadicScalar {
        &self.coeffs[0]
    }

    /// Explicitly tracked coefficients β_0, β_1, ...
    pub fn coefficients(&self) -> &[PadicScalar] {
        &self.coeffs
    }

    /// Valuation lower bound covering every coefficient beyond the cap;
    /// `None` when the model is exact up to the cap.
    pub fn tail_bound(&self) -> Option<i64> {
        self.tail
    }

    /// Lower bound on the valuation of `x(h) - x(0)` over integral h: how
    /// far the modeled quantity can stray from its value at the disk
    /// center. `None` when the model is exactly its constant term.
    pub fn deviation_bound(&self) -> Option<i64> {
        let mut best = self.tail;
        for c in &self.coeffs[1..] {
            best = omin(best, c.val().lower_bound());
        }
        best
    }

    /// When the constant term has exactly-known valuation strictly below
    /// every other coefficient bound, every evaluation at integral h has
    /// that same valuation; returns it.
    pub fn dominant_constant_valuation(&self) -> Option<i64> {
        let v0 = match self.coeffs[0].val() {
            Valuation::Finite(v) => v,
            _ => return None,
        };
        let mut rest = self.tail;
        for c in &self.coeffs[1..] {
            rest = omin(rest, c.val().lower_bound());
        }
        match rest {
            None => Some(v0),
            Some(m) if m > v0 => Some(v0),
            _ => None,
        }
    }

    /// Truncate stored coefficients to a working precision; the model
    /// stays sound (every represented value keeps its valuation data).
    pub fn compress(&self, precision: u32) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.truncate(precision))
            .collect::<Result<_>>()?;
        Ok(ParamPoly { prime: self.prime, coeffs, tail: self.tail, cap: self.cap })
    }
}

/// Budgets for whole-disk classification.
#[derive(Debug, Clone, Copy)]
pub struct DiskOptions {
    pub max_iter: u64,
    pub precision: u32,
    /// Highest power of h tracked explicitly.
    pub degree_cap: usize,
}

impl Default for DiskOptions {
    fn default() -> Self {
        DiskOptions { max_iter: 50, precision: 128, degree_cap: 24 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiskColor {
    /// Every parameter in the disk is post-critically bounded.
    Black,
    /// No parameter in the disk is post-critically bounded.
    White,
    Unknown,
}

impl DiskColor {
    pub fn as_str(&self) -> &'static str {
        match self {
            DiskColor::Black => "black",
            DiskColor::White => "white",
            DiskColor::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone)]
pub struct DiskClassification {
    pub color: DiskColor,
    pub certificate: Option<Value>,
    pub iterations_used: u64,
}

/// Valuation bounds valid for every member map of a parameter disk:
/// an upper bound on escape radii and, when available, an exponent σ with
/// f_t(D(0, p^σ)) ⊆ D(0, p^σ) for all t in the disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskBounds {
    pub escape_radius_sup: Rational,
    pub invariant_sigma: Option<Rational>,
}

fn disk_decomposition(disk: &PadicBall) -> (BigRational, i64) {
    let r = match disk.radius() {
        BallRadius::Exp(r) => r,
        BallRadius::MinusInfinity => panic!("whole-disk classification needs a disk, not a point"),
    };
    assert!(r.is_integer(), "whole-disk classification needs an integer radius exponent");
    let c = disk
        .center()
        .as_exact()
        .expect("whole-disk classification needs an exact center")
        .clone();
    (c, -r.to_integer())
}

fn coefficient_models(
    family: &PolynomialFamily,
    c: &BigRational,
    n: i64,
    opts: &DiskOptions,
) -> Result<Vec<ParamPoly>> {
    family
        .coefficient_exprs()
        .iter()
        .map(|a| ParamPoly::substitute_linear(a, family.prime(), c, n, opts.degree_cap))
        .collect()
}

fn bounds_from_models(degree: u64, models: &[ParamPoly]) -> DiskBounds {
    let mut r_max = Rational::zero();
    for (idx, m) in models.iter().enumerate() {
        let i = idx as i64 + 1;
        if let Some(l) = m.lambda() {
            let cand = Rational::new(-l, degree as i64 - i);
            if cand > r_max {
                r_max = cand;
            }
        }
    }
    let linear_ok = models
        .first()
        .map_or(true, |m| m.lambda().map_or(true, |l| l >= 0));
    let invariant_sigma = if linear_ok {
        let mut sigma = Rational::zero();
        for (idx, m) in models.iter().enumerate() {
            let i = idx as i64 + 1;
            if i < 2 {
                continue;
            }
            if let Some(l) = m.lambda() {
                let cand = Rational::new(l, i - 1);
                if cand < sigma {
                    sigma = cand;
                }
            }
        }
        Some(sigma)
    } else {
        None
    };
    DiskBounds { escape_radius_sup: r_max, invariant_sigma }
}

/// Valuation bounds for all member maps of a parameter disk.
pub fn disk_bounds(family: &PolynomialFamily, disk: &PadicBall) -> Result<DiskBounds> {
    let (c, n) = disk_decomposition(disk);
    let models = coefficient_models(family, &c, n, &DiskOptions::default())?;
    Ok(bounds_from_models(family.degree(), &models))
}

enum OrbitOutcome {
    Escapes { iterate: u64, valuation: i64 },
    Bounded { entered_at: u64 },
    BoundedSystem { entered_at: u64, modulus: i64, system_size: usize },
    Inconclusive,
}

/// Iterates at which the disk engine tries to close a residue-ball
/// invariant system around the orbit enclosure. The deviation bound of
/// the orbit model decays as iteration proceeds, so useful attempts
/// cluster early.
const SYSTEM_CHECKPOINTS: [u64; 8] = [3, 4, 5, 6, 8, 10, 14, 20];

/// Try to certify the whole disk orbit as bounded via a residue-ball
/// system: the model's enclosure `D(x(0), p^{-rho})` contains the current
/// iterate of every member map, and the coefficient slack makes the
/// system closed under every member map at once.
fn try_invariant_system(
    f_center: &MonicPolynomial,
    slack: &[Option<i64>],
    x: &ParamPoly,
    bounds: &DiskBounds,
    it: u64,
) -> Option<OrbitOutcome> {
    let rho = x.deviation_bound()?;
    if rho < 1 {
        return None;
    }
    let prime = f_center.prime();
    let seed = PadicBall::new(x.constant_term().clone(), BallRadius::integer(-rho));
    let absorb = bounds
        .invariant_sigma
        .map(|s| PadicBall::new(PadicScalar::zero(prime), BallRadius::Exp(s)));
    for m in rho..=rho + 4 {
        if let Ok(Some(system)) =
            invariant_system(f_center, slack, &seed, m, 256, absorb.as_ref())
        {
            return Some(OrbitOutcome::BoundedSystem {
                entered_at: it,
                modulus: m,
                system_size: system.len(),
            });
        }
    }
    None
}

fn run_disk_orbit(
    family: &PolynomialFamily,
    models: &[ParamPoly],
    bounds: &DiskBounds,
    f_center: &MonicPolynomial,
    slack: &[Option<i64>],
    start: &RatPoly,
    c: &BigRational,
    n: i64,
    opts: &DiskOptions,
) -> Result<(OrbitOutcome, u64)> {
    let d = family.degree() as usize;
    let mut x = ParamPoly::substitute_linear(start, family.prime(), c, n, opts.degree_cap)?;
    let mut snapshots: Vec<(u64, ParamPoly)> = Vec::new();
    let mut done = 0;
    for it in 0..=opts.max_iter {
        done = it;
        if let Some(v0) = x.dominant_constant_valuation() {
            if Rational::from_integer(-v0) > bounds.escape_radius_sup {
                return Ok((OrbitOutcome::Escapes { iterate: it, valuation: v0 }, it));
            }
        }
        if let Some(sigma) = bounds.invariant_sigma {
            let inside = match x.lambda() {
                None => true,
                Some(l) => Rational::from_integer(l) >= -sigma,
            };
            if inside {
                return Ok((OrbitOutcome::Bounded { entered_at: it }, it));
            }
        }
        if SYSTEM_CHECKPOINTS.contains(&it) {
            snapshots.push((it, x.clone()));
        }
        if it == opts.max_iter {
            break;
        }
        // coefficient blow-up guard: certification thresholds are tiny, so
        // far-gone orbits can simply stop
        if let Some(l) = x.lambda() {
            if l.unsigned_abs() > 1_000_000 {
                break;
            }
        }
        // Horner step X <- f_{t(h)}(X)
        let mut acc = x.add(&models[d - 2])?;
        for i in (1..d - 1).rev() {
            acc = acc.mul(&x)?.add(&models[i - 1])?;
        }
        x = acc.mul(&x)?.compress(opts.precision)?;
    }
    // The direct certificates never fired. Some bounded orbits simply
    // never reach the invariant zero disk; fall back to closing a
    // residue-ball system around the orbit enclosure at a checkpoint.
    for (it, x) in &snapshots {
        if let Some(outcome) = try_invariant_system(f_center, slack, x, bounds, *it) {
            return Ok((outcome, done));
        }
    }
    Ok((OrbitOutcome::Inconclusive, done))
}

/// Decide the fate of an entire parameter disk at once.
///
/// Returns Black when every critical orbit of every member map is certified
/// bounded, White when some critical orbit is certified to escape for every
/// member, and Unknown otherwise. Certification works on the truncated
/// polynomial models of the orbits in the disk coordinate h.
pub fn classify_disk(
    family: &PolynomialFamily,
    disk: &PadicBall,
    opts: &DiskOptions,
) -> DiskClassification {
    match classify_disk_inner(family, disk, opts) {
        Ok(res) => res,
        Err(_) => DiskClassification { color: DiskColor::Unknown, certificate: None, iterations_used: 0 },
    }
}

fn classify_disk_inner(
    family: &PolynomialFamily,
    disk: &PadicBall,
    opts: &DiskOptions,
) -> Result<DiskClassification> {
    assert_eq!(disk.prime(), family.prime(), "disk prime must match family");
    let (c, n) = disk_decomposition(disk);
    let models = coefficient_models(family, &c, n, opts)?;
    let bounds = bounds_from_models(family.degree(), &models);
    let t_center = PadicScalar::exact(family.prime(), c.clone());
    let (f_center, _) = family.instantiate(&t_center)?;
    let slack: Vec<Option<i64>> = models.iter().map(ParamPoly::deviation_bound).collect();

    let mut entered = Vec::new();
    let mut orbits = Vec::new();
    let mut used_system = false;
    let mut iterations_used = 0u64;
    let mut all_bounded = true;
    for (j, start) in family.critical_exprs().iter().enumerate() {
        let (outcome, used) =
            run_disk_orbit(family, &models, &bounds, &f_center, &slack, start, &c, n, opts)?;
        iterations_used = iterations_used.max(used);
        match outcome {
            OrbitOutcome::Escapes { iterate, valuation } => {
                let certificate = json!({
                    "type": "escape",
                    "critical_index": j,
                    "iterate": iterate,
                    "valuation": valuation.to_string(),
                    "escape_radius_bound": format_rational(bounds.escape_radius_sup),
                });
                return Ok(DiskClassification {
                    color: DiskColor::White,
                    certificate: Some(certificate),
                    iterations_used,
                });
            }
            OrbitOutcome::Bounded { entered_at } => {
                entered.push(entered_at);
                orbits.push(json!({
                    "critical_index": j,
                    "kind": "invariant_disk",
                    "entered_at": entered_at,
                }));
            }
            OrbitOutcome::BoundedSystem { entered_at, modulus, system_size } => {
                used_system = true;
                orbits.push(json!({
                    "critical_index": j,
                    "kind": "invariant_system",
                    "entered_at": entered_at,
                    "modulus": modulus,
                    "system_size": system_size,
                }));
            }
            OrbitOutcome::Inconclusive => all_bounded = false,
        }
    }
    if all_bounded {
        let certificate = if used_system {
            json!({
                "type": "invariant_system",
                "orbits": orbits,
            })
        } else {
            let sigma = bounds.invariant_sigma.expect("bounded verdicts require a sigma");
            json!({
                "type": "invariant_disk",
                "sigma": format_rational(sigma),
                "entered_at": entered,
            })
        };
        return Ok(DiskClassification {
            color: DiskColor::Black,
            certificate: Some(certificate),
            iterations_used,
        });
    }
    Ok(DiskClassification { color: DiskColor::Unknown, certificate: None, iterations_used })
}
