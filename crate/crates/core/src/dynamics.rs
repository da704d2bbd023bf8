//! Orbit dynamics of normal-form polynomials: escape radius, exact disk
//! images and mapping degrees, and certified orbit classification.
//!
//! Classification is certificate-based. `Escaped` means the iterate
//! provably left the disk that contains every bounded orbit; `Bounded`
//! carries either an invariant-disk certificate or a cycle certificate,
//! both re-verifiable from the disk-image machinery. Anything that cannot
//! be certified within budget is `Unknown`, never guessed.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::ball::{BallRadius, PadicBall};
use crate::error::{Error, Result};
use crate::newton::{format_rational, NewtonPolygon};
use crate::poly::MonicPolynomial;
use crate::scalar::{PadicScalar, Rational, Valuation};

/// Iteration and precision budgets for classification.
#[derive(Debug, Clone, Copy)]
pub struct ClassifyOptions {
    pub max_iter: u64,
    pub precision: u32,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { max_iter: 200, precision: 128 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnknownReason {
    IterBudget,
    PrecisionExhausted,
    Undecidable,
}

impl UnknownReason {
    fn as_str(&self) -> &'static str {
        match self {
            UnknownReason::IterBudget => "iter_budget",
            UnknownReason::PrecisionExhausted => "precision_exhausted",
            UnknownReason::Undecidable => "undecidable",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundedCertificate {
    /// The orbit entered `D(0, p^sigma)`, which maps into itself.
    InvariantDisk { sigma: Rational, entered_at: u64 },
    /// The orbit entered a disk (or point) that returns into itself after
    /// `period` applications of the map.
    Cycle { period: u64, entered_at: u64, anchor: PadicBall },
    /// The orbit entered a finite union of residue balls of radius
    /// `p^{-modulus}` whose image lies back inside the union (together
    /// with the invariant zero disk when one exists).
    InvariantSystem { modulus: i64, entered_at: u64, system: Vec<PadicBall> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// Iterate `n` satisfies `-v(z_n) > R`, so the orbit escapes.
    Escaped { iterate: u64, valuation: i64 },
    Bounded(BoundedCertificate),
    Unknown(UnknownReason),
}

/// One orbit step as recorded for reporting.
#[derive(Debug, Clone)]
pub struct TraceEntry {
    pub iterate: u64,
    pub valuation: Valuation,
    pub value: String,
}

#[derive(Debug, Clone)]
pub struct OrbitClassification {
    pub verdict: Verdict,
    pub trace: Vec<TraceEntry>,
    pub iterations_used: u64,
    pub precision_used: u32,
    pub max_iter: u64,
}

impl OrbitClassification {
    pub fn is_bounded(&self) -> bool {
        matches!(self.verdict, Verdict::Bounded(_))
    }

    pub fn is_escaped(&self) -> bool {
        matches!(self.verdict, Verdict::Escaped { .. })
    }

    pub fn certificate_json(&self) -> Value {
        match &self.verdict {
            Verdict::Escaped { iterate, valuation } => json!({
                "type": "escape",
                "iterate": iterate,
                "valuation": valuation,
            }),
            Verdict::Bounded(BoundedCertificate::InvariantDisk { sigma, entered_at }) => {
                json!({
                    "type": "invariant_disk",
                    "sigma": format_rational(*sigma),
                    "entered_at": entered_at,
                })
            }
            Verdict::Bounded(BoundedCertificate::Cycle { period, entered_at, anchor }) => {
                json!({
                    "type": "cycle",
                    "period": period,
                    "entered_at": entered_at,
                    "anchor": anchor.to_string(),
                })
            }
            Verdict::Bounded(BoundedCertificate::InvariantSystem {
                modulus,
                entered_at,
                system,
            }) => json!({
                "type": "invariant_system",
                "modulus": modulus,
                "entered_at": entered_at,
                "system_size": system.len(),
                "system": system.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
            }),
            Verdict::Unknown(_) => Value::Null,
        }
    }

    pub fn to_json(&self) -> Value {
        let verdict = match &self.verdict {
            Verdict::Escaped { .. } => "escaped",
            Verdict::Bounded(_) => "bounded",
            Verdict::Unknown(_) => "unknown",
        };
        let reason = match &self.verdict {
            Verdict::Unknown(r) => Value::String(r.as_str().into()),
            _ => Value::Null,
        };
        json!({
            "verdict": verdict,
            "reason": reason,
            "certificate": self.certificate_json(),
            "trace": self.trace.iter().map(|e| {
                json!([e.iterate, e.valuation.to_string(), e.value])
            }).collect::<Vec<_>>(),
            "budgets": {
                "max_iter": self.max_iter,
                "precision": self.precision_used,
                "iterations_used": self.iterations_used,
            },
        })
    }
}

/// Smallest exponent `R >= 0` such that every orbit that ever leaves
/// `D(0, p^R)` escapes: outside that disk, the leading term dominates and
/// `|f(z)| = |z|^d`.
pub fn escape_radius(f: &MonicPolynomial) -> Result<Rational> {
    let d = f.degree();
    let mut r = Rational::from_integer(0);
    for i in 1..d {
        let a = f.coefficient(i);
        match a.val() {
            Valuation::Infinite => continue,
            Valuation::Finite(v) => {
                let cand = Rational::new(-v, (d - i) as i64);
                if cand > r {
                    r = cand;
                }
            }
            Valuation::AtLeast(_) => return Err(Error::AmbiguousValuation),
        }
    }
    Ok(r)
}

/// Largest exponent `sigma <= 0` of the form below with
/// `f(D(0, p^sigma)) ⊆ D(0, p^sigma)`, or `None` when the linear term
/// rules such a disk out.
pub fn invariant_zero_disk(f: &MonicPolynomial) -> Result<Option<Rational>> {
    let d = f.degree();
    let a1 = f.coefficient(1);
    match a1.val() {
        Valuation::Infinite => {}
        Valuation::Finite(v) if v >= 0 => {}
        Valuation::Finite(_) => return Ok(None),
        Valuation::AtLeast(k) if k >= 0 => {}
        Valuation::AtLeast(_) => return Err(Error::AmbiguousValuation),
    }
    let mut sigma = Rational::from_integer(0);
    for i in 2..d {
        let a = f.coefficient(i);
        match a.val() {
            Valuation::Infinite => continue,
            Valuation::Finite(v) => {
                let cand = Rational::new(v, (i - 1) as i64);
                if cand < sigma {
                    sigma = cand;
                }
            }
            Valuation::AtLeast(_) => return Err(Error::AmbiguousValuation),
        }
    }
    Ok(Some(sigma))
}

/// Image ball and mapping degree of `f` on a genuine disk.
fn image_profile(f: &MonicPolynomial, disk: &PadicBall) -> Result<(PadicBall, u64)> {
    let s = match disk.radius() {
        BallRadius::Exp(s) => s,
        BallRadius::MinusInfinity => {
            return Err(Error::Domain("disk must have positive radius".into()))
        }
    };
    let b = f.taylor_shift(disk.center())?;
    let mut best: Option<(Rational, u64)> = None;
    for (i, bi) in b.iter().enumerate().skip(1) {
        let v = match bi.val() {
            Valuation::Infinite => continue,
            Valuation::Finite(v) => v,
            Valuation::AtLeast(_) => return Err(Error::AmbiguousValuation),
        };
        let cand = s * Rational::from_integer(i as i64) - Rational::from_integer(v);
        let better = match best {
            None => true,
            // ties go to the larger index: the mapping degree is the
            // largest index attaining the maximum
            Some((r, _)) => cand >= r,
        };
        if better {
            best = Some((cand, i as u64));
        }
    }
    let (r, m) = best.expect("the leading coefficient is nonzero");
    Ok((PadicBall::new(b[0].clone(), BallRadius::Exp(r)), m))
}

/// Exact image of a closed disk: `f(D(a, p^s)) = D(f(a), p^r)` with
/// `r = max_{i>=1}(s*i - v(b_i))` over the shifted coefficients.
pub fn disk_image(f: &MonicPolynomial, disk: &PadicBall) -> Result<PadicBall> {
    if disk.is_point() {
        return Ok(PadicBall::point(f.eval(disk.center())?));
    }
    Ok(image_profile(f, disk)?.0)
}

/// The constant number of preimages (with multiplicity) that each point
/// of `f(D)` has inside `D`.
pub fn disk_degree(f: &MonicPolynomial, disk: &PadicBall) -> Result<u64> {
    Ok(image_profile(f, disk)?.1)
}

/// Number of critical points of `f` in the disk, with multiplicity:
/// roots of the shifted derivative counted by its Newton polygon.
pub fn critical_count_in_disk(f: &MonicPolynomial, disk: &PadicBall) -> Result<u64> {
    let s = match disk.radius() {
        BallRadius::Exp(s) => s,
        BallRadius::MinusInfinity => {
            return Err(Error::Domain("disk must have positive radius".into()))
        }
    };
    let b = f.taylor_shift(disk.center())?;
    // (f(a+w))' in w has coefficients (i+1) * b_{i+1}
    let prime = f.prime();
    let deriv: Vec<PadicScalar> = (0..b.len() - 1)
        .map(|i| {
            b[i + 1]
                .mul(&PadicScalar::from_integer(prime, (i + 1) as i64))
                .expect("scaling by an exact integer cannot fail")
        })
        .collect();
    let polygon = NewtonPolygon::from_coeffs(prime, &deriv)?;
    Ok(polygon.count_roots_in_disk(s))
}

/// Check an invariant-disk certificate directly against the disk image.
pub fn verify_invariant_disk(f: &MonicPolynomial, sigma: Rational) -> Result<bool> {
    let zero_disk = PadicBall::new(
        PadicScalar::zero(f.prime()),
        BallRadius::Exp(sigma),
    );
    disk_image(f, &zero_disk)?.subset_of(&zero_disk)
}

/// Check a cycle certificate: the composed disk image over one period
/// returns into the anchor.
pub fn verify_cycle(f: &MonicPolynomial, anchor: &PadicBall, period: u64) -> Result<bool> {
    let mut b = anchor.clone();
    for _ in 0..period {
        b = disk_image(f, &b)?;
    }
    b.subset_of(anchor)
}

/// Image enclosure of a disk under every polynomial within coefficient
/// slack of `f`: member maps differ from `f` in the coefficient of `z^i`
/// by a term of valuation at least `slack[i-1]` (missing or `None`
/// entries mean the coefficient is shared exactly). The returned ball
/// contains `g(z)` for every member `g` and every `z` in the disk.
pub fn disk_image_with_slack(
    f: &MonicPolynomial,
    disk: &PadicBall,
    slack: &[Option<i64>],
) -> Result<PadicBall> {
    let image = disk_image(f, disk)?;
    if slack.iter().all(Option::is_none) {
        return Ok(image);
    }
    // lower bound on val(z) over the disk
    let mut zmin = disk.center().val().lower_bound();
    if let BallRadius::Exp(s) = disk.radius() {
        let from_radius = (-s).ceil().to_integer();
        zmin = Some(zmin.map_or(from_radius, |v| v.min(from_radius)));
    }
    let Some(zmin) = zmin else {
        // the disk is exactly {0}: every deviation term carries a factor z^i
        return Ok(image);
    };
    let mut radius = image.radius();
    for (idx, sl) in slack.iter().enumerate() {
        let i = idx as i64 + 1;
        if let Some(b) = sl {
            let v = b.saturating_add(i.saturating_mul(zmin));
            radius = radius.max(BallRadius::Exp(Rational::from_integer(-v)));
        }
    }
    Ok(PadicBall::new(image.center().clone(), radius))
}

/// The canonical residue ball of depth `m` containing `z`: the unique
/// ball `D(c, p^{-m})` with `c` the reduced representative of `z` to
/// absolute precision `m`.
pub fn residue_ball(z: &PadicScalar, m: i64) -> Result<PadicBall> {
    let c = z.canonical_representative(m)?;
    Ok(PadicBall::new(c, BallRadius::integer(-m)))
}

/// Cover a ball exactly by canonical residue balls of depth `m`; `None`
/// when the cover would need more than `limit` balls. Valuations are
/// integers, so flooring the radius exponent loses nothing: the two
/// exponents describe the same set of points.
fn cover_by_residue_balls(
    ball: &PadicBall,
    m: i64,
    limit: usize,
) -> Result<Option<Vec<PadicBall>>> {
    let prime = ball.prime();
    let se = match ball.radius() {
        BallRadius::MinusInfinity => None,
        BallRadius::Exp(s) => Some(s.floor().to_integer()),
    };
    let se = match se {
        Some(se) if se > -m => se,
        // the whole ball sits inside one residue ball
        _ => return Ok(Some(vec![residue_ball(ball.center(), m)?])),
    };
    let digits = u32::try_from(se + m).expect("se + m is positive here");
    let count = match prime.checked_pow(digits) {
        Some(c) if usize::try_from(c).map_or(false, |c| c <= limit) => c,
        _ => return Ok(None),
    };
    let step = {
        let p = BigInt::from(prime);
        if se <= 0 {
            BigRational::from_integer(p.pow((-se) as u32))
        } else {
            BigRational::new(BigInt::one(), p.pow(se as u32))
        }
    };
    let mut out = Vec::with_capacity(count as usize);
    for j in 0..count {
        let offset = PadicScalar::exact(prime, step.clone() * BigInt::from(j));
        let cj = ball.center().add(&offset)?;
        out.push(residue_ball(&cj, m)?);
    }
    Ok(Some(out))
}

/// Breadth-first closure search for a finite system of residue balls of
/// depth `m` that contains `seed` and maps back into itself under every
/// polynomial within `slack` of `f`. Balls that land inside `absorb` — a
/// disk the caller guarantees every member maps into itself — are
/// absorbed instead of expanded. On success, any orbit entering `seed`
/// stays inside the returned union together with `absorb` forever, so it
/// is bounded; the search fails (`None`) as soon as a ball reaches the
/// region where the leading term dominates and escape is forced.
pub fn invariant_system(
    f: &MonicPolynomial,
    slack: &[Option<i64>],
    seed: &PadicBall,
    m: i64,
    max_balls: usize,
    absorb: Option<&PadicBall>,
) -> Result<Option<Vec<PadicBall>>> {
    let d = f.degree();
    let mut r_sup = Rational::zero();
    for i in 1..d {
        let mut lb = match f.coefficient(i).val() {
            Valuation::Infinite => None,
            Valuation::Finite(v) => Some(v),
            Valuation::AtLeast(k) => Some(k),
        };
        if let Some(Some(sl)) = slack.get(i as usize - 1) {
            lb = Some(lb.map_or(*sl, |v| v.min(*sl)));
        }
        if let Some(v) = lb {
            let cand = Rational::new(-v, (d - i) as i64);
            if cand > r_sup {
                r_sup = cand;
            }
        }
    }
    let bounded_region =
        PadicBall::new(PadicScalar::zero(f.prime()), BallRadius::Exp(r_sup));

    let mut system: Vec<PadicBall> = Vec::new();
    let mut pending = match cover_by_residue_balls(seed, m, max_balls)? {
        Some(c) => c,
        None => return Ok(None),
    };
    while let Some(b) = pending.pop() {
        if absorb.map_or(false, |a| b.subset_of(a).unwrap_or(false)) {
            continue;
        }
        if system.iter().any(|s| s.same_ball(&b).unwrap_or(false)) {
            continue;
        }
        if !b.subset_of(&bounded_region).unwrap_or(false) {
            return Ok(None);
        }
        if system.len() >= max_balls {
            return Ok(None);
        }
        let image = disk_image_with_slack(f, &b, slack)?;
        system.push(b);
        match cover_by_residue_balls(&image, m, max_balls)? {
            Some(cov) => pending.extend(cov),
            None => return Ok(None),
        }
    }
    Ok(Some(system))
}

/// Independently re-check an invariant-system certificate: `absorb` must
/// map into itself, and every system ball's slacked image must be covered
/// by system balls and `absorb`.
pub fn verify_invariant_system(
    f: &MonicPolynomial,
    slack: &[Option<i64>],
    system: &[PadicBall],
    m: i64,
    absorb: Option<&PadicBall>,
) -> Result<bool> {
    if let Some(a) = absorb {
        if !disk_image_with_slack(f, a, slack)?.subset_of(a)? {
            return Ok(false);
        }
    }
    for b in system {
        let image = disk_image_with_slack(f, b, slack)?;
        let cover = match cover_by_residue_balls(&image, m, 4096)? {
            Some(c) => c,
            None => return Ok(false),
        };
        for cb in cover {
            let placed = system.iter().any(|s| cb.same_ball(s).unwrap_or(false))
                || absorb.map_or(false, |a| cb.subset_of(a).unwrap_or(false));
            if !placed {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

struct OrbitRun {
    verdict: Verdict,
    trace: Vec<TraceEntry>,
    iterations_used: u64,
}

/// Iterates at which the orbit value is snapshotted as a potential seed
/// for a residue-ball invariant system.
const SYSTEM_CHECKPOINTS: [u64; 5] = [8, 16, 32, 64, 128];

/// Last-resort boundedness search once every direct certificate has
/// failed: around each snapshotted iterate, try to close a finite system
/// of residue balls that maps into itself.
fn salvage_invariant_system(
    f: &MonicPolynomial,
    snapshots: &[(u64, PadicScalar)],
) -> Option<BoundedCertificate> {
    if !f.is_exact() {
        return None;
    }
    let sigma = invariant_zero_disk(f).unwrap_or(None);
    let absorb = sigma
        .map(|s| PadicBall::new(PadicScalar::zero(f.prime()), BallRadius::Exp(s)));
    for (n, z) in snapshots {
        for m in 2..=6i64 {
            let Ok(seed) = residue_ball(z, m) else { continue };
            if let Ok(Some(system)) = invariant_system(f, &[], &seed, m, 256, absorb.as_ref())
            {
                return Some(BoundedCertificate::InvariantSystem {
                    modulus: m,
                    entered_at: *n,
                    system,
                });
            }
        }
    }
    None
}

fn classify_once(
    f: &MonicPolynomial,
    z0: &PadicScalar,
    max_iter: u64,
    precision: u32,
) -> OrbitRun {
    let mut snapshots = Vec::new();
    let mut run = classify_core(f, z0, max_iter, precision, &mut snapshots);
    if matches!(run.verdict, Verdict::Unknown(_)) {
        if let Some(cert) = salvage_invariant_system(f, &snapshots) {
            run.verdict = Verdict::Bounded(cert);
        }
    }
    run
}

fn classify_core(
    f: &MonicPolynomial,
    z0: &PadicScalar,
    max_iter: u64,
    precision: u32,
    snapshots: &mut Vec<(u64, PadicScalar)>,
) -> OrbitRun {
    let bit_budget = (64 * precision as u64).max(4096);
    let mut trace = Vec::new();

    let radius = match escape_radius(f) {
        Ok(r) => r,
        Err(_) => {
            return OrbitRun {
                verdict: Verdict::Unknown(UnknownReason::Undecidable),
                trace,
                iterations_used: 0,
            }
        }
    };
    let sigma = invariant_zero_disk(f).unwrap_or(None);

    let mut z = z0.clone();
    let mut exact_phase = z.is_exact() && f.is_exact();
    let mut history: Vec<(u64, PadicScalar)> = Vec::new();
    let mut attempts = 0usize;

    for n in 0..=max_iter {
        trace.push(TraceEntry {
            iterate: n,
            valuation: z.val(),
            value: z.to_string(),
        });

        if let Valuation::Finite(v) = z.val() {
            if Rational::from_integer(-v) > radius {
                return OrbitRun {
                    verdict: Verdict::Escaped { iterate: n, valuation: v },
                    trace,
                    iterations_used: n,
                };
            }
        }

        if let Some(sig) = sigma {
            if z.val().is_at_least(-sig) {
                return OrbitRun {
                    verdict: Verdict::Bounded(BoundedCertificate::InvariantDisk {
                        sigma: sig,
                        entered_at: n,
                    }),
                    trace,
                    iterations_used: n,
                };
            }
        }

        // An iterate known only as O(p^k) with k <= 0 can never satisfy a
        // future certificate: escape needs a finite valuation, disk entry
        // needs a bound of at least -sigma >= 0, and cycle verification
        // needs a strictly positive difference bound. Information only
        // degrades from here, so stop instead of iterating a blind value.
        if matches!(z.val(), Valuation::AtLeast(k) if k <= 0) {
            return OrbitRun {
                verdict: Verdict::Unknown(UnknownReason::PrecisionExhausted),
                trace,
                iterations_used: n,
            };
        }

        // cycle detection against earlier iterates
        for (idx, earlier) in history.iter().rev() {
            let period = n - idx;
            if exact_phase && z == *earlier {
                // exact recurrence: the orbit is genuinely periodic
                return OrbitRun {
                    verdict: Verdict::Bounded(BoundedCertificate::Cycle {
                        period,
                        entered_at: *idx,
                        anchor: PadicBall::point(earlier.clone()),
                    }),
                    trace,
                    iterations_used: n,
                };
            }
            if attempts >= 64 {
                continue;
            }
            let diff = match z.sub(earlier) {
                Ok(d) => d,
                Err(_) => continue,
            };
            let lb = match diff.val().lower_bound() {
                Some(lb) if lb >= 1 => lb,
                _ => continue,
            };
            attempts += 1;
            let anchor = PadicBall::new(
                earlier.clone(),
                BallRadius::Exp(Rational::from_integer(-lb)),
            );
            if verify_cycle(f, &anchor, period).unwrap_or(false) {
                return OrbitRun {
                    verdict: Verdict::Bounded(BoundedCertificate::Cycle {
                        period,
                        entered_at: *idx,
                        anchor,
                    }),
                    trace,
                    iterations_used: n,
                };
            }
        }

        if SYSTEM_CHECKPOINTS.contains(&n) {
            snapshots.push((n, z.clone()));
        }

        if n == max_iter {
            break;
        }
        history.push((n, z.clone()));
        z = match f.eval(&z) {
            Ok(next) => next,
            Err(Error::PrecisionExhausted) => {
                return OrbitRun {
                    verdict: Verdict::Unknown(UnknownReason::PrecisionExhausted),
                    trace,
                    iterations_used: n,
                }
            }
            Err(_) => {
                return OrbitRun {
                    verdict: Verdict::Unknown(UnknownReason::Undecidable),
                    trace,
                    iterations_used: n,
                }
            }
        };
        if z.repr_bits() > bit_budget {
            // exact growth is exponential in the iterate count; fall back
            // to truncated digits once the representation gets heavy
            z = match z.truncate(precision) {
                Ok(t) => t,
                Err(_) => {
                    return OrbitRun {
                        verdict: Verdict::Unknown(UnknownReason::PrecisionExhausted),
                        trace,
                        iterations_used: n,
                    }
                }
            };
            exact_phase = false;
            history.clear();
        }
    }

    OrbitRun {
        verdict: Verdict::Unknown(UnknownReason::IterBudget),
        trace,
        iterations_used: max_iter,
    }
}

/// Classify the forward orbit of `z0` under `f`. The precision budget is
/// doubled once if the first pass dies of precision exhaustion.
pub fn classify_orbit(
    f: &MonicPolynomial,
    z0: &PadicScalar,
    opts: &ClassifyOptions,
) -> OrbitClassification {
    let mut precision = opts.precision;
    let mut run = classify_once(f, z0, opts.max_iter, precision);
    if run.verdict == Verdict::Unknown(UnknownReason::PrecisionExhausted) {
        precision *= 2;
        run = classify_once(f, z0, opts.max_iter, precision);
    }
    OrbitClassification {
        verdict: run.verdict,
        trace: run.trace,
        iterations_used: run.iterations_used,
        precision_used: precision,
        max_iter: opts.max_iter,
    }
}

/// A normal-form polynomial whose inner coefficients are balls: stands
/// for the whole set of polynomials with coefficients in those balls.
#[derive(Debug, Clone)]
pub struct BallPolynomial {
    prime: u64,
    coeffs: Vec<PadicBall>,
}

impl BallPolynomial {
    pub fn new(prime: u64, coeffs: Vec<PadicBall>) -> Self {
        assert!(!coeffs.is_empty(), "degree must be at least 2");
        for c in &coeffs {
            assert_eq!(c.prime(), prime);
        }
        BallPolynomial { prime, coeffs }
    }

    pub fn from_monic(f: &MonicPolynomial) -> Self {
        BallPolynomial {
            prime: f.prime(),
            coeffs: f.inner_coeffs().iter().cloned().map(PadicBall::point).collect(),
        }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn degree(&self) -> u64 {
        self.coeffs.len() as u64 + 1
    }

    /// Ball enclosure of `f(z)` over all member polynomials and all
    /// `z` in the input ball.
    pub fn eval(&self, z: &PadicBall) -> Result<PadicBall> {
        let mut acc = PadicBall::point(PadicScalar::one(self.prime));
        for a in self.coeffs.iter().rev() {
            acc = acc.mul(z)?.add(a)?;
        }
        acc.mul(z)
    }

    /// Upper bound on the escape radius over every member polynomial.
    pub fn escape_radius_sup(&self) -> Rational {
        let d = self.degree();
        let mut r = Rational::from_integer(0);
        for (idx, a) in self.coeffs.iter().enumerate() {
            let i = idx as u64 + 1;
            if let Some(m) = a.sup_neg_val() {
                let cand = m / Rational::from_integer((d - i) as i64);
                if cand > r {
                    r = cand;
                }
            }
        }
        r
    }

    /// Invariant-disk exponent valid for every member polynomial.
    pub fn invariant_zero_disk_inf(&self) -> Option<Rational> {
        let a1 = &self.coeffs[0];
        match a1.inf_val() {
            None => {}
            Some(v) if v >= Rational::from_integer(0) => {}
            Some(_) => return None,
        }
        let mut sigma = Rational::from_integer(0);
        for (idx, a) in self.coeffs.iter().enumerate().skip(1) {
            let i = idx as u64 + 1;
            if let Some(v) = a.inf_val() {
                let cand = v / Rational::from_integer((i - 1) as i64);
                if cand < sigma {
                    sigma = cand;
                }
            }
        }
        Some(sigma)
    }
}

/// Magnitude guard for ball iteration: once exponents pass this, the
/// enclosure has long since stopped carrying usable information.
fn ball_degenerate(z: &PadicBall) -> bool {
    let big = 1_000_000_000i64;
    let radius_big = match z.radius() {
        BallRadius::Exp(s) => s.numer().abs() > big || *s.denom() > big,
        BallRadius::MinusInfinity => false,
    };
    let center_big = matches!(z.center().val(), Valuation::Finite(v) if v.abs() > big);
    radius_big || center_big
}

fn ball_run(fb: &BallPolynomial, z0: &PadicBall, max_iter: u64) -> OrbitRun {
    let prime = fb.prime();
    let radius = fb.escape_radius_sup();
    let sigma = fb.invariant_zero_disk_inf();
    let zero_disk = sigma.map(|s| {
        PadicBall::new(PadicScalar::zero(prime), BallRadius::Exp(s))
    });

    let mut trace = Vec::new();
    let mut z = z0.reduce_center();
    let mut history: Vec<PadicBall> = Vec::new();

    for n in 0..=max_iter {
        if ball_degenerate(&z) {
            return OrbitRun {
                verdict: Verdict::Unknown(UnknownReason::Undecidable),
                trace,
                iterations_used: n,
            };
        }
        trace.push(TraceEntry {
            iterate: n,
            valuation: z.center().val(),
            value: z.to_string(),
        });

        if z.all_neg_val_exceed(radius) {
            let v = match z.center().val() {
                Valuation::Finite(v) => v,
                _ => unreachable!("whole-ball escape implies a finite center valuation"),
            };
            return OrbitRun {
                verdict: Verdict::Escaped { iterate: n, valuation: v },
                trace,
                iterations_used: n,
            };
        }

        if let Some(disk) = &zero_disk {
            if z.subset_of(disk).unwrap_or(false) {
                return OrbitRun {
                    verdict: Verdict::Bounded(BoundedCertificate::InvariantDisk {
                        sigma: sigma.unwrap(),
                        entered_at: n,
                    }),
                    trace,
                    iterations_used: n,
                };
            }
        }

        // tube certificate: the iterated ball re-entered an earlier one,
        // so by monotonicity of ball evaluation every later iterate stays
        // inside the finite union of tubes seen so far
        for j in 0..history.len() {
            if z.subset_of(&history[j]).unwrap_or(false) {
                return OrbitRun {
                    verdict: Verdict::Bounded(BoundedCertificate::Cycle {
                        period: (n as usize - j) as u64,
                        entered_at: j as u64,
                        anchor: history[j].clone(),
                    }),
                    trace,
                    iterations_used: n,
                };
            }
        }

        if n == max_iter {
            break;
        }
        history.push(z.clone());
        z = match fb.eval(&z) {
            Ok(next) => next.reduce_center(),
            Err(Error::PrecisionExhausted) => {
                return OrbitRun {
                    verdict: Verdict::Unknown(UnknownReason::PrecisionExhausted),
                    trace,
                    iterations_used: n,
                }
            }
            Err(_) => {
                return OrbitRun {
                    verdict: Verdict::Unknown(UnknownReason::Undecidable),
                    trace,
                    iterations_used: n,
                }
            }
        };
    }

    OrbitRun {
        verdict: Verdict::Unknown(UnknownReason::IterBudget),
        trace,
        iterations_used: max_iter,
    }
}

/// Classify the orbits of every point of `z0` under every member of the
/// ball polynomial simultaneously. `Escaped`/`Bounded` hold for all of
/// them at once; anything weaker is `Unknown`.
pub fn classify_orbit_ball(
    fb: &BallPolynomial,
    z0: &PadicBall,
    opts: &ClassifyOptions,
) -> OrbitClassification {
    let run = ball_run(fb, z0, opts.max_iter);
    OrbitClassification {
        verdict: run.verdict,
        trace: run.trace,
        iterations_used: run.iterations_used,
        precision_used: opts.precision,
        max_iter: opts.max_iter,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcbVerdict {
    Pcb,
    NotPcb,
    Unknown,
}

#[derive(Debug, Clone)]
pub struct PcbAnswer {
    pub verdict: PcbVerdict,
    pub per_point: Vec<(PadicScalar, OrbitClassification)>,
}

impl PcbAnswer {
    pub fn to_json(&self) -> Value {
        let verdict = match self.verdict {
            PcbVerdict::Pcb => "PCB",
            PcbVerdict::NotPcb => "NotPCB",
            PcbVerdict::Unknown => "Unknown",
        };
        json!({
            "verdict": verdict,
            "critical_orbits": self.per_point.iter().map(|(c, o)| {
                json!({
                    "critical_point": c.to_string(),
                    "classification": o.to_json(),
                })
            }).collect::<Vec<_>>(),
        })
    }
}

/// Is `f` post-critically bounded? The caller supplies the critical
/// points (root-finding over extensions is out of scope); each is checked
/// against `f'` before use.
pub fn is_pcb(
    f: &MonicPolynomial,
    critical_points: &[PadicScalar],
    opts: &ClassifyOptions,
) -> Result<PcbAnswer> {
    for c in critical_points {
        let fc = f.eval_derivative(c)?;
        if fc.is_provably_nonzero() {
            return Err(Error::NotACriticalPoint(c.to_string()));
        }
    }
    let per_point: Vec<(PadicScalar, OrbitClassification)> = critical_points
        .iter()
        .map(|c| (c.clone(), classify_orbit(f, c, opts)))
        .collect();
    let verdict = if per_point.iter().any(|(_, o)| o.is_escaped()) {
        PcbVerdict::NotPcb
    } else if per_point.iter().all(|(_, o)| o.is_bounded()) {
        PcbVerdict::Pcb
    } else {
        PcbVerdict::Unknown
    };
    Ok(PcbAnswer { verdict, per_point })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(num: i64, den: i64) -> PadicScalar {
        PadicScalar::from_ratio(2, num, den)
    }

    fn cubic(t_num: i64, t_den: i64) -> MonicPolynomial {
        // z^3 - (3/2) t z^2
        let a2 = s(-3, 2).mul(&s(t_num, t_den)).unwrap();
        MonicPolynomial::new(2, vec![s(0, 1), a2])
    }

    fn ball(c: &PadicScalar, exp: i64) -> PadicBall {
        PadicBall::new(c.clone(), BallRadius::integer(exp))
    }

    #[test]
    fn escape_radius_examples() {
        assert_eq!(escape_radius(&cubic(1, 1)).unwrap(), Rational::from_integer(1));
        let pure = MonicPolynomial::new(2, vec![s(0, 1), s(0, 1)]);
        assert_eq!(escape_radius(&pure).unwrap(), Rational::from_integer(0));
        assert_eq!(escape_radius(&cubic(1, 4)).unwrap(), Rational::from_integer(3));
    }

    #[test]
    fn invariant_disk_examples() {
        assert_eq!(
            invariant_zero_disk(&cubic(1, 1)).unwrap(),
            Some(Rational::from_integer(-1))
        );
        let pure = MonicPolynomial::new(2, vec![s(0, 1), s(0, 1)]);
        assert_eq!(invariant_zero_disk(&pure).unwrap(), Some(Rational::from_integer(0)));
        assert_eq!(
            invariant_zero_disk(&cubic(2, 1)).unwrap(),
            Some(Rational::from_integer(0))
        );
        // a big linear term kills every candidate disk around 0
        let g = MonicPolynomial::new(2, vec![s(1, 2), s(0, 1)]);
        assert_eq!(invariant_zero_disk(&g).unwrap(), None);
    }

    #[test]
    fn disk_image_examples() {
        let f1 = cubic(1, 1);
        let half = ball(&PadicScalar::zero(2), -1);
        assert_eq!(disk_image(&f1, &half).unwrap(), half);
        let unit = ball(&PadicScalar::zero(2), 0);
        assert_eq!(disk_image(&f1, &unit).unwrap(), ball(&PadicScalar::zero(2), 1));
        let g = MonicPolynomial::new(3, vec![PadicScalar::one(3)]);
        let unit3 = PadicBall::new(PadicScalar::zero(3), BallRadius::integer(0));
        assert_eq!(disk_image(&g, &unit3).unwrap(), unit3);
    }

    #[test]
    fn disk_degree_examples() {
        let g = MonicPolynomial::new(3, vec![PadicScalar::one(3)]);
        let unit3 = PadicBall::new(PadicScalar::zero(3), BallRadius::integer(0));
        assert_eq!(disk_degree(&g, &unit3).unwrap(), 2);
        let f1 = cubic(1, 1);
        assert_eq!(disk_degree(&f1, &ball(&PadicScalar::zero(2), -1)).unwrap(), 2);
        assert_eq!(disk_degree(&f1, &ball(&PadicScalar::zero(2), -10)).unwrap(), 2);
    }

    #[test]
    fn critical_count_examples() {
        let g = MonicPolynomial::new(3, vec![PadicScalar::one(3)]);
        let unit3 = PadicBall::new(PadicScalar::zero(3), BallRadius::integer(0));
        assert_eq!(critical_count_in_disk(&g, &unit3).unwrap(), 1);
        let f1 = cubic(1, 1);
        assert_eq!(critical_count_in_disk(&f1, &ball(&PadicScalar::zero(2), -1)).unwrap(), 1);
        assert_eq!(critical_count_in_disk(&f1, &ball(&s(1, 1), -2)).unwrap(), 1);
    }

    #[test]
    fn orbit_of_one_hits_the_fixed_point() {
        let f1 = cubic(1, 1);
        let out = classify_orbit(&f1, &s(1, 1), &ClassifyOptions::default());
        match &out.verdict {
            Verdict::Bounded(BoundedCertificate::Cycle { period, entered_at, anchor }) => {
                assert_eq!(*period, 1);
                assert_eq!(*entered_at, 1);
                assert_eq!(anchor.center(), &s(-1, 2));
                assert!(verify_cycle(&f1, anchor, *period).unwrap());
            }
            other => panic!("expected a cycle certificate, got {other:?}"),
        }
    }

    #[test]
    fn escaping_parameter_seventeen() {
        let f = cubic(17, 1);
        let out = classify_orbit(&f, &s(17, 1), &ClassifyOptions::default());
        assert_eq!(out.verdict, Verdict::Escaped { iterate: 4, valuation: -2 });
    }

    #[test]
    fn bounded_parameter_ninety_seven() {
        let f = cubic(97, 1);
        let out = classify_orbit(&f, &s(97, 1), &ClassifyOptions::default());
        match out.verdict {
            Verdict::Bounded(BoundedCertificate::InvariantDisk { sigma, entered_at }) => {
                assert_eq!(sigma, Rational::from_integer(-1));
                assert_eq!(entered_at, 4);
                assert!(verify_invariant_disk(&f, sigma).unwrap());
            }
            other => panic!("expected an invariant-disk certificate, got {other:?}"),
        }
    }

    #[test]
    fn large_parameter_escapes_immediately() {
        // |t| > 1: the critical orbit of t leaves after one step
        let f = cubic(1, 4);
        let out = classify_orbit(&f, &s(1, 4), &ClassifyOptions::default());
        assert_eq!(out.verdict, Verdict::Escaped { iterate: 1, valuation: -7 });
    }

    #[test]
    fn independent_balls_cannot_certify_marginal_escape() {
        // With the coefficient ball and the argument ball decoupled, the
        // reachable set of z^2 (z + a) contains 0 (choose z = -a once the
        // orbit ball reaches unit radius), so no uniform verdict exists;
        // the enclosure must come back Unknown rather than guess. The
        // parameter-coupled engine in the tree module certifies this disk.
        let t_ball = ball(&s(17, 1), -5);
        let a2 = t_ball.mul_scalar(&s(-3, 2)).unwrap();
        let fb = BallPolynomial::new(2, vec![PadicBall::point(s(0, 1)), a2]);
        let out = classify_orbit_ball(&fb, &t_ball, &ClassifyOptions::default());
        assert!(matches!(out.verdict, Verdict::Unknown(_)));
    }

    #[test]
    fn whole_disk_escape_members_agree() {
        // points sampled from D(17, 2^-5) all escape
        let opts = ClassifyOptions::default();
        for j in [0i64, 1, 3, 7] {
            let t = s(17 + 32 * j, 1);
            let f = MonicPolynomial::new(2, vec![s(0, 1), s(-3, 2).mul(&t).unwrap()]);
            let out = classify_orbit(&f, &t, &opts);
            assert!(out.is_escaped(), "member {t} failed to escape");
        }
    }

    #[test]
    fn ball_orbit_bounded_for_small_disk() {
        let t_ball = ball(&PadicScalar::zero(2), -1);
        let a2 = t_ball.mul_scalar(&s(-3, 2)).unwrap();
        let fb = BallPolynomial::new(2, vec![PadicBall::point(s(0, 1)), a2]);
        let out = classify_orbit_ball(&fb, &t_ball, &ClassifyOptions::default());
        match out.verdict {
            Verdict::Bounded(BoundedCertificate::InvariantDisk { sigma, entered_at }) => {
                assert_eq!(sigma, Rational::from_integer(0));
                assert_eq!(entered_at, 0);
            }
            other => panic!("expected invariant disk, got {other:?}"),
        }
    }

    #[test]
    fn mixed_disk_stays_unknown() {
        let t_ball = ball(&s(1, 1), 0);
        let a2 = t_ball.mul_scalar(&s(-3, 2)).unwrap();
        let fb = BallPolynomial::new(2, vec![PadicBall::point(s(0, 1)), a2]);
        let out = classify_orbit_ball(&fb, &t_ball, &ClassifyOptions { max_iter: 10, precision: 64 });
        assert!(matches!(out.verdict, Verdict::Unknown(_)));
    }

    #[test]
    fn pcb_answers() {
        let f1 = cubic(1, 1);
        let opts = ClassifyOptions::default();
        let ans = is_pcb(&f1, &[s(0, 1), s(1, 1)], &opts).unwrap();
        assert_eq!(ans.verdict, PcbVerdict::Pcb);

        let f17 = cubic(17, 1);
        let ans = is_pcb(&f17, &[s(0, 1), s(17, 1)], &opts).unwrap();
        assert_eq!(ans.verdict, PcbVerdict::NotPcb);

        // z^3 + z^2 at p = 5: critical points 0 and -2/3
        let g = MonicPolynomial::new(5, vec![PadicScalar::zero(5), PadicScalar::one(5)]);
        let c = PadicScalar::from_ratio(5, -2, 3);
        let ans = is_pcb(&g, &[PadicScalar::zero(5), c], &opts).unwrap();
        assert_eq!(ans.verdict, PcbVerdict::Pcb);

        assert!(matches!(
            is_pcb(&f1, &[s(7, 1)], &opts),
            Err(Error::NotACriticalPoint(_))
        ));
    }

    #[test]
    fn residue_balls_are_canonical() {
        // same class mod 2^4 => same canonical ball
        let a = residue_ball(&s(27, 2), 4).unwrap();
        let b = residue_ball(&s(27 + 3 * 32, 2), 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.center(), &s(27, 2));
        // truncated scalars canonicalize from their stored digits
        let t = s(27, 2).truncate(30).unwrap();
        assert_eq!(residue_ball(&t, 4).unwrap(), a);
        // insufficient precision is an error, not a guess
        let shallow = PadicScalar::zero_to_precision(2, 2);
        assert!(residue_ball(&shallow, 4).is_err());
    }

    #[test]
    fn residue_cover_is_a_true_cover() {
        // D(3, 2^-2) splits into 4 residue balls of depth 4
        let b = ball(&s(3, 1), -2);
        let cover = cover_by_residue_balls(&b, 4, 64).unwrap().unwrap();
        assert_eq!(cover.len(), 4);
        for j in 0..32i64 {
            let x = s(3 + 4 * j, 1);
            assert!(b.contains(&x).unwrap());
            let hits = cover.iter().filter(|cb| cb.contains(&x).unwrap()).count();
            assert_eq!(hits, 1, "x = {x} must land in exactly one cover ball");
        }
        // cover budget is respected
        assert!(cover_by_residue_balls(&b, 12, 64).unwrap().is_none());
        // a small ball is swallowed by a single residue ball
        let tiny = ball(&s(3, 1), -9);
        let cover = cover_by_residue_balls(&tiny, 4, 64).unwrap().unwrap();
        assert_eq!(cover, vec![residue_ball(&s(3, 1), 4).unwrap()]);
    }

    #[test]
    fn slacked_image_contains_perturbed_images() {
        // members: a_2 shifted by anything of valuation >= 7
        let f = cubic(161, 1);
        let g = cubic(161 + 256, 1);
        let disk = ball(&s(3, 1), -4);
        let slack = [None, Some(7)];
        let image = disk_image_with_slack(&f, &disk, &slack).unwrap();
        assert!(disk_image(&f, &disk).unwrap().subset_of(&image).unwrap());
        for j in 0..8i64 {
            let z = s(3 + 16 * j, 1);
            assert!(image.contains(&g.eval(&z).unwrap()).unwrap(), "g(z) escaped at z = {z}");
        }
    }

    #[test]
    fn wandering_orbit_gets_a_system_certificate() {
        // the critical orbit of t = 161 stays at valuations {-1, 0} forever:
        // it never enters the invariant zero disk and never cycles, but it
        // is trapped in five residue balls of depth 4
        let f = cubic(161, 1);
        let out = classify_orbit(&f, &s(161, 1), &ClassifyOptions::default());
        let Verdict::Bounded(BoundedCertificate::InvariantSystem {
            modulus,
            entered_at,
            system,
        }) = &out.verdict
        else {
            panic!("expected an invariant-system certificate, got {:?}", out.verdict);
        };
        assert_eq!(*modulus, 4);
        assert_eq!(*entered_at, 8);
        assert_eq!(system.len(), 5);
        let anchor = residue_ball(&s(27, 2), 4).unwrap();
        assert!(system.iter().any(|b| b.same_ball(&anchor).unwrap()));

        // independent re-verification, and sensitivity to tampering
        let sigma = invariant_zero_disk(&f).unwrap().unwrap();
        let absorb = PadicBall::new(PadicScalar::zero(2), BallRadius::Exp(sigma));
        assert!(verify_invariant_system(&f, &[], system, *modulus, Some(&absorb)).unwrap());
        let tampered: Vec<PadicBall> = system[1..].to_vec();
        assert!(!verify_invariant_system(&f, &[], &tampered, *modulus, Some(&absorb)).unwrap());
    }

    #[test]
    fn escaping_points_admit_no_system() {
        // 17 lies in D(1, 2^-4) and its critical orbit escapes, so no
        // invariant system can close over that seed
        let f = cubic(17, 1);
        let seed = residue_ball(&s(17, 1), 4).unwrap();
        let sigma = invariant_zero_disk(&f).unwrap().unwrap();
        let absorb = PadicBall::new(PadicScalar::zero(2), BallRadius::Exp(sigma));
        let got = invariant_system(&f, &[], &seed, 4, 256, Some(&absorb)).unwrap();
        assert!(got.is_none());
    }

    #[test]
    fn json_report_shape() {
        let f1 = cubic(1, 1);
        let out = classify_orbit(&f1, &s(1, 1), &ClassifyOptions::default());
        let v = out.to_json();
        assert_eq!(v["verdict"], "bounded");
        assert_eq!(v["certificate"]["type"], "cycle");
        assert_eq!(v["certificate"]["period"], 1);
        assert_eq!(v["trace"][0][0], 0);
        assert_eq!(v["trace"][0][2], "1");
        assert_eq!(v["budgets"]["max_iter"], 200);
    }
}
