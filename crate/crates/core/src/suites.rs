//! Built-in verification suites: deterministic batteries of end-to-end
//! checks over the library's certified surface. The same code backs the
//! command-line `verify` subcommand and the integration tests.
//!
//! Every randomized suite draws from a fixed-seed generator and evaluates
//! instances in a stable order, so a suite report is byte-identical
//! across runs and across thread counts.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ball::{BallRadius, PadicBall};
use crate::dynamics::{
    critical_count_in_disk, disk_degree, is_pcb, BoundedCertificate, ClassifyOptions, PcbVerdict,
    Verdict,
};
use crate::error::{Error, Result};
use crate::family::{classify_parameter, PolynomialFamily};
use crate::newton::{format_rational, shift_compare, NewtonPolygon};
use crate::poly::MonicPolynomial;
use crate::radius::{
    decompose, is_prime, known_radius, lower_bound, pcf_witness, verify_pcf_witness,
    witness_escape_radius, RadiusKind,
};
use crate::scalar::{PadicScalar, Rational, Valuation};

/// Names accepted by [`run_suite`], in display order.
pub const SUITE_NAMES: [&str; 6] = ["newton", "disk", "pto1", "radius", "witness", "bdry"];

/// One named pass/fail result within a suite.
#[derive(Debug, Clone)]
pub struct SuiteCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl SuiteCheck {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        SuiteCheck { name: name.into(), pass, detail: detail.into() }
    }
}

/// Run one suite by name.
pub fn run_suite(name: &str) -> Result<Vec<SuiteCheck>> {
    match name {
        "newton" => suite_newton(),
        "disk" => suite_disk(),
        "pto1" => suite_pto1(),
        "radius" => suite_radius(),
        "witness" => suite_witness(),
        "bdry" => suite_bdry(),
        other => Err(Error::Parse(format!(
            "unknown suite '{other}' (available: {})",
            SUITE_NAMES.join(", ")
        ))),
    }
}

/// All suites, in display order.
pub fn run_all_suites() -> Result<Vec<(String, Vec<SuiteCheck>)>> {
    SUITE_NAMES
        .iter()
        .map(|name| Ok((name.to_string(), run_suite(name)?)))
        .collect()
}

pub fn all_pass(checks: &[SuiteCheck]) -> bool {
    checks.iter().all(|c| c.pass)
}

/// Plain-text report: one line per check plus a summary line. Stable
/// formatting, ASCII only.
pub fn render_report(name: &str, checks: &[SuiteCheck]) -> String {
    let mut out = String::new();
    out.push_str(&format!("suite {name}: {} checks\n", checks.len()));
    for c in checks {
        let mark = if c.pass { "PASS" } else { "FAIL" };
        if c.detail.is_empty() {
            out.push_str(&format!("  [{mark}] {}\n", c.name));
        } else {
            out.push_str(&format!("  [{mark}] {}: {}\n", c.name, c.detail));
        }
    }
    let passed = checks.iter().filter(|c| c.pass).count();
    out.push_str(&format!("suite {name}: {passed}/{} passed\n", checks.len()));
    out
}

fn power_rational(p: u64, v: i64) -> BigRational {
    if v >= 0 {
        BigRational::from_integer(BigInt::from(p).pow(v as u32))
    } else {
        BigRational::new(BigInt::one(), BigInt::from(p).pow((-v) as u32))
    }
}

/// Coefficients of the monic product of `(z - r)` over the given roots,
/// low-to-high, leading 1 included.
fn expand_roots(roots: &[BigRational]) -> Vec<BigRational> {
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

// ---------------------------------------------------------------------
// newton: split polynomials with prescribed root valuations
// ---------------------------------------------------------------------

struct SplitInstance {
    p: u64,
    zero_mult: usize,
    /// Valuation and unit part of each nonzero root `u * p^v`.
    vals: Vec<i64>,
    units: Vec<i64>,
}

fn check_split_instance(inst: &SplitInstance) -> (bool, Option<bool>) {
    let p = inst.p;
    let mut roots: Vec<BigRational> = vec![BigRational::zero(); inst.zero_mult];
    for (&v, &u) in inst.vals.iter().zip(&inst.units) {
        roots.push(BigRational::from_integer(BigInt::from(u)) * power_rational(p, v));
    }
    let rational_coeffs = expand_roots(&roots);
    let coeffs: Vec<PadicScalar> =
        rational_coeffs.iter().map(|q| PadicScalar::exact(p, q.clone())).collect();
    let Ok(polygon) = NewtonPolygon::from_coeffs(p, &coeffs) else {
        return (false, None);
    };

    // Expected multiset of root valuations: the polygon reports origin
    // roots first, then finite valuations in decreasing order.
    let mut expected: Vec<Option<Rational>> = vec![None; inst.zero_mult];
    let mut sorted = inst.vals.clone();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    expected.extend(sorted.into_iter().map(|v| Some(Rational::from_integer(v))));
    let polygon_ok = polygon.zero_root_count() == inst.zero_mult as u64
        && polygon.root_valuations() == expected;

    // Derivative comparison applies when p exceeds the degree; it needs
    // the normal form, hence at least one root at the origin.
    let d = roots.len() as u64;
    let shift_ok = if p > d && inst.zero_mult >= 1 {
        let inner = coeffs[1..roots.len()].to_vec();
        let f = MonicPolynomial::new(p, inner);
        Some(shift_compare(&f).map(|sc| sc.translated_equal).unwrap_or(false))
    } else {
        None
    };
    (polygon_ok, shift_ok)
}

fn suite_newton() -> Result<Vec<SuiteCheck>> {
    const INSTANCES: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(0x6e65_7774);
    let primes = [2u64, 3, 5, 7, 11, 13];
    let mut instances = Vec::with_capacity(INSTANCES);
    for _ in 0..INSTANCES {
        let p = primes[rng.gen_range(0..primes.len())];
        let d: usize = rng.gen_range(3..=8);
        let zero_mult: usize = rng.gen_range(0..=2);
        let mut vals = Vec::with_capacity(d - zero_mult);
        let mut units = Vec::with_capacity(d - zero_mult);
        for _ in 0..d - zero_mult {
            vals.push(rng.gen_range(-3..=3));
            units.push(loop {
                let u: i64 = rng.gen_range(-9..=9);
                if u != 0 && u.unsigned_abs() % p != 0 {
                    break u;
                }
            });
        }
        instances.push(SplitInstance { p, zero_mult, vals, units });
    }

    let results: Vec<(bool, Option<bool>)> =
        instances.par_iter().map(check_split_instance).collect();
    let polygon_ok = results.iter().filter(|(ok, _)| *ok).count();
    let shift_total = results.iter().filter(|(_, s)| s.is_some()).count();
    let shift_ok = results.iter().filter(|(_, s)| *s == Some(true)).count();

    Ok(vec![
        SuiteCheck::new(
            "polygon root valuations match the constructed roots",
            polygon_ok == INSTANCES,
            format!("{polygon_ok}/{INSTANCES} split polynomials"),
        ),
        SuiteCheck::new(
            "derivative polygon is a unit shift when p > deg f",
            shift_total > 0 && shift_ok == shift_total,
            format!("{shift_ok}/{shift_total} applicable instances"),
        ),
    ])
}

// ---------------------------------------------------------------------
// pto1: preimage counting inside disks
// ---------------------------------------------------------------------

struct DiskCountInstance {
    p: u64,
    coeffs: Vec<i64>,
    center: i64,
    radius_exp: i64,
}

fn eval_disk_count(inst: &DiskCountInstance) -> Option<(u64, bool)> {
    let p = inst.p;
    let inner: Vec<PadicScalar> =
        inst.coeffs.iter().map(|&c| PadicScalar::from_integer(p, c)).collect();
    let f = MonicPolynomial::new(p, inner);
    let disk = PadicBall::new(
        PadicScalar::from_integer(p, inst.center),
        BallRadius::Exp(Rational::from_integer(inst.radius_exp)),
    );
    let m = match disk_degree(&f, &disk) {
        Ok(m) => m,
        Err(_) => return Some((p, false)),
    };
    if m % p == 0 {
        return None; // outside the tame case the count may differ
    }
    match critical_count_in_disk(&f, &disk) {
        Ok(c) => Some((p, c == m - 1)),
        Err(_) => Some((p, false)),
    }
}

fn suite_pto1() -> Result<Vec<SuiteCheck>> {
    const TARGET: usize = 1000;
    const CANDIDATES: usize = 1400;
    let mut rng = ChaCha8Rng::seed_from_u64(0x70_746f_31);
    let primes = [3u64, 5, 7];
    let mut candidates = Vec::with_capacity(CANDIDATES);
    for i in 0..CANDIDATES {
        let p = primes[i % primes.len()];
        let d: usize = rng.gen_range(3..=8);
        let coeffs: Vec<i64> = (0..d - 1).map(|_| rng.gen_range(-200..=200)).collect();
        let center = rng.gen_range(-100..=100);
        let radius_exp = rng.gen_range(-2..=2);
        candidates.push(DiskCountInstance { p, coeffs, center, radius_exp });
    }

    let kept: Vec<(u64, bool)> = candidates
        .par_iter()
        .map(eval_disk_count)
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .take(TARGET)
        .collect();

    let mut checks = vec![SuiteCheck::new(
        "instance pool saturated",
        kept.len() == TARGET,
        format!("{} tame instances kept (target {TARGET})", kept.len()),
    )];
    for &q in &primes {
        let total = kept.iter().filter(|(p, _)| *p == q).count();
        let good = kept.iter().filter(|(p, ok)| *p == q && *ok).count();
        checks.push(SuiteCheck::new(
            format!("critical count = mapping degree - 1 at p = {q}"),
            total > 0 && good == total,
            format!("{good}/{total} disks"),
        ));
    }
    Ok(checks)
}

// ---------------------------------------------------------------------
// disk: boundedness from integral critical points
// ---------------------------------------------------------------------

fn suite_disk() -> Result<Vec<SuiteCheck>> {
    const LARGE_PRIME_INSTANCES: usize = 350;
    const PRIME_POWER_INSTANCES: usize = 150;
    let mut rng = ChaCha8Rng::seed_from_u64(0x6469_736b);
    let primes = [5u64, 7, 11];
    // (prime, critical points, is the p > d case)
    let mut instances: Vec<(u64, Vec<i64>, bool)> = Vec::new();
    for i in 0..LARGE_PRIME_INSTANCES {
        let p = primes[i % primes.len()];
        let d = rng.gen_range(3..=(p - 1).min(8));
        let crits: Vec<i64> = (0..d - 1).map(|_| rng.gen_range(-50..=50)).collect();
        instances.push((p, crits, true));
    }
    for _ in 0..PRIME_POWER_INSTANCES {
        let d: u64 = if rng.gen_bool(0.5) { 4 } else { 8 };
        let crits: Vec<i64> = (0..d - 1).map(|_| rng.gen_range(-20..=20)).collect();
        instances.push((2, crits, false));
    }

    let opts = ClassifyOptions { max_iter: 60, precision: 96 };
    let results: Vec<(bool, bool)> = instances
        .par_iter()
        .map(|(p, crits, large_prime)| {
            let cs: Vec<PadicScalar> =
                crits.iter().map(|&c| PadicScalar::from_integer(*p, c)).collect();
            let ok = (|| -> Result<bool> {
                let f = MonicPolynomial::from_critical_points(*p, &cs)?;
                let integral = f
                    .inner_coeffs()
                    .iter()
                    .all(|a| a.val().lower_bound().map_or(true, |v| v >= 0));
                Ok(integral && is_pcb(&f, &cs, &opts)?.verdict == PcbVerdict::Pcb)
            })()
            .unwrap_or(false);
            (*large_prime, ok)
        })
        .collect();

    let lp_good = results.iter().filter(|(lp, ok)| *lp && *ok).count();
    let pp_good = results.iter().filter(|(lp, ok)| !*lp && *ok).count();
    Ok(vec![
        SuiteCheck::new(
            "integral critical points imply boundedness when p > d",
            lp_good == LARGE_PRIME_INSTANCES,
            format!("{lp_good}/{LARGE_PRIME_INSTANCES} maps over p in {{5, 7, 11}}"),
        ),
        SuiteCheck::new(
            "integral maps of degree 2^k are post-critically bounded",
            pp_good == PRIME_POWER_INSTANCES,
            format!("{pp_good}/{PRIME_POWER_INSTANCES} maps of degree 4 or 8 over p = 2"),
        ),
    ])
}

// ---------------------------------------------------------------------
// radius: the r(d, p) table and its internal consistency
// ---------------------------------------------------------------------

fn suite_radius() -> Result<Vec<SuiteCheck>> {
    let mut checks = Vec::new();

    let pinned: [(u64, u64, Rational); 6] = [
        (3, 2, Rational::from_integer(1)),
        (5, 3, Rational::new(3, 4)),
        (4, 2, Rational::from_integer(0)),
        (8, 2, Rational::from_integer(0)),
        (10, 5, Rational::from_integer(0)),
        (6, 3, Rational::from_integer(0)),
    ];
    for (d, p, want) in pinned {
        let ans = known_radius(d, p);
        let pass = matches!(&ans.kind, RadiusKind::Exact { value, .. } if *value == want);
        checks.push(SuiteCheck::new(
            format!("exact value r({d},{p}) = {}", format_rational(want)),
            pass,
            format!("reported {ans}"),
        ));
    }

    let mut pgtd_total = 0usize;
    let mut pgtd_good = 0usize;
    for d in 2..=10u64 {
        for p in (2..=31u64).filter(|&p| is_prime(p) && p > d) {
            pgtd_total += 1;
            let ans = known_radius(d, p);
            if matches!(&ans.kind, RadiusKind::Exact { value, source } if value.is_zero() && *source == "p>d")
            {
                pgtd_good += 1;
            }
        }
    }
    checks.push(SuiteCheck::new(
        "zero radius whenever p > d (d <= 10)",
        pgtd_good == pgtd_total,
        format!("{pgtd_good}/{pgtd_total} pairs"),
    ));

    let b52 = known_radius(5, 2);
    checks.push(SuiteCheck::new(
        "only a lower bound is known for (5,2)",
        matches!(&b52.kind, RadiusKind::Bounds { lower } if *lower == Rational::from_integer(2))
            && b52.cell() == ">=2",
        format!("reported {b52}"),
    ));

    let mut sweep_total = 0usize;
    let mut sweep_good = 0usize;
    for d in 3..=24u64 {
        for p in (2..d).filter(|&p| is_prime(p)) {
            let Ok(lb) = lower_bound(d, p) else { continue };
            sweep_total += 1;
            let consistent = match known_radius(d, p).kind {
                RadiusKind::Exact { value, .. } => value >= lb,
                RadiusKind::Claimed { value, .. } => value >= lb,
                RadiusKind::Bounds { lower } => lower == lb,
            };
            if consistent {
                sweep_good += 1;
            }
        }
    }
    checks.push(SuiteCheck::new(
        "table entries never undercut the certified lower bound (d <= 24)",
        sweep_good == sweep_total && sweep_total > 0,
        format!("{sweep_good}/{sweep_total} pairs"),
    ));

    let mut wit_total = 0usize;
    let mut wit_good = 0usize;
    for d in 3..=24u64 {
        for p in (2..d).filter(|&p| is_prime(p)) {
            if decompose(d, p).is_err() {
                continue;
            }
            wit_total += 1;
            let matches = match (witness_escape_radius(d, p), lower_bound(d, p)) {
                (Ok(r), Ok(lb)) => r == lb,
                _ => false,
            };
            if matches {
                wit_good += 1;
            }
        }
    }
    checks.push(SuiteCheck::new(
        "witness escape radius realizes the lower bound (d <= 24)",
        wit_good == wit_total && wit_total > 0,
        format!("{wit_good}/{wit_total} pairs"),
    ));

    Ok(checks)
}

// ---------------------------------------------------------------------
// witness: symbolic identities for every admissible (d, p), d <= 40
// ---------------------------------------------------------------------

fn suite_witness() -> Result<Vec<SuiteCheck>> {
    let pairs: Vec<(u64, u64)> = (3..=40u64)
        .flat_map(|d| {
            (2..d)
                .filter(|&p| is_prime(p) && decompose(d, p).is_ok())
                .map(move |p| (d, p))
                .collect::<Vec<_>>()
        })
        .collect();

    let checks: Vec<SuiteCheck> = pairs
        .par_iter()
        .map(|&(d, p)| {
            let name = format!("witness identities hold for d={d}, p={p}");
            match (verify_pcf_witness(d, p), pcf_witness(d, p)) {
                (Ok(w), Ok(data)) => SuiteCheck::new(
                    name,
                    w.all(),
                    format!("{}, v(alpha) = {}", data.shape, format_rational(data.v_alpha)),
                ),
                (Err(e), _) | (_, Err(e)) => SuiteCheck::new(name, false, e.to_string()),
            }
        })
        .collect();
    Ok(checks)
}

// ---------------------------------------------------------------------
// bdry: orbit schedules along the two parameter ladders at p = 2
// ---------------------------------------------------------------------

fn suite_bdry() -> Result<Vec<SuiteCheck>> {
    let family = PolynomialFamily::cubic2();
    let opts = ClassifyOptions::default();
    let two = BigInt::from(2);
    let mut checks = Vec::new();

    for k in 2..=6u32 {
        let t_value = BigRational::from_integer(BigInt::one() + two.pow(2 * k));
        let t = PadicScalar::exact(2, t_value);
        let answer = classify_parameter(&family, &t, &opts)?;
        let escaped_at = answer.per_point.iter().find_map(|(_, o)| match o.verdict {
            Verdict::Escaped { iterate, .. } => Some(iterate),
            _ => None,
        });
        checks.push(SuiteCheck::new(
            format!("t = 1 + 2^{} escapes at iterate {}", 2 * k, k + 2),
            answer.verdict == PcbVerdict::NotPcb && escaped_at == Some(u64::from(k) + 2),
            match escaped_at {
                Some(n) => format!("escape certified at iterate {n}"),
                None => "no escape certificate".to_string(),
            },
        ));

        // v(f^i(t) + 1/2) = 2k - 2i + 2 for 2 <= i <= k
        let (f, crits) = family.instantiate(&t)?;
        let half = PadicScalar::from_ratio(2, 1, 2);
        let mut z = crits
            .iter()
            .find(|c| c.is_provably_nonzero())
            .expect("the nonzero critical point")
            .clone();
        let mut schedule_ok = true;
        let mut seen = Vec::new();
        for i in 1..=i64::from(k) {
            z = f.eval(&z)?;
            if i >= 2 {
                let v = z.add(&half)?.val();
                let want = 2 * i64::from(k) - 2 * i + 2;
                seen.push(format!("{v}@{i}"));
                if v != Valuation::Finite(want) {
                    schedule_ok = false;
                }
            }
        }
        checks.push(SuiteCheck::new(
            format!("descent schedule v(f^i(t) + 1/2) = {}-2i+2 holds for k = {k}", 2 * k),
            schedule_ok,
            seen.join(", "),
        ));
    }

    for m in 2..=6u32 {
        let t_value = BigRational::from_integer(BigInt::one() + BigInt::from(3) * two.pow(2 * m + 1));
        let t = PadicScalar::exact(2, t_value);
        let answer = classify_parameter(&family, &t, &opts)?;
        let entry = answer.per_point.iter().find_map(|(c, o)| {
            if !c.is_provably_nonzero() {
                return None;
            }
            match &o.verdict {
                Verdict::Bounded(BoundedCertificate::InvariantDisk { sigma, entered_at })
                    if *sigma == Rational::from_integer(-1) =>
                {
                    Some(*entered_at)
                }
                _ => None,
            }
        });
        checks.push(SuiteCheck::new(
            format!("t = 1 + 3*2^{} enters the invariant disk at iterate {}", 2 * m + 1, m + 2),
            answer.verdict == PcbVerdict::Pcb && entry == Some(u64::from(m) + 2),
            match entry {
                Some(n) => format!("entered D(0, 2^-1) at iterate {n}"),
                None => "no invariant-disk certificate on the moving orbit".to_string(),
            },
        ));
    }

    Ok(checks)
}
