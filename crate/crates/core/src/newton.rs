//! Newton polygons: lower convex hulls of coefficient valuations, and the
//! root-counting queries they answer.
//!
//! For `g(z) = sum b_i z^i` the polygon is the lower convex hull of the
//! points `(i, val(b_i))`, taken over nonzero coefficients only. A segment
//! of slope `m` and horizontal length `x` certifies exactly `x` roots
//! (with multiplicity, in an algebraic closure) of valuation `-m`; roots
//! at the origin are counted separately by the smallest index carrying a
//! nonzero coefficient.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::{PadicScalar, Rational, Valuation};

/// One face of the lower hull.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub slope: Rational,
    pub hlength: u64,
}

/// The Newton polygon of a nonzero polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolygon {
    prime: u64,
    vertices: Vec<(u64, i64)>,
    segments: Vec<Segment>,
    zero_root_count: u64,
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i128 {
    let (ox, oy) = (o.0 as i128, o.1 as i128);
    let (ax, ay) = (a.0 as i128, a.1 as i128);
    let (bx, by) = (b.0 as i128, b.1 as i128);
    (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)
}

impl NewtonPolygon {
    /// Build the polygon from coefficients listed low-to-high, starting
    /// at the constant term. Exact zeros are omitted; coefficients whose
    /// valuation is only known as a bound cannot be placed and are
    /// rejected.
    pub fn from_coeffs(prime: u64, coeffs: &[PadicScalar]) -> Result<Self> {
        let mut points: Vec<(u64, i64)> = Vec::new();
        for (i, c) in coeffs.iter().enumerate() {
            match c.val() {
                Valuation::Infinite => continue,
                Valuation::Finite(v) => points.push((i as u64, v)),
                Valuation::AtLeast(_) => return Err(Error::AmbiguousValuation),
            }
        }
        if points.is_empty() {
            return Err(Error::Domain(
                "the zero polynomial has no Newton polygon".into(),
            ));
        }
        let zero_root_count = points[0].0;

        // Andrew's monotone chain, lower hull only; collinear interior
        // points are dropped so adjacent faces of equal slope merge.
        let mut hull: Vec<(u64, i64)> = Vec::new();
        for &(x, y) in &points {
            let pt = (x as i64, y);
            while hull.len() >= 2 {
                let o = hull[hull.len() - 2];
                let a = hull[hull.len() - 1];
                if cross((o.0 as i64, o.1), (a.0 as i64, a.1), pt) <= 0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push((x, y));
        }

        let segments = hull
            .windows(2)
            .map(|w| {
                let (x1, y1) = w[0];
                let (x2, y2) = w[1];
                Segment {
                    slope: Rational::new(y2 - y1, (x2 - x1) as i64),
                    hlength: x2 - x1,
                }
            })
            .collect();

        Ok(NewtonPolygon { prime, vertices: hull, segments, zero_root_count })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    /// Hull vertices `(index, valuation)` from left to right.
    pub fn vertices(&self) -> &[(u64, i64)] {
        &self.vertices
    }

    /// Hull faces from left to right; slopes are strictly increasing.
    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Number of roots at the origin (the smallest index with a nonzero
    /// coefficient).
    pub fn zero_root_count(&self) -> u64 {
        self.zero_root_count
    }

    /// Valuations of all roots, with multiplicity, sorted decreasing;
    /// `None` stands for the infinite valuation of roots at the origin.
    pub fn root_valuations(&self) -> Vec<Option<Rational>> {
        let mut out: Vec<Option<Rational>> =
            (0..self.zero_root_count).map(|_| None).collect();
        for seg in &self.segments {
            // slope m <=> roots of valuation -m; faces come with
            // increasing slope, hence decreasing root valuation
            for _ in 0..seg.hlength {
                out.push(Some(-seg.slope));
            }
        }
        out
    }

    /// Number of roots `z` with `|z| <= p^s`, i.e. of valuation `>= -s`.
    pub fn count_roots_in_disk(&self, s: Rational) -> u64 {
        let mut count = self.zero_root_count;
        for seg in &self.segments {
            if seg.slope <= s {
                count += seg.hlength;
            }
        }
        count
    }

    /// Total number of roots seen by the polygon (the degree minus the
    /// index of the lowest nonzero coefficient, plus the origin roots).
    pub fn root_count(&self) -> u64 {
        self.zero_root_count + self.segments.iter().map(|s| s.hlength).sum::<u64>()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "vertices": self.vertices.iter().map(|&(i, v)| json!([i, v])).collect::<Vec<_>>(),
            "segments": self.segments.iter().map(|s| {
                json!({
                    "slope": format_rational(s.slope),
                    "hlength": s.hlength,
                })
            }).collect::<Vec<_>>(),
            "zero_roots": self.zero_root_count,
        })
    }
}

/// Polygons of a normal-form polynomial and of its derivative, plus
/// whether they agree as shapes.
#[derive(Debug, Clone)]
pub struct ShiftCompare {
    pub polygon: NewtonPolygon,
    pub derivative_polygon: NewtonPolygon,
    /// True when the derivative's polygon is the polynomial's polygon
    /// translated one index to the left: identical segment lists and one
    /// fewer root at the origin. Guaranteed when `p > deg f`, where no
    /// index can change a coefficient's valuation.
    pub translated_equal: bool,
}

pub fn shift_compare(f: &crate::poly::MonicPolynomial) -> crate::error::Result<ShiftCompare> {
    let polygon = f.newton_polygon()?;
    let derivative_polygon = NewtonPolygon::from_coeffs(f.prime(), &f.derivative_coeffs())?;
    let translated_equal = polygon.segments() == derivative_polygon.segments()
        && derivative_polygon.zero_root_count() + 1 == polygon.zero_root_count();
    Ok(ShiftCompare { polygon, derivative_polygon, translated_equal })
}

pub(crate) fn format_rational(r: Rational) -> String {
    if r.denom() == &1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(num: i64, den: i64) -> PadicScalar {
        PadicScalar::from_ratio(2, num, den)
    }

    #[test]
    fn cubic_with_double_root_at_origin() {
        // z^3 - (3/2) z^2: points (2,-1), (3,0)
        let coeffs = [s(0, 1), s(0, 1), s(-3, 2), s(1, 1)];
        let poly = NewtonPolygon::from_coeffs(2, &coeffs).unwrap();
        assert_eq!(poly.zero_root_count(), 2);
        assert_eq!(poly.vertices(), &[(2, -1), (3, 0)]);
        assert_eq!(
            poly.segments(),
            &[Segment { slope: Rational::from_integer(1), hlength: 1 }]
        );
        assert_eq!(
            poly.root_valuations(),
            vec![None, None, Some(Rational::from_integer(-1))]
        );
        assert_eq!(poly.count_roots_in_disk(Rational::from_integer(-1)), 2);
        assert_eq!(poly.count_roots_in_disk(Rational::from_integer(1)), 3);
    }

    #[test]
    fn fractional_slope_from_ramified_roots() {
        // z^2 + 2z + 2: single face of slope -1/2, both roots of val 1/2
        let poly = NewtonPolygon::from_coeffs(2, &[s(2, 1), s(2, 1), s(1, 1)]).unwrap();
        assert_eq!(poly.vertices(), &[(0, 1), (2, 0)]);
        assert_eq!(
            poly.segments(),
            &[Segment { slope: Rational::new(-1, 2), hlength: 2 }]
        );
        assert_eq!(poly.zero_root_count(), 0);
        assert_eq!(
            poly.root_valuations(),
            vec![Some(Rational::new(1, 2)), Some(Rational::new(1, 2))]
        );
    }

    #[test]
    fn two_faces_split_the_roots() {
        // z^2 + z + 2: roots of valuation 1 and 0
        let poly = NewtonPolygon::from_coeffs(2, &[s(2, 1), s(1, 1), s(1, 1)]).unwrap();
        assert_eq!(
            poly.segments(),
            &[
                Segment { slope: Rational::from_integer(-1), hlength: 1 },
                Segment { slope: Rational::from_integer(0), hlength: 1 },
            ]
        );
        assert_eq!(poly.count_roots_in_disk(Rational::from_integer(-1)), 1);
        assert_eq!(poly.count_roots_in_disk(Rational::from_integer(0)), 2);
        assert_eq!(poly.count_roots_in_disk(Rational::new(-3, 2)), 0);
    }

    #[test]
    fn pure_power_has_no_segments() {
        let poly =
            NewtonPolygon::from_coeffs(2, &[s(0, 1), s(0, 1), s(0, 1), s(1, 1)]).unwrap();
        assert_eq!(poly.zero_root_count(), 3);
        assert!(poly.segments().is_empty());
        assert_eq!(poly.count_roots_in_disk(Rational::from_integer(-100)), 3);
        assert_eq!(poly.root_count(), 3);
    }

    #[test]
    fn collinear_points_merge_into_one_face()
    {
        // 4 + 2z + z^2 ... points (0,2),(1,1),(2,0) are collinear
        let poly = NewtonPolygon::from_coeffs(2, &[s(4, 1), s(2, 1), s(1, 1)]).unwrap();
        assert_eq!(poly.vertices(), &[(0, 2), (2, 0)]);
        assert_eq!(
            poly.segments(),
            &[Segment { slope: Rational::from_integer(-1), hlength: 2 }]
        );
    }

    #[test]
    fn rejects_unusable_inputs() {
        assert!(matches!(
            NewtonPolygon::from_coeffs(2, &[PadicScalar::zero(2)]),
            Err(Error::Domain(_))
        ));
        let fuzzy = PadicScalar::zero_to_precision(2, 3);
        assert_eq!(
            NewtonPolygon::from_coeffs(2, &[fuzzy, s(1, 1)]),
            Err(Error::AmbiguousValuation)
        );
    }

    #[test]
    fn shift_compare_examples() {
        use crate::poly::MonicPolynomial;
        // p = 5 > 3 = deg: shapes must agree
        let f = MonicPolynomial::new(
            5,
            vec![PadicScalar::one(5), PadicScalar::one(5)],
        );
        let report = shift_compare(&f).unwrap();
        assert!(report.translated_equal);
        // p = 2 <= 3: v(3 a_3) et al. can shift; no guarantee here
        let g = MonicPolynomial::new(2, vec![s(0, 1), s(-3, 2)]);
        let report = shift_compare(&g).unwrap();
        assert!(!report.translated_equal);
    }

    #[test]
    fn json_shape() {
        let poly = NewtonPolygon::from_coeffs(2, &[s(2, 1), s(2, 1), s(1, 1)]).unwrap();
        let v = poly.to_json();
        assert_eq!(v["zero_roots"], 0);
        assert_eq!(v["segments"][0]["slope"], "-1/2");
        assert_eq!(v["segments"][0]["hlength"], 2);
        assert_eq!(v["vertices"][0][0], 0);
        assert_eq!(v["vertices"][0][1], 1);
    }
}
