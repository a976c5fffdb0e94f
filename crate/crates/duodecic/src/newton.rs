//! First-order Newton polygons over Z with respect to a prime p.
//!
//! A polygon is built from the points (i, v_p(a_i)) of a polynomial
//! Sum a_i x^i. Invariants:
//! - `vertices` is the lower convex hull, abscissas strictly increasing,
//!   consecutive slopes strictly increasing, no collinear interior vertex.
//! - Only edges of negative slope are exposed; the vertex list still
//!   records the zero and positive slope part of the hull.
//! - For a negative edge, `h` and `e` are coprime positive integers with
//!   slope -h/e, and the lattice abscissas step by e from start to end.

use std::fmt;

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::{self, FpPoly, IntPoly};

// ---- Errors ----

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NewtonError {
    ZeroPolynomial,
    NotMonic,
    /// The constant term vanishes, so (0, v_p(a_0)) does not exist.
    ZeroConstantTerm,
    /// ore_index requires g congruent to x^n mod p.
    NotXnModP,
    /// ore_index requires a single negative edge.
    MultipleNegativeEdges,
    /// Residual polynomial is not separable; first order does not decide.
    NotRegular,
}

impl fmt::Display for NewtonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NewtonError::ZeroPolynomial => write!(f, "zero polynomial has no polygon"),
            NewtonError::NotMonic => write!(f, "polynomial must be monic"),
            NewtonError::ZeroConstantTerm => write!(f, "constant term must be nonzero"),
            NewtonError::NotXnModP => write!(f, "polynomial must reduce to x^n mod p"),
            NewtonError::MultipleNegativeEdges => {
                write!(f, "polygon has more than one negative edge")
            }
            NewtonError::NotRegular => write!(f, "residual polynomial is not separable"),
        }
    }
}

impl std::error::Error for NewtonError {}

// ---- Points, edges, polygons ----

/// Point of a polygon; the ordinate is rational so that hull ordinates
/// evaluated between lattice points share the same type.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolygonPoint {
    pub x: i64,
    pub y: Rational64,
}

impl PolygonPoint {
    pub fn new(x: i64, y: Rational64) -> Self {
        PolygonPoint { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        PolygonPoint { x, y: Rational64::from_integer(y) }
    }
}

/// Negative-slope hull edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub start: PolygonPoint,
    pub end: PolygonPoint,
    /// Slope is -h/e with gcd(h, e) = 1, h >= 1, e >= 1.
    pub h: u64,
    pub e: u64,
}

impl Edge {
    fn new(start: PolygonPoint, end: PolygonPoint) -> Self {
        let rise = start.y - end.y;
        let run = Rational64::from_integer(end.x - start.x);
        let slope = rise / run;
        debug_assert!(slope.is_positive());
        Edge {
            start,
            end,
            h: *slope.numer() as u64,
            e: *slope.denom() as u64,
        }
    }

    pub fn slope(&self) -> Rational64 {
        -Rational64::new(self.h as i64, self.e as i64)
    }

    /// Number of lattice segments; the residual polynomial has this degree.
    pub fn lattice_length(&self) -> u64 {
        ((self.end.x - self.start.x) as u64) / self.e
    }

    /// Abscissas start, start+e, ..., end.
    pub fn lattice_abscissas(&self) -> Vec<i64> {
        (0..=self.lattice_length() as i64)
            .map(|j| self.start.x + j * self.e as i64)
            .collect()
    }

    /// Ordinate of the edge line at abscissa x.
    pub fn ordinate_at(&self, x: i64) -> Rational64 {
        self.start.y + self.slope() * Rational64::from_integer(x - self.start.x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolygon {
    points: Vec<PolygonPoint>,
    vertices: Vec<PolygonPoint>,
    neg_edges: Vec<Edge>,
}

impl NewtonPolygon {
    /// Lower convex hull of finitely many points with distinct abscissas.
    pub fn from_points(mut points: Vec<PolygonPoint>) -> Self {
        assert!(!points.is_empty(), "polygon needs at least one point");
        points.sort_by_key(|q| q.x);
        for w in points.windows(2) {
            assert!(w[0].x < w[1].x, "duplicate abscissa {}", w[1].x);
        }
        let mut hull: Vec<PolygonPoint> = Vec::new();
        for &q in &points {
            while hull.len() >= 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                // Keep b only if a-b-q makes a strict convex corner from below.
                let cross = Rational64::from_integer(b.x - a.x) * (q.y - a.y)
                    - Rational64::from_integer(q.x - a.x) * (b.y - a.y);
                if cross <= Rational64::zero() {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(q);
        }
        let mut neg_edges = Vec::new();
        for w in hull.windows(2) {
            if w[1].y < w[0].y {
                neg_edges.push(Edge::new(w[0], w[1]));
            }
        }
        NewtonPolygon { points, vertices: hull, neg_edges }
    }

    pub fn points(&self) -> &[PolygonPoint] {
        &self.points
    }

    pub fn vertices(&self) -> &[PolygonPoint] {
        &self.vertices
    }

    pub fn negative_edges(&self) -> &[Edge] {
        &self.neg_edges
    }

    /// Abscissa where the strictly decreasing part stops.
    pub fn negative_part_end(&self) -> i64 {
        match self.neg_edges.last() {
            Some(edge) => edge.end.x,
            None => self.vertices[0].x,
        }
    }

    /// Ordinate of the hull at abscissa x; x must lie within the hull span.
    pub fn hull_ordinate(&self, x: i64) -> Rational64 {
        let first = self.vertices.first().unwrap();
        let last = self.vertices.last().unwrap();
        assert!(first.x <= x && x <= last.x, "abscissa {} outside hull", x);
        for w in self.vertices.windows(2) {
            if x <= w[1].x {
                let run = Rational64::from_integer(w[1].x - w[0].x);
                let t = Rational64::from_integer(x - w[0].x);
                return w[0].y + (w[1].y - w[0].y) * t / run;
            }
        }
        last.y
    }
}

// ---- Construction from polynomials ----

/// Minimum of v_p over the nonzero coefficients.
pub fn gauss_valuation(g: &IntPoly, p: u64) -> Result<u64, NewtonError> {
    let mut best: Option<u64> = None;
    for c in g.coeffs() {
        if c.is_zero() {
            continue;
        }
        let v = arith::vp(c, p).expect("nonzero coefficient");
        best = Some(best.map_or(v, |b| b.min(v)));
    }
    best.ok_or(NewtonError::ZeroPolynomial)
}

/// Polygon of the points (i, v_p(a_i)); requires monic g with g(0) != 0.
pub fn newton_polygon(g: &IntPoly, p: u64) -> Result<NewtonPolygon, NewtonError> {
    if g.is_zero() {
        return Err(NewtonError::ZeroPolynomial);
    }
    if !g.is_monic() {
        return Err(NewtonError::NotMonic);
    }
    if g.coeff(0).is_zero() {
        return Err(NewtonError::ZeroConstantTerm);
    }
    let mut points = Vec::new();
    for (i, c) in g.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let v = arith::vp(c, p).expect("nonzero coefficient") as i64;
        points.push(PolygonPoint::from_ints(i as i64, v));
    }
    Ok(NewtonPolygon::from_points(points))
}

/// Residual polynomial of g along one negative edge, monic over F_p.
///
/// The coefficient of Y^j comes from the abscissa start + j*e: it is the
/// residue of a_i / p^(edge ordinate) when the point sits on the edge and
/// zero when it lies above. Both endpoints are vertices, so the constant
/// term is nonzero and the top residue is a unit used to normalize.
pub fn residual_polynomial(g: &IntPoly, p: u64, edge: &Edge) -> FpPoly {
    let d = edge.lattice_length();
    let mut coeffs = vec![0u64; d as usize + 1];
    for (j, x) in edge.lattice_abscissas().into_iter().enumerate() {
        let a = g.coeff(x as usize);
        if a.is_zero() {
            continue;
        }
        let v = arith::vp(&a, p).expect("nonzero coefficient");
        let y = edge.ordinate_at(x);
        debug_assert!(y.is_integer(), "edge ordinate at lattice abscissa");
        let y = y.to_integer();
        debug_assert!(v as i64 >= y, "point below its own edge");
        if (v as i64) == y {
            let unit = arith::unit_part(&a, p).expect("nonzero coefficient");
            let pb = BigInt::from(p);
            let r = ((unit % &pb) + &pb) % &pb;
            coeffs[j] = r.to_u64().expect("residue fits u64");
        }
    }
    let raw = FpPoly::new(p, coeffs);
    debug_assert_eq!(raw.degree(), Some(d as usize));
    debug_assert_ne!(raw.coeff(0), 0);
    raw.monic()
}

/// True iff the residual of every negative edge is separable.
pub fn is_p_regular(g: &IntPoly, p: u64) -> Result<bool, NewtonError> {
    let polygon = newton_polygon(g, p)?;
    Ok(polygon
        .negative_edges()
        .iter()
        .all(|edge| residual_polynomial(g, p, edge).is_squarefree()))
}

/// Lattice points with x >= 1 and y >= 1 lying on or below the negative
/// part of the polygon.
pub fn polygon_lattice_count(polygon: &NewtonPolygon) -> u64 {
    let end = polygon.negative_part_end();
    let mut count = 0u64;
    for x in 1..=end {
        let y = polygon.hull_ordinate(x).floor().to_integer();
        if y >= 1 {
            count += y as u64;
        }
    }
    count
}

/// Lattice points with x >= 1 and y >= 1 on or below the segment from
/// (0, b) to (t, 0).
pub fn triangle_lattice_count(t: u64, b: u64) -> u64 {
    assert!(t >= 1 && b >= 1);
    let g = gcd(t, b);
    ((t - 1) * (b - 1) + g - 1) / 2
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Index valuation of a p-regular polynomial congruent to x^n mod p with a
/// one-edge polygon. `NotRegular` signals that a second-order analysis is
/// needed; other errors signal a violated precondition.
pub fn ore_index(g: &IntPoly, p: u64) -> Result<u64, NewtonError> {
    let n = g.degree().ok_or(NewtonError::ZeroPolynomial)?;
    if !g.is_monic() {
        return Err(NewtonError::NotMonic);
    }
    for i in 0..n {
        if !(g.coeff(i) % BigInt::from(p)).is_zero() {
            return Err(NewtonError::NotXnModP);
        }
    }
    let polygon = newton_polygon(g, p)?;
    if polygon.negative_edges().len() != 1 {
        return Err(NewtonError::MultipleNegativeEdges);
    }
    let edge = &polygon.negative_edges()[0];
    if !residual_polynomial(g, p, edge).is_squarefree() {
        return Err(NewtonError::NotRegular);
    }
    Ok(polygon_lattice_count(&polygon))
}

// ---- Tests ----
