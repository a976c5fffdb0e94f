//! Second-order Newton polygon engine for the non-regular primes.
//!
//! When the first-order residual of x^12 - m has a repeated factor psi,
//! first-order data no longer decides the index. Each repeated factor is
//! refined through a key polynomial Phi whose own polygon is one-sided
//! with the slope of the original edge and whose residual is psi. The
//! second-order valuation V, the Phi-adic expansion of the input, and the
//! polygon of (i, V(a_i) + i V(Phi)) then supply the missing index count
//! and the numerators of a p-integral basis.
//!
//! Invariants:
//! - V(sum b_i x^i) = min_i (e v_p(b_i) + i h), so V(x) = h, V(p) = e,
//!   and V is additive on products.
//! - For a valid key, V(Phi) = h deg Phi and deg Phi = e deg psi.
//! - Second-order residuals live over F_q = F_p[Y]/(psi).

use std::fmt;

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};

use crate::arith::{self, ArithError, FpPoly, IntPoly};
use crate::newton::{self, Edge, NewtonError, NewtonPolygon, PolygonPoint};

// ---- Errors ----

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Montes2Error {
    ZeroPolynomial,
    /// Key polynomial fails one of its defining conditions.
    InvalidKey,
    /// Supplied types do not match the repeated factors of the residual.
    TypeMismatch,
    /// A second-order residual is inseparable; the engine cannot conclude.
    NotVRegular,
    /// The element count of the raw basis does not reach the degree.
    BasisCountMismatch,
    FirstOrder(NewtonError),
    Arith(ArithError),
}

impl fmt::Display for Montes2Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Montes2Error::ZeroPolynomial => write!(f, "zero polynomial"),
            Montes2Error::InvalidKey => write!(f, "invalid key polynomial"),
            Montes2Error::TypeMismatch => {
                write!(f, "types disagree with the repeated residual factors")
            }
            Montes2Error::NotVRegular => write!(f, "second-order residual not separable"),
            Montes2Error::BasisCountMismatch => {
                write!(f, "second-order basis element count mismatch")
            }
            Montes2Error::FirstOrder(e) => write!(f, "first-order polygon: {}", e),
            Montes2Error::Arith(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for Montes2Error {}

impl From<NewtonError> for Montes2Error {
    fn from(e: NewtonError) -> Self {
        Montes2Error::FirstOrder(e)
    }
}

impl From<ArithError> for Montes2Error {
    fn from(e: ArithError) -> Self {
        Montes2Error::Arith(e)
    }
}

// ---- Types ----

/// One refinement type: a repeated residual factor together with its key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Type2Data {
    pub p: u64,
    /// First-order slope of the underlying edge is -h/e, gcd(h, e) = 1.
    pub h: u64,
    pub e: u64,
    /// Monic irreducible factor of the first-order residual.
    pub psi: FpPoly,
    /// Multiplicity of psi in the first-order residual.
    pub mu: u32,
    /// Key polynomial.
    pub phi: IntPoly,
}

/// Phi-adic expansion f = sum a_i Phi^i together with the quotient tails
/// q_j = sum_{i >= j} a_i Phi^(i-j).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiExpansion {
    pub a: Vec<IntPoly>,
    pub q: Vec<IntPoly>,
}

/// Polygon of the points (i, V(a_i) + i V(Phi)); ordinates are integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecondOrderPolygon {
    pub polygon: NewtonPolygon,
    pub last_vertex_ordinate: i64,
}

/// Basis element numer(theta) / p^k before triangularization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawElement {
    pub numer: IntPoly,
    pub k: u64,
}

// ---- Second-order valuation ----

/// V(sum b_i x^i) = min_i (e v_p(b_i) + i h).
pub fn second_order_valuation(t: &Type2Data, g: &IntPoly) -> Result<i64, Montes2Error> {
    let mut best: Option<i64> = None;
    for (i, c) in g.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let v = arith::vp(c, t.p).expect("nonzero coefficient") as i64;
        let val = t.e as i64 * v + i as i64 * t.h as i64;
        best = Some(best.map_or(val, |b| b.min(val)));
    }
    best.ok_or(Montes2Error::ZeroPolynomial)
}

/// V of the key itself; equals h deg Phi for a valid key.
pub fn v_of_phi(t: &Type2Data) -> i64 {
    t.h as i64 * t.phi.degree().expect("key is nonzero") as i64
}

// ---- Key polynomials ----

/// A key polynomial must be monic, congruent to x^deg mod p, of degree
/// e deg psi, with a one-sided polygon of slope -h/e whose residual is psi.
pub fn validate_key_polynomial(t: &Type2Data) -> bool {
    let phi = &t.phi;
    let deg = match phi.degree() {
        Some(d) if d >= 1 => d,
        _ => return false,
    };
    if !phi.is_monic() {
        return false;
    }
    let pb = BigInt::from(t.p);
    if (0..deg).any(|i| !(phi.coeff(i) % &pb).is_zero()) {
        return false;
    }
    let psi_deg = match t.psi.degree() {
        Some(d) if d >= 1 => d,
        _ => return false,
    };
    if deg != t.e as usize * psi_deg {
        return false;
    }
    let polygon = match newton::newton_polygon(phi, t.p) {
        Ok(polygon) => polygon,
        Err(_) => return false,
    };
    let edges = polygon.negative_edges();
    if edges.len() != 1 {
        return false;
    }
    let edge = &edges[0];
    if edge.start.x != 0 || edge.end.x != deg as i64 {
        return false;
    }
    if (edge.h, edge.e) != (t.h, t.e) {
        return false;
    }
    newton::residual_polynomial(phi, t.p, edge) == t.psi
}

// ---- Phi-adic expansion ----

/// Repeated division by the monic key: f = Phi q_1 + a_0, q_j = Phi q_{j+1} + a_j.
pub fn phi_expansion(f: &IntPoly, phi: &IntPoly) -> PhiExpansion {
    assert!(phi.is_monic(), "key must be monic");
    assert!(phi.degree().map_or(false, |d| d >= 1));
    let mut a = Vec::new();
    let mut q = Vec::new();
    let mut rest = f.clone();
    loop {
        if rest.degree().map_or(true, |d| d < phi.degree().unwrap()) {
            a.push(rest);
            break;
        }
        let (quo, rem) = rest.divmod_monic(phi);
        a.push(rem);
        q.push(quo.clone());
        rest = quo;
    }
    PhiExpansion { a, q }
}

// ---- The V-polygon ----

/// Polygon of (i, V(a_i) + i V(Phi)) over the Phi-adic coefficients.
pub fn v_newton_polygon(t: &Type2Data, f: &IntPoly) -> Result<SecondOrderPolygon, Montes2Error> {
    let expansion = phi_expansion(f, &t.phi);
    v_polygon_of_expansion(t, &expansion)
}

fn v_polygon_of_expansion(
    t: &Type2Data,
    expansion: &PhiExpansion,
) -> Result<SecondOrderPolygon, Montes2Error> {
    let vphi = v_of_phi(t);
    let mut points = Vec::new();
    for (i, a) in expansion.a.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let ord = second_order_valuation(t, a)? + i as i64 * vphi;
        points.push(PolygonPoint::from_ints(i as i64, ord));
    }
    if points.is_empty() {
        return Err(Montes2Error::ZeroPolynomial);
    }
    let polygon = NewtonPolygon::from_points(points);
    let last = polygon.vertices().last().unwrap();
    debug_assert!(last.y.is_integer());
    Ok(SecondOrderPolygon { last_vertex_ordinate: last.y.to_integer(), polygon })
}

// ---- Residue field polynomials ----

/// Polynomial over F_q = F_p[Y]/(psi); coefficients are reduced mod psi.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FqPoly {
    psi: FpPoly,
    coeffs: Vec<FpPoly>,
}

impl FqPoly {
    pub fn new(psi: FpPoly, coeffs: Vec<FpPoly>) -> Self {
        let mut coeffs: Vec<FpPoly> = coeffs
            .into_iter()
            .map(|c| c.divmod(&psi).1)
            .collect();
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        FqPoly { psi, coeffs }
    }

    pub fn zero(psi: FpPoly) -> Self {
        FqPoly { psi, coeffs: Vec::new() }
    }

    /// Build from F_p constants, for expected values in tests.
    pub fn from_prime_field(psi: FpPoly, constants: &[i64]) -> Self {
        let p = psi.modulus();
        let coeffs = constants
            .iter()
            .map(|&c| FpPoly::from_i64(p, &[c]))
            .collect();
        FqPoly::new(psi, coeffs)
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize) -> FpPoly {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| FpPoly::zero(self.psi.modulus()))
    }

    fn elem_mul(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        a.mul(b).divmod(&self.psi).1
    }

    fn elem_inv(&self, a: &FpPoly) -> FpPoly {
        let (g, s, _) = a.ext_gcd(&self.psi);
        assert_eq!(g.degree(), Some(0), "psi must be irreducible, a nonzero");
        s.divmod(&self.psi).1
    }

    pub fn sub(&self, other: &FqPoly) -> FqPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i).sub(&other.coeff(i))).collect();
        FqPoly::new(self.psi.clone(), coeffs)
    }

    pub fn mul(&self, other: &FqPoly) -> FqPoly {
        if self.is_zero() || other.is_zero() {
            return FqPoly::zero(self.psi.clone());
        }
        let p = self.psi.modulus();
        let mut out = vec![FpPoly::zero(p); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&self.elem_mul(a, b));
            }
        }
        FqPoly::new(self.psi.clone(), out)
    }

    pub fn scale(&self, c: &FpPoly) -> FqPoly {
        let coeffs = self.coeffs.iter().map(|a| self.elem_mul(a, c)).collect();
        FqPoly::new(self.psi.clone(), coeffs)
    }

    /// Division with remainder by a nonzero divisor over the field F_q.
    pub fn divmod(&self, d: &FqPoly) -> (FqPoly, FqPoly) {
        let dd = d.degree().expect("division by zero");
        let lead_inv = self.elem_inv(&d.coeffs[dd]);
        let mut rem = self.coeffs.clone();
        if rem.len() < dd + 1 {
            return (FqPoly::zero(self.psi.clone()), self.clone());
        }
        let p = self.psi.modulus();
        let mut quo = vec![FpPoly::zero(p); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = self.elem_mul(&rem[i], &lead_inv);
            rem[i] = FpPoly::zero(p);
            if c.is_zero() {
                continue;
            }
            for (j, b) in d.coeffs.iter().take(dd).enumerate() {
                let t = self.elem_mul(&c, b);
                rem[i - dd + j] = rem[i - dd + j].sub(&t);
            }
            quo[i - dd] = c;
        }
        (
            FqPoly::new(self.psi.clone(), quo),
            FqPoly::new(self.psi.clone(), rem),
        )
    }

    pub fn gcd(&self, other: &FqPoly) -> FqPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divmod(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn monic(&self) -> FqPoly {
        match self.degree() {
            None => self.clone(),
            Some(d) => {
                let inv = self.elem_inv(&self.coeffs[d]);
                self.scale(&inv)
            }
        }
    }

    pub fn derivative(&self) -> FqPoly {
        if self.coeffs.len() <= 1 {
            return FqPoly::zero(self.psi.clone());
        }
        let p = self.psi.modulus();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.scale((i as u64) % p))
            .collect();
        FqPoly::new(self.psi.clone(), coeffs)
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == Some(0)
    }
}

/// Residual of one negative edge of the V-polygon, monic over F_q.
///
/// For an on-edge abscissa i the coefficient collects every term b_k x^k
/// of a_i attaining V(a_i): the residue of b_k / p^(v_p(b_k)) times
/// Y^((k - k0)/e), k0 the smallest attaining exponent. Points above the
/// edge contribute zero.
pub fn second_order_residual(
    t: &Type2Data,
    expansion: &PhiExpansion,
    edge: &Edge,
) -> Result<FqPoly, Montes2Error> {
    let mut coeffs = Vec::new();
    for x in edge.lattice_abscissas() {
        let a = expansion
            .a
            .get(x as usize)
            .cloned()
            .unwrap_or_else(IntPoly::zero);
        if a.is_zero() {
            coeffs.push(FpPoly::zero(t.p));
            continue;
        }
        let ord = second_order_valuation(t, &a)? + x * v_of_phi(t);
        let on_edge = edge.ordinate_at(x);
        debug_assert!(on_edge.is_integer());
        if ord != on_edge.to_integer() {
            coeffs.push(FpPoly::zero(t.p));
            continue;
        }
        let va = second_order_valuation(t, &a)?;
        let mut attaining = Vec::new();
        for (k, c) in a.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = arith::vp(c, t.p).expect("nonzero coefficient") as i64;
            if t.e as i64 * v + k as i64 * t.h as i64 == va {
                attaining.push(k);
            }
        }
        let k0 = *attaining.first().expect("valuation is attained");
        let mut res = FpPoly::zero(t.p);
        for k in attaining {
            debug_assert_eq!((k - k0) % t.e as usize, 0);
            let unit = arith::unit_part(&a.coeff(k), t.p).expect("nonzero coefficient");
            let pb = BigInt::from(t.p);
            let r = (((unit % &pb) + &pb) % &pb).to_u64().expect("residue fits");
            let mut mono = vec![0u64; (k - k0) / t.e as usize + 1];
            *mono.last_mut().unwrap() = r;
            res = res.add(&FpPoly::new(t.p, mono));
        }
        coeffs.push(res);
    }
    let raw = FqPoly::new(t.psi.clone(), coeffs);
    debug_assert_eq!(raw.degree(), Some(edge.lattice_length() as usize));
    debug_assert!(!raw.coeff(0).is_zero());
    Ok(raw.monic())
}

/// True iff every negative edge of the V-polygon has a separable residual.
pub fn is_v_regular(t: &Type2Data, f: &IntPoly) -> Result<bool, Montes2Error> {
    let expansion = phi_expansion(f, &t.phi);
    let sop = v_polygon_of_expansion(t, &expansion)?;
    for edge in sop.polygon.negative_edges() {
        if !second_order_residual(t, &expansion, edge)?.is_squarefree() {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---- Index and basis ----

/// Lattice points with x >= 1 on or below the hull and strictly above the
/// horizontal line through the last vertex.
pub fn second_order_count(sop: &SecondOrderPolygon) -> u64 {
    let end = sop.polygon.negative_part_end();
    let mut count = 0u64;
    for x in 1..=end {
        let y = sop.polygon.hull_ordinate(x).floor().to_integer();
        if y > sop.last_vertex_ordinate {
            count += (y - sop.last_vertex_ordinate) as u64;
        }
    }
    count
}

/// Repeated factors of the first-order residual along the single edge.
fn repeated_factors(
    g: &IntPoly,
    p: u64,
    edge: &Edge,
) -> Result<Vec<(FpPoly, u32)>, Montes2Error> {
    let residual = newton::residual_polynomial(g, p, edge);
    if residual.is_squarefree() {
        return Ok(Vec::new());
    }
    let factors = arith::fp_factor(&residual)?;
    Ok(factors.into_iter().filter(|(_, mult)| *mult >= 2).collect())
}

fn checked_polygon(g: &IntPoly, p: u64) -> Result<NewtonPolygon, Montes2Error> {
    let n = g.degree().ok_or(Montes2Error::ZeroPolynomial)?;
    if !g.is_monic() {
        return Err(Montes2Error::FirstOrder(NewtonError::NotMonic));
    }
    let pb = BigInt::from(p);
    if (0..n).any(|i| !(g.coeff(i) % &pb).is_zero()) {
        return Err(Montes2Error::FirstOrder(NewtonError::NotXnModP));
    }
    let polygon = newton::newton_polygon(g, p)?;
    if polygon.negative_edges().len() != 1 {
        return Err(Montes2Error::FirstOrder(NewtonError::MultipleNegativeEdges));
    }
    Ok(polygon)
}

/// Validate that the supplied types are exactly the repeated factors of
/// the first-order residual, with matching slope and valid keys.
fn check_types(
    g: &IntPoly,
    p: u64,
    edge: &Edge,
    types: &[Type2Data],
) -> Result<(), Montes2Error> {
    let repeated = repeated_factors(g, p, edge)?;
    if repeated.len() != types.len() {
        return Err(Montes2Error::TypeMismatch);
    }
    for (psi, mult) in &repeated {
        let t = types
            .iter()
            .find(|t| &t.psi == psi)
            .ok_or(Montes2Error::TypeMismatch)?;
        if t.mu != *mult || t.p != p || (t.h, t.e) != (edge.h, edge.e) {
            return Err(Montes2Error::TypeMismatch);
        }
        if !validate_key_polynomial(t) {
            return Err(Montes2Error::InvalidKey);
        }
    }
    Ok(())
}

/// v_p of the index of g through first plus second order:
/// N1 + sum over types of deg(psi) * N2.
pub fn montes_index(g: &IntPoly, p: u64, types: &[Type2Data]) -> Result<u64, Montes2Error> {
    let polygon = checked_polygon(g, p)?;
    let edge = &polygon.negative_edges()[0];
    check_types(g, p, edge, types)?;
    let mut index = newton::polygon_lattice_count(&polygon);
    for t in types {
        let expansion = phi_expansion(g, &t.phi);
        let sop = v_polygon_of_expansion(t, &expansion)?;
        for vedge in sop.polygon.negative_edges() {
            if !second_order_residual(t, &expansion, vedge)?.is_squarefree() {
                return Err(Montes2Error::NotVRegular);
            }
        }
        index += t.psi.degree().unwrap() as u64 * second_order_count(&sop);
    }
    Ok(index)
}

/// Raw p-integral generating set from the quotient tails of each type:
/// theta^(n-u) q_j(theta) / p^floor(y_u + (Y_j - j V(Phi)) / e) over
/// u in (n - deg Phi, n] and j in 1..=end of the negative V-part.
/// Together with the power basis these span the p-maximal order.
pub fn montes_p_basis(
    g: &IntPoly,
    p: u64,
    types: &[Type2Data],
) -> Result<Vec<RawElement>, Montes2Error> {
    let polygon = checked_polygon(g, p)?;
    let edge = &polygon.negative_edges()[0];
    check_types(g, p, edge, types)?;
    let n = g.degree().unwrap();
    let mut out = Vec::new();
    for t in types {
        let expansion = phi_expansion(g, &t.phi);
        let sop = v_polygon_of_expansion(t, &expansion)?;
        let vphi = v_of_phi(t);
        let deg_phi = t.phi.degree().unwrap();
        let j_end = sop.polygon.negative_part_end();
        for j in 1..=j_end {
            let q = &expansion.q[(j - 1) as usize];
            let yj = sop.polygon.hull_ordinate(j);
            let shift = (yj - Rational64::from_integer(j * vphi))
                / Rational64::from_integer(t.e as i64);
            for u in (n - deg_phi + 1)..=n {
                let yu = polygon.hull_ordinate(u as i64);
                let k = (yu + shift).floor().to_integer();
                assert!(k >= 0, "negative denominator exponent");
                out.push(RawElement {
                    numer: q.mul_x_pow(n - u),
                    k: k as u64,
                });
            }
        }
    }
    if out.len() != n {
        return Err(Montes2Error::BasisCountMismatch);
    }
    Ok(out)
}

// ---- Tests ----

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::XorShift;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn x12(m: i64) -> IntPoly {
        IntPoly::x12_minus_m(&big(m))
    }

    // Types for v_2(m) = 2, unit 1 mod 4 (slope -1/6, psi = Y + 1).
    fn type_a1() -> Type2Data {
        Type2Data {
            p: 2,
            h: 1,
            e: 6,
            psi: FpPoly::from_i64(2, &[1, 1]),
            mu: 2,
            phi: IntPoly::from_i64(&[2, 0, 0, 0, 0, 0, 1]),
        }
    }

    // Types for v_2(m) = 6, unit 7 mod 8 (slope -1/2, two repeated factors).
    fn types_a9() -> Vec<Type2Data> {
        vec![
            Type2Data {
                p: 2,
                h: 1,
                e: 2,
                psi: FpPoly::from_i64(2, &[1, 1]),
                mu: 2,
                phi: IntPoly::from_i64(&[2, 2, 1]),
            },
            Type2Data {
                p: 2,
                h: 1,
                e: 2,
                psi: FpPoly::from_i64(2, &[1, 1, 1]),
                mu: 2,
                phi: IntPoly::from_i64(&[4, 4, 2, 2, 1]),
            },
        ]
    }

    // Types for v_3(m) = 6, unit 1 mod 9 (slope -1/2, psi = Y -+ 1).
    fn types_b3() -> Vec<Type2Data> {
        vec![
            Type2Data {
                p: 3,
                h: 1,
                e: 2,
                psi: FpPoly::from_i64(3, &[-1, 1]),
                mu: 3,
                phi: IntPoly::from_i64(&[-3, 0, 1]),
            },
            Type2Data {
                p: 3,
                h: 1,
                e: 2,
                psi: FpPoly::from_i64(3, &[1, 1]),
                mu: 3,
                phi: IntPoly::from_i64(&[3, 0, 1]),
            },
        ]
    }

    // Type for v_3(m) = 3, unit congruent to delta mod 9.
    fn type_b1(delta: i64) -> Type2Data {
        Type2Data {
            p: 3,
            h: 1,
            e: 4,
            psi: FpPoly::from_i64(3, &[-delta, 1]),
            mu: 3,
            phi: IntPoly::new(vec![big(-3 * delta), big(0), big(0), big(0), big(1)]),
        }
    }

    // Type for v_2(m) = 10, unit 7 mod 8.
    fn type_a15() -> Type2Data {
        Type2Data {
            p: 2,
            h: 5,
            e: 6,
            psi: FpPoly::from_i64(2, &[1, 1]),
            mu: 2,
            phi: IntPoly::from_i64(&[32, 0, 0, 8, 0, 0, 1]),
        }
    }

    #[test]
    fn valuation_basics() {
        let t = type_a1();
        assert_eq!(second_order_valuation(&t, &IntPoly::x_pow(1)), Ok(1));
        assert_eq!(v_of_phi(&t), 6);
        // m = 28: V(4 - m) = 6 v_2(-24) = 18.
        assert_eq!(second_order_valuation(&t, &IntPoly::from_i64(&[4 - 28])), Ok(18));
        assert_eq!(
            second_order_valuation(&t, &IntPoly::zero()),
            Err(Montes2Error::ZeroPolynomial)
        );
    }

    #[test]
    fn key_validation() {
        assert!(validate_key_polynomial(&type_a1()));
        assert!(validate_key_polynomial(&type_b1(1)));
        assert!(validate_key_polynomial(&type_b1(-1)));
        for t in types_a9() {
            assert!(validate_key_polynomial(&t));
        }
        for t in types_b3() {
            assert!(validate_key_polynomial(&t));
        }
        assert!(validate_key_polynomial(&type_a15()));
        // x^6 + 4 has slope -2/6, not -1/6.
        let mut bad = type_a1();
        bad.phi = IntPoly::from_i64(&[4, 0, 0, 0, 0, 0, 1]);
        assert!(!validate_key_polynomial(&bad));
        // Wrong residual: x^6 + 2 against psi = Y.
        let mut bad = type_a1();
        bad.psi = FpPoly::from_i64(2, &[0, 1]);
        assert!(!validate_key_polynomial(&bad));
    }

    #[test]
    fn expansion_examples() {
        let t = type_a1();
        let m = 20;
        let exp = phi_expansion(&x12(m), &t.phi);
        assert_eq!(exp.a.len(), 3);
        assert_eq!(exp.a[2], IntPoly::one());
        assert_eq!(exp.a[1], IntPoly::from_i64(&[-4]));
        assert_eq!(exp.a[0], IntPoly::from_i64(&[4 - m]));
        assert_eq!(exp.q.len(), 2);
        assert_eq!(exp.q[0], IntPoly::from_i64(&[-2, 0, 0, 0, 0, 0, 1]));
        assert_eq!(exp.q[1], IntPoly::one());

        // Cubic key: x^12 - m = Phi^4 + 8 Phi^3 + 24 Phi^2 + 32 Phi + 16 - m.
        let phi = IntPoly::from_i64(&[-2, 0, 0, 1]);
        let exp = phi_expansion(&x12(m), &phi);
        let consts: Vec<IntPoly> = exp.a.iter().cloned().collect();
        assert_eq!(
            consts,
            vec![
                IntPoly::from_i64(&[16 - m]),
                IntPoly::from_i64(&[32]),
                IntPoly::from_i64(&[24]),
                IntPoly::from_i64(&[8]),
                IntPoly::one(),
            ]
        );

        // Expanding along x recovers the coefficients.
        let exp = phi_expansion(&x12(m), &IntPoly::x_pow(1));
        for (i, a) in exp.a.iter().enumerate() {
            assert_eq!(*a, IntPoly::constant(x12(m).coeff(i)));
        }
    }

    #[test]
    fn v_polygon_shapes() {
        // v_2(m) = 2, unit 1 mod 8: vertices (0, 6 v_2(4-m)), (1, 18), (2, 12).
        let t = type_a1();
        let m = 4 * 17; // unit 17 = 1 mod 8, v_2(4 - 68) = 6
        let sop = v_newton_polygon(&t, &x12(m)).unwrap();
        assert_eq!(sop.polygon.vertices(), &[
            PolygonPoint::from_ints(0, 36),
            PolygonPoint::from_ints(1, 18),
            PolygonPoint::from_ints(2, 12),
        ]);
        assert_eq!(sop.last_vertex_ordinate, 12);

        // Unit 5 mod 8: single edge (0, 24)-(2, 12) through (1, 18).
        let m = 20;
        let sop = v_newton_polygon(&t, &x12(m)).unwrap();
        assert_eq!(sop.polygon.vertices(), &[
            PolygonPoint::from_ints(0, 24),
            PolygonPoint::from_ints(2, 12),
        ]);

        // v_3(m) = 3, unit = delta mod 9: vertices (0, .), (1, 16), (3, 12).
        let t = type_b1(1);
        let m = 27 * 10;
        let sop = v_newton_polygon(&t, &x12(m)).unwrap();
        let verts = sop.polygon.vertices();
        assert_eq!(verts.len(), 3);
        assert_eq!(verts[1], PolygonPoint::from_ints(1, 16));
        assert_eq!(verts[2], PolygonPoint::from_ints(3, 12));
        assert_eq!(verts[0].x, 0);
        assert_eq!(verts[0].y, Rational64::from_integer(20));
    }

    #[test]
    fn residual_examples() {
        // v_2 = 2, unit 5 mod 8: residual Y^2 + Y + 1 over F_2.
        let t = type_a1();
        let f = x12(20);
        let exp = phi_expansion(&f, &t.phi);
        let sop = v_polygon_of_expansion(&t, &exp).unwrap();
        assert_eq!(sop.polygon.negative_edges().len(), 1);
        let r = second_order_residual(&t, &exp, &sop.polygon.negative_edges()[0]).unwrap();
        assert_eq!(r, FqPoly::from_prime_field(t.psi.clone(), &[1, 1, 1]));
        assert!(r.is_squarefree());
        assert_eq!(is_v_regular(&t, &f), Ok(true));

        // v_2 = 2, unit 3 mod 8: single edge with linear residual.
        let t = Type2Data {
            phi: IntPoly::from_i64(&[-2, 0, 0, 2, 0, 0, 1]),
            ..type_a1()
        };
        assert!(validate_key_polynomial(&t));
        let f = x12(4 * 3);
        let exp = phi_expansion(&f, &t.phi);
        let sop = v_polygon_of_expansion(&t, &exp).unwrap();
        let edges = sop.polygon.negative_edges();
        assert_eq!(edges.len(), 1);
        let r = second_order_residual(&t, &exp, &edges[0]).unwrap();
        assert_eq!(r.degree(), Some(1));

        // v_2 = 2, unit 7 mod 16: residual Y^2 + Y + 1.
        let t = Type2Data {
            phi: IntPoly::from_i64(&[2, 0, 0, 2, 0, 0, 1]),
            ..type_a1()
        };
        assert!(validate_key_polynomial(&t));
        let f = x12(4 * 7);
        let exp = phi_expansion(&f, &t.phi);
        let sop = v_polygon_of_expansion(&t, &exp).unwrap();
        let edges = sop.polygon.negative_edges();
        assert_eq!(edges.len(), 1);
        let r = second_order_residual(&t, &exp, &edges[0]).unwrap();
        assert_eq!(r, FqPoly::from_prime_field(t.psi.clone(), &[1, 1, 1]));
    }

    #[test]
    fn index_examples() {
        // v_2 = 2, unit 1 mod 4: index 12 = 6 + 6.
        assert_eq!(montes_index(&x12(20), 2, &[type_a1()]), Ok(12));
        assert_eq!(montes_index(&x12(4 * 17), 2, &[type_a1()]), Ok(12));
        // v_2 = 6, unit 7 mod 8: index 39 = 30 + 3 + 6.
        assert_eq!(montes_index(&x12(64 * 7), 2, &types_a9()), Ok(39));
        assert_eq!(montes_index(&x12(64 * 15), 2, &types_a9()), Ok(39));
        // v_3 = 6, unit 1 mod 9: index 36 = 30 + 3 + 3.
        assert_eq!(montes_index(&x12(729 * 10), 3, &types_b3()), Ok(36));
        // v_3 = 3, unit 1 mod 9: index 18 = 12 + 6.
        assert_eq!(montes_index(&x12(27 * 10), 3, &[type_b1(1)]), Ok(18));
        // Regular cases need no types at all.
        assert_eq!(montes_index(&x12(50), 5, &[]), Ok(6));
        assert_eq!(montes_index(&x12(2 * 5i64.pow(5)), 5, &[]), Ok(22));
        // Missing or spurious types are rejected.
        assert_eq!(montes_index(&x12(20), 2, &[]), Err(Montes2Error::TypeMismatch));
        assert_eq!(
            montes_index(&x12(50), 5, &[type_a1()]),
            Err(Montes2Error::TypeMismatch)
        );
    }

    #[test]
    fn basis_examples() {
        // v_2 = 2, unit 1 mod 4: contains (theta^6 - 2) / 2^2.
        let raw = montes_p_basis(&x12(20), 2, &[type_a1()]).unwrap();
        assert_eq!(raw.len(), 12);
        assert!(raw.contains(&RawElement {
            numer: IntPoly::from_i64(&[-2, 0, 0, 0, 0, 0, 1]),
            k: 2,
        }));

        // v_3 = 3, unit 1 mod 9: contains (theta^8 + 3 theta^4 + 9) / 3^3.
        let raw = montes_p_basis(&x12(270), 3, &[type_b1(1)]).unwrap();
        assert_eq!(raw.len(), 12);
        assert!(raw.contains(&RawElement {
            numer: IntPoly::from_i64(&[9, 0, 0, 0, 3, 0, 0, 0, 1]),
            k: 3,
        }));

        // v_2 = 10, unit 7 mod 8: contains (theta^6 - 8 theta^3 + 32) / 2^6.
        let raw = montes_p_basis(&x12(1024 * 7), 2, &[type_a15()]).unwrap();
        assert_eq!(raw.len(), 12);
        assert!(raw.contains(&RawElement {
            numer: IntPoly::from_i64(&[32, 0, 0, -8, 0, 0, 1]),
            k: 6,
        }));
    }

    #[test]
    fn valuation_is_additive() {
        let mut rng = XorShift::new(0xadd_1717);
        for t in [type_a1(), type_b1(1), type_a15(), types_b3().remove(0)] {
            for _ in 0..500 {
                let da = rng.below(6) as usize;
                let db = rng.below(6) as usize;
                let a = IntPoly::new(
                    (0..=da).map(|_| big(rng.range_i64(-4000, 4000))).collect(),
                );
                let b = IntPoly::new(
                    (0..=db).map(|_| big(rng.range_i64(-4000, 4000))).collect(),
                );
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                let va = second_order_valuation(&t, &a).unwrap();
                let vb = second_order_valuation(&t, &b).unwrap();
                let vab = second_order_valuation(&t, &a.mul(&b)).unwrap();
                assert_eq!(vab, va + vb);
            }
        }
    }

    #[test]
    fn v_of_whole_equals_min_over_terms() {
        for (m, t) in [
            (20i64, type_a1()),
            (4 * 17, type_a1()),
            (270, type_b1(1)),
            (1024 * 7, type_a15()),
        ] {
            let f = x12(m);
            let exp = phi_expansion(&f, &t.phi);
            let vphi = v_of_phi(&t);
            let min_term = exp
                .a
                .iter()
                .enumerate()
                .filter(|(_, a)| !a.is_zero())
                .map(|(i, a)| second_order_valuation(&t, a).unwrap() + i as i64 * vphi)
                .min()
                .unwrap();
            assert_eq!(second_order_valuation(&t, &f).unwrap(), min_term);
            let sop = v_newton_polygon(&t, &f).unwrap();
            assert_eq!(sop.last_vertex_ordinate, min_term);
        }
    }
}
