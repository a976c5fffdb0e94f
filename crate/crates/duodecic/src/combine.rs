//! Assembly of local data: triangular reduction of spanning sets into
//! canonical p-integral bases, and CRT combination of per-prime bases
//! into one global integral basis.
//!
//! Invariants:
//! - `triangularize` is canonical: the output depends only on the span
//!   of the input, and running it on its own output returns it unchanged;
//! - global basis row i has denominator prod_p p^(k_i_p), and its
//!   numerator reduces mod p^(k_i_p) to the per-prime numerator;
//! - inputs that do not span a module of the expected triangular shape
//!   are reported as errors, never repaired.

use std::error::Error;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{self, FactoredInt, IntPoly};
use crate::montes2::RawElement;
use crate::pure12::{PIntegralBasis, Pure12Error, ThetaElement};

// ---- Errors ----

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CombineError {
    /// An input denominator is not a power of the working prime.
    NonPPowerDenominator,
    /// The input does not span a full-rank module.
    RankDeficient,
    /// A triangular pivot is not a power of the working prime dividing
    /// the common denominator.
    NonPPowerPivot,
    /// The span has no basis with monic numerators over p-power
    /// denominators; it is not the module of an order.
    DivisibilityFailure,
    /// Two per-prime bases share the same prime.
    DuplicatePrime(u64),
    Malformed(String),
    Pure12(Pure12Error),
}

impl fmt::Display for CombineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CombineError::NonPPowerDenominator => {
                write!(f, "input denominator is not a power of p")
            }
            CombineError::RankDeficient => write!(f, "input does not span rank 12"),
            CombineError::NonPPowerPivot => {
                write!(f, "triangular pivot is not a p-power dividing the common denominator")
            }
            CombineError::DivisibilityFailure => {
                write!(f, "span admits no monic triangular basis")
            }
            CombineError::DuplicatePrime(p) => write!(f, "duplicate prime {}", p),
            CombineError::Malformed(msg) => write!(f, "{}", msg),
            CombineError::Pure12(e) => write!(f, "{}", e),
        }
    }
}

impl Error for CombineError {}

impl From<Pure12Error> for CombineError {
    fn from(e: Pure12Error) -> Self {
        CombineError::Pure12(e)
    }
}

// ---- Triangularization ----

/// View a raw second-order element as an element of K.
pub fn raw_to_theta(raw: &RawElement, p: u64) -> ThetaElement {
    ThetaElement::with_prime_power(raw.numer.clone(), p, raw.k)
}

fn top_index(v: &[BigInt]) -> Option<usize> {
    v.iter().rposition(|c| !c.is_zero())
}

fn sub_scaled(v: &mut [BigInt], w: &[BigInt], q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for (a, b) in v.iter_mut().zip(w) {
        *a -= q * b;
    }
}

/// Integer column echelon over degrees 11 down to 0. Returns one vector
/// per degree with positive leading coefficient, spanning the same
/// module as the input.
pub(crate) fn echelon(vectors: Vec<Vec<BigInt>>) -> Result<Vec<Vec<BigInt>>, CombineError> {
    let mut slots: Vec<Option<Vec<BigInt>>> = (0..12).map(|_| None).collect();
    let mut stack = vectors;
    while let Some(mut v) = stack.pop() {
        loop {
            let d = match top_index(&v) {
                Some(d) => d,
                None => break,
            };
            match slots[d].take() {
                None => {
                    if v[d].is_negative() {
                        for c in v.iter_mut() {
                            *c = -&*c;
                        }
                    }
                    slots[d] = Some(v);
                    break;
                }
                Some(w) => {
                    if (&v[d] % &w[d]).is_zero() {
                        let q = &v[d] / &w[d];
                        sub_scaled(&mut v, &w, &q);
                        slots[d] = Some(w);
                    } else {
                        let eg = w[d].extended_gcd(&v[d]);
                        let mut new: Vec<BigInt> = w
                            .iter()
                            .zip(&v)
                            .map(|(a, b)| a * &eg.x + b * &eg.y)
                            .collect();
                        debug_assert_eq!(new[d], eg.gcd);
                        let wq = &w[d] / &eg.gcd;
                        let vq = &v[d] / &eg.gcd;
                        let mut w2 = w;
                        sub_scaled(&mut w2, &new, &wq);
                        sub_scaled(&mut v, &new, &vq);
                        if new[d].is_negative() {
                            for c in new.iter_mut() {
                                *c = -&*c;
                            }
                        }
                        slots[d] = Some(new);
                        stack.push(w2);
                    }
                }
            }
        }
    }
    slots
        .into_iter()
        .map(|s| s.ok_or(CombineError::RankDeficient))
        .collect()
}

/// Reduce a spanning set of a module between Z[theta] and (1/p^k) Z[theta]
/// to the canonical triangular basis with monic numerators.
pub fn triangularize(
    p: u64,
    elements: &[ThetaElement],
) -> Result<PIntegralBasis, CombineError> {
    let mut kmax = 0u64;
    let mut with_k = Vec::with_capacity(elements.len());
    for e in elements {
        let k = arith::vp(e.denom(), p).map_err(|e| CombineError::Pure12(e.into()))?;
        if BigInt::from(p).pow(k as u32) != *e.denom() {
            return Err(CombineError::NonPPowerDenominator);
        }
        kmax = kmax.max(k);
        with_k.push((e, k));
    }
    let mut vectors = Vec::with_capacity(with_k.len());
    for (e, k) in with_k {
        let scale = BigInt::from(p).pow((kmax - k) as u32);
        let v: Vec<BigInt> = (0..12).map(|j| e.numer().coeff(j) * &scale).collect();
        if v.iter().any(|c| !c.is_zero()) {
            vectors.push(v);
        }
    }
    let mut slots = echelon(vectors)?;

    let mut numers: Vec<IntPoly> = Vec::with_capacity(12);
    let mut ks: Vec<u64> = Vec::with_capacity(12);
    for i in 0..12 {
        let mut u = std::mem::take(&mut slots[i]);
        let lead_v = arith::vp(&u[i], p).map_err(|e| CombineError::Pure12(e.into()))?;
        if BigInt::from(p).pow(lead_v as u32) != u[i] {
            return Err(CombineError::NonPPowerPivot);
        }
        let ki = kmax.checked_sub(lead_v).ok_or(CombineError::NonPPowerPivot)?;
        for j in (0..i).rev() {
            let pj = BigInt::from(p).pow((kmax - ks[j]) as u32);
            let q = u[j].div_floor(&pj);
            if !q.is_zero() {
                let scaled: Vec<BigInt> =
                    (0..12).map(|t| numers[j].coeff(t) * &pj).collect();
                sub_scaled(&mut u, &scaled, &q);
            }
        }
        let div = BigInt::from(p).pow((kmax - ki) as u32);
        let mut coeffs = Vec::with_capacity(i + 1);
        for c in u.iter().take(i + 1) {
            let (q, r) = c.div_rem(&div);
            if !r.is_zero() {
                return Err(CombineError::DivisibilityFailure);
            }
            coeffs.push(q);
        }
        numers.push(IntPoly::new(coeffs));
        ks.push(ki);
    }

    let elements = numers
        .into_iter()
        .zip(&ks)
        .map(|(n, &k)| ThetaElement::with_prime_power(n, p, k))
        .collect();
    PIntegralBasis::new(p, elements).map_err(CombineError::Pure12)
}

/// Triangular basis spanned by the raw second-order elements together
/// with the power basis.
pub fn p_basis_from_raw(
    p: u64,
    raw: &[RawElement],
) -> Result<PIntegralBasis, CombineError> {
    let mut elements: Vec<ThetaElement> = (0..12).map(ThetaElement::theta_pow).collect();
    elements.extend(raw.iter().map(|r| raw_to_theta(r, p)));
    triangularize(p, &elements)
}

// ---- Global bases ----

/// Z-basis of the maximal order: row i has monic numerator of degree i
/// over the denominator prod_p p^(k_i_p).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralBasis {
    elements: Vec<ThetaElement>,
    primes: Vec<(u64, Vec<u64>)>,
}

impl IntegralBasis {
    pub fn elements(&self) -> &[ThetaElement] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &ThetaElement {
        &self.elements[i]
    }

    /// The primes entering the denominators, with their per-row exponents.
    pub fn primes(&self) -> &[(u64, Vec<u64>)] {
        &self.primes
    }

    /// [O_K : Z[theta]] = product of the row denominators, factored.
    pub fn index(&self) -> FactoredInt {
        let mut out = FactoredInt::one();
        for (p, ks) in &self.primes {
            let total: u64 = ks.iter().sum();
            out.mul_prime_power(*p, total as u32);
        }
        out
    }

    /// Membership in the spanned Z-module by triangular back-substitution.
    pub fn contains(&self, e: &ThetaElement) -> bool {
        let mut numer: Vec<BigInt> = (0..12).map(|j| e.numer().coeff(j)).collect();
        let mut denom = e.denom().clone();
        for i in (0..12).rev() {
            if numer[i].is_zero() {
                continue;
            }
            let b = &self.elements[i];
            // lambda = numer[i]/denom * d_i must be an integer.
            let (lam, r) = (&numer[i] * b.denom()).div_rem(&denom);
            if !r.is_zero() {
                return false;
            }
            // numer/denom -= lam * b.numer()/b.denom(): rescale to the
            // common denominator denom * b.denom().
            let bd = b.denom().clone();
            for (t, c) in numer.iter_mut().enumerate() {
                *c = &*c * &bd - &lam * &denom * b.numer().coeff(t);
            }
            denom *= bd;
        }
        numer.iter().all(|c| c.is_zero())
    }

    pub fn spans_same(&self, other: &IntegralBasis) -> bool {
        self.elements.iter().all(|e| other.contains(e))
            && other.elements.iter().all(|e| self.contains(e))
    }

    /// Validate externally supplied rows and recover their prime data.
    pub fn from_rows(elements: Vec<ThetaElement>) -> Result<IntegralBasis, CombineError> {
        if elements.len() != 12 {
            return Err(CombineError::Malformed("expected 12 rows".into()));
        }
        for (i, e) in elements.iter().enumerate() {
            if e.numer().degree() != Some(i) || !e.numer().is_monic() {
                return Err(CombineError::Malformed(format!(
                    "row {} must have a monic numerator of degree {}",
                    i, i
                )));
            }
        }
        let mut primes: Vec<(u64, Vec<u64>)> = Vec::new();
        for e in &elements {
            let fd = arith::factor(e.denom())
                .map_err(|e| CombineError::Pure12(e.into()))?;
            for p in fd.primes() {
                if !primes.iter().any(|(q, _)| *q == p) {
                    primes.push((p, Vec::new()));
                }
            }
        }
        primes.sort_unstable_by_key(|(p, _)| *p);
        for e in &elements {
            for (p, ks) in primes.iter_mut() {
                ks.push(arith::vp(e.denom(), *p).map_err(|e| CombineError::Pure12(e.into()))?);
            }
        }
        for (_, ks) in &primes {
            if ks.windows(2).any(|w| w[0] > w[1]) {
                return Err(CombineError::Malformed(
                    "row denominators must form a divisibility chain".into(),
                ));
            }
        }
        Ok(IntegralBasis { elements, primes })
    }
}

/// x = a mod m, x = b mod n for coprime moduli, least non-negative.
fn crt(a: &BigInt, m: &BigInt, b: &BigInt, n: &BigInt) -> BigInt {
    if m.is_one() {
        return b.mod_floor(n);
    }
    if n.is_one() {
        return a.mod_floor(m);
    }
    let eg = m.extended_gcd(n);
    debug_assert!(eg.gcd.is_one(), "moduli must be coprime");
    // x = a + m * t with t = (b - a) / m mod n.
    let t = ((b - a) * &eg.x).mod_floor(n);
    (a + m * t).mod_floor(&(m * n))
}

/// Combine per-prime bases into the global basis by rowwise CRT, with
/// coefficients taken least non-negative modulo the row denominator.
pub fn global_basis(bases: &[PIntegralBasis]) -> Result<IntegralBasis, CombineError> {
    for (i, a) in bases.iter().enumerate() {
        for b in bases.iter().skip(i + 1) {
            if a.p() == b.p() {
                return Err(CombineError::DuplicatePrime(a.p()));
            }
        }
    }
    let mut elements = Vec::with_capacity(12);
    for i in 0..12 {
        let mut coeffs = vec![BigInt::zero(); i + 1];
        coeffs[i] = BigInt::one();
        let mut modulus = BigInt::one();
        for basis in bases {
            let pk = BigInt::from(basis.p()).pow(basis.k(i) as u32);
            if pk.is_one() {
                continue;
            }
            let numer = basis.element(i).numer();
            for (j, c) in coeffs.iter_mut().enumerate().take(i) {
                let residue = numer.coeff(j).mod_floor(&pk);
                *c = crt(c, &modulus, &residue, &pk);
            }
            modulus *= pk;
        }
        elements.push(ThetaElement::new(IntPoly::new(coeffs), modulus));
    }
    let primes = bases
        .iter()
        .map(|b| (b.p(), (0..12).map(|i| b.k(i)).collect()))
        .collect();
    let mut out = IntegralBasis { elements, primes };
    out.primes.sort_unstable_by_key(|(p, _)| *p);
    Ok(out)
}

// ---- Tests ----
