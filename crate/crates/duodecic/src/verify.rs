//! Independent verification pass: a round-2 maximal-order oracle plus
//! exact integrality and discriminant checks. Nothing here consults the
//! case tables or the polygon engines; agreement between the two routes
//! is established in tests, never assumed.
//!
//! Invariants:
//! - `is_algebraic_integer` decides integrality from the characteristic
//!   polynomial of the multiplication matrix, computed exactly;
//! - `round2_p_basis` starts at Z[theta] and enlarges by the multiplier
//!   ring of the p-radical until that ring stabilizes, which happens
//!   exactly at the p-maximal order;
//! - the trace form and resultant discriminant routes are arithmetically
//!   disjoint and must agree on the power basis.

use std::error::Error;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{self, ArithError, IntPoly};
use crate::combine::{self, CombineError};
use crate::pure12::{PIntegralBasis, ThetaElement};

// ---- Errors ----

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyError {
    /// m is not 12th-power-free or x^12 - m is reducible.
    InvalidRadicand,
    NotPrime(u64),
    /// The spanned module is not closed under multiplication.
    NotClosed,
    /// The enlargement loop exceeded its bound; the input cannot be an
    /// order of K.
    IterationLimit,
    Combine(CombineError),
    Arith(ArithError),
}

impl fmt::Display for VerifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyError::InvalidRadicand => {
                write!(f, "radicand must be 12th-power-free with x^12 - m irreducible")
            }
            VerifyError::NotPrime(p) => write!(f, "{} is not prime", p),
            VerifyError::NotClosed => write!(f, "module is not closed under multiplication"),
            VerifyError::IterationLimit => write!(f, "order enlargement failed to stabilize"),
            VerifyError::Combine(e) => write!(f, "{}", e),
            VerifyError::Arith(e) => write!(f, "{}", e),
        }
    }
}

impl Error for VerifyError {}

impl From<CombineError> for VerifyError {
    fn from(e: CombineError) -> Self {
        VerifyError::Combine(e)
    }
}

impl From<ArithError> for VerifyError {
    fn from(e: ArithError) -> Self {
        VerifyError::Arith(e)
    }
}

// ---- Multiplication matrices and integrality ----

/// Fold theta^12 = m into a polynomial of degree at most 22.
fn theta_reduce(g: &IntPoly, m: &BigInt) -> IntPoly {
    let deg = match g.degree() {
        Some(d) => d,
        None => return IntPoly::zero(),
    };
    let mut coeffs: Vec<BigInt> = (0..=deg).map(|j| g.coeff(j)).collect();
    for j in (12..coeffs.len()).rev() {
        let c = std::mem::take(&mut coeffs[j]);
        coeffs[j - 12] += c * m;
    }
    coeffs.truncate(12);
    IntPoly::new(coeffs)
}

/// Product of two elements of K in theta coordinates.
pub fn theta_mul(a: &ThetaElement, b: &ThetaElement, m: &BigInt) -> ThetaElement {
    let numer = theta_reduce(&a.numer().mul(b.numer()), m);
    ThetaElement::new(numer, a.denom() * b.denom())
}

/// Matrix of multiplication by an element in the power basis of K,
/// stored as an integer matrix over a common denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultMatrix {
    pub num: Vec<Vec<BigInt>>,
    pub den: BigInt,
}

impl MultMatrix {
    pub fn trace(&self) -> BigRational {
        let t: BigInt = (0..12).map(|i| self.num[i][i].clone()).sum();
        BigRational::new(t, self.den.clone())
    }
}

pub fn mult_matrix(e: &ThetaElement, m: &BigInt) -> MultMatrix {
    let mut num = vec![vec![BigInt::zero(); 12]; 12];
    for j in 0..12 {
        let col = theta_reduce(&e.numer().mul_x_pow(j), m);
        for (i, row) in num.iter_mut().enumerate() {
            row[j] = col.coeff(i);
        }
    }
    MultMatrix { num, den: e.denom().clone() }
}

fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let mut out = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for (k, aik) in a[i].iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for (j, bkj) in b[k].iter().enumerate() {
                out[i][j] += aik * bkj;
            }
        }
    }
    out
}

/// Monic characteristic polynomial of an integer matrix, ascending
/// coefficients, by the Faddeev-LeVerrier recurrence. All divisions in
/// the recurrence are exact.
pub fn char_poly_numer(n: &[Vec<BigInt>]) -> Vec<BigInt> {
    let dim = n.len();
    let mut cs: Vec<BigInt> = Vec::with_capacity(dim);
    let mut mk = n.to_owned();
    for k in 1..=dim {
        if k > 1 {
            let mut adj = mk;
            let c = &cs[k - 2];
            for (i, row) in adj.iter_mut().enumerate() {
                row[i] += c;
            }
            mk = mat_mul(n, &adj);
        }
        let t: BigInt = (0..dim).map(|i| mk[i][i].clone()).sum();
        let (c, r) = (-t).div_rem(&BigInt::from(k as i64));
        debug_assert!(r.is_zero());
        cs.push(c);
    }
    let mut out = vec![BigInt::zero(); dim + 1];
    out[dim] = BigInt::one();
    for (k, c) in cs.into_iter().enumerate() {
        out[dim - k - 1] = c;
    }
    out
}

/// Whether the element lies in the maximal order: the characteristic
/// polynomial of its multiplication matrix must have integer
/// coefficients after clearing the denominator d, i.e. d^k must divide
/// the coefficient of x^(12-k).
pub fn is_algebraic_integer(e: &ThetaElement, m: &BigInt) -> bool {
    let mm = mult_matrix(e, m);
    if mm.den.is_one() {
        return true;
    }
    let chi = char_poly_numer(&mm.num);
    let mut dk = BigInt::one();
    for k in 1..=12usize {
        dk *= &mm.den;
        if !chi[12 - k].is_multiple_of(&dk) {
            return false;
        }
    }
    true
}

/// Trace of an element given in theta coordinates of degree < 12.
pub fn trace(e: &ThetaElement) -> BigRational {
    BigRational::new(e.numer().coeff(0) * BigInt::from(12), e.denom().clone())
}

// ---- Discriminants ----

/// Fraction-free determinant of an integer matrix.
fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = 1i64;
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                let (q, r) = t.div_rem(&prev);
                debug_assert!(r.is_zero());
                a[i][j] = q;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Discriminant of the Z-module spanned by the given elements, from the
/// Gram determinant of the trace form. Traces are read off unreduced
/// products: Tr(theta^t) vanishes for 0 < t < 24 except Tr(theta^12) = 12 m.
pub fn trace_form_disc(elements: &[ThetaElement], m: &BigInt) -> BigRational {
    let n = elements.len();
    let mut gram = vec![vec![BigInt::zero(); n]; n];
    let twelve = BigInt::from(12);
    for i in 0..n {
        for j in i..n {
            let prod = elements[i].numer().mul(elements[j].numer());
            let t = &twelve * (prod.coeff(0) + m * prod.coeff(12));
            gram[i][j] = t.clone();
            gram[j][i] = t;
        }
    }
    let det = bareiss_det(gram);
    let mut den = BigInt::one();
    for e in elements {
        den *= e.denom();
    }
    BigRational::new(det, &den * &den)
}

/// disc(x^12 - m) by the resultant of f and f', through the Sylvester
/// determinant. For n = 12 the leading sign (-1)^(n(n-1)/2) is +1.
pub fn resultant_disc(m: &BigInt) -> BigInt {
    let mut s = vec![vec![BigInt::zero(); 23]; 23];
    // f = x^12 - m: 11 shifted rows; f' = 12 x^11: 12 shifted rows.
    for r in 0..11 {
        s[r][r] = BigInt::one();
        s[r][r + 12] = -m.clone();
    }
    for r in 0..12 {
        s[11 + r][r] = BigInt::from(12);
    }
    bareiss_det(s)
}

// ---- Orders as multiplication tables ----

fn coords_in_basis(basis: &PIntegralBasis, e: &ThetaElement) -> Vec<BigRational> {
    let p = BigInt::from(basis.p());
    let mut rest: Vec<BigRational> = (0..12)
        .map(|j| BigRational::new(e.numer().coeff(j), e.denom().clone()))
        .collect();
    let mut out = vec![BigRational::zero(); 12];
    for i in (0..12).rev() {
        if rest[i].is_zero() {
            continue;
        }
        let pk = p.pow(basis.k(i) as u32);
        let lam = &rest[i] * BigRational::from(pk.clone());
        let g = basis.element(i).numer();
        for (t, r) in rest.iter_mut().enumerate().take(i + 1) {
            *r -= &lam * BigRational::new(g.coeff(t), pk.clone());
        }
        out[i] = lam;
    }
    debug_assert!(rest.iter().all(|r| r.is_zero()));
    out
}

/// An order given by a triangular basis, with the exact integer
/// coordinates of all pairwise products of basis elements.
struct OrderData {
    basis: PIntegralBasis,
    prods: Vec<Vec<Vec<BigInt>>>,
}

fn order_data(basis: PIntegralBasis, m: &BigInt) -> Result<OrderData, VerifyError> {
    let mut prods = vec![vec![Vec::new(); 12]; 12];
    for i in 0..12 {
        for j in i..12 {
            let prod = theta_mul(basis.element(i), basis.element(j), m);
            let coords = coords_in_basis(&basis, &prod);
            let mut ints = Vec::with_capacity(12);
            for c in coords {
                if !c.is_integer() {
                    return Err(VerifyError::NotClosed);
                }
                ints.push(c.to_integer());
            }
            prods[i][j] = ints.clone();
            prods[j][i] = ints;
        }
    }
    Ok(OrderData { basis, prods })
}

// ---- Linear algebra mod p ----

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1);
    t0.rem_euclid(p as i128) as u64
}

/// Kernel basis of the linear map given by the rows, over F_p.
fn fp_kernel(mut rows: Vec<Vec<u64>>, p: u64) -> Vec<Vec<u64>> {
    let n = 12;
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut rank = 0usize;
    for c in 0..n {
        let Some(r) = (rank..rows.len()).find(|&r| rows[r][c] % p != 0) else {
            continue;
        };
        rows.swap(rank, r);
        let inv = inv_mod(rows[rank][c], p);
        for x in rows[rank].iter_mut() {
            *x = *x % p * inv % p;
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[c] % p != 0 {
                let f = row[c] % p;
                for (x, pv) in row.iter_mut().zip(&pivot_row) {
                    *x = (*x + (p - f) * pv) % p;
                }
            }
        }
        pivots.push((rank, c));
        rank += 1;
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut kernel = Vec::new();
    for c in 0..n {
        if pivot_cols.contains(&c) {
            continue;
        }
        let mut x = vec![0u64; n];
        x[c] = 1;
        for &(r, pc) in &pivots {
            x[pc] = (p - rows[r][c] % p) % p;
        }
        kernel.push(x);
    }
    kernel
}

/// Basis of the radical of O/pO in basis coordinates: the kernel of the
/// j-th Frobenius iterate, where j is least with p^j >= 12.
fn radical_kernel(od: &OrderData) -> Vec<Vec<u64>> {
    let p = od.basis.p();
    let table: Vec<Vec<Vec<u64>>> = od
        .prods
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| v.iter().map(|c| c.mod_floor(&BigInt::from(p)).try_into().unwrap()).collect())
                .collect()
        })
        .collect();
    let mul = |x: &[u64], y: &[u64]| -> Vec<u64> {
        let mut acc = vec![0u128; 12];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj == 0 {
                    continue;
                }
                let f = (xi as u128 * yj as u128) % p as u128;
                for (a, &t) in acc.iter_mut().zip(&table[i][j]) {
                    *a += f * t as u128;
                }
            }
        }
        acc.into_iter().map(|a| (a % p as u128) as u64).collect()
    };
    let mut q: u128 = 1;
    while q < 12 {
        q *= p as u128;
    }
    let pow = |x: &[u64], mut e: u128| -> Vec<u64> {
        let mut acc = vec![0u64; 12];
        acc[0] = 1;
        let mut base = x.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(&acc, &base);
            }
            base = mul(&base, &base);
            e >>= 1;
        }
        acc
    };
    let mut rows = vec![vec![0u64; 12]; 12];
    for c in 0..12 {
        let mut unit = vec![0u64; 12];
        unit[c] = 1;
        let img = pow(&unit, q);
        for (r, row) in rows.iter_mut().enumerate() {
            row[c] = img[r];
        }
    }
    fp_kernel(rows, p)
}

/// Dimension over F_p of the radical of O/pO for the order spanned by
/// the given basis.
pub fn p_radical_dim(basis: &PIntegralBasis, m: &BigInt) -> Result<usize, VerifyError> {
    let od = order_data(basis.clone(), m)?;
    Ok(radical_kernel(&od).len())
}

// ---- The multiplier-ring step ----

/// One enlargement step: the multiplier ring of I = pO + rad(pO). Returns
/// the new generators x/p with x in O, or None when O is p-maximal.
fn multiplier_step(od: &OrderData) -> Result<Option<Vec<ThetaElement>>, VerifyError> {
    let p = od.basis.p();
    let pbig = BigInt::from(p);
    let radical = radical_kernel(od);

    // Z-basis of I in O-coordinates.
    let mut gens: Vec<Vec<BigInt>> = (0..12)
        .map(|i| {
            let mut v = vec![BigInt::zero(); 12];
            v[i] = pbig.clone();
            v
        })
        .collect();
    for r in &radical {
        gens.push(r.iter().map(|&c| BigInt::from(c)).collect());
    }
    let l = combine::echelon(gens)?;

    // For each ideal generator g, the matrix L^-1 M_g is integral; its
    // mod-p kernel cuts out {x in O : x I <= p I}.
    let mut stacked: Vec<Vec<u64>> = Vec::with_capacity(144);
    for w in &l {
        // M_g columns: coordinates of g * b_j.
        let mut cols: Vec<Vec<BigInt>> = Vec::with_capacity(12);
        for j in 0..12 {
            let mut col = vec![BigInt::zero(); 12];
            for (s, ws) in w.iter().enumerate() {
                if ws.is_zero() {
                    continue;
                }
                for (t, c) in col.iter_mut().enumerate() {
                    *c += ws * &od.prods[s][j][t];
                }
            }
            // Solve L z = col by back-substitution from the top index.
            let mut z = vec![BigInt::zero(); 12];
            for t in (0..12).rev() {
                let (q, r) = col[t].div_rem(&l[t][t]);
                if !r.is_zero() {
                    return Err(VerifyError::NotClosed);
                }
                for (ct, lt) in col.iter_mut().zip(&l[t]) {
                    *ct -= &q * lt;
                }
                z[t] = q;
            }
            cols.push(z);
        }
        for i in 0..12 {
            let row: Vec<u64> = (0..12)
                .map(|j| cols[j][i].mod_floor(&pbig).try_into().unwrap())
                .collect();
            stacked.push(row);
        }
    }
    let kernel = fp_kernel(stacked, p);
    if kernel.is_empty() {
        return Ok(None);
    }

    let kmax = (0..12).map(|i| od.basis.k(i)).max().unwrap();
    let mut out = Vec::with_capacity(kernel.len());
    for x in kernel {
        let mut numer = IntPoly::zero();
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            let scale = BigInt::from(xi) * pbig.pow((kmax - od.basis.k(i)) as u32);
            numer = numer.add(&od.basis.element(i).numer().mul_scalar(&scale));
        }
        out.push(ThetaElement::with_prime_power(numer, p, kmax + 1));
    }
    Ok(Some(out))
}

// ---- Round 2 ----

fn power_basis(p: u64) -> PIntegralBasis {
    let elements = (0..12).map(ThetaElement::theta_pow).collect();
    PIntegralBasis::new(p, elements).expect("power basis is triangular")
}

fn check_input(m: &BigInt, p: u64) -> Result<(), VerifyError> {
    if !arith::is_prime_u64(p) {
        return Err(VerifyError::NotPrime(p));
    }
    if !arith::is_12th_power_free(m)? || !arith::is_irreducible_x12_minus_m(m)? {
        return Err(VerifyError::InvalidRadicand);
    }
    Ok(())
}

/// p-maximal order by round 2, starting from Z[theta]. Independent of
/// the case tables and the polygon engines.
pub fn round2_p_basis(m: &BigInt, p: u64) -> Result<PIntegralBasis, VerifyError> {
    check_input(m, p)?;
    let mut basis = power_basis(p);
    for _ in 0..64 {
        let od = order_data(basis, m)?;
        match multiplier_step(&od)? {
            None => return Ok(od.basis),
            Some(new) => {
                let mut elements = od.basis.elements().to_vec();
                elements.extend(new);
                basis = combine::triangularize(p, &elements)?;
            }
        }
    }
    Err(VerifyError::IterationLimit)
}

pub fn round2_vp_index(m: &BigInt, p: u64) -> Result<u64, VerifyError> {
    Ok(round2_p_basis(m, p)?.vp_index())
}

// ---- Basis reports ----

/// Outcome of checking a claimed p-integral basis against the oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisReport {
    /// Every element is an algebraic integer.
    pub integral: bool,
    /// The spanned module is closed under multiplication.
    pub closed: bool,
    /// The exponent sum matches the round-2 index.
    pub index_matches: bool,
    /// The multiplier ring of the p-radical adds nothing.
    pub maximal: bool,
}

impl BasisReport {
    pub fn all_pass(&self) -> bool {
        self.integral && self.closed && self.index_matches && self.maximal
    }
}

pub fn verify_p_basis(
    m: &BigInt,
    p: u64,
    basis: &PIntegralBasis,
) -> Result<BasisReport, VerifyError> {
    check_input(m, p)?;
    let integral = basis.elements().iter().all(|e| is_algebraic_integer(e, m));
    let index_matches = basis.vp_index() == round2_vp_index(m, p)?;
    let (closed, maximal) = match order_data(basis.clone(), m) {
        Ok(od) => (true, multiplier_step(&od)?.is_none()),
        Err(VerifyError::NotClosed) => (false, false),
        Err(e) => return Err(e),
    };
    Ok(BasisReport { integral, closed, index_matches, maximal })
}

// ---- Tests ----
