//! Integers, dense polynomials over Z and over F_p, and radicand checks.
//!
//! Invariants relied on throughout the crate:
//! - `IntPoly` and `FpPoly` store dense coefficients with no trailing zeros;
//!   the zero polynomial has an empty vector and `degree() == None`.
//! - `FpPoly` coefficients are always reduced into `[0, p)`.
//! - `FactoredInt` keeps primes strictly increasing, exponents >= 1.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

// ---- Errors ----

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArithError {
    /// v_p is undefined on zero.
    ZeroValuation,
    /// |m| <= 1 where a usable radicand was required.
    RadicandTooSmall,
    /// fp_factor requires a monic input of positive degree.
    NotMonic,
    /// fp_factor is restricted to the residue characteristics of x^12 - m.
    UnsupportedPrime(u64),
    /// Integer outside the factorable range (magnitude must fit in u64).
    FactorRange,
}

impl fmt::Display for ArithError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithError::ZeroValuation => write!(f, "p-adic valuation of zero is undefined"),
            ArithError::RadicandTooSmall => write!(f, "radicand must satisfy |m| >= 2"),
            ArithError::NotMonic => write!(f, "polynomial must be monic of positive degree"),
            ArithError::UnsupportedPrime(p) => write!(f, "prime {} not supported here", p),
            ArithError::FactorRange => write!(f, "integer too large to factor exactly"),
        }
    }
}

impl std::error::Error for ArithError {}

// ---- Valuations ----

/// Highest power of p dividing n. The sign of n is ignored.
pub fn vp(n: &BigInt, p: u64) -> Result<u64, ArithError> {
    if n.is_zero() {
        return Err(ArithError::ZeroValuation);
    }
    let p = BigInt::from(p);
    let mut k = 0u64;
    let mut rest = n.abs();
    loop {
        let (q, r) = rest.div_rem(&p);
        if !r.is_zero() {
            return Ok(k);
        }
        rest = q;
        k += 1;
    }
}

/// The p-free part n / p^vp(n, p); carries the sign of n.
pub fn unit_part(n: &BigInt, p: u64) -> Result<BigInt, ArithError> {
    let k = vp(n, p)?;
    Ok(n / BigInt::from(p).pow(k as u32))
}

/// True iff no prime power p^12 divides m. Requires |m| >= 2.
pub fn is_12th_power_free(m: &BigInt) -> Result<bool, ArithError> {
    let a = m.abs();
    if a <= BigInt::one() {
        return Err(ArithError::RadicandTooSmall);
    }
    // p^12 | m forces p <= |m|^(1/12); that bound is tiny for any usable m.
    let bound = a.nth_root(12);
    let mut p = BigInt::from(2u32);
    while p <= bound {
        if vp(m, p.to_u64().expect("12th root fits u64"))? >= 12 {
            return Ok(false);
        }
        p += 1;
    }
    Ok(true)
}

/// Irreducibility of x^12 - m over Q by the binomial criterion: m must not
/// be a perfect square, nor a perfect cube, nor of the form -4 t^4.
pub fn is_irreducible_x12_minus_m(m: &BigInt) -> Result<bool, ArithError> {
    if m.abs() <= BigInt::one() {
        return Err(ArithError::RadicandTooSmall);
    }
    if is_perfect_square(m) || is_perfect_cube(m) {
        return Ok(false);
    }
    // m = -4 t^4 would admit the Aurifeuillian splitting of x^4 + 4 t^4.
    let four = BigInt::from(4);
    if (m % &four).is_zero() && m.is_negative() && is_perfect_fourth(&(-m / &four)) {
        return Ok(false);
    }
    Ok(true)
}

fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

fn is_perfect_cube(n: &BigInt) -> bool {
    let r = n.cbrt();
    &r * &r * &r == *n
}

fn is_perfect_fourth(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.nth_root(4);
    r.pow(4) == *n
}

// ---- Factored integers ----

/// Sign and prime factorization of a nonzero integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInt {
    pub sign: i8,
    pub factors: BTreeMap<u64, u32>,
}

impl FactoredInt {
    pub fn one() -> Self {
        FactoredInt { sign: 1, factors: BTreeMap::new() }
    }

    pub fn value(&self) -> BigInt {
        let mut v = BigInt::from(self.sign);
        for (&p, &e) in &self.factors {
            v *= BigInt::from(p).pow(e);
        }
        v
    }

    pub fn exponent(&self, p: u64) -> u32 {
        self.factors.get(&p).copied().unwrap_or(0)
    }

    /// Multiply in p^e, keeping the map canonical.
    pub fn mul_prime_power(&mut self, p: u64, e: u32) {
        if e == 0 {
            return;
        }
        *self.factors.entry(p).or_insert(0) += e;
    }

    /// Exact division by p^e; panics if the exponent would go negative.
    pub fn div_prime_power(&mut self, p: u64, e: u32) {
        if e == 0 {
            return;
        }
        let cur = self.factors.get_mut(&p).expect("division must be exact");
        assert!(*cur >= e, "division must be exact");
        *cur -= e;
        if *cur == 0 {
            self.factors.remove(&p);
        }
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.keys().copied()
    }
}

impl fmt::Display for FactoredInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign < 0 {
            write!(f, "-")?;
        }
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for (&p, &e) in &self.factors {
            if !first {
                write!(f, " * ")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{}", p)?;
            } else {
                write!(f, "{}^{}", p, e)?;
            }
        }
        Ok(())
    }
}

/// Factor a nonzero integer whose magnitude fits in u64.
/// Deterministic: trial division, then Pollard-Brent with a fixed
/// parameter sweep; primality by Miller-Rabin with proven witness sets.
pub fn factor(n: &BigInt) -> Result<FactoredInt, ArithError> {
    if n.is_zero() {
        return Err(ArithError::ZeroValuation);
    }
    let sign = if n.is_negative() { -1 } else { 1 };
    let mag = n.abs().to_u64().ok_or(ArithError::FactorRange)?;
    let mut factors = BTreeMap::new();
    let mut stack = vec![mag];
    while let Some(mut v) = stack.pop() {
        if v == 1 {
            continue;
        }
        for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
            while v % small == 0 {
                *factors.entry(small).or_insert(0) += 1;
                v /= small;
            }
        }
        if v == 1 {
            continue;
        }
        if is_prime_u64(v) {
            *factors.entry(v).or_insert(0) += 1;
            continue;
        }
        let d = pollard_brent(v);
        stack.push(d);
        stack.push(v / d);
    }
    Ok(FactoredInt { sign, factors })
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the witness set is proven complete below 2^64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// One nontrivial factor of a composite n. The (x^2 + c) sweep over
/// c = 1, 2, 3, ... is fixed, so runs are reproducible.
fn pollard_brent(n: u64) -> u64 {
    debug_assert!(n > 1 && !is_prime_u64(n));
    if n & 1 == 0 {
        return 2;
    }
    for c in 1..64u64 {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u64(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!("parameter sweep exhausted on composite {}", n);
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

// ---- Polynomials over Z ----

/// Dense univariate polynomial with arbitrary-precision integer
/// coefficients; index i holds the coefficient of x^i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        IntPoly::new(vec![c])
    }

    pub fn x_pow(k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = BigInt::one();
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// f(x) = x^12 - m.
    pub fn x12_minus_m(m: &BigInt) -> Self {
        let mut coeffs = vec![BigInt::zero(); 13];
        coeffs[0] = -m.clone();
        coeffs[12] = BigInt::one();
        IntPoly { coeffs }
    }

    /// None for the zero polynomial.
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

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().map_or(false, |c| c.is_one())
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + other.coeff(i));
        }
        IntPoly::new(out)
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) - other.coeff(i));
        }
        IntPoly::new(out)
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    pub fn mul_scalar(&self, c: &BigInt) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn mul_x_pow(&self, k: usize) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        IntPoly { coeffs }
    }

    /// Division with remainder by a monic divisor: self = q*d + r,
    /// deg r < deg d, exact over Z.
    pub fn divmod_monic(&self, d: &IntPoly) -> (IntPoly, IntPoly) {
        assert!(d.is_monic(), "divisor must be monic");
        let dd = d.degree().expect("monic divisor is nonzero");
        let mut rem = self.coeffs.clone();
        if rem.len() < dd + 1 {
            return (IntPoly::zero(), self.clone());
        }
        let mut quo = vec![BigInt::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = std::mem::replace(&mut rem[i], BigInt::zero());
            if c.is_zero() {
                continue;
            }
            for (j, b) in d.coeffs.iter().take(dd).enumerate() {
                let t = &c * b;
                rem[i - dd + j] -= t;
            }
            quo[i - dd] = c;
        }
        (IntPoly::new(quo), IntPoly::new(rem))
    }

    /// Nonnegative gcd of the coefficients; 0 for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
        }
        g
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> IntPoly {
        if self.coeffs.len() <= 1 {
            return IntPoly::zero();
        }
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn reduce_mod(&self, p: u64) -> FpPoly {
        let pb = BigInt::from(p);
        FpPoly::new(
            p,
            self.coeffs
                .iter()
                .map(|c| c.mod_floor(&pb).to_u64().expect("residue fits u64"))
                .collect(),
        )
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_poly(f, &self.coeffs, "x", |c: &BigInt| c.clone())
    }
}

/// Shared term-by-term formatter; highest degree first.
fn fmt_poly<T, F>(f: &mut fmt::Formatter<'_>, coeffs: &[T], var: &str, to_big: F) -> fmt::Result
where
    F: Fn(&T) -> BigInt,
{
    if coeffs.is_empty() {
        return write!(f, "0");
    }
    let mut first = true;
    for i in (0..coeffs.len()).rev() {
        let c = to_big(&coeffs[i]);
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
        if i == 0 || !mag.is_one() {
            write!(f, "{}", mag)?;
        }
        match i {
            0 => {}
            1 => write!(f, "{}", var)?,
            _ => write!(f, "{}^{}", var, i)?,
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

// ---- Polynomials over F_p ----

/// Dense univariate polynomial over F_p, coefficients reduced into [0, p).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpPoly {
    p: u64,
    coeffs: Vec<u64>,
}

impl FpPoly {
    pub fn new(p: u64, coeffs: Vec<u64>) -> Self {
        let mut coeffs: Vec<u64> = coeffs.into_iter().map(|c| c % p).collect();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FpPoly { p, coeffs }
    }

    pub fn from_i64(p: u64, coeffs: &[i64]) -> Self {
        FpPoly::new(
            p,
            coeffs.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect(),
        )
    }

    pub fn zero(p: u64) -> Self {
        FpPoly { p, coeffs: Vec::new() }
    }

    pub fn one(p: u64) -> Self {
        FpPoly::new(p, vec![1])
    }

    pub fn constant(p: u64, c: u64) -> Self {
        FpPoly::new(p, vec![c])
    }

    pub fn x(p: u64) -> Self {
        FpPoly::new(p, vec![0, 1])
    }

    pub fn modulus(&self) -> u64 {
        self.p
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

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    fn assert_same_field(&self, other: &FpPoly) {
        assert_eq!(self.p, other.p, "mixed moduli");
    }

    pub fn add(&self, other: &FpPoly) -> FpPoly {
        self.assert_same_field(other);
        let n = self.coeffs.len().max(other.coeffs.len());
        FpPoly::new(
            self.p,
            (0..n).map(|i| (self.coeff(i) + other.coeff(i)) % self.p).collect(),
        )
    }

    pub fn sub(&self, other: &FpPoly) -> FpPoly {
        self.assert_same_field(other);
        let n = self.coeffs.len().max(other.coeffs.len());
        FpPoly::new(
            self.p,
            (0..n)
                .map(|i| (self.p + self.coeff(i) - other.coeff(i)) % self.p)
                .collect(),
        )
    }

    pub fn mul(&self, other: &FpPoly) -> FpPoly {
        self.assert_same_field(other);
        if self.is_zero() || other.is_zero() {
            return FpPoly::zero(self.p);
        }
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + mulmod(a, b, self.p)) % self.p;
            }
        }
        FpPoly::new(self.p, out)
    }

    pub fn scale(&self, c: u64) -> FpPoly {
        FpPoly::new(self.p, self.coeffs.iter().map(|&a| mulmod(a, c % self.p, self.p)).collect())
    }

    fn inv_mod_p(&self, a: u64) -> u64 {
        debug_assert!(a % self.p != 0);
        powmod(a, self.p - 2, self.p)
    }

    /// Division with remainder by a nonzero divisor.
    pub fn divmod(&self, d: &FpPoly) -> (FpPoly, FpPoly) {
        self.assert_same_field(d);
        let dd = d.degree().expect("division by zero polynomial");
        let lead_inv = self.inv_mod_p(*d.coeffs.last().unwrap());
        let mut rem: Vec<u64> = self.coeffs.clone();
        if rem.len() < dd + 1 {
            return (FpPoly::zero(self.p), self.clone());
        }
        let mut quo = vec![0u64; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = mulmod(rem[i], lead_inv, self.p);
            rem[i] = 0;
            if c == 0 {
                continue;
            }
            for (j, &b) in d.coeffs.iter().take(dd).enumerate() {
                let t = mulmod(c, b, self.p);
                rem[i - dd + j] = (rem[i - dd + j] + self.p - t) % self.p;
            }
            quo[i - dd] = c;
        }
        (FpPoly::new(self.p, quo), FpPoly::new(self.p, rem))
    }

    pub fn divides(&self, other: &FpPoly) -> bool {
        let (_, r) = other.divmod(self);
        r.is_zero()
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(&self, other: &FpPoly) -> FpPoly {
        self.assert_same_field(other);
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divmod(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: (g, s, t) with s*self + t*other = g and g monic.
    pub fn ext_gcd(&self, other: &FpPoly) -> (FpPoly, FpPoly, FpPoly) {
        self.assert_same_field(other);
        let p = self.p;
        let mut r0 = self.clone();
        let mut r1 = other.clone();
        let mut s0 = FpPoly::one(p);
        let mut s1 = FpPoly::zero(p);
        let mut t0 = FpPoly::zero(p);
        let mut t1 = FpPoly::one(p);
        while !r1.is_zero() {
            let (q, r) = r0.divmod(&r1);
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        match r0.coeffs.last() {
            None => (r0, s0, t0),
            Some(&lc) => {
                let inv = self.inv_mod_p(lc);
                (r0.scale(inv), s0.scale(inv), t0.scale(inv))
            }
        }
    }

    /// Scale to leading coefficient 1 (zero polynomial unchanged).
    pub fn monic(&self) -> FpPoly {
        match self.coeffs.last() {
            None => self.clone(),
            Some(&lc) if lc == 1 => self.clone(),
            Some(&lc) => self.scale(self.inv_mod_p(lc)),
        }
    }

    pub fn derivative(&self) -> FpPoly {
        if self.coeffs.len() <= 1 {
            return FpPoly::zero(self.p);
        }
        FpPoly::new(
            self.p,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| mulmod(c, i as u64 % self.p, self.p))
                .collect(),
        )
    }

    /// Squarefree iff gcd(q, q') = 1. In characteristic p a vanishing
    /// derivative on a nonconstant q correctly reports non-squarefree.
    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == Some(0)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let x = x % self.p;
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = (mulmod(acc, x, self.p) + c) % self.p;
        }
        acc
    }
}

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_poly(f, &self.coeffs, "Y", |&c: &u64| BigInt::from(c))
    }
}

/// Factor a monic polynomial over F_p into monic irreducibles with
/// multiplicities, ordered by (degree, coefficients).
///
/// Exhaustive trial division by candidates of degree <= deg/2, smallest
/// first: every divisor found is irreducible because all of its proper
/// factors were already divided out. The supported primes keep the
/// candidate space small; this code favors auditability over asymptotics.
pub fn fp_factor(q: &FpPoly) -> Result<Vec<(FpPoly, u32)>, ArithError> {
    let p = q.p;
    if !matches!(p, 2 | 3 | 5 | 7 | 11 | 13) {
        return Err(ArithError::UnsupportedPrime(p));
    }
    if !q.is_monic() || q.degree() == Some(0) {
        return Err(ArithError::NotMonic);
    }
    let mut rest = q.clone();
    let mut out: Vec<(FpPoly, u32)> = Vec::new();
    let mut deg = 1usize;
    while 2 * deg <= rest.degree().unwrap_or(0) {
        // Monic candidates of this degree, lexicographic from the constant up.
        let mut idx = vec![0u64; deg];
        loop {
            let mut coeffs = idx.clone();
            coeffs.push(1);
            let cand = FpPoly::new(p, coeffs);
            let mut mult = 0u32;
            while cand.divides(&rest) {
                let (quo, _) = rest.divmod(&cand);
                rest = quo;
                mult += 1;
            }
            if mult > 0 {
                out.push((cand, mult));
            }
            // Advance the odometer over F_p^deg.
            let mut pos = 0;
            loop {
                if pos == deg {
                    break;
                }
                idx[pos] += 1;
                if idx[pos] < p {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == deg {
                break;
            }
        }
        deg += 1;
    }
    if rest.degree().unwrap_or(0) >= 1 {
        out.push((rest, 1));
    }
    out.sort_by(|a, b| {
        a.0.degree()
            .cmp(&b.0.degree())
            .then_with(|| a.0.coeffs.cmp(&b.0.coeffs))
    });
    Ok(out)
}

// ---- Tests ----
