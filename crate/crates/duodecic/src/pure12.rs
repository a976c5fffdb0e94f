//! Case classification and closed-form p-integral bases for Q(theta),
//! theta^12 = m with m a 12th-power-free integer.
//!
//! Every prime p lands in exactly one case. The wild cases (p = 2 with
//! even v_2(m) > 0, p = 3 with v_3(m) in {3, 6, 9}) carry tabulated
//! bases loaded from an embedded data file; the remaining covered cases
//! have short generated forms. Primes p in {5, 7, 11} with p dividing
//! both m and v_p(m) fall outside the tables and are reported as such;
//! the polygon engines still apply to them.
//!
//! Invariants:
//! - a `PIntegralBasis` holds 12 elements, the i-th with monic numerator
//!   of degree i and denominator p^k_i, k_0 = 0 and k_i ascending;
//! - the k_i of a case sum to its index v_p([O_K : Z[theta]]);
//! - the embedded tables round-trip byte for byte through the parser
//!   and serializer.

use std::collections::BTreeSet;
use std::error::Error;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{self, ArithError, FactoredInt, IntPoly};
use crate::montes2::Type2Data;

// ---- Errors ----

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pure12Error {
    /// m has a 12th power divisor larger than 1.
    NotTwelfthPowerFree,
    /// x^12 - m factors over the rationals.
    Reducible,
    /// The given modulus is not prime.
    NotPrime(u64),
    /// p in {5, 7, 11} divides both m and v_p(m); no table covers this.
    NotCovered(u64),
    /// The case carries no key polynomial data.
    NoSecondOrderData(CaseTag),
    /// A basis constructor received elements violating its invariants.
    MalformedBasis(String),
    Arith(ArithError),
}

impl fmt::Display for Pure12Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pure12Error::NotTwelfthPowerFree => {
                write!(f, "radicand has a 12th power divisor")
            }
            Pure12Error::Reducible => write!(f, "x^12 - m is reducible"),
            Pure12Error::NotPrime(p) => write!(f, "modulus {} is not prime", p),
            Pure12Error::NotCovered(p) => {
                write!(f, "prime {} divides both m and v_p(m); outside the tables", p)
            }
            Pure12Error::NoSecondOrderData(tag) => {
                write!(f, "case {} has no key polynomial data", tag)
            }
            Pure12Error::MalformedBasis(msg) => write!(f, "malformed basis: {}", msg),
            Pure12Error::Arith(e) => write!(f, "{}", e),
        }
    }
}

impl Error for Pure12Error {}

impl From<ArithError> for Pure12Error {
    fn from(e: ArithError) -> Self {
        Pure12Error::Arith(e)
    }
}

// ---- Elements of K = Q(theta) ----

/// numer(theta) / denom with numer of degree at most 11, denom positive,
/// and gcd(content(numer), denom) = 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaElement {
    numer: IntPoly,
    denom: BigInt,
}

impl ThetaElement {
    pub fn new(numer: IntPoly, denom: BigInt) -> Self {
        assert!(!denom.is_zero(), "denominator must be nonzero");
        assert!(
            numer.degree().unwrap_or(0) <= 11,
            "numerator degree must stay below 12"
        );
        let (mut numer, mut denom) = if denom.is_negative() {
            (numer.neg(), -denom)
        } else {
            (numer, denom)
        };
        if numer.is_zero() {
            return ThetaElement { numer, denom: BigInt::one() };
        }
        let g = numer.content().gcd(&denom);
        if g > BigInt::one() {
            numer = IntPoly::new(numer.coeffs().iter().map(|c| c / &g).collect());
            denom /= &g;
        }
        ThetaElement { numer, denom }
    }

    /// numer(theta) / p^k.
    pub fn with_prime_power(numer: IntPoly, p: u64, k: u64) -> Self {
        ThetaElement::new(numer, BigInt::from(p).pow(k as u32))
    }

    pub fn theta_pow(i: usize) -> Self {
        assert!(i < 12);
        ThetaElement { numer: IntPoly::x_pow(i), denom: BigInt::one() }
    }

    pub fn one() -> Self {
        ThetaElement::theta_pow(0)
    }

    pub fn numer(&self) -> &IntPoly {
        &self.numer
    }

    pub fn denom(&self) -> &BigInt {
        &self.denom
    }

    /// Coefficient of theta^i as an exact rational.
    pub fn coord(&self, i: usize) -> BigRational {
        BigRational::new(self.numer.coeff(i), self.denom.clone())
    }
}

impl fmt::Display for ThetaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = DeltaPoly::from_base(self.numer.clone()).serialize('t');
        if self.denom.is_one() {
            write!(f, "{}", s)
        } else {
            write!(f, "({})/{}", s, self.denom)
        }
    }
}

// ---- p-integral bases ----

/// Triangular basis of the p-maximal order: element i has monic numerator
/// of degree i and denominator p^k_i, with k_0 = 0 and k_i ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PIntegralBasis {
    p: u64,
    elements: Vec<ThetaElement>,
    ks: Vec<u64>,
}

impl PIntegralBasis {
    pub fn new(p: u64, elements: Vec<ThetaElement>) -> Result<Self, Pure12Error> {
        if elements.len() != 12 {
            return Err(Pure12Error::MalformedBasis(format!(
                "expected 12 elements, got {}",
                elements.len()
            )));
        }
        let mut ks = Vec::with_capacity(12);
        for (i, e) in elements.iter().enumerate() {
            if e.numer.degree() != Some(i) || !e.numer.is_monic() {
                return Err(Pure12Error::MalformedBasis(format!(
                    "element {} must have a monic numerator of degree {}",
                    i, i
                )));
            }
            let k = arith::vp(&e.denom, p)?;
            if BigInt::from(p).pow(k as u32) != e.denom {
                return Err(Pure12Error::MalformedBasis(format!(
                    "element {} has denominator {} which is not a power of {}",
                    i, e.denom, p
                )));
            }
            ks.push(k);
        }
        if ks[0] != 0 {
            return Err(Pure12Error::MalformedBasis("element 0 must be 1".into()));
        }
        if ks.windows(2).any(|w| w[0] > w[1]) {
            return Err(Pure12Error::MalformedBasis(
                "denominator exponents must be ascending".into(),
            ));
        }
        Ok(PIntegralBasis { p, elements, ks })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn element(&self, i: usize) -> &ThetaElement {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[ThetaElement] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<ThetaElement> {
        self.elements
    }

    pub fn k(&self, i: usize) -> u64 {
        self.ks[i]
    }

    /// v_p of the index of the power order: the sum of the k_i.
    pub fn vp_index(&self) -> u64 {
        self.ks.iter().sum()
    }

    /// Membership of e in the spanned module over Z localized at p,
    /// decided by triangular back-substitution.
    pub fn contains(&self, e: &ThetaElement) -> bool {
        let p = BigInt::from(self.p);
        let mut rest: Vec<BigRational> = (0..12).map(|i| e.coord(i)).collect();
        for i in (0..12).rev() {
            if rest[i].is_zero() {
                continue;
            }
            let pk = BigInt::from(self.p).pow(self.ks[i] as u32);
            let lam = &rest[i] * BigRational::from_integer(pk);
            if lam.denom().mod_floor(&p).is_zero() {
                return false;
            }
            let b = &self.elements[i];
            for (j, r) in rest.iter_mut().enumerate().take(i + 1) {
                *r -= &lam * b.coord(j);
            }
        }
        rest.iter().all(|r| r.is_zero())
    }

    /// Mutual membership of all basis elements.
    pub fn spans_same(&self, other: &PIntegralBasis) -> bool {
        self.elements.iter().all(|e| other.contains(e))
            && other.elements.iter().all(|e| self.contains(e))
    }
}

// ---- Case labels ----

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CaseTag {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    A8,
    A9,
    A10,
    A11,
    A12,
    A13,
    A14,
    A15,
    B1,
    B2,
    B3,
    B4,
    B5,
    B6,
    B7,
    B8,
    /// p | m, p regular: either p odd with p unrelated to v_p(m), or
    /// p = 2 with odd v, or p = 3 with v not divisible by 3.
    T1,
    /// p = 3, 3 does not divide m, m^2 = 1 mod 9.
    T23a,
    /// p = 3, 3 does not divide m, m^2 != 1 mod 9.
    T23b,
    /// p = 2, m = 1 mod 8.
    T32a,
    /// p = 2, m = 5 mod 8.
    T32b,
    /// p = 2, m = 3 mod 4.
    T32c,
    /// p does not divide 12 m.
    T4,
}

impl CaseTag {
    pub const ALL: [CaseTag; 30] = [
        CaseTag::A1,
        CaseTag::A2,
        CaseTag::A3,
        CaseTag::A4,
        CaseTag::A5,
        CaseTag::A6,
        CaseTag::A7,
        CaseTag::A8,
        CaseTag::A9,
        CaseTag::A10,
        CaseTag::A11,
        CaseTag::A12,
        CaseTag::A13,
        CaseTag::A14,
        CaseTag::A15,
        CaseTag::B1,
        CaseTag::B2,
        CaseTag::B3,
        CaseTag::B4,
        CaseTag::B5,
        CaseTag::B6,
        CaseTag::B7,
        CaseTag::B8,
        CaseTag::T1,
        CaseTag::T23a,
        CaseTag::T23b,
        CaseTag::T32a,
        CaseTag::T32b,
        CaseTag::T32c,
        CaseTag::T4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CaseTag::A1 => "A1",
            CaseTag::A2 => "A2",
            CaseTag::A3 => "A3",
            CaseTag::A4 => "A4",
            CaseTag::A5 => "A5",
            CaseTag::A6 => "A6",
            CaseTag::A7 => "A7",
            CaseTag::A8 => "A8",
            CaseTag::A9 => "A9",
            CaseTag::A10 => "A10",
            CaseTag::A11 => "A11",
            CaseTag::A12 => "A12",
            CaseTag::A13 => "A13",
            CaseTag::A14 => "A14",
            CaseTag::A15 => "A15",
            CaseTag::B1 => "B1",
            CaseTag::B2 => "B2",
            CaseTag::B3 => "B3",
            CaseTag::B4 => "B4",
            CaseTag::B5 => "B5",
            CaseTag::B6 => "B6",
            CaseTag::B7 => "B7",
            CaseTag::B8 => "B8",
            CaseTag::T1 => "T1",
            CaseTag::T23a => "T2-3a",
            CaseTag::T23b => "T2-3b",
            CaseTag::T32a => "T3-2a",
            CaseTag::T32b => "T3-2b",
            CaseTag::T32c => "T3-2c",
            CaseTag::T4 => "T4",
        }
    }

    /// True for the tabulated wild cases A1..A15 and B1..B8.
    pub fn is_wild(self) -> bool {
        !matches!(
            self,
            CaseTag::T1
                | CaseTag::T23a
                | CaseTag::T23b
                | CaseTag::T32a
                | CaseTag::T32b
                | CaseTag::T32c
                | CaseTag::T4
        )
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl FromStr for CaseTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        CaseTag::ALL
            .iter()
            .copied()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown case tag {}", s))
    }
}

/// Outcome of classifying a prime p for a given radicand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CaseLabel {
    pub p: u64,
    pub tag: CaseTag,
    /// Sign d for p = 3: +1 when the unit part of m is 1 mod 3, else -1.
    pub delta: Option<i8>,
}

// ---- Table polynomials ----

/// Integer polynomial with an optional part proportional to the sign d,
/// so that substituting d = +-1 yields the concrete numerator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaPoly {
    base: IntPoly,
    dpart: IntPoly,
}

impl DeltaPoly {
    pub fn from_base(base: IntPoly) -> Self {
        DeltaPoly { base, dpart: IntPoly::zero() }
    }

    pub fn substitute(&self, delta: i64) -> IntPoly {
        self.base.add(&self.dpart.mul_scalar(&BigInt::from(delta)))
    }

    pub fn uses_delta(&self) -> bool {
        !self.dpart.is_zero()
    }

    /// Parse from the table syntax, e.g. "t^9+3dt^5+9t" with variable 't'.
    pub fn parse(var: char, s: &str) -> Result<DeltaPoly, String> {
        let bytes = s.as_bytes();
        let vb = var as u8;
        let mut base: Vec<i64> = Vec::new();
        let mut dpart: Vec<i64> = Vec::new();
        let mut i = 0usize;
        let mut first = true;
        while i < bytes.len() {
            let mut sign = 1i64;
            if bytes[i] == b'+' || bytes[i] == b'-' {
                if bytes[i] == b'-' {
                    sign = -1;
                }
                i += 1;
            } else if !first {
                return Err(format!("missing sign between terms in {:?}", s));
            }
            first = false;
            let digit_start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let mag: Option<i64> = if i > digit_start {
                Some(
                    s[digit_start..i]
                        .parse()
                        .map_err(|_| format!("bad coefficient in {:?}", s))?,
                )
            } else {
                None
            };
            let has_d = i < bytes.len() && bytes[i] == b'd';
            if has_d {
                i += 1;
            }
            let mut pow = 0usize;
            let mut has_var = false;
            if i < bytes.len() && bytes[i] == vb {
                has_var = true;
                i += 1;
                if i < bytes.len() && bytes[i] == b'^' {
                    i += 1;
                    let ps = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    if i == ps {
                        return Err(format!("missing exponent in {:?}", s));
                    }
                    pow = s[ps..i]
                        .parse()
                        .map_err(|_| format!("bad exponent in {:?}", s))?;
                } else {
                    pow = 1;
                }
            }
            if mag.is_none() && !has_d && !has_var {
                return Err(format!("empty term in {:?}", s));
            }
            let coef = sign * mag.unwrap_or(1);
            let target = if has_d { &mut dpart } else { &mut base };
            if target.len() <= pow {
                target.resize(pow + 1, 0);
            }
            target[pow] += coef;
        }
        Ok(DeltaPoly {
            base: IntPoly::from_i64(&base),
            dpart: IntPoly::from_i64(&dpart),
        })
    }

    /// Canonical table syntax: descending degree, base term before d term,
    /// unit coefficients elided except for bare constants.
    pub fn serialize(&self, var: char) -> String {
        let top = self
            .base
            .degree()
            .unwrap_or(0)
            .max(self.dpart.degree().unwrap_or(0));
        let mut out = String::new();
        for k in (0..=top).rev() {
            for (coef, is_d) in [(self.base.coeff(k), false), (self.dpart.coeff(k), true)] {
                if coef.is_zero() {
                    continue;
                }
                if out.is_empty() {
                    if coef.is_negative() {
                        out.push('-');
                    }
                } else {
                    out.push(if coef.is_negative() { '-' } else { '+' });
                }
                let a = coef.abs();
                if !a.is_one() || (!is_d && k == 0) {
                    out.push_str(&a.to_string());
                }
                if is_d {
                    out.push('d');
                }
                if k >= 1 {
                    out.push(var);
                }
                if k >= 2 {
                    out.push('^');
                    out.push_str(&k.to_string());
                }
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

// ---- Table records ----

/// Second-order refinement data of one tabulated case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyRecord {
    pub h: u64,
    pub e: u64,
    pub mu: u32,
    pub psi: DeltaPoly,
    pub phi: DeltaPoly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseRow {
    pub k: u64,
    pub numer: DeltaPoly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseRecord {
    pub tag: CaseTag,
    pub p: u64,
    pub v: u64,
    pub cond_modulus: u64,
    pub cond_residues: Vec<u64>,
    pub index: u64,
    pub keys: Vec<KeyRecord>,
    pub rows: Vec<CaseRow>,
    pub note: Option<String>,
}

const CASE_TABLES_TEXT: &str = include_str!("data/case_tables.txt");

static RECORDS: OnceLock<Vec<CaseRecord>> = OnceLock::new();

/// The embedded case tables, parsed once.
pub fn case_records() -> &'static [CaseRecord] {
    RECORDS.get_or_init(|| {
        parse_case_tables(CASE_TABLES_TEXT).expect("embedded case tables must parse")
    })
}

pub fn record_for(tag: CaseTag) -> Option<&'static CaseRecord> {
    case_records().iter().find(|r| r.tag == tag)
}

/// The raw table source, for round-trip checks and external dumps.
pub fn case_tables_source() -> &'static str {
    CASE_TABLES_TEXT
}

fn parse_u64(s: &str) -> Result<u64, String> {
    s.parse().map_err(|_| format!("bad integer {:?}", s))
}

pub fn parse_case_tables(text: &str) -> Result<Vec<CaseRecord>, String> {
    let mut records = Vec::new();
    let mut block: Vec<&str> = Vec::new();
    for line in text.lines() {
        if line.starts_with('#') {
            continue;
        }
        if line.trim().is_empty() {
            if !block.is_empty() {
                records.push(parse_block(&block)?);
                block.clear();
            }
        } else {
            block.push(line);
        }
    }
    if !block.is_empty() {
        records.push(parse_block(&block)?);
    }
    Ok(records)
}

fn parse_block(lines: &[&str]) -> Result<CaseRecord, String> {
    let mut tag = None;
    let mut p = None;
    let mut v = None;
    let mut cond = None;
    let mut index = None;
    let mut keys = Vec::new();
    let mut rows: Vec<CaseRow> = Vec::new();
    let mut note = None;
    for line in lines {
        let (kw, rest) = line
            .split_once(' ')
            .ok_or_else(|| format!("malformed line {:?}", line))?;
        match kw {
            "case" => tag = Some(rest.parse::<CaseTag>()?),
            "p" => p = Some(parse_u64(rest)?),
            "v" => v = Some(parse_u64(rest)?),
            "index" => index = Some(parse_u64(rest)?),
            "cond" => {
                let (md, rs) = rest
                    .split_once(' ')
                    .ok_or_else(|| format!("malformed cond {:?}", line))?;
                let residues = rs
                    .split(',')
                    .map(parse_u64)
                    .collect::<Result<Vec<_>, _>>()?;
                cond = Some((parse_u64(md)?, residues));
            }
            "key" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 4 {
                    return Err(format!("malformed key {:?}", line));
                }
                let (h, e) = parts[0]
                    .split_once('/')
                    .ok_or_else(|| format!("malformed slope {:?}", parts[0]))?;
                keys.push(KeyRecord {
                    h: parse_u64(h)?,
                    e: parse_u64(e)?,
                    mu: parse_u64(parts[1])? as u32,
                    psi: DeltaPoly::parse('Y', parts[2])?,
                    phi: DeltaPoly::parse('x', parts[3])?,
                });
            }
            "row" => {
                let (k, poly) = rest
                    .split_once(' ')
                    .ok_or_else(|| format!("malformed row {:?}", line))?;
                rows.push(CaseRow { k: parse_u64(k)?, numer: DeltaPoly::parse('t', poly)? });
            }
            "note" => note = Some(rest.to_string()),
            _ => return Err(format!("unknown keyword {:?}", kw)),
        }
    }
    let tag = tag.ok_or("record missing case line")?;
    let rec = CaseRecord {
        tag,
        p: p.ok_or("record missing p")?,
        v: v.ok_or("record missing v")?,
        cond_modulus: cond.as_ref().ok_or("record missing cond")?.0,
        cond_residues: cond.unwrap().1,
        index: index.ok_or("record missing index")?,
        keys,
        rows,
        note,
    };
    validate_record(&rec)?;
    Ok(rec)
}

fn validate_record(rec: &CaseRecord) -> Result<(), String> {
    let tag = rec.tag;
    if !tag.is_wild() {
        return Err(format!("case {} does not belong in the tables", tag));
    }
    if rec.rows.len() != 12 {
        return Err(format!("case {} must have 12 rows", tag));
    }
    if rec.keys.is_empty() {
        return Err(format!("case {} must have key data", tag));
    }
    let ksum: u64 = rec.rows.iter().map(|r| r.k).sum();
    if ksum != rec.index {
        return Err(format!("case {}: row exponents sum to {}, not {}", tag, ksum, rec.index));
    }
    if rec.rows.windows(2).any(|w| w[0].k > w[1].k) {
        return Err(format!("case {}: row exponents must ascend", tag));
    }
    for (i, row) in rec.rows.iter().enumerate() {
        for delta in [1, -1] {
            let q = row.numer.substitute(delta);
            if q.degree() != Some(i) || !q.is_monic() {
                return Err(format!("case {}: row {} is not monic of degree {}", tag, i, i));
            }
        }
    }
    for key in &rec.keys {
        let psi_deg = key
            .psi
            .substitute(1)
            .degree()
            .ok_or_else(|| format!("case {}: empty psi", tag))?;
        let phi_deg = key
            .phi
            .substitute(1)
            .degree()
            .ok_or_else(|| format!("case {}: empty phi", tag))?;
        if phi_deg != key.e as usize * psi_deg {
            return Err(format!("case {}: key degree mismatch", tag));
        }
    }
    Ok(())
}

/// Canonical serialization of records, the inverse of the parser.
pub fn serialize_case_tables(records: &[CaseRecord]) -> String {
    use std::fmt::Write;

    let mut out = String::new();
    for (i, rec) in records.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        writeln!(out, "case {}", rec.tag).unwrap();
        writeln!(out, "p {}", rec.p).unwrap();
        writeln!(out, "v {}", rec.v).unwrap();
        let residues: Vec<String> =
            rec.cond_residues.iter().map(|r| r.to_string()).collect();
        writeln!(out, "cond {} {}", rec.cond_modulus, residues.join(",")).unwrap();
        writeln!(out, "index {}", rec.index).unwrap();
        for key in &rec.keys {
            writeln!(
                out,
                "key {}/{} {} {} {}",
                key.h,
                key.e,
                key.mu,
                key.psi.serialize('Y'),
                key.phi.serialize('x')
            )
            .unwrap();
        }
        for row in &rec.rows {
            writeln!(out, "row {} {}", row.k, row.numer.serialize('t')).unwrap();
        }
        if let Some(note) = &rec.note {
            writeln!(out, "note {}", note).unwrap();
        }
    }
    out
}

// ---- Classification ----

fn residue_u64(n: &BigInt, modulus: u64) -> u64 {
    n.mod_floor(&BigInt::from(modulus))
        .to_u64()
        .expect("residue fits")
}

fn delta_of(unit: &BigInt) -> i8 {
    if residue_u64(unit, 3) == 1 {
        1
    } else {
        -1
    }
}

fn validate_radicand(m: &BigInt) -> Result<(), Pure12Error> {
    if !arith::is_12th_power_free(m)? {
        return Err(Pure12Error::NotTwelfthPowerFree);
    }
    if !arith::is_irreducible_x12_minus_m(m)? {
        return Err(Pure12Error::Reducible);
    }
    Ok(())
}

fn find_wild_record(p: u64, v: u64, unit: &BigInt) -> &'static CaseRecord {
    for rec in case_records() {
        if rec.p == p
            && rec.v == v
            && rec.cond_residues.contains(&residue_u64(unit, rec.cond_modulus))
        {
            return rec;
        }
    }
    panic!("case conditions must be exhaustive for p = {} and v = {}", p, v);
}

/// Decide which case governs the prime p for x^12 - m.
pub fn classify(m: &BigInt, p: u64) -> Result<CaseLabel, Pure12Error> {
    validate_radicand(m)?;
    if !arith::is_prime_u64(p) {
        return Err(Pure12Error::NotPrime(p));
    }
    let v = arith::vp(m, p)?;
    if v == 0 {
        let tag = if p == 2 {
            match residue_u64(m, 8) {
                1 => CaseTag::T32a,
                5 => CaseTag::T32b,
                _ => CaseTag::T32c,
            }
        } else if p == 3 {
            let r = residue_u64(m, 9);
            if r * r % 9 == 1 {
                CaseTag::T23a
            } else {
                CaseTag::T23b
            }
        } else {
            CaseTag::T4
        };
        let delta = if p == 3 { Some(delta_of(m)) } else { None };
        return Ok(CaseLabel { p, tag, delta });
    }
    if p == 2 && v % 2 == 0 {
        let unit = arith::unit_part(m, 2)?;
        let rec = find_wild_record(2, v, &unit);
        return Ok(CaseLabel { p, tag: rec.tag, delta: None });
    }
    if p == 3 && v % 3 == 0 {
        let unit = arith::unit_part(m, 3)?;
        let rec = find_wild_record(3, v, &unit);
        return Ok(CaseLabel { p, tag: rec.tag, delta: Some(delta_of(&unit)) });
    }
    if (p == 5 || p == 7 || p == 11) && v % p == 0 {
        return Err(Pure12Error::NotCovered(p));
    }
    Ok(CaseLabel { p, tag: CaseTag::T1, delta: None })
}

/// v_p of the index [O_K : Z[theta]].
pub fn vp_index(m: &BigInt, p: u64) -> Result<u64, Pure12Error> {
    let label = classify(m, p)?;
    Ok(match label.tag {
        t if t.is_wild() => record_for(t).expect("wild case has a record").index,
        CaseTag::T1 => {
            let v = arith::vp(m, p)?;
            (11 * (v - 1) + v.gcd(&12) - 1) / 2
        }
        CaseTag::T23a => 4,
        CaseTag::T32a => 9,
        CaseTag::T32b => 6,
        _ => 0,
    })
}

fn prime_power(p: u64, k: u64) -> BigInt {
    BigInt::from(p).pow(k as u32)
}

/// The tabulated or generated p-integral basis for the case of (m, p).
pub fn p_integral_basis(m: &BigInt, p: u64) -> Result<PIntegralBasis, Pure12Error> {
    let label = classify(m, p)?;
    let elements: Vec<ThetaElement> = match label.tag {
        t if t.is_wild() => {
            let rec = record_for(t).expect("wild case has a record");
            let delta = i64::from(label.delta.unwrap_or(1));
            rec.rows
                .iter()
                .map(|row| {
                    ThetaElement::new(row.numer.substitute(delta), prime_power(p, row.k))
                })
                .collect()
        }
        CaseTag::T1 => {
            let v = arith::vp(m, p)?;
            (0..12)
                .map(|i| {
                    ThetaElement::new(IntPoly::x_pow(i), prime_power(p, i as u64 * v / 12))
                })
                .collect()
        }
        CaseTag::T23a => {
            let mut out: Vec<ThetaElement> = (0..8).map(ThetaElement::theta_pow).collect();
            for j in 0..4 {
                let mut c = vec![BigInt::zero(); 9 + j];
                c[j] = BigInt::one();
                c[4 + j] = m.clone();
                c[8 + j] = BigInt::one();
                out.push(ThetaElement::new(IntPoly::new(c), BigInt::from(3)));
            }
            out
        }
        CaseTag::T32a => {
            let mut out: Vec<ThetaElement> = (0..6).map(ThetaElement::theta_pow).collect();
            for j in 0..3 {
                out.push(half_unit_diff(j));
            }
            for j in 0..3 {
                out.push(quarter_unit_sum(j));
            }
            out
        }
        CaseTag::T32b => {
            let mut out: Vec<ThetaElement> = (0..6).map(ThetaElement::theta_pow).collect();
            for j in 0..6 {
                out.push(half_unit_diff(j));
            }
            out
        }
        _ => (0..12).map(ThetaElement::theta_pow).collect(),
    };
    PIntegralBasis::new(p, elements)
}

/// (theta^(6+j) - theta^j) / 2.
fn half_unit_diff(j: usize) -> ThetaElement {
    let numer = IntPoly::x_pow(6 + j).sub(&IntPoly::x_pow(j));
    ThetaElement::new(numer, BigInt::from(2))
}

/// (theta^(9+j) + theta^(6+j) + theta^(3+j) + theta^j) / 4.
fn quarter_unit_sum(j: usize) -> ThetaElement {
    let numer = IntPoly::x_pow(9 + j)
        .add(&IntPoly::x_pow(6 + j))
        .add(&IntPoly::x_pow(3 + j))
        .add(&IntPoly::x_pow(j));
    ThetaElement::new(numer, BigInt::from(4))
}

/// Key polynomial data of a tabulated wild case, with the sign d applied.
pub fn key_data_for_case(label: &CaseLabel) -> Result<Vec<Type2Data>, Pure12Error> {
    let rec = record_for(label.tag).ok_or(Pure12Error::NoSecondOrderData(label.tag))?;
    debug_assert_eq!(rec.p, label.p);
    let delta = i64::from(label.delta.unwrap_or(1));
    Ok(rec
        .keys
        .iter()
        .map(|key| Type2Data {
            p: rec.p,
            h: key.h,
            e: key.e,
            psi: key.psi.substitute(delta).reduce_mod(rec.p),
            mu: key.mu,
            phi: key.phi.substitute(delta),
        })
        .collect())
}

// ---- Discriminants ----

/// Discriminant of x^12 - m: -2^24 3^12 m^11, in factored form.
pub fn disc_f(m: &BigInt) -> Result<FactoredInt, Pure12Error> {
    validate_radicand(m)?;
    let fm = arith::factor(m)?;
    let mut out = FactoredInt::one();
    out.sign = -fm.sign;
    out.mul_prime_power(2, 24);
    out.mul_prime_power(3, 12);
    for p in fm.primes() {
        out.mul_prime_power(p, 11 * fm.exponent(p));
    }
    Ok(out)
}

/// Field discriminant d_K = disc(f) / index^2, in factored form.
pub fn field_discriminant(m: &BigInt) -> Result<FactoredInt, Pure12Error> {
    let mut d = disc_f(m)?;
    let fm = arith::factor(m)?;
    let mut primes: BTreeSet<u64> = fm.primes().collect();
    primes.insert(2);
    primes.insert(3);
    for p in primes {
        let ind = vp_index(m, p)?;
        d.div_prime_power(p, 2 * ind as u32);
    }
    Ok(d)
}

/// Whether O_K = Z[theta]. Requires m squarefree together with the two
/// congruence conditions; any repeated prime factor already forces a
/// nontrivial index.
pub fn is_power_basis_monogenic(m: &BigInt) -> Result<bool, Pure12Error> {
    validate_radicand(m)?;
    let fm = arith::factor(m)?;
    if fm.factors.values().any(|&e| e >= 2) {
        return Ok(false);
    }
    let two_ok = m.is_even() || residue_u64(m, 4) == 3;
    let r9 = residue_u64(m, 9);
    let three_ok = r9 % 3 == 0 || r9 * r9 % 9 != 1;
    Ok(two_ok && three_ok)
}

// ---- Tests ----

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montes2;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn te(coeffs: &[i64], denom: i64) -> ThetaElement {
        ThetaElement::new(IntPoly::from_i64(coeffs), big(denom))
    }

    /// One sample radicand per tabulated case.
    const SAMPLES: &[(CaseTag, i64, u64)] = &[
        (CaseTag::A1, 20, 2),
        (CaseTag::A2, 12, 2),
        (CaseTag::A3, 28, 2),
        (CaseTag::A4, 48, 2),
        (CaseTag::A5, 80, 2),
        (CaseTag::A6, 272, 2),
        (CaseTag::A7, 320, 2),
        (CaseTag::A8, 192, 2),
        (CaseTag::A9, 448, 2),
        (CaseTag::A10, 4352, 2),
        (CaseTag::A11, 1280, 2),
        (CaseTag::A12, 768, 2),
        (CaseTag::A13, 17408, 2),
        (CaseTag::A14, 3072, 2),
        (CaseTag::A15, 7168, 2),
        (CaseTag::B1, 270, 3),
        (CaseTag::B2, 54, 3),
        (CaseTag::B3, 7290, 3),
        (CaseTag::B4, 9477, 3),
        (CaseTag::B5, 12393, 3),
        (CaseTag::B6, 1458, 3),
        (CaseTag::B7, 196830, 3),
        (CaseTag::B8, 39366, 3),
    ];

    /// Samples exercising the opposite sign d and a negative radicand.
    const EXTRA_SAMPLES: &[(CaseTag, i64, u64)] = &[
        (CaseTag::A2, -20, 2),
        (CaseTag::B1, 459, 3),
        (CaseTag::B2, 108, 3),
        (CaseTag::B7, 334611, 3),
        (CaseTag::B8, 78732, 3),
    ];

    #[test]
    fn tables_load_and_round_trip() {
        let records = case_records();
        assert_eq!(records.len(), 23);
        let body = case_tables_source()
            .split_once("\n\n")
            .expect("header is separated by a blank line")
            .1;
        assert_eq!(serialize_case_tables(records), body);
    }

    #[test]
    fn records_are_structurally_sound() {
        for rec in case_records() {
            assert_eq!(rec.rows.len(), 12);
            assert_eq!(rec.rows.iter().map(|r| r.k).sum::<u64>(), rec.index);
            let expected_slope = {
                let g = rec.v.gcd(&12);
                (rec.v / g, 12 / g)
            };
            for key in &rec.keys {
                assert_eq!((key.h, key.e), expected_slope, "case {}", rec.tag);
                for delta in [1i64, -1] {
                    if delta == -1 && !key.psi.uses_delta() && !key.phi.uses_delta() {
                        continue;
                    }
                    let t = Type2Data {
                        p: rec.p,
                        h: key.h,
                        e: key.e,
                        psi: key.psi.substitute(delta).reduce_mod(rec.p),
                        mu: key.mu,
                        phi: key.phi.substitute(delta),
                    };
                    assert!(
                        montes2::validate_key_polynomial(&t),
                        "case {} key with d = {}",
                        rec.tag,
                        delta
                    );
                }
            }
        }
    }

    #[test]
    fn delta_poly_parse_rejects_junk() {
        assert!(DeltaPoly::parse('t', "t^").is_err());
        assert!(DeltaPoly::parse('t', "t 2").is_err());
        assert!(DeltaPoly::parse('t', "2t^3 4").is_err());
        assert!(DeltaPoly::parse('t', "t^3++1").is_err());
        assert!(DeltaPoly::parse('t', "x^3").is_err());
    }

    #[test]
    fn classify_matches_samples() {
        for &(tag, m, p) in SAMPLES.iter().chain(EXTRA_SAMPLES) {
            let label = classify(&big(m), p).unwrap();
            assert_eq!(label.tag, tag, "m = {}", m);
            assert_eq!(label.p, p);
        }
        assert_eq!(classify(&big(270), 3).unwrap().delta, Some(1));
        assert_eq!(classify(&big(459), 3).unwrap().delta, Some(-1));
    }

    #[test]
    fn classify_tame_and_unramified() {
        assert_eq!(classify(&big(17), 2).unwrap().tag, CaseTag::T32a);
        assert_eq!(classify(&big(29), 2).unwrap().tag, CaseTag::T32b);
        assert_eq!(classify(&big(7), 2).unwrap().tag, CaseTag::T32c);
        assert_eq!(classify(&big(10), 3).unwrap(), CaseLabel {
            p: 3,
            tag: CaseTag::T23a,
            delta: Some(1),
        });
        assert_eq!(classify(&big(17), 3).unwrap(), CaseLabel {
            p: 3,
            tag: CaseTag::T23a,
            delta: Some(-1),
        });
        assert_eq!(classify(&big(5), 3).unwrap(), CaseLabel {
            p: 3,
            tag: CaseTag::T23b,
            delta: Some(-1),
        });
        assert_eq!(classify(&big(60), 5).unwrap().tag, CaseTag::T1);
        assert_eq!(classify(&big(96), 2).unwrap().tag, CaseTag::T1);
        assert_eq!(classify(&big(20), 7).unwrap().tag, CaseTag::T4);
        assert_eq!(classify(&big(6250), 5), Err(Pure12Error::NotCovered(5)));
        assert_eq!(classify(&big(823543), 7), Err(Pure12Error::NotCovered(7)));
        assert_eq!(classify(&big(20), 6), Err(Pure12Error::NotPrime(6)));
        assert_eq!(
            classify(&big(4096), 2),
            Err(Pure12Error::NotTwelfthPowerFree)
        );
        assert_eq!(classify(&big(16), 2), Err(Pure12Error::Reducible));
    }

    #[test]
    fn vp_index_anchors() {
        assert_eq!(vp_index(&big(60), 2), Ok(15));
        assert_eq!(vp_index(&big(2352), 2), Ok(21));
        assert_eq!(vp_index(&big(2352), 3), Ok(0));
        assert_eq!(vp_index(&big(2352), 7), Ok(6));
        assert_eq!(vp_index(&big(17), 2), Ok(9));
        assert_eq!(vp_index(&big(29), 2), Ok(6));
        assert_eq!(vp_index(&big(10), 3), Ok(4));
        assert_eq!(vp_index(&big(96), 2), Ok(22));
        assert_eq!(vp_index(&big(6250), 2), Ok(0));
        assert_eq!(vp_index(&big(20), 11), Ok(0));
    }

    #[test]
    fn p_basis_anchors() {
        let b = p_integral_basis(&big(20), 2).unwrap();
        assert_eq!(b.vp_index(), 12);
        assert_eq!(*b.element(6), te(&[-2, 0, 0, 0, 0, 0, 1], 4));
        assert_eq!(*b.element(11), te(&[0, 0, 0, 0, 0, -2, 0, 0, 0, 0, 0, 1], 4));

        let b = p_integral_basis(&big(17), 2).unwrap();
        assert_eq!(b.vp_index(), 9);
        assert_eq!(*b.element(6), te(&[-1, 0, 0, 0, 0, 0, 1], 2));
        assert_eq!(*b.element(9), te(&[1, 0, 0, 1, 0, 0, 1, 0, 0, 1], 4));

        let b = p_integral_basis(&big(10), 3).unwrap();
        assert_eq!(b.vp_index(), 4);
        assert_eq!(*b.element(8), te(&[1, 0, 0, 0, 10, 0, 0, 0, 1], 3));

        let b = p_integral_basis(&big(2352), 7).unwrap();
        assert_eq!((0..12).map(|i| b.k(i)).collect::<Vec<_>>(), vec![
            0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1
        ]);

        let b = p_integral_basis(&big(7), 2).unwrap();
        assert_eq!(b.vp_index(), 0);
    }

    #[test]
    fn p_basis_membership() {
        let b = p_integral_basis(&big(20), 2).unwrap();
        assert!(b.contains(&te(&[-2, 0, 0, 0, 0, 0, 1], 4)));
        // theta^6 + 2 = (theta^6 - 2) + 4.
        assert!(b.contains(&te(&[2, 0, 0, 0, 0, 0, 1], 4)));
        assert!(!b.contains(&te(&[0, 0, 0, 0, 0, 0, 1], 4)));
        assert!(!b.contains(&te(&[1], 2)));
        // Odd denominators are units p-locally.
        assert!(b.contains(&te(&[3], 3)));
        assert!(b.spans_same(&b));
    }

    #[test]
    fn p_basis_all_cases_validate() {
        for &(tag, m, p) in SAMPLES.iter().chain(EXTRA_SAMPLES) {
            let b = p_integral_basis(&big(m), p).unwrap();
            let rec = record_for(tag).unwrap();
            assert_eq!(b.vp_index(), rec.index, "case {} at m = {}", tag, m);
        }
    }

    #[test]
    fn montes_index_matches_every_table_case() {
        for &(tag, m, p) in SAMPLES.iter().chain(EXTRA_SAMPLES) {
            let label = classify(&big(m), p).unwrap();
            assert_eq!(label.tag, tag);
            let keys = key_data_for_case(&label).unwrap();
            let f = IntPoly::x12_minus_m(&big(m));
            let got = montes2::montes_index(&f, p, &keys).unwrap();
            let want = record_for(tag).unwrap().index;
            assert_eq!(got, want, "case {} at m = {}", tag, m);
        }
    }

    #[test]
    fn key_data_anchors() {
        let label = classify(&big(20), 2).unwrap();
        let keys = key_data_for_case(&label).unwrap();
        assert_eq!(keys.len(), 1);
        assert_eq!((keys[0].h, keys[0].e, keys[0].mu), (1, 6, 2));
        assert_eq!(keys[0].phi, IntPoly::from_i64(&[2, 0, 0, 0, 0, 0, 1]));

        let label = classify(&big(448), 2).unwrap();
        assert_eq!(key_data_for_case(&label).unwrap().len(), 2);

        let label = classify(&big(459), 3).unwrap();
        let keys = key_data_for_case(&label).unwrap();
        assert_eq!(keys[0].phi, IntPoly::from_i64(&[3, 0, 0, 0, 1]));

        let label = classify(&big(60), 5).unwrap();
        assert_eq!(
            key_data_for_case(&label),
            Err(Pure12Error::NoSecondOrderData(CaseTag::T1))
        );
    }

    #[test]
    fn disc_f_anchors() {
        let d = disc_f(&big(2352)).unwrap();
        assert_eq!(d.sign, -1);
        assert_eq!(d.exponent(2), 68);
        assert_eq!(d.exponent(3), 23);
        assert_eq!(d.exponent(7), 22);

        let d = disc_f(&big(60)).unwrap();
        assert_eq!(d.sign, -1);
        assert_eq!(d.exponent(2), 46);
        assert_eq!(d.exponent(3), 23);
        assert_eq!(d.exponent(5), 11);

        let d = disc_f(&big(-20)).unwrap();
        assert_eq!(d.sign, 1);
        assert_eq!(d.exponent(2), 46);
        assert_eq!(d.exponent(5), 11);
    }

    #[test]
    fn field_discriminant_anchors() {
        let d = field_discriminant(&big(60)).unwrap();
        assert_eq!(d.sign, -1);
        assert_eq!(d.exponent(2), 16);
        assert_eq!(d.exponent(3), 23);
        assert_eq!(d.exponent(5), 11);

        let d = field_discriminant(&big(2352)).unwrap();
        assert_eq!(d.sign, -1);
        assert_eq!(d.exponent(2), 26);
        assert_eq!(d.exponent(3), 23);
        assert_eq!(d.exponent(7), 10);

        assert_eq!(field_discriminant(&big(6250)), Err(Pure12Error::NotCovered(5)));
    }

    #[test]
    fn monogenic_anchors() {
        assert_eq!(is_power_basis_monogenic(&big(6)), Ok(true));
        assert_eq!(is_power_basis_monogenic(&big(7)), Ok(true));
        assert_eq!(is_power_basis_monogenic(&big(-2)), Ok(true));
        assert_eq!(is_power_basis_monogenic(&big(17)), Ok(false));
        assert_eq!(is_power_basis_monogenic(&big(10)), Ok(false));
        assert_eq!(is_power_basis_monogenic(&big(12)), Ok(false));
    }

    #[test]
    fn theta_element_normalizes() {
        assert_eq!(te(&[-2, 0, 0, 0, 0, 0, 1], 4).to_string(), "(t^6-2)/4");
        assert_eq!(te(&[0, 0, 0, 1], 1).to_string(), "t^3");
        assert_eq!(te(&[1], 1).to_string(), "1");
        assert_eq!(te(&[2, 4], 6), te(&[1, 2], 3));
        let e = ThetaElement::new(IntPoly::from_i64(&[1]), big(-2));
        assert_eq!(e, te(&[-1], 2));
    }

    #[test]
    fn case_tag_names_round_trip() {
        for tag in CaseTag::ALL {
            assert_eq!(tag.name().parse::<CaseTag>(), Ok(tag));
        }
        assert!("A16".parse::<CaseTag>().is_err());
        assert_eq!(CaseTag::T23a.to_string(), "T2-3a");
        assert_eq!(CaseTag::T32c.to_string(), "T3-2c");
    }
}
