//! Field reports: the JSON-facing aggregate of every per-prime result.
//!
//! A report is built only for validated radicands, so `irreducible` is
//! always true in produced reports. Big integers are serialized as decimal
//! strings; factored integers as {"sign": +-1, "factors": {prime: exp}};
//! basis elements as {"num": [12 coefficient strings], "den": string}.
//! Serialization round-trips: parsing a serialized report reproduces it.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use duodecic::arith::{self, ArithError, FactoredInt, IntPoly};
use duodecic::combine;
use duodecic::pure12::{self, PIntegralBasis, Pure12Error, ThetaElement};
use duodecic::verify::{self, VerifyError};

use crate::CliError;

// ---- JSON mirror types ----

/// Factored integer as {"sign": +-1, "factors": {"2": 24, ...}}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactoredJson {
    pub sign: i8,
    pub factors: BTreeMap<u64, u32>,
}

impl FactoredJson {
    pub fn from_factored(f: &FactoredInt) -> FactoredJson {
        FactoredJson { sign: f.sign, factors: f.factors.clone() }
    }

    pub fn to_factored(&self) -> FactoredInt {
        let mut out = FactoredInt::one();
        out.sign = self.sign;
        for (&p, &e) in &self.factors {
            out.mul_prime_power(p, e);
        }
        out
    }
}

/// Basis element as {"num": [c_0, ..., c_11], "den": d}, all decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementJson {
    pub num: Vec<String>,
    pub den: String,
}

impl ElementJson {
    pub fn from_element(e: &ThetaElement) -> ElementJson {
        let num = (0..12).map(|i| e.numer().coeff(i).to_string()).collect();
        ElementJson { num, den: e.denom().to_string() }
    }

    pub fn to_element(&self) -> Result<ThetaElement, CliError> {
        if self.num.len() != 12 {
            return Err(CliError::Invalid(format!(
                "element must list 12 coefficients, got {}",
                self.num.len()
            )));
        }
        let mut coeffs = Vec::with_capacity(12);
        for s in &self.num {
            coeffs.push(parse_big(s)?);
        }
        let den = parse_big(&self.den)?;
        if !den.is_positive() {
            return Err(CliError::Invalid(format!("denominator {} must be positive", den)));
        }
        Ok(ThetaElement::new(IntPoly::new(coeffs), den))
    }
}

fn parse_big(s: &str) -> Result<BigInt, CliError> {
    BigInt::from_str(s)
        .map_err(|_| CliError::Invalid(format!("bad integer literal {:?}", s)))
}

/// Outcome for a single prime: case tag (or "oracle"), index valuation,
/// triangular basis, and whether the independent oracle confirmed it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeReport {
    pub case: String,
    pub vp: u64,
    pub basis: Vec<ElementJson>,
    pub verified: bool,
}

/// Full report for one radicand; the batch output is an array of these.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldReport {
    pub m: i64,
    pub irreducible: bool,
    #[serde(rename = "Df")]
    pub df: FactoredJson,
    pub per_prime: BTreeMap<u64, PrimeReport>,
    #[serde(rename = "dK")]
    pub dk: FactoredJson,
    pub global_basis: Vec<ElementJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monogenic: Option<bool>,
    pub warnings: Vec<String>,
}

// ---- Error mapping ----

fn internal<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Failure(format!("internal error: {}", e))
}

fn from_arith(m: &BigInt, e: ArithError) -> CliError {
    match e {
        ArithError::RadicandTooSmall => {
            CliError::Invalid(format!("m = {} is out of range: |m| must be at least 2", m))
        }
        other => internal(other),
    }
}

fn from_pure12(m: &BigInt, e: Pure12Error) -> CliError {
    match e {
        Pure12Error::NotTwelfthPowerFree => {
            CliError::Invalid(format!("m = {} is not 12th-power-free", m))
        }
        Pure12Error::Reducible => {
            CliError::Invalid(format!("x^12 - m is reducible for m = {}", m))
        }
        Pure12Error::NotPrime(p) => CliError::Invalid(format!("p = {} is not prime", p)),
        Pure12Error::Arith(e) => from_arith(m, e),
        other => internal(other),
    }
}

fn from_verify(m: &BigInt, e: VerifyError) -> CliError {
    match e {
        VerifyError::InvalidRadicand => {
            CliError::Invalid(format!("m = {} is not a valid radicand", m))
        }
        VerifyError::NotPrime(p) => CliError::Invalid(format!("p = {} is not prime", p)),
        VerifyError::Arith(e) => from_arith(m, e),
        other => internal(other),
    }
}

// ---- Input validation ----

/// Rejects m unless x^12 - m is irreducible with m 12th-power-free.
pub fn validate_radicand(m: &BigInt) -> Result<(), CliError> {
    if !arith::is_12th_power_free(m).map_err(|e| from_arith(m, e))? {
        return Err(CliError::Invalid(format!("m = {} is not 12th-power-free", m)));
    }
    if !arith::is_irreducible_x12_minus_m(m).map_err(|e| from_arith(m, e))? {
        return Err(CliError::Invalid(format!("x^12 - m is reducible for m = {}", m)));
    }
    Ok(())
}

/// The primes dividing 12m, in increasing order.
pub fn relevant_primes(m: &BigInt) -> Result<Vec<u64>, CliError> {
    let fm = arith::factor(m).map_err(|e| from_arith(m, e))?;
    let mut primes: Vec<u64> = fm.primes().collect();
    for p in [2u64, 3] {
        if !primes.contains(&p) {
            primes.push(p);
        }
    }
    primes.sort_unstable();
    Ok(primes)
}

// ---- Per-prime assembly ----

/// Basis and provenance for one prime: from the case tables when they
/// apply, otherwise from the round-2 oracle (`oracle` set).
pub struct PrimeData {
    pub p: u64,
    pub case: String,
    pub basis: PIntegralBasis,
    pub oracle: bool,
    pub note: Option<String>,
}

pub fn prime_data(m: &BigInt, p: u64) -> Result<PrimeData, CliError> {
    match pure12::classify(m, p) {
        Ok(label) => {
            let basis = pure12::p_integral_basis(m, p).map_err(|e| from_pure12(m, e))?;
            let note = pure12::record_for(label.tag).and_then(|r| r.note.clone());
            Ok(PrimeData {
                p,
                case: label.tag.name().to_string(),
                basis,
                oracle: false,
                note,
            })
        }
        Err(Pure12Error::NotCovered(_)) => {
            let basis = verify::round2_p_basis(m, p).map_err(|e| from_verify(m, e))?;
            Ok(PrimeData { p, case: "oracle".to_string(), basis, oracle: true, note: None })
        }
        Err(e) => Err(from_pure12(m, e)),
    }
}

/// Warning lines for a prime's provenance, shared by all subcommands.
pub fn prime_warnings(data: &PrimeData) -> Vec<String> {
    let mut out = Vec::new();
    if data.oracle {
        out.push(format!(
            "p={}: outside the case tables; index {} from the round-2 oracle",
            data.p,
            data.basis.vp_index()
        ));
    }
    if let Some(note) = &data.note {
        out.push(format!("p={}: case {}: {}", data.p, data.case, note));
    }
    out
}

// ---- Report assembly ----

/// Builds the full report for m: every prime dividing 12m, the CRT global
/// basis, both discriminants, and the monogenity flag for squarefree m.
pub fn build_report(m: i64) -> Result<FieldReport, CliError> {
    let mb = BigInt::from(m);
    validate_radicand(&mb)?;

    let mut per_prime = BTreeMap::new();
    let mut warnings = Vec::new();
    let mut bases = Vec::new();
    for p in relevant_primes(&mb)? {
        let data = prime_data(&mb, p)?;
        warnings.extend(prime_warnings(&data));
        let checked = verify::verify_p_basis(&mb, p, &data.basis)
            .map_err(|e| from_verify(&mb, e))?;
        per_prime.insert(
            p,
            PrimeReport {
                case: data.case,
                vp: data.basis.vp_index(),
                basis: data.basis.elements().iter().map(ElementJson::from_element).collect(),
                verified: checked.all_pass(),
            },
        );
        bases.push(data.basis);
    }

    let global = combine::global_basis(&bases).map_err(internal)?;
    let df = pure12::disc_f(&mb).map_err(|e| from_pure12(&mb, e))?;
    let mut dk = df.clone();
    for (&p, pr) in &per_prime {
        dk.div_prime_power(p, 2 * pr.vp as u32);
    }

    let fm = arith::factor(&mb).map_err(|e| from_arith(&mb, e))?;
    let squarefree = fm.factors.values().all(|&e| e == 1);
    let monogenic = if squarefree {
        Some(pure12::is_power_basis_monogenic(&mb).map_err(|e| from_pure12(&mb, e))?)
    } else {
        None
    };

    Ok(FieldReport {
        m,
        irreducible: true,
        df: FactoredJson::from_factored(&df),
        per_prime,
        dk: FactoredJson::from_factored(&dk),
        global_basis: global.elements().iter().map(ElementJson::from_element).collect(),
        monogenic,
        warnings,
    })
}
