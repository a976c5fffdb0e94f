//! duodecic: exact index, basis, and discriminant computations for the
//! pure duodecic fields Q(m^(1/12)).
//!
//! Subcommands: index (per-prime index valuations), basis (p-integral or
//! global integral basis), disc (both discriminants and the index), verify
//! (cross-check all engines; nonzero exit on failure), table (regenerate
//! the shipped case tables), batch (JSON reports for a file of radicands).
//!
//! Exit codes: 0 success, 1 failed verification check, 2 rejected input.
//! DUODECIC_JOBS caps the batch worker count. No randomness anywhere.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde_json::json;

use duodecic::arith::{FactoredInt, IntPoly};
use duodecic::combine;
use duodecic::montes2;
use duodecic::newton;
use duodecic::pure12::{self, PIntegralBasis};
use duodecic::verify;

use duodecic_cli::render;
use duodecic_cli::report::{self, ElementJson, FactoredJson};
use duodecic_cli::CliError;

// ---- Argument surface ----

#[derive(Parser)]
#[command(
    name = "duodecic",
    version,
    about = "Exact index and integral basis computations for Q(m^(1/12))"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Latex,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Latex,
    Markdown,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print v_p of the index [O_K : Z[theta]] for one or all primes p | 12m.
    Index {
        /// Radicand; must be 12th-power-free with x^12 - m irreducible.
        #[arg(long, allow_negative_numbers = true)]
        m: i64,
        /// Restrict to a single prime.
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print a p-integral basis or the global integral basis.
    Basis {
        #[arg(long, allow_negative_numbers = true)]
        m: i64,
        /// Prime for a p-integral basis; exclusive with --global.
        #[arg(long)]
        p: Option<u64>,
        /// Combine all primes into the global integral basis.
        #[arg(long)]
        global: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print disc(x^12 - m), the field discriminant, and the index, factored.
    Disc {
        #[arg(long, allow_negative_numbers = true)]
        m: i64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Cross-check the table, polygon, and round-2 engines and every basis.
    Verify {
        #[arg(long, allow_negative_numbers = true)]
        m: i64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Regenerate case table 1 (p = 2) or 2 (p = 3) from the shipped data.
    Table {
        /// 1 for the p = 2 table, 2 for the p = 3 table.
        #[arg(long)]
        which: u32,
        #[arg(long, value_enum, default_value = "markdown")]
        format: TableFormat,
    },
    /// Build JSON reports for a file of radicands, one integer per line.
    Batch {
        /// Input file; blank lines and lines starting with # are skipped.
        #[arg(long)]
        input: PathBuf,
        /// Destination for the JSON array; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cmd: Cmd) -> Result<(), CliError> {
    match cmd {
        Cmd::Index { m, p, format } => cmd_index(m, p, format),
        Cmd::Basis { m, p, global, format } => cmd_basis(m, p, global, format),
        Cmd::Disc { m, format } => cmd_disc(m, format),
        Cmd::Verify { m, format } => cmd_verify(m, format),
        Cmd::Table { which, format } => cmd_table(which, format),
        Cmd::Batch { input, output } => cmd_batch(&input, output.as_deref()),
    }
}

fn no_latex(format: Format, what: &str) -> Result<(), CliError> {
    if format == Format::Latex {
        return Err(CliError::Invalid(format!(
            "latex output is not available for {}; use text or json",
            what
        )));
    }
    Ok(())
}

fn emit_warnings(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {}", w);
    }
}

// ---- index ----

fn cmd_index(m: i64, p: Option<u64>, format: Format) -> Result<(), CliError> {
    no_latex(format, "index")?;
    let mb = BigInt::from(m);
    report::validate_radicand(&mb)?;

    if let Some(p) = p {
        let data = report::prime_data(&mb, p)?;
        let warnings = report::prime_warnings(&data);
        emit_warnings(&warnings);
        match format {
            Format::Text => {
                if data.oracle {
                    println!("{} (oracle)", data.basis.vp_index());
                } else {
                    println!("{}", data.basis.vp_index());
                }
            }
            Format::Json => {
                let value = json!({
                    "m": m,
                    "p": p,
                    "vp": data.basis.vp_index(),
                    "source": if data.oracle { "oracle" } else { "table" },
                    "warnings": warnings,
                });
                println!("{}", value);
            }
            Format::Latex => unreachable!(),
        }
        return Ok(());
    }

    let mut warnings = Vec::new();
    let mut rows = Vec::new();
    for p in report::relevant_primes(&mb)? {
        let data = report::prime_data(&mb, p)?;
        warnings.extend(report::prime_warnings(&data));
        rows.push((p, data.basis.vp_index(), data.oracle));
    }
    emit_warnings(&warnings);
    match format {
        Format::Text => {
            for (p, vp, oracle) in &rows {
                if *oracle {
                    println!("{}: {} (oracle)", p, vp);
                } else {
                    println!("{}: {}", p, vp);
                }
            }
        }
        Format::Json => {
            let index: BTreeMap<u64, u64> = rows.iter().map(|&(p, vp, _)| (p, vp)).collect();
            let oracle: Vec<u64> =
                rows.iter().filter(|r| r.2).map(|&(p, _, _)| p).collect();
            let value = json!({
                "m": m,
                "index": index,
                "oracle_primes": oracle,
                "warnings": warnings,
            });
            println!("{}", value);
        }
        Format::Latex => unreachable!(),
    }
    Ok(())
}

// ---- basis ----

fn cmd_basis(m: i64, p: Option<u64>, global: bool, format: Format) -> Result<(), CliError> {
    let mb = BigInt::from(m);
    report::validate_radicand(&mb)?;

    let (elements, scope) = match (p, global) {
        (Some(_), true) => {
            return Err(CliError::Invalid(
                "--p and --global are mutually exclusive".to_string(),
            ))
        }
        (None, false) => {
            return Err(CliError::Invalid(
                "basis requires either --p <prime> or --global".to_string(),
            ))
        }
        (Some(p), false) => {
            let data = report::prime_data(&mb, p)?;
            emit_warnings(&report::prime_warnings(&data));
            (data.basis.into_elements(), json!({ "p": p, "case": data.case }))
        }
        (None, true) => {
            let (bases, warnings) = all_prime_bases(&mb)?;
            emit_warnings(&warnings);
            let global = combine::global_basis(&bases)
                .map_err(|e| CliError::Failure(format!("internal error: {}", e)))?;
            (global.elements().to_vec(), json!({ "global": true }))
        }
    };

    match format {
        Format::Text => print!("{}", render::basis_lines(&elements, false)),
        Format::Latex => print!("{}", render::basis_lines(&elements, true)),
        Format::Json => {
            let rows: Vec<ElementJson> =
                elements.iter().map(ElementJson::from_element).collect();
            let mut value = json!({
                "m": m,
                "elements": serde_json::to_value(rows).expect("serializable"),
            });
            let obj = value.as_object_mut().expect("object");
            for (k, v) in scope.as_object().expect("object") {
                obj.insert(k.clone(), v.clone());
            }
            println!("{}", value);
        }
    }
    Ok(())
}

fn all_prime_bases(mb: &BigInt) -> Result<(Vec<PIntegralBasis>, Vec<String>), CliError> {
    let mut bases = Vec::new();
    let mut warnings = Vec::new();
    for p in report::relevant_primes(mb)? {
        let data = report::prime_data(mb, p)?;
        warnings.extend(report::prime_warnings(&data));
        bases.push(data.basis);
    }
    Ok((bases, warnings))
}

// ---- disc ----

fn cmd_disc(m: i64, format: Format) -> Result<(), CliError> {
    let mb = BigInt::from(m);
    report::validate_radicand(&mb)?;

    let df = pure12::disc_f(&mb)
        .map_err(|e| CliError::Failure(format!("internal error: {}", e)))?;
    let mut dk = df.clone();
    let mut ind = FactoredInt::one();
    let mut warnings = Vec::new();
    for p in report::relevant_primes(&mb)? {
        let data = report::prime_data(&mb, p)?;
        warnings.extend(report::prime_warnings(&data));
        let vp = data.basis.vp_index();
        ind.mul_prime_power(p, vp as u32);
        dk.div_prime_power(p, 2 * vp as u32);
    }
    emit_warnings(&warnings);

    match format {
        Format::Text => {
            println!("D_f = {}", df);
            println!("d_K = {}", dk);
            println!("ind = {}", ind);
        }
        Format::Latex => {
            println!("D_f = ${}$", render::factored_latex(&df));
            println!("d_K = ${}$", render::factored_latex(&dk));
            println!("\\mathrm{{ind}}\\,\\theta = ${}$", render::factored_latex(&ind));
        }
        Format::Json => {
            let value = json!({
                "m": m,
                "Df": serde_json::to_value(FactoredJson::from_factored(&df)).expect("serializable"),
                "dK": serde_json::to_value(FactoredJson::from_factored(&dk)).expect("serializable"),
                "index": serde_json::to_value(FactoredJson::from_factored(&ind)).expect("serializable"),
                "warnings": warnings,
            });
            println!("{}", value);
        }
    }
    Ok(())
}

// ---- verify ----

struct Check {
    name: String,
    pass: bool,
    detail: String,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
        Check { name: name.into(), pass, detail: detail.into() }
    }
}

/// Index of the polygon engine where it applies: the second-order engine
/// for wild keyed cases, Ore's count for the other ramified regular cases.
fn polygon_vp(mb: &BigInt, p: u64) -> Option<u64> {
    let f = IntPoly::x12_minus_m(mb);
    match pure12::classify(mb, p) {
        Ok(label) if label.tag.is_wild() => {
            let keys = pure12::key_data_for_case(&label).ok()?;
            montes2::montes_index(&f, p, &keys).ok()
        }
        _ => {
            let v = duodecic::arith::vp(mb, p).ok()?;
            if v == 0 {
                return None;
            }
            newton::ore_index(&f, p).ok()
        }
    }
}

fn verify_checks(m: i64) -> Result<(Vec<Check>, Vec<String>), CliError> {
    let mb = BigInt::from(m);
    report::validate_radicand(&mb)?;
    let internal = |e: String| CliError::Failure(format!("internal error: {}", e));

    let mut checks = Vec::new();
    let mut warnings = Vec::new();
    let mut bases = Vec::new();
    let mut all_covered = true;
    for p in report::relevant_primes(&mb)? {
        let data = report::prime_data(&mb, p)?;
        warnings.extend(report::prime_warnings(&data));
        if data.oracle {
            all_covered = false;
        }

        let round2 = verify::round2_vp_index(&mb, p)
            .map_err(|e| internal(e.to_string()))?;
        let table = (!data.oracle).then(|| data.basis.vp_index());
        let polygon = polygon_vp(&mb, p);
        let agree = table.map_or(true, |t| t == round2)
            && polygon.map_or(true, |n| n == round2);
        let show = |v: Option<u64>| v.map_or("-".to_string(), |v| v.to_string());
        checks.push(Check::new(
            format!("p={} index agreement", p),
            agree,
            format!(
                "table={} polygon={} round2={}",
                show(table),
                show(polygon),
                round2
            ),
        ));

        let rep = verify::verify_p_basis(&mb, p, &data.basis)
            .map_err(|e| internal(e.to_string()))?;
        let mut failing = Vec::new();
        if !rep.integral {
            failing.push("integral");
        }
        if !rep.closed {
            failing.push("closed");
        }
        if !rep.index_matches {
            failing.push("index");
        }
        if !rep.maximal {
            failing.push("maximal");
        }
        checks.push(Check::new(
            format!("p={} basis [{}]", p, data.case),
            rep.all_pass(),
            if failing.is_empty() {
                "integral closed index maximal".to_string()
            } else {
                format!("failing: {}", failing.join(" "))
            },
        ));
        bases.push(data.basis);
    }

    let global = combine::global_basis(&bases).map_err(|e| internal(e.to_string()))?;
    let df = pure12::disc_f(&mb).map_err(|e| internal(e.to_string()))?;
    let ind = global.index();

    let tf = verify::trace_form_disc(global.elements(), &mb);
    let lhs = tf * BigRational::from_integer(ind.value().pow(2));
    let res = verify::resultant_disc(&mb);
    let routes_ok = lhs.is_integer() && lhs.to_integer() == res && res == df.value();
    checks.push(Check::new(
        "discriminant routes (trace form vs resultant)",
        routes_ok,
        if routes_ok {
            format!("D_f = {}", df)
        } else {
            format!("trace route {} vs resultant {}", lhs, res)
        },
    ));

    let mut rebuilt = df.clone();
    for (p, ks) in global.primes() {
        let vp: u64 = ks.iter().sum();
        rebuilt.div_prime_power(*p, 2 * vp as u32);
    }
    let mut product = rebuilt.clone();
    for p in ind.primes() {
        product.mul_prime_power(p, 2 * ind.exponent(p));
    }
    let factored_ok = product == df;
    checks.push(Check::new(
        "discriminant factorization (D_f = ind^2 * d_K)",
        factored_ok,
        format!("ind = {}, d_K = {}", ind, rebuilt),
    ));

    if all_covered {
        let dk = pure12::field_discriminant(&mb).map_err(|e| internal(e.to_string()))?;
        checks.push(Check::new(
            "field discriminant (table route vs basis route)",
            dk == rebuilt,
            format!("d_K = {}", dk),
        ));
    }

    Ok((checks, warnings))
}

fn cmd_verify(m: i64, format: Format) -> Result<(), CliError> {
    no_latex(format, "verify")?;
    let (checks, warnings) = verify_checks(m)?;
    emit_warnings(&warnings);
    let failing: Vec<&str> = checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.name.as_str())
        .collect();

    match format {
        Format::Text => {
            for c in &checks {
                let mark = if c.pass { "ok  " } else { "FAIL" };
                println!("{} {} ({})", mark, c.name, c.detail);
            }
            if failing.is_empty() {
                println!("verify m={}: all checks passed", m);
            }
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = checks
                .iter()
                .map(|c| json!({ "name": c.name, "pass": c.pass, "detail": c.detail }))
                .collect();
            let value = json!({
                "m": m,
                "pass": failing.is_empty(),
                "checks": rows,
                "warnings": warnings,
            });
            println!("{}", value);
        }
        Format::Latex => unreachable!(),
    }

    if failing.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failure(format!(
            "verification failed for m={}: {}",
            m,
            failing.join(", ")
        )))
    }
}

// ---- table ----

fn cmd_table(which: u32, format: TableFormat) -> Result<(), CliError> {
    let out = match format {
        TableFormat::Markdown => render::table_markdown(which)?,
        TableFormat::Latex => render::table_latex(which)?,
    };
    print!("{}", out);
    Ok(())
}

// ---- batch ----

struct Job {
    line: usize,
    text: String,
    m: Option<i64>,
}

fn worker_pool() -> Result<rayon::ThreadPool, CliError> {
    let threads = match std::env::var("DUODECIC_JOBS") {
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| {
                CliError::Invalid(format!(
                    "DUODECIC_JOBS must be a positive integer, got {:?}",
                    s
                ))
            })?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Failure(format!("cannot build worker pool: {}", e)))
}

fn cmd_batch(input: &std::path::Path, output: Option<&std::path::Path>) -> Result<(), CliError> {
    let content = fs::read_to_string(input).map_err(|e| {
        CliError::Invalid(format!("cannot read {}: {}", input.display(), e))
    })?;

    let jobs: Vec<Job> = content
        .lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let text = raw.trim();
            if text.is_empty() || text.starts_with('#') {
                return None;
            }
            Some(Job {
                line: i + 1,
                text: text.to_string(),
                m: text.parse::<i64>().ok(),
            })
        })
        .collect();

    let pool = worker_pool()?;
    let outcomes: Vec<Result<report::FieldReport, String>> = pool.install(|| {
        jobs.par_iter()
            .map(|job| match job.m {
                Some(m) => report::build_report(m).map_err(|e| e.to_string()),
                None => Err(format!("not an integer: {:?}", job.text)),
            })
            .collect()
    });

    let mut reports = Vec::new();
    let mut rejected = 0usize;
    for (job, outcome) in jobs.iter().zip(&outcomes) {
        match outcome {
            Ok(report) => reports.push(report.clone()),
            Err(reason) => {
                rejected += 1;
                eprintln!("line {}: {:?} rejected: {}", job.line, job.text, reason);
            }
        }
    }

    let body = serde_json::to_string_pretty(&reports)
        .map_err(|e| CliError::Failure(format!("cannot serialize reports: {}", e)))?;
    match output {
        Some(path) => fs::write(path, format!("{}\n", body)).map_err(|e| {
            CliError::Invalid(format!("cannot write {}: {}", path.display(), e))
        })?,
        None => println!("{}", body),
    }
    eprintln!("{} processed, {} rejected", reports.len(), rejected);
    Ok(())
}
