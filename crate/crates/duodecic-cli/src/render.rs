//! Deterministic text, LaTeX, and Markdown rendering.
//!
//! Table output is generated from the embedded case records only, with no
//! environment or locale input, so repeated runs are byte-identical. In
//! symbolic table entries the letter t stands for theta and d for the
//! sign attached to the case; concrete basis elements print with decimal
//! denominators instead.

use num_traits::{One, Signed, Zero};

use duodecic::pure12::{self, CaseRecord, ThetaElement};

use crate::CliError;

// ---- Concrete elements ----

/// LaTeX form of one basis element, e.g. \frac{\theta^{6}-2\theta^{3}+2}{4}.
pub fn element_latex(e: &ThetaElement) -> String {
    let mut num = String::new();
    for i in (0..12).rev() {
        let c = e.numer().coeff(i);
        if c.is_zero() {
            continue;
        }
        let abs = c.abs();
        if num.is_empty() {
            if c.is_negative() {
                num.push('-');
            }
        } else if c.is_negative() {
            num.push('-');
        } else {
            num.push('+');
        }
        if i == 0 || !abs.is_one() {
            num.push_str(&abs.to_string());
        }
        num.push_str(&theta_pow_latex(i));
    }
    if num.is_empty() {
        num.push('0');
    }
    if e.denom().is_one() {
        num
    } else {
        format!("\\frac{{{}}}{{{}}}", num, e.denom())
    }
}

fn theta_pow_latex(i: usize) -> String {
    match i {
        0 => String::new(),
        1 => "\\theta".to_string(),
        _ => format!("\\theta^{{{}}}", i),
    }
}

/// One line per basis element, in the requested style.
pub fn basis_lines(elements: &[ThetaElement], latex: bool) -> String {
    let mut out = String::new();
    for e in elements {
        if latex {
            out.push_str(&element_latex(e));
        } else {
            out.push_str(&e.to_string());
        }
        out.push('\n');
    }
    out
}

// ---- Symbolic table entries ----

/// Rewrites a t/d table expression into LaTeX: t^10+54dt^6 becomes
/// \theta^{10}+54\delta\theta^{6}.
fn symbolic_latex(s: &str) -> String {
    let bytes = s.as_bytes();
    let mut out = String::new();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b't' => {
                i += 1;
                if i + 1 < bytes.len() && bytes[i] == b'^' {
                    let start = i + 1;
                    let mut end = start;
                    while end < bytes.len() && bytes[end].is_ascii_digit() {
                        end += 1;
                    }
                    out.push_str(&format!("\\theta^{{{}}}", &s[start..end]));
                    i = end;
                } else {
                    out.push_str("\\theta");
                }
            }
            b'd' => {
                out.push_str("\\delta");
                i += 1;
            }
            c => {
                out.push(c as char);
                i += 1;
            }
        }
    }
    out
}

fn pk_plain(p: u64, k: u64) -> String {
    if k == 1 {
        p.to_string()
    } else {
        format!("{}^{}", p, k)
    }
}

fn row_plain(p: u64, k: u64, numer: &str) -> String {
    if k == 0 {
        return numer.to_string();
    }
    let simple = !numer[1..].contains('+') && !numer[1..].contains('-');
    if simple {
        format!("{}/{}", numer, pk_plain(p, k))
    } else {
        format!("({})/{}", numer, pk_plain(p, k))
    }
}

fn row_latex(p: u64, k: u64, numer: &str) -> String {
    let body = symbolic_latex(numer);
    if k == 0 {
        format!("${}$", body)
    } else {
        let den = if k == 1 { p.to_string() } else { format!("{}^{{{}}}", p, k) };
        format!("$\\frac{{{}}}{{{}}}$", body, den)
    }
}

fn conditions_plain(rec: &CaseRecord) -> String {
    let residues: Vec<String> = rec.cond_residues.iter().map(|r| r.to_string()).collect();
    format!(
        "v_{}(m)={}, m_{} = {} (mod {})",
        rec.p,
        rec.v,
        rec.p,
        residues.join(","),
        rec.cond_modulus
    )
}

fn conditions_latex(rec: &CaseRecord) -> String {
    let residues: Vec<String> = rec.cond_residues.iter().map(|r| r.to_string()).collect();
    format!(
        "$v_{{{}}}(m)={}$, $m_{{{}}}\\equiv {}\\pmod{{{}}}$",
        rec.p,
        rec.v,
        rec.p,
        residues.join(","),
        rec.cond_modulus
    )
}

// ---- Case tables ----

fn table_records(which: u32) -> Result<(&'static str, Vec<&'static CaseRecord>), CliError> {
    let p = match which {
        1 => 2,
        2 => 3,
        _ => {
            return Err(CliError::Invalid(format!(
                "--which must be 1 (p = 2) or 2 (p = 3), got {}",
                which
            )))
        }
    };
    let records: Vec<&CaseRecord> =
        pure12::case_records().iter().filter(|r| r.p == p).collect();
    let caption = match which {
        1 => "Table 1: wild cases at p = 2 with their 2-integral bases and v_2(ind theta).",
        _ => "Table 2: wild cases at p = 3 with their 3-integral bases and v_3(ind theta).",
    };
    Ok((caption, records))
}

fn uses_delta(records: &[&CaseRecord]) -> bool {
    records.iter().any(|r| {
        r.rows.iter().any(|row| row.numer.uses_delta())
            || r.keys.iter().any(|k| k.psi.uses_delta() || k.phi.uses_delta())
    })
}

/// Markdown rendering of table 1 or 2; byte-identical across runs.
pub fn table_markdown(which: u32) -> Result<String, CliError> {
    let (caption, records) = table_records(which)?;
    let p = records[0].p;
    let mut out = String::new();
    out.push_str(caption);
    out.push('\n');
    if uses_delta(&records) {
        out.push_str("Here t stands for theta and d = +1 when m_3 = 1 (mod 3), else d = -1.\n");
    } else {
        out.push_str("Here t stands for theta.\n");
    }
    out.push('\n');
    out.push_str(&format!(
        "| Case | Conditions | v_{}(ind theta) | {}-integral basis |\n",
        p, p
    ));
    out.push_str("| --- | --- | --- | --- |\n");
    let mut notes = Vec::new();
    for rec in &records {
        let tag = if rec.note.is_some() {
            notes.push(rec);
            format!("{}*", rec.tag)
        } else {
            rec.tag.to_string()
        };
        let basis: Vec<String> = rec
            .rows
            .iter()
            .map(|row| row_plain(rec.p, row.k, &row.numer.serialize('t')))
            .collect();
        out.push_str(&format!(
            "| {} | {} | {} | {} |\n",
            tag,
            conditions_plain(rec),
            rec.index,
            basis.join(", ")
        ));
    }
    for rec in notes {
        out.push('\n');
        out.push_str(&format!("\\* {}: {}\n", rec.tag, rec.note.as_deref().unwrap_or("")));
    }
    Ok(out)
}

/// LaTeX rendering of table 1 or 2; byte-identical across runs.
pub fn table_latex(which: u32) -> Result<String, CliError> {
    let (caption, records) = table_records(which)?;
    let p = records[0].p;
    let mut out = String::new();
    out.push_str(&format!("% {}\n", caption));
    if uses_delta(&records) {
        out.push_str("% delta = +1 when m_3 = 1 (mod 3), else delta = -1\n");
    }
    out.push_str("\\begin{tabular}{llll}\n\\hline\n");
    out.push_str(&format!(
        "Case & Conditions & $v_{{{}}}(\\mathrm{{ind}}\\,\\theta)$ & ${}$-integral basis \\\\\n\\hline\n",
        p, p
    ));
    let mut notes = Vec::new();
    for rec in &records {
        let tag = if rec.note.is_some() {
            notes.push(rec);
            format!("{}$^{{\\ast}}$", rec.tag)
        } else {
            rec.tag.to_string()
        };
        let basis: Vec<String> = rec
            .rows
            .iter()
            .map(|row| row_latex(rec.p, row.k, &row.numer.serialize('t')))
            .collect();
        out.push_str(&format!(
            "{} & {} & ${}$ & {} \\\\\n",
            tag,
            conditions_latex(rec),
            rec.index,
            basis.join(", ")
        ));
    }
    out.push_str("\\hline\n\\end{tabular}\n");
    for rec in notes {
        out.push_str(&format!(
            "\\par $^{{\\ast}}$ {}: {}\n",
            rec.tag,
            rec.note.as_deref().unwrap_or("")
        ));
    }
    Ok(out)
}

// ---- Factored integers ----

/// LaTeX form, e.g. "-2^{16}\cdot 3^{23}\cdot 5^{11}".
pub fn factored_latex(f: &duodecic::arith::FactoredInt) -> String {
    let mut out = String::new();
    if f.sign < 0 {
        out.push('-');
    }
    if f.factors.is_empty() {
        out.push('1');
        return out;
    }
    let mut first = true;
    for (&p, &e) in &f.factors {
        if !first {
            out.push_str("\\cdot ");
        }
        first = false;
        if e == 1 {
            out.push_str(&p.to_string());
        } else {
            out.push_str(&format!("{}^{{{}}}", p, e));
        }
    }
    out
}
