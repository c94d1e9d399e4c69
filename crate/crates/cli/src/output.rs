//! TSV tables, matrix dumps, verification reports and failure logs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use destab::complex::{CheckReport, ComplexWindow};
use destab::fpla::dump_matrix;
use destab::invariants::{dickson, mui, psi_element, rank_cap, GammaElement, InvariantsError, MuiClass};

/// `s\tdegree\tdim` rows.
pub fn tsv(rows: &[(usize, i32, usize)]) -> String {
    let mut out = String::from("s\tdegree\tdim\n");
    for (s, d, n) in rows {
        let _ = writeln!(out, "{s}\t{d}\t{n}");
    }
    out
}

/// Every differential of the complex as `deg s row col value` lines, sorted by
/// `(deg, s, row, col)`.
pub fn matrix_dump(c: &ComplexWindow) -> String {
    let mut blocks: Vec<(i32, usize, Vec<String>)> = Vec::new();
    for s in 1..=c.s_max() {
        for (&d, m) in c.differentials(s) {
            blocks.push((d, s, dump_matrix(d, s, m)));
        }
    }
    blocks.sort_by_key(|b| (b.0, b.1));
    blocks.into_iter().flat_map(|b| b.2).map(|l| l + "\n").collect()
}

/// One line per report, `PASS` or `FAIL`, followed by its failures and notes.
pub fn report_text(reports: &[CheckReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{status}\t{}\t{} checks, {} failures", r.name, r.checks, r.failures.len());
        for f in &r.failures {
            let _ = writeln!(out, "  failure: {f}");
        }
        for n in &r.notes {
            let _ = writeln!(out, "  note: {n}");
        }
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    let _ = writeln!(out, "{} of {} reports passed", reports.len() - failed, reports.len());
    out
}

/// JSON lines `{"reason", "s", "degree", "witness"}`, the reason prefixed by the report name.
pub fn failure_lines(reports: &[CheckReport]) -> String {
    let mut out = String::new();
    for r in reports {
        for f in &r.failures {
            let line = serde_json::json!({
                "reason": format!("{}: {}", r.name, f.reason),
                "s": f.s,
                "degree": f.degree,
                "witness": f.witness,
            });
            let _ = writeln!(out, "{line}");
        }
    }
    out
}

/// A single failure line for errors that stop a run before any report exists.
pub fn error_line(reason: &str) -> String {
    format!("{}\n", serde_json::json!({ "reason": reason, "s": null, "degree": null, "witness": "" }))
}

/// Where failures go: `<out>.failures.jsonl` next to the output, else `destab-failures.jsonl`.
pub fn failures_path(out: Option<&Path>) -> PathBuf {
    match out {
        Some(p) => {
            let mut name = p.as_os_str().to_owned();
            name.push(".failures.jsonl");
            PathBuf::from(name)
        }
        None => PathBuf::from("destab-failures.jsonl"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Emit {
    /// `Q_{s,i}` as polynomials in `H^*BV_s`
    Dickson,
    /// `L_s`, `e_s`, `M_{s,i}`, `M̃_{s,i}`, `R_{s,i}` as polynomials
    Mui,
    /// `ψ_{a,b}` of the Dickson and Mui generators of `Γ_s`, `a + b = s`
    Coproduct,
}

/// The `invariants` listing: one `name = polynomial` line per class.
pub fn emit_invariants(p: u32, s: usize, emit: Emit) -> Result<String, InvariantsError> {
    let cap = rank_cap(p);
    if s == 0 || s > cap {
        return Err(InvariantsError::RankCap { p, s, cap });
    }
    let mut out = String::new();
    match emit {
        Emit::Dickson => {
            for i in 0..s {
                let _ = writeln!(out, "Q_{s},{i} = {}", dickson(p, s, i)?);
            }
        }
        Emit::Mui => {
            let _ = writeln!(out, "L_{s} = {}", mui(p, s, MuiClass::L)?);
            let _ = writeln!(out, "e_{s} = {}", mui(p, s, MuiClass::E)?);
            for i in 0..s {
                let _ = writeln!(out, "M_{s},{i} = {}", mui(p, s, MuiClass::M(i))?);
            }
            for i in 0..s {
                let _ = writeln!(out, "M~_{s},{i} = {}", mui(p, s, MuiClass::MTilde(i))?);
            }
            for i in 0..s {
                let _ = writeln!(out, "R_{s},{i} = {}", mui(p, s, MuiClass::R(i))?);
            }
        }
        Emit::Coproduct => {
            for a in 1..s {
                let b = s - a;
                for j in 0..s {
                    let _ = writeln!(out, "psi_{a},{b}(Q_{s},{j}) = {}", psi_element(&GammaElement::q(p, s, j), a, b));
                }
                for j in 0..s {
                    let _ = writeln!(out, "psi_{a},{b}(R_{s},{j}) = {}", psi_element(&GammaElement::r(p, s, j), a, b));
                }
            }
        }
    }
    Ok(out)
}
