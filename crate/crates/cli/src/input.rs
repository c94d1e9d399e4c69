//! Module arguments, primes and the degree caps.

use std::path::Path;

use destab::steenrod::{bv1, free, sphere, ModuleWindow, OddPrime, SteenrodAlgebra};

use crate::CliError;

/// Environment variable overriding the degree cap.
pub const DEGREE_CAP_VAR: &str = "DESTAB_DEGREE_CAP";

/// Largest `s_max` accepted.
pub const S_CAP: usize = 3;

/// Degree cap for `p`: `DESTAB_DEGREE_CAP` if set, else 80 at `p = 3`, 60 at `p = 5`
/// and 40 above.
pub fn degree_cap(p: u32) -> Result<i32, CliError> {
    match std::env::var(DEGREE_CAP_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("{DEGREE_CAP_VAR}={v} is not an integer"))),
        Err(_) => Ok(match p {
            3 => 80,
            5 => 60,
            _ => 40,
        }),
    }
}

pub fn check_prime(p: u32) -> Result<u32, CliError> {
    OddPrime::new(p).map(OddPrime::get).map_err(|e| CliError::Usage(e.to_string()))
}

/// Refuse degree windows above the cap.
pub fn check_window(p: u32, deg_max: i32) -> Result<(), CliError> {
    let cap = degree_cap(p)?;
    if deg_max > cap {
        return Err(CliError::WindowExhausted(format!("degree {deg_max} exceeds the cap {cap} at p = {p}")));
    }
    Ok(())
}

pub fn check_s_max(s_max: usize) -> Result<(), CliError> {
    if s_max > S_CAP {
        return Err(CliError::Usage(format!("--s-max {s_max} exceeds the cap {S_CAP}")));
    }
    Ok(())
}

fn builtin(term: &str, p: u32, deg_max: i32) -> Option<Result<ModuleWindow, CliError>> {
    let (name, rest) = term.split_once('(')?;
    let arg = rest.strip_suffix(')')?;
    let n: i32 = match arg.trim().parse() {
        Ok(n) => n,
        Err(_) => return Some(Err(CliError::Parse(format!("bad argument in {term}")))),
    };
    Some(match name.trim() {
        "sphere" => Ok(sphere(p, n)),
        "free" => {
            let alg = SteenrodAlgebra::shared(p, (deg_max - n).max(0));
            Ok(free(&alg, n, deg_max))
        }
        "bv1" if n >= 0 => Ok(bv1(p, n)),
        "bv1" => Err(CliError::Parse(format!("bv1 needs a nonnegative truncation, got {n}"))),
        other => Err(CliError::Parse(format!("unknown built-in module {other}"))),
    })
}

/// A built-in (`sphere(t)`, `free(n)`, `bv1(N)`, or a `+`-separated sum of them) or a
/// module file. `free(n)` is built up to `deg_max`. A file's declared prime must
/// agree with `p` when `p` is given.
pub fn load_module(spec: &str, p: Option<u32>, deg_max: i32) -> Result<ModuleWindow, CliError> {
    let spec = spec.trim();
    let terms: Vec<&str> = spec.split('+').map(str::trim).collect();
    if terms.iter().all(|t| t.ends_with(')') && t.contains('(')) {
        let p = check_prime(p.unwrap_or(3))?;
        let mut out: Option<ModuleWindow> = None;
        for t in terms {
            let m = builtin(t, p, deg_max).unwrap_or_else(|| Err(CliError::Parse(format!("cannot read {t}"))))?;
            out = Some(match out {
                None => m,
                Some(acc) => acc.direct_sum(&m),
            });
        }
        return out.ok_or_else(|| CliError::Parse("empty module".into()));
    }
    let path = Path::new(spec);
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let m = ModuleWindow::parse(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    if let Some(p) = p {
        if p != m.prime() {
            return Err(CliError::Usage(format!("--prime {p} but {} declares prime {}", path.display(), m.prime())));
        }
    }
    m.check_relations().map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    Ok(m)
}
