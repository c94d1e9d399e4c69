//! `𝖣_s M` by definition: a minimal free resolution over a degree window,
//! destabilized termwise, and its homology. Used to validate the chain complex.
//!
//! A free module `Σ^n A` destabilizes to the span of admissible words of excess
//! at most `n`; the words of larger excess span `B(Σ^n A)`, so `𝖣` of a boundary
//! map is read off by dropping coordinates.

pub mod resolution;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

pub use resolution::{FreeStage, ResolutionWindow};

use crate::complex::{connectivity_bound, CheckFailure, ComplexError, ComplexWindow};
use crate::fpla::{homology_at, FplaError, SparseMatFp};
use crate::steenrod::ModuleWindow;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("window exhausted: first unreliable degree {degree}")]
    WindowExhausted { degree: i32 },
    #[error("resolution is not exact at F_{s} in degree {degree}")]
    NotExact { s: usize, degree: i32 },
    #[error("resolution of length {length} cannot give D_{s}")]
    TooShort { length: usize, s: usize },
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Fpla(#[from] FplaError),
}

/// Which basis elements of `F_s` survive destabilization, in module order.
fn surviving(stage: &FreeStage, p: u32) -> Vec<bool> {
    stage.free.basis.iter().map(|(g, w)| w.excess(p) <= stage.free.generators[*g]).collect()
}

/// `𝖣F_s` in degree `d` as a list of local indices of `F_s`.
fn kept_in_degree(stage: &FreeStage, keep: &[bool], d: i32) -> Vec<usize> {
    let range = stage.module().basis_in_degree(d);
    let off = range.start;
    range.filter(|&i| keep[i]).map(|i| i - off).collect()
}

fn restrict(m: &SparseMatFp, rows: &[usize], cols: &[usize]) -> SparseMatFp {
    let dense: Vec<Vec<u32>> = rows.iter().map(|&i| cols.iter().map(|&j| m.get(i, j)).collect()).collect();
    if rows.is_empty() {
        return SparseMatFp::zero(m.prime(), 0, cols.len());
    }
    SparseMatFp::from_dense(m.prime(), &dense)
}

/// `𝖣(F_•)` degreewise: dimensions and induced boundaries.
pub struct DestabilizedResolution<'a> {
    res: &'a ResolutionWindow,
    keep: Vec<Vec<bool>>,
}

impl<'a> DestabilizedResolution<'a> {
    pub fn new(res: &'a ResolutionWindow) -> Self {
        let p = res.prime();
        let keep = (0..=res.length()).map(|s| surviving(res.stage(s), p)).collect();
        DestabilizedResolution { res, keep }
    }

    pub fn dim(&self, s: usize, d: i32) -> usize {
        kept_in_degree(self.res.stage(s), &self.keep[s], d).len()
    }

    /// `𝖣∂_s : 𝖣F_s → 𝖣F_{s-1}` in degree `d`; zero for `s = 0`.
    pub fn boundary(&self, s: usize, d: i32) -> SparseMatFp {
        let cols = kept_in_degree(self.res.stage(s), &self.keep[s], d);
        if s == 0 {
            return SparseMatFp::zero(self.res.prime(), 0, cols.len());
        }
        let rows = kept_in_degree(self.res.stage(s - 1), &self.keep[s - 1], d);
        restrict(&self.res.boundary(s, d), &rows, &cols)
    }

    /// `dim 𝖣_s M` in degree `d`.
    pub fn homology(&self, s: usize, d: i32) -> Result<usize, OracleError> {
        if s + 1 > self.res.length() {
            return Err(OracleError::TooShort { length: self.res.length(), s });
        }
        Ok(homology_at(&self.boundary(s + 1, d), &self.boundary(s, d))?.dim)
    }
}

/// `(degree, dim 𝖣_s M)` over the same degrees as the homology tables of the
/// complex: from the lower of the module's bottom degree and the connectivity bound
/// up to the validity top. Below the bottom of the module the resolution is zero.
pub fn derived_destab(res: &ResolutionWindow, s: usize) -> Result<Vec<(i32, usize)>, OracleError> {
    let dr = DestabilizedResolution::new(res);
    let m = res.module();
    let Some((lo, _)) = m.occupied() else { return Ok(Vec::new()) };
    let bottom = (lo as i64).min(connectivity_bound(m.prime(), s, lo)).max(i32::MIN as i64) as i32;
    let top = m.homology_top(s, res.window().1);
    (bottom..=top).map(|d| Ok((d, if d < lo { 0 } else { dr.homology(s, d)? }))).collect()
}

/// Dimensions of `𝖣_s M` for `s <= s_max` in degrees `<= deg_max`, via a resolution
/// of length `s_max + 1`. Rows `(s, degree, dim)`.
pub fn oracle_table(m: &ModuleWindow, s_max: usize, deg_max: i32) -> Result<Vec<(usize, i32, usize)>, OracleError> {
    let res = ResolutionWindow::new(m, s_max + 1, deg_max)?;
    let mut rows = Vec::new();
    for s in 0..=s_max {
        rows.extend(derived_destab(&res, s)?.into_iter().map(|(d, n)| (s, d, n)));
    }
    Ok(rows)
}

/// Outcome of [`compare`].
#[derive(Debug, Clone, Default)]
pub struct Comparison {
    /// `(s, degree, dim H_s(𝔇_• M), dim 𝖣_s M)` on the common window.
    pub rows: Vec<(usize, i32, usize, usize)>,
    /// Common window per `s`, if nonempty.
    pub windows: Vec<Option<(i32, i32)>>,
    pub failures: Vec<CheckFailure>,
}

impl Comparison {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Both tables side by side, `s\tdegree\tcomplex\toracle`.
    pub fn tables(&self) -> String {
        let mut out = String::from("s\tdegree\tcomplex\toracle\n");
        for (s, d, a, b) in &self.rows {
            let _ = writeln!(out, "{s}\t{d}\t{a}\t{b}");
        }
        out
    }
}

/// Dimensionwise comparison of `H_s(𝔇_• M)` with `𝖣_s M` for `s <= s_max` on the
/// intersection of both validity windows with degrees `<= deg_max`.
pub fn compare(m: &ModuleWindow, s_max: usize, deg_max: i32) -> Result<Comparison, OracleError> {
    let c = ComplexWindow::build(m.clone(), s_max + 1, deg_max)?;
    let res = ResolutionWindow::new(m, s_max + 1, deg_max)?;
    let mut out = Comparison::default();
    for s in 0..=s_max {
        let oracle: BTreeMap<i32, usize> = derived_destab(&res, s)?.into_iter().collect();
        let mut window: Option<(i32, i32)> = None;
        for (d, dim, exact) in c.homology_rows(s)? {
            let Some(&o) = oracle.get(&d) else { continue };
            window = Some(window.map_or((d, d), |(a, _)| (a, d)));
            out.rows.push((s, d, dim, o));
            if dim != o || !exact {
                out.failures.push(CheckFailure::new(
                    "complex and oracle disagree",
                    s,
                    d,
                    format!("complex {dim}{}, oracle {o}", if exact { "" } else { " (inexact)" }),
                ));
            }
        }
        out.windows.push(window);
    }
    Ok(out)
}
