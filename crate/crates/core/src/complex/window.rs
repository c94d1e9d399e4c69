//! A degree window of `𝔇_• M`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use super::differential::Differential;
use super::ComplexError;
use crate::fpla::{homology_at, FpVec, FplaError, SparseMatFp};
use crate::rfunctor::RsSpace;
use crate::steenrod::ModuleWindow;

/// `H_s` in one degree. `exact` is false at the top of the window when
/// `𝔇_{s+1}` was not built and is not zero by connectivity: `dim` is then
/// the kernel dimension, an upper bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyEntry {
    pub s: usize,
    pub degree: i32,
    pub dim: usize,
    pub kernel_dim: usize,
    pub image_rank: usize,
    pub exact: bool,
    pub representatives: Vec<FpVec>,
}

#[derive(Debug)]
pub struct ComplexWindow {
    p: u32,
    module: Arc<ModuleWindow>,
    s_max: usize,
    deg_max: i32,
    /// `spaces[s]` is `R_s` over `Σ^{s-1} M`, so `𝔇_s M` in degree `D` is its degree `D - 1`.
    spaces: Vec<RsSpace>,
    diffs: Vec<BTreeMap<i32, SparseMatFp>>,
}

/// `1 + p^s(|M| + s - 1)`, the lowest degree in which `𝔇_s M` can be nonzero.
pub(crate) fn bound(p: u32, s: usize, lo: i32) -> i64 {
    1 + (p as i64).pow(s as u32) * (lo as i64 + s as i64 - 1)
}

impl ComplexWindow {
    /// `𝔇_0 M, …, 𝔇_{s_max} M` and `d_1, …, d_{s_max}` in degrees `<= deg_max`.
    pub fn build(module: ModuleWindow, s_max: usize, deg_max: i32) -> Result<Self, ComplexError> {
        let p = module.prime();
        let module = Arc::new(module);
        let spaces: Vec<RsSpace> =
            (0..=s_max).map(|s| RsSpace::new(Arc::new(module.suspend(s as i32 - 1)), s)).collect();
        let mut c = ComplexWindow { p, module, s_max, deg_max, spaces, diffs: vec![BTreeMap::new()] };
        for s in 1..=s_max {
            let d = Differential::new(&c.spaces[s], &c.spaces[s - 1]);
            let degrees: Vec<i32> = c.degrees(s).collect();
            let mats = degrees
                .par_iter()
                .map(|&deg| d.matrix(deg - 1).map(|m| (deg, m)))
                .collect::<Result<BTreeMap<_, _>, _>>()?;
            c.diffs.push(mats);
        }
        Ok(c)
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn module(&self) -> &Arc<ModuleWindow> {
        &self.module
    }

    pub fn s_max(&self) -> usize {
        self.s_max
    }

    pub fn deg_max(&self) -> i32 {
        self.deg_max
    }

    /// `R_s Σ^{s-1} M`.
    pub fn space(&self, s: usize) -> &RsSpace {
        &self.spaces[s]
    }

    /// Lowest degree of `𝔇_s M`, if the module is nonzero.
    pub fn connectivity(&self, s: usize) -> Option<i64> {
        let lo = self.module.occupied()?.0;
        Some(bound(self.p, s, lo))
    }

    /// Degrees of the window in which `𝔇_s M` may be nonzero.
    pub fn degrees(&self, s: usize) -> impl Iterator<Item = i32> {
        let lo = self.connectivity(s).map_or(i64::MAX, |b| b.max(i32::MIN as i64));
        let hi = self.valid_top(s) as i64;
        (lo..=hi).map(|d| d as i32)
    }

    /// Highest degree in which `𝔇_s M` agrees with the complex of the module the
    /// window stands in for.
    pub fn valid_top(&self, s: usize) -> i32 {
        match self.module.derived_top(s) {
            None => self.deg_max,
            Some(b) => self.deg_max.min(b.clamp(i32::MIN as i64, i32::MAX as i64) as i32),
        }
    }

    pub fn dim(&self, s: usize, degree: i32) -> usize {
        if s > self.s_max {
            return 0;
        }
        self.spaces[s].basis(degree - 1).len()
    }

    /// `d_s : 𝔇_s M → 𝔇_{s-1} M` in degree `degree`; `d_0` is the zero map.
    pub fn differential(&self, s: usize, degree: i32) -> SparseMatFp {
        let rows = if s == 0 { 0 } else { self.dim(s - 1, degree) };
        if s == 0 || s > self.s_max {
            return SparseMatFp::zero(self.p, rows, self.dim(s, degree));
        }
        self.diffs[s].get(&degree).cloned().unwrap_or_else(|| SparseMatFp::zero(self.p, rows, self.dim(s, degree)))
    }

    /// Every matrix of `d_s` that was computed, keyed by degree.
    pub fn differentials(&self, s: usize) -> &BTreeMap<i32, SparseMatFp> {
        &self.diffs[s]
    }

    /// Check `d_{s-1} d_s = 0` everywhere in the window.
    pub fn check_squares(&self) -> Result<(), ComplexError> {
        for s in 2..=self.s_max {
            for (&deg, m) in &self.diffs[s] {
                let prod = self.differential(s - 1, deg).mul(m)?;
                if let Some((i, j, c)) = prod.entries().into_iter().next() {
                    return Err(ComplexError::NotAComplex {
                        s: s - 1,
                        degree: deg,
                        witness: format!("entry ({i}, {j}) = {c}"),
                    });
                }
            }
        }
        Ok(())
    }

    /// Is `𝔇_{s+1} M` zero in `degree`, either by construction or by connectivity?
    fn incoming_known(&self, s: usize, degree: i32) -> bool {
        s < self.s_max || self.connectivity(s + 1).is_none_or(|b| (degree as i64) < b)
    }

    pub fn homology(&self, s: usize, degree: i32) -> Result<HomologyEntry, ComplexError> {
        if s > self.s_max {
            return Err(ComplexError::OutOfRange { s, s_max: self.s_max });
        }
        let d_out = self.differential(s, degree);
        let d_in = self.differential(s + 1, degree);
        let h = homology_at(&d_in, &d_out).map_err(|e| match e {
            FplaError::NotAComplex { row, col, value } => ComplexError::NotAComplex {
                s,
                degree,
                witness: format!("entry ({row}, {col}) = {value}"),
            },
            e => e.into(),
        })?;
        Ok(HomologyEntry {
            s,
            degree,
            dim: h.dim,
            kernel_dim: h.kernel_dim,
            image_rank: h.image_rank,
            exact: self.incoming_known(s, degree),
            representatives: h.representatives,
        })
    }

    /// `H_s` over the validity window of position `s`, from the connectivity bound up.
    pub fn homology_table(&self, s: usize) -> Result<Vec<HomologyEntry>, ComplexError> {
        let top = self.module.homology_top(s, self.deg_max);
        self.degrees(s).filter(|&d| d <= top).map(|d| self.homology(s, d)).collect()
    }

    /// First degree of the tables: the lower of the module's bottom degree and the
    /// connectivity bound.
    pub fn table_bottom(&self, s: usize) -> Option<i32> {
        let lo = self.module.occupied()?.0 as i64;
        Some(lo.min(bound(self.p, s, lo as i32)).max(i32::MIN as i64) as i32)
    }

    /// `(degree, dim H_s, exact)` for every degree of the validity window of position
    /// `s`, with explicit zeros below the connectivity bound.
    pub fn homology_rows(&self, s: usize) -> Result<Vec<(i32, usize, bool)>, ComplexError> {
        let Some(bottom) = self.table_bottom(s) else { return Ok(Vec::new()) };
        let table: BTreeMap<i32, (usize, bool)> =
            self.homology_table(s)?.into_iter().map(|h| (h.degree, (h.dim, h.exact))).collect();
        let bound = self.connectivity(s).unwrap_or(i64::MAX);
        let top = self.module.homology_top(s, self.deg_max);
        Ok((bottom..=top)
            .filter_map(|d| match table.get(&d) {
                Some(&(n, exact)) => Some((d, n, exact)),
                None if (d as i64) < bound => Some((d, 0, true)),
                None => None,
            })
            .collect())
    }

    /// TSV rows `s, degree, dim` for positions `0..=s_top`, zeros included.
    pub fn homology_tsv(&self, s_top: usize) -> Result<String, ComplexError> {
        let mut out = String::from("s\tdegree\tdim\n");
        for s in 0..=s_top.min(self.s_max) {
            for (d, n, _) in self.homology_rows(s)? {
                out.push_str(&format!("{s}\t{d}\t{n}\n"));
            }
        }
        Ok(out)
    }
}
