//! Minimal free resolutions over a degree window.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::OracleError;
use crate::fpla::{row_reduce, EchelonBasis, FpVec, SparseMatFp};
use crate::steenrod::{FreeModuleWindow, ModuleWindow, SteenrodAlgebra};

/// One free module `F_s` of a resolution with the images of its generators in
/// the previous term (`F_{s-1}`, or `M` for `s = 0`).
#[derive(Debug, Clone)]
pub struct FreeStage {
    pub free: FreeModuleWindow,
    pub images: Vec<FpVec>,
    /// `∂_s` in each degree: rows the basis of the previous term, columns that of `F_s`.
    pub boundary: BTreeMap<i32, SparseMatFp>,
}

impl FreeStage {
    pub fn generator_degrees(&self) -> &[i32] {
        &self.free.generators
    }

    pub fn module(&self) -> &ModuleWindow {
        &self.free.module
    }
}

/// `F_length → … → F_0 → M`, exact in degrees `<= hi`.
#[derive(Debug, Clone)]
pub struct ResolutionWindow {
    module: Arc<ModuleWindow>,
    lo: i32,
    hi: i32,
    stages: Vec<FreeStage>,
    minimal: bool,
}

/// Local coordinates of a module vector inside degree `d`.
fn localize(m: &ModuleWindow, d: i32, v: &FpVec) -> FpVec {
    let off = m.basis_in_degree(d).start;
    FpVec::from_map(v.iter().map(|(i, c)| (i - off, c)).collect())
}

fn globalize(m: &ModuleWindow, d: i32, v: &FpVec) -> FpVec {
    let off = m.basis_in_degree(d).start;
    FpVec::from_map(v.iter().map(|(i, c)| (i + off, c)).collect())
}

/// Matrix of the `A`-linear map `F → target` sending generator `g` to `images[g]`, in degree `d`.
fn boundary_matrix(free: &FreeModuleWindow, target: &ModuleWindow, images: &[FpVec], d: i32) -> SparseMatFp {
    let p = target.prime();
    let range = free.module.basis_in_degree(d);
    let cols: Vec<FpVec> = range
        .map(|i| {
            let (g, w) = &free.basis[i];
            localize(target, d, &target.act_admissible(w, &images[*g]))
        })
        .collect();
    SparseMatFp::from_columns(p, target.dim(d), &cols)
}

/// Choose generators covering `target` in degrees `lo..=hi`, modulo what lower
/// generators already reach. `kernel(d)` lists the local vectors that must be covered.
fn cover(
    alg: &SteenrodAlgebra,
    target: &ModuleWindow,
    lo: i32,
    hi: i32,
    mut kernel: impl FnMut(i32) -> Vec<FpVec>,
) -> (Vec<i32>, Vec<FpVec>) {
    let p = target.prime();
    let mut degrees = Vec::new();
    let mut images: Vec<FpVec> = Vec::new();
    for d in lo..=hi {
        let n = target.dim(d);
        if n == 0 {
            continue;
        }
        let mut span = EchelonBasis::new(p, n);
        for (g, &dg) in degrees.iter().enumerate() {
            for w in alg.admissible_basis(d - dg) {
                span.insert(&localize(target, d, &target.act_admissible(w, &images[g])));
            }
        }
        for k in kernel(d) {
            if span.insert(&k) {
                degrees.push(d);
                images.push(globalize(target, d, &k));
            }
        }
    }
    (degrees, images)
}

impl ResolutionWindow {
    /// A minimal resolution of length `length` in degrees `<= hi`. Generators are
    /// taken lowest degree first, in the order of the kernel basis from row reduction.
    pub fn new(m: &ModuleWindow, length: usize, hi: i32) -> Result<Self, OracleError> {
        if let Some(c) = m.exact_below() {
            if c <= hi {
                return Err(OracleError::WindowExhausted { degree: c });
            }
        }
        let p = m.prime();
        let module = Arc::new(m.clone());
        let lo = m.occupied().map_or(hi + 1, |(a, _)| a);
        let alg = SteenrodAlgebra::shared(p, (hi - lo).max(0));
        let mut stages: Vec<FreeStage> = Vec::with_capacity(length + 1);
        for s in 0..=length {
            let target: &ModuleWindow = if s == 0 { &module } else { stages[s - 1].module() };
            let (degrees, images) = if s == 0 {
                cover(&alg, target, lo, hi, |d| (0..target.dim(d)).map(FpVec::unit).collect())
            } else {
                let prev = &stages[s - 1];
                cover(&alg, target, lo, hi, |d| match prev.boundary.get(&d) {
                    Some(b) => row_reduce(b).kernel_basis,
                    None => (0..target.dim(d)).map(FpVec::unit).collect(),
                })
            };
            let free = FreeModuleWindow::new(&alg, &degrees, hi);
            let boundary = (lo..=hi)
                .filter(|&d| free.module.dim(d) > 0)
                .map(|d| (d, boundary_matrix(&free, target, &images, d)))
                .collect();
            stages.push(FreeStage { free, images, boundary });
        }
        Ok(ResolutionWindow { module, lo, hi, stages, minimal: true })
    }

    pub fn module(&self) -> &ModuleWindow {
        &self.module
    }

    pub fn prime(&self) -> u32 {
        self.module.prime()
    }

    pub fn length(&self) -> usize {
        self.stages.len() - 1
    }

    /// Degrees covered, `lo..=hi`.
    pub fn window(&self) -> (i32, i32) {
        (self.lo, self.hi)
    }

    pub fn is_minimal(&self) -> bool {
        self.minimal
    }

    pub fn stage(&self, s: usize) -> &FreeStage {
        &self.stages[s]
    }

    /// `∂_s` in degree `d`; `∂_0` is the augmentation onto `M`.
    pub fn boundary(&self, s: usize, d: i32) -> SparseMatFp {
        let rows = if s == 0 { self.module.dim(d) } else { self.stages[s - 1].module().dim(d) };
        let cols = self.stages[s].module().dim(d);
        self.stages[s].boundary.get(&d).cloned().unwrap_or_else(|| SparseMatFp::zero(self.prime(), rows, cols))
    }

    /// Check that the augmented complex is exact in every degree of the window.
    pub fn check_exact(&self) -> Result<(), OracleError> {
        for d in self.lo..=self.hi {
            let aug = self.boundary(0, d);
            if aug.rank() != self.module.dim(d) {
                return Err(OracleError::NotExact { s: 0, degree: d });
            }
            for s in 1..=self.length() {
                let prev = self.boundary(s - 1, d);
                let kernel = prev.ncols() - prev.rank();
                let cur = self.boundary(s, d);
                if !prev.mul(&cur)?.is_zero() || cur.rank() != kernel {
                    return Err(OracleError::NotExact { s, degree: d });
                }
            }
        }
        Ok(())
    }
}
