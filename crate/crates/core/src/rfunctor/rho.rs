//! The maps `ρ_s : R_s N → Σ^{-2} Φ Σ R_{s-1} N` and the inclusion
//! `Σ^{-1} R_s(Σ N) → R_s N`.
//!
//! `ρ_s` is the composite `R_s N ↪ R_1 R_{s-1} N → Σ^{-2}ΦΣ R_{s-1} N`: a monomial of
//! `K_s` is rewritten as `Σ κ St_1(a)` with `κ ∈ K_1`, `a ∈ K_{s-1}`, so that
//! `k St_s(n) = Σ ± κ St_1(a St_{s-1}(n))`, and then `ρ_1` keeps
//! `St_1(y) ↦ -Φσy` (`|y|` even) and `M̃_{1,0} St_1(y) ↦ Φσy` (`|y|` odd).

use std::collections::BTreeMap;

use super::space::RsSpace;
use super::RfunctorError;
use crate::fpla::{neg_mod, FpVec};
use crate::invariants::{K1Monomial, KsDecomposer, KsMonomial};
use crate::steenrod::ModuleWindow;

/// Source degree of `Σ^{-2}ΦΣ y` for `|y| = e`.
pub fn rho_degree(p: u32, e: i32) -> i32 {
    ModuleWindow::frobenius_degree(p, e + 1) - 2
}

/// Inverse of [`rho_degree`], if `d` is in its image.
pub fn rho_preimage_degree(p: u32, d: i32) -> Option<i32> {
    let (f, p) = (d + 2, p as i32);
    if f.rem_euclid(p) == 0 && f.div_euclid(p).rem_euclid(2) == 0 {
        Some(f.div_euclid(p) - 1)
    } else if (f - 2).rem_euclid(p) == 0 && (f - 2).div_euclid(p).rem_euclid(2) == 0 {
        Some((f - 2).div_euclid(p))
    } else {
        None
    }
}

/// `ρ_s` between `R_s N` and `R_{s-1} N` over the same module.
pub struct Rho<'a> {
    source: &'a RsSpace,
    target: &'a RsSpace,
    decomposer: Option<KsDecomposer>,
}

impl<'a> Rho<'a> {
    pub fn new(source: &'a RsSpace, target: &'a RsSpace) -> Self {
        let s = source.rank();
        assert!(s >= 1 && target.rank() + 1 == s);
        let decomposer = (s >= 2).then(|| KsDecomposer::new(source.prime(), s));
        Rho { source, target, decomposer }
    }

    /// `k St_s(n)` as `Σ c κ St_1(a St_{s-1}(n))`, split by the eigenvalue parity of `a`.
    fn terms(&self, k: &KsMonomial, n: i32) -> Vec<(K1Monomial, KsMonomial, u32)> {
        let p = self.source.prime();
        match &self.decomposer {
            None => vec![(K1Monomial { eps: (k.mask & 1) as u8, j: k.a }, KsMonomial::one(0), 1)],
            Some(dec) => dec
                .decompose(k)
                .terms()
                .iter()
                .map(|((kappa, a), &c)| {
                    let odd = a.degree_parity() == 1 && n.rem_euclid(2) == 1;
                    (*kappa, a.clone(), if odd { neg_mod(c, p) } else { c })
                })
                .collect(),
        }
    }

    /// `ρ_s` on the basis element `i` of degree `d`; returns the degree of `y` in
    /// `R_{s-1} N` and the coordinates there.
    pub fn apply_basis(&self, d: i32, i: usize) -> Result<(i32, FpVec), RfunctorError> {
        let p = self.source.prime();
        let s = self.source.rank();
        let basis = self.source.basis(d);
        let (x, g) = &basis.elements[i];
        let n = self.source.module().degree_of(*x);
        let k = self.source.to_ks(*x, g);
        let ps1 = (p as i64).pow(s as u32 - 1);
        let mut minus: BTreeMap<(K1Monomial, KsMonomial), u32> = BTreeMap::new();
        let mut out: BTreeMap<usize, u32> = BTreeMap::new();
        let Some(e) = rho_preimage_degree(p, d) else { return Ok((i32::MIN, FpVec::new())) };
        let tb = self.target.basis(e);
        for (kappa, a, c) in self.terms(&k, n) {
            if a.parity() as i32 != n.rem_euclid(2) && s >= 2 {
                let v = minus.entry((kappa, a)).or_insert(0);
                *v = (*v + c) % p;
                continue;
            }
            let y = a.degree(p, s - 1) + ps1 * n as i64;
            let value = match (kappa.eps, kappa.j, y.rem_euclid(2)) {
                (0, 0, 0) => neg_mod(c, p),
                (1, 0, 1) => c,
                _ => continue,
            };
            debug_assert_eq!(y, e as i64);
            let h = if s == 1 { crate::invariants::GammaMonomial::one(0) } else { a.to_gamma(n as i64).expect("parity checked") };
            let j = tb.index_of(*x, &h).ok_or_else(|| RfunctorError::Internal(format!("ρ image {a} ⊗ {x} missing")))?;
            let v = out.entry(j).or_insert(0);
            *v = (*v + value) % p;
        }
        if minus.values().any(|&c| c != 0) {
            return Err(RfunctorError::Internal(format!("ρ_{s}: terms outside R_{} survive", s - 1)));
        }
        Ok((e, FpVec::from_map(out)))
    }
}

/// `Σ^{-1} R_s(ΣN) → R_s N`: the basis element `(g, σx)` maps to `(-1)^{s|x|} (g, x)`.
pub fn suspension_inclusion(suspended: &RsSpace, plain: &RsSpace, d: i32, i: usize) -> FpVec {
    let p = plain.prime();
    let s = plain.rank();
    let (x, g) = &suspended.basis(d + 1).elements[i];
    let n = plain.module().degree_of(*x);
    let j = plain.basis(d).index_of(*x, g).expect("Σ^{-1}R_s(ΣN) ⊆ R_s N");
    let c = if (s as i64 * n as i64) % 2 != 0 { p - 1 } else { 1 };
    FpVec::from_map(BTreeMap::from([(j, c)]))
}
