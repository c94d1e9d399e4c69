//! `d_s : R_s ΣN → R_{s-1} N`, computed as `∂_s ⊗ Σ^{-1}` on `Γ_s ⊗ ΣN` and pulled back.

use super::ComplexError;
use crate::fpla::{neg_mod, FpVec, SparseMatFp};
use crate::invariants::gamma::partial_s_monomial;
use crate::rfunctor::{Ambient, RfunctorError, RsSpace};

pub struct Differential<'a> {
    source: &'a RsSpace,
    target: &'a RsSpace,
}

impl<'a> Differential<'a> {
    /// `source` is `R_s` over `ΣN`, `target` is `R_{s-1}` over `N`; the two module
    /// windows must share their basis order.
    pub fn new(source: &'a RsSpace, target: &'a RsSpace) -> Self {
        assert!(source.rank() >= 1 && target.rank() + 1 == source.rank());
        let (a, b) = (source.module(), target.module());
        assert_eq!(a.total_dim(), b.total_dim());
        debug_assert!((0..a.total_dim()).all(|x| a.degree_of(x) == b.degree_of(x) + 1));
        Differential { source, target }
    }

    pub fn source(&self) -> &RsSpace {
        self.source
    }

    pub fn target(&self) -> &RsSpace {
        self.target
    }

    /// `∂_s ⊗ Σ^{-1}` on the ambient.
    pub fn ambient(&self, a: &Ambient) -> Ambient {
        let p = self.source.prime();
        let s = self.source.rank();
        let mut out = Ambient::zero(p, s - 1);
        for ((x, g), &c) in a.terms() {
            // Module windows suspend without signs, so the Koszul sign of moving Σ^{-1}
            // past γ appears here; the overall sign makes d_1(St_1 x) = -βP^{|x|/2} x.
            let c = if g.is_odd() { c } else { neg_mod(c, p) };
            for (h, &e) in partial_s_monomial(p, s, g).terms() {
                out.add_term(*x, h.clone(), (c as u64 * e as u64 % p as u64) as u32);
            }
        }
        out
    }

    pub fn apply(&self, d: i32, v: &FpVec) -> Result<FpVec, ComplexError> {
        let img = self.ambient(&self.source.expand_vector(d, v));
        self.target.pullback(d, &img).map_err(|e| match e {
            RfunctorError::NotInImage { s, degree, witness } => ComplexError::LeavesRs { target: s, degree, witness },
            e => e.into(),
        })
    }

    /// Matrix in degree `d`: rows the basis of the target, columns the basis of the source.
    pub fn matrix(&self, d: i32) -> Result<SparseMatFp, ComplexError> {
        let n = self.source.basis(d).len();
        let cols = (0..n).map(|i| self.apply(d, &FpVec::unit(i))).collect::<Result<Vec<_>, _>>()?;
        Ok(SparseMatFp::from_columns(self.source.prime(), self.target.basis(d).len(), &cols))
    }
}
