//! Total Steenrod powers `S_s = (θ_s ⊗ N) ∘ ψ_N` and `St_s = ± 𝔢_s^{|x|} S_s`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::ambient::Ambient;
use super::RfunctorError;
use crate::fpla::{neg_mod, FpVec};
use crate::invariants::gamma::theta_monomial;
use crate::invariants::GammaMonomial;
use crate::steenrod::{MilnorAction, MilnorBasis, ModuleWindow};

/// `(-1)^{s ⌊d/2⌋}` as a flag.
pub fn st_sign(s: usize, d: i32) -> bool {
    (s as i64 * d.div_euclid(2) as i64) % 2 != 0
}

#[derive(Debug)]
pub struct TotalPower {
    s: usize,
    action: MilnorAction,
    cache: Mutex<HashMap<usize, Arc<Ambient>>>,
}

impl TotalPower {
    pub fn new(module: Arc<ModuleWindow>, s: usize) -> Self {
        TotalPower { s, action: MilnorAction::new(module), cache: Mutex::new(HashMap::new()) }
    }

    pub fn module(&self) -> &ModuleWindow {
        self.action.module()
    }

    pub fn rank(&self) -> usize {
        self.s
    }

    pub fn action(&self) -> &MilnorAction {
        &self.action
    }

    /// `Σ_b (b*, b·x)` over Milnor basis elements `b` with `|b| <= budget`.
    pub fn coaction(&self, x: usize, budget: i32) -> Result<Vec<(MilnorBasis, FpVec)>, RfunctorError> {
        let m = self.module();
        let p = m.prime();
        let (lo, hi) = m.window();
        if budget > hi - lo {
            return Err(RfunctorError::Budget(budget));
        }
        let top = m.occupied().map_or(lo, |(_, b)| b);
        let mut out = Vec::new();
        for e in 0..=budget.min(top - m.degree_of(x)) {
            for b in self.action.algebra().milnor_basis(e) {
                let v = self.action.act(b, x);
                if !v.is_zero() {
                    out.push((b.clone(), v));
                }
            }
        }
        debug_assert!(out.first().is_some_and(|(b, _)| b.degree(p) == 0));
        Ok(out)
    }

    /// `S_s(x)` for a basis element `x`.
    pub fn s_total(&self, x: usize) -> Arc<Ambient> {
        if let Some(a) = self.cache.lock().unwrap().get(&x) {
            return Arc::clone(a);
        }
        let m = self.module();
        let p = m.prime();
        let mut out = Ambient::zero(p, self.s);
        let top = m.occupied().map_or(0, |(_, b)| b);
        // θ_s kills most of the basis, so test it before acting
        for e in 0..=top - m.degree_of(x) {
            for b in self.action.algebra().milnor_basis(e) {
                let Some((g, c)) = theta_monomial(p, self.s, b) else { continue };
                for (y, d) in self.action.act(b, x).iter() {
                    out.add_term(y, g.clone(), (c as u64 * d as u64 % p as u64) as u32);
                }
            }
        }
        let out = Arc::new(out);
        self.cache.lock().unwrap().insert(x, Arc::clone(&out));
        out
    }

    /// `St_s(x) = (-1)^{s⌊|x|/2⌋} 𝔢_s^{|x|} S_s(x)`, with `𝔢_s^2 = Q_{s,0}` absorbed.
    pub fn st_total(&self, x: usize) -> Ambient {
        let d = self.module().degree_of(x);
        let p = self.module().prime();
        let mut q = GammaMonomial::one(self.s);
        if self.s > 0 {
            q.e0 = d.div_euclid(2);
        }
        let c = if st_sign(self.s, d) { neg_mod(1, p) } else { 1 };
        let mut out = self.s_total(x).mul_left(&q, c);
        out.e_odd = self.s > 0 && d.rem_euclid(2) == 1;
        out
    }
}
