//! `R_s N` with its basis `K_s^± St_s(N)`, its embedding into `Γ_s ⊗ N` and the
//! Steenrod action pulled back through that embedding.
//!
//! A basis element `k St_s(n)` with `k = M̃_I 𝔢_s^a Q^B` is stored in Γ form as
//! `(R_I Q_{s,0}^c Q^B, n)` where `2c + |I| = a + |n|`; its image in `Γ_s ⊗ N` is
//! `(-1)^{s⌊|n|/2⌋} R_I Q_{s,0}^c Q^B · S_s(n)`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use super::ambient::Ambient;
use super::total::{st_sign, TotalPower};
use super::RfunctorError;
use crate::fpla::{neg_mod, FpVec};
use crate::invariants::gamma::format_monomial;
use crate::invariants::{ks_monomials, GammaAction, GammaMonomial, KsMonomial};
use crate::steenrod::{Letter, ModuleWindow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    /// `R_s N = K_s^+ St_s(N^even) ⊕ K_s^- St_s(N^odd)`.
    Plus,
    /// `R_s^- N`, the complementary eigenspace.
    Minus,
    /// `R̃_s N = K_s St_s(N)`.
    Full,
}

/// The `R_s N` basis in one degree, in `(module index, monomial)` order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsBasis {
    pub degree: i32,
    pub elements: Vec<(usize, GammaMonomial)>,
    index: HashMap<(usize, GammaMonomial), usize>,
}

impl RsBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, x: usize, g: &GammaMonomial) -> Option<usize> {
        self.index.get(&(x, g.clone())).copied()
    }
}

/// Γ monomials of degree `d` with `2 e0 + |I| >= bound` (no bound at `s = 0`).
pub fn gamma_monomials(p: u32, s: usize, d: i64, bound: i64) -> Vec<GammaMonomial> {
    let mut out = Vec::new();
    if s == 0 {
        if d == 0 {
            out.push(GammaMonomial::one(0));
        }
        return out;
    }
    let ps = (p as i64).pow(s as u32);
    let pw = |j: usize| (p as i64).pow(j as u32);
    let q0 = 2 * (ps - 1);
    let qdeg: Vec<i64> = (1..s).map(|i| 2 * (ps - pw(i))).collect();
    for mask in 0u32..(1 << s) {
        let k = mask.count_ones() as i64;
        let rd: i64 = (0..s).filter(|j| mask & (1 << j) != 0).map(|j| 2 * (ps - pw(j)) - 1).sum();
        // e0 >= ceil((bound - |I|) / 2)
        let e0_min = (bound - k + 1).div_euclid(2);
        let budget = d - rd - e0_min * q0;
        if budget < 0 {
            continue;
        }
        let mut e = vec![0u32; s - 1];
        #[allow(clippy::too_many_arguments)]
        fn rec(i: usize, used: i64, budget: i64, qdeg: &[i64], base: i64, q0: i64, mask: u32, e: &mut Vec<u32>, out: &mut Vec<GammaMonomial>) {
            if i == qdeg.len() {
                let rest = base - used;
                if rest.rem_euclid(q0) == 0 {
                    out.push(GammaMonomial { mask, e0: rest.div_euclid(q0) as i32, e: e.clone() });
                }
                return;
            }
            let mut x = 0;
            while used + x as i64 * qdeg[i] <= budget {
                e[i] = x;
                rec(i + 1, used + x as i64 * qdeg[i], budget, qdeg, base, q0, mask, e, out);
                x += 1;
            }
            e[i] = 0;
        }
        rec(0, 0, budget, &qdeg, d - rd, q0, mask, &mut e, &mut out);
    }
    out
}

/// `R_s N` for a module window `N`.
#[derive(Debug)]
pub struct RsSpace {
    p: u32,
    s: usize,
    total: TotalPower,
    module: Arc<ModuleWindow>,
    bases: Mutex<HashMap<i32, Arc<RsBasis>>>,
    gamma_action: OnceLock<Result<GammaAction, String>>,
}

impl RsSpace {
    pub fn new(module: Arc<ModuleWindow>, s: usize) -> Self {
        RsSpace {
            p: module.prime(),
            s,
            total: TotalPower::new(Arc::clone(&module), s),
            module,
            bases: Mutex::new(HashMap::new()),
            gamma_action: OnceLock::new(),
        }
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn rank(&self) -> usize {
        self.s
    }

    pub fn module(&self) -> &Arc<ModuleWindow> {
        &self.module
    }

    pub fn total(&self) -> &TotalPower {
        &self.total
    }

    /// Sign of the expansion of `(g, x)`.
    pub fn sign(&self, x: usize) -> u32 {
        if st_sign(self.s, self.module.degree_of(x)) {
            self.p - 1
        } else {
            1
        }
    }

    /// Lowest degree in which `R_s N` can be nonzero.
    pub fn connectivity(&self) -> Option<i64> {
        let lo = self.module.occupied()?.0 as i64;
        Some((self.p as i64).pow(self.s as u32) * lo)
    }

    /// The basis of `R_s N` in degree `d`.
    pub fn basis(&self, d: i32) -> Arc<RsBasis> {
        if let Some(b) = self.bases.lock().unwrap().get(&d) {
            return Arc::clone(b);
        }
        let mut elements = Vec::new();
        for x in 0..self.module.total_dim() {
            let n = self.module.degree_of(x);
            for g in gamma_monomials(self.p, self.s, (d - n) as i64, n as i64) {
                elements.push((x, g));
            }
        }
        elements.sort();
        let index = elements.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let b = Arc::new(RsBasis { degree: d, elements, index });
        self.bases.lock().unwrap().insert(d, Arc::clone(&b));
        b
    }

    /// `K_s^± St_s(N)` enumerated from `K_s` monomials (independent of the Γ form).
    pub fn ks_basis(&self, d: i32, part: Part) -> Vec<(KsMonomial, usize)> {
        let mut out = Vec::new();
        let ps = (self.p as i64).pow(self.s as u32);
        for x in 0..self.module.total_dim() {
            let n = self.module.degree_of(x) as i64;
            for k in ks_monomials(self.p, self.s, d as i64 - ps * n) {
                let plus = self.s == 0 || k.parity() as i64 == n.rem_euclid(2);
                let keep = match part {
                    Part::Plus => plus,
                    Part::Minus => !plus,
                    Part::Full => true,
                };
                if keep {
                    out.push((k, x));
                }
            }
        }
        out
    }

    /// `KsMonomial` form of a Γ-form basis element.
    pub fn to_ks(&self, x: usize, g: &GammaMonomial) -> KsMonomial {
        if self.s == 0 {
            return KsMonomial::one(0);
        }
        KsMonomial::from_gamma(g, self.module.degree_of(x) as i64).expect("basis element in R_s")
    }

    /// Image of a basis element in `Γ_s ⊗ N`.
    pub fn expand(&self, x: usize, g: &GammaMonomial) -> Ambient {
        self.total.s_total(x).mul_left(g, self.sign(x))
    }

    pub fn expand_vector(&self, d: i32, v: &FpVec) -> Ambient {
        let b = self.basis(d);
        let mut out = Ambient::zero(self.p, self.s);
        for (i, c) in v.iter() {
            let (x, g) = &b.elements[i];
            out.add_scaled(&self.expand(*x, g), c);
        }
        out
    }

    /// Is `(g, x)` a basis element of `R_s N`?
    pub fn admits(&self, x: usize, g: &GammaMonomial) -> bool {
        if self.s == 0 {
            return *g == GammaMonomial::one(0);
        }
        2 * g.e0 as i64 + g.mask.count_ones() as i64 >= self.module.degree_of(x) as i64
    }

    /// Express an element of `Γ_s ⊗ N` in the basis of `R_s N` in degree `d`,
    /// by elimination on the lowest module degree.
    pub fn pullback(&self, d: i32, a: &Ambient) -> Result<FpVec, RfunctorError> {
        let b = self.basis(d);
        let mut rest = a.clone();
        let mut out = BTreeMap::new();
        while let Some((x, g, c)) = rest.leading() {
            let g = g.clone();
            let Some(i) = b.index_of(x, &g) else {
                return Err(RfunctorError::NotInImage {
                    s: self.s,
                    degree: d,
                    witness: format!("{c} * {} ⊗ {}", format_monomial(&g, self.s), self.module.name(x)),
                });
            };
            let coef = (c as u64 * self.sign(x) as u64 % self.p as u64) as u32;
            let e = out.entry(i).or_insert(0u32);
            *e = (*e + coef) % self.p;
            rest.add_scaled(&self.expand(x, &g), neg_mod(coef, self.p));
        }
        Ok(FpVec::from_map(out))
    }

    fn gamma_action(&self) -> Result<&GammaAction, RfunctorError> {
        self.gamma_action
            .get_or_init(|| GammaAction::new(self.p, self.s).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| RfunctorError::Unsupported(e.clone()))
    }

    /// The diagonal action of `β` or `P^i` on `Γ_s ⊗ N`.
    pub fn act_ambient(&self, op: Letter, a: &Ambient) -> Result<Ambient, RfunctorError> {
        let p = self.p;
        let act = self.gamma_action()?;
        let mut out = Ambient::zero(p, self.s);
        for ((x, g), &c) in a.terms() {
            let gm = crate::invariants::GammaElement::monomial(p, self.s, g.clone(), c);
            let ux = FpVec::unit(*x);
            match op {
                Letter::Beta => {
                    out.add_scaled(&Ambient::pure(&act.beta(&gm)?, &ux), 1);
                    let sign = if g.is_odd() { p - 1 } else { 1 };
                    out.add_scaled(&Ambient::pure(&gm, self.module.beta_of(*x)), sign);
                }
                Letter::P(i) => {
                    for j in 0..=i {
                        let v = self.module.power_of(i - j, *x);
                        if v.is_zero() {
                            continue;
                        }
                        out.add_scaled(&Ambient::pure(&act.power(&gm, j)?, &v), 1);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `op` applied to an element of `R_s N` in degree `d`, pulled back into `R_s N`.
    pub fn act(&self, op: Letter, d: i32, v: &FpVec) -> Result<FpVec, RfunctorError> {
        let img = self.act_ambient(op, &self.expand_vector(d, v))?;
        self.pullback(d + op.degree(self.p), &img).map_err(|e| match e {
            RfunctorError::NotInImage { s, degree, witness } => RfunctorError::StabilityViolation { s, degree, witness },
            e => e,
        })
    }
}
