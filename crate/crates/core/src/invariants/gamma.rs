//! The algebras `Γ_s = Λ(R_{s,j}) ⊗ F_p[Q_{s,0}^{±1}, Q_{s,1}, ..., Q_{s,s-1}]`,
//! the coproducts `ψ_{s,t}`, `θ_s`, `∂_s` and `φ_s`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use super::bv::exterior_sign;
use crate::fpla::neg_mod;
use crate::steenrod::MilnorBasis;

/// `R_I Q_{s,0}^{e0} Q_{s,1}^{e_1} ... Q_{s,s-1}^{e_{s-1}}`; bit `j` of `mask` is `R_{s,j}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GammaMonomial {
    pub mask: u32,
    pub e0: i32,
    /// Exponents of `Q_{s,1}, ..., Q_{s,s-1}`.
    pub e: Vec<u32>,
}

impl GammaMonomial {
    pub fn one(s: usize) -> Self {
        GammaMonomial { mask: 0, e0: 0, e: vec![0; s.saturating_sub(1)] }
    }

    pub fn rank(&self) -> usize {
        self.e.len() + 1
    }

    pub fn is_odd(&self) -> bool {
        self.mask.count_ones() % 2 == 1
    }

    pub fn degree(&self, p: u32, s: usize) -> i64 {
        if s == 0 {
            return 0;
        }
        let ps = (p as i64).pow(s as u32);
        let pw = |j: usize| (p as i64).pow(j as u32);
        let mut d = self.e0 as i64 * 2 * (ps - 1);
        for j in 0..s {
            if self.mask & (1 << j) != 0 {
                d += 2 * (ps - pw(j)) - 1;
            }
        }
        for (i, &x) in self.e.iter().enumerate() {
            d += x as i64 * 2 * (ps - pw(i + 1));
        }
        d
    }

    /// Product of monomials with its sign, or `None` if it vanishes.
    pub fn mul(&self, o: &GammaMonomial) -> Option<(GammaMonomial, bool)> {
        let neg = exterior_sign(self.mask, o.mask)?;
        Some((
            GammaMonomial { mask: self.mask | o.mask, e0: self.e0 + o.e0, e: self.e.iter().zip(&o.e).map(|(a, b)| a + b).collect() },
            neg,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaElement {
    p: u32,
    s: usize,
    terms: BTreeMap<GammaMonomial, u32>,
}

impl GammaElement {
    pub fn zero(p: u32, s: usize) -> Self {
        GammaElement { p, s, terms: BTreeMap::new() }
    }

    pub fn one(p: u32, s: usize) -> Self {
        Self::monomial(p, s, GammaMonomial::one(s), 1)
    }

    pub fn monomial(p: u32, s: usize, m: GammaMonomial, c: u32) -> Self {
        let mut r = Self::zero(p, s);
        r.add_term(m, c);
        r
    }

    /// `Q_{s,i}`, with `Q_{s,s} = 1` and zero for `i > s`.
    pub fn q(p: u32, s: usize, i: usize) -> Self {
        if i > s {
            return Self::zero(p, s);
        }
        let mut m = GammaMonomial::one(s);
        if i == 0 && s > 0 {
            m.e0 = 1;
        } else if i < s {
            m.e[i - 1] = 1;
        }
        Self::monomial(p, s, m, 1)
    }

    pub fn q0_pow(p: u32, s: usize, n: i32) -> Self {
        let mut m = GammaMonomial::one(s);
        m.e0 = n;
        Self::monomial(p, s, m, 1)
    }

    /// `R_{s,j}`, zero for `j >= s`.
    pub fn r(p: u32, s: usize, j: usize) -> Self {
        if j >= s {
            return Self::zero(p, s);
        }
        let mut m = GammaMonomial::one(s);
        m.mask = 1 << j;
        Self::monomial(p, s, m, 1)
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn rank(&self) -> usize {
        self.s
    }

    pub fn terms(&self) -> &BTreeMap<GammaMonomial, u32> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &GammaMonomial) -> u32 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: GammaMonomial, c: u32) {
        let c = c % self.p;
        if c == 0 {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert(0);
        *e = (*e + c) % self.p;
        if *e == 0 {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, o: &GammaElement) -> GammaElement {
        let mut r = self.clone();
        for (m, &c) in &o.terms {
            r.add_term(m.clone(), c);
        }
        r
    }

    pub fn sub(&self, o: &GammaElement) -> GammaElement {
        self.add(&o.scale(self.p - 1))
    }

    pub fn scale(&self, c: u32) -> GammaElement {
        let mut r = Self::zero(self.p, self.s);
        for (m, &d) in &self.terms {
            r.add_term(m.clone(), (c as u64 * d as u64 % self.p as u64) as u32);
        }
        r
    }

    pub fn mul(&self, o: &GammaElement) -> GammaElement {
        let p = self.p;
        let mut r = Self::zero(p, self.s);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &o.terms {
                if let Some((m, neg)) = a.mul(b) {
                    let c = (ca as u64 * cb as u64 % p as u64) as u32;
                    r.add_term(m, if neg { neg_mod(c, p) } else { c });
                }
            }
        }
        r
    }

    pub fn pow(&self, n: u32) -> GammaElement {
        let mut acc = Self::one(self.p, self.s);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Common degree, if homogeneous and nonzero.
    pub fn degree(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(|m| m.degree(self.p, self.s));
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }
}

impl fmt::Display for GammaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("{c} * {}", format_monomial(m, self.s))).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

pub fn format_monomial(m: &GammaMonomial, s: usize) -> String {
    let rs: Vec<String> = (0..s).filter(|j| m.mask & (1 << j) != 0).map(|j| j.to_string()).collect();
    let mut es = vec![m.e0.to_string()];
    es.extend(m.e.iter().map(|x| x.to_string()));
    format!("R{{{}}} Q^({})", rs.join(","), es.join(","))
}

/// An element of `Γ_{s_1} ⊗ ... ⊗ Γ_{s_k}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaTensor {
    p: u32,
    ranks: Vec<usize>,
    terms: BTreeMap<Vec<GammaMonomial>, u32>,
}

impl GammaTensor {
    pub fn zero(p: u32, ranks: Vec<usize>) -> Self {
        GammaTensor { p, ranks, terms: BTreeMap::new() }
    }

    pub fn one(p: u32, ranks: Vec<usize>) -> Self {
        let key = ranks.iter().map(|&s| GammaMonomial::one(s)).collect();
        let mut t = Self::zero(p, ranks);
        t.add_term(key, 1);
        t
    }

    pub fn pure(factors: &[GammaElement]) -> Self {
        let p = factors[0].p;
        let mut t = Self::one(p, factors.iter().map(|f| f.s).collect());
        for (k, f) in factors.iter().enumerate() {
            let mut part = Self::zero(p, t.ranks.clone());
            for (m, &c) in &f.terms {
                let mut key: Vec<GammaMonomial> = t.ranks.iter().map(|&s| GammaMonomial::one(s)).collect();
                key[k] = m.clone();
                part.add_term(key, c);
            }
            t = t.mul(&part);
        }
        t
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn terms(&self) -> &BTreeMap<Vec<GammaMonomial>, u32> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, key: Vec<GammaMonomial>, c: u32) {
        let c = c % self.p;
        if c == 0 {
            return;
        }
        let e = self.terms.entry(key.clone()).or_insert(0);
        *e = (*e + c) % self.p;
        if *e == 0 {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, o: &GammaTensor) -> GammaTensor {
        let mut r = self.clone();
        for (k, &c) in &o.terms {
            r.add_term(k.clone(), c);
        }
        r
    }

    /// Product with the Koszul sign `(a_1 ⊗ a_2)(b_1 ⊗ b_2) = (-1)^{|a_2||b_1|} a_1 b_1 ⊗ a_2 b_2`.
    pub fn mul(&self, o: &GammaTensor) -> GammaTensor {
        self.mul_filtered(o, |_| true)
    }

    pub fn mul_filtered(&self, o: &GammaTensor, keep: impl Fn(&[GammaMonomial]) -> bool) -> GammaTensor {
        let p = self.p;
        let mut r = Self::zero(p, self.ranks.clone());
        for (a, &ca) in &self.terms {
            'outer: for (b, &cb) in &o.terms {
                let mut neg = false;
                // sign from moving b_j past a_i for i > j
                for j in 0..b.len() {
                    if !b[j].is_odd() {
                        continue;
                    }
                    for ai in &a[j + 1..] {
                        if ai.is_odd() {
                            neg = !neg;
                        }
                    }
                }
                let mut key = Vec::with_capacity(a.len());
                for (x, y) in a.iter().zip(b) {
                    let Some((m, n)) = x.mul(y) else { continue 'outer };
                    neg ^= n;
                    key.push(m);
                }
                if !keep(&key) {
                    continue;
                }
                let c = (ca as u64 * cb as u64 % p as u64) as u32;
                r.add_term(key, if neg { neg_mod(c, p) } else { c });
            }
        }
        r
    }

    /// Replace factor `k` (of rank `s + t`) by its image under `ψ_{s,t}`.
    pub fn apply_psi(&self, k: usize, s: usize, t: usize) -> GammaTensor {
        assert_eq!(self.ranks[k], s + t);
        let mut ranks = self.ranks.clone();
        ranks.splice(k..=k, [s, t]);
        let mut r = Self::zero(self.p, ranks);
        for (key, &c) in &self.terms {
            let img = psi(self.p, s, t, &key[k]);
            for (pair, &d) in &img.terms {
                let mut nk = key.clone();
                nk.splice(k..=k, pair.iter().cloned());
                r.add_term(nk, (c as u64 * d as u64 % self.p as u64) as u32);
            }
        }
        r
    }
}

impl fmt::Display for GammaTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| {
                let fs: Vec<String> = k.iter().zip(&self.ranks).map(|(m, &s)| format_monomial(m, s)).collect();
                format!("{c} * {}", fs.join(" ⊗ "))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Images of single generators under `ψ_{s,t}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Gen {
    Q(usize),
    R(usize),
}

type PsiKey = (u32, usize, usize, Gen);

fn psi_cache() -> &'static Mutex<HashMap<PsiKey, Arc<GammaTensor>>> {
    static C: OnceLock<Mutex<HashMap<PsiKey, Arc<GammaTensor>>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `Q_{s,k}^{n}` as a monomial of `Γ_s`, or `None` when `Q_{s,k} = 0`.
fn q_power_monomial(s: usize, k: i64, n: u32) -> Option<GammaMonomial> {
    if k < 0 || k > s as i64 {
        return None;
    }
    let mut m = GammaMonomial::one(s);
    let k = k as usize;
    if k == s {
        return Some(m);
    }
    if k == 0 {
        m.e0 = n as i32;
    } else {
        m.e[k - 1] = n;
    }
    Some(m)
}

fn psi_generator(p: u32, s: usize, t: usize, g: Gen) -> Arc<GammaTensor> {
    let key = (p, s, t, g);
    if let Some(r) = psi_cache().lock().unwrap().get(&key) {
        return Arc::clone(r);
    }
    let pt = p.pow(t as u32);
    let mut r = GammaTensor::zero(p, vec![s, t]);
    // Σ_j Q_{s,i-j}^{p^j} Q_{s,0}^{p^t - p^j} ⊗ X_j for X_j = Q_{t,j} or R_{t,j}
    let sum_over_j = |r: &mut GammaTensor, i: usize, j_max: usize, right: &dyn Fn(usize) -> Option<GammaMonomial>| {
        for j in 0..=j_max {
            let pj = p.pow(j as u32);
            let Some(mut left) = q_power_monomial(s, i as i64 - j as i64, pj) else { continue };
            left.e0 += (pt - pj) as i32;
            let Some(rt) = right(j) else { continue };
            r.add_term(vec![left, rt], 1);
        }
    };
    match g {
        Gen::Q(i) => sum_over_j(&mut r, i, t, &|j| q_power_monomial(t, j as i64, 1)),
        Gen::R(i) => {
            if i < s {
                let mut left = GammaMonomial::one(s);
                left.mask = 1 << i;
                left.e0 = (pt - 1) as i32;
                let mut right = GammaMonomial::one(t);
                right.e0 = 1;
                r.add_term(vec![left, right], 1);
            }
            if t > 0 {
                sum_over_j(&mut r, i, t - 1, &|j| {
                    let mut m = GammaMonomial::one(t);
                    m.mask = 1 << j;
                    Some(m)
                });
            }
        }
    }
    let r = Arc::new(r);
    psi_cache().lock().unwrap().insert(key, Arc::clone(&r));
    r
}

/// `ψ_{s,t}` on a monomial of `Γ_{s+t}`, keeping only partial products accepted by `keep`.
pub fn psi_filtered(p: u32, s: usize, t: usize, m: &GammaMonomial, keep: impl Fn(&[GammaMonomial]) -> bool) -> GammaTensor {
    if s == 0 || t == 0 {
        let mut r = GammaTensor::zero(p, vec![s, t]);
        let key = if s == 0 { vec![GammaMonomial::one(0), m.clone()] } else { vec![m.clone(), GammaMonomial::one(0)] };
        r.add_term(key, 1);
        return r;
    }
    // Q_{s+t,0}^{e0} ↦ Q_{s,0}^{p^t e0} ⊗ Q_{t,0}^{e0}
    let mut left = GammaMonomial::one(s);
    left.e0 = m.e0 * p.pow(t as u32) as i32;
    let mut right = GammaMonomial::one(t);
    right.e0 = m.e0;
    let mut acc = GammaTensor::zero(p, vec![s, t]);
    acc.add_term(vec![left, right], 1);
    for j in 0..(s + t) {
        if m.mask & (1 << j) != 0 {
            acc = acc.mul_filtered(&psi_generator(p, s, t, Gen::R(j)), &keep);
        }
    }
    for (i, &n) in m.e.iter().enumerate() {
        let g = psi_generator(p, s, t, Gen::Q(i + 1));
        for _ in 0..n {
            acc = acc.mul_filtered(&g, &keep);
        }
    }
    acc
}

/// `ψ_{s,t} : Γ_{s+t} → Γ_s ⊗ Γ_t` on a monomial.
pub fn psi(p: u32, s: usize, t: usize, m: &GammaMonomial) -> GammaTensor {
    psi_filtered(p, s, t, m, |_| true)
}

pub fn psi_element(g: &GammaElement, s: usize, t: usize) -> GammaTensor {
    assert_eq!(g.s, s + t);
    let mut r = GammaTensor::zero(g.p, vec![s, t]);
    for (m, &c) in &g.terms {
        for (k, &d) in &psi(g.p, s, t, m).terms {
            r.add_term(k.clone(), (c as u64 * d as u64 % g.p as u64) as u32);
        }
    }
    r
}

/// `θ_s` on a Milnor basis element's dual `τ^E ξ^R`:
/// `ξ_i ↦ (-1)^i Q_{s,i} Q_{s,0}^{-1}`, `τ_j ↦ (-1)^{j+1} R_{s,j} Q_{s,0}^{-1}`.
/// Returns a single signed monomial or `None` when zero.
pub fn theta_monomial(p: u32, s: usize, b: &MilnorBasis) -> Option<(GammaMonomial, u32)> {
    let mut m = GammaMonomial::one(s);
    let mut negative = false;
    for j in b.q_indices() {
        if j as usize >= s {
            return None;
        }
        m.mask |= 1 << j;
        m.e0 -= 1;
        if (j + 1) % 2 == 1 {
            negative = !negative;
        }
    }
    for (k, &r) in b.r.iter().enumerate() {
        let i = k + 1;
        if r == 0 {
            continue;
        }
        if i > s {
            return None;
        }
        m.e0 -= r as i32;
        if i < s {
            m.e[i - 1] += r;
        }
        if i % 2 == 1 && r % 2 == 1 {
            negative = !negative;
        }
    }
    // the dual of `Q_{j_1} ... Q_{j_k}` is `τ_{j_k} ... τ_{j_1}`
    let k = m.mask.count_ones();
    if (k * k.saturating_sub(1) / 2) % 2 == 1 {
        negative = !negative;
    }
    Some((m, if negative { p - 1 } else { 1 }))
}

pub fn theta(p: u32, s: usize, b: &MilnorBasis) -> GammaElement {
    match theta_monomial(p, s, b) {
        Some((m, c)) => GammaElement::monomial(p, s, m, c),
        None => GammaElement::zero(p, s),
    }
}

/// `∂_1`: the coefficient of `R_{1,0} Q_{1,0}^{-1}`.
pub fn partial_1(g: &GammaElement) -> u32 {
    assert_eq!(g.s, 1);
    g.coefficient(&w_monomial())
}

fn w_monomial() -> GammaMonomial {
    GammaMonomial { mask: 1, e0: -1, e: vec![] }
}

type PartialKey = (u32, usize, GammaMonomial);

fn partial_cache() -> &'static Mutex<HashMap<PartialKey, Arc<GammaElement>>> {
    static C: OnceLock<Mutex<HashMap<PartialKey, Arc<GammaElement>>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `∂_s = (Γ_{s-1} ⊗ ∂_1) ∘ ψ_{s-1,1}` on a monomial, cached.
pub fn partial_s_monomial(p: u32, s: usize, m: &GammaMonomial) -> Arc<GammaElement> {
    let key = (p, s, m.clone());
    if let Some(r) = partial_cache().lock().unwrap().get(&key) {
        return Arc::clone(r);
    }
    let mut out = GammaElement::zero(p, s - 1);
    if s == 1 {
        if *m == w_monomial() {
            out.add_term(GammaMonomial::one(0), 1);
        }
    } else if m.e0 < 0 {
        // The Γ_1 factor only gains Q_{1,0} exponents after the first step.
        let t = psi_filtered(p, s - 1, 1, m, |k| k[1].e0 <= -1);
        let w = w_monomial();
        for (k, &c) in &t.terms {
            if k[1] == w {
                out.add_term(k[0].clone(), c);
            }
        }
    }
    let out = Arc::new(out);
    partial_cache().lock().unwrap().insert(key, Arc::clone(&out));
    out
}

pub fn partial_s(g: &GammaElement) -> GammaElement {
    let mut out = GammaElement::zero(g.p, g.s - 1);
    for (m, &c) in &g.terms {
        out = out.add(&partial_s_monomial(g.p, g.s, m).scale(c));
    }
    out
}

/// `φ_s` on a Dickson monomial: `Q_{s,0} ↦ 0`, `Q_{s,j} ↦ Q_{s-1,j-1}^p`.
pub fn phi_s(p: u32, s: usize, g: &GammaElement) -> Result<GammaElement, super::InvariantsError> {
    let mut out = GammaElement::zero(p, s - 1);
    for (m, &c) in &g.terms {
        if m.mask != 0 || m.e0 < 0 {
            return Err(super::InvariantsError::NotDickson(format_monomial(m, s)));
        }
        if m.e0 > 0 {
            continue;
        }
        let mut img = GammaMonomial::one(s - 1);
        for (k, &n) in m.e.iter().enumerate() {
            // Q_{s,k+1} ↦ Q_{s-1,k}^p
            if k == 0 {
                img.e0 += (n * p) as i32;
            } else if k < s - 1 {
                img.e[k - 1] += n * p;
            }
        }
        out.add_term(img, c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products() {
        let p = 3;
        let r0 = GammaElement::r(p, 2, 0);
        assert!(r0.mul(&r0).is_zero());
        let q = GammaElement::q0_pow(p, 2, 1);
        assert_eq!(q.mul(&GammaElement::q0_pow(p, 2, -1)), GammaElement::one(p, 2));
        let w = GammaElement::r(p, 1, 0).mul(&GammaElement::q0_pow(p, 1, -1));
        assert!(w.mul(&w).is_zero());
        let r1 = GammaElement::r(p, 2, 1);
        assert_eq!(r1.mul(&r0), r0.mul(&r1).scale(p - 1));
    }

    #[test]
    fn psi_top_class() {
        let p = 3;
        let m = GammaMonomial { mask: 0, e0: 1, e: vec![0] };
        let t = psi(p, 1, 1, &m);
        let expect = GammaTensor::pure(&[GammaElement::q0_pow(p, 1, 3), GammaElement::q0_pow(p, 1, 1)]);
        assert_eq!(t, expect);
        let inv = GammaMonomial { mask: 0, e0: -1, e: vec![0] };
        let expect = GammaTensor::pure(&[GammaElement::q0_pow(p, 1, -3), GammaElement::q0_pow(p, 1, -1)]);
        assert_eq!(psi(p, 1, 1, &inv), expect);
    }

    #[test]
    fn theta_examples() {
        let p = 3;
        assert_eq!(theta(p, 1, &MilnorBasis::unit()), GammaElement::one(p, 1));
        assert_eq!(theta(p, 1, &MilnorBasis::p(vec![1])), GammaElement::q0_pow(p, 1, -1).scale(p - 1));
        let w = GammaElement::r(p, 1, 0).mul(&GammaElement::q0_pow(p, 1, -1));
        assert_eq!(theta(p, 1, &MilnorBasis::q(0)), w.scale(p - 1));
    }

    #[test]
    fn partial_examples() {
        let p = 3;
        let w = GammaElement::r(p, 1, 0).mul(&GammaElement::q0_pow(p, 1, -1));
        assert_eq!(partial_1(&w), 1);
        assert_eq!(partial_1(&GammaElement::one(p, 1)), 0);
        assert_eq!(partial_1(&GammaElement::q0_pow(p, 1, -1)), 0);
    }

    #[test]
    fn phi_examples() {
        let p = 3;
        assert!(phi_s(p, 2, &GammaElement::q(p, 2, 0)).unwrap().is_zero());
        assert_eq!(phi_s(p, 2, &GammaElement::q(p, 2, 1)).unwrap(), GammaElement::q0_pow(p, 1, 3));
        assert_eq!(phi_s(p, 2, &GammaElement::one(p, 2)).unwrap(), GammaElement::one(p, 1));
    }
}
