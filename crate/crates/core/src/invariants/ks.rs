//! The algebras `K_s = Λ(M̃_{s,i}) ⊗ F_p[𝔢_s, Q_{s,1}, ..., Q_{s,s-1}]` and the
//! decomposition of `K_s` monomials through `K_1 ⊗ St_1(K_{s-1})`.

use std::collections::BTreeMap;
use std::fmt;

use super::bv::{exterior_sign, st1, BVElement};
use super::classes::{dickson, mui, MuiClass};
use super::gamma::GammaMonomial;
use super::InvariantsError;
use crate::fpla::neg_mod;

/// `M̃_I 𝔢_s^a Q_{s,1}^{b_1} ... Q_{s,s-1}^{b_{s-1}}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KsMonomial {
    pub mask: u32,
    pub a: u32,
    pub b: Vec<u32>,
}

impl KsMonomial {
    pub fn one(s: usize) -> Self {
        KsMonomial { mask: 0, a: 0, b: vec![0; s.saturating_sub(1)] }
    }

    pub fn degree(&self, p: u32, s: usize) -> i64 {
        if s == 0 {
            return 0;
        }
        let ps = (p as i64).pow(s as u32);
        let pw = |j: usize| (p as i64).pow(j as u32);
        let mut d = self.a as i64 * (ps - 1);
        for i in 0..s {
            if self.mask & (1 << i) != 0 {
                d += ps - 2 * pw(i);
            }
        }
        for (i, &x) in self.b.iter().enumerate() {
            d += x as i64 * 2 * (ps - pw(i + 1));
        }
        d
    }

    /// Eigenvalue parity: `K_s^+` monomials are even, `K_s^-` odd.
    pub fn parity(&self) -> u32 {
        (self.mask.count_ones() + self.a) % 2
    }

    /// Degree parity (differs from the eigenvalue parity by `a`).
    pub fn degree_parity(&self) -> u32 {
        self.mask.count_ones() % 2
    }

    /// As an explicit polynomial in `H*(BV_s)`.
    pub fn to_bv(&self, p: u32, s: usize) -> Result<BVElement, InvariantsError> {
        let mut r = BVElement::one(p, s);
        for i in 0..s {
            if self.mask & (1 << i) != 0 {
                r = r.mul(&mui(p, s, MuiClass::MTilde(i))?);
            }
        }
        r = r.mul(&mui(p, s, MuiClass::E)?.pow(self.a));
        for (i, &x) in self.b.iter().enumerate() {
            r = r.mul(&dickson(p, s, i + 1)?.pow(x));
        }
        Ok(r)
    }

    /// `k 𝔢_s^{n}` rewritten as `R_I Q_{s,0}^c Q^B` when `a + n - |I|` is even.
    pub fn to_gamma(&self, n: i64) -> Option<GammaMonomial> {
        let k = self.a as i64 + n - self.mask.count_ones() as i64;
        if k.rem_euclid(2) != 0 {
            return None;
        }
        Some(GammaMonomial { mask: self.mask, e0: (k / 2) as i32, e: self.b.clone() })
    }

    /// Inverse of [`to_gamma`]: `R_I Q_0^c Q^B = M̃_I 𝔢^{2c + |I| - n} Q^B · 𝔢^n`.
    pub fn from_gamma(g: &GammaMonomial, n: i64) -> Option<KsMonomial> {
        let a = 2 * g.e0 as i64 + g.mask.count_ones() as i64 - n;
        (a >= 0).then(|| KsMonomial { mask: g.mask, a: a as u32, b: g.e.clone() })
    }

    fn mul(&self, o: &KsMonomial) -> Option<(KsMonomial, bool)> {
        let neg = exterior_sign(self.mask, o.mask)?;
        Some((KsMonomial { mask: self.mask | o.mask, a: self.a + o.a, b: self.b.iter().zip(&o.b).map(|(x, y)| x + y).collect() }, neg))
    }
}

/// All `K_s` monomials of degree exactly `d`.
pub fn ks_monomials(p: u32, s: usize, d: i64) -> Vec<KsMonomial> {
    let mut out = Vec::new();
    if s == 0 {
        if d == 0 {
            out.push(KsMonomial::one(0));
        }
        return out;
    }
    let ps = (p as i64).pow(s as u32);
    let pw = |j: usize| (p as i64).pow(j as u32);
    for mask in 0u32..(1 << s) {
        let md: i64 = (0..s).filter(|i| mask & (1 << i) != 0).map(|i| ps - 2 * pw(i)).sum();
        let rest = d - md;
        if rest < 0 {
            continue;
        }
        let qdeg: Vec<i64> = (1..s).map(|i| 2 * (ps - pw(i))).collect();
        let mut b = vec![0u32; s - 1];
        fn rec(k: usize, rest: i64, qdeg: &[i64], e: i64, mask: u32, b: &mut Vec<u32>, out: &mut Vec<KsMonomial>) {
            if k == qdeg.len() {
                if rest % e == 0 {
                    out.push(KsMonomial { mask, a: (rest / e) as u32, b: b.clone() });
                }
                return;
            }
            let mut x = 0;
            while x as i64 * qdeg[k] <= rest {
                b[k] = x;
                rec(k + 1, rest - x as i64 * qdeg[k], qdeg, e, mask, b, out);
                x += 1;
            }
            b[k] = 0;
        }
        rec(0, rest, &qdeg, ps - 1, mask, &mut b, &mut out);
    }
    out.sort();
    out
}

impl fmt::Display for KsMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ms: Vec<String> = (0..32).filter(|i| self.mask & (1 << i) != 0).map(|i: u32| i.to_string()).collect();
        let bs: Vec<String> = self.b.iter().map(|x| x.to_string()).collect();
        write!(f, "M{{{}}} e^{} Q^({})", ms.join(","), self.a, bs.join(","))
    }
}

/// `M̃_{1,0}^ε 𝔢_1^j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct K1Monomial {
    pub eps: u8,
    pub j: u32,
}

impl K1Monomial {
    pub fn degree(&self, p: u32) -> i64 {
        self.eps as i64 * (p as i64 - 2) + self.j as i64 * (p as i64 - 1)
    }
}

/// A sum of `κ St_1(a)` with `κ ∈ K_1`, `a ∈ K_{s-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Twisted {
    p: u32,
    s: usize,
    terms: BTreeMap<(K1Monomial, KsMonomial), u32>,
}

impl Twisted {
    pub fn zero(p: u32, s: usize) -> Self {
        Twisted { p, s, terms: BTreeMap::new() }
    }

    pub fn term(p: u32, s: usize, k: K1Monomial, a: KsMonomial, c: i64) -> Self {
        let mut t = Self::zero(p, s);
        t.add_term(k, a, crate::fpla::reduce(c, p));
        t
    }

    pub fn one(p: u32, s: usize) -> Self {
        Self::term(p, s, K1Monomial { eps: 0, j: 0 }, KsMonomial::one(s - 1), 1)
    }

    pub fn terms(&self) -> &BTreeMap<(K1Monomial, KsMonomial), u32> {
        &self.terms
    }

    fn add_term(&mut self, k: K1Monomial, a: KsMonomial, c: u32) {
        let c = c % self.p;
        if c == 0 {
            return;
        }
        let key = (k, a);
        let e = self.terms.entry(key.clone()).or_insert(0);
        *e = (*e + c) % self.p;
        if *e == 0 {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, o: &Twisted) -> Twisted {
        let mut r = self.clone();
        for ((k, a), &c) in &o.terms {
            r.add_term(*k, a.clone(), c);
        }
        r
    }

    pub fn neg(&self) -> Twisted {
        let mut r = Self::zero(self.p, self.s);
        for ((k, a), &c) in &self.terms {
            r.add_term(*k, a.clone(), neg_mod(c, self.p));
        }
        r
    }

    /// `(κ St_1(a))(κ' St_1(a')) = (-1)^{|a||κ'| + |a||a'|} κκ' St_1(aa')`.
    pub fn mul(&self, o: &Twisted) -> Twisted {
        let p = self.p;
        let mut r = Self::zero(p, self.s);
        for ((k, a), &c) in &self.terms {
            for ((k2, a2), &c2) in &o.terms {
                if k.eps + k2.eps > 1 {
                    continue;
                }
                let Some((aa, mut neg)) = a.mul(a2) else { continue };
                // M̃_{1,0} is odd: κ κ' needs no reordering sign since κ' comes after κ.
                let pa = a.degree_parity();
                if pa == 1 && k2.eps == 1 {
                    neg = !neg;
                }
                if pa == 1 && a2.degree_parity() == 1 {
                    neg = !neg;
                }
                let kk = K1Monomial { eps: k.eps + k2.eps, j: k.j + k2.j };
                let v = (c as u64 * c2 as u64 % p as u64) as u32;
                r.add_term(kk, aa, if neg { neg_mod(v, p) } else { v });
            }
        }
        r
    }

    pub fn pow(&self, n: u32) -> Twisted {
        let mut acc = Self::one(self.p, self.s);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Evaluate in `H*(BV_s)` using the explicit `St_1`.
    pub fn to_bv(&self) -> Result<BVElement, InvariantsError> {
        let (p, s) = (self.p, self.s);
        let mut r = BVElement::zero(p, s);
        let v = BVElement::v(p, s, 1);
        let m1 = BVElement::u(p, s, 1).mul(&v.pow((p - 3) / 2));
        let e1 = v.pow((p - 1) / 2);
        for ((k, a), &c) in &self.terms {
            let mut kappa = e1.pow(k.j);
            if k.eps == 1 {
                kappa = m1.mul(&kappa);
            }
            r = r.add(&kappa.mul(&st1(&a.to_bv(p, s - 1)?)).scale(c));
        }
        Ok(r)
    }
}

fn ks_gen(s: usize, f: impl FnOnce(&mut KsMonomial)) -> KsMonomial {
    let mut m = KsMonomial::one(s);
    f(&mut m);
    m
}

/// Images of the generators of `K_s` (`s >= 2`) in `K_1 ⊗ St_1(K_{s-1})`.
pub struct KsDecomposer {
    p: u32,
    s: usize,
    e: Twisted,
    q: Vec<Twisted>,
    m: Vec<Twisted>,
}

impl KsDecomposer {
    pub fn new(p: u32, s: usize) -> Self {
        assert!(s >= 2);
        let t = s - 1;
        let k1 = |eps, j| K1Monomial { eps, j };
        // Q_{t,i} as a K_t monomial (Q_{t,0} = 𝔢_t^2, Q_{t,t} = 1).
        let qk = |i: usize| -> Option<KsMonomial> {
            if i > t {
                None
            } else if i == t {
                Some(KsMonomial::one(t))
            } else if i == 0 {
                Some(ks_gen(t, |m| m.a = 2))
            } else {
                Some(ks_gen(t, |m| m.b[i - 1] = 1))
            }
        };
        let mk = |i: usize| -> Option<KsMonomial> { (i < t).then(|| ks_gen(t, |m| m.mask = 1 << i)) };
        let e = Twisted::term(p, s, k1(0, 1), ks_gen(t, |m| m.a = 1), 1);
        let mut q = vec![Twisted::zero(p, s)];
        for i in 1..s {
            let pi = p.pow(i as u32);
            let mut x = Twisted::zero(p, s);
            if let Some(a) = qk(i) {
                x = x.add(&Twisted::term(p, s, k1(0, 2 * pi), a, 1));
            }
            if let Some(a) = qk(i - 1) {
                x = x.add(&Twisted::term(p, s, k1(0, 0), a, 1));
            }
            q.push(x);
        }
        let mut m = Vec::new();
        for i in 0..s {
            let mut x = Twisted::zero(p, s);
            if i == 0 {
                x = x.add(&Twisted::term(p, s, k1(1, 0), ks_gen(t, |m| m.a = 1), 1));
                if let Some(a) = mk(0) {
                    x = x.add(&Twisted::term(p, s, k1(0, 2), a, -1));
                }
            } else {
                if let Some(a) = mk(i - 1) {
                    x = x.add(&Twisted::term(p, s, k1(0, 0), a, -1));
                }
                if let Some(a) = mk(i) {
                    x = x.add(&Twisted::term(p, s, k1(0, 2 * p.pow(i as u32)), a, -1));
                }
            }
            m.push(x);
        }
        KsDecomposer { p, s, e, q, m }
    }

    pub fn generator_e(&self) -> &Twisted {
        &self.e
    }

    pub fn generator_q(&self, i: usize) -> &Twisted {
        &self.q[i]
    }

    pub fn generator_m(&self, i: usize) -> &Twisted {
        &self.m[i]
    }

    /// A `K_s` monomial as `Σ κ St_1(a)`.
    pub fn decompose(&self, k: &KsMonomial) -> Twisted {
        let mut r = Twisted::one(self.p, self.s);
        for i in 0..self.s {
            if k.mask & (1 << i) != 0 {
                r = r.mul(&self.m[i]);
            }
        }
        r = r.mul(&self.e.pow(k.a));
        for (i, &x) in k.b.iter().enumerate() {
            r = r.mul(&self.q[i + 1].pow(x));
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_round_trip() {
        let k = KsMonomial { mask: 0b1, a: 3, b: vec![2] };
        let g = k.to_gamma(4).unwrap();
        assert_eq!(g.e0, 3);
        assert_eq!(KsMonomial::from_gamma(&g, 4), Some(k));
    }

    #[test]
    fn monomial_counts() {
        // K_1: degree 2n(p-1) has 𝔢^{2n}; M̃𝔢 sits in degree 2p-3.
        let p = 3;
        assert_eq!(ks_monomials(p, 1, 0).len(), 1);
        assert_eq!(ks_monomials(p, 1, 2).len(), 1);
        assert_eq!(ks_monomials(p, 1, 1).len(), 1);
        for d in 0..40 {
            for k in ks_monomials(p, 2, d) {
                assert_eq!(k.degree(p, 2), d);
            }
        }
    }
}
