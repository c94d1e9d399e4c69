//! Polynomials in `H*(BV_s) = Λ(u_1..u_s) ⊗ F_p[v_1..v_s]`.

use std::collections::BTreeMap;
use std::fmt;

use crate::fpla::{neg_mod, reduce};

/// `u^{mask} v^{exps}` with exterior factors in ascending index order.
/// Bit `i` of `mask` is `u_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BVMonomial {
    pub mask: u32,
    pub exps: Vec<u32>,
}

impl BVMonomial {
    pub fn one(s: usize) -> Self {
        BVMonomial { mask: 0, exps: vec![0; s] }
    }

    pub fn degree(&self) -> i64 {
        self.mask.count_ones() as i64 + 2 * self.exps.iter().map(|&e| e as i64).sum::<i64>()
    }
}

/// Sign of the product `u^a u^b` after sorting, or `None` if a factor repeats.
pub(crate) fn exterior_sign(a: u32, b: u32) -> Option<bool> {
    if a & b != 0 {
        return None;
    }
    // Each u in `a` passes every u in `b` with a smaller index.
    let mut inversions = 0u32;
    let mut rest = a;
    while rest != 0 {
        let i = rest.trailing_zeros();
        inversions += (b & ((1u32 << i) - 1)).count_ones();
        rest &= rest - 1;
    }
    Some(inversions % 2 == 1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BVElement {
    p: u32,
    s: usize,
    terms: BTreeMap<BVMonomial, u32>,
}

impl BVElement {
    pub fn zero(p: u32, s: usize) -> Self {
        BVElement { p, s, terms: BTreeMap::new() }
    }

    pub fn one(p: u32, s: usize) -> Self {
        Self::monomial(p, BVMonomial::one(s), 1)
    }

    pub fn monomial(p: u32, m: BVMonomial, c: u32) -> Self {
        let mut e = Self::zero(p, m.exps.len());
        e.add_term(m, c);
        e
    }

    pub fn constant(p: u32, s: usize, c: i64) -> Self {
        Self::monomial(p, BVMonomial::one(s), reduce(c, p))
    }

    /// `u_i`, 1-based.
    pub fn u(p: u32, s: usize, i: usize) -> Self {
        let mut m = BVMonomial::one(s);
        m.mask = 1 << (i - 1);
        Self::monomial(p, m, 1)
    }

    /// `v_i`, 1-based.
    pub fn v(p: u32, s: usize, i: usize) -> Self {
        let mut m = BVMonomial::one(s);
        m.exps[i - 1] = 1;
        Self::monomial(p, m, 1)
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn rank(&self) -> usize {
        self.s
    }

    pub fn terms(&self) -> &BTreeMap<BVMonomial, u32> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &BVMonomial) -> u32 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    /// The common degree of the terms, if homogeneous and nonzero.
    pub fn degree(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(|m| m.degree());
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn add_term(&mut self, m: BVMonomial, c: u32) {
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

    pub fn add(&self, o: &BVElement) -> BVElement {
        let mut r = self.clone();
        for (m, &c) in &o.terms {
            r.add_term(m.clone(), c);
        }
        r
    }

    pub fn sub(&self, o: &BVElement) -> BVElement {
        self.add(&o.scale(self.p - 1))
    }

    pub fn neg(&self) -> BVElement {
        self.scale(self.p - 1)
    }

    pub fn scale(&self, c: u32) -> BVElement {
        let mut r = Self::zero(self.p, self.s);
        for (m, &d) in &self.terms {
            r.add_term(m.clone(), (c as u64 * d as u64 % self.p as u64) as u32);
        }
        r
    }

    pub fn mul(&self, o: &BVElement) -> BVElement {
        assert_eq!(self.s, o.s, "rank mismatch");
        let p = self.p;
        let mut r = Self::zero(p, self.s);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &o.terms {
                let Some(neg) = exterior_sign(a.mask, b.mask) else { continue };
                let m = BVMonomial { mask: a.mask | b.mask, exps: a.exps.iter().zip(&b.exps).map(|(x, y)| x + y).collect() };
                let c = (ca as u64 * cb as u64 % p as u64) as u32;
                r.add_term(m, if neg { neg_mod(c, p) } else { c });
            }
        }
        r
    }

    pub fn pow(&self, n: u32) -> BVElement {
        let mut acc = Self::one(self.p, self.s);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Apply the graded algebra map sending `u_i ↦ us[i-1]`, `v_i ↦ vs[i-1]`,
    /// multiplied by `(-1)^{k(k-1)/2}` on monomials with `k` exterior factors
    /// when `twisted` is set.
    pub fn substitute(&self, us: &[BVElement], vs: &[BVElement], twisted: bool) -> BVElement {
        let target = us.first().or(vs.first()).map_or(self.s, |e| e.s);
        let p = self.p;
        let mut r = Self::zero(p, target);
        let mut vpow: Vec<Vec<BVElement>> = vs.iter().map(|v| vec![Self::one(p, target), v.clone()]).collect();
        for (m, &c) in &self.terms {
            let mut t = Self::constant(p, target, c as i64);
            let mut k = 0;
            for i in 0..self.s {
                if m.mask & (1 << i) != 0 {
                    t = t.mul(&us[i]);
                    k += 1;
                }
            }
            for (j, &e) in m.exps.iter().enumerate() {
                while vpow[j].len() <= e as usize {
                    let next = vpow[j].last().unwrap().mul(&vs[j]);
                    vpow[j].push(next);
                }
                t = t.mul(&vpow[j][e as usize]);
            }
            if twisted && (k * (k.max(1) - 1) / 2) % 2 == 1 {
                t = t.neg();
            }
            r = r.add(&t);
        }
        r
    }

    /// Act by an invertible matrix: `v_j ↦ Σ_k g[k][j] v_k`, same for `u`.
    pub fn act_linear(&self, g: &[Vec<i64>]) -> BVElement {
        let (p, s) = (self.p, self.s);
        let lin = |gen: fn(u32, usize, usize) -> BVElement, j: usize| {
            let mut e = Self::zero(p, s);
            for (k, row) in g.iter().enumerate() {
                e = e.add(&gen(p, s, k + 1).scale(reduce(row[j], p)));
            }
            e
        };
        let us: Vec<_> = (0..s).map(|j| lin(Self::u, j)).collect();
        let vs: Vec<_> = (0..s).map(|j| lin(Self::v, j)).collect();
        self.substitute(&us, &vs, false)
    }

    /// Include into rank `s + extra`, keeping variable indices.
    pub fn widen(&self, extra: usize) -> BVElement {
        let mut r = Self::zero(self.p, self.s + extra);
        for (m, &c) in &self.terms {
            let mut exps = m.exps.clone();
            exps.extend(std::iter::repeat_n(0, extra));
            r.add_term(BVMonomial { mask: m.mask, exps }, c);
        }
        r
    }
}

impl fmt::Display for BVElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let us: Vec<String> = (0..self.s).filter(|i| m.mask & (1 << i) != 0).map(|i| (i + 1).to_string()).collect();
                let vs: Vec<String> = m.exps.iter().map(|e| e.to_string()).collect();
                format!("{c} * u{{{}}} v^({})", us.join(","), vs.join(","))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `St_1 : H*(BV_s) → H*(BV_{s+1})`. The new variable `(u, v)` is placed first.
pub fn st1(x: &BVElement) -> BVElement {
    let (p, s) = (x.prime(), x.rank());
    let t = s + 1;
    let (u, v) = (BVElement::u(p, t, 1), BVElement::v(p, t, 1));
    let e1 = v.pow((p - 1) / 2);
    let m1 = u.mul(&v.pow((p - 3) / 2));
    let q1 = v.pow(p - 1);
    let us: Vec<_> = (2..=t).map(|i| e1.mul(&BVElement::u(p, t, i)).sub(&m1.mul(&BVElement::v(p, t, i)))).collect();
    let vs: Vec<_> = (2..=t).map(|i| BVElement::v(p, t, i).pow(p).sub(&q1.mul(&BVElement::v(p, t, i)))).collect();
    x.substitute(&us, &vs, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exterior_signs() {
        let p = 3;
        let u1 = BVElement::u(p, 2, 1);
        let u2 = BVElement::u(p, 2, 2);
        assert_eq!(u2.mul(&u1), u1.mul(&u2).neg());
        assert!(u1.mul(&u1).is_zero());
    }

    #[test]
    fn st1_examples() {
        // St_1(y) = y^p - Q_{1,0} y and St_1(x) = e_1 x - M_{1,0} y.
        for p in [3u32, 5] {
            let y = BVElement::v(p, 1, 1);
            let x = BVElement::u(p, 1, 1);
            let (u, v) = (BVElement::u(p, 2, 1), BVElement::v(p, 2, 1));
            let (x2, y2) = (BVElement::u(p, 2, 2), BVElement::v(p, 2, 2));
            assert_eq!(st1(&y), y2.pow(p).sub(&v.pow(p - 1).mul(&y2)));
            assert_eq!(st1(&x), v.pow((p - 1) / 2).mul(&x2).sub(&u.mul(&v.pow((p - 3) / 2)).mul(&y2)));
        }
    }
}
