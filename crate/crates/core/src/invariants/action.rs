//! Steenrod operations on `H*(BV_s)` and on the localized invariants `Γ_s`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use super::bv::{BVElement, BVMonomial};
use super::classes::{dickson, mui, MuiClass};
use super::gamma::{GammaElement, GammaMonomial};
use super::InvariantsError;
use crate::fpla::{binomial_mod, binomial_signed, neg_mod, solve, FpVec, SparseMatFp};

/// `P^j` on `H*(BV_s)` from `P(v) = v + v^p`, `P(u) = u` and the Cartan formula.
pub fn power_bv(x: &BVElement, j: u32) -> BVElement {
    let (p, s) = (x.prime(), x.rank());
    let mut out = BVElement::zero(p, s);
    for (m, &c) in x.terms() {
        // distribute j over the variables
        fn rec(k: usize, left: u32, m: &BVMonomial, p: u32, coef: u32, exps: &mut Vec<u32>, out: &mut BVElement) {
            if k == m.exps.len() {
                if left == 0 {
                    out.add_term(BVMonomial { mask: m.mask, exps: exps.clone() }, coef);
                }
                return;
            }
            let e = m.exps[k];
            for jk in 0..=left.min(e) {
                let b = binomial_mod(e as u64, jk as u64, p);
                if b == 0 {
                    continue;
                }
                exps[k] = e + jk * (p - 1);
                rec(k + 1, left - jk, m, p, (coef as u64 * b as u64 % p as u64) as u32, exps, out);
            }
            exps[k] = e;
        }
        let mut exps = m.exps.clone();
        rec(0, j, m, p, c, &mut exps, &mut out);
    }
    out
}

/// `β` on `H*(BV_s)`: the derivation with `β u_i = v_i`.
pub fn beta_bv(x: &BVElement) -> BVElement {
    let (p, s) = (x.prime(), x.rank());
    let mut out = BVElement::zero(p, s);
    for (m, &c) in x.terms() {
        let mut before = 0;
        for i in 0..s {
            if m.mask & (1 << i) == 0 {
                continue;
            }
            let mut exps = m.exps.clone();
            exps[i] += 1;
            let c2 = if before % 2 == 1 { neg_mod(c, p) } else { c };
            out.add_term(BVMonomial { mask: m.mask & !(1 << i), exps }, c2);
            before += 1;
        }
    }
    out
}

/// Γ monomials with nonnegative exponents in a given degree.
fn gamma_monomials_nonneg(p: u32, s: usize, d: i64) -> Vec<GammaMonomial> {
    let ps = (p as i64).pow(s as u32);
    let pw = |j: usize| (p as i64).pow(j as u32);
    let mut out = Vec::new();
    for mask in 0u32..(1 << s) {
        let rd: i64 = (0..s).filter(|j| mask & (1 << j) != 0).map(|j| 2 * (ps - pw(j)) - 1).sum();
        let rest = d - rd;
        if rest < 0 {
            continue;
        }
        let qdeg: Vec<i64> = (1..s).map(|i| 2 * (ps - pw(i))).collect();
        let mut e = vec![0u32; s - 1];
        fn rec(k: usize, rest: i64, qdeg: &[i64], q0: i64, mask: u32, e: &mut Vec<u32>, out: &mut Vec<GammaMonomial>) {
            if k == qdeg.len() {
                if rest % q0 == 0 {
                    out.push(GammaMonomial { mask, e0: (rest / q0) as i32, e: e.clone() });
                }
                return;
            }
            let mut x = 0;
            while x as i64 * qdeg[k] <= rest {
                e[k] = x;
                rec(k + 1, rest - x as i64 * qdeg[k], qdeg, q0, mask, e, out);
                x += 1;
            }
            e[k] = 0;
        }
        rec(0, rest, &qdeg, 2 * (ps - 1), mask, &mut e, &mut out);
    }
    out
}

/// A Γ monomial with nonnegative exponents as a polynomial.
pub fn gamma_to_bv(p: u32, s: usize, m: &GammaMonomial) -> Result<BVElement, InvariantsError> {
    if m.e0 < 0 {
        return Err(InvariantsError::NotPolynomial);
    }
    let mut r = BVElement::one(p, s);
    for j in 0..s {
        if m.mask & (1 << j) != 0 {
            r = r.mul(&mui(p, s, MuiClass::R(j))?);
        }
    }
    r = r.mul(&dickson(p, s, 0)?.pow(m.e0 as u32));
    for (i, &x) in m.e.iter().enumerate() {
        r = r.mul(&dickson(p, s, i + 1)?.pow(x));
    }
    Ok(r)
}

/// Write a `GL_s`-invariant polynomial in terms of `R_{s,j}` and `Q_{s,i}`.
pub fn bv_to_gamma(x: &BVElement) -> Result<GammaElement, InvariantsError> {
    let (p, s) = (x.prime(), x.rank());
    let Some(d) = x.degree() else { return Ok(GammaElement::zero(p, s)) };
    let monos = gamma_monomials_nonneg(p, s, d);
    let mut rows: BTreeMap<BVMonomial, usize> = BTreeMap::new();
    let mut cols = Vec::new();
    let index = |m: &BVMonomial, rows: &mut BTreeMap<BVMonomial, usize>| {
        let n = rows.len();
        *rows.entry(m.clone()).or_insert(n)
    };
    for g in &monos {
        let b = gamma_to_bv(p, s, g)?;
        cols.push(FpVec::from_map(b.terms().iter().map(|(m, &c)| (index(m, &mut rows), c)).collect()));
    }
    let target = FpVec::from_map(x.terms().iter().map(|(m, &c)| (index(m, &mut rows), c)).collect());
    let a = SparseMatFp::from_columns(p, rows.len(), &cols);
    let sol = solve(&a, &target).ok_or_else(|| InvariantsError::NotInvariant(x.to_string()))?;
    let mut out = GammaElement::zero(p, s);
    for (k, c) in sol.iter() {
        out.add_term(monos[k].clone(), c);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Gen {
    Q(usize),
    R(usize),
}

/// Steenrod operations on `Γ_s`, computed from the action on generators.
#[derive(Debug)]
pub struct GammaAction {
    p: u32,
    s: usize,
    gens: Mutex<HashMap<(Gen, u32), GammaElement>>,
    beta_r: Mutex<HashMap<usize, GammaElement>>,
    monos: Mutex<HashMap<(GammaMonomial, u32), GammaElement>>,
}

impl GammaAction {
    pub fn new(p: u32, s: usize) -> Result<Self, InvariantsError> {
        super::classes::rank_cap(p).ge(&s).then_some(()).ok_or(InvariantsError::RankCap { p, s, cap: super::classes::rank_cap(p) })?;
        Ok(GammaAction { p, s, gens: Mutex::new(HashMap::new()), beta_r: Mutex::new(HashMap::new()), monos: Mutex::new(HashMap::new()) })
    }

    fn generator_power(&self, g: Gen, j: u32) -> Result<GammaElement, InvariantsError> {
        let (p, s) = (self.p, self.s);
        if j == 0 {
            return Ok(match g {
                Gen::Q(i) => GammaElement::q(p, s, i),
                Gen::R(i) => GammaElement::r(p, s, i),
            });
        }
        if let Some(e) = self.gens.lock().unwrap().get(&(g, j)) {
            return Ok(e.clone());
        }
        let poly = match g {
            Gen::Q(i) => dickson(p, s, i)?,
            Gen::R(i) => mui(p, s, MuiClass::R(i))?,
        };
        let e = bv_to_gamma(&power_bv(&poly, j))?;
        self.gens.lock().unwrap().insert((g, j), e.clone());
        Ok(e)
    }

    fn beta_generator(&self, i: usize) -> Result<GammaElement, InvariantsError> {
        if let Some(e) = self.beta_r.lock().unwrap().get(&i) {
            return Ok(e.clone());
        }
        let e = bv_to_gamma(&beta_bv(&mui(self.p, self.s, MuiClass::R(i))?))?;
        self.beta_r.lock().unwrap().insert(i, e.clone());
        Ok(e)
    }

    /// `[P^0 x, ..., P^n x]` for a generator.
    fn series(&self, g: Gen, n: u32) -> Result<Vec<GammaElement>, InvariantsError> {
        (0..=n).map(|j| self.generator_power(g, j)).collect()
    }

    fn series_mul(&self, a: &[GammaElement], b: &[GammaElement]) -> Vec<GammaElement> {
        let n = a.len().min(b.len());
        (0..n)
            .map(|k| {
                let mut acc = GammaElement::zero(self.p, self.s);
                for i in 0..=k {
                    acc = acc.add(&a[i].mul(&b[k - i]));
                }
                acc
            })
            .collect()
    }

    /// `P^n` on a monomial (negative powers of `Q_{s,0}` via the binomial series).
    pub fn power_monomial(&self, m: &GammaMonomial, n: u32) -> Result<GammaElement, InvariantsError> {
        let (p, s) = (self.p, self.s);
        if n == 0 {
            return Ok(GammaElement::monomial(p, s, m.clone(), 1));
        }
        if let Some(e) = self.monos.lock().unwrap().get(&(m.clone(), n)) {
            return Ok(e.clone());
        }
        let len = n as usize + 1;
        let mut acc: Vec<GammaElement> = (0..len).map(|k| if k == 0 { GammaElement::one(p, s) } else { GammaElement::zero(p, s) }).collect();
        for j in 0..s {
            if m.mask & (1 << j) != 0 {
                acc = self.series_mul(&acc, &self.series(Gen::R(j), n)?);
            }
        }
        for (i, &x) in m.e.iter().enumerate() {
            let ser = self.series(Gen::Q(i + 1), n)?;
            for _ in 0..x {
                acc = self.series_mul(&acc, &ser);
            }
        }
        if m.e0 != 0 {
            // P(Q_0)^{e} = Q_0^{e} (1 + X)^{e}, X = Σ_{k>=1} t^k P^k(Q_0) / Q_0
            let q0 = self.series(Gen::Q(0), n)?;
            let inv = GammaElement::q0_pow(p, s, -1);
            let x: Vec<GammaElement> = q0.iter().enumerate().map(|(k, e)| if k == 0 { GammaElement::zero(p, s) } else { e.mul(&inv) }).collect();
            let mut xpow: Vec<GammaElement> = (0..len).map(|k| if k == 0 { GammaElement::one(p, s) } else { GammaElement::zero(p, s) }).collect();
            let mut total: Vec<GammaElement> = (0..len).map(|_| GammaElement::zero(p, s)).collect();
            for k in 0..len {
                let c = binomial_signed(m.e0 as i64, k as i64, p);
                if c != 0 {
                    for t in 0..len {
                        total[t] = total[t].add(&xpow[t].scale(c));
                    }
                }
                xpow = self.series_mul(&xpow, &x);
            }
            let q0e = GammaElement::q0_pow(p, s, m.e0);
            let total: Vec<GammaElement> = total.iter().map(|e| e.mul(&q0e)).collect();
            acc = self.series_mul(&acc, &total);
        }
        let r = acc.pop().unwrap();
        self.monos.lock().unwrap().insert((m.clone(), n), r.clone());
        Ok(r)
    }

    pub fn power(&self, g: &GammaElement, n: u32) -> Result<GammaElement, InvariantsError> {
        let mut out = GammaElement::zero(self.p, self.s);
        for (m, &c) in g.terms() {
            out = out.add(&self.power_monomial(m, n)?.scale(c));
        }
        Ok(out)
    }

    pub fn beta_monomial(&self, m: &GammaMonomial) -> Result<GammaElement, InvariantsError> {
        let (p, s) = (self.p, self.s);
        let mut out = GammaElement::zero(p, s);
        let mut before = 0;
        for j in 0..s {
            if m.mask & (1 << j) == 0 {
                continue;
            }
            let mut rest = m.clone();
            rest.mask &= !(1 << j);
            let term = self.beta_generator(j)?.mul(&GammaElement::monomial(p, s, rest, 1));
            out = out.add(&if before % 2 == 1 { term.scale(p - 1) } else { term });
            before += 1;
        }
        Ok(out)
    }

    pub fn beta(&self, g: &GammaElement) -> Result<GammaElement, InvariantsError> {
        let mut out = GammaElement::zero(self.p, self.s);
        for (m, &c) in g.terms() {
            out = out.add(&self.beta_monomial(m)?.scale(c));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bv_action_rank_one() {
        let p = 3;
        let v = BVElement::v(p, 1, 1);
        assert_eq!(power_bv(&v, 1), v.pow(3));
        assert_eq!(beta_bv(&BVElement::u(p, 1, 1)), v);
        // P^1 v^2 = 2 v^4
        assert_eq!(power_bv(&v.pow(2), 1), v.pow(4).scale(2));
    }

    #[test]
    fn inverse_series_rank_one() {
        // P^1(Q_{1,0}^{-1}) = P^1(v^{-2}) = -2 v^0 = v^0 at p = 3
        let p = 3;
        let act = GammaAction::new(p, 1).unwrap();
        let m = GammaMonomial { mask: 0, e0: -1, e: vec![] };
        assert_eq!(act.power_monomial(&m, 1).unwrap(), GammaElement::one(p, 1));
    }
}
