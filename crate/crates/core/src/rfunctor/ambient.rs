//! Elements of `Γ_s ⊗ N` (optionally times `𝔢_s`), keyed by module index first so
//! that the lowest module degree comes first.

use std::collections::BTreeMap;
use std::fmt;

use crate::fpla::{neg_mod, FpVec};
use crate::invariants::gamma::format_monomial;
use crate::invariants::{GammaElement, GammaMonomial};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ambient {
    p: u32,
    s: usize,
    /// Multiply every term by `𝔢_s` (elements of odd eigenvalue parity).
    pub e_odd: bool,
    terms: BTreeMap<(usize, GammaMonomial), u32>,
}

impl Ambient {
    pub fn zero(p: u32, s: usize) -> Self {
        Ambient { p, s, e_odd: false, terms: BTreeMap::new() }
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn rank(&self) -> usize {
        self.s
    }

    pub fn terms(&self) -> &BTreeMap<(usize, GammaMonomial), u32> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, x: usize, g: &GammaMonomial) -> u32 {
        self.terms.get(&(x, g.clone())).copied().unwrap_or(0)
    }

    pub fn add_term(&mut self, x: usize, g: GammaMonomial, c: u32) {
        let c = c % self.p;
        if c == 0 {
            return;
        }
        let key = (x, g);
        let e = self.terms.entry(key.clone()).or_insert(0);
        *e = (*e + c) % self.p;
        if *e == 0 {
            self.terms.remove(&key);
        }
    }

    pub fn add_scaled(&mut self, o: &Ambient, c: u32) {
        debug_assert_eq!(self.e_odd, o.e_odd);
        for ((x, g), &d) in &o.terms {
            self.add_term(*x, g.clone(), (c as u64 * d as u64 % self.p as u64) as u32);
        }
    }

    pub fn scale(&self, c: u32) -> Ambient {
        let mut r = Ambient { e_odd: self.e_odd, ..Ambient::zero(self.p, self.s) };
        r.add_scaled(self, c);
        r
    }

    /// `γ ⊗ v`.
    pub fn pure(gamma: &GammaElement, v: &FpVec) -> Ambient {
        let p = gamma.prime();
        let mut r = Ambient::zero(p, gamma.rank());
        for (g, &c) in gamma.terms() {
            for (x, d) in v.iter() {
                r.add_term(x, g.clone(), (c as u64 * d as u64 % p as u64) as u32);
            }
        }
        r
    }

    /// Left multiplication by a Γ monomial (no sign: the monomial passes nothing).
    pub fn mul_left(&self, g: &GammaMonomial, c: u32) -> Ambient {
        let p = self.p;
        let mut r = Ambient { e_odd: self.e_odd, ..Ambient::zero(p, self.s) };
        for ((x, h), &d) in &self.terms {
            if let Some((m, neg)) = g.mul(h) {
                let v = (c as u64 * d as u64 % p as u64) as u32;
                r.add_term(*x, m, if neg { neg_mod(v, p) } else { v });
            }
        }
        r
    }

    /// The first term in key order.
    pub fn leading(&self) -> Option<(usize, &GammaMonomial, u32)> {
        self.terms.iter().next().map(|((x, g), &c)| (*x, g, c))
    }
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let e = if self.e_odd { "e * " } else { "" };
        let parts: Vec<String> = self.terms.iter().map(|((x, g), c)| format!("{c} * {e}{} ⊗ [{x}]", format_monomial(g, self.s))).collect();
        write!(f, "{}", parts.join(" + "))
    }
}
