//! Words in `β` and `P^i`, the admissible basis, and Adem reduction.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::fpla::{binomial_mod, neg_mod};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Beta,
    P(u32),
}

impl Letter {
    pub fn degree(&self, p: u32) -> i32 {
        match *self {
            Letter::Beta => 1,
            Letter::P(i) => 2 * i as i32 * (p as i32 - 1),
        }
    }
}

/// `β^{ε_0} P^{s_1} β^{ε_1} ... P^{s_k} β^{ε_k}` stored as its exponent list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdmissibleWord {
    /// `ε_0, ..., ε_k` (length `k + 1`).
    pub eps: Vec<u8>,
    /// `s_1, ..., s_k`, all positive.
    pub s: Vec<u32>,
}

/// A linear combination of admissible words.
pub type AdmissibleElement = BTreeMap<AdmissibleWord, u32>;

impl AdmissibleWord {
    pub fn unit() -> Self {
        AdmissibleWord { eps: vec![0], s: Vec::new() }
    }

    pub fn degree(&self, p: u32) -> i32 {
        self.s.iter().map(|&x| 2 * x as i32 * (p as i32 - 1)).sum::<i32>()
            + self.eps.iter().map(|&e| e as i32).sum::<i32>()
    }

    pub fn is_admissible(&self, p: u32) -> bool {
        self.eps.len() == self.s.len() + 1
            && self.s.iter().all(|&x| x > 0)
            && self.eps.iter().all(|&e| e <= 1)
            && (1..self.s.len()).all(|i| self.s[i - 1] >= p * self.s[i] + self.eps[i] as u32)
    }

    /// Excess `ε_0 + 2 s_1 - |tail|`, where the tail is the word after `P^{s_1}`.
    pub fn excess(&self, p: u32) -> i32 {
        let lead = if self.s.is_empty() { 0 } else { 2 * self.s[0] as i32 };
        self.eps[0] as i32 + lead - self.tail_degree(p)
    }

    /// Degree of the word with its leading `β^{ε_0} P^{s_1}` removed.
    pub fn tail_degree(&self, p: u32) -> i32 {
        self.degree(p) - self.eps[0] as i32 - if self.s.is_empty() { 0 } else { 2 * self.s[0] as i32 * (p as i32 - 1) }
    }

    pub fn letters(&self) -> Vec<Letter> {
        let mut w = Vec::new();
        for i in 0..self.eps.len() {
            if self.eps[i] == 1 {
                w.push(Letter::Beta);
            }
            if i < self.s.len() {
                w.push(Letter::P(self.s[i]));
            }
        }
        w
    }

    /// Parse a letter sequence already in admissible shape (no `ββ`, no `P^0`).
    pub fn from_letters(w: &[Letter]) -> Option<Self> {
        let mut eps = vec![0u8];
        let mut s = Vec::new();
        for &l in w {
            match l {
                Letter::Beta => {
                    let e = eps.last_mut().unwrap();
                    if *e == 1 {
                        return None;
                    }
                    *e = 1;
                }
                Letter::P(0) => return None,
                Letter::P(i) => {
                    s.push(i);
                    eps.push(0);
                }
            }
        }
        Some(AdmissibleWord { eps, s })
    }
}

impl fmt::Display for AdmissibleWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.letters();
        if w.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = w
            .iter()
            .map(|l| match l {
                Letter::Beta => "b".to_string(),
                Letter::P(i) => format!("P{i}"),
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// All admissible words of a given degree, sorted.
pub fn admissible_basis(p: u32, degree: i32) -> Vec<AdmissibleWord> {
    let mut out = Vec::new();
    if degree < 0 {
        return out;
    }
    let step = 2 * (p as i32 - 1);
    // Build left to right; `bound` caps the next s given the previous one.
    fn rec(p: u32, step: i32, rest: i32, bound: Option<u32>, eps: &mut Vec<u8>, s: &mut Vec<u32>, out: &mut Vec<AdmissibleWord>) {
        for e in 0..=1u8 {
            if e as i32 > rest {
                continue;
            }
            // Admissibility of the previous P with this β: s_{i-1} >= p s_i + ε_{i-1}, checked when s_i is chosen.
            eps.push(e);
            let r = rest - e as i32;
            if r == 0 {
                out.push(AdmissibleWord { eps: eps.clone(), s: s.clone() });
            }
            let cap = match bound {
                None => (r / step) as u32,
                Some(prev) => {
                    if prev < e as u32 {
                        0
                    } else {
                        ((prev - e as u32) / p).min((r / step) as u32)
                    }
                }
            };
            for si in 1..=cap {
                s.push(si);
                rec(p, step, r - si as i32 * step, Some(si), eps, s, out);
                s.pop();
            }
            eps.pop();
        }
    }
    rec(p, step, degree, None, &mut Vec::new(), &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// A normalized letter sequence: `P^0` removed. Returns `None` if it contains `ββ`.
fn normalize(w: &[Letter]) -> Option<Vec<Letter>> {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in w {
        match l {
            Letter::P(0) => {}
            Letter::Beta => {
                if out.last() == Some(&Letter::Beta) {
                    return None;
                }
                out.push(l);
            }
            _ => out.push(l),
        }
    }
    // Removing P^0 may create ββ.
    if out.windows(2).any(|x| x[0] == Letter::Beta && x[1] == Letter::Beta) {
        return None;
    }
    Some(out)
}

/// Reduces words to admissible form with the Adem relations, memoizing results.
#[derive(Debug, Default)]
pub struct AdemReducer {
    p: u32,
    memo: HashMap<Vec<Letter>, AdmissibleElement>,
}

impl AdemReducer {
    pub fn new(p: u32) -> Self {
        AdemReducer { p, memo: HashMap::new() }
    }

    pub fn reduce(&mut self, w: &[Letter]) -> AdmissibleElement {
        let p = self.p;
        let Some(w) = normalize(w) else { return BTreeMap::new() };
        if let Some(r) = self.memo.get(&w) {
            return r.clone();
        }
        let result = match first_violation(&w, p) {
            None => {
                let a = AdmissibleWord::from_letters(&w).expect("normalized word");
                BTreeMap::from([(a, 1)])
            }
            Some((start, len, replacement)) => {
                let mut acc = BTreeMap::new();
                for (mid, c) in replacement {
                    let mut nw = w[..start].to_vec();
                    nw.extend_from_slice(&mid);
                    nw.extend_from_slice(&w[start + len..]);
                    for (a, d) in self.reduce(&nw) {
                        let e = acc.entry(a.clone()).or_insert(0u32);
                        *e = ((*e as u64 + c as u64 * d as u64) % p as u64) as u32;
                        if *e == 0 {
                            acc.remove(&a);
                        }
                    }
                }
                acc
            }
        };
        self.memo.insert(w, result.clone());
        result
    }
}

type Replacement = Vec<(Vec<Letter>, u32)>;

fn signed(c: u32, negative: bool, p: u32) -> u32 {
    if negative {
        neg_mod(c, p)
    } else {
        c
    }
}

/// Locate the first inadmissible pattern and the Adem expansion replacing it.
fn first_violation(w: &[Letter], p: u32) -> Option<(usize, usize, Replacement)> {
    for i in 0..w.len() {
        let Letter::P(a) = w[i] else { continue };
        if i + 1 < w.len() {
            if let Letter::P(b) = w[i + 1] {
                if a < p * b {
                    return Some((i, 2, adem_pp(a, b, p)));
                }
                continue;
            }
            if w[i + 1] == Letter::Beta && i + 2 < w.len() {
                if let Letter::P(b) = w[i + 2] {
                    if a <= p * b {
                        return Some((i, 3, adem_pbp(a, b, p)));
                    }
                }
            }
        }
    }
    None
}

/// `P^a P^b` for `a < p b`.
fn adem_pp(a: u32, b: u32, p: u32) -> Replacement {
    let mut out = Vec::new();
    for j in 0..=a / p {
        let top = (p - 1) as i64 * (b - j) as i64 - 1;
        if top < 0 {
            continue;
        }
        let c = binomial_mod(top as u64, (a - p * j) as u64, p);
        if c == 0 {
            continue;
        }
        let c = signed(c, (a + j) % 2 == 1, p);
        out.push((vec![Letter::P(a + b - j), Letter::P(j)], c));
    }
    out
}

/// `P^a β P^b` for `a <= p b`.
fn adem_pbp(a: u32, b: u32, p: u32) -> Replacement {
    let mut out = Vec::new();
    for j in 0..=a / p {
        let top = (p - 1) as u64 * (b - j) as u64;
        let c = binomial_mod(top, (a - p * j) as u64, p);
        if c != 0 {
            let c = signed(c, (a + j) % 2 == 1, p);
            out.push((vec![Letter::Beta, Letter::P(a + b - j), Letter::P(j)], c));
        }
    }
    if a >= 1 {
        for j in 0..=(a - 1) / p {
            let top = (p - 1) as i64 * (b - j) as i64 - 1;
            if top < 0 {
                continue;
            }
            let c = binomial_mod(top as u64, (a - p * j - 1) as u64, p);
            if c != 0 {
                let c = signed(c, (a + j + 1) % 2 == 1, p);
                out.push((vec![Letter::P(a + b - j), Letter::Beta, Letter::P(j)], c));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_bases() {
        assert_eq!(admissible_basis(3, 0), vec![AdmissibleWord::unit()]);
        assert_eq!(admissible_basis(3, 1).len(), 1);
        assert_eq!(admissible_basis(3, 4), vec![AdmissibleWord { eps: vec![0, 0], s: vec![1] }]);
        for p in [3, 5] {
            for d in 0..50 {
                for w in admissible_basis(p, d) {
                    assert!(w.is_admissible(p), "{w}");
                    assert_eq!(w.degree(p), d);
                }
            }
        }
    }

    #[test]
    fn beta_squared() {
        let mut r = AdemReducer::new(3);
        assert!(r.reduce(&[Letter::Beta, Letter::Beta]).is_empty());
    }

    #[test]
    fn p1p1() {
        let mut r = AdemReducer::new(3);
        let x = r.reduce(&[Letter::P(1), Letter::P(1)]);
        assert_eq!(x, BTreeMap::from([(AdmissibleWord { eps: vec![0, 0], s: vec![2] }, 2)]));
    }

    #[test]
    fn admissible_fixed() {
        let mut r = AdemReducer::new(3);
        let w = AdmissibleWord { eps: vec![1, 0, 1], s: vec![4, 1] };
        assert_eq!(r.reduce(&w.letters()), BTreeMap::from([(w, 1)]));
    }
}
