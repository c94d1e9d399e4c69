//! Milnor basis `Q(E) P(R)` of the odd-primary Steenrod algebra.
//!
//! `Q(E)` is the product `Q_{e_0} Q_{e_1} ...` with `e_0 < e_1 < ...`, and
//! `P(R)` is dual to `ξ_1^{r_1} ξ_2^{r_2} ...`. The basis element `Q(E)P(R)`
//! is dual to the monomial `τ_{e_0} τ_{e_1} ... ξ^R` of the dual algebra.

use std::collections::BTreeMap;
use std::fmt;

use crate::fpla::{multinomial_mod, neg_mod};

/// A Milnor basis element: a set of `Q_j` (bitmask) and a sequence `R`
/// without trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MilnorBasis {
    pub q: u32,
    pub r: Vec<u32>,
}

/// A linear combination of Milnor basis elements with coefficients mod p.
pub type MilnorElement = BTreeMap<MilnorBasis, u32>;

impl MilnorBasis {
    pub fn unit() -> Self {
        MilnorBasis { q: 0, r: Vec::new() }
    }

    pub fn q(j: u32) -> Self {
        MilnorBasis { q: 1 << j, r: Vec::new() }
    }

    pub fn p(r: Vec<u32>) -> Self {
        let mut m = MilnorBasis { q: 0, r };
        m.trim();
        m
    }

    pub fn new(q: u32, r: Vec<u32>) -> Self {
        let mut m = MilnorBasis { q, r };
        m.trim();
        m
    }

    fn trim(&mut self) {
        while self.r.last() == Some(&0) {
            self.r.pop();
        }
    }

    pub fn degree(&self, p: u32) -> i32 {
        let mut d: i64 = 0;
        let mut pj: i64 = 1;
        for j in 0..32 {
            if self.q & (1 << j) != 0 {
                d += 2 * pj - 1;
            }
            pj *= p as i64;
            if (self.q >> j) <= 1 {
                break;
            }
        }
        let mut pi: i64 = p as i64;
        for &ri in &self.r {
            d += ri as i64 * 2 * (pi - 1);
            pi *= p as i64;
        }
        d as i32
    }

    pub fn q_indices(&self) -> Vec<u32> {
        (0..32).filter(|j| self.q & (1 << j) != 0).collect()
    }

    /// Excess `Σ e_j + 2 Σ r_i`.
    pub fn excess(&self) -> u32 {
        self.q.count_ones() + 2 * self.r.iter().sum::<u32>()
    }
}

impl fmt::Display for MilnorBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for j in self.q_indices() {
            parts.push(format!("Q{j}"));
        }
        if !self.r.is_empty() {
            let r: Vec<String> = self.r.iter().map(|x| x.to_string()).collect();
            parts.push(format!("P({})", r.join(",")));
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

pub(crate) fn add_term(acc: &mut MilnorElement, m: MilnorBasis, c: u32, p: u32) {
    if c.is_multiple_of(p) {
        return;
    }
    let e = acc.entry(m.clone()).or_insert(0);
    *e = (*e + c) % p;
    if *e == 0 {
        acc.remove(&m);
    }
}

/// Number of indices in the mask strictly greater than `k`.
fn count_above(mask: u32, k: u32) -> u32 {
    if k >= 31 {
        0
    } else {
        (mask >> (k + 1)).count_ones()
    }
}

/// Product of two Milnor basis elements.
pub fn milnor_product(a: &MilnorBasis, b: &MilnorBasis, p: u32) -> MilnorElement {
    // Move each Q_k of b leftwards through P(R) of a:
    // P(R) Q_k = Q_k P(R) + Σ_i Q_{k+i} P(R - p^k e_i).
    let mut stage: MilnorElement = BTreeMap::new();
    stage.insert(a.clone(), 1);
    for k in b.q_indices() {
        let mut next: MilnorElement = BTreeMap::new();
        for (m, &c) in &stage {
            if m.q & (1 << k) == 0 {
                let sign = count_above(m.q, k) % 2;
                let c2 = if sign == 1 { neg_mod(c, p) } else { c };
                add_term(&mut next, MilnorBasis { q: m.q | (1 << k), r: m.r.clone() }, c2, p);
            }
            let pk = (p as u64).pow(k);
            for i in 1..=m.r.len() {
                let idx = k + i as u32;
                if m.q & (1 << idx) == 0 && m.r[i - 1] as u64 >= pk {
                    let sign = count_above(m.q, idx) % 2;
                    let c2 = if sign == 1 { neg_mod(c, p) } else { c };
                    let mut r = m.r.clone();
                    r[i - 1] -= pk as u32;
                    add_term(&mut next, MilnorBasis::new(m.q | (1 << idx), r), c2, p);
                }
            }
        }
        stage = next;
    }
    if b.r.is_empty() {
        return stage;
    }
    let mut out: MilnorElement = BTreeMap::new();
    for (m, &c) in &stage {
        for (t, coef) in p_product(&m.r, &b.r, p) {
            add_term(&mut out, MilnorBasis::new(m.q, t), (c as u64 * coef as u64 % p as u64) as u32, p);
        }
    }
    out
}

/// `P(r) P(s)` via Milnor matrices.
fn p_product(r: &[u32], s: &[u32], p: u32) -> Vec<(Vec<u32>, u32)> {
    let rows = r.len();
    let cols = s.len();
    // x[i][j] for i in 0..=rows, j in 0..=cols; x[0][0] unused.
    let mut x = vec![vec![0u64; cols + 1]; rows + 1];
    let mut out = Vec::new();
    // Remaining budgets: row i needs Σ_j p^j x_ij = r_i, column j needs Σ_i x_ij = s_j.
    let row_left: Vec<u64> = r.iter().map(|&v| v as u64).collect();
    let col_left: Vec<u64> = s.iter().map(|&v| v as u64).collect();
    fn rec(
        cell: usize,
        rows: usize,
        cols: usize,
        p: u64,
        x: &mut Vec<Vec<u64>>,
        row_left: &mut Vec<u64>,
        col_left: &mut Vec<u64>,
        out: &mut Vec<(Vec<u32>, u32)>,
        pr: u32,
    ) {
        if cell == rows * cols {
            for i in 1..=rows {
                x[i][0] = row_left[i - 1];
            }
            for j in 1..=cols {
                x[0][j] = col_left[j - 1];
            }
            let diags = rows + cols;
            let mut t = vec![0u32; diags];
            let mut coef: u64 = 1;
            for n in 1..=diags {
                let mut parts = Vec::new();
                for i in 0..=rows.min(n) {
                    let j = n - i;
                    if j <= cols {
                        parts.push(x[i][j]);
                    }
                }
                let c = multinomial_mod(&parts, pr) as u64;
                coef = coef * c % p;
                if coef == 0 {
                    return;
                }
                t[n - 1] = parts.iter().sum::<u64>() as u32;
            }
            out.push((t, coef as u32));
            return;
        }
        let i = cell / cols + 1;
        let j = cell % cols + 1;
        let pj = p.pow(j as u32);
        let max = (row_left[i - 1] / pj).min(col_left[j - 1]);
        for v in 0..=max {
            x[i][j] = v;
            row_left[i - 1] -= v * pj;
            col_left[j - 1] -= v;
            rec(cell + 1, rows, cols, p, x, row_left, col_left, out, pr);
            row_left[i - 1] += v * pj;
            col_left[j - 1] += v;
        }
        x[i][j] = 0;
    }
    let mut rl = row_left;
    let mut cl = col_left;
    rec(0, rows, cols, p as u64, &mut x, &mut rl, &mut cl, &mut out, p);
    out
}

/// All Milnor basis elements of a given degree.
pub fn milnor_basis(p: u32, degree: i32) -> Vec<MilnorBasis> {
    let mut out = Vec::new();
    if degree < 0 {
        return out;
    }
    let n = degree as i64;
    // τ_j degrees 2p^j - 1, ξ_i degrees 2(p^i - 1).
    let mut tau = Vec::new();
    let mut pj: i64 = 1;
    while 2 * pj - 1 <= n {
        tau.push(2 * pj - 1);
        pj *= p as i64;
    }
    let mut xi = Vec::new();
    let mut pi: i64 = p as i64;
    while 2 * (pi - 1) <= n {
        xi.push(2 * (pi - 1));
        pi *= p as i64;
    }
    for mask in 0u32..(1u32 << tau.len()) {
        let qd: i64 = (0..tau.len()).filter(|&j| mask & (1 << j) != 0).map(|j| tau[j]).sum();
        if qd > n {
            continue;
        }
        let rest = n - qd;
        let mut r = vec![0u32; xi.len()];
        fn rec(i: usize, rest: i64, xi: &[i64], r: &mut Vec<u32>, mask: u32, out: &mut Vec<MilnorBasis>) {
            if i == xi.len() {
                if rest == 0 {
                    out.push(MilnorBasis::new(mask, r.clone()));
                }
                return;
            }
            // Assign the largest generator last so the recursion terminates early.
            let k = xi.len() - 1 - i;
            let mut v = 0;
            while v as i64 * xi[k] <= rest {
                r[k] = v;
                rec(i + 1, rest - v as i64 * xi[k], xi, r, mask, out);
                v += 1;
            }
            r[k] = 0;
        }
        rec(0, rest, &xi, &mut r, mask, &mut out);
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_is_neutral() {
        let x = MilnorBasis::new(0b101, vec![2, 1]);
        let l = milnor_product(&MilnorBasis::unit(), &x, 3);
        let r = milnor_product(&x, &MilnorBasis::unit(), 3);
        assert_eq!(l, BTreeMap::from([(x.clone(), 1)]));
        assert_eq!(r, BTreeMap::from([(x, 1)]));
    }

    #[test]
    fn q0_squares_to_zero() {
        assert!(milnor_product(&MilnorBasis::q(0), &MilnorBasis::q(0), 3).is_empty());
    }

    #[test]
    fn p1_p1_at_three() {
        let p1 = MilnorBasis::p(vec![1]);
        assert_eq!(milnor_product(&p1, &p1, 3), BTreeMap::from([(MilnorBasis::p(vec![2]), 2)]));
    }

    #[test]
    fn q1_is_commutator() {
        // Q_1 = P^1 β - β P^1
        let p = 3;
        let a = milnor_product(&MilnorBasis::p(vec![1]), &MilnorBasis::q(0), p);
        let b = milnor_product(&MilnorBasis::q(0), &MilnorBasis::p(vec![1]), p);
        let mut diff = a.clone();
        for (m, c) in b {
            add_term(&mut diff, m, neg_mod(c, p), p);
        }
        assert_eq!(diff, BTreeMap::from([(MilnorBasis::q(1), 1)]));
    }

    #[test]
    fn basis_degrees() {
        for p in [3, 5] {
            for d in 0..40 {
                for m in milnor_basis(p, d) {
                    assert_eq!(m.degree(p), d);
                }
            }
        }
        assert_eq!(milnor_basis(3, 1), vec![MilnorBasis::q(0)]);
        assert_eq!(milnor_basis(3, 4), vec![MilnorBasis::p(vec![1])]);
    }
}
