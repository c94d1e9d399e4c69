//! Finite-window modules over the Steenrod algebra.
//!
//! A [`ModuleWindow`] is a finite-dimensional graded module given by action
//! tables for `β` and the `P^i`. Actions landing above the window are zero,
//! so a window is always a genuine module (a quotient `M^{<c}` when it was
//! cut from something larger). `exact_below`, when set, records that the
//! window stands in for a larger module and agrees with it only in degrees
//! below that bound.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::{Arc, Mutex};

use super::admissible::{AdemReducer, AdmissibleWord, Letter};
use super::algebra::SteenrodAlgebra;
use super::milnor::MilnorBasis;
use super::SteenrodError;
use crate::fpla::{binomial_mod, EchelonBasis, FpVec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleWindow {
    p: u32,
    lo: i32,
    hi: i32,
    names: Vec<String>,
    degrees: Vec<i32>,
    beta: Vec<FpVec>,
    powers: Vec<BTreeMap<u32, FpVec>>,
    suspension: i32,
    exact_below: Option<i32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Below,
    Above,
}

/// Incremental construction of a module window from named generators.
#[derive(Debug, Clone)]
pub struct ModuleBuilder {
    p: u32,
    lo: i32,
    hi: i32,
    names: Vec<String>,
    degrees: Vec<i32>,
    index: HashMap<String, usize>,
    beta: BTreeMap<usize, Vec<(usize, i64)>>,
    powers: BTreeMap<(usize, u32), Vec<(usize, i64)>>,
}

impl ModuleBuilder {
    pub fn new(p: u32, lo: i32, hi: i32) -> Self {
        ModuleBuilder {
            p,
            lo,
            hi,
            names: Vec::new(),
            degrees: Vec::new(),
            index: HashMap::new(),
            beta: BTreeMap::new(),
            powers: BTreeMap::new(),
        }
    }

    pub fn generator(&mut self, name: &str, degree: i32) -> Result<usize, SteenrodError> {
        if self.index.contains_key(name) {
            return Err(SteenrodError::Parse(0, format!("duplicate generator {name}")));
        }
        self.names.push(name.to_string());
        self.degrees.push(degree);
        self.index.insert(name.to_string(), self.names.len() - 1);
        Ok(self.names.len() - 1)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn beta(&mut self, x: usize, image: Vec<(usize, i64)>) {
        self.beta.insert(x, image);
    }

    pub fn power(&mut self, i: u32, x: usize, image: Vec<(usize, i64)>) {
        self.powers.insert((x, i), image);
    }

    pub fn build(self) -> Result<ModuleWindow, SteenrodError> {
        let p = self.p;
        for (n, &d) in self.names.iter().zip(self.degrees.iter()) {
            if d < self.lo || d > self.hi {
                return Err(SteenrodError::Degree(format!("generator {n} of degree {d} outside window [{}, {}]", self.lo, self.hi)));
            }
        }
        // Sort basis by degree, keeping declaration order within a degree.
        let mut order: Vec<usize> = (0..self.names.len()).collect();
        order.sort_by_key(|&i| (self.degrees[i], i));
        let mut new_index = vec![0; order.len()];
        for (k, &i) in order.iter().enumerate() {
            new_index[i] = k;
        }
        let convert = |img: &[(usize, i64)], target_deg: i32, what: &str| -> Result<FpVec, SteenrodError> {
            let mut m = BTreeMap::new();
            for &(j, c) in img {
                if self.degrees[j] != target_deg {
                    return Err(SteenrodError::Degree(format!(
                        "{what}: {} has degree {}, expected {target_deg}",
                        self.names[j], self.degrees[j]
                    )));
                }
                let e: &mut u32 = m.entry(new_index[j]).or_insert(0);
                *e = ((*e as i64 + c).rem_euclid(p as i64)) as u32;
            }
            if target_deg > self.hi {
                return Ok(FpVec::new());
            }
            Ok(FpVec::from_map(m))
        };
        let n = order.len();
        let mut beta = vec![FpVec::new(); n];
        let mut powers = vec![BTreeMap::new(); n];
        for (&x, img) in &self.beta {
            let what = format!("beta {}", self.names[x]);
            beta[new_index[x]] = convert(img, self.degrees[x] + 1, &what)?;
        }
        for (&(x, i), img) in &self.powers {
            if i == 0 {
                return Err(SteenrodError::Degree("P 0 is the identity and cannot be declared".into()));
            }
            let what = format!("P {i} {}", self.names[x]);
            let v = convert(img, self.degrees[x] + 2 * i as i32 * (p as i32 - 1), &what)?;
            if !v.is_zero() {
                powers[new_index[x]].insert(i, v);
            }
        }
        Ok(ModuleWindow {
            p,
            lo: self.lo,
            hi: self.hi,
            names: order.iter().map(|&i| self.names[i].clone()).collect(),
            degrees: order.iter().map(|&i| self.degrees[i]).collect(),
            beta,
            powers,
            suspension: 0,
            exact_below: None,
        })
    }
}

impl ModuleWindow {
    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn window(&self) -> (i32, i32) {
        (self.lo, self.hi)
    }

    pub fn exact_below(&self) -> Option<i32> {
        self.exact_below
    }

    pub fn set_exact_below(&mut self, c: Option<i32>) {
        self.exact_below = c;
    }

    /// Highest degree in which a degreewise functor of weight `s` (chains or derived
    /// functors in position `s`) of this window agrees with that of the module it
    /// stands in for: `c - 1` at `s = 0`, `p^s(c + s - 1)` above, where `c` is
    /// [`Self::exact_below`]. `None` when the window is the whole module.
    pub fn derived_top(&self, s: usize) -> Option<i64> {
        let c = self.exact_below? as i64;
        Some(if s == 0 { c - 1 } else { (self.p as i64).pow(s as u32) * (c + s as i64 - 1) })
    }

    /// Highest degree `<= deg_max` in which homology in position `s` of this window
    /// is that of the module it stands in for: positions `s - 1`, `s` and `s + 1` must
    /// all be exact there.
    pub fn homology_top(&self, s: usize, deg_max: i32) -> i32 {
        let mut top = deg_max as i64;
        for k in s.saturating_sub(1)..=s + 1 {
            if let Some(b) = self.derived_top(k) {
                top = top.min(b);
            }
        }
        top.max(i32::MIN as i64) as i32
    }

    pub fn suspension(&self) -> i32 {
        self.suspension
    }

    pub fn total_dim(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn degree_of(&self, i: usize) -> i32 {
        self.degrees[i]
    }

    /// Lowest and highest degree actually occupied, if nonzero.
    pub fn occupied(&self) -> Option<(i32, i32)> {
        Some((*self.degrees.first()?, *self.degrees.last()?))
    }

    /// Indices of the basis elements of degree `d` (contiguous).
    pub fn basis_in_degree(&self, d: i32) -> std::ops::Range<usize> {
        let a = self.degrees.partition_point(|&x| x < d);
        let b = self.degrees.partition_point(|&x| x <= d);
        a..b
    }

    pub fn dim(&self, d: i32) -> usize {
        self.basis_in_degree(d).len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn beta_of(&self, x: usize) -> &FpVec {
        &self.beta[x]
    }

    pub fn power_of(&self, i: u32, x: usize) -> FpVec {
        if i == 0 {
            return FpVec::unit(x);
        }
        self.powers[x].get(&i).cloned().unwrap_or_default()
    }

    pub fn declared_powers(&self, x: usize) -> impl Iterator<Item = (u32, &FpVec)> {
        self.powers[x].iter().map(|(&i, v)| (i, v))
    }

    fn letter_on_basis(&self, l: Letter, x: usize) -> FpVec {
        match l {
            Letter::Beta => self.beta[x].clone(),
            Letter::P(i) => self.power_of(i, x),
        }
    }

    pub fn act_letter(&self, l: Letter, v: &FpVec) -> FpVec {
        let mut out = FpVec::new();
        for (x, c) in v.iter() {
            out.add_scaled(&self.letter_on_basis(l, x), c, self.p);
        }
        out
    }

    /// Apply a word (leftmost letter applied last).
    pub fn act_word(&self, w: &[Letter], v: &FpVec) -> FpVec {
        let mut cur = v.clone();
        for &l in w.iter().rev() {
            if cur.is_zero() {
                break;
            }
            cur = self.act_letter(l, &cur);
        }
        cur
    }

    pub fn act_admissible(&self, a: &AdmissibleWord, v: &FpVec) -> FpVec {
        self.act_word(&a.letters(), v)
    }

    /// Act by a word, failing if the result leaves the exact part of the window.
    pub fn act_checked(&self, w: &[Letter], x: usize) -> Result<FpVec, SteenrodError> {
        let d = self.degrees[x] + w.iter().map(|l| l.degree(self.p)).sum::<i32>();
        if d > self.hi || self.exact_below.is_some_and(|c| d >= c) {
            return Err(SteenrodError::WindowExceeded(d));
        }
        Ok(self.act_word(w, &FpVec::unit(x)))
    }

    pub fn suspend(&self, t: i32) -> ModuleWindow {
        let mut m = self.clone();
        m.lo += t;
        m.hi += t;
        for d in m.degrees.iter_mut() {
            *d += t;
        }
        m.suspension += t;
        m.exact_below = m.exact_below.map(|c| c + t);
        m
    }

    /// Keep the basis elements satisfying `keep`, dropping actions into the rest.
    fn restrict(&self, keep: impl Fn(i32) -> bool, lo: i32, hi: i32) -> ModuleWindow {
        let kept: Vec<usize> = (0..self.names.len()).filter(|&i| keep(self.degrees[i])).collect();
        let mut new_index = HashMap::new();
        for (k, &i) in kept.iter().enumerate() {
            new_index.insert(i, k);
        }
        let map = |v: &FpVec| -> FpVec {
            FpVec::from_map(v.iter().filter_map(|(j, c)| new_index.get(&j).map(|&k| (k, c))).collect())
        };
        ModuleWindow {
            p: self.p,
            lo,
            hi,
            names: kept.iter().map(|&i| self.names[i].clone()).collect(),
            degrees: kept.iter().map(|&i| self.degrees[i]).collect(),
            beta: kept.iter().map(|&i| map(&self.beta[i])).collect(),
            powers: kept
                .iter()
                .map(|&i| {
                    self.powers[i].iter().map(|(&k, v)| (k, map(v))).filter(|(_, v)| !v.is_zero()).collect()
                })
                .collect(),
            suspension: self.suspension,
            exact_below: self.exact_below,
        }
    }

    /// `M^{<c}` (quotient) or `M^{>=c}` (submodule).
    pub fn truncate(&self, c: i32, side: Side) -> ModuleWindow {
        match side {
            Side::Below => {
                let hi = self.hi.min(c - 1);
                let mut m = self.restrict(|d| d < c, self.lo.min(hi), hi);
                if self.exact_below.is_some_and(|e| c <= e) {
                    m.exact_below = None;
                }
                m
            }
            Side::Above => {
                let lo = self.lo.max(c);
                self.restrict(|d| d >= c, lo, self.hi.max(lo))
            }
        }
    }

    /// Direct sum, basis of `self` first.
    pub fn direct_sum(&self, other: &ModuleWindow) -> ModuleWindow {
        assert_eq!(self.p, other.p, "prime mismatch");
        let mut b = ModuleBuilder::new(self.p, self.lo.min(other.lo), self.hi.max(other.hi));
        let n = self.names.len();
        for (k, m) in [self, other].iter().enumerate() {
            for i in 0..m.names.len() {
                let mut name = m.names[i].clone();
                while k == 1 && b.index_of(&name).is_some() {
                    name.push('\'');
                }
                b.generator(&name, m.degrees[i]).unwrap();
            }
        }
        for (k, m) in [self, other].iter().enumerate() {
            let off = if k == 0 { 0 } else { n };
            let conv = |v: &FpVec| v.iter().map(|(j, c)| (j + off, c as i64)).collect::<Vec<_>>();
            for i in 0..m.names.len() {
                b.beta(i + off, conv(&m.beta[i]));
                for (&e, v) in &m.powers[i] {
                    b.power(e, i + off, conv(v));
                }
            }
        }
        let mut out = b.build().expect("direct sum of valid modules");
        // Only a common suspension is meaningful as provenance.
        out.suspension = if self.suspension == other.suspension { self.suspension } else { 0 };
        out.exact_below = match (self.exact_below, other.exact_below) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        out
    }

    /// Tensor product with the Cartan formula, cut off at `hi`:
    /// `β(x⊗y) = βx⊗y + (-1)^{|x|} x⊗βy`, `P^i(x⊗y) = Σ P^j x ⊗ P^{i-j} y`.
    /// The basis element `x⊗y` has index `tensor_index[(x, y)]` via the returned map.
    pub fn tensor(&self, other: &ModuleWindow, hi: i32) -> (ModuleWindow, HashMap<(usize, usize), usize>) {
        assert_eq!(self.p, other.p, "prime mismatch");
        let p = self.p;
        let lo = self.lo + other.lo;
        let mut b = ModuleBuilder::new(p, lo, hi.max(lo));
        let mut idx = HashMap::new();
        for x in 0..self.names.len() {
            for y in 0..other.names.len() {
                let d = self.degrees[x] + other.degrees[y];
                if d <= hi {
                    let i = b.generator(&format!("{}⊗{}", self.names[x], other.names[y]), d).unwrap();
                    idx.insert((x, y), i);
                }
            }
        }
        let pairs = |a: &FpVec, y: usize, sign: i64| -> Vec<((usize, usize), i64)> { a.iter().map(|(x, c)| ((x, y), sign * c as i64)).collect() };
        for (&(x, y), &i) in &idx {
            let mut img = pairs(&self.beta[x], y, 1);
            let sx = if self.degrees[x].rem_euclid(2) == 1 { -1 } else { 1 };
            img.extend(other.beta[y].iter().map(|(z, c)| ((x, z), sx * c as i64)));
            b.beta(i, img.into_iter().filter_map(|(k, c)| idx.get(&k).map(|&j| (j, c))).collect());
            let d = self.degrees[x] + other.degrees[y];
            let mut n = 1u32;
            while d + 2 * n as i32 * (p as i32 - 1) <= hi {
                let mut img = Vec::new();
                for j in 0..=n {
                    let a = self.power_of(j, x);
                    let c = other.power_of(n - j, y);
                    for (x2, c1) in a.iter() {
                        for (y2, c2) in c.iter() {
                            img.push(((x2, y2), (c1 as u64 * c2 as u64 % p as u64) as i64));
                        }
                    }
                }
                let img: Vec<(usize, i64)> = img.into_iter().filter_map(|(k, c)| idx.get(&k).map(|&j| (j, c))).collect();
                if !img.is_empty() {
                    b.power(n, i, img);
                }
                n += 1;
            }
        }
        let names: HashMap<usize, String> = idx.iter().map(|(&(x, y), &i)| (i, format!("{}⊗{}", self.names[x], other.names[y]))).collect();
        let out = b.build().expect("tensor product of valid modules");
        let idx = idx.into_iter().map(|(k, i)| (k, out.index_of(&names[&i]).unwrap())).collect();
        (out, idx)
    }

    /// Degree of `Φx` for `|x| = d`.
    pub fn frobenius_degree(p: u32, d: i32) -> i32 {
        let p = p as i32;
        if d.rem_euclid(2) == 0 {
            p * d
        } else {
            p * (d - 1) + 2
        }
    }

    /// The Frobenius `ΦM`, with basis `Φx` in the order of the basis of `M`.
    pub fn frobenius(&self) -> ModuleWindow {
        let p = self.p;
        let f = |d| Self::frobenius_degree(p, d);
        let mut powers = vec![BTreeMap::new(); self.names.len()];
        for x in 0..self.names.len() {
            let d = self.degrees[x];
            if d.rem_euclid(2) == 0 {
                for (&j, v) in &self.powers[x] {
                    powers[x].insert(j * p, v.clone());
                }
            } else {
                // P^{pj}(Φx) = Φ(P^j x) and P^{pj+1}(Φx) = Φ(β P^j x); the first is
                // needed for the Adem relations and for λ to be linear.
                let b0 = self.beta[x].clone();
                if !b0.is_zero() {
                    powers[x].insert(1, b0);
                }
                for (&j, v) in &self.powers[x] {
                    powers[x].insert(j * p, v.clone());
                    let w = self.act_letter(Letter::Beta, v);
                    if !w.is_zero() {
                        powers[x].insert(j * p + 1, w);
                    }
                }
            }
        }
        ModuleWindow {
            p,
            lo: f(self.lo),
            hi: f(self.hi),
            names: self.names.iter().map(|n| format!("F({n})")).collect(),
            degrees: self.degrees.iter().map(|&d| f(d)).collect(),
            beta: vec![FpVec::new(); self.names.len()],
            powers,
            suspension: 0,
            exact_below: self.exact_below.map(f),
        }
    }

    /// `λ(Φx) = β^ε P^i x` for `|x| = 2i + ε`, one image per basis element.
    pub fn lambda_map(&self) -> Vec<FpVec> {
        (0..self.names.len())
            .map(|x| {
                let d = self.degrees[x];
                let (i, e) = (d.div_euclid(2), d.rem_euclid(2));
                if i < 0 {
                    return FpVec::new();
                }
                let v = self.power_of(i as u32, x);
                if e == 1 {
                    self.act_letter(Letter::Beta, &v)
                } else {
                    v
                }
            })
            .collect()
    }

    /// Spanning set of `BM` in degree `d`: all `β^ε P^i x` with `ε + 2i > |x|`.
    pub fn unstable_violations(&self, d: i32) -> Vec<FpVec> {
        let p = self.p as i32;
        let mut out = Vec::new();
        for x in 0..self.names.len() {
            let dx = self.degrees[x];
            let gap = d - dx;
            if gap < 0 {
                continue;
            }
            for e in 0..=1 {
                let rest = gap - e;
                if rest < 0 || rest % (2 * (p - 1)) != 0 {
                    continue;
                }
                let i = rest / (2 * (p - 1));
                if e + 2 * i <= dx {
                    continue;
                }
                let mut v = self.power_of(i as u32, x);
                if e == 1 {
                    v = self.act_letter(Letter::Beta, &v);
                }
                if !v.is_zero() {
                    out.push(v);
                }
            }
        }
        out
    }

    pub fn is_unstable(&self) -> bool {
        let degs: Vec<i32> = self.degrees.iter().copied().collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        degs.iter().all(|&d| self.unstable_violations(d).is_empty())
    }

    /// `DM = M / BM`; returns the quotient and, for each basis element of `M`,
    /// its image in the quotient.
    pub fn destabilize(&self) -> (ModuleWindow, Vec<FpVec>) {
        let n = self.names.len();
        let mut proj = vec![FpVec::new(); n];
        let mut kept_global = Vec::new();
        let mut reduced: HashMap<usize, FpVec> = HashMap::new();
        let degs: Vec<i32> = self.degrees.iter().copied().collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        // Per degree: echelon basis of BM, kept basis elements are non-pivots.
        let mut ech_by_deg = HashMap::new();
        for &d in &degs {
            let range = self.basis_in_degree(d);
            let off = range.start;
            let mut ech = EchelonBasis::new(self.p, range.len());
            for v in self.unstable_violations(d) {
                let local = FpVec::from_map(v.iter().map(|(j, c)| (j - off, c)).collect());
                ech.insert(&local);
            }
            ech_by_deg.insert(d, (off, ech));
        }
        // Reduce each basis vector modulo BM and read coordinates on non-pivot elements.
        let mut kept_local: HashMap<i32, Vec<usize>> = HashMap::new();
        for &d in &degs {
            let (off, ech) = &ech_by_deg[&d];
            let len = self.basis_in_degree(d).len();
            let zero_mask: Vec<bool> = {
                let mut mask = vec![false; len];
                for i in 0..len {
                    // a position is a pivot iff reducing its unit vector clears it
                    let r = ech.reduce(&FpVec::unit(i));
                    mask[i] = r[i] == 0;
                }
                mask
            };
            let kept: Vec<usize> = (0..len).filter(|&i| !zero_mask[i]).collect();
            for &i in &kept {
                kept_global.push(off + i);
            }
            kept_local.insert(d, kept);
        }
        let mut new_index = HashMap::new();
        for (k, &g) in kept_global.iter().enumerate() {
            new_index.insert(g, k);
        }
        let project = |v: &FpVec, reduced: &mut HashMap<usize, FpVec>| -> FpVec {
            let _ = reduced;
            let mut out = FpVec::new();
            // group by degree
            let mut by_deg: BTreeMap<i32, Vec<(usize, u32)>> = BTreeMap::new();
            for (j, c) in v.iter() {
                by_deg.entry(self.degrees[j]).or_default().push((j, c));
            }
            for (d, entries) in by_deg {
                let (off, ech) = &ech_by_deg[&d];
                let local = FpVec::from_map(entries.into_iter().map(|(j, c)| (j - off, c)).collect());
                let r = ech.reduce(&local);
                let mut m = BTreeMap::new();
                for &i in &kept_local[&d] {
                    if r[i] != 0 {
                        m.insert(new_index[&(off + i)], r[i]);
                    }
                }
                out.add_scaled(&FpVec::from_map(m), 1, self.p);
            }
            out
        };
        for x in 0..n {
            proj[x] = project(&FpVec::unit(x), &mut reduced);
        }
        let q = ModuleWindow {
            p: self.p,
            lo: self.lo,
            hi: self.hi,
            names: kept_global.iter().map(|&g| self.names[g].clone()).collect(),
            degrees: kept_global.iter().map(|&g| self.degrees[g]).collect(),
            beta: kept_global.iter().map(|&g| project(&self.beta[g], &mut reduced)).collect(),
            powers: kept_global
                .iter()
                .map(|&g| {
                    self.powers[g]
                        .iter()
                        .map(|(&i, v)| (i, project(v, &mut reduced)))
                        .filter(|(_, v)| !v.is_zero())
                        .collect()
                })
                .collect(),
            suspension: self.suspension,
            exact_below: self.exact_below,
        };
        (q, proj)
    }

    /// Check `β² = 0` and every two- and three-letter Adem relation on the window.
    pub fn check_relations(&self) -> Result<(), SteenrodError> {
        let p = self.p;
        let mut red = AdemReducer::new(p);
        let span = self.hi - self.lo;
        let step = 2 * (p as i32 - 1);
        let max_i = (span / step).max(0) as u32;
        for x in 0..self.names.len() {
            let ux = FpVec::unit(x);
            let bb = self.act_word(&[Letter::Beta, Letter::Beta], &ux);
            if !bb.is_zero() {
                return Err(SteenrodError::Relation(format!("beta beta {} != 0", self.names[x])));
            }
            for a in 1..=max_i {
                for b in 1..=max_i {
                    if (a + b) as i32 * step > span {
                        break;
                    }
                    let mut words = Vec::new();
                    if a < p * b {
                        words.push(vec![Letter::P(a), Letter::P(b)]);
                    }
                    if a <= p * b && (a + b) as i32 * step < span {
                        words.push(vec![Letter::P(a), Letter::Beta, Letter::P(b)]);
                    }
                    for w in words {
                        let lhs = self.act_word(&w, &ux);
                        let mut rhs = FpVec::new();
                        for (adm, c) in red.reduce(&w) {
                            rhs.add_scaled(&self.act_admissible(&adm, &ux), c, p);
                        }
                        if lhs != rhs {
                            let ws: Vec<String> = w
                                .iter()
                                .map(|l| match l {
                                    Letter::Beta => "beta".into(),
                                    Letter::P(i) => format!("P{i}"),
                                })
                                .collect();
                            return Err(SteenrodError::Relation(format!("Adem relation for {} fails on {}", ws.join(" "), self.names[x])));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Serialize in the module file format.
    pub fn to_text(&self) -> String {
        let t = self.suspension;
        let mut s = String::new();
        writeln!(s, "prime: {}", self.p).unwrap();
        writeln!(s, "window: {} {}", self.lo - t, self.hi - t).unwrap();
        for i in 0..self.names.len() {
            writeln!(s, "generator: {} {}", self.names[i], self.degrees[i] - t).unwrap();
        }
        let lincomb = |v: &FpVec| -> String {
            if v.is_zero() {
                return "0".into();
            }
            v.iter().map(|(j, c)| format!("{c}*{}", self.names[j])).collect::<Vec<_>>().join(" + ")
        };
        for i in 0..self.names.len() {
            if !self.beta[i].is_zero() {
                writeln!(s, "beta {} = {}", self.names[i], lincomb(&self.beta[i])).unwrap();
            }
        }
        for i in 0..self.names.len() {
            for (&k, v) in &self.powers[i] {
                writeln!(s, "P {k} {} = {}", self.names[i], lincomb(v)).unwrap();
            }
        }
        if t != 0 {
            writeln!(s, "suspend: {t}").unwrap();
        }
        s
    }

    /// Parse the module file format.
    pub fn parse(text: &str) -> Result<ModuleWindow, SteenrodError> {
        let mut prime = None;
        let mut window = None;
        let mut builder: Option<ModuleBuilder> = None;
        let mut suspend = 0;
        let mut pending: Vec<(usize, String)> = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let ln = ln + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: &str| SteenrodError::Parse(ln, msg.to_string());
            if let Some(rest) = line.strip_prefix("prime:") {
                let p: u32 = rest.trim().parse().map_err(|_| perr("bad prime"))?;
                super::OddPrime::new(p).map_err(|e| perr(&e.to_string()))?;
                prime = Some(p);
            } else if let Some(rest) = line.strip_prefix("window:") {
                let v: Vec<i32> = rest.split_whitespace().map(|x| x.parse()).collect::<Result<_, _>>().map_err(|_| perr("bad window"))?;
                if v.len() != 2 || v[0] > v[1] {
                    return Err(perr("window needs lo <= hi"));
                }
                window = Some((v[0], v[1]));
            } else if let Some(rest) = line.strip_prefix("generator:") {
                let (p, (lo, hi)) = match (prime, window) {
                    (Some(p), Some(w)) => (p, w),
                    _ => return Err(perr("prime and window must precede generators")),
                };
                let b = builder.get_or_insert_with(|| ModuleBuilder::new(p, lo, hi));
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 2 {
                    return Err(perr("expected `generator: <name> <degree>`"));
                }
                let d: i32 = parts[1].parse().map_err(|_| perr("bad degree"))?;
                b.generator(parts[0], d).map_err(|_| perr("duplicate generator"))?;
            } else if let Some(rest) = line.strip_prefix("suspend:") {
                suspend = rest.trim().parse().map_err(|_| perr("bad suspension"))?;
            } else if line.starts_with("beta ") || line.starts_with("P ") {
                pending.push((ln, line.to_string()));
            } else {
                return Err(perr("unrecognized line"));
            }
        }
        let p = prime.ok_or(SteenrodError::Parse(0, "missing prime".into()))?;
        let (lo, hi) = window.ok_or(SteenrodError::Parse(0, "missing window".into()))?;
        let mut b = builder.unwrap_or_else(|| ModuleBuilder::new(p, lo, hi));
        for (ln, line) in pending {
            let perr = |msg: &str| SteenrodError::Parse(ln, msg.to_string());
            let (lhs, rhs) = line.split_once('=').ok_or_else(|| perr("missing '='"))?;
            let lhs: Vec<&str> = lhs.split_whitespace().collect();
            let rhs = parse_lincomb(rhs, &b).map_err(|m| perr(&m))?;
            match lhs.as_slice() {
                ["beta", name] => {
                    let x = b.index_of(name).ok_or_else(|| perr("unknown generator"))?;
                    b.beta(x, rhs);
                }
                ["P", i, name] => {
                    let i: u32 = i.parse().map_err(|_| perr("bad power index"))?;
                    let x = b.index_of(name).ok_or_else(|| perr("unknown generator"))?;
                    b.power(i, x, rhs);
                }
                _ => return Err(perr("expected `beta <name>` or `P <i> <name>`")),
            }
        }
        let m = b.build()?;
        m.check_relations()?;
        Ok(if suspend != 0 { m.suspend(suspend) } else { m })
    }
}

fn parse_lincomb(s: &str, b: &ModuleBuilder) -> Result<Vec<(usize, i64)>, String> {
    let s = s.trim();
    if s == "0" {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let normalized = s.replace('-', "+-");
    for term in normalized.split('+') {
        let term = term.trim();
        if term.is_empty() {
            continue;
        }
        let (c, name) = match term.split_once('*') {
            Some((c, n)) => (c.trim().parse::<i64>().map_err(|_| format!("bad coefficient in `{term}`"))?, n.trim()),
            None => match term.strip_prefix('-') {
                Some(n) => (-1, n.trim()),
                None => (1, term),
            },
        };
        let j = b.index_of(name).ok_or_else(|| format!("unknown generator `{name}`"))?;
        out.push((j, c));
    }
    Ok(out)
}

/// `Σ^t F_p`.
pub fn sphere(p: u32, t: i32) -> ModuleWindow {
    let mut b = ModuleBuilder::new(p, 0, 0);
    b.generator("i", 0).unwrap();
    let m = b.build().unwrap();
    if t == 0 {
        m
    } else {
        m.suspend(t)
    }
}

/// `H*(BV_1) = Λ(u) ⊗ F_p[v]` truncated to degrees `<= n`.
pub fn bv1(p: u32, n: i32) -> ModuleWindow {
    let mut b = ModuleBuilder::new(p, 0, n.max(0));
    let name = |d: i32| -> String {
        let k = d / 2;
        match (d % 2, k) {
            (0, 0) => "1".into(),
            (0, 1) => "v".into(),
            (0, _) => format!("v{k}"),
            (_, 0) => "u".into(),
            (_, 1) => "uv".into(),
            _ => format!("uv{k}"),
        }
    };
    for d in 0..=n {
        b.generator(&name(d), d).unwrap();
    }
    for d in 0..=n {
        let k = (d / 2) as u64;
        if d % 2 == 1 && d < n {
            b.beta(d as usize, vec![(d as usize + 1, 1)]);
        }
        let mut i = 1u64;
        loop {
            let target = d as i64 + 2 * i as i64 * (p as i64 - 1);
            if target > n as i64 {
                break;
            }
            let c = binomial_mod(k, i, p);
            if c != 0 {
                b.power(i as u32, d as usize, vec![(target as usize, c as i64)]);
            }
            i += 1;
        }
    }
    b.build().unwrap()
}

/// A free module on generators of the given degrees, truncated to degrees `<= hi`.
#[derive(Debug, Clone)]
pub struct FreeModuleWindow {
    pub generators: Vec<i32>,
    pub hi: i32,
    /// `(generator, admissible word)` for each basis element of the module.
    pub basis: Vec<(usize, AdmissibleWord)>,
    pub module: ModuleWindow,
}

impl FreeModuleWindow {
    pub fn new(alg: &SteenrodAlgebra, generators: &[i32], hi: i32) -> FreeModuleWindow {
        let p = alg.prime();
        let lo = generators.iter().copied().min().unwrap_or(0).min(hi);
        let larger;
        let alg = if alg.max_degree() < hi - lo {
            larger = SteenrodAlgebra::shared(p, hi - lo);
            &*larger
        } else {
            alg
        };
        let mut b = ModuleBuilder::new(p, lo, hi);
        let mut basis = Vec::new();
        let mut index = HashMap::new();
        for (g, &dg) in generators.iter().enumerate() {
            for d in dg..=hi {
                for w in alg.admissible_basis(d - dg) {
                    let name = if generators.len() == 1 { format!("{w}") } else { format!("{w}.g{g}") };
                    let name = name.replace(' ', "_");
                    let i = b.generator(&name, d).unwrap();
                    index.insert((g, w.clone()), i);
                    basis.push((g, w.clone()));
                }
            }
        }
        for (i, (g, w)) in basis.iter().enumerate() {
            let dg = generators[*g];
            let d = dg + w.degree(p);
            if w.eps[0] == 0 && d < hi {
                let mut nw = w.clone();
                nw.eps[0] = 1;
                b.beta(i, vec![(index[&(*g, nw)], 1)]);
            }
            let mw = alg.admissible_to_milnor(w);
            let mut k = 1u32;
            while d + 2 * k as i32 * (p as i32 - 1) <= hi {
                let prod = alg.multiply_elements(&BTreeMap::from([(MilnorBasis::p(vec![k]), 1)]), &mw);
                let mut img: BTreeMap<usize, i64> = BTreeMap::new();
                for (m, c) in prod {
                    for (a, e) in alg.milnor_to_admissible(&m) {
                        *img.entry(index[&(*g, a)]).or_insert(0) += (c as u64 * e as u64 % p as u64) as i64;
                    }
                }
                let img: Vec<(usize, i64)> = img.into_iter().collect();
                if img.iter().any(|&(_, c)| c % p as i64 != 0) {
                    b.power(k, i, img);
                }
                k += 1;
            }
        }
        let mut module = b.build().unwrap();
        module.exact_below = Some(hi + 1);
        // The builder sorted by degree; keep `basis` aligned with the module order.
        let mut aligned = vec![None; basis.len()];
        for (g, w) in basis {
            let name = module_name(generators.len(), g, &w);
            let i = module.index_of(&name).unwrap();
            aligned[i] = Some((g, w));
        }
        FreeModuleWindow { generators: generators.to_vec(), hi, basis: aligned.into_iter().map(Option::unwrap).collect(), module }
    }
}

fn module_name(ngens: usize, g: usize, w: &AdmissibleWord) -> String {
    let name = if ngens == 1 { format!("{w}") } else { format!("{w}.g{g}") };
    name.replace(' ', "_")
}

/// `Σ^n A` truncated to degrees `<= hi`.
pub fn free(alg: &SteenrodAlgebra, n: i32, hi: i32) -> ModuleWindow {
    FreeModuleWindow::new(alg, &[n], hi).module
}

/// Action of Milnor basis elements on a module, cached.
#[derive(Debug)]
pub struct MilnorAction {
    module: Arc<ModuleWindow>,
    alg: Arc<SteenrodAlgebra>,
    cache: Mutex<HashMap<(MilnorBasis, usize), FpVec>>,
}

impl MilnorAction {
    pub fn new(module: Arc<ModuleWindow>) -> MilnorAction {
        let span = module.occupied().map_or(0, |(a, b)| b - a);
        let alg = SteenrodAlgebra::shared(module.prime(), span);
        MilnorAction { module, alg, cache: Mutex::new(HashMap::new()) }
    }

    pub fn module(&self) -> &ModuleWindow {
        &self.module
    }

    pub fn algebra(&self) -> &SteenrodAlgebra {
        &self.alg
    }

    /// `m · x` for a basis element `x`.
    pub fn act(&self, m: &MilnorBasis, x: usize) -> FpVec {
        let p = self.module.prime();
        let d = m.degree(p) + self.module.degree_of(x);
        if d > self.module.hi || self.module.dim(d) == 0 {
            return FpVec::new();
        }
        if m.q == 0 && m.r.is_empty() {
            return FpVec::unit(x);
        }
        let key = (m.clone(), x);
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return v.clone();
        }
        let ux = FpVec::unit(x);
        let mut out = FpVec::new();
        for (w, c) in self.alg.milnor_to_admissible(m) {
            out.add_scaled(&self.module.act_admissible(&w, &ux), c, p);
        }
        self.cache.lock().unwrap().insert(key, out.clone());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_degrees() {
        let s = sphere(3, 5);
        assert_eq!(s.dim(5), 1);
        assert_eq!(s.total_dim(), 1);
        assert_eq!(s.suspend(-5), sphere(3, 0));
    }

    #[test]
    fn bv1_actions() {
        let m = bv1(3, 12);
        let u = m.index_of("u").unwrap();
        let v = m.index_of("v").unwrap();
        assert_eq!(m.beta_of(u), &FpVec::unit(v));
        // P^1 v = v^3
        assert_eq!(m.power_of(1, v), FpVec::unit(m.index_of("v3").unwrap()));
        m.check_relations().unwrap();
        assert!(m.is_unstable());
    }

    #[test]
    fn truncation_dims() {
        let m = bv1(3, 20).truncate(3, Side::Below);
        assert_eq!((m.dim(0), m.dim(1), m.dim(2), m.total_dim()), (1, 1, 1, 3));
        assert_eq!(sphere(3, 0).truncate(0, Side::Below).total_dim(), 0);
        assert_eq!(sphere(3, 0).truncate(10, Side::Below), sphere(3, 0));
    }

    #[test]
    fn frobenius_examples() {
        assert_eq!(sphere(3, 0).frobenius().dim(0), 1);
        let f = sphere(3, 1).frobenius();
        assert_eq!(f.dim(2), 1);
        assert_eq!(f.total_dim(), 1);
    }

    #[test]
    fn lambda_examples() {
        let m = bv1(3, 12);
        let l = m.lambda_map();
        let v = m.index_of("v").unwrap();
        let u = m.index_of("u").unwrap();
        assert_eq!(l[v], FpVec::unit(m.index_of("v3").unwrap()));
        assert_eq!(l[u], FpVec::unit(v));
        assert_eq!(l[m.index_of("1").unwrap()], FpVec::unit(m.index_of("1").unwrap()));
    }

    #[test]
    fn parse_round_trip() {
        let text = "prime: 3\nwindow: 0 1\ngenerator: a 0\ngenerator: b 1\nbeta a = b\nbeta b = 0\n";
        let m = ModuleWindow::parse(text).unwrap();
        assert_eq!(m.beta_of(0), &FpVec::unit(1));
        assert_eq!(ModuleWindow::parse(&m.to_text()).unwrap(), m);
        let s = bv1(5, 30).suspend(-3);
        assert_eq!(ModuleWindow::parse(&s.to_text()).unwrap(), s);
    }

    #[test]
    fn parse_rejects_bad_relations() {
        let text = "prime: 3\nwindow: 0 8\ngenerator: a 0\ngenerator: b 4\ngenerator: c 8\nP 1 a = b\nP 1 b = c\n";
        assert!(matches!(ModuleWindow::parse(text), Err(SteenrodError::Relation(_))));
        let bad_deg = "prime: 3\nwindow: 0 2\ngenerator: a 0\ngenerator: b 2\nbeta a = b\n";
        assert!(matches!(ModuleWindow::parse(bad_deg), Err(SteenrodError::Degree(_))));
    }
}
