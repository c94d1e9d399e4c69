//! Structural checks on `𝔇_• M`: connectivity, the identification on unstable
//! modules, the short exact sequence of complexes and Dickson semilinearity.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::differential::Differential;
use super::window::{bound, ComplexWindow};
use super::{CheckFailure, ComplexError};
use crate::fpla::{neg_mod, solve, EchelonBasis, FpVec, SparseMatFp};
use crate::invariants::GammaMonomial;
use crate::rfunctor::{rho_preimage_degree, suspension_inclusion, Part, Rho, RsSpace};
use crate::steenrod::{Letter, ModuleWindow};

/// Outcome of a batch of checks.
#[derive(Debug, Clone, Default)]
pub struct CheckReport {
    pub name: String,
    pub checks: usize,
    pub failures: Vec<CheckFailure>,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> Self {
        CheckReport { name: name.into(), ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, f: impl FnOnce() -> CheckFailure) {
        self.checks += 1;
        if !ok {
            self.failures.push(f());
        }
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.checks += other.checks;
        self.failures.extend(other.failures);
        self.notes.extend(other.notes);
    }
}

/// `1 + p^s(|M| + s - 1)`.
pub fn connectivity_bound(p: u32, s: usize, lowest: i32) -> i64 {
    bound(p, s, lowest)
}

/// `H_s` and `𝔇_s` vanish strictly below `1 + p^s(|M| + s - 1)`. Degrees below the
/// bound are swept down to `p^s` steps under it, or to the bottom of the window.
pub fn connectivity_check(c: &ComplexWindow) -> Result<CheckReport, ComplexError> {
    let mut r = CheckReport::new("connectivity");
    let Some((lo, _)) = c.module().occupied() else { return Ok(r) };
    let p = c.prime();
    for s in 0..=c.s_max() {
        let b = bound(p, s, lo);
        let top = (b - 1).min(c.deg_max() as i64);
        let sweep = 2 * (p as i64).pow(s as u32) + 4;
        for d in (top - sweep).max(i32::MIN as i64)..=top {
            let d = d as i32;
            let dim = c.dim(s, d);
            r.check(dim == 0, || CheckFailure::new("chain below connectivity", s, d, format!("dim 𝔇_{s} = {dim}, bound {b}")));
            let h = c.homology(s, d)?.dim;
            r.check(h == 0, || CheckFailure::new("homology below connectivity", s, d, format!("dim H_{s} = {h}, bound {b}")));
        }
        if let Some(first) = c.degrees(s).find(|&d| c.dim(s, d) > 0) {
            r.notes.push(format!("s = {s}: bound {b}, first nonzero chain degree {first}"));
        }
    }
    Ok(r)
}

/// `d_{s-1} d_s = 0`, one check per position and degree.
pub fn d_squared_check(c: &ComplexWindow) -> Result<CheckReport, ComplexError> {
    let mut r = CheckReport::new("d squared");
    for s in 2..=c.s_max() {
        for (&deg, m) in c.differentials(s) {
            let prod = c.differential(s - 1, deg).mul(m)?;
            r.check(prod.is_zero(), || {
                let (i, j, v) = prod.entries()[0];
                CheckFailure::new(format!("d_{} d_{s} is nonzero", s - 1), s, deg, format!("entry ({i}, {j}) = {v}"))
            });
        }
    }
    Ok(r)
}

/// `β`, `P^1` and `P^p` applied in the ambient to every basis element of `R_s N` in
/// degrees `<= deg_max` pull back to `R_s N` with zero residual.
pub fn stability_check(n: &ModuleWindow, s: usize, deg_max: i32) -> CheckReport {
    let p = n.prime();
    let mut r = CheckReport::new(format!("A-stability s={s}"));
    let space = RsSpace::new(Arc::new(n.clone()), s);
    let Some(lo) = space.connectivity() else { return r };
    let ops = [Letter::Beta, Letter::P(1), Letter::P(p)];
    for d in lo.max(i32::MIN as i64) as i32..=deg_max {
        for i in 0..space.basis(d).len() {
            for op in ops {
                let res = space.act(op, d, &FpVec::unit(i));
                r.check(res.is_ok(), || {
                    CheckFailure::new("action leaves R_s", s, d, format!("{op:?} on basis element {i}: {}", res.unwrap_err()))
                });
            }
        }
    }
    r
}

fn zero_matrices(r: &mut CheckReport, c: &ComplexWindow, s: usize, what: &str) {
    for d in c.degrees(s) {
        let m = c.differential(s, d);
        r.check(m.is_zero(), || {
            let (i, j, v) = m.entries()[0];
            CheckFailure::new(format!("{what} is nonzero"), s, d, format!("entry ({i}, {j}) = {v}"))
        });
    }
}

/// For unstable `M`: on `𝔇_•Σ^{1-s}M` the differentials into and out of position `s`
/// vanish and `H_s` has the dimensions of `ΣR_s M`, counted from the `K_s` basis.
pub fn verify_unstable_identification(m: &ModuleWindow, s: usize, deg_max: i32) -> Result<CheckReport, ComplexError> {
    if !m.is_unstable() {
        return Err(ComplexError::NotUnstable);
    }
    let mut r = CheckReport::new(format!("unstable identification s={s}"));
    let c = ComplexWindow::build(m.suspend(1 - s as i32), s + 1, deg_max)?;
    c.check_squares()?;
    zero_matrices(&mut r, &c, s, &format!("d_{s}"));
    zero_matrices(&mut r, &c, s + 1, &format!("d_{}", s + 1));
    let rs = RsSpace::new(Arc::new(m.clone()), s);
    for h in c.homology_table(s)? {
        let expected = rs.ks_basis(h.degree - 1, Part::Plus).len();
        r.check(h.dim == expected && h.exact, || {
            CheckFailure::new("H_s differs from ΣR_s M", s, h.degree, format!("H_{s} = {}, ΣR_{s} count = {expected}", h.dim))
        });
    }
    r.merge(connectivity_check(&c)?);
    Ok(r)
}

/// For unstable `M`: on `𝔇_•Σ^{-s}M`, `d_{s+1}` vanishes so `H_s = ker d_s`, and the
/// copy of `R_s M` inside `𝔇_s Σ^{-s} M` lies in that kernel.
pub fn kernel_characterization(m: &ModuleWindow, s: usize, deg_max: i32) -> Result<CheckReport, ComplexError> {
    if !m.is_unstable() {
        return Err(ComplexError::NotUnstable);
    }
    let mut r = CheckReport::new(format!("kernel characterization s={s}"));
    let c = ComplexWindow::build(m.suspend(-(s as i32)), s + 1, deg_max)?;
    zero_matrices(&mut r, &c, s + 1, &format!("d_{}", s + 1));
    let rs = RsSpace::new(Arc::new(m.clone()), s);
    for h in c.homology_table(s)? {
        let d = h.degree;
        r.check(h.image_rank == 0 && h.dim == h.kernel_dim, || {
            CheckFailure::new("H_s is not ker d_s", s, d, format!("image rank {}", h.image_rank))
        });
        let n = rs.basis(d).len();
        r.check(h.kernel_dim >= n, || CheckFailure::new("ker d_s smaller than R_s M", s, d, format!("{} < {n}", h.kernel_dim)));
        if s == 0 {
            continue;
        }
        let ds = c.differential(s, d);
        for i in 0..n {
            let v = suspension_inclusion(&rs, c.space(s), d - 1, i);
            let img = ds.apply(&v);
            r.check(img.is_zero(), || CheckFailure::new("R_s M not in ker d_s", s, d, format!("basis element {i}")));
        }
    }
    Ok(r)
}

/// Degree `e` with `|Φx| = f` for `|x| = e`.
fn frobenius_preimage(p: u32, f: i32) -> Option<i32> {
    let q = p as i32;
    if f.rem_euclid(2 * q) == 0 {
        Some(f / q)
    } else if (f - 2).rem_euclid(2 * q) == 0 {
        Some((f - 2) / q + 1)
    } else {
        None
    }
}

/// Module-index coordinates of a vector on the basis of `R_0`.
fn r0_to_module(space: &RsSpace, d: i32, v: &FpVec) -> FpVec {
    let b = space.basis(d);
    FpVec::from_map(v.iter().map(|(i, c)| (b.elements[i].0, c)).collect())
}

fn sign_of(c: u32, p: u32) -> &'static str {
    if c == 1 {
        "+"
    } else if c == p - 1 {
        "-"
    } else {
        "?"
    }
}

/// Tracks whether two families of vectors agree up to one global sign.
struct SignMatch {
    plus: bool,
    minus: bool,
    seen: bool,
}

impl SignMatch {
    fn new() -> Self {
        SignMatch { plus: true, minus: true, seen: false }
    }

    fn observe(&mut self, a: &FpVec, b: &FpVec, p: u32) {
        let mut diff = a.clone();
        diff.add_scaled(b, p - 1, p);
        let mut sum = a.clone();
        sum.add_scaled(b, 1, p);
        self.plus &= diff.is_zero();
        self.minus &= sum.is_zero();
        self.seen |= !a.is_zero() || !b.is_zero();
    }

    fn sign(&self, p: u32) -> Option<u32> {
        if self.plus {
            Some(1)
        } else if self.minus {
            Some(p - 1)
        } else {
            None
        }
    }
}

/// The short exact sequence `0 → Σ^{-1}𝔇_•ΣM → 𝔇_•M → Σ^{-1}Φ𝔇_{•-1}ΣM → 0`:
/// degreewise ranks and exactness, commutation of both maps with the
/// differentials and the connecting map at `s = 1`. Each comparison is made up to one
/// global sign after the Koszul sign `(-1)^e` of the element's degree `e` in `ΣM`-terms.
pub fn verify_ses(m: &ModuleWindow, s_max: usize, deg_max: i32) -> Result<CheckReport, ComplexError> {
    let p = m.prime();
    let mut r = CheckReport::new("short exact sequence");
    let cm = ComplexWindow::build(m.clone(), s_max, deg_max)?;
    let cs = ComplexWindow::build(m.suspend(1), s_max, deg_max + 1)?;
    for s in 0..=s_max {
        let rho = (s >= 1).then(|| Rho::new(cm.space(s), cs.space(s - 1)));
        for d in cm.degrees(s) {
            let dim = cm.dim(s, d);
            let sub = cs.dim(s, d + 1);
            let e = rho_preimage_degree(p, d - 1);
            let quot = match (s, e) {
                (0, _) | (_, None) => 0,
                (_, Some(e)) => cs.dim(s - 1, e + 1),
            };
            r.check(dim == sub + quot, || {
                CheckFailure::new("rank identity", s, d, format!("{dim} != {sub} + {quot}"))
            });
            let Some(rho) = &rho else { continue };
            let mut images = Vec::with_capacity(dim);
            for i in 0..dim {
                images.push(rho.apply_basis(d - 1, i)?.1);
            }
            let rank = SparseMatFp::from_columns(p, quot, &images).rank();
            r.check(rank == quot, || CheckFailure::new("ρ not onto", s, d, format!("rank {rank} < {quot}")));
            for i in 0..sub {
                let v = suspension_inclusion(cs.space(s), cm.space(s), d - 1, i);
                let mut acc = FpVec::new();
                for (j, c) in v.iter() {
                    acc.add_scaled(&images[j], c, p);
                }
                r.check(acc.is_zero(), || CheckFailure::new("ρ ∘ ι nonzero", s, d, format!("basis element {i}")));
            }
        }
    }
    // ι commutes with d
    for s in 1..=s_max {
        let mut sm = SignMatch::new();
        let mut count = 0;
        for d in cm.degrees(s) {
            let dm = cm.differential(s, d);
            let ds = cs.differential(s, d + 1);
            for i in 0..cs.dim(s, d + 1) {
                let lhs = dm.apply(&suspension_inclusion(cs.space(s), cm.space(s), d - 1, i));
                let mut rhs = FpVec::new();
                for (j, c) in ds.apply(&FpVec::unit(i)).iter() {
                    rhs.add_scaled(&suspension_inclusion(cs.space(s - 1), cm.space(s - 1), d - 1, j), c, p);
                }
                sm.observe(&lhs, &rhs, p);
                count += 1;
            }
        }
        r.check(sm.sign(p).is_some(), || CheckFailure::new("ι does not commute with d", s, 0, "no uniform sign"));
        if let Some(c) = sm.sign(p) {
            r.notes.push(format!("d ι = {}ι d at s = {s} ({count} elements)", sign_of(c, p)));
        }
    }
    // ρ commutes with d
    for s in 2..=s_max {
        let rho_s = Rho::new(cm.space(s), cs.space(s - 1));
        let rho_t = Rho::new(cm.space(s - 1), cs.space(s - 2));
        let mut sm = SignMatch::new();
        let mut count = 0;
        for d in cm.degrees(s) {
            let Some(e) = rho_preimage_degree(p, d - 1) else { continue };
            let dm = cm.differential(s, d);
            for i in 0..cm.dim(s, d) {
                let mut lhs = FpVec::new();
                for (j, c) in dm.apply(&FpVec::unit(i)).iter() {
                    lhs.add_scaled(&rho_t.apply_basis(d - 1, j)?.1, c, p);
                }
                let (_, v) = rho_s.apply_basis(d - 1, i)?;
                let mut rhs = cs.differential(s - 1, e + 1).apply(&v);
                if e.rem_euclid(2) == 1 {
                    rhs.scale(p - 1, p);
                }
                sm.observe(&lhs, &rhs, p);
                count += 1;
            }
        }
        r.check(sm.sign(p).is_some(), || CheckFailure::new("ρ does not commute with d", s, 0, "no uniform sign"));
        if let Some(c) = sm.sign(p) {
            r.notes.push(format!("ρ d = {}(-1)^e Φd ρ at s = {s} ({count} elements, nonzero seen: {})", sign_of(c, p), sm.seen));
        }
    }
    if s_max >= 1 {
        r.merge(connecting_map(&cm, &cs)?);
    }
    Ok(r)
}

/// The connecting map `Σ^{-1}Φ D(ΣM) → Σ^{-1} D(ΣM)` at `s = 1` against
/// `(-1)^{|σm|} Σ^{-1}λ`, up to a global sign, modulo `B(ΣM)`.
fn connecting_map(cm: &ComplexWindow, cs: &ComplexWindow) -> Result<CheckReport, ComplexError> {
    let p = cm.prime();
    let mut r = CheckReport::new("connecting map");
    let sm = cs.module();
    let lambda = sm.lambda_map();
    let rho = Rho::new(cm.space(1), cs.space(0));
    let mut plus = true;
    let mut minus = true;
    let mut nonzero = 0;
    let mut checked = Vec::new();
    for x in 0..sm.total_dim() {
        let f = sm.degree_of(x);
        let d = crate::steenrod::ModuleWindow::frobenius_degree(p, f) - 1;
        if d > cm.deg_max() {
            continue;
        }
        debug_assert_eq!(frobenius_preimage(p, d + 1), Some(f));
        // lift Φσm through ρ_1
        let n = cm.dim(1, d);
        let tgt = cs.space(0).basis(f - 1);
        let cols = (0..n).map(|i| rho.apply_basis(d - 1, i).map(|(_, v)| v)).collect::<Result<Vec<_>, _>>()?;
        let rho_m = SparseMatFp::from_columns(p, tgt.len(), &cols);
        let j = tgt.index_of(x, &GammaMonomial::one(0)).expect("R_0 basis is the module basis");
        let Some(lift) = solve(&rho_m, &FpVec::unit(j)) else {
            r.check(false, || CheckFailure::new("Φσm has no lift", 1, d, sm.name(x).to_string()));
            continue;
        };
        let image = r0_to_module(cm.space(0), d - 1, &cm.differential(1, d).apply(&lift));
        // B(ΣM) in degree d + 1, on module indices
        let b = cs.differential(1, d + 1);
        let bcols: Vec<FpVec> =
            (0..b.ncols()).map(|i| r0_to_module(cs.space(0), d, &b.apply(&FpVec::unit(i)))).collect();
        let mut ech = EchelonBasis::new(p, sm.total_dim());
        for c in &bcols {
            ech.insert(c);
        }
        let mut lam = lambda[x].clone();
        if f.rem_euclid(2) == 1 {
            lam.scale(p - 1, p);
        }
        let lam = &lam;
        let mut diff = image.clone();
        diff.add_scaled(lam, neg_mod(1, p), p);
        let mut sum = image.clone();
        sum.add_scaled(lam, 1, p);
        plus &= ech.contains(&diff);
        minus &= ech.contains(&sum);
        if !ech.contains(&image) {
            nonzero += 1;
        }
        checked.push((x, d));
    }
    r.checks += checked.len();
    if !plus && !minus {
        let (x, d) = checked.first().copied().unwrap_or((0, 0));
        r.failures.push(CheckFailure::new("connecting map is not ±λ", 1, d, sm.name(x).to_string()));
    } else {
        let sign = if plus { "+" } else { "-" };
        r.notes.push(format!("δ = {sign}(-1)^{{|σm|}}Σ^{{-1}}λ on {} classes, {nonzero} nonzero in D(ΣM)", checked.len()));
    }
    Ok(r)
}

/// `Q_{s,j}^{n}` in `Γ_s`.
fn dickson_power(s: usize, j: usize, n: u32) -> GammaMonomial {
    let mut m = GammaMonomial::one(s);
    if j == 0 {
        m.e0 = n as i32;
    } else {
        m.e[j - 1] = n;
    }
    m
}

/// `d_s : R_s Σ^{-t} M → R_{s-1} Σ^{-(t+1)} M` against `q = Q_{s,j}^{p^w}` acting by
/// multiplication on the source and through `φ_s` on the target, on every basis
/// element of degree `<= deg_max`. No precondition on the twist.
pub fn dickson_linearity_report(
    m: &ModuleWindow,
    s: usize,
    t: i32,
    w: u32,
    deg_max: i32,
) -> Result<CheckReport, ComplexError> {
    assert!(s >= 1);
    let p = m.prime();
    let mut r = CheckReport::new(format!("Dickson linearity s={s} t={t} w={w}"));
    let src = RsSpace::new(Arc::new(m.suspend(-t)), s);
    let tgt = RsSpace::new(Arc::new(m.suspend(-t - 1)), s - 1);
    let diff = Differential::new(&src, &tgt);
    let pw = p.pow(w);
    let lo = src.connectivity().unwrap_or(deg_max as i64 + 1) as i32;
    let mut cache: BTreeMap<i32, SparseMatFp> = BTreeMap::new();
    let mut matrix = |d: i32| -> Result<SparseMatFp, ComplexError> {
        if let Some(m) = cache.get(&d) {
            return Ok(m.clone());
        }
        let mm = diff.matrix(d)?;
        cache.insert(d, mm.clone());
        Ok(mm)
    };
    let mut nonzero = 0;
    for j in 0..s {
        let q = dickson_power(s, j, pw);
        let shift = q.degree(p, s) as i32;
        // φ_s(Q_{s,j})^{p^w} = Q_{s-1,j-1}^{p^{w+1}}, and φ_s(Q_{s,0}) = 0
        let phi = (j > 0).then(|| dickson_power(s - 1, j - 1, pw * p));
        for d in lo..=deg_max {
            let basis = src.basis(d);
            if basis.is_empty() {
                continue;
            }
            let high = src.basis(d + shift);
            let md = matrix(d)?;
            let mq = matrix(d + shift)?;
            let tb = tgt.basis(d);
            let tq = tgt.basis(d + shift);
            for (i, (x, g)) in basis.elements.iter().enumerate() {
                let Some((gq, neg)) = g.mul(&q) else { continue };
                debug_assert!(!neg);
                let k = high.index_of(*x, &gq).expect("R_s is a module over the Dickson algebra");
                let lhs = mq.apply(&FpVec::unit(k));
                let mut rhs = FpVec::new();
                if let Some(phi) = &phi {
                    for (a, c) in md.apply(&FpVec::unit(i)).iter() {
                        let (y, h) = &tb.elements[a];
                        let (hq, _) = h.mul(phi).expect("polynomial factor");
                        let b = tq.index_of(*y, &hq).expect("R_{s-1} is a module over the Dickson algebra");
                        rhs.add_scaled(&FpVec::unit(b), c, p);
                    }
                }
                nonzero += usize::from(!lhs.is_zero());
                r.check(lhs == rhs, || {
                    CheckFailure::new(
                        "d_s(q e) != φ_s(q) d_s(e)",
                        s,
                        d,
                        format!("q = Q_{{{s},{j}}}^{pw}, e = {} ⊗ {}", crate::invariants::gamma::format_monomial(g, s), src.module().name(*x)),
                    )
                });
            }
        }
    }
    r.notes.push(format!("{} products checked, {nonzero} with d_s(q e) nonzero", r.checks));
    Ok(r)
}

/// [`dickson_linearity_report`] for unstable `M` and `[(t+1)/2] <= p^w`.
pub fn verify_dickson_linearity(
    m: &ModuleWindow,
    s: usize,
    t: i32,
    w: u32,
    deg_max: i32,
) -> Result<CheckReport, ComplexError> {
    if !m.is_unstable() {
        return Err(ComplexError::NotUnstable);
    }
    let u = ((t + 1) / 2) as i64;
    let pw = (m.prime() as i64).pow(w);
    if u > pw {
        return Err(ComplexError::TwistTooSmall { u, pw });
    }
    dickson_linearity_report(m, s, t, w, deg_max)
}
