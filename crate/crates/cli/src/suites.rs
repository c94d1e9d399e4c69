//! The `verify` suites. Each returns one [`CheckReport`] per input.

use destab::complex::{
    connectivity_check, d_squared_check, stability_check, verify_dickson_linearity, verify_ses,
    verify_unstable_identification, CheckFailure, CheckReport, ComplexError, ComplexWindow,
};
use destab::invariants::classes::{dickson_by_product, dickson_by_recursion, e_by_recursion, l_by_recursion, mtilde_by_recursion};
use destab::invariants::{
    dickson, mui, phi_s, psi_element, rank_cap, theta, GammaElement, GammaMonomial, GammaTensor, InvariantsError, MuiClass,
};
use destab::oracle::compare;
use destab::steenrod::{bv1, free, sphere, MilnorBasis, ModuleWindow, SteenrodAlgebra};

use crate::input::check_window;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Suite {
    /// every suite below
    All,
    /// d_{s-1} d_s = 0
    Dsquared,
    /// complex homology against the free-resolution oracle
    Oracle,
    /// vanishing on free modules
    Free,
    /// the identification on desuspended unstable modules
    Zarati,
    /// invariant-theory identities
    Invariants,
    /// closure of R_s under β, P^1, P^p
    Stability,
    /// the short exact sequence of complexes
    Ses,
    /// vanishing below the connectivity bound
    Connectivity,
    /// Dickson semilinearity of d_s
    Dickson,
}

impl Suite {
    pub const EACH: [Suite; 9] = [
        Suite::Dsquared,
        Suite::Oracle,
        Suite::Free,
        Suite::Zarati,
        Suite::Invariants,
        Suite::Stability,
        Suite::Ses,
        Suite::Connectivity,
        Suite::Dickson,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Dsquared => "dsquared",
            Suite::Oracle => "oracle",
            Suite::Free => "free",
            Suite::Zarati => "zarati",
            Suite::Invariants => "invariants",
            Suite::Stability => "stability",
            Suite::Ses => "ses",
            Suite::Connectivity => "connectivity",
            Suite::Dickson => "dickson",
        }
    }
}

/// Overrides for the default workloads. A module replaces the default module list of
/// the suites that take one; `prime` replaces the default primes.
#[derive(Debug, Clone, Default)]
pub struct SuiteOptions {
    pub prime: Option<u32>,
    pub module: Option<(String, ModuleWindow)>,
    pub s_max: Option<usize>,
    pub deg_max: Option<i32>,
}

impl SuiteOptions {
    fn primes(&self, default: &[u32]) -> Vec<u32> {
        self.prime.map_or_else(|| default.to_vec(), |p| vec![p])
    }

    fn degree(&self, p: u32, default: i32) -> Result<i32, CliError> {
        let d = self.deg_max.unwrap_or(default);
        check_window(p, d)?;
        Ok(d)
    }

    fn modules(&self, p: u32, default: Vec<(String, ModuleWindow)>) -> Vec<(String, ModuleWindow)> {
        match &self.module {
            Some((name, m)) if m.prime() == p => vec![(name.clone(), m.clone())],
            Some(_) => Vec::new(),
            None => default,
        }
    }
}

type Labelled = Vec<(String, ModuleWindow)>;

fn spheres(p: u32, ts: std::ops::RangeInclusive<i32>) -> Labelled {
    ts.map(|t| (format!("sphere({t})"), sphere(p, t))).collect()
}

fn free_labelled(p: u32, n: i32, hi: i32) -> (String, ModuleWindow) {
    let alg = SteenrodAlgebra::shared(p, (hi - n).max(0));
    (format!("free({n})"), free(&alg, n, hi))
}

fn failed(name: String, s: usize, e: impl std::fmt::Display) -> CheckReport {
    let mut r = CheckReport::new(name);
    r.checks = 1;
    r.failures.push(CheckFailure::new(e.to_string(), s, 0, "error"));
    r
}

fn named(mut r: CheckReport, name: String) -> CheckReport {
    r.name = name;
    r
}

/// Complexes of the d² suite: `p ∈ {3, 5}`, spheres `Σ^t` for `-4 <= t <= 2`,
/// `bv1(12)`, `free(0)`, `free(1)`, `s <= 3`, degrees `<= 60` / `40`.
fn dsquared_runs(o: &SuiteOptions) -> Result<Vec<(String, ComplexWindow)>, CliError> {
    let mut out = Vec::new();
    for p in o.primes(&[3, 5]) {
        let deg = o.degree(p, if p == 3 { 60 } else { 40 })?;
        let mut ms = spheres(p, -4..=2);
        ms.push(("bv1(12)".into(), bv1(p, 12)));
        ms.push(free_labelled(p, 0, deg));
        ms.push(free_labelled(p, 1, deg));
        for (name, m) in o.modules(p, ms) {
            out.push((format!("p={p} {name}"), ComplexWindow::build(m, o.s_max.unwrap_or(3), deg)?));
        }
    }
    Ok(out)
}

fn oracle_modules(o: &SuiteOptions, p: u32) -> Labelled {
    let mut ms = spheres(p, -3..=1);
    ms.push(("bv1(10)".into(), bv1(p, 10)));
    o.modules(p, ms)
}

/// Complexes of the free-module suite: `Σ^t A` for `-2 <= t <= 2`, built to `s = 3`
/// so that `H_2` is exact.
fn free_runs(o: &SuiteOptions) -> Result<Vec<(String, ComplexWindow)>, CliError> {
    let mut out = Vec::new();
    for p in o.primes(&[3]) {
        let deg = o.degree(p, 40)?;
        for t in -2..=2 {
            let (name, m) = free_labelled(p, t, deg);
            out.push((format!("p={p} {name}"), ComplexWindow::build(m, 3, deg)?));
        }
    }
    Ok(out)
}

fn zarati_modules(o: &SuiteOptions, p: u32) -> Labelled {
    let ms = vec![
        ("sphere(0)".to_string(), sphere(p, 0)),
        ("sphere(0)+sphere(1)".to_string(), sphere(p, 0).direct_sum(&sphere(p, 1))),
        ("bv1(10)".to_string(), bv1(p, 10)),
    ];
    o.modules(p, ms)
}

pub fn dsquared(o: &SuiteOptions) -> Result<Vec<CheckReport>, CliError> {
    dsquared_runs(o)?.into_iter().map(|(n, c)| Ok(named(d_squared_check(&c)?, format!("d squared {n}")))).collect()
}

pub fn oracle(o: &SuiteOptions) -> Result<Vec<CheckReport>, CliError> {
    let mut out = Vec::new();
    for p in o.primes(&[3]) {
        let deg = o.degree(p, 40)?;
        let s_max = o.s_max.unwrap_or(2);
        for (name, m) in oracle_modules(o, p) {
            let c = compare(&m, s_max, deg)?;
            let mut r = CheckReport::new(format!("oracle p={p} {name}"));
            r.checks = c.rows.len();
            let higher = c.rows.iter().filter(|row| row.0 >= 1 && row.3 > 0).count();
            r.notes.push(format!("{} rows compared, {higher} nonzero with s >= 1", c.rows.len()));
            r.failures = c.failures;
            out.push(r);
        }
    }
    Ok(out)
}

pub fn free_vanishing(o: &SuiteOptions) -> Result<Vec<CheckReport>, CliError> {
    let mut out = Vec::new();
    for (name, c) in free_runs(o)? {
        let mut r = CheckReport::new(format!("free vanishing {name}"));
        for s in 1..=2 {
            for (d, n, exact) in c.homology_rows(s)? {
                r.checks += 1;
                if n != 0 || !exact {
                    r.failures.push(CheckFailure::new("H_s of a free module is nonzero", s, d, format!("dim {n}, exact {exact}")));
                }
            }
        }
        out.push(r);
    }
    Ok(out)
}

pub fn zarati(o: &SuiteOptions) -> Result<Vec<CheckReport>, CliError> {
    let mut out = Vec::new();
    for p in o.primes(&[3, 5]) {
        let deg = o.degree(p, 40)?;
        for (name, m) in zarati_modules(o, p) {
            for s in 0..=o.s_max.unwrap_or(3) {
                let r = match verify_unstable_identification(&m, s, deg) {
                    Ok(r) => r,
                    Err(ComplexError::NotUnstable) => failed(format!("zarati p={p} {name}"), s, "module is not unstable"),
                    Err(e) => return Err(e.into()),
                };
                out.push(named(r, format!("zarati p={p} {name} s={s}")));
            }
        }
    }
    Ok(out)
}

fn check(r: &mut CheckReport, ok: bool, reason: impl FnOnce() -> String, s: usize) {
    r.checks += 1;
    if !ok {
        r.failures.push(CheckFailure::new(reason(), s, 0, "polynomial identity"));
    }
}

fn xi(k: usize) -> MilnorBasis {
    let mut r = vec![0; k];
    r[k - 1] = 1;
    MilnorBasis::p(r)
}

fn theta_xi(p: u32, s: usize, k: usize) -> GammaElement {
    if k == 0 {
        GammaElement::one(p, s)
    } else {
        theta(p, s, &xi(k))
    }
}

fn elementary(s: usize, i: usize, j: usize, a: i64) -> Vec<Vec<i64>> {
    let mut g: Vec<Vec<i64>> = (0..s).map(|r| (0..s).map(|c| (r == c) as i64).collect()).collect();
    g[i][j] = a;
    g
}

/// The invariant-theory identities at one prime, for ranks up to the rank cap.
pub fn invariant_identities(p: u32) -> Result<CheckReport, CliError> {
    let mut r = CheckReport::new(format!("invariants p={p}"));
    let cap = rank_cap(p);
    let inv = |e: InvariantsError| CliError::Internal(e.to_string());
    for s in 1..=cap {
        let e = mui(p, s, MuiClass::E).map_err(inv)?;
        check(&mut r, e.mul(&e) == dickson(p, s, 0).map_err(inv)?, || format!("e_{s}^2 != Q_{s},0"), s);
        for i in 0..=s {
            check(&mut r, dickson_by_product(p, s, i) == dickson_by_recursion(p, s, i), || format!("Q_{s},{i} recursion"), s);
        }
        check(&mut r, mui(p, s, MuiClass::L).map_err(inv)? == l_by_recursion(p, s), || format!("L_{s} recursion"), s);
        check(&mut r, e == e_by_recursion(p, s), || format!("e_{s} recursion"), s);
        for i in 0..s {
            let m = mui(p, s, MuiClass::MTilde(i)).map_err(inv)?;
            check(&mut r, m == mtilde_by_recursion(p, s, i), || format!("M~_{s},{i} recursion"), s);
        }
        // invariance under generators of GL_s; L_s and e_s see the determinant
        let mut gens = vec![elementary(s, 0, 0, 2)];
        for i in 0..s {
            for j in (0..s).filter(|&j| j != i) {
                gens.push(elementary(s, i, j, 1));
            }
        }
        for i in 0..s {
            for c in [dickson(p, s, i).map_err(inv)?, mui(p, s, MuiClass::R(i)).map_err(inv)?] {
                for g in &gens {
                    check(&mut r, c.act_linear(g) == c, || format!("GL_{s} invariance of Q_{s},{i} / R_{s},{i}"), s);
                }
            }
        }
        for c in [mui(p, s, MuiClass::L).map_err(inv)?, mui(p, s, MuiClass::M(0)).map_err(inv)?] {
            check(&mut r, c.act_linear(&gens[0]) == c.scale(2), || format!("L_{s} / M_{s},0 is not a determinant class"), s);
        }
        for g in &gens[1..] {
            check(&mut r, e.act_linear(g) == e, || format!("e_{s} not SL_{s} invariant"), s);
        }
        if s >= 2 {
            check(&mut r, phi_s(p, s, &GammaElement::q(p, s, 0)).map_err(inv)?.is_zero(), || format!("φ_{s}(Q_{s},0) != 0"), s);
            for j in 1..s {
                let img = phi_s(p, s, &GammaElement::q(p, s, j)).map_err(inv)?;
                check(&mut r, img == GammaElement::q(p, s - 1, j - 1).pow(p), || format!("φ_{s}(Q_{s},{j})"), s);
            }
            // ψ_{s-1,1}(Q_{s,j}) = Q_{s-1,0}^{p-1} Q_{s-1,j} ⊗ Q_{1,0} + Q_{s-1,j-1}^p ⊗ 1
            for j in 1..s {
                let lhs = psi_element(&GammaElement::q(p, s, j), s - 1, 1);
                let a = GammaElement::q0_pow(p, s - 1, p as i32 - 1).mul(&GammaElement::q(p, s - 1, j));
                let rhs = GammaTensor::pure(&[a, GammaElement::q(p, 1, 0)])
                    .add(&GammaTensor::pure(&[GammaElement::q(p, s - 1, j - 1).pow(p), GammaElement::one(p, 1)]));
                check(&mut r, lhs == rhs, || format!("ψ_{},1(Q_{s},{j})", s - 1), s);
            }
        }
    }
    // θ against the coproduct on ξ_1..ξ_3 and τ_0..τ_2
    for s in 1..cap {
        for t in 1..=(cap - s) {
            for k in 1..=3 {
                let lhs = psi_element(&theta_xi(p, s + t, k), s, t);
                let mut rhs = GammaTensor::zero(p, vec![s, t]);
                for i in 0..=k {
                    rhs = rhs.add(&GammaTensor::pure(&[theta_xi(p, s, k - i).pow(p.pow(i as u32)), theta_xi(p, t, i)]));
                }
                check(&mut r, lhs == rhs, || format!("θ/Δ on ξ_{k}, s={s} t={t}"), s + t);
            }
            for k in 0..=2u32 {
                let tau = |n: usize, i: u32| theta(p, n, &MilnorBasis::q(i));
                let lhs = psi_element(&tau(s + t, k), s, t);
                let mut rhs = GammaTensor::pure(&[tau(s, k), GammaElement::one(p, t)]);
                for i in 0..=k as usize {
                    rhs = rhs.add(&GammaTensor::pure(&[theta_xi(p, s, k as usize - i).pow(p.pow(i as u32)), tau(t, i as u32)]));
                }
                check(&mut r, lhs == rhs, || format!("θ/Δ on τ_{k}, s={s} t={t}"), s + t);
            }
        }
    }
    // coassociativity on rank 3 monomials
    for mask in 0..8u32 {
        for e0 in -2..=2 {
            for e1 in 0..=1 {
                for e2 in 0..=1 {
                    let m = GammaMonomial { mask, e0, e: vec![e1, e2] };
                    let start = GammaTensor::pure(&[GammaElement::monomial(p, 3, m.clone(), 1)]);
                    let left = start.apply_psi(0, 2, 1).apply_psi(0, 1, 1);
                    let right = start.apply_psi(0, 1, 2).apply_psi(1, 1, 1);
                    check(&mut r, left == right, || format!("ψ coassociativity on {m:?}"), 3);
                }
            }
        }
    }
    Ok(r)
}

pub fn invariants(o: &SuiteOptions) -> Result<Vec<CheckReport>, CliError> {
    o.primes(&[3, 5]).into_iter().map(invariant_identities).collect()
}

pub fn stability(o: &SuiteOptions) -> Result<Vec<CheckReport>, CliError> {
    let mut out = Vec::new();
    for p in o.primes(&[3]) {
        let deg = o.degree(p, 40)?;
        for (name, m) in oracle_modules(o, p) {
            for s in 0..=o.s_max.unwrap_or(2) {
                out.push(named(stability_check(&m, s, deg), format!("A-stability p={p} {name} s={s}")));
            }
        }
    }
    Ok(out)
}

pub fn ses(o: &SuiteOptions) -> Result<Vec<CheckReport>, CliError> {
    let mut out = Vec::new();
    for p in o.primes(&[3]) {
        let deg = o.degree(p, 30)?;
        let mut ms = vec![("sphere(0)".to_string(), sphere(p, 0)), ("sphere(-1)".to_string(), sphere(p, -1))];
        // these make both squares and the connecting map nonzero
        ms.push(("bv1(12) suspended -3".into(), bv1(p, 12).suspend(-3)));
        ms.push(("bv1(12) suspended -1".into(), bv1(p, 12).suspend(-1)));
        ms.push(free_labelled(p, -1, deg));
        for (name, m) in o.modules(p, ms) {
            out.push(named(verify_ses(&m, o.s_max.unwrap_or(2), deg)?, format!("ses p={p} {name}")));
        }
    }
    Ok(out)
}

/// Connectivity on every complex of the d², oracle, free and Zarati suites.
pub fn connectivity(o: &SuiteOptions) -> Result<Vec<CheckReport>, CliError> {
    let mut out = Vec::new();
    let mut runs = dsquared_runs(o)?;
    for p in o.primes(&[3]) {
        let deg = o.degree(p, 40)?;
        for (name, m) in oracle_modules(o, p) {
            runs.push((format!("p={p} {name} (oracle run)"), ComplexWindow::build(m, o.s_max.unwrap_or(2) + 1, deg)?));
        }
    }
    runs.extend(free_runs(o)?);
    for p in o.primes(&[3, 5]) {
        let deg = o.degree(p, 40)?;
        for (name, m) in zarati_modules(o, p) {
            for s in 0..=o.s_max.unwrap_or(3) {
                runs.push((format!("p={p} Σ^{}{name}", 1 - s as i32), ComplexWindow::build(m.suspend(1 - s as i32), s + 1, deg)?));
            }
        }
    }
    for (name, c) in runs {
        out.push(named(connectivity_check(&c)?, format!("connectivity {name}")));
    }
    Ok(out)
}

pub fn dickson_suite(o: &SuiteOptions) -> Result<Vec<CheckReport>, CliError> {
    let mut out = Vec::new();
    for p in o.primes(&[3]) {
        let deg = o.degree(p, 30)?;
        let m = match &o.module {
            Some((_, m)) => m.clone(),
            None => sphere(p, 0),
        };
        let mut runs = vec![(2usize, 3i32, 1u32)];
        runs.extend((0..=2).map(|t| (2, t, 0)));
        for (s, t, w) in runs {
            let name = format!("dickson p={p} s={s} t={t} w={w}");
            let r = match verify_dickson_linearity(&m, s, t, w, deg) {
                Ok(r) => r,
                Err(e) => failed(name.clone(), s, e),
            };
            out.push(named(r, name));
        }
        // below the twist bound the precondition must be refused
        let mut r = CheckReport::new(format!("dickson p={p} s=2 t=3 w=0 refused"));
        let res = verify_dickson_linearity(&m, 2, 3, 0, deg);
        r.checks = 1;
        if !matches!(res, Err(ComplexError::TwistTooSmall { .. })) {
            r.failures.push(CheckFailure::new("twist precondition not enforced", 2, 0, "t=3 w=0 accepted"));
        }
        out.push(r);
    }
    Ok(out)
}

/// Run one suite, or all of them in order.
pub fn run(suite: Suite, o: &SuiteOptions) -> Result<Vec<CheckReport>, CliError> {
    match suite {
        Suite::All => {
            let mut out = Vec::new();
            for s in Suite::EACH {
                out.extend(run(s, o)?);
            }
            Ok(out)
        }
        Suite::Dsquared => dsquared(o),
        Suite::Oracle => oracle(o),
        Suite::Free => free_vanishing(o),
        Suite::Zarati => zarati(o),
        Suite::Invariants => invariants(o),
        Suite::Stability => stability(o),
        Suite::Ses => ses(o),
        Suite::Connectivity => connectivity(o),
        Suite::Dickson => dickson_suite(o),
    }
}
