use destab::oracle::{compare, derived_destab, oracle_table, DestabilizedResolution, OracleError, ResolutionWindow};
use destab::rfunctor::{Part, RsSpace};
use destab::steenrod::{bv1, free, sphere, ModuleBuilder, ModuleWindow, SteenrodAlgebra};
use std::sync::Arc;

#[test]
fn free_module_resolves_in_length_zero() {
    let p = 3;
    let alg = SteenrodAlgebra::shared(p, 30);
    let res = ResolutionWindow::new(&free(&alg, 1, 30), 2, 30).unwrap();
    res.check_exact().unwrap();
    assert_eq!(res.stage(0).generator_degrees(), &[1]);
    assert!(res.stage(1).generator_degrees().is_empty());
    assert!(res.stage(2).generator_degrees().is_empty());
}

#[test]
fn first_syzygies_of_the_sphere() {
    // F_0 = A on one generator; the kernel of the augmentation is generated by
    // β, P^1, P^3, P^9, ... in degrees 1, 4, 12, 36 at p = 3
    let res = ResolutionWindow::new(&sphere(3, 0), 1, 40).unwrap();
    res.check_exact().unwrap();
    assert_eq!(res.stage(0).generator_degrees(), &[0]);
    assert_eq!(res.stage(1).generator_degrees(), &[1, 4, 12, 36]);
}

#[test]
fn resolutions_are_exact() {
    let p = 3;
    for m in [sphere(p, -2), sphere(p, 1), bv1(p, 10)] {
        let res = ResolutionWindow::new(&m, 3, 30).unwrap();
        res.check_exact().unwrap();
        assert!(res.is_minimal());
    }
}

#[test]
fn destabilized_free_modules_match_the_quotient() {
    // excess criterion against the spanning-set quotient M/BM
    let p = 3;
    let alg = SteenrodAlgebra::shared(p, 40);
    for n in -2..=3 {
        let m = free(&alg, n, 30);
        let res = ResolutionWindow::new(&m, 0, 30).unwrap();
        let dr = DestabilizedResolution::new(&res);
        let (dm, _) = m.destabilize();
        for d in n..=30 {
            assert_eq!(dr.dim(0, d), dm.dim(d), "n={n} degree {d}");
        }
    }
}

#[test]
fn zeroth_derived_functor_is_destabilization() {
    let p = 3;
    for m in [sphere(p, -3), sphere(p, 0), bv1(p, 10).suspend(-2)] {
        let res = ResolutionWindow::new(&m, 1, 30).unwrap();
        let (dm, _) = m.destabilize();
        for (d, n) in derived_destab(&res, 0).unwrap() {
            assert_eq!(n, dm.dim(d), "degree {d}");
        }
    }
}

#[test]
fn higher_derived_functors_vanish_on_free_modules() {
    let p = 3;
    let alg = SteenrodAlgebra::shared(p, 40);
    for t in -2..=2 {
        for (s, d, n) in oracle_table(&free(&alg, t, 30), 2, 30).unwrap() {
            if s >= 1 {
                assert_eq!(n, 0, "t={t} s={s} degree {d}");
            }
        }
    }
}

#[test]
fn unstable_desuspension_gives_r_s() {
    let p = 3;
    let m = sphere(p, 0);
    for s in 1..=2 {
        let res = ResolutionWindow::new(&m.suspend(1 - s as i32), s + 1, 30).unwrap();
        let rs = RsSpace::new(Arc::new(m.clone()), s);
        for (d, n) in derived_destab(&res, s).unwrap() {
            assert_eq!(n, rs.ks_basis(d - 1, Part::Plus).len(), "s={s} degree {d}");
        }
    }
}

#[test]
fn oracle_agrees_with_the_complex() {
    let p = 3;
    for m in [sphere(p, -1), sphere(p, 0), sphere(p, -3)] {
        let c = compare(&m, 2, 25).unwrap();
        assert!(c.passed(), "{:?}\n{}", c.failures, c.tables());
        assert!(c.rows.iter().any(|&(s, _, _, o)| s >= 1 && o > 0));
    }
}

#[test]
fn additivity_on_direct_sums() {
    let p = 3;
    let (a, b) = (sphere(p, -1), bv1(p, 8));
    let sum = oracle_table(&a.direct_sum(&b), 2, 24).unwrap();
    let ta = oracle_table(&a, 2, 24).unwrap();
    let tb = oracle_table(&b, 2, 24).unwrap();
    for (s, d, n) in sum {
        let get = |t: &[(usize, i32, usize)]| t.iter().find(|r| r.0 == s && r.1 == d).map_or(0, |r| r.2);
        assert_eq!(n, get(&ta) + get(&tb), "s={s} degree {d}");
    }
}

/// The same module on a rescaled basis: every other basis element doubled.
fn rescaled(m: &ModuleWindow) -> ModuleWindow {
    let p = m.prime() as i64;
    let (lo, hi) = m.window();
    let scale = |i: usize| if i % 2 == 1 { 2 } else { 1 };
    // x'_i = c_i x_i, so a x'_i = c_i Σ a_ji x_j = Σ c_i c_j^{-1} a_ji x'_j, and 2^{-1} = 2 for p = 3
    let coef = |i: usize, j: usize, a: u32| (a as i64 * scale(i) * scale(j)).rem_euclid(p);
    let mut b = ModuleBuilder::new(m.prime(), lo, hi);
    for i in 0..m.total_dim() {
        b.generator(m.name(i), m.degree_of(i)).unwrap();
    }
    for i in 0..m.total_dim() {
        b.beta(i, m.beta_of(i).iter().map(|(j, a)| (j, coef(i, j, a))).collect());
        for (k, v) in m.declared_powers(i) {
            b.power(k, i, v.iter().map(|(j, a)| (j, coef(i, j, a))).collect());
        }
    }
    b.build().unwrap()
}

#[test]
fn isomorphic_presentations_agree() {
    let m = bv1(3, 10).suspend(-1);
    let r = rescaled(&m);
    assert_ne!(m, r);
    r.check_relations().unwrap();
    assert_eq!(oracle_table(&m, 2, 24).unwrap(), oracle_table(&r, 2, 24).unwrap());
}

#[test]
fn window_exhaustion_is_reported() {
    let alg = SteenrodAlgebra::shared(3, 30);
    let m = free(&alg, 0, 20);
    assert!(matches!(ResolutionWindow::new(&m, 1, 30), Err(OracleError::WindowExhausted { degree: 21 })));
}
