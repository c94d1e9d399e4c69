use std::sync::Arc;

use destab::complex::{
    connectivity_check, dickson_linearity_report, kernel_characterization, verify_dickson_linearity, verify_ses,
    verify_unstable_identification, ComplexError, ComplexWindow, Differential,
};
use destab::fpla::FpVec;
use destab::invariants::GammaMonomial;
use destab::rfunctor::RsSpace;
use destab::steenrod::{bv1, free, sphere, Letter, SteenrodAlgebra};

fn q0(e0: i32) -> GammaMonomial {
    GammaMonomial { e0, ..GammaMonomial::one(1) }
}

fn w(e0: i32) -> GammaMonomial {
    GammaMonomial { mask: 1, e0, e: vec![] }
}

/// `d_1 : R_1 ΣN → N` on a single basis element, as a module vector of `N`.
fn d1(src: &RsSpace, tgt: &RsSpace, x: usize, g: &GammaMonomial) -> FpVec {
    let d = src.module().degree_of(x) + g.degree(src.prime(), 1) as i32;
    let i = src.basis(d).index_of(x, g).expect("basis element");
    let v = Differential::new(src, tgt).apply(d, &FpVec::unit(i)).unwrap();
    let b = tgt.basis(d);
    FpVec::from_map(v.iter().map(|(j, c)| (b.elements[j].0, c)).collect())
}

#[test]
fn d1_on_st1_classes() {
    // d_1(Q^n St_1(x)) = (-1)^{n+1} βP^{(|x|+2n)/2} x and
    // d_1(w Q^{n+1} St_1(x)) = (-1)^{n+1} P^{(|x|+2n+2)/2} x, for |x| even;
    // N is desuspended so that these classes are not killed by instability
    let p = 3;
    let n_mod = bv1(p, 60).suspend(-4);
    let sn = n_mod.suspend(1);
    let src = RsSpace::new(Arc::new(sn.clone()), 1);
    let tgt = RsSpace::new(Arc::new(n_mod.clone()), 0);
    let mut nonzero = 0;
    for x in (0..sn.total_dim()).filter(|&x| sn.degree_of(x) % 2 == 0 && sn.degree_of(x) < 12) {
        let dx = sn.degree_of(x);
        for n in 0i32..=3 {
            let e0 = n + dx.div_euclid(2);
            let sign = if (n + 1) % 2 == 1 { p - 1 } else { 1 };
            let i = (dx + 2 * n) / 2;
            if i >= 0 {
                let mut expected = sn.act_letter(Letter::Beta, &sn.power_of(i as u32, x));
                expected.scale(sign, p);
                nonzero += usize::from(!expected.is_zero());
                assert_eq!(d1(&src, &tgt, x, &q0(e0)), expected, "Q^{n} St_1 x, x = {}", sn.name(x));
            }
            // w Q^{n+1} St_1(x) is R_{1,0} Q^{n + |x|/2} in Γ form
            let i = (dx + 2 * n + 2) / 2;
            if i >= 0 {
                let mut expected = sn.power_of(i as u32, x);
                expected.scale(sign, p);
                nonzero += usize::from(!expected.is_zero());
                assert_eq!(d1(&src, &tgt, x, &w(e0)), expected, "w Q^{} St_1 x, x = {}", n + 1, sn.name(x));
            }
        }
    }
    assert!(nonzero >= 6, "only {nonzero} nonzero values");
}

#[test]
fn d_squared_vanishes_on_spheres() {
    for (p, deg) in [(3u32, 40), (5, 30)] {
        for t in -4..=2 {
            let c = ComplexWindow::build(sphere(p, t), 3, deg).unwrap();
            c.check_squares().unwrap_or_else(|e| panic!("p={p} t={t}: {e}"));
        }
    }
}

#[test]
fn h0_is_destabilization() {
    let p = 3;
    let alg = SteenrodAlgebra::shared(p, 30);
    for m in [sphere(p, -2), sphere(p, 1), bv1(p, 12).suspend(-1), free(&alg, -1, 30)] {
        let c = ComplexWindow::build(m.clone(), 1, 30).unwrap();
        let (dm, _) = m.destabilize();
        for h in c.homology_table(0).unwrap() {
            assert_eq!(h.dim, dm.dim(h.degree), "degree {}", h.degree);
        }
    }
}

#[test]
fn free_modules_are_acyclic() {
    let p = 3;
    let alg = SteenrodAlgebra::shared(p, 40);
    for t in -2..=2 {
        // s_max = 3 so that H_2 is exact
        let c = ComplexWindow::build(free(&alg, t, 40), 3, 40).unwrap();
        c.check_squares().unwrap();
        for s in 1..=2 {
            for h in c.homology_table(s).unwrap() {
                assert!(h.exact);
                assert_eq!(h.dim, 0, "t={t} s={s} degree {}", h.degree);
            }
        }
    }
}

#[test]
fn connectivity_holds() {
    let p = 3;
    for t in -2..=1 {
        let c = ComplexWindow::build(sphere(p, t), 2, 30).unwrap();
        let r = connectivity_check(&c).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
    }
}

#[test]
fn unstable_identification() {
    let p = 3;
    for m in [sphere(p, 0), sphere(p, 0).direct_sum(&sphere(p, 1)), bv1(p, 10)] {
        for s in 0..=2 {
            let r = verify_unstable_identification(&m, s, 40).unwrap();
            assert!(r.passed(), "s={s}: {:?}", r.failures);
        }
    }
}

#[test]
fn kernel_of_d_s() {
    let p = 3;
    for s in 1..=2 {
        let r = kernel_characterization(&sphere(p, 0), s, 30).unwrap();
        assert!(r.passed(), "s={s}: {:?}", r.failures);
    }
}

#[test]
fn short_exact_sequence_of_complexes() {
    let p = 3;
    for t in [0, -1, -3] {
        let r = verify_ses(&sphere(p, t), 2, 30).unwrap();
        assert!(r.passed(), "t={t}: {:?}", r.failures);
    }
}

#[test]
fn ses_signs_are_seen_on_larger_modules() {
    // these inputs make both commuting squares and the connecting map nonzero
    let p = 3;
    let alg = SteenrodAlgebra::shared(p, 40);
    for m in [bv1(p, 12).suspend(-3), bv1(p, 12).suspend(-1), free(&alg, -1, 30)] {
        let r = verify_ses(&m, 2, 30).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        assert!(r.notes.iter().any(|n| n.contains("nonzero seen: true")) || r.notes.iter().any(|n| n.contains(" nonzero in") && !n.contains(" 0 nonzero")), "{:?}", r.notes);
    }
}

#[test]
fn dickson_semilinearity() {
    let p = 3;
    let r = verify_dickson_linearity(&sphere(p, 0), 2, 3, 1, 30).unwrap();
    assert!(r.passed(), "{:?}", r.failures);
    assert!(r.checks > 0);
    for t in 0..=2 {
        let r = verify_dickson_linearity(&sphere(p, 0), 2, t, 0, 30).unwrap();
        assert!(r.passed(), "t={t}: {:?}", r.failures);
    }
    assert!(matches!(verify_dickson_linearity(&sphere(p, 0), 2, 3, 0, 30), Err(ComplexError::TwistTooSmall { .. })));
    let _ = dickson_linearity_report(&sphere(p, 0), 2, 3, 0, 30).unwrap();
}
