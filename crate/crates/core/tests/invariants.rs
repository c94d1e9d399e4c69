use destab::invariants::classes::{dickson_by_product, dickson_by_recursion, e_by_recursion, l_by_recursion, mtilde_by_recursion};
use destab::invariants::{
    beta_bv, dickson, gamma_to_bv, ks_monomials, mui, phi_s, power_bv, psi, psi_element, rank_cap, st1, theta, BVElement, GammaAction,
    GammaElement, GammaMonomial, GammaTensor, KsDecomposer, KsMonomial, MuiClass,
};
use destab::steenrod::MilnorBasis;
use proptest::prelude::*;

fn ranks(p: u32) -> std::ops::RangeInclusive<usize> {
    1..=rank_cap(p)
}

#[test]
fn e_squared_is_q0() {
    for p in [3u32, 5] {
        for s in ranks(p) {
            let e = mui(p, s, MuiClass::E).unwrap();
            assert_eq!(e.mul(&e), dickson(p, s, 0).unwrap(), "p={p} s={s}");
        }
    }
}

#[test]
fn dickson_product_matches_recursion() {
    for p in [3u32, 5] {
        for s in ranks(p) {
            for i in 0..=s {
                assert_eq!(dickson_by_product(p, s, i), dickson_by_recursion(p, s, i), "p={p} s={s} i={i}");
            }
        }
    }
}

#[test]
fn mui_classes_match_recursions() {
    for p in [3u32, 5] {
        for s in ranks(p) {
            assert_eq!(mui(p, s, MuiClass::L).unwrap(), l_by_recursion(p, s), "L p={p} s={s}");
            assert_eq!(mui(p, s, MuiClass::E).unwrap(), e_by_recursion(p, s), "e p={p} s={s}");
            for i in 0..s {
                assert_eq!(mui(p, s, MuiClass::MTilde(i)).unwrap(), mtilde_by_recursion(p, s, i), "M p={p} s={s} i={i}");
            }
        }
    }
}

#[test]
fn stable_classes_commute_with_st1() {
    // St_1 is an algebra map up to the Koszul sign, so it preserves e^2 = Q_0.
    let p = 3;
    let e = mui(p, 1, MuiClass::E).unwrap();
    assert_eq!(st1(&e).mul(&st1(&e)), st1(&dickson(p, 1, 0).unwrap()));
}

fn elementary(s: usize, i: usize, j: usize) -> Vec<Vec<i64>> {
    let mut g: Vec<Vec<i64>> = (0..s).map(|r| (0..s).map(|c| (r == c) as i64).collect()).collect();
    g[i][j] = 1;
    g
}

fn diagonal(s: usize, i: usize, a: i64) -> Vec<Vec<i64>> {
    let mut g: Vec<Vec<i64>> = (0..s).map(|r| (0..s).map(|c| (r == c) as i64).collect()).collect();
    g[i][i] = a;
    g
}

#[test]
fn invariance_under_general_linear_group() {
    for p in [3u32, 5] {
        for s in ranks(p) {
            let mut gens = vec![diagonal(s, 0, 2)];
            for i in 0..s {
                for j in 0..s {
                    if i != j {
                        gens.push(elementary(s, i, j));
                    }
                }
            }
            let mut classes = vec![];
            for i in 0..s {
                classes.push(dickson(p, s, i).unwrap());
                classes.push(mui(p, s, MuiClass::R(i)).unwrap());
            }
            for g in &gens {
                for c in &classes {
                    assert_eq!(&c.act_linear(g), c, "p={p} s={s}");
                }
            }
            // L_s and M_{s,i} pick up the determinant
            let det = 2;
            for c in [mui(p, s, MuiClass::L).unwrap(), mui(p, s, MuiClass::M(0)).unwrap()] {
                assert_eq!(c.act_linear(&gens[0]), c.scale(det), "p={p} s={s}");
            }
        }
    }
}

#[test]
fn psi_of_inverse_top_class() {
    let p = 3;
    let mut m = GammaMonomial::one(2);
    m.e0 = -1;
    let mut l = GammaMonomial::one(1);
    l.e0 = -(p as i32);
    let mut r = GammaMonomial::one(1);
    r.e0 = -1;
    let mut expected = GammaTensor::zero(p, vec![1, 1]);
    expected.add_term(vec![l, r], 1);
    assert_eq!(psi(p, 1, 1, &m), expected);
}

fn gamma_monomial(s: usize) -> impl Strategy<Value = GammaMonomial> {
    (0u32..(1 << s), -3i32..3, proptest::collection::vec(0u32..3, s - 1)).prop_map(|(mask, e0, e)| GammaMonomial { mask, e0, e })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn psi_is_coassociative(m in gamma_monomial(3)) {
        let p = 3;
        let start = GammaTensor::pure(&[GammaElement::monomial(p, 3, m, 1)]);
        let left = start.apply_psi(0, 2, 1).apply_psi(0, 1, 1);
        let right = start.apply_psi(0, 1, 2).apply_psi(1, 1, 1);
        prop_assert_eq!(left, right);
    }

    #[test]
    fn psi_is_multiplicative(a in gamma_monomial(2), b in gamma_monomial(2)) {
        let p = 5;
        let x = GammaElement::monomial(p, 2, a, 1);
        let y = GammaElement::monomial(p, 2, b, 1);
        prop_assert_eq!(psi_element(&x.mul(&y), 1, 1), psi_element(&x, 1, 1).mul(&psi_element(&y, 1, 1)));
    }

    #[test]
    fn adem_relations_on_gamma(m in gamma_monomial(2)) {
        let p = 3;
        let act = GammaAction::new(p, 2).unwrap();
        let g = GammaElement::monomial(p, 2, m, 1);
        // P^1 P^1 = 2 P^2
        let lhs = act.power(&act.power(&g, 1).unwrap(), 1).unwrap();
        prop_assert_eq!(lhs, act.power(&g, 2).unwrap().scale(2));
        // P^1 β P^1 = β P^2 + P^2 β
        let lhs = act.power(&act.beta(&act.power(&g, 1).unwrap()).unwrap(), 1).unwrap();
        let rhs = act.beta(&act.power(&g, 2).unwrap()).unwrap().add(&act.power(&act.beta(&g).unwrap(), 2).unwrap());
        prop_assert_eq!(lhs, rhs);
        prop_assert!(act.beta(&act.beta(&g).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn gamma_action_is_multiplicative(a in gamma_monomial(2), b in gamma_monomial(2), n in 0u32..4) {
        let p = 3;
        let act = GammaAction::new(p, 2).unwrap();
        let x = GammaElement::monomial(p, 2, a, 1);
        let y = GammaElement::monomial(p, 2, b, 1);
        let mut cartan = GammaElement::zero(p, 2);
        for i in 0..=n {
            cartan = cartan.add(&act.power(&x, i).unwrap().mul(&act.power(&y, n - i).unwrap()));
        }
        prop_assert_eq!(act.power(&x.mul(&y), n).unwrap(), cartan);
    }
}

#[test]
fn gamma_action_matches_polynomials() {
    let p = 3;
    let s = 2;
    let act = GammaAction::new(p, s).unwrap();
    for mask in 0..4u32 {
        for e0 in 0..2 {
            for e1 in 0..2 {
                let m = GammaMonomial { mask, e0, e: vec![e1] };
                let poly = gamma_to_bv(p, s, &m).unwrap();
                let g = GammaElement::monomial(p, s, m.clone(), 1);
                for n in 0..4 {
                    let img = act.power(&g, n).unwrap();
                    let mut as_poly = BVElement::zero(p, s);
                    for (k, &c) in img.terms() {
                        as_poly = as_poly.add(&gamma_to_bv(p, s, k).unwrap().scale(c));
                    }
                    assert_eq!(as_poly, power_bv(&poly, n), "P^{n} on {m:?}");
                }
                let img = act.beta(&g).unwrap();
                let mut as_poly = BVElement::zero(p, s);
                for (k, &c) in img.terms() {
                    as_poly = as_poly.add(&gamma_to_bv(p, s, k).unwrap().scale(c));
                }
                assert_eq!(as_poly, beta_bv(&poly), "beta on {m:?}");
            }
        }
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

#[test]
fn theta_is_compatible_with_the_coproduct() {
    for p in [3u32, 5] {
        let cap = rank_cap(p);
        for s in 1..cap {
            for t in 1..=(cap - s) {
                for k in 1..=3 {
                    let lhs = psi_element(&theta_xi(p, s + t, k), s, t);
                    let mut rhs = GammaTensor::zero(p, vec![s, t]);
                    for i in 0..=k {
                        rhs = rhs.add(&GammaTensor::pure(&[theta_xi(p, s, k - i).pow(p.pow(i as u32)), theta_xi(p, t, i)]));
                    }
                    assert_eq!(lhs, rhs, "xi_{k} p={p} s={s} t={t}");
                }
                for k in 0..=2u32 {
                    let tau = |r: usize| theta(p, r, &MilnorBasis::q(k));
                    let lhs = psi_element(&tau(s + t), s, t);
                    let mut rhs = GammaTensor::pure(&[tau(s), GammaElement::one(p, t)]);
                    for i in 0..=k as usize {
                        let ti = theta(p, t, &MilnorBasis::q(i as u32));
                        rhs = rhs.add(&GammaTensor::pure(&[theta_xi(p, s, k as usize - i).pow(p.pow(i as u32)), ti]));
                    }
                    assert_eq!(lhs, rhs, "tau_{k} p={p} s={s} t={t}");
                }
            }
        }
    }
}

#[test]
fn phi_on_dickson_generators() {
    let p = 3;
    // φ_2(Q_{2,1}) = Q_{1,0}^p and φ_2(Q_{2,0}) = 0
    let q1 = GammaElement::q(p, 2, 1);
    assert_eq!(phi_s(p, 2, &q1).unwrap(), GammaElement::q0_pow(p, 1, p as i32));
    assert!(phi_s(p, 2, &GammaElement::q(p, 2, 0)).unwrap().is_zero());
    assert!(phi_s(p, 2, &GammaElement::r(p, 2, 0)).is_err());
}

#[test]
fn ks_generators_decompose_through_st1() {
    for p in [3u32, 5] {
        for s in 2..=rank_cap(p) {
            let dec = KsDecomposer::new(p, s);
            assert_eq!(dec.generator_e().to_bv().unwrap(), mui(p, s, MuiClass::E).unwrap());
            for i in 1..s {
                assert_eq!(dec.generator_q(i).to_bv().unwrap(), dickson(p, s, i).unwrap(), "Q p={p} s={s} i={i}");
            }
            for i in 0..s {
                assert_eq!(dec.generator_m(i).to_bv().unwrap(), mui(p, s, MuiClass::MTilde(i)).unwrap(), "M p={p} s={s} i={i}");
            }
        }
    }
}

#[test]
fn ks_monomials_decompose_through_st1() {
    let p = 3;
    let dec = KsDecomposer::new(p, 2);
    for d in 0..30 {
        for k in ks_monomials(p, 2, d) {
            assert_eq!(dec.decompose(&k).to_bv().unwrap(), k.to_bv(p, 2).unwrap(), "{k}");
        }
    }
    let k = KsMonomial { mask: 0b11, a: 1, b: vec![0] };
    assert_eq!(dec.decompose(&k).to_bv().unwrap(), k.to_bv(p, 2).unwrap());
}
