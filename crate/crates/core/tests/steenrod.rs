use std::collections::BTreeMap;

use destab::steenrod::*;
use proptest::prelude::*;

fn letter() -> impl Strategy<Value = Letter> {
    prop_oneof![Just(Letter::Beta), (1u32..5).prop_map(Letter::P)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn adem_agrees_with_milnor(w in proptest::collection::vec(letter(), 0..5), p in prop_oneof![Just(3u32), Just(5u32)]) {
        let deg: i32 = w.iter().map(|l| l.degree(p)).sum();
        prop_assume!(deg <= 70);
        let alg = SteenrodAlgebra::shared(p, 70);
        let mut red = AdemReducer::new(p);
        let mut via_adem: MilnorElement = BTreeMap::new();
        for (a, c) in red.reduce(&w) {
            for (m, e) in alg.admissible_to_milnor(&a) {
                let v = via_adem.entry(m.clone()).or_insert(0);
                *v = (*v + c * e) % p;
                if *v == 0 { via_adem.remove(&m); }
            }
        }
        prop_assert_eq!(via_adem, letters_to_milnor(&w, p));
    }

    #[test]
    fn milnor_product_associative(a in 0usize..30, b in 0usize..30, c in 0usize..30) {
        let p = 3;
        let alg = SteenrodAlgebra::shared(p, 40);
        let pick = |i: usize| {
            let d = (i as i32) % 14 + 1;
            let basis = alg.milnor_basis(d);
            if basis.is_empty() { MilnorBasis::unit() } else { basis[i % basis.len()].clone() }
        };
        let (x, y, z) = (pick(a), pick(b), pick(c));
        let one = |m: &MilnorBasis| BTreeMap::from([(m.clone(), 1u32)]);
        let l = alg.multiply_elements(&alg.multiply_elements(&one(&x), &one(&y)), &one(&z));
        let r = alg.multiply_elements(&one(&x), &alg.multiply_elements(&one(&y), &one(&z)));
        prop_assert_eq!(l, r);
    }
}

#[test]
fn free_module_satisfies_relations() {
    for p in [3, 5] {
        let alg = SteenrodAlgebra::shared(p, 40);
        let f = free(&alg, 0, 40);
        f.check_relations().unwrap();
        for d in 0..=40 {
            assert_eq!(f.dim(d), alg.dim(d));
        }
    }
}

#[test]
fn destabilized_free_module_counts_excess() {
    // D(Σ^t A) has a basis of admissible words of excess at most t.
    for p in [3, 5] {
        let alg = SteenrodAlgebra::shared(p, 50);
        for t in 0..6 {
            let (d, _) = free(&alg, t, 50).destabilize();
            for deg in t..=50 {
                let expect = alg.admissible_basis(deg - t).iter().filter(|w| w.excess(p) <= t).count();
                assert_eq!(d.dim(deg), expect, "p={p} t={t} deg={deg}");
            }
            assert!(d.is_unstable());
        }
    }
}

#[test]
fn bv1_destabilization_is_identity() {
    let m = bv1(3, 30);
    let (d, _) = m.destabilize();
    assert_eq!(d.total_dim(), m.total_dim());
}

#[test]
fn frobenius_and_lambda_are_compatible() {
    // λ is A-linear from ΦM to M.
    let m = bv1(3, 20);
    let f = m.frobenius();
    let l = m.lambda_map();
    for x in 0..f.total_dim() {
        for w in [vec![Letter::Beta], vec![Letter::P(1)], vec![Letter::P(3)], vec![Letter::P(4)]] {
            let lhs = f.act_word(&w, &destab::fpla::FpVec::unit(x));
            let mut img = destab::fpla::FpVec::new();
            for (y, c) in lhs.iter() {
                img.add_scaled(&l[y], c, 3);
            }
            assert_eq!(img, m.act_word(&w, &l[x]), "x={x} w={w:?}");
        }
    }
}

#[test]
fn frobenius_is_a_module() {
    for p in [3, 5] {
        bv1(p, 40).frobenius().check_relations().unwrap();
        let alg = SteenrodAlgebra::shared(p, 30);
        for t in 0..3 {
            let (d, _) = free(&alg, t, 30).destabilize();
            d.frobenius().check_relations().unwrap();
        }
    }
}
