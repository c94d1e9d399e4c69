//! Dickson and Mui classes as explicit polynomials.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use super::bv::{st1, BVElement};
use super::InvariantsError;

/// Largest rank for which classes are computed at prime `p`.
pub fn rank_cap(p: u32) -> usize {
    if p == 3 {
        3
    } else {
        2
    }
}

fn check_rank(p: u32, s: usize) -> Result<(), InvariantsError> {
    if s > rank_cap(p) {
        Err(InvariantsError::RankCap { p, s, cap: rank_cap(p) })
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MuiClass {
    L,
    E,
    MTilde(usize),
    R(usize),
    /// The untwisted determinant `M_{s,i}`.
    M(usize),
}

type Key = (u32, usize, u8, usize);

fn cache() -> &'static Mutex<HashMap<Key, BVElement>> {
    static C: OnceLock<Mutex<HashMap<Key, BVElement>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(key: Key, f: impl FnOnce() -> BVElement) -> BVElement {
    if let Some(e) = cache().lock().unwrap().get(&key) {
        return e.clone();
    }
    let e = f();
    cache().lock().unwrap().insert(key, e.clone());
    e
}

/// `f_s(X) = Π_{v ∈ V_s^*} (X - v)` as coefficients of `X^k`.
pub fn dickson_polynomial(p: u32, s: usize) -> Vec<BVElement> {
    let n = (p as usize).pow(s as u32);
    let mut coeffs = vec![BVElement::zero(p, s); n + 1];
    coeffs[0] = BVElement::one(p, s);
    let mut deg = 0;
    for idx in 0..n {
        // the linear form with coordinates given by the base-p digits of idx
        let mut form = BVElement::zero(p, s);
        let mut r = idx;
        for j in 1..=s {
            form = form.add(&BVElement::v(p, s, j).scale((r % p as usize) as u32));
            r /= p as usize;
        }
        let mut next = vec![BVElement::zero(p, s); n + 1];
        for k in 0..=deg {
            next[k + 1] = next[k + 1].add(&coeffs[k]);
            next[k] = next[k].sub(&form.mul(&coeffs[k]));
        }
        deg += 1;
        coeffs = next;
    }
    coeffs
}

/// `Q_{s,i}` read off from `f_s`.
pub fn dickson_by_product(p: u32, s: usize, i: usize) -> BVElement {
    let f = dickson_polynomial(p, s);
    let c = &f[(p as usize).pow(i as u32)];
    if (s - i) % 2 == 1 {
        c.neg()
    } else {
        c.clone()
    }
}

/// `Q_{s,i}` via `Q_{s+1,0} = Q_{1,0} St_1(Q_{s,0})` and
/// `Q_{s+1,i} = Q_{1,0}^{p^i} St_1(Q_{s,i}) + St_1(Q_{s,i-1})`.
pub fn dickson_by_recursion(p: u32, s: usize, i: usize) -> BVElement {
    if i == s {
        return BVElement::one(p, s);
    }
    if s == 1 {
        return BVElement::v(p, 1, 1).pow(p - 1);
    }
    let q1 = BVElement::v(p, s, 1).pow(p - 1);
    let mut r = q1.pow(p.pow(i as u32)).mul(&st1(&dickson_by_recursion(p, s - 1, i)));
    if i > 0 {
        r = r.add(&st1(&dickson_by_recursion(p, s - 1, i - 1)));
    }
    r
}

/// `Q_{s,i}`, with `Q_{s,s} = 1` and `Q_{s,i} = 0` for `i > s`.
pub fn dickson(p: u32, s: usize, i: usize) -> Result<BVElement, InvariantsError> {
    check_rank(p, s)?;
    if i > s {
        return Ok(BVElement::zero(p, s));
    }
    Ok(cached((p, s, 0, i), || if s >= 3 { dickson_by_recursion(p, s, i) } else { dickson_by_product(p, s, i) }))
}

/// Determinant of a square matrix of polynomials whose first row may be odd.
fn determinant(rows: &[Vec<BVElement>]) -> BVElement {
    let n = rows.len();
    let (p, s) = (rows[0][0].prime(), rows[0][0].rank());
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = BVElement::zero(p, s);
    // Heap's algorithm with sign tracking.
    fn rec(k: usize, perm: &mut Vec<usize>, sign: &mut bool, rows: &[Vec<BVElement>], total: &mut BVElement) {
        if k == 1 {
            let mut t = BVElement::one(rows[0][0].prime(), rows[0][0].rank());
            for (r, &c) in perm.iter().enumerate() {
                t = t.mul(&rows[r][c]);
            }
            *total = if *sign { total.sub(&t) } else { total.add(&t) };
            return;
        }
        for i in 0..k {
            rec(k - 1, perm, sign, rows, total);
            if i + 1 < k {
                if k.is_multiple_of(2) {
                    perm.swap(i, k - 1);
                } else {
                    perm.swap(0, k - 1);
                }
                *sign = !*sign;
            }
        }
    }
    let mut sign = false;
    rec(n, &mut perm, &mut sign, rows, &mut total);
    total
}

fn vandermonde_rows(p: u32, s: usize, powers: &[u32]) -> Vec<Vec<BVElement>> {
    powers.iter().map(|&k| (1..=s).map(|j| BVElement::v(p, s, j).pow(p.pow(k))).collect()).collect()
}

/// `L_s`, `𝔢_s`, `M_{s,i}`, `M̃_{s,i}` or `R_{s,i}`.
pub fn mui(p: u32, s: usize, which: MuiClass) -> Result<BVElement, InvariantsError> {
    check_rank(p, s)?;
    let tag = |c: MuiClass| match c {
        MuiClass::L => (1, 0),
        MuiClass::E => (2, 0),
        MuiClass::M(i) => (3, i),
        MuiClass::MTilde(i) => (4, i),
        MuiClass::R(i) => (5, i),
    };
    if let MuiClass::M(i) | MuiClass::MTilde(i) | MuiClass::R(i) = which {
        if i >= s {
            return Ok(BVElement::zero(p, s));
        }
    }
    let (t, i) = tag(which);
    Ok(cached((p, s, t, i), || match which {
        MuiClass::L => {
            if s == 0 {
                return BVElement::one(p, 0);
            }
            let pw: Vec<u32> = (0..s as u32).collect();
            determinant(&vandermonde_rows(p, s, &pw))
        }
        MuiClass::E => mui(p, s, MuiClass::L).unwrap().pow((p - 1) / 2),
        MuiClass::M(i) => {
            let mut rows = vec![(1..=s).map(|j| BVElement::u(p, s, j)).collect::<Vec<_>>()];
            let pw: Vec<u32> = (0..s as u32).filter(|&k| k as usize != i).collect();
            rows.extend(vandermonde_rows(p, s, &pw));
            determinant(&rows)
        }
        MuiClass::MTilde(i) => mui(p, s, MuiClass::M(i)).unwrap().mul(&mui(p, s, MuiClass::L).unwrap().pow((p - 3) / 2)),
        MuiClass::R(i) => mui(p, s, MuiClass::MTilde(i)).unwrap().mul(&mui(p, s, MuiClass::E).unwrap()),
    }))
}

/// `M̃_{s,i}` via the recursions obtained from `St_{s+1}(x) = St_1(St_s(x))`:
/// `M̃_{s+1,0} = M̃_{1,0} St_1(𝔢_s) - Q_{1,0} St_1(M̃_{s,0})` and
/// `M̃_{s+1,i} = -St_1(M̃_{s,i-1}) - Q_{1,0}^{p^i} St_1(M̃_{s,i})` for `i >= 1`.
pub fn mtilde_by_recursion(p: u32, s: usize, i: usize) -> BVElement {
    if i >= s {
        return BVElement::zero(p, s);
    }
    if s == 1 {
        return BVElement::u(p, 1, 1).mul(&BVElement::v(p, 1, 1).pow((p - 3) / 2));
    }
    let v = BVElement::v(p, s, 1);
    let q1 = v.pow(p - 1);
    if i == 0 {
        let m1 = BVElement::u(p, s, 1).mul(&v.pow((p - 3) / 2));
        m1.mul(&st1(&e_by_recursion(p, s - 1))).sub(&q1.mul(&st1(&mtilde_by_recursion(p, s - 1, 0))))
    } else {
        st1(&mtilde_by_recursion(p, s - 1, i - 1))
            .add(&q1.pow(p.pow(i as u32)).mul(&st1(&mtilde_by_recursion(p, s - 1, i))))
            .neg()
    }
}

/// `𝔢_s` via `𝔢_{s+1} = 𝔢_1 St_1(𝔢_s)`.
pub fn e_by_recursion(p: u32, s: usize) -> BVElement {
    if s == 0 {
        return BVElement::one(p, 0);
    }
    let e1 = BVElement::v(p, s, 1).pow((p - 1) / 2);
    if s == 1 {
        return e1;
    }
    e1.mul(&st1(&e_by_recursion(p, s - 1)))
}

/// `L_s` via `L_{s+1} = v St_1(L_s)`.
pub fn l_by_recursion(p: u32, s: usize) -> BVElement {
    if s == 1 {
        return BVElement::v(p, 1, 1);
    }
    BVElement::v(p, s, 1).mul(&st1(&l_by_recursion(p, s - 1)))
}
