//! The Steenrod algebra degreewise: both bases and the change of basis.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use super::admissible::{admissible_basis, AdmissibleElement, AdmissibleWord, Letter};
use super::milnor::{add_term, milnor_basis, milnor_product, MilnorBasis, MilnorElement};
use super::SteenrodError;
use crate::fpla::{rref_dense, FpVec, SparseMatFp};

/// Bases and change-of-basis data for degrees `0..=max_degree`.
#[derive(Debug)]
pub struct SteenrodAlgebra {
    p: u32,
    max_degree: i32,
    milnor: Vec<Vec<MilnorBasis>>,
    milnor_index: HashMap<MilnorBasis, usize>,
    admissible: Vec<Vec<AdmissibleWord>>,
    adm_index: HashMap<AdmissibleWord, usize>,
    adm_to_milnor: Vec<Vec<FpVec>>,
    milnor_to_adm: Vec<Vec<FpVec>>,
    products: Mutex<HashMap<(MilnorBasis, MilnorBasis), MilnorElement>>,
}

fn registry() -> &'static Mutex<HashMap<u32, Arc<SteenrodAlgebra>>> {
    static REG: OnceLock<Mutex<HashMap<u32, Arc<SteenrodAlgebra>>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

impl SteenrodAlgebra {
    pub fn new(p: u32, max_degree: i32) -> Result<Self, SteenrodError> {
        let max_degree = max_degree.max(0);
        let mut milnor = Vec::new();
        let mut milnor_index = HashMap::new();
        let mut admissible = Vec::new();
        let mut adm_index = HashMap::new();
        let mut adm_to_milnor = Vec::new();
        let mut milnor_to_adm = Vec::new();
        let products = Mutex::new(HashMap::new());
        for d in 0..=max_degree {
            let mb = milnor_basis(p, d);
            for (i, m) in mb.iter().enumerate() {
                milnor_index.insert(m.clone(), i);
            }
            let ab = admissible_basis(p, d);
            for (i, a) in ab.iter().enumerate() {
                adm_index.insert(a.clone(), i);
            }
            if mb.len() != ab.len() {
                return Err(SteenrodError::BasisMismatch(d));
            }
            let mut cols = Vec::with_capacity(ab.len());
            for a in &ab {
                let e = letters_to_milnor(&a.letters(), p);
                let mut v = BTreeMap::new();
                for (m, c) in e {
                    v.insert(milnor_index[&m], c);
                }
                cols.push(FpVec::from_map(v));
            }
            let inv = invert_columns(&cols, p).ok_or(SteenrodError::BasisMismatch(d))?;
            milnor.push(mb);
            admissible.push(ab);
            adm_to_milnor.push(cols);
            milnor_to_adm.push(inv);
        }
        Ok(SteenrodAlgebra { p, max_degree, milnor, milnor_index, admissible, adm_index, adm_to_milnor, milnor_to_adm, products })
    }

    /// A shared instance covering at least `max_degree`.
    pub fn shared(p: u32, max_degree: i32) -> Arc<SteenrodAlgebra> {
        let mut reg = registry().lock().unwrap();
        if let Some(a) = reg.get(&p) {
            if a.max_degree >= max_degree {
                return Arc::clone(a);
            }
        }
        let target = max_degree.max(reg.get(&p).map_or(0, |a| a.max_degree));
        let a = Arc::new(SteenrodAlgebra::new(p, target).expect("change of basis is invertible"));
        reg.insert(p, Arc::clone(&a));
        a
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn max_degree(&self) -> i32 {
        self.max_degree
    }

    fn check(&self, d: i32) -> Result<usize, SteenrodError> {
        if d < 0 || d > self.max_degree {
            Err(SteenrodError::DegreeOutOfRange(d))
        } else {
            Ok(d as usize)
        }
    }

    pub fn milnor_basis(&self, d: i32) -> &[MilnorBasis] {
        if d < 0 || d > self.max_degree {
            return &[];
        }
        &self.milnor[d as usize]
    }

    pub fn admissible_basis(&self, d: i32) -> &[AdmissibleWord] {
        if d < 0 || d > self.max_degree {
            return &[];
        }
        &self.admissible[d as usize]
    }

    pub fn dim(&self, d: i32) -> usize {
        self.milnor_basis(d).len()
    }

    pub fn milnor_index(&self, m: &MilnorBasis) -> usize {
        self.milnor_index[m]
    }

    pub fn admissible_index(&self, a: &AdmissibleWord) -> usize {
        self.adm_index[a]
    }

    /// Columns are the Milnor coordinates of the admissible words in degree `d`.
    pub fn change_of_basis(&self, d: i32) -> Result<SparseMatFp, SteenrodError> {
        let i = self.check(d)?;
        Ok(SparseMatFp::from_columns(self.p, self.milnor[i].len(), &self.adm_to_milnor[i]))
    }

    pub fn admissible_to_milnor(&self, a: &AdmissibleWord) -> MilnorElement {
        let d = a.degree(self.p);
        let i = self.check(d).expect("degree in range");
        let col = &self.adm_to_milnor[i][self.adm_index[a]];
        col.iter().map(|(k, c)| (self.milnor[i][k].clone(), c)).collect()
    }

    pub fn milnor_to_admissible(&self, m: &MilnorBasis) -> AdmissibleElement {
        let d = m.degree(self.p);
        let i = self.check(d).expect("degree in range");
        let col = &self.milnor_to_adm[i][self.milnor_index[m]];
        col.iter().map(|(k, c)| (self.admissible[i][k].clone(), c)).collect()
    }

    /// Cached product of two Milnor basis elements.
    pub fn multiply(&self, a: &MilnorBasis, b: &MilnorBasis) -> MilnorElement {
        let key = (a.clone(), b.clone());
        if let Some(r) = self.products.lock().unwrap().get(&key) {
            return r.clone();
        }
        let r = milnor_product(a, b, self.p);
        self.products.lock().unwrap().insert(key, r.clone());
        r
    }

    pub fn multiply_elements(&self, a: &MilnorElement, b: &MilnorElement) -> MilnorElement {
        let p = self.p;
        let mut out = BTreeMap::new();
        for (x, &c) in a {
            for (y, &d) in b {
                for (z, e) in self.multiply(x, y) {
                    add_term(&mut out, z, ((c as u64 * d as u64 % p as u64) * e as u64 % p as u64) as u32, p);
                }
            }
        }
        out
    }
}

/// Multiply out a word in `β = Q_0` and `P^i = P(i)`.
pub fn letters_to_milnor(w: &[Letter], p: u32) -> MilnorElement {
    let mut acc: MilnorElement = BTreeMap::from([(MilnorBasis::unit(), 1)]);
    for &l in w {
        let m = match l {
            Letter::Beta => MilnorBasis::q(0),
            Letter::P(i) => MilnorBasis::p(vec![i]),
        };
        let mut next = BTreeMap::new();
        for (x, &c) in &acc {
            for (z, e) in milnor_product(x, &m, p) {
                add_term(&mut next, z, (c as u64 * e as u64 % p as u64) as u32, p);
            }
        }
        acc = next;
    }
    acc
}

/// Inverse of the square matrix given by columns, returned by columns.
fn invert_columns(cols: &[FpVec], p: u32) -> Option<Vec<FpVec>> {
    let n = cols.len();
    // Rows of [A | I] where A has the given columns.
    let mut a: Vec<Vec<u32>> = (0..n)
        .map(|i| {
            let mut r: Vec<u32> = cols.iter().map(|c| c.get(i)).collect();
            r.extend((0..n).map(|j| u32::from(i == j)));
            r
        })
        .collect();
    let piv = rref_dense(&mut a, n, p);
    if piv.len() != n || piv.iter().enumerate().any(|(i, &c)| i != c) {
        return None;
    }
    Some((0..n).map(|j| FpVec::from_dense(&(0..n).map(|i| a[i][n + j]).collect::<Vec<_>>())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn change_of_basis_small() {
        let a = SteenrodAlgebra::new(3, 12).unwrap();
        assert_eq!(a.change_of_basis(0).unwrap(), SparseMatFp::identity(3, 1));
        assert_eq!(a.change_of_basis(1).unwrap(), SparseMatFp::identity(3, 1));
        assert_eq!(a.change_of_basis(4).unwrap(), SparseMatFp::identity(3, 1));
    }

    #[test]
    fn dims_agree() {
        for p in [3, 5] {
            let a = SteenrodAlgebra::new(p, 60).unwrap();
            for d in 0..=60 {
                assert_eq!(a.milnor_basis(d).len(), a.admissible_basis(d).len());
            }
        }
    }
}
