//! Linear algebra over the prime field F_p.
//!
//! Matrices are stored sparsely by rows and follow the usual orientation: a
//! map `V -> W` has `dim W` rows and `dim V` columns, and acts on column
//! vectors. Elimination is done on a dense copy with deterministic pivoting
//! (first nonzero entry scanning columns left to right), so kernel and
//! representative bases are reproducible.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::Hash;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FplaError {
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u32, u32),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("not a complex: composite has entry {value} at ({row}, {col})")]
    NotAComplex { row: usize, col: usize, value: u32 },
}

/// Modular inverse of a nonzero residue.
pub fn inv_mod(a: u32, p: u32) -> u32 {
    let a = a % p;
    assert!(a != 0, "inverse of zero mod {p}");
    pow_mod(a, p - 2, p)
}

pub fn pow_mod(mut a: u32, mut e: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = (a % p) as u64;
    let m = p as u64;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    a = r as u32;
    a
}

/// Reduce a signed integer into `0..p`.
pub fn reduce(x: i64, p: u32) -> u32 {
    x.rem_euclid(p as i64) as u32
}

pub fn neg_mod(a: u32, p: u32) -> u32 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

/// Base-p digits, least significant first.
pub fn digits(mut n: u64, p: u32) -> Vec<u32> {
    let mut v = Vec::new();
    while n > 0 {
        v.push((n % p as u64) as u32);
        n /= p as u64;
    }
    v
}

fn small_binomial(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u64 = 1;
    for i in 0..k {
        r = r * (n - i) as u64 / (i + 1) as u64;
    }
    r
}

/// Binomial coefficient `C(n, k)` mod p for `n, k >= 0` via Lucas' theorem.
pub fn binomial_mod(n: u64, k: u64, p: u32) -> u32 {
    if k > n {
        return 0;
    }
    let mut r: u64 = 1;
    let (mut n, mut k) = (n, k);
    while k > 0 || n > 0 {
        let (a, b) = ((n % p as u64) as u32, (k % p as u64) as u32);
        if b > a {
            return 0;
        }
        r = r * (small_binomial(a, b) % p as u64) % p as u64;
        n /= p as u64;
        k /= p as u64;
    }
    r as u32
}

/// Generalized binomial `C(n, k)` mod p for any integer `n` and `k >= 0`.
pub fn binomial_signed(n: i64, k: i64, p: u32) -> u32 {
    if k < 0 {
        return 0;
    }
    if n >= 0 {
        return binomial_mod(n as u64, k as u64, p);
    }
    // C(n, k) = (-1)^k C(k - n - 1, k)
    let c = binomial_mod((k - n - 1) as u64, k as u64, p);
    if k % 2 == 0 {
        c
    } else {
        neg_mod(c, p)
    }
}

/// Multinomial coefficient `(Σ a_i)! / Π a_i!` mod p, via base-p digits.
pub fn multinomial_mod(parts: &[u64], p: u32) -> u32 {
    let mut r: u64 = 1;
    let mut rest: Vec<u64> = parts.to_vec();
    loop {
        let mut sum = 0u32;
        let mut any = false;
        for x in rest.iter_mut() {
            let d = (*x % p as u64) as u32;
            *x /= p as u64;
            if *x > 0 {
                any = true;
            }
            sum += d;
            if sum >= p {
                return 0;
            }
            r = r * small_binomial(sum, d) % p as u64;
        }
        if !any {
            break;
        }
    }
    r as u32
}

/// A sparse vector over F_p, kept sorted by index without zero entries.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct FpVec {
    entries: Vec<(usize, u32)>,
}

impl FpVec {
    pub fn new() -> Self {
        FpVec { entries: Vec::new() }
    }

    pub fn unit(i: usize) -> Self {
        FpVec { entries: vec![(i, 1)] }
    }

    pub fn from_map(map: BTreeMap<usize, u32>) -> Self {
        FpVec {
            entries: map.into_iter().filter(|&(_, c)| c != 0).collect(),
        }
    }

    pub fn from_dense(v: &[u32]) -> Self {
        FpVec {
            entries: v.iter().copied().enumerate().filter(|&(_, c)| c != 0).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.entries.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> u32 {
        match self.entries.binary_search_by_key(&i, |&(j, _)| j) {
            Ok(k) => self.entries[k].1,
            Err(_) => 0,
        }
    }

    pub fn to_dense(&self, n: usize) -> Vec<u32> {
        let mut v = vec![0; n];
        for &(i, c) in &self.entries {
            v[i] = c;
        }
        v
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &FpVec, c: u32, p: u32) {
        if c == 0 || other.is_zero() {
            return;
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.entries, &other.entries);
        while i < a.len() || j < b.len() {
            if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i >= a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0, (b[j].1 as u64 * c as u64 % p as u64) as u32));
                j += 1;
            } else {
                let v = (a[i].1 as u64 + b[j].1 as u64 * c as u64) % p as u64;
                if v != 0 {
                    out.push((a[i].0, v as u32));
                }
                i += 1;
                j += 1;
            }
        }
        self.entries = out;
    }

    pub fn scale(&mut self, c: u32, p: u32) {
        if c.is_multiple_of(p) {
            self.entries.clear();
            return;
        }
        for e in self.entries.iter_mut() {
            e.1 = (e.1 as u64 * c as u64 % p as u64) as u32;
        }
    }
}

/// A sparse matrix over F_p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatFp {
    p: u32,
    nrows: usize,
    ncols: usize,
    rows: Vec<FpVec>,
}

impl SparseMatFp {
    pub fn zero(p: u32, nrows: usize, ncols: usize) -> Self {
        SparseMatFp { p, nrows, ncols, rows: vec![FpVec::new(); nrows] }
    }

    pub fn identity(p: u32, n: usize) -> Self {
        SparseMatFp { p, nrows: n, ncols: n, rows: (0..n).map(FpVec::unit).collect() }
    }

    pub fn from_dense(p: u32, rows: &[Vec<u32>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let rows = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), ncols, "ragged matrix");
                FpVec::from_dense(&r.iter().map(|&c| c % p).collect::<Vec<_>>())
            })
            .collect();
        SparseMatFp { p, nrows, ncols, rows }
    }

    /// Build the matrix whose j-th column is `cols[j]`.
    pub fn from_columns(p: u32, nrows: usize, cols: &[FpVec]) -> Self {
        let mut m = SparseMatFp::zero(p, nrows, cols.len());
        let mut rows: Vec<Vec<(usize, u32)>> = vec![Vec::new(); nrows];
        for (j, c) in cols.iter().enumerate() {
            for (i, v) in c.iter() {
                assert!(i < nrows, "column entry out of range");
                rows[i].push((j, v % p));
            }
        }
        m.rows = rows.into_iter().map(|r| FpVec { entries: r.into_iter().filter(|e| e.1 != 0).collect() }).collect();
        m
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &FpVec {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.rows[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        let mut m: BTreeMap<usize, u32> = self.rows[i].iter().collect();
        m.insert(j, v % self.p);
        self.rows[i] = FpVec::from_map(m);
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_zero())
    }

    /// Nonzero entries as `(row, col, value)` in row-major order.
    pub fn entries(&self) -> Vec<(usize, usize, u32)> {
        let mut out = Vec::new();
        for (i, r) in self.rows.iter().enumerate() {
            for (j, c) in r.iter() {
                out.push((i, j, c));
            }
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<u32>> {
        self.rows.iter().map(|r| r.to_dense(self.ncols)).collect()
    }

    pub fn apply(&self, x: &FpVec) -> FpVec {
        let p = self.p as u64;
        let mut out = BTreeMap::new();
        for (i, r) in self.rows.iter().enumerate() {
            let mut s = 0u64;
            for (j, c) in r.iter() {
                s += c as u64 * x.get(j) as u64;
            }
            let s = (s % p) as u32;
            if s != 0 {
                out.insert(i, s);
            }
        }
        FpVec::from_map(out)
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &SparseMatFp) -> Result<SparseMatFp, FplaError> {
        if self.p != rhs.p {
            return Err(FplaError::PrimeMismatch(self.p, rhs.p));
        }
        if self.ncols != rhs.nrows {
            return Err(FplaError::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.nrows, self.ncols, rhs.nrows, rhs.ncols
            )));
        }
        let mut out = SparseMatFp::zero(self.p, self.nrows, rhs.ncols);
        for (i, r) in self.rows.iter().enumerate() {
            let mut acc = FpVec::new();
            for (k, c) in r.iter() {
                acc.add_scaled(&rhs.rows[k], c, self.p);
            }
            out.rows[i] = acc;
        }
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        row_reduce(self).rank
    }
}

/// Result of Gaussian elimination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowReduction {
    pub rank: usize,
    /// Basis of `{x : m x = 0}`, one vector per free column.
    pub kernel_basis: Vec<FpVec>,
    /// Nonzero rows of the reduced row echelon form (a basis of the row space).
    pub image_basis: Vec<FpVec>,
    /// Pivot column of each reduced row.
    pub pivots: Vec<usize>,
}

/// Reduced row echelon form of a dense matrix in place; returns pivot columns.
pub fn rref_dense(a: &mut [Vec<u32>], ncols: usize, p: u32) -> Vec<usize> {
    let pm = p as u64;
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r >= a.len() {
            break;
        }
        let Some(k) = (r..a.len()).find(|&k| a[k][c] != 0) else { continue };
        a.swap(r, k);
        let inv = inv_mod(a[r][c], p) as u64;
        for x in a[r].iter_mut() {
            *x = (*x as u64 * inv % pm) as u32;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let f = (pm - row[c] as u64) % pm;
            for (x, &y) in row.iter_mut().zip(pivot_row.iter()).skip(c) {
                if y != 0 {
                    *x = ((*x as u64 + f * y as u64) % pm) as u32;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Row-reduce `m`, returning rank, kernel basis and a row-space basis.
pub fn row_reduce(m: &SparseMatFp) -> RowReduction {
    let p = m.p;
    let mut a = m.to_dense();
    let pivots = rref_dense(&mut a, m.ncols, p);
    let rank = pivots.len();
    let image_basis: Vec<FpVec> = a[..rank].iter().map(|r| FpVec::from_dense(r)).collect();
    let mut is_pivot = vec![false; m.ncols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut kernel_basis = Vec::new();
    for f in (0..m.ncols).filter(|&c| !is_pivot[c]) {
        let mut v = BTreeMap::new();
        v.insert(f, 1u32);
        for (i, &c) in pivots.iter().enumerate() {
            let x = a[i][f];
            if x != 0 {
                v.insert(c, neg_mod(x, p));
            }
        }
        kernel_basis.push(FpVec::from_map(v));
    }
    RowReduction { rank, kernel_basis, image_basis, pivots }
}

/// Homology at the middle of `U --d_in--> V --d_out--> W`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homology {
    pub dim: usize,
    pub kernel_dim: usize,
    pub image_rank: usize,
    pub representatives: Vec<FpVec>,
}

/// Check that `d_out * d_in = 0`, returning a witness entry otherwise.
pub fn check_complex(d_in: &SparseMatFp, d_out: &SparseMatFp) -> Result<(), FplaError> {
    let prod = d_out.mul(d_in)?;
    if let Some((row, col, value)) = prod.entries().into_iter().next() {
        return Err(FplaError::NotAComplex { row, col, value });
    }
    Ok(())
}

pub fn homology_at(d_in: &SparseMatFp, d_out: &SparseMatFp) -> Result<Homology, FplaError> {
    check_complex(d_in, d_out)?;
    let p = d_in.p;
    let n = d_out.ncols;
    let ker = row_reduce(d_out).kernel_basis;
    // Reduce kernel vectors against the image, keeping those that stay independent.
    let image_cols: Vec<FpVec> = (0..d_in.ncols)
        .map(|j| {
            let mut m = BTreeMap::new();
            for i in 0..d_in.nrows {
                let c = d_in.get(i, j);
                if c != 0 {
                    m.insert(i, c);
                }
            }
            FpVec::from_map(m)
        })
        .collect();
    let mut basis = EchelonBasis::new(p, n);
    let mut image_rank = 0;
    for c in &image_cols {
        if basis.insert(c) {
            image_rank += 1;
        }
    }
    let mut representatives = Vec::new();
    for k in &ker {
        if basis.insert(k) {
            representatives.push(k.clone());
        }
    }
    Ok(Homology { dim: ker.len() - image_rank, kernel_dim: ker.len(), image_rank, representatives })
}

/// An incrementally built echelon basis of a subspace of F_p^n.
#[derive(Debug, Clone)]
pub struct EchelonBasis {
    p: u32,
    n: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl EchelonBasis {
    pub fn new(p: u32, n: usize) -> Self {
        EchelonBasis { p, n, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` against the basis, returning the residual as a dense vector.
    pub fn reduce(&self, v: &FpVec) -> Vec<u32> {
        let pm = self.p as u64;
        let mut x = v.to_dense(self.n);
        for (row, &c) in self.rows.iter().zip(self.pivots.iter()) {
            if x[c] != 0 {
                let f = pm - x[c] as u64;
                for (a, &b) in x.iter_mut().zip(row.iter()) {
                    if b != 0 {
                        *a = ((*a as u64 + f * b as u64) % pm) as u32;
                    }
                }
            }
        }
        x
    }

    pub fn contains(&self, v: &FpVec) -> bool {
        self.reduce(v).iter().all(|&c| c == 0)
    }

    /// Insert `v`; returns whether the dimension grew.
    pub fn insert(&mut self, v: &FpVec) -> bool {
        let mut x = self.reduce(v);
        let Some(c) = x.iter().position(|&a| a != 0) else { return false };
        let inv = inv_mod(x[c], self.p) as u64;
        for a in x.iter_mut() {
            *a = (*a as u64 * inv % self.p as u64) as u32;
        }
        self.rows.push(x);
        self.pivots.push(c);
        true
    }
}

/// Solve `m x = b` for one particular `x`, if a solution exists.
pub fn solve(m: &SparseMatFp, b: &FpVec) -> Option<FpVec> {
    let p = m.p;
    let mut a: Vec<Vec<u32>> = m
        .to_dense()
        .into_iter()
        .enumerate()
        .map(|(i, mut r)| {
            r.push(b.get(i));
            r
        })
        .collect();
    let pivots = rref_dense(&mut a, m.ncols + 1, p);
    if pivots.last() == Some(&m.ncols) {
        return None;
    }
    let mut x = BTreeMap::new();
    for (i, &c) in pivots.iter().enumerate() {
        let v = a[i][m.ncols];
        if v != 0 {
            x.insert(c, v);
        }
    }
    Some(FpVec::from_map(x))
}

/// A degree-indexed basis of labels with reverse lookup.
#[derive(Debug, Clone)]
pub struct GradedBasis<L: Clone + Eq + Hash> {
    by_degree: BTreeMap<i32, Vec<L>>,
    index: HashMap<L, (i32, usize)>,
}

impl<L: Clone + Eq + Hash> Default for GradedBasis<L> {
    fn default() -> Self {
        GradedBasis { by_degree: BTreeMap::new(), index: HashMap::new() }
    }
}

impl<L: Clone + Eq + Hash> GradedBasis<L> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Append a label in the given degree; returns its index within the degree.
    pub fn push(&mut self, degree: i32, label: L) -> usize {
        if let Some(&(d, i)) = self.index.get(&label) {
            assert_eq!(d, degree, "label pushed in two degrees");
            return i;
        }
        let v = self.by_degree.entry(degree).or_default();
        v.push(label.clone());
        let i = v.len() - 1;
        self.index.insert(label, (degree, i));
        i
    }

    pub fn in_degree(&self, degree: i32) -> &[L] {
        self.by_degree.get(&degree).map_or(&[], |v| v.as_slice())
    }

    pub fn dim(&self, degree: i32) -> usize {
        self.in_degree(degree).len()
    }

    pub fn lookup(&self, label: &L) -> Option<(i32, usize)> {
        self.index.get(label).copied()
    }

    pub fn degrees(&self) -> impl Iterator<Item = i32> + '_ {
        self.by_degree.keys().copied()
    }

    pub fn total_dim(&self) -> usize {
        self.index.len()
    }
}

/// Lines of the matrix dump format `deg s row col value`, sorted.
pub fn dump_matrix(deg: i32, s: usize, m: &SparseMatFp) -> Vec<String> {
    let mut e: Vec<(usize, usize, u32)> = m.entries();
    e.sort();
    e.into_iter().map(|(r, c, v)| format!("{deg} {s} {r} {c} {v}")).collect()
}

impl fmt::Display for SparseMatFp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in self.to_dense() {
            let s: Vec<String> = r.iter().map(|c| c.to_string()).collect();
            writeln!(f, "[{}]", s.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_matrix() {
        let m = SparseMatFp::zero(3, 3, 3);
        let r = row_reduce(&m);
        assert_eq!(r.rank, 0);
        assert_eq!(r.kernel_basis.len(), 3);
    }

    #[test]
    fn identity_matrix() {
        let r = row_reduce(&SparseMatFp::identity(5, 4));
        assert_eq!((r.rank, r.kernel_basis.len()), (4, 0));
    }

    #[test]
    fn rank_one() {
        let m = SparseMatFp::from_dense(3, &[vec![1, 2], vec![2, 4]]);
        let r = row_reduce(&m);
        assert_eq!((r.rank, r.kernel_basis.len()), (1, 1));
        assert!(m.apply(&r.kernel_basis[0]).is_zero());
    }

    #[test]
    fn homology_examples() {
        let z = SparseMatFp::zero(3, 2, 2);
        assert_eq!(homology_at(&z, &z).unwrap().dim, 2);
        let id = SparseMatFp::identity(3, 2);
        assert_eq!(homology_at(&id, &z).unwrap().dim, 0);
        let z1 = SparseMatFp::zero(3, 1, 1);
        assert_eq!(homology_at(&z1, &z1).unwrap().dim, 1);
    }

    #[test]
    fn not_a_complex() {
        let id = SparseMatFp::identity(3, 2);
        assert!(matches!(homology_at(&id, &id), Err(FplaError::NotAComplex { .. })));
    }

    #[test]
    fn prime_mismatch() {
        let a = SparseMatFp::zero(3, 1, 1);
        let b = SparseMatFp::zero(5, 1, 1);
        assert_eq!(homology_at(&a, &b), Err(FplaError::PrimeMismatch(5, 3)));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial_mod(5, 2, 3), 1);
        assert_eq!(binomial_mod(3, 1, 3), 0);
        assert_eq!(binomial_signed(-1, 4, 5), 1);
        assert_eq!(binomial_signed(-1, 3, 5), 4);
        assert_eq!(binomial_signed(-2, 2, 7), 3);
        assert_eq!(multinomial_mod(&[1, 1], 3), 2);
        assert_eq!(multinomial_mod(&[1, 2], 3), 0);
        assert_eq!(multinomial_mod(&[3, 1], 5), 4);
    }

    #[test]
    fn solve_finds_preimage() {
        let m = SparseMatFp::from_dense(5, &[vec![1, 2, 0], vec![0, 1, 1]]);
        let b = FpVec::from_dense(&[3, 4]);
        let x = solve(&m, &b).unwrap();
        assert_eq!(m.apply(&x), b);
        let m2 = SparseMatFp::from_dense(5, &[vec![1], vec![2]]);
        assert!(solve(&m2, &FpVec::from_dense(&[1, 1])).is_none());
    }

    #[test]
    fn dump_is_sorted() {
        let m = SparseMatFp::from_dense(3, &[vec![0, 2], vec![1, 0]]);
        assert_eq!(dump_matrix(4, 1, &m), vec!["4 1 0 1 2", "4 1 1 0 1"]);
    }
}
