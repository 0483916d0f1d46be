//! Exact linear algebra.
//!
//! Two families live here: dense incremental echelon forms over any [`Field`]
//! (used for the small multigraded slices of Stanley-Reisner modules), and
//! sparse integer matrices whose rank is computed either modulo a prime or
//! over the rationals by fraction-free elimination (used for boundary maps).

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::field::{Field, FieldSpec, PrimeField};

/// An incrementally built row echelon basis of a subspace of `F^n`.
///
/// Every stored row has its pivot (first nonzero entry) normalized to one and
/// is zero at the pivots of all rows inserted before it. When tracking is on,
/// each row also records which combination of the inserted vectors produced it,
/// which turns linear dependencies into kernel vectors.
#[derive(Clone, Debug)]
pub struct Echelon<F: Field> {
    field: F,
    n: usize,
    rows: Vec<(usize, Vec<F::Elem>)>,
    combos: Option<(usize, Vec<Vec<F::Elem>>)>,
}

impl<F: Field> Echelon<F> {
    pub fn new(field: F, n: usize) -> Self {
        Echelon { field, n, rows: Vec::new(), combos: None }
    }

    /// Tracks combinations of up to `m` inserted vectors, see [`Echelon::insert_tracked`].
    pub fn tracking(field: F, n: usize, m: usize) -> Self {
        Echelon { field, n, rows: Vec::new(), combos: Some((m, Vec::new())) }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.n
    }

    /// Reduces `v` in place against the basis.
    pub fn reduce(&self, v: &mut [F::Elem]) {
        let f = &self.field;
        for (piv, row) in &self.rows {
            if !f.is_zero(&v[*piv]) {
                let c = v[*piv].clone();
                for j in *piv..self.n {
                    if !f.is_zero(&row[j]) {
                        v[j] = f.sub_mul(&v[j], &c, &row[j]);
                    }
                }
            }
        }
    }

    pub fn contains(&self, v: &[F::Elem]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|x| self.field.is_zero(x))
    }

    /// Adds `v` to the spanning set; returns whether the dimension grew.
    pub fn insert(&mut self, mut v: Vec<F::Elem>) -> bool {
        debug_assert_eq!(v.len(), self.n);
        self.reduce(&mut v);
        self.push_reduced(v, None).is_none()
    }

    /// Inserts the `index`-th tracked vector. Returns a kernel vector (the
    /// coefficients of a vanishing combination of tracked inputs) when `v`
    /// was already in the span.
    pub fn insert_tracked(&mut self, index: usize, mut v: Vec<F::Elem>) -> Option<Vec<F::Elem>> {
        let f = self.field.clone();
        let m = self.combos.as_ref().expect("tracking not enabled").0;
        let mut combo = vec![f.zero(); m];
        combo[index] = f.one();
        let combos = &self.combos.as_ref().unwrap().1;
        for (r, (piv, row)) in self.rows.iter().enumerate() {
            if !f.is_zero(&v[*piv]) {
                let c = v[*piv].clone();
                for j in *piv..self.n {
                    if !f.is_zero(&row[j]) {
                        v[j] = f.sub_mul(&v[j], &c, &row[j]);
                    }
                }
                for (j, x) in combos[r].iter().enumerate() {
                    if !f.is_zero(x) {
                        combo[j] = f.sub_mul(&combo[j], &c, x);
                    }
                }
            }
        }
        self.push_reduced(v, Some(combo))
    }

    fn push_reduced(&mut self, mut v: Vec<F::Elem>, combo: Option<Vec<F::Elem>>) -> Option<Vec<F::Elem>> {
        let f = &self.field;
        let Some(piv) = v.iter().position(|x| !f.is_zero(x)) else {
            return combo;
        };
        let inv = f.inv(&v[piv]);
        for x in v.iter_mut().skip(piv) {
            if !f.is_zero(x) {
                *x = f.mul(x, &inv);
            }
        }
        if let Some((_, combos)) = self.combos.as_mut() {
            let mut combo = combo.expect("tracked echelon needs combinations");
            for x in combo.iter_mut() {
                if !f.is_zero(x) {
                    *x = f.mul(x, &inv);
                }
            }
            combos.push(combo);
        }
        self.rows.push((piv, v));
        None
    }
}

/// Rank of a dense matrix given by rows.
pub fn dense_rank<F: Field>(field: &F, rows: &[Vec<F::Elem>]) -> usize {
    let Some(first) = rows.first() else { return 0 };
    let mut e = Echelon::new(field.clone(), first.len());
    for r in rows {
        e.insert(r.clone());
        if e.is_full() {
            break;
        }
    }
    e.dim()
}

/// A basis of the kernel of the linear map `x ↦ Σ x_j · columns[j]`.
pub fn kernel<F: Field>(field: &F, n: usize, columns: &[Vec<F::Elem>]) -> Vec<Vec<F::Elem>> {
    let mut e = Echelon::tracking(field.clone(), n, columns.len());
    columns
        .iter()
        .enumerate()
        .filter_map(|(j, c)| e.insert_tracked(j, c.clone()))
        .collect()
}

/// A sparse integer matrix, stored row-major as `(column, value)` lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<(usize, i64)>>,
}

/// Matrices with at most this many cells are eliminated densely mod p.
/// Over Q the sparse fraction-free path is always faster: dense Bareiss
/// carries big determinants through every cell.
const DENSE_CELL_LIMIT: usize = 512 * 512;

impl ExactMatrix {
    pub fn new(rows: usize, cols: usize, mut entries: Vec<Vec<(usize, i64)>>) -> Self {
        assert_eq!(entries.len(), rows);
        for r in entries.iter_mut() {
            r.sort_unstable_by_key(|e| e.0);
            r.retain(|e| e.1 != 0);
            debug_assert!(r.iter().all(|e| e.0 < cols));
        }
        ExactMatrix { rows, cols, entries }
    }

    /// Builds a matrix from its columns.
    pub fn from_columns(rows: usize, columns: Vec<Vec<(usize, i64)>>) -> Self {
        let cols = columns.len();
        let mut entries = vec![Vec::new(); rows];
        for (j, col) in columns.into_iter().enumerate() {
            for (i, v) in col {
                entries[i].push((j, v));
            }
        }
        ExactMatrix::new(rows, cols, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[(usize, i64)] {
        &self.entries[i]
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i]
            .binary_search_by_key(&j, |e| e.0)
            .map(|k| self.entries[i][k].1)
            .unwrap_or(0)
    }

    pub fn nnz(&self) -> usize {
        self.entries.iter().map(Vec::len).sum()
    }

    pub fn transpose(&self) -> ExactMatrix {
        let mut t = vec![Vec::new(); self.cols];
        for (i, row) in self.entries.iter().enumerate() {
            for &(j, v) in row {
                t[j].push((i, v));
            }
        }
        ExactMatrix { rows: self.cols, cols: self.rows, entries: t }
    }

    /// Matrix product, used to check `∂∘∂ = 0`.
    pub fn mul(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, other.rows);
        let entries = self
            .entries
            .iter()
            .map(|row| {
                let mut acc: HashMap<usize, i64> = HashMap::new();
                for &(k, a) in row {
                    for &(j, b) in &other.entries[k] {
                        *acc.entry(j).or_insert(0) += a * b;
                    }
                }
                acc.into_iter().collect()
            })
            .collect();
        ExactMatrix::new(self.rows, other.cols, entries)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Vec::is_empty)
    }

    /// Exact rank over `field`.
    pub fn rank(&self, field: FieldSpec) -> usize {
        if matches!(field, FieldSpec::Prime(_)) && self.rows.saturating_mul(self.cols) <= DENSE_CELL_LIMIT {
            self.rank_dense(field)
        } else {
            self.rank_sparse(field)
        }
    }

    /// Rank by sparse leading-term elimination.
    pub fn rank_sparse(&self, field: FieldSpec) -> usize {
        match field {
            FieldSpec::Prime(p) => sparse_rank_mod_p(&self.entries, p as u64),
            FieldSpec::Rationals => fraction_free_rank::<i64>(&self.entries)
                .unwrap_or_else(|| fraction_free_rank::<BigInt>(&self.entries).expect("big integers never overflow")),
        }
    }

    /// Rank by dense elimination (Gauss mod p, Bareiss over the integers).
    pub fn rank_dense(&self, field: FieldSpec) -> usize {
        match field {
            FieldSpec::Prime(p) => {
                let f = PrimeField::new(p);
                let rows: Vec<Vec<u64>> = self
                    .entries
                    .iter()
                    .map(|r| {
                        let mut d = vec![0u64; self.cols];
                        for &(j, v) in r {
                            d[j] = f.from_i64(v);
                        }
                        d
                    })
                    .collect();
                dense_rank(&f, &rows)
            }
            FieldSpec::Rationals => {
                let rows: Vec<Vec<BigInt>> = self
                    .entries
                    .iter()
                    .map(|r| {
                        let mut d = vec![BigInt::zero(); self.cols];
                        for &(j, v) in r {
                            d[j] = BigInt::from(v);
                        }
                        d
                    })
                    .collect();
                bareiss_rank(rows)
            }
        }
    }
}

fn sparse_rank_mod_p(rows: &[Vec<(usize, i64)>], p: u64) -> usize {
    let f = PrimeField::new(p as u32);
    let mut pivots: HashMap<usize, Vec<(usize, u64)>> = HashMap::new();
    for row in rows {
        let mut r: Vec<(usize, u64)> = row
            .iter()
            .map(|&(j, v)| (j, f.from_i64(v)))
            .filter(|e| e.1 != 0)
            .collect();
        while let Some(&(lead, lv)) = r.first() {
            match pivots.get(&lead) {
                Some(piv) => r = axpy_mod(&f, &r, lv, piv),
                None => {
                    let inv = f.inv(&lv);
                    for e in r.iter_mut() {
                        e.1 = f.mul(&e.1, &inv);
                    }
                    pivots.insert(lead, r);
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// `r - c * piv` for sparse rows mod p.
fn axpy_mod(f: &PrimeField, r: &[(usize, u64)], c: u64, piv: &[(usize, u64)]) -> Vec<(usize, u64)> {
    let mut out = Vec::with_capacity(r.len() + piv.len());
    let (mut i, mut j) = (0, 0);
    while i < r.len() || j < piv.len() {
        let take_r = j >= piv.len() || (i < r.len() && r[i].0 < piv[j].0);
        let take_p = i >= r.len() || (j < piv.len() && piv[j].0 < r[i].0);
        if take_r {
            out.push(r[i]);
            i += 1;
        } else if take_p {
            out.push((piv[j].0, f.neg(&f.mul(&c, &piv[j].1))));
            j += 1;
        } else {
            let v = f.sub_mul(&r[i].1, &c, &piv[j].1);
            if v != 0 {
                out.push((r[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Integer arithmetic for fraction-free elimination; `None` signals overflow.
trait ExactInt: Clone + PartialEq + Sized {
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn gcd(&self, o: &Self) -> Self;
    fn div_exact(&self, o: &Self) -> Self;
    fn is_one(&self) -> bool;
    fn normalize_sign(row: &mut [(usize, Self)]);
}

impl ExactInt for i64 {
    fn from_i64(v: i64) -> Self {
        v
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
    fn is_one(&self) -> bool {
        *self == 1
    }
    fn normalize_sign(row: &mut [(usize, Self)]) {
        if row.first().is_some_and(|e| e.1 < 0) {
            for e in row.iter_mut() {
                e.1 = -e.1;
            }
        }
    }
}

impl ExactInt for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
    fn is_one(&self) -> bool {
        num_traits::One::is_one(self)
    }
    fn normalize_sign(row: &mut [(usize, Self)]) {
        if row.first().is_some_and(|e| e.1.is_negative()) {
            for e in row.iter_mut() {
                e.1 = -e.1.clone();
            }
        }
    }
}

/// Rank over Q by fraction-free sparse elimination: `r ← a·r − b·pivot`,
/// followed by division by the row content so entries stay small.
fn fraction_free_rank<T: ExactInt>(rows: &[Vec<(usize, i64)>]) -> Option<usize> {
    let mut pivots: HashMap<usize, Vec<(usize, T)>> = HashMap::new();
    for row in rows {
        let mut r: Vec<(usize, T)> = row.iter().map(|&(j, v)| (j, T::from_i64(v))).collect();
        while let Some((lead, lv)) = r.first().cloned() {
            match pivots.get(&lead) {
                Some(piv) => {
                    let pv = piv[0].1.clone();
                    r = ff_combine(&r, &pv, &lv, piv)?;
                    primitive(&mut r);
                }
                None => {
                    primitive(&mut r);
                    T::normalize_sign(&mut r);
                    pivots.insert(lead, r);
                    break;
                }
            }
        }
    }
    Some(pivots.len())
}

/// `a·r − b·p` on sparse rows.
fn ff_combine<T: ExactInt>(r: &[(usize, T)], a: &T, b: &T, p: &[(usize, T)]) -> Option<Vec<(usize, T)>> {
    let mut out = Vec::with_capacity(r.len() + p.len());
    let (mut i, mut j) = (0, 0);
    let zero = T::from_i64(0);
    while i < r.len() || j < p.len() {
        let take_r = j >= p.len() || (i < r.len() && r[i].0 < p[j].0);
        let take_p = i >= r.len() || (j < p.len() && p[j].0 < r[i].0);
        let (col, v) = if take_r {
            let v = a.mul(&r[i].1)?;
            i += 1;
            (r[i - 1].0, v)
        } else if take_p {
            let v = zero.sub(&b.mul(&p[j].1)?)?;
            j += 1;
            (p[j - 1].0, v)
        } else {
            let v = a.mul(&r[i].1)?.sub(&b.mul(&p[j].1)?)?;
            i += 1;
            j += 1;
            (r[i - 1].0, v)
        };
        if !v.is_zero() {
            out.push((col, v));
        }
    }
    Some(out)
}

fn primitive<T: ExactInt>(r: &mut [(usize, T)]) {
    let Some(first) = r.first() else { return };
    let mut g = first.1.clone();
    for e in r.iter().skip(1) {
        if g.is_one() {
            return;
        }
        g = g.gcd(&e.1);
    }
    let g = g.gcd(&g); // gcd(g, g) = |g|
    if !g.is_one() && !g.is_zero() {
        for e in r.iter_mut() {
            e.1 = e.1.div_exact(&g);
        }
    }
}

/// Bareiss fraction-free elimination on a dense integer matrix.
fn bareiss_rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = BigInt::from(1);
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| !Zero::is_zero(&m[i][c])) else { continue };
        m.swap(rank, p);
        for i in rank + 1..rows {
            for j in c + 1..cols {
                let v = (&m[rank][c] * &m[i][j] - &m[i][c] * &m[rank][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[rank][c].clone();
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;
    use proptest::prelude::*;

    #[test]
    fn echelon_kernel() {
        let f = PrimeField::new(7);
        // columns (1,0), (0,1), (1,1): kernel spanned by (1,1,-1)
        let cols = vec![vec![1, 0], vec![0, 1], vec![1, 1]];
        let k = kernel(&f, 2, &cols);
        assert_eq!(k.len(), 1);
        let v = &k[0];
        for i in 0..2 {
            let s = (0..3).fold(0u64, |acc, j| f.add(&acc, &f.mul(&v[j], &cols[j][i])));
            assert_eq!(s, 0);
        }
    }

    #[test]
    fn cycle_rank() {
        // boundary of the 3-cycle: rank 2
        let m = ExactMatrix::from_columns(3, vec![vec![(0, -1), (1, 1)], vec![(1, -1), (2, 1)], vec![(0, -1), (2, 1)]]);
        for field in [FieldSpec::Q, FieldSpec::F2, FieldSpec::F3] {
            assert_eq!(m.rank(field), 2);
            assert_eq!(m.rank_sparse(field), 2);
        }
    }

    #[test]
    fn torsion_shows_up_mod_p() {
        // [[2]] has rank 1 over Q and F3 but 0 over F2
        let m = ExactMatrix::new(1, 1, vec![vec![(0, 2)]]);
        assert_eq!(m.rank(FieldSpec::Q), 1);
        assert_eq!(m.rank(FieldSpec::F2), 0);
        assert_eq!(m.rank_sparse(FieldSpec::F2), 0);
        assert_eq!(m.rank(FieldSpec::F3), 1);
    }

    fn small_matrix() -> impl Strategy<Value = ExactMatrix> {
        (1usize..8, 1usize..8).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(-3i64..=3, c), r).prop_map(move |rows| {
                let entries = rows
                    .into_iter()
                    .map(|row| row.into_iter().enumerate().filter(|e| e.1 != 0).collect())
                    .collect();
                ExactMatrix::new(r, c, entries)
            })
        })
    }

    proptest! {
        #[test]
        fn sparse_and_dense_ranks_agree(m in small_matrix()) {
            for field in [FieldSpec::Q, FieldSpec::F2, FieldSpec::F3, FieldSpec::F32003] {
                prop_assert_eq!(m.rank_sparse(field), m.rank_dense(field));
                prop_assert_eq!(m.rank_sparse(field), m.transpose().rank_sparse(field));
            }
            // generic-field route over Q
            let rows: Vec<Vec<_>> = (0..m.rows()).map(|i| (0..m.cols()).map(|j| Rationals.from_i64(m.get(i, j))).collect()).collect();
            prop_assert_eq!(dense_rank(&Rationals, &rows), m.rank(FieldSpec::Q));
            // rank mod p never exceeds rank over Q
            prop_assert!(m.rank(FieldSpec::F2) <= m.rank(FieldSpec::Q));
        }
    }
}
