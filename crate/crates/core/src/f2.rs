//! Word-packed vectors and row-echelon kernels over F2.
//!
//! Everything in the crate that needs linear algebra goes through [`BitVec`]
//! and [`Echelon`]: ISG membership, commutant updates, benign-generator solves
//! and the distance search signatures.

use std::fmt;

const WORD: usize = 64;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// A fixed-length vector over F2, packed 64 bits per word.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_ones(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.flip(i);
        }
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Parity of the bitwise AND, i.e. the standard dot product over F2.
    #[inline]
    pub fn dot(&self, other: &BitVec) -> bool {
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }

    /// True when `self & mask` is nonzero.
    #[inline]
    pub fn intersects(&self, mask: &BitVec) -> bool {
        self.words.iter().zip(&mask.words).any(|(a, b)| a & b != 0)
    }

    pub fn first_one(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(wi * WORD + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let tz = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD + tz)
                }
            })
        })
    }

    /// Concatenate, keeping the bit positions of `self` and shifting `other` by `self.len()`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        out.words[..self.words.len()].copy_from_slice(&self.words);
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect();
        write!(f, "BitVec({s})")
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A list of F2 row vectors of a common width.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct F2Matrix {
    ncols: usize,
    rows: Vec<BitVec>,
}

impl F2Matrix {
    pub fn new(ncols: usize) -> Self {
        Self {
            ncols,
            rows: Vec::new(),
        }
    }

    pub fn from_rows(ncols: usize, rows: Vec<BitVec>) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == ncols));
        Self { ncols, rows }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn push_row(&mut self, row: BitVec) {
        debug_assert_eq!(row.len(), self.ncols);
        self.rows.push(row);
    }

    /// Row-echelon form of this matrix, remembering how each reduced row was
    /// combined from the original rows.
    pub fn echelon(&self) -> Echelon {
        let mut ech = Echelon::new(self.ncols, self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            ech.insert_with_combo(row.clone(), BitVec::unit(self.rows.len(), i));
        }
        ech
    }

    pub fn rank(&self) -> usize {
        self.echelon().rank()
    }

    /// The reduced matrix: nonzero echelon rows only.
    pub fn reduced(&self) -> F2Matrix {
        let ech = self.echelon();
        F2Matrix::from_rows(self.ncols, ech.rows.clone())
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.echelon().contains(v)
    }

    /// Coefficients `c` with `sum_i c_i rows[i] == v`, if `v` is in the row space.
    pub fn solve_membership(&self, v: &BitVec) -> Option<BitVec> {
        self.echelon().solve(v)
    }

    /// Basis of `{ x : rows · x = 0 }` as vectors of length `ncols`.
    pub fn kernel(&self) -> Vec<BitVec> {
        let ech = self.echelon_fully_reduced();
        let pivot_set: Vec<Option<usize>> = {
            let mut p = vec![None; self.ncols];
            for (r, &c) in ech.pivots.iter().enumerate() {
                p[c] = Some(r);
            }
            p
        };
        let mut out = Vec::new();
        for (free, pivot) in pivot_set.iter().enumerate() {
            if pivot.is_some() {
                continue;
            }
            let mut x = BitVec::unit(self.ncols, free);
            for (r, &c) in ech.pivots.iter().enumerate() {
                if ech.rows[r].get(free) {
                    x.set(c, true);
                }
            }
            out.push(x);
        }
        out
    }

    fn echelon_fully_reduced(&self) -> Echelon {
        let mut ech = self.echelon();
        ech.fully_reduce();
        ech
    }
}

/// Incrementally maintained row-echelon form.
///
/// Rows are kept sorted by pivot column; every row is zero at the pivot columns
/// of the rows before it. `combos[i]` records which source rows were summed to
/// obtain `rows[i]`.
#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    nsource: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
    combos: Vec<BitVec>,
}

impl Echelon {
    pub fn new(ncols: usize, nsource: usize) -> Self {
        Self {
            ncols,
            nsource,
            rows: Vec::new(),
            pivots: Vec::new(),
            combos: Vec::new(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduce `v` in place against the echelon rows, accumulating the source
    /// combination into `combo`.
    fn reduce_into(&self, v: &mut BitVec, combo: &mut BitVec) {
        for ((row, &p), c) in self.rows.iter().zip(&self.pivots).zip(&self.combos) {
            if v.get(p) {
                v.xor_assign(row);
                combo.xor_assign(c);
            }
        }
    }

    fn reduce_plain(&self, v: &mut BitVec) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(row);
            }
        }
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        let mut w = v.clone();
        self.reduce_plain(&mut w);
        w.is_zero()
    }

    /// Coefficient vector over the inserted source rows reproducing `v`.
    pub fn solve(&self, v: &BitVec) -> Option<BitVec> {
        let mut w = v.clone();
        let mut combo = BitVec::zeros(self.nsource);
        self.reduce_into(&mut w, &mut combo);
        w.is_zero().then_some(combo)
    }

    /// Insert a source row. Returns `true` if the rank increased.
    pub fn insert_with_combo(&mut self, mut v: BitVec, mut combo: BitVec) -> bool {
        debug_assert_eq!(v.len(), self.ncols);
        if combo.len() < self.nsource {
            combo = combo.concat(&BitVec::zeros(self.nsource - combo.len()));
        }
        self.reduce_into(&mut v, &mut combo);
        let Some(p) = v.first_one() else {
            return false;
        };
        let at = self.pivots.partition_point(|&q| q < p);
        self.rows.insert(at, v);
        self.pivots.insert(at, p);
        self.combos.insert(at, combo);
        true
    }

    /// Insert without tracking a combination (the source-count stays fixed).
    pub fn insert(&mut self, v: BitVec) -> bool {
        let combo = BitVec::zeros(self.nsource);
        self.insert_with_combo(v, combo)
    }

    fn fully_reduce(&mut self) {
        for i in (0..self.rows.len()).rev() {
            let p = self.pivots[i];
            for j in 0..i {
                if self.rows[j].get(p) {
                    let (head, tail) = self.rows.split_at_mut(i);
                    head[j].xor_assign(&tail[0]);
                    let (ch, ct) = self.combos.split_at_mut(i);
                    ch[j].xor_assign(&ct[0]);
                }
            }
        }
    }
}
