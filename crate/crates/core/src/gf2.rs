//! Dense bit-packed matrices over GF(2).
//!
//! Rows are stored as runs of `u64` words. Padding bits past `cols` are kept
//! at zero so that word-level equality and popcounts are exact.

use std::fmt;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

#[inline]
pub(crate) fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= *s;
    }
}

#[inline]
pub(crate) fn popcount(words: &[u64]) -> usize {
    words.iter().map(|w| w.count_ones() as usize).sum()
}

#[inline]
pub(crate) fn get_bit(words: &[u64], i: usize) -> bool {
    (words[i / WORD] >> (i % WORD)) & 1 == 1
}

#[inline]
pub(crate) fn flip_bit(words: &mut [u64], i: usize) {
    words[i / WORD] ^= 1 << (i % WORD);
}

/// Packs a 0/1 byte slice into words.
pub(crate) fn pack_bits(bits: &[u8]) -> Vec<u64> {
    let mut words = vec![0u64; words_for(bits.len())];
    for (i, &b) in bits.iter().enumerate() {
        if b & 1 == 1 {
            flip_bit(&mut words, i);
        }
    }
    words
}

pub(crate) fn unpack_bits(words: &[u64], len: usize) -> Vec<u8> {
    (0..len).map(|i| get_bit(words, i) as u8).collect()
}

/// A binary matrix with row-major packed storage.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BinMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// The cyclic shift `I_n >> 1`: entry `(r, r + 1 mod n)` is one.
    pub fn shift(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for r in 0..n {
            m.set(r, (r + 1) % n, true);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if f(r, c) {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    /// Builds a matrix from rows of 0/1 entries. All rows must have equal length.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {r} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for (c, &b) in row.iter().enumerate() {
                if b > 1 {
                    return Err(Error::InvalidArgument(format!(
                        "entry ({r}, {c}) = {b} is not a bit"
                    )));
                }
                if b == 1 {
                    m.set(r, c, true);
                }
            }
        }
        Ok(m)
    }

    /// A 1×n matrix holding the given bits.
    pub fn row_vector(bits: &[u8]) -> Self {
        let mut m = Self::zeros(1, bits.len());
        for (c, &b) in bits.iter().enumerate() {
            if b & 1 == 1 {
                m.set(0, c, true);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        get_bit(self.row_words(r), c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.stride + c / WORD];
        let mask = 1u64 << (c % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn toggle(&mut self, r: usize, c: usize) {
        self.data[r * self.stride + c / WORD] ^= 1u64 << (c % WORD);
    }

    #[inline]
    pub(crate) fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    pub(crate) fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row_bits(&self, r: usize) -> Vec<u8> {
        unpack_bits(self.row_words(r), self.cols)
    }

    /// Column indices of the ones in row `r`, ascending.
    pub fn row_support(&self, r: usize) -> Vec<usize> {
        (0..self.cols).filter(|&c| self.get(r, c)).collect()
    }

    pub fn row_weight(&self, r: usize) -> usize {
        popcount(self.row_words(r))
    }

    pub fn col_weight(&self, c: usize) -> usize {
        (0..self.rows).filter(|&r| self.get(r, c)).count()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        popcount(&self.data)
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|r| self.row_bits(r)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            let row = self.row_words(r);
            for (wi, &w) in row.iter().enumerate() {
                let mut w = w;
                while w != 0 {
                    let b = w.trailing_zeros() as usize;
                    t.set(wi * WORD + b, r, true);
                    w &= w - 1;
                }
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let mut acc = vec![0u64; other.stride];
            for (wi, &w) in self.row_words(r).iter().enumerate() {
                let mut w = w;
                while w != 0 {
                    let k = wi * WORD + w.trailing_zeros() as usize;
                    xor_into(&mut acc, other.row_words(k));
                    w &= w - 1;
                }
            }
            out.row_words_mut(r).copy_from_slice(&acc);
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = self.clone();
        xor_into(&mut out.data, &other.data);
        Ok(out)
    }

    /// `self · vᵀ` for a 0/1 vector `v`, returned as 0/1 entries.
    pub fn mul_bits(&self, v: &[u8]) -> Result<Vec<u8>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        let packed = pack_bits(v);
        Ok(unpack_bits(&self.mul_words(&packed), self.rows))
    }

    pub(crate) fn mul_words(&self, v: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; words_for(self.rows)];
        for r in 0..self.rows {
            let parity = self
                .row_words(r)
                .iter()
                .zip(v)
                .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
                & 1;
            if parity == 1 {
                flip_bit(&mut out, r);
            }
        }
        out
    }

    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "hstack of {} and {} rows",
                self.rows, other.rows
            )));
        }
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    out.set(r, c, true);
                }
            }
            for c in 0..other.cols {
                if other.get(r, c) {
                    out.set(r, self.cols + c, true);
                }
            }
        }
        Ok(out)
    }

    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "vstack of {} and {} columns",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            stride: self.stride,
            data,
        })
    }

    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                if !self.get(r1, c1) {
                    continue;
                }
                for r2 in 0..other.rows {
                    for c2 in 0..other.cols {
                        if other.get(r2, c2) {
                            out.set(r1 * other.rows + r2, c1 * other.cols + c2, true);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        RowEchelon::new(self).rank()
    }

    /// Reduced row-echelon form and the pivot column of each nonzero row.
    ///
    /// Pivots are chosen leftmost-first. The returned matrix keeps the input
    /// shape; rows past the rank are zero.
    pub fn row_reduce(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.reduce_in_place();
        (m, pivots)
    }

    fn reduce_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut next = 0;
        for c in 0..self.cols {
            if next == self.rows {
                break;
            }
            let Some(p) = (next..self.rows).find(|&r| self.get(r, c)) else {
                continue;
            };
            self.swap_rows(p, next);
            let pivot_row = self.row_words(next).to_vec();
            for r in 0..self.rows {
                if r != next && self.get(r, c) {
                    xor_into(self.row_words_mut(r), &pivot_row);
                }
            }
            pivots.push(c);
            next += 1;
        }
        pivots
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let s = self.stride;
        let (lo, hi) = (a.min(b), a.max(b));
        let (head, tail) = self.data.split_at_mut(hi * s);
        head[lo * s..(lo + 1) * s].swap_with_slice(&mut tail[..s]);
    }

    /// Basis of `{v : self · vᵀ = 0}`, one vector per row.
    pub fn kernel_basis(&self) -> Self {
        let (rref, pivots) = self.row_reduce();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut basis = Self::zeros(free.len(), self.cols);
        for (i, &f) in free.iter().enumerate() {
            basis.set(i, f, true);
            for (row, &p) in pivots.iter().enumerate() {
                if rref.get(row, f) {
                    basis.set(i, p, true);
                }
            }
        }
        basis
    }

    /// Whether the single-row matrix `v` is a GF(2) combination of rows of `self`.
    pub fn in_rowspace(&self, v: &Self) -> Result<bool> {
        if v.rows != 1 || v.cols != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "expected a 1x{} vector, got {}x{}",
                self.cols, v.rows, v.cols
            )));
        }
        Ok(RowEchelon::new(self).contains(v.row_words(0)))
    }
}

impl fmt::Debug for BinMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let line: String = (0..self.cols)
                .map(|c| if self.get(r, c) { '1' } else { '0' })
                .collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// Cached reduced row-echelon form used for repeated rowspace membership tests.
#[derive(Clone, Debug)]
pub struct RowEchelon {
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
    cols: usize,
}

impl RowEchelon {
    pub fn new(m: &BinMatrix) -> Self {
        let (rref, pivots) = m.row_reduce();
        let rows = (0..pivots.len())
            .map(|r| rref.row_words(r).to_vec())
            .collect();
        Self {
            rows,
            pivots,
            cols: m.cols,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Reduces `v` against the stored rows in place; the remainder is zero iff
    /// `v` lies in the rowspace.
    pub(crate) fn reduce(&self, v: &mut [u64]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if get_bit(v, p) {
                xor_into(v, row);
            }
        }
    }

    pub(crate) fn contains(&self, v: &[u64]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Adds `v` to the span. Returns false when it was already contained.
    pub(crate) fn insert(&mut self, v: &[u64]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        let Some(p) = (0..self.cols).find(|&c| get_bit(&w, c)) else {
            return false;
        };
        self.rows.push(w);
        self.pivots.push(p);
        true
    }

    pub fn contains_bits(&self, v: &[u8]) -> Result<bool> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok(self.contains(&pack_bits(v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> BinMatrix {
        BinMatrix::from_fn(rows, cols, |_, _| rng.gen_bool(0.5))
    }

    #[test]
    fn shift_matches_explicit_s3() {
        let s3 = BinMatrix::from_rows(&[[0, 1, 0], [0, 0, 1], [1, 0, 0]]).unwrap();
        assert_eq!(BinMatrix::shift(3), s3);
        assert_eq!(s3.rank(), 3);
        let (e, p) = s3.row_reduce();
        assert_eq!(e, BinMatrix::identity(3));
        assert_eq!(p, vec![0, 1, 2]);
        let cube = s3.matmul(&s3).unwrap().matmul(&s3).unwrap();
        assert_eq!(cube, BinMatrix::identity(3));
        assert!(s3.in_rowspace(&BinMatrix::row_vector(&[1, 1, 1])).unwrap());
    }

    #[test]
    fn zero_and_identity_cases() {
        let z = BinMatrix::zeros(4, 4);
        assert_eq!(z.rank(), 0);
        let (e, p) = z.row_reduce();
        assert!(e.is_zero());
        assert!(p.is_empty());
        let id = BinMatrix::identity(3);
        assert_eq!(id.row_reduce(), (id.clone(), vec![0, 1, 2]));
        assert_eq!(BinMatrix::identity(5).kernel_basis().rows(), 0);
        assert!(id.in_rowspace(&BinMatrix::row_vector(&[1, 0, 1])).unwrap());
        assert!(z
            .in_rowspace(&BinMatrix::row_vector(&[0, 0, 0, 0]))
            .unwrap());
        let m = BinMatrix::from_rows(&[[1, 1, 0]]).unwrap();
        assert!(m.add(&m).unwrap().is_zero());
    }

    #[test]
    fn parity_kernel() {
        let m = BinMatrix::from_rows(&[[1, 1]]).unwrap();
        let k = m.kernel_basis();
        assert_eq!(k, BinMatrix::from_rows(&[[1, 1]]).unwrap());
    }

    #[test]
    fn x_and_y_commute() {
        for (l, m) in [(3, 5), (4, 6), (2, 7)] {
            let x = BinMatrix::shift(l).kron(&BinMatrix::identity(m));
            let y = BinMatrix::identity(l).kron(&BinMatrix::shift(m));
            assert_eq!(x.matmul(&y).unwrap(), y.matmul(&x).unwrap());
        }
    }

    #[test]
    fn dimension_errors() {
        let a = BinMatrix::zeros(2, 3);
        let b = BinMatrix::zeros(2, 3);
        assert!(matches!(a.matmul(&b), Err(Error::DimensionMismatch(_))));
        assert!(matches!(
            a.add(&BinMatrix::zeros(3, 3)),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(a.in_rowspace(&BinMatrix::row_vector(&[1, 0])).is_err());
        assert!(a.mul_bits(&[1]).is_err());
        assert!(BinMatrix::from_rows(&[vec![1, 0], vec![1]]).is_err());
    }

    #[test]
    fn rank_equals_transpose_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let m = random_matrix(&mut rng, 20, 30);
            assert_eq!(m.rank(), m.transpose().rank());
        }
    }

    #[test]
    fn wide_matrices_cross_word_boundaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random_matrix(&mut rng, 70, 150);
        let k = m.kernel_basis();
        assert_eq!(k.rows(), 150 - m.rank());
        assert!(m.matmul(&k.transpose()).unwrap().is_zero());
        assert_eq!(m.transpose().transpose(), m);
    }

    fn brute_force_rowspace(m: &BinMatrix, v: &[u8]) -> bool {
        let rows = m.to_rows();
        (0u32..1 << rows.len()).any(|mask| {
            let mut acc = vec![0u8; m.cols()];
            for (i, row) in rows.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    for (a, b) in acc.iter_mut().zip(row) {
                        *a ^= b;
                    }
                }
            }
            acc == v
        })
    }

    proptest! {
        #[test]
        fn kernel_rows_annihilate_and_are_independent(
            rows in 1usize..12, cols in 1usize..40, seed in any::<u64>()
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(&mut rng, rows, cols);
            let k = m.kernel_basis();
            prop_assert_eq!(k.rows(), cols - m.rank());
            if k.rows() > 0 {
                prop_assert!(m.matmul(&k.transpose()).unwrap().is_zero());
                prop_assert_eq!(k.rank(), k.rows());
            }
        }

        #[test]
        fn row_reduce_is_idempotent(rows in 1usize..15, cols in 1usize..70, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(&mut rng, rows, cols);
            let (e, p) = m.row_reduce();
            let (e2, p2) = e.row_reduce();
            prop_assert_eq!(&e, &e2);
            prop_assert_eq!(p, p2);
        }

        #[test]
        fn rowspace_matches_enumeration(
            rows in 1usize..=12, cols in 1usize..10, seed in any::<u64>(), vbits in any::<u16>()
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = BinMatrix::from_fn(rows, cols, |_, _| rng.gen_bool(0.3));
            let v: Vec<u8> = (0..cols).map(|i| (vbits >> i & 1) as u8).collect();
            prop_assert_eq!(
                m.in_rowspace(&BinMatrix::row_vector(&v)).unwrap(),
                brute_force_rowspace(&m, &v)
            );
        }
    }
}
