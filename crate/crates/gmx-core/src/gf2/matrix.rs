//! Dense bit-packed matrices over GF(2).

use std::fmt;

use crate::error::{Error, Result};

const W: usize = 64;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(W)
}

#[inline]
pub(crate) fn bit(words: &[u64], i: usize) -> bool {
    (words[i / W] >> (i % W)) & 1 == 1
}

#[inline]
pub(crate) fn set_bit(words: &mut [u64], i: usize, v: bool) {
    let m = 1u64 << (i % W);
    if v {
        words[i / W] |= m;
    } else {
        words[i / W] &= !m;
    }
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

/// Iterate the set bit positions of a packed row.
pub(crate) fn ones(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * W + t)
            }
        })
    })
}

/// Matrix over GF(2) stored row-major, 64 columns per word.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

/// Result of [`BinaryMatrix::systematic_form`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Systematic {
    /// Full-rank matrix with an identity on `pivots`, one row per pivot.
    pub matrix: BinaryMatrix,
    /// Pivot column of each row, in row order.
    pub pivots: Vec<usize>,
    /// Preferred columns that could not be made pivots.
    pub skipped: Vec<usize>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols).max(1);
        BinaryMatrix {
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

    /// Build from 0/1 rows. All rows must have length `cols`.
    pub fn from_rows(cols: usize, rows: &[Vec<u8>]) -> Result<Self> {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Shape(format!(
                    "row {i} has length {} but {cols} columns expected",
                    r.len()
                )));
            }
            for (j, &b) in r.iter().enumerate() {
                match b {
                    0 => {}
                    1 => m.set(i, j, true),
                    _ => return Err(Error::Parse(format!("entry {b} is not a bit"))),
                }
            }
        }
        Ok(m)
    }

    /// Parse rows written as bit strings; spaces and `|` are ignored.
    pub fn from_strs(rows: &[&str]) -> Result<Self> {
        let parsed: Vec<Vec<u8>> = rows
            .iter()
            .map(|s| {
                s.chars()
                    .filter(|c| !c.is_whitespace() && *c != '|')
                    .map(|c| match c {
                        '0' => Ok(0),
                        '1' => Ok(1),
                        _ => Err(Error::Parse(format!("bad bit character {c:?}"))),
                    })
                    .collect::<Result<Vec<u8>>>()
            })
            .collect::<Result<_>>()?;
        let cols = parsed.first().map_or(0, |r| r.len());
        Self::from_rows(cols, &parsed)
    }

    /// Build from packed rows (each with at least `words_for(cols)` words).
    pub fn from_packed_rows<'a>(cols: usize, rows: impl IntoIterator<Item = &'a [u64]>) -> Self {
        let mut m = Self::zeros(0, cols);
        for r in rows {
            m.push_row(r);
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

    /// Number of 64-bit words per packed row.
    #[inline]
    pub fn stride(&self) -> usize {
        self.stride
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        bit(self.row(r), c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let s = self.stride;
        set_bit(&mut self.data[r * s..(r + 1) * s], c, v);
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        let v = self.get(r, c);
        self.set(r, c, !v);
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [u64] {
        let s = self.stride;
        &mut self.data[r * s..(r + 1) * s]
    }

    /// Row `dst` += row `src`.
    pub fn add_row(&mut self, src: usize, dst: usize) {
        assert_ne!(src, dst);
        let s = self.stride;
        let (a, b) = if src < dst {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&lo[src * s..(src + 1) * s], &mut hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&hi[..s], &mut lo[dst * s..(dst + 1) * s])
        };
        xor_into(b, a);
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.data.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    pub fn push_row(&mut self, words: &[u64]) {
        let start = self.data.len();
        self.data.resize(start + self.stride, 0);
        let n = self.stride.min(words.len());
        self.data[start..start + n].copy_from_slice(&words[..n]);
        self.mask_row_tail(self.rows);
        self.rows += 1;
    }

    pub fn push_bits(&mut self, bits: &[u8]) {
        let mut w = vec![0u64; self.stride];
        for (j, &b) in bits.iter().enumerate() {
            if b != 0 {
                set_bit(&mut w, j, true);
            }
        }
        self.push_row(&w);
    }

    fn mask_row_tail(&mut self, r: usize) {
        let tail = self.cols % W;
        if tail != 0 {
            let last = r * self.stride + self.stride - 1;
            self.data[last] &= (1u64 << tail) - 1;
        } else if self.cols == 0 {
            self.data[r * self.stride] = 0;
        }
    }

    pub fn remove_row(&mut self, r: usize) {
        let s = self.stride;
        self.data.drain(r * s..(r + 1) * s);
        self.rows -= 1;
    }

    pub fn row_weight(&self, r: usize) -> usize {
        popcount(self.row(r))
    }

    pub fn row_is_zero(&self, r: usize) -> bool {
        self.row(r).iter().all(|&w| w == 0)
    }

    pub fn row_support(&self, r: usize) -> Vec<usize> {
        ones(self.row(r)).collect()
    }

    pub fn row_bits(&self, r: usize) -> Vec<u8> {
        (0..self.cols).map(|c| self.get(r, c) as u8).collect()
    }

    pub fn column_support(&self, c: usize) -> Vec<usize> {
        (0..self.rows).filter(|&r| self.get(r, c)).collect()
    }

    pub fn col_weight(&self, c: usize) -> usize {
        (0..self.rows).filter(|&r| self.get(r, c)).count()
    }

    pub fn weight(&self) -> usize {
        popcount(&self.data)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in ones(self.row(r)) {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Columns in the given order (repeats allowed).
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            let src = self.row(r);
            let dst = &mut m.data[r * m.stride..(r + 1) * m.stride];
            for (j, &c) in cols.iter().enumerate() {
                if bit(src, c) {
                    set_bit(dst, j, true);
                }
            }
        }
        m
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut m = Self::zeros(0, self.cols);
        for &r in rows {
            m.push_row(self.row(r));
        }
        m
    }

    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::Shape(format!(
                "vstack of {} and {} columns",
                self.cols, other.cols
            )));
        }
        let mut m = self.clone();
        for r in 0..other.rows {
            m.push_row(other.row(r));
        }
        Ok(m)
    }

    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::Shape(format!(
                "hstack of {} and {} rows",
                self.rows, other.rows
            )));
        }
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in ones(self.row(r)) {
                m.set(r, c, true);
            }
            for c in ones(other.row(r)) {
                m.set(r, self.cols + c, true);
            }
        }
        Ok(m)
    }

    /// Append `extra` zero columns.
    pub fn widen(&self, extra: usize) -> Self {
        let mut m = Self::zeros(self.rows, self.cols + extra);
        for r in 0..self.rows {
            let n = self.stride;
            m.row_mut(r)[..n].copy_from_slice(self.row(r));
        }
        m
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut m = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            let mut acc = vec![0u64; rhs.stride];
            for k in ones(self.row(r)) {
                xor_into(&mut acc, rhs.row(k));
            }
            m.row_mut(r).copy_from_slice(&acc);
        }
        Ok(m)
    }

    /// `self * x^T` for a packed vector `x` of length `cols`; one bit per row.
    pub fn syndrome(&self, x: &[u64]) -> Vec<u64> {
        let mut s = vec![0u64; words_for(self.rows).max(1)];
        for r in 0..self.rows {
            let par = self
                .row(r)
                .iter()
                .zip(x)
                .fold(0u32, |a, (p, q)| a ^ (p & q).count_ones())
                & 1;
            if par == 1 {
                set_bit(&mut s, r, true);
            }
        }
        s
    }

    /// Row-reduce in place using the given column order for pivot search.
    /// Returns the pivot column of each leading row; rows past the rank are zero.
    fn eliminate(&mut self, order: impl Iterator<Item = usize>) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut next = 0;
        for c in order {
            if next == self.rows {
                break;
            }
            let Some(p) = (next..self.rows).find(|&r| self.get(r, c)) else {
                continue;
            };
            self.swap_rows(p, next);
            for r in 0..self.rows {
                if r != next && self.get(r, c) {
                    self.add_row(next, r);
                }
            }
            pivots.push(c);
            next += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.eliminate(0..self.cols).len()
    }

    /// Reduced row echelon form with zero rows dropped, and the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.eliminate(0..self.cols);
        m.data.truncate(pivots.len() * m.stride);
        m.rows = pivots.len();
        (m, pivots)
    }

    /// Row-reduce choosing pivots from `preferred` first (in order), then the
    /// remaining columns in ascending order. Zero rows are dropped.
    pub fn systematic_form(&self, preferred: &[usize]) -> Systematic {
        let mut seen = vec![false; self.cols];
        let mut order = Vec::with_capacity(self.cols);
        for &c in preferred {
            if c < self.cols && !seen[c] {
                seen[c] = true;
                order.push(c);
            }
        }
        order.extend((0..self.cols).filter(|&c| !seen[c]));
        let mut m = self.clone();
        let pivots = m.eliminate(order.into_iter());
        m.data.truncate(pivots.len() * m.stride);
        m.rows = pivots.len();
        let skipped = preferred
            .iter()
            .copied()
            .filter(|c| !pivots.contains(c))
            .collect();
        Systematic {
            matrix: m,
            pivots,
            skipped,
        }
    }

    /// Basis of `{x : self * x^T = 0}` in reduced row echelon form.
    pub fn null_space(&self) -> Self {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Self::zeros(0, self.cols);
        for f in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut w = vec![0u64; basis.stride];
            set_bit(&mut w, f, true);
            for (i, &p) in pivots.iter().enumerate() {
                if r.get(i, f) {
                    set_bit(&mut w, p, true);
                }
            }
            basis.push_row(&w);
        }
        basis.rref().0
    }

    /// True when every row of `self` lies in the row space of `other`.
    pub fn row_space_within(&self, other: &Self) -> bool {
        if self.cols != other.cols {
            return false;
        }
        let (basis, pivots) = other.rref();
        (0..self.rows).all(|r| {
            let mut v = self.row(r).to_vec();
            for (i, &p) in pivots.iter().enumerate() {
                if bit(&v, p) {
                    xor_into(&mut v, basis.row(i));
                }
            }
            v.iter().all(|&w| w == 0)
        })
    }

    pub fn to_strings(&self) -> Vec<String> {
        (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| if self.get(r, c) { '1' } else { '0' })
                    .collect()
            })
            .collect()
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryMatrix {}x{}", self.rows, self.cols)?;
        for s in self.to_strings() {
            writeln!(f, "  {s}")?;
        }
        Ok(())
    }
}

impl fmt::Display for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.to_strings() {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_rank(rows: &[Vec<u8>], cols: usize) -> usize {
        // Plain elimination on byte vectors.
        let mut m: Vec<Vec<u8>> = rows.to_vec();
        let mut rank = 0;
        for c in 0..cols {
            if let Some(p) = (rank..m.len()).find(|&r| m[r][c] == 1) {
                m.swap(p, rank);
                for r in 0..m.len() {
                    if r != rank && m[r][c] == 1 {
                        for j in 0..cols {
                            m[r][j] ^= m[rank][j];
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    fn arb_matrix() -> impl Strategy<Value = (usize, Vec<Vec<u8>>)> {
        (1usize..80, 0usize..12).prop_flat_map(|(c, r)| {
            (
                Just(c),
                proptest::collection::vec(proptest::collection::vec(0u8..2, c), r),
            )
        })
    }

    #[test]
    fn parse_and_print() {
        let m = BinaryMatrix::from_strs(&["10 1", "0|11"]).unwrap();
        assert_eq!(m.to_strings(), vec!["101", "011"]);
        assert!(BinaryMatrix::from_strs(&["102"]).is_err());
        assert!(BinaryMatrix::from_strs(&["10", "1"]).is_err());
    }

    #[test]
    fn systematic_prefers_listed_columns() {
        let m = BinaryMatrix::from_strs(&["1100", "0110"]).unwrap();
        let s = m.systematic_form(&[2, 3]);
        assert_eq!(s.pivots, vec![2, 0]);
        assert_eq!(s.skipped, vec![3]);
        assert!(s.matrix.get(0, 2) && !s.matrix.get(1, 2));
    }

    #[test]
    fn wide_columns_cross_word_boundary() {
        let mut m = BinaryMatrix::zeros(3, 130);
        m.set(0, 129, true);
        m.set(1, 64, true);
        m.set(2, 129, true);
        m.set(2, 64, true);
        assert_eq!(m.rank(), 2);
        assert_eq!(m.null_space().rows(), 128);
    }

    proptest! {
        #[test]
        fn rank_matches_naive((c, rows) in arb_matrix()) {
            let m = BinaryMatrix::from_rows(c, &rows).unwrap();
            prop_assert_eq!(m.rank(), naive_rank(&rows, c));
        }

        #[test]
        fn null_space_is_orthogonal_and_complete((c, rows) in arb_matrix()) {
            let m = BinaryMatrix::from_rows(c, &rows).unwrap();
            let n = m.null_space();
            prop_assert_eq!(n.rows() + m.rank(), c);
            if n.rows() > 0 && m.rows() > 0 {
                prop_assert!(m.mul(&n.transpose()).unwrap().is_zero());
            }
        }

        #[test]
        fn transpose_is_involution((c, rows) in arb_matrix()) {
            let m = BinaryMatrix::from_rows(c, &rows).unwrap();
            prop_assert_eq!(m.transpose().transpose(), m);
        }

        #[test]
        fn rref_preserves_row_space((c, rows) in arb_matrix()) {
            let m = BinaryMatrix::from_rows(c, &rows).unwrap();
            let (r, p) = m.rref();
            prop_assert_eq!(r.rows(), p.len());
            prop_assert!(m.row_space_within(&r));
            prop_assert!(r.row_space_within(&m));
        }
    }
}
