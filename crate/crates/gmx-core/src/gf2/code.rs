//! Binary linear codes with labeled coordinates.

use std::collections::HashMap;

use super::matrix::{bit, ones, set_bit, BinaryMatrix};
use crate::error::{Error, Result};

/// Binary linear code `C ⊆ F_2^I`, stored as a generator in reduced row
/// echelon form so that equal codes over equal label orders compare equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LinearCode {
    labels: Vec<String>,
    gen: BinaryMatrix,
    pivots: Vec<usize>,
}

impl std::fmt::Debug for LinearCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LinearCode[{}, {}] {:?} ", self.n(), self.k(), self.labels)?;
        write!(f, "{:?}", self.gen.to_strings())
    }
}

fn check_labels(labels: &[String]) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::LabelMismatch(format!("duplicate coordinate label {l}")));
        }
    }
    Ok(())
}

/// Labels `c0, c1, ...`.
pub fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("c{i}")).collect()
}

impl LinearCode {
    /// Row space of `g`; rows need not be independent.
    pub fn from_generator(labels: Vec<String>, g: &BinaryMatrix) -> Result<Self> {
        if labels.len() != g.cols() {
            return Err(Error::Shape(format!(
                "{} labels for {} columns",
                labels.len(),
                g.cols()
            )));
        }
        check_labels(&labels)?;
        let (gen, pivots) = g.rref();
        Ok(LinearCode { labels, gen, pivots })
    }

    /// Null space of `h`.
    pub fn from_parity_check(labels: Vec<String>, h: &BinaryMatrix) -> Result<Self> {
        Self::from_generator(labels, &h.null_space())
    }

    pub fn unlabeled(g: &BinaryMatrix) -> Self {
        Self::from_generator(default_labels(g.cols()), g).expect("default labels are unique")
    }

    /// The whole space `F_2^n`.
    pub fn free(labels: Vec<String>) -> Result<Self> {
        let n = labels.len();
        Self::from_generator(labels, &BinaryMatrix::identity(n))
    }

    /// `{0^n, 1^n}`.
    pub fn repetition(labels: Vec<String>) -> Result<Self> {
        let n = labels.len();
        let mut g = BinaryMatrix::zeros(0, n);
        if n > 0 {
            g.push_bits(&vec![1; n]);
        }
        Self::from_generator(labels, &g)
    }

    /// Even-weight words.
    pub fn single_parity_check(labels: Vec<String>) -> Result<Self> {
        let n = labels.len();
        let mut h = BinaryMatrix::zeros(0, n);
        if n > 0 {
            h.push_bits(&vec![1; n]);
        }
        Self::from_parity_check(labels, &h)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.gen.rows()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn generator(&self) -> &BinaryMatrix {
        &self.gen
    }

    /// Pivot (information) positions of the stored generator.
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn parity_check(&self) -> BinaryMatrix {
        self.gen.null_space()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    fn indices_of(&self, labels: &[String]) -> Result<Vec<usize>> {
        let map: HashMap<&str, usize> = self
            .labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        labels
            .iter()
            .map(|l| {
                map.get(l.as_str())
                    .copied()
                    .ok_or_else(|| Error::UnknownCoordinate(l.to_string()))
            })
            .collect()
    }

    pub fn relabel(&self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::Shape("relabel length".into()));
        }
        check_labels(&labels)?;
        Ok(LinearCode {
            labels,
            gen: self.gen.clone(),
            pivots: self.pivots.clone(),
        })
    }

    /// Same code with coordinates listed in `order` (a permutation of the labels).
    pub fn reorder(&self, order: &[String]) -> Result<Self> {
        if order.len() != self.n() {
            return Err(Error::LabelMismatch("reorder needs every label once".into()));
        }
        let idx = self.indices_of(order)?;
        Self::from_generator(order.to_vec(), &self.gen.select_columns(&idx))
    }

    /// Code equality as sets of labeled words, regardless of label order.
    pub fn same_code(&self, other: &Self) -> bool {
        if self.n() != other.n() || self.k() != other.k() {
            return false;
        }
        match other.reorder(&self.labels) {
            Ok(o) => o.gen == self.gen,
            Err(_) => false,
        }
    }

    pub fn dual(&self) -> Self {
        LinearCode::from_parity_check(self.labels.clone(), &self.gen).expect("labels already valid")
    }

    /// `C1 ∩ C2` over a common index set; the result uses `self`'s label order.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::LengthMismatch("intersection of codes over different index sets".into()));
        }
        let o = other.reorder(&self.labels)?;
        let h = self.parity_check().vstack(&o.parity_check())?;
        Self::from_parity_check(self.labels.clone(), &h)
    }

    /// `C|_J`, coordinates in the order given.
    pub fn project(&self, subset: &[String]) -> Result<Self> {
        let idx = self.indices_of(subset)?;
        check_labels(subset)?;
        Self::from_generator(subset.to_vec(), &self.gen.select_columns(&idx))
    }

    pub fn project_indices(&self, idx: &[usize]) -> Self {
        let labels = idx.iter().map(|&i| self.labels[i].clone()).collect();
        Self::from_generator(labels, &self.gen.select_columns(idx)).expect("subset of unique labels")
    }

    /// Subcode `C_J`: codewords vanishing outside `J`, restricted to `J`.
    pub fn subcode(&self, subset: &[String]) -> Result<Self> {
        let idx = self.indices_of(subset)?;
        check_labels(subset)?;
        Ok(self.subcode_indices(&idx))
    }

    /// `(C|_J, C_J)` for a nonempty subset `J`.
    pub fn project_and_subcode(&self, subset: &[String]) -> Result<(Self, Self)> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        Ok((self.project(subset)?, self.subcode(subset)?))
    }

    pub fn subcode_indices(&self, idx: &[usize]) -> Self {
        let mut inside = vec![false; self.n()];
        for &i in idx {
            inside[i] = true;
        }
        let outside: Vec<usize> = (0..self.n()).filter(|&i| !inside[i]).collect();
        // Message vectors u with u * G_out = 0.
        let u = self.gen.select_columns(&outside).transpose().null_space();
        let words = u.mul(&self.gen).expect("shapes agree");
        let labels = idx.iter().map(|&i| self.labels[i].clone()).collect();
        Self::from_generator(labels, &words.select_columns(idx)).expect("subset of unique labels")
    }

    /// Append one coordinate per subset, each the sum of the listed
    /// coordinates (indices may refer to earlier appended coordinates).
    pub fn extend(&self, subsets: &[Vec<usize>], new_labels: Vec<String>) -> Result<Self> {
        if subsets.len() != new_labels.len() {
            return Err(Error::Shape("one label per partial parity".into()));
        }
        let mut g = self.gen.widen(subsets.len());
        let n = self.n();
        for (j, s) in subsets.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::EmptySubset);
            }
            for r in 0..g.rows() {
                let mut p = false;
                for &i in s {
                    if i >= n + j {
                        return Err(Error::Shape(format!("subset index {i} out of range")));
                    }
                    p ^= g.get(r, i);
                }
                g.set(r, n + j, p);
            }
        }
        let mut labels = self.labels.clone();
        labels.extend(new_labels);
        Self::from_generator(labels, &g)
    }

    /// Cartesian product over disjoint label sets.
    pub fn product(&self, other: &Self) -> Result<Self> {
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        let g = self
            .gen
            .widen(other.n())
            .vstack(&BinaryMatrix::zeros(other.k(), self.n()).hstack(&other.gen)?)?;
        Self::from_generator(labels, &g)
    }

    pub fn contains_packed(&self, word: &[u64]) -> bool {
        let mut v = word.to_vec();
        for (i, &p) in self.pivots.iter().enumerate() {
            if bit(&v, p) {
                super::matrix::xor_into(&mut v, self.gen.row(i));
            }
        }
        v.iter().all(|&w| w == 0)
    }

    pub fn contains(&self, word: &[u8]) -> bool {
        if word.len() != self.n() {
            return false;
        }
        self.contains_packed(&pack(word))
    }

    /// Systematic encoding: codeword whose pivot positions carry `msg`.
    pub fn encode_packed(&self, msg: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; self.gen.stride()];
        for i in ones(msg) {
            if i < self.k() {
                super::matrix::xor_into(&mut out, self.gen.row(i));
            }
        }
        out
    }

    pub fn encode(&self, msg: &[u8]) -> Vec<u8> {
        unpack(&self.encode_packed(&pack(msg)), self.n())
    }

    /// All codewords as packed words, in message-counter order. Capped at k <= 26.
    pub fn codewords(&self) -> Result<Vec<Vec<u64>>> {
        if self.k() > 26 {
            return Err(Error::CapExceeded(format!("enumerating 2^{} codewords", self.k())));
        }
        let stride = self.gen.stride();
        let mut out = Vec::with_capacity(1 << self.k());
        let mut cur = vec![0u64; stride];
        out.push(cur.clone());
        // Gray-code walk.
        for i in 1u64..(1u64 << self.k()) {
            let r = i.trailing_zeros() as usize;
            super::matrix::xor_into(&mut cur, self.gen.row(r));
            out.push(cur.clone());
        }
        Ok(out)
    }

    /// Minimum nonzero weight by enumeration (smaller of code and dual side
    /// is not used: this is a plain oracle for small codes).
    pub fn min_distance(&self) -> Result<usize> {
        let words = self.codewords()?;
        Ok(words
            .iter()
            .map(|w| super::matrix::popcount(w))
            .filter(|&w| w > 0)
            .min()
            .unwrap_or(0))
    }

    pub fn is_repetition(&self) -> bool {
        self.n() >= 1
            && self.k() == 1
            && self.gen.row_weight(0) == self.n()
    }

    pub fn is_single_parity_check(&self) -> bool {
        self.n() >= 1 && self.k() + 1 == self.n() && {
            let h = self.parity_check();
            h.rows() == 1 && h.row_weight(0) == self.n()
        }
    }

    /// Coordinate classes of the finest Cartesian-product decomposition.
    ///
    /// Rows of a systematic generator never straddle two factors of a product
    /// code, so the connected components of the row/column support graph are
    /// exactly the factors. All-zero coordinates are singleton factors.
    pub fn cartesian_factors(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        for r in 0..self.k() {
            let mut it = ones(self.gen.row(r));
            if let Some(first) = it.next() {
                for c in it {
                    let a = find(&mut parent, first);
                    let b = find(&mut parent, c);
                    if a != b {
                        parent[b] = a;
                    }
                }
            }
        }
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for c in 0..n {
            let r = find(&mut parent, c);
            groups.entry(r).or_default().push(c);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort();
        out
    }

    /// `max over factors of min(k_f, n_f - k_f)`.
    pub fn factor_complexity(&self) -> usize {
        let factors = self.cartesian_factors();
        if factors.len() <= 1 {
            return self.k().min(self.n() - self.k());
        }
        factors
            .iter()
            .map(|f| {
                let kf = self.project_indices(f).k();
                kf.min(f.len() - kf)
            })
            .max()
            .unwrap_or(0)
    }
}

pub fn pack(bits: &[u8]) -> Vec<u64> {
    let mut w = vec![0u64; super::matrix::words_for(bits.len()).max(1)];
    for (i, &b) in bits.iter().enumerate() {
        if b != 0 {
            set_bit(&mut w, i, true);
        }
    }
    w
}

pub fn unpack(words: &[u64], n: usize) -> Vec<u8> {
    (0..n).map(|i| bit(words, i) as u8).collect()
}

/// A code together with partial-parity definitions over its coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralizedExtension {
    pub base: LinearCode,
    /// Subset `J_j` of coordinate indices for each appended partial parity;
    /// indices `>= n` refer to earlier partial parities.
    pub parity_defs: Vec<Vec<usize>>,
}

impl GeneralizedExtension {
    pub fn new(base: LinearCode) -> Self {
        GeneralizedExtension {
            base,
            parity_defs: Vec::new(),
        }
    }

    /// Extension by the given subsets, validated against the base length.
    pub fn with_subsets(base: LinearCode, parity_defs: Vec<Vec<usize>>) -> Result<Self> {
        let e = GeneralizedExtension { base, parity_defs };
        e.extended_code()?;
        Ok(e)
    }

    pub fn degree(&self) -> usize {
        self.parity_defs.len()
    }

    pub fn parity_labels(&self) -> Vec<String> {
        (0..self.parity_defs.len()).map(|j| format!("p{}", j + 1)).collect()
    }

    /// The extended code `C^(g)` over base labels followed by `p1, p2, ...`.
    pub fn extended_code(&self) -> Result<LinearCode> {
        self.base.extend(&self.parity_defs, self.parity_labels())
    }

    /// Ext-meta text: one partial parity per line, its subset as
    /// space-separated 0-based column indices.
    pub fn write_meta(&self) -> String {
        self.parity_defs
            .iter()
            .map(|j| j.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ") + "\n")
            .collect()
    }

    /// Parse ext-meta text over `base`; blank lines and `#` comments are
    /// skipped.
    pub fn read_meta(base: LinearCode, text: &str) -> Result<Self> {
        let mut defs = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let j = line
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse(format!("ext-meta line {}: {e}", no + 1)))?;
            defs.push(j);
        }
        Self::with_subsets(base, defs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ext_meta_round_trip() {
        let base = LinearCode::single_parity_check(default_labels(4)).unwrap();
        let e = GeneralizedExtension::with_subsets(base.clone(), vec![vec![0, 1], vec![2, 3, 4]]).unwrap();
        let text = e.write_meta();
        assert_eq!(text, "0 1\n2 3 4\n");
        assert_eq!(GeneralizedExtension::read_meta(base.clone(), &format!("# meta\n{text}\n")).unwrap(), e);
        assert!(GeneralizedExtension::read_meta(base, "0 x\n").is_err());
    }
    use proptest::prelude::*;

    fn hamming7() -> LinearCode {
        let h = BinaryMatrix::from_strs(&["1110100", "0111010", "1101001"]).unwrap();
        LinearCode::from_parity_check(default_labels(7), &h).unwrap()
    }

    fn arb_code() -> impl Strategy<Value = LinearCode> {
        (1usize..10, 0usize..8).prop_flat_map(|(n, k)| {
            proptest::collection::vec(proptest::collection::vec(0u8..2, n), k).prop_map(move |rows| {
                LinearCode::unlabeled(&BinaryMatrix::from_rows(n, &rows).unwrap())
            })
        })
    }

    #[test]
    fn hamming_basics() {
        let c = hamming7();
        assert_eq!((c.n(), c.k()), (7, 4));
        assert_eq!(c.min_distance().unwrap(), 3);
        assert_eq!(c.dual().k(), 3);
        assert!(c.contains(&[1, 1, 1, 0, 1, 0, 0]));
        assert!(!c.contains(&[1, 0, 0, 0, 0, 0, 0]));
    }

    #[test]
    fn repetition_and_spc() {
        let l = default_labels(4);
        assert!(LinearCode::repetition(l.clone()).unwrap().is_repetition());
        let s = LinearCode::single_parity_check(l).unwrap();
        assert!(s.is_single_parity_check());
        assert_eq!(s.k(), 3);
    }

    #[test]
    fn factors_of_product() {
        // Interleaved repetition x single parity check, as for a 4-ary root.
        let g = BinaryMatrix::from_strs(&[
            "10101010", "01000001", "00010001", "00000101",
        ])
        .unwrap();
        let c = LinearCode::unlabeled(&g);
        let f = c.cartesian_factors();
        assert_eq!(f, vec![vec![0, 2, 4, 6], vec![1, 3, 5, 7]]);
        assert_eq!(c.factor_complexity(), 1);
        assert_eq!(c.k().min(c.n() - c.k()), 4);
    }

    #[test]
    fn extension_appends_sums() {
        let c = hamming7();
        let e = c.extend(&[vec![5, 6], vec![0, 7]], vec!["p1".into(), "p2".into()]).unwrap();
        for w in e.codewords().unwrap() {
            let b = unpack(&w, 9);
            assert_eq!(b[7], b[5] ^ b[6]);
            assert_eq!(b[8], b[0] ^ b[7]);
        }
        assert_eq!(e.k(), 4);
    }

    #[test]
    fn subcode_small() {
        let c = hamming7();
        let j: Vec<String> = ["c0", "c1", "c2", "c4"].iter().map(|s| s.to_string()).collect();
        let s = c.subcode(&j).unwrap();
        // 1110100 is the only nonzero word supported inside {0,1,2,4}.
        assert_eq!(s.k(), 1);
        assert!(s.contains(&[1, 1, 1, 1]));
    }

    proptest! {
        #[test]
        fn dual_dimensions_and_involution(c in arb_code()) {
            let d = c.dual();
            prop_assert_eq!(c.k() + d.k(), c.n());
            prop_assert_eq!(d.dual(), c);
        }

        #[test]
        fn projection_and_subcode_duality(c in arb_code(), mask in proptest::collection::vec(any::<bool>(), 10)) {
            // (C|_J)^perp = (C^perp)_J
            let j: Vec<String> = c.labels().iter().enumerate()
                .filter(|(i, _)| mask[*i]).map(|(_, l)| l.clone()).collect();
            let lhs = c.project(&j).unwrap().dual();
            let rhs = c.dual().subcode(&j).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn intersection_is_contained(a in arb_code(), b in arb_code()) {
            if a.n() == b.n() {
                let i = a.intersect(&b).unwrap();
                for w in i.codewords().unwrap() {
                    prop_assert!(a.contains_packed(&w));
                    prop_assert!(b.contains_packed(&w));
                }
            }
        }

        #[test]
        fn factors_rebuild_code(c in arb_code()) {
            let f = c.cartesian_factors();
            let mut prod: Option<LinearCode> = None;
            for part in &f {
                let p = c.project_indices(part);
                prod = Some(match prod { None => p, Some(q) => q.product(&p).unwrap() });
            }
            let prod = prod.unwrap();
            prop_assert!(prod.same_code(&c));
        }
    }
}
