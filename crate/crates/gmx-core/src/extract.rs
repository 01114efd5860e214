//! Greedy extraction of Tanner graphs, generalized Tanner graphs and
//! 2^m-ary models.

use rayon::prelude::*;

use crate::cycles::{census_graph, census_matrix, CycleCensus};
use crate::error::{Error, Result};
use crate::gf2::matrix::popcount;
use crate::gf2::{BinaryMatrix, GeneralizedExtension, LinearCode};
use crate::model::{ConstraintId, GraphicalModel};
use crate::transform::{merge, ExtractionTrace, StepKind, TransformStep};

/// Cycle lengths counted when ranking Tanner graphs.
pub const CENSUS_LEN: usize = 8;

/// Above these sizes 3- and 4-tuple searches are seeded from the best pairs.
pub const EXHAUSTIVE_LIMIT: usize = 512;
const SEED_PAIRS: usize = 50;

type Key = (usize, std::cmp::Reverse<u64>, std::cmp::Reverse<u64>);

fn and_words(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn count(a: &[u64]) -> usize {
    popcount(a)
}

fn is_subset(j: &[u64], row: &[u64]) -> bool {
    j.iter().zip(row).all(|(a, b)| a & !b == 0)
}

fn column_sets(h: &BinaryMatrix) -> Vec<Vec<u64>> {
    let t = h.transpose();
    (0..t.rows()).map(|r| t.row(r).to_vec()).collect()
}

fn row_sets(h: &BinaryMatrix) -> Vec<Vec<u64>> {
    (0..h.rows()).map(|r| h.row(r).to_vec()).collect()
}

/// Number of 4-cycles in the Tanner graph of `h`.
pub fn n4(h: &BinaryMatrix) -> u64 {
    let rows = row_sets(h);
    let mut total = 0u64;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let c = count(&and_words(&rows[i], &rows[j])) as u64;
            total += c * c.saturating_sub(1) / 2;
        }
    }
    total
}

/// Rows of `h` whose support contains every column of `j`.
pub fn rows_covering(h: &BinaryMatrix, j: &[usize]) -> usize {
    (0..h.rows()).filter(|&r| j.iter().all(|&c| h.get(r, c))).count()
}

// ------------------------------------------------------------------ alg 1

fn key_of(h: &BinaryMatrix) -> Result<Key> {
    Ok(census_matrix(h, CENSUS_LEN)?.key())
}

/// Greedy row-operation search on the Tanner graph of `h`. Each pass tries
/// every `(i, j)` operation `h_j <- h_i + h_j` and keeps the one with the
/// best (girth, fewest girth-cycles, fewest (girth+2)-cycles) key; the pass
/// repeats while that key improves. Operations producing a zero row are
/// skipped.
pub fn alg1_reduce_tanner(h: &BinaryMatrix) -> Result<(BinaryMatrix, ExtractionTrace)> {
    if h.is_zero() {
        return Err(Error::Invalid("parity-check matrix is zero".into()));
    }
    let mut cur = h.clone();
    let mut trace = ExtractionTrace::new();
    trace.header.push("alg1 tanner row operations".into());
    trace.header.push("key refresh: girth and both counts replaced on every accepted improvement".into());
    let mut best = key_of(&cur)?;
    trace.checkpoint(key_text(&census_matrix(&cur, CENSUS_LEN)?));
    let r = cur.rows();
    let pairs: Vec<(usize, usize)> = (0..r).flat_map(|i| (0..r).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    loop {
        let keys: Vec<Option<Key>> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let mut t = cur.clone();
                t.add_row(i, j);
                if t.row_is_zero(j) {
                    return Ok(None);
                }
                key_of(&t).map(Some)
            })
            .collect::<Result<_>>()?;
        let mut pick = None;
        for (p, k) in pairs.iter().zip(&keys) {
            if let Some(k) = k {
                if *k > best {
                    best = *k;
                    pick = Some(*p);
                }
            }
        }
        let Some((i, j)) = pick else { break };
        cur.add_row(i, j);
        let c = census_matrix(&cur, CENSUS_LEN)?;
        log::debug!("alg1 row {i} into row {j}: {}", key_text(&c));
        trace.push(TransformStep::row_op(i, j).with_summary(key_text(&c)));
    }
    Ok((cur, trace))
}

fn key_text(c: &CycleCensus) -> String {
    let counts: Vec<String> = c.counts.iter().map(|(l, n)| format!("n{l}={n}")).collect();
    match c.girth {
        Some(g) => format!("girth={g} {}", counts.join(" ")),
        None => format!("girth=inf {}", counts.join(" ")),
    }
}

// --------------------------------------------------- partial-parity insertion

/// A candidate partial-parity subset and its predicted cut-size reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    /// Column indices of `H_ext`, increasing.
    pub subset: Vec<usize>,
    pub r_of_j: usize,
    /// `(|J| - 1)(r(J) - 1)`; negative when no row covers `J`.
    pub delta_xt: i64,
}

impl Candidate {
    pub fn new(h: &BinaryMatrix, mut subset: Vec<usize>) -> Self {
        subset.sort_unstable();
        let r = rows_covering(h, &subset);
        Candidate {
            delta_xt: (subset.len() as i64 - 1) * (r as i64 - 1),
            r_of_j: r,
            subset,
        }
    }

    /// Coordinate labels: base labels, then `p1, p2, ...`.
    pub fn labels(&self, ext: &GeneralizedExtension) -> Vec<String> {
        let mut all = ext.base.labels().to_vec();
        all.extend(ext.parity_labels());
        self.subset.iter().map(|&c| all[c].clone()).collect()
    }
}

/// Append a partial parity on columns `j`: a new row with support `j` and a
/// unit column at that row; every other row covering `j` then has the new
/// row added to it.
pub fn insert_partial_parity(
    h_ext: &BinaryMatrix,
    ext: &GeneralizedExtension,
    j: &[usize],
) -> Result<(BinaryMatrix, GeneralizedExtension)> {
    let n = h_ext.cols();
    if j.len() < 2 {
        return Err(Error::NotApplicable("a partial parity needs at least two coordinates".into()));
    }
    if let Some(&c) = j.iter().find(|&&c| c >= n) {
        return Err(Error::UnknownCoordinate(format!("column {c}")));
    }
    let mut js = j.to_vec();
    js.sort_unstable();
    js.dedup();
    let covering: Vec<usize> = (0..h_ext.rows()).filter(|&r| js.iter().all(|&c| h_ext.get(r, c))).collect();
    let mut out = h_ext.widen(1);
    let mut p = vec![0u8; n + 1];
    for &c in &js {
        p[c] = 1;
    }
    p[n] = 1;
    out.push_bits(&p);
    let pr = out.rows() - 1;
    for r in covering {
        out.add_row(pr, r);
    }
    let mut e = ext.clone();
    e.parity_defs.push(js);
    Ok((out, e))
}

/// `|E| - |V| + 2` of the Tanner graph of `h`, as if connected.
pub fn matrix_cut_size(h: &BinaryMatrix) -> i64 {
    h.weight() as i64 - (h.rows() + h.cols()) as i64 + 2
}

// ------------------------------------------------------------------ alg 2

/// Lexicographically first `k`-tuple of `sets` (drawn from `pool`) whose
/// intersection is largest, among tuples passing `accept`. Only counts
/// above `above` qualify.
fn best_tuple(
    sets: &[Vec<u64>],
    pool: &[usize],
    k: usize,
    above: Option<usize>,
    accept: &dyn Fn(&[u64]) -> bool,
) -> Option<(Vec<usize>, Vec<u64>)> {
    struct S<'a> {
        sets: &'a [Vec<u64>],
        pool: &'a [usize],
        k: usize,
        bar: Option<usize>,
        best: Option<(Vec<usize>, Vec<u64>)>,
        accept: &'a dyn Fn(&[u64]) -> bool,
    }
    fn go(s: &mut S, start: usize, chosen: &mut Vec<usize>, cur: Option<&[u64]>) {
        for pi in start..s.pool.len() {
            if s.pool.len() - pi < s.k - chosen.len() {
                return;
            }
            let idx = s.pool[pi];
            let next = match cur {
                None => s.sets[idx].clone(),
                Some(c) => and_words(c, &s.sets[idx]),
            };
            let c = count(&next);
            if s.bar.is_some_and(|b| c <= b) {
                continue;
            }
            chosen.push(idx);
            if chosen.len() == s.k {
                if (s.accept)(&next) {
                    s.bar = Some(c);
                    s.best = Some((chosen.clone(), next));
                }
            } else {
                go(s, pi + 1, chosen, Some(&next));
            }
            chosen.pop();
        }
    }
    let mut s = S {
        sets,
        pool,
        k,
        bar: above,
        best: None,
        accept,
    };
    go(&mut s, 0, &mut Vec::new(), None);
    s.best
}

fn seeded_pool(sets: &[Vec<u64>]) -> Vec<usize> {
    let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
    for a in 0..sets.len() {
        for b in a + 1..sets.len() {
            pairs.push((count(&and_words(&sets[a], &sets[b])), a, b));
        }
    }
    pairs.sort_by(|x, y| y.0.cmp(&x.0).then((x.1, x.2).cmp(&(y.1, y.2))));
    let mut pool: Vec<usize> = pairs.iter().take(SEED_PAIRS).flat_map(|p| [p.1, p.2]).collect();
    pool.sort_unstable();
    pool.dedup();
    pool
}

/// Candidate list and whether any tuple search was truncated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidates {
    pub list: Vec<Candidate>,
    pub truncated: bool,
}

/// Candidate partial parities: the best column pair, 3-tuple and 4-tuple by
/// rows covered, and the largest common supports of row pairs, triples and
/// quadruples covered by exactly those rows. The list holds every candidate
/// attaining the largest predicted cut-size reduction seen so far.
pub fn alg2_candidates(h_ext: &BinaryMatrix) -> Candidates {
    let cols = column_sets(h_ext);
    let rows = row_sets(h_ext);
    let mut truncated = false;
    let all_cols: Vec<usize> = (0..cols.len()).collect();
    let all_rows: Vec<usize> = (0..rows.len()).collect();
    let col_pool = if cols.len() > EXHAUSTIVE_LIMIT || rows.len() > EXHAUSTIVE_LIMIT {
        truncated = true;
        seeded_pool(&cols)
    } else {
        all_cols.clone()
    };
    let row_pool = if truncated { seeded_pool(&rows) } else { all_rows.clone() };
    let mut list: Vec<Candidate> = Vec::new();
    let mut best = 0i64;
    let mut offer = |c: Candidate, list: &mut Vec<Candidate>, first: bool| {
        if first || c.delta_xt > best {
            best = c.delta_xt;
            list.clear();
            list.push(c);
        } else if c.delta_xt == best && !list.iter().any(|x| x.subset == c.subset) {
            list.push(c);
        }
    };
    let yes = |_: &[u64]| true;
    let mut first = true;
    for k in 2..=4 {
        let pool = if k == 2 { &all_cols } else { &col_pool };
        if let Some((t, _)) = best_tuple(&cols, pool, k, None, &yes) {
            offer(Candidate::new(h_ext, t), &mut list, first);
            first = false;
        }
    }
    for k in 2..=4 {
        let pool = if k == 2 { &all_rows } else { &row_pool };
        let exact = |j: &[u64]| rows.iter().filter(|r| is_subset(j, r)).count() == k;
        if let Some((_, j)) = best_tuple(&rows, pool, k, Some(1), &exact) {
            let subset: Vec<usize> = (0..h_ext.cols()).filter(|&c| j[c / 64] >> (c % 64) & 1 == 1).collect();
            offer(Candidate::new(h_ext, subset), &mut list, first);
            first = false;
        }
    }
    Candidates { list, truncated }
}

// ------------------------------------------------------------------ alg 3

/// Insert partial parities until the generalized Tanner graph has no
/// 4-cycles. Each step takes the candidate removing the most 4-cycles, ties
/// to the lexicographically lowest subset.
pub fn alg3_extract_gtg(h: &BinaryMatrix) -> Result<(BinaryMatrix, GeneralizedExtension, ExtractionTrace)> {
    if h.is_zero() {
        return Err(Error::Invalid("parity-check matrix is zero".into()));
    }
    let base = LinearCode::from_parity_check(visible_labels(h.cols()), h)?;
    let mut ext = GeneralizedExtension::new(base);
    let mut cur = h.clone();
    let mut trace = ExtractionTrace::new();
    trace.header.push("alg3 generalized tanner graph".into());
    let mut n = n4(&cur);
    trace.checkpoint(format!("n4={n}"));
    while n > 0 {
        let cands = alg2_candidates(&cur);
        if cands.truncated && !trace.header.iter().any(|h| h == "truncated search") {
            trace.header.push("truncated search".into());
        }
        let mut best: Option<(u64, Candidate, BinaryMatrix, GeneralizedExtension)> = None;
        for c in cands.list {
            let (h2, e2) = insert_partial_parity(&cur, &ext, &c.subset)?;
            let after = n4(&h2);
            let better = match &best {
                None => true,
                Some((b, bc, _, _)) => after < *b || (after == *b && c.subset < bc.subset),
            };
            if better {
                best = Some((after, c, h2, e2));
            }
        }
        let (after, c, h2, e2) = best.ok_or_else(|| Error::NotApplicable("no partial-parity candidate".into()))?;
        if c.delta_xt == 0 && after >= n {
            return Err(Error::NotApplicable(format!(
                "no progress: best candidate {:?} leaves {after} 4-cycles",
                c.subset
            )));
        }
        log::debug!("alg3 partial parity {:?}: dxt={} n4={after}", c.subset, c.delta_xt);
        trace.push(TransformStep::partial_parity(&c.subset).with_summary(format!("dxt={} n4={after}", c.delta_xt)));
        cur = h2;
        ext = e2;
        n = after;
    }
    Ok((cur, ext, trace))
}

pub fn visible_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("V{i}")).collect()
}

/// Re-apply matrix-level steps (row operations, partial parities).
pub fn replay_matrix(
    h: &BinaryMatrix,
    ext: &GeneralizedExtension,
    trace: &ExtractionTrace,
) -> Result<(BinaryMatrix, GeneralizedExtension)> {
    let (mut h, mut ext) = (h.clone(), ext.clone());
    for s in &trace.steps {
        match s.kind {
            StepKind::RowOp => {
                let (i, j) = (s.index(0)?, s.index(1)?);
                if i >= h.rows() || j >= h.rows() || i == j {
                    return Err(Error::Parse(format!("row operation {i} {j} out of range")));
                }
                h.add_row(i, j);
            }
            StepKind::PartialParity => {
                let j: Vec<usize> = (0..s.operands.len()).map(|k| s.index(k)).collect::<Result<_>>()?;
                (h, ext) = insert_partial_parity(&h, &ext, &j)?;
            }
            k => return Err(Error::NotApplicable(format!("{k} is not a matrix step"))),
        }
    }
    Ok((h, ext))
}

// ------------------------------------------------------------------ alg 4

fn n4_model(gm: &GraphicalModel) -> Result<u64> {
    Ok(census_graph(&gm.graph(), 4)?.count(4).unwrap_or(0))
}

/// Greedy merging of same-class constraint pairs while the model stays
/// 2^m_star-ary, taking at each step the merge removing the most 4-cycles
/// (ties to the lowest id pair). Classes are the two sides of the
/// bipartite constraint graph.
pub fn alg4_extract_gm(tg: &GraphicalModel, m_star: usize) -> Result<(GraphicalModel, ExtractionTrace)> {
    if m_star == 0 {
        return Err(Error::Invalid("m_star must be at least 1".into()));
    }
    let mut gm = tg.clone();
    let mut trace = ExtractionTrace::new();
    trace.header.push(format!("alg4 merge m_star={m_star}"));
    let mut cur = n4_model(&gm)?;
    trace.checkpoint(format!("n4={cur}"));
    loop {
        let g = gm.graph();
        let color = g.bipartition().ok_or(Error::NotBipartite)?;
        let ids = gm.constraint_ids();
        let mut pairs: Vec<(ConstraintId, ConstraintId)> = Vec::new();
        for a in 0..ids.len() {
            for b in a + 1..ids.len() {
                if color[a] != color[b] {
                    continue;
                }
                let na: Vec<usize> = g.neighbors(a).to_vec();
                if g.neighbors(b).iter().any(|x| na.contains(x)) {
                    let (x, y) = (ids[a].min(ids[b]), ids[a].max(ids[b]));
                    pairs.push((x, y));
                }
            }
        }
        pairs.sort_unstable();
        let results: Vec<Option<(u64, GraphicalModel)>> = pairs
            .par_iter()
            .map(|&(a, b)| {
                let m = merge(&gm, a, b)?;
                if !m.verify_qm(m_star) {
                    return Ok(None);
                }
                let n = n4_model(&m)?;
                Ok((n < cur).then_some((n, m)))
            })
            .collect::<Result<_>>()?;
        let mut best: Option<(usize, u64)> = None;
        for (i, r) in results.iter().enumerate() {
            if let Some((n, _)) = r {
                if best.map_or(true, |b| *n < b.1) {
                    best = Some((i, *n));
                }
            }
        }
        let Some((i, n)) = best else { break };
        let (a, b) = pairs[i];
        gm = results[i].as_ref().expect("chosen").1.clone();
        log::debug!("alg4 merge {a} {b}: n4={n}");
        trace.push(TransformStep::merge(a, b).with_summary(format!("n4={n}")));
        cur = n;
    }
    Ok((gm, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::ti_cut_size;
    use crate::fixtures;
    use crate::model::tanner_graph;
    use crate::random::random_parity_check;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ext_of(h: &BinaryMatrix) -> GeneralizedExtension {
        GeneralizedExtension::new(LinearCode::from_parity_check(visible_labels(h.cols()), h).unwrap())
    }

    // Largest (|J|-1)(r(J)-1) over every subset with |J| <= 4 or r(J) <= 4.
    fn brute_best_delta(h: &BinaryMatrix) -> usize {
        let n = h.cols();
        let mut best = 0;
        for mask in 1u32..(1 << n) {
            let j: Vec<usize> = (0..n).filter(|&c| mask >> c & 1 == 1).collect();
            if j.len() < 2 {
                continue;
            }
            let r = rows_covering(h, &j);
            if j.len() <= 4 || (2..=4).contains(&r) {
                best = best.max((j.len() - 1) * r.saturating_sub(1));
            }
        }
        best
    }

    #[test]
    fn n4_matches_census() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let h = random_parity_check(&mut rng, 12, 5);
            assert_eq!(Some(n4(&h)), census_matrix(&h, 4).unwrap().count(4));
        }
        assert_eq!(n4(&fixtures::ebch32_21_h()), 1128);
    }

    #[test]
    fn alg1_fixed_point() {
        let h = BinaryMatrix::from_strs(&["1100", "0011"]).unwrap();
        let (out, trace) = alg1_reduce_tanner(&h).unwrap();
        assert_eq!(out, h);
        assert!(trace.is_empty());
    }

    #[test]
    fn alg1_first_step_is_optimal() {
        let h = BinaryMatrix::from_strs(&["110100", "011010", "110011"]).unwrap();
        let mut keys = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    let mut t = h.clone();
                    t.add_row(i, j);
                    keys.push(census_matrix(&t, 8).unwrap().key());
                }
            }
        }
        assert_eq!(keys.len(), 6);
        let best = *keys.iter().max().unwrap();
        let (out, trace) = alg1_reduce_tanner(&h).unwrap();
        assert!(!trace.is_empty());
        let (i, j) = (trace.steps[0].index(0).unwrap(), trace.steps[0].index(1).unwrap());
        let mut t = h.clone();
        t.add_row(i, j);
        assert_eq!(census_matrix(&t, 8).unwrap().key(), best);
        assert_eq!(out.rank(), h.rank());
        assert!(out.row_space_within(&h) && h.row_space_within(&out));
        let (re, _) = replay_matrix(&h, &ext_of(&h), &trace).unwrap();
        assert_eq!(re, out);
    }

    #[test]
    fn insertion_cut_size_law() {
        // Columns 0 and 1 covered by three rows.
        let h = BinaryMatrix::from_strs(&["110100", "111010", "110001", "001111"]).unwrap();
        let e = ext_of(&h);
        let before = ti_cut_size(&tanner_graph(&h, None).unwrap()).unwrap().size;
        let (h2, e2) = insert_partial_parity(&h, &e, &[0, 1]).unwrap();
        let after = ti_cut_size(&tanner_graph(&h2, None).unwrap()).unwrap().size;
        assert_eq!(before - after, 2);
        assert_eq!(h2.weight(), h.weight());
        assert_eq!(e2.degree(), 1);
        assert_eq!(LinearCode::from_parity_check(e2.extended_code().unwrap().labels().to_vec(), &h2).unwrap(), e2.extended_code().unwrap());
        // Covered by one row: legal, no gain.
        let (h3, _) = insert_partial_parity(&h, &e, &[3, 4]).unwrap();
        assert_eq!(matrix_cut_size(&h3), matrix_cut_size(&h));
        assert!(matches!(insert_partial_parity(&h, &e, &[0, 9]), Err(Error::UnknownCoordinate(_))));
    }

    #[test]
    fn identical_rows_give_row_pair_candidate() {
        let h = BinaryMatrix::from_strs(&["11110000", "11110000", "00001111"]).unwrap();
        let c = alg2_candidates(&h);
        assert!(c.list.iter().any(|c| c.subset == vec![0, 1, 2, 3] && c.delta_xt == 3));
        assert!(!c.truncated);
    }

    #[test]
    fn alg3_small_and_trivial() {
        let h = BinaryMatrix::from_strs(&["1100", "0011"]).unwrap();
        let (out, ext, trace) = alg3_extract_gtg(&h).unwrap();
        assert_eq!((out, ext.degree(), trace.len()), (h, 0, 0));
        let h = fixtures::ext_hamming8_h();
        let (out, ext, trace) = alg3_extract_gtg(&h).unwrap();
        assert_eq!(n4(&out), 0);
        assert_eq!(census_matrix(&out, 4).unwrap().count(4), Some(0));
        assert_eq!(ext.degree(), trace.len());
        let gtg = crate::model::build_gtg(&ext, &out).unwrap();
        assert_eq!(gtg.realized_code(24).unwrap(), LinearCode::from_parity_check(visible_labels(8), &h).unwrap().relabel(gtg.realized_code(24).unwrap().labels().to_vec()).unwrap());
        let (re, rext) = replay_matrix(&h, &ext_of(&h), &trace).unwrap();
        assert_eq!((re, rext), (out, ext));
    }

    #[test]
    fn golay_candidates_match_exhaustive() {
        let h = fixtures::golay23_h();
        let c = alg2_candidates(&h);
        assert!(!c.list.is_empty());
        let n = h.cols();
        let mut best = 0;
        let cols: Vec<usize> = (0..n).collect();
        for a in 0..n {
            for b in a + 1..n {
                best = best.max(rows_covering(&h, &[a, b]).saturating_sub(1));
                for c3 in b + 1..n {
                    best = best.max(2 * rows_covering(&h, &[a, b, c3]).saturating_sub(1));
                    for d in c3 + 1..n {
                        best = best.max(3 * rows_covering(&h, &[a, b, c3, d]).saturating_sub(1));
                    }
                }
            }
        }
        let r = h.rows();
        let tuples = (0..r).flat_map(|a| (a + 1..r).map(move |b| vec![a, b]));
        let mut all: Vec<Vec<usize>> = tuples.collect();
        for a in 0..r {
            for b in a + 1..r {
                for c3 in b + 1..r {
                    all.push(vec![a, b, c3]);
                    for d in c3 + 1..r {
                        all.push(vec![a, b, c3, d]);
                    }
                }
            }
        }
        for t in all {
            let j: Vec<usize> = cols.iter().copied().filter(|&c| t.iter().all(|&row| h.get(row, c))).collect();
            if j.len() >= 2 && rows_covering(&h, &j) == t.len() {
                best = best.max((t.len() - 1) * (j.len() - 1));
            }
        }
        assert!(c.list.iter().all(|x| x.delta_xt == best as i64));
    }

    #[test]
    fn alg4_on_hamming() {
        let h = fixtures::ext_hamming8_h();
        let tg = tanner_graph(&h, None).unwrap();
        let code = tg.realized_code(24).unwrap();
        let (one, _) = alg4_extract_gm(&tg, 1).unwrap();
        assert_eq!(one.realized_code(24).unwrap(), code);
        let (gm, trace) = alg4_extract_gm(&tg, 2).unwrap();
        assert!(gm.verify_qm(2));
        assert_eq!(gm.realized_code(24).unwrap(), code);
        assert!(gm.graph().bipartition().is_some());
        let mut prev = n4_model(&tg).unwrap();
        for s in &trace.steps {
            let n: u64 = s.summary.trim_start_matches("n4=").parse().unwrap();
            assert!(n < prev);
            prev = n;
        }
        assert_eq!(prev, n4_model(&gm).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn cut_size_law_holds(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(5..12);
            let k = rng.gen_range(1..n - 1);
            let h = random_parity_check(&mut rng, n, k);
            let size = rng.gen_range(2..=4.min(n));
            let mut j: Vec<usize> = (0..n).collect();
            for i in 0..size {
                let k = rng.gen_range(i..n);
                j.swap(i, k);
            }
            j.truncate(size);
            let c = Candidate::new(&h, j.clone());
            let (h2, _) = insert_partial_parity(&h, &ext_of(&h), &j).unwrap();
            prop_assert_eq!(matrix_cut_size(&h) - matrix_cut_size(&h2), c.delta_xt);
        }

        #[test]
        fn candidates_reach_exhaustive_best(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(4..10);
            let k = rng.gen_range(1..n - 1);
            let h = random_parity_check(&mut rng, n, k);
            let c = alg2_candidates(&h);
            let best = brute_best_delta(&h);
            prop_assert!(!c.list.is_empty());
            for x in &c.list {
                prop_assert_eq!(x.delta_xt, best as i64);
                prop_assert_eq!(x.r_of_j, rows_covering(&h, &x.subset));
            }
        }

        #[test]
        fn alg3_removes_all_4_cycles(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(4..12);
            let k = rng.gen_range(1..n - 1);
            let h = random_parity_check(&mut rng, n, k);
            let (out, ext, _) = alg3_extract_gtg(&h).unwrap();
            prop_assert_eq!(n4(&out), 0);
            let full = LinearCode::from_parity_check(ext.extended_code().unwrap().labels().to_vec(), &out).unwrap();
            prop_assert_eq!(&full, &ext.extended_code().unwrap());
            prop_assert_eq!(full.project(&visible_labels(n)).unwrap(), ext.base.clone());
        }
    }
}
