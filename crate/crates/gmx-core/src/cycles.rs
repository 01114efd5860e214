//! Girth and exact counts of 4-, 6- and 8-cycles in bipartite graphs.
//!
//! Counting works on the biadjacency bitsets: a 2k-cycle alternates k
//! vertices of each class, so it is fixed by a cyclic sequence of k rows
//! together with distinct columns shared by consecutive rows. Distinctness
//! is handled by inclusion-exclusion over set partitions of the column
//! slots.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::gf2::matrix::{popcount, set_bit, words_for};
use crate::gf2::BinaryMatrix;
use crate::model::GraphicalModel;

/// Undirected graph stored as adjacency lists plus the edge list.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        Graph {
            adj,
            edges: edges.to_vec(),
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    /// Component index of every vertex.
    pub fn components(&self) -> (usize, Vec<usize>) {
        let mut comp = vec![usize::MAX; self.n()];
        let mut k = 0;
        for s in 0..self.n() {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = k;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for &v in &self.adj[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = k;
                        q.push_back(v);
                    }
                }
            }
            k += 1;
        }
        (k, comp)
    }

    pub fn is_forest(&self) -> bool {
        let (k, _) = self.components();
        !self.has_self_loops() && self.edges.len() + k == self.n()
    }

    fn has_self_loops(&self) -> bool {
        self.edges.iter().any(|&(a, b)| a == b)
    }

    pub fn has_parallel_edges(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.edges.iter().any(|&(a, b)| !seen.insert((a.min(b), a.max(b))))
    }

    /// Two-coloring with class 0 on the lowest vertex of each component.
    pub fn bipartition(&self) -> Option<Vec<u8>> {
        let mut color = vec![u8::MAX; self.n()];
        for s in 0..self.n() {
            if color[s] != u8::MAX {
                continue;
            }
            color[s] = 0;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for &v in &self.adj[u] {
                    if color[v] == u8::MAX {
                        color[v] = 1 - color[u];
                        q.push_back(v);
                    } else if color[v] == color[u] {
                        return None;
                    }
                }
            }
        }
        Some(color)
    }

    /// Exact girth by breadth-first search from every vertex. Parallel
    /// edges count as 2-cycles.
    pub fn girth(&self) -> Option<usize> {
        if self.has_self_loops() {
            return Some(1);
        }
        if self.has_parallel_edges() {
            return Some(2);
        }
        let mut best = usize::MAX;
        let mut dist = vec![usize::MAX; self.n()];
        let mut parent = vec![usize::MAX; self.n()];
        for s in 0..self.n() {
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            dist[s] = 0;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                if 2 * dist[u] + 1 >= best {
                    break;
                }
                for &v in &self.adj[u] {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        parent[v] = u;
                        q.push_back(v);
                    } else if parent[u] != v {
                        best = best.min(dist[u] + dist[v] + 1);
                    }
                }
            }
        }
        (best != usize::MAX).then_some(best)
    }
}

/// Girth and exact cycle counts for every even length `4..=max_len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleCensus {
    /// `None` for an acyclic graph.
    pub girth: Option<usize>,
    pub max_len: usize,
    pub counts: BTreeMap<usize, u64>,
}

impl CycleCensus {
    /// Count of cycles of length `len`, if it was computed.
    pub fn count(&self, len: usize) -> Option<u64> {
        self.counts.get(&len).copied()
    }

    pub fn n_g(&self) -> Option<u64> {
        self.girth.and_then(|g| self.count(g))
    }

    pub fn n_g2(&self) -> Option<u64> {
        self.girth.and_then(|g| self.count(g + 2))
    }

    /// Sort key for "better" graphs: larger girth, then fewer girth-cycles,
    /// then fewer (girth+2)-cycles. Counts beyond `max_len` compare as 0.
    pub fn key(&self) -> (usize, std::cmp::Reverse<u64>, std::cmp::Reverse<u64>) {
        use std::cmp::Reverse;
        match self.girth {
            None => (usize::MAX, Reverse(0), Reverse(0)),
            Some(g) => (g, Reverse(self.n_g().unwrap_or(0)), Reverse(self.n_g2().unwrap_or(0))),
        }
    }

    /// `girth,N_g,N_{g+2}[,N_{g+4}]` restricted to computed lengths.
    pub fn csv_row(&self) -> String {
        let mut out = Vec::new();
        match self.girth {
            None => {
                out.push("inf".to_string());
                out.extend(self.counts.values().take(2).map(|c| c.to_string()));
            }
            Some(g) => {
                out.push(g.to_string());
                for l in [g, g + 2, g + 4] {
                    if let Some(c) = self.count(l) {
                        out.push(c.to_string());
                    }
                }
            }
        }
        out.join(",")
    }
}

impl fmt::Display for CycleCensus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.girth {
            None => write!(f, "girth=inf")?,
            Some(g) => write!(f, "girth={g}")?,
        }
        for (l, c) in &self.counts {
            write!(f, " N{l}={c}")?;
        }
        Ok(())
    }
}

fn check_max_len(max_len: usize) -> Result<()> {
    if !matches!(max_len, 4 | 6 | 8) {
        return Err(Error::Invalid(format!("max_len must be 4, 6 or 8, got {max_len}")));
    }
    Ok(())
}

fn choose2(x: u64) -> u64 {
    x * x.saturating_sub(1) / 2
}

// Set partitions of the four column slots of an 8-cycle, as slot masks,
// with their Moebius coefficients.
fn partitions4() -> Vec<(i64, Vec<u8>)> {
    fn rec(i: usize, blocks: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if i == 4 {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b] |= 1 << i;
            rec(i + 1, blocks, out);
            blocks[b] &= !(1 << i);
        }
        blocks.push(1 << i);
        rec(i + 1, blocks, out);
        blocks.pop();
    }
    let mut all = Vec::new();
    rec(0, &mut Vec::new(), &mut all);
    all.into_iter()
        .map(|p| {
            let mu = p
                .iter()
                .map(|b| match b.count_ones() {
                    1 => 1,
                    2 => -1,
                    3 => 2,
                    _ => -6,
                })
                .product();
            (mu, p)
        })
        .collect()
}

/// Census of the bipartite graph whose biadjacency rows are `rows`
/// (bitsets over `cols` column vertices). Rows are the class iterated over,
/// so callers pass the smaller class as rows.
pub fn census_biadjacency(rows: &[Vec<u64>], cols: usize, max_len: usize) -> Result<CycleCensus> {
    check_max_len(max_len)?;
    let r = rows.len();
    let stride = words_for(cols);
    let and_count = |a: &[u64], b: &[u64]| -> u64 { a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as u64).sum() };
    let mut pair = vec![0u64; r * r];
    for i in 0..r {
        for j in i + 1..r {
            let c = and_count(&rows[i], &rows[j]);
            pair[i * r + j] = c;
            pair[j * r + i] = c;
        }
    }
    let mut counts = BTreeMap::new();
    let n4: u64 = (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).map(|(i, j)| choose2(pair[i * r + j])).sum();
    counts.insert(4, n4);
    let mut tmp = vec![0u64; stride];
    if max_len >= 6 {
        let mut n6: i64 = 0;
        for i in 0..r {
            for j in i + 1..r {
                let cij = pair[i * r + j];
                if cij == 0 {
                    continue;
                }
                for (t, w) in tmp.iter_mut().enumerate() {
                    *w = rows[i][t] & rows[j][t];
                }
                for k in j + 1..r {
                    let (cjk, cki) = (pair[j * r + k], pair[k * r + i]);
                    if cjk == 0 || cki == 0 {
                        continue;
                    }
                    let t = and_count(&tmp, &rows[k]) as i64;
                    let (a, b, c) = (cij as i64, cjk as i64, cki as i64);
                    n6 += a * b * c - t * (a + b + c) + 2 * t;
                }
            }
        }
        counts.insert(6, n6 as u64);
    }
    if max_len >= 8 {
        let parts = partitions4();
        // The three cyclic orders of four rows up to rotation and reflection.
        let orders: [[usize; 4]; 3] = [[0, 1, 2, 3], [0, 1, 3, 2], [0, 2, 1, 3]];
        let mut n8: i64 = 0;
        let mut inter = [0i64; 16];
        let mut acc = vec![vec![0u64; stride]; 16];
        for a in 0..r {
            for b in a + 1..r {
                for c in b + 1..r {
                    for d in c + 1..r {
                        let q = [a, b, c, d];
                        let live = orders.iter().any(|o| {
                            (0..4).all(|s| pair[q[o[s]] * r + q[o[(s + 1) % 4]]] > 0)
                        });
                        if !live {
                            continue;
                        }
                        for mask in 1usize..16 {
                            let low = mask.trailing_zeros() as usize;
                            let rest = mask & (mask - 1);
                            if rest == 0 {
                                acc[mask].copy_from_slice(&rows[q[low]]);
                            } else {
                                let (head, tail) = acc.split_at_mut(mask);
                                for (t, w) in tail[0].iter_mut().enumerate() {
                                    *w = head[rest][t] & rows[q[low]][t];
                                }
                            }
                            inter[mask] = popcount(&acc[mask]) as i64;
                        }
                        for o in &orders {
                            // Slot s sits between rows o[s] and o[s+1].
                            let slot_rows: [usize; 4] =
                                std::array::from_fn(|s| (1 << o[s]) | (1 << o[(s + 1) % 4]));
                            if slot_rows.iter().any(|&m| inter[m] == 0) {
                                continue;
                            }
                            for (mu, p) in &parts {
                                let mut prod = *mu;
                                for &blk in p {
                                    let mut m = 0;
                                    for (s, sr) in slot_rows.iter().enumerate() {
                                        if blk & (1 << s) != 0 {
                                            m |= sr;
                                        }
                                    }
                                    prod *= inter[m];
                                    if prod == 0 {
                                        break;
                                    }
                                }
                                n8 += prod;
                            }
                        }
                    }
                }
            }
        }
        counts.insert(8, n8 as u64);
    }
    let girth = counts.iter().find(|(_, &c)| c > 0).map(|(&l, _)| l);
    let girth = match girth {
        Some(g) => Some(g),
        None => bipartite_girth(rows, cols),
    };
    Ok(CycleCensus { girth, max_len, counts })
}

fn bipartite_girth(rows: &[Vec<u64>], cols: usize) -> Option<usize> {
    let r = rows.len();
    let mut edges = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        for c in crate::gf2::matrix::ones(row) {
            if c < cols {
                edges.push((i, r + c));
            }
        }
    }
    Graph::from_edges(r + cols, &edges).girth()
}

/// Census of the Tanner graph of `h` (rows = checks, columns = symbols).
pub fn census_matrix(h: &BinaryMatrix, max_len: usize) -> Result<CycleCensus> {
    let m = if h.rows() <= h.cols() { h.clone() } else { h.transpose() };
    let rows: Vec<Vec<u64>> = (0..m.rows()).map(|r| m.row(r).to_vec()).collect();
    census_biadjacency(&rows, m.cols(), max_len)
}

/// Census of a simple bipartite graph.
pub fn census_graph(g: &Graph, max_len: usize) -> Result<CycleCensus> {
    check_max_len(max_len)?;
    if g.has_parallel_edges() {
        return Err(Error::Multigraph);
    }
    let color = g.bipartition().ok_or(Error::NotBipartite)?;
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (v, &c) in color.iter().enumerate() {
        if c == 0 {
            a.push(v)
        } else {
            b.push(v)
        }
    }
    if a.len() > b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    let mut col_index = vec![usize::MAX; g.n()];
    for (i, &v) in b.iter().enumerate() {
        col_index[v] = i;
    }
    let stride = words_for(b.len());
    let rows: Vec<Vec<u64>> = a
        .iter()
        .map(|&u| {
            let mut w = vec![0u64; stride];
            for &v in g.neighbors(u) {
                set_bit(&mut w, col_index[v], true);
            }
            w
        })
        .collect();
    census_biadjacency(&rows, b.len(), max_len)
}

/// Census of the constraint graph of a model; half-edges play no part.
pub fn census(gm: &GraphicalModel, max_len: usize) -> Result<CycleCensus> {
    census_graph(&gm.graph(), max_len)
}

/// Largest graph accepted by the exhaustive oracle.
pub const BRUTE_FORCE_MAX_VERTICES: usize = 20;

// Calls `f(len)` once per direction of every simple cycle of length
// `3..=limit`, rooted at its lowest vertex.
fn for_each_cycle(g: &Graph, limit: usize, f: &mut impl FnMut(usize)) {
    fn dfs(g: &Graph, s: usize, u: usize, len: usize, limit: usize, on: &mut [bool], f: &mut impl FnMut(usize)) {
        for &v in g.neighbors(u) {
            if v == s && len >= 3 {
                f(len);
            } else if v > s && !on[v] && len < limit {
                on[v] = true;
                dfs(g, s, v, len + 1, limit, on, f);
                on[v] = false;
            }
        }
    }
    let mut on = vec![false; g.n()];
    for s in 0..g.n() {
        on[s] = true;
        dfs(g, s, s, 1, limit, &mut on, f);
        on[s] = false;
    }
}

/// Exhaustive census of a simple graph by rooted depth-first search.
pub fn brute_force_graph(g: &Graph, max_len: usize) -> Result<CycleCensus> {
    check_max_len(max_len)?;
    if g.n() > BRUTE_FORCE_MAX_VERTICES {
        return Err(Error::TooLarge(format!("{} vertices", g.n())));
    }
    if g.has_parallel_edges() {
        return Err(Error::Multigraph);
    }
    let mut raw = vec![0u64; max_len + 1];
    for_each_cycle(g, max_len, &mut |l| raw[l] += 1);
    let counts: BTreeMap<usize, u64> = (4..=max_len).step_by(2).map(|l| (l, raw[l] / 2)).collect();
    let odd = (3..=max_len).step_by(2).find(|&l| raw[l] > 0);
    let even = counts.iter().find(|(_, &c)| c > 0).map(|(&l, _)| l);
    let girth = match (odd, even) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (Some(a), None) => Some(a),
        (None, Some(b)) => Some(b),
        (None, None) => g.girth(),
    };
    Ok(CycleCensus { girth, max_len, counts })
}

pub fn brute_force_census(gm: &GraphicalModel, max_len: usize) -> Result<CycleCensus> {
    brute_force_graph(&gm.graph(), max_len)
}

/// Number of simple cycles of any length.
pub fn total_simple_cycles(g: &Graph) -> Result<u64> {
    if g.n() > BRUTE_FORCE_MAX_VERTICES {
        return Err(Error::TooLarge(format!("{} vertices", g.n())));
    }
    let mut total = 0u64;
    for_each_cycle(g, g.n(), &mut |_| total += 1);
    let parallel = {
        let mut m = std::collections::HashMap::new();
        for &(a, b) in g.edges() {
            *m.entry((a.min(b), a.max(b))).or_insert(0u64) += 1;
        }
        m.values().map(|&k| choose2(k)).sum::<u64>()
    };
    Ok(total / 2 + parallel)
}
