//! Tree-inducing cuts and the bounds built on them.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::gf2::{BinaryMatrix, LinearCode};
use crate::model::{GraphicalModel, Port};
use crate::transform::{absorb_spc, rep_insert, remove_internal_model};

/// A tree-inducing cut: its size and, when the graph has at least two
/// vertices, the hidden variables of one such cut.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TiCut {
    pub size: usize,
    pub witness: Option<Vec<String>>,
}

fn label_key(l: &str) -> (usize, &str) {
    (l.len(), l)
}

/// `|E| - |V| + 2` for a connected model, with a witness cut: the edges
/// outside a breadth-first spanning tree plus the tree edge whose removal
/// best balances the two sides (ties to the lowest label).
pub fn ti_cut_size(gm: &GraphicalModel) -> Result<TiCut> {
    let g = gm.graph();
    let (ncomp, _) = g.components();
    if ncomp != 1 {
        return Err(Error::Disconnected);
    }
    let nv = g.n();
    let size = g.edge_count() + 2 - nv;
    if nv < 2 {
        return Ok(TiCut { size, witness: None });
    }
    let (parent, in_tree, order) = bfs_tree(&g);
    let mut sub = vec![1usize; nv];
    for &v in order.iter().rev() {
        if let Some((p, _)) = parent[v] {
            sub[p] += sub[v];
        }
    }
    let labels: Vec<&str> = gm.hiddens().iter().map(|h| h.label.as_str()).collect();
    let best = (1..nv)
        .filter_map(|v| parent[v].map(|(_, e)| (sub[v].min(nv - sub[v]), e)))
        .max_by(|a, b| a.0.cmp(&b.0).then(label_key(labels[b.1]).cmp(&label_key(labels[a.1]))))
        .expect("a tree on two or more vertices has an edge");
    let mut witness: Vec<String> = (0..g.edge_count())
        .filter(|&e| !in_tree[e] || e == best.1)
        .map(|e| labels[e].to_string())
        .collect();
    witness.sort_by(|a, b| label_key(a).cmp(&label_key(b)));
    Ok(TiCut {
        size,
        witness: Some(witness),
    })
}

// Breadth-first spanning tree from vertex 0: parent (vertex, edge), tree
// membership of each edge, visiting order.
#[allow(clippy::type_complexity)]
fn bfs_tree(g: &crate::cycles::Graph) -> (Vec<Option<(usize, usize)>>, Vec<bool>, Vec<usize>) {
    let nv = g.n();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; nv];
    let mut in_tree = vec![false; g.edge_count()];
    let mut seen = vec![false; nv];
    let mut order = Vec::new();
    let mut incident: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nv];
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        incident[a].push((e, b));
        incident[b].push((e, a));
    }
    if nv > 0 {
        seen[0] = true;
        order.push(0);
    }
    let mut q = VecDeque::from([0usize]);
    while let Some(u) = q.pop_front() {
        for &(e, v) in incident.get(u).into_iter().flatten() {
            if !seen[v] {
                seen[v] = true;
                parent[v] = Some((u, e));
                in_tree[e] = true;
                order.push(v);
                q.push_back(v);
            }
        }
    }
    (parent, in_tree, order)
}

/// Checks that removing `cut` leaves exactly two components, each a tree.
pub fn is_tree_inducing(gm: &GraphicalModel, cut: &[String]) -> bool {
    let drop: HashSet<&str> = cut.iter().map(String::as_str).collect();
    let g = gm.graph();
    let keep: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .zip(gm.hiddens())
        .filter(|(_, h)| !drop.contains(h.label.as_str()))
        .map(|(e, _)| *e)
        .collect();
    if keep.len() + cut.len() != g.edge_count() {
        return false;
    }
    let rest = crate::cycles::Graph::from_edges(g.n(), &keep);
    let (k, comp) = rest.components();
    if k != 2 {
        return false;
    }
    (0..2).all(|c| {
        let v = comp.iter().filter(|&&x| x == c).count();
        let e = keep.iter().filter(|&&(a, _)| comp[a] == c).count();
        e + 1 == v
    })
}

pub fn choose2(x: u64) -> u64 {
    x * x.saturating_sub(1) / 2
}

/// Lower bound on the number of cycles of a graph with cut size `x_t`.
pub fn cycle_lower_bound(x_t: usize) -> u64 {
    choose2(x_t as u64)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundContext {
    pub m: usize,
    pub vertices: usize,
    pub edges: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub x_t: usize,
    pub n_cycle_lb: u64,
    /// `m * x_t`.
    pub tree_complexity_ub: usize,
    pub context: BoundContext,
    /// Assumed lower bound on the minimal tree complexity, never computed.
    pub t_lower: Option<usize>,
    /// Cycles any q^m-ary model must have given `t_lower`.
    pub n_m_lb: Option<u64>,
    /// `(r, ceil(t_lower / r))`: least m for a model with at most r(r-1)/2 cycles.
    pub root_threshold: Option<(usize, usize)>,
}

impl BoundReport {
    pub fn with_root(mut self, r: usize) -> Self {
        if let Some(t) = self.t_lower {
            self.root_threshold = Some((r, root_threshold(t, r)));
        }
        self
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "m={}", self.context.m)?;
        writeln!(f, "vertices={}", self.context.vertices)?;
        writeln!(f, "edges={}", self.context.edges)?;
        writeln!(f, "x_t={}", self.x_t)?;
        writeln!(f, "n_cycle_lb={}", self.n_cycle_lb)?;
        writeln!(f, "tree_complexity_ub={}", self.tree_complexity_ub)?;
        if let Some(t) = self.t_lower {
            writeln!(f, "t_lower_assumed={t}")?;
        }
        if let Some(n) = self.n_m_lb {
            writeln!(f, "n_m_lb={n}")?;
        }
        if let Some((r, m)) = self.root_threshold {
            writeln!(f, "root_r={r}")?;
            writeln!(f, "root_m_min={m}")?;
        }
        Ok(())
    }
}

/// Least integer m with `m >= t / r`.
pub fn root_threshold(t: usize, r: usize) -> usize {
    t.div_ceil(r.max(1))
}

pub fn tree_complexity_bounds(m: usize, x_t: usize, t_lower: Option<usize>) -> BoundReport {
    let m = m.max(1);
    BoundReport {
        x_t,
        n_cycle_lb: cycle_lower_bound(x_t),
        tree_complexity_ub: m * x_t,
        context: BoundContext {
            m,
            vertices: 0,
            edges: 0,
        },
        t_lower,
        n_m_lb: t_lower.map(|t| choose2((t / m) as u64)),
        root_threshold: None,
    }
}

/// Bounds for a model, with `m` from its q^m-ary check.
pub fn model_bounds(gm: &GraphicalModel, t_lower: Option<usize>) -> Result<BoundReport> {
    let cut = ti_cut_size(gm)?;
    let t = gm.topology();
    let mut r = tree_complexity_bounds(gm.qm_report().m, cut.size, t_lower);
    r.context.vertices = t.vertices;
    r.context.edges = t.edges;
    Ok(r)
}

/// Wolf's estimate `b (n - k)` of the minimal tree complexity.
pub fn wolf_estimate(n: usize, k: usize, bits_per_symbol: usize) -> usize {
    bits_per_symbol * n.saturating_sub(k)
}

/// Cycle-free model built from a cyclic one by cutting each edge outside a
/// spanning tree and absorbing the parity checks that restore the code.
#[derive(Clone, Debug)]
pub struct TreeConstruction {
    pub model: GraphicalModel,
    /// Parity checks absorbed, columns in `visibles()` order.
    pub checks: BinaryMatrix,
    pub x_t: usize,
    pub m: usize,
}

/// Rows of a parity-check matrix of `small` completing one of `big`'s.
fn complement_checks(big: &LinearCode, small: &LinearCode) -> BinaryMatrix {
    let hb = big.parity_check();
    let hs = small.parity_check();
    let mut acc = hb.clone();
    let mut out = BinaryMatrix::zeros(0, hs.cols());
    for r in 0..hs.rows() {
        let mut t = acc.clone();
        t.push_row(hs.row(r));
        if t.rank() > acc.rank() {
            acc = t;
            out.push_row(hs.row(r));
        }
    }
    out
}

pub fn build_tree_model(gm: &GraphicalModel, dim_cap: usize) -> Result<TreeConstruction> {
    let cut = ti_cut_size(gm)?;
    let m = gm.qm_report().m;
    let target = gm.realized_code(dim_cap)?;
    let mut g = gm.clone();
    let (_, in_tree, _) = bfs_tree(&gm.graph());
    let extra: Vec<String> = gm
        .hiddens()
        .iter()
        .zip(&in_tree)
        .filter(|x| !*x.1)
        .map(|x| x.0.label.clone())
        .collect();
    for l in &extra {
        let with_rep = rep_insert(&g, &Port::Hidden(l.clone()))?;
        let r = with_rep.constraints().last().expect("inserted").id;
        g = remove_internal_model(&with_rep, r)?;
    }
    let base = g.realized_code(dim_cap)?;
    let checks = complement_checks(&base, &target);
    for r in 0..checks.rows() {
        let j: Vec<String> = checks.row_support(r).into_iter().map(|c| g.visibles()[c].clone()).collect();
        g = absorb_spc(&g, &j)?;
    }
    Ok(TreeConstruction {
        model: g,
        checks,
        x_t: cut.size,
        m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::{total_simple_cycles, Graph};
    use crate::fixtures;
    use crate::model::tanner_graph;

    #[test]
    fn cut_sizes() {
        let tb = fixtures::tail_biting_hamming();
        let c = ti_cut_size(&tb).unwrap();
        assert_eq!(c.size, 2);
        assert!(is_tree_inducing(&tb, c.witness.as_ref().unwrap()));
        let cf = fixtures::cycle_free_hamming_minus9();
        assert_eq!(ti_cut_size(&cf).unwrap().size, 1);
        let tg = tanner_graph(&fixtures::ext_hamming8_h(), None).unwrap();
        let h = fixtures::ext_hamming8_h();
        assert_eq!(tg.hiddens().len(), h.weight());
        let c = ti_cut_size(&tg).unwrap();
        assert_eq!(c.size, h.weight() - (h.rows() + h.cols()) + 2);
        assert_eq!(c.size, 6);
        assert!(is_tree_inducing(&tg, c.witness.as_ref().unwrap()));
    }

    #[test]
    fn cycle_bound_below_total() {
        assert_eq!(cycle_lower_bound(2), 1);
        assert_eq!(cycle_lower_bound(1), 0);
        assert_eq!(cycle_lower_bound(6), 15);
        let tg = tanner_graph(&fixtures::ext_hamming8_h(), None).unwrap();
        let g: Graph = tg.graph();
        assert!(total_simple_cycles(&g).unwrap() >= 15);
    }

    #[test]
    fn closed_forms() {
        assert_eq!(tree_complexity_bounds(4, 2, None).tree_complexity_ub, 8);
        let r = tree_complexity_bounds(8, 1, Some(256));
        assert_eq!(r.n_m_lb, Some(496));
        let r = tree_complexity_bounds(1, 1, Some(0));
        assert_eq!((r.tree_complexity_ub, r.n_m_lb), (1, Some(0)));
        assert_eq!(wolf_estimate(255, 223, 8), 256);
        assert_eq!(wolf_estimate(9, 9, 3), 0);
        assert_eq!(wolf_estimate(7, 4, 1), 3);
        assert_eq!(root_threshold(8, 2), 4);
        assert_eq!(root_threshold(9, 2), 5);
        let text = tree_complexity_bounds(4, 2, Some(8)).with_root(2).to_string();
        assert!(text.contains("tree_complexity_ub=8\n") && text.contains("root_m_min=4\n"));
    }

    #[test]
    fn tree_from_tail_biting() {
        let tb = fixtures::tail_biting_hamming();
        let t = build_tree_model(&tb, 24).unwrap();
        assert!(t.model.topology().cycle_free);
        assert_eq!(t.model.realized_code(24).unwrap(), tb.realized_code(24).unwrap());
        assert!(t.model.qm_report().m_hidden <= t.m * t.x_t);
    }

    #[test]
    fn disconnected_is_an_error() {
        let one = |id, v: &str| crate::model::Constraint {
            id,
            ports: vec![Port::Visible(v.into())],
            code: LinearCode::free(vec![crate::model::vcoord(v)]).unwrap(),
        };
        let gm = GraphicalModel {
            visibles: vec!["V1".into(), "V2".into()],
            hiddens: vec![],
            constraints: vec![one(1, "V1"), one(2, "V2")],
        };
        assert_eq!(ti_cut_size(&gm), Err(Error::Disconnected));
    }

    mod props {
        use super::*;
        use crate::random::{random_model, ModelShape};
        use proptest::prelude::*;
        use rand::SeedableRng;
        use rand_chacha::ChaCha8Rng;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn witness_is_tree_inducing(seed in any::<u64>()) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let shape = ModelShape { max_extra_edges: 3, ..ModelShape::default() };
                let gm = random_model(&mut rng, &shape);
                let c = ti_cut_size(&gm).unwrap();
                let t = gm.topology();
                prop_assert_eq!(c.size + t.vertices, t.edges + 2);
                prop_assert!(is_tree_inducing(&gm, c.witness.as_ref().unwrap()));
                prop_assert!(cycle_lower_bound(c.size) <= total_simple_cycles(&gm.graph()).unwrap());
            }

            #[test]
            fn tree_construction_respects_bound(seed in any::<u64>()) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let shape = ModelShape { max_extra_edges: 2, max_behavior_dim: 16, ..ModelShape::default() };
                let gm = random_model(&mut rng, &shape);
                let t = build_tree_model(&gm, 24).unwrap();
                prop_assert!(t.model.topology().cycle_free);
                prop_assert_eq!(t.model.realized_code(24).unwrap(), gm.realized_code(24).unwrap());
                prop_assert!(t.model.qm_report().m_hidden <= t.m * t.x_t);
            }
        }
    }
}
