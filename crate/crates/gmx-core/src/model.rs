//! Normal realizations: constraints are vertices, hidden variables are edges
//! and visible variables are half-edges.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use crate::cycles::Graph;
use crate::error::{Error, Result};
use crate::gf2::{BinaryMatrix, LinearCode};

pub type ConstraintId = u32;

/// Default cap on behavior dimension.
pub const DEFAULT_DIM_CAP: usize = 24;

/// A variable bound by a constraint.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Port {
    Visible(String),
    Hidden(String),
}

impl Port {
    pub fn label(&self) -> &str {
        match self {
            Port::Visible(l) | Port::Hidden(l) => l,
        }
    }

    pub fn is_hidden(&self) -> bool {
        matches!(self, Port::Hidden(_))
    }

    /// Parse `v:LABEL` or `h:LABEL`.
    pub fn parse(s: &str) -> Result<Port> {
        if let Some(l) = s.strip_prefix("v:") {
            Ok(Port::Visible(l.to_string()))
        } else if let Some(l) = s.strip_prefix("h:") {
            Ok(Port::Hidden(l.to_string()))
        } else {
            Err(Error::Parse(format!("port {s:?} must start with v: or h:")))
        }
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Port::Visible(l) => write!(f, "v:{l}"),
            Port::Hidden(l) => write!(f, "h:{l}"),
        }
    }
}

/// Coordinate label of a visible variable inside local codes and behaviors.
pub fn vcoord(label: &str) -> String {
    format!("v:{label}")
}

/// Coordinate label of component `c` of a hidden variable.
pub fn hcoord(label: &str, c: usize) -> String {
    format!("h:{label}.{c}")
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HiddenVar {
    pub label: String,
    /// Alphabet index set size |T|; the alphabet is F_2^size.
    pub size: usize,
    pub ends: [ConstraintId; 2],
}

impl HiddenVar {
    pub fn other_end(&self, c: ConstraintId) -> ConstraintId {
        if self.ends[0] == c {
            self.ends[1]
        } else {
            self.ends[0]
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub id: ConstraintId,
    pub ports: Vec<Port>,
    /// Local code over the expanded port coordinates, in port order.
    pub code: LinearCode,
}

impl Constraint {
    pub fn is_interface(&self) -> bool {
        self.ports.iter().any(|p| !p.is_hidden())
    }

    /// Number of hidden ports (edges incident on this vertex).
    pub fn degree(&self) -> usize {
        self.ports.iter().filter(|p| p.is_hidden()).count()
    }

    pub fn hidden_labels(&self) -> impl Iterator<Item = &str> {
        self.ports.iter().filter_map(|p| match p {
            Port::Hidden(l) => Some(l.as_str()),
            _ => None,
        })
    }

    pub fn visible_labels(&self) -> impl Iterator<Item = &str> {
        self.ports.iter().filter_map(|p| match p {
            Port::Visible(l) => Some(l.as_str()),
            _ => None,
        })
    }

    pub fn is_trivial(&self) -> bool {
        self.ports.is_empty()
    }
}

/// Summary of the constraint graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Topology {
    pub vertices: usize,
    pub edges: usize,
    pub connected: bool,
    pub cycle_free: bool,
}

/// Outcome of the q^m-ary check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QmReport {
    /// Largest hidden alphabet index set size.
    pub m_hidden: usize,
    /// Largest constraint complexity after Cartesian decomposition.
    pub m_constraint: usize,
    /// `max(m_hidden, m_constraint)`: the smallest m for which the model is q^m-ary.
    pub m: usize,
    /// Constraints with complexity `m_constraint`.
    pub worst_constraints: Vec<ConstraintId>,
}

impl QmReport {
    pub fn passes(&self, m: usize) -> bool {
        self.m <= m
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphicalModel {
    pub(crate) visibles: Vec<String>,
    pub(crate) hiddens: Vec<HiddenVar>,
    pub(crate) constraints: Vec<Constraint>,
}

/// Expanded coordinate labels of a port list.
pub(crate) fn expand_ports(ports: &[Port], size_of: impl Fn(&str) -> Option<usize>) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for p in ports {
        match p {
            Port::Visible(l) => out.push(vcoord(l)),
            Port::Hidden(l) => {
                let t = size_of(l).ok_or_else(|| Error::Invalid(format!("unknown hidden variable {l}")))?;
                out.extend((0..t).map(|c| hcoord(l, c)));
            }
        }
    }
    Ok(out)
}

fn numeric_suffix(label: &str, prefix: &str) -> Option<u64> {
    label.strip_prefix(prefix).and_then(|r| r.parse().ok())
}

impl GraphicalModel {
    /// Build and validate, including connectivity.
    pub fn new(visibles: Vec<String>, hiddens: Vec<HiddenVar>, constraints: Vec<Constraint>) -> Result<Self> {
        let gm = GraphicalModel {
            visibles,
            hiddens,
            constraints,
        };
        gm.validate(true)?;
        Ok(gm)
    }

    pub fn visibles(&self) -> &[String] {
        &self.visibles
    }

    pub fn hiddens(&self) -> &[HiddenVar] {
        &self.hiddens
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn constraint_ids(&self) -> Vec<ConstraintId> {
        self.constraints.iter().map(|c| c.id).collect()
    }

    pub fn constraint(&self, id: ConstraintId) -> Result<&Constraint> {
        self.constraints
            .iter()
            .find(|c| c.id == id)
            .ok_or_else(|| Error::UnknownConstraint(id.to_string()))
    }

    pub(crate) fn constraint_pos(&self, id: ConstraintId) -> Result<usize> {
        self.constraints
            .iter()
            .position(|c| c.id == id)
            .ok_or_else(|| Error::UnknownConstraint(id.to_string()))
    }

    pub(crate) fn constraint_mut(&mut self, id: ConstraintId) -> Result<&mut Constraint> {
        let p = self.constraint_pos(id)?;
        Ok(&mut self.constraints[p])
    }

    pub fn hidden(&self, label: &str) -> Result<&HiddenVar> {
        self.hiddens
            .iter()
            .find(|h| h.label == label)
            .ok_or_else(|| Error::UnknownVariable(label.to_string()))
    }

    pub(crate) fn hidden_mut(&mut self, label: &str) -> Result<&mut HiddenVar> {
        self.hiddens
            .iter_mut()
            .find(|h| h.label == label)
            .ok_or_else(|| Error::UnknownVariable(label.to_string()))
    }

    pub fn hidden_size(&self, label: &str) -> Option<usize> {
        self.hiddens.iter().find(|h| h.label == label).map(|h| h.size)
    }

    /// Constraint binding a visible variable.
    pub fn visible_owner(&self, label: &str) -> Result<ConstraintId> {
        self.constraints
            .iter()
            .find(|c| c.visible_labels().any(|l| l == label))
            .map(|c| c.id)
            .ok_or_else(|| Error::UnknownVariable(label.to_string()))
    }

    /// `(hidden label, neighbor id)` for each hidden port, in port order.
    pub fn neighbors(&self, id: ConstraintId) -> Result<Vec<(String, ConstraintId)>> {
        let c = self.constraint(id)?;
        c.hidden_labels()
            .map(|l| Ok((l.to_string(), self.hidden(l)?.other_end(id))))
            .collect()
    }

    pub fn port_coords(&self, ports: &[Port]) -> Result<Vec<String>> {
        expand_ports(ports, |l| self.hidden_size(l))
    }

    /// Fresh hidden label `S<k>` with k above every existing `S<digits>` label.
    pub fn fresh_hidden_label(&self) -> String {
        let max = self
            .hiddens
            .iter()
            .filter_map(|h| numeric_suffix(&h.label, "S"))
            .max()
            .unwrap_or(0);
        format!("S{}", max + 1)
    }

    pub fn fresh_constraint_id(&self) -> ConstraintId {
        self.constraints.iter().map(|c| c.id).max().map_or(1, |m| m + 1)
    }

    /// Check every structural invariant. Connectivity ignores constraints
    /// with no ports.
    pub fn validate(&self, require_connected: bool) -> Result<()> {
        let mut vis = HashSet::new();
        for v in &self.visibles {
            if !vis.insert(v.as_str()) {
                return Err(Error::Invalid(format!("duplicate visible label {v}")));
            }
        }
        let mut hid: HashMap<&str, &HiddenVar> = HashMap::new();
        for h in &self.hiddens {
            if h.size == 0 {
                return Err(Error::Invalid(format!("hidden variable {} has empty alphabet index set", h.label)));
            }
            if h.ends[0] == h.ends[1] {
                return Err(Error::Invalid(format!("hidden variable {} is a self-loop", h.label)));
            }
            if hid.insert(h.label.as_str(), h).is_some() {
                return Err(Error::Invalid(format!("duplicate hidden label {}", h.label)));
            }
        }
        let mut ids = HashSet::new();
        let mut vis_seen: HashMap<&str, usize> = HashMap::new();
        let mut hid_seen: HashMap<&str, Vec<ConstraintId>> = HashMap::new();
        for c in &self.constraints {
            if !ids.insert(c.id) {
                return Err(Error::Invalid(format!("duplicate constraint id {}", c.id)));
            }
            for p in &c.ports {
                match p {
                    Port::Visible(l) => {
                        if !vis.contains(l.as_str()) {
                            return Err(Error::Invalid(format!("constraint {} binds undeclared visible {l}", c.id)));
                        }
                        *vis_seen.entry(l).or_default() += 1;
                    }
                    Port::Hidden(l) => {
                        if !hid.contains_key(l.as_str()) {
                            return Err(Error::Invalid(format!("constraint {} binds undeclared hidden {l}", c.id)));
                        }
                        hid_seen.entry(l).or_default().push(c.id);
                    }
                }
            }
            let coords = self.port_coords(&c.ports)?;
            if coords != c.code.labels() {
                return Err(Error::Invalid(format!(
                    "constraint {} local code coordinates {:?} do not match ports {:?}",
                    c.id,
                    c.code.labels(),
                    coords
                )));
            }
        }
        for v in &self.visibles {
            if vis_seen.get(v.as_str()).copied().unwrap_or(0) != 1 {
                return Err(Error::Invalid(format!("visible {v} must be bound by exactly one constraint")));
            }
        }
        for h in &self.hiddens {
            let mut seen = hid_seen.get(h.label.as_str()).cloned().unwrap_or_default();
            seen.sort_unstable();
            let mut ends = h.ends.to_vec();
            ends.sort_unstable();
            if seen != ends {
                return Err(Error::Invalid(format!(
                    "hidden {} must be bound exactly by its ends {:?}, found {:?}",
                    h.label, h.ends, seen
                )));
            }
        }
        if require_connected && !self.topology().connected {
            return Err(Error::Disconnected);
        }
        Ok(())
    }

    /// Constraint graph; vertex i is `constraints()[i]`, edge e is `hiddens()[e]`.
    pub fn graph(&self) -> Graph {
        let pos: HashMap<ConstraintId, usize> =
            self.constraints.iter().enumerate().map(|(i, c)| (c.id, i)).collect();
        let edges = self
            .hiddens
            .iter()
            .map(|h| (pos[&h.ends[0]], pos[&h.ends[1]]))
            .collect::<Vec<_>>();
        Graph::from_edges(self.constraints.len(), &edges)
    }

    pub fn topology(&self) -> Topology {
        let g = self.graph();
        let active: Vec<usize> = (0..self.constraints.len())
            .filter(|&i| !self.constraints[i].ports.is_empty())
            .collect();
        let connected = match active.first() {
            None => true,
            Some(&s) => {
                let mut seen = vec![false; g.n()];
                let mut q = VecDeque::from([s]);
                seen[s] = true;
                while let Some(u) = q.pop_front() {
                    for &v in g.neighbors(u) {
                        if !seen[v] {
                            seen[v] = true;
                            q.push_back(v);
                        }
                    }
                }
                active.iter().all(|&i| seen[i])
            }
        };
        let v = self.constraints.len();
        let e = self.hiddens.len();
        Topology {
            vertices: v,
            edges: e,
            connected,
            cycle_free: connected && g.is_forest(),
        }
    }

    /// Behavior B: the null space of all local parity checks, over the visible
    /// coordinates (in `visibles()` order) followed by every hidden component.
    pub fn behavior(&self, dim_cap: usize) -> Result<LinearCode> {
        let mut labels: Vec<String> = self.visibles.iter().map(|v| vcoord(v)).collect();
        for h in &self.hiddens {
            labels.extend((0..h.size).map(|c| hcoord(&h.label, c)));
        }
        let index: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let mut h = BinaryMatrix::zeros(0, labels.len());
        let mut row = vec![0u64; h.stride()];
        for c in &self.constraints {
            let local = c.code.parity_check();
            let map: Vec<usize> = c.code.labels().iter().map(|l| index[l.as_str()]).collect();
            for r in 0..local.rows() {
                row.iter_mut().for_each(|w| *w = 0);
                for j in crate::gf2::matrix::ones(local.row(r)) {
                    crate::gf2::matrix::set_bit(&mut row, map[j], true);
                }
                h.push_row(&row);
            }
        }
        let b = LinearCode::from_parity_check(labels, &h)?;
        if b.k() > dim_cap {
            return Err(Error::CapExceeded(format!(
                "behavior dimension {} exceeds cap {dim_cap}",
                b.k()
            )));
        }
        Ok(b)
    }

    /// The realized code: projection of the behavior onto the visible variables.
    pub fn realized_code(&self, dim_cap: usize) -> Result<LinearCode> {
        let b = self.behavior(dim_cap)?;
        let idx: Vec<usize> = (0..self.visibles.len()).collect();
        b.project_indices(&idx).relabel(self.visibles.clone())
    }

    /// Complexity of one constraint after Cartesian decomposition.
    pub fn constraint_complexity(&self, id: ConstraintId) -> Result<usize> {
        Ok(self.constraint(id)?.code.factor_complexity())
    }

    /// q^m-ary check over hidden alphabets and constraint complexities.
    pub fn qm_report(&self) -> QmReport {
        let m_hidden = self.hiddens.iter().map(|h| h.size).max().unwrap_or(0);
        let cx: Vec<(ConstraintId, usize)> = self
            .constraints
            .iter()
            .map(|c| (c.id, c.code.factor_complexity()))
            .collect();
        let m_constraint = cx.iter().map(|x| x.1).max().unwrap_or(0);
        QmReport {
            m_hidden,
            m_constraint,
            m: m_hidden.max(m_constraint),
            worst_constraints: cx.iter().filter(|x| x.1 == m_constraint).map(|x| x.0).collect(),
        }
    }

    pub fn verify_qm(&self, m: usize) -> bool {
        self.qm_report().passes(m)
    }

    /// Replace every local code by its dual. The result realizes the dual code.
    pub fn dualize(&self) -> GraphicalModel {
        let mut gm = self.clone();
        for c in &mut gm.constraints {
            c.code = c.code.dual();
        }
        gm
    }

    // ---- mutation helpers for transformations ----

    pub(crate) fn push_constraint(&mut self, id: ConstraintId, ports: Vec<Port>, code: LinearCode) -> Result<()> {
        let coords = self.port_coords(&ports)?;
        let code = code.reorder(&coords)?;
        self.constraints.push(Constraint { id, ports, code });
        Ok(())
    }

    /// Replace ports and code of an existing constraint; `code` may use any
    /// coordinate order.
    pub(crate) fn set_constraint(&mut self, id: ConstraintId, ports: Vec<Port>, code: LinearCode) -> Result<()> {
        let coords = self.port_coords(&ports)?;
        let code = code.reorder(&coords)?;
        let c = self.constraint_mut(id)?;
        c.ports = ports;
        c.code = code;
        Ok(())
    }

    pub(crate) fn remove_constraint(&mut self, id: ConstraintId) -> Result<Constraint> {
        let p = self.constraint_pos(id)?;
        Ok(self.constraints.remove(p))
    }

    pub(crate) fn remove_hidden(&mut self, label: &str) -> Result<HiddenVar> {
        let p = self
            .hiddens
            .iter()
            .position(|h| h.label == label)
            .ok_or_else(|| Error::UnknownVariable(label.to_string()))?;
        Ok(self.hiddens.remove(p))
    }
}

/// Incremental builder for hand-written models; hidden ends are inferred
/// from the constraints that bind them.
#[derive(Default)]
pub struct ModelBuilder {
    visibles: Vec<String>,
    hidden: Vec<(String, usize)>,
    constraints: Vec<(ConstraintId, Vec<Port>, BinaryMatrix)>,
}

impl ModelBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn visible(mut self, label: &str) -> Self {
        self.visibles.push(label.to_string());
        self
    }

    pub fn visibles<S: AsRef<str>>(mut self, labels: &[S]) -> Self {
        self.visibles.extend(labels.iter().map(|s| s.as_ref().to_string()));
        self
    }

    pub fn hidden(mut self, label: &str, size: usize) -> Self {
        self.hidden.push((label.to_string(), size));
        self
    }

    /// Ports are written `v:LABEL` / `h:LABEL`; generator rows as bit strings.
    pub fn constraint(mut self, id: ConstraintId, ports: &[&str], gen_rows: &[&str]) -> Self {
        let ports = ports.iter().map(|p| Port::parse(p).expect("port syntax")).collect();
        let g = if gen_rows.is_empty() {
            BinaryMatrix::zeros(0, 0)
        } else {
            BinaryMatrix::from_strs(gen_rows).expect("generator rows")
        };
        self.constraints.push((id, ports, g));
        self
    }

    pub fn constraint_code(mut self, id: ConstraintId, ports: Vec<Port>, g: BinaryMatrix) -> Self {
        self.constraints.push((id, ports, g));
        self
    }

    fn assemble(self) -> Result<GraphicalModel> {
        let sizes: HashMap<String, usize> = self.hidden.iter().cloned().collect();
        let mut ends: HashMap<String, Vec<ConstraintId>> = HashMap::new();
        let mut constraints = Vec::new();
        for (id, ports, g) in self.constraints {
            for p in &ports {
                if let Port::Hidden(l) = p {
                    ends.entry(l.clone()).or_default().push(id);
                }
            }
            let coords = expand_ports(&ports, |l| sizes.get(l).copied())?;
            let g = if g.cols() == 0 && g.rows() == 0 {
                BinaryMatrix::zeros(0, coords.len())
            } else {
                g
            };
            let code = LinearCode::from_generator(coords, &g)?;
            constraints.push(Constraint { id, ports, code });
        }
        let mut hiddens = Vec::new();
        for (l, size) in self.hidden {
            let e = ends.get(&l).cloned().unwrap_or_default();
            if e.len() != 2 {
                return Err(Error::Invalid(format!("hidden {l} is bound {} times", e.len())));
            }
            hiddens.push(HiddenVar {
                label: l,
                size,
                ends: [e[0], e[1]],
            });
        }
        Ok(GraphicalModel {
            visibles: self.visibles,
            hiddens,
            constraints,
        })
    }

    pub fn build(self) -> Result<GraphicalModel> {
        let gm = self.assemble()?;
        gm.validate(true)?;
        Ok(gm)
    }
}

/// Tanner graph of `h`: one interface repetition constraint per column (ids
/// 1..=n), one internal single parity check per row (ids n+1..), one binary
/// hidden variable `S<k>` per nonzero entry.
pub fn tanner_graph(h: &BinaryMatrix, visible_labels: Option<Vec<String>>) -> Result<GraphicalModel> {
    let n = h.cols();
    let labels = visible_labels.unwrap_or_else(|| (1..=n).map(|i| format!("V{i}")).collect());
    tanner_like(h, &labels, n)
}

/// Generalized Tanner graph of a degree-g generalized extension: like a
/// Tanner graph of `h_ext`, but the last g columns become internal
/// repetition constraints without a visible variable.
pub fn build_gtg(ext: &crate::gf2::GeneralizedExtension, h_ext: &BinaryMatrix) -> Result<GraphicalModel> {
    let n = ext.base.n();
    let g = ext.degree();
    if h_ext.cols() != n + g {
        return Err(Error::Shape(format!("H_ext has {} columns, expected {}", h_ext.cols(), n + g)));
    }
    let want = ext.extended_code()?;
    let got = LinearCode::from_parity_check(want.labels().to_vec(), h_ext)?;
    if got != want {
        return Err(Error::InconsistentExtension("H_ext does not define the extended code".into()));
    }
    tanner_like(h_ext, ext.base.labels(), n)
}

fn tanner_like(h: &BinaryMatrix, visible: &[String], n_visible: usize) -> Result<GraphicalModel> {
    let (m, n) = (h.rows(), h.cols());
    if visible.len() != n_visible {
        return Err(Error::Shape("one visible label per column".into()));
    }
    if let Some(c) = (0..n).find(|&c| h.col_weight(c) == 0) {
        return Err(Error::ZeroColumn(c));
    }
    let mut hiddens = Vec::new();
    let mut col_ports: Vec<Vec<Port>> = (0..n)
        .map(|c| {
            if c < n_visible {
                vec![Port::Visible(visible[c].clone())]
            } else {
                Vec::new()
            }
        })
        .collect();
    let mut row_ports: Vec<Vec<(usize, Port)>> = vec![Vec::new(); m];
    let mut k = 0;
    for c in 0..n {
        for r in h.column_support(c) {
            k += 1;
            let label = format!("S{k}");
            hiddens.push(HiddenVar {
                label: label.clone(),
                size: 1,
                ends: [(c + 1) as ConstraintId, (n + r + 1) as ConstraintId],
            });
            col_ports[c].push(Port::Hidden(label.clone()));
            row_ports[r].push((c, Port::Hidden(label)));
        }
    }
    let mut constraints = Vec::new();
    for (c, ports) in col_ports.into_iter().enumerate() {
        let coords = expand_ports(&ports, |_| Some(1))?;
        constraints.push(Constraint {
            id: (c + 1) as ConstraintId,
            code: LinearCode::repetition(coords)?,
            ports,
        });
    }
    for (r, ports) in row_ports.into_iter().enumerate() {
        let ports: Vec<Port> = ports.into_iter().map(|x| x.1).collect();
        let coords = expand_ports(&ports, |_| Some(1))?;
        constraints.push(Constraint {
            id: (n + r + 1) as ConstraintId,
            code: LinearCode::single_parity_check(coords)?,
            ports,
        });
    }
    GraphicalModel::new(visible.to_vec(), hiddens, constraints)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn tanner_graph_realizes_code() {
        let h = fixtures::hamming7_h();
        let tg = tanner_graph(&h, None).unwrap();
        let c = tg.realized_code(DEFAULT_DIM_CAP).unwrap();
        let want = LinearCode::from_parity_check(c.labels().to_vec(), &h).unwrap();
        assert_eq!(c, want);
        assert_eq!(tg.topology().vertices, 10);
        assert_eq!(tg.topology().edges, h.weight());
        assert!(tg.verify_qm(1));
    }

    #[test]
    fn zero_column_rejected() {
        let h = BinaryMatrix::from_strs(&["110", "100"]).unwrap();
        assert_eq!(tanner_graph(&h, None).unwrap_err(), Error::ZeroColumn(2));
    }

    #[test]
    fn invariant_violations_detected() {
        let r = ModelBuilder::new()
            .visible("V1")
            .hidden("S1", 1)
            .constraint(1, &["v:V1", "h:S1"], &["11"])
            .build();
        assert!(r.is_err(), "hidden bound once");
        let r = ModelBuilder::new()
            .visibles(&["V1", "V2"])
            .constraint(1, &["v:V1"], &["1"])
            .constraint(2, &["v:V2"], &["1"])
            .build();
        assert_eq!(r.unwrap_err(), Error::Disconnected);
    }

    #[test]
    fn behavior_cap() {
        let h = fixtures::golay23_h();
        let tg = tanner_graph(&h, None).unwrap();
        assert!(matches!(tg.behavior(8), Err(Error::CapExceeded(_))));
        assert_eq!(tg.behavior(DEFAULT_DIM_CAP).unwrap().k(), 12);
    }

    #[test]
    fn dualize_realizes_dual() {
        let tg = tanner_graph(&fixtures::hamming7_h(), None).unwrap();
        let c = tg.realized_code(DEFAULT_DIM_CAP).unwrap();
        let d = tg.dualize().realized_code(DEFAULT_DIM_CAP).unwrap();
        assert_eq!(d, c.dual());
    }
}
