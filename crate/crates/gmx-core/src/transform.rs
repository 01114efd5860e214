//! Basic graphical model operations, constructive absorption of a parity
//! check into a cycle-free model, and reduction of any model to a Tanner
//! graph through a replayable sequence of operations.
//!
//! Every operation takes a model by reference and returns a new one. Fresh
//! hidden labels are `S<k>` above the current maximum and fresh constraint
//! ids are one above the current maximum, so replaying a trace on the same
//! start model gives the same result.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::gf2::{BinaryMatrix, LinearCode};
use crate::model::{hcoord, vcoord, Constraint, ConstraintId, GraphicalModel, HiddenVar, Port, DEFAULT_DIM_CAP};

// ---------------------------------------------------------------- helpers

/// Code over `labels` cut out by the given codes (each over a subset of the
/// labels) and by the XOR equations listed as label sets.
pub(crate) fn solve(labels: &[String], codes: &[&LinearCode], eqs: &[Vec<String>]) -> Result<LinearCode> {
    let index: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let look = |l: &str| index.get(l).copied().ok_or_else(|| Error::UnknownCoordinate(l.to_string()));
    let mut h = BinaryMatrix::zeros(0, labels.len());
    for c in codes {
        let pc = c.parity_check();
        let map: Vec<usize> = c.labels().iter().map(|l| look(l)).collect::<Result<_>>()?;
        for r in 0..pc.rows() {
            let mut row = vec![0u8; labels.len()];
            for j in pc.row_support(r) {
                row[map[j]] = 1;
            }
            h.push_bits(&row);
        }
    }
    for e in eqs {
        let mut row = vec![0u8; labels.len()];
        for l in e {
            row[look(l)?] ^= 1;
        }
        h.push_bits(&row);
    }
    LinearCode::from_parity_check(labels.to_vec(), &h)
}

/// `{(a, b) : a = b}` over two equally long coordinate lists.
fn equality_code(a: &[String], b: &[String]) -> Result<LinearCode> {
    let mut labels = a.to_vec();
    labels.extend(b.iter().cloned());
    let eqs: Vec<Vec<String>> = a.iter().zip(b).map(|(x, y)| vec![x.clone(), y.clone()]).collect();
    solve(&labels, &[], &eqs)
}

fn coords(label: &str, t: usize) -> Vec<String> {
    (0..t).map(|c| hcoord(label, c)).collect()
}

fn tmp(label: &str, i: usize) -> String {
    format!("t:{label}.{i}")
}

/// Rename the coordinates of hidden `from` to hidden `to` inside a label list.
fn rename_hidden(labels: &[String], from: &str, to: &str) -> Vec<String> {
    let prefix = format!("h:{from}.");
    labels
        .iter()
        .map(|l| match l.strip_prefix(&prefix) {
            Some(c) => format!("h:{to}.{c}"),
            None => l.clone(),
        })
        .collect()
}

fn hidden_prefix(label: &str) -> String {
    format!("h:{label}.")
}

/// Solve `a * x = b` over GF(2) for x; `a` is k×t, `b` has k entries.
fn solve_linear(a: &BinaryMatrix, b: &[bool]) -> Option<Vec<bool>> {
    let t = a.cols();
    let mut aug = a.widen(1);
    for (r, &v) in b.iter().enumerate() {
        aug.set(r, t, v);
    }
    let (red, piv) = aug.rref();
    if piv.contains(&t) {
        return None;
    }
    let mut x = vec![false; t];
    for (r, &p) in piv.iter().enumerate() {
        x[p] = red.get(r, t);
    }
    Some(x)
}

struct Fresh {
    s: u64,
    c: ConstraintId,
}

impl Fresh {
    fn new(gm: &GraphicalModel) -> Self {
        let s = gm.fresh_hidden_label()[1..].parse().expect("fresh labels are S<k>");
        Fresh {
            s,
            c: gm.fresh_constraint_id(),
        }
    }

    fn hidden(&mut self) -> String {
        self.s += 1;
        format!("S{}", self.s - 1)
    }

    fn constraint(&mut self) -> ConstraintId {
        self.c += 1;
        self.c - 1
    }
}

/// Replace hidden `s` by `new_t` components at both of its ends. `rows` are
/// XOR equations relating the old coordinates `h:s.c` to the new ones
/// `t:s.i`; each endpoint code is intersected with them and the old
/// coordinates are projected out.
fn reparametrize(gm: &mut GraphicalModel, s: &str, new_t: usize, rows: &[Vec<String>]) -> Result<()> {
    let h = gm.hidden(s)?.clone();
    let new: Vec<String> = (0..new_t).map(|i| tmp(s, i)).collect();
    let prefix = hidden_prefix(s);
    let mut updated = Vec::new();
    for &e in &h.ends {
        let c = gm.constraint(e)?;
        let old = c.code.labels().to_vec();
        let mut all = old.clone();
        all.extend(new.iter().cloned());
        let code = solve(&all, &[&c.code], rows)?;
        let mut keep = Vec::new();
        let mut placed = false;
        for l in &old {
            if l.starts_with(&prefix) {
                if !placed {
                    keep.extend(new.iter().cloned());
                    placed = true;
                }
            } else {
                keep.push(l.clone());
            }
        }
        let code = code.project(&keep)?;
        let labels = keep
            .iter()
            .map(|l| match new.iter().position(|x| x == l) {
                Some(i) => hcoord(s, i),
                None => l.clone(),
            })
            .collect();
        updated.push((e, c.ports.clone(), code.relabel(labels)?));
    }
    gm.hidden_mut(s)?.size = new_t;
    for (e, ports, code) in updated {
        gm.set_constraint(e, ports, code)?;
    }
    Ok(())
}

/// Shrink hidden `s` as seen from constraint `piece`: first quotient by the
/// piece's subcode on `s`, then restrict to the piece's projection onto `s`.
/// Both steps leave the realized code unchanged. Returns true if `s` shrank.
fn trim(gm: &mut GraphicalModel, s: &str, piece: ConstraintId) -> Result<bool> {
    let t0 = gm.hidden(s)?.size;
    let sc = coords(s, t0);
    let u = gm.constraint(piece)?.code.subcode(&sc)?;
    if u.k() > 0 && u.k() < t0 {
        let g = u.generator();
        let piv = u.pivots().to_vec();
        let q: Vec<usize> = (0..t0).filter(|c| !piv.contains(c)).collect();
        let mut rows = Vec::new();
        for (i, &qc) in q.iter().enumerate() {
            let mut e = vec![tmp(s, i), sc[qc].clone()];
            for (r, &p) in piv.iter().enumerate() {
                if g.get(r, qc) {
                    e.push(sc[p].clone());
                }
            }
            rows.push(e);
        }
        reparametrize(gm, s, q.len(), &rows)?;
    }
    let t = gm.hidden(s)?.size;
    let sc = coords(s, t);
    let p = gm.constraint(piece)?.code.project(&sc)?;
    if p.k() > 0 && p.k() < t {
        let g = p.generator().clone();
        let rows: Vec<Vec<String>> = (0..t)
            .map(|c| {
                let mut e = vec![sc[c].clone()];
                e.extend((0..g.rows()).filter(|&j| g.get(j, c)).map(|j| tmp(s, j)));
                e
            })
            .collect();
        reparametrize(gm, s, p.k(), &rows)?;
    }
    Ok(gm.hidden(s)?.size < t0)
}

/// Trim every hidden variable against both ends until nothing changes.
/// The realized code is unchanged.
pub fn trim_all(gm: &GraphicalModel) -> Result<GraphicalModel> {
    let mut g = gm.clone();
    loop {
        let mut changed = false;
        let hs: Vec<HiddenVar> = g.hiddens().to_vec();
        for h in hs {
            for e in h.ends {
                changed |= trim(&mut g, &h.label, e)?;
            }
        }
        if !changed {
            return Ok(g);
        }
    }
}

/// True when no hidden variable can be trimmed: at each end the local code
/// projects onto all of its alphabet and has trivial subcode on it.
pub fn is_trim(gm: &GraphicalModel) -> bool {
    gm.hiddens().iter().all(|h| {
        let sc = coords(&h.label, h.size);
        h.ends.iter().all(|&e| match gm.constraint(e) {
            Ok(c) => {
                let p = c.code.project(&sc).map(|p| p.k()).unwrap_or(0);
                let u = c.code.subcode(&sc).map(|u| u.k()).unwrap_or(1);
                p == h.size && u == 0
            }
            Err(_) => false,
        })
    })
}

// ------------------------------------------------------------ operations

/// Insert a degree-2 repetition constraint on a hidden or visible variable.
///
/// For a hidden `S` with ends `(a, b)`, a copy `S'` is created, `b` is
/// rebound to `S'` and the new constraint enforces `S = S'`. For a visible
/// `V`, its owner is rebound to a new binary hidden `X` and the new
/// constraint enforces `V = X`.
pub fn rep_insert(gm: &GraphicalModel, target: &Port) -> Result<GraphicalModel> {
    let mut g = gm.clone();
    let mut f = Fresh::new(gm);
    let r = f.constraint();
    let new = f.hidden();
    match target {
        Port::Hidden(s) => {
            let h = g.hidden(s)?.clone();
            let b = h.ends[1];
            let cb = g.constraint(b)?.clone();
            let ports = cb
                .ports
                .iter()
                .map(|p| if p == target { Port::Hidden(new.clone()) } else { p.clone() })
                .collect();
            let code = cb.code.relabel(rename_hidden(cb.code.labels(), s, &new))?;
            g.hiddens.push(HiddenVar {
                label: new.clone(),
                size: h.size,
                ends: [r, b],
            });
            g.hidden_mut(s)?.ends = [h.ends[0], r];
            g.set_constraint(b, ports, code)?;
            let eq = equality_code(&coords(s, h.size), &coords(&new, h.size))?;
            g.push_constraint(r, vec![Port::Hidden(s.clone()), Port::Hidden(new)], eq)?;
        }
        Port::Visible(v) => {
            let owner = g.visible_owner(v)?;
            let co = g.constraint(owner)?.clone();
            let ports = co
                .ports
                .iter()
                .map(|p| if p == target { Port::Hidden(new.clone()) } else { p.clone() })
                .collect();
            let vc = vcoord(v);
            let labels = co
                .code
                .labels()
                .iter()
                .map(|l| if *l == vc { hcoord(&new, 0) } else { l.clone() })
                .collect();
            g.hiddens.push(HiddenVar {
                label: new.clone(),
                size: 1,
                ends: [r, owner],
            });
            g.set_constraint(owner, ports, co.code.relabel(labels)?)?;
            let eq = LinearCode::repetition(vec![vc, hcoord(&new, 0)])?;
            g.push_constraint(r, vec![target.clone(), Port::Hidden(new)], eq)?;
        }
    }
    Ok(g)
}

/// Remove a degree-2 repetition constraint, undoing [`rep_insert`].
pub fn rep_remove(gm: &GraphicalModel, r: ConstraintId) -> Result<GraphicalModel> {
    let c = gm.constraint(r)?.clone();
    let not_rep = || Error::NotARepetition(format!("constraint {r} is not a degree-2 repetition"));
    if c.ports.len() != 2 {
        return Err(not_rep());
    }
    let mut g = gm.clone();
    match (&c.ports[0], &c.ports[1]) {
        (Port::Hidden(a), Port::Hidden(b)) => {
            let ha = g.hidden(a)?.clone();
            let hb = g.hidden(b)?.clone();
            if ha.size != hb.size || !c.code.same_code(&equality_code(&coords(a, ha.size), &coords(b, hb.size))?) {
                return Err(not_rep());
            }
            let x = ha.other_end(r);
            let y = hb.other_end(r);
            if x == y {
                return Err(Error::NotApplicable(format!(
                    "removing {r} would join {a} to both sides of constraint {x}"
                )));
            }
            g.remove_constraint(r)?;
            g.remove_hidden(b)?;
            let cy = g.constraint(y)?.clone();
            let ports = cy
                .ports
                .iter()
                .map(|p| if p.is_hidden() && p.label() == b { Port::Hidden(a.clone()) } else { p.clone() })
                .collect();
            let code = cy.code.relabel(rename_hidden(cy.code.labels(), b, a))?;
            g.set_constraint(y, ports, code)?;
            let h = g.hidden_mut(a)?;
            h.ends = if h.ends[0] == r { [y, h.ends[1]] } else { [h.ends[0], y] };
        }
        (Port::Visible(v), Port::Hidden(xl)) | (Port::Hidden(xl), Port::Visible(v)) => {
            let hx = g.hidden(xl)?.clone();
            if hx.size != 1 || !c.code.is_repetition() {
                return Err(not_rep());
            }
            let y = hx.other_end(r);
            g.remove_constraint(r)?;
            g.remove_hidden(xl)?;
            let cy = g.constraint(y)?.clone();
            let ports = cy
                .ports
                .iter()
                .map(|p| if p.is_hidden() && p.label() == xl { Port::Visible(v.clone()) } else { p.clone() })
                .collect();
            let xc = hcoord(xl, 0);
            let labels = cy
                .code
                .labels()
                .iter()
                .map(|l| if *l == xc { vcoord(v) } else { l.clone() })
                .collect();
            g.set_constraint(y, ports, cy.code.relabel(labels)?)?;
        }
        _ => return Err(not_rep()),
    }
    Ok(g)
}

/// Add a constraint with no bindings (length 0, dimension 0).
pub fn trivial_insert(gm: &GraphicalModel) -> Result<GraphicalModel> {
    let mut g = gm.clone();
    let id = g.fresh_constraint_id();
    g.push_constraint(id, Vec::new(), LinearCode::free(Vec::new())?)?;
    Ok(g)
}

pub fn trivial_remove(gm: &GraphicalModel, id: ConstraintId) -> Result<GraphicalModel> {
    if !gm.constraint(id)?.is_trivial() {
        return Err(Error::NotTrivial(format!("constraint {id} has bindings")));
    }
    let mut g = gm.clone();
    g.remove_constraint(id)?;
    Ok(g)
}

/// Replace `i1` and `i2` by one constraint.
///
/// A hidden variable joining them directly first gets a degree-2 repetition.
/// For each common neighbor `c`, the hidden variables joining `c` to `i1`
/// and `i2` are replaced by one variable whose components are the message
/// bits of the systematic generator of `C_c` projected onto them. The new
/// constraint takes a fresh id and `i1`'s position.
pub fn merge(gm: &GraphicalModel, i1: ConstraintId, i2: ConstraintId) -> Result<GraphicalModel> {
    if i1 == i2 {
        return Err(Error::NotApplicable(format!("cannot merge constraint {i1} with itself")));
    }
    gm.constraint(i1)?;
    gm.constraint(i2)?;
    let mut g = gm.clone();
    let direct: Vec<String> = g
        .hiddens()
        .iter()
        .filter(|h| (h.ends == [i1, i2]) || (h.ends == [i2, i1]))
        .map(|h| h.label.clone())
        .collect();
    for s in direct {
        g = rep_insert(&g, &Port::Hidden(s))?;
    }
    let mut f = Fresh::new(&g);
    let new_id = f.constraint();
    let n1 = g.neighbors(i1)?;
    let n2 = g.neighbors(i2)?;
    let set2: HashSet<ConstraintId> = n2.iter().map(|x| x.1).collect();
    let mut commons: Vec<ConstraintId> = Vec::new();
    for (_, c) in &n1 {
        if set2.contains(c) && !commons.contains(c) {
            commons.push(*c);
        }
    }
    let c1 = g.constraint(i1)?.clone();
    let c2 = g.constraint(i2)?.clone();
    let mut all: Vec<String> = c1.code.labels().to_vec();
    all.extend(c2.code.labels().iter().cloned());
    let mut eqs: Vec<Vec<String>> = Vec::new();
    let mut replaced: HashSet<String> = HashSet::new();
    let mut new_hiddens = Vec::new();
    let mut common_updates = Vec::new();
    let mut merged_vars = Vec::new();
    for &c in &commons {
        let cc = g.constraint(c)?.clone();
        let mut ab: Vec<String> = Vec::new();
        let mut ab_vars: Vec<String> = Vec::new();
        for side in [i1, i2] {
            for l in cc.hidden_labels() {
                if g.hidden(l)?.other_end(c) == side {
                    ab_vars.push(l.to_string());
                    ab.extend(coords(l, g.hidden(l)?.size));
                }
            }
        }
        let p = cc.code.project(&ab)?;
        let size = p.k().max(1);
        let m = f.hidden();
        let mc = coords(&m, size);
        let rows: Vec<Vec<String>> = ab
            .iter()
            .enumerate()
            .map(|(x, l)| {
                let mut e = vec![l.clone()];
                e.extend((0..p.k()).filter(|&j| p.generator().get(j, x)).map(|j| mc[j].clone()));
                e
            })
            .collect();
        all.extend(mc.iter().cloned());
        eqs.extend(rows.iter().cloned());
        let mut clabels = cc.code.labels().to_vec();
        clabels.extend(mc.iter().cloned());
        let ccode = solve(&clabels, &[&cc.code], &rows)?;
        let mut ports = Vec::new();
        let mut placed = false;
        for port in &cc.ports {
            if port.is_hidden() && ab_vars.iter().any(|v| v == port.label()) {
                if !placed {
                    ports.push(Port::Hidden(m.clone()));
                    placed = true;
                }
            } else {
                ports.push(port.clone());
            }
        }
        replaced.extend(ab_vars);
        new_hiddens.push(HiddenVar {
            label: m.clone(),
            size,
            ends: [c, new_id],
        });
        merged_vars.push(m);
        common_updates.push((c, ports, ccode));
    }
    let mut ports: Vec<Port> = Vec::new();
    for c in [&c1, &c2] {
        ports.extend(c.ports.iter().filter(|p| !p.is_hidden()).cloned());
    }
    for c in [&c1, &c2] {
        ports.extend(
            c.ports
                .iter()
                .filter(|p| p.is_hidden() && !replaced.contains(p.label()))
                .cloned(),
        );
    }
    ports.extend(merged_vars.iter().map(|m| Port::Hidden(m.clone())));
    let merged = solve(&all, &[&c1.code, &c2.code], &eqs)?;
    // Update the model.
    for l in &replaced {
        g.remove_hidden(l)?;
    }
    for h in g.hiddens.iter_mut() {
        for e in h.ends.iter_mut() {
            if *e == i1 || *e == i2 {
                *e = new_id;
            }
        }
    }
    g.hiddens.extend(new_hiddens);
    for (c, p, code) in common_updates {
        let keep = g.port_coords(&p)?;
        g.set_constraint(c, p, code.project(&keep)?)?;
    }
    let keep = g.port_coords(&ports)?;
    let code = merged.project(&keep)?;
    let pos = g.constraint_pos(i1)?;
    g.constraints[pos] = Constraint {
        id: new_id,
        ports: Vec::new(),
        code: LinearCode::free(Vec::new())?,
    };
    g.set_constraint(new_id, ports, code)?;
    g.remove_constraint(i2)?;
    Ok(g)
}

/// Split constraint `j` into `j` (bindings `side1`) and a fresh constraint
/// (bindings `side2`). Hidden bindings listed on both sides are shared: the
/// neighbor gets a copy bound to the new constraint. With `codes = None`
/// the pieces are the projections of `C_j`; explicit codes are over the
/// side coordinates using the original labels. Shared variables and their
/// copies are then trimmed against the pieces.
pub fn split(
    gm: &GraphicalModel,
    j: ConstraintId,
    side1: &[Port],
    side2: &[Port],
    codes: Option<(&LinearCode, &LinearCode)>,
) -> Result<GraphicalModel> {
    let cj = gm.constraint(j)?.clone();
    let bad = |m: String| Error::InvalidPartition(format!("constraint {j}: {m}"));
    for side in [side1, side2] {
        let mut seen = HashSet::new();
        for p in side {
            if !cj.ports.contains(p) {
                return Err(bad(format!("{p} is not bound by the constraint")));
            }
            if !seen.insert(p) {
                return Err(bad(format!("{p} listed twice on one side")));
            }
        }
    }
    for p in &cj.ports {
        let n = side1.contains(p) as usize + side2.contains(p) as usize;
        match p {
            Port::Visible(_) if n != 1 => return Err(bad(format!("visible {p} must be on exactly one side"))),
            Port::Hidden(_) if n == 0 => return Err(bad(format!("hidden {p} is on neither side"))),
            _ => {}
        }
    }
    let co1 = gm.port_coords(side1)?;
    let co2 = gm.port_coords(side2)?;
    let (k1, k2) = match codes {
        None => (cj.code.project(&co1)?, cj.code.project(&co2)?),
        Some((a, b)) => (
            a.reorder(&co1).map_err(|_| bad("first code is not over the first side".into()))?,
            b.reorder(&co2).map_err(|_| bad("second code is not over the second side".into()))?,
        ),
    };
    let back = solve(cj.code.labels(), &[&k1, &k2], &[])?;
    if !back.same_code(&cj.code) {
        return Err(Error::NotSplittable(format!(
            "constraint {j}: the pieces do not intersect to the original code"
        )));
    }
    let mut g = gm.clone();
    let mut f = Fresh::new(gm);
    let j2 = f.constraint();
    let shared: Vec<String> = side2
        .iter()
        .filter(|p| p.is_hidden() && side1.contains(p))
        .map(|p| p.label().to_string())
        .collect();
    let mut copies = Vec::new();
    let mut k2_labels = k2.labels().to_vec();
    let mut ports2 = side2.to_vec();
    for s in &shared {
        let h = g.hidden(s)?.clone();
        let x = h.other_end(j);
        let copy = f.hidden();
        let cx = g.constraint(x)?.clone();
        let sc = coords(s, h.size);
        let cc = coords(&copy, h.size);
        let mut labels = cx.code.labels().to_vec();
        labels.extend(cc.iter().cloned());
        let eqs: Vec<Vec<String>> = sc.iter().zip(&cc).map(|(a, b)| vec![a.clone(), b.clone()]).collect();
        let code = solve(&labels, &[&cx.code], &eqs)?;
        let mut ports = Vec::new();
        for p in &cx.ports {
            ports.push(p.clone());
            if p.is_hidden() && p.label() == s {
                ports.push(Port::Hidden(copy.clone()));
            }
        }
        g.hiddens.push(HiddenVar {
            label: copy.clone(),
            size: h.size,
            ends: [x, j2],
        });
        g.set_constraint(x, ports, code)?;
        k2_labels = rename_hidden(&k2_labels, s, &copy);
        for p in ports2.iter_mut() {
            if p.is_hidden() && p.label() == s {
                *p = Port::Hidden(copy.clone());
            }
        }
        copies.push((s.clone(), copy));
    }
    for p in side2 {
        if p.is_hidden() && !side1.contains(p) {
            let h = g.hidden_mut(p.label())?;
            for e in h.ends.iter_mut() {
                if *e == j {
                    *e = j2;
                }
            }
        }
    }
    g.set_constraint(j, side1.to_vec(), k1)?;
    let pos = g.constraint_pos(j)?;
    let coords2 = g.port_coords(&ports2)?;
    let k2 = k2.relabel(k2_labels)?.reorder(&coords2)?;
    g.constraints.insert(
        pos + 1,
        Constraint {
            id: j2,
            ports: ports2,
            code: k2,
        },
    );
    for (s, copy) in &copies {
        trim(&mut g, s, j)?;
        trim(&mut g, copy, j2)?;
    }
    Ok(g)
}

/// Attach an isolated partial-parity check to the visible variables listed:
/// each owner must be a repetition constraint, gains a hidden copy, and the
/// copies feed a new single parity-check constraint whose parity variable
/// goes to a new degree-1 free constraint.
pub fn ippc_insert(gm: &GraphicalModel, vars: &[String]) -> Result<GraphicalModel> {
    let owners: Vec<ConstraintId> = vars.iter().map(|v| gm.visible_owner(v)).collect::<Result<_>>()?;
    ippc_insert_at(gm, &owners)
}

/// As [`ippc_insert`], naming the repetition constraints directly.
pub fn ippc_insert_at(gm: &GraphicalModel, owners: &[ConstraintId]) -> Result<GraphicalModel> {
    if owners.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut seen = HashSet::new();
    for &o in owners {
        if !seen.insert(o) {
            return Err(Error::NotApplicable(format!("constraint {o} listed twice")));
        }
        if !gm.constraint(o)?.code.is_repetition() {
            return Err(Error::NotARepetition(format!("constraint {o} is not a repetition constraint")));
        }
    }
    let mut g = gm.clone();
    let mut f = Fresh::new(gm);
    let p = f.constraint();
    let k = f.constraint();
    let mut pports = Vec::new();
    for &o in owners {
        let y = f.hidden();
        let co = g.constraint(o)?.clone();
        let mut ports = co.ports.clone();
        ports.push(Port::Hidden(y.clone()));
        g.hiddens.push(HiddenVar {
            label: y.clone(),
            size: 1,
            ends: [o, p],
        });
        let code = LinearCode::repetition(g.port_coords(&ports)?)?;
        g.set_constraint(o, ports, code)?;
        pports.push(Port::Hidden(y));
    }
    let par = f.hidden();
    g.hiddens.push(HiddenVar {
        label: par.clone(),
        size: 1,
        ends: [p, k],
    });
    pports.push(Port::Hidden(par.clone()));
    let spc = LinearCode::single_parity_check(g.port_coords(&pports)?)?;
    g.push_constraint(p, pports, spc)?;
    g.push_constraint(k, vec![Port::Hidden(par.clone())], LinearCode::free(coords(&par, 1))?)?;
    Ok(g)
}

/// Remove an isolated partial-parity check `p`: one of its hidden variables
/// must lead to a degree-1 free constraint, and `C_p` must not constrain its
/// other bindings. Neighbors drop the copies by projection.
pub fn ippc_remove(gm: &GraphicalModel, p: ConstraintId) -> Result<GraphicalModel> {
    let cp = gm.constraint(p)?.clone();
    let iso = |m: String| Error::NotIsolated(format!("constraint {p}: {m}"));
    if cp.is_interface() {
        return Err(iso("binds visible variables".into()));
    }
    let mut found = None;
    let mut leaf_seen = false;
    for l in cp.hidden_labels() {
        let h = gm.hidden(l)?;
        let k = gm.constraint(h.other_end(p))?;
        if k.ports.len() == 1 {
            leaf_seen = true;
            if k.code.k() == h.size {
                found = Some((l.to_string(), k.id));
                break;
            }
        }
    }
    let Some((par, k)) = found else {
        return Err(iso(if leaf_seen {
            "the parity variable is constrained".into()
        } else {
            "no hidden variable leads to a degree-1 constraint".into()
        }));
    };
    let others: Vec<String> = cp
        .code
        .labels()
        .iter()
        .filter(|l| !l.starts_with(&hidden_prefix(&par)))
        .cloned()
        .collect();
    if cp.code.project(&others)?.k() != others.len() {
        return Err(iso("the check constrains its other bindings".into()));
    }
    let mut g = gm.clone();
    g.remove_constraint(p)?;
    g.remove_constraint(k)?;
    g.remove_hidden(&par)?;
    for l in cp.hidden_labels().filter(|l| *l != par) {
        let h = g.remove_hidden(l)?;
        let o = h.other_end(p);
        drop_port(&mut g, o, l)?;
    }
    Ok(g)
}

/// Project hidden `l` out of constraint `o` and unbind it.
fn drop_port(g: &mut GraphicalModel, o: ConstraintId, l: &str) -> Result<()> {
    let co = g.constraint(o)?.clone();
    let prefix = hidden_prefix(l);
    let keep: Vec<String> = co.code.labels().iter().filter(|x| !x.starts_with(&prefix)).cloned().collect();
    let code = co.code.project(&keep)?;
    let ports = co.ports.into_iter().filter(|p| !(p.is_hidden() && p.label() == l)).collect();
    let c = g.constraint_mut(o)?;
    c.ports = ports;
    c.code = code;
    Ok(())
}

/// Make hidden `s` incident on an internal constraint of complexity at most
/// the model's current `m`, inserting a repetition if necessary.
pub fn internalize(gm: &GraphicalModel, s: &str) -> Result<GraphicalModel> {
    let h = gm.hidden(s)?;
    let m = gm.qm_report().m;
    for e in h.ends {
        let c = gm.constraint(e)?;
        if !c.is_interface() && c.code.n() - c.code.k() <= m {
            return Ok(gm.clone());
        }
    }
    rep_insert(gm, &Port::Hidden(s.to_string()))
}

pub(crate) fn remove_internal_model(gm: &GraphicalModel, r: ConstraintId) -> Result<GraphicalModel> {
    let c = gm.constraint(r)?.clone();
    if c.is_interface() {
        return Err(Error::NotInternal(format!("constraint {r} binds visible variables")));
    }
    let mut g = gm.clone();
    g.remove_constraint(r)?;
    for l in c.hidden_labels() {
        let h = g.remove_hidden(l)?;
        drop_port(&mut g, h.other_end(r), l)?;
    }
    Ok(g)
}

/// Delete internal constraint `r`. Each of its hidden variables is left to
/// a free degree-1 constraint, which is then absorbed into the neighbor by
/// projection. Returns the new model and the code it realizes.
pub fn remove_internal(gm: &GraphicalModel, r: ConstraintId) -> Result<(GraphicalModel, LinearCode)> {
    let g = remove_internal_model(gm, r)?;
    let code = g.realized_code(DEFAULT_DIM_CAP)?;
    Ok((g, code))
}

/// Express internal constraint `r` as parity checks on the visible
/// variables: the realized code equals the code of the model without `r`
/// intersected with the returned equations (one row per check of `C_r`,
/// columns in `visibles()` order).
///
/// Each component of a hidden variable on `r` is written as a sum of
/// visible variables using the checks of the behavior without `r`; among
/// the valid expressions the one of least weight is chosen, ties going to
/// the lowest visible indices.
pub fn redefine_internal(gm: &GraphicalModel, r: ConstraintId, dim_cap: usize) -> Result<BinaryMatrix> {
    let c = gm.constraint(r)?.clone();
    if c.is_interface() {
        return Err(Error::NotInternal(format!("constraint {r} binds visible variables")));
    }
    let mut open = gm.clone();
    open.constraint_mut(r)?.code = LinearCode::free(c.code.labels().to_vec())?;
    let b = open.behavior(dim_cap)?;
    let vis: Vec<String> = gm.visibles().iter().map(|v| vcoord(v)).collect();
    let nv = vis.len();
    let mut sub: HashMap<String, Vec<u8>> = HashMap::new();
    for l in c.hidden_labels() {
        let t = gm.hidden(l)?.size;
        let sc = coords(l, t);
        let mut labels = sc.clone();
        labels.extend(vis.iter().cloned());
        let d = b.project(&labels)?.dual();
        let g = d.generator();
        let piv = d.pivots();
        let free_rows: Vec<usize> = (0..g.rows()).filter(|&r| piv[r] >= t).collect();
        for (ci, coord) in sc.iter().enumerate() {
            let Some(row) = piv.iter().position(|&p| p == ci) else {
                return Err(Error::Unobservable(format!(
                    "hidden {l} is not determined by the visible variables"
                )));
            };
            let base: Vec<u8> = (0..nv).map(|j| g.get(row, t + j) as u8).collect();
            let best = if free_rows.len() <= 16 {
                let mut best = base.clone();
                let mut key = expr_key(&base);
                let mut cur = base.clone();
                for i in 1u64..(1u64 << free_rows.len()) {
                    let fr = free_rows[i.trailing_zeros() as usize];
                    for (j, x) in cur.iter_mut().enumerate() {
                        *x ^= g.get(fr, t + j) as u8;
                    }
                    let k = expr_key(&cur);
                    if k < key {
                        key = k;
                        best = cur.clone();
                    }
                }
                best
            } else {
                base
            };
            sub.insert(coord.clone(), best);
        }
    }
    let h = c.code.parity_check();
    let mut out = BinaryMatrix::zeros(0, nv);
    for row in 0..h.rows() {
        let mut eq = vec![0u8; nv];
        for j in h.row_support(row) {
            for (e, x) in eq.iter_mut().zip(&sub[&c.code.labels()[j]]) {
                *e ^= x;
            }
        }
        out.push_bits(&eq);
    }
    Ok(out)
}

fn expr_key(v: &[u8]) -> (usize, Vec<usize>) {
    let s: Vec<usize> = v.iter().enumerate().filter(|x| *x.1 != 0).map(|x| x.0).collect();
    (s.len(), s)
}

/// Intersect the realized code of a cycle-free model with the single
/// parity check on the visible variables `j`, keeping the model cycle-free.
///
/// The minimal subtree spanning the owners of `j` is rooted at its
/// constraint of largest degree (ties to the lowest id). Working up from the
/// leaves, each subtree hidden variable carries the parity of the
/// `j`-variables below it: if that parity is already a linear function of
/// the variable's components it is reused, otherwise one component is
/// added. The root enforces the total parity.
pub fn absorb_spc(gm: &GraphicalModel, j: &[String]) -> Result<GraphicalModel> {
    if !gm.topology().cycle_free {
        return Err(Error::NotCycleFree);
    }
    if j.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut owners: BTreeMap<ConstraintId, Vec<String>> = BTreeMap::new();
    for v in j {
        let o = gm.visible_owner(v).map_err(|_| Error::UnknownCoordinate(v.clone()))?;
        owners.entry(o).or_default().push(v.clone());
    }
    // Minimal subtree spanning the owners.
    let mut adj: HashMap<ConstraintId, Vec<(String, ConstraintId)>> = HashMap::new();
    for c in gm.constraints() {
        if !c.is_trivial() {
            adj.insert(c.id, gm.neighbors(c.id)?);
        }
    }
    let mut alive: HashSet<ConstraintId> = adj.keys().copied().collect();
    loop {
        let leaves: Vec<ConstraintId> = alive
            .iter()
            .copied()
            .filter(|c| !owners.contains_key(c) && adj[c].iter().filter(|(_, n)| alive.contains(n)).count() <= 1)
            .collect();
        if leaves.is_empty() {
            break;
        }
        for l in leaves {
            alive.remove(&l);
        }
    }
    let degree = |c: ConstraintId| adj[&c].iter().filter(|(_, n)| alive.contains(n)).count();
    let root = alive
        .iter()
        .copied()
        .max_by(|&a, &b| degree(a).cmp(&degree(b)).then(b.cmp(&a)))
        .expect("owners are alive");
    // Breadth-first order from the root inside the subtree.
    let mut order = vec![root];
    let mut parent_edge: HashMap<ConstraintId, (String, ConstraintId)> = HashMap::new();
    let mut queue = VecDeque::from([root]);
    let mut seen = HashSet::from([root]);
    while let Some(c) = queue.pop_front() {
        for (l, n) in &adj[&c] {
            if alive.contains(n) && seen.insert(*n) {
                parent_edge.insert(*n, (l.clone(), c));
                order.push(*n);
                queue.push_back(*n);
            }
        }
    }
    let mut g = gm.clone();
    let mut parity: HashMap<String, Vec<bool>> = HashMap::new();
    let functional = |g: &GraphicalModel, c: ConstraintId, parity: &HashMap<String, Vec<bool>>| -> Result<Vec<bool>> {
        let con = g.constraint(c)?;
        let mut f = vec![false; con.code.n()];
        if let Some(vs) = owners.get(&c) {
            for v in vs {
                f[con.code.index_of(&vcoord(v)).expect("owner binds v")] = true;
            }
        }
        for l in con.hidden_labels() {
            if let Some(p) = parity.get(l) {
                if parent_edge.get(&c).map(|e| e.0.as_str()) == Some(l) {
                    continue;
                }
                for (i, &b) in p.iter().enumerate() {
                    if b {
                        f[con.code.index_of(&hcoord(l, i)).expect("component")] ^= true;
                    }
                }
            }
        }
        Ok(f)
    };
    for &c in order.iter().skip(1).rev() {
        let f = functional(&g, c, &parity)?;
        let (e, par) = parent_edge[&c].clone();
        let con = g.constraint(c)?.clone();
        let gen = con.code.generator();
        let fv: Vec<bool> = (0..gen.rows())
            .map(|r| gen.row_support(r).iter().fold(false, |a, &i| a ^ f[i]))
            .collect();
        let t = g.hidden(&e)?.size;
        let ec: Vec<usize> = coords(&e, t).iter().map(|l| con.code.index_of(l).expect("edge")).collect();
        let ge = gen.select_columns(&ec);
        if let Some(a) = solve_linear(&ge, &fv) {
            parity.insert(e, a);
            continue;
        }
        let newc = hcoord(&e, t);
        let mut labels = con.code.labels().to_vec();
        labels.push(newc.clone());
        let mut wide = gen.widen(1);
        for (r, &v) in fv.iter().enumerate() {
            wide.set(r, con.code.n(), v);
        }
        let child = LinearCode::from_generator(labels, &wide)?;
        let pc = g.constraint(par)?.clone();
        let parent_code = pc.code.product(&LinearCode::free(vec![newc])?)?;
        g.hidden_mut(&e)?.size = t + 1;
        g.set_constraint(c, con.ports.clone(), child)?;
        g.set_constraint(par, pc.ports.clone(), parent_code)?;
        let mut p = vec![false; t + 1];
        p[t] = true;
        parity.insert(e, p);
    }
    let f = functional(&g, root, &parity)?;
    let rc = g.constraint(root)?.clone();
    let eq: Vec<String> = rc
        .code
        .labels()
        .iter()
        .zip(&f)
        .filter(|x| *x.1)
        .map(|x| x.0.clone())
        .collect();
    let code = solve(rc.code.labels(), &[&rc.code], &[eq])?;
    g.set_constraint(root, rc.ports.clone(), code)?;
    Ok(g)
}

// ----------------------------------------------------------------- traces

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepKind {
    Merge,
    Split,
    RepInsert,
    RepRemove,
    TrivialInsert,
    TrivialRemove,
    IppcInsert,
    IppcRemove,
    Internalize,
    RemoveInternal,
    RedefineInternal,
    AbsorbSpc,
    /// Matrix-level `(i, j)` row operation `h_j <- h_i + h_j`.
    RowOp,
    /// Matrix-level insertion of a partial-parity column over listed columns.
    PartialParity,
}

const KINDS: &[(StepKind, &str)] = &[
    (StepKind::Merge, "merge"),
    (StepKind::Split, "split"),
    (StepKind::RepInsert, "rep_insert"),
    (StepKind::RepRemove, "rep_remove"),
    (StepKind::TrivialInsert, "trivial_insert"),
    (StepKind::TrivialRemove, "trivial_remove"),
    (StepKind::IppcInsert, "ippc_insert"),
    (StepKind::IppcRemove, "ippc_remove"),
    (StepKind::Internalize, "internalize"),
    (StepKind::RemoveInternal, "remove_internal"),
    (StepKind::RedefineInternal, "redefine_internal"),
    (StepKind::AbsorbSpc, "absorb_spc"),
    (StepKind::RowOp, "rowop"),
    (StepKind::PartialParity, "partial_parity"),
];

impl StepKind {
    pub fn name(self) -> &'static str {
        KINDS.iter().find(|k| k.0 == self).expect("listed").1
    }

    pub fn parse(s: &str) -> Result<Self> {
        KINDS
            .iter()
            .find(|k| k.1 == s)
            .map(|k| k.0)
            .ok_or_else(|| Error::Parse(format!("unknown step kind {s:?}")))
    }

    /// Allowed operand counts.
    fn arity(self) -> (usize, usize) {
        match self {
            StepKind::Merge | StepKind::RowOp => (2, 2),
            StepKind::Split => (3, 5),
            StepKind::TrivialInsert => (0, 0),
            StepKind::IppcInsert | StepKind::AbsorbSpc | StepKind::PartialParity => (1, usize::MAX),
            _ => (1, 1),
        }
    }
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformStep {
    pub kind: StepKind,
    pub operands: Vec<String>,
    /// Free text written after `#` on the step line; not used on replay.
    pub summary: String,
}

fn join_ports(ports: &[Port]) -> String {
    if ports.is_empty() {
        "-".into()
    } else {
        ports.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
    }
}

fn join_rows(c: &LinearCode) -> String {
    if c.k() == 0 {
        "-".into()
    } else {
        c.generator().to_strings().join(";")
    }
}

impl TransformStep {
    pub fn new(kind: StepKind, operands: Vec<String>) -> Result<Self> {
        let (lo, hi) = kind.arity();
        if operands.len() < lo || operands.len() > hi {
            return Err(Error::Parse(format!("{kind} takes {lo}..={hi} operands, got {}", operands.len())));
        }
        if operands.iter().any(|o| o.is_empty() || o.contains(char::is_whitespace) || o.contains('#')) {
            return Err(Error::Parse(format!("{kind}: operands must be nonempty words")));
        }
        Ok(TransformStep {
            kind,
            operands,
            summary: String::new(),
        })
    }

    pub fn with_summary(mut self, s: impl Into<String>) -> Self {
        self.summary = s.into();
        self
    }

    pub fn merge(i1: ConstraintId, i2: ConstraintId) -> Self {
        Self::new(StepKind::Merge, vec![i1.to_string(), i2.to_string()]).expect("arity")
    }

    pub fn split(j: ConstraintId, side1: &[Port], side2: &[Port], codes: Option<(&LinearCode, &LinearCode)>) -> Self {
        let mut ops = vec![j.to_string(), join_ports(side1), join_ports(side2)];
        if let Some((a, b)) = codes {
            ops.push(join_rows(a));
            ops.push(join_rows(b));
        }
        Self::new(StepKind::Split, ops).expect("arity")
    }

    pub fn rep_insert(p: &Port) -> Self {
        Self::new(StepKind::RepInsert, vec![p.to_string()]).expect("arity")
    }

    pub fn on_constraint(kind: StepKind, id: ConstraintId) -> Self {
        Self::new(kind, vec![id.to_string()]).expect("arity")
    }

    pub fn trivial_insert() -> Self {
        Self::new(StepKind::TrivialInsert, vec![]).expect("arity")
    }

    pub fn row_op(i: usize, j: usize) -> Self {
        Self::new(StepKind::RowOp, vec![i.to_string(), j.to_string()]).expect("arity")
    }

    pub fn partial_parity(cols: &[usize]) -> Self {
        Self::new(StepKind::PartialParity, cols.iter().map(|c| c.to_string()).collect()).expect("arity")
    }

    fn id(&self, i: usize) -> Result<ConstraintId> {
        self.operands[i]
            .parse()
            .map_err(|_| Error::Parse(format!("{}: {:?} is not a constraint id", self.kind, self.operands[i])))
    }

    pub fn index(&self, i: usize) -> Result<usize> {
        self.operands[i]
            .parse()
            .map_err(|_| Error::Parse(format!("{}: {:?} is not an index", self.kind, self.operands[i])))
    }
}

impl fmt::Display for TransformStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        for o in &self.operands {
            write!(f, " {o}")?;
        }
        if !self.summary.is_empty() {
            write!(f, " # {}", self.summary)?;
        }
        Ok(())
    }
}

/// Ordered steps plus optional cycle-census snapshots keyed by the number
/// of steps applied when each was taken.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExtractionTrace {
    pub header: Vec<String>,
    pub steps: Vec<TransformStep>,
    pub checkpoints: Vec<(usize, String)>,
}

pub const TRACE_VERSION: u32 = 1;

impl ExtractionTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, s: TransformStep) {
        self.steps.push(s);
    }

    pub fn checkpoint(&mut self, text: impl Into<String>) {
        self.checkpoints.push((self.steps.len(), text.into()));
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    /// Text form: a version line, `# ` header lines, then one step per line
    /// as `<seq> <kind> <operands...>` with checkpoints as `#@ <after> <text>`.
    pub fn to_text(&self) -> String {
        let mut s = format!("# trace {TRACE_VERSION}\n");
        for h in &self.header {
            s += &format!("# {h}\n");
        }
        let mut cp = self.checkpoints.iter().peekable();
        for i in 0..=self.steps.len() {
            while let Some((at, text)) = cp.peek() {
                if *at != i {
                    break;
                }
                s += &format!("#@ {at} {text}\n");
                cp.next();
            }
            if let Some(step) = self.steps.get(i) {
                s += &format!("{} {step}\n", i + 1);
            }
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut t = ExtractionTrace::new();
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, l)) if l.trim() == format!("# trace {TRACE_VERSION}") => {}
            _ => return Err(Error::Parse(format!("trace must start with \"# trace {TRACE_VERSION}\""))),
        }
        for (n, line) in lines {
            let perr = |m: String| Error::Parse(format!("trace line {}: {m}", n + 1));
            let line = line.trim();
            if let Some(rest) = line.strip_prefix("#@ ") {
                let (at, text) = rest.split_once(' ').unwrap_or((rest, ""));
                let at = at.parse().map_err(|_| perr("bad checkpoint index".into()))?;
                t.checkpoints.push((at, text.to_string()));
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if t.steps.is_empty() {
                    t.header.push(rest.trim_start().to_string());
                }
                continue;
            }
            let (body, summary) = match line.split_once(" # ") {
                Some((b, s)) => (b, s.trim().to_string()),
                None => (line, String::new()),
            };
            let tok: Vec<&str> = body.split_whitespace().collect();
            if tok.len() < 2 {
                return Err(perr("expected <seq> <kind>".into()));
            }
            if tok[0] != (t.steps.len() + 1).to_string() {
                return Err(perr(format!("expected sequence number {}", t.steps.len() + 1)));
            }
            let kind = StepKind::parse(tok[1]).map_err(|e| perr(e.to_string()))?;
            let step = TransformStep::new(kind, tok[2..].iter().map(|s| s.to_string()).collect())
                .map_err(|e| perr(e.to_string()))?;
            t.steps.push(step.with_summary(summary));
        }
        Ok(t)
    }
}

fn parse_ports(s: &str) -> Result<Vec<Port>> {
    if s == "-" {
        return Ok(Vec::new());
    }
    s.split(',').map(Port::parse).collect()
}

fn parse_code(s: &str, labels: Vec<String>) -> Result<LinearCode> {
    let g = if s == "-" {
        BinaryMatrix::zeros(0, labels.len())
    } else {
        let rows: Vec<&str> = s.split(';').collect();
        BinaryMatrix::from_strs(&rows)?
    };
    LinearCode::from_generator(labels, &g)
}

/// Apply one model-level step.
pub fn apply_step(gm: &GraphicalModel, step: &TransformStep) -> Result<GraphicalModel> {
    let ops = &step.operands;
    match step.kind {
        StepKind::Merge => merge(gm, step.id(0)?, step.id(1)?),
        StepKind::Split => {
            let j = step.id(0)?;
            let s1 = parse_ports(&ops[1])?;
            let s2 = parse_ports(&ops[2])?;
            match ops.len() {
                3 => split(gm, j, &s1, &s2, None),
                5 => {
                    let c1 = parse_code(&ops[3], gm.port_coords(&s1)?)?;
                    let c2 = parse_code(&ops[4], gm.port_coords(&s2)?)?;
                    split(gm, j, &s1, &s2, Some((&c1, &c2)))
                }
                _ => Err(Error::Parse("split takes 3 or 5 operands".into())),
            }
        }
        StepKind::RepInsert => rep_insert(gm, &Port::parse(&ops[0])?),
        StepKind::RepRemove => rep_remove(gm, step.id(0)?),
        StepKind::TrivialInsert => trivial_insert(gm),
        StepKind::TrivialRemove => trivial_remove(gm, step.id(0)?),
        StepKind::IppcInsert => {
            let owners = ops
                .iter()
                .map(|o| match o.strip_prefix("v:") {
                    Some(v) => gm.visible_owner(v),
                    None => o.parse().map_err(|_| Error::Parse(format!("ippc_insert operand {o:?}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            ippc_insert_at(gm, &owners)
        }
        StepKind::IppcRemove => ippc_remove(gm, step.id(0)?),
        StepKind::Internalize => internalize(gm, &ops[0]),
        StepKind::RemoveInternal => remove_internal_model(gm, step.id(0)?),
        StepKind::RedefineInternal => {
            let c = gm.constraint(step.id(0)?)?;
            if c.is_interface() {
                return Err(Error::NotInternal(format!("constraint {} binds visible variables", c.id)));
            }
            Ok(gm.clone())
        }
        StepKind::AbsorbSpc => absorb_spc(gm, ops),
        StepKind::RowOp | StepKind::PartialParity => Err(Error::NotApplicable(format!(
            "{} is a matrix-level step",
            step.kind
        ))),
    }
}

/// Replay every step of a model-level trace.
pub fn replay(gm: &GraphicalModel, trace: &ExtractionTrace) -> Result<GraphicalModel> {
    let mut g = gm.clone();
    for s in &trace.steps {
        g = apply_step(&g, s)?;
    }
    Ok(g)
}

// ------------------------------------------------------- Tanner reduction

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Role {
    Var,
    Chk,
}

struct Run {
    gm: GraphicalModel,
    trace: ExtractionTrace,
    roles: HashMap<ConstraintId, Role>,
    ceiling: usize,
}

impl Run {
    fn apply(&mut self, step: TransformStep) -> Result<()> {
        if self.trace.len() >= self.ceiling {
            return Err(Error::Invalid(format!(
                "normalization exceeded its ceiling of {} steps",
                self.ceiling
            )));
        }
        self.gm = apply_step(&self.gm, &step)?;
        self.trace.push(step);
        Ok(())
    }

    fn next_id(&self) -> ConstraintId {
        self.gm.fresh_constraint_id()
    }

    fn role(&self, c: ConstraintId) -> Role {
        self.roles[&c]
    }

    fn rep_insert(&mut self, p: Port, role: Role) -> Result<ConstraintId> {
        let r = self.next_id();
        self.apply(TransformStep::rep_insert(&p))?;
        self.roles.insert(r, role);
        Ok(r)
    }

    fn remove_trivial(&mut self) -> Result<()> {
        let ids: Vec<ConstraintId> = self.gm.constraints().iter().filter(|c| c.is_trivial()).map(|c| c.id).collect();
        for id in ids {
            self.apply(TransformStep::on_constraint(StepKind::TrivialRemove, id))?;
            self.roles.remove(&id);
        }
        Ok(())
    }

    /// Binary hidden edges whose ends both have role `r`.
    fn edges_between(&self, r: Role) -> Vec<String> {
        self.gm
            .hiddens()
            .iter()
            .filter(|h| self.role(h.ends[0]) == r && self.role(h.ends[1]) == r)
            .map(|h| h.label.clone())
            .collect()
    }

    /// `h_j <- h_i + h_j` by merging checks `i` and `j` and splitting the
    /// result into `h_i` and the sum. Returns the new ids of the two rows;
    /// the second is `None` when the sum vanished.
    fn row_op(&mut self, i: ConstraintId, j: ConstraintId) -> Result<(ConstraintId, Option<ConstraintId>)> {
        let ni = self.gm.neighbors(i)?;
        let nj = self.gm.neighbors(j)?;
        let vi: HashSet<ConstraintId> = ni.iter().map(|x| x.1).collect();
        let vj: HashSet<ConstraintId> = nj.iter().map(|x| x.1).collect();
        let only_i: Vec<Port> = ni.iter().filter(|x| !vj.contains(&x.1)).map(|x| Port::Hidden(x.0.clone())).collect();
        let only_j: Vec<Port> = nj.iter().filter(|x| !vi.contains(&x.1)).map(|x| Port::Hidden(x.0.clone())).collect();
        let m = self.next_id();
        self.apply(TransformStep::merge(i, j))?;
        self.roles.remove(&i);
        self.roles.remove(&j);
        self.roles.insert(m, Role::Chk);
        let cm = self.gm.constraint(m)?.clone();
        let mut side1 = only_i.clone();
        side1.extend(cm.ports.iter().filter(|p| !only_i.contains(p) && !only_j.contains(p)).cloned());
        let mut side2 = only_i;
        side2.extend(only_j);
        let c1 = LinearCode::single_parity_check(self.gm.port_coords(&side1)?)?;
        let c2 = LinearCode::single_parity_check(self.gm.port_coords(&side2)?)?;
        let m2 = self.next_id();
        self.apply(TransformStep::split(m, &side1, &side2, Some((&c1, &c2))))?;
        self.roles.insert(m2, Role::Chk);
        if side2.is_empty() {
            self.apply(TransformStep::on_constraint(StepKind::TrivialRemove, m2))?;
            self.roles.remove(&m2);
            return Ok((m, None));
        }
        Ok((m, Some(m2)))
    }

    /// Rows are checks in constraint order; columns are visible variables in
    /// `visibles()` order followed by internal variable nodes.
    fn gtg(&self) -> Result<(BinaryMatrix, Vec<ConstraintId>, Vec<ConstraintId>, usize)> {
        let rows: Vec<ConstraintId> = self
            .gm
            .constraints()
            .iter()
            .filter(|c| self.role(c.id) == Role::Chk)
            .map(|c| c.id)
            .collect();
        let mut cols = Vec::new();
        for v in self.gm.visibles() {
            cols.push(self.gm.visible_owner(v)?);
        }
        let nvis = cols.len();
        for c in self.gm.constraints() {
            if self.role(c.id) == Role::Var && !c.is_interface() {
                cols.push(c.id);
            }
        }
        let col_of: HashMap<ConstraintId, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut h = BinaryMatrix::zeros(rows.len(), cols.len());
        for (r, &c) in rows.iter().enumerate() {
            for (_, n) in self.gm.neighbors(c)? {
                let col = *col_of
                    .get(&n)
                    .ok_or_else(|| Error::Invalid(format!("check {c} is adjacent to non-variable {n}")))?;
                if h.get(r, col) {
                    return Err(Error::Invalid(format!("check {c} has parallel edges to {n}")));
                }
                h.set(r, col, true);
            }
        }
        Ok((h, rows, cols, nvis))
    }

    fn check_gtg(&self) -> Result<()> {
        for c in self.gm.constraints() {
            let ok = match self.role(c.id) {
                Role::Var => c.code.is_repetition() && c.ports.iter().filter(|p| !p.is_hidden()).count() <= 1,
                Role::Chk => !c.is_interface() && c.code.is_single_parity_check(),
            };
            if !ok {
                return Err(Error::Invalid(format!("constraint {} does not fit its role", c.id)));
            }
        }
        for h in self.gm.hiddens() {
            if h.size != 1 || self.role(h.ends[0]) == self.role(h.ends[1]) {
                return Err(Error::Invalid(format!("hidden {} is not a binary variable-check edge", h.label)));
            }
        }
        Ok(())
    }
}

/// Reduce a model to a Tanner graph for its realized code by basic
/// operations, returning the parity-check matrix (columns in `visibles()`
/// order) and the step trace, which replays on `gm`.
///
/// 1. Every visible variable gets its own repetition constraint, and every
///    hidden variable of size t is expanded into t binary variables by a
///    repetition insertion and t - 1 splits.
/// 2. Repetition constraints become variable nodes and the rest check
///    nodes. Repetitions are inserted on check-check edges, check nodes are
///    split into single parity checks (free parts are removed as free
///    internal constraints), then repetitions are inserted on
///    variable-variable edges and parallel edges, giving a generalized
///    Tanner graph.
/// 3. Dependent rows are turned into zero rows by row operations and
///    removed as trivial constraints.
/// 4. Each internal variable node is pivoted into a single row by row
///    operations and that isolated partial-parity check is removed.
pub fn normalize_to_tanner(gm: &GraphicalModel, dim_cap: usize) -> Result<(BinaryMatrix, ExtractionTrace)> {
    let target = gm.realized_code(dim_cap)?;
    let size: usize = gm.hiddens().iter().map(|h| h.size).sum::<usize>() + gm.visibles().len();
    let mut run = Run {
        gm: gm.clone(),
        trace: ExtractionTrace::new(),
        roles: HashMap::new(),
        ceiling: 200 * (size + gm.constraints().len() + 4).pow(2),
    };
    run.trace.header.push("normalize_to_tanner".into());
    // Phase 1: isolate visibles, expand hidden alphabets to binary.
    for v in gm.visibles() {
        run.apply(TransformStep::rep_insert(&Port::Visible(v.clone())))?;
    }
    let wide: Vec<String> = run.gm.hiddens().iter().filter(|h| h.size > 1).map(|h| h.label.clone()).collect();
    for s in wide {
        let mut cur = run.next_id();
        run.apply(TransformStep::rep_insert(&Port::Hidden(s)))?;
        loop {
            let c = run.gm.constraint(cur)?.clone();
            let (a, b) = (c.ports[0].clone(), c.ports[1].clone());
            let t = run.gm.hidden_size(a.label()).expect("bound");
            if t == 1 {
                run.apply(TransformStep::on_constraint(StepKind::RepRemove, cur))?;
                break;
            }
            let ca = coords(a.label(), t);
            let cb = coords(b.label(), t);
            let mut labels = ca.clone();
            labels.extend(cb.iter().cloned());
            let first = vec![vec![ca[0].clone(), cb[0].clone()]];
            let rest: Vec<Vec<String>> = (1..t).map(|i| vec![ca[i].clone(), cb[i].clone()]).collect();
            let c1 = solve(&labels, &[], &first)?;
            let c2 = solve(&labels, &[], &rest)?;
            let next = run.next_id();
            let sides = [a, b];
            run.apply(TransformStep::split(cur, &sides, &sides, Some((&c1, &c2))))?;
            run.apply(TransformStep::on_constraint(StepKind::RepRemove, cur))?;
            cur = next;
        }
    }
    for c in run.gm.constraints() {
        run.roles.insert(c.id, if c.code.is_repetition() { Role::Var } else { Role::Chk });
    }
    run.remove_trivial()?;
    // Phase 2: generalized Tanner graph.
    for s in run.edges_between(Role::Chk) {
        run.rep_insert(Port::Hidden(s), Role::Var)?;
    }
    let checks: Vec<ConstraintId> = run
        .gm
        .constraints()
        .iter()
        .filter(|c| run.role(c.id) == Role::Chk)
        .map(|c| c.id)
        .collect();
    for c in checks {
        let mut cur = c;
        loop {
            let con = run.gm.constraint(cur)?.clone();
            let h = con.code.parity_check();
            if h.rows() == 0 {
                run.apply(TransformStep::on_constraint(StepKind::RemoveInternal, cur))?;
                run.roles.remove(&cur);
                break;
            }
            let port_of = |i: usize| Port::Hidden(con.code.labels()[i][2..].rsplit_once('.').expect("hidden").0.to_string());
            let mut used = vec![false; con.code.n()];
            for r in 0..h.rows() {
                for j in h.row_support(r) {
                    used[j] = true;
                }
            }
            if used.iter().any(|u| !u) {
                let s1: Vec<Port> = (0..used.len()).filter(|&i| used[i]).map(port_of).collect();
                let s2: Vec<Port> = (0..used.len()).filter(|&i| !used[i]).map(port_of).collect();
                let c1 = con.code.project(&run.gm.port_coords(&s1)?)?;
                let c2 = LinearCode::free(run.gm.port_coords(&s2)?)?;
                let free_piece = run.next_id();
                run.apply(TransformStep::split(cur, &s1, &s2, Some((&c1, &c2))))?;
                run.apply(TransformStep::on_constraint(StepKind::RemoveInternal, free_piece))?;
                continue;
            }
            if h.rows() == 1 {
                break;
            }
            let first = h.row_support(0);
            let mut in2 = vec![false; con.code.n()];
            for r in 1..h.rows() {
                for j in h.row_support(r) {
                    in2[j] = true;
                }
            }
            let idx2: Vec<usize> = (0..in2.len()).filter(|&i| in2[i]).collect();
            let s1: Vec<Port> = first.iter().map(|&i| port_of(i)).collect();
            let s2: Vec<Port> = idx2.iter().map(|&i| port_of(i)).collect();
            let c1 = LinearCode::single_parity_check(run.gm.port_coords(&s1)?)?;
            let rest = h.select_rows(&(1..h.rows()).collect::<Vec<_>>()).select_columns(&idx2);
            let c2 = LinearCode::from_parity_check(run.gm.port_coords(&s2)?, &rest)?;
            let next = run.next_id();
            run.apply(TransformStep::split(cur, &s1, &s2, Some((&c1, &c2))))?;
            run.roles.insert(next, Role::Chk);
            cur = next;
        }
    }
    run.remove_trivial()?;
    for s in run.edges_between(Role::Var) {
        run.rep_insert(Port::Hidden(s), Role::Chk)?;
    }
    let mut groups: BTreeMap<(ConstraintId, ConstraintId), Vec<String>> = BTreeMap::new();
    for h in run.gm.hiddens() {
        let k = (h.ends[0].min(h.ends[1]), h.ends[0].max(h.ends[1]));
        groups.entry(k).or_default().push(h.label.clone());
    }
    for (_, labels) in groups {
        for s in labels.into_iter().skip(1) {
            let h = run.gm.hidden(&s)?.clone();
            let r1 = run.rep_insert(Port::Hidden(s.clone()), Role::Chk)?;
            // After insertion `s` joins ends[0] to r1 and its copy joins r1 to ends[1].
            let toward_check = if run.role(h.ends[0]) == Role::Chk {
                s.clone()
            } else {
                run.gm
                    .constraint(r1)?
                    .hidden_labels()
                    .find(|l| *l != s)
                    .expect("copy")
                    .to_string()
            };
            run.rep_insert(Port::Hidden(toward_check), Role::Var)?;
        }
    }
    run.check_gtg()?;
    run.trace.checkpoint("generalized Tanner graph");
    // Phase 3: remove dependent rows.
    loop {
        let (h, rows, _, _) = run.gtg()?;
        let left = h.transpose().null_space();
        if left.rows() == 0 {
            break;
        }
        let sup = left.row_support(0);
        let j = *sup.last().expect("nonzero");
        let mut rj = rows[j];
        let mut done = false;
        for &i in &sup[..sup.len() - 1] {
            let (_, nj) = run.row_op(rows[i], rj)?;
            match nj {
                Some(n) => rj = n,
                None => {
                    done = true;
                    break;
                }
            }
        }
        if !done {
            return Err(Error::Invalid("dependent row did not vanish".into()));
        }
    }
    // Phase 4: eliminate internal variable nodes.
    loop {
        let (h, rows, cols, nvis) = run.gtg()?;
        let Some(col) = (nvis..cols.len()).next() else {
            break;
        };
        let p = cols[col];
        let hit = h.column_support(col);
        if hit.is_empty() {
            return Err(Error::Invalid(format!("internal variable {p} has no checks")));
        }
        let mut pivot = rows[hit[0]];
        for &r in &hit[1..] {
            let (np, _) = run.row_op(pivot, rows[r])?;
            pivot = np;
        }
        run.apply(TransformStep::on_constraint(StepKind::IppcRemove, pivot))?;
        run.roles.remove(&pivot);
        run.roles.remove(&p);
        run.remove_trivial()?;
    }
    let (h, _, _, nvis) = run.gtg()?;
    let h = h.select_columns(&(0..nvis).collect::<Vec<_>>());
    let got = LinearCode::from_parity_check(target.labels().to_vec(), &h)?;
    if got != target {
        return Err(Error::Invalid("normalized matrix does not realize the model's code".into()));
    }
    run.trace.checkpoint(format!("tanner graph {}x{}", h.rows(), h.cols()));
    Ok((h, run.trace))
}

/// Merge two constraints, then split the result back into the original
/// codes re-expressed over the merged variables. The output is isomorphic
/// to `gm`.
pub fn merge_then_split(gm: &GraphicalModel, i1: ConstraintId, i2: ConstraintId) -> Result<GraphicalModel> {
    let direct: Vec<HiddenVar> = gm
        .hiddens()
        .iter()
        .filter(|h| h.ends.contains(&i1) && h.ends.contains(&i2))
        .cloned()
        .collect();
    if direct.len() > 1 {
        return Err(Error::NotApplicable(format!("C{i1} and C{i2} share {} hidden variables", direct.len())));
    }
    let m = merge(gm, i1, i2)?;
    let id = m.fresh_constraint_id() - 1;
    let merged = m.constraint(id)?.clone();
    let before: HashSet<&str> = gm.hiddens().iter().map(|h| h.label.as_str()).collect();
    let mvars: Vec<String> = merged
        .hidden_labels()
        .filter(|l| !before.contains(l))
        .map(String::from)
        .collect();
    let mut pieces = Vec::new();
    for i in [i1, i2] {
        let ci = gm.constraint(i)?;
        let mut labels = ci.code.labels().to_vec();
        let mut eqs = Vec::new();
        for mv in &mvars {
            let t = m.hidden(mv)?.size;
            let mc = coords(mv, t);
            labels.extend(mc.iter().cloned());
            let c = m.hidden(mv)?.other_end(id);
            if let Ok(cc) = gm.constraint(c) {
                let mut ab = Vec::new();
                let mut mine = Vec::new();
                for side in [i1, i2] {
                    for l in cc.hidden_labels() {
                        if gm.hidden(l)?.other_end(c) == side {
                            for x in coords(l, gm.hidden(l)?.size) {
                                if side == i {
                                    mine.push(x.clone());
                                }
                                ab.push(x);
                            }
                        }
                    }
                }
                let p = cc.code.project(&ab)?;
                for (x, l) in ab.iter().enumerate() {
                    if mine.contains(l) {
                        let mut e = vec![l.clone()];
                        e.extend((0..p.k()).filter(|&j| p.generator().get(j, x)).map(|j| mc[j].clone()));
                        eqs.push(e);
                    }
                }
            } else {
                // The repetition inserted on the direct edge.
                let d = &direct[0];
                for (x, u) in coords(&d.label, d.size).into_iter().zip(mc) {
                    eqs.push(vec![x, u]);
                }
            }
        }
        let keep: Vec<Port> = ci
            .ports
            .iter()
            .filter(|p| merged.ports.contains(p))
            .cloned()
            .chain(mvars.iter().map(|l| Port::Hidden(l.clone())))
            .collect();
        let code = solve(&labels, &[&ci.code], &eqs)?.project(&m.port_coords(&keep)?)?;
        pieces.push((keep, code));
    }
    let mut back = split(&m, id, &pieces[0].0, &pieces[1].0, Some((&pieces[0].1, &pieces[1].1)))?;
    if !direct.is_empty() {
        let old = gm.constraint_ids();
        let r = back
            .constraints()
            .iter()
            .find(|c| !c.is_interface() && !old.contains(&c.id) && rep_remove(&back, c.id).is_ok())
            .map(|c| c.id)
            .ok_or_else(|| Error::NotApplicable("no repetition to remove".into()))?;
        back = rep_remove(&back, r)?;
    }
    Ok(back)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::tanner_graph;

    fn code(gm: &GraphicalModel) -> LinearCode {
        gm.realized_code(DEFAULT_DIM_CAP).unwrap()
    }

    #[test]
    fn rep_insert_remove_round_trip() {
        let tb = fixtures::tail_biting_hamming();
        let g = rep_insert(&tb, &Port::Hidden("S1".into())).unwrap();
        assert_eq!(g.constraints().len(), 9);
        assert_eq!(g.hiddens().len(), 9);
        let c9 = g.constraint(9).unwrap();
        assert_eq!(c9.ports, vec![Port::Hidden("S1".into()), Port::Hidden("S9".into())]);
        assert_eq!(c9.code.generator().to_strings(), vec!["11"]);
        assert!(g.constraint(8).unwrap().ports.contains(&Port::Hidden("S9".into())));
        assert_eq!(code(&g), code(&tb));
        assert_eq!(rep_remove(&g, 9).unwrap(), tb);
        let gv = rep_insert(&tb, &Port::Visible("V3".into())).unwrap();
        assert_eq!(code(&gv), code(&tb));
        assert_eq!(rep_remove(&gv, 9).unwrap(), tb);
        assert!(matches!(rep_remove(&tb, 1), Err(Error::NotARepetition(_))));
    }

    #[test]
    fn trivial_round_trip() {
        let tb = fixtures::tail_biting_hamming();
        let g = trivial_insert(&tb).unwrap();
        assert!(g.constraint(9).unwrap().is_trivial());
        assert_eq!(trivial_remove(&g, 9).unwrap(), tb);
        assert!(matches!(trivial_remove(&tb, 3), Err(Error::NotTrivial(_))));
    }

    #[test]
    fn ippc_round_trip_on_tanner_graph() {
        let tg = tanner_graph(&fixtures::ext_hamming8_h(), None).unwrap();
        let g = ippc_insert(&tg, &["V7".into(), "V8".into()]).unwrap();
        assert_eq!(code(&g), code(&tg));
        let p = g.constraints()[g.constraints().len() - 2].id;
        assert_eq!(ippc_remove(&g, p).unwrap(), tg);
        // Constrain the parity: no longer isolated.
        let mut bad = g.clone();
        let k = p + 1;
        let labels = bad.constraint(k).unwrap().code.labels().to_vec();
        bad.constraint_mut(k).unwrap().code = LinearCode::from_generator(labels, &BinaryMatrix::zeros(0, 1)).unwrap();
        assert!(matches!(ippc_remove(&bad, p), Err(Error::NotIsolated(_))));
    }

    #[test]
    fn internalize_cases() {
        let tb = fixtures::tail_biting_hamming();
        let g = internalize(&tb, "S1").unwrap();
        let c9 = g.constraint(9).unwrap();
        assert_eq!(c9.code.n() - c9.code.k(), 1);
        assert_eq!(internalize(&g, "S9").unwrap(), g);
        let g2 = internalize(&tb, "S2").unwrap();
        let c = g2.constraint(9).unwrap();
        assert_eq!(c.code.n() - c.code.k(), 2);
        assert_eq!(g2.qm_report().m, tb.qm_report().m);
    }

    #[test]
    fn remove_and_redefine_internal_on_hamming() {
        let g = rep_insert(&fixtures::tail_biting_hamming(), &Port::Hidden("S1".into())).unwrap();
        let (small, c) = remove_internal(&g, 9).unwrap();
        let want = BinaryMatrix::from_strs(&["11110000", "00110110", "00001111", "01100011", "10100110"]).unwrap();
        assert_eq!(c, LinearCode::from_generator(c.labels().to_vec(), &want).unwrap());
        assert!(small.validate(true).is_ok());
        let eq = redefine_internal(&g, 9, DEFAULT_DIM_CAP).unwrap();
        assert_eq!(eq.to_strings(), vec!["11001001"]);
        for r in 0..4 {
            assert_eq!(want.row_bits(r).iter().zip(eq.row_bits(0)).filter(|(a, b)| **a & *b == 1).count() % 2, 0);
        }
        assert_eq!(want.row_bits(4).iter().zip(eq.row_bits(0)).filter(|(a, b)| **a & *b == 1).count() % 2, 1);
        assert!(matches!(redefine_internal(&g, 1, 24), Err(Error::NotInternal(_))));
    }

    #[test]
    fn absorb_on_cycle_free_model() {
        let cf = fixtures::cycle_free_hamming_minus9();
        let j: Vec<String> = ["V1", "V2", "V5", "V8"].iter().map(|s| s.to_string()).collect();
        let g = absorb_spc(&cf, &j).unwrap();
        assert!(g.topology().cycle_free);
        assert!(g.verify_qm(2));
        let want = LinearCode::from_generator(code(&g).labels().to_vec(), &fixtures::ext_hamming8_h()).unwrap();
        assert_eq!(code(&g), want);
        assert_eq!(g.constraint(14).unwrap().code.generator().to_strings(), vec!["1011", "0110"]);
        assert_eq!(g.constraint(23).unwrap().code.generator().to_strings(), vec!["1010", "0111"]);
        assert_eq!(
            g.constraint(24).unwrap().code.generator().to_strings(),
            vec!["10101010", "01000001", "00010001", "00000101"]
        );
        for s in ["S14", "S17", "S20", "S23"] {
            assert_eq!(g.hidden_size(s), Some(2));
        }
        let one = absorb_spc(&cf, &["V3".to_string()]).unwrap();
        assert_eq!(code(&one).k(), 4);
    }

    #[test]
    fn absorb_can_join_cartesian_factors() {
        // Both constraints are 2-ary; the parity ties the two factors of
        // constraint 2 into one code of complexity 3.
        let gm = crate::gmf::read_gmf(
            "gmf 1\nvisible V1\nvisible V2\nvisible V3\nvisible V4\nvisible V5\nvisible V6\nvisible V7\n\
             hidden S1 1 1 2\n\
             constraint 1 interface\nbind 0 h:S1.0\nbind 1 v:V3\nbind 2 v:V5\ngenrow 101\ngenrow 011\n\
             constraint 2 interface\nbind 0 v:V1\nbind 1 h:S1.0\nbind 2 v:V7\nbind 3 v:V6\nbind 4 v:V4\nbind 5 v:V2\n\
             genrow 100001\ngenrow 010010\ngenrow 001001\ngenrow 000110\n",
        )
        .unwrap();
        assert_eq!(gm.qm_report().m, 1);
        let j: Vec<String> = ["V2", "V3", "V4", "V6"].iter().map(|s| s.to_string()).collect();
        let g = absorb_spc(&gm, &j).unwrap();
        assert_eq!(g.qm_report().m_hidden, 2);
        assert_eq!(g.qm_report().m_constraint, 3);
        let c = code(&gm);
        assert_eq!(code(&g), c.intersect(&solve(c.labels(), &[], &[j]).unwrap()).unwrap());
    }

    #[test]
    fn merge_and_split_back() {
        let cf = fixtures::cycle_free_hamming_minus9();
        let j: Vec<String> = ["V1", "V2", "V5", "V8"].iter().map(|s| s.to_string()).collect();
        let g = absorb_spc(&cf, &j).unwrap();
        let m = merge(&g, 14, 17).unwrap();
        assert_eq!(code(&m), code(&g));
        assert!(m.verify_qm(3) && !m.verify_qm(2));
        let c25 = m.constraint(25).unwrap();
        assert_eq!(c25.code.k(), 3);
        let merged_var = c25.hidden_labels().last().unwrap().to_string();
        assert_eq!(m.hidden_size(&merged_var), Some(3));
        let want25 = LinearCode::from_generator(
            vec!["h:S24.0", "h:S24.1", "h:S24.2", "h:S12.0", "h:S13.0", "h:S15.0", "h:S16.0"]
                .into_iter()
                .map(String::from)
                .collect(),
            &BinaryMatrix::from_strs(&["1000101", "0101100", "0010011"]).unwrap(),
        )
        .unwrap();
        assert!(c25.code.same_code(&want25));
        let want24 = LinearCode::from_generator(
            ["h:S24.0", "h:S24.1", "h:S24.2", "h:S20.0", "h:S20.1", "h:S23.0", "h:S23.1"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            &BinaryMatrix::from_strs(&["1001010", "0100001", "0010001", "0000101"]).unwrap(),
        )
        .unwrap();
        assert!(m.constraint(24).unwrap().code.same_code(&want24));
        let h = |l: &str| Port::Hidden(l.to_string());
        let back = split(&m, 25, &[h("S12"), h("S13"), h(&merged_var)], &[h("S15"), h("S16"), h(&merged_var)], None).unwrap();
        assert_eq!(code(&back), code(&g));
        assert!(back.verify_qm(2));
        assert_eq!(back.hidden_size(&merged_var), Some(2));
        assert_eq!(back.constraints().len(), g.constraints().len());
        assert_eq!(back.hiddens().iter().map(|h| h.size).sum::<usize>(), g.hiddens().iter().map(|h| h.size).sum::<usize>());
    }

    #[test]
    fn split_errors_and_empty_side() {
        let tg = tanner_graph(&fixtures::hamming7_h(), None).unwrap();
        let c = tg.constraints().last().unwrap().clone();
        let all = c.ports.clone();
        let g = split(&tg, c.id, &all, &[], None).unwrap();
        assert!(g.constraints().iter().any(|x| x.is_trivial()));
        assert_eq!(code(&g), code(&tg));
        assert!(matches!(split(&tg, c.id, &all[..1], &[], None), Err(Error::InvalidPartition(_))));
        assert!(matches!(
            split(&tg, c.id, &all[..2], &all[2..], None),
            Err(Error::NotSplittable(_))
        ));
    }

    #[test]
    fn merge_without_common_neighbors() {
        let tg = tanner_graph(&fixtures::hamming7_h(), None).unwrap();
        let g = merge(&tg, 1, 2).unwrap();
        assert_eq!(code(&g), code(&tg));
        let merged = g.constraint(g.constraints()[0].id).unwrap();
        assert_eq!(merged.code.n(), tg.constraint(1).unwrap().code.n() + tg.constraint(2).unwrap().code.n());
    }

    #[test]
    fn normalize_fixtures() {
        for gm in [
            fixtures::tail_biting_hamming(),
            fixtures::cycle_free_hamming_minus9(),
            tanner_graph(&fixtures::hamming7_h(), None).unwrap(),
        ] {
            let (h, trace) = normalize_to_tanner(&gm, DEFAULT_DIM_CAP).unwrap();
            let c = code(&gm);
            assert_eq!(h.rows(), c.n() - c.k());
            assert_eq!(LinearCode::from_parity_check(c.labels().to_vec(), &h).unwrap(), c);
            let parsed = ExtractionTrace::parse(&trace.to_text()).unwrap();
            assert_eq!(parsed, trace);
            let end = replay(&gm, &parsed).unwrap();
            assert_eq!(code(&end), c);
        }
    }

    #[test]
    fn trace_text_rejects_bad_lines() {
        assert!(ExtractionTrace::parse("1 merge 1 2\n").is_err());
        assert!(ExtractionTrace::parse("# trace 1\n2 merge 1 2\n").is_err());
        assert!(ExtractionTrace::parse("# trace 1\n1 merge 1\n").is_err());
        assert!(ExtractionTrace::parse("# trace 1\n1 bogus 1\n").is_err());
        let t = ExtractionTrace::parse("# trace 1\n# note\n1 trivial_insert # adds one\n#@ 1 census\n").unwrap();
        assert_eq!(t.header, vec!["note"]);
        assert_eq!(t.steps[0].summary, "adds one");
        assert_eq!(t.checkpoints, vec![(1, "census".to_string())]);
    }

    pub(crate) mod props {
        use super::*;
        use crate::canon::isomorphic;
        use crate::random::{random_model, random_parity_check, ModelShape};
        use proptest::prelude::*;
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;

        pub(crate) fn model(seed: u64, extra: usize) -> (GraphicalModel, ChaCha8Rng) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let shape = ModelShape {
                max_extra_edges: extra,
                ..ModelShape::default()
            };
            (random_model(&mut rng, &shape), rng)
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn repetition_pairs(seed in any::<u64>()) {
                let (gm, mut rng) = model(seed, 1);
                let c = code(&gm);
                let p = if rng.gen_bool(0.5) && !gm.hiddens().is_empty() {
                    Port::Hidden(gm.hiddens()[rng.gen_range(0..gm.hiddens().len())].label.clone())
                } else {
                    Port::Visible(gm.visibles()[rng.gen_range(0..gm.visibles().len())].clone())
                };
                let g = rep_insert(&gm, &p).unwrap();
                prop_assert_eq!(code(&g), c);
                prop_assert_eq!(g.constraints().len(), gm.constraints().len() + 1);
                let r = g.constraints().last().unwrap().id;
                prop_assert_eq!(rep_remove(&g, r).unwrap(), gm);
            }

            #[test]
            fn merge_split_pairs(seed in any::<u64>()) {
                let (gm, mut rng) = model(seed, 1);
                let ids = gm.constraint_ids();
                let a = ids[rng.gen_range(0..ids.len())];
                let b = loop {
                    let b = ids[rng.gen_range(0..ids.len())];
                    if b != a { break b; }
                };
                let m = merge(&gm, a, b).unwrap();
                prop_assert_eq!(code(&m), code(&gm));
                let back = merge_then_split(&gm, a, b).unwrap();
                prop_assert_eq!(code(&back), code(&gm));
                prop_assert!(isomorphic(&back, &gm, 24).unwrap());
            }

            #[test]
            fn random_splits_preserve_code(seed in any::<u64>()) {
                let (gm, mut rng) = model(seed, 1);
                let ids = gm.constraint_ids();
                let j = ids[rng.gen_range(0..ids.len())];
                let ports = gm.constraint(j).unwrap().ports.clone();
                let (mut s1, mut s2) = (Vec::new(), Vec::new());
                for p in ports {
                    match (p.is_hidden(), rng.gen_range(0..3)) {
                        (_, 0) => s1.push(p),
                        (_, 1) => s2.push(p),
                        (true, _) => { s1.push(p.clone()); s2.push(p) }
                        (false, _) => s1.push(p),
                    }
                }
                match split(&gm, j, &s1, &s2, None) {
                    Ok(g) => prop_assert_eq!(code(&g), code(&gm)),
                    Err(e) => prop_assert!(matches!(e, Error::NotSplittable(_)), "{e}"),
                }
            }

            #[test]
            fn ippc_pairs(seed in any::<u64>()) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let n = rng.gen_range(4..10);
                let k = rng.gen_range(1..n);
                let tg = tanner_graph(&random_parity_check(&mut rng, n, k), None);
                prop_assume!(tg.is_ok());
                let tg = tg.unwrap();
                let vars: Vec<String> = tg.visibles().iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
                prop_assume!(!vars.is_empty());
                let g = ippc_insert(&tg, &vars).unwrap();
                prop_assert_eq!(code(&g), code(&tg));
                let p = g.constraints()[g.constraints().len() - 2].id;
                prop_assert_eq!(ippc_remove(&g, p).unwrap(), tg);
            }

            #[test]
            fn normalize_realizes_code(seed in any::<u64>()) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let shape = ModelShape { max_behavior_dim: 16, proper: false, ..ModelShape::default() };
                let gm = random_model(&mut rng, &shape);
                let (h, trace) = normalize_to_tanner(&gm, 16).unwrap();
                let c = code(&gm);
                prop_assert_eq!(LinearCode::from_parity_check(c.labels().to_vec(), &h).unwrap(), c);
                let end = replay(&gm, &ExtractionTrace::parse(&trace.to_text()).unwrap()).unwrap();
                prop_assert_eq!(code(&end), code(&gm));
            }

            #[test]
            fn absorb_matches_intersection(seed in any::<u64>()) {
                let (gm, mut rng) = model(seed, 0);
                let j: Vec<String> = gm.visibles().iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
                prop_assume!(!j.is_empty());
                let g = absorb_spc(&gm, &j).unwrap();
                prop_assert!(g.topology().cycle_free);
                prop_assert!(g.qm_report().m_hidden <= gm.qm_report().m_hidden + 1);
                for c in gm.constraints() {
                    let before = c.code.n() - c.code.k();
                    let after = g.constraint(c.id).unwrap();
                    prop_assert!(after.code.n() - after.code.k() <= before + 1);
                }
                let c = code(&gm);
                let spc = solve(c.labels(), &[], &[j.clone()]).unwrap();
                prop_assert_eq!(code(&g), c.intersect(&spc).unwrap());
            }

            #[test]
            fn internal_removal_grows_code(seed in any::<u64>()) {
                let (gm, _) = model(seed, 1);
                let internal: Vec<ConstraintId> = gm.constraints().iter().filter(|c| !c.is_interface()).map(|c| c.id).collect();
                prop_assume!(!internal.is_empty());
                let (_, c) = remove_internal(&gm, internal[0]).unwrap();
                prop_assert!(c.k() >= code(&gm).k());
                prop_assert_eq!(code(&gm).intersect(&c).unwrap(), code(&gm));
            }
        }
    }
}
