//! Canonical relabeling for isomorphism checks.
//!
//! A hidden variable determined by the visible variables is put in a
//! normal basis: its components, read as linear functions of the realized
//! code's information bits, are replaced by the reduced echelon basis of
//! their span. Constraints are then numbered in breadth-first order from
//! the owner of the first visible variable, visiting hidden bindings in the
//! order of their normalized functions (then the signature of the
//! constraint at the far end), and hidden variables are numbered
//! in order of discovery. Hidden variables that are not determined (or
//! whose components are dependent) keep their basis and are ordered by
//! size and label, so two models agreeing up to the relabeling and basis
//! change of such variables may still compare unequal.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::Result;
use crate::gf2::{BinaryMatrix, LinearCode};
use crate::model::{hcoord, Constraint, ConstraintId, GraphicalModel, HiddenVar, Port};

/// Sort key of a hidden variable: normalized functions, or a marker.
type Key = (u8, Vec<String>, usize, String);

struct Normal {
    key: Key,
    /// `s' = a s`, when normalized.
    a: Option<BinaryMatrix>,
}

fn normalize(gm: &GraphicalModel, dim_cap: usize) -> Result<HashMap<String, Normal>> {
    let b = gm.behavior(dim_cap)?;
    let nv = gm.visibles().len();
    let g = b.generator();
    let piv = b.pivots();
    let obs: Vec<usize> = (0..g.rows()).filter(|&r| piv[r] < nv).collect();
    let hidden_rows: Vec<usize> = (0..g.rows()).filter(|&r| piv[r] >= nv).collect();
    let mut out = HashMap::new();
    for h in gm.hiddens() {
        let cols: Vec<usize> = (0..h.size)
            .map(|c| b.index_of(&hcoord(&h.label, c)).expect("behavior has every component"))
            .collect();
        let determined = hidden_rows.iter().all(|&r| cols.iter().all(|&c| !g.get(r, c)));
        let v = g.select_rows(&obs).select_columns(&cols);
        let normal = if determined && v.rank() == h.size {
            let vt = v.transpose();
            let aug = vt.hstack(&BinaryMatrix::identity(h.size))?;
            let (red, _) = aug.rref();
            let k = obs.len();
            let fun = red.select_columns(&(0..k).collect::<Vec<_>>());
            let a = red.select_columns(&(k..k + h.size).collect::<Vec<_>>());
            Normal {
                key: (0, fun.to_strings(), h.size, String::new()),
                a: Some(a),
            }
        } else {
            Normal {
                key: (1, Vec::new(), h.size, h.label.clone()),
                a: None,
            }
        };
        out.insert(h.label.clone(), normal);
    }
    Ok(out)
}

/// Canonically relabeled copy of `gm`: constraint ids `1..`, hidden labels
/// `S1..`, bindings ordered visibles first (by label) then hidden variables
/// by number, local codes in the normal hidden bases.
pub fn canonical_form(gm: &GraphicalModel, dim_cap: usize) -> Result<GraphicalModel> {
    let normal = normalize(gm, dim_cap)?;
    // Constraint signature: sorted visible labels and sorted hidden keys.
    let signature = |c: &Constraint| -> (Vec<String>, Vec<Key>) {
        let mut v: Vec<String> = c.visible_labels().map(String::from).collect();
        v.sort();
        let mut k: Vec<Key> = c.hidden_labels().map(|l| normal[l].key.clone()).collect();
        k.sort();
        (v, k)
    };
    let sigs: HashMap<ConstraintId, (Vec<String>, Vec<Key>)> =
        gm.constraints().iter().map(|c| (c.id, signature(c))).collect();
    let sorted_hidden = |c: &Constraint| -> Vec<String> {
        let mut hs: Vec<(&Key, &(Vec<String>, Vec<Key>), &str)> = c
            .hidden_labels()
            .map(|l| {
                let far = gm.hidden(l).expect("bound").other_end(c.id);
                (&normal[l].key, &sigs[&far], l)
            })
            .collect();
        hs.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        hs.into_iter().map(|x| x.2.to_string()).collect()
    };
    let mut order: Vec<ConstraintId> = Vec::new();
    let mut hidden_order: Vec<String> = Vec::new();
    let mut seen_c = HashSet::new();
    let mut seen_h = HashSet::new();
    let mut starts: Vec<ConstraintId> = Vec::new();
    for v in gm.visibles() {
        starts.push(gm.visible_owner(v)?);
    }
    let mut rest: Vec<&Constraint> = gm.constraints().iter().collect();
    rest.sort_by_key(|c| (sigs[&c.id].clone(), c.id));
    starts.extend(rest.iter().map(|c| c.id));
    for s in starts {
        if !seen_c.insert(s) {
            continue;
        }
        order.push(s);
        let mut queue = VecDeque::from([s]);
        while let Some(c) = queue.pop_front() {
            let con = gm.constraint(c)?;
            for l in sorted_hidden(con) {
                if seen_h.insert(l.clone()) {
                    hidden_order.push(l.clone());
                }
                let n = gm.hidden(&l)?.other_end(c);
                if seen_c.insert(n) {
                    order.push(n);
                    queue.push_back(n);
                }
            }
        }
    }
    let new_id: HashMap<ConstraintId, ConstraintId> =
        order.iter().enumerate().map(|(i, &c)| (c, i as ConstraintId + 1)).collect();
    let new_label: HashMap<String, String> =
        hidden_order.iter().enumerate().map(|(i, l)| (l.clone(), format!("S{}", i + 1))).collect();
    let hiddens: Vec<HiddenVar> = hidden_order
        .iter()
        .map(|l| {
            let h = gm.hidden(l).expect("listed");
            let mut ends = [new_id[&h.ends[0]], new_id[&h.ends[1]]];
            ends.sort_unstable();
            HiddenVar {
                label: new_label[l].clone(),
                size: h.size,
                ends,
            }
        })
        .collect();
    let mut constraints = Vec::new();
    for &c in &order {
        let con = gm.constraint(c)?;
        // Change of basis on each hidden block, then relabel.
        let code = &con.code;
        let mut g = code.generator().clone();
        for l in con.hidden_labels() {
            if let Some(a) = &normal[l].a {
                let t = a.rows();
                let cols: Vec<usize> = (0..t).map(|i| code.index_of(&hcoord(l, i)).expect("bound")).collect();
                let block = g.select_columns(&cols).mul(&a.transpose())?;
                for r in 0..g.rows() {
                    for (i, &col) in cols.iter().enumerate() {
                        g.set(r, col, block.get(r, i));
                    }
                }
            }
        }
        let labels: Vec<String> = code
            .labels()
            .iter()
            .map(|x| match x.strip_prefix("h:").and_then(|r| r.rsplit_once('.')) {
                Some((l, i)) => format!("h:{}.{i}", new_label[l]),
                None => x.clone(),
            })
            .collect();
        let mut ports: Vec<Port> = Vec::new();
        let mut vis: Vec<&str> = con.visible_labels().collect();
        vis.sort();
        ports.extend(vis.into_iter().map(|v| Port::Visible(v.to_string())));
        let mut hs: Vec<&str> = con.hidden_labels().collect();
        hs.sort_by_key(|l| hidden_order.iter().position(|x| x == l));
        ports.extend(hs.into_iter().map(|l| Port::Hidden(new_label[l].clone())));
        let coords = crate::model::expand_ports(&ports, |l| hiddens.iter().find(|h| h.label == l).map(|h| h.size))?;
        let code = LinearCode::from_generator(labels, &g)?.reorder(&coords)?;
        constraints.push(Constraint {
            id: new_id[&c],
            ports,
            code,
        });
    }
    let out = GraphicalModel {
        visibles: gm.visibles().to_vec(),
        hiddens,
        constraints,
    };
    out.validate(false)?;
    Ok(out)
}

/// Equality of canonical forms.
pub fn isomorphic(a: &GraphicalModel, b: &GraphicalModel, dim_cap: usize) -> Result<bool> {
    Ok(canonical_form(a, dim_cap)? == canonical_form(b, dim_cap)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::DEFAULT_DIM_CAP;
    use crate::transform::{absorb_spc, merge, rep_insert, split};

    #[test]
    fn canonical_form_is_idempotent_and_preserves_code() {
        for gm in [fixtures::tail_biting_hamming(), fixtures::cycle_free_hamming_minus9()] {
            let c = canonical_form(&gm, DEFAULT_DIM_CAP).unwrap();
            assert_eq!(canonical_form(&c, DEFAULT_DIM_CAP).unwrap(), c);
            assert_eq!(c.realized_code(24).unwrap(), gm.realized_code(24).unwrap());
        }
    }

    #[test]
    fn relabeling_is_invisible() {
        let gm = fixtures::cycle_free_hamming_minus9();
        let moved = crate::gmf::read_gmf(
            &crate::gmf::write_gmf(&gm)
                .replace("S12 ", "S99 ")
                .replace("h:S12.", "h:S99."),
        )
        .unwrap();
        assert_ne!(moved, gm);
        assert!(isomorphic(&moved, &gm, DEFAULT_DIM_CAP).unwrap());
        let other = rep_insert(&gm, &Port::Hidden("S12".into())).unwrap();
        assert!(!isomorphic(&other, &gm, DEFAULT_DIM_CAP).unwrap());
    }

    #[test]
    fn merge_then_split_is_isomorphic() {
        let cf = fixtures::cycle_free_hamming_minus9();
        let j: Vec<String> = ["V1", "V2", "V5", "V8"].iter().map(|s| s.to_string()).collect();
        let g = absorb_spc(&cf, &j).unwrap();
        let m = merge(&g, 14, 17).unwrap();
        let mv = m.constraint(25).unwrap().hidden_labels().last().unwrap().to_string();
        let h = |l: &str| Port::Hidden(l.to_string());
        let back = split(&m, 25, &[h("S12"), h("S13"), h(&mv)], &[h("S15"), h("S16"), h(&mv)], None).unwrap();
        assert!(isomorphic(&back, &g, DEFAULT_DIM_CAP).unwrap());
    }
}
