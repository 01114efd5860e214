//! GMF, a line-oriented text format for graphical models.
//!
//! ```text
//! gmf 1
//! visible V1
//! hidden S1 2 1 2
//! constraint 1 interface
//! bind 0 v:V1
//! bind 1 h:S1.0
//! bind 2 h:S1.1
//! genrow 110
//! ```
//!
//! `hidden` lines give label, alphabet index set size and the two endpoint
//! constraint ids. Binds list local coordinates in order; the components of
//! a hidden variable are consecutive. Generator rows are written in reduced
//! row echelon form, so writing is canonical and round trips are exact.
//! Blank lines and lines starting with `#` are ignored.

use crate::error::{Error, Result};
use crate::gf2::{BinaryMatrix, LinearCode};
use crate::model::{expand_ports, Constraint, ConstraintId, GraphicalModel, HiddenVar, Port};

pub const GMF_VERSION: u32 = 1;

pub fn write_gmf(gm: &GraphicalModel) -> String {
    let mut s = format!("gmf {GMF_VERSION}\n");
    for v in gm.visibles() {
        s += &format!("visible {v}\n");
    }
    for h in gm.hiddens() {
        s += &format!("hidden {} {} {} {}\n", h.label, h.size, h.ends[0], h.ends[1]);
    }
    for c in gm.constraints() {
        let kind = if c.is_interface() { "interface" } else { "internal" };
        s += &format!("constraint {} {kind}\n", c.id);
        for (i, l) in c.code.labels().iter().enumerate() {
            s += &format!("bind {i} {l}\n");
        }
        for row in c.code.generator().to_strings() {
            s += &format!("genrow {row}\n");
        }
    }
    s
}

fn perr(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("gmf line {line}: {msg}"))
}

struct Pending {
    id: ConstraintId,
    line: usize,
    kind: String,
    binds: Vec<String>,
    rows: Vec<String>,
}

pub fn read_gmf(text: &str) -> Result<GraphicalModel> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, l)) if l == format!("gmf {GMF_VERSION}") => {}
        Some((n, l)) => return Err(perr(n, format!("unsupported header {l:?}"))),
        None => return Err(perr(0, "empty file")),
    }
    let mut visibles = Vec::new();
    let mut hiddens: Vec<HiddenVar> = Vec::new();
    let mut pending: Vec<Pending> = Vec::new();
    for (n, l) in lines {
        let tok: Vec<&str> = l.split_whitespace().collect();
        match tok[0] {
            "visible" if tok.len() == 2 => visibles.push(tok[1].to_string()),
            "hidden" if tok.len() == 5 => {
                let num = |t: &str| t.parse::<u64>().map_err(|_| perr(n, format!("bad number {t:?}")));
                hiddens.push(HiddenVar {
                    label: tok[1].to_string(),
                    size: num(tok[2])? as usize,
                    ends: [num(tok[3])? as ConstraintId, num(tok[4])? as ConstraintId],
                });
            }
            "constraint" if tok.len() == 3 => {
                if tok[2] != "interface" && tok[2] != "internal" {
                    return Err(perr(n, format!("constraint kind {:?}", tok[2])));
                }
                pending.push(Pending {
                    id: tok[1].parse().map_err(|_| perr(n, "bad constraint id"))?,
                    line: n,
                    kind: tok[2].to_string(),
                    binds: Vec::new(),
                    rows: Vec::new(),
                });
            }
            "bind" if tok.len() == 3 => {
                let c = pending.last_mut().ok_or_else(|| perr(n, "bind before constraint"))?;
                if tok[1] != c.binds.len().to_string() {
                    return Err(perr(n, format!("expected local coordinate {}", c.binds.len())));
                }
                c.binds.push(tok[2].to_string());
            }
            "genrow" if tok.len() == 2 => {
                let c = pending.last_mut().ok_or_else(|| perr(n, "genrow before constraint"))?;
                c.rows.push(tok[1].to_string());
            }
            _ => return Err(perr(n, format!("unrecognized line {l:?}"))),
        }
    }
    let size_of = |l: &str| hiddens.iter().find(|h| h.label == l).map(|h| h.size);
    let mut constraints = Vec::new();
    for p in pending {
        let ports = group_ports(&p, &size_of)?;
        let coords = expand_ports(&ports, size_of)?;
        if coords != p.binds {
            return Err(perr(p.line, "bindings do not list hidden components in order"));
        }
        let rows: Vec<&str> = p.rows.iter().map(String::as_str).collect();
        let g = if rows.is_empty() {
            BinaryMatrix::zeros(0, coords.len())
        } else {
            BinaryMatrix::from_strs(&rows)?
        };
        let code = LinearCode::from_generator(coords, &g).map_err(|e| perr(p.line, e))?;
        let c = Constraint { id: p.id, ports, code };
        if c.is_interface() != (p.kind == "interface") {
            return Err(perr(p.line, format!("constraint {} is not {}", p.id, p.kind)));
        }
        constraints.push(c);
    }
    GraphicalModel::new(visibles, hiddens, constraints)
}

fn group_ports(p: &Pending, size_of: &impl Fn(&str) -> Option<usize>) -> Result<Vec<Port>> {
    let mut ports = Vec::new();
    let mut i = 0;
    while i < p.binds.len() {
        let b = &p.binds[i];
        if let Some(v) = b.strip_prefix("v:") {
            ports.push(Port::Visible(v.to_string()));
            i += 1;
        } else if let Some(h) = b.strip_prefix("h:") {
            let (label, comp) = h
                .rsplit_once('.')
                .ok_or_else(|| perr(p.line, format!("hidden binding {b:?} lacks a component")))?;
            if comp != "0" {
                return Err(perr(p.line, format!("hidden {label} must start at component 0")));
            }
            let t = size_of(label).ok_or_else(|| perr(p.line, format!("unknown hidden {label}")))?;
            ports.push(Port::Hidden(label.to_string()));
            i += t;
        } else {
            return Err(perr(p.line, format!("binding {b:?}")));
        }
    }
    Ok(ports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn round_trip_golden_models() {
        for gm in [fixtures::tail_biting_hamming(), fixtures::cycle_free_hamming_minus9()] {
            let text = write_gmf(&gm);
            let back = read_gmf(&text).unwrap();
            assert_eq!(back, gm);
            assert_eq!(write_gmf(&back), text);
        }
    }

    #[test]
    fn round_trip_tanner_graph() {
        let tg = crate::model::tanner_graph(&fixtures::hamming7_h(), None).unwrap();
        assert_eq!(read_gmf(&write_gmf(&tg)).unwrap(), tg);
    }

    #[test]
    fn rejects_malformed() {
        assert!(read_gmf("gmf 2\n").is_err());
        assert!(read_gmf("gmf 1\nvisible V1\nconstraint 1 internal\nbind 0 v:V1\ngenrow 1\n").is_err());
        assert!(read_gmf("gmf 1\nvisible V1\nconstraint 1 interface\nbind 1 v:V1\n").is_err());
        let ok = read_gmf("gmf 1\n# one bit\nvisible V1\nconstraint 1 interface\nbind 0 v:V1\ngenrow 1\n").unwrap();
        assert_eq!(ok.realized_code(8).unwrap().k(), 1);
    }
}
