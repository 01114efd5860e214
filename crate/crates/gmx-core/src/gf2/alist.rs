//! MacKay alist format for sparse parity-check matrices.
//!
//! Layout: `n m`, the two maximum degrees, the n column degrees, the m row
//! degrees, then n lines of 1-based row indices and m lines of 1-based column
//! indices. Zero padding is accepted on input and never written.

use super::matrix::BinaryMatrix;
use crate::error::{Error, Result};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(format!("alist: {}", msg.into()))
}

pub fn read_alist(text: &str) -> Result<BinaryMatrix> {
    let raw: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.starts_with('#'))
        .collect();
    let mut pos = 0usize;
    let parse_line = |line: &str, what: &str| -> Result<Vec<usize>> {
        line.split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| parse_err(format!("bad number {t:?} in {what}"))))
            .collect()
    };
    let mut header = |want: usize, what: &str| -> Result<Vec<usize>> {
        while pos < raw.len() && raw[pos].is_empty() {
            pos += 1;
        }
        let line = raw.get(pos).ok_or_else(|| parse_err(format!("missing {what}")))?;
        pos += 1;
        let v = parse_line(line, what)?;
        if v.len() != want {
            return Err(parse_err(format!("{what}: expected {want} numbers, got {}", v.len())));
        }
        Ok(v)
    };
    let head = header(2, "header")?;
    let (n, m) = (head[0], head[1]);
    let maxd = header(2, "max degrees")?;
    let col_deg = header(n, "column degrees")?;
    let row_deg = header(m, "row degrees")?;
    // Adjacency lists; an empty (or all-zero) line stands for degree 0.
    let mut list = |deg: usize, what: &str| -> Result<Vec<usize>> {
        if deg > 0 {
            while pos < raw.len() && raw[pos].is_empty() {
                pos += 1;
            }
        }
        let line = raw.get(pos).copied().unwrap_or("");
        let v: Vec<usize> = parse_line(line, what)?.into_iter().filter(|&x| x != 0).collect();
        if deg == 0 && !v.is_empty() {
            return Ok(Vec::new());
        }
        pos += 1;
        Ok(v)
    };
    let mut h = BinaryMatrix::zeros(m, n);
    for (c, &d) in col_deg.iter().enumerate() {
        let entries = list(d, "column list")?;
        if entries.len() != d || d > maxd[0] {
            return Err(parse_err(format!("column {} degree mismatch", c + 1)));
        }
        for r in entries {
            if r > m {
                return Err(parse_err(format!("row index {r} out of range")));
            }
            if h.get(r - 1, c) {
                return Err(parse_err(format!("duplicate entry ({r}, {})", c + 1)));
            }
            h.set(r - 1, c, true);
        }
    }
    for (r, &d) in row_deg.iter().enumerate() {
        let mut entries = list(d, "row list")?;
        entries.sort_unstable();
        entries.dedup();
        if entries.len() != d || d > maxd[1] || h.row_weight(r) != d {
            return Err(parse_err(format!("row {} degree mismatch", r + 1)));
        }
        for c in entries {
            if c > n || !h.get(r, c - 1) {
                return Err(parse_err(format!("row {} lists column {c} inconsistently", r + 1)));
            }
        }
    }
    Ok(h)
}

pub fn write_alist(h: &BinaryMatrix) -> String {
    let (m, n) = (h.rows(), h.cols());
    let cols: Vec<Vec<usize>> = (0..n).map(|c| h.column_support(c)).collect();
    let rows: Vec<Vec<usize>> = (0..m).map(|r| h.row_support(r)).collect();
    let join = |v: &[usize]| {
        v.iter()
            .map(|x| (x + 1).to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut s = format!("{n} {m}\n");
    s += &format!(
        "{} {}\n",
        cols.iter().map(Vec::len).max().unwrap_or(0),
        rows.iter().map(Vec::len).max().unwrap_or(0)
    );
    s += &cols.iter().map(|c| c.len().to_string()).collect::<Vec<_>>().join(" ");
    s.push('\n');
    s += &rows.iter().map(|r| r.len().to_string()).collect::<Vec<_>>().join(" ");
    s.push('\n');
    for c in &cols {
        s += &join(c);
        s.push('\n');
    }
    for r in &rows {
        s += &join(r);
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reads_zero_padded_file() {
        let text = "3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n2 0\n1 2\n2 3\n";
        let h = read_alist(text).unwrap();
        assert_eq!(h.to_strings(), vec!["110", "011"]);
        assert!(!write_alist(&h).contains(" 0"));
    }

    #[test]
    fn rejects_inconsistent_lists() {
        let text = "2 1\n1 2\n1 1\n2\n1\n1\n1 1\n";
        assert!(read_alist(text).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(rows in proptest::collection::vec(proptest::collection::vec(0u8..2, 9), 1..7)) {
            let h = BinaryMatrix::from_rows(9, &rows).unwrap();
            let text = write_alist(&h);
            let back = read_alist(&text).unwrap();
            prop_assert_eq!(&back, &h);
            prop_assert_eq!(write_alist(&back), text);
        }
    }
}
