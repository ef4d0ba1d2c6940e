//! MacKay's alist format for sparse parity-check matrices.
//!
//! ```text
//! N M
//! max_col_weight max_row_weight
//! col weights (N)
//! row weights (M)
//! N lines of 1-based row indices, zero padded
//! M lines of 1-based column indices, zero padded
//! ```

use std::collections::BTreeSet;
use std::fmt::Write;

use super::{Edge, TannerGraph};
use crate::error::{Error, Result};

const MAX_DIM: usize = 1 << 24;

struct Tokens<'a> {
    iter: Box<dyn Iterator<Item = (usize, &'a str)> + 'a>,
    line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let iter = text
            .lines()
            .enumerate()
            .flat_map(|(i, l)| l.split_whitespace().map(move |t| (i + 1, t)));
        Tokens {
            iter: Box::new(iter),
            line: 1,
        }
    }

    fn next(&mut self, what: &str) -> Result<usize> {
        let (line, tok) = self.iter.next().ok_or(Error::Parse {
            line: self.line,
            msg: format!("unexpected end of file, expected {what}"),
        })?;
        self.line = line;
        tok.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("expected {what}, got {tok:?}"),
        })
    }

    fn err(&self, msg: String) -> Error {
        Error::Parse {
            line: self.line,
            msg,
        }
    }
}

pub fn parse_alist(text: &str) -> Result<TannerGraph> {
    let mut t = Tokens::new(text);
    let n = t.next("N")?;
    let m = t.next("M")?;
    if n == 0 || m == 0 || n > MAX_DIM || m > MAX_DIM {
        return Err(t.err(format!("bad dimensions N={n} M={m}")));
    }
    let max_col = t.next("max column weight")?;
    let max_row = t.next("max row weight")?;
    if max_col > m || max_row > n {
        return Err(t.err(format!("max weights {max_col}/{max_row} exceed dimensions")));
    }
    let mut col_w = Vec::with_capacity(n);
    for _ in 0..n {
        let w = t.next("column weight")?;
        if w > max_col {
            return Err(t.err(format!("column weight {w} exceeds max {max_col}")));
        }
        col_w.push(w);
    }
    let mut row_w = Vec::with_capacity(m);
    for _ in 0..m {
        let w = t.next("row weight")?;
        if w > max_row {
            return Err(t.err(format!("row weight {w} exceeds max {max_row}")));
        }
        row_w.push(w);
    }
    let mut from_cols = BTreeSet::new();
    for (col, &w) in col_w.iter().enumerate() {
        for k in 0..max_col {
            let r = t.next("row index")?;
            if k < w {
                if r == 0 || r > m {
                    return Err(t.err(format!("row index {r} out of range in column {}", col + 1)));
                }
                if !from_cols.insert((r - 1, col)) {
                    return Err(t.err(format!("duplicate entry ({r}, {})", col + 1)));
                }
            } else if r != 0 {
                return Err(t.err(format!("expected zero padding, got {r}")));
            }
        }
    }
    let mut from_rows = BTreeSet::new();
    for (row, &w) in row_w.iter().enumerate() {
        for k in 0..max_row {
            let c = t.next("column index")?;
            if k < w {
                if c == 0 || c > n {
                    return Err(t.err(format!("column index {c} out of range in row {}", row + 1)));
                }
                if !from_rows.insert((row, c - 1)) {
                    return Err(t.err(format!("duplicate entry ({}, {c})", row + 1)));
                }
            } else if c != 0 {
                return Err(t.err(format!("expected zero padding, got {c}")));
            }
        }
    }
    if from_cols != from_rows {
        return Err(t.err("column and row lists describe different matrices".into()));
    }
    let edges = from_cols
        .into_iter()
        .map(|(cn, vn)| Edge {
            cn,
            vn,
            block: None,
        })
        .collect();
    Ok(TannerGraph::from_edges(n, m, edges))
}

pub fn write_alist(g: &TannerGraph) -> String {
    let col_w: Vec<usize> = (0..g.n()).map(|n| g.vn_degree(n)).collect();
    let row_w: Vec<usize> = (0..g.m()).map(|m| g.cn_degree(m)).collect();
    let max_col = col_w.iter().copied().max().unwrap_or(0);
    let max_row = row_w.iter().copied().max().unwrap_or(0);
    let mut s = String::new();
    let join = |v: Vec<usize>| {
        v.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    writeln!(s, "{} {}", g.n(), g.m()).unwrap();
    writeln!(s, "{max_col} {max_row}").unwrap();
    writeln!(s, "{}", join(col_w)).unwrap();
    writeln!(s, "{}", join(row_w)).unwrap();
    for n in 0..g.n() {
        let mut v: Vec<usize> = g.vn_neighbors(n).map(|m| m + 1).collect();
        v.sort_unstable();
        v.resize(max_col, 0);
        writeln!(s, "{}", join(v)).unwrap();
    }
    for m in 0..g.m() {
        let mut v: Vec<usize> = g.cn_neighbors(m).map(|n| n + 1).collect();
        v.resize(max_row, 0);
        writeln!(s, "{}", join(v)).unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::QcCode;

    const HAMMING: &str = "7 3\n3 4\n1 1 1 2 2 2 3\n4 4 4\n\
        1 0 0\n2 0 0\n3 0 0\n1 2 0\n1 3 0\n2 3 0\n1 2 3\n\
        1 4 5 7\n2 4 6 7\n3 5 6 7\n";

    #[test]
    fn parses_hamming() {
        let g = parse_alist(HAMMING).unwrap();
        assert_eq!((g.n(), g.m()), (7, 3));
        assert_eq!(g.cn_neighbors(0).collect::<Vec<_>>(), vec![0, 3, 4, 6]);
        assert_eq!(g.vn_degree(6), 3);
        assert!(g.syndrome_ok(&[1, 1, 1, 0, 0, 0, 1]));
    }

    #[test]
    fn round_trip_of_expanded_qc_code() {
        let c = QcCode::parse("2 4 5\n0 1 -1 3\n2 -1 4 0\n").unwrap();
        let g = c.expand();
        let back = parse_alist(&write_alist(&g)).unwrap();
        let pairs = |g: &TannerGraph| g.edges().iter().map(|e| (e.cn, e.vn)).collect::<Vec<_>>();
        assert_eq!(pairs(&back), pairs(&g));
    }

    #[test]
    fn rejects_inconsistent_lists() {
        let bad = HAMMING.replace("1 4 5 7\n", "1 4 5 6\n");
        assert!(parse_alist(&bad).is_err());
        assert!(parse_alist("7 3\n3 4\n1 1").is_err());
        assert!(parse_alist("0 0\n").is_err());
        let pad = HAMMING.replace("1 0 0\n2 0 0", "1 0 0\n2 0 1");
        assert!(parse_alist(&pad).is_err());
    }
}
