//! Quasi-cyclic LDPC codes: base matrices, expansion and the Tanner graph.

mod alist;
mod degree;
mod layers;
pub mod standin;

use std::fmt;

use crate::error::{Error, Result};

pub use alist::{parse_alist, write_alist};
pub use degree::DegreeDistribution;
pub use layers::{
    find_pipeline_row_order, group_layers, group_layers_in_order, LayerSchedule, PipelineViolation,
};

/// Base matrix `B` (`R x C`, entries `-1` or a shift in `[0, z)`) and expansion factor `z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QcCode {
    rows: usize,
    cols: usize,
    z: usize,
    base: Vec<i32>,
}

impl QcCode {
    pub fn new(rows: usize, cols: usize, z: usize, base: Vec<i32>) -> Result<Self> {
        if rows == 0 || cols == 0 || z == 0 {
            return Err(Error::Parse {
                line: 1,
                msg: format!("dimensions must be positive, got R={rows} C={cols} z={z}"),
            });
        }
        if base.len() != rows * cols {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected {} entries, got {}", rows * cols, base.len()),
            });
        }
        for (k, &v) in base.iter().enumerate() {
            if v < -1 || v as i64 >= z as i64 {
                return Err(Error::EntryOutOfRange {
                    row: k / cols,
                    col: k % cols,
                    value: v as i64,
                    z,
                });
            }
        }
        Ok(QcCode {
            rows,
            cols,
            z,
            base,
        })
    }

    /// Parses `R C z` followed by `R` lines of `C` integers. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty base-matrix file".into(),
        })?;
        let dims = parse_ints(header, hline)?;
        let [rows, cols, z] = dims[..] else {
            return Err(Error::Parse {
                line: hline,
                msg: format!("header needs `R C z`, got {} fields", dims.len()),
            });
        };
        if rows <= 0 || cols <= 0 || z <= 0 || rows > 1 << 16 || cols > 1 << 16 || z > 1 << 20 {
            return Err(Error::Parse {
                line: hline,
                msg: format!("bad dimensions R={rows} C={cols} z={z}"),
            });
        }
        let (rows, cols, z) = (rows as usize, cols as usize, z as usize);
        let mut base = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let (ln, line) = lines.next().ok_or(Error::Parse {
                line: hline + r + 1,
                msg: format!("expected {rows} rows, found {r}"),
            })?;
            let vals = parse_ints(line, ln)?;
            if vals.len() != cols {
                return Err(Error::Parse {
                    line: ln,
                    msg: format!("row has {} entries, expected {cols}", vals.len()),
                });
            }
            for (c, v) in vals.into_iter().enumerate() {
                if v < -1 || v >= z as i64 {
                    return Err(Error::EntryOutOfRange {
                        row: r,
                        col: c,
                        value: v,
                        z,
                    });
                }
                base.push(v as i32);
            }
        }
        if let Some((ln, _)) = lines.next() {
            return Err(Error::Parse {
                line: ln,
                msg: "trailing data after base matrix".into(),
            });
        }
        QcCode::new(rows, cols, z, base)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn z(&self) -> usize {
        self.z
    }

    /// `N = z C`.
    pub fn n(&self) -> usize {
        self.z * self.cols
    }

    /// `M = z R`.
    pub fn m(&self) -> usize {
        self.z * self.rows
    }

    /// Shift at `(row, col)`, `None` for an absent block.
    pub fn entry(&self, row: usize, col: usize) -> Option<usize> {
        let v = self.base[row * self.cols + col];
        (v >= 0).then_some(v as usize)
    }

    pub fn raw_entry(&self, row: usize, col: usize) -> i32 {
        self.base[row * self.cols + col]
    }

    /// Columns with a block in `row`.
    pub fn row_support(&self, row: usize) -> Vec<usize> {
        (0..self.cols)
            .filter(|&c| self.entry(row, c).is_some())
            .collect()
    }

    pub fn col_weight(&self, col: usize) -> usize {
        (0..self.rows)
            .filter(|&r| self.entry(r, col).is_some())
            .count()
    }

    pub fn row_weight(&self, row: usize) -> usize {
        self.row_support(row).len()
    }

    /// Same code with base rows permuted: new row `i` is old row `order[i]`.
    pub fn with_row_order(&self, order: &[usize]) -> Result<QcCode> {
        check_permutation(order, self.rows)?;
        let mut base = Vec::with_capacity(self.base.len());
        for &r in order {
            base.extend_from_slice(&self.base[r * self.cols..(r + 1) * self.cols]);
        }
        QcCode::new(self.rows, self.cols, self.z, base)
    }

    pub fn degree_distribution(&self) -> DegreeDistribution {
        let vn: Vec<usize> = (0..self.cols).map(|c| self.col_weight(c)).collect();
        let cn: Vec<usize> = (0..self.rows).map(|r| self.row_weight(r)).collect();
        DegreeDistribution::from_node_degrees(&vn, &cn)
    }

    /// Expands `B` into the Tanner graph of `H`.
    ///
    /// Block `(i, j)` with shift `b` connects check `i z + r` to variable
    /// `j z + (r + b) mod z`.
    pub fn expand(&self) -> TannerGraph {
        let z = self.z;
        let mut edges = Vec::new();
        for i in 0..self.rows {
            for r in 0..z {
                for j in 0..self.cols {
                    if let Some(b) = self.entry(i, j) {
                        edges.push(Edge {
                            cn: i * z + r,
                            vn: j * z + (r + b) % z,
                            block: Some((i, j)),
                        });
                    }
                }
            }
        }
        TannerGraph::from_edges(self.n(), self.m(), edges)
    }
}

impl fmt::Display for QcCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {}", self.rows, self.cols, self.z)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|c| format!("{:>3}", self.raw_entry(r, c)))
                .collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Parses a base-matrix file.
pub fn parse_base_matrix(text: &str) -> Result<QcCode> {
    QcCode::parse(text)
}

fn parse_ints(line: &str, ln: usize) -> Result<Vec<i64>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<i64>().map_err(|_| Error::Parse {
                line: ln,
                msg: format!("not an integer: {t:?}"),
            })
        })
        .collect()
}

pub(crate) fn check_permutation(order: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if order.len() != n {
        return Err(Error::ScheduleMismatch(format!(
            "row order has {} entries, code has {n} rows",
            order.len()
        )));
    }
    for &r in order {
        if r >= n || std::mem::replace(&mut seen[r], true) {
            return Err(Error::ScheduleMismatch(format!(
                "row order is not a permutation of 0..{n}"
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub cn: usize,
    pub vn: usize,
    /// Base-matrix block `(row, col)` the edge came from, if any.
    pub block: Option<(usize, usize)>,
}

/// Sparse parity-check matrix as a bipartite graph.
///
/// Edges are stored grouped by check node; `cn_range(m)` indexes them.
/// `vn_edges(n)` lists the edge ids incident to variable `n` in ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TannerGraph {
    n: usize,
    m: usize,
    edges: Vec<Edge>,
    cn_offsets: Vec<usize>,
    vn_offsets: Vec<usize>,
    vn_edge_ids: Vec<usize>,
}

impl TannerGraph {
    pub fn from_edges(n: usize, m: usize, mut edges: Vec<Edge>) -> Self {
        edges.sort_by_key(|e| (e.cn, e.vn));
        let mut cn_offsets = vec![0; m + 1];
        for e in &edges {
            cn_offsets[e.cn + 1] += 1;
        }
        for i in 0..m {
            cn_offsets[i + 1] += cn_offsets[i];
        }
        let mut vn_offsets = vec![0; n + 1];
        for e in &edges {
            vn_offsets[e.vn + 1] += 1;
        }
        for i in 0..n {
            vn_offsets[i + 1] += vn_offsets[i];
        }
        let mut fill = vn_offsets.clone();
        let mut vn_edge_ids = vec![0; edges.len()];
        for (id, e) in edges.iter().enumerate() {
            vn_edge_ids[fill[e.vn]] = id;
            fill[e.vn] += 1;
        }
        TannerGraph {
            n,
            m,
            edges,
            cn_offsets,
            vn_offsets,
            vn_edge_ids,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn cn_range(&self, m: usize) -> std::ops::Range<usize> {
        self.cn_offsets[m]..self.cn_offsets[m + 1]
    }

    /// `H(m)`: variables checked by `m`.
    pub fn cn_neighbors(&self, m: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges[self.cn_range(m)].iter().map(|e| e.vn)
    }

    pub fn vn_edges(&self, n: usize) -> &[usize] {
        &self.vn_edge_ids[self.vn_offsets[n]..self.vn_offsets[n + 1]]
    }

    /// `H(n)`: checks involving `n`.
    pub fn vn_neighbors(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        self.vn_edges(n).iter().map(|&e| self.edges[e].cn)
    }

    pub fn vn_degree(&self, n: usize) -> usize {
        self.vn_offsets[n + 1] - self.vn_offsets[n]
    }

    pub fn cn_degree(&self, m: usize) -> usize {
        self.cn_offsets[m + 1] - self.cn_offsets[m]
    }

    pub fn degree_distribution(&self) -> DegreeDistribution {
        let vn: Vec<usize> = (0..self.n).map(|n| self.vn_degree(n)).collect();
        let cn: Vec<usize> = (0..self.m).map(|m| self.cn_degree(m)).collect();
        DegreeDistribution::from_node_degrees(&vn, &cn)
    }

    /// `true` iff every check is satisfied by `bits`.
    pub fn syndrome_ok(&self, bits: &[u8]) -> bool {
        (0..self.m).all(|m| self.cn_neighbors(m).fold(0u8, |acc, n| acc ^ bits[n]) & 1 == 0)
    }
}

/// `true` iff `bits` satisfies every parity check.
pub fn syndrome(graph: &TannerGraph, bits: &[u8]) -> bool {
    graph.syndrome_ok(bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_dimensions() {
        let c = QcCode::parse("1 2 3\n0 0\n").unwrap();
        assert_eq!((c.n(), c.m()), (6, 3));
        let g = c.expand();
        for n in 0..6 {
            assert_eq!(g.vn_degree(n), 1);
        }
        // two identity blocks: check r touches variables r and 3 + r
        for r in 0..3 {
            assert_eq!(g.cn_neighbors(r).collect::<Vec<_>>(), vec![r, 3 + r]);
        }
        let d = c.degree_distribution();
        assert_eq!(d, DegreeDistribution::regular(1, 2));
    }

    #[test]
    fn circulant_shift() {
        let c = QcCode::parse("1 1 4\n1\n").unwrap();
        let g = c.expand();
        for i in 0..4 {
            assert_eq!(g.cn_neighbors(i).collect::<Vec<_>>(), vec![(i + 1) % 4]);
        }
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            QcCode::parse("1 2 3\n0 3\n"),
            Err(Error::EntryOutOfRange { value: 3, .. })
        ));
        assert!(matches!(
            QcCode::parse("1 2 3\n0 -2\n"),
            Err(Error::EntryOutOfRange { value: -2, .. })
        ));
        assert!(QcCode::parse("1 2\n0 0\n").is_err());
        assert!(QcCode::parse("2 2 3\n0 0\n").is_err());
        assert!(QcCode::parse("1 2 3\n0 0 0\n").is_err());
        assert!(QcCode::parse("1 2 3\n0 x\n").is_err());
        assert!(QcCode::parse("1 2 3\n0 0\n1 1\n").is_err());
        assert!(QcCode::parse("0 2 3\n").is_err());
        assert!(QcCode::parse("").is_err());
    }

    #[test]
    fn comments_and_display_round_trip() {
        let text = "# toy\n2 3 5  # dims\n0 -1 4\n\n-1 2 3\n";
        let c = QcCode::parse(text).unwrap();
        assert_eq!(QcCode::parse(&c.to_string()).unwrap(), c);
    }

    #[test]
    fn syndrome_checks() {
        let c = QcCode::parse("1 2 3\n0 0\n").unwrap();
        let g = c.expand();
        assert!(syndrome(&g, &[0; 6]));
        assert!(syndrome(&g, &[1, 0, 1, 1, 0, 1]));
        assert!(!syndrome(&g, &[1, 0, 0, 0, 0, 0]));
    }
}
