//! Reference base matrices and a generator for regular QC codes with
//! full-layer structure.
//!
//! The regular generator partitions the base columns in every layer among the
//! layer's rows, so each layer is full, and then picks circulant shifts at
//! random, rejecting any shift that creates a cycle shorter than the target
//! girth in the expanded graph.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{group_layers, QcCode};

/// IEEE 802.16e rate-1/2 base matrix, `z = 96` shifts, standard row order.
pub const WIMAX_HALF_RATE: &str = include_str!("../../data/wimax_r12_z96.bm");

/// Shipped copy of [`regular_3_6_standin`].
pub const REGULAR_3_6_Z54: &str = include_str!("../../data/regular_3_6_z54.bm");

pub fn wimax_half_rate() -> QcCode {
    QcCode::parse(WIMAX_HALF_RATE).expect("built-in matrix is valid")
}

/// Shape of a regular code with full layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegularLayout {
    /// Number of full layers, equal to the VN degree.
    pub layers: usize,
    /// CN degree.
    pub dc: usize,
    /// Base columns; must be a multiple of `dc`.
    pub cols: usize,
    pub z: usize,
    /// Shortest cycle allowed in the expanded graph.
    pub min_girth: usize,
    /// Require cyclically consecutive rows to be column-disjoint.
    pub pipelined: bool,
}

impl RegularLayout {
    /// The `(3,6)` layout with `12 x 24` base matrix and `z = 54`.
    pub fn regular_3_6_z54() -> Self {
        RegularLayout {
            layers: 3,
            dc: 6,
            cols: 24,
            z: 54,
            min_girth: 8,
            pipelined: true,
        }
    }

    pub fn rows_per_layer(&self) -> usize {
        self.cols / self.dc
    }
}

/// Seed used for the shipped `(3,6)` stand-in matrix.
pub const STANDIN_SEED: u64 = 2018;

/// The shipped `(3,6)`-regular stand-in code.
pub fn regular_3_6_standin() -> QcCode {
    generate_regular(&RegularLayout::regular_3_6_z54(), STANDIN_SEED)
        .expect("stand-in layout is feasible")
}

/// Generates a code for `layout`, redrawing supports and shifts until the
/// constraints are met. Returns `None` after 200 failed attempts.
pub fn generate_regular(layout: &RegularLayout, seed: u64) -> Option<QcCode> {
    assert!(
        layout.cols.is_multiple_of(layout.dc),
        "cols must be a multiple of dc"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..200 {
        let supports = match random_supports(layout, &mut rng) {
            Some(s) => s,
            None => continue,
        };
        if let Some(code) = assign_shifts(layout, &supports, &mut rng) {
            return Some(code);
        }
    }
    None
}

fn random_supports(layout: &RegularLayout, rng: &mut ChaCha8Rng) -> Option<Vec<Vec<usize>>> {
    let rpl = layout.rows_per_layer();
    let mut rows: Vec<Vec<usize>> = Vec::with_capacity(layout.layers * rpl);
    for _ in 0..layout.layers {
        let mut cols: Vec<usize> = (0..layout.cols).collect();
        cols.shuffle(rng);
        if layout.pipelined {
            // the layer's first row must avoid the previous row's columns
            if let Some(prev) = rows.last() {
                let (avoid, ok): (Vec<usize>, Vec<usize>) =
                    cols.iter().partition(|c| prev.contains(c));
                if ok.len() < layout.dc {
                    return None;
                }
                let mut rest: Vec<usize> = ok[layout.dc..].iter().chain(&avoid).copied().collect();
                rest.shuffle(rng);
                cols = ok[..layout.dc].iter().copied().chain(rest).collect();
            }
        }
        for chunk in cols.chunks(layout.dc) {
            let mut r = chunk.to_vec();
            r.sort_unstable();
            rows.push(r);
        }
    }
    if layout.pipelined && rows.len() > 2 {
        let first = &rows[0];
        let last = rows.last().unwrap();
        if first.iter().any(|c| last.contains(c)) {
            return None;
        }
    }
    Some(rows)
}

fn assign_shifts(
    layout: &RegularLayout,
    supports: &[Vec<usize>],
    rng: &mut ChaCha8Rng,
) -> Option<QcCode> {
    let rows = supports.len();
    let cols = layout.cols;
    let mut base = vec![-1i32; rows * cols];
    for (r, sup) in supports.iter().enumerate() {
        for &c in sup {
            let mut placed = false;
            for _ in 0..400 {
                base[r * cols + c] = rng.random_range(0..layout.z) as i32;
                let code = QcCode::new(rows, cols, layout.z, base.clone()).ok()?;
                if girth(&code).is_none_or(|g| g >= layout.min_girth) {
                    placed = true;
                    break;
                }
            }
            if !placed {
                return None;
            }
        }
    }
    let code = QcCode::new(rows, cols, layout.z, base).ok()?;
    let sched = group_layers(&code, layout.rows_per_layer()).ok()?;
    if !sched.full_flags.iter().all(|&f| f) {
        return None;
    }
    if layout.pipelined && !group_layers(&code, 1).ok()?.pipeline_ok {
        return None;
    }
    Some(code)
}

/// Girth of the expanded Tanner graph (`None` if it has no cycle).
///
/// Circulant shifts act transitively on each block column, so BFS from one
/// variable per block column visits a shortest cycle.
pub fn girth(code: &QcCode) -> Option<usize> {
    let g = code.expand();
    let (n, m) = (g.n(), g.m());
    let adj = |v: usize| -> Vec<usize> {
        if v < n {
            g.vn_neighbors(v).map(|c| n + c).collect()
        } else {
            g.cn_neighbors(v - n).collect()
        }
    };
    let mut best: Option<usize> = None;
    let mut dist = vec![usize::MAX; n + m];
    let mut parent = vec![usize::MAX; n + m];
    for col in 0..code.cols() {
        let root = col * code.z();
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[root] = 0;
        parent[root] = usize::MAX;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            if let Some(b) = best {
                if 2 * dist[u] + 1 >= b {
                    break;
                }
            }
            for w in adj(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue.push_back(w);
                } else if parent[u] != w {
                    let len = dist[u] + dist[w] + 1;
                    best = Some(best.map_or(len, |b| b.min(len)));
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::DegreeDistribution;

    #[test]
    fn wimax_structure() {
        let c = wimax_half_rate();
        assert_eq!((c.n(), c.m()), (2304, 1152));
        let d = c.degree_distribution();
        assert_eq!(d.vn_degrees().collect::<Vec<_>>(), vec![2, 3, 6]);
        assert_eq!(d.cn_degrees().collect::<Vec<_>>(), vec![6, 7]);
        let expect = DegreeDistribution::wimax_half_rate();
        for (k, v) in &expect.lambda {
            assert!((d.lambda[k] - v).abs() < 1e-12);
        }
        assert!((d.lambda[&2] - 0.2895).abs() < 1e-4);
        assert!((d.lambda[&3] - 0.3158).abs() < 1e-4);
        assert!((d.lambda[&6] - 0.3947).abs() < 1e-4);
        assert!((d.rho[&6] - 0.6316).abs() < 1e-4);
        assert!((d.rho[&7] - 0.3684).abs() < 1e-4);
    }

    #[test]
    fn shipped_standin_matches_generator() {
        let c = regular_3_6_standin();
        assert_eq!(QcCode::parse(REGULAR_3_6_Z54).unwrap(), c);
        assert_eq!(c.n(), 1296);
        assert!(c.degree_distribution().is_regular());
        assert_eq!(girth(&c), Some(8));
        let s = group_layers(&c, 4).unwrap();
        assert_eq!(s.full_flags, vec![true; 3]);
        assert!(group_layers(&c, 1).unwrap().pipeline_ok);
    }

    #[test]
    fn girth_of_small_codes() {
        // two identical identity blocks in two rows form 4-cycles
        let c = QcCode::parse("2 2 3\n0 0\n0 0\n").unwrap();
        assert_eq!(girth(&c), Some(4));
        let c = QcCode::parse("2 2 5\n0 0\n0 1\n").unwrap();
        assert_eq!(girth(&c), Some(20));
        let tree = QcCode::parse("1 2 3\n0 0\n").unwrap();
        assert_eq!(girth(&tree), None);
    }
}
