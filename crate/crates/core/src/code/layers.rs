//! Decoding layers: groups of consecutive, non-overlapping base-matrix rows.

use serde::{Deserialize, Serialize};

use super::QcCode;
use crate::error::{Error, Result};

/// Two consecutive layers (cyclically) touching the same base column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineViolation {
    pub layer: usize,
    pub next_layer: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSchedule {
    pub rpl: usize,
    /// Base-matrix row indices of each layer, in processing order.
    pub layers: Vec<Vec<usize>>,
    /// Layer touches every base column exactly once.
    pub full_flags: Vec<bool>,
    /// No two cyclically consecutive layers share a column.
    pub pipeline_ok: bool,
    pub violations: Vec<PipelineViolation>,
}

impl LayerSchedule {
    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    /// Base-matrix row order implied by the layers.
    pub fn row_order(&self) -> Vec<usize> {
        self.layers.iter().flatten().copied().collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serializes")
    }
}

/// Groups rows in `order` into layers of `rpl` rows, rejecting intra-layer overlap.
pub fn group_layers_in_order(code: &QcCode, order: &[usize], rpl: usize) -> Result<LayerSchedule> {
    super::check_permutation(order, code.rows())?;
    if rpl == 0 || !code.rows().is_multiple_of(rpl) {
        return Err(Error::LayerSize {
            rpl,
            rows: code.rows(),
        });
    }
    let layers: Vec<Vec<usize>> = order.chunks(rpl).map(|c| c.to_vec()).collect();
    let mut masks = Vec::with_capacity(layers.len());
    let mut full_flags = Vec::with_capacity(layers.len());
    for (l, rows) in layers.iter().enumerate() {
        let mut used = vec![false; code.cols()];
        for &r in rows {
            for c in code.row_support(r) {
                if std::mem::replace(&mut used[c], true) {
                    return Err(Error::LayerOverlap { layer: l, col: c });
                }
            }
        }
        full_flags.push(used.iter().all(|&u| u));
        masks.push(used);
    }
    let violations = pipeline_violations(&masks);
    Ok(LayerSchedule {
        rpl,
        pipeline_ok: violations.is_empty(),
        layers,
        full_flags,
        violations,
    })
}

/// Groups consecutive rows of `code` into layers of `rpl` rows.
pub fn group_layers(code: &QcCode, rpl: usize) -> Result<LayerSchedule> {
    let order: Vec<usize> = (0..code.rows()).collect();
    group_layers_in_order(code, &order, rpl)
}

fn pipeline_violations(masks: &[Vec<bool>]) -> Vec<PipelineViolation> {
    let l = masks.len();
    if l < 2 {
        return Vec::new();
    }
    let mut out = Vec::new();
    // the last layer of one iteration is followed by the first of the next
    let boundaries = if l == 2 { 1 } else { l };
    for a in 0..boundaries {
        let b = (a + 1) % l;
        for (c, (&x, &y)) in masks[a].iter().zip(&masks[b]).enumerate() {
            if x && y {
                out.push(PipelineViolation {
                    layer: a,
                    next_layer: b,
                    col: c,
                });
            }
        }
    }
    out
}

/// Finds a row order in which cyclically consecutive rows share no column.
///
/// Backtracking over a Hamiltonian cycle of the row-compatibility graph,
/// starting from row 0 and trying rows in ascending order.
pub fn find_pipeline_row_order(code: &QcCode) -> Result<Vec<usize>> {
    let r = code.rows();
    if r == 1 {
        return Ok(vec![0]);
    }
    let supports: Vec<Vec<bool>> = (0..r)
        .map(|i| {
            (0..code.cols())
                .map(|c| code.entry(i, c).is_some())
                .collect()
        })
        .collect();
    let disjoint =
        |a: usize, b: usize| !supports[a].iter().zip(&supports[b]).any(|(&x, &y)| x && y);
    let compat: Vec<Vec<bool>> = (0..r)
        .map(|a| (0..r).map(|b| a != b && disjoint(a, b)).collect())
        .collect();

    let mut path = vec![0];
    let mut used = vec![false; r];
    used[0] = true;
    if extend(&compat, &mut path, &mut used) {
        Ok(path)
    } else {
        Err(Error::NoPipelineOrder)
    }
}

fn extend(compat: &[Vec<bool>], path: &mut Vec<usize>, used: &mut [bool]) -> bool {
    let r = compat.len();
    let last = *path.last().unwrap();
    if path.len() == r {
        return r == 2 || compat[last][path[0]];
    }
    for next in 0..r {
        if !used[next] && compat[last][next] {
            used[next] = true;
            path.push(next);
            if extend(compat, path, used) {
                return true;
            }
            path.pop();
            used[next] = false;
        }
    }
    false
}
