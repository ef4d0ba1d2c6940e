//! Architecture-level analysis of layered decoders: pipeline feasibility,
//! VN-to-VNU slot mapping and throughput.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::code::{group_layers_in_order, PipelineViolation, QcCode};
use crate::error::{Error, Result};
use crate::framing::{FramingFunction, FramingSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Architecture {
    /// One pipeline stage between layers (`delta = 1`).
    Pipelined,
    /// Full layers, no pipeline stage (`delta = 0`).
    FullLayer,
}

impl Architecture {
    pub fn delta(self) -> u64 {
        match self {
            Architecture::Pipelined => 1,
            Architecture::FullLayer => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThroughputEstimate {
    pub n: u64,
    pub f_max_hz: u64,
    pub layers: u64,
    pub n_iter: u64,
    pub delta: u64,
    pub bits_per_second: u64,
}

impl ThroughputEstimate {
    pub fn mbps(&self) -> u64 {
        self.bits_per_second / 1_000_000
    }
}

/// `N * f / (delta + L * n_iter)`, floored to bits/s.
pub fn throughput(
    n: u64,
    f_max_hz: u64,
    layers: u64,
    n_iter: u64,
    arch: Architecture,
) -> ThroughputEstimate {
    let delta = arch.delta();
    let cycles = delta + layers * n_iter;
    assert!(cycles > 0, "throughput needs at least one cycle per frame");
    ThroughputEstimate {
        n,
        f_max_hz,
        layers,
        n_iter,
        delta,
        bits_per_second: (n as u128 * f_max_hz as u128 / cycles as u128) as u64,
    }
}

/// Throughput in whole Mbps with `f` given in MHz.
pub fn throughput_mbps(n: u64, f_mhz: u64, layers: u64, n_iter: u64, arch: Architecture) -> u64 {
    throughput(n, f_mhz * 1_000_000, layers, n_iter, arch).mbps()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub ok: bool,
    pub violations: Vec<PipelineViolation>,
}

/// Cyclic non-overlap check of consecutive layers of `rpl` rows in `order`.
pub fn check_pipeline(code: &QcCode, order: &[usize], rpl: usize) -> Result<PipelineReport> {
    let s = group_layers_in_order(code, order, rpl)?;
    Ok(PipelineReport {
        ok: s.pipeline_ok,
        violations: s.violations,
    })
}

/// Assignment of each layer's active columns to VNU slots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VnuMapping {
    /// Distinct framing functions, indexed by the ids used below.
    pub functions: Vec<String>,
    /// `slots[layer][slot]`: base column processed by the slot, if any.
    pub slots: Vec<Vec<Option<usize>>>,
    /// Framing-function ids each slot must implement.
    pub slot_functions: Vec<BTreeSet<usize>>,
}

impl VnuMapping {
    /// `(slots needing more than one function, total function instances)`.
    pub fn cost(&self) -> (usize, usize) {
        let multi = self.slot_functions.iter().filter(|s| s.len() > 1).count();
        let total = self.slot_functions.iter().map(|s| s.len()).sum();
        (multi, total)
    }

    /// Number of slots implementing exactly `k` functions.
    pub fn slots_with(&self, k: usize) -> usize {
        self.slot_functions.iter().filter(|s| s.len() == k).count()
    }
}

struct SlotProblem {
    functions: Vec<FramingFunction>,
    /// Active `(column, function id)` pairs per layer (row).
    layers: Vec<Vec<(usize, usize)>>,
    width: usize,
}

fn slot_problem(code: &QcCode, order: &[usize], framings: &FramingSet) -> Result<SlotProblem> {
    group_layers_in_order(code, order, 1)?;
    let mut functions: Vec<FramingFunction> = Vec::new();
    let mut col_fn = Vec::with_capacity(code.cols());
    for c in 0..code.cols() {
        let d = code.col_weight(c);
        let f = framings
            .for_degree(d)
            .ok_or_else(|| Error::Kernel(format!("no framing for VN degree {d}")))?;
        let id = functions.iter().position(|g| g == f).unwrap_or_else(|| {
            functions.push(f.clone());
            functions.len() - 1
        });
        col_fn.push(id);
    }
    let layers: Vec<Vec<(usize, usize)>> = order
        .iter()
        .map(|&r| {
            code.row_support(r)
                .into_iter()
                .map(|c| (c, col_fn[c]))
                .collect()
        })
        .collect();
    let width = layers.iter().map(|l| l.len()).max().unwrap_or(0);
    Ok(SlotProblem {
        functions,
        layers,
        width,
    })
}

fn finish(p: &SlotProblem, slots: Vec<Vec<Option<usize>>>) -> VnuMapping {
    let mut slot_functions = vec![BTreeSet::new(); p.width];
    for (layer, row) in p.layers.iter().zip(&slots) {
        let fn_of: BTreeMap<usize, usize> = layer.iter().copied().collect();
        for (s, c) in row.iter().enumerate() {
            if let Some(c) = c {
                slot_functions[s].insert(fn_of[c]);
            }
        }
    }
    VnuMapping {
        functions: p.functions.iter().map(|f| f.to_string()).collect(),
        slots,
        slot_functions,
    }
}

/// Active columns of each layer in ascending order on slots `0..`.
pub fn naive_vnu_mapping(
    code: &QcCode,
    order: &[usize],
    framings: &FramingSet,
) -> Result<VnuMapping> {
    let p = slot_problem(code, order, framings)?;
    let slots = p
        .layers
        .iter()
        .map(|l| {
            let mut row: Vec<Option<usize>> = l.iter().map(|&(c, _)| Some(c)).collect();
            row.resize(p.width, None);
            row
        })
        .collect();
    Ok(finish(&p, slots))
}

/// Slot assignment minimizing `(multi-function slots, total instances)`.
///
/// Only the set of functions per slot matters, so the search runs over
/// multisets of function subsets (one per slot) and checks each layer by
/// bipartite matching. Supports up to 6 distinct framing functions.
pub fn optimize_vnu_mapping(
    code: &QcCode,
    order: &[usize],
    framings: &FramingSet,
) -> Result<VnuMapping> {
    let p = slot_problem(code, order, framings)?;
    let t = p.functions.len();
    if t > 6 {
        return Err(Error::Kernel(format!(
            "{t} distinct framings; at most 6 supported"
        )));
    }
    // candidate slot contents, cheapest first
    let mut subsets: Vec<u32> = (1..(1u32 << t)).collect();
    subsets.sort_by_key(|s| (s.count_ones(), *s));
    let demands: Vec<Vec<usize>> = p
        .layers
        .iter()
        .map(|l| {
            let mut d = vec![0; t];
            l.iter().for_each(|&(_, f)| d[f] += 1);
            d
        })
        .collect();
    let mut best: Option<((usize, usize), Vec<u32>)> = None;
    let mut chosen = Vec::with_capacity(p.width);
    search(&subsets, 0, p.width, &demands, &mut chosen, &mut best);
    let (_, sets) = best.ok_or_else(|| Error::Kernel("no feasible slot assignment".into()))?;
    let slots = p
        .layers
        .iter()
        .map(|l| match_layer(l, &sets).expect("feasible"))
        .collect();
    Ok(finish(&p, slots))
}

fn cost_of(sets: &[u32]) -> (usize, usize) {
    let multi = sets.iter().filter(|s| s.count_ones() > 1).count();
    let total = sets.iter().map(|s| s.count_ones() as usize).sum();
    (multi, total)
}

fn search(
    subsets: &[u32],
    from: usize,
    remaining: usize,
    demands: &[Vec<usize>],
    chosen: &mut Vec<u32>,
    best: &mut Option<((usize, usize), Vec<u32>)>,
) {
    // remaining slots cost at least one instance each
    let (m, tot) = cost_of(chosen);
    if let Some((b, _)) = best {
        if (m, tot + remaining) >= *b {
            return;
        }
    }
    if remaining == 0 {
        if demands.iter().all(|d| hall_ok(d, chosen)) {
            *best = Some(((m, tot), chosen.clone()));
        }
        return;
    }
    for i in from..subsets.len() {
        chosen.push(subsets[i]);
        search(subsets, i, remaining - 1, demands, chosen, best);
        chosen.pop();
    }
}

/// Hall's condition: every group of functions fits into the slots allowing one of them.
fn hall_ok(demand: &[usize], sets: &[u32]) -> bool {
    let t = demand.len();
    (1..(1u32 << t)).all(|a| {
        let need: usize = (0..t).filter(|&f| a >> f & 1 == 1).map(|f| demand[f]).sum();
        let have = sets.iter().filter(|&&s| s & a != 0).count();
        need <= have
    })
}

/// Matches a layer's columns to slots whose function set admits them.
fn match_layer(layer: &[(usize, usize)], sets: &[u32]) -> Option<Vec<Option<usize>>> {
    let mut slot_of_col: Vec<Option<usize>> = vec![None; layer.len()];
    let mut col_of_slot: Vec<Option<usize>> = vec![None; sets.len()];
    fn augment(
        i: usize,
        layer: &[(usize, usize)],
        sets: &[u32],
        seen: &mut [bool],
        slot_of_col: &mut [Option<usize>],
        col_of_slot: &mut [Option<usize>],
    ) -> bool {
        for s in 0..sets.len() {
            if sets[s] >> layer[i].1 & 1 == 1 && !seen[s] {
                seen[s] = true;
                let free = match col_of_slot[s] {
                    None => true,
                    Some(j) => augment(j, layer, sets, seen, slot_of_col, col_of_slot),
                };
                if free {
                    col_of_slot[s] = Some(i);
                    slot_of_col[i] = Some(s);
                    return true;
                }
            }
        }
        false
    }
    for i in 0..layer.len() {
        let mut seen = vec![false; sets.len()];
        if !augment(
            i,
            layer,
            sets,
            &mut seen,
            &mut slot_of_col,
            &mut col_of_slot,
        ) {
            return None;
        }
    }
    Some(
        col_of_slot
            .into_iter()
            .map(|j| j.map(|j| layer[j].0))
            .collect(),
    )
}
