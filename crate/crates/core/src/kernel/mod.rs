//! Fixed-point MS / NS-FAID decoding kernels.
//!
//! Messages are plain `i32` values inside `{-Q..Q}`; AP-LLRs live on
//! `{-Q~..Q~}` and saturate after every update. A hard decision of `0`
//! decides bit `0`.

mod config;

pub use config::KernelConfig;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::code::{LayerSchedule, QcCode, TannerGraph};
use crate::error::{Error, Result};
use crate::framing::{saturate, Alphabet, FramingFunction, FramingSet, TieMode};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Schedule {
    Flooding,
    Layered(LayerSchedule),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CnStorage {
    #[default]
    Uncompressed,
    Compressed,
}

/// A complete decoder configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    pub alphabet: Alphabet,
    pub framings: FramingSet,
    pub mu: f64,
    pub schedule: Schedule,
    pub cn_storage: CnStorage,
    pub max_iter: usize,
    pub tie_mode: TieMode,
    /// Stop as soon as the syndrome is zero.
    pub early_exit: bool,
}

impl KernelSpec {
    /// Flooding MS kernel on `alphabet`.
    pub fn min_sum(alphabet: Alphabet, mu: f64, max_iter: usize) -> Self {
        KernelSpec {
            framings: FramingSet::Uniform(FramingFunction::identity(alphabet.max())),
            alphabet,
            mu,
            schedule: Schedule::Flooding,
            cn_storage: CnStorage::Uncompressed,
            max_iter,
            tie_mode: TieMode::AlwaysPositive,
            early_exit: true,
        }
    }

    /// Flooding kernel with the given framings.
    pub fn new(alphabet: Alphabet, framings: FramingSet, mu: f64, max_iter: usize) -> Self {
        KernelSpec {
            framings,
            ..KernelSpec::min_sum(alphabet, mu, max_iter)
        }
    }

    pub fn with_schedule(mut self, schedule: Schedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn with_cn_storage(mut self, storage: CnStorage) -> Self {
        self.cn_storage = storage;
        self
    }

    pub fn with_tie_mode(mut self, mode: TieMode) -> Self {
        self.tie_mode = mode;
        self
    }

    pub fn with_early_exit(mut self, on: bool) -> Self {
        self.early_exit = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::Kernel(format!(
                "mu must be positive, got {}",
                self.mu
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::Kernel("max_iter must be >= 1".into()));
        }
        for f in self.framings.functions() {
            if f.max() != self.alphabet.max() {
                return Err(Error::Kernel(format!(
                    "framing {f} does not match message alphabet Q = {}",
                    self.alphabet.max()
                )));
            }
        }
        Ok(())
    }

    /// `true` when some framing has `F(0) != 0`.
    pub fn has_nonzero_lambda(&self) -> bool {
        self.framings.functions().iter().any(|f| f.lambda() > 0)
    }
}

/// CN update: product of signs times minimum magnitude.
pub fn cn_update(inputs: &[i32]) -> i32 {
    let mut negative = false;
    let mut min = i32::MAX;
    for &x in inputs {
        negative ^= x < 0;
        min = min.min(x.abs());
    }
    if inputs.is_empty() {
        return 0;
    }
    if negative {
        -min
    } else {
        min
    }
}

/// Compressed CN memory word: signs, the two smallest magnitudes and the
/// position of the smallest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CompressedCnState {
    /// Bit `i` set when input `i` is negative.
    pub signs: u64,
    pub min1: i32,
    pub min2: i32,
    pub indx_min1: usize,
    pub degree: usize,
}

impl CompressedCnState {
    /// Builds the state from all `d_c` CN inputs (`d_c <= 64`).
    pub fn from_inputs(inputs: &[i32]) -> Self {
        assert!(inputs.len() <= 64, "check degree above 64");
        let mut s = CompressedCnState {
            signs: 0,
            min1: i32::MAX,
            min2: i32::MAX,
            indx_min1: 0,
            degree: inputs.len(),
        };
        for (i, &x) in inputs.iter().enumerate() {
            if x < 0 {
                s.signs |= 1 << i;
            }
            let a = x.abs();
            if a < s.min1 {
                s.min2 = s.min1;
                s.min1 = a;
                s.indx_min1 = i;
            } else if a < s.min2 {
                s.min2 = a;
            }
        }
        s
    }

    /// Outgoing message on edge `e`.
    #[inline]
    pub fn extract(&self, e: usize) -> i32 {
        let mag = if e == self.indx_min1 {
            self.min2
        } else {
            self.min1
        };
        let negative = ((self.signs.count_ones() + ((self.signs >> e) & 1) as u32) & 1) == 1;
        if negative {
            -mag
        } else {
            mag
        }
    }
}

/// VN update: `F(s_M(gamma + sum))`, always-positive ties.
pub fn vn_update(gamma: i32, incoming: &[i32], f: &FramingFunction) -> i32 {
    f.frame(gamma + incoming.iter().sum::<i32>())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeResult {
    pub bits: Vec<u8>,
    pub iterations_used: usize,
    /// Syndrome is zero.
    pub converged: bool,
    /// AP-LLRs after every iteration when tracing is on.
    pub trace: Option<Vec<Vec<i32>>>,
}

/// LUT over `s_M(x) + Q` with `F(0) = +lambda`.
#[derive(Debug, Clone)]
struct FrameTable {
    map: Vec<i32>,
    lambda: i32,
}

/// A kernel bound to a code, reusable across frames.
#[derive(Debug, Clone)]
pub struct Decoder {
    graph: TannerGraph,
    spec: KernelSpec,
    tables: Vec<FrameTable>,
    vn_table: Vec<u8>,
    /// CN processing order for the layered schedule.
    cn_order: Option<Vec<usize>>,
    /// Local index of each edge inside its CN.
    edge_slot: Vec<usize>,
    q: i32,
    q_ap: i32,
}

impl Decoder {
    /// Decoder for a flooding kernel on an arbitrary graph.
    pub fn new(graph: TannerGraph, spec: KernelSpec) -> Result<Self> {
        if matches!(spec.schedule, Schedule::Layered(_)) {
            return Err(Error::ScheduleMismatch(
                "layered schedules need a QC base matrix".into(),
            ));
        }
        Decoder::build(graph, spec, None)
    }

    /// Decoder on the expansion of a QC code; supports both schedules.
    pub fn for_qc(code: &QcCode, spec: KernelSpec) -> Result<Self> {
        let graph = code.expand();
        let order = match &spec.schedule {
            Schedule::Flooding => None,
            Schedule::Layered(sched) => Some(layered_cn_order(code, sched)?),
        };
        Decoder::build(graph, spec, order)
    }

    fn build(graph: TannerGraph, spec: KernelSpec, cn_order: Option<Vec<usize>>) -> Result<Self> {
        spec.validate()?;
        let degrees: std::collections::BTreeSet<usize> =
            (0..graph.n()).map(|n| graph.vn_degree(n)).collect();
        spec.framings.check_covers(degrees.iter().copied())?;
        let q = spec.alphabet.max();
        let mut tables: Vec<FrameTable> = Vec::new();
        let mut by_degree = std::collections::BTreeMap::new();
        for &d in &degrees {
            let f = spec.framings.for_degree(d).expect("covered");
            let map: Vec<i32> = (-q..=q).map(|m| f.apply(m)).collect();
            let i = match tables.iter().position(|t| t.map == map) {
                Some(i) => i,
                None => {
                    tables.push(FrameTable {
                        map,
                        lambda: f.lambda(),
                    });
                    tables.len() - 1
                }
            };
            by_degree.insert(d, i as u8);
        }
        let vn_table = (0..graph.n())
            .map(|n| by_degree[&graph.vn_degree(n)])
            .collect();
        let mut edge_slot = vec![0; graph.num_edges()];
        for m in 0..graph.m() {
            for (k, e) in graph.cn_range(m).enumerate() {
                edge_slot[e] = k;
            }
            if graph.cn_degree(m) > 64 {
                return Err(Error::Kernel("check degree above 64".into()));
            }
        }
        Ok(Decoder {
            q,
            q_ap: spec.alphabet.ap_max(),
            graph,
            spec,
            tables,
            vn_table,
            cn_order,
            edge_slot,
        })
    }

    pub fn graph(&self) -> &TannerGraph {
        &self.graph
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    /// Quantized channel values for received samples `y`.
    pub fn quantize(&self, y: &[f64]) -> Vec<i32> {
        y.iter()
            .map(|&v| crate::channel::quantize(v, self.spec.mu, self.q))
            .collect()
    }

    #[inline]
    fn frame(&self, vn: usize, x: i32, rng: &mut dyn RngCore) -> i32 {
        let t = &self.tables[self.vn_table[vn] as usize];
        let m = saturate(x, self.q);
        if m == 0
            && t.lambda > 0
            && self.spec.tie_mode == TieMode::Randomized
            && rng.random::<bool>()
        {
            -t.lambda
        } else {
            t.map[(m + self.q) as usize]
        }
    }

    /// Decodes `llrs` (values in `{-Q..Q}`), ties resolved with `rng`.
    pub fn decode_with_rng(&self, llrs: &[i32], rng: &mut dyn RngCore) -> DecodeResult {
        self.run(llrs, rng, false)
    }

    /// Decodes with a tie RNG seeded from 0; deterministic in every mode.
    pub fn decode(&self, llrs: &[i32]) -> DecodeResult {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(0);
        self.run(llrs, &mut rng, false)
    }

    /// Like [`Decoder::decode`] but records AP-LLRs after every iteration.
    pub fn decode_traced(&self, llrs: &[i32], rng: &mut dyn RngCore) -> DecodeResult {
        self.run(llrs, rng, true)
    }

    fn run(&self, llrs: &[i32], rng: &mut dyn RngCore, traced: bool) -> DecodeResult {
        assert_eq!(llrs.len(), self.graph.n(), "llr length must equal N");
        match &self.cn_order {
            None => self.flooding(llrs, rng, traced),
            Some(order) => self.layered(llrs, order, rng, traced),
        }
    }

    fn new_memory(&self) -> CnMemory {
        match self.spec.cn_storage {
            CnStorage::Uncompressed => CnMemory::Uncompressed(vec![0; self.graph.num_edges()]),
            CnStorage::Compressed => CnMemory::Compressed(vec![
                CompressedCnState {
                    min1: 0,
                    min2: 0,
                    ..Default::default()
                };
                self.graph.m()
            ]),
        }
    }

    /// Writes CN `m`'s outgoing messages for the inputs `alpha` (indexed by slot).
    fn check_update(&self, m: usize, alpha: &[i32], mem: &mut CnMemory) {
        let state = CompressedCnState::from_inputs(alpha);
        match mem {
            CnMemory::Compressed(states) => states[m] = state,
            CnMemory::Uncompressed(beta) => {
                for (k, e) in self.graph.cn_range(m).enumerate() {
                    beta[e] = state.extract(k);
                }
            }
        }
    }

    #[inline]
    fn beta(&self, mem: &CnMemory, e: usize) -> i32 {
        match mem {
            CnMemory::Uncompressed(beta) => beta[e],
            CnMemory::Compressed(states) => {
                states[self.graph.edges()[e].cn].extract(self.edge_slot[e])
            }
        }
    }

    fn flooding(&self, llrs: &[i32], rng: &mut dyn RngCore, traced: bool) -> DecodeResult {
        let g = &self.graph;
        let mut mem = self.new_memory();
        let mut alpha = vec![0i32; g.num_edges()];
        let mut ap = vec![0i32; g.n()];
        let mut bits = vec![0u8; g.n()];
        let mut trace = traced.then(Vec::new);
        let mut buf = Vec::with_capacity(64);
        let mut converged = false;
        let mut used = 0;
        for iter in 1..=self.spec.max_iter {
            for n in 0..g.n() {
                let edges = g.vn_edges(n);
                let total: i32 = llrs[n] + edges.iter().map(|&e| self.beta(&mem, e)).sum::<i32>();
                for &e in edges {
                    alpha[e] = self.frame(n, total - self.beta(&mem, e), rng);
                }
            }
            for m in 0..g.m() {
                buf.clear();
                buf.extend_from_slice(&alpha[g.cn_range(m)]);
                self.check_update(m, &buf, &mut mem);
            }
            for n in 0..g.n() {
                let total: i32 = llrs[n]
                    + g.vn_edges(n)
                        .iter()
                        .map(|&e| self.beta(&mem, e))
                        .sum::<i32>();
                ap[n] = saturate(total, self.q_ap);
                bits[n] = (ap[n] < 0) as u8;
            }
            if let Some(t) = trace.as_mut() {
                t.push(ap.clone());
            }
            used = iter;
            converged = g.syndrome_ok(&bits);
            if converged && self.spec.early_exit {
                break;
            }
        }
        DecodeResult {
            bits,
            iterations_used: used,
            converged,
            trace,
        }
    }

    fn layered(
        &self,
        llrs: &[i32],
        order: &[usize],
        rng: &mut dyn RngCore,
        traced: bool,
    ) -> DecodeResult {
        let g = &self.graph;
        let mut mem = self.new_memory();
        let mut ap: Vec<i32> = llrs.iter().map(|&v| saturate(v, self.q_ap)).collect();
        let mut bits = vec![0u8; g.n()];
        let mut trace = traced.then(Vec::new);
        let mut alpha = Vec::with_capacity(64);
        let mut framed = Vec::with_capacity(64);
        let mut converged = false;
        let mut used = 0;
        for iter in 1..=self.spec.max_iter {
            for &m in order {
                alpha.clear();
                framed.clear();
                for e in g.cn_range(m) {
                    let vn = g.edges()[e].vn;
                    let a = saturate(ap[vn] - self.beta(&mem, e), self.q_ap);
                    alpha.push(a);
                    framed.push(self.frame(vn, a, rng));
                }
                self.check_update(m, &framed, &mut mem);
                for (k, e) in g.cn_range(m).enumerate() {
                    let vn = g.edges()[e].vn;
                    ap[vn] = saturate(alpha[k] + self.beta(&mem, e), self.q_ap);
                }
            }
            for n in 0..g.n() {
                bits[n] = (ap[n] < 0) as u8;
            }
            if let Some(t) = trace.as_mut() {
                t.push(ap.clone());
            }
            used = iter;
            converged = g.syndrome_ok(&bits);
            if converged && self.spec.early_exit {
                break;
            }
        }
        DecodeResult {
            bits,
            iterations_used: used,
            converged,
            trace,
        }
    }
}

enum CnMemory {
    Uncompressed(Vec<i32>),
    Compressed(Vec<CompressedCnState>),
}

fn layered_cn_order(code: &QcCode, sched: &LayerSchedule) -> Result<Vec<usize>> {
    let mut rows = sched.row_order();
    rows.sort_unstable();
    if rows != (0..code.rows()).collect::<Vec<_>>() {
        return Err(Error::ScheduleMismatch(format!(
            "schedule covers {} rows, code has {}",
            sched.row_order().len(),
            code.rows()
        )));
    }
    // re-validate: the schedule must group non-overlapping rows of this code
    let check = crate::code::group_layers_in_order(code, &sched.row_order(), sched.rpl)
        .map_err(|e| Error::ScheduleMismatch(e.to_string()))?;
    if check.layers != sched.layers {
        return Err(Error::ScheduleMismatch("layer grouping differs".into()));
    }
    let z = code.z();
    Ok(sched
        .row_order()
        .into_iter()
        .flat_map(|r| r * z..(r + 1) * z)
        .collect())
}

/// One-shot flooding decode on any graph.
pub fn decode_flooding(
    graph: &TannerGraph,
    spec: &KernelSpec,
    llrs: &[i32],
) -> Result<DecodeResult> {
    let spec = KernelSpec {
        schedule: Schedule::Flooding,
        ..spec.clone()
    };
    Ok(Decoder::new(graph.clone(), spec)?.decode(llrs))
}

/// One-shot layered decode; `spec.schedule` must be layered.
pub fn decode_layered(code: &QcCode, spec: &KernelSpec, llrs: &[i32]) -> Result<DecodeResult> {
    if !matches!(spec.schedule, Schedule::Layered(_)) {
        return Err(Error::ScheduleMismatch(
            "kernel schedule is not layered".into(),
        ));
    }
    Ok(Decoder::for_qc(code, spec.clone())?.decode(llrs))
}
