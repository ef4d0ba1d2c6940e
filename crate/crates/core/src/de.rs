//! Density evolution for NS-FAID kernels on BPSK-AWGN.
//!
//! Tracks the pmf of VN and CN messages under the all-zero codeword and the
//! cycle-free assumption. Messages live on `{-Q..Q}`; the VN sum is carried
//! at full width and saturated before framing. Mass reaching `F(0)` with
//! `lambda > 0` is split evenly between `+lambda` and `-lambda`.

use serde::{Deserialize, Serialize};

use crate::channel::{channel_pmf, sigma_from_snr_db};
use crate::code::DegreeDistribution;
use crate::error::{Error, Result};
use crate::framing::{FramingFunction, FramingSet};
use crate::pmf::{convolve_into, error_probability, Pmf};

/// Effective target used when an exact zero error probability is requested.
pub const ETA_ZERO_EFFECTIVE: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 2000;
/// Threshold search bracket in dB.
pub const SNR_BRACKET: (f64, f64) = (-2.0, 12.0);
pub const SNR_TOLERANCE_DB: f64 = 1e-4;

/// Pmf of the CN output for `inputs` i.i.d. messages distributed as `pmf_in`.
///
/// Uses the tail sums `a_t = P(|m| >= t)` and `b_t = P(m >= t) - P(m <= -t)`:
/// `P(out >= t) = (a_t^k + b_t^k) / 2` and `P(out <= -t) = (a_t^k - b_t^k) / 2`.
pub fn de_cn(pmf_in: &Pmf, dc: usize) -> Pmf {
    assert!(dc >= 2, "check nodes need degree >= 2");
    let max = pmf_in.max().max(-pmf_in.min());
    let full = pmf_in.saturate(max);
    let mut out = vec![0.0; 2 * max as usize + 1];
    cn_update_into(full.probs(), max, dc - 1, &mut out, 1.0);
    Pmf::new(-max, out)
}

/// Adds `weight * CN-output pmf` into `out`; `pmf` and `out` index `m + max`.
fn cn_update_into(pmf: &[f64], max: i32, k: usize, out: &mut [f64], weight: f64) {
    let q = max as usize;
    let k = k as i32;
    // tails at t = Q+1 are zero
    let mut pos_above = 0.0;
    let mut neg_above = 0.0;
    let mut up = 0.0; // P(m >= t)
    let mut down = 0.0; // P(m <= -t)
    for t in (1..=q).rev() {
        up += pmf[q + t];
        down += pmf[q - t];
        let a = (up + down).powi(k);
        let b = (up - down).powi(k);
        let pos = 0.5 * (a + b);
        let neg = 0.5 * (a - b);
        out[q + t] += weight * (pos - pos_above);
        out[q - t] += weight * (neg - neg_above);
        pos_above = pos;
        neg_above = neg;
    }
    out[q] += weight * (1.0 - pos_above - neg_above);
}

/// Adds `weight * F(s_M(sum))` into `out`, where `sum` has pmf `probs` starting at `min`.
fn frame_into(probs: &[f64], min: i32, f: &FramingFunction, out: &mut [f64], weight: f64) {
    let max = f.max();
    let q = max as usize;
    let lambda = f.lambda();
    for (i, &p) in probs.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let m = (min + i as i32).clamp(-max, max);
        if m == 0 && lambda > 0 {
            out[q + lambda as usize] += 0.5 * weight * p;
            out[q - lambda as usize] += 0.5 * weight * p;
        } else {
            let v = f.apply(m);
            out[(v + max) as usize] += weight * p;
        }
    }
}

/// Pmf of the VN output for a degree-`dv` node.
pub fn de_vn(channel: &Pmf, cn: &Pmf, dv: usize, f: &FramingFunction) -> Pmf {
    let mut sum = channel.clone();
    for _ in 1..dv {
        sum = sum.convolve(cn);
    }
    let mut out = vec![0.0; 2 * f.max() as usize + 1];
    frame_into(sum.probs(), sum.min(), f, &mut out, 1.0);
    Pmf::new(-f.max(), out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeOptions {
    pub eta: f64,
    pub max_iter: usize,
    /// Stop when the CN pmf moves less than this in L1 between iterations.
    pub stall_tolerance: f64,
    pub record_trace: bool,
}

impl DeOptions {
    /// Options for target `eta`; zero is replaced by [`ETA_ZERO_EFFECTIVE`].
    pub fn for_eta(eta: f64) -> Self {
        DeOptions {
            eta: if eta > 0.0 { eta } else { ETA_ZERO_EFFECTIVE },
            max_iter: DEFAULT_MAX_ITER,
            stall_tolerance: 1e-15,
            record_trace: false,
        }
    }

    pub fn with_trace(mut self) -> Self {
        self.record_trace = true;
        self
    }

    pub fn with_max_iter(mut self, n: usize) -> Self {
        self.max_iter = n;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeOutcome {
    /// `p_e` reached the target.
    pub success: bool,
    /// Iterations run (the last `p_e` belongs to this iteration).
    pub iterations: usize,
    pub final_pe: f64,
    /// `p_e^(0), p_e^(1), ...` when tracing.
    pub trace: Vec<f64>,
}

struct VnEntry {
    degree: usize,
    edge_fraction: f64,
    node_fraction: f64,
    framing: FramingFunction,
}

/// Precomputed ensemble + kernel, ready to be run on many channels.
pub struct DensityEvolution {
    max: i32,
    vns: Vec<VnEntry>,
    cns: Vec<(usize, f64)>,
    max_dv: usize,
}

impl DensityEvolution {
    pub fn new(dist: &DegreeDistribution, framings: &FramingSet) -> Result<Self> {
        framings.check_covers(dist.vn_degrees())?;
        let max = framings.max().expect("checked");
        let nodes = dist.vn_node_fractions();
        let vns: Vec<VnEntry> = dist
            .lambda
            .iter()
            .map(|(&d, &f)| VnEntry {
                degree: d,
                edge_fraction: f,
                node_fraction: nodes[&d],
                framing: framings.for_degree(d).expect("checked").clone(),
            })
            .collect();
        if dist.cn_degrees().any(|d| d < 2) {
            return Err(Error::Config("check-node degrees must be >= 2".into()));
        }
        Ok(DensityEvolution {
            max,
            max_dv: dist.max_vn_degree(),
            vns,
            cns: dist.rho.iter().map(|(&d, &f)| (d, f)).collect(),
        })
    }

    pub fn max(&self) -> i32 {
        self.max
    }

    pub fn channel_pmf(&self, snr_db: f64, mu: f64) -> Pmf {
        channel_pmf(sigma_from_snr_db(snr_db), mu, self.max)
    }

    /// Runs DE from the given channel pmf (supported on `{-Q..Q}`).
    pub fn run(&self, channel: &Pmf, opts: &DeOptions) -> DeOutcome {
        let q = self.max as usize;
        let width = 2 * q + 1;
        let chan = channel.saturate(self.max);

        let mut cn = vec![0.0; width];
        cn[q] = 1.0;
        let mut vn = vec![0.0; width];
        let mut next_cn = vec![0.0; width];
        // conv chain buffers, longest is channel + max_dv copies of cn
        let cap = width + self.max_dv * (width - 1);
        let mut cur = vec![0.0; cap];
        let mut nxt = vec![0.0; cap];

        let mut trace = Vec::new();
        let mut pe = f64::NAN;
        for iter in 0..=opts.max_iter {
            vn.iter_mut().for_each(|p| *p = 0.0);
            cur[..width].copy_from_slice(chan.probs());
            let mut len = width;
            let mut min = -self.max;
            pe = 0.0;
            for j in 0..=self.max_dv {
                for e in &self.vns {
                    if e.degree == j + 1 {
                        frame_into(&cur[..len], min, &e.framing, &mut vn, e.edge_fraction);
                    }
                    if e.degree == j {
                        pe += e.node_fraction * error_probability(min, &cur[..len]);
                    }
                }
                if j == self.max_dv {
                    break;
                }
                let new_len = len + width - 1;
                nxt[..new_len].iter_mut().for_each(|p| *p = 0.0);
                convolve_into(&cur[..len], &cn, &mut nxt[..new_len]);
                std::mem::swap(&mut cur, &mut nxt);
                len = new_len;
                min -= self.max;
            }
            if opts.record_trace {
                trace.push(pe);
            }
            if pe <= opts.eta {
                return DeOutcome {
                    success: true,
                    iterations: iter,
                    final_pe: pe,
                    trace,
                };
            }
            if iter == opts.max_iter {
                break;
            }
            next_cn.iter_mut().for_each(|p| *p = 0.0);
            for &(dc, rho) in &self.cns {
                cn_update_into(&vn, self.max, dc - 1, &mut next_cn, rho);
            }
            let moved: f64 = cn.iter().zip(&next_cn).map(|(a, b)| (a - b).abs()).sum();
            std::mem::swap(&mut cn, &mut next_cn);
            if moved < opts.stall_tolerance && iter > 0 {
                return DeOutcome {
                    success: false,
                    iterations: iter,
                    final_pe: pe,
                    trace,
                };
            }
        }
        DeOutcome {
            success: false,
            iterations: opts.max_iter,
            final_pe: pe,
            trace,
        }
    }

    pub fn run_at(&self, snr_db: f64, mu: f64, opts: &DeOptions) -> DeOutcome {
        self.run(&self.channel_pmf(snr_db, mu), opts)
    }

    /// `p_e^(0..=iterations)` at a given channel, without early exit.
    pub fn error_trace(&self, snr_db: f64, mu: f64, iterations: usize) -> Vec<f64> {
        let opts = DeOptions {
            eta: -1.0,
            max_iter: iterations,
            stall_tolerance: -1.0,
            record_trace: true,
        };
        self.run_at(snr_db, mu, &opts).trace
    }
}

/// Per-iteration error probabilities for a kernel on an ensemble.
pub fn de_iterate(
    dist: &DegreeDistribution,
    framings: &FramingSet,
    channel: &Pmf,
    max_iter: usize,
) -> Result<Vec<f64>> {
    let de = DensityEvolution::new(dist, framings)?;
    let opts = DeOptions {
        eta: 0.0,
        max_iter,
        stall_tolerance: 1e-15,
        record_trace: true,
    };
    Ok(de.run(channel, &opts).trace)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub snr_db: f64,
    pub mu_opt: f64,
    pub eta: f64,
    /// DE iterations needed at the reported threshold.
    pub iterations_to_converge: usize,
}

impl DensityEvolution {
    /// `true` when DE at `(snr_db, mu)` reaches the target.
    pub fn converges(&self, snr_db: f64, mu: f64, opts: &DeOptions) -> bool {
        self.run_at(snr_db, mu, opts).success
    }

    /// Smallest SNR (to [`SNR_TOLERANCE_DB`]) at which DE reaches `opts.eta`,
    /// searched by bisection below `upper`.
    fn bisect(&self, mu: f64, lower: f64, upper: f64, opts: &DeOptions) -> (f64, usize) {
        let (mut lo, mut hi) = (lower, upper);
        let mut hi_iters = self.run_at(hi, mu, opts).iterations;
        while hi - lo > SNR_TOLERANCE_DB {
            let mid = 0.5 * (lo + hi);
            let out = self.run_at(mid, mu, opts);
            if out.success {
                hi = mid;
                hi_iters = out.iterations;
            } else {
                lo = mid;
            }
        }
        (hi, hi_iters)
    }

    /// eta-threshold for a fixed gain factor.
    pub fn eta_threshold(&self, mu: f64, opts: &DeOptions) -> Result<ThresholdResult> {
        let (lo, hi) = SNR_BRACKET;
        if !self.converges(hi, mu, opts) || self.converges(lo, mu, opts) {
            return Err(Error::Kernel(format!(
                "no threshold bracket in [{lo}, {hi}] dB at mu = {mu}"
            )));
        }
        let (snr, iters) = self.bisect(mu, lo, hi, opts);
        Ok(ThresholdResult {
            snr_db: snr,
            mu_opt: mu,
            eta: opts.eta,
            iterations_to_converge: iters,
        })
    }

    /// Best threshold over a grid of gain factors.
    ///
    /// Candidates that do not converge at the best threshold found so far are
    /// skipped without bisection, which only relies on DE success being
    /// monotone in SNR. Coarse grid points are visited first so that a good
    /// incumbent appears early. Ties keep the first gain factor visited.
    pub fn optimize_mu(&self, mu_grid: &[f64], opts: &DeOptions) -> Result<ThresholdResult> {
        let (lo, hi) = SNR_BRACKET;
        let mut best: Option<ThresholdResult> = None;
        for &i in &visit_order(mu_grid.len()) {
            let mu = mu_grid[i];
            let upper = match &best {
                None => {
                    if !self.converges(hi, mu, opts) {
                        continue;
                    }
                    hi
                }
                Some(b) => {
                    if !self.converges(b.snr_db, mu, opts) {
                        continue;
                    }
                    b.snr_db
                }
            };
            if self.converges(lo, mu, opts) {
                return Err(Error::Kernel(format!(
                    "threshold below {lo} dB at mu = {mu}"
                )));
            }
            let (snr, iters) = self.bisect(mu, lo, upper, opts);
            if best.as_ref().is_some_and(|b| snr >= b.snr_db) {
                continue;
            }
            best = Some(ThresholdResult {
                snr_db: snr,
                mu_opt: mu,
                eta: opts.eta,
                iterations_to_converge: iters,
            });
        }
        best.ok_or_else(|| {
            Error::Kernel(format!(
                "no threshold bracket in [{lo}, {hi}] dB for any mu"
            ))
        })
    }

    /// `true` iff the best threshold over `mu_grid` is at most `snr_db`.
    pub fn threshold_at_most(&self, snr_db: f64, mu_grid: &[f64], opts: &DeOptions) -> bool {
        visit_order(mu_grid.len())
            .into_iter()
            .any(|i| self.converges(snr_db, mu_grid[i], opts))
    }
}

/// Default gain-factor grid: 1.0, 1.1, ..., 12.0.
pub fn default_mu_grid() -> Vec<f64> {
    (10..=120).map(|i| i as f64 / 10.0).collect()
}

/// Every tenth index first, then the rest in order.
fn visit_order(n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).step_by(10).collect();
    order.extend((0..n).filter(|i| i % 10 != 0));
    order
}

/// Convenience wrapper: eta-threshold at fixed `mu`.
pub fn eta_threshold(
    dist: &DegreeDistribution,
    framings: &FramingSet,
    mu: f64,
    eta: f64,
) -> Result<ThresholdResult> {
    DensityEvolution::new(dist, framings)?.eta_threshold(mu, &DeOptions::for_eta(eta))
}

/// Convenience wrapper: best eta-threshold over `mu_grid`.
pub fn optimize_mu(
    dist: &DegreeDistribution,
    framings: &FramingSet,
    eta: f64,
    mu_grid: &[f64],
) -> Result<ThresholdResult> {
    DensityEvolution::new(dist, framings)?.optimize_mu(mu_grid, &DeOptions::for_eta(eta))
}
