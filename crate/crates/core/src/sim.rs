//! Monte-Carlo BER/FER simulation over BPSK-AWGN.
//!
//! Frames are processed in fixed batches; the stopping rule is evaluated only
//! between batches and every frame draws its noise from an RNG keyed by
//! `(seed, snr index, frame index)`, so counts do not depend on the number of
//! worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{sigma_from_snr_db, transmit};
use crate::code::TannerGraph;
use crate::error::{Error, Result};
use crate::kernel::Decoder;

/// Frames decoded between two evaluations of the stopping rule.
pub const BATCH_FRAMES: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodewordMode {
    #[default]
    AllZero,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimPlan {
    pub snrs_db: Vec<f64>,
    pub min_frame_errors: u64,
    pub max_frames: u64,
    pub seed: u64,
    /// Worker threads; 0 uses rayon's default.
    pub threads: usize,
    pub codeword: CodewordMode,
}

impl SimPlan {
    pub fn new(snrs_db: Vec<f64>) -> Self {
        SimPlan {
            snrs_db,
            min_frame_errors: 100,
            max_frames: 10_000_000,
            seed: 1,
            threads: 0,
            codeword: CodewordMode::AllZero,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.snrs_db.is_empty() {
            return Err(Error::Plan("no SNR points".into()));
        }
        if self.snrs_db.windows(2).any(|w| w[0] >= w[1])
            || self.snrs_db.iter().any(|s| !s.is_finite())
        {
            return Err(Error::Plan(
                "SNRs must be finite and strictly increasing".into(),
            ));
        }
        if self.min_frame_errors == 0 || self.max_frames == 0 {
            return Err(Error::Plan(
                "min_frame_errors and max_frames must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerPoint {
    pub snr_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
    pub avg_iters: f64,
}

impl BerPoint {
    /// Standard error of the BER estimate, treating bits as independent.
    pub fn ber_std_err(&self, n: usize) -> f64 {
        let bits = (self.frames * n as u64) as f64;
        (self.ber * (1.0 - self.ber) / bits).sqrt()
    }
}

/// Systematic encoder from Gaussian elimination of `H` over GF(2).
///
/// Handles rank-deficient matrices: the information length is `N - rank(H)`.
#[derive(Debug, Clone)]
pub struct Encoder {
    n: usize,
    info_cols: Vec<usize>,
    parity_cols: Vec<usize>,
    /// Row `i` gives parity bit `parity_cols[i]` as a mask over info bits.
    parity_rows: Vec<Vec<u64>>,
}

impl Encoder {
    pub fn new(graph: &TannerGraph) -> Result<Self> {
        let n = graph.n();
        let words = n.div_ceil(64);
        let mut rows: Vec<Vec<u64>> = (0..graph.m())
            .map(|m| {
                let mut r = vec![0u64; words];
                for v in graph.cn_neighbors(m) {
                    r[v / 64] ^= 1 << (v % 64);
                }
                r
            })
            .collect();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..n {
            let (w, b) = (col / 64, 1u64 << (col % 64));
            let Some(p) = (rank..rows.len()).find(|&r| rows[r][w] & b != 0) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row[w] & b != 0 {
                    row.iter_mut().zip(&pivot).for_each(|(x, y)| *x ^= y);
                }
            }
            pivots.push(col);
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        if rank == n {
            return Err(Error::Encoding(
                "parity-check matrix has full column rank".into(),
            ));
        }
        let is_pivot = {
            let mut v = vec![false; n];
            pivots.iter().for_each(|&c| v[c] = true);
            v
        };
        let info_cols: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        let info_words = info_cols.len().div_ceil(64);
        let parity_rows = rows[..rank]
            .iter()
            .map(|row| {
                let mut mask = vec![0u64; info_words];
                for (k, &c) in info_cols.iter().enumerate() {
                    if row[c / 64] >> (c % 64) & 1 == 1 {
                        mask[k / 64] |= 1 << (k % 64);
                    }
                }
                mask
            })
            .collect();
        Ok(Encoder {
            n,
            info_cols,
            parity_cols: pivots,
            parity_rows,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.info_cols.len()
    }

    /// Codeword for `info` (`k` bits, one per byte).
    pub fn encode(&self, info: &[u8]) -> Vec<u8> {
        assert_eq!(info.len(), self.k(), "info length must equal k");
        let mut packed = vec![0u64; self.k().div_ceil(64)];
        for (i, &b) in info.iter().enumerate() {
            packed[i / 64] |= ((b & 1) as u64) << (i % 64);
        }
        let mut word = vec![0u8; self.n];
        for (&c, &b) in self.info_cols.iter().zip(info) {
            word[c] = b & 1;
        }
        for (&c, mask) in self.parity_cols.iter().zip(&self.parity_rows) {
            let ones: u32 = mask
                .iter()
                .zip(&packed)
                .map(|(a, b)| (a & b).count_ones())
                .sum();
            word[c] = (ones & 1) as u8;
        }
        word
    }

    pub fn random_codeword<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Vec<u8> {
        let info: Vec<u8> = (0..self.k()).map(|_| rng.random::<bool>() as u8).collect();
        self.encode(&info)
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// RNG for one frame, independent of processing order.
pub fn frame_rng(seed: u64, snr_index: usize, frame: u64) -> ChaCha8Rng {
    let key = splitmix64(splitmix64(splitmix64(seed) ^ snr_index as u64) ^ frame);
    ChaCha8Rng::seed_from_u64(key)
}

#[derive(Default, Clone, Copy)]
struct Tally {
    frames: u64,
    bit_errors: u64,
    frame_errors: u64,
    iterations: u64,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            frames: self.frames + o.frames,
            bit_errors: self.bit_errors + o.bit_errors,
            frame_errors: self.frame_errors + o.frame_errors,
            iterations: self.iterations + o.iterations,
        }
    }
}

fn simulate_frame(
    decoder: &Decoder,
    encoder: Option<&Encoder>,
    sigma: f64,
    mut rng: ChaCha8Rng,
) -> Tally {
    let n = decoder.graph().n();
    let word = match encoder {
        Some(e) => e.random_codeword(&mut rng),
        None => vec![0u8; n],
    };
    let mut y = Vec::with_capacity(n);
    transmit(&word, sigma, &mut rng, &mut y);
    let llrs = decoder.quantize(&y);
    let out = decoder.decode_with_rng(&llrs, &mut rng);
    let errors = out.bits.iter().zip(&word).filter(|(a, b)| a != b).count() as u64;
    Tally {
        frames: 1,
        bit_errors: errors,
        frame_errors: (errors > 0) as u64,
        iterations: out.iterations_used as u64,
    }
}

/// Runs `plan` with `decoder`; random-codeword mode builds a GF(2) encoder.
pub fn run(decoder: &Decoder, plan: &SimPlan) -> Result<Vec<BerPoint>> {
    plan.validate()?;
    let encoder = match plan.codeword {
        CodewordMode::AllZero => None,
        CodewordMode::Random => Some(Encoder::new(decoder.graph())?),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.threads)
        .build()
        .map_err(|e| Error::Plan(e.to_string()))?;
    let n = decoder.graph().n();
    let mut points = Vec::with_capacity(plan.snrs_db.len());
    for (si, &snr) in plan.snrs_db.iter().enumerate() {
        let sigma = sigma_from_snr_db(snr);
        let mut total = Tally::default();
        while total.frame_errors < plan.min_frame_errors && total.frames < plan.max_frames {
            let start = total.frames;
            let end = (start + BATCH_FRAMES).min(plan.max_frames);
            let batch = pool.install(|| {
                (start..end)
                    .into_par_iter()
                    .map(|f| {
                        simulate_frame(
                            decoder,
                            encoder.as_ref(),
                            sigma,
                            frame_rng(plan.seed, si, f),
                        )
                    })
                    .reduce(Tally::default, Tally::merge)
            });
            total = total.merge(batch);
        }
        let frames = total.frames.max(1);
        points.push(BerPoint {
            snr_db: snr,
            frames: total.frames,
            bit_errors: total.bit_errors,
            frame_errors: total.frame_errors,
            ber: total.bit_errors as f64 / (frames * n as u64) as f64,
            fer: total.frame_errors as f64 / frames as f64,
            avg_iters: total.iterations as f64 / frames as f64,
        });
    }
    Ok(points)
}

/// Same pipeline on encoded random data.
pub fn random_codeword_mode(decoder: &Decoder, plan: &SimPlan) -> Result<Vec<BerPoint>> {
    let plan = SimPlan {
        codeword: CodewordMode::Random,
        ..plan.clone()
    };
    run(decoder, &plan)
}

/// Fails when BER rises with SNR by more than `sigmas` standard errors.
pub fn check_monotone(points: &[BerPoint], n: usize, sigmas: f64) -> Result<()> {
    for w in points.windows(2) {
        let se = (w[0].ber_std_err(n).powi(2) + w[1].ber_std_err(n).powi(2)).sqrt();
        if w[1].ber - w[0].ber > sigmas * se && w[1].ber > w[0].ber {
            return Err(Error::Plan(format!(
                "BER rises from {:.3e} at {} dB to {:.3e} at {} dB",
                w[0].ber, w[0].snr_db, w[1].ber, w[1].snr_db
            )));
        }
    }
    Ok(())
}

/// SNR at which the BER curve crosses `target`, by log-linear interpolation.
pub fn snr_at_ber(points: &[BerPoint], target: f64) -> Option<f64> {
    points.windows(2).find_map(|w| {
        let (a, b) = (&w[0], &w[1]);
        if a.ber >= target && b.ber <= target && a.ber > 0.0 && b.ber > 0.0 {
            let (la, lb, lt) = (a.ber.log10(), b.ber.log10(), target.log10());
            if la == lb {
                return Some(a.snr_db);
            }
            Some(a.snr_db + (la - lt) / (la - lb) * (b.snr_db - a.snr_db))
        } else {
            None
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::QcCode;

    #[test]
    fn encoder_produces_codewords() {
        let code = QcCode::parse("2 4 5\n0 1 2 -1\n3 -1 0 4\n").unwrap();
        let g = code.expand();
        let enc = Encoder::new(&g).unwrap();
        assert_eq!(enc.n(), 20);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            assert!(g.syndrome_ok(&enc.random_codeword(&mut rng)));
        }
        let zero = enc.encode(&vec![0; enc.k()]);
        assert!(zero.iter().all(|&b| b == 0));
    }

    #[test]
    fn encoder_handles_rank_deficiency() {
        // two identical rows: rank 1
        let code = QcCode::parse("2 3 1\n0 0 0\n0 0 0\n").unwrap();
        let enc = Encoder::new(&code.expand()).unwrap();
        assert_eq!(enc.k(), 2);
    }

    #[test]
    fn plan_validation() {
        assert!(SimPlan::new(vec![]).validate().is_err());
        assert!(SimPlan::new(vec![2.0, 1.0]).validate().is_err());
        let mut p = SimPlan::new(vec![1.0]);
        p.min_frame_errors = 0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn interpolation() {
        let pt = |s, ber| BerPoint {
            snr_db: s,
            frames: 1,
            bit_errors: 0,
            frame_errors: 0,
            ber,
            fer: 0.0,
            avg_iters: 0.0,
        };
        let pts = [pt(1.0, 1e-3), pt(2.0, 1e-5)];
        assert!((snr_at_ber(&pts, 1e-4).unwrap() - 1.5).abs() < 1e-12);
        assert_eq!(snr_at_ber(&pts, 1e-6), None);
    }
}
