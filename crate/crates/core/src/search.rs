//! Framing-function search: regular ranking, best-uniform sets, constrained
//! irregular enumeration and memory accounting.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::DegreeDistribution;
use crate::de::{DeOptions, DensityEvolution, ThresholdResult};
use crate::error::Result;
use crate::framing::{cn_message_width, count_framings, enumerate, FramingFunction, FramingSet};

/// Weight `W = 2^(w-1)` used for framing bit-length `w`.
pub fn weight_for_bits(w: u32) -> usize {
    1 << (w - 1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedFraming {
    pub framing: FramingFunction,
    /// `None` when no gain factor in the grid brackets a threshold.
    pub threshold: Option<ThresholdResult>,
}

impl RankedFraming {
    fn key(&self) -> f64 {
        self.threshold.as_ref().map_or(f64::INFINITY, |t| t.snr_db)
    }
}

/// DE-ranks every framing of weight `weight` on `{-Q..Q}`, best first.
pub fn search_regular(
    dist: &DegreeDistribution,
    max: i32,
    weight: usize,
    opts: &DeOptions,
    mu_grid: &[f64],
) -> Result<Vec<RankedFraming>> {
    rank(dist, enumerate(max, weight), opts, mu_grid)
}

/// DE-ranks the given uniform framings, best first.
pub fn rank(
    dist: &DegreeDistribution,
    framings: Vec<FramingFunction>,
    opts: &DeOptions,
    mu_grid: &[f64],
) -> Result<Vec<RankedFraming>> {
    let mut out: Vec<RankedFraming> = framings
        .into_par_iter()
        .map(|f| {
            let de = DensityEvolution::new(dist, &FramingSet::Uniform(f.clone()))?;
            Ok(RankedFraming {
                threshold: de.optimize_mu(mu_grid, opts).ok(),
                framing: f,
            })
        })
        .collect::<Result<_>>()?;
    out.sort_by(|a, b| {
        a.key()
            .total_cmp(&b.key())
            .then_with(|| a.framing.lut().cmp(b.framing.lut()))
    });
    Ok(out)
}

/// Best entry for each `|F(0)|`.
pub fn best_per_lambda(ranked: &[RankedFraming]) -> BTreeMap<i32, RankedFraming> {
    let mut out = BTreeMap::new();
    for r in ranked {
        if r.threshold.is_some() {
            out.entry(r.framing.lambda()).or_insert_with(|| r.clone());
        }
    }
    out
}

/// Uniform framings per bit-length whose threshold is at most the cutoff.
///
/// Bit-lengths without a cutoff keep every framing of that length.
pub fn build_best_uniform_sets(
    dist: &DegreeDistribution,
    max: i32,
    bit_lengths: &[u32],
    cutoffs: &BTreeMap<u32, f64>,
    opts: &DeOptions,
    mu_grid: &[f64],
) -> Result<BTreeMap<u32, Vec<FramingFunction>>> {
    let mut sets = BTreeMap::new();
    for &w in bit_lengths {
        let all = enumerate(max, weight_for_bits(w));
        let kept = match cutoffs.get(&w) {
            None => all,
            Some(&cut) => {
                let keep: Vec<bool> = all
                    .par_iter()
                    .map(|f| {
                        let de = DensityEvolution::new(dist, &FramingSet::Uniform(f.clone()))?;
                        Ok(de.threshold_at_most(cut, mu_grid, opts))
                    })
                    .collect::<Result<_>>()?;
                all.into_iter()
                    .zip(keep)
                    .filter(|(_, k)| *k)
                    .map(|(f, _)| f)
                    .collect()
            }
        };
        sets.insert(w, kept);
    }
    Ok(sets)
}

/// `(sum over w of N(Q, 2^(w-1)))^degrees`, as an exact integer.
pub fn unconstrained_count(max: i32, bit_lengths: &[u32], degrees: usize) -> u128 {
    let per: u128 = bit_lengths
        .iter()
        .map(|&w| count_framings(max, weight_for_bits(w)) as u128)
        .sum();
    per.pow(degrees as u32)
}

/// Degree whose framing carries the largest bit-length, ties to the larger degree.
pub fn dominant_degree(profile: &[(usize, u32)]) -> usize {
    profile
        .iter()
        .max_by_key(|&&(d, w)| (w, d))
        .map(|&(d, _)| d)
        .expect("non-empty profile")
}

/// Irregular candidates drawn from best-uniform sets under the image-inclusion
/// constraint `Im(F_d) ⊆ Im(F_d*)`, `d*` the dominant degree.
pub struct IrregularSpace<'a> {
    sets: &'a BTreeMap<u32, Vec<FramingFunction>>,
    degrees: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrregularCandidate {
    pub framings: BTreeMap<usize, FramingFunction>,
    pub w_profile: BTreeMap<usize, u32>,
}

impl IrregularCandidate {
    pub fn framing_set(&self) -> FramingSet {
        FramingSet::PerDegree(self.framings.clone())
    }

    /// Profile label such as `433`, in ascending degree order.
    pub fn label(&self) -> String {
        self.w_profile.values().map(|w| w.to_string()).collect()
    }

    pub fn admissible(&self) -> bool {
        let profile: Vec<(usize, u32)> = self.w_profile.iter().map(|(&d, &w)| (d, w)).collect();
        let top = &self.framings[&dominant_degree(&profile)];
        self.framings.values().all(|f| f.image_subset_of(top))
    }
}

impl<'a> IrregularSpace<'a> {
    pub fn new(sets: &'a BTreeMap<u32, Vec<FramingFunction>>, degrees: &[usize]) -> Self {
        let mut degrees = degrees.to_vec();
        degrees.sort_unstable();
        degrees.dedup();
        IrregularSpace { sets, degrees }
    }

    fn profiles(&self) -> Vec<Vec<(usize, u32)>> {
        let ws: Vec<u32> = self.sets.keys().copied().collect();
        let mut out = vec![vec![]];
        for &d in &self.degrees {
            out = out
                .into_iter()
                .flat_map(|p: Vec<(usize, u32)>| {
                    ws.iter().map(move |&w| {
                        let mut q = p.clone();
                        q.push((d, w));
                        q
                    })
                })
                .collect();
        }
        out
    }

    /// Exact number of admissible candidates, without materializing them.
    pub fn count(&self) -> u64 {
        self.profiles()
            .iter()
            .map(|p| {
                let top = dominant_degree(p);
                let top_w = p.iter().find(|x| x.0 == top).unwrap().1;
                self.sets[&top_w]
                    .iter()
                    .map(|ft| {
                        p.iter()
                            .filter(|x| x.0 != top)
                            .map(|&(_, w)| {
                                self.sets[&w]
                                    .iter()
                                    .filter(|f| f.image_subset_of(ft))
                                    .count() as u64
                            })
                            .product::<u64>()
                    })
                    .sum::<u64>()
            })
            .sum()
    }

    /// Streams every admissible candidate.
    pub fn iter(&self) -> impl Iterator<Item = IrregularCandidate> + '_ {
        self.profiles().into_iter().flat_map(move |p| {
            let top = dominant_degree(&p);
            let top_w = p.iter().find(|x| x.0 == top).unwrap().1;
            self.sets[&top_w]
                .iter()
                .flat_map(move |ft| self.with_top(&p, ft))
        })
    }

    /// Admissible candidates of one bit-length profile (degree order) whose
    /// dominant-degree framing is `ft`.
    pub fn with_top(
        &self,
        profile: &[(usize, u32)],
        ft: &FramingFunction,
    ) -> Vec<IrregularCandidate> {
        let top = dominant_degree(profile);
        let choices: Vec<(usize, Vec<&FramingFunction>)> = profile
            .iter()
            .map(|&(d, w)| {
                if d == top {
                    (d, vec![ft])
                } else {
                    (
                        d,
                        self.sets[&w]
                            .iter()
                            .filter(|f| f.image_subset_of(ft))
                            .collect(),
                    )
                }
            })
            .collect();
        if choices.iter().any(|c| c.1.is_empty()) {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut idx = vec![0usize; choices.len()];
        'odometer: loop {
            out.push(IrregularCandidate {
                framings: choices
                    .iter()
                    .zip(&idx)
                    .map(|((d, fs), &i)| (*d, fs[i].clone()))
                    .collect(),
                w_profile: profile.iter().copied().collect(),
            });
            for k in 0..idx.len() {
                idx[k] += 1;
                if idx[k] < choices[k].1.len() {
                    continue 'odometer;
                }
                idx[k] = 0;
            }
            break;
        }
        out
    }
}

/// Memory change versus `q`-bit MS, in percent (negative means smaller).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemoryReduction {
    pub vn_pct: f64,
    pub cn_uncompressed_pct: f64,
    pub cn_compressed_pct: f64,
}

/// Closed-form memory accounting for per-degree framings on `dist`.
pub fn memory_reduction(
    framings: &FramingSet,
    dist: &DegreeDistribution,
    q: u32,
) -> MemoryReduction {
    let q = q as f64;
    let vn_bits: f64 = dist
        .lambda
        .iter()
        .map(|(&d, &l)| l * framings.for_degree(d).expect("framing per degree").bits() as f64)
        .sum();
    let fs: Vec<&FramingFunction> = dist
        .vn_degrees()
        .filter_map(|d| framings.for_degree(d))
        .collect();
    let w_cn = cn_message_width(fs.iter().copied()) as f64;
    let words: f64 = dist
        .cn_node_fractions()
        .iter()
        .map(|(&dc, &frac)| {
            let index_bits = crate::framing::ceil_log2(dc) as f64;
            frac * (dc as f64 + 2.0 * (q - 1.0) + index_bits)
        })
        .sum();
    MemoryReduction {
        vn_pct: 100.0 * (vn_bits / q - 1.0),
        cn_uncompressed_pct: 100.0 * (w_cn / q - 1.0),
        cn_compressed_pct: 200.0 * (w_cn - q) / words,
    }
}

/// Best candidate of one bit-length profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub w_profile: String,
    pub luts: BTreeMap<usize, String>,
    pub threshold_db: f64,
    pub mu: f64,
    pub gain_vs_ms_db: f64,
    pub mem_vn: f64,
    pub mem_cn_u: f64,
    pub mem_cn_c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleTable {
    pub rows: Vec<EnsembleResult>,
    pub evaluated: u64,
    /// Budget ran out before every candidate was evaluated.
    pub partial: bool,
}

/// Evaluates candidates and keeps the best threshold per profile.
///
/// `ms_threshold_db` is the reference for the gain column; `budget` caps the
/// number of DE evaluations.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_ensemble<I>(
    candidates: I,
    dist: &DegreeDistribution,
    q: u32,
    opts: &DeOptions,
    mu_grid: &[f64],
    ms_threshold_db: f64,
    budget: Option<u64>,
) -> Result<EnsembleTable>
where
    I: IntoIterator<Item = IrregularCandidate>,
{
    let mut best: BTreeMap<String, (IrregularCandidate, ThresholdResult)> = BTreeMap::new();
    let mut evaluated = 0u64;
    let mut partial = false;
    let mut iter = candidates.into_iter().peekable();
    const CHUNK: usize = 256;
    while iter.peek().is_some() {
        let room = budget.map_or(CHUNK as u64, |b| (b - evaluated).min(CHUNK as u64)) as usize;
        if room == 0 {
            partial = true;
            break;
        }
        let chunk: Vec<IrregularCandidate> = iter.by_ref().take(room).collect();
        evaluated += chunk.len() as u64;
        let results: Vec<Option<ThresholdResult>> = chunk
            .par_iter()
            .map(|c| {
                let de = DensityEvolution::new(dist, &c.framing_set())?;
                Ok(de.optimize_mu(mu_grid, opts).ok())
            })
            .collect::<Result<_>>()?;
        for (c, r) in chunk.into_iter().zip(results) {
            let Some(r) = r else { continue };
            let label = c.label();
            let better = best.get(&label).is_none_or(|(_, b)| r.snr_db < b.snr_db);
            if better {
                best.insert(label, (c, r));
            }
        }
    }
    let rows = best
        .into_iter()
        .map(|(label, (c, r))| {
            let mem = memory_reduction(&c.framing_set(), dist, q);
            EnsembleResult {
                w_profile: label,
                luts: c
                    .framings
                    .iter()
                    .map(|(&d, f)| (d, f.to_string()))
                    .collect(),
                threshold_db: r.snr_db,
                mu: r.mu_opt,
                gain_vs_ms_db: ms_threshold_db - r.snr_db,
                mem_vn: mem.vn_pct,
                mem_cn_u: mem.cn_uncompressed_pct,
                mem_cn_c: mem.cn_compressed_pct,
            }
        })
        .collect();
    Ok(EnsembleTable {
        rows,
        evaluated,
        partial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> FramingFunction {
        s.parse().unwrap()
    }

    fn per_degree(a: &str, b: &str, c: &str) -> FramingSet {
        FramingSet::PerDegree([(2, f(a)), (3, f(b)), (6, f(c))].into())
    }

    #[test]
    fn memory_rows() {
        let dist = DegreeDistribution::wimax_half_rate();
        let lut0 = "[0,1,2,3,4,5,6,7]";
        let lut3 = "[0,1,1,3,3,3,7,7]";
        let lut4 = "[0,1,1,3,3,7,7,7]";
        let lut6 = "[+-1,1,1,1,7,7,7,7]";
        let m = memory_reduction(&per_degree(lut4, lut3, lut6), &dist, 4);
        assert_eq!(format!("{:.2}", m.vn_pct), "-34.87");
        assert_eq!(format!("{:.2}", m.cn_uncompressed_pct), "-25.00");
        assert_eq!(format!("{:.2}", m.cn_compressed_pct), "-13.04");
        let ms = memory_reduction(&per_degree(lut0, lut0, lut0), &dist, 4);
        assert_eq!(
            (ms.vn_pct, ms.cn_uncompressed_pct, ms.cn_compressed_pct),
            (0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn dominant_degree_ties_to_larger() {
        assert_eq!(dominant_degree(&[(2, 3), (3, 3), (6, 2)]), 3);
        assert_eq!(dominant_degree(&[(2, 4), (3, 3), (6, 2)]), 2);
    }

    #[test]
    fn unconstrained_product() {
        assert_eq!(unconstrained_count(7, &[2, 3, 4], 3), 2647u128.pow(3));
    }

    #[test]
    fn single_degree_space_is_the_set() {
        let sets: BTreeMap<u32, Vec<FramingFunction>> = [(2, enumerate(3, 2))].into();
        let space = IrregularSpace::new(&sets, &[3]);
        assert_eq!(space.count(), sets[&2].len() as u64);
        assert_eq!(space.iter().count(), sets[&2].len());
    }
}
