//! End-to-end reproduction checks. Prints one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_GAPS` are reported but do not fail the test;
//! every other criterion must pass.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::time::Instant;

use nsfaid::channel::{sigma_from_snr_db, transmit};
use nsfaid::code::standin::{self, generate_regular, RegularLayout};
use nsfaid::code::{group_layers, DegreeDistribution, QcCode};
use nsfaid::de::{de_cn, de_vn, default_mu_grid, DeOptions, DensityEvolution};
use nsfaid::framing::{count_framings, enumerate, Alphabet, FramingFunction, FramingSet, TieMode};
use nsfaid::kernel::{
    cn_update, CnStorage, CompressedCnState, Decoder, KernelConfig, KernelSpec, Schedule,
};
use nsfaid::pmf::Pmf;
use nsfaid::schedule::{throughput_mbps, Architecture};
use nsfaid::search::{build_best_uniform_sets, memory_reduction, IrregularSpace};
use nsfaid::sim::{run, snr_at_ber, BerPoint, CodewordMode, Encoder, SimPlan};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KNOWN_GAPS: &[u32] = &[2, 3];

/// Writes past the test harness's output capture so results show in plain `cargo test` runs.
fn emit(line: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{line}").unwrap();
    out.flush().unwrap();
}

struct Report {
    lines: Vec<(u32, bool, String)>,
}

impl Report {
    fn record(&mut self, id: u32, ok: bool, detail: String) {
        let line = format!(
            "{} criterion {id}: {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
        emit(&line);
        self.lines.push((id, ok, line));
    }
}

fn f(s: &str) -> FramingFunction {
    s.parse().unwrap()
}

fn config(name: &str) -> KernelConfig {
    let path = format!("{}/../../configs/{name}", env!("CARGO_MANIFEST_DIR"));
    KernelConfig::parse(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

fn wimax_luts(d2: &str, d3: &str, d6: &str) -> FramingSet {
    FramingSet::PerDegree([(2, f(d2)), (3, f(d3)), (6, f(d6))].into())
}

const LUT: [&str; 8] = [
    "[0,1,2,3,4,5,6,7]",
    "[0,0,2,2,3,3,7,7]",
    "[0,1,1,2,2,7,7,7]",
    "[0,1,1,3,3,3,7,7]",
    "[0,1,1,3,3,7,7,7]",
    "[+-1,1,1,1,5,5,5,5]",
    "[+-1,1,1,1,7,7,7,7]",
    "[+-1,1,1,5,5,5,5,5]",
];

/// `(label, (d2, d3, d6) LUT indices, threshold dB, mu, memory columns)`.
type TradeoffRow = (&'static str, [usize; 3], f64, f64, [f64; 3]);

const TRADEOFF: [TradeoffRow; 6] = [
    ("444", [0, 0, 0], 1.374, 3.2, [0.0, 0.0, 0.0]),
    ("432", [0, 1, 6], 1.188, 3.0, [-27.63, 0.0, 0.0]),
    ("433", [0, 3, 2], 1.015, 2.8, [-17.76, 0.0, 0.0]),
    ("332", [4, 3, 6], 1.273, 2.6, [-34.87, -25.0, -13.04]),
    ("333", [4, 4, 3], 1.110, 2.4, [-25.0, -25.0, -13.04]),
    ("222", [7, 5, 5], 2.299, 2.3, [-50.0, -50.0, -26.09]),
];

fn tradeoff_framings(row: &TradeoffRow) -> FramingSet {
    let [a, b, c] = row.1;
    wimax_luts(LUT[a], LUT[b], LUT[c])
}

fn criterion_1(r: &mut Report) {
    let dist = DegreeDistribution::regular(3, 6);
    let opts = DeOptions::for_eta(0.0);
    let grid = default_mu_grid();
    let cases = [
        ("[0,1,2,3,4,5,6,7]", 1.643, 5.6),
        ("[0,1,1,3,3,3,7,7]", 1.409, 3.8),
        ("[+-1,1,1,1,1,6,6,6]", 1.834, 6.4),
        ("[0,0,0,0,0,6,6,6]", 2.251, 8.6),
    ];
    let mut ok = true;
    let mut detail = String::new();
    for (lut, t_ref, mu_ref) in cases {
        let de = DensityEvolution::new(&dist, &FramingSet::Uniform(f(lut))).unwrap();
        let at_mu = de.eta_threshold(mu_ref, &opts).unwrap().snr_db;
        let best = de.optimize_mu(&grid, &opts).unwrap();
        let good = (at_mu - t_ref).abs() <= 0.02
            && (best.snr_db - t_ref).abs() <= 0.02
            && (best.mu_opt - mu_ref).abs() <= 0.1 + 1e-9;
        ok &= good;
        write!(
            detail,
            "{lut} {at_mu:.4} dB @ {mu_ref} (ref {t_ref}), mu* {:.1} -> {:.4} dB; ",
            best.mu_opt, best.snr_db
        )
        .unwrap();
    }
    r.record(
        1,
        ok,
        format!("regular thresholds within 0.02 dB, mu* within 0.1: {detail}"),
    );
}

fn criterion_2(r: &mut Report) {
    let dist = DegreeDistribution::wimax_half_rate();
    let opts = DeOptions::for_eta(1e-6);
    let grid = default_mu_grid();
    let mut ok = true;
    let mut detail = String::new();
    for row in &TRADEOFF {
        let de = DensityEvolution::new(&dist, &tradeoff_framings(row)).unwrap();
        let best = de.optimize_mu(&grid, &opts).unwrap();
        let good = (best.snr_db - row.2).abs() <= 0.03 && (best.mu_opt - row.3).abs() <= 0.1 + 1e-9;
        ok &= good;
        write!(
            detail,
            "{} {:.3} dB mu {:.1} (ref {} @ {}); ",
            row.0, best.snr_db, best.mu_opt, row.2, row.3
        )
        .unwrap();
    }
    r.record(
        2,
        ok,
        format!("irregular thresholds at eta=1e-6 within 0.03 dB: {detail}"),
    );
}

fn criterion_3(r: &mut Report) {
    let started = Instant::now();
    let n4 = count_framings(7, 4);
    let n2 = count_framings(7, 2);
    let total: u64 = [2u32, 3, 4]
        .iter()
        .map(|&w| enumerate(7, 1 << (w - 1)).len() as u64)
        .sum();
    let dist = DegreeDistribution::wimax_half_rate();
    let cutoffs: BTreeMap<u32, f64> = [(2, 5.0), (3, 3.0)].into();
    let sets = build_best_uniform_sets(
        &dist,
        7,
        &[2, 3, 4],
        &cutoffs,
        &DeOptions::for_eta(1e-6),
        &default_mu_grid(),
    )
    .unwrap();
    let u2 = sets[&2].len();
    let u3 = sets[&3].len();
    let constrained = IrregularSpace::new(&sets, &[2, 3, 6]).count();
    let ok = n4 == 2450
        && n2 == 196
        && total == 2645
        && u2 == 121
        && u3 == 946
        && constrained == 7_017_762;
    r.record(
        3,
        ok,
        format!(
            "enumerate(7,4)={n4} (2450), enumerate(7,2)={n2} (196), uniform candidates={total} (2645), \
             |U(w=2, 5 dB)|={u2} (121), |U(w=3, 3 dB)|={u3} (946), constrained irregular={constrained} \
             (7017762) [{:.0} s]",
            started.elapsed().as_secs_f64()
        ),
    );
}

fn bits_for(n: usize) -> u64 {
    (usize::BITS - (n.max(1) - 1).leading_zeros()) as u64
}

fn criterion_4(r: &mut Report) {
    let dist = DegreeDistribution::wimax_half_rate();
    let g = standin::wimax_half_rate().expand();
    let mut ok = true;
    let mut detail = String::new();
    for row in &TRADEOFF {
        let framings = tradeoff_framings(row);
        let m = memory_reduction(&framings, &dist, 4);
        let got = [m.vn_pct, m.cn_uncompressed_pct, m.cn_compressed_pct];
        // bit counting on the expanded graph
        let deg = |n: usize| g.vn_edges(n).len();
        let vn: u64 = g
            .edges()
            .iter()
            .map(|e| framings.for_degree(deg(e.vn)).unwrap().bits() as u64)
            .sum();
        let image: BTreeSet<i32> = (0..g.n())
            .flat_map(|n| framings.for_degree(deg(n)).unwrap().image().to_vec())
            .collect();
        let w_cn = bits_for(image.len());
        let e = g.num_edges() as u64;
        let (mut comp, mut comp_ms) = (0u64, 0u64);
        for c in 0..g.m() {
            let dc = g.cn_range(c).len() as u64;
            comp += dc + 2 * (w_cn - 1) + bits_for(dc as usize);
            comp_ms += dc + 2 * 3 + bits_for(dc as usize);
        }
        let pct = |a: u64, b: u64| 100.0 * (a as f64 / b as f64 - 1.0);
        let oracle = [pct(vn, 4 * e), pct(w_cn * e, 4 * e), pct(comp, comp_ms)];
        for k in 0..3 {
            ok &= format!("{:.2}", got[k]) == format!("{:.2}", row.4[k]);
            ok &= (got[k] - oracle[k]).abs() <= 0.01;
        }
        write!(
            detail,
            "{} {:.2}/{:.2}/{:.2}; ",
            row.0, got[0], got[1], got[2]
        )
        .unwrap();
    }
    r.record(
        4,
        ok,
        format!("memory columns exact to 2 decimals and match bit counting: {detail}"),
    );
}

fn criterion_5(r: &mut Report) {
    use Architecture::{FullLayer, Pipelined};
    let mut cases: Vec<(u64, u64, u64, Architecture, u64)> = Vec::new();
    for (fm, mbps) in [
        (200, 1075),
        (222, 1193),
        (227, 1220),
        (175, 941),
        (200, 1075),
        (208, 1118),
    ] {
        cases.push((1296, fm, 12, Pipelined, mbps));
    }
    for (fm, mbps) in [
        (151, 3261),
        (172, 3715),
        (192, 4147),
        (125, 2700),
        (147, 3175),
        (172, 3715),
    ] {
        cases.push((1296, fm, 3, FullLayer, mbps));
    }
    for (fm, mbps) in [
        (175, 1673),
        (172, 1644),
        (178, 1701),
        (192, 1835),
        (192, 1835),
        (200, 1912),
        (161, 1539),
        (156, 1491),
        (161, 1539),
        (178, 1701),
        (178, 1701),
        (200, 1912),
    ] {
        cases.push((2304, fm, 12, Pipelined, mbps));
    }
    let wrong: Vec<String> = cases
        .iter()
        .filter(|&&(n, fm, l, a, mbps)| throughput_mbps(n, fm, l, 20, a) != mbps)
        .map(|&(n, fm, l, a, mbps)| {
            format!(
                "N={n} f={fm} L={l}: {} vs {mbps}",
                throughput_mbps(n, fm, l, 20, a)
            )
        })
        .collect();
    r.record(
        5,
        wrong.is_empty(),
        format!(
            "{} of {} tabulated Mbps values exact {wrong:?}",
            cases.len() - wrong.len(),
            cases.len()
        ),
    );
}

/// Steps up from `start` in 0.25 dB until the BER drops below 1e-4, then
/// interpolates the crossing.
fn crossing(code: &QcCode, cfg: &KernelConfig, start: f64, random: bool) -> (f64, Vec<BerPoint>) {
    let mut spec = cfg.to_spec(Some(code)).unwrap();
    spec.schedule = Schedule::Layered(group_layers(code, 1).unwrap());
    let dec = Decoder::for_qc(code, spec).unwrap();
    let mut points: Vec<BerPoint> = Vec::new();
    let mut snr = start;
    for _ in 0..12 {
        let mut plan = SimPlan::new(vec![snr]);
        plan.min_frame_errors = 40;
        plan.max_frames = 400_000;
        plan.seed = 2018;
        if random {
            plan.codeword = CodewordMode::Random;
        }
        let p = run(&dec, &plan).unwrap().remove(0);
        let done = p.ber < 1e-4;
        points.push(p);
        if done {
            break;
        }
        snr += 0.25;
    }
    let x = snr_at_ber(&points, 1e-4).expect("BER sweep brackets 1e-4");
    (x, points)
}

fn criterion_6(r: &mut Report) {
    let started = Instant::now();
    let reg = standin::regular_3_6_standin();
    let ms = crossing(&reg, &config("ms_q4.toml"), 2.25, false).0;
    let w3 = crossing(&reg, &config("regular_w3.toml"), 2.0, false).0;
    let w2 = crossing(&reg, &config("regular_w2.toml"), 2.5, true).0;
    let wimax = standin::wimax_half_rate();
    let k444 = crossing(&wimax, &config("wimax_ns_faid_444.toml"), 2.0, false).0;
    let k433 = crossing(&wimax, &config("wimax_ns_faid_433.toml"), 1.75, false).0;
    let k222 = crossing(&wimax, &config("wimax_ns_faid_222.toml"), 3.0, true).0;
    let gain_w3 = ms - w3;
    let loss_w2 = w2 - ms;
    let gain_433 = k444 - k433;
    let loss_222 = k222 - k444;
    let ok = (gain_w3 - 0.19).abs() <= 0.07
        && (loss_w2 - 0.21).abs() <= 0.07
        && (gain_433 - 0.30).abs() <= 0.07
        && (loss_222 - 1.0).abs() <= 0.15;
    r.record(
        6,
        ok,
        format!(
            "SNR deltas at BER 1e-4: (3,6) w=3 gain {gain_w3:.3} dB (0.19+-0.07), w=2 loss {loss_w2:.3} dB \
             (0.21+-0.07) [MS {ms:.3}, w3 {w3:.3}, w2 {w2:.3}]; WiMAX 433 gain {gain_433:.3} dB (0.30+-0.07), \
             222 loss {loss_222:.3} dB (1+-0.15) [444 {k444:.3}, 433 {k433:.3}, 222 {k222:.3}] [{:.0} s]",
            started.elapsed().as_secs_f64()
        ),
    );
}

fn random_pmf(rng: &mut ChaCha8Rng, max: i32) -> Pmf {
    let p: Vec<f64> = (0..2 * max + 1).map(|_| rng.random::<f64>()).collect();
    let s: f64 = p.iter().sum();
    Pmf::new(-max, p.iter().map(|x| x / s).collect())
}

fn tuples(max: i32, k: usize) -> Vec<Vec<i32>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t: Vec<i32>| {
                (-max..=max).map(move |v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

fn prop_pmf_normalization() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cn = random_pmf(&mut rng, 7);
    let mut x = random_pmf(&mut rng, 7);
    for _ in 0..200 {
        x = de_cn(
            &de_vn(&random_pmf(&mut rng, 7), &cn, 3, &f("[0,1,1,3,3,3,7,7]")),
            6,
        );
    }
    let drift = (x.total() - 1.0).abs();
    (drift <= 1e-12)
        .then_some(())
        .ok_or(format!("drift {drift:e}"))
}

fn prop_de_oracles() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for max in 1..=3 {
        for d in 2..=4usize {
            let p = random_pmf(&mut rng, max);
            let mut cn = vec![0.0; (2 * max + 1) as usize];
            for t in tuples(max, d - 1) {
                let pr: f64 = t.iter().map(|&v| p.prob(v)).product();
                let neg = t.iter().filter(|&&v| v < 0).count() % 2 == 1;
                let mag = t.iter().map(|v| v.abs()).min().unwrap();
                cn[(if neg { -mag } else { mag } + max) as usize] += pr;
            }
            let got = de_cn(&p, d);
            if got
                .probs()
                .iter()
                .zip(&cn)
                .any(|(a, b)| (a - b).abs() > 1e-12)
            {
                return Err(format!("de_cn Q={max} d={d}"));
            }
            let chan = random_pmf(&mut rng, max);
            for fr in enumerate(max, 2) {
                let mut vn = vec![0.0; (2 * max + 1) as usize];
                for c in -max..=max {
                    for t in tuples(max, d - 1) {
                        let pr = chan.prob(c) * t.iter().map(|&v| p.prob(v)).product::<f64>();
                        let s = (c + t.iter().sum::<i32>()).clamp(-max, max);
                        let l = fr.lut();
                        if s == 0 && l[0] > 0 {
                            vn[(max + l[0]) as usize] += pr / 2.0;
                            vn[(max - l[0]) as usize] += pr / 2.0;
                        } else {
                            vn[(s.signum() * l[s.unsigned_abs() as usize] + max) as usize] += pr;
                        }
                    }
                }
                let got = de_vn(&chan, &p, d, &fr);
                if got
                    .probs()
                    .iter()
                    .zip(&vn)
                    .any(|(a, b)| (a - b).abs() > 1e-12)
                {
                    return Err(format!("de_vn Q={max} d={d} {fr}"));
                }
            }
        }
    }
    Ok(())
}

fn prop_compressed_cn() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5000 {
        let d = rng.random_range(2..=12);
        let inputs: Vec<i32> = (0..d).map(|_| rng.random_range(-7..=7)).collect();
        let state = CompressedCnState::from_inputs(&inputs);
        for e in 0..d {
            let mut others = inputs.clone();
            others.remove(e);
            if state.extract(e) != cn_update(&others) {
                return Err(format!("{inputs:?} edge {e}"));
            }
        }
    }
    let code = standin::wimax_half_rate();
    let framings = wimax_luts(LUT[0], LUT[3], LUT[2]);
    let spec = KernelSpec::new(Alphabet::new(4, 6).unwrap(), framings, 2.8, 10)
        .with_schedule(Schedule::Layered(group_layers(&code, 1).unwrap()))
        .with_early_exit(false);
    let a = Decoder::for_qc(&code, spec.clone().with_cn_storage(CnStorage::Compressed)).unwrap();
    let b = Decoder::for_qc(&code, spec.with_cn_storage(CnStorage::Uncompressed)).unwrap();
    let mut y = Vec::new();
    for _ in 0..5 {
        transmit(&vec![0; code.n()], sigma_from_snr_db(1.5), &mut rng, &mut y);
        let llrs = a.quantize(&y);
        let seed = rng.random();
        if a.decode_traced(&llrs, &mut ChaCha8Rng::seed_from_u64(seed))
            != b.decode_traced(&llrs, &mut ChaCha8Rng::seed_from_u64(seed))
        {
            return Err("decoder traces differ".into());
        }
    }
    Ok(())
}

fn prop_negation_symmetry() -> Result<(), String> {
    let code = standin::regular_3_6_standin();
    let enc = Encoder::new(&code.expand()).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let spec = KernelSpec::new(
        Alphabet::new(4, 6).unwrap(),
        FramingSet::Uniform(f(LUT[3])),
        3.8,
        10,
    )
    .with_early_exit(false);
    let dec = Decoder::for_qc(&code, spec).unwrap();
    let mut y = Vec::new();
    for _ in 0..5 {
        transmit(&vec![0; code.n()], sigma_from_snr_db(1.0), &mut rng, &mut y);
        let llrs = dec.quantize(&y);
        let word = enc.random_codeword(&mut rng);
        let moved: Vec<i32> = llrs
            .iter()
            .zip(&word)
            .map(|(&l, &b)| if b == 1 { -l } else { l })
            .collect();
        let ta = dec
            .decode_traced(&llrs, &mut ChaCha8Rng::seed_from_u64(0))
            .trace
            .unwrap();
        let tb = dec
            .decode_traced(&moved, &mut ChaCha8Rng::seed_from_u64(0))
            .trace
            .unwrap();
        for (a, b) in ta.iter().zip(&tb) {
            for n in 0..code.n() {
                let s = if word[n] == 1 { -1 } else { 1 };
                if b[n] != s * a[n] {
                    return Err(format!("VN {n}"));
                }
            }
        }
    }
    Ok(())
}

fn prop_de_vs_sim() -> Result<(), String> {
    let layout = RegularLayout {
        layers: 3,
        dc: 6,
        cols: 6,
        z: 512,
        min_girth: 10,
        pipelined: false,
    };
    let code = generate_regular(&layout, 7).ok_or("no toy lift")?;
    let dist = DegreeDistribution::regular(3, 6);
    let (snr, mu) = (1.0, 3.8);
    let framings = FramingSet::Uniform(f(LUT[3]));
    let expected = DensityEvolution::new(&dist, &framings)
        .unwrap()
        .error_trace(snr, mu, 2);
    let spec = KernelSpec::new(Alphabet::new(4, 6).unwrap(), framings, mu, 2)
        .with_early_exit(false)
        .with_tie_mode(TieMode::Randomized);
    let dec = Decoder::for_qc(&code, spec).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut y = Vec::new();
    let mut per: [Vec<f64>; 2] = [vec![], vec![]];
    for _ in 0..200 {
        transmit(&vec![0; code.n()], sigma_from_snr_db(snr), &mut rng, &mut y);
        let llrs = dec.quantize(&y);
        let trace = dec.decode_traced(&llrs, &mut rng).trace.unwrap();
        for (l, ap) in trace.iter().enumerate() {
            let e: f64 = ap
                .iter()
                .map(|&v| {
                    if v < 0 {
                        1.0
                    } else if v == 0 {
                        0.5
                    } else {
                        0.0
                    }
                })
                .sum();
            per[l].push(e / code.n() as f64);
        }
    }
    for l in 0..2 {
        let xs = &per[l];
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        let se = (var / xs.len() as f64).sqrt();
        if (mean - expected[l + 1]).abs() > 5.0 * se {
            return Err(format!(
                "iteration {}: {mean:e} vs {:e} (se {se:e})",
                l + 1,
                expected[l + 1]
            ));
        }
    }
    Ok(())
}

/// Counts non-decreasing words over `low..=max` of length `left` by number of distinct values.
fn count_words(
    low: i32,
    max: i32,
    left: usize,
    prev: Option<i32>,
    distinct: usize,
    counts: &mut [u64],
) {
    if left == 0 {
        counts[distinct] += 1;
        return;
    }
    for v in low..=max {
        let d = distinct + usize::from(prev != Some(v));
        count_words(v, max, left - 1, Some(v), d, counts);
    }
}

fn prop_enumerate_counts() -> Result<(), String> {
    for max in 1..=8i32 {
        let len = max as usize + 1;
        let mut counts = vec![0u64; len + 1];
        count_words(0, max, len, None, 0, &mut counts);
        for w in 1..=len {
            if count_framings(max, w) != counts[w] || enumerate(max, w).len() as u64 != counts[w] {
                return Err(format!(
                    "Q={max} W={w}: {} vs {}",
                    count_framings(max, w),
                    counts[w]
                ));
            }
        }
    }
    Ok(())
}

fn prop_thread_determinism() -> Result<(), String> {
    let code = standin::regular_3_6_standin();
    let dec = Decoder::for_qc(
        &code,
        KernelSpec::min_sum(Alphabet::new(4, 6).unwrap(), 5.6, 20),
    )
    .unwrap();
    let mut plan = SimPlan::new(vec![1.75, 2.25]);
    plan.min_frame_errors = 10;
    plan.max_frames = 1000;
    plan.threads = 1;
    let one = run(&dec, &plan).unwrap();
    for t in [2, 4] {
        plan.threads = t;
        if run(&dec, &plan).unwrap() != one {
            return Err(format!("{t} threads differ"));
        }
    }
    Ok(())
}

fn criterion_7(r: &mut Report) {
    type Check = fn() -> Result<(), String>;
    let checks: [(&str, Check); 7] = [
        ("pmf normalization", prop_pmf_normalization),
        ("de_cn/de_vn vs enumeration", prop_de_oracles),
        ("compressed vs uncompressed CNU", prop_compressed_cn),
        ("negation symmetry", prop_negation_symmetry),
        ("DE vs simulation, iterations 1-2", prop_de_vs_sim),
        ("enumerate counts Q<=8", prop_enumerate_counts),
        ("thread-count determinism", prop_thread_determinism),
    ];
    let mut ok = true;
    let mut detail = String::new();
    for (name, check) in checks {
        match check() {
            Ok(()) => write!(detail, "{name} ok; ").unwrap(),
            Err(e) => {
                ok = false;
                write!(detail, "{name} FAILED ({e}); ").unwrap();
            }
        }
    }
    r.record(7, ok, format!("property suites: {detail}"));
}

#[test]
fn acceptance() {
    let mut r = Report { lines: Vec::new() };
    criterion_1(&mut r);
    criterion_2(&mut r);
    criterion_4(&mut r);
    criterion_5(&mut r);
    criterion_7(&mut r);
    criterion_6(&mut r);
    criterion_3(&mut r);
    emit("summary:");
    for (_, _, line) in &r.lines {
        emit(&format!("  {line}"));
    }
    let unexpected: Vec<&String> = r
        .lines
        .iter()
        .filter(|(id, ok, _)| !ok && !KNOWN_GAPS.contains(id))
        .map(|(_, _, l)| l)
        .collect();
    assert!(unexpected.is_empty(), "failing criteria: {unexpected:?}");
}
