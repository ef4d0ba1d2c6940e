use std::collections::{BTreeMap, BTreeSet};

use nsfaid::code::{standin, DegreeDistribution, TannerGraph};
use nsfaid::framing::{enumerate, FramingFunction, FramingSet};
use nsfaid::search::{memory_reduction, unconstrained_count, IrregularCandidate, IrregularSpace};

fn f(s: &str) -> FramingFunction {
    s.parse().unwrap()
}

fn luts(d2: &str, d3: &str, d6: &str) -> FramingSet {
    FramingSet::PerDegree([(2, f(d2)), (3, f(d3)), (6, f(d6))].into())
}

fn bits_for(n: usize) -> u32 {
    let mut b = 0;
    while (1usize << b) < n {
        b += 1;
    }
    b
}

/// Bit counts straight from the Tanner graph: one VN message per edge, one
/// CN message per edge, and a per-check compressed record of
/// `dc` signs, two magnitudes and the position of the minimum.
fn counted(g: &TannerGraph, framings: &FramingSet, q: u32) -> [f64; 3] {
    let deg = |n: usize| g.vn_edges(n).len();
    let (mut vn_ns, mut vn_ms) = (0u64, 0u64);
    for e in g.edges() {
        vn_ns += framings.for_degree(deg(e.vn)).unwrap().bits() as u64;
        vn_ms += q as u64;
    }
    let image: BTreeSet<i32> = (0..g.n())
        .flat_map(|n| framings.for_degree(deg(n)).unwrap().image().to_vec())
        .collect();
    let w_cn = bits_for(image.len()) as u64;
    let cn_ns = w_cn * g.num_edges() as u64;
    let cn_ms = q as u64 * g.num_edges() as u64;
    let (mut comp_ns, mut comp_ms) = (0u64, 0u64);
    for m in 0..g.m() {
        let dc = g.cn_range(m).len() as u64;
        let index = bits_for(dc as usize) as u64;
        comp_ns += dc + 2 * (w_cn - 1) + index;
        comp_ms += dc + 2 * (q as u64 - 1) + index;
    }
    let pct = |a: u64, b: u64| 100.0 * (a as f64 / b as f64 - 1.0);
    [pct(vn_ns, vn_ms), pct(cn_ns, cn_ms), pct(comp_ns, comp_ms)]
}

#[test]
fn memory_columns_match_bit_counting() {
    let code = standin::wimax_half_rate();
    let g = code.expand();
    let dist = DegreeDistribution::wimax_half_rate();
    let table = [
        (
            luts(
                "[0,1,2,3,4,5,6,7]",
                "[0,1,2,3,4,5,6,7]",
                "[0,1,2,3,4,5,6,7]",
            ),
            [0.0, 0.0, 0.0],
        ),
        (
            luts(
                "[0,1,2,3,4,5,6,7]",
                "[0,0,2,2,3,3,7,7]",
                "[+-1,1,1,1,7,7,7,7]",
            ),
            [-27.63, 0.0, 0.0],
        ),
        (
            luts(
                "[0,1,2,3,4,5,6,7]",
                "[0,1,1,3,3,3,7,7]",
                "[0,1,1,2,2,7,7,7]",
            ),
            [-17.76, 0.0, 0.0],
        ),
        (
            luts(
                "[0,1,1,3,3,7,7,7]",
                "[0,1,1,3,3,3,7,7]",
                "[+-1,1,1,1,7,7,7,7]",
            ),
            [-34.87, -25.0, -13.04],
        ),
        (
            luts(
                "[0,1,1,3,3,7,7,7]",
                "[0,1,1,3,3,7,7,7]",
                "[0,1,1,3,3,3,7,7]",
            ),
            [-25.0, -25.0, -13.04],
        ),
        (
            luts(
                "[+-1,1,1,5,5,5,5,5]",
                "[+-1,1,1,1,5,5,5,5]",
                "[+-1,1,1,1,5,5,5,5]",
            ),
            [-50.0, -50.0, -26.09],
        ),
    ];
    for (framings, expected) in table {
        let m = memory_reduction(&framings, &dist, 4);
        let got = [m.vn_pct, m.cn_uncompressed_pct, m.cn_compressed_pct];
        let oracle = counted(&g, &framings, 4);
        for k in 0..3 {
            assert!(
                (got[k] - oracle[k]).abs() <= 0.01,
                "{framings:?} column {k}: {} vs {}",
                got[k],
                oracle[k]
            );
            assert_eq!(
                format!("{:.2}", got[k]),
                format!("{:.2}", expected[k]),
                "{framings:?} column {k}"
            );
        }
    }
}

fn toy_sets() -> BTreeMap<u32, Vec<FramingFunction>> {
    let mut sets = BTreeMap::new();
    sets.insert(2, enumerate(3, 2).into_iter().step_by(2).collect());
    sets.insert(3, enumerate(3, 4));
    sets
}

/// Every pair of profile and framing per degree, filtered by image inclusion.
fn brute_force(
    sets: &BTreeMap<u32, Vec<FramingFunction>>,
    degrees: &[usize],
) -> Vec<IrregularCandidate> {
    let mut all: Vec<IrregularCandidate> = vec![IrregularCandidate {
        framings: BTreeMap::new(),
        w_profile: BTreeMap::new(),
    }];
    for &d in degrees {
        let mut next = Vec::new();
        for c in &all {
            for (&w, fs) in sets {
                for f in fs {
                    let mut c = c.clone();
                    c.framings.insert(d, f.clone());
                    c.w_profile.insert(d, w);
                    next.push(c);
                }
            }
        }
        all = next;
    }
    all.into_iter().filter(|c| c.admissible()).collect()
}

#[test]
fn irregular_count_matches_brute_force() {
    let sets = toy_sets();
    for degrees in [vec![2, 3], vec![2, 3, 6]] {
        let space = IrregularSpace::new(&sets, &degrees);
        let brute = brute_force(&sets, &degrees);
        assert_eq!(space.count(), brute.len() as u64);
        let listed: Vec<IrregularCandidate> = space.iter().collect();
        assert_eq!(listed.len(), brute.len());
        let key = |c: &IrregularCandidate| format!("{:?}", c.framings);
        let a: BTreeSet<String> = listed.iter().map(key).collect();
        let b: BTreeSet<String> = brute.iter().map(key).collect();
        assert_eq!(a, b);
    }
}

#[test]
fn image_constraint_shrinks_the_space() {
    let sets = toy_sets();
    let total: u64 = sets.values().map(|s| s.len() as u64).sum();
    let constrained = IrregularSpace::new(&sets, &[2, 3, 6]).count();
    assert!((constrained as u128) < total.pow(3) as u128);
    assert_eq!(unconstrained_count(7, &[2, 3], 3), 2646u128.pow(3));
}
