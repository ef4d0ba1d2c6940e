//! Probability mass functions on contiguous integer ranges.

use std::fmt;

#[derive(Clone, PartialEq)]
pub struct Pmf {
    min: i32,
    probs: Vec<f64>,
}

impl Pmf {
    /// `probs[i]` is the mass at `min + i`.
    pub fn new(min: i32, probs: Vec<f64>) -> Self {
        assert!(!probs.is_empty(), "pmf support must be non-empty");
        Pmf { min, probs }
    }

    /// Point mass at `v`.
    pub fn delta(v: i32) -> Self {
        Pmf::new(v, vec![1.0])
    }

    /// Point mass at `v` on the support `[-max, max]`.
    pub fn delta_on(v: i32, max: i32) -> Self {
        let mut p = Pmf::zeros(max);
        p.probs[(v + max) as usize] = 1.0;
        p
    }

    /// All-zero vector on `[-max, max]`.
    pub fn zeros(max: i32) -> Self {
        Pmf::new(-max, vec![0.0; 2 * max as usize + 1])
    }

    pub fn min(&self) -> i32 {
        self.min
    }

    pub fn max(&self) -> i32 {
        self.min + self.probs.len() as i32 - 1
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn probs_mut(&mut self) -> &mut [f64] {
        &mut self.probs
    }

    pub fn prob(&self, v: i32) -> f64 {
        if v < self.min || v > self.max() {
            0.0
        } else {
            self.probs[(v - self.min) as usize]
        }
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, &p)| (self.min + i as i32, p))
    }

    /// Values carrying non-zero mass.
    pub fn support(&self) -> impl Iterator<Item = i32> + '_ {
        self.iter().filter(|&(_, p)| p > 0.0).map(|(v, _)| v)
    }

    /// Distribution of the sum of independent draws from `self` and `other`.
    pub fn convolve(&self, other: &Pmf) -> Pmf {
        let mut out = vec![0.0; self.probs.len() + other.probs.len() - 1];
        convolve_into(&self.probs, &other.probs, &mut out);
        Pmf::new(self.min + other.min, out)
    }

    /// Distribution of `-X`.
    pub fn mirror(&self) -> Pmf {
        let mut probs = self.probs.clone();
        probs.reverse();
        Pmf::new(-self.max(), probs)
    }

    /// Distribution of `s(X)` with `s` clamping to `[-max, max]`; the result lives on `[-max, max]`.
    pub fn saturate(&self, max: i32) -> Pmf {
        let mut out = Pmf::zeros(max);
        for (v, p) in self.iter() {
            out.probs[(v.clamp(-max, max) + max) as usize] += p;
        }
        out
    }

    /// `P(X < 0) + P(X = 0) / 2`.
    pub fn error_probability(&self) -> f64 {
        error_probability(self.min, &self.probs)
    }

    /// L1 distance, treating both as zero outside their supports.
    pub fn l1_distance(&self, other: &Pmf) -> f64 {
        let lo = self.min.min(other.min);
        let hi = self.max().max(other.max());
        (lo..=hi)
            .map(|v| (self.prob(v) - other.prob(v)).abs())
            .sum()
    }
}

impl fmt::Debug for Pmf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.iter()).finish()
    }
}

/// `out[i + j] += a[i] * b[j]`; `out` must be zeroed and `a.len() + b.len() - 1` long.
#[inline]
pub(crate) fn convolve_into(a: &[f64], b: &[f64], out: &mut [f64]) {
    debug_assert_eq!(out.len(), a.len() + b.len() - 1);
    for (i, &pa) in a.iter().enumerate() {
        if pa == 0.0 {
            continue;
        }
        for (o, &pb) in out[i..i + b.len()].iter_mut().zip(b) {
            *o += pa * pb;
        }
    }
}

pub(crate) fn error_probability(min: i32, probs: &[f64]) -> f64 {
    let mut pe = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        let v = min + i as i32;
        if v < 0 {
            pe += p;
        } else if v == 0 {
            pe += 0.5 * p;
        } else {
            break;
        }
    }
    pe
}
