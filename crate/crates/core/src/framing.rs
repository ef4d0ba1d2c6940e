//! Framing functions and message alphabets.
//!
//! A framing function `F: M -> M` is odd and non-decreasing on the message
//! alphabet `M = {-Q, ..., +Q}`, so it is fully described by its LUT
//! `[|F(0)|, F(1), ..., F(Q)]`. When `|F(0)| = lambda > 0` the value at zero is
//! `+lambda` or `-lambda`, chosen by a [`TieMode`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bit-widths of the exchanged messages (`q`) and of the a-posteriori LLRs (`q_tilde`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    q: u32,
    q_tilde: u32,
}

impl Alphabet {
    pub fn new(q: u32, q_tilde: u32) -> Result<Self> {
        if q < 2 {
            return Err(Error::Alphabet(format!("q = {q} must be at least 2")));
        }
        if q_tilde <= q {
            return Err(Error::Alphabet(format!(
                "q_tilde = {q_tilde} must exceed q = {q}"
            )));
        }
        if q_tilde > 16 {
            return Err(Error::Alphabet(format!(
                "q_tilde = {q_tilde} exceeds 16 bits"
            )));
        }
        Ok(Alphabet { q, q_tilde })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn q_tilde(&self) -> u32 {
        self.q_tilde
    }

    /// `Q = 2^(q-1) - 1`.
    pub fn max(&self) -> i32 {
        max_for_bits(self.q)
    }

    /// `Q~ = 2^(q~-1) - 1`.
    pub fn ap_max(&self) -> i32 {
        max_for_bits(self.q_tilde)
    }

    /// `s_M(x) = sgn(x) min(|x|, Q)`.
    #[inline]
    pub fn saturate(&self, x: i32) -> i32 {
        saturate(x, self.max())
    }

    #[inline]
    pub fn saturate_ap(&self, x: i32) -> i32 {
        saturate(x, self.ap_max())
    }
}

/// Largest magnitude of a `bits`-bit sign-magnitude value.
pub fn max_for_bits(bits: u32) -> i32 {
    (1i32 << (bits - 1)) - 1
}

#[inline]
pub fn saturate(x: i32, max: i32) -> i32 {
    x.clamp(-max, max)
}

/// How `F(0) = +-lambda` is resolved when `lambda > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieMode {
    /// `+lambda` or `-lambda` with equal probability.
    Randomized,
    /// Always `+lambda`.
    #[default]
    AlwaysPositive,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FramingFunction {
    lut: Vec<i32>,
    weight: usize,
    /// Distinct LUT entries, ascending.
    magnitudes: Vec<i32>,
    /// Signed image set, ascending.
    image: Vec<i32>,
}

impl FramingFunction {
    /// Validates a LUT `[|F(0)|, F(1), ..., F(Q)]`; `Q` is `lut.len() - 1`.
    pub fn new(lut: Vec<i32>) -> Result<Self> {
        if lut.len() < 2 {
            return Err(Error::Lut(format!(
                "LUT needs at least 2 entries, got {}",
                lut.len()
            )));
        }
        let max = (lut.len() - 1) as i32;
        for (i, &v) in lut.iter().enumerate() {
            if !(0..=max).contains(&v) {
                return Err(Error::Lut(format!("entry {i} = {v} outside [0, {max}]")));
            }
        }
        if let Some(i) = lut.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::Lut(format!(
                "LUT decreases between positions {i} and {}",
                i + 1
            )));
        }
        let mut magnitudes = lut.clone();
        magnitudes.dedup();
        let weight = magnitudes.len();

        let mut image = Vec::with_capacity(2 * lut.len());
        if lut[0] == 0 {
            image.push(0);
        } else {
            image.push(lut[0]);
            image.push(-lut[0]);
        }
        for &v in &lut[1..] {
            image.push(v);
            image.push(-v);
        }
        image.sort_unstable();
        image.dedup();

        Ok(FramingFunction {
            lut,
            weight,
            magnitudes,
            image,
        })
    }

    /// Checks the LUT length against an alphabet as well.
    pub fn for_alphabet(lut: Vec<i32>, alphabet: &Alphabet) -> Result<Self> {
        if lut.len() != alphabet.max() as usize + 1 {
            return Err(Error::Lut(format!(
                "LUT has {} entries, alphabet needs {}",
                lut.len(),
                alphabet.max() + 1
            )));
        }
        Self::new(lut)
    }

    /// The identity LUT, i.e. the min-sum kernel.
    pub fn identity(max: i32) -> Self {
        Self::new((0..=max).collect()).expect("identity LUT is valid")
    }

    /// Offset min-sum: `F(m) = sgn(m) max(|m| - theta, 0)`.
    pub fn offset_min_sum(max: i32, theta: i32) -> Result<Self> {
        if theta < 1 || theta > max - 1 {
            return Err(Error::Offset {
                theta,
                max: max - 1,
            });
        }
        Self::new((0..=max).map(|m| (m - theta).max(0)).collect())
    }

    /// Partially offset min-sum: odd magnitudes drop by one, even ones stay.
    pub fn partially_offset_min_sum(max: i32) -> Self {
        Self::new(
            (0..=max)
                .map(|m| if m % 2 == 0 { m } else { m - 1 })
                .collect(),
        )
        .expect("POMS LUT is valid")
    }

    pub fn lut(&self) -> &[i32] {
        &self.lut
    }

    /// `Q` of the alphabet this LUT is defined on.
    pub fn max(&self) -> i32 {
        (self.lut.len() - 1) as i32
    }

    /// `lambda = |F(0)|`.
    pub fn lambda(&self) -> i32 {
        self.lut[0]
    }

    /// Number of distinct LUT entries.
    pub fn weight(&self) -> usize {
        self.weight
    }

    /// Framing bit-length `w = ceil(log2 W) + 1`.
    pub fn bits(&self) -> u32 {
        ceil_log2(self.weight) + 1
    }

    /// Signed image set, ascending.
    pub fn image(&self) -> &[i32] {
        &self.image
    }

    /// Distinct magnitudes, ascending. Their rank is the stored magnitude code.
    pub fn magnitudes(&self) -> &[i32] {
        &self.magnitudes
    }

    pub fn is_identity(&self) -> bool {
        self.weight == self.lut.len()
    }

    pub fn image_contains(&self, v: i32) -> bool {
        self.image.binary_search(&v).is_ok()
    }

    /// `Im(self) ⊆ Im(other)`.
    pub fn image_subset_of(&self, other: &FramingFunction) -> bool {
        self.image.iter().all(|&v| other.image_contains(v))
    }

    /// `F` on an argument already inside `M`; zero maps to `+lambda`.
    #[inline]
    pub fn apply(&self, m: i32) -> i32 {
        if m >= 0 {
            self.lut[m as usize]
        } else {
            -self.lut[(-m) as usize]
        }
    }

    /// `F(s_M(x))` with `F(0) = +lambda`.
    #[inline]
    pub fn frame(&self, x: i32) -> i32 {
        self.apply(saturate(x, self.max()))
    }

    /// `F(s_M(x))` resolving `F(0)` according to `mode`.
    pub fn frame_with<R: Rng + ?Sized>(&self, x: i32, mode: TieMode, rng: &mut R) -> i32 {
        let m = saturate(x, self.max());
        if m == 0 && self.lut[0] > 0 && mode == TieMode::Randomized && rng.random::<bool>() {
            -self.lut[0]
        } else {
            self.apply(m)
        }
    }

    /// Sign-magnitude `w`-bit code: sign in bit `w-1`, magnitude rank below it.
    pub fn encode(&self, value: i32) -> Result<u32> {
        if !self.image_contains(value) {
            return Err(Error::NotInImage(value));
        }
        let rank = self
            .magnitudes
            .binary_search(&value.abs())
            .map_err(|_| Error::NotInImage(value))? as u32;
        let sign = u32::from(value < 0);
        Ok((sign << (self.bits() - 1)) | rank)
    }

    /// Inverse of [`encode`](Self::encode).
    pub fn decode(&self, code: u32) -> Result<i32> {
        let w = self.bits();
        if code >> w != 0 {
            return Err(Error::InvalidCode(code));
        }
        let negative = code >> (w - 1) & 1 == 1;
        let rank = (code & ((1 << (w - 1)) - 1)) as usize;
        let mag = *self.magnitudes.get(rank).ok_or(Error::InvalidCode(code))?;
        let value = if negative { -mag } else { mag };
        if negative && mag == 0 || !self.image_contains(value) {
            return Err(Error::InvalidCode(code));
        }
        Ok(value)
    }
}

impl fmt::Display for FramingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.lut.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if i == 0 && *v > 0 {
                write!(f, "+-")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// Parses LUT literals such as `[0,1,1,3,3,3,7,7]` or `[+-1, 1, 1, 3, 3, 4, 4, 7]`.
///
/// A non-zero first entry must carry a `+-` (or `±`) prefix; the prefix on a
/// zero entry is rejected since it would be meaningless.
impl FromStr for FramingFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::Lut(msg);
        let body = s
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| bad(format!("expected [..] literal, got {s:?}")))?;
        let mut lut = Vec::new();
        for (i, tok) in body.split(',').enumerate() {
            let tok = tok.trim();
            let (tied, digits) = match tok.strip_prefix("+-").or_else(|| tok.strip_prefix('±')) {
                Some(rest) => (true, rest.trim()),
                None => (false, tok),
            };
            if tied && i != 0 {
                return Err(bad(format!("+- prefix only allowed on F(0), found at {i}")));
            }
            let v: i32 = digits
                .parse()
                .map_err(|_| bad(format!("entry {i}: cannot parse {tok:?}")))?;
            if i == 0 && v != 0 && !tied {
                return Err(bad(format!("non-zero F(0) = {v} must be written +-{v}")));
            }
            if i == 0 && v == 0 && tied {
                return Err(bad("F(0) = +-0 is not a valid tie".into()));
            }
            lut.push(v);
        }
        FramingFunction::new(lut)
    }
}

impl Serialize for FramingFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FramingFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Framing functions indexed by VN degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FramingSet {
    /// One function for every degree.
    Uniform(FramingFunction),
    PerDegree(BTreeMap<usize, FramingFunction>),
}

impl FramingSet {
    pub fn for_degree(&self, degree: usize) -> Option<&FramingFunction> {
        match self {
            FramingSet::Uniform(f) => Some(f),
            FramingSet::PerDegree(m) => m.get(&degree),
        }
    }

    pub fn functions(&self) -> Vec<&FramingFunction> {
        match self {
            FramingSet::Uniform(f) => vec![f],
            FramingSet::PerDegree(m) => m.values().collect(),
        }
    }

    /// `Q` shared by all functions, or `None` if they disagree.
    pub fn max(&self) -> Option<i32> {
        let fs = self.functions();
        let q = fs.first()?.max();
        fs.iter().all(|f| f.max() == q).then_some(q)
    }

    /// Fails unless every degree in `degrees` has a framing function.
    pub fn check_covers(&self, degrees: impl IntoIterator<Item = usize>) -> Result<()> {
        for d in degrees {
            if self.for_degree(d).is_none() {
                return Err(Error::Kernel(format!(
                    "no framing function for VN degree {d}"
                )));
            }
        }
        if self.max().is_none() {
            return Err(Error::Kernel(
                "framing functions use different alphabets".into(),
            ));
        }
        Ok(())
    }
}

impl From<FramingFunction> for FramingSet {
    fn from(f: FramingFunction) -> Self {
        FramingSet::Uniform(f)
    }
}

pub(crate) fn ceil_log2(n: usize) -> u32 {
    debug_assert!(n > 0);
    usize::BITS - (n - 1).leading_zeros()
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of LUTs on `{-Q..Q}` with exactly `W` distinct entries:
/// `C(Q, W-1) * C(Q+1, W)`.
pub fn count_framings(max: i32, weight: usize) -> u64 {
    if weight == 0 {
        return 0;
    }
    binomial(max as u64, weight as u64 - 1) * binomial(max as u64 + 1, weight as u64)
}

/// All framing functions on `{-Q..Q}` of weight `W`, in lexicographic LUT order.
pub fn enumerate(max: i32, weight: usize) -> Vec<FramingFunction> {
    let mut out = Vec::with_capacity(count_framings(max, weight) as usize);
    let len = max as usize + 1;
    if weight == 0 || weight > len {
        return out;
    }
    let mut lut = Vec::with_capacity(len);
    fill(&mut lut, len, max, weight, 0, &mut out);
    out
}

fn fill(
    lut: &mut Vec<i32>,
    len: usize,
    max: i32,
    weight: usize,
    distinct: usize,
    out: &mut Vec<FramingFunction>,
) {
    if lut.len() == len {
        if distinct == weight {
            out.push(FramingFunction::new(lut.clone()).expect("enumerated LUT is valid"));
        }
        return;
    }
    let remaining = len - lut.len();
    let low = lut.last().copied().unwrap_or(0);
    for v in low..=max {
        let new = if lut.is_empty() || v != low { 1 } else { 0 };
        let d = distinct + new;
        // d distinct so far; each later position adds at most one, values above v are bounded
        if d > weight || d + remaining - 1 < weight || (max - v) as usize + d < weight {
            continue;
        }
        lut.push(v);
        fill(lut, len, max, weight, d, out);
        lut.pop();
    }
}

/// Bits needed for CN messages when the CN sees VNs framed by `framings`:
/// `ceil(log2 |union of Im(F)|)`.
pub fn cn_message_width<'a, I>(framings: I) -> u32
where
    I: IntoIterator<Item = &'a FramingFunction>,
{
    let mut all: Vec<i32> = framings
        .into_iter()
        .flat_map(|f| f.image().iter().copied())
        .collect();
    all.sort_unstable();
    all.dedup();
    ceil_log2(all.len().max(1))
}
