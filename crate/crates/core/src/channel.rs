//! BPSK over AWGN and the gain-factor quantizer `gamma = [mu * y]_M`.
//!
//! Bit 0 is sent as `+1`, bit 1 as `-1`. SNR in dB is `10 log10(1 / sigma^2)`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::pmf::Pmf;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub sigma: f64,
    pub mu: f64,
}

impl ChannelParams {
    pub fn from_snr_db(snr_db: f64, mu: f64) -> Self {
        ChannelParams {
            sigma: sigma_from_snr_db(snr_db),
            mu,
        }
    }

    pub fn snr_db(&self) -> f64 {
        -20.0 * self.sigma.log10()
    }
}

pub fn sigma_from_snr_db(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 20.0)
}

/// Adds white Gaussian noise to the BPSK image of `bits`.
pub fn transmit<R: Rng + ?Sized>(bits: &[u8], sigma: f64, rng: &mut R, out: &mut Vec<f64>) {
    out.clear();
    out.extend(bits.iter().map(|&b| {
        let x = if b == 0 { 1.0 } else { -1.0 };
        let z: f64 = rng.sample(StandardNormal);
        x + sigma * z
    }));
}

/// `[mu * y]_M`: nearest integer, halves away from zero, saturated at `+-max`.
#[inline]
pub fn quantize(y: f64, mu: f64, max: i32) -> i32 {
    let r = (mu * y).round();
    r.clamp(-(max as f64), max as f64) as i32
}

/// `P(Z >= t)` for a standard normal `Z`.
fn upper_tail(t: f64) -> f64 {
    0.5 * libm::erfc(t / std::f64::consts::SQRT_2)
}

fn lower_tail(t: f64) -> f64 {
    0.5 * libm::erfc(-t / std::f64::consts::SQRT_2)
}

/// Mass of `N(mean, sigma^2)` on `[a, b)`.
fn gaussian_mass(a: f64, b: f64, mean: f64, sigma: f64) -> f64 {
    let ta = (a - mean) / sigma;
    let tb = (b - mean) / sigma;
    let p = if ta >= 0.0 {
        upper_tail(ta) - upper_tail(tb)
    } else if tb <= 0.0 {
        lower_tail(tb) - lower_tail(ta)
    } else {
        1.0 - lower_tail(ta) - upper_tail(tb)
    };
    if p < 1e-300 {
        0.0
    } else {
        p
    }
}

/// Exact pmf of the quantized channel output given `x = +1` was sent.
pub fn channel_pmf(sigma: f64, mu: f64, max: i32) -> Pmf {
    let mut probs = Vec::with_capacity(2 * max as usize + 1);
    for m in -max..=max {
        let lo = if m == -max {
            f64::NEG_INFINITY
        } else {
            (m as f64 - 0.5) / mu
        };
        let hi = if m == max {
            f64::INFINITY
        } else {
            (m as f64 + 0.5) / mu
        };
        probs.push(gaussian_mass(lo, hi, 1.0, sigma));
    }
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }
    Pmf::new(-max, probs)
}
