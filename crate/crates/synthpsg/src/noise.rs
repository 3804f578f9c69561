//! Background noise. EEG and EOG run 1/f ("pink") noise from a three-pole
//! economy filter over white Gaussian input, shelved below the delta band;
//! chin EMG stays white.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Scalp background plateaus below roughly this frequency. Raw 1/f noise
/// keeps growing toward DC instead, and that sub-delta wander reads as
/// slow-wave activity to any amplitude-criterion detector.
const SHELF_HZ: f64 = 2.0;

/// Pink noise, high-pass shelved at [`SHELF_HZ`] and normalized to unit
/// standard deviation over the whole vector, so callers can scale windows
/// to exact sigmas.
pub fn pink_unit(rng: &mut impl Rng, n: usize, sample_rate: f64) -> Vec<f64> {
    let (mut b0, mut b1, mut b2) = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let w: f64 = StandardNormal.sample(rng);
        b0 = 0.99765 * b0 + w * 0.0990460;
        b1 = 0.96300 * b1 + w * 0.2965164;
        b2 = 0.57000 * b2 + w * 1.0526913;
        out.push(b0 + b1 + b2 + w * 0.1848);
    }

    // Two one-pole passes: a single pole leaves enough 0.5–2 Hz residue at
    // realistic sigmas to trip an amplitude criterion now and then.
    let a = 1.0 / (1.0 + std::f64::consts::TAU * SHELF_HZ / sample_rate);
    for _ in 0..2 {
        let mut prev_in = 0.0;
        let mut prev_out = 0.0;
        for v in &mut out {
            let x = *v;
            prev_out = a * (prev_out + x - prev_in);
            prev_in = x;
            *v = prev_out;
        }
    }

    let mean = out.iter().sum::<f64>() / n.max(1) as f64;
    let var = out.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n.max(1) as f64;
    let std = var.sqrt();
    if std > 0.0 {
        for v in &mut out {
            *v = (*v - mean) / std;
        }
    }
    out
}

pub fn white(rng: &mut impl Rng, n: usize, sigma: f64) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let w: f64 = StandardNormal.sample(rng);
            w * sigma
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pink_is_unit_scale_and_low_frequency_heavy() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = pink_unit(&mut rng, 1 << 16, 128.0);
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / x.len() as f64;
        assert!(mean.abs() < 1e-9);
        assert!((var - 1.0).abs() < 1e-9);

        // Lag-1 autocorrelation of white noise is ~0; shelved pink still
        // sits far above it.
        let r1: f64 = x.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / x.len() as f64;
        assert!(r1 > 0.3, "lag-1 autocorrelation {r1}");
    }

    #[test]
    fn shelf_starves_the_delta_band() {
        // Mean power in 0.25 s blocks after removing each block's own mean
        // approximates the sub-4 Hz share; the shelf keeps it small.
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let x = pink_unit(&mut rng, 1 << 16, 128.0);
        let block = 32;
        let mut slow = 0.0;
        for c in x.chunks_exact(block) {
            let m = c.iter().sum::<f64>() / block as f64;
            slow += m * m;
        }
        slow /= (x.len() / block) as f64;
        // Unshelved Kellet pink puts most of its unit variance down here.
        assert!(slow < 0.15, "block-mean power {slow}");
    }

    #[test]
    fn white_matches_requested_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let x = white(&mut rng, 1 << 16, 6.0);
        let var = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
        assert!((var.sqrt() - 6.0).abs() < 0.1, "std {}", var.sqrt());
    }
}
