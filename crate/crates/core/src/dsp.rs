//! Spectral estimation and filtering primitives the detectors are built on:
//! Welch power spectral density, band-power ratios, zero-phase Butterworth
//! band-pass filtering, and moving-RMS envelopes.
//!
//! Conventions:
//! * Welch uses a periodic Hann window, per-segment mean removal, and
//!   one-sided *density* scaling (`unit²/Hz`): interior bins carry
//!   `2 / (fs · Σw²)`, the DC and Nyquist bins `1 / (fs · Σw²)`. This matches
//!   the common scientific-stack definition bin for bin.
//! * The band-pass filter is an order-4 Butterworth (two cascaded biquads
//!   from an order-2 analog prototype) applied forward and backward, so the
//!   pass is zero-phase and the stopband attenuation doubles. Ends are
//!   padded by odd reflection before filtering to suppress edge transients.
//! * All functions are deterministic; nothing here consumes randomness.

use num_complex::Complex;
use rustfft::FftPlanner;
use thiserror::Error;

use crate::scalar::Scalar;

/// Errors from the spectral/filtering primitives.
#[derive(Debug, Error)]
pub enum DspError {
    /// The signal is shorter than one analysis window.
    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },
    /// Band edges inverted or outside the representable range.
    #[error("invalid band [{lo}, {hi}] Hz: {reason}")]
    Band { lo: f64, hi: f64, reason: &'static str },
    /// A parameter is outside its documented domain.
    #[error("invalid parameter: {0}")]
    Param(String),
}

/// Closed frequency band in Hz.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Band<F> {
    pub lo: F,
    pub hi: F,
}

impl<F: Scalar> Band<F> {
    pub fn new(lo: F, hi: F) -> Self {
        Band { lo, hi }
    }

    fn err(&self, reason: &'static str) -> DspError {
        DspError::Band { lo: self.lo.as_f64(), hi: self.hi.as_f64(), reason }
    }

    /// Band must satisfy `0 < lo < hi <= nyquist` (analysis bands).
    fn validate_analysis(&self, nyquist: F) -> Result<(), DspError> {
        if !(self.lo > F::zero()) {
            return Err(self.err("lower edge must be > 0"));
        }
        if !(self.lo < self.hi) {
            return Err(self.err("lower edge must be below upper edge"));
        }
        if !(self.hi <= nyquist) {
            return Err(self.err("upper edge must be at or below the Nyquist frequency"));
        }
        Ok(())
    }

    /// Band must satisfy `0 < lo < hi < nyquist` (filter design prewarps
    /// edges and cannot place one at Nyquist itself).
    fn validate_filter(&self, nyquist: F) -> Result<(), DspError> {
        self.validate_analysis(nyquist)?;
        if !(self.hi < nyquist) {
            return Err(self.err("upper edge must be strictly below the Nyquist frequency"));
        }
        Ok(())
    }
}

/// One-sided Welch power spectral density estimate.
#[derive(Debug, Clone)]
pub struct PsdEstimate<F> {
    /// Bin centre frequencies in Hz, `0 ..= fs/2`.
    pub freqs: Vec<F>,
    /// Density per bin, in (input unit)²/Hz.
    pub power: Vec<F>,
    /// Bin spacing in Hz.
    pub df: F,
}

impl<F: Scalar> PsdEstimate<F> {
    /// Integral of the density over all bins (≈ signal variance).
    pub fn total_power(&self) -> F {
        self.power.iter().copied().sum::<F>() * self.df
    }
}

fn hann<F: Scalar>(n: usize) -> Vec<F> {
    // Periodic form, the standard choice for spectral averaging.
    let nf = F::from_count(n);
    (0..n)
        .map(|i| {
            let half = F::from_f64c(0.5);
            half * (F::one() - (F::TAU() * F::from_count(i) / nf).cos())
        })
        .collect()
}

fn window_samples<F: Scalar>(fs: F, seconds: F) -> usize {
    (seconds * fs).round().as_f64() as usize
}

fn validate_rate_window<F: Scalar>(sample_rate: F, window_s: F) -> Result<(), DspError> {
    if !(sample_rate > F::zero()) || !sample_rate.is_finite() {
        return Err(DspError::Param(format!("sample rate must be positive, got {sample_rate}")));
    }
    if !(window_s > F::zero()) || !window_s.is_finite() {
        return Err(DspError::Param(format!("window length must be positive, got {window_s} s")));
    }
    Ok(())
}

/// Welch PSD over segments of `window_s` seconds advanced by
/// `window_s * (1 - overlap)`, Hann-windowed and mean-detrended.
///
/// `overlap` is the fractional segment overlap and must lie in `[0, 1)`.
pub fn welch_psd<F: Scalar>(
    samples: &[F],
    sample_rate: F,
    window_s: F,
    overlap: F,
) -> Result<PsdEstimate<F>, DspError> {
    validate_rate_window(sample_rate, window_s)?;
    if !(overlap >= F::zero()) || !(overlap < F::one()) {
        return Err(DspError::Param(format!("overlap must lie in [0, 1), got {overlap}")));
    }
    let n = window_samples(sample_rate, window_s).max(2);
    if samples.len() < n {
        return Err(DspError::InsufficientData { needed: n, got: samples.len() });
    }
    let hop = ((F::from_count(n) * (F::one() - overlap)).round().as_f64() as usize).max(1);

    let window = hann::<F>(n);
    let s2: F = window.iter().map(|w| *w * *w).sum();
    let nbins = n / 2 + 1;

    let mut planner = FftPlanner::<F>::new();
    let fft = planner.plan_fft_forward(n);
    let mut buf: Vec<Complex<F>> = vec![Complex::new(F::zero(), F::zero()); n];
    let mut acc = vec![F::zero(); nbins];

    let mut segments = 0usize;
    let mut start = 0usize;
    while start + n <= samples.len() {
        let seg = &samples[start..start + n];
        let mean = seg.iter().copied().sum::<F>() / F::from_count(n);
        for (slot, (&x, &w)) in buf.iter_mut().zip(seg.iter().zip(window.iter())) {
            *slot = Complex::new((x - mean) * w, F::zero());
        }
        fft.process(&mut buf);
        for (k, slot) in buf.iter().take(nbins).enumerate() {
            acc[k] = acc[k] + slot.norm_sqr();
        }
        segments += 1;
        start += hop;
    }

    let base = (F::from_count(segments) * sample_rate * s2).recip();
    let two = F::from_f64c(2.0);
    let nyquist_bin = if n % 2 == 0 { Some(nbins - 1) } else { None };
    let power: Vec<F> = acc
        .iter()
        .enumerate()
        .map(|(k, &a)| {
            let one_sided = if k == 0 || Some(k) == nyquist_bin { F::one() } else { two };
            a * base * one_sided
        })
        .collect();

    let df = sample_rate / F::from_count(n);
    let freqs = (0..nbins).map(|k| F::from_count(k) * df).collect();
    Ok(PsdEstimate { freqs, power, df })
}

/// Ratio of power in `band` (bins whose centre lies in `[lo, hi]`, inclusive)
/// to the total power above 0 Hz.
///
/// The DC bin is excluded from the total: segments are mean-detrended, so it
/// carries only numerical residue, and excluding it makes ratios over a band
/// partition sum to exactly 1. Returns 0 for an all-zero signal.
pub fn relative_band_power<F: Scalar>(psd: &PsdEstimate<F>, band: Band<F>) -> Result<F, DspError> {
    let nyquist = *psd.freqs.last().expect("psd has at least the DC bin");
    band.validate_analysis(nyquist)?;
    let mut in_band = F::zero();
    let mut total = F::zero();
    for (&f, &p) in psd.freqs.iter().zip(psd.power.iter()) {
        if f <= F::zero() {
            continue;
        }
        total = total + p;
        if f >= band.lo && f <= band.hi {
            in_band = in_band + p;
        }
    }
    if total <= F::zero() {
        return Ok(F::zero());
    }
    Ok(in_band / total)
}

/// One ratio per analysis window from a sliding Welch scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandRatioWindow<F> {
    pub start_s: F,
    pub end_s: F,
    pub ratio: F,
}

/// Slide a `window_s` Hann periodogram along `samples` in steps of `step_s`
/// and report the relative power of `band` in each window.
///
/// This is the workhorse of the alpha scan; it plans the FFT once and skips
/// the density normalization entirely (it cancels in the ratio, apart from
/// the one-sided doubling, which is applied per bin).
pub fn sliding_band_ratio<F: Scalar>(
    samples: &[F],
    sample_rate: F,
    window_s: F,
    step_s: F,
    band: Band<F>,
) -> Result<Vec<BandRatioWindow<F>>, DspError> {
    validate_rate_window(sample_rate, window_s)?;
    if !(step_s > F::zero()) {
        return Err(DspError::Param(format!("step must be positive, got {step_s} s")));
    }
    let nyq = sample_rate / F::from_f64c(2.0);
    band.validate_analysis(nyq)?;
    let n = window_samples(sample_rate, window_s).max(2);
    if samples.len() < n {
        return Err(DspError::InsufficientData { needed: n, got: samples.len() });
    }
    let step = (window_samples(sample_rate, step_s)).max(1);

    let window = hann::<F>(n);
    let nbins = n / 2 + 1;
    let df = sample_rate / F::from_count(n);
    let nyquist_bin = if n % 2 == 0 { Some(nbins - 1) } else { None };
    let two = F::from_f64c(2.0);

    let mut planner = FftPlanner::<F>::new();
    let fft = planner.plan_fft_forward(n);
    let mut buf: Vec<Complex<F>> = vec![Complex::new(F::zero(), F::zero()); n];

    let mut out = Vec::with_capacity(samples.len() / step + 1);
    let mut start = 0usize;
    while start + n <= samples.len() {
        let seg = &samples[start..start + n];
        let mean = seg.iter().copied().sum::<F>() / F::from_count(n);
        for (slot, (&x, &w)) in buf.iter_mut().zip(seg.iter().zip(window.iter())) {
            *slot = Complex::new((x - mean) * w, F::zero());
        }
        fft.process(&mut buf);
        let mut in_band = F::zero();
        let mut total = F::zero();
        for k in 1..nbins {
            let doubling = if Some(k) == nyquist_bin { F::one() } else { two };
            let p = buf[k].norm_sqr() * doubling;
            total = total + p;
            let f = F::from_count(k) * df;
            if f >= band.lo && f <= band.hi {
                in_band = in_band + p;
            }
        }
        let ratio = if total > F::zero() { in_band / total } else { F::zero() };
        out.push(BandRatioWindow {
            start_s: F::from_count(start) / sample_rate,
            end_s: F::from_count(start + n) / sample_rate,
            ratio,
        });
        start += step;
    }
    Ok(out)
}

/// One biquad section, normalized to `a0 = 1`.
#[derive(Debug, Clone, Copy)]
struct Biquad {
    b0: f64,
    b1: f64,
    b2: f64,
    a1: f64,
    a2: f64,
}

impl Biquad {
    fn run(&self, x: &mut [f64]) {
        let (mut s1, mut s2) = (0.0f64, 0.0f64);
        for v in x.iter_mut() {
            let xin = *v;
            let y = self.b0 * xin + s1;
            s1 = self.b1 * xin - self.a1 * y + s2;
            s2 = self.b2 * xin - self.a2 * y;
            *v = y;
        }
    }

    /// Response at `z = e^{jw}`.
    fn response(&self, w: f64) -> Complex<f64> {
        let z1 = Complex::from_polar(1.0, -w);
        let z2 = Complex::from_polar(1.0, -2.0 * w);
        (z1 * self.b1 + self.b0 + z2 * self.b2) / (z1 * self.a1 + 1.0 + z2 * self.a2)
    }
}

/// Order-4 Butterworth band-pass as two biquads plus the digital centre
/// frequency (rad/sample) the gain is normalized at.
fn design_bandpass(fs: f64, lo: f64, hi: f64) -> [Biquad; 2] {
    // Bilinear transform with prewarped edges.
    let k = 2.0 * fs;
    let w1 = k * (std::f64::consts::PI * lo / fs).tan();
    let w2 = k * (std::f64::consts::PI * hi / fs).tan();
    let bw = w2 - w1;
    let w0_sq = w1 * w2;

    // Order-2 analog prototype pole in the upper half-plane; its conjugate
    // produces the mirror pair. The LP->BP substitution sends each prototype
    // pole p to the two roots of s² - p·bw·s + w0² = 0.
    let proto = Complex::new(-std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2);
    let half = proto * (0.5 * bw);
    let disc = (half * half - w0_sq).sqrt();
    let analog = [half + disc, half - disc];

    let mut sections = analog.map(|s| {
        let z = (s + k) / (-s + k); // bilinear
        Biquad { b0: 1.0, b1: 0.0, b2: -1.0, a1: -2.0 * z.re, a2: z.norm_sqr() }
    });

    // Normalize to unit gain at the (digital) centre frequency.
    let wc = 2.0 * (w0_sq.sqrt() / k).atan();
    let mag: f64 = sections.iter().map(|s| s.response(wc).norm()).product();
    let g = mag.recip();
    sections[0].b0 = g;
    sections[0].b2 = -g;
    sections
}

/// Zero-phase order-4 Butterworth band-pass.
///
/// The signal is extended at both ends by odd reflection (three periods of
/// the lower band edge, clamped to the signal length) and filtered forward
/// then backward, so the output has no phase lag and the effective
/// attenuation is squared. Output length equals input length. Requires
/// `0 < band.lo < band.hi < sample_rate / 2`.
pub fn bandpass<F: Scalar>(
    samples: &[F],
    sample_rate: F,
    band: Band<F>,
) -> Result<Vec<F>, DspError> {
    if !(sample_rate > F::zero()) || !sample_rate.as_f64().is_finite() {
        return Err(DspError::Param(format!("sample rate must be positive, got {sample_rate}")));
    }
    let nyq = sample_rate / F::from_f64c(2.0);
    band.validate_filter(nyq)?;
    let n = samples.len();
    if n == 0 {
        return Ok(Vec::new());
    }

    let fs = sample_rate.as_f64();
    let lo = band.lo.as_f64();
    let sections = design_bandpass(fs, lo, band.hi.as_f64());

    let pad = ((3.0 * fs / lo).ceil() as usize).min(n - 1);
    let mut ext: Vec<f64> = Vec::with_capacity(n + 2 * pad);
    let first = samples[0].as_f64();
    let last = samples[n - 1].as_f64();
    for i in 0..pad {
        ext.push(2.0 * first - samples[pad - i].as_f64());
    }
    ext.extend(samples.iter().map(|s| s.as_f64()));
    for i in 0..pad {
        ext.push(2.0 * last - samples[n - 2 - i].as_f64());
    }

    for s in &sections {
        s.run(&mut ext);
    }
    ext.reverse();
    for s in &sections {
        s.run(&mut ext);
    }
    ext.reverse();

    Ok(ext[pad..pad + n].iter().map(|&v| F::from_f64c(v)).collect())
}

/// Moving root-mean-square envelope with a centred window of `window_s`
/// seconds, truncated at the signal edges (and to the whole signal when the
/// window is longer than the input).
///
/// # Panics
/// If `window_s` or `sample_rate` is not a positive finite number.
pub fn moving_rms<F: Scalar>(samples: &[F], sample_rate: F, window_s: F) -> Vec<F> {
    assert!(
        sample_rate > F::zero() && sample_rate.as_f64().is_finite(),
        "moving_rms: sample rate must be positive"
    );
    assert!(
        window_s > F::zero() && window_s.as_f64().is_finite(),
        "moving_rms: window must be positive"
    );
    let n = samples.len();
    if n == 0 {
        return Vec::new();
    }
    let w = window_samples(sample_rate, window_s).max(1);
    let half_left = (w - 1) / 2;
    let half_right = w / 2;

    // Prefix sums of squares, accumulated in f64 for stability.
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0f64);
    let mut acc = 0.0f64;
    for &x in samples {
        let v = x.as_f64();
        acc += v * v;
        prefix.push(acc);
    }

    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half_left);
            let hi = (i + half_right + 1).min(n);
            let mean = (prefix[hi] - prefix[lo]) / (hi - lo) as f64;
            F::from_f64c(mean.max(0.0).sqrt())
        })
        .collect()
}
