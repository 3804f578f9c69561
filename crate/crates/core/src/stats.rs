//! Small order-statistics helpers shared by detectors and the night profile.

use crate::scalar::Scalar;

/// Percentile with linear interpolation between order statistics
/// (`pos = q/100 * (n-1)`), selected in O(n) rather than by sorting.
///
/// NaNs order after all finite values (`total_cmp`), so a clean signal is
/// unaffected by the tie-breaking rule.
///
/// # Panics
/// On an empty slice or `q` outside `[0, 100]`.
pub fn percentile<F: Scalar>(values: &[F], q: f64) -> F {
    assert!(!values.is_empty(), "percentile of empty slice");
    assert!((0.0..=100.0).contains(&q), "percentile q={q} outside [0, 100]");
    let n = values.len();
    if n == 1 {
        return values[0];
    }
    let pos = q / 100.0 * (n - 1) as f64;
    let lo_idx = pos.floor() as usize;
    let frac = pos - pos.floor();

    let mut work = values.to_vec();
    let (_, lo_val, rest) =
        work.select_nth_unstable_by(lo_idx, |a, b| a.as_f64().total_cmp(&b.as_f64()));
    let lo_val = *lo_val;
    if frac == 0.0 {
        return lo_val;
    }
    // The next order statistic is the minimum of the right partition.
    let hi_val = rest
        .iter()
        .copied()
        .min_by(|a, b| a.as_f64().total_cmp(&b.as_f64()))
        .expect("frac > 0 implies a right partition");
    lo_val + F::from_f64c(frac) * (hi_val - lo_val)
}

/// Median (50th percentile, interpolated).
pub fn median<F: Scalar>(values: &[F]) -> F {
    percentile(values, 50.0)
}
