//! Confusion matrices and chance-corrected agreement.

use serde::{Deserialize, Serialize};

use crate::{EvalError, Hypnogram};

/// Epoch counts indexed `[reference stage][predicted stage]` in the fixed
/// order W, N1, N2, N3, R.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; 5]; 5],
}

impl ConfusionMatrix {
    pub fn from_counts(counts: [[u64; 5]; 5]) -> Self {
        Self { counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..5).map(|i| self.counts[i][i]).sum()
    }

    pub fn row_sums(&self) -> [u64; 5] {
        self.counts.map(|row| row.iter().sum())
    }

    pub fn col_sums(&self) -> [u64; 5] {
        let mut cols = [0u64; 5];
        for row in &self.counts {
            for (c, v) in cols.iter_mut().zip(row) {
                *c += v;
            }
        }
        cols
    }
}

pub fn confusion_matrix(
    predicted: &Hypnogram,
    reference: &Hypnogram,
) -> Result<ConfusionMatrix, EvalError> {
    if predicted.epoch_count() != reference.epoch_count() {
        return Err(EvalError::Alignment {
            left: predicted.epoch_count(),
            right: reference.epoch_count(),
        });
    }
    let mut counts = [[0u64; 5]; 5];
    for (p, r) in predicted.stages.iter().zip(&reference.stages) {
        counts[r.idx()][p.idx()] += 1;
    }
    Ok(ConfusionMatrix { counts })
}

/// Each row as percentages of its own total; all-zero rows stay zero.
pub fn row_normalize(m: &ConfusionMatrix) -> [[f64; 5]; 5] {
    let mut out = [[0.0; 5]; 5];
    for (r, row) in m.counts.iter().enumerate() {
        let total: u64 = row.iter().sum();
        if total == 0 {
            continue;
        }
        for (c, &v) in row.iter().enumerate() {
            out[r][c] = v as f64 / total as f64 * 100.0;
        }
    }
    out
}

/// Fraction of epochs on the diagonal.
pub fn accuracy(m: &ConfusionMatrix) -> Result<f64, EvalError> {
    let total = m.total();
    if total == 0 {
        return Err(EvalError::Empty("confusion matrix"));
    }
    Ok(m.trace() as f64 / total as f64)
}

/// Cohen's kappa from the matrix marginals.
pub fn cohen_kappa(m: &ConfusionMatrix) -> Result<f64, EvalError> {
    let total = m.total();
    if total == 0 {
        return Err(EvalError::Empty("confusion matrix"));
    }
    let total = total as f64;
    let p_o = m.trace() as f64 / total;
    let p_e = m
        .row_sums()
        .iter()
        .zip(m.col_sums())
        .map(|(&r, c)| r as f64 * c as f64)
        .sum::<f64>()
        / (total * total);
    if 1.0 - p_e < 1e-12 {
        return Err(EvalError::Degenerate);
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use noctua_core::stage::StageLabel::*;

    /// Held-out panel consensus vs the scorer, in epoch counts.
    pub(crate) const TEST_SET_COUNTS: [[u64; 5]; 5] = [
        [895, 228, 2676, 209, 2154],
        [2, 191, 1780, 10, 1272],
        [7, 553, 17228, 358, 2497],
        [0, 805, 2151, 4429, 1381],
        [36, 181, 2646, 11, 6294],
    ];

    /// Development recording, consensus vs the scorer.
    pub(crate) const DEV_COUNTS: [[u64; 5]; 5] = [
        [22, 2, 20, 1, 9],
        [1, 4, 23, 0, 8],
        [0, 9, 421, 1, 13],
        [0, 14, 60, 61, 3],
        [1, 4, 15, 0, 112],
    ];

    #[test]
    fn counting_matches_hand_example() {
        let reference = Hypnogram::new(vec![Wake, N2, R]);
        let predicted = Hypnogram::new(vec![N2, N2, R]);
        let m = confusion_matrix(&predicted, &reference).unwrap();
        assert_eq!(m.counts[Wake.idx()][N2.idx()], 1);
        assert_eq!(m.counts[N2.idx()][N2.idx()], 1);
        assert_eq!(m.counts[R.idx()][R.idx()], 1);
        assert_eq!(m.total(), 3);
        assert_eq!(m.row_sums(), [1, 0, 1, 0, 1]);
    }

    #[test]
    fn identical_inputs_are_diagonal() {
        let h = Hypnogram::new(vec![Wake, N1, N2, N3, R, N2, N2]);
        let m = confusion_matrix(&h, &h).unwrap();
        assert_eq!(m.trace(), 7);
        assert_eq!(accuracy(&m).unwrap(), 1.0);
        assert_eq!(cohen_kappa(&m).unwrap(), 1.0);
    }

    #[test]
    fn mismatched_lengths_are_rejected() {
        let a = Hypnogram::new(vec![Wake; 3]);
        let b = Hypnogram::new(vec![Wake; 4]);
        assert!(matches!(
            confusion_matrix(&a, &b),
            Err(EvalError::Alignment { left: 3, right: 4 })
        ));
    }

    #[test]
    fn test_set_counts_give_the_reported_agreement() {
        let m = ConfusionMatrix::from_counts(TEST_SET_COUNTS);
        assert_eq!(m.total(), 47994);
        let acc = accuracy(&m).unwrap();
        let kappa = cohen_kappa(&m).unwrap();
        assert!((acc - 0.6050131266).abs() < 1e-9, "{acc}");
        assert!((kappa - 0.4226890473).abs() < 1e-9, "{kappa}");
    }

    #[test]
    fn development_counts_give_the_reported_agreement() {
        let m = ConfusionMatrix::from_counts(DEV_COUNTS);
        assert_eq!(m.total(), 804);
        let acc = accuracy(&m).unwrap();
        let kappa = cohen_kappa(&m).unwrap();
        assert!((acc - 0.7711442786).abs() < 1e-9, "{acc}");
        assert!((kappa - 0.6073697788).abs() < 1e-9, "{kappa}");
    }

    #[test]
    fn row_normalization_reproduces_the_published_n2_row() {
        let m = ConfusionMatrix::from_counts(TEST_SET_COUNTS);
        let pct = row_normalize(&m);
        let n2 = pct[N2.idx()];
        let rounded: Vec<f64> = n2.iter().map(|v| (v * 10.0).round() / 10.0).collect();
        assert_eq!(rounded, vec![0.0, 2.7, 83.5, 1.7, 12.1]);
        let sum: f64 = n2.iter().sum();
        assert!((sum - 100.0).abs() < 1e-9);
    }

    #[test]
    fn zero_rows_normalize_to_zero() {
        let mut counts = [[0u64; 5]; 5];
        counts[0] = [2, 0, 0, 0, 2];
        let pct = row_normalize(&ConfusionMatrix::from_counts(counts));
        assert_eq!(pct[0], [50.0, 0.0, 0.0, 0.0, 50.0]);
        assert_eq!(pct[3], [0.0; 5]);
    }

    #[test]
    fn degenerate_single_class_kappa_is_an_error() {
        let mut counts = [[0u64; 5]; 5];
        counts[2][2] = 100;
        let m = ConfusionMatrix::from_counts(counts);
        assert!(matches!(cohen_kappa(&m), Err(EvalError::Degenerate)));
        assert!(matches!(
            accuracy(&ConfusionMatrix::default()),
            Err(EvalError::Empty(_))
        ));
    }
}
