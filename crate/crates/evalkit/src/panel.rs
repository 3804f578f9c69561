//! Consensus construction and panel-level analyses.

use noctua_core::stage::StageLabel;
use serde::{Deserialize, Serialize};

use crate::{EvalError, Hypnogram};

/// A set of scorers plus their majority consensus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScorerPanel {
    pub scorers: Vec<Hypnogram>,
    pub consensus: Hypnogram,
    /// Fraction of scorers voting for the modal stage, per epoch; always in
    /// (0, 1].
    pub agreement_ratio: Vec<f64>,
    /// True where two or more stages shared the top vote count.
    pub tie_flags: Vec<bool>,
}

/// Majority vote per epoch. Ties go to the earliest stage in the fixed
/// order W, N1, N2, N3, R and are flagged.
///
/// A single-scorer panel is legal (its consensus is itself); this is what
/// leave-one-out analysis over two scorers reduces to.
pub fn majority_consensus(scorers: &[Hypnogram]) -> Result<ScorerPanel, EvalError> {
    let Some(first) = scorers.first() else {
        return Err(EvalError::Empty("scorer list"));
    };
    let epochs = first.epoch_count();
    if epochs == 0 {
        return Err(EvalError::Empty("hypnograms have no epochs"));
    }
    for s in scorers {
        if s.epoch_count() != epochs {
            return Err(EvalError::Alignment { left: epochs, right: s.epoch_count() });
        }
    }

    let mut consensus = Vec::with_capacity(epochs);
    let mut agreement_ratio = Vec::with_capacity(epochs);
    let mut tie_flags = Vec::with_capacity(epochs);
    for t in 0..epochs {
        let mut counts = [0usize; 5];
        for s in scorers {
            counts[s.stages[t].idx()] += 1;
        }
        let top = *counts.iter().max().unwrap();
        let winner = counts.iter().position(|&c| c == top).unwrap();
        consensus.push(StageLabel::ALL[winner]);
        agreement_ratio.push(top as f64 / scorers.len() as f64);
        tie_flags.push(counts.iter().filter(|&&c| c == top).count() > 1);
    }

    Ok(ScorerPanel {
        scorers: scorers.to_vec(),
        consensus: Hypnogram::new(consensus),
        agreement_ratio,
        tie_flags,
    })
}

/// First and last epoch (inclusive) in which *any* scorer assigned a stage
/// other than W. Wake epochs inside that interval are retained.
pub fn crop_analysis_period(panel: &ScorerPanel) -> Result<(usize, usize), EvalError> {
    let any_sleep =
        |t: usize| panel.scorers.iter().any(|s| s.stages[t] != StageLabel::Wake);
    let epochs = panel.consensus.epoch_count();
    let first = (0..epochs).find(|&t| any_sleep(t)).ok_or(EvalError::NoSleep)?;
    let last = (0..epochs).rev().find(|&t| any_sleep(t)).unwrap();
    Ok((first, last))
}

/// Agreement-ratio histograms split by whether the prediction matched the
/// consensus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementHistogram {
    /// `bins + 1` edges spanning [0, 1]; bin k covers (edge[k], edge[k+1]].
    pub bin_edges: Vec<f64>,
    pub agree: Vec<u64>,
    pub disagree: Vec<u64>,
}

pub fn agreement_distribution(
    predicted: &Hypnogram,
    panel: &ScorerPanel,
    bins: usize,
) -> Result<AgreementHistogram, EvalError> {
    if bins == 0 {
        return Err(EvalError::Empty("zero histogram bins"));
    }
    let epochs = panel.consensus.epoch_count();
    if predicted.epoch_count() != epochs {
        return Err(EvalError::Alignment { left: predicted.epoch_count(), right: epochs });
    }

    let bin_edges: Vec<f64> = (0..=bins).map(|k| k as f64 / bins as f64).collect();
    let mut agree = vec![0u64; bins];
    let mut disagree = vec![0u64; bins];
    for t in 0..epochs {
        // Ratios live in (0, 1], so bins are left-open: ratio r lands in
        // the bin whose upper edge is the smallest edge >= r.
        let slot = (panel.agreement_ratio[t] * bins as f64).ceil() as usize;
        let slot = slot.clamp(1, bins) - 1;
        if predicted.stages[t] == panel.consensus.stages[t] {
            agree[slot] += 1;
        } else {
            disagree[slot] += 1;
        }
    }
    Ok(AgreementHistogram { bin_edges, agree, disagree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use StageLabel::*;

    fn hyp(stages: &[StageLabel]) -> Hypnogram {
        Hypnogram::new(stages.to_vec())
    }

    #[test]
    fn seven_of_ten_is_a_clean_majority() {
        let scorers: Vec<Hypnogram> = (0..10)
            .map(|i| hyp(&[if i < 7 { N2 } else { N1 }]))
            .collect();
        let panel = majority_consensus(&scorers).unwrap();
        assert_eq!(panel.consensus.stages, vec![N2]);
        assert_eq!(panel.agreement_ratio, vec![0.7]);
        assert_eq!(panel.tie_flags, vec![false]);
    }

    #[test]
    fn five_five_tie_goes_to_the_earlier_stage_and_is_flagged() {
        let scorers: Vec<Hypnogram> =
            (0..10).map(|i| hyp(&[if i < 5 { Wake } else { N1 }])).collect();
        let panel = majority_consensus(&scorers).unwrap();
        assert_eq!(panel.consensus.stages, vec![Wake]);
        assert_eq!(panel.agreement_ratio, vec![0.5]);
        assert_eq!(panel.tie_flags, vec![true]);
    }

    #[test]
    fn unanimous_scorers_agree_with_themselves() {
        let s = hyp(&[Wake, N1, N2, N3, R]);
        let panel = majority_consensus(&[s.clone(), s.clone(), s.clone()]).unwrap();
        assert_eq!(panel.consensus, s);
        assert!(panel.agreement_ratio.iter().all(|&r| r == 1.0));
        assert!(panel.tie_flags.iter().all(|&t| !t));
    }

    #[test]
    fn unequal_lengths_are_an_alignment_error() {
        let err =
            majority_consensus(&[hyp(&[Wake, N1]), hyp(&[Wake])]).unwrap_err();
        assert!(matches!(err, EvalError::Alignment { left: 2, right: 1 }));
    }

    #[test]
    fn crop_spans_the_union_of_scorer_sleep() {
        // Scorer A sleeps epochs 2..=5, scorer B sleeps 3..=7.
        let mut a = vec![Wake; 10];
        let mut b = vec![Wake; 10];
        for t in 2..=5 {
            a[t] = N2;
        }
        for t in 3..=7 {
            b[t] = N1;
        }
        let panel = majority_consensus(&[hyp(&a), hyp(&b)]).unwrap();
        assert_eq!(crop_analysis_period(&panel).unwrap(), (2, 7));
    }

    #[test]
    fn single_scorer_single_sleep_epoch() {
        let mut a = vec![Wake; 50];
        a[42] = R;
        let panel = majority_consensus(&[hyp(&a)]).unwrap();
        assert_eq!(crop_analysis_period(&panel).unwrap(), (42, 42));
    }

    #[test]
    fn all_wake_panel_has_no_analysis_period() {
        let panel = majority_consensus(&[hyp(&[Wake; 5]), hyp(&[Wake; 5])]).unwrap();
        assert!(matches!(crop_analysis_period(&panel), Err(EvalError::NoSleep)));
    }

    #[test]
    fn perfect_predictions_leave_the_disagree_histogram_empty() {
        let scorers = vec![hyp(&[N2, N2, R, R]), hyp(&[N2, N2, R, N2])];
        let panel = majority_consensus(&scorers).unwrap();
        let hist = agreement_distribution(&panel.consensus.clone(), &panel, 10).unwrap();
        assert_eq!(hist.disagree.iter().sum::<u64>(), 0);
        assert_eq!(hist.agree.iter().sum::<u64>(), 4);
    }

    #[test]
    fn tie_only_disagreements_pile_up_at_one_half() {
        // Two scorers, ties everywhere; scorer B always votes the later
        // stage, so every tie resolves against it.
        let a = hyp(&[N1, N2, N3, N1]);
        let b = hyp(&[N2, N3, R, N2]);
        let panel = majority_consensus(&[a, b.clone()]).unwrap();
        assert!(panel.tie_flags.iter().all(|&t| t));
        let hist = agreement_distribution(&b, &panel, 4).unwrap();
        // Every epoch disagrees, all with ratio 0.5 → bin (0.25, 0.5].
        assert_eq!(hist.disagree, vec![0, 4, 0, 0]);
        assert_eq!(hist.agree, vec![0, 0, 0, 0]);
    }

    #[test]
    fn histogram_mass_partitions_the_epochs() {
        let scorers = vec![
            hyp(&[Wake, N1, N2, N3, R, N2, N2, Wake]),
            hyp(&[Wake, N2, N2, N3, R, N1, N2, N1]),
            hyp(&[N1, N1, N2, N3, N3, N2, N2, Wake]),
        ];
        let panel = majority_consensus(&scorers).unwrap();
        let predicted = hyp(&[Wake, N1, N1, N3, R, R, N2, Wake]);
        let hist = agreement_distribution(&predicted, &panel, 5).unwrap();
        let total: u64 =
            hist.agree.iter().sum::<u64>() + hist.disagree.iter().sum::<u64>();
        assert_eq!(total, 8);
    }
}
