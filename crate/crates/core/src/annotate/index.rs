//! Per-epoch view of the annotation stream. Annotations are sorted into a
//! stable global order; the position in that order is the annotation's id,
//! which is what explanations reference and what the annotation file's line
//! numbers correspond to.

use thiserror::Error;

use super::{merge_intervals, AnnotationKind, MicroAnnotation};
use crate::recording::Epoch;
use crate::EPOCH_SECONDS;

pub const KIND_COUNT: usize = 9;

/// An annotation's intersection with one epoch. `id` indexes the global
/// sorted annotation list; the original (unclipped) bounds live there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochItem {
    pub id: usize,
    pub start_s: f64,
    pub end_s: f64,
}

#[derive(Debug, Error)]
#[error("annotation {id} ({kind:?} [{start_s} s, {end_s} s]) {reason}")]
pub struct AlignmentError {
    pub id: usize,
    pub kind: AnnotationKind,
    pub start_s: f64,
    pub end_s: f64,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct EpochAnnotationIndex {
    epochs: Vec<Epoch>,
    annotations: Vec<MicroAnnotation>,
    cells: Vec<[Vec<EpochItem>; KIND_COUNT]>,
    coverage: Vec<[f64; KIND_COUNT]>,
}

/// Sort annotations into their global order and bucket them by the epochs
/// they intersect. `duration_s` bounds the recording; annotations may run
/// past the last whole epoch into a trailing partial one, but not past the
/// recording itself.
pub fn build_epoch_index(
    mut annotations: Vec<MicroAnnotation>,
    epochs: &[Epoch],
    duration_s: f64,
) -> Result<EpochAnnotationIndex, AlignmentError> {
    annotations.sort_by(|a, b| {
        a.start_s
            .total_cmp(&b.start_s)
            .then(a.kind.cmp(&b.kind))
            .then(a.channel.cmp(&b.channel))
            .then(a.end_s.total_cmp(&b.end_s))
    });

    for (id, a) in annotations.iter().enumerate() {
        let err = |reason: String| AlignmentError {
            id,
            kind: a.kind,
            start_s: a.start_s,
            end_s: a.end_s,
            reason,
        };
        if !a.start_s.is_finite() || !a.end_s.is_finite() {
            return Err(err("has non-finite bounds".to_owned()));
        }
        if a.start_s < 0.0 {
            return Err(err("starts before the recording".to_owned()));
        }
        if a.end_s < a.start_s {
            return Err(err("ends before it starts".to_owned()));
        }
        if a.end_s > duration_s + 1e-6 {
            return Err(err(format!("runs past the recording end at {duration_s} s")));
        }
    }

    let mut cells: Vec<[Vec<EpochItem>; KIND_COUNT]> =
        (0..epochs.len()).map(|_| Default::default()).collect();
    for (id, a) in annotations.iter().enumerate() {
        let first = (a.start_s / EPOCH_SECONDS).floor() as usize;
        let last = ((a.end_s / EPOCH_SECONDS).ceil() as usize).min(epochs.len());
        for (e, epoch) in epochs.iter().enumerate().take(last).skip(first.min(epochs.len())) {
            let start_s = a.start_s.max(epoch.start_s);
            let end_s = a.end_s.min(epoch.end_s);
            if start_s < end_s {
                cells[e][a.kind.idx()].push(EpochItem { id, start_s, end_s });
            }
        }
    }

    let coverage = cells
        .iter()
        .zip(epochs)
        .map(|(row, epoch)| {
            let len = epoch.end_s - epoch.start_s;
            let mut cov = [0.0f64; KIND_COUNT];
            for (k, items) in row.iter().enumerate() {
                if items.is_empty() {
                    continue;
                }
                let merged =
                    merge_intervals(items.iter().map(|it| (it.start_s, it.end_s)).collect());
                cov[k] = merged.iter().map(|(s, e)| e - s).sum::<f64>() / len;
            }
            cov
        })
        .collect();

    Ok(EpochAnnotationIndex { epochs: epochs.to_vec(), annotations, cells, coverage })
}

impl EpochAnnotationIndex {
    pub fn epoch_count(&self) -> usize {
        self.epochs.len()
    }

    pub fn epochs(&self) -> &[Epoch] {
        &self.epochs
    }

    pub fn epoch(&self, index: usize) -> Epoch {
        self.epochs[index]
    }

    /// All annotations in their global (id) order.
    pub fn annotations(&self) -> &[MicroAnnotation] {
        &self.annotations
    }

    /// Annotations of `kind` intersecting the epoch, clipped to it.
    pub fn items(&self, epoch: usize, kind: AnnotationKind) -> &[EpochItem] {
        &self.cells[epoch][kind.idx()]
    }

    pub fn has(&self, epoch: usize, kind: AnnotationKind) -> bool {
        !self.items(epoch, kind).is_empty()
    }

    pub fn ids(&self, epoch: usize, kind: AnnotationKind) -> Vec<usize> {
        self.items(epoch, kind).iter().map(|it| it.id).collect()
    }

    /// Fraction of the epoch covered by `kind` (union of intersections).
    pub fn coverage(&self, epoch: usize, kind: AnnotationKind) -> f64 {
        self.coverage[epoch][kind.idx()]
    }

    /// Fraction covered by the union over several kinds.
    pub fn union_coverage(&self, epoch: usize, kinds: &[AnnotationKind]) -> f64 {
        let mut iv = Vec::new();
        for &k in kinds {
            iv.extend(self.items(epoch, k).iter().map(|it| (it.start_s, it.end_s)));
        }
        if iv.is_empty() {
            return 0.0;
        }
        let ep = &self.epochs[epoch];
        merge_intervals(iv).iter().map(|(s, e)| e - s).sum::<f64>() / (ep.end_s - ep.start_s)
    }

    /// Ids of `kind` annotations whose original (unclipped) start falls in
    /// `[from_s, to_s)`, searched among those intersecting the epoch.
    pub fn ids_starting_in(
        &self,
        epoch: usize,
        kind: AnnotationKind,
        from_s: f64,
        to_s: f64,
    ) -> Vec<usize> {
        self.items(epoch, kind)
            .iter()
            .filter(|it| {
                let orig = self.annotations[it.id].start_s;
                orig >= from_s && orig < to_s
            })
            .map(|it| it.id)
            .collect()
    }
}
