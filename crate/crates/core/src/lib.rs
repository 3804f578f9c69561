//! Deterministic, rule-based sleep staging over polysomnography recordings.
//!
//! The pipeline reads EDF recordings, extracts micro-annotations (alpha
//! rhythm, low-amplitude mixed-frequency activity, spindles, slow waves,
//! rapid eye movements, chin tone, blinks), and assigns one sleep stage per
//! 30 s epoch with a fully inspectable rule trace. Sibling crates add a
//! synthetic generator, an inter-scorer evaluation kit, and the CLI.
//!
//! The numeric core ([`dsp`], [`stats`]) is generic over the sample scalar
//! (see [`Scalar`]); the rest of the pipeline runs at the crate-wide
//! [`Sample`] precision.

pub mod annotate;
pub mod config;
pub mod dsp;
pub mod edf;
pub mod explain;
pub mod profile;
pub mod recording;
pub mod scalar;
pub mod stage;
pub mod stats;

pub use scalar::Scalar;

/// Concrete scalar the pipeline runs at.
pub type Sample = f64;

/// Length of one scoring epoch in seconds.
pub const EPOCH_SECONDS: f64 = 30.0;
