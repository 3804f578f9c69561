//! Synthetic polysomnography with known ground truth.
//!
//! A [`NightRecipe`] describes a night as staged segments with planted
//! events over a pink-noise background; [`synthesize`] renders it into a
//! six-channel [`Recording`](noctua_core::recording::Recording) plus the
//! [`GroundTruth`] of every planted event. The same seed always yields the
//! same samples, byte for byte.

mod noise;
mod recipe;
mod synth;
mod templates;

pub use recipe::{
    demo_recipe, BackgroundSpec, EmgLevel, EventKind, EventSpec, NightRecipe, RecipeError,
    SegmentSpec,
};
pub use synth::{synthesize, GroundTruth};
pub use templates::{blink_count, slow_wave_span, REM_FALL_RATIO};

pub use noctua_core::edf::{write_edf, EdfWriteError};
