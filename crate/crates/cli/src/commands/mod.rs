pub mod evaluate;
pub mod explain;
pub mod render;
pub mod score;
pub mod synth;
