//! Deterministic bar-chart renderer with exact ground truth.
//!
//! Text is drawn with the same bitmap font the built-in recogniser matches
//! against, so recognition errors on rendered charts come from geometry and
//! noise rather than from font mismatch.

mod corpus;
mod render;
mod spec;

pub use corpus::{
    corpus_stem, generate_corpus, sample_specs, tick_step_for, write_corpus, CorpusError,
    CorpusRanges, DEFAULT_CORPUS_SEED, PALETTE,
};
pub use render::{format_value, render, LARGE_TEXT, SMALL_TEXT};
pub use spec::{
    AxesGeometry, ChartFlags, ChartGenError, ChartSpec, GroundTruth, TruthBar, TruthText, TruthTick,
};
