//! Agreement between extracted charts and ground truth: per-class accuracy
//! in the layout of the usual extraction-accuracy table, and Bland-Altman
//! statistics for bar values.

mod matching;
mod report;
mod stats;

pub use matching::{match_chart, MatchedPair, Matching, Measure, ObjectClass, TEXT_MATCH_RADIUS};
pub use report::{bland_altman_csv, emit_report, render_table, EvalReport};
pub use stats::{
    accuracy, bland_altman, bland_altman_points, limits_of_agreement, relative_error,
    AccuracyReport, BlandAltman, ClassScore, SdEstimator, DEFAULT_LOA_Z, RELATIVE_EPSILON,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("need at least two pairs, got {0}")]
    InsufficientData(usize),
}
