//! Meaning of the detected pieces: text roles, the pixel-to-value mapping
//! of the y-axis, and the final [`ChartModel`].

mod model;
mod roles;
mod ticks;

pub use model::{
    assemble, interpret, value_from_height, value_from_label, BarGeometry, ChartBar, ChartModel,
    ValueSource,
};
pub use roles::{assign_title, classify_axis_text};
pub use ticks::{calibrate, parse_tick_value, parse_ticks, Calibration, Tick};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SemanticsError {
    #[error("calibration impossible: {0}")]
    CalibrationImpossible(String),
    #[error("y-axis ticks look logarithmic; only linear axes are supported")]
    LogarithmicAxis,
}

/// Geometric bands and tolerances used when reading a chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemanticsParams {
    /// Title candidates must sit in this top fraction of the panel.
    pub title_band: f64,
    /// Tick text lies within this multiple of the largest block size of the axis.
    pub tick_band: f64,
    /// Slack, in pixels, on the plot span when placing tick text.
    pub span_tol: u32,
    /// Largest gap in pixels between a value label and the bar top.
    pub label_gap: u32,
    /// A tick is suspect when its residual exceeds this fraction of the median step.
    pub suspect_fraction: f64,
    /// Try single 2/7 digit swaps on suspect ticks.
    pub repair_digits: bool,
}

impl Default for SemanticsParams {
    fn default() -> Self {
        Self {
            title_band: 0.2,
            tick_band: 1.5,
            span_tol: 3,
            label_gap: 15,
            suspect_fraction: 0.25,
            repair_digits: true,
        }
    }
}
