use crate::imgproc::LineSegment;
use crate::textscan::{font, TextRole};
use crate::{Point, Rect};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ChartFlags {
    pub value_labels: bool,
    pub gridlines: bool,
    /// Striped fill on every second series.
    pub hatching: bool,
}

/// Everything needed to draw one vertical bar chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    /// `values[category][series]`.
    pub values: Vec<Vec<f64>>,
    pub y_max: f64,
    pub tick_step: f64,
    /// Fill colour per series.
    pub colors: Vec<[u8; 3]>,
    pub flags: ChartFlags,
    /// Fraction of pixels inverted after drawing, in `[0, 0.05]`.
    pub noise: f64,
    pub canvas: (u32, u32),
    /// Shifts the whole drawing right and down; the chart keeps the rest
    /// of the canvas.
    #[serde(default)]
    pub offset: (u32, u32),
    pub seed: u64,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_tick_labels: Vec<String>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ChartGenError {
    #[error("invalid chart spec: {0}")]
    InvalidSpec(String),
    #[error("chart does not fit: {0}")]
    SpecInfeasible(String),
}

impl ChartSpec {
    pub fn series_count(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn tick_count(&self) -> u32 {
        (self.y_max / self.tick_step).round() as u32
    }

    /// Number of decimals used when printing values of this chart.
    pub fn value_decimals(&self) -> usize {
        if self.y_max >= 50.0 {
            0
        } else {
            1
        }
    }

    pub fn validate(&self) -> Result<(), ChartGenError> {
        let bad = |m: String| Err(ChartGenError::InvalidSpec(m));
        let series = self.series_count();
        if self.values.is_empty() || series == 0 {
            return bad("no values".into());
        }
        if self.values.iter().any(|c| c.len() != series) {
            return bad("categories have different series counts".into());
        }
        if !(self.y_max.is_finite() && self.y_max > 0.0) {
            return bad(format!("y_max {} must be positive", self.y_max));
        }
        if !(self.tick_step.is_finite() && self.tick_step > 0.0) {
            return bad(format!("tick_step {} must be positive", self.tick_step));
        }
        let ratio = self.y_max / self.tick_step;
        if (ratio - ratio.round()).abs() > 1e-9 || ratio.round() < 1.0 {
            return bad(format!(
                "tick_step {} does not divide y_max {}",
                self.tick_step, self.y_max
            ));
        }
        if let Some(v) = self
            .values
            .iter()
            .flatten()
            .find(|v| !(0.0..=self.y_max).contains(*v))
        {
            return bad(format!("value {v} outside [0, {}]", self.y_max));
        }
        if self.colors.len() < series {
            return bad(format!("{} colours for {series} series", self.colors.len()));
        }
        if !(0.0..=0.05).contains(&self.noise) {
            return bad(format!("noise {} outside [0, 0.05]", self.noise));
        }
        if self.x_tick_labels.len() != self.values.len() && !self.x_tick_labels.is_empty() {
            return bad("x tick label count differs from category count".into());
        }
        let strings = [&self.title, &self.x_label, &self.y_label]
            .into_iter()
            .chain(&self.x_tick_labels);
        for s in strings {
            if let Some(c) = s.chars().find(|&c| !font::supports(c)) {
                return bad(format!("character {c:?} in {s:?} has no glyph"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthBar {
    pub category: usize,
    pub series: usize,
    pub value: f64,
    /// Filled pixels; the baseline is `rect.bottom()`.
    pub rect: Rect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthText {
    pub role: TextRole,
    pub text: String,
    /// Tight box around the inked pixels.
    pub bbox: Rect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthTick {
    /// Row the tick value sits on.
    pub pixel: u32,
    pub value: f64,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxesGeometry {
    /// Top row of the x-axis stroke, leftmost to rightmost column.
    pub x_axis: LineSegment,
    /// Rightmost column of the y-axis stroke, top to bottom row.
    pub y_axis: LineSegment,
    pub origin: Point,
    /// Region strictly above the x-axis and right of the y-axis.
    pub plot_rect: Rect,
}

/// Exact record of what [`render`](super::render) drew.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub spec: ChartSpec,
    pub title: Option<String>,
    pub x_label: Option<String>,
    pub y_label: Option<String>,
    pub x_ticks: Vec<String>,
    pub y_ticks: Vec<TruthTick>,
    pub bars: Vec<TruthBar>,
    pub texts: Vec<TruthText>,
    pub axes: AxesGeometry,
}

impl GroundTruth {
    pub fn texts_with_role(&self, role: TextRole) -> impl Iterator<Item = &TruthText> {
        self.texts.iter().filter(move |t| t.role == role)
    }
}
