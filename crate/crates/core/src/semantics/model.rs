use super::ticks::{calibrate, parse_tick_value, parse_ticks, Calibration, Tick};
use super::{assign_title, classify_axis_text, SemanticsError, SemanticsParams};
use crate::disassembly::{Axes, Bar};
use crate::textscan::{TextBlock, TextRole};
use crate::Rect;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueSource {
    /// Read from the number printed above the bar.
    Label,
    /// Measured from the bar height through the y-axis calibration.
    Calibrated,
    /// Neither route worked.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BarGeometry {
    pub x_left: u32,
    pub x_right: u32,
    pub y_top: u32,
    pub baseline_y: u32,
    pub height: u32,
}

impl From<&Bar> for BarGeometry {
    fn from(b: &Bar) -> Self {
        Self {
            x_left: b.x_left,
            x_right: b.x_right,
            y_top: b.y_top,
            baseline_y: b.baseline_y,
            height: b.height,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartBar {
    pub category: usize,
    pub group: usize,
    pub value: Option<f64>,
    pub value_source: ValueSource,
    pub geometry: BarGeometry,
}

/// Everything read from one chart panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartModel {
    pub title: Option<String>,
    pub x_label: Option<String>,
    pub y_label: Option<String>,
    /// Category names, left to right.
    pub x_ticks: Vec<String>,
    pub y_ticks: Vec<Tick>,
    pub bars: Vec<ChartBar>,
    /// Every recognised text block with its role.
    pub blocks: Vec<TextBlock>,
    pub calibration: Option<Calibration>,
    pub warnings: Vec<String>,
}

impl ChartModel {
    /// Move all pixel coordinates by `(dx, dy)`, e.g. from panel to page.
    pub fn translate(&mut self, dx: u32, dy: u32) {
        for t in &mut self.y_ticks {
            t.pixel += dy as f64;
        }
        for b in &mut self.bars {
            let g = &mut b.geometry;
            g.x_left += dx;
            g.x_right += dx;
            g.y_top += dy;
            g.baseline_y += dy;
        }
        for b in &mut self.blocks {
            b.bbox = Rect::new(b.bbox.x + dx, b.bbox.y + dy, b.bbox.w, b.bbox.h);
        }
        if let Some(c) = &mut self.calibration {
            c.baseline_y += dy as f64;
        }
    }
}

/// Number printed directly above `bar`: a value-label block whose centre
/// column falls within the bar and whose bottom is at most `label_gap`
/// pixels above the bar top. The closest such block wins.
pub fn value_from_label(bar: &Bar, blocks: &[TextBlock], params: &SemanticsParams) -> Option<f64> {
    blocks
        .iter()
        .filter(|b| b.role == TextRole::BarValue)
        .filter_map(|b| {
            let cx = b.bbox.center().0;
            if cx < bar.x_left as f64 || cx > bar.x_right as f64 {
                return None;
            }
            let bottom = b.bbox.bottom() as i64;
            let gap = bar.y_top as i64 - bottom;
            if !(0..=params.label_gap as i64).contains(&gap) {
                return None;
            }
            parse_tick_value(&b.text).map(|v| (gap, v))
        })
        .min_by_key(|&(gap, _)| gap)
        .map(|(_, v)| v)
}

pub fn value_from_height(bar: &Bar, cal: &Calibration) -> f64 {
    cal.intercept + cal.slope * (bar.y_top as f64 - bar.baseline_y as f64)
}

/// Build the model from role-tagged blocks, grouped bars and the outcome of
/// tick parsing and calibration. Bars take the category of the nearest x
/// tick; with no x ticks the k-th bar of each group is category k.
pub fn assemble(
    blocks: Vec<TextBlock>,
    bars: &[Bar],
    ticks: Result<Vec<Tick>, SemanticsError>,
    calibration: Result<Calibration, SemanticsError>,
    params: &SemanticsParams,
) -> ChartModel {
    let mut warnings = Vec::new();

    let mut blocks = blocks;
    if let Ok(ticks) = &ticks {
        // keep block text in step with repaired tick readings
        for t in ticks.iter().filter(|t| t.repaired) {
            if let Some(b) = blocks
                .iter_mut()
                .find(|b| b.role == TextRole::YTick && b.bbox.center().1 == t.pixel)
            {
                b.text = t.source_text.clone();
            }
        }
    }
    let first = |role: TextRole| {
        blocks
            .iter()
            .find(|b| b.role == role)
            .map(|b| b.text.clone())
    };
    let mut x_tick_blocks: Vec<&TextBlock> = blocks
        .iter()
        .filter(|b| b.role == TextRole::XTick)
        .collect();
    x_tick_blocks.sort_by(|a, b| a.bbox.center().0.total_cmp(&b.bbox.center().0));
    let tick_centers: Vec<f64> = x_tick_blocks.iter().map(|b| b.bbox.center().0).collect();

    let y_ticks = ticks.unwrap_or_else(|e| {
        warnings.push(e.to_string());
        Vec::new()
    });
    let calibration = match calibration {
        Ok(c) => Some(c),
        Err(e) => {
            if !warnings.contains(&e.to_string()) {
                warnings.push(e.to_string());
            }
            None
        }
    };
    for t in y_ticks.iter().filter(|t| t.suspect) {
        let note = if t.repaired { "repaired" } else { "ignored" };
        warnings.push(format!(
            "y tick {:?} at row {:.1} {note}",
            t.source_text, t.pixel
        ));
    }

    let mut seen_per_group: Vec<usize> = Vec::new();
    let mut out_bars = Vec::with_capacity(bars.len());
    for bar in bars {
        let category = if tick_centers.is_empty() {
            if seen_per_group.len() <= bar.group_id {
                seen_per_group.resize(bar.group_id + 1, 0);
            }
            seen_per_group[bar.group_id] += 1;
            seen_per_group[bar.group_id] - 1
        } else {
            let cx = bar.center_x();
            (0..tick_centers.len())
                .min_by(|&a, &b| {
                    (tick_centers[a] - cx)
                        .abs()
                        .total_cmp(&(tick_centers[b] - cx).abs())
                })
                .unwrap_or(0)
        };
        let (value, value_source) = match value_from_label(bar, &blocks, params) {
            Some(v) => (Some(v), ValueSource::Label),
            None => match &calibration {
                Some(c) => (Some(value_from_height(bar, c)), ValueSource::Calibrated),
                None => (None, ValueSource::None),
            },
        };
        out_bars.push(ChartBar {
            category,
            group: bar.group_id,
            value,
            value_source,
            geometry: bar.into(),
        });
    }
    let valueless = out_bars.iter().filter(|b| b.value.is_none()).count();
    if valueless > 0 {
        warnings.push(format!("{valueless} bar(s) without a value"));
    }

    ChartModel {
        title: first(TextRole::Title),
        x_label: first(TextRole::XLabel),
        y_label: first(TextRole::YLabel),
        x_ticks: x_tick_blocks.iter().map(|b| b.text.clone()).collect(),
        y_ticks,
        bars: out_bars,
        blocks,
        calibration,
        warnings,
    }
}

/// Run role assignment, tick parsing, calibration and assembly for one panel.
pub fn interpret(
    mut blocks: Vec<TextBlock>,
    panel_dims: (u32, u32),
    axes: &Axes,
    bars: &[Bar],
    params: &SemanticsParams,
) -> ChartModel {
    assign_title(&mut blocks, panel_dims, Some(axes.plot_rect), params);
    classify_axis_text(&mut blocks, axes, params);
    let ticks = parse_ticks(&blocks, params);
    let calibration = match &ticks {
        Ok(t) => calibrate(t, axes.origin.y as f64),
        Err(e) => Err(e.clone()),
    };
    assemble(blocks, bars, ticks, calibration, params)
}
