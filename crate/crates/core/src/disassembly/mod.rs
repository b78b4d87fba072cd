//! Geometric decomposition of chart panels: panel segmentation, axis
//! detection, plot cropping, bar extraction and bar grouping.

mod axes;
mod bars;
mod panels;

pub use axes::{axis_edge_map, crop_plot, detect_axes, Axes};
pub use bars::{
    bar_mask, detect_bars, group_bars, vertical_edges, Bar, BarSignature, EdgeSide, VerticalEdge,
};
pub use panels::{segment_panels, PanelBox};

use crate::imgproc::{GrayImage, RgbImage};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DisassemblyError {
    #[error("no pair of perpendicular lines forms the chart axes")]
    NoAxes,
}

/// Tunables for panel segmentation, axis detection and bar extraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisassemblyParams {
    /// Foreground dilation radius used to join the parts of one panel.
    pub panel_dilation: u32,
    /// Minimum panel box area as a fraction of the page.
    pub panel_min_fraction: f64,
    /// Panels overlapping by more than this fraction of the smaller box merge.
    pub panel_merge_overlap: f64,
    /// Small components within this many pixels of a panel join it.
    pub panel_attach_gap: u32,
    /// Connected pieces smaller than this are treated as noise.
    pub speck_area: u64,
    pub blur_kernel: u32,
    /// Adaptive-threshold window; 0 picks an eighth of the image width.
    pub adaptive_window: u32,
    pub adaptive_t_pct: u32,
    pub hough_votes: u32,
    /// Shortest Hough segment as a fraction of the smaller panel side.
    pub hough_min_len_fraction: f64,
    pub hough_max_gap: u32,
    pub axis_angle_tol_deg: f64,
    pub axis_endpoint_tol: u32,
    /// Gray level below which a pixel counts as axis ink when snapping.
    pub axis_dark_level: u8,
    /// Largest per-channel difference from the plot background that still
    /// counts as background when masking bars.
    pub bar_contrast: u8,
    pub open_kernel: u32,
    pub close_kernel: u32,
    pub corner_epsilon: f64,
    pub edge_dx_tol: u32,
    pub bar_top_tol: u32,
    pub baseline_tol: u32,
    pub group_color_dist: f64,
    pub group_template_corr: f64,
}

impl Default for DisassemblyParams {
    fn default() -> Self {
        Self {
            panel_dilation: 10,
            panel_min_fraction: 0.05,
            panel_merge_overlap: 0.2,
            panel_attach_gap: 50,
            speck_area: 4,
            blur_kernel: 5,
            adaptive_window: 0,
            adaptive_t_pct: 15,
            hough_votes: 50,
            hough_min_len_fraction: 0.3,
            hough_max_gap: 5,
            axis_angle_tol_deg: 2.0,
            axis_endpoint_tol: 10,
            axis_dark_level: 60,
            bar_contrast: 40,
            open_kernel: 5,
            close_kernel: 3,
            corner_epsilon: 2.0,
            edge_dx_tol: 1,
            bar_top_tol: 2,
            baseline_tol: 3,
            group_color_dist: 20.0,
            group_template_corr: 0.8,
        }
    }
}

/// Structural stand-in for a chart-type classifier: a panel is a bar chart
/// when it has axes and at least two bars. The score is `min(1, bars / 4)`.
pub fn gate_bar_chart(panel: &GrayImage, params: &DisassemblyParams) -> (bool, f64) {
    let Ok(axes) = detect_axes(panel, params) else {
        return (false, 0.0);
    };
    let (_, offset) = crop_plot(panel, &axes);
    let plot = RgbImage::from_gray(&panel.crop(axes.plot_rect));
    let mask = bar_mask(&plot, params);
    let bars = detect_bars(&mask, &axes, offset, params);
    let n = bars.len();
    (n >= 2, (n as f64 / 4.0).min(1.0))
}

#[cfg(test)]
mod tests;
