//! Fixtures shared by unit tests.

use crate::chartgen::{render, ChartFlags, ChartSpec, GroundTruth, PALETTE};
use crate::imgproc::{subtract_mask, to_grayscale, GrayImage, RgbImage};
use crate::textscan::build_text_mask;

pub(crate) fn simple_spec(values: Vec<Vec<f64>>) -> ChartSpec {
    let n = values.len();
    let series = values[0].len();
    ChartSpec {
        values,
        y_max: 100.0,
        tick_step: 20.0,
        colors: PALETTE[..series].to_vec(),
        flags: ChartFlags::default(),
        noise: 0.0,
        canvas: (800, 600),
        offset: (0, 0),
        seed: 7,
        title: "Results".into(),
        x_label: "Group".into(),
        y_label: "Value".into(),
        x_tick_labels: (0..n).map(|i| format!("G{}", i + 1)).collect(),
    }
}

/// Rendered chart with its text whitened using the recorded text boxes.
pub(crate) fn textless(spec: &ChartSpec) -> (RgbImage, GrayImage, GroundTruth) {
    let (rgb, truth) = render(spec).unwrap();
    let gray = to_grayscale(&rgb);
    let mask = build_text_mask(
        gray.width(),
        gray.height(),
        truth.texts.iter().map(|t| t.bbox),
    );
    let clean = subtract_mask(&gray, &mask).unwrap();
    (rgb, clean, truth)
}
