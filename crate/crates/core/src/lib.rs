//! Parsing of raster bar charts into structured data.
//!
//! The crate is organised along the extraction pipeline:
//!
//! * [`imgproc`]: raster primitives (thresholding, filtering, morphology,
//!   labelling, contours, edges, line detection, resampling).
//! * [`textscan`]: text-region detection, glyph grouping and OCR.
//! * [`disassembly`]: panel segmentation, axis detection and bar extraction.
//! * [`semantics`]: text roles, tick calibration and the final [`semantics::ChartModel`].
//! * [`chartgen`]: a deterministic bar-chart renderer that emits exact ground truth.
//! * [`evalstats`]: accuracy classes and Bland-Altman agreement between
//!   extracted charts and ground truth.
//!
//! [`pipeline`] ties the stages together for one panel; [`config`] holds every
//! tunable as a flat key/value document.

pub mod canonical;
pub mod chartgen;
pub mod config;
pub mod disassembly;
pub mod evalstats;
pub mod geometry;
pub mod imgproc;
pub mod pipeline;
pub mod rasterio;
pub mod semantics;
pub mod textscan;

#[cfg(test)]
mod testutil;

pub use config::Config;
pub use geometry::{Point, Rect};
pub use imgproc::{BinaryImage, GrayImage, RgbImage};
