use super::render::{plan, render, value_labels_fit};
use super::spec::*;
use crate::imgproc::RgbImage;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const DEFAULT_CORPUS_SEED: u64 = 20_240_601;

pub const PALETTE: [[u8; 3]; 6] = [
    [31, 119, 180],
    [255, 127, 14],
    [44, 160, 44],
    [214, 39, 40],
    [148, 103, 189],
    [140, 86, 75],
];

const TITLES: &[&str] = &[
    "Revenue",
    "Outcomes",
    "Results",
    "Response",
    "Baseline",
    "Efficacy",
    "Survey",
    "Growth",
    "Accuracy",
    "Latency",
    "Yield",
    "Scores",
    "Enrollment",
    "Adherence",
    "Throughput",
    "Visits",
    "Sales",
    "Dropout",
];
const X_LABELS: &[&str] = &[
    "Group", "Month", "Quarter", "Region", "Arm", "Week", "Cohort", "Site", "Trial",
];
const Y_LABELS: &[&str] = &[
    "Value",
    "Count",
    "Letters",
    "Percent",
    "Rate%",
    "Dose(mg)",
    "Score",
    "Units",
    "Change",
    "Visits/wk",
    "Total",
];
const TICK_SCHEMES: &[&str] = &["", "Q", "M", "G", "T", "W", "#"];

/// Sampling ranges for [`generate_corpus`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusRanges {
    /// Inclusive range of the total bar count.
    pub bars: (usize, usize),
    pub series: (usize, usize),
    pub y_max: Vec<f64>,
    pub noise: Vec<f64>,
    /// Probability that each optional flag is set.
    pub flag_probability: f64,
    pub canvas: (u32, u32),
}

impl Default for CorpusRanges {
    fn default() -> Self {
        Self {
            bars: (2, 12),
            series: (1, 3),
            y_max: vec![10.0, 50.0, 100.0, 200.0, 1000.0],
            noise: vec![0.0, 0.01, 0.02],
            flag_probability: 0.5,
            canvas: (800, 600),
        }
    }
}

/// Tick spacing used for a given axis maximum (five intervals).
pub fn tick_step_for(y_max: f64) -> f64 {
    y_max / 5.0
}

fn tick_labels(rng: &mut ChaCha8Rng, n: usize) -> Vec<String> {
    match *TICK_SCHEMES.choose(rng).unwrap() {
        "" => (0..n)
            .map(|i| ((b'A' + i as u8) as char).to_string())
            .collect(),
        "#" => (1..=n).map(|i| i.to_string()).collect(),
        p => (1..=n).map(|i| format!("{p}{i}")).collect(),
    }
}

fn sample_spec(rng: &mut ChaCha8Rng, r: &CorpusRanges) -> ChartSpec {
    let series = rng.gen_range(r.series.0..=r.series.1);
    let lo = r.bars.0.div_ceil(series).max(1);
    let hi = (r.bars.1 / series).max(lo);
    let cats = rng.gen_range(lo..=hi);
    let y_max = *r.y_max.choose(rng).unwrap();
    let decimals = if y_max >= 50.0 { 0 } else { 1 };
    let scale = 10f64.powi(decimals);
    let values = (0..cats)
        .map(|_| {
            (0..series)
                .map(|_| (rng.gen_range(0.05..=0.95) * y_max * scale).round() / scale)
                .collect()
        })
        .collect();
    let mut colors = PALETTE.to_vec();
    colors.shuffle(rng);
    colors.truncate(series);
    let mut flag = || rng.gen_bool(r.flag_probability);
    let flags = ChartFlags {
        value_labels: flag(),
        gridlines: flag(),
        hatching: flag(),
    };
    ChartSpec {
        values,
        y_max,
        tick_step: tick_step_for(y_max),
        colors,
        flags,
        noise: *r.noise.choose(rng).unwrap(),
        canvas: r.canvas,
        offset: (0, 0),
        seed: rng.gen(),
        title: TITLES.choose(rng).unwrap().to_string(),
        x_label: X_LABELS.choose(rng).unwrap().to_string(),
        y_label: Y_LABELS.choose(rng).unwrap().to_string(),
        x_tick_labels: tick_labels(rng, cats),
    }
}

/// Sample `n` feasible specs; value labels are switched off for charts whose
/// bars are too narrow to carry them.
pub fn sample_specs(n: usize, seed: u64, ranges: &CorpusRanges) -> Vec<ChartSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let mut spec = sample_spec(&mut rng, ranges);
        if spec.flags.value_labels {
            spec.flags.value_labels = false;
            if let Ok(l) = plan(&spec) {
                spec.flags.value_labels = value_labels_fit(&spec, &l).is_ok();
            }
        }
        if plan(&spec).is_ok() {
            out.push(spec);
        }
    }
    out
}

pub fn generate_corpus(n: usize, seed: u64, ranges: &CorpusRanges) -> Vec<(RgbImage, GroundTruth)> {
    sample_specs(n, seed, ranges)
        .iter()
        .map(|s| render(s).expect("sampled specs are feasible"))
        .collect()
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Raster(#[from] crate::rasterio::RasterIoError),
}

/// File stem of the `index`-th corpus item.
pub fn corpus_stem(index: usize) -> String {
    format!("{index:04}")
}

/// Render and write `NNNN.png` / `NNNN.truth.json` pairs; returns the stems.
pub fn write_corpus(
    dir: &Path,
    n: usize,
    seed: u64,
    ranges: &CorpusRanges,
) -> Result<Vec<String>, CorpusError> {
    std::fs::create_dir_all(dir).map_err(|source| CorpusError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut stems = Vec::with_capacity(n);
    for (i, spec) in sample_specs(n, seed, ranges).iter().enumerate() {
        let (img, truth) = render(spec).expect("sampled specs are feasible");
        let stem = corpus_stem(i);
        crate::rasterio::save_rgb(&img, &dir.join(format!("{stem}.png")))?;
        let path = dir.join(format!("{stem}.truth.json"));
        let json = serde_json::to_string_pretty(&truth).expect("truth serialises");
        std::fs::write(&path, json + "\n").map_err(|source| CorpusError::Io { path, source })?;
        stems.push(stem);
    }
    Ok(stems)
}
