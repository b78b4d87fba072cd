//! End-to-end extraction for one page: panels, text, axes, bars, semantics.

use crate::config::Config;
use crate::disassembly::{
    bar_mask, crop_plot, detect_axes, detect_bars, group_bars, segment_panels, Axes, Bar,
};
use crate::imgproc::{
    despeckle, otsu_binarize, subtract_mask, to_grayscale, BinaryImage, GrayImage, RgbImage,
};
use crate::semantics::{interpret, ChartModel};
use crate::textscan::{
    build_text_mask, detect_text_candidates, group_glyphs, recognize, OcrEngine, OcrError,
    RecognizeOptions, TextBlock,
};
use crate::Rect;
use serde::Serialize;
use std::time::{Duration, Instant};

/// Name of the rule that decides whether a panel is a bar chart.
pub const GATE: &str = "structural";

/// Wall-clock time per stage, summed over panels.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StageTimings {
    /// Denoising and panel segmentation.
    pub panels_ms: f64,
    pub text_ms: f64,
    pub axes_ms: f64,
    pub bars_ms: f64,
    pub semantics_ms: f64,
}

impl StageTimings {
    pub fn total_ms(&self) -> f64 {
        self.panels_ms + self.text_ms + self.axes_ms + self.bars_ms + self.semantics_ms
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PanelStatus {
    Accepted,
    NoAxes,
    TooFewBars,
    Failed,
}

impl PanelStatus {
    /// Coarse outcome: extracted, gated out or failed.
    pub fn outcome(self) -> &'static str {
        match self {
            PanelStatus::Accepted => "extracted",
            PanelStatus::NoAxes | PanelStatus::TooFewBars => "gated_out",
            PanelStatus::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PanelOutcome {
    /// Panel box on the page.
    pub bbox: Rect,
    pub status: PanelStatus,
    pub bars: usize,
    pub score: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl PanelOutcome {
    fn new(bbox: Rect, status: PanelStatus, bars: usize, score: f64) -> Self {
        Self {
            bbox,
            status,
            bars,
            score,
            error: None,
        }
    }
}

/// Intermediate rasters kept for inspection.
#[derive(Debug, Clone)]
pub struct DebugImages {
    pub text_mask: BinaryImage,
    pub edge_map: BinaryImage,
    pub overlay: RgbImage,
}

#[derive(Debug, Clone)]
pub struct PageResult {
    /// One model per accepted panel, in reading order and page coordinates.
    pub charts: Vec<ChartModel>,
    pub panels: Vec<PanelOutcome>,
    pub timings: StageTimings,
    pub debug: Option<DebugImages>,
}

pub struct Extractor<'a> {
    pub config: &'a Config,
    pub ocr: &'a dyn OcrEngine,
    pub keep_debug: bool,
}

impl Extractor<'_> {
    /// Read all text of a panel and the mask of the recognised blocks.
    pub fn read_text(&self, panel: &GrayImage) -> Result<(Vec<TextBlock>, BinaryImage), OcrError> {
        let (bin, _) = otsu_binarize(panel);
        let groups = group_glyphs(&detect_text_candidates(&bin, &self.config.text));
        let (w, h) = panel.dimensions();
        let group_mask = build_text_mask(w, h, groups.iter().map(|g| g.bbox));
        let opts = RecognizeOptions {
            upscale: self.config.ocr_upscale,
            factor: self.config.ocr_factor,
            y_axis_x: None,
        };
        let blocks = recognize(panel, &group_mask, &groups, self.ocr, &opts)?;
        let mask = build_text_mask(w, h, blocks.iter().map(|b| b.bbox.expand(1, w, h)));
        Ok((blocks, mask))
    }

    pub fn run(&self, page: &RgbImage) -> PageResult {
        let p = &self.config.disassembly;
        let mut timings = StageTimings::default();
        let t = Instant::now();
        let denoised;
        let page = match self.config.denoise_tolerance {
            0 => page,
            tol => {
                denoised = despeckle(page, tol);
                &denoised
            }
        };
        let gray = to_grayscale(page);

        let panels = segment_panels(&gray, p);
        timings.panels_ms += ms(t.elapsed());

        let mut outcomes = Vec::new();
        let mut charts = Vec::new();
        let mut debug = self.keep_debug.then(|| DebugImages {
            text_mask: BinaryImage::new(gray.width(), gray.height()),
            edge_map: BinaryImage::new(gray.width(), gray.height()),
            overlay: page.clone(),
        });
        for panel in panels {
            let r = panel.bbox;
            let pg = gray.crop(r);
            let prgb = page.crop(r);

            let t = Instant::now();
            let (blocks, text_mask) = match self.read_text(&pg) {
                Ok(t) => t,
                Err(e) => {
                    timings.text_ms += ms(t.elapsed());
                    outcomes.push(PanelOutcome {
                        error: Some(e.to_string()),
                        ..PanelOutcome::new(r, PanelStatus::Failed, 0, 0.0)
                    });
                    continue;
                }
            };
            let clean = subtract_mask(&pg, &text_mask).expect("mask matches panel");
            let mut clean_rgb = prgb.clone();
            for y in 0..pg.height() {
                for x in 0..pg.width() {
                    if text_mask.get(x, y) {
                        clean_rgb.put(x, y, [255, 255, 255]);
                    }
                }
            }
            timings.text_ms += ms(t.elapsed());

            if let Some(d) = &mut debug {
                paste_binary(&mut d.text_mask, &text_mask, r);
                paste_binary(
                    &mut d.edge_map,
                    &crate::disassembly::axis_edge_map(&clean, p),
                    r,
                );
            }

            let t = Instant::now();
            let axes = detect_axes(&clean, p);
            timings.axes_ms += ms(t.elapsed());
            let Ok(axes) = axes else {
                outcomes.push(PanelOutcome::new(r, PanelStatus::NoAxes, 0, 0.0));
                continue;
            };

            let t = Instant::now();
            let (_, offset) = crop_plot(&clean, &axes);
            let mask = bar_mask(&clean_rgb.crop(axes.plot_rect), p);
            let bars = group_bars(&prgb, detect_bars(&mask, &axes, offset, p), p);
            timings.bars_ms += ms(t.elapsed());

            let score = (bars.len() as f64 / 4.0).min(1.0);
            if bars.len() < 2 {
                outcomes.push(PanelOutcome::new(
                    r,
                    PanelStatus::TooFewBars,
                    bars.len(),
                    score,
                ));
                continue;
            }
            outcomes.push(PanelOutcome::new(
                r,
                PanelStatus::Accepted,
                bars.len(),
                score,
            ));

            let t = Instant::now();
            let mut model = interpret(
                blocks,
                pg.dimensions(),
                &axes,
                &bars,
                &self.config.semantics,
            );
            model.translate(r.x, r.y);
            timings.semantics_ms += ms(t.elapsed());
            if let Some(d) = &mut debug {
                draw_overlay(&mut d.overlay, &axes, &bars, &model, r);
            }
            charts.push(model);
        }
        PageResult {
            charts,
            panels: outcomes,
            timings,
            debug,
        }
    }
}

fn paste_binary(dst: &mut BinaryImage, src: &BinaryImage, at: Rect) {
    for y in 0..src.height() {
        for x in 0..src.width() {
            if src.get(x, y) {
                dst.set(at.x + x, at.y + y, true);
            }
        }
    }
}

fn stroke(img: &mut RgbImage, r: Rect, color: [u8; 3]) {
    let (w, h) = (img.width(), img.height());
    let (x1, y1) = (
        (r.x + r.w).min(w).saturating_sub(1),
        (r.y + r.h).min(h).saturating_sub(1),
    );
    for x in r.x.min(w - 1)..=x1 {
        img.put(x, r.y.min(h - 1), color);
        img.put(x, y1, color);
    }
    for y in r.y.min(h - 1)..=y1 {
        img.put(r.x.min(w - 1), y, color);
        img.put(x1, y, color);
    }
}

fn draw_overlay(img: &mut RgbImage, axes: &Axes, bars: &[Bar], model: &ChartModel, panel: Rect) {
    let shift = |r: Rect| Rect::new(r.x + panel.x, r.y + panel.y, r.w, r.h);
    stroke(img, shift(axes.plot_rect), [0, 160, 255]);
    for b in bars {
        stroke(
            img,
            shift(Rect::new(
                b.x_left,
                b.y_top,
                b.x_right + 1 - b.x_left,
                b.height.max(1),
            )),
            [255, 0, 0],
        );
    }
    for b in &model.blocks {
        stroke(img, b.bbox, [0, 200, 0]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chartgen::render;
    use crate::semantics::ValueSource;
    use crate::testutil::simple_spec;
    use crate::textscan::BuiltinOcr;

    #[test]
    fn reads_a_labelled_chart() {
        let mut spec = simple_spec(vec![vec![30.0, 45.0], vec![70.0, 20.0], vec![50.0, 90.0]]);
        spec.flags.value_labels = true;
        let (img, truth) = render(&spec).unwrap();
        let cfg = Config::default();
        let ex = Extractor {
            config: &cfg,
            ocr: &BuiltinOcr,
            keep_debug: true,
        };
        let res = ex.run(&img);
        assert_eq!(res.charts.len(), 1);
        let chart = &res.charts[0];
        assert_eq!(chart.title.as_deref(), Some("Results"));
        assert_eq!(chart.x_label.as_deref(), Some("Group"));
        assert_eq!(chart.y_label.as_deref(), Some("Value"));
        assert_eq!(chart.x_ticks, vec!["G1", "G2", "G3"]);
        assert_eq!(chart.bars.len(), truth.bars.len());
        for (b, t) in chart.bars.iter().zip(&truth.bars) {
            assert_eq!((b.category, b.group), (t.category, t.series));
            assert_eq!(b.value, Some(t.value));
            assert_eq!(b.value_source, ValueSource::Label);
        }
        assert_eq!(res.panels.len(), 1);
        assert!(res.debug.unwrap().text_mask.count_ones() > 0);
    }

    struct Broken;
    impl OcrEngine for Broken {
        fn read(&self, _: &GrayImage) -> Result<Vec<crate::textscan::Reading>, OcrError> {
            Err(OcrError::Stage("offline".into()))
        }
    }

    #[test]
    fn ocr_failure_marks_the_panel() {
        let (img, _) = render(&simple_spec(vec![vec![30.0], vec![60.0]])).unwrap();
        let cfg = Config::default();
        let res = Extractor {
            config: &cfg,
            ocr: &Broken,
            keep_debug: false,
        }
        .run(&img);
        assert!(res.charts.is_empty());
        assert_eq!(res.panels.len(), 1);
        assert_eq!(res.panels[0].status.outcome(), "failed");
        assert!(res.panels[0].error.as_deref().unwrap().contains("offline"));
    }

    #[test]
    fn blank_page_gives_nothing() {
        let cfg = Config::default();
        let ex = Extractor {
            config: &cfg,
            ocr: &BuiltinOcr,
            keep_debug: false,
        };
        let res = ex.run(&RgbImage::from_gray(&GrayImage::filled(200, 150, 255)));
        assert!(res.charts.is_empty() && res.panels.is_empty());
    }
}
