use super::spec::*;
use crate::imgproc::{luma, LineSegment, RgbImage};
use crate::textscan::{font, TextRole};
use crate::{Point, Rect};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Scale of title, axis labels and y tick labels.
pub const LARGE_TEXT: u32 = 3;
/// Scale of x tick labels and value labels.
pub const SMALL_TEXT: u32 = 2;

const MARGIN: u32 = 10;
const TEXT_GAP: u32 = 18;
const TICK_LEN: u32 = 5;
const TICK_TEXT_GAP: u32 = 4;
const X_TICK_TEXT_TOP: u32 = 10;
const VALUE_LABEL_GAP: u32 = 5;
const PLOT_TOP_MIN: u32 = 60;
const RIGHT_MARGIN: u32 = 20;
const BAR_GAP: u32 = 4;
const MIN_BAR_W: u32 = 8;
const GRID: [u8; 3] = [225, 225, 225];
const INK: [u8; 3] = [0, 0, 0];
const HATCH_PERIOD: u32 = 6;
const HATCH_WIDTH: u32 = 2;

/// Pixel plan of a chart in canvas coordinates.
#[derive(Debug, Clone)]
pub(crate) struct Layout {
    /// Rightmost column of the y-axis stroke.
    pub ax: u32,
    /// Top row of the x-axis stroke (the zero line).
    pub ay: u32,
    /// Row of the top tick.
    pub top: u32,
    /// One past the last x-axis column.
    pub right: u32,
    pub plot_h: u32,
    pub slot: u32,
    pub bar_w: u32,
    pub tick_labels: Vec<String>,
    ox: u32,
    oy: u32,
    cw: u32,
}

impl Layout {
    pub fn tick_row(&self, i: u32, ticks: u32) -> u32 {
        self.ay - i * self.plot_h / ticks
    }

    pub fn bar_left(&self, category: usize, series: usize, series_count: usize) -> u32 {
        let s = series_count as u32;
        let group = self.bar_w * s + BAR_GAP * (s - 1);
        self.ax
            + 1
            + category as u32 * self.slot
            + (self.slot - group) / 2
            + series as u32 * (self.bar_w + BAR_GAP)
    }

    pub fn bar_height(&self, value: f64, y_max: f64) -> u32 {
        (value / y_max * self.plot_h as f64 + 0.5).floor() as u32
    }
}

pub fn format_value(v: f64, decimals: usize) -> String {
    format!("{v:.decimals$}")
}

fn tick_decimals(step: f64) -> usize {
    (0..4)
        .find(|&d| {
            let s = step * 10f64.powi(d as i32);
            (s - s.round()).abs() < 1e-9
        })
        .unwrap_or(4)
}

pub(crate) fn plan(spec: &ChartSpec) -> Result<Layout, ChartGenError> {
    spec.validate()?;
    let infeasible = |m: String| Err(ChartGenError::SpecInfeasible(m));
    let (ox, oy) = spec.offset;
    if spec.canvas.0 <= ox + 200 || spec.canvas.1 <= oy + 200 {
        return infeasible(format!(
            "canvas {:?} too small for offset {:?}",
            spec.canvas, spec.offset
        ));
    }
    let (cw, ch) = (spec.canvas.0 - ox, spec.canvas.1 - oy);
    let ticks = spec.tick_count();
    let dec = tick_decimals(spec.tick_step);
    let tick_labels: Vec<String> = (0..=ticks)
        .map(|i| format_value(i as f64 * spec.tick_step, dec))
        .collect();
    let widest = tick_labels
        .iter()
        .map(|t| font::text_width(t, LARGE_TEXT))
        .max()
        .unwrap_or(0);
    let tick_left = if spec.y_label.is_empty() {
        MARGIN
    } else {
        MARGIN + font::text_height(LARGE_TEXT) + TEXT_GAP
    };
    let ax = tick_left + widest + TICK_LEN + TICK_TEXT_GAP + 1;
    let right = cw - RIGHT_MARGIN;
    let small_h = font::text_height(SMALL_TEXT);
    let large_h = font::text_height(LARGE_TEXT);
    let ay = ch - MARGIN - large_h - TEXT_GAP - small_h - X_TICK_TEXT_TOP;
    if ay <= PLOT_TOP_MIN || right <= ax + 50 {
        return infeasible("no room for the plot area".into());
    }
    // a multiple of ten tick intervals keeps tick rows and round values on whole pixels
    let avail = ay - PLOT_TOP_MIN;
    let plot_h = if avail >= 10 * ticks * 5 {
        avail / (10 * ticks) * 10 * ticks
    } else {
        avail / ticks * ticks
    };
    if plot_h < 50 {
        return infeasible(format!(
            "plot height {plot_h} px too small for {ticks} ticks"
        ));
    }
    let plot_w = right - ax - 1;
    let cats = spec.values.len() as u32;
    let series = spec.series_count() as u32;
    let slot = plot_w / cats;
    let bar_w = (slot * 7 / 10).saturating_sub(BAR_GAP * (series - 1)) / series;
    if bar_w < MIN_BAR_W {
        return infeasible(format!("bars would be {bar_w} px wide"));
    }
    let layout = Layout {
        ax,
        ay,
        top: ay - plot_h,
        right,
        plot_h,
        slot,
        bar_w,
        tick_labels,
        ox,
        oy,
        cw,
    };

    if font::text_width(&spec.title, LARGE_TEXT) + 2 * MARGIN > cw {
        return infeasible(format!("title {:?} wider than canvas", spec.title));
    }
    if font::text_width(&spec.x_label, LARGE_TEXT) > plot_w {
        return infeasible(format!("x label {:?} wider than plot", spec.x_label));
    }
    if font::text_width(&spec.y_label, LARGE_TEXT) > ay + 2 - MARGIN {
        return infeasible(format!("y label {:?} taller than canvas", spec.y_label));
    }
    if let Some(l) = spec
        .x_tick_labels
        .iter()
        .find(|l| font::text_width(l, SMALL_TEXT) + TEXT_GAP > slot)
    {
        return infeasible(format!("x tick label {l:?} wider than its slot"));
    }
    if spec.flags.value_labels {
        value_labels_fit(spec, &layout)?;
    }
    Ok(layout)
}

fn title_bottom(spec: &ChartSpec) -> u32 {
    if spec.title.is_empty() {
        0
    } else {
        MARGIN + font::text_height(LARGE_TEXT)
    }
}

pub(crate) fn value_labels_fit(spec: &ChartSpec, layout: &Layout) -> Result<(), ChartGenError> {
    let dec = spec.value_decimals();
    for v in spec.values.iter().flatten() {
        let w = font::text_width(&format_value(*v, dec), SMALL_TEXT);
        if w + 12 > layout.bar_w {
            return Err(ChartGenError::SpecInfeasible(format!(
                "value label for {v} wider than its bar"
            )));
        }
        let bar_top = layout.ay - layout.bar_height(*v, spec.y_max);
        let label_top = bar_top as i64 - (VALUE_LABEL_GAP + font::text_height(SMALL_TEXT)) as i64;
        if label_top < (title_bottom(spec) + TEXT_GAP) as i64 {
            return Err(ChartGenError::SpecInfeasible(format!(
                "value label for {v} collides with the title"
            )));
        }
    }
    Ok(())
}

struct Canvas<'a> {
    img: &'a mut RgbImage,
    ox: u32,
    oy: u32,
}

impl Canvas<'_> {
    fn put(&mut self, x: u32, y: u32, c: [u8; 3]) {
        self.img.put(x + self.ox, y + self.oy, c);
    }

    fn fill(&mut self, x: u32, y: u32, w: u32, h: u32, c: [u8; 3]) {
        for yy in y..y + h {
            for xx in x..x + w {
                self.put(xx, yy, c);
            }
        }
    }

    /// Draw `text` with its cell origin at `(x, y)`; returns the ink box in
    /// canvas coordinates.
    fn text(&mut self, text: &str, scale: u32, x: u32, y: u32) -> Option<Rect> {
        let mut ink: Option<Rect> = None;
        font::rasterize(text, scale, |dx, dy| {
            self.put(x + dx, y + dy, INK);
            let p = Rect::new(x + dx + self.ox, y + dy + self.oy, 1, 1);
            ink = Some(ink.map_or(p, |r| r.union(&p)));
        });
        ink
    }

    /// Draw `text` turned a quarter counter-clockwise, reading bottom to
    /// top, with the rotated box's top-left at `(x, y)`.
    fn text_ccw(&mut self, text: &str, scale: u32, x: u32, y: u32) -> Option<Rect> {
        let w = font::text_width(text, scale);
        let mut ink: Option<Rect> = None;
        font::rasterize(text, scale, |dx, dy| {
            let (rx, ry) = (x + dy, y + w - 1 - dx);
            self.put(rx, ry, INK);
            let p = Rect::new(rx + self.ox, ry + self.oy, 1, 1);
            ink = Some(ink.map_or(p, |r| r.union(&p)));
        });
        ink
    }
}

fn hatch(c: [u8; 3]) -> [u8; 3] {
    c.map(|v| (v as u32 * 45 / 100) as u8)
}

/// Draw `spec` and record exactly what was drawn.
pub fn render(spec: &ChartSpec) -> Result<(RgbImage, GroundTruth), ChartGenError> {
    let l = plan(spec)?;
    let mut img = RgbImage::new(spec.canvas.0, spec.canvas.1);
    let mut cv = Canvas {
        img: &mut img,
        ox: l.ox,
        oy: l.oy,
    };
    let (ox, oy) = (l.ox, l.oy);
    let ticks = spec.tick_count();
    let series = spec.series_count();
    let mut texts = Vec::new();

    if spec.flags.gridlines {
        for i in 1..=ticks {
            cv.fill(l.ax + 1, l.tick_row(i, ticks), l.right - l.ax - 1, 1, GRID);
        }
    }

    let mut bars = Vec::new();
    for (c, row) in spec.values.iter().enumerate() {
        for (s, &v) in row.iter().enumerate() {
            let h = l.bar_height(v, spec.y_max);
            let x = l.bar_left(c, s, series);
            let color = spec.colors[s];
            for yy in l.ay - h..l.ay {
                for xx in x..x + l.bar_w {
                    let striped =
                        spec.flags.hatching && s % 2 == 1 && (xx - x) % HATCH_PERIOD < HATCH_WIDTH;
                    cv.put(xx, yy, if striped { hatch(color) } else { color });
                }
            }
            bars.push(TruthBar {
                category: c,
                series: s,
                value: v,
                rect: Rect::new(x + ox, l.ay - h + oy, l.bar_w, h),
            });
        }
    }

    // axes: x-axis rows ay..=ay+1, y-axis columns ax-1..=ax
    cv.fill(l.ax - 1, l.ay, l.right - (l.ax - 1), 2, INK);
    cv.fill(l.ax - 1, l.top, 2, l.ay + 2 - l.top, INK);
    let large_h = font::text_height(LARGE_TEXT);
    let mut y_ticks = Vec::new();
    for i in 0..=ticks {
        let row = l.tick_row(i, ticks);
        if i > 0 {
            cv.fill(l.ax - 1 - TICK_LEN, row, TICK_LEN, 1, INK);
        }
        let label = &l.tick_labels[i as usize];
        let w = font::text_width(label, LARGE_TEXT);
        let x = l.ax - 1 - TICK_LEN - TICK_TEXT_GAP - w;
        if let Some(bbox) = cv.text(label, LARGE_TEXT, x, row - (large_h - 1) / 2) {
            texts.push(TruthText {
                role: TextRole::YTick,
                text: label.clone(),
                bbox,
            });
        }
        y_ticks.push(TruthTick {
            pixel: row + oy,
            value: i as f64 * spec.tick_step,
            text: label.clone(),
        });
    }

    for (c, label) in spec.x_tick_labels.iter().enumerate() {
        let center = l.ax + 1 + c as u32 * l.slot + l.slot / 2;
        let w = font::text_width(label, SMALL_TEXT);
        if let Some(bbox) = cv.text(label, SMALL_TEXT, center - w / 2, l.ay + X_TICK_TEXT_TOP) {
            texts.push(TruthText {
                role: TextRole::XTick,
                text: label.clone(),
                bbox,
            });
        }
    }

    if spec.flags.value_labels {
        let dec = spec.value_decimals();
        for b in &bars {
            let label = format_value(b.value, dec);
            let w = font::text_width(&label, SMALL_TEXT);
            let center = b.rect.x - ox + (b.rect.w - 1) / 2;
            let top = b.rect.y - oy - VALUE_LABEL_GAP - font::text_height(SMALL_TEXT);
            if let Some(bbox) = cv.text(&label, SMALL_TEXT, center - (w - 1) / 2, top) {
                texts.push(TruthText {
                    role: TextRole::BarValue,
                    text: label,
                    bbox,
                });
            }
        }
    }

    if !spec.title.is_empty() {
        let w = font::text_width(&spec.title, LARGE_TEXT);
        if let Some(bbox) = cv.text(&spec.title, LARGE_TEXT, (l.cw - w) / 2, MARGIN) {
            texts.push(TruthText {
                role: TextRole::Title,
                text: spec.title.clone(),
                bbox,
            });
        }
    }
    if !spec.x_label.is_empty() {
        let w = font::text_width(&spec.x_label, LARGE_TEXT);
        let center = l.ax + 1 + (l.right - l.ax - 1) / 2;
        let top = l.ay + X_TICK_TEXT_TOP + font::text_height(SMALL_TEXT) + TEXT_GAP;
        if let Some(bbox) = cv.text(&spec.x_label, LARGE_TEXT, center - w / 2, top) {
            texts.push(TruthText {
                role: TextRole::XLabel,
                text: spec.x_label.clone(),
                bbox,
            });
        }
    }
    if !spec.y_label.is_empty() {
        let len = font::text_width(&spec.y_label, LARGE_TEXT);
        let mid = (l.top + l.ay) / 2;
        let top = (mid + 1).saturating_sub(len / 2).max(MARGIN);
        if let Some(bbox) = cv.text_ccw(&spec.y_label, LARGE_TEXT, MARGIN, top) {
            texts.push(TruthText {
                role: TextRole::YLabel,
                text: spec.y_label.clone(),
                bbox,
            });
        }
    }

    add_noise(&mut img, spec.noise, spec.seed);

    let axes = AxesGeometry {
        x_axis: LineSegment::new(
            Point::new((l.ax - 1 + ox) as i32, (l.ay + oy) as i32),
            Point::new((l.right - 1 + ox) as i32, (l.ay + oy) as i32),
        ),
        y_axis: LineSegment::new(
            Point::new((l.ax + ox) as i32, (l.top + oy) as i32),
            Point::new((l.ax + ox) as i32, (l.ay + 1 + oy) as i32),
        ),
        origin: Point::new((l.ax + ox) as i32, (l.ay + oy) as i32),
        plot_rect: Rect::new(l.ax + 1 + ox, l.top + oy, l.right - l.ax - 1, l.ay - l.top),
    };
    let non_empty = |s: &String| (!s.is_empty()).then(|| s.clone());
    let truth = GroundTruth {
        spec: spec.clone(),
        title: non_empty(&spec.title),
        x_label: non_empty(&spec.x_label),
        y_label: non_empty(&spec.y_label),
        x_ticks: spec.x_tick_labels.clone(),
        y_ticks,
        bars,
        texts,
        axes,
    };
    Ok((img, truth))
}

/// Invert exactly `round(fraction · w · h)` distinct pixels: dark ones turn
/// white, light ones black.
fn add_noise(img: &mut RgbImage, fraction: f64, seed: u64) {
    let (w, h) = img.dimensions();
    let total = w as usize * h as usize;
    let count = (fraction * total as f64).round() as usize;
    if count == 0 {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in rand::seq::index::sample(&mut rng, total, count) {
        let (x, y) = ((i % w as usize) as u32, (i / w as usize) as u32);
        let [r, g, b] = img.get(x, y);
        let flipped = if luma(r, g, b) < 128 {
            [255; 3]
        } else {
            [0; 3]
        };
        img.put(x, y, flipped);
    }
}
