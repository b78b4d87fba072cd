use super::{Axes, DisassemblyParams};
use crate::imgproc::{
    approx_corners, find_contours, luma, morphological_close, morphological_open, BinaryImage,
    RgbImage,
};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, VecDeque};

/// Template grid the centre slice is resampled to before comparison.
const TEMPLATE_W: u32 = 24;
const TEMPLATE_H: u32 = 8;
/// A slice whose minority tone covers less than this share is flat.
const FLAT_MINORITY: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeSide {
    Left,
    Right,
}

/// Vertical side of a filled region, in the coordinates of the mask it was
/// found in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerticalEdge {
    pub x: u32,
    pub y_top: u32,
    /// Last filled row.
    pub y_bottom: u32,
    pub side: EdgeSide,
}

/// Colour and texture of a bar's centre slice.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BarSignature {
    pub mean_rgb: [f64; 3],
    /// Dark/light pattern on a fixed grid; `None` for a flat fill.
    pub template: Option<Vec<f64>>,
}

/// One bar in panel coordinates. `x_right` is the last filled column and
/// `baseline_y` the x-axis row, so `height` counts the filled rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bar {
    pub x_left: u32,
    pub x_right: u32,
    pub y_top: u32,
    pub baseline_y: u32,
    pub height: u32,
    pub group_id: usize,
    #[serde(skip)]
    pub signature: BarSignature,
}

impl Bar {
    pub fn center_x(&self) -> f64 {
        (self.x_left + self.x_right) as f64 / 2.0
    }
}

/// Filled regions of a cropped plot: pixels whose colour stands out from
/// the plot background, background pockets closed off by ink on the top,
/// left and right filled in (the x-axis below the crop acts as the floor),
/// then closed and opened to drop gridlines, hatching gaps and specks.
pub fn bar_mask(plot: &RgbImage, params: &DisassemblyParams) -> BinaryImage {
    let bg = background_colour(plot);
    let contrast = params.bar_contrast as i32;
    let (w, h) = plot.dimensions();
    let bin = BinaryImage::from_fn(w, h, |x, y| {
        let p = plot.get(x, y);
        (0..3).any(|c| (p[c] as i32 - bg[c] as i32).abs() > contrast)
    });
    let filled = fill_pockets(&bin);
    let closed = morphological_close(&filled, params.close_kernel);
    morphological_open(&closed, params.open_kernel)
}

/// Width of the border band sampled for the background colour.
const BORDER_BAND: u32 = 3;

/// Most frequent colour along the top, left and right borders, where bars
/// rarely reach; ties go to the lightest.
fn background_colour(img: &RgbImage) -> [u8; 3] {
    let (w, h) = img.dimensions();
    let band = BORDER_BAND.min(w).min(h);
    let mut counts: HashMap<[u8; 3], usize> = HashMap::new();
    for y in 0..h {
        for x in 0..w {
            if y < band || x < band || x + band >= w {
                *counts.entry(img.get(x, y)).or_default() += 1;
            }
        }
    }
    counts
        .into_iter()
        .max_by_key(|&(c, n)| (n, c.iter().map(|&v| v as u32).sum::<u32>(), c))
        .map_or([255; 3], |(c, _)| c)
}

fn fill_pockets(bin: &BinaryImage) -> BinaryImage {
    let (w, h) = bin.dimensions();
    let mut outside = vec![false; w as usize * h as usize];
    let mut queue = VecDeque::new();
    let seed = |x: u32, y: u32, outside: &mut [bool], queue: &mut VecDeque<(u32, u32)>| {
        let i = (y * w + x) as usize;
        if !bin.get(x, y) && !outside[i] {
            outside[i] = true;
            queue.push_back((x, y));
        }
    };
    for x in 0..w {
        seed(x, 0, &mut outside, &mut queue);
    }
    for y in 0..h {
        seed(0, y, &mut outside, &mut queue);
        seed(w - 1, y, &mut outside, &mut queue);
    }
    while let Some((x, y)) = queue.pop_front() {
        if x > 0 {
            seed(x - 1, y, &mut outside, &mut queue);
        }
        if x + 1 < w {
            seed(x + 1, y, &mut outside, &mut queue);
        }
        if y > 0 {
            seed(x, y - 1, &mut outside, &mut queue);
        }
        if y + 1 < h {
            seed(x, y + 1, &mut outside, &mut queue);
        }
    }
    BinaryImage::from_fn(w, h, |x, y| !outside[(y * w + x) as usize])
}

/// Vertical sides of every region in `mask`. Contours run clockwise, so a
/// side walked downwards is a right side and one walked upwards a left side.
pub fn vertical_edges(mask: &BinaryImage, params: &DisassemblyParams) -> Vec<VerticalEdge> {
    let mut out = Vec::new();
    for c in find_contours(mask) {
        let poly = approx_corners(&c, params.corner_epsilon);
        let n = poly.len();
        if n < 2 {
            continue;
        }
        for i in 0..n {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            if a.y == b.y || (a.x - b.x).unsigned_abs() > params.edge_dx_tol {
                continue;
            }
            let side = if b.y > a.y {
                EdgeSide::Right
            } else {
                EdgeSide::Left
            };
            let x = match side {
                EdgeSide::Left => a.x.min(b.x),
                EdgeSide::Right => a.x.max(b.x),
            };
            out.push(VerticalEdge {
                x: x as u32,
                y_top: a.y.min(b.y) as u32,
                y_bottom: a.y.max(b.y) as u32,
                side,
            });
        }
    }
    out.sort_by_key(|e| (e.x, e.y_top));
    out
}

/// Pair left and right sides into bars. `plot` is the mask of the crop at
/// `offset`; both sides must reach the x-axis and their tops must agree.
/// Each left side, scanned left to right, takes the nearest unused right
/// side after it. Bars come back sorted by `x_left`, in panel coordinates.
pub fn detect_bars(
    plot: &BinaryImage,
    axes: &Axes,
    offset: (u32, u32),
    params: &DisassemblyParams,
) -> Vec<Bar> {
    let baseline = axes.origin.y as i64 - offset.1 as i64;
    let on_axis = |e: &VerticalEdge| {
        (e.y_bottom as i64 + 1 - baseline).unsigned_abs() <= params.baseline_tol as u64
    };
    let edges: Vec<VerticalEdge> = vertical_edges(plot, params)
        .into_iter()
        .filter(on_axis)
        .collect();
    let lefts = edges.iter().filter(|e| e.side == EdgeSide::Left);
    let mut rights: Vec<(VerticalEdge, bool)> = edges
        .iter()
        .filter(|e| e.side == EdgeSide::Right)
        .map(|e| (*e, false))
        .collect();
    let mut bars = Vec::new();
    for l in lefts {
        let Some((r, used)) = rights.iter_mut().find(|(r, used)| !used && r.x > l.x) else {
            continue;
        };
        if r.y_top.abs_diff(l.y_top) > params.bar_top_tol {
            continue;
        }
        *used = true;
        let y_top = l.y_top.min(r.y_top) + offset.1;
        let baseline_y = axes.origin.y as u32;
        if y_top >= baseline_y {
            continue;
        }
        bars.push(Bar {
            x_left: l.x + offset.0,
            x_right: r.x + offset.0,
            y_top,
            baseline_y,
            height: baseline_y - y_top,
            group_id: 0,
            signature: BarSignature::default(),
        });
    }
    bars.sort_by_key(|b| b.x_left);
    bars
}

/// Centre slice of a bar: middle half of its width, middle fifth of its height.
fn signature(panel: &RgbImage, bar: &Bar) -> BarSignature {
    let w = bar.x_right - bar.x_left + 1;
    let sw = (w / 2).max(1);
    let sx = bar.x_left + (w - sw) / 2;
    let sh = (bar.height / 5).max(1);
    let sy = bar.y_top + (bar.height - sh) / 2;
    let (pw, ph) = panel.dimensions();
    let mut sum = [0f64; 3];
    let mut lumas = Vec::with_capacity((sw * sh) as usize);
    for y in sy..(sy + sh).min(ph) {
        for x in sx..(sx + sw).min(pw) {
            let p = panel.get(x, y);
            for c in 0..3 {
                sum[c] += p[c] as f64;
            }
            lumas.push(luma(p[0], p[1], p[2]) as f64);
        }
    }
    let n = lumas.len().max(1) as f64;
    let mean_rgb = sum.map(|s| s / n);
    let mean_luma = lumas.iter().sum::<f64>() / n;
    let dark = lumas.iter().filter(|&&l| l < mean_luma).count() as f64;
    let minority = dark.min(n - dark) / n;
    if minority < FLAT_MINORITY {
        return BarSignature {
            mean_rgb,
            template: None,
        };
    }
    let (cols, rows) = ((sx + sw).min(pw) - sx, (sy + sh).min(ph) - sy);
    let mut template = Vec::with_capacity((TEMPLATE_W * TEMPLATE_H) as usize);
    for gy in 0..TEMPLATE_H {
        let y = ((2 * gy + 1) * rows / (2 * TEMPLATE_H)).min(rows - 1);
        for gx in 0..TEMPLATE_W {
            let x = ((2 * gx + 1) * cols / (2 * TEMPLATE_W)).min(cols - 1);
            let l = lumas[(y * cols + x) as usize];
            template.push(if l < mean_luma { 1.0 } else { 0.0 });
        }
    }
    BarSignature {
        mean_rgb,
        template: Some(template),
    }
}

fn template_correlation(a: &Option<Vec<f64>>, b: &Option<Vec<f64>>) -> f64 {
    match (a, b) {
        (None, None) => 1.0,
        (Some(a), Some(b)) => pearson(a, b).unwrap_or(0.0),
        _ => 0.0,
    }
}

fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    (saa > 0.0 && sbb > 0.0).then(|| sab / (saa * sbb).sqrt())
}

fn same_group(a: &BarSignature, b: &BarSignature, params: &DisassemblyParams) -> bool {
    let d = (0..3)
        .map(|c| (a.mean_rgb[c] - b.mean_rgb[c]).powi(2))
        .sum::<f64>()
        .sqrt();
    d <= params.group_color_dist
        && template_correlation(&a.template, &b.template) >= params.group_template_corr
}

/// Assign series ids by centre-slice colour and texture. Bars are taken left
/// to right; each joins the first group whose founding bar matches it, or
/// opens the next id.
pub fn group_bars(panel: &RgbImage, mut bars: Vec<Bar>, params: &DisassemblyParams) -> Vec<Bar> {
    bars.sort_by_key(|b| (b.x_left, b.y_top));
    let mut founders: Vec<BarSignature> = Vec::new();
    for bar in &mut bars {
        bar.signature = signature(panel, bar);
        bar.group_id = match founders
            .iter()
            .position(|f| same_group(f, &bar.signature, params))
        {
            Some(g) => g,
            None => {
                founders.push(bar.signature.clone());
                founders.len() - 1
            }
        };
    }
    bars
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pockets_fill_only_when_closed_above() {
        // a hollow box open at the bottom and a cup open at the top
        let img = BinaryImage::from_fn(20, 10, |x, y| {
            let boxed =
                (2..=7).contains(&x) && (3..10).contains(&y) && (x == 2 || x == 7 || y == 3);
            let cup = (11..=16).contains(&x) && (3..10).contains(&y) && (x == 11 || x == 16);
            boxed || cup
        });
        let f = fill_pockets(&img);
        assert!(f.get(4, 6));
        assert!(!f.get(13, 6));
        assert!(!f.get(0, 0));
    }

    #[test]
    fn background_survives_wide_bars() {
        let mut plot = RgbImage::new(100, 80);
        for y in 10..80 {
            for x in 6..94 {
                plot.put(x, y, [214, 39, 40]);
            }
        }
        assert_eq!(background_colour(&plot), [255, 255, 255]);
        let mask = bar_mask(&plot, &DisassemblyParams::default());
        assert!(mask.get(50, 50) && !mask.get(50, 5) && !mask.get(2, 50));
    }

    #[test]
    fn rectangle_sides() {
        let mask =
            BinaryImage::from_fn(30, 20, |x, y| (5..15).contains(&x) && (4..20).contains(&y));
        let e = vertical_edges(&mask, &DisassemblyParams::default());
        assert_eq!(
            e,
            vec![
                VerticalEdge {
                    x: 5,
                    y_top: 4,
                    y_bottom: 19,
                    side: EdgeSide::Left
                },
                VerticalEdge {
                    x: 14,
                    y_top: 4,
                    y_bottom: 19,
                    side: EdgeSide::Right
                },
            ]
        );
    }

    #[test]
    fn correlation_cases() {
        assert_eq!(template_correlation(&None, &None), 1.0);
        assert_eq!(template_correlation(&None, &Some(vec![0.0, 1.0])), 0.0);
        let a = Some(vec![0.0, 1.0, 0.0, 1.0]);
        assert!((template_correlation(&a, &a) - 1.0).abs() < 1e-12);
        let b = Some(vec![1.0, 0.0, 1.0, 0.0]);
        assert!((template_correlation(&a, &b) + 1.0).abs() < 1e-12);
    }
}
