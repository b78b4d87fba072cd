//! Text localisation and recognition.
//!
//! Text is located by filtering the contours of a binarised panel (area
//! outliers and sparse shapes are dropped), grouped into words, then read
//! through an [`OcrEngine`] after a 2x upscale.

pub mod font;
mod ocr;

pub use ocr::{
    builtin_glyph_ocr, BuiltinOcr, ExternalOcr, OcrEngine, OcrError, Reading, GLYPH_CUTOFF,
};

use crate::imgproc::{find_contours, upscale, BinaryImage, Contour, GrayImage, UpscaleMethod};
use crate::Rect;
use serde::{Deserialize, Serialize};

/// A contour that survived the area and density filters.
#[derive(Debug, Clone, PartialEq)]
pub struct TextCandidate {
    pub contour: Contour,
    pub bbox: Rect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TextRole {
    #[default]
    Unassigned,
    Title,
    XTick,
    YTick,
    XLabel,
    YLabel,
    BarValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextBlock {
    /// Box in source-image coordinates.
    pub bbox: Rect,
    pub text: String,
    pub confidence: f64,
    pub role: TextRole,
    /// Read after rotating the crop clockwise.
    pub vertical: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateParams {
    /// Contours with fewer pixels are treated as specks and ignored
    /// entirely, including in the area statistics.
    pub min_area: u64,
    pub min_fill: f64,
    /// Half-width of the accepted area band, in standard deviations.
    pub area_sigmas: f64,
    /// Longer side over shorter side above which a contour is a rule or an
    /// axis fragment rather than a glyph.
    pub max_aspect: f64,
}

impl Default for CandidateParams {
    fn default() -> Self {
        Self {
            min_area: 4,
            min_fill: 0.25,
            area_sigmas: 1.0,
            max_aspect: 10.0,
        }
    }
}

/// Keep contours whose area lies within `mean ± k·σ` of this image's contour
/// areas, whose fill ratio reaches `min_fill` and whose box is not a thin line.
pub fn detect_text_candidates(
    binary: &BinaryImage,
    params: &CandidateParams,
) -> Vec<TextCandidate> {
    let contours: Vec<Contour> = find_contours(binary)
        .into_iter()
        .filter(|c| c.area >= params.min_area)
        .collect();
    let band = if contours.len() >= 2 {
        let n = contours.len() as f64;
        let mean = contours.iter().map(|c| c.area as f64).sum::<f64>() / n;
        let var = contours
            .iter()
            .map(|c| (c.area as f64 - mean).powi(2))
            .sum::<f64>()
            / n;
        let sd = var.sqrt();
        Some((
            mean - params.area_sigmas * sd,
            mean + params.area_sigmas * sd,
        ))
    } else {
        None
    };
    contours
        .into_iter()
        .filter(|c| c.fill_ratio >= params.min_fill)
        .filter(|c| {
            c.bbox.w.max(c.bbox.h) as f64 <= params.max_aspect * c.bbox.w.min(c.bbox.h) as f64
        })
        .filter(|c| band.is_none_or(|(lo, hi)| (lo..=hi).contains(&(c.area as f64))))
        .map(|c| TextCandidate {
            bbox: c.bbox,
            contour: c,
        })
        .collect()
}

/// Binary image with every box in `rects` set.
pub fn build_text_mask(
    width: u32,
    height: u32,
    rects: impl IntoIterator<Item = Rect>,
) -> BinaryImage {
    let mut mask = BinaryImage::new(width, height);
    for r in rects {
        for y in r.y..r.bottom().min(height) {
            for x in r.x..r.right().min(width) {
                mask.set(x, y, true);
            }
        }
    }
    mask
}

/// A word-level box assembled from glyph candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GlyphGroup {
    pub bbox: Rect,
    pub glyphs: usize,
    /// Some members were joined top-to-bottom rather than side by side.
    pub stacked: bool,
}

const SOLID_FILL: f64 = 0.9;

/// Merge glyph candidates into words.
///
/// Two candidates join when their horizontal gap is at most the median glyph
/// width and they share at least half of the shorter one's rows, or under the
/// same rule with axes swapped (rotated text, dotted letters). A solid
/// candidate never absorbs a smaller neighbour, which keeps short bars away
/// from the labels printed on them. Output is sorted top-to-bottom, then
/// left-to-right.
pub fn group_glyphs(candidates: &[TextCandidate]) -> Vec<GlyphGroup> {
    let n = candidates.len();
    if n == 0 {
        return Vec::new();
    }
    let mut widths: Vec<u32> = candidates.iter().map(|c| c.bbox.w).collect();
    widths.sort_unstable();
    let reach = widths[n / 2];

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let mut stacked = vec![false; n];
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (&candidates[i], &candidates[j]);
            if merge_blocked(a, b) {
                continue;
            }
            let (ra, rb) = (a.bbox, b.bbox);
            let side = ra.h_gap(&rb) <= reach && 2 * ra.v_overlap(&rb) >= ra.h.min(rb.h);
            let over = ra.v_gap(&rb) <= reach && 2 * ra.h_overlap(&rb) >= ra.w.min(rb.w);
            if side || over {
                let (pi, pj) = (find(&mut parent, i), find(&mut parent, j));
                if pi != pj {
                    parent[pi] = pj;
                }
                if over && !side {
                    stacked[i] = true;
                    stacked[j] = true;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, GlyphGroup> = Default::default();
    for i in 0..n {
        let root = find(&mut parent, i);
        let g = groups.entry(root).or_insert(GlyphGroup {
            bbox: candidates[i].bbox,
            glyphs: 0,
            stacked: false,
        });
        g.bbox = g.bbox.union(&candidates[i].bbox);
        g.glyphs += 1;
        g.stacked |= stacked[i];
    }
    let mut out: Vec<GlyphGroup> = groups.into_values().collect();
    out.sort_by_key(|g| (g.bbox.y, g.bbox.x));
    out
}

fn merge_blocked(a: &TextCandidate, b: &TextCandidate) -> bool {
    let solid_larger = |s: &TextCandidate, o: &TextCandidate| {
        s.contour.fill_ratio >= SOLID_FILL && s.bbox.area() > o.bbox.area()
    };
    solid_larger(a, b) || solid_larger(b, a)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecognizeOptions {
    pub upscale: UpscaleMethod,
    pub factor: u32,
    /// Column of the y-axis when known; vertical labels are only looked
    /// for to its left (left half of the image otherwise).
    pub y_axis_x: Option<u32>,
}

impl Default for RecognizeOptions {
    fn default() -> Self {
        Self {
            upscale: UpscaleMethod::Bicubic,
            factor: 2,
            y_axis_x: None,
        }
    }
}

const CROP_PAD: u32 = 2;

/// Whether a group should be read as text rotated a quarter turn.
pub fn is_vertical(group: &GlyphGroup, image_width: u32, y_axis_x: Option<u32>) -> bool {
    let b = group.bbox;
    let limit = y_axis_x.unwrap_or(image_width / 2);
    b.h > 2 * b.w && group.glyphs >= 2 && group.stacked && b.right() <= limit
}

/// Read every group. Pixels outside `mask` are treated as background; groups
/// that yield no text are dropped.
pub fn recognize(
    img: &GrayImage,
    mask: &BinaryImage,
    groups: &[GlyphGroup],
    engine: &dyn OcrEngine,
    opts: &RecognizeOptions,
) -> Result<Vec<TextBlock>, OcrError> {
    assert_eq!(
        img.dimensions(),
        mask.dimensions(),
        "mask does not match image"
    );
    let (iw, ih) = img.dimensions();
    let factor = opts.factor.max(1);
    let mut out = Vec::new();
    for g in groups {
        let b = g.bbox;
        let (cw, ch) = (b.w + 2 * CROP_PAD, b.h + 2 * CROP_PAD);
        let crop = GrayImage::from_fn(cw, ch, |x, y| {
            let (sx, sy) = (
                b.x as i64 + x as i64 - CROP_PAD as i64,
                b.y as i64 + y as i64 - CROP_PAD as i64,
            );
            if sx < 0
                || sy < 0
                || sx >= iw as i64
                || sy >= ih as i64
                || !mask.get(sx as u32, sy as u32)
            {
                255
            } else {
                img.get(sx as u32, sy as u32)
            }
        });
        let big = upscale(&crop, factor, opts.upscale);
        let vertical = is_vertical(g, iw, opts.y_axis_x);
        let region = if vertical {
            big.rotate_cw()
        } else {
            big.clone()
        };
        let readings = engine.read(&region)?;
        let mut text = Vec::new();
        let mut confidence = 0.0;
        let mut bbox: Option<Rect> = None;
        for r in readings.iter().filter(|r| !r.text.trim().is_empty()) {
            let local = if vertical {
                unrotate_cw(r.bbox, big.height())
            } else {
                r.bbox
            };
            let x0 = (b.x + local.x / factor).saturating_sub(CROP_PAD);
            let y0 = (b.y + local.y / factor).saturating_sub(CROP_PAD);
            let x1 = (b.x + local.right().div_ceil(factor))
                .saturating_sub(CROP_PAD)
                .clamp(x0 + 1, iw);
            let y1 = (b.y + local.bottom().div_ceil(factor))
                .saturating_sub(CROP_PAD)
                .clamp(y0 + 1, ih);
            let x0 = x0.min(iw - 1);
            let y0 = y0.min(ih - 1);
            let mapped = Rect::new(x0, y0, x1.max(x0 + 1) - x0, y1.max(y0 + 1) - y0);
            bbox = Some(bbox.map_or(mapped, |u| u.union(&mapped)));
            text.push(r.text.trim().to_string());
            confidence += r.confidence;
        }
        if let Some(bbox) = bbox {
            let n = text.len() as f64;
            out.push(TextBlock {
                bbox,
                text: text.join(" "),
                confidence: (confidence / n).clamp(0.0, 1.0),
                role: TextRole::Unassigned,
                vertical,
            });
        }
    }
    Ok(out)
}

/// Map a box found in a clockwise-rotated image back to the unrotated frame,
/// where `height` is the unrotated image height.
fn unrotate_cw(r: Rect, height: u32) -> Rect {
    // rotate_cw sends (x, y) to (height - 1 - y, x)
    let x0 = r.y;
    let y0 = height - r.right();
    Rect::new(x0, y0, r.h, r.w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imgproc::otsu_binarize;

    fn square(img: &mut BinaryImage, x: u32, y: u32, w: u32, h: u32) {
        for yy in y..y + h {
            for xx in x..x + w {
                img.set(xx, yy, true);
            }
        }
    }

    fn text_image(lines: &[(&str, u32, u32, u32)], w: u32, h: u32) -> GrayImage {
        let mut img = GrayImage::new(w, h);
        for &(s, scale, ox, oy) in lines {
            font::rasterize(s, scale, |x, y| img.put(ox + x, oy + y, 0));
        }
        img
    }

    #[test]
    fn empty_image_has_no_candidates() {
        assert!(
            detect_text_candidates(&BinaryImage::new(30, 30), &CandidateParams::default())
                .is_empty()
        );
    }

    #[test]
    fn large_bar_rejected_glyphs_kept() {
        let mut img = text_image(&[("0123456789", 3, 10, 10)], 400, 300);
        for y in 60..290 {
            for x in 200..300 {
                img.put(x, y, 90);
            }
        }
        let (bin, _) = otsu_binarize(&img);
        let cands = detect_text_candidates(&bin, &CandidateParams::default());
        assert_eq!(cands.len(), 10);
        assert!(cands.iter().all(|c| c.bbox.y < 40));
    }

    #[test]
    fn thin_line_rejected_by_density() {
        let mut bin = BinaryImage::new(100, 100);
        for i in 0..90 {
            bin.set(i + 5, i + 5, true);
        }
        square(&mut bin, 10, 60, 6, 6);
        square(&mut bin, 30, 60, 6, 6);
        let cands = detect_text_candidates(&bin, &CandidateParams::default());
        assert!(cands.iter().all(|c| c.bbox.w == 6));
    }

    #[test]
    fn axis_fragment_rejected() {
        let mut bin = BinaryImage::new(100, 300);
        square(&mut bin, 90, 10, 3, 280);
        square(&mut bin, 10, 60, 6, 6);
        square(&mut bin, 30, 60, 6, 14);
        let cands = detect_text_candidates(&bin, &CandidateParams::default());
        assert_eq!(cands.len(), 2);
        assert!(cands.iter().all(|c| c.bbox.x < 90));
    }

    #[test]
    fn lone_contour_uses_density_only() {
        let mut bin = BinaryImage::new(50, 50);
        square(&mut bin, 0, 0, 40, 40);
        assert_eq!(
            detect_text_candidates(&bin, &CandidateParams::default()).len(),
            1
        );
    }

    #[test]
    fn mask_covers_union_of_boxes() {
        assert_eq!(build_text_mask(20, 20, []).count_ones(), 0);
        let one = build_text_mask(20, 20, [Rect::new(2, 3, 4, 5)]);
        assert_eq!(one.count_ones(), 20);
        assert!(one.get(2, 3) && one.get(5, 7) && !one.get(6, 7));
        let rects = [
            Rect::new(0, 0, 10, 10),
            Rect::new(5, 5, 10, 10),
            Rect::new(18, 18, 5, 5),
        ];
        let mask = build_text_mask(20, 20, rects);
        let oracle = (0..20u32)
            .flat_map(|y| (0..20u32).map(move |x| (x, y)))
            .filter(|&(x, y)| rects.iter().any(|r| r.contains(x, y)))
            .count();
        assert_eq!(mask.count_ones(), oracle);
    }

    fn cand(x: u32, y: u32, w: u32, h: u32) -> TextCandidate {
        let mut bin = BinaryImage::new(x + w + 1, y + h + 1);
        for yy in y..y + h {
            bin.set(x, yy, true);
            bin.set(x + w - 1, yy, true);
        }
        for xx in x..x + w {
            bin.set(xx, y, true);
        }
        let contour = find_contours(&bin).remove(0);
        TextCandidate {
            bbox: contour.bbox,
            contour,
        }
    }

    #[test]
    fn grouping_rules() {
        let g = group_glyphs(&[cand(0, 0, 10, 14), cand(12, 0, 10, 14)]);
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].bbox, Rect::new(0, 0, 22, 14));
        let g = group_glyphs(&[cand(0, 0, 10, 14), cand(60, 0, 10, 14)]);
        assert_eq!(g.len(), 2);
        let g = group_glyphs(&[cand(5, 7, 10, 14)]);
        assert_eq!(
            g,
            vec![GlyphGroup {
                bbox: Rect::new(5, 7, 10, 14),
                glyphs: 1,
                stacked: false
            }]
        );
    }

    #[test]
    fn rotated_word_groups_vertically() {
        let cs = [cand(0, 0, 14, 10), cand(0, 13, 14, 10), cand(0, 26, 14, 10)];
        let g = group_glyphs(&cs);
        assert_eq!(g.len(), 1);
        assert!(g[0].stacked);
        assert!(is_vertical(&g[0], 400, None));
        assert!(!is_vertical(&g[0], 400, Some(10)));
    }

    #[test]
    fn groups_sorted_top_then_left() {
        let g = group_glyphs(&[
            cand(50, 40, 10, 14),
            cand(80, 0, 10, 14),
            cand(0, 40, 10, 14),
        ]);
        let order: Vec<(u32, u32)> = g.iter().map(|g| (g.bbox.x, g.bbox.y)).collect();
        assert_eq!(order, vec![(80, 0), (0, 40), (50, 40)]);
    }

    #[test]
    fn solid_block_keeps_label_separate() {
        let mut bin = BinaryImage::new(80, 80);
        square(&mut bin, 10, 40, 30, 30);
        let bar = find_contours(&bin).remove(0);
        let bar = TextCandidate {
            bbox: bar.bbox,
            contour: bar,
        };
        let g = group_glyphs(&[bar, cand(15, 22, 10, 14)]);
        assert_eq!(g.len(), 2);
    }

    fn with_bar(img: &mut GrayImage, x: u32, y: u32, w: u32, h: u32) {
        for yy in y..y + h {
            for xx in x..x + w {
                img.put(xx, yy, 120);
            }
        }
    }

    fn pipeline(img: &GrayImage, axis: Option<u32>) -> Vec<TextBlock> {
        let (bin, _) = otsu_binarize(img);
        let cands = detect_text_candidates(&bin, &CandidateParams::default());
        let groups = group_glyphs(&cands);
        let (w, h) = img.dimensions();
        let mask = build_text_mask(w, h, groups.iter().map(|g| g.bbox));
        let opts = RecognizeOptions {
            y_axis_x: axis,
            ..Default::default()
        };
        recognize(img, &mask, &groups, &BuiltinOcr, &opts).unwrap()
    }

    #[test]
    fn recognizes_words_in_place() {
        let mut img = text_image(
            &[
                ("100", 2, 20, 20),
                ("Sales", 3, 120, 20),
                ("7.5", 2, 20, 80),
            ],
            300,
            240,
        );
        with_bar(&mut img, 150, 110, 80, 120);
        with_bar(&mut img, 240, 80, 50, 150);
        let blocks = pipeline(&img, None);
        let texts: Vec<&str> = blocks.iter().map(|b| b.text.as_str()).collect();
        assert_eq!(texts, vec!["100", "Sales", "7.5"]);
        assert!(blocks.iter().all(|b| b.confidence == 1.0));
        // the leading column of "1" is blank
        assert_eq!(
            blocks[0].bbox,
            Rect::new(22, 20, font::text_width("100", 2) - 2, 14)
        );
    }

    #[test]
    fn rotated_label_read_after_turning() {
        let mut word = GrayImage::new(font::text_width("Value", 3) + 4, 25);
        font::rasterize("Value", 3, |x, y| word.put(x + 2, y + 2, 0));
        let turned = word.rotate_ccw();
        let mut img = GrayImage::new(200, 200);
        with_bar(&mut img, 100, 40, 60, 150);
        for y in 0..turned.height() {
            for x in 0..turned.width() {
                img.put(x + 10, y + 40, turned.get(x, y));
            }
        }
        let blocks = pipeline(&img, Some(60));
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].text, "Value");
        assert!(blocks[0].vertical);
        let b = blocks[0].bbox;
        assert!(b.x >= 10 && b.right() <= 10 + turned.width());
        assert!(b.y >= 40 && b.bottom() <= 40 + turned.height());
    }

    #[test]
    fn blank_groups_dropped() {
        let img = GrayImage::new(40, 40);
        let mask = build_text_mask(40, 40, [Rect::new(5, 5, 10, 10)]);
        let g = [GlyphGroup {
            bbox: Rect::new(5, 5, 10, 10),
            glyphs: 1,
            stacked: false,
        }];
        assert!(
            recognize(&img, &mask, &g, &BuiltinOcr, &RecognizeOptions::default())
                .unwrap()
                .is_empty()
        );
    }

    #[test]
    fn unrotate_inverts_rotation() {
        let img = GrayImage::from_fn(7, 5, |x, y| {
            if (2..4).contains(&x) && y == 1 {
                0
            } else {
                255
            }
        });
        let rot = img.rotate_cw();
        let dark: Vec<(u32, u32)> = (0..rot.height())
            .flat_map(|y| (0..rot.width()).map(move |x| (x, y)))
            .filter(|&(x, y)| rot.get(x, y) == 0)
            .collect();
        let r = dark
            .iter()
            .fold(Rect::new(dark[0].0, dark[0].1, 1, 1), |acc, &(x, y)| {
                acc.union(&Rect::new(x, y, 1, 1))
            });
        assert_eq!(unrotate_cw(r, 5), Rect::new(2, 1, 2, 1));
    }
}
