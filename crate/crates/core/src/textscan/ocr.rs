//! OCR engines: the built-in bitmap-font matcher and a subprocess adapter.

use super::font::{self, Glyph};
use crate::imgproc::{connected_components, otsu_binarize, BinaryImage, GrayImage};
use crate::Rect;
use std::process::Command;
use std::sync::OnceLock;

/// Glyphs scoring below this emit nothing.
pub const GLYPH_CUTOFF: f64 = 0.6;

/// One piece of text found in a region, with its box in region coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Reading {
    pub bbox: Rect,
    pub text: String,
    pub confidence: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum OcrError {
    #[error("failed to run OCR command `{cmd}`: {source}")]
    Spawn { cmd: String, source: std::io::Error },
    #[error("OCR command `{cmd}` exited with {status}: {stderr}")]
    Exit {
        cmd: String,
        status: String,
        stderr: String,
    },
    #[error("OCR command `{cmd}` wrote a malformed line {line:?}")]
    Protocol { cmd: String, line: String },
    #[error("could not stage OCR input: {0}")]
    Stage(String),
}

/// A recogniser turning a gray region into zero or more readings.
///
/// Implementations must be deterministic for a given region and must not
/// panic on arbitrary pixel content.
pub trait OcrEngine: Send + Sync {
    fn read(&self, region: &GrayImage) -> Result<Vec<Reading>, OcrError>;
}

/// Template matcher over the shipped bitmap font.
#[derive(Debug, Clone, Copy, Default)]
pub struct BuiltinOcr;

impl OcrEngine for BuiltinOcr {
    fn read(&self, region: &GrayImage) -> Result<Vec<Reading>, OcrError> {
        Ok(read_glyphs(region).into_iter().collect())
    }
}

/// Recognise a single line of text; returns `("", 0.0)` when nothing matches.
pub fn builtin_glyph_ocr(region: &GrayImage) -> (String, f64) {
    match read_glyphs(region) {
        Some(r) => (r.text, r.confidence),
        None => (String::new(), 0.0),
    }
}

fn templates() -> &'static [Glyph] {
    static CELL: OnceLock<Vec<Glyph>> = OnceLock::new();
    CELL.get_or_init(font::glyphs)
}

struct Segment {
    bbox: Rect,
    labels: Vec<u32>,
}

fn read_glyphs(region: &GrayImage) -> Option<Reading> {
    let (bin, _) = otsu_binarize(region);
    if bin.count_ones() == 0 {
        return None;
    }
    let lm = connected_components(&bin);
    let boxes = lm.bounding_boxes();
    let areas = lm.areas();
    let unit = estimate_unit(&bin, &lm.labels, &boxes);

    let min_area = 0.5 * unit * unit;
    let mut comps: Vec<usize> = (0..boxes.len())
        .filter(|&i| areas[i] as f64 >= min_area)
        .collect();
    comps.sort_by_key(|&i| (boxes[i].x, boxes[i].y));

    let mut segments: Vec<Segment> = Vec::new();
    for i in comps {
        let b = boxes[i];
        match segments.last_mut() {
            Some(s) if (b.x as f64) <= s.bbox.right() as f64 + unit / 2.0 => {
                s.bbox = s.bbox.union(&b);
                s.labels.push(i as u32 + 1);
            }
            _ => segments.push(Segment {
                bbox: b,
                labels: vec![i as u32 + 1],
            }),
        }
    }

    let glyphs: Vec<(&Segment, Rect)> = segments
        .iter()
        .filter_map(|s| trim(&lm.labels, bin.width(), s, unit).map(|r| (s, r)))
        .collect();
    let baseline = glyphs.iter().map(|(_, b)| b.bottom()).max()?;
    let classify = |seg: &Segment, gb: &Rect| {
        let cells = |x: u32, y: u32| {
            seg.labels
                .contains(&lm.labels[(y * bin.width() + x) as usize])
        };
        let bottom_gap = (baseline.saturating_sub(gb.bottom())) as f64 / unit;
        best_match(gb, &cells, unit, bottom_gap)
    };

    let mut text = String::new();
    let mut scores = Vec::new();
    let mut ink: Option<Rect> = None;
    let mut accept = |ch: char, score: f64, gb: Rect| {
        text.push(ch);
        scores.push(score);
        ink = Some(ink.map_or(gb, |r| r.union(&gb)));
    };
    for (seg, gb) in &glyphs {
        let (ch, score) = classify(seg, gb);
        if score >= GLYPH_CUTOFF {
            accept(ch, score, *gb);
            continue;
        }
        // a failed match may be two glyphs fused by a speck
        let pieces = split_thin_columns(&lm.labels, bin.width(), seg, unit);
        for piece in pieces.iter().filter(|_| pieces.len() > 1) {
            if let Some(pb) = trim(&lm.labels, bin.width(), piece, unit) {
                let (ch, score) = classify(piece, &pb);
                if score >= GLYPH_CUTOFF {
                    accept(ch, score, pb);
                }
            }
        }
    }
    let bbox = ink?;
    let confidence = scores.iter().sum::<f64>() / scores.len() as f64;
    Some(Reading {
        bbox,
        text,
        confidence,
    })
}

/// Cut a segment at columns holding at most half a stroke of ink. Every
/// column of a real glyph carries at least one stroke, so such columns are
/// specks bridging two neighbouring glyphs.
fn split_thin_columns(labels: &[u32], width: u32, seg: &Segment, unit: f64) -> Vec<Segment> {
    let b = seg.bbox;
    let keep = unit / 2.0;
    let ink = |x: u32| {
        (b.y..b.bottom())
            .filter(|&y| seg.labels.contains(&labels[(y * width + x) as usize]))
            .count() as f64
    };
    let mut runs: Vec<(u32, u32)> = Vec::new();
    let mut start = None;
    for x in b.x..=b.right() {
        let thick = x < b.right() && ink(x) > keep;
        match (thick, start) {
            (true, None) => start = Some(x),
            (false, Some(s)) => {
                runs.push((s, x));
                start = None;
            }
            _ => {}
        }
    }
    if runs.len() <= 1 {
        return Vec::new();
    }
    runs.into_iter()
        .filter_map(|(x0, x1)| {
            let on = |x: u32, y: u32| seg.labels.contains(&labels[(y * width + x) as usize]);
            let rows: Vec<u32> = (b.y..b.bottom())
                .filter(|&y| (x0..x1).any(|x| on(x, y)))
                .collect();
            let (&y0, &y1) = (rows.first()?, rows.last()?);
            Some(Segment {
                bbox: Rect::new(x0, y0, x1 - x0, y1 + 1 - y0),
                labels: seg.labels.clone(),
            })
        })
        .collect()
}

/// Stroke thickness in pixels: the dominant length of ink runs that are
/// shorter than their component's smaller side.
fn estimate_unit(bin: &BinaryImage, labels: &[u32], boxes: &[Rect]) -> f64 {
    let (w, h) = bin.dimensions();
    let mut hist = vec![0u32; (w.max(h) + 1) as usize];
    let mut record = |label: u32, run: u32| {
        let b = boxes[label as usize - 1];
        if run < b.w.min(b.h) {
            hist[run as usize] += 1;
        }
    };
    for y in 0..h {
        let mut run = 0;
        for x in 0..=w {
            let l = if x < w {
                labels[(y * w + x) as usize]
            } else {
                0
            };
            if l > 0 {
                run += 1;
            } else if run > 0 {
                record(labels[(y * w + x - 1) as usize], run);
                run = 0;
            }
        }
    }
    for x in 0..w {
        let mut run = 0;
        for y in 0..=h {
            let l = if y < h {
                labels[(y * w + x) as usize]
            } else {
                0
            };
            if l > 0 {
                run += 1;
            } else if run > 0 {
                record(labels[((y - 1) * w + x) as usize], run);
                run = 0;
            }
        }
    }
    let Some((mode, _)) = hist
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .max_by_key(|&(i, &c)| (c, std::cmp::Reverse(i)))
    else {
        let tallest = boxes.iter().map(|b| b.h).max().unwrap_or(1);
        return (tallest as f64 / font::CELL_H as f64).max(1.0);
    };
    let lo = mode.saturating_sub(1);
    let (mut n, mut sum) = (0u64, 0u64);
    for (len, &c) in hist.iter().enumerate().take(mode + 2).skip(lo) {
        n += c as u64;
        sum += c as u64 * len as u64;
    }
    (sum as f64 / n as f64).max(1.0)
}

/// Shrink a segment's box past outer rows and columns holding at most half a
/// stroke of ink (noise specks fused to a glyph).
fn trim(labels: &[u32], width: u32, seg: &Segment, unit: f64) -> Option<Rect> {
    let b = seg.bbox;
    let on = |x: u32, y: u32| seg.labels.contains(&labels[(y * width + x) as usize]);
    let col = |x: u32| (b.y..b.bottom()).filter(|&y| on(x, y)).count() as f64;
    let row = |y: u32| (b.x..b.right()).filter(|&x| on(x, y)).count() as f64;
    let keep = unit / 2.0;
    let (mut x0, mut x1, mut y0, mut y1) = (b.x, b.right(), b.y, b.bottom());
    while x0 < x1 && col(x0) <= keep {
        x0 += 1;
    }
    while x1 > x0 && col(x1 - 1) <= keep {
        x1 -= 1;
    }
    while y0 < y1 && row(y0) <= keep {
        y0 += 1;
    }
    while y1 > y0 && row(y1 - 1) <= keep {
        y1 -= 1;
    }
    (x0 < x1 && y0 < y1).then(|| Rect::new(x0, y0, x1 - x0, y1 - y0))
}

fn best_match(
    gb: &Rect,
    ink: &dyn Fn(u32, u32) -> bool,
    unit: f64,
    bottom_gap: f64,
) -> (char, f64) {
    let units_w = (gb.w as f64 / unit).round().max(1.0);
    let units_h = (gb.h as f64 / unit).round().max(1.0);
    let bottom_row = font::CELL_H as f64 - 1.0 - bottom_gap.round();
    let mut best = (' ', 0.0);
    for t in templates() {
        let agree = agreement(gb, ink, t);
        let size_miss = (units_w - t.width as f64).abs() + (units_h - t.height as f64).abs();
        let drop = (bottom_row - t.bottom() as f64).abs();
        let score = agree * 0.75f64.powf(size_miss) * 0.8f64.powf(drop);
        if score > best.1 {
            best = (t.ch, score);
        }
    }
    best
}

/// Fraction of template cells whose majority ink state matches the glyph.
fn agreement(gb: &Rect, ink: &dyn Fn(u32, u32) -> bool, t: &Glyph) -> f64 {
    let span = |i: u32, n: u32, len: u32| {
        let a = (i as u64 * len as u64 / n as u64) as u32;
        let b = ((i as u64 + 1) * len as u64 / n as u64) as u32;
        (a, b.max(a + 1).min(len.max(a + 1)))
    };
    let mut same = 0;
    for cy in 0..t.height {
        let (ya, yb) = span(cy, t.height, gb.h);
        for cx in 0..t.width {
            let (xa, xb) = span(cx, t.width, gb.w);
            let mut on = 0;
            let mut all = 0;
            for y in ya..yb.min(gb.h) {
                for x in xa..xb.min(gb.w) {
                    all += 1;
                    on += ink(gb.x + x, gb.y + y) as u32;
                }
            }
            let cell_ink = all > 0 && 2 * on >= all;
            same += (cell_ink == t.ink(cx, cy)) as u32;
        }
    }
    same as f64 / (t.width * t.height) as f64
}

/// Runs a shell command per region: `sh -c '<cmd> "$1"' sh <png>`.
///
/// The command prints one line per block,
/// `x<TAB>y<TAB>w<TAB>h<TAB>confidence<TAB>text`, in region coordinates.
#[derive(Debug, Clone)]
pub struct ExternalOcr {
    pub command: String,
}

impl ExternalOcr {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
        }
    }

    fn parse(&self, stdout: &str, dims: (u32, u32)) -> Result<Vec<Reading>, OcrError> {
        let bad = |line: &str| OcrError::Protocol {
            cmd: self.command.clone(),
            line: line.to_string(),
        };
        let mut out = Vec::new();
        for line in stdout.lines().filter(|l| !l.trim().is_empty()) {
            let f: Vec<&str> = line.splitn(6, '\t').collect();
            if f.len() != 6 {
                return Err(bad(line));
            }
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(line));
            let (x, y, w, h) = (num(f[0])?, num(f[1])?, num(f[2])?, num(f[3])?);
            let confidence = num(f[4])?;
            if !(0.0..=1.0).contains(&confidence) || x < 0.0 || y < 0.0 || w < 1.0 || h < 1.0 {
                return Err(bad(line));
            }
            let text = f[5].trim().to_string();
            if text.is_empty() {
                continue;
            }
            let x0 = (x as u32).min(dims.0 - 1);
            let y0 = (y as u32).min(dims.1 - 1);
            let x1 = ((x + w).ceil() as u32).clamp(x0 + 1, dims.0);
            let y1 = ((y + h).ceil() as u32).clamp(y0 + 1, dims.1);
            out.push(Reading {
                bbox: Rect::new(x0, y0, x1 - x0, y1 - y0),
                text,
                confidence,
            });
        }
        Ok(out)
    }
}

impl OcrEngine for ExternalOcr {
    fn read(&self, region: &GrayImage) -> Result<Vec<Reading>, OcrError> {
        let file = tempfile::Builder::new()
            .suffix(".png")
            .tempfile()
            .map_err(|e| OcrError::Stage(e.to_string()))?;
        crate::rasterio::save_gray(region, file.path())
            .map_err(|e| OcrError::Stage(e.to_string()))?;
        let output = Command::new("sh")
            .arg("-c")
            .arg(format!("{} \"$1\"", self.command))
            .arg("sh")
            .arg(file.path())
            .output()
            .map_err(|source| OcrError::Spawn {
                cmd: self.command.clone(),
                source,
            })?;
        if !output.status.success() {
            return Err(OcrError::Exit {
                cmd: self.command.clone(),
                status: output.status.to_string(),
                stderr: String::from_utf8_lossy(&output.stderr).trim().to_string(),
            });
        }
        let stdout = String::from_utf8_lossy(&output.stdout);
        self.parse(&stdout, region.dimensions())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn render(text: &str, scale: u32, pad: u32) -> GrayImage {
        let w = font::text_width(text, scale) + 2 * pad;
        let h = font::text_height(scale) + 2 * pad;
        let mut img = GrayImage::new(w, h);
        font::rasterize(text, scale, |x, y| img.put(x + pad, y + pad, 0));
        img
    }

    #[test]
    fn reads_own_font_exactly() {
        let (t, c) = builtin_glyph_ocr(&render("42", 4, 3));
        assert_eq!(t, "42");
        assert_eq!(c, 1.0);
    }

    #[test]
    fn every_glyph_round_trips_in_context() {
        let all: String = font::charset().collect();
        for scale in [2, 3, 4, 6] {
            for chunk in all.as_bytes().chunks(9) {
                let s = std::str::from_utf8(chunk).unwrap();
                let probe = format!("0{s}");
                let (t, c) = builtin_glyph_ocr(&render(&probe, scale, 2));
                assert_eq!(t, probe, "scale {scale}");
                assert_eq!(c, 1.0, "{probe} at scale {scale}");
            }
        }
    }

    #[test]
    fn salt_and_pepper_tolerated() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut ok = 0;
        for _ in 0..20 {
            let mut img = render("42", 4, 4);
            let (w, h) = img.dimensions();
            for y in 0..h {
                for x in 0..w {
                    if rng.gen_bool(0.02) {
                        let v = img.get(x, y);
                        img.put(x, y, 255 - v);
                    }
                }
            }
            let (t, c) = builtin_glyph_ocr(&img);
            if t == "42" && c >= 0.9 {
                ok += 1;
            }
        }
        assert!(ok >= 19, "{ok}/20");
    }

    #[test]
    fn random_noise_reads_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let img = GrayImage::from_fn(60, 30, |_, _| if rng.gen_bool(0.5) { 0 } else { 255 });
            assert_eq!(builtin_glyph_ocr(&img).0, "");
        }
    }

    #[test]
    fn blank_region_reads_nothing() {
        assert_eq!(
            builtin_glyph_ocr(&GrayImage::new(20, 20)),
            (String::new(), 0.0)
        );
        assert_eq!(builtin_glyph_ocr(&GrayImage::filled(20, 20, 0)).0, "");
    }

    #[test]
    fn unit_follows_scale() {
        for scale in [2u32, 5] {
            let img = render("A8", scale, 2);
            let (bin, _) = otsu_binarize(&img);
            let lm = connected_components(&bin);
            let u = estimate_unit(&bin, &lm.labels, &lm.bounding_boxes());
            assert!((u - scale as f64).abs() < 0.5, "{u} vs {scale}");
        }
    }

    #[test]
    fn external_protocol_parsing() {
        let e = ExternalOcr::new("true");
        let r = e
            .parse("1\t2\t3\t4\t0.5\thello world\n\n", (10, 10))
            .unwrap();
        assert_eq!(
            r,
            vec![Reading {
                bbox: Rect::new(1, 2, 3, 4),
                text: "hello world".into(),
                confidence: 0.5
            }]
        );
        assert!(e.parse("1\t2\t3\n", (10, 10)).is_err());
        assert!(e.parse("1\t2\t3\t4\t1.5\tx\n", (10, 10)).is_err());
    }

    #[test]
    fn external_command_runs() {
        let e = ExternalOcr::new("test -f");
        assert!(e.read(&GrayImage::new(4, 4)).unwrap().is_empty());
        let e = ExternalOcr::new("printf '0\\t0\\t2\\t2\\t0.9\\tok\\n'; true");
        let r = e.read(&GrayImage::new(4, 4)).unwrap();
        assert_eq!(r[0].text, "ok");
        let err = ExternalOcr::new("exit 3; true")
            .read(&GrayImage::new(4, 4))
            .unwrap_err();
        assert!(matches!(err, OcrError::Exit { .. }), "{err}");
    }
}
