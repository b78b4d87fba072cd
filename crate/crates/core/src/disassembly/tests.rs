use super::*;
use crate::chartgen::{render, sample_specs, CorpusRanges, GroundTruth};
use crate::imgproc::{to_grayscale, BinaryImage, RgbImage};
use crate::testutil::{simple_spec, textless};
use crate::{Point, Rect};

fn params() -> DisassemblyParams {
    DisassemblyParams::default()
}

fn assert_axes_match(found: &Axes, truth: &GroundTruth) {
    let t = &truth.axes;
    let close = |a: Point, b: Point| (a.x - b.x).abs() <= 1 && (a.y - b.y).abs() <= 1;
    assert!(
        close(found.origin, t.origin),
        "origin {:?} vs {:?}",
        found.origin,
        t.origin
    );
    assert!(
        close(found.x_axis.p0, t.x_axis.p0) && close(found.x_axis.p1, t.x_axis.p1),
        "{found:?} vs {t:?}"
    );
    assert!(
        close(found.y_axis.p0, t.y_axis.p0) && close(found.y_axis.p1, t.y_axis.p1),
        "{found:?} vs {t:?}"
    );
}

fn extract(rgb: &RgbImage, gray: &crate::imgproc::GrayImage) -> (Axes, Vec<Bar>) {
    let p = params();
    let axes = detect_axes(gray, &p).unwrap();
    let (_, off) = crop_plot(gray, &axes);
    let plot = rgb.crop(axes.plot_rect);
    let bars = detect_bars(&bar_mask(&plot, &p), &axes, off, &p);
    (axes, group_bars(rgb, bars, &p))
}

fn assert_bars_match(bars: &[Bar], truth: &GroundTruth) {
    assert_eq!(bars.len(), truth.bars.len(), "{bars:?}");
    let mut expected: Vec<_> = truth.bars.iter().collect();
    expected.sort_by_key(|b| b.rect.x);
    for (b, t) in bars.iter().zip(expected) {
        assert!(b.x_left.abs_diff(t.rect.x) <= 2, "{b:?} vs {t:?}");
        assert!(
            b.x_right.abs_diff(t.rect.right() - 1) <= 2,
            "{b:?} vs {t:?}"
        );
        assert!(b.height.abs_diff(t.rect.h) <= 2, "{b:?} vs {t:?}");
    }
}

#[test]
fn axes_of_rendered_chart_within_a_pixel() {
    let (_, gray, truth) = textless(&simple_spec(vec![vec![30.0], vec![70.0], vec![50.0]]));
    let axes = detect_axes(&gray, &params()).unwrap();
    assert_axes_match(&axes, &truth);
    assert_eq!(axes.plot_rect, truth.axes.plot_rect);
}

#[test]
fn parallel_lines_have_no_axes() {
    let img = crate::imgproc::GrayImage::from_fn(300, 300, |_, y| {
        if (100..102).contains(&y) || (200..202).contains(&y) {
            0
        } else {
            255
        }
    });
    assert_eq!(detect_axes(&img, &params()), Err(DisassemblyError::NoAxes));
    let blank = crate::imgproc::GrayImage::filled(300, 300, 255);
    assert_eq!(
        detect_axes(&blank, &params()),
        Err(DisassemblyError::NoAxes)
    );
}

#[test]
fn longer_diagonal_does_not_displace_axes() {
    let (_, mut gray, truth) = textless(&simple_spec(vec![vec![30.0], vec![70.0]]));
    // longer than the x-axis, clear of both axes
    for i in 0..610 {
        let (x, y) = (150 + i, 500 - i * 69 / 100);
        gray.put(x, y, 0);
        gray.put(x + 1, y, 0);
    }
    assert_axes_match(&detect_axes(&gray, &params()).unwrap(), &truth);
}

#[test]
fn crop_offset_round_trips() {
    let (_, gray, truth) = textless(&simple_spec(vec![vec![30.0], vec![70.0]]));
    let axes = detect_axes(&gray, &params()).unwrap();
    let (plot, (ox, oy)) = crop_plot(&gray, &axes);
    let r = axes.plot_rect;
    assert_eq!((plot.width(), plot.height()), (r.w, r.h));
    for (cx, cy) in [(0, 0), (r.w - 1, 0), (0, r.h - 1), (r.w - 1, r.h - 1)] {
        assert_eq!(plot.get(cx, cy), gray.get(cx + ox, cy + oy));
    }
    for t in truth.texts_with_role(crate::textscan::TextRole::YTick) {
        assert!(r.intersection(&t.bbox).is_none(), "{t:?} inside {r:?}");
    }
}

#[test]
fn three_bars_with_matching_heights() {
    // plot height 450 for y_max 100: 40/80/120 px
    let values = [40.0, 80.0, 120.0]
        .map(|h| vec![h / 450.0 * 100.0])
        .to_vec();
    let (rgb, gray, truth) = textless(&simple_spec(values));
    let (_, bars) = extract(&rgb, &gray);
    assert_eq!(
        bars.iter().map(|b| b.height).collect::<Vec<_>>(),
        vec![40, 80, 120]
    );
    assert_bars_match(&bars, &truth);
}

#[test]
fn empty_and_floating_regions_give_no_bars() {
    let p = params();
    let (_, gray, _) = textless(&simple_spec(vec![vec![30.0]]));
    let axes = detect_axes(&gray, &p).unwrap();
    let empty = BinaryImage::new(100, 80);
    assert!(detect_bars(&empty, &axes, (0, 0), &p).is_empty());
    let r = axes.plot_rect;
    let floating = BinaryImage::from_fn(r.w, r.h, |x, y| {
        (20..60).contains(&x) && (10..r.h - 30).contains(&y)
    });
    assert!(detect_bars(&floating, &axes, (r.x, r.y), &p).is_empty());
    let grounded = BinaryImage::from_fn(r.w, r.h, |x, y| {
        (20..60).contains(&x) && (10..r.h).contains(&y)
    });
    let bars = detect_bars(&grounded, &axes, (r.x, r.y), &p);
    assert_eq!(bars.len(), 1);
    assert_eq!(
        (bars[0].x_left, bars[0].x_right, bars[0].height),
        (r.x + 20, r.x + 59, r.h - 10)
    );
}

#[test]
fn alternating_series_alternate_groups() {
    let (rgb, gray, truth) = textless(&simple_spec(vec![
        vec![30.0, 60.0],
        vec![45.0, 90.0],
        vec![20.0, 10.0],
    ]));
    let (_, bars) = extract(&rgb, &gray);
    assert_bars_match(&bars, &truth);
    assert_eq!(
        bars.iter().map(|b| b.group_id).collect::<Vec<_>>(),
        vec![0, 1, 0, 1, 0, 1]
    );
}

#[test]
fn identical_bars_share_one_group() {
    let (rgb, gray, _) = textless(&simple_spec(vec![vec![50.0]; 4]));
    let (_, bars) = extract(&rgb, &gray);
    assert_eq!(bars.len(), 4);
    assert!(bars.iter().all(|b| b.group_id == 0));
}

#[test]
fn hatching_separates_same_colour() {
    let mut spec = simple_spec(vec![vec![30.0, 60.0], vec![45.0, 90.0]]);
    spec.colors = vec![spec.colors[0]; 2];
    spec.flags.hatching = true;
    let (rgb, gray, truth) = textless(&spec);
    let (_, bars) = extract(&rgb, &gray);
    assert_bars_match(&bars, &truth);
    assert_eq!(
        bars.iter().map(|b| b.group_id).collect::<Vec<_>>(),
        vec![0, 1, 0, 1]
    );
}

#[test]
fn grouping_ignores_input_order() {
    let (rgb, gray, _) = textless(&simple_spec(vec![
        vec![30.0, 60.0, 10.0],
        vec![45.0, 90.0, 70.0],
    ]));
    let (_, bars) = extract(&rgb, &gray);
    let mut shuffled = bars.clone();
    shuffled.reverse();
    let regrouped = group_bars(&rgb, shuffled, &params());
    assert_eq!(regrouped, bars);
    let mut ids: Vec<usize> = bars.iter().map(|b| b.group_id).collect();
    ids.dedup();
    assert_eq!(*ids.iter().max().unwrap(), 2);
}

#[test]
fn gate_accepts_charts_and_rejects_others() {
    let p = params();
    let (_, gray, _) = textless(&simple_spec(vec![vec![30.0], vec![70.0], vec![50.0]]));
    let (ok, score) = gate_bar_chart(&gray, &p);
    assert!(ok);
    assert!((score - 0.75).abs() < 1e-12);
    let blank = crate::imgproc::GrayImage::filled(400, 300, 255);
    assert_eq!(gate_bar_chart(&blank, &p), (false, 0.0));

    // axes with a scatter of small dots instead of bars
    let (_, mut scatter, truth) = textless(&simple_spec(vec![vec![0.0], vec![0.0]]));
    let r = truth.axes.plot_rect;
    for i in 0..25u32 {
        let (cx, cy) = (r.x + 20 + i * 25, r.y + 20 + (i * 37) % (r.h - 40));
        for dy in 0..4 {
            for dx in 0..4 {
                scatter.put(cx + dx, cy + dy, 0);
            }
        }
    }
    assert!(!gate_bar_chart(&scatter, &p).0);
}

#[test]
fn noise_free_corpus_sample_exact() {
    let ranges = CorpusRanges {
        noise: vec![0.0],
        ..CorpusRanges::default()
    };
    for spec in sample_specs(12, 99, &ranges) {
        let (rgb, gray, truth) = textless(&spec);
        let (axes, bars) = extract(&rgb, &gray);
        assert_axes_match(&axes, &truth);
        assert_bars_match(&bars, &truth);
        for b in &bars {
            let t = truth
                .bars
                .iter()
                .find(|t| t.rect.x.abs_diff(b.x_left) <= 2)
                .unwrap();
            assert_eq!(b.group_id, t.series, "{b:?}");
        }
    }
}

#[test]
fn noisy_chart_bars_found() {
    let mut spec = simple_spec(vec![vec![30.0, 60.0], vec![45.0, 90.0], vec![75.0, 15.0]]);
    spec.noise = 0.02;
    let (rgb, gray, truth) = textless(&spec);
    let (axes, bars) = extract(&rgb, &gray);
    assert_axes_match(&axes, &truth);
    assert_bars_match(&bars, &truth);
    assert_eq!(
        bars.iter().map(|b| b.group_id).collect::<Vec<_>>(),
        vec![0, 1, 0, 1, 0, 1]
    );
}

#[test]
fn single_chart_is_one_panel() {
    let (rgb, _) = render(&simple_spec(vec![vec![30.0], vec![70.0]])).unwrap();
    let panels = segment_panels(&to_grayscale(&rgb), &params());
    assert_eq!(panels.len(), 1);
    let b = panels[0].bbox;
    assert!(b.area() as f64 > 0.8 * 800.0 * 600.0, "{b:?}");
}

#[test]
fn side_by_side_charts_split_at_the_gutter() {
    let mut spec = simple_spec(vec![vec![30.0], vec![70.0]]);
    spec.canvas = (380, 400);
    let (left, _) = render(&spec).unwrap();
    spec.values = vec![vec![60.0], vec![20.0], vec![40.0]];
    spec.x_tick_labels = vec!["A".into(), "B".into(), "C".into()];
    let (right, _) = render(&spec).unwrap();
    let gutter = 40;
    let mut page = RgbImage::new(800, 400);
    for y in 0..400 {
        for x in 0..380 {
            page.put(x, y, left.get(x, y));
            page.put(x + 380 + gutter, y, right.get(x, y));
        }
    }
    let panels = segment_panels(&to_grayscale(&page), &params());
    assert_eq!(panels.len(), 2, "{panels:?}");
    assert!(panels[0].bbox.right() <= 380);
    assert!(panels[1].bbox.x >= 380 + gutter);
    for (a, b) in [(0, 1), (1, 0)] {
        assert!(!panels[a].bbox.encloses(&panels[b].bbox));
    }
}

#[test]
fn blank_or_speckled_page_has_no_panels() {
    let blank = crate::imgproc::GrayImage::filled(200, 200, 255);
    assert!(segment_panels(&blank, &params()).is_empty());
    let specks = crate::imgproc::GrayImage::from_fn(400, 400, |x, y| {
        if x % 97 < 3 && y % 89 < 3 {
            0
        } else {
            255
        }
    });
    assert!(segment_panels(&specks, &params()).is_empty());
    let _ = Rect::default();
}
