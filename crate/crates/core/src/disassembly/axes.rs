use super::{DisassemblyError, DisassemblyParams};
use crate::imgproc::{
    adaptive_threshold, canny, default_window, gaussian_blur, hough_lines, morphological_close,
    remove_small_components, BinaryImage, CannyThresholds, GrayImage, HoughParams, LineSegment,
};
use crate::{Point, Rect};
use serde::{Deserialize, Serialize};

/// Snapping looks this many pixels either side of a Hough line for the
/// stroke itself.
const SNAP_REACH: i64 = 4;
/// Share of a row or column that must be dark for it to count as the stroke.
const SNAP_COVERAGE: f64 = 0.8;
/// Longest run of missing stroke cells bridged when extending an axis.
const MAX_GAP: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axes {
    /// Top row of the horizontal stroke, left to right.
    pub x_axis: LineSegment,
    /// Rightmost column of the vertical stroke, top to bottom.
    pub y_axis: LineSegment,
    /// Corner where the two strokes meet: `(y-axis column, x-axis row)`.
    pub origin: Point,
    /// Interior strictly above the x-axis and right of the y-axis.
    pub plot_rect: Rect,
}

impl Axes {
    /// Build axes from the stroke positions and their far ends.
    pub fn from_corner(origin: Point, x_end: i32, y_top: i32, x_start: i32, y_bottom: i32) -> Self {
        let x_axis = LineSegment::new(Point::new(x_start, origin.y), Point::new(x_end, origin.y));
        let y_axis = LineSegment::new(Point::new(origin.x, y_top), Point::new(origin.x, y_bottom));
        let plot_rect = Rect::new(
            (origin.x + 1).max(0) as u32,
            y_top.max(0) as u32,
            (x_end - origin.x).max(1) as u32,
            (origin.y - y_top).max(1) as u32,
        );
        Self {
            x_axis,
            y_axis,
            origin,
            plot_rect,
        }
    }
}

/// Edge map the axis search runs on: blur, local threshold, specks removed,
/// small gaps closed, then Canny.
pub fn axis_edge_map(panel_no_text: &GrayImage, params: &DisassemblyParams) -> BinaryImage {
    let blurred = gaussian_blur(panel_no_text, params.blur_kernel);
    let window = match params.adaptive_window {
        0 => default_window(panel_no_text.width()),
        w => w,
    };
    let bin = adaptive_threshold(&blurred, window, params.adaptive_t_pct);
    let bin = remove_small_components(&bin, params.speck_area);
    let bin = morphological_close(&bin, params.close_kernel);
    canny(&bin.to_gray(), CannyThresholds::Auto)
}

fn is_horizontal(s: &LineSegment, tol: f64) -> bool {
    let a = s.angle_deg();
    a <= tol || a >= 180.0 - tol
}

fn is_vertical(s: &LineSegment, tol: f64) -> bool {
    (s.angle_deg() - 90.0).abs() <= tol
}

fn dist(a: Point, b: Point) -> f64 {
    (((a.x - b.x).pow(2) + (a.y - b.y).pow(2)) as f64).sqrt()
}

/// Locate the x- and y-axis of a panel whose text has been whitened.
///
/// Among Hough segments, a near-horizontal and a near-vertical one whose
/// closest endpoints (the horizontal's left end and the vertical's bottom
/// end) lie within the endpoint tolerance form a candidate corner; the pair
/// with the largest summed length wins. The winning lines are then snapped
/// to the dark stroke they trace and extended along it.
pub fn detect_axes(
    panel_no_text: &GrayImage,
    params: &DisassemblyParams,
) -> Result<Axes, DisassemblyError> {
    let (w, h) = panel_no_text.dimensions();
    if w < 3 || h < 3 {
        return Err(DisassemblyError::NoAxes);
    }
    let edges = axis_edge_map(panel_no_text, params);
    let hough = HoughParams {
        votes: params.hough_votes,
        min_len: params.hough_min_len_fraction * w.min(h) as f64,
        max_gap: params.hough_max_gap,
    };
    let lines = hough_lines(&edges, hough);
    let tol = params.axis_angle_tol_deg;
    let horizontals: Vec<LineSegment> = lines
        .iter()
        .filter(|s| is_horizontal(s, tol))
        .map(|s| {
            if s.p0.x <= s.p1.x {
                *s
            } else {
                LineSegment::new(s.p1, s.p0)
            }
        })
        .collect();
    let verticals: Vec<LineSegment> = lines
        .iter()
        .filter(|s| is_vertical(s, tol))
        .map(|s| {
            if s.p0.y <= s.p1.y {
                *s
            } else {
                LineSegment::new(s.p1, s.p0)
            }
        })
        .collect();

    let mut best: Option<(f64, LineSegment, LineSegment)> = None;
    for hs in &horizontals {
        for vs in &verticals {
            if dist(hs.p0, vs.p1) > params.axis_endpoint_tol as f64 {
                continue;
            }
            let score = hs.length + vs.length;
            if best.as_ref().is_none_or(|b| score > b.0) {
                best = Some((score, *hs, *vs));
            }
        }
    }
    let (_, hs, vs) = best.ok_or(DisassemblyError::NoAxes)?;
    Ok(snap(panel_no_text, &hs, &vs, params.axis_dark_level))
}

fn snap(img: &GrayImage, hs: &LineSegment, vs: &LineSegment, dark_level: u8) -> Axes {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let dark = |x: i64, y: i64| {
        x >= 0 && y >= 0 && x < w && y < h && img.get(x as u32, y as u32) < dark_level
    };
    let coverage = |cells: &mut dyn Iterator<Item = (i64, i64)>| {
        let (mut n, mut d) = (0usize, 0usize);
        for (x, y) in cells {
            n += 1;
            d += dark(x, y) as usize;
        }
        n > 0 && d as f64 >= SNAP_COVERAGE * n as f64
    };

    let (hx0, hx1) = (hs.p0.x.min(hs.p1.x) as i64, hs.p0.x.max(hs.p1.x) as i64);
    let hy = ((hs.p0.y + hs.p1.y) as f64 / 2.0).round() as i64;
    let (vy0, vy1) = (vs.p0.y.min(vs.p1.y) as i64, vs.p0.y.max(vs.p1.y) as i64);
    let vx = ((vs.p0.x + vs.p1.x) as f64 / 2.0).round() as i64;

    // topmost fully dark row, rightmost fully dark column
    let row = (hy - SNAP_REACH..=hy + SNAP_REACH)
        .find(|&y| coverage(&mut (hx0..=hx1).map(|x| (x, y))))
        .unwrap_or(hy);
    let col = (vx - SNAP_REACH..=vx + SNAP_REACH)
        .rev()
        .find(|&x| coverage(&mut (vy0..=vy1).map(|y| (x, y))))
        .unwrap_or(vx);

    // a stroke cell is dark when either of the two outermost lines of the
    // stroke is dark there; it counts when a neighbour along the stroke is
    // dark too, which keeps isolated specks from extending it
    let cell = |x: i64, y: i64, dx: i64, dy: i64| dark(x, y) || dark(x - dy.abs(), y + dx.abs());
    let solid = |x: i64, y: i64, dx: i64, dy: i64| {
        cell(x, y, dx, dy) && (cell(x - dx, y - dy, dx, dy) || cell(x + dx, y + dy, dx, dy))
    };
    let reach = |x: i64, y: i64, dx: i64, dy: i64, fallback: i64| {
        let (mut cx, mut cy) = (x, y);
        let mut end = None;
        let mut gap = 0;
        while cx >= 0 && cy >= 0 && cx < w && cy < h {
            if solid(cx, cy, dx, dy) {
                end = Some(if dx != 0 { cx } else { cy });
                gap = 0;
            } else {
                gap += 1;
                if gap > MAX_GAP {
                    break;
                }
            }
            cx += dx;
            cy += dy;
        }
        end.unwrap_or(fallback)
    };
    let x_start = reach(col, row, -1, 0, hx0.min(col));
    let x_end = reach(col, row, 1, 0, hx1);
    let y_top = reach(col, row, 0, -1, vy0);
    let y_bottom = reach(col, row, 0, 1, vy1.max(row));
    Axes::from_corner(
        Point::new(col as i32, row as i32),
        x_end as i32,
        y_top as i32,
        x_start as i32,
        y_bottom as i32,
    )
}

/// Cut out the plot interior; the offset maps crop pixels back to the panel.
pub fn crop_plot(panel: &GrayImage, axes: &Axes) -> (GrayImage, (u32, u32)) {
    let r = axes.plot_rect;
    (panel.crop(r), (r.x, r.y))
}
