//! Outer-border following and polygonal corner approximation.

use super::{connected_components, BinaryImage};
use crate::{Point, Rect};

/// Outer border of one 8-connected foreground component.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    /// Boundary pixels in tracing order (clockwise on screen); the last
    /// point is 8-adjacent to the first.
    pub boundary: Vec<Point>,
    pub bbox: Rect,
    /// Filled pixel count of the component (holes excluded).
    pub area: u64,
    /// `area / bbox.area()`, in `(0, 1]`.
    pub fill_ratio: f64,
}

// clockwise on screen, starting west
const DIRS: [(i32, i32); 8] = [
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
];

/// One outer contour per foreground component, ordered by the raster position
/// of each component's top-left boundary pixel.
pub fn find_contours(img: &BinaryImage) -> Vec<Contour> {
    let lm = connected_components(img);
    if lm.count == 0 {
        return Vec::new();
    }
    let areas = lm.areas();
    let boxes = lm.bounding_boxes();
    let mut starts = vec![None; lm.count as usize];
    for y in 0..lm.height {
        for x in 0..lm.width {
            let l = lm.label(x, y);
            if l > 0 && starts[l as usize - 1].is_none() {
                starts[l as usize - 1] = Some(Point::new(x as i32, y as i32));
            }
        }
    }
    let (w, h) = (lm.width as i32, lm.height as i32);
    starts
        .into_iter()
        .enumerate()
        .map(|(i, start)| {
            let label = i as u32 + 1;
            let inside = |p: Point| {
                p.x >= 0
                    && p.y >= 0
                    && p.x < w
                    && p.y < h
                    && lm.label(p.x as u32, p.y as u32) == label
            };
            let boundary = trace(start.expect("every label has a pixel"), areas[i], inside);
            Contour {
                boundary,
                bbox: boxes[i],
                area: areas[i],
                fill_ratio: areas[i] as f64 / boxes[i].area() as f64,
            }
        })
        .collect()
}

/// Moore-neighbour tracing with Jacob's stopping criterion.
fn trace(start: Point, area: u64, inside: impl Fn(Point) -> bool) -> Vec<Point> {
    let mut boundary = vec![start];
    let step = |p: Point, search: usize| -> Option<(Point, usize)> {
        (0..8).map(|k| (search + k) % 8).find_map(|d| {
            let n = Point::new(p.x + DIRS[d].0, p.y + DIRS[d].1);
            inside(n).then_some((n, d))
        })
    };
    let Some((mut cur, first_dir)) = step(start, 0) else {
        return boundary;
    };
    let mut search = (first_dir + 6) % 8;
    let limit = 4 * area as usize + 16;
    while boundary.len() <= limit {
        if cur == start {
            if let Some((_, d)) = step(cur, search) {
                if d == first_dir {
                    break;
                }
            }
        }
        boundary.push(cur);
        let (next, d) = step(cur, search).expect("connected component");
        cur = next;
        search = (d + 6) % 8;
    }
    boundary
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (px, py) = (p.x as f64, p.y as f64);
    let (ax, ay) = (a.x as f64, a.y as f64);
    let (bx, by) = (b.x as f64, b.y as f64);
    let (dx, dy) = (bx - ax, by - ay);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return ((px - ax).powi(2) + (py - ay).powi(2)).sqrt();
    }
    let t = (((px - ax) * dx + (py - ay) * dy) / len2).clamp(0.0, 1.0);
    ((px - ax - t * dx).powi(2) + (py - ay - t * dy).powi(2)).sqrt()
}

fn douglas_peucker(pts: &[Point], lo: usize, hi: usize, epsilon: f64, out: &mut Vec<usize>) {
    // emits every kept index in [lo, hi) ; `hi` may equal pts.len() (wraps to 0)
    let at = |i: usize| pts[i % pts.len()];
    if hi - lo < 2 {
        out.push(lo);
        return;
    }
    let (a, b) = (at(lo), at(hi));
    let (idx, dist) = (lo + 1..hi)
        .map(|i| (i, segment_distance(at(i), a, b)))
        .fold(
            (lo, -1.0),
            |best, cur| if cur.1 > best.1 { cur } else { best },
        );
    if dist > epsilon {
        douglas_peucker(pts, lo, idx, epsilon, out);
        douglas_peucker(pts, idx, hi, epsilon, out);
    } else {
        out.push(lo);
    }
}

/// Polygonal approximation of a closed contour by iterative end-point fit.
/// Every boundary point lies within `epsilon` of the returned polygon;
/// contours with fewer than three points are returned as they are.
pub fn approx_corners(c: &Contour, epsilon: f64) -> Vec<Point> {
    let pts = &c.boundary;
    let n = pts.len();
    if n < 3 {
        return pts.clone();
    }
    let epsilon = epsilon.max(0.0);
    let d2 = |i: usize| (pts[i].x - pts[0].x).pow(2) + (pts[i].y - pts[0].y).pow(2);
    let far = (1..n).fold(1, |best, i| if d2(i) > d2(best) { i } else { best });
    let mut poly = Vec::new();
    douglas_peucker(pts, 0, far, epsilon, &mut poly);
    douglas_peucker(pts, far, n, epsilon, &mut poly);
    // the start pixel is an arbitrary split point; drop it (and any other
    // vertex) while the chord across it stays within epsilon of the run it covers
    while poly.len() > 3 {
        let k = poly.len();
        let removable = (0..k).find(|&i| {
            let prev = poly[(i + k - 1) % k];
            let next = poly[(i + 1) % k];
            let end = if next > prev { next } else { next + n };
            (prev..=end).all(|j| segment_distance(pts[j % n], pts[prev], pts[next]) <= epsilon)
        });
        match removable {
            Some(i) => {
                poly.remove(i);
            }
            None => break,
        }
    }
    poly.into_iter().map(|i| pts[i]).collect()
}
