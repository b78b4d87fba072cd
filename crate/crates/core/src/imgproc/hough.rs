//! Progressive probabilistic Hough transform for finite line segments.

use super::BinaryImage;
use crate::Point;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const HOUGH_SEED: u64 = 0x5eed_1ee7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineSegment {
    pub p0: Point,
    pub p1: Point,
    pub length: f64,
}

impl LineSegment {
    pub fn new(p0: Point, p1: Point) -> Self {
        let length = (((p1.x - p0.x).pow(2) + (p1.y - p0.y).pow(2)) as f64).sqrt();
        Self { p0, p1, length }
    }

    /// Direction in degrees, folded into `[0, 180)`; 0 is horizontal, 90 vertical.
    pub fn angle_deg(&self) -> f64 {
        ((self.p1.y - self.p0.y) as f64)
            .atan2((self.p1.x - self.p0.x) as f64)
            .to_degrees()
            .rem_euclid(180.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoughParams {
    /// Accumulator votes needed before a line is followed.
    pub votes: u32,
    pub min_len: f64,
    /// Longest run of missing pixels tolerated inside one segment.
    pub max_gap: u32,
}

impl HoughParams {
    /// 50 votes, `min_len = 0.3 * min(w, h)`, gap 5.
    pub fn for_size(width: u32, height: u32) -> Self {
        Self {
            votes: 50,
            min_len: 0.3 * width.min(height) as f64,
            max_gap: 5,
        }
    }
}

/// Segments sorted by length, longest first. Point sampling order comes from
/// a fixed seed, so identical inputs give identical output. Accumulator
/// resolution is 1 px in rho and 1 degree in theta.
///
/// Segment following tolerates one pixel of lateral drift per step from the
/// accumulator's quantised direction (capped at 5% of the distance walked),
/// which keeps long one-pixel lines intact despite the 1-degree bins.
pub fn hough_lines(edges: &BinaryImage, params: HoughParams) -> Vec<LineSegment> {
    let (w, h) = edges.dimensions();
    let (wi, hi) = (w as i64, h as i64);
    let mut points: Vec<(i64, i64)> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if edges.get(x, y) {
                points.push((x as i64, y as i64));
            }
        }
    }
    if points.is_empty() {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(HOUGH_SEED);
    points.shuffle(&mut rng);

    let num_angle = 180usize;
    let trig: Vec<(f64, f64)> = (0..num_angle)
        .map(|n| (n as f64).to_radians().sin_cos())
        .map(|(s, c)| (c, s))
        .collect();
    let max_rho = (w + h) as i64;
    let num_rho = (2 * max_rho + 1) as usize;
    let rho_index = |x: i64, y: i64, n: usize| {
        let (c, s) = trig[n];
        ((x as f64 * c + y as f64 * s).round() as i64 + max_rho) as usize
    };
    let mut acc = vec![0i32; num_angle * num_rho];
    let mut mask: Vec<u8> = edges.as_raw().to_vec();
    let mut voted = vec![false; mask.len()];
    let idx = |x: i64, y: i64| (y * wi + x) as usize;
    let threshold = params.votes.max(1) as i32;
    let mut segments = Vec::new();

    for &(px, py) in &points {
        if mask[idx(px, py)] == 0 {
            continue;
        }
        let mut best = (threshold - 1, usize::MAX);
        for n in 0..num_angle {
            let cell = &mut acc[n * num_rho + rho_index(px, py, n)];
            *cell += 1;
            if *cell > best.0 {
                best = (*cell, n);
            }
        }
        voted[idx(px, py)] = true;
        if best.1 == usize::MAX {
            continue;
        }
        // unit direction along the line (normal is at angle n)
        let (c, s) = trig[best.1];
        let (dx, dy) = (-s, c);
        let mut ends = [(px, py); 2];
        let mut paths: [Vec<(i64, i64)>; 2] = [Vec::new(), Vec::new()];
        for (k, sign) in [1.0f64, -1.0].into_iter().enumerate() {
            let (sx, sy) = (dx * sign, dy * sign);
            let mut lateral = 0i64;
            let mut gap = 0u32;
            let mut step = 0i64;
            loop {
                step += 1;
                let bx = px as f64 + sx * step as f64;
                let by = py as f64 + sy * step as f64;
                // perpendicular unit offset, snapped to the dominant axis
                let (ox, oy) = if sx.abs() > sy.abs() { (0, 1) } else { (1, 0) };
                let cx = bx.round() as i64 + ox * lateral;
                let cy = by.round() as i64 + oy * lateral;
                if cx < 0 || cy < 0 || cx >= wi || cy >= hi {
                    break;
                }
                let cap = 1 + step / 20;
                let hit = [0i64, -1, 1].into_iter().find_map(|d| {
                    let (qx, qy) = (cx + ox * d, cy + oy * d);
                    let ok = qx >= 0 && qy >= 0 && qx < wi && qy < hi && (lateral + d).abs() <= cap;
                    (ok && mask[idx(qx, qy)] != 0).then_some((d, qx, qy))
                });
                match hit {
                    Some((d, qx, qy)) => {
                        lateral += d;
                        gap = 0;
                        ends[k] = (qx, qy);
                        paths[k].push((qx, qy));
                    }
                    None => {
                        gap += 1;
                        if gap > params.max_gap {
                            break;
                        }
                    }
                }
            }
        }
        let seg = LineSegment::new(
            Point::new(ends[1].0 as i32, ends[1].1 as i32),
            Point::new(ends[0].0 as i32, ends[0].1 as i32),
        );
        if seg.length < params.min_len {
            continue;
        }
        // retire the segment's pixels and withdraw the votes they cast
        for &(qx, qy) in std::iter::once(&(px, py))
            .chain(paths[0].iter())
            .chain(paths[1].iter())
        {
            let i = idx(qx, qy);
            if mask[i] == 0 {
                continue;
            }
            mask[i] = 0;
            if voted[i] {
                for n in 0..num_angle {
                    acc[n * num_rho + rho_index(qx, qy, n)] -= 1;
                }
            }
        }
        segments.push(seg);
    }
    segments.sort_by(|a, b| {
        b.length
            .total_cmp(&a.length)
            .then((a.p0.y, a.p0.x, a.p1.y, a.p1.x).cmp(&(b.p0.y, b.p0.x, b.p1.y, b.p1.x)))
    });
    segments
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> HoughParams {
        HoughParams {
            votes: 50,
            min_len: 60.0,
            max_gap: 5,
        }
    }

    #[test]
    fn empty_map_gives_nothing() {
        assert!(hough_lines(&BinaryImage::new(50, 50), params()).is_empty());
    }

    #[test]
    fn horizontal_row() {
        let img = BinaryImage::from_fn(240, 60, |x, y| y == 30 && (20..220).contains(&x));
        let segs = hough_lines(&img, params());
        assert_eq!(segs.len(), 1, "{segs:?}");
        assert!((segs[0].length - 200.0).abs() <= 2.0);
        let a = segs[0].angle_deg();
        assert!(a <= 1.0 || a >= 179.0, "{a}");
    }

    #[test]
    fn l_shape() {
        let img = BinaryImage::from_fn(200, 200, |x, y| {
            (x == 20 && (20..180).contains(&y)) || (y == 179 && (20..190).contains(&x))
        });
        let segs = hough_lines(&img, params());
        assert_eq!(segs.len(), 2, "{segs:?}");
        let mut angles: Vec<f64> = segs.iter().map(|s| s.angle_deg()).collect();
        angles.iter_mut().for_each(|a| {
            if *a > 179.0 {
                *a -= 180.0
            }
        });
        angles.sort_by(f64::total_cmp);
        assert!(
            angles[0].abs() <= 1.0 && (angles[1] - 90.0).abs() <= 1.0,
            "{angles:?}"
        );
    }

    #[test]
    fn deterministic() {
        let img = BinaryImage::from_fn(120, 120, |x, y| (x * 7 + y * 3) % 11 == 0 || y == 60);
        let p = HoughParams {
            votes: 20,
            min_len: 20.0,
            max_gap: 3,
        };
        assert_eq!(hough_lines(&img, p), hough_lines(&img, p));
    }
}
