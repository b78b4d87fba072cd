use super::{BinaryImage, GrayImage};

/// Hysteresis thresholds on Sobel gradient magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CannyThresholds {
    /// `low = 0.66 m`, `high = 1.33 m` for the median intensity `m`, clamped to `0..=255`.
    Auto,
    Manual {
        low: f32,
        high: f32,
    },
}

impl CannyThresholds {
    fn resolve(self, img: &GrayImage) -> (f32, f32) {
        match self {
            CannyThresholds::Manual { low, high } => (low.min(high), high.max(low)),
            CannyThresholds::Auto => {
                let mut hist = [0usize; 256];
                for &p in img.as_raw() {
                    hist[p as usize] += 1;
                }
                let half = img.as_raw().len().div_ceil(2);
                let mut acc = 0;
                let median = hist
                    .iter()
                    .position(|&c| {
                        acc += c;
                        acc >= half
                    })
                    .unwrap_or(0) as f32;
                (
                    (0.66 * median).clamp(0.0, 255.0),
                    (1.33 * median).clamp(0.0, 255.0),
                )
            }
        }
    }
}

/// Canny edge detector: Sobel gradients, non-maximum suppression along the
/// quantised gradient direction, then hysteresis with 8-connected linking.
pub fn canny(img: &GrayImage, thresholds: CannyThresholds) -> BinaryImage {
    let (low, high) = thresholds.resolve(img);
    let (w, h) = img.dimensions();
    let (wi, hi) = (w as i64, h as i64);
    let n = w as usize * h as usize;
    let mut mag = vec![0f32; n];
    let mut dir = vec![0u8; n];
    for y in 0..hi {
        for x in 0..wi {
            let p = |dx: i64, dy: i64| img.get_clamped(x + dx, y + dy) as f32;
            let gx = (p(1, -1) + 2.0 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
            let gy = (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
            let i = (y * wi + x) as usize;
            mag[i] = (gx * gx + gy * gy).sqrt();
            // 0: horizontal gradient, 1: 45deg, 2: vertical, 3: 135deg
            let angle = gy.atan2(gx).to_degrees().rem_euclid(180.0);
            dir[i] = if !(22.5..157.5).contains(&angle) {
                0
            } else if angle < 67.5 {
                1
            } else if angle < 112.5 {
                2
            } else {
                3
            };
        }
    }
    let at = |x: i64, y: i64| {
        if x < 0 || y < 0 || x >= wi || y >= hi {
            0.0
        } else {
            mag[(y * wi + x) as usize]
        }
    };
    // 0: not an edge, 1: weak, 2: strong
    let mut class = vec![0u8; n];
    for y in 0..hi {
        for x in 0..wi {
            let i = (y * wi + x) as usize;
            let m = mag[i];
            if m <= 0.0 || m < low {
                continue;
            }
            let (dx, dy) = match dir[i] {
                0 => (1, 0),
                1 => (1, 1),
                2 => (0, 1),
                _ => (-1, 1),
            };
            // ">= before, > after" keeps exactly one pixel of a symmetric ridge
            if m >= at(x - dx, y - dy) && m > at(x + dx, y + dy) {
                class[i] = if m >= high { 2 } else { 1 };
            }
        }
    }
    let mut out = BinaryImage::new(w, h);
    let mut stack: Vec<(i64, i64)> = Vec::new();
    for y in 0..hi {
        for x in 0..wi {
            if class[(y * wi + x) as usize] == 2 && !out.get(x as u32, y as u32) {
                out.set(x as u32, y as u32, true);
                stack.push((x, y));
                while let Some((cx, cy)) = stack.pop() {
                    for (dx, dy) in super::components::NEIGHBOURS_8 {
                        let (nx, ny) = (cx + dx, cy + dy);
                        if nx < 0 || ny < 0 || nx >= wi || ny >= hi {
                            continue;
                        }
                        if class[(ny * wi + nx) as usize] > 0 && !out.get(nx as u32, ny as u32) {
                            out.set(nx as u32, ny as u32, true);
                            stack.push((nx, ny));
                        }
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_image_has_no_edges() {
        let img = GrayImage::filled(20, 20, 77);
        assert_eq!(canny(&img, CannyThresholds::Auto).count_ones(), 0);
        assert_eq!(
            canny(
                &img,
                CannyThresholds::Manual {
                    low: 0.0,
                    high: 0.0
                }
            )
            .count_ones(),
            0
        );
    }

    #[test]
    fn vertical_step_gives_single_pixel_line() {
        let img = GrayImage::from_fn(20, 16, |x, _| if x < 10 { 0 } else { 255 });
        let e = canny(&img, CannyThresholds::Auto);
        for y in 0..16 {
            let cols: Vec<u32> = (0..20).filter(|&x| e.get(x, y)).collect();
            assert_eq!(cols.len(), 1, "row {y}: {cols:?}");
            assert!(cols[0] == 9 || cols[0] == 10);
        }
    }

    #[test]
    fn rectangle_edges_follow_perimeter() {
        let img = GrayImage::from_fn(60, 50, |x, y| {
            if (15..45).contains(&x) && (10..40).contains(&y) {
                0
            } else {
                255
            }
        });
        let e = canny(&img, CannyThresholds::Auto);
        // every edge pixel sits within 2 px of the rectangle boundary
        let dist = |x: i64, y: i64| {
            let dx = if x < 15 {
                15 - x
            } else if x > 44 {
                x - 44
            } else {
                0
            };
            let dy = if y < 10 {
                10 - y
            } else if y > 39 {
                y - 39
            } else {
                0
            };
            let inside = dx == 0 && dy == 0;
            if inside {
                (x - 15).min(44 - x).min(y - 10).min(39 - y)
            } else {
                dx.max(dy)
            }
        };
        let mut count = 0;
        for y in 0..50 {
            for x in 0..60 {
                if e.get(x, y) {
                    count += 1;
                    assert!(dist(x as i64, y as i64) <= 2, "({x},{y})");
                }
            }
        }
        // one pixel per boundary position, give or take the corners
        assert!((count as i64 - 116).abs() <= 8, "{count}");
    }
}
