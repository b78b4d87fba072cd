//! Global (Otsu) and local (integral-image) thresholding.

use super::{BinaryImage, GrayImage};

/// Between-class variance of the split `{< t} | {>= t}` of a 256-bin histogram.
/// Zero when either class is empty.
pub fn between_class_variance(hist: &[u64; 256], t: usize) -> f64 {
    let (mut n0, mut s0, mut n, mut s) = (0u64, 0u64, 0u64, 0u64);
    for (i, &c) in hist.iter().enumerate() {
        if i < t {
            n0 += c;
            s0 += c * i as u64;
        }
        n += c;
        s += c * i as u64;
    }
    variance_from_sums(n0, s0, n, s)
}

fn variance_from_sums(n0: u64, s0: u64, n: u64, s: u64) -> f64 {
    let n1 = n - n0;
    if n0 == 0 || n1 == 0 {
        return 0.0;
    }
    let w0 = n0 as f64 / n as f64;
    let w1 = n1 as f64 / n as f64;
    let m0 = s0 as f64 / n0 as f64;
    let m1 = (s - s0) as f64 / n1 as f64;
    w0 * w1 * (m0 - m1) * (m0 - m1)
}

fn histogram(img: &GrayImage) -> [u64; 256] {
    let mut hist = [0u64; 256];
    for &p in img.as_raw() {
        hist[p as usize] += 1;
    }
    hist
}

/// Otsu threshold: the smallest `t` in `0..=255` maximising the between-class
/// variance. A uniform image yields its own intensity.
pub fn otsu_threshold(img: &GrayImage) -> u8 {
    let hist = histogram(img);
    let n: u64 = hist.iter().sum();
    let s: u64 = hist.iter().enumerate().map(|(i, &c)| c * i as u64).sum();
    if let Some(v) = hist.iter().position(|&c| c == n) {
        return v as u8;
    }
    let (mut n0, mut s0) = (0u64, 0u64);
    let mut best = (0usize, f64::NEG_INFINITY);
    for (t, &c) in hist.iter().enumerate() {
        let var = variance_from_sums(n0, s0, n, s);
        if var > best.1 {
            best = (t, var);
        }
        n0 += c;
        s0 += c * t as u64;
    }
    best.0 as u8
}

/// Otsu binarisation; pixels strictly below the threshold become foreground.
pub fn otsu_binarize(img: &GrayImage) -> (BinaryImage, u8) {
    let t = otsu_threshold(img);
    let bits = img.as_raw().iter().map(|&p| (p < t) as u8).collect();
    (
        BinaryImage::from_raw(img.width(), img.height(), bits).expect("same dims"),
        t,
    )
}

/// Summed-area table with inclusive sums: `at(x, y)` is the total over
/// `[0..=x] x [0..=y]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralImage {
    width: u32,
    height: u32,
    table: Vec<u64>,
}

impl IntegralImage {
    pub fn at(&self, x: u32, y: u32) -> u64 {
        self.table[y as usize * self.width as usize + x as usize]
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    /// Sum over the inclusive rectangle `[x0..=x1] x [y0..=y1]`.
    pub fn rect_sum(&self, x0: u32, y0: u32, x1: u32, y1: u32) -> u64 {
        let a = self.at(x1, y1);
        let b = if x0 > 0 { self.at(x0 - 1, y1) } else { 0 };
        let c = if y0 > 0 { self.at(x1, y0 - 1) } else { 0 };
        let d = if x0 > 0 && y0 > 0 {
            self.at(x0 - 1, y0 - 1)
        } else {
            0
        };
        a + d - b - c
    }
}

pub fn integral_image(img: &GrayImage) -> IntegralImage {
    let (w, h) = img.dimensions();
    let mut table = vec![0u64; w as usize * h as usize];
    for y in 0..h as usize {
        let mut row = 0u64;
        for x in 0..w as usize {
            row += img.as_raw()[y * w as usize + x] as u64;
            let above = if y > 0 {
                table[(y - 1) * w as usize + x]
            } else {
                0
            };
            table[y * w as usize + x] = above + row;
        }
    }
    IntegralImage {
        width: w,
        height: h,
        table,
    }
}

/// Local-mean thresholding over a `window`-sized square (clipped at the
/// border). A pixel is foreground when it is more than `t_pct` percent darker
/// than its window mean.
pub fn adaptive_threshold(img: &GrayImage, window: u32, t_pct: u32) -> BinaryImage {
    let window = window.max(3);
    let t_pct = t_pct.min(100) as u64;
    let (w, h) = img.dimensions();
    let ii = integral_image(img);
    let half = window / 2;
    let mut out = BinaryImage::new(w, h);
    for y in 0..h {
        let y0 = y.saturating_sub(half);
        let y1 = (y + half).min(h - 1);
        for x in 0..w {
            let x0 = x.saturating_sub(half);
            let x1 = (x + half).min(w - 1);
            let count = ((x1 - x0 + 1) * (y1 - y0 + 1)) as u64;
            let sum = ii.rect_sum(x0, y0, x1, y1);
            let p = img.get(x, y) as u64;
            if p * count * 100 < sum * (100 - t_pct) {
                out.set(x, y, true);
            }
        }
    }
    out
}

/// Default adaptive window: an eighth of the image width, at least 3.
pub fn default_window(width: u32) -> u32 {
    (width / 8).max(3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_image(rng: &mut ChaCha8Rng, w: u32, h: u32) -> GrayImage {
        GrayImage::from_fn(w, h, |_, _| rng.gen())
    }

    /// Class statistics enumerated directly over the pixels for every t.
    fn brute_force_otsu(img: &GrayImage) -> u8 {
        let px = img.as_raw();
        let mut best = (0u32, -1.0f64);
        for t in 0..=255u32 {
            let c0: Vec<f64> = px
                .iter()
                .filter(|&&p| (p as u32) < t)
                .map(|&p| p as f64)
                .collect();
            let c1: Vec<f64> = px
                .iter()
                .filter(|&&p| (p as u32) >= t)
                .map(|&p| p as f64)
                .collect();
            let var = if c0.is_empty() || c1.is_empty() {
                0.0
            } else {
                let n = px.len() as f64;
                let m0 = c0.iter().sum::<f64>() / c0.len() as f64;
                let m1 = c1.iter().sum::<f64>() / c1.len() as f64;
                (c0.len() as f64 / n) * (c1.len() as f64 / n) * (m0 - m1) * (m0 - m1)
            };
            if var > best.1 {
                best = (t, var);
            }
        }
        best.0 as u8
    }

    #[test]
    fn otsu_two_levels() {
        let img = GrayImage::from_fn(8, 8, |x, _| if x < 3 { 50 } else { 200 });
        let (bin, t) = otsu_binarize(&img);
        assert!(t > 50 && t <= 200);
        assert_eq!(t, 51, "ties resolve to the smallest threshold");
        for y in 0..8 {
            for x in 0..8 {
                assert_eq!(bin.get(x, y), x < 3);
            }
        }
    }

    #[test]
    fn otsu_uniform_is_all_background() {
        let img = GrayImage::filled(5, 5, 128);
        let (bin, t) = otsu_binarize(&img);
        assert_eq!(t, 128);
        assert_eq!(bin.count_ones(), 0);
    }

    #[test]
    fn otsu_4x4_matches_brute_force() {
        let img = GrayImage::from_raw(
            4,
            4,
            vec![
                10, 12, 200, 210, 11, 13, 205, 220, 90, 100, 110, 240, 15, 17, 180, 250,
            ],
        )
        .unwrap();
        assert_eq!(otsu_threshold(&img), brute_force_otsu(&img));
    }

    #[test]
    fn otsu_random_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let img = random_image(&mut rng, 16, 16);
            assert_eq!(otsu_threshold(&img), brute_force_otsu(&img));
        }
    }

    #[test]
    fn integral_small_cases() {
        let one = GrayImage::from_raw(1, 1, vec![7]).unwrap();
        assert_eq!(integral_image(&one).at(0, 0), 7);
        let two = GrayImage::from_raw(2, 2, vec![1, 2, 3, 4]).unwrap();
        let ii = integral_image(&two);
        assert_eq!(ii.at(1, 1), 10);
        assert_eq!(ii.rect_sum(1, 0, 1, 1), 6);
    }

    #[test]
    fn integral_full_rect_is_total() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let img = random_image(&mut rng, 13, 9);
        let total: u64 = img.as_raw().iter().map(|&p| p as u64).sum();
        assert_eq!(integral_image(&img).rect_sum(0, 0, 12, 8), total);
    }

    #[test]
    fn adaptive_uniform_is_background() {
        let img = GrayImage::filled(20, 20, 90);
        assert_eq!(adaptive_threshold(&img, 5, 15).count_ones(), 0);
    }

    #[test]
    fn adaptive_handles_gradient() {
        // dark strokes drawn on a strong left-to-right gradient
        let img = GrayImage::from_fn(64, 32, |x, y| {
            let bg = 60 + x * 190 / 63;
            (if y == 16 || x % 16 == 8 {
                bg * 6 / 10
            } else {
                bg
            }) as u8
        });
        let bin = adaptive_threshold(&img, 9, 15);
        for x in 0..64 {
            assert!(bin.get(x, 16), "stroke at x={x}");
        }
        assert!(
            !bin.get(3, 3) && !bin.get(60, 3),
            "gradient background stays background"
        );
        // no global threshold separates these: right-hand strokes are lighter than left background
        assert!(img.get(56, 3) > img.get(0, 3));
    }
}
