use super::{GrayImage, RgbImage};

/// Normalised 1-D Gaussian weights for an odd `kernel` size, with
/// `sigma = 0.3 * ((kernel - 1) / 2 - 1) + 0.8`.
pub fn gaussian_kernel(kernel: u32) -> Vec<f64> {
    let k = kernel.max(1) | 1;
    if k == 1 {
        return vec![1.0];
    }
    let sigma = 0.3 * ((k as f64 - 1.0) / 2.0 - 1.0) + 0.8;
    let half = (k / 2) as i64;
    let mut w: Vec<f64> = (-half..=half)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= sum);
    w
}

/// Separable Gaussian blur with clamp-to-edge borders. `kernel` must be odd;
/// an even value is bumped to the next odd size.
pub fn gaussian_blur(img: &GrayImage, kernel: u32) -> GrayImage {
    let weights = gaussian_kernel(kernel);
    if weights.len() == 1 {
        return img.clone();
    }
    let half = (weights.len() / 2) as i64;
    let (w, h) = img.dimensions();
    let mut tmp = vec![0f64; w as usize * h as usize];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let acc: f64 = weights
                .iter()
                .enumerate()
                .map(|(i, wt)| wt * img.get_clamped(x + i as i64 - half, y) as f64)
                .sum();
            tmp[(y * w as i64 + x) as usize] = acc;
        }
    }
    let at = |x: i64, y: i64| {
        let cx = x.clamp(0, w as i64 - 1);
        let cy = y.clamp(0, h as i64 - 1);
        tmp[(cy * w as i64 + cx) as usize]
    };
    GrayImage::from_fn(w, h, |x, y| {
        let acc: f64 = weights
            .iter()
            .enumerate()
            .map(|(i, wt)| wt * at(x as i64, y as i64 + i as i64 - half))
            .sum();
        acc.round().clamp(0.0, 255.0) as u8
    })
}

/// Replace impulse noise: a pixel is an impulse when none of its eight
/// neighbours is within `tolerance` of it on every channel, or when only one
/// is and that neighbour is itself alike to nothing else. Impulses take the
/// per-channel median of their neighbours; everything else, including the
/// tips of one-pixel lines, is left untouched.
pub fn despeckle(img: &RgbImage, tolerance: u8) -> RgbImage {
    let (w, h) = img.dimensions();
    if w < 2 || h < 2 {
        return img.clone();
    }
    const OFFSETS: [(i64, i64); 8] = [
        (-1, -1),
        (0, -1),
        (1, -1),
        (-1, 0),
        (1, 0),
        (-1, 1),
        (0, 1),
        (1, 1),
    ];
    let alike = |a: [u8; 3], b: [u8; 3]| a.iter().zip(&b).all(|(x, y)| x.abs_diff(*y) <= tolerance);
    let at = |x: i64, y: i64| {
        img.get(
            x.clamp(0, w as i64 - 1) as u32,
            y.clamp(0, h as i64 - 1) as u32,
        )
    };
    let inside = |x: i64, y: i64| x >= 0 && y >= 0 && x < w as i64 && y < h as i64;
    // (count of alike in-image neighbours, index of the last one)
    let mut alike_count = vec![(0u8, usize::MAX); (w * h) as usize];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let c = at(x, y);
            let slot = &mut alike_count[(y as u32 * w + x as u32) as usize];
            for (dx, dy) in OFFSETS {
                let (nx, ny) = (x + dx, y + dy);
                if inside(nx, ny) && alike(c, at(nx, ny)) {
                    *slot = (slot.0 + 1, (ny as u32 * w + nx as u32) as usize);
                }
            }
        }
    }
    let mut out = img.clone();
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let (n, other) = alike_count[(y as u32 * w + x as u32) as usize];
            let impulse = n == 0 || (n == 1 && alike_count[other].0 == 1);
            if !impulse {
                continue;
            }
            let mut px = [0u8; 3];
            for (ch, p) in px.iter_mut().enumerate() {
                let mut v: Vec<u8> = OFFSETS
                    .iter()
                    .map(|(dx, dy)| at(x + dx, y + dy)[ch])
                    .collect();
                v.sort_unstable();
                *p = (v[3] as u16 + v[4] as u16).div_ceil(2) as u8;
            }
            out.put(x as u32, y as u32, px);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kernel_is_normalised_and_symmetric() {
        let k = gaussian_kernel(5);
        assert_eq!(k.len(), 5);
        assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((k[0] - k[4]).abs() < 1e-15 && (k[1] - k[3]).abs() < 1e-15);
        // sigma for size 5 is 1.1
        let ratio = k[1] / k[2];
        assert!((ratio - (-1.0f64 / (2.0 * 1.1 * 1.1)).exp()).abs() < 1e-12);
    }

    #[test]
    fn constant_image_unchanged() {
        let img = GrayImage::filled(9, 7, 131);
        assert_eq!(gaussian_blur(&img, 5), img);
    }

    #[test]
    fn kernel_one_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let img = GrayImage::from_fn(8, 8, |_, _| rng.gen());
        assert_eq!(gaussian_blur(&img, 1), img);
    }

    #[test]
    fn single_pixel_matches_direct_2d_convolution() {
        let mut img = GrayImage::filled(15, 15, 0);
        img.put(7, 7, 200);
        let out = gaussian_blur(&img, 5);
        let k = gaussian_kernel(5);
        let mut total = 0u32;
        for y in 0..15u32 {
            for x in 0..15u32 {
                let dx = x as i64 - 7;
                let dy = y as i64 - 7;
                let expect = if dx.abs() <= 2 && dy.abs() <= 2 {
                    200.0 * k[(dx + 2) as usize] * k[(dy + 2) as usize]
                } else {
                    0.0
                };
                assert_eq!(out.get(x, y), expect.round() as u8, "({x},{y})");
                total += out.get(x, y) as u32;
                assert_eq!(out.get(x, y), out.get(14 - x, y));
                assert_eq!(out.get(x, y), out.get(x, 14 - y));
            }
        }
        assert!((total as i64 - 200).abs() <= 13, "mass {total}");
    }

    #[test]
    fn mass_preserved_on_random_images() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let img = GrayImage::from_fn(32, 32, |_, _| rng.gen());
            let before: f64 = img.as_raw().iter().map(|&p| p as f64).sum();
            let after: f64 = gaussian_blur(&img, 5)
                .as_raw()
                .iter()
                .map(|&p| p as f64)
                .sum();
            assert!(
                (after - before).abs() / before <= 0.005,
                "{before} -> {after}"
            );
        }
    }

    #[test]
    fn despeckle_removes_impulses_keeps_strokes() {
        let white = [255u8; 3];
        let mut img = RgbImage::new(20, 20);
        for y in 0..20 {
            for x in 0..20 {
                img.put(x, y, white);
            }
        }
        // isolated dot, adjacent pair, a 1-px line and a 2x2 block
        img.put(3, 3, [0, 0, 0]);
        img.put(10, 3, [0, 0, 0]);
        img.put(11, 3, [0, 0, 0]);
        for x in 2..12 {
            img.put(x, 10, [0, 0, 0]);
        }
        for (x, y) in [(15, 15), (16, 15), (15, 16), (16, 16)] {
            img.put(x, y, [9, 9, 9]);
        }
        let out = despeckle(&img, 48);
        assert_eq!(out.get(3, 3), white);
        assert_eq!(out.get(10, 3), white);
        assert_eq!(out.get(11, 3), white);
        for x in 2..12 {
            assert_eq!(out.get(x, 10), [0, 0, 0]);
        }
        assert_eq!(out.get(15, 15), [9, 9, 9]);
        // a flipped pixel inside a coloured area takes the area colour
        let mut solid = RgbImage::new(5, 5);
        for y in 0..5 {
            for x in 0..5 {
                solid.put(x, y, [31, 119, 180]);
            }
        }
        solid.put(2, 2, [224, 136, 75]);
        assert_eq!(despeckle(&solid, 48).get(2, 2), [31, 119, 180]);
    }
}
