//! Binary morphology with a square structuring element.
//!
//! Out-of-frame neighbours are clamped to the edge; for a square element this
//! equals ignoring them, so borders neither erode nor grow shapes.

use super::BinaryImage;

fn span(kernel: u32) -> (i64, i64) {
    let k = kernel.max(1) as i64;
    (-(k / 2), (k - 1) / 2)
}

/// Minimum filter, row pass then column pass.
pub fn morphological_erode(img: &BinaryImage, kernel: u32) -> BinaryImage {
    let (lo, hi) = span(kernel);
    let (w, h) = img.dimensions();
    let (wi, hi_) = (w as i64, h as i64);
    let pass = |src: &BinaryImage, horizontal: bool| {
        BinaryImage::from_fn(w, h, |x, y| {
            let (x, y) = (x as i64, y as i64);
            (lo..=hi).all(|d| {
                let (sx, sy) = if horizontal {
                    ((x + d).clamp(0, wi - 1), y)
                } else {
                    (x, (y + d).clamp(0, hi_ - 1))
                };
                src.get(sx as u32, sy as u32)
            })
        })
    };
    let rows = pass(img, true);
    pass(&rows, false)
}

/// Dilation with the reflected element, so that opening and closing are the
/// usual adjunction pair even for even kernel sizes.
pub fn morphological_dilate(img: &BinaryImage, kernel: u32) -> BinaryImage {
    let (lo, hi) = span(kernel);
    let (w, h) = img.dimensions();
    let (wi, hi_) = (w as i64, h as i64);
    let pass = |src: &BinaryImage, horizontal: bool| {
        BinaryImage::from_fn(w, h, |x, y| {
            let (x, y) = (x as i64, y as i64);
            (-hi..=-lo).any(|d| {
                let (sx, sy) = if horizontal {
                    ((x + d).clamp(0, wi - 1), y)
                } else {
                    (x, (y + d).clamp(0, hi_ - 1))
                };
                src.get(sx as u32, sy as u32)
            })
        })
    };
    let rows = pass(img, true);
    pass(&rows, false)
}

/// Erosion followed by dilation; erases features thinner than `kernel`.
pub fn morphological_open(img: &BinaryImage, kernel: u32) -> BinaryImage {
    morphological_dilate(&morphological_erode(img, kernel), kernel)
}

/// Dilation followed by erosion; fills gaps narrower than `kernel`.
pub fn morphological_close(img: &BinaryImage, kernel: u32) -> BinaryImage {
    morphological_erode(&morphological_dilate(img, kernel), kernel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn opening_removes_thin_line() {
        let img = BinaryImage::from_fn(30, 30, |x, _| x == 12);
        assert_eq!(morphological_open(&img, 5).count_ones(), 0);
    }

    #[test]
    fn opening_keeps_large_square() {
        let img = BinaryImage::from_fn(40, 40, |x, y| {
            (10..30).contains(&x) && (10..30).contains(&y)
        });
        assert_eq!(morphological_open(&img, 5), img);
    }

    #[test]
    fn opening_keeps_square_touching_border() {
        let img = BinaryImage::from_fn(20, 20, |x, y| x < 8 && y >= 12);
        assert_eq!(morphological_open(&img, 5), img);
    }

    #[test]
    fn opening_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for k in [2, 3, 5] {
            for _ in 0..20 {
                let img = BinaryImage::from_fn(32, 32, |_, _| rng.gen_bool(0.6));
                let once = morphological_open(&img, k);
                assert_eq!(morphological_open(&once, k), once);
            }
        }
    }

    #[test]
    fn closing_fills_pinholes() {
        let mut img =
            BinaryImage::from_fn(20, 20, |x, y| (4..16).contains(&x) && (4..16).contains(&y));
        img.set(9, 9, false);
        let closed = morphological_close(&img, 3);
        assert!(closed.get(9, 9));
        assert_eq!(closed.count_ones(), 144);
    }
}
