//! From-scratch raster primitives.
//!
//! Conventions shared by every function here: images are row-major, dark
//! pixels are foreground (`1` in a [`BinaryImage`]), out-of-range neighbours
//! are clamped to the nearest edge pixel, and nothing keeps global state.

mod components;
mod contour;
mod edges;
mod filter;
mod hough;
mod image;
mod morph;
mod resize;
mod threshold;

pub use components::{connected_components, remove_small_components, LabelMap};
pub use contour::{approx_corners, find_contours, Contour};
pub use edges::{canny, CannyThresholds};
pub use filter::{despeckle, gaussian_blur, gaussian_kernel};
pub use hough::{hough_lines, HoughParams, LineSegment};
pub use image::{BinaryImage, GrayImage, ImageError, RgbImage};
pub use morph::{
    morphological_close, morphological_dilate, morphological_erode, morphological_open,
};
pub use resize::{upscale, UpscaleMethod};
pub use threshold::{
    adaptive_threshold, between_class_variance, default_window, integral_image, otsu_binarize,
    otsu_threshold, IntegralImage,
};

/// Set pixels of `img` under `mask == 1` to white (255).
pub fn subtract_mask(img: &GrayImage, mask: &BinaryImage) -> Result<GrayImage, ImageError> {
    if img.width() != mask.width() || img.height() != mask.height() {
        return Err(ImageError::DimensionMismatch {
            left: (img.width(), img.height()),
            right: (mask.width(), mask.height()),
        });
    }
    let data = img
        .as_raw()
        .iter()
        .zip(mask.as_raw())
        .map(|(&p, &m)| if m != 0 { 255 } else { p })
        .collect();
    GrayImage::from_raw(img.width(), img.height(), data)
}

/// Per-pixel luma `round(0.299 R + 0.587 G + 0.114 B)`.
pub fn to_grayscale(rgb: &RgbImage) -> GrayImage {
    let data = rgb
        .as_raw()
        .chunks_exact(3)
        .map(|c| luma(c[0], c[1], c[2]))
        .collect();
    GrayImage::from_raw(rgb.width(), rgb.height(), data).expect("dimensions carried over")
}

pub(crate) fn luma(r: u8, g: u8, b: u8) -> u8 {
    // integer form of 0.299/0.587/0.114 scaled by 1000, rounded half up
    let v = 299 * r as u32 + 587 * g as u32 + 114 * b as u32;
    ((v + 500) / 1000).min(255) as u8
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grayscale_luma() {
        let rgb = RgbImage::from_raw(3, 1, vec![0, 0, 0, 255, 0, 0, 255, 255, 255]).unwrap();
        let g = to_grayscale(&rgb);
        assert_eq!(g.as_raw(), &[0, 76, 255]);
    }

    #[test]
    fn grayscale_matches_float_formula() {
        for r in (0..=255).step_by(17) {
            for g in (0..=255).step_by(15) {
                for b in (0..=255).step_by(51) {
                    let f = (0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64).round();
                    assert_eq!(luma(r as u8, g as u8, b as u8) as f64, f);
                }
            }
        }
    }

    #[test]
    fn subtract_mask_cases() {
        let img = GrayImage::from_fn(4, 3, |x, y| (x * 10 + y) as u8);
        let zero = BinaryImage::new(4, 3);
        assert_eq!(subtract_mask(&img, &zero).unwrap(), img);
        let ones = BinaryImage::from_fn(4, 3, |_, _| true);
        assert!(subtract_mask(&img, &ones)
            .unwrap()
            .as_raw()
            .iter()
            .all(|&p| p == 255));
        let bad = BinaryImage::new(3, 3);
        assert!(matches!(
            subtract_mask(&img, &bad),
            Err(ImageError::DimensionMismatch { .. })
        ));
    }
}
