//! PNG reading and writing for the crate's raster types.

use crate::imgproc::{GrayImage, RgbImage};
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum RasterIoError {
    #[error("{path}: {source}")]
    Decode {
        path: String,
        source: image::ImageError,
    },
    #[error("{path}: {source}")]
    Encode {
        path: String,
        source: image::ImageError,
    },
    #[error("{path}: image has zero size")]
    Empty { path: String },
}

/// Load any 8-bit PNG (gray, gray+alpha, RGB, RGBA) as RGB.
pub fn load_rgb(path: &Path) -> Result<RgbImage, RasterIoError> {
    let name = path.display().to_string();
    let img = image::ImageReader::open(path)
        .map_err(|e| RasterIoError::Decode {
            path: name.clone(),
            source: image::ImageError::IoError(e),
        })?
        .with_guessed_format()
        .map_err(|e| RasterIoError::Decode {
            path: name.clone(),
            source: image::ImageError::IoError(e),
        })?
        .decode()
        .map_err(|e| RasterIoError::Decode {
            path: name.clone(),
            source: e,
        })?
        .into_rgb8();
    let (w, h) = img.dimensions();
    RgbImage::from_raw(w, h, img.into_raw()).map_err(|_| RasterIoError::Empty { path: name })
}

pub fn save_rgb(img: &RgbImage, path: &Path) -> Result<(), RasterIoError> {
    let (w, h) = img.dimensions();
    image::save_buffer(path, img.as_raw(), w, h, image::ExtendedColorType::Rgb8).map_err(|e| {
        RasterIoError::Encode {
            path: path.display().to_string(),
            source: e,
        }
    })
}

pub fn save_gray(img: &GrayImage, path: &Path) -> Result<(), RasterIoError> {
    let (w, h) = img.dimensions();
    image::save_buffer(path, img.as_raw(), w, h, image::ExtendedColorType::L8).map_err(|e| {
        RasterIoError::Encode {
            path: path.display().to_string(),
            source: e,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn png_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut rgb = RgbImage::new(3, 2);
        rgb.put(1, 1, [10, 20, 30]);
        let p = dir.path().join("a.png");
        save_rgb(&rgb, &p).unwrap();
        assert_eq!(load_rgb(&p).unwrap(), rgb);

        let g = GrayImage::from_fn(4, 4, |x, y| (x * 16 + y) as u8);
        let q = dir.path().join("g.png");
        save_gray(&g, &q).unwrap();
        assert_eq!(load_rgb(&q).unwrap(), RgbImage::from_gray(&g));
    }

    #[test]
    fn missing_file_names_path() {
        let err = load_rgb(Path::new("/nonexistent/x.png")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/x.png"));
    }
}
