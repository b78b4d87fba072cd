use super::GrayImage;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UpscaleMethod {
    Nearest,
    Bilinear,
    #[default]
    Bicubic,
}

impl std::str::FromStr for UpscaleMethod {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nearest" => Ok(Self::Nearest),
            "bilinear" => Ok(Self::Bilinear),
            "bicubic" => Ok(Self::Bicubic),
            other => Err(format!("unknown upscale method `{other}`")),
        }
    }
}

impl std::fmt::Display for UpscaleMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Nearest => "nearest",
            Self::Bilinear => "bilinear",
            Self::Bicubic => "bicubic",
        })
    }
}

fn cubic(t: f64) -> f64 {
    // Keys kernel, a = -0.5
    let a = -0.5;
    let t = t.abs();
    if t <= 1.0 {
        (a + 2.0) * t * t * t - (a + 3.0) * t * t + 1.0
    } else if t < 2.0 {
        a * t * t * t - 5.0 * a * t * t + 8.0 * a * t - 4.0 * a
    } else {
        0.0
    }
}

/// Integer-factor upscaling. Output pixel `i` samples source coordinate
/// `(i + 0.5) / factor - 0.5`, so source pixel `p` covers outputs
/// `factor * p .. factor * (p + 1)`.
pub fn upscale(img: &GrayImage, factor: u32, method: UpscaleMethod) -> GrayImage {
    let f = factor.max(1);
    if f == 1 {
        return img.clone();
    }
    let (w, h) = img.dimensions();
    let src = |o: u32| (o as f64 + 0.5) / f as f64 - 0.5;
    match method {
        UpscaleMethod::Nearest => GrayImage::from_fn(w * f, h * f, |x, y| img.get(x / f, y / f)),
        UpscaleMethod::Bilinear => GrayImage::from_fn(w * f, h * f, |x, y| {
            let (sx, sy) = (src(x), src(y));
            let (x0, y0) = (sx.floor(), sy.floor());
            let (tx, ty) = (sx - x0, sy - y0);
            let p = |dx: i64, dy: i64| img.get_clamped(x0 as i64 + dx, y0 as i64 + dy) as f64;
            let top = p(0, 0) * (1.0 - tx) + p(1, 0) * tx;
            let bot = p(0, 1) * (1.0 - tx) + p(1, 1) * tx;
            (top * (1.0 - ty) + bot * ty).round().clamp(0.0, 255.0) as u8
        }),
        UpscaleMethod::Bicubic => GrayImage::from_fn(w * f, h * f, |x, y| {
            let (sx, sy) = (src(x), src(y));
            let (x0, y0) = (sx.floor() as i64, sy.floor() as i64);
            let mut acc = 0.0;
            for j in -1..=2 {
                let wy = cubic(sy - (y0 + j) as f64);
                for i in -1..=2 {
                    let wx = cubic(sx - (x0 + i) as f64);
                    acc += wx * wy * img.get_clamped(x0 + i, y0 + j) as f64;
                }
            }
            acc.round().clamp(0.0, 255.0) as u8
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_replicates_blocks() {
        let img = GrayImage::from_raw(2, 2, vec![1, 2, 3, 4]).unwrap();
        let up = upscale(&img, 2, UpscaleMethod::Nearest);
        assert_eq!(
            up.as_raw(),
            &[1, 1, 2, 2, 1, 1, 2, 2, 3, 3, 4, 4, 3, 3, 4, 4]
        );
    }

    #[test]
    fn constant_stays_constant() {
        let img = GrayImage::filled(5, 4, 93);
        for m in [
            UpscaleMethod::Nearest,
            UpscaleMethod::Bilinear,
            UpscaleMethod::Bicubic,
        ] {
            let up = upscale(&img, 2, m);
            assert_eq!(up.dimensions(), (10, 8));
            assert!(up.as_raw().iter().all(|&p| p == 93), "{m}");
        }
    }

    #[test]
    fn bilinear_midpoint() {
        // the two outputs straddling the pixel boundary sit at 0.25 and 0.75 of the ramp
        let img = GrayImage::from_raw(2, 1, vec![0, 255]).unwrap();
        let up = upscale(&img, 2, UpscaleMethod::Bilinear);
        assert_eq!(&up.as_raw()[..4], &[0, 64, 191, 255]);
        let mid = (up.get(1, 0) as f64 + up.get(2, 0) as f64) / 2.0;
        assert!((mid - 128.0).abs() <= 1.0);
    }

    #[test]
    fn bicubic_doubles_stroke_width() {
        let img = GrayImage::from_fn(20, 3, |x, _| if (6..9).contains(&x) { 0 } else { 255 });
        let up = upscale(&img, 2, UpscaleMethod::Bicubic);
        let dark: Vec<u32> = (0..40).filter(|&x| up.get(x, 2) < 128).collect();
        assert_eq!(dark, (12..18).collect::<Vec<_>>());
    }
}
