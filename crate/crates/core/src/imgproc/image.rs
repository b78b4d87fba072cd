use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ImageError {
    #[error("image dimensions must be at least 1x1 (got {0}x{1})")]
    Empty(u32, u32),
    #[error("buffer holds {actual} samples, expected {expected}")]
    BufferSize { expected: usize, actual: usize },
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch { left: (u32, u32), right: (u32, u32) },
}

macro_rules! raster {
    ($name:ident, $channels:expr, $doc:literal) => {
        #[doc = $doc]
        #[derive(Clone, PartialEq, Eq)]
        pub struct $name {
            width: u32,
            height: u32,
            data: Vec<u8>,
        }

        impl $name {
            pub const CHANNELS: usize = $channels;

            pub fn from_raw(width: u32, height: u32, data: Vec<u8>) -> Result<Self, ImageError> {
                if width == 0 || height == 0 {
                    return Err(ImageError::Empty(width, height));
                }
                let expected = width as usize * height as usize * $channels;
                if data.len() != expected {
                    return Err(ImageError::BufferSize {
                        expected,
                        actual: data.len(),
                    });
                }
                Ok(Self {
                    width,
                    height,
                    data,
                })
            }

            #[inline]
            pub fn width(&self) -> u32 {
                self.width
            }

            #[inline]
            pub fn height(&self) -> u32 {
                self.height
            }

            #[inline]
            pub fn dimensions(&self) -> (u32, u32) {
                (self.width, self.height)
            }

            pub fn as_raw(&self) -> &[u8] {
                &self.data
            }

            pub fn into_raw(self) -> Vec<u8> {
                self.data
            }

            #[inline]
            fn index(&self, x: u32, y: u32) -> usize {
                debug_assert!(x < self.width && y < self.height);
                (y as usize * self.width as usize + x as usize) * $channels
            }
        }

        impl std::fmt::Debug for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                write!(f, "{}({}x{})", stringify!($name), self.width, self.height)
            }
        }
    };
}

raster!(
    GrayImage,
    1,
    "8-bit single-channel raster; 0 is black, 255 white."
);
raster!(
    BinaryImage,
    1,
    "1-bit raster stored one byte per pixel; 1 is foreground."
);
raster!(RgbImage, 3, "Interleaved 8-bit RGB raster.");

impl GrayImage {
    /// White image.
    pub fn new(width: u32, height: u32) -> Self {
        Self::filled(width, height, 255)
    }

    pub fn filled(width: u32, height: u32, value: u8) -> Self {
        assert!(width > 0 && height > 0, "empty image");
        Self {
            width,
            height,
            data: vec![value; width as usize * height as usize],
        }
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> u8) -> Self {
        let mut img = Self::new(width, height);
        for y in 0..height {
            for x in 0..width {
                img.put(x, y, f(x, y));
            }
        }
        img
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.data[self.index(x, y)]
    }

    /// Pixel with coordinates clamped into the frame.
    #[inline]
    pub fn get_clamped(&self, x: i64, y: i64) -> u8 {
        let cx = x.clamp(0, self.width as i64 - 1) as u32;
        let cy = y.clamp(0, self.height as i64 - 1) as u32;
        self.get(cx, cy)
    }

    #[inline]
    pub fn put(&mut self, x: u32, y: u32, v: u8) {
        let i = self.index(x, y);
        self.data[i] = v;
    }

    pub fn crop(&self, rect: crate::Rect) -> GrayImage {
        let r = rect
            .intersection(&crate::Rect::new(0, 0, self.width, self.height))
            .unwrap_or_default();
        let (w, h) = (r.w.max(1), r.h.max(1));
        GrayImage::from_fn(w, h, |x, y| {
            self.get_clamped((r.x + x) as i64, (r.y + y) as i64)
        })
    }

    /// Rotate 90 degrees clockwise.
    pub fn rotate_cw(&self) -> GrayImage {
        let (w, h) = self.dimensions();
        GrayImage::from_fn(h, w, |x, y| self.get(y, h - 1 - x))
    }

    /// Rotate 90 degrees counter-clockwise.
    pub fn rotate_ccw(&self) -> GrayImage {
        let (w, h) = self.dimensions();
        GrayImage::from_fn(h, w, |x, y| self.get(w - 1 - y, x))
    }
}

impl BinaryImage {
    /// All-background image.
    pub fn new(width: u32, height: u32) -> Self {
        assert!(width > 0 && height > 0, "empty image");
        Self {
            width,
            height,
            data: vec![0; width as usize * height as usize],
        }
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> bool) -> Self {
        let mut img = Self::new(width, height);
        for y in 0..height {
            for x in 0..width {
                img.set(x, y, f(x, y));
            }
        }
        img
    }

    /// Build from raw bits, normalising any non-zero byte to 1.
    pub fn from_bits(width: u32, height: u32, bits: &[u8]) -> Result<Self, ImageError> {
        Self::from_raw(
            width,
            height,
            bits.iter().map(|&b| (b != 0) as u8).collect(),
        )
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        self.data[self.index(x, y)] != 0
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, v: bool) {
        let i = self.index(x, y);
        self.data[i] = v as u8;
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().filter(|&&b| b != 0).count()
    }

    pub fn crop(&self, rect: crate::Rect) -> BinaryImage {
        let r = rect
            .intersection(&crate::Rect::new(0, 0, self.width, self.height))
            .unwrap_or_default();
        if r.w == 0 || r.h == 0 {
            return BinaryImage::new(1, 1);
        }
        BinaryImage::from_fn(r.w, r.h, |x, y| self.get(r.x + x, r.y + y))
    }

    /// Render as a gray image: foreground black, background white.
    pub fn to_gray(&self) -> GrayImage {
        let data = self
            .data
            .iter()
            .map(|&b| if b != 0 { 0 } else { 255 })
            .collect();
        GrayImage {
            width: self.width,
            height: self.height,
            data,
        }
    }
}

impl RgbImage {
    pub fn new(width: u32, height: u32) -> Self {
        assert!(width > 0 && height > 0, "empty image");
        Self {
            width,
            height,
            data: vec![255; width as usize * height as usize * 3],
        }
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> [u8; 3] {
        let i = self.index(x, y);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn put(&mut self, x: u32, y: u32, c: [u8; 3]) {
        let i = self.index(x, y);
        self.data[i..i + 3].copy_from_slice(&c);
    }

    /// Replicate a gray image into three channels.
    pub fn from_gray(g: &GrayImage) -> RgbImage {
        let data = g.as_raw().iter().flat_map(|&v| [v, v, v]).collect();
        RgbImage {
            width: g.width(),
            height: g.height(),
            data,
        }
    }

    pub fn crop(&self, rect: crate::Rect) -> RgbImage {
        let r = rect
            .intersection(&crate::Rect::new(0, 0, self.width, self.height))
            .unwrap_or_default();
        let (w, h) = (r.w.max(1), r.h.max(1));
        let mut out = RgbImage::new(w, h);
        for y in 0..r.h {
            for x in 0..r.w {
                out.put(x, y, self.get(r.x + x, r.y + y));
            }
        }
        out
    }
}
