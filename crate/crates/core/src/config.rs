//! Flat `key = value` configuration covering every tunable of the pipeline.
//!
//! ```text
//! # comments start with '#'
//! disassembly.bar_contrast = 40
//! semantics.repair_digits = false
//! ```
//!
//! Unknown keys and out-of-range values are rejected. The hash covers the
//! effective values, so two files that differ only in layout or in spelling
//! out defaults hash the same.

use crate::disassembly::DisassemblyParams;
use crate::evalstats::{SdEstimator, DEFAULT_LOA_Z};
use crate::imgproc::UpscaleMethod;
use crate::semantics::SemanticsParams;
use crate::textscan::CandidateParams;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: bad value {value:?} for `{key}`: {reason}")]
    BadValue {
        line: usize,
        key: String,
        value: String,
        reason: String,
    },
    #[error("cannot read config: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    /// Channel tolerance of the impulse-noise filter run on each page; 0 skips it.
    pub denoise_tolerance: u8,
    pub text: CandidateParams,
    pub ocr_factor: u32,
    pub ocr_upscale: UpscaleMethod,
    pub disassembly: DisassemblyParams,
    pub semantics: SemanticsParams,
    pub loa_z: f64,
    pub sd_estimator: SdEstimator,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            denoise_tolerance: 48,
            text: CandidateParams::default(),
            ocr_factor: 2,
            ocr_upscale: UpscaleMethod::Bicubic,
            disassembly: DisassemblyParams::default(),
            semantics: SemanticsParams::default(),
            loa_z: DEFAULT_LOA_Z,
            sd_estimator: SdEstimator::Sample,
        }
    }
}

trait Setting: Sized {
    fn parse(s: &str) -> Result<Self, String>;
    fn render(&self) -> String;
    fn magnitude(&self) -> Option<f64>;
}

macro_rules! numeric_setting {
    ($($t:ty),*) => {$(
        impl Setting for $t {
            fn parse(s: &str) -> Result<Self, String> {
                s.parse::<$t>().map_err(|e| e.to_string())
            }
            fn render(&self) -> String {
                format!("{self:?}")
            }
            fn magnitude(&self) -> Option<f64> {
                Some(*self as f64)
            }
        }
    )*};
}
numeric_setting!(u8, u32, u64, f64);

impl Setting for bool {
    fn parse(s: &str) -> Result<Self, String> {
        s.parse::<bool>()
            .map_err(|_| "expected true or false".into())
    }
    fn render(&self) -> String {
        self.to_string()
    }
    fn magnitude(&self) -> Option<f64> {
        None
    }
}

impl Setting for UpscaleMethod {
    fn parse(s: &str) -> Result<Self, String> {
        match s {
            "nearest" => Ok(UpscaleMethod::Nearest),
            "bilinear" => Ok(UpscaleMethod::Bilinear),
            "bicubic" => Ok(UpscaleMethod::Bicubic),
            _ => Err("expected nearest, bilinear or bicubic".into()),
        }
    }
    fn render(&self) -> String {
        match self {
            UpscaleMethod::Nearest => "nearest",
            UpscaleMethod::Bilinear => "bilinear",
            UpscaleMethod::Bicubic => "bicubic",
        }
        .into()
    }
    fn magnitude(&self) -> Option<f64> {
        None
    }
}

impl Setting for SdEstimator {
    fn parse(s: &str) -> Result<Self, String> {
        match s {
            "sample" => Ok(SdEstimator::Sample),
            "population" => Ok(SdEstimator::Population),
            _ => Err("expected sample or population".into()),
        }
    }
    fn render(&self) -> String {
        match self {
            SdEstimator::Sample => "sample",
            SdEstimator::Population => "population",
        }
        .into()
    }
    fn magnitude(&self) -> Option<f64> {
        None
    }
}

fn assign<T: Setting>(slot: &mut T, raw: &str, lo: f64, hi: f64) -> Result<(), String> {
    let v = T::parse(raw)?;
    if let Some(m) = v.magnitude() {
        if !m.is_finite() || m < lo || m > hi {
            return Err(format!("must lie in [{lo}, {hi}]"));
        }
    }
    *slot = v;
    Ok(())
}

macro_rules! settings {
    ($($key:literal => $($field:ident).+ in $lo:expr, $hi:expr;)*) => {
        impl Config {
            /// Every key, in sorted order.
            pub const KEYS: &'static [&'static str] = &[$($key),*];

            fn set(&mut self, key: &str, raw: &str) -> Option<Result<(), String>> {
                match key {
                    $($key => Some(assign(&mut self.$($field).+, raw, $lo as f64, $hi as f64)),)*
                    _ => None,
                }
            }

            /// `(key, value)` for every setting, sorted by key.
            pub fn entries(&self) -> Vec<(&'static str, String)> {
                let mut v = vec![$(($key, self.$($field).+.render())),*];
                v.sort_by(|a, b| a.0.cmp(b.0));
                v
            }
        }
    };
}

const ANY: f64 = f64::MAX;

settings! {
    "denoise.tolerance" => denoise_tolerance in 0, 255;
    "disassembly.adaptive_t_pct" => disassembly.adaptive_t_pct in 0, 100;
    "disassembly.adaptive_window" => disassembly.adaptive_window in 0, 4096;
    "disassembly.axis_angle_tol_deg" => disassembly.axis_angle_tol_deg in 0, 45;
    "disassembly.axis_dark_level" => disassembly.axis_dark_level in 1, 255;
    "disassembly.axis_endpoint_tol" => disassembly.axis_endpoint_tol in 0, 1000;
    "disassembly.bar_contrast" => disassembly.bar_contrast in 1, 255;
    "disassembly.bar_top_tol" => disassembly.bar_top_tol in 0, 100;
    "disassembly.baseline_tol" => disassembly.baseline_tol in 0, 100;
    "disassembly.blur_kernel" => disassembly.blur_kernel in 1, 31;
    "disassembly.close_kernel" => disassembly.close_kernel in 1, 31;
    "disassembly.corner_epsilon" => disassembly.corner_epsilon in 0, 50;
    "disassembly.edge_dx_tol" => disassembly.edge_dx_tol in 0, 20;
    "disassembly.group_color_dist" => disassembly.group_color_dist in 0, 442;
    "disassembly.group_template_corr" => disassembly.group_template_corr in -1, 1;
    "disassembly.hough_max_gap" => disassembly.hough_max_gap in 0, 1000;
    "disassembly.hough_min_len_fraction" => disassembly.hough_min_len_fraction in 0, 1;
    "disassembly.hough_votes" => disassembly.hough_votes in 1, 100000;
    "disassembly.open_kernel" => disassembly.open_kernel in 1, 31;
    "disassembly.panel_attach_gap" => disassembly.panel_attach_gap in 0, 10000;
    "disassembly.panel_dilation" => disassembly.panel_dilation in 0, 200;
    "disassembly.panel_merge_overlap" => disassembly.panel_merge_overlap in 0, 1;
    "disassembly.panel_min_fraction" => disassembly.panel_min_fraction in 0, 1;
    "disassembly.speck_area" => disassembly.speck_area in 0, 100000;
    "eval.loa_z" => loa_z in 0, 10;
    "eval.sd_estimator" => sd_estimator in 0, 0;
    "ocr.factor" => ocr_factor in 1, 8;
    "ocr.upscale" => ocr_upscale in 0, 0;
    "semantics.label_gap" => semantics.label_gap in 0, 1000;
    "semantics.repair_digits" => semantics.repair_digits in 0, 0;
    "semantics.span_tol" => semantics.span_tol in 0, 1000;
    "semantics.suspect_fraction" => semantics.suspect_fraction in 0, ANY;
    "semantics.tick_band" => semantics.tick_band in 0, 100;
    "semantics.title_band" => semantics.title_band in 0, 1;
    "text.area_sigmas" => text.area_sigmas in 0, 100;
    "text.max_aspect" => text.max_aspect in 1, 1000;
    "text.min_area" => text.min_area in 0, 1000000;
    "text.min_fill" => text.min_fill in 0, 1;
}

impl Config {
    pub fn parse(src: &str) -> Result<Config, ConfigError> {
        let mut cfg = Config::default();
        for (i, raw) in src.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or(ConfigError::Syntax { line })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError::Syntax { line });
            }
            match cfg.set(key, value) {
                None => {
                    return Err(ConfigError::UnknownKey {
                        line,
                        key: key.into(),
                    })
                }
                Some(Err(reason)) => {
                    return Err(ConfigError::BadValue {
                        line,
                        key: key.into(),
                        value: value.into(),
                        reason,
                    })
                }
                Some(Ok(())) => {}
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Config, ConfigError> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        Config::parse(&src)
    }

    /// The effective configuration written back out, one key per line.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.entries() {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    /// Hex SHA-256 of [`Config::render`].
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.render().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
