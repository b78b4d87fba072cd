use super::{SemanticsError, SemanticsParams};
use crate::textscan::{TextBlock, TextRole};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tick {
    /// Row of the tick text's vertical centre.
    pub pixel: f64,
    pub value: f64,
    /// Text the value was parsed from, after any repair.
    pub source_text: String,
    /// The tick disagreed with its neighbours; set even when repaired.
    pub suspect: bool,
    /// A digit swap brought the tick back in line.
    #[serde(skip)]
    pub repaired: bool,
}

/// Linear map `value(p) = intercept + slope · (p − baseline_y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub slope: f64,
    pub intercept: f64,
    pub baseline_y: f64,
    pub rms_residual: f64,
}

impl Calibration {
    pub fn value_at(&self, pixel: f64) -> f64 {
        self.intercept + self.slope * (pixel - self.baseline_y)
    }
}

/// Number in tick text, ignoring `%`, `,` and whitespace.
pub fn parse_tick_value(text: &str) -> Option<f64> {
    let cleaned: String = text
        .chars()
        .filter(|c| !(c.is_whitespace() || *c == '%' || *c == ','))
        .collect();
    if cleaned.is_empty() || !cleaned.chars().any(|c| c.is_ascii_digit()) {
        return None;
    }
    cleaned.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Median-of-slopes line through `(pixel, value)` points; resists a minority
/// of wrong readings.
fn robust_line(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let mut slopes = Vec::new();
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            if a.0 != b.0 {
                slopes.push((b.1 - a.1) / (b.0 - a.0));
            }
        }
    }
    if slopes.is_empty() {
        return None;
    }
    let slope = median(slopes);
    let intercept = median(points.iter().map(|(p, v)| v - slope * p).collect());
    Some((slope, intercept))
}

/// All texts reachable from `text` by turning one `2` into `7` or one `7` into `2`.
fn digit_swaps(text: &str) -> Vec<String> {
    text.char_indices()
        .filter_map(|(i, c)| {
            let swapped = match c {
                '2' => '7',
                '7' => '2',
                _ => return None,
            };
            let mut s = text.to_string();
            s.replace_range(i..i + 1, &swapped.to_string());
            Some(s)
        })
        .collect()
}

/// Parse y-tick blocks into ticks ordered top to bottom.
///
/// A robust line of value against pixel is fitted over every parsed tick;
/// ticks off that line by more than `suspect_fraction` of the median value
/// step are flagged, and a single 2/7 digit swap is kept when it brings the
/// tick back within that bound.
pub fn parse_ticks(
    blocks: &[TextBlock],
    params: &SemanticsParams,
) -> Result<Vec<Tick>, SemanticsError> {
    let mut ticks: Vec<Tick> = blocks
        .iter()
        .filter(|b| b.role == TextRole::YTick)
        .filter_map(|b| {
            let value = parse_tick_value(&b.text)?;
            let pixel = b.bbox.center().1;
            Some(Tick {
                pixel,
                value,
                source_text: b.text.clone(),
                suspect: false,
                repaired: false,
            })
        })
        .collect();
    if ticks.len() < 2 {
        return Err(SemanticsError::CalibrationImpossible(format!(
            "{} readable y tick(s)",
            ticks.len()
        )));
    }
    ticks.sort_by(|a, b| a.pixel.total_cmp(&b.pixel));
    let points: Vec<(f64, f64)> = ticks.iter().map(|t| (t.pixel, t.value)).collect();
    let Some((slope, intercept)) = robust_line(&points) else {
        return Ok(ticks);
    };
    let step = median(
        ticks
            .windows(2)
            .map(|w| (w[1].value - w[0].value).abs())
            .collect(),
    );
    let limit = params.suspect_fraction * step;
    for t in &mut ticks {
        let residual = |v: f64| (v - (intercept + slope * t.pixel)).abs();
        if residual(t.value) <= limit {
            continue;
        }
        t.suspect = true;
        if !params.repair_digits {
            continue;
        }
        let fix = digit_swaps(&t.source_text)
            .into_iter()
            .filter_map(|s| parse_tick_value(&s).map(|v| (s, v)))
            .filter(|(_, v)| residual(*v) <= limit)
            .min_by(|a, b| residual(a.1).total_cmp(&residual(b.1)));
        if let Some((text, value)) = fix {
            t.source_text = text;
            t.value = value;
            t.repaired = true;
        }
    }
    Ok(ticks)
}

/// Least-squares line of value on pixel over the trustworthy ticks
/// (unflagged or repaired), expressed at the x-axis row `baseline_y`.
pub fn calibrate(ticks: &[Tick], baseline_y: f64) -> Result<Calibration, SemanticsError> {
    let used: Vec<&Tick> = ticks.iter().filter(|t| !t.suspect || t.repaired).collect();
    let impossible = |m: &str| Err(SemanticsError::CalibrationImpossible(m.to_string()));
    if used.len() < 2 {
        return impossible("fewer than two trustworthy ticks");
    }
    let mut sorted = used.clone();
    sorted.sort_by(|a, b| a.pixel.total_cmp(&b.pixel));
    let rising = sorted.windows(2).all(|w| w[1].value > w[0].value);
    let falling = sorted.windows(2).all(|w| w[1].value < w[0].value);
    if !(rising || falling) {
        return impossible("tick values are not monotonic");
    }
    if looks_logarithmic(&sorted) {
        return Err(SemanticsError::LogarithmicAxis);
    }
    let n = used.len() as f64;
    let mp = used.iter().map(|t| t.pixel).sum::<f64>() / n;
    let mv = used.iter().map(|t| t.value).sum::<f64>() / n;
    let spp: f64 = used.iter().map(|t| (t.pixel - mp).powi(2)).sum();
    if spp == 0.0 {
        return impossible("all ticks on one row");
    }
    let spv: f64 = used.iter().map(|t| (t.pixel - mp) * (t.value - mv)).sum();
    let slope = spv / spp;
    let intercept = mv + slope * (baseline_y - mp);
    let cal = Calibration {
        slope,
        intercept,
        baseline_y,
        rms_residual: 0.0,
    };
    let ss: f64 = used
        .iter()
        .map(|t| (t.value - cal.value_at(t.pixel)).powi(2))
        .sum();
    Ok(Calibration {
        rms_residual: (ss / n).sqrt(),
        ..cal
    })
}

/// Even spacing with a constant value ratio other than one, while value
/// differences are not constant.
fn looks_logarithmic(sorted: &[&Tick]) -> bool {
    if sorted.len() < 3 || sorted.iter().any(|t| t.value <= 0.0) {
        return false;
    }
    let close = |a: f64, b: f64| (a - b).abs() <= 0.02 * a.abs().max(b.abs());
    let gaps: Vec<f64> = sorted.windows(2).map(|w| w[1].pixel - w[0].pixel).collect();
    let ratios: Vec<f64> = sorted.windows(2).map(|w| w[1].value / w[0].value).collect();
    let diffs: Vec<f64> = sorted.windows(2).map(|w| w[1].value - w[0].value).collect();
    gaps.iter().all(|g| close(*g, gaps[0]))
        && ratios.iter().all(|r| close(*r, ratios[0]))
        && !close(ratios[0], 1.0)
        && !diffs.iter().all(|d| close(*d, diffs[0]))
}
