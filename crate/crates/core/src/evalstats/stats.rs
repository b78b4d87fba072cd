use super::matching::{Matching, Measure, ObjectClass};
use super::EvalError;
use serde::{Deserialize, Serialize};

/// Floor on the denominator of the relative error.
pub const RELATIVE_EPSILON: f64 = 1e-9;
/// Limits of agreement sit this many standard deviations from the bias.
pub const DEFAULT_LOA_Z: f64 = 2.0;
const BAR_THRESHOLDS: [f64; 3] = [0.01, 0.02, 0.05];

pub fn relative_error(extracted: f64, truth: f64) -> f64 {
    (extracted - truth).abs() / truth.abs().max(RELATIVE_EPSILON)
}

fn pct(hits: usize, n: usize) -> Option<f64> {
    (n > 0).then(|| 100.0 * hits as f64 / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassScore {
    pub pairs: usize,
    pub correct: usize,
    /// `None` when the class had no pairs.
    pub percent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub x_tick: ClassScore,
    pub x_label: ClassScore,
    pub y_tick: ClassScore,
    pub y_label: ClassScore,
    pub title: ClassScore,
    pub bar_within_1pct: ClassScore,
    pub bar_within_2pct: ClassScore,
    pub bar_within_5pct: ClassScore,
    /// Share of truth bars that were found with a value.
    pub bars_detected: Option<f64>,
    /// Share of truth text items that were found in the right role.
    pub text_detected: Option<f64>,
    pub truth_bars: usize,
    pub truth_texts: usize,
}

/// Exact-match rates for text classes and relative-error rates for bar
/// values, over paired items only; detection rates are over all truth items.
pub fn accuracy(m: &Matching) -> AccuracyReport {
    let text_score = |class: ObjectClass| {
        let pairs: Vec<_> = m.pairs.iter().filter(|p| p.class == class).collect();
        let correct = pairs.iter().filter(|p| p.truth == p.extracted).count();
        ClassScore {
            pairs: pairs.len(),
            correct,
            percent: pct(correct, pairs.len()),
        }
    };
    let errors: Vec<f64> = m
        .pairs
        .iter()
        .filter(|p| p.class == ObjectClass::BarValue)
        .filter_map(|p| match (&p.truth, &p.extracted) {
            (Measure::Number(t), Measure::Number(e)) => Some(relative_error(*e, *t)),
            _ => None,
        })
        .collect();
    let bar_score = |limit: f64| {
        let correct = errors.iter().filter(|&&e| e <= limit).count();
        ClassScore {
            pairs: errors.len(),
            correct,
            percent: pct(correct, errors.len()),
        }
    };
    let count = |map: &std::collections::BTreeMap<ObjectClass, usize>, classes: &[ObjectClass]| {
        classes
            .iter()
            .map(|c| map.get(c).copied().unwrap_or(0))
            .sum::<usize>()
    };
    let bars = [ObjectClass::BarValue];
    let truth_bars = count(&m.truth_counts, &bars);
    let truth_texts = count(&m.truth_counts, &ObjectClass::TEXT);
    AccuracyReport {
        x_tick: text_score(ObjectClass::XTick),
        x_label: text_score(ObjectClass::XLabel),
        y_tick: text_score(ObjectClass::YTick),
        y_label: text_score(ObjectClass::YLabel),
        title: text_score(ObjectClass::Title),
        bar_within_1pct: bar_score(BAR_THRESHOLDS[0]),
        bar_within_2pct: bar_score(BAR_THRESHOLDS[1]),
        bar_within_5pct: bar_score(BAR_THRESHOLDS[2]),
        bars_detected: pct(truth_bars - count(&m.misses, &bars), truth_bars),
        text_detected: pct(
            truth_texts - count(&m.misses, &ObjectClass::TEXT),
            truth_texts,
        ),
        truth_bars,
        truth_texts,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SdEstimator {
    /// `n − 1` denominator.
    #[default]
    Sample,
    /// `n` denominator.
    Population,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlandAltman {
    pub n: usize,
    pub bias: f64,
    pub sd: f64,
    pub loa_low: f64,
    pub loa_high: f64,
    pub pct_within: f64,
    pub z: f64,
}

pub fn limits_of_agreement(bias: f64, sd: f64, z: f64) -> (f64, f64) {
    (bias - z * sd, bias + z * sd)
}

/// Agreement of `(truth, extracted)` pairs; differences are `extracted − truth`.
pub fn bland_altman(
    pairs: &[(f64, f64)],
    z: f64,
    estimator: SdEstimator,
) -> Result<BlandAltman, EvalError> {
    let n = pairs.len();
    if n < 2 {
        return Err(EvalError::InsufficientData(n));
    }
    let d: Vec<f64> = pairs.iter().map(|(t, e)| e - t).collect();
    let bias = d.iter().sum::<f64>() / n as f64;
    let ss: f64 = d.iter().map(|x| (x - bias).powi(2)).sum();
    let denom = match estimator {
        SdEstimator::Sample => n - 1,
        SdEstimator::Population => n,
    } as f64;
    let sd = (ss / denom).sqrt();
    let (loa_low, loa_high) = limits_of_agreement(bias, sd, z);
    let inside = d
        .iter()
        .filter(|&&x| (loa_low..=loa_high).contains(&x))
        .count();
    Ok(BlandAltman {
        n,
        bias,
        sd,
        loa_low,
        loa_high,
        pct_within: 100.0 * inside as f64 / n as f64,
        z,
    })
}

/// `(mean, difference)` per pair for an agreement plot.
pub fn bland_altman_points(pairs: &[(f64, f64)]) -> Vec<(f64, f64)> {
    pairs.iter().map(|(t, e)| ((t + e) / 2.0, e - t)).collect()
}
