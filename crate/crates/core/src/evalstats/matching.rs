use crate::chartgen::GroundTruth;
use crate::semantics::ChartModel;
use crate::textscan::{TextBlock, TextRole};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

/// Largest centre distance, in pixels, between a text block and the truth
/// string it is compared with.
pub const TEXT_MATCH_RADIUS: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectClass {
    BarValue,
    XTick,
    YTick,
    XLabel,
    YLabel,
    Title,
}

impl ObjectClass {
    pub const TEXT: [ObjectClass; 5] = [
        ObjectClass::XTick,
        ObjectClass::XLabel,
        ObjectClass::YTick,
        ObjectClass::YLabel,
        ObjectClass::Title,
    ];

    fn role(self) -> Option<TextRole> {
        match self {
            ObjectClass::BarValue => None,
            ObjectClass::XTick => Some(TextRole::XTick),
            ObjectClass::YTick => Some(TextRole::YTick),
            ObjectClass::XLabel => Some(TextRole::XLabel),
            ObjectClass::YLabel => Some(TextRole::YLabel),
            ObjectClass::Title => Some(TextRole::Title),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Measure {
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub class: ObjectClass,
    pub truth: Measure,
    pub extracted: Measure,
}

/// Pairs found for one or more charts plus what could not be paired.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Matching {
    pub pairs: Vec<MatchedPair>,
    /// Truth items per class, paired or not.
    pub truth_counts: BTreeMap<ObjectClass, usize>,
    /// Truth items per class with no extracted counterpart.
    pub misses: BTreeMap<ObjectClass, usize>,
    /// Extracted bars with no truth bar at their (category, group).
    pub extra_bars: usize,
}

impl Matching {
    pub fn merge(&mut self, other: Matching) {
        self.pairs.extend(other.pairs);
        for (k, v) in other.truth_counts {
            *self.truth_counts.entry(k).or_default() += v;
        }
        for (k, v) in other.misses {
            *self.misses.entry(k).or_default() += v;
        }
        self.extra_bars += other.extra_bars;
    }

    /// Record a chart that produced nothing: every truth item is a miss.
    pub fn all_missed(truth: &GroundTruth) -> Matching {
        let mut m = Matching::default();
        let mut count = |class: ObjectClass, n: usize| {
            *m.truth_counts.entry(class).or_default() += n;
            *m.misses.entry(class).or_default() += n;
        };
        count(ObjectClass::BarValue, truth.bars.len());
        for class in ObjectClass::TEXT {
            count(class, truth.texts_with_role(class.role().unwrap()).count());
        }
        m
    }
}

/// Relabel group ids by order of first appearance, scanning bars by
/// category and then left to right.
fn canonical_groups(items: &mut [(usize, u32, usize)]) {
    items.sort_by_key(|&(cat, x, _)| (cat, x));
    let mut seen: HashMap<usize, usize> = HashMap::new();
    for item in items.iter_mut() {
        let next = seen.len();
        item.2 = *seen.entry(item.2).or_insert(next);
    }
}

/// Pair extracted items with truth: bars by (category, group) after both
/// sides are relabelled canonically, text by role and nearest centre within
/// [`TEXT_MATCH_RADIUS`]. Bars without a value count as misses.
pub fn match_chart(model: &ChartModel, truth: &GroundTruth) -> Matching {
    let mut m = Matching::default();

    let mut truth_bars: Vec<(usize, u32, usize)> = truth
        .bars
        .iter()
        .map(|b| (b.category, b.rect.x, b.series))
        .collect();
    let truth_values: HashMap<(usize, u32), f64> = truth
        .bars
        .iter()
        .map(|b| ((b.category, b.rect.x), b.value))
        .collect();
    canonical_groups(&mut truth_bars);
    let truth_by_key: BTreeMap<(usize, usize), f64> = truth_bars
        .iter()
        .map(|&(c, x, g)| ((c, g), truth_values[&(c, x)]))
        .collect();

    let mut found: Vec<(usize, u32, usize)> = model
        .bars
        .iter()
        .map(|b| (b.category, b.geometry.x_left, b.group))
        .collect();
    let values: HashMap<(usize, u32), Option<f64>> = model
        .bars
        .iter()
        .map(|b| ((b.category, b.geometry.x_left), b.value))
        .collect();
    canonical_groups(&mut found);
    let mut extracted_by_key: BTreeMap<(usize, usize), Option<f64>> = BTreeMap::new();
    for &(c, x, g) in &found {
        if truth_by_key.contains_key(&(c, g)) && !extracted_by_key.contains_key(&(c, g)) {
            extracted_by_key.insert((c, g), values[&(c, x)]);
        } else {
            m.extra_bars += 1;
        }
    }
    m.truth_counts
        .insert(ObjectClass::BarValue, truth_by_key.len());
    let mut bar_misses = 0;
    for (key, &t) in &truth_by_key {
        match extracted_by_key.get(key).copied().flatten() {
            Some(e) if e.is_finite() => m.pairs.push(MatchedPair {
                class: ObjectClass::BarValue,
                truth: Measure::Number(t),
                extracted: Measure::Number(e),
            }),
            _ => bar_misses += 1,
        }
    }
    m.misses.insert(ObjectClass::BarValue, bar_misses);

    for class in ObjectClass::TEXT {
        let role = class.role().unwrap();
        let mut candidates: Vec<&TextBlock> =
            model.blocks.iter().filter(|b| b.role == role).collect();
        let mut total = 0;
        let mut missed = 0;
        for t in truth.texts_with_role(role) {
            total += 1;
            let (tx, ty) = t.bbox.center();
            let nearest = candidates
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    let (bx, by) = b.bbox.center();
                    (i, (bx - tx).hypot(by - ty))
                })
                .filter(|&(_, d)| d <= TEXT_MATCH_RADIUS)
                .min_by(|a, b| a.1.total_cmp(&b.1));
            match nearest {
                Some((i, _)) => {
                    let b = candidates.remove(i);
                    m.pairs.push(MatchedPair {
                        class,
                        truth: Measure::Text(t.text.clone()),
                        extracted: Measure::Text(b.text.clone()),
                    });
                }
                None => missed += 1,
            }
        }
        m.truth_counts.insert(class, total);
        m.misses.insert(class, missed);
    }
    m
}
