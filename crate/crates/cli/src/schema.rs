//! On-disk chart document: the extracted model plus provenance.

use chartex::semantics::{Calibration, ChartBar, ChartModel, Tick};
use chartex::textscan::TextBlock;
use chartex::Rect;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// Hex SHA-256 of the effective configuration.
    pub config_hash: String,
    /// Rule that admitted the panel as a bar chart.
    pub gated_by: String,
    /// File name of the source image.
    pub source: String,
    /// Panel box in the source image.
    pub panel: Rect,
    pub warnings: Vec<String>,
}

/// Contents of a `*.chart.json` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartDocument {
    pub title: Option<String>,
    pub x_label: Option<String>,
    pub y_label: Option<String>,
    pub x_ticks: Vec<String>,
    pub y_ticks: Vec<Tick>,
    pub bars: Vec<ChartBar>,
    #[serde(default)]
    pub blocks: Vec<TextBlock>,
    #[serde(default)]
    pub calibration: Option<Calibration>,
    pub provenance: Provenance,
}

impl ChartDocument {
    pub fn new(
        model: ChartModel,
        config_hash: &str,
        gated_by: &str,
        source: &str,
        panel: Rect,
    ) -> Self {
        ChartDocument {
            title: model.title,
            x_label: model.x_label,
            y_label: model.y_label,
            x_ticks: model.x_ticks,
            y_ticks: model.y_ticks,
            bars: model.bars,
            blocks: model.blocks,
            calibration: model.calibration,
            provenance: Provenance {
                config_hash: config_hash.to_string(),
                gated_by: gated_by.to_string(),
                source: source.to_string(),
                panel,
                warnings: model.warnings,
            },
        }
    }

    pub fn into_model(self) -> ChartModel {
        ChartModel {
            title: self.title,
            x_label: self.x_label,
            y_label: self.y_label,
            x_ticks: self.x_ticks,
            y_ticks: self.y_ticks,
            bars: self.bars,
            blocks: self.blocks,
            calibration: self.calibration,
            warnings: self.provenance.warnings,
        }
    }

    /// At least one bar carries a value.
    pub fn has_values(&self) -> bool {
        self.bars.iter().any(|b| b.value.is_some())
    }

    /// `category,category_name,group,value,value_source` rows.
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "category",
            "category_name",
            "group",
            "value",
            "value_source",
        ])?;
        for b in &self.bars {
            let name = self
                .x_ticks
                .get(b.category)
                .map(String::as_str)
                .unwrap_or("");
            let value = b
                .value
                .map(chartex::canonical::fmt_sig6)
                .unwrap_or_default();
            let source = serde_json::to_value(b.value_source)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default();
            w.write_record([
                &b.category.to_string(),
                name,
                &b.group.to_string(),
                &value,
                &source,
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chartex::semantics::{BarGeometry, ValueSource};

    fn model() -> ChartModel {
        let geometry = BarGeometry {
            x_left: 10,
            x_right: 20,
            y_top: 30,
            baseline_y: 90,
            height: 60,
        };
        ChartModel {
            title: Some("T".into()),
            x_label: None,
            y_label: Some("Y".into()),
            x_ticks: vec!["a, b".into()],
            y_ticks: vec![],
            bars: vec![ChartBar {
                category: 0,
                group: 0,
                value: Some(2.0 / 3.0),
                value_source: ValueSource::Calibrated,
                geometry,
            }],
            blocks: vec![],
            calibration: None,
            warnings: vec!["w".into()],
        }
    }

    #[test]
    fn round_trips_through_canonical_json() {
        let doc = ChartDocument::new(model(), "abc", "structural", "x.png", Rect::new(0, 0, 5, 5));
        let text = chartex::canonical::to_string(&doc).unwrap();
        let back: ChartDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back.provenance.warnings, vec!["w"]);
        let m = back.into_model();
        assert_eq!(m.bars[0].value, Some(0.666667));
        assert_eq!(m.warnings, vec!["w"]);
        for key in [
            "\"provenance\"",
            "\"config_hash\"",
            "\"gated_by\"",
            "\"value_source\"",
            "\"geometry\"",
        ] {
            assert!(text.contains(key), "{key}");
        }
    }

    #[test]
    fn csv_quotes_names() {
        let doc = ChartDocument::new(model(), "abc", "structural", "x.png", Rect::new(0, 0, 5, 5));
        let csv = doc.to_csv().unwrap();
        assert_eq!(
            csv,
            "category,category_name,group,value,value_source\n0,\"a, b\",0,0.666667,calibrated\n"
        );
    }
}
