//! Per-run record of inputs, panel outcomes and stage timings.

use chartex::pipeline::{PanelStatus, StageTimings};
use chartex::Rect;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct PanelRecord {
    pub index: usize,
    pub bbox: Rect,
    /// `extracted`, `gated_out` or `failed`.
    pub outcome: &'static str,
    pub status: PanelStatus,
    pub bars: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputRecord {
    pub path: String,
    /// Set when the file could not be read or its outputs not written.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub panels: Vec<PanelRecord>,
    pub timings: StageTimings,
}

impl InputRecord {
    pub fn failed(path: String, error: String) -> Self {
        InputRecord {
            path,
            error: Some(error),
            panels: Vec::new(),
            timings: StageTimings::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub gated_by: String,
    pub inputs: Vec<InputRecord>,
    pub panels_extracted: usize,
    pub timings: StageTimings,
    pub wall_ms: f64,
}

impl RunManifest {
    pub fn new(
        command: &str,
        config_hash: String,
        gated_by: &str,
        inputs: Vec<InputRecord>,
        wall_ms: f64,
    ) -> Self {
        let panels_extracted = inputs
            .iter()
            .flat_map(|i| &i.panels)
            .filter(|p| p.status == PanelStatus::Accepted)
            .count();
        let mut t = StageTimings::default();
        for i in &inputs {
            t.panels_ms += i.timings.panels_ms;
            t.text_ms += i.timings.text_ms;
            t.axes_ms += i.timings.axes_ms;
            t.bars_ms += i.timings.bars_ms;
            t.semantics_ms += i.timings.semantics_ms;
        }
        RunManifest {
            command: command.to_string(),
            config_hash,
            gated_by: gated_by.to_string(),
            inputs,
            panels_extracted,
            timings: t,
            wall_ms,
        }
    }
}
