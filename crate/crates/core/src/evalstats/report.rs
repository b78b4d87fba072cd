use super::matching::{Matching, Measure, ObjectClass};
use super::stats::{
    accuracy, bland_altman, bland_altman_points, AccuracyReport, BlandAltman, ClassScore,
    SdEstimator,
};
use crate::canonical::{self, fmt_sig6};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::io;
use std::path::Path;

pub const ERROR_MEASURE: &str = "relative error |e - t| / max(|t|, 1e-9)";
pub const CHART_GATE: &str = "structural gate: a panel counts as a bar chart when axes are found and at least two bars stand on the x-axis";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub charts: usize,
    /// Charts where the pipeline produced a model.
    pub charts_extracted: usize,
    pub error_measure: String,
    pub chart_gate: String,
    pub accuracy: AccuracyReport,
    pub bland_altman: Option<BlandAltman>,
    pub notes: Vec<String>,
    /// `(truth, extracted)` bar values behind the agreement statistics.
    #[serde(skip)]
    pub bar_pairs: Vec<(f64, f64)>,
}

impl EvalReport {
    pub fn new(
        matching: &Matching,
        charts: usize,
        charts_extracted: usize,
        z: f64,
        estimator: SdEstimator,
    ) -> Self {
        let bar_pairs: Vec<(f64, f64)> = matching
            .pairs
            .iter()
            .filter(|p| p.class == ObjectClass::BarValue)
            .filter_map(|p| match (&p.truth, &p.extracted) {
                (Measure::Number(t), Measure::Number(e)) => Some((*t, *e)),
                _ => None,
            })
            .collect();
        let mut notes = Vec::new();
        let ba = match bland_altman(&bar_pairs, z, estimator) {
            Ok(b) => Some(b),
            Err(e) => {
                notes.push(format!("bland-altman not computed: {e}"));
                None
            }
        };
        if matching.extra_bars > 0 {
            notes.push(format!(
                "{} extracted bar(s) had no truth counterpart",
                matching.extra_bars
            ));
        }
        EvalReport {
            charts,
            charts_extracted,
            error_measure: ERROR_MEASURE.into(),
            chart_gate: CHART_GATE.into(),
            accuracy: accuracy(matching),
            bland_altman: ba,
            notes,
            bar_pairs,
        }
    }
}

fn pct_cell(p: Option<f64>) -> String {
    p.map(|v| format!("{v:.1}%"))
        .unwrap_or_else(|| "n/a".into())
}

/// Fixed-width accuracy table followed by the agreement summary.
pub fn render_table(r: &EvalReport) -> String {
    let a = &r.accuracy;
    let rows: [(&str, &ClassScore); 7] = [
        ("X-TICK VALUE", &a.x_tick),
        ("X-AXIS LABEL", &a.x_label),
        ("Y-TICK VALUE", &a.y_tick),
        ("Y-AXIS LABEL", &a.y_label),
        ("BAR VALUE (<1% ERR)", &a.bar_within_1pct),
        ("BAR VALUE (<2% ERR)", &a.bar_within_2pct),
        ("BAR VALUE (<5% ERR)", &a.bar_within_5pct),
    ];
    let mut s = String::new();
    let _ = writeln!(s, "charts: {}  extracted: {}", r.charts, r.charts_extracted);
    let _ = writeln!(s, "error measure: {}", r.error_measure);
    let _ = writeln!(s, "note: {}", r.chart_gate);
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "{:<22}{:>8}{:>10}{:>10}",
        "OBJECT", "PAIRS", "CORRECT", "ACCURACY"
    );
    for (name, c) in rows {
        let _ = writeln!(
            s,
            "{:<22}{:>8}{:>10}{:>10}",
            name,
            c.pairs,
            c.correct,
            pct_cell(c.percent)
        );
    }
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "{:<22}{:>8}{:>10}{:>10}",
        "TITLE",
        a.title.pairs,
        a.title.correct,
        pct_cell(a.title.percent)
    );
    let _ = writeln!(
        s,
        "bars detected: {} of {}",
        pct_cell(a.bars_detected),
        a.truth_bars
    );
    let _ = writeln!(
        s,
        "text detected: {} of {}",
        pct_cell(a.text_detected),
        a.truth_texts
    );
    let _ = writeln!(s);
    match &r.bland_altman {
        Some(b) => {
            let _ = writeln!(s, "bland-altman (extracted - truth), n = {}", b.n);
            let _ = writeln!(s, "  bias   {}", fmt_sig6(b.bias));
            let _ = writeln!(s, "  sd     {}", fmt_sig6(b.sd));
            let _ = writeln!(
                s,
                "  limits {} .. {} (bias +/- {} sd)",
                fmt_sig6(b.loa_low),
                fmt_sig6(b.loa_high),
                fmt_sig6(b.z)
            );
            let _ = writeln!(s, "  within {:.1}%", b.pct_within);
        }
        None => {
            let _ = writeln!(s, "bland-altman: n/a");
        }
    }
    for n in &r.notes {
        let _ = writeln!(s, "note: {n}");
    }
    s
}

/// `mean,difference` rows for an agreement plot.
pub fn bland_altman_csv(pairs: &[(f64, f64)]) -> String {
    let mut s = String::from("mean,difference\n");
    for (m, d) in bland_altman_points(pairs) {
        let _ = writeln!(s, "{},{}", fmt_sig6(m), fmt_sig6(d));
    }
    s
}

/// Write `report.json`, `report.txt` and `bland_altman.csv` into `dir`.
pub fn emit_report(r: &EvalReport, dir: &Path) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let json = canonical::to_string(r).map_err(io::Error::other)?;
    std::fs::write(dir.join("report.json"), json)?;
    std::fs::write(dir.join("report.txt"), render_table(r))?;
    std::fs::write(dir.join("bland_altman.csv"), bland_altman_csv(&r.bar_pairs))?;
    Ok(())
}
