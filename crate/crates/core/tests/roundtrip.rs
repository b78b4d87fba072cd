use chartex::chartgen::{render, sample_specs, write_corpus, CorpusRanges, GroundTruth};
use chartex::evalstats::{emit_report, match_chart, EvalReport, Matching, SdEstimator};
use chartex::pipeline::{Extractor, PanelStatus};
use chartex::rasterio::load_rgb;
use chartex::textscan::BuiltinOcr;
use chartex::{Config, RgbImage};

fn extract_all(images: &[(RgbImage, GroundTruth)]) -> (Matching, usize) {
    let cfg = Config::default();
    let ex = Extractor {
        config: &cfg,
        ocr: &BuiltinOcr,
        keep_debug: false,
    };
    let mut pooled = Matching::default();
    let mut extracted = 0;
    for (img, truth) in images {
        let result = ex.run(img);
        match result.charts.first() {
            Some(chart) => {
                extracted += 1;
                pooled.merge(match_chart(chart, truth));
            }
            None => pooled.merge(Matching::all_missed(truth)),
        }
    }
    (pooled, extracted)
}

#[test]
fn noisy_sample_reads_back_within_tolerance() {
    let ranges = CorpusRanges {
        noise: vec![0.02],
        ..CorpusRanges::default()
    };
    let images: Vec<_> = sample_specs(12, 314, &ranges)
        .iter()
        .map(|s| render(s).unwrap())
        .collect();
    let (matching, extracted) = extract_all(&images);
    assert_eq!(extracted, 12);
    let report = EvalReport::new(&matching, 12, extracted, 2.0, SdEstimator::Sample);
    let a = &report.accuracy;
    assert!(a.bars_detected.unwrap() >= 95.0, "{a:?}");
    assert!(a.bar_within_5pct.percent.unwrap() >= 90.0, "{a:?}");
    assert!(a.y_tick.percent.unwrap() >= 90.0, "{a:?}");
    let ba = report.bland_altman.expect("enough bars");
    assert!(ba.loa_low <= ba.bias && ba.bias <= ba.loa_high);
}

#[test]
fn written_corpus_extracts_like_the_in_memory_one() {
    let dir = tempfile::tempdir().unwrap();
    let stems = write_corpus(dir.path(), 3, 21, &CorpusRanges::default()).unwrap();
    let cfg = Config::default();
    let ex = Extractor {
        config: &cfg,
        ocr: &BuiltinOcr,
        keep_debug: false,
    };
    let mut pooled = Matching::default();
    for stem in &stems {
        let img = load_rgb(&dir.path().join(format!("{stem}.png"))).unwrap();
        let truth: GroundTruth = serde_json::from_str(
            &std::fs::read_to_string(dir.path().join(format!("{stem}.truth.json"))).unwrap(),
        )
        .unwrap();
        let result = ex.run(&img);
        assert_eq!(result.panels.len(), 1);
        assert_eq!(result.panels[0].status, PanelStatus::Accepted);
        pooled.merge(match_chart(&result.charts[0], &truth));
    }
    let report = EvalReport::new(&pooled, 3, 3, 2.0, SdEstimator::Sample);
    let out = dir.path().join("report");
    emit_report(&report, &out).unwrap();
    let text = std::fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(text.contains("BAR VALUE (<5% ERR)"));
    let csv = std::fs::read_to_string(out.join("bland_altman.csv")).unwrap();
    assert_eq!(csv.lines().count(), report.bar_pairs.len() + 1);
}

#[test]
fn a_chart_with_nothing_readable_is_all_missed() {
    let images = vec![(
        RgbImage::new(400, 300),
        render(&sample_specs(1, 5, &CorpusRanges::default())[0])
            .unwrap()
            .1,
    )];
    let (matching, extracted) = extract_all(&images);
    assert_eq!(extracted, 0);
    let report = EvalReport::new(&matching, 1, 0, 2.0, SdEstimator::Sample);
    assert_eq!(report.accuracy.bars_detected, Some(0.0));
    assert!(report.bland_altman.is_none());
}
