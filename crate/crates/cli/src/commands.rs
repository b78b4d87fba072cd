use crate::manifest::{InputRecord, PanelRecord, RunManifest};
use crate::schema::ChartDocument;
use crate::{Cli, CliError, Command, ExtractArgs, GlobalArgs, EXIT_EMPTY, EXIT_ERROR, EXIT_OK};
use chartex::chartgen::{write_corpus, CorpusRanges, GroundTruth};
use chartex::evalstats::{emit_report, match_chart, render_table, EvalReport, Matching};
use chartex::pipeline::{Extractor, PanelStatus, GATE};
use chartex::rasterio::{load_rgb, save_gray, save_rgb};
use chartex::semantics::ChartModel;
use chartex::textscan::{BuiltinOcr, ExternalOcr, OcrEngine};
use chartex::{canonical, Config};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const CHART_SUFFIX: &str = ".chart.json";
pub const TRUTH_SUFFIX: &str = ".truth.json";

/// Everything a command needs besides its own arguments.
pub struct Context {
    pub config: Config,
    pub config_hash: String,
    pub ocr: Box<dyn OcrEngine>,
    pub jobs: usize,
}

impl Context {
    pub fn new(global: &GlobalArgs, loa_z: Option<f64>) -> Result<Context, CliError> {
        let mut config = match &global.config {
            Some(path) => Config::load(path).map_err(|e| CliError::io(path, e))?,
            None => Config::default(),
        };
        if let Some(z) = loa_z {
            if !(z.is_finite() && z > 0.0 && z <= 10.0) {
                return Err(CliError::Usage(format!("--loa-z {z} must be in (0, 10]")));
            }
            config.loa_z = z;
        }
        let ocr: Box<dyn OcrEngine> = match global.ocr_cmd.as_deref().map(str::trim) {
            Some(cmd) if !cmd.is_empty() => Box::new(ExternalOcr::new(cmd)),
            _ => Box::new(BuiltinOcr),
        };
        Ok(Context {
            config_hash: config.hash(),
            config,
            ocr,
            jobs: global.jobs,
        })
    }

    fn pool(&self) -> Result<rayon::ThreadPool, CliError> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
            .map_err(|e| CliError::Usage(format!("--jobs {}: {e}", self.jobs)))
    }
}

pub fn dispatch(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Extract { inputs, opts } => {
            let ctx = Context::new(&cli.global, None)?;
            let run = extract(&ctx, &collect_inputs(&inputs)?, &opts)?;
            emit(&canonical::to_string(&run.manifest).expect("manifest serialises"));
            Ok(run.exit_code())
        }
        Command::Gen { out_dir, n, seed } => {
            let stems = write_corpus(&out_dir, n, seed, &CorpusRanges::default())
                .map_err(|e| CliError::io(&out_dir, e))?;
            let manifest = serde_json::json!({
                "out_dir": out_dir.display().to_string(),
                "n": n,
                "seed": seed,
                "stems": stems,
            });
            emit(&canonical::to_string(&manifest).expect("manifest serialises"));
            Ok(EXIT_OK)
        }
        Command::Eval {
            pred_dir,
            truth_dir,
            out,
            loa_z,
        } => {
            let ctx = Context::new(&cli.global, loa_z)?;
            let out = out.unwrap_or_else(|| pred_dir.clone());
            eval(&ctx, &pred_dir, &truth_dir, &out)
        }
        Command::Pipeline { dir, opts, loa_z } => {
            let ctx = Context::new(&cli.global, loa_z)?;
            pipeline(&ctx, &dir, &opts)
        }
    }
}

/// Write to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn is_png(p: &Path) -> bool {
    p.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("png"))
}

fn read_dir_sorted(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))? {
        let entry = entry.map_err(|e| CliError::io(dir, e))?;
        if entry
            .file_type()
            .map_err(|e| CliError::io(entry.path(), e))?
            .is_file()
        {
            out.push(entry.path());
        }
    }
    out.sort();
    Ok(out)
}

/// Files named directly plus every PNG inside named directories.
pub fn collect_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            files.extend(read_dir_sorted(p)?.into_iter().filter(|f| is_png(f)));
        } else if p.exists() {
            files.push(p.clone());
        } else {
            return Err(CliError::io(p, "no such file or directory"));
        }
    }
    Ok(files)
}

fn file_stem(p: &Path) -> String {
    p.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Output path of the `k`-th chart found in `input`.
pub fn chart_path(input: &Path, k: usize) -> PathBuf {
    let stem = file_stem(input);
    let name = if k == 0 {
        format!("{stem}{CHART_SUFFIX}")
    } else {
        format!("{stem}.p{}{CHART_SUFFIX}", k + 1)
    };
    input.with_file_name(name)
}

pub struct ExtractRun {
    pub manifest: RunManifest,
    /// Chart documents per input, in input order.
    pub documents: Vec<Vec<ChartDocument>>,
}

impl ExtractRun {
    pub fn exit_code(&self) -> u8 {
        if self.manifest.inputs.iter().any(|i| i.error.is_some()) {
            EXIT_ERROR
        } else if self
            .documents
            .iter()
            .flatten()
            .any(ChartDocument::has_values)
        {
            EXIT_OK
        } else {
            EXIT_EMPTY
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), String> {
    std::fs::write(path, contents).map_err(|e| format!("{}: {e}", path.display()))
}

fn process_file(
    ctx: &Context,
    path: &Path,
    opts: &ExtractArgs,
) -> (InputRecord, Vec<ChartDocument>) {
    let shown = path.display().to_string();
    let file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let page = match load_rgb(path) {
        Ok(p) => p,
        Err(e) => return (InputRecord::failed(shown, e.to_string()), Vec::new()),
    };
    let extractor = Extractor {
        config: &ctx.config,
        ocr: ctx.ocr.as_ref(),
        keep_debug: opts.debug_dir.is_some(),
    };
    let result = extractor.run(&page);

    let mut errors = Vec::new();
    let mut docs = Vec::new();
    let mut charts = result.charts.into_iter();
    let mut panels = Vec::new();
    for (index, p) in result.panels.iter().enumerate() {
        let mut record = PanelRecord {
            index,
            bbox: p.bbox,
            outcome: p.status.outcome(),
            status: p.status,
            bars: p.bars,
            output: None,
            error: p.error.clone(),
        };
        if p.status == PanelStatus::Accepted {
            let model = charts.next().expect("one chart per accepted panel");
            let doc = ChartDocument::new(model, &ctx.config_hash, GATE, &file_name, p.bbox);
            let out = chart_path(path, docs.len());
            let json = canonical::to_string(&doc).expect("document serialises");
            if let Err(e) = write_file(&out, &json) {
                errors.push(e);
            }
            if opts.csv {
                let csv = doc.to_csv().map_err(|e| e.to_string());
                if let Err(e) = csv.and_then(|c| write_file(&out.with_extension("csv"), &c)) {
                    errors.push(e);
                }
            }
            record.output = Some(out.display().to_string());
            docs.push(doc);
        }
        panels.push(record);
    }
    if let (Some(dir), Some(d)) = (&opts.debug_dir, &result.debug) {
        let stem = file_stem(path);
        let written = std::fs::create_dir_all(dir)
            .map_err(|e| format!("{}: {e}", dir.display()))
            .and_then(|_| {
                save_gray(
                    &d.text_mask.to_gray(),
                    &dir.join(format!("{stem}.text_mask.png")),
                )
                .map_err(|e| e.to_string())
            })
            .and_then(|_| {
                save_gray(
                    &d.edge_map.to_gray(),
                    &dir.join(format!("{stem}.edges.png")),
                )
                .map_err(|e| e.to_string())
            })
            .and_then(|_| {
                save_rgb(&d.overlay, &dir.join(format!("{stem}.overlay.png")))
                    .map_err(|e| e.to_string())
            });
        if let Err(e) = written {
            errors.push(e);
        }
    }
    let error = (!errors.is_empty()).then(|| errors.join("; "));
    (
        InputRecord {
            path: shown,
            error,
            panels,
            timings: result.timings,
        },
        docs,
    )
}

/// Run extraction over `files`, writing chart documents next to them.
pub fn extract(
    ctx: &Context,
    files: &[PathBuf],
    opts: &ExtractArgs,
) -> Result<ExtractRun, CliError> {
    let start = Instant::now();
    let results: Vec<(InputRecord, Vec<ChartDocument>)> = ctx.pool()?.install(|| {
        files
            .par_iter()
            .map(|f| process_file(ctx, f, opts))
            .collect()
    });
    let (inputs, documents): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    for i in &inputs {
        if let Some(e) = &i.error {
            eprintln!("chartex: {e}");
        }
    }
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(ExtractRun {
        manifest: RunManifest::new("extract", ctx.config_hash.clone(), GATE, inputs, wall_ms),
        documents,
    })
}

/// Files in `dir` whose names end in `suffix`, keyed by the rest of the name.
fn stems_with_suffix(dir: &Path, suffix: &str) -> Result<BTreeMap<String, PathBuf>, CliError> {
    Ok(read_dir_sorted(dir)?
        .into_iter()
        .filter_map(|p| {
            let name = p.file_name()?.to_str()?.to_string();
            name.strip_suffix(suffix).map(|s| (s.to_string(), p))
        })
        .collect())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::io(path, e))
}

/// Score each `(prediction, truth)` pair and pool the results. A missing
/// prediction counts every truth item as missed.
pub fn evaluate(
    items: &[(Option<ChartModel>, GroundTruth)],
    config: &Config,
    jobs_pool: &rayon::ThreadPool,
) -> EvalReport {
    let matchings: Vec<Matching> = jobs_pool.install(|| {
        items
            .par_iter()
            .map(|(pred, truth)| match pred {
                Some(m) => match_chart(m, truth),
                None => Matching::all_missed(truth),
            })
            .collect()
    });
    let mut pooled = Matching::default();
    for m in matchings {
        pooled.merge(m);
    }
    let extracted = items
        .iter()
        .filter(|(p, _)| p.as_ref().is_some_and(|m| !m.bars.is_empty()))
        .count();
    EvalReport::new(
        &pooled,
        items.len(),
        extracted,
        config.loa_z,
        config.sd_estimator,
    )
}

fn write_report(report: &EvalReport, out: &Path) -> Result<(), CliError> {
    emit_report(report, out).map_err(|e| CliError::io(out, e))?;
    emit(&render_table(report));
    Ok(())
}

pub fn eval(ctx: &Context, pred_dir: &Path, truth_dir: &Path, out: &Path) -> Result<u8, CliError> {
    let preds = stems_with_suffix(pred_dir, CHART_SUFFIX)?;
    let truths = stems_with_suffix(truth_dir, TRUTH_SUFFIX)?;
    let mut notes = Vec::new();
    for stem in preds.keys().filter(|s| !truths.contains_key(*s)) {
        notes.push(format!("skipped prediction {stem}: no truth file"));
    }
    for stem in truths.keys().filter(|s| !preds.contains_key(*s)) {
        notes.push(format!("skipped truth {stem}: no prediction file"));
    }
    for n in &notes {
        eprintln!("chartex: warning: {n}");
    }
    let mut items = Vec::new();
    for (stem, pred_path) in &preds {
        if let Some(truth_path) = truths.get(stem) {
            let doc: ChartDocument = read_json(pred_path)?;
            items.push((
                Some(doc.into_model()),
                read_json::<GroundTruth>(truth_path)?,
            ));
        }
    }
    if items.is_empty() {
        eprintln!("chartex: no prediction and truth files share a stem");
        return Ok(EXIT_EMPTY);
    }
    let mut report = evaluate(&items, &ctx.config, &ctx.pool()?);
    report.notes.extend(notes);
    write_report(&report, out)?;
    Ok(EXIT_OK)
}

pub fn pipeline(ctx: &Context, dir: &Path, opts: &ExtractArgs) -> Result<u8, CliError> {
    if !dir.is_dir() {
        return Err(CliError::io(dir, "not a directory"));
    }
    let files = collect_inputs(&[dir.to_path_buf()])?;
    let run = extract(ctx, &files, opts)?;
    let mut manifest = run.manifest.clone();
    manifest.command = "pipeline".into();
    let manifest_path = dir.join("manifest.json");
    write_file(
        &manifest_path,
        &canonical::to_string(&manifest).expect("manifest serialises"),
    )
    .map_err(|e| CliError::Io {
        path: manifest_path.display().to_string(),
        message: e,
    })?;
    let extract_code = run.exit_code();
    if extract_code == EXIT_ERROR {
        return Ok(EXIT_ERROR);
    }

    let truths = stems_with_suffix(dir, TRUTH_SUFFIX)?;
    if truths.is_empty() {
        return Ok(extract_code);
    }
    let mut by_stem: BTreeMap<String, Option<ChartModel>> = BTreeMap::new();
    for (file, docs) in files.iter().zip(&run.documents) {
        let first = docs
            .first()
            .map(|_| read_json::<ChartDocument>(&chart_path(file, 0)))
            .transpose()?;
        by_stem.insert(file_stem(file), first.map(ChartDocument::into_model));
    }
    let mut items = Vec::new();
    let mut notes = Vec::new();
    for (stem, truth_path) in &truths {
        match by_stem.remove(stem) {
            Some(pred) => items.push((pred, read_json::<GroundTruth>(truth_path)?)),
            None => notes.push(format!("skipped truth {stem}: no image")),
        }
    }
    for n in &notes {
        eprintln!("chartex: warning: {n}");
    }
    if items.is_empty() {
        return Ok(EXIT_EMPTY);
    }
    let mut report = evaluate(&items, &ctx.config, &ctx.pool()?);
    report.notes.extend(notes);
    write_report(&report, dir)?;
    Ok(if report.charts_extracted == 0 {
        EXIT_EMPTY
    } else {
        EXIT_OK
    })
}
