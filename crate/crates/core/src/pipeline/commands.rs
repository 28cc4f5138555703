//! One function per CLI subcommand. Each returns the text meant for stdout
//! plus any warnings; files named in the options are written here, once,
//! after all computation has finished.

use std::collections::BTreeMap;
use std::fs;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::config::RunConfig;
use super::provenance::Provenance;
use super::PipelineError;
use crate::evolve::optimize_and_verify;
use crate::photonics::{evaluate_geometry, CavityFigures, CavityGeometry, IndexModel};
use crate::qed::map::indist_map_with_method;
use crate::qed::threshold::min_coupling_threshold_with_method;
use crate::qed::{indistinguishability, iso_region, MapGrid, Method, QedError, RateSet, SearchBounds, DEFAULT_TOL};
use crate::surrogate::dataset::{format_float, read_csv, write_csv};
use crate::surrogate::{self, init_model, Activation, Dataset, DatasetMeta, DatasetRow, RowFigures, SurrogateModel};

/// Failure rate above which dataset generation gives up.
pub const MAX_FAILURE_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Output {
    pub text: String,
    pub warnings: Vec<String>,
}

impl Output {
    fn json(value: &Value) -> Self {
        Self { text: pretty(value), warnings: Vec::new() }
    }
}

fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("values serialize");
    s.push('\n');
    s
}

fn write_file(path: &str, contents: &str) -> Result<(), PipelineError> {
    fs::write(path, contents).map_err(|e| PipelineError::Io(format!("{path}: {e}")))
}

fn read_file(path: &str) -> Result<String, PipelineError> {
    fs::read_to_string(path).map_err(|e| PipelineError::Io(format!("{path}: {e}")))
}

fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool, PipelineError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| PipelineError::Numerical(format!("thread pool: {e}")))
}

/// Config as echoed into outputs. The worker count never changes results,
/// so it is left out to keep outputs byte-identical across `jobs`.
fn echoed(cfg: &RunConfig) -> RunConfig {
    RunConfig { jobs: None, ..cfg.clone() }
}

// ---------------------------------------------------------------- indist

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndistArgs {
    pub g: f64,
    pub kappa: f64,
    pub gammastar: f64,
    pub method: Method,
    pub tol: f64,
}

pub fn cmd_indist(args: &IndistArgs) -> Result<Output, PipelineError> {
    let rates = RateSet::new(args.g, args.kappa, args.gammastar)?;
    let result = indistinguishability(&rates, args.method, args.tol)?;
    let prov = Provenance::new("indist", args, None);
    Ok(Output::json(&prov.wrap("result", &result)))
}

// ---------------------------------------------------------------- map

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapArgs {
    pub gammastar: f64,
    pub g_range: (f64, f64),
    pub kappa_range: (f64, f64),
    pub n: usize,
    pub threshold: f64,
    pub method: Method,
    pub tol: f64,
}

impl Default for MapArgs {
    fn default() -> Self {
        Self {
            gammastar: 1e4,
            g_range: (1e2, 1e7),
            kappa_range: (1e2, 1e8),
            n: 60,
            threshold: 0.9,
            method: Method::Eigen,
            tol: DEFAULT_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSummary {
    /// `"empty"` or `"found"`.
    pub region: String,
    pub threshold: f64,
    pub cells: usize,
    pub min_g: Option<f64>,
    pub min_kappa: Option<f64>,
    pub boundary_points: usize,
    pub failed_cells: usize,
}

impl RegionSummary {
    fn marker(&self) -> String {
        match (self.min_g, self.min_kappa) {
            (Some(g), Some(k)) => format!("region: found cells={} min_g={g} min_kappa={k}", self.cells),
            _ => "region: empty".into(),
        }
    }
}

/// Long-format CSV of a map.
pub fn map_csv(map: &MapGrid, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str(&format!("# {c}\n"));
    }
    out.push_str("g_over_gamma,kappa_over_gamma,indist\n");
    for (i, g) in map.g_axis.iter().enumerate() {
        for (j, k) in map.kappa_axis.iter().enumerate() {
            let v = map.values[i][j].unwrap_or(f64::NAN);
            out.push_str(&format!("{},{},{}\n", format_float(*g), format_float(*k), format_float(v)));
        }
    }
    out
}

pub struct MapOutcome {
    pub map: MapGrid,
    pub summary: RegionSummary,
    pub csv: String,
}

pub fn run_map(args: &MapArgs, jobs: usize) -> Result<MapOutcome, PipelineError> {
    let map = thread_pool(jobs)?.install(|| {
        indist_map_with_method(args.gammastar, args.g_range, args.kappa_range, args.n, args.tol, args.method)
    })?;
    let region = iso_region(&map, args.threshold)?;
    let summary = RegionSummary {
        region: if region.is_empty() { "empty" } else { "found" }.into(),
        threshold: args.threshold,
        cells: region.cells.len(),
        min_g: region.min_g,
        min_kappa: region.min_kappa,
        boundary_points: region.boundary.iter().map(Vec::len).sum(),
        failed_cells: map.failed_cells(),
    };
    let prov = Provenance::new("map", args, None);
    let mut comments = prov.comments();
    comments.push(summary.marker());
    let csv = map_csv(&map, &comments);
    Ok(MapOutcome { map, summary, csv })
}

/// Writes the CSV to `out` and prints the region summary, or prints the CSV
/// when no path is given.
pub fn cmd_map(args: &MapArgs, out: Option<&str>, jobs: usize) -> Result<Output, PipelineError> {
    let outcome = run_map(args, jobs)?;
    let mut warnings = Vec::new();
    if outcome.summary.failed_cells > 0 {
        warnings.push(format!("{} map cells failed and are written as nan", outcome.summary.failed_cells));
    }
    let text = match out {
        Some(path) => {
            write_file(path, &outcome.csv)?;
            let prov = Provenance::new("map", args, None);
            pretty(&prov.wrap("summary", &outcome.summary))
        }
        None => outcome.csv,
    };
    Ok(Output { text, warnings })
}

// ---------------------------------------------------------------- threshold

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdArgs {
    pub gammastar: f64,
    pub target: f64,
    pub bounds: SearchBounds,
    pub method: Method,
}

pub fn cmd_threshold(args: &ThresholdArgs) -> Result<Output, PipelineError> {
    let prov = Provenance::new("threshold", args, None);
    let body = match min_coupling_threshold_with_method(args.gammastar, args.target, args.bounds, args.method) {
        Ok(r) => json!({"region": "found", "result": r}),
        Err(QedError::UnreachableTarget { best, .. }) => json!({"region": "empty", "best_indist": best}),
        Err(e) => return Err(e.into()),
    };
    Ok(Output::json(&prov.wrap("threshold", &body)))
}

// ---------------------------------------------------------------- dataset-gen

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DatasetOpts {
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out: Option<String>,
}

pub struct GeneratedDataset {
    pub rows: Vec<DatasetRow>,
    /// `(row id, error)` for every failed evaluation.
    pub failures: Vec<(usize, String)>,
    pub model: IndexModel,
    pub csv: String,
    pub warnings: Vec<String>,
}

/// Row `id`'s corrugation vector: its own ChaCha8 stream, so a row does
/// not depend on which thread drew the others.
pub fn sample_widths(seed: u64, id: usize, periods: usize, bounds: (f64, f64)) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id as u64);
    (0..periods).map(|_| if bounds.0 == bounds.1 { bounds.0 } else { rng.random_range(bounds.0..=bounds.1) }).collect()
}

fn failure_digest(failures: &[(usize, String)]) -> String {
    let mut by_cause: BTreeMap<String, usize> = BTreeMap::new();
    for (_, e) in failures {
        let key = e.split(':').next().unwrap_or(e).to_string();
        *by_cause.entry(key).or_default() += 1;
    }
    let first = failures.first().map_or(String::new(), |(id, e)| format!("; first: row {id}: {e}"));
    let counts: Vec<String> = by_cause.iter().map(|(k, n)| format!("{k} x{n}")).collect();
    format!("{}{first}", counts.join(", "))
}

pub fn generate_dataset(cfg: &RunConfig, opts: &DatasetOpts) -> Result<GeneratedDataset, PipelineError> {
    let mut cfg = cfg.clone();
    if let Some(n) = opts.n {
        cfg.dataset_size = n;
    }
    if let Some(s) = opts.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    let jobs = cfg.resolve_jobs(opts.jobs)?;
    let emitter = cfg.emitter_spec()?;
    let model = cfg.index_model()?;
    let bounds = cfg.ga.bounds;
    let template = &cfg.geometry;
    let mut warnings = Vec::new();
    if bounds.0 == bounds.1 {
        warnings.push(format!("width bounds are degenerate ({} nm): every row is identical, zero input variance", bounds.0));
    }

    let n = cfg.dataset_size;
    let rows: Vec<(DatasetRow, Option<String>)> = thread_pool(jobs)?.install(|| {
        (0..n)
            .into_par_iter()
            .map(|id| {
                let widths = sample_widths(cfg.seed, id, template.periods, bounds);
                match evaluate_geometry(&template.with_widths(&widths), &emitter, &model, cfg.qed_tol) {
                    Ok(f) => (DatasetRow { id, widths, figures: Some(RowFigures::from(&f)) }, None),
                    Err(e) => (DatasetRow { id, widths, figures: None }, Some(e.to_string())),
                }
            })
            .collect()
    });
    let failures: Vec<(usize, String)> =
        rows.iter().filter_map(|(r, e)| e.as_ref().map(|e| (r.id, e.clone()))).collect();
    if failures.len() as f64 > MAX_FAILURE_FRACTION * n as f64 {
        return Err(PipelineError::Numerical(format!(
            "{} of {n} evaluations failed: {}",
            failures.len(),
            failure_digest(&failures)
        )));
    }
    if !failures.is_empty() {
        warnings.push(format!("{} of {n} rows failed and carry nan: {}", failures.len(), failure_digest(&failures)));
    }
    let rows: Vec<DatasetRow> = rows.into_iter().map(|(r, _)| r).collect();

    let prov = Provenance::new("dataset-gen", &echoed(&cfg), Some(cfg.seed));
    let mut comments = prov.comments();
    comments.push(format!("emitter: {}", emitter.name));
    comments.push(format!("bounds_nm: {},{}", bounds.0, bounds.1));
    comments.push(format!("invalid_rows: {}", failures.len()));
    let mut buf = Vec::new();
    write_csv(&mut buf, &comments, &rows)?;
    let csv = String::from_utf8(buf).expect("csv output is utf-8");
    Ok(GeneratedDataset { rows, failures, model, csv, warnings })
}

pub fn cmd_dataset_gen(cfg: &RunConfig, opts: &DatasetOpts) -> Result<Output, PipelineError> {
    let out_path = opts.out.clone().or_else(|| cfg.paths.dataset.clone());
    let data = generate_dataset(cfg, opts)?;
    let text = match out_path {
        Some(path) => {
            write_file(&path, &data.csv)?;
            let valid = data.rows.len() - data.failures.len();
            format!("wrote {} rows ({valid} valid) to {path}\n", data.rows.len())
        }
        None => data.csv,
    };
    Ok(Output { text, warnings: data.warnings })
}

/// Reads a dataset CSV and keeps its valid rows.
pub fn load_dataset(path: &str) -> Result<Dataset, PipelineError> {
    let text = read_file(path)?;
    let (_, rows) = read_csv(text.as_bytes()).map_err(|e| PipelineError::Config(format!("{path}: {e}")))?;
    Ok(Dataset::from_rows(&rows, DatasetMeta::default())?)
}

// ---------------------------------------------------------------- train

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainOpts {
    pub dataset: Option<String>,
    pub model_out: Option<String>,
    pub history_out: Option<String>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainSummary {
    pub rows: usize,
    pub train_rows: usize,
    pub holdout_rows: usize,
    pub epochs_run: usize,
    pub best_epoch: usize,
    pub stopped_early: bool,
    pub train_rmse: f64,
    pub holdout_rmse: Option<f64>,
    pub parameters: usize,
}

pub fn run_train(cfg: &RunConfig, data: &Dataset) -> Result<(SurrogateModel, surrogate::TrainHistory), PipelineError> {
    if data.features() != cfg.geometry.periods {
        return Err(PipelineError::Config(format!(
            "dataset has {} widths per row, the geometry template has {} periods",
            data.features(),
            cfg.geometry.periods
        )));
    }
    let net = init_model(&cfg.layer_sizes(), Activation::Tanh, cfg.train.seed)?;
    Ok(surrogate::train(&net, data, &cfg.train)?)
}

pub fn cmd_train(cfg: &RunConfig, opts: &TrainOpts) -> Result<Output, PipelineError> {
    let mut cfg = cfg.clone();
    if let Some(s) = opts.seed {
        cfg.train.seed = s;
    }
    cfg.validate()?;
    let dataset_path = opts
        .dataset
        .clone()
        .or_else(|| cfg.paths.dataset.clone())
        .ok_or_else(|| PipelineError::Config("no dataset path: pass --dataset or set paths.dataset".into()))?;
    let data = load_dataset(&dataset_path)?;
    let (net, history) = run_train(&cfg, &data)?;
    let summary = TrainSummary {
        rows: data.len(),
        train_rows: history.train_rows.len(),
        holdout_rows: history.holdout_rows.len(),
        epochs_run: history.train_loss.len() - 1,
        best_epoch: history.best_epoch,
        stopped_early: history.stopped_early,
        train_rmse: history.train_rmse(),
        holdout_rmse: history.holdout_rmse(),
        parameters: net.num_parameters(),
    };
    let prov = Provenance::new("train", &json!({"run": echoed(&cfg), "dataset": dataset_path}), Some(cfg.train.seed));
    if let Some(path) = opts.model_out.clone().or_else(|| cfg.paths.model.clone()) {
        let text = surrogate::to_json_with_provenance(&net, Some(serde_json::to_value(&prov).unwrap()))?;
        write_file(&path, &format!("{text}\n"))?;
    }
    if let Some(path) = &opts.history_out {
        let mut csv = String::new();
        for c in prov.comments() {
            csv.push_str(&format!("# {c}\n"));
        }
        csv.push_str("epoch,train_loss,holdout_loss\n");
        for (e, t) in history.train_loss.iter().enumerate() {
            let h = history.holdout_loss.get(e).copied().unwrap_or(f64::NAN);
            csv.push_str(&format!("{e},{},{}\n", format_float(*t), format_float(h)));
        }
        write_file(path, &csv)?;
    }
    Ok(Output::json(&prov.wrap("training", &summary)))
}

// ---------------------------------------------------------------- surrogate-eval

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateMetrics {
    pub rows: usize,
    pub rmse: f64,
    pub mae: f64,
    pub max_abs_error: f64,
}

pub fn surrogate_metrics(net: &SurrogateModel, data: &Dataset) -> Result<SurrogateMetrics, PipelineError> {
    if data.is_empty() {
        return Err(PipelineError::Config("dataset has no valid rows".into()));
    }
    let mut sq = 0.0;
    let mut abs = 0.0;
    let mut worst: f64 = 0.0;
    for (x, y) in data.inputs.iter().zip(&data.targets) {
        let d = (net.predict(x)? - y).abs();
        sq += d * d;
        abs += d;
        worst = worst.max(d);
    }
    let n = data.len() as f64;
    Ok(SurrogateMetrics { rows: data.len(), rmse: (sq / n).sqrt(), mae: abs / n, max_abs_error: worst })
}

pub fn cmd_surrogate_eval(model_path: &str, dataset_path: &str) -> Result<Output, PipelineError> {
    let net = load_model(model_path)?;
    let data = load_dataset(dataset_path)?;
    let metrics = surrogate_metrics(&net, &data)?;
    let prov = Provenance::new("surrogate-eval", &json!({"model": model_path, "dataset": dataset_path}), None);
    Ok(Output::json(&prov.wrap("metrics", &metrics)))
}

pub fn load_model(path: &str) -> Result<SurrogateModel, PipelineError> {
    let text = read_file(path)?;
    surrogate::from_json(&text).map_err(|e| PipelineError::Config(format!("{path}: {e}")))
}

// ---------------------------------------------------------------- optimize

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OptimizeOpts {
    pub model: Option<String>,
    pub report_out: Option<String>,
    pub history_out: Option<String>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
}

pub fn cmd_optimize(cfg: &RunConfig, opts: &OptimizeOpts) -> Result<Output, PipelineError> {
    let mut cfg = cfg.clone();
    if let Some(s) = opts.seed {
        cfg.ga.seed = s;
    }
    cfg.validate()?;
    let model_path = opts
        .model
        .clone()
        .or_else(|| cfg.paths.model.clone())
        .ok_or_else(|| PipelineError::Config("no model path: pass --model or set paths.model".into()))?;
    let net = load_model(&model_path)?;
    let emitter = cfg.emitter_spec()?;
    let index = cfg.index_model()?;
    let jobs = cfg.resolve_jobs(opts.jobs)?;
    let report = thread_pool(jobs)?
        .install(|| optimize_and_verify(&cfg.ga, &net, &cfg.geometry, &emitter, &index, cfg.top_k, cfg.qed_tol))?;
    let prov = Provenance::new("optimize", &json!({"run": echoed(&cfg), "model": model_path}), Some(cfg.ga.seed));
    let full = pretty(&prov.wrap("report", &report));
    if let Some(path) = &opts.history_out {
        let mut csv: String = prov.comments().iter().map(|c| format!("# {c}\n")).collect();
        csv.push_str(&report.ga.history_csv());
        write_file(path, &csv)?;
    }
    let text = match opts.report_out.clone().or_else(|| cfg.paths.report.clone()) {
        Some(path) => {
            write_file(&path, &full)?;
            let summary = json!({
                "winner_indist": report.winner_figures.indist,
                "baseline_indist": report.baseline.as_ref().map(|b| b.indist),
                "winner_omega": report.candidates[report.winner].omega,
                "resonance_shift_nm": report.resonance_shift_nm,
                "physics_evaluations": report.physics_evaluations,
                "surrogate_evaluations": report.surrogate_evaluations,
                "report": path,
            });
            pretty(&prov.wrap("summary", &summary))
        }
        None => full,
    };
    let mut warnings = Vec::new();
    if let Some(b) = &report.baseline {
        if report.winner_figures.indist < b.indist {
            warnings.push(format!(
                "verified winner I = {} is below the uniform baseline I = {}",
                report.winner_figures.indist, b.indist
            ));
        }
    }
    Ok(Output { text, warnings })
}

// ---------------------------------------------------------------- verify / cavity-eval

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub geometry: CavityGeometry,
    pub figures: CavityFigures,
    pub resonance_shift_nm: f64,
}

pub fn evaluate_report(cfg: &RunConfig, geometry: &CavityGeometry) -> Result<EvaluationReport, PipelineError> {
    let emitter = cfg.emitter_spec()?;
    let model = cfg.index_model()?;
    let figures = evaluate_geometry(geometry, &emitter, &model, cfg.qed_tol)?;
    Ok(EvaluationReport { resonance_shift_nm: figures.resonance_shift_nm(geometry), geometry: geometry.clone(), figures })
}

/// Physics evaluation of the template carrying the given corrugation widths.
pub fn cmd_verify(cfg: &RunConfig, widths: &[f64]) -> Result<Output, PipelineError> {
    cfg.validate()?;
    if widths.len() != cfg.geometry.periods {
        return Err(PipelineError::Config(format!(
            "{} widths given, the template has {} periods",
            widths.len(),
            cfg.geometry.periods
        )));
    }
    let geometry = cfg.geometry.with_widths(widths);
    geometry.validate(Some(cfg.ga.bounds))?;
    let report = evaluate_report(cfg, &geometry)?;
    let prov = Provenance::new("verify", &json!({"run": echoed(cfg), "widths": widths}), Some(cfg.seed));
    Ok(Output::json(&prov.wrap("evaluation", &report)))
}

pub fn cmd_cavity_eval(cfg: &RunConfig) -> Result<Output, PipelineError> {
    cfg.validate()?;
    let report = evaluate_report(cfg, &cfg.geometry)?;
    let prov = Provenance::new("cavity-eval", &echoed(cfg), Some(cfg.seed));
    Ok(Output::json(&prov.wrap("evaluation", &report)))
}

pub fn cmd_calibrate(cfg: &RunConfig) -> Result<Output, PipelineError> {
    cfg.validate()?;
    let model = cfg.index_model()?;
    let prov = Provenance::new("calibrate", &echoed(cfg), None);
    Ok(Output::json(&prov.wrap("index_model", &model)))
}

// ---------------------------------------------------------------- sweep

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    SlotWidthNm,
    WaveguideWidthNm,
    Periods,
    PeriodNm,
    CavityLengthNm,
    ThicknessNm,
    /// All corrugations set to the same width.
    CorrugationWidthNm,
}

impl SweepParam {
    pub const ALL: [SweepParam; 7] = [
        SweepParam::SlotWidthNm,
        SweepParam::WaveguideWidthNm,
        SweepParam::Periods,
        SweepParam::PeriodNm,
        SweepParam::CavityLengthNm,
        SweepParam::ThicknessNm,
        SweepParam::CorrugationWidthNm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::SlotWidthNm => "slot_width_nm",
            SweepParam::WaveguideWidthNm => "waveguide_width_nm",
            SweepParam::Periods => "periods",
            SweepParam::PeriodNm => "period_nm",
            SweepParam::CavityLengthNm => "cavity_length_nm",
            SweepParam::ThicknessNm => "thickness_nm",
            SweepParam::CorrugationWidthNm => "corrugation_width_nm",
        }
    }

    /// The template with this field set to `value`. A new period count
    /// keeps the template's mean corrugation width.
    pub fn apply(self, template: &CavityGeometry, value: f64) -> CavityGeometry {
        let mut g = template.clone();
        match self {
            SweepParam::SlotWidthNm => g.slot_width_nm = value,
            SweepParam::WaveguideWidthNm => g.waveguide_width_nm = value,
            SweepParam::PeriodNm => g.period_nm = value,
            SweepParam::CavityLengthNm => g.cavity_length_nm = value,
            SweepParam::ThicknessNm => g.thickness_nm = value,
            SweepParam::Periods => {
                let w = &template.corrugation_widths_nm;
                let mean = w.iter().sum::<f64>() / w.len().max(1) as f64;
                g = template.with_uniform_periods(value.round().max(0.0) as usize, mean);
            }
            SweepParam::CorrugationWidthNm => g = template.with_uniform_periods(template.periods, value),
        }
        g
    }
}

impl std::str::FromStr for SweepParam {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(|p| p.name()).collect();
            PipelineError::Config(format!("unknown sweep parameter '{s}' (known: {})", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepArgs {
    pub param: SweepParam,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub figures: Option<CavityFigures>,
    pub error: Option<String>,
}

pub fn sweep_values(args: &SweepArgs) -> Result<Vec<f64>, PipelineError> {
    if !(args.from.is_finite() && args.to.is_finite()) || args.steps == 0 {
        return Err(PipelineError::Config("sweep needs finite bounds and steps >= 1".into()));
    }
    let mut values: Vec<f64> = if args.steps == 1 {
        vec![args.from]
    } else {
        (0..args.steps)
            .map(|k| args.from + (args.to - args.from) * k as f64 / (args.steps - 1) as f64)
            .collect()
    };
    if args.param == SweepParam::Periods {
        values.iter_mut().for_each(|v| *v = v.round());
        values.dedup();
    }
    Ok(values)
}

pub fn run_sweep(cfg: &RunConfig, args: &SweepArgs, jobs: usize) -> Result<Vec<SweepRow>, PipelineError> {
    cfg.validate()?;
    let values = sweep_values(args)?;
    let emitter = cfg.emitter_spec()?;
    let model = cfg.index_model()?;
    let rows = thread_pool(jobs)?.install(|| {
        values
            .par_iter()
            .map(|&value| {
                let geometry = args.param.apply(&cfg.geometry, value);
                match evaluate_geometry(&geometry, &emitter, &model, cfg.qed_tol) {
                    Ok(f) => SweepRow { value, figures: Some(f), error: None },
                    Err(e) => SweepRow { value, figures: None, error: Some(e.to_string()) },
                }
            })
            .collect()
    });
    Ok(rows)
}

pub fn sweep_csv(param: SweepParam, rows: &[SweepRow], comments: &[String]) -> String {
    let mut out: String = comments.iter().map(|c| format!("# {c}\n")).collect();
    out.push_str("param,value,indist,q,veff_norm,g_over_gamma,kappa_over_gamma\n");
    for r in rows {
        let f = r.figures.as_ref();
        let col = |pick: fn(&CavityFigures) -> f64| format_float(f.map_or(f64::NAN, pick));
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            param.name(),
            format_float(r.value),
            col(|f| f.indist),
            col(|f| f.q),
            col(|f| f.veff_norm),
            col(|f| f.g_over_gamma),
            col(|f| f.kappa_over_gamma),
        ));
    }
    out
}

pub fn cmd_sweep(cfg: &RunConfig, args: &SweepArgs, out: Option<&str>, jobs: Option<usize>) -> Result<Output, PipelineError> {
    let jobs = cfg.resolve_jobs(jobs)?;
    let rows = run_sweep(cfg, args, jobs)?;
    let prov = Provenance::new("sweep", &json!({"run": echoed(cfg), "sweep": args}), Some(cfg.seed));
    let csv = sweep_csv(args.param, &rows, &prov.comments());
    let warnings = rows
        .iter()
        .filter_map(|r| r.error.as_ref().map(|e| format!("{} = {}: {e}", args.param.name(), r.value)))
        .collect();
    let text = match out {
        Some(path) => {
            write_file(path, &csv)?;
            format!("wrote {} sweep rows to {path}\n", rows.len())
        }
        None => csv,
    };
    Ok(Output { text, warnings })
}
