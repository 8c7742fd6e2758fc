//! Run configuration, stage orchestration and artifact I/O.
//!
//! Each stage reads what it needs from memory (in a full run) or from the
//! previous stage's artifacts (when invoked on its own), and writes its own
//! artifacts into the output directory. All artifacts are a pure function of
//! the inputs and the configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classification::{
    build_variation_dataset, compute_threshold, cross_validate, feature_names, predictor_importance, train_tree,
    CvReport, DecisionTree, ImportanceReport, Label, ThresholdSpec, TreeParams, VariationDataset,
};
use crate::clustering::{cluster_days, ClusterModel, ClusterParams, DayAssignment, TypicalLoadProfile};
use crate::error::{Error, Result};
use crate::ingestion::{
    parse_load_csv, parse_socio_csv, ConsumerId, Dataset, HourlyReading, LoadFormatConfig, LoadIngestStats,
    SeasonCalendar, SeasonChange, SocioFormatConfig, SocioProfile, SocioRowError, READINGS_FILE, SOCIO_FILE,
};
use crate::io;
use crate::preprocessing::{preprocess, DailyProfile, OutlierRule, PreprocessReport};
use crate::seasonal::{boxplot_stats, entropy_table, BoxStats, EntropyRecord, EntropyTable, SeasonalParams};

pub const INGEST_REPORT: &str = "ingest_report.json";
pub const DAYS: &str = "days.jsonl";
pub const PREPROCESS_REPORT: &str = "preprocess_report.json";
pub const TLPS: &str = "tlps.jsonl";
pub const CLUSTER_MODEL: &str = "cluster_model.json";
pub const DAY_ASSIGNMENTS: &str = "day_assignments.csv";
pub const SEASON_DISTRIBUTIONS: &str = "season_distributions.csv";
pub const ENTROPY: &str = "entropy.csv";
pub const ENTROPY_BOXPLOT: &str = "entropy_boxplot.json";
pub const ENTROPY_DIAGNOSTICS: &str = "entropy_diagnostics.json";
pub const LABELS: &str = "labels.csv";
pub const IMPORTANCE: &str = "importance.csv";
pub const CV_METRICS: &str = "cv_metrics.json";
pub const FIG_TIMELINE: &str = "fig_cluster_timeline.csv";
pub const FIG_BOXPLOT: &str = "fig_re_boxplot.json";
pub const FIG_IMPORTANCE: &str = "fig_importance.csv";
pub const RUN_REPORT: &str = "run_report.json";

pub fn tree_file(change: SeasonChange) -> String {
    format!("tree_{change}.json")
}

/// Every artifact a full run can produce, in stage order.
pub fn artifact_names() -> Vec<String> {
    let mut names: Vec<String> = [
        READINGS_FILE,
        INGEST_REPORT,
        DAYS,
        PREPROCESS_REPORT,
        TLPS,
        CLUSTER_MODEL,
        DAY_ASSIGNMENTS,
        SEASON_DISTRIBUTIONS,
        ENTROPY,
        ENTROPY_BOXPLOT,
        ENTROPY_DIAGNOSTICS,
        SOCIO_FILE,
        LABELS,
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    names.extend(SeasonChange::ALL.map(tree_file));
    names.extend([IMPORTANCE, CV_METRICS, FIG_TIMELINE, FIG_BOXPLOT, FIG_IMPORTANCE, RUN_REPORT].map(String::from));
    names
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub load_csv: Option<PathBuf>,
    pub socio_csv: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub load_format: LoadFormatConfig,
    /// When absent, the socio header is read as: `dataid`, `income_level`,
    /// `education_level`, and every other column an age-band count.
    pub socio_format: Option<SocioFormatConfig>,
    pub seasons: SeasonCalendar,
    pub outlier: OutlierRule,
    pub clustering: ClusterParams,
    pub seasonal: SeasonalParams,
    pub threshold: ThresholdSpec,
    pub tree: TreeParams,
    pub folds: usize,
    pub cv_seed: u64,
    /// Consumers kept in the cluster timeline figure; empty keeps all.
    pub figure_consumers: Vec<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            load_csv: None,
            socio_csv: None,
            output_dir: PathBuf::from("seasonload_out"),
            load_format: LoadFormatConfig::default(),
            socio_format: None,
            seasons: SeasonCalendar::default(),
            outlier: OutlierRule::default(),
            clustering: ClusterParams::default(),
            seasonal: SeasonalParams::default(),
            threshold: ThresholdSpec::default(),
            tree: TreeParams::default(),
            folds: 5,
            cv_seed: 0,
            figure_consumers: Vec::new(),
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Parameter checks only; input files are checked by the stage that
    /// reads them, so a missing socio file surfaces at classification.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.outlier.cap_multiplier > 0.0) {
            return bad(format!("outlier cap multiplier must be positive, got {}", self.outlier.cap_multiplier));
        }
        let c = &self.clustering;
        if c.k_min < 2 || c.k_min > c.k_max {
            return bad(format!("invalid K range {}..={}", c.k_min, c.k_max));
        }
        if c.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        self.seasonal.validate()?;
        self.threshold.validate()?;
        if self.folds < 2 {
            return bad(format!("need at least 2 folds, got {}", self.folds));
        }
        if self.tree.min_leaf == 0 {
            return bad("min_leaf must be at least 1".into());
        }
        Ok(())
    }

    fn require_load(&self) -> Result<&Path> {
        self.load_csv
            .as_deref()
            .ok_or_else(|| Error::Config("no load CSV given".into()))
    }
}

fn prepare_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

// ---------------------------------------------------------------- ingest

pub fn ingest(cfg: &RunConfig) -> Result<Dataset> {
    let path = cfg.require_load()?;
    prepare_dir(&cfg.output_dir)?;
    let load = parse_load_csv(path, &cfg.load_format)?;
    log::info!(
        "ingested {} readings ({} rows skipped, {} duplicates)",
        load.dataset.readings.len(),
        load.stats.rows_skipped,
        load.stats.duplicates
    );
    write_readings(&cfg.output_dir, &load.dataset, &load.stats)?;
    Ok(load.dataset)
}

/// Writes the canonical readings artifact for an in-memory dataset.
pub fn write_readings(out: &Path, dataset: &Dataset, stats: &LoadIngestStats) -> Result<()> {
    prepare_dir(out)?;
    io::write_jsonl(&out.join(READINGS_FILE), &dataset.readings)?;
    io::write_json(&out.join(INGEST_REPORT), stats)
}

pub fn read_readings(out: &Path) -> Result<Dataset> {
    let readings: Vec<HourlyReading> = io::read_jsonl(&out.join(READINGS_FILE))?;
    Dataset::new(readings, Vec::new())
}

// ------------------------------------------------------------ preprocess

pub fn preprocess_stage(dataset: &Dataset, cfg: &RunConfig) -> Result<(Vec<DailyProfile>, PreprocessReport)> {
    let (days, report) = preprocess(dataset, &cfg.outlier);
    log::info!(
        "{} of {} days retained ({} incomplete, {} outliers)",
        report.days_retained,
        report.days_total,
        report.days_dropped_incomplete,
        report.days_dropped_outlier
    );
    if !report.is_balanced() {
        return Err(Error::Internal("preprocessing day counts do not add up".into()));
    }
    if days.is_empty() {
        return Err(Error::InvalidInput("no complete, non-outlier days remain".into()));
    }
    prepare_dir(&cfg.output_dir)?;
    io::write_jsonl(&cfg.output_dir.join(DAYS), &days)?;
    io::write_json(&cfg.output_dir.join(PREPROCESS_REPORT), &report)?;
    Ok((days, report))
}

pub fn read_days(out: &Path) -> Result<Vec<DailyProfile>> {
    io::read_jsonl(&out.join(DAYS))
}

// --------------------------------------------------------------- cluster

pub fn cluster_stage(days: &[DailyProfile], cfg: &RunConfig) -> Result<ClusterModel> {
    let (stage1, model) = cluster_days(days, &cfg.clustering)?;
    log::info!("selected K = {} (silhouette {:?})", model.k, model.silhouette_by_k.get(&model.k));
    let out = &cfg.output_dir;
    prepare_dir(out)?;
    io::write_jsonl(&out.join(TLPS), stage1.iter().flat_map(|s| &s.tlps))?;
    io::write_json(&out.join(CLUSTER_MODEL), &model)?;
    io::write_csv(&out.join(DAY_ASSIGNMENTS), &model.day_assignment)?;
    Ok(model)
}

/// Cluster model with its day assignments restored.
pub fn read_cluster_model(out: &Path) -> Result<ClusterModel> {
    let mut model: ClusterModel = io::read_json(&out.join(CLUSTER_MODEL))?;
    model.day_assignment = io::read_csv(&out.join(DAY_ASSIGNMENTS))?;
    Ok(model)
}

pub fn read_tlps(out: &Path) -> Result<Vec<TypicalLoadProfile>> {
    io::read_jsonl(&out.join(TLPS))
}

// --------------------------------------------------------------- entropy

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct DistributionRow {
    consumer: ConsumerId,
    season: String,
    day_count: usize,
    cluster: usize,
    count: usize,
    prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct EntropyDiagnostics {
    insufficient: Vec<crate::seasonal::InsufficientSeason>,
    skipped_records: usize,
}

pub fn entropy_stage(day_assignment: &[DayAssignment], k: usize, cfg: &RunConfig) -> Result<EntropyTable> {
    let table = entropy_table(day_assignment, k, &cfg.seasons, &cfg.seasonal)?;
    if table.records.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no consumer has {} days in two adjacent seasons",
            cfg.seasonal.min_days
        )));
    }
    let out = &cfg.output_dir;
    prepare_dir(out)?;
    let rows: Vec<DistributionRow> = table
        .distributions
        .iter()
        .flat_map(|d| {
            d.counts.iter().zip(&d.probs).enumerate().map(|(i, (&count, &prob))| DistributionRow {
                consumer: d.consumer.clone(),
                season: d.season.name().to_string(),
                day_count: d.day_count,
                cluster: i + 1,
                count,
                prob,
            })
        })
        .collect();
    io::write_csv(&out.join(SEASON_DISTRIBUTIONS), &rows)?;
    io::write_csv(&out.join(ENTROPY), &table.records)?;
    io::write_json(&out.join(ENTROPY_BOXPLOT), &boxplot_stats(&table.records))?;
    io::write_json(
        &out.join(ENTROPY_DIAGNOSTICS),
        &EntropyDiagnostics {
            insufficient: table.insufficient.clone(),
            skipped_records: table.skipped_records,
        },
    )?;
    Ok(table)
}

pub fn read_entropy(out: &Path) -> Result<Vec<EntropyRecord>> {
    io::read_csv(&out.join(ENTROPY))
}

// -------------------------------------------------------------- classify

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelRow {
    pub consumer: ConsumerId,
    pub change: SeasonChange,
    pub re: f64,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceRow {
    pub change: SeasonChange,
    pub feature: String,
    pub importance: f64,
    pub raw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierOutcome {
    pub change: SeasonChange,
    pub rows: usize,
    pub excluded_without_socio: usize,
    pub variation_rate: f64,
    pub split_count: Option<usize>,
    pub cv: Option<CvReport>,
    /// Why this classifier (or its cross-validation) did not run.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub threshold_spec: ThresholdSpec,
    /// Computed over the pooled records of all season changes.
    pub threshold: f64,
    pub k: usize,
    pub feature_names: Vec<String>,
    pub socio_profiles: usize,
    pub socio_errors: Vec<SocioRowError>,
    pub folds: usize,
    pub classifiers: Vec<ClassifierOutcome>,
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub report: ClassifyReport,
    pub datasets: Vec<VariationDataset>,
    pub trees: Vec<DecisionTree>,
    pub importance: Vec<ImportanceReport>,
}

/// Socio profiles from the configured file.
pub fn load_socio(cfg: &RunConfig) -> Result<(Vec<SocioProfile>, Vec<SocioRowError>)> {
    let path = cfg
        .socio_csv
        .as_deref()
        .ok_or_else(|| Error::Config("no socioeconomic CSV given".into()))?;
    if !path.exists() {
        return Err(Error::InvalidInput(format!("socioeconomic file '{}' not found", path.display())));
    }
    let format = match &cfg.socio_format {
        Some(f) => f.clone(),
        None => infer_socio_format(path)?,
    };
    let socio = parse_socio_csv(path, &format)?;
    for e in &socio.errors {
        log::warn!("socio row {}: {}", e.row, e.message);
    }
    Ok((socio.profiles, socio.errors))
}

fn infer_socio_format(path: &Path) -> Result<SocioFormatConfig> {
    let mut rdr = io::csv_reader(path)?;
    let headers = rdr.headers().map_err(|e| Error::csv(path, e))?;
    let fixed = ["dataid", "income_level", "education_level"];
    Ok(SocioFormatConfig {
        consumer_col: fixed[0].into(),
        age_band_cols: headers
            .iter()
            .filter(|h| !fixed.contains(h))
            .map(|h| (h.to_string(), h.to_string()))
            .collect(),
        income_col: fixed[1].into(),
        education_col: fixed[2].into(),
        income_order: None,
        education_order: None,
        blank_count_as_zero: false,
    })
}

/// Labels every record and trains one classifier per season change.
/// A change without usable rows is reported and skipped; the stage fails
/// only when no classifier can be trained.
pub fn classify_stage(
    records: &[EntropyRecord],
    k: usize,
    socio: Vec<SocioProfile>,
    socio_errors: Vec<SocioRowError>,
    cfg: &RunConfig,
) -> Result<Classification> {
    let mut socio = socio;
    socio.sort_by(|a, b| a.consumer.cmp(&b.consumer));
    let values: Vec<f64> = records.iter().map(|r| r.re).collect();
    let threshold = compute_threshold(&cfg.threshold, &values, k)?;
    log::info!("variation threshold {threshold} ({} mode)", cfg.threshold.mode);

    let results: Vec<(SeasonChange, Result<VariationDataset>)> = SeasonChange::ALL
        .into_par_iter()
        .map(|change| (change, build_variation_dataset(change, records, &socio, threshold)))
        .collect();
    let trained: Vec<(ClassifierOutcome, Option<(VariationDataset, DecisionTree, ImportanceReport)>)> = results
        .into_par_iter()
        .map(|(change, ds)| match ds {
            Err(e) => {
                log::warn!("{change}: classifier skipped: {e}");
                (
                    ClassifierOutcome {
                        change,
                        rows: 0,
                        excluded_without_socio: records.iter().filter(|r| r.change == change).count(),
                        variation_rate: 0.0,
                        split_count: None,
                        cv: None,
                        error: Some(e.to_string()),
                    },
                    None,
                )
            }
            Ok(ds) => {
                let tree = train_tree(&ds, &cfg.tree);
                let importance = predictor_importance(&tree, change);
                let (cv, error) = match cross_validate(&ds, cfg.folds, cfg.cv_seed, &cfg.tree) {
                    Ok(r) => (Some(r), None),
                    Err(e) => {
                        log::warn!("{change}: cross-validation skipped: {e}");
                        (None, Some(e.to_string()))
                    }
                };
                (
                    ClassifierOutcome {
                        change,
                        rows: ds.rows.len(),
                        excluded_without_socio: ds.excluded_without_socio,
                        variation_rate: ds.variation_rate(),
                        split_count: Some(tree.split_count),
                        cv,
                        error,
                    },
                    Some((ds, tree, importance)),
                )
            }
        })
        .collect();

    let mut report = ClassifyReport {
        threshold_spec: cfg.threshold,
        threshold,
        k,
        feature_names: feature_names(&socio),
        socio_profiles: socio.len(),
        socio_errors,
        folds: cfg.folds,
        classifiers: Vec::new(),
    };
    let mut out = Classification {
        report: report.clone(),
        datasets: Vec::new(),
        trees: Vec::new(),
        importance: Vec::new(),
    };
    for (outcome, parts) in trained {
        report.classifiers.push(outcome);
        if let Some((ds, tree, imp)) = parts {
            out.datasets.push(ds);
            out.trees.push(tree);
            out.importance.push(imp);
        }
    }
    out.report = report;
    if out.trees.is_empty() {
        return Err(Error::InvalidInput(
            "no season change has labelled rows with socioeconomic data".into(),
        ));
    }

    let dir = &cfg.output_dir;
    prepare_dir(dir)?;
    io::write_jsonl(&dir.join(SOCIO_FILE), &socio)?;
    let labels: Vec<LabelRow> = out
        .datasets
        .iter()
        .flat_map(|ds| {
            ds.rows.iter().map(|r| LabelRow {
                consumer: r.consumer.clone(),
                change: ds.change,
                re: r.re,
                label: r.label,
            })
        })
        .collect();
    io::write_csv(&dir.join(LABELS), &labels)?;
    for (ds, tree) in out.datasets.iter().zip(&out.trees) {
        io::write_json(&dir.join(tree_file(ds.change)), tree)?;
    }
    io::write_csv(&dir.join(IMPORTANCE), &importance_rows(&out.importance))?;
    io::write_json(&dir.join(CV_METRICS), &out.report)?;
    Ok(out)
}

fn importance_rows(reports: &[ImportanceReport]) -> Vec<ImportanceRow> {
    reports
        .iter()
        .flat_map(|r| {
            r.feature_names.iter().enumerate().map(|(i, f)| ImportanceRow {
                change: r.change,
                feature: f.clone(),
                importance: r.importance[i],
                raw: r.raw[i],
            })
        })
        .collect()
}

pub fn read_importance(out: &Path) -> Result<Vec<ImportanceRow>> {
    io::read_csv(&out.join(IMPORTANCE))
}

pub fn read_labels(out: &Path) -> Result<Vec<LabelRow>> {
    io::read_csv(&out.join(LABELS))
}

// ---------------------------------------------------------------- report

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureImportanceRow {
    pub change: SeasonChange,
    pub feature: String,
    pub importance: f64,
}

fn require(out: &Path, name: &str) -> Result<PathBuf> {
    let p = out.join(name);
    if p.exists() {
        Ok(p)
    } else {
        Err(Error::InvalidInput(format!(
            "artifact '{name}' missing from '{}'; run the stage that produces it first",
            out.display()
        )))
    }
}

/// Plot data for the cluster timeline, the RE box plot and the importance
/// bars. Returns the files written.
pub fn emit_figures(out: &Path, consumers: &[String]) -> Result<Vec<String>> {
    let mut days: Vec<DayAssignment> = io::read_csv(&require(out, DAY_ASSIGNMENTS)?)?;
    if !consumers.is_empty() {
        days.retain(|d| consumers.iter().any(|c| c == d.consumer.as_str()));
        for c in consumers {
            if !days.iter().any(|d| d.consumer.as_str() == c) {
                log::warn!("figure consumer {c} has no assigned days");
            }
        }
    }
    io::write_csv(&out.join(FIG_TIMELINE), &days)?;

    let records: Vec<EntropyRecord> = io::read_csv(&require(out, ENTROPY)?)?;
    io::write_json(&out.join(FIG_BOXPLOT), &boxplot_stats(&records))?;

    let imp: Vec<ImportanceRow> = io::read_csv(&require(out, IMPORTANCE)?)?;
    let bars: Vec<FigureImportanceRow> = imp
        .into_iter()
        .map(|r| FigureImportanceRow {
            change: r.change,
            feature: r.feature,
            importance: r.importance,
        })
        .collect();
    io::write_csv(&out.join(FIG_IMPORTANCE), &bars)?;
    Ok(vec![FIG_TIMELINE.into(), FIG_BOXPLOT.into(), FIG_IMPORTANCE.into()])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    /// Artifacts present in the output directory, by file name.
    pub artifacts: Vec<String>,
    pub consumers: usize,
    pub days_retained: usize,
    pub k: usize,
    pub silhouette_by_k: BTreeMap<usize, f64>,
    pub re_median: BTreeMap<SeasonChange, f64>,
    pub threshold: f64,
    /// Up to three features per change, by importance.
    pub top_importance: BTreeMap<SeasonChange, Vec<(String, f64)>>,
    pub classifiers: Vec<ClassifierOutcome>,
}

/// Figures plus the run summary, built from the artifacts on disk.
pub fn report_stage(cfg: &RunConfig) -> Result<RunReport> {
    let out = &cfg.output_dir;
    emit_figures(out, &cfg.figure_consumers)?;
    let pre: PreprocessReport = io::read_json(&require(out, PREPROCESS_REPORT)?)?;
    let model: ClusterModel = io::read_json(&require(out, CLUSTER_MODEL)?)?;
    let boxes: Vec<BoxStats> = io::read_json(&require(out, FIG_BOXPLOT)?)?;
    let classify: ClassifyReport = io::read_json(&require(out, CV_METRICS)?)?;
    let imp: Vec<ImportanceRow> = io::read_csv(&require(out, IMPORTANCE)?)?;

    let mut top_importance: BTreeMap<SeasonChange, Vec<(String, f64)>> = BTreeMap::new();
    for change in SeasonChange::ALL {
        let mut rows: Vec<&ImportanceRow> = imp.iter().filter(|r| r.change == change).collect();
        if rows.is_empty() {
            continue;
        }
        // Stable sort keeps feature order among equal scores.
        rows.sort_by(|a, b| b.importance.total_cmp(&a.importance));
        top_importance.insert(
            change,
            rows.iter().take(3).map(|r| (r.feature.clone(), r.importance)).collect(),
        );
    }
    let mut report = RunReport {
        artifacts: Vec::new(),
        consumers: pre.retained_by_consumer.len(),
        days_retained: pre.days_retained,
        k: model.k,
        silhouette_by_k: model.silhouette_by_k,
        re_median: boxes.iter().map(|b| (b.change, b.median)).collect(),
        threshold: classify.threshold,
        top_importance,
        classifiers: classify.classifiers,
    };
    report.artifacts = artifact_names()
        .into_iter()
        .filter(|n| n == RUN_REPORT || out.join(n).exists())
        .collect();
    io::write_json(&out.join(RUN_REPORT), &report)?;
    Ok(report)
}

// ------------------------------------------------------------------- run

/// Full pipeline: ingest → preprocess → cluster → entropy → classify →
/// report. Errors carry the failing stage; artifacts written by earlier
/// stages are left in place.
pub fn run_pipeline(cfg: &RunConfig) -> Result<RunReport> {
    cfg.validate()?;
    let dataset = ingest(cfg).map_err(|e| e.in_stage("ingest"))?;
    run_from_dataset(&dataset, cfg)
}

/// Pipeline from an in-memory dataset; writes the readings artifact with
/// empty ingest statistics and continues as [`run_pipeline`].
pub fn run_dataset(dataset: &Dataset, cfg: &RunConfig) -> Result<RunReport> {
    cfg.validate()?;
    write_readings(&cfg.output_dir, dataset, &LoadIngestStats::default()).map_err(|e| e.in_stage("ingest"))?;
    run_from_dataset(dataset, cfg)
}

fn run_from_dataset(dataset: &Dataset, cfg: &RunConfig) -> Result<RunReport> {
    let (days, _) = preprocess_stage(dataset, cfg).map_err(|e| e.in_stage("preprocess"))?;
    let model = cluster_stage(&days, cfg).map_err(|e| e.in_stage("cluster"))?;
    drop(days);
    let table = entropy_stage(&model.day_assignment, model.k, cfg).map_err(|e| e.in_stage("entropy"))?;
    let (socio, socio_errors) = if dataset.socio.is_empty() || cfg.socio_csv.is_some() {
        load_socio(cfg).map_err(|e| e.in_stage("classify"))?
    } else {
        (dataset.socio.clone(), Vec::new())
    };
    classify_stage(&table.records, model.k, socio, socio_errors, cfg).map_err(|e| e.in_stage("classify"))?;
    report_stage(cfg).map_err(|e| e.in_stage("report"))
}
