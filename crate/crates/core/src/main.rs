use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use seasonload::classification::ThresholdMode;
use seasonload::clustering::DistanceMetric;
use seasonload::pipeline::{self, RunConfig};
use seasonload::synthetic::{self, CohortSpec};
use seasonload::{io, Error, ErrorClass, Result};

const THREADS_ENV: &str = "SEASONLOAD_THREADS";

#[derive(Parser, Debug)]
#[command(name = "seasonload", version, about = "Seasonal load-pattern variation analysis for smart meter data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse the load CSV into readings.jsonl
    Ingest {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Assemble complete days, drop outliers, normalize
    Preprocess {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        pre: PreprocessArgs,
    },
    /// Two-stage K-Medoids with silhouette selection of K
    Cluster {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        cluster: ClusterArgs,
        /// Same as --cluster-seed
        #[arg(long, conflicts_with = "cluster_seed")]
        seed: Option<u64>,
    },
    /// Season occupancy distributions and relative entropy
    Entropy {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        entropy: EntropyArgs,
    },
    /// Variation labels, decision trees, cross-validation, importance
    Classify {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        classify: ClassifyArgs,
    },
    /// Figure data and the run summary
    Report {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Every stage in order
    Run {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        pre: PreprocessArgs,
        #[command(flatten)]
        cluster: ClusterArgs,
        #[command(flatten)]
        entropy: EntropyArgs,
        #[command(flatten)]
        classify: ClassifyArgs,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Generate a synthetic cohort with ground truth
    Synth(SynthArgs),
}

#[derive(Args, Debug)]
struct IoArgs {
    /// JSON run configuration; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output (artifact) directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Hourly load CSV
    #[arg(long)]
    load: Option<PathBuf>,
    /// Socioeconomic CSV
    #[arg(long)]
    socio: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PreprocessArgs {
    /// Drop days with an hour above this multiple of the consumer median
    #[arg(long)]
    cap_multiplier: Option<f64>,
}

#[derive(Args, Debug)]
struct ClusterArgs {
    #[arg(long)]
    metric: Option<DistanceMetric>,
    #[arg(long)]
    cluster_seed: Option<u64>,
    /// Candidate K values as MIN..MAX (inclusive)
    #[arg(long, value_parser = parse_k_range)]
    k_range: Option<(usize, usize)>,
    #[arg(long)]
    k_min: Option<usize>,
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Args, Debug)]
struct EntropyArgs {
    /// Additive smoothing per cluster
    #[arg(long)]
    smoothing: Option<f64>,
    #[arg(long)]
    min_days: Option<usize>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long)]
    threshold_mode: Option<ThresholdMode>,
    #[arg(long)]
    threshold_param: Option<f64>,
    #[arg(long)]
    max_splits: Option<usize>,
    #[arg(long)]
    min_leaf: Option<usize>,
    #[arg(long)]
    folds: Option<usize>,
    /// Cross-validation fold seed
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Restrict the cluster timeline to these consumers (repeatable)
    #[arg(long = "figure-consumer")]
    figure_consumers: Vec<String>,
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Cohort spec as JSON
    #[arg(long, conflicts_with_all = ["planted", "income_shift"])]
    spec: Option<PathBuf>,
    /// Preset: this many planted prototypes (1-6), no socio effect
    #[arg(long)]
    planted: Option<usize>,
    /// Preset: income-driven summer shift
    #[arg(long, conflicts_with = "planted")]
    income_shift: bool,
    #[arg(long, default_value_t = 50)]
    consumers: usize,
    #[arg(long, default_value_t = 3)]
    years: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn parse_k_range(s: &str) -> std::result::Result<(usize, usize), String> {
    let (lo, hi) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .or_else(|| s.split_once('-'))
        .ok_or_else(|| format!("expected MIN..MAX, got '{s}'"))?;
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("'{t}': {e}"));
    Ok((num(lo)?, num(hi)?))
}

fn load_config(io: &IoArgs) -> Result<RunConfig> {
    let mut cfg = match &io.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(o) = &io.out {
        cfg.output_dir = o.clone();
    }
    if let Some(l) = &io.load {
        cfg.load_csv = Some(l.clone());
    }
    if let Some(s) = &io.socio {
        cfg.socio_csv = Some(s.clone());
    }
    Ok(cfg)
}

fn set<T: Clone>(slot: &mut T, value: &Option<T>) {
    if let Some(v) = value {
        *slot = v.clone();
    }
}

impl PreprocessArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        set(&mut cfg.outlier.cap_multiplier, &self.cap_multiplier);
    }
}

impl ClusterArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        let c = &mut cfg.clustering;
        set(&mut c.metric, &self.metric);
        set(&mut c.seed, &self.cluster_seed);
        if let Some((lo, hi)) = self.k_range {
            c.k_min = lo;
            c.k_max = hi;
        }
        set(&mut c.k_min, &self.k_min);
        set(&mut c.k_max, &self.k_max);
        set(&mut c.max_iter, &self.max_iter);
    }
}

impl EntropyArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        set(&mut cfg.seasonal.smoothing, &self.smoothing);
        set(&mut cfg.seasonal.min_days, &self.min_days);
    }
}

impl ClassifyArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        set(&mut cfg.threshold.mode, &self.threshold_mode);
        set(&mut cfg.threshold.parameter, &self.threshold_param);
        set(&mut cfg.tree.max_splits, &self.max_splits);
        set(&mut cfg.tree.min_leaf, &self.min_leaf);
        set(&mut cfg.folds, &self.folds);
        set(&mut cfg.cv_seed, &self.seed);
    }
}

impl ReportArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        if !self.figure_consumers.is_empty() {
            cfg.figure_consumers = self.figure_consumers.clone();
        }
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Internal(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Ingest { io } => {
            let cfg = load_config(&io)?;
            cfg.validate()?;
            let ds = pipeline::ingest(&cfg).map_err(|e| e.in_stage("ingest"))?;
            println!("{} readings from {} consumers", ds.readings.len(), ds.consumers().len());
        }
        Command::Preprocess { io, pre } => {
            let mut cfg = load_config(&io)?;
            pre.apply(&mut cfg);
            cfg.validate()?;
            let stage = |cfg: &RunConfig| {
                let ds = pipeline::read_readings(&cfg.output_dir)?;
                pipeline::preprocess_stage(&ds, cfg)
            };
            let (_, report) = stage(&cfg).map_err(|e| e.in_stage("preprocess"))?;
            print_json(&report)?;
        }
        Command::Cluster { io, cluster, seed } => {
            let mut cfg = load_config(&io)?;
            cluster.apply(&mut cfg);
            set(&mut cfg.clustering.seed, &seed);
            cfg.validate()?;
            let stage = |cfg: &RunConfig| {
                let days = pipeline::read_days(&cfg.output_dir)?;
                pipeline::cluster_stage(&days, cfg)
            };
            let model = stage(&cfg).map_err(|e| e.in_stage("cluster"))?;
            println!("K = {}", model.k);
            print_json(&model.silhouette_by_k)?;
        }
        Command::Entropy { io, entropy } => {
            let mut cfg = load_config(&io)?;
            entropy.apply(&mut cfg);
            cfg.validate()?;
            let stage = |cfg: &RunConfig| {
                let model = pipeline::read_cluster_model(&cfg.output_dir)?;
                pipeline::entropy_stage(&model.day_assignment, model.k, cfg)
            };
            let table = stage(&cfg).map_err(|e| e.in_stage("entropy"))?;
            println!(
                "{} records, {} consumer-seasons below min_days",
                table.records.len(),
                table.insufficient.len()
            );
        }
        Command::Classify { io, classify } => {
            let mut cfg = load_config(&io)?;
            classify.apply(&mut cfg);
            cfg.validate()?;
            let stage = |cfg: &RunConfig| {
                let model = pipeline::read_cluster_model(&cfg.output_dir)?;
                let records = pipeline::read_entropy(&cfg.output_dir)?;
                let (socio, errors) = pipeline::load_socio(cfg)?;
                pipeline::classify_stage(&records, model.k, socio, errors, cfg)
            };
            let out = stage(&cfg).map_err(|e| e.in_stage("classify"))?;
            print_json(&out.report)?;
        }
        Command::Report { io, report } => {
            let mut cfg = load_config(&io)?;
            report.apply(&mut cfg);
            let summary = pipeline::report_stage(&cfg).map_err(|e| e.in_stage("report"))?;
            print_json(&summary)?;
        }
        Command::Run {
            io,
            pre,
            cluster,
            entropy,
            classify,
            report,
        } => {
            let mut cfg = load_config(&io)?;
            pre.apply(&mut cfg);
            cluster.apply(&mut cfg);
            entropy.apply(&mut cfg);
            classify.apply(&mut cfg);
            report.apply(&mut cfg);
            let summary = pipeline::run_pipeline(&cfg)?;
            print_json(&summary)?;
        }
        Command::Synth(args) => {
            let spec = match (&args.spec, args.planted, args.income_shift) {
                (Some(p), _, _) => io::read_json::<CohortSpec>(p).map_err(|e| Error::Config(e.to_string()))?,
                (None, Some(n), false) => CohortSpec::planted(n, args.consumers, args.years, args.seed)?,
                (None, None, true) => CohortSpec::income_shift(args.consumers, args.years, args.seed),
                _ => return Err(Error::Config("give --spec, --planted N or --income-shift".into())),
            };
            let cohort = synthetic::generate(&spec)?;
            cohort.write(&args.out)?;
            println!(
                "{} consumers, {} days written to {}",
                spec.n_consumers,
                cohort.truth.days,
                args.out.display()
            );
        }
    }
    Ok(())
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Error::Config(format!("{THREADS_ENV} must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))
}

fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Usage => 1,
        ErrorClass::Data => 2,
        ErrorClass::Internal => 3,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = configure_threads().and_then(|_| execute(cli.command));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.class()))
        }
    }
}
