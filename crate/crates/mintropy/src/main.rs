//! Batch command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mintropy::dataset::{self, BinMethod, BinningSpec, Dataset};
use mintropy::distribution::{joint, FeatureSubset};
use mintropy::entropy;
use mintropy::error::{Error, Result};
use mintropy::eval::{run_pipeline, ClassifierKind, PipelineConfig};
use mintropy::oracle::{min_set_exact, MinSetOutcome};
use mintropy::selection::{greedy_select, Criterion, StopRule};

#[derive(Parser)]
#[command(name = "mintropy", version, about = "Information-theoretic feature selection toolkit")]
struct Cli {
    /// Worker threads (default: machine parallelism; env MINTROPY_THREADS)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum DataFormat {
    Csv,
    Sparse,
}

#[derive(Clone, Copy, ValueEnum)]
enum BinMethodArg {
    Width,
    Freq,
}

#[derive(clap::Args)]
struct DataArgs {
    /// Input dataset path
    #[arg(long)]
    data: PathBuf,
    /// Input format
    #[arg(long, value_enum, default_value = "csv")]
    format: DataFormat,
    /// Label column name (csv only)
    #[arg(long, default_value = "class")]
    label: String,
    /// Discretize numeric csv columns into this many bins
    #[arg(long)]
    bins: Option<usize>,
    /// Binning method for numeric columns
    #[arg(long, value_enum, default_value = "freq")]
    bin_method: BinMethodArg,
}

impl DataArgs {
    fn load(&self) -> Result<Dataset> {
        match self.format {
            DataFormat::Csv => {
                let binning = match self.bins {
                    Some(bins) => Some(BinningSpec::new(
                        match self.bin_method {
                            BinMethodArg::Width => BinMethod::EqualWidth,
                            BinMethodArg::Freq => BinMethod::EqualFrequency,
                        },
                        bins,
                    )?),
                    None => None,
                };
                dataset::load_csv(&self.data, &self.label, binning.as_ref())
            }
            DataFormat::Sparse => dataset::load_sparse(&self.data),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CriterionArg {
    Renyi,
    Shannon,
    Mifs,
    Mrmr,
    Jmi,
    Cmim,
}

impl CriterionArg {
    fn build(self, beta: f64) -> Criterion {
        match self {
            CriterionArg::Renyi => Criterion::RenyiMin,
            CriterionArg::Shannon => Criterion::Shannon,
            CriterionArg::Mifs => Criterion::Mifs { beta },
            CriterionArg::Mrmr => Criterion::Mrmr,
            CriterionArg::Jmi => Criterion::Jmi,
            CriterionArg::Cmim => Criterion::Cmim,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Measure {
    H1,
    Hinf,
    Cachin,
    Bayes,
    I1,
    Iinf,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Shannon,
    Min,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmitFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassifierArg {
    IdealBayes,
    NaiveBayes,
}

#[derive(Subcommand)]
enum Command {
    /// Run greedy forward selection and write the trace
    Select {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum)]
        criterion: CriterionArg,
        /// Redundancy weight for mifs
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Stop once the conditional entropy drops to this many bits
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        max_features: Option<usize>,
        /// Stop once the Bayes error drops to this probability
        #[arg(long)]
        target_error: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        emit: EmitFormat,
    },
    /// Print one information measure for a feature subset
    Entropy {
        #[command(flatten)]
        data: DataArgs,
        /// Comma-separated 0-based feature indices (label column excluded)
        #[arg(long, default_value = "")]
        subset: String,
        #[arg(long, value_enum)]
        measure: Measure,
        /// Renyi order for measure h1 on the empty subset
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Exact minimum-subset search
    Oracle {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum)]
        order: OrderArg,
        /// Entropy threshold in bits
        #[arg(long)]
        h: f64,
    },
    /// Bootstrap evaluation of criteria against classifiers
    Eval {
        #[command(flatten)]
        data: DataArgs,
        /// Comma-separated criteria (renyi,shannon,mifs,mrmr,jmi,cmim)
        #[arg(long)]
        criteria: String,
        /// Comma-separated classifiers (ideal-bayes,naive-bayes)
        #[arg(long, default_value = "ideal-bayes")]
        classifiers: String,
        #[arg(long, default_value_t = 5)]
        bootstrap: usize,
        #[arg(long)]
        max_features: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 1.0)]
        laplace_alpha: f64,
        /// Train fraction per split; 1.0 evaluates with train = test
        #[arg(long, default_value_t = 0.8)]
        train_fraction: f64,
        /// Output directory for per-criterion reports
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a built-in example dataset as CSV
    Gen {
        /// Example name (currently: fig1)
        #[arg(long)]
        example: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_subset(spec: &str) -> Result<FeatureSubset> {
    let mut indices = Vec::new();
    for token in spec.split(',').filter(|t| !t.trim().is_empty()) {
        let idx: usize = token
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad feature index {token:?}")))?;
        indices.push(idx);
    }
    Ok(FeatureSubset::from_indices(indices))
}

fn parse_criteria(spec: &str, beta: f64) -> Result<Vec<Criterion>> {
    spec.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| match t.trim() {
            "renyi" => Ok(Criterion::RenyiMin),
            "shannon" => Ok(Criterion::Shannon),
            "mifs" => Ok(Criterion::Mifs { beta }),
            "mrmr" => Ok(Criterion::Mrmr),
            "jmi" => Ok(Criterion::Jmi),
            "cmim" => Ok(Criterion::Cmim),
            other => Err(Error::InvalidArgument(format!("unknown criterion {other:?}"))),
        })
        .collect()
}

fn parse_classifiers(spec: &str, laplace_alpha: f64) -> Result<Vec<ClassifierKind>> {
    spec.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| match t.trim() {
            "ideal-bayes" | "ideal" => Ok(ClassifierKind::IdealBayes),
            "naive-bayes" | "nb" => Ok(ClassifierKind::NaiveBayes { laplace_alpha }),
            other => Err(Error::InvalidArgument(format!("unknown classifier {other:?}"))),
        })
        .collect()
}

/// Writes via a temp file plus rename so readers never see torn output.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let io_err = |e: std::io::Error| Error::Io { path: path.into(), source: e };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.persist(path).map_err(|e| Error::Io { path: path.into(), source: e.error })?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let threads = cli
        .threads
        .or_else(|| std::env::var("MINTROPY_THREADS").ok().and_then(|v| v.parse().ok()));
    if let Some(n) = threads {
        mintropy::par::configure_threads(n);
    }

    match cli.command {
        Command::Gen { example, out } => {
            let ds = match example.as_str() {
                "fig1" => dataset::generate_fig1_dataset(),
                other => return Err(Error::InvalidArgument(format!("unknown example {other:?}"))),
            };
            let mut buf = Vec::new();
            ds.write_csv(&mut buf)?;
            write_atomic(&out, &buf)?;
        }
        Command::Entropy { data, subset, measure, alpha } => {
            let ds = data.load()?;
            let subset = parse_subset(&subset)?;
            let table = joint(&ds, &subset)?;
            let value = match (measure, alpha) {
                (Measure::H1, Some(a)) => {
                    if !subset.is_empty() {
                        return Err(Error::InvalidArgument(
                            "--alpha applies to the class distribution; use an empty --subset".into(),
                        ));
                    }
                    entropy::renyi_entropy(&table.class_marginal(), entropy::Order::alpha(a)?)?
                }
                (Measure::H1, None) => entropy::cond_shannon(&table),
                (Measure::Hinf, _) => entropy::cond_min_entropy(&table),
                (Measure::Cachin, _) => entropy::cachin_cond_min_entropy(&table),
                (Measure::Bayes, _) => entropy::bayes_error(&table),
                (Measure::I1, _) => entropy::mutual_info_shannon(&table),
                (Measure::Iinf, _) => entropy::mutual_info_min(&table),
            };
            println!("{value:.6}");
        }
        Command::Select { data, criterion, beta, threshold, max_features, target_error, out, emit } => {
            let ds = data.load()?;
            let criterion = criterion.build(beta);
            let stop = StopRule { threshold_h: threshold, max_features, target_error };
            let trace = greedy_select(&ds, criterion, stop)?;
            let bytes = match emit {
                EmitFormat::Json => serde_json::to_vec_pretty(&trace)
                    .map_err(|e| Error::InvalidArgument(e.to_string()))?,
                EmitFormat::Csv => {
                    let mut buf = Vec::new();
                    trace.write_csv(&mut buf)?;
                    buf
                }
            };
            write_atomic(&out, &bytes)?;
            let features: Vec<String> = trace.selected().iter().map(|f| f.to_string()).collect();
            println!("selected {} features: [{}]", trace.steps.len(), features.join(","));
        }
        Command::Oracle { data, order, h } => {
            let ds = data.load()?;
            let order = match order {
                OrderArg::Shannon => entropy::Order::Shannon,
                OrderArg::Min => entropy::Order::MinEntropy,
            };
            match min_set_exact(&ds, order, h)? {
                MinSetOutcome::Found(r) => {
                    let subset: Vec<String> = r.subset.iter().map(|f| f.to_string()).collect();
                    println!(
                        "min-set size {} subset [{}] entropy {:.6} explored {}",
                        r.subset.len(),
                        subset.join(","),
                        r.achieved_entropy,
                        r.explored
                    );
                }
                MinSetOutcome::Infeasible { full_set_entropy, explored } => {
                    println!(
                        "infeasible: full feature set reaches {full_set_entropy:.6} bits (explored {explored})"
                    );
                }
            }
        }
        Command::Eval {
            data,
            criteria,
            classifiers,
            bootstrap,
            max_features,
            seed,
            beta,
            laplace_alpha,
            train_fraction,
            out,
        } => {
            let ds = data.load()?;
            let dataset_id = data.data.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let criteria = parse_criteria(&criteria, beta)?;
            let kinds = parse_classifiers(&classifiers, laplace_alpha)?;
            let config = PipelineConfig { n_bootstrap: bootstrap, max_features, seed, train_fraction };
            let reports = run_pipeline(&ds, &dataset_id, &criteria, &kinds, config)?;
            std::fs::create_dir_all(&out).map_err(|e| Error::Io { path: out.clone(), source: e })?;
            for report in &reports {
                let json = serde_json::to_vec_pretty(report)
                    .map_err(|e| Error::InvalidArgument(e.to_string()))?;
                write_atomic(&out.join(format!("eval_{}.json", report.criterion)), &json)?;
                let mut csv_buf = Vec::new();
                report.write_csv(&mut csv_buf)?;
                write_atomic(&out.join(format!("eval_{}.csv", report.criterion)), &csv_buf)?;
                println!("wrote eval_{0}.json and eval_{0}.csv", report.criterion);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
