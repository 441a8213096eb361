//! Command-line front end. The binary only forwards `std::env::args_os()` to
//! [`run`], so every subcommand is also reachable from tests.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 configuration error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::RunConfig;
use crate::data_io::{
    decode_gray, feature_csv, generate_synthetic_with, load_idx, load_image_dir, write_atomic, write_idx,
    write_image_dir, Dataset, Jitter,
};
use crate::error::Error;
use crate::eval::{
    evaluate_with, render_confusion_csv, render_repeated, render_report, repeated_evaluation, stratified_split,
    train_on_dataset, ReportFormat,
};
use crate::features::Extractor;
use crate::fusion::FusionPrediction;
use crate::imaging::binarize_otsu;
use crate::persist::{decode_ensemble, encode_ensemble, TrainManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

const CONFIG_HELP: &str = "\
Configuration keys (for --config files, one key=value per line, # comments allowed):
  dcc_grid         chain-code block grid, 10x10 (800 features) or 3x3 (72)   [10x10]
  knn_k            neighbors used by both KNN voters                          [3]
  ridge            ridge penalty of both linear voters                        [0.001]
  normalize_dcc    L2-normalize chain-code vectors before classifying          [true]
  normalize_rlc    L2-normalize run-length vectors before classifying          [false]
  tie_break_order  voter priority for tied votes, comma separated             [dcc-knn,dcc-lc,rlc-knn,rlc-lc]
  split_fraction   per-class fraction of samples used for training            [0.8]
  seed             seed for the train/test split and synthetic data           [42]
  ink_polarity     dark (ink darker than paper) or light                      [dark]
Command-line flags override the file. Exit codes: 0 ok, 1 usage, 2 data error, 3 config error.";

#[derive(Debug, Parser)]
#[command(name = "numeral-fusion", version, about = "Handwritten digit recognition by fusing chain-code and run-length classifiers", after_help = CONFIG_HELP)]
pub struct Cli {
    /// Worker threads for feature extraction and evaluation (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the feature matrix of a dataset as CSV.
    Extract {
        #[command(flatten)]
        data: DatasetArgs,
        #[command(flatten)]
        config: ConfigArgs,
        /// Feature family to extract.
        #[arg(long, value_enum)]
        extractor: ExtractorKind,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Split a dataset, train the four voters on the training part, save the ensemble.
    Train {
        #[command(flatten)]
        data: DatasetArgs,
        #[command(flatten)]
        config: ConfigArgs,
        /// Output model path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a saved ensemble on the held-out part of a dataset.
    Eval {
        #[command(flatten)]
        data: DatasetArgs,
        /// Model written by `train`.
        #[arg(long)]
        model: PathBuf,
        /// Evaluate every sample instead of re-deriving the held-out split.
        #[arg(long)]
        all: bool,
        /// Also retrain and evaluate on this many consecutive split seeds,
        /// starting at the model's seed, and report mean and stddev.
        #[arg(long, default_value_t = 1)]
        repeat: usize,
        /// Directory receiving a `run-<timestamp>-seed<seed>` report folder.
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify one image file.
    Predict {
        /// Model written by `train`.
        #[arg(long)]
        model: PathBuf,
        /// PNG or PGM image holding a single digit.
        #[arg(long)]
        image: PathBuf,
    },
    /// Generate a labeled synthetic dataset of digit-like glyphs.
    GenSynthetic {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        count_per_class: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Idx)]
        format: OutputFormat,
        /// Render every glyph of a class identically (no shift or width change).
        #[arg(long)]
        no_jitter: bool,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DatasetKind {
    Idx,
    Dir,
    Synthetic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExtractorKind {
    Dcc,
    Rlc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Idx,
    Dir,
}

#[derive(Debug, Args)]
pub struct DatasetArgs {
    /// Dataset layout.
    #[arg(long, value_enum)]
    pub dataset: DatasetKind,
    /// IDX image file (with --dataset idx).
    #[arg(long)]
    pub images: Option<PathBuf>,
    /// IDX label file (with --dataset idx).
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Root holding one subdirectory per digit, named 0-9 (with --dataset dir).
    #[arg(long)]
    pub root: Option<PathBuf>,
    /// Samples per class (with --dataset synthetic; generated from --seed).
    #[arg(long, default_value_t = 20)]
    pub count_per_class: usize,
}

/// Run-configuration overrides; each maps to one configuration key.
#[derive(Debug, Default, Args)]
pub struct ConfigArgs {
    /// key=value configuration file applied before the flags below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Chain-code block grid, 10x10 or 3x3 [dcc_grid].
    #[arg(long)]
    pub dcc_grid: Option<String>,
    /// KNN neighbor count [knn_k].
    #[arg(long)]
    pub k: Option<String>,
    /// Linear-classifier ridge penalty [ridge].
    #[arg(long)]
    pub ridge: Option<String>,
    /// L2-normalize chain-code vectors, true or false [normalize_dcc].
    #[arg(long)]
    pub normalize_dcc: Option<String>,
    /// L2-normalize run-length vectors, true or false [normalize_rlc].
    #[arg(long)]
    pub normalize_rlc: Option<String>,
    /// Tie-break voter priority, e.g. dcc-knn,dcc-lc,rlc-knn,rlc-lc [tie_break_order].
    #[arg(long)]
    pub tie_break: Option<String>,
    /// Per-class training fraction [split_fraction].
    #[arg(long)]
    pub split: Option<String>,
    /// Seed for splitting and synthetic data [seed].
    #[arg(long)]
    pub seed: Option<String>,
    /// Ink polarity, dark or light [ink_polarity].
    #[arg(long)]
    pub ink: Option<String>,
}

impl ConfigArgs {
    pub fn resolve(&self) -> crate::error::Result<RunConfig> {
        let mut config = RunConfig::default();
        if let Some(path) = &self.config {
            config.apply_file(path)?;
        }
        let pairs = [
            ("dcc_grid", &self.dcc_grid),
            ("knn_k", &self.k),
            ("ridge", &self.ridge),
            ("normalize_dcc", &self.normalize_dcc),
            ("normalize_rlc", &self.normalize_rlc),
            ("tie_break_order", &self.tie_break),
            ("split_fraction", &self.split),
            ("seed", &self.seed),
            ("ink_polarity", &self.ink),
        ];
        for (key, value) in pairs {
            if let Some(value) = value {
                config.set(key, value)?;
            }
        }
        config.validate()?;
        Ok(config)
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

/// Configuration problems map to 3, everything else to 2.
pub fn exit_code(e: &anyhow::Error) -> i32 {
    let config = e
        .chain()
        .filter_map(|c| c.downcast_ref::<Error>())
        .any(Error::is_config);
    if config {
        EXIT_CONFIG
    } else {
        EXIT_DATA
    }
}

pub fn execute(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be at least 1".into()).into());
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.command {
        Command::Extract {
            data,
            config,
            extractor,
            out,
        } => cmd_extract(&data, &config.resolve()?, extractor, &out),
        Command::Train { data, config, out } => cmd_train(&data, &config.resolve()?, &out),
        Command::Eval {
            data,
            model,
            all,
            repeat,
            out,
        } => cmd_eval(&data, &model, all, repeat, &out),
        Command::Predict { model, image } => cmd_predict(&model, &image),
        Command::GenSynthetic {
            seed,
            count_per_class,
            format,
            no_jitter,
            out,
        } => cmd_gen_synthetic(seed, count_per_class, format, no_jitter, &out),
    }
}

pub fn load_dataset(args: &DatasetArgs, seed: u64) -> anyhow::Result<Dataset> {
    let ds = match args.dataset {
        DatasetKind::Idx => {
            let (Some(images), Some(labels)) = (&args.images, &args.labels) else {
                return Err(Error::Config("--dataset idx needs --images and --labels".into()).into());
            };
            load_idx(images, labels)?
        }
        DatasetKind::Dir => {
            let Some(root) = &args.root else {
                return Err(Error::Config("--dataset dir needs --root".into()).into());
            };
            load_image_dir(root)?
        }
        DatasetKind::Synthetic => {
            if args.count_per_class == 0 {
                return Err(Error::Config("--count-per-class must be at least 1".into()).into());
            }
            generate_synthetic_with(seed, args.count_per_class, Jitter::Standard)
        }
    };
    if ds.is_empty() {
        bail!(Error::Parse(format!("{}: no samples", ds.source)));
    }
    log::info!("loaded {} samples from {}", ds.len(), ds.source);
    Ok(ds)
}

fn cmd_extract(data: &DatasetArgs, config: &RunConfig, kind: ExtractorKind, out: &Path) -> anyhow::Result<()> {
    let ds = load_dataset(data, config.seed)?;
    let extractor = match kind {
        ExtractorKind::Dcc => Extractor::Dcc(config.dcc_grid),
        ExtractorKind::Rlc => Extractor::Rlc,
    };
    let rows = ds
        .samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let fv = binarize_otsu(&s.image, config.ink_polarity)
                .and_then(|b| extractor.extract(&b))
                .with_context(|| format!("sample {i}"))?;
            Ok((s.label, fv))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    write_atomic(out, feature_csv(extractor, &rows)?.as_bytes())?;
    println!("wrote {} rows of {} {} features to {}", rows.len(), extractor.dim(), extractor, out.display());
    Ok(())
}

fn cmd_train(data: &DatasetArgs, config: &RunConfig, out: &Path) -> anyhow::Result<()> {
    let ds = load_dataset(data, config.seed)?;
    let (train, test) = stratified_split(&ds, config.split_fraction, config.seed)?;
    let ens = train_on_dataset(&train, config)?;
    let manifest = TrainManifest::new(ds.source.clone(), train.samples.iter().map(|s| &s.image));
    write_atomic(out, &encode_ensemble(&ens, &manifest))?;
    println!(
        "trained on {} samples ({} held out, seed {}); model written to {}",
        train.len(),
        test.len(),
        config.seed,
        out.display()
    );
    Ok(())
}

fn load_model(path: &Path) -> anyhow::Result<(crate::fusion::FusionEnsemble, TrainManifest)> {
    let bytes = std::fs::read(path).map_err(|e| Error::from(e).in_file(path))?;
    Ok(decode_ensemble(&bytes).map_err(|e| e.in_file(path))?)
}

fn cmd_eval(data: &DatasetArgs, model: &Path, all: bool, repeat: usize, out: &Path) -> anyhow::Result<()> {
    if repeat == 0 {
        return Err(Error::Config("--repeat must be at least 1".into()).into());
    }
    let (ens, manifest) = load_model(model)?;
    let config = ens.config().clone();
    let ds = load_dataset(data, config.seed)?;
    let repeated = if repeat > 1 {
        let seeds: Vec<u64> = (0..repeat as u64).map(|i| config.seed.wrapping_add(i)).collect();
        Some(repeated_evaluation(&ds, &config, &seeds)?)
    } else {
        None
    };
    let (train_count, test) = if all {
        (manifest.train_digests.len(), ds)
    } else {
        let (train, test) = stratified_split(&ds, config.split_fraction, config.seed)?;
        (train.len(), test)
    };
    let leaked = test.samples.iter().filter(|s| manifest.contains(&s.image)).count();
    if leaked > 0 {
        bail!(Error::Parse(format!(
            "{leaked} test image(s) also appear in the training set of {}",
            model.display()
        )));
    }
    let report = evaluate_with(&ens, &test, train_count)?;

    std::fs::create_dir_all(out).map_err(|e| Error::from(e).in_file(out))?;
    let dir = fresh_run_dir(out, config.seed)?;
    write_atomic(&dir.join("report.md"), render_report(&report, ReportFormat::Markdown).as_bytes())?;
    write_atomic(&dir.join("report.csv"), render_report(&report, ReportFormat::Csv).as_bytes())?;
    for r in &report.systems {
        let name = format!("confusion-{}.csv", r.system.slug());
        write_atomic(&dir.join(name), render_confusion_csv(r).as_bytes())?;
    }
    write_atomic(&dir.join("config.txt"), config.to_text().as_bytes())?;
    print!("{}", render_report(&report, ReportFormat::Markdown));
    if let Some(summary) = repeated {
        let text = render_repeated(&summary);
        write_atomic(&dir.join("repeated.csv"), text.as_bytes())?;
        println!("\naverage accuracy over {repeat} split seeds:\n{text}");
    }
    println!("reports written to {}", dir.display());
    Ok(())
}

fn fresh_run_dir(out: &Path, seed: u64) -> anyhow::Result<PathBuf> {
    let stamp = chrono::Local::now().format("%Y%m%dT%H%M%S");
    for n in 0.. {
        let name = if n == 0 {
            format!("run-{stamp}-seed{seed}")
        } else {
            format!("run-{stamp}-seed{seed}-{n}")
        };
        let dir = out.join(name);
        match std::fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(Error::from(e).in_file(&dir).into()),
        }
    }
    unreachable!()
}

fn cmd_predict(model: &Path, image: &Path) -> anyhow::Result<()> {
    let (ens, _) = load_model(model)?;
    let img = decode_gray(image)?;
    let p = ens.predict_gray(&img).map_err(|e| e.in_file(image))?;
    print!("{}", describe_prediction(&p));
    Ok(())
}

/// Multi-line summary: fused label, each vote, and the tie-break if one fired.
pub fn describe_prediction(p: &FusionPrediction) -> String {
    let mut out = format!("label: {}\n", p.label);
    for o in &p.outputs {
        out.push_str(&format!("{}: {}\n", o.voter, o.label));
    }
    match p.tie_break {
        Some(v) => out.push_str(&format!("tie-break applied: {v} decided {}\n", p.label)),
        None => out.push_str("tie-break: none\n"),
    }
    out
}

fn cmd_gen_synthetic(seed: u64, count: usize, format: OutputFormat, no_jitter: bool, out: &Path) -> anyhow::Result<()> {
    if count == 0 {
        return Err(Error::Config("--count-per-class must be at least 1".into()).into());
    }
    let jitter = if no_jitter { Jitter::None } else { Jitter::Standard };
    let ds = generate_synthetic_with(seed, count, jitter);
    std::fs::create_dir_all(out).map_err(|e| Error::from(e).in_file(out))?;
    match format {
        OutputFormat::Idx => write_idx(&ds, &out.join("images-idx3-ubyte"), &out.join("labels-idx1-ubyte"))?,
        OutputFormat::Dir => write_image_dir(&ds, out)?,
    }
    let per_class: Vec<String> = ds.class_counts().iter().map(usize::to_string).collect();
    println!(
        "wrote {} samples ({} per class: {}) to {}",
        ds.len(),
        count,
        per_class.join(" "),
        out.display()
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn help_lists_every_config_key() {
        for key in crate::config::CONFIG_KEYS {
            assert!(CONFIG_HELP.contains(key), "{key}");
        }
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["nf", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["nf", "--help"]), EXIT_OK);
    }

    #[test]
    fn flags_override_defaults() {
        let args = ConfigArgs {
            k: Some("5".into()),
            ink: Some("light".into()),
            ..Default::default()
        };
        let c = args.resolve().unwrap();
        assert_eq!(c.knn_k, 5);
        assert_eq!(c.ink_polarity, crate::imaging::Polarity::InkLight);
        let bad = ConfigArgs {
            split: Some("1.5".into()),
            ..Default::default()
        };
        assert!(bad.resolve().unwrap_err().is_config());
    }
}
