//! Evaluation protocol: stratified train/test split, per-class accuracy of
//! each voter and of the fused decision, confusion matrices, and tabular
//! reports.

use std::fmt::{self, Write as _};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::classify::{Label, NUM_CLASSES};
use crate::config::RunConfig;
use crate::data_io::{Dataset, Sample};
use crate::error::{Error, Result};
use crate::fusion::{train_ensemble, FusionEnsemble, FusionPrediction, VoterId};
use crate::imaging::{binarize_otsu, BinaryImage};

/// The five reported systems, in report column order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum System {
    RlcKnn,
    RlcLinear,
    DccKnn,
    DccLinear,
    Fusion,
}

impl System {
    pub const ALL: [System; 5] = [
        System::RlcKnn,
        System::RlcLinear,
        System::DccKnn,
        System::DccLinear,
        System::Fusion,
    ];

    pub fn title(self) -> &'static str {
        match self {
            System::RlcKnn => "RLC & KNN",
            System::RlcLinear => "RLC & LC",
            System::DccKnn => "DCC & KNN",
            System::DccLinear => "DCC & LC",
            System::Fusion => "CF",
        }
    }

    /// File-name friendly identifier.
    pub fn slug(self) -> &'static str {
        match self {
            System::RlcKnn => "rlc-knn",
            System::RlcLinear => "rlc-lc",
            System::DccKnn => "dcc-knn",
            System::DccLinear => "dcc-lc",
            System::Fusion => "fusion",
        }
    }

    pub fn voter(self) -> Option<VoterId> {
        match self {
            System::RlcKnn => Some(VoterId::RlcKnn),
            System::RlcLinear => Some(VoterId::RlcLinear),
            System::DccKnn => Some(VoterId::DccKnn),
            System::DccLinear => Some(VoterId::DccLinear),
            System::Fusion => None,
        }
    }

    fn pick(self, p: &FusionPrediction) -> Label {
        match self.voter() {
            Some(v) => p.outputs[v.slot()].label,
            None => p.label,
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.title())
    }
}

/// Rows are true classes, columns predicted classes.
pub type ConfusionMatrix = [[u32; NUM_CLASSES]; NUM_CLASSES];

#[derive(Clone, Debug, PartialEq)]
pub struct SystemResult {
    pub system: System,
    pub confusion: ConfusionMatrix,
    /// Percent correct per class; `None` when the class has no test samples.
    pub per_class: [Option<f64>; NUM_CLASSES],
    /// Unweighted mean of the defined per-class accuracies.
    pub average: f64,
}

impl SystemResult {
    pub fn from_confusion(system: System, confusion: ConfusionMatrix) -> Self {
        let per_class = std::array::from_fn(|c| {
            let total: u32 = confusion[c].iter().sum();
            (total > 0).then(|| 100.0 * confusion[c][c] as f64 / total as f64)
        });
        let defined: Vec<f64> = per_class.iter().flatten().copied().collect();
        let average = if defined.is_empty() {
            0.0
        } else {
            defined.iter().sum::<f64>() / defined.len() as f64
        };
        Self {
            system,
            confusion,
            per_class,
            average,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    /// One entry per [`System::ALL`], same order.
    pub systems: Vec<SystemResult>,
    pub split_seed: u64,
    pub train_count: usize,
    pub test_count: usize,
    /// Test samples whose fused label came from a tie-break.
    pub tie_breaks: usize,
}

impl EvalReport {
    pub fn system(&self, system: System) -> &SystemResult {
        self.systems
            .iter()
            .find(|s| s.system == system)
            .expect("report covers every system")
    }
}

/// Splits each class independently: shuffle with a seeded ChaCha8 generator,
/// then send `floor(fraction * n)` samples (clamped to `1..=n-1`) to training.
/// Within each part, samples are grouped by class in ascending order.
pub fn stratified_split(ds: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Config(format!(
            "train fraction must lie strictly between 0 and 1, got {train_fraction}"
        )));
    }
    let mut by_class: Vec<Vec<&Sample>> = vec![Vec::new(); NUM_CLASSES];
    for s in &ds.samples {
        by_class[s.label as usize].push(s);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (label, mut members) in by_class.into_iter().enumerate() {
        if members.is_empty() {
            continue;
        }
        if members.len() < 2 {
            return Err(Error::Config(format!(
                "class {label} has {} sample(s); a split needs at least 2",
                members.len()
            )));
        }
        members.shuffle(&mut rng);
        let n = members.len();
        // the epsilon keeps exact products such as 5/6 * 60 from rounding down
        let k = ((train_fraction * n as f64 + 1e-9).floor() as usize).clamp(1, n - 1);
        train.extend(members[..k].iter().map(|s| (*s).clone()));
        test.extend(members[k..].iter().map(|s| (*s).clone()));
    }
    Ok((
        Dataset::new(train, format!("{} [train seed={seed}]", ds.source))?,
        Dataset::new(test, format!("{} [test seed={seed}]", ds.source))?,
    ))
}

/// Binarizes every sample with Otsu's threshold, in parallel, keeping order.
pub fn binarize_dataset(ds: &Dataset, config: &RunConfig) -> Result<Vec<(BinaryImage, Label)>> {
    ds.samples
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            binarize_otsu(&s.image, config.ink_polarity)
                .map(|b| (b, s.label))
                .map_err(|e| Error::Parse(format!("sample {i} of {}: {e}", ds.source)))
        })
        .collect()
}

pub fn train_on_dataset(train: &Dataset, config: &RunConfig) -> Result<FusionEnsemble> {
    train_ensemble(&binarize_dataset(train, config)?, config)
}

/// Runs the four voters and the fusion on every test sample.
pub fn evaluate(ens: &FusionEnsemble, test: &Dataset) -> Result<EvalReport> {
    evaluate_with(ens, test, 0)
}

/// [`evaluate`] recording the training-set size in the report.
pub fn evaluate_with(ens: &FusionEnsemble, test: &Dataset, train_count: usize) -> Result<EvalReport> {
    if test.is_empty() {
        return Err(Error::Config("empty test set".into()));
    }
    let predictions = test
        .samples
        .par_iter()
        .map(|s| ens.predict_gray(&s.image).map(|p| (s.label, p)))
        .collect::<Result<Vec<_>>>()?;

    let systems = System::ALL
        .iter()
        .map(|&system| {
            let mut confusion = [[0u32; NUM_CLASSES]; NUM_CLASSES];
            for (truth, p) in &predictions {
                confusion[*truth as usize][system.pick(p) as usize] += 1;
            }
            SystemResult::from_confusion(system, confusion)
        })
        .collect();
    Ok(EvalReport {
        systems,
        split_seed: ens.config().seed,
        train_count,
        test_count: test.len(),
        tie_breaks: predictions.iter().filter(|(_, p)| p.tie_break.is_some()).count(),
    })
}

/// Split, train and evaluate in one go using the configuration's seed and fraction.
pub fn run_experiment(ds: &Dataset, config: &RunConfig) -> Result<(FusionEnsemble, EvalReport)> {
    let (train, test) = stratified_split(ds, config.split_fraction, config.seed)?;
    let ens = train_on_dataset(&train, config)?;
    let report = evaluate_with(&ens, &test, train.len())?;
    Ok((ens, report))
}

/// Mean and sample standard deviation of each system's average accuracy
/// over several split seeds.
#[derive(Clone, Debug, PartialEq)]
pub struct RepeatedSummary {
    pub seeds: Vec<u64>,
    pub mean: [f64; 5],
    pub stddev: [f64; 5],
}

pub fn repeated_evaluation(ds: &Dataset, config: &RunConfig, seeds: &[u64]) -> Result<RepeatedSummary> {
    if seeds.is_empty() {
        return Err(Error::Config("at least one seed is required".into()));
    }
    let mut averages: Vec<[f64; 5]> = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let cfg = RunConfig {
            seed,
            ..config.clone()
        };
        let (_, report) = run_experiment(ds, &cfg)?;
        averages.push(std::array::from_fn(|i| report.systems[i].average));
    }
    let n = averages.len() as f64;
    let mean: [f64; 5] = std::array::from_fn(|i| averages.iter().map(|a| a[i]).sum::<f64>() / n);
    let stddev = std::array::from_fn(|i| {
        if averages.len() < 2 {
            0.0
        } else {
            (averages.iter().map(|a| (a[i] - mean[i]).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        }
    });
    Ok(RepeatedSummary {
        seeds: seeds.to_vec(),
        mean,
        stddev,
    })
}

/// CSV with columns `system,mean,stddev`, one row per [`System::ALL`].
pub fn render_repeated(summary: &RepeatedSummary) -> String {
    let mut out = String::from("system,mean,stddev\n");
    for (i, system) in System::ALL.iter().enumerate() {
        let _ = writeln!(out, "{},{:.2},{:.2}", system.title(), summary.mean[i], summary.stddev[i]);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

fn cell(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v:.2}"),
        None => "n/a".to_string(),
    }
}

/// One row per class 0-9 plus an `Avg` row; columns follow [`System::ALL`].
pub fn render_report(r: &EvalReport, format: ReportFormat) -> String {
    let header: Vec<&str> = std::iter::once("Class")
        .chain(r.systems.iter().map(|s| s.system.title()))
        .collect();
    let mut rows: Vec<Vec<String>> = (0..NUM_CLASSES)
        .map(|c| {
            std::iter::once(c.to_string())
                .chain(r.systems.iter().map(|s| cell(s.per_class[c])))
                .collect()
        })
        .collect();
    rows.push(
        std::iter::once("Avg".to_string())
            .chain(r.systems.iter().map(|s| cell(Some(s.average))))
            .collect(),
    );

    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&header).expect("in-memory write");
            for row in &rows {
                w.write_record(row).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
        }
        ReportFormat::Markdown => {
            let mut out = String::new();
            let _ = writeln!(out, "| {} |", header.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(header.len()));
            for row in &rows {
                let _ = writeln!(out, "| {} |", row.join(" | "));
            }
            let _ = writeln!(
                out,
                "\nsplit seed {}, {} train / {} test samples, {} fused decisions by tie-break",
                r.split_seed, r.train_count, r.test_count, r.tie_breaks
            );
            out
        }
    }
}

/// Confusion matrix as CSV: header `true\predicted,0..9`, one row per true class.
pub fn render_confusion_csv(result: &SystemResult) -> String {
    let mut out = String::from("true\\predicted");
    for c in 0..NUM_CLASSES {
        let _ = write!(out, ",{c}");
    }
    out.push('\n');
    for (c, row) in result.confusion.iter().enumerate() {
        let _ = write!(out, "{c}");
        for v in row {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::GrayImage;

    fn dataset(per_class: &[usize]) -> Dataset {
        let mut samples = Vec::new();
        for (label, &n) in per_class.iter().enumerate() {
            for i in 0..n {
                samples.push(Sample {
                    image: GrayImage::filled(2, 2, (label * 20 + i) as u8),
                    label: label as Label,
                });
            }
        }
        Dataset::new(samples, "t").unwrap()
    }

    #[test]
    fn eighty_twenty_split() {
        let ds = dataset(&[10; 10]);
        let (train, test) = stratified_split(&ds, 0.8, 1).unwrap();
        assert_eq!(train.class_counts(), [8; 10]);
        assert_eq!(test.class_counts(), [2; 10]);
    }

    #[test]
    fn tiny_class_split() {
        let ds = dataset(&[2, 3]);
        let (train, test) = stratified_split(&ds, 0.5, 1).unwrap();
        assert_eq!(train.class_counts()[0], 1);
        assert_eq!(test.class_counts()[0], 1);
        // floor(1.5) = 1 to train
        assert_eq!(train.class_counts()[1], 1);
        assert!(stratified_split(&dataset(&[1, 4]), 0.5, 1).is_err());
        assert!(stratified_split(&ds, 1.0, 1).is_err());
    }

    #[test]
    fn split_is_seed_deterministic_disjoint_and_exhaustive() {
        let ds = dataset(&[7, 9, 4]);
        let a = stratified_split(&ds, 0.7, 11).unwrap();
        assert_eq!(a, stratified_split(&ds, 0.7, 11).unwrap());
        let mut all: Vec<_> = a.0.samples.iter().chain(&a.1.samples).map(|s| s.image.pixels()[0]).collect();
        all.sort_unstable();
        let mut expected: Vec<_> = ds.samples.iter().map(|s| s.image.pixels()[0]).collect();
        expected.sort_unstable();
        assert_eq!(all, expected);
    }

    #[test]
    fn accuracy_from_confusion() {
        let mut m = [[0u32; 10]; 10];
        m[0][0] = 3;
        m[0][7] = 1;
        m[1][1] = 2;
        let r = SystemResult::from_confusion(System::Fusion, m);
        assert_eq!(r.per_class[0], Some(75.0));
        assert_eq!(r.per_class[1], Some(100.0));
        assert_eq!(r.per_class[2], None);
        assert!((r.average - 87.5).abs() < 1e-12);
    }

    fn report() -> EvalReport {
        let mut m = [[0u32; 10]; 10];
        for (c, row) in m.iter_mut().enumerate() {
            row[c] = 2;
            row[(c + 1) % 10] = 1;
        }
        EvalReport {
            systems: System::ALL.iter().map(|&s| SystemResult::from_confusion(s, m)).collect(),
            split_seed: 5,
            train_count: 80,
            test_count: 30,
            tie_breaks: 0,
        }
    }

    #[test]
    fn renderings_agree() {
        let r = report();
        let csv = render_report(&r, ReportFormat::Csv);
        let md = render_report(&r, ReportFormat::Markdown);
        let csv_rows: Vec<Vec<String>> = csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(str::to_string).collect())
            .collect();
        let md_rows: Vec<Vec<String>> = md
            .lines()
            .skip(2)
            .take_while(|l| l.starts_with('|'))
            .map(|l| l.trim_matches('|').split('|').map(|c| c.trim().to_string()).collect())
            .collect();
        assert_eq!(csv_rows.len(), 11);
        assert_eq!(csv_rows, md_rows);
        assert_eq!(csv_rows[10][0], "Avg");
        assert_eq!(csv_rows[0][1], "66.67");
        assert!(csv.starts_with("Class,RLC & KNN,RLC & LC,DCC & KNN,DCC & LC,CF\n"));
    }

    #[test]
    fn confusion_csv_shape() {
        let text = render_confusion_csv(&report().systems[0]);
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 11);
        assert_eq!(lines[1], "0,2,1,0,0,0,0,0,0,0,0");
    }
}
