//! Train and evaluate the full ensemble on the bundled 600-sample MNIST subset.
//!
//! cargo run --release --example mnist_eval

use std::path::Path;

use numeral_fusion::config::RunConfig;
use numeral_fusion::data_io::load_idx;
use numeral_fusion::eval::{render_confusion_csv, render_report, run_experiment, ReportFormat, System};
use numeral_fusion::imaging::Polarity;

fn main() -> anyhow::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/mnist600");
    let ds = load_idx(&dir.join("images-idx3-ubyte"), &dir.join("labels-idx1-ubyte"))?;
    let config = RunConfig {
        split_fraction: 500.0 / 600.0,
        ink_polarity: Polarity::InkLight,
        ..RunConfig::default()
    };
    let (_, report) = run_experiment(&ds, &config)?;
    print!("{}", render_report(&report, ReportFormat::Markdown));
    println!("\nfusion confusion matrix:\n{}", render_confusion_csv(report.system(System::Fusion)));
    Ok(())
}
