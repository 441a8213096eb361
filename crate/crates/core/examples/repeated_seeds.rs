//! Mean and standard deviation of average accuracy over several split seeds.
//!
//! cargo run --release --example repeated_seeds

use std::path::Path;

use numeral_fusion::config::RunConfig;
use numeral_fusion::data_io::load_idx;
use numeral_fusion::eval::{render_repeated, repeated_evaluation};
use numeral_fusion::imaging::Polarity;

fn main() -> anyhow::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/mnist600");
    let ds = load_idx(&dir.join("images-idx3-ubyte"), &dir.join("labels-idx1-ubyte"))?;
    let config = RunConfig {
        ink_polarity: Polarity::InkLight,
        ..RunConfig::default()
    };
    let seeds: Vec<u64> = (1..=5).collect();
    let summary = repeated_evaluation(&ds, &config, &seeds)?;
    println!("seeds {seeds:?}");
    print!("{}", render_repeated(&summary));
    Ok(())
}
