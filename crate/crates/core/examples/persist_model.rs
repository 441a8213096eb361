//! Save a trained ensemble with its training manifest and load it back.
//!
//! cargo run --example persist_model

use numeral_fusion::config::RunConfig;
use numeral_fusion::data_io::{generate_synthetic, write_atomic};
use numeral_fusion::eval::{stratified_split, train_on_dataset};
use numeral_fusion::persist::{decode_ensemble, encode_ensemble, TrainManifest};

fn main() -> anyhow::Result<()> {
    let config = RunConfig::default();
    let ds = generate_synthetic(5, 10);
    let (train, test) = stratified_split(&ds, config.split_fraction, config.seed)?;
    let ens = train_on_dataset(&train, &config)?;
    let manifest = TrainManifest::new(ds.source.clone(), train.samples.iter().map(|s| &s.image));

    let path = std::env::temp_dir().join("numeral-fusion-example.bin");
    let bytes = encode_ensemble(&ens, &manifest);
    write_atomic(&path, &bytes)?;
    println!("wrote {} bytes to {}", bytes.len(), path.display());

    let (loaded, manifest) = decode_ensemble(&std::fs::read(&path)?)?;
    assert_eq!(loaded, ens);
    let leaked = test.samples.iter().filter(|s| manifest.contains(&s.image)).count();
    println!("config:\n{}", loaded.config().to_text());
    println!("{} training digests, {leaked} test images among them", manifest.train_digests.len());
    Ok(())
}
