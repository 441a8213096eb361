//! Majority voting over the four voters, with tie-breaks, and a trained ensemble.
//!
//! cargo run --example fusion_vote

use numeral_fusion::config::RunConfig;
use numeral_fusion::data_io::generate_synthetic;
use numeral_fusion::eval::{binarize_dataset, stratified_split};
use numeral_fusion::fusion::{majority_vote, train_ensemble, VoterId};

fn main() -> anyhow::Result<()> {
    for votes in [[4, 4, 4, 4], [1, 6, 6, 2], [1, 1, 6, 6], [3, 5, 7, 9]] {
        let (label, tie) = majority_vote(votes, &VoterId::ALL);
        match tie {
            Some(v) => println!("{votes:?} -> {label} (tie broken by {v})"),
            None => println!("{votes:?} -> {label}"),
        }
    }

    let config = RunConfig::default();
    let (train, test) = stratified_split(&generate_synthetic(3, 10), config.split_fraction, config.seed)?;
    let ens = train_ensemble(&binarize_dataset(&train, &config)?, &config)?;
    for s in test.samples.iter().take(5) {
        let p = ens.predict_gray(&s.image)?;
        println!("true {} -> fused {} from votes {:?}", s.label, p.label, p.votes());
    }
    Ok(())
}
