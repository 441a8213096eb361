//! KNN and ridge linear classifiers on chain-code features of synthetic digits.
//!
//! cargo run --example classifiers

use numeral_fusion::classify::{knn_train, linear_train, LabeledSample};
use numeral_fusion::config::RunConfig;
use numeral_fusion::data_io::generate_synthetic;
use numeral_fusion::eval::{binarize_dataset, stratified_split};
use numeral_fusion::features::Extractor;

fn main() -> anyhow::Result<()> {
    let config = RunConfig::default();
    let (train, test) = stratified_split(&generate_synthetic(1, 12), 0.75, 1)?;
    let extractor = Extractor::Dcc(config.dcc_grid);
    let featurize = |ds| -> anyhow::Result<Vec<LabeledSample>> {
        binarize_dataset(ds, &config)?
            .into_iter()
            .map(|(b, label)| {
                Ok(LabeledSample {
                    features: extractor.extract(&b)?.l2_normalized(),
                    label,
                })
            })
            .collect()
    };
    let (train, test) = (featurize(&train)?, featurize(&test)?);

    let knn = knn_train(train.clone(), 3)?;
    let linear = linear_train(&train, 1e-3)?;
    let (mut knn_ok, mut lin_ok) = (0, 0);
    for s in &test {
        knn_ok += usize::from(knn.predict(&s.features)?.label == s.label);
        lin_ok += usize::from(linear.predict(&s.features)?.label == s.label);
    }
    println!("{} train / {} test samples, {} features", train.len(), test.len(), extractor.dim());
    println!("knn (k=3): {knn_ok}/{} correct", test.len());
    println!("linear:    {lin_ok}/{} correct", test.len());

    let p = knn.predict(&test[0].features)?;
    println!("first test sample (label {}): knn votes {:?}", test[0].label, p.votes);
    Ok(())
}
