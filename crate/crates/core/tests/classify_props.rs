mod common;

use common::knn_oracle;
use numeral_fusion::classify::{knn_train, linear_train, Label, LabeledSample, LinearModel};
use numeral_fusion::features::FeatureVector;
use proptest::prelude::*;

fn samples(dim: usize, n: usize) -> impl Strategy<Value = Vec<(Vec<f64>, Label)>> {
    // small integer coordinates make exact distance ties common
    proptest::collection::vec(
        (proptest::collection::vec((-3i32..=3).prop_map(f64::from), dim), 0u8..10),
        n,
    )
}

fn to_labeled(v: &[(Vec<f64>, Label)]) -> Vec<LabeledSample> {
    v.iter().map(|(x, l)| LabeledSample::new(x.clone(), *l)).collect()
}

proptest! {
    #[test]
    fn knn_matches_full_sort(
        (protos, queries) in (1usize..5).prop_flat_map(|d| (samples(d, 30), proptest::collection::vec(proptest::collection::vec((-3i32..=3).prop_map(f64::from), d), 5))),
        k in 1usize..=5,
    ) {
        let model = knn_train(to_labeled(&protos), k).unwrap();
        for q in &queries {
            let got = model.predict(&FeatureVector(q.clone())).unwrap();
            let (label, votes) = knn_oracle(&protos, q, k);
            prop_assert_eq!(got.label, label);
            prop_assert_eq!(got.votes, votes);
        }
    }

    #[test]
    fn one_nn_returns_own_label(protos in samples(3, 20)) {
        let model = knn_train(to_labeled(&protos), 1).unwrap();
        for (i, (x, label)) in protos.iter().enumerate() {
            // an identical vector earlier in the list wins the distance tie
            let first = protos.iter().position(|(y, _)| y == x).unwrap();
            prop_assume!(first == i || protos[first].1 == *label);
            prop_assert_eq!(model.predict(&FeatureVector(x.clone())).unwrap().label, *label);
        }
    }

    #[test]
    fn linear_training_is_bit_deterministic(data in samples(4, 25), ridge in 1e-3f64..1.0) {
        let set = to_labeled(&data);
        prop_assume!(set.iter().any(|s| s.label != set[0].label));
        let a = linear_train(&set, ridge).unwrap();
        let b = linear_train(&set, ridge).unwrap();
        let bits = |m: &LinearModel| m.weights().iter().map(|w| w.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn argmax_ignores_a_shared_weight_offset(
        rows in proptest::collection::vec(proptest::collection::vec(-20i32..20, 4), 2..10),
        offset in proptest::collection::vec(-20i32..20, 4),
        x in proptest::collection::vec(-5i32..5, 3),
    ) {
        let classes: Vec<Label> = (0..rows.len() as Label).collect();
        let flat = |shift: bool| -> Vec<f64> {
            rows.iter()
                .flat_map(|r| r.iter().zip(&offset).map(move |(w, o)| f64::from(w + if shift { *o } else { 0 })))
                .collect()
        };
        let a = LinearModel::from_weights(classes.clone(), 3, 0.0, flat(false)).unwrap();
        let b = LinearModel::from_weights(classes, 3, 0.0, flat(true)).unwrap();
        let x = FeatureVector(x.into_iter().map(f64::from).collect());
        prop_assert_eq!(a.predict(&x).unwrap().label, b.predict(&x).unwrap().label);
    }
}

#[test]
fn dimension_mismatch_is_rejected() {
    let set = vec![LabeledSample::new(vec![0.0, 1.0], 0), LabeledSample::new(vec![1.0, 0.0], 1)];
    let knn = knn_train(set.clone(), 1).unwrap();
    let lin = linear_train(&set, 0.1).unwrap();
    for x in [vec![0.0], vec![0.0, 1.0, 2.0]] {
        assert!(knn.predict(&FeatureVector(x.clone())).is_err());
        assert!(lin.predict(&FeatureVector(x)).is_err());
    }
    let mixed = vec![LabeledSample::new(vec![0.0, 1.0], 0), LabeledSample::new(vec![1.0], 1)];
    assert!(knn_train(mixed.clone(), 1).is_err());
    assert!(linear_train(&mixed, 0.1).is_err());
}

#[test]
fn knn_rejects_k_above_prototype_count() {
    let set = vec![LabeledSample::new(vec![0.0], 0), LabeledSample::new(vec![1.0], 1)];
    assert!(knn_train(set.clone(), 3).unwrap_err().is_config());
    assert!(knn_train(set, 0).unwrap_err().is_config());
}

#[test]
fn linear_rows_follow_distinct_labels() {
    let set: Vec<_> = [(0.0, 2), (1.0, 5), (2.0, 2), (3.0, 9)]
        .iter()
        .map(|&(x, l)| LabeledSample::new(vec![x], l))
        .collect();
    let m = linear_train(&set, 0.1).unwrap();
    assert_eq!(m.classes(), &[2, 5, 9]);
    assert_eq!(m.weights().len(), 3 * 2);
}
