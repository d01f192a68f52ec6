use std::collections::BTreeSet;

use colcat_core::metrics::{jaccard_per_type, jaccard_sets, overall_accuracy, pr_curve, ConfusionMatrix};
use colcat_core::types::DataType;
use proptest::prelude::*;

fn set() -> impl Strategy<Value = BTreeSet<u8>> {
    prop::collection::btree_set(0u8..12, 0..8)
}

fn data_type() -> impl Strategy<Value = DataType> {
    prop::sample::select(DataType::ALL.to_vec())
}

proptest! {
    #[test]
    fn jaccard_is_symmetric_and_bounded(a in set(), b in set()) {
        let ab = jaccard_sets(&a, &b);
        prop_assert_eq!(ab, jaccard_sets(&b, &a));
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert_eq!(jaccard_sets(&a, &a), 1.0);
    }

    #[test]
    fn pr_curve_is_well_formed(scored in prop::collection::vec((0.0f64..1.0, any::<bool>()), 1..40)) {
        let curve = pr_curve(&scored);
        prop_assert!((0.0..=1.0).contains(&curve.average_precision));
        for w in curve.points.windows(2) {
            prop_assert!(w[1].recall >= w[0].recall);
            prop_assert!(w[1].threshold < w[0].threshold);
        }
        for p in &curve.points {
            prop_assert!((0.0..=1.0).contains(&p.precision));
        }
    }

    #[test]
    fn per_type_jaccard_matches_counts(
        pairs in prop::collection::vec((data_type(), data_type()), 1..30),
        t in data_type(),
    ) {
        let (pred, truth): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let tp = pred.iter().zip(&truth).filter(|(p, g)| **p == t && **g == t).count();
        let union = pred.iter().zip(&truth).filter(|(p, g)| **p == t || **g == t).count();
        let want = if union == 0 { 1.0 } else { tp as f64 / union as f64 };
        prop_assert_eq!(jaccard_per_type(&pred, &truth, t), want);
        let matrix = ConfusionMatrix::new(&pred, &truth);
        let total: usize = matrix.counts.iter().flatten().sum();
        prop_assert_eq!(total, pred.len());
        let correct = pred.iter().zip(&truth).filter(|(p, g)| p == g).count();
        prop_assert_eq!(overall_accuracy(&pred, &truth), correct as f64 / pred.len() as f64);
    }
}

#[test]
fn no_positives_gives_zero_average_precision() {
    let curve = pr_curve(&[(0.4, false), (0.2, false)]);
    assert_eq!(curve.average_precision, 0.0);
    assert_eq!(curve.positives, 0);
}

#[test]
fn tied_scores_form_one_point() {
    let curve = pr_curve(&[(0.5, true), (0.5, false), (0.5, true)]);
    assert_eq!(curve.points.len(), 1);
    assert!((curve.average_precision - 2.0 / 3.0).abs() < 1e-12);
}
