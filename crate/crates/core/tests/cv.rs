use colcat_core::baselines::OpenMlParams;
use colcat_core::corpus::{AnnotatedCorpus, AnnotatedDataset, ColumnAnnotation, PreparedCorpus};
use colcat_core::cv::{assign_folds, nested_cv};
use colcat_core::evaluate::{check_dataset_split, EvaluationContext, OpenMlTrainee};
use colcat_core::inference::InferenceConfig;
use colcat_core::ingest::{DataColumn, DataTable};
use colcat_core::machines::builtin_machines;
use colcat_core::types::DataType;

/// Every dataset holds a 10-level categorical code and an 11-level integer,
/// so a unique-count threshold of exactly 10 is the only error-free setting.
fn threshold_corpus(datasets: usize) -> PreparedCorpus {
    let mut corpus = AnnotatedCorpus::default();
    for d in 0..datasets {
        let code: Vec<String> = (0..60).map(|i| ((i + d) % 10).to_string()).collect();
        let count: Vec<String> = (0..66).map(|i| ((i + d) % 11 * 3).to_string()).take(60).collect();
        let table = DataTable::new(
            format!("t{d}"),
            vec![DataColumn::new("code", code.clone()), DataColumn::new("count", count)],
        )
        .unwrap();
        let annotations = [
            ColumnAnnotation {
                name: "code".into(),
                data_type: DataType::Categorical,
                values: Some((0..10).map(|v| v.to_string()).collect()),
            },
            ColumnAnnotation {
                name: "count".into(),
                data_type: DataType::Integer,
                values: None,
            },
        ];
        corpus
            .datasets
            .push(AnnotatedDataset::new(format!("t{d}.csv"), table, &annotations).unwrap());
    }
    PreparedCorpus::new(&corpus, builtin_machines(), InferenceConfig::default()).unwrap()
}

#[test]
fn uniquely_optimal_threshold_is_selected_everywhere() {
    let corpus = threshold_corpus(12);
    let ctx = EvaluationContext::new(&corpus);
    let grid: Vec<OpenMlParams> = [5, 8, 9, 10, 11, 20].map(|t| OpenMlParams::new(t).unwrap()).to_vec();
    let report = nested_cv(&OpenMlTrainee(&ctx), corpus.dataset_count(), &grid, 4, 3).unwrap();
    check_dataset_split(&corpus, &report).unwrap();
    for fold in &report.folds {
        assert_eq!(fold.selected.unique_threshold, 10);
        assert_eq!(fold.test_error, 0.0);
        assert_eq!(fold.inner_errors[3], 0.0);
        assert!(fold.inner_errors.iter().enumerate().all(|(i, &e)| i == 3 || e > 0.0));
    }
    assert_eq!(report.modal_selection(), 3);
}

#[test]
fn folds_partition_the_datasets() {
    for (n, k) in [(10, 5), (11, 3), (60, 5), (2, 2)] {
        let folds = assign_folds(n, k, 42);
        assert_eq!(folds.len(), k);
        let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..n).collect::<Vec<_>>());
        let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        assert_eq!(folds, assign_folds(n, k, 42));
    }
}

#[test]
fn too_few_datasets_is_a_configuration_error() {
    let corpus = threshold_corpus(3);
    let ctx = EvaluationContext::new(&corpus);
    let grid = [OpenMlParams::default()];
    assert!(nested_cv(&OpenMlTrainee(&ctx), corpus.dataset_count(), &grid, 5, 0).is_err());
}
