use colcat_core::baselines::{
    bot_infer, bot_values, openml_infer, openml_values, weka_infer, BotParams, BotSummary, OpenMlParams,
    OpenMlSummary,
};
use colcat_core::inference::{column_type_posterior, InferenceConfig};
use colcat_core::ingest::DataColumn;
use colcat_core::machines::builtin_machines;
use colcat_core::types::DataType;
use proptest::prelude::*;

fn cells() -> impl Strategy<Value = Vec<String>> {
    let cell = prop_oneof![
        (0i64..40).prop_map(|v| v.to_string()),
        (0.0f64..9.0).prop_map(|v| format!("{v:.1}")),
        prop::sample::select(vec!["NULL", "NA", "", "red", "blue", "2020-01-01", "2020-01-01T10:00:00"])
            .prop_map(String::from),
    ];
    prop::collection::vec(cell, 1..50)
}

proptest! {
    #[test]
    fn summaries_agree_with_direct_rules(cells in cells(), t_int in 10usize..60, t_str in 25usize..60, min in 1usize..6, t in 1usize..40) {
        let machines = builtin_machines();
        let vocabulary = machines.vocabulary();
        let column = DataColumn::new("c", cells);
        let posterior = column_type_posterior(&column, &machines, &InferenceConfig::default()).unwrap();

        let bot = BotParams::new(t_int, t_str, min).unwrap();
        let summary = BotSummary::new(&column, vocabulary);
        prop_assert_eq!(summary.infer(&bot), bot_infer(&column, &bot, vocabulary));
        let listed: Vec<&str> = summary.values(&bot).collect();
        prop_assert_eq!(listed, bot_values(&column, &bot));

        let openml = OpenMlParams::new(t).unwrap();
        let summary = OpenMlSummary::new(&column, vocabulary, &posterior);
        let direct = openml_infer(&column, &openml, vocabulary, &posterior);
        prop_assert_eq!(summary.infer(&openml), direct);
        let values = openml_values(&column, vocabulary);
        prop_assert_eq!(summary.values(), values.as_slice());
        prop_assert_eq!(direct == DataType::Categorical, column.unique_count() <= t);
        prop_assert!(direct != DataType::Date);

        prop_assert!(weka_infer(&column, &posterior).predicted != DataType::String);
    }
}

#[test]
fn bot_small_integer_columns_are_categorical() {
    let machines = builtin_machines();
    let column = DataColumn::from_strs("c", &["1", "2", "3", "1", "2", "3"]);
    assert_eq!(bot_infer(&column, &BotParams::default(), machines.vocabulary()), DataType::Categorical);
}

#[test]
fn weka_sentinel_makes_a_column_nominal() {
    let machines = builtin_machines();
    let column = DataColumn::from_strs("c", &["1", "2", "3", "NULL"]);
    let posterior = column_type_posterior(&column, &machines, &InferenceConfig::default()).unwrap();
    let weka = weka_infer(&column, &posterior);
    assert_eq!(weka.predicted, DataType::Categorical);
    assert_eq!(weka.values.len(), 4);
}

#[test]
fn invalid_thresholds_are_rejected() {
    assert!(OpenMlParams::new(0).is_err());
    assert!(BotParams::new(9, 25, 5).is_err());
}
