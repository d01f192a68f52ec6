mod common;

use colcat_core::inference::{clean_entries, column_type_posterior, InferenceConfig, TypePrior};
use colcat_core::ingest::DataColumn;
use colcat_core::machines::builtin_machines;
use colcat_core::types::BaseType;
use proptest::prelude::*;

use common::ALPHABET;

fn cell() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(ALPHABET.to_vec()), 0..6).prop_map(|c| c.into_iter().collect())
}

fn cells() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(cell(), 1..20)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn posterior_ignores_row_order(mut cells in cells(), seed in any::<u64>()) {
        let machines = builtin_machines();
        let cfg = InferenceConfig::default();
        let a = column_type_posterior(&DataColumn::new("c", cells.clone()), &machines, &cfg).unwrap();
        let k = (seed as usize) % cells.len();
        cells.rotate_left(k);
        cells.reverse();
        let b = column_type_posterior(&DataColumn::new("c", cells), &machines, &cfg).unwrap();
        let bits = |p: [f64; 4]| p.map(f64::to_bits);
        prop_assert_eq!(bits(a.as_array()), bits(b.as_array()));
    }

    #[test]
    fn replication_sharpens_the_winner_under_a_flat_prior(cells in cells()) {
        let machines = builtin_machines();
        let cfg = InferenceConfig {
            type_prior: TypePrior { date: 0.25, float: 0.25, integer: 0.25, string: 0.25 },
            ..InferenceConfig::default()
        };
        let once = column_type_posterior(&DataColumn::new("c", cells.clone()), &machines, &cfg).unwrap();
        let top = once.argmax();
        let twice: Vec<String> = cells.iter().chain(&cells).cloned().collect();
        let twice = column_type_posterior(&DataColumn::new("c", twice), &machines, &cfg).unwrap();
        prop_assert!(twice.get(top) >= once.get(top) - 1e-12);
    }

    #[test]
    fn clean_entries_are_a_subset(cells in cells()) {
        let machines = builtin_machines();
        let cfg = InferenceConfig::default();
        let column = DataColumn::new("c", cells);
        for t in BaseType::ALL {
            let clean = clean_entries(&column, t, &machines, &cfg).unwrap();
            prop_assert!(clean.unique_count() <= column.unique_count());
            prop_assert!(clean.row_count() <= column.len());
            prop_assert!(clean.values.iter().all(|v| column.count_of(v) > 0));
        }
    }
}

#[test]
fn obvious_columns_get_obvious_types() {
    let machines = builtin_machines();
    let cfg = InferenceConfig::default();
    let cases: [(&[&str], BaseType); 4] = [
        (&["1", "22", "-7", "NULL", "40"], BaseType::Integer),
        (&["1.5", "2.25", "-0.5", "3e4"], BaseType::Float),
        (&["2020-01-02", "2021-12-31", "NA", "1999-07-04"], BaseType::Date),
        (&["red fox", "blue whale", "green", "tan"], BaseType::String),
    ];
    for (cells, want) in cases {
        let p = column_type_posterior(&DataColumn::from_strs("c", cells), &machines, &cfg).unwrap();
        assert_eq!(p.argmax(), want, "{cells:?}");
    }
}

#[test]
fn empty_column_is_an_error() {
    let machines = builtin_machines();
    let column = DataColumn::new("c", Vec::new());
    assert!(column_type_posterior(&column, &machines, &InferenceConfig::default()).is_err());
}
