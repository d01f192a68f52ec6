//! Possible values of a categorical column, and the Unique baseline.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::inference::{ColumnEvidence, InferenceConfig, RowPosterior};
use crate::ingest::DataColumn;
use crate::machines::MachineSet;
use crate::error::Result;
use crate::types::{BaseType, RowKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoricalValue {
    pub value: String,
    pub count: usize,
    pub clean_posterior: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcludedValue {
    pub value: String,
    pub count: usize,
    pub label: RowKind,
}

/// Clean values of a column (the categories) and everything left out.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CategoricalValueReport {
    pub values: Vec<CategoricalValue>,
    pub excluded: Vec<ExcludedValue>,
}

fn by_count_then_value(a: (&str, usize), b: (&str, usize)) -> Ordering {
    b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0))
}

impl CategoricalValueReport {
    /// Splits row posteriors by their argmax row type.
    pub fn from_row_posteriors(rows: Vec<RowPosterior>) -> Self {
        let mut report = Self::default();
        for row in rows {
            match row.argmax() {
                RowKind::Clean => report.values.push(CategoricalValue {
                    clean_posterior: row.clean,
                    value: row.value,
                    count: row.count,
                }),
                label => report.excluded.push(ExcludedValue {
                    value: row.value,
                    count: row.count,
                    label,
                }),
            }
        }
        report
            .values
            .sort_by(|a, b| by_count_then_value((&a.value, a.count), (&b.value, b.count)));
        report
            .excluded
            .sort_by(|a, b| by_count_then_value((&a.value, a.count), (&b.value, b.count)));
        report
    }

    pub fn value_strings(&self) -> Vec<&str> {
        self.values.iter().map(|v| v.value.as_str()).collect()
    }

    pub fn is_excluded(&self, value: &str) -> bool {
        self.excluded.iter().any(|e| e.value == value)
    }

    pub fn total_count(&self) -> usize {
        self.values.iter().map(|v| v.count).sum::<usize>()
            + self.excluded.iter().map(|e| e.count).sum::<usize>()
    }
}

/// Clean entries of `column` under `base_type`, with their clean posteriors.
pub fn categorical_values(
    column: &DataColumn,
    base_type: BaseType,
    machines: &MachineSet,
    config: &InferenceConfig,
) -> Result<CategoricalValueReport> {
    let evidence = ColumnEvidence::new(column, machines)?;
    Ok(CategoricalValueReport::from_row_posteriors(
        evidence.row_posteriors(base_type, config),
    ))
}

/// Every unique value is a category.
pub fn unique_baseline(column: &DataColumn) -> CategoricalValueReport {
    let mut values: Vec<CategoricalValue> = column
        .tallies()
        .iter()
        .map(|(value, &count)| CategoricalValue {
            value: value.clone(),
            count,
            clean_posterior: 1.0,
        })
        .collect();
    values.sort_by(|a, b| by_count_then_value((&a.value, a.count), (&b.value, b.count)));
    CategoricalValueReport {
        values,
        excluded: Vec::new(),
    }
}
