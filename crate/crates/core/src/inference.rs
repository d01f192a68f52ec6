//! Column-type posteriors over {date, float, integer, string} and per-value
//! row-type posteriors over {clean, missing, anomaly}.
//!
//! Every entry of a column of type `t` is modelled as a mixture: with weight
//! `π_clean` it comes from the machine for `t`, otherwise from the missing or
//! anomaly machine. The column posterior multiplies these mixtures over all
//! cells, grouping equal cells so each unique value is evaluated once and
//! raised to its count.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::DataColumn;
use crate::machines::{log_sum_exp, MachineLabel, MachineSet, ValueLikelihoods};
use crate::types::{argmax_first, BaseType, RowKind};

const SIMPLEX_TOLERANCE: f64 = 1e-9;

/// Prior over column types.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypePrior {
    pub date: f64,
    pub float: f64,
    pub integer: f64,
    pub string: f64,
}

impl TypePrior {
    pub fn get(&self, t: BaseType) -> f64 {
        match t {
            BaseType::Date => self.date,
            BaseType::Float => self.float,
            BaseType::Integer => self.integer,
            BaseType::String => self.string,
        }
    }
}

impl Default for TypePrior {
    fn default() -> Self {
        Self {
            date: 0.25,
            float: 0.25,
            integer: 0.25,
            string: 0.25,
        }
    }
}

/// Mixture weights of the three row types.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RowWeights {
    pub clean: f64,
    pub missing: f64,
    pub anomaly: f64,
}

impl RowWeights {
    pub fn get(&self, kind: RowKind) -> f64 {
        match kind {
            RowKind::Clean => self.clean,
            RowKind::Missing => self.missing,
            RowKind::Anomaly => self.anomaly,
        }
    }
}

impl Default for RowWeights {
    fn default() -> Self {
        Self {
            clean: 0.98,
            missing: 0.01,
            anomaly: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct InferenceConfig {
    pub type_prior: TypePrior,
    pub row_weights: RowWeights,
}

impl InferenceConfig {
    pub fn validate(&self) -> Result<()> {
        let prior: Vec<f64> = BaseType::ALL.iter().map(|&t| self.type_prior.get(t)).collect();
        let weights: Vec<f64> = RowKind::ALL.iter().map(|&k| self.row_weights.get(k)).collect();
        check_simplex("type_prior", &prior)?;
        check_simplex("row_weights", &weights)?;
        if weights.iter().any(|&w| w <= 0.0) {
            return Err(Error::Config("row_weights must all be positive".into()));
        }
        Ok(())
    }
}

fn check_simplex(name: &str, values: &[f64]) -> Result<()> {
    let sum: f64 = values.iter().sum();
    if values.iter().any(|v| !(0.0..=1.0).contains(v)) || (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
        return Err(Error::Config(format!(
            "{name} must be a probability distribution, got {values:?}"
        )));
    }
    Ok(())
}

/// `p(t | x)` over the four base types.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypePosterior4([f64; 4]);

impl TypePosterior4 {
    /// Builds a posterior from probabilities in [`BaseType::ALL`] order.
    pub fn new(probabilities: [f64; 4]) -> Result<Self> {
        check_simplex("type posterior", &probabilities)?;
        Ok(Self(probabilities))
    }

    pub fn get(&self, t: BaseType) -> f64 {
        self.0[t.index()]
    }

    pub fn as_array(&self) -> [f64; 4] {
        self.0
    }

    /// Most probable type; ties go to date, then float, integer, string.
    pub fn argmax(&self) -> BaseType {
        BaseType::ALL[argmax_first(&self.0)]
    }
}

impl Serialize for TypePosterior4 {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(4))?;
        for t in BaseType::ALL {
            map.serialize_entry(t.as_str(), &self.get(t))?;
        }
        map.end()
    }
}

/// Posterior over row types for one unique value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowPosterior {
    pub value: String,
    pub count: usize,
    pub clean: f64,
    pub missing: f64,
    pub anomaly: f64,
}

impl RowPosterior {
    pub fn get(&self, kind: RowKind) -> f64 {
        match kind {
            RowKind::Clean => self.clean,
            RowKind::Missing => self.missing,
            RowKind::Anomaly => self.anomaly,
        }
    }

    /// Most probable row type; ties go to clean, then missing.
    pub fn argmax(&self) -> RowKind {
        RowKind::ALL[argmax_first(&[self.clean, self.missing, self.anomaly])]
    }
}

/// Unique values labelled clean under a column type, with `N_c` and `U_c`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CleanEntries {
    pub values: BTreeSet<String>,
    pub clean_rows: usize,
}

impl CleanEntries {
    /// `U_c`.
    pub fn unique_count(&self) -> usize {
        self.values.len()
    }

    /// `N_c`.
    pub fn row_count(&self) -> usize {
        self.clean_rows
    }
}

#[derive(Debug, Clone)]
struct ValueEvidence<'a> {
    value: &'a str,
    count: usize,
    likelihoods: ValueLikelihoods,
}

/// Machine likelihoods of every unique value of a column, computed once and
/// shared by the column posterior and the row posteriors.
#[derive(Debug, Clone)]
pub struct ColumnEvidence<'a> {
    column: &'a DataColumn,
    values: Vec<ValueEvidence<'a>>,
}

impl<'a> ColumnEvidence<'a> {
    pub fn new(column: &'a DataColumn, machines: &MachineSet) -> Result<Self> {
        if column.is_empty() {
            return Err(Error::EmptyColumn(column.name().to_string()));
        }
        let values = column
            .tallies()
            .iter()
            .map(|(value, &count)| ValueEvidence {
                value,
                count,
                likelihoods: machines.likelihoods(value),
            })
            .collect();
        Ok(Self { column, values })
    }

    pub fn column(&self) -> &'a DataColumn {
        self.column
    }

    /// `ln p(v | t)` of the three-way mixture for each unique value.
    fn mixture_terms(lik: &ValueLikelihoods, t: BaseType, w: &RowWeights) -> [f64; 3] {
        [
            w.clean.ln() + lik.base(t),
            w.missing.ln() + lik.get(MachineLabel::Missing),
            w.anomaly.ln() + lik.get(MachineLabel::Anomaly),
        ]
    }

    /// Unnormalized `ln p(t) + ln p(x | t)` for each base type.
    pub fn log_joint(&self, config: &InferenceConfig) -> [f64; 4] {
        BaseType::ALL.map(|t| {
            let evidence: f64 = self
                .values
                .iter()
                .map(|v| {
                    let terms = Self::mixture_terms(&v.likelihoods, t, &config.row_weights);
                    v.count as f64 * log_sum_exp(&terms)
                })
                .sum();
            config.type_prior.get(t).ln() + evidence
        })
    }

    pub fn type_posterior(&self, config: &InferenceConfig) -> TypePosterior4 {
        let joint = self.log_joint(config);
        let norm = log_sum_exp(&joint);
        TypePosterior4(joint.map(|l| (l - norm).exp()))
    }

    pub fn row_posteriors(&self, t: BaseType, config: &InferenceConfig) -> Vec<RowPosterior> {
        self.values
            .iter()
            .map(|v| {
                let terms = Self::mixture_terms(&v.likelihoods, t, &config.row_weights);
                let norm = log_sum_exp(&terms);
                let [clean, missing, anomaly] = terms.map(|l| (l - norm).exp());
                RowPosterior {
                    value: v.value.to_string(),
                    count: v.count,
                    clean,
                    missing,
                    anomaly,
                }
            })
            .collect()
    }

    pub fn clean_entries(&self, t: BaseType, config: &InferenceConfig) -> CleanEntries {
        let mut entries = CleanEntries::default();
        for row in self.row_posteriors(t, config) {
            if row.argmax() == RowKind::Clean {
                entries.clean_rows += row.count;
                entries.values.insert(row.value);
            }
        }
        entries
    }
}

pub fn column_type_posterior(
    column: &DataColumn,
    machines: &MachineSet,
    config: &InferenceConfig,
) -> Result<TypePosterior4> {
    Ok(ColumnEvidence::new(column, machines)?.type_posterior(config))
}

pub fn row_type_posteriors(
    column: &DataColumn,
    t: BaseType,
    machines: &MachineSet,
    config: &InferenceConfig,
) -> Result<Vec<RowPosterior>> {
    Ok(ColumnEvidence::new(column, machines)?.row_posteriors(t, config))
}

pub fn clean_entries(
    column: &DataColumn,
    t: BaseType,
    machines: &MachineSet,
    config: &InferenceConfig,
) -> Result<CleanEntries> {
    Ok(ColumnEvidence::new(column, machines)?.clean_entries(t, config))
}
