//! Categorical detection: features, the binary classifier, and the split of
//! the inferred type's posterior mass into categorical and non-categorical.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::{CleanEntries, ColumnEvidence, InferenceConfig, TypePosterior4};
use crate::ingest::{DataColumn, DataTable};
use crate::machines::MachineSet;
use crate::types::{argmax_first, BaseType, DataType};
use crate::values::CategoricalValueReport;

pub const FEATURE_COUNT: usize = 8;
/// Feature order used by [`FeatureVector::to_array`] and model files.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "p_date", "p_float", "p_integer", "p_string", "U", "R", "U_c", "R_c",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub p_date: f64,
    pub p_float: f64,
    pub p_integer: f64,
    pub p_string: f64,
    /// Number of unique values.
    pub unique: f64,
    /// Unique values over rows.
    pub ratio: f64,
    /// Number of unique clean values.
    pub clean_unique: f64,
    /// Unique clean values over clean rows; 0 without clean rows.
    pub clean_ratio: f64,
}

impl FeatureVector {
    pub fn to_array(&self) -> [f64; FEATURE_COUNT] {
        [
            self.p_date,
            self.p_float,
            self.p_integer,
            self.p_string,
            self.unique,
            self.ratio,
            self.clean_unique,
            self.clean_ratio,
        ]
    }

    pub fn from_array(a: [f64; FEATURE_COUNT]) -> Self {
        Self {
            p_date: a[0],
            p_float: a[1],
            p_integer: a[2],
            p_string: a[3],
            unique: a[4],
            ratio: a[5],
            clean_unique: a[6],
            clean_ratio: a[7],
        }
    }
}

pub fn extract_features(
    column: &DataColumn,
    posterior: &TypePosterior4,
    clean: &CleanEntries,
) -> FeatureVector {
    let n = column.len() as f64;
    let u = column.unique_count() as f64;
    let u_c = clean.unique_count() as f64;
    let n_c = clean.row_count();
    FeatureVector {
        p_date: posterior.get(BaseType::Date),
        p_float: posterior.get(BaseType::Float),
        p_integer: posterior.get(BaseType::Integer),
        p_string: posterior.get(BaseType::String),
        unique: u,
        ratio: u / n,
        clean_unique: u_c,
        clean_ratio: if n_c == 0 { 0.0 } else { u_c / n_c as f64 },
    }
}

/// Binary logistic classifier over standardized features.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    pub weights: [f64; FEATURE_COUNT],
    pub bias: f64,
    pub feature_means: [f64; FEATURE_COUNT],
    pub feature_stds: [f64; FEATURE_COUNT],
    /// Inverse L2 regularization strength the model was trained with.
    pub c: f64,
}

#[derive(Serialize, Deserialize)]
struct ModelDocument {
    weights: Vec<f64>,
    bias: f64,
    feature_means: Vec<f64>,
    feature_stds: Vec<f64>,
    #[serde(rename = "C")]
    c: f64,
    feature_names: Vec<String>,
}

const BUNDLED_MODEL: &str = include_str!("../models/default.json");

fn fixed<const N: usize>(name: &str, v: Vec<f64>) -> Result<[f64; N]> {
    let len = v.len();
    v.try_into()
        .map_err(|_| Error::Model(format!("{name} has {len} entries, expected {N}")))
}

impl LogisticModel {
    pub fn new(
        weights: [f64; FEATURE_COUNT],
        bias: f64,
        feature_means: [f64; FEATURE_COUNT],
        feature_stds: [f64; FEATURE_COUNT],
        c: f64,
    ) -> Result<Self> {
        let model = Self {
            weights,
            bias,
            feature_means,
            feature_stds,
            c,
        };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        if self.feature_stds.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(Error::Model("feature_stds must all be positive".into()));
        }
        if !(self.c > 0.0) {
            return Err(Error::Model(format!("C must be positive, got {}", self.c)));
        }
        let finite = self
            .weights
            .iter()
            .chain(&self.feature_means)
            .chain(std::iter::once(&self.bias))
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Model("model parameters must be finite".into()));
        }
        Ok(())
    }

    /// The model shipped with the crate, trained on the synthetic corpus.
    pub fn bundled() -> Self {
        Self::from_json(BUNDLED_MODEL).expect("bundled model is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDocument =
            serde_json::from_str(text).map_err(|e| Error::Model(e.to_string()))?;
        if doc.feature_names != FEATURE_NAMES {
            return Err(Error::Model(format!(
                "feature_names must be {FEATURE_NAMES:?}, got {:?}",
                doc.feature_names
            )));
        }
        Self::new(
            fixed("weights", doc.weights)?,
            doc.bias,
            fixed("feature_means", doc.feature_means)?,
            fixed("feature_stds", doc.feature_stds)?,
            doc.c,
        )
    }

    fn document(&self) -> ModelDocument {
        ModelDocument {
            weights: self.weights.to_vec(),
            bias: self.bias,
            feature_means: self.feature_means.to_vec(),
            feature_stds: self.feature_stds.to_vec(),
            c: self.c,
            feature_names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.document()).expect("model serializes")
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn standardize(&self, features: &[f64; FEATURE_COUNT]) -> [f64; FEATURE_COUNT] {
        std::array::from_fn(|i| (features[i] - self.feature_means[i]) / self.feature_stds[i])
    }

    /// Linear score `w · standardize(f) + b`.
    pub fn decision(&self, f: &FeatureVector) -> f64 {
        let z = self.standardize(&f.to_array());
        self.weights
            .iter()
            .zip(z)
            .map(|(w, x)| w * x)
            .sum::<f64>()
            + self.bias
    }
}

impl Serialize for LogisticModel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.document().serialize(serializer)
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Probability that the column is categorical.
pub fn predict_categorical_prob(model: &LogisticModel, f: &FeatureVector) -> f64 {
    sigmoid(model.decision(f))
}

/// Posterior over all five types.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypePosterior5([f64; 5]);

impl TypePosterior5 {
    pub fn get(&self, t: DataType) -> f64 {
        self.0[t.index()]
    }

    pub fn as_array(&self) -> [f64; 5] {
        self.0
    }

    /// Most probable type; ties go to categorical, then date, float, integer.
    pub fn argmax(&self) -> DataType {
        DataType::ALL[argmax_first(&self.0)]
    }
}

impl Serialize for TypePosterior5 {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(5))?;
        for t in DataType::ALL {
            map.serialize_entry(t.as_str(), &self.get(t))?;
        }
        map.end()
    }
}

/// Moves a fraction `q` of the inferred type's mass to categorical when that
/// type is integer or string; date and float columns get zero categorical mass.
pub fn redistribute(posterior: &TypePosterior4, q: f64) -> TypePosterior5 {
    let p = posterior.as_array();
    let mut out = [0.0, p[0], p[1], p[2], p[3]];
    let top = posterior.argmax();
    if matches!(top, BaseType::Integer | BaseType::String) {
        let mass = posterior.get(top);
        let categorical = q * mass;
        out[0] = categorical;
        out[top.data_type().index()] = mass - categorical;
    }
    TypePosterior5(out)
}

/// Everything about a column that does not depend on the classifier.
#[derive(Debug, Clone)]
pub struct ColumnAnalysis {
    pub column: String,
    pub posterior4: TypePosterior4,
    /// Argmax of `posterior4`.
    pub base_type: BaseType,
    pub features: FeatureVector,
    /// Clean and excluded values under `base_type`.
    pub split: CategoricalValueReport,
}

impl ColumnAnalysis {
    pub fn new(column: &DataColumn, machines: &MachineSet, config: &InferenceConfig) -> Result<Self> {
        let evidence = ColumnEvidence::new(column, machines)?;
        let posterior4 = evidence.type_posterior(config);
        let base_type = posterior4.argmax();
        let rows = evidence.row_posteriors(base_type, config);
        let split = CategoricalValueReport::from_row_posteriors(rows);
        let clean = CleanEntries {
            values: split.values.iter().map(|v| v.value.clone()).collect(),
            clean_rows: split.values.iter().map(|v| v.count).sum(),
        };
        let features = extract_features(column, &posterior4, &clean);
        Ok(Self {
            column: column.name().to_string(),
            posterior4,
            base_type,
            features,
            split,
        })
    }

    /// Predicted type alone, without building the full inference record.
    pub fn predict(&self, model: &LogisticModel) -> DataType {
        let q = predict_categorical_prob(model, &self.features);
        redistribute(&self.posterior4, q).argmax()
    }

    pub fn classify(&self, model: &LogisticModel) -> ColumnInference {
        let q = predict_categorical_prob(model, &self.features);
        let posterior5 = redistribute(&self.posterior4, q);
        let predicted = posterior5.argmax();
        ColumnInference {
            column: self.column.clone(),
            posterior4: self.posterior4,
            posterior5,
            categorical_prob: q,
            predicted,
            base_type: self.base_type,
            features: self.features,
            split: self.split.clone(),
        }
    }
}

/// Full type inference result for one column.
#[derive(Debug, Clone)]
pub struct ColumnInference {
    pub column: String,
    pub posterior4: TypePosterior4,
    pub posterior5: TypePosterior5,
    pub categorical_prob: f64,
    pub predicted: DataType,
    /// Type inferred before the categorical split.
    pub base_type: BaseType,
    pub features: FeatureVector,
    /// Clean and excluded values under `base_type`.
    pub split: CategoricalValueReport,
}

impl ColumnInference {
    pub fn is_categorical(&self) -> bool {
        self.predicted == DataType::Categorical
    }

    /// Categorical values, present only when the column is predicted categorical.
    pub fn values(&self) -> Option<&CategoricalValueReport> {
        self.is_categorical().then_some(&self.split)
    }
}

/// Infers every column of a table in parallel; results keep column order.
pub fn infer_table(
    table: &DataTable,
    machines: &MachineSet,
    model: &LogisticModel,
    config: &InferenceConfig,
) -> Result<Vec<ColumnInference>> {
    table
        .columns()
        .par_iter()
        .map(|c| infer_column(c, machines, model, config))
        .collect()
}

/// Runs the whole pipeline on one column.
pub fn infer_column(
    column: &DataColumn,
    machines: &MachineSet,
    model: &LogisticModel,
    config: &InferenceConfig,
) -> Result<ColumnInference> {
    Ok(ColumnAnalysis::new(column, machines, config)?.classify(model))
}
