//! Scoring type inference and value identification against annotations.
//!
//! Methods with hyperparameters are tuned and scored by nested
//! cross-validation over datasets: each column is predicted by the model of
//! the outer fold that held its dataset out, and the predictions of all
//! folds are pooled before computing metrics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{
    unique_values, weka_infer, BotParams, BotSummary, OpenMlParams, OpenMlSummary, WekaPrediction,
};
use crate::categorical::LogisticModel;
use crate::corpus::PreparedCorpus;
use crate::cv::{nested_cv, CvReport, Trainee};
use crate::error::{Error, Result};
use crate::metrics::{
    jaccard_per_type, jaccard_sets, overall_accuracy, pr_curve, ConfusionMatrix, PrCurve,
};
use crate::stats::{mcnemar, paired_t_test, McNemar, PairedTTest};
use crate::train::train_logistic;
use crate::types::DataType;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "ptype-cat")]
    PtypeCat,
    #[serde(rename = "bot")]
    Bot,
    #[serde(rename = "openml")]
    OpenMl,
    #[serde(rename = "weka")]
    Weka,
    /// Value identification only: every unique entry is a value.
    #[serde(rename = "unique")]
    Unique,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::PtypeCat,
        Method::Bot,
        Method::OpenMl,
        Method::Weka,
        Method::Unique,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::PtypeCat => "ptype-cat",
            Method::Bot => "bot",
            Method::OpenMl => "openml",
            Method::Weka => "weka",
            Method::Unique => "unique",
        }
    }

    pub fn infers_types(self) -> bool {
        self != Method::Unique
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown method {s:?}")))
    }
}

/// Parses a comma-separated method list, dropping duplicates.
pub fn parse_methods(list: &str) -> Result<Vec<Method>> {
    let mut out: Vec<Method> = Vec::new();
    for part in list.split(',').filter(|p| !p.trim().is_empty()) {
        let m: Method = part.parse()?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(Error::Config("no methods given".into()));
    }
    Ok(out)
}

/// Inverse regularization strengths searched for the classifier.
pub const C_GRID: [f64; 9] = [1e-4, 1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3, 1e4];

pub fn bot_grid() -> Vec<BotParams> {
    let mut grid = Vec::new();
    for int_threshold in (10..=120).step_by(10) {
        for str_threshold in (25..=125).step_by(10) {
            for value_min_count in [5, 10, 20, 30, 40, 50, 60, 70, 80] {
                grid.push(BotParams {
                    int_threshold,
                    str_threshold,
                    value_min_count,
                });
            }
        }
    }
    grid
}

pub fn openml_grid() -> Vec<OpenMlParams> {
    (10..=120)
        .step_by(10)
        .map(|unique_threshold| OpenMlParams { unique_threshold })
        .collect()
}

/// One method's output for one column.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnPrediction {
    pub predicted: Option<DataType>,
    /// Per-type scores in [`DataType::ALL`] order.
    pub scores: Option<[f64; 5]>,
    pub values: BTreeSet<String>,
}

fn one_hot(t: DataType) -> [f64; 5] {
    let mut s = [0.0; 5];
    s[t.index()] = 1.0;
    s
}

/// Per-column summaries the baselines need, computed once per corpus.
pub struct EvaluationContext<'a> {
    pub corpus: &'a PreparedCorpus,
    bot: Vec<BotSummary>,
    openml: Vec<OpenMlSummary>,
    weka: Vec<WekaPrediction>,
}

impl<'a> EvaluationContext<'a> {
    pub fn new(corpus: &'a PreparedCorpus) -> Self {
        let vocabulary = corpus.machines.vocabulary();
        let bot = corpus
            .columns
            .par_iter()
            .map(|c| BotSummary::new(&c.data, vocabulary))
            .collect();
        let openml = corpus
            .columns
            .par_iter()
            .map(|c| OpenMlSummary::new(&c.data, vocabulary, &c.analysis.posterior4))
            .collect();
        let weka = corpus
            .columns
            .par_iter()
            .map(|c| weka_infer(&c.data, &c.analysis.posterior4))
            .collect();
        Self {
            corpus,
            bot,
            openml,
            weka,
        }
    }

    pub fn ptype_cat(&self, column: usize, model: &LogisticModel) -> ColumnPrediction {
        let inference = self.corpus.columns[column].analysis.classify(model);
        ColumnPrediction {
            predicted: Some(inference.predicted),
            scores: Some(inference.posterior5.as_array()),
            values: inference.split.values.iter().map(|v| v.value.clone()).collect(),
        }
    }

    pub fn bot(&self, column: usize, params: &BotParams) -> ColumnPrediction {
        let summary = &self.bot[column];
        let predicted = summary.infer(params);
        let values = if predicted == DataType::Categorical {
            summary.values(params).map(str::to_string).collect()
        } else {
            BTreeSet::new()
        };
        ColumnPrediction {
            predicted: Some(predicted),
            scores: Some(one_hot(predicted)),
            values,
        }
    }

    pub fn openml(&self, column: usize, params: &OpenMlParams) -> ColumnPrediction {
        let summary = &self.openml[column];
        let predicted = summary.infer(params);
        let values = if predicted == DataType::Categorical {
            summary.values().iter().cloned().collect()
        } else {
            BTreeSet::new()
        };
        ColumnPrediction {
            predicted: Some(predicted),
            scores: Some(one_hot(predicted)),
            values,
        }
    }

    pub fn weka(&self, column: usize) -> ColumnPrediction {
        let w = &self.weka[column];
        ColumnPrediction {
            predicted: Some(w.predicted),
            scores: Some(one_hot(w.predicted)),
            values: w.values.iter().cloned().collect(),
        }
    }

    pub fn unique(&self, column: usize) -> ColumnPrediction {
        ColumnPrediction {
            predicted: None,
            scores: None,
            values: unique_values(&self.corpus.columns[column].data),
        }
    }

    fn type_error(&self, columns: &[usize], predict: impl Fn(usize) -> DataType) -> f64 {
        if columns.is_empty() {
            return 0.0;
        }
        let wrong = columns
            .iter()
            .filter(|&&c| predict(c) != self.corpus.columns[c].truth)
            .count();
        wrong as f64 / columns.len() as f64
    }

    /// One minus the mean value Jaccard over the annotated-categorical columns.
    /// `jaccard` receives the column and its annotated values.
    fn value_error(&self, columns: &[usize], jaccard: impl Fn(usize, &BTreeSet<String>) -> f64) -> f64 {
        let scored: Vec<f64> = columns
            .iter()
            .filter_map(|&c| {
                let truth = self.corpus.columns[c].truth_values.as_ref()?;
                Some(jaccard(c, truth))
            })
            .collect();
        if scored.is_empty() {
            0.0
        } else {
            1.0 - scored.iter().sum::<f64>() / scored.len() as f64
        }
    }
}

pub struct PtypeCatTrainee<'a, 'c>(pub &'a EvaluationContext<'c>);

impl Trainee for PtypeCatTrainee<'_, '_> {
    type Param = f64;
    type Model = LogisticModel;

    fn train(&self, c: &f64, datasets: &[usize]) -> Result<LogisticModel> {
        let corpus = self.0.corpus;
        let columns = corpus.columns_of(datasets);
        let features: Vec<_> = columns.iter().map(|&i| corpus.columns[i].analysis.features).collect();
        let labels: Vec<bool> = columns
            .iter()
            .map(|&i| corpus.columns[i].truth == DataType::Categorical)
            .collect();
        train_logistic(&features, &labels, *c)
    }

    fn error(&self, model: &LogisticModel, datasets: &[usize]) -> f64 {
        let columns = self.0.corpus.columns_of(datasets);
        self.0
            .type_error(&columns, |c| self.0.corpus.columns[c].analysis.predict(model))
    }
}

/// Tuned on type error, with value error separating equal type errors.
pub struct BotTrainee<'a, 'c>(pub &'a EvaluationContext<'c>);

impl Trainee for BotTrainee<'_, '_> {
    type Param = BotParams;
    type Model = BotParams;

    fn train(&self, p: &BotParams, _: &[usize]) -> Result<BotParams> {
        Ok(*p)
    }

    fn error(&self, p: &BotParams, datasets: &[usize]) -> f64 {
        let columns = self.0.corpus.columns_of(datasets);
        self.0.type_error(&columns, |c| self.0.bot[c].infer(p))
    }

    fn tiebreak_error(&self, p: &BotParams, datasets: &[usize]) -> f64 {
        let columns = self.0.corpus.columns_of(datasets);
        self.0.value_error(&columns, |c, truth| {
            if self.0.bot[c].infer(p) != DataType::Categorical {
                return jaccard_sets(&BTreeSet::new(), truth);
            }
            let (mut predicted, mut shared) = (0, 0);
            for v in self.0.bot[c].values(p) {
                predicted += 1;
                shared += usize::from(truth.contains(v));
            }
            let union = predicted + truth.len() - shared;
            if union == 0 {
                1.0
            } else {
                shared as f64 / union as f64
            }
        })
    }
}

pub struct OpenMlTrainee<'a, 'c>(pub &'a EvaluationContext<'c>);

impl Trainee for OpenMlTrainee<'_, '_> {
    type Param = OpenMlParams;
    type Model = OpenMlParams;

    fn train(&self, p: &OpenMlParams, _: &[usize]) -> Result<OpenMlParams> {
        Ok(*p)
    }

    fn error(&self, p: &OpenMlParams, datasets: &[usize]) -> f64 {
        let columns = self.0.corpus.columns_of(datasets);
        self.0.type_error(&columns, |c| self.0.openml[c].infer(p))
    }

    fn tiebreak_error(&self, p: &OpenMlParams, datasets: &[usize]) -> f64 {
        let columns = self.0.corpus.columns_of(datasets);
        self.0
            .value_error(&columns, |c, truth| jaccard_sets(&self.0.openml(c, p).values, truth))
    }
}

/// Asserts the dataset-level split: every column of a file sits in exactly
/// one outer test fold.
pub fn check_dataset_split<P, M>(corpus: &PreparedCorpus, report: &CvReport<P, M>) -> Result<()> {
    let mut fold_of: BTreeMap<&str, usize> = BTreeMap::new();
    for (f, fold) in report.folds.iter().enumerate() {
        for c in corpus.columns_of(&fold.test_datasets) {
            let file = corpus.columns[c].file.as_str();
            if fold_of.insert(file, f).is_some_and(|prev| prev != f) {
                return Err(Error::Config(format!("{file} spans folds")));
            }
        }
    }
    if fold_of.len() != corpus.dataset_count() {
        return Err(Error::Config("outer test folds do not cover every dataset".into()));
    }
    Ok(())
}

/// Runs nested cross-validation for the classifier and retrains on the whole
/// corpus with the most frequently selected `C`.
pub fn train_ptype_cat(
    corpus: &PreparedCorpus,
    k: usize,
    seed: u64,
) -> Result<(LogisticModel, CvReport<f64, LogisticModel>)> {
    let ctx = EvaluationContext::new(corpus);
    let trainee = PtypeCatTrainee(&ctx);
    let report = nested_cv(&trainee, corpus.dataset_count(), &C_GRID, k, seed)?;
    check_dataset_split(corpus, &report)?;
    let all: Vec<usize> = (0..corpus.dataset_count()).collect();
    let model = trainee.train(&C_GRID[report.modal_selection()], &all)?;
    Ok((model, report))
}

#[derive(Debug, Clone, Serialize)]
pub struct ColumnRef {
    pub file: String,
    pub index: usize,
    pub name: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TypeMetrics {
    pub accuracy: f64,
    pub jaccard: BTreeMap<DataType, f64>,
    pub confusion: ConfusionMatrix,
    /// Pooled over every (column, type) pair.
    pub pr_micro: PrCurve,
    pub pr_per_type: BTreeMap<DataType, PrCurve>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValueMetrics {
    /// Number of annotated-categorical columns scored.
    pub columns: usize,
    /// Fraction of columns whose predicted value set equals the annotation.
    pub accuracy: f64,
    pub mean_jaccard: f64,
    /// Per-column Jaccard in report column order.
    pub jaccards: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodReport {
    pub method: Method,
    pub types: Option<TypeMetrics>,
    pub values: Option<ValueMetrics>,
}

#[derive(Debug, Clone, Serialize)]
pub struct McNemarComparison {
    pub method: Method,
    pub reference: Method,
    /// Columns only `method` gets wrong.
    pub n01: usize,
    /// Columns only `reference` gets wrong.
    pub n10: usize,
    pub result: Option<McNemar>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TTestComparison {
    pub method: Method,
    pub reference: Method,
    pub columns: usize,
    pub result: Option<PairedTTest>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Statistics {
    pub mcnemar: Vec<McNemarComparison>,
    pub paired_t: Vec<TTestComparison>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FoldSummary {
    pub test_files: Vec<String>,
    pub selected: serde_json::Value,
    pub test_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodCv {
    pub method: Method,
    pub k: usize,
    pub seed: u64,
    pub folds: Vec<FoldSummary>,
    pub mean_test_error: f64,
}

impl MethodCv {
    fn new<P: Serialize, M>(method: Method, corpus: &PreparedCorpus, report: &CvReport<P, M>) -> Self {
        Self {
            method,
            k: report.k,
            seed: report.seed,
            folds: report
                .folds
                .iter()
                .map(|f| FoldSummary {
                    test_files: f.test_datasets.iter().map(|&d| corpus.files[d].clone()).collect(),
                    selected: serde_json::to_value(&f.selected).unwrap_or(serde_json::Value::Null),
                    test_error: f.test_error,
                })
                .collect(),
            mean_test_error: report.mean_test_error,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EvaluationReport {
    /// Canonical column order: data file name, then column index.
    pub column_order: Vec<ColumnRef>,
    pub methods: Vec<MethodReport>,
    pub statistics: Statistics,
    pub cross_validation: Vec<MethodCv>,
}

impl EvaluationReport {
    pub fn method(&self, m: Method) -> Option<&MethodReport> {
        self.methods.iter().find(|r| r.method == m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn type_metrics(corpus: &PreparedCorpus, preds: &[ColumnPrediction]) -> Option<TypeMetrics> {
    let predicted: Vec<DataType> = preds.iter().map(|p| p.predicted).collect::<Option<_>>()?;
    let truth: Vec<DataType> = corpus.columns.iter().map(|c| c.truth).collect();
    let scores: Vec<[f64; 5]> = preds.iter().map(|p| p.scores).collect::<Option<_>>()?;
    let pairs = |t: DataType| -> Vec<(f64, bool)> {
        scores.iter().zip(&truth).map(|(s, &y)| (s[t.index()], y == t)).collect()
    };
    let pooled: Vec<(f64, bool)> = DataType::ALL.into_iter().flat_map(pairs).collect();
    Some(TypeMetrics {
        accuracy: overall_accuracy(&predicted, &truth),
        jaccard: DataType::ALL
            .into_iter()
            .map(|t| (t, jaccard_per_type(&predicted, &truth, t)))
            .collect(),
        confusion: ConfusionMatrix::new(&predicted, &truth),
        pr_micro: pr_curve(&pooled),
        pr_per_type: DataType::ALL.into_iter().map(|t| (t, pr_curve(&pairs(t)))).collect(),
    })
}

fn value_metrics(corpus: &PreparedCorpus, preds: &[ColumnPrediction]) -> Option<ValueMetrics> {
    let jaccards: Vec<(f64, bool)> = corpus
        .columns
        .iter()
        .zip(preds)
        .filter_map(|(c, p)| {
            let truth = c.truth_values.as_ref()?;
            Some((jaccard_sets(&p.values, truth), &p.values == truth))
        })
        .collect();
    if jaccards.is_empty() {
        return None;
    }
    let n = jaccards.len() as f64;
    Some(ValueMetrics {
        columns: jaccards.len(),
        accuracy: jaccards.iter().filter(|j| j.1).count() as f64 / n,
        mean_jaccard: jaccards.iter().map(|j| j.0).sum::<f64>() / n,
        jaccards: jaccards.into_iter().map(|j| j.0).collect(),
    })
}

fn statistics(
    corpus: &PreparedCorpus,
    predictions: &[(Method, Vec<ColumnPrediction>)],
    reports: &[MethodReport],
) -> Statistics {
    let mut stats = Statistics::default();
    let reference = Method::PtypeCat;
    let Some((_, ref_preds)) = predictions.iter().find(|(m, _)| *m == reference) else {
        return stats;
    };
    let ref_values = reports.iter().find(|r| r.method == reference).and_then(|r| r.values.as_ref());
    for ((method, preds), report) in predictions.iter().zip(reports) {
        if *method == reference {
            continue;
        }
        if method.infers_types() {
            let (mut n01, mut n10) = (0, 0);
            for ((p, r), c) in preds.iter().zip(ref_preds).zip(&corpus.columns) {
                let ok = p.predicted == Some(c.truth);
                let ref_ok = r.predicted == Some(c.truth);
                n01 += usize::from(!ok && ref_ok);
                n10 += usize::from(ok && !ref_ok);
            }
            let outcome = mcnemar(n01, n10, true);
            stats.mcnemar.push(McNemarComparison {
                method: *method,
                reference,
                n01,
                n10,
                error: outcome.as_ref().err().map(ToString::to_string),
                result: outcome.ok(),
            });
        }
        if let (Some(v), Some(rv)) = (&report.values, ref_values) {
            let outcome = paired_t_test(&v.jaccards, &rv.jaccards);
            stats.paired_t.push(TTestComparison {
                method: *method,
                reference,
                columns: v.columns,
                error: outcome.as_ref().err().map(ToString::to_string),
                result: outcome.ok(),
            });
        }
    }
    stats
}

fn build_report(
    corpus: &PreparedCorpus,
    predictions: Vec<(Method, Vec<ColumnPrediction>)>,
    cross_validation: Vec<MethodCv>,
) -> EvaluationReport {
    let methods: Vec<MethodReport> = predictions
        .iter()
        .map(|(m, preds)| MethodReport {
            method: *m,
            types: type_metrics(corpus, preds),
            values: value_metrics(corpus, preds),
        })
        .collect();
    let statistics = statistics(corpus, &predictions, &methods);
    EvaluationReport {
        column_order: corpus
            .columns
            .iter()
            .map(|c| ColumnRef {
                file: c.file.clone(),
                index: c.index,
                name: c.data.name().to_string(),
            })
            .collect(),
        methods,
        statistics,
        cross_validation,
    }
}

/// Predictions of every column from the model of the outer fold holding it out.
fn fold_predictions<P, M>(
    corpus: &PreparedCorpus,
    report: &CvReport<P, M>,
    predict: impl Fn(usize, &M) -> ColumnPrediction,
) -> Vec<ColumnPrediction> {
    let mut out: Vec<Option<ColumnPrediction>> = vec![None; corpus.columns.len()];
    for fold in &report.folds {
        for c in corpus.columns_of(&fold.test_datasets) {
            out[c] = Some(predict(c, &fold.model));
        }
    }
    out.into_iter()
        .map(|p| p.expect("outer folds cover every column"))
        .collect()
}

/// Tunes and scores each method by `k`-fold nested cross-validation.
pub fn cross_evaluate(
    corpus: &PreparedCorpus,
    methods: &[Method],
    k: usize,
    seed: u64,
) -> Result<EvaluationReport> {
    let ctx = EvaluationContext::new(corpus);
    let n = corpus.dataset_count();
    let all_columns = 0..corpus.columns.len();
    let mut predictions = Vec::new();
    let mut cv = Vec::new();
    for &method in methods {
        let preds = match method {
            Method::PtypeCat => {
                let r = nested_cv(&PtypeCatTrainee(&ctx), n, &C_GRID, k, seed)?;
                check_dataset_split(corpus, &r)?;
                cv.push(MethodCv::new(method, corpus, &r));
                fold_predictions(corpus, &r, |c, m| ctx.ptype_cat(c, m))
            }
            Method::Bot => {
                let r = nested_cv(&BotTrainee(&ctx), n, &bot_grid(), k, seed)?;
                check_dataset_split(corpus, &r)?;
                cv.push(MethodCv::new(method, corpus, &r));
                fold_predictions(corpus, &r, |c, m| ctx.bot(c, m))
            }
            Method::OpenMl => {
                let r = nested_cv(&OpenMlTrainee(&ctx), n, &openml_grid(), k, seed)?;
                check_dataset_split(corpus, &r)?;
                cv.push(MethodCv::new(method, corpus, &r));
                fold_predictions(corpus, &r, |c, m| ctx.openml(c, m))
            }
            Method::Weka => all_columns.clone().map(|c| ctx.weka(c)).collect(),
            Method::Unique => all_columns.clone().map(|c| ctx.unique(c)).collect(),
        };
        predictions.push((method, preds));
    }
    Ok(build_report(corpus, predictions, cv))
}

/// Scores each method with fixed settings on the whole corpus.
pub fn evaluate_fixed(
    corpus: &PreparedCorpus,
    methods: &[Method],
    model: &LogisticModel,
    bot: &BotParams,
    openml: &OpenMlParams,
) -> EvaluationReport {
    let ctx = EvaluationContext::new(corpus);
    let predictions = methods
        .iter()
        .map(|&method| {
            let preds = (0..corpus.columns.len())
                .into_par_iter()
                .map(|c| match method {
                    Method::PtypeCat => ctx.ptype_cat(c, model),
                    Method::Bot => ctx.bot(c, bot),
                    Method::OpenMl => ctx.openml(c, openml),
                    Method::Weka => ctx.weka(c),
                    Method::Unique => ctx.unique(c),
                })
                .collect();
            (method, preds)
        })
        .collect();
    build_report(corpus, predictions, Vec::new())
}
