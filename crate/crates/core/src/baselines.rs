//! Behavioural reimplementations of three threshold-based converters used as
//! comparison points: Bot, OpenML's csv2arff, and Weka's CSV loader.
//!
//! None of them models missing data the way the probabilistic pipeline does.
//! The upstream dataframe parsing they build on is emulated by
//! [`naive_parse_type`], which coerces sentinel strings to NaN, so an
//! integer column with a single `NULL` becomes a float column.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::TypePosterior4;
use crate::ingest::DataColumn;
use crate::machines::MissingVocabulary;
use crate::types::{BaseType, DataType};

/// Column type as seen by a dataframe parser.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NaiveType {
    Integer,
    Float,
    /// Plain dates without time or textual month.
    Date,
    String,
}

fn is_integer_literal(s: &str) -> bool {
    let s = s.trim();
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

fn is_number_literal(s: &str) -> bool {
    s.trim().parse::<f64>().is_ok()
}

fn digits_in(s: &str, lo: u32, hi: u32, widths: &[usize]) -> bool {
    widths.contains(&s.len())
        && s.bytes().all(|b| b.is_ascii_digit())
        && s.parse::<u32>().is_ok_and(|v| (lo..=hi).contains(&v))
}

fn is_iso_date(s: &str) -> bool {
    let parts: Vec<&str> = s.split('-').collect();
    parts.len() == 3
        && digits_in(parts[0], 0, 9999, &[4])
        && digits_in(parts[1], 1, 12, &[2])
        && digits_in(parts[2], 1, 31, &[2])
}

fn is_slash_date(s: &str) -> bool {
    let parts: Vec<&str> = s.split('/').collect();
    if parts.len() != 3 || !digits_in(parts[2], 0, 9999, &[4]) {
        return false;
    }
    let (a, b) = (parts[0], parts[1]);
    (digits_in(a, 1, 31, &[1, 2]) && digits_in(b, 1, 12, &[1, 2]))
        || (digits_in(a, 1, 12, &[1, 2]) && digits_in(b, 1, 31, &[1, 2]))
}

/// `yyyy-MM-ddTHH:mm:ss` exactly.
pub fn is_iso_datetime(s: &str) -> bool {
    let Some((date, time)) = s.split_once('T') else {
        return false;
    };
    let t: Vec<&str> = time.split(':').collect();
    is_iso_date(date)
        && t.len() == 3
        && digits_in(t[0], 0, 23, &[2])
        && digits_in(t[1], 0, 59, &[2])
        && digits_in(t[2], 0, 59, &[2])
}

/// Emulates how a dataframe reader types a column of strings.
pub fn naive_parse_type(column: &DataColumn, vocabulary: &MissingVocabulary) -> NaiveType {
    let values: Vec<&str> = column.tallies().keys().map(String::as_str).collect();
    if !values.is_empty() && values.iter().all(|v| is_integer_literal(v)) {
        return NaiveType::Integer;
    }
    let present: Vec<&str> = values
        .iter()
        .copied()
        .filter(|v| !vocabulary.contains(v))
        .collect();
    if present.iter().all(|v| is_number_literal(v)) {
        return NaiveType::Float;
    }
    if present.iter().all(|v| is_iso_date(v) || is_slash_date(v)) {
        return NaiveType::Date;
    }
    NaiveType::String
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BotParams {
    pub int_threshold: usize,
    pub str_threshold: usize,
    pub value_min_count: usize,
}

impl BotParams {
    pub fn new(int_threshold: usize, str_threshold: usize, value_min_count: usize) -> Result<Self> {
        if int_threshold < 10 || str_threshold < 25 || value_min_count < 1 {
            return Err(Error::Config(format!(
                "bot thresholds out of range: T_int={int_threshold} (>=10), \
                 T_str={str_threshold} (>=25), min count={value_min_count} (>=1)"
            )));
        }
        Ok(Self {
            int_threshold,
            str_threshold,
            value_min_count,
        })
    }
}

impl Default for BotParams {
    fn default() -> Self {
        Self {
            int_threshold: 10,
            str_threshold: 25,
            value_min_count: 5,
        }
    }
}

/// Condition (ii) of Bot's integer rule: the mean absolute gap between
/// consecutive sorted unique values is below the mean of those values.
fn small_gaps(column: &DataColumn) -> bool {
    let mut ints: Vec<f64> = column
        .tallies()
        .keys()
        .filter_map(|v| v.trim().parse::<f64>().ok())
        .collect();
    ints.sort_by(f64::total_cmp);
    ints.dedup();
    if ints.len() < 2 {
        return false;
    }
    let gap = ints.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>() / (ints.len() - 1) as f64;
    let mean = ints.iter().sum::<f64>() / ints.len() as f64;
    gap < mean
}

/// What Bot looks at in a column, computed once so that many threshold
/// settings can be scored cheaply.
#[derive(Debug, Clone)]
pub struct BotSummary {
    naive: NaiveType,
    unique: usize,
    small_gaps: bool,
    by_count: Vec<(String, usize)>,
}

impl BotSummary {
    pub fn new(column: &DataColumn, vocabulary: &MissingVocabulary) -> Self {
        let unique = column
            .tallies()
            .keys()
            .filter(|v| !vocabulary.contains(v))
            .count();
        let mut by_count: Vec<(String, usize)> =
            column.tallies().iter().map(|(v, &c)| (v.clone(), c)).collect();
        by_count.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Self {
            naive: naive_parse_type(column, vocabulary),
            unique,
            small_gaps: small_gaps(column),
            by_count,
        }
    }

    pub fn infer(&self, params: &BotParams) -> DataType {
        let unique = self.unique;
        match self.naive {
            NaiveType::Integer => {
                if unique < 11 || (unique <= params.int_threshold && self.small_gaps) {
                    DataType::Categorical
                } else {
                    DataType::Integer
                }
            }
            NaiveType::String if unique < params.str_threshold => DataType::Categorical,
            NaiveType::String => DataType::String,
            NaiveType::Float => DataType::Float,
            NaiveType::Date => DataType::Date,
        }
    }

    /// Values seen at least `value_min_count` times, most frequent first.
    pub fn values(&self, params: &BotParams) -> impl Iterator<Item = &str> + '_ {
        let min = params.value_min_count;
        self.by_count
            .iter()
            .take_while(move |(_, c)| *c >= min)
            .map(|(v, _)| v.as_str())
    }
}

pub fn bot_infer(column: &DataColumn, params: &BotParams, vocabulary: &MissingVocabulary) -> DataType {
    BotSummary::new(column, vocabulary).infer(params)
}

fn sorted_by_count<'a>(column: &'a DataColumn, keep: impl Fn(&str, usize) -> bool) -> Vec<String> {
    let mut values: Vec<(&'a String, usize)> = column
        .tallies()
        .iter()
        .filter(|(v, &c)| keep(v, c))
        .map(|(v, &c)| (v, c))
        .collect();
    values.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    values.into_iter().map(|(v, _)| v.clone()).collect()
}

/// Values seen at least `value_min_count` times, sentinels included.
pub fn bot_values(column: &DataColumn, params: &BotParams) -> Vec<String> {
    sorted_by_count(column, |_, c| c >= params.value_min_count)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenMlParams {
    pub unique_threshold: usize,
}

impl OpenMlParams {
    pub fn new(unique_threshold: usize) -> Result<Self> {
        if unique_threshold < 1 {
            return Err(Error::Config("OpenML unique threshold must be >= 1".into()));
        }
        Ok(Self { unique_threshold })
    }
}

impl Default for OpenMlParams {
    fn default() -> Self {
        Self {
            unique_threshold: 10,
        }
    }
}

/// Integer or float, whichever the four-type posterior prefers.
pub fn numeric_disambiguation(posterior: &TypePosterior4) -> DataType {
    if posterior.get(BaseType::Integer) > posterior.get(BaseType::Float) {
        DataType::Integer
    } else {
        DataType::Float
    }
}

fn all_present_numeric(column: &DataColumn, vocabulary: &MissingVocabulary) -> bool {
    let mut present = column
        .tallies()
        .keys()
        .filter(|v| !vocabulary.contains(v))
        .peekable();
    present.peek().is_some() && present.all(|v| is_number_literal(v))
}

/// Nominal up to `unique_threshold` unique values, then numeric or string.
/// There is no date type.
pub fn openml_infer(
    column: &DataColumn,
    params: &OpenMlParams,
    vocabulary: &MissingVocabulary,
    posterior: &TypePosterior4,
) -> DataType {
    if column.unique_count() <= params.unique_threshold {
        DataType::Categorical
    } else if all_present_numeric(column, vocabulary) {
        numeric_disambiguation(posterior)
    } else {
        DataType::String
    }
}

/// What OpenML's converter looks at in a column.
#[derive(Debug, Clone)]
pub struct OpenMlSummary {
    unique: usize,
    numeric: Option<DataType>,
    values: Vec<String>,
}

impl OpenMlSummary {
    pub fn new(column: &DataColumn, vocabulary: &MissingVocabulary, posterior: &TypePosterior4) -> Self {
        Self {
            unique: column.unique_count(),
            numeric: all_present_numeric(column, vocabulary).then(|| numeric_disambiguation(posterior)),
            values: openml_values(column, vocabulary),
        }
    }

    pub fn infer(&self, params: &OpenMlParams) -> DataType {
        if self.unique <= params.unique_threshold {
            DataType::Categorical
        } else {
            self.numeric.unwrap_or(DataType::String)
        }
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }
}

/// Every unique value except sentinels.
pub fn openml_values(column: &DataColumn, vocabulary: &MissingVocabulary) -> Vec<String> {
    sorted_by_count(column, |v, _| !vocabulary.contains(v))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WekaPrediction {
    pub predicted: DataType,
    /// Nominal levels; empty for numeric and date attributes.
    pub values: Vec<String>,
}

/// Numeric when every cell is a number, date when every cell is a full ISO
/// date-time, nominal otherwise. Never string.
pub fn weka_infer(column: &DataColumn, posterior: &TypePosterior4) -> WekaPrediction {
    let values = column.tallies().keys();
    if values.clone().all(|v| is_number_literal(v)) {
        return WekaPrediction {
            predicted: numeric_disambiguation(posterior),
            values: Vec::new(),
        };
    }
    if values.clone().all(|v| is_iso_datetime(v)) {
        return WekaPrediction {
            predicted: DataType::Date,
            values: Vec::new(),
        };
    }
    WekaPrediction {
        predicted: DataType::Categorical,
        values: sorted_by_count(column, |_, _| true),
    }
}

pub fn unique_values(column: &DataColumn) -> BTreeSet<String> {
    column.tallies().keys().cloned().collect()
}
