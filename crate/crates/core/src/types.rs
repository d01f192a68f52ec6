//! Type labels shared across the crate.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The five column types a prediction can carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataType {
    Categorical,
    Date,
    Float,
    Integer,
    String,
}

impl DataType {
    /// All types in tie-break order (earlier wins).
    pub const ALL: [DataType; 5] = [
        DataType::Categorical,
        DataType::Date,
        DataType::Float,
        DataType::Integer,
        DataType::String,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DataType::Categorical => "categorical",
            DataType::Date => "date",
            DataType::Float => "float",
            DataType::Integer => "integer",
            DataType::String => "string",
        }
    }

    pub fn base(self) -> Option<BaseType> {
        match self {
            DataType::Categorical => None,
            DataType::Date => Some(BaseType::Date),
            DataType::Float => Some(BaseType::Float),
            DataType::Integer => Some(BaseType::Integer),
            DataType::String => Some(BaseType::String),
        }
    }
}

impl fmt::Display for DataType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DataType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DataType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown data type `{s}`"))
    }
}

/// Column types modelled by a type machine (everything except categorical).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseType {
    Date,
    Float,
    Integer,
    String,
}

impl BaseType {
    /// All base types in tie-break order (earlier wins).
    pub const ALL: [BaseType; 4] = [
        BaseType::Date,
        BaseType::Float,
        BaseType::Integer,
        BaseType::String,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn data_type(self) -> DataType {
        match self {
            BaseType::Date => DataType::Date,
            BaseType::Float => DataType::Float,
            BaseType::Integer => DataType::Integer,
            BaseType::String => DataType::String,
        }
    }

    pub fn as_str(self) -> &'static str {
        self.data_type().as_str()
    }
}

impl fmt::Display for BaseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What generated a single entry, given the column type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    Clean,
    Missing,
    Anomaly,
}

impl RowKind {
    pub const ALL: [RowKind; 3] = [RowKind::Clean, RowKind::Missing, RowKind::Anomaly];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RowKind::Clean => "clean",
            RowKind::Missing => "missing",
            RowKind::Anomaly => "anomaly",
        }
    }
}

impl fmt::Display for RowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Index of the largest entry; earlier entries win exact ties.
pub(crate) fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}
