use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_MISSING_VALUES: [&str; 17] = [
    "", "NULL", "null", "Null", "NA", "N/A", "n/a", "NaN", "nan", "NAN", "-", "?", "#N/A", "None",
    "none", "missing", " ",
];

/// Strings conventionally used to encode an absent value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct MissingVocabulary {
    entries: BTreeSet<String>,
}

impl MissingVocabulary {
    pub fn new<I, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let entries: BTreeSet<String> = entries.into_iter().map(Into::into).collect();
        if !entries.contains("") {
            return Err(Error::Config(
                "missing vocabulary must contain the empty string".into(),
            ));
        }
        Ok(Self { entries })
    }

    pub fn contains(&self, value: &str) -> bool {
        self.entries.contains(value)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(String::as_str)
    }
}

impl Default for MissingVocabulary {
    fn default() -> Self {
        Self::new(DEFAULT_MISSING_VALUES).expect("default vocabulary contains \"\"")
    }
}

impl TryFrom<Vec<String>> for MissingVocabulary {
    type Error = Error;

    fn try_from(v: Vec<String>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<MissingVocabulary> for Vec<String> {
    fn from(v: MissingVocabulary) -> Self {
        v.entries.into_iter().collect()
    }
}

/// Every numeric parameter of the builtin machines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MachineParams {
    /// Probability of emitting another character in the string machine.
    pub string_continue: f64,
    /// Probability of emitting another character in the anomaly machine.
    pub anomaly_continue: f64,
    /// Probability of each optional padding space around numbers.
    pub numeric_space: f64,
    /// Probability of an explicit sign on numbers.
    pub sign: f64,
    /// Probability of another digit after the first in the integer machine.
    pub integer_continue: f64,
    /// Float: probability that the mantissa starts with a leading `.`.
    pub float_leading_dot: f64,
    /// Float, after an integer digit: probability of another digit.
    pub float_int_digit: f64,
    /// Float, after an integer digit: probability of a decimal point.
    pub float_point: f64,
    /// Float, after the decimal point: probability of another digit.
    pub float_frac_digit: f64,
    /// Float: probability of an exponent part.
    pub float_exponent: f64,
    /// Float: probability of an explicit exponent sign.
    pub float_exponent_sign: f64,
    /// Float: probability of another exponent digit.
    pub float_exponent_continue: f64,
    pub missing_values: MissingVocabulary,
}

impl Default for MachineParams {
    fn default() -> Self {
        Self {
            string_continue: 0.995,
            anomaly_continue: 0.95,
            numeric_space: 0.05,
            sign: 0.1,
            integer_continue: 0.5,
            float_leading_dot: 0.1,
            float_int_digit: 0.5,
            float_point: 0.4,
            float_frac_digit: 0.6,
            float_exponent: 0.05,
            float_exponent_sign: 0.5,
            float_exponent_continue: 0.5,
            missing_values: MissingVocabulary::default(),
        }
    }
}

impl MachineParams {
    pub fn validate(&self) -> Result<()> {
        let unit = [
            ("string_continue", self.string_continue),
            ("anomaly_continue", self.anomaly_continue),
            ("numeric_space", self.numeric_space),
            ("sign", self.sign),
            ("integer_continue", self.integer_continue),
            ("float_leading_dot", self.float_leading_dot),
            ("float_int_digit", self.float_int_digit),
            ("float_point", self.float_point),
            ("float_frac_digit", self.float_frac_digit),
            ("float_exponent", self.float_exponent),
            ("float_exponent_sign", self.float_exponent_sign),
            ("float_exponent_continue", self.float_exponent_continue),
        ];
        for (name, p) in unit {
            if !(0.0..1.0).contains(&p) {
                return Err(Error::Config(format!("{name} must lie in [0, 1), got {p}")));
            }
        }
        if self.float_int_digit + self.float_point >= 1.0 {
            return Err(Error::Config(
                "float_int_digit + float_point must leave room to stop".into(),
            ));
        }
        Ok(())
    }
}
