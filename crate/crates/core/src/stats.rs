//! Significance tests for comparing two methods on the same columns.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};

/// 95th percentile of χ² with one degree of freedom.
pub const MCNEMAR_CRITICAL: f64 = 3.84;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McNemar {
    pub n01: usize,
    pub n10: usize,
    pub statistic: f64,
    pub corrected: bool,
    pub significant: bool,
}

/// McNemar's statistic from the two discordant counts: `n01` items wrong only
/// under the first method, `n10` wrong only under the second. The continuity
/// corrected form is `(max(|n01 − n10| − 1, 0))² / (n01 + n10)`.
pub fn mcnemar(n01: usize, n10: usize, corrected: bool) -> Result<McNemar> {
    let total = n01 + n10;
    if total == 0 {
        return Err(Error::Undefined("McNemar needs at least one discordant pair"));
    }
    let diff = n01.abs_diff(n10) as f64;
    let numerator = if corrected { (diff - 1.0).max(0.0) } else { diff };
    let statistic = numerator * numerator / total as f64;
    Ok(McNemar {
        n01,
        n10,
        statistic,
        corrected,
        significant: statistic > MCNEMAR_CRITICAL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairedTTest {
    pub t: f64,
    pub df: usize,
    /// Two-sided.
    pub p_value: f64,
    pub mean_difference: f64,
}

/// Two-sided Student-t tail `P(|T| ≥ |t|)` with `df` degrees of freedom, via
/// the regularized incomplete beta function.
pub fn student_t_two_sided(t: f64, df: f64) -> f64 {
    let x = df / (df + t * t);
    beta_reg(df / 2.0, 0.5, x).clamp(0.0, 1.0)
}

pub fn paired_t_test(xs: &[f64], ys: &[f64]) -> Result<PairedTTest> {
    if xs.len() != ys.len() {
        return Err(Error::Config(format!(
            "paired samples differ in length: {} vs {}",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::Undefined("paired t-test needs at least two pairs"));
    }
    let d: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| x - y).collect();
    let mean = d.iter().sum::<f64>() / n as f64;
    let var = d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let sd = var.sqrt();
    if !(sd > 1e-300) {
        return Err(Error::Undefined("paired differences have zero variance"));
    }
    let t = mean / (sd / (n as f64).sqrt());
    Ok(PairedTTest {
        t,
        df: n - 1,
        p_value: student_t_two_sided(t, (n - 1) as f64),
        mean_difference: mean,
    })
}
