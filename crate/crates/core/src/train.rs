//! L2-regularized logistic regression fitted by damped Newton iterations.

use nalgebra::{DMatrix, DVector};

use crate::categorical::{FeatureVector, LogisticModel, FEATURE_COUNT};
use crate::error::{Error, Result};

/// Parameters are the eight weights followed by the bias.
pub const PARAM_COUNT: usize = FEATURE_COUNT + 1;

pub const MAX_ITERATIONS: usize = 10_000;
pub const GRADIENT_TOLERANCE: f64 = 1e-8;

/// Standardized design matrix with ±1 labels.
#[derive(Debug, Clone)]
pub struct TrainingSet {
    pub rows: Vec<[f64; FEATURE_COUNT]>,
    pub labels: Vec<f64>,
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn sigmoid(z: f64) -> f64 {
    crate::categorical::sigmoid(z)
}

impl TrainingSet {
    fn margin(&self, params: &[f64; PARAM_COUNT], i: usize) -> f64 {
        self.rows[i]
            .iter()
            .zip(params)
            .map(|(x, w)| x * w)
            .sum::<f64>()
            + params[FEATURE_COUNT]
    }

    /// `Σ log(1 + exp(-y m)) + ‖w‖² / (2C)`, bias unpenalized.
    pub fn loss(&self, params: &[f64; PARAM_COUNT], c: f64) -> f64 {
        let data: f64 = (0..self.rows.len())
            .map(|i| softplus(-self.labels[i] * self.margin(params, i)))
            .sum();
        let penalty: f64 = params[..FEATURE_COUNT].iter().map(|w| w * w).sum();
        data + penalty / (2.0 * c)
    }

    pub fn gradient(&self, params: &[f64; PARAM_COUNT], c: f64) -> [f64; PARAM_COUNT] {
        let mut g = [0.0; PARAM_COUNT];
        for i in 0..self.rows.len() {
            let y = self.labels[i];
            let coef = -y * sigmoid(-y * self.margin(params, i));
            for (gj, x) in g.iter_mut().zip(&self.rows[i]) {
                *gj += coef * x;
            }
            g[FEATURE_COUNT] += coef;
        }
        for j in 0..FEATURE_COUNT {
            g[j] += params[j] / c;
        }
        g
    }

    fn hessian(&self, params: &[f64; PARAM_COUNT], c: f64) -> DMatrix<f64> {
        let mut h = DMatrix::zeros(PARAM_COUNT, PARAM_COUNT);
        for i in 0..self.rows.len() {
            let s = sigmoid(self.margin(params, i));
            let d = s * (1.0 - s);
            let mut x = [1.0; PARAM_COUNT];
            x[..FEATURE_COUNT].copy_from_slice(&self.rows[i]);
            for a in 0..PARAM_COUNT {
                for b in 0..PARAM_COUNT {
                    h[(a, b)] += d * x[a] * x[b];
                }
            }
        }
        for j in 0..FEATURE_COUNT {
            h[(j, j)] += 1.0 / c;
        }
        h
    }
}

/// Mean and population standard deviation per feature; constant features
/// get a standard deviation of one.
pub fn standardization(features: &[FeatureVector]) -> ([f64; FEATURE_COUNT], [f64; FEATURE_COUNT]) {
    let n = features.len() as f64;
    let mut means = [0.0; FEATURE_COUNT];
    for f in features {
        for (m, x) in means.iter_mut().zip(f.to_array()) {
            *m += x / n;
        }
    }
    let mut stds = [0.0; FEATURE_COUNT];
    for f in features {
        for (j, x) in f.to_array().iter().enumerate() {
            stds[j] += (x - means[j]).powi(2) / n;
        }
    }
    let stds = stds.map(|v| {
        let s = v.sqrt();
        if s > 1e-12 && s.is_finite() {
            s
        } else {
            1.0
        }
    });
    (means, stds)
}

#[derive(Debug, Clone)]
pub struct TrainingTrace {
    pub losses: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Stopped because progress fell below floating-point resolution.
    pub stalled: bool,
}

/// Fits a [`LogisticModel`]; `labels[i]` is true for categorical columns.
pub fn train_logistic(features: &[FeatureVector], labels: &[bool], c: f64) -> Result<LogisticModel> {
    train_logistic_traced(features, labels, c).map(|(m, _)| m)
}

pub fn train_logistic_traced(
    features: &[FeatureVector],
    labels: &[bool],
    c: f64,
) -> Result<(LogisticModel, TrainingTrace)> {
    if features.len() != labels.len() {
        return Err(Error::Config(format!(
            "{} feature rows but {} labels",
            features.len(),
            labels.len()
        )));
    }
    if !(c > 0.0) {
        return Err(Error::Config(format!("C must be positive, got {c}")));
    }
    if !labels.iter().any(|&l| l) || labels.iter().all(|&l| l) {
        return Err(Error::DegenerateLabels);
    }
    let (means, stds) = standardization(features);
    let set = TrainingSet {
        rows: features
            .iter()
            .map(|f| {
                let a = f.to_array();
                std::array::from_fn(|j| (a[j] - means[j]) / stds[j])
            })
            .collect(),
        labels: labels.iter().map(|&l| if l { 1.0 } else { -1.0 }).collect(),
    };
    let (params, trace) = minimize(&set, c);
    let mut weights = [0.0; FEATURE_COUNT];
    weights.copy_from_slice(&params[..FEATURE_COUNT]);
    let model = LogisticModel::new(weights, params[FEATURE_COUNT], means, stds, c)?;
    Ok((model, trace))
}

fn inf_norm(g: &[f64]) -> f64 {
    g.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Newton's method with Armijo backtracking from the origin. Steps that fail
/// to decrease the loss are never taken, so the loss sequence is monotone.
pub fn minimize(set: &TrainingSet, c: f64) -> ([f64; PARAM_COUNT], TrainingTrace) {
    let mut params = [0.0; PARAM_COUNT];
    let mut loss = set.loss(&params, c);
    let mut trace = TrainingTrace {
        losses: vec![loss],
        iterations: 0,
        converged: false,
        stalled: false,
    };
    for _ in 0..MAX_ITERATIONS {
        let g = set.gradient(&params, c);
        if inf_norm(&g) < GRADIENT_TOLERANCE {
            trace.converged = true;
            break;
        }
        let grad = DVector::from_column_slice(&g);
        let direction = set
            .hessian(&params, c)
            .cholesky()
            .map(|ch| -ch.solve(&grad))
            .unwrap_or_else(|| -grad.clone());
        let slope = grad.dot(&direction);
        let direction = if slope < 0.0 { direction } else { -grad.clone() };
        let slope = grad.dot(&direction);

        let mut step = 1.0;
        let mut accepted = None;
        while step > 1e-20 {
            let candidate: [f64; PARAM_COUNT] =
                std::array::from_fn(|j| params[j] + step * direction[j]);
            let candidate_loss = set.loss(&candidate, c);
            if candidate_loss <= loss + 1e-4 * step * slope {
                accepted = Some((candidate, candidate_loss));
                break;
            }
            step *= 0.5;
        }
        trace.iterations += 1;
        match accepted {
            Some((p, l)) => {
                params = p;
                loss = l;
                trace.losses.push(loss);
            }
            None => break,
        }
        // Once the predicted decrease is below the resolution of the loss,
        // rounding decides the line search and further steps go nowhere.
        if step < 1.0 && -slope < 1e-12 * loss.abs().max(1.0) {
            trace.stalled = true;
            break;
        }
    }
    if !trace.converged {
        trace.converged = inf_norm(&set.gradient(&params, c)) < GRADIENT_TOLERANCE;
    }
    (params, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::categorical::predict_categorical_prob;

    fn fv(a: [f64; 8]) -> FeatureVector {
        FeatureVector::from_array(a)
    }

    #[test]
    fn balanced_constant_features_stay_at_origin() {
        let features = vec![fv([0.5; 8]); 4];
        let labels = [true, false, true, false];
        let model = train_logistic(&features, &labels, 1.0).unwrap();
        assert_eq!(model.weights, [0.0; 8]);
        assert_eq!(model.bias, 0.0);
        assert_eq!(model.feature_stds, [1.0; 8]);
    }

    #[test]
    fn separable_pair_is_fit() {
        let features = vec![
            fv([0.0, 0.0, 1.0, 0.0, 3.0, 0.03, 3.0, 0.03]),
            fv([0.0, 0.0, 1.0, 0.0, 90.0, 0.9, 90.0, 0.9]),
        ];
        let labels = [true, false];
        let (model, trace) = train_logistic_traced(&features, &labels, 1e4).unwrap();
        assert!(trace.converged);
        for (f, &l) in features.iter().zip(&labels) {
            assert_eq!(predict_categorical_prob(&model, f) > 0.5, l);
        }
    }

    #[test]
    fn single_class_is_rejected() {
        let features = vec![fv([0.0; 8]); 3];
        assert!(matches!(
            train_logistic(&features, &[true; 3], 1.0),
            Err(Error::DegenerateLabels)
        ));
        assert!(train_logistic(&features, &[true, false, true], 0.0).is_err());
    }

    #[test]
    fn losses_never_increase() {
        let features: Vec<_> = (0..40)
            .map(|i| {
                let u = (i * 7 % 23) as f64;
                fv([0.0, 0.1, 0.8, 0.1, u, u / 40.0, u, u / 39.0])
            })
            .collect();
        let labels: Vec<bool> = (0..40).map(|i| (i * 7 % 23) < 9 || i % 11 == 0).collect();
        let (_, trace) = train_logistic_traced(&features, &labels, 10.0).unwrap();
        assert!(trace.converged);
        for w in trace.losses.windows(2) {
            assert!(w[1] <= w[0], "{} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn zero_variance_feature_gets_unit_std() {
        let features = vec![fv([1.0, 0.0, 0.0, 0.0, 2.0, 0.1, 2.0, 0.1]), fv([1.0, 0.0, 0.0, 0.0, 4.0, 0.2, 4.0, 0.2])];
        let (means, stds) = standardization(&features);
        assert_eq!(means[0], 1.0);
        assert_eq!(stds[0], 1.0);
        assert_eq!(means[4], 3.0);
        assert_eq!(stds[4], 1.0);
        assert!((stds[5] - 0.05).abs() < 1e-15);
    }
}
