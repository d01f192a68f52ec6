//! K-fold nested cross-validation over datasets.
//!
//! Folds partition datasets, never individual columns, so every column of a
//! source file lands in the same fold. The inner loop scores each grid point
//! on an inner K-fold split of the outer training datasets; the best point
//! (lowest mean inner error, earliest on ties) is retrained on the whole
//! outer training split and scored on the outer test fold.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// A learner the nested cross-validation can tune.
pub trait Trainee: Sync {
    type Param: Clone + Send + Sync;
    type Model: Send;

    /// Fits a model on the given datasets.
    fn train(&self, param: &Self::Param, datasets: &[usize]) -> Result<Self::Model>;

    /// Error of `model` on the given datasets, in `[0, 1]`.
    fn error(&self, model: &Self::Model, datasets: &[usize]) -> f64;

    /// Secondary error that separates grid points with equal [`Trainee::error`].
    fn tiebreak_error(&self, _model: &Self::Model, _datasets: &[usize]) -> f64 {
        0.0
    }
}

/// Seeded shuffle of `0..n` dealt round-robin into `k` folds.
pub fn assign_folds(n: usize, k: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut folds = vec![Vec::new(); k];
    for (i, d) in order.into_iter().enumerate() {
        folds[i % k].push(d);
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    folds
}

fn complement(all: &[Vec<usize>], skip: usize) -> Vec<usize> {
    let mut out: Vec<usize> = all
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != skip)
        .flat_map(|(_, f)| f.iter().copied())
        .collect();
    out.sort_unstable();
    out
}

fn inner_seed(seed: u64, fold: usize) -> u64 {
    seed ^ (fold as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

#[derive(Debug, Clone, Serialize)]
pub struct OuterFold<P, M> {
    pub test_datasets: Vec<usize>,
    pub train_datasets: Vec<usize>,
    /// Mean inner error of each grid point.
    pub inner_errors: Vec<f64>,
    /// Mean inner tie-break error of each grid point.
    pub inner_tiebreak_errors: Vec<f64>,
    pub selected_index: usize,
    pub selected: P,
    pub test_error: f64,
    pub model: M,
}

#[derive(Debug, Clone, Serialize)]
pub struct CvReport<P, M> {
    pub k: usize,
    pub seed: u64,
    pub folds: Vec<OuterFold<P, M>>,
    pub mean_test_error: f64,
}

impl<P, M> CvReport<P, M> {
    /// Grid index chosen most often across outer folds; ties go to the
    /// smaller index.
    pub fn modal_selection(&self) -> usize {
        let mut counts: std::collections::BTreeMap<usize, usize> = Default::default();
        for f in &self.folds {
            *counts.entry(f.selected_index).or_default() += 1;
        }
        let best = counts.values().copied().max().unwrap_or(0);
        counts
            .into_iter()
            .find(|&(_, c)| c == best)
            .map_or(0, |(i, _)| i)
    }
}

pub fn nested_cv<T: Trainee>(
    trainee: &T,
    dataset_count: usize,
    grid: &[T::Param],
    k: usize,
    seed: u64,
) -> Result<CvReport<T::Param, T::Model>> {
    if k < 2 {
        return Err(Error::Config(format!("need at least 2 folds, got {k}")));
    }
    if dataset_count < k {
        return Err(Error::Config(format!(
            "{dataset_count} datasets cannot fill {k} folds"
        )));
    }
    if grid.is_empty() {
        return Err(Error::Config("hyperparameter grid is empty".into()));
    }

    let outer = assign_folds(dataset_count, k, seed);
    let folds = (0..k)
        .into_par_iter()
        .map(|i| {
            let test_datasets = outer[i].clone();
            let train_datasets = complement(&outer, i);
            let inner_k = k.min(train_datasets.len());
            let (inner_errors, inner_tiebreak_errors) = if grid.len() == 1 || inner_k < 2 {
                (vec![0.0; grid.len()], vec![0.0; grid.len()])
            } else {
                let inner: Vec<Vec<usize>> =
                    assign_folds(train_datasets.len(), inner_k, inner_seed(seed, i))
                        .into_iter()
                        .map(|f| f.into_iter().map(|j| train_datasets[j]).collect())
                        .collect();
                let cells: Vec<(usize, usize)> = (0..grid.len())
                    .flat_map(|p| (0..inner_k).map(move |j| (p, j)))
                    .collect();
                let errors: Vec<(f64, f64)> = cells
                    .par_iter()
                    .map(|&(p, j)| {
                        let fit_on = complement(&inner, j);
                        match trainee.train(&grid[p], &fit_on) {
                            Ok(model) => (
                                trainee.error(&model, &inner[j]),
                                trainee.tiebreak_error(&model, &inner[j]),
                            ),
                            Err(_) => (f64::INFINITY, f64::INFINITY),
                        }
                    })
                    .collect();
                let mean = |p: usize, pick: fn(&(f64, f64)) -> f64| {
                    errors[p * inner_k..(p + 1) * inner_k].iter().map(pick).sum::<f64>() / inner_k as f64
                };
                (
                    (0..grid.len()).map(|p| mean(p, |e| e.0)).collect(),
                    (0..grid.len()).map(|p| mean(p, |e| e.1)).collect::<Vec<_>>(),
                )
            };
            let mut selected_index = 0;
            for p in 1..grid.len() {
                let key = (inner_errors[p], inner_tiebreak_errors[p]);
                let best = (inner_errors[selected_index], inner_tiebreak_errors[selected_index]);
                if key.0 < best.0 || (key.0 == best.0 && key.1 < best.1) {
                    selected_index = p;
                }
            }
            let model = trainee.train(&grid[selected_index], &train_datasets)?;
            let test_error = trainee.error(&model, &test_datasets);
            Ok(OuterFold {
                test_datasets,
                train_datasets,
                inner_errors,
                inner_tiebreak_errors,
                selected_index,
                selected: grid[selected_index].clone(),
                test_error,
                model,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mean_test_error = folds.iter().map(|f| f.test_error).sum::<f64>() / k as f64;
    Ok(CvReport {
        k,
        seed,
        folds,
        mean_test_error,
    })
}
