//! Linear SVM trained by primal subgradient descent (Pegasos schedule).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::TrainConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmMeta {
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSvmModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub meta: SvmMeta,
}

impl LinearSvmModel {
    pub fn zeros(len: usize) -> Self {
        LinearSvmModel {
            weights: vec![0.0; len],
            bias: 0.0,
            meta: SvmMeta {
                lambda: 0.0,
                epochs: 0,
                seed: 0,
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn svm_score(model: &LinearSvmModel, x: &[f64]) -> Result<f64> {
    if x.len() != model.weights.len() {
        return Err(Error::LengthMismatch {
            expected: model.weights.len(),
            actual: x.len(),
        });
    }
    Ok(dot(&model.weights, x) + model.bias)
}

/// `(lambda / 2) * |w|^2 + mean hinge loss`.
pub fn svm_objective(weights: &[f64], bias: f64, pos: &[Vec<f64>], neg: &[Vec<f64>], lambda: f64) -> f64 {
    let n = (pos.len() + neg.len()) as f64;
    let hinge: f64 = pos
        .iter()
        .map(|x| (1.0 - (dot(weights, x) + bias)).max(0.0))
        .chain(neg.iter().map(|x| (1.0 + dot(weights, x) + bias).max(0.0)))
        .sum();
    0.5 * lambda * dot(weights, weights) + hinge / n
}

/// Pegasos: step `1 / (lambda * t)`, one pass over a seeded shuffle per epoch,
/// then projection onto the `1 / sqrt(lambda)` ball. The bias is learned as
/// the weight of a constant unit feature.
pub fn svm_train(pos: &[Vec<f64>], neg: &[Vec<f64>], cfg: &TrainConfig) -> Result<LinearSvmModel> {
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::Training(format!(
            "need samples of both classes ({} positive, {} negative)",
            pos.len(),
            neg.len()
        )));
    }
    if !(cfg.lambda > 0.0) || cfg.epochs == 0 {
        return Err(Error::Config("SVM needs lambda > 0 and epochs >= 1".into()));
    }
    let dim = pos[0].len();
    for x in pos.iter().chain(neg) {
        if x.len() != dim {
            return Err(Error::LengthMismatch {
                expected: dim,
                actual: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Training("non-finite feature value".into()));
        }
    }

    let samples: Vec<(&[f64], f64)> = pos
        .iter()
        .map(|x| (x.as_slice(), 1.0))
        .chain(neg.iter().map(|x| (x.as_slice(), -1.0)))
        .collect();
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let lambda = cfg.lambda;
    let radius = 1.0 / lambda.sqrt();

    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut t = 0u64;
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let (x, y) = samples[i];
            let eta = 1.0 / (lambda * t as f64);
            let margin = y * (dot(&w, x) + b);
            let shrink = 1.0 - eta * lambda;
            w.iter_mut().for_each(|v| *v *= shrink);
            b *= shrink;
            if margin < 1.0 {
                for (v, xi) in w.iter_mut().zip(x) {
                    *v += eta * y * xi;
                }
                b += eta * y;
            }
            let norm = (dot(&w, &w) + b * b).sqrt();
            if norm > radius {
                let s = radius / norm;
                w.iter_mut().for_each(|v| *v *= s);
                b *= s;
            }
        }
    }
    Ok(LinearSvmModel {
        weights: w,
        bias: b,
        meta: SvmMeta {
            lambda,
            epochs: cfg.epochs,
            seed: cfg.seed,
        },
    })
}
