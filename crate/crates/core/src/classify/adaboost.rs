//! Discrete AdaBoost over batch-LBP lookup-table weak learners.
//!
//! A weak learner reads one LBP code from a fixed position and scale inside
//! the window and maps it through a 256-entry vote table.

use super::TrainConfig;
use crate::lbp::LbpFeatureId;
use crate::pixel::{GrayImage, IntegralImage};
use crate::{Error, Result};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq)]
pub struct WeakLearner {
    pub feature: LbpFeatureId,
    /// `+1` or `-1` per code value.
    pub votes: [i8; 256],
}

impl WeakLearner {
    #[inline]
    pub fn vote(&self, code: u8) -> i8 {
        self.votes[code as usize]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaBoostModel {
    pub window_w: usize,
    pub window_h: usize,
    pub rounds: Vec<(WeakLearner, f64)>,
    pub decision_threshold: f64,
}

impl AdaBoostModel {
    /// Score of the window whose top-left is `(ox, oy)` in the image behind `ii`.
    #[inline]
    pub fn score_at(&self, ii: &IntegralImage, ox: usize, oy: usize) -> f64 {
        self.rounds
            .iter()
            .map(|(wl, alpha)| alpha * wl.vote(wl.feature.code_at(ii, ox, oy)) as f64)
            .sum()
    }

    /// Score from precomputed codes, one per round in round order.
    pub fn score_codes(&self, codes: &[u8]) -> f64 {
        self.rounds
            .iter()
            .zip(codes)
            .map(|((wl, alpha), &c)| alpha * wl.vote(c) as f64)
            .sum()
    }
}

pub fn adaboost_score(model: &AdaBoostModel, window: &GrayImage) -> Result<f64> {
    if window.width() != model.window_w || window.height() != model.window_h {
        return Err(Error::Config(format!(
            "window {}x{} does not match model window {}x{}",
            window.width(),
            window.height(),
            model.window_w,
            model.window_h
        )));
    }
    Ok(model.score_at(&IntegralImage::new(window), 0, 0))
}

/// Per-round training diagnostics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoostTrace {
    /// Weighted error of the chosen weak learner (before clamping).
    pub weighted_errors: Vec<f64>,
    /// Fraction of training samples misclassified by the ensemble so far.
    pub training_errors: Vec<f64>,
    /// Running product of the weight normalisers, an upper bound on the
    /// training error.
    pub loss_bound: Vec<f64>,
}

pub fn adaboost_train(
    pos: &[GrayImage],
    neg: &[GrayImage],
    pool: &[LbpFeatureId],
    cfg: &TrainConfig,
) -> Result<AdaBoostModel> {
    adaboost_train_traced(pos, neg, pool, cfg).map(|(m, _)| m)
}

pub fn adaboost_train_traced(
    pos: &[GrayImage],
    neg: &[GrayImage],
    pool: &[LbpFeatureId],
    cfg: &TrainConfig,
) -> Result<(AdaBoostModel, BoostTrace)> {
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::Training(format!(
            "need samples of both classes ({} positive, {} negative)",
            pos.len(),
            neg.len()
        )));
    }
    if pool.is_empty() {
        return Err(Error::Training("empty feature pool".into()));
    }
    if cfg.n_rounds == 0 {
        return Err(Error::Config("AdaBoost needs at least one round".into()));
    }
    let (ww, wh) = (pos[0].width(), pos[0].height());
    if let Some(bad) = pos.iter().chain(neg).find(|s| s.width() != ww || s.height() != wh) {
        return Err(Error::Config(format!(
            "sample {}x{} differs from {}x{}",
            bad.width(),
            bad.height(),
            ww,
            wh
        )));
    }
    if let Some(f) = pool.iter().find(|f| !f.fits(ww, wh)) {
        return Err(Error::Config(format!("feature {f:?} does not fit {ww}x{wh}")));
    }

    let n = pos.len() + neg.len();
    let labels: Vec<i8> = std::iter::repeat(1)
        .take(pos.len())
        .chain(std::iter::repeat(-1).take(neg.len()))
        .collect();
    let codes = code_matrix(pos, neg, pool);
    if (0..pool.len()).all(|f| {
        let row = &codes[f * n..(f + 1) * n];
        row.iter().all(|&c| c == row[0])
    }) {
        return Err(Error::Training("all samples produce identical codes".into()));
    }

    let mut weights = vec![1.0 / n as f64; n];
    let mut scores = vec![0.0f64; n];
    let mut rounds = Vec::new();
    let mut trace = BoostTrace::default();
    let mut bound = 1.0;

    for _ in 0..cfg.n_rounds {
        let (best, eps, votes) = best_learner(&codes, n, pool.len(), &labels, &weights);
        if eps >= 0.5 {
            if rounds.is_empty() {
                return Err(Error::Training("no weak learner beats chance".into()));
            }
            break;
        }
        let perfect = eps <= 0.0;
        let eps_c = if perfect { 1.0 / (2 * n) as f64 } else { eps };
        let alpha = 0.5 * ((1.0 - eps_c) / eps_c).ln();

        let row = &codes[best * n..(best + 1) * n];
        let mut z = 0.0;
        for i in 0..n {
            let h = votes[row[i] as usize] as f64;
            let y = labels[i] as f64;
            weights[i] *= (-alpha * y * h).exp();
            z += weights[i];
            scores[i] += alpha * h;
        }
        weights.iter_mut().for_each(|w| *w /= z);
        bound *= z;

        let wrong = scores
            .iter()
            .zip(&labels)
            .filter(|(&s, &y)| (s > 0.0) != (y > 0))
            .count();
        trace.weighted_errors.push(eps);
        trace.training_errors.push(wrong as f64 / n as f64);
        trace.loss_bound.push(bound);
        rounds.push((
            WeakLearner {
                feature: pool[best],
                votes,
            },
            alpha,
        ));
        if perfect {
            break;
        }
    }

    Ok((
        AdaBoostModel {
            window_w: ww,
            window_h: wh,
            rounds,
            decision_threshold: 0.0,
        },
        trace,
    ))
}

/// Feature-major code table: `codes[f * n + i]` is feature `f` on sample `i`.
fn code_matrix(pos: &[GrayImage], neg: &[GrayImage], pool: &[LbpFeatureId]) -> Vec<u8> {
    let n = pos.len() + neg.len();
    let iis: Vec<IntegralImage> = pos.iter().chain(neg).map(IntegralImage::new).collect();
    let mut codes = vec![0u8; pool.len() * n];
    for (f, feat) in pool.iter().enumerate() {
        for (i, ii) in iis.iter().enumerate() {
            codes[f * n + i] = feat.code_at(ii, 0, 0);
        }
    }
    codes
}

/// Weighted error and vote table of the best lookup-table learner for one
/// feature. Votes are `+1` where positive weight strictly exceeds negative.
fn fit_feature(row: &[u8], labels: &[i8], weights: &[f64]) -> (f64, [i8; 256]) {
    let mut wp = [0.0f64; 256];
    let mut wn = [0.0f64; 256];
    for ((&c, &y), &w) in row.iter().zip(labels).zip(weights) {
        if y > 0 {
            wp[c as usize] += w;
        } else {
            wn[c as usize] += w;
        }
    }
    let mut votes = [-1i8; 256];
    let mut eps = 0.0;
    for c in 0..256 {
        if wp[c] > wn[c] {
            votes[c] = 1;
            eps += wn[c];
        } else {
            eps += wp[c];
        }
    }
    (eps, votes)
}

/// Lowest-error feature; ties go to the lowest pool index.
fn best_learner(codes: &[u8], n: usize, n_feat: usize, labels: &[i8], weights: &[f64]) -> (usize, f64, [i8; 256]) {
    let errs: Vec<f64> = {
        let eval = |f: usize| fit_feature(&codes[f * n..(f + 1) * n], labels, weights).0;
        #[cfg(feature = "parallel")]
        {
            (0..n_feat).into_par_iter().map(eval).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            (0..n_feat).map(eval).collect()
        }
    };
    let mut best = 0;
    for (f, &e) in errs.iter().enumerate() {
        if e < errs[best] {
            best = f;
        }
    }
    let (eps, votes) = fit_feature(&codes[best * n..(best + 1) * n], labels, weights);
    (best, eps, votes)
}
