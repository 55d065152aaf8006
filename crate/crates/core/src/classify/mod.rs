//! Window classifiers, their trainers, and the bootstrap (hard-negative)
//! retraining loop.

pub mod adaboost;
pub mod svm;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::detector::{detect, DetectConfig};
use crate::hog::{window_descriptor, GradientLut, HogConfig};
use crate::lbp::feature_pool;
use crate::pixel::{resize, GrayImage, Rect};
use crate::{Error, Result};

pub use adaboost::{adaboost_score, adaboost_train, adaboost_train_traced, AdaBoostModel, BoostTrace, WeakLearner};
pub use svm::{svm_objective, svm_score, svm_train, LinearSvmModel, SvmMeta};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    /// SVM regularisation.
    pub lambda: f64,
    /// SVM passes over the training set.
    pub epochs: usize,
    /// AdaBoost rounds.
    pub n_rounds: usize,
    pub bootstrap_rounds: usize,
    /// Cap on hard negatives mined per bootstrap round; `0` means "as many as
    /// the initial negative set".
    pub negatives_per_round: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lambda: 1e-3,
            epochs: 20,
            n_rounds: 50,
            bootstrap_rounds: 2,
            negatives_per_round: 0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    HogSvm,
    LbpAdaBoost,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::HogSvm => "hog_svm",
            ModelKind::LbpAdaBoost => "lbp_adaboost",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hog_svm" => Ok(ModelKind::HogSvm),
            "lbp_adaboost" => Ok(ModelKind::LbpAdaBoost),
            other => Err(Error::Config(format!("unknown model type {other:?}"))),
        }
    }
}

/// HOG descriptor + linear SVM. Owns the gradient lookup table, rebuilt on
/// construction.
#[derive(Debug, Clone)]
pub struct HogSvmDetector {
    pub hog: HogConfig,
    pub svm: LinearSvmModel,
    lut: Arc<GradientLut>,
}

impl HogSvmDetector {
    pub fn new(hog: HogConfig, svm: LinearSvmModel) -> Result<Self> {
        hog.validate()?;
        if svm.dim() != hog.descriptor_len() {
            return Err(Error::LengthMismatch {
                expected: hog.descriptor_len(),
                actual: svm.dim(),
            });
        }
        Ok(HogSvmDetector {
            hog,
            svm,
            lut: Arc::new(GradientLut::new(&hog)),
        })
    }

    pub fn lut(&self) -> &GradientLut {
        &self.lut
    }
}

impl PartialEq for HogSvmDetector {
    fn eq(&self, other: &Self) -> bool {
        self.hog == other.hog && self.svm == other.svm
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LbpAdaBoostDetector {
    /// Batch edges the feature pool was drawn from.
    pub scales: Vec<usize>,
    pub boost: AdaBoostModel,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DetectorModel {
    HogSvm(HogSvmDetector),
    LbpAdaBoost(LbpAdaBoostDetector),
}

impl DetectorModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            DetectorModel::HogSvm(_) => ModelKind::HogSvm,
            DetectorModel::LbpAdaBoost(_) => ModelKind::LbpAdaBoost,
        }
    }

    pub fn window(&self) -> (usize, usize) {
        match self {
            DetectorModel::HogSvm(m) => (m.hog.window_w, m.hog.window_h),
            DetectorModel::LbpAdaBoost(m) => (m.boost.window_w, m.boost.window_h),
        }
    }

    /// Threshold the model was trained against: `0` for the SVM, the stored
    /// decision threshold for AdaBoost.
    pub fn default_threshold(&self) -> f64 {
        match self {
            DetectorModel::HogSvm(_) => 0.0,
            DetectorModel::LbpAdaBoost(m) => m.boost.decision_threshold,
        }
    }

    /// Score of a patch exactly the window size.
    pub fn score_patch(&self, patch: &GrayImage) -> Result<f64> {
        match self {
            DetectorModel::HogSvm(m) => {
                let r = Rect::new(0, 0, m.hog.window_w, m.hog.window_h);
                let d = window_descriptor(patch, &r, &m.hog, m.lut())?;
                svm_score(&m.svm, &d.values)
            }
            DetectorModel::LbpAdaBoost(m) => adaboost_score(&m.boost, patch),
        }
    }
}

/// HOG descriptors of window-sized patches.
pub fn patch_descriptors(patches: &[GrayImage], hog: &HogConfig, lut: &GradientLut) -> Result<Vec<Vec<f64>>> {
    let r = Rect::new(0, 0, hog.window_w, hog.window_h);
    patches
        .iter()
        .map(|p| window_descriptor(p, &r, hog, lut).map(|d| d.values))
        .collect()
}

/// One training pass on fixed patch sets.
pub fn train_model(
    kind: ModelKind,
    pos: &[GrayImage],
    neg: &[GrayImage],
    cfg: &TrainConfig,
    scales: &[usize],
) -> Result<DetectorModel> {
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::Training(format!(
            "need positives and negatives, got {} and {}",
            pos.len(),
            neg.len()
        )));
    }
    let (w, h) = (pos[0].width(), pos[0].height());
    match kind {
        ModelKind::HogSvm => {
            let hog = HogConfig {
                window_w: w,
                window_h: h,
                ..HogConfig::default()
            };
            hog.validate()?;
            let lut = GradientLut::new(&hog);
            let pd = patch_descriptors(pos, &hog, &lut)?;
            let nd = patch_descriptors(neg, &hog, &lut)?;
            let svm = svm_train(&pd, &nd, cfg)?;
            Ok(DetectorModel::HogSvm(HogSvmDetector {
                hog,
                svm,
                lut: Arc::new(lut),
            }))
        }
        ModelKind::LbpAdaBoost => {
            let pool = feature_pool(w, h, scales);
            let boost = adaboost_train(pos, neg, &pool, cfg)?;
            Ok(DetectorModel::LbpAdaBoost(LbpAdaBoostDetector {
                scales: scales.to_vec(),
                boost,
            }))
        }
    }
}

/// Fraction of patches on the wrong side of the model's default threshold.
pub fn training_error(model: &DetectorModel, pos: &[GrayImage], neg: &[GrayImage]) -> Result<f64> {
    let t = model.default_threshold();
    let mut wrong = 0usize;
    for p in pos {
        if model.score_patch(p)? <= t {
            wrong += 1;
        }
    }
    for p in neg {
        if model.score_patch(p)? > t {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / (pos.len() + neg.len()).max(1) as f64)
}

/// Windows the detector fires on in person-free images, strongest first,
/// cropped and resized to the model window.
pub fn bootstrap_mine(
    model: &DetectorModel,
    negative_images: &[GrayImage],
    cfg: &DetectConfig,
    cap: usize,
) -> Result<Vec<GrayImage>> {
    if cap == 0 {
        return Ok(Vec::new());
    }
    let mut hits: Vec<(f64, usize, Rect)> = Vec::new();
    for (i, img) in negative_images.iter().enumerate() {
        for d in detect(img, model, cfg)? {
            hits.push((d.score, i, d.rect));
        }
    }
    hits.sort_by(|a, b| {
        b.0.total_cmp(&a.0)
            .then(a.1.cmp(&b.1))
            .then((a.2.y, a.2.x, a.2.h, a.2.w).cmp(&(b.2.y, b.2.x, b.2.h, b.2.w)))
    });
    hits.truncate(cap);
    let (ww, wh) = model.window();
    hits.iter()
        .map(|(_, i, r)| resize(&negative_images[*i].crop(r)?, ww, wh))
        .collect()
}

/// Diagnostics for one pass of the bootstrap loop.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapRound {
    pub round: usize,
    pub n_negatives: usize,
    pub mined: usize,
    /// Detections on the person-free images after this round's training.
    pub false_positives: usize,
    pub fppi: f64,
    pub training_error: f64,
}

/// Count of detections on person-free images.
pub fn false_positive_count(model: &DetectorModel, images: &[GrayImage], cfg: &DetectConfig) -> Result<usize> {
    let mut n = 0;
    for img in images {
        n += detect(img, model, cfg)?.len();
    }
    Ok(n)
}

/// Train, then repeatedly mine hard negatives from `negative_images` and
/// retrain with them appended. `bootstrap_rounds == 0` is a single pass.
pub fn train_with_bootstrap(
    kind: ModelKind,
    pos: &[GrayImage],
    neg: &[GrayImage],
    negative_images: &[GrayImage],
    train: &TrainConfig,
    detect_cfg: &DetectConfig,
    scales: &[usize],
) -> Result<(DetectorModel, Vec<BootstrapRound>)> {
    let mut negs = neg.to_vec();
    let cap = if train.negatives_per_round == 0 {
        neg.len()
    } else {
        train.negatives_per_round
    };
    let mut model = train_model(kind, pos, &negs, train, scales)?;
    let mut trace = Vec::new();
    let mut mined = 0;
    for round in 0..=train.bootstrap_rounds {
        if round > 0 {
            let hard = bootstrap_mine(&model, negative_images, detect_cfg, cap)?;
            mined = hard.len();
            if hard.is_empty() {
                break;
            }
            negs.extend(hard);
            model = train_model(kind, pos, &negs, train, scales)?;
        }
        let fp = false_positive_count(&model, negative_images, detect_cfg)?;
        trace.push(BootstrapRound {
            round,
            n_negatives: negs.len(),
            mined,
            false_positives: fp,
            fppi: fp as f64 / negative_images.len().max(1) as f64,
            training_error: training_error(&model, pos, &negs)?,
        });
    }
    Ok((model, trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_round_trip() {
        for k in [ModelKind::HogSvm, ModelKind::LbpAdaBoost] {
            assert_eq!(k.as_str().parse::<ModelKind>().unwrap(), k);
        }
        assert!("cnn".parse::<ModelKind>().is_err());
    }

    #[test]
    fn zero_svm_mines_nothing() {
        let hog = HogConfig::default();
        let model = DetectorModel::HogSvm(HogSvmDetector::new(hog, LinearSvmModel::zeros(756)).unwrap());
        let imgs = vec![GrayImage::from_fn(96, 128, |x, y| ((x * 31 + y * 17) % 251) as u8)];
        let cfg = DetectConfig::default();
        assert!(bootstrap_mine(&model, &imgs, &cfg, 100).unwrap().is_empty());
        assert!(bootstrap_mine(&model, &imgs, &cfg, 0).unwrap().is_empty());
    }

    #[test]
    fn svm_length_checked() {
        assert!(HogSvmDetector::new(HogConfig::default(), LinearSvmModel::zeros(10)).is_err());
    }
}
