//! Sliding-window detection over an image pyramid.

use std::cmp::Ordering;

use crate::classify::{svm::dot, DetectorModel};
use crate::hog::{window_descriptor, BlockGrid};
use crate::pixel::{resize, GrayImage, IntegralImage, Rect};
use crate::{Error, Result, WINDOW_H, WINDOW_W};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectConfig {
    pub window_w: usize,
    pub window_h: usize,
    /// Scan step in level pixels.
    pub step: usize,
    /// Downscale ratio between consecutive pyramid levels.
    pub scale_factor: f64,
    pub max_levels: usize,
    /// A window is kept when its score is strictly greater than this.
    pub score_threshold: f64,
    /// NMS drops a detection whose IoU with an accepted one exceeds this.
    pub nms_overlap: f64,
}

impl Default for DetectConfig {
    fn default() -> Self {
        DetectConfig {
            window_w: WINDOW_W,
            window_h: WINDOW_H,
            step: 8,
            scale_factor: 1.2,
            max_levels: 64,
            score_threshold: 0.0,
            nms_overlap: 0.5,
        }
    }
}

impl DetectConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window_w == 0 || self.window_h == 0 {
            return Err(Error::Config("window must be non-empty".into()));
        }
        if self.step == 0 {
            return Err(Error::Config("step must be >= 1".into()));
        }
        if !(self.scale_factor > 1.0) || !self.scale_factor.is_finite() {
            return Err(Error::Config(format!("scale factor {} must be > 1", self.scale_factor)));
        }
        if self.max_levels == 0 {
            return Err(Error::Config("max_levels must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.nms_overlap) {
            return Err(Error::Config(format!(
                "nms overlap {} outside [0, 1]",
                self.nms_overlap
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    /// Rectangle in original-image coordinates.
    pub rect: Rect,
    pub score: f64,
    pub level: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PyramidLevel {
    pub image: GrayImage,
    /// Original size divided by level size.
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pyramid {
    pub levels: Vec<PyramidLevel>,
}

fn level_dims(w: usize, h: usize, scale: f64) -> (usize, usize) {
    ((w as f64 / scale).round() as usize, (h as f64 / scale).round() as usize)
}

/// Level `k` is the original resized by `1 / scale_factor^k`. Stops at
/// `max_levels` or at the first level smaller than the window; levels whose
/// rounded size repeats the previous one are skipped.
pub fn pyramid_build(img: &GrayImage, cfg: &DetectConfig) -> Result<Pyramid> {
    cfg.validate()?;
    let (w, h) = (img.width(), img.height());
    if w < cfg.window_w || h < cfg.window_h {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            min_w: cfg.window_w,
            min_h: cfg.window_h,
        });
    }
    let mut levels = vec![PyramidLevel {
        image: img.clone(),
        scale: 1.0,
    }];
    let mut k = 1;
    while levels.len() < cfg.max_levels {
        let scale = cfg.scale_factor.powi(k);
        let (lw, lh) = level_dims(w, h, scale);
        if lw < cfg.window_w || lh < cfg.window_h {
            break;
        }
        let last = &levels[levels.len() - 1].image;
        if (lw, lh) != (last.width(), last.height()) {
            levels.push(PyramidLevel {
                image: resize(img, lw, lh)?,
                scale,
            });
        }
        k += 1;
    }
    Ok(Pyramid { levels })
}

/// Windows evaluated on one level: `(floor((W - w) / step) + 1) * (floor((H - h) / step) + 1)`.
pub fn window_count(level_w: usize, level_h: usize, window_w: usize, window_h: usize, step: usize) -> usize {
    if level_w < window_w || level_h < window_h || step == 0 {
        return 0;
    }
    ((level_w - window_w) / step + 1) * ((level_h - window_h) / step + 1)
}

/// Scores every window at `(i * step, j * step)` in row-major order and keeps
/// those scoring above `threshold`. Returns the kept windows (level
/// coordinates) and the number evaluated.
pub fn scan(
    level: &GrayImage,
    model: &DetectorModel,
    step: usize,
    threshold: f64,
) -> Result<(Vec<(Rect, f64)>, usize)> {
    let (ww, wh) = model.window();
    if step == 0 {
        return Err(Error::Config("step must be >= 1".into()));
    }
    if level.width() < ww || level.height() < wh {
        return Ok((Vec::new(), 0));
    }
    let nx = (level.width() - ww) / step + 1;
    let ny = (level.height() - wh) / step + 1;
    let mut hits = Vec::new();
    let mut evaluated = 0usize;
    let mut keep = |x: usize, y: usize, s: f64| {
        evaluated += 1;
        if s > threshold {
            hits.push((Rect::new(x, y, ww, wh), s));
        }
    };
    match model {
        DetectorModel::HogSvm(m) if step % m.hog.cell == 0 => {
            let grid = BlockGrid::new(level, &m.hog, m.lut())?;
            let w = &m.svm.weights;
            for j in 0..ny {
                for i in 0..nx {
                    let (x, y) = (i * step, j * step);
                    let mut s = m.svm.bias;
                    grid.for_each_block(x / m.hog.cell, y / m.hog.cell, |o, b| {
                        s += dot(&w[o..o + b.len()], b);
                    });
                    keep(x, y, s);
                }
            }
        }
        DetectorModel::HogSvm(m) => {
            for j in 0..ny {
                for i in 0..nx {
                    let (x, y) = (i * step, j * step);
                    let d = window_descriptor(level, &Rect::new(x, y, ww, wh), &m.hog, m.lut())?;
                    keep(x, y, dot(&m.svm.weights, &d.values) + m.svm.bias);
                }
            }
        }
        DetectorModel::LbpAdaBoost(m) => {
            let ii = IntegralImage::new(level);
            for j in 0..ny {
                for i in 0..nx {
                    let (x, y) = (i * step, j * step);
                    keep(x, y, m.boost.score_at(&ii, x, y));
                }
            }
        }
    }
    Ok((hits, evaluated))
}

/// Scales a level rectangle back to the original image, rounding to the
/// nearest pixel and clamping into `orig_w x orig_h`.
pub fn map_to_original(r: &Rect, scale: f64, orig_w: usize, orig_h: usize) -> Rect {
    let s = |v: usize| (v as f64 * scale).round() as usize;
    let x = s(r.x).min(orig_w.saturating_sub(1));
    let y = s(r.y).min(orig_h.saturating_sub(1));
    let w = s(r.w).clamp(1, orig_w - x);
    let h = s(r.h).clamp(1, orig_h - y);
    Rect::new(x, y, w, h)
}

fn nms_order(a: &Detection, b: &Detection) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then((a.rect.y, a.rect.x, a.level).cmp(&(b.rect.y, b.rect.x, b.level)))
        .then((a.rect.h, a.rect.w).cmp(&(b.rect.h, b.rect.w)))
}

/// Greedy suppression: highest score first, ties broken by smaller
/// `(y, x, level)`; a detection survives iff its IoU with every survivor so
/// far is at most `overlap`.
pub fn nms(dets: &[Detection], overlap: f64) -> Vec<Detection> {
    let mut sorted = dets.to_vec();
    sorted.sort_by(nms_order);
    let mut kept: Vec<Detection> = Vec::new();
    for d in sorted {
        if kept.iter().all(|k| k.rect.iou(&d.rect) <= overlap) {
            kept.push(d);
        }
    }
    kept
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DetectStats {
    pub levels: usize,
    pub windows_per_level: Vec<usize>,
}

impl DetectStats {
    pub fn windows(&self) -> usize {
        self.windows_per_level.iter().sum()
    }
}

pub fn detect(img: &GrayImage, model: &DetectorModel, cfg: &DetectConfig) -> Result<Vec<Detection>> {
    detect_with_stats(img, model, cfg).map(|(d, _)| d)
}

/// Pyramid, scan, map back, canonical `(level, y, x)` sort, NMS.
pub fn detect_with_stats(
    img: &GrayImage,
    model: &DetectorModel,
    cfg: &DetectConfig,
) -> Result<(Vec<Detection>, DetectStats)> {
    if model.window() != (cfg.window_w, cfg.window_h) {
        return Err(Error::Config(format!(
            "model window {:?} does not match detector window {}x{}",
            model.window(),
            cfg.window_w,
            cfg.window_h
        )));
    }
    let pyramid = pyramid_build(img, cfg)?;
    let run = |(k, level): (usize, &PyramidLevel)| -> Result<(Vec<Detection>, usize)> {
        let (hits, n) = scan(&level.image, model, cfg.step, cfg.score_threshold)?;
        let dets = hits
            .into_iter()
            .map(|(r, score)| Detection {
                rect: map_to_original(&r, level.scale, img.width(), img.height()),
                score,
                level: k,
            })
            .collect();
        Ok((dets, n))
    };
    #[cfg(feature = "parallel")]
    let per_level: Vec<Result<(Vec<Detection>, usize)>> = pyramid.levels.par_iter().enumerate().map(run).collect();
    #[cfg(not(feature = "parallel"))]
    let per_level: Vec<Result<(Vec<Detection>, usize)>> = pyramid.levels.iter().enumerate().map(run).collect();

    let mut all = Vec::new();
    let mut stats = DetectStats {
        levels: pyramid.levels.len(),
        windows_per_level: Vec::with_capacity(pyramid.levels.len()),
    };
    for r in per_level {
        let (d, n) = r?;
        all.extend(d);
        stats.windows_per_level.push(n);
    }
    all.sort_by(|a, b| {
        (a.level, a.rect.y, a.rect.x)
            .cmp(&(b.level, b.rect.y, b.rect.x))
            .then(b.score.total_cmp(&a.score))
    });
    Ok((nms(&all, cfg.nms_overlap), stats))
}
