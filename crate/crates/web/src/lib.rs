//! Browser bindings: a synthetic street scene plus three views of it, namely
//! the batch-LBP code map, HOG cell histograms and full detection with either
//! model. Models are trained in the page on synthetic patches.

use pedscan_core::classify::{train_with_bootstrap, DetectorModel, ModelKind, TrainConfig};
use pedscan_core::detector::{detect, DetectConfig};
use pedscan_core::hog::{image_cell_grid, GradientLut, HogConfig};
use pedscan_core::lbp::{lbp_map_integral, LbpConfig};
use pedscan_core::synth::{clutter, patch_set, scene};
use pedscan_core::{GrayImage, Rect};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wasm_bindgen::prelude::*;

const SCENE_W: usize = 480;
const SCENE_H: usize = 320;

#[wasm_bindgen]
pub struct Demo {
    image: GrayImage,
    truth: Vec<Rect>,
    hog: Option<DetectorModel>,
    lbp: Option<DetectorModel>,
    lut: GradientLut,
}

fn rgba(img: &GrayImage) -> Vec<u8> {
    img.data().iter().flat_map(|&v| [v, v, v, 255]).collect()
}

fn rect_list(rs: impl Iterator<Item = (Rect, f64)>) -> Vec<f64> {
    rs.flat_map(|(r, s)| [r.x as f64, r.y as f64, r.w as f64, r.h as f64, s])
        .collect()
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u32) -> Demo {
        let mut d = Demo {
            image: GrayImage::filled(1, 1, 0),
            truth: Vec::new(),
            hog: None,
            lbp: None,
            lut: GradientLut::new(&HogConfig::default()),
        };
        d.new_scene(seed);
        d
    }

    /// Replaces the scene; trained models are kept.
    pub fn new_scene(&mut self, seed: u32) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
        let (img, truth) = scene(SCENE_W, SCENE_H, 4, 3.0, &mut rng);
        self.image = img;
        self.truth = truth;
    }

    pub fn width(&self) -> usize {
        self.image.width()
    }

    pub fn height(&self) -> usize {
        self.image.height()
    }

    /// Scene as RGBA bytes.
    pub fn pixels(&self) -> Vec<u8> {
        rgba(&self.image)
    }

    /// Planted figure frames, flattened `x, y, w, h, 0`.
    pub fn truth(&self) -> Vec<f64> {
        rect_list(self.truth.iter().map(|r| (*r, 0.0)))
    }

    /// LBP codes for `edge x edge` batches, one code per pixel position
    /// (dense), rendered as RGBA at scene size; border rows stay black.
    pub fn lbp_view(&self, edge: usize) -> Vec<u8> {
        let edge = edge.clamp(1, 8);
        let Ok(map) = lbp_map_integral(&self.image, &LbpConfig::square(edge)) else {
            return vec![0; self.image.width() * self.image.height() * 4];
        };
        let off = edge; // code at (x, y) describes the centre batch at (x + edge, y + edge)
        let out = GrayImage::from_fn(self.image.width(), self.image.height(), |x, y| {
            if x >= off && y >= off && x - off < map.grid_w && y - off < map.grid_h {
                map.get(x - off, y - off)
            } else {
                0
            }
        });
        rgba(&out)
    }

    /// Cell histograms as `[cells_x, cells_y, bins, h00_b0, h00_b1, ...]`,
    /// cells row-major, each cell scaled so the strongest bin anywhere is 1.
    pub fn hog_cells(&self, cell: usize) -> Vec<f32> {
        let cfg = HogConfig {
            cell: cell.clamp(4, 32),
            ..HogConfig::default()
        };
        let grid = image_cell_grid(&self.image, &cfg, &self.lut);
        let peak = grid.hist.iter().cloned().fold(0.0, f64::max).max(1e-12);
        let mut out = vec![grid.cells_x as f32, grid.cells_y as f32, grid.n_bins as f32];
        out.extend(grid.hist.iter().map(|v| (v / peak) as f32));
        out
    }

    /// Trains both models on synthetic patches, with two rounds of hard
    /// negatives mined from person-free clutter. Returns false on failure.
    pub fn train(&mut self, n_pos: usize, seed: u32) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
        let (pos, neg) = patch_set(n_pos, 2 * n_pos, &mut rng);
        let empty: Vec<GrayImage> = (0..6).map(|_| clutter(SCENE_W, SCENE_H, &mut rng)).collect();
        let cfg = TrainConfig {
            epochs: 20,
            n_rounds: 40,
            bootstrap_rounds: 2,
            seed: seed as u64,
            ..TrainConfig::default()
        };
        let dcfg = DetectConfig::default();
        let fit = |kind| train_with_bootstrap(kind, &pos, &neg, &empty, &cfg, &dcfg, &[1, 2, 4]).map(|(m, _)| m);
        self.hog = fit(ModelKind::HogSvm).ok();
        self.lbp = fit(ModelKind::LbpAdaBoost).ok();
        self.hog.is_some() && self.lbp.is_some()
    }

    pub fn trained(&self) -> bool {
        self.hog.is_some() && self.lbp.is_some()
    }

    /// Detections, flattened `x, y, w, h, score`. `kind` is `hog_svm` or
    /// `lbp_adaboost`; an untrained or unknown model yields nothing.
    pub fn detect(&self, kind: &str, threshold: f64, step: usize, scale_factor: f64) -> Vec<f64> {
        let model = match kind.parse::<ModelKind>() {
            Ok(ModelKind::HogSvm) => self.hog.as_ref(),
            Ok(ModelKind::LbpAdaBoost) => self.lbp.as_ref(),
            Err(_) => None,
        };
        let Some(model) = model else {
            return Vec::new();
        };
        let cfg = DetectConfig {
            step: step.max(1),
            scale_factor: scale_factor.max(1.01),
            score_threshold: threshold,
            ..DetectConfig::default()
        };
        detect(&self.image, model, &cfg)
            .map(|ds| rect_list(ds.into_iter().map(|d| (d.rect, d.score))))
            .unwrap_or_default()
    }
}
