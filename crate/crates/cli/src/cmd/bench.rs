use std::io::Write;
use std::time::Instant;

use pedscan_core::detector::{detect_with_stats, DetectConfig};
use pedscan_core::hog::{window_descriptor, window_descriptor_direct, GradientLut, HogConfig};
use pedscan_core::pixel::resize;
use pedscan_core::synth::scene;
use pedscan_core::{classify::DetectorModel, GrayImage, Rect};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::args::BenchArgs;
use crate::cmd::detect::load_model;
use crate::error::{CliError, CliResult};
use crate::imageio::load_gray;
use crate::util::{cpu_model, write_text};

pub const BENCH_HEADER: &str = "model_type,image_size,frames,total_ms,fps,window_count,cpu_model";

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub model_type: String,
    pub image_size: (usize, usize),
    pub frames: usize,
    pub total_ms: f64,
    pub fps: f64,
    /// Windows evaluated per frame.
    pub window_count: usize,
    pub cpu_model: String,
}

impl BenchRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{}x{},{},{:.3},{:.3},{},{}",
            self.model_type,
            self.image_size.0,
            self.image_size.1,
            self.frames,
            self.total_ms,
            self.fps,
            self.window_count,
            self.cpu_model
        )
    }
}

/// Deterministic cluttered frames with a few figures.
pub fn synth_frames(w: usize, h: usize, n: usize, seed: u64) -> Vec<GrayImage> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| scene(w, h, 4, 3.0, &mut rng).0).collect()
}

/// Times `detect` over every frame; decode is not included.
pub fn bench_frames(model: &DetectorModel, frames: &[GrayImage], cfg: &DetectConfig) -> CliResult<BenchRecord> {
    if frames.is_empty() {
        return Err(CliError::BadArgs("need at least one frame".into()));
    }
    let mut windows = None;
    let t0 = Instant::now();
    for f in frames {
        let (_, stats) = detect_with_stats(f, model, cfg)?;
        windows.get_or_insert(stats.windows());
    }
    let total_ms = t0.elapsed().as_secs_f64() * 1e3;
    Ok(BenchRecord {
        model_type: model.kind().as_str().into(),
        image_size: (frames[0].width(), frames[0].height()),
        frames: frames.len(),
        total_ms,
        fps: frames.len() as f64 / (total_ms / 1e3),
        window_count: windows.unwrap_or(0),
        cpu_model: cpu_model(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LutComparison {
    pub windows: usize,
    pub lut_ms: f64,
    pub direct_ms: f64,
}

impl LutComparison {
    /// Direct time over LUT time.
    pub fn speedup(&self) -> f64 {
        self.direct_ms / self.lut_ms
    }
}

/// Times HOG descriptors for `n` random windows through the lookup table and
/// through per-pixel trigonometry. Both paths see the same windows.
pub fn compare_lut(frames: &[GrayImage], n: usize, seed: u64) -> CliResult<LutComparison> {
    let cfg = HogConfig::default();
    let lut = GradientLut::new(&cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fits: Vec<&GrayImage> = frames
        .iter()
        .filter(|f| f.width() >= cfg.window_w && f.height() >= cfg.window_h)
        .collect();
    if fits.is_empty() {
        return Err(CliError::BadArgs("frames are smaller than the HOG window".into()));
    }
    let windows: Vec<(usize, Rect)> = (0..n)
        .map(|_| {
            let i = rng.gen_range(0..fits.len());
            let f = fits[i];
            let x = rng.gen_range(0..=f.width() - cfg.window_w);
            let y = rng.gen_range(0..=f.height() - cfg.window_h);
            (i, Rect::new(x, y, cfg.window_w, cfg.window_h))
        })
        .collect();
    let mut sink = 0.0;
    let t0 = Instant::now();
    for (i, r) in &windows {
        sink += window_descriptor(fits[*i], r, &cfg, &lut)?.values[0];
    }
    let lut_ms = t0.elapsed().as_secs_f64() * 1e3;
    let t0 = Instant::now();
    for (i, r) in &windows {
        sink += window_descriptor_direct(fits[*i], r, &cfg)?.values[0];
    }
    let direct_ms = t0.elapsed().as_secs_f64() * 1e3;
    std::hint::black_box(sink);
    Ok(LutComparison {
        windows: n,
        lut_ms,
        direct_ms,
    })
}

pub fn run(args: &BenchArgs, out: &mut dyn Write) -> CliResult<()> {
    if args.frames == 0 {
        return Err(CliError::BadArgs("--frames must be at least 1".into()));
    }
    let m = load_model(&args.model)?;
    let cfg = args.detect.config(m.model.default_threshold());
    cfg.validate()?;
    let (w, h) = args.size;
    let frames: Vec<GrayImage> = if args.images.is_empty() {
        synth_frames(w, h, args.frames, args.seed)
    } else {
        let loaded = args
            .images
            .iter()
            .map(|p| load_gray(p).and_then(|g| Ok(resize(&g, w, h)?)))
            .collect::<CliResult<Vec<_>>>()?;
        (0..args.frames).map(|i| loaded[i % loaded.len()].clone()).collect()
    };
    let rec = bench_frames(&m.model, &frames, &cfg)?;
    let csv = format!("{BENCH_HEADER}\n{}\n", rec.csv_row());
    match &args.out {
        Some(p) => write_text(p, &csv)?,
        None => out.write_all(csv.as_bytes())?,
    }
    if args.compare_lut {
        let c = compare_lut(&frames, 1000, args.seed)?;
        eprintln!(
            "lut_compare windows={} lut_ms={:.3} direct_ms={:.3} speedup={:.3}",
            c.windows,
            c.lut_ms,
            c.direct_ms,
            c.speedup()
        );
    }
    Ok(())
}
