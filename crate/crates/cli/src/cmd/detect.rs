use std::io::Write;
use std::path::Path;
use std::time::Instant;

use pedscan_core::classify::DetectorModel;
use pedscan_core::detector::{detect, DetectConfig, Detection};
use pedscan_core::{Error, GrayImage};

use crate::args::DetectArgs;
use crate::error::CliResult;
use crate::imageio::load_gray;
use crate::model_file::{load, ModelFile};
use crate::util::read_text;

pub fn load_model(path: &Path) -> CliResult<ModelFile> {
    load(&read_text(path)?)
}

/// Like [`detect`] but an image smaller than the window simply has no
/// detections.
pub fn detect_any(img: &GrayImage, model: &DetectorModel, cfg: &DetectConfig) -> CliResult<Vec<Detection>> {
    match detect(img, model, cfg) {
        Err(Error::ImageTooSmall { .. }) => Ok(Vec::new()),
        r => Ok(r?),
    }
}

pub fn detection_line(id: &str, d: &Detection) -> String {
    let r = d.rect;
    format!("{id}\t{}\t{}\t{}\t{}\t{:.6}", r.x, r.y, r.w, r.h, d.score)
}

pub fn image_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

pub fn run(args: &DetectArgs, out: &mut dyn Write) -> CliResult<()> {
    let m = load_model(&args.model)?;
    let cfg = args.detect.config(m.model.default_threshold());
    cfg.validate()?;
    for path in &args.images {
        let img = load_gray(path)?;
        let id = image_id(path);
        let t0 = Instant::now();
        let dets = detect_any(&img, &m.model, &cfg)?;
        let ms = t0.elapsed().as_secs_f64() * 1e3;
        for d in &dets {
            writeln!(out, "{}", detection_line(&id, d))?;
        }
        if args.time {
            writeln!(out, "# time\t{id}\t{ms:.3}")?;
        }
    }
    Ok(())
}
