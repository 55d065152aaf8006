use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use pedscan_core::dataset::{Split, VocOptions};
use pedscan_core::eval::{evaluate, report_csv, series_csv, EvalReport, LabeledImage, ScoredRect};

use crate::args::EvalArgs;
use crate::cmd::detect::{detect_any, load_model};
use crate::cmd::prepare::load_manifest;
use crate::error::{CliError, CliResult};
use crate::imageio::load_gray;
use crate::util::write_text;

pub fn run(args: &EvalArgs, out: &mut dyn Write) -> CliResult<()> {
    let m = load_model(&args.model)?;
    let cfg = args.detect.config(m.model.default_threshold());
    cfg.validate()?;
    let voc = VocOptions {
        include_difficult: !args.exclude_difficult,
    };
    let items = load_manifest(&args.manifest, voc)?;
    let mut dataset = Vec::new();
    let mut dets = BTreeMap::new();
    let mut times = Vec::new();
    for it in items.iter().filter(|a| a.entry.split == Split::Test) {
        let id = it.entry.image_id();
        let img = load_gray(&it.entry.image_path)?;
        let t0 = Instant::now();
        let found = detect_any(&img, &m.model, &cfg)?;
        times.push(t0.elapsed().as_secs_f64() * 1e3);
        let scored: Vec<ScoredRect> = found
            .iter()
            .map(|d| ScoredRect {
                rect: d.rect,
                score: d.score,
            })
            .collect();
        if dets.insert(id.clone(), scored).is_some() {
            return Err(CliError::Input(format!("duplicate test image id {id:?}")));
        }
        dataset.push(LabeledImage {
            image_id: id,
            labels: it.ann.boxes.iter().map(|b| b.rect).collect(),
        });
    }
    if dataset.is_empty() {
        return Err(CliError::Input("manifest has no test split".into()));
    }
    let name = m.model.kind().as_str().to_string();
    let rows = args
        .rule
        .iter()
        .map(|&rule| Ok((name.clone(), evaluate(&dataset, &dets, &times, rule)?)))
        .collect::<CliResult<Vec<(String, EvalReport)>>>()?;
    match &args.out {
        Some(p) => write_text(p, &report_csv(&rows))?,
        None => out.write_all(report_csv(&rows).as_bytes())?,
    }
    if let Some(p) = &args.series {
        write_text(p, &series_csv(&rows))?;
    }
    Ok(())
}
