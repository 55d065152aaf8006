use std::io::Write;
use std::path::Path;

use pedscan_core::classify::{train_with_bootstrap, TrainConfig};
use pedscan_core::GrayImage;

use crate::args::TrainArgs;
use crate::cmd::prepare::{INDEX_FILE, NEG_IMAGES_FILE};
use crate::error::{CliError, CliResult};
use crate::imageio::load_gray;
use crate::model_file::{fmt_f64, save, ModelFile};
use crate::util::{read_text, sha256_hex, write_text};

pub struct Samples {
    pub positives: Vec<GrayImage>,
    pub negatives: Vec<GrayImage>,
    pub negative_images: Vec<GrayImage>,
    pub digest: String,
}

pub fn load_samples(dir: &Path) -> CliResult<Samples> {
    let index = read_text(&dir.join(INDEX_FILE))?;
    let (mut positives, mut negatives) = (Vec::new(), Vec::new());
    for (n, line) in index.lines().enumerate() {
        let (label, rel) = line
            .split_once('\t')
            .ok_or_else(|| CliError::Input(format!("{INDEX_FILE} line {}: expected label and path", n + 1)))?;
        let img = load_gray(&dir.join(rel))?;
        match label {
            "pos" => positives.push(img),
            "neg" => negatives.push(img),
            other => {
                return Err(CliError::Input(format!(
                    "{INDEX_FILE} line {}: bad label {other:?}",
                    n + 1
                )))
            }
        }
    }
    let neg_list = dir.join(NEG_IMAGES_FILE);
    let negative_images = if neg_list.exists() {
        read_text(&neg_list)?
            .lines()
            .filter(|l| !l.is_empty())
            .map(|l| load_gray(Path::new(l)))
            .collect::<CliResult<_>>()?
    } else {
        Vec::new()
    };
    Ok(Samples {
        positives,
        negatives,
        negative_images,
        digest: sha256_hex(index.as_bytes()),
    })
}

pub fn run(args: &TrainArgs, out: &mut dyn Write) -> CliResult<()> {
    let s = load_samples(&args.samples)?;
    let (ww, wh) = args.detect.window;
    if let Some(p) = s
        .positives
        .iter()
        .chain(&s.negatives)
        .find(|p| (p.width(), p.height()) != (ww, wh))
    {
        return Err(CliError::Input(format!(
            "sample is {}x{}, window is {ww}x{wh}",
            p.width(),
            p.height()
        )));
    }
    let cfg = TrainConfig {
        lambda: args.lambda,
        epochs: args.epochs,
        n_rounds: args.rounds,
        bootstrap_rounds: args.bootstrap_rounds,
        negatives_per_round: args.negatives_per_round,
        seed: args.seed,
    };
    // both model kinds decide at 0; mining runs at the same threshold
    let dcfg = args.detect.config(0.0);
    dcfg.validate()?;
    let (model, trace) = train_with_bootstrap(
        args.model_type,
        &s.positives,
        &s.negatives,
        &s.negative_images,
        &cfg,
        &dcfg,
        &args.scales,
    )?;
    writeln!(out, "round,n_negatives,mined,false_positives,fppi,training_error")?;
    for r in &trace {
        writeln!(
            out,
            "{},{},{},{},{:.6},{:.6}",
            r.round, r.n_negatives, r.mined, r.false_positives, r.fppi, r.training_error
        )?;
    }
    let final_err = trace.last().map_or(0.0, |r| r.training_error);
    writeln!(out, "training_error {}", fmt_f64(final_err))?;
    let file = ModelFile {
        model,
        seed: args.seed,
        dataset_digest: s.digest,
    };
    write_text(&args.out, &save(&file))
}
