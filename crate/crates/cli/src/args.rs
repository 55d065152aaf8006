//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use pedscan_core::classify::ModelKind;
use pedscan_core::detector::DetectConfig;
use pedscan_core::eval::MatchRule;

#[derive(Debug, Parser)]
#[command(
    name = "pedscan",
    version,
    about = "CPU pedestrian detection: batch-LBP + AdaBoost and LUT HOG + linear SVM"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract 32x64 training patches from an annotated manifest and print corpus statistics.
    Prepare(PrepareArgs),
    /// Train a detector from prepared samples.
    Train(TrainArgs),
    /// Run a detector over images and print one line per detection.
    Detect(DetectArgs),
    /// Detect over the test split of a manifest and report FPPI / miss rate.
    Eval(EvalArgs),
    /// Time full-frame detection.
    Bench(BenchArgs),
    /// Write a synthetic annotated corpus (PNG + INRIA-style annotations + manifest).
    Synth(SynthArgs),
}

/// Parses `WxH`.
pub fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got {s:?}"))?;
    let w: usize = w.trim().parse().map_err(|_| format!("bad width in {s:?}"))?;
    let h: usize = h.trim().parse().map_err(|_| format!("bad height in {s:?}"))?;
    if w == 0 || h == 0 {
        return Err(format!("size must be positive, got {s:?}"));
    }
    Ok((w, h))
}

#[derive(Debug, Clone, Args)]
pub struct DetectFlags {
    /// Detection window.
    #[arg(long, value_parser = parse_size, default_value = "32x64")]
    pub window: (usize, usize),
    /// Scan step in pixels.
    #[arg(long, default_value_t = 8)]
    pub step: usize,
    #[arg(long, default_value_t = 1.2)]
    pub scale_factor: f64,
    #[arg(long, default_value_t = 64)]
    pub max_levels: usize,
    /// Score threshold (default: the model's own).
    #[arg(long, allow_negative_numbers = true)]
    pub threshold: Option<f64>,
    /// NMS IoU limit.
    #[arg(long, default_value_t = 0.5)]
    pub nms_overlap: f64,
}

impl DetectFlags {
    pub fn config(&self, default_threshold: f64) -> DetectConfig {
        DetectConfig {
            window_w: self.window.0,
            window_h: self.window.1,
            step: self.step,
            scale_factor: self.scale_factor,
            max_levels: self.max_levels,
            score_threshold: self.threshold.unwrap_or(default_threshold),
            nms_overlap: self.nms_overlap,
        }
    }
}

impl Default for DetectFlags {
    fn default() -> Self {
        DetectFlags {
            window: (32, 64),
            step: 8,
            scale_factor: 1.2,
            max_levels: 64,
            threshold: None,
            nms_overlap: 0.5,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct PrepareArgs {
    /// Manifest: `<train|test>\t<image>\t<annotation or ->` per line.
    pub manifest: PathBuf,
    /// Output directory for patches, index.tsv and negimages.txt.
    #[arg(long, short)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Initial negatives per positive.
    #[arg(long, default_value_t = 2)]
    pub neg_ratio: usize,
    /// Drop VOC objects flagged difficult.
    #[arg(long)]
    pub exclude_difficult: bool,
    /// Only count annotations; write no patches.
    #[arg(long)]
    pub stats_only: bool,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    /// Directory written by `prepare`.
    pub samples: PathBuf,
    #[arg(long, value_parser = parse_kind)]
    pub model_type: ModelKind,
    /// Output model file.
    #[arg(long, short)]
    pub out: PathBuf,
    /// AdaBoost rounds.
    #[arg(long, default_value_t = 50)]
    pub rounds: usize,
    #[arg(long, default_value_t = 2)]
    pub bootstrap_rounds: usize,
    /// Hard negatives mined per bootstrap round (0: initial negative count).
    #[arg(long, default_value_t = 0)]
    pub negatives_per_round: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// SVM regularisation.
    #[arg(long, default_value_t = 1e-3)]
    pub lambda: f64,
    /// SVM epochs.
    #[arg(long, default_value_t = 20)]
    pub epochs: usize,
    /// LBP batch edge lengths in the AdaBoost feature pool.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
    pub scales: Vec<usize>,
    #[command(flatten)]
    pub detect: DetectFlags,
}

#[derive(Debug, Clone, Args)]
pub struct DetectArgs {
    #[arg(long, short)]
    pub model: PathBuf,
    #[arg(required = true)]
    pub images: Vec<PathBuf>,
    /// Append a `# time` line with per-image milliseconds.
    #[arg(long)]
    pub time: bool,
    #[command(flatten)]
    pub detect: DetectFlags,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[arg(long, short)]
    pub model: PathBuf,
    pub manifest: PathBuf,
    /// Match rule; repeat for one report row per rule.
    #[arg(long, value_parser = parse_rule, default_value = "paper")]
    pub rule: Vec<MatchRule>,
    /// Report CSV path (default: stdout).
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Speed/quality series CSV path.
    #[arg(long)]
    pub series: Option<PathBuf>,
    #[arg(long)]
    pub exclude_difficult: bool,
    #[command(flatten)]
    pub detect: DetectFlags,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, short)]
    pub model: PathBuf,
    #[arg(long, value_parser = parse_size, default_value = "640x480")]
    pub size: (usize, usize),
    #[arg(long, default_value_t = 10)]
    pub frames: usize,
    /// Seed for synthesized frames.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also time the HOG direct path against the lookup table.
    #[arg(long)]
    pub compare_lut: bool,
    /// Benchmark CSV path (default: stdout).
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Frames to load instead of synthesizing (resized to --size).
    #[arg(long)]
    pub images: Vec<PathBuf>,
    #[command(flatten)]
    pub detect: DetectFlags,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long, short)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub train: usize,
    #[arg(long, default_value_t = 10)]
    pub test: usize,
    /// Person-free training images.
    #[arg(long, default_value_t = 5)]
    pub person_free: usize,
    #[arg(long, value_parser = parse_size, default_value = "320x240")]
    pub size: (usize, usize),
    #[arg(long, default_value_t = 3)]
    pub figures: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn parse_kind(s: &str) -> Result<ModelKind, String> {
    s.parse()
        .map_err(|_| format!("unknown model type {s:?} (hog_svm or lbp_adaboost)"))
}

fn parse_rule(s: &str) -> Result<MatchRule, String> {
    s.parse().map_err(|_| format!("unknown rule {s:?} (paper or iou)"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_is_well_formed() {
        Cli::command().debug_assert();
    }

    #[test]
    fn sizes() {
        assert_eq!(parse_size("32x64"), Ok((32, 64)));
        assert!(parse_size("32").is_err());
        assert!(parse_size("0x4").is_err());
    }

    #[test]
    fn repeated_rules() {
        let c = Cli::try_parse_from(["pedscan", "eval", "-m", "m", "x", "--rule", "paper", "--rule", "iou"]).unwrap();
        match c.command {
            Command::Eval(e) => assert_eq!(e.rule, vec![MatchRule::Paper, MatchRule::Iou]),
            _ => unreachable!(),
        }
    }
}
