//! Versioned text model format.
//!
//! ```text
//! pedscan-model 1
//! model_type hog_svm
//! window 32 64
//! hog 8 2 8 9                 (cell block block_stride bins)
//! svm 0.001 20 0              (lambda epochs seed)
//! seed 0
//! dataset_digest <hex>
//! bias <f64>
//! weights 756
//! <one f64 per line>
//! end
//! ```
//!
//! AdaBoost models carry `scales`, `threshold`, `rounds N` and one
//! `round x y scale alpha votes` line per round, `votes` being 256 `+`/`-`
//! characters indexed by LBP code. Reals use the shortest text that parses
//! back to the same bits.

use std::str::FromStr;

use pedscan_core::classify::{
    AdaBoostModel, DetectorModel, HogSvmDetector, LbpAdaBoostDetector, LinearSvmModel, ModelKind, SvmMeta, WeakLearner,
};
use pedscan_core::hog::HogConfig;
use pedscan_core::lbp::LbpFeatureId;

use crate::error::{CliError, CliResult};

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "pedscan-model";

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub model: DetectorModel,
    pub seed: u64,
    /// SHA-256 of the sample index the model was trained on.
    pub dataset_digest: String,
}

/// Shortest round-trip rendering of an f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

pub fn save(m: &ModelFile) -> String {
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    line(format!("{MAGIC} {FORMAT_VERSION}"));
    line(format!("model_type {}", m.model.kind()));
    let (ww, wh) = m.model.window();
    line(format!("window {ww} {wh}"));
    match &m.model {
        DetectorModel::HogSvm(d) => {
            let h = &d.hog;
            line(format!("hog {} {} {} {}", h.cell, h.block, h.block_stride, h.n_bins));
            let meta = &d.svm.meta;
            line(format!("svm {} {} {}", fmt_f64(meta.lambda), meta.epochs, meta.seed));
            line(format!("seed {}", m.seed));
            line(format!("dataset_digest {}", m.dataset_digest));
            line(format!("bias {}", fmt_f64(d.svm.bias)));
            line(format!("weights {}", d.svm.weights.len()));
            for w in &d.svm.weights {
                line(fmt_f64(*w));
            }
        }
        DetectorModel::LbpAdaBoost(d) => {
            let scales: Vec<String> = d.scales.iter().map(|s| s.to_string()).collect();
            line(format!("scales {}", scales.join(" ")));
            line(format!("threshold {}", fmt_f64(d.boost.decision_threshold)));
            line(format!("seed {}", m.seed));
            line(format!("dataset_digest {}", m.dataset_digest));
            line(format!("rounds {}", d.boost.rounds.len()));
            for (wl, alpha) in &d.boost.rounds {
                let votes: String = wl.votes.iter().map(|&v| if v > 0 { '+' } else { '-' }).collect();
                let f = wl.feature;
                line(format!("round {} {} {} {} {votes}", f.x, f.y, f.scale, fmt_f64(*alpha)));
            }
        }
    }
    line("end".into());
    out
}

struct Lines<'a> {
    it: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> CliResult<(usize, &'a str)> {
        self.it
            .next()
            .map(|(n, l)| (n + 1, l))
            .ok_or_else(|| CliError::Input("model file truncated".into()))
    }

    /// Next line, which must start with `key`; returns the remaining fields.
    fn keyed(&mut self, key: &str) -> CliResult<(usize, Vec<&'a str>)> {
        let (n, l) = self.next()?;
        let mut f = l.split(' ');
        if f.next() != Some(key) {
            return Err(bad(n, &format!("expected `{key}`")));
        }
        Ok((n, f.collect()))
    }
}

fn bad(line: usize, why: &str) -> CliError {
    CliError::Input(format!("model file line {line}: {why}"))
}

fn num<T: FromStr>(line: usize, s: &str) -> CliResult<T> {
    s.parse().map_err(|_| bad(line, &format!("bad number {s:?}")))
}

fn arity<'a>(line: usize, f: &[&'a str], n: usize) -> CliResult<()> {
    if f.len() == n {
        Ok(())
    } else {
        Err(bad(line, &format!("expected {n} fields, got {}", f.len())))
    }
}

pub fn load(text: &str) -> CliResult<ModelFile> {
    let mut ls = Lines {
        it: text.lines().enumerate(),
    };
    let (n, f) = ls
        .keyed(MAGIC)
        .map_err(|_| CliError::Input("not a pedscan model file".into()))?;
    arity(n, &f, 1)?;
    let version: u32 = num(n, f[0])?;
    if version != FORMAT_VERSION {
        return Err(CliError::Version(format!(
            "model format version {version} is not supported (expected {FORMAT_VERSION})"
        )));
    }
    let (n, f) = ls.keyed("model_type")?;
    arity(n, &f, 1)?;
    let kind: ModelKind = f[0].parse().map_err(|_| bad(n, "unknown model type"))?;
    let (n, f) = ls.keyed("window")?;
    arity(n, &f, 2)?;
    let (ww, wh): (usize, usize) = (num(n, f[0])?, num(n, f[1])?);

    let (model, seed, dataset_digest) = match kind {
        ModelKind::HogSvm => {
            let (n, f) = ls.keyed("hog")?;
            arity(n, &f, 4)?;
            let hog = HogConfig {
                window_w: ww,
                window_h: wh,
                cell: num(n, f[0])?,
                block: num(n, f[1])?,
                block_stride: num(n, f[2])?,
                n_bins: num(n, f[3])?,
            };
            hog.validate().map_err(|e| bad(n, &e.to_string()))?;
            let (n, f) = ls.keyed("svm")?;
            arity(n, &f, 3)?;
            let meta = SvmMeta {
                lambda: num(n, f[0])?,
                epochs: num(n, f[1])?,
                seed: num(n, f[2])?,
            };
            let (seed, digest) = meta_lines(&mut ls)?;
            let (n, f) = ls.keyed("bias")?;
            arity(n, &f, 1)?;
            let bias: f64 = num(n, f[0])?;
            let (n, f) = ls.keyed("weights")?;
            arity(n, &f, 1)?;
            let len: usize = num(n, f[0])?;
            let mut weights = Vec::with_capacity(len);
            for _ in 0..len {
                let (n, l) = ls.next()?;
                weights.push(num(n, l)?);
            }
            let svm = LinearSvmModel { weights, bias, meta };
            let det = HogSvmDetector::new(hog, svm).map_err(|e| bad(n, &e.to_string()))?;
            (DetectorModel::HogSvm(det), seed, digest)
        }
        ModelKind::LbpAdaBoost => {
            let (n, f) = ls.keyed("scales")?;
            let scales = f.iter().map(|s| num(n, s)).collect::<CliResult<Vec<usize>>>()?;
            let (n, f) = ls.keyed("threshold")?;
            arity(n, &f, 1)?;
            let decision_threshold = num(n, f[0])?;
            let (seed, digest) = meta_lines(&mut ls)?;
            let (n, f) = ls.keyed("rounds")?;
            arity(n, &f, 1)?;
            let count: usize = num(n, f[0])?;
            let mut rounds = Vec::with_capacity(count);
            for _ in 0..count {
                let (n, f) = ls.keyed("round")?;
                arity(n, &f, 5)?;
                let feature = LbpFeatureId {
                    x: num(n, f[0])?,
                    y: num(n, f[1])?,
                    scale: num(n, f[2])?,
                };
                if !feature.fits(ww, wh) {
                    return Err(bad(n, "feature does not fit the window"));
                }
                let alpha: f64 = num(n, f[3])?;
                let v = f[4].as_bytes();
                if v.len() != 256 {
                    return Err(bad(n, "votes must be 256 characters"));
                }
                let mut votes = [0i8; 256];
                for (slot, c) in votes.iter_mut().zip(v) {
                    *slot = match c {
                        b'+' => 1,
                        b'-' => -1,
                        _ => return Err(bad(n, "votes must be + or -")),
                    };
                }
                rounds.push((WeakLearner { feature, votes }, alpha));
            }
            let boost = AdaBoostModel {
                window_w: ww,
                window_h: wh,
                rounds,
                decision_threshold,
            };
            (
                DetectorModel::LbpAdaBoost(LbpAdaBoostDetector { scales, boost }),
                seed,
                digest,
            )
        }
    };
    let (n, f) = ls.keyed("end")?;
    arity(n, &f, 0)?;
    Ok(ModelFile {
        model,
        seed,
        dataset_digest,
    })
}

fn meta_lines(ls: &mut Lines<'_>) -> CliResult<(u64, String)> {
    let (n, f) = ls.keyed("seed")?;
    arity(n, &f, 1)?;
    let seed = num(n, f[0])?;
    let (n, f) = ls.keyed("dataset_digest")?;
    arity(n, &f, 1)?;
    Ok((seed, f[0].to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use pedscan_core::classify::{train_model, TrainConfig};
    use pedscan_core::synth::{patch_set, separable_patch_set};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn round_trip(m: &ModelFile) {
        let text = save(m);
        let back = load(&text).unwrap();
        assert_eq!(&back, m);
        assert_eq!(save(&back), text);
    }

    #[test]
    fn hog_svm_round_trips_bit_exactly() {
        let (pos, neg) = patch_set(6, 6, &mut ChaCha8Rng::seed_from_u64(1));
        let cfg = TrainConfig {
            epochs: 2,
            ..TrainConfig::default()
        };
        let model = train_model(ModelKind::HogSvm, &pos, &neg, &cfg, &[]).unwrap();
        round_trip(&ModelFile {
            model,
            seed: 3,
            dataset_digest: "abc".into(),
        });
    }

    #[test]
    fn adaboost_round_trips() {
        let (pos, neg) = separable_patch_set(6);
        let cfg = TrainConfig {
            n_rounds: 3,
            ..TrainConfig::default()
        };
        let model = train_model(ModelKind::LbpAdaBoost, &pos, &neg, &cfg, &[1, 2]).unwrap();
        round_trip(&ModelFile {
            model,
            seed: 0,
            dataset_digest: "-".into(),
        });
    }

    #[test]
    fn awkward_reals_round_trip() {
        for v in [0.1, -1e-300, 5e-324, 1.7976931348623157e308, 1.0 / 3.0, -0.0] {
            let back: f64 = fmt_f64(v).parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits());
        }
    }

    #[test]
    fn version_and_format_errors() {
        let (pos, neg) = separable_patch_set(4);
        let cfg = TrainConfig {
            n_rounds: 1,
            ..TrainConfig::default()
        };
        let model = train_model(ModelKind::LbpAdaBoost, &pos, &neg, &cfg, &[2]).unwrap();
        let text = save(&ModelFile {
            model,
            seed: 0,
            dataset_digest: "-".into(),
        });
        let v2 = text.replacen("pedscan-model 1", "pedscan-model 2", 1);
        assert_eq!(load(&v2).unwrap_err().exit_code(), 4);
        assert_eq!(load("hello").unwrap_err().exit_code(), 3);
        assert_eq!(load(&text.replace("\nend\n", "\n")).unwrap_err().exit_code(), 3);
        assert_eq!(
            load(&text.replace("\nrounds 1\n", "\nrounds 2\n"))
                .unwrap_err()
                .exit_code(),
            3
        );
    }
}
