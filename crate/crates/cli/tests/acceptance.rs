//! Acceptance suite: one line per criterion.
//!
//! Corpus-dependent checks read `PEDSCAN_INRIA_MANIFEST` and
//! `PEDSCAN_VOC_MANIFEST`; without them those lines report BLOCKED and do not
//! fail the run. Any FAIL makes the process exit non-zero.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use pedscan::cmd::bench::{bench_frames, compare_lut, synth_frames};
use pedscan::cmd::prepare::{corpus_stats, load_manifest};
use pedscan_core::classify::{
    adaboost_train_traced, false_positive_count, svm_score, svm_train, train_model, train_with_bootstrap,
    DetectorModel, ModelKind, TrainConfig,
};
use pedscan_core::dataset::{extract_positives, sample_negatives, Split, VocOptions};
use pedscan_core::detector::DetectConfig;
use pedscan_core::eval::{evaluate, is_match, LabeledImage, MatchRule, ScoredRect};
use pedscan_core::hog::{window_descriptor, window_descriptor_direct, GradientLut, HogConfig};
use pedscan_core::lbp::{
    feature_pool, lbp_map_direct, lbp_map_integral, lbp_map_integral_counted, lbp_map_single_pixel_counted, LbpConfig,
    OpCount,
};
use pedscan_core::synth::{clutter, patch_set, separable_patch_set};
use pedscan_core::{GrayImage, IntegralImage, Rect};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

enum Outcome {
    Pass(String),
    Fail(String),
    Blocked(String),
}

use Outcome::*;

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Pass(detail)
    } else {
        Fail(detail)
    }
}

fn random_image(w: usize, h: usize, rng: &mut ChaCha8Rng) -> GrayImage {
    GrayImage::from_fn(w, h, |_, _| rng.gen())
}

fn c1_lbp_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut mismatches = 0;
    let mut maps = 0;
    for _ in 0..100 {
        let img = random_image(64, 64, &mut rng);
        for e in [1, 2, 4] {
            for cfg in [LbpConfig::square(e), LbpConfig::tiled(e)] {
                maps += 1;
                if lbp_map_integral(&img, &cfg).unwrap() != lbp_map_direct(&img, &cfg).unwrap() {
                    mismatches += 1;
                }
            }
        }
    }
    verdict(
        mismatches == 0,
        format!("{maps} maps (dense and tiled), {mismatches} mismatches"),
    )
}

fn c2_integral_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut checked, mut bad) = (0u64, 0u64);
    let n = 32;
    for _ in 0..50 {
        let img = random_image(n, n, &mut rng);
        let ii = IntegralImage::new(&img);
        // every rect anchored at (x0, y0), grown one row/column at a time
        for y0 in 0..n {
            for x0 in 0..n {
                let mut cols = vec![0u64; n];
                for y1 in y0..n {
                    let mut run = 0u64;
                    for x1 in x0..n {
                        cols[x1] += img.get(x1, y1) as u64;
                        run += cols[x1];
                        checked += 1;
                        let r = Rect::new(x0, y0, x1 - x0 + 1, y1 - y0 + 1);
                        if ii.rect_sum(&r).unwrap() != run {
                            bad += 1;
                        }
                    }
                }
            }
        }
    }
    verdict(bad == 0, format!("{checked} rects, {bad} mismatches"))
}

fn c3_hog_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cfg = HogConfig::default();
    let lut = GradientLut::new(&cfg);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let img = random_image(64, 96, &mut rng);
        let r = Rect::new(rng.gen_range(0..=32), rng.gen_range(0..=32), 32, 64);
        let a = window_descriptor(&img, &r, &cfg, &lut).unwrap();
        let b = window_descriptor_direct(&img, &r, &cfg).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            worst = worst.max((x - y).abs());
        }
    }
    verdict(
        worst <= 1e-6,
        format!("100 windows, max |lut - direct| = {worst:.3e} (tol 1e-6)"),
    )
}

fn c4_complexity() -> Outcome {
    let img = random_image(640, 480, &mut ChaCha8Rng::seed_from_u64(4));
    let s = (img.width() * img.height()) as u64;
    let mut batch = OpCount::default();
    lbp_map_integral_counted(&img, &LbpConfig::tiled(2), &mut batch).unwrap();
    let mut single = OpCount::default();
    lbp_map_single_pixel_counted(&img, &mut single);
    let (b, p) = (batch.model_cost(), single.model_cost());
    verdict(
        b <= 3 * s && p >= 8 * s,
        format!(
            "S={s}: batch 2x2 = {b} ({:.3} S; {} adds + {} comparisons, {} table lookups), single-pixel = {p} ({:.3} S)",
            b as f64 / s as f64,
            batch.integral_adds,
            batch.comparisons,
            batch.batch_lookups,
            p as f64 / s as f64
        ),
    )
}

fn c5_lut_speed() -> Outcome {
    let frames = synth_frames(320, 240, 4, 5);
    // best of three to damp scheduler noise
    let runs: Vec<_> = (0..3).map(|i| compare_lut(&frames, 1000, 50 + i).unwrap()).collect();
    let lut = runs.iter().map(|c| c.lut_ms).fold(f64::INFINITY, f64::min);
    let direct = runs.iter().map(|c| c.direct_ms).fold(f64::INFINITY, f64::min);
    verdict(
        lut <= direct,
        format!(
            "1000 windows: lut {lut:.2} ms, direct {direct:.2} ms, speedup {:.2}x (reference figure 1.10x)",
            direct / lut
        ),
    )
}

fn c6_fps() -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    pool.install(|| {
        let (pos, neg) = patch_set(300, 600, &mut ChaCha8Rng::seed_from_u64(6));
        let cfg = TrainConfig::default();
        let hog = train_model(ModelKind::HogSvm, &pos, &neg, &cfg, &[]).unwrap();
        let lbp = train_model(ModelKind::LbpAdaBoost, &pos, &neg, &cfg, &[1, 2, 4]).unwrap();
        let rounds = match &lbp {
            DetectorModel::LbpAdaBoost(m) => m.boost.rounds.len(),
            _ => unreachable!(),
        };
        let frames = synth_frames(640, 480, 10, 6);
        let dcfg = DetectConfig::default();
        let fps = |m: &DetectorModel| {
            (0..3)
                .map(|_| bench_frames(m, &frames, &dcfg).unwrap().fps)
                .fold(0.0, f64::max)
        };
        let (fh, fl) = (fps(&hog), fps(&lbp));
        verdict(
            fh >= 5.0 && fl >= fh,
            format!("640x480, 1 thread: hog_svm {fh:.1} fps, lbp_adaboost {fl:.1} fps ({rounds} rounds)"),
        )
    })
}

fn env_manifest(var: &str) -> Option<PathBuf> {
    std::env::var_os(var).map(PathBuf::from).filter(|p| p.exists())
}

fn c7a_inria_cv() -> Outcome {
    let Some(manifest) = env_manifest("PEDSCAN_INRIA_MANIFEST") else {
        return Blocked("INRIA corpus not available (set PEDSCAN_INRIA_MANIFEST)".into());
    };
    let items = load_manifest(&manifest, VocOptions::default()).unwrap();
    let mut images = Vec::new();
    let mut boxes = Vec::new();
    let mut pos = Vec::new();
    for it in items.iter().filter(|a| a.entry.split == Split::Train) {
        let img = pedscan::imageio::load_gray(&it.entry.image_path).unwrap();
        let b: Vec<_> = it
            .ann
            .boxes
            .iter()
            .filter(|b| b.rect.fits_in(img.width(), img.height()))
            .cloned()
            .collect();
        pos.extend(extract_positives(&img, &b).unwrap());
        boxes.push(b.iter().map(|g| g.rect).collect());
        images.push(img);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    pos.shuffle(&mut rng);
    pos.truncate(500);
    let neg = sample_negatives(&images, &boxes, 500, 7).unwrap();
    if pos.len() < 500 {
        return Fail(format!("only {} positives available", pos.len()));
    }
    let acc = cross_validate(&pos, &neg, 5, 7);
    verdict(
        acc >= 0.90,
        format!("5-fold HOG+SVM patch accuracy {:.2}% on 500/500", acc * 100.0),
    )
}

/// Mean k-fold accuracy of HOG + linear SVM on window patches.
fn cross_validate(pos: &[GrayImage], neg: &[GrayImage], k: usize, seed: u64) -> f64 {
    let hog = HogConfig::default();
    let lut = GradientLut::new(&hog);
    let desc = |p: &GrayImage| {
        window_descriptor(p, &Rect::new(0, 0, 32, 64), &hog, &lut)
            .unwrap()
            .values
    };
    let pd: Vec<Vec<f64>> = pos.iter().map(desc).collect();
    let nd: Vec<Vec<f64>> = neg.iter().map(desc).collect();
    let cfg = TrainConfig {
        seed,
        ..TrainConfig::default()
    };
    let (mut right, mut total) = (0, 0);
    for f in 0..k {
        let split = |v: &[Vec<f64>]| {
            let (mut tr, mut te) = (Vec::new(), Vec::new());
            for (i, x) in v.iter().enumerate() {
                if i % k == f {
                    te.push(x.clone())
                } else {
                    tr.push(x.clone())
                }
            }
            (tr, te)
        };
        let (ptr, pte) = split(&pd);
        let (ntr, nte) = split(&nd);
        let m = svm_train(&ptr, &ntr, &cfg).unwrap();
        right += pte.iter().filter(|x| svm_score(&m, x).unwrap() > 0.0).count();
        right += nte.iter().filter(|x| svm_score(&m, x).unwrap() <= 0.0).count();
        total += pte.len() + nte.len();
    }
    right as f64 / total as f64
}

fn c7b_bootstrap() -> Outcome {
    let (pos, neg) = patch_set(100, 100, &mut ChaCha8Rng::seed_from_u64(8));
    let mut rng = ChaCha8Rng::seed_from_u64(80);
    let mining: Vec<GrayImage> = (0..8).map(|_| clutter(320, 240, &mut rng)).collect();
    let held_out: Vec<GrayImage> = (0..8).map(|_| clutter(320, 240, &mut rng)).collect();
    let dcfg = DetectConfig::default();
    let fp = |rounds: usize| {
        let cfg = TrainConfig {
            bootstrap_rounds: rounds,
            ..TrainConfig::default()
        };
        let (m, _) = train_with_bootstrap(ModelKind::HogSvm, &pos, &neg, &mining, &cfg, &dcfg, &[]).unwrap();
        false_positive_count(&m, &held_out, &dcfg).unwrap()
    };
    let (before, after) = (fp(0), fp(1));
    verdict(
        after <= before,
        format!("held-out false positives {before} -> {after} after one round"),
    )
}

fn c7c_adaboost_fixture() -> Outcome {
    let (pos, neg) = separable_patch_set(20);
    let pool = feature_pool(32, 64, &[1, 2, 4]);
    let cfg = TrainConfig {
        n_rounds: 10,
        ..TrainConfig::default()
    };
    let (_, trace) = adaboost_train_traced(&pos, &neg, &pool, &cfg).unwrap();
    let zero_at = trace.training_errors.iter().position(|&e| e == 0.0);
    verdict(
        zero_at.is_some_and(|r| r < 10),
        format!("training errors {:?}", trace.training_errors),
    )
}

fn c8_eval_fixture() -> Outcome {
    let li = |id: &str, labels: Vec<Rect>| LabeledImage {
        image_id: id.into(),
        labels,
    };
    let sr = |x, y, score| ScoredRect {
        rect: Rect::new(x, y, 20, 40),
        score,
    };
    let ds = vec![
        li("a", vec![Rect::new(0, 0, 20, 40)]),
        li("b", vec![Rect::new(0, 0, 20, 40), Rect::new(100, 0, 20, 40)]),
        li("c", vec![Rect::new(5, 5, 20, 40)]),
    ];
    let mut dets = BTreeMap::new();
    dets.insert("a".to_string(), vec![sr(0, 0, 2.0), sr(200, 200, 1.0)]);
    dets.insert("b".to_string(), vec![sr(2, 2, 1.0), sr(300, 0, 0.5)]);
    dets.insert("c".to_string(), vec![sr(5, 5, 1.0)]);
    let r = evaluate(&ds, &dets, &[], MatchRule::Paper).unwrap();
    let half = !is_match(&Rect::new(0, 0, 20, 40), &Rect::new(10, 0, 20, 40), MatchRule::Paper);
    verdict(
        r.avg_fppi == 2.0 / 3.0 && r.miss_rate == 0.25 && half,
        format!(
            "avg_fppi {} (want 2/3), miss_rate {} (want 0.25), half-overlap non-match: {half}",
            r.avg_fppi, r.miss_rate
        ),
    )
}

fn c9_table() -> Outcome {
    let inria = env_manifest("PEDSCAN_INRIA_MANIFEST");
    let voc = env_manifest("PEDSCAN_VOC_MANIFEST");
    if inria.is_none() && voc.is_none() {
        return Blocked(
            "INRIA and VOC corpora not available (set PEDSCAN_INRIA_MANIFEST / PEDSCAN_VOC_MANIFEST)".into(),
        );
    }
    let mut ok = true;
    let mut notes = Vec::new();
    if let Some(m) = inria {
        let (s, _) = corpus_stats(&load_manifest(&m, VocOptions::default()).unwrap());
        let got = (s.n_train_images, s.n_train_labels, s.n_test_images, s.n_test_labels);
        ok &= got == (614, 1958, 288, 605);
        notes.push(format!("INRIA {got:?} want (614, 1958, 288, 605)"));
    } else {
        ok = false;
        notes.push("INRIA missing".into());
    }
    if let Some(m) = voc {
        for include_difficult in [true, false] {
            let (s, _) = corpus_stats(&load_manifest(&m, VocOptions { include_difficult }).unwrap());
            let got = (s.n_train_images, s.n_train_labels);
            notes.push(format!("VOC difficult={include_difficult} {got:?} want (6095, 13256)"));
            if include_difficult {
                ok &= got == (6095, 13256);
            }
        }
    } else {
        ok = false;
        notes.push("VOC missing".into());
    }
    verdict(ok, notes.join("; "))
}

fn pedscan(threads: usize, dir: &Path, args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_pedscan"))
        .args(args)
        .current_dir(dir)
        .env("PEDSCAN_THREADS", threads.to_string())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "pedscan {args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

/// Drops the trailing wall-clock column of report rows.
fn mask_time(report: &[u8]) -> String {
    String::from_utf8_lossy(report)
        .lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head).to_string())
        .collect::<Vec<_>>()
        .join("\n")
}

fn pipeline_outputs(threads: usize, root: &Path) -> Vec<(String, Vec<u8>)> {
    let dir = root.join(format!("t{threads}"));
    fs::create_dir_all(&dir).unwrap();
    let mut outs = Vec::new();
    pedscan(
        threads,
        &dir,
        &[
            "synth",
            "-o",
            "corpus",
            "--train",
            "12",
            "--test",
            "6",
            "--person-free",
            "4",
            "--seed",
            "10",
        ],
    );
    outs.push((
        "prepare".into(),
        pedscan(
            threads,
            &dir,
            &["prepare", "corpus/manifest.tsv", "-o", "samples", "--seed", "10"],
        ),
    ));
    outs.push(("index".into(), fs::read(dir.join("samples/index.tsv")).unwrap()));
    for kind in ["hog_svm", "lbp_adaboost"] {
        let model = format!("{kind}.model");
        outs.push((
            format!("train {kind}"),
            pedscan(
                threads,
                &dir,
                &[
                    "train",
                    "samples",
                    "--model-type",
                    kind,
                    "-o",
                    &model,
                    "--seed",
                    "10",
                    "--rounds",
                    "20",
                ],
            ),
        ));
        outs.push((format!("model {kind}"), fs::read(dir.join(&model)).unwrap()));
        let imgs: Vec<String> = (0..3).map(|i| format!("corpus/images/test_{i:04}.png")).collect();
        let mut args = vec!["detect", "-m", model.as_str()];
        args.extend(imgs.iter().map(String::as_str));
        outs.push((format!("detect {kind}"), pedscan(threads, &dir, &args)));
        let report = pedscan(
            threads,
            &dir,
            &[
                "eval",
                "-m",
                &model,
                "corpus/manifest.tsv",
                "--rule",
                "paper",
                "--rule",
                "iou",
            ],
        );
        outs.push((format!("eval {kind}"), mask_time(&report).into_bytes()));
    }
    outs
}

fn c10_determinism() -> Outcome {
    let root = tempfile::tempdir().unwrap();
    let runs: Vec<_> = [1, 4, 1, 4]
        .iter()
        .enumerate()
        .map(|(i, &t)| pipeline_outputs(t, &root.path().join(format!("run{i}"))))
        .collect();
    let mut diffs = Vec::new();
    for r in &runs[1..] {
        for ((name, a), (_, b)) in runs[0].iter().zip(r) {
            if a != b && !diffs.contains(name) {
                diffs.push(name.clone());
            }
        }
    }
    let n = runs[0].len();
    verdict(
        diffs.is_empty(),
        if diffs.is_empty() {
            format!("{n} outputs identical over 2 runs x PEDSCAN_THREADS {{1, 4}} (eval timing column excluded)")
        } else {
            format!("differing outputs: {diffs:?}")
        },
    )
}

fn main() {
    let criteria: Vec<(&str, &str, fn() -> Outcome)> = vec![
        ("1", "LBP integral == direct", c1_lbp_oracle),
        ("2", "rect_sum == brute force", c2_integral_oracle),
        ("3", "HOG LUT == direct", c3_hog_oracle),
        ("4", "batch LBP cost <= 3S, single-pixel >= 8S", c4_complexity),
        ("5", "LUT HOG not slower than direct", c5_lut_speed),
        ("6", "detect fps >= 5, LBP >= HOG", c6_fps),
        ("7a", "INRIA 5-fold accuracy >= 90%", c7a_inria_cv),
        ("7b", "bootstrap round does not add false positives", c7b_bootstrap),
        (
            "7c",
            "AdaBoost zero training error within 10 rounds",
            c7c_adaboost_fixture,
        ),
        ("8", "evaluation fixture", c8_eval_fixture),
        ("9", "corpus statistics table", c9_table),
        ("10", "determinism", c10_determinism),
    ];
    let (mut failed, mut blocked) = (0, 0);
    for (id, name, f) in criteria {
        let t0 = Instant::now();
        let outcome = f();
        let secs = t0.elapsed().as_secs_f64();
        // the oracle checks carry a 10 s budget
        let outcome = match outcome {
            Pass(d) if ["1", "2", "3"].contains(&id) && secs >= 10.0 => Fail(format!("{d}; over the 10 s budget")),
            o => o,
        };
        let (tag, detail) = match outcome {
            Pass(d) => ("PASS", d),
            Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Blocked(d) => {
                blocked += 1;
                ("BLOCKED", d)
            }
        };
        println!("[{tag}] {id:>3} {name}: {detail} ({secs:.2} s)");
    }
    println!("acceptance: {failed} failed, {blocked} blocked");
    if failed > 0 {
        std::process::exit(1);
    }
}
