use pedscan_core::classify::{
    adaboost_train_traced, false_positive_count, train_model, train_with_bootstrap, training_error, ModelKind,
    TrainConfig,
};
use pedscan_core::detector::DetectConfig;
use pedscan_core::lbp::feature_pool;
use pedscan_core::synth::{clutter, patch_set, separable_patch_set};
use pedscan_core::GrayImage;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn person_free(n: usize, seed: u64) -> Vec<GrayImage> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| clutter(160, 120, &mut rng)).collect()
}

#[test]
fn adaboost_separates_fixture_within_ten_rounds() {
    let (pos, neg) = separable_patch_set(20);
    let pool = feature_pool(32, 64, &[1, 2, 4]);
    let cfg = TrainConfig {
        n_rounds: 10,
        ..TrainConfig::default()
    };
    let (_, trace) = adaboost_train_traced(&pos, &neg, &pool, &cfg).unwrap();
    assert!(trace.training_errors.len() <= 10);
    assert_eq!(*trace.training_errors.last().unwrap(), 0.0);
}

#[test]
fn zero_bootstrap_rounds_is_one_pass() {
    let (pos, neg) = patch_set(20, 20, &mut ChaCha8Rng::seed_from_u64(1));
    let cfg = TrainConfig {
        bootstrap_rounds: 0,
        epochs: 5,
        ..TrainConfig::default()
    };
    let (model, trace) = train_with_bootstrap(
        ModelKind::HogSvm,
        &pos,
        &neg,
        &person_free(2, 9),
        &cfg,
        &DetectConfig::default(),
        &[],
    )
    .unwrap();
    assert_eq!(trace.len(), 1);
    assert_eq!(model, train_model(ModelKind::HogSvm, &pos, &neg, &cfg, &[]).unwrap());
}

#[test]
fn bootstrap_round_does_not_add_held_out_false_positives() {
    let (pos, neg) = patch_set(60, 60, &mut ChaCha8Rng::seed_from_u64(2));
    let mining = person_free(6, 10);
    let held_out = person_free(6, 11);
    let dcfg = DetectConfig::default();
    for kind in [ModelKind::HogSvm, ModelKind::LbpAdaBoost] {
        let fp = |rounds: usize| {
            let cfg = TrainConfig {
                bootstrap_rounds: rounds,
                n_rounds: 30,
                ..TrainConfig::default()
            };
            let (m, _) = train_with_bootstrap(kind, &pos, &neg, &mining, &cfg, &dcfg, &[1, 2, 4]).unwrap();
            false_positive_count(&m, &held_out, &dcfg).unwrap()
        };
        let (before, after) = (fp(0), fp(1));
        assert!(after <= before, "{kind}: {before} -> {after}");
    }
}

#[test]
fn training_is_deterministic_in_seed() {
    let (pos, neg) = patch_set(15, 15, &mut ChaCha8Rng::seed_from_u64(4));
    let cfg = TrainConfig {
        seed: 7,
        epochs: 20,
        n_rounds: 5,
        ..TrainConfig::default()
    };
    for kind in [ModelKind::HogSvm, ModelKind::LbpAdaBoost] {
        let a = train_model(kind, &pos, &neg, &cfg, &[2]).unwrap();
        let b = train_model(kind, &pos, &neg, &cfg, &[2]).unwrap();
        assert_eq!(a, b);
        let e = training_error(&a, &pos, &neg).unwrap();
        assert!(e < 0.5);
    }
}

#[test]
fn empty_class_is_rejected() {
    let (pos, _) = patch_set(3, 0, &mut ChaCha8Rng::seed_from_u64(5));
    assert!(train_model(ModelKind::HogSvm, &pos, &[], &TrainConfig::default(), &[]).is_err());
    assert!(train_model(ModelKind::LbpAdaBoost, &[], &pos, &TrainConfig::default(), &[2]).is_err());
}
