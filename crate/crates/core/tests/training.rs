use curiosity::corpus::FactIndex;
use curiosity::data::{generate_synthetic, SyntheticConfig, SyntheticDataset};
use curiosity::eval::evaluate_model;
use curiosity::model::{build_vocabularies, CharmConfig, CharmModel, PreparedDialog};
use curiosity::training::*;

fn dataset(dialogs: usize, seed: u64) -> (SyntheticDataset, FactIndex) {
    let ds = generate_synthetic(&SyntheticConfig { dialogs, seed, ..SyntheticConfig::default() }).unwrap();
    let index = ds.index();
    (ds, index)
}

fn fresh(ds: &SyntheticDataset, index: &FactIndex, config: CharmConfig) -> (CharmModel, Vec<PreparedDialog>) {
    let (w, e) = build_vocabularies(&ds.dialogs, index, 1);
    let model = CharmModel::new(config, w, e).unwrap();
    let prepared = model.prepare(&ds.dialogs, index).unwrap();
    (model, prepared)
}

#[test]
fn default_schedule() {
    let c = TrainConfig::default();
    assert_eq!((c.learning_rate, c.batch_size, c.max_epochs, c.patience), (0.001, 64, 40, 3));
}

#[test]
fn overfits_ten_dialogs() {
    let (ds, index) = dataset(10, 4);
    let (model, data) = fresh(&ds, &index, CharmConfig::small());
    let config = TrainConfig { learning_rate: 0.01, batch_size: 2, max_epochs: 60, patience: 60, ..TrainConfig::default() };
    let out = train(model, &data, &data, &config).unwrap();
    let totals: Vec<f64> = out.log.iter().map(|r| r.train.total).collect();
    for w in totals[..5].windows(2) {
        assert!(w[1] < w[0], "{totals:?}");
    }
    let record = evaluate_model(&out.best.charm, &data, "charm", "train");
    let f1 = record.utterance_act_f1.unwrap();
    assert!(f1 >= 0.95, "utterance F1 {f1}");
    for (k, r) in out.log.iter().enumerate() {
        if r.epoch <= out.best_epoch {
            assert!(out.log[out.best_epoch - 1].validation_sum <= r.validation_sum, "epoch {}", k + 1);
        }
    }
}

#[test]
fn selected_epoch_has_the_lowest_validation_sum() {
    let (ds, index) = dataset(30, 8);
    let (model, data) = fresh(&ds, &index, CharmConfig { init_seed: 2, ..CharmConfig::small() });
    let (tr, va) = data.split_at(24);
    let config = TrainConfig { learning_rate: 0.02, batch_size: 4, max_epochs: 12, ..TrainConfig::default() };
    let out = train(model, tr, va, &config).unwrap();
    let best = out.log.iter().find(|r| r.epoch == out.best_epoch).unwrap().validation_sum;
    assert!(out.log.iter().all(|r| best <= r.validation_sum));
    for r in &out.log {
        assert_eq!(r.validation_sum, selection_loss(&r.validation));
    }
    if out.status == TrainStatus::EarlyStopped {
        assert_eq!(out.log.len(), out.best_epoch + config.patience);
    }
}

#[test]
fn resume_reproduces_the_log() {
    let (ds, index) = dataset(16, 6);
    let (model, data) = fresh(&ds, &index, CharmConfig::small());
    let (tr, va) = data.split_at(12);
    let full_dir = tempfile::tempdir().unwrap();
    let part_dir = tempfile::tempdir().unwrap();
    let base = TrainConfig { batch_size: 4, max_epochs: 5, patience: 10, seed: 3, ..TrainConfig::small() };

    let full = train(model.clone(), tr, va, &TrainConfig { checkpoint_dir: Some(full_dir.path().into()), ..base.clone() }).unwrap();
    let part_cfg = TrainConfig { checkpoint_dir: Some(part_dir.path().into()), ..base.clone() };
    train(model, tr, va, &TrainConfig { max_epochs: 2, ..part_cfg.clone() }).unwrap();
    let resumed = resume(tr, va, &part_cfg).unwrap();

    assert_eq!(full.log.len(), resumed.log.len());
    for (a, b) in full.log.iter().zip(&resumed.log) {
        assert_eq!(a.epoch, b.epoch);
        assert!((a.train.total - b.train.total).abs() < 1e-9);
        assert!((a.validation_sum - b.validation_sum).abs() < 1e-9);
        assert_eq!(a.improved, b.improved);
    }
    assert_eq!(full.best_epoch, resumed.best_epoch);
    let lines = std::fs::read_to_string(part_dir.path().join(METRICS_LOG)).unwrap().lines().count();
    assert_eq!(lines, 5);
    assert!(part_dir.path().join(BEST_CHECKPOINT).exists());
}

#[test]
fn random_initialisation_ranks_like_chance() {
    let (ds, index) = dataset(300, 11);
    let mut sum = 0.0;
    let mut expected = 0.0;
    let seeds = 6;
    for seed in 0..seeds {
        let (model, data) = fresh(&ds, &index, CharmConfig { init_seed: seed, ..CharmConfig::small() });
        sum += evaluate_model(&model.charm, &data, "random", "all").fact_mrr.unwrap();
        let sizes: Vec<usize> = data
            .iter()
            .flat_map(|d| d.turns.iter().filter(|t| t.used.iter().any(|&u| u)).map(|t| t.candidates.len()))
            .collect();
        assert!(sizes.iter().all(|&k| k == 9));
        expected += sizes.iter().map(|&k| (1..=k).map(|r| 1.0 / r as f64).sum::<f64>() / k as f64).sum::<f64>() / sizes.len() as f64;
    }
    let (mrr, expected) = (sum / seeds as f64, expected / seeds as f64);
    assert!((expected - 0.3143).abs() < 1e-4);
    assert!((mrr - expected).abs() < 0.03, "random-init MRR {mrr}");
}

#[test]
fn checkpoint_evaluation_is_deterministic() {
    let (ds, index) = dataset(12, 2);
    let (model, data) = fresh(&ds, &index, CharmConfig { init_seed: 9, ..CharmConfig::small() });
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.ckpt");
    model.save(&path).unwrap();
    let refs: Vec<_> = ds.dialogs.iter().collect();
    let a = evaluate_checkpoint(&path, &refs, &index, "charm", "test").unwrap();
    let b = evaluate_checkpoint(&path, &refs, &index, "charm", "test").unwrap();
    assert_eq!(a, b);
    assert_eq!(a, evaluate_model(&model.charm, &data, "charm", "test"));
    std::fs::write(&path, "not a checkpoint").unwrap();
    assert!(evaluate_checkpoint(&path, &refs, &index, "charm", "test").is_err());
}

#[test]
fn invalid_settings_are_rejected() {
    let (ds, index) = dataset(4, 1);
    let (model, data) = fresh(&ds, &index, CharmConfig::small());
    for bad in [TrainConfig { learning_rate: 0.0, ..TrainConfig::default() }, TrainConfig { batch_size: 0, ..TrainConfig::default() }] {
        assert!(train(model.clone(), &data, &data, &bad).is_err());
    }
    assert!(resume(&data, &data, &TrainConfig::default()).is_err());
}
