#![allow(dead_code)]

pub mod oracles;

use curiosity::data::Sender;
use curiosity::model::tape::Grads;
use curiosity::model::{Charm, TaskCounts};
use curiosity::model::{CharmConfig, EncodedText, PreparedDialog, PreparedTurn};

pub fn tiny_config() -> CharmConfig {
    CharmConfig {
        word_dim: 4,
        entity_dim: 3,
        act_dim: 3,
        speaker_dim: 2,
        encoder_hidden: 3,
        context_hidden: 5,
        fact_context_dim: 3,
        init_seed: 5,
        ..CharmConfig::default()
    }
}

pub fn text(tokens: &[u32], entities: &[u32]) -> EncodedText {
    EncodedText { tokens: tokens.to_vec(), entities: entities.to_vec() }
}

fn turn(speaker: Sender, tokens: &[u32], acts: &[usize], cands: &[usize], used: &[bool], liked: bool) -> PreparedTurn {
    PreparedTurn {
        speaker,
        text: text(tokens, &[]),
        acts: acts.to_vec(),
        liked,
        candidates: cands.to_vec(),
        candidate_ids: cands.iter().map(|c| format!("f{c}")).collect(),
        used: used.to_vec(),
    }
}

/// Three turns with a four-candidate assistant bank.
pub fn tiny_dialog() -> PreparedDialog {
    PreparedDialog {
        id: "g".into(),
        topic: 1,
        known: vec![2, 3],
        turns: vec![
            turn(Sender::User, &[2, 3, 4], &[0, 1], &[], &[], false),
            turn(Sender::Assistant, &[5, 6], &[6, 9], &[0, 1, 2, 3], &[false, true, false, false], true),
            turn(Sender::User, &[3, 7], &[3], &[], &[], false),
        ],
        facts: vec![text(&[2, 5], &[2]), text(&[4, 4], &[]), text(&[6, 3, 7], &[1, 3]), text(&[7], &[3])],
    }
}

pub const TASKS: [&str; 4] = ["fact", "policy", "utterance", "like"];

pub fn task_loss(model: &Charm, d: &PreparedDialog, task: usize) -> f64 {
    let l = model.losses(std::slice::from_ref(d));
    [l.fact, l.policy, l.utterance, l.like][task]
}

/// Largest relative error between analytic and central-difference
/// gradients over every scalar parameter.
pub fn max_relative_error(config: CharmConfig, task: usize) -> f64 {
    let d = tiny_dialog();
    let mut model = Charm::new(config, 9, 5).unwrap();
    let mut grads = Grads::zeros_like(&model.params.params);
    let mut mask = [false; 4];
    mask[task] = true;
    model.accumulate_gradients(&d, TaskCounts::of(&d), mask, &mut grads);

    let h = 1e-3;
    let mut worst: f64 = 0.0;
    for t in 0..model.params.params.tensors().len() {
        let n = model.params.params.tensors()[t].data.len();
        for j in 0..n {
            let orig = model.params.params.tensors()[t].data[j];
            let mut at = |x: f64| {
                model.params.params.tensors_mut()[t].data[j] = x;
                task_loss(&model, &d, task)
            };
            // fourth-order central stencil
            let numeric = (at(orig - 2.0 * h) - 8.0 * at(orig - h) + 8.0 * at(orig + h) - at(orig + 2.0 * h)) / (12.0 * h);
            model.params.params.tensors_mut()[t].data[j] = orig;
            let analytic = grads.data_of(t)[j];
            let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-7);
            worst = worst.max(rel);
        }
    }
    worst
}
