use std::collections::BTreeSet;

use curiosity::analysis::{explicit_preference, implicit_followups};
use curiosity::corpus::FactCategory;
use curiosity::data::*;
use proptest::prelude::*;

fn small(dialogs: usize, seed: u64) -> SyntheticDataset {
    generate_synthetic(&SyntheticConfig { dialogs, seed, ..SyntheticConfig::default() }).unwrap()
}

#[test]
fn minimal_handcrafted_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.jsonl");
    std::fs::write(
        &path,
        r#"{"id":"x1","topic":"peru","aspects":["history","culture"],"known_entities":["lima"],"messages":[{"sender":"user","text":"Tell me about Peru","acts":["request_topic"]},{"sender":"assistant","text":"Peru is in South America.","acts":["inform_response"],"liked":true}]}"#,
    )
    .unwrap();
    let ds = ingest_dialogs(&path, Adapter::Canonical).unwrap();
    assert_eq!(ds.len(), 1);
    let d = &ds[0];
    assert_eq!(d.id, "x1");
    assert_eq!(d.aspects, ["history", "culture"]);
    assert_eq!(d.messages.len(), 2);
    assert_eq!(d.messages[0].sender, Sender::User);
    assert!(d.messages[0].acts.contains(&DialogAct::RequestTopic));
    assert!(d.messages[1].liked);
}

#[test]
fn schema_errors_name_the_dialog() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.jsonl");
    std::fs::write(
        &path,
        "{\"id\":\"good\",\"topic\":\"t\",\"aspects\":[\"a\",\"b\"],\"messages\":[{\"sender\":\"user\",\"text\":\"hi\"}]}\n\
         {\"id\":\"bad\",\"topic\":\"t\",\"aspects\":[\"a\"],\"messages\":[{\"sender\":\"user\",\"text\":\"hi\"}]}\n",
    )
    .unwrap();
    let msg = ingest_dialogs(&path, Adapter::Canonical).unwrap_err().to_string();
    assert!(msg.contains("bad") && msg.contains("aspects"), "{msg}");
    assert!("weird".parse::<Adapter>().is_err());
}

#[test]
fn hundred_dialogs_split_eighty_ten_ten() {
    let ds = small(100, 3);
    let s = split_dialogs(&ds.dialogs, [0.8, 0.1, 0.1], 5).unwrap();
    assert_eq!((s.train.len(), s.validation.len(), s.test.len()), (80, 10, 10));
    let all = split_dialogs(&ds.dialogs, [1.0, 0.0, 0.0], 5).unwrap();
    assert_eq!(all.train.len(), 100);
    assert!(split_dialogs(&[], [0.8, 0.1, 0.1], 0).unwrap().train.is_empty());
}

#[test]
fn planted_like_rates_are_recovered() {
    let ds = generate_synthetic(&SyntheticConfig::balanced()).unwrap();
    let index = ds.index();
    let table = explicit_preference(&ds.dialogs, &index).unwrap();
    let planted = ds.truth.config.like;
    for (cell, p) in table.cells.iter().zip(planted.as_array()) {
        assert!((cell.estimate().unwrap() - p).abs() <= 0.05, "{cell:?} vs {p}");
    }
    let follow = implicit_followups(&ds.dialogs, &index).unwrap();
    for (cell, p) in follow.cells.iter().zip(ds.truth.config.followup.as_array()) {
        assert!((cell.estimate().unwrap() - p).abs() <= 0.05, "{cell:?} vs {p}");
    }
}

#[test]
fn generation_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    small(15, 9).write_to(a.path()).unwrap();
    small(15, 9).write_to(b.path()).unwrap();
    for entry in std::fs::read_dir(a.path()).unwrap() {
        let name = entry.unwrap().file_name();
        assert_eq!(std::fs::read(a.path().join(&name)).unwrap(), std::fs::read(b.path().join(&name)).unwrap());
    }
    assert!(small(0, 1).dialogs.is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn ingest_round_trip(seed in any::<u64>(), n in 1usize..12) {
        let ds = small(n, seed);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dialogs.jsonl");
        write_dialogs(&path, &ds.dialogs).unwrap();
        let back = ingest_dialogs(&path, Adapter::Canonical).unwrap();
        prop_assert_eq!(&back, &ds.dialogs);
        let again = dir.path().join("again.jsonl");
        write_dialogs(&again, &back).unwrap();
        prop_assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
    }

    #[test]
    fn splits_partition(n in 0usize..60, seed in any::<u64>(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let ds = small(n, 2);
        let (a, b) = if a + b > 1.0 { (1.0 - a, 1.0 - b) } else { (a, b) };
        let ratios = [a, b, 1.0 - a - b];
        let s = split_dialogs(&ds.dialogs, ratios, seed).unwrap();
        prop_assert_eq!(&s, &split_dialogs(&ds.dialogs, ratios, seed).unwrap());
        prop_assert!(s.train.is_disjoint(&s.validation));
        prop_assert!(s.train.is_disjoint(&s.test));
        prop_assert!(s.validation.is_disjoint(&s.test));
        let union: BTreeSet<&String> = s.train.iter().chain(&s.validation).chain(&s.test).collect();
        let ids: BTreeSet<&String> = ds.dialogs.iter().map(|d| &d.id).collect();
        prop_assert_eq!(union, ids);
        let sizes = apportion(n, ratios);
        prop_assert_eq!(sizes.iter().sum::<usize>(), n);
        for (size, r) in sizes.iter().zip(ratios) {
            prop_assert!((*size as f64 - r * n as f64).abs() < 1.0 + 1e-9);
        }
    }

    #[test]
    fn labels_match_planted_records(seed in any::<u64>()) {
        let ds = small(8, seed);
        let index = ds.index();
        for (dialog, truth) in ds.dialogs.iter().zip(&ds.truth.dialogs) {
            prop_assert_eq!(&dialog.id, &truth.dialog_id);
            let labels = label_fact_sources(dialog, &index).unwrap();
            prop_assert_eq!(labels.len(), truth.messages.len());
            for (got, want) in labels.iter().zip(&truth.messages) {
                prop_assert_eq!(got, &want.shown);
            }
            prop_assert_eq!(&labels, &label_fact_sources(dialog, &index).unwrap());
            for (msg, got) in dialog.messages.iter().zip(&labels) {
                for (id, label) in got {
                    let fact = index.fact(id).unwrap();
                    prop_assert_eq!(label.category == FactCategory::Aspect, dialog.aspects.contains(&fact.aspect));
                    prop_assert_eq!(label.rooted, !fact.mentioned_entities.is_disjoint(&dialog.known_entities));
                }
                prop_assert_eq!(got.is_empty(), msg.shown_facts.as_ref().is_none_or(|b| b.is_empty()));
            }
        }
    }

    #[test]
    fn synthetic_dialogs_are_well_formed(seed in any::<u64>()) {
        let ds = small(10, seed);
        for d in &ds.dialogs {
            prop_assert!(d.is_valid(), "{:?}", d.diagnostics());
            prop_assert_eq!(d.aspects.len(), 2);
            prop_assert!(!d.messages.is_empty());
            for w in d.messages.windows(2) {
                prop_assert_ne!(w[0].sender, w[1].sender);
            }
            for m in &d.messages {
                let shown: BTreeSet<&str> = m.shown_facts.iter().flat_map(|b| b.ids()).collect();
                prop_assert!(m.used_fact_ids.iter().all(|id| shown.contains(id.as_str())));
                if !m.is_assistant() {
                    prop_assert!(!m.liked && m.shown_facts.is_none());
                }
            }
        }
    }
}
