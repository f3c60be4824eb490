use std::path::Path;
use std::process::{Command, Output};

fn curiosity(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curiosity")).args(args).output().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn exit_codes() {
    let o = curiosity(&["frobnicate"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));

    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope");
    let o = curiosity(&["train", "--data", p(&missing), "--out", p(&dir.path().join("r"))]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("nope"));

    let o = curiosity(&["synth", "--out", p(dir.path()), "--set", "synth.no_such_key=1"]);
    assert_eq!(code(&o), 1);

    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, "{\"id\":\"b\",\"topic\":\"t\",\"aspects\":[],\"messages\":[]}\n").unwrap();
    let o = curiosity(&["ingest", "--input", p(&bad), "--out", p(&dir.path().join("x"))]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains('b'));

    let o = curiosity(&["ingest", "--input", p(&bad), "--adapter", "mystery", "--out", p(&dir.path().join("x"))]);
    assert_ne!(code(&o), 0);
}

#[test]
fn synth_train_evaluate_analyze_report() {
    let root = tempfile::tempdir().unwrap();
    let data = root.path().join("data");
    let run = root.path().join("run");
    let eval = root.path().join("eval");
    let analysis = root.path().join("analysis");
    let report = root.path().join("report");

    let o = curiosity(&["synth", "--out", p(&data), "--dialogs", "30", "--seed", "4"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["dialogs.jsonl", "facts.jsonl", "config.toml"] {
        assert!(data.join(f).exists(), "{f}");
    }

    let again = root.path().join("again");
    let snapshot = data.join("config.toml");
    assert_eq!(code(&curiosity(&["synth", "--config", p(&snapshot), "--out", p(&again)])), 0);
    assert_eq!(std::fs::read(data.join("dialogs.jsonl")).unwrap(), std::fs::read(again.join("dialogs.jsonl")).unwrap());

    let o = curiosity(&[
        "train", "--data", p(&data), "--out", p(&run), "--epochs", "2",
        "--set", "model.word_dim=6", "--set", "model.context_hidden=8", "--set", "model.encoder_hidden=6",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["config.toml", "split.json", "best.ckpt", "metrics.jsonl"] {
        assert!(run.join(f).exists(), "{f}");
    }
    let snap = std::fs::read_to_string(run.join("config.toml")).unwrap();
    assert!(snap.contains("word_dim = 6") && snap.contains("max_epochs = 2"), "{snap}");

    let o = curiosity(&["evaluate", "--data", p(&data), "--run", p(&run), "--out", p(&eval)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(eval.join("table.txt")).unwrap();
    let majority = table.lines().find(|l| l.starts_with("majority")).unwrap();
    assert!(majority.contains("N/A"), "{table}");
    assert!(table.lines().any(|l| l.starts_with("charm")));
    assert!(eval.join("metrics.jsonl").exists() && eval.join("table.json").exists());

    let o = curiosity(&["analyze", "--data", p(&data), "--out", p(&analysis)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(analysis.join("analysis.json").exists());

    let o = curiosity(&[
        "report", "--run", p(&run), "--evaluation", p(&eval), "--analysis", p(&analysis), "--out", p(&report),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(report.join("report.txt")).unwrap();
    assert!(text.contains("majority"));
}

#[test]
fn index_and_ingest_round_trip() {
    let root = tempfile::tempdir().unwrap();
    let data = root.path().join("data");
    assert_eq!(code(&curiosity(&["synth", "--out", p(&data), "--dialogs", "5"])), 0);
    let idx = root.path().join("idx");
    assert_eq!(code(&curiosity(&["index", "--facts", p(&data.join("facts.jsonl")), "--out", p(&idx)])), 0);
    assert!(idx.join("index.json").exists());
    let out = root.path().join("ingested");
    let o = curiosity(&[
        "ingest", "--input", p(&data.join("dialogs.jsonl")), "--facts", p(&data.join("facts.jsonl")), "--out", p(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read(data.join("dialogs.jsonl")).unwrap(), std::fs::read(out.join("dialogs.jsonl")).unwrap());
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("ingest.json")).unwrap()).unwrap();
    assert_eq!(summary["dialogs"], 5);
}
