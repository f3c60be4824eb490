//! The `curiosity` command line.
//!
//! Every subcommand writes into an output directory and leaves a resolved
//! `config.toml` there, so any artifact can be regenerated from it. Settings
//! are layered: built-in defaults, then an optional `--config` TOML file, then
//! command-line flags.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::analysis::{analyze_dialogs, alpha_report, paraphrase_stats, parse_paraphrase_labels, AgreementInput};
use crate::corpus::{build_fact_index, read_facts, FactIndex, TokenizerConfig};
use crate::data::{
    generate_synthetic, ingest_dialogs, split_dialogs, write_dialogs, Adapter, DatasetSplit, Dialog, DialogAct, Fold,
    SyntheticConfig,
};
use crate::eval::{emit_experiment_table, evaluate_baseline, evaluate_model, read_records, write_records, MetricRecord};
use crate::model::{build_vocabularies, CharmConfig, CharmModel, MajorityBaseline};
use crate::training::{train, EpochRecord, TrainConfig, TrainStatus, BEST_CHECKPOINT, METRICS_LOG};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// Name of the resolved configuration written by every command.
pub const CONFIG_SNAPSHOT: &str = "config.toml";
pub const SPLIT_FILE: &str = "split.json";

/// Everything a run depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Row label in experiment tables.
    pub name: String,
    /// Train / validation / test fractions.
    pub split: [f64; 3],
    /// Minimum corpus frequency for a word to get its own embedding.
    pub min_count: usize,
    pub synth: SyntheticConfig,
    pub model: CharmConfig,
    pub train: TrainConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            name: "charm".into(),
            split: [0.8, 0.1, 0.1],
            min_count: 1,
            synth: SyntheticConfig::default(),
            model: CharmConfig::small(),
            train: TrainConfig::small(),
        }
    }
}

impl RunConfig {
    /// Layers `file` and then `overrides` (dotted `key=value` pairs) over the
    /// defaults.
    pub fn resolve(base: RunConfig, file: Option<&Path>, overrides: &[(String, String)]) -> Result<RunConfig> {
        let mut merged = toml::Value::try_from(&base).map_err(|e| Error::Config(e.to_string()))?;
        if let Some(path) = file {
            let text = read_text(path)?;
            let table: toml::Table = text.parse()?;
            merge(&mut merged, toml::Value::Table(table));
        }
        for (key, raw) in overrides {
            set_path(&mut merged, key, parse_scalar(raw))?;
        }
        let cfg: RunConfig = merged.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.model.validate()?;
        cfg.train.validate()?;
        cfg.synth.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn write_snapshot(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(CONFIG_SNAPSHOT), self.to_toml()?)?;
        Ok(())
    }

    pub fn load_snapshot(dir: &Path) -> Result<RunConfig> {
        let text = read_text(&dir.join(CONFIG_SNAPSHOT))?;
        toml::from_str(&text).map_err(Error::from)
    }
}

fn merge(into: &mut toml::Value, from: toml::Value) {
    match (into, from) {
        (toml::Value::Table(a), toml::Value::Table(b)) => {
            for (k, v) in b {
                match a.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        a.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

fn parse_scalar(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

fn set_path(root: &mut toml::Value, key: &str, value: toml::Value) -> Result<()> {
    let mut node = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let table = node.as_table_mut().ok_or_else(|| Error::Config(format!("`{key}` is not a table path")))?;
        if i + 1 == parts.len() {
            table.insert(part.to_string(), value);
            return Ok(());
        }
        node = table.entry(part.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
    }
    Err(Error::Config("empty override key".into()))
}

#[derive(Debug, Parser)]
#[command(name = "curiosity", version, about = "Knowledge-grounded dialog toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML file with run settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one setting, e.g. `--set train.learning_rate=0.01`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Seed for generation, initialisation, splitting and shuffling.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a dialog file and write it in canonical form.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "canonical")]
        adapter: String,
        /// Fact corpus to validate and copy alongside the dialogs.
        #[arg(long)]
        facts: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Generate a synthetic corpus with planted preferences.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        dialogs: Option<usize>,
        /// Variant whose fact relevance depends on earlier turns.
        #[arg(long)]
        context_dependent: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Build and serialize the TF-IDF fact index.
    Index {
        #[arg(long)]
        facts: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Train CHARM on a data directory.
    Train {
        /// Directory with `dialogs.jsonl` and `facts.jsonl`.
        #[arg(long)]
        data: PathBuf,
        /// Run directory for checkpoints and logs.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        name: Option<String>,
        /// Train the context-less ablation.
        #[arg(long)]
        no_context: bool,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        learning_rate: Option<f64>,
        #[arg(long)]
        batch_size: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Score trained runs and the majority baseline.
    Evaluate {
        #[arg(long)]
        data: PathBuf,
        /// Run directory; repeat to compare several models.
        #[arg(long = "run", required = true)]
        runs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Skip the majority-class baseline row.
        #[arg(long)]
        no_baseline: bool,
    },
    /// Preference tables, z-tests and agreement statistics.
    Analyze {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// JSONL: one array per item of per-annotator act lists or null.
        #[arg(long)]
        annotations: Option<PathBuf>,
        /// One paraphrase category name per line.
        #[arg(long)]
        paraphrase: Option<PathBuf>,
    },
    /// Combine training curves, tables and analysis into one text report.
    Report {
        #[arg(long = "run")]
        runs: Vec<PathBuf>,
        #[arg(long)]
        evaluation: Option<PathBuf>,
        #[arg(long)]
        analysis: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Runs the CLI on `args` (program name first) and returns the exit status.
pub fn run(args: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Maps an error to its exit status.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => EXIT_USAGE,
        e if e.is_data_error() => EXIT_DATA,
        _ => EXIT_RUNTIME,
    }
}

fn parse_overrides(common: &Common) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for o in &common.overrides {
        let (k, v) = o.split_once('=').ok_or_else(|| Error::Config(format!("override `{o}` needs KEY=VALUE")))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    if let Some(seed) = common.seed {
        for key in ["synth.seed", "model.init_seed", "train.seed"] {
            out.push((key.to_string(), seed.to_string()));
        }
    }
    Ok(out)
}

fn resolve(common: &Common, base: RunConfig, extra: Vec<(String, String)>) -> Result<RunConfig> {
    let mut overrides = parse_overrides(common)?;
    overrides.extend(extra);
    RunConfig::resolve(base, common.config.as_deref(), &overrides)
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Ingest { input, adapter, facts, out, common } => {
            let cfg = resolve(&common, RunConfig::default(), vec![])?;
            let adapter: Adapter = adapter.parse()?;
            let dialogs = ingest_dialogs(require(&input)?, adapter)?;
            fs::create_dir_all(&out)?;
            write_dialogs(&out.join("dialogs.jsonl"), &dialogs)?;
            if let Some(f) = facts {
                let facts = read_facts(require(&f)?)?;
                crate::corpus::write_facts(&out.join("facts.jsonl"), &facts)?;
            }
            let summary = IngestSummary::of(&dialogs);
            fs::write(out.join("ingest.json"), serde_json::to_string_pretty(&summary)?)?;
            cfg.write_snapshot(&out)?;
            print!("{}", summary.to_text());
            Ok(EXIT_OK)
        }
        Command::Synth { out, dialogs, context_dependent, common } => {
            let base = RunConfig {
                synth: if context_dependent { SyntheticConfig::context_dependent() } else { SyntheticConfig::default() },
                ..RunConfig::default()
            };
            let extra = dialogs.map(|n| ("synth.dialogs".to_string(), n.to_string())).into_iter().collect();
            let cfg = resolve(&common, base, extra)?;
            let ds = generate_synthetic(&cfg.synth)?;
            ds.write_to(&out)?;
            cfg.write_snapshot(&out)?;
            println!("wrote {} dialogs and {} facts to {}", ds.dialogs.len(), ds.facts.len(), out.display());
            Ok(EXIT_OK)
        }
        Command::Index { facts, out, common } => {
            let cfg = resolve(&common, RunConfig::default(), vec![])?;
            let index = build_fact_index(read_facts(require(&facts)?)?, TokenizerConfig::default())?;
            fs::create_dir_all(&out)?;
            fs::write(out.join("index.json"), serde_json::to_string(&index)?)?;
            cfg.write_snapshot(&out)?;
            println!("indexed {} facts, {} terms", index.len(), index.vocabulary_size());
            Ok(EXIT_OK)
        }
        Command::Train { data, out, name, no_context, epochs, learning_rate, batch_size, common } => {
            let mut extra = Vec::new();
            let mut push = |k: &str, v: Option<String>| {
                if let Some(v) = v {
                    extra.push((k.to_string(), v));
                }
            };
            push("name", name.map(|n| format!("{n:?}")));
            push("model.use_context", no_context.then(|| "false".to_string()));
            push("train.max_epochs", epochs.map(|v| v.to_string()));
            push("train.learning_rate", learning_rate.map(|v| format!("{v:?}")));
            push("train.batch_size", batch_size.map(|v| v.to_string()));
            let base = RunConfig { name: if no_context { "charm-context".into() } else { "charm".into() }, ..RunConfig::default() };
            let cfg = resolve(&common, base, extra)?;
            cmd_train(&data, &out, cfg)
        }
        Command::Evaluate { data, runs, out, no_baseline } => cmd_evaluate(&data, &runs, &out, !no_baseline),
        Command::Analyze { data, out, annotations, paraphrase } => {
            cmd_analyze(&data, &out, annotations.as_deref(), paraphrase.as_deref())
        }
        Command::Report { runs, evaluation, analysis, out } => {
            let text = build_report(&runs, evaluation.as_deref(), analysis.as_deref())?;
            fs::create_dir_all(&out)?;
            fs::write(out.join("report.txt"), &text)?;
            print!("{text}");
            Ok(EXIT_OK)
        }
    }
}

/// Corpus statistics printed by `ingest`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub dialogs: usize,
    pub messages: usize,
    pub act_counts: BTreeMap<String, usize>,
}

impl IngestSummary {
    pub fn of(dialogs: &[Dialog]) -> Self {
        let mut act_counts: BTreeMap<String, usize> = DialogAct::ALL.iter().map(|a| (a.name().to_string(), 0)).collect();
        let mut messages = 0;
        for d in dialogs {
            messages += d.messages.len();
            for m in &d.messages {
                for a in &m.acts {
                    *act_counts.entry(a.name().to_string()).or_default() += 1;
                }
            }
        }
        IngestSummary { dialogs: dialogs.len(), messages, act_counts }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("dialogs: {}\nmessages: {}\n", self.dialogs, self.messages);
        for (a, n) in &self.act_counts {
            let _ = writeln!(s, "  {a:<28} {n}");
        }
        s
    }
}

fn require(path: &Path) -> Result<&Path> {
    fs::metadata(path).map_err(|source| Error::ReadFile { path: path.to_path_buf(), source })?;
    Ok(path)
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::ReadFile { path: path.to_path_buf(), source })
}

/// Reads `dialogs.jsonl` and `facts.jsonl` from a data directory.
pub fn load_data_dir(dir: &Path) -> Result<(Vec<Dialog>, FactIndex)> {
    let dialogs = ingest_dialogs(require(&dir.join("dialogs.jsonl"))?, Adapter::Canonical)?;
    let index = build_fact_index(read_facts(require(&dir.join("facts.jsonl"))?)?, TokenizerConfig::default())?;
    Ok((dialogs, index))
}

fn cmd_train(data: &Path, out: &Path, mut cfg: RunConfig) -> Result<i32> {
    let (dialogs, index) = load_data_dir(data)?;
    let split = split_dialogs(&dialogs, cfg.split, cfg.train.seed)?;
    let train_d = split.select(Fold::Train, &dialogs);
    let val_d = split.select(Fold::Validation, &dialogs);
    let (words, entities) = build_vocabularies(train_d.iter().copied(), &index, cfg.min_count);
    let model = CharmModel::new(cfg.model.clone(), words, entities)?;
    let train_p = model.prepare(train_d.iter().copied(), &index)?;
    let val_p = model.prepare(val_d.iter().copied(), &index)?;
    cfg.train.checkpoint_dir = None;
    cfg.write_snapshot(out)?;
    fs::write(out.join(SPLIT_FILE), serde_json::to_string_pretty(&split)?)?;
    let tc = TrainConfig { checkpoint_dir: Some(out.to_path_buf()), ..cfg.train.clone() };
    let outcome = train(model, &train_p, &val_p, &tc)?;
    for r in &outcome.log {
        println!(
            "epoch {:>3}  train {:.4}  val {:.4}{}",
            r.epoch,
            crate::training::selection_loss(&r.train),
            r.validation_sum,
            if r.improved { "  *" } else { "" }
        );
    }
    println!("best epoch {} ({:?})", outcome.best_epoch, outcome.status);
    match outcome.status {
        TrainStatus::Diverged { epoch } => {
            eprintln!("error: training diverged at epoch {epoch}; best finite checkpoint kept");
            Ok(EXIT_RUNTIME)
        }
        _ => Ok(EXIT_OK),
    }
}

fn cmd_evaluate(data: &Path, runs: &[PathBuf], out: &Path, with_baseline: bool) -> Result<i32> {
    let (dialogs, index) = load_data_dir(data)?;
    let mut records: Vec<MetricRecord> = Vec::new();
    let mut baseline_split: Option<DatasetSplit> = None;
    for run in runs {
        let cfg = RunConfig::load_snapshot(run)?;
        let split: DatasetSplit = serde_json::from_str(&read_text(&run.join(SPLIT_FILE))?)?;
        let model = CharmModel::load(require(&run.join(BEST_CHECKPOINT))?)?;
        for (fold, name) in [(Fold::Validation, "val"), (Fold::Test, "test")] {
            let prepared = model.prepare(split.select(fold, &dialogs), &index)?;
            records.push(evaluate_model(&model.charm, &prepared, &cfg.name, name));
        }
        baseline_split.get_or_insert(split);
    }
    if with_baseline {
        if let Some(split) = &baseline_split {
            let baseline = MajorityBaseline::fit(split.select(Fold::Train, &dialogs))?;
            for (fold, name) in [(Fold::Validation, "val"), (Fold::Test, "test")] {
                records.push(evaluate_baseline(&baseline, split.select(fold, &dialogs), "majority", name));
            }
        }
    }
    fs::create_dir_all(out)?;
    write_records(&out.join("metrics.jsonl"), &records)?;
    let table = emit_experiment_table(&records);
    fs::write(out.join("table.json"), table.to_json()?)?;
    fs::write(out.join("table.tsv"), table.to_tsv())?;
    fs::write(out.join("table.txt"), table.to_text())?;
    let snapshot = EvaluateSnapshot { data: data.to_path_buf(), runs: runs.to_vec(), baseline: with_baseline };
    fs::write(out.join(CONFIG_SNAPSHOT), toml::to_string_pretty(&snapshot).map_err(|e| Error::Config(e.to_string()))?)?;
    print!("{}", table.to_text());
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct EvaluateSnapshot {
    data: PathBuf,
    runs: Vec<PathBuf>,
    baseline: bool,
}

#[derive(Serialize)]
struct AnalyzeSnapshot {
    data: PathBuf,
    annotations: Option<PathBuf>,
    paraphrase: Option<PathBuf>,
}

/// Reads annotator act labels: each line is a JSON array with one entry per
/// annotator, either a list of act names or `null`.
pub fn read_annotations(path: &Path) -> Result<AgreementInput> {
    let text = read_text(path)?;
    let mut items: Vec<Vec<Option<std::collections::BTreeSet<DialogAct>>>> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let raw: Vec<Option<Vec<String>>> = serde_json::from_str(line)
            .map_err(|source| Error::Parse { path: path.to_path_buf(), line: n + 1, source })?;
        let mut item = Vec::with_capacity(raw.len());
        for a in raw {
            item.push(match a {
                None => None,
                Some(names) => Some(
                    names
                        .iter()
                        .map(|s| s.parse::<DialogAct>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|reason| Error::schema(format!("line {}", n + 1), "annotations", reason))?,
                ),
            });
        }
        items.push(item);
    }
    Ok(AgreementInput::from_multilabel(&items, &DialogAct::ALL))
}

fn cmd_analyze(data: &Path, out: &Path, annotations: Option<&Path>, paraphrase: Option<&Path>) -> Result<i32> {
    let (dialogs, index) = load_data_dir(data)?;
    let mut report = analyze_dialogs(&dialogs, &index)?;
    if let Some(p) = annotations {
        report.agreement = Some(alpha_report(&read_annotations(p)?));
    }
    if let Some(p) = paraphrase {
        let text = read_text(p)?;
        let names: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        report.paraphrase = Some(paraphrase_stats(&parse_paraphrase_labels(&names)?));
    }
    fs::create_dir_all(out)?;
    fs::write(out.join("analysis.json"), serde_json::to_string_pretty(&report)?)?;
    let text = report.to_text();
    fs::write(out.join("analysis.txt"), &text)?;
    let snapshot = AnalyzeSnapshot {
        data: data.to_path_buf(),
        annotations: annotations.map(Path::to_path_buf),
        paraphrase: paraphrase.map(Path::to_path_buf),
    };
    fs::write(out.join(CONFIG_SNAPSHOT), toml::to_string_pretty(&snapshot).map_err(|e| Error::Config(e.to_string()))?)?;
    print!("{text}");
    Ok(EXIT_OK)
}

fn read_epoch_log(run: &Path) -> Result<Vec<EpochRecord>> {
    let text = read_text(&run.join(METRICS_LOG))?;
    text.lines().filter(|l| !l.trim().is_empty()).map(|l| serde_json::from_str(l).map_err(Error::from)).collect()
}

/// Text plot of validation and training loss per epoch.
pub fn loss_curve(log: &[EpochRecord]) -> String {
    let mut s = String::new();
    let hi = log
        .iter()
        .flat_map(|r| [r.validation_sum, crate::training::selection_loss(&r.train)])
        .filter(|x| x.is_finite())
        .fold(0.0f64, f64::max);
    for r in log {
        let v = r.validation_sum;
        let width = if hi > 0.0 && v.is_finite() { (v / hi * 50.0).round() as usize } else { 0 };
        let _ = writeln!(s, "  {:>3} {:>9.4} {}", r.epoch, v, "=".repeat(width));
    }
    s
}

fn build_report(runs: &[PathBuf], evaluation: Option<&Path>, analysis: Option<&Path>) -> Result<String> {
    let mut s = String::new();
    for run in runs {
        let cfg = RunConfig::load_snapshot(run)?;
        let log = read_epoch_log(run)?;
        let best = log.iter().filter(|r| r.improved).map(|r| r.epoch).next_back();
        let _ = writeln!(s, "run {} ({})", cfg.name, run.display());
        let _ = writeln!(s, "  seed {}  epochs {}  best epoch {}", cfg.train.seed, log.len(), best.map_or("-".into(), |e| e.to_string()));
        let _ = writeln!(s, "  validation loss by epoch");
        s.push_str(&loss_curve(&log));
        s.push('\n');
    }
    if let Some(dir) = evaluation {
        let records = read_records(require(&dir.join("metrics.jsonl"))?)?;
        let _ = writeln!(s, "evaluation");
        s.push_str(&emit_experiment_table(&records).to_text());
        s.push('\n');
    }
    if let Some(dir) = analysis {
        let _ = writeln!(s, "analysis");
        s.push_str(&read_text(&dir.join("analysis.txt"))?);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_beat_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("run.toml");
        fs::write(&file, "name = \"from-file\"\n[train]\nlearning_rate = 0.01\nbatch_size = 8\n").unwrap();
        let overrides = vec![("train.batch_size".to_string(), "4".to_string())];
        let cfg = RunConfig::resolve(RunConfig::default(), Some(&file), &overrides).unwrap();
        assert_eq!(cfg.name, "from-file");
        assert_eq!(cfg.train.learning_rate, 0.01);
        assert_eq!(cfg.train.batch_size, 4);
        assert_eq!(cfg.train.max_epochs, RunConfig::default().train.max_epochs);
        assert_eq!(cfg.model, CharmConfig::small());
    }

    #[test]
    fn unknown_keys_are_usage_errors() {
        let overrides = vec![("trian.batch_size".to_string(), "4".to_string())];
        let err = RunConfig::resolve(RunConfig::default(), None, &overrides).unwrap_err();
        assert_eq!(exit_code(&err), EXIT_USAGE);
    }

    #[test]
    fn snapshot_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig { name: "x".into(), ..RunConfig::default() };
        cfg.write_snapshot(dir.path()).unwrap();
        assert_eq!(RunConfig::load_snapshot(dir.path()).unwrap(), cfg);
    }

    #[test]
    fn scalar_parsing() {
        assert_eq!(parse_scalar("3"), toml::Value::Integer(3));
        assert_eq!(parse_scalar("0.5"), toml::Value::Float(0.5));
        assert_eq!(parse_scalar("false"), toml::Value::Boolean(false));
        assert_eq!(parse_scalar("hello"), toml::Value::String("hello".into()));
    }

    #[test]
    fn unknown_subcommand_is_usage() {
        assert_eq!(run(vec!["curiosity".into(), "frobnicate".into()]), EXIT_USAGE);
    }

    #[test]
    fn error_classes() {
        assert_eq!(exit_code(&Error::UnknownFact("f".into())), EXIT_DATA);
        assert_eq!(exit_code(&Error::Diverged { epoch: 2 }), EXIT_RUNTIME);
        assert_eq!(exit_code(&Error::Config("x".into())), EXIT_USAGE);
    }
}
