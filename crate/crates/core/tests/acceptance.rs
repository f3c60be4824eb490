//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criterion 8 runs only when `CURIOSITY_DATASET_DIR` points at the released
//! dialogs (`curiosity_dialogs.{train,val,test}.json`) plus a canonical
//! `facts.jsonl`.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use common::oracles;
use curiosity::analysis::*;
use curiosity::corpus::*;
use curiosity::data::*;
use curiosity::eval::*;
use curiosity::model::{build_vocabularies, CharmConfig, CharmModel, MajorityBaseline, PreparedDialog};
use curiosity::training::{train, TrainConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const INSTANCES: usize = 200;
const METRIC_TOL: f64 = 1e-9;
const ALPHA_TOL: f64 = 1e-9;
const RETRIEVAL_TOL: f64 = 1e-9;
const MAX_FACTS: usize = 50;
const GRADIENT_REL_TOL: f64 = 1e-4;
const GRADIENT_SECONDS: f64 = 60.0;
const MIN_MRR: f64 = 0.45;
const RANDOM_MRR: f64 = 0.3143;
const MIN_MARGIN: f64 = 0.10;
const LEARN_SECONDS: f64 = 600.0;
const ABLATION_GAP: f64 = 0.02;
const RECOVERY_TOL: f64 = 0.05;
const CELL_N: usize = 1000;
const SIGNIFICANCE: f64 = 0.99;
const SPLIT: [f64; 3] = [0.8, 0.1, 0.1];
const SPLIT_SEED: u64 = 1;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol || (a == b)
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for case in 0..INSTANCES {
        let turns = rng.gen_range(1..10);
        let mut rankings = Vec::new();
        let mut relevant = Vec::new();
        for _ in 0..turns {
            let n = rng.gen_range(1..10);
            let mut r: Vec<String> = (0..n).map(|i| format!("f{i}")).collect();
            rand::seq::SliceRandom::shuffle(r.as_mut_slice(), &mut rng);
            let rel: BTreeSet<String> = (0..n).filter(|_| rng.gen_bool(0.3)).map(|i| format!("f{i}")).collect();
            rankings.push(r);
            relevant.push(rel);
        }
        if let Some(want) = oracles::mrr(&rankings, &relevant) {
            let got = mean_reciprocal_rank(&rankings, &relevant).map_err(|e| e.to_string())?;
            ensure(close(got, want, METRIC_TOL), format!("MRR case {case}: {got} vs {want}"))?;
        }

        let (rows, cols) = (rng.gen_range(1..8), rng.gen_range(1..17));
        let pred: Vec<Vec<f64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen::<f64>()).collect()).collect();
        let gold: Vec<Vec<bool>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_bool(0.4)).collect()).collect();
        let f1 = micro_f1(&pred, &gold, DECISION_THRESHOLD).map_err(|e| e.to_string())?;
        ensure(close(f1, oracles::micro_f1(&pred, &gold), METRIC_TOL), format!("F1 case {case}"))?;
        let acc = accuracy(&pred[0], &gold[0]).map_err(|e| e.to_string())?;
        ensure(close(acc, oracles::accuracy(&pred[0], &gold[0]), METRIC_TOL), format!("accuracy case {case}"))?;

        let (n1, n2) = (rng.gen_range(1..500), rng.gen_range(1..500));
        let (s1, s2) = (rng.gen_range(0..=n1), rng.gen_range(0..=n2));
        let t = two_proportion_z_test(s1, n1, s2, n2).map_err(|e| e.to_string())?;
        let (z, p) = oracles::z_test(s1, n1, s2, n2);
        ensure(close(t.z, z, METRIC_TOL) && close(t.p_value, p, METRIC_TOL), format!("z-test case {case}"))?;

        let coders = rng.gen_range(2..5);
        let units: Vec<Vec<Option<i32>>> = (0..rng.gen_range(1..30))
            .map(|_| (0..coders).map(|_| rng.gen_bool(0.85).then(|| rng.gen_range(0..3))).collect())
            .collect();
        let got = krippendorff_alpha_nominal(&units);
        let want = oracles::alpha(&units);
        let same = match (got, want) {
            (Some(a), Some(b)) => close(a, b, ALPHA_TOL),
            (a, b) => a == b,
        };
        ensure(same, format!("alpha case {case}: {got:?} vs {want:?}"))?;
    }
    Ok(format!("{INSTANCES} random instances per metric, tol {METRIC_TOL:e}"))
}

fn criterion_2() -> Outcome {
    let yes_no = [[true, false], [true, false], [true, true], [true, true]];
    let rows: Vec<Vec<Option<bool>>> = yes_no.iter().map(|r| r.iter().map(|&b| Some(b)).collect()).collect();
    let got = krippendorff_alpha(&AgreementInput { rows: rows.clone() }).ok_or("alpha undefined")?;
    let codes: Vec<Vec<Option<i32>>> = rows.iter().map(|r| r.iter().map(|v| v.map(i32::from)).collect()).collect();
    let want = oracles::alpha(&codes).ok_or("oracle undefined")?;
    ensure(close(got, want, ALPHA_TOL), format!("{got} vs {want}"))?;
    Ok(format!("alpha = {got:.6}, oracle {want:.6}, tol {ALPHA_TOL:e}"))
}

fn random_corpus(rng: &mut ChaCha8Rng) -> Vec<Fact> {
    let words = ["lava", "king", "river", "salt", "port", "tea", "war", "city", "rain", "gold", "fish", "bell", "coast"];
    (0..rng.gen_range(1..=MAX_FACTS))
        .map(|i| Fact {
            id: format!("f{i:02}"),
            topic: "t".into(),
            aspect: format!("a{}", rng.gen_range(0..3)),
            mentioned_entities: (0..rng.gen_range(0..3)).map(|_| format!("e{}", rng.gen_range(0..5))).collect(),
            text: (0..rng.gen_range(1..8)).map(|_| words[rng.gen_range(0..words.len())]).collect::<Vec<_>>().join(" "),
        })
        .collect()
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut full_banks = 0;
    for case in 0..INSTANCES {
        let facts = random_corpus(&mut rng);
        let index = build_fact_index(facts.clone(), TokenizerConfig::default()).map_err(|e| e.to_string())?;
        let query = facts[rng.gen_range(0..facts.len())].text.clone() + " tea";
        let got = index.rank_all(&query);
        let want: BTreeMap<String, f64> = oracles::tfidf_scores(&facts, &query).into_iter().collect();
        for w in got.windows(2) {
            ensure(w[0].score > w[1].score || (w[0].score == w[1].score && w[0].fact_id < w[1].fact_id), "order")?;
        }
        for s in &got {
            ensure(close(s.score, want[&s.fact_id], RETRIEVAL_TOL), format!("case {case}: {}", s.fact_id))?;
        }
        ensure(got.len() == facts.len(), "ranking incomplete")?;

        let known: BTreeSet<String> = (0..rng.gen_range(0..4)).map(|_| format!("e{}", rng.gen_range(0..5))).collect();
        let mut ctx = RetrievalContext::new("t", format!("a{}", rng.gen_range(0..3)), known.clone());
        for f in &facts {
            if rng.gen_bool(0.1) {
                ctx.exhausted.insert(f.id.clone(), 3);
            }
        }
        ctx.push_turn(query);
        let eligible: Vec<&Fact> = facts.iter().filter(|f| ctx.exhausted_count(&f.id) < 3).collect();
        let rooted = eligible.iter().filter(|f| !f.mentioned_entities.is_disjoint(&known)).count();
        let aspect = eligible.iter().filter(|f| f.aspect == ctx.current_aspect).count();
        let bank = select_fact_bank(&index, &ctx, &BankConfig::default());
        if rooted >= 3 && aspect >= 3 && eligible.len() >= 9 {
            full_banks += 1;
            for g in [SlotGroup::Rooted, SlotGroup::Aspect, SlotGroup::General] {
                ensure(bank.group_count(g) == 3, format!("case {case}: {g:?} has {}", bank.group_count(g)))?;
            }
        }
        ensure(bank.len() == eligible.len().min(9), format!("case {case}: bank size {}", bank.len()))?;
    }
    ensure(full_banks >= 20, format!("only {full_banks} corpora exercised the 3/3/3 rule"))?;
    Ok(format!("{INSTANCES} corpora of <= {MAX_FACTS} facts, {full_banks} with full groups, tol {RETRIEVAL_TOL:e}"))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for use_context in [true, false] {
        let config = CharmConfig { use_context, ..common::tiny_config() };
        for (k, name) in common::TASKS.iter().enumerate() {
            let err = common::max_relative_error(config.clone(), k);
            ensure(err <= GRADIENT_REL_TOL, format!("{name}: relative error {err:e}"))?;
            worst = worst.max(err);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < GRADIENT_SECONDS, format!("took {secs:.1}s"))?;
    Ok(format!("max relative error {worst:.2e} <= {GRADIENT_REL_TOL:e}, {secs:.1}s"))
}

struct Trained {
    test_mrr: f64,
    chance: f64,
    best_epoch: usize,
    seconds: f64,
}

fn chance_mrr(data: &[PreparedDialog]) -> f64 {
    let sizes: Vec<usize> = data
        .iter()
        .flat_map(|d| d.turns.iter().filter(|t| t.used.iter().any(|&u| u)).map(|t| t.candidates.len()))
        .collect();
    sizes.iter().map(|&k| (1..=k).map(|r| 1.0 / r as f64).sum::<f64>() / k as f64).sum::<f64>() / sizes.len() as f64
}

fn train_on(synth: &SyntheticConfig, model: CharmConfig) -> Result<Trained, String> {
    let start = Instant::now();
    let ds = generate_synthetic(synth).map_err(|e| e.to_string())?;
    let index = ds.index();
    let split = split_dialogs(&ds.dialogs, SPLIT, SPLIT_SEED).map_err(|e| e.to_string())?;
    let [tr, va, te] = [Fold::Train, Fold::Validation, Fold::Test].map(|f| split.select(f, &ds.dialogs));
    let (w, e) = build_vocabularies(tr.iter().copied(), &index, 1);
    let m = CharmModel::new(model, w, e).map_err(|e| e.to_string())?;
    let prep = |d: &[&Dialog]| m.prepare(d.iter().copied(), &index).map_err(|e| e.to_string());
    let (ptr, pva, pte) = (prep(&tr)?, prep(&va)?, prep(&te)?);
    let out = train(m.clone(), &ptr, &pva, &TrainConfig::small()).map_err(|e| e.to_string())?;
    let record = evaluate_model(&out.best.charm, &pte, "charm", "test");
    Ok(Trained {
        test_mrr: record.fact_mrr.ok_or("no fact turns")?,
        chance: chance_mrr(&pte),
        best_epoch: out.best_epoch,
        seconds: start.elapsed().as_secs_f64(),
    })
}

fn criterion_5() -> Outcome {
    let r = train_on(&SyntheticConfig::default(), CharmConfig::small())?;
    ensure((r.chance - RANDOM_MRR).abs() < 1e-3, format!("chance MRR {:.4}", r.chance))?;
    let detail = format!(
        "test MRR {:.4} (>= {MIN_MRR}), chance {:.4} + {MIN_MARGIN}, best epoch {}, {:.0}s",
        r.test_mrr, r.chance, r.best_epoch, r.seconds
    );
    ensure(r.test_mrr >= MIN_MRR && r.test_mrr >= r.chance + MIN_MARGIN, detail.clone())?;
    ensure(r.seconds <= LEARN_SECONDS, detail.clone())?;
    Ok(detail)
}

fn criterion_6() -> Outcome {
    let synth = SyntheticConfig::context_dependent();
    let full = train_on(&synth, CharmConfig::small())?;
    let ablated = train_on(&synth, CharmConfig { use_context: false, ..CharmConfig::small() })?;
    let gap = full.test_mrr - ablated.test_mrr;
    let detail = format!("full {:.4}, no context {:.4}, gap {gap:.4} (>= {ABLATION_GAP})", full.test_mrr, ablated.test_mrr);
    ensure(gap >= ABLATION_GAP, detail.clone())?;
    Ok(detail)
}

fn criterion_7() -> Outcome {
    let ds = generate_synthetic(&SyntheticConfig::balanced()).map_err(|e| e.to_string())?;
    let index = ds.index();
    let mut worst: f64 = 0.0;
    let explicit = explicit_preference(&ds.dialogs, &index).map_err(|e| e.to_string())?;
    let implicit = implicit_followups(&ds.dialogs, &index).map_err(|e| e.to_string())?;
    for (name, table, planted) in [("like", &explicit, ds.truth.config.like), ("followup", &implicit, ds.truth.config.followup)] {
        for (cell, p) in table.cells.iter().zip(planted.as_array()) {
            ensure(cell.n >= CELL_N, format!("{name} cell has n = {}", cell.n))?;
            let dev = (cell.estimate().unwrap() - p).abs();
            ensure(dev <= RECOVERY_TOL, format!("{name}: {:?} vs planted {p}", cell.estimate()))?;
            worst = worst.max(dev);
        }
    }
    let hi = explicit.cell(SourceLabel { category: FactCategory::Aspect, rooted: true });
    let lo = explicit.cell(SourceLabel { category: FactCategory::General, rooted: false });
    let planted = &ds.truth.config.like;
    ensure(planted.aspect_rooted == 0.9 && planted.general_unrooted == 0.3, "planted contrast is not 0.9 vs 0.3")?;
    let z = two_proportion_z_test(hi.successes, hi.n, lo.successes, lo.n).map_err(|e| e.to_string())?;
    ensure(z.significant(SIGNIFICANCE), format!("p = {}", z.p_value))?;
    Ok(format!("max deviation {worst:.4} (<= {RECOVERY_TOL}), 0.9 vs 0.3: z = {:.1}, p = {:.1e}", z.z, z.p_value))
}

fn released(dir: &Path, fold: &str) -> Result<Vec<Dialog>, String> {
    ingest_dialogs(&dir.join(format!("curiosity_dialogs.{fold}.json")), Adapter::Released).map_err(|e| e.to_string())
}

fn criterion_8(dir: PathBuf) -> Outcome {
    let folds: Vec<(String, Vec<Dialog>)> = ["train", "val", "test", "testzero"]
        .iter()
        .filter(|f| dir.join(format!("curiosity_dialogs.{f}.json")).exists())
        .map(|f| released(&dir, f).map(|d| (f.to_string(), d)))
        .collect::<Result<_, _>>()?;
    let all: Vec<&Dialog> = folds.iter().flat_map(|(_, d)| d).collect();
    let messages: usize = all.iter().map(|d| d.messages.len()).sum();
    ensure((all.len() as f64 / 14_000.0 - 1.0).abs() <= 0.05, format!("{} dialogs", all.len()))?;
    ensure((messages as f64 / 181_000.0 - 1.0).abs() <= 0.05, format!("{messages} utterances"))?;
    let count = |a: DialogAct| all.iter().flat_map(|d| &d.messages).filter(|m| m.acts.contains(&a)).count();
    for (act, want) in [(DialogAct::RequestTopic, 10_789), (DialogAct::InformResponse, 59_269), (DialogAct::FeedbackPositive, 26_946)] {
        ensure(count(act) == want, format!("{} count {} != {want}", act.name(), count(act)))?;
    }

    let fold = |name: &str| folds.iter().find(|(f, _)| f == name).map(|(_, d)| d.as_slice()).ok_or(format!("missing {name} fold"));
    let (tr, va, te) = (fold("train")?, fold("val")?, fold("test")?);
    let baseline = MajorityBaseline::fit(tr).map_err(|e| e.to_string())?;
    let maj = evaluate_baseline(&baseline, te, "majority", "test");
    for (name, got, want) in [
        ("utterance F1", maj.utterance_act_f1, 0.604),
        ("policy F1", maj.policy_act_f1, 0.494),
        ("like accuracy", maj.like_accuracy, 0.681),
    ] {
        let got = got.ok_or(format!("{name} undefined"))?;
        ensure((got - want).abs() <= 0.01, format!("majority {name} {got:.3} vs {want}"))?;
    }

    let index = build_fact_index(read_facts(&dir.join("facts.jsonl")).map_err(|e| e.to_string())?, TokenizerConfig::default())
        .map_err(|e| e.to_string())?;
    let (w, e) = build_vocabularies(tr, &index, 1);
    let m = CharmModel::new(CharmConfig::default(), w, e).map_err(|e| e.to_string())?;
    let prep = |d: &[Dialog]| m.prepare(d, &index).map_err(|e| e.to_string());
    let out = train(m.clone(), &prep(tr)?, &prep(va)?, &TrainConfig::default()).map_err(|e| e.to_string())?;
    let rec = evaluate_model(&out.best.charm, &prep(te)?, "charm", "test");
    let (mrr, f1) = (rec.fact_mrr.unwrap_or(f64::NAN), rec.utterance_act_f1.unwrap_or(f64::NAN));
    let detail = format!("{} dialogs, {messages} utterances, CHARM MRR {mrr:.3}, utterance F1 {f1:.3}", all.len());
    ensure((mrr - 0.546).abs() <= 0.05 && (f1 - 0.847).abs() <= 0.03, detail.clone())?;
    Ok(detail)
}

fn run(n: usize, title: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
    });
    let secs = start.elapsed().as_secs_f64();
    match outcome {
        Ok(detail) => {
            println!("PASS {n} {title}: {detail} [{secs:.1}s]");
            true
        }
        Err(detail) => {
            println!("FAIL {n} {title}: {detail} [{secs:.1}s]");
            false
        }
    }
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let mut ok = true;
    ok &= run(1, "metric oracles", criterion_1);
    ok &= run(2, "agreement table alpha", criterion_2);
    ok &= run(3, "retrieval fidelity", criterion_3);
    ok &= run(4, "gradient correctness", criterion_4);
    ok &= run(5, "learnability", criterion_5);
    ok &= run(6, "ablation direction", criterion_6);
    ok &= run(7, "analysis recovery", criterion_7);
    match std::env::var_os("CURIOSITY_DATASET_DIR") {
        Some(dir) => ok &= run(8, "released dataset", || criterion_8(PathBuf::from(dir))),
        None => println!("SKIP 8 released dataset: CURIOSITY_DATASET_DIR not set"),
    }
    if !ok {
        std::process::exit(1);
    }
}
