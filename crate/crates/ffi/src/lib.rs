//! C interface to the curiosity toolkit.
//!
//! Conventions:
//!
//! - Every fallible function returns a [`CuriosityStatus`]. On failure a
//!   message is kept per thread and can be read with
//!   [`curiosity_last_error`].
//! - Objects are opaque handles created by `*_load`/`*_build` functions and
//!   released by the matching `*_free`. Passing NULL to a `*_free` is a no-op.
//! - Strings are NUL-terminated UTF-8. Strings returned by the library stay
//!   valid until their owning handle is freed.
//! - Panics never cross the boundary; they surface as `CURIOSITY_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use curiosity::analysis::{krippendorff_alpha_nominal, two_proportion_z_test};
use curiosity::corpus::{build_fact_index, read_facts, FactIndex, TokenizerConfig};
use curiosity::eval::{accuracy, evaluate_model, micro_f1, MetricRecord, DECISION_THRESHOLD};
use curiosity::model::CharmModel;
use curiosity::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CuriosityStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    /// Malformed or inconsistent input data.
    DataError = 4,
    Io = 5,
    Runtime = 6,
    Panic = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(CuriosityStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Io(_) | Error::ReadFile { .. } => CuriosityStatus::Io,
            Error::Config(_) | Error::LengthMismatch(_) | Error::EmptyInput(_) | Error::NoCandidates => {
                CuriosityStatus::InvalidArgument
            }
            e if e.is_data_error() => CuriosityStatus::DataError,
            _ => CuriosityStatus::Runtime,
        };
        Failure(status, e.to_string())
    }
}

fn fail<T>(status: CuriosityStatus, msg: &str) -> Result<T, Failure> {
    Err(Failure(status, msg.to_string()))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CuriosityStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            clear_error();
            CuriosityStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CuriosityStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return fail(CuriosityStatus::NullPointer, &format!("{what} is NULL"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(CuriosityStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return fail(CuriosityStatus::NullPointer, &format!("{what} is NULL"));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure(CuriosityStatus::NullPointer, format!("{what} is NULL")))
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn curiosity_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn curiosity_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Opaque TF-IDF fact index.
pub struct CuriosityFactIndex {
    index: FactIndex,
}

/// Opaque ranked list of fact ids with scores.
pub struct CuriosityRanking {
    ids: Vec<CString>,
    scores: Vec<f64>,
}

/// Builds an index from a fact corpus file (one JSON fact per line).
///
/// # Safety
/// `facts_path` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn curiosity_fact_index_build(
    facts_path: *const c_char,
    out: *mut *mut CuriosityFactIndex,
) -> CuriosityStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let path = str_arg(facts_path, "facts_path")?;
        let index = build_fact_index(read_facts(Path::new(path))?, TokenizerConfig::default())?;
        *out = Box::into_raw(Box::new(CuriosityFactIndex { index }));
        Ok(())
    })
}

/// Loads an index serialized by `curiosity index`.
///
/// # Safety
/// `index_path` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn curiosity_fact_index_load(
    index_path: *const c_char,
    out: *mut *mut CuriosityFactIndex,
) -> CuriosityStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let path = str_arg(index_path, "index_path")?;
        let text = std::fs::read_to_string(path).map_err(Error::from)?;
        let index: FactIndex = serde_json::from_str(&text).map_err(Error::from)?;
        *out = Box::into_raw(Box::new(CuriosityFactIndex { index }));
        Ok(())
    })
}

/// Number of facts in the index.
///
/// # Safety
/// `index` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn curiosity_fact_index_len(index: *const CuriosityFactIndex, out: *mut usize) -> CuriosityStatus {
    guard(|| {
        let index = index.as_ref().ok_or_else(|| Failure(CuriosityStatus::NullPointer, "index is NULL".into()))?;
        *out_arg(out, "out")? = index.index.len();
        Ok(())
    })
}

/// Ranks the whole index against `query` by cosine similarity and keeps the
/// best `limit` facts; `limit == 0` keeps all.
///
/// # Safety
/// `index` must come from this library, `query` be a valid C string and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn curiosity_fact_index_rank(
    index: *const CuriosityFactIndex,
    query: *const c_char,
    limit: usize,
    out: *mut *mut CuriosityRanking,
) -> CuriosityStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let index = index.as_ref().ok_or_else(|| Failure(CuriosityStatus::NullPointer, "index is NULL".into()))?;
        let query = str_arg(query, "query")?;
        let mut ranked = index.index.rank_all(query);
        if limit > 0 {
            ranked.truncate(limit);
        }
        let mut ids = Vec::with_capacity(ranked.len());
        let mut scores = Vec::with_capacity(ranked.len());
        for s in ranked {
            ids.push(CString::new(s.fact_id).map_err(|_| Failure(CuriosityStatus::DataError, "fact id holds NUL".into()))?);
            scores.push(s.score);
        }
        *out = Box::into_raw(Box::new(CuriosityRanking { ids, scores }));
        Ok(())
    })
}

/// # Safety
/// `index` must be NULL or come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn curiosity_fact_index_free(index: *mut CuriosityFactIndex) {
    if !index.is_null() {
        drop(Box::from_raw(index));
    }
}

/// Number of entries in a ranking; 0 for NULL.
///
/// # Safety
/// `ranking` must be NULL or come from this library.
#[no_mangle]
pub unsafe extern "C" fn curiosity_ranking_len(ranking: *const CuriosityRanking) -> usize {
    ranking.as_ref().map_or(0, |r| r.ids.len())
}

/// Fact id at position `i`, or NULL when out of range.
///
/// # Safety
/// `ranking` must be NULL or come from this library.
#[no_mangle]
pub unsafe extern "C" fn curiosity_ranking_id(ranking: *const CuriosityRanking, i: usize) -> *const c_char {
    ranking.as_ref().and_then(|r| r.ids.get(i)).map_or(ptr::null(), |s| s.as_ptr())
}

/// Score at position `i`, or NaN when out of range.
///
/// # Safety
/// `ranking` must be NULL or come from this library.
#[no_mangle]
pub unsafe extern "C" fn curiosity_ranking_score(ranking: *const CuriosityRanking, i: usize) -> f64 {
    ranking.as_ref().and_then(|r| r.scores.get(i).copied()).unwrap_or(f64::NAN)
}

/// # Safety
/// `ranking` must be NULL or come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn curiosity_ranking_free(ranking: *mut CuriosityRanking) {
    if !ranking.is_null() {
        drop(Box::from_raw(ranking));
    }
}

/// Opaque trained CHARM model with its vocabularies.
pub struct CuriosityModel {
    model: CharmModel,
}

/// Task metrics. Metrics that are undefined on the data are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CuriosityMetrics {
    pub fact_mrr: f64,
    pub utterance_act_f1: f64,
    pub policy_act_f1: f64,
    pub like_accuracy: f64,
    pub fact_turns: usize,
    pub messages: usize,
    pub assistant_messages: usize,
}

impl From<&MetricRecord> for CuriosityMetrics {
    fn from(r: &MetricRecord) -> Self {
        let v = |x: Option<f64>| x.unwrap_or(f64::NAN);
        CuriosityMetrics {
            fact_mrr: v(r.fact_mrr),
            utterance_act_f1: v(r.utterance_act_f1),
            policy_act_f1: v(r.policy_act_f1),
            like_accuracy: v(r.like_accuracy),
            fact_turns: r.fact_turns,
            messages: r.messages,
            assistant_messages: r.assistant_messages,
        }
    }
}

/// Loads a checkpoint written by training.
///
/// # Safety
/// `checkpoint_path` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn curiosity_model_load(
    checkpoint_path: *const c_char,
    out: *mut *mut CuriosityModel,
) -> CuriosityStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let path = str_arg(checkpoint_path, "checkpoint_path")?;
        let model = CharmModel::load(Path::new(path))?;
        *out = Box::into_raw(Box::new(CuriosityModel { model }));
        Ok(())
    })
}

/// Scores every dialog in a data directory (`dialogs.jsonl` and
/// `facts.jsonl`).
///
/// # Safety
/// `model` must come from this library, `data_dir` be a valid C string and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn curiosity_model_evaluate(
    model: *const CuriosityModel,
    data_dir: *const c_char,
    out: *mut CuriosityMetrics,
) -> CuriosityStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| Failure(CuriosityStatus::NullPointer, "model is NULL".into()))?;
        let dir = str_arg(data_dir, "data_dir")?;
        let out = out_arg(out, "out")?;
        let (dialogs, index) = curiosity::cli::load_data_dir(Path::new(dir))?;
        let prepared = model.model.prepare(&dialogs, &index)?;
        *out = (&evaluate_model(&model.model.charm, &prepared, "charm", "all")).into();
        Ok(())
    })
}

/// # Safety
/// `model` must be NULL or come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn curiosity_model_free(model: *mut CuriosityModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Mean reciprocal rank from 1-based ranks of the first relevant item.
/// A rank of 0 marks a turn without relevant items and is skipped.
///
/// # Safety
/// `ranks` must point to `n` values and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn curiosity_mean_reciprocal_rank(ranks: *const u32, n: usize, out: *mut f64) -> CuriosityStatus {
    guard(|| {
        let ranks = slice_arg(ranks, n, "ranks")?;
        let out = out_arg(out, "out")?;
        let mut sum = 0.0;
        let mut count = 0usize;
        for &r in ranks.iter().filter(|&&r| r > 0) {
            sum += 1.0 / f64::from(r);
            count += 1;
        }
        if count == 0 {
            return fail(CuriosityStatus::InvalidArgument, "no turn has a relevant item");
        }
        *out = sum / count as f64;
        Ok(())
    })
}

/// Micro-averaged F1 over a row-major `rows x labels` matrix of
/// probabilities against 0/1 gold labels, thresholded at 0.5.
///
/// # Safety
/// `probs` and `gold` must each point to `rows * labels` values and `out` be
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn curiosity_micro_f1(
    probs: *const f64,
    gold: *const u8,
    rows: usize,
    labels: usize,
    out: *mut f64,
) -> CuriosityStatus {
    guard(|| {
        let len = rows.checked_mul(labels).ok_or_else(|| Failure(CuriosityStatus::InvalidArgument, "size overflow".into()))?;
        let probs = slice_arg(probs, len, "probs")?;
        let gold = slice_arg(gold, len, "gold")?;
        let out = out_arg(out, "out")?;
        if labels == 0 {
            return fail(CuriosityStatus::InvalidArgument, "labels must be positive");
        }
        let p: Vec<Vec<f64>> = probs.chunks(labels).map(<[f64]>::to_vec).collect();
        let g: Vec<Vec<bool>> = gold.chunks(labels).map(|c| c.iter().map(|&x| x != 0).collect()).collect();
        *out = micro_f1(&p, &g, DECISION_THRESHOLD)?;
        Ok(())
    })
}

/// Binary accuracy of probabilities thresholded at 0.5 against 0/1 labels.
///
/// # Safety
/// `probs` and `gold` must each point to `n` values and `out` be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn curiosity_accuracy(probs: *const f64, gold: *const u8, n: usize, out: *mut f64) -> CuriosityStatus {
    guard(|| {
        let probs = slice_arg(probs, n, "probs")?;
        let gold: Vec<bool> = slice_arg(gold, n, "gold")?.iter().map(|&x| x != 0).collect();
        *out_arg(out, "out")? = accuracy(probs, &gold)?;
        Ok(())
    })
}

/// Two-proportion z-test with pooled variance; writes the z statistic and
/// the two-sided p-value.
///
/// # Safety
/// `z` and `p_value` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn curiosity_z_test(
    successes1: usize,
    n1: usize,
    successes2: usize,
    n2: usize,
    z: *mut f64,
    p_value: *mut f64,
) -> CuriosityStatus {
    guard(|| {
        let z = out_arg(z, "z")?;
        let p_value = out_arg(p_value, "p_value")?;
        let t = two_proportion_z_test(successes1, n1, successes2, n2)?;
        *z = t.z;
        *p_value = t.p_value;
        Ok(())
    })
}

/// Nominal Krippendorff's alpha over a row-major `units x coders` matrix of
/// category codes; negative codes mark missing values. Writes NaN when alpha
/// is undefined.
///
/// # Safety
/// `codes` must point to `units * coders` values and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn curiosity_krippendorff_alpha(
    codes: *const i32,
    units: usize,
    coders: usize,
    out: *mut f64,
) -> CuriosityStatus {
    guard(|| {
        let len = units.checked_mul(coders).ok_or_else(|| Failure(CuriosityStatus::InvalidArgument, "size overflow".into()))?;
        let codes = slice_arg(codes, len, "codes")?;
        let out = out_arg(out, "out")?;
        if coders == 0 {
            return fail(CuriosityStatus::InvalidArgument, "coders must be positive");
        }
        let rows: Vec<Vec<Option<i32>>> =
            codes.chunks(coders).map(|c| c.iter().map(|&v| (v >= 0).then_some(v)).collect()).collect();
        *out = krippendorff_alpha_nominal(&rows).unwrap_or(f64::NAN);
        Ok(())
    })
}
