#ifndef CURIOSITY_H
#define CURIOSITY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum {
  CURIOSITY_STATUS_OK = 0,
  CURIOSITY_STATUS_NULL_POINTER = 1,
  CURIOSITY_STATUS_INVALID_UTF8 = 2,
  CURIOSITY_STATUS_INVALID_ARGUMENT = 3,
  /**
   * Malformed or inconsistent input data.
   */
  CURIOSITY_STATUS_DATA_ERROR = 4,
  CURIOSITY_STATUS_IO = 5,
  CURIOSITY_STATUS_RUNTIME = 6,
  CURIOSITY_STATUS_PANIC = 7,
} CuriosityStatus;

/**
 * Opaque TF-IDF fact index.
 */
typedef struct CuriosityFactIndex CuriosityFactIndex;

/**
 * Opaque trained CHARM model with its vocabularies.
 */
typedef struct CuriosityModel CuriosityModel;

/**
 * Opaque ranked list of fact ids with scores.
 */
typedef struct CuriosityRanking CuriosityRanking;

/**
 * Task metrics. Metrics that are undefined on the data are NaN.
 */
typedef struct {
  double fact_mrr;
  double utterance_act_f1;
  double policy_act_f1;
  double like_accuracy;
  size_t fact_turns;
  size_t messages;
  size_t assistant_messages;
} CuriosityMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next call into the library from the same thread.
 */
const char *curiosity_last_error(void);

/**
 * Library version as a static string.
 */
const char *curiosity_version(void);

/**
 * Builds an index from a fact corpus file (one JSON fact per line).
 *
 * # Safety
 * `facts_path` must be a valid C string and `out` a valid pointer.
 */
CuriosityStatus curiosity_fact_index_build(const char *facts_path, CuriosityFactIndex **out);

/**
 * Loads an index serialized by `curiosity index`.
 *
 * # Safety
 * `index_path` must be a valid C string and `out` a valid pointer.
 */
CuriosityStatus curiosity_fact_index_load(const char *index_path, CuriosityFactIndex **out);

/**
 * Number of facts in the index.
 *
 * # Safety
 * `index` must come from this library and `out` be a valid pointer.
 */
CuriosityStatus curiosity_fact_index_len(const CuriosityFactIndex *index, size_t *out);

/**
 * Ranks the whole index against `query` by cosine similarity and keeps the
 * best `limit` facts; `limit == 0` keeps all.
 *
 * # Safety
 * `index` must come from this library, `query` be a valid C string and
 * `out` a valid pointer.
 */
CuriosityStatus curiosity_fact_index_rank(const CuriosityFactIndex *index,
                                          const char *query,
                                          size_t limit,
                                          CuriosityRanking **out);

/**
 * # Safety
 * `index` must be NULL or come from this library and not be used afterwards.
 */
void curiosity_fact_index_free(CuriosityFactIndex *index);

/**
 * Number of entries in a ranking; 0 for NULL.
 *
 * # Safety
 * `ranking` must be NULL or come from this library.
 */
size_t curiosity_ranking_len(const CuriosityRanking *ranking);

/**
 * Fact id at position `i`, or NULL when out of range.
 *
 * # Safety
 * `ranking` must be NULL or come from this library.
 */
const char *curiosity_ranking_id(const CuriosityRanking *ranking, size_t i);

/**
 * Score at position `i`, or NaN when out of range.
 *
 * # Safety
 * `ranking` must be NULL or come from this library.
 */
double curiosity_ranking_score(const CuriosityRanking *ranking, size_t i);

/**
 * # Safety
 * `ranking` must be NULL or come from this library and not be used afterwards.
 */
void curiosity_ranking_free(CuriosityRanking *ranking);

/**
 * Loads a checkpoint written by training.
 *
 * # Safety
 * `checkpoint_path` must be a valid C string and `out` a valid pointer.
 */
CuriosityStatus curiosity_model_load(const char *checkpoint_path, CuriosityModel **out);

/**
 * Scores every dialog in a data directory (`dialogs.jsonl` and
 * `facts.jsonl`).
 *
 * # Safety
 * `model` must come from this library, `data_dir` be a valid C string and
 * `out` a valid pointer.
 */
CuriosityStatus curiosity_model_evaluate(const CuriosityModel *model,
                                         const char *data_dir,
                                         CuriosityMetrics *out);

/**
 * # Safety
 * `model` must be NULL or come from this library and not be used afterwards.
 */
void curiosity_model_free(CuriosityModel *model);

/**
 * Mean reciprocal rank from 1-based ranks of the first relevant item.
 * A rank of 0 marks a turn without relevant items and is skipped.
 *
 * # Safety
 * `ranks` must point to `n` values and `out` be a valid pointer.
 */
CuriosityStatus curiosity_mean_reciprocal_rank(const uint32_t *ranks, size_t n, double *out);

/**
 * Micro-averaged F1 over a row-major `rows x labels` matrix of
 * probabilities against 0/1 gold labels, thresholded at 0.5.
 *
 * # Safety
 * `probs` and `gold` must each point to `rows * labels` values and `out` be
 * a valid pointer.
 */
CuriosityStatus curiosity_micro_f1(const double *probs,
                                   const uint8_t *gold,
                                   size_t rows,
                                   size_t labels,
                                   double *out);

/**
 * Binary accuracy of probabilities thresholded at 0.5 against 0/1 labels.
 *
 * # Safety
 * `probs` and `gold` must each point to `n` values and `out` be a valid
 * pointer.
 */
CuriosityStatus curiosity_accuracy(const double *probs, const uint8_t *gold, size_t n, double *out);

/**
 * Two-proportion z-test with pooled variance; writes the z statistic and
 * the two-sided p-value.
 *
 * # Safety
 * `z` and `p_value` must be valid pointers.
 */
CuriosityStatus curiosity_z_test(size_t successes1,
                                 size_t n1,
                                 size_t successes2,
                                 size_t n2,
                                 double *z,
                                 double *p_value);

/**
 * Nominal Krippendorff's alpha over a row-major `units x coders` matrix of
 * category codes; negative codes mark missing values. Writes NaN when alpha
 * is undefined.
 *
 * # Safety
 * `codes` must point to `units * coders` values and `out` be a valid pointer.
 */
CuriosityStatus curiosity_krippendorff_alpha(const int32_t *codes,
                                             size_t units,
                                             size_t coders,
                                             double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CURIOSITY_H */
