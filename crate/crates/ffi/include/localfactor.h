#ifndef LOCALFACTOR_H
#define LOCALFACTOR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LfStatus {
  LF_STATUS_OK = 0,
  LF_STATUS_NULL_POINTER = 1,
  LF_STATUS_INVALID_ARGUMENT = 2,
  /**
   * A mathematical precondition failed: parity, domain, l-range, ...
   */
  LF_STATUS_PRECONDITION = 3,
  LF_STATUS_NOT_CONVERGED = 4,
  LF_STATUS_NOT_FOUND = 5,
  LF_STATUS_IO = 6,
  LF_STATUS_PANIC = 7,
} LfStatus;

typedef enum LfModel {
  LF_MODEL_ER = 0,
  LF_MODEL_REG = 1,
} LfModel;

/**
 * A simple graph.
 */
typedef struct LfGraph LfGraph;

/**
 * A built-in local rule.
 */
typedef struct LfRule LfRule;

/**
 * Bernoulli Monte Carlo estimate.
 */
typedef struct LfEstimate {
  double value;
  double std_error;
  uint64_t hits;
  uint64_t trials;
} LfEstimate;

typedef struct LfWindow {
  uint64_t d;
  double beta;
  /**
   * Meaningful only when `has_window` is true.
   */
  double zhat_max;
  bool has_window;
  double theoretical_bound;
  bool empty_by_theory;
} LfWindow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *lf_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *lf_version(void);

/**
 * Samples a d-regular configuration-model graph (projected to simple).
 *
 * # Safety
 * `out_graph` must be a valid pointer; the handle written there must be
 * released with `lf_graph_free`.
 */
enum LfStatus lf_graph_regular(size_t n, size_t d, uint64_t seed, struct LfGraph **out_graph);

/**
 * Samples G(n, d/n).
 *
 * # Safety
 * As for `lf_graph_regular`.
 */
enum LfStatus lf_graph_er(size_t n, double d, uint64_t seed, struct LfGraph **out_graph);

/**
 * Builds a graph from `edge_count` pairs `(edges[2i], edges[2i+1])`.
 *
 * # Safety
 * `edges` must point to `2 * edge_count` readable values (it may be null when
 * `edge_count` is 0); `out_graph` as for `lf_graph_regular`.
 */
enum LfStatus lf_graph_from_edges(size_t n,
                                  const size_t *edges,
                                  size_t edge_count,
                                  struct LfGraph **out_graph);

/**
 * # Safety
 * `graph` must be null or a handle from this library not yet freed.
 */
void lf_graph_free(struct LfGraph *graph);

/**
 * Vertex count, 0 for a null handle.
 *
 * # Safety
 * `graph` must be null or a live handle.
 */
size_t lf_graph_vertex_count(const struct LfGraph *graph);

/**
 * Edge count, 0 for a null handle.
 *
 * # Safety
 * `graph` must be null or a live handle.
 */
size_t lf_graph_edge_count(const struct LfGraph *graph);

/**
 * Copies up to `capacity` sorted neighbours of `v` into `buf` and writes the
 * full degree to `out_degree`.
 *
 * # Safety
 * `graph` must be a live handle, `buf` must have room for `capacity` values
 * (null allowed when `capacity` is 0) and `out_degree` must be valid.
 */
enum LfStatus lf_graph_neighbors(const struct LfGraph *graph,
                                 size_t v,
                                 size_t *buf,
                                 size_t capacity,
                                 size_t *out_degree);

/**
 * Fraction of vertices whose radius-r ball is the canonical tree T_{d,r}.
 *
 * # Safety
 * `graph` must be a live handle and `out_fraction` valid.
 */
enum LfStatus lf_graph_tree_fraction(const struct LfGraph *graph,
                                     size_t d,
                                     size_t r,
                                     double *out_fraction);

/**
 * Parses `rule=<family>;r=<radius>;params=<k=v>`.
 *
 * # Safety
 * `descriptor` must be a NUL-terminated string; `out_rule` must be valid and
 * the handle written there released with `lf_rule_free`.
 */
enum LfStatus lf_rule_parse(const char *descriptor, struct LfRule **out_rule);

/**
 * # Safety
 * `rule` must be null or a handle from `lf_rule_parse` not yet freed.
 */
void lf_rule_free(struct LfRule *rule);

/**
 * Locality radius, 0 for a null handle.
 *
 * # Safety
 * `rule` must be null or a live handle.
 */
size_t lf_rule_radius(const struct LfRule *rule);

/**
 * Runs the rule on every vertex. `mask_out[v]` is set to 1 for members and
 * 0 otherwise; the member count goes to `out_size`.
 *
 * # Safety
 * `labels` and `mask_out` must each hold `n` values with `n` equal to the
 * graph's vertex count; all handles must be live.
 */
enum LfStatus lf_rule_run(const struct LfRule *rule,
                          const struct LfGraph *graph,
                          const double *labels,
                          size_t n,
                          uint8_t *mask_out,
                          size_t *out_size);

/**
 * Root-acceptance probability on the canonical tree.
 *
 * # Safety
 * `rule` must be a live handle and `out_estimate` valid.
 */
enum LfStatus lf_estimate_density(const struct LfRule *rule,
                                  size_t d,
                                  uint64_t trials,
                                  uint64_t seed,
                                  struct LfEstimate *out_estimate);

/**
 * γ(p) on the canonical tree; the same seed as `lf_estimate_density` gives
 * identical counts at p = 1.
 *
 * # Safety
 * As for `lf_estimate_density`.
 */
enum LfStatus lf_estimate_gamma(const struct LfRule *rule,
                                size_t d,
                                double p,
                                uint64_t trials,
                                uint64_t seed,
                                struct LfEstimate *out_estimate);

/**
 * ln E|Overlap(n, d, m, k)| in G(n, d/n).
 *
 * # Safety
 * `out_log` must be valid.
 */
enum LfStatus lf_log_expected_overlap_er(uint64_t n,
                                         double d,
                                         uint64_t m,
                                         uint64_t k,
                                         double *out_log);

/**
 * ln E|A(m, k, l)| in the configuration model.
 *
 * # Safety
 * `out_log` must be valid.
 */
enum LfStatus lf_log_expected_overlap_reg(uint64_t n,
                                          uint64_t d,
                                          uint64_t m,
                                          uint64_t k,
                                          uint64_t l,
                                          double *out_log);

/**
 * ln E|Overlap_d(n, m, k)|, summed over all feasible l.
 *
 * # Safety
 * `out_log` must be valid.
 */
enum LfStatus lf_log_expected_overlap_reg_total(uint64_t n,
                                                uint64_t d,
                                                uint64_t m,
                                                uint64_t k,
                                                double *out_log);

/**
 * # Safety
 * `out_value` must be valid.
 */
enum LfStatus lf_rate_er(double s, double x, double d, double *out_value);

/**
 * # Safety
 * `out_value` must be valid.
 */
enum LfStatus lf_rate_reg(double s, double x, double y, double d, double *out_value);

/**
 * # Safety
 * `out_y` and `out_value` must be valid.
 */
enum LfStatus lf_max_rate_reg_over_y(double s,
                                     double x,
                                     double d,
                                     double *out_y,
                                     double *out_value);

/**
 * # Safety
 * `out_window` must be valid.
 */
enum LfStatus lf_forbidden_window(uint64_t d,
                                  double beta,
                                  enum LfModel model,
                                  size_t grid_points,
                                  struct LfWindow *out_window);

/**
 * # Safety
 * `out_d` must be valid.
 */
enum LfStatus lf_min_d_for_window(double beta,
                                  double zhat_target,
                                  enum LfModel model,
                                  size_t grid_points,
                                  uint64_t d_ceiling,
                                  uint64_t *out_d);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOCALFACTOR_H */
