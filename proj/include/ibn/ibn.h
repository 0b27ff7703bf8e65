/* C interface to the ibn library. All functions return an ibn_status;
 * on failure a message is available from ibn_last_error() on the same
 * thread. Strings returned through char** are released with
 * ibn_string_free(). Handles are released with their *_free function;
 * passing NULL to a *_free function is a no-op. */
#ifndef IBN_IBN_H
#define IBN_IBN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define IBN_API __attribute__((visibility("default")))
#else
#define IBN_API
#endif

typedef enum ibn_status {
  IBN_OK = 0,
  IBN_ERR_INVALID_ARGUMENT = 1,
  IBN_ERR_OUT_OF_RANGE = 2,
  IBN_ERR_CAPACITY = 3,
  IBN_ERR_RUNTIME = 4,
  IBN_ERR_ILLEGAL_MOVE = 5,
  IBN_ERR_INTERNAL = 6
} ibn_status;

typedef enum ibn_verdict { IBN_BELOW = 0, IBN_ABOVE = 1, IBN_UNDECIDED = 2 } ibn_verdict;

IBN_API const char* ibn_version(void);
IBN_API const char* ibn_status_string(ibn_status s);
IBN_API const char* ibn_last_error(void);
IBN_API void ibn_string_free(char* s);

typedef struct ibn_tree ibn_tree;
typedef struct ibn_bracket ibn_bracket;
typedef struct ibn_semigroup ibn_semigroup;
typedef struct ibn_grig_words ibn_grig_words;

/* Non-positive thresholds select the defaults (1e-6 and 1e-3). */
typedef struct ibn_schedule {
  const uint32_t* depths;
  size_t count;
  double eps_stop;
  double c_stay;
} ibn_schedule;

typedef struct ibn_grid {
  const double* values;
  size_t count;
} ibn_grid;

/* ---- trees ---- */

/* family: "seq", "binary", "path" or "three-one"; implicit where possible. */
IBN_API ibn_status ibn_tree_family(const char* family, uint32_t horizon, ibn_tree** out);
/* Spherically symmetric tree branching at depth d iff marks[d] != 0. */
IBN_API ibn_status ibn_tree_from_marks(const uint8_t* marks, size_t count, ibn_tree** out);
IBN_API ibn_status ibn_tree_load(const char* path, ibn_tree** out);
IBN_API ibn_status ibn_tree_save(const ibn_tree* t, const char* path, size_t vertex_cap);
IBN_API ibn_status ibn_tree_materialize(const ibn_tree* t, size_t vertex_cap, ibn_tree** out);
IBN_API void ibn_tree_free(ibn_tree* t);
IBN_API ibn_status ibn_tree_horizon(const ibn_tree* t, uint32_t* out);
/* Natural log of the number of vertices at depth n. */
IBN_API ibn_status ibn_tree_log_level_count(const ibn_tree* t, uint32_t n, double* out);
/* Exact for materialized trees, estimated for implicit ones. */
IBN_API ibn_status ibn_tree_vertex_count(const ibn_tree* t, double* out);
IBN_API ibn_status ibn_tree_is_implicit(const ibn_tree* t, int* out);

/* ---- brackets ---- */

IBN_API void ibn_bracket_free(ibn_bracket* b);
IBN_API size_t ibn_bracket_size(const ibn_bracket* b);
IBN_API ibn_status ibn_bracket_point(const ibn_bracket* b, size_t i, double* param, ibn_verdict* verdict);
IBN_API size_t ibn_bracket_value_count(const ibn_bracket* b, size_t i);
/* Natural log of the trajectory value at the j-th schedule depth. */
IBN_API ibn_status ibn_bracket_value(const ibn_bracket* b, size_t i, size_t j, double* out);
/* Return 1 and fill *out when the end point exists, else 0. */
IBN_API int ibn_bracket_lo(const ibn_bracket* b, double* out);
IBN_API int ibn_bracket_hi(const ibn_bracket* b, double* out);
IBN_API int ibn_bracket_consistent(const ibn_bracket* b);
IBN_API ibn_status ibn_bracket_describe(const ibn_bracket* b, char** out);
IBN_API const char* ibn_verdict_name(ibn_verdict v);

/* ---- cuts and growth ---- */

IBN_API ibn_status ibn_log_min_cut(const ibn_tree* t, double lambda, uint32_t n, double* out);
IBN_API ibn_status ibn_estimate_ibn(const ibn_tree* t, ibn_grid grid, ibn_schedule s, ibn_bracket** out);
IBN_API ibn_status ibn_growth_index(const ibn_tree* t, uint32_t n, double* estimate, int* below_grid,
                                    double* loglog_ratio);

/* ---- random walks ---- */

typedef struct ibn_walk_stats {
  uint64_t trials;
  uint64_t returned;
  double frequency;
  double wilson_lo;
  double wilson_hi;
} ibn_walk_stats;

typedef struct ibn_walk_trial {
  int returned;
  uint64_t steps;
  uint32_t max_depth;
} ibn_walk_trial;

/* Conductances exp(-|e|^lambda), truncation at depth n. */
IBN_API ibn_status ibn_log_effective_conductance(const ibn_tree* t, double lambda, uint32_t n, double* out);
/* `per_trial` may be NULL, otherwise it must hold `trials` entries. */
IBN_API ibn_status ibn_walk(const ibn_tree* t, double lambda, uint64_t trials, uint64_t step_cap, uint64_t seed,
                            unsigned threads, size_t vertex_cap, ibn_walk_stats* stats, ibn_walk_trial* per_trial);
/* Heavy-tailed conductances drawn with `seed`; bracket over gamma. */
IBN_API ibn_status ibn_rwrc(const ibn_tree* t, double lambda, uint64_t seed, ibn_grid gamma_grid, ibn_schedule s,
                            size_t vertex_cap, ibn_bracket** out);
IBN_API ibn_status ibn_conductance_ks(double lambda, uint64_t samples, uint64_t seed, double* out);

/* ---- percolation ---- */

typedef struct ibn_percolation_row {
  double log_exact;
  double bound;
  double mc;        /* NaN when no trials were requested */
  double mc_stderr; /* NaN when no trials were requested */
  uint64_t mc_hits;
} ibn_percolation_row;

IBN_API ibn_status ibn_percolation(const ibn_tree* t, double lambda, uint32_t n, uint64_t mc_trials, uint64_t seed,
                                   unsigned threads, size_t vertex_cap, ibn_percolation_row* out);
IBN_API ibn_status ibn_theta_estimate(const ibn_tree* t, ibn_grid grid, ibn_schedule s, ibn_bracket** out);

/* ---- firefighting ---- */

typedef struct ibn_fire_run {
  int contained;
  int cut_found;
  uint32_t rounds;
  uint32_t cut_depth;
  uint64_t cut_size;
  double fire_size;
  double protected_size;
} ibn_fire_run;

/* Budget floor(k_scale exp(n^gamma)); `reason` may be NULL. */
IBN_API ibn_status ibn_firefight(const ibn_tree* t, uint32_t k, double gamma, double k_scale, uint32_t horizon,
                                 ibn_fire_run* out, char** reason);
IBN_API ibn_status ibn_lambda_c_estimate(const ibn_tree* t, uint32_t k, ibn_grid grid, double k_scale,
                                         ibn_schedule horizons, ibn_bracket** out);

/* ---- matrix semigroup ---- */

typedef struct ibn_growth_row {
  uint32_t n;
  uint64_t ball;
  uint64_t level;
  double loglog_ratio;
  int upper_bound_holds;
} ibn_growth_row;

IBN_API ibn_status ibn_semigroup_build(uint32_t depth, size_t element_cap, ibn_semigroup** out);
IBN_API void ibn_semigroup_free(ibn_semigroup* s);
IBN_API ibn_status ibn_semigroup_depth(const ibn_semigroup* s, uint32_t* out);
IBN_API ibn_status ibn_semigroup_row(const ibn_semigroup* s, uint32_t n, ibn_growth_row* out);
/* counts[0..3]: power, single b, prime blocks, other, over words of length n. */
IBN_API ibn_status ibn_semigroup_word_types(const ibn_semigroup* s, uint32_t n, uint64_t counts[4]);
IBN_API ibn_status ibn_semigroup_fitted_constant(const ibn_semigroup* s, double* out);
/* Largest admissible scale of the prime flow at `lambda` and whether it passes the flow check. */
IBN_API ibn_status ibn_semigroup_prime_flow(const ibn_semigroup* s, double lambda, uint32_t n, double* scale,
                                            int* valid);
/* The lexicographic tree as a materialized tree. */
IBN_API ibn_status ibn_semigroup_tree(const ibn_semigroup* s, ibn_tree** out);

/* ---- Grigorchuk group ---- */

IBN_API ibn_status ibn_grig_verify_relations(unsigned depth, int corrupted, int* out);
IBN_API ibn_status ibn_grig_is_trivial(const char* word, int* out);
IBN_API ibn_status ibn_grig_loop_erase(const char* word, char** out);
/* Writes #O of every prefix (entry 0 is 1) into out[0..cap); *len gets the full count. */
IBN_API ibn_status ibn_grig_orbit_sizes(const char* word, uint32_t* out, size_t cap, size_t* len);
/* Branching flags for depths 0..n-1 of the branch-mark tree of `word`. */
IBN_API ibn_status ibn_grig_branch_marks(const char* word, uint32_t n, uint8_t* marks);
/* Largest depth the branch-mark tree of `word` supports. */
IBN_API ibn_status ibn_grig_mark_depth(const char* word, uint32_t* out);
IBN_API ibn_status ibn_grig_search(uint32_t n, size_t beam, uint64_t seed, unsigned threads, ibn_grig_words** out);
IBN_API void ibn_grig_words_free(ibn_grig_words* s);
IBN_API ibn_status ibn_grig_words_best(const ibn_grig_words* s, uint32_t n, char** word, uint32_t* orbit_size);
IBN_API ibn_status ibn_grig_words_concatenate(const ibn_grig_words* s, uint32_t blocks, char** out);
IBN_API ibn_status ibn_grig_constants(double* eta, double* alpha);
IBN_API ibn_status ibn_fit_loglog(const double* x, const double* y, size_t n, double* slope, double* intercept);

#ifdef __cplusplus
}
#endif

#endif
