#include "ibn/ibn.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>
#include <vector>

#include "ibn/firefighter.hpp"
#include "ibn/flow_cut.hpp"
#include "ibn/generators.hpp"
#include "ibn/grigorchuk.hpp"
#include "ibn/nathanson.hpp"
#include "ibn/percolation.hpp"
#include "ibn/walks.hpp"

struct ibn_tree {
  ibn::TreeSource src;
};

struct ibn_bracket {
  ibn::Bracket b;
};

struct ibn_semigroup {
  ibn::SemigroupBall s;
};

struct ibn_grig_words {
  ibn::SearchResult r;
};

namespace {

thread_local std::string g_error;

void set_error(std::string msg) { g_error = std::move(msg); }

template <class Fn>
ibn_status guarded(Fn&& fn) {
  try {
    g_error.clear();
    fn();
    return IBN_OK;
  } catch (const ibn::IllegalMove& e) {
    set_error(e.what());
    return IBN_ERR_ILLEGAL_MOVE;
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return IBN_ERR_INVALID_ARGUMENT;
  } catch (const std::out_of_range& e) {
    set_error(e.what());
    return IBN_ERR_OUT_OF_RANGE;
  } catch (const std::length_error& e) {
    set_error(e.what());
    return IBN_ERR_CAPACITY;
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return IBN_ERR_CAPACITY;
  } catch (const std::runtime_error& e) {
    set_error(e.what());
    return IBN_ERR_RUNTIME;
  } catch (const std::exception& e) {
    set_error(e.what());
    return IBN_ERR_INTERNAL;
  } catch (...) {
    set_error("unknown error");
    return IBN_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) throw std::invalid_argument(std::string(what) + " is null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<double> to_grid(ibn_grid g) {
  if (g.count == 0) return ibn::default_lambda_grid();
  need(g.values, "grid");
  return std::vector<double>(g.values, g.values + g.count);
}

ibn::DepthSchedule to_schedule(ibn_schedule s, std::uint32_t horizon) {
  ibn::DepthSchedule out;
  if (s.count == 0) {
    out = ibn::DepthSchedule::doubling(std::min<std::uint32_t>(16, horizon), horizon);
  } else {
    need(s.depths, "schedule");
    out.depths.assign(s.depths, s.depths + s.count);
  }
  if (s.eps_stop > 0) out.eps_stop = s.eps_stop;
  if (s.c_stay > 0) out.c_stay = s.c_stay;
  out.validate();
  return out;
}

std::shared_ptr<const ibn::Tree> as_tree(const ibn::TreeSource& src, std::size_t cap) {
  if (cap == 0) cap = ibn::kDefaultVertexCap;
  if (const auto* p = std::get_if<std::shared_ptr<const ibn::Tree>>(&src)) return *p;
  if (const auto* s = std::get_if<ibn::SphericalTree>(&src)) return std::make_shared<const ibn::Tree>(s->materialize(cap));
  return std::make_shared<const ibn::Tree>(std::get<ibn::ThreeOneTree>(src).materialize(cap));
}

const ibn::TreeSource& source(const ibn_tree* t) {
  need(t, "tree");
  return t->src;
}

template <class T>
void emit(T* out, const T& value, const char* what) {
  need(out, what);
  *out = value;
}

void give_bracket(ibn_bracket** out, ibn::Bracket b) {
  need(out, "output");
  *out = new ibn_bracket{std::move(b)};
}

ibn_verdict to_c(ibn::Verdict v) {
  switch (v) {
    case ibn::Verdict::kBelow: return IBN_BELOW;
    case ibn::Verdict::kAbove: return IBN_ABOVE;
    default: return IBN_UNDECIDED;
  }
}

}  // namespace

extern "C" {

const char* ibn_version(void) { return "1.0.0"; }

const char* ibn_status_string(ibn_status s) {
  switch (s) {
    case IBN_OK: return "ok";
    case IBN_ERR_INVALID_ARGUMENT: return "invalid argument";
    case IBN_ERR_OUT_OF_RANGE: return "out of range";
    case IBN_ERR_CAPACITY: return "capacity exceeded";
    case IBN_ERR_RUNTIME: return "runtime failure";
    case IBN_ERR_ILLEGAL_MOVE: return "illegal move";
    case IBN_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* ibn_last_error(void) { return g_error.c_str(); }

void ibn_string_free(char* s) { std::free(s); }

ibn_status ibn_tree_family(const char* family, uint32_t horizon, ibn_tree** out) {
  return guarded([&] {
    need(family, "family");
    need(out, "output");
    *out = new ibn_tree{ibn::make_family(family, horizon)};
  });
}

ibn_status ibn_tree_from_marks(const uint8_t* marks, size_t count, ibn_tree** out) {
  return guarded([&] {
    if (count > 0) need(marks, "marks");
    need(out, "output");
    std::vector<bool> m(count);
    for (size_t i = 0; i < count; ++i) m[i] = marks[i] != 0;
    *out = new ibn_tree{ibn::SphericalTree(ibn::marks_degrees(std::move(m)), static_cast<std::uint32_t>(count))};
  });
}

ibn_status ibn_tree_load(const char* path, ibn_tree** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "output");
    *out = new ibn_tree{std::make_shared<const ibn::Tree>(ibn::Tree::load(path))};
  });
}

ibn_status ibn_tree_save(const ibn_tree* t, const char* path, size_t vertex_cap) {
  return guarded([&] {
    need(path, "path");
    as_tree(source(t), vertex_cap)->save(path);
  });
}

ibn_status ibn_tree_materialize(const ibn_tree* t, size_t vertex_cap, ibn_tree** out) {
  return guarded([&] {
    need(out, "output");
    *out = new ibn_tree{as_tree(source(t), vertex_cap)};
  });
}

void ibn_tree_free(ibn_tree* t) { delete t; }

ibn_status ibn_tree_horizon(const ibn_tree* t, uint32_t* out) {
  return guarded([&] { emit(out, ibn::source_horizon(source(t)), "output"); });
}

ibn_status ibn_tree_log_level_count(const ibn_tree* t, uint32_t n, double* out) {
  return guarded([&] {
    const auto& s = source(t);
    if (n > ibn::source_horizon(s)) throw std::out_of_range("depth beyond the tree horizon");
    emit(out, ibn::source_log_level_count(s, n), "output");
  });
}

ibn_status ibn_tree_vertex_count(const ibn_tree* t, double* out) {
  return guarded([&] {
    const auto& s = source(t);
    double v = 0;
    if (const auto* p = std::get_if<std::shared_ptr<const ibn::Tree>>(&s))
      v = static_cast<double>((*p)->size());
    else if (const auto* sp = std::get_if<ibn::SphericalTree>(&s))
      v = sp->vertex_count();
    else
      v = std::get<ibn::ThreeOneTree>(s).vertex_count();
    emit(out, v, "output");
  });
}

ibn_status ibn_tree_is_implicit(const ibn_tree* t, int* out) {
  return guarded([&] {
    emit(out, std::holds_alternative<std::shared_ptr<const ibn::Tree>>(source(t)) ? 0 : 1, "output");
  });
}

void ibn_bracket_free(ibn_bracket* b) { delete b; }

size_t ibn_bracket_size(const ibn_bracket* b) { return b ? b->b.points.size() : 0; }

ibn_status ibn_bracket_point(const ibn_bracket* b, size_t i, double* param, ibn_verdict* verdict) {
  return guarded([&] {
    need(b, "bracket");
    const auto& p = b->b.points.at(i);
    if (param) *param = p.param;
    if (verdict) *verdict = to_c(p.verdict);
  });
}

size_t ibn_bracket_value_count(const ibn_bracket* b, size_t i) {
  if (!b || i >= b->b.points.size()) return 0;
  return b->b.points[i].log_values.size();
}

ibn_status ibn_bracket_value(const ibn_bracket* b, size_t i, size_t j, double* out) {
  return guarded([&] {
    need(b, "bracket");
    emit(out, b->b.points.at(i).log_values.at(j), "output");
  });
}

int ibn_bracket_lo(const ibn_bracket* b, double* out) {
  if (!b || !b->b.lo) return 0;
  if (out) *out = *b->b.lo;
  return 1;
}

int ibn_bracket_hi(const ibn_bracket* b, double* out) {
  if (!b || !b->b.hi) return 0;
  if (out) *out = *b->b.hi;
  return 1;
}

int ibn_bracket_consistent(const ibn_bracket* b) { return b && b->b.consistent ? 1 : 0; }

ibn_status ibn_bracket_describe(const ibn_bracket* b, char** out) {
  return guarded([&] {
    need(b, "bracket");
    need(out, "output");
    *out = dup_string(b->b.describe());
  });
}

const char* ibn_verdict_name(ibn_verdict v) {
  switch (v) {
    case IBN_BELOW: return "below";
    case IBN_ABOVE: return "above";
    default: return "undecided";
  }
}

ibn_status ibn_log_min_cut(const ibn_tree* t, double lambda, uint32_t n, double* out) {
  return guarded([&] { emit(out, ibn::log_min_cut(source(t), ibn::EdgeWeightProfile::ibn(lambda), n), "output"); });
}

ibn_status ibn_estimate_ibn(const ibn_tree* t, ibn_grid grid, ibn_schedule s, ibn_bracket** out) {
  return guarded([&] {
    const auto& src = source(t);
    give_bracket(out, ibn::ibn_estimate(src, to_schedule(s, ibn::source_horizon(src)), to_grid(grid)));
  });
}

ibn_status ibn_growth_index(const ibn_tree* t, uint32_t n, double* estimate, int* below_grid, double* loglog_ratio) {
  return guarded([&] {
    const auto e = ibn::igr_estimate(source(t), n);
    if (estimate) *estimate = e.estimate;
    if (below_grid) *below_grid = e.below_grid ? 1 : 0;
    if (loglog_ratio) *loglog_ratio = e.loglog_ratio;
  });
}

ibn_status ibn_log_effective_conductance(const ibn_tree* t, double lambda, uint32_t n, double* out) {
  return guarded([&] {
    const auto& src = source(t);
    const auto c = ibn::lambda_conductances(lambda);
    double v;
    if (const auto* s = std::get_if<ibn::SphericalTree>(&src))
      v = ibn::log_effective_conductance(*s, c, n);
    else
      v = ibn::log_effective_conductance(*as_tree(src, 0), c, n);
    emit(out, v, "output");
  });
}

ibn_status ibn_walk(const ibn_tree* t, double lambda, uint64_t trials, uint64_t step_cap, uint64_t seed,
                    unsigned threads, size_t vertex_cap, ibn_walk_stats* stats, ibn_walk_trial* per_trial) {
  return guarded([&] {
    const auto& src = source(t);
    const auto c = ibn::lambda_conductances(lambda);
    ibn::WalkSummary w;
    if (const auto* s = std::get_if<ibn::SphericalTree>(&src))
      w = ibn::run_walks(ibn::DepthWalker(*s, c), trials, step_cap, seed, threads);
    else
      w = ibn::run_walks(ibn::TreeWalker(as_tree(src, vertex_cap), c), trials, step_cap, seed, threads);
    if (stats) *stats = {w.trials, w.returned, w.frequency, w.wilson_lo, w.wilson_hi};
    if (per_trial) {
      for (size_t i = 0; i < w.results.size(); ++i)
        per_trial[i] = {w.results[i].returned ? 1 : 0, w.results[i].steps, w.results[i].max_depth};
    }
  });
}

ibn_status ibn_rwrc(const ibn_tree* t, double lambda, uint64_t seed, ibn_grid gamma_grid, ibn_schedule s,
                    size_t vertex_cap, ibn_bracket** out) {
  return guarded([&] {
    const auto tree = as_tree(source(t), vertex_cap);
    const std::uint32_t n = tree->height();
    const auto sched = to_schedule(s, n);
    const auto field = ibn::sample_conductances(*tree, lambda, seed);
    const auto psi = ibn::psi_field(*tree, field, n);
    give_bracket(out, ibn::rt_estimate(tree, psi, to_grid(gamma_grid), sched));
  });
}

ibn_status ibn_conductance_ks(double lambda, uint64_t samples, uint64_t seed, double* out) {
  return guarded([&] { emit(out, ibn::conductance_ks_distance(lambda, samples, seed), "output"); });
}

ibn_status ibn_percolation(const ibn_tree* t, double lambda, uint32_t n, uint64_t mc_trials, uint64_t seed,
                           unsigned threads, size_t vertex_cap, ibn_percolation_row* out) {
  return guarded([&] {
    need(out, "output");
    const auto& src = source(t);
    const auto law = ibn::percolation_law(lambda);
    ibn_percolation_row row{};
    row.log_exact = ibn::log_exact_survival(src, law, n);
    row.mc = row.mc_stderr = std::numeric_limits<double>::quiet_NaN();
    const auto* sph = std::get_if<ibn::SphericalTree>(&src);
    std::shared_ptr<const ibn::Tree> tree;
    if (!sph) tree = as_tree(src, vertex_cap);
    row.bound = sph ? ibn::conductance_bound(*sph, law, n) : ibn::conductance_bound(*tree, law, n);
    if (mc_trials > 0) {
      const auto mc = sph ? ibn::mc_survival(*sph, law, n, mc_trials, seed, threads)
                          : ibn::mc_survival(*tree, law, n, mc_trials, seed, threads);
      row.mc = mc.estimate;
      row.mc_stderr = mc.stderr_;
      row.mc_hits = mc.hits;
    }
    *out = row;
  });
}

ibn_status ibn_theta_estimate(const ibn_tree* t, ibn_grid grid, ibn_schedule s, ibn_bracket** out) {
  return guarded([&] {
    const auto& src = source(t);
    give_bracket(out, ibn::theta_estimate(src, to_schedule(s, ibn::source_horizon(src)), to_grid(grid)));
  });
}

ibn_status ibn_firefight(const ibn_tree* t, uint32_t k, double gamma, double k_scale, uint32_t horizon,
                         ibn_fire_run* out, char** reason) {
  return guarded([&] {
    need(out, "output");
    const auto r = ibn::construct_and_play(source(t), k, gamma, k_scale, horizon);
    *out = {r.outcome.contained ? 1 : 0, r.cut_found ? 1 : 0, r.outcome.rounds, r.cut_depth,
            static_cast<uint64_t>(r.cut_size), r.outcome.fire_size, r.outcome.protected_size};
    if (reason) *reason = dup_string(r.outcome.reason);
  });
}

ibn_status ibn_lambda_c_estimate(const ibn_tree* t, uint32_t k, ibn_grid grid, double k_scale,
                                 ibn_schedule horizons, ibn_bracket** out) {
  return guarded([&] {
    const auto& src = source(t);
    give_bracket(out, ibn::lambda_c_estimate(src, k, to_grid(grid), k_scale, to_schedule(horizons, ibn::source_horizon(src))));
  });
}

ibn_status ibn_semigroup_build(uint32_t depth, size_t element_cap, ibn_semigroup** out) {
  return guarded([&] {
    need(out, "output");
    *out = new ibn_semigroup{ibn::bfs_ball(depth, element_cap == 0 ? ibn::kDefaultElementCap : element_cap)};
  });
}

void ibn_semigroup_free(ibn_semigroup* s) { delete s; }

ibn_status ibn_semigroup_depth(const ibn_semigroup* s, uint32_t* out) {
  return guarded([&] {
    need(s, "semigroup");
    emit(out, s->s.tree.height(), "output");
  });
}

ibn_status ibn_semigroup_row(const ibn_semigroup* s, uint32_t n, ibn_growth_row* out) {
  return guarded([&] {
    need(s, "semigroup");
    need(out, "output");
    if (n == 0 || n > s->s.tree.height()) throw std::out_of_range("row outside the computed ball");
    const auto rows = ibn::growth_stats(s->s);
    const auto& r = rows.at(n - 1);
    *out = {r.n, r.ball, r.level, r.loglog_ratio, ibn::ball_upper_bound_holds(n, r.ball) ? 1 : 0};
  });
}

ibn_status ibn_semigroup_word_types(const ibn_semigroup* s, uint32_t n, uint64_t counts[4]) {
  return guarded([&] {
    need(s, "semigroup");
    need(counts, "counts");
    if (n > s->s.tree.height()) throw std::out_of_range("level outside the computed ball");
    for (int i = 0; i < 4; ++i) counts[i] = 0;
    for (ibn::VertexId v : s->s.tree.level_set(n)) counts[static_cast<int>(ibn::classify_word(s->s.word(v)))]++;
  });
}

ibn_status ibn_semigroup_fitted_constant(const ibn_semigroup* s, double* out) {
  return guarded([&] {
    need(s, "semigroup");
    emit(out, ibn::fitted_lower_constant(s->s), "output");
  });
}

ibn_status ibn_semigroup_prime_flow(const ibn_semigroup* s, double lambda, uint32_t n, double* scale, int* valid) {
  return guarded([&] {
    need(s, "semigroup");
    const double c = ibn::max_prime_flow_scale(s->s, lambda, n);
    const auto check = ibn::check_flow(s->s.tree, ibn::prime_flow(s->s, c), ibn::EdgeWeightProfile::ibn(lambda), n);
    if (scale) *scale = c;
    if (valid) *valid = check.valid ? 1 : 0;
  });
}

ibn_status ibn_semigroup_tree(const ibn_semigroup* s, ibn_tree** out) {
  return guarded([&] {
    need(s, "semigroup");
    need(out, "output");
    *out = new ibn_tree{std::make_shared<const ibn::Tree>(s->s.tree)};
  });
}

ibn_status ibn_grig_verify_relations(unsigned depth, int corrupted, int* out) {
  return guarded([&] {
    const auto m = corrupted ? ibn::Automaton::corrupted() : ibn::Automaton::grigorchuk();
    emit(out, ibn::verify_relations(depth, m) ? 1 : 0, "output");
  });
}

ibn_status ibn_grig_is_trivial(const char* word, int* out) {
  return guarded([&] {
    need(word, "word");
    emit(out, ibn::is_trivial(word) ? 1 : 0, "output");
  });
}

ibn_status ibn_grig_loop_erase(const char* word, char** out) {
  return guarded([&] {
    need(word, "word");
    need(out, "output");
    *out = dup_string(ibn::loop_erase(word));
  });
}

ibn_status ibn_grig_orbit_sizes(const char* word, uint32_t* out, size_t cap, size_t* len) {
  return guarded([&] {
    need(word, "word");
    const auto s = ibn::orbit_sizes(word);
    if (len) *len = s.size();
    if (cap > 0) need(out, "output");
    for (size_t i = 0; i < std::min(cap, s.size()); ++i) out[i] = s[i];
  });
}

ibn_status ibn_grig_branch_marks(const char* word, uint32_t n, uint8_t* marks) {
  return guarded([&] {
    need(word, "word");
    if (n > 0) need(marks, "marks");
    const auto b = ibn::branch_marks(word, n);
    for (uint32_t d = 0; d < n; ++d) marks[d] = b.depth_marks[d] ? 1 : 0;
  });
}

ibn_status ibn_grig_mark_depth(const char* word, uint32_t* out) {
  return guarded([&] {
    need(word, "word");
    const auto s = ibn::orbit_sizes(word);
    const std::size_t len = std::strlen(word);
    emit(out, static_cast<uint32_t>(len + (len == 0 ? 0 : s.back())), "output");
  });
}

ibn_status ibn_grig_search(uint32_t n, size_t beam, uint64_t seed, unsigned threads, ibn_grig_words** out) {
  return guarded([&] {
    need(out, "output");
    *out = new ibn_grig_words{ibn::search_word(n, beam == 0 ? ibn::kDefaultBeam : beam, seed, threads)};
  });
}

void ibn_grig_words_free(ibn_grig_words* s) { delete s; }

ibn_status ibn_grig_words_best(const ibn_grig_words* s, uint32_t n, char** word, uint32_t* orbit_size) {
  return guarded([&] {
    need(s, "search");
    const auto& w = s->r.best.at(n);
    if (orbit_size) *orbit_size = s->r.orbit_size.at(n);
    if (word) *word = dup_string(w);
  });
}

ibn_status ibn_grig_words_concatenate(const ibn_grig_words* s, uint32_t blocks, char** out) {
  return guarded([&] {
    need(s, "search");
    need(out, "output");
    *out = dup_string(ibn::concatenate_blocks(s->r, blocks));
  });
}

ibn_status ibn_grig_constants(double* eta, double* alpha) {
  return guarded([&] {
    if (eta) *eta = ibn::bartholdi_erschler_eta();
    if (alpha) *alpha = ibn::bartholdi_erschler_alpha();
  });
}

ibn_status ibn_fit_loglog(const double* x, const double* y, size_t n, double* slope, double* intercept) {
  return guarded([&] {
    if (n > 0) {
      need(x, "x");
      need(y, "y");
    }
    const auto f = ibn::fit_loglog(std::vector<double>(x, x + n), std::vector<double>(y, y + n));
    if (slope) *slope = f.slope;
    if (intercept) *intercept = f.intercept;
  });
}

}  // extern "C"
