// Command-line front end. Talks to the library only through ibn.h.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ibn/ibn.h"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(ibn_status s, const std::string& what) {
  if (s != IBN_OK) throw Failure(what + ": " + ibn_status_string(s) + ": " + ibn_last_error());
}

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

json num_json(double x) {
  if (std::isfinite(x)) return x;
  return num(x);
}

struct TreeDel {
  void operator()(ibn_tree* t) const { ibn_tree_free(t); }
};
struct BracketDel {
  void operator()(ibn_bracket* b) const { ibn_bracket_free(b); }
};
using TreePtr = std::unique_ptr<ibn_tree, TreeDel>;
using BracketPtr = std::unique_ptr<ibn_bracket, BracketDel>;

std::string take(char* s) {
  std::string out = s ? s : "";
  ibn_string_free(s);
  return out;
}

struct Globals {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out_dir = ".";
  std::size_t memory_mb = 4096;

  std::size_t vertex_cap() const { return memory_mb * (std::size_t{1} << 20) / 32; }
  std::size_t element_cap() const { return memory_mb * (std::size_t{1} << 20) / 256; }
};

struct Run {
  std::string command;
  std::vector<std::string> argv;
  std::string config;
  const Globals* g = nullptr;
};

fs::path resolve(const Globals& g, const std::string& name) {
  fs::path p(name);
  if (p.is_relative()) p = fs::path(g.out_dir) / p;
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  return p;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Manifest next to `out`; the timestamp is the last field, alone on its line.
void write_manifest(const Run& run, const fs::path& out, const std::string& label, json summary) {
  json m;
  m["command"] = run.command;
  m["output"] = out.filename().string();
  m["family"] = label;
  m["seed"] = run.g->seed;
  m["threads"] = run.g->threads;
  m["library_version"] = ibn_version();
  m["argv"] = run.argv;
  m["config"] = run.config;
  m["summary"] = std::move(summary);
  m["timestamp"] = timestamp();
  std::ofstream f(out.string() + ".manifest.json");
  if (!f) throw Failure("cannot write manifest for " + out.string());
  f << m.dump(2) << "\n";
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw Failure("cannot write " + p.string());
  return f;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  if (text.empty()) return out;
  if (text.find(':') != std::string::npos) {
    double a, b, step;
    char c1, c2;
    std::istringstream in(text);
    in.imbue(std::locale::classic());
    if (!(in >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0) || b < a)
      throw CLI::ValidationError("grid", "expected a:b:step, got '" + text + "'");
    const auto n = static_cast<long>(std::floor((b - a) / step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(std::round((a + i * step) * 1e12) / 1e12);
    return out;
  }
  std::istringstream in(text);
  in.imbue(std::locale::classic());
  std::string tok;
  while (std::getline(in, tok, ',')) {
    double x;
    auto r = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (r.ec != std::errc() || r.ptr != tok.data() + tok.size())
      throw CLI::ValidationError("grid", "bad number '" + tok + "'");
    out.push_back(x);
  }
  return out;
}

ibn_grid grid_of(const std::vector<double>& v) { return {v.data(), v.size()}; }

ibn_schedule schedule_of(const std::vector<std::uint32_t>& v, double eps_stop = 0, double c_stay = 0) {
  return {v.data(), v.size(), eps_stop, c_stay};
}

std::vector<std::uint32_t> default_schedule(std::uint32_t horizon) {
  std::vector<std::uint32_t> s;
  for (std::uint64_t d = std::min<std::uint32_t>(16, horizon); d < horizon; d *= 2) s.push_back(static_cast<std::uint32_t>(d));
  s.push_back(horizon);
  return s;
}

std::vector<std::uint8_t> read_marks(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure("cannot open " + path);
  std::vector<std::uint8_t> marks;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (line != "0" && line != "1") throw Failure(path + ":" + std::to_string(line_no) + ": expected 0 or 1");
    marks.push_back(line == "1");
  }
  return marks;
}

struct Source {
  std::string family = "seq";
  std::uint32_t depth = 0;
  std::string tree_file;
  std::string marks_file;
  CLI::Option* depth_opt = nullptr;

  void add(CLI::App* sub, std::uint32_t default_depth) {
    depth = default_depth;
    sub->add_option("--family", family, "seq, binary, path, three-one or marks")
        ->check(CLI::IsMember({"seq", "binary", "path", "three-one", "marks"}));
    depth_opt = sub->add_option("--depth", depth, "truncation depth")->check(CLI::PositiveNumber);
    auto* t = sub->add_option("--tree", tree_file, "tree file written by generate")->check(CLI::ExistingFile);
    auto* m = sub->add_option("--marks", marks_file, "branch-mark file written by grig")->check(CLI::ExistingFile);
    t->excludes(m);
  }

  std::string label() const {
    if (!tree_file.empty()) return fs::path(tree_file).stem().string();
    if (!marks_file.empty()) return "marks:" + fs::path(marks_file).stem().string();
    return family;
  }

  TreePtr open() const {
    ibn_tree* t = nullptr;
    if (!tree_file.empty()) {
      check(ibn_tree_load(tree_file.c_str(), &t), "loading " + tree_file);
    } else if (!marks_file.empty() || family == "marks") {
      if (marks_file.empty()) throw CLI::ValidationError("--family marks", "requires --marks FILE");
      auto marks = read_marks(marks_file);
      if (depth_opt->count() > 0 && depth < marks.size()) marks.resize(depth);
      check(ibn_tree_from_marks(marks.data(), marks.size(), &t), "building tree from marks");
    } else {
      check(ibn_tree_family(family.c_str(), depth, &t), "building " + family);
    }
    return TreePtr(t);
  }
};

std::uint32_t horizon_of(const ibn_tree* t) {
  std::uint32_t h = 0;
  check(ibn_tree_horizon(t, &h), "tree horizon");
  return h;
}

json bracket_json(const ibn_bracket* b) {
  json j;
  double x;
  j["lo"] = ibn_bracket_lo(b, &x) ? json(x) : json(nullptr);
  j["hi"] = ibn_bracket_hi(b, &x) ? json(x) : json(nullptr);
  j["consistent"] = ibn_bracket_consistent(b) == 1;
  char* d = nullptr;
  check(ibn_bracket_describe(b, &d), "describing bracket");
  j["describe"] = take(d);
  return j;
}

// One row per (parameter, depth): param,depth,value,classification.
void write_bracket_rows(std::ostream& out, const ibn_bracket* b, const std::vector<std::uint32_t>& depths) {
  for (std::size_t i = 0; i < ibn_bracket_size(b); ++i) {
    double param;
    ibn_verdict v;
    check(ibn_bracket_point(b, i, &param, &v), "bracket point");
    const std::size_t n = ibn_bracket_value_count(b, i);
    for (std::size_t j = 0; j < n && j < depths.size(); ++j) {
      double lv;
      check(ibn_bracket_value(b, i, j, &lv), "bracket value");
      out << num(param) << ',' << depths[j] << ',' << num(std::exp(lv)) << ',' << ibn_verdict_name(v) << '\n';
    }
  }
}

// ---- subcommands ----

struct GenerateCmd {
  Source src;
  std::string out;
  void add(CLI::App* app) {
    auto* sub = app->add_subcommand("generate", "materialize a tree and write it to a file");
    src.add(sub, 64);
    sub->add_option("--out", out, "output tree file (default <family>.tree)");
  }
  void run(const Run& r) {
    auto t = src.open();
    const fs::path p = resolve(*r.g, out.empty() ? src.label() + ".tree" : out);
    check(ibn_tree_save(t.get(), p.string().c_str(), r.g->vertex_cap()), "saving tree");
    double vertices = 0;
    check(ibn_tree_vertex_count(t.get(), &vertices), "vertex count");
    write_manifest(r, p, src.label(), {{"horizon", horizon_of(t.get())}, {"vertices", vertices}});
  }
};

struct EstimateCmd {
  Source src;
  std::string grid = "0.05:0.95:0.05";
  std::vector<std::uint32_t> schedule;
  double eps_stop = 1e-6, c_stay = 1e-3;
  std::string out = "estimate-ibn.csv";
  void add(CLI::App* app) {
    auto* sub = app->add_subcommand("estimate-ibn", "bracket the intermediate branching number");
    src.add(sub, 512);
    sub->add_option("--grid", grid, "lambda grid a:b:step or comma list");
    sub->add_option("--schedule", schedule, "increasing depths (default doubling from 16)")->delimiter(',');
    sub->add_option("--eps-stop", eps_stop)->check(CLI::PositiveNumber);
    sub->add_option("--c-stay", c_stay)->check(CLI::PositiveNumber);
    sub->add_option("--out", out);
  }
  void run(const Run& r) {
    auto t = src.open();
    const auto g = parse_grid(grid);
    if (schedule.empty()) schedule = default_schedule(horizon_of(t.get()));
    ibn_bracket* b = nullptr;
    check(ibn_estimate_ibn(t.get(), grid_of(g), schedule_of(schedule, eps_stop, c_stay), &b), "estimating IBN");
    BracketPtr bp(b);
    const fs::path p = resolve(*r.g, out);
    auto f = open_out(p);
    f << "lambda,depth,mincut,classification\n";
    write_bracket_rows(f, b, schedule);
    double igr = 0, ratio = 0;
    int below = 0;
    check(ibn_growth_index(t.get(), schedule.back(), &igr, &below, &ratio), "growth index");
    json s = bracket_json(b);
    s["igr"] = below ? json(nullptr) : json(igr);
    s["loglog_ratio"] = num_json(ratio);
    write_manifest(r, p, src.label(), s);
  }
};

struct WalkCmd {
  Source src;
  double lambda = 0.5;
  std::uint64_t trials = 1000, step_cap = 1000000;
  std::string out = "walk.csv";
  void add(CLI::App* app) {
    auto* sub = app->add_subcommand("walk", "random walks with conductances exp(-|e|^lambda)");
    src.add(sub, 512);
    sub->add_option("--lambda", lambda)->check(CLI::Range(0.0, 1.0));
    sub->add_option("--trials", trials)->check(CLI::PositiveNumber);
    sub->add_option("--step-cap", step_cap)->check(CLI::PositiveNumber);
    sub->add_option("--out", out);
  }
  void run(const Run& r) {
    auto t = src.open();
    std::vector<ibn_walk_trial> rows(trials);
    ibn_walk_stats st{};
    check(ibn_walk(t.get(), lambda, trials, step_cap, r.g->seed, r.g->threads, r.g->vertex_cap(), &st, rows.data()),
          "running walks");
    const fs::path p = resolve(*r.g, out);
    auto f = open_out(p);
    f << "trial,returned,steps,maxdepth\n";
    for (std::size_t i = 0; i < rows.size(); ++i)
      f << i << ',' << rows[i].returned << ',' << rows[i].steps << ',' << rows[i].max_depth << '\n';
    const std::uint32_t h = horizon_of(t.get());
    double lc = 0;
    check(ibn_log_effective_conductance(t.get(), lambda, h, &lc), "effective conductance");
    write_manifest(r, p, src.label(),
                   {{"lambda", lambda},
                    {"returned", st.returned},
                    {"frequency", st.frequency},
                    {"wilson", {st.wilson_lo, st.wilson_hi}},
                    {"log_effective_conductance", num_json(lc)},
                    {"depth", h}});
  }
};

struct RwrcCmd {
  Source src;
  double lambda = 0.5;
  std::string grid = "0.1:2.0:0.1";
  std::vector<std::uint32_t> schedule;
  std::string out = "rwrc.csv";
  void add(CLI::App* app) {
    auto* sub = app->add_subcommand("rwrc", "random walk in heavy-tailed random conductances");
    src.add(sub, 128);
    sub->add_option("--lambda", lambda)->check(CLI::Range(0.0, 1.0));
    sub->add_option("--gamma-grid", grid, "gamma grid a:b:step or comma list");
    sub->add_option("--schedule", schedule)->delimiter(',');
    sub->add_option("--out", out);
  }
  void run(const Run& r) {
    auto t = src.open();
    const auto g = parse_grid(grid);
    if (schedule.empty()) schedule = default_schedule(horizon_of(t.get()));
    ibn_bracket* b = nullptr;
    check(ibn_rwrc(t.get(), lambda, r.g->seed, grid_of(g), schedule_of(schedule), r.g->vertex_cap(), &b),
          "estimating RT");
    BracketPtr bp(b);
    const fs::path p = resolve(*r.g, out);
    auto f = open_out(p);
    f << "gamma,depth,rtvalue,class\n";
    write_bracket_rows(f, b, schedule);
    json s = bracket_json(b);
    s["lambda"] = lambda;
    write_manifest(r, p, src.label(), s);
  }
};

struct PercolateCmd {
  Source src;
  std::vector<double> lambdas{0.5};
  std::vector<std::uint32_t> depths;
  std::uint64_t mc = 0;
  std::string theta_grid;
  std::string out = "percolate.csv";
  void add(CLI::App* app) {
    auto* sub = app->add_subcommand("percolate", "survival of percolation with p(e) = exp(-|e|^(lambda-1))");
    src.add(sub, 512);
    sub->add_option("--lambda", lambdas, "one or more lambdas")->delimiter(',')->check(CLI::Range(0.0, 1.0));
    sub->add_option("--depths", depths, "depths (default doubling from 16)")->delimiter(',');
    sub->add_option("--mc", mc, "Monte Carlo trials per row");
    sub->add_option("--theta-grid", theta_grid, "also bracket the threshold over this grid");
    sub->add_option("--out", out);
  }
  void run(const Run& r) {
    auto t = src.open();
    if (depths.empty()) depths = default_schedule(horizon_of(t.get()));
    const fs::path p = resolve(*r.g, out);
    auto f = open_out(p);
    f << "lambda,depth,exact,mc,stderr,bound\n";
    for (double lambda : lambdas) {
      for (std::uint32_t d : depths) {
        ibn_percolation_row row{};
        check(ibn_percolation(t.get(), lambda, d, mc, r.g->seed, r.g->threads, r.g->vertex_cap(), &row),
              "percolation");
        f << num(lambda) << ',' << d << ',' << num(std::exp(row.log_exact)) << ',' << num(row.mc) << ','
          << num(row.mc_stderr) << ',' << num(row.bound) << '\n';
      }
    }
    json s = json::object();
    if (!theta_grid.empty()) {
      const auto g = parse_grid(theta_grid);
      ibn_bracket* b = nullptr;
      check(ibn_theta_estimate(t.get(), grid_of(g), schedule_of(depths), &b), "threshold bracket");
      BracketPtr bp(b);
      s = bracket_json(b);
    }
    write_manifest(r, p, src.label(), s);
  }
};

struct FirefightCmd {
  Source src;
  std::uint32_t k = 2;
  double k_scale = 1.0;
  std::string grid = "0.05:0.95:0.05";
  std::vector<std::uint32_t> horizons{200};
  std::string out = "firefight.csv";
  void add(CLI::App* app) {
    auto* sub = app->add_subcommand("firefight", "firefighting with budget floor(K exp(n^gamma))");
    src.add(sub, 256);
    sub->add_option("--k", k, "radius of the initial fire")->check(CLI::PositiveNumber);
    sub->add_option("--k-scale", k_scale, "budget constant K")->check(CLI::PositiveNumber);
    sub->add_option("--gamma-grid", grid);
    sub->add_option("--horizon", horizons, "one or more increasing horizons")->delimiter(',');
    sub->add_option("--out", out);
  }
  void run(const Run& r) {
    auto t = src.open();
    const auto g = parse_grid(grid);
    const fs::path p = resolve(*r.g, out);
    auto f = open_out(p);
    f << "gamma,horizon,contained,fire_size,protected_size\n";
    for (double gamma : g) {
      for (std::uint32_t h : horizons) {
        ibn_fire_run run{};
        check(ibn_firefight(t.get(), k, gamma, k_scale, h, &run, nullptr), "firefighting");
        f << num(gamma) << ',' << h << ',' << run.contained << ',' << num(run.fire_size) << ','
          << num(run.protected_size) << '\n';
      }
    }
    ibn_bracket* b = nullptr;
    check(ibn_lambda_c_estimate(t.get(), k, grid_of(g), k_scale, schedule_of(horizons), &b), "lambda_c bracket");
    BracketPtr bp(b);
    json s = bracket_json(b);
    s["k"] = k;
    s["k_scale"] = k_scale;
    write_manifest(r, p, src.label(), s);
  }
};

struct NathansonCmd {
  std::uint32_t depth = 40;
  std::string tree_out;
  std::string stats_out = "nathanson_stats.csv";
  bool estimate = false;
  void add(CLI::App* app) {
    auto* sub = app->add_subcommand("nathanson", "ball and lexicographic tree of the matrix semigroup");
    sub->add_option("--depth", depth)->check(CLI::PositiveNumber);
    sub->add_option("--emit-tree", tree_out, "write the lexicographic tree");
    sub->add_option("--emit-stats", stats_out, "growth statistics CSV");
    sub->add_flag("--estimate-ibn", estimate, "also bracket the IBN of the tree");
  }
  void run(const Run& r) {
    ibn_semigroup* sg = nullptr;
    check(ibn_semigroup_build(depth, r.g->element_cap(), &sg), "building the ball");
    std::unique_ptr<ibn_semigroup, void (*)(ibn_semigroup*)> sp(sg, ibn_semigroup_free);
    const fs::path p = resolve(*r.g, stats_out);
    auto f = open_out(p);
    f << "n,ball,level,loglog_ratio\n";
    bool upper = true;
    std::uint64_t other = 0;
    for (std::uint32_t n = 1; n <= depth; ++n) {
      ibn_growth_row row{};
      check(ibn_semigroup_row(sg, n, &row), "growth row");
      f << row.n << ',' << row.ball << ',' << row.level << ',' << num(row.loglog_ratio) << '\n';
      upper = upper && row.upper_bound_holds;
      std::uint64_t counts[4];
      check(ibn_semigroup_word_types(sg, n, counts), "word types");
      other += counts[3];
    }
    double c = 0, scale = 0;
    int valid = 0;
    check(ibn_semigroup_fitted_constant(sg, &c), "fitted constant");
    check(ibn_semigroup_prime_flow(sg, 0.4, depth, &scale, &valid), "prime flow");
    json s{{"upper_bound_holds", upper},
           {"other_words", other},
           {"fitted_c", c},
           {"prime_flow_scale", scale},
           {"prime_flow_valid", valid == 1}};
    ibn_tree* t = nullptr;
    check(ibn_semigroup_tree(sg, &t), "lexicographic tree");
    TreePtr tp(t);
    if (!tree_out.empty()) {
      const fs::path tp_path = resolve(*r.g, tree_out);
      check(ibn_tree_save(t, tp_path.string().c_str(), 0), "saving tree");
      write_manifest(r, tp_path, "nathanson", s);
    }
    if (estimate) {
      ibn_bracket* b = nullptr;
      check(ibn_estimate_ibn(t, {nullptr, 0}, schedule_of(default_schedule(depth)), &b), "estimating IBN");
      BracketPtr bp(b);
      s["ibn"] = bracket_json(b);
    }
    write_manifest(r, p, "nathanson", s);
  }
};

struct GrigCmd {
  std::uint32_t search = 256;
  std::size_t beam = 256;
  std::string marks_out = "grig_marks.txt";
  std::string orbits_out = "grig_orbits.csv";
  void add(CLI::App* app) {
    auto* sub = app->add_subcommand("grig", "inverted-orbit search and branch marks in the Grigorchuk group");
    sub->add_option("--search", search, "longest searched word length")->check(CLI::Range(1u, 1u << 16));
    sub->add_option("--beam", beam)->check(CLI::PositiveNumber);
    sub->add_option("--emit-marks", marks_out);
    sub->add_option("--emit-orbits", orbits_out);
  }
  void run(const Run& r) {
    ibn_grig_words* w = nullptr;
    check(ibn_grig_search(search, beam, r.g->seed, r.g->threads, &w), "searching words");
    std::unique_ptr<ibn_grig_words, void (*)(ibn_grig_words*)> wp(w, ibn_grig_words_free);
    const fs::path op = resolve(*r.g, orbits_out);
    auto f = open_out(op);
    f << "n,orbit_size,word\n";
    std::vector<double> xs, ys;
    for (std::uint32_t n = 1; n <= search; ++n) {
      char* word = nullptr;
      std::uint32_t size = 0;
      check(ibn_grig_words_best(w, n, &word, &size), "best word");
      f << n << ',' << size << ',' << take(word) << '\n';
      if (n >= 64 && (n & (n - 1)) == 0) {
        xs.push_back(n);
        ys.push_back(size);
      }
    }
    std::uint32_t blocks = 0;
    while ((2u << blocks) <= search) ++blocks;
    char* cat = nullptr;
    check(ibn_grig_words_concatenate(w, blocks, &cat), "concatenating blocks");
    const std::string concat = take(cat);
    char* erased = nullptr;
    check(ibn_grig_loop_erase(concat.c_str(), &erased), "loop erasure");
    const std::string q = take(erased);
    std::uint32_t depth = 0;
    check(ibn_grig_mark_depth(q.c_str(), &depth), "mark depth");
    std::vector<std::uint8_t> marks(depth);
    check(ibn_grig_branch_marks(q.c_str(), depth, marks.data()), "branch marks");
    std::size_t len = 0;
    check(ibn_grig_orbit_sizes(q.c_str(), nullptr, 0, &len), "orbit sizes");
    std::vector<std::uint32_t> sizes(len);
    check(ibn_grig_orbit_sizes(q.c_str(), sizes.data(), len, &len), "orbit sizes");

    const fs::path mp = resolve(*r.g, marks_out);
    auto m = open_out(mp);
    m << "# word " << q << "\n# orbit_sizes ";
    for (std::size_t i = 0; i < sizes.size(); ++i) m << (i ? "," : "") << sizes[i];
    m << '\n';
    for (auto x : marks) m << static_cast<int>(x) << '\n';

    double eta = 0, alpha = 0;
    check(ibn_grig_constants(&eta, &alpha), "constants");
    int rel = 0;
    check(ibn_grig_verify_relations(8, 0, &rel), "relations");
    json s{{"eta", eta}, {"alpha", alpha}, {"relations_depth8", rel == 1}, {"blocks", blocks},
           {"erased_length", q.size()}, {"mark_depth", depth}};
    if (xs.size() >= 3) {
      double slope = 0, icpt = 0;
      check(ibn_fit_loglog(xs.data(), ys.data(), xs.size(), &slope, &icpt), "slope fit");
      s["orbit_exponent"] = slope;
    } else {
      s["orbit_exponent"] = nullptr;
    }
    write_manifest(r, op, "grigorchuk", s);
    write_manifest(r, mp, "grigorchuk", s);
  }
};

struct ReportCmd {
  std::string dir;
  std::string out = "summary.csv";
  void add(CLI::App* app) {
    auto* sub = app->add_subcommand("report", "merge manifested runs into one table");
    sub->add_option("--results", dir, "directory of runs (default: output directory)");
    sub->add_option("--out", out);
  }
  static std::string field(const json& s, const char* key) {
    if (!s.contains(key) || s[key].is_null()) return "";
    if (s[key].is_number()) return num(s[key].get<double>());
    return s[key].dump();
  }
  void run(const Run& r) {
    const fs::path root = dir.empty() ? fs::path(r.g->out_dir) : fs::path(dir);
    struct Row {
      std::map<std::string, std::string> cells;
    };
    std::map<std::pair<std::string, std::uint64_t>, Row> rows;
    std::vector<fs::path> files;
    if (fs::exists(root))
      for (const auto& e : fs::directory_iterator(root))
        if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    const fs::path self = resolve(*r.g, out);
    for (const auto& f : files) {
      const std::string name = f.filename().string();
      if (name.size() > 14 && name.substr(name.size() - 14) == ".manifest.json") continue;
      if (f.extension() != ".csv" || fs::equivalent(f, self)) continue;
      const fs::path mf = f.string() + ".manifest.json";
      if (!fs::exists(mf)) {
        std::cerr << "warning: " << f.string() << " has no manifest, skipped\n";
        continue;
      }
      json m;
      try {
        std::ifstream in(mf);
        m = json::parse(in);
      } catch (const std::exception& e) {
        std::cerr << "warning: unreadable manifest " << mf.string() << ": " << e.what() << "\n";
        continue;
      }
      const auto key = std::make_pair(m.value("family", std::string("?")), m.value("seed", std::uint64_t{0}));
      auto& cells = rows[key].cells;
      const json& s = m["summary"];
      const std::string cmd = m.value("command", std::string());
      if (cmd == "estimate-ibn") {
        cells["igr"] = field(s, "igr");
        cells["ibn_lo"] = field(s, "lo");
        cells["ibn_hi"] = field(s, "hi");
      } else if (cmd == "nathanson" && s.contains("ibn")) {
        cells["ibn_lo"] = field(s["ibn"], "lo");
        cells["ibn_hi"] = field(s["ibn"], "hi");
      } else if (cmd == "percolate" && s.contains("describe")) {
        cells["theta_lo"] = field(s, "lo");
        cells["theta_hi"] = field(s, "hi");
      } else if (cmd == "firefight") {
        cells["lambda_c_lo"] = field(s, "lo");
        cells["lambda_c_hi"] = field(s, "hi");
      } else if (cmd == "rwrc") {
        auto& rt = cells["rt"];
        rt += (rt.empty() ? "" : " ") + field(s, "lambda") + ":[" + field(s, "lo") + "," + field(s, "hi") + "]";
      }
    }
    auto f = open_out(self);
    const std::vector<std::string> cols{"igr",         "ibn_lo",      "ibn_hi", "theta_lo", "theta_hi",
                                        "lambda_c_lo", "lambda_c_hi", "rt"};
    f << "family,seed";
    for (const auto& c : cols) f << ',' << c;
    f << '\n';
    for (const auto& [key, row] : rows) {
      f << key.first << ',' << key.second;
      for (const auto& c : cols) {
        auto it = row.cells.find(c);
        f << ',' << (it == row.cells.end() ? "" : it->second);
      }
      f << '\n';
    }
    write_manifest(r, self, "report", {{"rows", rows.size()}});
  }
};

// Points at the first config line mentioning a key named in the parser message.
void report_config_line(const std::string& path, const std::string& message) {
  std::ifstream in(path);
  std::string line;
  for (int no = 1; std::getline(in, line); ++no) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    if (key.empty()) continue;
    const auto dot = key.rfind('.');
    const std::string leaf = dot == std::string::npos ? key : key.substr(dot + 1);
    if (message.find(key) != std::string::npos || message.find("--" + leaf) != std::string::npos) {
      std::cerr << path << ":" << no << ": " << line << "\n";
      return;
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Intermediate branching number experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", ibn_version());
  auto* config_opt = app.set_config("--config", "", "read options from a TOML file");
  app.allow_config_extras(false);
  Globals g;
  if (const char* env = std::getenv("IBN_OUT_DIR")) g.out_dir = env;
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--threads", g.threads, "worker threads (0 = all cores)");
  app.add_option("--out-dir", g.out_dir, "output directory (env IBN_OUT_DIR)");
  app.add_option("--memory-cap", g.memory_mb, "memory cap in MiB for materialized structures")
      ->check(CLI::PositiveNumber);

  GenerateCmd generate;
  EstimateCmd estimate;
  WalkCmd walk;
  RwrcCmd rwrc;
  PercolateCmd percolate;
  FirefightCmd firefight;
  NathansonCmd nathanson;
  GrigCmd grig;
  ReportCmd report;
  generate.add(&app);
  estimate.add(&app);
  walk.add(&app);
  rwrc.add(&app);
  percolate.add(&app);
  firefight.add(&app);
  nathanson.add(&app);
  grig.add(&app);
  report.add(&app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    if (config_opt->count() > 0) report_config_line(config_opt->as<std::string>(), e.what());
    return 2;
  }

  Run run;
  run.g = &g;
  for (int i = 1; i < argc; ++i) run.argv.emplace_back(argv[i]);
  run.config = app.config_to_str(false, false);
  auto* sub = app.get_subcommands().front();
  run.command = sub->get_name();
  try {
    if (run.command == "generate") generate.run(run);
    else if (run.command == "estimate-ibn") estimate.run(run);
    else if (run.command == "walk") walk.run(run);
    else if (run.command == "rwrc") rwrc.run(run);
    else if (run.command == "percolate") percolate.run(run);
    else if (run.command == "firefight") firefight.run(run);
    else if (run.command == "nathanson") nathanson.run(run);
    else if (run.command == "grig") grig.run(run);
    else if (run.command == "report") report.run(run);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n" << sub->help();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
