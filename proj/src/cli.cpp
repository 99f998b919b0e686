#include "hypgeo/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "hypgeo/duality.hpp"
#include "hypgeo/earthquake.hpp"
#include "hypgeo/errors.hpp"
#include "hypgeo/fmt.hpp"
#include "hypgeo/holonomy.hpp"
#include "hypgeo/laminations.hpp"
#include "hypgeo/rng.hpp"
#include "hypgeo/solvers.hpp"

namespace hypgeo::cli {

namespace {

using nlohmann::json;

json load_config(const std::string& path) {
  if (path.empty()) throw validation_error("a --config path is required");
  std::ifstream f(path);
  if (!f) throw validation_error("cannot read config: " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const std::exception& e) {
    throw validation_error(std::string("malformed config JSON: ") + e.what());
  }
  if (!j.contains("schema_version") || j["schema_version"] != 1)
    throw validation_error("config schema_version must be 1");
  return j;
}

double as_num(const json& j, const std::string& what) {
  if (!j.is_number()) throw validation_error(what + " must be a number");
  return j.get<double>();
}

std::vector<double> num_list(const json& j, const std::string& what) {
  if (!j.is_array()) throw validation_error(what + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(as_num(v, what + " entry"));
  return out;
}

FenchelNielsen fn_from_json(const json& j) {
  if (!j.is_object() || !j.contains("lengths") || !j.contains("twists"))
    throw validation_error("Fenchel-Nielsen config needs lengths and twists arrays");
  FenchelNielsen fn;
  fn.lengths = num_list(j["lengths"], "lengths");
  fn.twists = num_list(j["twists"], "twists");
  return fn;
}

PantsGraph topo_from_config(const json& cfg) {
  PantsGraph topo = PantsGraph::genus2_default();
  if (cfg.contains("curves")) {
    const json& c = cfg["curves"];
    if (!c.is_object()) throw validation_error("curves override must be an object");
    for (size_t j = 0; j < topo.curve_names.size(); ++j) {
      const std::string& name = topo.curve_names[j];
      if (c.contains(name)) {
        if (!c[name].is_string())
          throw validation_error("curve word for " + name + " must be a string");
        topo.curve_word_strs[j] = c[name].get<std::string>();
      }
    }
  }
  topo.validate();
  return topo;
}

std::uint64_t seed_from(const RunOptions& opts, const json& cfg) {
  if (opts.seed) return *opts.seed;
  if (cfg.contains("seed")) {
    if (!cfg["seed"].is_number_unsigned() && !cfg["seed"].is_number_integer())
      throw validation_error("seed must be an integer");
    return cfg["seed"].get<std::uint64_t>();
  }
  return 0;
}

EnumerationBudget budget_from(const RunOptions& opts, const json& cfg) {
  EnumerationBudget b;
  if (cfg.contains("budget_radius")) b.max_radius = cfg["budget_radius"].get<int>();
  if (cfg.contains("budget_window")) b.window = cfg["budget_window"].get<int>();
  if (opts.budget_radius) b.max_radius = *opts.budget_radius;
  b.validate();
  return b;
}

std::pair<double, double> range_from(const json& cfg, const std::string& key,
                                     double lo, double hi) {
  if (!cfg.contains(key)) return {lo, hi};
  std::vector<double> r = num_list(cfg[key], key);
  if (r.size() != 2 || !(r[0] < r[1]))
    throw validation_error(key + " must be [lo, hi] with lo < hi");
  return {r[0], r[1]};
}

FenchelNielsen random_fn(std::mt19937_64& g, std::pair<double, double> lr,
                         std::pair<double, double> tr) {
  FenchelNielsen fn;
  for (int j = 0; j < 3; ++j) fn.lengths.push_back(unif(g, lr.first, lr.second));
  for (int j = 0; j < 3; ++j) fn.twists.push_back(unif(g, tr.first, tr.second));
  return fn;
}

void write_file(const std::string& dir, const std::string& name,
                const std::string& content) {
  std::filesystem::create_directories(dir);
  std::filesystem::path p = std::filesystem::path(dir) / name;
  std::ofstream f(p, std::ios::binary);
  if (!f) throw validation_error("cannot open output file: " + p.string());
  f << content;
}

int pool_threads() {
  unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::max(1u, std::min(hw == 0 ? 4u : hw, 8u)));
}

// Index-order work queue; any non-budget exception aborts the run after the
// in-flight jobs finish. Results are merged by index afterwards, so the
// emitted bytes never depend on scheduling.
template <typename Job>
void run_pool(int n_jobs, const Job& job) {
  std::atomic<int> next{0};
  std::mutex err_m;
  std::exception_ptr err;
  auto worker = [&] {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= n_jobs) return;
      try {
        job(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_m);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> ws;
  int nt = std::min(pool_threads(), std::max(1, n_jobs));
  ws.reserve(nt);
  for (int t = 0; t < nt; ++t) ws.emplace_back(worker);
  for (auto& w : ws) w.join();
  if (err) std::rethrow_exception(err);
}

std::string support_names(const PantsGraph& topo, const std::vector<int>& idx) {
  std::string s;
  for (int j : idx) {
    if (!s.empty()) s += '+';
    s += topo.curve_names[j];
  }
  return s;
}

std::string joined_weights(const std::vector<double>& w) {
  std::string s;
  for (double v : w) {
    if (!s.empty()) s += ';';
    s += num(v);
  }
  return s;
}

// ---------------------------------------------------------------------------
// surface
// ---------------------------------------------------------------------------

struct SurfaceRow {
  FenchelNielsen fn;
  RepDiagnostics diag;
};

void surface_row_json(JsonWriter& w, const SurfaceRow& row) {
  w.begin_object();
  w.key("lengths").begin_array();
  for (double v : row.fn.lengths) w.value(v);
  w.end_array();
  w.key("twists").begin_array();
  for (double v : row.fn.twists) w.value(v);
  w.end_array();
  w.key("relator_residual").value(row.diag.relator_residual);
  w.key("residual_method").value(row.diag.residual_method);
  w.key("pants_length_error").value(row.diag.pants_length_error);
  w.key("min_pants_length").value(row.diag.min_pants_length);
  w.key("max_pants_length").value(row.diag.max_pants_length);
  w.key("min_short_word_length").value(row.diag.min_short_word_length);
  w.key("systole_ok").value(row.diag.systole_ok);
  w.key("ok").value(row.diag.ok);
  w.end_object();
}

int run_surface_impl(const RunOptions& opts) {
  json cfg = load_config(opts.config_path);
  std::uint64_t seed = seed_from(opts, cfg);
  PantsGraph topo = topo_from_config(cfg);

  std::vector<SurfaceRow> rows;
  if (cfg.contains("fn")) {
    FuchsianRep rep = holonomy_from_fn(fn_from_json(cfg["fn"]), topo);
    rows.push_back({rep.fn(), validate_rep(rep)});
  } else if (cfg.contains("random")) {
    const json& r = cfg["random"];
    int count = r.contains("count") ? r["count"].get<int>() : 100;
    if (count <= 0) throw validation_error("random.count must be positive");
    auto lr = range_from(r, "lengths", 0.5, 3.0);
    auto tr = range_from(r, "twists", -1.0, 1.0);
    rows.resize(count);
    run_pool(count, [&](int i) {
      std::mt19937_64 g(derive_seed(seed, i));
      FenchelNielsen fn = random_fn(g, lr, tr);
      FuchsianRep rep = holonomy_from_fn(fn, topo);
      rows[i] = {fn, validate_rep(rep)};
    });
  } else {
    throw validation_error("surface config needs either fn or random");
  }

  bool all_ok = true;
  double max_res = 0, max_perr = 0;
  for (const SurfaceRow& r : rows) {
    all_ok = all_ok && r.diag.ok;
    max_res = std::max(max_res, r.diag.relator_residual);
    max_perr = std::max(max_perr, r.diag.pants_length_error);
  }

  JsonWriter w;
  w.begin_object();
  w.key("schema_version").value(1);
  w.key("command").value(std::string("surface"));
  w.key("seed").value(static_cast<unsigned long long>(seed));
  w.key("count").value(static_cast<int>(rows.size()));
  w.key("all_ok").value(all_ok);
  w.key("max_relator_residual").value(max_res);
  w.key("max_pants_length_error").value(max_perr);
  w.key("rows").begin_array();
  for (const SurfaceRow& r : rows) surface_row_json(w, r);
  w.end_array();
  w.end_object();
  write_file(opts.out_dir, "surface.json", w.str() + "\n");

  std::cout << "surface: rows=" << rows.size() << " all_ok=" << (all_ok ? "yes" : "no")
            << " max_residual=" << num(max_res) << "\n";
  return all_ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// verify-lemma
// ---------------------------------------------------------------------------

struct LemmaCsvRow {
  std::uint64_t seed = 0;
  std::string gamma, support, weights;
  double t = 0, inter = 0, L0 = 0, Lt = 0, lower = 0, upper = 0;
  bool pass = false;
};

struct LemmaConfigOut {
  bool budget_exhausted = false;
  std::vector<LemmaCsvRow> rows;
  int fails = 0;
  double max_slack_used = 0;
};

int run_verify_lemma_impl(const RunOptions& opts) {
  json cfg = load_config(opts.config_path);
  std::uint64_t seed = seed_from(opts, cfg);
  PantsGraph topo = topo_from_config(cfg);
  EnumerationBudget budget = budget_from(opts, cfg);

  int configs = cfg.contains("configs") ? cfg["configs"].get<int>() : 100;
  if (configs <= 0) throw validation_error("configs must be positive");
  std::vector<double> t_grid =
      opts.grid ? *opts.grid
                : (cfg.contains("t_grid") ? num_list(cfg["t_grid"], "t_grid")
                                          : std::vector<double>{0, 0.1, 1, 5, 10, 50});
  if (t_grid.empty()) throw validation_error("t grid must be nonempty");
  for (double t : t_grid)
    if (!(t >= 0) || !std::isfinite(t))
      throw validation_error("t grid values must be finite and nonnegative");
  double slack = opts.slack ? *opts.slack
                            : (cfg.contains("slack") ? as_num(cfg["slack"], "slack")
                                                     : 1e-6);
  if (!(slack > 0)) throw validation_error("slack must be positive");
  int sign = cfg.contains("sign") ? cfg["sign"].get<int>() : 1;
  if (sign != 1 && sign != -1) throw validation_error("sign must be +-1");
  auto lr = range_from(cfg, "lengths", 0.5, 3.0);
  auto tr = range_from(cfg, "twists", -1.0, 1.0);
  auto wr = range_from(cfg, "weights", 0.1, 5.0);

  std::vector<LemmaConfigOut> outs(configs);
  run_pool(configs, [&](int i) {
    LemmaConfigOut& out = outs[i];
    std::uint64_t cseed = derive_seed(seed, i);
    std::mt19937_64 g(cseed);
    FenchelNielsen fn = random_fn(g, lr, tr);
    int mask = 1 + static_cast<int>(g() % 7);
    std::vector<int> support;
    std::vector<double> weights;
    MultiCurve l;
    for (int j = 0; j < 3; ++j) {
      if (!(mask & (1 << j))) continue;
      double wv = unif(g, wr.first, wr.second);
      support.push_back(j);
      weights.push_back(wv);
      l.components.push_back({topo.pants_curve(j), wv});
    }
    std::string support_str = support_names(topo, support);
    std::string weights_str = joined_weights(weights);
    try {
      for (const CurveClass& gamma : marking_set()) {
        LemmaCertificate cert =
            verify_length_estimate(fn, topo, l, gamma, t_grid, slack, budget);
        for (size_t k = 0; k < t_grid.size(); ++k) {
          LemmaCsvRow row;
          row.seed = cseed;
          row.gamma = gamma.name;
          row.support = support_str;
          row.weights = weights_str;
          row.t = t_grid[k];
          row.inter = cert.intersection;
          row.L0 = cert.base_length;
          row.Lt = cert.measured[k];
          // sign == -1 is the wrong-sign negative control: the expected
          // window is built with the negated slope, so a working checker
          // must report failures wherever i * t outgrows the base length.
          // (Reversing the earthquake direction instead would be vacuous:
          // conjugating by an orientation-reversing isometry turns right
          // earthquakes into left ones while fixing lengths and
          // intersections, so the two-sided estimate holds for both.)
          row.lower = sign * row.inter * t_grid[k] - row.L0;
          row.upper = sign * row.inter * t_grid[k] + row.L0;
          double used = std::max({0.0, row.lower - row.Lt, row.Lt - row.upper});
          row.pass = used <= slack;
          out.max_slack_used = std::max(out.max_slack_used, used);
          if (!row.pass) ++out.fails;
          out.rows.push_back(row);
        }
      }
    } catch (const budget_error&) {
      out.budget_exhausted = true;
      out.rows.clear();
      out.fails = 0;
    }
  });

  std::string csv = "seed,genus,gamma,support,weights,t,i,L0,Lt,lower,upper,pass\n";
  long total_rows = 0, fail_rows = 0, budget_configs = 0;
  double max_slack_used = 0;
  for (const LemmaConfigOut& out : outs) {
    if (out.budget_exhausted) {
      ++budget_configs;
      continue;
    }
    for (const LemmaCsvRow& r : out.rows) {
      csv += std::to_string(r.seed) + ",2," + r.gamma + "," + r.support + "," +
             r.weights + "," + num(r.t) + "," + num(r.inter) + "," + num(r.L0) + "," +
             num(r.Lt) + "," + num(r.lower) + "," + num(r.upper) + "," +
             (r.pass ? "1" : "0") + "\n";
      ++total_rows;
      if (!r.pass) ++fail_rows;
    }
    max_slack_used = std::max(max_slack_used, out.max_slack_used);
  }
  write_file(opts.out_dir, "lemma.csv", csv);

  bool all_pass = fail_rows == 0 && budget_configs == 0;
  JsonWriter w;
  w.begin_object();
  w.key("schema_version").value(1);
  w.key("command").value(std::string("verify-lemma"));
  w.key("seed").value(static_cast<unsigned long long>(seed));
  w.key("configs").value(configs);
  w.key("sign").value(sign);
  w.key("slack").value(slack);
  w.key("t_grid").begin_array();
  for (double t : t_grid) w.value(t);
  w.end_array();
  w.key("rows").value(static_cast<long long>(total_rows));
  w.key("fail_rows").value(static_cast<long long>(fail_rows));
  w.key("budget_configs").value(static_cast<long long>(budget_configs));
  w.key("max_slack_used").value(max_slack_used);
  w.key("all_pass").value(all_pass);
  w.end_object();
  write_file(opts.out_dir, "lemma_summary.json", w.str() + "\n");

  std::cout << "verify-lemma: rows=" << total_rows << " fails=" << fail_rows
            << " budget_configs=" << budget_configs
            << " max_slack_used=" << num(max_slack_used) << "\n";
  if (budget_configs > 0) return 3;
  return all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// ukmap
// ---------------------------------------------------------------------------

int run_ukmap_impl(const RunOptions& opts) {
  json cfg = load_config(opts.config_path);
  std::uint64_t seed = seed_from(opts, cfg);
  PantsGraph topo = topo_from_config(cfg);
  EnumerationBudget budget = budget_from(opts, cfg);

  FenchelNielsen m0 = cfg.contains("base")
                          ? fn_from_json(cfg["base"])
                          : FenchelNielsen{{1.5, 1.7, 1.3}, {0.2, -0.4, 0.6}};
  std::vector<double> K_list = cfg.contains("K_list")
                                   ? num_list(cfg["K_list"], "K_list")
                                   : std::vector<double>{-0.9, -0.99, -0.999};
  if (K_list.empty()) throw validation_error("K_list must be nonempty");
  int pairs = cfg.contains("pairs") ? cfg["pairs"].get<int>() : 10;
  if (pairs <= 0) throw validation_error("pairs must be positive");
  double slack = opts.slack ? *opts.slack
                            : (cfg.contains("slack") ? as_num(cfg["slack"], "slack")
                                                     : 1e-6);
  std::vector<double> t_grid =
      opts.grid ? *opts.grid
                : (cfg.contains("t_grid")
                       ? num_list(cfg["t_grid"], "t_grid")
                       : std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8,
                                             0.9, 1.0, 1.1});
  if (t_grid.empty()) throw validation_error("t grid must be nonempty");
  auto wr = range_from(cfg, "weights", 0.1, 5.0);

  FuchsianRep rep0 = holonomy_from_fn(m0, topo);
  bool all_pass = true;

  JsonWriter w;
  w.begin_object();
  w.key("schema_version").value(1);
  w.key("command").value(std::string("ukmap"));
  w.key("seed").value(static_cast<unsigned long long>(seed));
  w.key("K_list").begin_array();
  for (double K : K_list) w.value(K);
  w.end_array();
  w.key("slack").value(slack);

  // Convergence of u_K over seeded (lamination, curve) pairs.
  w.key("convergence").begin_array();
  for (int p = 0; p < pairs; ++p) {
    std::uint64_t pseed = derive_seed(seed, p);
    std::mt19937_64 g(pseed);
    int mask = 1 + static_cast<int>(g() % 7);
    std::vector<int> support;
    std::vector<double> weights;
    MultiCurve l;
    for (int j = 0; j < 3; ++j) {
      if (!(mask & (1 << j))) continue;
      double wv = unif(g, wr.first, wr.second);
      support.push_back(j);
      weights.push_back(wv);
      l.components.push_back({topo.pants_curve(j), wv});
    }
    const CurveClass& gamma = marking_set()[g() % marking_set().size()];
    double i_l = lamination_intersection(rep0, l, gamma, budget);
    double L0 = curve_length(rep0, gamma);

    w.begin_object();
    w.key("pair_seed").value(static_cast<unsigned long long>(pseed));
    w.key("gamma").value(gamma.name);
    w.key("support").value(support_names(topo, support));
    w.key("weights").begin_array();
    for (double v : weights) w.value(v);
    w.end_array();
    w.key("i_l_gamma").value(i_l);
    w.key("L0").value(L0);
    w.key("rows").begin_array();
    double prev_bound = std::numeric_limits<double>::infinity();
    for (double K : K_list) {
      CurvatureParam kk = CurvatureParam::from_K(K);
      double sq = std::sqrt(std::abs(kk.K_star));
      FuchsianRep reph = earthquake(
          EarthquakePath{m0, topo, l.scaled(sq), 1.0, QuakeMethod::fn_twist});
      MultiCurve u = u_map(kk, ScaledMetric{reph.fn(), kk.K_star}, m0, topo, support);
      double i_u = lamination_intersection(rep0, u, gamma, budget);
      double dev = std::abs(i_u - i_l);
      double bound = L0 / sq;
      bool row_pass = dev <= bound + slack && bound < prev_bound;
      all_pass = all_pass && row_pass;
      w.begin_object();
      w.key("K").value(K);
      w.key("K_star").value(kk.K_star);
      w.key("i_u_gamma").value(i_u);
      w.key("deviation").value(dev);
      w.key("bound").value(bound);
      w.key("pass").value(row_pass);
      w.end_object();
      prev_bound = bound;
    }
    w.end_array();
    w.end_object();
  }
  w.end_array();

  // Uniform-in-t sweep for the first seeded pair.
  {
    std::uint64_t pseed = derive_seed(seed, 0);
    std::mt19937_64 g(pseed);
    int mask = 1 + static_cast<int>(g() % 7);
    MultiCurve l;
    for (int j = 0; j < 3; ++j) {
      if (!(mask & (1 << j))) continue;
      l.components.push_back({topo.pants_curve(j), unif(g, wr.first, wr.second)});
    }
    const CurveClass& gamma = marking_set()[g() % marking_set().size()];
    UniformSweepReport rep =
        uniform_u_convergence_sweep(m0, topo, K_list, t_grid, l, gamma, slack, budget);
    all_pass = all_pass && rep.pass;
    w.key("uniform_sweep").begin_object();
    w.key("gamma").value(gamma.name);
    w.key("max_deviation").value(rep.max_deviation);
    w.key("pass").value(rep.pass);
    w.key("rows").begin_array();
    for (const UniformSweepRow& r : rep.rows) {
      w.begin_object();
      w.key("K").value(r.K);
      w.key("t").value(r.t);
      w.key("scaled_length").value(r.scaled_length);
      w.key("intersection").value(r.intersection);
      w.key("deviation").value(r.deviation);
      w.key("bound").value(r.bound);
      w.key("pass").value(r.pass);
      w.end_object();
    }
    w.end_array();
    w.end_object();
  }

  w.key("all_pass").value(all_pass);
  w.end_object();
  write_file(opts.out_dir, "ukmap.json", w.str() + "\n");
  std::cout << "ukmap: pairs=" << pairs << " K_values=" << K_list.size()
            << " all_pass=" << (all_pass ? "yes" : "no") << "\n";
  return all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// project
// ---------------------------------------------------------------------------

MultiCurve multicurve_from_json(const json& j, const PantsGraph& topo) {
  MultiCurve out;
  if (j.is_object() && j.contains("marking_equal")) {
    double wv = as_num(j["marking_equal"], "marking_equal");
    for (const CurveClass& c : marking_set()) out.components.push_back({c, wv});
    return out;
  }
  if (!j.is_array())
    throw validation_error("current must be a list of {word, weight} entries");
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("word") || !e.contains("weight"))
      throw validation_error("current entry needs word and weight");
    if (!e["word"].is_string())
      throw validation_error("current entry word must be a string");
    std::string ws = e["word"].get<std::string>();
    out.components.push_back(
        {CurveClass::from_word(ws, ws), as_num(e["weight"], "weight")});
  }
  (void)topo;
  return out;
}

int run_project_impl(const RunOptions& opts) {
  json cfg = load_config(opts.config_path);
  std::uint64_t seed = seed_from(opts, cfg);
  PantsGraph topo = topo_from_config(cfg);
  EnumerationBudget budget = budget_from(opts, cfg);

  if (!cfg.contains("mu")) throw validation_error("project config needs mu");
  MultiCurve mu = multicurve_from_json(cfg["mu"], topo);
  MultiCurve omega =
      cfg.contains("omega") ? multicurve_from_json(cfg["omega"], topo) : MultiCurve{};
  FenchelNielsen start = cfg.contains("start")
                             ? fn_from_json(cfg["start"])
                             : FenchelNielsen{{1.5, 1.7, 1.3}, {0.2, -0.4, 0.6}};
  double tol = cfg.contains("tol") ? as_num(cfg["tol"], "tol") : 1e-6;
  int starts = cfg.contains("starts") ? cfg["starts"].get<int>() : 5;
  if (starts <= 0) throw validation_error("starts must be positive");
  bool scale_check = !cfg.contains("scale_check") || cfg["scale_check"].get<bool>();

  std::vector<std::vector<double>> xs;
  std::vector<SolveReport> reports;
  std::vector<FenchelNielsen> points;
  for (int s = 0; s < starts; ++s) {
    FenchelNielsen x0 = start;
    if (s > 0) {
      std::mt19937_64 g(derive_seed(seed, s));
      x0.lengths.clear();
      x0.twists.clear();
      for (int j = 0; j < 3; ++j) x0.lengths.push_back(unif(g, 0.8, 2.5));
      for (int j = 0; j < 3; ++j) x0.twists.push_back(unif(g, -0.8, 0.8));
    }
    auto [pt, report] = project_current(mu, omega, x0, topo, tol, budget);
    points.push_back(pt);
    reports.push_back(report);
    xs.push_back(report.solution);
  }

  double spread = 0;
  bool all_converged = true;
  for (const SolveReport& r : reports) all_converged = all_converged && r.converged;
  for (const auto& x : xs)
    for (size_t j = 0; j < x.size(); ++j)
      spread = std::max(spread, std::abs(x[j] - xs[0][j]));

  double scale_dev = 0;
  if (scale_check) {
    FenchelNielsen x0 = points[0];
    for (double& v : x0.twists) v += 0.05;
    for (double& v : x0.lengths) v *= 1.05;
    auto [pt2, rep2] = project_current(mu.scaled(2), omega.components.empty()
                                                        ? omega
                                                        : omega.scaled(2),
                                       x0, topo, tol, budget);
    for (size_t j = 0; j < rep2.solution.size(); ++j)
      scale_dev = std::max(scale_dev, std::abs(rep2.solution[j] - xs[0][j]));
  }

  // Fixed-point witness: restarting from the minimizer stops immediately.
  auto [ptf, repf] = project_current(mu, omega, points[0], topo, tol, budget);
  bool fixed_point = repf.iterations <= 2;

  bool all_pass = all_converged && spread <= 1e-5 && fixed_point &&
                  (!scale_check || scale_dev <= 1e-6);

  JsonWriter w;
  w.begin_object();
  w.key("schema_version").value(1);
  w.key("command").value(std::string("project"));
  w.key("seed").value(static_cast<unsigned long long>(seed));
  w.key("starts").value(starts);
  w.key("tol").value(tol);
  w.key("minimizer").begin_object();
  w.key("lengths").begin_array();
  for (double v : points[0].lengths) w.value(v);
  w.end_array();
  w.key("twists").begin_array();
  for (double v : points[0].twists) w.value(v);
  w.end_array();
  w.end_object();
  w.key("grad_inf_norm").value(reports[0].residual);
  w.key("hessian_condition").value(reports[0].condition);
  w.key("multistart_spread").value(spread);
  w.key("scale_invariance_dev").value(scale_dev);
  w.key("fixed_point_iterations").value(repf.iterations);
  w.key("all_converged").value(all_converged);
  w.key("all_pass").value(all_pass);
  w.key("runs").begin_array();
  for (const SolveReport& r : reports) {
    w.begin_object();
    w.key("converged").value(r.converged);
    w.key("iterations").value(r.iterations);
    w.key("grad_inf_norm").value(r.residual);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  write_file(opts.out_dir, "project.json", w.str() + "\n");
  std::cout << "project: starts=" << starts << " spread=" << num(spread)
            << " all_pass=" << (all_pass ? "yes" : "no") << "\n";
  return all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// duality
// ---------------------------------------------------------------------------

MinkowskiVec random_spacelike(std::mt19937_64& g) {
  for (;;) {
    MinkowskiVec v{unif(g, -1, 1), unif(g, -1, 1), unif(g, -1, 1), unif(g, -1, 1)};
    double q = mink(v, v);
    if (q > 0.05) return (1.0 / std::sqrt(q)) * v;
  }
}

const char* pair_case_name(PairCase c) {
  switch (c) {
    case PairCase::intersecting: return "intersecting";
    case PairCase::asymptotic: return "asymptotic";
    default: return "disjoint";
  }
}

bool cases_match(PairCase a, SegCase b) {
  return (a == PairCase::intersecting && b == SegCase::spacelike) ||
         (a == PairCase::asymptotic && b == SegCase::lightlike) ||
         (a == PairCase::disjoint && b == SegCase::timelike);
}

int run_duality_impl(const RunOptions& opts) {
  json cfg = load_config(opts.config_path);
  std::uint64_t seed = seed_from(opts, cfg);
  int pairs = cfg.contains("pairs") ? cfg["pairs"].get<int>() : 100;
  int lorentz = cfg.contains("lorentz") ? cfg["lorentz"].get<int>() : 10;
  if (pairs <= 0) throw validation_error("pairs must be positive");

  bool all_pass = true;
  double max_len_dev = 0, max_invol_dev = 0, max_lorentz_dev = 0, max_kstar_dev = 0;
  long case_matches = 0;

  std::vector<std::pair<OrientedPlane, OrientedPlane>> sampled;
  JsonWriter w;
  w.begin_object();
  w.key("schema_version").value(1);
  w.key("command").value(std::string("duality"));
  w.key("seed").value(static_cast<unsigned long long>(seed));
  w.key("pairs").value(pairs);

  w.key("dictionary").begin_array();
  for (int i = 0; i < pairs; ++i) {
    std::mt19937_64 g(derive_seed(seed, i));
    OrientedPlane P1 = OrientedPlane::from(random_spacelike(g));
    OrientedPlane P2 = OrientedPlane::from(random_spacelike(g));
    while (std::abs(std::abs(mink(P1.n, P2.n)) - 1.0) < 1e-7)
      P2 = OrientedPlane::from(random_spacelike(g));
    sampled.push_back({P1, P2});

    PlanePairClass pc = classify_plane_pair(P1, P2);
    SegmentClass sc = dual_segment_type(plane_dual(P1), plane_dual(P2));
    bool match = cases_match(pc.kind, sc.kind);
    double len_dev = std::abs(pc.value - sc.length);
    if (match) ++case_matches;
    max_len_dev = std::max(max_len_dev, len_dev);

    // Involution and orientation reversal on the first plane.
    OrientedPlane back = point_dual(plane_dual(P1));
    double invol =
        std::max({std::abs(back.n.x0 - P1.n.x0), std::abs(back.n.x1 - P1.n.x1),
                  std::abs(back.n.x2 - P1.n.x2), std::abs(back.n.x3 - P1.n.x3)});
    MinkowskiVec neg = -1.0 * P1.n;
    MinkowskiVec flip = plane_dual(OrientedPlane::from(neg)).v;
    double flip_dev =
        std::max({std::abs(flip.x0 + P1.n.x0), std::abs(flip.x1 + P1.n.x1),
                  std::abs(flip.x2 + P1.n.x2), std::abs(flip.x3 + P1.n.x3)});
    max_invol_dev = std::max({max_invol_dev, invol, flip_dev});

    bool row_pass = match && len_dev <= 1e-9 && invol <= 1e-12 && flip_dev <= 1e-12;
    all_pass = all_pass && row_pass;
    w.begin_object();
    w.key("case").value(std::string(pair_case_name(pc.kind)));
    w.key("pairing").value(mink(P1.n, P2.n));
    w.key("plane_value").value(pc.value);
    w.key("segment_value").value(sc.length);
    w.key("pass").value(row_pass);
    w.end_object();
  }
  w.end_array();

  // Invariance under random ambient isometries.
  for (int k = 0; k < lorentz; ++k) {
    LorentzTransform L = LorentzTransform::random(derive_seed(seed ^ 0x4c53ULL, k));
    const auto& [P1, P2] = sampled[k % sampled.size()];
    OrientedPlane Q1 = OrientedPlane::from(L.apply(P1.n));
    OrientedPlane Q2 = OrientedPlane::from(L.apply(P2.n));
    PlanePairClass before = classify_plane_pair(P1, P2);
    PlanePairClass after = classify_plane_pair(Q1, Q2);
    bool ok = before.kind == after.kind;
    double dev = std::abs(before.value - after.value);
    max_lorentz_dev = std::max(max_lorentz_dev, dev);
    all_pass = all_pass && ok && dev <= 1e-9;
  }

  // Closed-form curvature relation on a d grid: K_III = K/(K+1), checked as
  // K_III * (K+1) = K. Dividing by K+1 instead would amplify the rounding of
  // K by 1/(K+1)^2 (~1.6e5 at d=0.05), putting the ratio form's floor near
  // 1.6e-11 for any double-valued K; multiplied through by the positive
  // factor K+1, the same identity is measurable at full precision.
  int d_count = cfg.contains("d_count") ? cfg["d_count"].get<int>() : 50;
  if (d_count < 2) throw validation_error("d_count must be at least 2");
  for (int k = 0; k < d_count; ++k) {
    double d = 0.05 + (5.0 - 0.05) * k / (d_count - 1);
    auto [K, KIII] = equidistant_curvatures(d);
    double dev = std::abs(KIII * (K + 1) - K);
    max_kstar_dev = std::max(max_kstar_dev, dev);
    all_pass = all_pass && dev < 1e-12;
  }

  // Randomized convex cap: dual edges equal the pairwise exterior angles.
  double max_cap_dev = 0;
  {
    std::mt19937_64 g(derive_seed(seed ^ 0xCA9ULL, 0));
    int nf = 4;
    std::vector<OrientedPlane> faces;
    for (int k = 0; k < nf; ++k) {
      double alpha = unif(g, 0.3, 0.6);
      double phi = 2 * 3.14159265358979323846 * (k + unif(g, -0.1, 0.1)) / nf;
      double eps = unif(g, -0.05, 0.05);
      MinkowskiVec v{eps, std::sin(alpha) * std::cos(phi),
                     std::sin(alpha) * std::sin(phi), std::cos(alpha)};
      double q = mink(v, v);
      faces.push_back(OrientedPlane::from((1.0 / std::sqrt(q)) * v));
    }
    std::vector<std::pair<int, int>> adj;
    for (int k = 0; k < nf; ++k) adj.push_back({k, (k + 1) % nf});
    PolyhedralDual dual = polyhedral_dual(faces, adj);
    for (const PolyDualEdge& e : dual.edges) {
      PlanePairClass pc = classify_plane_pair(faces[e.i], faces[e.j]);
      max_cap_dev = std::max(max_cap_dev, std::abs(pc.value - e.length));
      all_pass = all_pass && pc.kind == PairCase::intersecting &&
                 std::abs(pc.value - e.length) <= 1e-10;
    }
  }

  w.key("case_matches").value(static_cast<long long>(case_matches));
  w.key("max_length_dev").value(max_len_dev);
  w.key("max_involution_dev").value(max_invol_dev);
  w.key("max_lorentz_dev").value(max_lorentz_dev);
  w.key("max_curvature_identity_dev").value(max_kstar_dev);
  w.key("max_cap_edge_dev").value(max_cap_dev);
  w.key("all_pass").value(all_pass);
  w.end_object();
  write_file(opts.out_dir, "duality.json", w.str() + "\n");
  std::cout << "duality: pairs=" << pairs << " case_matches=" << case_matches
            << " all_pass=" << (all_pass ? "yes" : "no") << "\n";
  return all_pass ? 0 : 1;
}

}  // namespace

int run_surface(const RunOptions& opts) { return run_surface_impl(opts); }
int run_verify_lemma(const RunOptions& opts) { return run_verify_lemma_impl(opts); }
int run_ukmap(const RunOptions& opts) { return run_ukmap_impl(opts); }
int run_project(const RunOptions& opts) { return run_project_impl(opts); }
int run_duality(const RunOptions& opts) { return run_duality_impl(opts); }

}  // namespace hypgeo::cli
