#include "outlier/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "outlier/error.hpp"
#include "outlier/montecarlo.hpp"
#include "outlier/oracle.hpp"
#include "outlier/prediction.hpp"

namespace outlier {

using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid number '" + s + "' in " + what);
  }
}

int to_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid integer '" + s + "' in " + what);
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

double require_a(const RunConfig& cfg) {
  if (!cfg.a) throw ConfigError("--a is required");
  return *cfg.a;
}

int require_n(const RunConfig& cfg) {
  if (!cfg.n) throw ConfigError("--n is required");
  if (*cfg.n < 1) throw ConfigError("n must be positive");
  return *cfg.n;
}

// r defaults to 1 and must stay well below n so that kappa = r/n is small.
int checked_r(const RunConfig& cfg, int n, int min_r = 1) {
  int r = cfg.r.value_or(1);
  if (r < min_r) throw ConfigError("r must be at least " + std::to_string(min_r));
  if (4 * r >= n) throw ConfigError("r must satisfy r < n/4 (kappa = r/n has to be small)");
  return r;
}

Landscape landscape_for(const RunConfig& cfg) {
  Potential V(cfg.potential);
  return classify(EquilibriumMeasure::solve(V), require_a(cfg));
}

void check_expected_regime(const RunConfig& cfg, const Landscape& L) {
  if (cfg.regime && *cfg.regime != to_string(L.regime))
    throw ConfigError("requested regime " + *cfg.regime + " but the landscape is " + to_string(L.regime));
}

json base_report(const std::string& command, const RunConfig& cfg) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["config"] = cfg.to_json();
  return j;
}

json landscape_json(const Landscape& L) {
  json j;
  j["alpha"] = L.band().alpha;
  j["beta"] = L.band().beta;
  j["l1"] = L.em.l1();
  j["a"] = L.a;
  j["a_c"] = L.a_c;
  j["regime"] = to_string(L.regime);
  if (L.a_star) j["a_star"] = *L.a_star;
  if (L.b_star) j["b_star"] = *L.b_star;
  if (L.curvature_c) j["curvature_c"] = *L.curvature_c;
  j["l2"] = L.l2;
  j["x_max"] = L.x_max;
  if (L.chart_radius) j["chart_radius"] = *L.chart_radius;
  if (L.suppression_radius) j["suppression_radius"] = *L.suppression_radius;
  return j;
}

std::vector<double> grid_points(const Grid& g) {
  if (g.points < 2 || g.points > 2000) throw ConfigError("grid needs between 2 and 2000 points");
  if (!(g.max > g.min)) throw ConfigError("grid is empty: need min < max");
  std::vector<double> xs(g.points);
  for (int i = 0; i < g.points; ++i) xs[i] = g.min + (g.max - g.min) * i / (g.points - 1);
  return xs;
}

// Default prediction window: a* +- 0.3, shrunk to the certified chart.
Grid default_super_grid(const Landscape& L) {
  double half = std::min(0.3, 0.999 * L.chart_radius.value_or(0.3));
  return {*L.a_star - half, *L.a_star + half, 241};
}

Range default_count_range(const Landscape& L) {
  if (L.regime == Regime::Supercritical) return {*L.a_star - 0.3, *L.a_star + 0.3};
  if (L.regime == Regime::Subcritical) return {*L.b_star - 0.15, *L.b_star + 0.15};
  throw ConfigError("no default count window for regime " + to_string(L.regime));
}

OracleKernel build_oracle(const RunConfig& cfg, int n, int r) {
  if (cfg.precision_bits < 192) throw ConfigError("precision-bits below 192 is refused");
  OracleOptions opts;
  opts.precision_bits = cfg.precision_bits;
  return OracleKernel::build(Potential(cfg.potential), cfg.a.value_or(0.0), n, r, opts);
}

json suppression_json(const SuppressionStatement& s) {
  return json{{"center", s.center}, {"radius", s.radius}, {"claim", s.claim}, {"error_order", s.error_order}};
}

// Oracle checks against the local prediction.
json compare_oracle(const RunConfig& cfg, const Landscape& L, int n, int r) {
  OracleKernel K = build_oracle(cfg, n, r);
  json m;
  bool pass = true;
  if (L.regime == Regime::Supercritical) {
    double as = *L.a_star;
    double count = K.expected_count(as - 0.3, as + 0.3);
    bool count_ok = count >= 0.8 * r && count <= 1.2 * r;

    double peak = as, best = -1.0;
    for (int i = 0; i <= 600; ++i) {
      double x = as - 0.3 + 0.6 * i / 600;
      double v = K.kernel(x, x);
      if (v > best) best = v, peak = x;
    }
    bool peak_ok = std::abs(peak - as) <= 0.1;

    double half = std::min(0.2, 0.999 * L.chart_radius.value_or(0.2));
    double worst = 0.0, scale = 0.0;
    for (int i = 0; i <= 200; ++i) {
      double x = as - half + 2 * half * i / 200;
      double pred = n * predict_outlier_density(L, n, r, x);
      worst = std::max(worst, std::abs(K.kernel(x, x) - pred));
      scale = std::max(scale, pred);
    }
    double shape = worst / scale;
    bool shape_ok = shape <= 0.25;

    m["count_window"] = {as - 0.3, as + 0.3};
    m["expected_count"] = count;
    m["count_pass"] = count_ok;
    m["peak_location"] = peak;
    m["peak_pass"] = peak_ok;
    m["shape_window"] = {as - half, as + half};
    m["shape_discrepancy"] = shape;
    m["shape_pass"] = shape_ok;
    pass = count_ok && peak_ok && shape_ok;
  } else {
    double bs = *L.b_star;
    double count = K.expected_count(bs - 0.15, bs + 0.15);
    m["count_window"] = {bs - 0.15, bs + 0.15};
    m["expected_count"] = count;
    m["count_pass"] = count < 0.05;
    pass = count < 0.05;
  }
  m["trace"] = K.expected_count(K.domain_lo(), K.domain_hi());
  m["pass"] = pass;
  return m;
}

json compare_mc(const RunConfig& cfg, const Landscape& L, int n, int r) {
  json m;
  bool pass = true;
  if (L.regime == Regime::Supercritical) {
    McReport rep = outlier_stats(n, r, L.a, cfg.trials, cfg.seed, L);
    m["ks_distance"] = rep.ks_distance;
    if (r == 1) {
      OutlierLaw law = predict_outlier_law_r1(L, n);
      double mean = rep.outlier_means[0], var = rep.outlier_variances[0];
      bool mean_ok = std::abs(mean - law.mean) < 4.0 * std::sqrt(law.variance / cfg.trials);
      bool var_ok = std::abs(var - law.variance) <= 0.15 * law.variance;
      bool ks_ok = rep.ks_distance < 0.05;
      m["predicted_mean"] = law.mean;
      m["predicted_variance"] = law.variance;
      m["mean"] = mean;
      m["variance"] = var;
      m["mean_pass"] = mean_ok;
      m["variance_pass"] = var_ok;
      m["ks_pass"] = ks_ok;
      pass = mean_ok && var_ok && ks_ok;
    } else {
      bool ks_ok = rep.ks_distance < 0.06;
      m["outlier_means"] = rep.outlier_means;
      m["ks_pass"] = ks_ok;
      pass = ks_ok;
    }
  } else {
    double threshold = cfg.threshold.value_or(*L.b_star - 0.1);
    double rate = subcritical_escape_rate(n, r, L.a, cfg.trials, cfg.seed, threshold, L);
    m["threshold"] = threshold;
    m["escape_rate"] = rate;
    m["escape_pass"] = rate < 0.01;
    pass = rate < 0.01;
  }
  m["pass"] = pass;
  return m;
}

}  // namespace

Grid parse_grid(const std::string& spec) {
  auto parts = split(spec, ':');
  if (parts.size() != 3) throw ConfigError("grid must look like min:max:points");
  Grid g{to_double(parts[0], "grid"), to_double(parts[1], "grid"), to_int(parts[2], "grid")};
  grid_points(g);
  return g;
}

Range parse_range(const std::string& spec) {
  auto parts = split(spec, ':');
  if (parts.size() != 2) throw ConfigError("range must look like lo:hi");
  Range r{to_double(parts[0], "range"), to_double(parts[1], "range")};
  if (!(r.hi > r.lo)) throw ConfigError("range is empty: need lo < hi");
  return r;
}

json RunConfig::to_json() const {
  json j;
  j["potential"] = potential;
  j["a"] = a ? json(*a) : json(nullptr);
  j["n"] = n ? json(*n) : json(nullptr);
  j["r"] = r ? json(*r) : json(nullptr);
  j["trials"] = trials;
  j["seed"] = seed;
  j["precision-bits"] = precision_bits;
  j["grid"] = grid ? json(fmt(grid->min) + ":" + fmt(grid->max) + ":" + std::to_string(grid->points))
                   : json(nullptr);
  json c = json::array();
  for (const auto& rg : counts) c.push_back(fmt(rg.lo) + ":" + fmt(rg.hi));
  j["count"] = c;
  j["threshold"] = threshold ? json(*threshold) : json(nullptr);
  j["against"] = against;
  j["regime"] = regime ? json(*regime) : json(nullptr);
  j["sweep"] = sweep ? json(*sweep) : json(nullptr);
  j["format"] = format;
  j["force"] = force;
  return j;
}

void RunConfig::merge_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& k = it.key();
      const json& v = it.value();
      if (v.is_null()) continue;
      if (k == "potential") potential = v.get<std::vector<double>>();
      else if (k == "a") a = v.get<double>();
      else if (k == "n") n = v.get<int>();
      else if (k == "r") r = v.get<int>();
      else if (k == "trials") trials = v.get<int>();
      else if (k == "seed") seed = v.get<std::uint64_t>();
      else if (k == "precision-bits") precision_bits = v.get<int>();
      else if (k == "grid") grid = parse_grid(v.get<std::string>());
      else if (k == "count") {
        counts.clear();
        for (const auto& s : v) counts.push_back(parse_range(s.get<std::string>()));
      } else if (k == "threshold") threshold = v.get<double>();
      else if (k == "against") against = v.get<std::string>();
      else if (k == "regime") regime = v.get<std::string>();
      else if (k == "sweep") sweep = v.get<std::string>();
      else if (k == "out") out = v.get<std::string>();
      else if (k == "format") format = v.get<std::string>();
      else if (k == "force") force = v.get<bool>();
      else if (k == "timing") timing = v.get<bool>();
      else throw ConfigError("unknown config key '" + k + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

CommandOutput cmd_analyze(const RunConfig& cfg) {
  Potential V(cfg.potential);
  EquilibriumMeasure em = EquilibriumMeasure::solve(V);
  json rep = base_report("analyze", cfg);
  if (!cfg.sweep) {
    Landscape L = classify(em, require_a(cfg));
    check_expected_regime(cfg, L);
    rep.update(landscape_json(L));
    return {rep, {}};
  }
  const std::string& s = *cfg.sweep;
  if (s.rfind("a=", 0) != 0) throw ConfigError("sweep must look like a=start:stop:steps");
  auto parts = split(s.substr(2), ':');
  if (parts.size() != 3) throw ConfigError("sweep must look like a=start:stop:steps");
  double start = to_double(parts[0], "sweep"), stop = to_double(parts[1], "sweep");
  int steps = to_int(parts[2], "sweep");
  if (steps < 1 || steps > 10000) throw ConfigError("sweep needs between 1 and 10000 steps");
  rep["alpha"] = em.band().alpha;
  rep["beta"] = em.band().beta;
  rep["l1"] = em.l1();
  rep["a_c"] = critical_a(em);
  json rows = json::array();
  std::ostringstream csv;
  csv << "a,regime,a_star,b_star\n";
  for (int i = 0; i < steps; ++i) {
    double a = steps == 1 ? start : start + (stop - start) * i / (steps - 1);
    try {
      Landscape L = classify(em, a);
      rows.push_back(landscape_json(L));
      csv << fmt(a) << ',' << to_string(L.regime) << ',' << (L.a_star ? fmt(*L.a_star) : "") << ','
          << (L.b_star ? fmt(*L.b_star) : "") << '\n';
    } catch (const std::exception& e) {
      rows.push_back(json{{"a", a}, {"error", e.what()}});
      csv << fmt(a) << ",error,,\n";
    }
  }
  rep["sweep_results"] = rows;
  return {rep, csv.str()};
}

CommandOutput cmd_predict(const RunConfig& cfg) {
  int n = require_n(cfg);
  int r = checked_r(cfg, n);
  Landscape L = landscape_for(cfg);
  check_expected_regime(cfg, L);
  json rep = base_report("predict", cfg);
  rep["landscape"] = landscape_json(L);
  if (L.regime == Regime::Subcritical) {
    rep["suppression"] = suppression_json(predict_subcritical(L, n, r));
    return {rep, {}};
  }
  if (L.regime != Regime::Supercritical)
    throw ConfigError("no prediction in the " + to_string(L.regime) + " regime");
  Grid g = cfg.grid.value_or(default_super_grid(L));
  grid_points(g);
  PredictionReport pr = predict(L, n, r, g.min, g.max, g.points);
  rep["x_min"] = pr.x_min;
  rep["x_max"] = pr.x_max;
  rep["points"] = g.points;
  rep["integrated_mass"] = pr.integrated_mass;
  rep["error_order"] = pr.error_order;
  if (pr.law_r1) rep["law_r1"] = json{{"mean", pr.law_r1->mean}, {"variance", pr.law_r1->variance}};
  std::ostringstream csv;
  csv << "x,density\n";
  for (const auto& s : pr.density) csv << fmt(s.x) << ',' << fmt(s.value) << '\n';
  return {rep, csv.str()};
}

CommandOutput cmd_oracle(const RunConfig& cfg) {
  int n = require_n(cfg);
  int r = cfg.r.value_or(1);
  if (r < 0) throw ConfigError("r must be non-negative");
  if (r > 0 && 4 * r >= n) throw ConfigError("r must satisfy r < n/4 (kappa = r/n has to be small)");
  if (r > 0) require_a(cfg);
  OracleKernel K = build_oracle(cfg, n, r);

  std::vector<Range> ranges = cfg.counts;
  if (ranges.empty() && r > 0) {
    try {
      ranges.push_back(default_count_range(landscape_for(cfg)));
    } catch (const std::exception&) {
      // no natural window; only the trace is reported
    }
  }
  json rep = base_report("oracle", cfg);
  rep["n"] = K.n();
  rep["r"] = K.r();
  rep["precision_bits"] = K.precision_bits();
  rep["domain"] = {K.domain_lo(), K.domain_hi()};
  rep["quadrature_nodes"] = K.quadrature_nodes();
  rep["gram_residual"] = K.gram_residual();
  rep["trace"] = K.expected_count(K.domain_lo(), K.domain_hi());
  json counts = json::array();
  for (const auto& rg : ranges) {
    double lo = std::max(rg.lo, K.domain_lo()), hi = std::min(rg.hi, K.domain_hi());
    double c = hi > lo ? K.expected_count(lo, hi) : 0.0;
    counts.push_back(json{{"lo", rg.lo}, {"hi", rg.hi}, {"expected_count", c}});
  }
  rep["expected_counts"] = counts;

  Grid g = cfg.grid.value_or(Grid{K.domain_lo(), K.domain_hi(), 401});
  std::ostringstream csv;
  csv << "x,density\n";
  for (double x : grid_points(g)) {
    double v = (x >= K.domain_lo() && x <= K.domain_hi()) ? K.kernel(x, x) : 0.0;
    csv << fmt(x) << ',' << fmt(v) << '\n';
  }
  return {rep, csv.str()};
}

CommandOutput cmd_mc(const RunConfig& cfg) {
  Potential V(cfg.potential);
  if (V.degree() != 2) throw ConfigError("MC requires Gaussian potential (quadratic V)");
  int n = require_n(cfg);
  int r = checked_r(cfg, n);
  if (cfg.trials < 1) throw ConfigError("trials must be positive");
  Landscape L = landscape_for(cfg);
  check_expected_regime(cfg, L);
  json rep = base_report("mc", cfg);
  rep["regime"] = to_string(L.regime);
  std::ostringstream csv;
  if (L.regime == Regime::Supercritical) {
    McReport m = outlier_stats(n, r, L.a, cfg.trials, cfg.seed, L);
    rep["a_star"] = *L.a_star;
    rep["outlier_means"] = m.outlier_means;
    rep["outlier_variances"] = m.outlier_variances;
    rep["ks_distance"] = m.ks_distance;
    if (r == 1) {
      OutlierLaw law = predict_outlier_law_r1(L, n);
      rep["predicted"] = json{{"mean", law.mean}, {"variance", law.variance}};
    }
    if (cfg.timing) rep["wall_time"] = m.wall_time;
    csv << "trial,rank,lambda\n";
    for (std::size_t t = 0; t < m.top.size(); ++t)
      for (std::size_t k = 0; k < m.top[t].size(); ++k) csv << t << ',' << k + 1 << ',' << fmt(m.top[t][k]) << '\n';
  } else if (L.regime == Regime::Subcritical) {
    double threshold = cfg.threshold.value_or(*L.b_star - 0.1);
    rep["b_star"] = *L.b_star;
    rep["threshold"] = threshold;
    rep["escape_rate"] = subcritical_escape_rate(n, r, L.a, cfg.trials, cfg.seed, threshold, L, cfg.force);
  } else {
    throw ConfigError("MC statistics need a supercritical or subcritical landscape, got " + to_string(L.regime));
  }
  return {rep, csv.str()};
}

CommandOutput cmd_compare(const RunConfig& cfg) {
  int n = require_n(cfg);
  int r = checked_r(cfg, n);
  Landscape L = landscape_for(cfg);
  check_expected_regime(cfg, L);
  if (L.regime != Regime::Supercritical && L.regime != Regime::Subcritical)
    throw ConfigError("nothing to compare in the " + to_string(L.regime) + " regime");
  json rep = base_report("compare", cfg);
  rep["landscape"] = landscape_json(L);
  if (L.regime == Regime::Supercritical) {
    Grid g = default_super_grid(L);
    PredictionReport pr = predict(L, n, r, g.min, g.max, g.points);
    rep["predicted_mass"] = pr.integrated_mass;
  } else {
    rep["suppression"] = suppression_json(predict_subcritical(L, n, r));
  }
  json metrics;
  if (cfg.against == "oracle") metrics = compare_oracle(cfg, L, n, r);
  else if (cfg.against == "mc") {
    if (Potential(cfg.potential).degree() != 2) throw ConfigError("MC requires Gaussian potential (quadratic V)");
    metrics = compare_mc(cfg, L, n, r);
  } else
    throw ConfigError("--against must be oracle or mc");
  rep["against"] = cfg.against;
  rep["metrics"] = metrics;
  rep["verdict"] = metrics["pass"].get<bool>() ? "pass" : "fail";
  return {rep, {}};
}

void write_atomically(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw ConfigError("cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw ConfigError("cannot rename onto " + path + ": " + ec.message());
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Outlier eigenvalues of random matrices with an external source"};
  app.require_subcommand(1);

  std::string potential_s, grid_s, sweep_s, regime_s, against_s, format_s, config_path, out_path;
  std::vector<std::string> count_s;
  double a = 0, threshold = 0;
  int n = 0, r = 0, trials = 0, precision = 0;
  std::uint64_t seed = 0;
  bool force = false, timing = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--potential", potential_s, "JSON array of coefficients, lowest degree first");
    sub->add_option("--a", a, "source strength");
    sub->add_option("--n", n, "matrix size");
    sub->add_option("--r", r, "rank of the source");
    sub->add_option("--trials", trials, "Monte Carlo trials");
    sub->add_option("--seed", seed, "Monte Carlo seed");
    sub->add_option("--precision-bits", precision, "oracle working precision");
    sub->add_option("--grid", grid_s, "min:max:points");
    sub->add_option("--count", count_s, "lo:hi window for oracle expected counts");
    sub->add_option("--threshold", threshold, "escape threshold for subcritical MC");
    sub->add_option("--regime", regime_s, "expected regime; mismatch is an error");
    sub->add_option("--out", out_path, "output path (stdout when absent)");
    sub->add_option("--format", format_s, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--config", config_path, "JSON config file; flags override it");
    sub->add_flag("--force", force, "run MC escape statistics outside the subcritical regime");
    sub->add_flag("--timing", timing, "include wall time in MC reports");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "equilibrium measure and regime");
  CLI::App* predict_c = app.add_subcommand("predict", "predicted outlier density");
  CLI::App* oracle = app.add_subcommand("oracle", "exact finite-n kernel");
  CLI::App* mc = app.add_subcommand("mc", "Monte Carlo sampling");
  CLI::App* compare = app.add_subcommand("compare", "prediction against oracle or Monte Carlo");
  for (CLI::App* s : {analyze, predict_c, oracle, mc, compare}) add_common(s);
  analyze->add_option("--sweep", sweep_s, "a=start:stop:steps");
  compare->add_option("--against", against_s, "oracle or mc");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  auto given = [&](const char* name) { return sub->count(name) > 0; };
  try {
    RunConfig cfg;
    if (given("--config")) {
      std::ifstream f(config_path);
      if (!f) throw ConfigError("cannot read config " + config_path);
      json j;
      try {
        j = json::parse(f);
      } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
      }
      cfg.merge_json(j);
    }
    if (given("--potential")) {
      try {
        cfg.potential = json::parse(potential_s).get<std::vector<double>>();
      } catch (const json::exception&) {
        throw ConfigError("--potential must be a JSON array of numbers");
      }
    }
    if (given("--a")) cfg.a = a;
    if (given("--n")) cfg.n = n;
    if (given("--r")) cfg.r = r;
    if (given("--trials")) cfg.trials = trials;
    if (given("--seed")) cfg.seed = seed;
    if (given("--precision-bits")) cfg.precision_bits = precision;
    if (given("--grid")) cfg.grid = parse_grid(grid_s);
    if (given("--count")) {
      cfg.counts.clear();
      for (const auto& s : count_s) cfg.counts.push_back(parse_range(s));
    }
    if (given("--threshold")) cfg.threshold = threshold;
    if (given("--regime")) cfg.regime = regime_s;
    if (given("--out")) cfg.out = out_path;
    if (given("--format")) cfg.format = format_s;
    if (given("--force")) cfg.force = true;
    if (given("--timing")) cfg.timing = true;
    if (sub == analyze && given("--sweep")) cfg.sweep = sweep_s;
    if (sub == compare && given("--against")) cfg.against = against_s;
    if (cfg.format != "json" && cfg.format != "csv") throw ConfigError("--format must be json or csv");

    CommandOutput result;
    if (sub == analyze) result = cmd_analyze(cfg);
    else if (sub == predict_c) result = cmd_predict(cfg);
    else if (sub == oracle) result = cmd_oracle(cfg);
    else if (sub == mc) result = cmd_mc(cfg);
    else result = cmd_compare(cfg);

    std::string text;
    if (cfg.format == "csv") {
      if (result.csv.empty()) throw ConfigError("this command produced no grid; use --format json");
      text = result.csv;
    } else {
      text = result.report.dump(2) + "\n";
    }
    if (cfg.out.empty()) out << text;
    else write_atomically(cfg.out, text);
    return 0;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const MathError& e) {
    err << "math error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace outlier
