#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "hpm/blowup.hpp"
#include "hpm/inequalities.hpp"
#include "hpm/measure.hpp"
#include "hpm/metric.hpp"
#include "hpm/particle.hpp"
#include "hpm/transport.hpp"

namespace hpm::cli {

using nlohmann::json;
using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c = {"verify-lemma-4-2", "verify-section-3", "doubling-scan", "cone-distance",
                                             "blowup",           "lewy-demo",        "fr-metric"};
  return c;
}

ConfigError::ConfigError(std::vector<std::string> d)
    : std::runtime_error(d.empty() ? "invalid config" : d.front()), diagnostics(std::move(d)) {}

namespace {

enum class Kind { integer, positive_integer, number, positive_number, boolean, string, poly, radii };

// Options accepted in each command's section.
const std::map<std::string, std::map<std::string, Kind>>& section_schema() {
  static const std::map<std::string, std::map<std::string, Kind>> s = {
      {"verify-lemma-4-2", {{"tolerance", Kind::positive_number}, {"side_tolerance", Kind::positive_number}}},
      {"verify-section-3",
       {{"max_degree", Kind::positive_integer},
        {"polynomials_per_degree", Kind::positive_integer},
        {"pairs_per_polynomial", Kind::positive_integer},
        {"points_per_polynomial", Kind::positive_integer}}},
      {"doubling-scan",
       {{"tau", Kind::positive_number}, {"steps", Kind::positive_integer}, {"margin", Kind::positive_number}}},
      {"cone-distance",
       {{"k", Kind::positive_integer},
        {"restarts", Kind::positive_integer},
        {"max_iterations", Kind::positive_integer},
        {"grid", Kind::positive_integer},
        {"cell", Kind::number},
        {"simplex_tol", Kind::positive_number}}},
      {"blowup", {{"limit", Kind::poly}, {"grid", Kind::positive_integer}, {"zero_grid", Kind::positive_integer}}},
      {"lewy-demo",
       {{"nodal_level", Kind::integer}, {"max_level", Kind::positive_integer}, {"dump_level", Kind::integer}}},
      {"fr-metric",
       {{"other", Kind::poly},
        {"R", Kind::positive_number},
        {"grid", Kind::positive_integer},
        {"terms", Kind::integer}}},
  };
  return s;
}

const std::map<std::string, Kind>& top_schema() {
  static const std::map<std::string, Kind> s = {{"command", Kind::string}, {"polynomial", Kind::poly},
                                                {"dim", Kind::positive_integer}, {"rule_level", Kind::positive_integer},
                                                {"radii", Kind::radii},      {"seed", Kind::integer},
                                                {"output", Kind::string}};
  return s;
}

void check_kind(const std::string& where, const json& v, Kind kind, std::vector<std::string>& out) {
  auto bad = [&](const std::string& what) { out.push_back(where + ": expected " + what); };
  switch (kind) {
    case Kind::integer:
      if (!v.is_number_integer()) bad("an integer");
      break;
    case Kind::positive_integer:
      if (!v.is_number_integer() || v.get<long long>() < 1) bad("a positive integer");
      break;
    case Kind::number:
      if (!v.is_number()) bad("a number");
      break;
    case Kind::positive_number:
      if (!v.is_number() || !(v.get<double>() > 0.0)) bad("a positive number");
      break;
    case Kind::boolean:
      if (!v.is_boolean()) bad("true or false");
      break;
    case Kind::string:
      if (!v.is_string()) bad("a string");
      break;
    case Kind::poly:
      if (v.is_string()) break;
      if (v.is_object() && v.contains("file") && v.size() == 1 && v["file"].is_string()) break;
      if (v.is_object() && v.contains("terms") && v.contains("dim")) break;
      bad("polynomial text, {\"dim\", \"terms\"} or {\"file\": path}");
      break;
    case Kind::radii:
      if (v.is_array()) {
        if (v.empty()) bad("a non-empty list of radii");
        for (const auto& r : v)
          if (!r.is_number() || !(r.get<double>() > 0.0)) {
            bad("positive radii");
            break;
          }
        break;
      }
      if (v.is_object()) {
        std::vector<std::string> sub;
        for (auto key : {"min", "max"})
          if (!v.contains(key) || !v[key].is_number() || !(v[key].get<double>() > 0.0))
            sub.push_back(where + "." + key + ": expected a positive number");
        if (!v.contains("steps") || !v["steps"].is_number_integer() || v["steps"].get<long long>() < 2)
          sub.push_back(where + ".steps: expected an integer >= 2");
        for (auto it = v.begin(); it != v.end(); ++it)
          if (it.key() != "min" && it.key() != "max" && it.key() != "steps")
            sub.push_back(where + "." + it.key() + ": unknown key");
        if (sub.empty() && !(v["min"].get<double>() < v["max"].get<double>())) sub.push_back(where + ": min must be < max");
        out.insert(out.end(), sub.begin(), sub.end());
        break;
      }
      bad("a list of radii or {\"min\", \"max\", \"steps\"}");
      break;
  }
}

std::string now_utc() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

Poly resolve_poly(const json& v, int dim, const fs::path& base) {
  if (v.is_string()) {
    auto text = v.get<std::string>();
    if (text == "lewy") return lewy_polynomial();
    return parse_poly(text, dim);
  }
  if (v.contains("file")) {
    fs::path p = v["file"].get<std::string>();
    if (p.is_relative()) p = base / p;
    std::ifstream in(p);
    if (!in) throw ConfigError({"polynomial file not readable: " + p.string()});
    json inner;
    try {
      inner = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError({"polynomial file " + p.string() + ": " + e.what()});
    }
    if (inner.is_object() && inner.contains("file")) throw ConfigError({"polynomial file may not point to another file"});
    return resolve_poly(inner, dim, base);
  }
  return poly_from_json(v);
}

std::vector<double> resolve_radii(const json& v) {
  if (v.is_array()) return v.get<std::vector<double>>();
  double lo = v["min"].get<double>(), hi = v["max"].get<double>();
  int steps = v["steps"].get<int>();
  std::vector<double> r;
  for (int i = 0; i < steps; ++i) r.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (steps - 1)));
  return r;
}

template <class T>
T opt_or(const json& section, const char* key, T fallback) {
  return section.contains(key) ? section[key].get<T>() : fallback;
}

}  // namespace

std::vector<std::string> validate(const json& j) {
  std::vector<std::string> out;
  if (!j.is_object()) return {"config: expected a JSON object"};
  const auto& top = top_schema();
  const auto& sections = section_schema();
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& key = it.key();
    if (auto t = top.find(key); t != top.end()) {
      check_kind(key, it.value(), t->second, out);
      continue;
    }
    if (auto s = sections.find(key); s != sections.end()) {
      if (!it.value().is_object()) {
        out.push_back(key + ": expected an object of options");
        continue;
      }
      for (auto o = it.value().begin(); o != it.value().end(); ++o) {
        auto k = s->second.find(o.key());
        if (k == s->second.end())
          out.push_back(key + "." + o.key() + ": unknown option");
        else
          check_kind(key + "." + o.key(), o.value(), k->second, out);
      }
      continue;
    }
    out.push_back(key + ": unknown key");
  }
  if (j.contains("command") && j["command"].is_string()) {
    auto c = j["command"].get<std::string>();
    if (std::find(commands().begin(), commands().end(), c) == commands().end()) out.push_back("command: unknown command '" + c + "'");
  }
  if (j.contains("seed") && j["seed"].is_number_integer() && !j["seed"].is_number_unsigned() &&
      j["seed"].get<long long>() < 0)
    out.push_back("seed: expected a non-negative integer");
  return out;
}

ExperimentConfig load_config(const json& j, const Invocation& inv, const fs::path& base) {
  auto diag = validate(j);
  std::string command = inv.command;
  if (j.contains("command") && j["command"].is_string()) {
    auto c = j["command"].get<std::string>();
    if (!command.empty() && command != c) diag.push_back("command: config says '" + c + "' but '" + command + "' was requested");
    if (command.empty()) command = c;
  }
  if (command.empty()) diag.push_back("command: missing (give it on the command line or in the config)");
  else if (std::find(commands().begin(), commands().end(), command) == commands().end())
    diag.push_back("command: unknown command '" + command + "'");
  if (!diag.empty()) throw ConfigError(diag);

  ExperimentConfig cfg;
  cfg.command = command;
  cfg.dim = opt_or(j, "dim", 3);
  if (cfg.dim < 2) diag.push_back("dim: expected an integer >= 2");
  cfg.rule_level = opt_or(j, "rule_level", 24);
  if (j.contains("radii")) cfg.radii = resolve_radii(j["radii"]);
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (inv.seed) cfg.seed = inv.seed;
  cfg.output = !inv.out_dir.empty() ? fs::path(inv.out_dir) : fs::path(opt_or<std::string>(j, "output", "."));
  cfg.section = j.contains(command) ? j[command] : json::object();
  for (const auto& other : commands())
    if (other != command && j.contains(other)) diag.push_back(other + ": section does not apply to command '" + command + "'");
  if (j.contains("polynomial")) {
    try {
      cfg.polynomial = resolve_poly(j["polynomial"], cfg.dim, base);
    } catch (const ConfigError& e) {
      diag.insert(diag.end(), e.diagnostics.begin(), e.diagnostics.end());
    } catch (const std::exception& e) {
      diag.push_back(std::string("polynomial: ") + e.what());
    }
  }
  for (auto key : {"limit", "other"}) {
    if (cfg.section.contains(key)) {
      try {
        (void)resolve_poly(cfg.section[key], cfg.dim, base);
      } catch (const ConfigError& e) {
        diag.insert(diag.end(), e.diagnostics.begin(), e.diagnostics.end());
      } catch (const std::exception& e) {
        diag.push_back(command + "." + key + ": " + e.what());
      }
    }
  }
  bool stochastic = command == "cone-distance" || command == "verify-section-3" || cfg.dim >= 4;
  if (stochastic && !cfg.seed) diag.push_back("seed: required for '" + command + "' (config \"seed\" or --seed)");
  if (!diag.empty()) throw ConfigError(diag);
  return cfg;
}

namespace {

struct Outcome {
  json result;
  bool ok = true;
  std::map<std::string, std::string> csv;  // file name → body (without the timestamp line)
};

PolyMeasure measure_of(const ExperimentConfig& cfg, const char* fallback) {
  return PolyMeasure(cfg.polynomial ? *cfg.polynomial : parse_poly(fallback, 3));
}

Outcome verify_closed_form_ball(const ExperimentConfig& cfg) {
  Outcome o;
  PolyMeasure m = cfg.polynomial ? PolyMeasure(*cfg.polynomial) : PolyMeasure(lewy_polynomial());
  if (!m.homogeneous()) throw ConfigError({"polynomial: verify-lemma-4-2 needs a homogeneous polynomial"});
  double tol = opt_or(cfg.section, "tolerance", 1e-6);
  double side_tol = opt_or(cfg.section, "side_tolerance", 1e-8);
  auto rule = build_rule(m.dim(), cfg.rule_level, cfg.seed.value_or(0));
  double l1 = l1_norm_sphere(m.poly(), rule);
  std::vector<double> radii = cfg.radii.value_or(std::vector<double>{0.5, 1.0, 2.0});
  json rows = json::array();
  double max_rel = 0, max_gap = 0;
  for (double r : radii) {
    auto s = ball_measure_sides(m, r, rule);
    double closed = homogeneous_ball_measure(m, r, l1);
    double rel = std::abs(s.value - closed) / closed;
    double gap = std::abs(s.plus_side - s.minus_side) / std::max(std::abs(s.plus_side), 1e-300);
    max_rel = std::max(max_rel, rel);
    max_gap = std::max(max_gap, gap);
    rows.push_back({{"r", r}, {"quadrature", s.value}, {"closed_form", closed}, {"plus_side", s.plus_side},
                    {"minus_side", s.minus_side}, {"relative_error", rel}, {"side_gap", gap}});
  }
  o.ok = max_rel <= tol && max_gap <= side_tol;
  o.result = {{"polynomial", m.poly().to_string()}, {"degree", m.top_degree()}, {"l1_norm", l1},
              {"rows", rows}, {"max_relative_error", max_rel}, {"max_side_gap", max_gap},
              {"tolerance", tol}, {"side_tolerance", side_tol}};
  return o;
}

Outcome verify_sphere_inequalities(const ExperimentConfig& cfg) {
  InequalityOptions opt;
  opt.n = cfg.dim;
  opt.rule_level = cfg.rule_level;
  opt.seed = *cfg.seed;
  opt.max_degree = opt_or(cfg.section, "max_degree", opt.max_degree);
  opt.polynomials_per_degree = opt_or(cfg.section, "polynomials_per_degree", opt.polynomials_per_degree);
  opt.pairs_per_polynomial = opt_or(cfg.section, "pairs_per_polynomial", opt.pairs_per_polynomial);
  opt.points_per_polynomial = opt_or(cfg.section, "points_per_polynomial", opt.points_per_polynomial);
  auto rep = inequality_suite(opt);
  Outcome o;
  o.result = to_json(rep);
  o.ok = rep.total_violations() == 0;
  return o;
}

Outcome doubling(const ExperimentConfig& cfg) {
  PolyMeasure m = measure_of(cfg, "x*y + x");
  auto rule = build_rule(m.dim(), cfg.rule_level, cfg.seed.value_or(0));
  ClassifyOptions copt;
  copt.tau = opt_or(cfg.section, "tau", copt.tau);
  copt.steps = opt_or(cfg.section, "steps", copt.steps);
  copt.margin = opt_or(cfg.section, "margin", copt.margin);
  if (!(copt.tau > 1.0)) throw ConfigError({"doubling-scan.tau: expected a number > 1"});
  if (copt.steps < 4) throw ConfigError({"doubling-scan.steps: expected an integer >= 4"});
  auto cls = degree_classify(m, rule, copt);
  DoublingScan scan = cls.scan;
  if (cfg.radii) {
    auto rr = *cfg.radii;
    double lo = *std::min_element(rr.begin(), rr.end()), hi = *std::max_element(rr.begin(), rr.end());
    if (!(lo < hi)) throw ConfigError({"radii: need at least two distinct radii"});
    scan = doubling_scan(m, copt.tau, lo, hi, copt.steps, rule);
  }
  std::ostringstream csv;
  write_csv(csv, scan);
  Outcome o;
  o.csv["doubling_scan.csv"] = csv.str();
  o.result = {{"polynomial", m.poly().to_string()},
              {"tau", scan.tau},
              {"r_min", scan.radii.front()},
              {"r_max", scan.radii.back()},
              {"exponent_at_zero", scan.exponent_at_zero},
              {"exponent_at_infinity", scan.exponent_at_infinity},
              {"residual_at_zero", scan.residual_at_zero},
              {"residual_at_infinity", scan.residual_at_infinity},
              {"classification", {{"j", cls.j}, {"d", cls.d}, {"status", to_string(cls.status)}, {"note", cls.note}}}};
  o.ok = cls.status != ClassifyStatus::mismatch;
  return o;
}

Outcome cone(const ExperimentConfig& cfg) {
  PolyMeasure m = measure_of(cfg, "x*y + x");
  ConeOptions opt;
  opt.seed = *cfg.seed;
  opt.restarts = opt_or(cfg.section, "restarts", opt.restarts);
  opt.max_iterations = opt_or(cfg.section, "max_iterations", opt.max_iterations);
  opt.grid = opt_or(cfg.section, "grid", opt.grid);
  opt.cell = opt_or(cfg.section, "cell", opt.cell);
  opt.simplex_tol = opt_or(cfg.section, "simplex_tol", opt.simplex_tol);
  if (opt.cell < 0) throw ConfigError({"cone-distance.cell: expected a number >= 0"});
  int k = opt_or(cfg.section, "k", 1);
  auto radii = cfg.radii.value_or(std::vector<double>{0.1, 1.0, 10.0});
  auto rep = separation_experiment(m.poly(), k, radii, opt);
  auto eps = epsilon_table(m.dim(), std::max(m.top_degree(), k));
  bool normalized = true;
  for (double f : rep.best_f_r) normalized = normalized && std::abs(f - 1.0) <= 1e-6;
  bool consistent = m.top_degree() == k || rep.witness_radius.has_value();
  Outcome o;
  o.result = {{"polynomial", m.poly().to_string()}, {"separation", to_json(rep)}, {"epsilon_table", to_json(eps)},
              {"normalized", normalized}, {"consistent", consistent},
              {"options", {{"restarts", opt.restarts}, {"max_iterations", opt.max_iterations}, {"grid", opt.grid},
                           {"cell", opt.cell}, {"simplex_tol", opt.simplex_tol}}}};
  o.ok = normalized && consistent;
  return o;
}

Outcome blow(const ExperimentConfig& cfg, const fs::path& base) {
  PolyMeasure m = measure_of(cfg, "x*y + x");
  Poly limit = cfg.section.contains("limit") ? resolve_poly(cfg.section["limit"], cfg.dim, base)
                                             : m.decomp().part(m.bottom_degree());
  BlowupOptions opt;
  opt.grid = opt_or(cfg.section, "grid", opt.grid);
  opt.zero_grid = opt_or(cfg.section, "zero_grid", opt.zero_grid);
  auto radii = cfg.radii.value_or(std::vector<double>{1e-1, 1e-2, 1e-3});
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] < radii[i - 1])) throw ConfigError({"radii: blow-up radii must be strictly decreasing"});
  auto rule = build_rule(m.dim(), cfg.rule_level, cfg.seed.value_or(0));
  auto rows = blowup_report(m, limit, radii, rule, opt);
  std::ostringstream csv;
  write_csv(csv, rows);
  json jr = json::array();
  bool monotone = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    jr.push_back({{"r", rows[i].r}, {"f1_distance", rows[i].f1_distance}, {"hausdorff", rows[i].hausdorff},
                  {"resolution", rows[i].resolution}});
    if (i > 0 && rows[i].f1_distance > rows[i - 1].f1_distance) monotone = false;
  }
  Outcome o;
  o.csv["blowup.csv"] = csv.str();
  o.result = {{"polynomial", m.poly().to_string()}, {"limit", limit.to_string()}, {"rows", jr},
              {"f1_non_increasing", monotone}};
  return o;
}

Outcome lewy(const ExperimentConfig& cfg) {
  if (cfg.polynomial) throw ConfigError({"polynomial: lewy-demo always uses the Lewy cubic"});
  Poly h = lewy_polynomial();
  int start = opt_or(cfg.section, "nodal_level", 3);
  int max_level = opt_or(cfg.section, "max_level", 8);
  int dump = opt_or(cfg.section, "dump_level", 4);
  if (start < 0 || dump < 0 || max_level < start) throw ConfigError({"lewy-demo: levels must satisfy 0 <= nodal_level <= max_level"});
  bool harmonic = laplacian(h).is_zero();
  auto nodal = nodal_components_s2(h, start, max_level);
  auto rule = build_rule(3, cfg.rule_level, cfg.seed.value_or(0));
  auto cls = degree_classify(PolyMeasure(h), rule);
  auto s = ball_measure_sides(PolyMeasure(h), 1.0, rule);
  std::ostringstream csv;
  write_nodal_csv(csv, h, dump);
  Outcome o;
  o.csv["nodal.csv"] = csv.str();
  o.result = {{"polynomial", h.to_string()},
              {"laplacian_is_zero", harmonic},
              {"nodal_components", nodal.count ? json(*nodal.count) : json(nullptr)},
              {"nodal_counts", nodal.counts},
              {"nodal_level", nodal.level},
              {"classification", {{"j", cls.j}, {"d", cls.d}, {"status", to_string(cls.status)}}},
              {"ball_measure_r1", {{"plus_side", s.plus_side}, {"minus_side", s.minus_side}}}};
  o.ok = harmonic && nodal.count == 2 && cls.j == 3 && cls.d == 3 && cls.status == ClassifyStatus::ok;
  return o;
}

Outcome fr(const ExperimentConfig& cfg, const fs::path& base) {
  PolyMeasure a = measure_of(cfg, "x");
  PolyMeasure b(cfg.section.contains("other") ? resolve_poly(cfg.section["other"], cfg.dim, base) : parse_poly("x*y + x", 3));
  if (a.dim() != b.dim()) throw ConfigError({"fr-metric.other: dimension differs from polynomial"});
  auto radii = cfg.radii.value_or(std::vector<double>{0.25, 0.5, 1.0});
  int terms = opt_or(cfg.section, "terms", 0);
  if (terms < 0) throw ConfigError({"fr-metric.terms: expected a non-negative integer"});
  double R = opt_or(cfg.section, "R", std::max(*std::max_element(radii.begin(), radii.end()), static_cast<double>(terms)));
  if (*std::max_element(radii.begin(), radii.end()) > R || terms > R)
    throw ConfigError({"fr-metric.R: truncation radius smaller than the largest radius"});
  DiscretizeOptions dopt;
  dopt.grid = opt_or(cfg.section, "grid", 32);
  auto mu = discretize(a, R, dopt), nu = discretize(b, R, dopt);
  json rows = json::array();
  bool converged = true;
  for (double r : radii) {
    auto d = f_r_distance_detail(mu, nu, r);
    converged = converged && d.converged;
    rows.push_back({{"r", r}, {"f_r_distance", d.value}, {"f_r_mu", f_r_of(mu, r)}, {"f_r_nu", f_r_of(nu, r)},
                    {"rounds", d.rounds}, {"converged", d.converged}});
  }
  Outcome o;
  std::ostringstream cm, cn;
  write_csv(cm, mu);
  write_csv(cn, nu);
  o.csv["mu.csv"] = cm.str();
  o.csv["nu.csv"] = cn.str();
  o.result = {{"mu", a.poly().to_string()}, {"nu", b.poly().to_string()}, {"R", R}, {"grid", dopt.grid},
              {"rows", rows}, {"mu_sidecar", sidecar(mu)}, {"nu_sidecar", sidecar(nu)}};
  if (terms > 0) o.result["weak_metric"] = {{"terms", terms}, {"value", weak_metric(mu, nu, terms)}};
  o.ok = converged;
  return o;
}

void write_file(const fs::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << body;
  if (!out) throw std::runtime_error("write failed: " + p.string());
}

}  // namespace

int run(const Invocation& inv, std::ostream& log, std::ostream& err) {
  if (inv.threads < 1) {
    err << "--threads: expected a positive integer\n";
    return kSchemaError;
  }
  json raw = json::object();
  fs::path base = fs::current_path();
  if (!inv.config_path.empty()) {
    std::ifstream in(inv.config_path);
    if (!in) {
      err << "config: cannot open " << inv.config_path << "\n";
      return kSchemaError;
    }
    try {
      raw = json::parse(in);
    } catch (const json::parse_error& e) {
      err << "config: " << e.what() << "\n";
      return kSchemaError;
    }
    base = fs::absolute(inv.config_path).parent_path();
  }
  ExperimentConfig cfg;
  Outcome outcome;
  try {
    cfg = load_config(raw, inv, base);
    if (cfg.command == "verify-lemma-4-2") outcome = verify_closed_form_ball(cfg);
    else if (cfg.command == "verify-section-3") outcome = verify_sphere_inequalities(cfg);
    else if (cfg.command == "doubling-scan") outcome = doubling(cfg);
    else if (cfg.command == "cone-distance") outcome = cone(cfg);
    else if (cfg.command == "blowup") outcome = blow(cfg, base);
    else if (cfg.command == "lewy-demo") outcome = lewy(cfg);
    else outcome = fr(cfg, base);
  } catch (const ConfigError& e) {
    for (const auto& d : e.diagnostics) err << "config: " << d << "\n";
    return kSchemaError;
  } catch (const std::invalid_argument& e) {
    err << "config: " << e.what() << "\n";
    return kSchemaError;
  } catch (const std::exception& e) {
    err << cfg.command << ": " << e.what() << "\n";
    return kRuntimeError;
  }

  const std::string stamp = now_utc();
  ojson report;
  report["generated"] = stamp;  // the only run-dependent field, alone on line 2
  report["command"] = cfg.command;
  report["status"] = outcome.ok ? "ok" : "violation";
  report["seed"] = cfg.seed ? ojson(*cfg.seed) : ojson(nullptr);
  report["threads"] = inv.threads;
  report["config"] = ojson::parse(raw.dump());
  report["result"] = ojson::parse(outcome.result.dump());
  try {
    fs::create_directories(cfg.output);
    write_file(cfg.output / (cfg.command + ".json"), report.dump(2) + "\n");
    for (const auto& [name, body] : outcome.csv) write_file(cfg.output / name, "# generated " + stamp + "\n" + body);
  } catch (const std::exception& e) {
    err << "output: " << e.what() << "\n";
    return kRuntimeError;
  }
  log << cfg.command << ": " << (outcome.ok ? "ok" : "invariant violation") << " -> "
      << (cfg.output / (cfg.command + ".json")).string() << "\n";
  return outcome.ok ? kOk : kViolation;
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Polynomial harmonic measure experiments"};
  Invocation inv;
  std::uint64_t seed = 0;
  app.add_option("command", inv.command, "experiment to run")->check(CLI::IsMember(commands()));
  app.add_option("--config", inv.config_path, "JSON experiment config");
  app.add_option("--out", inv.out_dir, "directory for reports");
  auto* seed_opt = app.add_option("--seed", seed, "seed for stochastic steps (overrides the config)");
  app.add_option("--threads", inv.threads, "worker threads (computations currently run on one)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kSchemaError;
  }
  if (*seed_opt) inv.seed = seed;
  return run(inv, std::cout, std::cerr);
}

}  // namespace hpm::cli
