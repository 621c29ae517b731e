// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <chrono>
#include <algorithm>
#include <cstdlib>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hpm/blowup.hpp"
#include "hpm/inequalities.hpp"
#include "hpm/measure.hpp"
#include "hpm/metric.hpp"
#include "hpm/particle.hpp"
#include "hpm/transport.hpp"
#include "support.hpp"

using namespace hpm;
using std::numbers::pi;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

const SphereRule& rule3() {
  static const SphereRule r = build_rule(3, 24, 1);
  return r;
}

Verdict closed_form_ball() {
  std::mt19937_64 rng(42);
  double worst_rel = 0, worst_gap = 0;
  for (int i = 0; i < 20; ++i) {
    int k = 1 + i % 4;
    PolyMeasure m(testing::random_harmonic(3, k, rng));
    double l1 = l1_norm_sphere(m.poly(), rule3());
    for (double r : {0.5, 1.0, 2.0}) {
      auto s = ball_measure_sides(m, r, rule3());
      double closed = 0.5 * k * std::pow(r, 3 + k - 2) * l1;
      worst_rel = std::max(worst_rel, std::abs(s.value - closed) / closed);
      worst_gap = std::max(worst_gap, std::abs(s.plus_side - s.minus_side) / s.plus_side);
    }
  }
  return {worst_rel <= 1e-6 && worst_gap <= 1e-8,
          "max rel err " + fmt(worst_rel) + " (<=1e-6), max side gap " + fmt(worst_gap) + " (<=1e-8)"};
}

Verdict flat_anchor() {
  PolyMeasure flat(parse_poly("x", 3));
  double worst = 0;
  for (double r : {0.25, 0.5, 1.0, 2.0, 4.0})
    worst = std::max(worst, std::abs(ball_measure(flat, r, rule3()) - pi * r * r) / (pi * r * r));
  double f1 = f_r(flat, 1.0, rule3());
  double f1_err = std::abs(f1 - pi / 3) / (pi / 3);
  auto mu = discretize(flat, 1.0, DiscretizeOptions{.grid = 32});
  ParticleMeasure zero;
  zero.dim = 3;
  zero.truncation_radius = 1.0;
  double lp = f_r_distance(mu, zero, 1.0);
  double lp_err = std::abs(lp - pi / 3) / (pi / 3);
  return {worst <= 1e-6 && f1_err <= 1e-6 && lp_err <= 0.03,
          "ball rel err " + fmt(worst) + ", F_1 quad rel err " + fmt(f1_err) + ", F_1 particle LP rel err " +
              fmt(lp_err) + " (N=" + std::to_string(mu.size()) + ")"};
}

Verdict doubling() {
  double worst = 0;
  std::mt19937_64 rng(7);
  for (int k = 1; k <= 4; ++k) {
    PolyMeasure m(testing::random_harmonic(3, k, rng));
    auto scan = doubling_scan(m, 2.0, 1e-3, 1e3, 24, rule3());
    for (double e : scan.local_exponents) worst = std::max(worst, std::abs(e - (3 + k - 2)));
  }
  int correct = 0;
  const int cases = 40;
  std::uniform_real_distribution<double> logt(-1.0, 1.0);
  for (int i = 0; i < cases; ++i) {
    int d = 2 + i % 3;
    int j = 1 + static_cast<int>(rng() % static_cast<unsigned>(d - 1));
    PolyMeasure m(testing::random_mixed(3, d, j, std::exp(logt(rng)), rng));
    auto c = degree_classify(m, rule3());  // scans [1e-3·r2, 1e3·r1]
    if (c.status == ClassifyStatus::ok && c.j == j && c.d == d) ++correct;
  }
  double rate = static_cast<double>(correct) / cases;
  return {worst <= 1e-6 && rate >= 0.95,
          "homogeneous exponent err " + fmt(worst) + " (<=1e-6), mixed classified " + std::to_string(correct) + "/" +
              std::to_string(cases) + " (>=95%)"};
}

Verdict sphere_inequalities() {
  InequalityOptions opt;
  opt.seed = 2024;
  auto rep = inequality_suite(opt);
  std::string detail = std::to_string(rep.total_trials()) + " trials, " + std::to_string(rep.total_violations()) +
                       " violations (";
  for (std::size_t i = 0; i < rep.checks.size(); ++i)
    detail += (i ? ", " : "") + rep.checks[i].name + " " + std::to_string(rep.checks[i].violations);
  detail += ")";
  return {rep.total_trials() >= 10000 && rep.total_violations() == 0, detail};
}

Verdict sandwiches() {
  std::mt19937_64 rng(99);
  int checks = 0, violations = 0;
  for (int i = 0; i < 20; ++i) {
    int d = 2 + i % 3;
    int j = 1 + i % (d - 1);
    PolyMeasure m(testing::random_mixed(3, d, j, 1.0, rng));
    double R1 = r1(m, rule3()), R2 = r2(m, rule3());
    for (int q = 0; q < 10; ++q) {
      double far = R1 * std::pow(1e3, (q + 1) / 10.0);
      double near = R2 * std::pow(1e-3, q / 10.0) * 0.9;
      ++checks;
      if (!bounds_check_infinity(m, far, rule3()).holds) ++violations;
      ++checks;
      if (!bounds_check_zero(m, near, rule3()).holds) ++violations;
    }
  }
  return {violations == 0, std::to_string(checks) + " radius checks, " + std::to_string(violations) + " violations"};
}

Verdict fr_suite() {
  const double tol = 1e-6;
  int failures = 0, checks = 0;
  auto expect = [&](bool ok) {
    ++checks;
    if (!ok) ++failures;
  };
  std::vector<ParticleMeasure> clouds;
  for (auto text : {"x", "x*y + x", "x^2*y - x^2*z + y^2*z - y^2*x + z^2*x - z^2*y - x*y*z", "x*y"})
    clouds.push_back(discretize(PolyMeasure(parse_poly(text, 3)), 2.0, DiscretizeOptions{.grid = 13}));
  std::size_t biggest = 0;
  for (const auto& c : clouds) biggest = std::max(biggest, c.size());
  ParticleMeasure zero;
  zero.dim = 3;
  zero.truncation_radius = 2.0;
  std::vector<double> o{0, 0, 0};
  for (std::size_t a = 0; a < clouds.size(); ++a) {
    for (double r : {0.5, 1.0}) {
      expect(f_r_distance(clouds[a], clouds[a], r) <= tol);
      expect(std::abs(f_r_distance(clouds[a], zero, r) - f_r_of(clouds[a], r)) <= tol * std::max(1.0, f_r_of(clouds[a], r)));
    }
    for (std::size_t b = a + 1; b < clouds.size(); ++b) {
      double prev = 0;
      for (double r : {0.25, 0.5, 1.0}) {
        double ab = f_r_distance(clouds[a], clouds[b], r);
        expect(std::abs(ab - f_r_distance(clouds[b], clouds[a], r)) <= tol * std::max(1.0, ab));
        expect(ab >= prev - tol);
        prev = ab;
        for (std::size_t c = 0; c < clouds.size(); ++c) {
          if (c == a || c == b) continue;
          expect(f_r_distance(clouds[a], clouds[c], r) <= ab + f_r_distance(clouds[b], clouds[c], r) + tol);
        }
      }
      // F_{rs}(μ,ν) = s·F_r(T_{0,s}μ, T_{0,s}ν)
      const double s = 2.0;
      double lhs = f_r_distance(clouds[a], clouds[b], 0.5 * s);
      double rhs = s * f_r_distance(pushforward(clouds[a], o, s), pushforward(clouds[b], o, s), 0.5);
      expect(std::abs(lhs - rhs) <= tol * std::max(1.0, lhs));
    }
    // F_{rs}(μ) = s·F_r(T_{0,s}μ) and T_{x,rs} = T_{0,s}∘T_{x,r}
    const double s = 2.0;
    expect(std::abs(f_r_of(clouds[a], 1.0) - s * f_r_of(pushforward(clouds[a], o, s), 0.5)) <= tol);
    std::vector<double> x{0.1, -0.2, 0.05};
    auto direct = pushforward(clouds[a], x, 0.5 * s);
    auto composed = pushforward(pushforward(clouds[a], x, 0.5), o, s);
    expect(f_r_distance(direct, composed, 0.5) <= tol);
  }
  return {failures == 0, std::to_string(checks) + " checks on clouds of <= " + std::to_string(biggest) + " points, " +
                             std::to_string(failures) + " failures (tol 1e-6)"};
}

Verdict cone_distance_criterion() {
  ConeOptions o;
  o.restarts = 3;
  o.max_iterations = 120;
  o.grid = 12;
  o.cell = 0.1;
  o.simplex_tol = 1e-3;
  o.seed = 11;

  std::mt19937_64 rng(5);
  std::vector<Poly> members = {parse_poly("x", 3), parse_poly("x*y", 3), lewy_polynomial(),
                               testing::random_harmonic(3, 2, rng)};
  double worst_member = 0;
  for (const auto& p : members)
    worst_member = std::max(worst_member, cone_distance(PolyMeasure(p), p.degree(), 1.0, o).value);

  struct Case {
    const char* h;
    int k;
  };
  const std::vector<Case> battery = {{"x^2 - y^2", 1},     {"x", 2},
                                     {"x", 3},             {"x*y + x", 1},
                                     {"x^2*y - x^2*z + y^2*z - y^2*x + z^2*x - z^2*y - x*y*z", 1},
                                     {"x^2*y - x^2*z + y^2*z - y^2*x + z^2*x - z^2*y - x*y*z", 2},
                                     {"x*y*z", 1},         {"x*y*z", 2},
                                     {"2*z^2 - x^2 - y^2", 1}, {"2*z^2 - x^2 - y^2", 3},
                                     {"x + 0.1*x^2 - 0.1*y^2", 1}, {"x*y", 3}};
  int witnessed = 0;
  bool eps_exact = true;
  for (const auto& c : battery) {
    Poly h = parse_poly(c.h, 3);
    PolyMeasure m(h);
    // d_r is r-independent for homogeneous h on the scale-relative grid
    std::vector<double> radii = m.homogeneous() ? std::vector<double>{1.0} : std::vector<double>{0.01, 100.0};
    auto rep = separation_experiment(h, c.k, radii, o);
    if (rep.witness_radius) ++witnessed;
    auto t = epsilon_table(3, std::max(m.top_degree(), c.k));
    double e = epsilon0(3, m.top_degree(), c.k);
    double lhs = (3 + c.k - 1) * std::log(2 * epsilon_table(3, m.top_degree()).C_tilde) + std::log(e);
    eps_exact = eps_exact && std::abs(lhs - std::log(0.5)) <= 1e-12 && t.eps1 <= t.eps2;
  }
  bool pass = worst_member <= 0.02 && witnessed == static_cast<int>(battery.size()) && eps_exact;
  return {pass, "cone members max d_r " + fmt(worst_member) + " (<=0.02), witnesses " + std::to_string(witnessed) + "/" +
                    std::to_string(battery.size()) + " with d_r >= max(eps0, floor), eps0 closed form " +
                    (eps_exact ? "exact" : "off")};
}

Verdict blowup_criterion() {
  PolyMeasure h(parse_poly("x*y + x", 3));
  Poly flat = parse_poly("x", 3);
  auto rows = blowup_report(h, flat, {1e-2, 5e-3, 2e-3, 1e-3}, rule3(), BlowupOptions{.grid = 32, .zero_grid = 48});
  bool monotone = true;
  for (std::size_t i = 1; i < rows.size(); ++i) monotone = monotone && rows[i].f1_distance < rows[i - 1].f1_distance;
  double last = rows.back().f1_distance;

  auto limit = zero_set_blowup(flat, 1.0, 1.0, 48);
  std::vector<double> hd;
  for (double r : {1.0, 0.3, 0.1, 0.03}) hd.push_back(hausdorff_distance(zero_set_blowup(h.poly(), r, 1.0, 48), limit));
  bool h_ok = hd.back() <= limit.resolution();
  for (std::size_t i = 1; i < hd.size(); ++i) h_ok = h_ok && hd[i] <= hd[i - 1];
  std::string hs;
  for (double v : hd) hs += (hs.empty() ? "" : ",") + fmt(v);
  return {last < 0.05 && monotone && h_ok, "F_1 at r=1e-3 " + fmt(last) + " (<0.05), monotone over last decade " +
                                               (monotone ? "yes" : "no") + ", Hausdorff [" + hs +
                                               "] non-increasing to within resolution " + fmt(limit.resolution())};
}

Verdict lewy_demo() {
  Poly h = lewy_polynomial();
  auto nodal = nodal_components_s2(h);
  bool stable = nodal.count.has_value() && nodal.counts.size() >= 3;
  auto c = degree_classify(PolyMeasure(h), rule3());
  bool zero = laplacian(h).is_zero();
  std::string counts;
  for (int v : nodal.counts) counts += (counts.empty() ? "" : ",") + std::to_string(v);
  bool pass = stable && *nodal.count == 2 && zero && c.status == ClassifyStatus::ok && c.j == 3 && c.d == 3;
  return {pass, "nodal counts [" + counts + "], laplacian exactly zero " + (zero ? "yes" : "no") + ", classified (" +
                    std::to_string(c.j) + "," + std::to_string(c.d) + ")"};
}

}  // namespace

int main(int argc, char** argv) {
  // optional criterion numbers restrict the run
  std::vector<int> only;
  for (int a = 1; a < argc; ++a) only.push_back(std::atoi(argv[a]));
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"ball measure closed form for homogeneous harmonics", closed_form_ball},
      {"flat measure anchor", flat_anchor},
      {"doubling exponents and degree classification", doubling},
      {"sphere inequality suite", sphere_inequalities},
      {"two-sided ball measure bounds", sandwiches},
      {"F_r metric suite", fr_suite},
      {"cone distance and separation witnesses", cone_distance_criterion},
      {"blow-up convergence", blowup_criterion},
      {"Lewy demo", lewy_demo},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && std::find(only.begin(), only.end(), static_cast<int>(i + 1)) == only.end()) continue;
    auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.pass) ++failed;
    std::printf("criterion %zu %s: %s: %s [%.1fs]\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first,
                v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
