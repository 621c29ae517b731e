#include "hpm/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "hpm/poly.hpp"
#include "hpm/sphere.hpp"

namespace hpm {

long InequalityReport::total_trials() const {
  long s = 0;
  for (const auto& c : checks) s += c.trials;
  return s;
}

long InequalityReport::total_violations() const {
  long s = 0;
  for (const auto& c : checks) s += c.violations;
  return s;
}

namespace {

std::vector<double> random_unit(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(n));
  double s = 0.0;
  do {
    s = 0.0;
    for (auto& x : v) {
      x = g(rng);
      s += x * x;
    }
  } while (s < 1e-20);
  s = std::sqrt(s);
  for (auto& x : v) x /= s;
  return v;
}

void record(InequalityTally& t, double lhs, double rhs) {
  ++t.trials;
  if (lhs > rhs) ++t.violations;
  if (rhs > 0.0) t.worst_ratio = std::max(t.worst_ratio, lhs / rhs);
}

// Random multi-index with 1 ≤ |α| ≤ k.
MultiIndex random_alpha(int n, int k, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> order(1, k), axis(0, n - 1);
  std::vector<int> e(static_cast<std::size_t>(n), 0);
  int m = order(rng);
  for (int i = 0; i < m; ++i) ++e[static_cast<std::size_t>(axis(rng))];
  return MultiIndex(e);
}

}  // namespace

InequalityReport inequality_suite(const InequalityOptions& opt) {
  if (opt.n < 2 || opt.max_degree < 1) throw std::invalid_argument("inequality suite needs n >= 2 and degree >= 1");
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const SphereRule rule = build_rule(opt.n, opt.rule_level, opt.seed);
  InequalityReport rep;
  rep.checks = {{"lipschitz", 0, 0, 0.0}, {"big_piece", 0, 0, 0.0}, {"reverse_holder", 0, 0, 0.0},
                {"derivative_bound", 0, 0, 0.0}};
  auto& lip = rep.checks[0];
  auto& big = rep.checks[1];
  auto& rh = rep.checks[2];
  auto& der = rep.checks[3];

  for (int k = 1; k <= opt.max_degree; ++k) {
    const auto basis = harmonic_basis(opt.n, k);
    const auto c = sphere_constants(opt.n, k);
    for (int trial = 0; trial < opt.polynomials_per_degree; ++trial) {
      Poly p(opt.n);
      for (const auto& b : basis) p = p + gauss(rng) * b;
      const double sup = sup_norm_sphere(p, rule).lower;

      for (int i = 0; i < opt.pairs_per_polynomial; ++i) {
        auto a = random_unit(opt.n, rng);
        std::vector<double> b;
        if (i % 2 == 0) {
          b = random_unit(opt.n, rng);
        } else {
          b = a;
          auto d = random_unit(opt.n, rng);
          double step = 0.05 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
          double s = 0.0;
          for (std::size_t q = 0; q < b.size(); ++q) {
            b[q] += step * d[q];
            s += b[q] * b[q];
          }
          for (auto& x : b) x /= std::sqrt(s);
        }
        double chord = 0.0;
        for (std::size_t q = 0; q < a.size(); ++q) chord += (a[q] - b[q]) * (a[q] - b[q]);
        chord = std::sqrt(chord);
        record(lip, std::abs(p(a) - p(b)), c.A * sup * chord);
      }

      double piece = big_piece_measure(p, rule, sup);
      record(big, c.l, piece);
      record(rh, sup, c.B * l1_norm_sphere(p, rule));

      const double sup_b2 = std::pow(2.0, k) * sup;
      for (int i = 0; i < opt.points_per_polynomial; ++i) {
        auto theta = random_unit(opt.n, rng);
        auto alpha = random_alpha(opt.n, k, rng);
        record(der, std::abs(p.derivative(alpha)(theta)), derivative_bound_factor(opt.n, alpha.degree()) * sup_b2);
      }
    }
  }
  return rep;
}

nlohmann::json to_json(const InequalityReport& rep) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : rep.checks)
    checks.push_back({{"name", c.name}, {"trials", c.trials}, {"violations", c.violations}, {"worst_ratio", c.worst_ratio}});
  return {{"checks", checks}, {"total_trials", rep.total_trials()}, {"total_violations", rep.total_violations()}};
}

}  // namespace hpm
