#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hpm/particle.hpp"
#include "hpm/transport.hpp"

using namespace hpm;
using std::numbers::pi;

namespace {

ParticleMeasure random_cloud(int n, int count, double R, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), w(0.1, 1.0);
  ParticleMeasure mu;
  mu.dim = n;
  mu.truncation_radius = R;
  std::vector<double> p(static_cast<std::size_t>(n));
  while (static_cast<int>(mu.size()) < count) {
    double s = 0;
    for (auto& x : p) {
      x = u(rng) * R;
      s += x * x;
    }
    if (s < R * R) mu.add(p, w(rng));
  }
  return mu;
}

double dist(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// max c·x s.t. Ax ≤ b, x ≥ 0 with b ≥ 0 (origin feasible): dense tableau,
// Bland's rule.
double dense_simplex(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                     const std::vector<double>& c) {
  const std::size_t m = A.size(), n = c.size();
  std::vector<std::vector<double>> T(m + 1, std::vector<double>(n + m + 1, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) T[i][j] = A[i][j];
    T[i][n + i] = 1;
    T[i][n + m] = b[i];
  }
  for (std::size_t j = 0; j < n; ++j) T[m][j] = -c[j];
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;
  const double eps = 1e-12;
  while (true) {
    std::size_t e = n + m;
    for (std::size_t j = 0; j < n + m; ++j)
      if (T[m][j] < -eps) {
        e = j;
        break;
      }
    if (e == n + m) break;
    std::size_t l = m;
    double best = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (T[i][e] > eps) {
        double ratio = T[i][n + m] / T[i][e];
        if (l == m || ratio < best - eps || (std::abs(ratio - best) <= eps && basis[i] < basis[l])) {
          l = i;
          best = ratio;
        }
      }
    }
    REQUIRE(l < m);
    double piv = T[l][e];
    for (auto& v : T[l]) v /= piv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == l || T[i][e] == 0) continue;
      double f = T[i][e];
      for (std::size_t j = 0; j <= n + m; ++j) T[i][j] -= f * T[l][j];
    }
    basis[l] = e;
  }
  return T[m][n + m];
}

// F_r(μ, ν) from the full pairwise LP over node values.
double oracle(const ParticleMeasure& mu, const ParticleMeasure& nu, double r) {
  std::vector<std::vector<double>> pts;
  std::vector<double> w;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    pts.emplace_back(mu.point(i).begin(), mu.point(i).end());
    w.push_back(mu.masses[i]);
  }
  for (std::size_t i = 0; i < nu.size(); ++i) {
    pts.emplace_back(nu.point(i).begin(), nu.point(i).end());
    w.push_back(-nu.masses[i]);
  }
  const std::size_t N = pts.size();
  std::vector<std::vector<double>> A;
  std::vector<double> b;
  std::vector<double> origin(pts[0].size(), 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    std::vector<double> row(N, 0.0);
    row[i] = 1;
    A.push_back(row);
    b.push_back(std::max(0.0, r - dist(pts[i], origin)));
  }
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      if (i == j) continue;
      std::vector<double> row(N, 0.0);
      row[i] = 1;
      row[j] = -1;
      A.push_back(row);
      b.push_back(dist(pts[i], pts[j]));
    }
  std::vector<double> neg(w);
  for (auto& v : neg) v = -v;
  return std::max(dense_simplex(A, b, w), dense_simplex(A, b, neg));
}

ParticleMeasure empty_like(const ParticleMeasure& mu) {
  ParticleMeasure e;
  e.dim = mu.dim;
  e.truncation_radius = mu.truncation_radius;
  return e;
}

}  // namespace

TEST_CASE("agrees with the full LP on small clouds") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 12; ++trial) {
    int n = 2 + trial % 2;
    auto mu = random_cloud(n, 8 + trial, 1.0, rng);
    auto nu = random_cloud(n, 20 - trial, 1.0, rng);
    for (double r : {0.4, 1.0}) {
      double expect = oracle(mu, nu, r);
      CHECK(f_r_distance(mu, nu, r) == doctest::Approx(expect).epsilon(1e-9));
    }
  }
}

TEST_CASE("dual potential is feasible") {
  std::mt19937_64 rng(5);
  auto mu = random_cloud(3, 300, 1.0, rng);
  auto nu = random_cloud(3, 300, 1.0, rng);
  const double r = 0.9;
  auto res = f_r_distance_detail(mu, nu, r);
  CHECK(res.converged);
  const auto N = res.weights.size();
  double value = 0;
  for (std::size_t i = 0; i < N; ++i) {
    std::span<const double> p(res.nodes.data() + 3 * i, 3);
    std::vector<double> o{0, 0, 0};
    double f = res.potential[i];
    CHECK(f >= -1e-9);
    CHECK(f <= std::max(0.0, r - dist(p, o)) + 1e-9);
    value += f * res.weights[i];
    for (std::size_t j = 0; j < i; ++j) {
      std::span<const double> q(res.nodes.data() + 3 * j, 3);
      if (std::abs(f - res.potential[j]) > dist(p, q) + 1e-9) FAIL("Lipschitz violated");
    }
  }
  CHECK(std::abs(value) == doctest::Approx(res.value).epsilon(1e-9));
  CHECK(res.primal_cost == doctest::Approx(res.value).epsilon(1e-9));
}

TEST_CASE("identities") {
  std::mt19937_64 rng(9);
  auto mu = random_cloud(3, 200, 1.0, rng);
  CHECK(f_r_distance(mu, mu, 1.0) == doctest::Approx(0.0));
  auto zero = empty_like(mu);
  CHECK(f_r_distance(mu, zero, 0.7) == doctest::Approx(f_r_of(mu, 0.7)).epsilon(1e-9));
  CHECK(f_r_distance(zero, zero, 0.7) == 0.0);
  // F_r(aμ, bμ) = |a − b| F_r(μ)
  CHECK(f_r_distance(scaled(mu, 2.5), scaled(mu, 0.75), 0.8) ==
        doctest::Approx(1.75 * f_r_of(mu, 0.8)).epsilon(1e-9));
}

TEST_CASE("flat measure F_1") {
  PolyMeasure flat(parse_poly("x", 3));
  auto mu = discretize(flat, 1.0, DiscretizeOptions{.grid = 32});
  ParticleMeasure zero = empty_like(mu);
  CHECK(f_r_distance(mu, zero, 1.0) == doctest::Approx(pi / 3).epsilon(0.03));
}

TEST_CASE("semi-metric axioms and monotonicity") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 4; ++trial) {
    auto a = random_cloud(3, 400, 1.0, rng);
    auto b = random_cloud(3, 400, 1.0, rng);
    auto c = random_cloud(3, 400, 1.0, rng);
    for (double r : {0.5, 1.0}) {
      double ab = f_r_distance(a, b, r), ba = f_r_distance(b, a, r);
      double bc = f_r_distance(b, c, r), ac = f_r_distance(a, c, r);
      CHECK(ab == doctest::Approx(ba).epsilon(1e-9));
      CHECK(ac <= ab + bc + 1e-6);
      CHECK(ab >= 0.0);
    }
    double prev = 0;
    for (double r : {0.2, 0.4, 0.6, 0.8, 1.0}) {
      double v = f_r_distance(a, b, r);
      CHECK(v >= prev - 1e-6);
      prev = v;
    }
  }
}

TEST_CASE("composition law under dilation") {
  std::mt19937_64 rng(23);
  auto mu = random_cloud(3, 500, 2.0, rng);
  auto nu = random_cloud(3, 500, 2.0, rng);
  std::vector<double> o{0, 0, 0};
  const double s = 2.0;
  auto tm = pushforward(mu, o, s), tn = pushforward(nu, o, s);
  for (double r : {0.5, 1.0})
    CHECK(f_r_distance(mu, nu, r * s) == doctest::Approx(s * f_r_distance(tm, tn, r)).epsilon(1e-6));
}

TEST_CASE("weak metric") {
  std::mt19937_64 rng(31);
  auto a = random_cloud(3, 150, 6.0, rng);
  auto b = random_cloud(3, 150, 6.0, rng);
  CHECK(weak_metric(a, a, 5) == doctest::Approx(0.0));
  double ab = weak_metric(a, b, 5);
  CHECK(ab == doctest::Approx(weak_metric(b, a, 5)).epsilon(1e-9));
  CHECK(std::abs(weak_metric(a, b, 6) - ab) <= std::pow(2.0, -5) + 1e-12);
  CHECK(ab <= 1.0);
}

TEST_CASE("invalid inputs") {
  std::mt19937_64 rng(1);
  auto a = random_cloud(3, 10, 1.0, rng);
  auto b = random_cloud(2, 10, 1.0, rng);
  CHECK_THROWS_AS(f_r_distance(a, b, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(f_r_distance(a, a, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(f_r_distance(a, a, 0.0), std::invalid_argument);
}
