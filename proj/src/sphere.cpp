#include "hpm/sphere.hpp"

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "hpm/quadrature.hpp"
#include "hpm/roots.hpp"

namespace hpm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

using Coeffs = std::vector<double>;

Coeffs poly_mul(const Coeffs& a, const Coeffs& b) {
  if (a.empty() || b.empty()) return {};
  Coeffs out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

// Restriction of g to the rational curve t ↦ A(t)/(1+t²), each A_j quadratic,
// multiplied through by (1+t²)^deg g. The result has the sign of g on the curve.
class CurveRestrictor {
 public:
  explicit CurveRestrictor(const Poly& g) : g_(g), deg_(std::max(g.degree(), 0)) {
    q_pow_.push_back({1.0});
    for (int m = 1; m <= deg_; ++m) q_pow_.push_back(poly_mul(q_pow_.back(), {1.0, 0.0, 1.0}));
  }

  Coeffs restrict(const std::vector<Coeffs>& A) const {
    const int n = g_.dim();
    std::vector<std::vector<Coeffs>> a_pow(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      auto& row = a_pow[static_cast<std::size_t>(j)];
      row.push_back({1.0});
      for (int e = 1; e <= deg_; ++e) row.push_back(poly_mul(row.back(), A[static_cast<std::size_t>(j)]));
    }
    Coeffs out(static_cast<std::size_t>(2 * deg_ + 1), 0.0);
    for (const auto& t : g_.terms()) {
      Coeffs acc{t.c};
      for (int j = 0; j < n; ++j) {
        int e = t.alpha[j];
        if (e > 0) acc = poly_mul(acc, a_pow[static_cast<std::size_t>(j)][static_cast<std::size_t>(e)]);
      }
      acc = poly_mul(acc, q_pow_[static_cast<std::size_t>(deg_ - t.alpha.degree())]);
      for (std::size_t u = 0; u < acc.size(); ++u) out[u] += acc[u];
    }
    return out;
  }

 private:
  const Poly& g_;
  int deg_;
  std::vector<Coeffs> q_pow_;
};

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Integrates f over the sign regions of g along the arc parametrised by
// angle ∈ [lo, hi]; `point` maps an angle to a sphere point and `jac` is the
// measure density in that angle.
template <class PointFn, class JacFn>
std::array<double, 2> arc_split(const Poly& g, const SphereFn& f, std::vector<double> breaks,
                                PointFn&& point, JacFn&& jac, int order) {
  std::sort(breaks.begin(), breaks.end());
  const auto& gl = gauss_legendre(order);
  std::array<double, 2> acc{0.0, 0.0};
  std::vector<double> x;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    double a = breaks[i];
    double b = breaks[i + 1];
    if (!(b > a)) continue;
    double mid = 0.5 * (a + b);
    double half = 0.5 * (b - a);
    point(mid, x);
    int s = sign_of(g(x));
    if (s == 0) continue;
    double sum = 0.0;
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      double ang = mid + half * gl.nodes[q];
      point(ang, x);
      sum += gl.weights[q] * jac(ang) * f(x);
    }
    acc[s > 0 ? 0 : 1] += half * sum;
  }
  return acc;
}

std::array<double, 2> meridian_split(const Poly& g, const CurveRestrictor& cr, const SphereFn& f,
                                     double phi, int order) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  std::vector<double> breaks{0.0, 0.5 * kPi, kPi};
  // θ ∈ [0, π/2]: t = tan(θ/2) ∈ [0, 1]
  {
    std::vector<Coeffs> A{{0.0, 2.0 * c, 0.0}, {0.0, 2.0 * s, 0.0}, {1.0, 0.0, -1.0}};
    for (double t : sign_change_roots(cr.restrict(A), 0.0, 1.0, 1e-15)) {
      breaks.push_back(2.0 * std::atan(t));
    }
  }
  // θ ∈ [π/2, π]: u = cot(θ/2) ∈ [0, 1]
  {
    std::vector<Coeffs> A{{0.0, 2.0 * c, 0.0}, {0.0, 2.0 * s, 0.0}, {-1.0, 0.0, 1.0}};
    for (double u : sign_change_roots(cr.restrict(A), 0.0, 1.0, 1e-15)) {
      breaks.push_back(kPi - 2.0 * std::atan(u));
    }
  }
  auto point = [c, s](double th, std::vector<double>& x) {
    double st = std::sin(th);
    x.assign({st * c, st * s, std::cos(th)});
  };
  auto jac = [](double th) { return std::sin(th); };
  return arc_split(g, f, std::move(breaks), point, jac, order);
}

std::array<double, 2> circle_split(const Poly& g, const SphereFn& f, int order) {
  CurveRestrictor cr(g);
  std::vector<double> breaks{-kPi, -0.5 * kPi, 0.5 * kPi, kPi};
  {
    // φ ∈ [−π/2, π/2]: t = tan(φ/2)
    std::vector<Coeffs> A{{1.0, 0.0, -1.0}, {0.0, 2.0, 0.0}};
    for (double t : sign_change_roots(cr.restrict(A), -1.0, 1.0, 1e-15)) {
      breaks.push_back(2.0 * std::atan(t));
    }
  }
  {
    // |φ| ∈ [π/2, π]: u = cot(φ/2)
    std::vector<Coeffs> A{{-1.0, 0.0, 1.0}, {0.0, 2.0, 0.0}};
    for (double u : sign_change_roots(cr.restrict(A), -1.0, 1.0, 1e-15)) {
      if (u == 0.0) continue;
      double mag = kPi - 2.0 * std::atan(std::abs(u));
      breaks.push_back(u > 0 ? mag : -mag);
    }
  }
  auto point = [](double ph, std::vector<double>& x) { x.assign({std::cos(ph), std::sin(ph)}); };
  auto jac = [](double) { return 1.0; };
  return arc_split(g, f, std::move(breaks), point, jac, order);
}

// Ascent of s·p on the sphere from a starting node.
std::pair<double, std::vector<double>> ascend(const Poly& p, std::vector<double> x) {
  const int n = p.dim();
  double val = p(x);
  const double s = val >= 0 ? 1.0 : -1.0;
  double best = s * val;
  double step = 0.1;
  std::vector<double> trial(static_cast<std::size_t>(n));
  for (int it = 0; it < 300 && step > 1e-16; ++it) {
    auto grad = p.gradient(x);
    double radial = 0.0;
    for (int i = 0; i < n; ++i) radial += grad[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
    double gnorm = 0.0;
    for (int i = 0; i < n; ++i) {
      grad[static_cast<std::size_t>(i)] = s * (grad[static_cast<std::size_t>(i)] - radial * x[static_cast<std::size_t>(i)]);
      gnorm += grad[static_cast<std::size_t>(i)] * grad[static_cast<std::size_t>(i)];
    }
    gnorm = std::sqrt(gnorm);
    if (gnorm < 1e-15 * std::max(1.0, best)) break;
    bool improved = false;
    while (step > 1e-16) {
      double norm = 0.0;
      for (int i = 0; i < n; ++i) {
        trial[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + step * grad[static_cast<std::size_t>(i)] / gnorm;
        norm += trial[static_cast<std::size_t>(i)] * trial[static_cast<std::size_t>(i)];
      }
      norm = std::sqrt(norm);
      for (auto& v : trial) v /= norm;
      double tv = s * p(trial);
      if (tv > best) {
        best = tv;
        x = trial;
        step *= 1.5;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return {best, x};
}

std::pair<double, std::vector<double>> polished_max_abs(const Poly& p, const SphereRule& rule) {
  if (rule.dim != p.dim()) throw std::invalid_argument("rule and polynomial dimensions differ");
  constexpr std::size_t kStarts = 8;
  std::vector<std::pair<double, std::size_t>> top;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    double v = std::abs(p(rule.node(i)));
    if (top.size() < kStarts) {
      top.emplace_back(v, i);
      std::push_heap(top.begin(), top.end(), std::greater<>());
    } else if (v > top.front().first) {
      std::pop_heap(top.begin(), top.end(), std::greater<>());
      top.back() = {v, i};
      std::push_heap(top.begin(), top.end(), std::greater<>());
    }
  }
  double best = 0.0;
  std::vector<double> arg(rule.node(0).begin(), rule.node(0).end());
  for (const auto& [v, i] : top) {
    std::vector<double> x(rule.node(i).begin(), rule.node(i).end());
    auto [val, pt] = ascend(p, x);
    if (val > best) {
      best = val;
      arg = pt;
    }
  }
  return {best, arg};
}

}  // namespace

double sphere_area(int n) {
  if (n < 1) throw std::invalid_argument("sphere_area: n must be >= 1");
  return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

double unit_ball_volume(int n) { return sphere_area(n) / n; }

SphereRule build_rule(int n, int level, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("build_rule: n must be >= 2");
  if (level < 1) throw std::invalid_argument("build_rule: level must be >= 1");
  SphereRule rule;
  rule.dim = n;
  rule.level = level;
  rule.seed = seed;
  if (n == 2) {
    const int m = 2 * level;
    const double dphi = 2.0 * kPi / m;
    for (int j = 0; j < m; ++j) {
      double ph = (j + 0.5) * dphi;
      rule.coords.push_back(std::cos(ph));
      rule.coords.push_back(std::sin(ph));
      rule.weights.push_back(dphi);
    }
    rule.exactness_degree = m - 1;
    rule.covering_radius = 2.0 * std::sin(dphi / 4.0);
  } else if (n == 3) {
    const auto& gl = gauss_legendre(level);
    const int m = 2 * level;
    const double dphi = 2.0 * kPi / m;
    std::vector<double> thetas;
    for (int i = 0; i < level; ++i) {
      double u = gl.nodes[static_cast<std::size_t>(i)];
      double st = std::sqrt(std::max(0.0, 1.0 - u * u));
      thetas.push_back(std::acos(u));
      for (int j = 0; j < m; ++j) {
        double ph = (j + 0.5) * dphi;
        rule.coords.push_back(st * std::cos(ph));
        rule.coords.push_back(st * std::sin(ph));
        rule.coords.push_back(u);
        rule.weights.push_back(gl.weights[static_cast<std::size_t>(i)] * dphi);
      }
    }
    rule.exactness_degree = 2 * level - 1;
    std::sort(thetas.begin(), thetas.end());
    // Meridian move to the nearest ring plus an arc along that ring.
    double rho = thetas.front() + std::sin(thetas.front()) * dphi / 2.0;
    rho = std::max(rho, (kPi - thetas.back()) + std::sin(thetas.back()) * dphi / 2.0);
    for (std::size_t i = 0; i + 1 < thetas.size(); ++i) {
      double gap = 0.5 * (thetas[i + 1] - thetas[i]);
      double ring = std::max(std::sin(thetas[i]), std::sin(thetas[i + 1])) * dphi / 2.0;
      rho = std::max(rho, gap + ring);
    }
    rule.covering_radius = std::min(rho, 2.0);
  } else {
    const std::size_t pairs = static_cast<std::size_t>(level) * static_cast<std::size_t>(level);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double w = sphere_area(n) / static_cast<double>(2 * pairs);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (std::size_t p = 0; p < pairs; ++p) {
      double norm = 0.0;
      do {
        norm = 0.0;
        for (auto& v : x) {
          v = gauss(rng);
          norm += v * v;
        }
      } while (norm < 1e-24);
      norm = std::sqrt(norm);
      for (int sgn : {1, -1}) {
        for (double v : x) rule.coords.push_back(sgn * v / norm);
        rule.weights.push_back(w);
      }
    }
    rule.monte_carlo = true;
    rule.exactness_degree = 1;
    rule.covering_radius = kInf;
  }
  return rule;
}

nlohmann::json to_json(const SphereRule& rule) {
  nlohmann::json nodes = nlohmann::json::array();
  for (std::size_t i = 0; i < rule.size(); ++i) {
    nodes.push_back(std::vector<double>(rule.node(i).begin(), rule.node(i).end()));
  }
  return {{"dim", rule.dim},
          {"level", rule.level},
          {"seed", rule.seed},
          {"exactness_degree", rule.exactness_degree},
          {"monte_carlo", rule.monte_carlo},
          {"covering_radius", std::isfinite(rule.covering_radius) ? nlohmann::json(rule.covering_radius)
                                                                  : nlohmann::json(nullptr)},
          {"nodes", nodes},
          {"weights", rule.weights}};
}

SphereRule rule_from_json(const nlohmann::json& j) {
  SphereRule r;
  r.dim = j.at("dim").get<int>();
  r.level = j.at("level").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.exactness_degree = j.at("exactness_degree").get<int>();
  r.monte_carlo = j.at("monte_carlo").get<bool>();
  r.covering_radius = j.at("covering_radius").is_null() ? kInf : j.at("covering_radius").get<double>();
  for (const auto& node : j.at("nodes")) {
    auto v = node.get<std::vector<double>>();
    if (static_cast<int>(v.size()) != r.dim) throw std::invalid_argument("rule node has wrong dimension");
    r.coords.insert(r.coords.end(), v.begin(), v.end());
  }
  r.weights = j.at("weights").get<std::vector<double>>();
  if (r.weights.size() * static_cast<std::size_t>(r.dim) != r.coords.size()) {
    throw std::invalid_argument("rule nodes and weights differ in count");
  }
  return r;
}

double integrate(const SphereRule& rule, const SphereFn& f) {
  CompensatedSum s;
  for (std::size_t i = 0; i < rule.size(); ++i) s.add(rule.weights[i] * f(rule.node(i)));
  return s.value();
}

double mc_standard_error(const SphereRule& rule, const SphereFn& f) {
  if (!rule.monte_carlo || rule.size() < 2) return 0.0;
  // Antipodal pairs are the independent samples.
  const std::size_t pairs = rule.size() / 2;
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t p = 0; p < pairs; ++p) {
    double v = 0.5 * (f(rule.node(2 * p)) + f(rule.node(2 * p + 1)));
    double d = v - mean;
    mean += d / static_cast<double>(p + 1);
    m2 += d * (v - mean);
  }
  double var = m2 / static_cast<double>(pairs - 1);
  return sphere_area(rule.dim) * std::sqrt(var / static_cast<double>(pairs));
}

SignSplit integrate_by_sign(const SphereRule& rule, const Poly& g, const SphereFn& f,
                            const SplitOptions& opt) {
  if (rule.dim != g.dim()) throw std::invalid_argument("rule and polynomial dimensions differ");
  SignSplit out;
  if (rule.dim == 2) {
    auto r = circle_split(g, f, opt.inner_order);
    out.positive = r[0];
    out.negative = r[1];
    return out;
  }
  if (rule.dim == 3) {
    // Normalised copy keeps the restricted coefficients in a sane range.
    double scale = 0.0;
    for (const auto& t : g.terms()) scale = std::max(scale, std::abs(t.c));
    Poly gn = scale > 0 ? (1.0 / scale) * g : g;
    CurveRestrictor cr(gn);
    auto G = [&](double phi) { return meridian_split(gn, cr, f, phi, opt.inner_order); };
    auto res = integrate_gk15(G, 0.0, 2.0 * kPi, opt.abs_tol, opt.rel_tol, opt.max_intervals);
    out.positive = res.value[0];
    out.negative = res.value[1];
    out.error = res.error;
    out.converged = res.converged;
    return out;
  }
  CompensatedSum pos, neg;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    auto x = rule.node(i);
    double gv = g(x);
    if (gv > 0) {
      pos.add(rule.weights[i] * f(x));
    } else if (gv < 0) {
      neg.add(rule.weights[i] * f(x));
    }
  }
  out.positive = pos.value();
  out.negative = neg.value();
  out.error = mc_standard_error(rule, [&](std::span<const double> x) { return g(x) != 0 ? f(x) : 0.0; });
  return out;
}

double l1_norm_sphere(const Poly& p, const SphereRule& rule) {
  auto split = integrate_by_sign(rule, p, [&p](std::span<const double> x) { return p(x); });
  return split.positive - split.negative;
}

SupNorm sup_norm_sphere(const Poly& p, const SphereRule& rule) {
  SupNorm out;
  auto [best, arg] = polished_max_abs(p, rule);
  out.lower = best;
  out.argmax = std::move(arg);
  out.upper = kInf;
  const int k = p.degree();
  if (k >= 1 && p.is_homogeneous() && harmonic_residual(p) <= 1e-10 && std::isfinite(rule.covering_radius)) {
    try {
      double A = sphere_constants(p.dim(), k).A;
      double delta = 2.0 * rule.covering_radius;
      if (A * delta <= 1.0) {
        out.upper = best * (1.0 + A * delta);
        out.certified = true;
      }
    } catch (const std::overflow_error&) {
    }
  }
  return out;
}

double sup_on_sphere_of_radius(const Poly& p, double radius, const SphereRule& rule) {
  return polished_max_abs(p.rescaled(radius), rule).first;
}

double big_piece_measure(const Poly& p, const SphereRule& rule) {
  return big_piece_measure(p, rule, sup_norm_sphere(p, rule).lower);
}

double big_piece_measure(const Poly& p, const SphereRule& rule, double sup_norm) {
  if (p.degree() < 1 || !p.is_homogeneous()) {
    throw std::invalid_argument("big_piece_measure: p must be homogeneous of degree >= 1");
  }
  const double level = 0.25 * sup_norm * sup_norm;
  Poly g = p * p - Poly::constant(p.dim(), level);
  if (rule.dim <= 3) {
    return integrate_by_sign(rule, g, [](std::span<const double>) { return 1.0; }).positive;
  }
  return integrate(rule, [&](std::span<const double> x) { return g(x) >= 0 ? 1.0 : 0.0; });
}

double inverse_factorial_sum(int n, int k) {
  // Σ_{|α|=m} 1/α! = n^m/m! by the multinomial theorem.
  double s = 0.0;
  double term = 1.0;
  for (int m = 1; m <= k; ++m) {
    term *= static_cast<double>(n) / m;
    s += term;
  }
  return s;
}

double chordal_cap_area(int n, double chord) {
  if (chord <= 0.0) return 0.0;
  if (chord >= 2.0) return sphere_area(n);
  double alpha = 2.0 * std::asin(0.5 * chord);
  if (n == 2) return 2.0 * alpha;
  if (n == 3) return kPi * chord * chord;
  const auto& gl = gauss_legendre(48);
  double sum = 0.0;
  for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
    double t = 0.5 * alpha * (1.0 + gl.nodes[q]);
    sum += gl.weights[q] * std::pow(std::sin(t), n - 2);
  }
  return sphere_area(n - 1) * 0.5 * alpha * sum;
}

SphereConstants sphere_constants(int n, int k) {
  if (n < 2 || k < 1) throw std::invalid_argument("sphere_constants: need n >= 2, k >= 1");
  double base = std::ldexp(1.0, n + 2) * n * k;
  double log_a = k * std::log(base) + std::log(inverse_factorial_sum(n, k));
  if (log_a >= std::log(DBL_MAX)) {
    throw std::overflow_error("A_{n,k} exceeds the floating-point range");
  }
  SphereConstants c;
  c.n = n;
  c.k = k;
  c.A = std::pow(base, k) * inverse_factorial_sum(n, k);
  c.l = chordal_cap_area(n, 1.0 / (2.0 * c.A));
  if (!(c.l > 0.0) || !std::isfinite(2.0 / c.l)) {
    throw std::overflow_error("l_{n,k} underflows the floating-point range");
  }
  c.B = 2.0 / c.l;
  return c;
}

double derivative_bound_factor(int n, int order) {
  return std::pow(std::ldexp(1.0, n + 1) * n * order, order);
}

bool derivative_bound_check(const Poly& p, const MultiIndex& alpha,
                            std::span<const double> theta, const SphereRule& rule) {
  return derivative_bound_check(p, alpha, theta, sup_on_sphere_of_radius(p, 2.0, rule));
}

bool derivative_bound_check(const Poly& p, const MultiIndex& alpha,
                            std::span<const double> theta, double sup_on_b2) {
  if (alpha.degree() < 1) throw std::invalid_argument("derivative bound needs |alpha| >= 1");
  double lhs = std::abs(p.derivative(alpha)(theta));
  return lhs <= derivative_bound_factor(p.dim(), alpha.degree()) * sup_on_b2;
}

}  // namespace hpm
