#include "hpm/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace hpm {

void CompensatedSum::add(double v) {
  double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v)) {
    comp_ += (sum_ - t) + v;
  } else {
    comp_ += (v - t) + sum_;
  }
  sum_ = t;
}

namespace {

GaussRule build_gauss_legendre(int order) {
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  const int m = (order + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int j = 1; j <= order; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p2) / j;
      }
      dp = order * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = 0.0;
    for (int j = 1; j <= order; ++j) {
      double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p2) / j;
    }
    dp = order * (x * p0 - p1) / (x * x - 1.0);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(order - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(order - 1 - i)] = w;
  }
  if (order % 2 == 1) rule.nodes[static_cast<std::size_t>(order / 2)] = 0.0;
  return rule;
}

// Kronrod 15-point nodes (positive half) with the embedded Gauss 7 weights.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b;
  std::array<double, 2> value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const VecIntegrand2& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::array<double, 2> rk{}, rg{};
  auto fc = f(c);
  for (int w = 0; w < 2; ++w) {
    rk[w] = kWgk[7] * fc[w];
    rg[w] = kWg[3] * fc[w];
  }
  for (int j = 0; j < 7; ++j) {
    double dx = h * kXgk[j];
    auto f1 = f(c - dx);
    auto f2 = f(c + dx);
    for (int w = 0; w < 2; ++w) {
      rk[w] += kWgk[j] * (f1[w] + f2[w]);
      if (j % 2 == 1) rg[w] += kWg[j / 2] * (f1[w] + f2[w]);
    }
  }
  Segment s{a, b, {rk[0] * h, rk[1] * h}, 0.0};
  s.error = std::abs((rk[0] - rg[0]) * h) + std::abs((rk[1] - rg[1]) * h);
  return s;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build_gauss_legendre(order)).first;
  return it->second;
}

AdaptiveVecResult<2> integrate_gk15(const VecIntegrand2& f, double a, double b, double abs_tol,
                                    double rel_tol, int max_intervals) {
  std::priority_queue<Segment> heap;
  heap.push(gk15(f, a, b));
  std::array<double, 2> total = heap.top().value;
  double err = heap.top().error;
  int count = 1;
  auto target = [&] {
    return std::max(abs_tol, rel_tol * (std::abs(total[0]) + std::abs(total[1])));
  };
  while (err > target() && count < max_intervals) {
    Segment worst = heap.top();
    heap.pop();
    double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);
      break;
    }
    Segment l = gk15(f, worst.a, mid);
    Segment r = gk15(f, mid, worst.b);
    for (int w = 0; w < 2; ++w) total[w] += l.value[w] + r.value[w] - worst.value[w];
    err += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
    ++count;
  }
  // Re-sum from the leaves to shed drift in the running totals.
  AdaptiveVecResult<2> out;
  CompensatedSum s0, s1;
  double e = 0.0;
  while (!heap.empty()) {
    const auto& s = heap.top();
    s0.add(s.value[0]);
    s1.add(s.value[1]);
    e += s.error;
    heap.pop();
  }
  out.value = {s0.value(), s1.value()};
  out.error = e;
  out.intervals = count;
  out.converged = e <= std::max(abs_tol, rel_tol * (std::abs(out.value[0]) + std::abs(out.value[1])));
  return out;
}

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double whole, double tol, int depth, int& evals,
                   bool& ok) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m);
  double rm = 0.5 * (m + b);
  double flm = f(lm);
  double frm = f(rm);
  evals += 2;
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0) {
    ok = false;
    return left + right + delta / 15.0;
  }
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, evals, ok) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, evals, ok);
}

}  // namespace

AdaptiveResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                double abs_tol, int max_depth) {
  double fa = f(a);
  double fb = f(b);
  double m = 0.5 * (a + b);
  double fm = f(m);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  int evals = 3;
  bool ok = true;
  AdaptiveResult r;
  r.value = simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol, max_depth, evals, ok);
  r.intervals = evals;
  r.converged = ok;
  r.error = abs_tol;
  return r;
}

}  // namespace hpm
