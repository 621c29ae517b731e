#include "hpm/measure.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "hpm/quadrature.hpp"

namespace hpm {

namespace {

double max_abs_coeff(const Poly& p) {
  double s = 0.0;
  for (const auto& t : p.terms()) s = std::max(s, std::abs(t.c));
  return s;
}

double part_sup(const PolyMeasure& m, int i, const SphereRule& rule) {
  if (!m.decomp().has_part(i)) return 0.0;
  return sup_norm_sphere(m.decomp().part(i), rule).lower;
}

void require_positive_radius(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("radius must be positive and finite");
}

}  // namespace

PolyMeasure::PolyMeasure(Poly h, double scale) : poly_(std::move(h)), scale_(scale) {
  if (poly_.dim() < 2) throw std::invalid_argument("measure needs dimension >= 2");
  if (poly_.is_zero()) throw std::invalid_argument("measure of the zero polynomial");
  if (!(scale_ > 0.0) || !std::isfinite(scale_)) throw std::invalid_argument("measure scale must be positive");
  if (harmonic_residual(poly_) > 1e-10) throw std::invalid_argument("polynomial is not harmonic");
  if (poly_.low_degree() == 0) {
    throw std::invalid_argument("polynomial has a constant term; measures need h(0) = 0");
  }
  decomp_ = homogeneous_decompose(poly_);
}

BallMeasure ball_measure_sides(const PolyMeasure& m, double r, const SphereRule& rule,
                               const SplitOptions& opt) {
  require_positive_radius(r);
  if (rule.dim != m.dim()) throw std::invalid_argument("rule and measure dimensions differ");
  const int n = m.dim();
  // h(rθ) = Σ r^i h_i(θ) and ∂_r h(rθ) = Σ i r^{i-1} h_i(θ), built per part so
  // extreme radii keep every degree in range.
  Poly sign_poly(n);
  Poly radial(n);
  for (const auto& [i, part] : m.decomp().parts) {
    double ri = std::pow(r, i);
    sign_poly = sign_poly + ri * part;
    radial = radial + (i * ri / r) * part;
  }
  double norm = max_abs_coeff(sign_poly);
  sign_poly = (1.0 / norm) * sign_poly;
  const double factor = m.scale() * std::pow(r, n - 1);

  BallMeasure out;
  auto f = [&radial](std::span<const double> x) { return radial(x); };
  auto split = integrate_by_sign(rule, sign_poly, f, opt);
  out.plus_side = factor * split.positive;
  out.minus_side = -factor * split.negative;
  out.value = out.plus_side;
  out.error = factor * split.error;
  out.converged = split.converged;
  return out;
}

double ball_measure(const PolyMeasure& m, double r, const SphereRule& rule) {
  return ball_measure_sides(m, r, rule).value;
}

double homogeneous_ball_measure(const PolyMeasure& m, double r, double l1_norm) {
  if (!m.homogeneous()) throw std::invalid_argument("closed form needs a homogeneous polynomial");
  require_positive_radius(r);
  const int k = m.top_degree();
  return m.scale() * 0.5 * k * std::pow(r, m.dim() + k - 2) * l1_norm;
}

double f_r(const PolyMeasure& m, double r, const SphereRule& rule, double rel_tol) {
  require_positive_radius(r);
  double top = ball_measure(m, r, rule);
  if (top <= 0.0) return 0.0;
  auto g = [&](double s) { return s > 0.0 ? ball_measure(m, s, rule) : 0.0; };
  return adaptive_simpson(g, 0.0, r, rel_tol * r * top).value;
}

double homogeneous_f_r(const PolyMeasure& m, double r, double l1_norm) {
  if (!m.homogeneous()) throw std::invalid_argument("closed form needs a homogeneous polynomial");
  require_positive_radius(r);
  const int n = m.dim();
  const int k = m.top_degree();
  return m.scale() * k * l1_norm * std::pow(r, n + k - 1) / (2.0 * (n + k - 1));
}

double zeta(const PolyMeasure& m, const SphereRule& rule) {
  const int d = m.top_degree();
  double top = part_sup(m, d, rule);
  double z = 0.0;
  for (int k = 1; k <= d - 1; ++k) z = std::max(z, part_sup(m, k, rule) / top);
  return z;
}

double zeta_star(const PolyMeasure& m, const SphereRule& rule) {
  const int j = m.bottom_degree();
  const int d = m.top_degree();
  double bottom = part_sup(m, j, rule);
  double z = 0.0;
  for (int k = j + 1; k <= d; ++k) z = std::max(z, part_sup(m, k, rule) / bottom);
  return z;
}

double r1(const PolyMeasure& m, const SphereRule& rule) {
  double z = zeta(m, rule);
  if (z == 0.0) return 1.0;
  const int n = m.dim();
  return 1.0 + 12.0 * sphere_area(n) * z / sphere_constants(n, m.top_degree()).l;
}

double r2(const PolyMeasure& m, const SphereRule& rule) {
  double z = zeta_star(m, rule);
  if (z == 0.0) return 0.5;
  const int n = m.dim();
  return std::min(0.5, sphere_constants(n, m.bottom_degree()).l / (72.0 * sphere_area(n) * z));
}

namespace {

BoundsCheck degree_sandwich(const PolyMeasure& m, double r, const SphereRule& rule, int deg) {
  const int n = m.dim();
  double sup = part_sup(m, deg, rule);
  double base = m.scale() * deg * std::pow(r, n + deg - 2) * sup;
  BoundsCheck b;
  b.value = ball_measure(m, r, rule);
  b.lower = 0.25 * sphere_constants(n, deg).l * base;
  b.upper = 1.5 * sphere_area(n) * base;
  b.holds = b.lower <= b.value && b.value <= b.upper;
  return b;
}

}  // namespace

BoundsCheck bounds_check_infinity(const PolyMeasure& m, double r, const SphereRule& rule) {
  require_positive_radius(r);
  if (!(r > r1(m, rule))) throw std::invalid_argument("large-radius bound needs r > r1");
  return degree_sandwich(m, r, rule, m.top_degree());
}

BoundsCheck bounds_check_zero(const PolyMeasure& m, double r, const SphereRule& rule) {
  require_positive_radius(r);
  if (!(r < r2(m, rule))) throw std::invalid_argument("small-radius bound needs r < r2");
  return degree_sandwich(m, r, rule, m.bottom_degree());
}

namespace {

struct Fit {
  double slope = 0.0;
  double residual = 0.0;
};

Fit fit_window(const std::vector<double>& radii, const std::vector<double>& inner,
               const std::vector<double>& outer, double tau, const std::vector<double>& local,
               std::size_t begin, std::size_t end) {
  std::vector<double> xs, ys;
  for (std::size_t i = begin; i < end; ++i) {
    xs.push_back(std::log(radii[i]));
    ys.push_back(std::log(inner[i]));
    xs.push_back(std::log(radii[i] * tau));
    ys.push_back(std::log(outer[i]));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(ys.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  Fit f;
  f.slope = sxy / sxx;
  double ss = 0;
  for (std::size_t i = begin; i < end; ++i) ss += (local[i] - f.slope) * (local[i] - f.slope);
  f.residual = std::sqrt(ss / static_cast<double>(end - begin));
  return f;
}

}  // namespace

DoublingScan doubling_scan(const PolyMeasure& m, double tau, double r_min, double r_max, int steps,
                           const SphereRule& rule) {
  if (!(tau > 1.0)) throw std::invalid_argument("doubling scan needs tau > 1");
  if (!(r_min > 0.0) || !(r_max > r_min)) throw std::invalid_argument("doubling scan needs 0 < r_min < r_max");
  if (steps < 4) throw std::invalid_argument("doubling scan grid too coarse (steps < 4)");
  DoublingScan s;
  s.dim = m.dim();
  s.tau = tau;
  s.poly_hash = m.poly().hash();
  std::vector<double> inner, outer;
  const double lr = std::log(r_max / r_min);
  for (int i = 0; i < steps; ++i) {
    double r = r_min * std::exp(lr * i / (steps - 1));
    double a = ball_measure(m, r, rule);
    double b = ball_measure(m, tau * r, rule);
    s.radii.push_back(r);
    inner.push_back(a);
    outer.push_back(b);
    s.ratios.push_back(b / a);
    s.local_exponents.push_back(std::log(b / a) / std::log(tau));
  }
  const std::size_t n = s.radii.size();
  const std::size_t w = std::max<std::size_t>(2, n / 4);
  auto lo = fit_window(s.radii, inner, outer, tau, s.local_exponents, 0, w);
  auto hi = fit_window(s.radii, inner, outer, tau, s.local_exponents, n - w, n);
  s.exponent_at_zero = lo.slope;
  s.residual_at_zero = lo.residual;
  s.exponent_at_infinity = hi.slope;
  s.residual_at_infinity = hi.residual;
  return s;
}

void write_csv(std::ostream& os, const DoublingScan& scan) {
  os << "# tau=" << std::setprecision(17) << scan.tau << " n=" << scan.dim << " hash=" << std::hex
     << scan.poly_hash << std::dec << "\n";
  os << "r,ratio,local_exponent\n";
  for (std::size_t i = 0; i < scan.radii.size(); ++i) {
    os << scan.radii[i] << ',' << scan.ratios[i] << ',' << scan.local_exponents[i] << '\n';
  }
}

std::string to_string(ClassifyStatus s) {
  switch (s) {
    case ClassifyStatus::ok:
      return "ok";
    case ClassifyStatus::mismatch:
      return "mismatch";
    case ClassifyStatus::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

DegreeClass degree_classify(const PolyMeasure& m, const SphereRule& rule, const ClassifyOptions& opt) {
  DegreeClass out;
  double lo = r2(m, rule) / opt.margin;
  double hi = r1(m, rule) * opt.margin;
  out.scan = doubling_scan(m, opt.tau, lo, hi, opt.steps, rule);
  const int n = m.dim();
  double e0 = out.scan.exponent_at_zero;
  double e1 = out.scan.exponent_at_infinity;
  double re0 = std::round(e0);
  double re1 = std::round(e1);
  out.j = static_cast<int>(re0) - n + 2;
  out.d = static_cast<int>(re1) - n + 2;
  if (std::abs(e0 - re0) > opt.rounding_threshold || std::abs(e1 - re1) > opt.rounding_threshold) {
    out.status = ClassifyStatus::inconclusive;
    out.note = "fitted exponent not within rounding threshold of an integer";
  } else if (out.j != m.bottom_degree() || out.d != m.top_degree()) {
    out.status = ClassifyStatus::mismatch;
    out.note = "fitted degrees differ from the polynomial's lowest/highest degree";
  } else {
    out.status = ClassifyStatus::ok;
  }
  return out;
}

}  // namespace hpm
