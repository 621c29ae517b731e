#include "hpm/weak_form.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hpm/quadrature.hpp"
#include "hpm/roots.hpp"

namespace hpm {

double Bump::value(std::span<const double> x) const {
  double q = 0.0;
  for (std::size_t i = 0; i < center.size(); ++i) q += (x[i] - center[i]) * (x[i] - center[i]);
  double u = 1.0 - q / (radius * radius);
  return u > 0.0 ? std::pow(u, power) : 0.0;
}

double Bump::laplacian(std::span<const double> x) const {
  const double n = static_cast<double>(center.size());
  double q = 0.0;
  for (std::size_t i = 0; i < center.size(); ++i) q += (x[i] - center[i]) * (x[i] - center[i]);
  const double rho2 = radius * radius;
  double u = 1.0 - q / rho2;
  if (u <= 0.0) return 0.0;
  const double m = power;
  return (4.0 * m * (m - 1.0) / rho2) * (1.0 - u) * std::pow(u, power - 2) -
         (2.0 * n * m / rho2) * std::pow(u, power - 1);
}

namespace {

// ∫ h^± Δφ along the chord of the bump's ball through `origin` in direction e_axis.
std::array<double, 2> line_sides(const Poly& h, const Bump& phi, std::vector<double> origin, int axis,
                                 double half_chord, int order) {
  const double c = phi.center[static_cast<std::size_t>(axis)];
  origin[static_cast<std::size_t>(axis)] = 0.0;
  auto coeffs = h.restrict_to_axis(origin, axis);
  std::vector<double> cuts{c - half_chord};
  for (double t : sign_change_roots(coeffs, c - half_chord, c + half_chord)) cuts.push_back(t);
  cuts.push_back(c + half_chord);
  const auto& gl = gauss_legendre(order);
  std::array<double, 2> acc{0.0, 0.0};
  std::vector<double> x = origin;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    double half = 0.5 * (cuts[i + 1] - cuts[i]);
    if (!(half > 0.0)) continue;
    double sum = 0.0;
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      double t = mid + half * gl.nodes[q];
      x[static_cast<std::size_t>(axis)] = t;
      sum += gl.weights[q] * horner(coeffs, t) * phi.laplacian(x);
    }
    sum *= half;
    // the sign of h on the piece decides the side
    if (horner(coeffs, mid) > 0.0) {
      acc[0] += sum;
    } else {
      acc[1] -= sum;
    }
  }
  return acc;
}

}  // namespace

WeakFormResult weak_form_check(const PolyMeasure& m, const Bump& phi, const ParticleMeasure& mu,
                               const WeakFormOptions& opt) {
  const int n = m.dim();
  if (n != 2 && n != 3) throw std::invalid_argument("weak form check supports n = 2 and n = 3");
  if (static_cast<int>(phi.center.size()) != n) throw std::invalid_argument("bump centre has wrong dimension");
  if (mu.dim != n) throw std::invalid_argument("particle cloud has wrong dimension");
  if (opt.axis < 0 || opt.axis >= n) throw std::invalid_argument("axis out of range");
  double cn = 0.0;
  for (double v : phi.center) cn += v * v;
  if (std::sqrt(cn) + phi.radius > mu.truncation_radius * (1.0 + 1e-12)) {
    throw std::invalid_argument("bump support exceeds the truncation radius");
  }
  const Poly& h = m.poly();
  // h·Δφ is a polynomial of this degree on each piece
  const int order = (h.degree() + 2 * phi.power) / 2 + 2;
  const double rho = phi.radius;

  CompensatedSum plus, minus;
  std::vector<double> origin = phi.center;
  if (n == 2) {
    const int other = 1 - opt.axis;
    const auto& gl = gauss_legendre(opt.line_nodes);
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      double w = rho * gl.nodes[q];
      origin[static_cast<std::size_t>(other)] = phi.center[static_cast<std::size_t>(other)] + w;
      double half = std::sqrt(std::max(0.0, rho * rho - w * w));
      auto s = line_sides(h, phi, origin, opt.axis, half, order);
      plus.add(rho * gl.weights[q] * s[0]);
      minus.add(rho * gl.weights[q] * s[1]);
    }
  } else {
    std::array<int, 2> others{};
    for (int q = 0, o = 0; q < 3; ++q) {
      if (q != opt.axis) others[static_cast<std::size_t>(o++)] = q;
    }
    const auto& gl = gauss_legendre(opt.radial_nodes);
    const double dth = 2.0 * std::numbers::pi / opt.angular_nodes;
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      double rr = 0.5 * rho * (1.0 + gl.nodes[q]);
      double wr = 0.5 * rho * gl.weights[q] * rr;
      double half = std::sqrt(std::max(0.0, rho * rho - rr * rr));
      for (int a = 0; a < opt.angular_nodes; ++a) {
        double th = (a + 0.5) * dth;
        origin[static_cast<std::size_t>(others[0])] = phi.center[static_cast<std::size_t>(others[0])] + rr * std::cos(th);
        origin[static_cast<std::size_t>(others[1])] = phi.center[static_cast<std::size_t>(others[1])] + rr * std::sin(th);
        auto s = line_sides(h, phi, origin, opt.axis, half, order);
        plus.add(wr * dth * s[0]);
        minus.add(wr * dth * s[1]);
      }
    }
  }
  WeakFormResult r;
  r.plus_volume = m.scale() * plus.value();
  r.minus_volume = m.scale() * minus.value();
  CompensatedSum part;
  for (std::size_t i = 0; i < mu.size(); ++i) part.add(mu.masses[i] * phi.value(mu.point(i)));
  r.particle = part.value();
  r.residual = std::abs(r.plus_volume - r.particle);
  r.side_gap = std::abs(r.plus_volume - r.minus_volume);
  return r;
}

}  // namespace hpm
