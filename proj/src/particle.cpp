#include "hpm/particle.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "hpm/roots.hpp"

namespace hpm {

double ParticleMeasure::total_mass() const {
  double s = 0.0;
  for (double m : masses) s += m;
  return s;
}

void ParticleMeasure::add(std::span<const double> p, double mass) {
  coords.insert(coords.end(), p.begin(), p.end());
  masses.push_back(mass);
}

ParticleMeasure discretize(const PolyMeasure& m, double R, const DiscretizeOptions& opt) {
  if (!(R > 0.0)) throw std::invalid_argument("truncation radius must be positive");
  if (opt.grid < 1) throw std::invalid_argument("grid must be >= 1");
  const int n = m.dim();
  // Work with h(R·)/c on the unit ball; ω_h(E) = c·R^{n-2}·ω_{h(R·)/c}(E/R).
  Poly h = m.poly().rescaled(R);
  double c = 0.0;
  for (const auto& t : h.terms()) c = std::max(c, std::abs(t.c));
  h = (1.0 / c) * h;
  const double mass_factor = m.scale() * c * std::pow(R, n - 2);
  const int max_roots = opt.roots_per_ray_max > 0 ? opt.roots_per_ray_max : h.degree();

  ParticleMeasure out;
  out.dim = n;
  out.truncation_radius = R;
  out.poly_hash = m.poly().hash();
  out.grid_level = opt.grid;

  const int g = opt.grid;
  const double delta = 1.0 / g;  // grid over [-1,1] with 2g cells per side
  const double cell_area = std::pow(delta, n - 1);
  const int per_side = 2 * g;
  double kept = 0.0;
  double dropped = 0.0;
  std::vector<double> origin(static_cast<std::size_t>(n));
  std::vector<double> pt(static_cast<std::size_t>(n));
  std::vector<int> idx(static_cast<std::size_t>(n - 1));

  for (int axis = 0; axis < n; ++axis) {
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      double r2 = 0.0;
      for (int q = 0, o = 0; q < n; ++q) {
        if (q == axis) {
          origin[static_cast<std::size_t>(q)] = 0.0;
          continue;
        }
        double u = -1.0 + (idx[static_cast<std::size_t>(o)] + 0.5) * delta;
        origin[static_cast<std::size_t>(q)] = u;
        r2 += u * u;
        ++o;
      }
      if (r2 < 1.0) {
        double s = std::sqrt(1.0 - r2);
        auto coeffs = h.restrict_to_axis(origin, axis);
        auto dcoeffs = derivative_coeffs(coeffs);
        auto roots = sign_change_roots(coeffs, -s, s);
        int count = 0;
        for (double t : roots) {
          pt = origin;
          pt[static_cast<std::size_t>(axis)] = t;
          double da = std::abs(horner(dcoeffs, t));
          auto grad = h.gradient(pt);
          double gn = 0.0;
          for (double v : grad) gn += v * v;
          gn = std::sqrt(gn);
          double mass = cell_area * da * mass_factor;
          if (da < opt.tangential_threshold * gn || ++count > max_roots) {
            dropped += mass;
            continue;
          }
          for (auto& v : pt) v *= R;
          out.add(pt, mass);
          kept += mass;
        }
      }
      int o = 0;
      while (o < n - 1 && ++idx[static_cast<std::size_t>(o)] == per_side) idx[static_cast<std::size_t>(o++)] = 0;
      if (o == n - 1) break;
    }
  }
  out.dropped_fraction = (kept + dropped) > 0.0 ? dropped / (kept + dropped) : 0.0;
  return out;
}

ParticleMeasure pushforward(const ParticleMeasure& mu, std::span<const double> x, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("pushforward scale must be positive");
  if (static_cast<int>(x.size()) != mu.dim) throw std::invalid_argument("pushforward centre has wrong dimension");
  ParticleMeasure out;
  out.dim = mu.dim;
  out.poly_hash = mu.poly_hash;
  out.grid_level = mu.grid_level;
  out.dropped_fraction = mu.dropped_fraction;
  double xn = 0.0;
  for (double v : x) xn += v * v;
  xn = std::sqrt(xn);
  if (xn >= mu.truncation_radius) return out;
  out.truncation_radius = (mu.truncation_radius - xn) / r;
  out.coords.resize(mu.coords.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (int q = 0; q < mu.dim; ++q) {
      std::size_t k = i * static_cast<std::size_t>(mu.dim) + static_cast<std::size_t>(q);
      out.coords[k] = (mu.coords[k] - x[static_cast<std::size_t>(q)]) / r;
    }
  }
  out.masses = mu.masses;
  return out;
}

double ball_mass(const ParticleMeasure& mu, std::span<const double> center, double r) {
  if (r < 0.0) throw std::invalid_argument("ball radius must be non-negative");
  if (static_cast<int>(center.size()) != mu.dim) throw std::invalid_argument("ball centre has wrong dimension");
  double cn = 0.0;
  for (double v : center) cn += v * v;
  if (std::sqrt(cn) + r > mu.truncation_radius * (1.0 + 1e-12)) {
    throw std::invalid_argument("ball leaves the truncation region");
  }
  double s = 0.0;
  const double r2 = r * r;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    auto p = mu.point(i);
    double d2 = 0.0;
    for (int q = 0; q < mu.dim; ++q) {
      double d = p[static_cast<std::size_t>(q)] - center[static_cast<std::size_t>(q)];
      d2 += d * d;
    }
    if (d2 <= r2) s += mu.masses[i];
  }
  return s;
}

ParticleMeasure scaled(const ParticleMeasure& mu, double factor) {
  ParticleMeasure out = mu;
  for (auto& m : out.masses) m *= factor;
  return out;
}

ParticleMeasure coarsen(const ParticleMeasure& mu, double cell) {
  if (!(cell > 0.0)) throw std::invalid_argument("coarsening cell must be positive");
  struct Acc {
    double mass = 0.0;
    std::vector<double> moment;
  };
  std::map<std::vector<long long>, Acc> bins;
  std::vector<long long> key(static_cast<std::size_t>(mu.dim));
  for (std::size_t i = 0; i < mu.size(); ++i) {
    auto p = mu.point(i);
    for (int q = 0; q < mu.dim; ++q) {
      key[static_cast<std::size_t>(q)] = static_cast<long long>(std::floor(p[static_cast<std::size_t>(q)] / cell));
    }
    auto& a = bins[key];
    if (a.moment.empty()) a.moment.assign(static_cast<std::size_t>(mu.dim), 0.0);
    a.mass += mu.masses[i];
    for (int q = 0; q < mu.dim; ++q) a.moment[static_cast<std::size_t>(q)] += mu.masses[i] * p[static_cast<std::size_t>(q)];
  }
  ParticleMeasure out;
  out.dim = mu.dim;
  out.truncation_radius = mu.truncation_radius;
  out.poly_hash = mu.poly_hash;
  out.grid_level = mu.grid_level;
  out.dropped_fraction = mu.dropped_fraction;
  for (auto& [k, a] : bins) {
    if (!(a.mass > 0.0)) continue;
    for (auto& v : a.moment) v /= a.mass;
    out.add(a.moment, a.mass);
  }
  return out;
}

void write_csv(std::ostream& os, const ParticleMeasure& mu) {
  for (int q = 0; q < mu.dim; ++q) os << 'x' << (q + 1) << ',';
  os << "mass\n";
  std::ostringstream line;
  line << std::setprecision(17);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    line.str("");
    for (double v : mu.point(i)) line << v << ',';
    line << mu.masses[i] << '\n';
    os << line.str();
  }
}

nlohmann::json sidecar(const ParticleMeasure& mu) {
  std::ostringstream hash;
  hash << std::hex << mu.poly_hash;
  return {{"dim", mu.dim},
          {"R", mu.truncation_radius},
          {"grid_level", mu.grid_level},
          {"dropped_mass_fraction", mu.dropped_fraction},
          {"poly_hash", hash.str()},
          {"particles", mu.size()},
          {"total_mass", mu.total_mass()}};
}

}  // namespace hpm
