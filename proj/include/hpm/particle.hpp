#pragma once

// Weighted point clouds standing in for c·ω_h inside a truncation ball, and the
// image measures T_{x,r}[μ](E) = μ(x + rE).

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hpm/measure.hpp"

namespace hpm {

struct ParticleMeasure {
  int dim = 0;
  std::vector<double> coords;  // size() × dim, row-major
  std::vector<double> masses;
  double truncation_radius = 0.0;  // the cloud represents the measure on this ball
  std::uint64_t poly_hash = 0;
  int grid_level = 0;
  double dropped_fraction = 0.0;

  std::size_t size() const { return masses.size(); }
  std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  double total_mass() const;
  void add(std::span<const double> p, double mass);
};

struct DiscretizeOptions {
  int grid = 64;                       // lines per unit half-width, per axis
  int roots_per_ray_max = 0;           // 0: degree of h
  double tangential_threshold = 1e-8;  // drop roots with |∂_a h| < threshold·|∇h|
};

/// Particles on {h = 0} ∩ B_R. For every axis a, lines parallel to e_a pass
/// through the centres of a square grid on the orthogonal hyperplane; each sign
/// change of h on a line becomes a particle with mass cell_area·|∂_a h|. Since
/// Σ_a ν_a² = 1 on the zero set, the axes together reproduce |∇h| dH^{n-1}.
ParticleMeasure discretize(const PolyMeasure& m, double R, const DiscretizeOptions& opt = {});

/// T_{x,r}[μ]: p ↦ (p − x)/r with masses unchanged. The truncation radius
/// becomes (R − |x|)/r; when x lies outside B_R the result is empty.
ParticleMeasure pushforward(const ParticleMeasure& mu, std::span<const double> x, double r);

/// Mass of the closed ball. Throws when the ball leaves the truncation ball.
double ball_mass(const ParticleMeasure& mu, std::span<const double> center, double r);

ParticleMeasure scaled(const ParticleMeasure& mu, double factor);

/// Merges particles sharing a cube of side `cell` into one particle at their
/// centre of mass.
ParticleMeasure coarsen(const ParticleMeasure& mu, double cell);

/// Columns x1..xn,mass.
void write_csv(std::ostream& os, const ParticleMeasure& mu);
/// R, grid level, dropped-mass fraction, polynomial hash.
nlohmann::json sidecar(const ParticleMeasure& mu);

}  // namespace hpm
