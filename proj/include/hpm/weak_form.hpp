#pragma once

// Numerical check of ∫_{h>0} h Δφ = ∫_{h<0} (−h) Δφ = ∫ φ dω_h for a
// polynomial bump φ.

#include <span>
#include <vector>

#include "hpm/measure.hpp"
#include "hpm/particle.hpp"

namespace hpm {

/// φ(x) = (1 − |x−c|²/ρ²)^power inside B(c, ρ), 0 outside. C^{power-1}.
struct Bump {
  std::vector<double> center;
  double radius = 1.0;
  int power = 4;

  double value(std::span<const double> x) const;
  double laplacian(std::span<const double> x) const;
};

struct WeakFormOptions {
  int radial_nodes = 48;    // outer polar Gauss nodes (n = 3)
  int angular_nodes = 96;   // outer trapezoid nodes (n = 3)
  int line_nodes = 64;      // outer Gauss nodes (n = 2)
  int axis = 0;             // direction of the inner line integrals
};

struct WeakFormResult {
  double plus_volume = 0.0;   // ∫_{h>0} h Δφ
  double minus_volume = 0.0;  // ∫_{h<0} (−h) Δφ
  double particle = 0.0;      // Σ m_i φ(p_i)
  double residual = 0.0;      // |plus_volume − particle|
  double side_gap = 0.0;      // |plus_volume − minus_volume|
};

/// Volume integrals are exact Gauss rules on the polynomial pieces of each
/// line between sign changes of h, with a polar outer rule. The measure's
/// scale multiplies both volume sides. Supports n = 2 and n = 3. Throws when
/// the bump leaves the particle cloud's truncation ball.
WeakFormResult weak_form_check(const PolyMeasure& m, const Bump& phi, const ParticleMeasure& mu,
                               const WeakFormOptions& opt = {});

}  // namespace hpm
