#pragma once

// F_r(μ,ν) = sup{ |∫f dμ − ∫f dν| : f ≥ 0, Lip f ≤ 1, spt f ⊂ B_r } between
// particle clouds, solved exactly as an uncapacitated min-cost flow.

#include <vector>

#include "hpm/particle.hpp"

namespace hpm {

struct FrOptions {
  int neighbors = 12;       // initial Lipschitz arcs per node (nearest neighbours)
  double tolerance = 1e-10; // slack, relative to r, when checking |f_i − f_j| ≤ |p_i − p_j|
  int max_rounds = 100;     // constraint-generation rounds
};

struct FrResult {
  double value = 0.0;
  int dim = 0;
  std::vector<double> nodes;      // merged support inside B_r, row-major
  std::vector<double> weights;    // μ − ν mass per node
  std::vector<double> potential;  // optimal f at each node
  double primal_cost = 0.0;       // min-cost flow value for the winning sign
  int rounds = 0;
  std::size_t arcs = 0;
  bool converged = false;
};

/// Closed form Σ m_i (r − |p_i|)^+ = F_r(μ, 0).
double f_r_of(const ParticleMeasure& mu, double r);

/// The dual LP over node values f_i with f_i ≤ (r − |p_i|)^+, f_i ≥ 0 and
/// f_i − f_j ≤ |p_i − p_j| is the dual of a transshipment problem with a
/// ground node standing for R^n∖B_r. It is solved by successive shortest
/// paths on a nearest-neighbour arc set; Lipschitz constraints violated by the
/// recovered f are added as arcs until none remain, so the value is exact.
/// Empty clouds are the zero measure. Throws when a non-empty cloud is not
/// valid on B_r.
FrResult f_r_distance_detail(const ParticleMeasure& mu, const ParticleMeasure& nu, double r,
                             const FrOptions& opt = {});
double f_r_distance(const ParticleMeasure& mu, const ParticleMeasure& nu, double r,
                    const FrOptions& opt = {});

/// Σ_{i=1}^{terms} 2^{-i} min(1, F_i(μ,ν)); the omitted tail is at most 2^{-terms}.
double weak_metric(const ParticleMeasure& mu, const ParticleMeasure& nu, int terms,
                   const FrOptions& opt = {});

}  // namespace hpm
