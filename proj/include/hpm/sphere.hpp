#pragma once

// Quadrature and norm estimation on the unit sphere S^{n-1}, and the
// explicit constants controlling spherical harmonics of a given degree.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hpm/poly.hpp"

namespace hpm {

/// σ_{n-1} = σ(S^{n-1}) = n·ω_n
double sphere_area(int n);
/// ω_n = volume of the unit ball in R^n
double unit_ball_volume(int n);

/// Nodes and positive weights on S^{n-1}.
///
/// n = 2: trapezoid rule on the circle, exact for trigonometric degree < 2·level.
/// n = 3: Gauss–Legendre in cos θ times trapezoid in φ, exact for spherical
///        polynomials of degree ≤ 2·level − 1.
/// n ≥ 4: equal-weight Monte Carlo in antipodal pairs (odd moments vanish
///        exactly); exactness_degree = 1 and integrals carry a statistical error.
struct SphereRule {
  int dim = 0;
  int level = 0;
  std::uint64_t seed = 0;
  int exactness_degree = 0;
  bool monte_carlo = false;
  /// Upper bound on the chordal distance from any point of the sphere to the
  /// nearest node; +inf when no bound is available.
  double covering_radius = 0.0;
  std::vector<double> coords;  // size() × dim, row-major
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  std::span<const double> node(std::size_t i) const {
    return {coords.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
};

SphereRule build_rule(int n, int level, std::uint64_t seed = 0);

nlohmann::json to_json(const SphereRule& rule);
SphereRule rule_from_json(const nlohmann::json& j);

using SphereFn = std::function<double(std::span<const double>)>;

/// Σ w_i f(θ_i) with compensated summation.
double integrate(const SphereRule& rule, const SphereFn& f);

/// Sample standard error of a Monte Carlo rule for f (0 for deterministic rules).
double mc_standard_error(const SphereRule& rule, const SphereFn& f);

/// Integrals of f over {g > 0} and {g < 0} on the sphere.
struct SignSplit {
  double positive = 0.0;
  double negative = 0.0;
  double error = 0.0;
  bool converged = true;
};

/// Accuracy controls for sign-split integration.
struct SplitOptions {
  int inner_order = 24;     // Gauss nodes per smooth piece along a great-circle arc
  double rel_tol = 1e-12;   // adaptive azimuth integration
  double abs_tol = 1e-300;
  int max_intervals = 6000;
};

/// ∫ f over {g>0} and {g<0} on S^{n-1}. For n = 2 and n = 3 the sign changes
/// of g along each circle arc are located exactly (polynomial roots after a
/// half-angle substitution) and f is integrated piecewise, with adaptive
/// Gauss–Kronrod over the azimuth for n = 3; f must be smooth on each sign
/// region. For n ≥ 4 the rule's nodes are used directly.
SignSplit integrate_by_sign(const SphereRule& rule, const Poly& g, const SphereFn& f,
                            const SplitOptions& opt = {});

/// ‖p‖_{L¹(S^{n-1})}
double l1_norm_sphere(const Poly& p, const SphereRule& rule);

struct SupNorm {
  double lower = 0.0;          // attained value, certified lower bound
  double upper = 0.0;          // Lipschitz-certified upper bound (may be +inf)
  std::vector<double> argmax;  // point where |p| = lower
  bool certified = false;      // upper is finite
};

/// max |p| over the rule's nodes, polished by projected ascent from the best
/// nodes. For homogeneous harmonic p of degree k ≥ 1, the upper bound uses
/// |p(θ)−p(θ')| ≤ A_{n,k}‖p‖_∞|θ−θ'| with mesh diameter δ = 2·covering_radius:
/// upper = lower·(1 + A_{n,k}·δ) whenever A_{n,k}·δ ≤ 1, else +inf.
SupNorm sup_norm_sphere(const Poly& p, const SphereRule& rule);

/// max |p(r·θ)| over the sphere (lower bound, polished), for arbitrary p.
double sup_on_sphere_of_radius(const Poly& p, double radius, const SphereRule& rule);

/// σ{θ : |p(θ)| ≥ ½‖p‖_∞}. Requires p homogeneous of degree ≥ 1.
double big_piece_measure(const Poly& p, const SphereRule& rule);
/// Same, with the sup norm supplied by the caller.
double big_piece_measure(const Poly& p, const SphereRule& rule, double sup_norm);

struct SphereConstants {
  int n = 0;
  int k = 0;
  double A = 0.0;  // uniform Lipschitz constant
  double l = 0.0;  // big-piece lower bound = σ(cap of chordal radius 1/(2A))
  double B = 0.0;  // reverse Hölder constant = 2/l
};

/// Σ_{1≤|α|≤k} 1/α! over multi-indices of length n.
double inverse_factorial_sum(int n, int k);

/// A_{n,k} = (2^{n+2}nk)^k Σ_{1≤|α|≤k} (α!)^{-1}; l_{n,k} as the exact area of
/// the cap of chordal radius 1/(2A_{n,k}); B_{n,k} = 2/l_{n,k}.
/// Throws std::overflow_error when A overflows or l underflows.
SphereConstants sphere_constants(int n, int k);

/// σ of the cap {θ : |θ − θ₀| < chord} on S^{n-1}; chord in [0, 2].
double chordal_cap_area(int n, double chord);

/// (2^{n+1}n|α|)^{|α|}
double derivative_bound_factor(int n, int order);

/// |D^α p(θ)| ≤ (2^{n+1}n|α|)^{|α|}·sup_{∂B_2}|p|. Requires |α| ≥ 1.
bool derivative_bound_check(const Poly& p, const MultiIndex& alpha,
                            std::span<const double> theta, const SphereRule& rule);
/// Same, with sup_{∂B_2}|p| supplied.
bool derivative_bound_check(const Poly& p, const MultiIndex& alpha,
                            std::span<const double> theta, double sup_on_b2);

}  // namespace hpm
