#pragma once

// Distance from a measure to the cone F_k of degree-k homogeneous harmonic
// measures at scale r, and the explicit separation constants ε_0, ε_1, ε_2.

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hpm/particle.hpp"
#include "hpm/transport.hpp"

namespace hpm {

struct ConeOptions {
  int restarts = 12;
  int max_iterations = 500;    // Nelder–Mead iterations per restart
  std::uint64_t seed = 0;
  int grid = 20;               // discretization lines per unit half-width
  double cell = 0.1;           // coarsening cube side relative to r; 0 keeps every particle
  double simplex_tol = 1e-4;   // stop when the simplex values agree to this
  FrOptions fr;
};

struct ConeDistResult {
  double value = 1.0;
  std::vector<double> best_coeffs;  // over harmonic_basis(n, k), scaled so F_r(ψ) = 1
  int restarts = 0;
  bool converged = false;
  int evaluations = 0;
  std::vector<double> restart_values;
  double best_f_r = 0.0;  // closed-form F_r of the returned ψ
};

/// d_r(σ, F_k) = inf F_r(σ/F_r(σ), ψ) over ψ = ω_p, p homogeneous harmonic of
/// degree k with F_r(ψ) = 1. Candidates are discretized like σ and normalized
/// by their own cloud F_r; the search is multi-start Nelder–Mead over the unit
/// sphere of L²-orthonormal coefficients. `starts` are tried before random
/// directions. Returns 1 when F_r(σ) = 0.
ConeDistResult cone_distance(const ParticleMeasure& sigma, int k, double r, const ConeOptions& opt,
                             const std::vector<Poly>& starts = {});
/// σ = c·ω_h, discretized on B_r with the same grid and coarsening as the
/// candidates. The degree-k part of h, when present, is the first start.
ConeDistResult cone_distance(const PolyMeasure& sigma, int k, double r, const ConeOptions& opt);

/// σ = c·ω_h on B_r as used by cone_distance (discretized, coarsened).
ParticleMeasure cone_cloud(const PolyMeasure& m, double r, int grid, double cell);

/// F_r distance between the normalized clouds of σ at grid and grid+1: the
/// resolution below which d_r values are indistinguishable from 0.
double discretization_floor(const PolyMeasure& sigma, double r, const ConeOptions& opt);

struct EpsilonTable {
  int n = 0;
  int d = 0;
  double C = 0.0;        // 6σ_{n-1}/l_{n,d}
  double C_tilde = 0.0;  // C·2^{n+d-1}
  std::vector<double> eps0;        // k = 1..d
  std::vector<double> log10_eps0;
  double eps1 = 0.0;  // min_k ε_0
  double eps2 = 0.0;  // ε_0 at k = 1
};

/// ε_0(n,d,k) = ½(2C̃)^{-(n+k-1)}.
double epsilon0(int n, int d, int k);
EpsilonTable epsilon_table(int n, int d);

struct SeparationReport {
  int k = 0;
  int degree = 0;
  double eps0 = 0.0;
  std::vector<double> radii;
  std::vector<double> values;
  std::vector<double> floors;
  std::vector<char> converged;
  std::vector<double> best_f_r;  // closed-form F_r of each returned ψ
  std::optional<double> witness_radius;  // first r with d_r ≥ max(ε_0, floor)
  std::uint64_t seed = 0;
};

/// Scans d_r(ω_h, F_k) over the radii looking for a radius where the distance
/// clears both ε_0(n, deg h, k) and the discretization floor.
SeparationReport separation_experiment(const Poly& h, int k, const std::vector<double>& radii,
                                       const ConeOptions& opt);

nlohmann::json to_json(const SeparationReport& rep);
nlohmann::json to_json(const ConeDistResult& res);
nlohmann::json to_json(const EpsilonTable& t);

}  // namespace hpm
