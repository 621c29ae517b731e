#pragma once

// Randomized sweep of the sphere inequalities for homogeneous harmonics:
// Lipschitz bound, big piece, reverse Hölder and the interior derivative bound.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace hpm {

struct InequalityOptions {
  int n = 3;
  int max_degree = 4;
  int polynomials_per_degree = 10;
  int pairs_per_polynomial = 250;   // half of them at chord ≤ 0.05
  int points_per_polynomial = 250;  // derivative bound evaluations
  int rule_level = 24;
  std::uint64_t seed = 0;
};

struct InequalityTally {
  std::string name;
  long trials = 0;
  long violations = 0;
  double worst_ratio = 0.0;  // max over trials of lhs / rhs
};

struct InequalityReport {
  std::vector<InequalityTally> checks;
  long total_trials() const;
  long total_violations() const;
};

/// Random unit-variance combinations of harmonic_basis(n, k) for k = 1..max_degree:
///   |p(θ₁) − p(θ₂)| ≤ A_{n,k}‖p‖_∞|θ₁ − θ₂|
///   σ{|p| ≥ ½‖p‖_∞} ≥ l_{n,k}
///   ‖p‖_∞ ≤ B_{n,k}‖p‖₁
///   |D^α p(θ)| ≤ (2^{n+1}n|α|)^{|α|} sup_{∂B_2}|p|, 1 ≤ |α| ≤ k
InequalityReport inequality_suite(const InequalityOptions& opt);

nlohmann::json to_json(const InequalityReport& rep);

}  // namespace hpm
