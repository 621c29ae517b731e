#pragma once

// Random harmonic polynomials shared by the test programs.

#include <cmath>
#include <random>
#include <vector>

#include "hpm/poly.hpp"

namespace hpm::testing {

inline Poly random_harmonic(int n, int k, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Poly p(n);
  for (const auto& b : harmonic_basis(n, k)) p = p + g(rng) * b;
  return p;
}

// h_d + t·h_j with independent random parts.
inline Poly random_mixed(int n, int d, int j, double t, std::mt19937_64& rng) {
  return random_harmonic(n, d, rng) + t * random_harmonic(n, j, rng);
}

}  // namespace hpm::testing
