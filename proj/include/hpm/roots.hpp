#pragma once

// Real roots of univariate polynomials given as ascending coefficient lists.

#include <span>
#include <vector>

namespace hpm {

double horner(std::span<const double> coeffs, double t);

/// Coefficients of the derivative.
std::vector<double> derivative_coeffs(std::span<const double> coeffs);

/// Roots in (lo, hi) at which the polynomial changes sign (odd multiplicity),
/// in increasing order. Even-order contacts are skipped. The interval is split
/// at the sign-change roots of the derivative, computed recursively, so the
/// polynomial is monotone on each piece and holds at most one root there.
/// Roots are refined by safeguarded Newton/bisection until the bracket is
/// below tol.
std::vector<double> sign_change_roots(std::span<const double> coeffs, double lo, double hi,
                                      double tol = 1e-13);

}  // namespace hpm
