#pragma once

// One-dimensional quadrature building blocks.

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hpm {

/// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double v);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss–Legendre rule with `order` nodes; cached per order.
const GaussRule& gauss_legendre(int order);

struct AdaptiveResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
  bool converged = false;
};

/// Globally adaptive Gauss–Kronrod (7/15) integration of a vector-valued
/// integrand of fixed width. Bisects the interval with the largest error
/// estimate until the summed error is below max(abs_tol, rel_tol·‖I‖₁).
template <std::size_t W>
struct AdaptiveVecResult {
  std::array<double, W> value{};
  double error = 0.0;
  int intervals = 0;
  bool converged = false;
};

using VecIntegrand2 = std::function<std::array<double, 2>(double)>;

AdaptiveVecResult<2> integrate_gk15(const VecIntegrand2& f, double a, double b, double abs_tol,
                                    double rel_tol, int max_intervals = 4000);

/// Adaptive Simpson on [a, b] with absolute tolerance; depth-limited.
AdaptiveResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                double abs_tol, int max_depth = 40);

}  // namespace hpm
