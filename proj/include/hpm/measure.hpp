#pragma once

// Polynomial harmonic measures c·ω_h on centred balls: ball masses, the F_r
// functional, doubling ratios and degree classification.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hpm/poly.hpp"
#include "hpm/sphere.hpp"

namespace hpm {

/// c·ω_h for a harmonic h with h(0) = 0. Polynomials with a constant term are
/// rejected: ω_h is only tied to the origin's zero set when h(0) = 0.
class PolyMeasure {
 public:
  explicit PolyMeasure(Poly h, double scale = 1.0);

  const Poly& poly() const { return poly_; }
  double scale() const { return scale_; }
  const HomogDecomp& decomp() const { return decomp_; }
  int dim() const { return poly_.dim(); }
  int top_degree() const { return decomp_.top_degree; }
  int bottom_degree() const { return decomp_.bottom_degree; }
  bool homogeneous() const { return decomp_.top_degree == decomp_.bottom_degree; }

 private:
  Poly poly_;
  double scale_;
  HomogDecomp decomp_;
};

struct BallMeasure {
  double value = 0.0;       // plus-side integral
  double plus_side = 0.0;   // ∫_{∂B_r ∩ {h>0}} ∂_r h
  double minus_side = 0.0;  // −∫_{∂B_r ∩ {h<0}} ∂_r h
  double error = 0.0;
  bool converged = true;
};

/// c·ω_h(B_r) from the sphere integral of ∂_r h over {h > 0} ∩ ∂B_r.
/// Throws for r ≤ 0.
BallMeasure ball_measure_sides(const PolyMeasure& m, double r, const SphereRule& rule,
                               const SplitOptions& opt = {});
double ball_measure(const PolyMeasure& m, double r, const SphereRule& rule);

/// (k/2)·r^{n+k-2}·‖h‖_{L¹(S^{n-1})}·c for homogeneous h of degree k.
double homogeneous_ball_measure(const PolyMeasure& m, double r, double l1_norm);

/// F_r(c·ω_h) = ∫_0^r ω(B_s) ds by adaptive Simpson with absolute tolerance
/// rel_tol·r·ω(B_r).
double f_r(const PolyMeasure& m, double r, const SphereRule& rule, double rel_tol = 1e-9);
/// k‖h‖₁ r^{n+k-1} / (2(n+k-1))·c for homogeneous h.
double homogeneous_f_r(const PolyMeasure& m, double r, double l1_norm);

/// max_{1≤k≤d-1} ‖h_k‖_∞ / ‖h_d‖_∞ (0 when h is homogeneous).
double zeta(const PolyMeasure& m, const SphereRule& rule);
/// max_{j+1≤k≤d} ‖h_k‖_∞ / ‖h_j‖_∞ (0 when h is homogeneous).
double zeta_star(const PolyMeasure& m, const SphereRule& rule);
/// 1 + 12σ_{n-1}ζ / l_{n,d}
double r1(const PolyMeasure& m, const SphereRule& rule);
/// min(½, l_{n,j} / (72σ_{n-1}ζ_*))
double r2(const PolyMeasure& m, const SphereRule& rule);

struct BoundsCheck {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool holds = false;
};

/// (l_{n,d}/4)·d r^{n+d-2}‖h_d‖_∞ ≤ ω(B_r) ≤ (3σ_{n-1}/2)·d r^{n+d-2}‖h_d‖_∞,
/// each side times c. Requires r > r1.
BoundsCheck bounds_check_infinity(const PolyMeasure& m, double r, const SphereRule& rule);
/// Same with the lowest degree j. Requires r < r2.
BoundsCheck bounds_check_zero(const PolyMeasure& m, double r, const SphereRule& rule);

struct DoublingScan {
  int dim = 0;
  double tau = 2.0;
  std::uint64_t poly_hash = 0;
  std::vector<double> radii;
  std::vector<double> ratios;           // ω(B_{τr}) / ω(B_r)
  std::vector<double> local_exponents;  // log ratio / log τ
  double exponent_at_zero = 0.0;
  double exponent_at_infinity = 0.0;
  double residual_at_zero = 0.0;      // RMS deviation of local exponents in the window
  double residual_at_infinity = 0.0;
};

/// Ratios on a geometric grid of `steps` radii in [r_min, r_max]; the end
/// exponents are least-squares slopes of log ω(B_r) against log r over the
/// innermost and outermost quarter of the grid. Throws for tau ≤ 1, bad
/// ranges or steps < 4.
DoublingScan doubling_scan(const PolyMeasure& m, double tau, double r_min, double r_max,
                           int steps, const SphereRule& rule);

/// CSV with a comment header (tau, n, hash) and columns r,ratio,local_exponent.
void write_csv(std::ostream& os, const DoublingScan& scan);

enum class ClassifyStatus { ok, mismatch, inconclusive };
std::string to_string(ClassifyStatus s);

struct DegreeClass {
  int j = 0;
  int d = 0;
  ClassifyStatus status = ClassifyStatus::inconclusive;
  DoublingScan scan;
  std::string note;
};

struct ClassifyOptions {
  double tau = 2.0;
  int steps = 48;
  double rounding_threshold = 0.05;
  double margin = 1e3;  // scan [r2/margin, r1·margin]
};

/// Degrees (j, d) read off the doubling exponents at both ends of the scan,
/// cross-checked against the polynomial's own degrees.
DegreeClass degree_classify(const PolyMeasure& m, const SphereRule& rule,
                            const ClassifyOptions& opt = {});

}  // namespace hpm
