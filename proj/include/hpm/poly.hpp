#pragma once

// Sparse real polynomials on R^n with exact integer multi-indices.

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace hpm {

/// Exponent vector α of a monomial x^α.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> exps);
  MultiIndex(std::initializer_list<int> exps);

  int dim() const { return static_cast<int>(exps_.size()); }
  int degree() const;
  int operator[](int i) const { return exps_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& exps() const { return exps_; }

  /// α! = ∏ α_i!
  double factorial() const;

  auto operator<=>(const MultiIndex&) const = default;
  bool operator==(const MultiIndex&) const = default;

 private:
  std::vector<int> exps_;
};

/// All multi-indices of length n with |α| = k, in lexicographic order.
std::vector<MultiIndex> monomials_of_degree(int n, int k);

struct Term {
  MultiIndex alpha;
  double c = 0.0;
};

/// Immutable sparse polynomial. Terms are kept sorted by multi-index with no
/// stored zero coefficients; coefficients that cancel exactly are pruned.
class Poly {
 public:
  explicit Poly(int dim);
  Poly(int dim, std::vector<Term> terms);

  static Poly constant(int dim, double c);
  static Poly coordinate(int dim, int i);
  static Poly monomial(const MultiIndex& alpha, double c = 1.0);

  int dim() const { return dim_; }
  /// -1 for the zero polynomial.
  int degree() const { return degree_; }
  /// Smallest total degree among stored terms; -1 for the zero polynomial.
  int low_degree() const;
  bool is_zero() const { return terms_.empty(); }
  bool is_homogeneous() const;
  const std::vector<Term>& terms() const { return terms_; }
  double coeff(const MultiIndex& alpha) const;

  /// Σ c_α x^α. Throws std::invalid_argument on dimension mismatch.
  double operator()(std::span<const double> x) const;
  double evaluate(std::span<const double> x) const { return (*this)(x); }

  Poly partial(int i) const;
  Poly derivative(const MultiIndex& alpha) const;
  std::vector<double> gradient(std::span<const double> x) const;
  std::vector<Poly> gradient() const;

  /// q(x) = p(s·x)
  Poly rescaled(double s) const;

  /// Coefficients (ascending powers of t) of t ↦ p(origin + t·dir).
  std::vector<double> restrict_to_line(std::span<const double> origin,
                                       std::span<const double> dir) const;
  /// Fast path of restrict_to_line for dir = e_axis; origin[axis] is ignored.
  std::vector<double> restrict_to_axis(std::span<const double> origin,
                                       int axis) const;

  /// Order-independent FNV-1a digest of the coefficient table.
  std::uint64_t hash() const;
  std::string to_string() const;

  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a);
  friend Poly operator*(double s, const Poly& p);
  friend Poly operator*(const Poly& p, double s) { return s * p; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend bool operator==(const Poly& a, const Poly& b);

 private:
  void normalize();
  void rebuild_cache();

  int dim_;
  int degree_ = -1;
  std::vector<Term> terms_;
  // Flattened exponent table for fast evaluation: terms × dim.
  std::vector<int> flat_exps_;
  std::vector<double> flat_coeffs_;
};

Poly laplacian(const Poly& p);
bool is_harmonic(const Poly& p);
/// max |coefficient of Δp| / max |coefficient of p|; 0 for p = 0.
double harmonic_residual(const Poly& p);

/// h = h_d + ... + h_j grouped by total degree.
struct HomogDecomp {
  int dim = 0;
  std::map<int, Poly> parts;
  int top_degree = -1;
  int bottom_degree = -1;

  const Poly& part(int i) const;
  bool has_part(int i) const { return parts.contains(i); }
  Poly sum() const;
};

/// Throws std::invalid_argument for the zero polynomial.
HomogDecomp homogeneous_decompose(const Poly& p);

/// g(x) = c·r^{n-2}·p(r·x), whose harmonic measure is c·T_{0,r}[ω_p].
/// Requires c > 0 and r > 0.
Poly dilate_scale(const Poly& p, double c, double r);

/// Basis of the homogeneous degree-k harmonic polynomials in n variables,
/// computed as the null space of the Laplacian's coefficient matrix.
/// Dimension is C(n+k-1,k) - C(n+k-3,k-2).
std::vector<Poly> harmonic_basis(int n, int k);

/// x²(y−z) + y²(z−x) + z²(x−y) − xyz
Poly lewy_polynomial();

// Canonical JSON form: {"dim": n, "terms": [{"alpha": [...], "c": real}, ...]}
nlohmann::json to_json(const Poly& p);
Poly poly_from_json(const nlohmann::json& j);

/// Parses human-readable text such as "x0^2*x1 - 3*x2" or "x*y + x".
/// Variables are x0..x{n-1}, or x, y, z for the first three coordinates.
/// When dim < 0 the dimension is the largest variable index + 1 (at least 2).
Poly parse_poly(std::string_view text, int dim = -1);

}  // namespace hpm
