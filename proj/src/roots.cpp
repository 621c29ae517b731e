#include "hpm/roots.hpp"

#include <algorithm>
#include <cmath>

namespace hpm {

double horner(std::span<const double> coeffs, double t) {
  double v = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * t + *it;
  return v;
}

std::vector<double> derivative_coeffs(std::span<const double> coeffs) {
  std::vector<double> d;
  for (std::size_t i = 1; i < coeffs.size(); ++i) d.push_back(coeffs[i] * static_cast<double>(i));
  return d;
}

namespace {

std::vector<double> trimmed(std::span<const double> coeffs) {
  std::vector<double> c(coeffs.begin(), coeffs.end());
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  return c;
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

double refine(std::span<const double> c, std::span<const double> dc, double a, double b,
              int sign_a, double tol) {
  // Invariant: sign(p(a)) == sign_a, sign(p(b)) == -sign_a.
  double x = 0.5 * (a + b);
  for (int it = 0; it < 200 && (b - a) > tol; ++it) {
    double fx = horner(c, x);
    int sx = sign_of(fx);
    if (sx == 0) return x;
    if (sx == sign_a) {
      a = x;
    } else {
      b = x;
    }
    double dfx = horner(dc, x);
    double nx = (dfx != 0.0) ? x - fx / dfx : 0.5 * (a + b);
    // Fall back to bisection when Newton leaves the bracket or stalls.
    if (!(nx > a && nx < b)) nx = 0.5 * (a + b);
    x = nx;
  }
  return 0.5 * (a + b);
}

}  // namespace

std::vector<double> sign_change_roots(std::span<const double> coeffs, double lo, double hi,
                                      double tol) {
  std::vector<double> roots;
  if (!(hi > lo)) return roots;
  auto c = trimmed(coeffs);
  if (c.size() <= 1) return roots;
  if (c.size() == 2) {
    double t = -c[0] / c[1];
    if (t > lo && t < hi) roots.push_back(t);
    return roots;
  }
  auto dc = derivative_coeffs(c);

  std::vector<double> pts{lo};
  for (double t : sign_change_roots(dc, lo, hi, tol)) pts.push_back(t);
  pts.push_back(hi);

  // Values below the Horner rounding bound count as zero, so even-order
  // contacts at a critical point do not produce a spurious pair of roots.
  std::vector<double> vals(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double v = horner(c, pts[i]);
    double mag = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) mag = mag * std::abs(pts[i]) + std::abs(*it);
    double bound = 4.0 * static_cast<double>(c.size()) * 2.220446049250313e-16 * mag;
    vals[i] = (i == 0 || i + 1 == pts.size() || std::abs(v) > bound) ? v : 0.0;
  }

  // Walk the breakpoints; p is monotone between neighbours.
  std::size_t prev = pts.size();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    int s = sign_of(vals[i]);
    if (s == 0) continue;
    if (prev < pts.size()) {
      int sp = sign_of(vals[prev]);
      if (sp != s) {
        if (i == prev + 1) {
          roots.push_back(refine(c, dc, pts[prev], pts[i], sp, tol * std::max(1.0, std::abs(pts[i]))));
        } else {
          // A breakpoint sits exactly on the root.
          roots.push_back(pts[prev + 1]);
        }
      }
    }
    prev = i;
  }
  return roots;
}

}  // namespace hpm
