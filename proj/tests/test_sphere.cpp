#include "doctest.h"

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "hpm/quadrature.hpp"
#include "hpm/sphere.hpp"

using namespace hpm;
using std::numbers::pi;

TEST_CASE("sphere areas") {
  CHECK(sphere_area(2) == doctest::Approx(2 * pi));
  CHECK(sphere_area(3) == doctest::Approx(4 * pi));
  CHECK(sphere_area(4) == doctest::Approx(2 * pi * pi));
  CHECK(unit_ball_volume(3) == doctest::Approx(4 * pi / 3));
}

TEST_CASE("product rule integrates low moments exactly") {
  auto rule = build_rule(3, 8);
  CHECK(integrate(rule, [](std::span<const double>) { return 1.0; }) == doctest::Approx(4 * pi).epsilon(1e-14));
  CHECK(integrate(rule, [](std::span<const double> x) { return x[0] * x[0]; }) ==
        doctest::Approx(4 * pi / 3).epsilon(1e-13));
  // ∫ x⁴ = 4π/5
  CHECK(integrate(rule, [](std::span<const double> x) { return std::pow(x[0], 4); }) ==
        doctest::Approx(4 * pi / 5).epsilon(1e-13));
  CHECK(rule.exactness_degree == 15);
  CHECK(rule.covering_radius > 0);
  CHECK(rule.covering_radius < 0.5);
}

TEST_CASE("covering radius bound holds on random points") {
  auto rule = build_rule(3, 6);
  double worst = 0;
  for (int i = 0; i < 400; ++i) {
    double u = -1 + 2 * (i + 0.5) / 400.0;
    double ph = 2.39996323 * i;
    double s = std::sqrt(1 - u * u);
    double p[3] = {s * std::cos(ph), s * std::sin(ph), u};
    double best = 10;
    for (std::size_t j = 0; j < rule.size(); ++j) {
      auto q = rule.node(j);
      best = std::min(best, std::hypot(p[0] - q[0], p[1] - q[1], p[2] - q[2]));
    }
    worst = std::max(worst, best);
  }
  CHECK(worst <= rule.covering_radius);
}

TEST_CASE("circle rule") {
  auto rule = build_rule(2, 10);
  CHECK(integrate(rule, [](std::span<const double> x) { return x[0] * x[0]; }) == doctest::Approx(pi));
}

TEST_CASE("monte carlo rule is antipodal and reproducible") {
  auto a = build_rule(4, 30, 11);
  auto b = build_rule(4, 30, 11);
  CHECK(a.coords == b.coords);
  CHECK(a.monte_carlo);
  CHECK(integrate(a, [](std::span<const double>) { return 1.0; }) == doctest::Approx(2 * pi * pi));
  CHECK(std::abs(integrate(a, [](std::span<const double> x) { return x[0] * x[1] * x[2]; })) < 1e-12);
  CHECK(mc_standard_error(a, [](std::span<const double> x) { return x[0] * x[0]; }) > 0);
  CHECK(a.node(0)[0] == doctest::Approx(-a.node(1)[0]));
}

TEST_CASE("rule json round trip") {
  auto r = build_rule(3, 3);
  auto back = rule_from_json(to_json(r));
  CHECK(back.coords == r.coords);
  CHECK(back.weights == r.weights);
  CHECK(back.covering_radius == r.covering_radius);
}

TEST_CASE("L1 norms") {
  auto r3 = build_rule(3, 8);
  // ∫_{S²}|x| = 2π
  CHECK(l1_norm_sphere(Poly::coordinate(3, 0), r3) == doctest::Approx(2 * pi).epsilon(1e-11));
  auto r2 = build_rule(2, 8);
  CHECK(l1_norm_sphere(Poly::coordinate(2, 0), r2) == doctest::Approx(4.0).epsilon(1e-12));
  // ∫_{S²}|xy|: by symmetry 4·∫_{x,y>0} xy = 4·(1/2)∫ sin²θ sin2φ... = 4/3·... use independent 1-D oracle
  auto inner = adaptive_simpson([](double th) { return std::pow(std::sin(th), 3); }, 0, pi, 1e-14);
  double oracle = inner.value * 2.0;  // ∫_0^{2π}|cosφ sinφ| dφ = 2
  CHECK(l1_norm_sphere(parse_poly("x*y", 3), r3) == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("lewy L1 norm against brute-force grid") {
  Poly L = lewy_polynomial();
  auto r = build_rule(3, 8);
  double fast = l1_norm_sphere(L, r);
  // fine product rule on |L| converges slowly but steadily
  auto fine = build_rule(3, 600);
  double brute = integrate(fine, [&](std::span<const double> x) { return std::abs(L(x)); });
  CHECK(fast == doctest::Approx(brute).epsilon(1e-4));
}

TEST_CASE("sign split of x*y on the sphere") {
  auto r = build_rule(3, 4);
  auto s = integrate_by_sign(r, parse_poly("x*y", 3), [](std::span<const double>) { return 1.0; });
  CHECK(s.positive == doctest::Approx(2 * pi).epsilon(1e-11));
  CHECK(s.negative == doctest::Approx(2 * pi).epsilon(1e-11));
}

TEST_CASE("sup norm") {
  auto r = build_rule(3, 6);
  auto s = sup_norm_sphere(parse_poly("x^2 - y^2", 3), r);
  CHECK(s.lower == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(s.certified);
  auto fine = build_rule(3, 2000);
  auto sx = sup_norm_sphere(Poly::coordinate(3, 2), fine);
  CHECK(sx.lower == doctest::Approx(1.0));
  CHECK(sx.certified);
  CHECK(sx.upper >= 1.0);
  CHECK(sup_on_sphere_of_radius(Poly::coordinate(3, 0), 2.0, r) == doctest::Approx(2.0));
}

TEST_CASE("big piece") {
  auto r3 = build_rule(3, 6);
  // {|x| ≥ 1/2} on S² has area 2π
  CHECK(big_piece_measure(Poly::coordinate(3, 0), r3) == doctest::Approx(2 * pi).epsilon(1e-10));
  auto r2 = build_rule(2, 6);
  CHECK(big_piece_measure(Poly::coordinate(2, 0), r2) == doctest::Approx(4 * pi / 3).epsilon(1e-10));
}

TEST_CASE("explicit constants") {
  CHECK(inverse_factorial_sum(3, 1) == doctest::Approx(3.0));
  CHECK(inverse_factorial_sum(3, 2) == doctest::Approx(3.0 + 4.5));
  for (int n = 2; n <= 5; ++n) {
    for (int k = 1; k <= 6; ++k) {
      double brute = 0;
      for (int m = 1; m <= k; ++m)
        for (const auto& a : monomials_of_degree(n, m)) brute += 1.0 / a.factorial();
      CHECK(inverse_factorial_sum(n, k) == doctest::Approx(brute).epsilon(1e-13));
    }
  }
  auto c1 = sphere_constants(3, 1);
  CHECK(c1.A == doctest::Approx(288.0));
  CHECK(sphere_constants(3, 2).A == doctest::Approx(276480.0));
  CHECK(c1.l == doctest::Approx(pi / (4 * 288.0 * 288.0)).epsilon(1e-12));
  CHECK(c1.B == doctest::Approx(2 / c1.l));
  CHECK_THROWS_AS(sphere_constants(6, 60), std::overflow_error);
}

TEST_CASE("cap areas") {
  CHECK(chordal_cap_area(3, 1.0) == doctest::Approx(pi));
  CHECK(chordal_cap_area(3, 2.0) == doctest::Approx(4 * pi));
  double alpha = 2 * std::asin(0.3);
  CHECK(chordal_cap_area(2, 0.6) == doctest::Approx(2 * alpha));
  // S³: 4π(α/2 − sin 2α / 4)
  CHECK(chordal_cap_area(4, 0.6) == doctest::Approx(4 * pi * (alpha / 2 - std::sin(2 * alpha) / 4)).epsilon(1e-12));
}

TEST_CASE("derivative bound") {
  Poly L = lewy_polynomial();
  auto r = build_rule(3, 8);
  std::vector<double> th{0.6, 0.0, 0.8};
  CHECK(derivative_bound_check(L, MultiIndex{1, 0, 0}, th, r));
  CHECK(derivative_bound_check(L, MultiIndex{1, 1, 1}, th, r));
  CHECK(derivative_bound_factor(3, 1) == doctest::Approx(48.0));
}
