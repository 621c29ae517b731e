#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "hpm/measure.hpp"
#include "hpm/particle.hpp"
#include "hpm/weak_form.hpp"
#include "support.hpp"

using namespace hpm;
using std::numbers::pi;

namespace {

const SphereRule& rule() {
  static const SphereRule r = build_rule(3, 24, 7);
  return r;
}

// σ(cap of chordal radius ρ) on S² is πρ², so l_{3,k} = π/(4A²) with
// A = (2^{n+2}·n·k)^k·Σ_{m=1}^{k} n^m/m!.
double l3(int k) {
  double s = 0, term = 1;
  for (int m = 1; m <= k; ++m) {
    term *= 3.0 / m;
    s += term;
  }
  double A = std::pow(96.0 * k, k) * s;
  return pi / (4 * A * A);
}

}  // namespace

TEST_CASE("flat measure ball masses") {
  PolyMeasure flat(parse_poly("x", 3));
  for (double r : {0.5, 1.0, 2.0}) CHECK(ball_measure(flat, r, rule()) == doctest::Approx(pi * r * r).epsilon(1e-12));
  CHECK(ball_measure(flat, 2.0, rule()) == doctest::Approx(4 * pi).epsilon(1e-12));
  CHECK(f_r(flat, 1.0, rule()) == doctest::Approx(pi / 3).epsilon(1e-9));
  CHECK(homogeneous_f_r(flat, 1.0, l1_norm_sphere(flat.poly(), rule())) == doctest::Approx(pi / 3).epsilon(1e-12));
}

TEST_CASE("scaled measure") {
  PolyMeasure a(parse_poly("x*y", 3)), b(parse_poly("x*y", 3), 2.5);
  CHECK(ball_measure(b, 1.3, rule()) == doctest::Approx(2.5 * ball_measure(a, 1.3, rule())).epsilon(1e-12));
}

TEST_CASE("homogeneous closed form and both sides") {
  std::mt19937_64 rng(11);
  for (int k = 1; k <= 4; ++k) {
    for (int trial = 0; trial < 3; ++trial) {
      PolyMeasure m(testing::random_harmonic(3, k, rng));
      double l1 = l1_norm_sphere(m.poly(), rule());
      for (double r : {0.5, 1.0, 2.0}) {
        auto s = ball_measure_sides(m, r, rule());
        double closed = 0.5 * k * std::pow(r, 3 + k - 2) * l1;
        CHECK(s.value == doctest::Approx(closed).epsilon(1e-6));
        CHECK(s.plus_side == doctest::Approx(s.minus_side).epsilon(1e-8));
        CHECK(homogeneous_ball_measure(m, r, l1) == doctest::Approx(closed).epsilon(1e-14));
      }
      // exact doubling
      CHECK(ball_measure(m, 1.4, rule()) / ball_measure(m, 0.7, rule()) ==
            doctest::Approx(std::pow(2.0, 3 + k - 2)).epsilon(1e-8));
    }
  }
}

TEST_CASE("lewy sides agree") {
  PolyMeasure m(lewy_polynomial());
  auto s = ball_measure_sides(m, 1.0, rule());
  CHECK(s.plus_side == doctest::Approx(s.minus_side).epsilon(1e-8));
  CHECK(s.converged);
}

TEST_CASE("F_r sandwich, monotonicity and closed form") {
  PolyMeasure h(parse_poly("x*y + x", 3));
  double prev_w = 0, prev_f = 0;
  for (int i = 0; i < 20; ++i) {
    double r = 0.1 * std::pow(1.4, i);
    double w = ball_measure(h, r, rule());
    double f = f_r(h, r, rule());
    double half = ball_measure(h, r / 2, rule());
    CHECK(r / 2 * half <= f);
    CHECK(f <= r * w);
    CHECK(w >= prev_w);
    CHECK(f >= prev_f);
    prev_w = w;
    prev_f = f;
  }
  PolyMeasure lewy(lewy_polynomial());
  double l1 = l1_norm_sphere(lewy.poly(), rule());
  CHECK(f_r(lewy, 1.7, rule()) == doctest::Approx(homogeneous_f_r(lewy, 1.7, l1)).epsilon(1e-7));
}

TEST_CASE("dilation covariance and composition") {
  Poly p = parse_poly("x*y + x", 3);
  PolyMeasure m(p);
  const double c = 1.7, s = 2.3;
  PolyMeasure g(dilate_scale(p, c, s));
  for (double r : {0.3, 1.0, 2.0})
    CHECK(ball_measure(g, r, rule()) == doctest::Approx(c * ball_measure(m, s * r, rule())).epsilon(1e-8));
  PolyMeasure t(dilate_scale(p, 1.0, s));
  CHECK(f_r(m, 0.8 * s, rule()) == doctest::Approx(s * f_r(t, 0.8, rule())).epsilon(1e-8));
}

TEST_CASE("zeta and the critical radii") {
  SphereRule r = rule();
  PolyMeasure hom(lewy_polynomial());
  CHECK(zeta(hom, r) == 0.0);
  CHECK(r1(hom, r) == 1.0);

  PolyMeasure h(parse_poly("x*y + x", 3));
  CHECK(zeta(h, r) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(zeta_star(h, r) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r1(h, r) == doctest::Approx(1 + 12 * 4 * pi * 2 / l3(2)).epsilon(1e-9));
  CHECK(r2(h, r) == doctest::Approx(std::min(0.5, l3(1) / (72 * 4 * pi * 0.5))).epsilon(1e-9));

  // equal sup norms: ‖x‖ = ‖2xy‖ = 1
  PolyMeasure eq(parse_poly("2*x*y + x", 3));
  CHECK(zeta(eq, r) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r1(eq, r) == doctest::Approx(1 + 12 * 4 * pi / l3(2)).epsilon(1e-9));
}

TEST_CASE("two-sided bounds") {
  SphereRule r = rule();
  PolyMeasure h(parse_poly("x*y + x", 3));
  double R1 = r1(h, r), R2 = r2(h, r);
  CHECK(bounds_check_infinity(h, 2 * R1, r).holds);
  CHECK(bounds_check_zero(h, R2 / 2, r).holds);
  CHECK_THROWS_AS(bounds_check_infinity(h, R1 / 2, r), std::invalid_argument);
  CHECK_THROWS_AS(bounds_check_zero(h, 2 * R2, r), std::invalid_argument);

  PolyMeasure lewy(lewy_polynomial());
  for (double rad : {1.5, 10.0, 100.0}) {
    auto b = bounds_check_infinity(lewy, rad, r);
    CHECK(b.holds);
    CHECK(b.lower <= b.value);
    CHECK(b.value <= b.upper);
  }
}

TEST_CASE("doubling scan") {
  SphereRule r = rule();
  PolyMeasure lewy(lewy_polynomial());
  auto scan = doubling_scan(lewy, 2.0, 0.01, 100.0, 16, r);
  for (double e : scan.local_exponents) CHECK(e == doctest::Approx(4.0).epsilon(1e-6));

  PolyMeasure h(parse_poly("x*y + x", 3));
  auto s2 = doubling_scan(h, 2.0, r2(h, r) * 1e-3, r1(h, r) * 1e3, 48, r);
  CHECK(std::abs(s2.exponent_at_zero - 2.0) < 0.05);
  CHECK(std::abs(s2.exponent_at_infinity - 3.0) < 0.05);
  // doubling-ratio bound beyond r1
  double C = 6 * 4 * pi / l3(2);
  for (std::size_t i = 0; i < s2.radii.size(); ++i)
    if (s2.radii[i] > r1(h, r)) CHECK(s2.ratios[i] <= C * 8.0);

  std::ostringstream os;
  write_csv(os, scan);
  CHECK(os.str().rfind("# tau=2", 0) == 0);
  CHECK(os.str().find("r,ratio,local_exponent") != std::string::npos);

  CHECK_THROWS_AS(doubling_scan(lewy, 1.0, 0.1, 1.0, 8, r), std::invalid_argument);
  CHECK_THROWS_AS(doubling_scan(lewy, 2.0, 1.0, 0.1, 8, r), std::invalid_argument);
}

TEST_CASE("degree classification") {
  SphereRule r = rule();
  auto c = degree_classify(PolyMeasure(lewy_polynomial()), r);
  CHECK(c.status == ClassifyStatus::ok);
  CHECK(c.j == 3);
  CHECK(c.d == 3);
  auto m = degree_classify(PolyMeasure(parse_poly("x*y + x", 3)), r);
  CHECK(m.status == ClassifyStatus::ok);
  CHECK(m.j == 1);
  CHECK(m.d == 2);
  auto f = degree_classify(PolyMeasure(parse_poly("x", 3)), r);
  CHECK(f.j == 1);
  CHECK(f.d == 1);
  CHECK(to_string(ClassifyStatus::inconclusive) == "inconclusive");
}

TEST_CASE("polynomial measure rejects bad input") {
  CHECK_THROWS_AS(PolyMeasure(parse_poly("x^2", 3)), std::invalid_argument);
  CHECK_THROWS_AS(PolyMeasure(parse_poly("x + 1", 3)), std::invalid_argument);
  CHECK_THROWS_AS(PolyMeasure(Poly(3)), std::invalid_argument);
  CHECK_THROWS_AS(PolyMeasure(parse_poly("x", 3), 0.0), std::invalid_argument);
  PolyMeasure m(parse_poly("x", 3));
  CHECK_THROWS_AS(ball_measure(m, 0.0, rule()), std::invalid_argument);
}

TEST_CASE("weak form") {
  PolyMeasure flat(parse_poly("x", 3));
  auto mu = discretize(flat, 1.0, DiscretizeOptions{.grid = 48});
  Bump phi{{0, 0, 0}, 0.8, 4};
  auto w = weak_form_check(flat, phi, mu);
  // ∫_{disk} (1 − s²/ρ²)^4 = πρ²/5
  CHECK(w.plus_volume == doctest::Approx(pi * 0.64 / 5).epsilon(1e-4));
  CHECK(w.minus_volume == doctest::Approx(pi * 0.64 / 5).epsilon(1e-4));

  // bump inside {h > 0}: both sides vanish
  Bump inside{{0.6, 0, 0}, 0.3, 4};
  auto z = weak_form_check(flat, inside, mu);
  CHECK(std::abs(z.plus_volume) < 1e-10);
  CHECK(std::abs(z.particle) < 1e-12);

  PolyMeasure lewy(lewy_polynomial());
  auto ml = discretize(lewy, 1.0, DiscretizeOptions{.grid = 48});
  Bump off{{0.1, -0.2, 0.15}, 0.6, 4};
  auto wl = weak_form_check(lewy, off, ml);
  CHECK(wl.side_gap <= 1e-4 * std::abs(wl.plus_volume));
  CHECK(wl.residual <= 1e-2 * std::abs(wl.plus_volume));
}
