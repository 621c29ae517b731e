#include "hpm/metric.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace hpm {

namespace {

// Rule exact for products of two degree-k polynomials.
SphereRule gram_rule(int n, int k) { return build_rule(n, std::max(2 * k + 2, 8), 12345); }

struct OrthoBasis {
  std::vector<Poly> raw;
  std::vector<Poly> ortho;
  Eigen::MatrixXd T;  // ortho_i = Σ_j T(i,j) raw_j
};

OrthoBasis orthonormal_basis(int n, int k, const SphereRule& rule) {
  OrthoBasis b;
  b.raw = harmonic_basis(n, k);
  const auto D = static_cast<Eigen::Index>(b.raw.size());
  Eigen::MatrixXd G(D, D);
  for (Eigen::Index i = 0; i < D; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const Poly& p = b.raw[static_cast<std::size_t>(i)];
      const Poly& q = b.raw[static_cast<std::size_t>(j)];
      G(i, j) = G(j, i) = integrate(rule, [&](std::span<const double> x) { return p(x) * q(x); });
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) throw std::runtime_error("harmonic basis Gram matrix is not positive definite");
  // G = L Lᵀ, so the rows of L⁻¹ give an orthonormal family.
  Eigen::MatrixXd Linv = llt.matrixL().solve(Eigen::MatrixXd::Identity(D, D));
  b.T = Linv;
  for (Eigen::Index i = 0; i < D; ++i) {
    Poly acc(n);
    for (Eigen::Index j = 0; j <= i; ++j) acc = acc + b.T(i, j) * b.raw[static_cast<std::size_t>(j)];
    b.ortho.push_back(acc);
  }
  return b;
}

Poly combine(const std::vector<Poly>& basis, const std::vector<double>& v) {
  Poly acc(basis.front().dim());
  for (std::size_t i = 0; i < basis.size(); ++i) acc = acc + v[i] * basis[i];
  return acc;
}

ParticleMeasure normalized(const ParticleMeasure& mu, double r) {
  double f = f_r_of(mu, r);
  return f > 0.0 ? scaled(mu, 1.0 / f) : mu;
}

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  bool converged = false;
  int evaluations = 0;
};

template <class F>
NelderMeadResult nelder_mead(F&& f, std::vector<double> x0, double step, int max_iter, double tol) {
  const std::size_t D = x0.size();
  std::vector<std::vector<double>> pts(D + 1, x0);
  for (std::size_t i = 0; i < D; ++i) pts[i + 1][i] += step;
  std::vector<double> vals(D + 1);
  NelderMeadResult out;
  for (std::size_t i = 0; i <= D; ++i) {
    vals[i] = f(pts[i]);
    ++out.evaluations;
  }
  std::vector<std::size_t> order(D + 1);
  auto point_on_line = [&](const std::vector<double>& c, const std::vector<double>& w, double t) {
    std::vector<double> p(D);
    for (std::size_t q = 0; q < D; ++q) p[q] = c[q] + t * (w[q] - c[q]);
    return p;
  };
  for (int it = 0; it < max_iter; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[D - 1];
    if (vals[worst] - vals[best] <= tol) {
      out.converged = true;
      break;
    }
    std::vector<double> c(D, 0.0);
    for (std::size_t i = 0; i <= D; ++i) {
      if (i == worst) continue;
      for (std::size_t q = 0; q < D; ++q) c[q] += pts[i][q] / static_cast<double>(D);
    }
    auto xr = point_on_line(c, pts[worst], -1.0);
    double fr = f(xr);
    ++out.evaluations;
    if (fr < vals[best]) {
      auto xe = point_on_line(c, pts[worst], -2.0);
      double fe = f(xe);
      ++out.evaluations;
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    bool outside = fr < vals[worst];
    auto xc = point_on_line(c, pts[worst], outside ? -0.5 : 0.5);
    double fc = f(xc);
    ++out.evaluations;
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = xc;
      vals[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= D; ++i) {
      if (i == best) continue;
      pts[i] = point_on_line(pts[best], pts[i], 0.5);
      vals[i] = f(pts[i]);
      ++out.evaluations;
    }
  }
  std::size_t b = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  out.x = pts[b];
  out.value = vals[b];
  return out;
}

std::vector<double> unit(std::vector<double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  s = std::sqrt(s);
  for (auto& x : v) x /= s;
  return v;
}

}  // namespace

ParticleMeasure cone_cloud(const PolyMeasure& m, double r, int grid, double cell) {
  auto mu = discretize(m, r, DiscretizeOptions{.grid = grid});
  return cell > 0.0 ? coarsen(mu, cell * r) : mu;
}

ConeDistResult cone_distance(const ParticleMeasure& sigma, int k, double r, const ConeOptions& opt,
                             const std::vector<Poly>& starts) {
  if (k < 1) throw std::invalid_argument("cone degree must be >= 1");
  if (!(r > 0.0)) throw std::invalid_argument("cone distance needs r > 0");
  ConeDistResult res;
  const double fs = f_r_of(sigma, r);
  if (!(fs > 0.0)) {
    res.value = 1.0;
    res.converged = true;
    return res;
  }
  const int n = sigma.dim;
  const ParticleMeasure target = scaled(sigma, 1.0 / fs);
  const SphereRule rule = gram_rule(n, k);
  const OrthoBasis basis = orthonormal_basis(n, k, rule);
  const std::size_t D = basis.ortho.size();

  auto objective = [&](const std::vector<double>& v) {
    double nrm = 0.0;
    for (double x : v) nrm += x * x;
    if (nrm < 1e-24) return 2.0;
    Poly p = combine(basis.ortho, unit(v));
    if (p.is_zero()) return 2.0;
    ParticleMeasure psi = normalized(cone_cloud(PolyMeasure(p), r, opt.grid, opt.cell), r);
    return f_r_distance(target, psi, r, opt.fr);
  };

  std::vector<std::vector<double>> initial;
  for (const auto& s : starts) {
    if (s.dim() != n) throw std::invalid_argument("start polynomial has wrong dimension");
    std::vector<double> v(D);
    for (std::size_t i = 0; i < D; ++i) {
      const Poly& b = basis.ortho[i];
      v[i] = integrate(rule, [&](std::span<const double> x) { return s(x) * b(x); });
    }
    double nrm = 0.0;
    for (double x : v) nrm += x * x;
    if (nrm > 0.0) initial.push_back(unit(v));
  }
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  while (static_cast<int>(initial.size()) < opt.restarts) {
    std::vector<double> v(D);
    for (auto& x : v) x = gauss(rng);
    initial.push_back(unit(v));
  }
  initial.resize(static_cast<std::size_t>(std::max(opt.restarts, 1)));

  std::vector<double> best_v;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& v0 : initial) {
    auto nm = nelder_mead(objective, v0, 0.3, opt.max_iterations, opt.simplex_tol);
    res.evaluations += nm.evaluations;
    res.restart_values.push_back(nm.value);
    ++res.restarts;
    if (nm.value < best) {
      best = nm.value;
      best_v = nm.x;
      res.converged = nm.converged;
    }
  }
  res.value = best;

  // Report ψ over the raw basis, scaled so that its closed-form F_r is 1.
  auto u = unit(best_v);
  Eigen::VectorXd ev = Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(D));
  Eigen::VectorXd raw = basis.T.transpose() * ev;
  std::vector<double> coeffs(raw.data(), raw.data() + raw.size());
  Poly p = combine(basis.raw, coeffs);
  const SphereRule l1_rule = build_rule(n, 24, opt.seed);
  double fr_unit = homogeneous_f_r(PolyMeasure(p), r, l1_norm_sphere(p, l1_rule));
  for (auto& c : coeffs) c /= fr_unit;
  res.best_coeffs = coeffs;
  Poly ps = combine(basis.raw, coeffs);
  res.best_f_r = homogeneous_f_r(PolyMeasure(ps), r, l1_norm_sphere(ps, l1_rule));
  return res;
}

ConeDistResult cone_distance(const PolyMeasure& sigma, int k, double r, const ConeOptions& opt) {
  auto cloud = cone_cloud(sigma, r, opt.grid, opt.cell);
  std::vector<Poly> starts;
  if (sigma.decomp().has_part(k)) starts.push_back(sigma.decomp().part(k));
  return cone_distance(cloud, k, r, opt, starts);
}

double discretization_floor(const PolyMeasure& sigma, double r, const ConeOptions& opt) {
  auto a = normalized(cone_cloud(sigma, r, opt.grid, opt.cell), r);
  auto b = normalized(cone_cloud(sigma, r, opt.grid + 1, opt.cell), r);
  return f_r_distance(a, b, r, opt.fr);
}

double epsilon0(int n, int d, int k) {
  auto c = sphere_constants(n, d);
  double C = 6.0 * sphere_area(n) / c.l;
  double Ct = C * std::ldexp(1.0, n + d - 1);
  return 0.5 * std::exp(-(n + k - 1) * std::log(2.0 * Ct));
}

EpsilonTable epsilon_table(int n, int d) {
  if (d < 1) throw std::invalid_argument("epsilon table needs d >= 1");
  EpsilonTable t;
  t.n = n;
  t.d = d;
  auto c = sphere_constants(n, d);
  t.C = 6.0 * sphere_area(n) / c.l;
  t.C_tilde = t.C * std::ldexp(1.0, n + d - 1);
  const double log2ct = std::log10(2.0 * t.C_tilde);
  for (int k = 1; k <= d; ++k) {
    t.log10_eps0.push_back(std::log10(0.5) - (n + k - 1) * log2ct);
    t.eps0.push_back(std::pow(10.0, t.log10_eps0.back()));
  }
  t.eps1 = *std::min_element(t.eps0.begin(), t.eps0.end());
  t.eps2 = t.eps0.front();
  return t;
}

SeparationReport separation_experiment(const Poly& h, int k, const std::vector<double>& radii,
                                       const ConeOptions& opt) {
  PolyMeasure m(h);
  SeparationReport rep;
  rep.k = k;
  rep.degree = m.top_degree();
  rep.eps0 = epsilon0(h.dim(), rep.degree, k);
  rep.seed = opt.seed;
  for (double r : radii) {
    auto res = cone_distance(m, k, r, opt);
    double floor = discretization_floor(m, r, opt);
    rep.radii.push_back(r);
    rep.values.push_back(res.value);
    rep.floors.push_back(floor);
    rep.converged.push_back(res.converged ? 1 : 0);
    rep.best_f_r.push_back(res.best_f_r);
    if (!rep.witness_radius && res.value >= std::max(rep.eps0, floor)) rep.witness_radius = r;
  }
  return rep;
}

nlohmann::json to_json(const SeparationReport& rep) {
  nlohmann::json conv = nlohmann::json::array();
  for (char c : rep.converged) conv.push_back(c != 0);
  return {{"k", rep.k},
          {"degree", rep.degree},
          {"eps0", rep.eps0},
          {"radii", rep.radii},
          {"values", rep.values},
          {"floors", rep.floors},
          {"converged", conv},
          {"best_f_r", rep.best_f_r},
          {"witness_radius", rep.witness_radius ? nlohmann::json(*rep.witness_radius) : nlohmann::json(nullptr)},
          {"seeds", {rep.seed}}};
}

nlohmann::json to_json(const ConeDistResult& res) {
  return {{"value", res.value},
          {"best_coeffs", res.best_coeffs},
          {"restarts", res.restarts},
          {"converged", res.converged},
          {"evaluations", res.evaluations},
          {"restart_values", res.restart_values},
          {"best_f_r", res.best_f_r}};
}

nlohmann::json to_json(const EpsilonTable& t) {
  return {{"n", t.n},       {"d", t.d},       {"C", t.C},       {"C_tilde", t.C_tilde},
          {"eps0", t.eps0}, {"log10_eps0", t.log10_eps0},     {"eps1", t.eps1},
          {"eps2", t.eps2}};
}

}  // namespace hpm
