#include "hpm/blowup.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "hpm/roots.hpp"

namespace hpm {

std::vector<ParticleMeasure> blowup_sequence(const PolyMeasure& m, const std::vector<double>& radii,
                                             const SphereRule& rule, const DiscretizeOptions& opt) {
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw std::invalid_argument("blow-up radii must be positive");
    if (i > 0 && !(radii[i] < radii[i - 1])) throw std::invalid_argument("blow-up radii must decrease");
  }
  std::vector<double> origin(static_cast<std::size_t>(m.dim()), 0.0);
  std::vector<ParticleMeasure> out;
  for (double r : radii) {
    auto nu = pushforward(discretize(m, r, opt), origin, r);
    out.push_back(scaled(nu, 1.0 / ball_measure(m, r, rule)));
  }
  return out;
}

ZeroSetSample zero_set_blowup(const Poly& h, double r, double R, int grid) {
  if (!(r > 0.0) || !(R > 0.0)) throw std::invalid_argument("zero-set blow-up needs r > 0 and R > 0");
  if (grid < 1) throw std::invalid_argument("grid must be >= 1");
  if (h.is_zero()) throw std::invalid_argument("zero polynomial has no zero set to sample");
  const int n = h.dim();
  // y ↦ h(rR·y) on the unit ball, coefficients brought to unit size.
  Poly g = h.rescaled(r * R);
  double c = 0.0;
  for (const auto& t : g.terms()) c = std::max(c, std::abs(t.c));
  g = (1.0 / c) * g;

  ZeroSetSample out;
  out.dim = n;
  out.generation = grid;
  out.window = R;
  out.scale = r;
  const double delta = 1.0 / grid;
  const int per_side = 2 * grid;
  std::vector<double> origin(static_cast<std::size_t>(n));
  std::vector<int> idx(static_cast<std::size_t>(n - 1));
  for (int axis = 0; axis < n; ++axis) {
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      double r2 = 0.0;
      for (int q = 0, o = 0; q < n; ++q) {
        if (q == axis) {
          origin[static_cast<std::size_t>(q)] = 0.0;
          continue;
        }
        double u = -1.0 + (idx[static_cast<std::size_t>(o++)] + 0.5) * delta;
        origin[static_cast<std::size_t>(q)] = u;
        r2 += u * u;
      }
      if (r2 < 1.0) {
        double s = std::sqrt(1.0 - r2);
        auto coeffs = g.restrict_to_axis(origin, axis);
        for (double t : sign_change_roots(coeffs, -s, s)) {
          for (int q = 0; q < n; ++q)
            out.points.push_back(R * (q == axis ? t : origin[static_cast<std::size_t>(q)]));
        }
      }
      int o = 0;
      while (o < n - 1 && ++idx[static_cast<std::size_t>(o)] == per_side) idx[static_cast<std::size_t>(o++)] = 0;
      if (o == n - 1) break;
    }
  }
  return out;
}

namespace {

// sup over a of the distance to b. The inner scan stops as soon as a point of
// b is closer than the running sup, since that a cannot raise it.
double directed(const ZeroSetSample& a, const ZeroSetSample& b) {
  const auto n = static_cast<std::size_t>(a.dim);
  double worst2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double* p = &a.points[i * n];
    double best2 = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size() && best2 > worst2; ++j) {
      const double* q = &b.points[j * n];
      double d2 = 0.0;
      for (std::size_t c = 0; c < n; ++c) d2 += (p[c] - q[c]) * (p[c] - q[c]);
      best2 = std::min(best2, d2);
    }
    worst2 = std::max(worst2, best2);
  }
  return std::sqrt(worst2);
}

}  // namespace

double hausdorff_distance(const ZeroSetSample& a, const ZeroSetSample& b) {
  if (a.dim != b.dim) throw std::invalid_argument("zero-set samples differ in dimension");
  if (a.size() == 0 || b.size() == 0) throw std::invalid_argument("Hausdorff distance of an empty sample");
  return std::max(directed(a, b), directed(b, a));
}

std::vector<BlowupRow> blowup_report(const PolyMeasure& m, const Poly& limit, const std::vector<double>& radii,
                                     const SphereRule& rule, const BlowupOptions& opt) {
  PolyMeasure lim(limit);
  auto target = blowup_sequence(lim, {1.0}, rule, DiscretizeOptions{.grid = opt.grid}).front();
  auto seq = blowup_sequence(m, radii, rule, DiscretizeOptions{.grid = opt.grid});
  auto lim_zero = zero_set_blowup(limit, 1.0, 1.0, opt.zero_grid);
  std::vector<BlowupRow> rows;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    BlowupRow row;
    row.r = radii[i];
    row.f1_distance = f_r_distance(seq[i], target, 1.0, opt.fr);
    auto z = zero_set_blowup(m.poly(), radii[i], 1.0, opt.zero_grid);
    row.hausdorff = z.size() > 0 ? hausdorff_distance(z, lim_zero) : std::numeric_limits<double>::infinity();
    row.resolution = lim_zero.resolution();
    rows.push_back(row);
  }
  return rows;
}

void write_csv(std::ostream& os, const std::vector<BlowupRow>& rows) {
  os << "r,f1_distance,hausdorff,resolution\n";
  os.precision(17);
  for (const auto& row : rows) os << row.r << ',' << row.f1_distance << ',' << row.hausdorff << ',' << row.resolution << '\n';
}

namespace {

struct Mesh {
  std::vector<std::array<double, 3>> vertices;
  std::vector<std::array<int, 2>> edges;
};

Mesh icosphere(int level) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  Mesh m;
  m.vertices = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  std::vector<std::array<int, 3>> faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                           {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                           {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                           {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  auto project = [](std::array<double, 3> v) {
    double s = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    return std::array<double, 3>{v[0] / s, v[1] / s, v[2] / s};
  };
  for (auto& v : m.vertices) v = project(v);
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      const auto& p = m.vertices[static_cast<std::size_t>(a)];
      const auto& q = m.vertices[static_cast<std::size_t>(b)];
      m.vertices.push_back(project({p[0] + q[0], p[1] + q[1], p[2] + q[2]}));
      int id = static_cast<int>(m.vertices.size()) - 1;
      mid.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      int a = midpoint(f[0], f[1]);
      int b = midpoint(f[1], f[2]);
      int c = midpoint(f[2], f[0]);
      next.push_back({f[0], a, c});
      next.push_back({f[1], b, a});
      next.push_back({f[2], c, b});
      next.push_back({a, b, c});
    }
    faces.swap(next);
  }
  std::map<std::pair<int, int>, bool> seen;
  for (const auto& f : faces) {
    for (int e = 0; e < 3; ++e) {
      auto key = std::minmax(f[static_cast<std::size_t>(e)], f[static_cast<std::size_t>((e + 1) % 3)]);
      if (seen.emplace(key, true).second) m.edges.push_back({key.first, key.second});
    }
  }
  return m;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

struct Labeling {
  std::vector<int> sign;       // -1, 0 (boundary), +1
  std::vector<int> component;  // -1 for boundary vertices
  int count = 0;
};

Labeling label(const Poly& h, const Mesh& mesh) {
  Labeling lab;
  std::vector<double> vals;
  double vmax = 0.0;
  for (const auto& v : mesh.vertices) {
    vals.push_back(h(v));
    vmax = std::max(vmax, std::abs(vals.back()));
  }
  for (double v : vals) lab.sign.push_back(std::abs(v) < 1e-9 * vmax ? 0 : (v > 0 ? 1 : -1));
  UnionFind uf(vals.size());
  for (const auto& e : mesh.edges) {
    auto a = static_cast<std::size_t>(e[0]);
    auto b = static_cast<std::size_t>(e[1]);
    if (lab.sign[a] == 0 || lab.sign[a] != lab.sign[b]) continue;
    // Equal end signs can still hide two crossings, e.g. next to a point where
    // several nodal lines meet; h is homogeneous, so the chord decides.
    const auto& p = mesh.vertices[a];
    const auto& q = mesh.vertices[b];
    std::array<double, 3> dir{q[0] - p[0], q[1] - p[1], q[2] - p[2]};
    if (sign_change_roots(h.restrict_to_line(p, dir), 0.0, 1.0).empty()) uf.unite(a, b);
  }
  std::map<std::size_t, int> ids;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (lab.sign[i] == 0) {
      lab.component.push_back(-1);
      continue;
    }
    auto root = uf.find(i);
    auto it = ids.emplace(root, static_cast<int>(ids.size())).first;
    lab.component.push_back(it->second);
  }
  lab.count = static_cast<int>(ids.size());
  return lab;
}

void check_nodal_input(const Poly& h) {
  if (h.dim() != 3) throw std::invalid_argument("nodal components are counted on S² only (n = 3)");
  if (h.is_zero() || !h.is_homogeneous()) throw std::invalid_argument("nodal count needs a nonzero homogeneous polynomial");
}

}  // namespace

NodalCount nodal_components_s2(const Poly& h, int grid_level, int max_level) {
  check_nodal_input(h);
  if (grid_level < 0 || max_level < grid_level) throw std::invalid_argument("bad refinement levels");
  NodalCount out;
  for (int level = grid_level; level <= max_level; ++level) {
    out.counts.push_back(label(h, icosphere(level)).count);
    std::size_t s = out.counts.size();
    if (s >= 3 && out.counts[s - 1] == out.counts[s - 2] && out.counts[s - 2] == out.counts[s - 3]) {
      out.count = out.counts.back();
      out.level = level - 2;
      return out;
    }
  }
  out.level = max_level;
  return out;
}

void write_nodal_csv(std::ostream& os, const Poly& h, int level) {
  check_nodal_input(h);
  Mesh mesh = icosphere(level);
  Labeling lab = label(h, mesh);
  os << "x,y,z,sign,component\n";
  os.precision(17);
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const auto& v = mesh.vertices[i];
    os << v[0] << ',' << v[1] << ',' << v[2] << ',' << lab.sign[i] << ',' << lab.component[i] << '\n';
  }
}

}  // namespace hpm
