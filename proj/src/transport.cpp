#include "hpm/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace hpm {

namespace {


// Primal network simplex for uncapacitated transshipment. Node `root` (the
// ground) anchors the spanning tree; the initial tree is the star of arcs
// between every node and the root, which is feasible because every node has an
// arc to and from the root. The tree is kept strongly feasible (zero-flow tree
// arcs point away from the root), which rules out cycling on degenerate pivots.
// New arcs may be added between solves; the previous basis stays feasible.
class NetworkSimplex {
 public:
  NetworkSimplex(int nodes, int root)
      : root_(root),
        parent_(static_cast<std::size_t>(nodes), -1),
        pred_(static_cast<std::size_t>(nodes), -1),
        depth_(static_cast<std::size_t>(nodes), 0),
        y_(static_cast<std::size_t>(nodes), 0.0),
        first_child_(static_cast<std::size_t>(nodes), -1),
        next_sib_(static_cast<std::size_t>(nodes), -1),
        prev_sib_(static_cast<std::size_t>(nodes), -1) {}

  int add_arc(int from, int to, double cost) {
    from_.push_back(from);
    to_.push_back(to);
    cost_.push_back(cost);
    flow_.push_back(0.0);
    in_tree_.push_back(0);
    return static_cast<int>(from_.size()) - 1;
  }

  std::size_t arc_count() const { return from_.size(); }

  // `to_root[v]` and `from_root[v]` are the arcs v→root and root→v.
  void init_tree(const std::vector<double>& supply, const std::vector<int>& to_root,
                 const std::vector<int>& from_root) {
    const std::size_t V = parent_.size();
    for (std::size_t v = 0; v < V; ++v) {
      if (static_cast<int>(v) == root_) continue;
      int e = supply[v] > 0.0 ? to_root[v] : from_root[v];
      flow_[static_cast<std::size_t>(e)] = std::abs(supply[v]);
      in_tree_[static_cast<std::size_t>(e)] = 1;
      parent_[v] = root_;
      pred_[v] = e;
      depth_[v] = 1;
      y_[v] = from_[static_cast<std::size_t>(e)] == static_cast<int>(v) ? cost_[static_cast<std::size_t>(e)] : 0.0;
      add_child(root_, static_cast<int>(v));
    }
  }

  void solve(double tol) {
    const std::size_t E = from_.size();
    const std::size_t block = std::max<std::size_t>(64, static_cast<std::size_t>(std::sqrt(static_cast<double>(E))));
    std::size_t cursor = 0;
    while (true) {
      // Block pricing: best candidate within the first block that has one.
      int entering = -1;
      double best = -tol;
      std::size_t scanned = 0;
      std::size_t in_block = 0;
      while (scanned < E) {
        std::size_t e = cursor;
        cursor = cursor + 1 == E ? 0 : cursor + 1;
        ++scanned;
        ++in_block;
        if (!in_tree_[e]) {
          double rc = cost_[e] - y_[static_cast<std::size_t>(from_[e])] + y_[static_cast<std::size_t>(to_[e])];
          if (rc < best) {
            best = rc;
            entering = static_cast<int>(e);
          }
        }
        if (in_block >= block) {
          if (entering >= 0) break;
          in_block = 0;
        }
      }
      if (entering < 0) return;
      pivot(entering, best);
    }
  }

  double cost() const {
    double c = 0.0;
    for (std::size_t e = 0; e < from_.size(); ++e) c += flow_[e] * cost_[e];
    return c;
  }
  double potential(int v) const { return y_[static_cast<std::size_t>(v)] - y_[static_cast<std::size_t>(root_)]; }

 private:
  void add_child(int p, int c) {
    auto& fc = first_child_[static_cast<std::size_t>(p)];
    next_sib_[static_cast<std::size_t>(c)] = fc;
    prev_sib_[static_cast<std::size_t>(c)] = -1;
    if (fc >= 0) prev_sib_[static_cast<std::size_t>(fc)] = c;
    fc = c;
  }
  void remove_child(int p, int c) {
    int pr = prev_sib_[static_cast<std::size_t>(c)];
    int nx = next_sib_[static_cast<std::size_t>(c)];
    if (pr >= 0) {
      next_sib_[static_cast<std::size_t>(pr)] = nx;
    } else {
      first_child_[static_cast<std::size_t>(p)] = nx;
    }
    if (nx >= 0) prev_sib_[static_cast<std::size_t>(nx)] = pr;
    next_sib_[static_cast<std::size_t>(c)] = prev_sib_[static_cast<std::size_t>(c)] = -1;
  }

  void pivot(int e_in, double rc) {
    const int i = from_[static_cast<std::size_t>(e_in)];
    const int j = to_[static_cast<std::size_t>(e_in)];
    // Find the apex of the cycle closed by i→j.
    int a = i, b = j;
    while (a != b) {
      if (depth_[static_cast<std::size_t>(a)] >= depth_[static_cast<std::size_t>(b)]) {
        a = parent_[static_cast<std::size_t>(a)];
      } else {
        b = parent_[static_cast<std::size_t>(b)];
      }
    }
    const int apex = a;
    // Flow circulates apex ⇝ i → j ⇝ apex. On the i side the cycle runs down the
    // tree, so an arc v→parent(v) is traversed backwards; on the j side it runs
    // up, so an arc parent(v)→v is traversed backwards. Ties go to the arc met
    // last from the apex.
    double theta = std::numeric_limits<double>::infinity();
    int leave_node = -1;
    bool leave_on_i_side = false;
    for (int v = i; v != apex; v = parent_[static_cast<std::size_t>(v)]) {
      int e = pred_[static_cast<std::size_t>(v)];
      if (from_[static_cast<std::size_t>(e)] == v && flow_[static_cast<std::size_t>(e)] < theta) {
        theta = flow_[static_cast<std::size_t>(e)];
        leave_node = v;
        leave_on_i_side = true;
      }
    }
    for (int v = j; v != apex; v = parent_[static_cast<std::size_t>(v)]) {
      int e = pred_[static_cast<std::size_t>(v)];
      if (to_[static_cast<std::size_t>(e)] == v && flow_[static_cast<std::size_t>(e)] <= theta) {
        theta = flow_[static_cast<std::size_t>(e)];
        leave_node = v;
        leave_on_i_side = false;
      }
    }
    if (leave_node < 0) throw std::logic_error("network simplex: unbounded cycle");
    // Push theta around the cycle.
    if (theta > 0.0) {
      flow_[static_cast<std::size_t>(e_in)] += theta;
      for (int v = i; v != apex; v = parent_[static_cast<std::size_t>(v)]) {
        int e = pred_[static_cast<std::size_t>(v)];
        flow_[static_cast<std::size_t>(e)] += from_[static_cast<std::size_t>(e)] == v ? -theta : theta;
      }
      for (int v = j; v != apex; v = parent_[static_cast<std::size_t>(v)]) {
        int e = pred_[static_cast<std::size_t>(v)];
        flow_[static_cast<std::size_t>(e)] += to_[static_cast<std::size_t>(e)] == v ? -theta : theta;
      }
    }
    const int e_out = pred_[static_cast<std::size_t>(leave_node)];
    flow_[static_cast<std::size_t>(e_out)] = 0.0;
    in_tree_[static_cast<std::size_t>(e_out)] = 0;
    in_tree_[static_cast<std::size_t>(e_in)] = 1;

    // The subtree under leave_node is re-hung from the entering arc.
    const int q = leave_on_i_side ? i : j;      // entering endpoint inside the subtree
    const int p_out = leave_on_i_side ? j : i;  // its new parent
    const double shift = leave_on_i_side ? rc : -rc;

    remove_child(parent_[static_cast<std::size_t>(leave_node)], leave_node);
    int prev_node = p_out;
    int prev_arc = e_in;
    int v = q;
    while (true) {
      int old_parent = parent_[static_cast<std::size_t>(v)];
      int old_pred = pred_[static_cast<std::size_t>(v)];
      if (v != leave_node) remove_child(old_parent, v);
      parent_[static_cast<std::size_t>(v)] = prev_node;
      pred_[static_cast<std::size_t>(v)] = prev_arc;
      add_child(prev_node, v);
      if (v == leave_node) break;
      prev_node = v;
      prev_arc = old_pred;
      v = old_parent;
    }
    // Depths and potentials of the moved subtree.
    stack_.clear();
    stack_.push_back(q);
    while (!stack_.empty()) {
      int u = stack_.back();
      stack_.pop_back();
      depth_[static_cast<std::size_t>(u)] = depth_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(u)])] + 1;
      y_[static_cast<std::size_t>(u)] += shift;
      for (int c = first_child_[static_cast<std::size_t>(u)]; c >= 0; c = next_sib_[static_cast<std::size_t>(c)]) {
        stack_.push_back(c);
      }
    }
  }

  int root_;
  std::vector<int> from_, to_;
  std::vector<double> cost_, flow_;
  std::vector<char> in_tree_;
  std::vector<int> parent_, pred_, depth_;
  std::vector<double> y_;
  std::vector<int> first_child_, next_sib_, prev_sib_;
  std::vector<int> stack_;
};

struct Support {
  int dim = 0;
  std::vector<double> coords;
  std::vector<double> weight;
  std::vector<double> cap;  // (r − |p|)^+

  std::size_t size() const { return weight.size(); }
  double dist2(std::size_t i, std::size_t j) const {
    if (dim == 3) {
      const double* a = coords.data() + 3 * i;
      const double* b = coords.data() + 3 * j;
      const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
      return dx * dx + dy * dy + dz * dz;
    }
    double s = 0.0;
    for (int q = 0; q < dim; ++q) {
      double d = coords[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(q)] -
                 coords[j * static_cast<std::size_t>(dim) + static_cast<std::size_t>(q)];
      s += d * d;
    }
    return s;
  }
  double dist(std::size_t i, std::size_t j) const { return std::sqrt(dist2(i, j)); }
};

void check_valid(const ParticleMeasure& mu, double r) {
  if (mu.size() == 0) return;
  if (mu.truncation_radius < r * (1.0 - 1e-12)) {
    throw std::invalid_argument("particle cloud is not valid on B_r");
  }
}

Support merge_support(const ParticleMeasure& mu, const ParticleMeasure& nu, double r) {
  std::map<std::vector<double>, double> acc;
  auto take = [&](const ParticleMeasure& m, double sign) {
    for (std::size_t i = 0; i < m.size(); ++i) {
      auto p = m.point(i);
      double nrm = 0.0;
      for (double v : p) nrm += v * v;
      if (std::sqrt(nrm) >= r) continue;  // f vanishes there and the constraint is redundant
      acc[std::vector<double>(p.begin(), p.end())] += sign * m.masses[i];
    }
  };
  take(mu, 1.0);
  take(nu, -1.0);
  Support s;
  s.dim = mu.size() > 0 ? mu.dim : nu.dim;
  for (const auto& [p, w] : acc) {
    if (w == 0.0) continue;
    double nrm = 0.0;
    for (double v : p) nrm += v * v;
    s.coords.insert(s.coords.end(), p.begin(), p.end());
    s.weight.push_back(w);
    s.cap.push_back(r - std::sqrt(nrm));
  }
  return s;
}

struct SignedSolve {
  double value = 0.0;
  double cost = 0.0;
  std::vector<double> f;
  int rounds = 0;
  std::size_t arcs = 0;
  bool converged = false;
};

SignedSolve solve_signed(const Support& s, double sign, const std::vector<std::pair<int, int>>& seed_arcs,
                         std::vector<std::pair<int, int>>& extra, const FrOptions& opt) {
  const int N = static_cast<int>(s.size());
  const int ground = N;
  SignedSolve out;
  std::vector<double> supply(static_cast<std::size_t>(N + 1));
  double total = 0.0;
  for (int i = 0; i < N; ++i) {
    supply[static_cast<std::size_t>(i)] = sign * s.weight[static_cast<std::size_t>(i)];
    total += supply[static_cast<std::size_t>(i)];
  }
  supply[static_cast<std::size_t>(ground)] = -total;
  double scale = 0.0;
  for (double c : s.cap) scale = std::max(scale, c);
  std::set<std::pair<int, int>> present(seed_arcs.begin(), seed_arcs.end());
  present.insert(extra.begin(), extra.end());

  NetworkSimplex net(N + 1, ground);
  std::vector<int> to_root(static_cast<std::size_t>(N + 1)), from_root(static_cast<std::size_t>(N + 1));
  for (int i = 0; i < N; ++i) {
    to_root[static_cast<std::size_t>(i)] = net.add_arc(i, ground, s.cap[static_cast<std::size_t>(i)]);
    from_root[static_cast<std::size_t>(i)] = net.add_arc(ground, i, 0.0);
  }
  for (auto [i, j] : present) net.add_arc(i, j, s.dist(static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
  net.init_tree(supply, to_root, from_root);

  for (int round = 0; round < opt.max_rounds; ++round) {
    net.solve(1e-13 * std::max(scale, 1e-300));
    out.cost = net.cost();
    out.f.assign(static_cast<std::size_t>(N), 0.0);
    for (int i = 0; i < N; ++i) {
      out.f[static_cast<std::size_t>(i)] = std::clamp(net.potential(i), 0.0, s.cap[static_cast<std::size_t>(i)]);
    }
    out.rounds = round + 1;
    out.arcs = net.arc_count();
    // Add every violated Lipschitz constraint not already in the network;
    // violations on present arcs are rounding. Only pairs with f_i > f_j + slack
    // can violate, so scan in decreasing f and compare squared distances.
    const double slack = opt.tolerance * scale;
    std::vector<int> order(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return out.f[static_cast<std::size_t>(a)] > out.f[static_cast<std::size_t>(b)];
    });
    std::size_t added = 0;
    for (std::size_t a = 0; a < order.size(); ++a) {
      const int i = order[a];
      const double fi = out.f[static_cast<std::size_t>(i)];
      for (std::size_t b = order.size(); b-- > a + 1;) {
        const int j = order[b];
        const double diff = fi - out.f[static_cast<std::size_t>(j)] - slack;
        if (diff <= 0.0) break;
        const double d2 = s.dist2(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        if (diff * diff > d2 && present.insert({i, j}).second) {
          extra.emplace_back(i, j);
          net.add_arc(i, j, std::sqrt(d2));
          ++added;
        }
      }
    }
    if (added == 0) {
      out.converged = true;
      break;
    }
  }
  double v = 0.0;
  for (int i = 0; i < N; ++i) v += supply[static_cast<std::size_t>(i)] * out.f[static_cast<std::size_t>(i)];
  out.value = v;
  return out;
}

std::vector<std::pair<int, int>> neighbour_arcs(const Support& s, int k) {
  const int N = static_cast<int>(s.size());
  std::vector<std::pair<int, int>> arcs;
  if (N < 2) return arcs;
  const std::size_t kk = static_cast<std::size_t>(std::min(k, N - 1));
  const std::size_t dim = static_cast<std::size_t>(s.dim);
  auto x0 = [&](int i) { return s.coords[static_cast<std::size_t>(i) * dim]; };
  // sweep outward along the first axis; stop once the axis gap alone beats the k-th best
  std::vector<int> order(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return x0(a) < x0(b); });
  std::vector<std::pair<double, int>> heap;
  for (int pos = 0; pos < N; ++pos) {
    const int i = order[static_cast<std::size_t>(pos)];
    heap.clear();
    auto offer = [&](int j) {
      const double d2 = s.dist2(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      if (heap.size() < kk) {
        heap.emplace_back(d2, j);
        std::push_heap(heap.begin(), heap.end());
      } else if (d2 < heap.front().first) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = {d2, j};
        std::push_heap(heap.begin(), heap.end());
      }
    };
    auto done = [&](int j) {
      const double g = x0(j) - x0(i);
      return heap.size() == kk && g * g > heap.front().first;
    };
    int lo = pos - 1, hi = pos + 1;
    bool left = lo >= 0, right = hi < N;
    while (left || right) {
      if (left) {
        const int j = order[static_cast<std::size_t>(lo)];
        if (done(j)) left = false;
        else { offer(j); left = --lo >= 0; }
      }
      if (right) {
        const int j = order[static_cast<std::size_t>(hi)];
        if (done(j)) right = false;
        else { offer(j); right = ++hi < N; }
      }
    }
    for (const auto& [d2, j] : heap) {
      arcs.emplace_back(i, j);
      arcs.emplace_back(j, i);
    }
  }
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
  return arcs;
}

}  // namespace

double f_r_of(const ParticleMeasure& mu, double r) {
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    auto p = mu.point(i);
    double nrm = 0.0;
    for (double v : p) nrm += v * v;
    s += mu.masses[i] * std::max(r - std::sqrt(nrm), 0.0);
  }
  return s;
}

FrResult f_r_distance_detail(const ParticleMeasure& mu, const ParticleMeasure& nu, double r,
                             const FrOptions& opt) {
  if (!(r > 0.0)) throw std::invalid_argument("F_r needs r > 0");
  if (mu.size() > 0 && nu.size() > 0 && mu.dim != nu.dim) throw std::invalid_argument("clouds differ in dimension");
  check_valid(mu, r);
  check_valid(nu, r);
  Support s = merge_support(mu, nu, r);
  FrResult res;
  res.dim = s.dim;
  res.nodes = s.coords;
  res.weights = s.weight;
  if (s.size() == 0) {
    res.converged = true;
    return res;
  }
  auto arcs = neighbour_arcs(s, opt.neighbors);
  std::vector<std::pair<int, int>> extra;
  auto plus = solve_signed(s, 1.0, arcs, extra, opt);
  auto minus = solve_signed(s, -1.0, arcs, extra, opt);
  const SignedSolve& best = plus.value >= minus.value ? plus : minus;
  res.value = best.value;
  res.potential = best.f;
  res.primal_cost = best.cost;
  res.rounds = plus.rounds + minus.rounds;
  res.arcs = std::max(plus.arcs, minus.arcs);
  res.converged = plus.converged && minus.converged;
  return res;
}

double f_r_distance(const ParticleMeasure& mu, const ParticleMeasure& nu, double r, const FrOptions& opt) {
  return f_r_distance_detail(mu, nu, r, opt).value;
}

double weak_metric(const ParticleMeasure& mu, const ParticleMeasure& nu, int terms, const FrOptions& opt) {
  if (terms < 1) throw std::invalid_argument("weak metric needs at least one term");
  double s = 0.0;
  for (int i = 1; i <= terms; ++i) {
    s += std::ldexp(1.0, -i) * std::min(1.0, f_r_distance(mu, nu, static_cast<double>(i), opt));
  }
  return s;
}

}  // namespace hpm
