#include "hpm/poly.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace hpm {

MultiIndex::MultiIndex(std::vector<int> exps) : exps_(std::move(exps)) {
  for (int e : exps_) {
    if (e < 0) throw std::invalid_argument("multi-index entries must be >= 0");
  }
}

MultiIndex::MultiIndex(std::initializer_list<int> exps)
    : MultiIndex(std::vector<int>(exps)) {}

int MultiIndex::degree() const {
  return std::accumulate(exps_.begin(), exps_.end(), 0);
}

double MultiIndex::factorial() const {
  double f = 1.0;
  for (int e : exps_) {
    for (int i = 2; i <= e; ++i) f *= i;
  }
  return f;
}

std::vector<MultiIndex> monomials_of_degree(int n, int k) {
  std::vector<MultiIndex> out;
  if (n <= 0 || k < 0) return out;
  std::vector<int> e(static_cast<std::size_t>(n), 0);
  // Enumerate compositions of k into n parts, lexicographically descending in e[0].
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == n - 1) {
      e[static_cast<std::size_t>(pos)] = left;
      out.emplace_back(e);
      return;
    }
    for (int v = left; v >= 0; --v) {
      e[static_cast<std::size_t>(pos)] = v;
      self(self, pos + 1, left - v);
    }
  };
  rec(rec, 0, k);
  return out;
}

// ---------------------------------------------------------------------------

Poly::Poly(int dim) : dim_(dim) {
  if (dim < 1) throw std::invalid_argument("polynomial dimension must be >= 1");
}

Poly::Poly(int dim, std::vector<Term> terms) : dim_(dim), terms_(std::move(terms)) {
  if (dim < 1) throw std::invalid_argument("polynomial dimension must be >= 1");
  for (const auto& t : terms_) {
    if (t.alpha.dim() != dim_) {
      throw std::invalid_argument("multi-index length does not match dimension");
    }
    if (!std::isfinite(t.c)) throw std::invalid_argument("non-finite coefficient");
  }
  normalize();
}

Poly Poly::constant(int dim, double c) {
  return Poly(dim, {Term{MultiIndex(std::vector<int>(static_cast<std::size_t>(dim), 0)), c}});
}

Poly Poly::coordinate(int dim, int i) {
  if (i < 0 || i >= dim) throw std::invalid_argument("coordinate index out of range");
  std::vector<int> e(static_cast<std::size_t>(dim), 0);
  e[static_cast<std::size_t>(i)] = 1;
  return Poly(dim, {Term{MultiIndex(e), 1.0}});
}

Poly Poly::monomial(const MultiIndex& alpha, double c) {
  return Poly(alpha.dim(), {Term{alpha, c}});
}

void Poly::normalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const Term& a, const Term& b) { return a.alpha < b.alpha; });
  std::vector<Term> merged;
  merged.reserve(terms_.size());
  for (auto& t : terms_) {
    if (!merged.empty() && merged.back().alpha == t.alpha) {
      merged.back().c += t.c;
    } else {
      merged.push_back(std::move(t));
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.c == 0.0; });
  terms_ = std::move(merged);
  rebuild_cache();
}

void Poly::rebuild_cache() {
  degree_ = -1;
  flat_exps_.clear();
  flat_coeffs_.clear();
  flat_exps_.reserve(terms_.size() * static_cast<std::size_t>(dim_));
  for (const auto& t : terms_) {
    degree_ = std::max(degree_, t.alpha.degree());
    flat_exps_.insert(flat_exps_.end(), t.alpha.exps().begin(), t.alpha.exps().end());
    flat_coeffs_.push_back(t.c);
  }
}

int Poly::low_degree() const {
  int low = -1;
  for (const auto& t : terms_) {
    int d = t.alpha.degree();
    if (low < 0 || d < low) low = d;
  }
  return low;
}

bool Poly::is_homogeneous() const {
  return !terms_.empty() && low_degree() == degree_;
}

double Poly::coeff(const MultiIndex& alpha) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), alpha,
                             [](const Term& t, const MultiIndex& a) { return t.alpha < a; });
  if (it != terms_.end() && it->alpha == alpha) return it->c;
  return 0.0;
}

double Poly::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) {
    throw std::invalid_argument("point dimension does not match polynomial dimension");
  }
  if (terms_.empty()) return 0.0;
  const int stride = degree_ + 1;
  constexpr int kStack = 256;
  double stack_buf[kStack];
  std::vector<double> heap_buf;
  double* pw = stack_buf;
  const int need = dim_ * stride;
  if (need > kStack) {
    heap_buf.resize(static_cast<std::size_t>(need));
    pw = heap_buf.data();
  }
  for (int i = 0; i < dim_; ++i) {
    double* row = pw + i * stride;
    row[0] = 1.0;
    for (int e = 1; e < stride; ++e) row[e] = row[e - 1] * x[static_cast<std::size_t>(i)];
  }
  double sum = 0.0;
  const int* ex = flat_exps_.data();
  for (double c : flat_coeffs_) {
    double m = c;
    for (int i = 0; i < dim_; ++i) m *= pw[i * stride + ex[i]];
    sum += m;
    ex += dim_;
  }
  return sum;
}

Poly Poly::partial(int i) const {
  if (i < 0 || i >= dim_) throw std::invalid_argument("partial: index out of range");
  std::vector<Term> out;
  for (const auto& t : terms_) {
    int e = t.alpha[i];
    if (e == 0) continue;
    auto exps = t.alpha.exps();
    exps[static_cast<std::size_t>(i)] -= 1;
    out.push_back(Term{MultiIndex(std::move(exps)), t.c * e});
  }
  return Poly(dim_, std::move(out));
}

Poly Poly::derivative(const MultiIndex& alpha) const {
  if (alpha.dim() != dim_) throw std::invalid_argument("derivative: multi-index dimension");
  Poly q = *this;
  for (int i = 0; i < dim_; ++i) {
    for (int r = 0; r < alpha[i]; ++r) q = q.partial(i);
  }
  return q;
}

std::vector<Poly> Poly::gradient() const {
  std::vector<Poly> g;
  g.reserve(static_cast<std::size_t>(dim_));
  for (int i = 0; i < dim_; ++i) g.push_back(partial(i));
  return g;
}

std::vector<double> Poly::gradient(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) {
    throw std::invalid_argument("point dimension does not match polynomial dimension");
  }
  std::vector<double> g(static_cast<std::size_t>(dim_), 0.0);
  if (terms_.empty()) return g;
  const int stride = degree_ + 1;
  std::vector<double> pw(static_cast<std::size_t>(dim_ * stride));
  for (int i = 0; i < dim_; ++i) {
    pw[static_cast<std::size_t>(i * stride)] = 1.0;
    for (int e = 1; e < stride; ++e) {
      pw[static_cast<std::size_t>(i * stride + e)] =
          pw[static_cast<std::size_t>(i * stride + e - 1)] * x[static_cast<std::size_t>(i)];
    }
  }
  const int* ex = flat_exps_.data();
  for (double c : flat_coeffs_) {
    for (int d = 0; d < dim_; ++d) {
      if (ex[d] == 0) continue;
      double m = c * ex[d];
      for (int i = 0; i < dim_; ++i) {
        int e = (i == d) ? ex[i] - 1 : ex[i];
        m *= pw[static_cast<std::size_t>(i * stride + e)];
      }
      g[static_cast<std::size_t>(d)] += m;
    }
    ex += dim_;
  }
  return g;
}

Poly Poly::rescaled(double s) const {
  std::vector<Term> out = terms_;
  for (auto& t : out) t.c *= std::pow(s, t.alpha.degree());
  return Poly(dim_, std::move(out));
}

namespace {

// (a + b t)^e as ascending coefficients.
void binomial_power(double a, double b, int e, std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(e + 1), 0.0);
  double binom = 1.0;
  for (int i = 0; i <= e; ++i) {
    out[static_cast<std::size_t>(i)] = binom * std::pow(a, e - i) * std::pow(b, i);
    binom = binom * (e - i) / (i + 1);
  }
}

}  // namespace

std::vector<double> Poly::restrict_to_line(std::span<const double> origin,
                                           std::span<const double> dir) const {
  if (static_cast<int>(origin.size()) != dim_ || static_cast<int>(dir.size()) != dim_) {
    throw std::invalid_argument("restrict_to_line: dimension mismatch");
  }
  std::vector<double> result(static_cast<std::size_t>(std::max(degree_, 0) + 1), 0.0);
  std::vector<double> acc, factor, tmp;
  for (const auto& t : terms_) {
    acc.assign(1, t.c);
    for (int i = 0; i < dim_; ++i) {
      int e = t.alpha[i];
      if (e == 0) continue;
      binomial_power(origin[static_cast<std::size_t>(i)], dir[static_cast<std::size_t>(i)], e,
                     factor);
      tmp.assign(acc.size() + factor.size() - 1, 0.0);
      for (std::size_t u = 0; u < acc.size(); ++u) {
        for (std::size_t v = 0; v < factor.size(); ++v) tmp[u + v] += acc[u] * factor[v];
      }
      acc.swap(tmp);
    }
    for (std::size_t u = 0; u < acc.size(); ++u) result[u] += acc[u];
  }
  return result;
}

std::vector<double> Poly::restrict_to_axis(std::span<const double> origin, int axis) const {
  if (static_cast<int>(origin.size()) != dim_ || axis < 0 || axis >= dim_) {
    throw std::invalid_argument("restrict_to_axis: dimension mismatch");
  }
  std::vector<double> result(static_cast<std::size_t>(std::max(degree_, 0) + 1), 0.0);
  const int* ex = flat_exps_.data();
  for (double c : flat_coeffs_) {
    double m = c;
    for (int i = 0; i < dim_; ++i) {
      if (i == axis) continue;
      for (int r = 0; r < ex[i]; ++r) m *= origin[static_cast<std::size_t>(i)];
    }
    result[static_cast<std::size_t>(ex[axis])] += m;
    ex += dim_;
  }
  return result;
}

std::uint64_t Poly::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  mix(static_cast<std::uint64_t>(dim_));
  for (const auto& t : terms_) {
    for (int e : t.alpha.exps()) mix(static_cast<std::uint64_t>(e));
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(t.c));
    std::memcpy(&bits, &t.c, sizeof(bits));
    mix(bits);
  }
  return h;
}

std::string Poly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  // Highest degree first reads more naturally.
  std::vector<const Term*> order;
  for (const auto& t : terms_) order.push_back(&t);
  std::stable_sort(order.begin(), order.end(), [](const Term* a, const Term* b) {
    return a->alpha.degree() > b->alpha.degree();
  });
  for (const Term* t : order) {
    double c = t->c;
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    double ac = std::abs(c);
    bool is_const = t->alpha.degree() == 0;
    bool wrote = false;
    if (ac != 1.0 || is_const) {
      os << ac;
      wrote = true;
    }
    for (int i = 0; i < dim_; ++i) {
      int e = t->alpha[i];
      if (e == 0) continue;
      if (wrote) os << "*";
      os << "x" << i;
      if (e > 1) os << "^" << e;
      wrote = true;
    }
    first = false;
  }
  return os.str();
}

Poly operator+(const Poly& a, const Poly& b) {
  if (a.dim_ != b.dim_) throw std::invalid_argument("operator+: dimension mismatch");
  std::vector<Term> t = a.terms_;
  t.insert(t.end(), b.terms_.begin(), b.terms_.end());
  return Poly(a.dim_, std::move(t));
}

Poly operator-(const Poly& a) { return -1.0 * a; }

Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

Poly operator*(double s, const Poly& p) {
  std::vector<Term> t = p.terms_;
  for (auto& term : t) term.c *= s;
  return Poly(p.dim_, std::move(t));
}

Poly operator*(const Poly& a, const Poly& b) {
  if (a.dim_ != b.dim_) throw std::invalid_argument("operator*: dimension mismatch");
  std::vector<Term> out;
  out.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& s : a.terms_) {
    for (const auto& t : b.terms_) {
      std::vector<int> e = s.alpha.exps();
      for (int i = 0; i < a.dim_; ++i) e[static_cast<std::size_t>(i)] += t.alpha[i];
      out.push_back(Term{MultiIndex(std::move(e)), s.c * t.c});
    }
  }
  return Poly(a.dim_, std::move(out));
}

bool operator==(const Poly& a, const Poly& b) {
  if (a.dim_ != b.dim_ || a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i) {
    if (a.terms_[i].alpha != b.terms_[i].alpha || a.terms_[i].c != b.terms_[i].c) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

Poly laplacian(const Poly& p) {
  std::vector<Term> out;
  for (const auto& t : p.terms()) {
    for (int i = 0; i < p.dim(); ++i) {
      int e = t.alpha[i];
      if (e < 2) continue;
      auto exps = t.alpha.exps();
      exps[static_cast<std::size_t>(i)] -= 2;
      out.push_back(Term{MultiIndex(std::move(exps)), t.c * e * (e - 1)});
    }
  }
  return Poly(p.dim(), std::move(out));
}

bool is_harmonic(const Poly& p) { return laplacian(p).is_zero(); }

double harmonic_residual(const Poly& p) {
  double top = 0.0;
  for (const auto& t : p.terms()) top = std::max(top, std::abs(t.c));
  if (top == 0.0) return 0.0;
  double lap = 0.0;
  for (const auto& t : laplacian(p).terms()) lap = std::max(lap, std::abs(t.c));
  return lap / top;
}

const Poly& HomogDecomp::part(int i) const {
  auto it = parts.find(i);
  if (it == parts.end()) throw std::out_of_range("no homogeneous part of that degree");
  return it->second;
}

Poly HomogDecomp::sum() const {
  std::vector<Term> all;
  for (const auto& [deg, part] : parts) {
    all.insert(all.end(), part.terms().begin(), part.terms().end());
  }
  return Poly(dim, std::move(all));
}

HomogDecomp homogeneous_decompose(const Poly& p) {
  if (p.is_zero()) throw std::invalid_argument("cannot decompose the zero polynomial");
  std::map<int, std::vector<Term>> groups;
  for (const auto& t : p.terms()) groups[t.alpha.degree()].push_back(t);
  HomogDecomp d;
  d.dim = p.dim();
  for (auto& [deg, terms] : groups) d.parts.emplace(deg, Poly(p.dim(), std::move(terms)));
  d.top_degree = d.parts.rbegin()->first;
  d.bottom_degree = d.parts.begin()->first;
  return d;
}

Poly dilate_scale(const Poly& p, double c, double r) {
  if (!(c > 0.0) || !(r > 0.0)) throw std::invalid_argument("dilate_scale: c and r must be > 0");
  return (c * std::pow(r, p.dim() - 2)) * p.rescaled(r);
}

std::vector<Poly> harmonic_basis(int n, int k) {
  if (n < 2 || k < 1) throw std::invalid_argument("harmonic_basis: need n >= 2, k >= 1");
  const auto cols = monomials_of_degree(n, k);
  std::vector<MultiIndex> rows = k >= 2 ? monomials_of_degree(n, k - 2) : std::vector<MultiIndex>{};
  if (rows.empty()) {
    std::vector<Poly> basis;
    for (const auto& a : cols) basis.push_back(Poly::monomial(a));
    return basis;
  }
  std::map<MultiIndex, int> row_of;
  for (std::size_t i = 0; i < rows.size(); ++i) row_of[rows[i]] = static_cast<int>(i);

  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                            static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    Poly lap = laplacian(Poly::monomial(cols[j]));
    for (const auto& t : lap.terms()) {
      L(row_of.at(t.alpha), static_cast<Eigen::Index>(j)) = t.c;
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(L);
  lu.setThreshold(1e-10);
  Eigen::MatrixXd kernel = lu.kernel();

  std::vector<Poly> basis;
  for (Eigen::Index c = 0; c < kernel.cols(); ++c) {
    std::vector<Term> terms;
    double scale = kernel.col(c).cwiseAbs().maxCoeff();
    for (std::size_t j = 0; j < cols.size(); ++j) {
      double v = kernel(static_cast<Eigen::Index>(j), c) / scale;
      if (std::abs(v) < 1e-14) continue;
      terms.push_back(Term{cols[j], v});
    }
    basis.emplace_back(n, std::move(terms));
  }
  return basis;
}

Poly lewy_polynomial() {
  // x²y − x²z + y²z − xy² + xz² − yz² − xyz
  return Poly(3, {
                     Term{{2, 1, 0}, 1.0},
                     Term{{2, 0, 1}, -1.0},
                     Term{{0, 2, 1}, 1.0},
                     Term{{1, 2, 0}, -1.0},
                     Term{{1, 0, 2}, 1.0},
                     Term{{0, 1, 2}, -1.0},
                     Term{{1, 1, 1}, -1.0},
                 });
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const Poly& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : p.terms()) {
    terms.push_back({{"alpha", t.alpha.exps()}, {"c", t.c}});
  }
  return {{"dim", p.dim()}, {"terms", terms}};
}

Poly poly_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("terms")) {
    throw std::invalid_argument("polynomial JSON needs \"dim\" and \"terms\"");
  }
  if (!j["dim"].is_number_integer()) throw std::invalid_argument("\"dim\" must be an integer");
  int dim = j["dim"].get<int>();
  if (dim < 2) throw std::invalid_argument("\"dim\" must be >= 2");
  if (!j["terms"].is_array()) throw std::invalid_argument("\"terms\" must be an array");
  std::vector<Term> terms;
  for (const auto& t : j["terms"]) {
    if (!t.is_object() || !t.contains("alpha") || !t.contains("c")) {
      throw std::invalid_argument("each term needs \"alpha\" and \"c\"");
    }
    auto alpha = t["alpha"].get<std::vector<int>>();
    if (static_cast<int>(alpha.size()) != dim) {
      throw std::invalid_argument("term \"alpha\" length must equal \"dim\"");
    }
    if (!t["c"].is_number()) throw std::invalid_argument("term \"c\" must be a number");
    terms.push_back(Term{MultiIndex(std::move(alpha)), t["c"].get<double>()});
  }
  return Poly(dim, std::move(terms));
}

namespace {

struct ParsedMonomial {
  double c = 1.0;
  std::map<int, int> exps;
};

class TextParser {
 public:
  explicit TextParser(std::string_view s) : s_(s) {}

  std::vector<ParsedMonomial> parse() {
    std::vector<ParsedMonomial> out;
    skip_ws();
    if (pos_ >= s_.size()) throw error("empty polynomial");
    bool first = true;
    while (true) {
      skip_ws();
      if (pos_ >= s_.size()) break;
      double sign = 1.0;
      if (s_[pos_] == '+' || s_[pos_] == '-') {
        if (s_[pos_] == '-') sign = -1.0;
        ++pos_;
      } else if (!first) {
        throw error("expected '+' or '-'");
      }
      auto m = monomial();
      m.c *= sign;
      out.push_back(std::move(m));
      first = false;
    }
    return out;
  }

  int max_var() const { return max_var_; }

 private:
  std::invalid_argument error(const std::string& what) const {
    return std::invalid_argument("polynomial text, position " + std::to_string(pos_) + ": " +
                                 what);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  ParsedMonomial monomial() {
    ParsedMonomial m;
    bool any = false;
    while (true) {
      skip_ws();
      if (pos_ >= s_.size()) break;
      char ch = s_[pos_];
      if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
        m.c *= number();
      } else if (ch == 'x' || ch == 'y' || ch == 'z') {
        int var = variable();
        int e = 1;
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == '^') {
          ++pos_;
          skip_ws();
          e = integer();
        }
        m.exps[var] += e;
      } else {
        throw error(std::string("unexpected character '") + ch + "'");
      }
      any = true;
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == '*') {
        ++pos_;
        continue;
      }
      break;
    }
    if (!any) throw error("expected a term");
    return m;
  }

  double number() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.' ||
            s_[pos_] == 'e' || s_[pos_] == 'E' ||
            ((s_[pos_] == '-' || s_[pos_] == '+') && pos_ > start &&
             (s_[pos_ - 1] == 'e' || s_[pos_ - 1] == 'E')))) {
      ++pos_;
    }
    std::string tok(s_.substr(start, pos_ - start));
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      if (used != tok.size()) throw error("bad number '" + tok + "'");
      return v;
    } catch (const std::logic_error&) {
      throw error("bad number '" + tok + "'");
    }
  }

  int integer() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) throw error("expected an integer exponent");
    return std::stoi(std::string(s_.substr(start, pos_ - start)));
  }

  int variable() {
    char ch = s_[pos_++];
    int var;
    if (ch == 'x' && pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      var = integer();
    } else {
      var = ch - 'x';
    }
    max_var_ = std::max(max_var_, var);
    return var;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int max_var_ = -1;
};

}  // namespace

Poly parse_poly(std::string_view text, int dim) {
  TextParser parser(text);
  auto monos = parser.parse();
  if (dim < 0) dim = std::max(2, parser.max_var() + 1);
  if (parser.max_var() >= dim) {
    throw std::invalid_argument("polynomial text uses a variable beyond the given dimension");
  }
  std::vector<Term> terms;
  for (const auto& m : monos) {
    std::vector<int> e(static_cast<std::size_t>(dim), 0);
    for (auto [v, p] : m.exps) e[static_cast<std::size_t>(v)] = p;
    terms.push_back(Term{MultiIndex(std::move(e)), m.c});
  }
  return Poly(dim, std::move(terms));
}

}  // namespace hpm
