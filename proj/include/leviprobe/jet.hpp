#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "leviprobe/errors.hpp"

namespace leviprobe {

// Default relative tolerance below which a jet coefficient counts as zero.
inline constexpr double kCoeffZeroTol = 1e-9;

// Exponent tuple of a monomial. Ordered graded-lexicographically so that
// iteration over a jet's terms lists low degrees first.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> e) : e_(std::move(e)) {
    for (int v : e_)
      if (v < 0) throw DomainError("MultiIndex: negative exponent");
  }

  static MultiIndex zero(int nvars) { return MultiIndex(std::vector<int>(nvars, 0)); }

  static MultiIndex unit(int nvars, int var) {
    std::vector<int> e(nvars, 0);
    e.at(var) = 1;
    return MultiIndex(std::move(e));
  }

  int size() const { return static_cast<int>(e_.size()); }
  int operator[](int i) const { return e_[i]; }

  int degree() const { return std::accumulate(e_.begin(), e_.end(), 0); }

  MultiIndex plus(const MultiIndex& o) const {
    if (size() != o.size()) throw ShapeError("MultiIndex: size mismatch in plus");
    std::vector<int> e(e_);
    for (int i = 0; i < size(); ++i) e[i] += o.e_[i];
    return MultiIndex(std::move(e));
  }

  MultiIndex raised(int var) const {
    std::vector<int> e(e_);
    e.at(var) += 1;
    return MultiIndex(std::move(e));
  }

  MultiIndex lowered(int var) const {
    std::vector<int> e(e_);
    if (e.at(var) == 0) throw DomainError("MultiIndex: lowering zero exponent");
    e[var] -= 1;
    return MultiIndex(std::move(e));
  }

  MultiIndex without(int var) const {
    std::vector<int> e;
    e.reserve(e_.size() - 1);
    for (int i = 0; i < size(); ++i)
      if (i != var) e.push_back(e_[i]);
    return MultiIndex(std::move(e));
  }

  MultiIndex with_inserted(int var, int exponent) const {
    std::vector<int> e;
    e.reserve(e_.size() + 1);
    for (int i = 0; i <= size(); ++i) {
      if (i == var) e.push_back(exponent);
      if (i < size()) e.push_back(e_[i]);
    }
    return MultiIndex(std::move(e));
  }

  bool operator==(const MultiIndex& o) const { return e_ == o.e_; }
  bool operator!=(const MultiIndex& o) const { return e_ != o.e_; }

  // Graded lex: compare total degree, then exponents.
  bool operator<(const MultiIndex& o) const {
    int da = degree(), db = o.degree();
    if (da != db) return da < db;
    return e_ < o.e_;
  }

  const std::vector<int>& exponents() const { return e_; }

 private:
  std::vector<int> e_;
};

// Truncated multivariate Taylor expansion at 0: sparse map from multi-index
// to double coefficient. Absent index == zero coefficient; no stored term
// exceeds the truncation degree. Immutable in spirit: operations return new
// jets.
class Jet {
 public:
  Jet() : nvars_(1), degree_(0) {}
  Jet(int nvars, int degree) : nvars_(nvars), degree_(degree) {
    if (nvars < 1) throw ShapeError("Jet: nvars must be >= 1");
    if (degree < 0) throw ShapeError("Jet: degree must be >= 0");
  }

  static Jet constant(int nvars, int degree, double c) {
    Jet j(nvars, degree);
    j.set_coeff(MultiIndex::zero(nvars), c);
    return j;
  }

  // The coordinate function x_var.
  static Jet variable(int nvars, int degree, int var) {
    if (degree < 1) throw ShapeError("Jet::variable: degree must be >= 1");
    Jet j(nvars, degree);
    j.set_coeff(MultiIndex::unit(nvars, var), 1.0);
    return j;
  }

  int nvars() const { return nvars_; }
  int degree() const { return degree_; }

  double coeff(const MultiIndex& mi) const {
    auto it = c_.find(mi);
    return it == c_.end() ? 0.0 : it->second;
  }

  void set_coeff(const MultiIndex& mi, double v) {
    if (mi.size() != nvars_) throw ShapeError("Jet::set_coeff: index size mismatch");
    if (mi.degree() > degree_) {
      if (v != 0.0) throw DomainError("Jet::set_coeff: index beyond truncation degree");
      return;
    }
    if (v == 0.0)
      c_.erase(mi);
    else
      c_[mi] = v;
  }

  void add_coeff(const MultiIndex& mi, double v) { set_coeff(mi, coeff(mi) + v); }

  const std::map<MultiIndex, double>& terms() const { return c_; }

  int term_count() const { return static_cast<int>(c_.size()); }

  double constant_term() const { return coeff(MultiIndex::zero(nvars_)); }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [mi, v] : c_) m = std::max(m, std::abs(v));
    return m;
  }

  bool is_zero(double tol = kCoeffZeroTol, double scale = -1.0) const {
    double s = scale >= 0.0 ? scale : max_abs_coeff();
    return max_abs_coeff() <= tol * (1.0 + s);
  }

  Jet truncated(int newdeg) const {
    if (newdeg < 0) throw ShapeError("Jet::truncated: negative degree");
    Jet r(nvars_, newdeg);
    for (const auto& [mi, v] : c_)
      if (mi.degree() <= newdeg) r.c_[mi] = v;
    return r;
  }

  Jet homogeneous_part(int k) const {
    Jet r(nvars_, degree_);
    for (const auto& [mi, v] : c_)
      if (mi.degree() == k) r.c_[mi] = v;
    return r;
  }

  Jet operator-() const {
    Jet r(*this);
    for (auto& [mi, v] : r.c_) v = -v;
    return r;
  }

  Jet& operator+=(const Jet& o) {
    check_shape(o, "operator+=");
    for (const auto& [mi, v] : o.c_) add_coeff(mi, v);
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    check_shape(o, "operator-=");
    for (const auto& [mi, v] : o.c_) add_coeff(mi, -v);
    return *this;
  }
  Jet& operator*=(double s) {
    if (s == 0.0) {
      c_.clear();
      return *this;
    }
    for (auto& [mi, v] : c_) v *= s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }

  friend Jet operator+(Jet a, double c) {
    a.add_coeff(MultiIndex::zero(a.nvars_), c);
    return a;
  }
  friend Jet operator+(double c, Jet a) { return std::move(a) + c; }
  friend Jet operator-(Jet a, double c) { return std::move(a) + (-c); }
  friend Jet operator-(double c, const Jet& a) { return (-a) + c; }

  void check_shape(const Jet& o, const char* where) const {
    if (nvars_ != o.nvars_ || degree_ != o.degree_)
      throw ShapeError(std::string("Jet: nvars/degree mismatch in ") + where);
  }

 private:
  int nvars_;
  int degree_;
  std::map<MultiIndex, double> c_;
};

// Truncated product. Terms whose total degree would exceed the truncation
// are dropped.
inline Jet jet_mul(const Jet& a, const Jet& b) {
  a.check_shape(b, "jet_mul");
  Jet r(a.nvars(), a.degree());
  for (const auto& [ma, va] : a.terms()) {
    int da = ma.degree();
    for (const auto& [mb, vb] : b.terms()) {
      if (da + mb.degree() > a.degree()) continue;
      r.add_coeff(ma.plus(mb), va * vb);
    }
  }
  return r;
}

inline Jet operator*(const Jet& a, const Jet& b) { return jet_mul(a, b); }

// outer(inner_1, ..., inner_k), truncated. Inners must all live in one
// variable space and vanish at 0 so that the truncated composition is the
// jet of the composite at the base point.
inline Jet jet_compose(const Jet& outer, const std::vector<Jet>& inners) {
  if (static_cast<int>(inners.size()) != outer.nvars())
    throw ShapeError("jet_compose: inner count must equal outer.nvars");
  for (const auto& in : inners) {
    inners.front().check_shape(in, "jet_compose (inners)");
    if (in.constant_term() != 0.0)
      throw DomainError("jet_compose: inner jet has nonzero constant term");
  }
  int nv = inners.front().nvars();
  int deg = inners.front().degree();

  // Powers inner_i^k vanish to order k; beyond deg they cannot contribute.
  std::vector<std::vector<Jet>> pw(inners.size());
  for (size_t i = 0; i < inners.size(); ++i) {
    pw[i].push_back(Jet::constant(nv, deg, 1.0));
    for (int k = 1; k <= deg; ++k) pw[i].push_back(jet_mul(pw[i].back(), inners[i]));
  }

  Jet r(nv, deg);
  for (const auto& [mi, v] : outer.terms()) {
    if (mi.degree() > deg) continue;
    Jet term = Jet::constant(nv, deg, v);
    for (int i = 0; i < outer.nvars(); ++i) {
      int e = mi[i];
      if (e == 0) continue;
      if (e > deg) {
        term = Jet(nv, deg);  // vanishes beyond truncation
        break;
      }
      term = jet_mul(term, pw[i][e]);
    }
    r += term;
  }
  return r;
}

// Pullback along a parametrization: same contract as jet_compose with the
// inners living in the parameter space.
inline Jet jet_restrict(const Jet& f, const std::vector<Jet>& param) {
  return jet_compose(f, param);
}

// Substitute variable `var` of f by the jet g (g in the same full variable
// space, independent of `var`), leaving the other variables untouched.
inline Jet jet_substitute(const Jet& f, int var, const Jet& g) {
  std::vector<Jet> inners;
  inners.reserve(f.nvars());
  for (int i = 0; i < f.nvars(); ++i)
    inners.push_back(i == var ? g : Jet::variable(f.nvars(), f.degree(), i));
  return jet_compose(f, inners);
}

// Project away an unused variable.
inline Jet jet_remove_variable(const Jet& f, int var) {
  if (f.nvars() < 2) throw ShapeError("jet_remove_variable: need >= 2 variables");
  Jet r(f.nvars() - 1, f.degree());
  for (const auto& [mi, v] : f.terms()) {
    if (mi[var] != 0)
      throw DomainError("jet_remove_variable: jet depends on removed variable");
    r.set_coeff(mi.without(var), v);
  }
  return r;
}

// Insert a fresh (unused) variable at position `var`.
inline Jet jet_insert_variable(const Jet& f, int var) {
  Jet r(f.nvars() + 1, f.degree());
  for (const auto& [mi, v] : f.terms()) r.set_coeff(mi.with_inserted(var, 0), v);
  return r;
}

// Solve rho(..., x_var, ...) = 0 for x_var by fixed-point iteration on jets.
// Returns the solution as a jet in the remaining variables (indices above
// `var` shift down by one). One degree of accuracy is gained per iteration,
// so degree() iterations give the exact truncated solution.
inline Jet jet_graph_solve(const Jet& rho, int var, double tol = kCoeffZeroTol) {
  double scale = 1.0 + rho.max_abs_coeff();
  if (std::abs(rho.constant_term()) > tol * scale)
    throw PreconditionError("jet_graph_solve: rho does not vanish at 0");
  double c = rho.coeff(MultiIndex::unit(rho.nvars(), var));
  if (std::abs(c) <= tol * scale)
    throw SingularityError("jet_graph_solve: degenerate linear part in solve variable");

  Jet work = rho;
  work.set_coeff(MultiIndex::zero(rho.nvars()), 0.0);  // absorb rounding noise

  Jet g(rho.nvars(), rho.degree());  // current guess for x_var, independent of it
  for (int it = 0; it < rho.degree(); ++it) {
    Jet resid = jet_substitute(work, var, g);
    g -= resid * (1.0 / c);
  }
  return jet_remove_variable(g, var);
}

// Expansion of f(T u) for an invertible square matrix T.
inline Jet jet_linear_change(const Jet& f, const Eigen::MatrixXd& T) {
  if (T.rows() != f.nvars() || T.cols() != f.nvars())
    throw ShapeError("jet_linear_change: matrix size must match nvars");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(T);
  if (!lu.isInvertible())
    throw SingularityError("jet_linear_change: singular coordinate matrix");
  std::vector<Jet> inners;
  inners.reserve(f.nvars());
  for (int i = 0; i < f.nvars(); ++i) {
    Jet row(f.nvars(), f.degree());
    for (int j = 0; j < f.nvars(); ++j)
      if (T(i, j) != 0.0) row.set_coeff(MultiIndex::unit(f.nvars(), j), T(i, j));
    inners.push_back(std::move(row));
  }
  return jet_compose(f, inners);
}

inline Jet jet_derivative(const Jet& f, int var) {
  Jet r(f.nvars(), f.degree());
  for (const auto& [mi, v] : f.terms()) {
    int e = mi[var];
    if (e == 0) continue;
    r.set_coeff(mi.lowered(var), v * e);
  }
  return r;
}

// Antiderivative in `var` with zero constant; terms escaping the truncation
// degree are dropped.
inline Jet jet_antiderivative(const Jet& f, int var) {
  Jet r(f.nvars(), f.degree());
  for (const auto& [mi, v] : f.terms()) {
    if (mi.degree() + 1 > f.degree()) continue;
    int e = mi[var];
    r.set_coeff(mi.raised(var), v / (e + 1));
  }
  return r;
}

// Recenter: expansion of x -> f(x + p). Treats the jet as an exact
// polynomial, so this is only meaningful for polynomial data.
inline Jet jet_taylor_shift(const Jet& f, const Eigen::VectorXd& p) {
  if (p.size() != f.nvars()) throw ShapeError("jet_taylor_shift: point size mismatch");
  Jet r = f;
  for (int var = 0; var < f.nvars(); ++var) {
    if (p[var] == 0.0) continue;
    Jet shifted(f.nvars(), f.degree());
    for (const auto& [mi, v] : r.terms()) {
      int e = mi[var];
      // (x + p)^e expanded by binomials
      double binom = 1.0;
      double pk = 1.0;
      for (int k = 0; k <= e; ++k) {
        MultiIndex target = mi;
        for (int drop = 0; drop < k; ++drop) target = target.lowered(var);
        shifted.add_coeff(target, v * binom * pk);
        binom = binom * (e - k) / (k + 1);
        pk *= p[var];
      }
    }
    r = std::move(shifted);
  }
  return r;
}

inline double jet_evaluate(const Jet& f, const Eigen::VectorXd& x) {
  if (x.size() != f.nvars()) throw ShapeError("jet_evaluate: point size mismatch");
  double s = 0.0;
  for (const auto& [mi, v] : f.terms()) {
    double t = v;
    for (int i = 0; i < f.nvars(); ++i)
      for (int k = 0; k < mi[i]; ++k) t *= x[i];
    s += t;
  }
  return s;
}

inline Eigen::VectorXd jet_gradient_at_zero(const Jet& f) {
  Eigen::VectorXd g(f.nvars());
  for (int i = 0; i < f.nvars(); ++i) g[i] = f.coeff(MultiIndex::unit(f.nvars(), i));
  return g;
}

// --- text format -----------------------------------------------------------
//
// One term per line: whitespace-separated exponents, a colon, the
// coefficient, e.g. "2 0 0 : 1.0". Coefficients are printed with 17
// significant digits so the round-trip is exact. '#' starts a comment.

inline std::string jet_to_text(const Jet& f) {
  std::ostringstream os;
  char buf[40];
  for (const auto& [mi, v] : f.terms()) {
    for (int i = 0; i < mi.size(); ++i) os << mi[i] << ' ';
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << ": " << buf << '\n';
  }
  return os.str();
}

// nvars is inferred from the first term when not supplied; degree grows to
// fit the terms when the supplied value is too small.
inline Jet jet_parse(const std::string& text, int nvars = -1, int degree = -1) {
  std::vector<std::pair<MultiIndex, double>> parsed;
  std::istringstream is(text);
  std::string line;
  int maxdeg = 0;
  while (std::getline(is, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos)
      throw DomainError("jet_parse: missing ':' in line: " + line);
    std::istringstream head(line.substr(0, colon));
    std::vector<int> exps;
    int e;
    while (head >> e) exps.push_back(e);
    if (exps.empty()) throw DomainError("jet_parse: empty exponent tuple");
    std::istringstream tail(line.substr(colon + 1));
    double v;
    if (!(tail >> v)) throw DomainError("jet_parse: bad coefficient in line: " + line);
    MultiIndex mi{std::move(exps)};
    if (nvars < 0) nvars = mi.size();
    if (mi.size() != nvars) throw ShapeError("jet_parse: inconsistent exponent tuple length");
    maxdeg = std::max(maxdeg, mi.degree());
    parsed.emplace_back(std::move(mi), v);
  }
  if (nvars < 0) throw DomainError("jet_parse: empty jet text needs explicit nvars");
  Jet r(nvars, std::max(degree, maxdeg));
  for (auto& [mi, v] : parsed) r.add_coeff(mi, v);
  return r;
}

}  // namespace leviprobe
