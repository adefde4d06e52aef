#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "leviprobe/complex_jet.hpp"
#include "leviprobe/errors.hpp"
#include "leviprobe/jet.hpp"
#include "leviprobe/linalg.hpp"

namespace leviprobe {

// A local holomorphic coordinate chart about a boundary point, stored as a
// stack of exactly invertible steps. Each step maps NEW coordinates to OLD
// ones; the stack composed left to right maps chart coordinates to the
// ambient displacement from the base point. Three step kinds suffice for
// everything built here (linear maps, z-shears of z0, and z0-reparametri-
// zations); all are holomorphic polynomials with closed-form inverses, so
// point transport is exact to rounding while jets give the pullbacks.

struct LinearStep {
  Eigen::MatrixXcd fwd;  // old = fwd * new
  Eigen::MatrixXcd inv;
};

// old_0 = new_0 + S(new_z), old_z = new_z; S holomorphic in z only, O(2).
struct ShearStep {
  ComplexJet S;  // jet in the full 2n+2 real variables, independent of x0,y0
};

// old_0 = new_0 (1 + kappa . new_z) + gamma new_0^2, old_z = new_z.
struct Z0ReparamStep {
  Eigen::VectorXcd kappa;  // length n, coefficient of z_j
  std::complex<double> gamma;
};

using ChartStep = std::variant<LinearStep, ShearStep, Z0ReparamStep>;

namespace detail {

inline std::complex<double> eval_kappa(const Eigen::VectorXcd& kappa,
                                       const Eigen::VectorXcd& z) {
  std::complex<double> s = 0.0;
  for (int j = 0; j < kappa.size(); ++j) s += kappa[j] * z[j + 1];
  return s;
}

inline Eigen::VectorXcd step_to_old(const ChartStep& step, const Eigen::VectorXcd& u) {
  if (const auto* lin = std::get_if<LinearStep>(&step)) return lin->fwd * u;
  if (const auto* sh = std::get_if<ShearStep>(&step)) {
    Eigen::VectorXcd v = u;
    v[0] += sh->S.evaluate(to_real_vec(u));
    return v;
  }
  const auto& rp = std::get<Z0ReparamStep>(step);
  Eigen::VectorXcd v = u;
  std::complex<double> k = eval_kappa(rp.kappa, u);
  v[0] = u[0] * (1.0 + k) + rp.gamma * u[0] * u[0];
  return v;
}

inline Eigen::VectorXcd step_to_new(const ChartStep& step, const Eigen::VectorXcd& v) {
  if (const auto* lin = std::get_if<LinearStep>(&step)) return lin->inv * v;
  if (const auto* sh = std::get_if<ShearStep>(&step)) {
    Eigen::VectorXcd u = v;
    u[0] -= sh->S.evaluate(to_real_vec(v));  // z untouched, so exact
    return u;
  }
  const auto& rp = std::get<Z0ReparamStep>(step);
  Eigen::VectorXcd u = v;
  std::complex<double> a = 1.0 + eval_kappa(rp.kappa, v);
  if (rp.gamma == 0.0) {
    u[0] = v[0] / a;
    return u;
  }
  // gamma u0^2 + a u0 - v0 = 0, root continuous in v0 near 0
  std::complex<double> disc = std::sqrt(a * a + 4.0 * rp.gamma * v[0]);
  if (std::real(a / disc) < 0.0) disc = -disc;  // pick branch with disc ~ a
  u[0] = 2.0 * v[0] / (a + disc);
  return u;
}

// Components of the step's new->old map as complex jets in the new real
// variables.
inline std::vector<ComplexJet> step_jets(const ChartStep& step, int n, int degree) {
  const int nv = 2 * (n + 1);
  std::vector<ComplexJet> comp;
  comp.reserve(n + 1);
  if (const auto* lin = std::get_if<LinearStep>(&step)) {
    for (int i = 0; i <= n; ++i) {
      ComplexJet c(nv, degree);
      for (int j = 0; j <= n; ++j) {
        if (lin->fwd(i, j) == 0.0) continue;
        c += lin->fwd(i, j) * ComplexJet::z_variable(nv, degree, j);
      }
      comp.push_back(std::move(c));
    }
    return comp;
  }
  if (const auto* sh = std::get_if<ShearStep>(&step)) {
    ComplexJet z0 = ComplexJet::z_variable(nv, degree, 0);
    comp.push_back(z0 + sh->S.truncated(degree));
    for (int j = 1; j <= n; ++j) comp.push_back(ComplexJet::z_variable(nv, degree, j));
    return comp;
  }
  const auto& rp = std::get<Z0ReparamStep>(step);
  ComplexJet z0 = ComplexJet::z_variable(nv, degree, 0);
  ComplexJet kap = ComplexJet::constant(nv, degree, 1.0);
  for (int j = 0; j < rp.kappa.size(); ++j)
    kap += rp.kappa[j] * ComplexJet::z_variable(nv, degree, j + 1);
  comp.push_back(z0 * kap + rp.gamma * (z0 * z0));
  for (int j = 1; j <= n; ++j) comp.push_back(ComplexJet::z_variable(nv, degree, j));
  return comp;
}

inline Eigen::MatrixXcd step_linear(const ChartStep& step, int n) {
  if (const auto* lin = std::get_if<LinearStep>(&step)) return lin->fwd;
  return Eigen::MatrixXcd::Identity(n + 1, n + 1);
}

}  // namespace detail

// Chart adapted to a boundary point: base point in ambient coordinates plus
// the invertible step stack. Chart coordinates place the point at 0 with
// T_0(bM) = {Im z0 = 0} and T^c_0(bM) = {z0 = 0}; the domain side is
// Im z0 > f.
struct AdaptedChart {
  int n = 0;                    // ambient complex dimension is n+1
  Eigen::VectorXd base_point;   // 2n+2 real coordinates
  std::vector<ChartStep> steps;
  std::string provenance;

  int real_dim() const { return 2 * (n + 1); }

  Eigen::VectorXd to_ambient(const Eigen::VectorXd& chart_pt) const {
    Eigen::VectorXcd u = to_complex_vec(chart_pt);
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) u = detail::step_to_old(*it, u);
    return base_point + to_real_vec(u);
  }

  Eigen::VectorXd to_chart(const Eigen::VectorXd& ambient_pt) const {
    Eigen::VectorXcd v = to_complex_vec(Eigen::VectorXd(ambient_pt - base_point));
    for (const auto& s : steps) v = detail::step_to_new(s, v);
    return to_real_vec(v);
  }

  // Linear part of the composite new->old map.
  Eigen::MatrixXcd linear() const {
    Eigen::MatrixXcd L = Eigen::MatrixXcd::Identity(n + 1, n + 1);
    for (auto it = steps.rbegin(); it != steps.rend(); ++it)
      L = detail::step_linear(*it, n) * L;
    return L;
  }

  // Composite new->old map as real jets (interleaved components), vanishing
  // at 0.
  std::vector<Jet> map_jets(int degree) const {
    const int nv = real_dim();
    std::vector<Jet> comp;
    comp.reserve(nv);
    for (int i = 0; i < nv; ++i) comp.push_back(Jet::variable(nv, degree, i));
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
      std::vector<ComplexJet> sj = detail::step_jets(*it, n, degree);
      std::vector<Jet> next;
      next.reserve(nv);
      for (int j = 0; j <= n; ++j) {
        next.push_back(jet_compose(sj[j].re, comp));
        next.push_back(jet_compose(sj[j].im, comp));
      }
      comp = std::move(next);
    }
    return comp;
  }

  // Pullback of a jet based at the base point (in ambient displacement
  // variables) to chart coordinates.
  Jet pullback(const Jet& f, int degree = -1) const {
    int d = degree < 0 ? f.degree() : degree;
    std::vector<Jet> phi = map_jets(d);
    return jet_compose(f.truncated(d), phi);
  }

  // Push a polynomial vector field (components in ambient displacement
  // variables) into chart coordinates: v_chart(u) = (D phi)^{-1} v(phi(u)).
  std::vector<Jet> pushforward_field(const std::vector<Jet>& field, int degree) const {
    const int nv = real_dim();
    if (static_cast<int>(field.size()) != nv)
      throw ShapeError("pushforward_field: component count mismatch");
    std::vector<Jet> phi = map_jets(degree);
    JetMatrix jac(nv, JetVector(nv, Jet(nv, degree)));
    for (int i = 0; i < nv; ++i)
      for (int j = 0; j < nv; ++j) jac[i][j] = jet_derivative(phi[i], j);
    JetMatrix jac_inv = jet_matrix_inverse(jac);
    JetVector pulled;
    pulled.reserve(nv);
    for (const auto& comp : field) pulled.push_back(jet_compose(comp.truncated(degree), phi));
    return jet_matvec(jac_inv, pulled);
  }

  // Tangent vectors at the base point transform by the linear part.
  Eigen::VectorXd push_tangent(const Eigen::VectorXd& v_ambient) const {
    Eigen::MatrixXcd L = linear();
    Eigen::VectorXcd vc = to_complex_vec(v_ambient);
    return to_real_vec(Eigen::VectorXcd(L.fullPivLu().solve(vc)));
  }

  AdaptedChart composed_with(ChartStep further, const std::string& note) const {
    AdaptedChart c = *this;
    c.steps.push_back(std::move(further));
    if (!note.empty()) c.provenance += (c.provenance.empty() ? "" : "; ") + note;
    return c;
  }
};

}  // namespace leviprobe
