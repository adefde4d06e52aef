#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <functional>
#include <optional>
#include <vector>

#include "leviprobe/chart.hpp"
#include "leviprobe/heisenberg.hpp"
#include "leviprobe/hypersurface.hpp"
#include "leviprobe/jet.hpp"
#include "leviprobe/linalg.hpp"

namespace leviprobe {

// Local model of a Lie group action near the base point: d generator vector
// fields given as polynomial jets in the ambient displacement variables,
// plus (for the builtin scenarios) a closed-form action in absolute ambient
// coordinates. The action callable takes exponential parameters of the
// second kind over the generator list.
struct GroupModel {
  int n = 0;    // ambient complex dimension n+1
  int dim = 0;  // d
  std::vector<std::vector<Jet>> generators;  // d fields, 2n+2 components each
  bool commuting = false;
  std::function<Eigen::VectorXd(const Eigen::VectorXd& params,
                                const Eigen::VectorXd& point)>
      action;
};

struct OrbitTangentReport {
  Eigen::MatrixXd basis;  // (2n+2) x d, generator values at the point
  Eigen::VectorXd singular_values;
  int rank = 0;
  bool free_action = true;  // rank == d at the configured threshold
};

// Evaluate the generator fields at a displacement q from the base point and
// certify their rank.
inline OrbitTangentReport orbit_tangent(const GroupModel& G, const Eigen::VectorXd& q,
                                        double tol = kCoeffZeroTol) {
  const int nv = 2 * (G.n + 1);
  OrbitTangentReport rep;
  rep.basis.resize(nv, G.dim);
  for (int k = 0; k < G.dim; ++k)
    for (int i = 0; i < nv; ++i) rep.basis(i, k) = jet_evaluate(G.generators[k][i], q);
  if (G.dim == 0) {
    rep.rank = 0;
    rep.free_action = true;
    return rep;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rep.basis);
  rep.singular_values = svd.singularValues();
  double top = rep.singular_values.size() ? rep.singular_values[0] : 0.0;
  rep.rank = 0;
  for (int i = 0; i < rep.singular_values.size(); ++i)
    if (rep.singular_values[i] > tol * std::max(1.0, top)) ++rep.rank;
  rep.free_action = rep.rank == G.dim;
  return rep;
}

inline OrbitTangentReport orbit_tangent(const GroupModel& G, double tol = kCoeffZeroTol) {
  return orbit_tangent(G, Eigen::VectorXd::Zero(2 * (G.n + 1)), tol);
}

struct TangencyReport {
  bool tangent = false;
  double max_relative_residual = 0.0;  // residual after projecting to T^c
  std::vector<double> residuals;       // per generator
};

// T_p(G p) subset T^c_p(bM): in chart coordinates T^c = {z0 = 0}, so each
// generator must have vanishing components along x0, y0.
inline TangencyReport check_tangency(const GroupModel& G, const AdaptedChart& chart,
                                     double tol = kCoeffZeroTol) {
  OrbitTangentReport ot = orbit_tangent(G, tol);
  TangencyReport rep;
  rep.max_relative_residual = 0.0;
  for (int k = 0; k < G.dim; ++k) {
    Eigen::VectorXd v = chart.push_tangent(ot.basis.col(k));
    double rel = std::hypot(v[0], v[1]) / std::max(v.norm(), 1e-300);
    rep.residuals.push_back(rel);
    rep.max_relative_residual = std::max(rep.max_relative_residual, rel);
  }
  rep.tangent = rep.max_relative_residual <= tol;
  return rep;
}

struct TotallyRealReport {
  bool totally_real = false;
  int orbit_dim = 0;
  int intersection_dim = 0;  // dim(T intersect J T)
  bool dim_bound_ok = false;  // d <= n
  Eigen::VectorXd stacked_singular_values;
};

// T intersect J T = 0 iff [T | JT] has rank 2d.
inline TotallyRealReport check_totally_real(const GroupModel& G,
                                            double tol = kCoeffZeroTol) {
  OrbitTangentReport ot = orbit_tangent(G, tol);
  const int nv = 2 * (G.n + 1);
  Eigen::MatrixXd stacked(nv, 2 * G.dim);
  Eigen::MatrixXd J = complex_structure(G.n + 1);
  stacked.leftCols(G.dim) = ot.basis;
  stacked.rightCols(G.dim) = J * ot.basis;
  TotallyRealReport rep;
  rep.orbit_dim = G.dim;
  if (G.dim == 0) {
    rep.totally_real = true;
    rep.dim_bound_ok = true;
    return rep;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked);
  rep.stacked_singular_values = svd.singularValues();
  double top = rep.stacked_singular_values[0];
  int rank = 0;
  for (int i = 0; i < rep.stacked_singular_values.size(); ++i)
    if (rep.stacked_singular_values[i] > tol * std::max(1.0, top)) ++rank;
  rep.intersection_dim = 2 * G.dim - rank;
  rep.totally_real = rep.intersection_dim == 0;
  rep.dim_bound_ok = G.dim <= G.n;
  return rep;
}

// Orbit context after aligning the chart's z-coordinates with the orbit
// tangent frame: T_0(pi(O)) = span{d/dx_1..d/dx_m} and the Folland-Stein
// normal form is preserved (the aligning map is unitary).
struct AlignedOrbit {
  AdaptedChart chart;
  GraphForm gf;
  GroupModel group;        // generators rebased so generator k points along x_k
  Eigen::MatrixXd rebase;  // m x d real, aligned_k = sum rebase(k,j) original_j
};

// Requires the orbit tangent frame to be isotropic for the normalized Levi
// metric (automatic for group orbits tangent to T^c of an invariant
// boundary); otherwise no unitary alignment exists.
inline AlignedOrbit align_orbit(const GroupModel& G, const DefiningFunction& df,
                                const AdaptedChart& fs_chart,
                                double tol = kCoeffZeroTol) {
  const int n = G.n;
  const int d = G.dim;
  OrbitTangentReport ot = orbit_tangent(G, tol);
  if (!ot.free_action)
    throw PreconditionError("align_orbit: generators not independent at the point");

  // z-parts of the chart-transformed tangent vectors
  std::vector<Eigen::VectorXcd> tau;
  for (int k = 0; k < d; ++k) {
    Eigen::VectorXd v = fs_chart.push_tangent(ot.basis.col(k));
    Eigen::VectorXcd vc = to_complex_vec(v);
    tau.push_back(vc.tail(n));
  }

  // isotropy: the Hermitian Gram matrix must be real
  Eigen::MatrixXcd gram(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) gram(j, k) = hermitian_dot(tau[j], tau[k]);
  if (gram.imag().cwiseAbs().maxCoeff() > tol * (1.0 + gram.cwiseAbs().maxCoeff()))
    throw PreconditionError(
        "align_orbit: orbit tangent frame is not isotropic for the Levi metric");

  // real Gram-Schmidt (coefficients are real because the Gram matrix is)
  Eigen::MatrixXd rebase = Eigen::MatrixXd::Identity(d, d);
  std::vector<Eigen::VectorXcd> ortho;
  for (int k = 0; k < d; ++k) {
    Eigen::VectorXcd v = tau[k];
    Eigen::VectorXd coeff = Eigen::VectorXd::Zero(d);
    coeff[k] = 1.0;
    for (int j = 0; j < static_cast<int>(ortho.size()); ++j) {
      double proj = hermitian_dot(ortho[j], v).real();
      v -= proj * ortho[j];
      coeff -= proj * rebase.row(j).transpose();
    }
    double norm = v.norm();
    if (norm <= tol)
      throw PreconditionError("align_orbit: dependent tangent frame");
    ortho.push_back(v / norm);
    rebase.row(k) = coeff.transpose() / norm;
  }

  Eigen::MatrixXcd V = unitary_completion(ortho);  // columns start with the frame
  Eigen::MatrixXcd fwd = Eigen::MatrixXcd::Identity(n + 1, n + 1);
  fwd.block(1, 1, n, n) = V;

  AlignedOrbit out;
  out.chart = fs_chart.composed_with(LinearStep{fwd, fwd.adjoint()}, "orbit align");
  out.gf = graph_form(df, out.chart, tol);
  out.gf.Lambda.convention = LeviConvention::kRotatedFS;
  out.rebase = rebase;

  out.group.n = n;
  out.group.dim = d;
  out.group.commuting = G.commuting;
  const int nv = 2 * (n + 1);
  for (int k = 0; k < d; ++k) {
    std::vector<Jet> comp;
    for (int i = 0; i < nv; ++i) {
      Jet acc = G.generators[0][i] * rebase(k, 0);
      for (int j = 1; j < d; ++j) acc += G.generators[j][i] * rebase(k, j);
      comp.push_back(std::move(acc));
    }
    out.group.generators.push_back(std::move(comp));
  }
  if (G.action && G.commuting) {
    Eigen::MatrixXd Rt = rebase.transpose();
    auto base_action = G.action;
    out.group.action = [base_action, Rt](const Eigen::VectorXd& params,
                                         const Eigen::VectorXd& point) {
      return base_action(Rt * params, point);
    };
  }
  return out;
}

// Orbit chart of section-style normal form: parametrization P(xi) with
// x'_j(P(xi)) = xi_j exactly, plus the extracted graph data h, g1, g2.
struct OrbitChart {
  int m = 0;
  int n = 0;
  Jet h;                // m variables
  std::vector<Jet> g1;  // n-m entries
  std::vector<Jet> g2;  // n entries
  std::vector<Jet> P;   // 2n+2 chart components as jets in xi
};

namespace detail {

// One Picard flow leg: start jets X (independent of xi_k), field u given as
// jets in the chart variables; returns the flow at time xi_k.
inline std::vector<Jet> picard_flow(const std::vector<Jet>& X,
                                    const std::vector<Jet>& field, int time_var) {
  const int deg = X.front().degree();
  std::vector<Jet> Y = X;
  for (int it = 0; it <= deg; ++it) {
    std::vector<Jet> rhs;
    rhs.reserve(field.size());
    for (const auto& comp : field) rhs.push_back(jet_compose(comp, Y));
    for (size_t i = 0; i < Y.size(); ++i)
      Y[i] = X[i] + jet_antiderivative(rhs[i], time_var);
  }
  return Y;
}

}  // namespace detail

// Jet of xi -> exp(xi_1 v_1) ... exp(xi_m v_m) . 0 in the aligned chart,
// reparametrized so the x'-components are exactly xi.
inline OrbitChart orbit_chart(const AlignedOrbit& ctx, int degree,
                              double tol = kCoeffZeroTol) {
  const int n = ctx.group.n;
  const int m = ctx.group.dim;
  const int nv = 2 * (n + 1);
  if (degree < 3)
    throw InsufficientDegreeError("orbit_chart: degree must be >= 3 for order checks");

  std::vector<std::vector<Jet>> fields;
  for (int k = 0; k < m; ++k)
    fields.push_back(ctx.chart.pushforward_field(ctx.group.generators[k], degree));

  std::vector<Jet> X(nv, Jet(m, degree));
  for (int k = m - 1; k >= 0; --k) X = detail::picard_flow(X, fields[k], k);

  // x'(xi) should already be xi + O(2); invert it exactly on jets
  std::vector<Jet> phi;
  for (int j = 1; j <= m; ++j) phi.push_back(X[2 * j]);
  Eigen::MatrixXd A0(m, m);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) A0(j, k) = phi[j].coeff(MultiIndex::unit(m, k));
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A0);
  if (!lu.isInvertible())
    throw SingularityError("orbit_chart: degenerate projected parametrization");
  Eigen::MatrixXd A0inv = lu.inverse();

  std::vector<Jet> psi;
  for (int j = 0; j < m; ++j) {
    Jet lin(m, degree);
    for (int k = 0; k < m; ++k)
      if (A0inv(j, k) != 0.0) lin.add_coeff(MultiIndex::unit(m, k), A0inv(j, k));
    psi.push_back(std::move(lin));
  }
  for (int it = 0; it < degree; ++it) {
    // psi <- psi - A0^{-1} (phi(psi) - id)
    std::vector<Jet> err;
    for (int j = 0; j < m; ++j) {
      Jet e = jet_compose(phi[j], psi);
      e -= Jet::variable(m, degree, j);
      err.push_back(std::move(e));
    }
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) psi[j] -= err[k] * A0inv(j, k);
  }

  OrbitChart oc;
  oc.m = m;
  oc.n = n;
  oc.P.reserve(nv);
  for (int i = 0; i < nv; ++i) oc.P.push_back(jet_compose(X[i], psi));
  oc.h = oc.P[0];
  for (int j = m + 1; j <= n; ++j) oc.g1.push_back(oc.P[2 * j]);
  for (int j = 1; j <= n; ++j) oc.g2.push_back(oc.P[2 * j + 1]);

  // sanity: x' components reproduce xi, g1/g2 vanish to first order
  for (int j = 1; j <= m; ++j) {
    Jet d = oc.P[2 * j] - Jet::variable(m, degree, j - 1);
    if (!d.is_zero(tol, 1.0)) throw Error("orbit_chart: reparametrization failed");
  }
  auto first_order_zero = [&](const Jet& g) {
    if (std::abs(g.constant_term()) > tol) return false;
    for (int k = 0; k < m; ++k)
      if (std::abs(g.coeff(MultiIndex::unit(m, k))) > tol) return false;
    return true;
  };
  for (const auto& g : oc.g1)
    if (!first_order_zero(g)) throw Error("orbit_chart: g1 has first-order terms");
  for (const auto& g : oc.g2)
    if (!first_order_zero(g)) throw Error("orbit_chart: g2 has first-order terms");
  return oc;
}

struct Order3Report {
  bool satisfied = false;
  double max_low_order_coeff = 0.0;  // largest |coefficient| of degree <= 2
  Jet restricted;                    // Re Lambda along the orbit
};

// Restrict Re Lambda (standard convention) along the orbit parametrization
// and require all terms of total degree <= 2 to vanish.
inline Order3Report check_order3(const OrbitChart& oc, const GraphForm& gf,
                                 double tol = kCoeffZeroTol) {
  if (oc.P.empty() || oc.P.front().degree() < 3)
    throw InsufficientDegreeError("check_order3: orbit chart degree < 3");
  Jet re_lambda = gf.Lambda.value.re;
  Order3Report rep;
  rep.restricted = jet_compose(re_lambda, oc.P);
  for (const auto& [mi, v] : rep.restricted.terms())
    if (mi.degree() <= 2)
      rep.max_low_order_coeff = std::max(rep.max_low_order_coeff, std::abs(v));
  double scale = 1.0 + std::max(gf.f.max_abs_coeff(), rep.restricted.max_abs_coeff());
  rep.satisfied = rep.max_low_order_coeff <= tol * scale;
  return rep;
}

struct CgLocusReport {
  std::vector<Jet> defining;  // <v_j, J grad phi> as jets, one per generator
  Eigen::MatrixXd gradients;  // gradient at 0 of each defining jet (columns)
  bool transversal = false;
  bool phi_normal_form_ok = false;
};

// Tangency locus C_G of an invariant exhaustion phi = sum y_j^2 + O(3): the
// zero sets of the pairings <v_j(q), J grad phi(q)>.
inline CgLocusReport cg_locus(const Jet& phi, const GroupModel& G,
                              double tol = kCoeffZeroTol) {
  const int nv = phi.nvars();
  if (nv % 2 != 0) throw ShapeError("cg_locus: phi must live in paired variables");
  const int N = nv / 2;

  CgLocusReport rep;
  // normal form check: phi = sum y_j^2 + O(3)
  rep.phi_normal_form_ok = true;
  Jet quad = phi.truncated(2);
  for (int j = 0; j < N; ++j)
    quad.add_coeff(MultiIndex::unit(nv, 2 * j + 1).plus(MultiIndex::unit(nv, 2 * j + 1)),
                   -1.0);
  if (!quad.is_zero(tol, 1.0 + phi.max_abs_coeff())) rep.phi_normal_form_ok = false;
  if (!rep.phi_normal_form_ok)
    throw PreconditionError("cg_locus: phi lacks the sum-of-y^2 normal form");

  // J grad phi: x_k component = -dphi/dy_k, y_k component = +dphi/dx_k
  std::vector<Jet> jgrad(nv, Jet(nv, phi.degree()));
  for (int k = 0; k < N; ++k) {
    jgrad[2 * k] = -jet_derivative(phi, 2 * k + 1);
    jgrad[2 * k + 1] = jet_derivative(phi, 2 * k);
  }

  rep.gradients.resize(nv, G.dim);
  for (int k = 0; k < G.dim; ++k) {
    Jet pairing(nv, phi.degree());
    for (int i = 0; i < nv; ++i) pairing += jet_mul(G.generators[k][i], jgrad[i]);
    rep.gradients.col(k) = jet_gradient_at_zero(pairing);
    rep.defining.push_back(std::move(pairing));
  }

  if (G.dim > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rep.gradients);
    double top = svd.singularValues()[0];
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] > tol * std::max(1.0, top)) ++rank;
    rep.transversal = rank == G.dim;
  }
  return rep;
}

}  // namespace leviprobe
