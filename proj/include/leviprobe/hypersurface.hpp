#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <complex>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "leviprobe/chart.hpp"
#include "leviprobe/complex_jet.hpp"
#include "leviprobe/errors.hpp"
#include "leviprobe/jet.hpp"
#include "leviprobe/linalg.hpp"

namespace leviprobe {

// Defining function of the boundary near one point. The jet lives at the
// base point (variables are ambient displacements); rho < 0 on the domain
// side. The optional numeric evaluator takes absolute ambient coordinates
// and backs the sampling checks.
struct DefiningFunction {
  int n = 0;  // ambient complex dimension n+1
  Jet rho;    // 2n+2 real variables, rho(0) = 0, grad != 0
  std::function<double(const Eigen::VectorXd&)> evaluator;
};

enum class LeviConvention {
  kStandard,   // Lambda = z0 - 2i P(z)
  kRotatedFS,  // Lambda = -i z0, used along Folland-Stein charts
};

struct LeviPolynomial {
  ComplexJet value;  // always the standard form z0 - 2i P(z), full variables
  LeviConvention convention = LeviConvention::kStandard;

  // Value used by the probe integrand: -i z0 form when rotated.
  Complex probe_evaluate(const Eigen::VectorXd& chart_pt) const {
    Complex w = value.evaluate(chart_pt);
    return convention == LeviConvention::kRotatedFS ? Complex(0, -1) * w : w;
  }
};

// Solved boundary equation Im z0 = f(Re z0, z) with its second-order split
// f_2 = x0 ell + 2 Re P + L. f lives in the 2n+1 variables
// (x0, x1, y1, ..., xn, yn).
struct GraphForm {
  int n = 0;
  Jet f;
  Eigen::VectorXd ell;   // linear form: coefficients of (x0, x1, y1, ...)
  Eigen::MatrixXcd P;    // symmetric n x n: P(z) = sum P_jk z_j z_k
  Eigen::MatrixXcd L;    // Hermitian n x n: L(z) = sum L_jk z_j conj(z_k)
  LeviPolynomial Lambda;
  Jet rho_chart;         // defining jet pulled back to the chart
};

namespace detail {

// index of z_j's real/imag part among f's variables (x0, x1, y1, ...)
inline int fx(int j) { return 2 * j - 1; }
inline int fy(int j) { return 2 * j; }

inline ComplexJet harmonic_part_jet(const Eigen::MatrixXcd& P, int nvars, int degree) {
  const int n = static_cast<int>(P.rows());
  ComplexJet acc(nvars, degree);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      if (P(j, k) == Complex(0, 0)) continue;
      acc += P(j, k) * (ComplexJet::z_variable(nvars, degree, j + 1) *
                        ComplexJet::z_variable(nvars, degree, k + 1));
    }
  return acc;
}

}  // namespace detail

inline ComplexJet levi_polynomial_jet(const Eigen::MatrixXcd& P, int n, int degree) {
  const int nv = 2 * (n + 1);
  ComplexJet z0 = ComplexJet::z_variable(nv, degree, 0);
  return z0 - Complex(0, 2) * detail::harmonic_part_jet(P, nv, degree);
}

// Deterministic adapted chart at p: the z0-axis is placed along the complex
// normal (unitary completion), scaled so the pulled-back defining function
// is -Im z0 + O(2).
inline AdaptedChart adapt_coordinates(const DefiningFunction& df, const Eigen::VectorXd& p,
                                      double tol = kCoeffZeroTol) {
  const int n = df.n;
  const int nv = 2 * (n + 1);
  if (df.rho.nvars() != nv) throw ShapeError("adapt_coordinates: rho variable count");
  double scale = 1.0 + df.rho.max_abs_coeff();
  if (std::abs(df.rho.constant_term()) > tol * scale)
    throw PreconditionError("adapt_coordinates: rho(p) != 0");

  Eigen::VectorXd gr = jet_gradient_at_zero(df.rho);
  if (gr.norm() <= tol * scale)
    throw SingularityError("adapt_coordinates: vanishing gradient, not a hypersurface point");

  Eigen::VectorXcd g(n + 1);
  for (int j = 0; j <= n; ++j) g[j] = Complex(gr[2 * j], -gr[2 * j + 1]) * 0.5;

  Eigen::VectorXcd e = g.conjugate() / g.norm();
  Eigen::MatrixXcd V = unitary_completion({e});  // columns: e, c_1, ..., c_n

  Eigen::MatrixXcd A(n + 1, n + 1);
  for (int j = 0; j <= n; ++j) A(0, j) = Complex(0, -2) * g[j];
  for (int k = 1; k <= n; ++k)
    for (int j = 0; j <= n; ++j) A(k, j) = std::conj(V(j, k));

  AdaptedChart chart;
  chart.n = n;
  chart.base_point = p;
  chart.steps.push_back(LinearStep{A.inverse(), A});
  chart.provenance = "adapt(normal completion)";
  return chart;
}

// Solve for Im z0 in the chart and split the second-order part.
inline GraphForm graph_form(const DefiningFunction& df, const AdaptedChart& chart,
                            double tol = kCoeffZeroTol) {
  const int n = chart.n;
  const int nv = 2 * (n + 1);
  Jet rho_c = chart.pullback(df.rho);
  double scale = 1.0 + rho_c.max_abs_coeff();

  // Chart must be adapted: plain gradient along -y0.
  Eigen::VectorXd gr = jet_gradient_at_zero(rho_c);
  if (gr[1] >= 0.0 || std::abs(gr[1]) <= tol * scale)
    throw PreconditionError("graph_form: chart not adapted (bad y0 orientation)");
  for (int i = 0; i < nv; ++i)
    if (i != 1 && std::abs(gr[i]) > tol * scale * std::abs(gr[1]) * 10.0)
      throw PreconditionError("graph_form: chart not adapted (gradient not normal)");

  Jet f = jet_graph_solve(rho_c, 1, tol);

  // f = O(2): clear rounding noise in constant and linear parts.
  double fscale = 1.0 + f.max_abs_coeff();
  {
    MultiIndex z = MultiIndex::zero(f.nvars());
    if (std::abs(f.coeff(z)) > tol * fscale)
      throw PreconditionError("graph_form: f has constant term");
    f.set_coeff(z, 0.0);
    for (int i = 0; i < f.nvars(); ++i) {
      MultiIndex u = MultiIndex::unit(f.nvars(), i);
      if (std::abs(f.coeff(u)) > tol * fscale)
        throw PreconditionError("graph_form: f has linear term, chart not adapted");
      f.set_coeff(u, 0.0);
    }
  }

  GraphForm gf;
  gf.n = n;
  gf.f = f;
  gf.rho_chart = rho_c;

  const int fnv = f.nvars();
  gf.ell = Eigen::VectorXd::Zero(fnv);
  for (int i = 0; i < fnv; ++i) {
    MultiIndex mi = MultiIndex::unit(fnv, 0).plus(MultiIndex::unit(fnv, i));
    gf.ell[i] = f.coeff(mi);
  }
  gf.ell[0] = f.coeff(MultiIndex::unit(fnv, 0).plus(MultiIndex::unit(fnv, 0)));

  gf.P = Eigen::MatrixXcd::Zero(n, n);
  gf.L = Eigen::MatrixXcd::Zero(n, n);
  auto mono2 = [&](int i, int j) {
    return f.coeff(MultiIndex::unit(fnv, i).plus(MultiIndex::unit(fnv, j)));
  };
  using detail::fx;
  using detail::fy;
  for (int a = 1; a <= n; ++a) {
    double Aaa = mono2(fx(a), fx(a));
    double Baa = mono2(fy(a), fy(a));
    double Caa = mono2(fx(a), fy(a));
    double pr = (Aaa - Baa) / 4.0;
    double pi = -Caa / 4.0;
    gf.P(a - 1, a - 1) = Complex(pr, pi);
    gf.L(a - 1, a - 1) = (Aaa + Baa) / 2.0;
    for (int b = a + 1; b <= n; ++b) {
      double Aab = mono2(fx(a), fx(b));
      double Bab = mono2(fy(a), fy(b));
      double Cab = mono2(fx(a), fy(b));
      double Cba = mono2(fx(b), fy(a));
      Complex p((Aab - Bab) / 8.0, -(Cab + Cba) / 8.0);
      Complex l((Aab + Bab) / 4.0, (Cba - Cab) / 4.0);
      gf.P(a - 1, b - 1) = p;
      gf.P(b - 1, a - 1) = p;
      gf.L(a - 1, b - 1) = l;
      gf.L(b - 1, a - 1) = std::conj(l);
    }
  }

  gf.Lambda.value = levi_polynomial_jet(gf.P, n, f.degree());
  gf.Lambda.convention = LeviConvention::kStandard;
  return gf;
}

// x0 ell + 2 Re P + L reassembled as a jet in f's variables; the second
// order part of f must reproduce it.
inline Jet second_order_reconstruction(const GraphForm& gf) {
  const int fnv = gf.f.nvars();
  const int deg = gf.f.degree();
  Jet out(fnv, deg);
  Jet x0 = Jet::variable(fnv, deg, 0);
  Jet lin(fnv, deg);
  for (int i = 0; i < fnv; ++i)
    if (gf.ell[i] != 0.0) lin.add_coeff(MultiIndex::unit(fnv, i), gf.ell[i]);
  out += jet_mul(x0, lin);

  // embed the z-part jets (full variables) into f's variable list
  const int nv = 2 * (gf.n + 1);
  ComplexJet P = detail::harmonic_part_jet(gf.P, nv, deg);
  Jet herm(nv, deg);
  for (int j = 0; j < gf.n; ++j)
    for (int k = 0; k < gf.n; ++k) {
      if (gf.L(j, k) == Complex(0, 0)) continue;
      ComplexJet t = gf.L(j, k) * (ComplexJet::z_variable(nv, deg, j + 1) *
                                   ComplexJet::z_variable(nv, deg, k + 1).conj());
      herm += t.re;
    }
  Jet zpart = P.re * 2.0 + herm;
  out += jet_remove_variable(zpart, 1);
  return out;
}

struct PseudoconvexityReport {
  Eigen::VectorXd eigenvalues;
  double min_eigenvalue = 0.0;
  bool pass = false;
};

inline PseudoconvexityReport check_strict_pseudoconvexity(const GraphForm& gf,
                                                          double tol = kCoeffZeroTol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gf.L);
  PseudoconvexityReport rep;
  rep.eigenvalues = es.eigenvalues();
  rep.min_eigenvalue = rep.eigenvalues.minCoeff();
  rep.pass = rep.min_eigenvalue > tol;
  return rep;
}

struct SupportCheckConfig {
  int samples = 10000;
  double radius = 0.1;
  std::uint64_t seed = 1;
  double origin_exclusion = 0.05;  // fraction of radius excluded around 0
  int radius_bisection_steps = 10;
};

struct SupportCheckReport {
  bool pass = false;
  double min_abs_lambda_boundary = 0.0;  // over boundary samples away from 0
  double min_cut_distance = 0.0;         // over interior samples
  int interior_samples = 0;
  int boundary_samples = 0;
  double max_passing_radius = 0.0;
};

namespace detail {

// distance from w to the closed ray {Re w = 0, Im w <= 0}
inline double cut_distance(Complex w) {
  if (w.imag() <= 0.0) return std::abs(w.real());
  return std::abs(w);
}

inline SupportCheckReport support_check_at_radius(const GraphForm& gf,
                                                  const DefiningFunction& df,
                                                  const AdaptedChart& chart,
                                                  const SupportCheckConfig& cfg,
                                                  double radius) {
  const int nv = 2 * (gf.n + 1);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  auto ball_point = [&](int dim) {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = gauss(rng);
    v *= radius * std::pow(unif(rng), 1.0 / dim) / v.norm();
    return v;
  };

  SupportCheckReport rep;
  rep.min_abs_lambda_boundary = std::numeric_limits<double>::infinity();
  rep.min_cut_distance = std::numeric_limits<double>::infinity();

  // interior samples: rejection from the chart ball
  for (int i = 0; i < cfg.samples && rep.interior_samples < cfg.samples / 2; ++i) {
    Eigen::VectorXd w = ball_point(nv);
    double rv = df.evaluator(chart.to_ambient(w));
    if (rv >= 0.0) continue;
    Complex lam = gf.Lambda.value.evaluate(w);
    rep.min_cut_distance = std::min(rep.min_cut_distance, cut_distance(lam));
    ++rep.interior_samples;
  }

  // boundary samples: bisect for rho = 0 along y0
  for (int i = 0; i < cfg.samples && rep.boundary_samples < cfg.samples / 2; ++i) {
    Eigen::VectorXd w = ball_point(nv);
    Eigen::VectorXd lo = w, hi = w;
    lo[1] = -radius;
    hi[1] = radius;
    double flo = df.evaluator(chart.to_ambient(lo));
    double fhi = df.evaluator(chart.to_ambient(hi));
    if (flo * fhi > 0.0) continue;
    for (int it = 0; it < 60; ++it) {
      Eigen::VectorXd mid = lo;
      mid[1] = 0.5 * (lo[1] + hi[1]);
      double fm = df.evaluator(chart.to_ambient(mid));
      if (fm == 0.0) {
        lo = mid;
        break;
      }
      if ((fm < 0.0) == (flo < 0.0)) {
        lo[1] = mid[1];
        flo = fm;
      } else {
        hi[1] = mid[1];
      }
    }
    Eigen::VectorXd q = lo;
    if (q.norm() <= cfg.origin_exclusion * radius) continue;
    Complex lam = gf.Lambda.value.evaluate(q);
    rep.min_abs_lambda_boundary = std::min(rep.min_abs_lambda_boundary, std::abs(lam));
    ++rep.boundary_samples;
  }

  rep.pass = rep.interior_samples > 0 && rep.boundary_samples > 0 &&
             rep.min_cut_distance > 0.0 && rep.min_abs_lambda_boundary > 1e-14;
  return rep;
}

}  // namespace detail

// Sampled verification of the support property: Lambda vanishes on the
// boundary only at 0 and misses the branch cut on the domain side. Also
// reports the largest radius (within cfg.radius) at which the check passes.
inline SupportCheckReport support_function_check(const GraphForm& gf,
                                                 const DefiningFunction& df,
                                                 const AdaptedChart& chart,
                                                 const SupportCheckConfig& cfg = {}) {
  if (!df.evaluator)
    throw UnsupportedError("support_function_check: no numeric evaluator available");
  SupportCheckReport rep = detail::support_check_at_radius(gf, df, chart, cfg, cfg.radius);
  if (rep.pass) {
    rep.max_passing_radius = cfg.radius;
    return rep;
  }
  double lo = 0.0, hi = cfg.radius;
  for (int i = 0; i < cfg.radius_bisection_steps; ++i) {
    double mid = 0.5 * (lo + hi);
    SupportCheckReport r = detail::support_check_at_radius(gf, df, chart, cfg, mid);
    if (r.pass)
      lo = mid;
    else
      hi = mid;
  }
  rep.max_passing_radius = lo;
  return rep;
}

struct FollandSteinResult {
  AdaptedChart chart;
  GraphForm gf;  // graph form in the normalized chart, rotated convention
};

// Normalize the chart so that f = |z|^2 + O(3) exactly at the jet level:
// (a) shear z0 by the harmonic part, (b) reduce the Levi form to the
// identity by its Hermitian square root, (c) absorb the x0-linear form into
// a z0 reparametrization.
inline FollandSteinResult folland_stein_chart(const DefiningFunction& df,
                                              const AdaptedChart& base,
                                              double tol = kCoeffZeroTol) {
  const int n = base.n;
  const int nv = 2 * (n + 1);
  AdaptedChart chart = base;
  GraphForm gf = graph_form(df, chart, tol);
  const int deg = gf.f.degree();

  PseudoconvexityReport pc = check_strict_pseudoconvexity(gf, tol);
  if (!pc.pass)
    throw PreconditionError("folland_stein_chart: Levi form not positive definite");

  // (a) kill the harmonic part
  if (gf.P.norm() > tol) {
    ComplexJet S = Complex(0, 2) * detail::harmonic_part_jet(gf.P, nv, deg);
    chart = chart.composed_with(ShearStep{S}, "fs:harmonic shear");
    gf = graph_form(df, chart, tol);
  }

  // (b) Levi form -> identity via Hermitian inverse square root
  if ((gf.L - Eigen::MatrixXcd::Identity(n, n)).norm() > tol) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gf.L);
    Eigen::VectorXd lam = es.eigenvalues();
    Eigen::MatrixXcd S0 = es.eigenvectors() *
                          lam.cwiseSqrt().cwiseInverse().asDiagonal() *
                          es.eigenvectors().adjoint();
    Eigen::MatrixXcd M = S0.conjugate();  // new Levi form = M^T L conj(M) = I
    Eigen::MatrixXcd fwd = Eigen::MatrixXcd::Identity(n + 1, n + 1);
    fwd.block(1, 1, n, n) = M;
    chart = chart.composed_with(LinearStep{fwd, fwd.inverse()}, "fs:levi sqrt");
    gf = graph_form(df, chart, tol);
  }

  // (c) absorb ell
  if (gf.ell.norm() > tol) {
    Eigen::VectorXcd kappa(n);
    for (int j = 1; j <= n; ++j)
      kappa[j - 1] = Complex(gf.ell[detail::fy(j)], gf.ell[detail::fx(j)]);
    Complex gamma(0.0, gf.ell[0]);
    chart = chart.composed_with(Z0ReparamStep{kappa, gamma}, "fs:ell absorb");
    gf = graph_form(df, chart, tol);
  }

  // Verify the normal form: degree-2 coefficients of f equal |z|^2.
  {
    Jet f2 = gf.f.homogeneous_part(2);
    const int fnv = gf.f.nvars();
    for (int j = 1; j <= n; ++j) {
      MultiIndex xx = MultiIndex::unit(fnv, detail::fx(j)).plus(MultiIndex::unit(fnv, detail::fx(j)));
      MultiIndex yy = MultiIndex::unit(fnv, detail::fy(j)).plus(MultiIndex::unit(fnv, detail::fy(j)));
      f2.add_coeff(xx, -1.0);
      f2.add_coeff(yy, -1.0);
    }
    if (!f2.is_zero(1e-10, 1.0 + gf.f.max_abs_coeff()))
      throw Error("folland_stein_chart: normal form verification failed");
  }

  gf.Lambda.convention = LeviConvention::kRotatedFS;
  FollandSteinResult out;
  out.chart = std::move(chart);
  out.gf = std::move(gf);
  return out;
}

}  // namespace leviprobe
