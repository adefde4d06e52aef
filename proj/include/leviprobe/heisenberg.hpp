#pragma once

#include <Eigen/Dense>
#include <complex>

#include "leviprobe/errors.hpp"

namespace leviprobe {

// Heisenberg group H_n = R x C^n with
//   (t, zeta) (t', zeta') = (t + t' + 2 Im(zeta . zeta'), zeta + zeta'),
// where zeta . zeta' = sum_j zeta_j conj(zeta'_j). Models the boundary of
// the Siegel domain {Im z0 > |z|^2}.
struct HeisenbergElement {
  double t = 0.0;
  Eigen::VectorXcd zeta;

  int n() const { return static_cast<int>(zeta.size()); }

  static HeisenbergElement identity(int n) {
    return {0.0, Eigen::VectorXcd::Zero(n)};
  }

  HeisenbergElement inverse() const { return {-t, -zeta}; }
};

inline std::complex<double> hermitian_dot(const Eigen::VectorXcd& a,
                                          const Eigen::VectorXcd& b) {
  std::complex<double> s = 0.0;
  for (int j = 0; j < a.size(); ++j) s += a[j] * std::conj(b[j]);
  return s;
}

inline HeisenbergElement heisenberg_mul(const HeisenbergElement& g,
                                        const HeisenbergElement& h) {
  if (g.n() != h.n()) throw ShapeError("heisenberg_mul: dimension mismatch");
  return {g.t + h.t + 2.0 * hermitian_dot(g.zeta, h.zeta).imag(),
          g.zeta + h.zeta};
}

// Affine holomorphic action on C^{n+1} = C(z0) x C^n(z):
//   (t, zeta) . z = (z0 + t + i|zeta|^2 + 2i sum z_j conj(zeta_j), z + zeta).
// Preserves Im z0 - |z|^2 exactly.
inline Eigen::VectorXcd heisenberg_act(const HeisenbergElement& g,
                                       const Eigen::VectorXcd& z) {
  if (z.size() != g.n() + 1) throw ShapeError("heisenberg_act: dimension mismatch");
  double norm2 = 0.0;
  for (int j = 0; j < g.n(); ++j) norm2 += std::norm(g.zeta[j]);
  std::complex<double> cross = 0.0;
  for (int j = 0; j < g.n(); ++j) cross += z[j + 1] * std::conj(g.zeta[j]);
  Eigen::VectorXcd out(z.size());
  out[0] = z[0] + g.t + std::complex<double>(0.0, 1.0) * (norm2 + 2.0 * cross);
  for (int j = 0; j < g.n(); ++j) out[j + 1] = z[j + 1] + g.zeta[j];
  return out;
}

}  // namespace leviprobe
