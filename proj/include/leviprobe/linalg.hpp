#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "leviprobe/errors.hpp"
#include "leviprobe/jet.hpp"

namespace leviprobe {

// Complex coordinates are interleaved into real ones: z_j = x_{2j} + i x_{2j+1}.

inline Eigen::VectorXcd to_complex_vec(const Eigen::VectorXd& x) {
  if (x.size() % 2 != 0) throw ShapeError("to_complex_vec: odd real dimension");
  Eigen::VectorXcd z(x.size() / 2);
  for (int j = 0; j < z.size(); ++j) z[j] = std::complex<double>(x[2 * j], x[2 * j + 1]);
  return z;
}

inline Eigen::VectorXd to_real_vec(const Eigen::VectorXcd& z) {
  Eigen::VectorXd x(2 * z.size());
  for (int j = 0; j < z.size(); ++j) {
    x[2 * j] = z[j].real();
    x[2 * j + 1] = z[j].imag();
  }
  return x;
}

// Real 2m x 2m representation of a complex m x m matrix acting on
// interleaved coordinates.
inline Eigen::MatrixXd real_rep(const Eigen::MatrixXcd& C) {
  Eigen::MatrixXd R(2 * C.rows(), 2 * C.cols());
  for (int j = 0; j < C.rows(); ++j)
    for (int k = 0; k < C.cols(); ++k) {
      R(2 * j, 2 * k) = C(j, k).real();
      R(2 * j, 2 * k + 1) = -C(j, k).imag();
      R(2 * j + 1, 2 * k) = C(j, k).imag();
      R(2 * j + 1, 2 * k + 1) = C(j, k).real();
    }
  return R;
}

// Standard complex structure on interleaved coordinates: J d/dx = d/dy,
// J d/dy = -d/dx.
inline Eigen::MatrixXd complex_structure(int m) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  for (int j = 0; j < m; ++j) {
    J(2 * j, 2 * j + 1) = -1.0;
    J(2 * j + 1, 2 * j) = 1.0;
  }
  return J;
}

// Deterministic unitary with prescribed first columns: Gram-Schmidt over the
// given vectors followed by standard basis vectors, skipping near-dependent
// candidates. Vectors must be linearly independent over C.
inline Eigen::MatrixXcd unitary_completion(const std::vector<Eigen::VectorXcd>& lead) {
  if (lead.empty()) throw ShapeError("unitary_completion: no leading vectors");
  const int m = static_cast<int>(lead.front().size());
  std::vector<Eigen::VectorXcd> cols;
  auto try_add = [&](Eigen::VectorXcd v, bool required) {
    for (const auto& c : cols) v -= c.dot(v) * c;  // Eigen dot conjugates the left arg
    double norm = v.norm();
    if (norm < 1e-9) {
      if (required)
        throw SingularityError("unitary_completion: dependent leading vectors");
      return;
    }
    cols.push_back(v / norm);
  };
  for (const auto& v : lead) try_add(v, true);
  for (int j = 0; j < m && static_cast<int>(cols.size()) < m; ++j)
    try_add(Eigen::VectorXcd::Unit(m, j), false);
  if (static_cast<int>(cols.size()) != m)
    throw SingularityError("unitary_completion: completion failed");
  Eigen::MatrixXcd U(m, m);
  for (int j = 0; j < m; ++j) U.col(j) = cols[j];
  return U;
}

// Deterministic pairwise (tree) summation; fixed reduction order makes
// parallel variants reproducible.
template <typename T>
T pairwise_sum(const std::vector<T>& v) {
  if (v.empty()) return T{};
  std::vector<T> level(v);
  while (level.size() > 1) {
    std::vector<T> next;
    next.reserve((level.size() + 1) / 2);
    for (size_t i = 0; i + 1 < level.size(); i += 2) next.push_back(level[i] + level[i + 1]);
    if (level.size() % 2 == 1) next.push_back(level.back());
    level = std::move(next);
  }
  return level.front();
}

// --- jet-valued matrices ----------------------------------------------------

using JetMatrix = std::vector<std::vector<Jet>>;
using JetVector = std::vector<Jet>;

inline JetMatrix jet_matrix_identity(int m, int nvars, int degree) {
  JetMatrix M(m, JetVector(m, Jet(nvars, degree)));
  for (int i = 0; i < m; ++i) M[i][i] = Jet::constant(nvars, degree, 1.0);
  return M;
}

inline JetMatrix jet_matmul(const JetMatrix& A, const JetMatrix& B) {
  const int r = static_cast<int>(A.size());
  const int k = static_cast<int>(B.size());
  const int c = static_cast<int>(B.front().size());
  JetMatrix R(r, JetVector(c, Jet(A[0][0].nvars(), A[0][0].degree())));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j)
      for (int l = 0; l < k; ++l) R[i][j] += jet_mul(A[i][l], B[l][j]);
  return R;
}

inline JetVector jet_matvec(const JetMatrix& A, const JetVector& v) {
  JetVector r(A.size(), Jet(v[0].nvars(), v[0].degree()));
  for (size_t i = 0; i < A.size(); ++i)
    for (size_t j = 0; j < v.size(); ++j) r[i] += jet_mul(A[i][j], v[j]);
  return r;
}

// Inverse of a jet matrix whose value at 0 is invertible, via the Neumann
// series of the nilpotent part (degree-graded, so truncation makes it exact).
inline JetMatrix jet_matrix_inverse(const JetMatrix& M) {
  const int m = static_cast<int>(M.size());
  const int nvars = M[0][0].nvars();
  const int degree = M[0][0].degree();
  Eigen::MatrixXd L(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) L(i, j) = M[i][j].constant_term();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(L);
  if (!lu.isInvertible()) throw SingularityError("jet_matrix_inverse: singular value at 0");
  Eigen::MatrixXd Linv = lu.inverse();

  // N = L^{-1} M - I vanishes at 0.
  JetMatrix N(m, JetVector(m, Jet(nvars, degree)));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      Jet acc(nvars, degree);
      for (int l = 0; l < m; ++l) acc += M[l][j] * Linv(i, l);
      if (i == j) acc -= Jet::constant(nvars, degree, 1.0);
      N[i][j] = std::move(acc);
    }

  JetMatrix series = jet_matrix_identity(m, nvars, degree);
  JetMatrix power = jet_matrix_identity(m, nvars, degree);
  for (int k = 1; k <= degree; ++k) {
    power = jet_matmul(power, N);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) series[i][j] += (k % 2 == 0 ? 1.0 : -1.0) * power[i][j];
  }
  // inv = series * L^{-1}
  JetMatrix R(m, JetVector(m, Jet(nvars, degree)));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      Jet acc(nvars, degree);
      for (int l = 0; l < m; ++l) acc += series[i][l] * Linv(l, j);
      R[i][j] = std::move(acc);
    }
  return R;
}

}  // namespace leviprobe
