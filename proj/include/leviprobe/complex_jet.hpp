#pragma once

#include <complex>
#include <vector>

#include "leviprobe/jet.hpp"

namespace leviprobe {

using Complex = std::complex<double>;

// Complex-valued jet as a pair of real jets over the same real variables.
// Complex coordinates are modeled on interleaved real variables:
// z_j = x_{2j} + i x_{2j+1}.
struct ComplexJet {
  Jet re;
  Jet im;

  ComplexJet() = default;
  ComplexJet(Jet r, Jet i) : re(std::move(r)), im(std::move(i)) {
    re.check_shape(im, "ComplexJet");
  }
  ComplexJet(int nvars, int degree) : re(nvars, degree), im(nvars, degree) {}

  static ComplexJet constant(int nvars, int degree, Complex c) {
    return ComplexJet(Jet::constant(nvars, degree, c.real()),
                      Jet::constant(nvars, degree, c.imag()));
  }

  // The complex coordinate z_j over interleaved real variables.
  static ComplexJet z_variable(int nvars, int degree, int j) {
    return ComplexJet(Jet::variable(nvars, degree, 2 * j),
                      Jet::variable(nvars, degree, 2 * j + 1));
  }

  static ComplexJet from_real(Jet r) {
    Jet zero(r.nvars(), r.degree());
    return ComplexJet(std::move(r), std::move(zero));
  }

  int nvars() const { return re.nvars(); }
  int degree() const { return re.degree(); }

  Complex constant_term() const { return {re.constant_term(), im.constant_term()}; }

  ComplexJet conj() const { return ComplexJet(re, -im); }

  ComplexJet operator-() const { return ComplexJet(-re, -im); }

  ComplexJet& operator+=(const ComplexJet& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  ComplexJet& operator-=(const ComplexJet& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }

  friend ComplexJet operator+(ComplexJet a, const ComplexJet& b) { return a += b; }
  friend ComplexJet operator-(ComplexJet a, const ComplexJet& b) { return a -= b; }

  friend ComplexJet operator*(const ComplexJet& a, const ComplexJet& b) {
    return ComplexJet(jet_mul(a.re, b.re) - jet_mul(a.im, b.im),
                      jet_mul(a.re, b.im) + jet_mul(a.im, b.re));
  }

  friend ComplexJet operator*(Complex s, const ComplexJet& a) {
    return ComplexJet(a.re * s.real() - a.im * s.imag(),
                      a.re * s.imag() + a.im * s.real());
  }
  friend ComplexJet operator*(const ComplexJet& a, Complex s) { return s * a; }

  double max_abs_coeff() const { return std::max(re.max_abs_coeff(), im.max_abs_coeff()); }

  bool is_zero(double tol = kCoeffZeroTol, double scale = -1.0) const {
    double s = scale >= 0.0 ? scale : max_abs_coeff();
    return re.is_zero(tol, s) && im.is_zero(tol, s);
  }

  ComplexJet truncated(int d) const { return ComplexJet(re.truncated(d), im.truncated(d)); }

  Complex evaluate(const Eigen::VectorXd& x) const {
    return {jet_evaluate(re, x), jet_evaluate(im, x)};
  }
};

inline ComplexJet jet_compose(const ComplexJet& outer, const std::vector<Jet>& inners) {
  return ComplexJet(jet_compose(outer.re, inners), jet_compose(outer.im, inners));
}

}  // namespace leviprobe
