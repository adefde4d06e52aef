#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "leviprobe/complex_jet.hpp"
#include "leviprobe/jet.hpp"

using namespace leviprobe;

namespace {

MultiIndex mi(std::vector<int> e) { return MultiIndex(std::move(e)); }

// Random jet with small integer coefficients so that ring identities hold
// without rounding error.
Jet random_int_jet(std::mt19937_64& rng, int nvars, int degree, double density = 0.5) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> coeff(-3, 3);
  Jet j(nvars, degree);
  // enumerate all multi-indices up to degree
  std::vector<int> e(nvars, 0);
  std::function<void(int, int)> rec = [&](int pos, int remaining) {
    if (pos == nvars) {
      if (u(rng) < density) j.set_coeff(MultiIndex(e), static_cast<double>(coeff(rng)));
      return;
    }
    for (int k = 0; k <= remaining; ++k) {
      e[pos] = k;
      rec(pos + 1, remaining - k);
    }
    e[pos] = 0;
  };
  rec(0, degree);
  return j;
}

double max_abs_diff(const Jet& a, const Jet& b) {
  Jet d = a - b;
  return d.max_abs_coeff();
}

}  // namespace

TEST_CASE("jet_mul matches hand expansions") {
  // (1+x)(1-x), D=2 -> 1 - x^2
  Jet one_px = Jet::constant(1, 2, 1.0) + Jet::variable(1, 2, 0);
  Jet one_mx = Jet::constant(1, 2, 1.0) - Jet::variable(1, 2, 0);
  Jet p = jet_mul(one_px, one_mx);
  CHECK(p.coeff(mi({0})) == 1.0);
  CHECK(p.coeff(mi({1})) == 0.0);
  CHECK(p.coeff(mi({2})) == -1.0);

  // same product at D=1 drops the square
  Jet a1 = Jet::constant(1, 1, 1.0) + Jet::variable(1, 1, 0);
  Jet b1 = Jet::constant(1, 1, 1.0) - Jet::variable(1, 1, 0);
  Jet p1 = jet_mul(a1, b1);
  CHECK(p1.coeff(mi({0})) == 1.0);
  CHECK(p1.coeff(mi({1})) == 0.0);
  CHECK(p1.term_count() == 1);

  // (1+x+y)^2, D=2 -> 1+2x+2y+x^2+2xy+y^2
  Jet s = Jet::constant(2, 2, 1.0) + Jet::variable(2, 2, 0) + Jet::variable(2, 2, 1);
  Jet sq = jet_mul(s, s);
  CHECK(sq.coeff(mi({0, 0})) == 1.0);
  CHECK(sq.coeff(mi({1, 0})) == 2.0);
  CHECK(sq.coeff(mi({0, 1})) == 2.0);
  CHECK(sq.coeff(mi({2, 0})) == 1.0);
  CHECK(sq.coeff(mi({1, 1})) == 2.0);
  CHECK(sq.coeff(mi({0, 2})) == 1.0);
}

TEST_CASE("jet_mul rejects shape mismatches") {
  Jet a(2, 3), b(3, 3), c(2, 2);
  CHECK_THROWS_AS(jet_mul(a, b), ShapeError);
  CHECK_THROWS_AS(jet_mul(a, c), ShapeError);
}

TEST_CASE("jet_compose matches hand expansions") {
  // outer = x^2, inner = x+y, D=2 -> x^2 + 2xy + y^2
  Jet outer(1, 2);
  outer.set_coeff(mi({2}), 1.0);
  Jet inner = Jet::variable(2, 2, 0) + Jet::variable(2, 2, 1);
  Jet comp = jet_compose(outer, {inner});
  CHECK(comp.coeff(mi({2, 0})) == 1.0);
  CHECK(comp.coeff(mi({1, 1})) == 2.0);
  CHECK(comp.coeff(mi({0, 2})) == 1.0);

  // identity composition
  std::mt19937_64 rng(7);
  Jet f = random_int_jet(rng, 3, 3);
  std::vector<Jet> id;
  for (int i = 0; i < 3; ++i) id.push_back(Jet::variable(3, 3, i));
  // constant term must vanish for composition at the base point
  f.set_coeff(MultiIndex::zero(3), 0.0);
  CHECK(max_abs_diff(jet_compose(f, id), f) == 0.0);
}

TEST_CASE("jet_compose exp(log(1+x)) = 1+x through degree 4") {
  const int D = 4;
  Jet expj(1, D), logj(1, D);
  double fact = 1.0;
  for (int k = 0; k <= D; ++k) {
    if (k > 0) fact *= k;
    expj.set_coeff(mi({k}), 1.0 / fact);
  }
  for (int k = 1; k <= D; ++k)
    logj.set_coeff(mi({k}), (k % 2 == 1 ? 1.0 : -1.0) / k);
  Jet comp = jet_compose(expj, {logj});
  CHECK(std::abs(comp.coeff(mi({0})) - 1.0) <= 1e-15);
  CHECK(std::abs(comp.coeff(mi({1})) - 1.0) <= 1e-15);
  for (int k = 2; k <= D; ++k) CHECK(std::abs(comp.coeff(mi({k}))) <= 1e-15);
}

TEST_CASE("jet_compose rejects inner with constant term") {
  Jet outer = Jet::variable(1, 2, 0);
  Jet inner = Jet::constant(1, 2, 0.5) + Jet::variable(1, 2, 0);
  CHECK_THROWS_AS(jet_compose(outer, {inner}), DomainError);
}

TEST_CASE("jet_graph_solve explicit and implicit cases") {
  // variables ordered (y0, x1, y1)
  const int D = 4;
  Jet y0 = Jet::variable(3, D, 0), x1 = Jet::variable(3, D, 1), y1 = Jet::variable(3, D, 2);

  // rho = y0 - (x1^2 + y1^2): already explicit
  Jet rho = y0 - (x1 * x1 + y1 * y1);
  Jet f = jet_graph_solve(rho, 0);
  REQUIRE(f.nvars() == 2);
  CHECK(f.coeff(mi({2, 0})) == 1.0);
  CHECK(f.coeff(mi({0, 2})) == 1.0);
  CHECK(f.term_count() == 2);

  // rho = y0 - (x1^2+y1^2) - y0^2, D=4 -> f = q + q^2 with q = x1^2+y1^2
  Jet rho2 = y0 - (x1 * x1 + y1 * y1) - y0 * y0;
  Jet f2 = jet_graph_solve(rho2, 0);
  Jet q(2, D);
  q.set_coeff(mi({2, 0}), 1.0);
  q.set_coeff(mi({0, 2}), 1.0);
  Jet expect = q + jet_mul(q, q);
  CHECK(max_abs_diff(f2, expect) <= 1e-14);

  // linear case rho = 2 y0 - x1
  Jet rho3 = 2.0 * y0 - x1;
  Jet f3 = jet_graph_solve(rho3, 0);
  CHECK(std::abs(f3.coeff(mi({1, 0})) - 0.5) <= 1e-16);
  CHECK(f3.term_count() == 1);

  // degenerate linear part
  Jet bad = x1 * x1;
  CHECK_THROWS_AS(jet_graph_solve(bad, 0), SingularityError);
}

TEST_CASE("jet_graph_solve consistency on random implicit equations") {
  std::mt19937_64 rng(20240811);
  for (int trial = 0; trial < 100; ++trial) {
    int nv = 2 + static_cast<int>(rng() % 3);  // 2..4 variables
    int D = 3 + static_cast<int>(rng() % 2);   // degree 3..4
    int var = static_cast<int>(rng() % nv);
    Jet rho = random_int_jet(rng, nv, D, 0.4);
    rho.set_coeff(MultiIndex::zero(nv), 0.0);
    rho.set_coeff(MultiIndex::unit(nv, var), (rng() % 2 ? 1.0 : -2.0));
    Jet f = jet_graph_solve(rho, var);
    Jet f_full = jet_insert_variable(f, var);
    Jet back = jet_substitute(rho, var, f_full);
    INFO("trial " << trial);
    CHECK(back.max_abs_coeff() <= 1e-10 * (1.0 + rho.max_abs_coeff()));
  }
}

TEST_CASE("jet_linear_change hand cases and inverse roundtrip") {
  const int D = 3;
  // f = x^2, T(x,y) = (y,-x) -> y^2
  Jet f(2, D);
  f.set_coeff(mi({2, 0}), 1.0);
  Eigen::MatrixXd T(2, 2);
  T << 0, 1, -1, 0;
  Jet g = jet_linear_change(f, T);
  CHECK(g.coeff(mi({0, 2})) == 1.0);
  CHECK(g.term_count() == 1);

  // f = xy, T(x,y) = (x+y, x-y) -> x^2 - y^2
  Jet h(2, D);
  h.set_coeff(mi({1, 1}), 1.0);
  Eigen::MatrixXd S(2, 2);
  S << 1, 1, 1, -1;
  Jet k = jet_linear_change(h, S);
  CHECK(k.coeff(mi({2, 0})) == 1.0);
  CHECK(k.coeff(mi({0, 2})) == -1.0);
  CHECK(k.coeff(mi({1, 1})) == 0.0);

  // identity map
  std::mt19937_64 rng(5);
  Jet r = random_int_jet(rng, 3, D);
  CHECK(max_abs_diff(jet_linear_change(r, Eigen::MatrixXd::Identity(3, 3)), r) == 0.0);

  // T then T^{-1}
  Eigen::MatrixXd M(3, 3);
  M << 1.0, 0.3, -0.2, 0.1, 0.9, 0.4, -0.5, 0.2, 1.1;
  Jet once = jet_linear_change(r, M);
  Jet round = jet_linear_change(once, M.inverse());
  CHECK(max_abs_diff(round, r) <= 1e-12 * (1.0 + r.max_abs_coeff()));

  // singular matrix
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(3, 3);
  CHECK_THROWS_AS(jet_linear_change(r, Z), SingularityError);
}

TEST_CASE("jet_restrict pullback examples") {
  const int D = 4;
  // f = x0 in C^2 real coordinates (x0,y0,x1,y1); orbit (0, t^2?, ...) cases
  Jet x0 = Jet::variable(4, D, 0);

  // param with x0-component = xi^3 (one parameter)
  std::vector<Jet> param;
  Jet xi = Jet::variable(1, D, 0);
  param.push_back(xi * xi * xi);       // x0 = xi^3
  param.push_back(Jet(1, D));          // y0 = 0
  param.push_back(xi);                 // x1 = xi
  param.push_back(Jet(1, D));          // y1 = 0
  Jet restricted = jet_restrict(x0, param);
  CHECK(restricted.coeff(mi({3})) == 1.0);
  CHECK(restricted.term_count() == 1);

  // f = y0 - |z1|^2 along (y0 = t^2, x1 = t, y1 = 0) -> zero jet
  Jet y0 = Jet::variable(4, D, 1), x1 = Jet::variable(4, D, 2), y1 = Jet::variable(4, D, 3);
  Jet fb = y0 - (x1 * x1 + y1 * y1);
  std::vector<Jet> pb = {Jet(1, D), xi * xi, xi, Jet(1, D)};
  CHECK(jet_restrict(fb, pb).max_abs_coeff() == 0.0);

  // orbit inside {x0 = 0}: restriction of x0 vanishes
  std::vector<Jet> orbit = {Jet(1, D), xi * xi, xi, Jet(1, D)};
  CHECK(jet_restrict(x0, orbit).max_abs_coeff() == 0.0);
}

TEST_CASE("ring axioms hold coefficient-exact on random integer jets") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    int nv = 1 + static_cast<int>(rng() % 6);
    int D = 1 + static_cast<int>(rng() % 4);
    Jet a = random_int_jet(rng, nv, D), b = random_int_jet(rng, nv, D),
        c = random_int_jet(rng, nv, D);
    CHECK(max_abs_diff(jet_mul(a, b), jet_mul(b, a)) == 0.0);
    CHECK(max_abs_diff(jet_mul(jet_mul(a, b), c), jet_mul(a, jet_mul(b, c))) == 0.0);
    CHECK(max_abs_diff(jet_mul(a, b + c), jet_mul(a, b) + jet_mul(a, c)) == 0.0);
    CHECK(max_abs_diff((a + b) - b, a) == 0.0);
  }
}

TEST_CASE("truncation coherence") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 20; ++trial) {
    Jet a = random_int_jet(rng, 3, 4), b = random_int_jet(rng, 3, 4);
    Jet hi = jet_mul(a, b).truncated(2);
    Jet lo = jet_mul(a.truncated(2), b.truncated(2));
    CHECK(max_abs_diff(hi, lo) == 0.0);

    // composition: truncate-then-compose equals compose-then-truncate
    Jet inner = random_int_jet(rng, 2, 4);
    inner.set_coeff(MultiIndex::zero(2), 0.0);
    Jet outer = random_int_jet(rng, 1, 4);
    Jet c_hi = jet_compose(outer, {inner}).truncated(3);
    Jet c_lo = jet_compose(outer.truncated(3), {inner.truncated(3)});
    CHECK(max_abs_diff(c_hi, c_lo) == 0.0);
  }
}

TEST_CASE("derivative, antiderivative, shift, evaluate") {
  const int D = 4;
  Jet x = Jet::variable(2, D, 0), y = Jet::variable(2, D, 1);
  Jet f = x * x * y + 2.0 * y;
  Jet fx = jet_derivative(f, 0);
  CHECK(fx.coeff(mi({1, 1})) == 2.0);
  Jet fint = jet_antiderivative(fx, 0);
  CHECK(fint.coeff(mi({2, 1})) == 1.0);

  Eigen::VectorXd p(2);
  p << 0.5, -1.0;
  CHECK(jet_evaluate(f, p) == Catch::Approx(0.25 * -1.0 + 2.0 * -1.0).epsilon(1e-15));

  // shift is exact on polynomials: f(x+p) evaluated at q equals f(q+p)
  Jet shifted = jet_taylor_shift(f, p);
  Eigen::VectorXd q(2);
  q << 0.25, 0.75;
  CHECK(jet_evaluate(shifted, q) == Catch::Approx(jet_evaluate(f, q + p)).margin(1e-14));
}

TEST_CASE("jet text format round-trips exactly") {
  std::mt19937_64 rng(31337);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Jet j(3, 4);
  j.set_coeff(mi({2, 0, 0}), 1.0);
  j.set_coeff(mi({0, 1, 1}), gauss(rng));
  j.set_coeff(mi({0, 0, 3}), gauss(rng) * 1e-7);
  j.set_coeff(mi({1, 1, 2}), -gauss(rng) * 1e9);
  std::string text = jet_to_text(j);
  Jet back = jet_parse(text, 3, 4);
  REQUIRE(back.nvars() == 3);
  REQUIRE(back.degree() == 4);
  for (const auto& [k, v] : j.terms()) CHECK(back.coeff(k) == v);
  CHECK(back.term_count() == j.term_count());

  // format example from the docs
  Jet doc = jet_parse("2 0 0 : 1.0");
  CHECK(doc.nvars() == 3);
  CHECK(doc.coeff(mi({2, 0, 0})) == 1.0);
}

TEST_CASE("complex jets multiply like complex numbers") {
  const int D = 3;
  ComplexJet z0 = ComplexJet::z_variable(4, D, 0);
  ComplexJet z1 = ComplexJet::z_variable(4, D, 1);
  ComplexJet prod = z0 * z1;
  // (x0 + iy0)(x1 + iy1) = x0x1 - y0y1 + i(x0y1 + y0x1)
  CHECK(prod.re.coeff(mi({1, 0, 1, 0})) == 1.0);
  CHECK(prod.re.coeff(mi({0, 1, 0, 1})) == -1.0);
  CHECK(prod.im.coeff(mi({1, 0, 0, 1})) == 1.0);
  CHECK(prod.im.coeff(mi({0, 1, 1, 0})) == 1.0);

  // |z0|^2 = z0 * conj(z0) is real
  ComplexJet mod = z0 * z0.conj();
  CHECK(mod.im.max_abs_coeff() == 0.0);
  CHECK(mod.re.coeff(mi({2, 0, 0, 0})) == 1.0);
  CHECK(mod.re.coeff(mi({0, 2, 0, 0})) == 1.0);

  ComplexJet scaled = Complex(0.0, -2.0) * z0;
  CHECK(scaled.re.coeff(mi({0, 1, 0, 0})) == 2.0);
  CHECK(scaled.im.coeff(mi({1, 0, 0, 0})) == -2.0);
}
