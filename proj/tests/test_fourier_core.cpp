#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "kqp/grid.hpp"
#include "kqp/torus_function.hpp"

using namespace kqp;

namespace {

TorusFunction cos_mode(int nu, int d, int Lphi, int Lx, std::vector<int> ell,
                       std::vector<int> j, double amp = 0.5) {
  TorusFunction f(Box(nu, d, Lphi, Lx));
  f.set_mode_pair(MultiIndex{std::move(ell), std::move(j)}, amp);
  return f;
}

}  // namespace

TEST_CASE("s0 of the dimension pair") {
  CHECK(s0_of(1, 1) == 2);
  CHECK(s0_of(2, 2) == 3);
  CHECK(s0_of(1, 2) == 2);
}

TEST_CASE("sobolev norm on single-pair functions") {
  // one conjugate pair of weight 1, unit amplitudes
  TorusFunction u(Box(1, 1, 2, 2));
  u.set_mode_pair(MultiIndex{{0}, {1}}, 1.0);
  CHECK(u.sobolev_norm(0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(u.sobolev_norm(3.5) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

  // cos(2x): modes (0, +-2) with amplitude 1/2, weight 2
  TorusFunction v = cos_mode(1, 1, 2, 2, {0}, {2});
  CHECK(v.sobolev_norm(1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

  CHECK(TorusFunction(Box(1, 1, 2, 2)).sobolev_norm(2) == 0.0);
}

TEST_CASE("parseval at s = 0") {
  std::mt19937_64 rng(7);
  TorusFunction u = testing::random_function(1, 1, 5, 5, 2.0, 3.0, rng);
  double l2 = u.coeffs().norm();
  CHECK(u.sobolev_norm(0) == doctest::Approx(l2).epsilon(1e-13));
}

TEST_CASE("projector splits and smoothing estimates") {
  std::mt19937_64 rng(11);
  // single mode beyond the cut
  TorusFunction one = cos_mode(1, 1, 4, 4, {1}, {3});
  CHECK(project(one, 2).sobolev_norm(0) == 0.0);
  CHECK(project(one, 2, true).sobolev_norm(0) ==
        doctest::Approx(one.sobolev_norm(0)).epsilon(1e-15));

  for (int trial = 0; trial < 50; ++trial) {
    TorusFunction u = testing::random_function(1, 1, 8, 8, 2.0, 1.0, rng);
    // partition of indices
    TorusFunction s = sub(add(project(u, 4), project(u, 4, true)), u);
    CHECK(s.sobolev_norm(0) == 0.0);
    for (double N : {2.0, 4.0, 8.0}) {
      for (double alpha : {0.0, 1.0, 2.0}) {
        double s_base = 2.0;
        CHECK(project(u, N).sobolev_norm(s_base + alpha) <=
              std::pow(N, alpha) * u.sobolev_norm(s_base) * (1 + 1e-13));
        CHECK(project(u, N, true).sobolev_norm(s_base) <=
              std::pow(N, -alpha) * u.sobolev_norm(s_base + alpha) * (1 + 1e-13));
      }
    }
  }
}

TEST_CASE("x-mean split") {
  TorusFunction v(Box(1, 1, 2, 2));
  v.set_mode_pair(MultiIndex{{1}, {0}}, 0.5);   // cos(phi)
  v.set_mode_pair(MultiIndex{{0}, {1}}, 0.5);   // cos(x)
  auto [v0, u] = x_mean_split(v);
  CHECK(v0.coeff(MultiIndex{{1}, {0}}) == cplx(0.5, 0));
  CHECK(v0.sobolev_norm(0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(u.coeff(MultiIndex{{0}, {1}}) == cplx(0.5, 0));
  CHECK(u.coeff(MultiIndex{{1}, {0}}) == cplx(0, 0));
  TorusFunction back = sub(add(v0, u), v);
  CHECK(back.sobolev_norm(0) == 0.0);
}

TEST_CASE("products: closed forms and the grid oracle") {
  // cos(x)^2 = 1/2 + cos(2x)/2 on a box wide enough to hold the product
  TorusFunction c = cos_mode(1, 1, 1, 2, {0}, {1});
  TorusFunction c2 = multiply(c, c);
  CHECK(c2.coeff(MultiIndex{{0}, {0}}).real() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c2.coeff(MultiIndex{{0}, {2}}).real() == doctest::Approx(0.25).epsilon(1e-15));

  TorusFunction one(Box(1, 1, 1, 1));
  one.set_coeff(MultiIndex{{0}, {0}}, 1.0);
  std::mt19937_64 rng(3);
  TorusFunction u = testing::random_function(1, 1, 3, 3, 2.0, 1.0, rng, false);
  TorusFunction uu = multiply(u, one);
  CHECK(sub(uu, u.resized(3, 3)).sobolev_norm(0) < 1e-15);

  // grid-sampled product against the convolution, on a box wide enough to
  // hold every product mode
  TorusFunction v = testing::random_function(1, 1, 3, 3, 2.0, 0.7, rng, false);
  TorusFunction uv = multiply(u.resized(6, 6), v.resized(6, 6));
  const int G = 16;
  double worst = 0;
  for (int a = 0; a < G; ++a)
    for (int b = 0; b < G; ++b) {
      std::vector<double> phi{2 * M_PI * a / G}, x{2 * M_PI * b / G};
      double lhs = eval_at(uv, phi, x);
      double rhs = eval_at(u, phi, x) * eval_at(v, phi, x);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  CHECK(worst < 1e-12);
}

TEST_CASE("product interpolation inequality with conservative constants") {
  std::mt19937_64 rng(19);
  const double s0 = 2.0;
  for (int trial = 0; trial < 20; ++trial) {
    TorusFunction u = testing::random_function(1, 1, 6, 6, 3.0, 1.0, rng, false);
    TorusFunction v = testing::random_function(1, 1, 6, 6, 3.0, 1.0, rng, false);
    for (double s : {3.0, 4.0}) {
      double lhs = multiply(u, v).sobolev_norm(s);
      double rhs = std::pow(2.0, s) * u.sobolev_norm(s) * v.sobolev_norm(s0) +
                   std::pow(2.0, s0) * u.sobolev_norm(s0) * v.sobolev_norm(s);
      CHECK(lhs <= rhs);
    }
  }
}

TEST_CASE("derivatives act by their symbols") {
  TorusFunction c = cos_mode(1, 1, 2, 2, {0}, {1});
  TorusFunction lap = laplacian(c);
  CHECK(sub(lap, scaled(c, -1.0)).sobolev_norm(0) < 1e-15);

  TorusFunction e = cos_mode(1, 1, 3, 3, {2}, {1});
  std::vector<double> omega{1.37};
  TorusFunction d2 = omega_dphi(e, omega, 2);
  CHECK(sub(d2, scaled(e, -std::pow(1.37 * 2, 2))).sobolev_norm(0) < 1e-12);

  // int |grad u|^2 dx for u = cos(phi)cos(x) equals pi cos^2(phi)
  TorusFunction u(Box(1, 1, 2, 2));
  u.set_mode_pair(MultiIndex{{1}, {1}}, 0.25);
  u.set_mode_pair(MultiIndex{{1}, {-1}}, 0.25);
  TorusFunction energy = grad_sq_x_integral(u);
  // pi cos^2 = pi/2 + (pi/4)(e^{2i phi} + cc)
  CHECK(energy.coeff(MultiIndex{{0}, {0}}).real() == doctest::Approx(M_PI / 2).epsilon(1e-13));
  CHECK(energy.coeff(MultiIndex{{2}, {0}}).real() == doctest::Approx(M_PI / 4).epsilon(1e-13));
}

TEST_CASE("inverting omega.dphi") {
  std::vector<double> omega{std::sqrt(2.0)};
  // (w.dphi)^{-1} sin(2 phi) = -cos(2 phi)/(2 w)
  TorusFunction s2(Box(1, 1, 3, 0));
  s2.set_mode_pair(MultiIndex{{2}, {0}}, cplx(0, -0.5));  // sin(2 phi)
  TorusFunction inv = invert_omega_dphi(s2, omega, 1);
  TorusFunction expect(Box(1, 1, 3, 0));
  expect.set_mode_pair(MultiIndex{{2}, {0}}, -0.5 / (2 * omega[0]));  // -cos/(2w)
  CHECK(sub(inv, expect).sobolev_norm(0) < 1e-14);

  // round trip on input with no ell = 0 modes (the op's domain)
  std::mt19937_64 rng(5);
  TorusFunction u = testing::random_function(1, 1, 5, 5, 2.0, 1.0, rng);
  for (long f = 0; f < u.size(); ++f)
    if (is_zero(u.box().unflat(f).ell)) u.coeffs()[f] = 0;
  TorusFunction rt = invert_omega_dphi(omega_dphi(u, omega, 1), omega, 1);
  CHECK(sub(rt, u).sobolev_norm(2) < 1e-12);

  // nonzero phi-mean input must refuse
  TorusFunction bad(Box(1, 1, 2, 2));
  bad.set_coeff(MultiIndex{{0}, {0}}, 1.0);
  CHECK_THROWS_AS(invert_omega_dphi(bad, omega, 1), MeanNotZero);

  // divisor floor
  std::vector<double> tiny_omega{1e-16};
  TorusFunction m(Box(1, 1, 1, 0));
  m.set_mode_pair(MultiIndex{{1}, {0}}, 1.0);
  CHECK_THROWS_AS(invert_omega_dphi(m, tiny_omega, 1), SmallDivisorUnderflow);
}

TEST_CASE("reality is preserved by the operations") {
  std::mt19937_64 rng(23);
  TorusFunction u = testing::random_function(1, 1, 4, 4, 2.0, 1.0, rng);
  TorusFunction v = testing::random_function(1, 1, 4, 4, 2.0, 1.0, rng);
  CHECK(multiply(u, v).reality_defect() < 1e-14);
  CHECK(laplacian(u).reality_defect() < 1e-14);
  CHECK(project(u, 2).reality_defect() == 0.0);
  std::vector<double> omega{std::sqrt(2.0)};
  CHECK(omega_dphi(u, omega, 2).reality_defect() < 1e-12);
  TorusFunction up = u;
  for (long f = 0; f < up.size(); ++f)
    if (is_zero(up.box().unflat(f).ell)) up.coeffs()[f] = 0;
  CHECK(invert_omega_dphi(up, omega, 1).reality_defect() < 1e-12);
}

TEST_CASE("two-dimensional blocks") {
  // nu = 2, d = 2 sanity: norms, products, derivatives
  std::mt19937_64 rng(29);
  TorusFunction u = testing::random_function(2, 2, 2, 2, 3.0, 1.0, rng);
  CHECK(u.sobolev_norm(3) == doctest::Approx(1.0).epsilon(1e-12));
  TorusFunction lap = laplacian(u);
  MultiIndex k{{1, 2}, {2, 1}};
  CHECK(std::abs(lap.coeff(k) - cplx(-5.0, 0) * u.coeff(k)) < 1e-14);
  std::vector<double> omega{1.0, std::sqrt(3.0)};
  TorusFunction up = u;
  for (long f = 0; f < up.size(); ++f)
    if (is_zero(up.box().unflat(f).ell)) up.coeffs()[f] = 0;
  TorusFunction rt = invert_omega_dphi(omega_dphi(up, omega, 2), omega, 2);
  CHECK(sub(rt, up).sobolev_norm(0) < 1e-11);
}
