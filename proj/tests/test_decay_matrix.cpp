#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "kqp/decay_matrix.hpp"

using namespace kqp;

TEST_CASE("decay norm basics") {
  auto idx = DecayMatrix::ball_indices(1, 1, 3);

  // diagonal: only the zero difference contributes, norm = sup |d_k|
  DecayMatrix D(idx, idx);
  for (long i = 0; i < D.nrows(); ++i) D.mat()(i, i) = 0.5 + 0.1 * i;
  double supd = std::abs(D.mat()(D.nrows() - 1, D.nrows() - 1));
  for (double s : {0.0, 2.0, 5.0})
    CHECK(D.decay_norm(s) == doctest::Approx(supd).epsilon(1e-14));

  // one off-diagonal entry of value v at difference k: |M|_s = |v| <k>^s
  DecayMatrix M(idx, idx);
  MultiIndex r{{2}, {1}}, c{{-1}, {1}};
  M.mat()(M.row_pos(r), M.col_pos(c)) = cplx(0, 0.7);
  double w = weight(r - c);  // 3
  CHECK(w == 3.0);
  CHECK(M.decay_norm(2.0) == doctest::Approx(0.7 * 9.0).epsilon(1e-14));
}

TEST_CASE("multiplication operator has the function's norm") {
  std::mt19937_64 rng(61);
  auto idx = DecayMatrix::ball_indices(1, 1, 4);
  for (int trial = 0; trial < 20; ++trial) {
    TorusFunction a = testing::random_function(1, 1, 4, 4, 2.0, 1.0, rng, false);
    DecayMatrix M = multiplication_matrix(a, idx, idx);
    for (double s : {0.0, 2.0, 3.5})
      CHECK(std::abs(M.decay_norm(s) - a.sobolev_norm(s)) <=
            1e-12 * std::max(1.0, a.sobolev_norm(s)));
  }
}

TEST_CASE("interpolation and algebra inequalities on banded matrices") {
  std::mt19937_64 rng(67);
  const double s0 = 2.0;
  int pass_interp = 0, pass_algebra = 0, pass_soboh = 0;
  const int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    DecayMatrix m1 = testing::random_banded_matrix(1, 1, 4, 3, s0, rng);
    DecayMatrix m2 = testing::random_banded_matrix(1, 1, 4, 3, s0, rng);
    for (double s : {3.0, 4.0}) {
      auto [lhs, rhs] = interpolation_check(m1, m2, s, s0);
      if (lhs <= rhs) ++pass_interp;
      double c = interp_constant(s, s0);
      if ((m1 * m2).decay_norm(s) <= c * m1.decay_norm(s) * m2.decay_norm(s))
        ++pass_algebra;
    }
    // (soboh): ||M h||_s <= C(s)(|M|_{s0} ||h||_s + |M|_s ||h||_{s0})
    TorusFunction h = testing::random_function(1, 1, 4, 4, s0, 1.0, rng);
    for (double s : {3.0, 4.0}) {
      double lhs = m1.apply(h, 4, 4).sobolev_norm(s);
      double rhs = interp_constant(s, s0) * (m1.decay_norm(s0) * h.sobolev_norm(s) +
                                             m1.decay_norm(s) * h.sobolev_norm(s0));
      if (lhs <= rhs) ++pass_soboh;
    }
  }
  CHECK(pass_interp == 2 * trials);
  CHECK(pass_algebra == 2 * trials);
  CHECK(pass_soboh == 2 * trials);
}

TEST_CASE("iterated powers") {
  std::mt19937_64 rng(71);
  const double s0 = 2.0;
  for (int trial = 0; trial < 20; ++trial) {
    DecayMatrix m = testing::random_banded_matrix(1, 1, 4, 2, s0, rng);
    DecayMatrix p = m;
    for (int n = 2; n <= 4; ++n) {
      p = p * m;
      for (double s : {3.0, 4.0}) {
        double bound = std::pow(interp_constant(s, s0), n) * m.decay_norm(s) *
                       std::pow(m.decay_norm(s0), n - 1);
        CHECK(p.decay_norm(s) <= bound);
      }
    }
  }
}

TEST_CASE("identity behaves as the unit of the algebra") {
  auto idx = DecayMatrix::ball_indices(1, 1, 3);
  DecayMatrix I = DecayMatrix::identity(idx);
  std::mt19937_64 rng(73);
  DecayMatrix m = testing::random_banded_matrix(1, 1, 3, 2, 2.0, rng);
  CHECK(((I * m).mat() - m.mat()).norm() == 0.0);
  for (double s : {2.0, 3.0}) {
    auto [lhs, rhs] = interpolation_check(m, I, s, 2.0);
    CHECK(lhs <= rhs);
  }
}

TEST_CASE("apply: identity, diagonal, support errors") {
  auto idx = DecayMatrix::ball_indices(1, 1, 3);
  DecayMatrix I = DecayMatrix::identity(idx);
  TorusFunction h(Box(1, 1, 3, 3));
  h.set_mode_pair(MultiIndex{{1}, {2}}, cplx(0.2, -0.4));
  CHECK(sub(I.apply(h, 3, 3), h).sobolev_norm(0) < 1e-16);

  DecayMatrix D(idx, idx);
  for (long i = 0; i < D.nrows(); ++i) D.mat()(i, i) = 2.0 + i;
  TorusFunction e(Box(1, 1, 3, 3));
  MultiIndex k{{0}, {2}};
  e.set_coeff(k, 1.0);
  TorusFunction De = D.apply(e, 3, 3);
  CHECK(De.coeff(k) == D.mat()(D.row_pos(k), D.col_pos(k)));

  TorusFunction wide(Box(1, 1, 5, 5));
  wide.set_coeff(MultiIndex{{5}, {5}}, 1.0);
  CHECK_THROWS_AS(D.apply(wide, 5, 5), IndexError);
}

TEST_CASE("submatrix windows") {
  Box b(1, 1, 3, 3);
  auto idx = DecayMatrix::box_indices(b, true, false);
  DecayMatrix m(idx, idx);
  m.mat().setConstant(cplx(1, 0));

  // center far outside the ambient box: empty
  CHECK(m.submatrix(MultiIndex{{100}, {100}}, 2).nrows() == 0);
  // window larger than the diameter: everything
  CHECK(m.submatrix(MultiIndex{{0}, {0}}, 100).nrows() == m.nrows());

  // brute-force recount for center (0,1), N = 1
  MultiIndex c{{0}, {1}};
  auto sub = m.submatrix(c, 1);
  long expect = 0;
  for (const auto& k : idx)
    if (dist(k, c) <= 1) ++expect;
  CHECK(sub.nrows() == expect);
  CHECK(sub.nrows() == 3 * 2);  // ell in {-1,0,1}, j in {1,2} (j=0 excluded)
}

TEST_CASE("dense inversion") {
  auto idx = DecayMatrix::ball_indices(1, 1, 2);
  // diagonal with entries >= 1: reciprocal diagonal
  DecayMatrix D(idx, idx);
  for (long i = 0; i < D.nrows(); ++i) D.mat()(i, i) = 1.0 + i;
  DecayMatrix Dinv = D.invert_dense();
  for (long i = 0; i < D.nrows(); ++i)
    CHECK(std::abs(Dinv.mat()(i, i) - cplx(1.0 / (1.0 + i), 0)) < 1e-14);

  // I + small banded perturbation against the truncated Neumann series;
  // profile_l1 dominates the operator norm, so q = 0.05 bounds the tail
  std::mt19937_64 rng(79);
  DecayMatrix A = testing::random_banded_matrix(1, 1, 2, 2, 2.0, rng);
  A.mat() *= 0.05 / std::max(1e-9, A.profile_l1());
  DecayMatrix M = DecayMatrix::identity(idx);
  M.mat() += A.mat();
  DecayMatrix Minv = M.invert_dense();
  Eigen::MatrixXcd series = Eigen::MatrixXcd::Identity(M.nrows(), M.nrows());
  Eigen::MatrixXcd pw = series;
  double qn = 1;
  for (int n = 1; n <= 12; ++n) {
    pw = -A.mat() * pw;
    series += pw;
    qn *= 0.05;
  }
  double tail = qn / (1 - 0.05);  // operator-norm tail bound
  double fro_slack = std::sqrt(static_cast<double>(M.nrows()));
  CHECK((Minv.mat() - series).norm() <= fro_slack * tail + 1e-13);

  // singular input refuses
  DecayMatrix S(idx, idx);
  S.mat().setZero();
  S.mat()(0, 0) = 1.0;
  CHECK_THROWS_AS(S.invert_dense(), Singular);
}
