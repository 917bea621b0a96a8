#ifndef KQP_TESTS_HELPERS_HPP
#define KQP_TESTS_HELPERS_HPP

#include <random>

#include "kqp/decay_matrix.hpp"
#include "kqp/torus_function.hpp"

namespace kqp::testing {

// Random real zero-x-mean function with coefficients ~ N(0,1)/<k>^(s+1),
// normalized so ||u||_s = target.
inline TorusFunction random_function(int nu, int d, int Lphi, int Lx, double s,
                                     double target, std::mt19937_64& rng,
                                     bool zero_x_mean = true) {
  TorusFunction u(Box(nu, d, Lphi, Lx));
  std::normal_distribution<double> gauss;
  for (long f = 0; f < u.size(); ++f) {
    MultiIndex k = u.box().unflat(f);
    if (zero_x_mean && is_zero(k.j)) continue;
    if (sup_norm(k) == 0) continue;
    double decay = std::pow(weight(k), s + 1.0);
    u.coeffs()[f] = cplx(gauss(rng), gauss(rng)) / decay;
  }
  u.enforce_reality();
  double n = u.sobolev_norm(s);
  if (n > 0) u.coeffs() *= target / n;
  return u;
}

// Random banded decay matrix on the ball 0 < |k| <= L (j != 0), entries
// ~ N(0,1)/<r-c>^(s0+1) within band, zero beyond.
inline DecayMatrix random_banded_matrix(int nu, int d, int L, int band, double s0,
                                        std::mt19937_64& rng) {
  auto idx = DecayMatrix::ball_indices(nu, d, L);
  DecayMatrix m(idx, idx);
  std::normal_distribution<double> gauss;
  for (long i = 0; i < m.nrows(); ++i)
    for (long j = 0; j < m.ncols(); ++j) {
      MultiIndex diff = idx[i] - idx[j];
      if (sup_norm(diff) > band) continue;
      double decay = std::pow(weight(diff), s0 + 1.0);
      m.mat()(i, j) = cplx(gauss(rng), gauss(rng)) / decay;
    }
  return m;
}

inline Eigen::MatrixXd random_symmetric(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = gauss(rng);
  return 0.5 * (a + a.transpose());
}

}  // namespace kqp::testing

#endif
