#ifndef KQP_DIOPHANTINE_HPP
#define KQP_DIOPHANTINE_HPP

#include <string>
#include <vector>

namespace kqp {

// Base frequency vector omega_bar with its Diophantine constant; the running
// frequency is omega = lambda * omega_bar with lambda in lambda_range.
struct FrequencyData {
  std::vector<double> omega_bar;
  double gamma0 = 0.1;
  double lambda_min = 0.5;
  double lambda_max = 1.5;

  int nu() const { return static_cast<int>(omega_bar.size()); }
  std::vector<double> omega(double lambda) const {
    std::vector<double> w = omega_bar;
    for (double& c : w) c *= lambda;
    return w;
  }
};

// Named presets with components built from algebraic irrationals.
FrequencyData frequency_preset(const std::string& name);

struct DioReport {
  bool ok = false;
  std::vector<int> worst_ell;  // minimizer of |omega_bar . ell| * |ell|^nu
  double min_value = 0;        // that minimum over the scanned range
};

// Scans 0 < |ell| <= L for |omega_bar . ell| >= gamma0 / |ell|^nu.
DioReport check_dio(const FrequencyData& fd, int L);

struct DioQuadReport {
  bool ok = false;
  double min_value = 0;  // min over p of |sum w_i w_j p_ij| * |p|^(nu(nu+1))
};

// Scans the quadratic form values over nonzero integer p with |p| <= P.
DioQuadReport check_dioquad(const FrequencyData& fd, int P);

// First Melnikov-type non-resonance at scale N0: |(lambda w.ell)^2 - |j|^2|
// >= N0^(-tau0) for all 0 < |(ell,j)| <= N0 with j != 0.
bool in_I_bar(double lambda, const FrequencyData& fd, int d, int N0, double tau0);

// Quadratic-polynomial non-degeneracy: |P(lambda*omega_bar)| >=
// N0^(-1)/(1+|p|^(nu(nu+1))) over integer polynomials p0 + sum p_ab X_a X_b
// with coefficients bounded by max_coeff.
bool in_I_tilde(double lambda, const FrequencyData& fd, int N0, int max_coeff);

}  // namespace kqp

#endif
