#ifndef KQP_MEASURE_SCAN_HPP
#define KQP_MEASURE_SCAN_HPP

#include "kqp/multiscale.hpp"

namespace kqp {

struct ScanParams {
  std::vector<double> lambda_grid;
  std::vector<int> N_list = {4, 8};
  double tau0 = 2.0;
  double tau1 = 2.0;
  int N0_dio = 5;          // scale for the in_I_bar test
  int max_coeff_tilde = 3;
  std::vector<std::vector<int>> j0_list;  // x-sections probed by the theta scans
  double frak_e = -1;      // interval budget exponent; < 0 means 2d + nu + 4
  int threads = 1;
  ExponentSet exponents;
  SolveOptions solve;
};

struct LambdaRecord {
  double lambda = 0;
  bool in_bar = false, in_tilde = false, solver_converged = false;
  double solver_residual = 0;
  std::map<int, bool> JN_ok;                      // N -> J_N verdict
  std::map<int, bool> G0_ok;                      // N -> interval-count verdict
  std::map<int, long> G0_intervals;               // N -> worst needed interval count
  std::map<std::pair<int, long>, double> theta_meas;  // (N, j0 flat key) -> measure
  bool bad = true;
  std::string note;
};

struct ScanReport {
  double epsilon = 0;
  std::vector<LambdaRecord> rows;
  double bad_fraction = 1.0;
  std::vector<int> N_list;
  std::vector<std::vector<int>> j0_list;
};

ScanReport scan_lambda(const ProblemData& pd, const ScanParams& par);

// || L_N^{-1}(lambda, u) ||_0 <= N^tau1 / 2 at theta = 0, the ball centered at
// the origin.
bool J_N_ok(const ProblemData& pd, const ReductionResult& red, int N, double tau1);

// Bad (lambda, theta) masks for one (j0, N): computed directly from
// L_{N,j0}(lambda,theta) and through the variable change zeta = 1/lambda^2,
// eta = theta/lambda with the threshold mapped by the same scaling.  The two
// must agree up to grid tolerance.
std::pair<std::vector<std::vector<bool>>, std::vector<std::vector<bool>>> bad2d_masks(
    const ProblemData& pd, const std::vector<double>& lambda_grid,
    const std::vector<double>& theta_grid, const std::vector<int>& j0, int N, double tau1,
    const TorusFunction& u);

}  // namespace kqp

#endif
