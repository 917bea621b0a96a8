#ifndef KQP_NASH_MOSER_HPP
#define KQP_NASH_MOSER_HPP

#include <optional>
#include <string>
#include <vector>

#include "kqp/reduction.hpp"

namespace kqp {

// Exponent bookkeeping for the iteration; frak_a = tau + delta*s1.
struct ExponentSet {
  double tau = 3.0;
  double delta = 0.1;
  double kappa1 = 5.0;
  double kappa2 = 69.0;
  double kappa3 = 100.0;
  double sigma = 4.0;
  double s0 = 2.0;
  double s1 = 7.0;
  double S = 178.0;

  double frak_a() const { return tau + delta * s1; }

  // Greedy feasible choice: delta fixed, then kappa1, kappa2, S, kappa3 in
  // dependency order.
  static ExponentSet suggest(int nu, int d, double tau = 3.0, double delta = 0.1);
};

struct ExponentCheck {
  bool ok = false;
  std::vector<std::string> violations;
};

ExponentCheck check_exponents(const ExponentSet& es);

// N_n = N0^((3/2)^n)
double scale(double N0, int n);

struct IterationState {
  int n = 0;
  double N_n = 0;
  double residual_s0 = 0;
  double step_norm_s1 = 0;
  double log10_u_norm_S = 0;
  double condition_estimate = 0;
  double wall_ms = 0;
  bool support_ok = true;  // u_n in E_{N_n}
  // monitored (S2)-(S4) ratios; reported, not enforced
  double s2_ratio = 0;  // ||u_n - u_{n-1}||_{s1} * N_n^{kappa1}
  double s3_ratio = 0;  // ||F(u_n)||_{s0} * N_n^{kappa2}
  double s4_ratio = 0;  // log10 ||u_n||_S - kappa3*log10 N_n
};

struct SolveOptions {
  double N0 = 8;
  int max_steps = 8;
  double tol = 1e-9;
  int box_phi = 16;
  int box_x = 16;
  ReduceOptions reduce;
  bool override_exponents = false;
  double cond_limit = 1e12;
};

struct SolveResult {
  TorusFunction u;
  std::vector<IterationState> trace;
  bool converged = false;
  std::string failure;  // empty on success; "BadParameter: ..." / "StepFailed: ..."
};

// Truncated operator L_N = Pi_N ((w.dtheta)^2 - mu Lap) Pi_N + Pi_N R2 Pi_N on
// E_N cap {j != 0}, together with the reduction that supplies the conjugating
// factors.
struct TruncatedL {
  DecayMatrix LN;
  ReductionResult red;
};

TruncatedL build_truncated_L(const ProblemData& pd, double lambda, const TorusFunction& u,
                             double N, int box_phi, int box_x,
                             const ReduceOptions& opts = {});

SolveResult solve(const ProblemData& pd, double lambda, const ExponentSet& es,
                  const SolveOptions& opts);

// Diagnostic for the Neumann-series robustness of the truncated solve: builds
// L_N at lambda and lambda+dlambda and compares the directly refactorized
// inverse decay norm with the series bound from the lambda-factorization.
struct PerturbReport {
  double direct_inv_norm_s0 = 0;   // |L_N(lambda+dlambda)^{-1}|_{s0}
  double series_bound_s0 = 0;      // Neumann bound from the base point
  double a_norm_s0 = 0;            // |L^{-1} (L' - L)|_{s0}
  bool invertible = false;
};

PerturbReport perturb_lambda_invertibility(const ProblemData& pd, const TorusFunction& u,
                                           double N, double lambda, double dlambda,
                                           int box_phi, int box_x);

}  // namespace kqp

#endif
