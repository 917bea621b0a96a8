#ifndef KQP_REDUCTION_HPP
#define KQP_REDUCTION_HPP

#include <Eigen/Dense>

#include "kqp/decay_matrix.hpp"
#include "kqp/kirchhoff.hpp"

namespace kqp {

// --- changes of variables ----------------------------------------------------

// mu = (average of sqrt(1 + a))^2 over T^nu, normalized measure.
double compute_mu(const TorusFunction& a, int oversample = 4);

// alpha = (w.dphi)^(-1)[ sqrt(1+a)/sqrt(mu) - 1 ]; the integrand has zero
// average by the choice of mu.
TorusFunction compute_alpha(const TorusFunction& a, double mu,
                            const std::vector<double>& omega, int Lout = -1,
                            int oversample = 2);

// Inverse of phi -> phi + omega*alpha(phi), via pointwise fixed-point
// iteration on a grid; requires max |w.dphi alpha| < 1/2.
TorusFunction invert_diffeo(const TorusFunction& alpha, const std::vector<double>& omega,
                            int Lout = -1, int oversample = 2, double tol = 1e-12,
                            int max_iter = 100);

// h(phi + omega*alpha(phi), x), re-expanded on the box (Lout_phi, h.Lx).
TorusFunction compose_with_diffeo(const TorusFunction& h, const TorusFunction& alpha,
                                  const std::vector<double>& omega, int Lout_phi = -1,
                                  int oversample = 2);

// a1 = rho^(-1) A^(-1)[(w.dphi)^2 alpha],  rho = A^(-1)[(1 + w.dphi alpha)^2].
// a1 has zero average up to quadrature dust.
std::pair<TorusFunction, TorusFunction> compute_a1_rho(const TorusFunction& alpha,
                                                       double mu,
                                                       const std::vector<double>& omega,
                                                       int oversample = 2,
                                                       double rho_floor = 0.5);

// b = exp(-(w.dtheta)^(-1) a1); solves b^(-1)(w.dtheta b) + a1 = 0.
TorusFunction compute_b(const TorusFunction& a1, const std::vector<double>& omega,
                        int oversample = 2, double mean_tol = 1e-10);

// --- full reduction ----------------------------------------------------------

struct ReduceOptions {
  int pad = -1;            // extra phi half-width for internal factors (-1: box/2)
  int oversample = 2;      // grid oversampling for compositions
  double rho_floor = 0.5;  // smallest admissible grid value of rho
  double a1_mean_tol = 1e-10;
  bool materialize = true;  // assemble the dense R2 on the requested box
};

// Output of the two-step conjugation: the constant mu and the order-zero
// remainder R2 with L2 = (w.dtheta)^2 - mu*Lap + R2, plus the slice factors
// needed to apply Phi1 = B^(-1) rho^(-1) A^(-1) and Phi2 = A B.
struct ReductionResult {
  double mu = 1;
  double lambda = 1;
  double epsilon = 0;
  std::vector<double> omega;

  TorusFunction a, alpha, alpha_breve, rho, a1, b;
  double a1_mean_rel = 0;  // measured |avg a1| relative to ||a1||_{s0}
  // Phi1 = gauge * Phi2^*; gauge = det(D T^{-1})/b^2, constant up to grid dust
  double gauge = 1.0;
  double gauge_spread = 0.0;

  TorusFunction u;  // the expansion point
  int Lw = 0, Lxw = 0, Lpad = 0;

  // phi-slice factors on the padded range (flattened phi box of half-width
  // Lpad).  The deviation matrices are assembled from small factors so that
  // no large diagonal symbol is cancelled in floating point.
  Eigen::MatrixXcd lft, rgt;  // Phi1 and Phi2 slice matrices
  Eigen::MatrixXcd sec_dev;   // lft * diag(-(w.l)^2) * rgt - diag(-(w.l)^2)
  Eigen::MatrixXcd xw_dev;    // lft * M_{1+a} * rgt - mu * I

  DecayMatrix R2;  // dense on the requested box (j != 0), when materialized
  bool materialized = false;

  // R2 entry for arbitrary sites; exact within the padded phi range, zero
  // (by off-diagonal decay) outside it.
  cplx r2_entry(const MultiIndex& r, const MultiIndex& c) const;
  Eigen::MatrixXcd r2_window(const std::vector<MultiIndex>& rows,
                             const std::vector<MultiIndex>& cols) const;

  // slice application of the conjugating operators; output phi-box = Lpad
  TorusFunction apply_phi1(const TorusFunction& h) const;
  TorusFunction apply_phi2(const TorusFunction& h) const;

  // (w.dtheta)^2 - mu*Lap as a diagonal value at a site
  double diag_entry(const MultiIndex& k) const;

 private:
  friend ReductionResult reduce(const ProblemData&, double, const TorusFunction&, int,
                                int, const ReduceOptions&);
  // rank factors of the conjugated rank-type term, inner index = padded phi modes
  Eigen::MatrixXcd rank_l_, rank_r_;
  std::vector<MultiIndex> box_idx_;
  Box phi_pad_box_;

 public:
  const std::vector<MultiIndex>& box_sites() const { return box_idx_; }
};

ReductionResult reduce(const ProblemData& pd, double lambda, const TorusFunction& u,
                       int box_phi, int box_x, const ReduceOptions& opts = {});

// || Phi1 L(u) Phi2 h - ((w.dtheta)^2 - mu Lap + R2) h ||_{s0}, the left route
// applied as operators on enlarged boxes with a finer grid.  Returns
// (residual, ||h||_{s0+2}).
std::pair<double, double> conjugation_residual(const ProblemData& pd, double lambda,
                                               const TorusFunction& u,
                                               const ReductionResult& red,
                                               const TorusFunction& h);

// Size of the residual (w.dtheta)-symbol of the conjugated slice operator,
// relative to the slice's own decay norm; the multiplication step is designed
// to cancel it.
double first_order_symbol_defect(const ReductionResult& red);

}  // namespace kqp

#endif
