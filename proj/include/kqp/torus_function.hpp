#ifndef KQP_TORUS_FUNCTION_HPP
#define KQP_TORUS_FUNCTION_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "kqp/indexing.hpp"

namespace kqp {

using cplx = std::complex<double>;

// s0 = [(nu+d)/2] + 1, the low regularity index fixed once per dimension pair.
inline int s0_of(int nu, int d) { return (nu + d) / 2 + 1; }

// Real-valued function on T^(nu+d) stored as Fourier coefficients on a dense
// index box.  Reality c(-k) = conj(c(k)) is an invariant of every operation;
// functions living in the zero-x-mean space additionally have no j = 0 modes.
class TorusFunction {
 public:
  TorusFunction() = default;
  explicit TorusFunction(const Box& box)
      : box_(box), c_(Eigen::VectorXcd::Zero(box.size())) {}

  static TorusFunction zero(int nu, int d, int Lphi, int Lx) {
    return TorusFunction(Box(nu, d, Lphi, Lx));
  }

  const Box& box() const { return box_; }
  int nu() const { return box_.nu(); }
  int d() const { return box_.d(); }
  long size() const { return box_.size(); }

  Eigen::VectorXcd& coeffs() { return c_; }
  const Eigen::VectorXcd& coeffs() const { return c_; }

  cplx coeff(const MultiIndex& k) const {
    long f = box_.flat(k);
    return f < 0 ? cplx(0, 0) : c_[f];
  }
  void set_coeff(const MultiIndex& k, cplx v);
  // Sets c(k) = v and c(-k) = conj(v) in one call.
  void set_mode_pair(const MultiIndex& k, cplx v);

  // sqrt( sum <k>^(2s) |c_k|^2 ); overflow-safe for large s via log scaling.
  double sobolev_norm(double s) const;
  double log10_sobolev_norm(double s) const;

  // Largest |c| over the j = 0 column, relative to the s0 norm.
  double x_mean_defect() const;
  bool has_zero_x_mean(double tol = 1e-12) const;
  double reality_defect() const;
  void enforce_reality();

  TorusFunction resized(int Lphi, int Lx) const;  // re-projects onto a new box

  bool is_phi_only() const { return box_.Lx() == 0; }

 private:
  Box box_;
  Eigen::VectorXcd c_;
};

// --- projectors -------------------------------------------------------------

// Pi_N keeps modes 0 < |(ell,j)| <= N; the complement keeps the rest
// (including the constant mode, which never belongs to E_N).
TorusFunction project(const TorusFunction& u, double N, bool complement = false);

// Splits v into (v0, u): v0 carries the j = 0 modes (the x-average as a
// function of phi), u the rest.  v0 + u = v exactly.
std::pair<TorusFunction, TorusFunction> x_mean_split(const TorusFunction& v);

// --- algebra ----------------------------------------------------------------

TorusFunction add(const TorusFunction& u, const TorusFunction& v);
TorusFunction sub(const TorusFunction& u, const TorusFunction& v);
TorusFunction scaled(const TorusFunction& u, double c);

// Pointwise product via coefficient convolution, re-projected onto the
// componentwise max box of the operands.
TorusFunction multiply(const TorusFunction& u, const TorusFunction& v);

// --- derivatives ------------------------------------------------------------

std::vector<TorusFunction> grad_x(const TorusFunction& u);
TorusFunction laplacian(const TorusFunction& u);
TorusFunction omega_dphi(const TorusFunction& u, const std::vector<double>& omega,
                         int order = 1);

// (omega . dphi)^(-order); requires the ell = 0 modes to vanish within
// mean_tol (relative to the s0 norm).  Throws MeanNotZero / SmallDivisorUnderflow.
TorusFunction invert_omega_dphi(const TorusFunction& u, const std::vector<double>& omega,
                                int order, double mean_tol = 1e-12,
                                double divisor_floor = 1e-14);

// int_{T^d} |grad_x u|^2 dx as a phi-only function, non-normalized measure.
TorusFunction grad_sq_x_integral(const TorusFunction& u);

// int_{T^d} a*b dx as a phi-only function (non-normalized); used for the
// rank-type term of the linearized operator.
TorusFunction x_integral_product(const TorusFunction& a, const TorusFunction& b);

}  // namespace kqp

#endif
