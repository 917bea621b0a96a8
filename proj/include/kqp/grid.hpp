#ifndef KQP_GRID_HPP
#define KQP_GRID_HPP

#include <Eigen/Dense>
#include <vector>

#include "kqp/torus_function.hpp"

namespace kqp {

// Uniform grid on T^nu used to evaluate and re-expand phi-only functions.
// With oversample >= 2 the inverse transform of a trig polynomial of the
// stored degree is exact (no aliasing of in-box modes).
class PhiGrid {
 public:
  PhiGrid(int nu, int Lphi, int oversample = 2);

  int nu() const { return nu_; }
  long npoints() const { return npoints_; }
  std::vector<double> point(long m) const;

  // values[m] = f(phi_m) for a phi-only function
  Eigen::VectorXcd eval(const TorusFunction& f) const;

  // least-aliased coefficients on the box |ell| <= Lout from grid samples
  TorusFunction expand(const Eigen::VectorXcd& values, int d, int Lout) const;

 private:
  int nu_, Lphi_, G_;
  long npoints_;
};

// f(phi) for a phi-only function at an arbitrary point.
cplx eval_phi_at(const TorusFunction& f, const std::vector<double>& phi);
double eval_phi_at_real(const TorusFunction& f, const std::vector<double>& phi);

// h(phi, x) at an arbitrary point of T^(nu+d).
double eval_at(const TorusFunction& h, const std::vector<double>& phi,
               const std::vector<double>& x);

}  // namespace kqp

#endif
