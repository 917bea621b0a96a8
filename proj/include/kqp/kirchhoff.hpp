#ifndef KQP_KIRCHHOFF_HPP
#define KQP_KIRCHHOFF_HPP

#include "kqp/diophantine.hpp"
#include "kqp/torus_function.hpp"

namespace kqp {

// Forcing data for F(u) = (w.dphi)^2 u - (1 + eps int |grad u|^2 dx) Lap u - eps g.
// f = f0 + g with f0 the x-average part and g its zero-x-mean complement.
struct ProblemData {
  FrequencyData fd;
  double epsilon = 0;
  TorusFunction f, f0, g;

  int nu() const { return f.nu(); }
  int d() const { return f.d(); }
};

// Builds ProblemData from a forcing f; checks the zero total average.
ProblemData make_problem(const FrequencyData& fd, double epsilon, const TorusFunction& f,
                         double mean_tol = 1e-12);

// Residual of the zero-x-mean equation, projected to u's working box.
TorusFunction residual(const ProblemData& pd, double lambda, const TorusFunction& u);

// v0 = eps (lambda w . dphi)^(-2) f0.
TorusFunction recover_v0(const ProblemData& pd, double lambda);

// Exact differential of the residual at u, applied to h:
//   L(u) h = (w.dphi)^2 h - (1 + a(phi)) Lap h - 2 eps (int grad u . grad h dx) Lap u
// with a(phi) = eps int |grad u|^2 dx.  The last term equals
// +2 eps Lap u int (Lap u) h dx after integrating by parts on T^d.
TorusFunction apply_linearized(const ProblemData& pd, double lambda,
                               const TorusFunction& u, const TorusFunction& h);

// Q(u,h) = F(u+h) - F(u) - L(u)h; identically zero when eps = 0.
TorusFunction quadratic_remainder(const ProblemData& pd, double lambda,
                                  const TorusFunction& u, const TorusFunction& h);

// a(phi) = eps int |grad u|^2 dx; phi-only, pointwise >= 0.
TorusFunction compute_a(const ProblemData& pd, const TorusFunction& u);

// Sup-norm of the full-equation residual (w.dphi)^2 v - (1+eps int|grad v|^2)Lap v
// - eps f for v = v0 + u, evaluated pointwise on a dense collocation grid with
// grid quadrature for the energy integral.
double collocation_residual_sup(const ProblemData& pd, double lambda,
                                const TorusFunction& u, int grid_oversample = 3);

}  // namespace kqp

#endif
