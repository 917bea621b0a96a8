#include "kqp/grid.hpp"

#include <cmath>

namespace kqp {

PhiGrid::PhiGrid(int nu, int Lphi, int oversample) : nu_(nu), Lphi_(Lphi) {
  G_ = oversample * (2 * Lphi + 1) + 1;
  npoints_ = 1;
  for (int i = 0; i < nu_; ++i) npoints_ *= G_;
}

std::vector<double> PhiGrid::point(long m) const {
  std::vector<double> phi(nu_);
  for (int i = nu_ - 1; i >= 0; --i) {
    phi[i] = 2 * M_PI * static_cast<double>(m % G_) / G_;
    m /= G_;
  }
  return phi;
}

Eigen::VectorXcd PhiGrid::eval(const TorusFunction& f) const {
  if (!f.is_phi_only()) throw DomainError("PhiGrid::eval: not a phi-only function");
  // per-axis DFT factors keep this O(G^nu * nl) with small constants
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(npoints_);
  const Box& b = f.box();
  for (long c = 0; c < b.size(); ++c) {
    cplx v = f.coeffs()[c];
    if (v == cplx(0, 0)) continue;
    MultiIndex k = b.unflat(c);
    for (long m = 0; m < npoints_; ++m) {
      double ph = 0;
      long mm = m;
      for (int i = nu_ - 1; i >= 0; --i) {
        ph += k.ell[i] * (2 * M_PI * static_cast<double>(mm % G_) / G_);
        mm /= G_;
      }
      out[m] += v * std::polar(1.0, ph);
    }
  }
  return out;
}

TorusFunction PhiGrid::expand(const Eigen::VectorXcd& values, int d, int Lout) const {
  TorusFunction out(Box(nu_, d, Lout, 0));
  const Box& b = out.box();
  for (long c = 0; c < b.size(); ++c) {
    MultiIndex k = b.unflat(c);
    if (!is_zero(k.j)) continue;
    cplx acc(0, 0);
    for (long m = 0; m < npoints_; ++m) {
      double ph = 0;
      long mm = m;
      for (int i = nu_ - 1; i >= 0; --i) {
        ph += k.ell[i] * (2 * M_PI * static_cast<double>(mm % G_) / G_);
        mm /= G_;
      }
      acc += values[m] * std::polar(1.0, -ph);
    }
    out.coeffs()[c] = acc / static_cast<double>(npoints_);
  }
  return out;
}

cplx eval_phi_at(const TorusFunction& f, const std::vector<double>& phi) {
  cplx acc(0, 0);
  const Box& b = f.box();
  for (long c = 0; c < b.size(); ++c) {
    cplx v = f.coeffs()[c];
    if (v == cplx(0, 0)) continue;
    MultiIndex k = b.unflat(c);
    double ph = 0;
    for (int i = 0; i < b.nu(); ++i) ph += k.ell[i] * phi[i];
    acc += v * std::polar(1.0, ph);
  }
  return acc;
}

double eval_phi_at_real(const TorusFunction& f, const std::vector<double>& phi) {
  return eval_phi_at(f, phi).real();
}

double eval_at(const TorusFunction& h, const std::vector<double>& phi,
               const std::vector<double>& x) {
  cplx acc(0, 0);
  const Box& b = h.box();
  for (long c = 0; c < b.size(); ++c) {
    cplx v = h.coeffs()[c];
    if (v == cplx(0, 0)) continue;
    MultiIndex k = b.unflat(c);
    double ph = 0;
    for (int i = 0; i < b.nu(); ++i) ph += k.ell[i] * phi[i];
    for (int i = 0; i < b.d(); ++i) ph += k.j[i] * x[i];
    acc += v * std::polar(1.0, ph);
  }
  return acc.real();
}

}  // namespace kqp
