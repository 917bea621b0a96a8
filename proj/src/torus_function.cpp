#include "kqp/torus_function.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kqp {

std::string to_string_index(const MultiIndex& k) {
  std::ostringstream os;
  os << "(ell=[";
  for (size_t i = 0; i < k.ell.size(); ++i) os << (i ? "," : "") << k.ell[i];
  os << "], j=[";
  for (size_t i = 0; i < k.j.size(); ++i) os << (i ? "," : "") << k.j[i];
  os << "])";
  return os.str();
}

void TorusFunction::set_coeff(const MultiIndex& k, cplx v) {
  long f = box_.flat(k);
  if (f < 0) throw IndexError("set_coeff: index outside box " + to_string_index(k));
  c_[f] = v;
}

void TorusFunction::set_mode_pair(const MultiIndex& k, cplx v) {
  set_coeff(k, v);
  set_coeff(negate(k), std::conj(v));
}

double TorusFunction::sobolev_norm(double s) const {
  const int L = std::max(box_.Lphi(), box_.Lx());
  // weights up to L^(2s); switch to log accumulation when that would overflow
  if (2.0 * s * std::log10(std::max(2, L)) < 280.0) {
    double acc = 0;
    for (long f = 0; f < box_.size(); ++f) {
      double a = std::norm(c_[f]);
      if (a == 0) continue;
      acc += a * std::pow(weight(box_.unflat(f)), 2 * s);
    }
    return std::sqrt(acc);
  }
  double l = log10_sobolev_norm(s);
  return l > 300 ? std::numeric_limits<double>::infinity() : std::pow(10.0, l);
}

double TorusFunction::log10_sobolev_norm(double s) const {
  // log10 ||u||_s computed as a stable log-sum-exp over modes
  double m = -std::numeric_limits<double>::infinity();
  std::vector<double> logs;
  logs.reserve(box_.size());
  for (long f = 0; f < box_.size(); ++f) {
    double a = std::abs(c_[f]);
    if (a == 0) continue;
    double t = std::log10(a) + s * std::log10(weight(box_.unflat(f)));
    logs.push_back(t);
    m = std::max(m, t);
  }
  if (logs.empty()) return -std::numeric_limits<double>::infinity();
  double acc = 0;
  for (double t : logs) acc += std::pow(10.0, 2 * (t - m));
  return m + 0.5 * std::log10(acc);
}

double TorusFunction::x_mean_defect() const {
  double worst = 0;
  for (long f = 0; f < box_.size(); ++f) {
    MultiIndex k = box_.unflat(f);
    if (is_zero(k.j)) worst = std::max(worst, std::abs(c_[f]));
  }
  double scale = sobolev_norm(s0_of(nu(), d()));
  return scale > 0 ? worst / scale : worst;
}

bool TorusFunction::has_zero_x_mean(double tol) const { return x_mean_defect() <= tol; }

double TorusFunction::reality_defect() const {
  double worst = 0;
  for (long f = 0; f < box_.size(); ++f) {
    MultiIndex k = box_.unflat(f);
    worst = std::max(worst, std::abs(c_[f] - std::conj(coeff(negate(k)))));
  }
  return worst;
}

void TorusFunction::enforce_reality() {
  for (long f = 0; f < box_.size(); ++f) {
    MultiIndex k = box_.unflat(f);
    long g = box_.flat(negate(k));
    cplx avg = 0.5 * (c_[f] + std::conj(c_[g]));
    c_[f] = avg;
    c_[g] = std::conj(avg);
  }
}

TorusFunction TorusFunction::resized(int Lphi, int Lx) const {
  TorusFunction out(Box(nu(), d(), Lphi, Lx));
  for (long f = 0; f < box_.size(); ++f) {
    if (c_[f] == cplx(0, 0)) continue;
    MultiIndex k = box_.unflat(f);
    long g = out.box_.flat(k);
    if (g >= 0) out.c_[g] = c_[f];
  }
  return out;
}

TorusFunction project(const TorusFunction& u, double N, bool complement) {
  TorusFunction out(u.box());
  for (long f = 0; f < u.size(); ++f) {
    MultiIndex k = u.box().unflat(f);
    int n = sup_norm(k);
    bool in_EN = n > 0 && n <= N;
    if (in_EN != complement) out.coeffs()[f] = u.coeffs()[f];
  }
  return out;
}

std::pair<TorusFunction, TorusFunction> x_mean_split(const TorusFunction& v) {
  TorusFunction v0(v.box()), u(v.box());
  for (long f = 0; f < v.size(); ++f) {
    MultiIndex k = v.box().unflat(f);
    (is_zero(k.j) ? v0 : u).coeffs()[f] = v.coeffs()[f];
  }
  return {v0, u};
}

namespace {

Box max_box(const TorusFunction& u, const TorusFunction& v) {
  if (u.nu() != v.nu() || u.d() != v.d())
    throw DomainError("incompatible torus dimensions");
  return Box(u.nu(), u.d(), std::max(u.box().Lphi(), v.box().Lphi()),
             std::max(u.box().Lx(), v.box().Lx()));
}

}  // namespace

TorusFunction add(const TorusFunction& u, const TorusFunction& v) {
  TorusFunction out(max_box(u, v));
  for (long f = 0; f < out.size(); ++f) {
    MultiIndex k = out.box().unflat(f);
    out.coeffs()[f] = u.coeff(k) + v.coeff(k);
  }
  return out;
}

TorusFunction sub(const TorusFunction& u, const TorusFunction& v) {
  TorusFunction out(max_box(u, v));
  for (long f = 0; f < out.size(); ++f) {
    MultiIndex k = out.box().unflat(f);
    out.coeffs()[f] = u.coeff(k) - v.coeff(k);
  }
  return out;
}

TorusFunction scaled(const TorusFunction& u, double c) {
  TorusFunction out = u;
  out.coeffs() *= c;
  return out;
}

TorusFunction multiply(const TorusFunction& u, const TorusFunction& v) {
  TorusFunction out(max_box(u, v));
  // direct convolution, truncated to the output box
  for (long fu = 0; fu < u.size(); ++fu) {
    cplx cu = u.coeffs()[fu];
    if (cu == cplx(0, 0)) continue;
    MultiIndex ku = u.box().unflat(fu);
    for (long fv = 0; fv < v.size(); ++fv) {
      cplx cv = v.coeffs()[fv];
      if (cv == cplx(0, 0)) continue;
      long g = out.box().flat(ku + v.box().unflat(fv));
      if (g >= 0) out.coeffs()[g] += cu * cv;
    }
  }
  return out;
}

std::vector<TorusFunction> grad_x(const TorusFunction& u) {
  std::vector<TorusFunction> g(u.d(), TorusFunction(u.box()));
  for (long f = 0; f < u.size(); ++f) {
    if (u.coeffs()[f] == cplx(0, 0)) continue;
    MultiIndex k = u.box().unflat(f);
    for (int c = 0; c < u.d(); ++c)
      g[c].coeffs()[f] = cplx(0, k.j[c]) * u.coeffs()[f];
  }
  return g;
}

TorusFunction laplacian(const TorusFunction& u) {
  TorusFunction out(u.box());
  for (long f = 0; f < u.size(); ++f) {
    MultiIndex k = u.box().unflat(f);
    out.coeffs()[f] = -j_sq(k.j) * u.coeffs()[f];
  }
  return out;
}

namespace {

double omega_dot(const std::vector<double>& omega, const std::vector<int>& ell) {
  double s = 0;
  for (size_t i = 0; i < ell.size(); ++i) s += omega[i] * ell[i];
  return s;
}

}  // namespace

TorusFunction omega_dphi(const TorusFunction& u, const std::vector<double>& omega,
                         int order) {
  if (static_cast<int>(omega.size()) != u.nu())
    throw DomainError("omega_dphi: omega dimension mismatch");
  TorusFunction out(u.box());
  for (long f = 0; f < u.size(); ++f) {
    MultiIndex k = u.box().unflat(f);
    cplx sym(0, omega_dot(omega, k.ell));
    out.coeffs()[f] = std::pow(sym, order) * u.coeffs()[f];
  }
  return out;
}

TorusFunction invert_omega_dphi(const TorusFunction& u, const std::vector<double>& omega,
                                int order, double mean_tol, double divisor_floor) {
  if (static_cast<int>(omega.size()) != u.nu())
    throw DomainError("invert_omega_dphi: omega dimension mismatch");
  double scale = u.sobolev_norm(s0_of(u.nu(), u.d()));
  TorusFunction out(u.box());
  for (long f = 0; f < u.size(); ++f) {
    cplx c = u.coeffs()[f];
    MultiIndex k = u.box().unflat(f);
    if (is_zero(k.ell)) {
      if (std::abs(c) > mean_tol * std::max(scale, 1e-300))
        throw MeanNotZero("invert_omega_dphi: nonzero phi-average at " +
                          to_string_index(k));
      continue;  // the exactly-averaged part has no preimage; drop the dust
    }
    if (c == cplx(0, 0)) continue;
    double od = omega_dot(omega, k.ell);
    if (std::abs(od) < divisor_floor)
      throw SmallDivisorUnderflow("invert_omega_dphi: |omega.ell| < floor at " +
                                  to_string_index(k));
    out.coeffs()[f] = c / std::pow(cplx(0, od), order);
  }
  return out;
}

TorusFunction grad_sq_x_integral(const TorusFunction& u) {
  // coefficients A_m = (2pi)^d sum_{l', j'} |j'|^2 u_{m-l', j'} u_{l', -j'}
  TorusFunction out(Box(u.nu(), u.d(), 2 * u.box().Lphi(), 0));
  const double vol = std::pow(2 * M_PI, u.d());
  for (long f1 = 0; f1 < u.size(); ++f1) {
    cplx c1 = u.coeffs()[f1];
    if (c1 == cplx(0, 0)) continue;
    MultiIndex k1 = u.box().unflat(f1);
    double w = j_sq(k1.j);
    if (w == 0) continue;
    for (long f2 = 0; f2 < u.size(); ++f2) {
      cplx c2 = u.coeffs()[f2];
      if (c2 == cplx(0, 0)) continue;
      MultiIndex k2 = u.box().unflat(f2);
      bool opposite = true;
      for (int i = 0; i < u.d(); ++i)
        if (k1.j[i] + k2.j[i] != 0) { opposite = false; break; }
      if (!opposite) continue;
      MultiIndex m{k1.ell, std::vector<int>(u.d(), 0)};
      for (int i = 0; i < u.nu(); ++i) m.ell[i] += k2.ell[i];
      long g = out.box().flat(m);
      if (g >= 0) out.coeffs()[g] += vol * w * c1 * c2;
    }
  }
  return out;
}

TorusFunction x_integral_product(const TorusFunction& a, const TorusFunction& b) {
  if (a.nu() != b.nu() || a.d() != b.d())
    throw DomainError("x_integral_product: incompatible dimensions");
  TorusFunction out(Box(a.nu(), a.d(), a.box().Lphi() + b.box().Lphi(), 0));
  const double vol = std::pow(2 * M_PI, a.d());
  for (long f1 = 0; f1 < a.size(); ++f1) {
    cplx c1 = a.coeffs()[f1];
    if (c1 == cplx(0, 0)) continue;
    MultiIndex k1 = a.box().unflat(f1);
    for (long f2 = 0; f2 < b.size(); ++f2) {
      cplx c2 = b.coeffs()[f2];
      if (c2 == cplx(0, 0)) continue;
      MultiIndex k2 = b.box().unflat(f2);
      bool opposite = true;
      for (int i = 0; i < a.d(); ++i)
        if (k1.j[i] + k2.j[i] != 0) { opposite = false; break; }
      if (!opposite) continue;
      MultiIndex m{k1.ell, std::vector<int>(a.d(), 0)};
      for (int i = 0; i < a.nu(); ++i) m.ell[i] += k2.ell[i];
      long g = out.box().flat(m);
      if (g >= 0) out.coeffs()[g] += vol * c1 * c2;
    }
  }
  return out;
}

}  // namespace kqp
