#include "kqp/diophantine.hpp"

#include <cmath>
#include <functional>

#include "kqp/errors.hpp"
#include "kqp/indexing.hpp"

namespace kqp {

FrequencyData frequency_preset(const std::string& name) {
  FrequencyData fd;
  if (name == "sqrt2") {
    fd.omega_bar = {std::sqrt(2.0)};
    fd.gamma0 = 0.4;
  } else if (name == "golden") {
    fd.omega_bar = {(1.0 + std::sqrt(5.0)) / 2.0};
    fd.gamma0 = 0.3;
  } else if (name == "qroot2") {
    fd.omega_bar = {std::pow(2.0, 0.25)};
    fd.gamma0 = 0.15;
  } else if (name == "one_cbrt2") {
    // 1, 2^(1/3): products 1, 2^(1/3), 2^(2/3) are rationally independent
    fd.omega_bar = {1.0, std::cbrt(2.0)};
    fd.gamma0 = 0.02;
  } else if (name == "qroot2_qroot3") {
    // squares sqrt2, sqrt3 and cross product 6^(1/4) stay rationally
    // independent together with 1
    fd.omega_bar = {std::pow(2.0, 0.25), std::pow(3.0, 0.25)};
    fd.gamma0 = 0.02;
  } else {
    throw ConfigError("unknown omega_bar preset '" + name + "'");
  }
  return fd;
}

namespace {

// Iterates all integer vectors of length n with |v|_inf <= L.
void for_each_vector(int n, int L, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> v(n, -L);
  while (true) {
    fn(v);
    int i = n - 1;
    while (i >= 0 && v[i] == L) v[i--] = -L;
    if (i < 0) break;
    ++v[i];
  }
}

}  // namespace

DioReport check_dio(const FrequencyData& fd, int L) {
  if (L < 1) throw DomainError("check_dio: L >= 1 required");
  const int nu = fd.nu();
  DioReport rep;
  rep.min_value = std::numeric_limits<double>::infinity();
  for_each_vector(nu, L, [&](const std::vector<int>& ell) {
    if (is_zero(ell)) return;
    double dot = 0;
    for (int i = 0; i < nu; ++i) dot += fd.omega_bar[i] * ell[i];
    double v = std::abs(dot) * std::pow(sup_norm(ell), nu);
    if (v < rep.min_value) {
      rep.min_value = v;
      rep.worst_ell = ell;
    }
  });
  rep.ok = rep.min_value >= fd.gamma0;
  return rep;
}

DioQuadReport check_dioquad(const FrequencyData& fd, int P) {
  if (P < 1) throw DomainError("check_dioquad: P >= 1 required");
  const int nu = fd.nu();
  const int np = nu * (nu + 1) / 2;
  std::vector<double> prods(np);
  {
    int idx = 0;
    for (int a = 0; a < nu; ++a)
      for (int b = a; b < nu; ++b) prods[idx++] = fd.omega_bar[a] * fd.omega_bar[b];
  }
  DioQuadReport rep;
  rep.min_value = std::numeric_limits<double>::infinity();
  for_each_vector(np, P, [&](const std::vector<int>& p) {
    if (is_zero(p)) return;
    double val = 0;
    for (int i = 0; i < np; ++i) val += prods[i] * p[i];
    double v = std::abs(val) * std::pow(sup_norm(p), nu * (nu + 1));
    rep.min_value = std::min(rep.min_value, v);
  });
  rep.ok = rep.min_value >= fd.gamma0;
  return rep;
}

bool in_I_bar(double lambda, const FrequencyData& fd, int d, int N0, double tau0) {
  const int nu = fd.nu();
  const double thresh = std::pow(static_cast<double>(N0), -tau0);
  bool ok = true;
  for_each_vector(nu, N0, [&](const std::vector<int>& ell) {
    if (!ok) return;
    double dot = 0;
    for (int i = 0; i < nu; ++i) dot += lambda * fd.omega_bar[i] * ell[i];
    const double dot2 = dot * dot;
    for_each_vector(d, N0, [&](const std::vector<int>& j) {
      if (!ok || is_zero(j)) return;
      if (std::abs(dot2 - j_sq(j)) < thresh) ok = false;
    });
  });
  return ok;
}

bool in_I_tilde(double lambda, const FrequencyData& fd, int N0, int max_coeff) {
  const int nu = fd.nu();
  const int np = nu * (nu + 1) / 2;
  std::vector<double> prods(np);
  {
    int idx = 0;
    for (int a = 0; a < nu; ++a)
      for (int b = a; b < nu; ++b)
        prods[idx++] = lambda * fd.omega_bar[a] * lambda * fd.omega_bar[b];
  }
  bool ok = true;
  // coefficient vector (p0, p_ab); |p| is its sup norm
  for_each_vector(np + 1, max_coeff, [&](const std::vector<int>& p) {
    if (!ok || is_zero(p)) return;
    double val = p[0];
    for (int i = 0; i < np; ++i) val += prods[i] * p[i + 1];
    double bound = (1.0 / N0) / (1.0 + std::pow(sup_norm(p), nu * (nu + 1)));
    if (std::abs(val) < bound) ok = false;
  });
  return ok;
}

}  // namespace kqp
