#include "kqp/kirchhoff.hpp"

#include <cmath>

#include "kqp/grid.hpp"

namespace kqp {

namespace {

void require_zero_x_mean(const TorusFunction& u, const char* who) {
  if (!u.has_zero_x_mean())
    throw DomainError(std::string(who) + ": input has nonzero x-average");
}

}  // namespace

ProblemData make_problem(const FrequencyData& fd, double epsilon, const TorusFunction& f,
                         double mean_tol) {
  ProblemData pd;
  pd.fd = fd;
  pd.epsilon = epsilon;
  pd.f = f;
  MultiIndex origin{std::vector<int>(f.nu(), 0), std::vector<int>(f.d(), 0)};
  double total = std::abs(f.coeff(origin));
  double scale = std::max(f.sobolev_norm(s0_of(f.nu(), f.d())), 1e-300);
  if (total > mean_tol * scale)
    throw DomainError("make_problem: forcing has nonzero total average");
  auto [f0, g] = x_mean_split(f);
  pd.f0 = f0;
  pd.g = g;
  return pd;
}

TorusFunction residual(const ProblemData& pd, double lambda, const TorusFunction& u) {
  require_zero_x_mean(u, "residual");
  auto omega = pd.fd.omega(lambda);
  TorusFunction r = omega_dphi(u, omega, 2);

  TorusFunction a = compute_a(pd, u);  // eps * energy, phi-only
  TorusFunction lap = laplacian(u);
  r = sub(r, lap);
  // -(a(phi)) Lap u, truncated back to u's box
  TorusFunction alap = multiply(a, lap).resized(u.box().Lphi(), u.box().Lx());
  r = sub(r, alap);
  r = sub(r, scaled(pd.g.resized(u.box().Lphi(), u.box().Lx()), pd.epsilon));
  return r.resized(u.box().Lphi(), u.box().Lx());
}

TorusFunction recover_v0(const ProblemData& pd, double lambda) {
  auto omega = pd.fd.omega(lambda);
  return scaled(invert_omega_dphi(pd.f0, omega, 2), pd.epsilon);
}

TorusFunction compute_a(const ProblemData& pd, const TorusFunction& u) {
  require_zero_x_mean(u, "compute_a");
  // kept exact on the doubled phi box; truncating here would detune the
  // linearization from the residual
  return scaled(grad_sq_x_integral(u), pd.epsilon);
}

TorusFunction apply_linearized(const ProblemData& pd, double lambda,
                               const TorusFunction& u, const TorusFunction& h) {
  require_zero_x_mean(u, "apply_linearized");
  require_zero_x_mean(h, "apply_linearized");
  auto omega = pd.fd.omega(lambda);
  int Lp = std::max(u.box().Lphi(), h.box().Lphi());
  int Lx = std::max(u.box().Lx(), h.box().Lx());

  TorusFunction out = omega_dphi(h, omega, 2).resized(Lp, Lx);
  TorusFunction laph = laplacian(h);
  out = sub(out, laph.resized(Lp, Lx));
  TorusFunction a = compute_a(pd, u);
  out = sub(out, multiply(a, laph).resized(Lp, Lx));

  // rank-type term: +2 eps Lap u * q(phi), q = int (Lap u) h dx
  TorusFunction lapu = laplacian(u);
  TorusFunction q = x_integral_product(lapu, h);
  TorusFunction rank = scaled(multiply(lapu, q), 2.0 * pd.epsilon);
  out = add(out, rank.resized(Lp, Lx));
  return out.resized(Lp, Lx);
}

TorusFunction quadratic_remainder(const ProblemData& pd, double lambda,
                                  const TorusFunction& u, const TorusFunction& h) {
  TorusFunction uh = add(u, h);
  TorusFunction q = sub(residual(pd, lambda, uh), residual(pd, lambda, u.resized(
      uh.box().Lphi(), uh.box().Lx())));
  return sub(q, apply_linearized(pd, lambda, u, h).resized(q.box().Lphi(), q.box().Lx()));
}

double collocation_residual_sup(const ProblemData& pd, double lambda,
                                const TorusFunction& u, int grid_oversample) {
  auto omega = pd.fd.omega(lambda);
  TorusFunction v0 = recover_v0(pd, lambda);
  int Lp = std::max({u.box().Lphi(), v0.box().Lphi(), pd.f.box().Lphi()});
  int Lx = std::max(u.box().Lx(), pd.f.box().Lx());
  TorusFunction v = add(u.resized(Lp, Lx), v0.resized(Lp, Lx));

  TorusFunction vtt = omega_dphi(v, omega, 2).resized(Lp, Lx);
  TorusFunction lapv = laplacian(v).resized(Lp, Lx);
  TorusFunction fr = pd.f.resized(Lp, Lx);
  auto grads = grad_x(v);

  const int nu = v.nu(), d = v.d();
  const Box& bx = v.box();
  const int Gp = grid_oversample * (2 * Lp + 1) + 1;
  const int Gx = grid_oversample * (2 * Lx + 1) + 1;
  long np = 1, nx = 1;
  for (int i = 0; i < nu; ++i) np *= Gp;
  for (int i = 0; i < d; ++i) nx *= Gx;

  // per-axis phase tables e^(i c theta_m)
  std::vector<std::vector<cplx>> tp(Gp, std::vector<cplx>(2 * Lp + 1));
  for (int m = 0; m < Gp; ++m)
    for (int c = -Lp; c <= Lp; ++c)
      tp[m][c + Lp] = std::polar(1.0, c * (2 * M_PI * m / Gp));
  std::vector<std::vector<cplx>> tx(Gx, std::vector<cplx>(2 * Lx + 1));
  for (int m = 0; m < Gx; ++m)
    for (int c = -Lx; c <= Lx; ++c)
      tx[m][c + Lx] = std::polar(1.0, c * (2 * M_PI * m / Gx));

  // mode list with per-function coefficients
  struct Mode { MultiIndex k; cplx vtt, lapv, f; std::vector<cplx> g; };
  std::vector<Mode> modes;
  for (long f = 0; f < bx.size(); ++f) {
    Mode md;
    md.k = bx.unflat(f);
    md.vtt = vtt.coeffs()[f];
    md.lapv = lapv.coeffs()[f];
    md.f = fr.coeffs()[f];
    md.g.resize(d);
    for (int c = 0; c < d; ++c) md.g[c] = grads[c].coeffs()[f];
    bool any = md.vtt != cplx(0, 0) || md.lapv != cplx(0, 0) || md.f != cplx(0, 0);
    for (int c = 0; c < d; ++c) any = any || md.g[c] != cplx(0, 0);
    if (any) modes.push_back(std::move(md));
  }

  auto phi_digits = [&](long m) {
    std::vector<int> dg(nu);
    for (int i = nu - 1; i >= 0; --i) { dg[i] = static_cast<int>(m % Gp); m /= Gp; }
    return dg;
  };
  auto x_digits = [&](long m) {
    std::vector<int> dg(d);
    for (int i = d - 1; i >= 0; --i) { dg[i] = static_cast<int>(m % Gx); m /= Gx; }
    return dg;
  };

  const double cell = std::pow(2 * M_PI / Gx, d);
  double worst = 0;
  std::vector<std::vector<int>> xdig(nx);
  for (long mx = 0; mx < nx; ++mx) xdig[mx] = x_digits(mx);

  for (long mp = 0; mp < np; ++mp) {
    auto pdig = phi_digits(mp);
    // phi-phases per mode are shared by the whole x row
    std::vector<cplx> pphase(modes.size());
    for (size_t i = 0; i < modes.size(); ++i) {
      cplx e(1, 0);
      for (int a = 0; a < nu; ++a) e *= tp[pdig[a]][modes[i].k.ell[a] + Lp];
      pphase[i] = e;
    }
    // one sweep per x point; the energy quadrature must finish before the
    // residual row can be combined
    double energy = 0;
    std::vector<double> vtt_row(nx), lap_row(nx), f_row(nx);
    for (long mx = 0; mx < nx; ++mx) {
      std::vector<cplx> gval(d, cplx(0, 0));
      cplx rvtt(0, 0), rlap(0, 0), rf(0, 0);
      for (size_t i = 0; i < modes.size(); ++i) {
        cplx e = pphase[i];
        for (int a = 0; a < d; ++a) e *= tx[xdig[mx][a]][modes[i].k.j[a] + Lx];
        for (int c = 0; c < d; ++c) gval[c] += modes[i].g[c] * e;
        rvtt += modes[i].vtt * e;
        rlap += modes[i].lapv * e;
        rf += modes[i].f * e;
      }
      double g2 = 0;
      for (int c = 0; c < d; ++c) g2 += gval[c].real() * gval[c].real();
      energy += g2 * cell;
      vtt_row[mx] = rvtt.real();
      lap_row[mx] = rlap.real();
      f_row[mx] = rf.real();
    }
    for (long mx = 0; mx < nx; ++mx) {
      double r = vtt_row[mx] - (1.0 + pd.epsilon * energy) * lap_row[mx] -
                 pd.epsilon * f_row[mx];
      worst = std::max(worst, std::abs(r));
    }
  }
  return worst;
}

}  // namespace kqp
