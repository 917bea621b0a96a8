#include "kqp/reduction.hpp"

#include <cmath>
#include <unordered_map>

#include "kqp/grid.hpp"

namespace kqp {

namespace {

Box phi_box(int nu, int L) { return Box(nu, 1, L, 0); }

double omega_dot(const std::vector<double>& omega, const std::vector<int>& ell) {
  double s = 0;
  for (size_t i = 0; i < ell.size(); ++i) s += omega[i] * ell[i];
  return s;
}

std::vector<double> shifted(const std::vector<double>& phi, const std::vector<double>& omega,
                            double t) {
  std::vector<double> out = phi;
  for (size_t i = 0; i < out.size(); ++i) out[i] += omega[i] * t;
  return out;
}

}  // namespace

double compute_mu(const TorusFunction& a, int oversample) {
  if (!a.is_phi_only()) throw DomainError("compute_mu: a must be phi-only");
  PhiGrid grid(a.nu(), a.box().Lphi(), oversample);
  Eigen::VectorXcd av = grid.eval(a);
  double acc = 0;
  for (long m = 0; m < grid.npoints(); ++m) {
    double v = 1.0 + av[m].real();
    if (v <= 0) throw NonPositiveArgument("compute_mu: 1 + a <= 0 on grid");
    acc += std::sqrt(v);
  }
  double mean = acc / grid.npoints();
  return mean * mean;
}

TorusFunction compute_alpha(const TorusFunction& a, double mu,
                            const std::vector<double>& omega, int Lout, int oversample) {
  if (Lout < 0) Lout = a.box().Lphi();
  PhiGrid grid(a.nu(), std::max(Lout, a.box().Lphi()), oversample);
  Eigen::VectorXcd av = grid.eval(a);
  Eigen::VectorXcd w(grid.npoints());
  const double rmu = std::sqrt(mu);
  double mean = 0, amp = 0;
  for (long m = 0; m < grid.npoints(); ++m) {
    double v = 1.0 + av[m].real();
    if (v <= 0) throw NonPositiveArgument("compute_alpha: 1 + a <= 0 on grid");
    w[m] = std::sqrt(v) / rmu - 1.0;
    mean += w[m].real();
    amp = std::max(amp, std::abs(w[m].real()));
  }
  mean /= grid.npoints();
  // mu is chosen exactly so that this average vanishes; anything beyond
  // quadrature dust means the caller passed an inconsistent mu
  if (std::abs(mean) > 1e-8 * std::max(1.0, amp))
    throw MeanNotZero("compute_alpha: integrand average inconsistent with mu");
  for (long m = 0; m < grid.npoints(); ++m) w[m] -= mean;
  TorusFunction integrand = grid.expand(w, a.d(), Lout);
  integrand.enforce_reality();
  MultiIndex origin{std::vector<int>(a.nu(), 0), std::vector<int>(a.d(), 0)};
  integrand.set_coeff(origin, 0.0);
  return invert_omega_dphi(integrand, omega, 1, 1e-10);
}

TorusFunction invert_diffeo(const TorusFunction& alpha, const std::vector<double>& omega,
                            int Lout, int oversample, double tol, int max_iter) {
  if (Lout < 0) Lout = alpha.box().Lphi();
  TorusFunction slope = omega_dphi(alpha, omega, 1);
  PhiGrid grid(alpha.nu(), std::max(Lout, alpha.box().Lphi()), oversample);
  {
    Eigen::VectorXcd sv = grid.eval(slope);
    double worst = 0;
    for (long m = 0; m < grid.npoints(); ++m) worst = std::max(worst, std::abs(sv[m].real()));
    if (worst >= 0.5)
      throw DomainError("invert_diffeo: |w.dphi alpha| >= 1/2, map not invertible");
  }
  Eigen::VectorXcd vals(grid.npoints());
  for (long m = 0; m < grid.npoints(); ++m) {
    auto theta = grid.point(m);
    double t = 0;
    bool done = false;
    for (int it = 0; it < max_iter; ++it) {
      double tn = -eval_phi_at_real(alpha, shifted(theta, omega, t));
      if (std::abs(tn - t) <= tol) { t = tn; done = true; break; }
      t = tn;
    }
    if (!done) throw NoConvergence("invert_diffeo: fixed point did not converge");
    vals[m] = t;
  }
  TorusFunction breve = grid.expand(vals, alpha.d(), Lout);
  breve.enforce_reality();
  return breve;
}

TorusFunction compose_with_diffeo(const TorusFunction& h, const TorusFunction& alpha,
                                  const std::vector<double>& omega, int Lout_phi,
                                  int oversample) {
  if (Lout_phi < 0) Lout_phi = h.box().Lphi();
  const int nu = h.nu(), d = h.d();
  PhiGrid grid(nu, std::max(Lout_phi, h.box().Lphi()), oversample);
  const long G = grid.npoints();

  std::vector<std::vector<double>> pts(G);
  for (long m = 0; m < G; ++m) {
    auto phi = grid.point(m);
    pts[m] = shifted(phi, omega, eval_phi_at_real(alpha, phi));
  }

  TorusFunction out(Box(nu, d, Lout_phi, h.box().Lx()));
  Box hslice = phi_box(nu, h.box().Lphi());
  Box oslice = phi_box(nu, Lout_phi);
  Box xiter(1, d, 0, h.box().Lx());
  for (long xf = 0; xf < xiter.size(); ++xf) {
    std::vector<int> j = xiter.unflat(xf).j;
    Eigen::VectorXcd vals = Eigen::VectorXcd::Zero(G);
    bool any = false;
    for (long c = 0; c < hslice.size(); ++c) {
      MultiIndex k = hslice.unflat(c);
      cplx v = h.coeff(MultiIndex{k.ell, j});
      if (v == cplx(0, 0)) continue;
      any = true;
      for (long m = 0; m < G; ++m) {
        double ph = 0;
        for (int i = 0; i < nu; ++i) ph += k.ell[i] * pts[m][i];
        vals[m] += v * std::polar(1.0, ph);
      }
    }
    if (!any) continue;
    TorusFunction os = grid.expand(vals, 1, Lout_phi);
    for (long c = 0; c < oslice.size(); ++c) {
      long f = out.box().flat(MultiIndex{oslice.unflat(c).ell, j});
      if (f >= 0) out.coeffs()[f] = os.coeffs()[c];
    }
  }
  out.enforce_reality();
  return out;
}

std::pair<TorusFunction, TorusFunction> compute_a1_rho(const TorusFunction& alpha, double mu,
                                                       const std::vector<double>& omega,
                                                       int oversample, double rho_floor) {
  (void)mu;  // the defining formulas involve only alpha and omega
  const int Lf = alpha.box().Lphi();
  TorusFunction breve = invert_diffeo(alpha, omega, Lf, oversample);
  TorusFunction slope = omega_dphi(alpha, omega, 1);
  TorusFunction curv = omega_dphi(alpha, omega, 2);
  PhiGrid grid(alpha.nu(), Lf, oversample);
  const long G = grid.npoints();

  Eigen::VectorXcd rho_v(G), a1_v(G);
  for (long m = 0; m < G; ++m) {
    auto theta = grid.point(m);
    double t = eval_phi_at_real(breve, theta);
    auto phi = shifted(theta, omega, t);
    double sl = eval_phi_at_real(slope, phi);
    double r = (1.0 + sl) * (1.0 + sl);
    if (r < rho_floor) throw NonPositiveArgument("compute_a1_rho: rho below floor on grid");
    rho_v[m] = r;
    a1_v[m] = eval_phi_at_real(curv, phi) / r;
  }
  TorusFunction rho = grid.expand(rho_v, alpha.d(), Lf);
  TorusFunction a1 = grid.expand(a1_v, alpha.d(), Lf);
  rho.enforce_reality();
  a1.enforce_reality();
  return {a1, rho};
}

TorusFunction compute_b(const TorusFunction& a1, const std::vector<double>& omega,
                        int oversample, double mean_tol) {
  MultiIndex origin{std::vector<int>(a1.nu(), 0), std::vector<int>(a1.d(), 0)};
  double mean = std::abs(a1.coeff(origin));
  double scale = std::max(a1.sobolev_norm(s0_of(a1.nu(), a1.d())), 1e-300);
  // relative tolerance with an absolute floor for quadrature dust on tiny a1
  if (mean > mean_tol * scale + 1e-14)
    throw MeanNotZero("compute_b: a1 has nonzero average beyond tolerance");
  // Conjugating (w.dtheta)^2 by the multiplication operator produces
  // 2 b^{-1}(w.dtheta b) w.dtheta, so killing the first-order term
  // a1 w.dtheta requires 2 b^{-1}(w.dtheta b) + a1 = 0, i.e. the exponent
  // carries a factor 1/2.  A plain exp(-(w.dtheta)^{-1} a1) leaves a
  // first-order remainder of size ||a1|| and a non-self-adjoint R2.
  TorusFunction a1z = a1;
  a1z.set_coeff(origin, 0.0);  // the exact a1 integrates to zero
  TorusFunction c = invert_omega_dphi(a1z, omega, 1);
  PhiGrid grid(a1.nu(), a1.box().Lphi(), oversample);
  Eigen::VectorXcd cv = grid.eval(c);
  Eigen::VectorXcd bv(grid.npoints());
  for (long m = 0; m < grid.npoints(); ++m) bv[m] = std::exp(-0.5 * cv[m].real());
  TorusFunction b = grid.expand(bv, a1.d(), a1.box().Lphi());
  b.enforce_reality();
  return b;
}

namespace {

// M[l, l'] = (1/G) sum_m e^{-i l phi_m} e^{i l' (phi_m + w*shift(phi_m))}
Eigen::MatrixXcd composition_matrix(const TorusFunction& shift_fn,
                                    const std::vector<double>& omega, int nu, int LP,
                                    int oversample) {
  Box pb = phi_box(nu, LP);
  PhiGrid grid(nu, LP, oversample);
  const long G = grid.npoints();
  const long n = pb.size();

  Eigen::MatrixXcd E0(G, n), E1(G, n);
  for (long m = 0; m < G; ++m) {
    auto phi = grid.point(m);
    auto phis = shifted(phi, omega, eval_phi_at_real(shift_fn, phi));
    for (long c = 0; c < n; ++c) {
      MultiIndex k = pb.unflat(c);
      double p0 = 0, p1 = 0;
      for (int i = 0; i < nu; ++i) { p0 += k.ell[i] * phi[i]; p1 += k.ell[i] * phis[i]; }
      E0(m, c) = std::polar(1.0, p0);
      E1(m, c) = std::polar(1.0, p1);
    }
  }
  return (E0.adjoint() * E1) / static_cast<double>(G);
}

Eigen::MatrixXcd mult_matrix(const TorusFunction& g, int nu, int LP) {
  Box pb = phi_box(nu, LP);
  const long n = pb.size();
  std::vector<int> jz(g.d(), 0);
  Eigen::MatrixXcd M(n, n);
  for (long r = 0; r < n; ++r) {
    std::vector<int> er = pb.unflat(r).ell;
    for (long c = 0; c < n; ++c) {
      MultiIndex diff{er, jz};
      const std::vector<int>& ec = pb.unflat(c).ell;
      for (int q = 0; q < nu; ++q) diff.ell[q] -= ec[q];
      M(r, c) = g.coeff(diff);
    }
  }
  return M;
}

}  // namespace

ReductionResult reduce(const ProblemData& pd, double lambda, const TorusFunction& u,
                       int box_phi, int box_x, const ReduceOptions& opts) {
  if (!u.has_zero_x_mean()) throw DomainError("reduce: u has nonzero x-average");
  ReductionResult red;
  red.lambda = lambda;
  red.epsilon = pd.epsilon;
  red.omega = pd.fd.omega(lambda);
  red.u = u;
  red.Lw = box_phi;
  red.Lxw = box_x;
  const int pad = opts.pad >= 0 ? opts.pad : std::max(2, box_phi / 2);
  red.Lpad = box_phi + pad;
  const int nu = u.nu(), d = u.d();
  const int Lf = 2 * red.Lpad;

  red.a = scaled(grad_sq_x_integral(u), pd.epsilon).resized(Lf, 0);

  Box pb0 = phi_box(nu, red.Lpad);
  if (red.a.sobolev_norm(0) == 0.0) {
    // a == 0 exactly (u == 0 or eps == 0): every factor takes its closed
    // form, so the assembly is exact rather than grid-accurate
    red.mu = 1.0;
    red.alpha = TorusFunction(Box(nu, d, Lf, 0));
    red.alpha_breve = red.alpha;
    red.a1 = red.alpha;
    red.rho = TorusFunction(Box(nu, d, Lf, 0));
    red.b = red.rho;
    MultiIndex origin{std::vector<int>(nu, 0), std::vector<int>(d, 0)};
    red.rho.set_coeff(origin, 1.0);
    red.b.set_coeff(origin, 1.0);
    const long np0 = pb0.size();
    red.lft = Eigen::MatrixXcd::Identity(np0, np0);
    red.rgt = red.lft;
    red.sec_dev = Eigen::MatrixXcd::Zero(np0, np0);
    red.xw_dev = Eigen::MatrixXcd::Zero(np0, np0);
    red.phi_pad_box_ = pb0;
    red.box_idx_ = DecayMatrix::box_indices(Box(nu, d, box_phi, box_x), true, false);
    const long dim0 = static_cast<long>(red.box_idx_.size());
    red.rank_l_ = Eigen::MatrixXcd::Zero(dim0, np0);
    red.rank_r_ = Eigen::MatrixXcd::Zero(np0, dim0);
    if (opts.materialize) {
      red.R2 = DecayMatrix(red.box_idx_, red.box_idx_);
      red.materialized = true;
    }
    return red;
  }

  // mu on the same grid as alpha keeps the integrand average at rounding level
  red.mu = compute_mu(red.a, opts.oversample);

  red.alpha = compute_alpha(red.a, red.mu, red.omega, Lf, opts.oversample);
  red.alpha_breve = invert_diffeo(red.alpha, red.omega, Lf, opts.oversample);
  {
    auto [a1, rho] = compute_a1_rho(red.alpha, red.mu, red.omega, opts.oversample,
                                    opts.rho_floor);
    red.a1 = std::move(a1);
    red.rho = std::move(rho);
  }
  {
    MultiIndex origin{std::vector<int>(nu, 0), std::vector<int>(d, 0)};
    double scale = std::max(red.a1.sobolev_norm(s0_of(nu, d)), 1e-300);
    red.a1_mean_rel = std::abs(red.a1.coeff(origin)) / scale;
  }
  red.b = compute_b(red.a1, red.omega, opts.oversample, opts.a1_mean_tol);

  Box pb = phi_box(nu, red.Lpad);
  const long np = pb.size();

  Eigen::MatrixXcd MA = composition_matrix(red.alpha, red.omega, nu, red.Lpad,
                                           opts.oversample);
  red.rgt = MA * mult_matrix(red.b, nu, red.Lpad);

  // Adjoint identity: with J(theta) = det D(T^{-1}) = 1 + w.dtheta(breve),
  // one has rho J^2 = 1 and w.d log(J/b^2) = 0, so J/b^2 is the constant
  //   C = J/b^2  and  Phi1 = B^{-1} rho^{-1} A^{-1} = C * (A B)^* = C * Phi2^*.
  // Assembling through Phi2 alone keeps the materialized remainder
  // self-adjoint at rounding level instead of at grid-dust level.
  {
    PhiGrid cg(nu, Lf, opts.oversample);
    Eigen::VectorXcd jt = cg.eval(omega_dphi(red.alpha_breve, red.omega, 1));
    Eigen::VectorXcd bvv = cg.eval(red.b);
    double mean = 0, lo = 1e300, hi = -1e300;
    for (long m = 0; m < cg.npoints(); ++m) {
      double v = (1.0 + jt[m].real()) / (bvv[m].real() * bvv[m].real());
      mean += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    red.gauge = mean / cg.npoints();
    red.gauge_spread = hi - lo;
  }
  red.lft = red.gauge * red.rgt.adjoint();

  Eigen::VectorXd somega(np);
  for (long c = 0; c < np; ++c) somega[c] = omega_dot(red.omega, pb.unflat(c).ell);

  // sec_dev = C (S rgt)^* (S rgt) * (-1) + S^2, Hermitian by construction
  {
    Eigen::MatrixXcd Y = somega.asDiagonal() * red.rgt;
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(np, np);
    H.selfadjointView<Eigen::Lower>().rankUpdate(Y.adjoint(), 1.0);
    red.sec_dev = -red.gauge * Eigen::MatrixXcd(H.selfadjointView<Eigen::Lower>());
    red.sec_dev.diagonal().array() += somega.array().square().cast<cplx>();
  }
  // xw_dev = C (rgt^* rgt + rgt^* M_a rgt) - mu I
  {
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(np, np);
    H.selfadjointView<Eigen::Lower>().rankUpdate(red.rgt.adjoint(), 1.0);
    red.xw_dev = red.gauge * (Eigen::MatrixXcd(H.selfadjointView<Eigen::Lower>()) +
                              red.rgt.adjoint() * (mult_matrix(red.a, nu, red.Lpad) *
                                                   red.rgt));
    red.xw_dev.diagonal().array() -= red.mu;
  }

  red.phi_pad_box_ = pb;
  red.box_idx_ = DecayMatrix::box_indices(Box(nu, d, box_phi, box_x), true, false);
  const long dim = static_cast<long>(red.box_idx_.size());
  const double vol = std::pow(2 * M_PI, d);

  // conjugated rank-type term as slice products:
  //   rank_l[(l,j),m] = sum_{l2} lft[l,l2] * (-2 eps |j|^2 u_{l2-m, j})
  //   rank_r[m,(l,j)] = sum_{l2} (-(2pi)^d |j|^2 u_{m-l2, -j}) * rgt[l2, l]
  red.rank_l_.resize(dim, np);
  red.rank_r_.resize(np, dim);
  {
    Box xiter(1, d, 0, box_x);
    for (long xf = 0; xf < xiter.size(); ++xf) {
      std::vector<int> j = xiter.unflat(xf).j;
      if (is_zero(j)) continue;
      const double j2 = j_sq(j);
      Eigen::MatrixXcd V(np, np), W(np, np);
      for (long r = 0; r < np; ++r) {
        MultiIndex kr = pb.unflat(r);
        for (long c = 0; c < np; ++c) {
          MultiIndex kc = pb.unflat(c);
          MultiIndex kv{kr.ell, j};
          for (int q = 0; q < nu; ++q) kv.ell[q] -= kc.ell[q];
          V(r, c) = -2.0 * pd.epsilon * j2 * red.u.coeff(kv);
          MultiIndex kw{kr.ell, j};
          for (int q = 0; q < nu; ++q) kw.ell[q] -= kc.ell[q];
          for (int q = 0; q < d; ++q) kw.j[q] = -kw.j[q];
          W(r, c) = -vol * j2 * red.u.coeff(kw);
        }
      }
      Eigen::MatrixXcd LV = red.lft * V;       // rows: padded l, cols: m
      Eigen::MatrixXcd WR = W * red.rgt;       // rows: m, cols: padded l'
      for (long i = 0; i < dim; ++i) {
        const MultiIndex& s = red.box_idx_[i];
        if (s.j != j) continue;
        long pr = pb.flat(MultiIndex{s.ell, std::vector<int>(1, 0)});
        red.rank_l_.row(i) = LV.row(pr);
        red.rank_r_.col(i) = WR.col(pr);
      }
    }
  }

  if (opts.materialize) {
    DecayMatrix R2(red.box_idx_, red.box_idx_);
    for (long i = 0; i < dim; ++i) {
      const MultiIndex& r = red.box_idx_[i];
      long ri = pb.flat(MultiIndex{r.ell, std::vector<int>(1, 0)});
      const double j2 = j_sq(r.j);
      for (long jj = 0; jj < dim; ++jj) {
        const MultiIndex& c = red.box_idx_[jj];
        if (!(c.j == r.j)) continue;
        long ci = pb.flat(MultiIndex{c.ell, std::vector<int>(1, 0)});
        R2.mat()(i, jj) = red.sec_dev(ri, ci) + j2 * red.xw_dev(ri, ci);
      }
    }
    R2.mat() += red.rank_l_ * red.rank_r_;
    red.R2 = std::move(R2);
    red.materialized = true;
  }
  return red;
}

double ReductionResult::diag_entry(const MultiIndex& k) const {
  double od = 0;
  for (size_t i = 0; i < omega.size(); ++i) od += omega[i] * k.ell[i];
  return -od * od + mu * j_sq(k.j);
}

cplx ReductionResult::r2_entry(const MultiIndex& r, const MultiIndex& c) const {
  if (materialized) {
    long i = R2.row_pos(r), j = R2.col_pos(c);
    if (i >= 0 && j >= 0) return R2.mat()(i, j);
  }
  long ri = phi_pad_box_.flat(MultiIndex{r.ell, std::vector<int>(1, 0)});
  long ci = phi_pad_box_.flat(MultiIndex{c.ell, std::vector<int>(1, 0)});
  if (ri < 0 || ci < 0) return cplx(0, 0);  // beyond the padded range the tail is dropped
  cplx v(0, 0);
  if (r.j == c.j) v = sec_dev(ri, ci) + j_sq(r.j) * xw_dev(ri, ci);
  const int nu = static_cast<int>(r.ell.size());
  const int d = static_cast<int>(r.j.size());
  const long np = phi_pad_box_.size();
  const double vol = std::pow(2 * M_PI, d);
  const double jr2 = j_sq(r.j), jc2 = j_sq(c.j);
  // the rank factors vanish outside the x-support of u
  if (sup_norm(r.j) > u.box().Lx() || sup_norm(c.j) > u.box().Lx()) return v;
  if (jr2 > 0 && jc2 > 0 && epsilon != 0) {
    // on-demand rank part for sites beyond the materialized box
    Eigen::VectorXcd lv = Eigen::VectorXcd::Zero(np), rv = Eigen::VectorXcd::Zero(np);
    for (long m = 0; m < np; ++m) {
      const std::vector<int> mell = phi_pad_box_.unflat(m).ell;
      cplx accL(0, 0), accR(0, 0);
      for (long l2 = 0; l2 < np; ++l2) {
        std::vector<int> e2 = phi_pad_box_.unflat(l2).ell;
        MultiIndex kv{e2, r.j};
        for (int q = 0; q < nu; ++q) kv.ell[q] -= mell[q];
        cplx uc = u.coeff(kv);
        if (uc != cplx(0, 0)) accL += lft(ri, l2) * uc;
        MultiIndex kw{mell, c.j};
        for (int q = 0; q < nu; ++q) kw.ell[q] -= e2[q];
        for (int q = 0; q < d; ++q) kw.j[q] = -kw.j[q];
        cplx uw = u.coeff(kw);
        if (uw != cplx(0, 0)) accR += uw * rgt(l2, ci);
      }
      lv[m] = -2.0 * epsilon * jr2 * accL;
      rv[m] = -vol * jc2 * accR;
    }
    v += (lv.array() * rv.array()).sum();
  }
  return v;
}

Eigen::MatrixXcd ReductionResult::r2_window(const std::vector<MultiIndex>& rows,
                                            const std::vector<MultiIndex>& cols) const {
  Eigen::MatrixXcd out(rows.size(), cols.size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols.size(); ++j) out(i, j) = r2_entry(rows[i], cols[j]);
  return out;
}

namespace {

TorusFunction apply_slice_matrix(const Eigen::MatrixXcd& M, const Box& pb,
                                 const TorusFunction& h, int Lpad) {
  const int nu = h.nu(), d = h.d();
  if (h.box().Lphi() > Lpad)
    throw DomainError("slice apply: function wider than the padded range");
  TorusFunction out(Box(nu, d, Lpad, h.box().Lx()));
  Box xiter(1, d, 0, h.box().Lx());
  Box hb = phi_box(nu, h.box().Lphi());
  for (long xf = 0; xf < xiter.size(); ++xf) {
    std::vector<int> j = xiter.unflat(xf).j;
    Eigen::VectorXcd hs = Eigen::VectorXcd::Zero(pb.size());
    bool any = false;
    for (long c = 0; c < hb.size(); ++c) {
      MultiIndex k = hb.unflat(c);
      cplx v = h.coeff(MultiIndex{k.ell, j});
      if (v != cplx(0, 0)) { hs[pb.flat(k)] = v; any = true; }
    }
    if (!any) continue;
    Eigen::VectorXcd ys = M * hs;
    for (long c = 0; c < pb.size(); ++c) {
      if (ys[c] == cplx(0, 0)) continue;
      out.coeffs()[out.box().flat(MultiIndex{pb.unflat(c).ell, j})] = ys[c];
    }
  }
  return out;
}

}  // namespace

TorusFunction ReductionResult::apply_phi1(const TorusFunction& h) const {
  return apply_slice_matrix(lft, phi_pad_box_, h, Lpad);
}

TorusFunction ReductionResult::apply_phi2(const TorusFunction& h) const {
  return apply_slice_matrix(rgt, phi_pad_box_, h, Lpad);
}

std::pair<double, double> conjugation_residual(const ProblemData& pd, double lambda,
                                               const TorusFunction& u,
                                               const ReductionResult& red,
                                               const TorusFunction& h) {
  const int Lw = red.Lw, Lxw = red.Lxw;
  const int LP = red.Lpad;
  const int os = 2 * 2;  // finer composition grid than the factor matrices use

  TorusFunction bh = multiply(red.b, h).resized(LP, h.box().Lx());
  TorusFunction abh = compose_with_diffeo(bh, red.alpha, red.omega, LP, os);
  TorusFunction labh = apply_linearized(pd, lambda, u, abh);
  TorusFunction ialabh = compose_with_diffeo(labh.resized(LP, labh.box().Lx()),
                                             red.alpha_breve, red.omega, LP, os);
  // multiply by 1/(rho b) via a fine-grid reciprocal
  PhiGrid g(h.nu(), LP, os);
  Eigen::VectorXcd rv = g.eval(red.rho), bv = g.eval(red.b);
  Eigen::VectorXcd invrb(g.npoints());
  for (long m = 0; m < g.npoints(); ++m) invrb[m] = 1.0 / (rv[m].real() * bv[m].real());
  TorusFunction invrb_fn = g.expand(invrb, h.d(), 2 * LP);
  invrb_fn.enforce_reality();
  TorusFunction left = multiply(invrb_fn, ialabh).resized(Lw, Lxw);

  TorusFunction hw = h.resized(Lw, Lxw);
  TorusFunction right(hw.box());
  for (long f = 0; f < hw.size(); ++f)
    right.coeffs()[f] = red.diag_entry(hw.box().unflat(f)) * hw.coeffs()[f];
  right = add(right, red.R2.apply(hw, Lw, Lxw));

  const double s0 = s0_of(h.nu(), h.d());
  return {sub(left, right).sobolev_norm(s0), h.sobolev_norm(s0 + 2)};
}

double first_order_symbol_defect(const ReductionResult& red) {
  const int nu = static_cast<int>(red.omega.size());
  Box wb = phi_box(nu, red.Lw);
  Box pb = phi_box(nu, red.Lpad);
  Box db = phi_box(nu, 2 * red.Lw);
  const double s0 = s0_of(nu, 1);

  double acc = 0;
  for (long mf = 0; mf < db.size(); ++mf) {
    MultiIndex m = db.unflat(mf);
    // least squares y = c*(i x) + r over pairs (l = l' + m, l'), x = w.l';
    // sec_dev already excludes the diagonal symbol
    cplx b1(0, 0), b2(0, 0);
    double sxx = 0, sx = 0;
    long n = 0;
    for (long cf = 0; cf < wb.size(); ++cf) {
      MultiIndex lc = wb.unflat(cf);
      MultiIndex lr = lc + m;
      if (!wb.contains(lr)) continue;
      cplx y = red.sec_dev(pb.flat(lr), pb.flat(lc));
      double x = omega_dot(red.omega, lc.ell);
      b1 += cplx(0, -x) * y;  // conj(i x) * y
      b2 += y;
      sxx += x * x;
      sx += x;
      ++n;
    }
    if (n < 2) continue;
    double det = sxx * n - sx * sx;
    if (std::abs(det) < 1e-12) continue;
    // normal equations for design columns (i x, 1)
    cplx c = (static_cast<double>(n) * b1 - cplx(0, -sx) * b2) / det;
    acc += std::norm(c) * std::pow(weight(m), 2 * s0);
  }

  // reference: the operator's own scale, diagonal symbol included
  double scale = 0;
  {
    std::unordered_map<std::uint64_t, double> prof;
    for (long rf = 0; rf < wb.size(); ++rf) {
      MultiIndex lr = wb.unflat(rf);
      for (long cf = 0; cf < wb.size(); ++cf) {
        MultiIndex lc = wb.unflat(cf);
        cplx e = red.sec_dev(pb.flat(lr), pb.flat(lc));
        if (lr.ell == lc.ell) {
          double od = omega_dot(red.omega, lr.ell);
          e += -od * od;
        }
        double v = std::abs(e);
        if (v == 0) continue;
        std::uint64_t key = pack_key(lr - lc);
        auto [it, fresh] = prof.try_emplace(key, v);
        if (!fresh && it->second < v) it->second = v;
      }
    }
    for (auto& [k, v] : prof) scale += v * v;
  }
  return std::sqrt(acc) / std::max(std::sqrt(scale), 1e-300);
}

}  // namespace kqp
