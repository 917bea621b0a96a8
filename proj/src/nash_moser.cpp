#include "kqp/nash_moser.hpp"

#include <chrono>
#include <cmath>

namespace kqp {

ExponentSet ExponentSet::suggest(int nu, int d, double tau, double delta) {
  ExponentSet es;
  es.tau = tau;
  es.delta = delta;
  es.s0 = s0_of(nu, d);
  es.sigma = 2.0 * (nu + 1);
  es.s1 = es.s0 + es.sigma + 1;
  const double fa = es.tau + es.delta * es.s1;
  es.kappa1 = es.sigma + 1;
  es.kappa2 = std::max(3 * fa + 1.5 * (es.s1 - es.s0) + 3 + 2.25 * es.kappa1,
                       12 * fa + 24) + 1;
  // X = S - s1 from the closed constraint chain, with unit slack g3 = 1
  const double g3 = 1.0;
  double X = (4 * es.sigma + 6 + 6 * fa + es.kappa1 + es.kappa2 + (2.0 / 3.0) * g3) /
             (1 - 3 * delta);
  X = std::ceil(X) + 1;
  es.S = es.s1 + X;
  es.kappa3 = 6 * fa + 6 + 3 * delta * X + 3 * es.sigma + 1.5 * es.kappa1 + g3;
  return es;
}

ExponentCheck check_exponents(const ExponentSet& es) {
  ExponentCheck out;
  auto fail = [&out](const std::string& s) { out.violations.push_back(s); };
  if (!(es.delta > 0 && es.delta < 1.0 / 3.0)) fail("delta outside (0, 1/3)");
  if (!(es.S > es.s1 && es.s1 > es.s0 + es.sigma)) fail("need S > s1 > s0 + sigma");
  if (!(es.tau > 0)) fail("tau must be positive");
  const double fa = es.frak_a();
  if (!(es.kappa1 > es.sigma)) fail("kappa1 <= sigma");
  double k2min = std::max(3 * fa + 1.5 * (es.s1 - es.s0) + 3 + 2.25 * es.kappa1,
                          12 * fa + 24);
  if (!(es.kappa2 > k2min)) fail("kappa2 below its lower bound");
  double k3min = 6 * fa + 6 + 3 * es.delta * (es.S - es.s1) + 3 * es.sigma + 1.5 * es.kappa1;
  if (!(es.kappa3 > k3min)) fail("kappa3 below its lower bound");
  double lhs = (1 - es.delta) * (es.S - es.s1);
  double rhs = 2 * es.sigma + 2 + 2 * fa + (2.0 / 3.0) * es.kappa3 + es.kappa2;
  if (!(lhs > rhs)) fail("(1-delta)(S-s1) too small");
  out.ok = out.violations.empty();
  return out;
}

double scale(double N0, int n) {
  if (!(N0 > 1) || n < 0) throw DomainError("scale: need N0 > 1, n >= 0");
  return std::pow(N0, std::pow(1.5, n));
}

TruncatedL build_truncated_L(const ProblemData& pd, double lambda, const TorusFunction& u,
                             double N, int box_phi, int box_x, const ReduceOptions& opts) {
  TruncatedL out{DecayMatrix(), reduce(pd, lambda, u, box_phi, box_x, opts)};
  double Ncap = std::min(N, static_cast<double>(std::min(box_phi, box_x)));
  auto idx = DecayMatrix::ball_indices(u.nu(), u.d(), Ncap);
  DecayMatrix LN(idx, idx);
  for (long i = 0; i < LN.nrows(); ++i) {
    for (long j = 0; j < LN.ncols(); ++j)
      LN.mat()(i, j) = out.red.R2.entry(idx[i], idx[j]);
    LN.mat()(i, i) += out.red.diag_entry(idx[i]);
  }
  out.LN = std::move(LN);
  return out;
}

namespace {

double condition_estimate_of(const Eigen::PartialPivLU<Eigen::MatrixXcd>& lu) {
  double rc = lu.rcond();
  return rc > 0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
}

}  // namespace

SolveResult solve(const ProblemData& pd, double lambda, const ExponentSet& es,
                  const SolveOptions& opts) {
  if (!opts.override_exponents) {
    auto chk = check_exponents(es);
    if (!chk.ok) {
      std::string msg = "solve: exponent set invalid:";
      for (auto& v : chk.violations) msg += " [" + v + "]";
      throw ConfigError(msg);
    }
  }
  const int nu = pd.nu(), d = pd.d();
  SolveResult res;
  res.u = TorusFunction(Box(nu, d, opts.box_phi, opts.box_x));

  TorusFunction r = residual(pd, lambda, res.u);
  double rnorm = r.sobolev_norm(es.s0);
  {
    IterationState st;
    st.n = 0;
    st.N_n = opts.N0;
    st.residual_s0 = rnorm;
    st.log10_u_norm_S = res.u.log10_sobolev_norm(es.S);
    res.trace.push_back(st);
  }
  if (rnorm <= opts.tol) {
    res.converged = true;
    return res;
  }

  TorusFunction u_prev = res.u;
  for (int n = 0; n < opts.max_steps; ++n) {
    auto t0 = std::chrono::steady_clock::now();
    const double Nn1 = scale(opts.N0, n + 1);
    IterationState st;
    st.n = n + 1;
    st.N_n = Nn1;

    try {
      TruncatedL tl = build_truncated_L(pd, lambda, res.u, Nn1, opts.box_phi, opts.box_x,
                                        opts.reduce);
      Eigen::PartialPivLU<Eigen::MatrixXcd> lu(tl.LN.mat());
      st.condition_estimate = condition_estimate_of(lu);
      // rcond saturates at 1 on exactly singular diagonals; the pivot check
      // catches hard resonances
      double pivot_min = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
      double pivot_max = lu.matrixLU().diagonal().cwiseAbs().maxCoeff();
      if (pivot_min <= pivot_max / opts.cond_limit)
        st.condition_estimate = std::numeric_limits<double>::infinity();
      if (!(st.condition_estimate < opts.cond_limit)) {
        res.failure = "BadParameter: truncated operator near singular at lambda=" +
                      std::to_string(lambda) + ", condition=" +
                      std::to_string(st.condition_estimate);
        res.trace.push_back(st);
        return res;
      }

      // h = -Pi_N Phi2 (L_N + Pi_N^perp)^(-1) Phi1 F(u_n)
      TorusFunction rhs = tl.red.apply_phi1(r);
      Eigen::VectorXcd rhs_in = Eigen::VectorXcd::Zero(tl.LN.ncols());
      TorusFunction pass = rhs;  // complement passes through unchanged
      for (long f = 0; f < rhs.size(); ++f) {
        cplx v = rhs.coeffs()[f];
        if (v == cplx(0, 0)) continue;
        long p = tl.LN.col_pos(rhs.box().unflat(f));
        if (p >= 0) {
          rhs_in[p] = v;
          pass.coeffs()[f] = 0;
        }
      }
      Eigen::VectorXcd sol = lu.solve(rhs_in);
      TorusFunction w = pass;
      for (long i = 0; i < tl.LN.nrows(); ++i) {
        long f = w.box().flat(tl.LN.rows()[i]);
        if (f >= 0) w.coeffs()[f] += sol[i];
      }
      TorusFunction h = scaled(project(tl.red.apply_phi2(w), Nn1), -1.0)
                            .resized(opts.box_phi, opts.box_x);
      h.enforce_reality();

      u_prev = res.u;
      res.u = add(res.u, h);
      res.u.enforce_reality();
      r = residual(pd, lambda, res.u);
      rnorm = r.sobolev_norm(es.s0);
      if (!std::isfinite(rnorm)) {
        res.u = u_prev;
        res.failure = "StepFailed: non-finite residual after the update at lambda=" +
                      std::to_string(lambda);
        res.trace.push_back(st);
        return res;
      }

      st.residual_s0 = rnorm;
      st.step_norm_s1 = h.sobolev_norm(es.s1);
      st.log10_u_norm_S = res.u.log10_sobolev_norm(es.S);
      st.support_ok = project(res.u, Nn1, true).sobolev_norm(0) == 0;
      st.s2_ratio = st.step_norm_s1 * std::pow(Nn1, es.kappa1);
      st.s3_ratio = rnorm * std::pow(Nn1, es.kappa2);
      st.s4_ratio = st.log10_u_norm_S - es.kappa3 * std::log10(Nn1);
    } catch (const Singular& e) {
      res.failure = std::string("StepFailed: ") + e.what();
      res.trace.push_back(st);
      return res;
    } catch (const Error& e) {
      // reduction failures (diffeo slope, rho floor, mean checks) end the run
      // but leave the trace intact
      res.failure = std::string("StepFailed: ") + e.what();
      res.trace.push_back(st);
      return res;
    }

    auto t1 = std::chrono::steady_clock::now();
    st.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    res.trace.push_back(st);

    if (rnorm <= opts.tol) {
      res.converged = true;
      return res;
    }
  }
  res.failure = "NoConvergence: residual " + std::to_string(rnorm) + " after " +
                std::to_string(opts.max_steps) + " steps";
  return res;
}

PerturbReport perturb_lambda_invertibility(const ProblemData& pd, const TorusFunction& u,
                                           double N, double lambda, double dlambda,
                                           int box_phi, int box_x) {
  const double s0 = s0_of(pd.nu(), pd.d());
  TruncatedL base = build_truncated_L(pd, lambda, u, N, box_phi, box_x);
  TruncatedL pert = build_truncated_L(pd, lambda + dlambda, u, N, box_phi, box_x);

  PerturbReport rep;
  DecayMatrix base_inv = base.LN.invert_dense();
  // A = L(lambda)^{-1} (L(lambda') - L(lambda))
  DecayMatrix diff(base.LN.rows(), base.LN.cols());
  diff.mat() = pert.LN.mat() - base.LN.mat();
  DecayMatrix A = base_inv * diff;
  rep.a_norm_s0 = A.decay_norm(s0);

  double binv = base_inv.decay_norm(s0);
  if (rep.a_norm_s0 < 1) {
    rep.series_bound_s0 = binv / (1 - rep.a_norm_s0);
  } else {
    rep.series_bound_s0 = std::numeric_limits<double>::infinity();
  }
  try {
    DecayMatrix pinv = pert.LN.invert_dense();
    rep.direct_inv_norm_s0 = pinv.decay_norm(s0);
    rep.invertible = true;
  } catch (const Singular&) {
    rep.invertible = false;
  }
  return rep;
}

}  // namespace kqp
