#include "kqp/measure_scan.hpp"

#include <cmath>

#include "kqp/parallel.hpp"

namespace kqp {

bool J_N_ok(const ProblemData& pd, const ReductionResult& red, int N, double tau1) {
  auto idx = DecayMatrix::ball_indices(pd.nu(), pd.d(), N);
  Eigen::MatrixXcd M = red.r2_window(idx, idx);
  for (size_t i = 0; i < idx.size(); ++i) M(i, i) += red.diag_entry(idx[i]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(M, Eigen::EigenvaluesOnly);
  double smin = eig.eigenvalues().cwiseAbs().minCoeff();
  // ||L^{-1}||_0 = 1/smin for a Hermitian block
  return smin >= 2.0 * std::pow(N, -tau1);
}

ScanReport scan_lambda(const ProblemData& pd, const ScanParams& par) {
  ScanReport rep;
  rep.epsilon = pd.epsilon;
  rep.N_list = par.N_list;
  rep.j0_list = par.j0_list;
  if (rep.j0_list.empty()) {
    rep.j0_list.push_back(std::vector<int>(pd.d(), 0));
    std::vector<int> j1(pd.d(), 0);
    j1[0] = 1;
    rep.j0_list.push_back(j1);
    std::vector<int> j2(pd.d(), 0);
    j2[0] = 2;
    rep.j0_list.push_back(j2);
  }
  const double frak_e = par.frak_e > 0 ? par.frak_e : 2 * pd.d() + pd.nu() + 4;
  rep.rows.resize(par.lambda_grid.size());

  parallel_for(par.lambda_grid.size(), par.threads, [&](size_t idx) {
    double lambda = par.lambda_grid[idx];
    LambdaRecord rec;
    rec.lambda = lambda;
    try {
      rec.in_bar = in_I_bar(lambda, pd.fd, pd.d(), par.N0_dio, par.tau0);
      rec.in_tilde = in_I_tilde(lambda, pd.fd, par.N0_dio, par.max_coeff_tilde);

      SolveResult sol = solve(pd, lambda, par.exponents, par.solve);
      rec.solver_converged = sol.converged;
      rec.solver_residual = sol.trace.empty() ? 0 : sol.trace.back().residual_s0;
      // non-convergence marks the parameter bad but the scans still run at
      // the best available expansion point
      TorusFunction u = sol.u;

      ReduceOptions ro = par.solve.reduce;
      ReductionResult red =
          reduce(pd, lambda, u, par.solve.box_phi, par.solve.box_x, ro);

      bool all_ok = rec.in_bar && rec.in_tilde && rec.solver_converged;
      for (int N : par.N_list) {
        bool jn = J_N_ok(pd, red, N, par.tau1);
        rec.JN_ok[N] = jn;
        long worst_count = 0;
        bool g0 = true;
        ThetaScanParams tp;
        tp.tau1 = par.tau1;
        for (const auto& j0 : rep.j0_list) {
          auto intervals = bad_theta_set(pd, lambda, red, j0, N, tp);
          double meas = 0;
          long count = 0;
          const double unit = std::pow(N, -par.tau1);
          for (auto& iv : intervals) {
            meas += iv[1] - iv[0];
            count += static_cast<long>(std::ceil((iv[1] - iv[0]) / unit));
          }
          MultiIndex key{{}, j0};
          rec.theta_meas[{N, static_cast<long>(pack_key(key) & 0x7fffffff)}] = meas;
          worst_count = std::max(worst_count, count);
          if (count > std::pow(N, frak_e)) g0 = false;
        }
        rec.G0_ok[N] = g0;
        rec.G0_intervals[N] = worst_count;
        all_ok = all_ok && jn && g0;
      }
      rec.bad = !all_ok;
    } catch (const Error& e) {
      rec.bad = true;
      rec.note = e.what();
    }
    rep.rows[idx] = std::move(rec);
  });

  long nbad = 0;
  for (auto& r : rep.rows) nbad += r.bad ? 1 : 0;
  rep.bad_fraction = rep.rows.empty() ? 1.0 : static_cast<double>(nbad) / rep.rows.size();
  return rep;
}

std::pair<std::vector<std::vector<bool>>, std::vector<std::vector<bool>>> bad2d_masks(
    const ProblemData& pd, const std::vector<double>& lambda_grid,
    const std::vector<double>& theta_grid, const std::vector<int>& j0, int N, double tau1,
    const TorusFunction& u) {
  std::vector<std::vector<bool>> direct(lambda_grid.size()),
      changed(lambda_grid.size());
  MultiIndex center{std::vector<int>(pd.nu(), 0), j0};
  auto sites = DecayMatrix::window_indices(center, N);
  const double cutoff = 2.0 * std::pow(N, -tau1);

  for (size_t li = 0; li < lambda_grid.size(); ++li) {
    double lambda = lambda_grid[li];
    ReductionResult red = reduce(pd, lambda, u, std::max(N, u.box().Lphi()),
                                 std::max(N, u.box().Lx()));
    Eigen::MatrixXcd R2w = red.r2_window(sites, sites);
    direct[li].resize(theta_grid.size());
    changed[li].resize(theta_grid.size());
    const double zeta = 1.0 / (lambda * lambda);
    for (size_t ti = 0; ti < theta_grid.size(); ++ti) {
      double theta = theta_grid[ti];
      {
        Eigen::MatrixXcd M = R2w;
        for (size_t i = 0; i < sites.size(); ++i)
          M(i, i) += d_entry(lambda, theta, red.mu, pd.fd, sites[i].ell, sites[i].j);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(M, Eigen::EigenvaluesOnly);
        direct[li][ti] = eig.eigenvalues().cwiseAbs().minCoeff() < cutoff;
      }
      {
        // zeta = 1/lambda^2, eta = theta/lambda; L(zeta,eta) = zeta * L(lambda,theta)
        double eta = theta / lambda;
        Eigen::MatrixXcd M = zeta * R2w;
        for (size_t i = 0; i < sites.size(); ++i) {
          double od = eta;
          for (size_t q = 0; q < sites[i].ell.size(); ++q)
            od += pd.fd.omega_bar[q] * sites[i].ell[q];
          M(i, i) += -od * od + zeta * red.mu * j_sq(sites[i].j);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(M, Eigen::EigenvaluesOnly);
        changed[li][ti] = eig.eigenvalues().cwiseAbs().minCoeff() < zeta * cutoff;
      }
    }
  }
  return {direct, changed};
}

}  // namespace kqp
