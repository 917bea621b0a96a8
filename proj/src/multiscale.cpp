#include "kqp/multiscale.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace kqp {

double d_entry(double lambda, double theta, double mu, const FrequencyData& fd,
               const std::vector<int>& ell, const std::vector<int>& j) {
  if (is_zero(j)) throw DomainError("d_entry: j = 0 is outside the zero-mean space");
  double od = theta;
  for (size_t i = 0; i < ell.size(); ++i) od += lambda * fd.omega_bar[i] * ell[i];
  return -od * od + mu * j_sq(j);
}

Eigen::MatrixXcd ShiftedOperator::window(const std::vector<MultiIndex>& sites) const {
  Eigen::MatrixXcd M = red->r2_window(sites, sites);
  for (size_t i = 0; i < sites.size(); ++i) M(i, i) += diag(sites[i]);
  return M;
}

bool site_regular(const ShiftedOperator& op, const MultiIndex& k) {
  return std::abs(op.diag(k)) >= 1.0;
}

std::vector<MultiIndex> singular_sites(const ShiftedOperator& op,
                                       const std::vector<MultiIndex>& region) {
  std::vector<MultiIndex> out;
  for (const auto& k : region)
    if (!site_regular(op, k)) out.push_back(k);
  return out;
}

NGoodResult is_N_good(const DecayMatrix& A, double N, double tau, double delta,
                      const std::vector<double>& s_list) {
  // diameter precondition from the definition
  int diam = 0;
  for (const auto& r : A.rows())
    for (const auto& c : A.rows()) diam = std::max(diam, dist(r, c));
  if (diam > 4 * N) throw DomainError("is_N_good: diam of index set exceeds 4N");
  NGoodResult out;
  DecayMatrix inv;
  try {
    inv = A.invert_dense();
  } catch (const Singular&) {
    return out;  // N-bad, no norms
  }
  out.invertible = true;
  out.good = true;
  for (double s : s_list) {
    double ns = inv.decay_norm(s);
    out.inv_norms[s] = ns;
    if (!(ns <= std::pow(N, tau + delta * s))) out.good = false;
  }
  return out;
}

namespace {

struct ThetaVerdicts {
  std::vector<double> grid;
  std::vector<char> bad;
  long n_dense = 0;
};

// Verdict per grid point: smallest |eigenvalue| of the Hermitian window vs
// cutoff.  min|D| - ||R2|| and min|D| + ||R2|| bracket the smallest
// eigenvalue magnitude, so a dense solve is needed only inside the sliver.
ThetaVerdicts scan_theta(const ProblemData& pd, double lambda, const ReductionResult& red,
                         const std::vector<int>& j0, double N, double tau1,
                         double theta_min, double theta_max, double step) {
  MultiIndex center{std::vector<int>(pd.nu(), 0), j0};
  auto sites = DecayMatrix::window_indices(center, N);
  ShiftedOperator op{lambda, 0.0, &red, &pd.fd};

  // ||R2 window||_0 <= profile l1 of the window; computed once
  Eigen::MatrixXcd R2w = red.r2_window(sites, sites);
  double r2norm = 0;
  {
    std::unordered_map<std::uint64_t, double> prof;
    for (size_t i = 0; i < sites.size(); ++i)
      for (size_t j = 0; j < sites.size(); ++j) {
        double v = std::abs(R2w(i, j));
        if (v == 0) continue;
        auto [it, fresh] = prof.try_emplace(pack_key(sites[i] - sites[j]), v);
        if (!fresh && it->second < v) it->second = v;
      }
    for (auto& [k, v] : prof) r2norm += v;
  }

  const double cutoff = 2.0 * std::pow(N, -tau1);  // ||L^{-1}||_0 > N^tau1/2
  ThetaVerdicts out;
  const long nsteps = static_cast<long>(std::floor((theta_max - theta_min) / step + 1e-9));
  for (long i = 0; i <= nsteps; ++i) {
    double th = theta_min + i * step;
    out.grid.push_back(th);
    op.theta = th;
    double dmin = std::numeric_limits<double>::infinity();
    for (const auto& k : sites) dmin = std::min(dmin, std::abs(op.diag(k)));
    bool is_bad;
    if (dmin - r2norm > cutoff) {
      is_bad = false;
    } else if (dmin + r2norm < cutoff) {
      is_bad = true;
    } else {
      Eigen::MatrixXcd M = R2w;
      for (size_t i = 0; i < sites.size(); ++i) M(i, i) += op.diag(sites[i]);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(M, Eigen::EigenvaluesOnly);
      double smin = eig.eigenvalues().cwiseAbs().minCoeff();
      is_bad = smin < cutoff;
      ++out.n_dense;
    }
    out.bad.push_back(is_bad ? 1 : 0);
  }
  return out;
}

}  // namespace

std::vector<std::array<double, 2>> bad_theta_set(const ProblemData& pd, double lambda,
                                                 const ReductionResult& red,
                                                 const std::vector<int>& j0, double N,
                                                 const ThetaScanParams& par) {
  double tmin = par.theta_min, tmax = par.theta_max;
  if (tmin == tmax) {
    double half = 10.0 * std::sqrt(static_cast<double>(pd.d())) * N;
    tmin = -half;
    tmax = half;
  }
  double step = par.step > 0 ? par.step : std::pow(N, -par.tau1) / 4.0;
  auto v = scan_theta(pd, lambda, red, j0, N, par.tau1, tmin, tmax, step);

  std::vector<std::array<double, 2>> intervals;
  for (size_t i = 0; i < v.grid.size(); ++i) {
    if (!v.bad[i]) continue;
    double lo = v.grid[i] - step / 2, hi = v.grid[i] + step / 2;
    if (!intervals.empty() && intervals.back()[1] >= lo - 1e-15)
      intervals.back()[1] = hi;
    else
      intervals.push_back({lo, hi});
  }
  return intervals;
}

double theta_measure(const ProblemData& pd, double lambda, const ReductionResult& red,
                     const std::vector<int>& j0, double N, double tau1, double step) {
  ThetaScanParams par;
  par.tau1 = tau1;
  par.step = step;
  auto intervals = bad_theta_set(pd, lambda, red, j0, N, par);
  double m = 0;
  for (auto& iv : intervals) m += iv[1] - iv[0];
  return m;
}

std::vector<Chain> gamma_chains(const std::vector<MultiIndex>& sites, int Gamma) {
  if (Gamma < 2) throw DomainError("gamma_chains: Gamma >= 2 required");
  const int n = static_cast<int>(sites.size());
  std::vector<Chain> chains;
  if (n == 0) return chains;

  // connected components of the <=Gamma adjacency graph
  std::vector<int> comp(n, -1);
  int ncomp = 0;
  for (int i = 0; i < n; ++i) {
    if (comp[i] >= 0) continue;
    std::vector<int> stack{i};
    comp[i] = ncomp;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w = 0; w < n; ++w)
        if (comp[w] < 0 && dist(sites[v], sites[w]) <= Gamma) {
          comp[w] = ncomp;
          stack.push_back(w);
        }
    }
    ++ncomp;
  }

  for (int c = 0; c < ncomp; ++c) {
    std::vector<int> members;
    for (int i = 0; i < n; ++i)
      if (comp[i] == c) members.push_back(i);
    const int m = static_cast<int>(members.size());
    Chain chain;
    if (m == 1) {
      chain.sites = {sites[members[0]]};
      chains.push_back(std::move(chain));
      continue;
    }
    if (m <= 20) {
      // longest simple path by bitmask DP over the component
      std::vector<std::vector<int>> adj(m);
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
          if (a != b && dist(sites[members[a]], sites[members[b]]) <= Gamma)
            adj[a].push_back(b);
      const int full = 1 << m;
      // dp[mask][v] = predecessor encoding; -2 unreachable, -1 start
      std::vector<std::vector<int8_t>> reach(full, std::vector<int8_t>(m, 0));
      for (int v = 0; v < m; ++v) reach[1 << v][v] = 1;
      int best_mask = 1, best_v = 0;
      int best_count = 1;
      for (int mask = 1; mask < full; ++mask) {
        for (int v = 0; v < m; ++v) {
          if (!reach[mask][v]) continue;
          int cnt = __builtin_popcount(static_cast<unsigned>(mask));
          if (cnt > best_count) { best_count = cnt; best_mask = mask; best_v = v; }
          for (int w : adj[v])
            if (!(mask & (1 << w))) reach[mask | (1 << w)][w] = 1;
        }
      }
      // reconstruct one witness path
      std::vector<int> path{best_v};
      int mask = best_mask, v = best_v;
      while (__builtin_popcount(static_cast<unsigned>(mask)) > 1) {
        int pm = mask & ~(1 << v);
        int found = -1;
        for (int w : adj[v])
          if ((pm & (1 << w)) && reach[pm][w]) { found = w; break; }
        if (found < 0) break;  // should not happen
        v = found;
        mask = pm;
        path.push_back(v);
      }
      std::reverse(path.begin(), path.end());
      for (int idx : path) chain.sites.push_back(sites[members[idx]]);
      chain.exact = true;
    } else {
      // cardinality is a safe upper bound for the path length
      for (int idx : members) chain.sites.push_back(sites[idx]);
      chain.exact = false;
    }
    chains.push_back(std::move(chain));
  }
  return chains;
}

int section_cap(const std::vector<MultiIndex>& sites) {
  std::unordered_map<std::uint64_t, int> counts;
  int cap = 0;
  for (const auto& k : sites) {
    MultiIndex jonly{std::vector<int>(k.ell.size(), 0), k.j};
    cap = std::max(cap, ++counts[pack_key(jonly)]);
  }
  return cap;
}

SeparationResult check_separation(const std::vector<MultiIndex>& bad_sites, double N,
                                  double C1) {
  SeparationResult out;
  const int n = static_cast<int>(bad_sites.size());
  if (n == 0) return out;
  const double close = N * N;

  std::vector<int> comp(n, -1);
  int ncomp = 0;
  for (int i = 0; i < n; ++i) {
    if (comp[i] >= 0) continue;
    std::vector<int> stack{i};
    comp[i] = ncomp;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w = 0; w < n; ++w)
        if (comp[w] < 0 && dist(bad_sites[v], bad_sites[w]) < close) {
          comp[w] = ncomp;
          stack.push_back(w);
        }
    }
    ++ncomp;
  }
  out.clusters.resize(ncomp);
  for (int i = 0; i < n; ++i) out.clusters[comp[i]].sites.push_back(bad_sites[i]);

  const double diam_limit = std::pow(N, C1);
  for (auto& cl : out.clusters) {
    for (size_t a = 0; a < cl.sites.size(); ++a)
      for (size_t b = a + 1; b < cl.sites.size(); ++b)
        cl.diam = std::max(cl.diam, static_cast<double>(dist(cl.sites[a], cl.sites[b])));
    if (cl.diam > diam_limit) out.ok = false;
  }
  out.min_cluster_dist = std::numeric_limits<double>::infinity();
  for (int a = 0; a < ncomp; ++a)
    for (int b = a + 1; b < ncomp; ++b) {
      double dmin = std::numeric_limits<double>::infinity();
      for (const auto& ka : out.clusters[a].sites)
        for (const auto& kb : out.clusters[b].sites)
          dmin = std::min(dmin, static_cast<double>(dist(ka, kb)));
      out.min_cluster_dist = std::min(out.min_cluster_dist, dmin);
      if (dmin < close) out.ok = false;
    }
  return out;
}

std::pair<double, double> weyl_check(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Ap) {
  if (A.rows() != Ap.rows() || A.cols() != Ap.cols() || A.rows() != A.cols())
    throw DomainError("weyl_check: shapes must match and be square");
  if ((A - A.transpose()).norm() > 1e-10 * std::max(1.0, A.norm()) ||
      (Ap - Ap.transpose()).norm() > 1e-10 * std::max(1.0, Ap.norm()))
    throw DomainError("weyl_check: inputs must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(A, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(Ap, Eigen::EigenvaluesOnly);
  double gap = (ea.eigenvalues() - eb.eigenvalues()).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ed(A - Ap, Eigen::EigenvaluesOnly);
  double opnorm = ed.eigenvalues().cwiseAbs().maxCoeff();
  return {gap, opnorm};
}

StrongClassification classify_bad_sites(const ShiftedOperator& op,
                                        const std::vector<MultiIndex>& region, double N,
                                        const ClassifyParams& par) {
  StrongClassification out;
  out.n_sites = static_cast<long>(region.size());
  auto sing = singular_sites(op, region);
  out.n_singular = static_cast<long>(sing.size());

  std::vector<double> s_list = par.s_list;
  if (s_list.empty()) {
    double s0 = s0_of(static_cast<int>(op.fd->omega_bar.size()),
                      static_cast<int>(region.empty() ? 1 : region[0].j.size()));
    s_list = {s0, s0 + 0.5, s0 + 1.0};
  }

  // global decay bound for the remainder, reused by every window certificate
  double r2_profile = op.red->materialized ? op.red->R2.profile_l1() : 0.0;

  // window verdict cache on the N/2 center lattice
  const int lat = std::max(1, static_cast<int>(N / 2));
  std::unordered_map<std::uint64_t, int> window_good;

  auto window_center = [&](const MultiIndex& k) {
    MultiIndex c = k;
    for (int& v : c.ell) v = static_cast<int>(std::lround(static_cast<double>(v) / lat)) * lat;
    for (int& v : c.j) v = static_cast<int>(std::lround(static_cast<double>(v) / lat)) * lat;
    return c;
  };

  // verdicts: 1 good, 0 bad, -1 unresolved (too large for a dense inverse)
  auto window_verdict = [&](const MultiIndex& center) {
    auto key = pack_key(center);
    auto it = window_good.find(key);
    if (it != window_good.end()) return it->second;
    auto sites = DecayMatrix::window_indices(center, 2 * N);
    double dmin = std::numeric_limits<double>::infinity();
    for (const auto& k : sites) dmin = std::min(dmin, std::abs(op.diag(k)));
    int verdict;
    // Neumann certificate: when the diagonal clears both the perturbation and
    // the N-good threshold, |A^{-1}|_s <= 2/dmin <= N^{tau+delta*s}.
    double smin = *std::min_element(s_list.begin(), s_list.end());
    double c_worst = interp_constant(*std::max_element(s_list.begin(), s_list.end()),
                                     s_list.front());
    bool cert = dmin > 0 && (2.0 * c_worst * r2_profile / dmin <= 1.0) &&
                (2.0 / dmin <= std::pow(N, par.tau + par.delta * smin));
    if (cert) {
      verdict = 1;
      ++out.n_certified;
    } else if (static_cast<long>(sites.size()) > par.dense_dim_limit) {
      verdict = -1;
      ++out.n_unresolved;
    } else {
      ++out.n_dense;
      DecayMatrix A(sites, sites);
      A.mat() = op.window(sites);
      try {
        verdict = is_N_good(A, N, par.tau, par.delta, s_list).good ? 1 : 0;
      } catch (const DomainError&) {
        verdict = 0;
      }
    }
    window_good[key] = verdict;
    return verdict;
  };

  for (const auto& k : sing) {
    // (A,N)-regular via the canonical shared window centered on the lattice
    MultiIndex c = window_center(k);
    int verdict = window_verdict(c);
    if (verdict == 0) out.weakly_bad.push_back(k);
    if (verdict == -1) out.unresolved.push_back(k);
  }
  return out;
}

bool site_strongly_good(const ShiftedOperator& op, const MultiIndex& k, double N,
                        const ClassifyParams& par) {
  if (site_regular(op, k)) return true;
  std::vector<double> s_list = par.s_list;
  if (s_list.empty()) {
    double s0 = s0_of(static_cast<int>(k.ell.size()), static_cast<int>(k.j.size()));
    s_list = {s0, s0 + 0.5, s0 + 1.0};
  }
  auto neighbours = DecayMatrix::window_indices(k, N);
  for (const auto& kp : neighbours) {
    auto sites = DecayMatrix::window_indices(kp, N);
    DecayMatrix A(sites, sites);
    A.mat() = op.window(sites);
    try {
      if (!is_N_good(A, N, par.tau, par.delta, s_list).good) return false;
    } catch (const DomainError&) {
      return false;
    }
  }
  return true;
}

}  // namespace kqp
