#ifndef KQP_MULTISCALE_HPP
#define KQP_MULTISCALE_HPP

#include <array>
#include <map>

#include "kqp/nash_moser.hpp"

namespace kqp {

// Diagonal symbol D_{l,j}(lambda,theta) = -(lambda w.l + theta)^2 + mu |j|^2.
double d_entry(double lambda, double theta, double mu, const FrequencyData& fd,
               const std::vector<int>& ell, const std::vector<int>& j);

// theta-shifted operator D(lambda,theta) + R2(u) with window extraction.
struct ShiftedOperator {
  double lambda = 1;
  double theta = 0;
  const ReductionResult* red = nullptr;  // supplies mu and R2
  const FrequencyData* fd = nullptr;

  double diag(const MultiIndex& k) const {
    return d_entry(lambda, theta, red->mu, *fd, k.ell, k.j);
  }
  // dense window at the given sites: diag + R2
  Eigen::MatrixXcd window(const std::vector<MultiIndex>& sites) const;
};

// |D| >= 1 marks a site regular.
bool site_regular(const ShiftedOperator& op, const MultiIndex& k);
std::vector<MultiIndex> singular_sites(const ShiftedOperator& op,
                                       const std::vector<MultiIndex>& region);

struct NGoodResult {
  bool good = false;
  bool invertible = false;
  std::map<double, double> inv_norms;  // s -> |A^{-1}|_s
};

// Definition of N-goodness: invertible with |A^{-1}|_s <= N^(tau + delta*s)
// for every s in s_list; precondition diam(index set) <= 4N.
NGoodResult is_N_good(const DecayMatrix& A, double N, double tau, double delta,
                      const std::vector<double>& s_list);

// Parameters for the theta scans.
struct ThetaScanParams {
  double tau1 = 2.0;
  double theta_min = 0;
  double theta_max = 0;   // when min == max, the window [-10 sqrt(d) N, ...] is used
  double step = -1;       // <= 0: N^(-tau1)/4
};

// theta intervals where || L_{N,j0}(theta)^{-1} ||_0 > N^tau1 / 2, i.e. the
// smallest singular value of the Hermitian window drops below 2 N^(-tau1).
// A two-sided eigenvalue-gap bound against the diagonal decides all points
// except a sliver around the cutoff, where a dense eigensolve is used.
std::vector<std::array<double, 2>> bad_theta_set(const ProblemData& pd, double lambda,
                                                 const ReductionResult& red,
                                                 const std::vector<int>& j0, double N,
                                                 const ThetaScanParams& par);

// Grid measure of the bad set over [-10 sqrt(d) N, 10 sqrt(d) N].
double theta_measure(const ProblemData& pd, double lambda, const ReductionResult& red,
                     const std::vector<int>& j0, double N, double tau1,
                     double step = -1);

// Maximal chains of sites with consecutive sup-distances <= Gamma.  Exact
// longest path for components of size <= 20 (bitmask DP), cardinality bound
// beyond that.
struct Chain {
  std::vector<MultiIndex> sites;
  bool exact = true;
  int length() const { return static_cast<int>(sites.size()) - 1; }
};
std::vector<Chain> gamma_chains(const std::vector<MultiIndex>& sites, int Gamma);

// Largest per-j-section cardinality of the site list (the K of the chain
// bound).
int section_cap(const std::vector<MultiIndex>& sites);

struct SeparationCluster {
  std::vector<MultiIndex> sites;
  double diam = 0;
};
struct SeparationResult {
  bool ok = true;
  std::vector<SeparationCluster> clusters;
  double min_cluster_dist = 0;
};

// Clusters bad sites by transitive closure of dist < N^2, then checks
// diam <= N^C1 and pairwise distance >= N^2.
SeparationResult check_separation(const std::vector<MultiIndex>& bad_sites, double N,
                                  double C1);

// (max_p |mu_p(A) - mu_p(A')|, ||A - A'||_0) for real-symmetric pairs.
std::pair<double, double> weyl_check(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Ap);

// Strong/weak site classification against the operator at scale N:
//   strongly-regular: the window L_{N,k} is N-good
//   weakly-singular:  otherwise
//   strongly-good:    regular for D, or all sites within distance N are
//                     strongly-regular
//   weakly-bad:       otherwise
enum class StrongStatus { StronglyRegular, WeaklySingular };
enum class GoodStatus { StronglyGood, WeaklyBad };

struct StrongClassification {
  std::vector<MultiIndex> weakly_bad;
  long n_sites = 0;
  long n_singular = 0;
  long n_certified = 0;   // windows certified by the diagonal Neumann bound
  long n_dense = 0;       // windows that needed a dense inverse
  long n_unresolved = 0;  // windows too large for the dense path; not counted
                          // as weakly-bad, reported separately
  std::vector<MultiIndex> unresolved;
};

struct ClassifyParams {
  double tau = 3.0;
  double delta = 0.1;
  std::vector<double> s_list;    // defaults to {s0, (s0+s2)/2, s2}
  long dense_dim_limit = 4000;   // largest window taken through a dense inverse
};

// (A,N)-good classification with the canonical centered window of radius 2N,
// shared on an N/2 lattice; sites neither regular for D nor window-certified
// are the weakly-bad ones that enter the separation check.  A window whose
// diagonal clears the Neumann margin is certified N-good without a dense
// inverse.
StrongClassification classify_bad_sites(const ShiftedOperator& op,
                                        const std::vector<MultiIndex>& region, double N,
                                        const ClassifyParams& par);

// Exact test of the strong classification for one site: either k is regular
// for D, or every k' with dist(k,k') <= N has an N-good window L_{N,k'}.
bool site_strongly_good(const ShiftedOperator& op, const MultiIndex& k, double N,
                        const ClassifyParams& par);

}  // namespace kqp

#endif
