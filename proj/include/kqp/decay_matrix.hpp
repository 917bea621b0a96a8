#ifndef KQP_DECAY_MATRIX_HPP
#define KQP_DECAY_MATRIX_HPP

#include <Eigen/Dense>
#include <unordered_map>
#include <vector>

#include "kqp/torus_function.hpp"

namespace kqp {

// Dense linear operator between trigonometric-polynomial spaces indexed by
// finite subsets of Z^nu x Z^d_*, with the off-diagonal s-decay norm.
class DecayMatrix {
 public:
  DecayMatrix() = default;
  DecayMatrix(std::vector<MultiIndex> rows, std::vector<MultiIndex> cols);

  static std::vector<MultiIndex> box_indices(const Box& box, bool exclude_j_zero = true,
                                             bool exclude_origin = false);
  // Sites of E_N cap {j != 0}: 0 < |(ell,j)| <= N.
  static std::vector<MultiIndex> ball_indices(int nu, int d, double N);
  // Window {k' : dist(center, k') <= N} in Z^nu x Z^d_*.
  static std::vector<MultiIndex> window_indices(const MultiIndex& center, double N);

  long nrows() const { return static_cast<long>(rows_.size()); }
  long ncols() const { return static_cast<long>(cols_.size()); }
  const std::vector<MultiIndex>& rows() const { return rows_; }
  const std::vector<MultiIndex>& cols() const { return cols_; }
  long row_pos(const MultiIndex& k) const;  // -1 if absent
  long col_pos(const MultiIndex& k) const;

  Eigen::MatrixXcd& mat() { return a_; }
  const Eigen::MatrixXcd& mat() const { return a_; }

  cplx entry(const MultiIndex& r, const MultiIndex& c) const;

  // |M|_s, with [M(k)] = sup of |entries| over pairs at difference k.
  double decay_norm(double s) const;
  // sum_k [M(k)]; dominates the l2 operator norm.
  double profile_l1() const;
  double hermitian_defect_fro() const;  // ||M - M^*||_F / max(||M||_F, eps)

  // Matrix-vector product; h must be supported inside the column set.
  TorusFunction apply(const TorusFunction& h, int out_Lphi, int out_Lx) const;

  DecayMatrix submatrix(const MultiIndex& center, double N) const;

  // Dense inverse; throws Singular when the LU condition estimate exceeds
  // cond_limit.
  DecayMatrix invert_dense(double cond_limit = 1e12) const;

  DecayMatrix operator*(const DecayMatrix& o) const;

  static DecayMatrix identity(const std::vector<MultiIndex>& idx);

 private:
  std::vector<MultiIndex> rows_, cols_;
  std::unordered_map<std::uint64_t, long> rpos_, cpos_;
  Eigen::MatrixXcd a_;
};

// Matrix of the multiplication operator h -> a*h on rows x cols.
DecayMatrix multiplication_matrix(const TorusFunction& a,
                                  const std::vector<MultiIndex>& rows,
                                  const std::vector<MultiIndex>& cols);

// Returns (|M1*M2|_s, (1/2)|M1|_{s0}|M2|_s + (C(s)/2)|M1|_s|M2|_{s0}) with
// C(s) = 4^(s-s0); the caller asserts lhs <= rhs.
std::pair<double, double> interpolation_check(const DecayMatrix& m1, const DecayMatrix& m2,
                                              double s, double s0);

inline double interp_constant(double s, double s0) { return std::pow(4.0, s - s0); }

}  // namespace kqp

#endif
