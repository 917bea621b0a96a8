#include "kqp/decay_matrix.hpp"

#include <cmath>

namespace kqp {

DecayMatrix::DecayMatrix(std::vector<MultiIndex> rows, std::vector<MultiIndex> cols)
    : rows_(std::move(rows)), cols_(std::move(cols)) {
  a_ = Eigen::MatrixXcd::Zero(rows_.size(), cols_.size());
  for (long i = 0; i < nrows(); ++i) rpos_[pack_key(rows_[i])] = i;
  for (long i = 0; i < ncols(); ++i) cpos_[pack_key(cols_[i])] = i;
  if (rpos_.size() != rows_.size() || cpos_.size() != cols_.size())
    throw IndexError("DecayMatrix: duplicate indices");
}

std::vector<MultiIndex> DecayMatrix::box_indices(const Box& box, bool exclude_j_zero,
                                                 bool exclude_origin) {
  std::vector<MultiIndex> idx;
  idx.reserve(box.size());
  for (long f = 0; f < box.size(); ++f) {
    MultiIndex k = box.unflat(f);
    if (exclude_j_zero && is_zero(k.j)) continue;
    if (exclude_origin && sup_norm(k) == 0) continue;
    idx.push_back(k);
  }
  return idx;
}

std::vector<MultiIndex> DecayMatrix::ball_indices(int nu, int d, double N) {
  int L = static_cast<int>(std::floor(N));
  Box b(nu, d, L, L);
  std::vector<MultiIndex> idx;
  for (long f = 0; f < b.size(); ++f) {
    MultiIndex k = b.unflat(f);
    if (is_zero(k.j)) continue;
    int n = sup_norm(k);
    if (n > 0 && n <= N) idx.push_back(k);
  }
  return idx;
}

std::vector<MultiIndex> DecayMatrix::window_indices(const MultiIndex& center, double N) {
  int L = static_cast<int>(std::floor(N));
  int nu = static_cast<int>(center.ell.size());
  int d = static_cast<int>(center.j.size());
  Box b(nu, d, L, L);
  std::vector<MultiIndex> idx;
  for (long f = 0; f < b.size(); ++f) {
    MultiIndex off = b.unflat(f);
    if (sup_norm(off) > N) continue;
    MultiIndex k = center + off;
    if (is_zero(k.j)) continue;
    idx.push_back(k);
  }
  return idx;
}

long DecayMatrix::row_pos(const MultiIndex& k) const {
  auto it = rpos_.find(pack_key(k));
  return it == rpos_.end() ? -1 : it->second;
}

long DecayMatrix::col_pos(const MultiIndex& k) const {
  auto it = cpos_.find(pack_key(k));
  return it == cpos_.end() ? -1 : it->second;
}

cplx DecayMatrix::entry(const MultiIndex& r, const MultiIndex& c) const {
  long i = row_pos(r), j = col_pos(c);
  if (i < 0 || j < 0) return cplx(0, 0);
  return a_(i, j);
}

double DecayMatrix::decay_norm(double s) const {
  // [M(k)] = sup over entry pairs at difference k
  std::unordered_map<std::uint64_t, double> prof;
  std::unordered_map<std::uint64_t, double> wcache;
  prof.reserve(16 * (rows_.size() + cols_.size()));
  for (long i = 0; i < nrows(); ++i)
    for (long j = 0; j < ncols(); ++j) {
      double v = std::abs(a_(i, j));
      if (v == 0) continue;
      MultiIndex diff = rows_[i] - cols_[j];
      std::uint64_t key = pack_key(diff);
      auto [it, fresh] = prof.try_emplace(key, v);
      if (!fresh && it->second < v) it->second = v;
      wcache.try_emplace(key, weight(diff));
    }
  double acc = 0;
  for (auto& [key, v] : prof) acc += v * v * std::pow(wcache[key], 2 * s);
  return std::sqrt(acc);
}

double DecayMatrix::profile_l1() const {
  std::unordered_map<std::uint64_t, double> prof;
  for (long i = 0; i < nrows(); ++i)
    for (long j = 0; j < ncols(); ++j) {
      double v = std::abs(a_(i, j));
      if (v == 0) continue;
      std::uint64_t key = pack_key(rows_[i] - cols_[j]);
      auto [it, fresh] = prof.try_emplace(key, v);
      if (!fresh && it->second < v) it->second = v;
    }
  double acc = 0;
  for (auto& [key, v] : prof) acc += v;
  return acc;
}

double DecayMatrix::hermitian_defect_fro() const {
  if (nrows() != ncols()) throw DomainError("hermitian_defect: square matrix required");
  double num = (a_ - a_.adjoint()).norm();
  double den = std::max(a_.norm(), 1e-300);
  return num / den;
}

TorusFunction DecayMatrix::apply(const TorusFunction& h, int out_Lphi, int out_Lx) const {
  // h must live inside the column set
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(ncols());
  for (long f = 0; f < h.size(); ++f) {
    cplx v = h.coeffs()[f];
    if (v == cplx(0, 0)) continue;
    long p = col_pos(h.box().unflat(f));
    if (p < 0)
      throw IndexError("DecayMatrix::apply: mode outside column support " +
                       to_string_index(h.box().unflat(f)));
    x[p] = v;
  }
  Eigen::VectorXcd y = a_ * x;
  TorusFunction out(Box(h.nu(), h.d(), out_Lphi, out_Lx));
  for (long i = 0; i < nrows(); ++i) {
    long f = out.box().flat(rows_[i]);
    if (f >= 0) out.coeffs()[f] += y[i];
  }
  return out;
}

DecayMatrix DecayMatrix::submatrix(const MultiIndex& center, double N) const {
  std::vector<MultiIndex> r, c;
  std::vector<long> ri, ci;
  for (long i = 0; i < nrows(); ++i)
    if (dist(rows_[i], center) <= N) { r.push_back(rows_[i]); ri.push_back(i); }
  for (long j = 0; j < ncols(); ++j)
    if (dist(cols_[j], center) <= N) { c.push_back(cols_[j]); ci.push_back(j); }
  DecayMatrix out(r, c);
  for (size_t i = 0; i < ri.size(); ++i)
    for (size_t j = 0; j < ci.size(); ++j) out.a_(i, j) = a_(ri[i], ci[j]);
  return out;
}

DecayMatrix DecayMatrix::invert_dense(double cond_limit) const {
  if (nrows() != ncols()) throw DomainError("invert_dense: square matrix required");
  if (nrows() == 0) return *this;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a_);
  // rcond alone is unreliable on exactly singular input; a vanishing pivot
  // settles it
  double pivot_min = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  double rc = lu.rcond();
  if (pivot_min == 0.0 || !std::isfinite(rc) || !(rc > 1.0 / cond_limit))
    throw Singular("invert_dense: condition estimate " +
                   std::to_string(rc > 0 ? 1.0 / rc : std::numeric_limits<double>::infinity()) +
                   " exceeds limit");
  DecayMatrix out(cols_, rows_);
  out.a_ = lu.inverse();
  return out;
}

DecayMatrix DecayMatrix::operator*(const DecayMatrix& o) const {
  // column set of the left factor must match the row set of the right one
  if (ncols() != o.nrows()) throw DomainError("DecayMatrix product: shape mismatch");
  for (long i = 0; i < ncols(); ++i)
    if (!(cols_[i] == o.rows_[i])) throw DomainError("DecayMatrix product: index mismatch");
  DecayMatrix out(rows_, o.cols_);
  out.a_ = a_ * o.a_;
  return out;
}

DecayMatrix DecayMatrix::identity(const std::vector<MultiIndex>& idx) {
  DecayMatrix out(idx, idx);
  out.a_.setIdentity();
  return out;
}

DecayMatrix multiplication_matrix(const TorusFunction& a,
                                  const std::vector<MultiIndex>& rows,
                                  const std::vector<MultiIndex>& cols) {
  DecayMatrix out(rows, cols);
  for (long i = 0; i < out.nrows(); ++i)
    for (long j = 0; j < out.ncols(); ++j)
      out.mat()(i, j) = a.coeff(out.rows()[i] - out.cols()[j]);
  return out;
}

std::pair<double, double> interpolation_check(const DecayMatrix& m1, const DecayMatrix& m2,
                                              double s, double s0) {
  double lhs = (m1 * m2).decay_norm(s);
  double rhs = 0.5 * m1.decay_norm(s0) * m2.decay_norm(s) +
               0.5 * interp_constant(s, s0) * m1.decay_norm(s) * m2.decay_norm(s0);
  return {lhs, rhs};
}

}  // namespace kqp
