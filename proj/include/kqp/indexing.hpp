#ifndef KQP_INDEXING_HPP
#define KQP_INDEXING_HPP

#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "kqp/errors.hpp"

namespace kqp {

// Fourier index (ell, j) on T^nu x T^d.  ell is the time block, j the space block.
struct MultiIndex {
  std::vector<int> ell;
  std::vector<int> j;

  bool operator==(const MultiIndex& o) const { return ell == o.ell && j == o.j; }
};

inline int sup_norm(const std::vector<int>& v) {
  int m = 0;
  for (int c : v) m = std::max(m, std::abs(c));
  return m;
}

inline bool is_zero(const std::vector<int>& v) {
  for (int c : v) if (c != 0) return false;
  return true;
}

// |k| = max(|ell|_inf, |j|_inf).  All index-set geometry uses the sup norm.
inline int sup_norm(const MultiIndex& k) {
  return std::max(sup_norm(k.ell), sup_norm(k.j));
}

// <ell,j> = max(1, |ell|, |j|); weight of the Sobolev scale, always >= 1.
inline double weight(const MultiIndex& k) {
  return static_cast<double>(std::max(1, sup_norm(k)));
}

// Euclidean |j|^2, the Laplacian symbol.  Distinct from the sup-norm weight.
inline double j_sq(const std::vector<int>& j) {
  double s = 0;
  for (int c : j) s += static_cast<double>(c) * c;
  return s;
}

inline MultiIndex operator-(const MultiIndex& a, const MultiIndex& b) {
  MultiIndex r = a;
  for (size_t i = 0; i < r.ell.size(); ++i) r.ell[i] -= b.ell[i];
  for (size_t i = 0; i < r.j.size(); ++i) r.j[i] -= b.j[i];
  return r;
}

inline MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
  MultiIndex r = a;
  for (size_t i = 0; i < r.ell.size(); ++i) r.ell[i] += b.ell[i];
  for (size_t i = 0; i < r.j.size(); ++i) r.j[i] += b.j[i];
  return r;
}

inline MultiIndex negate(const MultiIndex& a) {
  MultiIndex r = a;
  for (int& c : r.ell) c = -c;
  for (int& c : r.j) c = -c;
  return r;
}

inline int dist(const MultiIndex& a, const MultiIndex& b) { return sup_norm(a - b); }

std::string to_string_index(const MultiIndex& k);

// Packs components into a 64-bit key (11 bits signed each, up to 5 components).
// Desk-scale boxes stay far inside the +-1023 range.
inline std::uint64_t pack_key(const MultiIndex& k) {
  std::uint64_t key = 1;  // sentinel bit so different lengths cannot collide
  auto push = [&key](int c) {
    if (c < -1023 || c > 1023) throw IndexError("pack_key: component out of range");
    key = (key << 11) | static_cast<std::uint64_t>(c + 1024);
  };
  for (int c : k.ell) push(c);
  for (int c : k.j) push(c);
  return key;
}

// Dense index box |ell_i| <= Lphi, |j_i| <= Lx with row-major flattening.
class Box {
 public:
  Box() = default;
  Box(int nu, int d, int Lphi, int Lx) : nu_(nu), d_(d), Lphi_(Lphi), Lx_(Lx) {
    if (nu < 1 || d < 1 || Lphi < 0 || Lx < 0) throw DomainError("Box: bad dimensions");
    size_ = 1;
    for (int i = 0; i < nu_; ++i) size_ *= 2 * Lphi_ + 1;
    for (int i = 0; i < d_; ++i) size_ *= 2 * Lx_ + 1;
  }

  int nu() const { return nu_; }
  int d() const { return d_; }
  int Lphi() const { return Lphi_; }
  int Lx() const { return Lx_; }
  long size() const { return size_; }

  bool contains(const MultiIndex& k) const {
    return sup_norm(k.ell) <= Lphi_ && sup_norm(k.j) <= Lx_;
  }

  long flat(const MultiIndex& k) const {
    if (!contains(k)) return -1;
    long f = 0;
    for (int i = 0; i < nu_; ++i) f = f * (2 * Lphi_ + 1) + (k.ell[i] + Lphi_);
    for (int i = 0; i < d_; ++i) f = f * (2 * Lx_ + 1) + (k.j[i] + Lx_);
    return f;
  }

  MultiIndex unflat(long f) const {
    MultiIndex k;
    k.ell.resize(nu_);
    k.j.resize(d_);
    for (int i = d_ - 1; i >= 0; --i) {
      k.j[i] = static_cast<int>(f % (2 * Lx_ + 1)) - Lx_;
      f /= 2 * Lx_ + 1;
    }
    for (int i = nu_ - 1; i >= 0; --i) {
      k.ell[i] = static_cast<int>(f % (2 * Lphi_ + 1)) - Lphi_;
      f /= 2 * Lphi_ + 1;
    }
    return k;
  }

  bool operator==(const Box& o) const {
    return nu_ == o.nu_ && d_ == o.d_ && Lphi_ == o.Lphi_ && Lx_ == o.Lx_;
  }

 private:
  int nu_ = 0, d_ = 0, Lphi_ = 0, Lx_ = 0;
  long size_ = 0;
};

}  // namespace kqp

#endif
