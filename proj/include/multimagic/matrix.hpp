#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "multimagic/errors.hpp"
#include "multimagic/ring.hpp"

namespace multimagic {

/// Dense row-major matrix of ring element codes. The ring is supplied by the caller per operation.
class RingMatrix {
 public:
  RingMatrix() = default;
  RingMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  /// Reduces signed integer rows into the ring.
  static RingMatrix from_ints(const FiniteRing& ring, const std::vector<std::vector<std::int64_t>>& rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r ? rows.front().size() : 0;
    RingMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
      if (rows[i].size() != c) throw DimensionMismatch("ragged matrix rows");
      for (std::size_t j = 0; j < c; ++j) m(i, j) = ring.from_int(rows[i][j]);
    }
    return m;
  }

  static RingMatrix identity(std::size_t n) {
    RingMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Elem{1};
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  Elem& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  Elem operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const Elem> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  /// Columns [first, first + count).
  RingMatrix column_block(std::size_t first, std::size_t count) const {
    if (first + count > cols_) throw DimensionMismatch("column block out of range");
    RingMatrix out(rows_, count);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < count; ++j) out(i, j) = (*this)(i, first + j);
    return out;
  }

  RingMatrix select_rows(std::span<const std::size_t> which) const {
    RingMatrix out(which.size(), cols_);
    for (std::size_t i = 0; i < which.size(); ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(i, j) = (*this)(which[i], j);
    return out;
  }

  friend bool operator==(const RingMatrix&, const RingMatrix&) = default;

  std::vector<std::vector<std::uint64_t>> codes() const {
    std::vector<std::vector<std::uint64_t>> out(rows_, std::vector<std::uint64_t>(cols_));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out[i][j] = (*this)(i, j).code;
    return out;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Elem> data_;
};

inline RingMatrix add(const FiniteRing& ring, const RingMatrix& a, const RingMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("matrix sum shape mismatch");
  RingMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = ring.add(a(i, j), b(i, j));
  return out;
}

inline RingMatrix scale(const FiniteRing& ring, Elem s, const RingMatrix& a) {
  RingMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = ring.mul(s, a(i, j));
  return out;
}

inline RingMatrix hconcat(const RingMatrix& a, const RingMatrix& b) {
  if (a.rows() != b.rows()) throw DimensionMismatch("hconcat row mismatch");
  RingMatrix out(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j) out(i, a.cols() + j) = b(i, j);
  }
  return out;
}

inline std::vector<Elem> multiply(const FiniteRing& ring, const RingMatrix& m, std::span<const Elem> v) {
  if (m.cols() != v.size()) throw DimensionMismatch("matrix-vector shape mismatch");
  std::vector<Elem> out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Elem s = ring.zero();
    for (std::size_t j = 0; j < m.cols(); ++j) s = ring.add(s, ring.mul(m(i, j), v[j]));
    out[i] = s;
  }
  return out;
}

namespace detail {

// Z/qZ: Euclidean row reduction on residues. Each step subtracts an integer
// multiple of one row from another (or swaps rows), which is unimodular over
// any quotient of Z, so no non-unit is ever inverted.
inline Elem det_modular(const FiniteRing& ring, RingMatrix a) {
  const std::size_t n = a.rows();
  const std::uint64_t q = ring.size();
  bool negate = false;
  for (std::size_t col = 0; col < n; ++col) {
    for (;;) {
      std::size_t pivot = n;
      for (std::size_t r = col; r < n; ++r)
        if (a(r, col).code != 0 && (pivot == n || a(r, col).code < a(pivot, col).code)) pivot = r;
      if (pivot == n) return ring.zero();
      bool done = true;
      for (std::size_t r = col; r < n; ++r) {
        if (r == pivot || a(r, col).code == 0) continue;
        const std::uint64_t factor = a(r, col).code / a(pivot, col).code;
        const Elem neg_factor = ring.neg(Elem{factor % q});
        for (std::size_t c = col; c < n; ++c) a(r, c) = ring.add(a(r, c), ring.mul(neg_factor, a(pivot, c)));
        if (a(r, col).code != 0) done = false;
      }
      if (done) {
        if (pivot != col) {
          for (std::size_t c = col; c < n; ++c) std::swap(a(pivot, c), a(col, c));
          negate = !negate;
        }
        break;
      }
    }
  }
  Elem d = ring.one();
  for (std::size_t i = 0; i < n; ++i) d = ring.mul(d, a(i, i));
  return negate ? ring.neg(d) : d;
}

// GF(p^k) is a field: ordinary elimination.
inline Elem det_field(const FiniteRing& ring, RingMatrix a) {
  const std::size_t n = a.rows();
  Elem d = ring.one();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a(pivot, col).code == 0) ++pivot;
    if (pivot == n) return ring.zero();
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(pivot, c), a(col, c));
      d = ring.neg(d);
    }
    d = ring.mul(d, a(col, col));
    const Elem inv = *ring.try_inverse(a(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      if (a(r, col).code == 0) continue;
      const Elem f = ring.neg(ring.mul(a(r, col), inv));
      for (std::size_t c = col; c < n; ++c) a(r, c) = ring.add(a(r, c), ring.mul(f, a(col, c)));
    }
  }
  return d;
}

}  // namespace detail

/// Determinant over a commutative ring that may have zero divisors.
inline Elem determinant(const FiniteRing& ring, const RingMatrix& m) {
  if (!m.square()) throw DimensionMismatch("determinant of a non-square matrix");
  if (m.rows() == 0) return ring.one();
  if (ring.kind() == FiniteRing::Kind::modular || ring.degree() == 1) return detail::det_modular(ring, m);
  return detail::det_field(ring, m);
}

inline bool is_invertible(const FiniteRing& ring, const RingMatrix& m) { return ring.is_unit(determinant(ring, m)); }

}  // namespace multimagic
