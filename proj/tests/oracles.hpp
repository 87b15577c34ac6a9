#pragma once

// Reference computations for the test suites, written independently of the
// library: brute-force sums, permutation-expansion determinants, naive line
// scans. Slow but obviously correct.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace oracle {

using Big = boost::multiprecision::cpp_int;
using Grid = std::vector<std::vector<std::uint64_t>>;

inline Big power(Big b, unsigned e) {
  Big r = 1;
  while (e--) r *= b;
  return r;
}

/// sum_{k=1}^{n} k^e by direct summation.
inline Big power_sum(std::uint64_t n, unsigned e) {
  Big s = 0;
  for (std::uint64_t k = 1; k <= n; ++k) s += power(Big(k), e);
  return s;
}

/// Exact integer determinant by the Leibniz expansion.
inline Big leibniz_det(const std::vector<std::vector<std::int64_t>>& a) {
  const std::size_t n = a.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Big total = 0;
  do {
    int inversions = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (perm[i] > perm[j]) ++inversions;
    Big term = inversions % 2 ? -1 : 1;
    for (std::size_t i = 0; i < n; ++i) term *= a[i][perm[i]];
    total += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

/// Leibniz determinant reduced into [0, q).
inline std::int64_t leibniz_det(const std::vector<std::vector<std::int64_t>>& a, std::int64_t q) {
  Big r = leibniz_det(a) % q;
  if (r < 0) r += q;
  return r.convert_to<std::int64_t>();
}

inline Grid to_grid(std::uint64_t m, const std::vector<std::uint64_t>& flat) {
  Grid g(m, std::vector<std::uint64_t>(m));
  for (std::uint64_t i = 0; i < m; ++i)
    for (std::uint64_t j = 0; j < m; ++j) g[i][j] = flat[i * m + j];
  return g;
}

inline bool is_normal(const Grid& g) {
  std::vector<std::uint64_t> all;
  for (const auto& r : g) all.insert(all.end(), r.begin(), r.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i)
    if (all[i] != i + 1) return false;
  return true;
}

/// Rows, columns and both main diagonals of the e-th power square share one sum.
inline bool is_magic_power(const Grid& g, unsigned e) {
  const std::size_t m = g.size();
  std::vector<Big> sums;
  for (std::size_t i = 0; i < m; ++i) {
    Big r = 0, c = 0;
    for (std::size_t j = 0; j < m; ++j) {
      r += power(Big(g[i][j]), e);
      c += power(Big(g[j][i]), e);
    }
    sums.push_back(r);
    sums.push_back(c);
  }
  Big d = 0, a = 0;
  for (std::size_t i = 0; i < m; ++i) {
    d += power(Big(g[i][i]), e);
    a += power(Big(g[i][m - 1 - i]), e);
  }
  sums.push_back(d);
  sums.push_back(a);
  return std::all_of(sums.begin(), sums.end(), [&](const Big& s) { return s == sums.front(); });
}

inline bool is_multimagic(const Grid& g, unsigned n) {
  for (unsigned e = 1; e <= n; ++e)
    if (!is_magic_power(g, e)) return false;
  return true;
}

inline bool is_associative(const Grid& g) {
  const std::size_t m = g.size();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (g[i][j] + g[m - 1 - i][m - 1 - j] != m * m + 1) return false;
  return true;
}

/// All broken diagonals (both directions) of the square itself sum to the magic sum.
inline bool is_pandiagonal(const Grid& g) {
  const std::size_t m = g.size();
  const std::uint64_t target = m * (m * m + 1) / 2;
  for (std::size_t s = 0; s < m; ++s) {
    std::uint64_t f = 0, b = 0;
    for (std::size_t i = 0; i < m; ++i) {
      f += g[i][(i + s) % m];
      b += g[i][(s + m - i) % m];
    }
    if (f != target || b != target) return false;
  }
  return true;
}

/// C(n, k) by the multiplicative formula.
inline Big binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  Big r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline std::uint64_t gcd(std::uint64_t a, std::uint64_t b) { return std::gcd(a, b); }

}  // namespace oracle
