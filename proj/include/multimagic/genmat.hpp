#pragma once

// n-multimagic d-generator matrices: X = (A_1 ... A_d) in GL_dn(R) such that
// every n x n minor of sum_i delta_i A_i is a unit for every delta in
// {-1,0,1}^d \ {0}. Certification is always by direct minor computation.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "multimagic/bigint.hpp"
#include "multimagic/errors.hpp"
#include "multimagic/matrix.hpp"
#include "multimagic/ring.hpp"

namespace multimagic {

/// Largest dn for which minor enumeration is attempted.
inline constexpr unsigned kMaxGeneratorSize = 16;

using SignPattern = std::vector<int>;

struct GeneratorMatrix {
  FiniteRing ring;
  unsigned n = 0;
  unsigned d = 0;
  RingMatrix X;

  RingMatrix block(unsigned i) const { return X.column_block(static_cast<std::size_t>(i) * n, n); }
};

enum class PatternSet {
  all,         ///< every delta in {-1,0,1}^d except 0 (perfect hypercubes)
  magic_only,  ///< single blocks and all-nonzero deltas (lines and space diagonals only)
};

/// Sign patterns in canonical order: the base-3 code sum_i digit(delta_i) 3^i ascending,
/// digit(0)=0, digit(1)=1, digit(-1)=2. With `modulo_negation` only patterns whose
/// first non-zero entry is +1 are kept; minors of -M are units iff those of M are.
inline std::vector<SignPattern> sign_patterns(unsigned d, bool modulo_negation = true, PatternSet set = PatternSet::all) {
  std::vector<SignPattern> out;
  const std::uint64_t total = detail::checked_pow(3, d);
  for (std::uint64_t code = 1; code < total; ++code) {
    SignPattern p(d);
    std::uint64_t c = code;
    unsigned nonzero = 0;
    for (unsigned i = 0; i < d; ++i, c /= 3) {
      p[i] = c % 3 == 0 ? 0 : (c % 3 == 1 ? 1 : -1);
      nonzero += p[i] != 0;
    }
    if (modulo_negation && *std::find_if(p.begin(), p.end(), [](int v) { return v != 0; }) != 1) continue;
    if (set == PatternSet::magic_only && nonzero != 1 && nonzero != d) continue;
    out.push_back(std::move(p));
  }
  return out;
}

/// sum_i delta_i A_i
inline RingMatrix combine_blocks(const FiniteRing& ring, const RingMatrix& X, unsigned n, const SignPattern& delta) {
  RingMatrix out(X.rows(), n);
  for (unsigned i = 0; i < delta.size(); ++i) {
    if (delta[i] == 0) continue;
    for (std::size_t r = 0; r < X.rows(); ++r)
      for (unsigned c = 0; c < n; ++c) {
        const Elem v = X(r, static_cast<std::size_t>(i) * n + c);
        out(r, c) = delta[i] > 0 ? ring.add(out(r, c), v) : ring.sub(out(r, c), v);
      }
  }
  return out;
}

namespace detail {

/// Calls f on every k-subset of {0..n-1} in lexicographic order until f returns false.
template <typename F>
bool for_each_subset(std::size_t n, std::size_t k, F&& f) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return true;
  for (;;) {
    if (!f(std::as_const(idx))) return false;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return true;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

inline std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (auto x : v) s += (s.empty() ? "" : ",") + std::to_string(x);
  return s;
}

}  // namespace detail

struct MinorWitness {
  SignPattern pattern;
  std::vector<std::size_t> rows;  // 0-based row indices of the failing minor
  Elem value;
};

struct CertificationReport {
  bool passed = false;
  bool invertible = false;
  Elem determinant;
  // First failing minor: det(X) itself (empty pattern), then (pattern, row-set) order.
  std::optional<MinorWitness> failure;
  std::uint64_t minors_checked = 0;

  std::string summary(const FiniteRing& ring) const {
    std::ostringstream os;
    os << (passed ? "certified" : "NOT certified") << ": det=" << ring.format(determinant)
       << (invertible ? " (unit)" : " (not a unit)") << ", " << minors_checked << " minors checked";
    if (failure && failure->pattern.empty()) {
      os << "; full determinant = " << ring.format(failure->value);
    } else if (failure) {
      os << "; minor on rows {" << detail::join(failure->rows) << "} of pattern (";
      for (std::size_t i = 0; i < failure->pattern.size(); ++i) os << (i ? "," : "") << failure->pattern[i];
      os << ") = " << ring.format(failure->value);
    }
    return os.str();
  }
};

/// Checks that X (dn x dn) is an n-multimagic d-generator matrix over `ring`.
inline CertificationReport verify_generator(const FiniteRing& ring, unsigned n, unsigned d, const RingMatrix& X,
                                            PatternSet set = PatternSet::all) {
  if (n == 0 || d == 0) throw DimensionMismatch("n and d must be positive");
  const std::size_t size = static_cast<std::size_t>(n) * d;
  if (X.rows() != size || X.cols() != size)
    throw DimensionMismatch("generator must be " + std::to_string(size) + "x" + std::to_string(size));
  if (size > kMaxGeneratorSize) throw SearchBudgetExceeded("minor enumeration refused for dn > 16");
  CertificationReport report;
  report.determinant = determinant(ring, X);
  report.invertible = ring.is_unit(report.determinant);
  if (!report.invertible) {
    std::vector<std::size_t> all(size);
    for (std::size_t i = 0; i < size; ++i) all[i] = i;
    report.failure = MinorWitness{{}, std::move(all), report.determinant};
    return report;
  }
  for (const auto& pattern : sign_patterns(d, true, set)) {
    const RingMatrix m = combine_blocks(ring, X, n, pattern);
    detail::for_each_subset(size, n, [&](const std::vector<std::size_t>& rows) {
      ++report.minors_checked;
      const Elem v = determinant(ring, m.select_rows(rows));
      if (!ring.is_unit(v)) {
        report.failure = MinorWitness{pattern, rows, v};
        return false;
      }
      return true;
    });
    if (report.failure) break;
  }
  report.passed = report.invertible && !report.failure;
  return report;
}

inline CertificationReport verify_generator(const GeneratorMatrix& g, PatternSet set = PatternSet::all) {
  return verify_generator(g.ring, g.n, g.d, g.X, set);
}

namespace detail {

inline void require_units(const FiniteRing& ring, std::initializer_list<std::int64_t> values) {
  for (auto v : values)
    if (!ring.is_unit(ring.from_int(v)))
      throw SmallUnitGroup(std::to_string(v) + " is not a unit in " + ring.descriptor());
}

}  // namespace detail

/// The 2n x n matrix with rows (i-1)^(j-1) for i = 1..2n-1 (0^0 = 1) and a last row (0,...,0,1).
inline RingMatrix vandermonde_A(const FiniteRing& ring, unsigned n) {
  if (n < 2) throw DimensionMismatch("vandermonde_A requires n >= 2");
  for (std::int64_t v = 1; v <= 2 * static_cast<std::int64_t>(n) - 2; ++v) detail::require_units(ring, {v});
  RingMatrix a(2 * n, n);
  for (unsigned i = 0; i + 1 < 2 * n; ++i)
    for (unsigned j = 0; j < n; ++j) a(i, j) = ring.pow(ring.from_int(i), j);
  a(2 * n - 1, n - 1) = ring.one();
  detail::for_each_subset(2 * n, n, [&](const std::vector<std::size_t>& rows) {
    if (!ring.is_unit(determinant(ring, a.select_rows(rows))))
      throw Error("vandermonde_A: minor on rows {" + detail::join(rows) + "} is not a unit");
    return true;
  });
  return a;
}

/// For A = (P; Q) returns B = (2P; -2Q).
inline RingMatrix companion_B(const FiniteRing& ring, const RingMatrix& A) {
  if (A.rows() != 2 * A.cols()) throw DimensionMismatch("companion_B expects a 2n x n matrix");
  detail::require_units(ring, {2, 3});
  const std::size_t n = A.cols();
  RingMatrix b(A.rows(), n);
  const Elem two = ring.from_int(2), minus_two = ring.from_int(-2);
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < n; ++j) b(i, j) = ring.mul(i < n ? two : minus_two, A(i, j));
  return b;
}

/// X = (A B) over F_q with A Vandermonde-style and B its companion. Certified before return.
inline GeneratorMatrix explicit_generator(unsigned n, std::uint64_t q) {
  if (n < 2) throw DimensionMismatch("explicit generator requires n >= 2");
  if (!detail::is_prime(q)) throw Error("explicit generator requires a prime q, got " + std::to_string(q));
  FiniteRing ring = FiniteRing::prime_field(q);
  RingMatrix a = vandermonde_A(ring, n);
  RingMatrix b = companion_B(ring, a);
  GeneratorMatrix g{ring, n, 2, hconcat(a, b)};
  auto report = verify_generator(g);
  if (!report.passed) throw Error("explicit generator failed certification: " + report.summary(ring));
  return g;
}

// ---------------------------------------------------------------------------
// Effective search over integer matrices.

enum class SearchStrategy { sequential, seeded_random };

struct SearchOptions {
  SearchStrategy strategy = SearchStrategy::sequential;
  std::uint64_t seed = 0;
  std::uint64_t budget = 1'000'000;
};

struct FoundGenerator {
  std::uint64_t q = 0;
  GeneratorMatrix generator;
  std::vector<std::vector<std::int64_t>> integer_rows;
  std::uint64_t candidates = 0;
  CertificationReport certification;
};

namespace detail {

using IntMatrix = std::vector<std::vector<BigInt>>;

// Fraction-free Gaussian elimination over Z.
inline BigInt bareiss_det(IntMatrix a) {
  const std::size_t n = a.size();
  if (n == 0) return 1;
  BigInt prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t r = k + 1;
      while (r < n && a[r][k] == 0) ++r;
      if (r == n) return 0;
      std::swap(a[k], a[r]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

// One factor of the product polynomial: det(X) or a minor of a signed block sum.
struct Factor {
  SignPattern pattern;             // empty for det(X)
  std::vector<std::size_t> rows;
  std::size_t last_variable = 0;   // row-major index of the last entry it depends on
};

inline std::vector<Factor> product_factors(unsigned n, unsigned d) {
  const std::size_t size = static_cast<std::size_t>(n) * d;
  std::vector<Factor> out;
  for (const auto& p : sign_patterns(d, true, PatternSet::all)) {
    unsigned last_block = 0;
    for (unsigned i = 0; i < d; ++i)
      if (p[i] != 0) last_block = i;
    for_each_subset(size, n, [&](const std::vector<std::size_t>& rows) {
      out.push_back({p, rows, rows.back() * size + (last_block + 1) * n - 1});
      return true;
    });
  }
  out.push_back({{}, {}, size * size - 1});
  return out;
}

inline BigInt factor_value(const Factor& f, const std::vector<std::vector<std::int64_t>>& x, unsigned n) {
  if (f.pattern.empty()) {
    IntMatrix m(x.size(), std::vector<BigInt>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = 0; j < x.size(); ++j) m[i][j] = x[i][j];
    return bareiss_det(std::move(m));
  }
  IntMatrix m(n, std::vector<BigInt>(n, 0));
  for (std::size_t r = 0; r < n; ++r)
    for (unsigned b = 0; b < f.pattern.size(); ++b)
      if (f.pattern[b] != 0)
        for (unsigned c = 0; c < n; ++c) m[r][c] += f.pattern[b] * x[f.rows[r]][b * n + c];
  return bareiss_det(std::move(m));
}

inline std::uint64_t smallest_coprime_prime(const std::vector<BigInt>& values) {
  for (std::uint64_t p = 2;; ++p) {
    if (!is_prime(p)) continue;
    bool ok = true;
    for (const auto& v : values)
      if (v % p == 0) {
        ok = false;
        break;
      }
    if (ok) return p;
  }
}

inline std::int64_t spiral(std::size_t i) {
  // 0, 1, -1, 2, -2, ...
  const auto k = static_cast<std::int64_t>((i + 1) / 2);
  return i % 2 == 1 ? k : -k;
}

}  // namespace detail

/// Finds an integer matrix at which the product of det(X) and all minors of all
/// signed block sums is non-zero, then reduces it modulo the smallest prime not
/// dividing any of those factors.
///
/// `sequential` assigns entries in row-major order, trying values 0, 1, -1, 2, -2, ...
/// within a bound that grows on exhaustion, and prunes as soon as a factor whose
/// entries are all assigned vanishes. `seeded_random` draws whole candidates from
/// a seeded generator with a slowly growing entry bound. Every assignment tried
/// counts against the budget.
inline FoundGenerator find_generator(unsigned n, unsigned d, const SearchOptions& options = {}) {
  if (n < 1 || d < 2) throw DimensionMismatch("find_generator requires n >= 1, d >= 2");
  const std::size_t size = static_cast<std::size_t>(n) * d;
  if (size > kMaxGeneratorSize) throw SearchBudgetExceeded("minor enumeration refused for dn > 16");
  const auto factors = detail::product_factors(n, d);
  std::vector<std::vector<std::size_t>> by_variable(size * size);
  for (std::size_t i = 0; i < factors.size(); ++i) by_variable[factors[i].last_variable].push_back(i);

  std::vector<std::vector<std::int64_t>> x(size, std::vector<std::int64_t>(size, 0));
  std::uint64_t tried = 0;
  bool found = false;

  auto budget_check = [&] {
    if (++tried > options.budget)
      throw SearchBudgetExceeded("no generator found within " + std::to_string(options.budget) + " candidates");
  };

  if (options.strategy == SearchStrategy::sequential) {
    for (std::int64_t bound = 1; !found; ++bound) {
      const std::size_t values = 2 * static_cast<std::size_t>(bound) + 1;
      std::function<bool(std::size_t)> assign = [&](std::size_t var) -> bool {
        if (var == size * size) return true;
        auto& cell = x[var / size][var % size];
        for (std::size_t v = 0; v < values; ++v) {
          budget_check();
          cell = detail::spiral(v);
          bool ok = true;
          for (auto fi : by_variable[var])
            if (detail::factor_value(factors[fi], x, n) == 0) {
              ok = false;
              break;
            }
          if (ok && assign(var + 1)) return true;
        }
        cell = 0;
        return false;
      };
      found = assign(0);
    }
  } else {
    std::mt19937_64 rng(options.seed);
    while (!found) {
      budget_check();
      const std::int64_t bound = 2 + static_cast<std::int64_t>(tried / 10'000);
      for (auto& row : x)
        for (auto& v : row) v = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(2 * bound + 1)) - bound;
      found = std::all_of(factors.begin(), factors.end(),
                          [&](const detail::Factor& f) { return detail::factor_value(f, x, n) != 0; });
    }
  }

  std::vector<BigInt> values;
  values.reserve(factors.size());
  for (const auto& f : factors) values.push_back(detail::factor_value(f, x, n));
  const std::uint64_t q = detail::smallest_coprime_prime(values);

  FiniteRing ring = FiniteRing::modular(q);
  FoundGenerator out{q, GeneratorMatrix{ring, n, d, RingMatrix::from_ints(ring, x)}, x, tried, {}};
  out.certification = verify_generator(out.generator);
  if (!out.certification.passed) throw Error("internal: searched generator failed re-certification");
  return out;
}

/// Exhaustive search over all dn x dn matrices over `ring` in odometer order;
/// returns the first certified one, nullopt if none exists.
inline std::optional<GeneratorMatrix> search_ring_generator(const FiniteRing& ring, unsigned n, unsigned d,
                                                            std::uint64_t limit = 1'000'000) {
  const std::size_t size = static_cast<std::size_t>(n) * d;
  const std::uint64_t cells = size * size;
  if (cells > 64 || detail::checked_pow(ring.size(), static_cast<unsigned>(cells)) > limit)
    throw SearchBudgetExceeded("exhaustive generator search over " + ring.descriptor() + " exceeds " + std::to_string(limit) +
                               " matrices");
  RingMatrix X(size, size);
  std::vector<Elem> flat(cells);
  do {
    for (std::size_t i = 0; i < cells; ++i) X(i / size, i % size) = flat[i];
    if (verify_generator(ring, n, d, X).passed) return GeneratorMatrix{ring, n, d, X};
  } while ([&] {
    for (auto& e : flat) {
      if (++e.code < ring.size()) return true;
      e.code = 0;
    }
    return false;
  }());
  return std::nullopt;
}

}  // namespace multimagic
