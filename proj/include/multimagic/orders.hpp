#pragma once

// Necessary conditions on the order of an n-multimagic square.
//
// A normal n-multimagic square of order m forces m | C(m^2, n+1), i.e. the
// quantity m (m^2-1) ... (m^2-n) / (n+1)! is an integer. If v_p(m) = e >= 1
// this fails at n = p^(e+1) - 1, so n <= p^(e+1) - 2.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "multimagic/bigint.hpp"
#include "multimagic/errors.hpp"
#include "multimagic/ring.hpp"

namespace multimagic {

struct Valuation {
  std::uint64_t p = 0;
  std::int64_t value = 0;
  friend bool operator==(const Valuation&, const Valuation&) = default;
};

namespace detail {

inline std::int64_t vp_int(std::uint64_t p, BigInt n) {
  std::int64_t e = 0;
  while (n % p == 0) {
    n /= p;
    ++e;
  }
  return e;
}

inline std::int64_t vp_u128(std::uint64_t p, unsigned __int128 n) {
  std::int64_t e = 0;
  while (n % p == 0) {
    n /= p;
    ++e;
  }
  return e;
}

// sum_{i>=1} floor(n / p^i)
inline std::int64_t legendre(std::uint64_t n, std::uint64_t p) {
  std::int64_t e = 0;
  for (unsigned __int128 pk = p; pk <= n; pk *= p) e += static_cast<std::int64_t>(n / pk);
  return e;
}

inline std::vector<std::pair<std::uint64_t, unsigned>> factorize(std::uint64_t m) {
  std::vector<std::pair<std::uint64_t, unsigned>> out;
  for (std::uint64_t p = 2; p * p <= m; ++p) {
    if (m % p) continue;
    unsigned e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  if (m > 1) out.emplace_back(m, 1);
  return out;
}

inline std::vector<std::uint64_t> primes_up_to(std::uint64_t n) {
  std::vector<bool> composite(n + 1, false);
  std::vector<std::uint64_t> out;
  for (std::uint64_t i = 2; i <= n; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::uint64_t j = i * i; j <= n; j += i) composite[j] = true;
  }
  return out;
}

}  // namespace detail

/// v_p(num / den); throws on a zero argument or a non-prime p.
inline Valuation vp(std::uint64_t p, const BigInt& num, const BigInt& den = 1) {
  if (!detail::is_prime(p)) throw Error(std::to_string(p) + " is not prime");
  if (num == 0 || den == 0) throw Error("valuation of zero is undefined");
  return {p, detail::vp_int(p, abs(num)) - detail::vp_int(p, abs(den))};
}

/// Upper bound on the multimagic degree of any normal square of order m:
/// the minimum over primes p | m of p^(v_p(m)+1) - 2. Necessary only.
inline BigInt degree_bound(std::uint64_t m) {
  if (m < 2) throw OutOfRange("order must be at least 2");
  std::optional<BigInt> best;
  for (auto [p, e] : detail::factorize(m)) {
    BigInt b = big_pow(BigInt(p), e + 1) - 2;
    if (!best || b < *best) best = b;
  }
  return *best;
}

/// v_p of m (m^2-1) ... (m^2-n) / (n+1)!. Requires n < m^2.
inline std::int64_t quantity_valuation(std::uint64_t m, std::uint64_t n, std::uint64_t p) {
  const unsigned __int128 sq = static_cast<unsigned __int128>(m) * m;
  if (n >= sq) throw OutOfRange("n must be below m^2");
  std::int64_t v = detail::vp_u128(p, m);
  for (std::uint64_t a = 1; a <= n; ++a) v += detail::vp_u128(p, sq - a);
  return v - detail::legendre(n + 1, p);
}

/// True iff m (m^2-1) ... (m^2-n) / (n+1)! is an integer.
inline bool binomial_feasible(std::uint64_t m, std::uint64_t n) {
  if (m < 2 || n < 1) throw OutOfRange("binomial_feasible needs m >= 2 and n >= 1");
  if (static_cast<unsigned __int128>(n) >= static_cast<unsigned __int128>(m) * m) return true;  // a zero factor
  // only primes dividing (n+1)! can make the valuation negative
  for (std::uint64_t p : detail::primes_up_to(n + 1))
    if (quantity_valuation(m, n, p) < 0) return false;
  return true;
}

struct SweepCounterexample {
  std::uint64_t m = 0;
  std::uint64_t n = 0;
};

struct SweepReport {
  std::uint64_t limit = 0;
  std::uint64_t max_n = 0;
  std::uint64_t pairs_checked = 0;
  std::vector<SweepCounterexample> counterexamples;
};

/// For every 2 <= m <= limit and n <= max_n with n > degree_bound(m), checks that
/// binomial_feasible(m, n') fails for some n' <= n.
inline SweepReport consistency_sweep(std::uint64_t limit, std::uint64_t max_n = 20) {
  SweepReport r{limit, max_n, 0, {}};
  for (std::uint64_t m = 2; m <= limit; ++m) {
    const BigInt bound = degree_bound(m);
    std::optional<std::uint64_t> first_infeasible;
    for (std::uint64_t n = 1; n <= max_n; ++n) {
      if (!first_infeasible && !binomial_feasible(m, n)) first_infeasible = n;
      if (BigInt(n) <= bound) continue;
      ++r.pairs_checked;
      if (!first_infeasible) r.counterexamples.push_back({m, n});
    }
  }
  return r;
}

}  // namespace multimagic
