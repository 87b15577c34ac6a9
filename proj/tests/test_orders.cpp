#include <gtest/gtest.h>

#include <random>

#include "multimagic/orders.hpp"
#include "oracles.hpp"

using namespace multimagic;

namespace {

// Exponent of p in |x| by repeated division; x != 0.
std::int64_t naive_vp(std::uint64_t p, oracle::Big x) {
  if (x < 0) x = -x;
  std::int64_t v = 0;
  while (x % p == 0) {
    x /= p;
    ++v;
  }
  return v;
}

BigInt big(const oracle::Big& b) { return BigInt(b.str()); }

}  // namespace

TEST(Valuation, Examples) {
  EXPECT_EQ(vp(2, 12).value, 2);
  EXPECT_EQ(vp(3, 4, 9).value, -2);
  EXPECT_EQ(vp(5, 25 * 25 - 10).value, 1);
  EXPECT_EQ(vp(5, 10).value, 1);
  EXPECT_EQ(vp(7, -49).value, 2);
  EXPECT_EQ(vp(3, 12).p, 3u);
  EXPECT_THROW(vp(4, 12), Error);
  EXPECT_THROW(vp(2, 0), Error);
  EXPECT_THROW(vp(2, 1, 0), Error);
}

TEST(Valuation, MultiplicativeOnRandomRationals) {
  std::mt19937_64 rng(10'000);
  const std::uint64_t primes[] = {2, 3, 5, 7, 11};
  for (int trial = 0; trial < 10'000; ++trial) {
    const std::uint64_t p = primes[rng() % 5];
    auto draw = [&] { return BigInt(static_cast<std::int64_t>(rng() % 100'000) + 1) * (rng() % 2 ? 1 : -1); };
    const BigInt a = draw(), b = draw(), c = draw(), e = draw();
    EXPECT_EQ(vp(p, a * c, b * e).value, vp(p, a, b).value + vp(p, c, e).value);
  }
}

TEST(DegreeBound, Examples) {
  EXPECT_EQ(degree_bound(6), BigInt(2));
  EXPECT_EQ(degree_bound(8), BigInt(14));
  EXPECT_EQ(degree_bound(3), BigInt(7));
  EXPECT_EQ(degree_bound(2), BigInt(2));
  EXPECT_EQ(degree_bound(62'748'517), big(oracle::power(13, 8)) - 2);  // 13^7
  EXPECT_THROW(degree_bound(1), OutOfRange);
}

TEST(DegreeBound, OrderTwoModFourNeverTrimagic) {
  for (std::uint64_t m = 2; m < 400; m += 4) EXPECT_EQ(degree_bound(m), BigInt(2)) << m;
}

TEST(DegreeBound, RespectsKnownSquares) {
  EXPECT_GE(degree_bound(8), BigInt(2));
  EXPECT_GE(degree_bound(9), BigInt(2));
  EXPECT_GE(degree_bound(16), BigInt(2));
  EXPECT_GE(degree_bound(25), BigInt(2));
  EXPECT_GE(degree_bound(125), BigInt(3));
  EXPECT_GE(degree_bound(2401), BigInt(4));
}

TEST(BinomialFeasible, Examples) {
  EXPECT_FALSE(binomial_feasible(6, 3));
  EXPECT_EQ(quantity_valuation(6, 3, 2), -1);
  EXPECT_TRUE(binomial_feasible(8, 2));
  EXPECT_FALSE(binomial_feasible(2, 3));
  EXPECT_TRUE(binomial_feasible(2, 4));  // n >= m^2: a zero factor
  EXPECT_THROW(binomial_feasible(1, 2), OutOfRange);
  EXPECT_THROW(binomial_feasible(4, 0), OutOfRange);
  for (std::uint64_t n = 1; n <= 6; ++n) EXPECT_TRUE(binomial_feasible(4, n)) << n;
  EXPECT_FALSE(binomial_feasible(4, 7));
}

TEST(BinomialFeasible, AgreesWithDirectBinomials) {
  for (std::uint64_t m = 2; m <= 50; ++m)
    for (std::uint64_t n = 1; n <= 10; ++n) {
      const bool direct = oracle::binomial(m * m, n + 1) % m == 0;
      EXPECT_EQ(binomial_feasible(m, n), direct) << "m=" << m << " n=" << n;
    }
}

TEST(BinomialFeasible, QuantityValuationMatchesDirectProduct) {
  for (std::uint64_t m : {4, 6, 9, 12, 18, 25})
    for (std::uint64_t n = 1; n <= 9; ++n) {
      oracle::Big num = m, den = 1;
      for (std::uint64_t a = 1; a <= n; ++a) num *= m * m - a;
      for (std::uint64_t k = 2; k <= n + 1; ++k) den *= k;
      for (std::uint64_t p : {2, 3, 5, 7})
        EXPECT_EQ(quantity_valuation(m, n, p), naive_vp(p, num) - naive_vp(p, den)) << m << "," << n << "," << p;
    }
}

TEST(BinomialFeasible, LargeOrderWithoutBigBinomial) {
  const std::uint64_t m = 62'748'517;  // 13^7
  EXPECT_TRUE(binomial_feasible(m, 7));
  EXPECT_TRUE(binomial_feasible(m, 20));
}

TEST(ShiftedSquareValuation, ShiftedSquareKeepsValuationExhaustively) {
  for (std::uint64_t p : {2, 3, 5})
    for (unsigned e = 1; e <= 2; ++e) {
      const std::uint64_t pe = e == 1 ? p : p * p;
      for (std::uint64_t m = 1; m <= 1000; ++m) {
        if (naive_vp(p, m) != e) continue;
        for (std::uint64_t a = 1; a <= pe; ++a)
          EXPECT_EQ(vp(p, BigInt(m * m - a)).value, vp(p, BigInt(a)).value) << p << "," << m << "," << a;
      }
    }
}

TEST(ShiftedSquareValuation, TelescopeReachesMinusOne) {
  for (std::uint64_t p : {2, 3})
    for (unsigned e = 1; e <= 2; ++e) {
      const std::uint64_t pe = e == 1 ? p : p * p;
      const std::uint64_t n = pe * p - 1;
      for (std::uint64_t m = pe; m <= 40 * pe; m += pe) {
        if (naive_vp(p, m) != e) continue;
        EXPECT_EQ(quantity_valuation(m, n, p), -1) << p << "," << e << "," << m;
        EXPECT_FALSE(binomial_feasible(m, n));
      }
    }
}

TEST(ConsistencySweep, NoCounterexamplesToHundred) {
  auto r = consistency_sweep(100);
  EXPECT_EQ(r.limit, 100u);
  EXPECT_EQ(r.max_n, 20u);
  EXPECT_GT(r.pairs_checked, 0u);
  EXPECT_TRUE(r.counterexamples.empty());
}

TEST(ConsistencySweep, FirstInfeasibleDegreeIsBoundPlusOneForPrimePowers) {
  for (std::uint64_t m : {2, 3, 4, 5, 7, 8, 9, 16}) {
    const auto bound = degree_bound(m).convert_to<std::uint64_t>();
    if (bound + 1 > 20) continue;
    EXPECT_FALSE(binomial_feasible(m, bound + 1)) << m;
  }
}
