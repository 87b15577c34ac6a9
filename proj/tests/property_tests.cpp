// Exhaustive and randomized algebraic laws behind the construction. Every
// assertion is an exact equality; random draws use pinned seeds.

#include <gtest/gtest.h>

#include <map>
#include <random>

#include "multimagic/numbering.hpp"
#include "multimagic/ring.hpp"
#include "oracles.hpp"

using namespace multimagic;

namespace {

std::vector<FiniteRing> small_rings() {
  std::vector<FiniteRing> out;
  for (std::uint64_t q = 2; q <= 16; ++q) out.push_back(FiniteRing::modular(q));
  for (const char* d : {"gf:2^2", "gf:2^3", "gf:3^2", "gf:2^4"}) out.push_back(FiniteRing::parse(d));
  return out;
}

std::vector<Elem> elements(const FiniteRing& r) {
  std::vector<Elem> out;
  for (auto e : r.elements()) out.push_back(e);
  return out;
}

// Enumerates R^n in lexicographic code order.
template <typename F>
void for_each_vector(const FiniteRing& r, std::size_t n, F&& f) {
  std::vector<Elem> a(n, Elem{0});
  while (true) {
    f(a);
    std::size_t i = 0;
    for (; i < n; ++i) {
      if (++a[i].code < r.size()) break;
      a[i].code = 0;
    }
    if (i == n) return;
  }
}

AffineMap random_affine(const FiniteRing& r, std::size_t s, std::size_t n, std::mt19937_64& rng) {
  AffineMap L{RingMatrix(s, n), std::vector<Elem>(s)};
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j < n; ++j) L.linear(i, j) = Elem{rng() % r.size()};
    L.offset[i] = Elem{rng() % r.size()};
  }
  return L;
}

// Fiber sizes of L by brute force, keyed by the image vector's codes.
std::map<std::vector<std::uint64_t>, std::uint64_t> fibers(const FiniteRing& r, const AffineMap& L) {
  std::map<std::vector<std::uint64_t>, std::uint64_t> count;
  for_each_vector(r, L.inputs(), [&](const std::vector<Elem>& a) {
    std::vector<std::uint64_t> key;
    for (auto e : L.apply(r, a)) key.push_back(e.code);
    ++count[key];
  });
  return count;
}

std::uint64_t ipow(std::uint64_t b, std::size_t e) {
  std::uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

}  // namespace

TEST(RingAxioms, ExhaustiveTriples) {
  for (const auto& r : small_rings()) {
    const auto el = elements(r);
    ASSERT_EQ(el.size(), r.size());
    for (auto a : el) {
      EXPECT_EQ(r.add(a, r.zero()), a);
      EXPECT_EQ(r.mul(a, r.one()), a);
      EXPECT_EQ(r.add(a, r.neg(a)), r.zero());
      EXPECT_EQ(r.sub(a, a), r.zero());
      for (auto b : el) {
        EXPECT_EQ(r.add(a, b), r.add(b, a));
        EXPECT_EQ(r.mul(a, b), r.mul(b, a));
        for (auto c : el) {
          ASSERT_EQ(r.add(r.add(a, b), c), r.add(a, r.add(b, c))) << r.descriptor();
          ASSERT_EQ(r.mul(r.mul(a, b), c), r.mul(a, r.mul(b, c))) << r.descriptor();
          ASSERT_EQ(r.mul(a, r.add(b, c)), r.add(r.mul(a, b), r.mul(a, c))) << r.descriptor();
        }
      }
    }
  }
}

TEST(RingAxioms, InverseExistsIffSomeProductIsOne) {
  for (const auto& r : small_rings()) {
    const auto el = elements(r);
    for (auto x : el) {
      std::optional<Elem> found;
      for (auto y : el)
        if (r.mul(x, y) == r.one()) found = y;
      auto inv = r.try_inverse(x);
      EXPECT_EQ(inv.has_value(), found.has_value()) << r.descriptor() << " " << x.code;
      if (inv) {
        EXPECT_EQ(r.mul(x, *inv), r.one());
      }
      EXPECT_EQ(r.is_unit(x), found.has_value());
    }
  }
}

TEST(RingAxioms, FieldsInvertAllNonzero) {
  for (const auto& r : small_rings()) {
    if (!r.is_field()) continue;
    for (auto x : elements(r))
      if (x != r.zero()) {
        EXPECT_TRUE(r.try_inverse(x).has_value()) << r.descriptor();
      }
  }
}

TEST(TypeBijectionLaw, EveryTypeOverSmallRings) {
  for (const auto& r : small_rings()) {
    const std::uint64_t q = r.size();
    for (auto c : elements(r)) {
      bool fixed_point = false;
      for (auto a : elements(r))
        if (r.add(r.neg(a), c) == a) fixed_point = true;
      if (fixed_point && q % 2 == 0) {
        EXPECT_THROW(TypeBijection::build(r, c), NoBijectionOfType) << r.descriptor() << " c=" << c.code;
        continue;
      }
      auto n = TypeBijection::build(r, c);
      std::vector<bool> hit(q, false);
      for (auto a : elements(r)) {
        const auto v = n(a);
        ASSERT_LT(v, q);
        EXPECT_FALSE(hit[v]);
        hit[v] = true;
        EXPECT_EQ(v + n(r.add(r.neg(a), c)), q - 1) << r.descriptor() << " c=" << c.code << " a=" << a.code;
        EXPECT_EQ(n.inverse(v), a);
      }
    }
  }
}

TEST(TypeBijectionLaw, LargerModuliSampled) {
  std::mt19937_64 rng(77);
  for (std::uint64_t q : {17, 97, 256, 1000, 1024, 4096, 9973, 10000}) {
    auto r = FiniteRing::modular(q);
    for (int k = 0; k < 3; ++k) {
      const Elem c{rng() % q};
      try {
        auto n = TypeBijection::build(r, c);
        std::vector<bool> hit(q, false);
        for (std::uint64_t a = 0; a < q; ++a) {
          const auto v = n(Elem{a});
          ASSERT_FALSE(hit[v]);
          hit[v] = true;
          ASSERT_EQ(v + n(r.add(r.neg(Elem{a}), c)), q - 1);
        }
      } catch (const NoBijectionOfType&) {
        EXPECT_EQ(q % 2, 0u);
        EXPECT_EQ(c.code % 2, 0u);  // 2a = c solvable in Z/q for even q iff c is even
      }
    }
  }
}

TEST(ReflectionIdentity, ExhaustiveOverMixedTypes) {
  std::mt19937_64 rng(8);
  for (const char* d : {"gf:3", "gf:5", "gf:2^2", "gf:7", "zmod:9", "gf:3^2"}) {
    auto r = FiniteRing::parse(d);
    const auto el = elements(r);
    for (std::size_t arity = 1; arity <= 3; ++arity) {
      std::vector<TypeBijection> coords;
      while (coords.size() < arity) {
        try {
          coords.push_back(TypeBijection::build(r, el[rng() % el.size()]));
        } catch (const NoBijectionOfType&) {
        }
      }
      CompositeNumbering nm(coords);
      const std::uint64_t total = nm.size();
      ASSERT_EQ(total, ipow(r.size(), arity));
      bool holds = true;
      for_each_vector(r, arity, [&](const std::vector<Elem>& a) {
        std::vector<Elem> mirror(arity);
        for (std::size_t j = 0; j < arity; ++j) mirror[j] = r.add(r.neg(a[j]), coords[j].type());
        if (nm.number(a) + nm.number(mirror) != total + 1) holds = false;
        if (nm.unnumber(nm.number(a)) != a) holds = false;
      });
      EXPECT_TRUE(holds) << d << " arity " << arity;
      EXPECT_EQ(reflection_identity_check(nm), holds);
    }
  }
}

TEST(ReflectionIdentity, NumberUnnumberInverseOnFullRange) {
  auto r = FiniteRing::modular(7);
  auto nm = CompositeNumbering::uniform(TypeBijection::build(r, Elem{3}), 7);  // 7^7 = 823543
  for (std::uint64_t v = 1; v <= nm.size(); ++v) ASSERT_EQ(nm.number(nm.unnumber(v)), v);
}

TEST(FiberCensus, SurjectiveMapsHaveEqualFibers) {
  std::mt19937_64 rng(13);
  int surjective_seen = 0;
  for (const char* d : {"gf:2", "gf:3", "zmod:4", "gf:5", "zmod:6", "gf:2^2", "gf:7", "zmod:9"}) {
    auto r = FiniteRing::parse(d);
    for (std::size_t n = 1; n <= 4 && ipow(r.size(), n) <= 100'000; ++n)
      for (std::size_t s = 1; s <= n; ++s)
        for (int trial = 0; trial < 6; ++trial) {
          auto L = random_affine(r, s, n, rng);
          auto f = fibers(r, L);
          const bool onto = f.size() == ipow(r.size(), s);
          EXPECT_EQ(is_surjective(r, L), onto) << d;
          if (!onto) continue;
          ++surjective_seen;
          for (const auto& [y, count] : f) EXPECT_EQ(count, ipow(r.size(), n - s)) << d << " n=" << n << " s=" << s;
        }
  }
  EXPECT_GT(surjective_seen, 50);
}

TEST(SumIdentity, CensusMatchesClosedForm) {
  std::mt19937_64 rng(14);
  int checked = 0;
  for (std::uint64_t q : {3, 5}) {
    auto r = FiniteRing::modular(q);
    std::vector<TypeBijection> pool;
    for (std::uint64_t c = 0; c < q; ++c) pool.push_back(TypeBijection::build(r, Elem{c}));
    for (std::size_t n = 1; n <= 3; ++n)
      for (std::size_t s = 1; s <= n; ++s) {
        // every exponent tuple with sum <= 4
        std::vector<unsigned> e(s, 0);
        while (true) {
          unsigned sum = 0;
          for (auto x : e) sum += x;
          if (sum <= 4) {
            AffineMap L = random_affine(r, s, n, rng);
            while (!is_surjective(r, L)) L = random_affine(r, s, n, rng);
            std::vector<TypeBijection> b;
            for (std::size_t j = 0; j < s; ++j) b.push_back(pool[rng() % pool.size()]);
            oracle::Big closed = oracle::power(q, static_cast<unsigned>(n - s));
            for (auto x : e) closed *= oracle::power_sum(q - 1, x) + (x == 0 ? 1 : 0);  // sum_{i=0}^{q-1} i^x
            EXPECT_EQ(census_oracle(r, L, b, e), BigInt(closed.str())) << "q=" << q << " n=" << n << " s=" << s;
            ++checked;
          }
          std::size_t i = 0;
          for (; i < s; ++i) {
            if (++e[i] <= 4) break;
            e[i] = 0;
          }
          if (i == s) break;
        }
      }
  }
  EXPECT_GT(checked, 100);
}
