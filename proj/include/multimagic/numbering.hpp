#pragma once

// Bijections N: R -> {0..q-1} of type c, i.e. N(a) + N(-a + c) = q - 1, and the
// q-adic composite numbering N_m(a_1..a_m) = 1 + sum_j q^(j-1) N_j(a_j).

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "multimagic/bigint.hpp"
#include "multimagic/errors.hpp"
#include "multimagic/matrix.hpp"
#include "multimagic/ring.hpp"

namespace multimagic {

/// True iff `forward` (indexed by element code) is a bijection onto {0..q-1} of type c.
inline bool verify_type(const FiniteRing& ring, std::span<const std::uint64_t> forward, Elem c) {
  const std::uint64_t q = ring.size();
  if (forward.size() != q || !ring.contains(c)) return false;
  std::vector<bool> seen(q, false);
  for (std::uint64_t v : forward) {
    if (v >= q || seen[v]) return false;
    seen[v] = true;
  }
  for (std::uint64_t a = 0; a < q; ++a) {
    const Elem partner = ring.add(ring.neg(Elem{a}), c);
    if (forward[a] + forward[partner.code] != q - 1) return false;
  }
  return true;
}

class TypeBijection {
 public:
  /// Orbit construction for the involution a -> -a + c.
  ///
  /// Elements are visited in canonical order; the i-th two-element orbit
  /// {a, -a+c} (i from 0) gets values i and q-1-i, and a fixed point (2a = c)
  /// gets (q-1)/2. Throws NoBijectionOfType when a fixed point exists and q is
  /// even, or when there is more than one fixed point.
  static TypeBijection build(const FiniteRing& ring, Elem c) {
    if (!ring.contains(c)) throw OutOfRange("type element outside ring");
    const std::uint64_t q = ring.size();
    std::vector<std::uint64_t> forward(q, UINT64_MAX);
    std::uint64_t next = 0;
    bool have_fixed = false;
    for (std::uint64_t a = 0; a < q; ++a) {
      if (forward[a] != UINT64_MAX) continue;
      const Elem b = ring.add(ring.neg(Elem{a}), c);
      if (b.code == a) {
        if (q % 2 == 0 || have_fixed)
          throw NoBijectionOfType("no bijection of type " + ring.format(c) + " over " + ring.descriptor() + ": " +
                                  ring.format(Elem{a}) + " is a fixed point of a -> -a+c");
        have_fixed = true;
        forward[a] = (q - 1) / 2;
      } else {
        forward[a] = next;
        forward[b.code] = q - 1 - next;
        ++next;
      }
    }
    return TypeBijection(ring, c, std::move(forward));
  }

  /// N(code) = code. Its type is the element with code q-1 (that is -1 in Z/qZ).
  static TypeBijection standard(const FiniteRing& ring) {
    std::vector<std::uint64_t> forward(ring.size());
    for (std::uint64_t a = 0; a < ring.size(); ++a) forward[a] = a;
    return from_table(ring, Elem{ring.size() - 1}, std::move(forward));
  }

  /// Wraps an explicit table; throws unless it is a bijection of type c.
  static TypeBijection from_table(const FiniteRing& ring, Elem c, std::vector<std::uint64_t> forward) {
    if (!verify_type(ring, forward, c))
      throw Error("table is not a bijection of type " + ring.format(c) + " over " + ring.descriptor());
    return TypeBijection(ring, c, std::move(forward));
  }

  const FiniteRing& ring() const { return tables_->ring; }
  Elem type() const { return tables_->c; }
  std::uint64_t operator()(Elem a) const { return tables_->forward[a.code]; }
  Elem inverse(std::uint64_t v) const { return tables_->inverse.at(v); }
  std::span<const std::uint64_t> forward() const { return tables_->forward; }

  friend bool operator==(const TypeBijection& a, const TypeBijection& b) {
    return a.ring() == b.ring() && a.type() == b.type() && a.tables_->forward == b.tables_->forward;
  }

 private:
  struct Tables {
    FiniteRing ring;
    Elem c;
    std::vector<std::uint64_t> forward;
    std::vector<Elem> inverse;
  };

  TypeBijection(const FiniteRing& ring, Elem c, std::vector<std::uint64_t> forward) {
    std::vector<Elem> inverse(forward.size());
    for (std::uint64_t a = 0; a < forward.size(); ++a) inverse[forward[a]] = Elem{a};
    tables_ = std::make_shared<const Tables>(Tables{ring, c, std::move(forward), std::move(inverse)});
  }

  std::shared_ptr<const Tables> tables_;
};

/// N_m: R^m -> {1..q^m}, coordinate j weighted by q^(j-1).
class CompositeNumbering {
 public:
  explicit CompositeNumbering(std::vector<TypeBijection> coords) : coords_(std::move(coords)) {
    if (coords_.empty()) throw ArityMismatch("composite numbering needs at least one coordinate");
    for (const auto& b : coords_)
      if (!(b.ring() == coords_.front().ring())) throw RingMismatch();
    q_ = coords_.front().ring().size();
    size_ = detail::checked_pow(q_, static_cast<unsigned>(coords_.size()));
  }

  static CompositeNumbering uniform(const TypeBijection& n, std::size_t arity) {
    return CompositeNumbering(std::vector<TypeBijection>(arity, n));
  }

  std::size_t arity() const { return coords_.size(); }
  /// q^m
  std::uint64_t size() const { return size_; }
  const FiniteRing& ring() const { return coords_.front().ring(); }
  const TypeBijection& coordinate(std::size_t j) const { return coords_.at(j); }
  const std::vector<TypeBijection>& coordinates() const { return coords_; }

  std::vector<Elem> types() const {
    std::vector<Elem> c;
    c.reserve(coords_.size());
    for (const auto& b : coords_) c.push_back(b.type());
    return c;
  }

  std::uint64_t number(std::span<const Elem> a) const {
    if (a.size() != coords_.size())
      throw ArityMismatch("expected " + std::to_string(coords_.size()) + " coordinates, got " + std::to_string(a.size()));
    std::uint64_t v = 0;
    for (std::size_t j = coords_.size(); j-- > 0;) v = v * q_ + coords_[j](a[j]);
    return v + 1;
  }

  std::vector<Elem> unnumber(std::uint64_t v) const {
    std::vector<Elem> out(coords_.size());
    unnumber_into(v, out);
    return out;
  }

  void unnumber_into(std::uint64_t v, std::span<Elem> out) const {
    if (v < 1 || v > size_) throw OutOfRange("numbering value " + std::to_string(v) + " outside [1, " + std::to_string(size_) + "]");
    if (out.size() != coords_.size()) throw ArityMismatch("output arity mismatch");
    --v;
    for (std::size_t j = 0; j < coords_.size(); ++j, v /= q_) out[j] = coords_[j].inverse(v % q_);
  }

  friend bool operator==(const CompositeNumbering& a, const CompositeNumbering& b) { return a.coords_ == b.coords_; }

 private:
  std::vector<TypeBijection> coords_;
  std::uint64_t q_ = 0;
  std::uint64_t size_ = 0;
};

/// Checks N_m(-a) = q^m + 1 - N_m(a + c) for all a (exhaustive up to `exhaustive_limit`
/// vectors, otherwise `samples` seeded random vectors).
inline bool reflection_identity_check(const CompositeNumbering& nm, std::uint64_t exhaustive_limit = 1'000'000,
                                      std::uint64_t samples = 100'000, std::uint64_t seed = 1) {
  const FiniteRing& ring = nm.ring();
  const auto c = nm.types();
  const std::size_t m = nm.arity();
  std::vector<Elem> a(m), neg_a(m), shifted(m);
  auto holds = [&] {
    for (std::size_t j = 0; j < m; ++j) {
      neg_a[j] = ring.neg(a[j]);
      shifted[j] = ring.add(a[j], c[j]);
    }
    return nm.number(neg_a) == nm.size() + 1 - nm.number(shifted);
  };
  if (nm.size() <= exhaustive_limit) {
    for (std::uint64_t v = 1; v <= nm.size(); ++v) {
      nm.unnumber_into(v, a);
      if (!holds()) return false;
    }
    return true;
  }
  std::mt19937_64 rng(seed);
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (auto& x : a) x = Elem{rng() % ring.size()};
    if (!holds()) return false;
  }
  return true;
}

/// L(a) = linear * a + offset, R^n -> R^s.
struct AffineMap {
  RingMatrix linear;
  std::vector<Elem> offset;

  std::size_t inputs() const { return linear.cols(); }
  std::size_t outputs() const { return linear.rows(); }

  std::vector<Elem> apply(const FiniteRing& ring, std::span<const Elem> a) const {
    auto y = multiply(ring, linear, a);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = ring.add(y[i], offset.at(i));
    return y;
  }
};

namespace detail {

// Advances a over R^n in odometer order; returns false after the last vector.
inline bool next_vector(const FiniteRing& ring, std::span<Elem> a) {
  for (auto& x : a) {
    if (++x.code < ring.size()) return true;
    x.code = 0;
  }
  return false;
}

}  // namespace detail

/// Image enumeration; only sensible for small q^n.
inline bool is_surjective(const FiniteRing& ring, const AffineMap& L) {
  const std::uint64_t target = detail::checked_pow(ring.size(), static_cast<unsigned>(L.outputs()));
  std::vector<bool> hit(target, false);
  std::uint64_t count = 0;
  std::vector<Elem> a(L.inputs());
  do {
    auto y = L.apply(ring, a);
    std::uint64_t key = 0;
    for (std::size_t i = y.size(); i-- > 0;) key = key * ring.size() + y[i].code;
    if (!hit[key]) {
      hit[key] = true;
      ++count;
    }
  } while (detail::next_vector(ring, a));
  return count == target;
}

/// Brute-force sum over a in R^n of prod_j N_j(L(a)_j)^(e_j).
inline BigInt census_oracle(const FiniteRing& ring, const AffineMap& L, std::span<const TypeBijection> bijections,
                            std::span<const unsigned> exponents) {
  if (bijections.size() != L.outputs() || exponents.size() != L.outputs())
    throw ArityMismatch("census needs one bijection and one exponent per output coordinate");
  BigInt total = 0;
  std::vector<Elem> a(L.inputs());
  do {
    auto y = L.apply(ring, a);
    BigInt term = 1;
    for (std::size_t j = 0; j < y.size(); ++j) term *= big_pow(BigInt(bijections[j](y[j])), exponents[j]);
    total += term;
  } while (detail::next_vector(ring, a));
  return total;
}

}  // namespace multimagic
