#pragma once

// Exact arithmetic in the two finite ring families used by the constructions:
// Z/qZ for any q > 1 and GF(p^k) = F_p[x]/(f) for a monic irreducible f.
//
// Elements are strong-typed canonical codes. For Z/qZ the code is the residue
// in [0, q). For GF(p^k) the code is sum_i c_i p^i where c_i is the
// coefficient of x^i, so codes of both kinds live in [0, q) and the canonical
// element order is ascending code.

#include <algorithm>
#include <charconv>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "multimagic/errors.hpp"

namespace multimagic {

/// Canonical code of a ring element.
struct Elem {
  std::uint64_t code = 0;

  friend constexpr bool operator==(Elem, Elem) = default;
  friend constexpr auto operator<=>(Elem, Elem) = default;
};

namespace detail {

constexpr std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

constexpr std::uint64_t addmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return a >= m - b ? a - (m - b) : a + b;
}

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL}) {
    if (n % d == 0) return n == d;
  }
  // Deterministic Miller-Rabin for 64-bit inputs.
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  auto powmod = [n](std::uint64_t b, std::uint64_t e) {
    std::uint64_t r = 1;
    b %= n;
    while (e) {
      if (e & 1) r = mulmod(r, b, n);
      b = mulmod(b, b, n);
      e >>= 1;
    }
    return r;
  };
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = powmod(a, d);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

/// Checked integer power; throws OutOfRange on 64-bit overflow.
inline std::uint64_t checked_pow(std::uint64_t base, unsigned exp) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < exp; ++i) {
    if (base != 0 && r > UINT64_MAX / base) throw OutOfRange("integer power exceeds 64 bits");
    r *= base;
  }
  return r;
}

// Dense polynomials over F_p, coefficients low -> high, no trailing zeros.
using Poly = std::vector<std::uint64_t>;

inline void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline std::uint64_t inv_mod_prime(std::uint64_t a, std::uint64_t p) {
  // a^(p-2) mod p
  std::uint64_t r = 1, e = p - 2;
  a %= p;
  while (e) {
    if (e & 1) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
    e >>= 1;
  }
  return r;
}

inline Poly poly_sub_scaled(Poly a, const Poly& b, std::uint64_t c, std::size_t shift, std::uint64_t p) {
  if (a.size() < b.size() + shift) a.resize(b.size() + shift, 0);
  for (std::size_t i = 0; i < b.size(); ++i) {
    std::uint64_t t = mulmod(b[i], c, p);
    a[i + shift] = (a[i + shift] + p - t) % p;
  }
  trim(a);
  return a;
}

/// Quotient and remainder of a / b, b non-zero.
inline std::pair<Poly, Poly> poly_divmod(Poly a, const Poly& b, std::uint64_t p) {
  trim(a);
  Poly q;
  if (a.size() < b.size()) return {q, a};
  q.assign(a.size() - b.size() + 1, 0);
  const std::uint64_t lead_inv = inv_mod_prime(b.back(), p);
  while (!a.empty() && a.size() >= b.size()) {
    std::size_t shift = a.size() - b.size();
    std::uint64_t c = mulmod(a.back(), lead_inv, p);
    q[shift] = c;
    a = poly_sub_scaled(std::move(a), b, c, shift, p);
  }
  trim(q);
  return {q, a};
}

inline Poly poly_mul(const Poly& a, const Poly& b, std::uint64_t p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + mulmod(a[i], b[j], p)) % p;
  trim(r);
  return r;
}

}  // namespace detail

/// Descriptor and arithmetic of a finite commutative ring with identity.
///
/// Immutable after construction; copies share their lookup tables.
class FiniteRing {
 public:
  enum class Kind { modular, extension };

  static FiniteRing modular(std::uint64_t q) {
    if (q < 2) throw Error("Z/qZ requires q >= 2");
    FiniteRing r;
    r.kind_ = Kind::modular;
    r.q_ = q;
    r.p_ = q;
    r.k_ = 1;
    return r;
  }

  /// F_p presented as an extension of degree one (descriptor `gf:p`).
  static FiniteRing prime_field(std::uint64_t p) { return extension(p, {0, 1}); }

  /// F_p[x]/(f); `modulus` holds f's coefficients low -> high and must be monic and irreducible.
  static FiniteRing extension(std::uint64_t p, std::vector<std::uint64_t> modulus) {
    if (!detail::is_prime(p)) throw Error("GF(p^k) requires a prime characteristic, got " + std::to_string(p));
    for (auto& c : modulus) c %= p;
    detail::trim(modulus);
    if (modulus.size() < 2) throw Error("modulus must have degree >= 1");
    if (modulus.back() != 1) throw Error("modulus must be monic");
    FiniteRing r;
    r.kind_ = Kind::extension;
    r.p_ = p;
    r.k_ = static_cast<unsigned>(modulus.size() - 1);
    r.q_ = detail::checked_pow(p, r.k_);
    r.modulus_ = std::move(modulus);
    if (!is_irreducible(p, r.modulus_)) throw Error("modulus " + r.format_poly(r.modulus_) + " is reducible over F_" + std::to_string(p));
    if (r.k_ > 1 && r.q_ <= kTableLimit) r.build_tables();
    return r;
  }

  /// GF(p^k) with the first monic irreducible modulus in canonical order.
  static FiniteRing extension(std::uint64_t p, unsigned k) {
    if (!detail::is_prime(p)) throw Error("GF(p^k) requires a prime characteristic");
    if (k == 1) return prime_field(p);
    const std::uint64_t count = detail::checked_pow(p, k);
    for (std::uint64_t code = 0; code < count; ++code) {
      detail::Poly f(k + 1, 0);
      std::uint64_t c = code;
      for (unsigned i = 0; i < k; ++i, c /= p) f[i] = c % p;
      f[k] = 1;
      if (is_irreducible(p, f)) return extension(p, f);
    }
    throw Error("no irreducible polynomial found");
  }

  /// Parses `zmod:10`, `gf:5`, `gf:2^2` or `gf:2^2:x^2+x+1`.
  static FiniteRing parse(std::string_view text);

  std::string descriptor() const {
    if (kind_ == Kind::modular) return "zmod:" + std::to_string(q_);
    if (k_ == 1) return "gf:" + std::to_string(p_);
    return "gf:" + std::to_string(p_) + "^" + std::to_string(k_) + ":" + format_poly(modulus_);
  }

  Kind kind() const { return kind_; }
  std::uint64_t size() const { return q_; }
  std::uint64_t characteristic() const { return p_; }
  unsigned degree() const { return k_; }
  const std::vector<std::uint64_t>& modulus() const { return modulus_; }
  bool is_field() const { return kind_ == Kind::extension || detail::is_prime(q_); }

  bool contains(Elem x) const { return x.code < q_; }
  Elem zero() const { return {0}; }
  Elem one() const { return {1}; }

  /// Image of an integer under Z -> R.
  Elem from_int(std::int64_t v) const {
    const std::uint64_t m = kind_ == Kind::modular ? q_ : p_;
    const auto r = static_cast<std::int64_t>(static_cast<__int128>(v) % static_cast<__int128>(m));
    return {static_cast<std::uint64_t>(r < 0 ? r + static_cast<std::int64_t>(m) : r)};
  }

  Elem add(Elem x, Elem y) const {
    if (simple()) return {detail::addmod(x.code, y.code, q_)};
    if (add_table_) return {(*add_table_)[x.code * q_ + y.code]};
    std::uint64_t r = 0, w = 1;
    for (unsigned i = 0; i < k_; ++i, w *= p_) {
      r += w * ((x.code / w % p_ + y.code / w % p_) % p_);
    }
    return {r};
  }

  Elem neg(Elem x) const {
    if (simple()) return {x.code == 0 ? 0 : q_ - x.code};
    std::uint64_t r = 0, w = 1;
    for (unsigned i = 0; i < k_; ++i, w *= p_) r += w * ((p_ - x.code / w % p_) % p_);
    return {r};
  }

  Elem sub(Elem x, Elem y) const { return add(x, neg(y)); }

  Elem mul(Elem x, Elem y) const {
    if (simple()) return {detail::mulmod(x.code, y.code, q_)};
    if (mul_table_) return {(*mul_table_)[x.code * q_ + y.code]};
    return from_poly(poly_mulmod(to_poly(x), to_poly(y)));
  }

  Elem pow(Elem x, std::uint64_t e) const {
    Elem r = one();
    while (e) {
      if (e & 1) r = mul(r, x);
      x = mul(x, x);
      e >>= 1;
    }
    return r;
  }

  /// Multiplicative inverse, or nullopt when x is not a unit.
  std::optional<Elem> try_inverse(Elem x) const {
    if (simple()) {
      // extended Euclid on (x, q)
      __int128 a = static_cast<__int128>(x.code), b = static_cast<__int128>(q_);
      __int128 s0 = 1, s1 = 0;
      while (b != 0) {
        __int128 t = a / b;
        a -= t * b;
        std::swap(a, b);
        s0 -= t * s1;
        std::swap(s0, s1);
      }
      if (a != 1) return std::nullopt;
      s0 %= static_cast<__int128>(q_);
      if (s0 < 0) s0 += q_;
      return Elem{static_cast<std::uint64_t>(s0)};
    }
    if (x.code == 0) return std::nullopt;
    // extended Euclid on (x, f) over F_p
    detail::Poly r0 = modulus_, r1 = to_poly(x);
    detail::Poly s0, s1{1};
    while (!r1.empty()) {
      auto [quot, rem] = detail::poly_divmod(r0, r1, p_);
      detail::Poly next = s0;
      detail::Poly prod = detail::poly_mul(quot, s1, p_);
      next.resize(std::max(next.size(), prod.size()), 0);
      for (std::size_t i = 0; i < prod.size(); ++i) next[i] = (next[i] + p_ - prod[i]) % p_;
      detail::trim(next);
      r0 = std::move(r1);
      r1 = std::move(rem);
      s0 = std::move(s1);
      s1 = std::move(next);
    }
    // r0 is a non-zero constant since f is irreducible
    const std::uint64_t c = detail::inv_mod_prime(r0[0], p_);
    for (auto& v : s0) v = detail::mulmod(v, c, p_);
    return from_poly(s0);
  }

  bool is_unit(Elem x) const { return try_inverse(x).has_value(); }

  /// All q elements in ascending code order.
  std::vector<Elem> elements() const {
    std::vector<Elem> out(q_);
    for (std::uint64_t i = 0; i < q_; ++i) out[i].code = i;
    return out;
  }

  /// Human-readable element: decimal residue, or a polynomial in x.
  std::string format(Elem x) const {
    if (kind_ == Kind::modular || k_ == 1) return std::to_string(x.code);
    return format_poly(to_poly(x));
  }

  /// Parses an element written as `format` prints it (also accepts a bare code for modular rings).
  Elem parse_element(std::string_view text) const;

  friend bool operator==(const FiniteRing& a, const FiniteRing& b) {
    return a.kind_ == b.kind_ && a.q_ == b.q_ && a.modulus_ == b.modulus_;
  }

  detail::Poly to_poly(Elem x) const {
    detail::Poly r(k_, 0);
    std::uint64_t c = x.code;
    for (unsigned i = 0; i < k_; ++i, c /= p_) r[i] = c % p_;
    detail::trim(r);
    return r;
  }

  Elem from_poly(const detail::Poly& a) const {
    std::uint64_t r = 0, w = 1;
    for (unsigned i = 0; i < k_ && i < a.size(); ++i, w *= p_) r += w * (a[i] % p_);
    return {r};
  }

  /// Z/qZ or a prime field: element codes are plain residues.
  bool simple() const { return kind_ == Kind::modular || k_ == 1; }

 private:
  static constexpr std::uint64_t kTableLimit = 256;

  FiniteRing() = default;

  detail::Poly poly_mulmod(const detail::Poly& a, const detail::Poly& b) const {
    return detail::poly_divmod(detail::poly_mul(a, b, p_), modulus_, p_).second;
  }

  void build_tables() {
    auto add = std::make_shared<std::vector<std::uint32_t>>(q_ * q_);
    auto mul = std::make_shared<std::vector<std::uint32_t>>(q_ * q_);
    for (std::uint64_t x = 0; x < q_; ++x) {
      for (std::uint64_t y = 0; y < q_; ++y) {
        std::uint64_t s = 0, w = 1;
        for (unsigned i = 0; i < k_; ++i, w *= p_) s += w * ((x / w % p_ + y / w % p_) % p_);
        (*add)[x * q_ + y] = static_cast<std::uint32_t>(s);
        (*mul)[x * q_ + y] = static_cast<std::uint32_t>(from_poly(poly_mulmod(to_poly({x}), to_poly({y}))).code);
      }
    }
    add_table_ = std::move(add);
    mul_table_ = std::move(mul);
  }

  // No monic factor of degree 1..k/2; trial division is fine for the small degrees in use.
  static bool is_irreducible(std::uint64_t p, const detail::Poly& f) {
    const unsigned k = static_cast<unsigned>(f.size() - 1);
    for (unsigned deg = 1; deg <= k / 2; ++deg) {
      const std::uint64_t count = detail::checked_pow(p, deg);
      for (std::uint64_t code = 0; code < count; ++code) {
        detail::Poly g(deg + 1, 0);
        std::uint64_t c = code;
        for (unsigned i = 0; i < deg; ++i, c /= p) g[i] = c % p;
        g[deg] = 1;
        if (detail::poly_divmod(f, g, p).second.empty()) return false;
      }
    }
    return true;
  }

  std::string format_poly(const detail::Poly& a) const {
    if (a.empty()) return "0";
    std::string out;
    for (std::size_t i = a.size(); i-- > 0;) {
      if (a[i] == 0) continue;
      if (!out.empty()) out += "+";
      if (i == 0 || a[i] != 1) out += std::to_string(a[i]);
      if (i >= 1) out += "x";
      if (i >= 2) out += "^" + std::to_string(i);
    }
    return out;
  }

  Kind kind_ = Kind::modular;
  std::uint64_t q_ = 2;
  std::uint64_t p_ = 2;
  unsigned k_ = 1;
  std::vector<std::uint64_t> modulus_;
  std::shared_ptr<const std::vector<std::uint32_t>> add_table_;
  std::shared_ptr<const std::vector<std::uint32_t>> mul_table_;
};

namespace detail {

inline std::uint64_t parse_uint(std::string_view s, std::string_view what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ParseError("invalid " + std::string(what) + ": '" + std::string(s) + "'");
  return v;
}

/// Parses a polynomial such as `x^2+x+1`, `2x^3+4` or `x^2-1` into coefficients mod p.
inline Poly parse_poly(std::string_view text, std::uint64_t p) {
  std::string s;
  for (char ch : text)
    if (ch != ' ' && ch != '*') s += ch;
  if (s.empty()) throw ParseError("empty polynomial");
  Poly out;
  std::size_t i = 0;
  while (i < s.size()) {
    bool negative = false;
    if (s[i] == '+' || s[i] == '-') {
      negative = s[i] == '-';
      ++i;
    }
    std::size_t j = i;
    while (j < s.size() && s[j] != '+' && s[j] != '-') ++j;
    std::string_view term(s.data() + i, j - i);
    if (term.empty()) throw ParseError("malformed polynomial '" + std::string(text) + "'");
    std::uint64_t coef = 1, exp = 0;
    auto xpos = term.find('x');
    if (xpos == std::string_view::npos) {
      coef = parse_uint(term, "coefficient");
    } else {
      if (xpos > 0) coef = parse_uint(term.substr(0, xpos), "coefficient");
      auto rest = term.substr(xpos + 1);
      if (rest.empty()) {
        exp = 1;
      } else if (rest[0] == '^') {
        exp = parse_uint(rest.substr(1), "exponent");
      } else {
        throw ParseError("malformed term '" + std::string(term) + "'");
      }
    }
    if (exp > 64) throw ParseError("polynomial degree too large");
    if (out.size() <= exp) out.resize(exp + 1, 0);
    coef %= p;
    if (negative) coef = (p - coef) % p;
    out[exp] = (out[exp] + coef) % p;
    i = j;
  }
  trim(out);
  return out;
}

}  // namespace detail

inline FiniteRing FiniteRing::parse(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ParseError("ring descriptor needs a kind prefix: '" + std::string(text) + "'");
  auto kind = text.substr(0, colon);
  auto rest = text.substr(colon + 1);
  if (kind == "zmod") return modular(detail::parse_uint(rest, "modulus"));
  if (kind != "gf") throw ParseError("unknown ring kind '" + std::string(kind) + "'");
  auto colon2 = rest.find(':');
  auto size_part = rest.substr(0, colon2);
  auto caret = size_part.find('^');
  std::uint64_t p = detail::parse_uint(size_part.substr(0, caret), "characteristic");
  unsigned k = 1;
  if (caret != std::string_view::npos) k = static_cast<unsigned>(detail::parse_uint(size_part.substr(caret + 1), "degree"));
  if (!detail::is_prime(p)) throw ParseError("gf characteristic must be prime: " + std::to_string(p));
  if (colon2 == std::string_view::npos) return k == 1 ? prime_field(p) : extension(p, k);
  auto f = detail::parse_poly(rest.substr(colon2 + 1), p);
  if (f.size() != k + 1) throw ParseError("modulus degree does not match ^" + std::to_string(k));
  return extension(p, f);
}

inline Elem FiniteRing::parse_element(std::string_view text) const {
  if (simple()) {
    bool negative = !text.empty() && text[0] == '-';
    auto v = detail::parse_uint(negative ? text.substr(1) : text, "element");
    Elem e{v % q_};
    return negative ? neg(e) : e;
  }
  auto poly = detail::parse_poly(text, p_);
  if (poly.size() > k_) poly = detail::poly_divmod(poly, modulus_, p_).second;
  return from_poly(poly);
}

/// An element bound to its ring; arithmetic across different rings throws RingMismatch.
///
/// The ring must outlive the element.
class RingElement {
 public:
  RingElement(const FiniteRing& ring, Elem value) : ring_(&ring), value_(value) {
    if (!ring.contains(value)) throw OutOfRange("element code " + std::to_string(value.code) + " outside ring");
  }

  const FiniteRing& ring() const { return *ring_; }
  Elem value() const { return value_; }
  std::uint64_t code() const { return value_.code; }

  friend RingElement operator+(const RingElement& a, const RingElement& b) {
    return {a.same(b), a.ring_->add(a.value_, b.value_)};
  }
  friend RingElement operator-(const RingElement& a, const RingElement& b) {
    return {a.same(b), a.ring_->sub(a.value_, b.value_)};
  }
  friend RingElement operator*(const RingElement& a, const RingElement& b) {
    return {a.same(b), a.ring_->mul(a.value_, b.value_)};
  }
  RingElement operator-() const { return {*ring_, ring_->neg(value_)}; }

  std::optional<RingElement> try_inverse() const {
    auto inv = ring_->try_inverse(value_);
    if (!inv) return std::nullopt;
    return RingElement(*ring_, *inv);
  }

  friend bool operator==(const RingElement& a, const RingElement& b) {
    return (a.ring_ == b.ring_ || *a.ring_ == *b.ring_) && a.value_ == b.value_;
  }

  std::string str() const { return ring_->format(value_); }

 private:
  const FiniteRing& same(const RingElement& other) const {
    if (ring_ != other.ring_ && !(*ring_ == *other.ring_)) throw RingMismatch();
    return *ring_;
  }

  const FiniteRing* ring_;
  Elem value_;
};

}  // namespace multimagic
