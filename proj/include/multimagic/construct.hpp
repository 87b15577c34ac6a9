#pragma once

// Affine-map construction of multimagic squares and hypercubes:
//
//   M[N_n(a_1), ..., N_n(a_d)] = N'_dn(X (a_1; ...; a_d) + t)
//
// and the star product composition of two squares.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <string>
#include <vector>

#include "multimagic/errors.hpp"
#include "multimagic/genmat.hpp"
#include "multimagic/matrix.hpp"
#include "multimagic/numbering.hpp"
#include "multimagic/ring.hpp"

namespace multimagic {

/// Which tuple coordinate is the least significant q-adic digit of a numbering.
///
/// `lsd_first` is N_m exactly as defined (coordinate 1 weighted by q^0).
/// `msd_first` reverses the coordinate vectors of both the axis and the cell
/// numbering; the published example tables are laid out this way.
enum class DigitOrder { lsd_first, msd_first };

inline std::string to_string(DigitOrder o) { return o == DigitOrder::lsd_first ? "lsd" : "msd"; }

inline DigitOrder parse_digit_order(std::string_view s) {
  if (s == "lsd") return DigitOrder::lsd_first;
  if (s == "msd") return DigitOrder::msd_first;
  throw ParseError("digit order must be 'lsd' or 'msd', got '" + std::string(s) + "'");
}

/// Everything needed to define a hypercube of side q^n and dimension d.
struct SquareSpec {
  FiniteRing ring;
  unsigned n;
  unsigned d;
  RingMatrix X;              // dn x dn
  std::vector<Elem> t;       // length dn
  CompositeNumbering axis;   // arity n, shared by all d axes
  CompositeNumbering cell;   // arity dn
  DigitOrder digit_order = DigitOrder::lsd_first;

  /// One bijection N shared by every coordinate of both numberings.
  static SquareSpec make(const GeneratorMatrix& g, std::vector<Elem> t, const TypeBijection& N,
                         DigitOrder order = DigitOrder::lsd_first) {
    if (t.empty()) t.assign(static_cast<std::size_t>(g.n) * g.d, g.ring.zero());
    SquareSpec s{g.ring, g.n, g.d, g.X, std::move(t), CompositeNumbering::uniform(N, g.n),
                 CompositeNumbering::uniform(N, static_cast<std::size_t>(g.n) * g.d), order};
    s.validate(false);
    return s;
  }

  std::uint64_t side() const { return axis.size(); }
  std::uint64_t cells() const { return cell.size(); }
  GeneratorMatrix generator() const { return {ring, n, d, X}; }

  /// Shape and ring consistency; with `certify`, also certifies X.
  void validate(bool certify = true) const {
    const std::size_t dn = static_cast<std::size_t>(n) * d;
    if (n == 0 || d < 2) throw DimensionMismatch("need n >= 1 and d >= 2");
    if (X.rows() != dn || X.cols() != dn) throw DimensionMismatch("X must be " + std::to_string(dn) + "x" + std::to_string(dn));
    if (t.size() != dn) throw DimensionMismatch("t must have " + std::to_string(dn) + " entries");
    if (axis.arity() != n) throw ArityMismatch("axis numbering arity must equal n");
    if (cell.arity() != dn) throw ArityMismatch("cell numbering arity must equal dn");
    if (!(axis.ring() == ring) || !(cell.ring() == ring)) throw RingMismatch();
    for (auto e : t)
      if (!ring.contains(e)) throw OutOfRange("t entry outside ring");
    if (certify) {
      auto report = verify_generator(ring, n, d, X);
      if (!report.passed) throw Error("generator matrix not certified: " + report.summary(ring));
    }
  }
};

/// Entries computed on demand from a SquareSpec.
///
/// Per-axis products A_k * v for every axis index are tabulated when they fit
/// `table_limit` elements, which makes an entry O(d * dn) ring additions.
class VirtualHypercube {
 public:
  explicit VirtualHypercube(SquareSpec spec, std::uint64_t table_limit = std::uint64_t{1} << 26)
      : spec_(std::move(spec)) {
    spec_.validate(false);
    dn_ = static_cast<std::size_t>(spec_.n) * spec_.d;
    if (dn_ > kMaxGeneratorSize) throw DimensionMismatch("dn > 16 is not supported");
    const std::uint64_t q = spec_.ring.size();
    weights_.resize(dn_);
    slots_.resize(dn_);
    for (std::size_t j = 0; j < dn_; ++j) {
      slots_[j] = spec_.digit_order == DigitOrder::lsd_first ? j : dn_ - 1 - j;
      weights_[j] = detail::checked_pow(q, static_cast<unsigned>(slots_[j]));
    }
    const std::uint64_t side = spec_.side();
    if (side <= table_limit / (dn_ * spec_.d)) {
      tables_.assign(spec_.d, std::vector<Elem>(side * dn_));
      std::vector<Elem> v(spec_.n);
      for (unsigned k = 0; k < spec_.d; ++k) {
        for (std::uint64_t i = 0; i < side; ++i) {
          axis_vector(i, v);
          for (std::size_t r = 0; r < dn_; ++r) {
            Elem s = spec_.ring.zero();
            for (unsigned c = 0; c < spec_.n; ++c)
              s = spec_.ring.add(s, spec_.ring.mul(spec_.X(r, static_cast<std::size_t>(k) * spec_.n + c), v[c]));
            tables_[k][i * dn_ + r] = s;
          }
        }
      }
    }
  }

  const SquareSpec& spec() const { return spec_; }
  std::uint64_t side() const { return spec_.side(); }
  unsigned dimension() const { return spec_.d; }
  std::uint64_t cells() const { return spec_.cells(); }

  /// 1-based indices, each in [1, q^n]; result in [1, q^dn].
  std::uint64_t entry(std::span<const std::uint64_t> idx) const {
    if (idx.size() != spec_.d) throw ArityMismatch("expected " + std::to_string(spec_.d) + " indices");
    std::vector<std::uint64_t> zero_based(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (idx[k] < 1 || idx[k] > side()) throw OutOfRange("index " + std::to_string(idx[k]) + " outside [1, " + std::to_string(side()) + "]");
      zero_based[k] = idx[k] - 1;
    }
    return at(zero_based);
  }

  /// 0-based indices; no range checking.
  std::uint64_t at(std::span<const std::uint64_t> idx) const {
    const FiniteRing& ring = spec_.ring;
    Elem y[kMaxGeneratorSize];
    if (!tables_.empty()) {
      for (std::size_t r = 0; r < dn_; ++r) y[r] = spec_.t[r];
      for (unsigned k = 0; k < spec_.d; ++k) {
        const Elem* row = tables_[k].data() + idx[k] * dn_;
        for (std::size_t r = 0; r < dn_; ++r) y[r] = ring.add(y[r], row[r]);
      }
    } else {
      std::vector<Elem> v(dn_);
      for (unsigned k = 0; k < spec_.d; ++k)
        axis_vector(idx[k], std::span<Elem>(v).subspan(static_cast<std::size_t>(k) * spec_.n, spec_.n));
      auto prod = multiply(ring, spec_.X, v);
      for (std::size_t r = 0; r < dn_; ++r) y[r] = ring.add(prod[r], spec_.t[r]);
    }
    std::uint64_t value = 1;
    for (std::size_t r = 0; r < dn_; ++r) value += weights_[r] * spec_.cell.coordinate(slots_[r])(y[r]);
    return value;
  }

 private:
  // Coordinates of the 0-based axis index i, in the order X's columns expect.
  void axis_vector(std::uint64_t i, std::span<Elem> out) const {
    spec_.axis.unnumber_into(i + 1, out);
    if (spec_.digit_order == DigitOrder::msd_first) std::reverse(out.begin(), out.end());
  }

  SquareSpec spec_;
  std::size_t dn_ = 0;
  std::vector<std::uint64_t> weights_;
  std::vector<std::size_t> slots_;
  std::vector<std::vector<Elem>> tables_;
};

/// Row-major dense hypercube of integers; index (i_0, ..., i_{d-1}) with i_0 slowest.
class DenseTensor {
 public:
  DenseTensor() = default;
  DenseTensor(std::uint64_t side, unsigned dimension)
      : side_(side), dim_(dimension), data_(detail::checked_pow(side, dimension)) {}
  DenseTensor(std::uint64_t side, unsigned dimension, std::vector<std::uint64_t> data)
      : side_(side), dim_(dimension), data_(std::move(data)) {
    if (data_.size() != detail::checked_pow(side, dimension)) throw DimensionMismatch("tensor data size mismatch");
  }

  static DenseTensor square(std::uint64_t m, std::vector<std::uint64_t> data) { return DenseTensor(m, 2, std::move(data)); }

  std::uint64_t side() const { return side_; }
  unsigned dimension() const { return dim_; }
  std::uint64_t cells() const { return data_.size(); }

  std::uint64_t at(std::span<const std::uint64_t> idx) const { return data_[offset(idx)]; }
  std::uint64_t& operator()(std::uint64_t i, std::uint64_t j) { return data_[i * side_ + j]; }
  std::uint64_t operator()(std::uint64_t i, std::uint64_t j) const { return data_[i * side_ + j]; }

  std::uint64_t offset(std::span<const std::uint64_t> idx) const {
    std::uint64_t o = 0;
    for (auto i : idx) o = o * side_ + i;
    return o;
  }

  std::span<const std::uint64_t> data() const { return data_; }
  std::span<std::uint64_t> data() { return data_; }

  friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

 private:
  std::uint64_t side_ = 0;
  unsigned dim_ = 2;
  std::vector<std::uint64_t> data_;
};

/// Default cell budget for dense materialization; MULTIMAGIC_MAX_CELLS overrides it.
inline std::uint64_t default_cell_budget() {
  if (const char* env = std::getenv("MULTIMAGIC_MAX_CELLS")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ParseError(std::string("invalid MULTIMAGIC_MAX_CELLS: ") + env);
    }
  }
  return std::uint64_t{1} << 31;
}

inline DenseTensor materialize(const VirtualHypercube& vh, std::uint64_t budget = default_cell_budget()) {
  std::uint64_t cells = 0;
  try {
    cells = vh.cells();
  } catch (const OutOfRange&) {
    throw TooLarge("hypercube exceeds 64-bit cell count");
  }
  if (cells > budget)
    throw TooLarge(std::to_string(cells) + " cells exceed the materialization budget of " + std::to_string(budget) +
                   "; use streaming verification");
  DenseTensor out(vh.side(), vh.dimension());
  std::vector<std::uint64_t> idx(vh.dimension(), 0);
  auto data = out.data();
  for (std::uint64_t flat = 0; flat < cells; ++flat) {
    data[flat] = vh.at(idx);
    for (std::size_t k = idx.size(); k-- > 0;) {
      if (++idx[k] < vh.side()) break;
      idx[k] = 0;
    }
  }
  return out;
}

enum class StarVariant {
  normalized,  ///< m^2 (B[k][l] - 1) + A[i][j]: normal inputs give a normal output
  literal,     ///< m^2 B[k][l] + A[i][j]: entries shifted by m^2, still magic
};

/// (A * B)[m k + i][m l + j] for A of order m and B of order n, 0-based.
inline DenseTensor star(const DenseTensor& a, const DenseTensor& b, StarVariant variant = StarVariant::normalized) {
  if (a.dimension() != 2 || b.dimension() != 2) throw DimensionMismatch("star product takes two squares");
  const std::uint64_t m = a.side(), n = b.side();
  if (variant == StarVariant::normalized) {
    auto normal = [](const DenseTensor& s) {
      std::vector<bool> seen(s.cells() + 1, false);
      for (auto v : s.data()) {
        if (v < 1 || v > s.cells() || seen[v]) return false;
        seen[v] = true;
      }
      return true;
    };
    if (!normal(a) || !normal(b)) throw Error("normalized star product requires normal input squares");
  }
  const std::uint64_t shift = variant == StarVariant::normalized ? 1 : 0;
  DenseTensor out(m * n, 2);
  for (std::uint64_t k = 0; k < n; ++k)
    for (std::uint64_t l = 0; l < n; ++l) {
      const std::uint64_t base = m * m * (b(k, l) - shift);
      for (std::uint64_t i = 0; i < m; ++i)
        for (std::uint64_t j = 0; j < m; ++j) out(m * k + i, m * l + j) = base + a(i, j);
    }
  return out;
}

}  // namespace multimagic
