#pragma once

// Magic-property verification over dense tensors and virtual hypercubes.
//
// Every line is streamed once; the sums of all powers 1..n are accumulated
// together in exact arithmetic (128-bit when a bound proves it cannot
// overflow, arbitrary precision otherwise) and compared to
//
//   S(e) = (sum_{k=1}^{m^d} k^e) / m^(d-1).

#include <algorithm>
#include <atomic>
#include <concepts>
#include <cstdint>
#include <limits>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "multimagic/bigint.hpp"
#include "multimagic/construct.hpp"
#include "multimagic/errors.hpp"

namespace multimagic {

template <typename S>
concept CellSource = requires(const S& s, std::span<const std::uint64_t> idx) {
  { s.side() } -> std::convertible_to<std::uint64_t>;
  { s.dimension() } -> std::convertible_to<unsigned>;
  { s.at(idx) } -> std::convertible_to<std::uint64_t>;
};

/// sum_{k=1}^{count} k^e, via (e+1) S_e = (N+1)^(e+1) - 1 - sum_{j<e} C(e+1, j) S_j.
inline BigInt power_sum(const BigInt& count, unsigned e) {
  std::vector<BigInt> s(e + 1);
  s[0] = count;
  for (unsigned p = 1; p <= e; ++p) {
    BigInt acc = big_pow(count + 1, p + 1) - 1;
    BigInt binom = 1;  // C(p+1, j)
    for (unsigned j = 0; j < p; ++j) {
      acc -= binom * s[j];
      binom = binom * (p + 1 - j) / (j + 1);
    }
    s[p] = acc / (p + 1);
  }
  return s[e];
}

/// Common line sum of the e-th power hypercube of a normal d-dimensional hypercube of side m.
inline BigInt magic_sum(std::uint64_t m, unsigned d, unsigned e) {
  if (m == 0 || d == 0) throw DimensionMismatch("side and dimension must be positive");
  const BigInt total = power_sum(big_pow(BigInt(m), d), e);
  const BigInt divisor = big_pow(BigInt(m), d - 1);
  if (total % divisor != 0)
    throw NotIntegral("sum of " + std::to_string(e) + "-th powers is not divisible by " + divisor.str() +
                      ": no normal magic hypercube of side " + std::to_string(m));
  return total / divisor;
}

struct VerifyOptions {
  bool pandiagonal = false;  // broken diagonals, squares only
  bool associative = false;  // mirrored cells sum to m^d + 1
  bool perfect = false;      // diagonals of every 2-D orthogonal slice, d >= 3
  unsigned extra_degree = 0; // highest power for broken and slice diagonals; 0 = every degree
  unsigned threads = 1;      // 0 = hardware concurrency
};

struct LineWitness {
  std::string line;
  BigInt observed;
};

struct PropertyVerdict {
  std::string property;
  bool passed = true;
  std::uint64_t lines_checked = 0;
  std::optional<LineWitness> witness;  // first failure in canonical line order
};

struct DegreeReport {
  unsigned degree = 0;
  std::optional<BigInt> magic_sum;  // empty when the power sum is not divisible
  std::vector<PropertyVerdict> properties;

  bool passed() const {
    return magic_sum && std::all_of(properties.begin(), properties.end(), [](const auto& p) { return p.passed; });
  }
};

struct MagicReport {
  std::uint64_t order = 0;
  unsigned dimension = 0;
  unsigned degree = 0;
  bool normal = false;
  std::optional<std::string> normal_witness;
  std::vector<DegreeReport> degrees;
  std::optional<PropertyVerdict> associative;

  bool degree_passed(unsigned e) const { return e >= 1 && e <= degrees.size() && degrees[e - 1].passed(); }

  bool passed() const {
    if (!normal) return false;
    if (associative && !associative->passed) return false;
    return std::all_of(degrees.begin(), degrees.end(), [](const auto& d) { return d.passed(); });
  }

  const PropertyVerdict* verdict(unsigned e, std::string_view property) const {
    if (e < 1 || e > degrees.size()) return nullptr;
    for (const auto& p : degrees[e - 1].properties)
      if (p.property == property) return &p;
    return nullptr;
  }
};

namespace detail {

// A line is start + x * step (mod m) per coordinate, x = 0..m-1, step in {-1, 0, 1}.
struct LineFamily {
  enum class Kind { axis, diagonal, broken, slice };
  std::string name;
  Kind kind;
  unsigned axis = 0;           // Kind::axis
  std::uint64_t first = 0;     // Kind::diagonal: first sign-pattern code
  std::uint64_t count = 0;
};

inline std::string axis_family_name(unsigned axis, unsigned d) {
  if (axis == 1) return "rows";
  if (axis == 0) return "columns";
  if (axis == 2) return "pillars";
  (void)d;
  return "axis-" + std::to_string(axis) + "-lines";
}

inline std::vector<LineFamily> line_families(std::uint64_t m, unsigned d, const VerifyOptions& opt) {
  using K = LineFamily::Kind;
  std::vector<LineFamily> out;
  const std::uint64_t per_axis = checked_pow(m, d - 1);
  // rows before columns for squares; other axes after
  std::vector<unsigned> order;
  if (d >= 2) order = {1, 0};
  for (unsigned k = 2; k < d; ++k) order.push_back(k);
  if (d == 1) order = {0};
  for (unsigned k : order) out.push_back({axis_family_name(k, d), K::axis, k, 0, per_axis});
  if (d == 2) {
    out.push_back({"diagonal", K::diagonal, 0, 0, 1});
    out.push_back({"antidiagonal", K::diagonal, 0, 1, 1});
  } else if (d > 2) {
    out.push_back({"space-diagonals", K::diagonal, 0, 0, std::uint64_t{1} << (d - 1)});
  }
  if (opt.pandiagonal && d == 2 && m > 1) out.push_back({"broken-diagonals", K::broken, 0, 0, 2 * (m - 1)});
  if (opt.perfect && d >= 3) out.push_back({"slice-diagonals", K::slice, 0, 0, d * (d - 1) / 2 * checked_pow(m, d - 2) * 2});
  return out;
}

struct LineGeometry {
  std::vector<std::uint64_t> start;
  std::vector<int> step;
  std::string describe;
};

inline std::string tuple_str(const std::vector<std::uint64_t>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i] + 1);
  return s + ")";
}

inline void line_geometry(const LineFamily& f, std::uint64_t l, std::uint64_t m, unsigned d, LineGeometry& g,
                          bool with_description) {
  using K = LineFamily::Kind;
  g.start.assign(d, 0);
  g.step.assign(d, 0);
  switch (f.kind) {
    case K::axis: {
      std::uint64_t rest = l;
      for (unsigned k = d; k-- > 0;) {
        if (k == f.axis) continue;
        g.start[k] = rest % m;
        rest /= m;
      }
      g.step[f.axis] = 1;
      if (with_description) {
        if (d == 2) {
          g.describe = (f.axis == 1 ? "row " + std::to_string(g.start[0] + 1) : "column " + std::to_string(g.start[1] + 1));
        } else {
          g.describe = f.name + " through " + tuple_str(g.start);
        }
      }
      break;
    }
    case K::diagonal: {
      const std::uint64_t code = f.first + l;
      g.step[0] = 1;
      for (unsigned k = 1; k < d; ++k) {
        const bool reversed = (code >> (k - 1)) & 1;
        g.start[k] = reversed ? m - 1 : 0;
        g.step[k] = reversed ? -1 : 1;
      }
      if (with_description) {
        std::string signs;
        for (unsigned k = 0; k < d; ++k) signs += g.step[k] > 0 ? '+' : '-';
        g.describe = d == 2 ? f.name : "space diagonal " + signs;
      }
      break;
    }
    case K::broken: {
      g.step[0] = 1;
      if (l < m - 1) {
        g.start[1] = l + 1;
        g.step[1] = 1;
        if (with_description) g.describe = "broken diagonal, offset " + std::to_string(l + 1);
      } else {
        g.start[1] = (m - 1 + (l - (m - 1) + 1)) % m;
        g.step[1] = -1;
        if (with_description) g.describe = "broken antidiagonal, offset " + std::to_string(l - (m - 1) + 1);
      }
      break;
    }
    case K::slice: {
      const std::uint64_t per_pair = checked_pow(m, d - 2) * 2;
      std::uint64_t pair = l / per_pair, rest = l % per_pair;
      const bool anti = rest % 2;
      rest /= 2;
      unsigned a = 0, b = 1;
      for (std::uint64_t p = 0;; ++p) {
        if (p == pair) break;
        if (++b == d) {
          ++a;
          b = a + 1;
        }
      }
      for (unsigned k = d; k-- > 0;) {
        if (k == a || k == b) continue;
        g.start[k] = rest % m;
        rest /= m;
      }
      g.step[a] = 1;
      g.start[b] = anti ? m - 1 : 0;
      g.step[b] = anti ? -1 : 1;
      if (with_description) {
        g.describe = std::string(anti ? "anti" : "main") + " diagonal of slice spanning axes " + std::to_string(a + 1) +
                     "," + std::to_string(b + 1) + " through " + tuple_str(g.start);
      }
      break;
    }
  }
}

template <typename Acc>
Acc to_acc(const BigInt& v) {
  if constexpr (std::is_same_v<Acc, BigInt>) {
    return v;
  } else {
    return v.template convert_to<Acc>();
  }
}

template <typename Acc>
BigInt to_big(const Acc& v) {
  if constexpr (std::is_same_v<Acc, BigInt>) {
    return v;
  } else {
    BigInt r = static_cast<std::uint64_t>(v >> 64);
    r <<= 64;
    r += static_cast<std::uint64_t>(v);
    return r;
  }
}

struct Failure {
  std::uint64_t line = std::numeric_limits<std::uint64_t>::max();
  BigInt observed;
};

template <typename Acc, CellSource Source>
void run_lines(const Source& src, unsigned degree, const std::vector<LineFamily>& families,
               const std::vector<std::optional<BigInt>>& expected, unsigned threads,
               std::vector<std::vector<Failure>>& failures,  // [degree-1][family]
               std::vector<std::uint8_t>* seen, std::atomic<bool>* seen_bad) {
  const std::uint64_t m = src.side();
  const unsigned d = src.dimension();
  std::vector<std::uint64_t> family_start(families.size() + 1, 0);
  for (std::size_t f = 0; f < families.size(); ++f) family_start[f + 1] = family_start[f] + families[f].count;
  const std::uint64_t total = family_start.back();
  std::vector<Acc> target(degree);
  for (unsigned e = 0; e < degree; ++e)
    if (expected[e]) target[e] = to_acc<Acc>(*expected[e]);

  std::atomic<std::uint64_t> next{0};
  std::mutex merge;
  const std::uint64_t chunk = std::max<std::uint64_t>(1, std::min<std::uint64_t>(64, total / (threads * 8 + 1)));

  auto worker = [&] {
    std::vector<std::vector<Failure>> local(degree, std::vector<Failure>(families.size()));
    LineGeometry g;
    std::vector<std::uint64_t> idx(d);
    std::vector<Acc> sums(degree);
    for (;;) {
      const std::uint64_t begin = next.fetch_add(chunk);
      if (begin >= total) break;
      const std::uint64_t end = std::min(total, begin + chunk);
      std::size_t f = std::upper_bound(family_start.begin(), family_start.end(), begin) - family_start.begin() - 1;
      for (std::uint64_t item = begin; item < end; ++item) {
        while (item >= family_start[f + 1]) ++f;
        const std::uint64_t l = item - family_start[f];
        line_geometry(families[f], l, m, d, g, false);
        const bool mark = seen && f == 0;
        for (auto& s : sums) s = 0;
        for (std::uint64_t x = 0; x < m; ++x) {
          for (unsigned k = 0; k < d; ++k) {
            if (g.step[k] == 0) {
              idx[k] = g.start[k];
            } else if (g.step[k] > 0) {
              const std::uint64_t c = g.start[k] + x;
              idx[k] = c >= m ? c - m : c;
            } else {
              idx[k] = g.start[k] >= x ? g.start[k] - x : g.start[k] + m - x;
            }
          }
          const std::uint64_t v = src.at(idx);
          if (mark) {
            if (v < 1 || v > seen->size()) {
              seen_bad->store(true, std::memory_order_relaxed);
            } else if (std::atomic_ref<std::uint8_t>((*seen)[v - 1]).exchange(1, std::memory_order_relaxed)) {
              seen_bad->store(true, std::memory_order_relaxed);
            }
          }
          Acc p = 1;
          const Acc base = v;
          for (unsigned e = 0; e < degree; ++e) {
            p *= base;
            sums[e] += p;
          }
        }
        for (unsigned e = 0; e < degree; ++e) {
          if (!expected[e] || sums[e] == target[e]) continue;
          auto& slot = local[e][f];
          if (l < slot.line) {
            slot.line = l;
            slot.observed = to_big<Acc>(sums[e]);
          }
        }
      }
    }
    std::lock_guard lock(merge);
    for (unsigned e = 0; e < degree; ++e)
      for (std::size_t f = 0; f < families.size(); ++f)
        if (local[e][f].line < failures[e][f].line) failures[e][f] = std::move(local[e][f]);
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
}

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace detail

/// True iff the entries are exactly 1..m^d.
template <CellSource Source>
bool check_normal(const Source& src) {
  const std::uint64_t m = src.side();
  const unsigned d = src.dimension();
  const std::uint64_t cells = detail::checked_pow(m, d);
  std::vector<bool> seen(cells, false);
  std::vector<std::uint64_t> idx(d, 0);
  for (std::uint64_t flat = 0; flat < cells; ++flat) {
    const std::uint64_t v = src.at(idx);
    if (v < 1 || v > cells || seen[v - 1]) return false;
    seen[v - 1] = true;
    for (std::size_t k = d; k-- > 0;) {
      if (++idx[k] < m) break;
      idx[k] = 0;
    }
  }
  return true;
}

/// Streams every required line for powers 1..degree and reports per-property verdicts.
template <CellSource Source>
MagicReport check_multimagic(const Source& src, unsigned degree, const VerifyOptions& opt = {}) {
  const std::uint64_t m = src.side();
  const unsigned d = src.dimension();
  if (degree == 0) throw Error("degree must be at least 1");
  if (d < 2) throw DimensionMismatch("dimension must be at least 2");
  const std::uint64_t cells = detail::checked_pow(m, d);
  const unsigned threads = detail::resolve_threads(opt.threads);

  MagicReport report;
  report.order = m;
  report.dimension = d;
  report.degree = degree;

  const auto families = detail::line_families(m, d, opt);
  std::vector<std::optional<BigInt>> expected(degree);
  for (unsigned e = 1; e <= degree; ++e) {
    try {
      expected[e - 1] = magic_sum(m, d, e);
    } catch (const NotIntegral&) {
    }
  }

  std::vector<std::vector<detail::Failure>> failures(degree, std::vector<detail::Failure>(families.size()));
  std::vector<std::uint8_t> seen(cells, 0);
  std::atomic<bool> seen_bad{false};

  // Largest possible line sum is m * cells^degree; 128 bits suffice when that is below 2^127.
  const BigInt bound = BigInt(m) * big_pow(BigInt(cells), degree);
  if (bound < (BigInt(1) << 127)) {
    detail::run_lines<unsigned __int128>(src, degree, families, expected, threads, failures, &seen, &seen_bad);
  } else {
    detail::run_lines<BigInt>(src, degree, families, expected, threads, failures, &seen, &seen_bad);
  }

  report.normal = !seen_bad.load();
  if (report.normal) {
    report.normal = std::all_of(seen.begin(), seen.end(), [](std::uint8_t b) { return b != 0; });
  }
  if (!report.normal) report.normal_witness = "entries are not a permutation of 1.." + std::to_string(cells);

  detail::LineGeometry g;
  for (unsigned e = 1; e <= degree; ++e) {
    DegreeReport dr;
    dr.degree = e;
    dr.magic_sum = expected[e - 1];
    for (std::size_t f = 0; f < families.size(); ++f) {
      const bool optional_family =
          families[f].kind == detail::LineFamily::Kind::broken || families[f].kind == detail::LineFamily::Kind::slice;
      if (optional_family && opt.extra_degree != 0 && e > opt.extra_degree) continue;
      PropertyVerdict v;
      v.property = families[f].name;
      v.lines_checked = families[f].count;
      const auto& fail = failures[e - 1][f];
      if (!expected[e - 1]) {
        v.passed = false;
      } else if (fail.line != std::numeric_limits<std::uint64_t>::max()) {
        v.passed = false;
        detail::line_geometry(families[f], fail.line, m, d, g, true);
        v.witness = LineWitness{g.describe, fail.observed};
      }
      dr.properties.push_back(std::move(v));
    }
    report.degrees.push_back(std::move(dr));
  }

  if (opt.associative) {
    PropertyVerdict v;
    v.property = "associative";
    const std::uint64_t pairs = (cells + 1) / 2;
    v.lines_checked = pairs;
    std::vector<std::uint64_t> a(d), b(d);
    for (std::uint64_t flat = 0; flat < pairs; ++flat) {
      std::uint64_t rest = flat;
      for (unsigned k = d; k-- > 0;) {
        a[k] = rest % m;
        b[k] = m - 1 - a[k];
        rest /= m;
      }
      const std::uint64_t sum = src.at(a) + src.at(b);
      if (sum != cells + 1) {
        v.passed = false;
        v.witness = LineWitness{"cells " + detail::tuple_str(a) + " and " + detail::tuple_str(b), BigInt(sum)};
        break;
      }
    }
    report.associative = std::move(v);
  }
  return report;
}

namespace detail {

// Common value of all rows, columns and all 2k broken diagonals of a k x k block, if any.
template <typename Get>
std::optional<std::uint64_t> pandiagonal_sum(std::uint64_t k, Get&& get) {
  std::optional<std::uint64_t> common;
  auto agree = [&](std::uint64_t s) {
    if (!common) common = s;
    return *common == s;
  };
  for (std::uint64_t i = 0; i < k; ++i) {
    std::uint64_t row = 0, col = 0, diag = 0, anti = 0;
    for (std::uint64_t x = 0; x < k; ++x) {
      row += get(i, x);
      col += get(x, i);
      diag += get(x, (x + i) % k);
      anti += get(x, (i + k - x % k) % k);
    }
    if (!agree(row) || !agree(col) || !agree(diag) || !agree(anti)) return std::nullopt;
  }
  return common;
}

}  // namespace detail

/// For an order-25 square: (i) every aligned 5x5 block is pandiagonal with one
/// common sum; (ii) every submatrix of rows = i mod 5 and columns = j mod 5 is pandiagonal.
template <CellSource Source>
std::pair<bool, bool> check_sub5x5_properties(const Source& src) {
  if (src.dimension() != 2 || src.side() != 25) throw DimensionMismatch("sub-5x5 properties need an order-25 square");
  auto cell = [&](std::uint64_t r, std::uint64_t c) {
    const std::uint64_t idx[2] = {r, c};
    return static_cast<std::uint64_t>(src.at(idx));
  };
  bool blocks = true;
  std::optional<std::uint64_t> block_sum;
  for (std::uint64_t br = 0; br < 5 && blocks; ++br)
    for (std::uint64_t bc = 0; bc < 5 && blocks; ++bc) {
      auto s = detail::pandiagonal_sum(5, [&](std::uint64_t i, std::uint64_t j) { return cell(5 * br + i, 5 * bc + j); });
      if (!s || (block_sum && *block_sum != *s)) blocks = false;
      block_sum = s;
    }
  bool residues = true;
  for (std::uint64_t i = 0; i < 5 && residues; ++i)
    for (std::uint64_t j = 0; j < 5 && residues; ++j) {
      auto s = detail::pandiagonal_sum(5, [&](std::uint64_t a, std::uint64_t b) { return cell(i + 5 * a, j + 5 * b); });
      if (!s) residues = false;
    }
  return {blocks, residues};
}

}  // namespace multimagic
