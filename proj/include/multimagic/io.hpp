#pragma once

// JSON and CSV formats.
//
// Ring elements are stored as integer codes; the ring descriptor string
// (e.g. "gf:2^2:x^2+x+1") fixes their meaning. Big integers are decimal strings.
// CSV: unsigned decimal cells, comma-separated, one line per row, no header. A
// hypercube of dimension d is written as m^(d-1) rows of m cells in row-major order.

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "multimagic/construct.hpp"
#include "multimagic/errors.hpp"
#include "multimagic/genmat.hpp"
#include "multimagic/numbering.hpp"
#include "multimagic/orders.hpp"
#include "multimagic/ring.hpp"
#include "multimagic/verify.hpp"

namespace multimagic::io {

using json = nlohmann::ordered_json;

namespace detail {

inline RingMatrix matrix_of(const FiniteRing& ring, const json& j) {
  const std::size_t rows = j.size();
  RingMatrix m(rows, rows ? j.at(0).size() : 0);
  for (std::size_t r = 0; r < rows; ++r) {
    if (j.at(r).size() != m.cols()) throw ParseError("ragged matrix in JSON");
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const auto v = j.at(r).at(c).get<std::int64_t>();
      if (ring.simple()) {
        m(r, c) = ring.from_int(v);
      } else {
        if (v < 0 || !ring.contains(Elem{static_cast<std::uint64_t>(v)}))
          throw ParseError("matrix entry " + std::to_string(v) + " is not an element code of " + ring.descriptor());
        m(r, c) = Elem{static_cast<std::uint64_t>(v)};
      }
    }
  }
  return m;
}

inline std::vector<Elem> elems_of(const FiniteRing& ring, const json& j) {
  std::vector<Elem> out;
  for (const auto& v : j) {
    Elem e{v.get<std::uint64_t>()};
    if (!ring.contains(e)) throw ParseError("element outside " + ring.descriptor());
    out.push_back(e);
  }
  return out;
}

inline json codes_json(std::span<const Elem> v) {
  json a = json::array();
  for (auto e : v) a.push_back(e.code);
  return a;
}

template <typename F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace detail

inline json to_json(const TypeBijection& n) {
  json j;
  j["ring"] = n.ring().descriptor();
  j["c"] = n.type().code;
  j["forward"] = std::vector<std::uint64_t>(n.forward().begin(), n.forward().end());
  return j;
}

inline TypeBijection bijection_from_json(const json& j) {
  return detail::guarded([&] {
    FiniteRing ring = FiniteRing::parse(j.at("ring").get<std::string>());
    return TypeBijection::from_table(ring, Elem{j.at("c").get<std::uint64_t>()},
                                     j.at("forward").get<std::vector<std::uint64_t>>());
  });
}

inline json to_json(const GeneratorMatrix& g) {
  json j;
  j["ring"] = g.ring.descriptor();
  j["n"] = g.n;
  j["d"] = g.d;
  j["rows"] = g.X.codes();
  return j;
}

inline GeneratorMatrix generator_from_json(const json& j) {
  return detail::guarded([&] {
    FiniteRing ring = FiniteRing::parse(j.at("ring").get<std::string>());
    return GeneratorMatrix{ring, j.at("n").get<unsigned>(), j.at("d").get<unsigned>(), detail::matrix_of(ring, j.at("rows"))};
  });
}

inline json to_json(const SquareSpec& s) {
  json j;
  j["ring"] = s.ring.descriptor();
  j["n"] = s.n;
  j["d"] = s.d;
  j["X"] = s.X.codes();
  j["t"] = detail::codes_json(s.t);
  j["digit_order"] = to_string(s.digit_order);
  auto numbering = [](const CompositeNumbering& nm) {
    json a = json::array();
    for (const auto& b : nm.coordinates()) {
      json e;
      e["c"] = b.type().code;
      e["forward"] = std::vector<std::uint64_t>(b.forward().begin(), b.forward().end());
      a.push_back(std::move(e));
    }
    return a;
  };
  j["axis"] = numbering(s.axis);
  j["cell"] = numbering(s.cell);
  return j;
}

inline SquareSpec spec_from_json(const json& j) {
  return detail::guarded([&] {
    FiniteRing ring = FiniteRing::parse(j.at("ring").get<std::string>());
    auto numbering = [&](const json& a) {
      std::vector<TypeBijection> coords;
      for (const auto& e : a)
        coords.push_back(TypeBijection::from_table(ring, Elem{e.at("c").get<std::uint64_t>()},
                                                   e.at("forward").get<std::vector<std::uint64_t>>()));
      return CompositeNumbering(std::move(coords));
    };
    SquareSpec s{ring,
                 j.at("n").get<unsigned>(),
                 j.at("d").get<unsigned>(),
                 detail::matrix_of(ring, j.at("X")),
                 detail::elems_of(ring, j.at("t")),
                 numbering(j.at("axis")),
                 numbering(j.at("cell")),
                 parse_digit_order(j.value("digit_order", std::string("lsd")))};
    s.validate(false);
    return s;
  });
}

inline json to_json(const CertificationReport& r, const FiniteRing& ring) {
  json j;
  j["passed"] = r.passed;
  j["determinant"] = ring.format(r.determinant);
  j["invertible"] = r.invertible;
  j["minors_checked"] = r.minors_checked;
  if (r.failure) {
    j["failure"]["pattern"] = r.failure->pattern;
    j["failure"]["rows"] = r.failure->rows;
    j["failure"]["value"] = ring.format(r.failure->value);
  }
  j["summary"] = r.summary(ring);
  return j;
}

inline json to_json(const FoundGenerator& f) {
  json j;
  j["q"] = f.q;
  j["n"] = f.generator.n;
  j["d"] = f.generator.d;
  j["rows"] = f.integer_rows;
  j["candidates"] = f.candidates;
  j["generator"] = to_json(f.generator);
  j["certification"] = to_json(f.certification, f.generator.ring);
  return j;
}

inline json to_json(const PropertyVerdict& v) {
  json j;
  j["property"] = v.property;
  j["passed"] = v.passed;
  j["lines_checked"] = v.lines_checked;
  if (v.witness) j["witness"] = {{"line", v.witness->line}, {"observed", to_string(v.witness->observed)}};
  return j;
}

inline json to_json(const MagicReport& r) {
  json j;
  j["order"] = r.order;
  j["dimension"] = r.dimension;
  j["degree"] = r.degree;
  j["passed"] = r.passed();
  j["normal"] = r.normal;
  if (r.normal_witness) j["normal_witness"] = *r.normal_witness;
  j["degrees"] = json::array();
  for (const auto& d : r.degrees) {
    json e;
    e["degree"] = d.degree;
    e["magic_sum"] = d.magic_sum ? json(to_string(*d.magic_sum)) : json(nullptr);
    e["passed"] = d.passed();
    e["properties"] = json::array();
    for (const auto& p : d.properties) e["properties"].push_back(to_json(p));
    j["degrees"].push_back(std::move(e));
  }
  if (r.associative) j["associative"] = to_json(*r.associative);
  return j;
}

inline json to_json(const SweepReport& r) {
  json j;
  j["limit"] = r.limit;
  j["max_n"] = r.max_n;
  j["pairs_checked"] = r.pairs_checked;
  j["counterexamples"] = json::array();
  for (const auto& c : r.counterexamples) j["counterexamples"].push_back({{"m", c.m}, {"n", c.n}});
  return j;
}

inline void write_csv(std::ostream& os, const DenseTensor& t) {
  const std::uint64_t m = t.side();
  const auto data = t.data();
  for (std::uint64_t r = 0; r < data.size() / m; ++r) {
    for (std::uint64_t c = 0; c < m; ++c) {
      if (c) os << ',';
      os << data[r * m + c];
    }
    os << '\n';
  }
}

inline std::string to_csv(const DenseTensor& t) {
  std::ostringstream os;
  write_csv(os, t);
  return os.str();
}

/// Reads a square (or a hypercube laid out as m^(d-1) rows of m cells).
inline DenseTensor read_csv(std::istream& is) {
  std::vector<std::uint64_t> data;
  std::uint64_t side = 0, rows = 0;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::uint64_t count = 0;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      const auto first = cell.find_first_not_of(" \t");
      const auto last = cell.find_last_not_of(" \t");
      if (first == std::string::npos) throw ParseError("empty CSV cell on row " + std::to_string(rows + 1));
      data.push_back(multimagic::detail::parse_uint(cell.substr(first, last - first + 1), "CSV cell"));
      ++count;
    }
    if (rows == 0) side = count;
    if (count != side) throw ParseError("CSV row " + std::to_string(rows + 1) + " has " + std::to_string(count) +
                                        " cells, expected " + std::to_string(side));
    ++rows;
  }
  if (side == 0) throw ParseError("empty CSV");
  // rows = side^(dim-1) with dim >= 2
  unsigned dim = 2;
  std::uint64_t expect = side;
  while (side > 1 && expect < rows) {
    expect *= side;
    ++dim;
  }
  if (expect != rows)
    throw ParseError("CSV has " + std::to_string(rows) + " rows of " + std::to_string(side) +
                     " cells, which is not a hypercube layout");
  return DenseTensor(side, dim, std::move(data));
}

}  // namespace multimagic::io
