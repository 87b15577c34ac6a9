#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "multimagic/multimagic.hpp"

namespace multimagic::cli {
namespace {

using io::json;

FiniteRing ring_for_q(std::uint64_t q) {
  if (q < 2) throw ParseError("q must be at least 2");
  if (detail::is_prime(q)) return FiniteRing::prime_field(q);
  for (std::uint64_t p = 2; p * p <= q; ++p) {
    if (q % p) continue;
    std::uint64_t r = q;
    unsigned k = 0;
    while (r % p == 0) {
      r /= p;
      ++k;
    }
    if (r == 1 && detail::is_prime(p)) return FiniteRing::extension(p, k);
    break;
  }
  return FiniteRing::modular(q);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw ParseError("cannot write '" + path + "'");
  f << text;
}

bool is_fixture(const std::string& name) {
  for (const auto& f : fixtures::squares())
    if (f.name == name) return true;
  return false;
}

DenseTensor load_square(const std::string& source) {
  if (is_fixture(source)) return fixtures::square(source).square();
  std::istringstream in(read_file(source));
  return io::read_csv(in);
}

struct Chosen {
  GeneratorMatrix generator;
  std::optional<TypeBijection> numbering;
  DigitOrder order = DigitOrder::lsd_first;
  std::string source;
};

// Explicit construction, then catalogued generators, then (n = 1) exhaustive search.
Chosen choose_generator(const FiniteRing& ring, unsigned n) {
  if (n >= 2 && ring.kind() == FiniteRing::Kind::extension && ring.degree() == 1) {
    try {
      return {explicit_generator(n, ring.size()), std::nullopt, DigitOrder::lsd_first, "explicit Vandermonde/companion"};
    } catch (const Error&) {
    }
  }
  for (const auto& e : fixtures::catalogue())
    if (e.n == n && FiniteRing::parse(e.ring) == ring) return {e.generator(), e.numbering(), e.order, "catalogue " + e.name};
  if (n == 1) {
    const std::uint64_t count = detail::checked_pow(ring.size(), 4);
    if (auto g = search_ring_generator(ring, 1, 2, 1'000'000))
      return {*g, std::nullopt, DigitOrder::lsd_first, "exhaustive search"};
    throw Error("no certifiable 2x2 generator over " + ring.descriptor() + " exists: exhaustive search over " +
                std::to_string(count) + " matrices found none");
  }
  throw Error("no generator available for n = " + std::to_string(n) + " over " + ring.descriptor() +
              "; supply one with --generator");
}

std::string describe(const MagicReport& r) {
  std::ostringstream os;
  os << "order " << r.order << ", dimension " << r.dimension << ", degrees 1.." << r.degree << ": "
     << (r.passed() ? "PASS" : "FAIL") << "\n";
  os << "  normal: " << (r.normal ? "yes" : "no") << "\n";
  for (const auto& d : r.degrees) {
    os << "  degree " << d.degree << ": S = " << (d.magic_sum ? to_string(*d.magic_sum) : std::string("not integral"));
    for (const auto& p : d.properties) os << ", " << p.property << (p.passed ? " ok" : " FAIL");
    os << "\n";
    for (const auto& p : d.properties)
      if (p.witness) os << "    " << p.property << ": " << p.witness->line << " sums to " << to_string(p.witness->observed) << "\n";
  }
  if (r.associative) {
    os << "  associative: " << (r.associative->passed ? "ok" : "FAIL");
    if (r.associative->witness) os << " (" << r.associative->witness->line << " sum to " << to_string(r.associative->witness->observed) << ")";
    os << "\n";
  }
  return os.str();
}

VerifyOptions parse_checks(const std::string& checks, unsigned threads, unsigned extra_degree) {
  VerifyOptions o;
  o.threads = threads;
  o.extra_degree = extra_degree;
  for (const auto& c : split(checks, ',')) {
    if (c == "pandiagonal") {
      o.pandiagonal = true;
    } else if (c == "associative") {
      o.associative = true;
    } else if (c == "perfect") {
      o.perfect = true;
    } else {
      throw ParseError("unknown check '" + c + "' (expected pandiagonal, associative, perfect)");
    }
  }
  return o;
}

int cmd_gen(std::ostream& out, std::ostream& err, unsigned n, std::uint64_t q, const std::string& ring_text,
            const std::string& t_text, bool random_t, std::uint64_t seed, const std::string& order_text,
            const std::string& generator_path, const std::string& type_text, const std::string& out_path,
            const std::string& spec_path, bool virtual_only) {
  if (virtual_only && spec_path.empty()) throw ParseError("--virtual needs --spec");
  Chosen chosen = [&] {
    if (!generator_path.empty()) {
      auto g = io::generator_from_json(read_json(generator_path));
      return Chosen{g, std::nullopt, DigitOrder::lsd_first, "file " + generator_path};
    }
    if (n == 0) throw ParseError("--n is required");
    FiniteRing ring = !ring_text.empty() ? FiniteRing::parse(ring_text) : q ? ring_for_q(q) : throw ParseError("--q or --ring is required");
    return choose_generator(ring, n);
  }();
  const GeneratorMatrix& g = chosen.generator;
  const FiniteRing& ring = g.ring;
  auto report = verify_generator(g);
  std::ostream& log = out_path.empty() && !virtual_only ? err : out;
  log << "generator: " << chosen.source << " over " << ring.descriptor() << " (n=" << g.n << ", d=" << g.d << ")\n";
  log << "certification: " << report.summary(ring) << "\n";
  if (!report.passed) return kFail;

  const std::size_t dn = static_cast<std::size_t>(g.n) * g.d;
  std::vector<Elem> t;
  if (random_t) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < dn; ++i) t.push_back(Elem{rng() % ring.size()});
  } else if (!t_text.empty()) {
    for (const auto& s : split(t_text, ',')) t.push_back(ring.parse_element(s));
    if (t.size() != dn) throw ParseError("--t needs " + std::to_string(dn) + " entries");
  }
  TypeBijection N = !type_text.empty()          ? TypeBijection::build(ring, ring.parse_element(type_text))
                    : chosen.numbering.has_value() ? *chosen.numbering
                                                   : TypeBijection::standard(ring);
  const DigitOrder order = order_text.empty() ? chosen.order : parse_digit_order(order_text);
  SquareSpec spec = SquareSpec::make(g, t, N, order);
  log << "order: " << spec.side() << (g.d > 2 ? " (dimension " + std::to_string(g.d) + ")" : "") << "\n";
  if (!spec_path.empty()) write_text(spec_path, io::to_json(spec).dump(2) + "\n", out);
  if (virtual_only) return kPass;
  VirtualHypercube vh(spec);
  write_text(out_path.empty() ? "-" : out_path, io::to_csv(materialize(vh)), out);
  return kPass;
}

int cmd_verify(std::ostream& out, const std::string& in_path, const std::string& fixture, const std::string& spec_path,
               unsigned degree, const std::string& checks, bool stream, const std::string& json_path, unsigned threads,
               unsigned extra_degree, bool sub5x5) {
  const int sources = !in_path.empty() + !fixture.empty() + !spec_path.empty();
  if (sources != 1) throw ParseError("exactly one of --in, --fixture, --spec is required");
  VerifyOptions opt = parse_checks(checks, threads, extra_degree);
  bool want_sub = sub5x5;
  if (!fixture.empty()) {
    const auto& f = fixtures::square(fixture);
    if (degree == 0) degree = f.degree;
    if (checks.empty()) {
      opt = f.profile();
      opt.threads = threads;
      if (extra_degree) opt.extra_degree = extra_degree;
      want_sub = want_sub || f.sub5x5;
    }
  }
  if (degree == 0) degree = 1;

  MagicReport report;
  std::optional<std::pair<bool, bool>> sub;
  if (!spec_path.empty()) {
    VirtualHypercube vh(io::spec_from_json(read_json(spec_path)));
    if (stream) {
      report = check_multimagic(vh, degree, opt);
    } else {
      auto dense = materialize(vh);
      report = check_multimagic(dense, degree, opt);
    }
    if (want_sub) sub = check_sub5x5_properties(vh);
  } else {
    auto dense = !fixture.empty() ? fixtures::square(fixture).square() : load_square(in_path);
    report = check_multimagic(dense, degree, opt);
    if (want_sub) sub = check_sub5x5_properties(dense);
  }
  out << describe(report);
  bool passed = report.passed();
  if (sub) {
    out << "  5x5 blocks pandiagonal: " << (sub->first ? "ok" : "FAIL") << "\n";
    out << "  mod-5 selections pandiagonal: " << (sub->second ? "ok" : "FAIL") << "\n";
    passed = passed && sub->first && sub->second;
  }
  if (!json_path.empty()) {
    json j = io::to_json(report);
    if (sub) j["sub5x5"] = {{"blocks", sub->first}, {"residues", sub->second}};
    write_text(json_path, j.dump(2) + "\n", out);
  }
  return passed ? kPass : kFail;
}

int cmd_star(std::ostream& out, const std::string& a, const std::string& b, const std::string& variant,
             const std::string& out_path, unsigned degree, unsigned threads) {
  StarVariant v;
  if (variant == "normalized") {
    v = StarVariant::normalized;
  } else if (variant == "literal") {
    v = StarVariant::literal;
  } else {
    throw ParseError("--variant must be normalized or literal");
  }
  DenseTensor c = star(load_square(a), load_square(b), v);
  if (!out_path.empty()) write_text(out_path, io::to_csv(c), out);
  out << "order: " << c.side() << "\n";
  if (degree == 0) return kPass;
  VerifyOptions opt;
  opt.threads = threads;
  auto report = check_multimagic(c, degree, opt);
  out << describe(report);
  return report.passed() ? kPass : kFail;
}

int cmd_findgen(std::ostream& out, unsigned n, unsigned d, std::uint64_t seed, const std::string& strategy,
                std::uint64_t budget, const std::string& json_path) {
  SearchOptions o;
  o.seed = seed;
  o.budget = budget;
  if (strategy == "sequential") {
    o.strategy = SearchStrategy::sequential;
  } else if (strategy == "random") {
    o.strategy = SearchStrategy::seeded_random;
  } else {
    throw ParseError("--strategy must be sequential or random");
  }
  auto found = find_generator(n, d, o);
  out << "q = " << found.q << "\n";
  for (const auto& row : found.integer_rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
    out << "\n";
  }
  out << "candidates tried: " << found.candidates << "\n";
  out << "certification: " << found.certification.summary(found.generator.ring) << "\n";
  if (!json_path.empty()) write_text(json_path, io::to_json(found).dump(2) + "\n", out);
  return found.certification.passed ? kPass : kFail;
}

int cmd_order_bound(std::ostream& out, std::uint64_t m, std::uint64_t sweep) {
  if (sweep) {
    auto r = consistency_sweep(sweep);
    out << "checked " << r.pairs_checked << " (m, n) pairs up to m = " << sweep << ": " << r.counterexamples.size()
        << " counterexamples\n";
    for (const auto& c : r.counterexamples) out << "  m = " << c.m << ", n = " << c.n << "\n";
    if (!m) return r.counterexamples.empty() ? kPass : kFail;
  }
  if (!m) throw ParseError("--m is required");
  const BigInt bound = degree_bound(m);
  out << "max possible degree: " << to_string(bound) << "\n";
  out << "(a necessary condition only; squares of that degree need not exist)\n";
  const BigInt rows = std::min<BigInt>(bound + 2, BigInt(64));
  const auto last = rows.convert_to<std::uint64_t>();
  out << "n  m | C(m^2, n+1)\n";
  for (std::uint64_t n = 1; n <= last; ++n) out << n << "  " << (binomial_feasible(m, n) ? "yes" : "no") << "\n";
  if (BigInt(last) < bound + 2) out << "... (table truncated at n = " << last << ")\n";
  return kPass;
}

int cmd_fixtures(std::ostream& out, bool list, const std::string& dump, const std::string& format) {
  if (list || dump.empty()) {
    for (const auto& f : fixtures::squares())
      out << f.name << "  order " << f.order << ", degree " << f.degree << (f.associative ? ", associative" : "")
          << (f.pandiagonal ? ", pandiagonal" : "") << "  " << f.description << "\n";
    for (const auto& g : fixtures::generators())
      out << g.name << "  generator n=" << g.n << ", d=" << g.d << "  " << g.description << "\n";
    return kPass;
  }
  for (const auto& g : fixtures::generators()) {
    if (g.name != dump) continue;
    json j{{"name", g.name}, {"n", g.n}, {"d", g.d}, {"rows", g.rows}};
    out << j.dump(2) << "\n";
    return kPass;
  }
  const auto& f = fixtures::square(dump);
  if (format == "csv") {
    out << io::to_csv(f.square());
  } else if (format == "json") {
    json j{{"name", f.name}, {"description", f.description}, {"order", f.order}, {"degree", f.degree},
           {"associative", f.associative}, {"pandiagonal", f.pandiagonal}};
    if (f.spec) j["spec"] = io::to_json(*f.spec);
    out << j.dump(2) << "\n";
  } else {
    throw ParseError("--format must be csv or json");
  }
  return kPass;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"multimagic: construct and verify multimagic squares and hypercubes"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Verifier worker threads (0 = all cores)");

  auto* gen = app.add_subcommand("gen", "Generate a square from a certified generator matrix");
  unsigned gen_n = 0;
  std::uint64_t gen_q = 0, gen_seed = 0;
  std::string gen_ring, gen_t, gen_order, gen_generator, gen_type, gen_out, gen_spec;
  bool gen_random = false, gen_virtual = false;
  gen->add_option("--n", gen_n, "Multimagic degree");
  gen->add_option("--q", gen_q, "Ring size (prime, prime power, or other modulus)");
  gen->add_option("--ring", gen_ring, "Ring descriptor, e.g. zmod:10, gf:5, gf:2^2:x^2+x+1");
  gen->add_option("--t", gen_t, "Translation vector, comma-separated elements");
  gen->add_flag("--random-t", gen_random, "Draw t from --seed");
  gen->add_option("--seed", gen_seed, "Seed for --random-t");
  gen->add_option("--digit-order", gen_order, "lsd or msd (default: the generator's own)");
  gen->add_option("--generator", gen_generator, "Generator matrix JSON file");
  gen->add_option("--type", gen_type, "Build the numbering of this type instead of the standard one");
  gen->add_option("--out", gen_out, "CSV output path (default stdout)");
  gen->add_option("--spec", gen_spec, "Write the square's JSON spec here");
  gen->add_flag("--virtual", gen_virtual, "Write only the spec, no tensor");

  auto* ver = app.add_subcommand("verify", "Verify magic properties");
  std::string ver_in, ver_fixture, ver_spec, ver_checks, ver_json;
  unsigned ver_degree = 0, ver_extra = 0;
  bool ver_stream = false, ver_sub = false;
  ver->add_option("--in", ver_in, "CSV square");
  ver->add_option("--fixture", ver_fixture, "Embedded fixture name");
  ver->add_option("--spec", ver_spec, "JSON spec of a virtual square");
  ver->add_option("--degree", ver_degree, "Highest power to check");
  ver->add_option("--checks", ver_checks, "Extra checks: pandiagonal,associative,perfect");
  ver->add_option("--extra-degree", ver_extra, "Highest power for broken/slice diagonals (0 = all)");
  ver->add_flag("--stream", ver_stream, "Stream a spec without materializing it");
  ver->add_flag("--sub5x5", ver_sub, "Also check the 5x5 sub-properties (order 25)");
  ver->add_option("--json", ver_json, "Write the report as JSON ('-' for stdout)");

  auto* st = app.add_subcommand("star", "Star product of two squares");
  std::string star_a, star_b, star_variant = "normalized", star_out;
  unsigned star_verify = 0;
  st->add_option("--a", star_a, "Fixture name or CSV path")->required();
  st->add_option("--b", star_b, "Fixture name or CSV path")->required();
  st->add_option("--variant", star_variant, "normalized or literal");
  st->add_option("--out", star_out, "CSV output path");
  st->add_option("--verify", star_verify, "Verify the product up to this degree");

  auto* fg = app.add_subcommand("findgen", "Search an integer generator matrix and a prime q");
  unsigned fg_n = 0, fg_d = 2;
  std::uint64_t fg_seed = 0, fg_budget = 1'000'000;
  std::string fg_strategy = "random", fg_json;
  fg->add_option("--n", fg_n, "Multimagic degree")->required();
  fg->add_option("--d", fg_d, "Dimension");
  fg->add_option("--seed", fg_seed, "Seed for the random strategy");
  fg->add_option("--strategy", fg_strategy, "random or sequential");
  fg->add_option("--budget", fg_budget, "Candidate budget");
  fg->add_option("--json", fg_json, "Write the result as JSON ('-' for stdout)");

  auto* ob = app.add_subcommand("order-bound", "Degree bound and binomial test for an order");
  std::uint64_t ob_m = 0, ob_sweep = 0;
  ob->add_option("--m", ob_m, "Order");
  ob->add_option("--sweep", ob_sweep, "Cross-check the bound against the binomial test for all m up to this");

  auto* fx = app.add_subcommand("fixtures", "Embedded fixtures");
  auto* fx_list = fx->add_subcommand("list", "List fixtures");
  auto* fx_dump = fx->add_subcommand("dump", "Print a fixture");
  std::string fx_name, fx_format = "csv";
  fx_dump->add_option("name", fx_name, "Fixture name")->required();
  fx_dump->add_option("--format", fx_format, "csv or json");
  fx->require_subcommand(1);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*gen)
      return cmd_gen(out, err, gen_n, gen_q, gen_ring, gen_t, gen_random, gen_seed, gen_order, gen_generator, gen_type,
                     gen_out, gen_spec, gen_virtual);
    if (*ver)
      return cmd_verify(out, ver_in, ver_fixture, ver_spec, ver_degree, ver_checks, ver_stream, ver_json, threads,
                        ver_extra, ver_sub);
    if (*st) return cmd_star(out, star_a, star_b, star_variant, star_out, star_verify, threads);
    if (*fg) return cmd_findgen(out, fg_n, fg_d, fg_seed, fg_strategy, fg_budget, fg_json);
    if (*ob) return cmd_order_bound(out, ob_m, ob_sweep);
    if (*fx) return cmd_fixtures(out, fx_list->parsed(), fx_dump->parsed() ? fx_name : std::string(), fx_format);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const TooLarge& e) {
    err << "error: " << e.what() << " (use --stream)\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kFail;
  }
  return kUsage;
}

}  // namespace multimagic::cli
