#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "multimagic/multimagic.hpp"

using namespace multimagic;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "multimagic");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("multimagic-cli-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "-" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, GenReproducesHeathFixture) {
  auto gen = run({"gen", "--n", "2", "--q", "3", "--t", "2,1,2,0"});
  ASSERT_EQ(gen.code, cli::kPass) << gen.err;
  auto dump = run({"fixtures", "dump", "heath-9"});
  ASSERT_EQ(dump.code, cli::kPass);
  EXPECT_EQ(gen.out, dump.out);
  EXPECT_NE(gen.err.find("certification"), std::string::npos);
  EXPECT_NE(gen.err.find("order: 9"), std::string::npos);
}

TEST_F(CliTest, GenVirtualWritesOnlySpec) {
  auto r = run({"gen", "--n", "3", "--q", "5", "--virtual", "--spec", path("out.json")});
  ASSERT_EQ(r.code, cli::kPass) << r.err;
  EXPECT_NE(r.out.find("order: 125"), std::string::npos);
  EXPECT_EQ(r.out.find(",1"), std::string::npos);
  auto spec = io::spec_from_json(io::json::parse(slurp(path("out.json"))));
  EXPECT_EQ(spec.side(), 125u);
  auto v = run({"verify", "--spec", path("out.json"), "--stream", "--degree", "3"});
  EXPECT_EQ(v.code, cli::kPass) << v.out;
}

TEST_F(CliTest, GenRefusesOneByOneBlocksOverF3) {
  auto r = run({"gen", "--n", "1", "--q", "3"});
  EXPECT_EQ(r.code, cli::kFail);
  EXPECT_NE(r.err.find("no certifiable 2x2 generator over gf:3"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("81 matrices"), std::string::npos);
}

TEST_F(CliTest, GenSeedsAreReproducible) {
  auto a = run({"gen", "--n", "2", "--q", "7", "--random-t", "--seed", "11"});
  auto b = run({"gen", "--n", "2", "--q", "7", "--random-t", "--seed", "11"});
  auto c = run({"gen", "--n", "2", "--q", "7", "--random-t", "--seed", "12"});
  ASSERT_EQ(a.code, cli::kPass);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
}

TEST_F(CliTest, GenFileOutputsVerify) {
  auto r = run({"gen", "--n", "2", "--q", "5", "--t", "1,2,3,4", "--out", path("sq.csv"), "--spec", path("sq.json")});
  ASSERT_EQ(r.code, cli::kPass) << r.err;
  EXPECT_EQ(run({"verify", "--in", path("sq.csv"), "--degree", "2"}).code, cli::kPass);
  EXPECT_EQ(run({"verify", "--spec", path("sq.json"), "--degree", "2", "--stream"}).code, cli::kPass);
  EXPECT_EQ(run({"verify", "--in", path("sq.csv"), "--degree", "3"}).code, cli::kFail);
  auto spec = io::spec_from_json(io::json::parse(slurp(path("sq.json"))));
  std::ifstream csv(path("sq.csv"));
  EXPECT_EQ(materialize(VirtualHypercube(spec)), io::read_csv(csv));
}

TEST_F(CliTest, GenFromGeneratorFileAndOtherRings) {
  {
    std::ofstream f(path("g.json"));
    f << io::to_json(fixtures::generator("cube-n1-d3").generator(11)).dump();
  }
  auto cube = run({"gen", "--generator", path("g.json"), "--out", path("cube.csv")});
  ASSERT_EQ(cube.code, cli::kPass) << cube.err;
  EXPECT_NE(cube.out.find("dimension 3"), std::string::npos);
  EXPECT_EQ(run({"verify", "--in", path("cube.csv")}).code, cli::kPass);

  auto gf4 = run({"gen", "--n", "2", "--q", "4", "--t", "0,1,1,0"});
  ASSERT_EQ(gf4.code, cli::kPass) << gf4.err;
  EXPECT_EQ(gf4.out, run({"fixtures", "dump", "ex55-16"}).out);

  {
    std::ofstream f(path("bad.json"));
    f << R"({"ring":"gf:5","n":1,"d":2,"rows":[[1,0],[0,1]]})";
  }
  auto bad = run({"gen", "--generator", path("bad.json")});
  EXPECT_EQ(bad.code, cli::kFail);
  EXPECT_NE(bad.err.find("minor"), std::string::npos) << bad.err;

  {
    std::ofstream f(path("junk.json"));
    f << "{not json";
  }
  EXPECT_EQ(run({"gen", "--generator", path("junk.json")}).code, cli::kUsage);
  EXPECT_EQ(run({"gen", "--q", "5"}).code, cli::kUsage);
  EXPECT_EQ(run({"gen", "--n", "2", "--q", "5", "--t", "1,2"}).code, cli::kUsage);
}

TEST_F(CliTest, VerifyFixtures) {
  EXPECT_EQ(run({"verify", "--fixture", "pfeffermann-8", "--degree", "2"}).code, cli::kPass);
  auto three = run({"verify", "--fixture", "pfeffermann-8", "--degree", "3"});
  EXPECT_EQ(three.code, cli::kFail);
  EXPECT_NE(three.out.find("degree 3"), std::string::npos);
  auto ex57 = run({"verify", "--fixture", "ex57-25"});
  EXPECT_EQ(ex57.code, cli::kPass) << ex57.out;
  EXPECT_NE(ex57.out.find("5x5 blocks pandiagonal: ok"), std::string::npos);
  EXPECT_EQ(run({"verify", "--fixture", "ex57-25", "--checks", "pandiagonal", "--degree", "2"}).code, cli::kFail);
  EXPECT_EQ(run({"verify", "--fixture", "ex57-25", "--checks", "pandiagonal", "--degree", "2", "--extra-degree", "1"}).code,
            cli::kPass);
  EXPECT_EQ(run({"--threads", "2", "verify", "--fixture", "ex55-16"}).code, cli::kPass);
}

TEST_F(CliTest, VerifyJsonReport) {
  auto r = run({"verify", "--fixture", "pfeffermann-8", "--degree", "3", "--json", "-"});
  const auto start = r.out.find('{');
  ASSERT_NE(start, std::string::npos);
  auto j = io::json::parse(r.out.substr(start));
  EXPECT_EQ(j["passed"], false);
  EXPECT_EQ(j["degrees"][0]["magic_sum"], "260");
  EXPECT_EQ(j["degrees"][1]["magic_sum"], "11180");
  EXPECT_EQ(j["degrees"][2]["passed"], false);

  ASSERT_EQ(run({"verify", "--fixture", "ex57-25", "--json", path("r.json")}).code, cli::kPass);
  auto file = io::json::parse(slurp(path("r.json")));
  EXPECT_EQ(file["sub5x5"]["blocks"], true);
}

TEST_F(CliTest, VerifyUsageErrors) {
  EXPECT_EQ(run({"verify"}).code, cli::kUsage);
  EXPECT_EQ(run({"verify", "--fixture", "ex56-9", "--in", "x.csv"}).code, cli::kUsage);
  EXPECT_EQ(run({"verify", "--fixture", "ex56-9", "--checks", "bogus"}).code, cli::kUsage);
  EXPECT_EQ(run({"verify", "--in", path("missing.csv")}).code, cli::kUsage);
  {
    std::ofstream f(path("ragged.csv"));
    f << "1,2\n3\n";
  }
  EXPECT_EQ(run({"verify", "--in", path("ragged.csv")}).code, cli::kUsage);
  EXPECT_EQ(run({"verify", "--fixture", "no-such-square"}).code, cli::kFail);
}

TEST_F(CliTest, VerifyOversizeNeedsStream) {
  ASSERT_EQ(run({"gen", "--n", "2", "--q", "7", "--virtual", "--spec", path("s.json")}).code, cli::kPass);
  ::setenv("MULTIMAGIC_MAX_CELLS", "1000", 1);
  auto dense = run({"verify", "--spec", path("s.json"), "--degree", "2"});
  auto streamed = run({"verify", "--spec", path("s.json"), "--degree", "2", "--stream"});
  ::unsetenv("MULTIMAGIC_MAX_CELLS");
  EXPECT_EQ(dense.code, cli::kUsage);
  EXPECT_NE(dense.err.find("--stream"), std::string::npos);
  EXPECT_EQ(streamed.code, cli::kPass);
}

TEST_F(CliTest, VerifyStreamedDegreeFour) {
  ASSERT_EQ(run({"gen", "--n", "4", "--q", "7", "--virtual", "--spec", path("n4q7.json")}).code, cli::kPass);
  auto r = run({"verify", "--spec", path("n4q7.json"), "--stream", "--degree", "4"});
  EXPECT_EQ(r.code, cli::kPass) << r.out;
  EXPECT_NE(r.out.find("530346399165225564147884368641"), std::string::npos);
}

TEST_F(CliTest, Star) {
  auto r = run({"star", "--a", "pfeffermann-8", "--b", "pfeffermann-8", "--verify", "2"});
  EXPECT_EQ(r.code, cli::kPass);
  EXPECT_NE(r.out.find("order: 64"), std::string::npos);
  ASSERT_EQ(run({"star", "--a", "ex56-9", "--b", "ex55-16", "--out", path("p.csv")}).code, cli::kPass);
  EXPECT_EQ(run({"verify", "--in", path("p.csv"), "--degree", "2"}).code, cli::kPass);
  auto literal = run({"star", "--a", "ex56-9", "--b", "ex56-9", "--variant", "literal", "--verify", "1"});
  EXPECT_EQ(literal.code, cli::kFail);
  EXPECT_NE(literal.out.find("normal: no"), std::string::npos);
  EXPECT_EQ(run({"star", "--a", "ex56-9", "--b", "ex56-9", "--variant", "other"}).code, cli::kUsage);
  EXPECT_EQ(run({"star", "--a", "ex56-9"}).code, cli::kUsage);
}

TEST_F(CliTest, FindgenDeterministicAndRecertified) {
  auto a = run({"findgen", "--n", "1", "--d", "3", "--seed", "7", "--json", "-"});
  auto b = run({"findgen", "--n", "1", "--d", "3", "--seed", "7", "--json", "-"});
  ASSERT_EQ(a.code, cli::kPass) << a.err;
  EXPECT_EQ(a.out, b.out);
  auto j = io::json::parse(a.out.substr(a.out.find('{')));
  auto g = io::generator_from_json(j["generator"]);
  EXPECT_TRUE(verify_generator(g).passed);
  EXPECT_EQ(g.ring.size(), j["q"].get<std::uint64_t>());
  auto ring = FiniteRing::modular(j["q"].get<std::uint64_t>());
  EXPECT_EQ(RingMatrix::from_ints(ring, j["rows"].get<std::vector<std::vector<std::int64_t>>>()), g.X);
  EXPECT_EQ(run({"findgen", "--n", "2", "--strategy", "sequential"}).code, cli::kPass);
  EXPECT_EQ(run({"findgen", "--n", "1", "--strategy", "bogus"}).code, cli::kUsage);
  EXPECT_EQ(run({"findgen", "--d", "2"}).code, cli::kUsage);
  EXPECT_EQ(run({"findgen", "--n", "2", "--d", "3", "--budget", "2"}).code, cli::kFail);
}

TEST_F(CliTest, OrderBound) {
  auto r = run({"order-bound", "--m", "6"});
  EXPECT_EQ(r.code, cli::kPass);
  EXPECT_EQ(r.out.rfind("max possible degree: 2\n", 0), 0u);
  EXPECT_NE(r.out.find("3  no"), std::string::npos);
  auto sweep = run({"order-bound", "--sweep", "100"});
  EXPECT_EQ(sweep.code, cli::kPass);
  EXPECT_NE(sweep.out.find(": 0 counterexamples"), std::string::npos);
  auto large = run({"order-bound", "--m", "62748517"});
  EXPECT_EQ(large.code, cli::kPass);
  EXPECT_NE(large.out.find("max possible degree: 815730719"), std::string::npos);
  EXPECT_NE(large.out.find("truncated"), std::string::npos);
  EXPECT_EQ(run({"order-bound"}).code, cli::kUsage);
  EXPECT_EQ(run({"order-bound", "--m", "1"}).code, cli::kFail);
}

TEST_F(CliTest, Fixtures) {
  auto list = run({"fixtures", "list"});
  EXPECT_EQ(list.code, cli::kPass);
  for (const char* name : {"pfeffermann-8", "heath-9", "ex56-9", "ex55-16", "ex57-25", "cube-n1-d3", "square-n3-d2"})
    EXPECT_NE(list.out.find(name), std::string::npos) << name;
  auto j = io::json::parse(run({"fixtures", "dump", "ex57-25", "--format", "json"}).out);
  EXPECT_EQ(j["order"], 25);
  auto spec = io::spec_from_json(j["spec"]);
  EXPECT_EQ(materialize(VirtualHypercube(spec)), fixtures::square("ex57-25").square());
  auto g = io::json::parse(run({"fixtures", "dump", "cube-n2-d3"}).out);
  EXPECT_EQ(g["d"], 3);
  EXPECT_EQ(run({"fixtures", "dump", "ex56-9", "--format", "xml"}).code, cli::kUsage);
  EXPECT_EQ(run({"fixtures", "dump", "nope"}).code, cli::kFail);
}

TEST_F(CliTest, TopLevelUsage) {
  EXPECT_EQ(run({}).code, cli::kUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kUsage);
  auto help = run({"--help"});
  EXPECT_EQ(help.code, cli::kPass);
  EXPECT_NE(help.out.find("order-bound"), std::string::npos);
}
