#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "mcgauge/cli.hpp"
#include "support.hpp"

using namespace mcg;
using io::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "mcgauge");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("mcgauge_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string fixture(const std::string& kind, std::vector<std::string> extra = {}) {
    const std::string p = path(kind + ".json");
    std::vector<std::string> args{"fixtures", "--kind", kind, "--output", p};
    args.insert(args.end(), extra.begin(), extra.end());
    const Result r = run_cli(args);
    EXPECT_EQ(r.code, 0) << r.err;
    return p;
  }

  std::string write_form(const std::string& name, const PolyForm& f) {
    const std::string p = path(name);
    std::ofstream(p) << io::dump(io::to_json(f));
    return p;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, CheckFlatOnFlatAndCurvedInput) {
  const Result flat = run_cli({"check-flat", "--input", fixture("constant"), "--output", path("r.json")});
  EXPECT_EQ(flat.code, 0);
  EXPECT_NE(flat.out.find("FLAT"), std::string::npos);
  EXPECT_EQ(json::parse(slurp(path("r.json")))["max_curvature_coefficient"], 0.0);

  const Result curved = run_cli({"check-flat", "--input", fixture("nonflat-witness"), "--output", path("r2.json")});
  EXPECT_EQ(curved.code, 1);
  const json rep = json::parse(slurp(path("r2.json")));
  EXPECT_EQ(rep["flat"], false);
  EXPECT_EQ(rep["max_curvature_coefficient"], 1.0);
  EXPECT_FALSE(rep["worst_coefficients"].empty());
}

TEST_F(Cli, CheckFlatOnGaugeFixture) {
  const std::string f = fixture("nilpotent-gauge", {"--algebra", "vect_pi:2", "--n", "2", "--seed", "5"});
  EXPECT_EQ(run_cli({"check-flat", "--input", f}).code, 0);
}

TEST_F(Cli, HomotopyVerifyReportsConvergence) {
  const std::string f = fixture("random-cylinder", {"--algebra", "gl:2:1", "--n", "2", "--seed", "3"});
  const Result r = run_cli({"homotopy-verify", "--input", f, "--steps", "16", "--samples", "lattice:-1:1:4", "--output",
                            path("h.json")});
  const json rep = json::parse(slurp(path("h.json")));
  const double ratio = rep["convergence"][0]["ratio_to_next"];
  EXPECT_GT(ratio, 12.0);
  EXPECT_LT(ratio, 20.0);
  EXPECT_EQ(rep["samples"].size(), 16u);  // 4 per axis
  EXPECT_EQ(r.code, rep["summary"]["max_residual"].get<double>() <= 1e-6 ? 0 : 1);

  const Result fine = run_cli({"homotopy-verify", "--input", f, "--steps", "256", "--samples", "3"});
  EXPECT_EQ(fine.code, 0) << fine.out;
}

TEST_F(Cli, HomotopyVerifyToleranceFailure) {
  const std::string f = fixture("random-cylinder", {"--algebra", "gl:2:1", "--n", "2", "--seed", "3"});
  const Result r = run_cli({"homotopy-verify", "--input", f, "--steps", "2", "--samples", "2", "--residual-tol", "1e-14"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
}

TEST_F(Cli, PrimitiveOnConstantAndAbelianInput) {
  const Result c = run_cli({"primitive", "--input", fixture("constant"), "--output", path("c.json"), "--dump-jets"});
  EXPECT_EQ(c.code, 0);
  const json rc = json::parse(slurp(path("c.json")));
  EXPECT_EQ(rc["C"]["odd"][0][1], 1.0);
  EXPECT_EQ(rc["summary"]["max_reconstruction_residual"], 0.0);
  EXPECT_TRUE(rc["samples"][0].contains("g"));

  const Result a = run_cli({"primitive", "--input", fixture("abelian-df"), "--output", path("a.json"), "--base", "0,0"});
  EXPECT_EQ(a.code, 0);
  const json ra = json::parse(slurp(path("a.json")));
  EXPECT_EQ(ra["C"]["even"][0][0], 0.0);
  EXPECT_LE(ra["summary"]["max_reconstruction_residual"].get<double>(), 1e-9);
}

TEST_F(Cli, PrimitiveOnCurvedInputIsHypothesisViolation) {
  const Result r = run_cli({"primitive", "--input", fixture("nonflat-witness"), "--output", path("p.json")});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("witness"), std::string::npos);
  const json rep = json::parse(slurp(path("p.json")));
  EXPECT_FALSE(rep["witness"].get<std::string>().empty());
}

TEST_F(Cli, AlgebroidNormalize) {
  const Result a = run_cli({"algebroid-normalize", "--input", fixture("atiyah-aff1"), "--output", path("a.json")});
  EXPECT_EQ(a.code, 0) << a.out << a.err;
  const json rep = json::parse(slurp(path("a.json")));
  EXPECT_EQ(rep["C_struct"][0][1][1], 1.0);
  EXPECT_EQ(rep["base_mismatch"], 0.0);

  EXPECT_EQ(run_cli({"algebroid-normalize", "--input", fixture("heisenberg"), "--samples", "lattice:-1:1:4"}).code, 0);

  const Result bad = run_cli({"algebroid-normalize", "--input", fixture("jacobi-violation", {"--n", "1"}), "--output",
                              path("j.json")});
  EXPECT_EQ(bad.code, 3);
  EXPECT_NE(json::parse(slurp(path("j.json")))["witness"].get<std::string>().find("Jacobi"), std::string::npos);
}

TEST_F(Cli, ReportsAreBitIdentical) {
  const std::string f = fixture("nilpotent-gauge", {"--algebra", "gl:2:1", "--n", "2", "--seed", "9"});
  const std::vector<std::string> args{"primitive", "--input", f, "--samples", "random:5", "--seed", "4", "--steps", "64"};
  auto with_output = [&](const std::string& o) {
    auto a = args;
    a.push_back("--output");
    a.push_back(o);
    return a;
  };
  const Result r1 = run_cli(with_output(path("1.json")));
  const Result r2 = run_cli(with_output(path("2.json")));
  EXPECT_EQ(r1.code, 0);
  EXPECT_EQ(slurp(path("1.json")), slurp(path("2.json")));
  EXPECT_EQ(r1.out, r2.out);
}

TEST_F(Cli, FixturesAreDeterministic) {
  const std::string a = fixture("nilpotent-gauge", {"--seed", "7"});
  const std::string first = slurp(a);
  fixture("nilpotent-gauge", {"--seed", "7"});
  EXPECT_EQ(slurp(a), first);
}

TEST_F(Cli, InputErrors) {
  std::ofstream(path("broken.json")) << "{\"n\": 2,";
  const Result broken = run_cli({"check-flat", "--input", path("broken.json")});
  EXPECT_EQ(broken.code, 2);
  EXPECT_NE(broken.err.find("byte"), std::string::npos);
  EXPECT_EQ(run_cli({"check-flat", "--input", path("missing.json")}).code, 2);
  EXPECT_EQ(run_cli({"primitive", "--input", fixture("constant"), "--samples", "bogus:3"}).code, 2);
  EXPECT_EQ(run_cli({"primitive", "--input", fixture("constant"), "--scheme", "euler"}).code, 2);
  EXPECT_EQ(run_cli({"primitive", "--input", fixture("constant"), "--steps", "0"}).code, 2);
  EXPECT_EQ(run_cli({"primitive", "--input", fixture("constant"), "--base", "1"}).code, 2);
  EXPECT_EQ(run_cli({"fixtures", "--kind", "nope", "--output", path("x.json")}).code, 2);
  EXPECT_EQ(run_cli({"fixtures", "--kind", "constant", "--output", path("x.json"), "--algebra", "sl:2"}).code, 2);
  EXPECT_EQ(run_cli({"check-flat"}).code, 2);
  EXPECT_EQ(run_cli({}).code, 2);
}

TEST_F(Cli, PrimitiveRejectsCylinderInput) {
  const std::string f = fixture("random-cylinder", {"--n", "1"});
  EXPECT_EQ(run_cli({"primitive", "--input", f}).code, 2);
}

TEST_F(Cli, SampleSpecifications) {
  const std::string f = fixture("constant", {"--n", "2"});
  for (const std::string s : {"random:3", "random:3:-2:2", "lattice:-1:1:9", "explicit:0.1,0.2;0.3,0.4", "4"}) {
    const Result r = run_cli({"primitive", "--input", f, "--samples", s, "--output", path("s.json")});
    EXPECT_EQ(r.code, 0) << s << r.err;
  }
  EXPECT_EQ(run_cli({"primitive", "--input", f, "--samples", "explicit:0.1"}).code, 2);
  const json rep = json::parse(slurp(path("s.json")));
  EXPECT_EQ(rep["samples"].size(), 4u);
}

TEST_F(Cli, Selftest) {
  const Result r = run_cli({"selftest", "--output", path("self.json")});
  EXPECT_EQ(r.code, 0) << r.out;
  for (const auto& c : json::parse(slurp(path("self.json")))["checks"]) EXPECT_TRUE(c["pass"].get<bool>()) << c.dump();
}
