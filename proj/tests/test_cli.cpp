#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "matbump/cli.hpp"

using namespace matbump;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = 0;
  std::string out, err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("matbump_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string slurp(const std::string& name) const {
    std::ifstream is(dir_ / name, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
  }

  void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name) << text; }

  // value column of the first CSV row whose name matches
  static double value_of(const std::string& csv, const std::string& name) {
    std::istringstream is(csv);
    std::string line;
    while (std::getline(is, line)) {
      if (line.rfind(name + ",", 0) != 0) continue;
      std::vector<std::string> cols;
      std::stringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) cols.push_back(cell);
      return std::stod(cols.at(6));
    }
    ADD_FAILURE() << "no row " << name << " in\n" << csv;
    return 0.0;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenIdentityPowerWeight) {
  const CliRun r = cli({"gen", "--out", dir_.string(), "--set", "generator={\"kind\":\"power\",\"gamma\":[0,0]}",
                     "--set", "n=2", "--set", "L=3", "--set", "name=flat"});
  ASSERT_EQ(r.code, 0) << r.err;
  const WeightField w = load_mwf1(path("flat.mwf"));
  ASSERT_EQ(w.n, 2);
  for (const SmallMat& m : w.cells)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) EXPECT_EQ(m(i, j), i == j ? 1.0 : 0.0);
  const json prov = json::parse(slurp("flat.json"));
  EXPECT_EQ(prov.at("generator"), "power");
  EXPECT_EQ(json::parse(r.out), prov);
}

TEST_F(Cli, GenRandomIsDeterministic) {
  const std::vector<std::string> common{"gen", "--seed", "7", "--set", "generator={\"kind\":\"random\"}", "--set",
                                        "n=3", "--set", "d=2", "--set", "L=3"};
  auto a = common, b = common;
  a.insert(a.end(), {"--out", dir_.string(), "--set", "name=a"});
  b.insert(b.end(), {"--out", dir_.string(), "--set", "name=b"});
  ASSERT_EQ(cli(a).code, 0);
  ASSERT_EQ(cli(b).code, 0);
  EXPECT_EQ(slurp("a.mwf"), slurp("b.mwf"));
  EXPECT_FALSE(slurp("a.mwf").empty());
}

TEST_F(Cli, ConstantMatchesLibrary) {
  ASSERT_EQ(cli({"gen", "--out", dir_.string(), "--set", "generator={\"kind\":\"power\",\"gamma\":-0.5,\"center\":[0]}",
                 "--set", "L=8", "--set", "name=pw"})
                .code,
            0);
  const CliRun r = cli({"constant", "--set", "constant=ap", "--set", "w=" + path("pw.mwf"), "--set", "p=2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const double lib = matrix_ap(load_mwf1(path("pw.mwf")), 2.0).value;
  EXPECT_TRUE(std::isfinite(lib));
  EXPECT_DOUBLE_EQ(value_of(r.out, "A_p"), lib);
  EXPECT_EQ(r.out.rfind(csv_header() + "\n", 0), 0u);
}

TEST_F(Cli, ConstantIdentityRow) {
  ASSERT_EQ(cli({"gen", "--out", dir_.string(), "--set", "generator={\"kind\":\"identity\"}", "--set", "n=2",
                 "--set", "L=3"})
                .code,
            0);
  const CliRun r = cli({"constant", "--out", dir_.string(), "--set", "constant=ap", "--set", "w=" + path("w.mwf")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(value_of(r.out, "A_p"), 1.0, 1e-12);
  EXPECT_NE(r.out.find("definitional"), std::string::npos);
  EXPECT_EQ(slurp("constants.csv"), r.out);
}

TEST_F(Cli, NormCompareRatioIsOne) {
  ASSERT_EQ(cli({"gen", "--out", dir_.string(), "--set", "generator={\"kind\":\"scalar\",\"values\":[1,4]}",
                 "--set", "L=1"})
                .code,
            0);
  const CliRun r = cli({"norm", "--set", "w=" + path("w.mwf"), "--set", "operator=averaging", "--set", "compare=true",
                     "--budget", "16"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(value_of(r.out, "norm_averaging"), 1.25, 1e-9);
  EXPECT_NEAR(value_of(r.out, "ratio_norm_over_A_pq"), 1.0, 1e-9);
  EXPECT_NE(r.out.find("estimated"), std::string::npos);
}

TEST_F(Cli, VerifyHolderExitsZero) {
  const CliRun r = cli({"verify", "--suite", "holder", "--out", dir_.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
  const json j = json::parse(slurp("holder.json"));
  EXPECT_TRUE(j.at("pass").get<bool>());
  const CliRun rep = cli({"report", "--out", dir_.string()});
  ASSERT_EQ(rep.code, 0) << rep.err;
  EXPECT_NE(rep.out.find("holder,generalized_holder"), std::string::npos);
}

TEST_F(Cli, RejectsBadInput) {
  write("bad.json", R"({"command":"gen","colour":"red"})");
  const CliRun unknown = cli({"gen", "--config", path("bad.json")});
  EXPECT_EQ(unknown.code, 2);
  EXPECT_NE(unknown.err.find("colour"), std::string::npos);
  EXPECT_EQ(cli({"gen", "--census", "everything"}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"constant", "--set", "w=" + path("missing.mwf")}).code, 2);
  EXPECT_EQ(cli({"verify", "--suite", "nope"}).code, 2);
  write("other.json", R"({"command":"norm"})");
  EXPECT_EQ(cli({"gen", "--config", path("other.json")}).code, 2);
}

TEST_F(Cli, FlagsOverrideConfig) {
  write("gen.json", R"({"command":"gen","seed":1,"n":2,"L":3,"generator":{"kind":"random"},"name":"cfg"})");
  ASSERT_EQ(cli({"gen", "--config", path("gen.json"), "--seed", "9", "--out", dir_.string()}).code, 0);
  const json prov = json::parse(slurp("cfg.json"));
  EXPECT_EQ(prov.at("seed").get<int>(), 9);
  ASSERT_EQ(cli({"gen", "--config", path("gen.json"), "--set", "name=set", "--set", "n=1", "--out", dir_.string()})
                .code,
            0);
  EXPECT_EQ(load_mwf1(path("set.mwf")).n, 1);
}

TEST_F(Cli, OutputsAreByteIdentical) {
  ASSERT_EQ(cli({"gen", "--out", dir_.string(), "--seed", "3", "--set", "generator={\"kind\":\"random\"}", "--set",
                 "n=2", "--set", "L=4"})
                .code,
            0);
  const std::vector<std::string> args{"constant", "--set", "w=" + path("w.mwf"), "--set", "constant=bump", "--set",
                                      "phi=power_log(2,4)", "--set", "method=both"};
  const CliRun a = cli(args), b = cli(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("reducing"), std::string::npos);
  const CliRun v1 = cli({"verify", "--suite", "duality", "--trials", "3"});
  const CliRun v2 = cli({"verify", "--suite", "duality", "--trials", "3"});
  EXPECT_EQ(v1.out, v2.out);
}

TEST_F(Cli, ApplyWritesScalarOutput) {
  ASSERT_EQ(cli({"gen", "--out", dir_.string(), "--set", "generator={\"kind\":\"identity\"}", "--set", "L=4"}).code,
            0);
  const CliRun r = cli({"apply", "--out", dir_.string(), "--set", "w=" + path("w.mwf"), "--set", "operator=maximal"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream is(dir_ / "apply.mws", std::ios::binary);
  const ScalarOutput s = read_mws1(is);
  ASSERT_EQ(s.values.size(), 16u);
  for (double x : s.values) EXPECT_NEAR(x, 1.0, 1e-14);
  EXPECT_NEAR(value_of(r.out, "apply_matrix_maximal"), 1.0, 1e-14);
}

#ifdef MATBUMP_CLI_PATH
TEST_F(Cli, BinaryHelpAndExitCodes) {
  const std::string exe = MATBUMP_CLI_PATH;
  const std::string log = path("help.txt");
  EXPECT_EQ(std::system(("\"" + exe + "\" --help > \"" + log + "\"").c_str()), 0);
  EXPECT_NE(slurp("help.txt").find("verify"), std::string::npos);
  const int rc = std::system(("\"" + exe + "\" verify --suite nope 2> \"" + path("err.txt") + "\"").c_str());
  ASSERT_NE(rc, -1);
  EXPECT_EQ(WEXITSTATUS(rc), 2);
}
#endif
