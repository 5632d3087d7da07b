#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ruin/cli.hpp"
#include "ruin/io.hpp"
#include "ruin/markov_exact.hpp"

using namespace ruin;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("ruin_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    unsetenv("RUIN_OUT_DIR");
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "ruin");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    ::testing::internal::CaptureStdout();
    ::testing::internal::CaptureStderr();
    const int rc = cli::run(static_cast<int>(argv.size()), argv.data());
    out_ = ::testing::internal::GetCapturedStdout();
    err_ = ::testing::internal::GetCapturedStderr();
    return rc;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }

  fs::path dir_;
  std::string out_, err_;
};

}  // namespace

TEST_F(CliTest, PmfExactCsv) {
  ASSERT_EQ(run({"pmf", "--p", "1/2", "--k", "2", "--horizon", "12", "--mode", "exact", "--format", "csv", "--out",
                 path("pmf.csv")}),
            cli::kOk);
  EXPECT_EQ(slurp(path("pmf.csv")), "n,prob\n2,1/2\n4,1/4\n6,1/8\n8,1/16\n10,1/32\n12,1/64\n");
  EXPECT_NE(out_.find("pmf:"), std::string::npos);
  EXPECT_EQ(out_.find('\n'), out_.size() - 1);  // one summary line
}

TEST_F(CliTest, PmfToStdoutWhenNoPathGiven) {
  ASSERT_EQ(run({"pmf", "--p", "3/5", "--k", "2", "--horizon", "2"}), cli::kOk);
  EXPECT_EQ(out_, "n,prob\n2,13/25\n");
  EXPECT_NE(err_.find("truncation_mass=12/25"), std::string::npos);
}

TEST_F(CliTest, OutputDirectoryFromEnvironment) {
  setenv("RUIN_OUT_DIR", dir_.c_str(), 1);
  ASSERT_EQ(run({"winprob", "--p", "0.6", "--k", "2", "--format", "json"}), cli::kOk);
  unsetenv("RUIN_OUT_DIR");
  auto j = io::Json::parse(slurp(path("winprob.json")));
  EXPECT_EQ(j["summary"]["win_prob"], "9/13");
  EXPECT_EQ(j["command"], "winprob");
}

TEST_F(CliTest, ArtifactsRoundTrip) {
  ASSERT_EQ(run({"pmf", "--p", "2/5", "--k", "3", "--horizon", "25", "--format", "json", "--out", path("a.json")}), cli::kOk);
  ASSERT_EQ(run({"pmf", "--p", "2/5", "--k", "3", "--horizon", "25", "--out", path("a.csv")}), cli::kOk);
  ASSERT_EQ(run({"pmf", "--p", "0.4", "--k", "3", "--horizon", "25", "--mode", "float", "--format", "json", "--out",
                 path("f.json")}),
            cli::kOk);
  const auto exact = duration_pmf(WalkParams<Rational>{Rational(2, 5), 3}, 25);
  const auto from_json = io::dist_from_json<Rational>(io::Json::parse(slurp(path("a.json"))));
  EXPECT_EQ(from_json.pmf, exact.pmf);
  EXPECT_EQ(from_json.truncation_mass, exact.truncation_mass);
  const auto from_csv = io::dist_from_csv<Rational>(io::parse_csv(slurp(path("a.csv"))), 3);
  for (int n = 0; n <= 25; ++n) EXPECT_EQ(from_csv.prob(n), exact.prob(n));
  const auto fl = io::dist_from_json<double>(io::Json::parse(slurp(path("f.json"))));
  EXPECT_EQ(fl.pmf, duration_pmf(WalkParams<double>{0.4, 3}, 25).pmf);
}

TEST_F(CliTest, DominanceSweepIsOrdered) {
  ASSERT_EQ(run({"dominance", "--k", "3", "--p-grid", "0.05:0.5:0.05", "--n-max", "auto", "--out", path("d.csv")}),
            cli::kOk);
  EXPECT_NE(out_.find("ordered"), std::string::npos);
  const auto t = io::parse_csv(slurp(path("d.csv")));
  EXPECT_EQ(t.header().size(), 11u);
  EXPECT_EQ(t.header()[1], "p=1/20");
}

TEST_F(CliTest, BrownianSweep) {
  ASSERT_EQ(run({"bm-sweep", "--k", "1", "--mu", "0:2:0.25", "--t", "0.25,0.5,1,2,4", "--out", path("s.csv")}), cli::kOk);
  const auto t = io::parse_csv(slurp(path("s.csv")));
  EXPECT_EQ(t.rows().size(), 5u);
  EXPECT_EQ(t.header().size(), 10u);
  EXPECT_NE(out_.find("status=ordered"), std::string::npos);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run({}), cli::kUsageError);
  EXPECT_EQ(run({"frobnicate"}), cli::kUsageError);
  EXPECT_EQ(run({"pmf", "--p", "abc", "--k", "2", "--horizon", "4"}), cli::kUsageError);
  EXPECT_NE(err_.find("malformed"), std::string::npos);
  EXPECT_EQ(run({"pmf", "--p", "3/2", "--k", "2", "--horizon", "4"}), cli::kUsageError);
  EXPECT_EQ(run({"pmf", "--p", "1/2", "--k", "2", "--horizon", "4", "--format", "xml"}), cli::kUsageError);
  EXPECT_EQ(run({"pmf", "--p", "1/2", "--k", "2", "--horizon", "4", "--out", path("missing/dir/x.csv")}), cli::kUsageError);
  EXPECT_EQ(run({"karni", "--p", "0.5", "--k", "2", "--n", "8"}), cli::kUsageError);
  EXPECT_EQ(run({"schedule", "--k", "1"}), cli::kUsageError);
  EXPECT_EQ(run({"dominance", "--k", "3"}), cli::kUsageError);
  EXPECT_EQ(run({"--help"}), cli::kOk);
}

TEST_F(CliTest, PropertyViolationExitCode) {
  // The printed five-term binomial bracket drifts from the exact law past n = 5k+1.
  EXPECT_EQ(run({"xval", "--p", "0.4", "--k", "3", "--n-max", "41", "--out", path("x.csv")}), cli::kPropertyViolated);
  EXPECT_NE(out_.find("status=mismatch"), std::string::npos);
  EXPECT_EQ(run({"xval", "--p", "0.4", "--k", "3", "--n-max", "41", "--terms", "image-series", "--out", path("y.csv")}),
            cli::kOk);
  // Reversed Monte Carlo dominance: the sample with p = 1/2 must be the longer one.
  EXPECT_EQ(run({"dominance", "--method", "mc", "--k", "4", "--p", "0.1", "--p-prime", "0.5", "--trials", "20000",
                 "--out", path("m.csv")}),
            cli::kOk);
}

TEST_F(CliTest, StochasticOutputIsByteDeterministic) {
  const std::vector<std::string> base{"simulate", "--p", "0.45", "--k", "4", "--trials", "30000"};
  auto a = base, b = base, c = base;
  a.insert(a.end(), {"--seed", "9", "--workers", "1", "--out", path("a.csv")});
  b.insert(b.end(), {"--seed", "9", "--workers", "4", "--out", path("b.csv")});
  c.insert(c.end(), {"--seed", "10", "--out", path("c.csv")});
  ASSERT_EQ(run(a), cli::kOk);
  ASSERT_EQ(run(b), cli::kOk);
  ASSERT_EQ(run(c), cli::kOk);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_NE(slurp(path("a.csv")), slurp(path("c.csv")));

  for (const char* w : {"1", "3"}) {
    ASSERT_EQ(run({"couple", "--p", "0.2", "--p-prime", "0.5", "--k", "4", "--trials", "20000", "--workers", w,
                   "--format", "json", "--out", path(std::string("c") + w + ".json")}),
              cli::kOk);
  }
  EXPECT_EQ(slurp(path("c1.json")), slurp(path("c3.json")));
}

TEST_F(CliTest, ConfigFileWithOverrides) {
  {
    std::ofstream f(path("run.toml"));
    f << "[hazards]\np = \"3/10\"\nk = 3\nn-max = \"6\"\n";
  }
  ASSERT_EQ(run({"hazards", "--config", path("run.toml"), "--n-max", "3", "--out", path("h.csv")}), cli::kOk);
  EXPECT_EQ(slurp(path("h.csv")), "n,y_prev,d,r\n1,0,1,0/1\n2,1,2,37/58\n3,1,2,37/58\n");
}

TEST_F(CliTest, RemainingSubcommandsRun) {
  const std::vector<std::vector<std::string>> cmds{
      {"tail", "--p", "1/2", "--k", "2", "--n", "0:6:2"},
      {"joint", "--p", "2/5", "--k", "3", "--horizon", "15"},
      {"mean", "--p", "1/2", "--k", "3"},
      {"feller", "--p", "0.3", "--k", "3", "--n", "3:21:2"},
      {"karni", "--p", "0.5", "--k", "2", "--n", "10,12", "--terms", "image-series"},
      {"uchain", "--p", "1/2", "--k", "4"},
      {"returnprob", "--p", "3/10", "--k", "2"},
      {"decomp-geo", "--p", "3/10", "--k", "3", "--horizon", "21"},
      {"schedule", "--k", "4", "--n-max", "6"},
      {"decomp-sub", "--p", "0.35", "--k", "4", "--horizon", "40", "--mode", "float"},
      {"evenk", "--p", "3/10", "--k", "4", "--horizon", "20"},
      {"couple", "--p", "0.2", "--p-prime", "0.4", "--k", "3", "--trials", "5000", "--full"},
      {"bm-density", "--mu", "0.5", "--k", "1", "--t", "0.5,1,2"},
      {"bm-tail", "--mu", "2", "--k", "1", "--t", "10"},
      {"bm-converge", "--mu", "0.5", "--k", "1"},
  };
  for (auto c : cmds) {
    const std::string name = c.front();
    c.insert(c.end(), {"--out", path(name + ".csv")});
    EXPECT_EQ(run(c), cli::kOk) << name << ": " << err_;
    EXPECT_TRUE(fs::exists(path(name + ".csv"))) << name;
  }
  EXPECT_EQ(slurp(path("uchain.csv")), "i,u,residual\n1,1/3,0/1\n2,1/4,0/1\n3,0/1,\n");
  EXPECT_EQ(slurp(path("schedule.csv")), "i,y,d\n0,0,\n1,1,1\n2,2,3\n3,0,2\n4,1,1\n5,2,3\n6,0,2\n");
}
