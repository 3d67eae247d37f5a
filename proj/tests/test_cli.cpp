#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "nsbound/cli.hpp"

using namespace nsbound;

namespace {

struct Outcome {
  int code = -1;
  std::string out, err;
  nlohmann::json doc;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "nsbound");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Outcome o;
  o.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  o.out = out.str();
  o.err = err.str();
  if (o.code == 0 && !o.out.empty() && o.out[0] == '{') o.doc = nlohmann::json::parse(o.out);
  return o;
}

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST(Cli, ErrorCommand) {
  const auto bsc_file = write_temp("cli_bsc.json", R"({"matrix":[[0.9,0.1],[0.1,0.9]]})");
  const auto o = run({"error", "--channel", bsc_file, "-M", "2"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_DOUBLE_EQ(o.doc["results"]["p_err"].get<double>(), 0.1);
  EXPECT_EQ(o.doc["mode"], "float");
  EXPECT_EQ(o.doc["channel"]["fingerprint"].get<std::string>().substr(0, 4), "2x2:");
  EXPECT_EQ(run({"error", "--channel", bsc_file}).code, 2);
}

TEST(Cli, SizeCommandOnUselessChannel) {
  const auto f = write_temp("cli_useless.json", R"({"matrix":[[0.5,0.5],[0.5,0.5]]})");
  const auto o = run({"size", "--channel", f, "--eps", "0.75"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_NEAR(o.doc["results"]["M_beta"].get<double>(), 4, 1e-12);
  EXPECT_EQ(o.doc["results"]["M_NS"], 4);
}

TEST(Cli, UsageAndInputErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"size", "--standard", "bsc:0.1", "--eps", "0.1", "--format", "xml"}).code, 2);
  EXPECT_EQ(run({"size", "--standard", "bsc:0.1", "--eps", "abc"}).code, 2);
  EXPECT_EQ(run({"size", "--standard", "bsc:0.1"}).code, 2);
  EXPECT_EQ(run({"capacity", "--channel", "/nonexistent.json"}).code, 2);
  EXPECT_EQ(run({"capacity", "--standard", "bsc:0.1", "--exact"}).code, 2);
  EXPECT_EQ(run({"capacity"}).code, 2);
  const auto bad = write_temp("cli_bad.json", R"({"matrix":[[0.9,0.2],[0.1,0.9]]})");
  const auto o = run({"capacity", "--channel", bad});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("RowSumMismatch"), std::string::npos);
}

TEST(Cli, SolverLimitsExitThree) {
  const auto o = run({"size", "--standard", "bsc:0.1", "--power", "30", "--eps", "0.1"});
  EXPECT_EQ(o.code, 3);
  EXPECT_NE(o.err.find("--types"), std::string::npos);
}

TEST(Cli, ReportsAreDeterministicApartFromTiming) {
  const std::vector<std::string> args{"size", "--standard", "bsc:0.11", "--power", "12", "--types", "--eps", "0.05"};
  auto a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0);
  a.doc.erase("timing");
  b.doc.erase("timing");
  EXPECT_EQ(a.doc.dump(), b.doc.dump());
  EXPECT_EQ(a.doc["solver"]["joint_types"], 455);
}

TEST(Cli, ExactModeEchoesFractions) {
  const auto o = run({"size", "--standard", "bsc:0.1", "--eps", "0.1", "--exact"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.doc["mode"], "exact");
  EXPECT_EQ(o.doc["results"]["M_beta"], "2");
  const auto z = run({"zero-error", "--standard", "typewriter:5:0.5", "--exact"});
  EXPECT_EQ(z.doc["results"]["alpha_star"], "5/2");
  EXPECT_EQ(z.doc["results"]["M0"], 2);
}

TEST(Cli, CertifyRoundTrip) {
  const std::string path = ::testing::TempDir() + "cli_size_report.json";
  ASSERT_EQ(run({"size", "--standard", "bsc:0.2", "--power", "2", "--eps", "0.1", "--out", path}).code, 0);
  auto ok = run({"certify", "--standard", "bsc:0.2", "--power", "2", "--eps", "0.1", "--cert", path});
  ASSERT_EQ(ok.code, 0) << ok.err;
  EXPECT_TRUE(ok.doc["results"]["valid"].get<bool>());

  std::ifstream in(path);
  auto doc = nlohmann::json::parse(in);
  auto cert = doc["results"]["certificate"];
  cert["c"][0] = 0.0;
  const auto tampered = write_temp("cli_tampered.json", cert.dump());
  auto bad = run({"certify", "--standard", "bsc:0.2", "--power", "2", "--eps", "0.1", "--cert", tampered});
  ASSERT_EQ(bad.code, 0);
  EXPECT_FALSE(bad.doc["results"]["valid"].get<bool>());
  EXPECT_GT(bad.doc["results"]["violation_count"].get<int>(), 0);
}

TEST(Cli, SweepCsv) {
  auto o = run({"sweep", "--standard", "noiseless:2", "--eps", "0.1", "--n", "1,2,3", "--format", "csv"});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto rows = parse_sweep_csv(o.out);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    EXPECT_GE(r.rate, 1.0);
    EXPECT_NEAR(r.log2_M_beta, r.n - std::log2(0.9), 1e-9);
  }
  EXPECT_EQ(sweep_csv(rows), o.out);

  o = run({"sweep", "--standard", "bsc:0.1", "--eps", "0.5", "--n", "1", "--format", "csv"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_NEAR(parse_sweep_csv(o.out)[0].normal_approx, 0.531004, 1e-6);

  EXPECT_EQ(run({"sweep", "--standard", "bsc:0.1", "--eps", "0.1", "--n", "3,2"}).code, 2);
  EXPECT_EQ(run({"sweep", "--standard", "bsc:0.1", "--eps", "0.1", "--n", "40"}).code, 3);
}

TEST(Cli, OtherCommands) {
  auto o = run({"code", "--standard", "bsc:0.1", "-M", "2"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_TRUE(o.doc["results"]["ns_passed"].get<bool>());
  EXPECT_NEAR(o.doc["results"]["p_err"].get<double>(), 0.1, 1e-12);
  o = run({"beta", "--p0", "0.9,0.1", "--p1", "0.5,0.5", "--eps", "0.1"});
  EXPECT_NEAR(o.doc["results"]["beta"].get<double>(), 0.5, 1e-12);
  o = run({"beta", "--standard", "useless:0.5:0.5", "--eps", "0.75"});
  EXPECT_NEAR(o.doc["results"]["M_PPV"].get<double>(), 4, 1e-9);
  o = run({"asymptotics", "--standard", "noiseless:3"});
  EXPECT_TRUE(o.doc["results"]["cond_V_zero"].get<bool>());
  EXPECT_TRUE(o.doc["results"]["cond_K0_eq_C"].get<bool>());
  o = run({"capacity", "--standard", "bsc:0.1", "--format", "csv"});
  EXPECT_NE(o.out.find("C,0.531004406411"), std::string::npos);
  o = run({"dispersion", "--standard", "bsc:0.1"});
  EXPECT_NEAR(o.doc["results"]["V"].get<double>(), 0.9043582, 1e-6);
  o = run({"error", "--standard", "bsc:0.1", "--power", "3", "--types", "-M", "2"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_NEAR(o.doc["results"]["p_err"].get<double>(), min_error(tensor_power(bsc(0.1), 3), 2).p_err, 1e-9);
}

TEST(Cli, UnderflowWarning) {
  const auto f = write_temp("cli_tiny.json", R"({"matrix":[[0.9999999999,1e-10],[0.5,0.5]]})");
  const auto o = run({"size", "--channel", f, "--power", "40", "--types", "--eps", "0.1"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_GT(o.doc["solver"]["dropped"].get<int>(), 0);
  EXPECT_NE(o.err.find("warning"), std::string::npos);
}
