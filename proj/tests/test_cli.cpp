#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "cli.hpp"
#include "config.hpp"
#include "nodalkit/parallel.hpp"
#include "nodalkit/sampler.hpp"

using namespace nodalkit::cli;
using json = nlohmann::json;
namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "nodalkit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string strip_timestamp(const std::string& s) {
  std::istringstream in(s);
  std::string line, kept;
  while (std::getline(in, line)) {
    if (line.rfind("# generated=", 0) == 0 || line.find("\"generated\"") != std::string::npos) continue;
    kept += line + '\n';
  }
  return kept;
}

std::vector<std::string> data_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') rows.push_back(line);
  }
  return rows;
}

fs::path temp_path(const std::string& name) { return fs::temp_directory_path() / ("nodalkit_test_" + name); }

}  // namespace

TEST(Cli, DensityNearRowsApproachBoundaryLaw) {
  const auto r = invoke({"density", "--ell", "100", "--psi-min", "0.01", "--psi-max", "314", "--psi-points", "50"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("# schema=1\n", 0), 0u);
  EXPECT_NE(r.out.find("# seed=20240601"), std::string::npos);
  const auto rows = data_rows(r.out);
  ASSERT_EQ(rows.size(), 51u);
  EXPECT_EQ(rows[0], "psi,exact,far,near,taylor,planar,regime");
  const double first_exact = std::stod(rows[1].substr(rows[1].find(',') + 1));
  EXPECT_NEAR(first_exact, 100 / (2 * kPi), 0.02 * 100 / (2 * kPi));
  EXPECT_NE(rows[1].find(",near"), std::string::npos);
  EXPECT_NE(rows[50].find(",far"), std::string::npos);
}

TEST(Cli, LengthJsonCarriesSlope) {
  const auto r = invoke({"length", "--ells", "50,100,200,400,800"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["config"]["seed"], "20240601");
  EXPECT_EQ(j["table"].size(), 5u);
  const double slope = j["fit"]["slope"];
  EXPECT_NEAR(slope, -0.0221, 0.15 * 0.0221);
  EXPECT_TRUE(j["ell0"].is_null());
}

TEST(Cli, LengthCsvWithoutFit) {
  const auto r = invoke({"length", "--ell", "20", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("# fit=unavailable"), std::string::npos);
  const auto rows = data_rows(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], "ell,total,leading,deficiency,hc,hi,hf");
  EXPECT_EQ(rows[1].substr(0, 3), "20,");
}

TEST(Cli, VerifyPassesOnPristineBuild) {
  const auto r = invoke({"verify"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.find(",false"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"density", "--bogus", "1"}).code, 2);
  EXPECT_EQ(invoke({"density", "--ell", "0"}).code, 2);
  EXPECT_EQ(invoke({"density", "--ell", "abc"}).code, 2);
  EXPECT_EQ(invoke({"length", "--gauss-nodes", "17"}).code, 2);
  EXPECT_EQ(invoke({"simulate", "--ell", "20", "--n-theta", "50", "--n-phi", "400"}).code, 2);
  EXPECT_EQ(invoke({"simulate", "--ell", "5", "--replicates", "10"}).code, 2);
  EXPECT_EQ(invoke({"simulate", "--mode", "sideways"}).code, 2);
  EXPECT_EQ(invoke({"density", "--format", "xml"}).code, 2);
  EXPECT_EQ(invoke({"density", "--config", "/nonexistent/nodalkit.cfg"}).code, 2);
}

TEST(Cli, NumericalFailureEmitsDiagnosticJson) {
  const auto r = invoke({"length", "--ell", "200", "--gauss-nodes", "15", "--max-bisections", "0",
                         "--far-panel-width", "400"});
  EXPECT_EQ(r.code, 1);
  const auto j = json::parse(r.err);
  EXPECT_TRUE(j.contains("error"));
  EXPECT_EQ(j["diagnostics"]["degree"], 200);
  EXPECT_EQ(j["config"]["max-bisections"], "0");
}

TEST(Cli, ConfigFileAndFlagOverride) {
  const auto path = temp_path("cfg.txt");
  {
    std::ofstream f(path);
    f << "# campaign\nell = 30\npsi_points = 7\npsi-max = 5\n\nseed = 11\n";
  }
  const auto a = invoke({"density", "--config", path.string()});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_NE(a.out.find("# ells=30"), std::string::npos);
  EXPECT_NE(a.out.find("# seed=11"), std::string::npos);
  EXPECT_EQ(data_rows(a.out).size(), 8u);
  const auto b = invoke({"density", "--config", path.string(), "--psi-points", "4"});
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(data_rows(b.out).size(), 5u);
  EXPECT_NE(b.out.find("# ells=30"), std::string::npos);
  fs::remove(path);

  const auto bad = temp_path("bad.txt");
  {
    std::ofstream f(bad);
    f << "flux = 3\n";
  }
  EXPECT_EQ(invoke({"density", "--config", bad.string()}).code, 2);
  fs::remove(bad);
}

TEST(Cli, OutputsAreReproducible) {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"density", "--ell", "40", "--psi-points", "20"},
        std::vector<std::string>{"length", "--ell", "30"},
        std::vector<std::string>{"simulate", "--ell", "4", "--replicates", "30", "--seed", "9"},
        std::vector<std::string>{"simulate", "--ell", "4", "--replicates", "30", "--format", "json"}}) {
    const auto a = invoke(args), b = invoke(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(strip_timestamp(a.out), strip_timestamp(b.out));
    // exactly one line differs at most
    EXPECT_EQ(a.out.size(), b.out.size());
  }
}

TEST(Cli, ThreadCountDoesNotChangeResults) {
  const std::vector<std::string> base{"simulate", "--ell", "6", "--replicates", "40", "--seed", "3"};
  auto one = base, four = base;
  one.insert(one.end(), {"--threads", "1"});
  four.insert(four.end(), {"--threads", "4"});
  const auto a = invoke(one), b = invoke(four);
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  auto body = [](const std::string& s) { return data_rows(s); };
  EXPECT_EQ(body(a.out), body(b.out));
  nodalkit::set_thread_count(0);
  ::setenv("NODALKIT_THREADS", "3", 1);
  EXPECT_EQ(nodalkit::thread_count(), 3u);
  ::unsetenv("NODALKIT_THREADS");
}

TEST(Cli, SimulateReportsPredictionAndDumps) {
  const auto field = temp_path("field.bin"), segs = temp_path("segs.csv");
  const auto r = invoke({"simulate", "--ell", "1", "--replicates", "30", "--dump-field", field.string(),
                         "--dump-segments", segs.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("# mean=6.2831853071795862"), std::string::npos);
  EXPECT_NE(r.out.find("# stderr=0\n"), std::string::npos);
  std::ifstream in(field, std::ios::binary);
  const auto fs_back = nodalkit::read_field_binary(in);
  EXPECT_EQ(fs_back.degree, 1);
  EXPECT_EQ(fs_back.grid.n_theta, 10);
  std::ifstream sin(segs);
  std::string header;
  std::getline(sin, header);
  EXPECT_EQ(header, "theta1,phi1,theta2,phi2");
  fs::remove(field);
  fs::remove(segs);
}

TEST(Cli, OutputFile) {
  const auto path = temp_path("out.csv");
  const auto r = invoke({"density", "--ell", "10", "--psi-points", "5", "--output", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first, "# schema=1");
  fs::remove(path);
}
