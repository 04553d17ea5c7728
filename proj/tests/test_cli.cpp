#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "contact/cli.hpp"
#include "contact/errors.hpp"

using namespace contact;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json summary(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "summary.json")); }

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("contact_cli_" + name);
  fs::remove_all(d);
  return d;
}

int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "contact_limit");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(Config, DefaultsValidate) {
  const RunConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.command, "all");
  EXPECT_EQ(suite_names().size(), 8u);
  EXPECT_NO_THROW(parse_config("").validate());
}

TEST(Config, ParsesSections) {
  const RunConfig c = parse_config(R"(
command: rate-sweep
potential: {shape: heavy_tail, params: [2.2]}
schedule: {g: 1.5, c: 1.0, s_g: 0.5}
rate:
  target: phi12
  z: [1, 3]
  eps: {first: 2, last: 6}
  grid: {L: 6, n: 64}
krein: {trials: 5}
seed: 11
jobs: 2
)");
  EXPECT_EQ(c.command, "rate-sweep");
  EXPECT_EQ(c.potential.shape, "heavy_tail");
  EXPECT_EQ(c.potential.params, std::vector<double>{2.2});
  EXPECT_EQ(c.schedule.g, 1.5);
  EXPECT_EQ(c.schedule.s_g, 0.5);
  EXPECT_EQ(c.rate.targets, std::vector<std::string>{"phi12"});
  EXPECT_EQ(c.rate.z, (std::vector<double>{1.0, 3.0}));
  EXPECT_EQ(c.rate.eps, dyadic_eps(2, 6));
  EXPECT_EQ(c.rate.grid.L, 6.0);
  EXPECT_EQ(c.rate.grid.n, 64);
  EXPECT_EQ(c.krein.trials, 5);
  EXPECT_EQ(c.seed, 11u);
  EXPECT_EQ(c.jobs, 2);
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(parse_config("potential: exponential").potential.shape, "exponential");
}

TEST(Config, Rejections) {
  EXPECT_THROW(parse_config("bogus: 1"), ConfigError);
  EXPECT_THROW(parse_config("rate: {zz: 1}"), ConfigError);
  EXPECT_THROW(parse_config("seed: [1, 2]"), ConfigError);
  EXPECT_THROW(parse_config("{{{"), ConfigError);
  EXPECT_THROW(parse_config("potential: {shape: spline}").validate(), ConfigError);
  EXPECT_THROW(parse_config("rate: {targets: [psi]}").validate(), ConfigError);
  EXPECT_THROW(parse_config("rate: {eps: [0.1, 0.2]}").validate(), ConfigError);
  EXPECT_THROW(parse_config("command: nope").validate(), ConfigError);
  EXPECT_THROW(parse_config("jobs: 0").validate(), ConfigError);
  EXPECT_THROW(parse_config("potential: {shape: table, file: /nonexistent/v.csv}").validate(), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.yaml"), ConfigError);
}

TEST(Cli, ConfigErrorExitsTwoWithSummary) {
  const fs::path out = fresh_dir("bad");
  const fs::path cfg = write_file("contact_cli_bad.yaml", "krein: {trials: -3}\n");
  EXPECT_EQ(invoke({"--config", cfg.string(), "--out", out.string(), "krein-selftest"}), 2);
  const auto s = summary(out);
  EXPECT_EQ(s["status"], "config_error");
  EXPECT_FALSE(s["passed"].get<bool>());
  EXPECT_EQ(invoke({"--out", out.string(), "no-such-suite"}), 2);
}

TEST(Cli, KreinSelftestPassesAndIsDeterministic) {
  const fs::path cfg = write_file("contact_cli_krein.yaml", "krein: {trials: 10, max_dim: 30}\n");
  const fs::path a = fresh_dir("a"), b = fresh_dir("b");
  ASSERT_EQ(invoke({"--config", cfg.string(), "--out", a.string(), "krein-selftest"}), 0);
  ASSERT_EQ(invoke({"--config", cfg.string(), "--out", b.string(), "--jobs", "2", "krein-selftest"}), 0);
  const auto s = summary(a);
  EXPECT_EQ(s["status"], "pass");
  EXPECT_EQ(s["suites"][0]["name"], "krein-selftest");
  EXPECT_EQ(s["suites"][0]["report"]["passed"], 10);
  EXPECT_EQ(slurp(a / "krein_selftest.csv"), slurp(b / "krein_selftest.csv"));
  EXPECT_EQ(s["suites"], summary(b)["suites"]);
}

TEST(Cli, ToleranceScaleCanForceContractFailure) {
  const fs::path cfg = write_file("contact_cli_tight.yaml", "krein: {trials: 5, max_dim: 20}\n");
  const fs::path out = fresh_dir("tight");
  EXPECT_EQ(invoke({"--config", cfg.string(), "--out", out.string(), "--tolerance-scale", "1e-12", "krein-selftest"}),
            1);
  EXPECT_EQ(summary(out)["status"], "contract_failure");
}

TEST(Cli, OutputDirectoryFromEnvironment) {
  const fs::path out = fresh_dir("env");
  const fs::path cfg = write_file("contact_cli_env.yaml", "krein: {trials: 3, max_dim: 12}\n");
  ::setenv("CONTACT_LIMIT_OUT", out.c_str(), 1);
  EXPECT_EQ(invoke({"--config", cfg.string(), "krein-selftest"}), 0);
  ::unsetenv("CONTACT_LIMIT_OUT");
  EXPECT_TRUE(fs::exists(out / "summary.json"));
  EXPECT_TRUE(fs::exists(out / "krein_selftest.csv"));
}

TEST(Suites, GreensCheckSmall) {
  RunConfig c;
  c.greens.samples = 12;
  const SuiteResult r = greens_check(c);
  EXPECT_TRUE(r.passed());
  EXPECT_FALSE(r.checks.empty());
}

TEST(Suites, EigenSweepReportsPlateau) {
  RunConfig c;
  c.eigen.eps = dyadic_eps(3, 5);
  const SuiteResult r = eigen_sweep_n2(c);
  ASSERT_FALSE(r.checks.empty());
  EXPECT_LT(r.report["energy"].get<double>(), 0.0);
}
