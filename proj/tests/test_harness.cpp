#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "radvac/error.hpp"
#include "radvac/harness.hpp"
#include "radvac/io.hpp"

namespace radvac {
namespace {

namespace fs = std::filesystem;
using io::Json;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "radvac_test_harness" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream f(p);
  std::string line;
  std::getline(f, line);
  return line;
}

std::optional<ErrorKind> parse_error(const Json& j) {
  try {
    parse_config(j);
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

ScenarioConfig small_affine() {
  return parse_config(Json{{"kind", "affine-exactness"}, {"name", "affine"}, {"n", 32},
                           {"tau_final", 0.5}, {"initial", {{"family", "zero"}}}});
}

TEST(Config, Defaults) {
  const ScenarioConfig c = parse_config(Json{{"kind", "stability-run"}});
  EXPECT_EQ(c.name, "stability-run");
  EXPECT_DOUBLE_EQ(c.gamma, 1.4);
  EXPECT_EQ(c.n, 128);
  EXPECT_EQ(c.N, 2);
  EXPECT_EQ(c.stencil_order, 4);
  EXPECT_FALSE(c.zero_initial);
}

TEST(Config, RejectsInvalidInput) {
  EXPECT_EQ(parse_error(Json{{"kind", "stability-run"}, {"nn", 64}}), ErrorKind::kConfigInvalid);
  EXPECT_EQ(parse_error(Json{{"kind", "stability-run"}, {"n", -8}}), ErrorKind::kConfigInvalid);
  EXPECT_EQ(parse_error(Json{{"kind", "nope"}}), ErrorKind::kConfigInvalid);
  EXPECT_EQ(parse_error(Json{{"n", 64}}), ErrorKind::kConfigInvalid);
  EXPECT_EQ(parse_error(Json{{"kind", "stability-run"}, {"stencil_order", 3}}),
            ErrorKind::kConfigInvalid);
  EXPECT_EQ(parse_error(Json{{"kind", "stability-run"}, {"initial", {{"family", "cubic"}}}}),
            ErrorKind::kConfigInvalid);
  EXPECT_EQ(parse_error(Json{{"kind", "embedding-survey"}, {"n", 66}}), ErrorKind::kConfigInvalid);
}

TEST(Config, RoundTripsThroughJson) {
  const ScenarioConfig c = small_affine();
  const ScenarioConfig d = parse_config(config_to_json(c));
  EXPECT_EQ(io::dump_json(config_to_json(c)), io::dump_json(config_to_json(d)));
}

TEST(Json, SeventeenDigits) {
  EXPECT_EQ(io::dump_json(Json(0.1)), "0.10000000000000001");
  EXPECT_EQ(io::dump_json(Json{{"b", 1}, {"a", 2}}, -1), "{\"a\":2,\"b\":1}");
}

TEST(Scenario, AffineExactnessWritesArtifacts) {
  const fs::path out = scratch("affine");
  const ScenarioResult r = run_scenario(small_affine(), out);
  EXPECT_TRUE(r.pass) << r.error;
  EXPECT_TRUE(r.error.empty());
  ASSERT_TRUE(fs::exists(out / "summary.json"));
  EXPECT_EQ(first_line(out / "trajectory.csv"), "tau,r,H,H_tau");
  EXPECT_EQ(first_line(out / "affine.csv"), "t,tau,a,a_t,a_tau");
  const Json sm = Json::parse(slurp(out / "summary.json"));
  EXPECT_TRUE(sm["pass"].get<bool>());
  EXPECT_LE(sm["checks"]["sup_H"].get<double>(), 1e-10);
}

TEST(Scenario, Deterministic) {
  ScenarioConfig c = parse_config(Json{{"kind", "stability-run"}, {"n", 32}, {"tau_final", 0.5},
                                       {"initial", {{"eps", 1e-3}, {"lambda", 1e-3}}}});
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const ScenarioResult ra = run_scenario(c, a);
  run_scenario(c, b);
  EXPECT_TRUE(ra.error.empty()) << ra.error;
  EXPECT_EQ(slurp(a / "summary.json"), slurp(b / "summary.json"));
  EXPECT_EQ(slurp(a / "trajectory.csv"), slurp(b / "trajectory.csv"));
  EXPECT_FALSE(slurp(a / "trajectory.csv").empty());
}

TEST(Scenario, FailureIsReportedNotThrown) {
  // Large data trips the a priori monitor.
  ScenarioConfig c = parse_config(Json{{"kind", "stability-run"}, {"n", 32}, {"tau_final", 0.5},
                                       {"initial", {{"eps", 1.0}, {"lambda", 1.0}}}});
  const fs::path out = scratch("violated");
  ScenarioResult r;
  EXPECT_NO_THROW(r = run_scenario(c, out));
  EXPECT_FALSE(r.pass);
  EXPECT_TRUE(fs::exists(out / "summary.json"));
}

TEST(Sweep, EmptyAndDuplicates) {
  const SweepReport empty = sweep(std::vector<std::pair<std::string, ScenarioConfig>>{}, 4,
                                  scratch("sweep_empty"));
  EXPECT_TRUE(empty.rows.empty());
  EXPECT_TRUE(empty.ok());
  EXPECT_EQ(to_json(empty)["status"], "ok");

  const ScenarioConfig c = small_affine();
  const SweepReport rep = sweep({{"x", c}, {"y", c}}, 2, scratch("sweep_dup"));
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_TRUE(rep.ok());
  Json a = to_json(rep)["rows"][0], b = to_json(rep)["rows"][1];
  a.erase("config");
  b.erase("config");
  EXPECT_EQ(a, b);
}

TEST(Sweep, GammaEpsGridGivesFiniteConstants) {
  std::vector<std::pair<std::string, ScenarioConfig>> configs;
  for (double gamma : {1.4, 5.0 / 3.0, 2.0})
    for (double eps : {1e-3, 1e-4, 1e-5})
      configs.emplace_back(
          std::to_string(configs.size()),
          parse_config(Json{{"kind", "stability-run"}, {"gamma", gamma}, {"n", 32},
                            {"tau_final", 3.0}, {"initial", {{"eps", eps}, {"lambda", eps}}}}));
  const SweepReport rep = sweep(configs, 3, scratch("sweep_grid"));
  ASSERT_EQ(rep.rows.size(), 9u);
  for (const auto& row : rep.rows) {
    EXPECT_TRUE(row.has_c_star) << row.config << " " << row.error;
    EXPECT_TRUE(std::isfinite(row.c_star));
    EXPECT_GT(row.c_star, 0.0);
  }
  EXPECT_TRUE(to_json(rep)["C_star_max"].is_number());
}

TEST(Sweep, InvalidConfigIsAPartialFailure) {
  const fs::path dir = scratch("sweep_dir");
  io::write_json(dir / "a.json", config_to_json(small_affine()));
  io::write_text(dir / "b.json", "{\"kind\": \"affine-exactness\", \"bogus\": 1}");
  const SweepReport rep = sweep(dir, 2, scratch("sweep_dir_out"));
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_TRUE(rep.rows[0].pass);
  EXPECT_FALSE(rep.rows[1].pass);
  EXPECT_EQ(rep.failed, std::vector<std::string>{"b"});
  EXPECT_EQ(to_json(rep)["status"], "partial-failure");
}

TEST(Survey, SmallRunAndPlot) {
  const SurveyReport r = embedding_survey(8, 3, 64);
  ASSERT_EQ(r.embed_first.size(), 2u);
  ASSERT_EQ(r.control_first.size(), 4u);
  for (int m = 0; m < 2; ++m)
    for (int q = 0; q < 3; ++q) {
      EXPECT_GT(r.embed_first[m][q], 0.0);
      EXPECT_TRUE(std::isfinite(r.embed_second[m][q]));
    }
  EXPECT_GE(r.max_spread, 1.0);

  const std::string svg =
      io::svg_line_plot("t", "x", "y", {{"a", {0, 1, 2}, {1, 0.1, -1}}}, true);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

int cli(const std::string& args) {
  const char* exe = std::getenv("RADVAC_CLI");
  if (exe == nullptr) return -1;
  const int status = std::system((std::string(exe) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodes) {
  if (std::getenv("RADVAC_CLI") == nullptr) GTEST_SKIP() << "RADVAC_CLI not set";
  const fs::path dir = scratch("cli");
  io::write_text(dir / "bad.json", "{\"kind\": \"affine-exactness\", \"n\": -4}");
  io::write_json(dir / "good.json", config_to_json(small_affine()));

  EXPECT_EQ(cli("run " + (dir / "bad.json").string() + " --out " + (dir / "bad_out").string()), 2);
  EXPECT_FALSE(fs::exists(dir / "bad_out"));
  EXPECT_EQ(cli("run " + (dir / "good.json").string() + " --out " + (dir / "good_out").string()),
            0);
  EXPECT_TRUE(fs::exists(dir / "good_out" / "summary.json"));
  EXPECT_EQ(cli("check-ops --order 2 --seed 1 --out " + (dir / "ops").string()), 0);
  EXPECT_EQ(cli("frobnicate"), 2);
}

}  // namespace
}  // namespace radvac
