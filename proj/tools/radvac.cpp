// Command-line driver: run one scenario, sweep a directory of configs, or
// check operator identities.
#include <fmt/format.h>

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "radvac/error.hpp"
#include "radvac/harness.hpp"
#include "radvac/io.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kRunFailed = 1;
constexpr int kConfigInvalid = 2;

int cmd_run(const fs::path& config, const std::string& out) {
  radvac::ScenarioConfig c;
  try {
    c = radvac::load_config(config);
  } catch (const radvac::Error& e) {
    fmt::print(stderr, "config-invalid: {}\n", e.what());
    return kConfigInvalid;
  }
  const fs::path dir = !out.empty() ? fs::path(out) : !c.out.empty() ? fs::path(c.out) : fs::path("out") / c.name;
  const radvac::ScenarioResult r = radvac::run_scenario(c, dir);
  if (!r.error.empty()) fmt::print(stderr, "run failed: {}\n", r.error);
  fmt::print("{} {} -> {}\n", r.pass ? "PASS" : "FAIL", c.name, (dir / "summary.json").string());
  return r.pass ? kOk : kRunFailed;
}

int cmd_sweep(const fs::path& dir, int jobs, const std::string& out) {
  if (!fs::is_directory(dir)) {
    fmt::print(stderr, "config-invalid: {} is not a directory\n", dir.string());
    return kConfigInvalid;
  }
  const fs::path out_dir = out.empty() ? fs::path("out") / "sweep" : fs::path(out);
  const radvac::SweepReport rep = radvac::sweep(dir, jobs, out_dir);
  radvac::io::write_json(out_dir / "sweep_report.json", radvac::to_json(rep));
  for (const auto& row : rep.rows)
    fmt::print("{} {}{}\n", row.pass ? "PASS" : "FAIL", row.config,
               row.has_c_star ? fmt::format(" C*={:.4g}", row.c_star) : "");
  if (!rep.ok()) fmt::print(stderr, "partial failure: {} of {} configs failed\n", rep.failed.size(), rep.rows.size());
  return rep.ok() ? kOk : kRunFailed;
}

int cmd_check_ops(int order, std::uint64_t seed, const std::string& out) {
  radvac::ScenarioConfig c;
  c.kind = "operator-properties";
  c.name = fmt::format("check-ops-i{}-s{}", order, seed);
  c.max_order = order;
  c.seed = seed;
  const fs::path dir = out.empty() ? fs::path("out") / c.name : fs::path(out);
  const radvac::ScenarioResult r = radvac::run_scenario(c, dir);
  if (!r.error.empty()) {
    fmt::print(stderr, "run failed: {}\n", r.error);
    return kRunFailed;
  }
  for (const auto& p : r.summary["checks"]["properties"])
    fmt::print("{:<24} order {:.3f}\n", p["name"].get<std::string>(), p["order"].get<double>());
  fmt::print("{} min order {:.3f}\n", r.pass ? "PASS" : "FAIL",
             r.summary["checks"]["min_order"].get<double>());
  return r.pass ? kOk : kRunFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perturbed affine expansion solver and verification harness"};
  app.require_subcommand(1);
  std::string out;
  app.add_option("--out", out, "Output directory");

  std::string config;
  auto* run = app.add_subcommand("run", "Run one scenario config");
  run->add_option("config", config, "Scenario config (JSON)")->required();

  std::string config_dir;
  int jobs = 1;
  auto* sw = app.add_subcommand("sweep", "Run every config in a directory");
  sw->add_option("config_dir", config_dir, "Directory of scenario configs")->required();
  sw->add_option("--jobs,-j", jobs, "Concurrent runs")->check(CLI::PositiveNumber);

  int order = 2;
  std::uint64_t seed = 0;
  auto* ops = app.add_subcommand("check-ops", "Check operator identities on random functions");
  ops->add_option("--order", order, "Highest operator order")->check(CLI::Range(1, 4));
  ops->add_option("--seed", seed, "Random seed");

  for (auto* sub : {run, sw, ops}) sub->add_option("--out", out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigInvalid;
  }
  try {
    if (*run) return cmd_run(config, out);
    if (*sw) return cmd_sweep(config_dir, jobs, out);
    if (*ops) return cmd_check_ops(order, seed, out);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kRunFailed;
  }
  return kOk;
}
