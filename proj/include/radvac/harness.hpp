#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "radvac/background.hpp"
#include "radvac/io.hpp"
#include "radvac/solver.hpp"

namespace radvac {

inline const std::vector<std::string>& scenario_kinds() {
  static const std::vector<std::string> kinds{
      "affine-exactness", "stability-run",       "convergence-study", "lwp-iteration",
      "oracle-compare",   "operator-properties", "embedding-survey"};
  return kinds;
}

struct ScenarioConfig {
  std::string kind;
  std::string name;
  double gamma = 1.4;
  double a_init = 1.0;
  double adot_init = 0.0;
  int N = 2;
  int n = 128;
  int stencil_order = 4;
  double cfl = 0.4;
  double dissipation = kDefaultDissipation;
  double tau_final = 5.0;
  double dtau_max = 0.01;
  double sample_every = 0.05;
  ProfileSpec profile = ProfileSpec::poly({1.0});
  bool zero_initial = false;
  InitialData initial;
  std::uint64_t seed = 0;
  std::string out;
  // oracle-compare
  double t_final = 1.0;
  // lwp-iteration
  double T = 0.25;
  int j_max = 8;
  // convergence-study
  std::vector<int> levels{64, 128, 256};
  // operator-properties and embedding-survey
  int draws = 100;
  int max_order = 2;
};

// Raises config-invalid on unknown keys, wrong types or out-of-range values.
ScenarioConfig parse_config(const io::Json& j);
ScenarioConfig load_config(const std::filesystem::path& path);
io::Json config_to_json(const ScenarioConfig& c);

struct ScenarioResult {
  bool pass = false;
  std::string error;  // empty unless the run failed with an exception
  io::Json summary;
};

// Runs one scenario, writing summary.json and kind-specific artifacts into out_dir.
ScenarioResult run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir);

struct SweepRow {
  std::string config;
  std::string kind;
  double gamma = 0.0;
  double eps = 0.0;
  double lambda = 0.0;
  bool pass = false;
  double c_star = 0.0;  // sup S^N / (eps + lambda), stability runs only
  bool has_c_star = false;
  std::string error;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  std::vector<std::string> failed;
  bool ok() const { return failed.empty(); }
};

// Runs every *.json config in the directory (sorted by name) with up to jobs
// concurrent runs, each single-threaded.
SweepReport sweep(const std::filesystem::path& config_dir, int jobs,
                  const std::filesystem::path& out_dir);
SweepReport sweep(const std::vector<std::pair<std::string, ScenarioConfig>>& configs, int jobs,
                  const std::filesystem::path& out_dir);
io::Json to_json(const SweepReport& r);

// Odd trigonometric polynomial sum_k c_k sin(k r) / k^2 with c_k uniform in [-1,1].
GridFunction random_smooth(std::shared_ptr<const RadialGrid> grid, std::mt19937_64& rng,
                           Parity parity = Parity::kOdd, int terms = 6);

// Profiles used by the operator property checks.
std::vector<ProfileSpec> profile_corpus();

struct PropertyCheck {
  std::string name;
  std::vector<int> n;
  std::vector<double> residual;  // sup norm per level
  double order = 0.0;            // from the two finest levels
};

struct OperatorReport {
  std::vector<PropertyCheck> checks;
  double min_order = 0.0;
};

// Q+/Q- commutation (k <= min(max_order, 2)), product rule (i <= min(max_order, 4)) and the
// Jacobian regularization identity, on random smooth functions drawn from seed.
OperatorReport operator_properties(int max_order, std::uint64_t seed, int stencil_order = 4,
                                   std::vector<int> levels = {64, 128, 256}, double gamma = 1.4);

struct SurveyReport {
  // [m-1][variant] with variants D, Dbar, over_r; sup over each half of the draws
  std::vector<std::array<double, 3>> embed_first, embed_second;
  std::vector<double> control_first, control_second;  // i = 1..4
  double max_spread = 0.0;  // largest ratio between the halves
};

SurveyReport embedding_survey(int draws, std::uint64_t seed, int n = 256, double gamma = 1.4);

}  // namespace radvac
