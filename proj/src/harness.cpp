#include "radvac/harness.hpp"

#include <fmt/format.h>
#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <thread>

#include "radvac/calculus.hpp"
#include "radvac/diagnostics.hpp"
#include "radvac/error.hpp"
#include "radvac/oracle.hpp"

namespace radvac {

namespace fs = std::filesystem;
using io::Json;

constexpr double kInf = std::numeric_limits<double>::infinity();

namespace {

[[noreturn]] void bad(const std::string& what) { fail(ErrorKind::kConfigInvalid, what); }

double get_number(const Json& j, const std::string& key) {
  if (!j.is_number()) bad(key + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad(key + " must be finite");
  return v;
}

int get_int(const Json& j, const std::string& key) {
  if (!j.is_number_integer()) bad(key + " must be an integer");
  return j.get<int>();
}

std::vector<double> get_numbers(const Json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) bad(key + " must be a nonempty array of numbers");
  std::vector<double> out;
  for (const auto& e : j) out.push_back(get_number(e, key));
  return out;
}

void check_keys(const Json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) bad(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) bad(fmt::format("unknown key '{}' in {}", it.key(), where));
}

void in_range(double v, double lo, double hi, const std::string& key) {
  if (!(v >= lo && v <= hi)) bad(fmt::format("{} = {} outside [{}, {}]", key, v, lo, hi));
}

ProfileSpec parse_profile(const Json& j) {
  check_keys(j, "profile", {"kind", "coeffs", "r", "phi"});
  const std::string type = j.value("kind", "poly");
  if (type == "poly") {
    if (j.contains("r") || j.contains("phi")) bad("poly profile takes only coeffs");
    return ProfileSpec::poly(j.contains("coeffs") ? get_numbers(j["coeffs"], "profile.coeffs")
                                                  : std::vector<double>{1.0});
  }
  if (type == "table") {
    if (!j.contains("r") || !j.contains("phi")) bad("table profile needs r and phi");
    auto r = get_numbers(j["r"], "profile.r");
    auto phi = get_numbers(j["phi"], "profile.phi");
    if (r.size() != phi.size() || r.size() < 8) bad("profile table needs >= 8 matching entries");
    return ProfileSpec::table(std::move(r), std::move(phi));
  }
  bad("profile.kind must be poly or table");
}

Json profile_to_json(const ProfileSpec& p) {
  if (p.kind == ProfileSpec::Kind::kPoly) return {{"kind", "poly"}, {"coeffs", p.coeffs}};
  return {{"kind", "table"}, {"r", p.r}, {"phi", p.phi}};
}

}  // namespace

ScenarioConfig parse_config(const Json& j) {
  check_keys(j, "config",
             {"kind", "name", "gamma", "a_init", "adot_init", "N", "n", "stencil_order", "cfl",
              "dissipation", "tau_final", "dtau_max", "sample_every", "profile", "initial", "seed",
              "out", "t_final", "T", "j_max", "levels", "draws", "max_order"});
  ScenarioConfig c;
  if (!j.contains("kind") || !j["kind"].is_string()) bad("kind is required");
  c.kind = j["kind"].get<std::string>();
  const auto& kinds = scenario_kinds();
  if (std::find(kinds.begin(), kinds.end(), c.kind) == kinds.end()) bad("unknown kind " + c.kind);
  c.name = c.kind;
  if (j.contains("name")) {
    if (!j["name"].is_string()) bad("name must be a string");
    c.name = j["name"].get<std::string>();
  }
  if (j.contains("out")) {
    if (!j["out"].is_string()) bad("out must be a string");
    c.out = j["out"].get<std::string>();
  }
  auto num = [&](const char* key, double& dst, double lo, double hi) {
    if (j.contains(key)) dst = get_number(j[key], key);
    in_range(dst, lo, hi, key);
  };
  auto integer = [&](const char* key, int& dst, int lo, int hi) {
    if (j.contains(key)) dst = get_int(j[key], key);
    in_range(dst, lo, hi, key);
  };
  num("gamma", c.gamma, 1.0 + 1e-6, 3.0);
  num("a_init", c.a_init, 1e-3, 1e3);
  num("adot_init", c.adot_init, -1e3, 1e3);
  integer("N", c.N, 0, 4);
  integer("n", c.n, 16, 4096);
  integer("stencil_order", c.stencil_order, 2, 4);
  if (c.stencil_order != 2 && c.stencil_order != 4) bad("stencil_order must be 2 or 4");
  num("cfl", c.cfl, 1e-6, 1.0);
  num("dissipation", c.dissipation, 0.0, 0.5);
  num("tau_final", c.tau_final, 1e-6, 50.0);
  num("dtau_max", c.dtau_max, 1e-8, 1.0);
  num("sample_every", c.sample_every, 1e-6, 50.0);
  num("t_final", c.t_final, 1e-6, 50.0);
  num("T", c.T, 1e-6, 2.0);
  integer("j_max", c.j_max, 1, 50);
  integer("draws", c.draws, 2, 100000);
  integer("max_order", c.max_order, 1, 4);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0))
      bad("seed must be a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("levels")) {
    if (!j["levels"].is_array() || j["levels"].size() < 2) bad("levels needs at least two sizes");
    c.levels.clear();
    for (const auto& e : j["levels"]) {
      const int v = get_int(e, "levels");
      in_range(v, 16, 4096, "levels");
      c.levels.push_back(v);
    }
  }
  if (j.contains("profile")) c.profile = parse_profile(j["profile"]);
  if (j.contains("initial")) {
    const Json& i = j["initial"];
    check_keys(i, "initial", {"family", "p", "q", "eps", "lambda"});
    const std::string family = i.value("family", "poly");
    if (family == "zero") {
      c.zero_initial = true;
    } else if (family != "poly") {
      bad("initial.family must be poly or zero");
    }
    if (i.contains("p")) c.initial.p = get_numbers(i["p"], "initial.p");
    if (i.contains("q")) c.initial.q = get_numbers(i["q"], "initial.q");
    if (i.contains("eps")) c.initial.eps = get_number(i["eps"], "initial.eps");
    if (i.contains("lambda")) c.initial.lambda = get_number(i["lambda"], "initial.lambda");
    in_range(c.initial.eps, 0.0, 1.0, "initial.eps");
    in_range(c.initial.lambda, 0.0, 1.0, "initial.lambda");
  }
  const bool needs_quarters = c.kind == "embedding-survey";
  if (needs_quarters && c.n % 4 != 0) bad("n must be divisible by 4 for embedding-survey");
  return c;
}

ScenarioConfig load_config(const fs::path& path) {
  std::ifstream f(path);
  if (!f) bad("cannot read " + path.string());
  Json j;
  try {
    j = Json::parse(f);
  } catch (const std::exception& e) {
    bad(fmt::format("{}: {}", path.string(), e.what()));
  }
  return parse_config(j);
}

Json config_to_json(const ScenarioConfig& c) {
  Json j{{"kind", c.kind},
         {"name", c.name},
         {"gamma", c.gamma},
         {"a_init", c.a_init},
         {"adot_init", c.adot_init},
         {"N", c.N},
         {"n", c.n},
         {"stencil_order", c.stencil_order},
         {"cfl", c.cfl},
         {"dissipation", c.dissipation},
         {"tau_final", c.tau_final},
         {"dtau_max", c.dtau_max},
         {"sample_every", c.sample_every},
         {"profile", profile_to_json(c.profile)},
         {"initial",
          {{"family", c.zero_initial ? "zero" : "poly"},
           {"p", c.initial.p},
           {"q", c.initial.q},
           {"eps", c.initial.eps},
           {"lambda", c.initial.lambda}}},
         {"seed", c.seed},
         {"t_final", c.t_final},
         {"T", c.T},
         {"j_max", c.j_max},
         {"levels", c.levels},
         {"draws", c.draws},
         {"max_order", c.max_order}};
  return j;
}

// Random smooth functions

namespace {

struct SmoothDraw {
  std::vector<double> c;
  Parity parity;
  double operator()(double r) const {
    double s = 0.0;
    for (size_t k = 0; k < c.size(); ++k) {
      const double w = static_cast<double>(k + 1);
      s += c[k] * (parity == Parity::kOdd ? std::sin(w * r) : std::cos(w * r)) / (w * w);
    }
    return s;
  }
};

SmoothDraw draw(std::mt19937_64& rng, Parity parity, int terms) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SmoothDraw d{std::vector<double>(static_cast<size_t>(terms)), parity};
  for (auto& x : d.c) x = u(rng);
  return d;
}

}  // namespace

GridFunction random_smooth(std::shared_ptr<const RadialGrid> grid, std::mt19937_64& rng,
                           Parity parity, int terms) {
  require(parity != Parity::kNone, ErrorKind::kInvalidParameter, "parity must be even or odd");
  const SmoothDraw d = draw(rng, parity, terms);
  return GridFunction::sample(std::move(grid), d, parity);
}

std::vector<ProfileSpec> profile_corpus() {
  std::vector<double> r, phi;
  for (int k = 0; k <= 40; ++k) {
    r.push_back(k / 40.0);
    phi.push_back(std::exp(-0.5 * r.back() * r.back()));
  }
  return {ProfileSpec::poly({1.0}), ProfileSpec::poly({1.0, 0.0, 1.0, 0.0, -0.5}),
          ProfileSpec::poly({1.5, 0.0, -0.5}), ProfileSpec::table(r, phi)};
}

OperatorReport operator_properties(int max_order, std::uint64_t seed, int stencil_order,
                                   std::vector<int> levels, double gamma) {
  require(max_order >= 1 && max_order <= 4, ErrorKind::kInvalidParameter,
          "operator order must be in [1, 4]");
  require(levels.size() >= 2, ErrorKind::kInvalidParameter, "need at least two levels");
  std::mt19937_64 rng(seed);
  const SmoothDraw f = draw(rng, Parity::kOdd, 6);
  const SmoothDraw g = draw(rng, Parity::kEven, 6);
  const SmoothDraw h = draw(rng, Parity::kEven, 6);
  const auto corpus = profile_corpus();
  const int kmax = std::min(max_order, 2);

  std::vector<PropertyCheck> checks;
  auto record = [&](const std::string& name, int n, double res) {
    auto it = std::find_if(checks.begin(), checks.end(),
                           [&](const PropertyCheck& c) { return c.name == name; });
    if (it == checks.end()) {
      checks.push_back({name, {}, {}, 0.0});
      it = std::prev(checks.end());
    }
    it->n.push_back(n);
    it->residual.push_back(res);
  };

  for (int n : levels) {
    auto grid = std::make_shared<const RadialGrid>(n, stencil_order);
    const GridFunction F = GridFunction::sample(grid, f, Parity::kOdd);
    const GridFunction G = GridFunction::sample(grid, g, Parity::kEven);
    const GridFunction Hh = GridFunction::sample(grid, h, Parity::kEven);
    for (size_t p = 0; p < corpus.size(); ++p) {
      const BackgroundProfile prof = build_profile(corpus[p], gamma, grid);
      for (int k = 0; k <= kmax; ++k) {
        const GridFunction DrF = apply_Dr(F);
        const GridFunction qp = apply_Dr(apply_Lk(k, F, prof)) - apply_Lk_star(k + 1, DrF, prof) -
                                compute_Qplus(k, prof) * DrF;
        record(fmt::format("qplus_k{}_profile{}", k, p), n, qp.max_abs());
        const GridFunction dh = apply_dr(Hh);
        const GridFunction qm = apply_dr(apply_Lk_star(k, Hh, prof)) - apply_Lk(k + 1, dh, prof) -
                                compute_Qminus(k, prof) * dh;
        record(fmt::format("qminus_k{}_profile{}", k, p), n, qm.max_abs());
      }
    }
    for (int i = 1; i <= max_order; ++i) {
      const GridFunction lhs = apply_Di(i, F * G);
      const GridFunction rhs =
          apply_Dbar_i(i - 1, F * apply_dr(G)) + apply_Dbar_i(i - 1, G * apply_Dr(F));
      record(fmt::format("product_i{}", i), n, (lhs - rhs).max_abs());
    }
    const Geometry geo = derive_geometry(0.05 * F, gamma);
    const GridFunction ident = apply_dr(geo.J) -
                               square(geo.xi) * (times_r(geo.theta_rr) + 4.0 * geo.theta_r) -
                               2.0 * times_r(geo.xi * square(geo.theta_r));
    record("jacobian_identity", n, ident.max_abs());
  }

  OperatorReport out;
  out.min_order = kInf;
  for (auto& c : checks) {
    const size_t m = c.residual.size();
    const double a = c.residual[m - 2], b = c.residual[m - 1];
    // Residuals at round-off carry no order information.
    c.order = (b > 1e-12 && a > 0.0)
                  ? std::log(a / b) / std::log(static_cast<double>(c.n[m - 1]) / c.n[m - 2])
                  : kInf;
    out.min_order = std::min(out.min_order, c.order);
  }
  out.checks = std::move(checks);
  return out;
}

SurveyReport embedding_survey(int draws, std::uint64_t seed, int n, double gamma) {
  require(draws >= 2, ErrorKind::kInvalidParameter, "need at least two draws");
  auto grid = std::make_shared<const RadialGrid>(n);
  const BackgroundProfile prof = build_profile(ProfileSpec::poly({1.0}), gamma, grid);
  std::mt19937_64 rng(seed);
  SurveyReport rep;
  rep.embed_first.assign(2, {0.0, 0.0, 0.0});
  rep.embed_second.assign(2, {0.0, 0.0, 0.0});
  rep.control_first.assign(4, 0.0);
  rep.control_second.assign(4, 0.0);
  for (int k = 0; k < draws; ++k) {
    const GridFunction u = random_smooth(grid, rng);
    const bool first = k < draws / 2;
    auto& emb = first ? rep.embed_first : rep.embed_second;
    auto& ctl = first ? rep.control_first : rep.control_second;
    for (int m = 1; m <= 2; ++m) {
      const EmbeddingRatios e = embedding_ratios(u, prof, m);
      const double v[3] = {e.D, e.Dbar, e.over_r};
      for (int q = 0; q < 3; ++q) emb[m - 1][q] = std::max(emb[m - 1][q], v[q]);
    }
    for (int i = 1; i <= 4; ++i) ctl[i - 1] = std::max(ctl[i - 1], control_ratio(u, i));
  }
  auto spread = [](double a, double b) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) return kInf;
    return std::max(a, b) / std::min(a, b);
  };
  for (int m = 0; m < 2; ++m)
    for (int q = 0; q < 3; ++q)
      rep.max_spread = std::max(rep.max_spread, spread(rep.embed_first[m][q], rep.embed_second[m][q]));
  for (int i = 0; i < 4; ++i)
    rep.max_spread = std::max(rep.max_spread, spread(rep.control_first[i], rep.control_second[i]));
  return rep;
}

// Scenarios

namespace {

struct Setup {
  std::shared_ptr<const RadialGrid> grid;
  AffineMotion motion;
  BackgroundProfile profile;
};

Setup make_setup(const ScenarioConfig& c, int n, double tau_cover) {
  auto grid = std::make_shared<const RadialGrid>(n, c.stencil_order);
  AffineMotion motion = integrate_affine_to_tau(c.gamma, c.a_init, c.adot_init, tau_cover, 1e-12);
  BackgroundProfile profile = build_profile(c.profile, c.gamma, grid);
  return {grid, std::move(motion), std::move(profile)};
}

PerturbationState initial_state(const ScenarioConfig& c, const Setup& s, Json& summary) {
  if (c.zero_initial) return PerturbationState::zero(s.grid);
  InitialInfo info;
  PerturbationState st = make_initial(c.initial, s.motion, s.profile, c.N, &info);
  summary["initial"] = {{"amplitude", info.amplitude}, {"sn0", info.sn0}, {"h0_norm", info.h0_norm}};
  return st;
}

SolveControls controls_of(const ScenarioConfig& c) {
  SolveControls sc;
  sc.N = c.N;
  sc.cfl = c.cfl;
  sc.dissipation = c.dissipation;
  sc.dtau_max = c.dtau_max;
  sc.sample_every = c.sample_every;
  return sc;
}

void plot(const fs::path& path, const std::string& title, const std::string& xl,
          const std::string& yl, const std::vector<io::SvgSeries>& s, bool log_y) {
  io::write_text(path, io::svg_line_plot(title, xl, yl, s, log_y));
}

std::vector<double> taus_of(const Trajectory& t) {
  std::vector<double> out;
  for (const auto& s : t.states) out.push_back(s.tau);
  return out;
}

bool run_affine(const ScenarioConfig& c, const fs::path& out, Json& sm) {
  const Setup s = make_setup(c, c.n, c.tau_final);
  const Trajectory t = solve(PerturbationState::zero(s.grid), s.motion, s.profile, c.tau_final,
                             controls_of(c));
  double sup = 0.0;
  for (const auto& st : t.states) sup = std::max({sup, st.H.max_abs(), st.H_tau.max_abs()});
  io::write_affine_csv(out / "affine.csv", s.motion);
  io::write_trajectory_csv(out / "trajectory.csv", t.states);
  sm["checks"] = {{"sup_H", sup}, {"tolerance", 1e-10}, {"steps", t.steps},
                  {"energy", s.motion.energy()}, {"a1", s.motion.a1_limit}};
  return sup <= 1e-10;
}

bool run_stability(const ScenarioConfig& c, const fs::path& out, Json& sm) {
  const Setup s = make_setup(c, c.n, c.tau_final);
  const PerturbationState init = initial_state(c, s, sm);
  Trajectory t;
  try {
    t = solve(init, s.motion, s.profile, c.tau_final, controls_of(c));
  } catch (const AprioriViolated& e) {
    sm["checks"] = {{"apriori_ok", false}, {"violated", e.bound()}, {"tau", e.tau()},
                    {"value", e.value()}};
    io::write_trajectory_csv(out / "trajectory.csv", e.partial().states);
    return false;
  }
  const double scale = c.initial.eps + c.initial.lambda;
  const double sup_sn = t.sn.empty() ? 0.0 : t.sn.back();
  const double c_star = scale > 0.0 ? sup_sn / scale : 0.0;
  const double d_exp = s.motion.exponents.d_exp;

  std::vector<io::SeriesPoint> series;
  std::vector<double> taus = taus_of(t), vel, inst;
  const std::vector<double> bracket = sn_series(t.states, s.motion, s.profile, c.N);
  for (size_t k = 0; k < t.states.size(); ++k) {
    const auto& st = t.states[k];
    const double a = s.motion.at_tau(st.tau).a;
    vel.push_back(std::pow(a, d_exp) * weighted_norm(st.H_tau, 0, s.profile));
    series.push_back({st.tau, "S_N", bracket[k]});
    series.push_back({st.tau, "S_N_sup", t.sn[k]});
    series.push_back({st.tau, "velocity_energy", vel.back()});
    series.push_back({st.tau, "j_dev", t.monitors[k].j_dev});
  }
  Json checks{{"apriori_ok", true}, {"sup_SN", sup_sn}, {"C_star", c_star}, {"steps", t.steps}};
  bool pass = c_star <= 100.0;
  if (init.H.max_abs() > 0.0 || init.H_tau.max_abs() > 0.0) {
    try {
      const DecayFit fit = fit_decay(taus, vel, s.motion);
      checks["decay"] = io::to_json(fit);
      pass = pass && fit.rate < 0.0;
    } catch (const Error& e) {
      checks["decay"] = {{"error", e.what()}};
      pass = false;
    }
    Json coer = Json::array();
    for (int i = 0; i < std::max(c.N, 1); ++i) {
      const double ratio = check_coercivity(t.states, s.motion, s.profile, i);
      coer.push_back(ratio);
      pass = pass && ratio <= 10.0;
    }
    checks["coercivity"] = coer;
  }
  sm["checks"] = checks;
  io::write_trajectory_csv(out / "trajectory.csv", t.states);
  io::write_series_csv(out / "series.csv", series);
  io::write_json(out / "energy_report.json",
                 io::to_json(compute_energy_identity_terms(t.states.back(), s.motion, s.profile, c.N)));
  plot(out / "sn.svg", "S^N", "tau", "S^N", {{"S_N", taus, bracket}, {"sup", taus, t.sn}}, true);
  return pass;
}

bool run_convergence(const ScenarioConfig& c, const fs::path& out, Json& sm) {
  Json rows = Json::array();
  std::vector<double> res;
  std::vector<io::SvgSeries> curves;
  for (int n : c.levels) {
    const Setup s = make_setup(c, n, c.tau_final);
    Json dummy;
    const PerturbationState init = initial_state(c, s, dummy);
    SolveControls sc = controls_of(c);
    sc.monitor = false;
    const Trajectory t = solve(init, s.motion, s.profile, c.tau_final, sc);
    const auto reports = energy_reports(t.states, s.motion, s.profile, c.N);
    const IdentityResidual r = integrate_identity_residual(reports);
    res.push_back(r.relative);
    rows.push_back({{"n", n}, {"identity_relative", r.relative}, {"identity_abs", r.max_abs},
                    {"sup_SN", t.sn.empty() ? 0.0 : t.sn.back()}});
    curves.push_back({fmt::format("n={}", n), taus_of(t), r.running});
  }
  bool pass = true;
  Json orders = Json::array();
  for (size_t k = 1; k < res.size(); ++k) {
    const double ratio = res[k] > 0.0 ? res[k - 1] / res[k] : kInf;
    orders.push_back(std::log(ratio) /
                     std::log(static_cast<double>(c.levels[k]) / c.levels[k - 1]));
    pass = pass && ratio >= 2.0;
  }
  sm["checks"] = {{"levels", rows}, {"orders", orders}};
  plot(out / "identity_residual.svg", "energy identity residual", "tau", "|I|", curves, true);
  return pass;
}

bool run_lwp(const ScenarioConfig& c, const fs::path& out, Json& sm) {
  const Setup s = make_setup(c, c.n, c.T + 0.5);
  const PerturbationState init = initial_state(c, s, sm);
  LwpOptions o;
  o.cfl = c.cfl;
  o.dissipation = c.dissipation;
  o.dtau_max = c.dtau_max;
  o.N = c.N;
  const auto its = lwp_iterate(init, s.motion, s.profile, c.T, c.j_max, o);
  SolveControls sc = controls_of(c);
  sc.sample_times = {c.T};
  const Trajectory t = solve(init, s.motion, s.profile, c.T, sc);
  const GridFunction& ref = t.states.back().H;
  const double den = std::sqrt(weighted_norm(ref, 0, s.profile));
  const double num = std::sqrt(weighted_norm(its.back().states.back().H - ref, 0, s.profile));
  const double rel = den > 0.0 ? num / den : num;
  Json rows = Json::array();
  double worst = 0.0;
  for (size_t j = 0; j < its.size(); ++j) {
    rows.push_back({{"j", j}, {"diff_sn", its[j].diff_sn}, {"diff_norm", its[j].diff_norm},
                    {"ratio", its[j].ratio}});
    if (j >= 2) worst = std::max(worst, its[j].ratio);
  }
  sm["checks"] = {{"iterates", rows}, {"max_ratio", worst}, {"limit_relative", rel}};
  io::write_trajectory_csv(out / "trajectory.csv", its.back().states);
  return worst <= 0.5 && rel <= 1e-6;
}

bool run_oracle(const ScenarioConfig& c, const fs::path& out, Json& sm) {
  const Setup s = make_setup(c, c.n, c.t_final);
  const PerturbationState init = initial_state(c, s, sm);
  ChiControls cc;
  cc.cfl = c.cfl;
  cc.dissipation = c.dissipation;
  cc.dt_max = c.dtau_max;
  cc.sample_every = c.sample_every;
  const ChiTrajectory ct = solve_chi(chi_from_perturbation(init, s.motion), s.profile, c.t_final, cc);
  SolveControls sc = controls_of(c);
  sc.monitor = false;
  for (const auto& st : ct.states)
    if (st.t > 0.0) sc.sample_times.push_back(s.motion.at_t(st.t).tau);
  const Trajectory ht = solve(init, s.motion, s.profile, sc.sample_times.back(), sc);
  const Discrepancy d = compare_solutions(ct, ht, s.motion);
  io::write_json(out / "discrepancy.json", io::to_json(d));
  io::write_trajectory_csv(out / "trajectory.csv", ht.states);
  sm["checks"] = {{"discrepancy", io::to_json(d)}, {"tolerance", 1e-6}};
  return d.rel_sup <= 1e-6;
}

bool run_operators(const ScenarioConfig& c, const fs::path&, Json& sm) {
  const OperatorReport r =
      operator_properties(c.max_order, c.seed, c.stencil_order, c.levels, c.gamma);
  Json rows = Json::array();
  for (const auto& k : r.checks)
    rows.push_back({{"name", k.name}, {"n", k.n}, {"residual", k.residual}, {"order", k.order}});
  sm["checks"] = {{"properties", rows}, {"min_order", r.min_order},
                  {"required_order", c.stencil_order - 0.3}};
  return r.min_order >= c.stencil_order - 0.3;
}

bool run_survey(const ScenarioConfig& c, const fs::path&, Json& sm) {
  const SurveyReport r = embedding_survey(c.draws, c.seed, c.n, c.gamma);
  Json emb = Json::array();
  for (int m = 0; m < 2; ++m)
    for (int q = 0; q < 3; ++q)
      emb.push_back({{"m", m + 1},
                     {"variant", std::array<const char*, 3>{"D", "Dbar", "over_r"}[q]},
                     {"first_half", r.embed_first[m][q]},
                     {"second_half", r.embed_second[m][q]}});
  Json ctl = Json::array();
  for (int i = 0; i < 4; ++i)
    ctl.push_back({{"i", i + 1}, {"first_half", r.control_first[i]},
                   {"second_half", r.control_second[i]}});
  sm["checks"] = {{"embedding", emb}, {"control", ctl}, {"max_spread", r.max_spread}};
  return r.max_spread <= 2.0;
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& c, const fs::path& out_dir) {
  ScenarioResult res;
  Json sm{{"kind", c.kind}, {"name", c.name}, {"config", config_to_json(c)}};
  fs::create_directories(out_dir);
  try {
    bool pass = false;
    if (c.kind == "affine-exactness") pass = run_affine(c, out_dir, sm);
    else if (c.kind == "stability-run") pass = run_stability(c, out_dir, sm);
    else if (c.kind == "convergence-study") pass = run_convergence(c, out_dir, sm);
    else if (c.kind == "lwp-iteration") pass = run_lwp(c, out_dir, sm);
    else if (c.kind == "oracle-compare") pass = run_oracle(c, out_dir, sm);
    else if (c.kind == "operator-properties") pass = run_operators(c, out_dir, sm);
    else if (c.kind == "embedding-survey") pass = run_survey(c, out_dir, sm);
    else bad("unknown kind " + c.kind);
    res.pass = pass;
  } catch (const Error& e) {
    res.error = fmt::format("{}: {}", to_string(e.kind()), e.what());
  } catch (const std::exception& e) {
    res.error = e.what();
  }
  sm["pass"] = res.pass;
  if (!res.error.empty()) sm["error"] = res.error;
  res.summary = sm;
  io::write_json(out_dir / "summary.json", sm);
  return res;
}

SweepReport sweep(const std::vector<std::pair<std::string, ScenarioConfig>>& configs, int jobs,
                  const fs::path& out_dir) {
  SweepReport rep;
  rep.rows.resize(configs.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    omp_set_num_threads(1);
    for (size_t k = next++; k < configs.size(); k = next++) {
      const auto& [label, cfg] = configs[k];
      SweepRow& row = rep.rows[k];
      row.config = label;
      row.kind = cfg.kind;
      row.gamma = cfg.gamma;
      row.eps = cfg.zero_initial ? 0.0 : cfg.initial.eps;
      row.lambda = cfg.zero_initial ? 0.0 : cfg.initial.lambda;
      const ScenarioResult r = run_scenario(cfg, out_dir / label);
      row.pass = r.pass;
      row.error = r.error;
      const Json& chk = r.summary.contains("checks") ? r.summary["checks"] : Json();
      if (chk.is_object() && chk.contains("C_star")) {
        row.c_star = chk["C_star"].get<double>();
        row.has_c_star = true;
      }
    }
  };
  const int nthreads = std::max(1, std::min<int>(jobs, static_cast<int>(configs.size())));
  std::vector<std::thread> pool;
  for (int k = 0; k < nthreads; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (const auto& row : rep.rows)
    if (!row.pass) rep.failed.push_back(row.config);
  return rep;
}

SweepReport sweep(const fs::path& config_dir, int jobs, const fs::path& out_dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(config_dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<std::pair<std::string, ScenarioConfig>> configs;
  SweepReport invalid;
  for (const auto& f : files) {
    try {
      configs.emplace_back(f.stem().string(), load_config(f));
    } catch (const Error& e) {
      SweepRow row;
      row.config = f.stem().string();
      row.error = fmt::format("{}: {}", to_string(e.kind()), e.what());
      invalid.rows.push_back(row);
      invalid.failed.push_back(row.config);
    }
  }
  SweepReport rep = sweep(configs, jobs, out_dir);
  rep.rows.insert(rep.rows.end(), invalid.rows.begin(), invalid.rows.end());
  rep.failed.insert(rep.failed.end(), invalid.failed.begin(), invalid.failed.end());
  std::sort(rep.rows.begin(), rep.rows.end(),
            [](const SweepRow& a, const SweepRow& b) { return a.config < b.config; });
  std::sort(rep.failed.begin(), rep.failed.end());
  return rep;
}

Json to_json(const SweepReport& r) {
  Json rows = Json::array();
  double c_max = 0.0;
  bool any = false;
  for (const auto& row : r.rows) {
    Json j{{"config", row.config}, {"kind", row.kind}, {"gamma", row.gamma}, {"eps", row.eps},
           {"lambda", row.lambda}, {"pass", row.pass}};
    j["C_star"] = row.has_c_star ? Json(row.c_star) : Json(nullptr);
    if (!row.error.empty()) j["error"] = row.error;
    if (row.has_c_star) {
      c_max = any ? std::max(c_max, row.c_star) : row.c_star;
      any = true;
    }
    rows.push_back(j);
  }
  return {{"rows", rows},
          {"failed", r.failed},
          {"status", r.ok() ? "ok" : "partial-failure"},
          {"C_star_max", any ? Json(c_max) : Json(nullptr)}};
}

}  // namespace radvac
