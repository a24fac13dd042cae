// Acceptance run: one PASS/FAIL line per criterion. Criteria listed with
// --known-fail are still run and reported but do not set the exit status.
#include <fmt/format.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "radvac/background.hpp"
#include "radvac/calculus.hpp"
#include "radvac/diagnostics.hpp"
#include "radvac/error.hpp"
#include "radvac/harness.hpp"
#include "radvac/oracle.hpp"
#include "radvac/solver.hpp"

namespace {

using namespace radvac;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = false;
  std::string detail;
};

double order(double coarse, double fine) { return std::log2(coarse / fine); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ProfileSpec bump() { return ProfileSpec::poly({1.0, 0.0, 1.0, 0.0, -0.5}); }

struct Case {
  AffineMotion motion;
  BackgroundProfile profile;
};

Case make_case(double gamma, int n, double tau_final, const ProfileSpec& spec = bump()) {
  auto grid = RadialGrid::make(n);
  return {integrate_affine_to_tau(gamma, 1.0, 0.0, tau_final, 1e-12),
          build_profile(spec, gamma, grid)};
}

Outcome affine_closed_form() {
  const auto t0 = std::chrono::steady_clock::now();
  const AffineMotion m = integrate_affine(5.0 / 3.0, 1.0, 0.0, 10.0, 1e-12);
  double err = 0.0;
  for (const auto& s : m.samples) err = std::max(err, std::abs(s.a - std::sqrt(1 + s.t * s.t)));
  for (int k = 0; k <= 10000; ++k) {
    const double t = 1e-3 * k;
    err = std::max(err, std::abs(m.at_t(t).a - std::sqrt(1 + t * t)));
  }
  const double a1_err = std::abs(m.a1_limit - 1.0);
  const double secs = seconds_since(t0);
  return {err <= 1e-8 && a1_err <= 1e-3 && secs < 1.0,
          fmt::format("max|a-sqrt(1+t^2)| {:.2e}, |a1-1| {:.2e}, {:.3f} s", err, a1_err, secs)};
}

Outcome entropy_weight() {
  const auto g = RadialGrid::make(256);
  const BackgroundProfile flat = build_profile(ProfileSpec::poly({1.0}), 1.4, g);
  double d_err = 0.0;
  for (int j = 0; j < g->size(); ++j) {
    const double r = g->node(j);
    d_err = std::max(d_err, std::abs(flat.d_weight[j] - 0.5 * (1 - r * r)));
  }
  const double flat_res = balance_residual(flat).max_abs();
  // The flat residual cancels to round-off, so the order is measured on a curved profile.
  std::vector<double> res;
  for (int n : {64, 128, 256})
    res.push_back(balance_residual(build_profile(bump(), 1.4, RadialGrid::make(n))).max_abs());
  const double p = std::min(order(res[0], res[1]), order(res[1], res[2]));
  const double slope = boundary_slope(flat);
  const bool pass = d_err <= 1e-10 && flat_res <= 1e-10 && p >= 1.7 && std::abs(slope + 1) <= 1e-3;
  return {pass, fmt::format("max|d-(1-r^2)/2| {:.2e}, flat balance {:.2e}, curved order {:.2f}, "
                            "slope {:.6f}",
                            d_err, flat_res, p, slope)};
}

Outcome operator_identities() {
  bool pass = true;
  std::string detail;
  for (int so : {2, 4}) {
    const OperatorReport r = operator_properties(2, 1, so, {64, 128, 256});
    pass = pass && r.min_order >= so - 0.3;
    detail += fmt::format("{}stencil {}: min order {:.2f} over {} checks", detail.empty() ? "" : "; ",
                          so, r.min_order, r.checks.size());
  }
  return {pass, detail};
}

Outcome fixed_point() {
  double worst = 0.0;
  for (double gamma : {1.4, 5.0 / 3.0, 2.0}) {
    const Case c = make_case(gamma, 256, 5.0);
    SolveControls sc;
    sc.sample_every = 0.25;
    const Trajectory t = solve(PerturbationState::zero(c.profile.grid_ptr()), c.motion, c.profile,
                               5.0, sc);
    for (const auto& s : t.states) worst = std::max({worst, s.H.max_abs(), s.H_tau.max_abs()});
  }
  return {worst <= 1e-10, fmt::format("sup |H|, |H_tau| {:.2e} over three gammas", worst)};
}

Discrepancy oracle_run(int n) {
  const Case c = make_case(1.4, n, 1.5);
  InitialData d;
  d.eps = d.lambda = 1e-3;
  const PerturbationState init = make_initial(d, c.motion, c.profile, 2);
  ChiControls cc;
  cc.sample_every = 0.05;
  const ChiTrajectory ct = solve_chi(chi_from_perturbation(init, c.motion), c.profile, 1.0, cc);
  SolveControls sc;
  sc.monitor = false;
  for (const auto& s : ct.states)
    if (s.t > 0.0) sc.sample_times.push_back(c.motion.at_t(s.t).tau);
  const Trajectory ht = solve(init, c.motion, c.profile, sc.sample_times.back(), sc);
  return compare_solutions(ct, ht, c.motion);
}

Outcome oracle_equivalence() {
  const Discrepancy coarse = oracle_run(256);
  const Discrepancy fine = oracle_run(512);
  const double p = order(coarse.rel_norm, fine.rel_norm);
  return {fine.rel_sup <= 1e-6 && p >= 2.0,
          fmt::format("rel discrepancy {:.2e} at n=512 over t in [{}, {}], ||.||_0 order {:.2f}",
                      fine.rel_sup, fine.t_begin, fine.t_end, p)};
}

Outcome energy_identity() {
  std::vector<double> rel;
  for (int n : {128, 256, 512}) {
    const Case c = make_case(1.4, n, 2.5);
    InitialData d;
    d.eps = d.lambda = 1e-4;
    SolveControls sc;
    sc.monitor = false;
    sc.sample_every = 1.28 / n;
    const Trajectory t =
        solve(make_initial(d, c.motion, c.profile, 2), c.motion, c.profile, 2.0, sc);
    rel.push_back(integrate_identity_residual(energy_reports(t.states, c.motion, c.profile, 2))
                      .relative);
  }
  const double r1 = rel[0] / rel[1], r2 = rel[1] / rel[2];
  return {rel[2] <= 1e-4 && r1 >= 2.0 && r2 >= 2.0,
          fmt::format("relative residual {:.2e} / {:.2e} / {:.2e} at n=128/256/512, ratios "
                      "{:.1f}, {:.1f}",
                      rel[0], rel[1], rel[2], r1, r2)};
}

struct StabilityRun {
  double gamma = 0.0;
  double eps = 0.0;
  bool tripped = false;
  std::string violated;
  double sup_sn = 0.0;
  double rate = kInf;
  std::string fit_error;
  Case c;
  Trajectory t;
};

std::map<std::pair<double, double>, StabilityRun> stability_cache;

const StabilityRun& stability_run(double gamma, double eps) {
  const auto key = std::make_pair(gamma, eps);
  if (auto it = stability_cache.find(key); it != stability_cache.end()) return it->second;
  StabilityRun r;
  r.gamma = gamma;
  r.eps = eps;
  r.c = make_case(gamma, 128, 8.5);
  InitialData d;
  d.eps = d.lambda = eps;
  const PerturbationState init = make_initial(d, r.c.motion, r.c.profile, 2);
  SolveControls sc;
  sc.sample_every = 0.05;
  try {
    r.t = solve(init, r.c.motion, r.c.profile, 8.0, sc);
  } catch (const AprioriViolated& e) {
    r.tripped = true;
    r.violated = e.bound();
    r.t = e.partial();
  }
  r.sup_sn = r.t.sn.empty() ? kInf : r.t.sn.back();
  std::vector<double> taus, vel;
  const double d_exp = r.c.motion.exponents.d_exp;
  for (const auto& s : r.t.states) {
    taus.push_back(s.tau);
    vel.push_back(std::pow(r.c.motion.at_tau(s.tau).a, d_exp) *
                  weighted_norm(s.H_tau, 0, r.c.profile));
  }
  try {
    r.rate = fit_decay(taus, vel, r.c.motion).rate;
  } catch (const Error& e) {
    r.fit_error = e.what();
  }
  return stability_cache.emplace(key, std::move(r)).first->second;
}

constexpr double kGammas[] = {1.4, 5.0 / 3.0, 2.0};
constexpr double kEps[] = {1e-3, 1e-4};

Outcome stability_sweep() {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  std::string detail;
  for (double gamma : kGammas)
    for (double eps : kEps) {
      const StabilityRun& r = stability_run(gamma, eps);
      const double c_star = r.sup_sn / (2 * eps);
      const bool ok = !r.tripped && c_star <= 100.0 && r.fit_error.empty() && r.rate < 0.0;
      pass = pass && ok;
      detail += fmt::format("{}g={:.3f} e={:.0e}: C*={:.3g} rate={:+.4f}{}{}",
                            detail.empty() ? "" : "; ", gamma, eps, c_star, r.rate,
                            r.tripped ? " tripped " + r.violated : "",
                            r.fit_error.empty() ? "" : " " + r.fit_error);
    }
  const double secs = seconds_since(t0);
  pass = pass && secs <= 600.0;
  return {pass, fmt::format("{}; {:.0f} s", detail, secs)};
}

Outcome norm_energy_equivalence() {
  std::vector<EquivalenceResult> res;
  for (double eps : kEps) {
    const StabilityRun& r = stability_run(1.4, eps);
    if (r.tripped) return {false, fmt::format("run at eps={:.0e} tripped {}", eps, r.violated)};
    res.push_back(check_norm_energy_equivalence(r.t.states, r.c.motion, r.c.profile, 2));
  }
  auto spread = [](double a, double b) { return std::max(a, b) / std::min(a, b); };
  bool pass = true;
  for (const auto& e : res)
    pass = pass && !e.trivial && e.C1 > 0.0 && e.C2 > 0.0 && std::isfinite(e.C1) &&
           std::isfinite(e.C2);
  const double s1 = spread(res[0].C1, res[1].C1), s2 = spread(res[0].C2, res[1].C2);
  pass = pass && s1 <= 2.0 && s2 <= 2.0;
  return {pass, fmt::format("C1 {:.4g}/{:.4g}, C2 {:.4g}/{:.4g} at eps 1e-3/1e-4, spreads {:.3f}, "
                            "{:.3f}",
                            res[0].C1, res[1].C1, res[0].C2, res[1].C2, s1, s2)};
}

Outcome coercivity() {
  double worst = 0.0;
  int runs = 0;
  for (double gamma : kGammas)
    for (double eps : kEps) {
      const StabilityRun& r = stability_run(gamma, eps);
      if (r.tripped) continue;
      ++runs;
      for (int i = 0; i <= 2; ++i)
        worst = std::max(worst, check_coercivity(r.t.states, r.c.motion, r.c.profile, i));
    }
  return {runs > 0 && worst <= 10.0,
          fmt::format("max ratio {:.4f} over {} accepted runs, i <= 2", worst, runs)};
}

Outcome lwp_iteration() {
  const Case c = make_case(1.4, 128, 1.0);
  InitialData d;
  d.eps = d.lambda = 1e-3;
  const PerturbationState init = make_initial(d, c.motion, c.profile, 2);
  const double T = 0.25;
  const auto its = lwp_iterate(init, c.motion, c.profile, T, 8);
  double worst = 0.0;
  for (size_t j = 2; j < its.size(); ++j) worst = std::max(worst, its[j].ratio);
  SolveControls sc;
  sc.sample_times = {T};
  const Trajectory t = solve(init, c.motion, c.profile, T, sc);
  const GridFunction& ref = t.states.back().H;
  const double rel = std::sqrt(weighted_norm(its.back().states.back().H - ref, 0, c.profile) /
                               weighted_norm(ref, 0, c.profile));
  return {its.size() >= 3 && worst <= 0.5 && rel <= 1e-6,
          fmt::format("{} iterates, max contraction {:.3e} for j >= 2, limit vs solve {:.2e}",
                      its.size(), worst, rel)};
}

Outcome embedding() {
  const SurveyReport r = embedding_survey(100, 7, 256);
  bool finite = true;
  for (int m = 0; m < 2; ++m)
    for (int q = 0; q < 3; ++q)
      finite = finite && std::isfinite(r.embed_first[m][q]) && std::isfinite(r.embed_second[m][q]) &&
               r.embed_first[m][q] > 0.0 && r.embed_second[m][q] > 0.0;
  return {finite && r.max_spread <= 2.0,
          fmt::format("100 draws, m in {{1,2}}, max spread between halves {:.3f}", r.max_spread)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> known_fail, only;
  app.add_option("--known-fail", known_fail, "Criteria reported but not counted as failures");
  app.add_option("--only", only, "Run only these criteria");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "affine closed form", affine_closed_form},
      {2, "entropy weight", entropy_weight},
      {3, "operator identities", operator_identities},
      {4, "fixed point", fixed_point},
      {5, "oracle equivalence", oracle_equivalence},
      {6, "discrete energy identity", energy_identity},
      {7, "stability sweep", stability_sweep},
      {8, "norm-energy equivalence", norm_energy_equivalence},
      {9, "coercivity", coercivity},
      {10, "LWP iteration", lwp_iteration},
      {11, "embedding survey", embedding},
  };
  const std::set<int> known(known_fail.begin(), known_fail.end());
  const std::set<int> selected(only.begin(), only.end());

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, fmt::format("error: {}", e.what())};
    }
    const bool expected = known.count(c.id) > 0;
    const char* tag = o.pass ? "PASS" : expected ? "FAIL (known)" : "FAIL";
    fmt::print("{} {:>2} {}: {} [{:.1f} s]\n", tag, c.id, c.name, o.detail, seconds_since(t0));
    std::fflush(stdout);
    if (!o.pass && !expected) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
