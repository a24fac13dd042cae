#include "radvac/solver.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "radvac/diagnostics.hpp"
#include "radvac/error.hpp"

namespace radvac {

PerturbationState PerturbationState::zero(std::shared_ptr<const RadialGrid> grid, double tau) {
  return {tau, GridFunction::zeros(grid, Parity::kOdd), GridFunction::zeros(grid, Parity::kOdd)};
}

namespace {

Geometry assemble(GridFunction theta, GridFunction theta_r, GridFunction theta_rr, GridFunction DrH,
                  GridFunction D2H, double gamma) {
  Geometry g;
  const int n = theta.size();
  g.xi = theta + 1.0;
  g.Jm1 = GridFunction::zeros(theta.grid_ptr(), Parity::kEven);
  g.J = GridFunction::zeros(theta.grid_ptr(), Parity::kEven);
  g.w = GridFunction::zeros(theta.grid_ptr(), Parity::kEven);
  for (int j = 0; j < n; ++j) {
    const double th = theta[j];
    const double u = DrH[j] - 2.0 * th;
    // J - 1 = (1+th)^2 (1+u) - 1 with the O(1) parts cancelled by hand.
    g.Jm1[j] = DrH[j] + th * th + (2.0 * th + th * th) * u;
    g.J[j] = 1.0 + g.Jm1[j];
    const double xi2 = g.xi[j] * g.xi[j];
    g.w[j] = xi2 * xi2 * std::pow(g.J[j], -gamma - 1.0);
  }
  g.theta = std::move(theta);
  g.theta_r = std::move(theta_r);
  g.theta_rr = std::move(theta_rr);
  g.DrH = std::move(DrH);
  g.D2H = std::move(D2H);
  return g;
}

void check_nondegenerate(const Geometry& g, double tau) {
  for (int j = 0; j < g.J.size(); ++j) {
    if (!(g.J[j] > 0.0))
      fail(ErrorKind::kDegenerateFlowMap,
           fmt::format("J = {} at tau={:.6g}, r={:.6g}", g.J[j], tau, g.J.grid().node(j)));
  }
}

void check_finite(const GridFunction& f, double tau, const char* what) {
  for (int j = 0; j < f.size(); ++j)
    if (!std::isfinite(f[j])) throw BlowUpError(tau, f.grid().node(j), what);
}

}  // namespace

Geometry derive_geometry(const GridFunction& H, double gamma) {
  GridFunction theta = over_r(H);
  theta.set_parity(Parity::kEven);
  GridFunction theta_r = apply_dr(theta);
  GridFunction theta_rr = apply_dr(theta_r);
  GridFunction DrH = apply_Dr(H);
  GridFunction D2H = apply_dr(DrH);
  return assemble(std::move(theta), std::move(theta_r), std::move(theta_rr), std::move(DrH),
                  std::move(D2H), gamma);
}

Geometry geometry_from_exact(std::shared_ptr<const RadialGrid> grid, double gamma,
                             const std::function<double(double)>& theta,
                             const std::function<double(double)>& theta_r,
                             const std::function<double(double)>& theta_rr) {
  auto th = GridFunction::sample(grid, theta, Parity::kEven);
  auto thr = GridFunction::sample(grid, theta_r, Parity::kOdd);
  auto thrr = GridFunction::sample(grid, theta_rr, Parity::kEven);
  // D_r H = r theta_r + 3 theta, d/dr D_r H = r theta_rr + 4 theta_r.
  auto DrH = GridFunction::sample(
      grid, [&](double r) { return r * theta_r(r) + 3.0 * theta(r); }, Parity::kEven);
  auto D2H = GridFunction::sample(
      grid, [&](double r) { return r * theta_rr(r) + 4.0 * theta_r(r); }, Parity::kOdd);
  return assemble(std::move(th), std::move(thr), std::move(thrr), std::move(DrH), std::move(D2H),
                  gamma);
}

std::string AprioriMonitor::violated() const {
  std::string s;
  auto add = [&](bool ok, const char* name) {
    if (!ok) s += s.empty() ? name : std::string(",") + name;
  };
  add(sn_bound, "S_N");
  add(j_bound, "J");
  add(dth_bound, "dr_theta");
  add(d2th_bound, "dr2_theta");
  return s;
}

AprioriMonitor make_monitor(const Geometry& g, double sn) {
  AprioriMonitor m;
  m.sn = sn;
  m.j_dev = g.Jm1.max_abs();
  m.dth = g.theta_r.max_abs();
  m.d2th = g.theta_rr.max_abs();
  const double bound = 1.0 / 3.0;
  m.sn_bound = m.sn < bound;
  m.j_bound = m.j_dev < bound;
  m.dth_bound = m.dth < bound;
  m.d2th_bound = m.d2th < bound;
  return m;
}

Remainders compute_remainders(const Geometry& g, const BackgroundProfile& profile) {
  const double gamma = profile.gamma;
  const GridFunction s = sound_weight(profile);
  const auto& grid = g.theta.grid_ptr();
  const int n = grid->size();
  Remainders R{GridFunction::zeros(grid, Parity::kEven), GridFunction::zeros(grid, Parity::kEven),
               GridFunction::zeros(grid, Parity::kEven), GridFunction::zeros(grid, Parity::kEven),
               GridFunction::zeros(grid, Parity::kNone)};
  for (int j = 0; j < n; ++j) {
    const double r = grid->node(j);
    const double th = g.theta[j], thr = g.theta_r[j], xi = g.xi[j];
    const double xi2 = xi * xi;
    const double Jm1 = g.Jm1[j];
    const double Jmg_m1 = std::expm1(-gamma * std::log1p(Jm1));          // J^-gamma - 1
    const double Jmg1_m1 = std::expm1(-(gamma + 1.0) * std::log1p(Jm1)); // J^(-gamma-1) - 1
    const double Jmg1 = 1.0 + Jmg1_m1;
    const double rthr = r * thr;
    const double bracket = Jmg_m1 + gamma * Jm1 + gamma * Jmg1_m1 * xi2 * g.DrH[j];
    R.R1[j] = -2.0 * gamma * s[j] * xi2 * xi * Jmg1 * thr * thr;
    R.R2a[j] = -xi2 * bracket;
    R.R2b[j] = -gamma * xi2 * (3.0 * th * th + 2.0 * th * th * th);
    R.R2[j] = R.R2a[j] + R.R2b[j];
    const double d_rxi2 = xi2 + 2.0 * r * xi * thr;
    R.R3[j] = r * xi2 * gamma * Jmg1_m1 * (2.0 * xi * thr * thr * r) -
              2.0 * r * gamma * xi2 * Jmg1_m1 * xi * thr * (rthr + 3.0 * th) - d_rxi2 * bracket;
  }
  return R;
}

Remainders compute_remainders(const PerturbationState& state, const BackgroundProfile& profile) {
  const Geometry g = derive_geometry(state.H, profile.gamma);
  check_nondegenerate(g, state.tau);
  return compute_remainders(g, profile);
}

HEquation::HEquation(const BackgroundProfile& profile, const AffineMotion& motion)
    : profile_(profile),
      motion_(motion),
      gamma_(profile.gamma),
      s_(sound_weight(profile)),
      m0_(drift(profile, 0)) {}

GridFunction HEquation::rhs(double tau, const GridFunction& H, const GridFunction& H_tau,
                            const Geometry& g) const {
  const MotionSample m = motion_.at_tau(tau);
  const double damp = m.a_tau / m.a;
  const double spring = std::pow(m.a, 3.0 - 3.0 * gamma_);
  const Remainders R = compute_remainders(g, profile_);
  const int n = H.size();
  GridFunction out = GridFunction::zeros(H.grid_ptr(), Parity::kOdd);
  for (int j = 0; j < n; ++j) {
    const double r = H.grid().node(j);
    const double L0H = s_[j] * g.D2H[j] + m0_[j] * g.DrH[j];
    const double bracket = gamma_ * g.w[j] * L0H + H[j] + H[j] * H[j] / r - r * R.R1[j] -
                           r * R.R2[j];
    out[j] = -damp * H_tau[j] + spring * bracket;
  }
  check_finite(out, tau, "non-finite H_tau_tau");
  return out;
}

GridFunction HEquation::rhs(const PerturbationState& state) const {
  const Geometry g = derive_geometry(state.H, gamma_);
  check_nondegenerate(g, state.tau);
  return rhs(state.tau, state.H, state.H_tau, g);
}

GridFunction HEquation::linear_rhs(const PerturbationState& state) const {
  const MotionSample m = motion_.at_tau(state.tau);
  const double damp = m.a_tau / m.a;
  const double spring = std::pow(m.a, 3.0 - 3.0 * gamma_);
  const GridFunction DrH = apply_Dr(state.H);
  const GridFunction D2H = apply_dr(DrH);
  GridFunction out = GridFunction::zeros(state.H.grid_ptr(), Parity::kOdd);
  for (int j = 0; j < out.size(); ++j) {
    const double L0H = s_[j] * D2H[j] + m0_[j] * DrH[j];
    out[j] = -damp * state.H_tau[j] + spring * (gamma_ * L0H + state.H[j]);
  }
  return out;
}

GridFunction HEquation::rhs_theta_form(const PerturbationState& state) const {
  const MotionSample m = motion_.at_tau(state.tau);
  const double damp = m.a_tau / m.a;
  const double spring = std::pow(m.a, 3.0 - 3.0 * gamma_);
  const Geometry g = derive_geometry(state.H, gamma_);
  const GridFunction J_r = apply_dr(g.J);
  GridFunction out = GridFunction::zeros(state.H.grid_ptr(), Parity::kOdd);
  for (int j = 0; j < out.size(); ++j) {
    const double r = state.H.grid().node(j);
    const double th = g.theta[j], xi2 = g.xi[j] * g.xi[j];
    const double bracket = r * th * (1.0 + th) + r * xi2 * (std::pow(g.J[j], -gamma_) - 1.0) +
                           gamma_ * s_[j] * xi2 * std::pow(g.J[j], -gamma_ - 1.0) * J_r[j];
    out[j] = -damp * state.H_tau[j] + spring * bracket;
  }
  return out;
}

double HEquation::max_sound_speed(const PerturbationState& state) const {
  const MotionSample m = motion_.at_tau(state.tau);
  const Geometry g = derive_geometry(state.H, gamma_);
  double mx = 0.0;
  for (int j = 0; j < s_.size(); ++j) mx = std::max(mx, s_[j] * g.w[j]);
  return std::sqrt(gamma_ * std::pow(m.a, 3.0 - 3.0 * gamma_) * mx);
}

GridFunction rhs_H(const PerturbationState& state, const AffineMotion& motion,
                   const BackgroundProfile& profile) {
  return HEquation(profile, motion).rhs(state);
}

double step_limit(const HEquation& eq, const PerturbationState& state, double cfl,
                  double sigma) {
  const double h = state.H.grid().spacing();
  double limit = cfl * h / eq.max_sound_speed(state);
  // The damping eigenvalues reach sigma/h; keep them inside the RK4 region.
  if (sigma > 0.0) limit = std::min(limit, h / sigma);
  return limit;
}

PerturbationState step(const PerturbationState& state, const HEquation& eq, double dtau,
                       const StepOptions& opt) {
  const double limit = step_limit(eq, state, opt.cfl, opt.dissipation);
  if (!(dtau > 0.0) || dtau > limit * (1.0 + 1e-9))
    fail(ErrorKind::kStepRejected, fmt::format("dtau = {} exceeds CFL limit {}", dtau, limit));

  auto accel = [&](double tau, const GridFunction& H, const GridFunction& Ht) {
    PerturbationState s{tau, H, Ht};
    GridFunction a = opt.linear ? eq.linear_rhs(s) : eq.rhs(s);
    if (opt.forcing) a += opt.forcing(tau);
    if (opt.dissipation > 0.0) a += dissipation(Ht, opt.dissipation);
    return a;
  };
  auto velocity = [&](const GridFunction& H, const GridFunction& Ht) {
    return opt.dissipation > 0.0 ? Ht + dissipation(H, opt.dissipation) : Ht;
  };
  const double t0 = state.tau;
  const GridFunction& H = state.H;
  const GridFunction& V = state.H_tau;
  const GridFunction k1H = velocity(H, V);
  const GridFunction k1V = accel(t0, H, V);
  const GridFunction H2 = H + (0.5 * dtau) * k1H, V2 = V + (0.5 * dtau) * k1V;
  const GridFunction k2H = velocity(H2, V2);
  const GridFunction k2V = accel(t0 + 0.5 * dtau, H2, V2);
  const GridFunction H3 = H + (0.5 * dtau) * k2H, V3 = V + (0.5 * dtau) * k2V;
  const GridFunction k3H = velocity(H3, V3);
  const GridFunction k3V = accel(t0 + 0.5 * dtau, H3, V3);
  const GridFunction H4 = H + dtau * k3H, V4 = V + dtau * k3V;
  const GridFunction k4H = velocity(H4, V4);
  const GridFunction k4V = accel(t0 + dtau, H4, V4);

  PerturbationState next{t0 + dtau, H, V};
  const double c = dtau / 6.0;
  for (int j = 0; j < H.size(); ++j) {
    next.H[j] += c * (k1H[j] + 2.0 * k2H[j] + 2.0 * k3H[j] + k4H[j]);
    next.H_tau[j] += c * (k1V[j] + 2.0 * k2V[j] + 2.0 * k3V[j] + k4V[j]);
  }
  next.H.set_parity(Parity::kOdd);
  next.H_tau.set_parity(Parity::kOdd);
  check_finite(next.H, next.tau, "non-finite H");
  check_finite(next.H_tau, next.tau, "non-finite H_tau");
  const Geometry g = derive_geometry(next.H, eq.gamma());
  for (int j = 0; j < g.J.size(); ++j)
    if (!(g.J[j] >= 1e-6)) throw BlowUpError(next.tau, g.J.grid().node(j), "Jacobian collapse");
  return next;
}

PerturbationState step(const PerturbationState& state, const AffineMotion& motion,
                       const BackgroundProfile& profile, double dtau) {
  return step(state, HEquation(profile, motion), dtau);
}

AprioriViolated::AprioriViolated(std::string bound, double tau, double value, Trajectory partial)
    : Error(ErrorKind::kAprioriViolated,
            fmt::format("bound {} violated at tau={:.6g} (value {:.6g})", bound, tau, value)),
      bound_(std::move(bound)),
      tau_(tau),
      value_(value),
      partial_(std::move(partial)) {}

namespace {

double violating_value(const AprioriMonitor& m) {
  if (!m.sn_bound) return m.sn;
  if (!m.j_bound) return m.j_dev;
  if (!m.dth_bound) return m.dth;
  return m.d2th;
}

}  // namespace

Trajectory solve(const PerturbationState& initial, const AffineMotion& motion,
                 const BackgroundProfile& profile, double tau_final,
                 const SolveControls& controls) {
  require(tau_final > initial.tau, ErrorKind::kInvalidParameter, "tau_final must exceed start");
  require(motion.tau_max() >= tau_final, ErrorKind::kInvalidParameter,
          "motion does not cover tau_final");
  const HEquation eq(profile, motion);
  StepOptions sopt;
  sopt.cfl = controls.cfl;
  sopt.linear = controls.linear;
  sopt.dissipation = controls.dissipation;
  sopt.forcing = controls.forcing;

  std::vector<double> targets = controls.sample_times;
  if (targets.empty() && !controls.sample_every_step) {
    const int count = static_cast<int>(std::ceil((tau_final - initial.tau) / controls.sample_every - 1e-9));
    for (int k = 1; k <= count; ++k)
      targets.push_back(std::min(initial.tau + k * controls.sample_every, tau_final));
  }
  std::sort(targets.begin(), targets.end());
  std::erase_if(targets, [&](double t) { return t <= initial.tau || t > tau_final; });
  if (targets.empty() || targets.back() < tau_final) targets.push_back(tau_final);

  Trajectory traj;
  traj.N = controls.N;
  double running = 0.0;
  auto record = [&](const PerturbationState& s) {
    const double bracket = sn_bracket(s, motion, profile, controls.N);
    running = std::max(running, bracket);
    const Geometry g = derive_geometry(s.H, profile.gamma);
    const AprioriMonitor mon = make_monitor(g, running);
    traj.states.push_back(s);
    traj.monitors.push_back(mon);
    traj.sn.push_back(running);
    if (controls.monitor && !mon.ok()) {
      const std::string bound = mon.violated();
      const double value = violating_value(mon);
      throw AprioriViolated(bound, s.tau, value, std::move(traj));
    }
  };

  PerturbationState state = initial;
  record(state);
  size_t next = 0;
  while (next < targets.size()) {
    const double limit = step_limit(eq, state, controls.cfl, controls.dissipation);
    double dtau = std::min({limit, controls.dtau_max, targets[next] - state.tau});
    const bool lands = dtau >= targets[next] - state.tau - 1e-14;
    state = step(state, eq, dtau, sopt);
    ++traj.steps;
    if (lands) {
      state.tau = targets[next];
      ++next;
      record(state);
    } else if (controls.sample_every_step) {
      record(state);
    }
  }
  return traj;
}

PerturbationState make_initial(const InitialData& data, const AffineMotion& motion,
                               const BackgroundProfile& profile, int N, InitialInfo* info) {
  require(data.eps >= 0.0 && data.lambda >= 0.0, ErrorKind::kInvalidParameter,
          "eps and lambda must be nonnegative");
  const auto& grid = profile.grid_ptr();
  auto shape = [&](const std::vector<double>& c) {
    return GridFunction::sample(
        grid,
        [&c](double r) {
          double acc = 0.0;
          for (size_t i = c.size(); i-- > 0;) acc = acc * r * r + c[i];
          return r * acc;
        },
        Parity::kOdd);
  };
  PerturbationState unit{0.0, shape(data.p), shape(data.q)};
  const double s1 = sn_bracket(unit, motion, profile, N);
  const double n1 = weighted_norm(unit.H, 0, profile);
  double amp = 0.0;
  if (s1 > 0.0) amp = std::sqrt(data.eps / s1);
  if (n1 > 0.0) amp = std::min(amp, std::sqrt(data.lambda / n1));
  PerturbationState out{0.0, unit.H * amp, unit.H_tau * amp};
  if (info) {
    info->amplitude = amp;
    info->sn0 = amp * amp * s1;
    info->h0_norm = amp * amp * n1;
  }
  return out;
}

}  // namespace radvac
