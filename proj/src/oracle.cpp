#include "radvac/oracle.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "radvac/calculus.hpp"
#include "radvac/error.hpp"

namespace radvac {

ChiState chi_from_perturbation(const PerturbationState& state, const AffineMotion& motion) {
  const MotionSample m = motion.at_tau(state.tau);
  const GridFunction xi = over_r(state.H) + 1.0;
  GridFunction chi = m.a * xi;
  GridFunction chi_t = m.a_t * xi + over_r(state.H_tau);
  chi.set_parity(Parity::kEven);
  chi_t.set_parity(Parity::kEven);
  return {m.t, std::move(chi), std::move(chi_t)};
}

namespace {

// chi minus a constant, so stencil round-off scales with the deviation rather
// than with chi itself.
GridFunction chi_deviation(const GridFunction& chi) {
  GridFunction dev = chi + (-chi[chi.size() - 1]);
  dev.set_parity(Parity::kEven);
  return dev;
}

}  // namespace

GridFunction chi_jacobian(const GridFunction& chi) {
  GridFunction J = square(chi) * (chi + times_r(apply_dr(chi_deviation(chi))));
  J.set_parity(Parity::kEven);
  return J;
}

namespace {

struct ChiCoefficients {
  GridFunction s;        // rho^(gamma-1) d
  GridFunction gravity;  // -(rho^gamma d)_r / (rho r)
};

ChiCoefficients chi_coefficients(const BackgroundProfile& profile) {
  const double g = profile.gamma;
  GridFunction grav = profile.coefficient(
      [g](const Jet& rho, const Jet& d, const Jet& r) {
        const Jet P = pow(rho, g) * d;
        return -1.0 * (P.diff() / (rho * r));
      },
      0, Parity::kEven);
  return {sound_weight(profile), std::move(grav)};
}

GridFunction chi_rhs(const ChiState& state, const ChiCoefficients& c, double gamma) {
  const GridFunction& chi = state.chi;
  const GridFunction dev = chi_deviation(chi);
  const GridFunction chi_r = apply_dr(dev);
  const GridFunction J = square(chi) * (chi + times_r(chi_r));
  for (int j = 0; j < J.size(); ++j)
    if (!(J[j] > 0.0))
      fail(ErrorKind::kDegenerateFlowMap,
           fmt::format("Jacobian {} at r = {} (t = {})", J[j], J.grid().node(j), state.t));
  const GridFunction chi2 = square(chi);
  // J_r / r = chi^2 (r chi_rr + 4 chi_r) / r + 2 chi chi_r^2, with r chi_rr + 4 chi_r = d/dr D_r(r chi)
  const GridFunction Jr_over_r =
      chi2 * over_r(apply_dr(apply_Dr(times_r(dev)))) + 2.0 * (chi * square(chi_r));
  GridFunction out(state.chi.grid_ptr(), std::vector<double>(J.size()), Parity::kEven);
  for (int j = 0; j < J.size(); ++j) {
    const double jm = std::pow(J[j], -gamma);
    out[j] = chi2[j] * jm * (c.gravity[j] + gamma * c.s[j] * Jr_over_r[j] / J[j]);
  }
  if (!out.all_finite()) throw BlowUpError(state.t, 0.0, "non-finite chi acceleration");
  return out;
}

double chi_step_limit(const ChiState& st, const ChiCoefficients& c, double gamma, double cfl,
                      double sigma) {
  const GridFunction J = chi_jacobian(st.chi);
  double c2 = 0.0;
  for (int j = 0; j < J.size(); ++j)
    c2 = std::max(c2, gamma * c.s[j] * std::pow(st.chi[j], 4) * std::pow(J[j], -gamma - 1.0));
  const double h = J.grid().spacing();
  double lim = c2 > 0.0 ? cfl * h / std::sqrt(c2) : 1.0;
  if (sigma > 0.0) lim = std::min(lim, h / sigma);
  return lim;
}

}  // namespace

GridFunction chi_rhs(const ChiState& state, const BackgroundProfile& profile) {
  return chi_rhs(state, chi_coefficients(profile), profile.gamma);
}

ChiTrajectory solve_chi(const ChiState& initial, const BackgroundProfile& profile, double t_final,
                        const ChiControls& controls) {
  require(t_final >= initial.t, ErrorKind::kInvalidParameter, "t_final before initial time");
  require(controls.cfl > 0.0 && controls.dt_max > 0.0, ErrorKind::kInvalidParameter,
          "cfl and dt_max must be positive");
  const ChiCoefficients coef = chi_coefficients(profile);
  const double gamma = profile.gamma;
  const double sigma = controls.dissipation;

  std::vector<double> targets = controls.sample_times;
  if (targets.empty()) {
    require(controls.sample_every > 0.0, ErrorKind::kInvalidParameter, "sample_every must be > 0");
    const int k = static_cast<int>(std::floor((t_final - initial.t) / controls.sample_every + 1e-9));
    for (int i = 1; i <= k; ++i) targets.push_back(initial.t + i * controls.sample_every);
  }
  std::sort(targets.begin(), targets.end());
  std::erase_if(targets, [&](double t) { return t <= initial.t || t > t_final; });
  if (targets.empty() || targets.back() < t_final) targets.push_back(t_final);

  auto accel = [&](const ChiState& s) {
    GridFunction a = chi_rhs(s, coef, gamma);
    if (sigma > 0.0) a += dissipation(s.chi_t, sigma);
    return a;
  };
  auto vel = [&](const ChiState& s) {
    return sigma > 0.0 ? s.chi_t + dissipation(s.chi, sigma) : s.chi_t;
  };
  auto axpy = [](const ChiState& s, double dt, const GridFunction& dx, const GridFunction& dv) {
    ChiState o{s.t + dt, s.chi + dt * dx, s.chi_t + dt * dv};
    o.chi.set_parity(Parity::kEven);
    o.chi_t.set_parity(Parity::kEven);
    return o;
  };

  ChiTrajectory out;
  out.states.push_back(initial);
  ChiState cur = initial;
  for (double target : targets) {
    while (cur.t < target) {
      double dt = std::min({chi_step_limit(cur, coef, gamma, controls.cfl, sigma),
                            controls.dt_max, target - cur.t});
      if (target - cur.t - dt < 1e-12 * std::max(1.0, target)) dt = target - cur.t;
      const GridFunction k1x = vel(cur), k1v = accel(cur);
      const ChiState s2 = axpy(cur, 0.5 * dt, k1x, k1v);
      const GridFunction k2x = vel(s2), k2v = accel(s2);
      const ChiState s3 = axpy(cur, 0.5 * dt, k2x, k2v);
      const GridFunction k3x = vel(s3), k3v = accel(s3);
      const ChiState s4 = axpy(cur, dt, k3x, k3v);
      const GridFunction k4x = vel(s4), k4v = accel(s4);
      ChiState next{cur.t + dt, cur.chi + (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
                    cur.chi_t + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)};
      if (std::abs(next.t - target) < 1e-12 * std::max(1.0, target)) next.t = target;
      next.chi.set_parity(Parity::kEven);
      next.chi_t.set_parity(Parity::kEven);
      if (!next.chi.all_finite() || !next.chi_t.all_finite())
        throw BlowUpError(next.t, 0.0, "non-finite chi state");
      cur = std::move(next);
      ++out.steps;
    }
    out.states.push_back(cur);
  }
  return out;
}

namespace {

// H at tau from the trajectory samples; exact when a sample matches.
GridFunction h_at(const Trajectory& h, double tau) {
  const auto& st = h.states;
  const double tol = 1e-10 * std::max(1.0, std::abs(tau));
  auto it = std::lower_bound(st.begin(), st.end(), tau,
                             [](const PerturbationState& s, double t) { return s.tau < t; });
  if (it != st.end() && std::abs(it->tau - tau) <= tol) return it->H;
  if (it != st.begin() && std::abs(std::prev(it)->tau - tau) <= tol) return std::prev(it)->H;
  const PerturbationState& p = *std::prev(it);
  const PerturbationState& q = *it;
  const double dt = q.tau - p.tau;
  const double x = (tau - p.tau) / dt;
  const double h00 = (1 + 2 * x) * (1 - x) * (1 - x), h10 = x * (1 - x) * (1 - x);
  const double h01 = x * x * (3 - 2 * x), h11 = x * x * (x - 1);
  GridFunction out = h00 * p.H + (h10 * dt) * p.H_tau + h01 * q.H + (h11 * dt) * q.H_tau;
  out.set_parity(Parity::kOdd);
  return out;
}

}  // namespace

Discrepancy compare_solutions(const ChiTrajectory& chi, const Trajectory& h,
                              const AffineMotion& motion) {
  require(!chi.states.empty() && !h.states.empty(), ErrorKind::kWindowMismatch,
          "empty trajectory");
  const double tau_lo = h.states.front().tau, tau_hi = h.states.back().tau;
  const double slack = 1e-10 * std::max(1.0, tau_hi);
  Discrepancy d;
  bool first = true;
  for (const ChiState& c : chi.states) {
    if (c.t > motion.t_max()) continue;
    const MotionSample m = motion.at_t(c.t);
    if (m.tau < tau_lo - slack || m.tau > tau_hi + slack) continue;
    const double tau = std::clamp(m.tau, tau_lo, tau_hi);
    const GridFunction H = h_at(h, tau);
    GridFunction chi_h = m.a * (over_r(H) + 1.0);
    chi_h.set_parity(Parity::kEven);
    const GridFunction diff = chi_h - c.chi;
    const GridFunction dev = c.chi + (-m.a);
    const double sup = c.chi.max_abs();
    const RadialGrid& g = c.chi.grid();
    const double n_diff = std::sqrt(g.integrate_r2(square(diff).values()));
    const double n_chi = std::sqrt(g.integrate_r2(square(c.chi).values()));
    d.rel_sup = std::max(d.rel_sup, diff.max_abs() / sup);
    d.rel_norm = std::max(d.rel_norm, n_diff / n_chi);
    if (dev.max_abs() > 0.0)
      d.rel_perturbation = std::max(d.rel_perturbation, diff.max_abs() / dev.max_abs());
    if (first) d.t_begin = c.t;
    d.t_end = c.t;
    first = false;
    ++d.samples;
  }
  if (d.samples == 0)
    fail(ErrorKind::kWindowMismatch,
         fmt::format("no chi sample falls inside tau window [{}, {}]", tau_lo, tau_hi));
  return d;
}

}  // namespace radvac
