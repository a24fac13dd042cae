#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>

#include "radvac/diagnostics.hpp"
#include "radvac/error.hpp"
#include "radvac/solver.hpp"

namespace radvac {

namespace {

// Integral over [a,b] of p(t) t^2 with p the cubic through (x_i, g_i); 3-point
// Gauss-Legendre is exact for the quintic integrand.
double cubic_r2_integral(const std::array<double, 4>& x, const std::array<double, 4>& g, double a,
                      double b) {
  static constexpr double gx[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  double acc = 0.0;
  for (int q = 0; q < 3; ++q) {
    const double t = 0.5 * (a + b) + 0.5 * (b - a) * gx[q];
    double p = 0.0;
    for (int i = 0; i < 4; ++i) {
      double l = 1.0;
      for (int k = 0; k < 4; ++k)
        if (k != i) l *= (t - x[k]) / (x[i] - x[k]);
      p += g[i] * l;
    }
    acc += gw[q] * p * t * t;
  }
  return 0.5 * (b - a) * acc;
}

}  // namespace

GridFunction reconstruct_from_divergence(const GridFunction& h) {
  const RadialGrid& grid = h.grid();
  const int n = grid.size();
  const double dx = grid.spacing();
  // Interpolating h rather than h r^2 keeps the error relative to r^3 near
  // the origin, so H = I / r^2 stays fourth order there.
  const int sign = ghost_sign(h.parity()) == 0 ? 1 : ghost_sign(h.parity());
  auto gval = [&](int idx) {
    const int k = idx >= 0 ? idx : -idx - 1;
    return (idx >= 0 ? 1.0 : sign) * h[k];
  };
  auto stencil_integral = [&](int center, double a, double b) {
    const int first = std::clamp(center - 1, -2, n - 4);
    std::array<double, 4> x, g;
    for (int i = 0; i < 4; ++i) {
      x[i] = (first + i + 0.5) * dx;
      g[i] = gval(first + i);
    }
    return cubic_r2_integral(x, g, a, b);
  };
  std::vector<double> out(n);
  double face = 0.0;
  for (int j = 0; j < n; ++j) {
    const double left = j * dx;
    const double I = face + stencil_integral(j, left, grid.node(j));
    out[j] = I / (grid.node(j) * grid.node(j));
    face += stencil_integral(j, left, left + dx);
  }
  return GridFunction(h.grid_ptr(), std::move(out), flip(h.parity()));
}

namespace {

struct Frozen {
  GridFunction w;
  GridFunction F;  // lagged source terms
};

Frozen freeze(const PerturbationState& s, const BackgroundProfile& profile, const HEquation& eq,
              bool include_R3) {
  const double gamma = profile.gamma;
  const Geometry g = derive_geometry(s.H, gamma);
  const Remainders R = compute_remainders(g, profile);
  const GridFunction r = GridFunction::radius(s.H.grid_ptr());
  GridFunction rR = r * (R.R1 + R.R2);
  if (include_R3) rR = rR + r * R.R3;
  rR.set_parity(Parity::kOdd);
  const GridFunction L0H = eq.s() * g.D2H + eq.m0() * g.DrH;
  GridFunction F = apply_Dr(over_r(square(s.H))) - apply_Dr(rR) +
                   gamma * commutator_composed(1, g, s.H, profile) +
                   gamma * (apply_dr(g.w) * L0H);
  F.set_parity(Parity::kEven);
  return {g.w, std::move(F)};
}

}  // namespace

std::vector<LwpIterate> lwp_iterate(const PerturbationState& initial, const AffineMotion& motion,
                                    const BackgroundProfile& profile, double T, int j_max,
                                    const LwpOptions& opt) {
  require(T > 0.0 && j_max >= 1, ErrorKind::kInvalidParameter, "need T > 0 and j_max >= 1");
  require(motion.tau_max() >= initial.tau + T, ErrorKind::kInvalidParameter,
          "motion does not cover the window");
  const double gamma = profile.gamma;
  const HEquation eq(profile, motion);
  const GridFunction m1 = drift(profile, 1);

  double dt = std::min(opt.dtau_max, step_limit(eq, initial, opt.cfl, opt.dissipation));
  const int steps = std::max(1, static_cast<int>(std::ceil(T / dt)));
  dt = T / steps;
  const int levels = 2 * steps + 1;  // full and half steps
  auto tau_of = [&](int l) { return initial.tau + 0.5 * dt * l; };

  // Iterate 0 is the initial data held constant in time.
  std::vector<PerturbationState> cur(levels, initial);
  for (int l = 0; l < levels; ++l) cur[l].tau = tau_of(l);

  auto Lstar1 = [&](const GridFunction& f) {
    const GridFunction q = apply_dr(f);
    return eq.s() * apply_Dr(q) + m1 * q;
  };

  std::vector<LwpIterate> out;
  {
    LwpIterate first;
    for (int l = 0; l < levels; l += 2) first.states.push_back(cur[l]);
    first.h_final = apply_Dr(initial.H);
    out.push_back(std::move(first));
  }
  int rising = 0;
  for (int j = 1; j <= j_max; ++j) {
    std::vector<Frozen> frozen;
    frozen.reserve(levels);
    for (int l = 0; l < levels; ++l) frozen.push_back(freeze(cur[l], profile, eq, opt.include_R3));

    auto accel = [&](int l, const GridFunction& h, const GridFunction& ht) {
      const MotionSample m = motion.at_tau(tau_of(l));
      const double damp = m.a_tau / m.a;
      const double spring = std::pow(m.a, 3.0 - 3.0 * gamma);
      GridFunction a = (-damp) * ht + spring * (gamma * (frozen[l].w * Lstar1(h)) + h + frozen[l].F);
      if (opt.dissipation > 0.0) a += dissipation(ht, opt.dissipation);
      a.set_parity(Parity::kEven);
      return a;
    };
    auto vel = [&](const GridFunction& h, const GridFunction& ht) {
      return opt.dissipation > 0.0 ? ht + dissipation(h, opt.dissipation) : ht;
    };

    std::vector<GridFunction> hs(steps + 1), hts(steps + 1);
    hs[0] = apply_Dr(initial.H);
    hts[0] = apply_Dr(initial.H_tau);
    for (int k = 0; k < steps; ++k) {
      const GridFunction& h = hs[k];
      const GridFunction& v = hts[k];
      const int l0 = 2 * k;
      const GridFunction k1h = vel(h, v), k1v = accel(l0, h, v);
      const GridFunction h2 = h + (0.5 * dt) * k1h, v2 = v + (0.5 * dt) * k1v;
      const GridFunction k2h = vel(h2, v2), k2v = accel(l0 + 1, h2, v2);
      const GridFunction h3 = h + (0.5 * dt) * k2h, v3 = v + (0.5 * dt) * k2v;
      const GridFunction k3h = vel(h3, v3), k3v = accel(l0 + 1, h3, v3);
      const GridFunction h4 = h + dt * k3h, v4 = v + dt * k3v;
      const GridFunction k4h = vel(h4, v4), k4v = accel(l0 + 2, h4, v4);
      hs[k + 1] = h + (dt / 6.0) * (k1h + 2.0 * k2h + 2.0 * k3h + k4h);
      hts[k + 1] = v + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
      hs[k + 1].set_parity(Parity::kEven);
      hts[k + 1].set_parity(Parity::kEven);
      for (const auto* f : {&hs[k + 1], &hts[k + 1]})
        if (!f->all_finite()) throw BlowUpError(tau_of(l0 + 2), 0.0, "non-finite LWP iterate");
    }

    std::vector<PerturbationState> next(levels);
    for (int k = 0; k <= steps; ++k)
      next[2 * k] = {tau_of(2 * k), reconstruct_from_divergence(hs[k]),
                     reconstruct_from_divergence(hts[k])};
    // Half levels from cubic Hermite interpolation in time.
    for (int k = 0; k < steps; ++k) {
      const PerturbationState& p = next[2 * k];
      const PerturbationState& q = next[2 * k + 2];
      // h_tau_tau is not stored, so H_tau at the midpoint uses the Hermite derivative of H.
      GridFunction Hm = 0.5 * (p.H + q.H) + (dt / 8.0) * (p.H_tau - q.H_tau);
      GridFunction Vm = (1.5 / dt) * (q.H - p.H) - 0.25 * (p.H_tau + q.H_tau);
      Hm.set_parity(Parity::kOdd);
      Vm.set_parity(Parity::kOdd);
      next[2 * k + 1] = {tau_of(2 * k + 1), std::move(Hm), std::move(Vm)};
    }

    LwpIterate it;
    double dsn = 0.0, dn = 0.0, hn = 0.0;
    for (int l = 0; l < levels; l += 2) {
      PerturbationState diff{next[l].tau, next[l].H - cur[l].H, next[l].H_tau - cur[l].H_tau};
      diff.H.set_parity(Parity::kOdd);
      diff.H_tau.set_parity(Parity::kOdd);
      dsn = std::max(dsn, sn_bracket(diff, motion, profile, opt.N));
      dn = std::max(dn, std::sqrt(weighted_norm(diff.H, 0, profile)));
      hn = std::max(hn, std::sqrt(weighted_norm(next[l].H, 0, profile)));
      it.states.push_back(next[l]);
    }
    it.h_final = hs[steps];
    it.diff_sn = dsn;
    it.diff_norm = dn;
    const double prev = out.back().diff_sn;
    it.ratio = (j >= 2 && prev > 0.0) ? std::sqrt(dsn / prev) : 0.0;
    rising = (j >= 2 && it.ratio >= 1.0) ? rising + 1 : 0;
    out.push_back(std::move(it));
    if (rising >= 3)
      fail(ErrorKind::kIterationDiverged,
           fmt::format("difference ratio >= 1 for three consecutive iterates (j = {})", j));
    cur = std::move(next);
    if (dn <= opt.stop_tol * hn) break;
  }
  return out;
}

}  // namespace radvac
