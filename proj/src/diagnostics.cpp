#include "radvac/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>

#include "radvac/error.hpp"

namespace radvac {

double EnergyReport::E_total() const { return std::accumulate(E.begin(), E.end(), 0.0); }
double EnergyReport::D_total() const { return std::accumulate(D.begin(), D.end(), 0.0); }
double EnergyReport::C_total() const { return std::accumulate(C.begin(), C.end(), 0.0); }
double EnergyReport::Z_total() const {
  double acc = 0.0;
  for (const auto& row : Z)
    for (double z : row) acc += z;
  return acc;
}

namespace {

// 𝒟_0 f, ..., 𝒟_imax f by alternating D_r and d/dr.
std::vector<GridFunction> d_sequence(const GridFunction& f, int imax) {
  if (imax > max_operator_order(f.grid()))
    fail(ErrorKind::kOrderTooHigh, "operator order exceeds grid support");
  std::vector<GridFunction> out{f};
  for (int i = 0; i < imax; ++i) out.push_back(i % 2 == 0 ? apply_Dr(out[i]) : apply_dr(out[i]));
  return out;
}

double integral(const GridFunction& f) { return f.grid().integrate_r2(f.values()); }

GridFunction apply_Lcal(int i, const GridFunction& f, const BackgroundProfile& profile) {
  return i % 2 == 0 ? apply_Lk(i, f, profile) : apply_Lk_star(i, f, profile);
}

GridFunction L0_of(const GridFunction& H, const BackgroundProfile& profile) {
  return apply_Lk(0, H, profile);
}

}  // namespace

double sn_bracket(const PerturbationState& state, const AffineMotion& motion,
                  const BackgroundProfile& profile, int N) {
  require(N >= 0, ErrorKind::kInvalidParameter, "N must be nonnegative");
  const GammaExponents ex = gamma_exponents(profile.gamma);
  const double a = motion.at_tau(state.tau).a;
  const auto DH = d_sequence(state.H, N + 1);
  const auto DHt = d_sequence(state.H_tau, N);
  double acc = 0.0;
  for (int i = 0; i <= N; ++i) acc += std::pow(a, ex.d_exp) * weighted_norm(DHt[i], i, profile);
  for (int i = 0; i <= N - 1; ++i) acc += weighted_norm(DH[i + 1], i + 1, profile);
  acc += std::pow(a, ex.b_exp) * weighted_norm(DH[N + 1], N + 1, profile);
  return acc;
}

std::vector<double> sn_series(const std::vector<PerturbationState>& states,
                              const AffineMotion& motion, const BackgroundProfile& profile, int N,
                              Exec exec) {
  const int count = static_cast<int>(states.size());
  std::vector<double> b(count);
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic) if (exec == Exec::kParallel)
  for (int k = 0; k < count; ++k) {
    try {
      b[k] = sn_bracket(states[k], motion, profile, N);
    } catch (...) {
#pragma omp critical
      err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  for (int k = 1; k < count; ++k) b[k] = std::max(b[k], b[k - 1]);
  return b;
}

double compute_SN(const std::vector<PerturbationState>& states, const AffineMotion& motion,
                  const BackgroundProfile& profile, int N) {
  require(!states.empty(), ErrorKind::kInvalidParameter, "empty trajectory");
  return sn_series(states, motion, profile, N).back();
}

GridFunction commutator_direct(int i, const Geometry& g, const GridFunction& H,
                               const BackgroundProfile& profile) {
  require(i >= 1, ErrorKind::kInvalidParameter, "commutator defined for i >= 1");
  const GridFunction L0H = L0_of(H, profile);
  const GridFunction X = apply_Dr(L0H);
  GridFunction out = g.w * (apply_Di(i, L0H) - apply_Lcal(i, apply_Di(i, H), profile));
  out += apply_Dbar_i(i - 1, g.w * X) - g.w * apply_Dbar_i(i - 1, X);
  return out;
}

GridFunction commutator_composed(int i, const Geometry& g, const GridFunction& H,
                                 const BackgroundProfile& profile) {
  if (i > 2) fail(ErrorKind::kOrderTooHigh, "composed commutator available for i <= 2");
  require(i >= 1, ErrorKind::kInvalidParameter, "commutator defined for i >= 1");
  const GridFunction D1H = apply_Dr(H);
  if (i == 1) return g.w * compute_Qplus(0, profile) * D1H;
  const GridFunction D2H = apply_dr(D1H);
  const GridFunction wr = apply_dr(g.w);
  const GridFunction X = apply_Dr(L0_of(H, profile));
  return g.w * ((compute_Qminus(1, profile) + compute_Qplus(0, profile)) * D2H +
                compute_Qplus(0, profile, 1) * D1H) +
         wr * X;
}

EnergyReport compute_energy_identity_terms(const PerturbationState& state,
                                           const AffineMotion& motion,
                                           const BackgroundProfile& profile, int N,
                                           const EnergyOptions& opt) {
  require(N >= 0, ErrorKind::kInvalidParameter, "N must be nonnegative");
  const double gamma = profile.gamma;
  const GammaExponents ex = gamma_exponents(gamma);
  const MotionSample m = motion.at_tau(state.tau);
  const double a = m.a, at = m.a_tau;
  const double ad = std::pow(a, ex.d_exp), ab = std::pow(a, ex.b_exp);
  const auto& grid = state.H.grid_ptr();
  const int n = grid->size();

  const Geometry g = derive_geometry(state.H, gamma);
  const auto DH = d_sequence(state.H, N + 1);
  const auto DHt = d_sequence(state.H_tau, N);
  const GridFunction s = sound_weight(profile);
  const GridFunction w_r = apply_dr(g.w);
  const GridFunction L0H = L0_of(state.H, profile);

  // w_tau from theta_tau = H_tau / r and J_tau.
  GridFunction theta_t = over_r(state.H_tau);
  const GridFunction DrHt = apply_Dr(state.H_tau);
  GridFunction w_t = GridFunction::zeros(grid, Parity::kEven);
  for (int j = 0; j < n; ++j) {
    const double xi = g.xi[j], tht = theta_t[j];
    const double Jt = 2.0 * xi * tht * (1.0 + g.DrH[j] - 2.0 * g.theta[j]) +
                      xi * xi * (DrHt[j] - 2.0 * tht);
    w_t[j] = 4.0 * xi * xi * xi * tht * std::pow(g.J[j], -gamma - 1.0) -
             (gamma + 1.0) * std::pow(xi, 4) * std::pow(g.J[j], -gamma - 2.0) * Jt;
  }

  const Remainders R = compute_remainders(g, profile);
  const GridFunction rvec = GridFunction::radius(grid);
  GridFunction rR = rvec * (R.R1 + R.R2);
  rR.set_parity(Parity::kOdd);
  GridFunction rR0 = rR;
  if (opt.include_R3) rR0 = rR + rvec * R.R3;
  GridFunction H2r = over_r(square(state.H));
  const GridFunction rho_ratio = profile.rho_derivs[1] / profile.rho_bar;
  GridFunction wrL0 = w_r * L0H;

  EnergyReport rep;
  rep.tau = state.tau;
  rep.N = N;
  rep.S_N = sn_bracket(state, motion, profile, N);
  rep.apriori = make_monitor(g, rep.S_N);
  rep.E.assign(N + 1, 0.0);
  rep.D.assign(N + 1, 0.0);
  rep.D_velocity.assign(N + 1, 0.0);
  rep.D_potential.assign(N + 1, 0.0);
  rep.C.assign(N, 0.0);
  rep.Z.assign(N + 1, {0, 0, 0, 0, 0, 0, 0});

  for (int i = 0; i <= N; ++i) {
    const GridFunction di = d_power(profile, i);
    const GridFunction& Y = DHt[i];
    const GridFunction top = square(DH[i + 1]) * s * di;
    const double vel = integral(square(Y) * di);
    const double pot = integral(g.w * top);
    rep.E[i] = 0.5 * ad * vel + 0.5 * gamma * ab * pot;
    rep.D_velocity[i] = 0.5 * (2.0 - ex.d_exp) * std::pow(a, ex.d_exp - 1.0) * at * vel;
    rep.D_potential[i] = -0.5 * gamma * ex.b_exp * std::pow(a, ex.b_exp - 1.0) * at * pot;
    rep.D[i] = rep.D_velocity[i] + rep.D_potential[i];
    if (i < N && gamma > 5.0 / 3.0) rep.C[i] = 0.5 * gamma * pot;

    auto& Z = rep.Z[i];
    const GridFunction Ywt = Y * di;
    Z[0] = ab * integral(DH[i] * Ywt);
    Z[1] = ab * integral(apply_Di(i, H2r) * Ywt);
    Z[2] = 0.5 * gamma * ab * integral(w_t * top);
    const GridFunction bracket = w_r - g.w * rho_ratio * (1.0 + i * (gamma - 1.0));
    Z[3] = -gamma * ab * integral(s * di * DH[i + 1] * Y * bracket);
    Z[4] = -ab * integral(apply_Di(i, i == 0 ? rR0 : rR) * Ywt);
    if (i >= 1) {
      GridFunction Ci;
      if (opt.composed_commutators && i <= 2) {
        Ci = commutator_composed(i, g, state.H, profile);
      } else {
        Ci = commutator_direct(i, g, state.H, profile);
        rep.direct_commutator = true;
      }
      Z[5] = gamma * ab * integral(Ci * Ywt);
      Z[6] = gamma * ab * integral(apply_Dbar_i(i - 1, wrL0) * Ywt);
    }
  }
  return rep;
}

std::vector<EnergyReport> energy_reports(const std::vector<PerturbationState>& states,
                                         const AffineMotion& motion,
                                         const BackgroundProfile& profile, int N,
                                         const EnergyOptions& opt, Exec exec) {
  const int count = static_cast<int>(states.size());
  std::vector<EnergyReport> out(count);
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic) if (exec == Exec::kParallel)
  for (int k = 0; k < count; ++k) {
    try {
      out[k] = compute_energy_identity_terms(states[k], motion, profile, N, opt);
    } catch (...) {
#pragma omp critical
      err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return out;
}

IdentityResidual integrate_identity_residual(const std::vector<EnergyReport>& reports) {
  const int count = static_cast<int>(reports.size());
  require(count >= 4, ErrorKind::kInsufficientSamples, "identity needs at least four reports");
  const double dt = reports[1].tau - reports[0].tau;
  for (int k = 1; k < count; ++k)
    require(std::abs(reports[k].tau - reports[k - 1].tau - dt) <= 1e-9 * std::max(1.0, dt) + 1e-12,
            ErrorKind::kInvalidParameter, "identity integration needs uniform samples");
  std::vector<double> f(count);
  for (int k = 0; k < count; ++k) f[k] = reports[k].D_total() - reports[k].Z_total();
  IdentityResidual res;
  res.running.assign(count, 0.0);
  double I = 0.0;
  const double E0 = reports[0].E_total();
  for (int k = 0; k + 1 < count; ++k) {
    // Fourth-order cubic quadrature over [tau_k, tau_(k+1)].
    double seg;
    if (k == 0)
      seg = dt / 24.0 * (9 * f[0] + 19 * f[1] - 5 * f[2] + f[3]);
    else if (k + 2 == count)
      seg = dt / 24.0 * (9 * f[k + 1] + 19 * f[k] - 5 * f[k - 1] + f[k - 2]);
    else
      seg = dt / 24.0 * (-f[k - 1] + 13 * f[k] + 13 * f[k + 1] - f[k + 2]);
    I += seg;
    res.running[k + 1] = reports[k + 1].E_total() - E0 + I;
  }
  for (int k = 0; k < count; ++k) {
    res.max_abs = std::max(res.max_abs, std::abs(res.running[k]));
    res.scale = std::max(res.scale, reports[k].E_total());
  }
  res.relative = res.scale > 0.0 ? res.max_abs / res.scale : 0.0;
  return res;
}

EquivalenceResult check_norm_energy_equivalence(const std::vector<PerturbationState>& states,
                                                const AffineMotion& motion,
                                                const BackgroundProfile& profile, int N) {
  const auto reports = energy_reports(states, motion, profile, N);
  const auto sn = sn_series(states, motion, profile, N);
  EquivalenceResult res;
  double sup_ec = 0.0;
  bool any = false;
  res.C1 = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < states.size(); ++k) {
    sup_ec = std::max(sup_ec, reports[k].E_total() + reports[k].C_total());
    if (sn[k] <= 0.0) continue;
    any = true;
    res.C1 = std::min(res.C1, sup_ec / sn[k]);
    res.C2 = std::max(res.C2, sup_ec / (sn[k] + sn[0]));
  }
  if (!any) {
    res.trivial = true;
    res.C1 = res.C2 = 0.0;
  }
  return res;
}

double check_coercivity(const std::vector<PerturbationState>& states, const AffineMotion& motion,
                        const BackgroundProfile& profile, int i) {
  require(!states.empty(), ErrorKind::kInvalidParameter, "empty trajectory");
  const double base = weighted_norm(apply_Di(i, states.front().H), i, profile);
  double sup_vel = 0.0, ratio = 0.0;
  for (const auto& s : states) {
    const double a = motion.at_tau(s.tau).a;
    sup_vel = std::max(sup_vel, a * a * weighted_norm(apply_Di(i, s.H_tau), i, profile));
    const double lhs = weighted_norm(apply_Di(i, s.H), i, profile);
    const double rhs = sup_vel + base;
    if (rhs > 0.0) ratio = std::max(ratio, lhs / rhs);
  }
  return ratio;
}

DecayFit fit_decay(const std::vector<double>& taus, const std::vector<double>& values,
                   const AffineMotion& motion, double tail_fraction) {
  require(taus.size() == values.size() && !taus.empty(), ErrorKind::kInsufficientSamples,
          "series is empty or ragged");
  const double start = taus.back() - tail_fraction * (taus.back() - taus.front());
  std::vector<double> x, y;
  for (size_t k = 0; k < taus.size(); ++k) {
    if (taus[k] < start || !(values[k] > 0.0)) continue;
    x.push_back(taus[k]);
    y.push_back(std::log(values[k]));
  }
  DecayFit fit;
  fit.samples = static_cast<int>(x.size());
  fit.a0 = motion.a0_rate;
  if (fit.samples < 10) fail(ErrorKind::kInsufficientSamples, "fewer than 10 usable samples");
  fit.e_folds = std::log(motion.at_tau(x.back()).a / motion.at_tau(x.front()).a);
  if (fit.e_folds < 3.0) fail(ErrorKind::kInsufficientSamples, "window spans fewer than 3 e-folds of a");
  const double cnt = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / cnt;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / cnt;
  double sxy = 0.0, sxx = 0.0;
  for (size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  fit.rate = sxy / sxx;
  fit.intercept = my - fit.rate * mx;
  return fit;
}

}  // namespace radvac
