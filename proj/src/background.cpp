#include "radvac/background.hpp"

#include <fmt/format.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "radvac/error.hpp"
#include "radvac/ode.hpp"

namespace radvac {

GammaExponents gamma_exponents(double gamma) {
  require(gamma > 1.0, ErrorKind::kInvalidParameter, "gamma must exceed 1");
  GammaExponents e;
  e.gamma = gamma;
  e.d_exp = gamma <= 5.0 / 3.0 ? 3.0 * gamma - 3.0 : 2.0;
  e.b_exp = e.d_exp + 3.0 - 3.0 * gamma;
  if (gamma <= 5.0 / 3.0) e.b_exp = 0.0;
  return e;
}

namespace {

// Value at s in [0,1] of the quintic matching (f, f', f'') at both ends of an interval of length h.
double hermite5(double s, double h, double f0, double d0, double s0, double f1, double d1,
                double s1) {
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
  const double h0 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
  const double h1 = s - 6 * s3 + 8 * s4 - 3 * s5;
  const double h2 = 0.5 * (s2 - 3 * s3 + 3 * s4 - s5);
  const double h3 = 10 * s3 - 15 * s4 + 6 * s5;
  const double h4 = -4 * s3 + 7 * s4 - 3 * s5;
  const double h5 = 0.5 * (s3 - 2 * s4 + s5);
  return f0 * h0 + h * d0 * h1 + h * h * s0 * h2 + f1 * h3 + h * d1 * h4 + h * h * s1 * h5;
}

size_t bracket(const std::vector<MotionSample>& s, double x, double MotionSample::*key) {
  auto it = std::upper_bound(s.begin(), s.end(), x,
                             [key](double v, const MotionSample& m) { return v < m.*key; });
  size_t k = it == s.begin() ? 0 : static_cast<size_t>(it - s.begin()) - 1;
  return std::min(k, s.size() - 2);
}

void estimate_rates(AffineMotion& m) {
  // a_t^2 is affine in x = a^(3-3 gamma) along exact solutions; the intercept
  // over the tail is a1^2.
  const size_t n = m.samples.size();
  const size_t first = n - std::max<size_t>(n / 10, 2);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double cnt = static_cast<double>(n - first);
  for (size_t k = first; k < n; ++k) {
    const double x = std::pow(m.samples[k].a, 3.0 - 3.0 * m.gamma);
    const double y = m.samples[k].a_t * m.samples[k].a_t;
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double den = cnt * sxx - sx * sx;
  double intercept = sy / cnt;
  if (std::abs(den) > 1e-300 * cnt) {
    const double slope = (cnt * sxy - sx * sy) / den;
    intercept = (sy - slope * sx) / cnt;
  }
  m.a1_limit = std::sqrt(std::max(intercept, 0.0));
  m.a0_rate = 0.5 * m.exponents.d_exp * m.a1_limit;
}

AffineMotion integrate_impl(double gamma, double a_init, double adot_init, double t_final,
                            double tau_final, double tol) {
  require(a_init > 0.0, ErrorKind::kInvalidParameter, "a(0) must be positive");
  require(tol > 0.0, ErrorKind::kInvalidParameter, "tolerance must be positive");
  AffineMotion m;
  m.gamma = gamma;
  m.exponents = gamma_exponents(gamma);
  m.a0_init = a_init;
  m.a1_init = adot_init;
  const double p = 2.0 - 3.0 * gamma;
  OdeRhs rhs = [p](double, const std::vector<double>& y, std::vector<double>& dy) {
    dy[0] = y[1];
    dy[1] = std::pow(y[0], p);
    dy[2] = 1.0 / y[0];
  };
  OdeOptions opt;
  opt.rtol = tol;
  opt.atol = tol * 1e-2;
  opt.h_init = 1e-3;
  opt.h_max = [](double t) { return 0.05 * (1.0 + t); };
  bool collapsed = false;
  OdeObserver obs = [&](double t, const std::vector<double>& y) {
    if (!(y[0] > 0.0) || !std::isfinite(y[0])) {
      collapsed = true;
      return;
    }
    m.samples.push_back({t, y[2], y[0], y[1], y[0] * y[1]});
  };
  OdeStop stop = [&](double, const std::vector<double>& y) {
    return collapsed || y[2] >= tau_final;
  };
  integrate_dp45(rhs, 0.0, {a_init, adot_init, 0.0}, t_final, opt, obs, stop);
  require(!collapsed, ErrorKind::kIntegrationFailure, "a reached a non-positive value");
  require(m.samples.size() >= 4, ErrorKind::kIntegrationFailure, "too few samples");
  estimate_rates(m);
  return m;
}

}  // namespace

MotionSample AffineMotion::at_tau(double tau) const {
  const size_t k = bracket(samples, tau, &MotionSample::tau);
  const MotionSample& p = samples[k];
  const MotionSample& q = samples[k + 1];
  const double h = q.tau - p.tau;
  const double s = (tau - p.tau) / h;
  const double g = gamma;
  auto att = [g](const MotionSample& m) { return m.a_tau * m.a_t + std::pow(m.a, 4.0 - 3.0 * g); };
  auto at1 = [g](const MotionSample& m) { return std::pow(m.a, 3.0 - 3.0 * g); };
  auto at2 = [g](const MotionSample& m) {
    return (3.0 - 3.0 * g) * std::pow(m.a, 2.0 - 3.0 * g) * m.a_tau;
  };
  MotionSample out;
  out.tau = tau;
  out.a = hermite5(s, h, p.a, p.a_tau, att(p), q.a, q.a_tau, att(q));
  out.a_t = hermite5(s, h, p.a_t, at1(p), at2(p), q.a_t, at1(q), at2(q));
  out.t = hermite5(s, h, p.t, p.a, p.a_tau, q.t, q.a, q.a_tau);
  out.a_tau = out.a * out.a_t;
  return out;
}

MotionSample AffineMotion::at_t(double t) const {
  const size_t k = bracket(samples, t, &MotionSample::t);
  const MotionSample& p = samples[k];
  const MotionSample& q = samples[k + 1];
  const double h = q.t - p.t;
  const double s = (t - p.t) / h;
  const double g = gamma;
  auto a2 = [g](const MotionSample& m) { return std::pow(m.a, 2.0 - 3.0 * g); };
  auto a3 = [g](const MotionSample& m) { return (2.0 - 3.0 * g) * std::pow(m.a, 1.0 - 3.0 * g) * m.a_t; };
  MotionSample out;
  out.t = t;
  out.a = hermite5(s, h, p.a, p.a_t, a2(p), q.a, q.a_t, a2(q));
  out.a_t = hermite5(s, h, p.a_t, a2(p), a3(p), q.a_t, a2(q), a3(q));
  out.tau = hermite5(s, h, p.tau, 1.0 / p.a, -p.a_t / (p.a * p.a), q.tau, 1.0 / q.a,
                     -q.a_t / (q.a * q.a));
  out.a_tau = out.a * out.a_t;
  return out;
}

double AffineMotion::energy() const {
  const MotionSample& s = samples.front();
  return 0.5 * s.a_t * s.a_t + std::pow(s.a, 3.0 - 3.0 * gamma) / (3.0 * gamma - 3.0);
}

AffineMotion integrate_affine(double gamma, double a_init, double adot_init, double t_final,
                              double tol) {
  require(t_final > 0.0, ErrorKind::kInvalidParameter, "t_final must be positive");
  return integrate_impl(gamma, a_init, adot_init, t_final, 1e300, tol);
}

AffineMotion integrate_affine_to_tau(double gamma, double a_init, double adot_init,
                                     double tau_final, double tol) {
  require(tau_final > 0.0, ErrorKind::kInvalidParameter, "tau_final must be positive");
  AffineMotion m = integrate_impl(gamma, a_init, adot_init, 1e300, tau_final, tol);
  require(m.tau_max() >= tau_final, ErrorKind::kIntegrationFailure, "tau range not reached");
  return m;
}

ProfileSpec ProfileSpec::poly(std::vector<double> c) {
  ProfileSpec s;
  s.kind = Kind::kPoly;
  s.coeffs = std::move(c);
  return s;
}

ProfileSpec ProfileSpec::table(std::vector<double> r, std::vector<double> phi) {
  ProfileSpec s;
  s.kind = Kind::kTable;
  s.r = std::move(r);
  s.phi = std::move(phi);
  return s;
}

namespace {

double clenshaw(const std::vector<double>& c, double x) {
  double b1 = 0.0, b2 = 0.0;
  for (size_t k = c.size(); k-- > 1;) {
    const double b0 = 2.0 * x * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return x * b1 - b2 + c[0];
}

// Coefficients of d/dx of a Chebyshev series.
std::vector<double> cheb_diff(const std::vector<double>& c) {
  const size_t n = c.size();
  if (n <= 1) return {0.0};
  std::vector<double> d(n - 1, 0.0);
  for (size_t k = n - 1; k >= 1; --k) {
    const double next = k + 1 < n - 1 ? d[k + 1] : 0.0;
    d[k - 1] = next + 2.0 * k * c[k];
    if (k == 1) break;
  }
  d[0] *= 0.5;
  return d;
}

}  // namespace

PhiFunction::PhiFunction(const ProfileSpec& spec) : poly_(spec.kind == ProfileSpec::Kind::kPoly) {
  if (poly_) {
    require(!spec.coeffs.empty(), ErrorKind::kInvalidProfile, "empty polynomial");
    coeffs_ = spec.coeffs;
    return;
  }
  const size_t m = spec.r.size();
  require(m >= 4 && spec.phi.size() == m, ErrorKind::kInvalidProfile,
          "table needs at least four (r, phi) pairs of equal length");
  for (double r : spec.r)
    require(r >= 0.0 && r <= 1.0, ErrorKind::kInvalidProfile, "table abscissae must lie in [0,1]");
  const int deg = static_cast<int>(std::min<size_t>(m - 1, 24));
  Eigen::MatrixXd V(m, deg + 1);
  Eigen::VectorXd y(m);
  for (size_t i = 0; i < m; ++i) {
    const double x = 2.0 * spec.r[i] - 1.0;
    double t0 = 1.0, t1 = x;
    for (int k = 0; k <= deg; ++k) {
      V(i, k) = k == 0 ? 1.0 : (k == 1 ? x : 0.0);
      if (k >= 2) {
        const double t2 = 2.0 * x * t1 - t0;
        V(i, k) = t2;
        t0 = t1;
        t1 = t2;
      }
    }
    y(i) = spec.phi[i];
  }
  const Eigen::VectorXd c = V.colPivHouseholderQr().solve(y);
  std::vector<double> series(c.data(), c.data() + c.size());
  // Derivatives in r carry a factor 2 per order from x = 2r - 1.
  for (int l = 0; l < Jet::kSize; ++l) {
    cheb_.push_back(series);
    series = cheb_diff(series);
    for (double& v : series) v *= 2.0;
  }
}

double PhiFunction::value(double r) const {
  if (poly_) {
    double acc = 0.0;
    for (size_t i = coeffs_.size(); i-- > 0;) acc = acc * r + coeffs_[i];
    return acc;
  }
  return clenshaw(cheb_[0], 2.0 * r - 1.0);
}

Jet PhiFunction::jet(double r) const {
  Jet j;
  if (poly_) {
    // Taylor shift: c_k = sum_i a_i C(i,k) r^(i-k).
    for (int k = 0; k < Jet::kSize; ++k) {
      double acc = 0.0;
      for (size_t i = coeffs_.size(); i-- > static_cast<size_t>(k);) {
        double binom = 1.0;
        for (int q = 0; q < k; ++q) binom = binom * static_cast<double>(i - q) / (q + 1);
        acc += coeffs_[i] * binom * std::pow(r, static_cast<double>(i - k));
      }
      j[k] = acc;
    }
    return j;
  }
  double fact = 1.0;
  for (int k = 0; k < Jet::kSize; ++k) {
    if (k > 0) fact *= k;
    j[k] = clenshaw(cheb_[k], 2.0 * r - 1.0) / fact;
  }
  return j;
}

namespace {

double simpson(const PhiFunction& phi, double a, double b) {
  const double m = 0.5 * (a + b);
  return (b - a) / 6.0 * (a * phi.value(a) + 4.0 * m * phi.value(m) + b * phi.value(b));
}

}  // namespace

double BackgroundProfile::d_at(double r) const {
  const int panels = 256;
  double F = 0.0;
  const double h = (1.0 - r) / panels;
  for (int k = 0; k < panels; ++k) F += simpson(*phi_, r + k * h, r + (k + 1) * h);
  return F / std::pow(phi_->value(r), gamma);
}

BackgroundProfile build_profile(const ProfileSpec& spec, double gamma,
                                std::shared_ptr<const RadialGrid> grid, int k_derivs) {
  require(gamma > 1.0, ErrorKind::kInvalidParameter, "gamma must exceed 1");
  require(k_derivs >= 0 && k_derivs < Jet::kSize, ErrorKind::kInvalidParameter,
          "k_derivs out of range");
  BackgroundProfile p;
  p.gamma = gamma;
  p.phi_spec = spec;
  p.k_derivs = k_derivs;
  p.phi_ = std::make_shared<const PhiFunction>(spec);
  const PhiFunction& phi = *p.phi_;

  const int n = grid->size();
  const int probes = 8 * n;
  for (int k = 0; k <= probes; ++k) {
    const double r = static_cast<double>(k) / probes;
    const double v = phi.value(r);
    if (!(v > 0.0))
      fail(ErrorKind::kInvalidProfile, fmt::format("phi = {} <= 0 at r = {}", v, r));
  }
  const Jet j0 = phi.jet(0.0);
  if (std::abs(j0[1]) > 1e-8 * std::max(1.0, std::abs(j0[0])))
    fail(ErrorKind::kInvalidProfile, fmt::format("phi'(0) = {} is not zero", j0[1]));

  // F(r) = int_r^1 l phi(l) dl, composite Simpson from the vacuum boundary inward.
  std::vector<double> F(n);
  F[n - 1] = simpson(phi, grid->node(n - 1), 1.0);
  for (int j = n - 2; j >= 0; --j) F[j] = F[j + 1] + simpson(phi, grid->node(j), grid->node(j + 1));

  p.rho_jets_.resize(n);
  p.d_jets_.resize(n);
  for (int j = 0; j < n; ++j) {
    const double r = grid->node(j);
    const Jet rho = phi.jet(r);
    const Jet g = Jet::variable(r) * rho;
    Jet Fj(F[j]);
    for (int k = 1; k < Jet::kSize; ++k) Fj[k] = -g[k - 1] / k;
    p.rho_jets_[j] = rho;
    p.d_jets_[j] = Fj * pow(rho, -gamma);
  }
  for (int l = 0; l <= k_derivs; ++l) {
    const Parity par = l % 2 == 0 ? Parity::kEven : Parity::kOdd;
    std::vector<double> dv(n), rv(n);
    for (int j = 0; j < n; ++j) {
      dv[j] = p.d_jets_[j].derivative(l);
      rv[j] = p.rho_jets_[j].derivative(l);
    }
    p.d_derivs.emplace_back(grid, std::move(dv), par);
    p.rho_derivs.emplace_back(grid, std::move(rv), par);
  }
  p.d_weight = p.d_derivs[0];
  p.rho_bar = p.rho_derivs[0];
  for (int j = 0; j < n; ++j)
    if (!(p.d_weight[j] > 0.0))
      fail(ErrorKind::kInvalidProfile, fmt::format("d <= 0 at r = {}", grid->node(j)));
  return p;
}

GridFunction balance_residual(const BackgroundProfile& profile) {
  const auto& grid = profile.grid_ptr();
  const int n = grid->size();
  std::vector<double> P(n), dP(n), out(n);
  for (int j = 0; j < n; ++j)
    P[j] = std::pow(profile.rho_bar[j], profile.gamma) * profile.d_weight[j];
  kernels::derivative(grid->stencil(), P.data(), ghost_sign(Parity::kEven), dP.data());
  for (int j = 0; j < n; ++j) out[j] = profile.rho_bar[j] * grid->node(j) + dP[j];
  return GridFunction(grid, std::move(out), Parity::kOdd);
}

double boundary_slope(const BackgroundProfile& profile, double delta) {
  auto G = [&](double r) {
    return std::pow(profile.phi(r), profile.gamma - 1.0) * profile.d_at(r);
  };
  // G(1) = 0, so the backward difference is -G(1 - h)/h with error c1 h + c2 h^2 + ...
  double s[3];
  for (int k = 0; k < 3; ++k) {
    const double h = delta / (1 << k);
    s[k] = -G(1.0 - h) / h;
  }
  const double r1a = 2.0 * s[1] - s[0];
  const double r1b = 2.0 * s[2] - s[1];
  return (4.0 * r1b - r1a) / 3.0;
}

EulerianFields eulerian_fields(const AffineMotion& motion, const BackgroundProfile& profile,
                               double t, const GridFunction* H, const GridFunction* H_tau) {
  require(t >= motion.samples.front().t && t <= motion.t_max(), ErrorKind::kInvalidParameter,
          "t outside the integrated range");
  const auto& grid = profile.grid_ptr();
  const int n = grid->size();
  const MotionSample m = motion.at_t(t);
  std::vector<double> theta(n, 0.0), theta_t(n, 0.0), theta_r(n, 0.0);
  if (H) {
    for (int j = 0; j < n; ++j) theta[j] = (*H)[j] / grid->node(j);
    kernels::derivative(grid->stencil(), theta.data(), ghost_sign(Parity::kEven), theta_r.data());
  }
  if (H_tau)
    for (int j = 0; j < n; ++j) theta_t[j] = (*H_tau)[j] / grid->node(j);
  std::vector<double> u(n), rho(n), S(n);
  for (int j = 0; j < n; ++j) {
    const double r = grid->node(j);
    const double chi = m.a * (1.0 + theta[j]);
    const double chi_r = m.a * theta_r[j];
    // chi_t = a_t xi + a xi_t and xi_t = theta_tau / a.
    const double chi_t = m.a_t * (1.0 + theta[j]) + theta_t[j];
    const double jac = chi * chi * (chi + chi_r * r);
    if (!(jac > 0.0))
      fail(ErrorKind::kDegenerateFlowMap, fmt::format("Jacobian {} at r = {}", jac, r));
    u[j] = r * chi_t;
    rho[j] = profile.rho_bar[j] / jac;
    S[j] = std::log(profile.d_weight[j]);
  }
  return {GridFunction(grid, std::move(u), Parity::kOdd),
          GridFunction(grid, std::move(rho), Parity::kEven),
          GridFunction(grid, std::move(S), Parity::kEven)};
}

}  // namespace radvac
