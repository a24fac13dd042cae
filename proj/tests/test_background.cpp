#include <gtest/gtest.h>

#include <cmath>

#include "radvac/background.hpp"
#include "radvac/calculus.hpp"
#include "radvac/error.hpp"
#include "test_util.hpp"

namespace radvac {
namespace {

using testing::order;

ProfileSpec flat() { return ProfileSpec::poly({1.0}); }
ProfileSpec bump() { return ProfileSpec::poly({1.0, 0.0, 1.0, -1.0}); }

ProfileSpec gaussian_table() {
  std::vector<double> r, phi;
  for (int i = 0; i <= 40; ++i) {
    r.push_back(i / 40.0);
    phi.push_back(std::exp(-0.5 * r.back() * r.back()));
  }
  return ProfileSpec::table(r, phi);
}

TEST(GammaExponents, Branches) {
  const auto e14 = gamma_exponents(1.4);
  EXPECT_NEAR(e14.d_exp, 1.2, 1e-15);
  EXPECT_NEAR(e14.b_exp, 0.0, 1e-15);
  const auto e53 = gamma_exponents(5.0 / 3.0);
  EXPECT_NEAR(e53.d_exp, 2.0, 1e-15);
  EXPECT_NEAR(e53.b_exp, 0.0, 1e-15);
  const auto e2 = gamma_exponents(2.0);
  EXPECT_DOUBLE_EQ(e2.d_exp, 2.0);
  EXPECT_DOUBLE_EQ(e2.b_exp, -1.0);
  for (double g : {1.1, 1.3, 1.5, 1.7, 2.5, 3.0}) {
    const auto e = gamma_exponents(g);
    EXPECT_DOUBLE_EQ(e.b_exp, e.d_exp + 3.0 - 3.0 * g);
  }
  EXPECT_THROW(gamma_exponents(1.0), Error);
}

TEST(AffineMotion, ClosedFormForFiveThirds) {
  const auto m = integrate_affine(5.0 / 3.0, 1.0, 0.0, 10.0, 1e-12);
  double worst = 0.0;
  for (const auto& s : m.samples) worst = std::max(worst, std::abs(s.a - std::sqrt(1 + s.t * s.t)));
  EXPECT_LE(worst, 1e-8);
  for (double t = 0.0; t <= 10.0; t += 0.0137)
    EXPECT_NEAR(m.at_t(t).a, std::sqrt(1 + t * t), 1e-8);
  EXPECT_NEAR(m.a1_limit, 1.0, 1e-3);
  EXPECT_NEAR(m.a0_rate, 1.0, 1e-3);
}

TEST(AffineMotion, CoshInRescaledTime) {
  const double tol = 1e-10;
  const auto m = integrate_affine_to_tau(5.0 / 3.0, 1.0, 0.0, 3.0, tol);
  for (const auto& s : m.samples) EXPECT_NEAR(s.a, std::cosh(s.tau), 10 * tol * std::cosh(s.tau));
}

TEST(AffineMotion, ReparametrizationRoundTrip) {
  const auto m = integrate_affine(1.4, 1.0, 0.0, 8.0, 1e-11);
  for (double t = 0.05; t < 8.0; t += 0.31) {
    const auto s = m.at_t(t);
    EXPECT_NEAR(m.at_tau(s.tau).t, t, 1e-9);
  }
}

TEST(AffineMotion, Invariants) {
  for (double g : {1.4, 5.0 / 3.0, 2.0}) {
    const auto m = integrate_affine(g, 1.0, 0.0, 20.0, 1e-11);
    const double e0 = 0.5 * m.samples[0].a_t * m.samples[0].a_t +
                      std::pow(m.samples[0].a, 3 - 3 * g) / (3 * g - 3);
    for (size_t k = 1; k < m.samples.size(); ++k) {
      const auto& s = m.samples[k];
      EXPECT_GT(s.a, 0.0);
      EXPECT_GT(s.tau, m.samples[k - 1].tau);
      EXPECT_GT(s.a_t, 0.0);
      EXPECT_NEAR(s.a_tau, s.a * s.a_t, 1e-12 * s.a * s.a);
      const double e = 0.5 * s.a_t * s.a_t + std::pow(s.a, 3 - 3 * g) / (3 * g - 3);
      EXPECT_NEAR(e, e0, 1e-9);
    }
    EXPECT_NEAR(m.energy(), e0, 1e-12);
    // a(t) ~ 1 + t: a / (1 + t) settles to a positive constant.
    const auto& last = m.samples.back();
    const double ratio = last.a / (1 + last.t);
    const auto mid = m.at_t(0.9 * last.t);
    EXPECT_GT(ratio, 0.1);
    EXPECT_NEAR(mid.a / (1 + mid.t), ratio, 0.05 * ratio);
    // a e^(-a1 tau) bounded above and below.
    double lo = 1e300, hi = 0.0;
    for (const auto& s : m.samples) {
      const double v = s.a * std::exp(-m.a1_limit * s.tau);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    EXPECT_GT(lo, 0.0);
    EXPECT_LT(hi / lo, 10.0);
  }
}

TEST(AffineMotion, OdeResidualFromFiniteDifferences) {
  const double tol = 1e-10;
  const double g = 1.4;
  const auto m = integrate_affine(g, 1.0, 0.0, 5.0, tol);
  const double dt = 1e-3;
  double worst = 0.0;
  for (double t = 0.1; t < 4.9; t += 0.05) {
    const double att = (-m.at_t(t + 2 * dt).a_t + 8 * m.at_t(t + dt).a_t -
                        8 * m.at_t(t - dt).a_t + m.at_t(t - 2 * dt).a_t) /
                       (12 * dt);
    worst = std::max(worst, std::abs(att - std::pow(m.at_t(t).a, 2 - 3 * g)));
  }
  EXPECT_LE(worst, 10 * tol);
}

TEST(AffineMotion, RejectsBadInput) {
  EXPECT_THROW(integrate_affine(1.4, -1.0, 0.0, 1.0, 1e-10), Error);
  EXPECT_THROW(integrate_affine(1.4, 1.0, 0.0, -1.0, 1e-10), Error);
  EXPECT_THROW(integrate_affine(0.9, 1.0, 0.0, 1.0, 1e-10), Error);
}

TEST(Profile, FlatEntropyWeight) {
  for (double g : {1.2, 1.4, 2.0}) {
    const auto p = build_profile(flat(), g, RadialGrid::make(128));
    for (int j = 0; j < 128; ++j) {
      const double r = p.grid().node(j);
      EXPECT_NEAR(p.d_weight[j], 0.5 * (1 - r * r), 1e-10);
      EXPECT_NEAR(p.d_derivs[1][j], -r, 1e-10);
      EXPECT_NEAR(p.d_derivs[2][j], -1.0, 1e-10);
    }
    EXPECT_NEAR(p.d_at(1.0), 0.0, 1e-15);
    EXPECT_LE(balance_residual(p).max_abs(), 1e-12);
  }
}

TEST(Profile, BoundarySlopeIsMinusOne) {
  const auto flatp = build_profile(flat(), 1.4, RadialGrid::make(128));
  EXPECT_NEAR(boundary_slope(flatp), -1.0, 1e-3);
  for (const auto& spec : {bump(), gaussian_table()}) {
    const auto p = build_profile(spec, 1.4, RadialGrid::make(128));
    EXPECT_NEAR(boundary_slope(p), -1.0, 1e-3);
  }
}

TEST(Profile, InvariantsOverCorpus) {
  for (const auto& spec : {flat(), bump(), gaussian_table()}) {
    std::vector<double> res;
    for (int n : {64, 128, 256}) {
      const auto p = build_profile(spec, 1.4, RadialGrid::make(n));
      for (int j = 0; j < n; ++j) {
        EXPECT_GT(p.rho_bar[j], 0.0);
        EXPECT_GT(p.d_weight[j], 0.0);
      }
      res.push_back(balance_residual(p).max_abs());
    }
    if (res[1] > 1e-11) {
      EXPECT_GE(order(res[0], res[1]), 1.7);
      EXPECT_GE(order(res[1], res[2]), 1.7);
    }
  }
}

TEST(Profile, TableMatchesClosedForm) {
  const auto grid = RadialGrid::make(64);
  std::vector<double> r, phi;
  for (int i = 0; i <= 20; ++i) {
    r.push_back(i / 20.0);
    phi.push_back(1 + r.back() * r.back() - 0.5 * std::pow(r.back(), 4));
  }
  const auto pt = build_profile(ProfileSpec::table(r, phi), 1.4, grid);
  const auto pp = build_profile(ProfileSpec::poly({1.0, 0.0, 1.0, 0.0, -0.5}), 1.4, grid);
  for (int l = 0; l <= 2; ++l)
    EXPECT_LE(testing::max_abs_diff(pt.d_derivs[l], pp.d_derivs[l]), 1e-8) << "l = " << l;
}

TEST(Profile, RejectsInvalid) {
  const auto grid = RadialGrid::make(32);
  EXPECT_THROW(build_profile(ProfileSpec::poly({1.0, 0.0, -2.0}), 1.4, grid), Error);
  EXPECT_THROW(build_profile(ProfileSpec::poly({1.0, 0.3}), 1.4, grid), Error);
  try {
    build_profile(ProfileSpec::poly({-1.0}), 1.4, grid);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidProfile);
  }
}

TEST(Eulerian, AffineState) {
  const auto motion = integrate_affine(1.4, 1.0, 0.3, 3.0, 1e-11);
  const auto p = build_profile(bump(), 1.4, RadialGrid::make(64));
  for (double t : {0.0, 1.0, 2.5}) {
    const auto f = eulerian_fields(motion, p, t);
    const auto m = motion.at_t(t);
    for (int j = 0; j < 64; ++j) {
      const double r = p.grid().node(j);
      EXPECT_NEAR(f.rho[j], p.rho_bar[j] / (m.a * m.a * m.a), 1e-13);
      EXPECT_NEAR(f.u[j] / r, m.a_t, 1e-13);
      EXPECT_DOUBLE_EQ(f.S[j], std::log(p.d_weight[j]));
    }
    EXPECT_LT(f.S[63], f.S[32]);
  }
  EXPECT_THROW(eulerian_fields(motion, p, 10.0), Error);
}

TEST(Eulerian, DegenerateFlowMapIsReported) {
  const auto motion = integrate_affine(1.4, 1.0, 0.0, 1.0, 1e-11);
  const auto grid = RadialGrid::make(32);
  const auto p = build_profile(flat(), 1.4, grid);
  const auto H = GridFunction::sample(grid, [](double r) { return -1.5 * r; }, Parity::kOdd);
  try {
    eulerian_fields(motion, p, 0.5, &H);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateFlowMap);
  }
}

}  // namespace
}  // namespace radvac
