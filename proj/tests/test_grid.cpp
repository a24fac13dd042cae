#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "radvac/calculus.hpp"
#include "radvac/error.hpp"
#include "radvac/grid.hpp"
#include "radvac/kernels.hpp"
#include "test_util.hpp"

namespace radvac {
namespace {

using testing::order;

TEST(RadialGrid, NodesAreCellCentred) {
  const auto g = RadialGrid::make(32);
  EXPECT_EQ(g->size(), 32);
  EXPECT_DOUBLE_EQ(g->spacing(), 1.0 / 32);
  for (int j = 0; j < g->size(); ++j) EXPECT_DOUBLE_EQ(g->node(j), (j + 0.5) / 32);
  EXPECT_GE(g->node(0), g->spacing() / 4);
  EXPECT_LE(g->node(31), 1.0);
}

TEST(RadialGrid, RejectsTooFewCells) {
  EXPECT_THROW(RadialGrid(8), Error);
  EXPECT_THROW(RadialGrid(64, 3), Error);
}

TEST(RadialGrid, QuadratureOfOneIsOneThird) {
  for (int order_ : {2, 4}) {
    double prev = 0.0;
    for (int n : {32, 64, 128}) {
      const auto g = RadialGrid::make(n, order_);
      const auto one = GridFunction::constant(g, 1.0);
      const double err = std::abs(g->integrate_r2(one.values()) - 1.0 / 3.0);
      EXPECT_LT(err, 1e-12 + 1.0 / std::pow(n, order_));
      if (prev > 1e-13 && err > 1e-13) EXPECT_GE(order(prev, err), order_ - 0.3);
      prev = err;
    }
  }
}

TEST(RadialGrid, QuadratureConvergesForSmoothIntegrand) {
  // int_0^1 cos(r) r^2 dr = 2 cos 1 - sin 1
  const double exact = 2.0 * std::cos(1.0) - std::sin(1.0);
  std::vector<double> err;
  for (int n : {32, 64, 128}) {
    const auto g = RadialGrid::make(n);
    const auto f = GridFunction::sample(g, [](double r) { return std::cos(r); }, Parity::kEven);
    err.push_back(std::abs(g->integrate_r2(f.values()) - exact));
  }
  EXPECT_GE(order(err[0], err[1]), 3.7);
  EXPECT_GE(order(err[1], err[2]), 3.7);
}

TEST(FdWeights, FivePointCentredFirstDerivative) {
  const std::vector<double> x{-2, -1, 0, 1, 2};
  const auto w = kernels::fd_weights(0.0, x, 1);
  const double expect[5] = {1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12};
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(w[i], expect[i], 1e-15);
}

TEST(FdWeights, InterpolationReproducesLine) {
  const std::vector<double> x{0, 1, 2, 3};
  const auto w = kernels::fd_weights(4.5, x, 0);
  double v = 0.0;
  for (int i = 0; i < 4; ++i) v += w[i] * (2.0 * x[i] + 1.0);
  EXPECT_NEAR(v, 10.0, 1e-12);
}

TEST(ApplyDr, Examples) {
  const auto g = RadialGrid::make(64);
  const auto r = GridFunction::radius(g);
  const auto Dr = apply_Dr(r);
  for (int j = 0; j < g->size(); ++j) EXPECT_NEAR(Dr[j], 3.0, 1e-10);

  const auto r2 = GridFunction::sample(g, [](double x) { return x * x; }, Parity::kEven);
  const auto Dr2 = apply_Dr(r2);
  for (int j = 0; j < g->size(); ++j) EXPECT_NEAR(Dr2[j], 4.0 * g->node(j), 1e-10);

  const double c = 1.7;
  const auto cst = GridFunction::constant(g, c);
  const auto Drc = apply_Dr(cst);
  for (int j = 0; j < g->size(); ++j) EXPECT_NEAR(Drc[j], 2.0 * c / g->node(j), 1e-10);
}

TEST(ApplyDr, StencilConvergenceForSine) {
  for (int so : {2, 4}) {
    std::vector<double> err;
    for (int n : {64, 128, 256}) {
      const auto g = RadialGrid::make(n, so);
      const auto f = GridFunction::sample(g, [](double r) { return std::sin(r); }, Parity::kOdd);
      err.push_back(testing::sup_error(
          apply_Dr(f), [](double r) { return std::cos(r) + 2.0 * std::sin(r) / r; }));
    }
    EXPECT_NEAR(order(err[0], err[1]), so, 0.3) << "stencil order " << so;
    EXPECT_NEAR(order(err[1], err[2]), so, 0.3) << "stencil order " << so;
  }
}

TEST(Parity, GhostSignsAndAlgebra) {
  EXPECT_EQ(ghost_sign(Parity::kEven), 1);
  EXPECT_EQ(ghost_sign(Parity::kOdd), -1);
  EXPECT_EQ(ghost_sign(Parity::kNone), 0);
  EXPECT_EQ(flip(Parity::kOdd), Parity::kEven);
  EXPECT_EQ(product(Parity::kOdd, Parity::kOdd), Parity::kEven);
  EXPECT_EQ(product(Parity::kOdd, Parity::kEven), Parity::kOdd);
  EXPECT_EQ(sum(Parity::kOdd, Parity::kEven), Parity::kNone);
  const auto g = RadialGrid::make(32);
  const auto r = GridFunction::radius(g);
  EXPECT_EQ(r.parity(), Parity::kOdd);
  EXPECT_EQ(over_r(r).parity(), Parity::kEven);
  EXPECT_EQ(apply_Dr(r).parity(), Parity::kEven);
  EXPECT_EQ(apply_dr(r).parity(), Parity::kEven);
}

TEST(Parity, OddDerivativeAtOriginUsesReflection) {
  // d/dr of r^3 is 3 r^2; the odd ghost gives full order right next to r = 0.
  const auto g = RadialGrid::make(64);
  const auto f = GridFunction::sample(g, [](double r) { return r * r * r; }, Parity::kOdd);
  const auto df = apply_dr(f);
  EXPECT_NEAR(df[0], 3.0 * g->node(0) * g->node(0), 1e-12);
}

TEST(Kernels, SerialAndParallelAreBitIdentical) {
  const int n = 4096;
  const auto g = RadialGrid::make(n);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> f(n);
  for (auto& v : f) v = u(rng);
  const auto& s = g->stencil();
  for (int sign : {1, -1, 0}) {
    std::vector<double> a(n), b(n);
    kernels::derivative_serial(s, f.data(), sign, a.data());
    kernels::derivative_parallel(s, f.data(), sign, b.data());
    EXPECT_EQ(a, b);
    kernels::divergence_serial(s, f.data(), g->nodes().data(), sign, a.data());
    kernels::divergence_parallel(s, f.data(), g->nodes().data(), sign, b.data());
    EXPECT_EQ(a, b);
    kernels::sixth_difference_serial(f.data(), n, sign, a.data());
    kernels::sixth_difference_parallel(f.data(), n, sign, b.data());
    EXPECT_EQ(a, b);
  }
}

TEST(Kernels, SixthDifferenceAnnihilatesQuintics) {
  const auto g = RadialGrid::make(64);
  const auto f = GridFunction::sample(
      g, [](double r) { return r * (1.0 - 2.0 * r * r + 0.5 * std::pow(r, 4)); }, Parity::kOdd);
  const auto d = dissipation(f, 1.0);
  for (int j = 0; j < g->size(); ++j) EXPECT_NEAR(d[j], 0.0, 1e-9);
}

TEST(GridFunction, ArithmeticAndFiniteness) {
  const auto g = RadialGrid::make(16);
  auto a = GridFunction::constant(g, 2.0);
  auto b = GridFunction::radius(g);
  const auto c = a * b + 1.0;
  for (int j = 0; j < 16; ++j) EXPECT_DOUBLE_EQ(c[j], 2.0 * g->node(j) + 1.0);
  EXPECT_TRUE(c.all_finite());
  auto d = c;
  d[3] = std::nan("");
  EXPECT_FALSE(d.all_finite());
  EXPECT_DOUBLE_EQ((-b).max_abs(), g->node(15));
}

}  // namespace
}  // namespace radvac
