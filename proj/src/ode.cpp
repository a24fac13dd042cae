#include "radvac/ode.hpp"

#include <algorithm>
#include <cmath>

#include "radvac/error.hpp"

namespace radvac {

namespace {
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace

void integrate_dp45(const OdeRhs& rhs, double t0, std::vector<double> y, double t_end,
                    const OdeOptions& opt, const OdeObserver& observer, const OdeStop& stop) {
  const size_t m = y.size();
  std::vector<double> k1(m), k2(m), k3(m), k4(m), k5(m), k6(m), k7(m), tmp(m), y5(m);
  double t = t0;
  double h = std::min(opt.h_init, opt.h_max(t));
  rhs(t, y, k1);
  observer(t, y);
  if (stop && stop(t, y)) return;
  long steps = 0;
  while (t < t_end) {
    require(++steps <= opt.max_steps, ErrorKind::kIntegrationFailure, "too many steps");
    h = std::min({h, t_end - t, opt.h_max(t)});
    // tmp = y + h * sum c_k k
    auto stage = [&](std::initializer_list<std::pair<double, const std::vector<double>*>> terms) {
      for (size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (const auto& [c, k] : terms) acc += c * (*k)[i];
        tmp[i] = y[i] + h * acc;
      }
    };
    stage({{a21, &k1}});
    rhs(t + c2 * h, tmp, k2);
    stage({{a31, &k1}, {a32, &k2}});
    rhs(t + c3 * h, tmp, k3);
    stage({{a41, &k1}, {a42, &k2}, {a43, &k3}});
    rhs(t + c4 * h, tmp, k4);
    stage({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
    rhs(t + c5 * h, tmp, k5);
    stage({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
    rhs(t + h, tmp, k6);
    for (size_t i = 0; i < m; ++i)
      y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    rhs(t + h, y5, k7);
    double err = 0.0;
    for (size_t i = 0; i < m; ++i) {
      const double e =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
      err = std::max(err, std::abs(e) / sc);
    }
    if (!std::isfinite(err)) {
      h *= 0.25;
    } else if (err <= 1.0) {
      t += h;
      y.swap(y5);
      k1.swap(k7);
      observer(t, y);
      if (stop && stop(t, y)) return;
      h *= std::min(5.0, 0.9 * std::pow(std::max(err, 1e-10), -0.2));
    } else {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
    }
    if (h < opt.h_min) fail(ErrorKind::kStepSizeUnderflow, "adaptive step fell below h_min");
  }
}

}  // namespace radvac
