#pragma once

#include <functional>
#include <vector>

namespace radvac {

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_init = 1e-3;
  double h_min = 1e-14;
  // Step cap as a function of t (dense sampling for later interpolation).
  std::function<double(double)> h_max = [](double) { return 1e300; };
  long max_steps = 10'000'000;
};

using OdeRhs = std::function<void(double, const std::vector<double>&, std::vector<double>&)>;
using OdeObserver = std::function<void(double, const std::vector<double>&)>;
using OdeStop = std::function<bool(double, const std::vector<double>&)>;

// Adaptive Dormand-Prince 5(4). The observer sees t0 and every accepted step;
// integration ends at t_end or as soon as stop() returns true.
void integrate_dp45(const OdeRhs& rhs, double t0, std::vector<double> y, double t_end,
                    const OdeOptions& opt, const OdeObserver& observer, const OdeStop& stop = {});

}  // namespace radvac
