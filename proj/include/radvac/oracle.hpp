#pragma once

#include <vector>

#include "radvac/background.hpp"
#include "radvac/grid.hpp"
#include "radvac/solver.hpp"

namespace radvac {

// Radial flow map zeta(t, y) = chi(t, r) y, evolved in physical time.
struct ChiState {
  double t = 0.0;
  GridFunction chi;    // even
  GridFunction chi_t;  // even
};

struct ChiControls {
  double cfl = 0.4;
  double dissipation = kDefaultDissipation;
  double dt_max = 0.01;
  double sample_every = 0.05;
  std::vector<double> sample_times;  // overrides sample_every when non-empty
};

struct ChiTrajectory {
  std::vector<ChiState> states;
  long steps = 0;
};

// chi = a (1 + H / r), chi_t = a_t xi + theta_tau.
ChiState chi_from_perturbation(const PerturbationState& state, const AffineMotion& motion);

// Eulerian Jacobian chi^2 (chi + r chi_r).
GridFunction chi_jacobian(const GridFunction& chi);

// Acceleration chi_tt of the radial Lagrangian equation.
GridFunction chi_rhs(const ChiState& state, const BackgroundProfile& profile);

ChiTrajectory solve_chi(const ChiState& initial, const BackgroundProfile& profile, double t_final,
                        const ChiControls& controls = {});

struct Discrepancy {
  double rel_sup = 0.0;      // max over samples of sup|chi_H - chi| / sup|chi|
  double rel_norm = 0.0;     // same in ||.||_0
  double rel_perturbation = 0.0;  // sup|chi_H - chi| / sup|chi - a|, 0 when chi is affine
  double t_begin = 0.0;
  double t_end = 0.0;
  int samples = 0;
};

// Maps the H trajectory to chi at the oracle's physical times. H samples are
// matched exactly when tau coincides, otherwise interpolated by cubic Hermite.
Discrepancy compare_solutions(const ChiTrajectory& chi, const Trajectory& h,
                              const AffineMotion& motion);

}  // namespace radvac
