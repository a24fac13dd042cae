#pragma once

#include <array>
#include <vector>

#include "radvac/solver.hpp"

namespace radvac {

struct EnergyReport {
  double tau = 0.0;
  int N = 0;
  double S_N = 0.0;  // instantaneous bracket; the running sup is taken by callers
  std::vector<double> E;           // per order i = 0..N
  std::vector<double> D;           // per order
  std::vector<double> D_velocity;  // (2-d)/2 a^(d-1) a_tau ||D_i H_tau||^2_i
  std::vector<double> D_potential; // -(gamma b/2) a^(b-1) a_tau int w (D_(i+1) H)^2 s d^i r^2
  std::vector<double> C;           // i = 0..N-1, gamma > 5/3 only
  std::vector<std::array<double, 7>> Z;  // Z[i][j-1]
  AprioriMonitor apriori;
  bool direct_commutator = false;  // C_i taken from the direct difference

  double E_total() const;
  double D_total() const;
  double Z_total() const;
  double C_total() const;
};

struct EnergyOptions {
  bool include_R3 = false;   // add r R_3 to the zeroth-order remainder
  bool composed_commutators = true;  // use Q+/Q- identities for i <= 2
};

// The bracket of S^N at one state (no supremum).
double sn_bracket(const PerturbationState& state, const AffineMotion& motion,
                  const BackgroundProfile& profile, int N);
// Running supremum over the states.
double compute_SN(const std::vector<PerturbationState>& states, const AffineMotion& motion,
                  const BackgroundProfile& profile, int N);
std::vector<double> sn_series(const std::vector<PerturbationState>& states,
                              const AffineMotion& motion, const BackgroundProfile& profile, int N,
                              Exec exec = Exec::kParallel);

EnergyReport compute_energy_identity_terms(const PerturbationState& state,
                                           const AffineMotion& motion,
                                           const BackgroundProfile& profile, int N,
                                           const EnergyOptions& opt = {});
// One report per state; the parallel path distributes states over threads.
std::vector<EnergyReport> energy_reports(const std::vector<PerturbationState>& states,
                                         const AffineMotion& motion,
                                         const BackgroundProfile& profile, int N,
                                         const EnergyOptions& opt = {},
                                         Exec exec = Exec::kParallel);

// C_i[H] through both available paths.
GridFunction commutator_direct(int i, const Geometry& g, const GridFunction& H,
                               const BackgroundProfile& profile);
GridFunction commutator_composed(int i, const Geometry& g, const GridFunction& H,
                                 const BackgroundProfile& profile);

struct IdentityResidual {
  double max_abs = 0.0;   // sup over tau of |E(tau) - E(0) + int (D - sum Z)|
  double scale = 0.0;     // sup over tau of E^N
  double relative = 0.0;  // max_abs / scale
  std::vector<double> running;
};
// Integrated energy identity over uniformly spaced reports (Simpson in tau).
IdentityResidual integrate_identity_residual(const std::vector<EnergyReport>& reports);

struct EquivalenceResult {
  double C1 = 0.0;
  double C2 = 0.0;
  bool trivial = false;
};
EquivalenceResult check_norm_energy_equivalence(const std::vector<PerturbationState>& states,
                                                const AffineMotion& motion,
                                                const BackgroundProfile& profile, int N);

double check_coercivity(const std::vector<PerturbationState>& states, const AffineMotion& motion,
                        const BackgroundProfile& profile, int i);

struct DecayFit {
  double rate = 0.0;
  double intercept = 0.0;
  int samples = 0;
  double e_folds = 0.0;  // ln a over the fitted window
  double a0 = 0.0;
};
// Least-squares fit of log(values) against tau over the final tail_fraction of the window.
DecayFit fit_decay(const std::vector<double>& taus, const std::vector<double>& values,
                   const AffineMotion& motion, double tail_fraction = 0.5);

}  // namespace radvac
