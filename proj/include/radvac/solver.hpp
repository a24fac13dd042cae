#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "radvac/background.hpp"
#include "radvac/calculus.hpp"
#include "radvac/error.hpp"
#include "radvac/grid.hpp"

namespace radvac {

struct PerturbationState {
  double tau = 0.0;
  GridFunction H;      // odd
  GridFunction H_tau;  // odd

  static PerturbationState zero(std::shared_ptr<const RadialGrid> grid, double tau = 0.0);
};

// Fields derived from H. Built on demand, never cached on a state.
struct Geometry {
  GridFunction theta;     // H / r
  GridFunction xi;        // 1 + theta
  GridFunction theta_r;   // d theta / dr
  GridFunction theta_rr;  // d^2 theta / dr^2
  GridFunction DrH;       // D_r H = r theta_r + 3 theta
  GridFunction D2H;       // d/dr D_r H
  GridFunction Jm1;       // J - 1, assembled without cancellation
  GridFunction J;         // xi^2 (1 + D_r H - 2 theta)
  GridFunction w;         // xi^4 / J^(gamma+1)
};

Geometry derive_geometry(const GridFunction& H, double gamma);
// Same fields from exact values of theta and its derivatives (manufactured solutions).
Geometry geometry_from_exact(std::shared_ptr<const RadialGrid> grid, double gamma,
                             const std::function<double(double)>& theta,
                             const std::function<double(double)>& theta_r,
                             const std::function<double(double)>& theta_rr);

struct AprioriMonitor {
  bool sn_bound = true;
  bool j_bound = true;
  bool dth_bound = true;
  bool d2th_bound = true;
  double sn = 0.0;    // S^N
  double j_dev = 0.0; // max |J - 1|
  double dth = 0.0;   // max |theta_r|
  double d2th = 0.0;  // max |theta_rr|

  bool ok() const { return sn_bound && j_bound && dth_bound && d2th_bound; }
  std::string violated() const;  // empty when ok()
};

AprioriMonitor make_monitor(const Geometry& g, double sn);

struct Remainders {
  GridFunction R1;
  GridFunction R2;
  GridFunction R2a;
  GridFunction R2b;
  GridFunction R3;
};

Remainders compute_remainders(const PerturbationState& state, const BackgroundProfile& profile);
Remainders compute_remainders(const Geometry& g, const BackgroundProfile& profile);

using Forcing = std::function<GridFunction(double tau)>;

// The H-equation with its profile coefficients evaluated once.
class HEquation {
 public:
  HEquation(const BackgroundProfile& profile, const AffineMotion& motion);

  // H_tau_tau. Raises blow-up-detected on non-finite values.
  GridFunction rhs(const PerturbationState& state) const;
  // Same assembly from prescribed geometry.
  GridFunction rhs(double tau, const GridFunction& H, const GridFunction& H_tau,
                   const Geometry& g) const;
  // Linearization about H = 0: -(a_tau/a) H_tau + a^(3-3 gamma)(gamma L_0 H + H).
  GridFunction linear_rhs(const PerturbationState& state) const;
  // The same right side assembled from the theta-form of the equation,
  // with J_r taken as a discrete derivative of J.
  GridFunction rhs_theta_form(const PerturbationState& state) const;

  double max_sound_speed(const PerturbationState& state) const;

  const BackgroundProfile& profile() const { return profile_; }
  const AffineMotion& motion() const { return motion_; }
  const GridFunction& s() const { return s_; }
  const GridFunction& m0() const { return m0_; }
  double gamma() const { return gamma_; }

 private:
  const BackgroundProfile& profile_;
  const AffineMotion& motion_;
  double gamma_;
  GridFunction s_;
  GridFunction m0_;
};

GridFunction rhs_H(const PerturbationState& state, const AffineMotion& motion,
                   const BackgroundProfile& profile);

// Default strength of the grid-scale dissipation.
inline constexpr double kDefaultDissipation = 0.05;

struct StepOptions {
  double cfl = 0.4;
  double dissipation = kDefaultDissipation;
  bool linear = false;
  Forcing forcing;  // added to H_tau_tau
};

// Largest stable dtau: the CFL bound cfl h / c_max, and h / sigma for the damping.
double step_limit(const HEquation& eq, const PerturbationState& state, double cfl, double sigma);

PerturbationState step(const PerturbationState& state, const HEquation& eq, double dtau,
                       const StepOptions& opt = {});
PerturbationState step(const PerturbationState& state, const AffineMotion& motion,
                       const BackgroundProfile& profile, double dtau);

struct SolveControls {
  int N = 2;
  double cfl = 0.4;
  double dissipation = kDefaultDissipation;
  double dtau_max = 0.01;
  double sample_every = 0.05;
  std::vector<double> sample_times;  // overrides sample_every when non-empty
  bool sample_every_step = false;
  bool monitor = true;
  bool linear = false;
  Forcing forcing;
};

struct Trajectory {
  std::vector<PerturbationState> states;
  std::vector<AprioriMonitor> monitors;
  std::vector<double> sn;  // running sup of S^N at each sample
  int N = 2;
  long steps = 0;
};

class AprioriViolated : public Error {
 public:
  AprioriViolated(std::string bound, double tau, double value, Trajectory partial);
  const std::string& bound() const { return bound_; }
  double tau() const { return tau_; }
  double value() const { return value_; }
  const Trajectory& partial() const { return partial_; }

 private:
  std::string bound_;
  double tau_;
  double value_;
  Trajectory partial_;
};

Trajectory solve(const PerturbationState& initial, const AffineMotion& motion,
                 const BackgroundProfile& profile, double tau_final,
                 const SolveControls& controls = {});

// Initial data H0 = A r p(r^2), H_tau0 = A r q(r^2), with A the largest
// amplitude keeping S^N(0) <= eps and ||H0||_0^2 <= lambda.
struct InitialData {
  std::vector<double> p{1.0, -0.5};
  std::vector<double> q{0.5, -1.0};
  double eps = 1e-4;
  double lambda = 1e-4;
};

struct InitialInfo {
  double amplitude = 0.0;
  double sn0 = 0.0;
  double h0_norm = 0.0;  // ||H0||_0^2
};

PerturbationState make_initial(const InitialData& data, const AffineMotion& motion,
                               const BackgroundProfile& profile, int N,
                               InitialInfo* info = nullptr);

// Frozen-coefficient iteration for h = D_r H.
struct LwpOptions {
  double cfl = 0.4;
  double dissipation = kDefaultDissipation;
  double dtau_max = 0.01;
  bool include_R3 = false;
  int N = 2;
  // Iteration stops once sup ||H_j - H_(j-1)||_0 falls below stop_tol * sup ||H_j||_0.
  double stop_tol = 1e-12;
};

struct LwpIterate {
  std::vector<PerturbationState> states;  // iterate on the common time levels
  GridFunction h_final;                   // h at tau = T
  double diff_sn = 0.0;                   // S^N of the difference to the previous iterate
  double diff_norm = 0.0;                 // sup over time of ||H_j - H_(j-1)||_0
  double ratio = 0.0;                     // sqrt(diff_sn / previous diff_sn)
};

std::vector<LwpIterate> lwp_iterate(const PerturbationState& initial, const AffineMotion& motion,
                                    const BackgroundProfile& profile, double T, int j_max,
                                    const LwpOptions& opt = {});

// H(r) = r^-2 int_0^r h(s) s^2 ds by cumulative quadrature.
GridFunction reconstruct_from_divergence(const GridFunction& h);

}  // namespace radvac
