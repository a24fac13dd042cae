#pragma once

#include <memory>
#include <vector>

#include "radvac/grid.hpp"
#include "radvac/jet.hpp"

namespace radvac {

struct GammaExponents {
  double gamma = 0.0;
  double d_exp = 0.0;  // time weight on the velocity energy
  double b_exp = 0.0;  // time weight on the potential energy, d + 3 - 3 gamma
};

GammaExponents gamma_exponents(double gamma);

struct MotionSample {
  double t = 0.0;
  double tau = 0.0;
  double a = 0.0;
  double a_t = 0.0;
  double a_tau = 0.0;
};

// Scalar affine expansion a(t) solving a_tt = a^(2 - 3 gamma), with dtau/dt = 1/a.
class AffineMotion {
 public:
  double gamma = 0.0;
  double a0_init = 1.0;
  double a1_init = 0.0;
  std::vector<MotionSample> samples;
  double a1_limit = 0.0;  // lim a_tau / a
  double a0_rate = 0.0;   // d(gamma)/2 * a1_limit
  GammaExponents exponents;

  double t_max() const { return samples.back().t; }
  double tau_max() const { return samples.back().tau; }
  // Quintic Hermite interpolation between samples, using the ODE for the
  // first and second derivatives.
  MotionSample at_tau(double tau) const;
  MotionSample at_t(double t) const;
  // Energy invariant 1/2 a_t^2 + a^(3-3 gamma)/(3 gamma - 3).
  double energy() const;
};

AffineMotion integrate_affine(double gamma, double a_init, double adot_init, double t_final,
                              double tol);
// Integrates until tau reaches tau_final.
AffineMotion integrate_affine_to_tau(double gamma, double a_init, double adot_init,
                                     double tau_final, double tol);

struct ProfileSpec {
  enum class Kind { kPoly, kTable };
  Kind kind = Kind::kPoly;
  std::vector<double> coeffs;  // phi(r) = sum c_i r^i
  std::vector<double> r;       // table abscissae in [0,1]
  std::vector<double> phi;

  static ProfileSpec poly(std::vector<double> c);
  static ProfileSpec table(std::vector<double> r, std::vector<double> phi);
};

// phi and its derivatives, either from polynomial coefficients or from a
// least-squares Chebyshev fit of tabulated values.
class PhiFunction {
 public:
  explicit PhiFunction(const ProfileSpec& spec);
  double value(double r) const;
  Jet jet(double r) const;

 private:
  bool poly_;
  std::vector<double> coeffs_;
  std::vector<std::vector<double>> cheb_;  // Chebyshev coefficients of phi, phi', ... in r
};

class BackgroundProfile {
 public:
  double gamma = 0.0;
  ProfileSpec phi_spec;
  int k_derivs = 0;
  GridFunction rho_bar;
  GridFunction d_weight;
  std::vector<GridFunction> d_derivs;    // d^(l), l = 0..k_derivs
  std::vector<GridFunction> rho_derivs;  // rho^(l)

  const std::shared_ptr<const RadialGrid>& grid_ptr() const { return rho_bar.grid_ptr(); }
  const RadialGrid& grid() const { return rho_bar.grid(); }
  const std::vector<Jet>& rho_jets() const { return rho_jets_; }
  const std::vector<Jet>& d_jets() const { return d_jets_; }
  double phi(double r) const { return phi_->value(r); }
  // d off the grid by Simpson quadrature from r = 1.
  double d_at(double r) const;

  // Samples the l-th derivative of a coefficient built from the (rho, d, r) jets.
  template <class F>
  GridFunction coefficient(F&& f, int l, Parity parity) const {
    std::vector<double> v(rho_jets_.size());
    for (size_t j = 0; j < v.size(); ++j)
      v[j] = f(rho_jets_[j], d_jets_[j], Jet::variable(grid().node(static_cast<int>(j))))
                 .derivative(l);
    return GridFunction(grid_ptr(), std::move(v), parity);
  }

 private:
  friend BackgroundProfile build_profile(const ProfileSpec&, double,
                                         std::shared_ptr<const RadialGrid>, int);
  std::shared_ptr<const PhiFunction> phi_;
  std::vector<Jet> rho_jets_;
  std::vector<Jet> d_jets_;
};

BackgroundProfile build_profile(const ProfileSpec& spec, double gamma,
                                std::shared_ptr<const RadialGrid> grid, int k_derivs = 4);

// rho r + d/dr (rho^gamma d) evaluated with the grid's derivative stencil.
GridFunction balance_residual(const BackgroundProfile& profile);
// One-sided derivative of rho^(gamma-1) d at r = 1 by Richardson extrapolation
// of backward differences with steps delta, delta/2, delta/4.
double boundary_slope(const BackgroundProfile& profile, double delta = 0.05);

struct EulerianFields {
  GridFunction u;
  GridFunction rho;
  GridFunction S;
};

// Eulerian velocity, density and entropy at physical time t. H and H_tau may be
// null for the affine state.
EulerianFields eulerian_fields(const AffineMotion& motion, const BackgroundProfile& profile,
                               double t, const GridFunction* H = nullptr,
                               const GridFunction* H_tau = nullptr);

}  // namespace radvac
