#pragma once

#include <string>
#include <vector>

#include "radvac/background.hpp"
#include "radvac/grid.hpp"

namespace radvac {

using kernels::Exec;

// Highest 𝒟_i order accepted on a grid: min(8, n/8).
int max_operator_order(const RadialGrid& grid);

GridFunction apply_dr(const GridFunction& f, Exec exec = Exec::kParallel);
// D_r f = r^-2 d/dr (r^2 f), evaluated as f' + 2 f / r.
GridFunction apply_Dr(const GridFunction& f, Exec exec = Exec::kParallel);
// 𝒟_i = (d/dr D_r)^(i/2) for even i, D_r (d/dr D_r)^((i-1)/2) for odd i.
GridFunction apply_Di(int i, const GridFunction& f);
// 𝒟̄_0 = 1, 𝒟̄_i = 𝒟_(i-1) d/dr.
GridFunction apply_Dbar_i(int i, const GridFunction& f);

// Kreiss-Oliger term sigma/(64 h) * (sixth difference), a damping of grid-scale
// modes that is O(h^5) on smooth data.
GridFunction dissipation(const GridFunction& f, double sigma, Exec exec = Exec::kParallel);

// s = rho^(gamma-1) d, the squared sound speed of the background.
GridFunction sound_weight(const BackgroundProfile& profile, int l = 0);
// m_k = (gamma + k(gamma-1)) rho^(gamma-2) rho' d + (1+k) rho^(gamma-1) d', and its l-th derivative.
GridFunction drift(const BackgroundProfile& profile, int k, int l = 0);

// L_k f = s (D_r f)' + m_k D_r f; the d^-k weight cancels before evaluation.
GridFunction apply_Lk(int k, const GridFunction& f, const BackgroundProfile& profile);
// L_k* h = s D_r(h') + m_k h'.
GridFunction apply_Lk_star(int k, const GridFunction& h, const BackgroundProfile& profile);

// D_r L_k f = L*_(k+1) D_r f + Q+ D_r f with Q+ = m_k' + 2 m_k / r.
GridFunction compute_Qplus(int k, const BackgroundProfile& profile, int l = 0);
// d/dr L*_k h = L_(k+1) h' + Q- h' with Q- = m_k' - 2 m_k / r.
GridFunction compute_Qminus(int k, const BackgroundProfile& profile, int l = 0);

// Squared norm: integral of d^k f^2 r^2 dr.
double weighted_norm(const GridFunction& f, int k, const BackgroundProfile& profile);
// Integral of d^k f g r^2 dr.
double weighted_inner(const GridFunction& f, const GridFunction& g, int k,
                      const BackgroundProfile& profile);
GridFunction d_power(const BackgroundProfile& profile, int k);

// Smooth cutoff: 1 on [0,1/2], 0 on [3/4,1], quintic smoothstep between.
double cutoff_psi(double r);
GridFunction cutoff_psi(std::shared_ptr<const RadialGrid> grid);

struct VectorFieldWord {
  enum class Letter { kPartial, kDr, kInvR };
  bool bar = false;
  int order = 0;
  std::vector<Letter> letters;  // written left to right; the rightmost acts first

  GridFunction apply(const GridFunction& f) const;
  std::string name() const;
};

// All words of the class 𝒫_i (bar = false) or 𝒫̄_i (bar = true), i <= 6.
std::vector<VectorFieldWord> enumerate_P(int i, bool bar = false);

// Sum over words of 𝒫_i of the r^2 psi^2 energy on [0,3/4], divided by the
// same energy of 𝒟_i X. Needs n divisible by 4.
double control_ratio(const GridFunction& X, int i);

// ||u||_inf^2 and ||u/r||_inf^2 over the two-region weighted bound with
// weight d^(2m) near the boundary, using 𝒟_k (D), 𝒟̄_k (Dbar) or 𝒟_k with u/r (over_r).
struct EmbeddingRatios {
  double D = 0.0;
  double Dbar = 0.0;
  double over_r = 0.0;
};
EmbeddingRatios embedding_ratios(const GridFunction& u, const BackgroundProfile& profile, int m);

}  // namespace radvac
