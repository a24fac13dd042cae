#include "radvac/calculus.hpp"

#include <algorithm>
#include <cmath>

#include "radvac/error.hpp"

namespace radvac {

int max_operator_order(const RadialGrid& grid) { return std::min(8, grid.size() / 8); }

GridFunction apply_dr(const GridFunction& f, Exec exec) {
  std::vector<double> out(f.size());
  kernels::derivative(f.grid().stencil(), f.values().data(), ghost_sign(f.parity()), out.data(),
                      exec);
  return GridFunction(f.grid_ptr(), std::move(out), flip(f.parity()));
}

GridFunction apply_Dr(const GridFunction& f, Exec exec) {
  std::vector<double> out(f.size());
  const auto& g = f.grid();
  if (exec == Exec::kSerial)
    kernels::divergence_serial(g.stencil(), f.values().data(), g.nodes().data(),
                               ghost_sign(f.parity()), out.data());
  else
    kernels::divergence_parallel(g.stencil(), f.values().data(), g.nodes().data(),
                                 ghost_sign(f.parity()), out.data());
  return GridFunction(f.grid_ptr(), std::move(out), flip(f.parity()));
}

GridFunction apply_Di(int i, const GridFunction& f) {
  require(i >= 0, ErrorKind::kInvalidParameter, "operator order must be nonnegative");
  if (i > max_operator_order(f.grid()))
    fail(ErrorKind::kOrderTooHigh, "operator order exceeds grid support");
  GridFunction g = f;
  if (i % 2 == 1) {
    for (int k = 0; k < (i - 1) / 2; ++k) g = apply_dr(apply_Dr(g));
    return apply_Dr(g);
  }
  for (int k = 0; k < i / 2; ++k) g = apply_dr(apply_Dr(g));
  return g;
}

GridFunction apply_Dbar_i(int i, const GridFunction& f) {
  require(i >= 0, ErrorKind::kInvalidParameter, "operator order must be nonnegative");
  if (i == 0) return f;
  return apply_Di(i - 1, apply_dr(f));
}

GridFunction dissipation(const GridFunction& f, double sigma, Exec exec) {
  std::vector<double> out(f.size());
  if (exec == Exec::kSerial)
    kernels::sixth_difference_serial(f.values().data(), f.size(), ghost_sign(f.parity()), out.data());
  else
    kernels::sixth_difference_parallel(f.values().data(), f.size(), ghost_sign(f.parity()),
                                       out.data());
  const double scale = sigma / (64.0 * f.grid().spacing());
  for (double& v : out) v *= scale;
  return GridFunction(f.grid_ptr(), std::move(out), f.parity());
}

namespace {

Jet s_jet(const Jet& rho, const Jet& d, double gamma) { return pow(rho, gamma - 1.0) * d; }

Jet m_jet(const Jet& rho, const Jet& d, double gamma, int k) {
  return (gamma + k * (gamma - 1.0)) * (pow(rho, gamma - 2.0) * rho.diff() * d) +
         (1.0 + k) * (pow(rho, gamma - 1.0) * d.diff());
}

Parity parity_of_derivative(Parity base, int l) { return l % 2 == 0 ? base : flip(base); }

}  // namespace

GridFunction sound_weight(const BackgroundProfile& profile, int l) {
  const double g = profile.gamma;
  return profile.coefficient([g](const Jet& rho, const Jet& d, const Jet&) { return s_jet(rho, d, g); },
                             l, parity_of_derivative(Parity::kEven, l));
}

GridFunction drift(const BackgroundProfile& profile, int k, int l) {
  const double g = profile.gamma;
  return profile.coefficient(
      [g, k](const Jet& rho, const Jet& d, const Jet&) { return m_jet(rho, d, g, k); }, l,
      parity_of_derivative(Parity::kOdd, l));
}

GridFunction apply_Lk(int k, const GridFunction& f, const BackgroundProfile& profile) {
  const GridFunction g = apply_Dr(f);
  return sound_weight(profile) * apply_dr(g) + drift(profile, k) * g;
}

GridFunction apply_Lk_star(int k, const GridFunction& h, const BackgroundProfile& profile) {
  const GridFunction q = apply_dr(h);
  return sound_weight(profile) * apply_Dr(q) + drift(profile, k) * q;
}

GridFunction compute_Qplus(int k, const BackgroundProfile& profile, int l) {
  const double g = profile.gamma;
  return profile.coefficient(
      [g, k](const Jet& rho, const Jet& d, const Jet& r) {
        const Jet m = m_jet(rho, d, g, k);
        return m.diff() + 2.0 * (m * pow(r, -1.0));
      },
      l, parity_of_derivative(Parity::kEven, l));
}

GridFunction compute_Qminus(int k, const BackgroundProfile& profile, int l) {
  const double g = profile.gamma;
  return profile.coefficient(
      [g, k](const Jet& rho, const Jet& d, const Jet& r) {
        const Jet m = m_jet(rho, d, g, k);
        return m.diff() - 2.0 * (m * pow(r, -1.0));
      },
      l, parity_of_derivative(Parity::kEven, l));
}

GridFunction d_power(const BackgroundProfile& profile, int k) {
  return profile.d_weight.map([k](double d) { return std::pow(d, k); }, Parity::kEven);
}

double weighted_inner(const GridFunction& f, const GridFunction& g, int k,
                      const BackgroundProfile& profile) {
  const RadialGrid& grid = f.grid();
  std::vector<double> v(f.size());
  for (int j = 0; j < f.size(); ++j) v[j] = std::pow(profile.d_weight[j], k) * f[j] * g[j];
  return grid.integrate_r2(v);
}

double weighted_norm(const GridFunction& f, int k, const BackgroundProfile& profile) {
  require(k >= 0, ErrorKind::kInvalidParameter, "weight exponent must be nonnegative");
  return weighted_inner(f, f, k, profile);
}

double cutoff_psi(double r) {
  if (r <= 0.5) return 1.0;
  if (r >= 0.75) return 0.0;
  const double x = (r - 0.5) / 0.25;
  return 1.0 - x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

GridFunction cutoff_psi(std::shared_ptr<const RadialGrid> grid) {
  return GridFunction::sample(std::move(grid), [](double r) { return cutoff_psi(r); },
                              Parity::kEven);
}

GridFunction VectorFieldWord::apply(const GridFunction& f) const {
  GridFunction g = f;
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) {
    switch (*it) {
      case Letter::kPartial: g = apply_dr(g); break;
      case Letter::kDr: g = apply_Dr(g); break;
      case Letter::kInvR: g = over_r(g); break;
    }
  }
  return g;
}

std::string VectorFieldWord::name() const {
  if (letters.empty()) return "1";
  std::string s;
  for (Letter l : letters) {
    if (!s.empty()) s += " ";
    s += l == Letter::kPartial ? "dr" : (l == Letter::kDr ? "Dr" : "1/r");
  }
  return s;
}

std::vector<VectorFieldWord> enumerate_P(int i, bool bar) {
  require(i >= 0, ErrorKind::kInvalidParameter, "class order must be nonnegative");
  if (i > 6) fail(ErrorKind::kOrderTooHigh, "vector-field classes enumerated only for i <= 6");
  using L = VectorFieldWord::Letter;
  if (bar) {
    if (i == 0) return {VectorFieldWord{true, 0, {}}};
    std::vector<VectorFieldWord> out = enumerate_P(i - 1, false);
    for (auto& w : out) {
      w.bar = true;
      w.order = i;
      w.letters.push_back(L::kPartial);
    }
    return out;
  }
  if (i == 0) return {VectorFieldWord{false, 0, {}}};
  // i = 2j+2: dr V_1 ... dr V_(j+1); i = 2j+1: V_(j+1) dr V_1 ... dr V_j.
  const int pairs = i / 2;
  const int vcount = (i + 1) / 2;
  std::vector<VectorFieldWord> out;
  for (int mask = 0; mask < (1 << vcount); ++mask) {
    auto letter = [&](int k) { return (mask >> k) & 1 ? L::kInvR : L::kDr; };
    VectorFieldWord w{false, i, {}};
    if (i % 2 == 1) w.letters.push_back(letter(vcount - 1));
    for (int k = 0; k < pairs; ++k) {
      w.letters.push_back(L::kPartial);
      w.letters.push_back(letter(k));
    }
    out.push_back(std::move(w));
  }
  return out;
}

namespace {

int quarter_face(const RadialGrid& grid, int q) {
  require(grid.size() % 4 == 0, ErrorKind::kInvalidParameter, "grid size must be divisible by 4");
  return q * grid.size() / 4;
}

// Integral of f^2 w over the faces [b, e).
double energy(const GridFunction& f, const GridFunction& w, int b, int e) {
  const GridFunction g = square(f) * w;
  return f.grid().integrate(g.values(), b, e);
}

}  // namespace

double control_ratio(const GridFunction& X, int i) {
  const RadialGrid& grid = X.grid();
  const int e = quarter_face(grid, 3);
  const GridFunction psi = cutoff_psi(X.grid_ptr());
  const GridFunction w = square(times_r(psi));
  const double denom = energy(apply_Di(i, X), w, 0, e);
  double num = 0.0;
  for (const auto& word : enumerate_P(i)) num += energy(word.apply(X), w, 0, e);
  return denom > 0.0 ? num / denom : 0.0;
}

EmbeddingRatios embedding_ratios(const GridFunction& u, const BackgroundProfile& profile, int m) {
  require(m >= 1, ErrorKind::kInvalidParameter, "embedding index must be positive");
  const RadialGrid& grid = u.grid();
  const int inner_end = quarter_face(grid, 3);
  const int outer_begin = quarter_face(grid, 1);
  const GridFunction r2 = square(GridFunction::radius(u.grid_ptr()));
  const GridFunction d2m = d_power(profile, 2 * m);
  auto bound = [&](auto&& op) {
    double b = 0.0;
    for (int k = 1; k <= 2; ++k) b += energy(op(k), r2, 0, inner_end);
    for (int k = 0; k <= m + 1; ++k) b += energy(op(k), d2m, outer_begin, grid.size());
    return b;
  };
  const double bD = bound([&](int k) { return apply_Di(k, u); });
  const double bDbar = bound([&](int k) { return apply_Dbar_i(k, u); });
  const double sup = u.max_abs();
  const double sup_r = over_r(u).max_abs();
  EmbeddingRatios out;
  if (bD > 0.0) {
    out.D = sup * sup / bD;
    out.over_r = sup_r * sup_r / bD;
  }
  if (bDbar > 0.0) out.Dbar = sup * sup / bDbar;
  return out;
}

}  // namespace radvac
