#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "radvac/kernels.hpp"

namespace radvac {

// Reflection symmetry about r = 0. Radial fields that are smooth in 3D are
// even or odd in r; the tag selects the ghost values used near the origin.
enum class Parity { kEven, kOdd, kNone };

Parity flip(Parity p);
Parity product(Parity a, Parity b);
Parity sum(Parity a, Parity b);
int ghost_sign(Parity p);

// Uniform cell-centred grid on [0,1], r_j = (j + 1/2)/n.
class RadialGrid {
 public:
  RadialGrid(int n, int stencil_order = 4);
  static std::shared_ptr<const RadialGrid> make(int n, int stencil_order = 4);

  int size() const { return n_; }
  double spacing() const { return h_; }
  int stencil_order() const { return order_; }
  double node(int j) const { return r_[j]; }
  std::span<const double> nodes() const { return r_; }
  const kernels::DerivativeStencil& stencil() const { return stencil_; }

  // Weights for the integral of f r^2 dr over [0,1].
  std::span<const double> weights() const { return w_r2_; }
  // Integral of g dr over the faces [face_begin h, face_end h].
  double integrate(std::span<const double> g, int face_begin, int face_end) const;
  double integrate(std::span<const double> g) const { return integrate(g, 0, n_); }
  // Integral of f r^2 dr over [0,1].
  double integrate_r2(std::span<const double> f) const;

 private:
  int n_;
  int order_;
  double h_;
  std::vector<double> r_;
  std::vector<double> w_r2_;
  kernels::DerivativeStencil stencil_;
  std::vector<double> end_left_;   // g'(left face) from the first three nodes
  std::vector<double> end_right_;  // g'(right face) from the last three nodes
};

class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(std::shared_ptr<const RadialGrid> grid, std::vector<double> values, Parity parity);

  static GridFunction zeros(std::shared_ptr<const RadialGrid> grid, Parity parity);
  static GridFunction constant(std::shared_ptr<const RadialGrid> grid, double c);
  static GridFunction radius(std::shared_ptr<const RadialGrid> grid);
  static GridFunction sample(std::shared_ptr<const RadialGrid> grid,
                             const std::function<double(double)>& f, Parity parity);

  const RadialGrid& grid() const { return *grid_; }
  const std::shared_ptr<const RadialGrid>& grid_ptr() const { return grid_; }
  int size() const { return static_cast<int>(v_.size()); }
  std::span<const double> values() const { return v_; }
  std::vector<double>& mutable_values() { return v_; }
  double operator[](int j) const { return v_[j]; }
  double& operator[](int j) { return v_[j]; }
  Parity parity() const { return parity_; }
  void set_parity(Parity p) { parity_ = p; }

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(const GridFunction& o);
  GridFunction& operator*=(double s);
  GridFunction& operator+=(double s);  // constant shift; keeps parity only if even

  // Pointwise map; the caller states the parity of the result.
  GridFunction map(const std::function<double(double)>& f, Parity result) const;

  double max_abs() const;
  bool all_finite() const;

 private:
  std::shared_ptr<const RadialGrid> grid_;
  std::vector<double> v_;
  Parity parity_ = Parity::kNone;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(GridFunction a, const GridFunction& b);
GridFunction operator/(const GridFunction& a, const GridFunction& b);
GridFunction operator*(GridFunction a, double s);
GridFunction operator*(double s, GridFunction a);
GridFunction operator+(GridFunction a, double s);
GridFunction operator-(GridFunction a);

GridFunction times_r(const GridFunction& f);
GridFunction over_r(const GridFunction& f);
GridFunction square(const GridFunction& f);

}  // namespace radvac
