#include "radvac/grid.hpp"

#include <algorithm>
#include <cmath>

#include "radvac/error.hpp"

namespace radvac {

namespace {
int checked_size(int n) {
  require(n >= 16, ErrorKind::kInvalidParameter, "grid needs n >= 16");
  return n;
}
}  // namespace

Parity flip(Parity p) {
  switch (p) {
    case Parity::kEven: return Parity::kOdd;
    case Parity::kOdd: return Parity::kEven;
    default: return Parity::kNone;
  }
}

Parity product(Parity a, Parity b) {
  if (a == Parity::kNone || b == Parity::kNone) return Parity::kNone;
  return a == b ? Parity::kEven : Parity::kOdd;
}

Parity sum(Parity a, Parity b) { return a == b ? a : Parity::kNone; }

int ghost_sign(Parity p) {
  switch (p) {
    case Parity::kEven: return 1;
    case Parity::kOdd: return -1;
    default: return 0;
  }
}

RadialGrid::RadialGrid(int n, int stencil_order)
    : n_(n),
      order_(stencil_order),
      h_(1.0 / n),
      stencil_(checked_size(n), 1.0 / n, stencil_order) {
  r_.resize(n);
  for (int j = 0; j < n; ++j) r_[j] = (j + 0.5) * h_;
  // g'(face) from three nodes at distances h/2, 3h/2, 5h/2 inside the interval.
  const double xl[3] = {0.5 * h_, 1.5 * h_, 2.5 * h_};
  end_left_ = kernels::fd_weights(0.0, xl, 1);
  const double xr[3] = {-0.5 * h_, -1.5 * h_, -2.5 * h_};
  end_right_ = kernels::fd_weights(0.0, xr, 1);
  std::vector<double> w(n, h_);
  if (order_ >= 4) {
    for (int k = 0; k < 3; ++k) {
      w[k] -= h_ * h_ / 24.0 * end_left_[k];
      w[n - 1 - k] += h_ * h_ / 24.0 * end_right_[k];
    }
  }
  w_r2_.resize(n);
  for (int j = 0; j < n; ++j) w_r2_[j] = w[j] * r_[j] * r_[j];
}

std::shared_ptr<const RadialGrid> RadialGrid::make(int n, int stencil_order) {
  return std::make_shared<const RadialGrid>(n, stencil_order);
}

// Midpoint rule plus the leading Euler-Maclaurin end correction h^2/24 (g'(b) - g'(a)),
// which lifts the rule to fourth order.
double RadialGrid::integrate(std::span<const double> g, int face_begin, int face_end) const {
  require(face_begin >= 0 && face_end <= n_ && face_end - face_begin >= 3,
          ErrorKind::kInvalidParameter, "quadrature interval needs at least three cells");
  double acc = 0.0;
  for (int j = face_begin; j < face_end; ++j) acc += g[j];
  acc *= h_;
  if (order_ >= 4) {
    double dl = 0.0;
    double dr = 0.0;
    for (int k = 0; k < 3; ++k) {
      dl += end_left_[k] * g[face_begin + k];
      dr += end_right_[k] * g[face_end - 1 - k];
    }
    acc += h_ * h_ / 24.0 * (dr - dl);
  }
  return acc;
}

double RadialGrid::integrate_r2(std::span<const double> f) const {
  double acc = 0.0;
  for (int j = 0; j < n_; ++j) acc += w_r2_[j] * f[j];
  return acc;
}

GridFunction::GridFunction(std::shared_ptr<const RadialGrid> grid, std::vector<double> values,
                           Parity parity)
    : grid_(std::move(grid)), v_(std::move(values)), parity_(parity) {
  require(static_cast<int>(v_.size()) == grid_->size(), ErrorKind::kInvalidParameter,
          "grid function size mismatch");
}

GridFunction GridFunction::zeros(std::shared_ptr<const RadialGrid> grid, Parity parity) {
  const int n = grid->size();
  return GridFunction(std::move(grid), std::vector<double>(n, 0.0), parity);
}

GridFunction GridFunction::constant(std::shared_ptr<const RadialGrid> grid, double c) {
  const int n = grid->size();
  return GridFunction(std::move(grid), std::vector<double>(n, c), Parity::kEven);
}

GridFunction GridFunction::radius(std::shared_ptr<const RadialGrid> grid) {
  std::vector<double> v(grid->nodes().begin(), grid->nodes().end());
  return GridFunction(std::move(grid), std::move(v), Parity::kOdd);
}

GridFunction GridFunction::sample(std::shared_ptr<const RadialGrid> grid,
                                  const std::function<double(double)>& f, Parity parity) {
  std::vector<double> v(grid->size());
  for (int j = 0; j < grid->size(); ++j) v[j] = f(grid->node(j));
  return GridFunction(std::move(grid), std::move(v), parity);
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  for (int j = 0; j < size(); ++j) v_[j] += o.v_[j];
  parity_ = sum(parity_, o.parity_);
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  for (int j = 0; j < size(); ++j) v_[j] -= o.v_[j];
  parity_ = sum(parity_, o.parity_);
  return *this;
}

GridFunction& GridFunction::operator*=(const GridFunction& o) {
  for (int j = 0; j < size(); ++j) v_[j] *= o.v_[j];
  parity_ = product(parity_, o.parity_);
  return *this;
}

GridFunction& GridFunction::operator*=(double s) {
  for (double& x : v_) x *= s;
  return *this;
}

GridFunction& GridFunction::operator+=(double s) {
  for (double& x : v_) x += s;
  if (s != 0.0) parity_ = sum(parity_, Parity::kEven);
  return *this;
}

GridFunction GridFunction::map(const std::function<double(double)>& f, Parity result) const {
  std::vector<double> out(v_.size());
  for (size_t j = 0; j < v_.size(); ++j) out[j] = f(v_[j]);
  return GridFunction(grid_, std::move(out), result);
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double x : v_) m = std::max(m, std::abs(x));
  return m;
}

bool GridFunction::all_finite() const {
  return std::all_of(v_.begin(), v_.end(), [](double x) { return std::isfinite(x); });
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(GridFunction a, const GridFunction& b) { return a *= b; }
GridFunction operator/(const GridFunction& a, const GridFunction& b) {
  std::vector<double> v(a.size());
  for (int j = 0; j < a.size(); ++j) v[j] = a[j] / b[j];
  return GridFunction(a.grid_ptr(), std::move(v), product(a.parity(), b.parity()));
}
GridFunction operator*(GridFunction a, double s) { return a *= s; }
GridFunction operator*(double s, GridFunction a) { return a *= s; }
GridFunction operator+(GridFunction a, double s) { return a += s; }
GridFunction operator-(GridFunction a) { return a *= -1.0; }

GridFunction times_r(const GridFunction& f) {
  std::vector<double> v(f.size());
  for (int j = 0; j < f.size(); ++j) v[j] = f[j] * f.grid().node(j);
  return GridFunction(f.grid_ptr(), std::move(v), flip(f.parity()));
}

GridFunction over_r(const GridFunction& f) {
  std::vector<double> v(f.size());
  for (int j = 0; j < f.size(); ++j) v[j] = f[j] / f.grid().node(j);
  return GridFunction(f.grid_ptr(), std::move(v), flip(f.parity()));
}

GridFunction square(const GridFunction& f) { return f * f; }

}  // namespace radvac
