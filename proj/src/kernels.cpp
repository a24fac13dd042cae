#include "radvac/kernels.hpp"

#include "radvac/error.hpp"

namespace radvac::kernels {

std::vector<double> fd_weights(double x0, std::span<const double> x, int m) {
  const int n = static_cast<int>(x.size());
  // c[i][k]: weight of node i for derivative k.
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = x[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][m];
  return w;
}

namespace {

StencilRow make_row(int first, int count, int node, double h) {
  std::vector<double> x(count);
  for (int i = 0; i < count; ++i) x[i] = (first + i - node) * h;
  return {first, fd_weights(0.0, x, 1)};
}

// Centered row at node j with the values past r = 1 replaced by polynomial
// extrapolation of degree q from the last q + 1 nodes.
StencilRow make_extrapolated_row(int n, int j, double h, int order, int q) {
  const int hw = order / 2;
  const StencilRow c = make_row(-hw, order + 1, 0, h);
  const int base = n - 1 - q;
  std::vector<double> x(q + 1);
  for (int i = 0; i <= q; ++i) x[i] = (base + i) * h;
  std::vector<double> w(q + 1, 0.0);
  for (int k = 0; k <= order; ++k) {
    const int idx = j - hw + k;
    if (idx < n) {
      w[idx - base] += c.w[k];
      continue;
    }
    const std::vector<double> e = fd_weights(idx * h, x, 0);
    for (int i = 0; i <= q; ++i) w[i] += c.w[k] * e[i];
  }
  return {base, std::move(w)};
}

inline double apply_row(const StencilRow& row, const double* f, int parity_sign) {
  double acc = 0.0;
  const int count = static_cast<int>(row.w.size());
  for (int i = 0; i < count; ++i) {
    const int idx = row.first + i;
    const double v = idx >= 0 ? f[idx] : parity_sign * f[-idx - 1];
    acc += row.w[i] * v;
  }
  return acc;
}

inline double derivative_at(const DerivativeStencil& s, const double* f, int parity_sign, int j) {
  const int half = s.half();
  if (j >= s.size() - half) return apply_row(s.right(j), f, parity_sign);
  if (j < half && parity_sign == 0) return apply_row(s.left(j), f, parity_sign);
  const StencilRow& row = s.interior();
  double acc = 0.0;
  const int count = static_cast<int>(row.w.size());
  for (int i = 0; i < count; ++i) {
    const int idx = j + row.first + i;
    const double v = idx >= 0 ? f[idx] : parity_sign * f[-idx - 1];
    acc += row.w[i] * v;
  }
  return acc;
}

}  // namespace

DerivativeStencil::DerivativeStencil(int n, double h, int order) : n_(n), order_(order) {
  require(order == 2 || order == 4, ErrorKind::kInvalidParameter, "stencil order must be 2 or 4");
  require(n >= 2 * (order + 1), ErrorKind::kInvalidParameter, "grid too small for stencil");
  const int hw = order / 2;
  interior_ = make_row(-hw, order + 1, 0, h);
  for (int j = 0; j < hw; ++j) left_.push_back(make_row(0, order + 1, j, h));
  // Extrapolation degree order + 3 keeps compositions of up to three
  // derivatives at full order next to r = 1.
  for (int j = n - hw; j < n; ++j) right_.push_back(make_extrapolated_row(n, j, h, order, order + 3));
}

void derivative_serial(const DerivativeStencil& s, const double* f, int parity_sign, double* out) {
  const int n = s.size();
  for (int j = 0; j < n; ++j) out[j] = derivative_at(s, f, parity_sign, j);
}

void derivative_parallel(const DerivativeStencil& s, const double* f, int parity_sign, double* out) {
  const int n = s.size();
#pragma omp parallel for schedule(static) if (n >= kParallelMinSize)
  for (int j = 0; j < n; ++j) out[j] = derivative_at(s, f, parity_sign, j);
}

void derivative(const DerivativeStencil& s, const double* f, int parity_sign, double* out,
                Exec exec) {
  if (exec == Exec::kSerial)
    derivative_serial(s, f, parity_sign, out);
  else
    derivative_parallel(s, f, parity_sign, out);
}

void divergence_serial(const DerivativeStencil& s, const double* f, const double* r, int parity_sign,
                       double* out) {
  const int n = s.size();
  for (int j = 0; j < n; ++j) out[j] = derivative_at(s, f, parity_sign, j) + 2.0 * f[j] / r[j];
}

void divergence_parallel(const DerivativeStencil& s, const double* f, const double* r,
                         int parity_sign, double* out) {
  const int n = s.size();
#pragma omp parallel for schedule(static) if (n >= kParallelMinSize)
  for (int j = 0; j < n; ++j) out[j] = derivative_at(s, f, parity_sign, j) + 2.0 * f[j] / r[j];
}

namespace {
inline double sixth_at(const double* f, int n, int parity_sign, int j) {
  static constexpr double c[7] = {1, -6, 15, -20, 15, -6, 1};
  if (j + 3 >= n) return 0.0;
  double acc = 0.0;
  for (int k = 0; k < 7; ++k) {
    const int idx = j - 3 + k;
    acc += c[k] * (idx >= 0 ? f[idx] : parity_sign * f[-idx - 1]);
  }
  return acc;
}
}  // namespace

void sixth_difference_serial(const double* f, int n, int parity_sign, double* out) {
  for (int j = 0; j < n; ++j) out[j] = sixth_at(f, n, parity_sign, j);
}

void sixth_difference_parallel(const double* f, int n, int parity_sign, double* out) {
#pragma omp parallel for schedule(static) if (n >= kParallelMinSize)
  for (int j = 0; j < n; ++j) out[j] = sixth_at(f, n, parity_sign, j);
}

}  // namespace radvac::kernels
