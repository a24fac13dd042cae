#pragma once

#include <span>
#include <vector>

// Stencil kernels. Each has a serial reference and an OpenMP version; the two
// must agree bit for bit (no reductions cross thread boundaries).
namespace radvac::kernels {

enum class Exec { kSerial, kParallel };

// Below this many nodes the OpenMP kernels run on one thread.
inline constexpr int kParallelMinSize = 2048;

// Fornberg weights for the m-th derivative at x0 from nodes x.
std::vector<double> fd_weights(double x0, std::span<const double> x, int m);

struct StencilRow {
  int first = 0;  // index of the first point; negative indices are reflection ghosts
  std::vector<double> w;
};

// First-derivative stencils on a uniform cell-centred grid of n nodes.
class DerivativeStencil {
 public:
  DerivativeStencil(int n, double h, int order);

  int order() const { return order_; }
  int size() const { return n_; }
  int half() const { return order_ / 2; }
  const StencilRow& interior() const { return interior_; }
  const StencilRow& left(int j) const { return left_[j]; }
  const StencilRow& right(int j) const { return right_[j - (n_ - half())]; }

 private:
  int n_;
  int order_;
  StencilRow interior_;
  std::vector<StencilRow> left_;
  std::vector<StencilRow> right_;
};

// parity_sign: +1 even, -1 odd (ghost f(-r) = sign * f(r)), 0 for one-sided closure.
void derivative_serial(const DerivativeStencil& s, const double* f, int parity_sign, double* out);
void derivative_parallel(const DerivativeStencil& s, const double* f, int parity_sign, double* out);
void derivative(const DerivativeStencil& s, const double* f, int parity_sign, double* out,
                Exec exec = Exec::kParallel);

// out = df + 2 f / r, the expanded divergence.
void divergence_serial(const DerivativeStencil& s, const double* f, const double* r, int parity_sign,
                       double* out);
void divergence_parallel(const DerivativeStencil& s, const double* f, const double* r,
                         int parity_sign, double* out);

// Sixth undivided difference with reflection ghosts at the origin; zero on the
// last three nodes, where the centred stencil does not fit.
void sixth_difference_serial(const double* f, int n, int parity_sign, double* out);
void sixth_difference_parallel(const double* f, int n, int parity_sign, double* out);

}  // namespace radvac::kernels
