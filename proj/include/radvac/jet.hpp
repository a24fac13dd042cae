#pragma once

#include <array>
#include <cmath>

namespace radvac {

// Truncated Taylor series c[k] = f^(k)(r0)/k!, used to get exact derivatives
// of profile-derived coefficients without finite differences.
class Jet {
 public:
  static constexpr int kSize = 12;

  Jet() { c_.fill(0.0); }
  explicit Jet(double value) {
    c_.fill(0.0);
    c_[0] = value;
  }
  static Jet variable(double r0) {
    Jet j(r0);
    j.c_[1] = 1.0;
    return j;
  }
  // Builds a jet from derivative values f, f', f'', ...
  template <class Range>
  static Jet from_derivatives(const Range& derivs) {
    Jet j;
    double fact = 1.0;
    int k = 0;
    for (double v : derivs) {
      if (k >= kSize) break;
      if (k > 0) fact *= k;
      j.c_[k] = v / fact;
      ++k;
    }
    return j;
  }

  double& operator[](int k) { return c_[k]; }
  double operator[](int k) const { return c_[k]; }
  double value() const { return c_[0]; }
  double derivative(int k) const {
    double fact = 1.0;
    for (int m = 2; m <= k; ++m) fact *= m;
    return c_[k] * fact;
  }
  // Jet of f'.
  Jet diff() const {
    Jet j;
    for (int k = 0; k + 1 < kSize; ++k) j.c_[k] = (k + 1) * c_[k + 1];
    return j;
  }

  Jet& operator+=(const Jet& o) {
    for (int k = 0; k < kSize; ++k) c_[k] += o.c_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int k = 0; k < kSize; ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Jet& operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, double s) {
    a.c_[0] += s;
    return a;
  }
  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet out;
    for (int k = 0; k < kSize; ++k) {
      double acc = 0.0;
      for (int j = 0; j <= k; ++j) acc += a.c_[j] * b.c_[k - j];
      out.c_[k] = acc;
    }
    return out;
  }
  friend Jet operator/(const Jet& a, const Jet& b) { return a * pow(b, -1.0); }

  // u = v^alpha via u_k = 1/(k v_0) sum_{j=1..k} ((alpha+1) j - k) v_j u_{k-j}.
  friend Jet pow(const Jet& v, double alpha) {
    Jet u;
    u.c_[0] = std::pow(v.c_[0], alpha);
    for (int k = 1; k < kSize; ++k) {
      double acc = 0.0;
      for (int j = 1; j <= k; ++j) acc += ((alpha + 1.0) * j - k) * v.c_[j] * u.c_[k - j];
      u.c_[k] = acc / (k * v.c_[0]);
    }
    return u;
  }

 private:
  std::array<double, kSize> c_;
};

}  // namespace radvac
