#pragma once

#include <array>
#include <cmath>

#include <Eigen/Core>

namespace lag {

// Truncated bivariate Taylor polynomial in local offsets (s, t) about a base
// point, total degree <= D. Coefficient (i, j) multiplies s^i t^j.
template <int D>
class Tps {
  static_assert(D >= 0, "degree must be non-negative");

 public:
  static constexpr int kDegree = D;
  static constexpr int kSize = (D + 1) * (D + 2) / 2;

  static constexpr int index(int i, int j) {
    const int k = i + j;
    return k * (k + 1) / 2 + j;
  }

  Tps() { c_.fill(0.0); }
  Tps(double v) {  // NOLINT: implicit promotion from scalars is intended
    c_.fill(0.0);
    c_[0] = v;
  }

  // base + s (which == 0) or base + t (which == 1)
  static Tps variable(double base, int which) {
    Tps r(base);
    if constexpr (D >= 1) r.c_[which == 0 ? index(1, 0) : index(0, 1)] = 1.0;
    return r;
  }

  double value() const { return c_[0]; }
  double coef(int i, int j) const { return c_[index(i, j)]; }
  double& coef(int i, int j) { return c_[index(i, j)]; }
  double operator[](int k) const { return c_[k]; }
  double& operator[](int k) { return c_[k]; }

  // Partial derivative d^(i+j) / du^i dv^j at the base point.
  double partial(int i, int j) const { return coef(i, j) * factorial(i) * factorial(j); }

  static double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
  }

  Tps operator-() const {
    Tps r;
    for (int k = 0; k < kSize; ++k) r.c_[k] = -c_[k];
    return r;
  }
  Tps& operator+=(const Tps& o) {
    for (int k = 0; k < kSize; ++k) c_[k] += o.c_[k];
    return *this;
  }
  Tps& operator-=(const Tps& o) {
    for (int k = 0; k < kSize; ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Tps& operator*=(double s) {
    for (auto& x : c_) x *= s;
    return *this;
  }
  Tps& operator/=(double s) { return *this *= (1.0 / s); }
  Tps& operator*=(const Tps& o) { return *this = *this * o; }
  Tps& operator/=(const Tps& o) { return *this = *this / o; }

  friend Tps operator+(Tps a, const Tps& b) { return a += b; }
  friend Tps operator-(Tps a, const Tps& b) { return a -= b; }
  friend Tps operator*(Tps a, double s) { return a *= s; }
  friend Tps operator*(double s, Tps a) { return a *= s; }
  friend Tps operator/(Tps a, double s) { return a /= s; }
  friend Tps operator+(Tps a, double s) {
    a.c_[0] += s;
    return a;
  }
  friend Tps operator+(double s, Tps a) {
    a.c_[0] += s;
    return a;
  }
  friend Tps operator-(Tps a, double s) {
    a.c_[0] -= s;
    return a;
  }
  friend Tps operator-(double s, const Tps& a) { return (-a) + s; }

  friend Tps operator*(const Tps& a, const Tps& b) {
    Tps r;
    for (int k1 = 0; k1 <= D; ++k1) {
      for (int j1 = 0; j1 <= k1; ++j1) {
        const double x = a.c_[k1 * (k1 + 1) / 2 + j1];
        if (x == 0.0) continue;
        for (int k2 = 0; k2 <= D - k1; ++k2) {
          const int k = k1 + k2;
          const int base = k * (k + 1) / 2 + j1;
          const int off2 = k2 * (k2 + 1) / 2;
          for (int j2 = 0; j2 <= k2; ++j2) r.c_[base + j2] += x * b.c_[off2 + j2];
        }
      }
    }
    return r;
  }
  friend Tps operator/(const Tps& a, const Tps& b) { return a * reciprocal(b); }
  friend Tps operator/(double s, const Tps& b) { return reciprocal(b) * s; }

  // f(x0 + h) = sum_k d[k] h^k with d[k] = f^(k)(x0) / k!, h nilpotent.
  static Tps compose(const Tps& x, const std::array<double, D + 1>& d) {
    Tps h = x;
    h.c_[0] = 0.0;
    Tps r(d[D]);
    for (int k = D - 1; k >= 0; --k) r = r * h + d[k];
    return r;
  }

  friend Tps reciprocal(const Tps& x) {
    const double a = x.value();
    std::array<double, D + 1> d{};
    double p = 1.0 / a;
    for (int k = 0; k <= D; ++k) {
      d[k] = (k % 2 == 0 ? 1.0 : -1.0) * p;
      p /= a;
    }
    return compose(x, d);
  }
  friend Tps exp(const Tps& x) {
    const double e = std::exp(x.value());
    std::array<double, D + 1> d{};
    for (int k = 0; k <= D; ++k) d[k] = e / factorial(k);
    return compose(x, d);
  }
  friend Tps log(const Tps& x) {
    const double a = x.value();
    std::array<double, D + 1> d{};
    d[0] = std::log(a);
    double p = 1.0 / a;
    for (int k = 1; k <= D; ++k) {
      d[k] = (k % 2 == 1 ? 1.0 : -1.0) * p / k;
      p /= a;
    }
    return compose(x, d);
  }
  friend Tps pow(const Tps& x, double e) {
    const double a = x.value();
    std::array<double, D + 1> d{};
    double coeff = 1.0;
    for (int k = 0; k <= D; ++k) {
      d[k] = coeff * std::pow(a, e - k);
      coeff *= (e - k) / (k + 1);
    }
    return compose(x, d);
  }
  friend Tps sqrt(const Tps& x) { return pow(x, 0.5); }
  friend Tps sin(const Tps& x) {
    const double s = std::sin(x.value()), c = std::cos(x.value());
    const double cyc[4] = {s, c, -s, -c};
    std::array<double, D + 1> d{};
    for (int k = 0; k <= D; ++k) d[k] = cyc[k % 4] / factorial(k);
    return compose(x, d);
  }
  friend Tps cos(const Tps& x) {
    const double s = std::sin(x.value()), c = std::cos(x.value());
    const double cyc[4] = {c, -s, -c, s};
    std::array<double, D + 1> d{};
    for (int k = 0; k <= D; ++k) d[k] = cyc[k % 4] / factorial(k);
    return compose(x, d);
  }
  friend Tps sinh(const Tps& x) {
    const double s = std::sinh(x.value()), c = std::cosh(x.value());
    std::array<double, D + 1> d{};
    for (int k = 0; k <= D; ++k) d[k] = (k % 2 == 0 ? s : c) / factorial(k);
    return compose(x, d);
  }
  friend Tps cosh(const Tps& x) {
    const double s = std::sinh(x.value()), c = std::cosh(x.value());
    std::array<double, D + 1> d{};
    for (int k = 0; k <= D; ++k) d[k] = (k % 2 == 0 ? c : s) / factorial(k);
    return compose(x, d);
  }

  // Exact derivative in s (which == 0) or t (which == 1), valid to degree D-1.
  Tps<(D > 0 ? D - 1 : 0)> derivative(int which) const {
    Tps<(D > 0 ? D - 1 : 0)> r;
    if constexpr (D > 0) {
      for (int k = 0; k <= D - 1; ++k) {
        for (int j = 0; j <= k; ++j) {
          const int i = k - j;
          r.coef(i, j) = which == 0 ? (i + 1) * coef(i + 1, j) : (j + 1) * coef(i, j + 1);
        }
      }
    }
    return r;
  }

  template <int E>
  Tps<E> truncate() const {
    static_assert(E <= D, "truncation can only lower the degree");
    Tps<E> r;
    for (int k = 0; k < Tps<E>::kSize; ++k) r[k] = c_[k];
    return r;
  }

 private:
  std::array<double, kSize> c_;
};

template <int D>
Tps<(D > 0 ? D - 1 : 0)> du(const Tps<D>& x) {
  return x.derivative(0);
}
template <int D>
Tps<(D > 0 ? D - 1 : 0)> dv(const Tps<D>& x) {
  return x.derivative(1);
}

// Scalar helpers so generic code can be written once for double and Tps.
inline double value_of(double x) { return x; }
template <int D>
double value_of(const Tps<D>& x) {
  return x.value();
}

template <int E, int D>
Tps<E> truncate_to(const Tps<D>& x) {
  return x.template truncate<E>();
}

template <int E, int D, int R, int C>
Eigen::Matrix<Tps<E>, R, C> truncate_to(const Eigen::Matrix<Tps<D>, R, C>& m) {
  Eigen::Matrix<Tps<E>, R, C> r;
  for (int i = 0; i < R; ++i)
    for (int j = 0; j < C; ++j) r(i, j) = m(i, j).template truncate<E>();
  return r;
}

template <int D, int R, int C>
Eigen::Matrix<Tps<(D > 0 ? D - 1 : 0)>, R, C> derivative(const Eigen::Matrix<Tps<D>, R, C>& m,
                                                          int which) {
  Eigen::Matrix<Tps<(D > 0 ? D - 1 : 0)>, R, C> r;
  for (int i = 0; i < R; ++i)
    for (int j = 0; j < C; ++j) r(i, j) = m(i, j).derivative(which);
  return r;
}

template <int D, int R, int C>
Eigen::Matrix<double, R, C> values_of(const Eigen::Matrix<Tps<D>, R, C>& m) {
  Eigen::Matrix<double, R, C> r;
  for (int i = 0; i < R; ++i)
    for (int j = 0; j < C; ++j) r(i, j) = m(i, j).value();
  return r;
}

}  // namespace lag

namespace Eigen {
template <int D>
struct NumTraits<lag::Tps<D>> : NumTraits<double> {
  using Real = lag::Tps<D>;
  using NonInteger = lag::Tps<D>;
  using Nested = lag::Tps<D>;
  using Literal = lag::Tps<D>;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = lag::Tps<D>::kSize,
    AddCost = lag::Tps<D>::kSize,
    MulCost = lag::Tps<D>::kSize * lag::Tps<D>::kSize / 2,
  };
};

template <int D, typename BinaryOp>
struct ScalarBinaryOpTraits<lag::Tps<D>, double, BinaryOp> {
  using ReturnType = lag::Tps<D>;
};
template <int D, typename BinaryOp>
struct ScalarBinaryOpTraits<double, lag::Tps<D>, BinaryOp> {
  using ReturnType = lag::Tps<D>;
};
}  // namespace Eigen
