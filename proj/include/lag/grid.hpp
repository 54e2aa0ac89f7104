#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "lag/error.hpp"

namespace lag {

// Rectangular tensor grid; index i runs along the first coordinate (u or x),
// index j along the second.
struct Grid2 {
  int n1 = 0, n2 = 0;
  double a0 = 0.0, a1 = 1.0;  // first coordinate range
  double b0 = 0.0, b1 = 1.0;  // second coordinate range

  Grid2() = default;
  Grid2(int n1_, int n2_, double a0_, double a1_, double b0_, double b1_)
      : n1(n1_), n2(n2_), a0(a0_), a1(a1_), b0(b0_), b1(b1_) {}

  double h1() const { return (a1 - a0) / (n1 - 1); }
  double h2() const { return (b1 - b0) / (n2 - 1); }
  double x1(int i) const { return a0 + i * h1(); }
  double x2(int j) const { return b0 + j * h2(); }
  std::size_t size() const { return static_cast<std::size_t>(n1) * n2; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * n1 + i; }
};

template <class T>
class Field2 {
 public:
  Field2() = default;
  Field2(int n1, int n2, const T& init = T()) : n1_(n1), n2_(n2), data_(static_cast<std::size_t>(n1) * n2, init) {}
  explicit Field2(const Grid2& g, const T& init = T()) : Field2(g.n1, g.n2, init) {}

  int n1() const { return n1_; }
  int n2() const { return n2_; }
  std::size_t size() const { return data_.size(); }
  T& operator()(int i, int j) { return data_[static_cast<std::size_t>(j) * n1_ + i]; }
  const T& operator()(int i, int j) const { return data_[static_cast<std::size_t>(j) * n1_ + i]; }
  T& operator[](std::size_t k) { return data_[k]; }
  const T& operator[](std::size_t k) const { return data_[k]; }
  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

 private:
  int n1_ = 0, n2_ = 0;
  std::vector<T> data_;
};

// Finite-difference weights (Fornberg) for the derivative of order `order`
// at z from the given sample abscissae.
std::vector<double> fd_weights(double z, const std::vector<double>& x, int order);

// Stencil (offsets, weights) for the derivative of order `order` at node i of
// an n-point uniform line with spacing h, accuracy 4: centred in the interior,
// shifted one-sided windows near the ends.
struct Stencil {
  std::vector<int> nodes;
  std::vector<double> weights;
};
Stencil line_stencil(int n, int i, int order, double h, int accuracy = 4);

// Derivative of a grid field along axis 0 or 1. T must support T*double and +.
template <class T>
Field2<T> differentiate(const Field2<T>& f, int axis, double h, int order = 1, int accuracy = 4) {
  const int n = axis == 0 ? f.n1() : f.n2();
  if (n < order + accuracy) throw Error(ErrorCode::GridTooSmall, "too few nodes for the stencil");
  std::vector<Stencil> st(n);
  for (int k = 0; k < n; ++k) st[k] = line_stencil(n, k, order, h, accuracy);
  Field2<T> out(f.n1(), f.n2());
  for (int j = 0; j < f.n2(); ++j) {
    for (int i = 0; i < f.n1(); ++i) {
      const int k = axis == 0 ? i : j;
      const Stencil& s = st[k];
      T acc = f(axis == 0 ? s.nodes[0] : i, axis == 0 ? j : s.nodes[0]) * s.weights[0];
      for (std::size_t m = 1; m < s.nodes.size(); ++m) {
        acc = acc + f(axis == 0 ? s.nodes[m] : i, axis == 0 ? j : s.nodes[m]) * s.weights[m];
      }
      out(i, j) = acc;
    }
  }
  return out;
}

// Running integral of samples f[0..n-1] on a uniform line, 4th-order accurate
// (cubic interpolation per interval); result[0] = 0.
std::vector<double> cumulative_integral(const std::vector<double>& f, double h);

// Tensor-product Gauss-Legendre nodes and weights on [a, b].
void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w);

// Least-squares slope of log(err) against log(h).
double observed_order(const std::vector<double>& h, const std::vector<double>& err);

}  // namespace lag
