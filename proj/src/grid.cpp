#include "lag/grid.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace lag {

std::vector<double> fd_weights(double z, const std::vector<double>& x, int order) {
  // Fornberg's recursion, keeping only the requested derivative order.
  const int n = static_cast<int>(x.size());
  std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
  double c1 = 1.0, c4 = x[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
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
  for (int i = 0; i < n; ++i) w[i] = c[i][order];
  return w;
}

Stencil line_stencil(int n, int i, int order, double h, int accuracy) {
  const int r = (order + accuracy - 1) / 2;
  int lo, width;
  if (i - r >= 0 && i + r <= n - 1) {
    lo = i - r;
    width = 2 * r + 1;
  } else {
    width = order + accuracy;
    lo = i - r < 0 ? 0 : n - width;
  }
  Stencil s;
  std::vector<double> x(width);
  for (int k = 0; k < width; ++k) {
    s.nodes.push_back(lo + k);
    x[k] = lo + k - i;
  }
  s.weights = fd_weights(0.0, x, order);
  const double scale = std::pow(h, -order);
  for (double& w : s.weights) w *= scale;
  return s;
}

std::vector<double> cumulative_integral(const std::vector<double>& f, double h) {
  const int n = static_cast<int>(f.size());
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  if (n < 4) {
    for (int i = 1; i < n; ++i) out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
    return out;
  }
  for (int i = 0; i + 1 < n; ++i) {
    double seg;
    if (i == 0) {
      seg = (9 * f[0] + 19 * f[1] - 5 * f[2] + f[3]) / 24.0;
    } else if (i == n - 2) {
      seg = (f[n - 4] - 5 * f[n - 3] + 19 * f[n - 2] + 9 * f[n - 1]) / 24.0;
    } else {
      seg = (-f[i - 1] + 13 * f[i] + 13 * f[i + 1] - f[i + 2]) / 24.0;
    }
    out[i + 1] = out[i] + h * seg;
  }
  return out;
}

void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w) {
  // Golub-Welsch: eigen-decomposition of the Jacobi matrix.
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double beta = k / std::sqrt(4.0 * k * k - 1.0);
    j(k, k - 1) = j(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  x.resize(n);
  w.resize(n);
  for (int k = 0; k < n; ++k) {
    const double t = es.eigenvalues()(k);
    const double v0 = es.eigenvectors()(0, k);
    x[k] = 0.5 * (a + b) + 0.5 * (b - a) * t;
    w[k] = (b - a) * v0 * v0;
  }
}

double observed_order(const std::vector<double>& h, const std::vector<double>& err) {
  const int n = static_cast<int>(h.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = 0; k < n; ++k) {
    const double lx = std::log(h[k]), ly = std::log(err[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace lag
