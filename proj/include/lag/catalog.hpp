#pragma once

#include <cmath>
#include <map>
#include <string>

#include "lag/quadric.hpp"
#include "lag/tps.hpp"

namespace lag {

// Analytic surfaces, written once for double and Tps scalars.

struct TorusSurface {
  double R = 2.0, rho = 0.5;
  template <class S>
  V3<S> operator()(const S& u, const S& v) const {
    using std::cos;
    using std::sin;
    const S w = R + rho * cos(u);
    return V3<S>(w * cos(v), w * sin(v), rho * sin(u));
  }
};

struct CatenoidSurface {
  double scale = 1.0;
  template <class S>
  V3<S> operator()(const S& u, const S& v) const {
    using std::cos;
    using std::cosh;
    using std::sin;
    const S r = scale * cosh(u);
    return V3<S>(r * cos(v), r * sin(v), scale * u);
  }
};

struct SphereSurface {
  double radius = 1.0;
  template <class S>
  V3<S> operator()(const S& u, const S& v) const {
    using std::cos;
    using std::sin;
    const S cu = cos(u);
    return V3<S>(radius * cu * cos(v), radius * cu * sin(v), radius * sin(u));
  }
};

struct PlaneSurface {
  template <class S>
  V3<S> operator()(const S& u, const S& v) const {
    return V3<S>(u, v, S(0.0) * u);
  }
};

struct CylinderSurface {
  double radius = 1.0;
  template <class S>
  V3<S> operator()(const S& u, const S& v) const {
    using std::cos;
    using std::sin;
    return V3<S>(radius * cos(u), radius * sin(u), S(1.0) * v);
  }
};

struct EnneperSurface {
  template <class S>
  V3<S> operator()(const S& u, const S& v) const {
    return V3<S>(u - u * u * u / 3.0 + u * v * v, -v + v * v * v / 3.0 - u * u * v, u * u - v * v);
  }
};

// Height graph with no symmetry; generic test surface.
struct GraphSurface {
  double a = 0.6, b = 0.2, c = 0.3, d = 0.1;
  template <class S>
  V3<S> operator()(const S& u, const S& v) const {
    using std::sin;
    return V3<S>(S(1.0) * u, S(1.0) * v, a * u * u + b * v * v + c * u * v * v + d * sin(u + 2.0 * v));
  }
};

// Torus with a small non-symmetric bump along the normal direction.
struct PerturbedTorusSurface {
  double R = 2.0, rho = 0.5, eps = 0.02;
  template <class S>
  V3<S> operator()(const S& u, const S& v) const {
    using std::cos;
    using std::sin;
    const S bump = eps * sin(2.0 * u + 3.0 * v) * cos(u - v);
    const S r = rho + bump;
    const S w = R + r * cos(u);
    return V3<S>(w * cos(v), w * sin(v), r * sin(u));
  }
};

// Blaschke potentials u(x, y).

struct LnCoshPotential {
  template <class S>
  S operator()(const S& x, const S& y) const {
    using std::cosh;
    using std::log;
    return log(cosh(x)) + 0.0 * y;
  }
};

struct ZeroPotential {
  template <class S>
  S operator()(const S& x, const S& y) const {
    return 0.0 * x + 0.0 * y;
  }
};

struct LinearPotential {
  double a = 1.0, b = 0.0, c = 0.0;
  template <class S>
  S operator()(const S& x, const S& y) const {
    return a * x + b * y + c;
  }
};

struct ProductPotential {  // u = x y
  template <class S>
  S operator()(const S& x, const S& y) const {
    return x * y;
  }
};

struct QuadProductPotential {  // u = x^2 y
  template <class S>
  S operator()(const S& x, const S& y) const {
    return x * x * y;
  }
};

using Params = std::map<std::string, double>;

inline double param(const Params& p, const std::string& key, double fallback) {
  const auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

}  // namespace lag
