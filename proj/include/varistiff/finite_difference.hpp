#pragma once

#include <span>
#include <vector>

#include "varistiff/common.hpp"

namespace varistiff {

/// Second-order accurate derivative of a uniformly sampled field.
///
/// Interior samples use central stencils; the samples too close to an end for
/// the central stencil use one-sided second-order stencils. Requires at least
/// order + 2 samples. Works for scalars and fixed-size Eigen vectors.
template <class V>
std::vector<V> finite_difference(std::span<const V> f, double h, int order) {
  if (order < 1 || order > 3) throw ConfigError("derivative order must be 1, 2 or 3");
  const std::size_t n = f.size();
  if (n < static_cast<std::size_t>(order) + 2) {
    throw ConfigError("derivative of order " + std::to_string(order) + " needs at least " +
                      std::to_string(order + 2) + " samples, got " + std::to_string(n));
  }
  std::vector<V> d(n);
  switch (order) {
    case 1: {
      const double k = 1.0 / (2.0 * h);
      for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) * k;
      d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * k;
      d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * k;
      break;
    }
    case 2: {
      const double k = 1.0 / (h * h);
      for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) * k;
      d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) * k;
      d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) * k;
      break;
    }
    case 3: {
      const double k = 1.0 / (2.0 * h * h * h);
      for (std::size_t i = 2; i + 2 < n; ++i) d[i] = (f[i + 2] - 2.0 * f[i + 1] + 2.0 * f[i - 1] - f[i - 2]) * k;
      d[0] = (-5.0 * f[0] + 18.0 * f[1] - 24.0 * f[2] + 14.0 * f[3] - 3.0 * f[4]) * k;
      d[1] = (-3.0 * f[0] + 10.0 * f[1] - 12.0 * f[2] + 6.0 * f[3] - f[4]) * k;
      d[n - 2] = (3.0 * f[n - 1] - 10.0 * f[n - 2] + 12.0 * f[n - 3] - 6.0 * f[n - 4] + f[n - 5]) * k;
      d[n - 1] = (5.0 * f[n - 1] - 18.0 * f[n - 2] + 24.0 * f[n - 3] - 14.0 * f[n - 4] + 3.0 * f[n - 5]) * k;
      break;
    }
  }
  return d;
}

template <class V>
std::vector<V> finite_difference(const std::vector<V>& f, double h, int order) {
  return finite_difference(std::span<const V>(f), h, order);
}

/// Composite trapezoid rule on a uniform grid.
template <class V>
V trapezoid(std::span<const V> f, double h) {
  if (f.empty()) return V{};
  V acc = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) acc = acc + f[i];
  return acc * h;
}

inline double trapezoid(const std::vector<double>& f, double h) { return trapezoid(std::span<const double>(f), h); }

}  // namespace varistiff
