#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace varistiff {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (configuration, profile, grid sizes).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A quantity left its mathematical domain, e.g. a stiffness that is not positive.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Integration blew up or drifted beyond the admissible bound.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double arc_length)
      : Error(what + " (at s = " + std::to_string(arc_length) + ")"), s_(arc_length) {}
  double arc_length() const noexcept { return s_; }

 private:
  double s_;
};

/// Execution policy for per-sample kernels.
///
/// `Serial` is the reference path; `Parallel` distributes independent
/// per-sample work with OpenMP. Both produce bit-identical results because
/// every reduction is performed serially over the per-sample outputs.
enum class Exec { Serial, Parallel };

inline constexpr Exec kDefaultExec = Exec::Parallel;

/// Runs `body(i)` for i in [0, n). Iterations must be independent.
template <class Body>
void for_each_index(Exec exec, std::size_t n, Body&& body) {
#if defined(VARISTIFF_HAVE_OPENMP)
  if (exec == Exec::Parallel && n > 1) {
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
    return;
  }
#endif
  (void)exec;
  for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace varistiff
