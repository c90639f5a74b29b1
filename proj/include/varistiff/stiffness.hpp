#pragma once

#include <functional>
#include <string>
#include <vector>

#include "varistiff/common.hpp"

namespace varistiff {

/// Value of a scalar function of arc-length together with its first two
/// derivatives.
struct Jet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

inline Jet operator+(const Jet& f, const Jet& g) { return {f.value + g.value, f.d1 + g.d1, f.d2 + g.d2}; }
inline Jet operator*(double k, const Jet& f) { return {k * f.value, k * f.d1, k * f.d2}; }
inline Jet operator*(const Jet& f, const Jet& g) {
  return {f.value * g.value, f.d1 * g.value + f.value * g.d1,
          f.d2 * g.value + 2.0 * f.d1 * g.d1 + f.value * g.d2};
}

/// Any smooth scalar coefficient of an ODE, evaluated together with its
/// derivatives.
using ScalarField = std::function<Jet(double)>;

enum class ProfileKind { Constant, Sinusoidal, GaussianBump, Sum };

/// Bending stiffness along the arc-length.
///
///   Constant     rho(s) = c
///   Sinusoidal   rho(s) = A sin(f s + xi) + c        (f = 1 unless set)
///   GaussianBump rho(s) = c + A exp(-(s - xi)^2 / (2 sigma^2))
///   Sum          rho(s) = sum of the children
///
/// Profiles are immutable values; construct them through the factories.
class StiffnessProfile {
 public:
  static StiffnessProfile constant(double c);
  static StiffnessProfile sinusoidal(double amplitude, double offset, double shift, double frequency = 1.0);
  static StiffnessProfile gaussian_bump(double amplitude, double offset, double width, double shift);
  static StiffnessProfile sum(std::vector<StiffnessProfile> children);

  ProfileKind kind() const noexcept { return kind_; }
  double amplitude() const noexcept { return amplitude_; }
  double offset() const noexcept { return offset_; }
  double width() const noexcept { return width_; }
  double shift() const noexcept { return shift_; }
  double frequency() const noexcept { return frequency_; }
  const std::vector<StiffnessProfile>& children() const noexcept { return children_; }

  /// Value and analytic derivatives, without the positivity check.
  Jet jet(double s) const;

  /// The profile s -> rho(s + delta).
  StiffnessProfile shifted(double delta) const;

  /// Same sinusoid with a different frequency; only valid for Sinusoidal.
  StiffnessProfile with_frequency(double frequency) const;

  std::string describe() const;

 private:
  StiffnessProfile() = default;

  ProfileKind kind_ = ProfileKind::Constant;
  double amplitude_ = 0.0;
  double offset_ = 1.0;
  double width_ = 1.0;
  double shift_ = 0.0;
  double frequency_ = 1.0;
  std::vector<StiffnessProfile> children_;
};

/// rho, rho', rho'' at s. Throws DomainError if rho(s) <= 0.
Jet eval_stiffness(const StiffnessProfile& profile, double s);

/// rho_new(s) = rho_old(s + delta).
StiffnessProfile shift_profile(const StiffnessProfile& profile, double delta);

/// Samples the profile on s0 + i h, i < count, and throws DomainError at the
/// first sample where rho is not positive.
void check_positive(const StiffnessProfile& profile, double s0, double h, std::size_t count);

/// Smallest sampled value of rho on the grid.
double min_on_grid(const StiffnessProfile& profile, double s0, double h, std::size_t count);

/// Wraps a profile as a checked scalar field.
ScalarField as_field(const StiffnessProfile& profile);

ScalarField constant_field(double value);

}  // namespace varistiff
