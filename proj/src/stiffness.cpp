#include "varistiff/stiffness.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace varistiff {

namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw ConfigError(std::string("stiffness parameter '") + name + "' must be finite");
}

}  // namespace

StiffnessProfile StiffnessProfile::constant(double c) {
  require_finite(c, "c");
  StiffnessProfile p;
  p.kind_ = ProfileKind::Constant;
  p.offset_ = c;
  return p;
}

StiffnessProfile StiffnessProfile::sinusoidal(double amplitude, double offset, double shift, double frequency) {
  require_finite(amplitude, "A");
  require_finite(offset, "c");
  require_finite(shift, "xi");
  require_finite(frequency, "frequency");
  StiffnessProfile p;
  p.kind_ = ProfileKind::Sinusoidal;
  p.amplitude_ = amplitude;
  p.offset_ = offset;
  p.shift_ = shift;
  p.frequency_ = frequency;
  return p;
}

StiffnessProfile StiffnessProfile::gaussian_bump(double amplitude, double offset, double width, double shift) {
  require_finite(amplitude, "A");
  require_finite(offset, "c");
  require_finite(width, "sigma");
  require_finite(shift, "xi");
  if (!(width > 0.0)) throw ConfigError("stiffness parameter 'sigma' must be positive");
  StiffnessProfile p;
  p.kind_ = ProfileKind::GaussianBump;
  p.amplitude_ = amplitude;
  p.offset_ = offset;
  p.width_ = width;
  p.shift_ = shift;
  return p;
}

StiffnessProfile StiffnessProfile::sum(std::vector<StiffnessProfile> children) {
  if (children.empty()) throw ConfigError("sum profile needs at least one child");
  StiffnessProfile p;
  p.kind_ = ProfileKind::Sum;
  p.offset_ = 0.0;
  p.children_ = std::move(children);
  return p;
}

Jet StiffnessProfile::jet(double s) const {
  switch (kind_) {
    case ProfileKind::Constant:
      return {offset_, 0.0, 0.0};
    case ProfileKind::Sinusoidal: {
      const double phase = frequency_ * s + shift_;
      const double sn = std::sin(phase);
      const double cs = std::cos(phase);
      return {amplitude_ * sn + offset_, amplitude_ * frequency_ * cs,
              -amplitude_ * frequency_ * frequency_ * sn};
    }
    case ProfileKind::GaussianBump: {
      const double u = s - shift_;
      const double inv_var = 1.0 / (width_ * width_);
      const double bump = amplitude_ * std::exp(-0.5 * u * u * inv_var);
      return {offset_ + bump, -u * inv_var * bump, (u * u * inv_var - 1.0) * inv_var * bump};
    }
    case ProfileKind::Sum: {
      Jet total;
      for (const auto& child : children_) total = total + child.jet(s);
      return total;
    }
  }
  return {};
}

StiffnessProfile StiffnessProfile::shifted(double delta) const {
  StiffnessProfile p = *this;
  switch (kind_) {
    case ProfileKind::Constant:
      break;
    case ProfileKind::Sinusoidal:
      p.shift_ = shift_ + frequency_ * delta;
      break;
    case ProfileKind::GaussianBump:
      p.shift_ = shift_ - delta;
      break;
    case ProfileKind::Sum:
      for (auto& child : p.children_) child = child.shifted(delta);
      break;
  }
  return p;
}

StiffnessProfile StiffnessProfile::with_frequency(double frequency) const {
  if (kind_ != ProfileKind::Sinusoidal) throw ConfigError("only sinusoidal profiles carry a frequency");
  return sinusoidal(amplitude_, offset_, shift_, frequency);
}

std::string StiffnessProfile::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case ProfileKind::Constant:
      os << "constant(c=" << offset_ << ")";
      break;
    case ProfileKind::Sinusoidal:
      os << "sinusoidal(A=" << amplitude_ << ", c=" << offset_ << ", xi=" << shift_;
      if (frequency_ != 1.0) os << ", frequency=" << frequency_;
      os << ")";
      break;
    case ProfileKind::GaussianBump:
      os << "gaussian_bump(A=" << amplitude_ << ", c=" << offset_ << ", sigma=" << width_ << ", xi=" << shift_
         << ")";
      break;
    case ProfileKind::Sum:
      os << "sum(";
      for (std::size_t i = 0; i < children_.size(); ++i) os << (i ? ", " : "") << children_[i].describe();
      os << ")";
      break;
  }
  return os.str();
}

Jet eval_stiffness(const StiffnessProfile& profile, double s) {
  const Jet j = profile.jet(s);
  if (!(j.value > 0.0)) {
    std::ostringstream os;
    os << "bending stiffness must be positive, got rho(" << s << ") = " << j.value << " for " << profile.describe();
    throw DomainError(os.str());
  }
  return j;
}

StiffnessProfile shift_profile(const StiffnessProfile& profile, double delta) { return profile.shifted(delta); }

double min_on_grid(const StiffnessProfile& profile, double s0, double h, std::size_t count) {
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) lo = std::min(lo, profile.jet(s0 + static_cast<double>(i) * h).value);
  return lo;
}

void check_positive(const StiffnessProfile& profile, double s0, double h, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) eval_stiffness(profile, s0 + static_cast<double>(i) * h);
}

ScalarField as_field(const StiffnessProfile& profile) {
  return [profile](double s) { return eval_stiffness(profile, s); };
}

ScalarField constant_field(double value) {
  return [value](double) { return Jet{value, 0.0, 0.0}; };
}

}  // namespace varistiff
