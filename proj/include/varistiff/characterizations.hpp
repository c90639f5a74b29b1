#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "varistiff/common.hpp"
#include "varistiff/curve.hpp"
#include "varistiff/stiffness.hpp"

namespace varistiff {

/// Norm statistics of a pointwise residual.
///
/// `rms` is taken over interior samples only (indices 2 .. n-3, where every
/// finite-difference stencil is central); `max` covers every sample.
struct ResidualReport {
  std::string name;
  double rms = 0.0;
  double max = 0.0;
  std::vector<double> per_sample;
};

ResidualReport make_report(std::string name, std::vector<double> per_sample);

/// Lagrange data of an elastic curve.
struct Multipliers {
  std::vector<double> lambda;
  double mu = 0.0;
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  double c = 0.0;
};

/// Tolerance for second-order finite-difference residuals: max(atol, C h^2).
double fd_tolerance(double h, double atol = 1e-8, double factor = 10.0);

/// L2 gradient of the bending energy for interior variations:
///   rho T''' + 3 rho <T'', T'> T + 3/2 rho |T'|^2 T' + rho'' T'
///   + rho' (2 T'' + 3/2 |T'|^2 T).
/// Needs at least 7 samples.
std::vector<Vec3> gB_field(const CurveSamples& curve, const StiffnessProfile& profile, Exec exec = kDefaultExec);

/// Residual of rho T'' + rho' T' - rho <T'', T> T - (a - <a, T> T).
///
/// `a` is in the pendulum-form convention, the same one recover_lambda and
/// energy_via_multipliers use.
ResidualReport elastic_residual(const CurveSamples& curve, const StiffnessProfile& profile, const Vec3& a,
                                Exec exec = kDefaultExec);

/// Lambda = 1/2 rho |T'|^2 - <a, T> (pendulum-form convention for a).
std::vector<double> recover_lambda(const CurveSamples& curve, const StiffnessProfile& profile, const Vec3& a,
                                   Exec exec = kDefaultExec);

struct MuEstimate {
  double mu = 0.0;
  /// max_i |mu_i - mu| over all samples.
  double spread = 0.0;
};

/// mu_i = <a x gamma_i + b, T_i>, averaged.
MuEstimate recover_mu(const CurveSamples& curve, const Vec3& a, const Vec3& b);

/// Residuals of the four equivalent characterizations of holonomy constrained
/// elastic curves, in the order
///   (2) rho T'' + 3/2 rho |T'|^2 T + rho' T' - Lambda T - mu T x T' + a
///   (3) rho T'' - rho <T'', T> T + rho' T' + a - <a, T> T - mu T x T'
///   (4) rho (gamma' x gamma'') + mu T - a x gamma - b
///   (5) rho gamma'' - (a x gamma + b) x gamma'
/// with Lambda = 1/2 rho |T'|^2 + <a, T>, the value that makes (2) tangentially
/// consistent. Here `a` is the constant of the integrated form (5); it is the
/// negative of the pendulum-form constant.
/// Pointwise residual vectors of the four conditions above.
std::vector<std::vector<Vec3>> holonomy_elastic_fields(const CurveSamples& curve, const StiffnessProfile& profile,
                                                       const Vec3& a, const Vec3& b, double mu,
                                                       Exec exec = kDefaultExec);

std::vector<ResidualReport> holonomy_elastic_residuals(const CurveSamples& curve, const StiffnessProfile& profile,
                                                       const Vec3& a, const Vec3& b, double mu,
                                                       Exec exec = kDefaultExec);

enum class CurvatureMode { Free, Elastic, Holonomy };

/// Curvature-function form of the Euler-Lagrange equations.
///
///   free:     (rho k)'' + 1/2 rho |k|^2 k             and 1/2 rho' |k|^2
///   elastic:  (rho k)'' + 1/2 rho |k|^2 k - Lambda k  and Lambda' + 1/2 rho' |k|^2
///   holonomy: elastic vector part - mu J k'
///
/// Lambda comes from recover_lambda with the pendulum-form `a`; `mu` is the
/// constant returned by recover_mu (integrated-form convention). Returns the
/// vector-equation report first and the scalar-equation report second.
std::pair<ResidualReport, ResidualReport> curvature_form_residual(const CurveSamples& curve,
                                                                  const StiffnessProfile& profile,
                                                                  const FrameField& frame, CurvatureMode mode,
                                                                  const Vec3& a = Vec3::Zero(), double mu = 0.0,
                                                                  Exec exec = kDefaultExec);

struct HafnerFit {
  Vec2 a = Vec2::Zero();
  double c = 0.0;
  ResidualReport residual;
  bool rank_deficient = false;
};

/// Planar identity rho kappa = -<J a, gamma> + c. Missing constants are fitted
/// by minimum-norm linear least squares over all samples.
HafnerFit hafner_line_check(const CurveSamples& curve, const StiffnessProfile& profile,
                            std::optional<Vec2> a = std::nullopt, std::optional<double> c = std::nullopt);

/// Signed distance of a point to the inflection line <J a, x> = c.
double distance_to_inflection_line(const HafnerFit& fit, const Vec3& point);

struct NecessaryCondition {
  std::vector<double> values;
  bool holds = true;
};

/// rho <gamma' x gamma'', -mu gamma' + a x gamma + b>. On a holonomy constrained
/// elastic curve this equals |-mu T + a x gamma + b|^2, so it must be positive
/// wherever the curvature does not vanish (|kappa| > 1e-8).
NecessaryCondition necessary_condition_check(const CurveSamples& curve, const StiffnessProfile& profile, double mu,
                                             const Vec3& a, const Vec3& b);

/// integral Lambda + <a, gamma(end) - gamma(start)> (pendulum-form a).
double energy_via_multipliers(const CurveSamples& curve, std::span<const double> lambda, const Vec3& a);

}  // namespace varistiff
