#include "varistiff/characterizations.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "varistiff/finite_difference.hpp"

namespace varistiff {

namespace {

constexpr double kFlatCurvature = 1e-8;

std::vector<Jet> stiffness_on_grid(const CurveSamples& curve, const StiffnessProfile& profile) {
  std::vector<Jet> rho(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) rho[i] = eval_stiffness(profile, curve.arc_length(i));
  return rho;
}

Vec2 rotate_quarter(const Vec2& v) { return {-v.y(), v.x()}; }

void require_space_curve(const CurveSamples& curve, const char* what) {
  if (curve.dim != 3) throw ConfigError(std::string(what) + " needs a space curve (dim 3)");
}

}  // namespace

ResidualReport make_report(std::string name, std::vector<double> per_sample) {
  ResidualReport r;
  r.name = std::move(name);
  const std::size_t n = per_sample.size();
  for (double v : per_sample) r.max = std::max(r.max, std::abs(v));
  std::size_t lo = 0;
  std::size_t hi = n;
  if (n >= 5) {
    lo = 2;
    hi = n - 2;
  }
  double acc = 0.0;
  for (std::size_t i = lo; i < hi; ++i) acc += per_sample[i] * per_sample[i];
  r.rms = hi > lo ? std::sqrt(acc / static_cast<double>(hi - lo)) : 0.0;
  r.per_sample = std::move(per_sample);
  return r;
}

double fd_tolerance(double h, double atol, double factor) { return std::max(atol, factor * h * h); }

std::vector<Vec3> gB_field(const CurveSamples& curve, const StiffnessProfile& profile, Exec exec) {
  if (curve.size() < 7) throw ConfigError("gB_field needs at least 7 samples, got " + std::to_string(curve.size()));
  const TangentJets j = tangent_jets(curve, 3);
  const std::vector<Jet> rho = stiffness_on_grid(curve, profile);
  std::vector<Vec3> g(curve.size());
  for_each_index(exec, curve.size(), [&](std::size_t i) {
    const Vec3& t = j.T[i];
    const Vec3& t1 = j.d1[i];
    const Vec3& t2 = j.d2[i];
    const double k2 = t1.squaredNorm();
    g[i] = rho[i].value * (j.d3[i] + 3.0 * t2.dot(t1) * t + 1.5 * k2 * t1) + rho[i].d2 * t1 +
           rho[i].d1 * (2.0 * t2 + 1.5 * k2 * t);
  });
  return g;
}

ResidualReport elastic_residual(const CurveSamples& curve, const StiffnessProfile& profile, const Vec3& a,
                                Exec exec) {
  const TangentJets j = tangent_jets(curve, 2);
  const std::vector<Jet> rho = stiffness_on_grid(curve, profile);
  std::vector<double> r(curve.size());
  for_each_index(exec, curve.size(), [&](std::size_t i) {
    const Vec3& t = j.T[i];
    const Vec3 lhs = rho[i].value * (j.d2[i] - j.d2[i].dot(t) * t) + rho[i].d1 * j.d1[i];
    r[i] = (lhs - (a - a.dot(t) * t)).norm();
  });
  return make_report("elastic", std::move(r));
}

std::vector<double> recover_lambda(const CurveSamples& curve, const StiffnessProfile& profile, const Vec3& a,
                                   Exec exec) {
  const TangentJets j = tangent_jets(curve, 1);
  const std::vector<Jet> rho = stiffness_on_grid(curve, profile);
  std::vector<double> lambda(curve.size());
  for_each_index(exec, curve.size(), [&](std::size_t i) {
    lambda[i] = 0.5 * rho[i].value * j.d1[i].squaredNorm() - a.dot(j.T[i]);
  });
  return lambda;
}

MuEstimate recover_mu(const CurveSamples& curve, const Vec3& a, const Vec3& b) {
  require_space_curve(curve, "recover_mu");
  const TangentJets j = tangent_jets(curve, 0);
  std::vector<double> mu(curve.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    mu[i] = (a.cross(curve.positions[i]) + b).dot(j.T[i]);
    sum += mu[i];
  }
  MuEstimate est;
  est.mu = sum / static_cast<double>(curve.size());
  for (double m : mu) est.spread = std::max(est.spread, std::abs(m - est.mu));
  return est;
}

std::vector<std::vector<Vec3>> holonomy_elastic_fields(const CurveSamples& curve, const StiffnessProfile& profile,
                                                       const Vec3& a, const Vec3& b, double mu, Exec exec) {
  require_space_curve(curve, "holonomy_elastic_residuals");
  const TangentJets j = tangent_jets(curve, 2);
  const std::vector<Jet> rho = stiffness_on_grid(curve, profile);
  const std::size_t n = curve.size();
  std::vector<std::vector<Vec3>> f(4, std::vector<Vec3>(n));
  for_each_index(exec, n, [&](std::size_t i) {
    const Vec3& t = j.T[i];
    const Vec3& t1 = j.d1[i];
    const Vec3& t2 = j.d2[i];
    const double r = rho[i].value;
    const double dr = rho[i].d1;
    const Vec3 field = a.cross(curve.positions[i]) + b;
    const double lambda = 0.5 * r * t1.squaredNorm() + a.dot(t);
    f[0][i] = r * t2 + 1.5 * r * t1.squaredNorm() * t + dr * t1 - lambda * t - mu * t.cross(t1) + a;
    f[1][i] = r * t2 - r * t2.dot(t) * t + dr * t1 + a - a.dot(t) * t - mu * t.cross(t1);
    f[2][i] = r * t.cross(t1) + mu * t - field;
    f[3][i] = r * t1 - field.cross(t);
  });
  return f;
}

std::vector<ResidualReport> holonomy_elastic_residuals(const CurveSamples& curve, const StiffnessProfile& profile,
                                                       const Vec3& a, const Vec3& b, double mu, Exec exec) {
  const auto fields = holonomy_elastic_fields(curve, profile, a, b, mu, exec);
  static const char* const names[] = {"condition2", "condition3", "condition4", "condition5"};
  std::vector<ResidualReport> out;
  for (std::size_t k = 0; k < fields.size(); ++k) {
    std::vector<double> norms(fields[k].size());
    for (std::size_t i = 0; i < norms.size(); ++i) norms[i] = fields[k][i].norm();
    out.push_back(make_report(names[k], std::move(norms)));
  }
  return out;
}

std::pair<ResidualReport, ResidualReport> curvature_form_residual(const CurveSamples& curve,
                                                                  const StiffnessProfile& profile,
                                                                  const FrameField& frame, CurvatureMode mode,
                                                                  const Vec3& a, double mu, Exec exec) {
  const std::size_t n = curve.size();
  if (frame.size() != n || frame.kappa.size() != n) {
    throw ConfigError("frame has " + std::to_string(frame.size()) + " samples, curve has " + std::to_string(n));
  }
  if (mode == CurvatureMode::Holonomy && curve.dim != 3) {
    throw ConfigError("holonomy curvature form needs a space curve (dim 3)");
  }
  const std::vector<Jet> rho = stiffness_on_grid(curve, profile);
  std::vector<Vec2> rk(n);
  std::vector<double> half_k2_drho(n);
  for (std::size_t i = 0; i < n; ++i) {
    rk[i] = rho[i].value * frame.kappa[i];
    half_k2_drho[i] = 0.5 * rho[i].d1 * frame.kappa[i].squaredNorm();
  }
  const std::vector<Vec2> rk2 = finite_difference(rk, curve.h, 2);
  std::vector<Vec2> dk;
  if (mode == CurvatureMode::Holonomy) dk = finite_difference(frame.kappa, curve.h, 1);

  std::vector<double> lambda;
  std::vector<double> dlambda;
  if (mode != CurvatureMode::Free) {
    lambda = recover_lambda(curve, profile, a, exec);
    dlambda = finite_difference(lambda, curve.h, 1);
  }

  std::vector<double> vec(n);
  std::vector<double> scal(n);
  for_each_index(exec, n, [&](std::size_t i) {
    const Vec2& k = frame.kappa[i];
    Vec2 r = rk2[i] + 0.5 * rho[i].value * k.squaredNorm() * k;
    double s = half_k2_drho[i];
    if (mode != CurvatureMode::Free) {
      r -= lambda[i] * k;
      s += dlambda[i];
    }
    if (mode == CurvatureMode::Holonomy) r -= mu * rotate_quarter(dk[i]);
    vec[i] = r.norm();
    scal[i] = std::abs(s);
  });
  return {make_report("curvature_vector", std::move(vec)), make_report("curvature_scalar", std::move(scal))};
}

HafnerFit hafner_line_check(const CurveSamples& curve, const StiffnessProfile& profile, std::optional<Vec2> a,
                            std::optional<double> c) {
  if (curve.dim != 2) throw ConfigError("inflection line check needs a planar curve (dim 2)");
  const FrameField frame = parallel_frame(curve);
  const std::size_t n = curve.size();
  std::vector<double> rk(n);
  for (std::size_t i = 0; i < n; ++i) rk[i] = eval_stiffness(profile, curve.arc_length(i)).value * frame.kappa[i].x();

  // rho k = -<J a, gamma> + c = a2 x - a1 y + c
  HafnerFit fit;
  const int unknowns = (a ? 0 : 2) + (c ? 0 : 1);
  if (unknowns > 0) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), unknowns);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      const Vec3& p = curve.positions[i];
      double known = rk[i];
      int col = 0;
      if (a) {
        known -= (*a).y() * p.x() - (*a).x() * p.y();
      } else {
        m(row, col++) = -p.y();
        m(row, col++) = p.x();
      }
      if (c) {
        known -= *c;
      } else {
        m(row, col++) = 1.0;
      }
      rhs[row] = known;
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(m);
    const Eigen::VectorXd x = cod.solve(rhs);
    fit.rank_deficient = cod.rank() < unknowns;
    int col = 0;
    fit.a = a ? *a : Vec2(x[0], x[1]);
    if (!a) col = 2;
    fit.c = c ? *c : x[col];
  } else {
    fit.a = *a;
    fit.c = *c;
  }

  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& p = curve.positions[i];
    r[i] = rk[i] - (fit.a.y() * p.x() - fit.a.x() * p.y()) - fit.c;
  }
  fit.residual = make_report("inflection_line", std::move(r));
  return fit;
}

double distance_to_inflection_line(const HafnerFit& fit, const Vec3& point) {
  const double norm = fit.a.norm();
  if (norm == 0.0) throw DomainError("inflection line is undefined for a = 0");
  const Vec2 ja = rotate_quarter(fit.a);
  return (ja.dot(point.head<2>()) - fit.c) / norm;
}

NecessaryCondition necessary_condition_check(const CurveSamples& curve, const StiffnessProfile& profile, double mu,
                                             const Vec3& a, const Vec3& b) {
  require_space_curve(curve, "necessary_condition_check");
  const TangentJets j = tangent_jets(curve, 1);
  NecessaryCondition out;
  out.values.resize(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const Vec3& t = j.T[i];
    const double rho = eval_stiffness(profile, curve.arc_length(i)).value;
    const Vec3 w = -mu * t + a.cross(curve.positions[i]) + b;
    out.values[i] = rho * t.cross(j.d1[i]).dot(w);
    if (j.d1[i].norm() > kFlatCurvature && !(out.values[i] > 0.0)) out.holds = false;
  }
  return out;
}

double energy_via_multipliers(const CurveSamples& curve, std::span<const double> lambda, const Vec3& a) {
  if (lambda.size() != curve.size()) {
    throw ConfigError("lambda has " + std::to_string(lambda.size()) + " samples, curve has " +
                      std::to_string(curve.size()));
  }
  return trapezoid(lambda, curve.h) + a.dot(curve.positions.back() - curve.positions.front());
}

}  // namespace varistiff
