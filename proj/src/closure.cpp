#include "varistiff/closure.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "varistiff/ode.hpp"

namespace varistiff {

namespace {

constexpr double kLambdaCeiling = 1e16;

int residual_size(const ClosureProblem& p) { return p.w_hol > 0.0 ? 7 : 6; }

Vec3 transported_reference(const Vec3& w, const Vec3& t) {
  Vec3 r = w - w.dot(t) * t;
  if (r.norm() < 1e-8) return default_seed_normal(t);
  return r.normalized();
}

double step_for(const ClosureProblem& p, double value) { return std::max(p.fd_rel_step * std::abs(value), p.fd_abs_step); }

// Maps the free scalars to the optimizer coordinates (log L instead of L).
Eigen::VectorXd to_internal(const std::vector<int>& idx, const Theta& theta) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const double v = theta[idx[k]];
    x[static_cast<Eigen::Index>(k)] = idx[k] == kLength ? std::log(v) : v;
  }
  return x;
}

Theta from_internal(const std::vector<int>& idx, const Theta& base, const Eigen::VectorXd& x) {
  Theta theta = base;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const double v = x[static_cast<Eigen::Index>(k)];
    theta[idx[k]] = idx[k] == kLength ? std::exp(v) : v;
  }
  return theta;
}

}  // namespace

Theta ClosureProblem::initial_theta() const {
  Theta t;
  t << a, b, length, shift;
  return t;
}

int ClosureProblem::free_count() const { return static_cast<int>(free_indices().size()); }

std::vector<int> ClosureProblem::free_indices() const {
  std::vector<int> idx;
  for (int k = 0; k < kThetaSize; ++k) {
    if (free[static_cast<std::size_t>(k)]) idx.push_back(k);
  }
  return idx;
}

StiffnessProfile closure_profile(const ClosureProblem& problem, const Theta& theta) {
  if (!problem.periodic_k) return problem.profile.shifted(theta[kShift]);
  const StiffnessProfile& p = problem.profile;
  if (p.kind() != ProfileKind::Sinusoidal) throw ConfigError("periodic mode needs a sinusoidal profile");
  const double freq = 2.0 * std::numbers::pi * static_cast<double>(*problem.periodic_k) / theta[kLength];
  return StiffnessProfile::sinusoidal(p.amplitude(), p.offset(), p.shift() + theta[kShift], freq);
}

CurveSamples closure_curve(const ClosureProblem& problem, const Theta& theta) {
  if (!(theta[kLength] > 0.0)) throw ConfigError("closure length L must be positive");
  Cond5System sys;
  sys.a = theta.segment<3>(kA1);
  sys.b = theta.segment<3>(kB1);
  sys.rho = closure_profile(problem, theta);
  IntegrateOptions opts;
  opts.drift_limit = problem.drift_limit;
  Trajectory traj = integrate(sys, cond5_state(problem.start_position, problem.start_tangent), 0.0, theta[kLength],
                              problem.steps, opts);
  return std::move(*traj.curve);
}

Eigen::VectorXd closing_residual(const ClosureProblem& problem, const Theta& theta) {
  const int m = residual_size(problem);
  Eigen::VectorXd r(m);
  try {
    const CurveSamples curve = closure_curve(problem, theta);
    r.segment<3>(0) = problem.w_pos * (curve.positions.back() - curve.positions.front());
    r.segment<3>(3) = problem.w_tan * (curve.tangents.back() - curve.tangents.front());
    if (m == 7) {
      const Vec3 wa = default_seed_normal(curve.tangents.front().normalized());
      const Vec3 wb = transported_reference(wa, curve.tangents.back().normalized());
      CurveSamples unit = curve;
      for (auto& t : unit.tangents) t.normalize();
      r[6] = problem.w_hol * holonomy(unit, {wa, wb});
    }
  } catch (const NumericalError&) {
    r.setConstant(kResidualSentinel);
  } catch (const DomainError&) {
    r.setConstant(kResidualSentinel);
  }
  return r;
}

Eigen::MatrixXd fd_jacobian(const ClosureProblem& problem, const Theta& theta, Exec exec) {
  const std::vector<int> idx = problem.free_indices();
  const auto k = idx.size();
  const int m = residual_size(problem);
  std::vector<Eigen::VectorXd> evals(2 * k);
  for_each_index(exec, 2 * k, [&](std::size_t e) {
    const int j = idx[e / 2];
    Theta t = theta;
    t[j] += (e % 2 == 0 ? 1.0 : -1.0) * step_for(problem, theta[j]);
    evals[e] = closing_residual(problem, t);
  });
  Eigen::MatrixXd jac(m, static_cast<Eigen::Index>(k));
  for (std::size_t c = 0; c < k; ++c) {
    const double eps = step_for(problem, theta[idx[c]]);
    jac.col(static_cast<Eigen::Index>(c)) = (evals[2 * c] - evals[2 * c + 1]) / (2.0 * eps);
  }
  return jac;
}

ClosureResult optimize(const ClosureProblem& problem, Exec exec) {
  const std::vector<int> idx = problem.free_indices();
  if (idx.empty()) throw ConfigError("closure needs at least one free parameter");
  if (std::abs(problem.start_tangent.norm() - 1.0) > 1e-10) throw ConfigError("start tangent must be a unit vector");
  if (!(problem.length > 0.0)) throw ConfigError("closure length L must be positive");

  ClosureResult res;
  Theta theta = problem.initial_theta();
  Eigen::VectorXd x = to_internal(idx, theta);
  Eigen::VectorXd r = closing_residual(problem, theta);
  double norm = r.norm();
  res.history.push_back(norm);
  double lambda = problem.lambda0;
  const auto k = static_cast<Eigen::Index>(idx.size());
  res.stop_reason = "max_iter";

  while (res.iterations < problem.max_iter) {
    if (norm <= problem.tol) {
      res.stop_reason = "tolerance";
      break;
    }
    ++res.iterations;
    Eigen::MatrixXd jac = fd_jacobian(problem, theta, exec);
    for (Eigen::Index c = 0; c < k; ++c) {
      if (idx[static_cast<std::size_t>(c)] == kLength) jac.col(c) *= theta[kLength];
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * r;

    bool accepted = false;
    double step_norm = 0.0;
    while (lambda < kLambdaCeiling) {
      const Eigen::MatrixXd damped = jtj + lambda * Eigen::MatrixXd::Identity(k, k);
      const Eigen::VectorXd delta = damped.ldlt().solve(-g);
      step_norm = delta.norm();
      const Eigen::VectorXd x_try = x + delta;
      const Theta theta_try = from_internal(idx, theta, x_try);
      const Eigen::VectorXd r_try = closing_residual(problem, theta_try);
      if (r_try.maxCoeff() == kResidualSentinel) ++res.penalized;
      const double norm_try = r_try.norm();
      if (norm_try < norm) {
        x = x_try;
        theta = theta_try;
        r = r_try;
        norm = norm_try;
        res.history.push_back(norm);
        lambda /= 3.0;
        accepted = true;
        break;
      }
      lambda *= 3.0;
      if (step_norm <= problem.step_tol) break;
    }
    if (!accepted) {
      res.stop_reason = lambda >= kLambdaCeiling ? "stalled" : "small_step";
      break;
    }
    if (step_norm <= problem.step_tol) {
      res.stop_reason = "small_step";
      break;
    }
  }
  if (norm <= problem.tol) res.stop_reason = "tolerance";

  res.theta = theta;
  res.residual = norm;
  res.converged = norm <= problem.tol;
  try {
    res.curve = closure_curve(problem, theta);
  } catch (const NumericalError&) {
  } catch (const DomainError&) {
  }
  return res;
}

}  // namespace varistiff
