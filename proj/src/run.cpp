#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "varistiff/characterizations.hpp"
#include "varistiff/io.hpp"
#include "varistiff/ode.hpp"

namespace varistiff {

namespace {

Json vec_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }
Json vec_json(const Vec2& v) { return Json::array({v.x(), v.y()}); }

Json report_json(const ResidualReport& r) { return Json{{"name", r.name}, {"rms", r.rms}, {"max", r.max}}; }

Json reports_json(const std::vector<ResidualReport>& rs) {
  Json arr = Json::array();
  for (const auto& r : rs) arr.push_back(report_json(r));
  return arr;
}

Json lambda_json(const std::vector<double>& lambda) {
  double lo = lambda.front();
  double hi = lambda.front();
  for (double v : lambda) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return Json{{"min", lo}, {"max", hi}, {"spread", hi - lo}};
}

double relative_gap(double x, double y) { return std::abs(x - y) / std::max(1e-300, std::max(std::abs(x), std::abs(y))); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("cannot open '" + path.string() + "' for writing (--out)");
  os << text;
  if (!os) throw ConfigError("failed writing '" + path.string() + "'");
}

// Tangents read back from a CSV carry the integrator's drift; rescale them
// and report how far they were from unit length.
double normalize_tangents(CurveSamples& curve) {
  double worst = 0.0;
  for (auto& t : curve.tangents) {
    worst = std::max(worst, std::abs(t.norm() - 1.0));
    t.normalize();
  }
  if (worst > 1e-3) throw ConfigError("curve CSV tangents deviate from unit length by " + std::to_string(worst));
  return worst;
}

// Shared diagnostics for planar elastic curves with pendulum-form constant a.
Json planar_elastic_diagnostics(const CurveSamples& curve, const StiffnessProfile& profile, const Vec3& a,
                                std::optional<Vec2> fixed_a = std::nullopt, std::optional<double> fixed_c = std::nullopt) {
  Json res;
  res["elastic_residual"] = report_json(elastic_residual(curve, profile, a));
  const std::vector<double> lambda = recover_lambda(curve, profile, a);
  res["lambda"] = lambda_json(lambda);
  const FrameField frame = parallel_frame(curve);
  const auto [vec, scal] = curvature_form_residual(curve, profile, frame, CurvatureMode::Elastic, a);
  res["curvature_form"] = Json{{"vector", report_json(vec)}, {"scalar", report_json(scal)}};
  const double be = bending_energy(curve, profile);
  const double bm = energy_via_multipliers(curve, lambda, a);
  res["energy"] = Json{{"bending", be}, {"via_multipliers", bm}, {"relative_gap", relative_gap(be, bm)}};
  const HafnerFit fit = hafner_line_check(curve, profile, fixed_a, fixed_c);
  Json line{{"a", vec_json(fit.a)}, {"c", fit.c}, {"residual", report_json(fit.residual)},
            {"rank_deficient", fit.rank_deficient}};
  if (fit.a.norm() > 0.0) {
    double worst = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
      const double rk = eval_stiffness(profile, curve.arc_length(i)).value * frame.kappa[i].x();
      if (std::abs(rk) <= 1e-3) {
        worst = std::max(worst, std::abs(distance_to_inflection_line(fit, curve.positions[i])));
        ++count;
      }
    }
    line["near_inflection_samples"] = count;
    line["max_distance_to_line"] = worst;
  }
  res["inflection_line"] = line;
  return res;
}

Json space_holonomy_diagnostics(const CurveSamples& curve, const StiffnessProfile& profile, const Vec3& a,
                                const Vec3& b, std::optional<double> mu_in) {
  Json res;
  const MuEstimate est = recover_mu(curve, a, b);
  const double mu = mu_in.value_or(est.mu);
  res["mu"] = Json{{"recovered", est.mu}, {"spread", est.spread}, {"used", mu}};
  res["conditions"] = reports_json(holonomy_elastic_residuals(curve, profile, a, b, mu));
  const NecessaryCondition nc = necessary_condition_check(curve, profile, mu, a, b);
  double lo = nc.values.empty() ? 0.0 : nc.values.front();
  for (double v : nc.values) lo = std::min(lo, v);
  res["necessary_condition"] = Json{{"holds", nc.holds}, {"min", lo}};
  const FrameField frame = parallel_frame(curve);
  const auto [vec, scal] = curvature_form_residual(curve, profile, frame, CurvatureMode::Holonomy, -a, mu);
  res["curvature_form"] = Json{{"vector", report_json(vec)}, {"scalar", report_json(scal)}};
  res["bending_energy"] = bending_energy(curve, profile);
  return res;
}

Json curve_summary(const CurveSamples& curve) {
  const auto [ta, tb] = endpoint_tangents(curve);
  return Json{{"dim", curve.dim},
              {"samples", curve.size()},
              {"h", curve.h},
              {"length", curve.length()},
              {"endpoint_gap", (curve.positions.back() - curve.positions.front()).norm()},
              {"tangent_gap", (tb - ta).norm()}};
}

struct Outputs {
  const std::filesystem::path& dir;
  std::vector<std::filesystem::path>& written;

  void csv(const CurveSamples& curve, const std::optional<StiffnessProfile>& profile) {
    const auto path = dir / "curve.csv";
    export_curve_csv(curve, std::nullopt, profile, path);
    written.push_back(path);
  }
  void svg(const CurveSamples& curve, const std::optional<StiffnessProfile>& profile, const SvgOptions& opts) {
    if (curve.dim != 2) return;
    const auto path = dir / "curve.svg";
    export_svg_planar(curve, path, profile, opts);
    written.push_back(path);
  }
};

Json run_integrate(const IntegrateSpec& spec, Outputs& out) {
  Json res;
  IntegrateOptions opts;
  opts.renormalize = spec.renormalize;
  Trajectory traj;
  if (spec.kind == IntegrateSpec::Kind::Cond5) {
    traj = integrate(Cond5System{spec.a, spec.b, spec.profile}, cond5_state(spec.initial.position, spec.initial.tangent),
                     0.0, spec.length, spec.steps, opts);
  } else {
    traj = integrate(PendulumSystem{spec.dim, spec.a, spec.profile},
                     pendulum_state(spec.initial.position, spec.initial.tangent, spec.initial.tangent_derivative), 0.0,
                     spec.length, spec.steps, opts);
  }
  const CurveSamples& curve = *traj.curve;
  res["curve"] = curve_summary(curve);
  res["max_tangent_drift"] = traj.max_tangent_drift;
  if (spec.kind == IntegrateSpec::Kind::Cond5) {
    res["holonomy_elastic"] = space_holonomy_diagnostics(curve, spec.profile, spec.a, spec.b, std::nullopt);
  } else if (spec.dim == 2) {
    res["elastic"] = planar_elastic_diagnostics(curve, spec.profile, spec.a);
  } else {
    res["elastic_residual"] = report_json(elastic_residual(curve, spec.profile, spec.a));
    const std::vector<double> lambda = recover_lambda(curve, spec.profile, spec.a);
    res["lambda"] = lambda_json(lambda);
    const double be = bending_energy(curve, spec.profile);
    const double bm = energy_via_multipliers(curve, lambda, spec.a);
    res["energy"] = Json{{"bending", be}, {"via_multipliers", bm}, {"relative_gap", relative_gap(be, bm)}};
  }
  out.csv(curve, spec.profile);
  out.svg(curve, spec.profile, spec.svg);
  return res;
}

Json run_pendulum(const PendulumSpec& spec, Outputs& out) {
  Json res;
  PlanarThetaSystem sys{constant_field(spec.q), as_field(spec.profile)};
  State init(2);
  init << spec.theta0, spec.dtheta0;
  const Trajectory traj = integrate(sys, init, 0.0, spec.length, spec.steps);
  const std::vector<double> theta = first_components(traj);
  const CurveSamples curve = reconstruct_planar_curve(theta, traj.h);
  res["curve"] = curve_summary(curve);
  const Vec3 a(0.0, -spec.q, 0.0);
  res["a"] = vec_json(a);
  res["elastic"] = planar_elastic_diagnostics(curve, spec.profile, a);
  if (spec.g) {
    const PendulumComparison cmp = pendulum_equivalence_check(*spec.g, as_field(*spec.rod_length), spec.theta0,
                                                              spec.dtheta0, 0.0, spec.length, spec.steps);
    res["variable_length"] = Json{{"g", *spec.g}, {"max_deviation", cmp.max_deviation}};
  }
  out.csv(curve, spec.profile);
  out.svg(curve, spec.profile, spec.svg);
  return res;
}

Json run_check(const CheckSpec& spec) {
  CurveSamples curve = import_curve_csv(spec.curve_csv);
  Json res;
  res["tangent_renormalization"] = normalize_tangents(curve);
  validate_curve(curve);
  check_positive(spec.profile, curve.s0, curve.h, curve.size());
  res["curve"] = curve_summary(curve);
  if (curve.dim == 3) {
    res["holonomy_elastic"] = space_holonomy_diagnostics(curve, spec.profile, spec.a, spec.b, spec.mu);
  } else {
    std::optional<Vec2> fixed_a;
    if (spec.c) fixed_a = Vec2(spec.a.x(), spec.a.y());
    res["elastic"] = planar_elastic_diagnostics(curve, spec.profile, spec.a, fixed_a, spec.c);
  }
  return res;
}

Json run_close(const CloseSpec& spec, Outputs& out) {
  const ClosureProblem& p = spec.problem;
  const ClosureResult r = optimize(p);
  Json res;
  res["converged"] = r.converged;
  res["residual"] = r.residual;
  res["iterations"] = r.iterations;
  res["stop_reason"] = r.stop_reason;
  res["penalized_evaluations"] = r.penalized;
  res["theta"] = Json{{"a", vec_json(Vec3(r.theta.segment<3>(kA1)))},
                      {"b", vec_json(Vec3(r.theta.segment<3>(kB1)))},
                      {"L", r.theta[kLength]},
                      {"xi", r.theta[kShift]}};
  const Eigen::VectorXd rv = closing_residual(p, r.theta);
  Json comps = Json::array();
  for (Eigen::Index i = 0; i < rv.size(); ++i) comps.push_back(rv[i]);
  res["residual_vector"] = comps;
  res["history"] = r.history;
  const StiffnessProfile effective = closure_profile(p, r.theta);
  res["profile"] = profile_to_json(effective);
  if (!r.curve.positions.empty()) {
    res["curve"] = curve_summary(r.curve);
    out.csv(r.curve, effective);
  }
  return res;
}

Json run_vortex(const VortexSpec& spec) {
  CurveSamples curve = import_curve_csv(spec.curve_csv);
  Json res;
  res["tangent_renormalization"] = normalize_tangents(curve);
  validate_curve(curve);
  if (curve.dim != 3) throw ConfigError("'curve_csv' must hold a space curve for the vortex command");
  check_positive(spec.vortex.profile, curve.s0, curve.h, curve.size());
  res["curve"] = curve_summary(curve);
  const std::vector<Vec3> vel = vortex_velocity(curve, spec.vortex);
  const KillingFit fit = killing_fit(curve, vel);
  res["epsilon"] = spec.vortex.epsilon;
  res["killing_fit"] = Json{{"omega", vec_json(fit.omega)},
                            {"v", vec_json(fit.v)},
                            {"residual_rms", fit.residual_rms},
                            {"rank_deficient", fit.rank_deficient}};
  if (spec.a && spec.b) {
    res["generator_error"] = Json{{"omega_plus_a", (fit.omega + *spec.a).norm()}, {"v_plus_b", (fit.v + *spec.b).norm()}};
  }
  return res;
}

Json run_export(const ExportSpec& spec, Outputs& out) {
  CurveSamples curve = import_curve_csv(spec.curve_csv);
  Json res;
  res["tangent_renormalization"] = normalize_tangents(curve);
  validate_curve(curve);
  res["curve"] = curve_summary(curve);
  out.csv(curve, spec.profile);
  out.svg(curve, spec.profile, spec.svg);
  return res;
}

}  // namespace

RunResult run(const RunConfig& config, const std::filesystem::path& out_dir) {
  const auto start = std::chrono::steady_clock::now();
  RunResult rr;
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + out_dir.string() + "' (--out): " + ec.message());
  Outputs out{out_dir, rr.written};

  Json results = std::visit(
      [&](const auto& spec) -> Json {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, IntegrateSpec>) return run_integrate(spec, out);
        if constexpr (std::is_same_v<T, PendulumSpec>) return run_pendulum(spec, out);
        if constexpr (std::is_same_v<T, CheckSpec>) return run_check(spec);
        if constexpr (std::is_same_v<T, CloseSpec>) return run_close(spec, out);
        if constexpr (std::is_same_v<T, VortexSpec>) return run_vortex(spec);
        if constexpr (std::is_same_v<T, ExportSpec>) return run_export(spec, out);
      },
      config.spec);

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rr.report = Json{{"command", config.command}, {"input", config.document}, {"results", std::move(results)}};
  rr.report["timing"] = Json{{"seconds", seconds}};
  const auto path = out_dir / "report.json";
  write_text(path, rr.report.dump(2) + "\n");
  rr.written.push_back(path);
  return rr;
}

RunResult run_text(const std::string& text, const std::string& command, const std::vector<std::string>& overrides,
                   const std::filesystem::path& base_dir, const std::filesystem::path& out_dir) {
  RunResult rr;
  try {
    const RunConfig cfg = parse_config(text, command, overrides, base_dir);
    return run(cfg, out_dir);
  } catch (const NumericalError& e) {
    rr.exit_code = kExitNumerical;
    rr.message = std::string("numerical failure: ") + e.what();
  } catch (const ConfigError& e) {
    rr.exit_code = kExitValidation;
    rr.message = std::string("invalid configuration: ") + e.what();
  } catch (const DomainError& e) {
    rr.exit_code = kExitValidation;
    rr.message = std::string("invalid configuration: ") + e.what();
  }
  return rr;
}

std::string comparable_report(const Json& report) {
  Json copy = report;
  copy.erase("timing");
  return copy.dump(2);
}

}  // namespace varistiff
