#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "varistiff/closure.hpp"
#include "varistiff/curve.hpp"
#include "varistiff/dynamics.hpp"
#include "varistiff/stiffness.hpp"

namespace varistiff {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------- CSV / SVG

/// Curve CSV with header s,x,y,z,Tx,Ty,Tz,k1,k2,rho. Planar curves omit k2;
/// rho is present only when a profile is given. The frame is computed when
/// not supplied. Numbers use 17 significant digits; lines end with LF.
std::string curve_csv(const CurveSamples& curve, const std::optional<FrameField>& frame = std::nullopt,
                      const std::optional<StiffnessProfile>& profile = std::nullopt);

void export_curve_csv(const CurveSamples& curve, const std::optional<FrameField>& frame,
                      const std::optional<StiffnessProfile>& profile, const std::filesystem::path& path);

/// Reads a curve CSV. The dimension is 2 when the header has k1 but no k2
/// (or, without curvature columns, when every z is zero). Tangents are read
/// when the Tx, Ty, Tz columns exist.
CurveSamples parse_curve_csv(const std::string& text);
CurveSamples import_curve_csv(const std::filesystem::path& path);

struct SvgOptions {
  /// Emit 2-point segments whose stroke width maps [min rho, max rho] to [0.5, 3].
  bool width_by_rho = false;
};

std::string planar_svg(const CurveSamples& curve, const std::optional<StiffnessProfile>& profile = std::nullopt,
                       const SvgOptions& options = {});

void export_svg_planar(const CurveSamples& curve, const std::filesystem::path& path,
                       const std::optional<StiffnessProfile>& profile = std::nullopt, const SvgOptions& options = {});

// ---------------------------------------------------------------- config

struct InitialPose {
  Vec3 position = Vec3::Zero();
  Vec3 tangent = Vec3::UnitX();
  Vec3 tangent_derivative = Vec3::Zero();
};

struct IntegrateSpec {
  enum class Kind { Cond5, Pendulum } kind = Kind::Cond5;
  int dim = 3;
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  StiffnessProfile profile = StiffnessProfile::constant(1.0);
  InitialPose initial;
  double length = 1.0;
  std::size_t steps = 1000;
  bool renormalize = false;
  SvgOptions svg;
};

struct PendulumSpec {
  double q = 1.0;
  StiffnessProfile profile = StiffnessProfile::constant(1.0);
  double theta0 = 0.0;
  double dtheta0 = 0.0;
  double length = 1.0;
  std::size_t steps = 1000;
  std::optional<double> g;
  std::optional<StiffnessProfile> rod_length;
  SvgOptions svg;
};

struct CheckSpec {
  std::filesystem::path curve_csv;
  StiffnessProfile profile = StiffnessProfile::constant(1.0);
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  std::optional<double> mu;
  std::optional<double> c;
};

struct CloseSpec {
  ClosureProblem problem;
};

struct VortexSpec {
  std::filesystem::path curve_csv;
  VortexConfig vortex;
  std::optional<Vec3> a;
  std::optional<Vec3> b;
};

struct ExportSpec {
  std::filesystem::path curve_csv;
  std::optional<StiffnessProfile> profile;
  SvgOptions svg;
};

using CommandSpec = std::variant<IntegrateSpec, PendulumSpec, CheckSpec, CloseSpec, VortexSpec, ExportSpec>;

struct RunConfig {
  std::string command;
  /// The configuration document after command-line overrides, echoed in the report.
  Json document;
  /// Relative file paths in the config resolve against this directory.
  std::filesystem::path base_dir;
  CommandSpec spec;
};

const std::vector<std::string>& command_names();

/// Strict parse: duplicate keys, unknown keys, wrong types and out-of-range
/// values raise ConfigError naming the offending key.
Json parse_json_strict(const std::string& text);

/// Applies "dotted.key=value" overrides; values are parsed as JSON when
/// possible, otherwise taken as strings.
void apply_override(Json& document, const std::string& assignment);

RunConfig parse_config(const std::string& text, const std::string& command = "",
                       const std::vector<std::string>& overrides = {},
                       const std::filesystem::path& base_dir = ".");

RunConfig build_config(Json document, const std::string& command, const std::filesystem::path& base_dir);

StiffnessProfile parse_profile(const Json& node, const std::string& path);
Json profile_to_json(const StiffnessProfile& profile);

// ---------------------------------------------------------------- run

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

struct RunResult {
  int exit_code = kExitOk;
  std::string message;
  Json report;
  std::vector<std::filesystem::path> written;
};

/// Executes a parsed configuration and writes report.json (plus curve.csv and
/// curve.svg where applicable) into `out_dir`.
RunResult run(const RunConfig& config, const std::filesystem::path& out_dir);

/// Parses and runs in one go, mapping errors to exit codes.
RunResult run_text(const std::string& text, const std::string& command, const std::vector<std::string>& overrides,
                   const std::filesystem::path& base_dir, const std::filesystem::path& out_dir);

/// The report without its `timing` block, serialized; identical inputs give
/// identical strings.
std::string comparable_report(const Json& report);

}  // namespace varistiff
