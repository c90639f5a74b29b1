#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "varistiff/io.hpp"

namespace varistiff {

namespace {

void put_number(std::string& out, double v, const char* fmt = "%.17g") {
  char buf[40];
  std::snprintf(buf, sizeof buf, fmt, v);
  out += buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("cannot open '" + path.string() + "' for writing");
  os << text;
  os.close();
  if (!os) throw ConfigError("failed writing '" + path.string() + "'");
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& cell, std::size_t line, const std::string& column) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
    throw ConfigError("curve CSV line " + std::to_string(line) + ", column '" + column + "': not a finite number '" +
                      cell + "'");
  }
  return v;
}

}  // namespace

std::string curve_csv(const CurveSamples& curve, const std::optional<FrameField>& frame,
                      const std::optional<StiffnessProfile>& profile) {
  const std::size_t n = curve.size();
  if (n < 1) throw ConfigError("cannot export an empty curve");
  if (curve.has_tangents() && curve.tangents.size() != n) throw ConfigError("curve tangent count differs from positions");
  std::optional<FrameField> fr = frame;
  if (!fr && n >= 3) fr = parallel_frame(curve);
  if (fr && fr->size() != n) throw ConfigError("frame and curve sample counts differ");
  const TangentJets jets = curve.has_tangents() || n < 3 ? TangentJets{curve.tangents, {}, {}, {}} : tangent_jets(curve, 0);
  const bool planar = curve.dim == 2;

  std::string out = planar ? "s,x,y,z,Tx,Ty,Tz,k1" : "s,x,y,z,Tx,Ty,Tz,k1,k2";
  if (profile) out += ",rho";
  out += '\n';
  for (std::size_t i = 0; i < n; ++i) {
    const double s = curve.arc_length(i);
    const Vec3 t = i < jets.T.size() ? jets.T[i] : Vec3((curve.positions[1] - curve.positions[0]).normalized());
    const Vec2 k = fr ? fr->kappa[i] : Vec2::Zero();
    put_number(out, s);
    for (int c = 0; c < 3; ++c) {
      out += ',';
      put_number(out, curve.positions[i][c]);
    }
    for (int c = 0; c < 3; ++c) {
      out += ',';
      put_number(out, t[c]);
    }
    out += ',';
    put_number(out, k.x());
    if (!planar) {
      out += ',';
      put_number(out, k.y());
    }
    if (profile) {
      out += ',';
      put_number(out, profile->jet(s).value);
    }
    out += '\n';
  }
  return out;
}

void export_curve_csv(const CurveSamples& curve, const std::optional<FrameField>& frame,
                      const std::optional<StiffnessProfile>& profile, const std::filesystem::path& path) {
  write_file(path, curve_csv(curve, frame, profile));
}

CurveSamples parse_curve_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("curve CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split(line, ',');
  auto column = [&](const std::string& name) -> int {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  };
  for (const char* required : {"s", "x", "y", "z"}) {
    if (column(required) < 0) throw ConfigError(std::string("curve CSV header lacks column '") + required + "'");
  }
  const int cs = column("s");
  const int cx = column("x");
  const int cy = column("y");
  const int cz = column("z");
  const int ctx = column("Tx");
  const int cty = column("Ty");
  const int ctz = column("Tz");
  const bool has_t = ctx >= 0 && cty >= 0 && ctz >= 0;
  if (!has_t && (ctx >= 0 || cty >= 0 || ctz >= 0)) throw ConfigError("curve CSV has a partial tangent column set");

  std::vector<double> s;
  CurveSamples curve;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line, ',');
    if (cells.size() != header.size()) {
      throw ConfigError("curve CSV line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                        " cells, header has " + std::to_string(header.size()));
    }
    s.push_back(parse_double(cells[static_cast<std::size_t>(cs)], lineno, "s"));
    curve.positions.emplace_back(parse_double(cells[static_cast<std::size_t>(cx)], lineno, "x"),
                                 parse_double(cells[static_cast<std::size_t>(cy)], lineno, "y"),
                                 parse_double(cells[static_cast<std::size_t>(cz)], lineno, "z"));
    if (has_t) {
      curve.tangents.emplace_back(parse_double(cells[static_cast<std::size_t>(ctx)], lineno, "Tx"),
                                  parse_double(cells[static_cast<std::size_t>(cty)], lineno, "Ty"),
                                  parse_double(cells[static_cast<std::size_t>(ctz)], lineno, "Tz"));
    }
  }
  const std::size_t n = s.size();
  if (n < 2) throw ConfigError("curve CSV needs at least two data rows");
  curve.s0 = s.front();
  curve.h = (s.back() - s.front()) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(s[i] - curve.arc_length(i)) > 1e-9 * std::max(1.0, std::abs(s.back()))) {
      throw ConfigError("curve CSV column 's' is not uniformly spaced at row " + std::to_string(i + 2));
    }
  }
  if (column("k1") >= 0) {
    curve.dim = column("k2") >= 0 ? 3 : 2;
  } else {
    const bool flat = std::all_of(curve.positions.begin(), curve.positions.end(), [](const Vec3& p) { return p.z() == 0.0; });
    curve.dim = flat ? 2 : 3;
  }
  return curve;
}

CurveSamples import_curve_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read curve CSV '" + path.string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_curve_csv(ss.str());
}

std::string planar_svg(const CurveSamples& curve, const std::optional<StiffnessProfile>& profile,
                       const SvgOptions& options) {
  if (curve.dim != 2) throw ConfigError("SVG export is only available for planar curves");
  if (curve.size() < 2) throw ConfigError("SVG export needs at least two samples");
  if (options.width_by_rho && !profile) throw ConfigError("stroke width by rho needs a stiffness profile");
  double xmin = curve.positions[0].x();
  double xmax = xmin;
  double ymin = -curve.positions[0].y();
  double ymax = ymin;
  for (const auto& p : curve.positions) {
    xmin = std::min(xmin, p.x());
    xmax = std::max(xmax, p.x());
    ymin = std::min(ymin, -p.y());
    ymax = std::max(ymax, -p.y());
  }
  const double extent = std::max(xmax - xmin, ymax - ymin);
  const double margin = extent > 0.0 ? 0.05 * extent : 1.0;
  const char* fmt = "%.9g";

  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" viewBox=\"";
  put_number(out, xmin - margin, fmt);
  out += ' ';
  put_number(out, ymin - margin, fmt);
  out += ' ';
  put_number(out, xmax - xmin + 2.0 * margin, fmt);
  out += ' ';
  put_number(out, ymax - ymin + 2.0 * margin, fmt);
  out += "\">\n";

  auto line_element = [&](const Vec3& p, const Vec3& q, double width) {
    out += "<line x1=\"";
    put_number(out, p.x(), fmt);
    out += "\" y1=\"";
    put_number(out, -p.y(), fmt);
    out += "\" x2=\"";
    put_number(out, q.x(), fmt);
    out += "\" y2=\"";
    put_number(out, -q.y(), fmt);
    out += "\" stroke=\"black\" stroke-linecap=\"round\" vector-effect=\"non-scaling-stroke\" stroke-width=\"";
    put_number(out, width, fmt);
    out += "\"/>\n";
  };

  const std::size_t n = curve.size();
  if (options.width_by_rho) {
    std::vector<double> rho(n);
    for (std::size_t i = 0; i < n; ++i) rho[i] = eval_stiffness(*profile, curve.arc_length(i)).value;
    const auto [lo, hi] = std::minmax_element(rho.begin(), rho.end());
    const double range = *hi - *lo;
    const bool degenerate = range <= 1e-12 * std::max(1.0, std::abs(*hi));
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double mid = 0.5 * (rho[i] + rho[i + 1]);
      const double w = degenerate ? 1.75 : 0.5 + 2.5 * (mid - *lo) / range;
      line_element(curve.positions[i], curve.positions[i + 1], w);
    }
  } else if (n == 2) {
    line_element(curve.positions[0], curve.positions[1], 1.5);
  } else {
    out += "<polyline fill=\"none\" stroke=\"black\" stroke-linejoin=\"round\" vector-effect=\"non-scaling-stroke\" "
           "stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < n; ++i) {
      if (i) out += ' ';
      put_number(out, curve.positions[i].x(), fmt);
      out += ',';
      put_number(out, -curve.positions[i].y(), fmt);
    }
    out += "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

void export_svg_planar(const CurveSamples& curve, const std::filesystem::path& path,
                       const std::optional<StiffnessProfile>& profile, const SvgOptions& options) {
  write_file(path, planar_svg(curve, profile, options));
}

}  // namespace varistiff
