#include <cmath>
#include <set>
#include <sstream>

#include "varistiff/io.hpp"
#include "varistiff/ode.hpp"

namespace varistiff {

namespace {

std::string join_path(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Typed, strict access to one JSON object. Every key must be consumed
// exactly once; finish() reports the leftovers.
class Reader {
 public:
  Reader(const Json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError("'" + display() + "' must be an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  const Json& raw(const std::string& key) {
    used_.insert(key);
    if (!node_.contains(key)) throw ConfigError("missing required key '" + at(key) + "'");
    return node_.at(key);
  }

  double number(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_number()) throw ConfigError("'" + at(key) + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError("'" + at(key) + "' must be finite");
    return d;
  }

  double number(const std::string& key, double fallback) { return has(key) ? number(key) : mark(key, fallback); }

  double positive(const std::string& key) {
    const double d = number(key);
    if (!(d > 0.0)) throw ConfigError("'" + at(key) + "' must be positive");
    return d;
  }

  double positive(const std::string& key, double fallback) { return has(key) ? positive(key) : mark(key, fallback); }

  std::size_t count(const std::string& key, std::size_t min_value) {
    const Json& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError("'" + at(key) + "' must be an integer");
    const auto i = v.get<long long>();
    if (i < static_cast<long long>(min_value)) {
      throw ConfigError("'" + at(key) + "' must be at least " + std::to_string(min_value) + ", got " +
                        std::to_string(i));
    }
    return static_cast<std::size_t>(i);
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return mark(key, fallback);
    const Json& v = raw(key);
    if (!v.is_boolean()) throw ConfigError("'" + at(key) + "' must be true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_string()) throw ConfigError("'" + at(key) + "' must be a string");
    return v.get<std::string>();
  }

  Vec3 vec(const std::string& key, bool allow_planar = false) {
    const Json& v = raw(key);
    const std::size_t want = 3;
    if (!v.is_array() || !(v.size() == want || (allow_planar && v.size() == 2))) {
      throw ConfigError("'" + at(key) + "' must be an array of " + (allow_planar ? "2 or 3" : std::string("3")) +
                        " numbers");
    }
    Vec3 out = Vec3::Zero();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError("'" + at(key) + "[" + std::to_string(i) + "]' must be a number");
      out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
      if (!std::isfinite(out[static_cast<Eigen::Index>(i)])) throw ConfigError("'" + at(key) + "' must be finite");
    }
    return out;
  }

  Vec3 vec(const std::string& key, const Vec3& fallback, bool allow_planar = false) {
    if (!has(key)) {
      used_.insert(key);
      return fallback;
    }
    return vec(key, allow_planar);
  }

  Reader object(const std::string& key) { return Reader(raw(key), at(key)); }

  std::string at(const std::string& key) const { return join_path(path_, key); }

  void finish() const {
    for (const auto& item : node_.items()) {
      if (!used_.count(item.key())) throw ConfigError("unknown key '" + at(item.key()) + "'");
    }
  }

 private:
  template <class T>
  T mark(const std::string& key, T value) {
    used_.insert(key);
    return value;
  }
  std::string display() const { return path_.empty() ? "<root>" : path_; }

  const Json& node_;
  std::string path_;
  std::set<std::string> used_;
};

std::size_t steps_or_default(Reader& r, double length) {
  return r.has("steps") ? r.count("steps", 2) : default_steps(length);
}

SvgOptions parse_svg(Reader& parent) {
  SvgOptions opts;
  if (!parent.has("svg")) return opts;
  Reader r = parent.object("svg");
  opts.width_by_rho = r.boolean("width_by_rho", false);
  r.finish();
  return opts;
}

void require_positive_on_grid(const StiffnessProfile& profile, double s0, double length, std::size_t steps,
                              const std::string& key) {
  const double h = length / static_cast<double>(steps);
  const double lo = min_on_grid(profile, s0, h, steps + 1);
  if (!(lo > 0.0)) {
    std::ostringstream os;
    os << "'" << key << "' must be positive on the integration grid, minimum is " << lo;
    throw ConfigError(os.str());
  }
}

Vec3 unit(const Vec3& v, const std::string& key) {
  if (std::abs(v.norm() - 1.0) > 1e-10) throw ConfigError("'" + key + "' must be a unit vector");
  return v;
}

IntegrateSpec parse_integrate(Reader& r) {
  IntegrateSpec spec;
  Reader sys = r.object("system");
  const std::string kind = sys.string("kind");
  if (kind == "cond5") {
    spec.kind = IntegrateSpec::Kind::Cond5;
    spec.dim = 3;
    spec.a = sys.vec("a", Vec3::Zero());
    spec.b = sys.vec("b", Vec3::Zero());
  } else if (kind == "pendulum") {
    spec.kind = IntegrateSpec::Kind::Pendulum;
    spec.dim = sys.has("dim") ? static_cast<int>(sys.count("dim", 2)) : 3;
    if (spec.dim != 2 && spec.dim != 3) throw ConfigError("'" + sys.at("dim") + "' must be 2 or 3");
    spec.a = sys.vec("a", Vec3::Zero(), spec.dim == 2);
  } else {
    throw ConfigError("'" + sys.at("kind") + "' must be \"cond5\" or \"pendulum\", got \"" + kind + "\"");
  }
  sys.finish();

  spec.profile = parse_profile(r.raw("profile"), "profile");
  const bool planar = spec.dim == 2;
  if (r.has("initial")) {
    Reader init = r.object("initial");
    spec.initial.position = init.vec("position", Vec3::Zero(), planar);
    spec.initial.tangent = unit(init.vec("tangent", Vec3::UnitX(), planar), init.at("tangent"));
    spec.initial.tangent_derivative = init.vec("tangent_derivative", Vec3::Zero(), planar);
    if (spec.kind == IntegrateSpec::Kind::Cond5 && init.has("tangent_derivative")) {
      throw ConfigError("'" + init.at("tangent_derivative") + "' applies to the pendulum system only");
    }
    init.finish();
  }
  if (spec.kind == IntegrateSpec::Kind::Pendulum &&
      std::abs(spec.initial.tangent.dot(spec.initial.tangent_derivative)) > 1e-10) {
    throw ConfigError("'initial.tangent_derivative' must be orthogonal to 'initial.tangent'");
  }
  spec.length = r.positive("length");
  spec.steps = steps_or_default(r, spec.length);
  spec.renormalize = r.boolean("renormalize", false);
  spec.svg = parse_svg(r);
  if (spec.svg.width_by_rho && !planar) throw ConfigError("'svg.width_by_rho' needs a planar system");
  require_positive_on_grid(spec.profile, 0.0, spec.length, spec.steps, "profile");
  return spec;
}

PendulumSpec parse_pendulum(Reader& r) {
  PendulumSpec spec;
  spec.q = r.number("q", 1.0);
  spec.profile = parse_profile(r.raw("profile"), "profile");
  spec.theta0 = r.number("theta0", 0.0);
  spec.dtheta0 = r.number("dtheta0", 0.0);
  spec.length = r.positive("length");
  spec.steps = steps_or_default(r, spec.length);
  if (r.has("variable_length")) {
    Reader v = r.object("variable_length");
    spec.g = v.number("g");
    spec.rod_length = parse_profile(v.raw("profile"), v.at("profile"));
    v.finish();
    require_positive_on_grid(*spec.rod_length, 0.0, spec.length, spec.steps, "variable_length.profile");
  }
  spec.svg = parse_svg(r);
  require_positive_on_grid(spec.profile, 0.0, spec.length, spec.steps, "profile");
  return spec;
}

CheckSpec parse_check(Reader& r, const std::filesystem::path& base) {
  CheckSpec spec;
  spec.curve_csv = base / r.string("curve_csv");
  spec.profile = parse_profile(r.raw("profile"), "profile");
  spec.a = r.vec("a", Vec3::Zero(), true);
  spec.b = r.vec("b", Vec3::Zero());
  if (r.has("mu")) spec.mu = r.number("mu");
  if (r.has("c")) spec.c = r.number("c");
  return spec;
}

int theta_index(const std::string& name, const std::string& key) {
  static const char* const names[] = {"a1", "a2", "a3", "b1", "b2", "b3", "L", "xi"};
  for (int k = 0; k < kThetaSize; ++k) {
    if (name == names[k]) return k;
  }
  throw ConfigError("'" + key + "' lists unknown parameter \"" + name + "\" (expected a, b, a1..a3, b1..b3, L, xi)");
}

CloseSpec parse_close(Reader& r) {
  CloseSpec spec;
  ClosureProblem& p = spec.problem;
  p.profile = parse_profile(r.raw("profile"), "profile");
  p.a = r.vec("a", Vec3::Zero());
  p.b = r.vec("b", Vec3::Zero());
  p.length = r.positive("length");
  p.shift = r.number("shift", 0.0);
  if (r.has("start")) {
    Reader s = r.object("start");
    p.start_position = s.vec("position", Vec3::Zero());
    p.start_tangent = unit(s.vec("tangent", Vec3::UnitX()), s.at("tangent"));
    s.finish();
  }
  const Json& free = r.raw("free");
  if (!free.is_array()) throw ConfigError("'free' must be an array of parameter names");
  for (const auto& item : free) {
    if (!item.is_string()) throw ConfigError("'free' entries must be strings");
    const std::string name = item.get<std::string>();
    if (name == "a" || name == "b") {
      const int base = name == "a" ? kA1 : kB1;
      for (int k = 0; k < 3; ++k) p.free[static_cast<std::size_t>(base + k)] = true;
    } else {
      p.free[static_cast<std::size_t>(theta_index(name, "free"))] = true;
    }
  }
  if (p.free_count() == 0) throw ConfigError("'free' must name at least one parameter");
  if (r.has("weights")) {
    Reader w = r.object("weights");
    p.w_pos = w.number("position", 1.0);
    p.w_tan = w.number("tangent", 1.0);
    p.w_hol = w.number("holonomy", 0.0);
    if (p.w_pos < 0.0 || p.w_tan < 0.0 || p.w_hol < 0.0) throw ConfigError("'weights' entries must be non-negative");
    w.finish();
  }
  p.steps = r.has("steps") ? r.count("steps", 2) : 2000;
  if (r.has("periodic_k")) {
    const std::size_t k = r.count("periodic_k", 1);
    if (p.profile.kind() != ProfileKind::Sinusoidal) throw ConfigError("'periodic_k' needs a sinusoidal profile");
    p.periodic_k = static_cast<int>(k);
  }
  if (r.has("optimizer")) {
    Reader o = r.object("optimizer");
    p.max_iter = o.has("max_iter") ? static_cast<int>(o.count("max_iter", 1)) : 200;
    p.tol = o.positive("tol", 1e-8);
    p.step_tol = o.positive("step_tol", 1e-12);
    p.lambda0 = o.positive("lambda0", 1e-3);
    p.fd_rel_step = o.positive("fd_step", 1e-6);
    p.fd_abs_step = o.positive("fd_floor", 1e-8);
    p.drift_limit = o.positive("drift_limit", 1e-3);
    o.finish();
  }
  require_positive_on_grid(closure_profile(p, p.initial_theta()), 0.0, p.length, p.steps, "profile");
  return spec;
}

VortexSpec parse_vortex(Reader& r, const std::filesystem::path& base) {
  VortexSpec spec;
  spec.curve_csv = base / r.string("curve_csv");
  StiffnessProfile profile = parse_profile(r.raw("profile"), "profile");
  double c2 = 0.0;
  double a0 = 1e-2;
  double a1 = 1e-4;
  if (r.has("vortex")) {
    Reader v = r.object("vortex");
    c2 = v.number("c2", 0.0);
    a0 = v.positive("a0", a0);
    a1 = v.positive("a1", a1);
    v.finish();
  }
  spec.vortex = VortexConfig::make(std::move(profile), c2, a0, a1);
  if (r.has("a")) spec.a = r.vec("a");
  if (r.has("b")) spec.b = r.vec("b");
  return spec;
}

ExportSpec parse_export(Reader& r, const std::filesystem::path& base) {
  ExportSpec spec;
  spec.curve_csv = base / r.string("curve_csv");
  if (r.has("profile")) spec.profile = parse_profile(r.raw("profile"), "profile");
  spec.svg = parse_svg(r);
  if (spec.svg.width_by_rho && !spec.profile) throw ConfigError("'svg.width_by_rho' needs 'profile'");
  return spec;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"integrate", "pendulum", "check", "close", "vortex", "export"};
  return names;
}

Json parse_json_strict(const std::string& text) {
  std::vector<std::set<std::string>> keys;
  std::string duplicate;
  Json::parser_callback_t cb = [&](int, Json::parse_event_t event, Json& parsed) {
    switch (event) {
      case Json::parse_event_t::object_start:
        keys.emplace_back();
        break;
      case Json::parse_event_t::object_end:
        keys.pop_back();
        break;
      case Json::parse_event_t::key: {
        const std::string k = parsed.get<std::string>();
        if (!keys.back().insert(k).second && duplicate.empty()) duplicate = k;
        break;
      }
      default:
        break;
    }
    return true;
  };
  Json doc;
  try {
    doc = Json::parse(text, cb, true, false);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!duplicate.empty()) throw ConfigError("duplicate key '" + duplicate + "' in config");
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  return doc;
}

void apply_override(Json& document, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("--set expects key=value, got '" + assignment + "'");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    value = text;
  }
  // "b[2]" is accepted as a spelling of "b.2".
  std::string dotted;
  for (char ch : key) {
    if (ch == '[') {
      dotted += '.';
    } else if (ch != ']') {
      dotted += ch;
    }
  }
  Json* node = &document;
  std::istringstream parts(dotted);
  std::string part;
  std::vector<std::string> segments;
  while (std::getline(parts, part, '.')) segments.push_back(part);
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const std::string& seg = segments[i];
    if (seg.empty()) throw ConfigError("--set key '" + key + "' has an empty segment");
    const bool last = i + 1 == segments.size();
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(seg);
      } catch (const std::exception&) {
        throw ConfigError("--set key '" + key + "': '" + seg + "' is not an array index");
      }
      if (idx >= node->size()) throw ConfigError("--set key '" + key + "': index " + seg + " is out of range");
      node = &(*node)[idx];
    } else {
      if (!node->is_object()) throw ConfigError("--set key '" + key + "' descends into a non-object value");
      if (!last && !node->contains(seg)) (*node)[seg] = Json::object();
      node = &(*node)[seg];
    }
    if (last) *node = value;
  }
}

StiffnessProfile parse_profile(const Json& node, const std::string& path) {
  Reader r(node, path);
  const std::string kind = r.string("kind");
  StiffnessProfile p = StiffnessProfile::constant(1.0);
  if (kind == "constant") {
    p = StiffnessProfile::constant(r.number("c"));
  } else if (kind == "sinusoidal") {
    const double amp = r.number("A");
    const double c = r.number("c");
    const double xi = r.number("xi", 0.0);
    const double f = r.number("frequency", 1.0);
    p = StiffnessProfile::sinusoidal(amp, c, xi, f);
  } else if (kind == "gaussian") {
    const double amp = r.number("A");
    const double c = r.number("c");
    const double sigma = r.positive("sigma");
    const double xi = r.number("xi", 0.0);
    p = StiffnessProfile::gaussian_bump(amp, c, sigma, xi);
  } else if (kind == "sum") {
    const Json& terms = r.raw("terms");
    if (!terms.is_array() || terms.empty()) throw ConfigError("'" + r.at("terms") + "' must be a non-empty array");
    std::vector<StiffnessProfile> children;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      children.push_back(parse_profile(terms[i], r.at("terms") + "[" + std::to_string(i) + "]"));
    }
    p = StiffnessProfile::sum(std::move(children));
  } else {
    throw ConfigError("'" + r.at("kind") + "' must be one of constant, sinusoidal, gaussian, sum; got \"" + kind +
                      "\"");
  }
  r.finish();
  return p;
}

Json profile_to_json(const StiffnessProfile& profile) {
  Json j;
  switch (profile.kind()) {
    case ProfileKind::Constant:
      j["kind"] = "constant";
      j["c"] = profile.offset();
      break;
    case ProfileKind::Sinusoidal:
      j["kind"] = "sinusoidal";
      j["A"] = profile.amplitude();
      j["c"] = profile.offset();
      j["xi"] = profile.shift();
      if (profile.frequency() != 1.0) j["frequency"] = profile.frequency();
      break;
    case ProfileKind::GaussianBump:
      j["kind"] = "gaussian";
      j["A"] = profile.amplitude();
      j["c"] = profile.offset();
      j["sigma"] = profile.width();
      j["xi"] = profile.shift();
      break;
    case ProfileKind::Sum:
      j["kind"] = "sum";
      j["terms"] = Json::array();
      for (const auto& child : profile.children()) j["terms"].push_back(profile_to_json(child));
      break;
  }
  return j;
}

RunConfig build_config(Json document, const std::string& command, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  cfg.base_dir = base_dir;
  std::string cmd = command;
  if (document.contains("command")) {
    if (!document["command"].is_string()) throw ConfigError("'command' must be a string");
    const std::string in_file = document["command"].get<std::string>();
    if (!cmd.empty() && cmd != in_file) {
      throw ConfigError("'command' in the config is \"" + in_file + "\" but the command line asks for \"" + cmd + "\"");
    }
    cmd = in_file;
  }
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), cmd) == names.end()) {
    throw ConfigError("'command' must be one of integrate, pendulum, check, close, vortex, export; got \"" + cmd +
                      "\"");
  }
  cfg.command = cmd;
  Reader r(document, "");
  if (r.has("command")) r.string("command");
  if (cmd == "integrate") {
    cfg.spec = parse_integrate(r);
  } else if (cmd == "pendulum") {
    cfg.spec = parse_pendulum(r);
  } else if (cmd == "check") {
    cfg.spec = parse_check(r, base_dir);
  } else if (cmd == "close") {
    cfg.spec = parse_close(r);
  } else if (cmd == "vortex") {
    cfg.spec = parse_vortex(r, base_dir);
  } else {
    cfg.spec = parse_export(r, base_dir);
  }
  r.finish();
  cfg.document = std::move(document);
  return cfg;
}

RunConfig parse_config(const std::string& text, const std::string& command, const std::vector<std::string>& overrides,
                       const std::filesystem::path& base_dir) {
  Json doc = parse_json_strict(text);
  for (const auto& o : overrides) apply_override(doc, o);
  return build_config(std::move(doc), command, base_dir);
}

}  // namespace varistiff
