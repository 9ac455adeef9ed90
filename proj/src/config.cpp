#include "rym/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "rym/errors.hpp"

namespace rym {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(SurfaceChoice kind) {
  switch (kind) {
    case SurfaceChoice::torus: return "torus";
    case SurfaceChoice::sphere: return "sphere";
    case SurfaceChoice::homogeneous: return "homogeneous";
  }
  return "unknown";
}

std::string to_string(FieldExpr::Type type) {
  switch (type) {
    case FieldExpr::Type::constant: return "constant";
    case FieldExpr::Type::cos_mode: return "cos_mode";
    case FieldExpr::Type::z_mode: return "z_mode";
    case FieldExpr::Type::file: return "file";
  }
  return "unknown";
}

StepControl RunConfig::step_control() const {
  StepControl c;
  c.scheme = control.scheme;
  c.cfl_factor = control.cfl;
  c.dt_max = control.dt_max;
  c.error_target = control.error_target;
  return c;
}

namespace {

/// Walks one JSON object, remembering which keys were consumed so that any
/// leftover key can be reported.
class Section {
 public:
  Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail(path_.empty() ? "top level" : path_, "must be an object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return obj_.at(key);
  }

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number()) fail(key_path(key), "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(key_path(key), "must be finite");
    return x;
  }

  long long integer(const std::string& key, long long fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (v.is_number_integer()) return v.get<long long>();
    if (v.is_number_float()) {
      const double x = v.get<double>();
      if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9e15) return (long long)x;
    }
    fail(key_path(key), "must be an integer");
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_string()) fail(key_path(key), "must be a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!seen_.count(it.key())) fail(key_path(it.key()), "unknown key");
  }

  [[noreturn]] static void fail(const std::string& key, const std::string& why) {
    throw ConfigError(key + ": " + why);
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

SurfaceConfig parse_surface(Section s) {
  SurfaceConfig out;
  const std::string kind = s.string("kind", "torus");
  if (kind == "torus") {
    out.kind = SurfaceChoice::torus;
    out.resolution = int(s.integer("resolution", 32));
    if (out.resolution < 8 || out.resolution % 2 != 0 || out.resolution > 1024)
      Section::fail(s.key_path("resolution"), "torus grid size must be even and in [8, 1024]");
  } else if (kind == "sphere") {
    out.kind = SurfaceChoice::sphere;
    out.resolution = int(s.integer("resolution", 4));
    if (out.resolution < 3 || out.resolution > 7)
      Section::fail(s.key_path("resolution"), "sphere subdivision must be in [3, 7]");
  } else if (kind == "homogeneous") {
    out.kind = SurfaceChoice::homogeneous;
    out.resolution = 0;
    if (!s.has("R_sigma") || !s.has("area"))
      Section::fail(s.key_path("kind"), "homogeneous surfaces need R_sigma and area");
    out.R_sigma = s.number("R_sigma", 0.0);
    out.area = s.number("area", 0.0);
    if (out.R_sigma != -1.0 && out.R_sigma != 0.0 && out.R_sigma != 1.0)
      Section::fail(s.key_path("R_sigma"), "must be -1, 0 or 1");
    if (!(out.area > 0.0)) Section::fail(s.key_path("area"), "must be positive");
    if (out.R_sigma != 0.0) {
      // Gauss-Bonnet: R A = 4 pi chi with chi an integer.
      const double chi = out.R_sigma * out.area / (4.0 * std::numbers::pi);
      if (std::abs(chi - std::round(chi)) > 1e-9 * std::max(1.0, std::abs(chi)))
        Section::fail(s.key_path("area"), "R_sigma * area must be 4 pi times an integer");
      if (out.R_sigma > 0.0 && std::round(chi) != 2.0)
        Section::fail(s.key_path("area"), "R_sigma = 1 needs area 8 pi (the sphere)");
    }
  } else {
    Section::fail(s.key_path("kind"), "must be torus, sphere or homogeneous");
  }
  s.finish();
  return out;
}

BundleSpec parse_bundle(Section s) {
  BundleSpec b;
  b.k = int(s.integer("k", 1));
  if (b.k < 1 || b.k > 16) Section::fail(s.key_path("k"), "must be in [1, 16]");
  b.c1.assign(b.k, 0);
  if (s.has("c1")) {
    const json& v = s.raw("c1");
    if (!v.is_array() || int(v.size()) != b.k)
      Section::fail(s.key_path("c1"), "must be an array of k integers");
    for (int i = 0; i < b.k; ++i) {
      if (!v[i].is_number_integer()) Section::fail(s.key_path("c1"), "entries must be integers");
      b.c1[i] = v[i].get<int>();
    }
  }
  b.h0 = Eigen::MatrixXd::Identity(b.k, b.k);
  if (s.has("h0")) {
    const json& v = s.raw("h0");
    if (!v.is_array() || int(v.size()) != b.k * b.k)
      Section::fail(s.key_path("h0"), "must be a row-major array of k*k numbers");
    for (int i = 0; i < b.k; ++i)
      for (int j = 0; j < b.k; ++j) {
        const json& e = v[i * b.k + j];
        if (!e.is_number()) Section::fail(s.key_path("h0"), "entries must be numbers");
        b.h0(i, j) = e.get<double>();
      }
  }
  const double lam = s.number("lambda", 0.0);
  if (lam != -1.0 && lam != 0.0 && lam != 1.0)
    Section::fail(s.key_path("lambda"), "must be -1, 0 or 1");
  b.lambda = int(lam);
  try {
    b.validate();
  } catch (const DomainError& e) {
    Section::fail(s.key_path("h0"), e.what());
  }
  s.finish();
  return b;
}

FieldExpr parse_field(Section s) {
  FieldExpr e;
  const std::string type = s.string("type", "constant");
  if (type == "constant") e.type = FieldExpr::Type::constant;
  else if (type == "cos_mode") e.type = FieldExpr::Type::cos_mode;
  else if (type == "z_mode") e.type = FieldExpr::Type::z_mode;
  else if (type == "file") e.type = FieldExpr::Type::file;
  else Section::fail(s.key_path("type"), "must be constant, cos_mode, z_mode or file");

  if (e.type == FieldExpr::Type::file) {
    e.path = s.string("path", "");
    if (e.path.empty()) Section::fail(s.key_path("path"), "file fields need a path");
  } else {
    e.a = s.number("a", 0.0);
  }
  if (e.type == FieldExpr::Type::cos_mode) {
    const std::string axis = s.string("axis", "x");
    if (axis != "x" && axis != "y") Section::fail(s.key_path("axis"), "must be x or y");
    e.axis = axis[0];
  }
  s.finish();
  return e;
}

void check_field_fits(const FieldExpr& e, SurfaceChoice kind, const std::string& key) {
  using T = FieldExpr::Type;
  if (kind == SurfaceChoice::homogeneous && e.type != T::constant)
    Section::fail(key, "homogeneous runs take constant initial data");
  if (kind == SurfaceChoice::sphere && e.type == T::cos_mode)
    Section::fail(key, "cos_mode is defined on the torus only");
  if (kind == SurfaceChoice::torus && e.type == T::z_mode)
    Section::fail(key, "z_mode is defined on the sphere only");
}

ControlConfig parse_control(Section s) {
  ControlConfig c;
  const std::string scheme = s.string("scheme", "rk4");
  if (scheme == "rk4") c.scheme = Scheme::rk4;
  else if (scheme == "imex") c.scheme = Scheme::imex;
  else Section::fail(s.key_path("scheme"), "must be rk4 or imex");
  c.cfl = s.number("cfl", c.cfl);
  if (!(c.cfl > 0.0 && c.cfl <= 1.0)) Section::fail(s.key_path("cfl"), "must be in (0, 1]");
  c.dt_max = s.number("dt_max", c.dt_max);
  if (!(c.dt_max > 1e-12)) Section::fail(s.key_path("dt_max"), "must exceed 1e-12");
  c.t_end = s.number("t_end", c.t_end);
  if (!(c.t_end > 0.0)) Section::fail(s.key_path("t_end"), "must be positive");
  c.stride = s.number("stride", c.stride);
  if (!(c.stride > 0.0 && c.stride <= c.t_end))
    Section::fail(s.key_path("stride"), "must be in (0, t_end]");
  if (c.t_end / c.stride > 1e6) Section::fail(s.key_path("stride"), "more than 1e6 snapshots");
  const long long seed = s.integer("seed", 0);
  if (seed < 0) Section::fail(s.key_path("seed"), "must be nonnegative");
  c.seed = std::uint64_t(seed);
  c.error_target = s.number("error_target", c.error_target);
  if (!(c.error_target > 0.0)) Section::fail(s.key_path("error_target"), "must be positive");
  c.dt = s.number("dt", c.dt);
  if (!(c.dt > 0.0 && c.dt <= c.t_end)) Section::fail(s.key_path("dt"), "must be in (0, t_end]");
  s.finish();
  return c;
}

OutputConfig parse_outputs(Section s) {
  OutputConfig o;
  o.dir = s.string("dir", o.dir);
  if (o.dir.empty()) Section::fail(s.key_path("dir"), "must not be empty");
  o.snapshot_stride = int(s.integer("snapshot_stride", o.snapshot_stride));
  if (o.snapshot_stride < 1) Section::fail(s.key_path("snapshot_stride"), "must be >= 1");
  s.finish();
  return o;
}

ordered_json field_json(const FieldExpr& e) {
  ordered_json j;
  j["type"] = to_string(e.type);
  if (e.type == FieldExpr::Type::file) {
    j["path"] = e.path;
  } else {
    j["a"] = e.a;
  }
  if (e.type == FieldExpr::Type::cos_mode) j["axis"] = std::string(1, e.axis);
  return j;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  Section top(doc, "");
  RunConfig cfg;
  cfg.name = top.string("name", cfg.name);
  if (cfg.name.empty() || cfg.name.find_first_of("/\\") != std::string::npos || cfg.name == "." ||
      cfg.name == "..")
    Section::fail("name", "must be a plain, non-empty directory name");
  if (top.has("surface")) cfg.surface = parse_surface(Section(top.raw("surface"), "surface"));
  if (top.has("bundle")) cfg.bundle = parse_bundle(Section(top.raw("bundle"), "bundle"));
  if (top.has("initial")) {
    Section init(top.raw("initial"), "initial");
    if (init.has("u")) cfg.initial_u = parse_field(Section(init.raw("u"), "initial.u"));
    if (init.has("f")) cfg.initial_f = parse_field(Section(init.raw("f"), "initial.f"));
    init.finish();
  }
  if (top.has("control")) cfg.control = parse_control(Section(top.raw("control"), "control"));
  if (top.has("outputs")) cfg.outputs = parse_outputs(Section(top.raw("outputs"), "outputs"));
  top.finish();

  check_field_fits(cfg.initial_u, cfg.surface.kind, "initial.u");
  check_field_fits(cfg.initial_f, cfg.surface.kind, "initial.f");
  if (cfg.surface.kind == SurfaceChoice::homogeneous && cfg.control.scheme != Scheme::rk4)
    Section::fail("control.scheme", "homogeneous runs use rk4");
  if (cfg.control.scheme == Scheme::imex && cfg.bundle.lambda < 0)
    Section::fail("control.scheme", "imex needs lambda >= 0");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

ordered_json to_json(const RunConfig& cfg) {
  ordered_json j;
  j["name"] = cfg.name;

  ordered_json s;
  s["kind"] = to_string(cfg.surface.kind);
  if (cfg.surface.kind == SurfaceChoice::homogeneous) {
    s["R_sigma"] = cfg.surface.R_sigma;
    s["area"] = cfg.surface.area;
  } else {
    s["resolution"] = cfg.surface.resolution;
  }
  j["surface"] = s;

  ordered_json b;
  b["k"] = cfg.bundle.k;
  b["c1"] = cfg.bundle.c1;
  std::vector<double> h;
  for (int i = 0; i < cfg.bundle.k; ++i)
    for (int k = 0; k < cfg.bundle.k; ++k) h.push_back(cfg.bundle.h0(i, k));
  b["h0"] = h;
  b["lambda"] = cfg.bundle.lambda;
  j["bundle"] = b;

  ordered_json init;
  init["u"] = field_json(cfg.initial_u);
  init["f"] = field_json(cfg.initial_f);
  j["initial"] = init;

  ordered_json c;
  c["scheme"] = to_string(cfg.control.scheme);
  c["cfl"] = cfg.control.cfl;
  c["dt_max"] = cfg.control.dt_max;
  c["t_end"] = cfg.control.t_end;
  c["stride"] = cfg.control.stride;
  c["seed"] = cfg.control.seed;
  c["error_target"] = cfg.control.error_target;
  c["dt"] = cfg.control.dt;
  j["control"] = c;

  ordered_json o;
  o["dir"] = cfg.outputs.dir;
  o["snapshot_stride"] = cfg.outputs.snapshot_stride;
  j["outputs"] = o;
  return j;
}

std::string echo(const RunConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

}  // namespace rym
