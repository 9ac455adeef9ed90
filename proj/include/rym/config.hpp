/// @file config.hpp
/// @brief JSON run configuration: schema, validation and canonical echo.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "rym/bundle.hpp"
#include "rym/flow.hpp"

namespace rym {

enum class SurfaceChoice { torus, sphere, homogeneous };

struct SurfaceConfig {
  SurfaceChoice kind = SurfaceChoice::torus;
  int resolution = 32;  ///< torus grid size or sphere subdivision level
  double R_sigma = 0.0;  ///< homogeneous only
  double area = 0.0;     ///< homogeneous only
};

/// An initial field: constant a, a cos(x) or a cos(y) on the torus, a z on the
/// unit-normalized sphere, or one value per line read from a file.
struct FieldExpr {
  enum class Type { constant, cos_mode, z_mode, file };
  Type type = Type::constant;
  double a = 0.0;
  char axis = 'x';
  std::string path;

  bool operator==(const FieldExpr&) const = default;
};

struct ControlConfig {
  Scheme scheme = Scheme::rk4;
  double cfl = 0.5;
  double dt_max = 1e-2;
  double t_end = 1.0;
  double stride = 0.1;
  std::uint64_t seed = 0;
  double error_target = 0.005;  ///< imex only
  double dt = 1e-3;             ///< homogeneous ODE step
};

struct OutputConfig {
  std::string dir = "rym_out";
  int snapshot_stride = 1;  ///< write every n-th stored snapshot
};

struct RunConfig {
  std::string name = "run";
  SurfaceConfig surface;
  BundleSpec bundle;
  FieldExpr initial_u;
  FieldExpr initial_f;  ///< applied to every component
  ControlConfig control;
  OutputConfig outputs;

  StepControl step_control() const;
};

/// Parses and validates. Unknown keys, wrong types and out-of-range values
/// throw ConfigError naming the offending key; malformed JSON reports the
/// line and column.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Every field, defaults included, in a fixed key order.
nlohmann::ordered_json to_json(const RunConfig& cfg);
std::string echo(const RunConfig& cfg);

std::string to_string(SurfaceChoice kind);
std::string to_string(FieldExpr::Type type);

}  // namespace rym
