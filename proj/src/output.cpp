#include "rym/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "rym/errors.hpp"

namespace rym {

using nlohmann::ordered_json;

std::string format_double(double x) {
  if (std::isnan(x)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string timeseries_csv(const std::vector<DiagnosticsRecord>& records) {
  std::string out = kTimeseriesHeader;
  out += '\n';
  for (const auto& r : records) {
    const double cols[] = {r.t,       r.sup_u,         r.inf_u,    r.volume,
                           r.F_liouville, r.F_energy,  r.calabi,   r.sup_grad_f_sq,
                           r.diameter, r.center_of_mass[0], r.center_of_mass[1],
                           r.center_of_mass[2]};
    for (std::size_t c = 0; c < std::size(cols); ++c) {
      if (c) out += ',';
      out += format_double(cols[c]);
    }
    out += '\n';
  }
  return out;
}

std::string snapshot_csv(const FlowState& state) {
  const auto& mesh = *state.mesh;
  std::string out = "vertex,x,y,z,u";
  for (std::size_t I = 0; I < state.f.rank(); ++I) out += ",f_" + std::to_string(I + 1);
  out += '\n';
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
    out += std::to_string(i);
    for (double x : mesh.positions[i]) out += ',' + format_double(x);
    out += ',' + format_double(state.u[i]);
    for (const auto& comp : state.f) out += ',' + format_double(comp[i]);
    out += '\n';
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw ConfigError("cannot create directory " + path.parent_path().string());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("write failed for " + path.string());
}

void write_timeseries(const std::filesystem::path& path,
                      const std::vector<DiagnosticsRecord>& records) {
  write_text(path, timeseries_csv(records));
}

void write_snapshot(const std::filesystem::path& path, const FlowState& state) {
  write_text(path, snapshot_csv(state));
}

ordered_json json_number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

ordered_json to_json(const Check& check) {
  ordered_json j;
  j["name"] = check.name;
  j["passed"] = check.passed;
  j["margin"] = json_number(check.margin);
  j["worst_t"] = json_number(check.worst_t);
  return j;
}

ordered_json to_json(const CaseVerdict& verdict) {
  ordered_json j;
  j["case"] = to_string(verdict.case_id);
  j["pass"] = verdict.pass;
  j["tolerance"] = {{"abs", verdict.tolerance.abs}, {"rel", verdict.tolerance.rel}};
  ordered_json checks = ordered_json::array();
  for (const auto& c : verdict.checks) checks.push_back(to_json(c));
  j["checks"] = checks;
  ordered_json monitors = ordered_json::array();
  for (const auto& m : verdict.monitors)
    monitors.push_back({{"name", m.name}, {"value", json_number(m.value)}});
  j["monitors"] = monitors;
  return j;
}

ordered_json to_json(const ConvergenceReport& r) {
  ordered_json j;
  j["converged"] = r.converged;
  j["calabi"] = json_number(r.calabi);
  j["trace_variance"] = json_number(r.trace_variance);
  j["lambda1"] = json_number(r.lambda1);
  ordered_json l2 = ordered_json::array();
  for (double x : r.lambda2) l2.push_back(json_number(x));
  j["lambda2"] = l2;
  j["mean_exp_u"] = json_number(r.mean_exp_u);
  j["rel_var_exp_u"] = json_number(r.rel_var_exp_u);
  j["eps_calabi"] = r.eps_calabi;
  j["eps_trace"] = r.eps_trace;
  return j;
}

ordered_json to_json(const SingularityReport& r) {
  ordered_json j;
  j["singular_time_estimate"] = json_number(r.singular_time_estimate);
  j["area_slope"] = json_number(r.area_slope);
  j["last_time"] = json_number(r.last_time);
  return j;
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

}  // namespace rym
