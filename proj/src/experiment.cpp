#include "rym/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "rym/diagnostics.hpp"
#include "rym/errors.hpp"
#include "rym/output.hpp"

namespace rym {

using nlohmann::ordered_json;

std::filesystem::path output_root(const RunConfig& cfg) {
  const char* env = std::getenv("RYM_OUT_DIR");
  if (env && *env) return std::filesystem::path(env);
  return std::filesystem::path(cfg.outputs.dir);
}

ScalarField evaluate_field(const FieldExpr& expr, const MeshSurface& mesh) {
  const std::size_t n = mesh.num_vertices();
  ScalarField out(n);
  switch (expr.type) {
    case FieldExpr::Type::constant:
      for (auto& v : out) v = expr.a;
      break;
    case FieldExpr::Type::cos_mode: {
      if (mesh.kind != SurfaceKind::torus) throw ConfigError("cos_mode needs a torus");
      const int c = expr.axis == 'y' ? 1 : 0;
      for (std::size_t i = 0; i < n; ++i) out[i] = expr.a * std::cos(mesh.positions[i][c]);
      break;
    }
    case FieldExpr::Type::z_mode: {
      if (mesh.kind != SurfaceKind::sphere) throw ConfigError("z_mode needs a sphere");
      for (std::size_t i = 0; i < n; ++i)
        out[i] = expr.a * mesh.positions[i][2] / std::numbers::sqrt2;
      break;
    }
    case FieldExpr::Type::file: {
      std::ifstream in(expr.path);
      if (!in) throw ConfigError("cannot read field file " + expr.path);
      std::string line;
      std::size_t count = 0;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (count == n) throw ConfigError(expr.path + ": more values than vertices");
        char* end = nullptr;
        const double v = std::strtod(line.c_str(), &end);
        if (end == line.c_str() || !std::isfinite(v))
          throw ConfigError(expr.path + ": line " + std::to_string(count + 1) + " is not a number");
        out[count++] = v;
      }
      if (count != n)
        throw ConfigError(expr.path + ": expected " + std::to_string(n) + " values, found " +
                          std::to_string(count));
      break;
    }
  }
  return out;
}

namespace {

struct Audit {
  CaseVerdict verdict;
  std::vector<Check> checks;  ///< gated checks beyond the case inequalities
  bool pass = true;
};

CaseId pick_case(int chi, bool trivial) {
  if (chi < 0) return CaseId::chi_neg;
  if (chi == 0) return CaseId::chi_zero;
  return trivial ? CaseId::chi_pos_trivial : CaseId::chi_pos_nontrivial;
}

Audit audit(const std::vector<DiagnosticsRecord>& records, const TrajectoryInfo& info,
            Tolerance tol) {
  Audit a;
  a.verdict = audit_estimates(records, info, pick_case(info.chi, info.trivial_bundle), tol);
  if (info.lambda >= 0) a.checks.push_back(check_liouville_monotone(records, 1e-6));
  a.checks.push_back(check_volume_identity(records, 1e-3));
  a.checks.push_back(check_chern_constancy(records, info.c1, 1e-8));
  a.pass = a.verdict.pass;
  for (const auto& c : a.checks) a.pass = a.pass && c.passed;
  return a;
}

ordered_json audit_json(const Audit& a) {
  ordered_json j;
  j["pass"] = a.pass;
  j["case"] = to_json(a.verdict);
  ordered_json checks = ordered_json::array();
  for (const auto& c : a.checks) checks.push_back(to_json(c));
  j["checks"] = checks;
  return j;
}

ordered_json mesh_json(const MeshSurface& mesh) {
  ordered_json j;
  j["kind"] = to_string(mesh.kind);
  j["resolution"] = mesh.resolution;
  j["vertices"] = mesh.num_vertices();
  j["triangles"] = mesh.num_triangles();
  j["edges"] = mesh.edges.size();
  j["area"] = mesh.area;
  j["R_sigma"] = mesh.R_sigma;
  j["chi"] = mesh.chi;
  j["hash"] = hex64(mesh.hash);
  return j;
}

std::string snapshot_name(std::size_t index) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "snapshot_%06zu.csv", index);
  return buf;
}

int exit_code_for(bool audits_pass, Termination term) {
  if (!audits_pass) return kExitAuditViolation;
  if (term == Termination::numerical_failure) return kExitNumericalFailure;
  if (term == Termination::singularity) return kExitSingularity;
  return kExitOk;
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& cfg) {
  ExperimentResult res;
  res.out_dir = output_root(cfg) / cfg.name;
  const auto& dir = res.out_dir;

  ordered_json meta;
  meta["format_version"] = 1;
  meta["config"] = to_json(cfg);
  ordered_json verdict;
  std::vector<std::string> files;
  Termination term = Termination::reached_t_end;

  if (cfg.surface.kind == SurfaceChoice::homogeneous) {
    const double R = cfg.surface.R_sigma;
    const double A = cfg.surface.area;
    const HomogeneousRun run =
        run_homogeneous(cfg.bundle, R, A, cfg.initial_u.a, cfg.control.t_end, cfg.control.dt);
    const auto records = homogeneous_records(run, cfg.bundle, R, A);
    const TrajectoryInfo info = describe(run, cfg.bundle, R, A);
    const Audit a = audit(records, info, kOdeTolerance);
    term = run.singular ? Termination::singularity : Termination::reached_t_end;
    res.message = run.message;

    write_timeseries(dir / "timeseries.csv", records);
    files.push_back("timeseries.csv");
    verdict["audit"] = audit_json(a);
    if (run.singular) {
      const SingularityReport sr = singularity_probe(records, true);
      verdict["singularity"] = to_json(sr);
      write_text(dir / "singular_time.json", to_json(sr).dump(2) + "\n");
      files.push_back("singular_time.json");
    } else {
      verdict["convergence"] = to_json(convergence_probe(run, A));
    }
    res.audits_pass = a.pass;
    meta["mesh"] = {{"kind", "homogeneous"}, {"R_sigma", R}, {"area", A}};
    meta["steps"] = run.t.size() - 1;
    meta["final_time"] = run.t.back();
  } else {
    auto mesh = std::make_shared<const MeshSurface>(cfg.surface.kind == SurfaceChoice::torus
                                                        ? build_torus_mesh(cfg.surface.resolution)
                                                        : build_sphere_mesh(cfg.surface.resolution));
    const ScalarField u0 = evaluate_field(cfg.initial_u, *mesh);
    const ScalarField f0 = evaluate_field(cfg.initial_f, *mesh);
    TkField f(std::vector<ScalarField>(cfg.bundle.k, f0));
    const FlowState initial = make_state(mesh, cfg.bundle, u0, std::move(f));
    const Trajectory traj =
        run_flow(initial, cfg.step_control(), cfg.control.t_end, cfg.control.stride);
    const TrajectoryInfo info = describe(traj);
    const Audit a = audit(traj.records, info, kPdeTolerance);
    term = traj.termination;
    res.message = traj.message;

    write_timeseries(dir / "timeseries.csv", traj.records);
    files.push_back("timeseries.csv");
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
      const bool last = s + 1 == traj.snapshots.size();
      if (s % std::size_t(cfg.outputs.snapshot_stride) != 0 && !last) continue;
      const std::string name = "snapshots/" + snapshot_name(s);
      write_snapshot(dir / name, traj.snapshots[s]);
      files.push_back(name);
    }
    if (traj.last_valid) {
      write_snapshot(dir / "snapshots/last_valid.csv", *traj.last_valid);
      files.push_back("snapshots/last_valid.csv");
    }

    verdict["audit"] = audit_json(a);
    if (traj.termination == Termination::singularity) {
      const SingularityReport sr = singularity_probe(traj);
      ordered_json sj = to_json(sr);
      sj["area_over_8pi"] = traj.records.front().volume / (8.0 * std::numbers::pi);
      verdict["singularity"] = sj;
      write_text(dir / "singular_time.json", sj.dump(2) + "\n");
      files.push_back("singular_time.json");
    } else if (traj.termination == Termination::reached_t_end) {
      verdict["convergence"] = to_json(convergence_probe(traj.snapshots.back()));
    }
    res.audits_pass = a.pass;
    meta["mesh"] = mesh_json(*mesh);
    meta["steps"] = traj.steps;
    meta["final_time"] = traj.records.back().t;
  }

  res.termination = to_string(term);
  res.exit_code = exit_code_for(res.audits_pass, term);
  verdict["exit_code"] = res.exit_code;
  write_text(dir / "verdict.json", verdict.dump(2) + "\n");
  files.push_back("verdict.json");

  meta["termination"] = res.termination;
  meta["message"] = res.message;
  meta["exit_code"] = res.exit_code;
  meta["files"] = files;
  write_text(dir / "meta.json", meta.dump(2) + "\n");
  return res;
}

std::vector<std::string> preset_names() { return {"case1", "case2", "case3", "case4"}; }

RunConfig preset(const std::string& name) {
  RunConfig c;
  c.name = name;
  if (name == "case1") {
    // chi = -1 surface (area 4 pi), c1 = 2 so that zeta = 1.
    c.surface.kind = SurfaceChoice::homogeneous;
    c.surface.R_sigma = -1.0;
    c.surface.area = 4.0 * std::numbers::pi;
    c.bundle.c1 = {2};
    c.bundle.lambda = 1;
    c.initial_u = {FieldExpr::Type::constant, -1.0, 'x', ""};
    c.control.t_end = 20.0;
    c.control.stride = 1.0;
    c.control.dt = 1e-3;
  } else if (name == "case2") {
    c.surface.kind = SurfaceChoice::torus;
    c.surface.resolution = 64;
    c.bundle.c1 = {1};
    c.bundle.lambda = 1;
    c.initial_u = {FieldExpr::Type::cos_mode, 0.5, 'x', ""};
    c.control.scheme = Scheme::imex;
    c.control.dt_max = 0.05;
    c.control.t_end = 10.0;
    c.control.stride = 1.0;
  } else if (name == "case3") {
    c.surface.kind = SurfaceChoice::sphere;
    c.surface.resolution = 4;
    c.initial_u = {FieldExpr::Type::z_mode, 0.2, 'x', ""};
    c.initial_f = {FieldExpr::Type::z_mode, 0.1, 'x', ""};
    c.control.scheme = Scheme::rk4;
    c.control.t_end = 2.0;
    c.control.stride = 0.05;
  } else if (name == "case4") {
    c.surface.kind = SurfaceChoice::sphere;
    c.surface.resolution = 4;
    c.bundle.c1 = {1};
    c.initial_u = {FieldExpr::Type::z_mode, 0.3, 'x', ""};
    c.initial_f = {FieldExpr::Type::z_mode, 0.1, 'x', ""};
    c.control.scheme = Scheme::imex;
    c.control.dt_max = 0.05;
    c.control.t_end = 200.0;
    c.control.stride = 1.0;
    c.outputs.snapshot_stride = 10;
  } else {
    throw ConfigError("unknown preset " + name + " (expected case1, case2, case3 or case4)");
  }
  return c;
}

}  // namespace rym
