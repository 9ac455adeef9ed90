#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "rym/config.hpp"
#include "rym/errors.hpp"
#include "rym/experiment.hpp"
#include "rym/output.hpp"

using namespace rym;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> cells(const std::string& line) {
  std::vector<std::string> out;
  std::string c;
  std::istringstream in(line);
  while (std::getline(in, c, ',')) out.push_back(c);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Fresh scratch directory, removed on scope exit.
struct ScratchDir {
  fs::path path;
  explicit ScratchDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("rym_test_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~ScratchDir() { fs::remove_all(path); }
};

// Points RYM_OUT_DIR somewhere for one scope.
struct OutDir {
  explicit OutDir(const fs::path& p) { ::setenv("RYM_OUT_DIR", p.c_str(), 1); }
  ~OutDir() { ::unsetenv("RYM_OUT_DIR"); }
};

std::string message_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const char* kTorusRun = R"({
  "name": "torus_short",
  "surface": {"kind": "torus", "resolution": 16},
  "bundle": {"k": 1, "c1": [1], "h0": [1.0], "lambda": 1},
  "initial": {"u": {"type": "cos_mode", "a": 0.3}, "f": {"type": "cos_mode", "a": 0.1, "axis": "y"}},
  "control": {"scheme": "rk4", "t_end": 0.2, "stride": 0.05}
})";

int run_cli(const std::string& args) {
  const char* cli = std::getenv("RYM_CLI");
  REQUIRE(cli != nullptr);
  const int status = std::system((std::string(cli) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("cli_io") {
  TEST_CASE("defaults and canonical echo round-trip") {
    const RunConfig d = parse_config("{}");
    CHECK(d.surface.kind == SurfaceChoice::torus);
    CHECK(d.surface.resolution == 32);
    CHECK(d.bundle.k == 1);
    CHECK(d.bundle.lambda == 0);
    CHECK(d.control.scheme == Scheme::rk4);
    const std::string e1 = echo(parse_config(kTorusRun));
    const std::string e2 = echo(parse_config(e1));
    CHECK(e1 == e2);
    for (const auto& name : preset_names()) CHECK(echo(parse_config(echo(preset(name)))) == echo(preset(name)));
  }

  TEST_CASE("invalid configs name the offending key") {
    CHECK(message_of(R"({"bundle": {"lambda": 2}})").find("bundle.lambda") != std::string::npos);
    const std::string spd = message_of(R"({"bundle": {"k": 2, "c1": [0, 0], "h0": [1, 2, 2, 1]}})");
    CHECK(spd.find("bundle.h0") != std::string::npos);
    CHECK(spd.find("eigenvalue") != std::string::npos);
    CHECK(message_of(R"({"surface": {"kind": "torus", "resolutoin": 16}})").find("surface.resolutoin") !=
          std::string::npos);
    CHECK(message_of(R"({"surface": {"kind": "sphere"}, "initial": {"u": {"type": "cos_mode"}}})")
              .find("initial.u") != std::string::npos);
    CHECK(message_of(R"({"surface": {"kind": "torus", "resolution": 15}})") != "");
    CHECK(message_of(R"({"bundle": {"lambda": -1}, "control": {"scheme": "imex"}})")
              .find("control.scheme") != std::string::npos);
    CHECK(message_of(R"({"name": "../escape"})").find("name") != std::string::npos);
  }

  TEST_CASE("malformed JSON reports the line") {
    const std::string msg = message_of("{\n  \"name\": \"x\",\n  \"surface\": {\n}}}\n");
    CHECK(msg.find("malformed JSON") != std::string::npos);
    CHECK(msg.find("line 4") != std::string::npos);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
  }

  TEST_CASE("doubles round-trip through 17 significant digits") {
    for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, std::nextafter(1.0, 2.0)})
      CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
    CHECK(format_double(NAN) == "");
    CHECK(json_number(INFINITY).is_null());
    CHECK(hex64(255) == "00000000000000ff");
  }

  TEST_CASE("torus run writes the documented files") {
    ScratchDir scratch("torus");
    OutDir env(scratch.path);
    const RunConfig cfg = parse_config(kTorusRun);
    const ExperimentResult res = run_experiment(cfg);
    CHECK(res.exit_code == kExitOk);
    CHECK(res.out_dir == scratch.path / "torus_short");

    const auto ts = lines(slurp(res.out_dir / "timeseries.csv"));
    REQUIRE(ts.size() > 3);
    CHECK(ts[0] == kTimeseriesHeader);
    double prev = -1.0;
    for (std::size_t i = 1; i < ts.size(); ++i) {
      const auto c = cells(ts[i]);
      REQUIRE(c.size() == 12);
      const double t = std::stod(c[0]);
      CHECK(t > prev);
      prev = t;
      // Center of mass is only defined on the sphere.
      CHECK(c[9].empty());
      CHECK(c[11].empty());
    }

    const fs::path snap0 = res.out_dir / "snapshots" / "snapshot_000000.csv";
    const auto sn = lines(slurp(snap0));
    REQUIRE(sn.size() == 16 * 16 + 1);
    CHECK(sn[0] == "vertex,x,y,z,u,f_1");

    const auto meta = nlohmann::json::parse(slurp(res.out_dir / "meta.json"));
    CHECK(meta["termination"] == "reached_t_end");
    CHECK(meta["exit_code"] == 0);
    CHECK(meta["config"]["name"] == "torus_short");
    CHECK(meta["mesh"]["hash"].get<std::string>().size() == 16);
    CHECK(fs::exists(res.out_dir / "verdict.json"));
    CHECK_FALSE(fs::exists(res.out_dir / "singular_time.json"));
  }

  TEST_CASE("constant initial data gives a constant u column") {
    ScratchDir scratch("const");
    OutDir env(scratch.path);
    RunConfig cfg = parse_config(R"({"name": "flat", "surface": {"kind": "torus", "resolution": 8},
      "initial": {"u": {"type": "constant", "a": 0.25}}, "control": {"t_end": 0.01, "stride": 0.01}})");
    const ExperimentResult res = run_experiment(cfg);
    REQUIRE(res.exit_code == kExitOk);
    const auto sn = lines(slurp(res.out_dir / "snapshots" / "snapshot_000000.csv"));
    for (std::size_t i = 1; i < sn.size(); ++i) CHECK(cells(sn[i])[4] == format_double(0.25));
  }

  TEST_CASE("output is deterministic across runs") {
    ScratchDir a("det_a"), b("det_b");
    const RunConfig cfg = parse_config(kTorusRun);
    fs::path da, db;
    {
      OutDir env(a.path);
      da = run_experiment(cfg).out_dir;
    }
    {
      OutDir env(b.path);
      db = run_experiment(cfg).out_dir;
    }
    for (const char* f : {"timeseries.csv", "meta.json", "verdict.json", "snapshots/snapshot_000004.csv"})
      CHECK(slurp(da / f) == slurp(db / f));
  }

  TEST_CASE("homogeneous runs: convergence exits 0, collapse exits 2") {
    ScratchDir scratch("homog");
    OutDir env(scratch.path);
    const ExperimentResult ok = run_experiment(preset("case1"));
    CHECK(ok.exit_code == kExitOk);
    CHECK(ok.audits_pass);

    const RunConfig collapse = parse_config(R"({"name": "collapse",
      "surface": {"kind": "homogeneous", "R_sigma": 1, "area": 25.132741228718345},
      "initial": {"u": {"type": "constant", "a": 0}}, "control": {"t_end": 2, "stride": 0.5, "dt": 1e-4}})");
    const ExperimentResult sing = run_experiment(collapse);
    CHECK(sing.exit_code == kExitSingularity);
    const auto st = nlohmann::json::parse(slurp(sing.out_dir / "singular_time.json"));
    CHECK(std::abs(st["singular_time_estimate"].get<double>() - 1.0) <= 1e-2);
  }

  TEST_CASE("field files are read one value per vertex") {
    ScratchDir scratch("file");
    const MeshSurface mesh = build_torus_mesh(8);
    {
      std::ofstream out(scratch.path / "u.txt");
      for (std::size_t i = 0; i < mesh.num_vertices(); ++i) out << 0.01 * double(i) << "\n";
    }
    FieldExpr e;
    e.type = FieldExpr::Type::file;
    e.path = (scratch.path / "u.txt").string();
    const ScalarField u = evaluate_field(e, mesh);
    CHECK(u[10] == doctest::Approx(0.1));
    e.path = (scratch.path / "missing.txt").string();
    CHECK_THROWS_AS(evaluate_field(e, mesh), ConfigError);
  }

  TEST_CASE("CLI exit codes") {
    ScratchDir scratch("cli");
    {
      std::ofstream(scratch.path / "bad.json") << R"({"bundle": {"lambda": 2}})";
      std::ofstream(scratch.path / "good.json") << kTorusRun;
    }
    ::setenv("RYM_OUT_DIR", (scratch.path / "out").c_str(), 1);
    CHECK(run_cli("run " + (scratch.path / "bad.json").string()) == 4);
    CHECK(run_cli("run " + (scratch.path / "missing.json").string()) == 4);
    CHECK(run_cli("preset case9") == 4);
    CHECK(run_cli("frobnicate") == 4);
    CHECK(run_cli("run " + (scratch.path / "good.json").string()) == 0);
    CHECK(fs::exists(scratch.path / "out" / "torus_short" / "meta.json"));
    CHECK(run_cli("preset case1") == 0);
    CHECK(run_cli("sweep " + scratch.path.string()) == 4);  // bad.json fails the whole sweep
    ::unsetenv("RYM_OUT_DIR");
  }
}
