// rym: command-line driver for Ricci-Yang-Mills flow runs.
//
//   rym run <config.json>
//   rym sweep <dir>          every *.json in dir, concurrently
//   rym verify               acceptance suite
//   rym preset case1|case2|case3|case4
//
// RYM_OUT_DIR overrides the output root. Exit codes: 0 ok, 1 numerical failure,
// 2 singularity, 3 audit violation, 4 config error.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rym/acceptance.hpp"
#include "rym/errors.hpp"
#include "rym/experiment.hpp"

namespace {

using namespace rym;

void report(const RunConfig& cfg, const ExperimentResult& r) {
  std::cout << cfg.name << ": " << r.termination << ", exit " << r.exit_code << ", audits "
            << (r.audits_pass ? "pass" : "FAIL") << ", output " << r.out_dir.string();
  if (!r.message.empty()) std::cout << " (" << r.message << ")";
  std::cout << std::endl;
}

int run_one(const RunConfig& cfg) {
  const ExperimentResult r = run_experiment(cfg);
  report(cfg, r);
  return r.exit_code;
}

// Most severe first: config, audit, numerical failure, singularity, ok.
int combine(int a, int b) {
  static const int rank[] = {0, 2, 1, 3, 4};  // indexed by exit code
  return rank[a] >= rank[b] ? a : b;
}

int sweep(const std::string& dir) {
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (const auto& e : std::filesystem::directory_iterator(dir, ec))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  if (ec) throw ConfigError("cannot list " + dir + ": " + ec.message());
  if (files.empty()) throw ConfigError("no .json configs in " + dir);
  std::sort(files.begin(), files.end());

  std::vector<RunConfig> configs;
  std::set<std::string> names;
  for (const auto& f : files) {
    try {
      configs.push_back(load_config(f.string()));
    } catch (const ConfigError& e) {
      throw ConfigError(f.string() + ": " + e.what());
    }
    if (!names.insert(configs.back().name).second)
      throw ConfigError(f.string() + ": duplicate run name " + configs.back().name);
  }

  std::vector<ExperimentResult> results(configs.size());
  std::vector<std::string> errors(configs.size());
  const long count = static_cast<long>(configs.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    try {
      results[i] = run_experiment(configs[i]);
    } catch (const ConfigError& e) {
      results[i].exit_code = kExitConfigError;
      errors[i] = e.what();
    } catch (const std::exception& e) {
      results[i].exit_code = kExitNumericalFailure;
      errors[i] = e.what();
    }
  }

  int code = kExitOk;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (errors[i].empty()) report(configs[i], results[i]);
    else std::cerr << configs[i].name << ": " << errors[i] << std::endl;
    code = combine(code, results[i].exit_code);
  }
  return code;
}

int verify() {
  const auto results = run_acceptance(&std::cerr);
  int failed = 0;
  for (const auto& r : results) {
    std::cout << format_result(r) << std::endl;
    if (!r.passed) ++failed;
  }
  std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed"
            << std::endl;
  return failed ? kExitAuditViolation : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ricci-Yang-Mills flow on torus bundles over surfaces"};
  app.require_subcommand(1);

  std::string config_path, sweep_dir, preset_name;
  auto* run = app.add_subcommand("run", "run one JSON config");
  run->add_option("config", config_path, "config file")->required();
  auto* sw = app.add_subcommand("sweep", "run every *.json config in a directory");
  sw->add_option("dir", sweep_dir, "config directory")->required();
  auto* ver = app.add_subcommand("verify", "run the acceptance suite");
  auto* pre = app.add_subcommand("preset", "run a theorem-case scenario");
  pre->add_option("name", preset_name, "case1, case2, case3 or case4")
      ->required()
      ->check(CLI::IsMember(rym::preset_names()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : rym::kExitConfigError;
  }

  try {
    if (*run) return run_one(rym::load_config(config_path));
    if (*sw) return sweep(sweep_dir);
    if (*ver) return verify();
    if (*pre) return run_one(rym::preset(preset_name));
  } catch (const rym::ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return rym::kExitConfigError;
  } catch (const rym::DomainError& e) {
    std::cerr << "invalid input: " << e.what() << std::endl;
    return rym::kExitConfigError;
  } catch (const rym::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << std::endl;
    return rym::kExitNumericalFailure;
  }
  return rym::kExitConfigError;
}
