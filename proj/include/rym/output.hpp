/// @file output.hpp
/// @brief CSV and JSON serialization of trajectories, snapshots and verdicts.
///
/// Floats are written with 17 significant digits so every double round-trips.
/// Absent values (NaN) are written as empty CSV cells and JSON null.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "rym/bundle.hpp"
#include "rym/diagnostics.hpp"
#include "rym/record.hpp"

namespace rym {

inline constexpr const char* kTimeseriesHeader =
    "t,sup_u,inf_u,volume,F_liouville,F_energy,calabi,sup_grad_f_sq,diameter,com_x,com_y,com_z";

/// "%.17g", or the empty string for NaN.
std::string format_double(double x);

std::string timeseries_csv(const std::vector<DiagnosticsRecord>& records);
std::string snapshot_csv(const FlowState& state);

/// Writes `text` to `path`, creating parent directories. Throws ConfigError
/// when the location is not writable.
void write_text(const std::filesystem::path& path, const std::string& text);

void write_timeseries(const std::filesystem::path& path,
                      const std::vector<DiagnosticsRecord>& records);
void write_snapshot(const std::filesystem::path& path, const FlowState& state);

nlohmann::ordered_json to_json(const Check& check);
nlohmann::ordered_json to_json(const CaseVerdict& verdict);
nlohmann::ordered_json to_json(const ConvergenceReport& report);
nlohmann::ordered_json to_json(const SingularityReport& report);

/// Non-finite numbers become null; nlohmann would otherwise emit invalid JSON.
nlohmann::ordered_json json_number(double x);

/// 16 lowercase hex digits.
std::string hex64(std::uint64_t x);

}  // namespace rym
