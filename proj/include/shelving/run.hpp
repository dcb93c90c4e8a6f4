#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "shelving/config.hpp"

namespace shelving {

inline constexpr std::string_view kVersion = "1.0.0";

/// Scientific notation, 12 significant digits, '.' separator, independent
/// of the global locale.
std::string format_number(double x);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Writes `dir/name.csv` or `dir/name.json`; returns the file name.
std::string write_table(const std::string& dir, const Table& table, Format format);

struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct RunResult {
  std::vector<std::string> files;  // relative to config.out
  nlohmann::json summary;          // deterministic quantities only
  std::vector<std::string> lines;  // human-readable summary block
  std::vector<CheckResult> checks;
  bool ok = true;                  // every enabled check passed
};

/// Parameter summary shared by every subcommand: derived rates, telegraph
/// times, narrow-peak width and intensity.
nlohmann::json parameter_summary(const AtomParams& params);

/// Runs config.subcommand, writes artifacts and index.json under config.out.
/// Timings go to `log` only, so artifacts are byte-stable.
RunResult run(const RunConfig& config, std::ostream& log);

/// One sub-run per value of config.sweep.axis, each in its own directory,
/// plus sweep.csv and index.json at the top.
RunResult sweep(const RunConfig& config, std::ostream& log);

/// The invariant suite behind the `check` subcommand.
std::vector<CheckResult> invariant_checks(const RunConfig& config);

}  // namespace shelving
