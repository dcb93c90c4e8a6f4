#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "shelving/tds.hpp"
#include "shelving/trajectories.hpp"

namespace shelving {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { Csv, Json };
enum class InitialKind { Ground, Steady, Custom };

struct Tolerances {
  double steady = 1e-8;     // evolve(t -> inf) vs closed form
  double ode = 1e-10;       // adaptive integrator local error
  double condition = 1e8;   // eigenvector matrix condition limit
  double identity = 1e-12;  // spectral identities
  double sum_rule = 1e-3;   // relative
  double oracle = 1e-4;     // fast vs oracle TDS, relative to surface max
  double oracle_step = 0.01;
};

struct TrajectoryOptions {
  std::size_t count = 100;
  double t_max = 5e4;
  double bracket_step = 1.0;
  bool events = true;
};

struct SweepOptions {
  std::string axis;
  std::vector<double> values;
  std::string subcommand = "times";
};

struct RunConfig {
  std::string subcommand = "steady";
  AtomParams atom;  // moderate_drive()
  FilterParams filter{0.1, {}};
  std::optional<std::vector<double>> times;
  std::optional<std::vector<double>> omega;
  InitialKind initial = InitialKind::Ground;
  Vector4c initial_custom = Vector4c::Zero();
  std::uint64_t seed = 20181;
  std::string out = "out";
  Format format = Format::Csv;
  bool oracle = false;
  unsigned threads = 1;
  Tolerances tol;
  TrajectoryOptions trajectories;
  SweepOptions sweep;

  BlochVector initial_state() const;
};

inline constexpr std::string_view kSubcommands[] = {
    "steady", "evolve", "spectrum", "tds", "trajectories", "times", "sweep", "check"};

inline constexpr std::string_view kSweepAxes[] = {
    "rabi", "detuning", "gamma", "gamma_d", "gamma_a", "filter.bandwidth"};

/// Key paths accepted on the command line as --<path> overrides.
std::vector<std::string> config_key_paths();

/// Strict parse: unknown keys, wrong types and out-of-range values throw
/// ConfigError naming the key path; parameter violations throw
/// InvalidParameter.
RunConfig parse_config(std::string_view text);
RunConfig parse_config(const nlohmann::json& doc);
inline RunConfig parse_config(const char* text) { return parse_config(std::string_view(text)); }
inline RunConfig parse_config(const std::string& text) { return parse_config(std::string_view(text)); }

/// Sets `path` (dot separated) in `doc`. The value is parsed as JSON when
/// possible, else stored as a string.
void apply_override(nlohmann::json& doc, const std::string& path,
                    const std::string& value);

/// Canonical JSON form of a config (every field, defaults filled in).
nlohmann::json to_json(const RunConfig& config);

}  // namespace shelving
