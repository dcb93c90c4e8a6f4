#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "shelving/dynamics.hpp"

namespace shelving {

/// Collapse channels of the master equation: strong sqrt(gamma) s_ge,
/// shelve sqrt(gamma_d) s_ae, unshelve sqrt(gamma_a) s_ga.
enum class Channel : std::uint8_t { Strong = 0, Shelve = 1, Unshelve = 2 };

const char* channel_name(Channel c);

/// Amplitudes on (|g>, |e>, |a>).
using StateVector = Eigen::Vector3cd;

struct JumpConfig {
  std::uint64_t seed = 20181;
  double t_max = 1000.0;
  /// Initial bracket width for locating the norm crossing.
  double bracket_step = 1.0;
  StateVector initial = StateVector(1.0, 0.0, 0.0);
  bool record_events = true;
};

struct EmissionEvent {
  double time;
  Channel channel;
};

struct Interval {
  double start;
  double end;
  bool complete;  // both ends are jumps (not 0 or t_max)
  double length() const { return end - start; }
};

enum class Period : std::uint8_t { Bright, Dark };

struct TrajectoryRecord {
  std::vector<EmissionEvent> events;
  std::vector<Interval> bright;
  std::vector<Interval> dark;
  Period final_period = Period::Bright;
  double t_max = 0.0;
  std::size_t photon_count = 0;  // strong-channel events
  /// Normalized-state expectations at requested sample times.
  std::vector<BlochVector> samples;
};

class TrajectoryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Waiting-time (norm threshold) unraveling of one trajectory. The
/// no-jump evolution is exponentiated in closed form, so jump times are exact
/// up to root-finding tolerance. `sample_times` must be ascending.
TrajectoryRecord simulate(const AtomParams& params, const JumpConfig& config,
                          std::span<const double> sample_times = {});

/// Independent stream for trajectory `index` of an ensemble with master
/// seed `seed`.
JumpConfig trajectory_config(const JumpConfig& base, std::uint64_t index);

struct TelegraphStats {
  double mean_bright = 0.0;
  double mean_dark = 0.0;
  double se_bright = 0.0;
  double se_dark = 0.0;
  std::size_t n_bright = 0;
  std::size_t n_dark = 0;
  bool sufficient = false;  // >= 1 complete interval of each kind
};

TelegraphStats telegraph_stats(std::span<const TrajectoryRecord> records);

/// Lengths of complete dark intervals.
std::vector<double> dark_lengths(std::span<const TrajectoryRecord> records);

/// Runs n trajectories (streams 0..n-1) on `threads` workers. Output order
/// and contents do not depend on the thread count.
std::vector<TrajectoryRecord> run_ensemble(const AtomParams& params,
                                           const JumpConfig& config,
                                           std::size_t n,
                                           std::span<const double> sample_times = {},
                                           unsigned threads = 1);

struct EnsembleAverage {
  std::vector<BlochVector> mean;
  /// Sample standard deviation of the per-trajectory <s_ee>.
  std::vector<double> sd_excited;
  std::size_t n = 0;
};

EnsembleAverage ensemble_average(const AtomParams& params,
                                 const JumpConfig& config, std::size_t n,
                                 std::span<const double> times,
                                 unsigned threads = 1);

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

/// One-sample Kolmogorov-Smirnov test against Exponential(rate).
KsResult ks_exponential(std::span<const double> samples, double rate);

}  // namespace shelving
