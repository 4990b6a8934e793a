#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tamed/model.hpp"
#include "tamed/noise.hpp"
#include "tamed/scheme.hpp"

namespace tamed {

enum class ErrorTime { terminal, running_max };

struct ExperimentConfig {
  std::string problem = "example1";
  std::vector<int> levels;  // coarse schemes use n = 2^level
  int ref_level = 15;
  std::int64_t paths = 1000;
  std::uint64_t base_seed = 42;
  double theta = 0.5;
  ErrorTime error_time = ErrorTime::terminal;
  /// Coarse schemes run untamed; the reference stays tamed.
  bool compare_untamed = false;
  /// 0 means hardware concurrency. Never changes results.
  unsigned workers = 0;
  /// Testing hook: lets a level equal ref_level.
  bool allow_reference_level = false;

  void validate() const;
};

struct LevelError {
  int level = 0;
  double step_size = 0.0;
  double l2_error = 0.0;
  double l1_error = 0.0;
  std::int64_t paths_diverged = 0;
};

struct ErrorReport {
  ExperimentConfig config;
  std::vector<LevelError> levels;
  std::optional<double> fitted_rate_l2;
  std::optional<double> fitted_rate_l1;
  double wall_seconds = 0.0;
};

struct RatePoint {
  double step_size;
  double error;
};

/// Least-squares slope of log2(error) against log2(step_size). Throws
/// ConfigError with fewer than two points or any non-positive/non-finite
/// value.
double fit_rate(std::span<const RatePoint> points);

/// Coupled strong-error experiment: every path draws one noise realisation on
/// the reference grid, and each level runs the scheme on an exact coarsening
/// of it. Diverged coarse paths are counted and excluded from that level's
/// moments; a diverged reference path is excluded from every level.
ErrorReport strong_error(const ExperimentConfig& config);

struct MomentLevel {
  int level = 0;
  double step_size = 0.0;
  double tamed_moment = 0.0;    // E sup_t |x_t|^2 over finite paths
  double untamed_moment = 0.0;  // same, untamed scheme; NaN when every path diverged
  std::int64_t tamed_diverged = 0;
  std::int64_t untamed_diverged = 0;
};

/// Tamed against untamed scheme on shared noise: second moment of the running
/// maximum and divergence counts per level.
std::vector<MomentLevel> compare_untamed(const ExperimentConfig& config);

/// Simulates Monte Carlo path `path_index` of `problem` on the grid of scheme.n.
Trajectory simulate_path(const AnyProblem& problem, const SchemeConfig& scheme,
                            std::uint64_t base_seed, std::uint64_t path_index);

/// Noise for path `path_index` on the grid [start, end] of `problem`.
NoisePath problem_noise(const AnyProblem& problem, std::int64_t n, std::uint64_t base_seed,
                        std::uint64_t path_index);

/// Dispatches to simulate or simulate_delay.
Trajectory run_scheme(const AnyProblem& problem, const SchemeConfig& scheme, const NoisePath& noise);

/// Calls fn(i) for i in [0, count) on `workers` threads (0: hardware
/// concurrency). The first exception thrown by any call is rethrown.
void for_each_path(std::int64_t count, unsigned workers, const std::function<void(std::int64_t)>& fn);

/// `%.17g` formatting used by every CSV writer.
std::string format_real(double value);

/// header: level,step_size,l2_error,l1_error,paths_diverged
void write_error_csv(const ErrorReport& report, std::ostream& out);
/// header: t,x0,...,x{d-1}
void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out);
/// header: level,step_size,tamed_moment,untamed_moment,tamed_diverged,untamed_diverged
void write_moment_csv(std::span<const MomentLevel> rows, std::ostream& out);

}  // namespace tamed
