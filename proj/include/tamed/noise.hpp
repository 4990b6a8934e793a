#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tamed/levy.hpp"
#include "tamed/random.hpp"

namespace tamed {

/// Uniform time grid t_k = t0 + k/n, k = 0..steps, with steps = n (t1 - t0).
/// Times are kept as (t0, k, n) and turned into doubles only on request.
class GridSpec {
 public:
  /// Throws ConfigError unless t0 < t1, n >= 1 and n (t1 - t0) is an integer.
  GridSpec(double t0, double t1, std::int64_t n);

  double t0() const { return t0_; }
  double t1() const { return t1_; }
  std::int64_t n() const { return n_; }
  std::int64_t steps() const { return steps_; }
  double step_size() const { return 1.0 / static_cast<double>(n_); }

  /// Grid time t_k; time(steps()) is exactly t1.
  double time(std::int64_t k) const {
    return k == steps_ ? t1_ : t0_ + static_cast<double>(k) / static_cast<double>(n_);
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  double t0_;
  double t1_;
  std::int64_t n_;
  std::int64_t steps_;
};

struct JumpEvent {
  double time;
  Vector mark;
};

/// One realisation of the driving noise on a fine grid. Brownian increments
/// are stored column-wise (column k is the m-vector over (t_k, t_{k+1}]);
/// jump events carry absolute times and are sorted by time.
struct NoisePath {
  GridSpec grid;
  Matrix dW;
  std::vector<JumpEvent> jumps;

  Eigen::Index brownian_dim() const { return dW.rows(); }
};

/// K increments, each coordinate N(0, 1/n), drawn in (k, coordinate) order and
/// rounded to a 2^-44 lattice so that block sums are exact.
Matrix sample_brownian(RandomStream& stream, const GridSpec& grid, Eigen::Index m);

/// Poisson(intensity (t1 - t0)) events with i.i.d. uniform times on (t0, t1],
/// sorted stably; marks drawn from `marks` in time order.
std::vector<JumpEvent> sample_jumps(RandomStream& times, RandomStream& marks, double intensity,
                                    const MarkLaw& mark_law, double t0, double t1);

/// Full noise path for Monte Carlo path `path_index`, using the three lanes of
/// (base_seed, path_index).
NoisePath sample_noise_path(std::uint64_t base_seed, std::uint64_t path_index,
                            const GridSpec& grid, Eigen::Index m, const LevyModel& levy);

/// Sums consecutive blocks of `factor` increments in ascending order; jumps
/// are copied untouched. Throws ConfigError if factor does not divide both n
/// and the step count.
NoisePath coarsen(const NoisePath& path, std::int64_t factor);

/// Events with time in (t_k, t_{k+1}] of `grid`, found by binary search.
std::span<const JumpEvent> jumps_in_step(std::span<const JumpEvent> jumps, const GridSpec& grid,
                                         std::int64_t k);

}  // namespace tamed
