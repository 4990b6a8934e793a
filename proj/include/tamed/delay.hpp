#pragma once

#include <cstdint>
#include <span>

#include "tamed/model.hpp"
#include "tamed/noise.hpp"
#include "tamed/scheme.hpp"

namespace tamed {

/// Grid values of one delay path: xi sampled at -H, -H + 1/n, ..., 0, then the
/// scheme states appended one step at a time. Indices are grid indices
/// relative to time 0, so index -H n is time -H.
class History {
 public:
  /// Throws ConfigError unless H n and h n are integers.
  History(const DelayProblem& problem, const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  std::int64_t lead() const { return lead_; }
  /// Steps per delay segment h.
  std::int64_t segment_steps() const { return segment_steps_; }
  /// Largest filled index (0 right after construction).
  std::int64_t frontier() const { return filled_ - 1 - lead_; }

  /// Throws InternalError outside [-lead, frontier].
  auto at(std::int64_t index) const { return values_.col(checked_column(index)); }
  /// Appends the state at frontier() + 1.
  void push(const Vector& x);

  const Matrix& values() const { return values_; }

 private:
  Eigen::Index checked_column(std::int64_t index) const;

  GridSpec grid_;
  std::int64_t lead_;
  std::int64_t segment_steps_;
  Eigen::Index filled_;
  Matrix values_;
};

/// Grid index of delta(t_k) snapped to the nearest grid point on its left.
/// Exact integer arithmetic when the lag (or floor segment) is a whole number
/// of steps.
std::int64_t delay_index(const DelayLag& lag, std::int64_t k, std::int64_t n);

/// y at grid step k: column j is the history value at delay_index(lags[j], k).
/// Throws ConfigError if a delay falls below -H or above floor(t/h) h, and
/// InternalError if it reaches past the filled frontier.
Matrix resolve_delay(const History& history, std::span<const DelayLag> lags, std::int64_t k);

/// Tamed (or untamed) Euler scheme for the delay equation on [0, T]. Delayed
/// arguments are resolved at each step's left endpoint; only the drift is
/// tamed.
Trajectory simulate_delay(const DelayProblem& problem, const SchemeConfig& config,
                          const NoisePath& noise);

}  // namespace tamed
