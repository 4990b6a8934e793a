#include "tamed/delay.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tamed/errors.hpp"

namespace tamed {
namespace {

std::int64_t whole_steps(double length, std::int64_t n, const char* what) {
  const double raw = length * static_cast<double>(n);
  const double rounded = std::round(raw);
  if (std::abs(raw - rounded) > 1e-9 * std::max(1.0, rounded)) {
    throw ConfigError(std::string(what) + " times n must be an integer (" + what + " = " +
                      std::to_string(length) + ", n = " + std::to_string(n) + ")");
  }
  return static_cast<std::int64_t>(rounded);
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

History::History(const DelayProblem& problem, const GridSpec& grid)
    : grid_(grid),
      lead_(whole_steps(problem.history, grid.n(), "history depth H")),
      segment_steps_(whole_steps(problem.segment, grid.n(), "segment length h")),
      filled_(0),
      values_(problem.dim, lead_ + grid.steps() + 1) {
  if (segment_steps_ < 1) throw ConfigError("segment length h must cover at least one step");
  const double nd = static_cast<double>(grid.n());
  for (std::int64_t i = -lead_; i <= 0; ++i) {
    const Vector xi = problem.initial_segment(static_cast<double>(i) / nd);
    if (xi.size() != problem.dim) {
      throw ConfigError("initial segment of '" + problem.name + "' has wrong dimension");
    }
    values_.col(filled_++) = xi;
  }
}

Eigen::Index History::checked_column(std::int64_t index) const {
  if (index < -lead_ || index > frontier()) {
    throw InternalError("history read at index " + std::to_string(index) + " outside [" +
                        std::to_string(-lead_) + ", " + std::to_string(frontier()) + "]");
  }
  return static_cast<Eigen::Index>(index + lead_);
}

void History::push(const Vector& x) {
  if (filled_ >= values_.cols()) throw InternalError("history is already full");
  values_.col(filled_++) = x;
}

std::int64_t delay_index(const DelayLag& lag, std::int64_t k, std::int64_t n) {
  const double nd = static_cast<double>(n);
  if (const auto* fixed = std::get_if<FixedLag>(&lag)) {
    const double steps = fixed->lag * nd;
    const double whole = std::round(steps);
    if (std::abs(steps - whole) <= 1e-9 * std::max(1.0, whole)) {
      return k - static_cast<std::int64_t>(whole);
    }
    return grid_floor(static_cast<double>(k) - steps);
  }
  const double steps = std::get<PiecewiseFloor>(lag).segment * nd;
  const double whole = std::round(steps);
  if (whole >= 1.0 && std::abs(steps - whole) <= 1e-9 * whole) {
    const auto per = static_cast<std::int64_t>(whole);
    return floor_div(k, per) * per;
  }
  return grid_floor(std::floor(static_cast<double>(k) / steps) * steps);
}

Matrix resolve_delay(const History& history, std::span<const DelayLag> lags, std::int64_t k) {
  const std::int64_t n = history.grid().n();
  const std::int64_t segment_end = floor_div(k, history.segment_steps()) * history.segment_steps();
  Matrix y(history.values().rows(), static_cast<Eigen::Index>(lags.size()));
  for (std::size_t j = 0; j < lags.size(); ++j) {
    const std::int64_t index = delay_index(lags[j], k, n);
    if (index < -history.lead()) {
      throw ConfigError("delay " + std::to_string(j) + " at t = " +
                        std::to_string(history.grid().time(k)) + " reaches before -H");
    }
    if (index > segment_end) {
      throw ConfigError("delay " + std::to_string(j) + " at t = " +
                        std::to_string(history.grid().time(k)) + " exceeds floor(t/h) h");
    }
    y.col(static_cast<Eigen::Index>(j)) = history.at(index);
  }
  return y;
}

Trajectory simulate_delay(const DelayProblem& problem, const SchemeConfig& config,
                          const NoisePath& noise) {
  validate(problem);
  config.validate();
  if (noise.grid.t0() != 0.0 || noise.grid.t1() != problem.t1) {
    throw ConfigError("noise horizon does not match [0, T] of problem '" + problem.name + "'");
  }
  if (noise.brownian_dim() != problem.noise_dim) {
    throw ConfigError("noise has Brownian dimension " + std::to_string(noise.brownian_dim()) +
                      ", problem '" + problem.name + "' needs " + std::to_string(problem.noise_dim));
  }
  const NoisePath path = noise_at(noise, config.n);
  const GridSpec& grid = path.grid;
  const double dt = grid.step_size();
  History history(problem, grid);

  Trajectory out{grid, Matrix(problem.dim, grid.steps() + 1), std::nullopt};
  Vector x = history.at(0);
  out.states.col(0) = x;
  for (std::int64_t k = 0; k < grid.steps(); ++k) {
    const double t = grid.time(k);
    const Matrix y = resolve_delay(history, problem.lags, k);
    Vector drift = problem.drift(t, y, x);
    if (config.taming == Taming::tamed) drift = tame(drift, config.n, config.theta);
    Vector jump_sum = Vector::Zero(problem.dim);
    for (const auto& event : jumps_in_step(path.jumps, grid, k)) {
      jump_sum += problem.jump(event.time, y, x, event.mark);
    }
    x = euler_update(x, drift, problem.diffusion(t, y, x), path.dW.col(k), jump_sum,
                     compensator(problem, t, y, x), dt);
    history.push(x);
    out.states.col(k + 1) = x;
    if (!out.first_non_finite && !x.allFinite()) out.first_non_finite = k + 1;
  }
  return out;
}

}  // namespace tamed
