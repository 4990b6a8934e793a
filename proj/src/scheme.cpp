#include "tamed/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tamed/errors.hpp"

namespace tamed {

void SchemeConfig::validate() const {
  if (n < 1) throw ConfigError("scheme requires n >= 1, got " + std::to_string(n));
  if (taming == Taming::tamed && !(theta > 0.0 && theta <= 0.5)) {
    throw ConfigError("taming exponent theta must lie in (0, 1/2], got " + std::to_string(theta));
  }
}

std::int64_t grid_floor(double r) {
  const double nearest = std::round(r);
  if (std::abs(r - nearest) <= 1e-9 * std::max(1.0, std::abs(r))) {
    return static_cast<std::int64_t>(nearest);
  }
  return static_cast<std::int64_t>(std::floor(r));
}

double kappa(std::int64_t n, double t, double t0) {
  const double nd = static_cast<double>(n);
  return static_cast<double>(grid_floor(nd * (t - t0))) / nd + t0;
}

Vector tame(const Vector& b, std::int64_t n, double theta) {
  const double norm = b.norm();
  if (norm == 0.0) return Vector::Zero(b.size());
  return b / (1.0 + std::pow(static_cast<double>(n), -theta) * norm);
}

Vector euler_update(const Vector& x, const Vector& drift, const Matrix& diffusion, const Vector& dW,
                    const Vector& jump_sum, const Vector& compensator, double dt) {
  Vector next = x;
  next += drift * dt;
  next += diffusion * dW;
  next += jump_sum;
  next -= compensator * dt;
  return next;
}

Vector step(const Vector& x, double t, double dt, const Vector& dW, std::span<const JumpEvent> jumps,
            const Problem& problem, const SchemeConfig& config) {
  Vector drift = problem.drift(t, x);
  if (config.taming == Taming::tamed) drift = tame(drift, config.n, config.theta);
  Vector jump_sum = Vector::Zero(problem.dim);
  for (const auto& event : jumps) jump_sum += problem.jump(event.time, x, event.mark);
  return euler_update(x, drift, problem.diffusion(t, x), dW, jump_sum,
                      compensator(problem, t, x), dt);
}

NoisePath noise_at(const NoisePath& noise, std::int64_t n) {
  if (n < 1 || noise.grid.n() % n != 0) {
    throw ConfigError("noise grid n = " + std::to_string(noise.grid.n()) +
                      " is not a multiple of scheme n = " + std::to_string(n));
  }
  return coarsen(noise, noise.grid.n() / n);
}

Trajectory simulate(const Problem& problem, const SchemeConfig& config, const NoisePath& noise) {
  validate(problem);
  config.validate();
  if (noise.grid.t0() != problem.t0 || noise.grid.t1() != problem.t1) {
    throw ConfigError("noise horizon does not match problem '" + problem.name + "'");
  }
  if (noise.brownian_dim() != problem.noise_dim) {
    throw ConfigError("noise has Brownian dimension " + std::to_string(noise.brownian_dim()) +
                      ", problem '" + problem.name + "' needs " + std::to_string(problem.noise_dim));
  }
  const NoisePath path = noise_at(noise, config.n);
  const GridSpec& grid = path.grid;
  const double dt = grid.step_size();

  Trajectory out{grid, Matrix(problem.dim, grid.steps() + 1), std::nullopt};
  out.states.col(0) = problem.x0;
  Vector x = problem.x0;
  for (std::int64_t k = 0; k < grid.steps(); ++k) {
    x = step(x, grid.time(k), dt, path.dW.col(k), jumps_in_step(path.jumps, grid, k), problem,
             config);
    out.states.col(k + 1) = x;
    if (!out.first_non_finite && !x.allFinite()) out.first_non_finite = k + 1;
  }
  return out;
}

}  // namespace tamed
