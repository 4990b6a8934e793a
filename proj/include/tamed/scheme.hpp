#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "tamed/model.hpp"
#include "tamed/noise.hpp"

namespace tamed {

enum class Taming { tamed, untamed };

struct SchemeConfig {
  std::int64_t n = 1;  // steps per unit time
  double theta = 0.5;
  Taming taming = Taming::tamed;

  /// Throws ConfigError unless n >= 1 and, when tamed, 0 < theta <= 1/2.
  void validate() const;
};

/// States at every grid time, one column per time (K + 1 columns).
struct Trajectory {
  GridSpec grid;
  Matrix states;
  /// First grid index holding a non-finite coordinate, if any.
  std::optional<std::int64_t> first_non_finite;

  bool finite() const { return !first_non_finite; }
  Vector terminal() const { return states.col(states.cols() - 1); }
};

/// floor(r), except that r within 1e-9 (relative) of an integer snaps to it,
/// so grid times recomputed in floating point stay on their own grid point.
std::int64_t grid_floor(double r);

/// Largest grid point t0 + j/n not exceeding t.
double kappa(std::int64_t n, double t, double t0);

/// b / (1 + n^-theta |b|), with |.| the Euclidean norm.
Vector tame(const Vector& b, std::int64_t n, double theta);

/// x + drift dt + diffusion dW + jump_sum - compensator dt, in that order.
/// Shared by the plain and the delay stepper so both round identically.
Vector euler_update(const Vector& x, const Vector& drift, const Matrix& diffusion, const Vector& dW,
                    const Vector& jump_sum, const Vector& compensator, double dt);

/// One step of the scheme from (t, x) over dt <= 1/n. Every coefficient is
/// frozen at the left state x, the jump coefficient takes each event's own
/// time, and only the drift is tamed. Calling it with dt < 1/n evaluates the
/// continuous-time scheme inside the interval.
Vector step(const Vector& x, double t, double dt, const Vector& dW, std::span<const JumpEvent> jumps,
            const Problem& problem, const SchemeConfig& config);

/// Runs the scheme on the grid of `config.n`, coarsening `noise` first when it
/// lives on a finer grid. Non-finite states propagate and are flagged, never
/// thrown. Throws ConfigError on horizon, dimension or grid mismatch.
Trajectory simulate(const Problem& problem, const SchemeConfig& config, const NoisePath& noise);

/// Coarsens `noise` to steps-per-unit-time `n` after checking compatibility.
NoisePath noise_at(const NoisePath& noise, std::int64_t n);

}  // namespace tamed
