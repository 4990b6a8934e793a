#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tamed/levy.hpp"

namespace tamed {

/// Jump-diffusion with deterministic coefficients
///   dx = b(t,x) dt + sigma(t,x) dw + int gamma(t,x,z) Ntilde(dt,dz)
/// on [t0, t1].
struct Problem {
  std::string name;
  Eigen::Index dim = 1;
  Eigen::Index noise_dim = 1;
  std::function<Vector(double t, const Vector& x)> drift;
  std::function<Matrix(double t, const Vector& x)> diffusion;
  std::function<Vector(double t, const Vector& x, const Vector& z)> jump;
  /// E[jump(t, x, Z)] for Z drawn from the mark law, in closed form. The
  /// compensator is this times the intensity.
  std::function<Vector(double t, const Vector& x)> jump_mark_mean;
  LevyModel levy;
  Vector x0;
  double t0 = 0.0;
  double t1 = 1.0;
};

/// y_j(t) = x(t - lag).
struct FixedLag {
  double lag;
};

/// y_j(t) = x(floor(t / segment) * segment).
struct PiecewiseFloor {
  double segment;
};

using DelayLag = std::variant<FixedLag, PiecewiseFloor>;

/// Delay time delta_j(t) in continuous time.
double delay_time(const DelayLag& lag, double t);

/// Stochastic delay equation on [0, T]; coefficients see the delayed states
/// y = (x(delta_1(t)), ..., x(delta_k(t))) as the columns of a d x k matrix,
/// and x = xi on [-H, 0].
struct DelayProblem {
  std::string name;
  Eigen::Index dim = 1;
  Eigen::Index noise_dim = 1;
  std::function<Vector(double t, const Matrix& y, const Vector& x)> drift;
  std::function<Matrix(double t, const Matrix& y, const Vector& x)> diffusion;
  std::function<Vector(double t, const Matrix& y, const Vector& x, const Vector& z)> jump;
  std::function<Vector(double t, const Matrix& y, const Vector& x)> jump_mark_mean;
  LevyModel levy;
  std::vector<DelayLag> lags;
  double segment = 1.0;  // h
  double history = 1.0;  // H
  std::function<Vector(double t)> initial_segment;
  double t1 = 1.0;  // T

  Vector x0() const { return initial_segment(0.0); }
};

using AnyProblem = std::variant<Problem, DelayProblem>;

/// intensity * E[gamma(t, x, Z)].
Vector compensator(const Problem& problem, double t, const Vector& x);
Vector compensator(const DelayProblem& problem, double t, const Matrix& y, const Vector& x);

/// Throws ConfigError on inconsistent dimensions, missing coefficients or an
/// empty horizon.
void validate(const Problem& problem);
void validate(const DelayProblem& problem);

struct RegistryEntry {
  std::string_view name;
  std::string_view description;
};

/// Built-in problems, in listing order.
std::span<const RegistryEntry> builtin_names();

/// Throws ConfigError naming the valid entries when `name` is unknown.
AnyProblem builtin(std::string_view name);

const std::string& problem_name(const AnyProblem& problem);
double horizon_start(const AnyProblem& problem);
double horizon_end(const AnyProblem& problem);
Eigen::Index state_dim(const AnyProblem& problem);

}  // namespace tamed
