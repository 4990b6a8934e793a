#include "tamed/model.hpp"

#include <array>
#include <cmath>

#include "tamed/errors.hpp"

namespace tamed {
namespace {

constexpr std::array<RegistryEntry, 4> kRegistry{{
    {"example1", "dx = -x^5 dt + x dw + int x z Ntilde(dt,dz); N(0,1) marks, intensity 3, x0 = 1, t in [0,1]"},
    {"example2", "dx = (x - x^3 + y^2) dt + (x + y^3) dw + int (x + y) z Ntilde(dt,dz); y_t = x_{t-1}, xi_t = t + 1, t in [0,2]"},
    {"quintic_ode", "dx = -x^5 dt, x0 = 1, t in [0,1] (example1 without noise)"},
    {"example1_nojumps", "dx = -x^5 dt + x dw, x0 = 1, t in [0,1]"},
}};

Problem quintic_base(std::string name) {
  Problem p;
  p.name = std::move(name);
  p.drift = [](double, const Vector& x) -> Vector {
    return Vector::Constant(1, -(x[0] * x[0] * x[0] * x[0] * x[0]));
  };
  p.diffusion = [](double, const Vector&) -> Matrix { return Matrix::Zero(1, 1); };
  p.jump = [](double, const Vector&, const Vector&) -> Vector { return Vector::Zero(1); };
  p.jump_mark_mean = [](double, const Vector&) -> Vector { return Vector::Zero(1); };
  p.levy = {0.0, StandardNormalMarks{}};
  p.x0 = Vector::Ones(1);
  p.t0 = 0.0;
  p.t1 = 1.0;
  return p;
}

Problem example1_nojumps() {
  Problem p = quintic_base("example1_nojumps");
  p.diffusion = [](double, const Vector& x) -> Matrix { return Matrix::Constant(1, 1, x[0]); };
  return p;
}

Problem example1() {
  Problem p = example1_nojumps();
  p.name = "example1";
  p.levy = {3.0, StandardNormalMarks{}};
  p.jump = [](double, const Vector& x, const Vector& z) -> Vector {
    return Vector::Constant(1, x[0] * z[0]);
  };
  const double mean_mark = mark_mean(p.levy.mark_law)[0];
  p.jump_mark_mean = [mean_mark](double, const Vector& x) -> Vector {
    return Vector::Constant(1, x[0] * mean_mark);
  };
  return p;
}

DelayProblem example2() {
  DelayProblem p;
  p.name = "example2";
  p.drift = [](double, const Matrix& y, const Vector& x) -> Vector {
    return Vector::Constant(1, x[0] - x[0] * x[0] * x[0] + y(0, 0) * y(0, 0));
  };
  p.diffusion = [](double, const Matrix& y, const Vector& x) -> Matrix {
    return Matrix::Constant(1, 1, x[0] + y(0, 0) * y(0, 0) * y(0, 0));
  };
  p.jump = [](double, const Matrix& y, const Vector& x, const Vector& z) -> Vector {
    return Vector::Constant(1, (x[0] + y(0, 0)) * z[0]);
  };
  p.levy = {3.0, StandardNormalMarks{}};
  const double mean_mark = mark_mean(p.levy.mark_law)[0];
  p.jump_mark_mean = [mean_mark](double, const Matrix& y, const Vector& x) -> Vector {
    return Vector::Constant(1, (x[0] + y(0, 0)) * mean_mark);
  };
  p.lags = {FixedLag{1.0}};
  p.segment = 1.0;
  p.history = 1.0;
  p.initial_segment = [](double t) -> Vector { return Vector::Constant(1, t + 1.0); };
  p.t1 = 2.0;
  return p;
}

void check_dims(const std::string& name, Eigen::Index dim, Eigen::Index noise_dim,
                const LevyModel& levy) {
  if (dim < 1 || noise_dim < 1) {
    throw ConfigError("problem '" + name + "': state and noise dimensions must be >= 1");
  }
  if (!std::isfinite(levy.intensity) || levy.intensity < 0.0) {
    throw ConfigError("problem '" + name + "': jump intensity must be finite and >= 0");
  }
  if (const auto* u = std::get_if<UniformMarks>(&levy.mark_law); u && !(u->a < u->b)) {
    throw ConfigError("problem '" + name + "': uniform mark law needs a < b");
  }
}

}  // namespace

double delay_time(const DelayLag& lag, double t) {
  if (const auto* fixed = std::get_if<FixedLag>(&lag)) return t - fixed->lag;
  const double h = std::get<PiecewiseFloor>(lag).segment;
  return std::floor(t / h) * h;
}

Vector compensator(const Problem& problem, double t, const Vector& x) {
  if (problem.levy.intensity == 0.0) return Vector::Zero(problem.dim);
  return problem.levy.intensity * problem.jump_mark_mean(t, x);
}

Vector compensator(const DelayProblem& problem, double t, const Matrix& y, const Vector& x) {
  if (problem.levy.intensity == 0.0) return Vector::Zero(problem.dim);
  return problem.levy.intensity * problem.jump_mark_mean(t, y, x);
}

void validate(const Problem& p) {
  check_dims(p.name, p.dim, p.noise_dim, p.levy);
  if (!p.drift || !p.diffusion || !p.jump || !p.jump_mark_mean) {
    throw ConfigError("problem '" + p.name + "': all coefficient functions must be set");
  }
  if (p.x0.size() != p.dim) throw ConfigError("problem '" + p.name + "': x0 has wrong dimension");
  if (!(p.t0 < p.t1)) throw ConfigError("problem '" + p.name + "': requires t0 < t1");
}

void validate(const DelayProblem& p) {
  check_dims(p.name, p.dim, p.noise_dim, p.levy);
  if (!p.drift || !p.diffusion || !p.jump || !p.jump_mark_mean || !p.initial_segment) {
    throw ConfigError("problem '" + p.name + "': all coefficient functions must be set");
  }
  if (p.lags.empty()) throw ConfigError("problem '" + p.name + "': at least one delay lag required");
  if (!(p.segment > 0.0) || !(p.history > 0.0) || !(p.t1 > 0.0)) {
    throw ConfigError("problem '" + p.name + "': segment h, history H and horizon T must be > 0");
  }
  for (const auto& lag : p.lags) {
    if (const auto* fixed = std::get_if<FixedLag>(&lag); fixed && !(fixed->lag >= 0.0)) {
      throw ConfigError("problem '" + p.name + "': fixed lags must be >= 0");
    }
    if (const auto* floor = std::get_if<PiecewiseFloor>(&lag); floor && !(floor->segment > 0.0)) {
      throw ConfigError("problem '" + p.name + "': piecewise-floor segment must be > 0");
    }
  }
}

std::span<const RegistryEntry> builtin_names() { return kRegistry; }

AnyProblem builtin(std::string_view name) {
  if (name == "example1") return example1();
  if (name == "example2") return example2();
  if (name == "quintic_ode") return quintic_base("quintic_ode");
  if (name == "example1_nojumps") return example1_nojumps();
  std::string valid;
  for (const auto& entry : kRegistry) {
    if (!valid.empty()) valid += ", ";
    valid += entry.name;
  }
  throw ConfigError("unknown problem '" + std::string(name) + "'; valid names: " + valid);
}

const std::string& problem_name(const AnyProblem& problem) {
  return std::visit([](const auto& p) -> const std::string& { return p.name; }, problem);
}

double horizon_start(const AnyProblem& problem) {
  if (const auto* p = std::get_if<Problem>(&problem)) return p->t0;
  return 0.0;
}

double horizon_end(const AnyProblem& problem) {
  return std::visit([](const auto& p) { return p.t1; }, problem);
}

Eigen::Index state_dim(const AnyProblem& problem) {
  return std::visit([](const auto& p) { return p.dim; }, problem);
}

}  // namespace tamed
