#include "tamed/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "tamed/delay.hpp"
#include "tamed/errors.hpp"

namespace tamed {
namespace {

constexpr int kMaxLevel = 30;

std::int64_t steps_per_unit(int level) { return std::int64_t{1} << level; }

struct PathOutcome {
  bool reference_finite = true;
  std::vector<double> deviation;
  std::vector<char> diverged;
};

double deviation(const Trajectory& reference, const Trajectory& coarse, ErrorTime mode) {
  if (mode == ErrorTime::terminal) return (reference.terminal() - coarse.terminal()).norm();
  const std::int64_t factor = reference.grid.n() / coarse.grid.n();
  double worst = 0.0;
  for (Eigen::Index j = 0; j < coarse.states.cols(); ++j) {
    worst = std::max(worst, (reference.states.col(j * factor) - coarse.states.col(j)).norm());
  }
  return worst;
}

double sup_squared(const Trajectory& trajectory) {
  return trajectory.states.colwise().squaredNorm().maxCoeff();
}

}  // namespace

void ExperimentConfig::validate() const {
  if (levels.empty()) throw ConfigError("at least one level is required");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 0 || levels[i] > kMaxLevel) {
      throw ConfigError("levels must lie in [0, " + std::to_string(kMaxLevel) + "]");
    }
    if (i > 0 && levels[i] <= levels[i - 1]) throw ConfigError("levels must be strictly increasing");
  }
  if (ref_level > kMaxLevel) {
    throw ConfigError("ref_level must be <= " + std::to_string(kMaxLevel));
  }
  const bool ok = allow_reference_level ? ref_level >= levels.back() : ref_level > levels.back();
  if (!ok) throw ConfigError("ref_level must exceed every level");
  if (paths < 2) throw ConfigError("at least two paths are required");
  if (!(theta > 0.0 && theta <= 0.5)) throw ConfigError("theta must lie in (0, 1/2]");
}

double fit_rate(std::span<const RatePoint> points) {
  if (points.size() < 2) throw ConfigError("rate fit needs at least two points");
  double sx = 0.0, sy = 0.0;
  for (const auto& p : points) {
    if (!(p.error > 0.0) || !std::isfinite(p.error) || !(p.step_size > 0.0) ||
        !std::isfinite(p.step_size)) {
      throw ConfigError("rate fit needs positive finite errors and step sizes (got step " +
                        format_real(p.step_size) + ", error " + format_real(p.error) + ")");
    }
    sx += std::log2(p.step_size);
    sy += std::log2(p.error);
  }
  const double count = static_cast<double>(points.size());
  const double mx = sx / count, my = sy / count;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& p : points) {
    const double dx = std::log2(p.step_size) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log2(p.error) - my);
  }
  if (sxx == 0.0) throw ConfigError("rate fit needs at least two distinct step sizes");
  return sxy / sxx;
}

NoisePath problem_noise(const AnyProblem& problem, std::int64_t n, std::uint64_t base_seed,
                        std::uint64_t path_index) {
  return std::visit(
      [&](const auto& p) {
        const GridSpec grid(horizon_start(problem), p.t1, n);
        return sample_noise_path(base_seed, path_index, grid, p.noise_dim, p.levy);
      },
      problem);
}

Trajectory run_scheme(const AnyProblem& problem, const SchemeConfig& scheme, const NoisePath& noise) {
  if (const auto* p = std::get_if<Problem>(&problem)) return simulate(*p, scheme, noise);
  return simulate_delay(std::get<DelayProblem>(problem), scheme, noise);
}

Trajectory simulate_path(const AnyProblem& problem, const SchemeConfig& scheme,
                         std::uint64_t base_seed, std::uint64_t path_index) {
  return run_scheme(problem, scheme, problem_noise(problem, scheme.n, base_seed, path_index));
}

void for_each_path(std::int64_t count, unsigned workers,
                   const std::function<void(std::int64_t)>& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::int64_t>(workers, std::max<std::int64_t>(count, 1)));
  std::atomic<std::int64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::int64_t i = next++; i < count && !failed; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

ErrorReport strong_error(const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const AnyProblem problem = builtin(config.problem);
  const std::size_t level_count = config.levels.size();
  const SchemeConfig reference_scheme{steps_per_unit(config.ref_level), config.theta, Taming::tamed};
  const Taming coarse_taming = config.compare_untamed ? Taming::untamed : Taming::tamed;

  std::vector<PathOutcome> outcomes(static_cast<std::size_t>(config.paths));
  for_each_path(config.paths, config.workers, [&](std::int64_t i) {
    const NoisePath noise =
        problem_noise(problem, reference_scheme.n, config.base_seed, static_cast<std::uint64_t>(i));
    const Trajectory reference = run_scheme(problem, reference_scheme, noise);
    PathOutcome& outcome = outcomes[static_cast<std::size_t>(i)];
    outcome.reference_finite = reference.finite();
    outcome.deviation.assign(level_count, 0.0);
    outcome.diverged.assign(level_count, 0);
    for (std::size_t l = 0; l < level_count; ++l) {
      const SchemeConfig scheme{steps_per_unit(config.levels[l]), config.theta, coarse_taming};
      const Trajectory coarse = run_scheme(problem, scheme, noise);
      if (!coarse.finite() || !reference.finite()) {
        outcome.diverged[l] = 1;
        continue;
      }
      outcome.deviation[l] = deviation(reference, coarse, config.error_time);
    }
  });

  ErrorReport report;
  report.config = config;
  for (std::size_t l = 0; l < level_count; ++l) {
    LevelError row;
    row.level = config.levels[l];
    row.step_size = std::ldexp(1.0, -row.level);
    double sum_sq = 0.0, sum_abs = 0.0;
    std::int64_t used = 0;
    for (const auto& outcome : outcomes) {
      if (outcome.diverged[l]) {
        ++row.paths_diverged;
        continue;
      }
      const double e = outcome.deviation[l];
      sum_sq += e * e;
      sum_abs += e;
      ++used;
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.l2_error = used > 0 ? std::sqrt(sum_sq / static_cast<double>(used)) : nan;
    row.l1_error = used > 0 ? sum_abs / static_cast<double>(used) : nan;
    report.levels.push_back(row);
  }

  auto try_fit = [&](auto member) -> std::optional<double> {
    std::vector<RatePoint> points;
    for (const auto& row : report.levels) points.push_back({row.step_size, row.*member});
    try {
      return fit_rate(points);
    } catch (const ConfigError&) {
      return std::nullopt;
    }
  };
  report.fitted_rate_l2 = try_fit(&LevelError::l2_error);
  report.fitted_rate_l1 = try_fit(&LevelError::l1_error);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::vector<MomentLevel> compare_untamed(const ExperimentConfig& config) {
  ExperimentConfig checked = config;
  checked.allow_reference_level = true;
  checked.ref_level = std::max(config.ref_level, config.levels.empty() ? 0 : config.levels.back());
  checked.validate();
  const AnyProblem problem = builtin(config.problem);
  const std::size_t level_count = config.levels.size();
  const std::int64_t finest = steps_per_unit(config.levels.back());

  struct Sample {
    std::vector<double> tamed, untamed;
  };
  std::vector<Sample> samples(static_cast<std::size_t>(config.paths));
  for_each_path(config.paths, config.workers, [&](std::int64_t i) {
    const NoisePath noise =
        problem_noise(problem, finest, config.base_seed, static_cast<std::uint64_t>(i));
    Sample& s = samples[static_cast<std::size_t>(i)];
    for (std::size_t l = 0; l < level_count; ++l) {
      const std::int64_t n = steps_per_unit(config.levels[l]);
      const Trajectory tamed = run_scheme(problem, {n, config.theta, Taming::tamed}, noise);
      const Trajectory untamed = run_scheme(problem, {n, config.theta, Taming::untamed}, noise);
      const double nan = std::numeric_limits<double>::quiet_NaN();
      s.tamed.push_back(tamed.finite() ? sup_squared(tamed) : nan);
      s.untamed.push_back(untamed.finite() ? sup_squared(untamed) : nan);
    }
  });

  std::vector<MomentLevel> rows;
  for (std::size_t l = 0; l < level_count; ++l) {
    MomentLevel row;
    row.level = config.levels[l];
    row.step_size = std::ldexp(1.0, -row.level);
    double tamed_sum = 0.0, untamed_sum = 0.0;
    std::int64_t tamed_used = 0, untamed_used = 0;
    for (const auto& s : samples) {
      if (std::isfinite(s.tamed[l])) {
        tamed_sum += s.tamed[l];
        ++tamed_used;
      } else {
        ++row.tamed_diverged;
      }
      if (std::isfinite(s.untamed[l])) {
        untamed_sum += s.untamed[l];
        ++untamed_used;
      } else {
        ++row.untamed_diverged;
      }
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.tamed_moment = tamed_used ? tamed_sum / static_cast<double>(tamed_used) : nan;
    row.untamed_moment = untamed_used ? untamed_sum / static_cast<double>(untamed_used) : nan;
    rows.push_back(row);
  }
  return rows;
}

std::string format_real(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

void write_error_csv(const ErrorReport& report, std::ostream& out) {
  out << "level,step_size,l2_error,l1_error,paths_diverged\n";
  for (const auto& row : report.levels) {
    out << row.level << ',' << format_real(row.step_size) << ',' << format_real(row.l2_error) << ','
        << format_real(row.l1_error) << ',' << row.paths_diverged << '\n';
  }
}

void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out) {
  out << 't';
  for (Eigen::Index i = 0; i < trajectory.states.rows(); ++i) out << ",x" << i;
  out << '\n';
  for (Eigen::Index k = 0; k < trajectory.states.cols(); ++k) {
    out << format_real(trajectory.grid.time(k));
    for (Eigen::Index i = 0; i < trajectory.states.rows(); ++i) {
      out << ',' << format_real(trajectory.states(i, k));
    }
    out << '\n';
  }
}

void write_moment_csv(std::span<const MomentLevel> rows, std::ostream& out) {
  out << "level,step_size,tamed_moment,untamed_moment,tamed_diverged,untamed_diverged\n";
  for (const auto& row : rows) {
    out << row.level << ',' << format_real(row.step_size) << ',' << format_real(row.tamed_moment)
        << ',' << format_real(row.untamed_moment) << ',' << row.tamed_diverged << ','
        << row.untamed_diverged << '\n';
  }
}

}  // namespace tamed
