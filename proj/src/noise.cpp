#include "tamed/noise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tamed/errors.hpp"

namespace tamed {
namespace {

// Increments are rounded to multiples of 2^-44. Sums of such values are exact
// in double precision while |sum| < 2^9, so block sums built by coarsening are
// exact and coarsen(coarsen(p, a), b) == coarsen(p, a * b) bit for bit.
constexpr int kLatticeBits = 44;

}  // namespace

Eigen::Index mark_dimension(const MarkLaw& law) {
  if (const auto* point = std::get_if<PointMassMarks>(&law)) return point->z.size();
  return 1;
}

Vector mark_mean(const MarkLaw& law) {
  struct Visitor {
    Vector operator()(const StandardNormalMarks&) const { return Vector::Zero(1); }
    Vector operator()(const UniformMarks& u) const { return Vector::Constant(1, 0.5 * (u.a + u.b)); }
    Vector operator()(const PointMassMarks& p) const { return p.z; }
  };
  return std::visit(Visitor{}, law);
}

Vector sample_mark(const MarkLaw& law, RandomStream& stream) {
  struct Visitor {
    RandomStream& stream;
    Vector operator()(const StandardNormalMarks&) const { return Vector::Constant(1, stream.normal()); }
    Vector operator()(const UniformMarks& u) const {
      return Vector::Constant(1, u.a + (u.b - u.a) * stream.uniform());
    }
    Vector operator()(const PointMassMarks& p) const { return p.z; }
  };
  return std::visit(Visitor{stream}, law);
}

GridSpec::GridSpec(double t0, double t1, std::int64_t n) : t0_(t0), t1_(t1), n_(n), steps_(0) {
  if (!std::isfinite(t0) || !std::isfinite(t1) || !(t0 < t1)) {
    throw ConfigError("grid requires finite t0 < t1");
  }
  if (n < 1) throw ConfigError("grid requires n >= 1, got " + std::to_string(n));
  const double raw = static_cast<double>(n) * (t1 - t0);
  const double rounded = std::round(raw);
  if (std::abs(raw - rounded) > 1e-9 * std::max(1.0, rounded)) {
    throw ConfigError("n * (t1 - t0) must be an integer (n = " + std::to_string(n) +
                      ", span = " + std::to_string(t1 - t0) + ")");
  }
  steps_ = static_cast<std::int64_t>(rounded);
  if (steps_ < 1) throw ConfigError("grid must contain at least one step");
}

Matrix sample_brownian(RandomStream& stream, const GridSpec& grid, Eigen::Index m) {
  if (m < 1) throw ConfigError("Brownian dimension must be >= 1");
  const double scale = std::sqrt(grid.step_size());
  Matrix dW(m, grid.steps());
  for (Eigen::Index k = 0; k < dW.cols(); ++k) {
    for (Eigen::Index i = 0; i < m; ++i) {
      dW(i, k) = std::ldexp(std::nearbyint(std::ldexp(scale * stream.normal(), kLatticeBits)),
                            -kLatticeBits);
    }
  }
  return dW;
}

std::vector<JumpEvent> sample_jumps(RandomStream& times, RandomStream& marks, double intensity,
                                    const MarkLaw& mark_law, double t0, double t1) {
  if (!(intensity >= 0.0) || !std::isfinite(intensity)) {
    throw ConfigError("jump intensity must be finite and >= 0");
  }
  std::vector<JumpEvent> events;
  const std::uint64_t count = times.poisson(intensity * (t1 - t0));
  events.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    double t = t0 + (t1 - t0) * times.uniform_open_closed();
    if (t <= t0) t = std::nextafter(t0, t1);
    events.push_back({std::min(t, t1), Vector()});
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const JumpEvent& a, const JumpEvent& b) { return a.time < b.time; });
  for (auto& event : events) event.mark = sample_mark(mark_law, marks);
  return events;
}

NoisePath sample_noise_path(std::uint64_t base_seed, std::uint64_t path_index,
                            const GridSpec& grid, Eigen::Index m, const LevyModel& levy) {
  RandomStream brownian({base_seed, path_index, Lane::brownian});
  RandomStream times({base_seed, path_index, Lane::jump_times});
  RandomStream marks({base_seed, path_index, Lane::jump_marks});
  return NoisePath{grid, sample_brownian(brownian, grid, m),
                   sample_jumps(times, marks, levy.intensity, levy.mark_law, grid.t0(), grid.t1())};
}

NoisePath coarsen(const NoisePath& path, std::int64_t factor) {
  const GridSpec& fine = path.grid;
  if (factor < 1 || fine.n() % factor != 0 || fine.steps() % factor != 0) {
    throw ConfigError("coarsening factor " + std::to_string(factor) +
                      " must divide n = " + std::to_string(fine.n()) +
                      " and the step count " + std::to_string(fine.steps()));
  }
  if (factor == 1) return path;
  GridSpec coarse(fine.t0(), fine.t1(), fine.n() / factor);
  Matrix dW(path.dW.rows(), coarse.steps());
  for (Eigen::Index j = 0; j < dW.cols(); ++j) {
    for (Eigen::Index i = 0; i < dW.rows(); ++i) {
      double sum = 0.0;
      for (Eigen::Index k = j * factor; k < (j + 1) * factor; ++k) sum += path.dW(i, k);
      dW(i, j) = sum;
    }
  }
  return NoisePath{coarse, std::move(dW), path.jumps};
}

std::span<const JumpEvent> jumps_in_step(std::span<const JumpEvent> jumps, const GridSpec& grid,
                                         std::int64_t k) {
  const double left = grid.time(k);
  const double right = grid.time(k + 1);
  auto after = [](double t, const JumpEvent& e) { return t < e.time; };
  auto first = std::upper_bound(jumps.begin(), jumps.end(), left, after);
  auto last = std::upper_bound(first, jumps.end(), right, after);
  return {first, last};
}

}  // namespace tamed
