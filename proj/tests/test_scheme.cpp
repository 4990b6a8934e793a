#include <doctest.h>

#include <cmath>
#include <limits>

#include "tamed/errors.hpp"
#include "tamed/harness.hpp"
#include "tamed/scheme.hpp"

using namespace tamed;

namespace {

Problem pure_jumps(double intensity, MarkLaw law) {
  Problem p = std::get<Problem>(builtin("quintic_ode"));
  p.name = "pure_jumps";
  p.drift = [](double, const Vector& x) -> Vector { return Vector::Zero(x.size()); };
  p.levy = {intensity, law};
  p.jump = [](double, const Vector& x, const Vector& z) -> Vector { return x * z[0]; };
  const double mean = mark_mean(law)[0];
  p.jump_mark_mean = [mean](double, const Vector& x) -> Vector { return x * mean; };
  return p;
}

// Classical RK4 for dx = -x^5 dt, used as an oracle independent of the scheme.
double quintic_rk4(double x, double t_end, int steps) {
  const double h = t_end / steps;
  auto f = [](double v) { return -std::pow(v, 5); };
  for (int i = 0; i < steps; ++i) {
    const double k1 = f(x);
    const double k2 = f(x + 0.5 * h * k1);
    const double k3 = f(x + 0.5 * h * k2);
    const double k4 = f(x + h * k3);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

}  // namespace

TEST_CASE("kappa projects onto the grid") {
  CHECK(kappa(10, 0.25, 0.0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(kappa(7, 0.5, 0.5) == 0.5);
  CHECK(kappa(4, 1.0, 0.0) == 1.0);
  for (int k = 0; k <= 100; ++k) {
    const double t = k / 10.0;
    CHECK(kappa(10, t, 0.0) == doctest::Approx(t).epsilon(1e-15));
  }
  RandomStream s({3, 0, Lane::brownian});
  for (int i = 0; i < 1000; ++i) {
    const std::int64_t n = 1 + static_cast<std::int64_t>(s.uniform() * 100);
    const double t0 = s.uniform() - 0.5;
    const double t = t0 + 3.0 * s.uniform();
    const double k = kappa(n, t, t0);
    CHECK(k <= t + 1e-12);
    CHECK(t < k + 1.0 / static_cast<double>(n) + 1e-12);
    CHECK(kappa(n, k, t0) == doctest::Approx(k).epsilon(1e-14));
  }
}

TEST_CASE("tame") {
  CHECK(tame(Vector::Zero(1), 64, 0.5).isZero());
  CHECK(tame(Vector::Constant(1, -1.0), 4, 0.5)[0] == doctest::Approx(-2.0 / 3.0).epsilon(1e-15));
  const Vector b = (Vector(2) << 3.0, -4.0).finished();
  const Vector tb = tame(b, 16, 0.5);
  CHECK(tb[0] == doctest::Approx(3.0 / 2.25));
  CHECK(tb[1] == doctest::Approx(-4.0 / 2.25));
}

TEST_CASE("taming bounds hold for random drifts") {
  RandomStream s({17, 0, Lane::brownian});
  for (int i = 0; i < 10000; ++i) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(s.uniform() * 3);
    Vector b(d);
    const double scale = std::pow(10.0, 8.0 * s.uniform() - 4.0);
    for (Eigen::Index j = 0; j < d; ++j) b[j] = scale * s.normal();
    const std::int64_t n = 1 + static_cast<std::int64_t>(s.uniform() * 1e6);
    const double theta = std::max(1e-3, 0.5 * s.uniform_open_closed());
    const Vector t = tame(b, n, theta);
    const double bound = std::min(std::pow(static_cast<double>(n), theta), b.norm());
    CHECK(t.norm() <= bound * (1.0 + 1e-12));
    const double c = t.dot(b) / b.squaredNorm();
    CHECK(c > 0.0);
    CHECK(c <= 1.0);
    CHECK((t - c * b).norm() <= 1e-12 * t.norm());
    CHECK((t - b).norm() <= std::pow(static_cast<double>(n), -theta) * b.squaredNorm() * (1.0 + 1e-12));
  }
}

TEST_CASE("single steps") {
  const auto ode = std::get<Problem>(builtin("quintic_ode"));
  const Vector x = Vector::Constant(1, 5.0);
  const Vector dW = Vector::Zero(1);
  const SchemeConfig untamed{64, 0.5, Taming::untamed};
  CHECK(step(x, 0.0, 1.0 / 64, dW, {}, ode, untamed)[0] == -43.828125);
  const SchemeConfig tamed{64, 0.5, Taming::tamed};
  // 5 - (3125 / (1 + 3125/8)) / 64 = 4.8753191...
  CHECK(step(x, 0.0, 1.0 / 64, dW, {}, ode, tamed)[0] == doctest::Approx(4.875319).epsilon(1e-7));

  const Problem jumps = pure_jumps(2.0, PointMassMarks{Vector::Ones(1)});
  const std::vector<JumpEvent> event{{0.1, Vector::Ones(1)}};
  CHECK(step(Vector::Ones(1), 0.0, 0.25, dW, event, jumps, {4, 0.5, Taming::tamed})[0] == 1.5);

  // Diffusion and jumps are evaluated at the left state.
  const auto e1 = std::get<Problem>(builtin("example1"));
  const std::vector<JumpEvent> two{{0.01, Vector::Constant(1, 0.5)},
                                   {0.02, Vector::Constant(1, -2.0)}};
  const double x0 = 0.8, w = 0.1, dt = 0.125;
  const double expected = x0 + (-std::pow(x0, 5) / (1.0 + std::pow(x0, 5) / std::sqrt(8.0))) * dt +
                          x0 * w + x0 * 0.5 + x0 * -2.0;
  CHECK(step(Vector::Constant(1, x0), 0.0, dt, Vector::Constant(1, w), two, e1, {8, 0.5, Taming::tamed})[0] ==
        doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("simulate") {
  Problem still = std::get<Problem>(builtin("quintic_ode"));
  still.drift = [](double, const Vector& x) -> Vector { return Vector::Zero(x.size()); };
  still.x0 = Vector::Constant(1, 2.5);
  const NoisePath noise = problem_noise(still, 64, 1, 0);
  const Trajectory flat = simulate(still, {16, 0.5, Taming::tamed}, noise);
  CHECK(flat.states.cols() == 17);
  CHECK((flat.states.array() == 2.5).all());
  CHECK(flat.finite());

  for (const char* name : {"example1", "example1_nojumps", "quintic_ode"}) {
    const AnyProblem any = builtin(name);
    const auto& p = std::get<Problem>(any);
    for (std::uint64_t path = 0; path < 5; ++path) {
      const NoisePath fine = problem_noise(any, 1024, 3, path);
      const SchemeConfig config{32, 0.5, Taming::tamed};
      const Trajectory a = simulate(p, config, fine);
      const Trajectory b = simulate(p, config, coarsen(fine, 32));
      const Trajectory c = simulate(p, config, coarsen(coarsen(fine, 4), 8));
      CHECK(a.states == b.states);
      CHECK(a.states == c.states);
    }
  }
}

TEST_CASE("tamed quintic ODE tracks the exact solution") {
  const auto ode = std::get<Problem>(builtin("quintic_ode"));
  const double exact = std::pow(5.0, -0.25);
  const double rk4 = quintic_rk4(1.0, 1.0, 100000);
  REQUIRE(rk4 == doctest::Approx(exact).epsilon(1e-12));
  REQUIRE(exact == doctest::Approx(0.66874).epsilon(1e-5));
  const Trajectory t = simulate(ode, {1024, 0.5, Taming::tamed}, problem_noise(ode, 1024, 1, 0));
  CHECK(std::abs(t.terminal()[0] - rk4) < 1e-2);
}

TEST_CASE("untamed blow-up is flagged, not thrown") {
  Problem ode = std::get<Problem>(builtin("quintic_ode"));
  ode.x0 = Vector::Constant(1, 5.0);
  const NoisePath noise = problem_noise(ode, 64, 1, 0);
  const Trajectory untamed = simulate(ode, {64, 0.5, Taming::untamed}, noise);
  REQUIRE_FALSE(untamed.finite());
  CHECK(*untamed.first_non_finite < 64);
  const Trajectory tamed = simulate(ode, {64, 0.5, Taming::tamed}, noise);
  CHECK(tamed.finite());
  CHECK(tamed.terminal()[0] >= 0.0);
  CHECK(tamed.terminal()[0] <= 1.0);
}

TEST_CASE("simulate rejects inconsistent inputs") {
  const auto e1 = std::get<Problem>(builtin("example1"));
  const NoisePath noise = problem_noise(e1, 48, 1, 0);
  CHECK_THROWS_AS(simulate(e1, {32, 0.5, Taming::tamed}, noise), ConfigError);
  CHECK_THROWS_AS(simulate(e1, {96, 0.5, Taming::tamed}, noise), ConfigError);
  CHECK_THROWS_AS(simulate(e1, {16, 0.0, Taming::tamed}, noise), ConfigError);
  CHECK_THROWS_AS(simulate(e1, {16, 0.75, Taming::tamed}, noise), ConfigError);
  CHECK_NOTHROW(simulate(e1, {16, 0.75, Taming::untamed}, noise));
  Problem shifted = e1;
  shifted.t1 = 2.0;
  CHECK_THROWS_AS(simulate(shifted, {16, 0.5, Taming::tamed}, noise), ConfigError);
  Problem wide = e1;
  wide.noise_dim = 2;
  CHECK_THROWS_AS(simulate(wide, {16, 0.5, Taming::tamed}, noise), ConfigError);
}

TEST_CASE("compensated jump part is a martingale") {
  const Problem p = pure_jumps(3.0, StandardNormalMarks{});
  constexpr int kPaths = 10000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < kPaths; ++i) {
    const double x = simulate(p, {64, 0.5, Taming::tamed}, problem_noise(p, 64, 8, i)).terminal()[0];
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / kPaths;
  const double se = std::sqrt((sum_sq / kPaths - mean * mean) / kPaths);
  CHECK(std::abs(mean - 1.0) <= 4.0 * se);

  // Non-zero compensator: drift-free mean stays at x0 too.
  const Problem shifted = pure_jumps(2.0, UniformMarks{0.0, 1.0});
  sum = sum_sq = 0.0;
  for (int i = 0; i < kPaths; ++i) {
    const double x = simulate(shifted, {64, 0.5, Taming::tamed}, problem_noise(shifted, 64, 9, i)).terminal()[0];
    sum += x;
    sum_sq += x * x;
  }
  const double shifted_mean = sum / kPaths;
  const double shifted_se = std::sqrt((sum_sq / kPaths - shifted_mean * shifted_mean) / kPaths);
  CHECK(std::abs(shifted_mean - 1.0) <= 4.0 * shifted_se);
}
