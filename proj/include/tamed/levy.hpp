#pragma once

#include <variant>

#include <Eigen/Dense>

#include "tamed/random.hpp"

namespace tamed {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct StandardNormalMarks {};

struct UniformMarks {
  double a = 0.0;
  double b = 1.0;
};

struct PointMassMarks {
  Vector z;
};

/// Probability law of jump marks. The Lévy measure is intensity times this law.
using MarkLaw = std::variant<StandardNormalMarks, UniformMarks, PointMassMarks>;

Eigen::Index mark_dimension(const MarkLaw& law);
Vector mark_mean(const MarkLaw& law);
Vector sample_mark(const MarkLaw& law, RandomStream& stream);

/// Finite-activity jump part: events arrive at `intensity` per unit time.
struct LevyModel {
  double intensity = 0.0;
  MarkLaw mark_law = StandardNormalMarks{};
};

}  // namespace tamed
