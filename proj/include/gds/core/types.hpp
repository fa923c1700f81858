#pragma once

#include <limits>

#include <Eigen/Dense>

namespace gds {

/// Point in the unconstrained parameter space (every model parameter mapped to the real line).
using ParameterVector = Eigen::VectorXd;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// log Φ above this is a dominance violation (Φ > 1); at or below it counts as Φ ≤ 1.
inline constexpr double kDominanceTolerance = 1e-9;

}  // namespace gds
