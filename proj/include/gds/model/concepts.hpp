#pragma once

#include <concepts>

#include "gds/core/types.hpp"

namespace gds {

/// A model only has to report its dimension and the unnormalized log posterior
/// log D(θ, y) on the unconstrained scale (Jacobian terms included).
template <class M>
concept LogDensityModel = requires(const M& m, const ParameterVector& theta) {
  { m.dimension() } -> std::convertible_to<Index>;
  { m.log_density(theta) } -> std::convertible_to<double>;
};

template <class M>
concept HasGradient = LogDensityModel<M> && requires(const M& m, const ParameterVector& theta) {
  { m.gradient(theta) } -> std::convertible_to<Vector>;
};

template <class M>
concept HasHessian = LogDensityModel<M> && requires(const M& m, const ParameterVector& theta) {
  { m.hessian(theta) } -> std::convertible_to<Matrix>;
};

class TransformMap;

template <class M>
concept HasTransformMap = LogDensityModel<M> && requires(const M& m) {
  { m.transform_map() } -> std::convertible_to<const TransformMap&>;
};

}  // namespace gds
