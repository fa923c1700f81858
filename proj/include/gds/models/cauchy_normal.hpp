#pragma once

#include "gds/math/densities.hpp"
#include "gds/model/transforms.hpp"

namespace gds {

/// Y = X + ε₁, X = Θ + ε₂ with ε₁ ~ Cauchy(0,1), ε₂ ~ N(0, 5), Θ ~ N(0, 50000), one
/// observation Y. Parameters (X, Θ); normal scale arguments are variances.
class CauchyNormalModel {
 public:
  explicit CauchyNormalModel(double y = 0.0, double noise_variance = 5.0, double prior_variance = 50000.0)
      : y_(y), noise_var_(noise_variance), prior_var_(prior_variance),
        map_(TransformMapBuilder().add("X", TransformKind::identity, 1).add("Theta", TransformKind::identity, 1).build()) {}

  Index dimension() const { return 2; }
  const TransformMap& transform_map() const { return map_; }

  double log_density(const ParameterVector& p) const {
    const double x = p[0], theta = p[1];
    return math::log_cauchy_pdf(y_ - x, 0.0, 1.0) + math::log_normal_pdf(x - theta, 0.0, noise_var_) +
           math::log_normal_pdf(theta, 0.0, prior_var_);
  }

  Vector gradient(const ParameterVector& p) const {
    const double x = p[0], theta = p[1];
    const double r = y_ - x;
    Vector g(2);
    g[0] = 2.0 * r / (1.0 + r * r) - (x - theta) / noise_var_;
    g[1] = (x - theta) / noise_var_ - theta / prior_var_;
    return g;
  }

  Matrix hessian(const ParameterVector& p) const {
    const double r = y_ - p[0];
    const double denom = (1.0 + r * r) * (1.0 + r * r);
    Matrix h(2, 2);
    h(0, 0) = -2.0 * (1.0 - r * r) / denom - 1.0 / noise_var_;
    h(0, 1) = h(1, 0) = 1.0 / noise_var_;
    h(1, 1) = -1.0 / noise_var_ - 1.0 / prior_var_;
    return h;
  }

  double observation() const { return y_; }
  double noise_variance() const { return noise_var_; }
  double prior_variance() const { return prior_var_; }

 private:
  double y_;
  double noise_var_;
  double prior_var_;
  TransformMap map_;
};

inline CauchyNormalModel make_cauchy_normal() { return CauchyNormalModel(); }

}  // namespace gds
