#pragma once

#include <cmath>

#include "gds/core/errors.hpp"
#include "gds/math/densities.hpp"
#include "gds/model/transforms.hpp"

namespace gds {

/// log D(θ) = log_scale − ½(θ − a)ᵀP(θ − a). Its normalizer is known in closed form, which makes
/// it the reference target for proposal and evidence checks.
class GaussianModel {
 public:
  GaussianModel(Vector mean, Matrix precision, double log_scale = 0.0)
      : mean_(std::move(mean)), precision_(std::move(precision)), log_scale_(log_scale),
        map_(TransformMapBuilder().add("theta", TransformKind::identity, mean_.size()).build()) {
    if (precision_.rows() != mean_.size() || precision_.cols() != mean_.size()) {
      throw ContractViolation("precision matrix does not match the mean");
    }
    Eigen::LLT<Matrix> llt(precision_);
    if (llt.info() != Eigen::Success) throw ContractViolation("precision matrix must be positive definite");
    log_det_precision_ = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  }

  static GaussianModel standard(Index d) { return GaussianModel(Vector::Zero(d), Matrix::Identity(d, d)); }

  Index dimension() const { return mean_.size(); }
  const TransformMap& transform_map() const { return map_; }

  double log_density(const ParameterVector& theta) const {
    const Vector r = theta - mean_;
    return log_scale_ - 0.5 * r.dot(precision_ * r);
  }
  Vector gradient(const ParameterVector& theta) const { return -(precision_ * (theta - mean_)); }
  Matrix hessian(const ParameterVector&) const { return -precision_; }

  /// log ∫ D(θ) dθ.
  double log_normalizer() const {
    return log_scale_ + 0.5 * static_cast<double>(dimension()) * math::kLog2Pi - 0.5 * log_det_precision_;
  }

  const Vector& mean() const { return mean_; }
  const Matrix& precision() const { return precision_; }

 private:
  Vector mean_;
  Matrix precision_;
  double log_scale_;
  double log_det_precision_ = 0.0;
  TransformMap map_;
};

/// y_j ~ N(μ, σ²) with σ² known, μ ~ N(m₀, τ₀²). One parameter, Gaussian posterior.
class NormalNormalModel {
 public:
  NormalNormalModel(Vector observations, double noise_variance = 1.0, double prior_mean = 0.0,
                    double prior_variance = 1.0)
      : y_(std::move(observations)), noise_var_(noise_variance), prior_mean_(prior_mean),
        prior_var_(prior_variance),
        map_(TransformMapBuilder().add("mu", TransformKind::identity, 1).build()) {
    if (y_.size() == 0) throw ContractViolation("normal-normal model needs at least one observation");
    sum_ = y_.sum();
  }

  Index dimension() const { return 1; }
  const TransformMap& transform_map() const { return map_; }

  double log_density(const ParameterVector& p) const {
    double out = math::log_normal_pdf(p[0], prior_mean_, prior_var_);
    for (Index j = 0; j < y_.size(); ++j) out += math::log_normal_pdf(y_[j], p[0], noise_var_);
    return out;
  }
  Vector gradient(const ParameterVector& p) const {
    Vector g(1);
    g[0] = (sum_ - static_cast<double>(y_.size()) * p[0]) / noise_var_ - (p[0] - prior_mean_) / prior_var_;
    return g;
  }

  double posterior_variance() const {
    return 1.0 / (static_cast<double>(y_.size()) / noise_var_ + 1.0 / prior_var_);
  }
  double posterior_mean() const {
    return posterior_variance() * (sum_ / noise_var_ + prior_mean_ / prior_var_);
  }

 private:
  Vector y_;
  double noise_var_;
  double prior_mean_;
  double prior_var_;
  double sum_ = 0.0;
  TransformMap map_;
};

}  // namespace gds
