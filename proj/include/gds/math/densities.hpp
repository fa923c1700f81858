#pragma once

#include <cmath>
#include <numbers>

#include "gds/core/types.hpp"

namespace gds::math {

inline constexpr double kLog2Pi = 1.8378770664093454836;  // log(2π)

inline double log_normal_pdf(double x, double mean, double variance) {
  const double r = x - mean;
  return -0.5 * (kLog2Pi + std::log(variance) + r * r / variance);
}

inline double log_cauchy_pdf(double x, double location, double scale) {
  const double r = (x - location) / scale;
  return -std::log(std::numbers::pi * scale) - std::log1p(r * r);
}

inline double log_inverse_gamma_pdf(double x, double shape, double scale) {
  return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - scale / x;
}

/// log Γ_k(a), the multivariate gamma function.
inline double log_multivariate_gamma(double a, int k) {
  double out = 0.25 * k * (k - 1) * std::log(std::numbers::pi);
  for (int j = 0; j < k; ++j) out += std::lgamma(a - 0.5 * j);
  return out;
}

/// Inverse-Wishart convention used by every model here: density proportional to
/// |Ω|^{-(ν+k+1)/2} exp(-tr(A Ω⁻¹)/2), so the mode is A/(ν+k+1).
inline constexpr const char* kInverseWishartConvention =
    "IW(nu, A): |Omega|^{-(nu+k+1)/2} exp(-tr(A Omega^-1)/2), mode A/(nu+k+1)";

/// Normalizing constant of IW(ν, A): (ν/2)log|A| - (νk/2)log 2 - log Γ_k(ν/2).
inline double log_inverse_wishart_normalizer(double nu, const Matrix& scale_matrix) {
  const int k = static_cast<int>(scale_matrix.rows());
  const double log_det_a = 2.0 * Eigen::LLT<Matrix>(scale_matrix).matrixL().toDenseMatrix()
                                     .diagonal().array().log().sum();
  return 0.5 * nu * log_det_a - 0.5 * nu * k * std::numbers::ln2 -
         log_multivariate_gamma(0.5 * nu, k);
}

}  // namespace gds::math
