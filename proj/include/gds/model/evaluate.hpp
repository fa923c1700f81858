#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "gds/core/errors.hpp"
#include "gds/model/concepts.hpp"

namespace gds {

namespace detail {

template <LogDensityModel M>
void require_point(const M& model, const ParameterVector& theta) {
  if (theta.size() != static_cast<Index>(model.dimension())) {
    throw ContractViolation("parameter vector has length " + std::to_string(theta.size()) +
                            " but the model dimension is " + std::to_string(model.dimension()));
  }
  for (Index i = 0; i < theta.size(); ++i) {
    if (!std::isfinite(theta[i])) {
      throw ContractViolation("parameter entry " + std::to_string(i) + " is not finite");
    }
  }
}

inline double sanitize(double value) {
  return (std::isnan(value) || value == kInf) ? -kInf : value;
}

inline double fd_step(double x, double exponent) {
  return std::pow(std::numeric_limits<double>::epsilon(), exponent) * std::max(1.0, std::abs(x));
}

inline void require_finite(const Vector& g, const char* what) {
  for (Index i = 0; i < g.size(); ++i) {
    if (!std::isfinite(g[i])) {
      throw NonFiniteError(std::string(what) + " entry " + std::to_string(i) + " is not finite");
    }
  }
}

}  // namespace detail

/// log D(θ, y). Never NaN or +inf: those collapse to -inf (zero density).
template <LogDensityModel M>
double log_unnormalized_posterior(const M& model, const ParameterVector& theta) {
  detail::require_point(model, theta);
  return detail::sanitize(model.log_density(theta));
}

/// Central differences of log D with step cbrt(eps)·max(1, |θᵢ|).
template <LogDensityModel M>
Vector finite_difference_gradient(const M& model, const ParameterVector& theta) {
  Vector g(theta.size());
  ParameterVector x = theta;
  for (Index i = 0; i < theta.size(); ++i) {
    const double h = detail::fd_step(theta[i], 1.0 / 3.0);
    x[i] = theta[i] + h;
    const double up = detail::sanitize(model.log_density(x));
    x[i] = theta[i] - h;
    const double down = detail::sanitize(model.log_density(x));
    x[i] = theta[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

template <LogDensityModel M>
Vector gradient(const M& model, const ParameterVector& theta) {
  detail::require_point(model, theta);
  Vector g;
  if constexpr (HasGradient<M>) {
    g = model.gradient(theta);
  } else {
    g = finite_difference_gradient(model, theta);
  }
  detail::require_finite(g, "gradient");
  return g;
}

/// Symmetric Hessian of log D. Analytic when the model has one; otherwise central
/// differences of the gradient (or second differences of log D), then (H + Hᵀ)/2.
template <LogDensityModel M>
Matrix hessian_at(const M& model, const ParameterVector& theta) {
  detail::require_point(model, theta);
  const Index d = theta.size();
  Matrix h(d, d);
  if constexpr (HasHessian<M>) {
    h = model.hessian(theta);
  } else if constexpr (HasGradient<M>) {
    ParameterVector x = theta;
    for (Index j = 0; j < d; ++j) {
      const double step = detail::fd_step(theta[j], 1.0 / 3.0);
      x[j] = theta[j] + step;
      const Vector up = model.gradient(x);
      x[j] = theta[j] - step;
      const Vector down = model.gradient(x);
      x[j] = theta[j];
      h.col(j) = (up - down) / (2.0 * step);
    }
  } else {
    ParameterVector x = theta;
    const double f0 = detail::sanitize(model.log_density(theta));
    auto f = [&](Index i, double di, Index j, double dj) {
      x = theta;
      x[i] += di;
      x[j] += dj;
      return detail::sanitize(model.log_density(x));
    };
    for (Index i = 0; i < d; ++i) {
      const double hi = detail::fd_step(theta[i], 0.25);
      h(i, i) = (f(i, hi, i, 0.0) - 2.0 * f0 + f(i, -hi, i, 0.0)) / (hi * hi);
      for (Index j = 0; j < i; ++j) {
        const double hj = detail::fd_step(theta[j], 0.25);
        h(i, j) = (f(i, hi, j, hj) - f(i, hi, j, -hj) - f(i, -hi, j, hj) + f(i, -hi, j, -hj)) /
                  (4.0 * hi * hj);
        h(j, i) = h(i, j);
      }
    }
  }
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j <= i; ++j) {
      const double s = 0.5 * (h(i, j) + h(j, i));
      if (!std::isfinite(s)) {
        throw NonFiniteError("hessian entry (" + std::to_string(i) + ", " + std::to_string(j) +
                             ") is not finite");
      }
      h(i, j) = s;
      h(j, i) = s;
    }
  }
  return h;
}

}  // namespace gds
