#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gds/core/errors.hpp"
#include "gds/model/evaluate.hpp"

namespace gds {

struct ModeOptions {
  int max_iter = 500;
  double initial_radius = 1.0;
  double max_radius = 1e4;
  double shrink = 0.25;
  double grow = 2.0;
  double accept_ratio = 0.1;
  // Converged when ‖∇ log D‖∞ ≤ gradient_tolerance · max(1, |log D|).
  double gradient_tolerance = 1e-6;
  // Extra starting points; the best converged mode wins.
  std::vector<ParameterVector> multistart;
};

struct ModeResult {
  ParameterVector theta_star;
  double log_c1 = -kInf;
  Matrix hessian;
  bool converged = false;
  double gradient_norm = kInf;
  int iterations = 0;
};

namespace detail {

/// Dogleg step for maximizing m(p) = gᵀp − ½pᵀBp inside ‖p‖ ≤ radius, with B = −H.
/// Falls back to the Cauchy point (or a boundary gradient step) when B is not positive definite.
inline Vector dogleg_step(const Vector& g, const Matrix& b, double radius) {
  const double g_norm = g.norm();
  if (g_norm == 0.0) return Vector::Zero(g.size());
  const double curvature = g.dot(b * g);
  const Vector to_boundary = (radius / g_norm) * g;
  if (!(curvature > 0.0)) return to_boundary;

  const Vector cauchy = (g.squaredNorm() / curvature) * g;
  Eigen::LLT<Matrix> llt(b);
  if (llt.info() != Eigen::Success) {
    return cauchy.norm() >= radius ? to_boundary : cauchy;
  }
  const Vector newton = llt.solve(g);
  if (newton.norm() <= radius) return newton;
  if (cauchy.norm() >= radius) return to_boundary;

  // Solve ‖cauchy + τ(newton − cauchy)‖ = radius for τ in [0, 1].
  const Vector dir = newton - cauchy;
  const double a = dir.squaredNorm();
  const double bq = 2.0 * cauchy.dot(dir);
  const double c = cauchy.squaredNorm() - radius * radius;
  const double tau = (-bq + std::sqrt(bq * bq - 4.0 * a * c)) / (2.0 * a);
  return cauchy + tau * dir;
}

/// B + λI with the smallest λ on a doubling ladder that makes it positive definite (λ = 0 if B already is).
inline Matrix positive_definite_shift(const Matrix& b) {
  Eigen::LLT<Matrix> llt(b);
  if (llt.info() == Eigen::Success) return b;
  const double base = std::max(1e-8, 1e-3 * b.diagonal().cwiseAbs().maxCoeff());
  const Matrix id = Matrix::Identity(b.rows(), b.cols());
  for (double lambda = base; std::isfinite(lambda); lambda *= 2.0) {
    Matrix shifted = b + lambda * id;
    if (Eigen::LLT<Matrix>(shifted).info() == Eigen::Success) return shifted;
  }
  return b;
}

inline bool is_negative_definite(const Matrix& h) {
  Eigen::LLT<Matrix> llt(-h);
  return llt.info() == Eigen::Success && (llt.matrixLLT().diagonal().array() > 0.0).all();
}

template <LogDensityModel M>
ModeResult find_mode_single(const M& model, const ParameterVector& init, const ModeOptions& opts) {
  ParameterVector x = init;
  double f = log_unnormalized_posterior(model, x);
  if (!std::isfinite(f)) throw ContractViolation("log density is not finite at the starting point");

  double radius = opts.initial_radius;
  Vector g = gradient(model, x);
  Matrix b;        // −H at x
  Matrix b_model;  // b shifted to be positive definite; defines the quadratic model
  bool have_hessian = false;
  for (int iter = 0; iter <= opts.max_iter; ++iter) {
    const double g_sup = g.lpNorm<Eigen::Infinity>();
    if (g_sup <= opts.gradient_tolerance * std::max(1.0, std::abs(f))) {
      ModeResult result{x, f, have_hessian ? Matrix(-b) : hessian_at(model, x), true, g_sup, iter};
      if (!is_negative_definite(result.hessian)) {
        throw NotNegativeDefinite("saddle or flat region: Hessian at the terminal point is not negative definite");
      }
      return result;
    }
    if (iter == opts.max_iter) break;

    if (!have_hessian) {
      b = -hessian_at(model, x);
      b_model = positive_definite_shift(b);
      have_hessian = true;
    }
    const Vector step = dogleg_step(g, b_model, radius);
    const double step_norm = step.norm();
    const double predicted = g.dot(step) - 0.5 * step.dot(b_model * step);

    const ParameterVector trial = x + step;
    const double f_trial = trial.allFinite() ? log_unnormalized_posterior(model, trial) : -kInf;
    const double ratio = (std::isfinite(f_trial) && predicted > 0.0) ? (f_trial - f) / predicted : -kInf;

    if (ratio < 0.25) {
      radius = opts.shrink * std::min(radius, step_norm);
    } else if (ratio > 0.75 && step_norm >= 0.99 * radius) {
      radius = std::min(opts.grow * radius, opts.max_radius);
    }
    if (ratio > opts.accept_ratio) {
      x = trial;
      f = f_trial;
      g = gradient(model, x);
      have_hessian = false;
    }
    if (radius < 1e-14 * std::max(1.0, x.norm())) {
      throw ConvergenceError("trust region collapsed before the gradient criterion was met", x, f, iter);
    }
  }
  throw ConvergenceError("mode search did not converge within " + std::to_string(opts.max_iter) + " iterations",
                         x, f, opts.max_iter);
}

}  // namespace detail

/// Maximizes log D by trust-region Newton; returns θ*, log c₁ = log D(θ*), and the Hessian there.
template <LogDensityModel M>
ModeResult find_mode(const M& model, const ParameterVector& init, const ModeOptions& opts = {}) {
  if (opts.multistart.empty()) return detail::find_mode_single(model, init, opts);

  std::vector<ParameterVector> starts{init};
  starts.insert(starts.end(), opts.multistart.begin(), opts.multistart.end());
  ModeResult best;
  bool found = false;
  std::string last_error;
  for (const auto& s : starts) {
    try {
      ModeResult r = detail::find_mode_single(model, s, opts);
      if (!found || r.log_c1 > best.log_c1) best = std::move(r);
      found = true;
    } catch (const SamplerError& e) {
      last_error = e.what();
    }
  }
  if (!found) throw ConvergenceError("no starting point converged: " + last_error, init, -kInf, 0);
  return best;
}

}  // namespace gds
