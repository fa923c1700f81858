#pragma once

#include <cmath>
#include <random>
#include <string>

#include "gds/core/errors.hpp"
#include "gds/math/densities.hpp"
#include "gds/mode/find_mode.hpp"
#include "gds/model/evaluate.hpp"

namespace gds {

/// Multivariate normal proposal centred at the mode with covariance s·(−H)⁻¹.
struct Proposal {
  ParameterVector mean;
  Matrix chol_cov;  // lower triangular, chol_cov·chol_covᵀ = s·(−H)⁻¹
  double log_c2 = 0.0;
  double scale = 1.0;

  Index dimension() const { return mean.size(); }
};

struct ProposalSample {
  ParameterVector theta;
  double log_g = kNaN;
  double log_phi = kNaN;
  double v = kNaN;  // −log Φ
};

inline Proposal build_proposal(const ModeResult& mode, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ContractViolation("proposal scale must be positive and finite");
  const Index d = mode.theta_star.size();
  if (mode.hessian.rows() != d || mode.hessian.cols() != d) throw ContractViolation("Hessian does not match the mode");

  Eigen::LLT<Matrix> neg_h(-mode.hessian);
  if (neg_h.info() != Eigen::Success) throw NotNegativeDefinite("Hessian not negative definite");
  Matrix cov = scale * neg_h.solve(Matrix::Identity(d, d));
  cov = 0.5 * (cov + cov.transpose()).eval();
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) throw NotNegativeDefinite("proposal covariance is not positive definite");

  Proposal p;
  p.mean = mode.theta_star;
  p.chol_cov = llt.matrixL().toDenseMatrix();
  p.scale = scale;
  p.log_c2 = -0.5 * static_cast<double>(d) * math::kLog2Pi - p.chol_cov.diagonal().array().log().sum();
  return p;
}

/// log g(θ) via a triangular solve against the Cholesky factor.
inline double proposal_log_density(const Proposal& prop, const ParameterVector& theta) {
  const Vector z = prop.chol_cov.triangularView<Eigen::Lower>().solve(theta - prop.mean);
  return prop.log_c2 - 0.5 * z.squaredNorm();
}

/// θ = mean + L·z for a given vector of standard normals; L⁻¹(θ − mean) is z itself.
inline ProposalSample sample_proposal_from_normals(const Proposal& prop, const Vector& z) {
  ProposalSample s;
  s.theta = prop.mean;
  s.theta.noalias() += prop.chol_cov.triangularView<Eigen::Lower>() * z;
  s.log_g = prop.log_c2 - 0.5 * z.squaredNorm();
  return s;
}

template <class Rng>
ProposalSample sample_proposal(const Proposal& prop, Rng& rng) {
  std::normal_distribution<double> normal;
  Vector z(prop.dimension());
  for (Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
  return sample_proposal_from_normals(prop, z);
}

namespace detail {

inline double combine_log_phi(double log_d, double log_c1, double log_g, double log_c2) {
  if (log_d == -kInf) return -kInf;
  return (log_d - log_c1) - (log_g - log_c2);
}

}  // namespace detail

/// log Φ(θ) = (log D(θ) − log c₁) − (log g(θ) − log c₂). Φ itself is never formed.
template <LogDensityModel M>
double log_phi(const M& model, const ModeResult& mode, const Proposal& prop, const ParameterVector& theta) {
  const double log_d = log_unnormalized_posterior(model, theta);
  return detail::combine_log_phi(log_d, mode.log_c1, proposal_log_density(prop, theta), prop.log_c2);
}

/// Fills log_phi and v for a sample drawn from `prop`.
template <LogDensityModel M>
void evaluate_sample(const M& model, const ModeResult& mode, const Proposal& prop, ProposalSample& s) {
  const double log_d = detail::sanitize(model.log_density(s.theta));
  s.log_phi = detail::combine_log_phi(log_d, mode.log_c1, s.log_g, prop.log_c2);
  s.v = -s.log_phi;
}

inline constexpr double kScaleLadderFactor = 1.25;
inline constexpr int kScaleLadderSteps = 60;

/// Walks s0·1.25^j and returns the first scale whose `pilot_size` fresh proposal draws all have
/// log Φ ≤ 0. The pilot draws themselves are thrown away.
template <LogDensityModel M, class Rng>
double tune_scale(const M& model, const ModeResult& mode, double s0, std::size_t pilot_size, Rng& rng,
                  int max_steps = kScaleLadderSteps) {
  if (!(s0 > 0.0) || !std::isfinite(s0)) throw ContractViolation("tuning needs a positive starting scale");
  if (pilot_size < 100) throw ContractViolation("tuning needs at least 100 pilot draws");
  double s = s0;
  for (int step = 0; step <= max_steps; ++step, s *= kScaleLadderFactor) {
    const Proposal prop = build_proposal(mode, s);
    bool dominated = true;
    for (std::size_t m = 0; m < pilot_size && dominated; ++m) {
      ProposalSample sample = sample_proposal(prop, rng);
      evaluate_sample(model, mode, prop, sample);
      dominated = sample.log_phi <= kDominanceTolerance;
    }
    if (dominated) return s;
  }
  throw TuningFailed("proposal family cannot dominate posterior: no scale up to " + std::to_string(s0) + "·1.25^" +
                     std::to_string(max_steps) + " kept log Phi <= 0 (heavy tails or wrong mode?)");
}

}  // namespace gds
