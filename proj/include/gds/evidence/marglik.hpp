#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "gds/core/errors.hpp"
#include "gds/math/log_space.hpp"
#include "gds/model/dataset.hpp"
#include "gds/models/lin_reg_conjugate.hpp"
#include "gds/sampler/run_gds.hpp"

namespace gds {

struct EvidenceEstimate {
  double log_marginal_likelihood = kNaN;
  double gamma_hat = kNaN;
  double log_integral_term = kNaN;  // log Σ(2i−1)e^{−vᵢ} − 2 log M
};

/// Shifted-geometric MLE of the acceptance probability: N / Σ attempts.
inline double estimate_gamma(std::span<const std::uint64_t> attempts) {
  if (attempts.empty()) throw ContractViolation("need at least one attempt count");
  std::uint64_t total = 0;
  for (auto a : attempts) {
    if (a < 1) throw ContractViolation("attempt counts must be at least 1");
    total += a;
  }
  return static_cast<double>(attempts.size()) / static_cast<double>(total);
}

/// log(Σᵢ (2i−1)e^{−vᵢ}) − 2 log M for ascending v. `total_count` is M when some pool values were
/// dropped as +∞; they add nothing to the sum.
inline double log_sum_2i_minus_1(std::span<const double> v_sorted, std::size_t total_count) {
  if (total_count < v_sorted.size()) throw ContractViolation("total count below the number of values");
  if (v_sorted.empty()) return -kInf;
  std::vector<double> terms(v_sorted.size());
  for (std::size_t i = 0; i < v_sorted.size(); ++i) {
    terms[i] = std::log(2.0 * static_cast<double>(i + 1) - 1.0) - v_sorted[i];
  }
  return math::log_sum_exp(terms) - 2.0 * std::log(static_cast<double>(total_count));
}

inline double log_sum_2i_minus_1(std::span<const double> v_sorted) {
  return log_sum_2i_minus_1(v_sorted, v_sorted.size());
}

/// log L̂ = log c₁ − log c₂ − log γ̂ + log Σ(2i−1)e^{−vᵢ} − 2 log M.
inline EvidenceEstimate estimate_log_evidence(const GdsRunResult& run) {
  if (run.draws.size() < 30) throw ContractViolation("evidence estimate needs at least 30 draws");
  std::vector<std::uint64_t> attempts;
  attempts.reserve(run.draws.size());
  for (const auto& d : run.draws) attempts.push_back(d.attempts);

  EvidenceEstimate e;
  e.gamma_hat = estimate_gamma(attempts);
  e.log_integral_term = log_sum_2i_minus_1(run.table.v, run.table.total_count);
  e.log_marginal_likelihood = run.log_c1 - run.log_c2 - std::log(e.gamma_hat) + e.log_integral_term;
  return e;
}

/// Closed-form log p(y) for y = Xβ + e under β | σ² ~ N(β₀, σ²V₀), σ² ~ IG(r, α):
/// the multivariate Student-t marginal, via the normal–inverse-gamma update.
inline double analytic_log_evidence_linreg(const Dataset& data, const LinRegHyper& hyper) {
  const Index p = data.num_covariates();
  if (hyper.beta0.size() != p || hyper.v0.rows() != p || hyper.v0.cols() != p) {
    throw ContractViolation("prior dimensions do not match the design");
  }
  Eigen::LLT<Matrix> v0(hyper.v0);
  if (v0.info() != Eigen::Success) throw ContractViolation("V0 must be positive definite");
  const Matrix p0 = v0.solve(Matrix::Identity(p, p));
  const Matrix pn = p0 + data.x.transpose() * data.x;
  Eigen::LLT<Matrix> pn_llt(pn);
  if (pn_llt.info() != Eigen::Success) throw SamplerError("posterior precision is singular");

  const Vector rhs = p0 * hyper.beta0 + data.x.transpose() * data.y;
  const Vector bn = pn_llt.solve(rhs);
  const double n = static_cast<double>(data.rows());
  const double quad = data.y.squaredNorm() + hyper.beta0.dot(p0 * hyper.beta0) - bn.dot(pn * bn);
  const double alpha_n = hyper.alpha + 0.5 * quad;
  const double r_n = hyper.r + 0.5 * n;
  const double log_det_v0 = 2.0 * v0.matrixLLT().diagonal().array().log().sum();
  const double log_det_pn = 2.0 * pn_llt.matrixLLT().diagonal().array().log().sum();

  return -0.5 * n * math::kLog2Pi - 0.5 * log_det_pn - 0.5 * log_det_v0 + hyper.r * std::log(hyper.alpha) -
         r_n * std::log(alpha_n) + std::lgamma(r_n) - std::lgamma(hyper.r);
}

}  // namespace gds
