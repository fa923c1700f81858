#pragma once

#include <cmath>

#include "gds/core/errors.hpp"
#include "gds/math/densities.hpp"
#include "gds/model/dataset.hpp"
#include "gds/model/transforms.hpp"

namespace gds {

/// Hyperparameters of β | σ² ~ N(β₀, σ²V₀), σ² ~ IG(r, α) (shape r, scale α).
struct LinRegHyper {
  double r = 2.0;
  double alpha = 1.0;
  Vector beta0;
  Matrix v0;

  /// r=2, α=1, β₀=0, V₀=0.2·I for p regression coefficients (intercept included).
  static LinRegHyper defaults(Index p) { return {2.0, 1.0, Vector::Zero(p), 0.2 * Matrix::Identity(p, p)}; }
};

/// y = Xβ + e, e ~ N(0, σ²I), with the conjugate normal–inverse-gamma prior.
/// Unconstrained parameters: β (p entries) then log σ².
class LinRegConjugateModel {
 public:
  LinRegConjugateModel(const Dataset& data, LinRegHyper hyper) : hyper_(std::move(hyper)) {
    p_ = data.num_covariates();
    if (p_ < 1) throw DataError("regression needs at least the intercept column");
    if (hyper_.beta0.size() != p_ || hyper_.v0.rows() != p_ || hyper_.v0.cols() != p_) {
      throw ContractViolation("prior mean/covariance do not match the number of coefficients");
    }
    if (!(hyper_.r > 0.0) || !(hyper_.alpha > 0.0)) throw ContractViolation("IG shape and scale must be positive");
    Eigen::LLT<Matrix> v0(hyper_.v0);
    if (v0.info() != Eigen::Success) throw ContractViolation("V0 must be positive definite");
    v0_inv_ = v0.solve(Matrix::Identity(p_, p_));
    log_det_v0_ = 2.0 * v0.matrixLLT().diagonal().array().log().sum();

    xtx_ = data.x.transpose() * data.x;
    xty_ = data.x.transpose() * data.y;
    yty_ = data.y.squaredNorm();
    n_obs_ = static_cast<double>(data.rows());
    map_ = TransformMapBuilder().add("beta", TransformKind::identity, p_).add("sigma2", TransformKind::log, 1).build();
  }

  Index dimension() const { return p_ + 1; }
  Index num_coefficients() const { return p_; }
  double num_observations() const { return n_obs_; }
  const LinRegHyper& hyper() const { return hyper_; }
  const TransformMap& transform_map() const { return map_; }

  double log_density(const ParameterVector& theta) const {
    const auto beta = theta.head(p_);
    const double tau = theta[p_];
    const double inv_var = std::exp(-tau);
    const double pd = static_cast<double>(p_);
    const Vector dev = beta - hyper_.beta0;
    return -0.5 * n_obs_ * (math::kLog2Pi + tau) - 0.5 * rss(beta) * inv_var
           - 0.5 * (pd * (math::kLog2Pi + tau) + log_det_v0_) - 0.5 * dev.dot(v0_inv_ * dev) * inv_var
           + hyper_.r * std::log(hyper_.alpha) - std::lgamma(hyper_.r) - (hyper_.r + 1.0) * tau
           - hyper_.alpha * inv_var
           + tau;
  }

  Vector gradient(const ParameterVector& theta) const {
    const auto beta = theta.head(p_);
    const double inv_var = std::exp(-theta[p_]);
    const Vector dev = beta - hyper_.beta0;
    Vector g(p_ + 1);
    g.head(p_) = (xty_ - xtx_ * beta - v0_inv_ * dev) * inv_var;
    g[p_] = -0.5 * n_obs_ - 0.5 * static_cast<double>(p_) - hyper_.r +
            (0.5 * rss(beta) + 0.5 * dev.dot(v0_inv_ * dev) + hyper_.alpha) * inv_var;
    return g;
  }

  Matrix hessian(const ParameterVector& theta) const {
    const auto beta = theta.head(p_);
    const double inv_var = std::exp(-theta[p_]);
    const Vector dev = beta - hyper_.beta0;
    Matrix h(p_ + 1, p_ + 1);
    h.topLeftCorner(p_, p_) = -(xtx_ + v0_inv_) * inv_var;
    const Vector cross = -(xty_ - xtx_ * beta - v0_inv_ * dev) * inv_var;
    h.col(p_).head(p_) = cross;
    h.row(p_).head(p_) = cross.transpose();
    h(p_, p_) = -(0.5 * rss(beta) + 0.5 * dev.dot(v0_inv_ * dev) + hyper_.alpha) * inv_var;
    return h;
  }

 private:
  template <class Derived>
  double rss(const Eigen::MatrixBase<Derived>& beta) const {
    return yty_ - 2.0 * beta.dot(xty_) + beta.dot(xtx_ * beta);
  }

  LinRegHyper hyper_;
  Index p_ = 0;
  Matrix v0_inv_;
  double log_det_v0_ = 0.0;
  Matrix xtx_;
  Vector xty_;
  double yty_ = 0.0;
  double n_obs_ = 0.0;
  TransformMap map_;
};

/// `k` counts the non-intercept covariates, so the dataset carries k+1 columns with x1 ≡ 1.
inline LinRegConjugateModel make_lin_reg_conjugate(Index n, Index k, Index t_per_unit, const Dataset& data,
                                                   const LinRegHyper* hyper = nullptr) {
  if (data.num_covariates() != k + 1) {
    throw DataError("dataset has " + std::to_string(data.num_covariates()) + " covariate columns, expected " +
                    std::to_string(k + 1) + " (intercept + k)");
  }
  const auto groups = data.unit_rows();
  if (static_cast<Index>(groups.size()) != n) {
    throw DataError("dataset has " + std::to_string(groups.size()) + " units, expected " + std::to_string(n));
  }
  for (const auto& g : groups) {
    if (static_cast<Index>(g.size()) != t_per_unit) throw DataError("unbalanced dataset: expected T rows per unit");
  }
  if ((data.x.col(0).array() != 1.0).any()) throw DataError("first covariate must be the intercept (all 1)");
  return LinRegConjugateModel(data, hyper ? *hyper : LinRegHyper::defaults(k + 1));
}

}  // namespace gds
