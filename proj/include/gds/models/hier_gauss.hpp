#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gds/core/errors.hpp"
#include "gds/math/densities.hpp"
#include "gds/model/dataset.hpp"
#include "gds/model/transforms.hpp"

namespace gds {

struct HierGaussHyper {
  double nu = 10.0;
  Matrix v_beta;  // prior covariance of the population mean
  Matrix a;       // inverse-Wishart scale matrix

  static HierGaussHyper defaults(Index k) {
    return {10.0, 0.2 * Matrix::Identity(k, k), 0.1 * Matrix::Identity(k, k)};
  }
};

/// Hierarchical linear model:
///   y_it ~ N(x_itᵀβᵢ, 1),  βᵢ | β̄, Ω ~ MVN(β̄, Ω),  β̄ ~ MVN(0, V_β),  Ω ~ IW(ν, A).
/// Unconstrained layout: β₁ … βₙ, β̄, then Ω in log-Cholesky form.
class HierGaussModel {
 public:
  HierGaussModel(const Dataset& data, HierGaussHyper hyper) : hyper_(std::move(hyper)) {
    k_ = data.num_covariates();
    if (k_ < 1) throw DataError("hierarchical model needs at least one covariate");
    if (hyper_.v_beta.rows() != k_ || hyper_.a.rows() != k_) {
      throw ContractViolation("hyperparameter matrices must be k×k");
    }
    for (const auto& rows : data.unit_rows()) {
      Unit u;
      u.xtx = Matrix::Zero(k_, k_);
      u.xty = Vector::Zero(k_);
      for (Index r : rows) {
        const Vector xr = data.x.row(r).transpose();
        u.xtx.noalias() += xr * xr.transpose();
        u.xty += data.y[r] * xr;
        u.yty += data.y[r] * data.y[r];
      }
      u.count = static_cast<double>(rows.size());
      units_.push_back(std::move(u));
    }
    n_ = static_cast<Index>(units_.size());

    Eigen::LLT<Matrix> vb(hyper_.v_beta);
    if (vb.info() != Eigen::Success) throw ContractViolation("V_beta must be positive definite");
    v_beta_inv_ = vb.solve(Matrix::Identity(k_, k_));
    log_det_v_beta_ = 2.0 * vb.matrixLLT().diagonal().array().log().sum();
    iw_log_norm_ = math::log_inverse_wishart_normalizer(hyper_.nu, hyper_.a);

    TransformMapBuilder builder;
    for (Index i = 0; i < n_; ++i) builder.add("beta_" + std::to_string(i + 1), TransformKind::identity, k_);
    builder.add("beta_bar", TransformKind::identity, k_).add_covariance("Omega", k_);
    map_ = builder.build();
  }

  Index dimension() const { return n_ * k_ + k_ + lower_triangle_size(k_); }
  Index num_units() const { return n_; }
  Index num_covariates() const { return k_; }
  Index population_offset() const { return n_ * k_; }
  const TransformMap& transform_map() const { return map_; }
  const HierGaussHyper& hyper() const { return hyper_; }

  /// Mode-search start from per-unit ridge fits: their mean for β̄, their scatter for Ω.
  /// The origin sits in the basin of a shrunken local mode (small β̄, large Ω) for many datasets.
  ParameterVector starting_point() const {
    ParameterVector theta(dimension());
    Vector mean = Vector::Zero(k_);
    for (Index i = 0; i < n_; ++i) {
      const Unit& u = units_[static_cast<std::size_t>(i)];
      theta.segment(i * k_, k_) = (u.xtx + Matrix::Identity(k_, k_)).ldlt().solve(u.xty);
      mean += theta.segment(i * k_, k_);
    }
    mean /= static_cast<double>(n_);
    Matrix scatter = 0.01 * Matrix::Identity(k_, k_);
    for (Index i = 0; i < n_; ++i) {
      const Vector d = theta.segment(i * k_, k_) - mean;
      scatter += d * d.transpose() / static_cast<double>(n_);
    }
    theta.segment(population_offset(), k_) = mean;
    theta.tail(lower_triangle_size(k_)) = unconstrained_from_cholesky(scatter.llt().matrixL());
    return theta;
  }

  double log_density(const ParameterVector& theta) const {
    const Pieces p = pieces(theta);
    const double nk = static_cast<double>(n_), kd = static_cast<double>(k_);
    double out = 0.0;
    for (Index i = 0; i < n_; ++i) {
      const Unit& u = units_[static_cast<std::size_t>(i)];
      const auto b = theta.segment(i * k_, k_);
      out += -0.5 * u.count * math::kLog2Pi - 0.5 * (u.yty - 2.0 * b.dot(u.xty) + b.dot(u.xtx * b));
    }
    out += -0.5 * nk * kd * math::kLog2Pi - 0.5 * nk * p.log_det_omega;
    out += -0.5 * (p.l_inv * p.s * p.l_inv.transpose()).trace();
    out += -0.5 * (kd * math::kLog2Pi + log_det_v_beta_ + p.beta_bar.dot(v_beta_inv_ * p.beta_bar));
    out += iw_log_norm_ - 0.5 * (hyper_.nu + kd + 1.0) * p.log_det_omega;
    out += log_cholesky_log_jacobian(theta.data() + chol_offset(), k_);
    return out;
  }

  Vector gradient(const ParameterVector& theta) const {
    const Pieces p = pieces(theta);
    Vector g(dimension());
    const Matrix omega_inv = p.l_inv.transpose() * p.l_inv;
    Vector diff_sum = Vector::Zero(k_);
    for (Index i = 0; i < n_; ++i) {
      const Unit& u = units_[static_cast<std::size_t>(i)];
      const auto b = theta.segment(i * k_, k_);
      const Vector omega_inv_diff = omega_inv * (b - p.beta_bar);
      g.segment(i * k_, k_) = u.xty - u.xtx * b - omega_inv_diff;
      diff_sum += omega_inv_diff;
    }
    g.segment(population_offset(), k_) = diff_sum - v_beta_inv_ * p.beta_bar;

    // d/dL of -½tr(SΩ⁻¹) is L⁻ᵀL⁻¹SL⁻ᵀ; log|Ω| terms fold into a constant per diagonal entry.
    const Matrix dl = p.l_inv.transpose() * (p.l_inv * p.s * p.l_inv.transpose());
    const double det_coeff = static_cast<double>(n_) + hyper_.nu + static_cast<double>(k_) + 1.0;
    Index pos = chol_offset();
    for (Index r = 0; r < k_; ++r) {
      for (Index c = 0; c <= r; ++c) {
        if (r == c) {
          g[pos] = dl(r, r) * p.l(r, r) - det_coeff + static_cast<double>(k_ - r + 1);
        } else {
          g[pos] = dl(r, c);
        }
        ++pos;
      }
    }
    return g;
  }

 private:
  struct Unit {
    Matrix xtx;
    Vector xty;
    double yty = 0.0;
    double count = 0.0;
  };

  struct Pieces {
    Vector beta_bar;
    Matrix l;
    Matrix l_inv;
    Matrix s;  // A + Σ(βᵢ − β̄)(βᵢ − β̄)ᵀ
    double log_det_omega = 0.0;
  };

  Index chol_offset() const { return n_ * k_ + k_; }

  Pieces pieces(const ParameterVector& theta) const {
    Pieces p;
    p.beta_bar = theta.segment(population_offset(), k_);
    p.l = cholesky_from_unconstrained(theta.data() + chol_offset(), k_);
    p.l_inv = p.l.triangularView<Eigen::Lower>().solve(Matrix::Identity(k_, k_));
    p.log_det_omega = 2.0 * p.l.diagonal().array().log().sum();
    p.s = hyper_.a;
    for (Index i = 0; i < n_; ++i) {
      const Vector diff = theta.segment(i * k_, k_) - p.beta_bar;
      p.s.noalias() += diff * diff.transpose();
    }
    return p;
  }

  HierGaussHyper hyper_;
  std::vector<Unit> units_;
  Index n_ = 0;
  Index k_ = 0;
  Matrix v_beta_inv_;
  double log_det_v_beta_ = 0.0;
  double iw_log_norm_ = 0.0;
  TransformMap map_;
};

namespace detail {

inline void require_balanced_panel(const Dataset& data, Index n, Index k, Index t_per_unit) {
  if (data.num_covariates() != k) {
    throw DataError("dataset has " + std::to_string(data.num_covariates()) + " covariates, expected " +
                    std::to_string(k));
  }
  const auto groups = data.unit_rows();
  if (static_cast<Index>(groups.size()) != n) {
    throw DataError("dataset has " + std::to_string(groups.size()) + " units, expected " + std::to_string(n));
  }
  for (const auto& g : groups) {
    if (static_cast<Index>(g.size()) != t_per_unit) {
      throw DataError("a unit has " + std::to_string(g.size()) + " observations, expected " +
                      std::to_string(t_per_unit));
    }
  }
  if (k > 0 && (data.x.col(0).array() != 1.0).any()) throw DataError("first covariate must be the intercept (all 1)");
}

}  // namespace detail

inline HierGaussModel make_hier_gauss(Index n, Index k, Index t_per_unit, const Dataset& data,
                                      const HierGaussHyper* hyper = nullptr) {
  detail::require_balanced_panel(data, n, k, t_per_unit);
  return HierGaussModel(data, hyper ? *hyper : HierGaussHyper::defaults(k));
}

}  // namespace gds
