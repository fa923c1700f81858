#pragma once

#include <random>
#include <string>

#include "gds/core/errors.hpp"
#include "gds/model/dataset.hpp"
#include "gds/random/streams.hpp"

namespace gds {

struct SimulatedData {
  Dataset data;
  Vector beta;      // population mean (hier_gauss) or regression coefficients (lin_reg)
  Matrix omega;     // hier_gauss only
  Matrix unit_betas;  // hier_gauss only, one row per unit
  double noise_var = 1.0;
};

struct HierGaussDesign {
  Index n = 100;
  Index k = 4;
  Index t_per_unit = 25;
  Vector beta_bar;  // empty means (5, 0, −2, 0) padded or truncated to k
  double omega_diag = 0.25;
};

struct LinRegDesign {
  Index n = 200;
  Index k = 5;  // non-intercept covariates
  Index t_per_unit = 25;
  double intercept = 5.0;
  double slope_low = -5.0;
  double slope_high = 5.0;
  double noise_var = 1.0;
};

inline Vector default_beta_bar(Index k) {
  const double base[] = {5.0, 0.0, -2.0, 0.0};
  Vector b = Vector::Zero(k);
  for (Index j = 0; j < std::min<Index>(k, 4); ++j) b[j] = base[j];
  return b;
}

/// Intercept then k slopes spaced evenly over [low, high].
inline Vector lin_reg_truth(const LinRegDesign& d) {
  Vector b(d.k + 1);
  b[0] = d.intercept;
  if (d.k == 1) b[1] = 0.5 * (d.slope_low + d.slope_high);
  for (Index j = 0; j < d.k && d.k > 1; ++j) {
    b[j + 1] = d.slope_low + (d.slope_high - d.slope_low) * static_cast<double>(j) / static_cast<double>(d.k - 1);
  }
  return b;
}

namespace detail {

inline Dataset empty_panel(Index n, Index t_per_unit, Index cols) {
  Dataset ds;
  const Index rows = n * t_per_unit;
  ds.unit_id.resize(static_cast<std::size_t>(rows));
  ds.t.resize(static_cast<std::size_t>(rows));
  ds.y.resize(rows);
  ds.x.resize(rows, cols);
  return ds;
}

}  // namespace detail

inline SimulatedData simulate_hier_gauss(const HierGaussDesign& d, std::uint64_t seed) {
  if (d.n < 1 || d.k < 1 || d.t_per_unit < 1) throw ConfigError("hier_gauss design needs n, k, T >= 1");
  if (!(d.omega_diag > 0.0)) throw ConfigError("hier_gauss omega_diag must be positive");
  SimulatedData out;
  out.beta = d.beta_bar.size() == 0 ? default_beta_bar(d.k) : d.beta_bar;
  if (out.beta.size() != d.k) throw ConfigError("beta_bar length must equal k");
  out.omega = d.omega_diag * Matrix::Identity(d.k, d.k);
  out.unit_betas.resize(d.n, d.k);
  out.data = detail::empty_panel(d.n, d.t_per_unit, d.k);

  Engine rng = make_stream(seed, StreamKind::simulate);
  std::normal_distribution<double> normal;
  const double omega_sd = std::sqrt(d.omega_diag);
  Index row = 0;
  for (Index i = 0; i < d.n; ++i) {
    for (Index j = 0; j < d.k; ++j) out.unit_betas(i, j) = out.beta[j] + omega_sd * normal(rng);
    for (Index t = 0; t < d.t_per_unit; ++t, ++row) {
      out.data.unit_id[static_cast<std::size_t>(row)] = i + 1;
      out.data.t[static_cast<std::size_t>(row)] = t + 1;
      out.data.x(row, 0) = 1.0;
      for (Index j = 1; j < d.k; ++j) out.data.x(row, j) = normal(rng);
      out.data.y[row] = out.data.x.row(row).dot(out.unit_betas.row(i)) + normal(rng);
    }
  }
  return out;
}

inline SimulatedData simulate_lin_reg(const LinRegDesign& d, std::uint64_t seed) {
  if (d.n < 1 || d.k < 0 || d.t_per_unit < 1) throw ConfigError("lin_reg design needs n, T >= 1 and k >= 0");
  if (!(d.noise_var > 0.0)) throw ConfigError("lin_reg noise variance must be positive");
  SimulatedData out;
  out.beta = lin_reg_truth(d);
  out.noise_var = d.noise_var;
  out.data = detail::empty_panel(d.n, d.t_per_unit, d.k + 1);

  Engine rng = make_stream(seed, StreamKind::simulate);
  std::normal_distribution<double> normal;
  const double sd = std::sqrt(d.noise_var);
  Index row = 0;
  for (Index i = 0; i < d.n; ++i) {
    for (Index t = 0; t < d.t_per_unit; ++t, ++row) {
      out.data.unit_id[static_cast<std::size_t>(row)] = i + 1;
      out.data.t[static_cast<std::size_t>(row)] = t + 1;
      out.data.x(row, 0) = 1.0;
      for (Index j = 1; j <= d.k; ++j) out.data.x(row, j) = normal(rng);
      out.data.y[row] = out.data.x.row(row).dot(out.beta) + sd * normal(rng);
    }
  }
  return out;
}

}  // namespace gds
